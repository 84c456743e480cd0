//! Logarithmic potential of a weight on the disk `|z| <= 3/4`.
//!
//! `phi(z) = (2/pi) * sum_cells g(zeta) h^2 L(z - zeta)` where `L` is the
//! logarithm averaged over the disk of area `h^2` centred at the cell node
//! (exact `log|.|` outside that disk). With this kernel `phi` is C^1, the
//! singular cell is integrated in closed form, and
//! `phi_z = (1/pi) sum g(zeta) h^2 / (z - zeta)` away from the cell cores.
//! The Laplacian identity `phi_{z zbar} = g` is used as the exact value.

use std::sync::Arc;

use num::Zero;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{LeviError, Result};
use crate::linalg::C64;
use crate::sets::PlanarCompactSet;

/// Radius of the working patch in the base variable.
pub const PATCH_RADIUS: f64 = 0.75;
/// Default quadrature spacing, `2^-9`.
pub const DEFAULT_H: f64 = 1.0 / 512.0;
/// Default sharpness `s` of the weight `exp(-s / dist)`.
pub const DEFAULT_SHARPNESS: f64 = 0.01;

const FLUSH: f64 = 1e-300;

type WeightFn = dyn Fn(C64) -> f64 + Send + Sync;

/// Values of the potential and its derivatives at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialValue {
    pub phi: f64,
    pub phi_z: C64,
    /// `phi_{z zbar}`, equal to the weight.
    pub g: f64,
}

pub struct PotentialField {
    h: f64,
    half: i64,
    sharpness: f64,
    weight: Arc<WeightFn>,
    g: Vec<f64>,
    phi: Vec<f64>,
    phi_z: Vec<C64>,
    // nodes with positive weight, for direct sums
    support: Vec<(C64, f64)>,
}

impl std::fmt::Debug for PotentialField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PotentialField")
            .field("h", &self.h)
            .field("nodes_per_axis", &(2 * self.half + 1))
            .field("sharpness", &self.sharpness)
            .finish()
    }
}

/// Weight `g(z) = exp(-s / dist(K, z))`, zero on K and flushed to zero when
/// it underflows below 1e-300.
pub fn weight_from_distance(dist: f64, sharpness: f64) -> f64 {
    if dist <= 0.0 {
        return 0.0;
    }
    let g = (-sharpness / dist).exp();
    if g < FLUSH {
        0.0
    } else {
        g
    }
}

fn core_radius(h: f64) -> f64 {
    h / std::f64::consts::PI.sqrt()
}

fn log_kernel(d: C64, a: f64) -> f64 {
    let r2 = d.norm_sqr();
    if r2 >= a * a {
        0.5 * r2.ln()
    } else {
        a.ln() - 0.5 * (a * a - r2) / (a * a)
    }
}

fn dz_kernel(d: C64, a: f64) -> C64 {
    let r2 = d.norm_sqr();
    if r2 >= a * a {
        d.conj() / (2.0 * r2)
    } else {
        d.conj() / (2.0 * a * a)
    }
}

impl PotentialField {
    /// Potential for the weight `exp(-s / dist(K, .))`.
    pub fn build(k: Arc<PlanarCompactSet>, h: f64, sharpness: f64) -> Result<Self> {
        if !(sharpness > 0.0 && sharpness.is_finite()) {
            return Err(LeviError::Precondition(format!("sharpness must be positive, got {sharpness}")));
        }
        let trunc = k.truncation_error();
        if trunc > h {
            return Err(LeviError::Precondition(format!(
                "grid spacing {h:e} is finer than the set's generation length {trunc:e}; increase the Cantor depth"
            )));
        }
        let weight = move |z: C64| weight_from_distance(k.distance(z), sharpness);
        Self::from_weight(h, sharpness, Arc::new(weight))
    }

    /// Potential for an arbitrary nonnegative weight (used for testing the
    /// quadrature against closed forms).
    pub fn from_weight(h: f64, sharpness: f64, weight: Arc<WeightFn>) -> Result<Self> {
        if !(h > 0.0 && h <= 1.0 / 128.0) {
            return Err(LeviError::Precondition(format!("grid spacing must satisfy 0 < h <= 2^-7, got {h}")));
        }
        let half = (PATCH_RADIUS / h + 1e-9).floor() as i64;
        let n = (2 * half + 1) as usize;
        let g: Vec<f64> = (0..n * n)
            .into_par_iter()
            .map(|idx| {
                let (i, j) = ((idx % n) as i64 - half, (idx / n) as i64 - half);
                let z = C64::new(i as f64 * h, j as f64 * h);
                if z.norm() <= PATCH_RADIUS {
                    weight(z)
                } else {
                    0.0
                }
            })
            .collect();
        if g.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(LeviError::NonFinite("weight values"));
        }
        let support: Vec<(C64, f64)> = g
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.0)
            .map(|(idx, &v)| {
                let (i, j) = ((idx % n) as i64 - half, (idx / n) as i64 - half);
                (C64::new(i as f64 * h, j as f64 * h), v)
            })
            .collect();
        let (phi, phi_z) = convolve(&g, n, h);
        Ok(PotentialField {
            h,
            half,
            sharpness,
            weight,
            g,
            phi,
            phi_z,
            support,
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn sharpness(&self) -> f64 {
        self.sharpness
    }

    pub fn nodes_per_axis(&self) -> usize {
        (2 * self.half + 1) as usize
    }

    /// Exact weight at any point.
    pub fn weight(&self, z: C64) -> f64 {
        if z.norm() <= PATCH_RADIUS {
            (self.weight)(z)
        } else {
            0.0
        }
    }

    fn node_index(&self, z: C64) -> Option<usize> {
        let fi = z.re / self.h;
        let fj = z.im / self.h;
        if fi.fract() != 0.0 || fj.fract() != 0.0 {
            return None;
        }
        let (i, j) = (fi as i64, fj as i64);
        if i.abs() > self.half || j.abs() > self.half {
            return None;
        }
        let n = self.nodes_per_axis() as i64;
        Some(((j + self.half) * n + (i + self.half)) as usize)
    }

    /// Potential data at `z`: grid values at nodes, direct sums elsewhere.
    pub fn eval(&self, z: C64) -> PotentialValue {
        match self.node_index(z) {
            Some(idx) => PotentialValue {
                phi: self.phi[idx],
                phi_z: self.phi_z[idx],
                g: self.g[idx],
            },
            None => PotentialValue {
                phi: self.phi_direct(z),
                phi_z: self.phi_z_direct(z),
                g: self.weight(z),
            },
        }
    }

    /// Direct quadrature sum for `phi`.
    pub fn phi_direct(&self, z: C64) -> f64 {
        let a = core_radius(self.h);
        let s: f64 = self.support.iter().map(|&(zeta, g)| g * log_kernel(z - zeta, a)).sum();
        s * 2.0 / std::f64::consts::PI * self.h * self.h
    }

    /// Direct quadrature sum for `phi_z`.
    pub fn phi_z_direct(&self, z: C64) -> C64 {
        let a = core_radius(self.h);
        let s: C64 = self.support.iter().map(|&(zeta, g)| dz_kernel(z - zeta, a) * g).sum();
        s * (2.0 / std::f64::consts::PI * self.h * self.h)
    }

    /// Grid rows `(x, y, g, phi, re phi_z, im phi_z)` inside the patch, in
    /// lattice order (x fastest).
    pub fn grid_rows(&self) -> impl Iterator<Item = [f64; 6]> + '_ {
        let n = self.nodes_per_axis();
        (0..n * n).filter_map(move |idx| {
            let (i, j) = ((idx % n) as i64 - self.half, (idx / n) as i64 - self.half);
            let z = C64::new(i as f64 * self.h, j as f64 * self.h);
            (z.norm() <= PATCH_RADIUS).then(|| {
                [z.re, z.im, self.g[idx], self.phi[idx], self.phi_z[idx].re, self.phi_z[idx].im]
            })
        })
    }
}

fn fast_len(min: usize) -> usize {
    let mut p = min;
    loop {
        let mut m = p;
        for f in [2, 3, 5] {
            while m % f == 0 {
                m /= f;
            }
        }
        if m == 1 {
            return p;
        }
        p += 1;
    }
}

fn fft2(data: &mut [C64], p: usize, inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(p)
    } else {
        planner.plan_fft_forward(p)
    };
    let pass = |buf: &mut [C64]| {
        buf.par_chunks_mut(p).for_each(|row| {
            let mut scratch = vec![C64::zero(); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(row, &mut scratch);
        });
    };
    pass(data);
    transpose(data, p);
    pass(data);
    transpose(data, p);
}

fn transpose(data: &mut [C64], p: usize) {
    for r in 0..p {
        for c in r + 1..p {
            data.swap(r * p + c, c * p + r);
        }
    }
}

/// Linear convolution of the node weights with both kernels through a
/// zero-padded 2D FFT.
fn convolve(g: &[f64], n: usize, h: f64) -> (Vec<f64>, Vec<C64>) {
    let p = fast_len(2 * n - 1);
    let a = core_radius(h);
    let mut gw = vec![C64::zero(); p * p];
    for j in 0..n {
        for i in 0..n {
            gw[j * p + i] = C64::new(g[j * n + i], 0.0);
        }
    }
    fft2(&mut gw, p, false);

    let offset = |k: usize| -> i64 {
        if k < n {
            k as i64
        } else {
            k as i64 - p as i64
        }
    };
    let scale = 2.0 / std::f64::consts::PI * h * h / (p * p) as f64;
    let run = |kernel: &(dyn Fn(C64) -> C64 + Sync)| -> Vec<C64> {
        let mut kw: Vec<C64> = (0..p * p)
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (offset(idx % p), offset(idx / p));
                if i.unsigned_abs() as usize >= n || j.unsigned_abs() as usize >= n {
                    C64::zero()
                } else {
                    kernel(C64::new(i as f64 * h, j as f64 * h))
                }
            })
            .collect();
        fft2(&mut kw, p, false);
        kw.par_iter_mut().zip(gw.par_iter()).for_each(|(k, g)| *k *= g);
        fft2(&mut kw, p, true);
        let mut out = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                out.push(kw[j * p + i] * scale);
            }
        }
        out
    };
    let phi = run(&|d| C64::new(log_kernel(d, a), 0.0)).into_iter().map(|c| c.re).collect();
    let phi_z = run(&|d| dz_kernel(d, a));
    (phi, phi_z)
}
