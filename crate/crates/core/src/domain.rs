//! Circular domains `{|w|^2 < F(z)}` in C^2 over the patch `|z| <= 3/4`.
//!
//! The complete Hartogs domain uses `F = exp(-phi)` with the potential built
//! from a compact set K; the unit ball is the same shape with
//! `F = 1 - |z|^2`. Both share the defining function `rho = |w|^2 - F(z)`,
//! whose derivatives only need `F`, `F_z` and `F_{z zbar}` at the base point.

use std::f64::consts::TAU;
use std::sync::Arc;

use num::Zero;
use rayon::prelude::*;

use crate::error::{LeviError, Result};
use crate::levi::{DefiningFunction, DefiningValues};
use crate::linalg::{orthonormalize, HermitianMatrix, SubspaceBasis, C64};
use crate::potential::{PotentialField, PotentialValue, PATCH_RADIUS};
use crate::sets::PlanarCompactSet;

/// Geometry of the fibre over one base point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Site {
    pub z: C64,
    pub f: f64,
    pub f_z: C64,
    pub f_zzbar: f64,
    /// Potential data (Hartogs only).
    pub potential: Option<PotentialValue>,
    /// Distance from the base point to K (Hartogs only).
    pub dist_k: Option<f64>,
}

impl Site {
    /// Fibre radius `|w| = sqrt(F(z))`.
    pub fn radius(&self) -> f64 {
        self.f.sqrt()
    }

    pub fn w(&self, theta: f64) -> C64 {
        C64::from_polar(self.radius(), theta)
    }

    /// `rho`, its `d/dz_j` gradient and complex Hessian at `(z, w)`.
    pub fn defining(&self, w: C64) -> DefiningValues {
        let hessian = HermitianMatrix::diagonal(&[-self.f_zzbar, 1.0]).expect("diagonal matrix is Hermitian");
        DefiningValues {
            rho: w.norm_sqr() - self.f,
            grad: vec![-self.f_z, w.conj()],
            hessian,
        }
    }
}

pub struct HartogsDomain {
    k: Arc<PlanarCompactSet>,
    field: PotentialField,
}

impl std::fmt::Debug for HartogsDomain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HartogsDomain").field("field", &self.field).finish()
    }
}

impl HartogsDomain {
    pub fn build(k: PlanarCompactSet, h: f64, sharpness: f64) -> Result<Self> {
        let r = k.bounding_radius();
        if r >= 0.5 {
            return Err(LeviError::Precondition(format!(
                "K must lie in the disk |z| < 1/2; its bounding radius is {r}"
            )));
        }
        let k = Arc::new(k);
        let field = PotentialField::build(k.clone(), h, sharpness)?;
        Ok(HartogsDomain { k, field })
    }

    pub fn k(&self) -> &PlanarCompactSet {
        &self.k
    }

    pub fn field(&self) -> &PotentialField {
        &self.field
    }

    pub fn site(&self, z: C64) -> Result<Site> {
        check_patch(z)?;
        let pv = self.field.eval(z);
        let e = (-pv.phi).exp();
        Ok(Site {
            z,
            f: e,
            f_z: -pv.phi_z * e,
            f_zzbar: e * (pv.phi_z.norm_sqr() - pv.g),
            potential: Some(pv),
            dist_k: Some(self.k.distance(z)),
        })
    }

    /// Normalized null direction `(1, -phi_z w)` over a point of K.
    pub fn analytic_null_frame(&self, z: C64, theta: f64) -> Result<Vec<C64>> {
        let site = self.site_on_k(z)?;
        let pv = site.potential.expect("Hartogs sites carry potential data");
        let v = [C64::new(1.0, 0.0), -pv.phi_z * site.w(theta)];
        let nv = crate::linalg::norm(&v);
        Ok(v.iter().map(|x| x / nv).collect())
    }

    /// Tangent vectors `X_p, Y_p, Z_p` of the support over K, unnormalized,
    /// in the paired frame `(d/dz, d/dzbar, d/dw, d/dwbar)`.
    pub fn example_tangent_frame(&self, z: C64, theta: f64) -> Result<[[C64; 4]; 3]> {
        let site = self.site_on_k(z)?;
        let pv = site.potential.expect("Hartogs sites carry potential data");
        let (pz, pzb) = (pv.phi_z, pv.phi_z.conj());
        let w = site.w(theta);
        let wb = w.conj();
        let i = C64::new(0.0, 1.0);
        let zero = C64::zero();
        let one = C64::new(1.0, 0.0);
        // rotation of the fibre
        let x = [zero, zero, i * w, -i * wb];
        // d/dy = i d/dz - i d/dzbar, transported along the graph
        let cy = -i * 0.5 * pz + i * 0.5 * pzb;
        let y = [i, -i, w * cy, wb * cy];
        // d/dx = d/dz + d/dzbar
        let cx = -0.5 * pz - 0.5 * pzb;
        let zv = [one, one, w * cx, wb * cx];
        Ok([x, y, zv])
    }

    fn site_on_k(&self, z: C64) -> Result<Site> {
        let site = self.site(z)?;
        if site.dist_k != Some(0.0) {
            return Err(LeviError::Precondition(format!("base point {z} is not in K")));
        }
        Ok(site)
    }
}

/// Converts a vector from the paired frame `(d/dz_1, d/dzbar_1, ...)` to the
/// split frame `(d/dz_1, ..., d/dzbar_1, ...)` used by the linear algebra.
pub fn paired_to_split(v: &[C64]) -> Vec<C64> {
    let n = v.len() / 2;
    let mut out = vec![C64::zero(); v.len()];
    for j in 0..n {
        out[j] = v[2 * j];
        out[n + j] = v[2 * j + 1];
    }
    out
}

/// Complexified real tangent space `{V : d rho (V) = 0}` of the level set, in
/// the split frame.
pub fn complexified_level_tangent(grad: &[C64]) -> SubspaceBasis {
    let n = grad.len();
    // d rho(V) = sum rho_{z_j} V_j + sum conj(rho_{z_j}) V_{n+j}
    let mut normal: Vec<C64> = grad.iter().map(|g| g.conj()).collect();
    normal.extend(grad.iter().copied());
    let mut gens = vec![normal];
    for k in 0..2 * n {
        let mut e = vec![C64::zero(); 2 * n];
        e[k] = C64::new(1.0, 0.0);
        gens.push(e);
    }
    let full = orthonormalize(2 * n, &gens, 1e-10);
    SubspaceBasis::from_orthonormal(2 * n, full.vectors()[1..].to_vec(), 1e-10)
}

fn check_patch(z: C64) -> Result<()> {
    if z.norm() > PATCH_RADIUS || !z.norm().is_finite() {
        return Err(LeviError::Precondition(format!("base point {z} lies outside the patch |z| <= 3/4")));
    }
    Ok(())
}

#[derive(Debug)]
pub enum Domain {
    Ball,
    Hartogs(HartogsDomain),
}

impl Domain {
    pub fn site(&self, z: C64) -> Result<Site> {
        match self {
            Domain::Ball => {
                check_patch(z)?;
                Ok(Site {
                    z,
                    f: 1.0 - z.norm_sqr(),
                    f_z: -z.conj(),
                    f_zzbar: -1.0,
                    potential: None,
                    dist_k: None,
                })
            }
            Domain::Hartogs(d) => d.site(z),
        }
    }

    pub fn hartogs(&self) -> Option<&HartogsDomain> {
        match self {
            Domain::Hartogs(d) => Some(d),
            Domain::Ball => None,
        }
    }

    /// Boundary lattice: base points `-1 + 2i/n_z` per axis inside the patch,
    /// extra base points drawn from K, and `n_theta` equally spaced fibre
    /// angles starting at 0.
    pub fn boundary_sample(&self, n_z: usize, n_theta: usize, k_sites: usize, seed: u64) -> Result<BoundarySample> {
        if n_z < 8 || !n_z.is_power_of_two() {
            return Err(LeviError::Precondition(format!("n_z must be a power of two >= 8, got {n_z}")));
        }
        if n_theta == 0 || !n_theta.is_power_of_two() {
            return Err(LeviError::Precondition(format!("n_theta must be a power of two, got {n_theta}")));
        }
        if let Domain::Hartogs(d) = self {
            let spacing = 2.0 / n_z as f64;
            if spacing < d.field().h() {
                return Err(LeviError::Precondition(format!(
                    "lattice spacing {spacing} is finer than the potential grid {}",
                    d.field().h()
                )));
            }
        }
        let mut bases = Vec::new();
        for j in 0..n_z {
            for i in 0..n_z {
                let z = C64::new(-1.0 + 2.0 * i as f64 / n_z as f64, -1.0 + 2.0 * j as f64 / n_z as f64);
                if z.norm() <= PATCH_RADIUS {
                    bases.push((z, SiteOrigin::Lattice { i, j }));
                }
            }
        }
        if k_sites > 0 {
            let d = self.hartogs().ok_or_else(|| {
                LeviError::Precondition("sites drawn from K need a Hartogs domain".into())
            })?;
            for (idx, z) in d.k().sample(k_sites, seed).into_iter().enumerate() {
                bases.push((z, SiteOrigin::KSample { index: idx }));
            }
        }
        let sites: Vec<Site> = bases.par_iter().map(|(z, _)| self.site(*z)).collect::<Result<_>>()?;
        let thetas = (0..n_theta).map(|k| TAU * k as f64 / n_theta as f64).collect();
        Ok(BoundarySample {
            sites,
            origins: bases.into_iter().map(|(_, o)| o).collect(),
            thetas,
            n_z,
        })
    }
}

impl DefiningFunction for Domain {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, p: &[C64]) -> Result<DefiningValues> {
        if p.len() != 2 {
            return Err(LeviError::DimensionMismatch(format!("expected a point of C^2, got length {}", p.len())));
        }
        Ok(self.site(p[0])?.defining(p[1]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SiteOrigin {
    Lattice { i: usize, j: usize },
    KSample { index: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPoint {
    pub z: C64,
    pub w: C64,
    pub theta: f64,
    pub site: usize,
    pub step: usize,
}

impl BoundaryPoint {
    /// Real coordinates `(x, y, u, v)` with `z = x + iy`, `w = u + iv`.
    pub fn coords(&self) -> [f64; 4] {
        [self.z.re, self.z.im, self.w.re, self.w.im]
    }
}

/// Boundary samples indexed as `site * n_theta + step`.
#[derive(Clone, Debug)]
pub struct BoundarySample {
    pub sites: Vec<Site>,
    pub origins: Vec<SiteOrigin>,
    pub thetas: Vec<f64>,
    pub n_z: usize,
}

impl BoundarySample {
    pub fn n_theta(&self) -> usize {
        self.thetas.len()
    }

    pub fn len(&self) -> usize {
        self.sites.len() * self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, index: usize) -> BoundaryPoint {
        let nt = self.n_theta();
        let (site, step) = (index / nt, index % nt);
        let theta = self.thetas[step];
        BoundaryPoint {
            z: self.sites[site].z,
            w: self.sites[site].w(theta),
            theta,
            site,
            step,
        }
    }

    pub fn points(&self) -> impl Iterator<Item = BoundaryPoint> + '_ {
        (0..self.len()).map(|k| self.point(k))
    }
}
