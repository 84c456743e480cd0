//! Numeric surrogate for the C-infinity Zariski tangent space of a sampled set.
//!
//! At each radius of a dyadic sweep, the neighbours of the query point are
//! centred on their centroid and the RMS spread along each principal axis is
//! compared with `tau * r`. The tangent dimension is the value that persists
//! over at least three consecutive radii. The estimate is a lower bound for
//! the true Zariski tangent of irregular sets; it is exact on embedded
//! submanifolds once the sampling resolves the chosen radii.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{LeviError, Result};
use crate::linalg::{complexify_real_span, hermitian_eigen, HermitianMatrix, SubspaceBasis};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcaParams {
    /// Radii, in decreasing order.
    pub scales: Vec<f64>,
    pub tau: f64,
    pub min_points: usize,
    pub plateau_len: usize,
}

impl Default for PcaParams {
    fn default() -> Self {
        PcaParams::dyadic(2, 5)
    }
}

impl PcaParams {
    /// Radii `2^-k` for `k` in `k_min..=k_max`.
    pub fn dyadic(k_min: i32, k_max: i32) -> Self {
        PcaParams {
            scales: (k_min..=k_max).map(|k| 2f64.powi(-k)).collect(),
            tau: 0.2,
            min_points: 30,
            plateau_len: 3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.scales.len() < self.plateau_len || self.plateau_len == 0 {
            return Err(LeviError::Precondition(format!(
                "scale window has {} radii but a plateau needs {}",
                self.scales.len(),
                self.plateau_len
            )));
        }
        if self.scales.windows(2).any(|w| w[1] >= w[0]) || self.scales.iter().any(|&r| r <= 0.0) {
            return Err(LeviError::Precondition("PCA radii must be positive and strictly decreasing".into()));
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(LeviError::Precondition(format!("tau must lie in (0, 1), got {}", self.tau)));
        }
        Ok(())
    }
}

/// Point set in `R^m` with a uniform-grid neighbour index.
#[derive(Clone, Debug)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    cell: f64,
    buckets: HashMap<Vec<i64>, Vec<usize>>,
}

impl PointCloud {
    /// `coords` is row-major with `dim` entries per point; `cell` should be at
    /// least the largest query radius.
    pub fn new(dim: usize, coords: Vec<f64>, cell: f64) -> Self {
        assert!(dim > 0 && coords.len() % dim == 0);
        let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (k, p) in coords.chunks(dim).enumerate() {
            buckets.entry(key(p, cell)).or_default().push(k);
        }
        PointCloud { dim, coords, cell, buckets }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, k: usize) -> &[f64] {
        &self.coords[k * self.dim..(k + 1) * self.dim]
    }

    /// Indices and squared distances of points within `radius` of `center`,
    /// in ascending index order.
    pub fn neighbours(&self, center: &[f64], radius: f64) -> Vec<(usize, f64)> {
        assert!(radius <= self.cell * (1.0 + 1e-12), "query radius exceeds the index cell");
        let base = key(center, self.cell);
        let mut out = Vec::new();
        let mut offset = vec![-1i64; self.dim];
        let r2 = radius * radius;
        loop {
            let k: Vec<i64> = base.iter().zip(&offset).map(|(b, o)| b + o).collect();
            if let Some(ids) = self.buckets.get(&k) {
                for &id in ids {
                    let d2: f64 = self.point(id).iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                    if d2 <= r2 {
                        out.push((id, d2));
                    }
                }
            }
            // odometer over {-1, 0, 1}^dim
            let mut pos = 0;
            loop {
                if pos == self.dim {
                    out.sort_by_key(|&(id, _)| id);
                    return out;
                }
                offset[pos] += 1;
                if offset[pos] <= 1 {
                    break;
                }
                offset[pos] = -1;
                pos += 1;
            }
        }
    }
}

fn key(p: &[f64], cell: f64) -> Vec<i64> {
    p.iter().map(|x| (x / cell).floor() as i64).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ScaleStat {
    pub radius: f64,
    pub count: usize,
    /// RMS spread along principal axes, descending.
    pub spreads: Vec<f64>,
    pub dim: usize,
    #[serde(skip)]
    axes: Vec<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct TangentEstimate {
    pub point: usize,
    pub scales: Vec<ScaleStat>,
    /// Dimension of the plateau, if one exists.
    pub plateau_dim: Option<usize>,
    /// Dimension used downstream (plateau, or the largest observed when unresolved).
    pub dim: usize,
    pub real_basis: Vec<Vec<f64>>,
    /// Complexification in `C^m`.
    pub complex_basis: SubspaceBasis,
}

impl TangentEstimate {
    pub fn resolved(&self) -> bool {
        self.plateau_dim.is_some()
    }
}

fn local_pca(cloud: &PointCloud, members: &[usize], radius: f64, tau: f64) -> ScaleStat {
    let m = cloud.dim();
    let count = members.len();
    if count < 2 {
        return ScaleStat { radius, count, spreads: vec![0.0; m], dim: 0, axes: Vec::new() };
    }
    let mut mean = vec![0.0; m];
    for &id in members {
        for (a, x) in mean.iter_mut().zip(cloud.point(id)) {
            *a += x;
        }
    }
    for a in mean.iter_mut() {
        *a /= count as f64;
    }
    let mut cov = vec![0.0; m * m];
    for &id in members {
        let p = cloud.point(id);
        for r in 0..m {
            let dr = p[r] - mean[r];
            for c in r..m {
                cov[r * m + c] += dr * (p[c] - mean[c]);
            }
        }
    }
    for r in 0..m {
        for c in r..m {
            cov[r * m + c] /= count as f64;
            cov[c * m + r] = cov[r * m + c];
        }
    }
    let eig = hermitian_eigen(&HermitianMatrix::from_real_symmetric(m, &cov).expect("covariance is symmetric"));
    let mut spreads = Vec::with_capacity(m);
    let mut axes = Vec::with_capacity(m);
    for (lam, v) in eig.values.iter().zip(&eig.vectors).rev() {
        spreads.push(lam.max(0.0).sqrt());
        // real symmetric input: eigenvectors are real up to a global phase
        let phase = v.iter().max_by(|a, b| a.norm().total_cmp(&b.norm())).map(|z| z.conj() / z.norm());
        let phase = phase.unwrap_or(num::complex::Complex64::new(1.0, 0.0));
        axes.push(v.iter().map(|z| (z * phase).re).collect());
    }
    let dim = spreads.iter().filter(|&&s| s >= tau * radius).count();
    ScaleStat { radius, count, spreads, dim, axes }
}

/// Multi-scale PCA tangent estimate at point `p` of `cloud`.
pub fn zariski_tangent_estimate(cloud: &PointCloud, p: usize, params: &PcaParams) -> Result<TangentEstimate> {
    params.validate()?;
    let center = cloud.point(p).to_vec();
    let nbrs = cloud.neighbours(&center, params.scales[0]);
    if nbrs.len() < params.min_points {
        return Err(LeviError::Precondition(format!(
            "only {} cloud points within the largest radius {}; need {}",
            nbrs.len(),
            params.scales[0],
            params.min_points
        )));
    }
    let stats: Vec<ScaleStat> = params
        .scales
        .iter()
        .map(|&r| {
            let members: Vec<usize> = nbrs.iter().filter(|(_, d2)| *d2 <= r * r).map(|(id, _)| *id).collect();
            local_pca(cloud, &members, r, params.tau)
        })
        .collect();

    // longest run of equal dimensions; ties go to the finer run
    let mut best: Option<(usize, usize)> = None; // (start, len)
    let mut start = 0;
    for k in 1..=stats.len() {
        if k == stats.len() || stats[k].dim != stats[start].dim {
            let len = k - start;
            if len >= params.plateau_len && best.is_none_or(|(_, l)| len >= l) {
                best = Some((start, len));
            }
            start = k;
        }
    }
    let (plateau_dim, chosen) = match best {
        Some((s, len)) => (Some(stats[s].dim), s + len - 1),
        None => {
            let max = stats.iter().map(|s| s.dim).max().unwrap_or(0);
            let idx = stats.iter().rposition(|s| s.dim == max).unwrap_or(0);
            (None, idx)
        }
    };
    let dim = stats[chosen].dim;
    let real_basis: Vec<Vec<f64>> = stats[chosen].axes.iter().take(dim).cloned().collect();
    let complex_basis = if real_basis.is_empty() {
        SubspaceBasis::zero(cloud.dim())
    } else {
        complexify_real_span(&real_basis, 1e-10)
    };
    Ok(TangentEstimate {
        point: p,
        scales: stats,
        plateau_dim,
        dim,
        real_basis,
        complex_basis,
    })
}
