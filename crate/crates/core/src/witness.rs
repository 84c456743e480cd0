//! Property (P) witnesses: functions `0 <= lambda <= 1` near a compact set
//! whose complex Hessian is bounded below by `M`.
//!
//! Verification is on a grid. It checks the bounds and the Hessian at every
//! grid point of the neighbourhood, and says nothing about smoothness in
//! between.

use std::collections::{HashMap, HashSet};
use std::io::Read;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LeviError, Result};
use crate::linalg::{hermitian_eigen, HermitianMatrix, C64};
use crate::sets::PlanarCompactSet;

pub const DEFAULT_GRID_H: f64 = 1e-3;
const BOUND_SLACK: f64 = 1e-12;
const K_SAMPLES: usize = 1000;

type Evaluator = dyn Fn(C64) -> (f64, HermitianMatrix) + Send + Sync;

#[derive(Clone, Debug)]
pub enum Region {
    /// Union of closed balls of a common radius.
    Balls { centers: Vec<C64>, radius: f64 },
    /// Square cells of side `h` centred at the listed nodes.
    Grid { h: f64, nodes: Vec<C64>, keys: HashSet<(i64, i64)> },
}

fn grid_key(z: C64, h: f64) -> (i64, i64) {
    ((z.re / h).round() as i64, (z.im / h).round() as i64)
}

impl Region {
    pub fn grid_nodes(h: f64, nodes: Vec<C64>) -> Region {
        let keys = nodes.iter().map(|z| grid_key(*z, h)).collect();
        Region::Grid { h, nodes, keys }
    }

    fn contains(&self, z: C64) -> bool {
        match self {
            Region::Balls { centers, radius } => centers.iter().any(|c| (z - c).norm() <= *radius),
            Region::Grid { h, keys, .. } => keys.contains(&grid_key(z, *h)),
        }
    }

    /// Grid points of the region in row-major order.
    fn grid(&self, h: f64) -> Vec<C64> {
        match self {
            Region::Grid { nodes, .. } => nodes.clone(),
            Region::Balls { centers, radius } => {
                let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
                for c in centers {
                    x0 = x0.min(c.re - radius);
                    x1 = x1.max(c.re + radius);
                    y0 = y0.min(c.im - radius);
                    y1 = y1.max(c.im + radius);
                }
                let (i0, i1) = ((x0 / h).floor() as i64, (x1 / h).ceil() as i64);
                let (j0, j1) = ((y0 / h).floor() as i64, (y1 / h).ceil() as i64);
                (j0..=j1)
                    .into_par_iter()
                    .flat_map_iter(|j| {
                        (i0..=i1).filter_map(move |i| {
                            let z = C64::new(i as f64 * h, j as f64 * h);
                            self.contains(z).then_some(z)
                        })
                    })
                    .collect()
            }
        }
    }
}

#[derive(Clone)]
pub struct WitnessCandidate {
    pub region: Region,
    pub m: f64,
    eval: Arc<Evaluator>,
}

impl std::fmt::Debug for WitnessCandidate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WitnessCandidate").field("region", &self.region).field("m", &self.m).finish()
    }
}

impl WitnessCandidate {
    pub fn new(region: Region, m: f64, eval: Arc<Evaluator>) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(LeviError::Precondition(format!("M must be positive, got {m}")));
        }
        Ok(WitnessCandidate { region, m, eval })
    }

    /// Same function, checked against another Hessian bound.
    pub fn with_m(&self, m: f64) -> Result<Self> {
        Self::new(self.region.clone(), m, self.eval.clone())
    }

    pub fn eval(&self, z: C64) -> (f64, HermitianMatrix) {
        (self.eval)(z)
    }

    /// Candidate read from CSV rows `x,y,lambda,h11_re,h11_im` on a grid of spacing `h`.
    pub fn from_grid_csv<R: Read>(reader: R, h: f64, m: f64) -> Result<Self> {
        let mut text = String::new();
        let mut reader = reader;
        reader.read_to_string(&mut text)?;
        let mut nodes = Vec::new();
        let mut table: HashMap<(i64, i64), (f64, HermitianMatrix)> = HashMap::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with('x') {
                continue;
            }
            let vals: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| LeviError::Precondition(format!("witness grid line {}: {e}", line_no + 1)))?;
            if vals.len() != 5 {
                return Err(LeviError::Precondition(format!(
                    "witness grid line {} has {} columns, expected 5",
                    line_no + 1,
                    vals.len()
                )));
            }
            let z = C64::new(vals[0], vals[1]);
            let hess = HermitianMatrix::new(1, vec![C64::new(vals[3], vals[4])])?;
            table.insert(grid_key(z, h), (vals[2], hess));
            nodes.push(z);
        }
        if nodes.is_empty() {
            return Err(LeviError::Precondition("witness grid is empty".into()));
        }
        let table = Arc::new(table);
        let eval = move |z: C64| {
            table
                .get(&grid_key(z, h))
                .cloned()
                .unwrap_or((f64::NAN, HermitianMatrix::identity(1).scaled(f64::NAN)))
        };
        Self::new(Region::grid_nodes(h, nodes), m, Arc::new(eval))
    }
}

/// `lambda = M |z - p_i|^2` on the ball of radius `1/sqrt(M)` around each `p_i`.
pub fn finite_witness(points: &[C64], m: f64) -> Result<WitnessCandidate> {
    if points.is_empty() {
        return Err(LeviError::Precondition("finite witness needs at least one point".into()));
    }
    if !(m > 0.0 && m.is_finite()) {
        return Err(LeviError::Precondition(format!("M must be positive, got {m}")));
    }
    let m_min = finite_witness_min_m(points);
    if m_min.is_infinite() {
        return Err(LeviError::Precondition("finite set has repeated points".into()));
    }
    if m < m_min {
        let sep = 2.0 / m_min.sqrt();
        return Err(LeviError::Precondition(format!(
            "separation {sep} is too small for M = {m}: balls of radius 1/sqrt(M) overlap; need M >= {m_min}"
        )));
    }
    let centers = points.to_vec();
    let c2 = centers.clone();
    let eval = move |z: C64| {
        let d2 = c2.iter().map(|c| (z - c).norm_sqr()).fold(f64::INFINITY, f64::min);
        (m * d2, HermitianMatrix::identity(1).scaled(m))
    };
    WitnessCandidate::new(Region::Balls { centers, radius: 1.0 / m.sqrt() }, m, Arc::new(eval))
}

/// The admissibility threshold `(2 / separation)^2`.
pub fn finite_witness_min_m(points: &[C64]) -> f64 {
    let mut sep = f64::INFINITY;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            sep = sep.min((a - b).norm());
        }
    }
    (2.0 / sep).powi(2)
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessFailure {
    pub reason: String,
    pub point: [f64; 2],
    pub lambda: f64,
    pub min_eigenvalue: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessVerdict {
    pub pass: bool,
    pub m: f64,
    pub grid_h: f64,
    pub points_checked: usize,
    pub failure: Option<WitnessFailure>,
    pub note: &'static str,
}

fn check_point(c: &WitnessCandidate, z: C64) -> Option<WitnessFailure> {
    let (lam, hess) = c.eval(z);
    let min = if hess.entries().iter().all(|e| e.re.is_finite() && e.im.is_finite()) {
        hermitian_eigen(&hess).values.first().copied().unwrap_or(f64::NAN)
    } else {
        f64::NAN
    };
    let fail = |reason: &str| {
        Some(WitnessFailure {
            reason: reason.to_string(),
            point: [z.re, z.im],
            lambda: lam,
            min_eigenvalue: min,
        })
    };
    if !lam.is_finite() || !min.is_finite() {
        fail("candidate is undefined at a grid point")
    } else if lam < -BOUND_SLACK || lam > 1.0 + BOUND_SLACK {
        fail("lambda leaves [0, 1]")
    } else if min < c.m * (1.0 - BOUND_SLACK) {
        fail("complex Hessian has an eigenvalue below M")
    } else {
        None
    }
}

/// Checks `0 <= lambda <= 1` and `Hess(lambda) >= M` at every grid point of
/// the neighbourhood. `K` must lie in the neighbourhood.
pub fn witness_verify(c: &WitnessCandidate, k: &PlanarCompactSet, h: f64) -> Result<WitnessVerdict> {
    if !(h > 0.0) {
        return Err(LeviError::Precondition(format!("grid spacing must be positive, got {h}")));
    }
    if let Some(z) = k.sample(K_SAMPLES, 0).into_iter().find(|z| !c.region.contains(*z)) {
        return Err(LeviError::Precondition(format!("K is not contained in the witness neighbourhood: {z} lies outside")));
    }
    let grid_h = match &c.region {
        Region::Grid { h, .. } => *h,
        Region::Balls { .. } => h,
    };
    let grid = c.region.grid(grid_h);
    // first failure in grid order
    let failure = grid
        .par_iter()
        .map(|&z| check_point(c, z))
        .find_first(Option::is_some)
        .flatten();
    Ok(WitnessVerdict {
        pass: failure.is_none(),
        m: c.m,
        grid_h,
        points_checked: grid.len(),
        failure,
        note: "grid evidence only: bounds and complex Hessians are checked at grid points; smoothness of lambda is not verified",
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn finite(pts: &[C64]) -> PlanarCompactSet {
        PlanarCompactSet::Finite(pts.to_vec())
    }

    #[test]
    fn zero_function_fails_hessian_bound() {
        let zero = WitnessCandidate::new(
            Region::Balls { centers: vec![C64::new(0.0, 0.0)], radius: 0.5 },
            1.0,
            Arc::new(|_| (0.0, HermitianMatrix::identity(1).scaled(0.0))),
        )
        .unwrap();
        let v = witness_verify(&zero, &finite(&[C64::new(0.0, 0.0)]), 1e-2).unwrap();
        assert!(!v.pass);
        assert!(v.failure.unwrap().reason.contains("Hessian"));
    }

    #[test]
    fn squared_modulus_on_disk_passes() {
        let c = WitnessCandidate::new(
            Region::Balls { centers: vec![C64::new(0.0, 0.0)], radius: 1.0 },
            1.0,
            Arc::new(|z: C64| (z.norm_sqr(), HermitianMatrix::identity(1))),
        )
        .unwrap();
        assert!(witness_verify(&c, &finite(&[C64::new(0.1, 0.0)]), 1e-2).unwrap().pass);
    }

    #[test]
    fn separation_threshold() {
        let k = [C64::new(0.0, 0.0), C64::new(0.25, 0.0)];
        let err = finite_witness(&k, 50.0).unwrap_err().to_string();
        assert!(err.contains("M >= 64"), "{err}");
        assert!((finite_witness_min_m(&k) - 64.0).abs() < 1e-12);
        let w = finite_witness(&k, 100.0).unwrap();
        let v = witness_verify(&w, &finite(&k), DEFAULT_GRID_H).unwrap();
        assert!(v.pass && v.points_checked > 1000, "{v:?}");
    }

    #[test]
    fn k_outside_neighbourhood_is_a_precondition_failure() {
        let w = finite_witness(&[C64::new(0.0, 0.0)], 100.0).unwrap();
        assert!(matches!(
            witness_verify(&w, &finite(&[C64::new(0.5, 0.0)]), 1e-2),
            Err(LeviError::Precondition(_))
        ));
    }

    #[test]
    fn single_bad_grid_point_is_reported() {
        let c = WitnessCandidate::new(
            Region::Balls { centers: vec![C64::new(0.0, 0.0)], radius: 0.1 },
            1.0,
            Arc::new(|z: C64| {
                let lam = if z == C64::new(0.05, 0.0) { 1.5 } else { 0.5 };
                (lam, HermitianMatrix::identity(1).scaled(2.0))
            }),
        )
        .unwrap();
        let v = witness_verify(&c, &finite(&[C64::new(0.0, 0.0)]), 0.01).unwrap();
        let f = v.failure.unwrap();
        assert!((f.point[0] - 0.05).abs() < 1e-12 && f.point[1] == 0.0);
        assert!(f.reason.contains("[0, 1]"));
    }

    #[test]
    fn csv_candidate_round_trip() {
        let h = 0.01;
        let mut csv = String::from("x,y,lambda,h11_re,h11_im\n");
        for j in -10..=10 {
            for i in -10..=10 {
                let z = C64::new(i as f64 * h, j as f64 * h);
                csv.push_str(&format!("{},{},{},{},0\n", z.re, z.im, 50.0 * z.norm_sqr(), 50.0));
            }
        }
        let c = WitnessCandidate::from_grid_csv(csv.as_bytes(), h, 50.0).unwrap();
        let v = witness_verify(&c, &finite(&[C64::new(0.0, 0.0)]), h).unwrap();
        assert!(v.pass && v.points_checked == 441);
        let strict = c.with_m(60.0).unwrap();
        assert!(!witness_verify(&strict, &finite(&[C64::new(0.0, 0.0)]), h).unwrap().pass);
        let bad = "x,y,lambda,h11_re,h11_im\n0,0,0,1,0.5\n";
        assert!(WitnessCandidate::from_grid_csv(bad.as_bytes(), h, 1.0).is_err());
    }
}
