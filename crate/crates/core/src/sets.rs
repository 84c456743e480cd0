//! Constructive compact subsets of the plane.
//!
//! Every set answers exact distance and membership queries for its
//! finite-depth realization. Cantor sets are generated in exact rational
//! arithmetic and only converted to `f64` at the oracle boundary.

use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LeviError, Result};
use crate::linalg::C64;

/// Default number of Cantor generations.
pub const DEFAULT_DEPTH: usize = 14;
const MAX_DEPTH: usize = 24;

/// Lengths `l_n` of the open middle intervals removed at generation `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalSchedule {
    /// `l_n = base^{-n}`.
    Geometric(u32),
    /// Explicit rationals `[numerator, denominator]`, one per generation;
    /// the last entry is reused if the list is shorter than the depth.
    Explicit(Vec<[i64; 2]>),
}

impl RemovalSchedule {
    fn length(&self, generation: usize) -> Result<BigRational> {
        match self {
            RemovalSchedule::Geometric(base) => {
                if *base < 2 {
                    return Err(LeviError::InvalidSet(format!("geometric base {base} must be at least 2")));
                }
                let denom = num::pow(BigInt::from(*base), generation);
                Ok(BigRational::new(BigInt::one(), denom))
            }
            RemovalSchedule::Explicit(list) => {
                let [n, d] = *list
                    .get(generation - 1)
                    .or(list.last())
                    .ok_or_else(|| LeviError::InvalidSet("empty removal schedule".into()))?;
                if n <= 0 || d <= 0 {
                    return Err(LeviError::InvalidSet(format!("schedule entry {n}/{d} must be positive")));
                }
                Ok(BigRational::new(BigInt::from(n), BigInt::from(d)))
            }
        }
    }

    /// Measure of the limit set when it has a closed form.
    pub fn limit_measure(&self) -> Option<f64> {
        match self {
            // sum_{n>=1} 2^{n-1} b^{-n} = 1 / (b - 2)
            RemovalSchedule::Geometric(b) if *b > 2 => Some(1.0 - 1.0 / (*b as f64 - 2.0)),
            _ => None,
        }
    }
}

/// Depth-truncated Cantor set on `[0, 1]`.
#[derive(Clone, Debug)]
pub struct CantorLine {
    schedule: RemovalSchedule,
    depth: usize,
    starts: Vec<f64>,
    interval_len: f64,
    measure_exact: BigRational,
}

impl CantorLine {
    pub fn new(schedule: RemovalSchedule, depth: usize) -> Result<Self> {
        if depth == 0 || depth > MAX_DEPTH {
            return Err(LeviError::InvalidSet(format!("depth {depth} outside 1..={MAX_DEPTH}")));
        }
        let mut len = BigRational::one();
        let mut starts = vec![BigRational::zero()];
        let mut removed = BigRational::zero();
        let two = BigRational::from_integer(BigInt::from(2));
        for generation in 1..=depth {
            let gap = schedule.length(generation)?;
            if gap >= len {
                return Err(LeviError::InvalidSet(format!(
                    "removal length at generation {generation} exhausts the remaining intervals"
                )));
            }
            let child = (&len - &gap) / &two;
            let offset = &child + &gap;
            let mut next = Vec::with_capacity(starts.len() * 2);
            for s in &starts {
                next.push(s.clone());
                next.push(s + &offset);
            }
            removed += &gap * BigRational::from_integer(BigInt::from(starts.len()));
            starts = next;
            len = child;
        }
        let measure_exact = BigRational::one() - removed;
        Ok(CantorLine {
            schedule,
            depth,
            starts: starts.iter().map(|s| s.to_f64().unwrap_or(f64::NAN)).collect(),
            interval_len: len.to_f64().unwrap_or(f64::NAN),
            measure_exact,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn schedule(&self) -> &RemovalSchedule {
        &self.schedule
    }

    pub fn interval_len(&self) -> f64 {
        self.interval_len
    }

    /// Left endpoints of the surviving intervals, ascending.
    pub fn starts(&self) -> &[f64] {
        &self.starts
    }

    pub fn measure1_exact(&self) -> &BigRational {
        &self.measure_exact
    }

    pub fn measure1(&self) -> f64 {
        self.measure_exact.to_f64().unwrap_or(f64::NAN)
    }

    pub fn distance(&self, x: f64) -> f64 {
        let idx = self.starts.partition_point(|&s| s <= x);
        let mut best = f64::INFINITY;
        if idx > 0 {
            let s = self.starts[idx - 1];
            let e = s + self.interval_len;
            if x <= e {
                return 0.0;
            }
            best = x - e;
        }
        if idx < self.starts.len() {
            best = best.min(self.starts[idx] - x);
        }
        best
    }

    fn sample_coord(&self, rng: &mut ChaCha8Rng) -> f64 {
        let k = rng.gen_range(0..self.starts.len());
        let u: f64 = rng.gen_range(1e-9..1.0 - 1e-9);
        self.starts[k] + u * self.interval_len
    }
}

/// Planar measure result: exact when the structure permits it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Known(f64),
    Unknown,
}

impl Measure {
    pub fn value(self) -> Option<f64> {
        match self {
            Measure::Known(v) => Some(v),
            Measure::Unknown => None,
        }
    }
}

/// Serializable description of a planar compact set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetSpec {
    FiniteSet { points: Vec<[f64; 2]> },
    CantorLine { schedule: RemovalSchedule, depth: usize },
    CantorProduct { x: LineSpec, y: LineSpec },
    Circle { center: [f64; 2], radius: f64 },
    Segment { from: [f64; 2], to: [f64; 2] },
    ClosedDisk { center: [f64; 2], radius: f64 },
    Annulus { center: [f64; 2], r_in: f64, r_out: f64 },
    Union { parts: Vec<SetSpec> },
    /// Image under `z -> scale * z + shift`.
    Rescale { inner: Box<SetSpec>, scale: [f64; 2], shift: [f64; 2] },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineSpec {
    pub schedule: RemovalSchedule,
    #[serde(default = "default_depth")]
    pub depth: usize,
}

fn default_depth() -> usize {
    DEFAULT_DEPTH
}

fn cx(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

impl SetSpec {
    pub fn build(&self) -> Result<PlanarCompactSet> {
        Ok(match self {
            SetSpec::FiniteSet { points } => {
                if points.is_empty() {
                    return Err(LeviError::InvalidSet("finite set needs at least one point".into()));
                }
                PlanarCompactSet::Finite(points.iter().copied().map(cx).collect())
            }
            SetSpec::CantorLine { schedule, depth } => {
                PlanarCompactSet::CantorLine(CantorLine::new(schedule.clone(), *depth)?)
            }
            SetSpec::CantorProduct { x, y } => PlanarCompactSet::CantorProduct(
                CantorLine::new(x.schedule.clone(), x.depth)?,
                CantorLine::new(y.schedule.clone(), y.depth)?,
            ),
            SetSpec::Circle { center, radius } => {
                positive(*radius, "circle radius")?;
                PlanarCompactSet::Circle { center: cx(*center), radius: *radius }
            }
            SetSpec::Segment { from, to } => PlanarCompactSet::Segment { from: cx(*from), to: cx(*to) },
            SetSpec::ClosedDisk { center, radius } => {
                positive(*radius, "disk radius")?;
                PlanarCompactSet::ClosedDisk { center: cx(*center), radius: *radius }
            }
            SetSpec::Annulus { center, r_in, r_out } => {
                positive(*r_in, "inner radius")?;
                if r_out <= r_in {
                    return Err(LeviError::InvalidSet("annulus needs r_in < r_out".into()));
                }
                PlanarCompactSet::Annulus { center: cx(*center), r_in: *r_in, r_out: *r_out }
            }
            SetSpec::Union { parts } => {
                if parts.is_empty() {
                    return Err(LeviError::InvalidSet("empty union".into()));
                }
                PlanarCompactSet::Union(parts.iter().map(|p| p.build()).collect::<Result<_>>()?)
            }
            SetSpec::Rescale { inner, scale, shift } => {
                let scale = cx(*scale);
                if scale.norm() == 0.0 || !scale.norm().is_finite() {
                    return Err(LeviError::InvalidSet("rescale factor must be nonzero".into()));
                }
                PlanarCompactSet::Rescale { inner: Box::new(inner.build()?), scale, shift: cx(*shift) }
            }
        })
    }

    /// Fat Cantor square (`l_n = 4^{-n}`, measure 1/2 per axis) mapped onto
    /// `[-side/2, side/2]^2`.
    pub fn fat_cantor_square(side: f64, depth: usize) -> SetSpec {
        Self::cantor_square(RemovalSchedule::Geometric(4), side, depth)
    }

    /// Middle-thirds Cantor square mapped onto `[-side/2, side/2]^2`.
    pub fn middle_thirds_square(side: f64, depth: usize) -> SetSpec {
        Self::cantor_square(RemovalSchedule::Geometric(3), side, depth)
    }

    pub fn cantor_square(schedule: RemovalSchedule, side: f64, depth: usize) -> SetSpec {
        let line = LineSpec { schedule, depth };
        SetSpec::Rescale {
            inner: Box::new(SetSpec::CantorProduct { x: line.clone(), y: line }),
            scale: [side, 0.0],
            shift: [-side / 2.0, -side / 2.0],
        }
    }
}

fn positive(v: f64, what: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(LeviError::InvalidSet(format!("{what} must be positive, got {v}")))
    }
}

#[derive(Clone, Debug)]
pub enum PlanarCompactSet {
    Finite(Vec<C64>),
    /// Cantor set on the real segment `[0, 1]`.
    CantorLine(CantorLine),
    CantorProduct(CantorLine, CantorLine),
    Circle { center: C64, radius: f64 },
    Segment { from: C64, to: C64 },
    ClosedDisk { center: C64, radius: f64 },
    Annulus { center: C64, r_in: f64, r_out: f64 },
    Union(Vec<PlanarCompactSet>),
    Rescale { inner: Box<PlanarCompactSet>, scale: C64, shift: C64 },
}

impl PlanarCompactSet {
    pub fn fat_cantor_line(schedule: RemovalSchedule, depth: usize) -> Result<Self> {
        Ok(PlanarCompactSet::CantorLine(CantorLine::new(schedule, depth)?))
    }

    /// Euclidean distance to the finite-depth realization.
    pub fn distance(&self, z: C64) -> f64 {
        match self {
            PlanarCompactSet::Finite(pts) => pts.iter().map(|p| (z - p).norm()).fold(f64::INFINITY, f64::min),
            PlanarCompactSet::CantorLine(line) => line.distance(z.re).hypot(z.im),
            PlanarCompactSet::CantorProduct(a, b) => a.distance(z.re).hypot(b.distance(z.im)),
            PlanarCompactSet::Circle { center, radius } => {
                let d = ((z - center).norm() - radius).abs();
                // points produced by `sample` sit on the circle up to rounding
                if d <= 8.0 * f64::EPSILON * (radius + center.norm()) {
                    0.0
                } else {
                    d
                }
            }
            PlanarCompactSet::Segment { from, to } => {
                let dir = to - from;
                let len2 = dir.norm_sqr();
                let t = if len2 == 0.0 {
                    0.0
                } else {
                    (((z - from) * dir.conj()).re / len2).clamp(0.0, 1.0)
                };
                (z - (from + dir * t)).norm()
            }
            PlanarCompactSet::ClosedDisk { center, radius } => ((z - center).norm() - radius).max(0.0),
            PlanarCompactSet::Annulus { center, r_in, r_out } => {
                let r = (z - center).norm();
                if r < *r_in {
                    r_in - r
                } else {
                    (r - r_out).max(0.0)
                }
            }
            PlanarCompactSet::Union(parts) => parts.iter().map(|p| p.distance(z)).fold(f64::INFINITY, f64::min),
            PlanarCompactSet::Rescale { inner, scale, shift } => {
                scale.norm() * inner.distance((z - shift) / scale)
            }
        }
    }

    pub fn contains(&self, z: C64) -> bool {
        self.distance(z) == 0.0
    }

    /// Hausdorff distance bound between the finite-depth realization and the
    /// ideal set.
    pub fn truncation_error(&self) -> f64 {
        match self {
            PlanarCompactSet::CantorLine(line) => line.interval_len,
            PlanarCompactSet::CantorProduct(a, b) => a.interval_len.hypot(b.interval_len),
            PlanarCompactSet::Union(parts) => parts.iter().map(|p| p.truncation_error()).fold(0.0, f64::max),
            PlanarCompactSet::Rescale { inner, scale, .. } => scale.norm() * inner.truncation_error(),
            _ => 0.0,
        }
    }

    /// One-dimensional measure, where meaningful.
    pub fn measure1(&self) -> Measure {
        match self {
            PlanarCompactSet::Finite(_) => Measure::Known(0.0),
            PlanarCompactSet::CantorLine(line) => Measure::Known(line.measure1()),
            PlanarCompactSet::Circle { radius, .. } => Measure::Known(2.0 * std::f64::consts::PI * radius),
            PlanarCompactSet::Segment { from, to } => Measure::Known((to - from).norm()),
            PlanarCompactSet::Rescale { inner, scale, .. } => match inner.measure1() {
                Measure::Known(m) => Measure::Known(m * scale.norm()),
                Measure::Unknown => Measure::Unknown,
            },
            _ => Measure::Unknown,
        }
    }

    /// Two-dimensional Lebesgue measure of the finite-depth realization.
    pub fn measure2(&self) -> Measure {
        use std::f64::consts::PI;
        match self {
            PlanarCompactSet::Finite(_)
            | PlanarCompactSet::CantorLine(_)
            | PlanarCompactSet::Circle { .. }
            | PlanarCompactSet::Segment { .. } => Measure::Known(0.0),
            PlanarCompactSet::CantorProduct(a, b) => Measure::Known(a.measure1() * b.measure1()),
            PlanarCompactSet::ClosedDisk { radius, .. } => Measure::Known(PI * radius * radius),
            PlanarCompactSet::Annulus { r_in, r_out, .. } => Measure::Known(PI * (r_out * r_out - r_in * r_in)),
            PlanarCompactSet::Union(parts) => {
                let mut positive = Vec::new();
                for p in parts {
                    match p.measure2() {
                        Measure::Known(m) if m == 0.0 => {}
                        Measure::Known(m) => positive.push(m),
                        Measure::Unknown => return Measure::Unknown,
                    }
                }
                match positive.len() {
                    0 => Measure::Known(0.0),
                    1 => Measure::Known(positive[0]),
                    _ => Measure::Unknown,
                }
            }
            PlanarCompactSet::Rescale { inner, scale, .. } => match inner.measure2() {
                Measure::Known(m) => Measure::Known(m * scale.norm_sqr()),
                Measure::Unknown => Measure::Unknown,
            },
        }
    }

    /// Largest modulus of a point of the set.
    pub fn bounding_radius(&self) -> f64 {
        match self {
            PlanarCompactSet::Finite(pts) => pts.iter().map(|p| p.norm()).fold(0.0, f64::max),
            PlanarCompactSet::CantorLine(_) => 1.0,
            PlanarCompactSet::CantorProduct(a, b) => {
                let xa = a.starts.last().map_or(0.0, |s| s + a.interval_len);
                let yb = b.starts.last().map_or(0.0, |s| s + b.interval_len);
                xa.hypot(yb)
            }
            PlanarCompactSet::Circle { center, radius }
            | PlanarCompactSet::ClosedDisk { center, radius }
            | PlanarCompactSet::Annulus { center, r_out: radius, .. } => center.norm() + radius,
            PlanarCompactSet::Segment { from, to } => from.norm().max(to.norm()),
            PlanarCompactSet::Union(parts) => parts.iter().map(|p| p.bounding_radius()).fold(0.0, f64::max),
            PlanarCompactSet::Rescale { inner, scale, shift } => match inner.as_ref() {
                // exact corner check for the axis-aligned square hull
                PlanarCompactSet::CantorProduct(a, b) => {
                    let xs = [a.starts[0], a.starts.last().unwrap() + a.interval_len];
                    let ys = [b.starts[0], b.starts.last().unwrap() + b.interval_len];
                    let mut r: f64 = 0.0;
                    for x in xs {
                        for y in ys {
                            r = r.max((scale * C64::new(x, y) + shift).norm());
                        }
                    }
                    r
                }
                other => shift.norm() + scale.norm() * other.bounding_radius(),
            },
        }
    }

    /// Deterministic sample of `n` points of the set.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(n, &mut rng)
    }

    fn sample_with(&self, n: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
        use std::f64::consts::TAU;
        match self {
            PlanarCompactSet::Finite(pts) => (0..n).map(|k| pts[k % pts.len()]).collect(),
            PlanarCompactSet::CantorLine(line) => (0..n).map(|_| C64::new(line.sample_coord(rng), 0.0)).collect(),
            PlanarCompactSet::CantorProduct(a, b) => (0..n)
                .map(|_| {
                    let x = a.sample_coord(rng);
                    C64::new(x, b.sample_coord(rng))
                })
                .collect(),
            PlanarCompactSet::Circle { center, radius } => {
                let offset: f64 = rng.gen_range(0.0..TAU);
                (0..n)
                    .map(|k| center + C64::from_polar(*radius, offset + TAU * k as f64 / n as f64))
                    .collect()
            }
            PlanarCompactSet::Segment { from, to } => (0..n)
                .map(|_| {
                    let t: f64 = rng.gen_range(0.0..=1.0);
                    from + (to - from) * t
                })
                .collect(),
            PlanarCompactSet::ClosedDisk { center, radius } => (0..n)
                .map(|_| {
                    let r = radius * rng.gen_range(0.0f64..1.0).sqrt();
                    center + C64::from_polar(r, rng.gen_range(0.0..TAU))
                })
                .collect(),
            PlanarCompactSet::Annulus { center, r_in, r_out } => (0..n)
                .map(|_| {
                    let u: f64 = rng.gen_range(0.0..1.0);
                    let r = (r_in * r_in + u * (r_out * r_out - r_in * r_in)).sqrt();
                    center + C64::from_polar(r, rng.gen_range(0.0..TAU))
                })
                .collect(),
            PlanarCompactSet::Union(parts) => {
                let m = parts.len();
                let per: Vec<Vec<C64>> = parts
                    .iter()
                    .enumerate()
                    .map(|(k, p)| p.sample_with((n + m - 1 - k) / m, rng))
                    .collect();
                (0..n).map(|i| per[i % m][i / m]).collect()
            }
            PlanarCompactSet::Rescale { inner, scale, shift } => inner
                .sample_with(n, rng)
                .into_iter()
                .map(|z| scale * z + shift)
                .collect(),
        }
    }

    /// Underlying Cantor product and the affine map `z -> scale z + shift`
    /// placing it in the plane, when the set has that form.
    pub fn as_cantor_product(&self) -> Option<(&CantorLine, &CantorLine, C64, C64)> {
        match self {
            PlanarCompactSet::CantorProduct(a, b) => Some((a, b, C64::new(1.0, 0.0), C64::new(0.0, 0.0))),
            PlanarCompactSet::Rescale { inner, scale, shift } => match inner.as_ref() {
                PlanarCompactSet::CantorProduct(a, b) => Some((a, b, *scale, *shift)),
                _ => None,
            },
            _ => None,
        }
    }
}
