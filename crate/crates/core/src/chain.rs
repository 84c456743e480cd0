//! Derived chain of Levi-null distributions and the resulting core.
//!
//! Stage 0 is the set of weakly pseudoconvex samples with their Levi null
//! spaces. Each later stage keeps the points where the complexified tangent
//! estimate of the previous stage's support still meets the original null
//! space, and records that intersection as the new distribution.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LeviError, Result};
use crate::levi::Classification;
use crate::linalg::{embed_holomorphic, orthonormalize, principal_angles, subspace_intersect, SubspaceBasis, C64};
use crate::tangent::{zariski_tangent_estimate, PcaParams, PointCloud, TangentEstimate};

/// Intersection tolerance used with sampled tangent estimates.
pub const CHAIN_INTERSECT_TOL: f64 = 1e-3;
pub const DEFAULT_MAX_ITER: usize = 8;
/// Fraction of unresolved tangent estimates above which a stage is flagged.
pub const LOW_CONFIDENCE_FRACTION: f64 = 0.05;
/// Cosine deficit allowed between the intersections with N and with the current stage.
pub const FORMS_AGREE_TOL: f64 = 1e-8;

/// Rotation `w_coord -> e^{i alpha} w_coord` acting on orbits of `steps` points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotationSymmetry {
    pub coord: usize,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    pub pca: PcaParams,
    pub intersect_tol: f64,
    pub max_iter: usize,
    pub symmetry: Option<RotationSymmetry>,
}

impl Default for ChainParams {
    fn default() -> Self {
        ChainParams {
            pca: PcaParams::default(),
            intersect_tol: CHAIN_INTERSECT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            symmetry: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CloudPoint {
    pub sample: usize,
    /// Real coordinates `(x_1, y_1, ..., x_n, y_n)`.
    pub coords: Vec<f64>,
    /// Levi null space at the point, in `C^n`.
    pub null: SubspaceBasis,
    /// Current distribution, a subspace of `null`.
    pub dist: SubspaceBasis,
    /// `(orbit id, step)` under the rotation symmetry.
    pub orbit: Option<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct SupportCloud {
    pub stage: usize,
    pub n: usize,
    /// Sorted by sample index.
    pub points: Vec<CloudPoint>,
}

impl SupportCloud {
    pub fn new(stage: usize, n: usize, mut points: Vec<CloudPoint>) -> Result<Self> {
        points.sort_by_key(|p| p.sample);
        for w in points.windows(2) {
            if w[0].sample == w[1].sample {
                return Err(LeviError::InvariantBreach(format!("sample {} appears twice in a stage", w[0].sample)));
            }
        }
        for p in &points {
            if p.coords.len() != 2 * n || p.null.ambient_dim() != n || p.dist.ambient_dim() != n {
                return Err(LeviError::DimensionMismatch(format!("cloud point {} does not live in C^{n}", p.sample)));
            }
            if p.dist.is_zero() {
                return Err(LeviError::InvariantBreach(format!("cloud point {} carries a zero distribution", p.sample)));
            }
        }
        Ok(SupportCloud { stage, n, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn samples(&self) -> impl Iterator<Item = usize> + '_ {
        self.points.iter().map(|p| p.sample)
    }

    pub fn contains(&self, sample: usize) -> bool {
        self.find(sample).is_some()
    }

    pub fn find(&self, sample: usize) -> Option<&CloudPoint> {
        self.points.binary_search_by_key(&sample, |p| p.sample).ok().map(|k| &self.points[k])
    }

    fn same_as(&self, other: &SupportCloud) -> bool {
        self.len() == other.len()
            && self.points.iter().zip(&other.points).all(|(a, b)| a.sample == b.sample && a.dist.dim() == b.dist.dim())
    }
}

/// What happened to one point while deriving the next stage.
#[derive(Clone, Debug, Serialize)]
pub struct PointRecord {
    pub sample: usize,
    pub tangent_dim: usize,
    pub resolved: bool,
    /// Principal cosines between the tangent estimate and the embedded null space.
    pub cosines: Vec<f64>,
    pub next_dim: usize,
    /// Dimension obtained by intersecting with the current distribution instead.
    pub alt_dim: usize,
    /// Smallest principal cosine between the two intersections (1 when both vanish).
    pub forms_cosine: f64,
    pub forms_agree: bool,
}

impl PointRecord {
    pub fn max_cosine(&self) -> f64 {
        self.cosines.first().copied().unwrap_or(0.0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Transition {
    pub from_stage: usize,
    pub records: Vec<PointRecord>,
    pub unresolved: usize,
    pub low_confidence: bool,
}

#[derive(Clone, Debug)]
pub struct CoreChain {
    pub stages: Vec<SupportCloud>,
    pub transitions: Vec<Transition>,
    pub stabilized: bool,
    pub params: ChainParams,
}

impl CoreChain {
    pub fn core(&self) -> &SupportCloud {
        self.stages.last().expect("a chain always has stage 0")
    }

    pub fn stage_sizes(&self) -> Vec<usize> {
        self.stages.iter().map(SupportCloud::len).collect()
    }

    /// Stage at which `sample` left the chain, with the record of that step.
    pub fn drop_record(&self, sample: usize) -> Option<(usize, &PointRecord)> {
        for (t, tr) in self.transitions.iter().enumerate() {
            if self.stages[t].contains(sample) && !self.stages[t + 1].contains(sample) {
                let rec = tr.records.iter().find(|r| r.sample == sample)?;
                return Some((t, rec));
            }
        }
        None
    }
}

pub struct Derivation {
    pub next: SupportCloud,
    pub transition: Transition,
}

fn rotate_estimate(est: &TangentEstimate, sym: RotationSymmetry, n: usize, alpha: f64) -> (Vec<Vec<f64>>, SubspaceBasis) {
    let (c, s) = (alpha.cos(), alpha.sin());
    let j = sym.coord;
    let real = est
        .real_basis
        .iter()
        .map(|v| {
            let mut r = v.clone();
            r[2 * j] = c * v[2 * j] - s * v[2 * j + 1];
            r[2 * j + 1] = s * v[2 * j] + c * v[2 * j + 1];
            r
        })
        .collect();
    let e = C64::from_polar(1.0, alpha);
    let complex = est.complex_basis.map(|v| {
        let mut r = v.to_vec();
        r[j] *= e;
        r[n + j] *= e.conj();
        r
    });
    (real, complex)
}

/// Intersection of a tangent estimate with a subspace of `C^n`, returned in `C^n`.
fn meet(tangent: &SubspaceBasis, sub: &SubspaceBasis, n: usize, tol: f64) -> Result<(Vec<f64>, SubspaceBasis)> {
    let embedded = orthonormalize(2 * n, &sub.vectors().iter().map(|v| embed_holomorphic(v)).collect::<Vec<_>>(), 1e-12);
    let cosines = principal_angles(tangent, &embedded)?;
    let inter = subspace_intersect(tangent, &embedded, tol)?;
    // snap back onto the holomorphic side exactly
    let back: Vec<Vec<C64>> = inter
        .vectors()
        .iter()
        .map(|v| embedded.project(v)[..n].to_vec())
        .collect();
    Ok((cosines, orthonormalize(n, &back, 1e-8)))
}

/// One step of the chain.
pub fn derive_next(cloud: &SupportCloud, params: &ChainParams) -> Result<Derivation> {
    params.pca.validate()?;
    let n = cloud.n;
    let mut coords = Vec::with_capacity(cloud.len() * 2 * n);
    for p in &cloud.points {
        coords.extend_from_slice(&p.coords);
    }
    let pc = PointCloud::new(2 * n, coords, params.pca.scales[0]);

    // representative of each point: itself, or the first member of a complete orbit
    let mut rep: Vec<(usize, f64)> = (0..cloud.len()).map(|k| (k, 0.0)).collect();
    if let Some(sym) = params.symmetry {
        let mut orbits: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for (k, p) in cloud.points.iter().enumerate() {
            if let Some((o, step)) = p.orbit {
                orbits.entry(o).or_default().push((k, step));
            }
        }
        for members in orbits.values() {
            let mut steps: Vec<usize> = members.iter().map(|m| m.1).collect();
            steps.sort_unstable();
            steps.dedup();
            if steps.len() != sym.steps || members.len() != sym.steps {
                continue;
            }
            let &(k0, s0) = members.iter().min_by_key(|m| m.1).expect("non-empty orbit");
            for &(k, s) in members {
                let alpha = std::f64::consts::TAU * (s as f64 - s0 as f64) / sym.steps as f64;
                rep[k] = (k0, alpha);
            }
        }
    }
    let mut reps: Vec<usize> = rep.iter().map(|r| r.0).collect();
    reps.sort_unstable();
    reps.dedup();
    let estimates: Vec<Option<TangentEstimate>> = reps
        .par_iter()
        .map(|&k| match zariski_tangent_estimate(&pc, k, &params.pca) {
            Ok(e) => Ok(Some(e)),
            Err(LeviError::Precondition(_)) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;

    let outcomes: Vec<(PointRecord, Option<CloudPoint>)> = cloud
        .points
        .par_iter()
        .enumerate()
        .map(|(k, p)| {
            let (r, alpha) = rep[k];
            let est = &estimates[reps.binary_search(&r).expect("representative was estimated")];
            let (tangent, tangent_dim, resolved) = match est {
                None => (SubspaceBasis::zero(2 * n), 0, false),
                Some(e) if r == k => (e.complex_basis.clone(), e.dim, e.resolved()),
                Some(e) => {
                    let sym = params.symmetry.expect("rotated representatives need a symmetry");
                    (rotate_estimate(e, sym, n, alpha).1, e.dim, e.resolved())
                }
            };
            let (cosines, next) = meet(&tangent, &p.null, n, params.intersect_tol)?;
            let (_, alt) = meet(&tangent, &p.dist, n, params.intersect_tol)?;
            let forms_cosine = if next.dim() != alt.dim() {
                0.0
            } else {
                principal_angles(&next, &alt)?.into_iter().fold(1.0, f64::min)
            };
            let forms_agree = forms_cosine >= 1.0 - FORMS_AGREE_TOL;
            let record = PointRecord {
                sample: p.sample,
                tangent_dim,
                resolved,
                cosines,
                next_dim: next.dim(),
                alt_dim: alt.dim(),
                forms_cosine,
                forms_agree,
            };
            let kept = (!next.is_zero()).then(|| CloudPoint {
                sample: p.sample,
                coords: p.coords.clone(),
                null: p.null.clone(),
                dist: next,
                orbit: p.orbit,
            });
            Ok((record, kept))
        })
        .collect::<Result<_>>()?;

    let unresolved = outcomes.iter().filter(|(r, _)| !r.resolved).count();
    let low_confidence = cloud.len() > 0 && unresolved as f64 > LOW_CONFIDENCE_FRACTION * cloud.len() as f64;
    let (records, kept): (Vec<_>, Vec<_>) = outcomes.into_iter().unzip();
    let next = SupportCloud::new(cloud.stage + 1, n, kept.into_iter().flatten().collect())?;
    Ok(Derivation {
        next,
        transition: Transition {
            from_stage: cloud.stage,
            records,
            unresolved,
            low_confidence,
        },
    })
}

/// Iterates `derive_next` until the support is empty or stops changing.
pub fn compute_core(stage0: SupportCloud, params: &ChainParams) -> Result<CoreChain> {
    if stage0.stage != 0 {
        return Err(LeviError::Precondition("the chain must start from stage 0".into()));
    }
    let mut chain = CoreChain {
        stages: vec![stage0],
        transitions: Vec::new(),
        stabilized: false,
        params: params.clone(),
    };
    loop {
        let cur = chain.core();
        if cur.is_empty() {
            chain.stabilized = true;
            return Ok(chain);
        }
        if chain.transitions.len() >= params.max_iter {
            return Err(LeviError::NotStabilized {
                max_iter: params.max_iter,
                chain: Box::new(chain),
            });
        }
        let d = derive_next(cur, params)?;
        let same = d.next.same_as(cur);
        chain.transitions.push(d.transition);
        chain.stages.push(d.next);
        if same {
            chain.stabilized = true;
            return Ok(chain);
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DropCertificate {
    pub sample: usize,
    pub stage: usize,
    pub cosines: Vec<f64>,
    pub max_cosine: f64,
    pub tolerance: f64,
    pub certified: bool,
}

/// Principal-angle evidence that `sample` left the chain because the
/// intersection at its drop stage is the zero subspace.
pub fn certify_drop(chain: &CoreChain, sample: usize) -> Result<DropCertificate> {
    if chain.core().contains(sample) {
        return Err(LeviError::Precondition(format!("sample {sample} belongs to the core")));
    }
    let (stage, rec) = chain
        .drop_record(sample)
        .ok_or_else(|| LeviError::Precondition(format!("sample {sample} is not in the weakly pseudoconvex support")))?;
    let tol = chain.params.intersect_tol;
    Ok(DropCertificate {
        sample,
        stage,
        cosines: rec.cosines.clone(),
        max_cosine: rec.max_cosine(),
        tolerance: tol,
        certified: rec.next_dim == 0 && rec.max_cosine() < 1.0 - tol,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionLabel {
    /// Strongly pseudoconvex.
    Strong,
    /// Left the chain while deriving stage `stage + 1`.
    Dropped { stage: usize },
    Core,
}

impl PartitionLabel {
    pub fn name(self) -> String {
        match self {
            PartitionLabel::Strong => "K_-1".to_string(),
            PartitionLabel::Dropped { stage } => format!("K_{stage}"),
            PartitionLabel::Core => "core".to_string(),
        }
    }
}

impl Serialize for PartitionLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionLabeling {
    pub labels: Vec<PartitionLabel>,
    pub strong: usize,
    /// Number of samples dropped at each stage.
    pub dropped: Vec<usize>,
    pub core: usize,
}

/// Labels every boundary sample exactly once.
pub fn partition_boundary(chain: &CoreChain, classes: &[Classification]) -> Result<PartitionLabeling> {
    if !chain.stabilized {
        return Err(LeviError::Precondition("the chain has not stabilized".into()));
    }
    let stage0 = &chain.stages[0];
    let mut labels = Vec::with_capacity(classes.len());
    let mut dropped = vec![0; chain.transitions.len()];
    let (mut strong, mut core) = (0, 0);
    for (s, c) in classes.iter().enumerate() {
        let weak = *c == Classification::WeaklyPseudoconvex;
        if weak != stage0.contains(s) {
            return Err(LeviError::InvariantBreach(format!(
                "sample {s} is {} but {} stage 0",
                c.as_str(),
                if weak { "missing from" } else { "present in" }
            )));
        }
        let label = if !weak {
            strong += 1;
            PartitionLabel::Strong
        } else if chain.core().contains(s) {
            core += 1;
            PartitionLabel::Core
        } else {
            let (stage, _) = chain
                .drop_record(s)
                .ok_or_else(|| LeviError::InvariantBreach(format!("sample {s} left the chain without a record")))?;
            dropped[stage] += 1;
            PartitionLabel::Dropped { stage }
        };
        labels.push(label);
    }
    if stage0.points.last().is_some_and(|p| p.sample >= classes.len()) {
        return Err(LeviError::InvariantBreach("stage 0 refers to samples outside the boundary sample".into()));
    }
    Ok(PartitionLabeling { labels, strong, dropped, core })
}
