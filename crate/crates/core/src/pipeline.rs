//! End-to-end orchestration: sample the boundary, classify, build the chain,
//! and gather the numbers behind each CLI command.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::chain::{compute_core, derive_next, ChainParams, CloudPoint, CoreChain, PartitionLabeling, RotationSymmetry, SupportCloud};
use crate::config::{DimsMethod, DimsTarget, DomainSpec, RunConfig};
use crate::dims::{box_count, box_count_product, cloud_coords, content_flag, corollary_report, dyadic_window, BoxCountReport, ContentFlag, ContentReport, CorollaryReport};
use crate::domain::{complexified_level_tangent, paired_to_split, BoundarySample, Domain, HartogsDomain, SiteOrigin};
use crate::error::{LeviError, Result};
use crate::levi::{levi_form_from_values, Classification};
use crate::linalg::{orthonormalize, principal_angles, SubspaceBasis, C64};
use crate::sets::PlanarCompactSet;
use crate::tangent::{zariski_tangent_estimate, PcaParams, PointCloud};

/// Levi data at one boundary point.
#[derive(Clone, Debug)]
pub struct LeviRecord {
    pub eigenvalues: Vec<f64>,
    pub class: Classification,
    /// Null space in `C^2`.
    pub null: SubspaceBasis,
    pub grad_norm: f64,
}

/// Levi data for every sample, stored per fibre when the rotation symmetry is used.
#[derive(Clone, Debug)]
pub struct Classified {
    n_theta: usize,
    per_site: bool,
    records: Vec<LeviRecord>,
    thetas: Vec<f64>,
}

impl Classified {
    pub fn len(&self) -> usize {
        if self.per_site {
            self.records.len() * self.n_theta
        } else {
            self.records.len()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn record(&self, sample: usize) -> &LeviRecord {
        if self.per_site {
            &self.records[sample / self.n_theta]
        } else {
            &self.records[sample]
        }
    }

    pub fn class(&self, sample: usize) -> Classification {
        self.record(sample).class
    }

    pub fn classes(&self) -> Vec<Classification> {
        (0..self.len()).map(|s| self.class(s)).collect()
    }

    /// Null space at `sample`; the fibre rotation `w -> e^{it} w` carries the
    /// null space at angle 0 to the one at angle `t`.
    pub fn null(&self, sample: usize) -> SubspaceBasis {
        let rec = self.record(sample);
        if !self.per_site {
            return rec.null.clone();
        }
        let e = C64::from_polar(1.0, self.thetas[sample % self.n_theta]);
        rec.null.map(|v| vec![v[0], v[1] * e])
    }

    pub fn weak_count(&self) -> usize {
        (0..self.len()).filter(|&s| self.class(s) == Classification::WeaklyPseudoconvex).count()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LocusStats {
    /// Lattice fibres at angle 0 outside the tolerance band.
    pub checked: usize,
    pub agree: usize,
    pub agreement: f64,
    pub in_band: usize,
    pub k_sites: usize,
    pub k_sites_weak: usize,
}

pub struct CoreRun {
    pub classified: Classified,
    pub chain: CoreChain,
    pub partition: PartitionLabeling,
}

#[derive(Clone, Debug, Serialize)]
pub struct DimsOutcome {
    pub target: DimsTarget,
    pub report: Option<BoxCountReport>,
    pub content_d2: Option<ContentReport>,
    pub content_d3: Option<ContentReport>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubCheck {
    pub name: &'static str,
    pub pass: bool,
    pub details: serde_json::Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExampleVerdict {
    pub pass: bool,
    pub checks: Vec<SubCheck>,
}

pub struct Pipeline {
    pub config: RunConfig,
    pub domain: Domain,
    pub sample: BoundarySample,
}

impl Pipeline {
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let domain = match &config.domain {
            DomainSpec::Ball => Domain::Ball,
            DomainSpec::Hartogs { k, h, sharpness } => Domain::Hartogs(HartogsDomain::build(k.build()?, *h, *sharpness)?),
        };
        let s = &config.sampling;
        let sample = domain.boundary_sample(s.n_z, s.n_theta, s.k_sites, config.seed)?;
        Ok(Pipeline { config, domain, sample })
    }

    fn analyze(&self, site: usize, theta: f64) -> Result<LeviRecord> {
        let st = &self.sample.sites[site];
        let w = st.w(theta);
        let a = levi_form_from_values(&[st.z, w], &st.defining(w))?;
        let eps = self.config.tolerances.eps_rel;
        Ok(LeviRecord {
            class: a.classify(eps)?,
            null: a.null_space(eps),
            grad_norm: a.grad_norm,
            eigenvalues: a.eigenvalues,
        })
    }

    pub fn classify(&self) -> Result<Classified> {
        let nt = self.sample.n_theta();
        let per_site = self.config.sampling.use_symmetry;
        let records = if per_site {
            (0..self.sample.sites.len())
                .into_par_iter()
                .map(|s| self.analyze(s, 0.0))
                .collect::<Result<Vec<_>>>()?
        } else {
            (0..self.sample.len())
                .into_par_iter()
                .map(|k| self.analyze(k / nt, self.sample.thetas[k % nt]))
                .collect::<Result<Vec<_>>>()?
        };
        Ok(Classified { n_theta: nt, per_site, records, thetas: self.sample.thetas.clone() })
    }

    pub fn in_band(&self, site: usize) -> bool {
        let band = self.config.band_width();
        self.sample.sites[site].dist_k.is_some_and(|d| d > 0.0 && d <= band)
    }

    pub fn locus_stats(&self, c: &Classified) -> LocusStats {
        let nt = self.sample.n_theta();
        let mut st = LocusStats { checked: 0, agree: 0, agreement: 1.0, in_band: 0, k_sites: 0, k_sites_weak: 0 };
        for (s, origin) in self.sample.origins.iter().enumerate() {
            let weak = c.class(s * nt) == Classification::WeaklyPseudoconvex;
            match origin {
                SiteOrigin::KSample { .. } => {
                    st.k_sites += 1;
                    st.k_sites_weak += weak as usize;
                }
                SiteOrigin::Lattice { .. } if self.in_band(s) => st.in_band += 1,
                SiteOrigin::Lattice { .. } => {
                    let in_k = self.sample.sites[s].dist_k.unwrap_or(f64::INFINITY) == 0.0;
                    st.checked += 1;
                    st.agree += (weak == in_k) as usize;
                }
            }
        }
        if st.checked > 0 {
            st.agreement = st.agree as f64 / st.checked as f64;
        }
        st
    }

    pub fn chain_params(&self) -> ChainParams {
        let t = &self.config.tolerances;
        let mut pca = PcaParams::dyadic(t.scale_window[0], t.scale_window[1]);
        pca.tau = t.tau;
        ChainParams {
            pca,
            intersect_tol: t.intersect_tol,
            max_iter: self.config.max_iter,
            symmetry: self.config.sampling.use_symmetry.then_some(RotationSymmetry {
                coord: 1,
                steps: self.sample.n_theta(),
            }),
        }
    }

    /// Weakly pseudoconvex samples with their null spaces.
    pub fn stage0(&self, c: &Classified) -> Result<SupportCloud> {
        let nt = self.sample.n_theta();
        let points = (0..self.sample.len())
            .filter(|&k| c.class(k) == Classification::WeaklyPseudoconvex)
            .map(|k| {
                let p = self.sample.point(k);
                let null = c.null(k);
                CloudPoint {
                    sample: k,
                    coords: p.coords().to_vec(),
                    dist: null.clone(),
                    null,
                    orbit: Some((k / nt, k % nt)),
                }
            })
            .collect();
        SupportCloud::new(0, 2, points)
    }

    pub fn run_core(&self) -> Result<CoreRun> {
        let classified = self.classify()?;
        let chain = compute_core(self.stage0(&classified)?, &self.chain_params())?;
        let partition = crate::chain::partition_boundary(&chain, &classified.classes())?;
        Ok(CoreRun { classified, chain, partition })
    }

    /// Mean fibre radius over the fibres meeting K.
    fn mean_k_radius(&self) -> Option<f64> {
        let radii: Vec<f64> = self
            .sample
            .sites
            .iter()
            .filter(|s| s.dist_k == Some(0.0))
            .map(|s| s.radius())
            .collect();
        (!radii.is_empty()).then(|| radii.iter().sum::<f64>() / radii.len() as f64)
    }

    fn cantor_k(&self) -> Option<&PlanarCompactSet> {
        self.domain.hartogs().map(|d| d.k()).filter(|k| k.as_cantor_product().is_some())
    }

    /// Box count of the support over K (or of the core), by the configured method.
    pub fn box_dimension(&self, cloud: &SupportCloud) -> Result<BoxCountReport> {
        let method = match self.config.dims.method {
            DimsMethod::Auto if self.cantor_k().is_some() && !cloud.is_empty() => DimsMethod::Product,
            DimsMethod::Auto => DimsMethod::PointCloud,
            m => m,
        };
        match method {
            DimsMethod::Product => {
                let k = self
                    .cantor_k()
                    .ok_or_else(|| LeviError::Precondition("product box counting needs a Cantor product K".into()))?;
                let r = self
                    .mean_k_radius()
                    .ok_or_else(|| LeviError::Precondition("no sampled fibre lies over K".into()))?;
                let deltas = match &self.config.dims.deltas {
                    Some(d) => d.clone(),
                    None => (6..=12).map(|j| 2f64.powi(-j)).collect(),
                };
                box_count_product(k, Some(r), &deltas)
            }
            _ => {
                let pts = cloud_coords(cloud);
                let deltas = match &self.config.dims.deltas {
                    Some(d) => d.clone(),
                    None => dyadic_window(&pts, 4)?,
                };
                box_count(&pts, 4, &deltas)
            }
        }
    }

    pub fn dims(&self, run: &CoreRun) -> Result<(DimsOutcome, CorollaryReport)> {
        let target = self.config.dims.target;
        let cloud = match target {
            DimsTarget::Support => &run.chain.stages[0],
            DimsTarget::Core => run.chain.core(),
        };
        let thr = self.config.dims.content_threshold;
        let (report, error) = if cloud.is_empty() {
            (None, Some("target support is empty".to_string()))
        } else {
            match self.box_dimension(cloud) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            }
        };
        let outcome = DimsOutcome {
            target,
            content_d2: report.as_ref().map(|r| content_flag(r, 2.0, thr)),
            content_d3: report.as_ref().map(|r| content_flag(r, 3.0, thr)),
            report,
            error,
        };
        let core_report = if target == DimsTarget::Core {
            outcome.report.clone()
        } else if run.chain.core().is_empty() {
            None
        } else {
            self.box_dimension(run.chain.core()).ok()
        };
        let note = self.cantor_k().and_then(|k| k.measure2().value()).filter(|m| *m > 0.0).map(|_| {
            "K is a Cantor product of positive area, the Hartogs example over a fat Cantor set: the domain is known to \
             satisfy Property (P) through a fine-interior argument; this is cited, not computed"
                .to_string()
        });
        let corollary = corollary_report(&run.chain, core_report, note)?;
        Ok((outcome, corollary))
    }

    /// Checks the computable claims about the support over K: its locus, the
    /// explicit tangent frame, the tangent estimate, `N^1 = N` and its size.
    pub fn verify_example(&self) -> Result<ExampleVerdict> {
        let hd = self
            .domain
            .hartogs()
            .ok_or_else(|| LeviError::Precondition("the example needs a Hartogs domain; this domain has no weak points".into()))?;
        let classified = self.classify()?;
        let stage0 = self.stage0(&classified)?;
        if stage0.is_empty() {
            return Err(LeviError::Precondition("no weakly pseudoconvex samples: the support is empty".into()));
        }
        let mut checks = Vec::new();

        let locus = self.locus_stats(&classified);
        checks.push(SubCheck {
            name: "support_locus",
            pass: locus.agreement >= 0.99 && locus.k_sites_weak == locus.k_sites,
            details: serde_json::to_value(&locus)?,
        });

        // explicit frame and PCA estimate on a spread of support points
        let picks: Vec<usize> = {
            let stride = (stage0.len() / 64).max(1);
            (0..stage0.len()).step_by(stride).take(64).collect()
        };
        let mut frame_rank_ok = 0;
        let mut frame_min_cos = 1.0f64;
        for &i in &picks {
            let p = self.sample.point(stage0.points[i].sample);
            let frame = hd.example_tangent_frame(p.z, p.theta)?;
            let split: Vec<Vec<C64>> = frame.iter().map(|v| paired_to_split(v)).collect();
            let span = orthonormalize(4, &split, 1e-8);
            let grad = self.sample.sites[p.site].defining(p.w).grad;
            let level = complexified_level_tangent(&grad);
            if span.dim() == 3 {
                frame_rank_ok += 1;
            }
            frame_min_cos = principal_angles(&span, &level)?.iter().fold(frame_min_cos, |m, c| m.min(*c));
        }
        checks.push(SubCheck {
            name: "tangent_frame",
            pass: frame_rank_ok == picks.len() && frame_min_cos >= 1.0 - 1e-8,
            details: json!({"points": picks.len(), "rank_three": frame_rank_ok, "min_cosine_to_level_tangent": frame_min_cos}),
        });

        let params = self.chain_params();
        let cloud = PointCloud::new(4, cloud_coords(&stage0), params.pca.scales[0]);
        let estimates: Vec<(Option<usize>, f64)> = picks
            .par_iter()
            .map(|&i| {
                let est = zariski_tangent_estimate(&cloud, i, &params.pca)?;
                let p = self.sample.point(stage0.points[i].sample);
                let level = complexified_level_tangent(&self.sample.sites[p.site].defining(p.w).grad);
                let cos = principal_angles(&est.complex_basis, &level)?;
                let min = if est.complex_basis.dim() == 3 { cos.iter().fold(1.0f64, |m, c| m.min(*c)) } else { 0.0 };
                Ok((est.plateau_dim, min))
            })
            .collect::<Result<_>>()?;
        let plateau3 = estimates.iter().filter(|e| e.0 == Some(3)).count();
        let pca_min_cos = estimates.iter().fold(1.0f64, |m, e| m.min(e.1));
        checks.push(SubCheck {
            name: "tangent_estimate",
            pass: plateau3 == picks.len() && pca_min_cos >= 1.0 - 1e-3,
            details: json!({"points": picks.len(), "plateau_three": plateau3, "min_cosine_to_level_tangent": pca_min_cos}),
        });

        let step = derive_next(&stage0, &params)?;
        let same = step.next.len() == stage0.len()
            && step.next.points.iter().zip(&stage0.points).all(|(a, b)| a.sample == b.sample && a.dist.dim() == 1);
        let chain = compute_core(stage0.clone(), &params)?;
        let core_is_support = chain.stabilized
            && chain.core().len() == stage0.len()
            && chain.core().samples().eq(stage0.samples());
        checks.push(SubCheck {
            name: "first_derived_equals_null",
            pass: same && core_is_support,
            details: json!({
                "support_points": stage0.len(),
                "derived_points": step.next.len(),
                "unresolved": step.transition.unresolved,
                "stage_sizes": chain.stage_sizes(),
                "stabilized": chain.stabilized,
                "core_equals_support": core_is_support,
            }),
        });

        let dims = self.box_dimension(&stage0);
        let (pass, details) = match dims {
            Ok(r) => {
                let c3 = content_flag(&r, 3.0, self.config.dims.content_threshold);
                let pass = (2.75..=3.0).contains(&r.dimension) && c3.flag == ContentFlag::PositiveMeasureLikely;
                (pass, json!({"box_dimension": r.dimension, "method": r.method, "content_d3": c3.flag, "report": r}))
            }
            Err(e) => (false, json!({"error": e.to_string()})),
        };
        checks.push(SubCheck { name: "box_dimension_three", pass, details });
        Ok(ExampleVerdict { pass: checks.iter().all(|c| c.pass), checks })
    }
}
