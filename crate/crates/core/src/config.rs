//! JSON run configuration shared by all CLI commands.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::chain::{CHAIN_INTERSECT_TOL, DEFAULT_MAX_ITER};
use crate::error::{LeviError, Result};
use crate::levi::DEFAULT_EPS_REL;
use crate::potential::{DEFAULT_H, DEFAULT_SHARPNESS};
use crate::sets::SetSpec;
use crate::witness::DEFAULT_GRID_H;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Ball,
    Hartogs {
        k: SetSpec,
        #[serde(default = "default_h")]
        h: f64,
        #[serde(default = "default_sharpness")]
        sharpness: f64,
    },
}

fn default_h() -> f64 {
    DEFAULT_H
}

fn default_sharpness() -> f64 {
    DEFAULT_SHARPNESS
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    /// Lattice points per axis over `[-1, 1)`.
    pub n_z: usize,
    pub n_theta: usize,
    /// Extra base points drawn from K.
    #[serde(default)]
    pub k_sites: usize,
    /// Compute Levi data and tangents once per fibre and rotate.
    #[serde(default = "yes")]
    pub use_symmetry: bool,
}

fn yes() -> bool {
    true
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling { n_z: 64, n_theta: 64, k_sites: 0, use_symmetry: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub eps_rel: f64,
    pub intersect_tol: f64,
    pub tau: f64,
    /// PCA radii are `2^-k` for `k` in this inclusive window.
    pub scale_window: [i32; 2],
    /// Width of the band around K excluded from locus statistics; defaults to `h`.
    pub band: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_rel: DEFAULT_EPS_REL,
            intersect_tol: CHAIN_INTERSECT_TOL,
            tau: 0.2,
            scale_window: [2, 5],
            band: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimsTarget {
    Support,
    Core,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimsMethod {
    /// Exact chart counts for Cantor products, point clouds otherwise.
    Auto,
    PointCloud,
    Product,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DimsConfig {
    pub target: DimsTarget,
    pub method: DimsMethod,
    /// Box sizes; chosen automatically when absent.
    pub deltas: Option<Vec<f64>>,
    pub content_threshold: f64,
}

impl Default for DimsConfig {
    fn default() -> Self {
        DimsConfig {
            target: DimsTarget::Core,
            method: DimsMethod::Auto,
            deltas: None,
            content_threshold: crate::dims::DEFAULT_CONTENT_THRESHOLD,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessConfig {
    /// The compact set the witness must cover.
    pub k: SetSpec,
    pub m: f64,
    #[serde(default = "default_grid_h")]
    pub grid_h: f64,
    /// CSV of an external candidate (`x,y,lambda,h11_re,h11_im`); a finite-set
    /// construction is used when absent.
    #[serde(default)]
    pub lambda_csv: Option<PathBuf>,
}

fn default_grid_h() -> f64 {
    DEFAULT_GRID_H
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainSpec,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub dims: DimsConfig,
    #[serde(default)]
    pub witness: Option<WitnessConfig>,
}

fn default_max_iter() -> usize {
    DEFAULT_MAX_ITER
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let cfg = Self::from_json(&std::fs::read_to_string(path)?)?;
        Ok(match cfg.witness {
            // relative candidate files are resolved against the config location
            Some(WitnessConfig { lambda_csv: Some(ref p), .. }) if p.is_relative() => {
                let mut cfg = cfg.clone();
                let base = path.parent().unwrap_or(Path::new("."));
                if let Some(w) = cfg.witness.as_mut() {
                    w.lambda_csv = Some(base.join(p));
                }
                cfg
            }
            _ => cfg,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LeviError::Precondition(msg));
        if let DomainSpec::Hartogs { h, sharpness, .. } = &self.domain {
            if !(*h > 0.0) || (h.log2().round() - h.log2()).abs() > 1e-12 {
                return bad(format!("h must be a power of two, got {h}"));
            }
            if !(*sharpness > 0.0) {
                return bad(format!("sharpness must be positive, got {sharpness}"));
            }
        }
        let s = &self.sampling;
        if !s.n_z.is_power_of_two() || !s.n_theta.is_power_of_two() {
            return bad(format!("n_z and n_theta must be powers of two, got {} and {}", s.n_z, s.n_theta));
        }
        let t = &self.tolerances;
        for (name, v) in [("eps_rel", t.eps_rel), ("intersect_tol", t.intersect_tol), ("tau", t.tau)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if t.band.is_some_and(|b| !(b > 0.0)) {
            return bad("band must be positive".into());
        }
        if t.scale_window[0] > t.scale_window[1] {
            return bad(format!("scale window {:?} is empty", t.scale_window));
        }
        if let Some(w) = &self.witness {
            if !(w.m > 0.0 && w.grid_h > 0.0) {
                return bad("witness M and grid spacing must be positive".into());
            }
        }
        Ok(())
    }

    pub fn band_width(&self) -> f64 {
        match (&self.tolerances.band, &self.domain) {
            (Some(b), _) => *b,
            (None, DomainSpec::Hartogs { h, .. }) => *h,
            (None, DomainSpec::Ball) => 0.0,
        }
    }

    pub fn ball(n_z: usize, n_theta: usize) -> Self {
        Self::with_domain(DomainSpec::Ball, Sampling { n_z, n_theta, k_sites: 0, use_symmetry: true })
    }

    pub fn hartogs(k: SetSpec, sampling: Sampling) -> Self {
        Self::with_domain(
            DomainSpec::Hartogs { k, h: DEFAULT_H, sharpness: DEFAULT_SHARPNESS },
            sampling,
        )
    }

    fn with_domain(domain: DomainSpec, sampling: Sampling) -> Self {
        RunConfig {
            domain,
            sampling,
            tolerances: Tolerances::default(),
            max_iter: DEFAULT_MAX_ITER,
            seed: 0,
            out_dir: None,
            dims: DimsConfig::default(),
            witness: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = RunConfig::from_json(r#"{"domain": {"kind": "ball"}}"#).unwrap();
        assert_eq!(cfg.sampling, Sampling::default());
        assert_eq!(cfg.max_iter, 8);
        assert_eq!(cfg.tolerances.scale_window, [2, 5]);
    }

    #[test]
    fn hartogs_config_parses() {
        let text = r#"{
            "domain": {"kind": "hartogs", "k": {"kind": "circle", "center": [0, 0], "radius": 0.25}},
            "sampling": {"n_z": 32, "n_theta": 16, "k_sites": 64},
            "seed": 7
        }"#;
        let cfg = RunConfig::from_json(text).unwrap();
        assert_eq!(cfg.band_width(), DEFAULT_H);
        assert_eq!(cfg.seed, 7);
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(RunConfig::from_json(r#"{"domain": {"kind": "ball"}, "sampling": {"n_z": 30, "n_theta": 8}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"domain": {"kind": "ball"}, "tolerances": {"tau": -1}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"domain": {"kind": "ball"}, "bogus": 1}"#).is_err());
        let h = r#"{"domain": {"kind": "hartogs", "h": 0.003, "k": {"kind": "finite_set", "points": [[0, 0]]}}}"#;
        assert!(RunConfig::from_json(h).is_err());
    }

    #[test]
    fn round_trip() {
        let cfg = RunConfig::hartogs(SetSpec::fat_cantor_square(0.6, 14), Sampling::default());
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
    }
}
