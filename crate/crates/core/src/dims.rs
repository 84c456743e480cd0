//! Box-counting dimension and content trends for sampled supports.
//!
//! Every verdict here is a finite-scale heuristic: no number of boxes proves
//! that a Hausdorff measure vanishes. Reports carry `heuristic: true`.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::chain::CoreChain;
use crate::error::{LeviError, Result};
use crate::sets::{CantorLine, PlanarCompactSet};
use crate::tangent::PointCloud;

pub const MIN_POINTS: usize = 1000;
pub const MIN_SCALES: usize = 4;
pub const DEFAULT_CONTENT_THRESHOLD: f64 = 0.25;

#[derive(Clone, Debug, Serialize)]
pub struct BoxCountReport {
    pub method: &'static str,
    /// Decreasing.
    pub deltas: Vec<f64>,
    pub counts: Vec<u64>,
    /// Least-squares slope of `log N` against `-log delta`.
    pub dimension: f64,
    pub intercept: f64,
    /// RMS residual of the fit in `log N`.
    pub residual: f64,
    pub heuristic: bool,
}

impl BoxCountReport {
    fn fit(method: &'static str, deltas: Vec<f64>, counts: Vec<u64>) -> Result<Self> {
        if deltas.len() < MIN_SCALES {
            return Err(LeviError::Precondition(format!(
                "box counting needs at least {MIN_SCALES} scales, got {}",
                deltas.len()
            )));
        }
        if counts.iter().any(|&c| c == 0) {
            return Err(LeviError::Precondition("empty set has no box dimension".into()));
        }
        let xs: Vec<f64> = deltas.iter().map(|d| -d.ln()).collect();
        let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let residual = (xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum::<f64>() / n).sqrt();
        Ok(BoxCountReport {
            method,
            deltas,
            counts,
            dimension: slope,
            intercept,
            residual,
            heuristic: true,
        })
    }

    /// `(delta, N(delta))` pairs for plotting.
    pub fn log_log_rows(&self) -> impl Iterator<Item = [f64; 4]> + '_ {
        self.deltas
            .iter()
            .zip(&self.counts)
            .map(|(&d, &c)| [d, c as f64, -d.ln(), (c as f64).ln()])
    }
}

fn check_deltas(deltas: &[f64]) -> Result<Vec<f64>> {
    let mut d = deltas.to_vec();
    if d.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(LeviError::Precondition("box sizes must be positive".into()));
    }
    d.sort_by(|a, b| b.total_cmp(a));
    d.dedup();
    if d.len() < MIN_SCALES {
        return Err(LeviError::Precondition(format!(
            "box counting needs at least {MIN_SCALES} distinct scales, got {}",
            d.len()
        )));
    }
    Ok(d)
}

/// Diameter of the bounding box and median nearest-neighbour distance.
pub fn cloud_extent(points: &[f64], m: usize) -> (f64, f64) {
    let n = points.len() / m;
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for p in points.chunks(m) {
        for k in 0..m {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let diam = lo.iter().zip(&hi).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt();
    if n < 2 || diam == 0.0 {
        return (diam, 0.0);
    }
    // a cell a few times the mean spacing of a cloud filling the box
    let cell = 4.0 * diam / (n as f64).powf(1.0 / m as f64);
    let index = PointCloud::new(m, points.to_vec(), cell);
    let stride = (n / 2000).max(1);
    let mut nn: Vec<f64> = (0..n)
        .step_by(stride)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&k| {
            index
                .neighbours(index.point(k), cell)
                .into_iter()
                .filter(|&(j, _)| j != k)
                .map(|(_, d2)| d2.sqrt())
                .fold(cell, f64::min)
        })
        .collect();
    nn.sort_by(f64::total_cmp);
    (diam, nn[nn.len() / 2])
}

/// Dyadic box sizes inside `[4 * spacing, diameter / 4]`.
pub fn dyadic_window(points: &[f64], m: usize) -> Result<Vec<f64>> {
    let (diam, spacing) = cloud_extent(points, m);
    let lo = (4.0 * spacing).max(f64::MIN_POSITIVE);
    let hi = diam / 4.0;
    let deltas: Vec<f64> = (0..60).map(|k| 2f64.powi(-k)).filter(|&d| d >= lo && d <= hi).collect();
    if deltas.len() < MIN_SCALES {
        return Err(LeviError::Precondition(format!(
            "dyadic window [{lo:e}, {hi:e}] holds fewer than {MIN_SCALES} scales"
        )));
    }
    Ok(deltas)
}

const GRID_OFFSETS: usize = 8;

/// Fractional shift of grid `j` along axis `i`; grid 0 is unshifted.
fn grid_offset(j: usize, i: usize) -> f64 {
    const STEPS: [f64; 6] = [0.618_033_988_749_895, 0.414_213_562_373_095, 0.732_050_807_568_877, 0.236_067_977_499_79, 0.645_751_311_064_591, 0.316_624_790_355_4];
    (j as f64 * STEPS[i % STEPS.len()]).fract()
}

/// Occupied axis-aligned boxes of a point cloud (`m` coordinates per point),
/// minimized over a few shifted grids to damp alignment effects.
pub fn box_count(points: &[f64], m: usize, deltas: &[f64]) -> Result<BoxCountReport> {
    if m == 0 || points.len() % m != 0 {
        return Err(LeviError::DimensionMismatch(format!("{} coordinates do not split into points of R^{m}", points.len())));
    }
    let n = points.len() / m;
    if n < MIN_POINTS {
        return Err(LeviError::Precondition(format!("box counting needs at least {MIN_POINTS} points, got {n}")));
    }
    let deltas = check_deltas(deltas)?;
    let (diam, spacing) = cloud_extent(points, m);
    let slack = 1e-12;
    if deltas[0] > diam / 4.0 * (1.0 + slack) || *deltas.last().unwrap() < 4.0 * spacing * (1.0 - slack) {
        return Err(LeviError::Precondition(format!(
            "box sizes must lie in [{:e}, {:e}] (4 x spacing, diameter / 4)",
            4.0 * spacing,
            diam / 4.0
        )));
    }
    let counts = deltas
        .par_iter()
        .map(|&d| {
            (0..GRID_OFFSETS)
                .map(|j| {
                    let shift: Vec<f64> = (0..m).map(|i| grid_offset(j, i) * d).collect();
                    let boxes: HashSet<Vec<i64>> = points
                        .chunks(m)
                        .map(|p| p.iter().zip(&shift).map(|(x, s)| ((x + s) / d).floor() as i64).collect())
                        .collect();
                    boxes.len() as u64
                })
                .min()
                .expect("at least one grid offset")
        })
        .collect();
    BoxCountReport::fit("point_cloud", deltas, counts)
}

/// Number of grid cells of width `d` on the line meeting the Cantor set `a + s * C`.
fn line_cells(line: &CantorLine, s: f64, a: f64, d: f64) -> u64 {
    let len = line.interval_len() * s;
    let mut count = 0u64;
    let mut last: Option<i64> = None;
    for &x in line.starts() {
        let lo = ((a + s * x) / d).floor() as i64;
        let hi = ((a + s * x + len) / d).floor() as i64;
        let from = match last {
            Some(l) if l >= lo => l + 1,
            _ => lo,
        };
        if hi >= from {
            count += (hi - from + 1) as u64;
            last = Some(hi);
        }
    }
    count
}

/// Box count of a Cantor product `K`, or of `K x circle` when a fibre radius
/// is given, from exact interval counts in the chart `(x, y, arc length)`.
/// The chart is bi-Lipschitz, so the dimension agrees with the embedded set.
pub fn box_count_product(k: &PlanarCompactSet, fibre_radius: Option<f64>, deltas: &[f64]) -> Result<BoxCountReport> {
    let (lx, ly, scale, shift) = k
        .as_cantor_product()
        .ok_or_else(|| LeviError::Precondition("product box counting needs a Cantor product".into()))?;
    if scale.im != 0.0 || scale.re <= 0.0 {
        return Err(LeviError::Precondition("product box counting needs an axis-aligned positive scale".into()));
    }
    if fibre_radius.is_some_and(|r| !(r > 0.0)) {
        return Err(LeviError::Precondition("fibre radius must be positive".into()));
    }
    let deltas = check_deltas(deltas)?;
    let s = scale.re;
    let finest = lx.interval_len().max(ly.interval_len()) * s;
    if *deltas.last().unwrap() < 4.0 * finest {
        return Err(LeviError::Precondition(format!(
            "box sizes below {:e} resolve the construction depth, not the set",
            4.0 * finest
        )));
    }
    let counts = deltas
        .iter()
        .map(|&d| {
            let fibre = fibre_radius.map_or(1, |r| (std::f64::consts::TAU * r / d).ceil() as u64);
            line_cells(lx, s, shift.re, d) * line_cells(ly, s, shift.im, d) * fibre
        })
        .collect();
    BoxCountReport::fit("cantor_product_chart", deltas, counts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ContentFlag {
    MeasureZeroLikely,
    PositiveMeasureLikely,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContentReport {
    pub d: f64,
    /// `N(delta) delta^d` per scale, coarse to fine.
    pub content: Vec<f64>,
    /// Fitted exponent of the content against `1 / delta`.
    pub trend: f64,
    pub flag: ContentFlag,
    pub heuristic: bool,
}

/// Trend of `N(delta) delta^d` as `delta` shrinks: decaying content suggests
/// zero `d`-measure, bounded or growing content suggests positive measure.
pub fn content_flag(report: &BoxCountReport, d: f64, threshold: f64) -> ContentReport {
    let content: Vec<f64> = report
        .deltas
        .iter()
        .zip(&report.counts)
        .map(|(&dl, &c)| c as f64 * dl.powf(d))
        .collect();
    let trend = report.dimension - d;
    let decreasing = content.windows(2).all(|w| w[1] <= w[0]);
    let flag = if trend <= -threshold && decreasing {
        ContentFlag::MeasureZeroLikely
    } else if trend > -threshold {
        ContentFlag::PositiveMeasureLikely
    } else {
        ContentFlag::Inconclusive
    };
    ContentReport { d, content, trend, flag, heuristic: true }
}

#[derive(Clone, Debug, Serialize)]
pub struct CorollaryReport {
    pub core_points: usize,
    pub corollary_applies: bool,
    pub verdict: String,
    pub dimension: Option<BoxCountReport>,
    pub content: Option<ContentReport>,
    pub note: Option<String>,
    pub heuristic: bool,
}

/// Verdict on whether the measure criterion for Property (P) applies to the
/// core support. `dimension` is a box count of the core, when one is available.
pub fn corollary_report(chain: &CoreChain, dimension: Option<BoxCountReport>, note: Option<String>) -> Result<CorollaryReport> {
    if !chain.stabilized {
        return Err(LeviError::Precondition("corollary report needs a stabilized chain".into()));
    }
    let core = chain.core();
    let content = dimension.as_ref().map(|r| content_flag(r, 2.0, DEFAULT_CONTENT_THRESHOLD));
    let applies = core.is_empty() || content.as_ref().is_some_and(|c| c.flag == ContentFlag::MeasureZeroLikely);
    let verdict = if applies {
        "measure-zero route applies (heuristic): the core support has zero two-dimensional measure, so Property (P) \
         holds and the d-bar Neumann operator N_1 is compact"
            .to_string()
    } else {
        "inconclusive: Property (P) on the boundary reduces to Property (P) on the core support".to_string()
    };
    Ok(CorollaryReport {
        core_points: core.len(),
        corollary_applies: applies,
        verdict,
        dimension,
        content,
        note,
        heuristic: true,
    })
}

/// Real coordinates of a support cloud, row-major.
pub fn cloud_coords(cloud: &crate::chain::SupportCloud) -> Vec<f64> {
    cloud.points.iter().flat_map(|p| p.coords.iter().copied()).collect()
}
