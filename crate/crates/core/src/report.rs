//! Artifact emission. Floats are written with 17 significant digits and rows
//! follow sample order, so equal runs give byte-identical files.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::chain::{CoreChain, PartitionLabel, PartitionLabeling};
use crate::dims::BoxCountReport;
use crate::error::Result;
use crate::levi::Classification;
use crate::pipeline::{Classified, LocusStats, Pipeline};

pub fn fmt_f(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn opt_f(x: Option<f64>) -> String {
    x.map(fmt_f).unwrap_or_default()
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut f = BufWriter::new(File::create(dir.join(name))?);
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}

fn csv(dir: &Path, name: &str, header: &str) -> Result<BufWriter<File>> {
    std::fs::create_dir_all(dir)?;
    let mut f = BufWriter::new(File::create(dir.join(name))?);
    writeln!(f, "{header}")?;
    Ok(f)
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifySummary {
    pub domain: &'static str,
    pub samples: usize,
    pub fibres: usize,
    pub n_theta: usize,
    pub strongly_pseudoconvex: usize,
    pub weakly_pseudoconvex: usize,
    pub eps_rel: f64,
    pub band_width: f64,
    pub locus: Option<LocusStats>,
}

pub fn classify_summary(p: &Pipeline, c: &Classified) -> ClassifySummary {
    let weak = c.weak_count();
    ClassifySummary {
        domain: if p.domain.hartogs().is_some() { "hartogs" } else { "ball" },
        samples: c.len(),
        fibres: p.sample.sites.len(),
        n_theta: p.sample.n_theta(),
        strongly_pseudoconvex: c.len() - weak,
        weakly_pseudoconvex: weak,
        eps_rel: p.config.tolerances.eps_rel,
        band_width: p.config.band_width(),
        locus: p.domain.hartogs().map(|_| p.locus_stats(c)),
    }
}

/// `classification.csv` and `classification_summary.json`.
pub fn write_classification(dir: &Path, p: &Pipeline, c: &Classified) -> Result<ClassifySummary> {
    let mut f = csv(
        dir,
        "classification.csv",
        "sample,fibre,step,x,y,theta_rad,u,v,levi_min,class,dist_k,in_band",
    )?;
    for k in 0..p.sample.len() {
        let pt = p.sample.point(k);
        let rec = c.record(k);
        let site = &p.sample.sites[pt.site];
        writeln!(
            f,
            "{k},{},{},{},{},{},{},{},{},{},{},{}",
            pt.site,
            pt.step,
            fmt_f(pt.z.re),
            fmt_f(pt.z.im),
            fmt_f(pt.theta),
            fmt_f(pt.w.re),
            fmt_f(pt.w.im),
            fmt_f(rec.eigenvalues[0]),
            rec.class.as_str(),
            opt_f(site.dist_k),
            p.in_band(pt.site) as u8
        )?;
    }
    f.flush()?;
    let summary = classify_summary(p, c);
    write_json(dir, "classification_summary.json", &summary)?;
    Ok(summary)
}

#[derive(Clone, Debug, Serialize)]
struct StageSummary {
    stage: usize,
    points: usize,
    dim_histogram: BTreeMap<usize, usize>,
    unresolved: Option<usize>,
    low_confidence: Option<bool>,
    forms_agree: Option<bool>,
    forms_min_cosine: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
struct ChainSummary<'a> {
    stabilized: bool,
    stable_stage: Option<usize>,
    core_points: usize,
    max_iter: usize,
    intersect_tol: f64,
    stages: Vec<StageSummary>,
    partition: Option<PartitionCounts<'a>>,
}

#[derive(Clone, Debug, Serialize)]
struct PartitionCounts<'a> {
    strong: usize,
    dropped: &'a [usize],
    core: usize,
    total: usize,
}

/// `chain.json`, one `stage_<a>.csv` per stage and, when given, `partition.csv`.
pub fn write_chain(dir: &Path, p: &Pipeline, chain: &CoreChain, partition: Option<&PartitionLabeling>) -> Result<()> {
    let stages = chain
        .stages
        .iter()
        .enumerate()
        .map(|(a, s)| {
            let mut hist = BTreeMap::new();
            for pt in &s.points {
                *hist.entry(pt.dist.dim()).or_insert(0) += 1;
            }
            let tr = chain.transitions.get(a);
            StageSummary {
                stage: a,
                points: s.len(),
                dim_histogram: hist,
                unresolved: tr.map(|t| t.unresolved),
                low_confidence: tr.map(|t| t.low_confidence),
                forms_agree: tr.map(|t| t.records.iter().all(|r| r.forms_agree)),
                forms_min_cosine: tr.map(|t| t.records.iter().map(|r| r.forms_cosine).fold(1.0, f64::min)),
            }
        })
        .collect();
    let summary = ChainSummary {
        stabilized: chain.stabilized,
        stable_stage: chain.stabilized.then(|| chain.stages.len() - 1),
        core_points: chain.core().len(),
        max_iter: chain.params.max_iter,
        intersect_tol: chain.params.intersect_tol,
        stages,
        partition: partition.map(|pl| PartitionCounts {
            strong: pl.strong,
            dropped: &pl.dropped,
            core: pl.core,
            total: pl.labels.len(),
        }),
    };
    write_json(dir, "chain.json", &summary)?;
    for (a, s) in chain.stages.iter().enumerate() {
        let mut f = csv(dir, &format!("stage_{a}.csv"), "sample,x,y,theta_rad,u,v,dim")?;
        for pt in &s.points {
            let bp = p.sample.point(pt.sample);
            writeln!(
                f,
                "{},{},{},{},{},{},{}",
                pt.sample,
                fmt_f(bp.z.re),
                fmt_f(bp.z.im),
                fmt_f(bp.theta),
                fmt_f(bp.w.re),
                fmt_f(bp.w.im),
                pt.dist.dim()
            )?;
        }
        f.flush()?;
    }
    if let Some(pl) = partition {
        let core_stage = chain.stages.len() - 1;
        let mut f = csv(dir, "partition.csv", "sample,x,y,theta_rad,label,stage")?;
        for (k, label) in pl.labels.iter().enumerate() {
            let bp = p.sample.point(k);
            let stage: i64 = match label {
                PartitionLabel::Strong => -1,
                PartitionLabel::Dropped { stage } => *stage as i64,
                PartitionLabel::Core => core_stage as i64,
            };
            writeln!(
                f,
                "{k},{},{},{},{},{stage}",
                fmt_f(bp.z.re),
                fmt_f(bp.z.im),
                fmt_f(bp.theta),
                label.name()
            )?;
        }
        f.flush()?;
    }
    Ok(())
}

/// `loglog.csv` for plotting a box count.
pub fn write_loglog(dir: &Path, r: &BoxCountReport) -> Result<()> {
    let mut f = csv(dir, "loglog.csv", "delta,boxes,neg_log_delta,log_boxes")?;
    for row in r.log_log_rows() {
        writeln!(f, "{},{},{},{}", fmt_f(row[0]), row[1] as u64, fmt_f(row[2]), fmt_f(row[3]))?;
    }
    f.flush()?;
    Ok(())
}

pub fn class_counts(classes: &[Classification]) -> (usize, usize) {
    let weak = classes.iter().filter(|c| **c == Classification::WeaklyPseudoconvex).count();
    (classes.len() - weak, weak)
}
