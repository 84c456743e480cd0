//! Acceptance matrix. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use levicore::chain::{certify_drop, CoreChain, PartitionLabel, PartitionLabeling};
use levicore::config::{RunConfig, Sampling};
use levicore::dims::{content_flag, ContentFlag, DEFAULT_CONTENT_THRESHOLD};
use levicore::levi::Classification;
use levicore::linalg::{hermitian_eigen, principal_angles, subspace_intersect, HermitianMatrix, SubspaceBasis, C64};
use levicore::pipeline::{CoreRun, Pipeline};
use levicore::sets::SetSpec;
use levicore::witness::{finite_witness, witness_verify, Region, WitnessCandidate};
use levicore::domain::SiteOrigin;
use levicore::sets::PlanarCompactSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn pipeline(name: &str) -> Pipeline {
    Pipeline::new(RunConfig::load(&config_path(name)).expect("config loads")).expect("pipeline builds")
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

// ---------------------------------------------------------------- oracles

/// Membership in the depth-truncated Cantor set on [0, 1] with gaps `base^-n`.
fn cantor_contains(x: f64, base: f64, depth: usize) -> bool {
    if !(0.0..=1.0).contains(&x) {
        return false;
    }
    let (mut a, mut len) = (0.0, 1.0);
    for n in 1..=depth {
        let gap = base.powi(-(n as i32));
        let child = (len - gap) / 2.0;
        if x <= a + child {
        } else if x >= a + child + gap {
            a += child + gap;
        } else {
            return false;
        }
        len = child;
    }
    true
}

fn c_inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn c_norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormal basis by classical Gram-Schmidt, dropping near-dependent vectors.
fn gram_schmidt(vs: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = Vec::new();
    for v in vs {
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = c_inner(q, &r);
                for (x, y) in r.iter_mut().zip(q) {
                    *x -= c * y;
                }
            }
        }
        let n = c_norm(&r);
        if n > 1e-9 * c_norm(v).max(1e-300) {
            out.push(r.iter().map(|x| x / n).collect());
        }
    }
    out
}

/// Rank by Gaussian elimination with partial pivoting; columns are the vectors.
fn rank(vs: &[Vec<C64>], tol: f64) -> usize {
    if vs.is_empty() {
        return 0;
    }
    let rows = vs[0].len();
    let mut m: Vec<Vec<C64>> = (0..rows).map(|r| vs.iter().map(|v| v[r]).collect()).collect();
    let cols = vs.len();
    let mut rk = 0;
    for c in 0..cols {
        let piv = (rk..rows).max_by(|&a, &b| m[a][c].norm().total_cmp(&m[b][c].norm()));
        let Some(p) = piv else { break };
        if m[p][c].norm() <= tol {
            continue;
        }
        m.swap(rk, p);
        for r in rk + 1..rows {
            let f = m[r][c] / m[rk][c];
            for k in c..cols {
                let t = m[rk][k];
                m[r][k] -= f * t;
            }
        }
        rk += 1;
    }
    rk
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn basis(n: usize, vs: &[Vec<C64>]) -> SubspaceBasis {
    levicore::linalg::orthonormalize(n, vs, 1e-10)
}

// ---------------------------------------------------------------- shared runs

struct Shared {
    fat: Pipeline,
    fat_run: CoreRun,
    circle: Pipeline,
    circle_run: CoreRun,
    mid: Pipeline,
    mid_run: CoreRun,
    timings: (Duration, Duration, Duration),
}

fn partition_exact(run: &CoreRun, n_samples: usize) -> (bool, String) {
    let PartitionLabeling { labels, strong, dropped, core } = &run.partition;
    let chain: &CoreChain = &run.chain;
    let mut ok = labels.len() == n_samples;
    let mut mismatches = 0usize;
    let (mut s, mut c) = (0, 0);
    let mut d = vec![0usize; dropped.len()];
    for (k, l) in labels.iter().enumerate() {
        let weak = run.classified.class(k) == Classification::WeaklyPseudoconvex;
        // a sample lies in stage a iff a is at most its drop stage
        let expected = if !weak {
            PartitionLabel::Strong
        } else if chain.core().contains(k) {
            PartitionLabel::Core
        } else {
            let a = (0..chain.stages.len())
                .rev()
                .find(|&a| chain.stages[a].contains(k))
                .expect("weak samples are in stage 0");
            PartitionLabel::Dropped { stage: a }
        };
        if *l != expected {
            mismatches += 1;
        }
        match l {
            PartitionLabel::Strong => s += 1,
            PartitionLabel::Core => c += 1,
            PartitionLabel::Dropped { stage } => d[*stage] += 1,
        }
    }
    let total = s + c + d.iter().sum::<usize>();
    ok &= mismatches == 0 && total == n_samples && s == *strong && c == *core && &d == dropped;
    (ok, format!("{n_samples} samples = {s} strong + {d:?} dropped + {c} core, {mismatches} mislabelled"))
}

// ---------------------------------------------------------------- criteria

fn criterion_1() -> Verdict {
    let t = Instant::now();
    let p = pipeline("ball.json");
    let run = p.run_core().expect("ball pipeline runs");
    let n = run.classified.len();
    let weak = run.classified.weak_count();
    let empty_chain = run.chain.stages.len() == 1 && run.chain.stages[0].is_empty() && run.chain.stabilized;
    let all_strong = run.partition.labels.iter().all(|l| *l == PartitionLabel::Strong);
    let secs = t.elapsed().as_secs_f64();
    verdict(
        n >= 1000 && weak == 0 && empty_chain && all_strong && secs < 10.0,
        format!("{n} samples, {weak} weak, chain {:?}, all K_-1: {all_strong}, {secs:.1} s", run.chain.stage_sizes()),
    )
}

fn criterion_2() -> Verdict {
    let t = Instant::now();
    let mut cfg = RunConfig::hartogs(SetSpec::fat_cantor_square(0.6, 14), Sampling { n_z: 512, n_theta: 1, k_sites: 0, use_symmetry: true });
    if let levicore::config::DomainSpec::Hartogs { h, .. } = &mut cfg.domain {
        *h = 2f64.powi(-9);
    }
    let p = Pipeline::new(cfg).expect("pipeline builds");
    let c = p.classify().expect("classification runs");
    let band = p.config.band_width();
    let (mut checked, mut agree, mut in_band) = (0usize, 0usize, 0usize);
    let (mut eig_checked, mut worst_rel) = (0usize, 0.0f64);
    for (s, site) in p.sample.sites.iter().enumerate() {
        assert!(matches!(p.sample.origins[s], SiteOrigin::Lattice { .. }));
        let z = site.z;
        let inside = cantor_contains((z.re + 0.3) / 0.6, 4.0, 14) && cantor_contains((z.im + 0.3) / 0.6, 4.0, 14);
        let d = site.dist_k.expect("Hartogs sites know their distance to K");
        if !inside && d <= band {
            in_band += 1;
            continue;
        }
        checked += 1;
        let weak = c.class(s) == Classification::WeaklyPseudoconvex;
        agree += (weak == inside) as usize;
        if !inside {
            let pv = site.potential.expect("potential data");
            let e = (-pv.phi).exp();
            let x2 = 1.0 + pv.phi_z.norm_sqr() * e;
            let grad = (pv.phi_z.norm_sqr() * e * e + e).sqrt();
            let want = e * pv.g / (x2 * grad);
            let got = c.record(s).eigenvalues[0];
            worst_rel = worst_rel.max((got - want).abs() / want.abs());
            eig_checked += 1;
        }
    }
    let agreement = agree as f64 / checked as f64;
    let secs = t.elapsed().as_secs_f64();
    verdict(
        agreement >= 0.99 && worst_rel <= 1e-6 && eig_checked > 0 && secs < 300.0,
        format!(
            "agreement {agreement:.5} on {checked} samples ({in_band} in band), eigenvalue rel err {worst_rel:.2e} on {eig_checked}, {secs:.1} s"
        ),
    )
}

fn criterion_3(sh: &Shared) -> Verdict {
    let stage0 = &sh.fat_run.chain.stages[0];
    let stride = (stage0.len() / 1000).max(1);
    let mut worst = 1.0f64;
    let mut count = 0;
    for cp in stage0.points.iter().step_by(stride).take(1000) {
        let bp = sh.fat.sample.point(cp.sample);
        let pv = sh.fat.sample.sites[bp.site].potential.expect("potential data");
        let want = [C64::new(1.0, 0.0), -pv.phi_z * bp.w];
        let null = sh.fat_run.classified.null(cp.sample);
        if null.dim() != 1 {
            worst = 0.0;
            continue;
        }
        let v = &null.vectors()[0];
        let cos = c_inner(&want, v).norm() / (c_norm(&want) * c_norm(v));
        worst = worst.min(cos);
        count += 1;
    }
    verdict(count >= 1000 && worst >= 1.0 - 1e-6, format!("{count} points, min cosine {worst:.12}"))
}

fn criterion_4(sh: &Shared) -> Verdict {
    let t = Instant::now();
    let v = sh.fat.verify_example().expect("verify_example runs");
    let secs = t.elapsed().as_secs_f64();
    let want = ["tangent_frame", "tangent_estimate", "first_derived_equals_null"];
    let mut parts = Vec::new();
    let mut pass = secs < 600.0;
    for name in want {
        let c = v.checks.iter().find(|c| c.name == name).expect("check present");
        pass &= c.pass;
        parts.push(format!("{name} {}", if c.pass { "ok" } else { "failed" }));
    }
    let est = &v.checks.iter().find(|c| c.name == "tangent_estimate").unwrap().details;
    parts.push(format!(
        "plateau 3 at {}/{} with min cosine {:.6}",
        est["plateau_three"], est["points"], est["min_cosine_to_level_tangent"].as_f64().unwrap_or(f64::NAN)
    ));
    let chain = &sh.fat_run.chain;
    let core_is_s = chain.stabilized && chain.core().samples().eq(chain.stages[0].samples());
    let all_dim_one = chain.stages.iter().all(|s| s.points.iter().all(|p| p.dist.dim() == 1));
    pass &= core_is_s && all_dim_one;
    parts.push(format!("stages {:?}, core = S_N {core_is_s}, {secs:.1} s", chain.stage_sizes()));
    verdict(pass, parts.join("; "))
}

/// Principal cosine between the embedded null line and the analytic torus frame.
fn torus_oracle_cosine(p: &Pipeline, sample: usize, center: C64) -> f64 {
    let bp = p.sample.point(sample);
    let site = &p.sample.sites[bp.site];
    let pv = site.potential.expect("potential data");
    let i = C64::new(0.0, 1.0);
    let (w, wb) = (bp.w, bp.w.conj());
    // split frame (dz, dw, dzbar, dwbar)
    let rot = vec![C64::new(0.0, 0.0), i * w, C64::new(0.0, 0.0), -i * wb];
    let zdot = i * (bp.z - center);
    let wdot = -w * (pv.phi_z * zdot).re;
    let along = vec![zdot, wdot, zdot.conj(), wdot.conj()];
    let q = gram_schmidt(&[rot, along]);
    let null = vec![C64::new(1.0, 0.0), -pv.phi_z * w, C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
    let nn = c_norm(&null);
    q.iter().map(|e| c_inner(e, &null).norm_sqr()).sum::<f64>().sqrt() / nn
}

fn criterion_5(sh: &Shared) -> Verdict {
    let p = &sh.circle;
    let run = &sh.circle_run;
    let stage0 = &run.chain.stages[0];
    let nt = p.sample.n_theta();
    let on_k: Vec<usize> = (0..p.sample.sites.len()).filter(|&s| p.sample.sites[s].dist_k == Some(0.0)).collect();
    let torus = stage0.len() == on_k.len() * nt
        && stage0.points.iter().all(|cp| p.sample.sites[cp.sample / nt].dist_k == Some(0.0));
    let emptied = run.chain.stages.len() == 2 && run.chain.stages[1].is_empty();
    let mut certified = 0usize;
    let mut worst_gap = 0.0f64;
    for cp in &stage0.points {
        let cert = certify_drop(&run.chain, cp.sample).expect("dropped samples have certificates");
        if cert.certified && cert.max_cosine <= 0.95 {
            certified += 1;
        }
        let oracle = torus_oracle_cosine(p, cp.sample, C64::new(0.0, 0.0));
        worst_gap = worst_gap.max((oracle - cert.max_cosine).abs());
    }
    let frac = certified as f64 / stage0.len().max(1) as f64;
    // the analytic cosine itself must certify the drop
    let oracle_max = stage0
        .points
        .iter()
        .step_by(97)
        .map(|cp| torus_oracle_cosine(p, cp.sample, C64::new(0.0, 0.0)))
        .fold(0.0f64, f64::max);
    let (_, corollary) = p.dims(run).expect("dims runs");
    let pass = torus && emptied && run.chain.core().is_empty() && frac >= 0.95 && oracle_max <= 0.95 && worst_gap <= 0.02 && corollary.corollary_applies;
    verdict(
        pass,
        format!(
            "stage 0 = torus {torus} ({} points), stages {:?}, certified {:.4}, analytic cosine <= {oracle_max:.4}, |numeric - analytic| <= {worst_gap:.2e}, verdict: {}",
            stage0.len(),
            run.chain.stage_sizes(),
            frac,
            corollary.verdict
        ),
    )
}

fn criterion_6(sh: &Shared) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, run) in [("fat Cantor", &sh.fat_run), ("circle", &sh.circle_run)] {
        let mut worst = 1.0f64;
        let mut same_sets = true;
        for t in &run.chain.transitions {
            for r in &t.records {
                same_sets &= (r.next_dim == 0) == (r.alt_dim == 0) && r.next_dim == r.alt_dim;
                worst = worst.min(r.forms_cosine);
            }
        }
        pass &= same_sets && worst >= 1.0 - 1e-8;
        parts.push(format!("{name}: {} transitions, same sets {same_sets}, min cosine {worst:.12}", run.chain.transitions.len()));
    }
    verdict(pass, parts.join("; "))
}

fn criterion_7(sh: &Shared) -> Verdict {
    let ball = pipeline("ball.json");
    let ball_run = ball.run_core().expect("ball pipeline runs");
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, p, run) in [
        ("ball", &ball, &ball_run),
        ("fat Cantor", &sh.fat, &sh.fat_run),
        ("circle", &sh.circle, &sh.circle_run),
        ("middle thirds", &sh.mid, &sh.mid_run),
    ] {
        let (ok, detail) = partition_exact(run, p.sample.len());
        pass &= ok;
        parts.push(format!("{name}: {detail}"));
    }
    verdict(pass, parts.join("; "))
}

fn criterion_8(sh: &Shared) -> Verdict {
    let want_mid = 1.0 + 2.0 * 2f64.ln() / 3f64.ln();
    let t = Instant::now();
    let mid = sh.mid.box_dimension(&sh.mid_run.chain.stages[0]).expect("box count runs");
    let mid_secs = t.elapsed().as_secs_f64() + sh.timings.2.as_secs_f64();
    let t = Instant::now();
    let fat = sh.fat.box_dimension(&sh.fat_run.chain.stages[0]).expect("box count runs");
    let fat_secs = t.elapsed().as_secs_f64() + sh.timings.0.as_secs_f64();
    let c3 = content_flag(&fat, 3.0, DEFAULT_CONTENT_THRESHOLD);
    let pass = (mid.dimension - want_mid).abs() <= 0.15
        && (2.75..=3.0).contains(&fat.dimension)
        && c3.flag == ContentFlag::PositiveMeasureLikely
        && mid_secs < 120.0
        && fat_secs < 120.0;
    verdict(
        pass,
        format!(
            "middle thirds {:.4} (target {want_mid:.4}, {mid_secs:.1} s); fat {:.4}, content at d = 3 {:?} ({fat_secs:.1} s); method {}",
            mid.dimension, fat.dimension, c3.flag, fat.method
        ),
    )
}

fn criterion_9() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let h = 1e-3;
    let mut passed = 0;
    let mut trials = Vec::new();
    while trials.len() < 50 {
        let n = rng.gen_range(1..=4);
        let pts: Vec<C64> = (0..n).map(|_| C64::new(rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4))).collect();
        let mut sep = f64::INFINITY;
        for a in 0..n {
            for b in a + 1..n {
                sep = sep.min((pts[a] - pts[b]).norm());
            }
        }
        if sep < 0.1 {
            continue;
        }
        // admissible: balls of radius 1/sqrt(M) around distinct points are disjoint
        let m_min = if n == 1 { 4.0 } else { (2.0 / sep).powi(2) };
        let m = m_min * rng.gen_range(1.0..3.0);
        trials.push((pts, m));
    }
    for (pts, m) in &trials {
        let c = finite_witness(pts, *m).expect("admissible pair");
        let k = PlanarCompactSet::Finite(pts.clone());
        if witness_verify(&c, &k, h).expect("verification runs").pass {
            passed += 1;
        }
    }
    // the zero function has a zero Hessian
    let zero = WitnessCandidate::new(
        Region::Balls { centers: vec![C64::new(0.0, 0.0)], radius: 0.1 },
        10.0,
        Arc::new(|_z: C64| (0.0, HermitianMatrix::diagonal(&[0.0]).unwrap())),
    )
    .unwrap();
    let zero_fails = !witness_verify(&zero, &PlanarCompactSet::Finite(vec![C64::new(0.0, 0.0)]), h).unwrap().pass;
    // pass at M implies pass at every smaller M
    let ladder = [0.25, 0.5, 0.9, 1.0, 1.1, 2.0, 4.0];
    let mut monotone = 0;
    for (pts, m) in trials.iter().take(20) {
        let c = finite_witness(pts, *m).unwrap();
        let k = PlanarCompactSet::Finite(pts.clone());
        let passes: Vec<bool> = ladder
            .iter()
            .map(|f| witness_verify(&c.with_m(m * f).unwrap(), &k, 4e-3).unwrap().pass)
            .collect();
        if passes.windows(2).all(|w| w[0] || !w[1]) && passes[3] && !passes[4] {
            monotone += 1;
        }
    }
    verdict(
        passed == 50 && zero_fails && monotone == 20,
        format!("{passed}/50 admissible witnesses pass, zero function fails: {zero_fails}, monotone on {monotone}/20"),
    )
}

fn criterion_10() -> Verdict {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut eig_ok, mut inter_ok, mut sym_ok) = (0, 0, 0);
    let mut worst_rec = 0.0f64;
    let mut worst_sym = 0.0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=6);
        // eigen-reconstruction
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        for r in 0..n {
            data[r * n + r] = C64::new(rng.gen_range(-5.0..5.0), 0.0);
            for c in r + 1..n {
                let v = C64::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
                data[r * n + c] = v;
                data[c * n + r] = v.conj();
            }
        }
        let a = HermitianMatrix::new(n, data.clone()).unwrap();
        let e = hermitian_eigen(&a);
        let fro = data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt().max(1.0);
        let mut err = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                let rec: C64 = (0..n).map(|k| e.vectors[k][r] * e.values[k] * e.vectors[k][c].conj()).sum();
                err = err.max((rec - data[r * n + c]).norm());
            }
        }
        worst_rec = worst_rec.max(err / fro);
        eig_ok += (err <= 1e-10 * fro && e.values.windows(2).all(|w| w[0] <= w[1])) as usize;

        // intersection dimension: shared part of known size plus generic extras
        let m = rng.gen_range(2..=6);
        let shared = rng.gen_range(0..=m / 2);
        let extra_a = rng.gen_range(0..=(m - shared).min(2));
        let extra_b = rng.gen_range(0..=(m - shared - extra_a).min(2));
        let common: Vec<Vec<C64>> = (0..shared).map(|_| random_vec(&mut rng, m)).collect();
        let mut va = common.clone();
        va.extend((0..extra_a).map(|_| random_vec(&mut rng, m)));
        let mut vb = common.clone();
        vb.extend((0..extra_b).map(|_| random_vec(&mut rng, m)));
        // mix so the shared directions are not stored verbatim
        let mix = |vs: &[Vec<C64>], rng: &mut ChaCha8Rng| -> Vec<Vec<C64>> {
            (0..vs.len())
                .map(|_| {
                    let coef: Vec<C64> = random_vec(rng, vs.len());
                    (0..m).map(|r| vs.iter().zip(&coef).map(|(v, c)| v[r] * c).sum()).collect()
                })
                .collect()
        };
        let (va, vb) = (mix(&va, &mut rng), mix(&vb, &mut rng));
        let (ba, bb) = (basis(m, &va), basis(m, &vb));
        let mut all = va.clone();
        all.extend(vb.iter().cloned());
        let oracle = rank(&va, 1e-9) + rank(&vb, 1e-9) - rank(&all, 1e-9);
        let got = subspace_intersect(&ba, &bb, 1e-8).unwrap().dim();
        inter_ok += (got == oracle) as usize;

        // principal angles are symmetric
        let ab = principal_angles(&ba, &bb).unwrap();
        let ba_ = principal_angles(&bb, &ba).unwrap();
        let d = ab.iter().zip(&ba_).map(|(x, y)| (x - y).abs()).fold(0.0f64, f64::max);
        worst_sym = worst_sym.max(d);
        sym_ok += (ab.len() == ba_.len() && d <= 1e-12) as usize;
    }
    let secs = t.elapsed().as_secs_f64();
    verdict(
        eig_ok == 1000 && inter_ok == 1000 && sym_ok == 1000 && secs < 30.0,
        format!(
            "reconstruction {eig_ok}/1000 (worst {worst_rec:.1e}), intersection {inter_ok}/1000, symmetry {sym_ok}/1000 (worst {worst_sym:.1e}), {secs:.1} s"
        ),
    )
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn criterion_11() -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config_path("fat_cantor.json");
    let mut outs = Vec::new();
    for run in 0..2 {
        let out = tmp.path().join(format!("run{run}"));
        let status = Command::new(env!("CARGO_BIN_EXE_levicore"))
            .args(["core", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .args(["--seed", "1"])
            .output()
            .expect("levicore runs");
        if !status.status.success() {
            return verdict(false, format!("run {run} exited with {}", status.status));
        }
        outs.push(read_dir_sorted(&out));
    }
    let names: Vec<&str> = outs[0].iter().map(|f| f.0.as_str()).collect();
    let bytes: usize = outs[0].iter().map(|f| f.1.len()).sum();
    let identical = outs[0] == outs[1];
    verdict(identical && !names.is_empty(), format!("{} files ({bytes} bytes) identical: {identical}: {}", names.len(), names.join(", ")))
}

fn main() {
    let mut results: Vec<(usize, &str, Verdict)> = Vec::new();
    let mut record = |n: usize, name: &'static str, v: Verdict| {
        println!("criterion {n:>2} {} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        results.push((n, name, v));
    };

    record(1, "ball sanity", criterion_1());
    record(2, "Hartogs locus", criterion_2());

    let t = Instant::now();
    let fat = pipeline("fat_cantor.json");
    let fat_run = fat.run_core().expect("fat Cantor pipeline runs");
    let fat_t = t.elapsed();
    let t = Instant::now();
    let circle = pipeline("circle.json");
    let circle_run = circle.run_core().expect("circle pipeline runs");
    let circle_t = t.elapsed();
    let t = Instant::now();
    let mid = pipeline("middle_thirds.json");
    let mid_run = mid.run_core().expect("middle-thirds pipeline runs");
    let mid_t = t.elapsed();
    println!(
        "pipelines: fat Cantor {:.1} s, circle {:.1} s, middle thirds {:.1} s",
        fat_t.as_secs_f64(),
        circle_t.as_secs_f64(),
        mid_t.as_secs_f64()
    );
    let sh = Shared { fat, fat_run, circle, circle_run, mid, mid_run, timings: (fat_t, circle_t, mid_t) };

    record(3, "null direction", criterion_3(&sh));
    record(4, "example reproduction", criterion_4(&sh));
    let c5 = criterion_5(&sh);
    let c5 = Verdict { pass: c5.pass && sh.timings.1.as_secs_f64() < 300.0, ..c5 };
    record(5, "nontrivial collapse", c5);
    record(6, "intersection forms agree", criterion_6(&sh));
    record(7, "partition exactness", criterion_7(&sh));
    record(8, "dimension estimates", criterion_8(&sh));
    drop(sh);
    record(9, "witness suite", criterion_9());
    record(10, "linear algebra", criterion_10());
    record(11, "determinism", criterion_11());

    let failed: Vec<usize> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", results.len());
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
