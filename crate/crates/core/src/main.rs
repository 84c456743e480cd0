use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use levicore::chain::partition_boundary;
use levicore::config::RunConfig;
use levicore::pipeline::Pipeline;
use levicore::report;
use levicore::sets::PlanarCompactSet;
use levicore::witness::{finite_witness, witness_verify, WitnessCandidate};
use levicore::{LeviError, Result};

#[derive(Parser)]
#[command(name = "levicore", version, about = "Levi null distributions and cores of pseudoconvex boundaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify boundary samples as strongly or weakly pseudoconvex.
    Classify(Common),
    /// Build the derived chain, the core and the boundary partition.
    Core(Common),
    /// Box-counting dimension of the support and the corollary verdict.
    Dims(Common),
    /// Check the computable claims of the fat Cantor Hartogs example.
    VerifyExample(Common),
    /// Verify a Property (P) witness.
    Witness(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> Result<(RunConfig, PathBuf)> {
        let mut cfg = RunConfig::load(&self.config)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        let out = self
            .out
            .clone()
            .or_else(|| cfg.out_dir.clone())
            .unwrap_or_else(|| PathBuf::from("out"));
        Ok((cfg, out))
    }
}

fn classify(c: &Common) -> Result<()> {
    let (cfg, out) = c.load()?;
    let p = Pipeline::new(cfg)?;
    let classified = p.classify()?;
    let s = report::write_classification(&out, &p, &classified)?;
    println!(
        "{} samples: {} strongly pseudoconvex, {} weakly pseudoconvex",
        s.samples, s.strongly_pseudoconvex, s.weakly_pseudoconvex
    );
    Ok(())
}

fn core(c: &Common) -> Result<()> {
    let (cfg, out) = c.load()?;
    let p = Pipeline::new(cfg)?;
    let classified = p.classify()?;
    let stage0 = p.stage0(&classified)?;
    let chain = match levicore::chain::compute_core(stage0, &p.chain_params()) {
        Ok(chain) => chain,
        Err(LeviError::NotStabilized { max_iter, chain }) => {
            report::write_chain(&out, &p, &chain, None)?;
            return Err(LeviError::NotStabilized { max_iter, chain });
        }
        Err(e) => return Err(e),
    };
    let partition = partition_boundary(&chain, &classified.classes())?;
    report::write_chain(&out, &p, &chain, Some(&partition))?;
    println!(
        "stage sizes {:?}; core {} points; partition: {} strong, dropped {:?}, {} core",
        chain.stage_sizes(),
        chain.core().len(),
        partition.strong,
        partition.dropped,
        partition.core
    );
    Ok(())
}

fn dims(c: &Common) -> Result<()> {
    let (cfg, out) = c.load()?;
    let p = Pipeline::new(cfg)?;
    let run = p.run_core()?;
    let (outcome, corollary) = p.dims(&run)?;
    report::write_json(&out, "box_count.json", &outcome)?;
    if let Some(r) = &outcome.report {
        report::write_loglog(&out, r)?;
        println!("box dimension {:.4} ({})", r.dimension, r.method);
    }
    report::write_json(&out, "corollary.json", &corollary)?;
    println!("{}", corollary.verdict);
    Ok(())
}

fn verify_example(c: &Common) -> Result<()> {
    let (cfg, out) = c.load()?;
    let p = Pipeline::new(cfg)?;
    let verdict = p.verify_example()?;
    report::write_json(&out, "example.json", &verdict)?;
    for check in &verdict.checks {
        println!("{:<28} {}", check.name, if check.pass { "pass" } else { "fail" });
    }
    Ok(())
}

fn witness(c: &Common) -> Result<()> {
    let (cfg, out) = c.load()?;
    let w = cfg
        .witness
        .as_ref()
        .ok_or_else(|| LeviError::Precondition("config has no witness section".into()))?;
    let k = w.k.build()?;
    let candidate = match &w.lambda_csv {
        Some(path) => WitnessCandidate::from_grid_csv(std::fs::File::open(path)?, w.grid_h, w.m)?,
        None => match &k {
            PlanarCompactSet::Finite(pts) => finite_witness(pts, w.m)?,
            _ => {
                return Err(LeviError::Precondition(
                    "witnesses are only constructed for finite sets; supply lambda_csv".into(),
                ))
            }
        },
    };
    let verdict = witness_verify(&candidate, &k, w.grid_h)?;
    report::write_json(&out, "witness.json", &json!({"source": if w.lambda_csv.is_some() { "csv" } else { "finite_construction" }, "verdict": verdict}))?;
    println!("witness {} at M = {}", if verdict.pass { "passes" } else { "fails" }, verdict.m);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Classify(c) => classify(c),
        Command::Core(c) => core(c),
        Command::Dims(c) => dims(c),
        Command::VerifyExample(c) => verify_example(c),
        Command::Witness(c) => witness(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
