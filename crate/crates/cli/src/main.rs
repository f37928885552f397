mod commands;
mod report;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use twisted_core::groups::parse_matrix2;
use twisted_core::torus::{TorusConfig, DEFAULT_THETA};

use commands::{Ctx, Outcome};

#[derive(Parser)]
#[command(name = "twisted", version, about = "Spectral triples on twisted crossed products: batch analyses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Output directory; defaults to the scenario's `out` or `./out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the internal parallel loops.
    #[arg(long)]
    threads: Option<usize>,
    /// Highest commutator order in regularity checks (at most 3).
    #[arg(long)]
    kmax: Option<usize>,
    /// Sobolev exponents probed in order checks, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    sgrid: Option<Vec<f64>>,
}

#[derive(Args, Clone)]
struct TorusArgs {
    #[arg(long)]
    theta: Option<f64>,
    /// Covering matrix, e.g. "[[2,0],[0,2]]".
    #[arg(long = "M")]
    m: Option<String>,
    #[arg(long)]
    cutoff: Option<i64>,
    /// spectrum | rep-check | regularity | summability (repeatable or comma separated).
    #[arg(long, value_delimiter = ',')]
    emit: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact check of the twisting-pair axioms for a scalar cocycle.
    VerifyCocycle(Common),
    /// Assemble the coefficient and crossed triples and check their structure.
    BuildTriple(Common),
    /// Dense spectrum of the crossed (or coefficient) Dirac operator.
    Spectrum(Common),
    /// Ball counts and growth exponent of a length function.
    Growth(Common),
    /// Summability ladder, counting sandwich and the abscissa bound.
    Summability(Common),
    /// (tech) condition, δᵏ plateaus, closed-form commutators and Lipschitz ratios.
    RegularitySweep(Common),
    /// Spectral subspaces, rank-1 regularity, Elwood freeness and Φ.
    CoveringAnalyze(Common),
    /// The quantum torus with a finite covering.
    TorusDemo {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        torus: TorusArgs,
    },
    /// Abscissa estimators on an eigenvalue sequence.
    OrderEstimate(Common),
    /// Every analysis listed in the scenario's `analyses`.
    Run(Common),
}

const ANALYSES: [&str; 9] = [
    "verify-cocycle",
    "build-triple",
    "spectrum",
    "growth",
    "summability",
    "regularity-sweep",
    "covering-analyze",
    "torus-demo",
    "order-estimate",
];

fn dispatch(name: &str, ctx: &Ctx) -> Result<Outcome> {
    match name {
        "verify-cocycle" => commands::verify_cocycle(ctx),
        "build-triple" => commands::build_triple(ctx),
        "spectrum" => commands::spectrum(ctx),
        "growth" => commands::growth(ctx),
        "summability" => commands::summability(ctx),
        "regularity-sweep" => commands::regularity_sweep(ctx),
        "covering-analyze" => commands::covering_analyze(ctx),
        "torus-demo" => commands::torus_demo(ctx),
        "order-estimate" => commands::order_estimate(ctx),
        other => bail!("unknown analysis {other:?}; expected one of {ANALYSES:?}"),
    }
}

fn torus_override(t: &TorusArgs) -> Result<Option<TorusConfig>> {
    if t.theta.is_none() && t.m.is_none() && t.cutoff.is_none() {
        return Ok(None);
    }
    let m = match &t.m {
        Some(s) => parse_matrix2(s).with_context(|| format!("--M {s:?} is not a 2×2 integer matrix"))?,
        None => [[2, 0], [0, 2]],
    };
    Ok(Some(TorusConfig::new(t.theta.unwrap_or(DEFAULT_THETA), m, t.cutoff.unwrap_or(3))?))
}

fn run(cli: Cli) -> Result<bool> {
    let (names, common, torus): (Vec<String>, Common, Option<TorusArgs>) = match cli.command {
        Command::VerifyCocycle(c) => (vec!["verify-cocycle".into()], c, None),
        Command::BuildTriple(c) => (vec!["build-triple".into()], c, None),
        Command::Spectrum(c) => (vec!["spectrum".into()], c, None),
        Command::Growth(c) => (vec!["growth".into()], c, None),
        Command::Summability(c) => (vec!["summability".into()], c, None),
        Command::RegularitySweep(c) => (vec!["regularity-sweep".into()], c, None),
        Command::CoveringAnalyze(c) => (vec!["covering-analyze".into()], c, None),
        Command::TorusDemo { common, torus } => (vec!["torus-demo".into()], common, Some(torus)),
        Command::OrderEstimate(c) => (vec!["order-estimate".into()], c, None),
        Command::Run(c) => (Vec::new(), c, None),
    };
    if let Some(n) = common.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    let loaded = scenario::load(common.scenario.as_deref())?;
    let names = if names.is_empty() {
        if loaded.scenario.analyses.is_empty() {
            bail!("scenario lists no analyses to run");
        }
        loaded.scenario.analyses.clone()
    } else {
        names
    };
    let torus_cfg = match &torus {
        Some(t) => torus_override(t)?,
        None => None,
    };
    let seed = common.seed.or(loaded.scenario.seed).unwrap_or(0);
    let out_dir = common
        .out
        .clone()
        .or_else(|| loaded.scenario.out.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let ctx = Ctx {
        scenario: loaded.scenario.clone(),
        seed,
        kmax: common.kmax,
        sgrid: common.sgrid.clone(),
        torus: torus_cfg,
        emit: torus.map(|t| t.emit).unwrap_or_default(),
    };
    let mut all_ok = true;
    for name in &names {
        let outcome = dispatch(name, &ctx)?;
        let status = report::write(&out_dir, name, &loaded, seed, &outcome)?;
        println!("{name}: {status} ({})", out_dir.join(format!("{name}.json")).display());
        for v in &outcome.violations {
            eprintln!("  violation: {v}");
        }
        all_ok &= outcome.violations.is_empty();
    }
    Ok(all_ok)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
