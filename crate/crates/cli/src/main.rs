use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Parser, ValueEnum};

use ppsc::experiment::{gap_from_rows, run, write_csv, InstanceSource, Method, RunConfig};
use ppsc::CoverageModel;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    /// independent coverage
    Ic,
    /// linear threshold
    Lt,
}

/// Solve probabilistic partial set covering instances and tabulate results.
#[derive(Debug, Parser)]
#[command(name = "ppsc", version)]
#[command(group(ArgGroup::new("source").required(true).args(["instance", "generate"])))]
struct Args {
    /// Instance JSON file.
    #[arg(long, value_name = "PATH")]
    instance: Option<PathBuf>,

    /// Generate the benchmark instance `v,bbar,eps,seed`.
    #[arg(long, value_name = "V,BBAR,EPS,SEED")]
    generate: Option<String>,

    /// Coverage model for --generate.
    #[arg(long, value_enum, default_value = "ic")]
    model: ModelArg,

    /// Comma-separated methods: exact, benders-sub, benders-nv, dep, dep-lt, ltmip.
    #[arg(long, value_name = "NAME", value_delimiter = ',', required = true)]
    method: Vec<String>,

    /// Strength of oracle cuts (1 or 2).
    #[arg(long, default_value_t = 2)]
    kappa: u8,

    /// Scenarios per replication.
    #[arg(long, default_value_t = 100)]
    omega: usize,

    /// Replications of the scenario set.
    #[arg(long, default_value_t = 1)]
    reps: usize,

    /// Seed of replication 0; replication r uses seed + r.
    #[arg(long, default_value_t = 0)]
    scenario_seed: u64,

    /// Wall-clock limit per solve, in seconds.
    #[arg(long, value_name = "SECS")]
    time_limit: Option<f64>,

    /// Branch-and-bound node limit per solve.
    #[arg(long, value_name = "N")]
    node_limit: Option<usize>,

    #[arg(long, value_name = "PATH")]
    save_scenarios: Option<PathBuf>,

    #[arg(long, value_name = "PATH", conflicts_with = "save_scenarios")]
    load_scenarios: Option<PathBuf>,

    /// CSV output file; stdout when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Write zero for the timing columns so output is reproducible.
    #[arg(long)]
    omit_times: bool,
}

fn parse_generate(spec: &str, model: CoverageModel) -> Result<InstanceSource> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        bail!("--generate expects v,bbar,eps,seed, got `{spec}`");
    }
    Ok(InstanceSource::Generate {
        model,
        v: parts[0].parse().with_context(|| format!("bad v `{}`", parts[0]))?,
        bbar: parts[1].parse().with_context(|| format!("bad bbar `{}`", parts[1]))?,
        epsilon: parts[2].parse().with_context(|| format!("bad eps `{}`", parts[2]))?,
        seed: parts[3].parse().with_context(|| format!("bad seed `{}`", parts[3]))?,
    })
}

fn config(args: Args) -> Result<(RunConfig, Option<PathBuf>)> {
    let model = match args.model {
        ModelArg::Ic => CoverageModel::IndependentCoverage,
        ModelArg::Lt => CoverageModel::LinearThreshold,
    };
    let source = match (args.instance, args.generate) {
        (Some(path), None) => InstanceSource::File(path),
        (None, Some(spec)) => parse_generate(&spec, model)?,
        _ => bail!("give exactly one of --instance and --generate"),
    };
    let methods = args
        .method
        .iter()
        .map(|m| m.parse::<Method>())
        .collect::<ppsc::Result<Vec<_>>>()?;
    let mut cfg = RunConfig::new(source, methods);
    cfg.kappa = args.kappa;
    cfg.omega = args.omega;
    cfg.reps = args.reps;
    cfg.scenario_seed = args.scenario_seed;
    cfg.time_limit = args.time_limit;
    cfg.node_limit = args.node_limit;
    cfg.save_scenarios = args.save_scenarios;
    cfg.load_scenarios = args.load_scenarios;
    cfg.record_times = !args.omit_times;
    Ok((cfg, args.out))
}

fn main() -> Result<()> {
    let (cfg, out) = config(Args::parse())?;
    let rows = run(&cfg)?;
    match &out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            write_csv(&rows, BufWriter::new(file))?;
        }
        None => write_csv(&rows, io::stdout().lock())?,
    }
    for &m in cfg.methods.iter().filter(|m| m.uses_scenarios()) {
        if let Some(g) = gap_from_rows(&rows, m) {
            let conf = g
                .stated_confidence()
                .map_or_else(|| "n/a".to_string(), |c| format!("{c:.3}"));
            eprintln!("{m}: lb={} ub={} egap={} confidence={conf}", g.lb, g.ub, g.egap_label());
        }
    }
    Ok(())
}
