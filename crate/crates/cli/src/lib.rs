//! `relief` command line: generate instances, solve, simulate, run experiments,
//! check bounds and aggregate records.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use relief_core::gen::{build_dataset, DatasetManifest, DatasetName, GeneratorConfig, GraphClass};
use relief_core::graph::RdpInstance;
use relief_core::harness::{
    aggregate, read_records, resolve_workers, run_experiment, verify_bounds, write_outputs, write_summary,
    BoundReport, ExperimentConfig, GroupKey, Metric, RatioRecord,
};
use relief_core::policy::{simulate, PolicyKind};
use relief_core::solver::{multi_tsp, rdp_star_opt};

/// Exit status when `--strict` finds a bound violation.
pub const EXIT_VIOLATION: i32 = 1;
/// Exit status for usage and runtime errors.
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser)]
#[command(name = "relief", version, about = "Truck and drone relief routing under unknown damage")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one instance, or a whole named dataset.
    Gen(GenArgs),
    /// Solve the full-information problem for an instance.
    Solve(SolveArgs),
    /// Run one online policy and print the outcome as JSON.
    Simulate(SimulateArgs),
    /// Evaluate policies over a dataset grid and write record and summary CSVs.
    Experiment(ExperimentArgs),
    /// Check records against the theoretical ratio bounds.
    Verify(VerifyArgs),
    /// Summarise records into box-plot statistics.
    Aggregate(AggregateArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Graph class (random, one-center, two-center, coastal, mountain).
    #[arg(long, conflicts_with = "dataset")]
    class: Option<String>,
    /// Named dataset (RANDOM, BASE, VAR, LARGE, SMALL).
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long, default_value_t = 18)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Damage probability per customer.
    #[arg(long, default_value_t = 0.3)]
    delta: f64,
    /// Edge count for coastal and mountain graphs.
    #[arg(long)]
    edge_target: Option<usize>,
    #[arg(long, default_value_t = 1)]
    trucks: usize,
    #[arg(long, default_value_t = 1)]
    drones: usize,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    policy: String,
    /// Write the outcome here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    dataset: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated drone speeds; defaults to the dataset's grid.
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// Comma-separated fleets as TRUCKSxDRONES, e.g. 1x1,2x1.
    #[arg(long, value_delimiter = ',')]
    fleets: Option<Vec<String>>,
    /// Comma-separated policies; defaults to all five.
    #[arg(long, value_delimiter = ',')]
    policies: Option<Vec<String>>,
    /// Worker threads; falls back to RELIEF_WORKERS, then the core count.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Exit non-zero if any record violates a bound.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct AggregateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Comma-separated keys: alpha, policy, class, delta, n, fleet.
    #[arg(long, value_delimiter = ',', default_value = "policy,alpha")]
    group_by: Vec<String>,
    /// competitive_ratio or drone_impact_ratio.
    #[arg(long, default_value = "competitive_ratio")]
    metric: String,
    /// Write the summary here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parse `args` (including the program name) and run the command. Returns the exit status.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Gen(a) => gen(a, out),
        Command::Solve(a) => solve(a, out),
        Command::Simulate(a) => simulate_cmd(a, out),
        Command::Experiment(a) => experiment(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Aggregate(a) => aggregate_cmd(a, out),
    }
}

fn load_instance(path: &Path) -> Result<RdpInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    RdpInstance::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_records(path: &Path) -> Result<Vec<RatioRecord>> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(read_records(file)?)
}

fn parse_policy(s: &str) -> Result<PolicyKind> {
    s.parse().map_err(|e: String| anyhow!(e))
}

fn parse_fleet(s: &str) -> Result<(usize, usize)> {
    let (t, d) = s.trim().split_once(['x', 'X']).ok_or_else(|| anyhow!("fleet {s:?} is not TRUCKSxDRONES"))?;
    Ok((t.parse().with_context(|| format!("fleet {s:?}"))?, d.parse().with_context(|| format!("fleet {s:?}"))?))
}

fn gen(a: GenArgs, out: &mut dyn Write) -> Result<i32> {
    fs::create_dir_all(&a.out)?;
    if let Some(name) = &a.dataset {
        let name: DatasetName = name.parse()?;
        let manifest = DatasetManifest::new(name, a.seed);
        let instances = build_dataset(name, a.seed)?;
        for inst in &instances {
            let id = inst.meta["id"].as_str().expect("dataset instances have ids");
            fs::write(a.out.join(format!("{id}.json")), inst.to_json())?;
        }
        fs::write(a.out.join("manifest.json"), manifest.to_json())?;
        writeln!(out, "wrote {} instances of {name} to {}", instances.len(), a.out.display())?;
        return Ok(0);
    }
    let class: GraphClass = a.class.as_deref().unwrap_or("random").parse()?;
    let cfg = GeneratorConfig { edge_target: a.edge_target, ..GeneratorConfig::new(class, a.n, a.seed, a.delta) };
    let mut inst = cfg.generate()?.with_fleet(a.trucks, a.drones, a.alpha)?;
    let id = format!("{class}-n{}-s{}-d{}", a.n, a.seed, a.delta);
    inst.meta.insert("id".into(), id.clone().into());
    let path = a.out.join(format!("{id}.json"));
    fs::write(&path, inst.to_json())?;
    writeln!(out, "{}", path.display())?;
    Ok(0)
}

fn solve(a: SolveArgs, out: &mut dyn Write) -> Result<i32> {
    let inst = load_instance(&a.instance)?;
    let star = rdp_star_opt(&inst)?;
    let truck_only = multi_tsp(inst.closure(), &inst.customers(), inst.trucks(), 0, 1.0)?;
    let report = serde_json::json!({
        "opt_star": star.makespan,
        "truck_only_opt": truck_only.makespan,
        "solution": star,
    });
    writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    Ok(0)
}

fn simulate_cmd(a: SimulateArgs, out: &mut dyn Write) -> Result<i32> {
    let inst = load_instance(&a.instance)?;
    let outcome = simulate(&inst, parse_policy(&a.policy)?)?;
    match a.out {
        Some(path) => fs::write(path, outcome.to_json())?,
        None => out.write_all(outcome.to_json().as_bytes())?,
    }
    Ok(0)
}

fn report_violations(report: &BoundReport, records: &[RatioRecord], out: &mut dyn Write) -> Result<()> {
    for v in &report.violations {
        let r = &records[v.record];
        writeln!(
            out,
            "violation: {} policy={} alpha={} fleet={}x{} bound={:?} value={} limit={}",
            r.instance_id, r.policy, r.alpha, r.trucks, r.drones, v.bound, v.value, v.limit
        )?;
    }
    Ok(())
}

fn experiment(a: ExperimentArgs, out: &mut dyn Write) -> Result<i32> {
    let dataset: DatasetName = a.dataset.parse()?;
    let mut cfg = ExperimentConfig::new(dataset, a.seed);
    if let Some(alphas) = a.alphas {
        cfg.alphas = alphas;
    }
    if let Some(fleets) = a.fleets {
        cfg.fleets = fleets.iter().map(|f| parse_fleet(f)).collect::<Result<_>>()?;
    }
    if let Some(policies) = a.policies {
        cfg.policies = policies.iter().map(|p| parse_policy(p)).collect::<Result<_>>()?;
    }
    cfg.workers = resolve_workers(a.workers);
    let result = run_experiment(&cfg)?;
    for s in &result.skipped {
        writeln!(out, "skipped: {} ({})", s.instance_id, s.reason)?;
    }
    let written = write_outputs(&a.out, &result.records)?;
    let report = verify_bounds(&result.records);
    report_violations(&report, &result.records, out)?;
    writeln!(
        out,
        "{} records, {} files in {}, {} bound violations",
        result.records.len(),
        written.len(),
        a.out.display(),
        report.violations.len()
    )?;
    Ok(if a.strict && !report.is_clean() { EXIT_VIOLATION } else { 0 })
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let records = load_records(&a.input)?;
    let report = verify_bounds(&records);
    report_violations(&report, &records, out)?;
    Ok(if a.strict && !report.is_clean() { EXIT_VIOLATION } else { 0 })
}

fn aggregate_cmd(a: AggregateArgs, out: &mut dyn Write) -> Result<i32> {
    let records = load_records(&a.input)?;
    let keys: Vec<GroupKey> = a.group_by.iter().map(|k| k.parse()).collect::<Result<_, _>>()?;
    let metric: Metric = a.metric.parse()?;
    let rows = aggregate(&records, &keys, metric);
    let columns: Vec<&str> = rows.first().map(|r| r.keys.iter().map(|(c, _)| c.as_str()).collect()).unwrap_or_default();
    if rows.is_empty() && !keys.is_empty() {
        bail!("no records to aggregate in {}", a.input.display());
    }
    match a.out {
        Some(path) => write_summary(fs::File::create(path)?, &columns, &rows)?,
        None => write_summary(out, &columns, &rows)?,
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fleets_parse() {
        assert_eq!(parse_fleet("2x1").unwrap(), (2, 1));
        assert_eq!(parse_fleet(" 1X3").unwrap(), (1, 3));
        assert!(parse_fleet("21").is_err());
    }
}
