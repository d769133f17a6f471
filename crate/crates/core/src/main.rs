use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use bellcast::harness::{
    expected_distribution, fmt_sig, parse_config, read_jsonl, run_batch, summarize, sweep_efficiency,
    write_sweep_csv, BatchSummary, Mode, RunConfig, SweepParam,
};
use bellcast::observables::{
    bell_projectors, cross_validate_projectors, minimal_pairs, spin_observables, verify_eigen_table,
    BellOutcome, SpinObservable,
};
use bellcast::photonic::EfficiencyConfig;
use bellcast::tol;

#[derive(Parser)]
#[command(version, about = "Teleportation simulator with spin and photonic Bell analyzers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the joint eigenvalue table and commutator norms; fail on any violation
    VerifyObservables,
    /// Teleport through the singlet with the commuting-observable Bell measurement
    RunSpin(RunArgs),
    /// Teleport photon polarization through the absorption cascade
    RunPhoton {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        eff: EffArgs,
    },
    /// Product-basis analyzer without particle interaction
    RunBaseline(RunArgs),
    /// Teleport one half of an entangled pair
    RunSwap(RunArgs),
    /// CSV of analytic event probabilities over an efficiency grid
    SweepEfficiency {
        #[arg(long, value_parser = parse_param)]
        param: SweepParam,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 11)]
        steps: usize,
        #[command(flatten)]
        eff: EffArgs,
        /// Write the CSV here instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Summarize a JSON-lines file written by a run
    Summarize {
        #[arg(long, value_parser = parse_mode)]
        mode: Mode,
        file: PathBuf,
        #[command(flatten)]
        eff: EffArgs,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// key=value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    trials: Option<u64>,
    /// Master seed; overrides the config file
    #[arg(long, env = "BELLCAST_SEED")]
    seed: Option<u64>,
    /// haar-random, fixed:A,B or fixed:A_RE,A_IM,B_RE,B_IM
    #[arg(long)]
    input: Option<String>,
    /// JSON-lines output path
    #[arg(long)]
    output: Option<PathBuf>,
    /// Per-outcome CSV path
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct EffArgs {
    #[arg(long)]
    eta_abs: Option<f64>,
    #[arg(long)]
    eta_det: Option<f64>,
    #[arg(long)]
    p_in: Option<f64>,
    #[arg(long)]
    p_pdc: Option<f64>,
}

impl EffArgs {
    fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        let pairs = [
            ("eta_abs", self.eta_abs),
            ("eta_det", self.eta_det),
            ("p_in", self.p_in),
            ("p_pdc", self.p_pdc),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                cfg.set(key, &v.to_string())
                    .with_context(|| format!("--{}", key.replace('_', "-")))?;
            }
        }
        Ok(())
    }

    fn config(&self) -> Result<EfficiencyConfig> {
        let mut cfg = RunConfig::default();
        self.apply(&mut cfg)?;
        Ok(cfg.efficiency)
    }
}

fn parse_param(s: &str) -> Result<SweepParam, String> {
    SweepParam::from_name(s).ok_or_else(|| format!("expected one of eta_abs, eta_det, p_in, p_pdc; got `{s}`"))
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    Mode::from_name(s).ok_or_else(|| format!("expected spin, photon, baseline or swap; got `{s}`"))
}

fn build_config(mode: Mode, run: &RunArgs, eff: Option<&EffArgs>) -> Result<RunConfig> {
    let mut cfg = match &run.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let cfg = parse_config(&text).with_context(|| format!("{}", path.display()))?;
            if text.lines().any(|l| l.split('#').next().unwrap_or("").trim().starts_with("mode"))
                && cfg.mode != mode
            {
                bail!("config selects mode `{}` but the subcommand runs `{mode}`", cfg.mode);
            }
            cfg
        }
        None => RunConfig::default(),
    };
    cfg.mode = mode;
    if let Some(n) = run.trials {
        cfg.set("trials", &n.to_string()).context("--trials")?;
    }
    if let Some(seed) = run.seed {
        cfg.master_seed = seed;
    }
    if let Some(input) = &run.input {
        cfg.set("input", input).context("--input")?;
    }
    if let Some(out) = &run.output {
        cfg.output_path = Some(out.clone());
    }
    if let Some(eff) = eff {
        eff.apply(&mut cfg)?;
    }
    Ok(cfg)
}

fn emit(summary: &BatchSummary, csv: Option<&PathBuf>) -> Result<()> {
    let rounded = summary.rounded();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    serde_json::to_writer(&mut out, &rounded)?;
    writeln!(out)?;
    if let Some(path) = csv {
        let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(f);
        rounded.write_csv(&mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn report(violations: Vec<String>) -> ExitCode {
    if violations.is_empty() {
        return ExitCode::SUCCESS;
    }
    for v in violations {
        eprintln!("violation: {v}");
    }
    ExitCode::from(2)
}

fn run_mode(mode: Mode, run: &RunArgs, eff: Option<&EffArgs>) -> Result<ExitCode> {
    let cfg = build_config(mode, run, eff)?;
    let summary = run_batch(&cfg)?;
    emit(&summary, run.csv.as_ref())?;
    Ok(report(summary.violations(mode, &cfg.efficiency)))
}

fn verify_observables() -> Result<ExitCode> {
    let obs = spin_observables();
    let mut violations = Vec::new();

    println!("state  {}", SpinObservable::ALL.map(|o| format!("{:>6}", o.symbol())).join(" "));
    match verify_eigen_table(obs) {
        Ok(table) => {
            for label in BellOutcome::ALL {
                let row = table.row(label);
                let vals = SpinObservable::ALL.map(|o| format!("{:>6}", fmt_sig(row.value(o))));
                println!("{:<6} {}", label.name(), vals.join(" "));
                for o in SpinObservable::ALL {
                    let v = row.value(o);
                    if (v - v.round()).abs() > tol::EIGEN {
                        violations.push(format!("{label} {o} eigenvalue {} is not an integer", fmt_sig(v)));
                    }
                }
            }
        }
        Err(e) => violations.push(e.to_string()),
    }

    println!("commutators (max |entry|):");
    for ((a, b), norm) in obs.commutator_norms() {
        println!("  [{a}, {b}] = {}", fmt_sig(norm));
        if norm >= tol::ALGEBRAIC {
            violations.push(format!("[{a}, {b}] does not vanish: {}", fmt_sig(norm)));
        }
    }

    let dev = cross_validate_projectors(obs, bell_projectors())?;
    println!("joint-eigenspace vs Bell projectors: {}", fmt_sig(dev));
    if dev >= tol::ALGEBRAIC {
        violations.push(format!("projector cross-validation deviates by {}", fmt_sig(dev)));
    }

    let pairs = minimal_pairs(obs)?;
    let names: Vec<String> = pairs.iter().map(ToString::to_string).collect();
    println!("pairs resolving the Bell basis: {}", names.join(" "));
    if pairs.is_empty() {
        violations.push("no observable pair resolves the Bell basis".into());
    }
    Ok(report(violations))
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::VerifyObservables => verify_observables(),
        Command::RunSpin(run) => run_mode(Mode::Spin, &run, None),
        Command::RunPhoton { run, eff } => run_mode(Mode::Photon, &run, Some(&eff)),
        Command::RunBaseline(run) => run_mode(Mode::Baseline, &run, None),
        Command::RunSwap(run) => run_mode(Mode::Swap, &run, None),
        Command::SweepEfficiency {
            param,
            from,
            to,
            steps,
            eff,
            output,
        } => {
            let rows = sweep_efficiency(&eff.config()?, param, from, to, steps)?;
            match output {
                Some(path) => {
                    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                    let mut w = BufWriter::new(f);
                    write_sweep_csv(param, &rows, &mut w)?;
                    w.flush()?;
                }
                None => write_sweep_csv(param, &rows, io::stdout().lock())?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Summarize { mode, file, eff, csv } => {
            let f = File::open(&file).with_context(|| format!("opening {}", file.display()))?;
            let records = read_jsonl(BufReader::new(f))?;
            let efficiency = eff.config()?;
            let expected = expected_distribution(mode, &efficiency);
            let summary = summarize(mode, &records, expected.as_deref())?;
            emit(&summary, csv.as_ref())?;
            Ok(report(summary.violations(mode, &efficiency)))
        }
    }
}
