use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nodal_lab::harness::{
    clt_verdict, cumulant_trend, reduction_verdict, report, run_ensemble, EnsembleResult, ExperimentPlan, Outcome,
    DEFAULT_BOOTSTRAP,
};
use nodal_lab::oracle::oracle_table;
use nodal_lab::randomwave::{Domain, GridRule, ModeRule};
use nodal_lab::Error;

const EXIT_VERDICT_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "nodal-lab", version, about = "Monte Carlo experiments on nodal lines of planar random waves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an ensemble at one energy.
    Simulate {
        #[arg(long)]
        energy: f64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run ensembles over several energies.
    Sweep {
        #[arg(long, value_delimiter = ',', required = true)]
        energies: Vec<f64>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print the exact trispectrum variance and the log-law fit.
    Oracle {
        #[arg(long, value_delimiter = ',', required = true)]
        energies: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        side: f64,
        /// Write JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarize record files into report.json and .dat tables.
    Report {
        #[arg(long = "in", required = true, num_args = 1..)]
        inputs: Vec<PathBuf>,
        #[arg(long, env = "NODAL_LAB_OUT_DIR", default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        side: f64,
        /// Seed of the bootstrap stream.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BOOTSTRAP)]
        bootstrap: usize,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    replications: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Grid intervals per wavelength (at least 10).
    #[arg(long, default_value_t = 10.0)]
    grid_per_wavelength: f64,
    /// Plane-wave modes per unit of `k L`, i.e. `M = ceil(v k L)` (at least 4).
    #[arg(long, default_value_t = 4.0)]
    modes_per_wavelength: f64,
    #[arg(long, default_value_t = 1.0)]
    side: f64,
    /// Records CSV; the JSON summary is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Default directory for `--out`.
    #[arg(long, env = "NODAL_LAB_OUT_DIR", default_value = "out")]
    out_dir: PathBuf,
    /// Worker threads; all available cores by default.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_BOOTSTRAP)]
    bootstrap: usize,
}

impl RunArgs {
    fn plan(&self, energies: Vec<f64>, default_name: String) -> nodal_lab::Result<ExperimentPlan> {
        let mut plan = ExperimentPlan::new(energies, self.replications, self.seed);
        plan.grid = GridRule {
            points_per_wavelength: self.grid_per_wavelength,
        };
        plan.modes = ModeRule {
            modes_per_radian: self.modes_per_wavelength,
        };
        plan.domain = Domain::new(self.side).map_err(as_config)?;
        plan.bootstrap = self.bootstrap;
        plan.output_path = Some(self.out.clone().unwrap_or_else(|| self.out_dir.join(default_name)));
        plan.validate()?;
        Ok(plan)
    }

    fn run(&self, plan: &ExperimentPlan) -> nodal_lab::Result<EnsembleResult> {
        match self.threads {
            Some(0) => Err(Error::config("--threads must be positive")),
            Some(n) => nodal_lab::harness::run_ensemble_with_threads(plan, n),
            None => run_ensemble(plan),
        }
    }
}

fn as_config(e: Error) -> Error {
    match e {
        Error::Domain(m) => Error::Config(m),
        other => other,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(outcomes) if outcomes.iter().any(|o| o.is_fail()) => ExitCode::from(EXIT_VERDICT_FAILED),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config(_) | Error::Domain(_) => EXIT_CONFIG,
                _ => EXIT_RUNTIME,
            })
        }
    }
}

fn execute(command: Command) -> nodal_lab::Result<Vec<Outcome>> {
    match command {
        Command::Simulate { energy, run } => {
            let plan = run.plan(vec![energy], format!("records_E{energy}.csv"))?;
            ensemble(&run, &plan)
        }
        Command::Sweep { energies, run } => {
            let name = format!("sweep_E{}.csv", energies.iter().map(f64::to_string).collect::<Vec<_>>().join("-"));
            let plan = run.plan(energies, name)?;
            ensemble(&run, &plan)
        }
        Command::Oracle { energies, side, out } => {
            let domain = Domain::new(side).map_err(as_config)?;
            let rows = oracle_table(&energies, &domain).map_err(as_config)?;
            let json = serde_json::to_string_pretty(&rows)?;
            match out {
                Some(path) => write_text(&path, &json)?,
                None => println!("{json}"),
            }
            Ok(Vec::new())
        }
        Command::Report {
            inputs,
            out,
            side,
            seed,
            bootstrap,
        } => {
            let domain = Domain::new(side).map_err(as_config)?;
            let rep = report(&inputs, &domain, &out, seed, bootstrap)?;
            for v in &rep.clt {
                println!("E = {}: KS p = {:.4}, W1 = {:.4} [{:?}]", v.energy, v.ks_pvalue, v.w1_stat, v.outcome);
            }
            println!("reduction: {:?}", rep.reduction.outcome);
            println!("cumulant trend: {:?}", rep.cumulant.outcome);
            println!("wrote {}", out.join("report.json").display());
            let mut outcomes: Vec<Outcome> = rep.clt.iter().map(|v| v.outcome).collect();
            outcomes.extend([rep.reduction.outcome, rep.cumulant.outcome]);
            Ok(outcomes)
        }
    }
}

fn ensemble(run: &RunArgs, plan: &ExperimentPlan) -> nodal_lab::Result<Vec<Outcome>> {
    let result = run.run(plan)?;
    let mut outcomes = Vec::new();
    for s in &result.energies {
        let v = clt_verdict(s);
        println!(
            "E = {}: mean length {:.5} (formula {:.5}), corr_LM {:.4}, KS p {:.4}, W1 {:.4} [{:?}]",
            s.energy, s.nodal_len.mean, s.mean_length_formula, s.corr_lm.value, v.ks_pvalue, v.w1_stat, v.outcome
        );
        outcomes.push(v.outcome);
    }
    if result.energies.len() >= 2 {
        let r = reduction_verdict(&result.energies);
        let c = cumulant_trend(&result.energies);
        println!("reduction: {:?}", r.outcome);
        println!("cumulant trend: {:?}", c.outcome);
        outcomes.extend([r.outcome, c.outcome]);
    }
    if let Some(path) = &plan.output_path {
        println!("wrote {}", path.display());
    }
    Ok(outcomes)
}

fn write_text(path: &Path, text: &str) -> nodal_lab::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, format!("{text}\n")).map_err(|e| Error::io(path, e))
}
