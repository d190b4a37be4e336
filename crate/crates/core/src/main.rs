use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use torus_chaos::harness::{self, figures::FigureOptions, ConfigOverrides, Dynamics, OtocB, SweepFile, VerifyLevel};
use torus_chaos::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "torus-chaos", version, about = "Coupled quantum cat map experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its time series.
    Run(ScenarioArgs),
    /// Run the four canonical scenarios and the growth-rate fits.
    Figures {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// First time of the log-linear fit window.
        #[arg(long, default_value_t = 1)]
        fit_start: usize,
        /// Last time of the log-linear fit window.
        #[arg(long, default_value_t = 5)]
        fit_end: usize,
    },
    /// Run the invariant suite and print one line per check.
    Verify {
        #[arg(long, value_enum, default_value_t = VerifyLevel::Fast)]
        level: VerifyLevel,
    },
    /// Run a list of `[[config]]` overrides from a TOML file.
    Sweep {
        /// Sweep document.
        grid: PathBuf,
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
}

#[derive(Args, Clone)]
struct ScenarioArgs {
    /// TOML file with scenario keys; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    dynamics: Option<Dynamics>,
    /// Hilbert dimension per degree of freedom (2..=128).
    #[arg(long)]
    n: Option<usize>,
    /// Kick strength of each map.
    #[arg(long)]
    k: Option<f64>,
    /// Coupling strength.
    #[arg(long)]
    kc: Option<f64>,
    /// Initial center of DOF 1 as `q,p` (`pi/4` is accepted).
    #[arg(long, allow_hyphen_values = true)]
    center1: Option<String>,
    /// Initial center of DOF 2 as `q,p`.
    #[arg(long, allow_hyphen_values = true)]
    center2: Option<String>,
    /// Last time step.
    #[arg(long)]
    tmax: Option<usize>,
    /// Second OTOC operator.
    #[arg(long, value_enum)]
    otoc_b: Option<OtocB>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl ScenarioArgs {
    fn overrides(&self) -> Result<ConfigOverrides, Error> {
        let file = match &self.config {
            Some(p) => ConfigOverrides::from_file(p)?,
            None => ConfigOverrides::default(),
        };
        let cli = ConfigOverrides {
            dynamics: self.dynamics,
            n: self.n,
            k: self.k,
            kc: self.kc,
            center1: self.center1.clone(),
            center2: self.center2.clone(),
            t_max: self.tmax,
            otoc_b: self.otoc_b,
            outputs: None,
        };
        Ok(file.merged_with(&cli))
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::NumericalHealth(_) => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

fn execute(command: Command) -> Result<u8, Error> {
    match command {
        Command::Run(args) => {
            let cfg = args.overrides()?.resolve()?;
            let out = harness::run_scenario(&cfg)?;
            harness::output::write_scenario(&args.out, &out)?;
            println!("wrote {} rows to {}", out.records.len(), args.out.display());
            Ok(0)
        }
        Command::Figures {
            scenario,
            fit_start,
            fit_end,
        } => {
            let opts = FigureOptions {
                base: scenario.overrides()?.resolve()?,
                fit_window: (fit_start, fit_end),
            };
            let suite = harness::run_figure_suite(&scenario.out, &opts)?;
            for row in &suite.fits {
                match row.fit {
                    Some(f) => println!(
                        "{} {}: slope={:.4} r2={:.4}",
                        row.scenario, row.quantity, f.slope, f.r_squared
                    ),
                    None => println!("{} {}: no fit", row.scenario, row.quantity),
                }
            }
            Ok(0)
        }
        Command::Verify { level } => {
            let report = harness::verify(level)?;
            print!("{report}");
            Ok(if report.all_passed() { 0 } else { EXIT_VERIFY })
        }
        Command::Sweep { grid, scenario } => {
            let file = SweepFile::from_file(&grid)?;
            let report = harness::sweep(&file.config, &scenario.overrides()?, &scenario.out)?;
            let mut code = 0;
            for e in &report.entries {
                match &e.error {
                    None => println!("ok   {}", e.dir.display()),
                    Some(err) => {
                        eprintln!("fail {}: {err}", e.dir.display());
                        code = code.max(exit_code_for(err));
                    }
                }
            }
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot configure {t} threads: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
