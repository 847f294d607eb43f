use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use flowgate::{report, Error, OutputFormat, Scenario, SweepSpec};
use flowgate_core::StrategyKind;

#[derive(Debug, Parser)]
#[command(name = "flowgate", version, about = "Fluid SDN simulator with proactive rerouting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scenario and write its report.
    Run {
        #[arg(long, env = "FLOWGATE_SCENARIO")]
        scenario: PathBuf,
        /// Overrides the scenario's strategy.
        #[arg(long, env = "FLOWGATE_STRATEGY")]
        strategy: Option<StrategyKind>,
        #[arg(long, env = "FLOWGATE_OUT_DIR")]
        out_dir: Option<PathBuf>,
        /// Report format; both when unset.
        #[arg(long, value_enum, env = "FLOWGATE_FORMAT")]
        format: Option<OutputFormat>,
        #[arg(long, env = "FLOWGATE_SEED")]
        seed: Option<u64>,
    },
    /// Run every (axis value, strategy) cell of a sweep file.
    Sweep {
        #[arg(long, env = "FLOWGATE_SWEEP")]
        sweep: PathBuf,
        #[arg(long, env = "FLOWGATE_OUT_DIR")]
        out_dir: Option<PathBuf>,
        #[arg(long, value_enum, env = "FLOWGATE_FORMAT")]
        format: Option<OutputFormat>,
        #[arg(long, env = "FLOWGATE_SEED")]
        seed: Option<u64>,
        /// Worker threads; defaults to one per core.
        #[arg(long, env = "FLOWGATE_JOBS")]
        jobs: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Run { scenario, strategy, out_dir, format, seed } => {
            let mut s = Scenario::load(&scenario)?;
            if let Some(strategy) = strategy {
                s.config.strategy = strategy;
            }
            if let Some(seed) = seed {
                s.config.seed = seed;
            }
            let out = s.run()?;
            let r = out.report(&s.name);
            let dir = out_dir.or(s.out_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
            let written = report::write_report(&r, &dir, format.or(s.format).unwrap_or(OutputFormat::Both))?;
            println!(
                "{} [{}]: {} flows, loss {:.3}%, throughput {:.3} Mbps, delay {:.3} ms, {} controller actions",
                r.scenario,
                r.strategy,
                r.n_flows,
                r.avg_loss_pct,
                r.avg_throughput_bps / 1e6,
                r.avg_delay_ms,
                r.actions.len()
            );
            for p in written {
                println!("wrote {}", p.display());
            }
            Ok(())
        }
        Command::Sweep { sweep, out_dir, format, seed, jobs } => {
            let mut spec = SweepSpec::load(&sweep)?;
            if let Some(seed) = seed {
                spec.base.config.seed = seed;
            }
            let result = match jobs {
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build()
                    .map_err(|e| Error::Internal(e.to_string()))?
                    .install(|| spec.run()),
                None => spec.run(),
            };
            let dir = out_dir.or(spec.out_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
            for p in result.write(&dir, format.or(spec.format).unwrap_or(OutputFormat::Both))? {
                println!("wrote {}", p.display());
            }
            for c in result.failed() {
                eprintln!(
                    "cell {}={} {} failed: {}",
                    result.axis.as_str(),
                    c.axis_value,
                    c.strategy,
                    c.error.as_deref().unwrap_or("")
                );
            }
            Ok(())
        }
    }
}
