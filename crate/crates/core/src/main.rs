use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use swaptest::runner::{self, Engine, Experiment, ExperimentConfig, Table};
use swaptest::sweep::fit_fringe;
use swaptest::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_DIFF: u8 = 4;

#[derive(Parser)]
#[command(name = "swaptest", version, about = "Swap-test interferometry experiments")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Directory for relative output paths.
        #[arg(short, long)]
        out_dir: Option<PathBuf>,
        #[arg(short, long)]
        engine: Option<String>,
        /// Integrator relative tolerance.
        #[arg(long)]
        rtol: Option<f64>,
        /// Also write an SVG plot of the primary table.
        #[arg(long)]
        svg: bool,
    },
    /// Compare two CSV files column by column.
    Diff {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long, default_value_t = 1e-8)]
        threshold: f64,
        #[arg(long)]
        json: bool,
    },
    /// Least-squares cosine fit of one column against `phi`.
    FitFringe {
        csv: PathBuf,
        #[arg(short = 'n', long)]
        harmonic: u32,
        #[arg(short, long, default_value = "delta")]
        column: String,
    },
    /// List the named experiments and their engines.
    ListExperiments,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        _ => EXIT_NUMERIC,
    }
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(&e))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match cli.command {
        Command::Run {
            config,
            out_dir,
            engine,
            rtol,
            svg,
        } => {
            let mut cfg = match ExperimentConfig::load(&config) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            if let Some(name) = engine {
                match name.parse::<Engine>() {
                    Ok(e) => cfg.engine = Some(e),
                    Err(e) => return fail(e),
                }
            }
            if rtol.is_some() {
                cfg.tolerance.rtol = rtol;
            }
            cfg.svg |= svg;
            let result = match runner::run(&cfg) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            let path = cfg.output_file(out_dir.as_deref());
            match runner::write_result(&result, &path, cfg.svg) {
                Ok(files) => {
                    for f in files {
                        println!("wrote {}", f.display());
                    }
                }
                Err(e) => return fail(e),
            }
            if let Some(f) = &result.metadata.fit {
                println!(
                    "visibility {:.6}  offset {:.6e}  period {:.6}  residual {:.3e}",
                    f.visibility, f.offset, f.period, f.residual
                );
            }
            ExitCode::SUCCESS
        }
        Command::Diff { a, b, threshold, json } => {
            let report =
                match Table::load_csv(&a).and_then(|ta| Table::load_csv(&b).and_then(|tb| runner::diff(&ta, &tb))) {
                    Ok(r) => r,
                    Err(e) => return fail(e),
                };
            if json {
                println!("{}", serde_json::to_string_pretty(&report).unwrap_or_default());
            } else {
                println!("{report}");
            }
            if report.exceeds(threshold) {
                eprintln!(
                    "max difference {:.3e} exceeds threshold {threshold:.3e}",
                    report.max_abs()
                );
                return ExitCode::from(EXIT_DIFF);
            }
            ExitCode::SUCCESS
        }
        Command::FitFringe { csv, harmonic, column } => {
            let t = match Table::load_csv(&csv) {
                Ok(t) => t,
                Err(e) => return fail(e),
            };
            let (Some(phi), Some(y)) = (t.column("phi"), t.column(&column)) else {
                return fail(Error::Config(format!(
                    "{} needs 'phi' and '{column}' columns",
                    csv.display()
                )));
            };
            match fit_fringe(&phi, &y, harmonic) {
                Ok(f) => {
                    println!("visibility {:.10}", f.visibility);
                    println!("offset {:.10e}", f.offset);
                    println!("period {:.10}", f.period);
                    println!("phase {:.10e}", f.phase);
                    println!("residual {:.3e}", f.residual);
                    ExitCode::SUCCESS
                }
                Err(e) => fail(Error::Config(e.to_string())),
            }
        }
        Command::ListExperiments => {
            for e in Experiment::ALL {
                let engines: Vec<&str> = e.engines().iter().map(|x| x.name()).collect();
                println!("{:<7} [{}]  {}", e.name(), engines.join(", "), e.description());
            }
            ExitCode::SUCCESS
        }
    }
}
