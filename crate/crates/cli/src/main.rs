use blockmg::symbol::read_symbol_file;
use blockmg_cli::{exit, run, table, ExperimentConfig};
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "blockmg",
    version,
    about = "Symbol-based multigrid experiments for block-structured matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a key = value config file.
    Run { config: PathBuf },
    /// Print run CSVs side by side, one column group per file.
    Table {
        #[arg(required = true)]
        csv: Vec<PathBuf>,
    },
    /// Certify a projector symbol against a fine symbol; prints a JSON report.
    Certify { f: PathBuf, p: PathBuf },
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return code(if e.use_stderr() {
                exit::CONFIG
            } else {
                exit::OK
            });
        }
    };
    match cli.command {
        Command::Run { config } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("cannot read {}: {e}", config.display());
                    return code(exit::CONFIG);
                }
            };
            let cfg = match ExperimentConfig::parse(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("config error: {e}");
                    return code(exit::CONFIG);
                }
            };
            match run(&cfg) {
                Ok(out) => {
                    for r in &out.rows {
                        println!(
                            "t={} N={} {} iterations={} residual={:e} {}",
                            r.t,
                            r.n,
                            run::cycle_name(r.cycle),
                            r.iterations,
                            r.final_residual,
                            run::flag_name(r.flag)
                        );
                    }
                    if let Some(p) = &out.csv_path {
                        println!("wrote {}", p.display());
                    }
                    println!("wrote {}", out.json_path.display());
                    code(if out.all_converged {
                        exit::OK
                    } else {
                        exit::NOT_CONVERGED
                    })
                }
                Err(e) => {
                    eprintln!("run failed: {e}");
                    code(exit::FAILURE)
                }
            }
        }
        Command::Table { csv } => {
            let inputs = match table::read_inputs(&csv) {
                Ok(i) => i,
                Err(e) => {
                    eprintln!("{e}");
                    return code(exit::CONFIG);
                }
            };
            match table::format_table(&inputs) {
                Ok(Some(t)) => {
                    print!("{t}");
                    code(exit::OK)
                }
                Ok(None) => {
                    println!("no data");
                    code(exit::OK)
                }
                Err(e) => {
                    eprintln!("{e}");
                    code(exit::CONFIG)
                }
            }
        }
        Command::Certify { f, p } => {
            let (f, p) = match (read_symbol_file(&f), read_symbol_file(&p)) {
                (Ok(f), Ok(p)) => (f, p),
                (Err(e), _) | (_, Err(e)) => {
                    eprintln!("{e}");
                    return code(exit::CONFIG);
                }
            };
            match blockmg::full_report(&f, &p) {
                Ok(rep) => {
                    println!("{}", rep.to_json());
                    code(exit::OK)
                }
                Err(e) => {
                    eprintln!("certification failed: {e}");
                    code(exit::FAILURE)
                }
            }
        }
    }
}
