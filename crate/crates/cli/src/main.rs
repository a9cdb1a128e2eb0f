use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use nhpseudo::io::export_model;
use nhpseudo::models::{build_haldane_heterostructure, HaldaneParams};
use nhpseudo::sweep::{diff_maps, gap_at, verify_rows, Coord, ModelConfig};
use nhpseudo::{check_suite, run_sweep, SweepConfig, SweepResult};

/// Relative discrepancy above which a re-verified sweep row is an error.
const VERIFY_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "nhpseudo", version, about = "Pseudospectral gap sweeps and bound checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BuiltinModel {
    Tls,
    Haldane,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the configured gaps over a probe grid and write a CSV.
    Sweep {
        /// JSON sweep configuration.
        config: PathBuf,
        /// Output CSV; overrides the configuration, `-` for stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Worker threads; overrides the configuration.
        #[arg(long)]
        threads: Option<usize>,
        /// Rows re-evaluated afterwards with direct gap calls.
        #[arg(long, default_value_t = 10)]
        verify: usize,
    },
    /// Print every gap at one probe site as JSON.
    Gap {
        #[arg(long, value_enum, default_value = "tls", conflicts_with = "config")]
        model: BuiltinModel,
        /// Take the model (and kappa) from a sweep configuration instead.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        y: f64,
        /// Real part of the energy.
        #[arg(long = "re", default_value_t = 0.0, allow_hyphen_values = true)]
        re: f64,
        /// Imaginary part of the energy.
        #[arg(long = "im", default_value_t = 0.0, allow_hyphen_values = true)]
        im: f64,
    },
    /// Fuzz the gap-comparison and locality bounds; exits nonzero on any violation.
    Check {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        instances: usize,
        /// Draw Hermitian B and real energies.
        #[arg(long)]
        hermitian: bool,
        /// Print only the summary line.
        #[arg(long)]
        quiet: bool,
    },
    /// Write the heterostructure's H.mtx, X.mtx, Y.mtx and sites.csv.
    ExportModel {
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = HaldaneParams::default().r_topo)]
        r_topo: u32,
        #[arg(long, default_value_t = HaldaneParams::default().r_trivial)]
        r_trivial: u32,
        #[arg(long, default_value_t = HaldaneParams::default().r_lossy)]
        r_lossy: u32,
    },
    /// Append |a.col_a - b.col_b| to sweep A, requiring identical grids.
    Diff {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        col_a: String,
        /// Defaults to `col_a`.
        #[arg(long)]
        col_b: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn open_output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    match path {
        Some(p) if p != Path::new("-") => Ok(Box::new(BufWriter::new(File::create(p)?))),
        _ => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Sweep {
            config,
            output,
            threads,
            verify,
        } => {
            let mut cfg = SweepConfig::from_file(&config)?;
            if threads.is_some() {
                cfg.threads = threads;
            }
            let result = run_sweep(&cfg)?;
            if verify > 0 {
                let worst = verify_rows(&cfg, &result, verify, 0)?;
                if worst > VERIFY_TOL {
                    return Err(format!("sampled rows disagree with direct evaluation: {worst:e}").into());
                }
            }
            let target = output.or_else(|| {
                cfg.output.as_ref().map(|p| {
                    if p.is_relative() {
                        config.parent().unwrap_or(Path::new(".")).join(p)
                    } else {
                        p.clone()
                    }
                })
            });
            let mut w = open_output(target.as_deref())?;
            result.write_csv(&mut w)?;
            w.flush()?;
        }
        Command::Gap {
            model,
            config,
            kappa,
            x,
            y,
            re,
            im,
        } => {
            let (model, kappa) = match config {
                Some(p) => {
                    let cfg = SweepConfig::from_file(&p)?;
                    (cfg.model, kappa.or(cfg.kappa))
                }
                None => match model {
                    BuiltinModel::Tls => (ModelConfig::tls(), kappa),
                    BuiltinModel::Haldane => (ModelConfig::haldane(), kappa),
                },
            };
            let values = BTreeMap::from([(Coord::X, x), (Coord::Y, y), (Coord::ReE, re), (Coord::ImE, im)]);
            let rec = gap_at(&model, kappa, &values)?;
            println!("{}", serde_json::to_string_pretty(&rec)?);
        }
        Command::Check {
            seed,
            instances,
            hermitian,
            quiet,
        } => {
            let out = check_suite(seed, instances, hermitian)?;
            if quiet {
                print!("{}", out.text.lines().last().map(|l| format!("{l}\n")).unwrap_or_default());
            } else {
                print!("{}", out.text);
            }
            if !out.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::ExportModel {
            out,
            r_topo,
            r_trivial,
            r_lossy,
        } => {
            let p = HaldaneParams {
                r_topo,
                r_trivial,
                r_lossy,
                ..HaldaneParams::default()
            };
            let model = build_haldane_heterostructure(&p)?;
            export_model(&out, &model)?;
            eprintln!("wrote {} sites to {}", model.len(), out.display());
        }
        Command::Diff {
            a,
            b,
            col_a,
            col_b,
            output,
        } => {
            let ta = SweepResult::read_csv_file(&a)?;
            let tb = SweepResult::read_csv_file(&b)?;
            let col_b = col_b.unwrap_or_else(|| col_a.clone());
            let d = diff_maps(&ta, &tb, &col_a, &col_b)?;
            let mut w = open_output(output.as_deref())?;
            d.write_csv(&mut w)?;
            w.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
