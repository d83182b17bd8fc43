//! Command-line front end: builds a `RunConfig` from an optional JSON file
//! plus flag overrides and dispatches to the run modes.

use clap::{Args, Parser, Subcommand};
use qwalk_core::commands::{cmd_claims, cmd_limits, cmd_simulate, cmd_spectrum};
use qwalk_core::config::{CoinChoice, ComplexDef, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "qwalk",
    about = "4-state coined quantum walk on the line: simulation, spectrum, limits, claim audit",
    version
)]
struct Cli {
    /// JSON config file; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the walk; write distribution.csv and origin_sequence.csv.
    Simulate,
    /// Scan the k-grid; write spectrum.csv.
    Spectrum,
    /// Limit moments and rescaled histogram; write moments.csv and rescaled_hist.csv.
    Limits,
    /// Audit the closed-form claims; write claims.json and claims.txt.
    Claims,
}

#[derive(Args)]
struct Overrides {
    /// Coin choice: grover, hadamard, or custom (set --coin-*-re/-im).
    #[arg(long, global = true)]
    coin: Option<String>,

    #[arg(long, global = true)]
    alpha_re: Option<f64>,
    #[arg(long, global = true)]
    alpha_im: Option<f64>,
    #[arg(long, global = true)]
    beta_re: Option<f64>,
    #[arg(long, global = true)]
    beta_im: Option<f64>,
    #[arg(long, global = true)]
    gamma_re: Option<f64>,
    #[arg(long, global = true)]
    gamma_im: Option<f64>,
    #[arg(long, global = true)]
    mu_re: Option<f64>,
    #[arg(long, global = true)]
    mu_im: Option<f64>,

    /// Custom-coin entries, used when --coin custom.
    #[arg(long, global = true)]
    coin_a_re: Option<f64>,
    #[arg(long, global = true)]
    coin_a_im: Option<f64>,
    #[arg(long, global = true)]
    coin_b_re: Option<f64>,
    #[arg(long, global = true)]
    coin_b_im: Option<f64>,
    #[arg(long, global = true)]
    coin_c_re: Option<f64>,
    #[arg(long, global = true)]
    coin_c_im: Option<f64>,
    #[arg(long, global = true)]
    coin_d_re: Option<f64>,
    #[arg(long, global = true)]
    coin_d_im: Option<f64>,

    /// Largest simulated time.
    #[arg(long, global = true)]
    horizon: Option<u64>,

    /// Wavenumber grid size (power of two, >= 64).
    #[arg(long, global = true)]
    k_grid: Option<usize>,

    /// Output directory.
    #[arg(long = "out", global = true)]
    out: Option<PathBuf>,

    /// Time stride between distribution snapshots.
    #[arg(long, global = true)]
    stride: Option<u64>,

    /// Reserved for randomized extensions.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

fn apply_overrides(mut cfg: RunConfig, ov: &Overrides) -> Result<RunConfig, String> {
    if let Some(name) = &ov.coin {
        cfg.coin = match name.as_str() {
            "grover" => CoinChoice::Grover,
            "hadamard" => CoinChoice::Hadamard,
            "custom" => {
                let entry = |re: Option<f64>, im: Option<f64>| ComplexDef {
                    re: re.unwrap_or(0.0),
                    im: im.unwrap_or(0.0),
                };
                CoinChoice::Custom {
                    a: entry(ov.coin_a_re, ov.coin_a_im),
                    b: entry(ov.coin_b_re, ov.coin_b_im),
                    c: entry(ov.coin_c_re, ov.coin_c_im),
                    d: entry(ov.coin_d_re, ov.coin_d_im),
                }
            }
            other => {
                return Err(format!(
                    "unknown coin '{other}'; use grover, hadamard, or custom"
                ))
            }
        };
    }

    let setters: [(&Option<f64>, &Option<f64>, usize); 4] = [
        (&ov.alpha_re, &ov.alpha_im, 0),
        (&ov.beta_re, &ov.beta_im, 1),
        (&ov.gamma_re, &ov.gamma_im, 2),
        (&ov.mu_re, &ov.mu_im, 3),
    ];
    for (re, im, idx) in setters {
        if let Some(re) = re {
            cfg.initial[idx].re = *re;
        }
        if let Some(im) = im {
            cfg.initial[idx].im = *im;
        }
    }

    if let Some(h) = ov.horizon {
        cfg.horizon = h;
    }
    if let Some(g) = ov.k_grid {
        cfg.k_grid = g;
    }
    if let Some(out) = &ov.out {
        cfg.output_dir = out.clone();
    }
    if let Some(s) = ov.stride {
        cfg.stride = s;
    }
    if let Some(s) = ov.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn init_thread_pool() {
    if let Ok(raw) = std::env::var("QWALK_THREADS") {
        match raw.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => eprintln!("warning: ignoring invalid QWALK_THREADS value '{raw}'"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_thread_pool();

    let base = match &cli.config {
        Some(path) => match RunConfig::from_json_file(path) {
            Ok(cfg) => cfg,
            Err(err) => {
                eprintln!("error: {err}");
                return ExitCode::FAILURE;
            }
        },
        None => RunConfig::default(),
    };
    let cfg = match apply_overrides(base, &cli.overrides) {
        Ok(cfg) => cfg,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::FAILURE;
        }
    };

    // surface validation warnings (e.g. renormalized initial state) up front
    match cfg.validate() {
        Ok(run) => {
            for w in &run.warnings {
                eprintln!("warning: {w}");
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::FAILURE;
        }
    }

    let result = match cli.command {
        Command::Simulate => cmd_simulate(&cfg),
        Command::Spectrum => cmd_spectrum(&cfg),
        Command::Limits => cmd_limits(&cfg),
        Command::Claims => cmd_claims(&cfg),
    };
    match result {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
