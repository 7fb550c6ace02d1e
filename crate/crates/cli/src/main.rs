use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fdssk_cli::config::{ErrorModeKind, ExperimentConfig, Method, Metric, ParamOverrides};
use fdssk_cli::experiment::{run_experiment, ExperimentOutput};
use fdssk_cli::presets::{self, PRESET_NAMES};
use fdssk_cli::{emit_csv, write_manifest, CliError, Result, OUT_DIR_ENV};
use fdssk_core::analytic::{abep, PepMethod};
use fdssk_core::{moment_audit, SystemParams};

#[derive(Parser)]
#[command(name = "fdssk", version, about = "ABEP, outage and throughput curves for the RIS full-duplex SSK link")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Average bit error probability versus SNR.
    Abep(SweepArgs),
    /// Outage probability versus SNR at a target rate.
    Outage {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Target rate R in bit/s/Hz.
        #[arg(long)]
        rate: Option<f64>,
    },
    /// Throughput (1 - ABEP) log2(N_t) versus SNR.
    Throughput(SweepArgs),
    /// Run a named figure preset.
    Figure {
        /// Preset name; `--list` shows them all.
        preset: Option<String>,
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Empirical against theoretical moments of the combined channel.
    AuditMoments {
        #[arg(long, default_value_t = 64)]
        elements: usize,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// ABEP by Gauss-Chebyshev quadrature order against adaptive quadrature.
    VerifyGcq {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_values_t = [-25.0, -23.0, -21.0])]
        snr_grid: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 20])]
        orders: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        elements: usize,
        #[arg(long, default_value_t = 0.1)]
        li_level: f64,
        #[arg(long, default_value_t = 0.1)]
        sigma_e2: f64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated SNR values in dB, strictly increasing.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    snr_grid: Option<Vec<f64>>,
    /// Channel realizations per simulated point.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    #[arg(long)]
    gcq_order: Option<usize>,
    /// Output directory [default: $FDSSK_OUT_DIR, then ./results].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base name of the output files.
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long)]
    elements: Option<usize>,
    #[arg(long)]
    n_tx: Option<usize>,
    /// Residual loop-interference level k^2.
    #[arg(long)]
    li_level: Option<f64>,
    #[arg(long, value_enum)]
    err_mode: Option<ErrorModeKind>,
    #[arg(long)]
    sigma_e2: Option<f64>,
    /// Pilot symbols T for the variable error mode.
    #[arg(long)]
    pilots: Option<u32>,
    #[arg(long)]
    noise_power: Option<f64>,
}

impl ParamArgs {
    fn overrides(&self) -> ParamOverrides {
        ParamOverrides {
            n_elements: self.elements,
            n_tx: self.n_tx,
            li_level: self.li_level,
            err_mode: self.err_mode,
            sigma_e2: self.sigma_e2,
            pilots: self.pilots,
            noise_power: self.noise_power,
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    label: Option<String>,
}

fn load(run: &RunArgs, params: &ParamArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &run.config {
        Some(path) => ExperimentConfig::from_json_file(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.overrides = cfg.overrides.merged(&params.overrides());
    if run.snr_grid.is_some() {
        cfg.snr_grid_db = run.snr_grid.clone();
    }
    cfg.trials = run.trials.or(cfg.trials);
    cfg.master_seed = run.seed.or(cfg.master_seed);
    if run.methods.is_some() {
        cfg.methods = run.methods.clone();
    }
    cfg.gcq_order = run.gcq_order.or(cfg.gcq_order);
    Ok(cfg)
}

fn out_dir(run: &RunArgs) -> PathBuf {
    run.out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("results"))
}

fn save(output: &ExperimentOutput, dir: &Path, name: &str) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    for w in &output.manifest.warnings {
        eprintln!("warning: {w}");
    }
    let csv_path = dir.join(format!("{name}.csv"));
    let manifest_path = dir.join(format!("{name}.manifest.json"));
    emit_csv(&output.series, &csv_path)?;
    write_manifest(&output.manifest, &manifest_path)?;
    println!("{}", csv_path.display());
    println!("{}", manifest_path.display());
    Ok(())
}

fn sweep(args: &SweepArgs, metric: Metric, default_name: &str) -> Result<()> {
    let mut cfg = load(&args.run, &args.params)?;
    if cfg.preset.is_some() {
        return Err(CliError::config("config names a preset; use `fdssk figure`"));
    }
    cfg.metric = Some(metric);
    if let Some(label) = &args.label {
        cfg.label = Some(label.clone());
    }
    let output = run_experiment(&cfg)?;
    save(&output, &out_dir(&args.run), args.run.name.as_deref().unwrap_or(default_name))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Abep(args) => sweep(&args, Metric::Abep, "abep"),
        Command::Throughput(args) => sweep(&args, Metric::Throughput, "throughput"),
        Command::Outage { sweep: args, rate } => {
            let mut cfg_rate = rate;
            if cfg_rate.is_none() {
                if let Some(path) = &args.run.config {
                    if let Some(Metric::Outage { rate_bps }) = ExperimentConfig::from_json_file(path)?.metric {
                        cfg_rate = Some(rate_bps);
                    }
                }
            }
            let rate_bps = cfg_rate.ok_or_else(|| CliError::config("outage needs --rate"))?;
            sweep(&args, Metric::Outage { rate_bps }, "outage")
        }
        Command::Figure { preset, list, run, params } => {
            if list {
                for name in PRESET_NAMES {
                    let p = presets::preset(name).expect("listed preset exists");
                    println!("{name:8} {}", p.description);
                }
                return Ok(());
            }
            let mut cfg = load(&run, &params)?;
            if preset.is_some() {
                cfg.preset = preset;
            }
            let name = cfg
                .preset
                .clone()
                .ok_or_else(|| CliError::config("figure needs a preset name"))?;
            let output = run_experiment(&cfg)?;
            save(&output, &out_dir(&run), run.name.as_deref().unwrap_or(&name))
        }
        Command::AuditMoments { elements, samples, seed } => {
            let audit = moment_audit(elements, samples, seed)?;
            if !audit.clt_adequate {
                eprintln!("warning: N={elements} is too small for the Gaussian approximation");
            }
            println!("{}", serde_json::to_string_pretty(&audit)?);
            Ok(())
        }
        Command::VerifyGcq { snr_grid, orders, elements, li_level, sigma_e2 } => {
            fdssk_cli::config::validate_grid(&snr_grid)?;
            println!("snr_db,order,abep_gcq,abep_exact,abs_diff_exact,abs_diff_prev");
            for snr in snr_grid {
                let p = SystemParams::new(elements, 2)
                    .with_li_level(li_level)
                    .with_fixed_error(sigma_e2)
                    .with_snr_db(snr);
                let exact = abep(&p, PepMethod::Exact)?;
                let mut prev: Option<f64> = None;
                for &q in &orders {
                    let v = abep(&p, PepMethod::Gcq { order: q })?;
                    let dprev = prev.map(|x| format!("{:e}", (v - x).abs())).unwrap_or_default();
                    println!("{snr:e},{q},{v:e},{exact:e},{:e},{dprev}", (v - exact).abs());
                    prev = Some(v);
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
