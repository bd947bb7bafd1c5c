//! `memsnn` — one subcommand per experiment.
//!
//! Every run loads a layered configuration (defaults ← file ← `MEMSNN_*`
//! environment ← flags), writes its artefacts under `--out`, prints a short
//! summary, and exits 0 on success, 1 when a measured property fails its
//! check, and 2 on I/O or configuration errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use memsnn::config::{ConfigError, RunConfig};
use memsnn::data::{load_optdigits, Dataset, Split};
use memsnn::energy::{render_table_columns, sweep};
use memsnn::error::{DataError, ModelError};
use memsnn::experiments::{run_bistability, run_hysteresis, run_pairing_decay, run_stdp_curve};
use memsnn::io::{
    confusion_csv, energy_rows_csv, energy_table_text, history_csv, load_model, pgm, save_model,
    stdp_points_csv, sweep_csv, transient_csv, weight_maps_csv,
};
use memsnn::network::Network;
use memsnn::synapse::LongTermState;

#[derive(Parser)]
#[command(
    name = "memsnn",
    version,
    about = "Memristive synapse and spiking-network simulator"
)]
struct Cli {
    /// Configuration file (TOML); built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for CSV/PGM/model artefacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Override the network seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the cell with a sinusoid and verify the pinched I-V loop.
    Hysteresis,
    /// Measure the pair-timing curve and fit its exponentials.
    StdpCurve,
    /// Drive one cell to each rail to demonstrate latch bistability.
    Bistability,
    /// Apply repeated depressing pairings and record the weight decay.
    PairingDecay,
    /// Render the accelerator energy table.
    EnergyTable,
    /// Sweep one energy-model axis into a CSV.
    Sweep,
    /// Train the winner-take-all layer on a digit dataset.
    Train(TrainArgs),
    /// Score a trained model on a dataset split.
    Eval(EvalArgs),
    /// Export per-neuron weight maps as PGM images and CSV.
    WeightsBitmap(BitmapArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// Training split (optdigits CSV).
    #[arg(long, default_value = "data/optdigits.tra")]
    data: PathBuf,

    /// Keep only these digits, e.g. `--digits 0,1,2,3`.
    #[arg(long, value_delimiter = ',')]
    digits: Vec<u8>,

    /// Passes over the training data (overrides the config).
    #[arg(long)]
    epochs: Option<usize>,

    /// Cap on total presentations (overrides the config).
    #[arg(long)]
    max_samples: Option<usize>,

    /// Model file to write (default: `<out>/model.toml`).
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Model file written by `train` (default: `<out>/model.toml`).
    #[arg(long)]
    model: Option<PathBuf>,

    /// Test split (optdigits CSV).
    #[arg(long, default_value = "data/optdigits.tes")]
    data: PathBuf,

    /// Keep only these digits, e.g. `--digits 0,1,2,3`.
    #[arg(long, value_delimiter = ',')]
    digits: Vec<u8>,

    /// Worker threads for scoring.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct BitmapArgs {
    /// Model file written by `train` (default: `<out>/model.toml`).
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Data(#[from] DataError),

    #[error(transparent)]
    Model(#[from] ModelError),

    #[error(
        "dataset {path} not found; download the UCI optdigits split, e.g.\n  \
         curl -o {path} https://archive.ics.uci.edu/ml/machine-learning-databases/optdigits/{name}"
    )]
    MissingDataset { path: String, name: String },

    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    /// 1 for validation failures, 2 for I/O and configuration errors.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(ConfigError::Invalid(_)) => 1,
            CliError::Config(_) => 2,
            CliError::Data(DataError::Io { .. }) => 2,
            CliError::Data(_) => 1,
            CliError::Model(_) => 1,
            CliError::MissingDataset { .. } => 2,
            CliError::Write { .. } => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Runs one subcommand; `Ok(false)` means the experiment completed but a
/// measured property failed its check.
fn run(cli: &Cli) -> Result<bool, CliError> {
    let env: Vec<(String, String)> = std::env::vars().collect();
    let mut config = RunConfig::load(cli.config.as_deref(), &env)?;
    if let Some(seed) = cli.seed {
        config.network.seed = seed;
    }
    fs::create_dir_all(&cli.out).map_err(|source| CliError::Write {
        path: cli.out.display().to_string(),
        source,
    })?;

    match &cli.command {
        Command::Hysteresis => hysteresis(cli, &config),
        Command::StdpCurve => stdp_curve(cli, &config),
        Command::Bistability => bistability(cli, &config),
        Command::PairingDecay => pairing_decay(cli, &config),
        Command::EnergyTable => energy_table(cli, &config),
        Command::Sweep => energy_sweep(cli, &config),
        Command::Train(args) => train(cli, &config, args),
        Command::Eval(args) => eval(cli, &config, args),
        Command::WeightsBitmap(args) => weights_bitmap(cli, args),
    }
}

fn write_artefact(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })?;
    Ok(path)
}

fn state_name(state: LongTermState) -> &'static str {
    match state {
        LongTermState::Lrs => "LRS",
        LongTermState::Hrs => "HRS",
        LongTermState::Undecided => "UNDECIDED",
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn hysteresis(cli: &Cli, config: &RunConfig) -> Result<bool, CliError> {
    let out = run_hysteresis(&config.memristor, &config.experiments.hysteresis)?;
    write_artefact(&cli.out, "hysteresis.csv", &out.trace.to_csv())?;
    let metrics = format!(
        "origin_residual_A={:e}\nloop_area_VA={:e}\nfinal_v_g_V={:e}\n\
         halved_dt_final_v_g_V={:e}\nstep_consistency={:e}\npass={}\n",
        out.metrics.origin_residual,
        out.metrics.loop_area,
        out.final_v_g,
        out.halved_final_v_g,
        out.step_consistency,
        out.pass
    );
    write_artefact(&cli.out, "hysteresis_metrics.txt", &metrics)?;
    println!(
        "hysteresis: origin residual {:.3e} A, loop area {:.3e} V*A, \
         step consistency {:.3e} — {}",
        out.metrics.origin_residual,
        out.metrics.loop_area,
        out.step_consistency,
        verdict(out.pass)
    );
    Ok(out.pass)
}

fn stdp_curve(cli: &Cli, config: &RunConfig) -> Result<bool, CliError> {
    let device = config.device_synapse()?;
    let out = run_stdp_curve(&device, &config.experiments.stdp_curve)?;
    write_artefact(&cli.out, "stdp_curve.csv", &stdp_points_csv(&out.points))?;
    let fit = format!(
        "tau_p_fit_s={:e}\ntau_m_fit_s={:e}\ngamma_a_plus_fit_V={:e}\n\
         gamma_a_minus_fit_V={:e}\nmax_rel_err={:e}\nodd_symmetry_err={:e}\npass={}\n",
        out.fit.tau_p,
        out.fit.tau_m,
        out.fit.gamma_a_plus,
        out.fit.gamma_a_minus,
        out.max_rel_err,
        out.odd_symmetry_err,
        out.pass
    );
    write_artefact(&cli.out, "stdp_fit.txt", &fit)?;
    println!(
        "stdp-curve: {} points, fitted tau+ {:.3e} s / tau- {:.3e} s, \
         max rel err {:.2e} — {}",
        out.points.len(),
        out.fit.tau_p,
        out.fit.tau_m,
        out.max_rel_err,
        verdict(out.pass)
    );
    Ok(out.pass)
}

fn bistability(cli: &Cli, config: &RunConfig) -> Result<bool, CliError> {
    let device = config.device_synapse()?;
    let out = run_bistability(&device, &config.experiments.bistability)?;
    write_artefact(
        &cli.out,
        "bistability_potentiation.csv",
        &transient_csv(&out.potentiated.rows),
    )?;
    write_artefact(
        &cli.out,
        "bistability_depression.csv",
        &transient_csv(&out.depressed.rows),
    )?;
    let summary = format!(
        "potentiation_pairings={}\npotentiation_final_v_g_V={:e}\npotentiation_state={}\n\
         depression_final_v_g_V={:e}\ndepression_state={}\n\
         pinned_v_g_V={:e}\npinned_state={}\nsettle_time_s={:e}\npass={}\n",
        out.potentiated.pairings_used,
        out.potentiated.final_v_g,
        state_name(out.potentiated.state),
        out.depressed.final_v_g,
        state_name(out.depressed.state),
        out.pinned_v_g,
        state_name(out.pinned_state),
        out.settle_time,
        out.pass
    );
    write_artefact(&cli.out, "bistability_summary.txt", &summary)?;
    println!(
        "bistability: potentiated → {} ({:.4} V), depressed → {} ({:.4} V), \
         pinned → {} — {}",
        state_name(out.potentiated.state),
        out.potentiated.final_v_g,
        state_name(out.depressed.state),
        out.depressed.final_v_g,
        state_name(out.pinned_state),
        verdict(out.pass)
    );
    Ok(out.pass)
}

fn pairing_decay(cli: &Cli, config: &RunConfig) -> Result<bool, CliError> {
    let device = config.device_synapse()?;
    let out = run_pairing_decay(&device, &config.experiments.pairing_decay)?;
    write_artefact(&cli.out, "pairing_decay.csv", &transient_csv(&out.rows))?;
    write_artefact(
        &cli.out,
        "pairing_decay_latch_off.csv",
        &transient_csv(&out.rows_latch_off),
    )?;
    let summary = format!(
        "pairings={}\nfinal_v_g_V={:e}\nmax_interval_deviation={:e}\n\
         monotone_until_clamp={}\ncurrent_non_increasing={}\npass={}\n",
        out.rows.len() - 1,
        out.rows.last().map_or(f64::NAN, |r| r.v_g),
        out.max_interval_deviation,
        out.monotone_until_clamp,
        out.current_non_increasing,
        out.pass
    );
    write_artefact(&cli.out, "pairing_decay_summary.txt", &summary)?;
    println!(
        "pairing-decay: {} pairings, final v_g {:.4} V, latch deviation {:.3e} — {}",
        out.rows.len() - 1,
        out.rows.last().map_or(f64::NAN, |r| r.v_g),
        out.max_interval_deviation,
        verdict(out.pass)
    );
    Ok(out.pass)
}

fn energy_table(cli: &Cli, config: &RunConfig) -> Result<bool, CliError> {
    let base = config.energy_params()?;
    let rows = render_table_columns(&base, &config.experiments.energy_table.columns)?;
    write_artefact(&cli.out, "energy_table.csv", &energy_rows_csv(&rows))?;
    let text = energy_table_text(&rows);
    write_artefact(&cli.out, "energy_table.txt", &text)?;
    print!("{text}");
    Ok(true)
}

fn energy_sweep(cli: &Cli, config: &RunConfig) -> Result<bool, CliError> {
    let base = config.energy_params()?;
    let sec = config.experiments.sweep;
    let points = sweep(&base, sec.axis, sec.start, sec.stop, sec.steps)?;
    write_artefact(&cli.out, "sweep.csv", &sweep_csv(sec.axis, &points))?;
    println!(
        "sweep: {} points along {} written to {}",
        points.len(),
        sec.axis.name(),
        cli.out.join("sweep.csv").display()
    );
    Ok(true)
}

fn load_dataset(path: &Path, split: Split, digits: &[u8]) -> Result<Dataset, CliError> {
    if !path.exists() {
        let name = match split {
            Split::Train => "optdigits.tra",
            Split::Test => "optdigits.tes",
        };
        return Err(CliError::MissingDataset {
            path: path.display().to_string(),
            name: name.to_string(),
        });
    }
    let ds = load_optdigits(path, split)?;
    if digits.is_empty() {
        Ok(ds)
    } else {
        Ok(ds.subset_digits(digits)?)
    }
}

fn train(cli: &Cli, config: &RunConfig, args: &TrainArgs) -> Result<bool, CliError> {
    let ds = load_dataset(&args.data, Split::Train, &args.digits)?;
    let epochs = args.epochs.unwrap_or(config.network.epochs);
    let max_samples = args.max_samples.or(config.network.max_samples);
    let mut net = Network::new(config.network_config()?)?;
    let history = net.train(&ds, epochs, max_samples)?;
    write_artefact(&cli.out, "train_history.csv", &history_csv(&history))?;

    let model_path = args
        .model
        .clone()
        .unwrap_or_else(|| cli.out.join("model.toml"));
    save_model(&model_path, &net, config)?;
    let last = history.rows.last();
    println!(
        "train: {} presentations over {} samples, running accuracy {:.3}, \
         mean weight {:.4}, model {}",
        net.presentations(),
        ds.len(),
        last.map_or(f64::NAN, |r| r.accuracy_running),
        last.map_or(f64::NAN, |r| r.mean_w),
        model_path.display()
    );
    Ok(true)
}

fn eval(cli: &Cli, _config: &RunConfig, args: &EvalArgs) -> Result<bool, CliError> {
    let model_path = args
        .model
        .clone()
        .unwrap_or_else(|| cli.out.join("model.toml"));
    let (net, _) = load_model(&model_path)?;
    let ds = load_dataset(&args.data, Split::Test, &args.digits)?;
    let result = net.evaluate(&ds, args.workers)?;
    write_artefact(
        &cli.out,
        "eval_confusion.csv",
        &confusion_csv(&result.confusion),
    )?;
    let metrics = format!(
        "accuracy={:.6}\nsamples={}\nworkers={}\nmodel={}\n",
        result.accuracy,
        result.n,
        args.workers,
        model_path.display()
    );
    write_artefact(&cli.out, "eval_metrics.txt", &metrics)?;
    println!(
        "eval: accuracy {:.4} on {} samples ({} workers)",
        result.accuracy, result.n, args.workers
    );
    Ok(true)
}

fn weights_bitmap(cli: &Cli, args: &BitmapArgs) -> Result<bool, CliError> {
    let model_path = args
        .model
        .clone()
        .unwrap_or_else(|| cli.out.join("model.toml"));
    let (net, _) = load_model(&model_path)?;
    let maps = net.export_weight_maps();
    let cfg = net.cfg();
    let side = (cfg.n_in as f64).sqrt().round() as usize;
    let width = if side * side == cfg.n_in {
        side
    } else {
        cfg.n_in
    };
    for (k, map) in maps.iter().enumerate() {
        let img = pgm(map, width, cfg.w_min, cfg.w_max)?;
        write_artefact(&cli.out, &format!("weights_digit_{k}.pgm"), &img)?;
    }
    write_artefact(&cli.out, "weights.csv", &weight_maps_csv(&maps))?;
    println!(
        "weights-bitmap: {} maps of {}x{} written to {}",
        maps.len(),
        width,
        maps.first().map_or(0, Vec::len) / width.max(1),
        cli.out.display()
    );
    Ok(true)
}
