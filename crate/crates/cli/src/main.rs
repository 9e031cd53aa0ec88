use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ieobs_core::harness::{
    calibrate_zeta, compare_runs, emit_plot, load_config, run_experiment_with, write_csv,
    ExperimentConfig, ExperimentRun, PlotOptions, Quantity, RunOptions, Series,
};
use ieobs_core::Error;
use log::info;

/// Runs adaptive-observer experiments from TOML configs.
#[derive(Parser, Debug)]
#[command(name = "ieobs", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate one experiment and print its summary.
    Run {
        config: PathBuf,
        #[command(flatten)]
        out: Output,
        /// Record p_hat and x_hat in every CSV row.
        #[arg(long)]
        full_dump: bool,
    },
    /// Run several experiments on the same plant and tabulate them.
    Compare {
        #[arg(required = true, num_args = 2..)]
        configs: Vec<PathBuf>,
        /// Directory receiving one `<run name>.csv` per experiment.
        #[arg(long, value_name = "DIR")]
        csv: Option<PathBuf>,
        /// Overlay plot of all runs.
        #[arg(long)]
        plot: Option<PathBuf>,
        #[arg(long)]
        log_scale: bool,
        #[arg(long, default_value = "psi_err")]
        quantity: String,
    },
    /// Print the Gram floor per step and suggest a switching threshold.
    CalibrateZeta {
        config: PathBuf,
        /// Only print steps up to this one.
        #[arg(long)]
        until: Option<usize>,
    },
    /// Print the version.
    Version,
}

#[derive(Args, Debug)]
struct Output {
    /// Trace CSV path; overrides `run.csv` in the config.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// SVG plot path; overrides `run.plot` in the config.
    #[arg(long)]
    plot: Option<PathBuf>,
    #[arg(long)]
    log_scale: bool,
    /// psi_err, x_err, gamma_sq, gram_min_eig, u_<i> or y_<i>.
    #[arg(long, default_value = "psi_err")]
    quantity: String,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::NumericFailure { .. } => 2,
        _ => 1,
    }
}

/// Config-relative artifact paths resolve against the config's directory.
fn resolve(config_path: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        return p.to_path_buf();
    }
    config_path.parent().unwrap_or(Path::new(".")).join(p)
}

fn load(path: &Path) -> Result<ExperimentConfig, Error> {
    let cfg = load_config(path)?;
    info!("loaded `{}` from {}", cfg.name, path.display());
    Ok(cfg)
}

fn print_summary(run: &ExperimentRun) {
    let s = &run.summary;
    println!("run            {}", run.name);
    println!("steps          {}", run.trace.len());
    match s.sie {
        Some(snap) => {
            println!("sie_step       {}", snap.step);
            println!("gram_min_eig   {:.6e}", snap.gram_min_eig);
            println!("s_min_eig      {:.6e}", snap.s_min_eig);
            println!("s_sq_min_eig   {:.6e}", snap.s_sq_min_eig);
        }
        None => println!("sie_step       -"),
    }
    println!("initial_psi    {:.6e}", s.initial_psi_err);
    println!("final_psi      {:.6e}", s.final_psi_err);
    println!("initial_x      {:.6e}", s.initial_x_err);
    println!("final_x        {:.6e}", s.final_x_err);
    match s.decay {
        Some(d) => println!(
            "decay_rate     {:.8} (R2 {:.4}, t {}..{}, {} points)",
            d.rate, d.r_squared, d.start, d.end, d.points
        ),
        None => println!("decay_rate     -"),
    }
    println!("monotone       {}", s.monotone_ok);
}

fn run(config: &Path, out: &Output, full_dump: bool) -> Result<(), Error> {
    let cfg = load(config)?;
    let quantity: Quantity = out.quantity.parse()?;
    let run = run_experiment_with(&cfg, RunOptions { full_dump })?;
    print_summary(&run);

    let csv = out
        .csv
        .clone()
        .or_else(|| cfg.csv.as_deref().map(|p| resolve(config, p)));
    if let Some(path) = csv {
        write_csv(&run.trace, &path)?;
        info!("wrote {}", path.display());
    }
    let plot = out
        .plot
        .clone()
        .or_else(|| cfg.plot.as_deref().map(|p| resolve(config, p)));
    if let Some(path) = plot {
        let series = [Series {
            label: &run.name,
            trace: &run.trace,
            sie_step: run.summary.sie_step(),
        }];
        let opts = PlotOptions {
            quantity,
            log_scale: out.log_scale,
            title: &run.name,
        };
        emit_plot(&series, opts, &path)?;
        info!("wrote {}", path.display());
    }
    Ok(())
}

fn compare(
    paths: &[PathBuf],
    csv_dir: Option<&Path>,
    plot: Option<&Path>,
    log_scale: bool,
    quantity: &str,
) -> Result<(), Error> {
    let quantity: Quantity = quantity.parse()?;
    let configs = paths
        .iter()
        .map(|p| load(p))
        .collect::<Result<Vec<_>, _>>()?;
    let cmp = compare_runs(&configs)?;
    print!("{}", cmp.table());

    if let Some(dir) = csv_dir {
        std::fs::create_dir_all(dir)?;
        for run in &cmp.runs {
            write_csv(&run.trace, dir.join(format!("{}.csv", run.name)))?;
        }
    }
    if let Some(path) = plot {
        let series: Vec<Series<'_>> = cmp
            .runs
            .iter()
            .map(|r| Series {
                label: &r.name,
                trace: &r.trace,
                sie_step: r.summary.sie_step(),
            })
            .collect();
        let opts = PlotOptions {
            quantity,
            log_scale,
            title: "comparison",
        };
        emit_plot(&series, opts, path)?;
    }
    Ok(())
}

fn calibrate(config: &Path, until: Option<usize>) -> Result<(), Error> {
    let cfg = load(config)?;
    let cal = calibrate_zeta(&cfg)?;
    println!("{:>8} {:>24}", "t", "gram_min_eig");
    let last = until.unwrap_or(usize::MAX);
    for &(t, v) in cal.series.iter().take_while(|(t, _)| *t <= last) {
        let armed = if t >= cal.min_step {
            ""
        } else {
            "  (not armed)"
        };
        println!("{t:>8} {v:>24.16e}{armed}");
    }
    println!("configured_zeta {:e}", cfg.observer.zeta);
    println!("armed_from      {}", cal.min_step);
    match (cal.crossing_step, cal.suggested_zeta) {
        (Some(t), Some(z)) => {
            println!("crossing_step   {t}");
            println!("suggested_zeta  {z:.3e}");
        }
        _ => println!("crossing_step   -"),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Run {
            config,
            out,
            full_dump,
        } => run(config, out, *full_dump),
        Command::Compare {
            configs,
            csv,
            plot,
            log_scale,
            quantity,
        } => compare(
            configs,
            csv.as_deref(),
            plot.as_deref(),
            *log_scale,
            quantity,
        ),
        Command::CalibrateZeta { config, until } => calibrate(config, *until),
        Command::Version => {
            println!("ieobs {}", env!("CARGO_PKG_VERSION"));
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
