//! Command-line front end for entangled-fuel photonic engine sweeps.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use photonic_engine::sweep::{
    cycle_svg, preset_config, run_convergence_study, run_cycle_preset, run_sweep, sweep_svg, PresetKind,
    RowFlag, SweepConfig, PRESETS,
};
use photonic_engine::Error;

const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

#[derive(Parser)]
#[command(name = "photonic-engine", version, about = "Photonic Carnot-like engine fuelled by entangled atom pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the requested quantities over a parameter grid.
    Sweep(RunArgs),
    /// Trace the four-stroke engine cycle for every grid point.
    Cycle(RunArgs),
    /// Truncation, expansion-order and interaction-time studies.
    Converge(RunArgs),
    /// Built-in configurations.
    Presets {
        #[command(subcommand)]
        action: PresetsAction,
    },
}

#[derive(Subcommand)]
enum PresetsAction {
    /// List preset names, kinds and descriptions.
    List,
    /// Print the configuration of a preset.
    Show { name: String },
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file (TOML).
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in preset name (see `presets list`).
    #[arg(long)]
    preset: Option<String>,
    /// Output CSV path; defaults to `outputs.csv` of the config, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Also write an SVG rendering next to the CSV (or to `outputs.svg`).
    #[arg(long)]
    svg: bool,
    /// Quadrature nodes per isothermal stroke.
    #[arg(long)]
    steps: Option<usize>,
    /// Override a configuration key, e.g. `--set physics.g_tau=0.05`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

/// What went wrong, mapped onto the process exit code.
enum Failure {
    Config(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Config(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

impl RunArgs {
    fn load(&self) -> Result<SweepConfig, Failure> {
        let mut overrides = self.overrides.clone();
        if let Some(t) = self.threads {
            overrides.push(format!("run.threads={t}"));
        }
        if let Some(s) = self.steps {
            overrides.push(format!("run.steps={s}"));
        }
        let cfg = match (&self.config, &self.preset) {
            (Some(path), _) => SweepConfig::load(path, &overrides)?,
            (None, Some(name)) => preset_config(name, &overrides)?,
            (None, None) => return Err(Failure::Config("either --config or --preset is required".into())),
        };
        Ok(cfg)
    }

    fn csv_path(&self, cfg: &SweepConfig) -> Option<PathBuf> {
        self.out.clone().or_else(|| cfg.outputs.csv.clone())
    }

    fn svg_path(&self, cfg: &SweepConfig) -> Result<Option<PathBuf>, Failure> {
        if !self.svg {
            return Ok(None);
        }
        match (&cfg.outputs.svg, self.csv_path(cfg)) {
            (Some(p), _) => Ok(Some(p.clone())),
            (None, Some(csv)) => Ok(Some(csv.with_extension("svg"))),
            (None, None) => Err(Failure::Config("--svg needs --out or outputs.svg".into())),
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => {
            fs::write(p, text).map_err(|e| Failure::Config(format!("cannot write {}: {e}", p.display())))?;
            info!("wrote {}", p.display());
            Ok(())
        }
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Config(format!("cannot write to stdout: {e}"))),
    }
}

/// Reports go to stdout when the data went to a file, otherwise to stderr.
fn report(csv_to_file: bool, text: &str) {
    if csv_to_file {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
}

fn sweep(args: &RunArgs) -> Result<u8, Failure> {
    let cfg = args.load()?;
    let svg = args.svg_path(&cfg)?;
    let csv_path = args.csv_path(&cfg);
    let out = run_sweep(&cfg)?;
    write_output(csv_path.as_deref(), &out.csv)?;
    if let Some(p) = &svg {
        write_output(Some(p), &sweep_svg(&cfg, &out)?)?;
    }
    let count = |f: RowFlag| out.rows.iter().filter(|r| r.flag == f).count();
    let (above, failed) = (count(RowFlag::AboveThreshold), count(RowFlag::Failed));
    report(
        csv_path.is_some(),
        &format!("rows: {}, ok: {}, above_threshold: {above}, failed: {failed}\n", out.rows.len(), count(RowFlag::Ok)),
    );
    if !out.rows.is_empty() && failed == out.rows.len() {
        return Err(Failure::Numerical("every grid point failed".into()));
    }
    Ok(if above + failed > 0 { EXIT_PARTIAL } else { 0 })
}

fn cycle(args: &RunArgs) -> Result<u8, Failure> {
    let cfg = args.load()?;
    let svg = args.svg_path(&cfg)?;
    let csv_path = args.csv_path(&cfg);
    let out = run_cycle_preset(&cfg)?;
    for run in &out.runs {
        if let Err(e) = &run.result {
            warn!("cycle at {:?} failed: {e}", run.point);
        }
    }
    if out.failures() == out.runs.len() {
        return Err(Failure::Numerical("every cycle failed".into()));
    }
    write_output(csv_path.as_deref(), &out.csv)?;
    if let Some(p) = &svg {
        write_output(Some(p), &cycle_svg(&out))?;
    }
    report(csv_path.is_some(), &out.summary);
    Ok(if out.failures() > 0 { EXIT_PARTIAL } else { 0 })
}

fn converge(args: &RunArgs) -> Result<u8, Failure> {
    let cfg = args.load()?;
    if args.svg {
        warn!("--svg is not supported for convergence studies; ignoring");
    }
    let csv_path = args.csv_path(&cfg);
    let out = run_convergence_study(&cfg)?;
    write_output(csv_path.as_deref(), &out.csv)?;
    report(csv_path.is_some(), &format!("order slope: {:.4}\n", out.slope));
    Ok(0)
}

fn presets(action: &PresetsAction) -> Result<u8, Failure> {
    match action {
        PresetsAction::List => {
            for p in PRESETS {
                let kind = match p.kind {
                    PresetKind::Sweep => "sweep",
                    PresetKind::Cycle => "cycle",
                    PresetKind::Converge => "converge",
                };
                println!("{:<10} {:<9} {}", p.name, kind, p.description);
            }
        }
        PresetsAction::Show { name } => print!("{}", preset_config(name, &[])?.to_toml()?),
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sweep(args) => sweep(args),
        Command::Cycle(args) => cycle(args),
        Command::Converge(args) => converge(args),
        Command::Presets { action } => presets(action),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
