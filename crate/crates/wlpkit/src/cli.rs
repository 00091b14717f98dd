//! Command-line front end.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wlpkit_core::em_models::{access_stub, via_block_two_port};
use wlpkit_core::geometry::validate;
use wlpkit_core::network::{cascade_all, mag_db, to_display, SParam, TwoPortNetwork, DEFAULT_Z_REF};
use wlpkit_core::parasitics::embed;
use wlpkit_core::sweep::{argmax, trend_signs, Metric, SweepPlan, CappedLine};
use wlpkit_core::varactor::{cv_sweep, equilibrium, meander_stiffness, pull_in_voltage, varactor_two_port};
use wlpkit_core::Error;

use crate::config::{ConfigError, Resolved, RunConfig, VaractorSpec};
use crate::touchstone::{self, DataFormat, Options, Touchstone, TouchstoneError};
use crate::{export, parallel};

#[derive(Debug, Parser)]
#[command(name = "wlpkit", version, about = "RF modelling of wafer-level-packaged lines and MEMS varactors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a configuration against design rules.
    Validate { config: PathBuf },
    /// Run the configured grid sweep and trend check.
    Sweep {
        config: PathBuf,
        /// Worker threads (defaults to the number of CPUs).
        #[arg(long)]
        workers: Option<usize>,
        #[arg(short, long)]
        output_dir: Option<PathBuf>,
    },
    /// Build the uncapped and capped device networks.
    Compose {
        config: PathBuf,
        /// Measured or simulated via block to use instead of the model.
        #[arg(long)]
        via_sn: Option<PathBuf>,
        #[arg(short, long)]
        output_dir: Option<PathBuf>,
    },
    /// Touchstone utilities.
    Touchstone {
        #[command(subcommand)]
        action: TouchstoneCmd,
    },
    /// MEMS varactor utilities.
    Varactor {
        #[command(subcommand)]
        action: VaractorCmd,
    },
}

#[derive(Debug, Subcommand)]
pub enum TouchstoneCmd {
    /// Rewrite a file in another data format.
    Convert {
        input: PathBuf,
        output: PathBuf,
        #[arg(long)]
        format: DataFormat,
    },
}

#[derive(Debug, Subcommand)]
pub enum VaractorCmd {
    /// C-V curve and pull-in report.
    Cv {
        config: PathBuf,
        #[arg(short, long)]
        output_dir: Option<PathBuf>,
    },
}

impl clap::ValueEnum for DataFormat {
    fn value_variants<'a>() -> &'a [Self] {
        &DataFormat::ALL
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        let lower = match self {
            DataFormat::Ri => "ri",
            DataFormat::Ma => "ma",
            DataFormat::Db => "db",
        };
        Some(clap::builder::PossibleValue::new(self.label()).alias(lower))
    }
}

/// Failure classes and their exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Exit 1.
    Config(String),
    /// Exit 2.
    Validation(String),
    /// Exit 3.
    Numerical(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Validation(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let m = e.to_string();
        match e {
            Error::InvalidInput(_)
            | Error::InvalidGeometry(_)
            | Error::DegenerateGeometry(_)
            | Error::AllCellsInvalid
            | Error::TooFewPoints(_) => Failure::Validation(m),
            Error::UnknownPreset(_)
            | Error::UnknownDof(_)
            | Error::InvalidGrid(_)
            | Error::GridMismatch
            | Error::ReferenceMismatch(..)
            | Error::FrequencyNotOnGrid(_) => Failure::Config(m),
            Error::SingularConversion(_)
            | Error::IllConditionedFit(_)
            | Error::EmptyTable
            | Error::Numerical(_) => Failure::Numerical(m),
        }
    }
}

impl From<TouchstoneError> for Failure {
    fn from(e: TouchstoneError) -> Self {
        match e {
            TouchstoneError::Network(inner) => inner.into(),
            other => Failure::Config(other.to_string()),
        }
    }
}

/// Parse arguments, run, and map the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { config } => cmd_validate(&config),
        Command::Sweep { config, workers, output_dir } => cmd_sweep(&config, workers, output_dir),
        Command::Compose { config, via_sn, output_dir } => cmd_compose(&config, via_sn, output_dir),
        Command::Touchstone { action: TouchstoneCmd::Convert { input, output, format } } => {
            cmd_convert(&input, &output, format)
        }
        Command::Varactor { action: VaractorCmd::Cv { config, output_dir } } => cmd_cv(&config, output_dir),
    }
}

fn load(path: &Path) -> Result<(RunConfig, Resolved), Failure> {
    let cfg = RunConfig::load(path)?;
    let r = cfg.resolve()?;
    Ok((cfg, r))
}

/// Run design-rule checks, print findings, fail on errors.
fn checked(r: &Resolved) -> Result<(), Failure> {
    let report = validate(&r.cpw, &r.stack, &r.dof);
    for f in &report.findings {
        eprintln!("{}[{}]: {}", f.severity, f.code, f.message);
    }
    if report.has_errors() {
        return Err(Failure::Validation(format!(
            "{} design-rule error(s)",
            report.errors().count()
        )));
    }
    Ok(())
}

fn out_dir(cfg: &RunConfig, config: &Path, flag: Option<PathBuf>) -> Result<PathBuf, Failure> {
    let dir = flag.unwrap_or_else(|| cfg.output_dir(config));
    std::fs::create_dir_all(&dir).map_err(|e| Failure::Config(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn write(dir: &Path, name: &str, body: &str) -> Result<(), Failure> {
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn cmd_validate(config: &Path) -> Result<(), Failure> {
    let (_, r) = load(config)?;
    let report = validate(&r.cpw, &r.stack, &r.dof);
    for f in &report.findings {
        println!("{}[{}]: {}", f.severity, f.code, f.message);
    }
    if report.has_errors() {
        return Err(Failure::Validation(format!("{} design-rule error(s)", report.errors().count())));
    }
    println!("ok ({} warning(s))", report.warnings().count());
    Ok(())
}

fn cmd_sweep(config: &Path, workers: Option<usize>, dir: Option<PathBuf>) -> Result<(), Failure> {
    let (cfg, r) = load(config)?;
    let spec = cfg
        .sweep
        .clone()
        .ok_or_else(|| Failure::Config("config has no `sweep` section".into()))?;
    checked(&r)?;
    let f = spec.objective_frequency_hz;
    if cfg.frequency.is_some() {
        cfg.grid()?.index_of(f)?;
    }
    let dir = out_dir(&cfg, config, dir)?;
    let workers = workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1);

    if !spec.axes.is_empty() {
        let plan = SweepPlan::new(&r.cpw, &r.stack, &r.dof, &spec.axes, f)?;
        eprintln!("sweeping {} cells on {workers} worker(s)", plan.len());
        let table = parallel::run(&plan, &CappedLine, workers)?;
        let best = argmax(&table, Metric::S21Db)?;
        let names: Vec<String> = table.axes.iter().map(|a| a.dof.to_string()).collect();
        let at: Vec<String> = names.iter().zip(&best.coords).map(|(n, v)| format!("{n}={v}")).collect();
        if let Some(m) = best.merit() {
            eprintln!("best |S21| {:.4} dB at {}", m.s21_db, at.join(", "));
        }
        write(&dir, "sweep.csv", &export::sweep_csv(&table))?;
    }
    if let Some(t) = &spec.trend {
        let report = trend_signs(&r.cpw, &r.stack, &r.dof, &t.dofs, t.points_per_axis, f)?;
        for e in &report.entries {
            eprintln!("trend {}: expected {} observed {}", e.dof, e.expected, e.observed);
        }
        write(&dir, "trend.csv", &export::trend_csv(&report))?;
    }
    Ok(())
}

/// Intrinsic varactor wrapped in its parasitic shell.
fn device(cfg: &RunConfig, grid: &wlpkit_core::network::FrequencyGrid) -> Result<TwoPortNetwork, Failure> {
    let Some(v) = &cfg.varactor else {
        return Ok(TwoPortNetwork::through(grid.clone(), DEFAULT_Z_REF)?);
    };
    let k = meander_stiffness(&v.meander)?;
    let op = equilibrium(&v.plate, k, v.bias)?;
    let intrinsic = varactor_two_port(&op, v.loss_conductance, grid, DEFAULT_Z_REF, v.topology)?;
    Ok(embed(&intrinsic, &cfg.parasitics.unwrap_or_default())?)
}

fn cmd_compose(config: &Path, via_sn: Option<PathBuf>, dir: Option<PathBuf>) -> Result<(), Failure> {
    let (cfg, r) = load(config)?;
    checked(&r)?;
    let grid = cfg.grid()?;
    let dir = out_dir(&cfg, config, dir)?;
    let uncapped = device(&cfg, &grid)?;
    let (via_in, via_out) = match via_sn {
        Some(path) => {
            let n = read_two_port(&path)?;
            if !n.grid().matches(&grid) {
                return Err(Failure::Config(format!(
                    "{} does not use the configured frequency grid",
                    path.display()
                )));
            }
            let out = n.flipped();
            (n, out)
        }
        None => {
            let n = via_block_two_port(&r.dof, &r.stack, &access_stub(&r.cpw), &grid)?;
            let out = n.flipped();
            (n, out)
        }
    };
    let capped = cascade_all(&[&via_in, &uncapped, &via_out])?;

    let opts = Options { format: DataFormat::Ri, ..Options::default() };
    for (name, n) in [("uncapped", &uncapped), ("capped", &capped)] {
        write(&dir, &format!("{name}.s2p"), &touchstone::write(n, opts))?;
        for p in [SParam::S11, SParam::S21] {
            write(&dir, &format!("{name}_{}.csv", p.name()), &export::display_csv(&to_display(n, p)))?;
        }
    }
    let delta = |i: usize| (mag_db(capped.s()[i].s21) - mag_db(uncapped.s()[i].s21)).abs();
    let worst = (0..grid.len()).map(delta).fold(0.0, f64::max);
    eprintln!("max |dS21| = {worst:.4} dB");
    if let Ok(i) = grid.index_of(8e9) {
        eprintln!("|dS21| at 8 GHz = {:.4} dB", delta(i));
    }
    Ok(())
}

fn read_two_port(path: &Path) -> Result<TwoPortNetwork, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    let ports = touchstone::ports_from_extension(path).unwrap_or(2);
    touchstone::parse(&text, ports)
        .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
        .into_two_port()
        .ok_or_else(|| Failure::Config(format!("{} is not a two-port file", path.display())))
}

fn cmd_convert(input: &Path, output: &Path, format: DataFormat) -> Result<(), Failure> {
    let text = std::fs::read_to_string(input)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", input.display())))?;
    let ports = touchstone::ports_from_extension(input).unwrap_or(2);
    let ctx = |e: TouchstoneError| Failure::Config(format!("{}: {e}", input.display()));
    let opts = Options { format, ..touchstone::read_options(&text).map_err(ctx)? };
    let body = match touchstone::parse(&text, ports).map_err(ctx)? {
        Touchstone::TwoPort(n) => touchstone::write(&n, opts),
        Touchstone::OnePort(n) => touchstone::write_one_port(&n, opts),
    };
    std::fs::write(output, body)
        .map_err(|e| Failure::Config(format!("cannot write {}: {e}", output.display())))?;
    Ok(())
}

fn cmd_cv(config: &Path, dir: Option<PathBuf>) -> Result<(), Failure> {
    let cfg = RunConfig::load(config)?;
    let v: VaractorSpec = cfg
        .varactor
        .clone()
        .ok_or_else(|| Failure::Config("config has no `varactor` section".into()))?;
    let dir = out_dir(&cfg, config, dir)?;
    let k = meander_stiffness(&v.meander)?;
    let v_pi = pull_in_voltage(&v.plate, k)?;
    let points = cv_sweep(&v.plate, k, &v.biases)?;
    write(&dir, "cv.csv", &export::cv_csv(&points))?;
    let report = format!(
        "stiffness_n_per_m,pull_in_voltage_v,pull_in_displacement_m,up_capacitance_f,down_capacitance_f\n{},{},{},{},{}\n",
        export::sig(k, 9),
        export::sig(v_pi, 9),
        export::sig(v.plate.gap / 3.0, 9),
        export::sig(v.plate.up_capacitance(), 9),
        export::sig(v.plate.down_capacitance(), 9),
    );
    write(&dir, "pull_in.csv", &report)?;
    eprintln!("pull-in at {v_pi:.4} V");
    Ok(())
}
