use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::commands::{self, CommandOutput};
use crate::config::{parse_list, GridSpec, InteractionKind, MeterObsSpec, OracleSuite, RunConfig, Scalar, WindowSpec};
use crate::error::{CliError, EXIT_USAGE};

#[derive(Parser, Debug)]
#[command(name = "weakcrit", version, about = "Repeated weak measurements with post-selection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Expectation values, Kraus moduli, Im(weak value) and tau over a phi grid.
    Sweep(Overrides),
    /// Meter trajectory at a single phi.
    Trajectory(Overrides),
    /// Relaxation time over a phi grid.
    Relaxation(Overrides),
    /// Power-law fits of tau near every critical angle.
    Fit(Overrides),
    /// Angles where the imaginary part of the weak value vanishes.
    CriticalAngles(Overrides),
    /// Randomized comparison against the bipartite reference simulation.
    OracleCheck(Overrides),
}

#[derive(Args, Debug, Default)]
pub struct Overrides {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file (standard output if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<Scalar>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<Scalar>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<Scalar>,
    #[arg(long)]
    pub gamma: Option<Scalar>,
    #[arg(long)]
    pub t: Option<Scalar>,
    /// Dimensionless coupling, replacing gamma*t.
    #[arg(long)]
    pub gt: Option<Scalar>,
    /// exact_qubit, first_order or synthetic_quadratic.
    #[arg(long)]
    pub interaction: Option<InteractionKind>,
    /// start:stop:points
    #[arg(long)]
    pub phi_grid: Option<GridSpec>,
    /// Comma-separated iteration counts.
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub meter_dim: Option<usize>,
    /// sigma_x or comma-separated diagonal entries.
    #[arg(long, allow_hyphen_values = true)]
    pub meter_obs: Option<MeterObsSpec>,
    /// rx,ry,rz for a qubit meter, otherwise real amplitudes.
    #[arg(long, allow_hyphen_values = true)]
    pub initial: Option<String>,
    /// lo:hi:per-decade
    #[arg(long)]
    pub window: Option<WindowSpec>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Steps per randomized oracle trial (upper bound).
    #[arg(long)]
    pub steps: Option<usize>,
    /// exact_qubit, first_order or all.
    #[arg(long, value_parser = parse_suite)]
    pub suite: Option<OracleSuite>,
    /// Negate the d coefficient of the exact qubit Kraus operator.
    #[arg(long)]
    pub debug_flip_d: bool,
}

fn parse_suite(s: &str) -> Result<OracleSuite, String> {
    match s {
        "exact_qubit" | "exact-qubit" => Ok(OracleSuite::ExactQubit),
        "first_order" | "first-order" => Ok(OracleSuite::FirstOrder),
        "all" => Ok(OracleSuite::All),
        other => Err(format!("unknown suite '{other}'")),
    }
}

impl Overrides {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut c = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($flag:ident => $field:ident),*) => {$(
                if let Some(v) = self.$flag.clone() { c.$field = v; }
            )*};
        }
        set!(theta => theta_rad, alpha => alpha_rad, gamma => gamma_inv_time, t => time,
             interaction => interaction, phi_grid => phi_grid, meter_obs => meter_obs,
             window => fit_window, seed => seed, trials => trials, steps => oracle_steps,
             suite => oracle_suite);
        if let Some(v) = self.phi {
            c.phi_rad = Some(v);
        }
        if let Some(v) = self.gt {
            c.gt = Some(v);
        }
        if let Some(v) = self.meter_dim {
            c.meter_dim = Some(v);
        }
        if let Some(v) = self.jobs {
            c.jobs = Some(v);
        }
        if let Some(s) = &self.n {
            c.n = s
                .split(',')
                .map(|p| {
                    let v = p.parse::<Scalar>().map_err(|e| CliError::usage(e.to_string()))?.0;
                    if v < 0.0 || v.fract() != 0.0 || v > usize::MAX as f64 {
                        return Err(CliError::usage(format!("iteration count '{p}' is not a non-negative integer")));
                    }
                    Ok(v as usize)
                })
                .collect::<Result<_, _>>()?;
        }
        if let Some(s) = &self.initial {
            c.initial = Some(parse_list(s).map_err(CliError::usage)?);
        }
        if self.debug_flip_d {
            c.debug_flip_d = true;
        }
        c.validate()?;
        Ok(c)
    }
}

fn sidecar_path(out: &Path) -> PathBuf {
    if out.extension().is_some_and(|e| e == "json") {
        let mut s = out.as_os_str().to_owned();
        s.push(".meta.json");
        PathBuf::from(s)
    } else {
        out.with_extension("json")
    }
}

fn dispatch(command: &Command) -> Result<(CommandOutput, Option<PathBuf>), CliError> {
    let (o, f): (&Overrides, fn(&RunConfig) -> Result<CommandOutput, CliError>) = match command {
        Command::Sweep(o) => (o, commands::sweep),
        Command::Trajectory(o) => (o, commands::trajectory),
        Command::Relaxation(o) => (o, commands::relaxation),
        Command::Fit(o) => (o, commands::fit),
        Command::CriticalAngles(o) => (o, commands::critical_angles),
        Command::OracleCheck(o) => (o, commands::oracle_check),
    };
    let cfg = o.resolve()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::new(crate::error::EXIT_RUNTIME, "thread_pool", e.to_string()))?;
    let output = pool.install(|| f(&cfg))?;
    Ok((output, o.out.clone()))
}

/// Runs the CLI with explicit arguments and streams; returns the exit code.
pub fn run(args: Vec<OsString>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let err = CliError::new(EXIT_USAGE, "usage", e.to_string().trim_end().to_string());
            let _ = writeln!(stderr, "{}", err.to_json());
            return err.code;
        }
    };
    let result = dispatch(&cli.command).and_then(|(output, out)| {
        match &out {
            Some(path) => {
                std::fs::write(path, &output.data).map_err(CliError::io)?;
                if let Some(meta) = &output.sidecar {
                    std::fs::write(sidecar_path(path), meta).map_err(CliError::io)?;
                }
            }
            None => stdout.write_all(output.data.as_bytes()).map_err(CliError::io)?,
        }
        match output.failure {
            Some(f) => Err(f),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{}", e.to_json());
            e.code
        }
    }
}
