use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use zeno_cli::config::{self, Backend, CrossCheck, EstimateInputs, InitialSpec, SimulateConfig, SweepConfig};
use zeno_cli::{cmd_estimate, cmd_simulate, cmd_sweep, CliError, Format, Report};

#[derive(Parser)]
#[command(name = "zeno", version, about = "Stability maps and simulations of a periodically switched two-mode system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a grid of (Γτ₁, Ωτ₂) points.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        gamma_min: Option<f64>,
        #[arg(long)]
        gamma_max: Option<f64>,
        #[arg(long)]
        gamma_steps: Option<usize>,
        #[arg(long)]
        omega_min: Option<f64>,
        #[arg(long)]
        omega_max: Option<f64>,
        #[arg(long)]
        omega_steps: Option<usize>,
        /// Marginal band half-width.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Also run the Gaussian simulator from vacuum at each point.
        #[arg(long)]
        cross_check: bool,
        /// Periods for the cross-check (implies --cross-check).
        #[arg(long)]
        cross_check_periods: Option<usize>,
    },
    /// Photon-number time series for one schedule.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        tau1: Option<f64>,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        tau2: Option<f64>,
        /// Sets gamma = value / tau1.
        #[arg(long, conflicts_with = "gamma")]
        gamma_tau1: Option<f64>,
        /// Sets omega = value / tau2.
        #[arg(long, conflicts_with = "omega")]
        omega_tau2: Option<f64>,
        #[arg(long)]
        periods: Option<usize>,
        #[arg(long)]
        modes: Option<usize>,
        /// `vacuum` or JSON such as {"coherent": [[0.5, 0.0], [0.0, 0.0]]}.
        #[arg(long)]
        initial: Option<String>,
        #[arg(long, value_enum)]
        backend: Option<Backend>,
        /// Per-mode Fock cutoff.
        #[arg(long)]
        cutoff: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Coupling constant and Γτ₁ from material parameters (MKS).
    Estimate {
        #[command(flatten)]
        common: Common,
        /// Impedance, ohm.
        #[arg(long)]
        eta: Option<f64>,
        /// χ(2), C·V⁻².
        #[arg(long)]
        chi2: Option<f64>,
        /// s⁻¹.
        #[arg(long)]
        omega_a: Option<f64>,
        /// s⁻¹.
        #[arg(long)]
        omega_b: Option<f64>,
        /// Pump intensity, W·m⁻².
        #[arg(long)]
        intensity: Option<f64>,
        /// Crystal length, m.
        #[arg(long)]
        length: Option<f64>,
    },
}

fn base<T: DeserializeOwned + Default>(common: &Common) -> Result<T, CliError> {
    common.config.as_deref().map_or_else(|| Ok(T::default()), config::load)
}

fn set<T>(field: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *field = v;
    }
}

fn run(command: Command) -> Result<(Report, Common), CliError> {
    match command {
        Command::Sweep {
            common,
            gamma_min,
            gamma_max,
            gamma_steps,
            omega_min,
            omega_max,
            omega_steps,
            epsilon,
            cross_check,
            cross_check_periods,
        } => {
            let mut c: SweepConfig = base(&common)?;
            set(&mut c.gamma_tau1.min, gamma_min);
            set(&mut c.gamma_tau1.max, gamma_max);
            set(&mut c.gamma_tau1.steps, gamma_steps);
            set(&mut c.omega_tau2.min, omega_min);
            set(&mut c.omega_tau2.max, omega_max);
            set(&mut c.omega_tau2.steps, omega_steps);
            set(&mut c.epsilon, epsilon);
            if cross_check || cross_check_periods.is_some() {
                let cc = c.cross_check.get_or_insert_with(CrossCheck::default);
                set(&mut cc.periods, cross_check_periods);
            }
            Ok((cmd_sweep(&c)?, common))
        }
        Command::Simulate {
            common,
            gamma,
            tau1,
            omega,
            tau2,
            gamma_tau1,
            omega_tau2,
            periods,
            modes,
            initial,
            backend,
            cutoff,
            epsilon,
        } => {
            let mut c: SimulateConfig = base(&common)?;
            set(&mut c.tau1, tau1);
            set(&mut c.tau2, tau2);
            set(&mut c.gamma, gamma);
            set(&mut c.omega, omega);
            if let Some(gt) = gamma_tau1 {
                if c.tau1 <= 0.0 && gt != 0.0 {
                    return Err(CliError::usage("--gamma-tau1 needs a positive tau1"));
                }
                c.gamma = if gt == 0.0 { 0.0 } else { gt / c.tau1 };
            }
            if let Some(ot) = omega_tau2 {
                if c.tau2 <= 0.0 && ot != 0.0 {
                    return Err(CliError::usage("--omega-tau2 needs a positive tau2"));
                }
                c.omega = if ot == 0.0 { 0.0 } else { ot / c.tau2 };
            }
            set(&mut c.periods, periods);
            set(&mut c.modes, modes);
            if let Some(text) = initial {
                c.initial = InitialSpec::parse(&text)?;
            }
            set(&mut c.backend, backend);
            if cutoff.is_some() {
                c.cutoff = cutoff;
            }
            set(&mut c.epsilon, epsilon);
            Ok((cmd_simulate(c)?, common))
        }
        Command::Estimate { common, eta, chi2, omega_a, omega_b, intensity, length } => {
            let mut c: EstimateInputs = base(&common)?;
            set(&mut c.eta, eta);
            set(&mut c.chi2, chi2);
            set(&mut c.omega_a, omega_a);
            set(&mut c.omega_b, omega_b);
            set(&mut c.intensity, intensity);
            set(&mut c.length, length);
            Ok((cmd_estimate(&c)?, common))
        }
    }
}

fn emit(report: &Report, common: &Common) -> std::io::Result<()> {
    let text = report.render(common.format);
    match &common.out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok((report, common)) => match emit(&report, &common) {
            Ok(()) => {
                if report.status.is_guard_trip() {
                    eprintln!("zeno: numerical guard tripped ({:?}); output is partial", report.status);
                }
                report.exit_code()
            }
            Err(e) => {
                eprintln!("zeno: {e}");
                2
            }
        },
        Err(e) => {
            eprintln!("zeno: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
