use anyhow::Context;
use clap::{Parser, ValueEnum};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use su11::algebra::BargmannIndex;
use su11::amplifier::{radial_cutoff, AmplifierSpec, TwoModeQuantumNumbers};
use su11::displacement::{pncs_series, DisplacementParams};
use su11::dynamics::{evolution_trace, tilt_parameters};
use su11::output::{
    spectrum_rows, to_json, wavefunction_rows, write_evolve_csv, write_spectrum_csv,
    write_wavefunction_csv, EvolveMeta, EvolveRecord, EvolveRow, Format, SpectrumRecord,
    StateRecord, WavefunctionRecord,
};
use su11::verify::{run_all, Status, VerifyConfig};
use su11::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    /// Run the verification suite.
    Verify,
    /// Number coherent state amplitudes.
    State,
    /// Amplifier energies.
    Spectrum,
    /// Amplifier eigenfunction on a polar grid, series vs closed form.
    Wavefunction,
    /// Phase trace of an eigenstate under the coherence-preserving Hamiltonian.
    Evolve,
}

/// SU(1,1) number coherent states, tilting and the parametric amplifier.
///
/// The Hamiltonian for `evolve` is `2 omega K0 + chi (e^{-i Phi} K+ + e^{i Phi} K-)`.
/// `wavefunction` uses the amplifier tilt when `--omega` or `--chi` is
/// given, otherwise `--tau` and `--phi`.
#[derive(Debug, Parser)]
#[command(name = "su11", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Bargmann index.
    #[arg(long, default_value_t = 1.0)]
    k: f64,
    /// Level of the number coherent state (radial number for amplifier states).
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    tau: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi: f64,
    /// Pump frequency [default: 1]
    #[arg(long)]
    omega: Option<f64>,
    /// Coupling [default: 0.5]
    #[arg(long, allow_negative_numbers = true)]
    chi: Option<f64>,
    /// Pump phase.
    #[arg(long = "Phi", default_value_t = 0.0, allow_negative_numbers = true)]
    pump_phase: f64,
    /// Angular momentum.
    #[arg(long, default_value_t = 0)]
    m: usize,
    /// Final time.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    t: f64,
    /// Number of time steps in [0, t].
    #[arg(long, default_value_t = 10)]
    steps: usize,
    /// Truncation dimension [default: 128]
    #[arg(long)]
    dim: Option<usize>,
    /// Tolerance [default: 1e-10]; for `verify` it replaces every pinned tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 10)]
    n_max: usize,
    #[arg(long, default_value_t = 40)]
    radial_points: usize,
    #[arg(long, default_value_t = 8)]
    angular_points: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output path; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

const DEFAULT_DIM: usize = 128;
const DEFAULT_TOL: f64 = 1e-10;

enum Failure {
    Verification,
    Args(anyhow::Error),
    Domain(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_domain() {
            Failure::Domain(e.into())
        } else {
            Failure::Args(e.into())
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Args(e)
    }
}

fn writer(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_json(cli: &Cli, json: String) -> anyhow::Result<()> {
    let mut w = writer(&cli.output)?;
    writeln!(w, "{json}")?;
    w.flush()?;
    Ok(())
}

fn emit_csv(cli: &Cli, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> anyhow::Result<()> {
    let mut w = writer(&cli.output)?;
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

fn tolerance(cli: &Cli) -> Result<f64, Failure> {
    let tol = cli.tol.unwrap_or(DEFAULT_TOL);
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "--tol must be positive and finite, got {tol}"
        ))
        .into());
    }
    Ok(tol)
}

fn dimension(cli: &Cli) -> Result<usize, Failure> {
    let dim = cli.dim.unwrap_or(DEFAULT_DIM);
    if dim < 8 {
        return Err(Error::DimensionTooSmall { got: dim, min: 8 }.into());
    }
    Ok(dim)
}

fn amplifier(cli: &Cli) -> Result<AmplifierSpec, Failure> {
    Ok(AmplifierSpec::new(
        cli.omega.unwrap_or(1.0),
        cli.chi.unwrap_or(0.5),
        cli.pump_phase,
    )?)
}

fn cmd_verify(cli: &Cli) -> Result<(), Failure> {
    let cfg = VerifyConfig {
        tol: cli.tol.map(|_| tolerance(cli)).transpose()?,
        dim: cli.dim.map(|_| dimension(cli)).transpose()?,
    };
    let report = run_all(cfg);
    for c in &report.checks {
        eprintln!(
            "[{}] criterion {:>2} {}: residual {:.3e} (tolerance {:.1e})",
            c.status.as_str(),
            c.criterion,
            c.name,
            c.max_residual,
            c.tolerance
        );
    }
    match cli.format {
        Format::Json => emit_json(cli, report.to_json()?)?,
        Format::Csv => emit_csv(cli, |w| report.write_csv(w))?,
    }
    let failed = report
        .checks
        .iter()
        .filter(|c| c.status == Status::Fail)
        .count();
    eprintln!("{} checks, {failed} failed", report.checks.len());
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn cmd_state(cli: &Cli) -> Result<(), Failure> {
    let k = BargmannIndex::new(cli.k)?;
    let p = DisplacementParams::new(cli.tau, cli.phi)?;
    let r = pncs_series(k, cli.n, &p, dimension(cli)?, tolerance(cli)?)?;
    let record = StateRecord::from_pncs(&r);
    match cli.format {
        Format::Json => emit_json(cli, record.to_json()?)?,
        Format::Csv => emit_csv(cli, |w| record.write_csv(w))?,
    }
    Ok(())
}

fn cmd_spectrum(cli: &Cli) -> Result<(), Failure> {
    let rows = spectrum_rows(&amplifier(cli)?, cli.m, cli.n_max)?;
    match cli.format {
        Format::Json => emit_json(cli, to_json(&SpectrumRecord { rows })?)?,
        Format::Csv => emit_csv(cli, |w| write_spectrum_csv(&rows, w))?,
    }
    Ok(())
}

fn cmd_wavefunction(cli: &Cli) -> Result<(), Failure> {
    let q = TwoModeQuantumNumbers::from_radial(cli.n, cli.m);
    let p = if cli.omega.is_some() || cli.chi.is_some() {
        amplifier(cli)?.tilt()?.params
    } else {
        DisplacementParams::new(cli.tau, cli.phi)?
    };
    let tol = tolerance(cli)?;
    let r_max = radial_cutoff(q.n_r, q.m, p.zeta.norm()).sqrt();
    let rows = wavefunction_rows(&q, &p, cli.radial_points, cli.angular_points, r_max, tol)?;
    match cli.format {
        Format::Json => emit_json(cli, to_json(&WavefunctionRecord::new(&q, &p, tol, rows))?)?,
        Format::Csv => emit_csv(cli, |w| write_wavefunction_csv(&rows, w))?,
    }
    Ok(())
}

fn cmd_evolve(cli: &Cli) -> Result<(), Failure> {
    let k = BargmannIndex::new(cli.k)?;
    let h = amplifier(cli)?.hamiltonian();
    let tilt = tilt_parameters(&h)?;
    if !cli.t.is_finite() || cli.steps == 0 {
        return Err(
            Error::InvalidArgument("--t must be finite and --steps positive".into()).into(),
        );
    }
    let times: Vec<f64> = (0..=cli.steps)
        .map(|i| cli.t * i as f64 / cli.steps as f64)
        .collect();
    let trace = evolution_trace(&h, k, cli.n, dimension(cli)?, tolerance(cli)?, &times)?;
    let rows: Vec<EvolveRow> = trace.iter().map(EvolveRow::from).collect();
    match cli.format {
        Format::Json => {
            let meta = EvolveMeta {
                k: k.value(),
                n: cli.n,
                omega_eff: tilt.omega_eff,
                tau: tilt.params.tau,
                phi: tilt.params.phi,
            };
            emit_json(cli, to_json(&EvolveRecord { meta, rows })?)?
        }
        Format::Csv => emit_csv(cli, |w| write_evolve_csv(&rows, w))?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify => cmd_verify(&cli),
        Command::State => cmd_state(&cli),
        Command::Spectrum => cmd_spectrum(&cli),
        Command::Wavefunction => cmd_wavefunction(&cli),
        Command::Evolve => cmd_evolve(&cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Args(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
