//! Command-line front end.
//!
//! Exit codes: 0 success, 2 unreadable or malformed input, 3 invalid
//! parameters or settings, 4 simulation failure. Every failure prints exactly
//! one line on standard error and nothing on standard output.

pub mod format;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::analysis::analyze;
use crate::error::Error;
use crate::linalg::StateSpaceModel;
use crate::models::{build_3dof, build_6dof};
use crate::params::QuadParams;
use crate::rotor_forces::{demix, mix, GeneralizedInput, RotorForces};
use crate::simulator::{simulate, simulate_nonlinear, Integrator, Plant, SimConfig, Trajectory, DEFAULT_DT};
use crate::stabilizer::{design_3dof_gains, design_6dof_gains, GainMatrix, PoleSpec3, PoleSpec6};

use self::format::{fmt_sig, to_json_pretty, write_matrix, write_trajectory_csv};

/// Default closed-loop pole for every chain.
pub const DEFAULT_POLE: f64 = -2.0;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Validation(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Validation(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::NonPositiveParameter(_)
            | Error::NonFiniteParameter(_)
            | Error::InvalidConfig(_)
            | Error::StepCountExceeded { .. }
            | Error::UnstablePoleRequested { .. }
            | Error::PoleCountMismatch { .. }
            | Error::UnpairedComplexPole
            | Error::ZeroInputGain
            | Error::UnsupportedChainOrder(_) => CliError::Validation(msg),
            _ => CliError::Runtime(msg),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "quadss", version, about = "Quadcopter state-space models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Dof {
    #[value(name = "3")]
    Three,
    #[value(name = "6")]
    Six,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Pretty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Open,
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlantKind {
    Linear,
    Nonlinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IntegratorKind {
    Exact,
    Rk4,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the A, B, C, D matrices of a model.
    Model {
        #[arg(long, value_enum)]
        dof: Dof,
        #[arg(long)]
        params: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
    },
    /// Controllability, observability and open-loop stability report (JSON).
    Analyze {
        #[arg(long, value_enum)]
        dof: Dof,
        #[arg(long)]
        params: PathBuf,
    },
    /// Pole-placement feedback gains (JSON).
    Gains {
        #[arg(long, value_enum)]
        dof: Dof,
        #[arg(long)]
        params: PathBuf,
        /// A single pole for every chain, or `chain=p:p[:p:p]` entries.
        #[arg(long, allow_hyphen_values = true)]
        poles: Option<String>,
    },
    /// Simulate and write the trajectory as CSV.
    Sim {
        #[arg(long, value_enum)]
        dof: Dof,
        #[arg(long)]
        params: PathBuf,
        #[arg(long, value_enum, default_value = "open")]
        mode: Mode,
        #[arg(long, value_enum, default_value = "linear")]
        plant: PlantKind,
        #[arg(long, value_enum, default_value = "exact")]
        integrator: IntegratorKind,
        /// Initial state as `label=value` pairs, e.g. `theta=0.01,x=0.5`.
        #[arg(long, default_value = "")]
        x0: String,
        /// Open-loop input as `label=value` pairs; unspecified inputs hold hover.
        #[arg(long, default_value = "")]
        input: String,
        /// Closed-loop poles, see `gains --help`.
        #[arg(long, allow_hyphen_values = true)]
        poles: Option<String>,
        #[arg(long = "t-final")]
        t_final: f64,
        #[arg(long, default_value_t = DEFAULT_DT)]
        dt: f64,
        /// Output CSV path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rotor forces f1..f4 to generalized input u1..u4.
    #[command(allow_negative_numbers = true)]
    Mix {
        #[arg(long)]
        params: PathBuf,
        #[arg(num_args = 4, required = true)]
        values: Vec<f64>,
    },
    /// Generalized input u1..u4 to rotor forces f1..f4.
    #[command(allow_negative_numbers = true)]
    Demix {
        #[arg(long)]
        params: PathBuf,
        #[arg(num_args = 4, required = true)]
        values: Vec<f64>,
    },
}

/// Parses arguments and runs one command, returning the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let rendered = e.to_string();
            let line = rendered.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            let _ = writeln!(stderr, "{line}");
            return 2;
        }
    };

    let mut buffer = Vec::new();
    match execute(cli.command, &mut buffer) {
        Ok(()) => match stdout.write_all(&buffer).and_then(|_| stdout.flush()) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(stderr, "error: cannot write output: {e}");
                2
            }
        },
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}

fn execute(command: Command, out: &mut Vec<u8>) -> CliResult<()> {
    match command {
        Command::Model { dof, params, format } => {
            let model = build_model(dof, &load_params(&params)?)?;
            match format {
                OutputFormat::Json => write_json(out, &model),
                OutputFormat::Pretty => write_pretty(out, &model).map_err(io_error),
            }
        }
        Command::Analyze { dof, params } => {
            let model = build_model(dof, &load_params(&params)?)?;
            write_json(out, &analyze(&model)?)
        }
        Command::Gains { dof, params, poles } => {
            let p = load_params(&params)?;
            write_json(out, &design_gains(dof, &p, poles.as_deref())?)
        }
        Command::Sim {
            dof,
            params,
            mode,
            plant,
            integrator,
            x0,
            input,
            poles,
            t_final,
            dt,
            out: path,
        } => {
            let p = load_params(&params)?;
            let settings = SimSettings {
                dof,
                mode,
                plant,
                integrator,
                x0: &x0,
                input: &input,
                poles: poles.as_deref(),
                t_final,
                dt,
            };
            let traj = run_sim(&p, &settings)?;
            match path {
                Some(path) => {
                    let file = File::create(&path)
                        .map_err(|e| CliError::Input(format!("cannot create {}: {e}", path.display())))?;
                    let mut w = BufWriter::new(file);
                    write_trajectory_csv(&mut w, &traj)
                        .and_then(|_| w.flush())
                        .map_err(io_error)
                }
                None => write_trajectory_csv(out, &traj).map_err(io_error),
            }
        }
        Command::Mix { params, values } => {
            let p = load_params(&params)?;
            let f = RotorForces::from_array(quadruple(&values)?);
            write_quadruple(out, mix(&f, &p).to_array())
        }
        Command::Demix { params, values } => {
            let p = load_params(&params)?;
            let u = GeneralizedInput::from_array(quadruple(&values)?);
            write_quadruple(out, demix(&u, &p).to_array())
        }
    }
}

fn io_error(e: std::io::Error) -> CliError {
    CliError::Input(format!("i/o error: {e}"))
}

fn load_params(path: &Path) -> CliResult<QuadParams> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let p: QuadParams = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("cannot parse {}: {e}", path.display())))?;
    Ok(p.validate()?)
}

fn build_model(dof: Dof, p: &QuadParams) -> CliResult<StateSpaceModel> {
    Ok(match dof {
        Dof::Three => build_3dof(p)?,
        Dof::Six => build_6dof(p)?,
    })
}

fn write_json<T: serde::Serialize>(out: &mut Vec<u8>, value: &T) -> CliResult<()> {
    let text = to_json_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    out.extend_from_slice(text.as_bytes());
    Ok(())
}

fn write_pretty(out: &mut dyn Write, m: &StateSpaceModel) -> std::io::Result<()> {
    writeln!(out, "n = {}, p = {}, q = {}", m.n(), m.p(), m.q())?;
    let blocks = [
        ("A", m.a(), m.state_labels(), m.state_labels()),
        ("B", m.b(), m.state_labels(), m.input_labels()),
        ("C", m.c(), m.output_labels(), m.state_labels()),
        ("D", m.d(), m.output_labels(), m.input_labels()),
    ];
    for (name, matrix, rows, cols) in blocks {
        writeln!(out)?;
        write_matrix(out, name, matrix, rows, cols)?;
    }
    Ok(())
}

fn quadruple(values: &[f64]) -> CliResult<[f64; 4]> {
    let arr: [f64; 4] = values
        .try_into()
        .map_err(|_| CliError::Input(format!("expected 4 numbers, got {}", values.len())))?;
    if arr.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Input("inputs must be finite".into()));
    }
    Ok(arr)
}

fn write_quadruple(out: &mut Vec<u8>, values: [f64; 4]) -> CliResult<()> {
    let text: Vec<String> = values.iter().map(|&v| fmt_sig(v, 12)).collect();
    writeln!(out, "{}", text.join(" ")).map_err(io_error)
}

/// Parses `label=value` pairs separated by commas (or whitespace) into a
/// vector initialised with `defaults`.
fn parse_assignments(spec: &str, labels: &[String], defaults: Vec<f64>) -> CliResult<Vec<f64>> {
    let mut values = defaults;
    for item in spec.split([',', ' ']).map(str::trim).filter(|s| !s.is_empty()) {
        let (label, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("expected label=value, got `{item}`")))?;
        let idx = labels
            .iter()
            .position(|l| l == label.trim())
            .ok_or_else(|| CliError::Input(format!("unknown label `{}` (expected one of {})", label.trim(), labels.join(", "))))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("`{}` is not a number", value.trim())))?;
        if !v.is_finite() {
            return Err(CliError::Input(format!("value for `{label}` must be finite")));
        }
        values[idx] = v;
    }
    Ok(values)
}

fn parse_pole(text: &str) -> CliResult<Complex64> {
    Complex64::from_str(text.trim()).map_err(|_| CliError::Input(format!("`{text}` is not a pole")))
}

/// Pole spec: either a single pole applied everywhere, or comma-separated
/// `chain=p1:p2[:p3:p4]` entries overriding the default for named chains.
fn parse_pole_spec(spec: Option<&str>, chains: &[&str]) -> CliResult<Vec<Option<Vec<Complex64>>>> {
    let mut out = vec![None; chains.len()];
    let Some(spec) = spec.map(str::trim).filter(|s| !s.is_empty()) else {
        return Ok(out);
    };
    if !spec.contains('=') {
        let pole = parse_pole(spec)?;
        return Ok(vec![Some(vec![pole]); chains.len()]);
    }
    for entry in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, poles) = entry
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("expected chain=poles, got `{entry}`")))?;
        let idx = chains
            .iter()
            .position(|c| *c == name.trim())
            .ok_or_else(|| CliError::Input(format!("unknown chain `{}` (expected one of {})", name.trim(), chains.join(", "))))?;
        out[idx] = Some(poles.split(':').map(parse_pole).collect::<CliResult<_>>()?);
    }
    Ok(out)
}

/// Expands a single-pole shorthand to the chain order; explicit lists pass through.
fn chain_poles(parsed: &Option<Vec<Complex64>>, order: usize, single: bool) -> Vec<Complex64> {
    match parsed {
        None => vec![Complex64::new(DEFAULT_POLE, 0.0); order],
        Some(p) if single => vec![p[0]; order],
        Some(p) => p.clone(),
    }
}

fn design_gains(dof: Dof, p: &QuadParams, poles: Option<&str>) -> CliResult<GainMatrix> {
    let single = poles.is_some_and(|s| !s.contains('='));
    match dof {
        Dof::Six => {
            let parsed = parse_pole_spec(poles, &["z", "roll", "pitch", "yaw"])?;
            let spec = PoleSpec6 {
                z: chain_poles(&parsed[0], 2, single),
                roll: chain_poles(&parsed[1], 4, single),
                pitch: chain_poles(&parsed[2], 4, single),
                yaw: chain_poles(&parsed[3], 2, single),
            };
            Ok(design_6dof_gains(p, &spec)?)
        }
        Dof::Three => {
            let parsed = parse_pole_spec(poles, &["phi", "theta", "psi"])?;
            let spec = PoleSpec3 {
                phi: chain_poles(&parsed[0], 2, single),
                theta: chain_poles(&parsed[1], 2, single),
                psi: chain_poles(&parsed[2], 2, single),
            };
            Ok(design_3dof_gains(p, &spec)?)
        }
    }
}

struct SimSettings<'a> {
    dof: Dof,
    mode: Mode,
    plant: PlantKind,
    integrator: IntegratorKind,
    x0: &'a str,
    input: &'a str,
    poles: Option<&'a str>,
    t_final: f64,
    dt: f64,
}

fn run_sim(p: &QuadParams, s: &SimSettings) -> CliResult<Trajectory> {
    if s.plant == PlantKind::Nonlinear && s.dof == Dof::Three {
        return Err(CliError::Input("the nonlinear plant requires --dof 6".into()));
    }
    if s.mode == Mode::Open && s.poles.is_some() {
        return Err(CliError::Input("--poles only applies to --mode closed".into()));
    }
    if s.mode == Mode::Closed && !s.input.trim().is_empty() {
        return Err(CliError::Input("--input only applies to --mode open".into()));
    }

    let model = build_model(s.dof, p)?;
    let x0 = parse_assignments(s.x0, model.state_labels(), vec![0.0; model.n()])?;
    // hover-equilibrium input: zero deviation in U space, m·g/4 per rotor in F space
    let reference = match s.dof {
        Dof::Six => vec![0.0; 4],
        Dof::Three => RotorForces::hover(p).to_array().to_vec(),
    };
    let gains = match s.mode {
        Mode::Closed => Some(design_gains(s.dof, p, s.poles)?),
        Mode::Open => None,
    };
    let open_input = parse_assignments(s.input, model.input_labels(), reference.clone())?;
    let input_fn = |_: f64, x: &[f64]| -> Vec<f64> {
        match &gains {
            Some(g) => g.feedback(&reference, x).expect("gain matches model"),
            None => open_input.clone(),
        }
    };

    let plant = match (s.plant, s.dof) {
        (PlantKind::Nonlinear, _) => Plant::Nonlinear6dof,
        (PlantKind::Linear, Dof::Six) => Plant::Linear6dof,
        (PlantKind::Linear, Dof::Three) => Plant::Linear3dof,
    };
    let integrator = match s.integrator {
        IntegratorKind::Exact => Integrator::ExactZoh,
        IntegratorKind::Rk4 => Integrator::Rk4,
    };
    let cfg = SimConfig::new(s.t_final, plant).with_dt(s.dt).with_integrator(integrator);

    let traj = match plant {
        Plant::Nonlinear6dof => {
            simulate_nonlinear(
                p,
                &x0,
                |t, x| {
                    let u = input_fn(t, x);
                    demix(&GeneralizedInput::from_array([u[0], u[1], u[2], u[3]]), p)
                },
                &cfg,
            )?
        }
        _ => simulate(&model, &x0, input_fn, &cfg)?,
    };
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn assignments() {
        let l = labels(&["x", "theta"]);
        assert_eq!(parse_assignments("theta=0.01", &l, vec![0.0; 2]).unwrap(), vec![0.0, 0.01]);
        assert_eq!(parse_assignments("x=1, theta=-2", &l, vec![5.0; 2]).unwrap(), vec![1.0, -2.0]);
        assert_eq!(parse_assignments("", &l, vec![5.0; 2]).unwrap(), vec![5.0; 2]);
        assert!(matches!(parse_assignments("q=1", &l, vec![0.0; 2]), Err(CliError::Input(_))));
        assert!(matches!(parse_assignments("x", &l, vec![0.0; 2]), Err(CliError::Input(_))));
        assert!(matches!(parse_assignments("x=abc", &l, vec![0.0; 2]), Err(CliError::Input(_))));
        assert!(matches!(parse_assignments("x=inf", &l, vec![0.0; 2]), Err(CliError::Input(_))));
    }

    #[test]
    fn pole_specs() {
        let chains = ["z", "yaw"];
        let parsed = parse_pole_spec(Some("-3"), &chains).unwrap();
        assert_eq!(parsed[1], Some(vec![Complex64::new(-3.0, 0.0)]));
        let parsed = parse_pole_spec(Some("yaw=-1+2i:-1-2i"), &chains).unwrap();
        assert_eq!(parsed[0], None);
        assert_eq!(
            parsed[1],
            Some(vec![Complex64::new(-1.0, 2.0), Complex64::new(-1.0, -2.0)])
        );
        assert!(parse_pole_spec(Some("roll=-1:-2"), &chains).is_err());
        assert!(parse_pole_spec(Some("banana"), &chains).is_err());
    }

    #[test]
    fn error_classification() {
        assert_eq!(CliError::from(Error::NonPositiveParameter("m")).exit_code(), 3);
        assert_eq!(CliError::from(Error::NonFiniteState { t: 1.0 }).exit_code(), 4);
        assert_eq!(CliError::Input(String::new()).exit_code(), 2);
    }
}
