//! Time-domain propagation of the linear models and of a nonlinear reference
//! plant.
//!
//! Inputs are sampled at the start of every step and held for its duration.
//! The exact integrator uses the nilpotency of the paper models, so the
//! discrete propagator is a finite sum. On the same models RK4 with a held
//! input is also exact, which makes the two integrators a mutual cross-check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, StateSpaceModel};
use crate::models::{idx6, DOF6_INPUT_LABELS, DOF6_OUTPUT_LABELS, DOF6_STATE_LABELS};
use crate::params::QuadParams;
use crate::rotor_forces::{mix, pitch_torque, roll_torque, total_thrust, yaw_torque, RotorForces};

pub const DEFAULT_DT: f64 = 1e-3;
pub const MAX_STEPS: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    ExactZoh,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Plant {
    Linear3dof,
    Linear6dof,
    Nonlinear6dof,
}

impl Plant {
    fn state_count(self) -> usize {
        match self {
            Plant::Linear3dof => 6,
            Plant::Linear6dof | Plant::Nonlinear6dof => 12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub t_final: f64,
    pub integrator: Integrator,
    pub plant: Plant,
}

impl SimConfig {
    pub fn new(t_final: f64, plant: Plant) -> Self {
        Self {
            dt: DEFAULT_DT,
            t_final,
            integrator: Integrator::ExactZoh,
            plant,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_integrator(mut self, integrator: Integrator) -> Self {
        self.integrator = integrator;
        self
    }

    /// Number of steps, `⌈t_final / dt⌉`, after validating the config.
    pub fn step_count(&self) -> Result<usize> {
        if !(self.dt.is_finite() && self.t_final.is_finite()) {
            return Err(Error::InvalidConfig("dt and t_final must be finite".into()));
        }
        if self.dt <= 0.0 || self.dt > self.t_final {
            return Err(Error::InvalidConfig(format!(
                "need 0 < dt <= t_final, got dt = {}, t_final = {}",
                self.dt, self.t_final
            )));
        }
        let ratio = self.t_final / self.dt;
        // absorb representation error so that e.g. 1.0 / 0.001 gives 1000 steps
        let steps = if (ratio - ratio.round()).abs() <= 1e-9 * ratio {
            ratio.round()
        } else {
            ratio.ceil()
        };
        if steps > MAX_STEPS {
            return Err(Error::StepCountExceeded {
                steps,
                limit: MAX_STEPS,
            });
        }
        Ok(steps as usize)
    }
}

/// Sampled run: `times[k] = k·dt`, with the state, held input and output at
/// each sample. The input on the last row is the one that would be applied next.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub inputs: Vec<Vec<f64>>,
    pub outputs: Vec<Vec<f64>>,
    pub state_labels: Vec<String>,
    pub input_labels: Vec<String>,
    pub output_labels: Vec<String>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().map_or(&[], Vec::as_slice)
    }

    /// Column of a state by label.
    pub fn state_series(&self, label: &str) -> Option<Vec<f64>> {
        let i = self.state_labels.iter().position(|l| l == label)?;
        Some(self.states.iter().map(|s| s[i]).collect())
    }
}

/// Discrete propagator `x⁺ = Φ·x + Γ·u` for a fixed step.
#[derive(Debug, Clone, PartialEq)]
pub struct ZohPropagator {
    pub phi: Matrix,
    pub gamma: Matrix,
}

impl ZohPropagator {
    /// `Φ = Σ_{j<k} Aʲ dtʲ/j!`, `Γ = (Σ_{j<k} Aʲ dtʲ⁺¹/(j+1)!)·B`, `k` the
    /// nilpotency index of `A`.
    pub fn new(m: &StateSpaceModel, dt: f64) -> Result<Self> {
        let a = m.a();
        let k = a.nilpotency_index()?.ok_or(Error::NotNilpotent)?;
        let n = m.n();
        let mut phi = Matrix::identity(n);
        let mut integral = Matrix::identity(n).scale(dt);
        // power = Aʲ·dtʲ/j!
        let mut power = Matrix::identity(n);
        for j in 1..k {
            power = power.mat_mul(a)?.scale(dt / j as f64);
            phi = phi.add(&power)?;
            integral = integral.add(&power.scale(dt / (j + 1) as f64))?;
        }
        let gamma = integral.mat_mul(m.b())?;
        Ok(Self { phi, gamma })
    }

    pub fn step(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        let px = self.phi.mat_vec(x)?;
        let gu = self.gamma.mat_vec(u)?;
        Ok(px.iter().zip(&gu).map(|(a, b)| a + b).collect())
    }
}

/// One exact zero-order-hold step of a model with nilpotent `A`.
pub fn zoh_step(m: &StateSpaceModel, x: &[f64], u: &[f64], dt: f64) -> Result<Vec<f64>> {
    ZohPropagator::new(m, dt)?.step(x, u)
}

/// Classical fourth-order Runge–Kutta step.
pub fn rk4_step<F>(mut deriv: F, x: &[f64], t: f64, dt: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64]) -> Vec<f64>,
{
    let mut eval = |t: f64, x: &[f64]| {
        let k = deriv(t, x);
        if k.len() != x.len() {
            return Err(Error::DimensionMismatch(format!(
                "derivative has length {}, state has {}",
                k.len(),
                x.len()
            )));
        }
        if k.iter().all(|v| v.is_finite()) {
            Ok(k)
        } else {
            Err(Error::NonFiniteDerivative { t })
        }
    };
    let offset = |k: &[f64], h: f64| -> Vec<f64> { x.iter().zip(k).map(|(xi, ki)| xi + h * ki).collect() };

    let half = 0.5 * dt;
    let k1 = eval(t, x)?;
    let k2 = eval(t + half, &offset(&k1, half))?;
    let k3 = eval(t + half, &offset(&k2, half))?;
    let k4 = eval(t + dt, &offset(&k3, dt))?;
    Ok((0..x.len())
        .map(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

fn check_len(what: &str, got: usize, want: usize) -> Result<()> {
    if got == want {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!("{what} has length {got}, expected {want}")))
    }
}

fn check_finite(x: &[f64], t: f64) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteState { t })
    }
}

/// Simulates a linear model. `input_fn(t, x)` is sampled at the start of each
/// step; use it for open loop, state feedback or scripted inputs.
pub fn simulate<F>(m: &StateSpaceModel, x0: &[f64], mut input_fn: F, cfg: &SimConfig) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64]) -> Vec<f64>,
{
    if cfg.plant == Plant::Nonlinear6dof {
        return Err(Error::InvalidConfig("use simulate_nonlinear for the nonlinear plant".into()));
    }
    check_len("plant state", m.n(), cfg.plant.state_count())?;
    check_len("initial state", x0.len(), m.n())?;
    check_finite(x0, 0.0)?;
    let steps = cfg.step_count()?;
    let zoh = match cfg.integrator {
        Integrator::ExactZoh => Some(ZohPropagator::new(m, cfg.dt)?),
        Integrator::Rk4 => None,
    };

    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        inputs: Vec::with_capacity(steps + 1),
        outputs: Vec::with_capacity(steps + 1),
        state_labels: m.state_labels().to_vec(),
        input_labels: m.input_labels().to_vec(),
        output_labels: m.output_labels().to_vec(),
    };
    let mut x = x0.to_vec();
    for k in 0..=steps {
        let t = k as f64 * cfg.dt;
        let u = input_fn(t, &x);
        check_len("input", u.len(), m.p())?;
        traj.outputs.push(m.output(&x, &u)?);
        traj.times.push(t);
        if k < steps {
            let next = match &zoh {
                Some(prop) => prop.step(&x, &u)?,
                None => rk4_step(
                    |_, s| m.derivative(s, &u).expect("dimensions checked above"),
                    &x,
                    t,
                    cfg.dt,
                )?,
            };
            check_finite(&next, t + cfg.dt)?;
            traj.states.push(std::mem::replace(&mut x, next));
        } else {
            traj.states.push(x.clone());
        }
        traj.inputs.push(u);
    }
    Ok(traj)
}

/// Right-hand side of the nonlinear reference plant in the 6DOF state order.
///
/// Thrust is tilted through the exact sines and cosines of roll and pitch;
/// yaw does not rotate the thrust vector and no gyroscopic or drag terms are
/// modelled. Replacing `sin α → α`, `cos α → 1` and `T → mg` recovers the
/// linear 6DOF model.
pub fn nonlinear_derivative(p: &QuadParams, x: &[f64], f: &RotorForces) -> Vec<f64> {
    use idx6::*;

    let thrust = total_thrust(f);
    let (phi, theta) = (x[PHI], x[THETA]);
    let mut dx = vec![0.0; 12];
    dx[X] = x[VX];
    dx[Y] = x[VY];
    dx[Z] = x[VZ];
    dx[VX] = -(thrust / p.m) * theta.sin();
    dx[VY] = (thrust / p.m) * phi.sin();
    dx[VZ] = thrust * phi.cos() * theta.cos() / p.m - p.g;
    dx[PHI] = x[PHI_DOT];
    dx[THETA] = x[THETA_DOT];
    dx[PSI] = x[PSI_DOT];
    dx[PHI_DOT] = roll_torque(f, p) / p.ix;
    dx[THETA_DOT] = pitch_torque(f, p) / p.iy;
    dx[PSI_DOT] = yaw_torque(f, p) / p.iz;
    dx
}

/// Integrates the nonlinear plant with RK4 regardless of `cfg.integrator`.
///
/// The recorded inputs are the generalized inputs `mix(F)` so the trajectory
/// lines up column for column with a linear 6DOF run.
pub fn simulate_nonlinear<F>(p: &QuadParams, x0: &[f64], mut forces_fn: F, cfg: &SimConfig) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64]) -> RotorForces,
{
    use idx6::*;

    if cfg.plant != Plant::Nonlinear6dof {
        return Err(Error::InvalidConfig("simulate_nonlinear requires the nonlinear_6dof plant".into()));
    }
    let p = p.validate()?;
    check_len("initial state", x0.len(), 12)?;
    check_finite(x0, 0.0)?;
    let steps = cfg.step_count()?;
    let labels = |l: &[&str]| l.iter().map(|s| s.to_string()).collect::<Vec<_>>();

    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        inputs: Vec::with_capacity(steps + 1),
        outputs: Vec::with_capacity(steps + 1),
        state_labels: labels(&DOF6_STATE_LABELS),
        input_labels: labels(&DOF6_INPUT_LABELS),
        output_labels: labels(&DOF6_OUTPUT_LABELS),
    };
    let mut x = x0.to_vec();
    for k in 0..=steps {
        let t = k as f64 * cfg.dt;
        let f = forces_fn(t, &x);
        if !f.is_finite() {
            return Err(Error::NonFiniteDerivative { t });
        }
        traj.times.push(t);
        traj.outputs.push([X, Y, Z, PHI, THETA, PSI].iter().map(|&i| x[i]).collect());
        traj.inputs.push(mix(&f, &p).to_array().to_vec());
        if k < steps {
            let next = rk4_step(|_, s| nonlinear_derivative(&p, s, &f), &x, t, cfg.dt)?;
            check_finite(&next, t + cfg.dt)?;
            traj.states.push(std::mem::replace(&mut x, next));
        } else {
            traj.states.push(x.clone());
        }
    }
    Ok(traj)
}
