//! Full-state feedback by pole placement on decoupled integrator chains.
//!
//! Around hover the 6DOF model splits into four independent chains:
//! `U₁ → ż → z`, `U₂ → φ̇ → φ → ẏ → y`, `U₃ → θ̇ → θ → ẋ → x` and
//! `U₄ → ψ̇ → ψ`. Each chain is a pure integrator chain after scaling its
//! states, so Ackermann's formula reduces to reading off the coefficients of
//! the target polynomial. Feedback convention is `u = r - K·x`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::poly::poly_from_roots;
use crate::linalg::{is_hurwitz, Matrix};
use crate::models::{
    build_3dof, build_6dof, idx6, DOF3_INPUT_LABELS, DOF3_STATE_LABELS, DOF6_INPUT_LABELS,
    DOF6_STATE_LABELS,
};
use crate::params::QuadParams;

/// Feedback gain `K` (inputs × states) with the target model's labels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainMatrix {
    #[serde(rename = "K")]
    pub k: Matrix,
    pub input_labels: Vec<String>,
    pub state_labels: Vec<String>,
}

impl GainMatrix {
    fn new(k: Matrix, inputs: &[&str], states: &[&str]) -> Self {
        Self {
            k,
            input_labels: inputs.iter().map(|s| s.to_string()).collect(),
            state_labels: states.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// `u = r - K·x`
    pub fn feedback(&self, reference: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        let kx = self.k.mat_vec(x)?;
        Ok(reference.iter().zip(&kx).map(|(r, v)| r - v).collect())
    }
}

/// Desired closed-loop poles for each 6DOF chain.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSpec6 {
    /// `(z, ż)`, two poles.
    pub z: Vec<Complex64>,
    /// `(y, ẏ, φ, φ̇)` driven by the roll torque, four poles.
    pub roll: Vec<Complex64>,
    /// `(x, ẋ, θ, θ̇)` driven by the pitch torque, four poles.
    pub pitch: Vec<Complex64>,
    /// `(ψ, ψ̇)`, two poles.
    pub yaw: Vec<Complex64>,
}

impl PoleSpec6 {
    /// Every pole at the same real location.
    pub fn uniform(pole: f64) -> Self {
        let p = Complex64::new(pole, 0.0);
        Self {
            z: vec![p; 2],
            roll: vec![p; 4],
            pitch: vec![p; 4],
            yaw: vec![p; 2],
        }
    }

    /// All poles, chains in the order z, roll, pitch, yaw.
    pub fn all(&self) -> Vec<Complex64> {
        [&self.z, &self.roll, &self.pitch, &self.yaw]
            .into_iter()
            .flatten()
            .copied()
            .collect()
    }
}

/// Desired closed-loop poles for each 3DOF attitude axis, two per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSpec3 {
    pub phi: Vec<Complex64>,
    pub theta: Vec<Complex64>,
    pub psi: Vec<Complex64>,
}

impl PoleSpec3 {
    pub fn uniform(pole: f64) -> Self {
        let p = Complex64::new(pole, 0.0);
        Self {
            phi: vec![p; 2],
            theta: vec![p; 2],
            psi: vec![p; 2],
        }
    }

    pub fn all(&self) -> Vec<Complex64> {
        [&self.phi, &self.theta, &self.psi]
            .into_iter()
            .flatten()
            .copied()
            .collect()
    }
}

fn check_poles(poles: &[Complex64]) -> Result<()> {
    if let Some(bad) = poles.iter().find(|p| !p.re.is_finite() || p.re >= 0.0 || !p.im.is_finite()) {
        return Err(Error::UnstablePoleRequested {
            re: bad.re,
            im: bad.im,
        });
    }
    let mut used = vec![false; poles.len()];
    for i in 0..poles.len() {
        if used[i] || poles[i].im == 0.0 {
            continue;
        }
        let target = poles[i].conj();
        let tol = 1e-9 * target.norm();
        let partner = (0..poles.len()).find(|&j| j != i && !used[j] && (poles[j] - target).norm() <= tol);
        match partner {
            Some(j) => {
                used[i] = true;
                used[j] = true;
            }
            None => return Err(Error::UnpairedComplexPole),
        }
    }
    Ok(())
}

/// Gains for the chain `ξ₁' = ξ₂, …, ξₖ' = b·u` placing the closed-loop poles
/// at `poles`.
///
/// With target `sᵏ + a₁sᵏ⁻¹ + … + aₖ` the gains are `kⱼ = aₖ₋ⱼ₊₁ / b`, ordered
/// from the most integrated state `ξ₁` to the rate `ξₖ`.
pub fn place_integrator_chain(order: usize, input_gain: f64, poles: &[Complex64]) -> Result<Vec<f64>> {
    if order != 2 && order != 4 {
        return Err(Error::UnsupportedChainOrder(order));
    }
    if poles.len() != order {
        return Err(Error::PoleCountMismatch {
            expected: order,
            got: poles.len(),
        });
    }
    if input_gain == 0.0 || !input_gain.is_finite() {
        return Err(Error::ZeroInputGain);
    }
    check_poles(poles)?;
    let target = poly_from_roots(poles);
    Ok((1..=order).map(|j| target[order - j + 1] / input_gain).collect())
}

fn verify_closed_loop(a: &Matrix, b: &Matrix, k: &Matrix) -> Result<()> {
    let closed = a.sub(&b.mat_mul(k)?)?;
    if is_hurwitz(&closed.char_poly()?) {
        Ok(())
    } else {
        Err(Error::InternalStabilityCheckFailed)
    }
}

/// 4×12 gain in `U` space for the 6DOF model.
pub fn design_6dof_gains(p: &QuadParams, spec: &PoleSpec6) -> Result<GainMatrix> {
    use idx6::*;

    let model = build_6dof(p)?;
    let p = p.validate()?;
    let mut k = Matrix::zeros(4, 12);

    let z = place_integrator_chain(2, 1.0 / p.m, &spec.z)?;
    k[(0, Z)] = z[0];
    k[(0, VZ)] = z[1];

    // ξ = (y, ẏ, gφ, gφ̇) is a pure chain with input gain g/Ix
    let roll = place_integrator_chain(4, p.g / p.ix, &spec.roll)?;
    k[(1, Y)] = roll[0];
    k[(1, VY)] = roll[1];
    k[(1, PHI)] = roll[2] * p.g;
    k[(1, PHI_DOT)] = roll[3] * p.g;

    // ξ = (x, ẋ, -gθ, -gθ̇) is a pure chain with input gain -g/Iy
    let pitch = place_integrator_chain(4, -p.g / p.iy, &spec.pitch)?;
    k[(2, X)] = pitch[0];
    k[(2, VX)] = pitch[1];
    k[(2, THETA)] = -pitch[2] * p.g;
    k[(2, THETA_DOT)] = -pitch[3] * p.g;

    let yaw = place_integrator_chain(2, 1.0 / p.iz, &spec.yaw)?;
    k[(3, PSI)] = yaw[0];
    k[(3, PSI_DOT)] = yaw[1];

    verify_closed_loop(model.a(), model.b(), &k)?;
    Ok(GainMatrix::new(k, &DOF6_INPUT_LABELS, &DOF6_STATE_LABELS))
}

/// 4×6 gain in rotor-force space for the 3DOF model.
///
/// Each axis is placed in torque space, then the torque demand is spread over
/// the rotors with the inverse mixer at zero net thrust change.
pub fn design_3dof_gains(p: &QuadParams, spec: &PoleSpec3) -> Result<GainMatrix> {
    let model = build_3dof(p)?;
    let p = p.validate()?;

    // torque-space gains, rows τx, τy, τz
    let mut torque_k = Matrix::zeros(3, 6);
    for (axis, (poles, inertia)) in [(&spec.phi, p.ix), (&spec.theta, p.iy), (&spec.psi, p.iz)]
        .into_iter()
        .enumerate()
    {
        let gains = place_integrator_chain(2, 1.0 / inertia, poles)?;
        torque_k[(axis, axis)] = gains[0];
        torque_k[(axis, axis + 3)] = gains[1];
    }

    // rotor forces per unit (τx, τy, τz), from the inverse mixer with U₁ = 0
    let roll = 1.0 / (2.0 * p.d);
    let pitch = 1.0 / (2.0 * p.d);
    let yaw = 1.0 / (4.0 * p.c);
    let allocation = Matrix::from_rows(&[
        [0.0, pitch, -yaw],
        [roll, 0.0, yaw],
        [0.0, -pitch, -yaw],
        [-roll, 0.0, yaw],
    ])?;
    let k = allocation.mat_mul(&torque_k)?;

    verify_closed_loop(model.a(), model.b(), &k)?;
    Ok(GainMatrix::new(k, &DOF3_INPUT_LABELS, &DOF3_STATE_LABELS))
}
