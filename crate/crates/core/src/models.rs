//! The 3DOF attitude model and the 6DOF hover-linearized model.
//!
//! 3DOF: state `[φ θ ψ φ̇ θ̇ ψ̇]`, inputs are the rotor forces `F₁..F₄`,
//! outputs `[φ θ ψ]`.
//!
//! 6DOF: state `[x y z ẋ ẏ ż φ θ ψ φ̇ θ̇ ψ̇]`, inputs `[U₁ U₂ U₃ U₄]` (net
//! upward force, then torques about x, y, z), outputs `[x y z φ θ ψ]`.
//! Vertical acceleration is `ż̇ = +U₁/m`, consistent with `U₁ = T - mg`.

use crate::error::Result;
use crate::linalg::{Matrix, StateSpaceModel};
use crate::params::QuadParams;

pub const DOF3_STATE_LABELS: [&str; 6] =
    ["phi", "theta", "psi", "phi_dot", "theta_dot", "psi_dot"];
pub const DOF3_INPUT_LABELS: [&str; 4] = ["f1", "f2", "f3", "f4"];
pub const DOF3_OUTPUT_LABELS: [&str; 3] = ["phi", "theta", "psi"];

pub const DOF6_STATE_LABELS: [&str; 12] = [
    "x", "y", "z", "vx", "vy", "vz", "phi", "theta", "psi", "phi_dot", "theta_dot", "psi_dot",
];
pub const DOF6_INPUT_LABELS: [&str; 4] = ["u1", "u2", "u3", "u4"];
pub const DOF6_OUTPUT_LABELS: [&str; 6] = ["x", "y", "z", "phi", "theta", "psi"];

/// Indices into the 6DOF state vector.
pub mod idx6 {
    pub const X: usize = 0;
    pub const Y: usize = 1;
    pub const Z: usize = 2;
    pub const VX: usize = 3;
    pub const VY: usize = 4;
    pub const VZ: usize = 5;
    pub const PHI: usize = 6;
    pub const THETA: usize = 7;
    pub const PSI: usize = 8;
    pub const PHI_DOT: usize = 9;
    pub const THETA_DOT: usize = 10;
    pub const PSI_DOT: usize = 11;
}

/// Attitude-only state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dof3State {
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
    pub phi_dot: f64,
    pub theta_dot: f64,
    pub psi_dot: f64,
}

impl Dof3State {
    pub fn to_array(self) -> [f64; 6] {
        [self.phi, self.theta, self.psi, self.phi_dot, self.theta_dot, self.psi_dot]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        let [phi, theta, psi, phi_dot, theta_dot, psi_dot] = a;
        Self { phi, theta, psi, phi_dot, theta_dot, psi_dot }
    }
}

/// Full translational and attitude state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dof6State {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub vx: f64,
    pub vy: f64,
    pub vz: f64,
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
    pub phi_dot: f64,
    pub theta_dot: f64,
    pub psi_dot: f64,
}

impl Dof6State {
    pub fn to_array(self) -> [f64; 12] {
        [
            self.x, self.y, self.z, self.vx, self.vy, self.vz, self.phi, self.theta, self.psi,
            self.phi_dot, self.theta_dot, self.psi_dot,
        ]
    }

    pub fn from_array(a: [f64; 12]) -> Self {
        let [x, y, z, vx, vy, vz, phi, theta, psi, phi_dot, theta_dot, psi_dot] = a;
        Self { x, y, z, vx, vy, vz, phi, theta, psi, phi_dot, theta_dot, psi_dot }
    }
}

/// Output matrix selecting the given state indices.
fn selector(rows: &[usize], n: usize) -> Matrix {
    let mut c = Matrix::zeros(rows.len(), n);
    for (i, &j) in rows.iter().enumerate() {
        c[(i, j)] = 1.0;
    }
    c
}

pub fn build_3dof(p: &QuadParams) -> Result<StateSpaceModel> {
    let p = p.validate()?;
    let mut a = Matrix::zeros(6, 6);
    for i in 0..3 {
        a[(i, i + 3)] = 1.0;
    }

    let roll = p.d / p.ix;
    let pitch = p.d / p.iy;
    let yaw = p.c / p.iz;
    let mut b = Matrix::zeros(6, 4);
    b[(3, 1)] = roll;
    b[(3, 3)] = -roll;
    b[(4, 0)] = pitch;
    b[(4, 2)] = -pitch;
    b[(5, 0)] = -yaw;
    b[(5, 1)] = yaw;
    b[(5, 2)] = -yaw;
    b[(5, 3)] = yaw;

    StateSpaceModel::new(
        a,
        b,
        selector(&[0, 1, 2], 6),
        Matrix::zeros(3, 4),
        &DOF3_STATE_LABELS,
        &DOF3_INPUT_LABELS,
        &DOF3_OUTPUT_LABELS,
    )
}

pub fn build_6dof(p: &QuadParams) -> Result<StateSpaceModel> {
    use idx6::*;

    let p = p.validate()?;
    let mut a = Matrix::zeros(12, 12);
    a[(X, VX)] = 1.0;
    a[(Y, VY)] = 1.0;
    a[(Z, VZ)] = 1.0;
    a[(VX, THETA)] = -p.g;
    a[(VY, PHI)] = p.g;
    a[(PHI, PHI_DOT)] = 1.0;
    a[(THETA, THETA_DOT)] = 1.0;
    a[(PSI, PSI_DOT)] = 1.0;

    let mut b = Matrix::zeros(12, 4);
    b[(VZ, 0)] = 1.0 / p.m;
    b[(PHI_DOT, 1)] = 1.0 / p.ix;
    b[(THETA_DOT, 2)] = 1.0 / p.iy;
    b[(PSI_DOT, 3)] = 1.0 / p.iz;

    StateSpaceModel::new(
        a,
        b,
        selector(&[X, Y, Z, PHI, THETA, PSI], 12),
        Matrix::zeros(6, 4),
        &DOF6_STATE_LABELS,
        &DOF6_INPUT_LABELS,
        &DOF6_OUTPUT_LABELS,
    )
}
