//! Rotor force and body torque algebra.
//!
//! Rotor numbering follows the plus configuration: rotors 1 and 3 sit on the
//! body x-axis, 2 and 4 on the body y-axis. Rotors 1 and 3 spin clockwise,
//! 2 and 4 counter-clockwise, so the reactive torque of a rotor is `+c·F`
//! for 2 and 4 and `-c·F` for 1 and 3.

use serde::{Deserialize, Serialize};

use crate::params::QuadParams;

/// Angle bound (rad) of the small-angle linearization.
pub const SMALL_ANGLE_LIMIT: f64 = 0.5;

/// Thrust of each rotor, N.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RotorForces {
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub f4: f64,
}

impl RotorForces {
    pub const fn new(f1: f64, f2: f64, f3: f64, f4: f64) -> Self {
        Self { f1, f2, f3, f4 }
    }

    /// All four rotors at the hover thrust `m·g/4`.
    pub fn hover(p: &QuadParams) -> Self {
        let f = p.hover_thrust_per_rotor();
        Self::new(f, f, f, f)
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.f1, self.f2, self.f3, self.f4]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|f| f.is_finite())
    }

    /// A rotor can only push; any negative thrust is infeasible.
    pub fn is_physical(&self) -> bool {
        self.to_array().iter().all(|&f| f >= 0.0)
    }
}

/// Net upward force and the three body torques.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GeneralizedInput {
    /// Net upward force `T - m·g`, N.
    pub u1: f64,
    /// Torque about the body x-axis (roll), N·m.
    pub u2: f64,
    /// Torque about the body y-axis (pitch), N·m.
    pub u3: f64,
    /// Torque about the body z-axis (yaw), N·m.
    pub u4: f64,
}

impl GeneralizedInput {
    pub const fn new(u1: f64, u2: f64, u3: f64, u4: f64) -> Self {
        Self { u1, u2, u3, u4 }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.u1, self.u2, self.u3, self.u4]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }
}

/// Torque about the body x-axis: `d·(f2 - f4)`. Rotors 1 and 3 lie on the axis.
pub fn roll_torque(f: &RotorForces, p: &QuadParams) -> f64 {
    p.d * (f.f2 - f.f4)
}

/// Torque about the body y-axis: `d·(f1 - f3)`.
pub fn pitch_torque(f: &RotorForces, p: &QuadParams) -> f64 {
    p.d * (f.f1 - f.f3)
}

/// Sum of the reactive rotor torques: `c·(-f1 + f2 - f3 + f4)`.
pub fn yaw_torque(f: &RotorForces, p: &QuadParams) -> f64 {
    p.c * ((f.f2 + f.f4) - (f.f1 + f.f3))
}

pub fn total_thrust(f: &RotorForces) -> f64 {
    // pairwise so that four equal forces sum exactly
    (f.f1 + f.f2) + (f.f3 + f.f4)
}

/// Maps rotor forces to the generalized input `(T - mg, τx, τy, τz)`.
pub fn mix(f: &RotorForces, p: &QuadParams) -> GeneralizedInput {
    GeneralizedInput {
        u1: total_thrust(f) - p.weight(),
        u2: roll_torque(f, p),
        u3: pitch_torque(f, p),
        u4: yaw_torque(f, p),
    }
}

/// Exact inverse of [`mix`]. Never clamps: the result may contain negative
/// forces, check [`RotorForces::is_physical`] to detect saturation.
pub fn demix(u: &GeneralizedInput, p: &QuadParams) -> RotorForces {
    let base = (u.u1 + p.weight()) / 4.0;
    let roll = u.u2 / (2.0 * p.d);
    let pitch = u.u3 / (2.0 * p.d);
    let yaw = u.u4 / (4.0 * p.c);
    RotorForces {
        f1: base + pitch - yaw,
        f2: base + roll + yaw,
        f3: base - pitch - yaw,
        f4: base - roll + yaw,
    }
}

/// Raised when an attitude angle leaves the small-angle domain.
///
/// This is a warning: the accelerations are still computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallAngleDomainViolation {
    pub phi: f64,
    pub theta: f64,
}

impl std::fmt::Display for SmallAngleDomainViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "attitude (phi = {}, theta = {}) outside the small-angle domain |angle| < {SMALL_ANGLE_LIMIT} rad",
            self.phi, self.theta
        )
    }
}

/// Linearized translational accelerations about hover.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranslationalAccels {
    pub ax: f64,
    pub ay: f64,
    pub az: f64,
    pub domain_warning: Option<SmallAngleDomainViolation>,
}

/// `ax = -g·θ`, `ay = g·φ`, `az = u1/m`.
pub fn translational_accels(phi: f64, theta: f64, u1: f64, p: &QuadParams) -> TranslationalAccels {
    let domain_warning = (phi.abs() >= SMALL_ANGLE_LIMIT || theta.abs() >= SMALL_ANGLE_LIMIT)
        .then_some(SmallAngleDomainViolation { phi, theta });
    TranslationalAccels {
        ax: -p.g * theta,
        ay: p.g * phi,
        az: u1 / p.m,
        domain_warning,
    }
}
