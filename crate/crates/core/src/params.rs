//! Physical parameters of the vehicle.
//!
//! All quantities are SI: kilograms, metres, kg·m², m/s².

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Standard gravity, used when a parameter file omits `g`.
pub const STANDARD_GRAVITY: f64 = 9.81;

/// Physical constants of a plus-configuration quadcopter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadParams {
    /// Mass, kg.
    pub m: f64,
    /// Moment arm from the centre of gravity to each rotor, m.
    pub d: f64,
    /// Force-to-moment factor relating rotor thrust to reactive torque, m.
    pub c: f64,
    /// Principal moments of inertia, kg·m².
    #[serde(rename = "Ix")]
    pub ix: f64,
    #[serde(rename = "Iy")]
    pub iy: f64,
    #[serde(rename = "Iz")]
    pub iz: f64,
    /// Gravitational acceleration, m/s².
    #[serde(default = "default_gravity")]
    pub g: f64,
}

fn default_gravity() -> f64 {
    STANDARD_GRAVITY
}

impl QuadParams {
    /// Builds a parameter set with standard gravity and validates it.
    pub fn new(m: f64, d: f64, c: f64, ix: f64, iy: f64, iz: f64) -> Result<Self> {
        Self {
            m,
            d,
            c,
            ix,
            iy,
            iz,
            g: STANDARD_GRAVITY,
        }
        .validate()
    }

    pub fn with_gravity(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    /// Returns `self` unchanged if every field is finite and strictly positive.
    ///
    /// Fields are checked in declaration order; the first offending one is named.
    pub fn validate(self) -> Result<Self> {
        for (name, value) in self.fields() {
            if !value.is_finite() {
                return Err(Error::NonFiniteParameter(name));
            }
            if value <= 0.0 {
                return Err(Error::NonPositiveParameter(name));
            }
        }
        Ok(self)
    }

    /// Per-rotor thrust that balances weight, `m·g/4`.
    pub fn hover_thrust_per_rotor(&self) -> f64 {
        self.weight() / 4.0
    }

    /// Weight `m·g`, N.
    pub fn weight(&self) -> f64 {
        self.m * self.g
    }

    fn fields(&self) -> [(&'static str, f64); 7] {
        [
            ("m", self.m),
            ("d", self.d),
            ("c", self.c),
            ("Ix", self.ix),
            ("Iy", self.iy),
            ("Iz", self.iz),
            ("g", self.g),
        ]
    }
}
