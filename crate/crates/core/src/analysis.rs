//! Controllability, observability and open-loop stability of a model.

use serde::Serialize;

use crate::error::Result;
use crate::linalg::{is_hurwitz, Matrix, StateSpaceModel, DEFAULT_RANK_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityClass {
    /// Every eigenvalue strictly in the left half-plane.
    StrictlyStable,
    MarginalOrUnstable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub controllability_rank: usize,
    pub observability_rank: usize,
    pub is_controllable: bool,
    pub is_observable: bool,
    pub open_loop_char_poly: Vec<f64>,
    pub stability_class: StabilityClass,
    pub nilpotency_index: Option<usize>,
}

/// `[B, AB, …, Aⁿ⁻¹B]`, stopping early once a block vanishes.
pub fn controllability_matrix(m: &StateSpaceModel) -> Result<Matrix> {
    let mut block = m.b().clone();
    let mut out = block.clone();
    for _ in 1..m.n() {
        block = m.a().mat_mul(&block)?;
        if block.max_abs() == 0.0 {
            break;
        }
        out = out.hstack(&block)?;
    }
    Ok(out)
}

/// `[C; CA; …; CAⁿ⁻¹]`, stopping early once a block vanishes.
pub fn observability_matrix(m: &StateSpaceModel) -> Result<Matrix> {
    let mut block = m.c().clone();
    let mut out = block.clone();
    for _ in 1..m.n() {
        block = block.mat_mul(m.a())?;
        if block.max_abs() == 0.0 {
            break;
        }
        out = out.vstack(&block)?;
    }
    Ok(out)
}

pub fn controllability_rank(m: &StateSpaceModel) -> Result<usize> {
    Ok(controllability_matrix(m)?.rank(DEFAULT_RANK_TOL))
}

pub fn observability_rank(m: &StateSpaceModel) -> Result<usize> {
    Ok(observability_matrix(m)?.rank(DEFAULT_RANK_TOL))
}

pub fn analyze(m: &StateSpaceModel) -> Result<AnalysisReport> {
    let controllability_rank = controllability_rank(m)?;
    let observability_rank = observability_rank(m)?;
    let open_loop_char_poly = m.a().char_poly()?;
    let stability_class = if is_hurwitz(&open_loop_char_poly) {
        StabilityClass::StrictlyStable
    } else {
        StabilityClass::MarginalOrUnstable
    };
    Ok(AnalysisReport {
        controllability_rank,
        observability_rank,
        is_controllable: controllability_rank == m.n(),
        is_observable: observability_rank == m.n(),
        open_loop_char_poly,
        stability_class,
        nilpotency_index: m.a().nilpotency_index()?,
    })
}
