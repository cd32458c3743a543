use serde::Serialize;

use super::Matrix;
use crate::error::{Error, Result};

/// Continuous LTI system `ẋ = A·x + B·u`, `y = C·x + D·u`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateSpaceModel {
    n: usize,
    p: usize,
    q: usize,
    #[serde(rename = "A")]
    a: Matrix,
    #[serde(rename = "B")]
    b: Matrix,
    #[serde(rename = "C")]
    c: Matrix,
    #[serde(rename = "D")]
    d: Matrix,
    state_labels: Vec<String>,
    input_labels: Vec<String>,
    output_labels: Vec<String>,
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

impl StateSpaceModel {
    /// Checks that A is n×n, B n×p, C q×n, D q×p and the label lists match.
    pub fn new(
        a: Matrix,
        b: Matrix,
        c: Matrix,
        d: Matrix,
        state_labels: &[&str],
        input_labels: &[&str],
        output_labels: &[&str],
    ) -> Result<Self> {
        let n = a.rows();
        let p = b.cols();
        let q = c.rows();
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::DimensionMismatch(what.to_string()))
            }
        };
        check(a.is_square(), "A must be square")?;
        check(b.rows() == n, "B must have n rows")?;
        check(c.cols() == n, "C must have n columns")?;
        check(d.rows() == q && d.cols() == p, "D must be q x p")?;
        check(state_labels.len() == n, "need n state labels")?;
        check(input_labels.len() == p, "need p input labels")?;
        check(output_labels.len() == q, "need q output labels")?;
        Ok(Self {
            n,
            p,
            q,
            a,
            b,
            c,
            d,
            state_labels: labels(state_labels),
            input_labels: labels(input_labels),
            output_labels: labels(output_labels),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn c(&self) -> &Matrix {
        &self.c
    }

    pub fn d(&self) -> &Matrix {
        &self.d
    }

    pub fn state_labels(&self) -> &[String] {
        &self.state_labels
    }

    pub fn input_labels(&self) -> &[String] {
        &self.input_labels
    }

    pub fn output_labels(&self) -> &[String] {
        &self.output_labels
    }

    /// Same model with a different input matrix.
    pub fn with_b(&self, b: Matrix) -> Result<Self> {
        if b.rows() != self.n || b.cols() != self.p {
            return Err(Error::DimensionMismatch("replacement B must be n x p".into()));
        }
        Ok(Self { b, ..self.clone() })
    }

    /// Same model with a different output matrix.
    pub fn with_c(&self, c: Matrix) -> Result<Self> {
        if c.rows() != self.q || c.cols() != self.n {
            return Err(Error::DimensionMismatch("replacement C must be q x n".into()));
        }
        Ok(Self { c, ..self.clone() })
    }

    /// `ẋ = A·x + B·u`
    pub fn derivative(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        let ax = self.a.mat_vec(x)?;
        let bu = self.b.mat_vec(u)?;
        Ok(ax.iter().zip(&bu).map(|(a, b)| a + b).collect())
    }

    /// `y = C·x + D·u`
    pub fn output(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        let cx = self.c.mat_vec(x)?;
        let du = self.d.mat_vec(u)?;
        Ok(cx.iter().zip(&du).map(|(a, b)| a + b).collect())
    }

    /// Closed-loop state matrix `A - B·K` for feedback `u = r - K·x`.
    pub fn closed_loop_a(&self, k: &Matrix) -> Result<Matrix> {
        self.a.sub(&self.b.mat_mul(k)?)
    }
}
