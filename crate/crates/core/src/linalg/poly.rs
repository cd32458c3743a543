//! Real polynomials stored as coefficient lists, highest degree first.

use num_complex::Complex64;

/// Stand-in for a zero leading entry while building the Routh array.
const ROUTH_EPSILON: f64 = 1e-30;

/// Product of two polynomials.
pub fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Expands `∏(s - rᵢ)`. Imaginary parts of the result are discarded, so the
/// roots should be closed under conjugation.
pub fn poly_from_roots(roots: &[Complex64]) -> Vec<f64> {
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * r;
        }
        coeffs = next;
    }
    coeffs.into_iter().map(|c| c.re).collect()
}

/// First column of the Routh array, with zero pivots replaced by a tiny
/// positive epsilon. `None` when an entire row vanishes.
fn routh_first_column(coeffs: &[f64]) -> Option<(Vec<f64>, bool)> {
    let width = coeffs.len().div_ceil(2);
    let mut upper: Vec<f64> = coeffs.iter().step_by(2).copied().collect();
    let mut lower: Vec<f64> = coeffs.iter().skip(1).step_by(2).copied().collect();
    upper.resize(width, 0.0);
    lower.resize(width, 0.0);

    let mut column = vec![upper[0]];
    let mut substituted = false;
    for _ in 1..coeffs.len() {
        if lower.iter().all(|&v| v == 0.0) {
            return None;
        }
        if lower[0] == 0.0 {
            lower[0] = ROUTH_EPSILON;
            substituted = true;
        }
        column.push(lower[0]);
        let mut next = vec![0.0; width];
        for j in 0..width - 1 {
            next[j] = (lower[0] * upper[j + 1] - upper[0] * lower[j + 1]) / lower[0];
        }
        upper = std::mem::replace(&mut lower, next);
    }
    Some((column, substituted))
}

/// Routh–Hurwitz test: true iff every root has strictly negative real part.
///
/// A vanishing row, or a zero pivot that needed the epsilon rule, means some
/// root lies on the imaginary axis or to its right.
pub fn is_hurwitz(coeffs: &[f64]) -> bool {
    if coeffs.len() < 2 || coeffs[0] == 0.0 {
        return false;
    }
    let sign = coeffs[0].signum();
    if coeffs.iter().any(|&c| c * sign <= 0.0) {
        return false;
    }
    match routh_first_column(coeffs) {
        Some((column, substituted)) => !substituted && column.iter().all(|&v| v * sign > 0.0),
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hurwitz_examples() {
        assert!(is_hurwitz(&[1.0, 3.0, 2.0]));
        assert!(!is_hurwitz(&[1.0, 0.0, -1.0]));
        let mut open_loop = vec![0.0; 13];
        open_loop[0] = 1.0;
        assert!(!is_hurwitz(&open_loop));
        assert!(is_hurwitz(&[1.0, 0.5]));
        assert!(!is_hurwitz(&[1.0, -0.5]));
    }

    #[test]
    fn hurwitz_boundary_cases() {
        // s³ + s² + s + 1 = (s + 1)(s² + 1): imaginary-axis pair gives a zero row
        assert!(!is_hurwitz(&[1.0, 1.0, 1.0, 1.0]));
        // s⁴ + s³ + 2s² + 2s + 3: zero pivot, two right-half-plane roots
        assert!(!is_hurwitz(&[1.0, 1.0, 2.0, 2.0, 3.0]));
        // s³ + 2s² + 3s + 10: all coefficients positive but unstable
        assert!(!is_hurwitz(&[1.0, 2.0, 3.0, 10.0]));
        // (s + 2)¹²
        let roots = vec![Complex64::new(-2.0, 0.0); 12];
        assert!(is_hurwitz(&poly_from_roots(&roots)));
    }

    #[test]
    fn expansion() {
        let p = poly_from_roots(&[Complex64::new(-1.0, 0.0), Complex64::new(-2.0, 0.0)]);
        assert_eq!(p, vec![1.0, 3.0, 2.0]);
        let p = poly_from_roots(&[Complex64::new(-1.0, 2.0), Complex64::new(-1.0, -2.0)]);
        assert_eq!(p, vec![1.0, 2.0, 5.0]);
        assert_eq!(poly_mul(&[1.0, 1.0], &[1.0, 2.0]), vec![1.0, 3.0, 2.0]);
    }
}
