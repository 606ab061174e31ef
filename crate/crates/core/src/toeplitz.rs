//! Quasihomogeneous Toeplitz operators as weighted shifts on the monomials.
//!
//! `T_{e^{ipθ}φ}` maps `z^k` to `2(k+p+1) φ̂(2k+p+2) z^{k+p}`; weights are
//! stored in this monomial convention and only [`truncated_matrix`] passes to
//! the orthonormal basis `√(k+1) z^k`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Target weights below this magnitude are compared absolutely.
pub const ABSOLUTE_RESIDUAL_BELOW: f64 = 1e-12;

/// `z^k ↦ w_k z^{k+degree}` for `k = 0..weights.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedShift {
    pub degree: u32,
    pub weights: Vec<Complex64>,
}

impl WeightedShift {
    pub fn new(degree: u32, weights: Vec<Complex64>) -> Result<Self> {
        if degree < 1 {
            return Err(Error::Range("shift degree must be >= 1".into()));
        }
        if weights.is_empty() {
            return Err(Error::Range("a weighted shift needs at least one weight".into()));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Range("weights must be finite".into()));
        }
        Ok(Self { degree, weights })
    }

    pub fn real(degree: u32, weights: &[f64]) -> Result<Self> {
        Self::new(degree, weights.iter().map(|&w| Complex64::new(w, 0.0)).collect())
    }

    /// Largest `k` with a stored weight.
    pub fn k_max(&self) -> usize {
        self.weights.len() - 1
    }
}

/// Weights `2(k+p+1) φ̂(2k+p+2)` for `k = 0..=k_max`.
pub fn shift_of_symbol<F>(p: u32, mellin: F, k_max: usize) -> Result<WeightedShift>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let pf = f64::from(p);
    let weights = (0..=k_max)
        .map(|k| {
            let k = k as f64;
            mellin(2.0 * k + pf + 2.0).map(|v| v * (2.0 * (k + pf + 1.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    WeightedShift::new(p, weights)
}

/// `S^p` for a degree-one shift: `W_k = ∏_{j<p} w_{k+j}`.
pub fn compose_power(s: &WeightedShift, p: u32) -> Result<WeightedShift> {
    if s.degree != 1 {
        return Err(Error::Range(format!(
            "only degree-one shifts can be composed, got degree {}",
            s.degree
        )));
    }
    let p = p.max(1) as usize;
    if s.weights.len() < p {
        return Err(Error::Range(format!(
            "{} weights cannot form a power of order {p}",
            s.weights.len()
        )));
    }
    let weights = s
        .weights
        .windows(p)
        .map(|w| w.iter().product())
        .collect();
    WeightedShift::new(p as u32, weights)
}

/// Per-k comparison of `candidate^p` against `target`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub p: u32,
    pub tolerance: f64,
    /// Relative residual, or absolute where the target weight is tiny.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// Indices `k` whose residual exceeds the tolerance.
    pub failures: Vec<usize>,
    pub passed: bool,
}

pub fn verify_identity(
    target: &WeightedShift,
    candidate: &WeightedShift,
    p: u32,
    tol: f64,
) -> Result<IdentityReport> {
    if target.degree != p {
        return Err(Error::Range(format!(
            "target has degree {} but p = {p}",
            target.degree
        )));
    }
    let power = compose_power(candidate, p)?;
    if power.weights.len() < target.weights.len() {
        return Err(Error::Range(format!(
            "candidate covers k <= {} but the target needs k <= {}",
            power.k_max(),
            target.k_max()
        )));
    }
    let residuals: Vec<f64> = target
        .weights
        .iter()
        .zip(&power.weights)
        .map(|(t, c)| {
            let diff = (c - t).norm();
            if t.norm() < ABSOLUTE_RESIDUAL_BELOW {
                diff
            } else {
                diff / t.norm()
            }
        })
        .collect();
    let failures: Vec<usize> = residuals
        .iter()
        .enumerate()
        .filter(|(_, r)| !(**r <= tol))
        .map(|(k, _)| k)
        .collect();
    let max_residual = residuals.iter().fold(0.0f64, |m, r| m.max(*r));
    Ok(IdentityReport {
        p,
        tolerance: tol,
        passed: failures.is_empty(),
        residuals,
        max_residual,
        failures,
    })
}

/// `N × N` section of the shift in the orthonormal basis `√(k+1) z^k`.
pub fn truncated_matrix(s: &WeightedShift, n: usize) -> Result<DMatrix<Complex64>> {
    if n > s.weights.len() {
        return Err(Error::Range(format!(
            "section of size {n} needs weights up to k = {}, only {} stored",
            n - 1,
            s.weights.len()
        )));
    }
    let p = s.degree as usize;
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for k in 0..n.saturating_sub(p) {
        let scale = ((k + 1) as f64 / (k + p + 1) as f64).sqrt();
        m[(k + p, k)] = s.weights[k] * scale;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn weights_of_simple_symbols() {
        // φ = 1, p = 1
        let s = shift_of_symbol(1, |z| Ok(c(1.0 / z)), 5).unwrap();
        assert!((s.weights[0].re - 4.0 / 3.0).abs() < 1e-15);
        for (k, w) in s.weights.iter().enumerate() {
            let k = k as f64;
            assert!((w.re - 2.0 * (k + 2.0) / (2.0 * k + 3.0)).abs() < 1e-15);
        }
        // φ = r + r², p = 2
        let s = shift_of_symbol(2, |z| Ok(c(1.0 / (z + 1.0) + 1.0 / (z + 2.0))), 0).unwrap();
        assert!((s.weights[0].re - 11.0 / 5.0).abs() < 1e-15);
    }

    #[test]
    fn powers() {
        let s = WeightedShift::real(1, &[2.0; 6]).unwrap();
        assert_eq!(compose_power(&s, 1).unwrap(), s);
        let p3 = compose_power(&s, 3).unwrap();
        assert_eq!(p3.degree, 3);
        assert_eq!(p3.weights.len(), 4);
        assert!(p3.weights.iter().all(|w| *w == c(8.0)));
        assert!(compose_power(&p3, 2).is_err());
        assert!(compose_power(&s, 7).is_err());
    }

    #[test]
    fn identity_of_a_root_with_itself() {
        let s = shift_of_symbol(1, |z| Ok(c(1.0 / z)), 20).unwrap();
        let rep = verify_identity(&s, &s, 1, 1e-15).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.max_residual, 0.0);
    }

    #[test]
    fn perturbed_weight_is_localized() {
        let root = WeightedShift::real(1, &[1.5; 12]).unwrap();
        let target = compose_power(&root, 3).unwrap();
        let mut bad = root.clone();
        bad.weights[6] *= 1.01;
        let rep = verify_identity(&target, &bad, 3, 1e-6).unwrap();
        assert!(!rep.passed);
        assert_eq!(rep.failures, vec![4, 5, 6]);
    }

    #[test]
    fn sections() {
        let s = WeightedShift::real(1, &[1.0; 3]).unwrap();
        let m = truncated_matrix(&s, 3).unwrap();
        assert!((m[(1, 0)].re - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((m[(2, 1)].re - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(m[(0, 0)], c(0.0));
        let zero = WeightedShift::real(2, &[0.0; 4]).unwrap();
        assert!(truncated_matrix(&zero, 4).unwrap().iter().all(|x| *x == c(0.0)));
        assert!(truncated_matrix(&s, 4).is_err());
    }

    #[test]
    fn section_of_power_is_power_of_section() {
        let weights: Vec<Complex64> = (0..64)
            .map(|k| Complex64::new(1.0 + 0.01 * k as f64, 0.1 * (k as f64).sin()))
            .collect();
        let s = WeightedShift::new(1, weights).unwrap();
        let n = 60;
        let p = 3;
        let pw = compose_power(&s, p).unwrap();
        let a = truncated_matrix(&pw, n).unwrap();
        let base = truncated_matrix(&s, n).unwrap();
        let b = &base * &base * &base;
        let scale = a.iter().fold(0.0f64, |m, x| m.max(x.norm()));
        for col in 0..n - p as usize {
            for row in 0..n {
                assert!((a[(row, col)] - b[(row, col)]).norm() <= 1e-12 * scale);
            }
        }
    }
}
