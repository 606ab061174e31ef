//! Double-exponential (tanh-sinh) quadrature on (0, 1).
//!
//! The substitution `x = (1 + tanh(π/2 · sinh t)) / 2` pushes algebraic and
//! logarithmic endpoint singularities out to `t → ±∞`, where the transformed
//! integrand decays double exponentially. The abscissa and its complement
//! `1 − x` are produced independently so that integrands can evaluate
//! `(1 − x)^s` without cancellation near the right endpoint.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute error floor for integrals whose value is (close to) zero.
pub const ABSOLUTE_FLOOR: f64 = 1e-14;

const FIRST_STEP: f64 = 0.5;
const T_MAX: f64 = 6.5;
const SMALLEST_ABSCISSA: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub relative_tolerance: f64,
    /// Number of step halvings after the initial step of 1/2.
    pub max_levels: usize,
    /// Exponents `(s0, s1)` of integrable singularities `x^s0`, `(1−x)^s1`.
    pub endpoint_hints: Option<(f64, f64)>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            relative_tolerance: 1e-10,
            max_levels: 9,
            endpoint_hints: None,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerance(relative_tolerance: f64) -> Self {
        Self {
            relative_tolerance,
            ..Self::default()
        }
    }

    pub fn with_hints(mut self, s0: f64, s1: f64) -> Self {
        self.endpoint_hints = Some((s0, s1));
        self
    }

    /// Same spec with the tolerance multiplied by `factor`.
    pub fn loosened(mut self, factor: f64) -> Self {
        self.relative_tolerance *= factor;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.relative_tolerance > 0.0) {
            return Err(Error::Range(format!(
                "relative tolerance must be positive, got {}",
                self.relative_tolerance
            )));
        }
        if let Some((s0, s1)) = self.endpoint_hints {
            if !(s0 > -1.0 && s1 > -1.0) {
                return Err(Error::Range(format!(
                    "endpoint exponents ({s0}, {s1}) are not integrable"
                )));
            }
        }
        Ok(())
    }
}

/// Result of a converged quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Abscissa, complement and weight at transformed coordinate `t`.
#[inline]
fn abscissa(t: f64) -> (f64, f64, f64) {
    let v = FRAC_PI_2 * t.sinh();
    let e = (-2.0 * v.abs()).exp();
    let small = e / (1.0 + e);
    let big = 1.0 / (1.0 + e);
    let w = PI * t.cosh() * small * big;
    if t >= 0.0 {
        (big, small, w)
    } else {
        (small, big, w)
    }
}

/// Integrate `f(x)` over (0, 1).
pub fn integrate01<F>(f: F, spec: &QuadratureSpec) -> Result<Quadrature>
where
    F: Fn(f64) -> f64,
{
    integrate01_split(|x, _| f(x), spec)
}

/// Integrate over (0, 1) where the integrand receives both `x` and `1 − x`.
pub fn integrate01_split<F>(f: F, spec: &QuadratureSpec) -> Result<Quadrature>
where
    F: Fn(f64, f64) -> f64,
{
    spec.validate()?;
    let mut state = Walker {
        f: &f,
        evaluations: 0,
        abs_sum: 0.0,
        peak: 0.0,
    };
    let non_finite = || Error::Accuracy {
        estimate: f64::NAN,
        error_estimate: f64::INFINITY,
    };

    let mut h = FIRST_STEP;
    let (_, _, w0) = abscissa(0.0);
    let centre = f(0.5, 0.5) * w0;
    if !centre.is_finite() {
        return Err(non_finite());
    }
    state.peak = centre.abs();
    state.evaluations = 1;
    let right = state.walk(h, h, 1.0).ok_or_else(non_finite)?;
    let left = state.walk(h, h, -1.0).ok_or_else(non_finite)?;
    let mut estimate = h * (centre + right + left);
    let mut error = f64::INFINITY;

    for level in 1..=spec.max_levels {
        h *= 0.5;
        let right = state.walk(h, 2.0 * h, 1.0).ok_or_else(non_finite)?;
        let left = state.walk(h, 2.0 * h, -1.0).ok_or_else(non_finite)?;
        let refined = 0.5 * estimate + h * (right + left);
        error = (refined - estimate).abs();
        estimate = refined;
        let target = (spec.relative_tolerance * estimate.abs()).max(ABSOLUTE_FLOOR);
        if level >= 2 && error <= target {
            let roundoff = 4.0 * f64::EPSILON * state.abs_sum / (level as f64 + 1.0);
            return Ok(Quadrature {
                value: estimate,
                error_estimate: error.max(roundoff),
                evaluations: state.evaluations,
            });
        }
    }
    Err(Error::Accuracy {
        estimate,
        error_estimate: error,
    })
}

/// Integrate over (0, 1) split at interior breakpoints, each given as a pair
/// `(x, 1 − x)` so that both sides of every piece keep full precision.
pub fn integrate01_pieces<F>(f: F, breaks: &[(f64, f64)], spec: &QuadratureSpec) -> Result<Quadrature>
where
    F: Fn(f64, f64) -> f64,
{
    let mut cuts: Vec<(f64, f64)> = breaks
        .iter()
        .copied()
        .filter(|(x, xc)| *x > 0.0 && *xc > 0.0)
        .collect();
    cuts.sort_by(|a, b| a.0.total_cmp(&b.0));
    cuts.dedup_by(|a, b| (a.0 - b.0).abs() <= 1e-14);
    if cuts.is_empty() {
        return integrate01_split(f, spec);
    }
    let mut ends = vec![(0.0, 1.0)];
    ends.extend(cuts);
    ends.push((1.0, 0.0));
    let mut total = Quadrature {
        value: 0.0,
        error_estimate: 0.0,
        evaluations: 0,
    };
    for w in ends.windows(2) {
        let ((x0, _), (x1, xc1)) = (w[0], w[1]);
        let len = if x0 == 0.0 { x1 } else if xc1 == 0.0 { w[0].1 } else { x1 - x0 };
        let piece = integrate01_split(
            |v, vc| {
                let x = if x0 == 0.0 { len * v } else { x0 + len * v };
                let xc = if xc1 == 0.0 { len * vc } else { xc1 + len * vc };
                len * f(x, xc)
            },
            spec,
        )?;
        total.value += piece.value;
        total.error_estimate += piece.error_estimate;
        total.evaluations += piece.evaluations;
    }
    Ok(total)
}

struct Walker<'a, F> {
    f: &'a F,
    evaluations: usize,
    abs_sum: f64,
    peak: f64,
}

impl<F: Fn(f64, f64) -> f64> Walker<'_, F> {
    /// Sum of f·w over t = sign·(offset + k·stride), k ≥ 0, walking outward
    /// until the terms are negligible. `None` on a non-finite term.
    fn walk(&mut self, offset: f64, stride: f64, sign: f64) -> Option<f64> {
        let mut sum = 0.0;
        let mut k = 0usize;
        loop {
            let t = sign * (offset + k as f64 * stride);
            if t.abs() > T_MAX {
                break;
            }
            let (x, xc, w) = abscissa(t);
            if x < SMALLEST_ABSCISSA || xc < SMALLEST_ABSCISSA {
                break;
            }
            let term = (self.f)(x, xc) * w;
            self.evaluations += 1;
            if !term.is_finite() {
                return None;
            }
            sum += term;
            self.abs_sum += term.abs() * stride;
            self.peak = self.peak.max(term.abs());
            if t.abs() > 1.0 && term.abs() <= 1e-20 * self.peak {
                break;
            }
            k += 1;
        }
        Some(sum)
    }
}
