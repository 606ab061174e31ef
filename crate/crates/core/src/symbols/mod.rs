//! Radial symbols and their Mellin transforms.
//!
//! A radial symbol is given either as a term sum `Σ c · r^a · (ln r)^b` or
//! directly by its Mellin transform in factored rational form
//! `K · ∏(z + a_j) / ∏(z + b_k)`. The Mellin transform used throughout is
//! `φ̂(z) = ∫₀¹ φ(r) r^{z−1} dr`.

pub mod poly;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specialfun::{integrate01_split, QuadratureSpec};
use crate::unit::UnitPoint;

use poly::{real_root_clusters, Poly};

/// Numerator roots whose imaginary part exceeds this are rejected.
pub const IMAGINARY_TOLERANCE: f64 = 1e-9;
/// Relative distance under which computed roots are treated as one repeated root.
pub const CLUSTER_TOLERANCE: f64 = 1e-4;
/// Relative distance under which a numerator and denominator root cancel.
pub const CANCEL_TOLERANCE: f64 = 1e-9;

/// One term `c · r^a · (ln r)^b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialTerm {
    pub c: f64,
    pub a: f64,
    pub b: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialTermSum {
    pub terms: Vec<RadialTerm>,
}

impl RadialTermSum {
    pub fn new(terms: Vec<RadialTerm>) -> Result<Self> {
        let s = Self { terms };
        s.validate()?;
        Ok(s)
    }

    /// Sum of plain powers `Σ r^a`.
    pub fn powers(exponents: &[f64]) -> Result<Self> {
        Self::new(
            exponents
                .iter()
                .map(|&a| RadialTerm { c: 1.0, a, b: 0 })
                .collect(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::Input("radial term sum has no terms".into()));
        }
        for t in &self.terms {
            if !t.c.is_finite() || !t.a.is_finite() {
                return Err(Error::Input(format!("non-finite term {t:?}")));
            }
            if t.a < 0.0 {
                return Err(Error::Range(format!(
                    "term power a = {} must be nonnegative",
                    t.a
                )));
            }
            if t.a == 0.0 && t.b != 0 {
                return Err(Error::Range(
                    "a log power on the constant term makes the symbol unbounded".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.eval_at(UnitPoint::from_r(r))
    }

    pub fn eval_at(&self, p: UnitPoint) -> f64 {
        let ln_r = p.ln_r();
        self.terms
            .iter()
            .map(|t| t.c * (t.a * ln_r).exp() * ln_r.powi(t.b as i32))
            .sum()
    }

    /// Smallest power among the nonzero terms and the largest log power
    /// attached to it.
    pub fn leading_behaviour(&self) -> (f64, u32) {
        let alpha = self
            .terms
            .iter()
            .filter(|t| t.c != 0.0)
            .map(|t| t.a)
            .fold(f64::INFINITY, f64::min);
        let logs = self
            .terms
            .iter()
            .filter(|t| t.c != 0.0 && t.a == alpha)
            .map(|t| t.b)
            .max()
            .unwrap_or(0);
        (alpha, logs)
    }
}

/// Radial part of a quasihomogeneous symbol `e^{ipθ} φ(r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasihomogeneousSymbol {
    pub degree: u32,
    pub radial: RadialTermSum,
}

impl QuasihomogeneousSymbol {
    pub fn new(degree: u32, radial: RadialTermSum) -> Result<Self> {
        if degree < 1 {
            return Err(Error::Range("quasihomogeneous degree must be >= 1".into()));
        }
        radial.validate()?;
        Ok(Self { degree, radial })
    }
}

/// `constant · ∏(z + a_j) / ∏(z + b_k)` with real shifts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalMellin {
    pub constant: f64,
    #[serde(rename = "num_roots")]
    pub numerator_roots: Vec<f64>,
    #[serde(rename = "den_roots")]
    pub denominator_roots: Vec<f64>,
}

impl RationalMellin {
    /// Validates, cancels common factors and sorts both root lists.
    pub fn new(constant: f64, numerator_roots: Vec<f64>, denominator_roots: Vec<f64>) -> Result<Self> {
        if !(constant != 0.0 && constant.is_finite()) {
            return Err(Error::Input(format!(
                "Mellin constant must be finite and nonzero, got {constant}"
            )));
        }
        if numerator_roots
            .iter()
            .chain(&denominator_roots)
            .any(|x| !x.is_finite())
        {
            return Err(Error::Input("non-finite root".into()));
        }
        let mut num = numerator_roots;
        let mut den = denominator_roots;
        num.retain(|a| {
            let hit = den
                .iter()
                .position(|b| (a - b).abs() <= CANCEL_TOLERANCE * a.abs().max(1.0));
            match hit {
                Some(i) => {
                    den.swap_remove(i);
                    false
                }
                None => true,
            }
        });
        if num.len() >= den.len() {
            return Err(Error::Properness {
                numerator: num.len(),
                denominator: den.len(),
            });
        }
        num.sort_by(f64::total_cmp);
        den.sort_by(f64::total_cmp);
        Ok(Self {
            constant,
            numerator_roots: num,
            denominator_roots: den,
        })
    }

    pub fn numerator_degree(&self) -> usize {
        self.numerator_roots.len()
    }

    pub fn denominator_degree(&self) -> usize {
        self.denominator_roots.len()
    }

    /// Distinct denominator roots with multiplicities.
    pub fn poles(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &b in &self.denominator_roots {
            match out.last_mut() {
                Some((v, m)) if (*v - b).abs() <= 1e-12 * b.abs().max(1.0) => *m += 1,
                _ => out.push((b, 1)),
            }
        }
        out
    }

    /// Inverse transform as a term sum, via partial fractions:
    /// `1/(z+b)^j` is the transform of `r^b (−ln r)^{j−1} / (j−1)!`.
    pub fn to_terms(&self) -> Result<RadialTermSum> {
        let poles = self.poles();
        let mut terms = Vec::new();
        for (idx, &(b, mult)) in poles.iter().enumerate() {
            // Laurent coefficients of (z+b)^mult · R(z) around z = −b, in w = z + b
            let mut series = vec![0.0; mult];
            series[0] = self.constant;
            for &a in &self.numerator_roots {
                mul_series_linear(&mut series, a - b);
            }
            for (jdx, &(other, m)) in poles.iter().enumerate() {
                if jdx != idx {
                    for _ in 0..m {
                        div_series_linear(&mut series, other - b);
                    }
                }
            }
            for (i, g) in series.iter().enumerate() {
                let j = mult - i; // power of 1/(z+b)
                let log_power = (j - 1) as u32;
                let c = g * if log_power.is_multiple_of(2) { 1.0 } else { -1.0 }
                    / factorial(log_power);
                if c != 0.0 {
                    terms.push(RadialTerm {
                        c,
                        a: b,
                        b: log_power,
                    });
                }
            }
        }
        RadialTermSum::new(terms)
    }
}

fn mul_series_linear(s: &mut [f64], d: f64) {
    for i in (0..s.len()).rev() {
        let prev = if i > 0 { s[i - 1] } else { 0.0 };
        s[i] = d * s[i] + prev;
    }
}

fn div_series_linear(s: &mut [f64], d: f64) {
    for i in 0..s.len() {
        let prev = if i > 0 { s[i - 1] } else { 0.0 };
        s[i] = (s[i] - prev) / d;
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Factored Mellin transform of a term sum.
///
/// Each term contributes `c (−1)^b b! / (z + a)^{b+1}`; the combined
/// numerator is factored into real linear factors.
pub fn mellin_of_terms(s: &RadialTermSum) -> Result<RationalMellin> {
    s.validate()?;
    // group by power, keeping the highest log power per group
    let mut groups: Vec<(f64, u32)> = Vec::new();
    for t in s.terms.iter().filter(|t| t.c != 0.0) {
        match groups
            .iter_mut()
            .find(|(a, _)| (a - t.a).abs() <= 1e-12 * t.a.abs().max(1.0))
        {
            Some(g) => g.1 = g.1.max(t.b),
            None => groups.push((t.a, t.b)),
        }
    }
    if groups.is_empty() {
        return Err(Error::UnsupportedSymbol("symbol is identically zero".into()));
    }

    let mut denominator_roots = Vec::new();
    for &(a, top) in &groups {
        denominator_roots.extend(std::iter::repeat_n(a, top as usize + 1));
    }

    let mut numerator = Poly::zero();
    for t in s.terms.iter().filter(|t| t.c != 0.0) {
        let gi = groups
            .iter()
            .position(|(a, _)| (a - t.a).abs() <= 1e-12 * t.a.abs().max(1.0))
            .expect("term was grouped");
        let mut part = Poly::constant(1.0);
        for (k, &(a, top)) in groups.iter().enumerate() {
            let reps = if k == gi { top - t.b } else { top + 1 };
            for _ in 0..reps {
                part = part.mul_linear(a);
            }
        }
        let sign = if t.b % 2 == 0 { 1.0 } else { -1.0 };
        numerator.add_scaled(&part, t.c * sign * factorial(t.b));
    }
    let numerator = numerator.trimmed(1e-13);
    if numerator.degree().is_none() {
        return Err(Error::UnsupportedSymbol("symbol is identically zero".into()));
    }
    let constant = numerator.leading();
    let clusters = real_root_clusters(&numerator, CLUSTER_TOLERANCE, IMAGINARY_TOLERANCE)
        .map_err(|z| {
            Error::UnsupportedSymbol(format!(
                "Mellin numerator has a non-real root {:.6}{:+.6}i",
                z.re, z.im
            ))
        })?;
    let numerator_roots = clusters
        .iter()
        .flat_map(|c| std::iter::repeat_n(-c.value, c.multiplicity))
        .collect();
    RationalMellin::new(constant, numerator_roots, denominator_roots)
}

/// `constant · ∏(z + a_j) / ∏(z + b_k)` at a complex point.
pub fn mellin_eval(rm: &RationalMellin, z: Complex64) -> Result<Complex64> {
    let mut value = Complex64::new(rm.constant, 0.0);
    for &b in &rm.denominator_roots {
        let f = z + b;
        if f.norm() <= 1e-15 * (1.0 + z.norm()) {
            return Err(Error::Pole { pole: -b });
        }
        value /= f;
    }
    for &a in &rm.numerator_roots {
        value *= z + a;
    }
    Ok(value)
}

/// Real-argument convenience wrapper around [`mellin_eval`].
pub fn mellin_eval_real(rm: &RationalMellin, z: f64) -> Result<f64> {
    mellin_eval(rm, Complex64::new(z, 0.0)).map(|v| v.re)
}

/// `∫₀¹ f(r) r^{z−1} dr` by quadrature.
pub fn mellin_numeric<F>(f: F, z: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    mellin_numeric_at(|p| f(p.r), z, spec)
}

/// As [`mellin_numeric`], for integrands that need the complement `1 − r`.
pub fn mellin_numeric_at<F>(f: F, z: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(UnitPoint) -> f64,
{
    if !(z > 0.0) {
        return Err(Error::Range(format!("Mellin argument must be positive, got {z}")));
    }
    integrate01_split(
        |r, rc| {
            let p = UnitPoint::new(r, rc);
            f(p) * ((z - 1.0) * p.ln_r()).exp()
        },
        spec,
    )
    .map(|q| q.value)
}
