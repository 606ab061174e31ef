use serde::{Deserialize, Serialize};

use super::envelope::TypeEnvelope;
use crate::unit::UnitPoint;

/// One term `c · r^a · (1−r)^{b−1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaTerm {
    pub c: f64,
    pub a: f64,
    pub b: f64,
}

impl BetaTerm {
    pub fn eval_at(&self, p: UnitPoint) -> f64 {
        if self.c == 0.0 {
            return 0.0;
        }
        self.c * (self.a * p.ln_r() + (self.b - 1.0) * p.rc.ln()).exp()
    }
}

/// Finite sum of Beta terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaTermFunction {
    pub terms: Vec<BetaTerm>,
}

/// `x (x−1) ⋯ (x−k+1)`.
pub(crate) fn falling(x: f64, k: usize) -> f64 {
    (0..k).map(|i| x - i as f64).product()
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl BetaTermFunction {
    pub fn single(a: f64, b: f64) -> Self {
        Self {
            terms: vec![BetaTerm { c: 1.0, a, b }],
        }
    }

    pub fn scaled(mut self, c: f64) -> Self {
        for t in &mut self.terms {
            t.c *= c;
        }
        self
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.eval_at(UnitPoint::from_r(r))
    }

    pub fn eval_at(&self, p: UnitPoint) -> f64 {
        self.terms.iter().map(|t| t.eval_at(p)).sum()
    }

    /// Values of the derivatives of order `0..out.len()` at `p`.
    pub fn derivs_at(&self, p: UnitPoint, out: &mut [f64]) {
        out.fill(0.0);
        let ln_r = p.ln_r();
        let ln_rc = p.rc.ln();
        for t in self.terms.iter().filter(|t| t.c != 0.0) {
            for (k, slot) in out.iter_mut().enumerate() {
                // Leibniz over r^a and (1−r)^{b−1}
                let mut sum = 0.0;
                for i in 0..=k {
                    let j = k - i;
                    let fa = falling(t.a, i);
                    let fb = falling(t.b - 1.0, j);
                    if fa == 0.0 || fb == 0.0 {
                        continue;
                    }
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    let pow = ((t.a - i as f64) * ln_r + (t.b - 1.0 - j as f64) * ln_rc).exp();
                    sum += binomial(k, i) * fa * fb * sign * pow;
                }
                *slot += t.c * sum;
            }
        }
    }

    /// Closed-form k-th derivative as a Beta-term sum.
    pub fn derivative(&self, k: usize) -> BetaTermFunction {
        let mut f = self.clone();
        for _ in 0..k {
            let mut terms = Vec::with_capacity(2 * f.terms.len());
            for t in &f.terms {
                if t.a != 0.0 {
                    terms.push(BetaTerm {
                        c: t.c * t.a,
                        a: t.a - 1.0,
                        b: t.b,
                    });
                }
                if t.b != 1.0 {
                    terms.push(BetaTerm {
                        c: -t.c * (t.b - 1.0),
                        a: t.a,
                        b: t.b - 1.0,
                    });
                }
            }
            f = BetaTermFunction { terms };
        }
        f
    }

    /// `(A' − rD) f`, whose Mellin transform is `(ζ + A') f̂(ζ)`.
    pub fn apply_diff_factor(&self, a_prime: f64) -> BetaTermFunction {
        let mut terms = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            if a_prime != t.a {
                terms.push(BetaTerm {
                    c: t.c * (a_prime - t.a),
                    a: t.a,
                    b: t.b,
                });
            }
            if t.b != 1.0 {
                terms.push(BetaTerm {
                    c: t.c * (t.b - 1.0),
                    a: t.a + 1.0,
                    b: t.b - 1.0,
                });
            }
        }
        BetaTermFunction { terms }
    }

    /// Envelope of the dominant term: smallest `a` and smallest `b`.
    pub fn envelope(&self) -> TypeEnvelope {
        let live = self.terms.iter().filter(|t| t.c != 0.0);
        let a = live.clone().map(|t| t.a).fold(f64::INFINITY, f64::min);
        let b = live.map(|t| t.b).fold(f64::INFINITY, f64::min);
        TypeEnvelope::single(a, b)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.c == 0.0)
    }
}
