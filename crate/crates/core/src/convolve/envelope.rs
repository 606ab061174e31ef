use serde::{Deserialize, Serialize};

use crate::unit::UnitPoint;

/// Powers closer than this count as the same power when taking multiplicities.
const SAME_POWER: f64 = 1e-12;

/// Growth envelope `r^α (1−r)^{β−1} (ln(e/r))^{l}` of a convolution product
/// of factors of type `(aᵢ, bᵢ)`, or of its derivative of the given order.
///
/// `α = min aᵢ − order`, `β = Σ bᵢ − order` and `l` is one less than the
/// number of factors attaining the minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeEnvelope {
    pub a_list: Vec<f64>,
    pub beta_sum: f64,
    #[serde(default)]
    pub derivative_order: u32,
}

impl TypeEnvelope {
    pub fn new(a_list: Vec<f64>, beta_sum: f64) -> Self {
        Self {
            a_list,
            beta_sum,
            derivative_order: 0,
        }
    }

    /// Envelope of a single factor `r^a (1−r)^{b−1}`.
    pub fn single(a: f64, b: f64) -> Self {
        Self::new(vec![a], b)
    }

    fn min_a(&self) -> f64 {
        self.a_list.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn alpha(&self) -> f64 {
        self.min_a() - f64::from(self.derivative_order)
    }

    pub fn beta(&self) -> f64 {
        self.beta_sum - f64::from(self.derivative_order)
    }

    pub fn log_power(&self) -> u32 {
        let m = self.min_a();
        let l = self
            .a_list
            .iter()
            .filter(|a| (*a - m).abs() <= SAME_POWER * m.abs().max(1.0))
            .count();
        l.saturating_sub(1) as u32
    }

    /// Envelope of the convolution of two functions with these envelopes.
    pub fn merge(&self, other: &TypeEnvelope) -> TypeEnvelope {
        let mut a_list = self.a_list.clone();
        a_list.extend_from_slice(&other.a_list);
        TypeEnvelope::new(a_list, self.beta_sum + other.beta_sum)
    }

    /// Envelope of the k-th derivative.
    pub fn differentiated(&self, k: u32) -> TypeEnvelope {
        TypeEnvelope {
            derivative_order: self.derivative_order + k,
            ..self.clone()
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.eval_at(UnitPoint::from_r(r))
    }

    pub fn eval_at(&self, p: UnitPoint) -> f64 {
        let ln_r = p.ln_r();
        let mut log = self.alpha() * ln_r + (self.beta() - 1.0) * p.rc.ln();
        let l = self.log_power();
        if l > 0 {
            log += f64::from(l) * (1.0 - ln_r).ln();
        }
        log.exp()
    }
}
