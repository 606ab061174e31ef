//! Gamma-quotient factorization of `λ(ζ) = ψ̂(2pζ)` and its normalization
//! into Beta factors.
//!
//! For `φ̂(z) = K ∏(z + a_j) / ∏(z + b_k)` the functional equation of the
//! root is solved by the product of Gamma quotients `Γ(ζ + num)/Γ(ζ + den)`
//! over the pairs
//!
//! ```text
//! (A₀, A'₀)   = (1/(2p), (2p−1)/(2p))
//! (A_j, A'_j) = ((a_j+p+1)/(2p), (a_j+p−1)/(2p))
//! (B_k, B'_k) = ((b_k+p−1)/(2p), (b_k+p+1)/(2p))
//! ```
//!
//! Each quotient with `num < den` is `B(ζ+num, den−num)/Γ(den−num)`; a
//! quotient with `den < num < den+1` first uses `Γ(ζ+den+1) = (ζ+den)Γ(ζ+den)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specialfun::{ln_beta, log_gamma, log_gamma_unchecked};
use crate::symbols::RationalMellin;

/// Pairs closer than this are treated as equal and cancel.
pub const EQUAL_PAIR_TOLERANCE: f64 = 1e-12;

/// `constant · ∏ Γ(ζ + num)/Γ(ζ + den)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaQuotientProduct {
    pub constant: f64,
    pub pairs: Vec<(f64, f64)>,
}

impl GammaQuotientProduct {
    pub fn eval(&self, zeta: f64) -> Result<f64> {
        let mut log = 0.0;
        for &(num, den) in &self.pairs {
            log += log_gamma(zeta + num)? - log_gamma(zeta + den)?;
        }
        Ok(self.constant * log.exp())
    }

    /// `Σ den − Σ num`.
    pub fn parameter_gap(&self) -> f64 {
        self.pairs.iter().map(|(n, d)| d - n).sum()
    }
}

/// `constant · ∏ B(ζ + a, b) · ∏ (ζ + A')`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaFactorization {
    pub constant: f64,
    pub beta_factors: Vec<(f64, f64)>,
    pub diff_factors: Vec<f64>,
}

impl BetaFactorization {
    /// `Σ b` over the Beta factors.
    pub fn exponent_budget(&self) -> f64 {
        self.beta_factors.iter().map(|(_, b)| b).sum()
    }
}

/// Gamma-quotient pairs for the root of degree-`p` symbol with transform `rm`.
///
/// The constant is left at 1; the scale of the root is fixed by calibration.
pub fn build_quotients(rm: &RationalMellin, p: u32) -> Result<GammaQuotientProduct> {
    if p < 2 {
        return Err(Error::Range(format!(
            "Gamma factorization needs p >= 2, got {p}; degree one is its own root"
        )));
    }
    let two_p = 2.0 * f64::from(p);
    let pf = f64::from(p);
    let mut pairs = vec![(1.0 / two_p, (two_p - 1.0) / two_p)];

    let check = |name: String, value: f64, root: f64| {
        if value > 0.0 {
            Ok(value)
        } else {
            Err(Error::Positivity { name, value, root })
        }
    };
    for (j, &a) in rm.numerator_roots.iter().enumerate() {
        let num = check(format!("A_{}", j + 1), (a + pf + 1.0) / two_p, a)?;
        let den = check(format!("A'_{}", j + 1), (a + pf - 1.0) / two_p, a)?;
        pairs.push((num, den));
    }
    for (k, &b) in rm.denominator_roots.iter().enumerate() {
        let num = check(format!("B_{}", k + 1), (b + pf - 1.0) / two_p, b)?;
        let den = check(format!("B'_{}", k + 1), (b + pf + 1.0) / two_p, b)?;
        pairs.push((num, den));
    }
    Ok(GammaQuotientProduct {
        constant: 1.0,
        pairs,
    })
}

/// Re-pair sorted numerator parameters against sorted denominator parameters.
pub fn pair_optimize(g: &GammaQuotientProduct) -> GammaQuotientProduct {
    let mut nums: Vec<f64> = g.pairs.iter().map(|p| p.0).collect();
    let mut dens: Vec<f64> = g.pairs.iter().map(|p| p.1).collect();
    nums.sort_by(f64::total_cmp);
    dens.sort_by(f64::total_cmp);
    GammaQuotientProduct {
        constant: g.constant,
        pairs: nums.into_iter().zip(dens).collect(),
    }
}

/// Normalize each Gamma quotient into a Beta factor, using at most one shift.
pub fn to_beta_factors(g: &GammaQuotientProduct) -> Result<BetaFactorization> {
    let mut log_scale = 0.0;
    let mut beta_factors = Vec::new();
    let mut diff_factors = Vec::new();
    for &(num, den) in &g.pairs {
        if !(num > 0.0 && den > 0.0) {
            return Err(Error::Positivity {
                name: "Gamma parameter".into(),
                value: num.min(den),
                root: f64::NAN,
            });
        }
        if (num - den).abs() <= EQUAL_PAIR_TOLERANCE * num.max(1.0) {
            continue;
        }
        let b = if num < den {
            den - num
        } else if num < den + 1.0 {
            diff_factors.push(den);
            den + 1.0 - num
        } else {
            return Err(Error::UnsupportedConfiguration { num, den });
        };
        log_scale -= log_gamma_unchecked(b);
        beta_factors.push((num, b));
    }
    Ok(BetaFactorization {
        constant: g.constant * log_scale.exp(),
        beta_factors,
        diff_factors,
    })
}

/// `constant · ∏ B(ζ+a, b) · ∏ (ζ+A')`.
pub fn eval_factored(bf: &BetaFactorization, zeta: f64) -> Result<f64> {
    if !(zeta > 0.0) {
        return Err(Error::Range(format!("zeta must be positive, got {zeta}")));
    }
    let mut log = 0.0;
    for &(a, b) in &bf.beta_factors {
        log += ln_beta(zeta + a, b)?;
    }
    let poly: f64 = bf.diff_factors.iter().map(|d| zeta + d).product();
    Ok(bf.constant * log.exp() * poly)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close_pairs(got: &[(f64, f64)], want: &[(f64, f64)]) -> bool {
        got.len() == want.len()
            && got
                .iter()
                .zip(want)
                .all(|(g, w)| (g.0 - w.0).abs() < 1e-14 && (g.1 - w.1).abs() < 1e-14)
    }

    fn r_plus_r2() -> RationalMellin {
        RationalMellin::new(2.0, vec![1.5], vec![1.0, 2.0]).unwrap()
    }

    #[test]
    fn quotients_for_r_plus_r_squared() {
        let g = build_quotients(&r_plus_r2(), 2).unwrap();
        assert!(close_pairs(
            &g.pairs,
            &[(0.25, 0.75), (1.125, 0.625), (0.5, 1.0), (0.75, 1.25)]
        ));
    }

    #[test]
    fn quotients_for_monomials() {
        let rm = RationalMellin::new(1.0, vec![], vec![1.0]).unwrap();
        let g = build_quotients(&rm, 2).unwrap();
        assert!(close_pairs(&g.pairs, &[(0.25, 0.75), (0.5, 1.0)]));

        let rm = RationalMellin::new(1.0, vec![], vec![0.0]).unwrap();
        let g = build_quotients(&rm, 3).unwrap();
        assert!(close_pairs(&g.pairs, &[(1.0 / 6.0, 5.0 / 6.0), (2.0 / 6.0, 4.0 / 6.0)]));
    }

    #[test]
    fn degree_one_is_rejected() {
        assert!(matches!(build_quotients(&r_plus_r2(), 1), Err(Error::Range(_))));
    }

    #[test]
    fn positivity_names_the_root() {
        // a numerator root at −2 gives A'_1 = (−2 + 1)/4 < 0 for p = 2
        let rm = RationalMellin::new(1.0, vec![-2.0], vec![1.0, 2.0]).unwrap();
        match build_quotients(&rm, 2) {
            Err(Error::Positivity { name, root, .. }) => {
                assert_eq!(name, "A'_1");
                assert_eq!(root, -2.0);
            }
            other => panic!("expected positivity error, got {other:?}"),
        }
    }

    #[test]
    fn sorted_pairing() {
        let g = build_quotients(&r_plus_r2(), 2).unwrap();
        let opt = pair_optimize(&g);
        assert!(close_pairs(
            &opt.pairs,
            &[(0.25, 0.625), (0.5, 0.75), (0.75, 1.0), (1.125, 1.25)]
        ));
        assert_eq!(pair_optimize(&opt), opt);
        let single = GammaQuotientProduct {
            constant: 3.0,
            pairs: vec![(0.4, 0.2)],
        };
        assert_eq!(pair_optimize(&single), single);
    }

    #[test]
    fn normalization_examples() {
        let bf = to_beta_factors(&GammaQuotientProduct {
            constant: 1.0,
            pairs: vec![(0.25, 0.625), (0.75, 0.75), (1.125, 0.625)],
        })
        .unwrap();
        assert_eq!(bf.beta_factors.len(), 2);
        assert!((bf.beta_factors[0].0 - 0.25).abs() < 1e-15);
        assert!((bf.beta_factors[0].1 - 0.375).abs() < 1e-15);
        assert!((bf.beta_factors[1].0 - 1.125).abs() < 1e-15);
        assert!((bf.beta_factors[1].1 - 0.5).abs() < 1e-15);
        assert_eq!(bf.diff_factors, vec![0.625]);

        let err = to_beta_factors(&GammaQuotientProduct {
            constant: 1.0,
            pairs: vec![(2.5, 1.0)],
        });
        assert!(matches!(err, Err(Error::UnsupportedConfiguration { .. })));
    }

    #[test]
    fn factored_evaluation() {
        let bf = BetaFactorization {
            constant: 1.0,
            beta_factors: vec![(0.0, 1.0)],
            diff_factors: vec![],
        };
        assert!((eval_factored(&bf, 2.0).unwrap() - 0.5).abs() < 1e-15);
        let empty = BetaFactorization {
            constant: 1.0,
            beta_factors: vec![],
            diff_factors: vec![],
        };
        assert_eq!(eval_factored(&empty, 0.7).unwrap(), 1.0);
    }

    #[test]
    fn both_pairings_match_raw_gamma_quotients() {
        let g = build_quotients(&r_plus_r2(), 2).unwrap();
        for bf in [
            to_beta_factors(&g).unwrap(),
            to_beta_factors(&pair_optimize(&g)).unwrap(),
        ] {
            for zeta in [0.1, 1.5, 4.9] {
                let raw = g.eval(zeta).unwrap();
                let fac = eval_factored(&bf, zeta).unwrap();
                assert!(((raw - fac) / raw).abs() < 1e-12, "zeta={zeta}");
            }
        }
    }

    #[test]
    fn exponent_budgets() {
        let g = build_quotients(&r_plus_r2(), 2).unwrap();
        let canonical = to_beta_factors(&g).unwrap();
        // m + 1 + (n − m − 1)/p with m = 1, n = 2
        assert!((canonical.exponent_budget() - 2.0).abs() < 1e-14);
        for p in [2, 3, 5, 8] {
            let g = build_quotients(&r_plus_r2(), p).unwrap();
            let opt = to_beta_factors(&pair_optimize(&g)).unwrap();
            assert!((opt.exponent_budget() - 1.0).abs() < 1e-14, "p={p}");
            assert!(opt.diff_factors.is_empty());
        }
    }
}
