use num_complex::Complex64;
use proptest::prelude::*;

use toeplitz_roots::convolve::{convolve_all, convolve_pair, BetaTermFunction, LogitGrid};
use toeplitz_roots::gammafactor::{
    build_quotients, eval_factored, pair_optimize, to_beta_factors, GammaQuotientProduct,
};
use toeplitz_roots::roots::mellin_of_grid;
use toeplitz_roots::specialfun::{beta, integrate01, log_gamma, QuadratureSpec};
use toeplitz_roots::symbols::{
    mellin_eval_real, mellin_numeric, mellin_numeric_at, mellin_of_terms, RadialTerm,
    RadialTermSum, RationalMellin,
};
use toeplitz_roots::toeplitz::{
    compose_power, shift_of_symbol, truncated_matrix, verify_identity, WeightedShift,
};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn radial_term() -> impl Strategy<Value = RadialTerm> {
    (0.1f64..2.0, any::<bool>(), 0.0f64..4.0, 0u32..=2).prop_map(|(c, neg, a, b)| RadialTerm {
        c: if neg { -c } else { c },
        a: if b > 0 { a.max(0.25) } else { a },
        b,
    })
}

fn radial_sum() -> impl Strategy<Value = RadialTermSum> {
    prop::collection::vec(radial_term(), 1..=4).prop_map(|t| RadialTermSum::new(t).unwrap())
}

/// Real Mellin data that satisfies the positivity preconditions for `p`.
fn rational_for(p: u32) -> impl Strategy<Value = RationalMellin> {
    let lo = 1.0 - f64::from(p) + 0.05;
    (1usize..=4)
        .prop_flat_map(move |n| {
            (
                0.2f64..5.0,
                prop::collection::vec(lo..4.0, 0..n),
                prop::collection::vec(0.0f64..5.0, n),
            )
        })
        .prop_filter_map("common roots", |(c, num, den)| RationalMellin::new(c, num, den).ok())
}

fn gamma_product() -> impl Strategy<Value = GammaQuotientProduct> {
    prop::collection::vec((0.05f64..3.0, 0.05f64..3.0), 1..=5)
        .prop_map(|pairs| GammaQuotientProduct { constant: 1.0, pairs })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn log_gamma_recurrence(x in 0.1f64..100.0) {
        let d = log_gamma(x + 1.0).unwrap() - log_gamma(x).unwrap() - x.ln();
        prop_assert!(d.abs() <= 1e-12, "{d}");
    }

    #[test]
    fn beta_is_symmetric(x in 0.05f64..50.0, y in 0.05f64..50.0) {
        let (a, b) = (beta(x, y).unwrap(), beta(y, x).unwrap());
        prop_assert!(rel(a, b) <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn quadrature_of_powers(z in 0.5f64..50.0) {
        let spec = QuadratureSpec::default();
        let q = integrate01(|r| r.powf(z - 1.0), &spec).unwrap();
        prop_assert!(rel(q.value, 1.0 / z) <= spec.relative_tolerance, "z={z}");
    }

    #[test]
    fn mellin_round_trip(s in radial_sum(), zs in prop::collection::vec(2.0f64..30.0, 20)) {
        let Ok(rm) = mellin_of_terms(&s) else { return Ok(()) };
        prop_assert!(rm.numerator_degree() < rm.denominator_degree());
        let spec = QuadratureSpec::default();
        for z in zs {
            let closed = mellin_eval_real(&rm, z).unwrap();
            let numeric = mellin_numeric_at(|p| s.eval_at(p), z, &spec).unwrap();
            // cancelling terms are measured against the sum of their sizes
            let scale: f64 = s.terms.iter().map(|t| {
                let one = RadialTermSum::new(vec![*t]).unwrap();
                mellin_eval_real(&mellin_of_terms(&one).unwrap(), z).unwrap().abs()
            }).sum();
            prop_assert!((closed - numeric).abs() <= 1e-8 * scale.max(closed.abs()), "z={z}");
        }
    }

    #[test]
    fn mellin_of_beta_factor(a in 0.0f64..3.0, b in 0.3f64..3.0, z in 1.0f64..20.0) {
        let f = BetaTermFunction::single(a, b);
        let got = mellin_numeric_at(|p| f.eval_at(p), z, &QuadratureSpec::default()).unwrap();
        prop_assert!(rel(got, beta(z + a, b).unwrap()) <= 1e-8);
    }

    #[test]
    fn pairing_preserves_the_product(g in gamma_product(), zs in prop::collection::vec(0.01f64..5.0, 10)) {
        let opt = pair_optimize(&g);
        for zeta in zs {
            prop_assert!(rel(opt.eval(zeta).unwrap(), g.eval(zeta).unwrap()) <= 1e-10);
        }
    }

    #[test]
    fn normalization_preserves_the_product(
        (p, rm) in (2u32..=6).prop_flat_map(|p| (Just(p), rational_for(p))),
        optimize in any::<bool>(),
        zs in prop::collection::vec(0.01f64..5.0, 10),
    ) {
        let raw = build_quotients(&rm, p).unwrap();
        let g = if optimize { pair_optimize(&raw) } else { raw };
        let bf = to_beta_factors(&g).unwrap();
        for zeta in zs {
            prop_assert!(rel(eval_factored(&bf, zeta).unwrap(), g.eval(zeta).unwrap()) <= 1e-10);
        }
    }

    #[test]
    fn canonical_exponent_budget((p, rm) in (2u32..=6).prop_flat_map(|p| (Just(p), rational_for(p)))) {
        let bf = to_beta_factors(&build_quotients(&rm, p).unwrap()).unwrap();
        let (m, n, pf) = (rm.numerator_degree() as f64, rm.denominator_degree() as f64, f64::from(p));
        let want = m + 1.0 + (n - m - 1.0) / pf;
        prop_assert!((bf.exponent_budget() - want).abs() <= 1e-12 * want);
    }
}

#[test]
fn optimized_budget_of_r_plus_r_squared_is_one() {
    let rm = RationalMellin::new(2.0, vec![1.5], vec![1.0, 2.0]).unwrap();
    for p in 2..=8 {
        let bf = to_beta_factors(&pair_optimize(&build_quotients(&rm, p).unwrap())).unwrap();
        assert!((bf.exponent_budget() - 1.0).abs() < 1e-12, "p={p}");
        let canonical = to_beta_factors(&build_quotients(&rm, p).unwrap()).unwrap();
        assert!((canonical.exponent_budget() - 2.0).abs() < 1e-12, "p={p}");
    }
}

fn factor() -> impl Strategy<Value = (f64, f64)> {
    (0.1f64..3.0, 0.3f64..2.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn convolution_commutes(f in factor(), g in factor()) {
        let grid = LogitGrid::with_nodes(128).unwrap();
        let spec = QuadratureSpec::default();
        let (f, g) = (BetaTermFunction::single(f.0, f.1), BetaTermFunction::single(g.0, g.1));
        let fg = convolve_pair(&f, &g, grid, &spec).unwrap();
        let gf = convolve_pair(&g, &f, grid, &spec).unwrap();
        for (a, b) in fg.values().iter().zip(gf.values()) {
            prop_assert!((a - b).abs() <= 1e-9 * b.abs());
        }
    }

    #[test]
    fn convolution_associates(f in factor(), g in factor(), h in factor()) {
        let grid = LogitGrid::default();
        let spec = QuadratureSpec::default();
        let [f, g, h] = [f, g, h].map(|(a, b)| BetaTermFunction::single(a, b));
        let left = convolve_pair(&h, &convolve_pair(&f, &g, grid, &spec).unwrap(), grid, &spec).unwrap();
        let right = convolve_pair(&f, &convolve_pair(&g, &h, grid, &spec).unwrap(), grid, &spec).unwrap();
        for (i, pt) in grid.points().iter().enumerate() {
            if pt.r < 1e-3 || pt.rc < 1e-3 {
                continue;
            }
            let (a, b) = (left.values()[i], right.values()[i]);
            prop_assert!((a - b).abs() <= 1e-7 * b.abs(), "r={}", pt.r);
        }
    }

    #[test]
    fn convolution_multiplies_transforms(set in prop::collection::vec(factor(), 2..=3)) {
        let fs: Vec<_> = set.iter().map(|&(a, b)| BetaTermFunction::single(a, b)).collect();
        let h = convolve_all(&fs, LogitGrid::default(), &QuadratureSpec::default()).unwrap();
        for z in [3.0, 5.0, 7.0, 11.0] {
            let want: f64 = set.iter().map(|&(a, b)| beta(z + a, b).unwrap()).product();
            let got = mellin_of_grid(&h, z, &QuadratureSpec::with_tolerance(1e-11)).unwrap();
            prop_assert!(rel(got, want) <= 1e-7, "z={z}");
        }
    }
}

fn weights(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((0.2f64..2.0, -1.0f64..1.0), len)
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sections_of_powers(p in 1u32..=4, n in 8usize..40, w in weights(48)) {
        let s = WeightedShift::new(1, w).unwrap();
        let a = truncated_matrix(&compose_power(&s, p).unwrap(), n).unwrap();
        let base = truncated_matrix(&s, n).unwrap();
        let mut b = base.clone();
        for _ in 1..p {
            b = &b * &base;
        }
        let scale = b.iter().fold(0.0f64, |m, x| m.max(x.norm())).max(f64::MIN_POSITIVE);
        for col in 0..n - p as usize {
            for row in 0..n {
                prop_assert!((a[(row, col)] - b[(row, col)]).norm() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn monomial_weights_match_the_projection(m in 0u32..6, p in 1u32..5, k in 0usize..30) {
        let s = shift_of_symbol(p, |z| Ok(Complex64::new(1.0 / (z + f64::from(m)), 0.0)), k).unwrap();
        // ⟨T z^k, z^{k+p}⟩ / ‖z^{k+p}‖² = 2(k+p+1) ∫ r^m r^{2k+p+1} dr
        let exponent = f64::from(m) + 2.0 * k as f64 + f64::from(p) + 1.0;
        let integral = mellin_numeric(|r| r.powf(exponent), 1.0, &QuadratureSpec::default()).unwrap();
        let want = 2.0 * (k + p as usize + 1) as f64 * integral;
        prop_assert!(rel(s.weights[k].re, want) <= 1e-9);
    }

    #[test]
    fn passing_verification_bounds_the_sections(
        p in 1u32..=4,
        w in weights(40),
        noise in prop::collection::vec(-1.0f64..1.0, 40),
    ) {
        let tol = 1e-6;
        let root = WeightedShift::new(1, w).unwrap();
        let exact = compose_power(&root, p).unwrap();
        let target = WeightedShift::new(
            p,
            exact.weights.iter().zip(&noise).map(|(x, e)| x * (1.0 + tol * e)).collect(),
        ).unwrap();
        let rep = verify_identity(&target, &root, p, tol).unwrap();
        prop_assert!(rep.passed);
        let n = target.weights.len();
        let t = truncated_matrix(&target, n).unwrap();
        let s = truncated_matrix(&root, n).unwrap();
        let mut sp = s.clone();
        for _ in 1..p {
            sp = &sp * &s;
        }
        let maxw = target.weights.iter().fold(0.0f64, |m, x| m.max(x.norm()));
        for col in 0..n - p as usize {
            let diff = (0..n).map(|row| (sp[(row, col)] - t[(row, col)]).norm()).fold(0.0, f64::max);
            prop_assert!(diff <= tol * maxw * (1.0 + 1e-9));
        }
    }
}
