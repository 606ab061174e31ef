//! Construction of the radial symbol `ψ` of a degree-one root `S` with
//! `S^p = T_{e^{ipθ}φ}`.
//!
//! With `λ(ζ) = ψ̂(2pζ)` the root identity becomes a product of Gamma
//! quotients (see [`crate::gammafactor`]), normalized into Beta factors
//! `B(ζ+a, b)` and linear factors `(ζ+A')`. The inverse transform of the
//! Beta part is the convolution product `h` of the functions
//! `r^a (1−r)^{b−1}`, the linear factors turn it into
//! `H = ∏ (A' − rD) h`, and `ψ(r) = 2p C H(r^{2p})`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::convolve::{
    convolve_all_derivatives, BetaTermFunction, GridFunction, LogitGrid, TypeEnvelope,
    DEFAULT_DELTA, DEFAULT_NODES,
};
use crate::error::{Error, Result};
use crate::gammafactor::{
    build_quotients, eval_factored, pair_optimize, to_beta_factors, BetaFactorization,
};
use crate::specialfun::{integrate01_pieces, QuadratureSpec};
use crate::symbols::{mellin_eval, mellin_of_terms, QuasihomogeneousSymbol, RadialTermSum, RationalMellin};
use crate::toeplitz::{shift_of_symbol, verify_identity, IdentityReport};
use crate::unit::UnitPoint;

pub const CLOSED_TOLERANCE: f64 = 1e-6;
pub const NUMERIC_TOLERANCE: f64 = 1e-4;
pub const DEFAULT_K_MAX: usize = 50;
/// Relative tolerance of the quadrature behind numeric Mellin values.
const NUMERIC_MELLIN_TOLERANCE: f64 = 1e-9;
/// Retry tolerance for profiles that are not smooth (e.g. edited by hand);
/// still far below the numeric-mode residual tolerance.
const NUMERIC_MELLIN_RETRY: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pairing {
    Optimized,
    Canonical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MellinMode {
    Closed,
    Numeric,
}

impl MellinMode {
    pub fn default_tolerance(self) -> f64 {
        match self {
            MellinMode::Closed => CLOSED_TOLERANCE,
            MellinMode::Numeric => NUMERIC_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootOptions {
    pub grid_nodes: usize,
    pub delta: f64,
    pub quadrature: QuadratureSpec,
    pub pairing: Pairing,
    /// Which of the `p` roots of `C^p` to take; 0 is the principal root.
    pub branch: u32,
    pub k_max: usize,
    pub mode: MellinMode,
    /// Residual tolerance; the mode's default when absent.
    pub tolerance: Option<f64>,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            grid_nodes: DEFAULT_NODES,
            delta: DEFAULT_DELTA,
            quadrature: QuadratureSpec::default(),
            pairing: Pairing::Optimized,
            branch: 0,
            k_max: DEFAULT_K_MAX,
            mode: MellinMode::Closed,
            tolerance: None,
        }
    }
}

impl RootOptions {
    pub fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or_else(|| self.mode.default_tolerance())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootProblem {
    pub p: u32,
    pub rational: RationalMellin,
    /// Term form of `φ`, when known.
    pub terms: Option<RadialTermSum>,
    pub options: RootOptions,
}

impl RootProblem {
    pub fn from_symbol(symbol: &QuasihomogeneousSymbol, options: RootOptions) -> Result<Self> {
        Ok(Self {
            p: symbol.degree,
            rational: mellin_of_terms(&symbol.radial)?,
            terms: Some(symbol.radial.clone()),
            options,
        })
    }

    pub fn from_rational(p: u32, rational: RationalMellin, options: RootOptions) -> Result<Self> {
        if p < 1 {
            return Err(Error::Range("degree p must be >= 1".into()));
        }
        Ok(Self {
            p,
            rational,
            terms: None,
            options,
        })
    }
}

/// Residual report and summary numbers of a construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub mode: MellinMode,
    pub report: IdentityReport,
    pub sup_psi: f64,
    /// Envelope of `H` (or of `φ` when `p = 1`).
    pub envelope: TypeEnvelope,
}

/// `ψ = constant · profile`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootResult {
    pub p: u32,
    pub profile: GridFunction,
    pub constant: Complex64,
    pub rational: RationalMellin,
    pub factorization: Option<BetaFactorization>,
    pub pairing: Pairing,
    /// Convolution product `h` on the `t = r^{2p}` grid.
    pub h: Option<GridFunction>,
    /// `H = ∏(A' − rD) h` on the same grid.
    pub big_h: Option<GridFunction>,
    pub diagnostics: Diagnostics,
}

impl RootResult {
    pub fn passed(&self) -> bool {
        self.diagnostics.report.passed
    }

    /// `ψ` at the profile nodes.
    pub fn psi_values(&self) -> Vec<Complex64> {
        self.profile.values().iter().map(|v| self.constant * v).collect()
    }

    pub fn psi_at(&self, r: f64) -> Result<Complex64> {
        Ok(self.constant * self.profile.eval(r)?)
    }

    /// Nodes whose `t = r^{2p}` lies inside the grid of `H`.
    pub fn interior_nodes(&self) -> Vec<usize> {
        let Some(big_h) = &self.big_h else {
            return (0..self.profile.len()).collect();
        };
        let g = big_h.grid();
        let (lo, hi) = (g.point(0), g.point(g.n - 1));
        self.profile
            .grid()
            .points()
            .iter()
            .enumerate()
            .filter(|(_, pt)| {
                let t = pt.powf(2.0 * f64::from(self.p));
                t.r >= lo.r && t.rc >= hi.rc
            })
            .map(|(i, _)| i)
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,re_psi,im_psi\n");
        for (r, v) in self.profile.nodes().iter().zip(self.psi_values()) {
            let _ = writeln!(out, "{r},{},{}", v.re, v.im);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&RootResultJson::from(self)).expect("root results serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let data: RootResultJson = serde_json::from_str(s).map_err(|e| Error::Input(e.to_string()))?;
        data.try_into()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct ComplexValue {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct PsiJson {
    grid: LogitGrid,
    nodes: Vec<f64>,
    values_re: Vec<f64>,
    values_im: Vec<f64>,
    envelope: TypeEnvelope,
}

#[derive(Serialize, Deserialize)]
struct RootResultJson {
    p: u32,
    constant: ComplexValue,
    psi: PsiJson,
    residuals: Vec<f64>,
    max_residual: f64,
    passed: bool,
    envelope: TypeEnvelope,
    diagnostics: Diagnostics,
    pairing: Pairing,
    rational: RationalMellin,
    factorization: Option<BetaFactorization>,
}

impl From<&RootResult> for RootResultJson {
    fn from(r: &RootResult) -> Self {
        let psi = r.psi_values();
        RootResultJson {
            p: r.p,
            constant: ComplexValue {
                re: r.constant.re,
                im: r.constant.im,
            },
            psi: PsiJson {
                grid: *r.profile.grid(),
                nodes: r.profile.nodes(),
                values_re: psi.iter().map(|v| v.re).collect(),
                values_im: psi.iter().map(|v| v.im).collect(),
                envelope: r.profile.envelope().clone(),
            },
            residuals: r.diagnostics.report.residuals.clone(),
            max_residual: r.diagnostics.report.max_residual,
            passed: r.diagnostics.report.passed,
            envelope: r.diagnostics.envelope.clone(),
            diagnostics: r.diagnostics.clone(),
            pairing: r.pairing,
            rational: r.rational.clone(),
            factorization: r.factorization.clone(),
        }
    }
}

impl TryFrom<RootResultJson> for RootResult {
    type Error = Error;

    fn try_from(d: RootResultJson) -> Result<Self> {
        let constant = Complex64::new(d.constant.re, d.constant.im);
        if !(constant.norm() > 0.0) {
            return Err(Error::Input("root constant must be nonzero".into()));
        }
        let n = d.psi.values_re.len();
        if d.psi.values_im.len() != n || d.psi.nodes.len() != n {
            return Err(Error::Input("psi arrays differ in length".into()));
        }
        let profile = d
            .psi
            .values_re
            .iter()
            .zip(&d.psi.values_im)
            .map(|(re, im)| (Complex64::new(*re, *im) / constant).re)
            .collect();
        let profile = GridFunction::new(d.psi.grid, profile, d.psi.envelope)?;
        let rational = RationalMellin::new(
            d.rational.constant,
            d.rational.numerator_roots,
            d.rational.denominator_roots,
        )?;
        Ok(RootResult {
            p: d.p,
            profile,
            constant,
            rational,
            factorization: d.factorization,
            pairing: d.pairing,
            h: None,
            big_h: None,
            diagnostics: d.diagnostics,
        })
    }
}

/// Solve `C^p ∏_{j<p} (2j+4) u((2j+3)/(2p)) = (2p+2) φ̂(p+2)` for `C`, with
/// `u` the factored product; branch `b` multiplies the principal root by
/// `e^{2πib/p}`.
pub fn calibrate_constant(
    bf: &BetaFactorization,
    rm: &RationalMellin,
    p: u32,
    branch: u32,
) -> Result<Complex64> {
    if p < 1 {
        return Err(Error::Range("degree p must be >= 1".into()));
    }
    if branch >= p {
        return Err(Error::Range(format!("branch {branch} must be below p = {p}")));
    }
    let pf = f64::from(p);
    let mut product = 1.0;
    for j in 0..p {
        let zeta = (2.0 * f64::from(j) + 3.0) / (2.0 * pf);
        let u = eval_factored(bf, zeta)?;
        if u == 0.0 || !u.is_finite() {
            return Err(Error::DegenerateCalibration { zeta });
        }
        product *= (2.0 * f64::from(j) + 4.0) * u;
    }
    let rhs = (2.0 * pf + 2.0) * mellin_eval(rm, Complex64::new(pf + 2.0, 0.0))?;
    let power = rhs / product;
    if !(power.norm() > 0.0) || !power.is_finite() {
        return Err(Error::DegenerateCalibration { zeta: 0.0 });
    }
    let principal = Complex64::from_polar(power.norm().powf(1.0 / pf), power.arg() / pf);
    Ok(principal * Complex64::from_polar(1.0, 2.0 * PI * f64::from(branch) / pf))
}

/// Coefficients `c_i` with `∏ (A'_j − rD) = Σ c_i r^i D^i`.
fn diff_operator_coefficients(diff: &[f64]) -> Vec<f64> {
    // polynomial in θ = rD
    let mut poly = vec![1.0];
    for &a in diff {
        let mut next = vec![0.0; poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i] += a * c;
            next[i + 1] -= c;
        }
        poly = next;
    }
    // θ^k = Σ_i S(k, i) r^i D^i
    let m = poly.len();
    let mut stirling = vec![vec![0.0; m]; m];
    stirling[0][0] = 1.0;
    for k in 1..m {
        for i in 1..=k {
            stirling[k][i] = i as f64 * stirling[k - 1][i] + stirling[k - 1][i - 1];
        }
    }
    (0..m)
        .map(|i| (i..m).map(|k| poly[k] * stirling[k][i]).sum())
        .collect()
}

/// Grid for `H` in `t = r^{2p}`, spaced like `psi_grid` and covering the
/// images of its nodes.
fn transformed_grid(psi_grid: &LogitGrid, p: u32, delta: f64) -> Result<LogitGrid> {
    let lo = psi_grid.point(0).powf(2.0 * f64::from(p)).r.max(1e-300);
    let s_lo = UnitPoint::new(lo, 1.0 - lo).logit();
    let s_hi = psi_grid.s_max;
    let n = ((s_hi - s_lo) / psi_grid.step()).ceil() as usize + 1;
    LogitGrid::spanning(lo, delta, n.max(psi_grid.n))
}

/// Run the full construction. Residuals above tolerance are reported in the
/// diagnostics, not as an error.
pub fn construct_root(prob: &RootProblem) -> Result<RootResult> {
    let opts = &prob.options;
    opts.quadrature.validate()?;
    let p = prob.p;
    let psi_grid = LogitGrid::new(opts.grid_nodes, opts.delta)?;
    if p == 1 {
        let terms = match &prob.terms {
            Some(t) => t.clone(),
            None => prob.rational.to_terms()?,
        };
        let (alpha, logs) = terms.leading_behaviour();
        let envelope = TypeEnvelope::new(vec![alpha; logs as usize + 1], 1.0);
        let profile = GridFunction::sample(psi_grid, envelope.clone(), |pt| terms.eval_at(pt))?;
        let mut result = RootResult {
            p,
            profile,
            constant: Complex64::new(1.0, 0.0),
            rational: prob.rational.clone(),
            factorization: None,
            pairing: opts.pairing,
            h: None,
            big_h: None,
            diagnostics: placeholder_diagnostics(opts, envelope),
        };
        result.diagnostics = diagnose(&result, opts)?;
        return Ok(result);
    }

    let g = build_quotients(&prob.rational, p)?;
    let g = match opts.pairing {
        Pairing::Optimized => pair_optimize(&g),
        Pairing::Canonical => g,
    };
    let bf = to_beta_factors(&g)?;
    if bf.beta_factors.is_empty() {
        return Err(Error::UnsupportedSymbol(
            "Gamma quotients cancel completely; the root symbol is not a function".into(),
        ));
    }
    let factors: Vec<BetaTermFunction> = bf
        .beta_factors
        .iter()
        .map(|&(a, b)| BetaTermFunction::single(a, b))
        .collect();
    let order = bf.diff_factors.len();
    let t_grid = transformed_grid(&psi_grid, p, opts.delta)?;
    let stack = convolve_all_derivatives(&factors, order, t_grid, &opts.quadrature)?;

    let coeffs = diff_operator_coefficients(&bf.diff_factors);
    let h_env = stack.function().envelope().clone();
    let big_h_env = TypeEnvelope::new(h_env.a_list.clone(), h_env.beta_sum - order as f64);
    let big_h_values: Vec<f64> = t_grid
        .points()
        .iter()
        .enumerate()
        .map(|(n, pt)| {
            let sum: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c * (i as f64 * pt.ln_r()).exp() * stack.grids[i].values()[n])
                .sum();
            bf.constant * sum
        })
        .collect();
    let big_h = GridFunction::new(t_grid, big_h_values, big_h_env.clone())?;

    let two_p = 2.0 * f64::from(p);
    let psi_env = TypeEnvelope::new(
        big_h_env.a_list.iter().map(|a| a * two_p).collect(),
        big_h_env.beta_sum,
    );
    let profile = GridFunction::sample(psi_grid, psi_env, |pt| {
        two_p * big_h.eval_extended(pt.powf(two_p))
    })?;
    let constant = calibrate_constant(&bf, &prob.rational, p, opts.branch)?;

    let mut result = RootResult {
        p,
        profile,
        constant,
        rational: prob.rational.clone(),
        factorization: Some(bf),
        pairing: opts.pairing,
        h: Some(stack.into_function()),
        big_h: Some(big_h),
        diagnostics: placeholder_diagnostics(opts, big_h_env),
    };
    result.diagnostics = diagnose(&result, opts)?;
    Ok(result)
}

fn placeholder_diagnostics(opts: &RootOptions, envelope: TypeEnvelope) -> Diagnostics {
    Diagnostics {
        mode: opts.mode,
        report: IdentityReport {
            p: 0,
            tolerance: opts.tolerance(),
            residuals: vec![],
            max_residual: f64::NAN,
            failures: vec![],
            passed: false,
        },
        sup_psi: f64::NAN,
        envelope,
    }
}

fn diagnose(result: &RootResult, opts: &RootOptions) -> Result<Diagnostics> {
    let report = identity_report(result, opts.mode, opts.k_max, opts.tolerance())?;
    Ok(Diagnostics {
        mode: opts.mode,
        report,
        sup_psi: result.profile.sup_abs() * result.constant.norm(),
        envelope: result.diagnostics.envelope.clone(),
    })
}

/// Compare `T_ψ^p` with `T_φ` on `z^k`, `k = 0..=k_max`.
pub fn identity_report(
    result: &RootResult,
    mode: MellinMode,
    k_max: usize,
    tol: f64,
) -> Result<IdentityReport> {
    let p = result.p;
    let target = shift_of_symbol(p, |z| mellin_eval(&result.rational, Complex64::new(z, 0.0)), k_max)?;
    let candidate = shift_of_symbol(1, |z| psi_mellin(result, z, mode), k_max + p as usize - 1)?;
    verify_identity(&target, &candidate, p, tol)
}

/// `∫₀¹ g(r) r^{z−1} dr` for a sampled function, split at the grid hull.
pub fn mellin_of_grid(g: &GridFunction, z: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::Range(format!("Mellin argument must be positive, got {z}")));
    }
    let grid = g.grid();
    let (lo, hi) = (grid.point(0), grid.point(grid.n - 1));
    integrate01_pieces(
        |r, rc| {
            let pt = UnitPoint::new(r, rc);
            g.eval_extended(pt) * ((z - 1.0) * pt.ln_r()).exp()
        },
        &[(lo.r, lo.rc), (hi.r, hi.rc)],
        spec,
    )
    .map(|q| q.value)
}

/// `ψ̂(z)`, either from the Gamma algebra or by quadrature of the sampled `ψ`.
pub fn psi_mellin(result: &RootResult, z: f64, mode: MellinMode) -> Result<Complex64> {
    if !(z > 0.0) {
        return Err(Error::Range(format!("Mellin argument must be positive, got {z}")));
    }
    match mode {
        MellinMode::Closed => match &result.factorization {
            Some(bf) => Ok(result.constant * eval_factored(bf, z / (2.0 * f64::from(result.p)))?),
            None => Ok(result.constant * mellin_eval(&result.rational, Complex64::new(z, 0.0))?),
        },
        MellinMode::Numeric => {
            let spec = QuadratureSpec::with_tolerance(NUMERIC_MELLIN_TOLERANCE);
            let value = match mellin_of_grid(&result.profile, z, &spec) {
                Err(Error::Accuracy { .. }) => {
                    let retry = QuadratureSpec::with_tolerance(NUMERIC_MELLIN_RETRY);
                    mellin_of_grid(&result.profile, z, &retry)?
                }
                other => other?,
            };
            Ok(result.constant * value)
        }
    }
}
