//! Command-line front end. JSON in, JSON and CSV out.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::convolve::{
    convolve_all, envelope_ratio, BetaTerm, BetaTermFunction, LogitGrid, DEFAULT_DELTA,
    DEFAULT_NODES,
};
use crate::error::{Error, Result};
use crate::roots::{
    construct_root, identity_report, MellinMode, Pairing, RootOptions, RootProblem, RootResult,
    DEFAULT_K_MAX,
};
use crate::specialfun::QuadratureSpec;
use crate::symbols::{
    mellin_eval_real, mellin_numeric_at, mellin_of_terms, QuasihomogeneousSymbol, RadialTerm,
    RadialTermSum, RationalMellin,
};

const ENVELOPE_DRIFT: f64 = 0.05;
const DERIVATIVE_ENVELOPE_DRIFT: f64 = 0.10;
const MELLIN_AGREEMENT: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "toeplitz-roots", version, about = "p-th roots of quasihomogeneous Toeplitz operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Construct the root symbol ψ and verify the identity.
    Root(Common),
    /// Check a stored ψ against a symbol.
    Verify {
        #[command(flatten)]
        common: Common,
        /// RootResult JSON written by `root`.
        #[arg(long)]
        psi: PathBuf,
    },
    /// Evaluate the Mellin transform in closed form and by quadrature.
    Mellin {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_values_t = [3.0, 5.0, 7.0, 9.0])]
        z: Vec<f64>,
    },
    /// Sample the convolution product of Beta factors.
    Convolve(Common),
    /// Envelope ratio of a convolution product and its drift under refinement.
    #[command(name = "lemma-a")]
    Envelope(Common),
    /// Envelope ratio of a derivative of a convolution product.
    #[command(name = "lemma-b")]
    DerivativeEnvelope {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        k: u32,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Problem JSON.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output path prefix; `.json` and `.csv` are appended.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long, value_enum, default_value_t = PairingArg::Optimized)]
    pub pairing: PairingArg,
    #[arg(long, default_value_t = 0)]
    pub branch: u32,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum PairingArg {
    Optimized,
    Canonical,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum ModeArg {
    Closed,
    Numeric,
}

impl From<PairingArg> for Pairing {
    fn from(p: PairingArg) -> Self {
        match p {
            PairingArg::Optimized => Pairing::Optimized,
            PairingArg::Canonical => Pairing::Canonical,
        }
    }
}

impl From<ModeArg> for MellinMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Closed => MellinMode::Closed,
            ModeArg::Numeric => MellinMode::Numeric,
        }
    }
}

/// `{"p"?, "terms": [...]}` or `{"p"?, "rational": {...}}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolInput {
    pub p: Option<u32>,
    pub terms: Option<Vec<RadialTerm>>,
    pub rational: Option<RationalMellin>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorInput {
    #[serde(default = "one")]
    pub c: f64,
    pub a: f64,
    pub b: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorsInput {
    pub factors: Vec<FactorInput>,
}

/// What a command produced: the report and whether its checks passed.
#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub passed: bool,
    pub report: Value,
}

/// Structured error output.
pub fn error_json(e: &Error) -> Value {
    json!({"error": {"category": e.category(), "message": e.to_string()}})
}

/// Run a command; returns the text for stdout and the exit code.
pub fn run(cli: &Cli) -> (String, i32) {
    match dispatch(cli) {
        Ok(out) => (pretty(&out.report), if out.passed { 0 } else { 1 }),
        Err(e) => (pretty(&error_json(&e)), 1),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Root(c) => cmd_root(c),
        Command::Verify { common, psi } => cmd_verify(common, psi),
        Command::Mellin { common, z } => cmd_mellin(common, z),
        Command::Convolve(c) => cmd_convolve(c),
        Command::Envelope(c) => cmd_envelope(c, 0),
        Command::DerivativeEnvelope { common, k } => {
            if *k == 0 {
                return Err(Error::Input("lemma-b needs --k >= 1".into()));
            }
            cmd_envelope(common, *k)
        }
    }
}

fn read_input<T: for<'de> Deserialize<'de>>(c: &Common) -> Result<T> {
    let path = c
        .input
        .as_ref()
        .ok_or_else(|| Error::Input("--input is required".into()))?;
    read_json(path)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn write(path: PathBuf, text: &str) -> Result<String> {
    fs::write(&path, text)
        .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))?;
    Ok(path.display().to_string())
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn options(c: &Common) -> Result<RootOptions> {
    if let Some(t) = c.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Input(format!("--tol must be positive, got {t}")));
        }
    }
    if c.grid == Some(0) {
        return Err(Error::Input("--grid must be positive".into()));
    }
    Ok(RootOptions {
        grid_nodes: c.grid.unwrap_or(DEFAULT_NODES),
        pairing: c.pairing.into(),
        branch: c.branch,
        k_max: c.k_max.unwrap_or(DEFAULT_K_MAX),
        mode: c.mode.map_or(MellinMode::Closed, Into::into),
        tolerance: c.tol,
        ..RootOptions::default()
    })
}

/// Degree, rational transform and (when given) terms of the input symbol.
fn load_symbol(c: &Common) -> Result<(u32, RationalMellin, Option<RadialTermSum>)> {
    let input: SymbolInput = read_input(c)?;
    let p = c
        .p
        .or(input.p)
        .ok_or_else(|| Error::Input("degree p missing: pass --p or a \"p\" field".into()))?;
    match (input.terms, input.rational) {
        (Some(terms), None) => {
            let sym = QuasihomogeneousSymbol::new(p, RadialTermSum::new(terms)?)?;
            Ok((p, mellin_of_terms(&sym.radial)?, Some(sym.radial)))
        }
        (None, Some(r)) => Ok((
            p,
            RationalMellin::new(r.constant, r.numerator_roots, r.denominator_roots)?,
            None,
        )),
        _ => Err(Error::Input(
            "symbol needs exactly one of \"terms\" and \"rational\"".into(),
        )),
    }
}

fn problem(c: &Common) -> Result<RootProblem> {
    let (p, rational, terms) = load_symbol(c)?;
    let opts = options(c)?;
    let mut prob = RootProblem::from_rational(p, rational, opts)?;
    prob.terms = terms;
    Ok(prob)
}

fn cmd_root(c: &Common) -> Result<Outcome> {
    let res = construct_root(&problem(c)?)?;
    let report = &res.diagnostics.report;
    let mut summary = json!({
        "p": res.p,
        "constant": {"re": res.constant.re, "im": res.constant.im},
        "max_residual": report.max_residual,
        "tolerance": report.tolerance,
        "failures": report.failures,
        "sup_psi": res.diagnostics.sup_psi,
        "passed": report.passed,
    });
    match &c.out {
        Some(prefix) => {
            summary["json"] = write(with_ext(prefix, "json"), &res.to_json())?.into();
            summary["csv"] = write(with_ext(prefix, "csv"), &res.to_csv())?.into();
        }
        None => summary["result"] = serde_json::from_str(&res.to_json()).expect("valid json"),
    }
    Ok(Outcome {
        passed: res.passed(),
        report: summary,
    })
}

fn cmd_verify(c: &Common, psi: &Path) -> Result<Outcome> {
    let text = fs::read_to_string(psi)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", psi.display())))?;
    let mut res = RootResult::from_json(&text)?;
    if c.input.is_some() {
        let (p, rational, _) = load_symbol(&Common {
            p: c.p.or(Some(res.p)),
            ..c.clone()
        })?;
        if p != res.p {
            return Err(Error::Input(format!(
                "symbol has degree {p} but the stored root was built for p = {}",
                res.p
            )));
        }
        res.rational = rational;
    }
    let mode = c.mode.map_or(MellinMode::Numeric, Into::into);
    let tol = c.tol.unwrap_or_else(|| mode.default_tolerance());
    let report = identity_report(&res, mode, c.k_max.unwrap_or(DEFAULT_K_MAX), tol)?;
    let value = serde_json::to_value(&report).expect("reports serialize");
    let mut summary = json!({"mode": mode, "report": value.clone()});
    if let Some(prefix) = &c.out {
        summary["json"] = write(with_ext(prefix, "json"), &pretty(&value))?.into();
    }
    Ok(Outcome {
        passed: report.passed,
        report: summary,
    })
}

fn cmd_mellin(c: &Common, zs: &[f64]) -> Result<Outcome> {
    let (_, rational, terms) = load_symbol(&Common {
        p: c.p.or(Some(1)),
        ..c.clone()
    })?;
    let terms = match terms {
        Some(t) => t,
        None => rational.to_terms()?,
    };
    let tol = c.tol.unwrap_or(MELLIN_AGREEMENT);
    let spec = QuadratureSpec::default();
    let mut rows = Vec::with_capacity(zs.len());
    let mut passed = true;
    let mut csv = String::from("z,closed,numeric,rel_diff\n");
    for &z in zs {
        let closed = mellin_eval_real(&rational, z)?;
        let numeric = mellin_numeric_at(|pt| terms.eval_at(pt), z, &spec)?;
        let rel = (closed - numeric).abs() / closed.abs().max(f64::MIN_POSITIVE);
        passed &= rel <= tol;
        csv.push_str(&format!("{z},{closed},{numeric},{rel}\n"));
        rows.push(json!({"z": z, "closed": closed, "numeric": numeric, "rel_diff": rel}));
    }
    let mut summary = json!({"tolerance": tol, "values": rows, "passed": passed});
    if let Some(prefix) = &c.out {
        summary["csv"] = write(with_ext(prefix, "csv"), &csv)?.into();
    }
    Ok(Outcome {
        passed,
        report: summary,
    })
}

fn load_factors(c: &Common) -> Result<Vec<BetaTermFunction>> {
    let input: FactorsInput = read_input(c)?;
    if input.factors.is_empty() {
        return Err(Error::Input("\"factors\" is empty".into()));
    }
    input
        .factors
        .iter()
        .map(|f| {
            if !(f.a >= 0.0 && f.b > 0.0 && f.c.is_finite()) {
                return Err(Error::Range(format!(
                    "factor needs a >= 0 and b > 0, got a = {}, b = {}",
                    f.a, f.b
                )));
            }
            Ok(BetaTermFunction {
                terms: vec![BetaTerm { c: f.c, a: f.a, b: f.b }],
            })
        })
        .collect()
}

fn cmd_convolve(c: &Common) -> Result<Outcome> {
    let factors = load_factors(c)?;
    let grid = LogitGrid::new(c.grid.unwrap_or(DEFAULT_NODES), DEFAULT_DELTA)?;
    let h = convolve_all(&factors, grid, &QuadratureSpec::default())?;
    let mut summary = json!({
        "nodes": h.len(),
        "sup_abs": h.sup_abs(),
        "envelope": h.envelope(),
        "passed": true,
    });
    match &c.out {
        Some(prefix) => {
            summary["json"] = write(with_ext(prefix, "json"), &h.to_json())?.into();
            summary["csv"] = write(with_ext(prefix, "csv"), &h.to_csv())?.into();
        }
        None => summary["grid"] = serde_json::from_str(&h.to_json()).expect("valid json"),
    }
    Ok(Outcome {
        passed: true,
        report: summary,
    })
}

/// Envelope ratio of `h^{(k)}` at `n` and `2n` nodes.
fn cmd_envelope(c: &Common, k: u32) -> Result<Outcome> {
    let factors = load_factors(c)?;
    let n = c.grid.unwrap_or(DEFAULT_NODES);
    let spec = QuadratureSpec::default();
    let coarse = convolve_all(&factors, LogitGrid::new(n, DEFAULT_DELTA)?, &spec)?;
    let fine = convolve_all(&factors, LogitGrid::new(2 * n, DEFAULT_DELTA)?, &spec)?;
    let (max_coarse, profile) = envelope_ratio(&coarse, k)?;
    let (max_fine, _) = envelope_ratio(&fine, k)?;
    let drift = (max_fine - max_coarse).abs() / max_coarse.abs().max(f64::MIN_POSITIVE);
    let limit = c
        .tol
        .unwrap_or(if k == 0 { ENVELOPE_DRIFT } else { DERIVATIVE_ENVELOPE_DRIFT });
    let passed = max_coarse.is_finite() && max_fine.is_finite() && drift < limit;
    let env = coarse.envelope().differentiated(k);
    let mut summary = json!({
        "k": k,
        "envelope": {"alpha": env.alpha(), "beta": env.beta(), "log_power": env.log_power()},
        "max_ratio": max_coarse,
        "max_ratio_refined": max_fine,
        "drift": drift,
        "drift_limit": limit,
        "passed": passed,
    });
    if let Some(prefix) = &c.out {
        let mut csv = String::from("r,ratio\n");
        for (r, q) in &profile {
            csv.push_str(&format!("{r},{q}\n"));
        }
        summary["csv"] = write(with_ext(prefix, "csv"), &csv)?.into();
    }
    Ok(Outcome {
        passed,
        report: summary,
    })
}
