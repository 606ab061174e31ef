//! Mellin convolution `(f∗g)(r) = ∫_r^1 f(r/t) g(t) dt/t` on a graded grid.
//!
//! All integrals use the substitution `t = r + u(1−r)`, which maps the
//! interval of integration onto (0, 1) and keeps both endpoint
//! singularities at the ends of the new interval:
//!
//! ```text
//! (f∗g)(r) = ∫₀¹ f(r/t) g(t) (1−r)/t du,   1 − r/t = u(1−r)/t,  1 − t = (1−u)(1−r).
//! ```
//!
//! When the outer factor is a Beta term `c x^a (1−x)^{b−1}` this becomes
//!
//! ```text
//! h(r) = c r^a (1−r)^b ∫₀¹ u^{b−1} t^{−a−b} G(t) du,
//! ```
//!
//! and since `dt/dr = 1−u`, derivatives in `r` can be taken under the
//! integral sign. Each extra derivative of `G` is paired with a factor
//! `(1−u)` that exactly compensates its stronger singularity at `t = 1`, so
//! the derivatives of a convolution product are computed by quadrature
//! rather than by differencing.

mod beta_term;
mod envelope;
mod grid;

pub use beta_term::{BetaTerm, BetaTermFunction};
pub use envelope::TypeEnvelope;
pub use grid::{
    envelope_ratio, grid_derivative, grid_eval, GridFunction, LogitGrid, DEFAULT_DELTA,
    DEFAULT_NODES, MIN_NODES, WINDOW,
};
pub(crate) use beta_term::{binomial, falling};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::specialfun::{integrate01_pieces, QuadratureSpec};
use crate::unit::UnitPoint;

/// Inner tolerances of a fold are this much looser than the final one.
const INNER_LOOSENING: f64 = 10.0;

/// A function on (0, 1) that can report its envelope and some derivatives.
pub trait UnitFn: Sync {
    fn envelope(&self) -> TypeEnvelope;

    /// Highest derivative order [`UnitFn::derivs`] can supply.
    fn max_order(&self) -> usize;

    /// Fill `out[k]` with the k-th derivative at `p`.
    fn derivs(&self, p: UnitPoint, out: &mut [f64]);

    fn value(&self, p: UnitPoint) -> f64 {
        let mut out = [0.0];
        self.derivs(p, &mut out);
        out[0]
    }

    /// First and last node for sampled functions.
    fn hull(&self) -> Option<(UnitPoint, UnitPoint)> {
        None
    }
}

fn grid_hull(grid: &LogitGrid) -> Option<(UnitPoint, UnitPoint)> {
    Some((grid.point(0), grid.point(grid.n - 1)))
}

/// Values of `u` at which `t = r + u(1−r)` leaves the hull of the inner factor.
fn inner_breaks(p: UnitPoint, hull: Option<(UnitPoint, UnitPoint)>) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    if let Some((lo, hi)) = hull {
        if lo.r > p.r {
            let u = (lo.r - p.r) / p.rc;
            out.push((u, 1.0 - u));
        }
        if hi.rc < p.rc {
            let uc = hi.rc / p.rc;
            out.push((1.0 - uc, uc));
        }
    }
    out
}

/// Values of `u` at which `x = r/t` leaves the hull of the outer factor.
fn outer_breaks(p: UnitPoint, hull: Option<(UnitPoint, UnitPoint)>) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    if let Some((lo, hi)) = hull {
        let u = hi.rc * p.r / (p.rc * hi.r);
        if u < 1.0 {
            out.push((u, 1.0 - u));
        }
        if lo.r > p.r {
            let u = p.r * lo.rc / (lo.r * p.rc);
            if u < 1.0 {
                out.push((u, 1.0 - u));
            }
        }
    }
    out
}

impl UnitFn for BetaTermFunction {
    fn envelope(&self) -> TypeEnvelope {
        BetaTermFunction::envelope(self)
    }

    fn max_order(&self) -> usize {
        usize::MAX
    }

    fn derivs(&self, p: UnitPoint, out: &mut [f64]) {
        self.derivs_at(p, out);
    }
}

impl UnitFn for GridFunction {
    fn envelope(&self) -> TypeEnvelope {
        GridFunction::envelope(self).clone()
    }

    fn max_order(&self) -> usize {
        0
    }

    fn derivs(&self, p: UnitPoint, out: &mut [f64]) {
        out[0] = self.eval_extended(p);
    }

    fn hull(&self) -> Option<(UnitPoint, UnitPoint)> {
        grid_hull(self.grid())
    }
}

/// A grid function together with grids of its first few derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeStack {
    pub grids: Vec<GridFunction>,
}

impl DerivativeStack {
    pub fn function(&self) -> &GridFunction {
        &self.grids[0]
    }

    pub fn into_function(mut self) -> GridFunction {
        self.grids.swap_remove(0)
    }

    /// Sample a closed-form function and its derivatives.
    pub fn sample(f: &BetaTermFunction, order: usize, grid: LogitGrid) -> Result<Self> {
        let env = f.envelope();
        let points = grid.points();
        let mut columns = vec![Vec::with_capacity(grid.n); order + 1];
        let mut buf = vec![0.0; order + 1];
        for p in &points {
            f.derivs_at(*p, &mut buf);
            for (col, v) in columns.iter_mut().zip(&buf) {
                col.push(*v);
            }
        }
        let grids = columns
            .into_iter()
            .enumerate()
            .map(|(k, values)| GridFunction::new(grid, values, env.differentiated(k as u32)))
            .collect::<Result<_>>()?;
        Ok(Self { grids })
    }
}

impl UnitFn for DerivativeStack {
    fn envelope(&self) -> TypeEnvelope {
        self.grids[0].envelope().clone()
    }

    fn max_order(&self) -> usize {
        self.grids.len() - 1
    }

    fn derivs(&self, p: UnitPoint, out: &mut [f64]) {
        for (slot, g) in out.iter_mut().zip(&self.grids) {
            *slot = g.eval_extended(p);
        }
    }

    fn hull(&self) -> Option<(UnitPoint, UnitPoint)> {
        grid_hull(self.grids[0].grid())
    }
}

/// Below this `r` the part of a convolution integral with `t > 2r` is
/// integrated in the variable `ln u`, where it varies on a unit scale.
const LOG_SPLIT_BELOW: f64 = 1e-3;

fn ln_unit(u: f64, uc: f64) -> f64 {
    if u > 0.5 {
        (-uc).ln_1p()
    } else {
        u.ln()
    }
}

/// `∫₀¹ f(u, 1−u) du` for a convolution integral at `p`, split at `breaks`.
fn integrate_u<F>(f: F, p: UnitPoint, breaks: &[(f64, f64)], spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    if p.r >= LOG_SPLIT_BELOW {
        return integrate01_pieces(&f, breaks, spec).map(|q| q.value);
    }
    let ub = p.r / p.rc;
    let lb = -ub.ln();
    let low_breaks: Vec<(f64, f64)> = breaks
        .iter()
        .filter(|b| b.0 < ub)
        .map(|&(u, _)| (u / ub, 1.0 - u / ub))
        .collect();
    let low = integrate01_pieces(
        |v, _| {
            let u = ub * v;
            ub * f(u, 1.0 - u)
        },
        &low_breaks,
        spec,
    )?;
    // u = exp(−L w) on (ub, 1)
    let high_breaks: Vec<(f64, f64)> = breaks
        .iter()
        .filter(|b| b.0 > ub)
        .map(|&(u, uc)| {
            let w = -ln_unit(u, uc) / lb;
            (w, 1.0 - w)
        })
        .collect();
    let high = integrate01_pieces(
        |w, _| {
            let l = -lb * w;
            let u = l.exp();
            f(u, -l.exp_m1()) * u * lb
        },
        &high_breaks,
        spec,
    )?;
    Ok(low.value + high.value)
}

fn node_error(node: usize, e: Error) -> Error {
    match e {
        Error::Accuracy {
            estimate,
            error_estimate,
        } => Error::NodeAccuracy {
            node,
            estimate,
            error_estimate,
        },
        other => other,
    }
}

/// `(f∗g)` sampled on `grid`.
pub fn convolve_pair(
    f: &dyn UnitFn,
    g: &dyn UnitFn,
    grid: LogitGrid,
    spec: &QuadratureSpec,
) -> Result<GridFunction> {
    spec.validate()?;
    let values = grid
        .points()
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let mut breaks = inner_breaks(*p, g.hull());
            breaks.extend(outer_breaks(*p, f.hull()));
            integrate_u(
                |u, uc| {
                    let t = p.r + u * p.rc;
                    let tc = uc * p.rc;
                    let x = UnitPoint::new(p.r / t, u * p.rc / t);
                    f.value(x) * g.value(UnitPoint::new(t, tc)) * p.rc / t
                },
                *p,
                &breaks,
                spec,
            )
            .map_err(|e| node_error(i, e))
        })
        .collect::<Result<Vec<_>>>()?;
    GridFunction::new(grid, values, f.envelope().merge(&g.envelope()))
}

/// Derivatives of order `0..=order` of `outer ∗ inner` at one point.
fn kernel_at(
    outer: &BetaTermFunction,
    inner: &dyn UnitFn,
    order: usize,
    p: UnitPoint,
    spec: &QuadratureSpec,
) -> Result<Vec<f64>> {
    let mut out = vec![0.0; order + 1];
    let breaks = inner_breaks(p, inner.hull());
    let ln_r = p.ln_r();
    let ln_rc = p.rc.ln();
    for term in outer.terms.iter().filter(|t| t.c != 0.0) {
        let (a, b) = (term.a, term.b);
        let e = -a - b;
        // I_l = ∫ u^{b−1} (1−u)^l Ψ^{(l)}(t) du with Ψ(t) = t^{−a−b} G(t)
        let mut integrals = Vec::with_capacity(order + 1);
        for l in 0..=order {
            let q = integrate_u(
                |u, uc| {
                    let t = UnitPoint::new(p.r + u * p.rc, uc * p.rc);
                    let mut g = [0.0; 8];
                    inner.derivs(t, &mut g[..=l]);
                    let ln_t = t.ln_r();
                    let mut psi = 0.0;
                    for (i, gi) in g.iter().enumerate().take(l + 1) {
                        let m = l - i;
                        let ff = falling(e, m);
                        if ff != 0.0 {
                            psi += binomial(l, i) * ff * ((e - m as f64) * ln_t).exp() * gi;
                        }
                    }
                    let weight = ((b - 1.0) * u.ln()).exp() * uc.powi(l as i32);
                    weight * psi
                },
                p,
                &breaks,
                spec,
            )?;
            integrals.push(q);
        }
        // Leibniz over r^a, (1−r)^b and the integral
        for (k, slot) in out.iter_mut().enumerate() {
            let mut sum = 0.0;
            for i in 0..=k {
                let fa = falling(a, i);
                if fa == 0.0 {
                    continue;
                }
                for j in 0..=(k - i) {
                    let l = k - i - j;
                    let fb = falling(b, j);
                    if fb == 0.0 {
                        continue;
                    }
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    let pow = ((a - i as f64) * ln_r + (b - j as f64) * ln_rc).exp();
                    sum += binomial(k, i) * binomial(k - i, j) * fa * sign * fb * pow * integrals[l];
                }
            }
            *slot += term.c * sum;
        }
    }
    Ok(out)
}

/// `outer ∗ inner` and its derivatives up to `order`, sampled on `grid`.
pub fn convolve_beta_with(
    outer: &BetaTermFunction,
    inner: &dyn UnitFn,
    order: usize,
    grid: LogitGrid,
    spec: &QuadratureSpec,
) -> Result<DerivativeStack> {
    spec.validate()?;
    if order > inner.max_order() || order > 7 {
        return Err(Error::Range(format!(
            "derivative order {order} exceeds what the inner factor provides"
        )));
    }
    if let Some(t) = outer.terms.iter().find(|t| t.c != 0.0 && !(t.b > 0.0 && t.a > -1.0)) {
        return Err(Error::Range(format!(
            "outer convolution factor r^{}(1−r)^{} is not integrable",
            t.a,
            t.b - 1.0
        )));
    }
    let rows = grid
        .points()
        .par_iter()
        .enumerate()
        .map(|(i, p)| kernel_at(outer, inner, order, *p, spec).map_err(|e| node_error(i, e)))
        .collect::<Result<Vec<_>>>()?;
    let env = outer.envelope().merge(&inner.envelope());
    let grids = (0..=order)
        .map(|k| {
            let values = rows.iter().map(|row| row[k]).collect();
            GridFunction::new(grid, values, env.differentiated(k as u32))
        })
        .collect::<Result<_>>()?;
    Ok(DerivativeStack { grids })
}

/// Convolution product of all factors and its derivatives up to `order`.
///
/// Factors are folded in order of decreasing leading power; the innermost
/// pair is convolved in closed form, later levels interpolate the partial
/// product.
pub fn convolve_all_derivatives(
    factors: &[BetaTermFunction],
    order: usize,
    grid: LogitGrid,
    spec: &QuadratureSpec,
) -> Result<DerivativeStack> {
    if factors.is_empty() {
        return Err(Error::Range("convolution needs at least one factor".into()));
    }
    let mut sorted: Vec<&BetaTermFunction> = factors.iter().collect();
    sorted.sort_by(|x, y| y.envelope().alpha().total_cmp(&x.envelope().alpha()));
    if sorted.len() == 1 {
        return DerivativeStack::sample(sorted[0], order, grid);
    }
    let inner_spec = spec.loosened(INNER_LOOSENING);
    let last = sorted.len() - 1;
    let mut stack = convolve_beta_with(
        sorted[1],
        sorted[0],
        order,
        grid,
        if last == 1 { spec } else { &inner_spec },
    )?;
    for (level, outer) in sorted.iter().enumerate().skip(2) {
        let level_spec = if level == last { spec } else { &inner_spec };
        stack = convolve_beta_with(outer, &stack, order, grid, level_spec)?;
    }
    Ok(stack)
}

/// Convolution product of all factors sampled on `grid`.
pub fn convolve_all(
    factors: &[BetaTermFunction],
    grid: LogitGrid,
    spec: &QuadratureSpec,
) -> Result<GridFunction> {
    convolve_all_derivatives(factors, 0, grid, spec).map(DerivativeStack::into_function)
}
