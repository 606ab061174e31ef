//! Sampled functions on (0, 1).
//!
//! Nodes are equally spaced in the logit coordinate `s = ln(r/(1−r))`, which
//! grades them geometrically toward both endpoints. Values are interpolated
//! after division by the function's envelope, which leaves a slowly varying
//! profile in `s` that local polynomials reproduce to near machine precision.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::envelope::TypeEnvelope;
use crate::error::{Error, Result};
use crate::unit::UnitPoint;

pub const DEFAULT_NODES: usize = 256;
pub const DEFAULT_DELTA: f64 = 1e-6;
pub const MIN_NODES: usize = 16;
/// Points per local interpolation and differentiation window.
pub const WINDOW: usize = 10;

/// `n` nodes equally spaced in `s` over `[s_min, s_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogitGrid {
    pub s_min: f64,
    pub s_max: f64,
    pub n: usize,
}

impl LogitGrid {
    /// Grid covering `[delta, 1 − delta]`.
    pub fn new(n: usize, delta: f64) -> Result<Self> {
        if n < MIN_NODES {
            return Err(Error::Range(format!("grid needs at least {MIN_NODES} nodes, got {n}")));
        }
        if !(delta > 0.0 && delta < 0.5) {
            return Err(Error::Range(format!("grid margin must lie in (0, 1/2), got {delta}")));
        }
        let s = UnitPoint::new(1.0 - delta, delta).logit();
        Ok(Self {
            s_min: -s,
            s_max: s,
            n,
        })
    }

    pub fn with_nodes(n: usize) -> Result<Self> {
        Self::new(n, DEFAULT_DELTA)
    }

    /// Grid over `[lo, 1 − hi_complement]` with `n` nodes.
    pub fn spanning(lo: f64, hi_complement: f64, n: usize) -> Result<Self> {
        if n < MIN_NODES {
            return Err(Error::Range(format!("grid needs at least {MIN_NODES} nodes, got {n}")));
        }
        if !(lo > 0.0 && hi_complement > 0.0 && lo + hi_complement < 1.0) {
            return Err(Error::Range(format!(
                "grid bounds {lo} and 1 − {hi_complement} do not enclose an interval"
            )));
        }
        Ok(Self {
            s_min: UnitPoint::new(lo, 1.0 - lo).logit(),
            s_max: UnitPoint::new(1.0 - hi_complement, hi_complement).logit(),
            n,
        })
    }

    pub fn step(&self) -> f64 {
        (self.s_max - self.s_min) / (self.n - 1) as f64
    }

    pub fn s(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.s_max
        } else {
            self.s_min + i as f64 * self.step()
        }
    }

    pub fn point(&self, i: usize) -> UnitPoint {
        UnitPoint::from_logit(self.s(i))
    }

    pub fn points(&self) -> Vec<UnitPoint> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.n < MIN_NODES || !(self.s_min < self.s_max) || !self.s_min.is_finite() || !self.s_max.is_finite() {
            return Err(Error::Input(format!("invalid grid {self:?}")));
        }
        Ok(())
    }
}

impl Default for LogitGrid {
    fn default() -> Self {
        Self::new(DEFAULT_NODES, DEFAULT_DELTA).expect("default grid is valid")
    }
}

/// A function sampled on a [`LogitGrid`], carrying its envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridFunctionData", into = "GridFunctionData")]
pub struct GridFunction {
    grid: LogitGrid,
    values: Vec<f64>,
    envelope: TypeEnvelope,
    normalized: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct GridFunctionData {
    grid: LogitGrid,
    nodes: Vec<f64>,
    values: Vec<f64>,
    envelope: TypeEnvelope,
}

impl TryFrom<GridFunctionData> for GridFunction {
    type Error = Error;

    fn try_from(d: GridFunctionData) -> Result<Self> {
        if d.nodes.len() != d.values.len() {
            return Err(Error::Input(format!(
                "{} nodes but {} values",
                d.nodes.len(),
                d.values.len()
            )));
        }
        GridFunction::new(d.grid, d.values, d.envelope)
    }
}

impl From<GridFunction> for GridFunctionData {
    fn from(g: GridFunction) -> Self {
        GridFunctionData {
            nodes: g.nodes(),
            grid: g.grid,
            values: g.values,
            envelope: g.envelope,
        }
    }
}

impl GridFunction {
    pub fn new(grid: LogitGrid, values: Vec<f64>, envelope: TypeEnvelope) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.n {
            return Err(Error::Input(format!(
                "grid has {} nodes but {} values were given",
                grid.n,
                values.len()
            )));
        }
        let normalized = values
            .iter()
            .enumerate()
            .map(|(i, v)| v / envelope.eval_at(grid.point(i)))
            .collect();
        Ok(Self {
            grid,
            values,
            envelope,
            normalized,
        })
    }

    /// Sample `f` at the grid nodes.
    pub fn sample<F>(grid: LogitGrid, envelope: TypeEnvelope, f: F) -> Result<Self>
    where
        F: Fn(UnitPoint) -> f64,
    {
        let values = grid.points().into_iter().map(f).collect();
        Self::new(grid, values, envelope)
    }

    pub fn grid(&self) -> &LogitGrid {
        &self.grid
    }

    pub fn nodes(&self) -> Vec<f64> {
        self.grid.points().iter().map(|p| p.r).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn envelope(&self) -> &TypeEnvelope {
        &self.envelope
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Same samples with a new envelope.
    pub fn with_envelope(self, envelope: TypeEnvelope) -> Result<Self> {
        Self::new(self.grid, self.values, envelope)
    }

    /// Interpolated value inside the node hull.
    pub fn eval(&self, r: f64) -> Result<f64> {
        self.eval_checked(UnitPoint::from_r(r))
    }

    pub fn eval_checked(&self, p: UnitPoint) -> Result<f64> {
        let s = p.logit();
        if !(s >= self.grid.s_min && s <= self.grid.s_max) {
            return Err(Error::Range(format!(
                "r = {} lies outside the grid hull [{}, {}]",
                p.r,
                self.grid.point(0).r,
                self.grid.point(self.grid.n - 1).r
            )));
        }
        Ok(self.eval_extended(p))
    }

    /// Interpolated value. Past the right end the envelope-normalized
    /// profile, which is analytic in `1 − r` there, is continued linearly
    /// in `1 − r`; past the left end it is held at its boundary value.
    pub fn eval_extended(&self, p: UnitPoint) -> f64 {
        let s = p.logit();
        let last = (self.grid.n - 1) as f64;
        let x = (s - self.grid.s_min) / self.grid.step();
        let nearest = x.round();
        // a node passed back as r does not reproduce its logit exactly
        if (0.0..=last).contains(&nearest) {
            let node = self.grid.point(nearest as usize);
            if node.r == p.r && (node.r <= 0.5 || node.rc == p.rc || p.rc == 1.0 - p.r) {
                return self.values[nearest as usize];
            }
        }
        let n = self.grid.n;
        let q = if x > last {
            let (a, b) = (self.grid.point(n - 1), self.grid.point(n - 2));
            let slope = (self.normalized[n - 1] - self.normalized[n - 2]) / (a.rc - b.rc);
            self.normalized[n - 1] + slope * (p.rc - a.rc)
        } else {
            lagrange_equispaced(&self.normalized, x.max(0.0))
        };
        q * self.envelope.eval_at(p)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,value\n");
        for (r, v) in self.nodes().iter().zip(&self.values) {
            let _ = writeln!(out, "{r},{v}");
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("grid functions serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Input(e.to_string()))
    }
}

/// First index of the `WINDOW`-point stencil centred on fractional index `x`.
fn window_start(x: f64, n: usize) -> usize {
    let start = x.floor() as isize - (WINDOW as isize / 2 - 1);
    start.clamp(0, (n - WINDOW) as isize) as usize
}

/// Barycentric Lagrange interpolation on unit-spaced nodes at fractional index `x`.
fn lagrange_equispaced(values: &[f64], x: f64) -> f64 {
    let start = window_start(x, values.len());
    let mut num = 0.0;
    let mut den = 0.0;
    let mut w = 1.0;
    for j in 0..WINDOW {
        // w_j = (−1)^j C(WINDOW−1, j)
        if j > 0 {
            w *= -((WINDOW - j) as f64) / j as f64;
        }
        let d = x - (start + j) as f64;
        if d == 0.0 {
            return values[start + j];
        }
        let t = w / d;
        num += t * values[start + j];
        den += t;
    }
    num / den
}

/// Finite-difference weights for derivatives of order `0..=m` at `x0`.
pub(crate) fn fornberg(x0: f64, xs: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// k-th derivative of a grid function by local polynomial differentiation
/// in `s` and the chain rule.
pub fn grid_derivative(h: &GridFunction, k: u32) -> Result<GridFunction> {
    if !(1..=3).contains(&k) {
        return Err(Error::Range(format!("derivative order {k} not supported (1..=3)")));
    }
    let grid = h.grid;
    let n = grid.n;
    let ds = grid.step();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let start = window_start(i as f64, n).min(n - WINDOW);
        let xs: Vec<f64> = (0..WINDOW).map(|j| (start + j) as f64 - i as f64).collect();
        let w = fornberg(0.0, &xs, k as usize);
        let mut d = [0.0; 4];
        for (order, slot) in d.iter_mut().enumerate().take(k as usize + 1).skip(1) {
            let sum: f64 = (0..WINDOW).map(|j| w[order][j] * h.values[start + j]).sum();
            *slot = sum / ds.powi(order as i32);
        }
        let p = grid.point(i);
        let (r, rc) = (p.r, p.rc);
        let s1 = 1.0 / (r * rc);
        let s2 = -1.0 / (r * r) + 1.0 / (rc * rc);
        let s3 = 2.0 / (r * r * r) + 2.0 / (rc * rc * rc);
        let v = match k {
            1 => d[1] * s1,
            2 => d[2] * s1 * s1 + d[1] * s2,
            _ => d[3] * s1 * s1 * s1 + 3.0 * d[2] * s1 * s2 + d[1] * s3,
        };
        out.push(v);
    }
    GridFunction::new(grid, out, h.envelope.differentiated(k))
}

/// Alias of [`GridFunction::eval`].
pub fn grid_eval(h: &GridFunction, r: f64) -> Result<f64> {
    h.eval(r)
}

/// Ratio of `|h^{(k)}|` to the (differentiated) envelope at every node.
pub fn envelope_ratio(h: &GridFunction, k: u32) -> Result<(f64, Vec<(f64, f64)>)> {
    let d;
    let target = if k == 0 {
        h
    } else {
        d = grid_derivative(h, k)?;
        &d
    };
    let env = h.envelope.differentiated(k);
    let profile: Vec<(f64, f64)> = h
        .grid
        .points()
        .iter()
        .zip(&target.values)
        .map(|(p, v)| (p.r, v.abs() / env.eval_at(*p)))
        .collect();
    let max = profile.iter().fold(0.0f64, |m, (_, q)| m.max(*q));
    Ok((max, profile))
}
