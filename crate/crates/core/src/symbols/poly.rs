//! Dense real polynomials and their roots (Aberth–Ehrlich iteration).

use num_complex::Complex64;

/// Real polynomial, coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub coeffs: Vec<f64>,
}

impl Poly {
    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![] }
    }

    /// `∏ (z + d)` over the given shifts.
    pub fn from_shifts<'a>(shifts: impl IntoIterator<Item = &'a f64>) -> Self {
        let mut p = Self::constant(1.0);
        for d in shifts {
            p = p.mul_linear(*d);
        }
        p
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != 0.0)
    }

    pub fn leading(&self) -> f64 {
        self.degree().map_or(0.0, |d| self.coeffs[d])
    }

    /// Multiply by `(z + d)`.
    pub fn mul_linear(&self, d: f64) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += d * c;
            out[i + 1] += c;
        }
        Self { coeffs: out }
    }

    pub fn add_scaled(&mut self, other: &Poly, scale: f64) {
        if other.coeffs.len() > self.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), 0.0);
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += scale * b;
        }
    }

    /// Zero out coefficients below `rel` times the largest magnitude and drop
    /// trailing zeros.
    pub fn trimmed(mut self, rel: f64) -> Self {
        let max = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        for c in &mut self.coeffs {
            if c.abs() <= rel * max {
                *c = 0.0;
            }
        }
        let len = self.degree().map_or(0, |d| d + 1);
        self.coeffs.truncate(len);
        self
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| i as f64 * c)
                .collect(),
        }
    }

    /// All complex roots, simultaneously refined by Aberth–Ehrlich.
    pub fn roots(&self) -> Vec<Complex64> {
        let Some(n) = self.degree() else {
            return vec![];
        };
        if n == 0 {
            return vec![];
        }
        let lead = self.coeffs[n];
        let monic = Poly {
            coeffs: self.coeffs[..=n].iter().map(|c| c / lead).collect(),
        };
        if n == 1 {
            return vec![Complex64::new(-monic.coeffs[0], 0.0)];
        }
        let deriv = monic.derivative();

        // Cauchy bound for the initial circle, off-axis start angle
        let radius = 1.0
            + monic.coeffs[..n]
                .iter()
                .fold(0.0f64, |m, c| m.max(c.abs()));
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
                Complex64::from_polar(0.5 * radius, theta)
            })
            .collect();

        for _ in 0..500 {
            let mut max_step = 0.0f64;
            for k in 0..n {
                let pk = monic.eval(z[k]);
                if pk.norm() == 0.0 {
                    continue;
                }
                let ratio = pk / deriv.eval(z[k]);
                let repulsion: Complex64 = (0..n)
                    .filter(|&j| j != k)
                    .map(|j| (z[k] - z[j]).inv())
                    .sum();
                let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
                if step.is_finite() {
                    z[k] -= step;
                    max_step = max_step.max(step.norm() / z[k].norm().max(1.0));
                }
            }
            if max_step < 1e-15 {
                break;
            }
        }
        z
    }
}

/// A real root with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: usize,
}

/// Real roots of `poly` with multiplicities.
///
/// Computed roots closer than `cluster_tol` (relative) are merged and the
/// merged value is refined by Newton's method on the derivative of order
/// `multiplicity − 1`, where the root is simple. Returns `Err(root)` for
/// the first cluster with an imaginary part above `imag_tol`.
pub fn real_root_clusters(
    poly: &Poly,
    cluster_tol: f64,
    imag_tol: f64,
) -> Result<Vec<RealRoot>, Complex64> {
    let roots = poly.roots();
    let mut used = vec![false; roots.len()];
    let mut out = Vec::new();
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut members = vec![roots[i]];
        // grow the cluster transitively
        let mut grew = true;
        while grew {
            grew = false;
            for j in 0..roots.len() {
                if used[j] {
                    continue;
                }
                let near = members.iter().any(|m| {
                    (roots[j] - m).norm() <= cluster_tol * m.norm().max(1.0)
                });
                if near {
                    used[j] = true;
                    members.push(roots[j]);
                    grew = true;
                }
            }
        }
        let mut mean: Complex64 = members.iter().sum::<Complex64>() / members.len() as f64;
        if members.len() > 1 {
            mean = polish(poly, mean, members.len());
        }
        if mean.im.abs() > imag_tol * mean.norm().max(1.0) {
            return Err(mean);
        }
        out.push(RealRoot {
            value: mean.re,
            multiplicity: members.len(),
        });
    }
    out.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(out)
}

fn polish(poly: &Poly, start: Complex64, multiplicity: usize) -> Complex64 {
    let mut d = poly.clone();
    for _ in 1..multiplicity {
        d = d.derivative();
    }
    let dd = d.derivative();
    let mut z = start;
    for _ in 0..50 {
        let step = d.eval(z) / dd.eval(z);
        if !step.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= 1e-16 * z.norm().max(1.0) {
            break;
        }
    }
    // Newton from a nearby start should not wander off the cluster
    if (z - start).norm() <= 1e-2 * start.norm().max(1.0) {
        z
    } else {
        start
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_and_quadratic() {
        let p = Poly::from_shifts(&[1.5]);
        let r = p.roots();
        assert_eq!(r.len(), 1);
        assert!((r[0].re + 1.5).abs() < 1e-15);

        let p = Poly::from_shifts(&[1.0, 2.0]);
        let clusters = real_root_clusters(&p, 1e-6, 1e-9).unwrap();
        let vals: Vec<f64> = clusters.iter().map(|c| c.value).collect();
        assert!((vals[0] + 2.0).abs() < 1e-12 && (vals[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn repeated_root_is_clustered() {
        let p = Poly::from_shifts(&[0.5, 0.5, 0.5, 3.0]);
        let clusters = real_root_clusters(&p, 1e-4, 1e-9).unwrap();
        assert_eq!(clusters.len(), 2);
        assert_eq!(clusters[1].multiplicity, 3);
        assert!((clusters[1].value + 0.5).abs() < 1e-9);
    }

    #[test]
    fn complex_pair_is_rejected() {
        // z^2 + 2z + 5 has roots −1 ± 2i
        let p = Poly {
            coeffs: vec![5.0, 2.0, 1.0],
        };
        let err = real_root_clusters(&p, 1e-6, 1e-9).unwrap_err();
        assert!((err.im.abs() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn trimming_drops_cancelled_leading_terms() {
        let p = Poly {
            coeffs: vec![1.0, 3.0, 1e-18],
        }
        .trimmed(1e-14);
        assert_eq!(p.degree(), Some(1));
    }
}
