//! Dense complex polynomials and root extraction.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;

/// Polynomial with coefficients in ascending order of degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<C64>,
}

/// A root together with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootCluster {
    pub root: C64,
    pub multiplicity: usize,
}

impl Poly {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == C64::new(0.0, 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(C64::new(0.0, 0.0));
        }
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn constant(c: C64) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `z`.
    pub fn z() -> Self {
        Poly::new(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)])
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == C64::new(0.0, 0.0)
    }

    pub fn leading(&self) -> C64 {
        self.coeffs[self.coeffs.len() - 1]
    }

    pub fn eval(&self, z: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Value and first derivative by a single Horner pass.
    pub fn eval_deriv(&self, z: C64) -> (C64, C64) {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Sum of |a_k| |z|^k, the natural scale for backward error.
    pub fn abs_eval(&self, z: C64) -> f64 {
        let r = z.norm();
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * r + c.norm();
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() == 1 {
            return Poly::constant(C64::new(0.0, 0.0));
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, s: C64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Coefficients of `p(z0 + u)` as a polynomial in `u`.
    pub fn taylor_shift(&self, z0: C64) -> Poly {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for k in (i..n - 1).rev() {
                let next = c[k + 1];
                c[k] += z0 * next;
            }
        }
        Poly::new(c)
    }

    /// `w^m p(1/w)`; requires `m >= degree`.
    pub fn reversed(&self, m: usize) -> Poly {
        let mut out = vec![C64::new(0.0, 0.0); m + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[m - k] = *c;
        }
        Poly::new(out)
    }

    /// Drops leading coefficients that are negligible relative to the largest one.
    pub fn trim_relative(&self, tol: f64) -> Poly {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut c = self.coeffs.clone();
        while c.len() > 1 && c[c.len() - 1].norm() <= tol * scale {
            c.pop();
        }
        Poly::new(c)
    }

    /// All roots, simple-root accuracy, by Aberth-Ehrlich iteration.
    pub fn roots(&self) -> Result<Vec<C64>> {
        let n = self.degree();
        if n == 0 {
            return Ok(Vec::new());
        }
        // exact zero roots are split off first
        let zeros = self.coeffs.iter().take_while(|c| **c == C64::new(0.0, 0.0)).count();
        if zeros > 0 {
            let mut out = vec![C64::new(0.0, 0.0); zeros];
            out.extend(Poly::new(self.coeffs[zeros..].to_vec()).roots()?);
            return Ok(out);
        }
        let lead = self.leading();
        let monic = Poly::new(self.coeffs.iter().map(|c| c / lead).collect());
        if n == 1 {
            return Ok(vec![-monic.coeffs[0]]);
        }
        let dp = monic.derivative();
        let radius = (1..=n)
            .map(|k| monic.coeff(n - k).norm().powf(1.0 / k as f64))
            .fold(0.0, f64::max)
            .max(1e-3);
        let mut z: Vec<C64> = (0..n)
            .map(|k| {
                let ang = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
                // slightly uneven radii break symmetric stalls
                C64::from_polar(radius * (1.0 + 0.01 * k as f64 / n as f64), ang)
            })
            .collect();
        let mut done = vec![false; n];
        for _ in 0..2000 {
            let mut moved = false;
            for i in 0..n {
                if done[i] {
                    continue;
                }
                let p = monic.eval(z[i]);
                if p == C64::new(0.0, 0.0) {
                    done[i] = true;
                    continue;
                }
                let ratio = p / dp.eval(z[i]);
                let mut s = C64::new(0.0, 0.0);
                for j in 0..n {
                    if j != i {
                        let d = z[i] - z[j];
                        if d != C64::new(0.0, 0.0) {
                            s += d.inv();
                        }
                    }
                }
                let w = ratio / (C64::new(1.0, 0.0) - ratio * s);
                if !w.is_finite() {
                    continue;
                }
                z[i] -= w;
                if w.norm() <= 1e-15 * (1.0 + z[i].norm()) {
                    done[i] = true;
                } else {
                    moved = true;
                }
            }
            if !moved {
                break;
            }
        }
        let residual = z
            .iter()
            .map(|&r| monic.eval(r).norm() / monic.abs_eval(r).max(1e-300))
            .fold(0.0, f64::max);
        if !residual.is_finite() || residual > 1e-9 {
            return Err(Error::RootSolver { residual });
        }
        Ok(z)
    }

    /// Roots grouped into clusters with multiplicities. Candidates closer than
    /// `radius` (relative to `1 + |z|`) are merged; each merged cluster of size m
    /// is polished as the simple root of the (m-1)-th derivative.
    pub fn root_clusters(&self, radius: f64) -> Result<Vec<RootCluster>> {
        let mut raw = self.roots()?;
        raw.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let mut used = vec![false; raw.len()];
        let mut out = Vec::new();
        for i in 0..raw.len() {
            if used[i] {
                continue;
            }
            let mut members = vec![i];
            used[i] = true;
            // grow the cluster transitively
            let mut k = 0;
            while k < members.len() {
                let zc = raw[members[k]];
                for j in 0..raw.len() {
                    if !used[j] && (raw[j] - zc).norm() <= radius * (1.0 + zc.norm()) {
                        used[j] = true;
                        members.push(j);
                    }
                }
                k += 1;
            }
            let m = members.len();
            let centroid = members.iter().map(|&j| raw[j]).sum::<C64>() / m as f64;
            let root = if m == 1 {
                polish(self, centroid)
            } else {
                let mut d = self.clone();
                for _ in 0..m - 1 {
                    d = d.derivative();
                }
                polish(&d, centroid)
            };
            out.push(RootCluster {
                root,
                multiplicity: m,
            });
        }
        out.sort_by(|a, b| a.root.re.total_cmp(&b.root.re).then(a.root.im.total_cmp(&b.root.im)));
        Ok(out)
    }
}

/// Newton polishing of a simple root; keeps the seed if Newton wanders.
pub fn polish(p: &Poly, seed: C64) -> C64 {
    let mut z = seed;
    let mut best = (p.eval(z).norm(), z);
    for _ in 0..50 {
        let (v, dv) = p.eval_deriv(z);
        if dv == C64::new(0.0, 0.0) {
            break;
        }
        let step = v / dv;
        let next = z - step;
        if !next.is_finite() {
            break;
        }
        z = next;
        let r = p.eval(z).norm();
        if r < best.0 {
            best = (r, z);
        }
        if step.norm() <= 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    if (best.1 - seed).norm() > 1e-2 * (1.0 + seed.norm()) {
        return seed;
    }
    best.1
}
