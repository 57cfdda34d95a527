//! Local analysis of multiplier-1 fixed points.

use crate::dynamics::{LocalMap, MapSpec, Point};
use crate::error::{Error, Result};
use crate::series;
use num_complex::Complex64 as C64;
use std::f64::consts::{PI, TAU};

/// Wraps an angle into (-pi, pi].
pub fn wrap_angle(t: f64) -> f64 {
    let mut x = t % TAU;
    if x <= -PI {
        x += TAU;
    } else if x > PI {
        x -= TAU;
    }
    x
}

#[derive(Clone, Debug)]
pub struct ParabolicGerm {
    /// Base point; when infinite, every local quantity lives in the chart `w = 1/z`.
    pub base_point: Point,
    pub multiplicity: usize,
    pub leading_coeff: C64,
    pub attracting_dirs: Vec<f64>,
    pub repelling_dirs: Vec<f64>,
    pub c_hat: C64,
    pub local: LocalMap,
    /// Taylor coefficients of the local map, with `g_1 = 1` and `g_2..g_n = 0` set exactly.
    pub coeffs: Vec<C64>,
    pub expansion: FatouExpansion,
}

/// Asymptotic Fatou coordinate
/// `sum_j alpha_j u^-j + beta log u + sum_j e_j u^j`, solving
/// `Phi(g(u)) - Phi(u) - 1 = O(u^(n+K+1))`.
#[derive(Clone, Debug)]
pub struct FatouExpansion {
    pub n: usize,
    /// `alpha[j-1]` multiplies `u^-j`.
    pub alpha: Vec<C64>,
    pub beta: C64,
    /// `e[j-1]` multiplies `u^j`.
    pub e: Vec<C64>,
}

impl FatouExpansion {
    pub fn solve(coeffs: &[C64], n: usize, k: usize) -> FatouExpansion {
        let top = n + k; // highest matched power
        let len = top + 1;
        let hlen = len + n;
        // g(u) = u (1 + h(u))
        let h: Vec<C64> = (0..hlen).map(|i| coeffs.get(i + 1).copied().unwrap_or_default()).collect();
        let mut h = h;
        h[0] = C64::new(0.0, 0.0);
        let delta_pow = |m: i64| -> Vec<C64> {
            let mut p = series::one_plus_pow(&h, m, hlen);
            p[0] -= 1.0;
            p
        };
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(len);
        for p in 0..len {
            let col: Vec<C64> = if p < n {
                let j = n - p;
                let d = delta_pow(-(j as i64));
                (0..len).map(|q| d.get(q + j).copied().unwrap_or_default()).collect()
            } else if p == n {
                series::log1p(&h, len)
            } else {
                let j = p - n;
                let d = delta_pow(j as i64);
                (0..len).map(|q| if q >= j { d[q - j] } else { C64::new(0.0, 0.0) }).collect()
            };
            cols.push(col);
        }
        let mut x = vec![C64::new(0.0, 0.0); len];
        for p in 0..len {
            let mut rhs = if p == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            for q in 0..p {
                rhs -= x[q] * cols[q][p];
            }
            x[p] = rhs / cols[p][p];
        }
        let alpha = (1..=n).map(|j| x[n - j]).collect();
        let beta = x[n];
        let e = (1..=k).map(|j| x[n + j]).collect();
        FatouExpansion { n, alpha, beta, e }
    }

    /// Value and derivative at `u`, with `arg u` taken within pi of `center`.
    pub fn eval(&self, u: C64, center: f64) -> (C64, C64) {
        let inv = u.inv();
        let mut val = C64::new(0.0, 0.0);
        let mut der = C64::new(0.0, 0.0);
        let mut p = inv;
        for (j, a) in self.alpha.iter().enumerate() {
            let jf = (j + 1) as f64;
            val += a * p;
            der -= a * jf * p * inv;
            p *= inv;
        }
        let theta = center + wrap_angle(u.arg() - center);
        val += self.beta * C64::new(u.norm().ln(), theta);
        der += self.beta * inv;
        let mut p = C64::new(1.0, 0.0);
        for (j, a) in self.e.iter().enumerate() {
            let jf = (j + 1) as f64;
            der += a * jf * p;
            p *= u;
            val += a * p;
        }
        (val, der)
    }
}

impl ParabolicGerm {
    pub fn validity_radius(&self) -> f64 {
        20.0 * (1.0 + self.c_hat.norm())
    }

    /// Local radius corresponding to the validity radius of the translation chart.
    pub fn local_radius(&self) -> f64 {
        (self.multiplicity as f64 * self.leading_coeff.norm() * self.validity_radius())
            .powf(-1.0 / self.multiplicity as f64)
    }

    /// `I(u) = -1 / (n a u^n)` in the local coordinate.
    pub fn translation_local(&self, u: C64) -> C64 {
        -(self.multiplicity as f64 * self.leading_coeff * u.powu(self.multiplicity as u32)).inv()
    }

    pub fn to_translation_chart(&self, z: C64) -> Result<C64> {
        let u = self.local.to_local(z);
        if u == C64::new(0.0, 0.0) || !u.is_finite() {
            return Err(Error::InvalidInput("point is the base point".into()));
        }
        Ok(self.translation_local(u))
    }

    pub fn from_translation_chart(&self, w: C64, sector_index: usize) -> Result<C64> {
        let r = self.validity_radius();
        if w.norm() < r {
            return Err(Error::InsideValidityRadius { re: w.re, im: w.im, radius: r });
        }
        let n = self.multiplicity;
        let base = (-(n as f64 * self.leading_coeff * w).inv()).powf(1.0 / n as f64);
        let u = base * C64::from_polar(1.0, TAU * (sector_index % n) as f64 / n as f64);
        Ok(self.local.to_global(u))
    }

    /// Local seed in petal `p` for a translation-chart value `w`.
    pub fn local_from_translation(&self, w: C64, attracting: bool, petal: usize) -> C64 {
        let n = self.multiplicity as f64;
        let r = (n * self.leading_coeff.norm() * w.norm()).powf(-1.0 / n);
        if attracting {
            let th = self.attracting_dirs[petal] - w.arg() / n;
            C64::from_polar(r, th)
        } else {
            let th = self.repelling_dirs[petal] - (-w).arg() / n;
            C64::from_polar(r, th)
        }
    }

    fn nearest(dirs: &[f64], u: C64) -> usize {
        let a = u.arg();
        let mut best = (f64::INFINITY, 0);
        for (i, d) in dirs.iter().enumerate() {
            let dist = wrap_angle(a - d).abs();
            if dist < best.0 {
                best = (dist, i);
            }
        }
        best.1
    }

    pub fn nearest_attracting(&self, u: C64) -> usize {
        Self::nearest(&self.attracting_dirs, u)
    }

    pub fn nearest_repelling(&self, u: C64) -> usize {
        Self::nearest(&self.repelling_dirs, u)
    }

    /// Angular distance of `u` from the closest repelling direction.
    pub fn repelling_offset(&self, u: C64) -> f64 {
        let i = self.nearest_repelling(u);
        wrap_angle(u.arg() - self.repelling_dirs[i]).abs()
    }
}

/// Expansion order used for the asymptotic Fatou coordinate.
pub fn expansion_order(n: usize) -> usize {
    4 * n + 4
}

pub fn germ_analyze(map: &MapSpec, z0: Point) -> Result<ParabolicGerm> {
    germ_analyze_with_order(map, z0, None)
}

/// As `germ_analyze`, with an explicit expansion order `K` for the Fatou expansion.
pub fn germ_analyze_with_order(map: &MapSpec, z0: Point, k: Option<usize>) -> Result<ParabolicGerm> {
    let local = LocalMap::at(map, z0)?;
    let probe = local.series(64);
    let mu = probe[1];
    if (mu - 1.0).norm() > 1e-8 {
        return Err(Error::NotParabolic { re: mu.re, im: mu.im });
    }
    let scale = probe.iter().take(8).map(|c| c.norm()).fold(1.0, f64::max);
    let n = match (2..probe.len()).find(|&j| probe[j].norm() > 1e-9 * scale) {
        Some(j) => j - 1,
        None => return Err(Error::DegenerateGerm(64)),
    };
    let a = probe[n + 1];
    let k = k.unwrap_or_else(|| expansion_order(n));
    let mut coeffs = local.series(2 * n + k + 2);
    coeffs[0] = C64::new(0.0, 0.0);
    coeffs[1] = C64::new(1.0, 0.0);
    for c in coeffs.iter_mut().take(n + 1).skip(2) {
        *c = C64::new(0.0, 0.0);
    }
    let expansion = FatouExpansion::solve(&coeffs, n, k);
    let c_hat = expansion.beta / n as f64;
    let nf = n as f64;
    let mut attracting: Vec<f64> = (0..n)
        .map(|j| wrap_angle((PI - a.arg() + TAU * j as f64) / nf))
        .collect();
    let mut repelling: Vec<f64> = (0..n)
        .map(|j| wrap_angle((-a.arg() + TAU * j as f64) / nf))
        .collect();
    attracting.sort_by(f64::total_cmp);
    repelling.sort_by(f64::total_cmp);
    Ok(ParabolicGerm {
        base_point: z0,
        multiplicity: n,
        leading_coeff: a,
        attracting_dirs: attracting,
        repelling_dirs: repelling,
        c_hat,
        local,
        coeffs,
        expansion,
    })
}
