//! Dividing arcs through a parabolic fixed point: `f(γ(t)) = γ(d t)`.

use crate::dynamics::MapSpec;
use crate::error::{Error, Result};
use crate::fatou::FatouChart;
use crate::germ::ParabolicGerm;
use crate::green::{trace_external_ray, Angle, SAMPLES_PER_LEVEL};
use num_complex::Complex64 as C64;

/// Default number of factor-`d` levels sampled toward `t = 0`.
pub const DEFAULT_LEVELS: usize = 128;

#[derive(Clone, Debug)]
pub struct DividingArc {
    /// Strictly increasing in [-1, 1]; contains 0.
    pub params: Vec<f64>,
    pub points: Vec<C64>,
    pub base_degree_d: usize,
    pub petal_plus: usize,
    pub petal_minus: usize,
}

/// Geometric grid `d^(-k/16)` for `k = 0..=16 levels`, decreasing from 1.
pub fn geometric_grid(d: usize, levels: usize) -> Vec<f64> {
    let d = d as f64;
    (0..=SAMPLES_PER_LEVEL * levels)
        .map(|k| d.powf(-(k as f64) / SAMPLES_PER_LEVEL as f64))
        .collect()
}

fn lagrange(xs: &[f64], ys: &[C64], x: f64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..xs.len() {
        let mut w = 1.0;
        for j in 0..xs.len() {
            if i != j {
                w *= (x - xs[j]) / (xs[i] - xs[j]);
            }
        }
        acc += ys[i] * w;
    }
    acc
}

impl DividingArc {
    /// Builds from the two halves, each given as `(|t|, point)` in any order.
    pub fn from_halves(
        plus: Vec<(f64, C64)>,
        minus: Vec<(f64, C64)>,
        center: C64,
        d: usize,
        petal_plus: usize,
        petal_minus: usize,
    ) -> Result<DividingArc> {
        let mut params = Vec::with_capacity(plus.len() + minus.len() + 1);
        let mut points = Vec::with_capacity(params.capacity());
        let mut m = minus;
        m.sort_by(|a, b| b.0.total_cmp(&a.0));
        for (t, z) in m {
            params.push(-t);
            points.push(z);
        }
        params.push(0.0);
        points.push(center);
        let mut p = plus;
        p.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (t, z) in p {
            params.push(t);
            points.push(z);
        }
        if params.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Structural("arc parameters not strictly increasing".into()));
        }
        Ok(DividingArc { params, points, base_degree_d: d, petal_plus, petal_minus })
    }

    pub fn center(&self) -> C64 {
        self.points[self.zero_index()]
    }

    fn zero_index(&self) -> usize {
        self.params.iter().position(|&t| t == 0.0).expect("arc contains t = 0")
    }

    pub fn start(&self) -> C64 {
        self.points[0]
    }

    pub fn end(&self) -> C64 {
        self.points[self.points.len() - 1]
    }

    /// Samples with `t > 0`, increasing.
    pub fn plus_half(&self) -> (&[f64], &[C64]) {
        let i = self.zero_index() + 1;
        (&self.params[i..], &self.points[i..])
    }

    /// Samples with `t < 0`, decreasing in `|t|` reversed (i.e. increasing `t`).
    pub fn minus_half(&self) -> (&[f64], &[C64]) {
        let i = self.zero_index();
        (&self.params[..i], &self.points[..i])
    }

    /// Cubic interpolation in `log|t|` on the matching half; exact at samples.
    pub fn eval(&self, t: f64) -> Option<C64> {
        if t == 0.0 {
            return Some(self.center());
        }
        let (ts, zs) = if t > 0.0 { self.plus_half() } else { self.minus_half() };
        let s = t.abs().ln();
        let logs: Vec<f64> = ts.iter().map(|x| x.abs().ln()).collect();
        // logs is monotone (increasing for plus, decreasing for minus)
        let incr = t > 0.0;
        let lo = logs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if s < lo - 1e-12 || s > hi + 1e-12 {
            return None;
        }
        let n = logs.len();
        if let Some(i) = logs.iter().position(|&x| (x - s).abs() <= 1e-12 * (1.0 + s.abs())) {
            return Some(zs[i]);
        }
        let idx = if incr {
            logs.partition_point(|&x| x < s)
        } else {
            logs.partition_point(|&x| x > s)
        };
        let a = idx.saturating_sub(2).min(n.saturating_sub(4));
        let b = (a + 4).min(n);
        Some(lagrange(&logs[a..b], &zs[a..b], s))
    }

    /// Ordered polyline from `γ(-1)` through `γ(0)` to `γ(1)`.
    pub fn polyline(&self) -> &[C64] {
        &self.points
    }

    /// Restriction to `τ <= |t| <= hi`.
    pub fn restricted(&self, lo: f64, hi: f64) -> DividingArc {
        let keep = |t: f64| t.abs() >= lo * (1.0 - 1e-12) && t.abs() <= hi * (1.0 + 1e-12);
        let mut params = Vec::new();
        let mut points = Vec::new();
        for (t, z) in self.params.iter().zip(&self.points) {
            if *t == 0.0 || keep(*t) {
                params.push(*t);
                points.push(*z);
            }
        }
        DividingArc { params, points, ..self.clone() }
    }
}

/// Fatou-coordinate arc `γ±(t) = ψ±(log_d|t| + m±)` on the geometric grid.
#[allow(clippy::too_many_arguments)]
pub fn build_dividing_arc(
    germ: &ParabolicGerm,
    rep_chart_plus: &FatouChart,
    rep_chart_minus: &FatouChart,
    m_plus: C64,
    m_minus: C64,
    d: usize,
    levels: usize,
) -> Result<DividingArc> {
    let center = germ
        .base_point
        .finite()
        .ok_or_else(|| Error::InvalidInput("arc through infinity".into()))?;
    let grid = geometric_grid(d, levels);
    let ld = (d as f64).ln();
    let half = |chart: &FatouChart, m: C64| -> Result<Vec<(f64, C64)>> {
        let mut out = Vec::with_capacity(grid.len());
        for &t in &grid {
            let z = chart.inverse(C64::new(t.ln() / ld, 0.0) + m).map_err(|e| {
                Error::Structural(format!("arc inverse failed at |t| = {t:e}: {e}"))
            })?;
            out.push((t, z));
        }
        Ok(out)
    };
    DividingArc::from_halves(
        half(rep_chart_plus, m_plus)?,
        half(rep_chart_minus, m_minus)?,
        center,
        d,
        rep_chart_plus.petal_index,
        rep_chart_minus.petal_index,
    )
}

/// Arc from two fixed external rays parametrized by potential,
/// `γ±(t) = R±(p1 |t|^(log_d D))` with `D` the degree of the polynomial.
pub fn arc_from_rays(
    map: &MapSpec,
    germ: &ParabolicGerm,
    plus: Angle,
    minus: Angle,
    p1: f64,
    d: usize,
    levels: usize,
) -> Result<DividingArc> {
    let center = germ
        .base_point
        .finite()
        .ok_or_else(|| Error::InvalidInput("arc through infinity".into()))?;
    let big = map.degree() as f64;
    let expo = big.ln() / (d as f64).ln();
    let grid = geometric_grid(d, levels);
    let pot_lo = p1 * grid[grid.len() - 1].powf(expo);
    let half = |a: Angle| -> Result<(Vec<(f64, C64)>, usize)> {
        let tr = trace_external_ray(map, a, p1, pot_lo)?;
        tr.complete()?;
        if tr.samples.len() < grid.len() {
            return Err(Error::Structural(format!("ray {a} ended early")));
        }
        let pts: Vec<(f64, C64)> = grid.iter().zip(&tr.samples).map(|(&t, s)| (t, s.z)).collect();
        let petal = germ.nearest_repelling(germ.local.to_local(tr.last()));
        Ok((pts, petal))
    };
    let (p, pp) = half(plus)?;
    let (m, pm) = half(minus)?;
    DividingArc::from_halves(p, m, center, d, pp, pm)
}

/// Extends a seed arc on `τ <= |t| <= dτ` forward by `f` and backward by the
/// continuous inverse branch, `n_steps` factors of `d` each way, clipped at `|t| <= 1`.
pub fn extend_arc_by_dynamics(map: &MapSpec, seed: &DividingArc, n_steps: usize) -> Result<DividingArc> {
    if n_steps == 0 {
        return Ok(seed.clone());
    }
    let d = seed.base_degree_d as f64;
    let center = seed.center();
    let extend = |ts: &[f64], zs: &[C64]| -> Result<Vec<(f64, C64)>> {
        let mut pts: Vec<(f64, C64)> = ts.iter().map(|t| t.abs()).zip(zs.iter().copied()).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        // drop the duplicated top level so each level is a half-open copy
        let tau = pts[0].0;
        let base: Vec<(f64, C64)> = pts.iter().copied().filter(|p| p.0 < d * tau * (1.0 - 1e-12)).collect();
        let mut out = pts.clone();
        let mut level = base.clone();
        for _ in 0..n_steps {
            level = level.iter().map(|&(t, z)| (t * d, map.eval_c(z))).collect();
            for &(t, z) in &level {
                if t <= 1.0 + 1e-12 && !out.iter().any(|p| (p.0 - t).abs() <= 1e-12 * t) {
                    out.push((t, z));
                }
            }
        }
        let mut level = base;
        for step in 0..n_steps {
            // walk from large |t| to small so the seed is the neighbouring sample
            let mut next = Vec::with_capacity(level.len());
            let mut guess = level.first().map(|p| p.1).unwrap_or(center);
            for &(t, z) in level.iter().rev() {
                let w = preimage_near(map, z, guess)
                    .ok_or(Error::InverseBranch(step))?;
                next.push((t / d, w));
                guess = w;
            }
            next.reverse();
            level = next;
            out.extend(level.iter().copied());
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out.dedup_by(|a, b| (a.0 - b.0).abs() <= 1e-12 * b.0);
        Ok(out)
    };
    let (tp, zp) = seed.plus_half();
    let (tm, zm) = seed.minus_half();
    DividingArc::from_halves(extend(tp, zp)?, extend(tm, zm)?, center, seed.base_degree_d, seed.petal_plus, seed.petal_minus)
}

/// Newton solution of `f(z) = v` started at `seed`.
pub fn preimage_near(map: &MapSpec, v: C64, seed: C64) -> Option<C64> {
    let mut z = seed;
    for _ in 0..100 {
        let (w, dw) = map.eval_deriv_c(z);
        let step = (w - v) / dw;
        if !step.is_finite() {
            return None;
        }
        z -= step;
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    ((map.eval_c(z) - v).norm() < 1e-12 * (1.0 + v.norm())).then_some(z)
}

/// `max |f(γ(t)) - γ(d t)|` over samples with `0 < |t| <= 1/d`.
pub fn check_arc_invariance(map: &MapSpec, arc: &DividingArc) -> f64 {
    let d = arc.base_degree_d as f64;
    let mut worst: f64 = 0.0;
    for (&t, &z) in arc.params.iter().zip(&arc.points) {
        if t.abs() > 1.0 / d * (1.0 + 1e-12) {
            continue;
        }
        let fz = map.eval_c(z);
        let r = match arc.eval((d * t).clamp(-1.0, 1.0)) {
            Some(g) => (fz - g).norm(),
            None => continue,
        };
        worst = worst.max(r);
    }
    worst
}

/// Per-sample residual `|f(γ(t)) - γ(d t)|`, `None` where `d t` is outside the arc.
pub fn arc_residuals(map: &MapSpec, arc: &DividingArc) -> Vec<Option<f64>> {
    let d = arc.base_degree_d as f64;
    arc.params
        .iter()
        .zip(&arc.points)
        .map(|(&t, &z)| {
            if t.abs() > 1.0 / d * (1.0 + 1e-12) {
                return None;
            }
            arc.eval(d * t).map(|g| (map.eval_c(z) - g).norm())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_geometric() {
        let g = geometric_grid(2, 3);
        assert_eq!(g.len(), 49);
        assert_eq!(g[0], 1.0);
        assert!((g[16] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn interpolation_exact_at_samples_and_smooth() {
        let ts = geometric_grid(2, 4);
        let plus: Vec<(f64, C64)> = ts.iter().map(|&t| (t, C64::new(t, t * t))).collect();
        let minus: Vec<(f64, C64)> = ts.iter().map(|&t| (t, C64::new(-t, t * t))).collect();
        let arc = DividingArc::from_halves(plus, minus, C64::new(0.0, 0.0), 2, 0, 0).unwrap();
        assert_eq!(arc.eval(ts[5]), Some(C64::new(ts[5], ts[5] * ts[5])));
        let t = 0.3;
        let z = arc.eval(-t).unwrap();
        assert!((z - C64::new(-t, t * t)).norm() < 1e-5);
        assert!(arc.eval(1e-6).is_none());
    }
}
