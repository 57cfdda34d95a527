//! Attracting and repelling Fatou coordinates and their inverses.
//!
//! The chart is evaluated as `Phi(u_k) -/+ k` along the forward (attracting)
//! or backward (repelling) orbit, where `Phi` is the asymptotic expansion
//! stored in the germ. Iteration stops once successive estimates agree.

use crate::dynamics::MapSpec;
use crate::error::{Error, Result};
use crate::germ::ParabolicGerm;
use num_complex::Complex64 as C64;
use std::sync::Arc;

pub const ITERATION_CAP: usize = 100_000;
/// Successive estimates closer than this end the iteration.
pub const CAUCHY_TOL: f64 = 1e-12;
/// Minimum number of steps allowed before a point must be inside the petal.
pub const MEMBERSHIP_STEPS: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PetalKind {
    Attracting,
    Repelling,
}

#[derive(Clone, Debug)]
pub struct FatouChart {
    pub map: MapSpec,
    pub germ: Arc<ParabolicGerm>,
    pub kind: PetalKind,
    pub petal_index: usize,
    pub normalization_shift: C64,
    pub anchor: Option<(C64, C64)>,
    raw_ref: Option<C64>,
}

/// Representative of `w` modulo 1 with real part in [0, 1).
pub fn ecalle_project(w: C64) -> C64 {
    let mut re = w.re - w.re.floor();
    if re >= 1.0 {
        re = 0.0;
    }
    C64::new(re, w.im)
}

impl FatouChart {
    pub fn new(map: &MapSpec, germ: Arc<ParabolicGerm>, kind: PetalKind, petal_index: usize) -> Result<Self> {
        if petal_index >= germ.multiplicity {
            return Err(Error::InvalidInput(format!(
                "petal index {petal_index} out of range for multiplicity {}",
                germ.multiplicity
            )));
        }
        Ok(FatouChart {
            map: map.clone(),
            germ,
            kind,
            petal_index,
            normalization_shift: C64::new(0.0, 0.0),
            anchor: None,
            raw_ref: None,
        })
    }

    /// Normalizes so that `phi(z_ref) = target` exactly.
    pub fn with_anchor(mut self, z_ref: C64, target: C64) -> Result<Self> {
        let raw = self.raw(z_ref)?.0;
        self.raw_ref = Some(raw);
        self.anchor = Some((z_ref, target));
        self.normalization_shift = target - raw;
        Ok(self)
    }

    pub fn with_shift(mut self, shift: C64) -> Self {
        self.raw_ref = None;
        self.anchor = None;
        self.normalization_shift = shift;
        self
    }

    /// Imaginary shift making `Im phi(z_ref) = 0`, leaving the real part alone.
    pub fn calibrated_real_at(self, z_ref: C64) -> Result<Self> {
        let raw = self.raw(z_ref)?.0;
        Ok(self.with_shift(C64::new(0.0, -raw.im)))
    }

    pub fn direction(&self) -> f64 {
        match self.kind {
            PetalKind::Attracting => self.germ.attracting_dirs[self.petal_index],
            PetalKind::Repelling => self.germ.repelling_dirs[self.petal_index],
        }
    }

    fn normalize(&self, raw: C64) -> C64 {
        match (self.raw_ref, self.anchor) {
            (Some(r), Some((_, target))) => (raw - r) + target,
            _ => raw + self.normalization_shift,
        }
    }

    fn denormalize(&self, w: C64) -> C64 {
        match (self.raw_ref, self.anchor) {
            (Some(r), Some((_, target))) => (w - target) + r,
            _ => w - self.normalization_shift,
        }
    }

    /// Whether a local point lies in the region where the expansion is trusted.
    pub fn valid_local(&self, u: C64) -> bool {
        let g = &self.germ;
        let r = g.validity_radius();
        let w = g.translation_local(u);
        match self.kind {
            PetalKind::Attracting => {
                g.nearest_attracting(u) == self.petal_index && (w.re >= r || w.im.abs() >= r)
            }
            PetalKind::Repelling => {
                g.nearest_repelling(u) == self.petal_index && (w.re <= -r || w.im.abs() >= r)
            }
        }
    }

    fn membership_window(&self) -> usize {
        MEMBERSHIP_STEPS.max((4.0 * self.germ.validity_radius()).ceil() as usize)
    }

    /// Unnormalized chart value and derivative.
    fn raw(&self, z: C64) -> Result<(C64, C64)> {
        let g = &self.germ;
        let local = &g.local;
        let mut u = local.to_local(z);
        if !u.is_finite() || u == C64::new(0.0, 0.0) {
            return Err(Error::InvalidInput("point is the base point".into()));
        }
        let mut dprod = local.to_global_deriv(u).inv();
        let center = self.direction();
        let window = self.membership_window();
        let attracting = self.kind == PetalKind::Attracting;
        let mut prev: Option<C64> = None;
        let mut k: usize = 0;
        loop {
            if self.valid_local(u) {
                let (phi, dphi) = g.expansion.eval(u, center);
                let kk = k as f64;
                let est = if attracting { phi - kk } else { phi + kk };
                if let Some(p) = prev {
                    let tol = CAUCHY_TOL + 4e-16 * phi.norm();
                    if (est - p).norm() <= tol {
                        return Ok((est, dphi * dprod));
                    }
                }
                prev = Some(est);
            } else if prev.is_some() {
                // left the trusted region after entering it
                return Err(if attracting {
                    Error::NotInPetal { petal: self.petal_index, iterations: k }
                } else {
                    Error::InverseBranch(k)
                });
            } else if k >= window {
                return Err(Error::NotInPetal { petal: self.petal_index, iterations: k });
            }
            if k >= ITERATION_CAP {
                return Err(Error::CapExceeded(ITERATION_CAP));
            }
            if attracting {
                let (v, dv) = local.eval_deriv(u);
                dprod *= dv;
                u = v;
            } else {
                let seed = 2.0 * u - local.eval(u);
                let v = local.preimage(u, seed).ok_or(Error::InverseBranch(k))?;
                if !(v.norm() <= 2.0 * u.norm()) {
                    return Err(Error::InverseBranch(k));
                }
                let (_, dv) = local.eval_deriv(v);
                dprod /= dv;
                u = v;
            }
            if !u.is_finite() || u == C64::new(0.0, 0.0) {
                return Err(Error::NotInPetal { petal: self.petal_index, iterations: k });
            }
            k += 1;
        }
    }

    /// Chart value; dispatches on the chart kind.
    pub fn eval(&self, z: C64) -> Result<C64> {
        Ok(self.normalize(self.raw(z)?.0))
    }

    pub fn eval_with_derivative(&self, z: C64) -> Result<(C64, C64)> {
        let (v, d) = self.raw(z)?;
        Ok((self.normalize(v), d))
    }

    /// Solves `Phi(u) = t` in the chart's petal, starting from the translation-chart seed.
    fn solve_expansion(&self, t: C64) -> Option<C64> {
        let g = &self.germ;
        let attracting = self.kind == PetalKind::Attracting;
        let center = self.direction();
        let mut u = g.local_from_translation(t, attracting, self.petal_index);
        for _ in 0..80 {
            let (v, d) = g.expansion.eval(u, center);
            let step = (v - t) / d;
            if !step.is_finite() {
                return None;
            }
            // damp large steps to stay on the branch
            let step = if step.norm() > 0.5 * u.norm() { step * (0.5 * u.norm() / step.norm()) } else { step };
            u -= step;
            if step.norm() <= 1e-16 * u.norm() {
                break;
            }
        }
        let (v, _) = g.expansion.eval(u, center);
        ((v - t).norm() <= 1e-10 * (1.0 + t.norm())).then_some(u)
    }

    /// Inverse chart: `z` with `phi(z) = w`.
    pub fn inverse(&self, w: C64) -> Result<C64> {
        let t = self.denormalize(w);
        let r = self.germ.validity_radius();
        let local = &self.germ.local;
        let attracting = self.kind == PetalKind::Attracting;
        let valid_t = |x: C64| {
            if attracting {
                x.re >= 1.5 * r || x.im.abs() >= 1.5 * r
            } else {
                x.re <= -1.5 * r || x.im.abs() >= 1.5 * r
            }
        };
        let mut m: usize = if valid_t(t) {
            0
        } else if attracting {
            (2.0 * r - t.re).ceil().max(0.0) as usize
        } else {
            (2.0 * r + t.re).ceil().max(0.0) as usize
        };
        let mut seed = None;
        for _ in 0..6 {
            let tm = if attracting { t + m as f64 } else { t - m as f64 };
            if let Some(u) = self.solve_expansion(tm) {
                if self.valid_local(u) {
                    seed = Some(u);
                    break;
                }
            }
            m += r.ceil() as usize;
        }
        let mut u = seed.ok_or_else(|| Error::NewtonDivergence("no seed in petal".into()))?;
        if attracting {
            for j in 0..m {
                let s = 2.0 * u - local.eval(u);
                u = local.preimage(u, s).ok_or(Error::InverseBranch(j))?;
            }
            let z = local.to_global(u);
            return self.polish(z, w);
        }
        // repelling: polish deep in the petal, then push forward with the map
        let z = self.polish(local.to_global(u), w - m as f64)?;
        let mut z = z;
        for _ in 0..m {
            z = self.map.eval_c(z);
        }
        if !z.is_finite() {
            return Err(Error::NewtonDivergence("pushed onto a pole".into()));
        }
        if let Ok(v) = self.eval(z) {
            if (v - w).norm() > 1e-8 * (1.0 + w.norm()) {
                return Err(Error::NewtonDivergence(format!("residual {:e}", (v - w).norm())));
            }
        }
        Ok(z)
    }

    /// Newton on the full chart from `z` toward value `w`.
    fn polish(&self, mut z: C64, w: C64) -> Result<C64> {
        if !z.is_finite() {
            return Err(Error::NewtonDivergence("seed at the pole".into()));
        }
        for _ in 0..8 {
            let (v, d) = self.eval_with_derivative(z)?;
            let step = (v - w) / d;
            if !step.is_finite() {
                return Err(Error::NewtonDivergence("zero chart derivative".into()));
            }
            z -= step;
            if (v - w).norm() <= 1e-12 * (1.0 + w.norm()) {
                break;
            }
        }
        let v = self.eval(z)?;
        if (v - w).norm() > 1e-8 * (1.0 + w.norm()) {
            return Err(Error::NewtonDivergence(format!("residual {:e}", (v - w).norm())));
        }
        Ok(z)
    }

    /// A point of the petal whose translation-chart value is `w` (no limit taken).
    pub fn petal_point(&self, w: C64) -> C64 {
        let u = self.germ.local_from_translation(w, self.kind == PetalKind::Attracting, self.petal_index);
        self.germ.local.to_global(u)
    }

    /// Estimates `Phi(u_k) -/+ k` at the requested step counts, for convergence studies.
    pub fn estimates(&self, z: C64, ks: &[usize]) -> Vec<C64> {
        let g = &self.germ;
        let local = &g.local;
        let center = self.direction();
        let attracting = self.kind == PetalKind::Attracting;
        let mut u = local.to_local(z);
        let kmax = ks.iter().copied().max().unwrap_or(0);
        let mut out = Vec::new();
        for k in 0..=kmax {
            if ks.contains(&k) {
                let (phi, _) = g.expansion.eval(u, center);
                out.push(self.normalize(if attracting { phi - k as f64 } else { phi + k as f64 }));
            }
            u = if attracting {
                local.eval(u)
            } else {
                local.preimage(u, 2.0 * u - local.eval(u)).unwrap_or(u)
            };
        }
        out
    }
}

pub fn attracting_fatou(chart: &FatouChart, z: C64) -> Result<C64> {
    if chart.kind != PetalKind::Attracting {
        return Err(Error::InvalidInput("chart is repelling".into()));
    }
    chart.eval(z)
}

pub fn repelling_fatou(chart: &FatouChart, z: C64) -> Result<C64> {
    if chart.kind != PetalKind::Repelling {
        return Err(Error::InvalidInput("chart is attracting".into()));
    }
    chart.eval(z)
}

pub fn inverse_fatou(chart: &FatouChart, w: C64) -> Result<C64> {
    chart.inverse(w)
}
