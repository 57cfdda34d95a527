//! Recovering the `Per₁(1)` parameter of a degree-2 parabolic-like map from
//! fixed-point invariants. Only `A²` is determined.

use crate::dynamics::{fmt_c, FixedPointRecord, Point};
use crate::error::{Error, Result};
use crate::plm::PLMap;
use crate::region::Membership;
use num_complex::Complex64 as C64;
use std::fmt;

const MULTIPLIER_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    AttractingMultiplier,
    IndifferentMultiplier,
    InternalPetalZero,
    HeuristicRepelling,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::AttractingMultiplier => "attracting_multiplier",
            Method::IndifferentMultiplier => "indifferent_multiplier",
            Method::InternalPetalZero => "internal_petal_zero",
            Method::HeuristicRepelling => "heuristic_repelling",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Confidence {
    Guaranteed,
    Heuristic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StraighteningEstimate {
    pub a_squared: C64,
    /// Principal square root first.
    pub representatives: (C64, C64),
    pub method: Method,
    pub confidence: Confidence,
    pub residual: f64,
}

impl fmt::Display for StraighteningEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "A^2        {}", fmt_c(self.a_squared))?;
        writeln!(f, "A          {}", fmt_c(self.representatives.0))?;
        writeln!(f, "-A         {}", fmt_c(self.representatives.1))?;
        writeln!(f, "method     {}", self.method.name())?;
        let conf = match self.confidence {
            Confidence::Guaranteed => "guaranteed",
            Confidence::Heuristic => "heuristic",
        };
        writeln!(f, "confidence {conf}")?;
        write!(f, "residual   {:.16e}", self.residual)
    }
}

/// Fixed points relevant to straightening.
#[derive(Clone, Debug)]
pub struct InternalFixedPoints {
    /// Fixed points strictly inside `Ω'`, sorted by location.
    pub internal: Vec<FixedPointRecord>,
    /// Fixed points too close to `∂Ω'` to classify.
    pub ambiguous: Vec<FixedPointRecord>,
    /// The external parabolic point `γ(0)`.
    pub parabolic: FixedPointRecord,
}

/// Multiplier of `P_A` at its finite fixed point `-1/A`.
pub fn perone_fixed_multiplier(a: C64) -> Result<C64> {
    if a == C64::new(0.0, 0.0) {
        return Err(Error::InvalidInput("A = 0 has no finite fixed point".into()));
    }
    Ok(1.0 - a * a)
}

pub fn internal_fixed_points(plm: &PLMap) -> Result<InternalFixedPoints> {
    if plm.degree_d != 2 {
        return Err(Error::InvalidInput(format!("degree {} is not 2", plm.degree_d)));
    }
    let omega = &plm.pieces.omega_prime;
    let eps = 1e-9 * omega.diameter();
    let p0 = plm.parabolic_point;
    let mut internal = Vec::new();
    let mut ambiguous = Vec::new();
    let mut parabolic = None;
    for rec in plm.map.fixed_points()? {
        let Point::Finite(z) = rec.location else { continue };
        if (z - p0).norm() <= 1e-6 * (1.0 + p0.norm()) {
            parabolic = Some(rec);
            continue;
        }
        match omega.classify(z, eps) {
            Membership::Inside => internal.push(rec),
            Membership::Boundary => ambiguous.push(rec),
            Membership::Outside => {}
        }
    }
    let key = |r: &FixedPointRecord| r.location.finite().map(|z| (z.re, z.im)).unwrap_or_default();
    internal.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal));
    let parabolic = parabolic.ok_or_else(|| Error::Structural("parabolic point missing from fixed points".into()))?;
    Ok(InternalFixedPoints { internal, ambiguous, parabolic })
}

/// Whether some attracting direction of the germ at `γ(0)` points into `Ω'`.
fn has_internal_petal(plm: &PLMap) -> bool {
    let g = &plm.germ;
    let r = 0.5 * g.local_radius().min(plm.u_prime.distance_to_boundary(plm.parabolic_point));
    let omega = &plm.pieces.omega_prime;
    g.attracting_dirs.iter().any(|&th| {
        let z = g.local.to_global(C64::from_polar(r, th));
        omega.classify(z, 0.0) == Membership::Inside
    })
}

fn estimate(a_squared: C64, method: Method, confidence: Confidence, residual: f64) -> StraighteningEstimate {
    let s = a_squared.sqrt();
    StraighteningEstimate { a_squared, representatives: (s, -s), method, confidence, residual }
}

fn residual_at(plm: &PLMap, rec: &FixedPointRecord) -> f64 {
    rec.location.finite().map(|z| (plm.map.eval_c(z) - z).norm()).unwrap_or(f64::INFINITY)
}

pub fn straighten_estimate(plm: &PLMap) -> Result<StraighteningEstimate> {
    let fps = internal_fixed_points(plm)?;
    let by_kind = |pred: &dyn Fn(C64) -> bool| fps.internal.iter().find(|r| pred(r.multiplier));
    if let Some(r) = by_kind(&|m| m.norm() < 1.0 - MULTIPLIER_TOL) {
        return Ok(estimate(1.0 - r.multiplier, Method::AttractingMultiplier, Confidence::Guaranteed, residual_at(plm, r)));
    }
    if has_internal_petal(plm) {
        let res = residual_at(plm, &fps.parabolic);
        return Ok(estimate(C64::new(0.0, 0.0), Method::InternalPetalZero, Confidence::Guaranteed, res));
    }
    if let Some(r) = by_kind(&|m| (m.norm() - 1.0).abs() <= MULTIPLIER_TOL && (m - 1.0).norm() > MULTIPLIER_TOL) {
        return Ok(estimate(1.0 - r.multiplier, Method::IndifferentMultiplier, Confidence::Guaranteed, residual_at(plm, r)));
    }
    if let Some(r) = by_kind(&|m| m.norm() > 1.0 + MULTIPLIER_TOL) {
        return Ok(estimate(1.0 - r.multiplier, Method::HeuristicRepelling, Confidence::Heuristic, residual_at(plm, r)));
    }
    Err(Error::EstimationImpossible)
}
