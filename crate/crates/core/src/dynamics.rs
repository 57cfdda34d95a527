//! The catalog of maps, with evaluation, orbits, fixed and critical points,
//! and local expansions at fixed points.

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::series;
use num_complex::Complex64 as C64;
use std::fmt;

/// A point of the Riemann sphere. Infinity only ever enters arithmetic
/// through the chart `w = 1/z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Point {
    Finite(C64),
    Infinity,
}

impl Point {
    pub fn finite(&self) -> Option<C64> {
        match self {
            Point::Finite(z) => Some(*z),
            Point::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    fn from_value(z: C64) -> Point {
        if z.is_finite() {
            Point::Finite(z)
        } else {
            Point::Infinity
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(z) => write!(f, "{}", fmt_c(*z)),
            Point::Infinity => write!(f, "inf"),
        }
    }
}

/// Formats a complex number with 17 significant digits.
pub fn fmt_c(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:.16e} {} {:.16e}i", z.re, sign, z.im.abs())
}

#[derive(Clone, Debug, PartialEq)]
pub enum MapSpec {
    /// `z + 1/z + A`
    PerOne(C64),
    /// `(3z^2 + 1) / (3 + z^2)`
    HTwo,
    /// `z + a z^2 + z^3`
    CubicC(C64),
    /// q-th iterate of `z^2 + c`
    QuadIter { c: C64, q: u32 },
    /// `num / den`, ascending coefficients
    RationalPair { num: Poly, den: Poly },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedPointRecord {
    pub location: Point,
    pub multiplier: C64,
    pub algebraic_multiplicity: usize,
}

const CLUSTER_RADIUS: f64 = 1e-3;

impl MapSpec {
    /// Builds a `RationalPair`, rejecting a vanishing denominator and shared roots.
    pub fn rational_pair(num: Poly, den: Poly) -> Result<MapSpec> {
        if den.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        for r in den.roots()? {
            if num.eval(r).norm() <= 1e-9 * num.abs_eval(r).max(1.0) {
                return Err(Error::InvalidInput(format!(
                    "numerator and denominator share the root {}",
                    fmt_c(r)
                )));
            }
        }
        Ok(MapSpec::RationalPair { num, den })
    }

    /// Numerator and denominator with the QuadIter composite expanded.
    pub fn rational(&self) -> (Poly, Poly) {
        let one = C64::new(1.0, 0.0);
        match self {
            MapSpec::PerOne(a) => (Poly::new(vec![one, *a, one]), Poly::z()),
            MapSpec::HTwo => (Poly::from_real(&[1.0, 0.0, 3.0]), Poly::from_real(&[3.0, 0.0, 1.0])),
            MapSpec::CubicC(a) => (
                Poly::new(vec![C64::new(0.0, 0.0), one, *a, one]),
                Poly::constant(one),
            ),
            MapSpec::QuadIter { c, q } => {
                let mut p = Poly::z();
                for _ in 0..*q {
                    p = p.mul(&p).add(&Poly::constant(*c));
                }
                (p, Poly::constant(one))
            }
            MapSpec::RationalPair { num, den } => (num.clone(), den.clone()),
        }
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self, MapSpec::CubicC(_) | MapSpec::QuadIter { .. })
    }

    /// Topological degree of the map.
    pub fn degree(&self) -> usize {
        match self {
            MapSpec::PerOne(_) | MapSpec::HTwo => 2,
            MapSpec::CubicC(_) => 3,
            MapSpec::QuadIter { q, .. } => 1 << q,
            MapSpec::RationalPair { num, den } => num.degree().max(den.degree()),
        }
    }

    /// Evaluation on finite points. Poles give a non-finite value.
    #[inline]
    pub fn eval_c(&self, z: C64) -> C64 {
        match self {
            MapSpec::PerOne(a) => z + z.inv() + a,
            MapSpec::HTwo => {
                let z2 = z * z;
                (3.0 * z2 + 1.0) / (z2 + 3.0)
            }
            MapSpec::CubicC(a) => z * (1.0 + z * (a + z)),
            MapSpec::QuadIter { c, q } => {
                let mut w = z;
                for _ in 0..*q {
                    w = w * w + c;
                }
                w
            }
            MapSpec::RationalPair { num, den } => num.eval(z) / den.eval(z),
        }
    }

    pub fn eval(&self, z: Point) -> Point {
        match z {
            Point::Finite(z) => {
                if self.is_pole(z) {
                    Point::Infinity
                } else {
                    Point::from_value(self.eval_c(z))
                }
            }
            Point::Infinity => {
                let (n, d) = self.rational();
                match n.degree().cmp(&d.degree()) {
                    std::cmp::Ordering::Greater => Point::Infinity,
                    std::cmp::Ordering::Less => Point::Finite(C64::new(0.0, 0.0)),
                    std::cmp::Ordering::Equal => Point::Finite(n.leading() / d.leading()),
                }
            }
        }
    }

    fn is_pole(&self, z: C64) -> bool {
        match self {
            MapSpec::PerOne(_) => z == C64::new(0.0, 0.0),
            MapSpec::HTwo => z * z + 3.0 == C64::new(0.0, 0.0),
            MapSpec::CubicC(_) | MapSpec::QuadIter { .. } => false,
            MapSpec::RationalPair { den, .. } => den.eval(z) == C64::new(0.0, 0.0),
        }
    }

    /// Value and derivative on finite points.
    #[inline]
    pub fn eval_deriv_c(&self, z: C64) -> (C64, C64) {
        match self {
            MapSpec::PerOne(a) => {
                let r = z.inv();
                (z + r + a, 1.0 - r * r)
            }
            MapSpec::HTwo => {
                let z2 = z * z;
                let d = z2 + 3.0;
                ((3.0 * z2 + 1.0) / d, 16.0 * z / (d * d))
            }
            MapSpec::CubicC(a) => (z * (1.0 + z * (a + z)), 1.0 + z * (2.0 * a + 3.0 * z)),
            MapSpec::QuadIter { c, q } => {
                let mut w = z;
                let mut dw = C64::new(1.0, 0.0);
                for _ in 0..*q {
                    dw = 2.0 * w * dw;
                    w = w * w + c;
                }
                (w, dw)
            }
            MapSpec::RationalPair { num, den } => {
                let (n, dn) = num.eval_deriv(z);
                let (d, dd) = den.eval_deriv(z);
                (n / d, (dn * d - n * dd) / (d * d))
            }
        }
    }

    pub fn deriv(&self, z: C64) -> Point {
        if self.is_pole(z) {
            return Point::Infinity;
        }
        Point::from_value(self.eval_deriv_c(z).1)
    }

    pub fn orbit(&self, z0: Point, n: usize) -> Vec<Point> {
        let mut out = Vec::with_capacity(n + 1);
        let mut z = z0;
        out.push(z);
        for _ in 0..n {
            if z.is_infinite() {
                break;
            }
            z = self.eval(z);
            out.push(z);
        }
        out
    }

    /// All fixed points in the sphere with multipliers and multiplicities.
    pub fn fixed_points(&self) -> Result<Vec<FixedPointRecord>> {
        let (n, d) = self.rational();
        let p = n.sub(&Poly::z().mul(&d)).trim_relative(1e-15);
        let mut out = Vec::new();
        for cl in p.root_clusters(CLUSTER_RADIUS)? {
            let z = cl.root;
            let mult = self.eval_deriv_c(z).1;
            out.push(FixedPointRecord {
                location: Point::Finite(z),
                multiplier: mult,
                algebraic_multiplicity: cl.multiplicity,
            });
        }
        if n.degree() > d.degree() {
            let local = LocalMap::at(self, Point::Infinity)?;
            let s = local.series(self.degree() + 2);
            let mut order = 1;
            if (s[1] - 1.0).norm() < 1e-12 {
                order = (2..s.len()).find(|&k| s[k].norm() > 1e-12).unwrap_or(s.len());
            }
            out.push(FixedPointRecord {
                location: Point::Infinity,
                multiplier: s[1],
                algebraic_multiplicity: order,
            });
        }
        Ok(out)
    }

    /// All critical points in the sphere, without multiplicity.
    pub fn critical_points(&self) -> Result<Vec<Point>> {
        let (n, d) = self.rational();
        let w = n.derivative().mul(&d).sub(&n.mul(&d.derivative())).trim_relative(1e-15);
        let mut out: Vec<Point> = w
            .root_clusters(1e-7)?
            .into_iter()
            .map(|c| Point::Finite(c.root))
            .collect();
        if local_degree_at_infinity(&n, &d) >= 2 {
            out.push(Point::Infinity);
        }
        Ok(out)
    }

    /// Taylor coefficients `[g_0, ..., g_order]` of the map conjugated to the
    /// origin at the fixed point `z0` (chart `w = 1/z` at infinity).
    pub fn series_at(&self, z0: Point, order: usize) -> Result<Vec<C64>> {
        Ok(LocalMap::at(self, z0)?.series(order))
    }
}

fn local_degree_at_infinity(n: &Poly, d: &Poly) -> usize {
    let (dn, dd) = (n.degree(), d.degree());
    if dn != dd {
        return dn.abs_diff(dd);
    }
    let m = dn;
    let s = series::div(n.reversed(m).coeffs(), d.reversed(m).coeffs(), 2 * m + 2);
    let scale = s.iter().map(|c| c.norm()).fold(1.0, f64::max);
    (1..s.len()).find(|&k| s[k].norm() > 1e-12 * scale).unwrap_or(1)
}

/// The map written in a local coordinate `u` centred at a fixed point:
/// `u = z - z0` for finite points, `u = 1/z` at infinity. The local map
/// `g` satisfies `g(0) = 0` exactly.
#[derive(Clone, Debug)]
pub struct LocalMap {
    base: Point,
    kind: LocalKind,
}

#[derive(Clone, Debug)]
enum LocalKind {
    Rational { num: Poly, den: Poly },
    /// Displacement recursion along the orbit `p_0, .., p_{q-1}` of `z^2 + c`.
    QuadOrbit { orbit: Vec<C64> },
}

impl LocalMap {
    pub fn at(map: &MapSpec, z0: Point) -> Result<LocalMap> {
        match z0 {
            Point::Finite(z0) => {
                let fz = map.eval(Point::Finite(z0));
                let residual = match fz {
                    Point::Finite(w) => (w - z0).norm(),
                    Point::Infinity => f64::INFINITY,
                };
                if !(residual <= 1e-8 * (1.0 + z0.norm())) {
                    return Err(Error::NotFixed { residual });
                }
                if let MapSpec::QuadIter { c, q } = map {
                    let mut orbit = Vec::with_capacity(*q as usize);
                    let mut p = z0;
                    for _ in 0..*q {
                        orbit.push(p);
                        p = p * p + c;
                    }
                    return Ok(LocalMap {
                        base: Point::Finite(z0),
                        kind: LocalKind::QuadOrbit { orbit },
                    });
                }
                let (n, d) = map.rational();
                let ns = n.taylor_shift(z0);
                let ds = d.taylor_shift(z0);
                let mut loc = ns.sub(&ds.scale(z0)).coeffs().to_vec();
                loc[0] = C64::new(0.0, 0.0);
                Ok(LocalMap {
                    base: Point::Finite(z0),
                    kind: LocalKind::Rational { num: Poly::new(loc), den: ds },
                })
            }
            Point::Infinity => {
                let (n, d) = map.rational();
                if n.degree() <= d.degree() {
                    let residual = match map.eval(Point::Infinity) {
                        Point::Finite(w) => w.norm(),
                        Point::Infinity => 0.0,
                    };
                    return Err(Error::NotFixed { residual });
                }
                let m = n.degree();
                Ok(LocalMap {
                    base: Point::Infinity,
                    kind: LocalKind::Rational { num: d.reversed(m), den: n.reversed(m) },
                })
            }
        }
    }

    pub fn base(&self) -> Point {
        self.base
    }

    pub fn to_local(&self, z: C64) -> C64 {
        match self.base {
            Point::Finite(z0) => z - z0,
            Point::Infinity => z.inv(),
        }
    }

    pub fn to_global(&self, u: C64) -> C64 {
        match self.base {
            Point::Finite(z0) => z0 + u,
            Point::Infinity => u.inv(),
        }
    }

    /// Derivative of `to_global` at `u`.
    pub fn to_global_deriv(&self, u: C64) -> C64 {
        match self.base {
            Point::Finite(_) => C64::new(1.0, 0.0),
            Point::Infinity => -(u * u).inv(),
        }
    }

    #[inline]
    pub fn eval(&self, u: C64) -> C64 {
        match &self.kind {
            LocalKind::Rational { num, den } => num.eval(u) / den.eval(u),
            LocalKind::QuadOrbit { orbit } => {
                let mut s = u;
                for p in orbit {
                    s = s * (2.0 * p + s);
                }
                s
            }
        }
    }

    #[inline]
    pub fn eval_deriv(&self, u: C64) -> (C64, C64) {
        match &self.kind {
            LocalKind::Rational { num, den } => {
                let (n, dn) = num.eval_deriv(u);
                let (d, dd) = den.eval_deriv(u);
                (n / d, (dn * d - n * dd) / (d * d))
            }
            LocalKind::QuadOrbit { orbit } => {
                let mut s = u;
                let mut ds = C64::new(1.0, 0.0);
                for p in orbit {
                    ds *= 2.0 * (p + s);
                    s = s * (2.0 * p + s);
                }
                (s, ds)
            }
        }
    }

    /// Coefficients `g_0..=g_order`.
    pub fn series(&self, order: usize) -> Vec<C64> {
        let n = order + 1;
        match &self.kind {
            LocalKind::Rational { num, den } => series::div(num.coeffs(), den.coeffs(), n),
            LocalKind::QuadOrbit { orbit } => {
                let mut s = series::truncate(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)], n);
                for p in orbit {
                    let sq = series::mul(&s, &s, n);
                    s = s.iter().zip(&sq).map(|(a, b)| 2.0 * p * a + b).collect();
                }
                s
            }
        }
    }

    /// Solves `g(x) = v` by Newton from `seed`.
    pub fn preimage(&self, v: C64, seed: C64) -> Option<C64> {
        let mut x = seed;
        for _ in 0..60 {
            let (gx, dg) = self.eval_deriv(x);
            let step = (gx - v) / dg;
            if !step.is_finite() {
                return None;
            }
            x -= step;
            if step.norm() <= 1e-15 * x.norm().max(1e-300) {
                return Some(x);
            }
        }
        let (gx, _) = self.eval_deriv(x);
        ((gx - v).norm() <= 1e-13 * v.norm().max(1e-300)).then_some(x)
    }
}
