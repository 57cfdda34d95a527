//! Green potential, external rays and equipotentials of monic polynomials.

use crate::dynamics::{LocalMap, MapSpec, Point};
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::f64::consts::TAU;

const ESCAPE_RADIUS: f64 = 1e8;
const POTENTIAL_CAP: usize = 10_000;
/// Minimal `D^n s` at which the Böttcher inverse is replaced by `w - a_{D-1}/D`.
const BOTTCHER_LEVEL: f64 = 12.0;
/// Samples per factor-`D` level of potential.
pub const SAMPLES_PER_LEVEL: usize = 16;
/// Below this potential, rays landing at a parabolic fixed point are pulled back by the local inverse.
pub const PULLBACK_POTENTIAL: f64 = 1e-4;

/// External angle in turns, kept as an exact fraction so multiplication by the
/// degree does not lose bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Angle {
    num: u128,
    den: u128,
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Angle {
    pub fn new(num: i128, den: u128) -> Angle {
        assert!(den > 0, "zero denominator");
        let n = num.rem_euclid(den as i128) as u128;
        let g = gcd(n, den).max(1);
        Angle { num: n / g, den: den / g }
    }

    /// Closest fraction with denominator at most 10^9; exact for small rationals.
    pub fn from_turns(t: f64) -> Angle {
        let t = t.rem_euclid(1.0);
        let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
        let mut x = t;
        for _ in 0..64 {
            let a = x.floor();
            let (p2, q2) = (a as i128 * p1 + p0, a as i128 * q1 + q0);
            if q2 > 1_000_000_000 {
                break;
            }
            (p0, q0, p1, q1) = (p1, q1, p2, q2);
            if ((p1 as f64 / q1 as f64) - t).abs() < 1e-15 || x - a < 1e-12 {
                break;
            }
            x = 1.0 / (x - a);
        }
        Angle::new(p1, q1 as u128)
    }

    pub fn turns(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn numer(&self) -> u128 {
        self.num
    }

    pub fn denom(&self) -> u128 {
        self.den
    }

    /// `k θ mod 1`.
    pub fn times(&self, k: u64) -> Angle {
        Angle::new(((self.num * k as u128) % self.den) as i128, self.den)
    }

    /// `k^n θ mod 1`, without forming `k^n`.
    pub fn times_pow(&self, k: u64, n: u32) -> Angle {
        let m = self.den;
        let mut acc: u128 = 1 % m;
        let mut base = k as u128 % m;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            e >>= 1;
        }
        Angle::new((self.num * acc % m) as i128, m)
    }

    pub fn half(&self) -> Angle {
        Angle::new(self.num as i128, self.den * 2)
    }

    /// Interpolates `self + s (other - self)` measured counterclockwise, `s` in [0,1] as `k/m`.
    pub fn lerp_ccw(&self, other: &Angle, k: u64, m: u64) -> Angle {
        let den = self.den * other.den * m as u128;
        let a = self.num * other.den * m as u128;
        let b = other.num * self.den * m as u128;
        let span = if b >= a { b - a } else { b + den - a };
        Angle::new((a + span / m as u128 * k as u128) as i128, den)
    }
}

impl std::fmt::Display for Angle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn require_polynomial(map: &MapSpec) -> Result<()> {
    if map.is_polynomial() {
        Ok(())
    } else {
        Err(Error::InvalidInput("external rays need a polynomial map".into()))
    }
}

/// Green potential and whether the orbit escaped within the cap (0 otherwise).
pub fn green_potential(map: &MapSpec, z: C64) -> Result<(f64, bool)> {
    require_polynomial(map)?;
    let d = map.degree() as f64;
    let mut w = z;
    let mut scale = 1.0;
    for _ in 0..POTENTIAL_CAP {
        let r = w.norm();
        if r > ESCAPE_RADIUS {
            return Ok((scale * r.ln(), true));
        }
        w = map.eval_c(w);
        scale /= d;
    }
    Ok((0.0, false))
}

/// Böttcher-coordinate solver for one monic polynomial.
struct Bottcher<'a> {
    map: &'a MapSpec,
    d: u64,
    /// `a_{D-1} / D`
    shift: C64,
}

impl<'a> Bottcher<'a> {
    fn new(map: &'a MapSpec) -> Result<Self> {
        require_polynomial(map)?;
        let (num, _) = map.rational();
        let d = num.degree();
        Ok(Bottcher { map, d: d as u64, shift: num.coeff(d - 1) / (d as f64 * num.leading()) })
    }

    fn level(&self, s: f64) -> u32 {
        let mut n = 0;
        let mut v = s;
        while v < BOTTCHER_LEVEL {
            v *= self.d as f64;
            n += 1;
        }
        n
    }

    fn target(&self, s: f64, angle: &Angle, n: u32) -> C64 {
        let dn = (self.d as f64).powi(n as i32);
        let th = angle.times_pow(self.d, n).turns();
        C64::from_polar((dn * s).exp(), TAU * th) - self.shift
    }

    fn iterate(&self, z: C64, n: u32) -> (C64, C64) {
        let mut w = z;
        let mut dw = C64::new(1.0, 0.0);
        for _ in 0..n {
            let (v, dv) = self.map.eval_deriv_c(w);
            dw *= dv;
            w = v;
        }
        (w, dw)
    }

    /// Newton for `f^n(z) = target`; `None` on loss of convergence.
    fn solve(&self, s: f64, angle: &Angle, seed: C64) -> Option<C64> {
        let n = self.level(s);
        let t = self.target(s, angle, n);
        let mut z = seed;
        for _ in 0..80 {
            let (w, dw) = self.iterate(z, n);
            let step = (w - t) / dw;
            if !step.is_finite() {
                return None;
            }
            z -= step;
            if step.norm() <= 1e-15 * (1.0 + z.norm()) {
                break;
            }
        }
        let (w, _) = self.iterate(z, n);
        ((w - t).norm() <= 1e-9 * t.norm()).then_some(z)
    }

    /// Point of large potential computed directly from the Böttcher asymptotics.
    fn start(&self, angle: &Angle) -> (f64, C64) {
        let s = BOTTCHER_LEVEL;
        (s, self.target(s, angle, 0))
    }

    /// Descends along the ray from the start potential to `s`, returning the point.
    fn descend_to(&self, angle: &Angle, s: f64) -> Option<C64> {
        let (mut cur, mut z) = self.start(angle);
        let ratio = (self.d as f64).powf(-1.0 / SAMPLES_PER_LEVEL as f64);
        while cur * ratio > s {
            cur *= ratio;
            z = self.solve(cur, angle, z)?;
        }
        self.solve(s, angle, z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RaySample {
    pub potential: f64,
    pub z: C64,
}

#[derive(Clone, Debug)]
pub struct RayTrace {
    pub angle: Angle,
    /// Samples in decreasing potential; geometric with ratio `D^(-1/16)`.
    pub samples: Vec<RaySample>,
    /// Index and potential where Newton lost lock, when the trace is partial.
    pub failure: Option<(usize, f64)>,
}

impl RayTrace {
    pub fn complete(&self) -> Result<&Self> {
        match self.failure {
            None => Ok(self),
            Some((index, potential)) => Err(Error::RayLostLock { index, potential }),
        }
    }

    pub fn last(&self) -> C64 {
        self.samples.last().map(|s| s.z).unwrap_or_default()
    }
}

/// Traces the external ray of `angle` from potential `pot_hi` down to `pot_lo`.
pub fn trace_external_ray(map: &MapSpec, angle: Angle, pot_hi: f64, pot_lo: f64) -> Result<RayTrace> {
    if !(pot_lo > 0.0 && pot_lo < pot_hi) {
        return Err(Error::InvalidInput("need 0 < pot_lo < pot_hi".into()));
    }
    let b = Bottcher::new(map)?;
    let d = b.d as f64;
    let ratio = d.powf(-1.0 / SAMPLES_PER_LEVEL as f64);
    let mut samples = Vec::new();
    let mut failure = None;
    let mut z = match b.descend_to(&angle, pot_hi) {
        Some(z) => z,
        None => return Ok(RayTrace { angle, samples, failure: Some((0, pot_hi)) }),
    };
    samples.push(RaySample { potential: pot_hi, z });
    let parabolic = if pot_lo < PULLBACK_POTENTIAL && angle.times(b.d) == angle {
        parabolic_landing(map, &b, &angle)
    } else {
        None
    };
    let mut k = 1;
    loop {
        let s = pot_hi * ratio.powi(k);
        if s < pot_lo * (1.0 - 1e-12) {
            break;
        }
        let next = match &parabolic {
            Some(local) if s < PULLBACK_POTENTIAL && samples.len() > SAMPLES_PER_LEVEL => {
                let up = samples[samples.len() - SAMPLES_PER_LEVEL].z;
                let v = local.to_local(up);
                let prev = local.to_local(samples[samples.len() - 1].z);
                local.preimage(v, prev).map(|u| local.to_global(u))
            }
            _ => b.solve(s, &angle, z),
        };
        match next {
            Some(w) => {
                z = w;
                samples.push(RaySample { potential: s, z });
            }
            None => {
                failure = Some((k as usize, s));
                break;
            }
        }
        k += 1;
    }
    Ok(RayTrace { angle, samples, failure })
}

/// Local chart at the landing point when the (fixed) ray lands at a multiplier-1 fixed point.
fn parabolic_landing(map: &MapSpec, b: &Bottcher<'_>, angle: &Angle) -> Option<LocalMap> {
    let z = b.descend_to(angle, PULLBACK_POTENTIAL)?;
    let p = landing_point(map, z, 1).ok()?;
    let (_, mu) = map.eval_deriv_c(p);
    if (mu - 1.0).norm() > 1e-6 {
        return None;
    }
    let exact = map
        .fixed_points()
        .ok()?
        .into_iter()
        .filter_map(|r| r.location.finite())
        .min_by(|a, b| (a - p).norm().total_cmp(&(b - p).norm()))?;
    LocalMap::at(map, Point::Finite(exact)).ok()
}

/// Periodic point of the given period reached by Newton from a ray point near its landing point.
pub fn landing_point(map: &MapSpec, seed: C64, period: u32) -> Result<C64> {
    let mut z = seed;
    for _ in 0..200 {
        let mut w = z;
        let mut dw = C64::new(1.0, 0.0);
        for _ in 0..period {
            let (v, dv) = map.eval_deriv_c(w);
            dw *= dv;
            w = v;
        }
        let den = dw - 1.0;
        // near-parabolic points converge linearly; damp nothing, stop on tiny residual
        let step = (w - z) / den;
        if !step.is_finite() {
            return Err(Error::NewtonDivergence("landing point".into()));
        }
        z -= step;
        if step.norm() < 1e-15 * (1.0 + z.norm()) {
            return Ok(z);
        }
    }
    let mut w = z;
    for _ in 0..period {
        w = map.eval_c(w);
    }
    if (w - z).norm() < 1e-9 {
        Ok(z)
    } else {
        Err(Error::NewtonDivergence(format!("landing point residual {:e}", (w - z).norm())))
    }
}

/// Equipotential arc at `potential`, counterclockwise from angle `from` to `to`, `m + 1` samples.
pub fn equipotential_arc(map: &MapSpec, potential: f64, from: Angle, to: Angle, m: usize) -> Result<Vec<C64>> {
    let b = Bottcher::new(map)?;
    let mut z = b
        .descend_to(&from, potential)
        .ok_or(Error::RayLostLock { index: 0, potential })?;
    let mut out = vec![z];
    // substeps keep Newton continuation well inside its basin
    let sub = 4;
    for k in 1..=(m * sub) {
        let a = from.lerp_ccw(&to, k as u64, (m * sub) as u64);
        z = b.solve(potential, &a, z).ok_or(Error::RayLostLock { index: k, potential })?;
        if k % sub == 0 {
            out.push(z);
        }
    }
    Ok(out)
}

/// Point of given potential and external angle.
pub fn ray_point(map: &MapSpec, angle: Angle, potential: f64) -> Result<C64> {
    Bottcher::new(map)?
        .descend_to(&angle, potential)
        .ok_or(Error::RayLostLock { index: 0, potential })
}
