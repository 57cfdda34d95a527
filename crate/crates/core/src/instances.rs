//! Concrete parabolic-like restrictions of the catalog maps.

use crate::arc::{arc_from_rays, build_dividing_arc, preimage_near, DividingArc, DEFAULT_LEVELS};
use crate::dynamics::{MapSpec, Point};
use crate::error::{Error, Result};
use crate::fatou::{FatouChart, PetalKind};
use crate::germ::germ_analyze;
use crate::green::{equipotential_arc, landing_point, trace_external_ray, Angle};
use crate::plm::c_pq;
use crate::poly::Poly;
use crate::region::Region;
use num_complex::Complex64 as C64;
use std::sync::Arc;

/// Inputs to `assemble`.
#[derive(Clone, Debug)]
pub struct Quadruple {
    pub map: MapSpec,
    pub u_prime: Region,
    pub u: Region,
    pub gamma: DividingArc,
}

/// Imaginary part of `m+` in the Example-1 preset.
pub const EXAMPLE1_IM_M: f64 = -1.0;
const CIRCLE_SAMPLES: usize = 4096;

/// Repelling charts of `h₂` at 1, normalized so the unit circle maps into the
/// real axis; returns `(upper, lower)`.
pub fn h2_repelling_charts() -> Result<(FatouChart, FatouChart)> {
    let map = MapSpec::HTwo;
    let g = Arc::new(germ_analyze(&map, Point::Finite(C64::new(1.0, 0.0)))?);
    let up = g.repelling_dirs.iter().position(|&d| d > 0.0).unwrap_or(0);
    let down = 1 - up;
    let plus = FatouChart::new(&map, g.clone(), PetalKind::Repelling, up)?
        .calibrated_real_at(C64::from_polar(1.0, 0.2))?;
    let minus = FatouChart::new(&map, g, PetalKind::Repelling, down)?
        .calibrated_real_at(C64::from_polar(1.0, -0.2))?;
    Ok((plus, minus))
}

/// `m+ = s + i Im` with `|ψ+(m+ - 1)| = radius`, found by bisection in `s`.
pub fn example1_m_plus(chart: &FatouChart, radius: f64, im: f64) -> Result<C64> {
    let modulus = |s: f64| -> Result<f64> { Ok(chart.inverse(C64::new(s - 1.0, im))?.norm() - radius) };
    let (mut lo, mut hi) = (-40.0, 0.0);
    while modulus(hi)? < 0.0 {
        hi += 10.0;
        if hi > 200.0 {
            return Err(Error::Structural("no circle crossing along the petal".into()));
        }
    }
    if modulus(lo)? > 0.0 {
        return Err(Error::Structural("petal line starts outside the circle".into()));
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if modulus(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    Ok(C64::new(0.5 * (lo + hi), im))
}

/// `h₂` with `U' = {|z| < 1 + eps}`, `U = h₂(U')` and Fatou-coordinate arcs.
pub fn example1(eps: f64) -> Result<Quadruple> {
    let map = MapSpec::HTwo;
    let r = 1.0 + eps;
    let u_prime = Region::circle(C64::new(0.0, 0.0), r, CIRCLE_SAMPLES);
    // h₂ is even, so half the circle covers the image boundary once
    let half: Vec<C64> = (0..CIRCLE_SAMPLES)
        .map(|k| map.eval_c(C64::from_polar(r, std::f64::consts::PI * k as f64 / CIRCLE_SAMPLES as f64)))
        .collect();
    let u = Region::from_boundary(half)?;
    let (plus, minus) = h2_repelling_charts()?;
    let m_plus = example1_m_plus(&plus, r, EXAMPLE1_IM_M)?;
    let m_minus = m_plus.conj();
    let gamma = build_dividing_arc(&plus.germ, &plus, &minus, m_plus, m_minus, 2, DEFAULT_LEVELS)?;
    Ok(Quadruple { map, u_prime, u, gamma })
}

/// The Example-1 data with the arc rotated by a quarter turn about the parabolic point.
pub fn example1_rotated_control(eps: f64) -> Result<Quadruple> {
    let mut q = example1(eps)?;
    let c = q.gamma.center();
    let rot = C64::new(0.0, 1.0);
    for z in q.gamma.points.iter_mut() {
        *z = c + (*z - c) * rot;
    }
    Ok(q)
}

/// Component of `f^{-1}(region)` whose boundary covers `∂region` `turns` times
/// and which contains `inside`.
pub fn pullback_region(map: &MapSpec, region: &Region, turns: usize, inside: C64) -> Result<Region> {
    let target = region.densified(2e-3 * region.diameter());
    let ws = target.boundary();
    let (num, den) = map.rational();
    let starts = num.sub(&den.scale(ws[0])).roots()?;
    let diam = region.diameter();
    for &s in &starts {
        let mut z = s;
        let mut pts = vec![z];
        let mut ok = true;
        let total = ws.len() * turns;
        'walk: for k in 1..=total {
            let a = ws[(k - 1) % ws.len()];
            let b = ws[k % ws.len()];
            // subdivide so each Newton continuation step is short
            let (_, dz) = map.eval_deriv_c(z);
            let pred = ((b - a) / dz).norm();
            let sub = ((pred / (1e-3 * diam)).ceil() as usize).clamp(1, 1000);
            for j in 1..=sub {
                let w = a + (b - a) * (j as f64 / sub as f64);
                match preimage_near(map, w, z) {
                    Some(v) => z = v,
                    None => {
                        ok = false;
                        break 'walk;
                    }
                }
                if j == sub && k < total {
                    pts.push(z);
                }
            }
        }
        if !ok || (z - s).norm() > 1e-8 * (1.0 + s.norm()) {
            continue;
        }
        let Ok(reg) = Region::from_boundary(pts) else { continue };
        if reg.winding_number(inside).abs() == 1 && reg.is_simple() {
            return Ok(reg);
        }
    }
    Err(Error::Structural(format!("no {turns}-turn preimage component contains {inside}")))
}

/// Ray samples from potential `p1` down to its landing point, which is appended.
fn ray_to_landing(map: &MapSpec, angle: Angle, p1: f64, period: u32) -> Result<Vec<C64>> {
    let tr = trace_external_ray(map, angle, p1, 1e-7)?;
    tr.complete()?;
    let land = landing_point(map, tr.last(), period)?;
    let mut pts: Vec<C64> = tr.samples.iter().map(|s| s.z).collect();
    pts.push(land);
    Ok(pts)
}

fn chord(a: C64, b: C64, n: usize) -> Vec<C64> {
    (1..n).map(|k| a + (b - a) * (k as f64 / n as f64)).collect()
}

/// `C_i(z) = z + i z² + z³`: `U` bounded by the level-1 equipotential around the
/// superattracting point, the rays 1/26 and 6/13 to their landing points, and
/// the chord between those points; `U'` by pullback; arcs are rays 0 and 1/2.
pub fn example2() -> Result<Quadruple> {
    let map = MapSpec::CubicC(C64::new(0.0, 1.0));
    let left = Angle::new(6, 13);
    let right = Angle::new(1, 26);
    let mut b = equipotential_arc(&map, 1.0, left, right, 2048)?;
    let down = ray_to_landing(&map, right, 1.0, 3)?;
    let p2 = *down.last().unwrap();
    b.extend_from_slice(&down[1..]);
    let up = ray_to_landing(&map, left, 1.0, 3)?;
    let p1 = *up.last().unwrap();
    b.extend(chord(p2, p1, 200));
    b.extend(up.iter().rev().take(up.len() - 1));
    let u = Region::from_boundary(b)?;
    let germ = germ_analyze(&map, Point::Finite(C64::new(0.0, 0.0)))?;
    let gamma = arc_from_rays(&map, &germ, Angle::new(0, 1), Angle::new(1, 2), 1.0, 2, DEFAULT_LEVELS)?;
    let u_prime = pullback_region(&map, &u, 2, C64::new(0.0, 0.0))?;
    Ok(Quadruple { map, u_prime, u, gamma })
}

/// Fat-rabbit parameter `c_{1/3}` and its parabolic fixed point `λ/2`.
pub fn fat_rabbit() -> (C64, C64) {
    let c = c_pq(1, 3);
    (c, C64::from_polar(0.5, std::f64::consts::TAU / 3.0))
}

/// Third iterate of `z² + c_{1/3}`: `U` bounded by equipotential arcs at level 1,
/// rays landing on the boundaries of the two cut Fatou components, and the
/// chord cut with its pullback; arcs are rays 1/7 and 2/7.
pub fn example3() -> Result<Quadruple> {
    let (c, a) = fat_rabbit();
    let map = MapSpec::QuadIter { c, q: 3 };
    let quad = MapSpec::QuadIter { c, q: 1 };
    let th_r = Angle::new(83, 585);
    let th_l = Angle::new(2344, 4095);
    let th_l2 = th_l.half();
    let th_r2 = Angle::new(83 + 585, 1170);
    let mut b = equipotential_arc(&map, 1.0, th_r, th_l2, 1024)?;
    let ql_ray = ray_to_landing(&map, th_l2, 1.0, 4)?;
    let q_l = *ql_ray.last().unwrap();
    b.extend_from_slice(&ql_ray[1..]);
    let pl_ray = ray_to_landing(&map, th_l, 1.0, 4)?;
    let pr_ray = ray_to_landing(&map, th_r, 1.0, 4)?;
    let (p_l, p_r) = (*pl_ray.last().unwrap(), *pr_ray.last().unwrap());
    let gamma0 = chord(p_l, p_r, 200);
    // Γ2 = preimage of the chord inside the component adjacent to Q_L
    let mut gamma2 = Vec::with_capacity(gamma0.len());
    let mut z = q_l;
    for &w in &gamma0 {
        z = preimage_near(&quad, w, z).ok_or(Error::InverseBranch(0))?;
        gamma2.push(z);
    }
    let qr_ray = ray_to_landing(&map, th_r2, 1.0, 4)?;
    let q_r = *qr_ray.last().unwrap();
    let close = (preimage_near(&quad, p_r, z).unwrap_or(z) - q_r).norm();
    if close > 1e-6 {
        return Err(Error::Structural(format!("chord pullback misses the landing point by {close:e}")));
    }
    b.extend(gamma2);
    b.extend(qr_ray.iter().rev().take(qr_ray.len() - 1));
    let e2 = equipotential_arc(&map, 1.0, th_r2, th_l, 256)?;
    b.extend_from_slice(&e2);
    b.extend_from_slice(&pl_ray[1..]);
    b.extend(gamma0);
    b.extend(pr_ray.iter().rev().take(pr_ray.len() - 1));
    let u = Region::from_boundary(b)?;
    let germ = germ_analyze(&map, Point::Finite(a))?;
    let gamma = arc_from_rays(&map, &germ, Angle::new(1, 7), Angle::new(2, 7), 1.0, 2, DEFAULT_LEVELS)?;
    let u_prime = pullback_region(&map, &u, 2, a)?;
    Ok(Quadruple { map, u_prime, u, gamma })
}

/// `1/(f(b + 1/ζ) - b)`: the map in the coordinate `ζ = 1/(z - b)`, which sends `∞` to 0.
pub fn conjugate_by_inversion(map: &MapSpec, b: C64) -> Result<MapSpec> {
    let (num, den) = map.rational();
    let d = num.degree().max(den.degree());
    let n = num.taylor_shift(b).reversed(d);
    let m = den.taylor_shift(b).reversed(d);
    MapSpec::rational_pair(m.clone(), n.sub(&m.scale(b)))
}

/// A restriction of `P_A` around its parabolic point at infinity, written in
/// the coordinate `ζ = 1/(z - b)`.
#[derive(Clone, Debug)]
pub struct PerOneRestriction {
    pub a: C64,
    pub b: C64,
    pub quad: Quadruple,
}

impl PerOneRestriction {
    pub fn to_original(&self, zeta: C64) -> C64 {
        self.b + 1.0 / zeta
    }

    pub fn to_zeta(&self, z: C64) -> C64 {
        1.0 / (z - self.b)
    }
}

impl Quadruple {
    /// The same restriction conjugated by `z ↦ -z`.
    pub fn negated(&self) -> Result<Quadruple> {
        let (num, den) = self.map.rational();
        let flip = |p: &Poly| {
            Poly::new(p.coeffs().iter().enumerate().map(|(k, &c)| if k % 2 == 1 { -c } else { c }).collect())
        };
        let map = MapSpec::rational_pair(flip(&num).scale(C64::new(-1.0, 0.0)), flip(&den))?;
        let neg = |r: &Region| Region::from_boundary(r.boundary().iter().map(|z| -z).collect());
        let mut gamma = self.gamma.clone();
        for z in gamma.points.iter_mut() {
            *z = -*z;
        }
        let germ = germ_analyze(&map, Point::Finite(gamma.center()))?;
        let k0 = gamma.params.iter().position(|&t| t == 0.0).unwrap_or(0);
        let petal = |k: usize| germ.nearest_repelling(germ.local.to_local(gamma.points[k]));
        gamma.petal_minus = petal(k0.saturating_sub(1));
        gamma.petal_plus = petal((k0 + 1).min(gamma.points.len() - 1));
        Ok(Quadruple { map, u_prime: neg(&self.u_prime)?, u: neg(&self.u)?, gamma })
    }
}

/// Disk in the attracting Fatou plane at infinity used by `perone_restriction`.
#[derive(Clone, Copy, Debug)]
pub struct FatouDisk {
    pub center: f64,
    pub radius: f64,
    /// Arcs follow the lines `Im W = ±height` left of the disk.
    pub height: f64,
}

impl Default for FatouDisk {
    fn default() -> Self {
        FatouDisk { center: 3.0, radius: 2.5, height: 2.0 }
    }
}

/// `P_A` restricted to the complement of the closed blob `ψ(D)`, where `ψ` is the
/// inverse attracting Fatou chart at infinity normalized by `φ(2 + A) = 1` and `D`
/// is a disk containing 1. `U'` is the two-turn preimage component containing the
/// parabolic point. The arcs are `ψ` of the lines `Im W = ±h` left of `D`.
pub fn perone_restriction(a: C64, disk: FatouDisk) -> Result<PerOneRestriction> {
    let FatouDisk { center, radius, height } = disk;
    if center - radius <= 0.0 || center - radius >= 1.0 || height.abs() >= radius {
        return Err(Error::InvalidInput("Fatou disk must contain 1 and avoid 0".into()));
    }
    let pa = MapSpec::PerOne(a);
    let g = Arc::new(germ_analyze(&pa, Point::Infinity)?);
    let chart = FatouChart::new(&pa, g, PetalKind::Attracting, 0)?.with_anchor(a + 2.0, C64::new(1.0, 0.0))?;
    let b = chart.inverse(C64::new(center, 0.0))?;
    let x_left = center - (radius * radius - height * height).sqrt();
    // circle samples, including the two points where the arcs end
    let n = CIRCLE_SAMPLES / 4;
    let mut thetas: Vec<f64> = (0..n).map(|k| std::f64::consts::TAU * k as f64 / n as f64).collect();
    for im in [height, -height] {
        thetas.push(C64::new(x_left - center, im).arg().rem_euclid(std::f64::consts::TAU));
    }
    thetas.sort_by(f64::total_cmp);
    thetas.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let blob: Vec<C64> = thetas
        .iter()
        .map(|&th| chart.inverse(C64::new(center, 0.0) + C64::from_polar(radius, th)))
        .collect::<Result<_>>()?;
    let u = Region::from_boundary(blob.iter().map(|&z| 1.0 / (z - b)).collect())?;
    let map = conjugate_by_inversion(&pa, b)?;
    let grid = crate::arc::geometric_grid(2, DEFAULT_LEVELS);
    let half = |im: f64| -> Result<Vec<(f64, C64)>> {
        // continue ψ leftward along the line: ψ(W) is the preimage of ψ(W + 1)
        // nearest to the previous sample
        let per_level = crate::green::SAMPLES_PER_LEVEL;
        let right: Vec<C64> = (0..per_level)
            .map(|k| chart.inverse(C64::new(x_left + 1.0 - k as f64 / per_level as f64, im)))
            .collect::<Result<_>>()?;
        let mut zs = vec![chart.inverse(C64::new(x_left, im))?];
        for k in 1..grid.len() {
            let v = if k < per_level { right[k] } else { zs[k - per_level] };
            let prev = zs[k - 1];
            let z = preimages(&pa, v)?
                .into_iter()
                .min_by(|p, q| (p - prev).norm().total_cmp(&(q - prev).norm()))
                .ok_or(Error::InverseBranch(k))?;
            zs.push(z);
        }
        Ok(grid.iter().zip(zs).map(|(&t, z)| (t, 1.0 / (z - b))).collect())
    };
    let zero = C64::new(0.0, 0.0);
    let gamma = DividingArc::from_halves(half(height)?, half(-height)?, zero, 2, 0, 0)?;
    let u_prime = pullback_region(&map, &u, 2, zero)?;
    Ok(PerOneRestriction { a, b, quad: Quadruple { map, u_prime, u, gamma } })
}

fn preimages(map: &MapSpec, v: C64) -> Result<Vec<C64>> {
    let (num, den) = map.rational();
    let roots = num.sub(&den.scale(v)).roots()?;
    Ok(roots.into_iter().map(|r| crate::poly::polish(&num.sub(&den.scale(v)), r)).collect())
}
