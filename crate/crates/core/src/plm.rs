//! Parabolic-like quadruples `(f, U', U, γ)`: assembly, validation and
//! filled-Julia membership.

use crate::arc::{check_arc_invariance, DividingArc};
use crate::dynamics::{MapSpec, Point};
use crate::error::{Error, Result};
use crate::germ::{germ_analyze, wrap_angle, ParabolicGerm};
use crate::region::{map_degree_on, Membership, Region};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

const ARC_INVARIANCE_TOL: f64 = 1e-5;
const MULTIPLIER_TOL: f64 = 1e-8;
const DEGREE_SAMPLES: usize = 20;
const INJECTIVITY_SAMPLES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Clause {
    DomainShape,
    ProperDegree,
    ParabolicMultiplier,
    ArcInRepellingPetals,
    ArcInvariance,
    ArcEndpoints,
    OmegaCompactness,
    DeltaIsomorphism,
    AttractingPetalInDelta,
}

impl Clause {
    pub const ALL: [Clause; 9] = [
        Clause::DomainShape,
        Clause::ProperDegree,
        Clause::ParabolicMultiplier,
        Clause::ArcInRepellingPetals,
        Clause::ArcInvariance,
        Clause::ArcEndpoints,
        Clause::OmegaCompactness,
        Clause::DeltaIsomorphism,
        Clause::AttractingPetalInDelta,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Clause::DomainShape => "domain_shape",
            Clause::ProperDegree => "properness_degree",
            Clause::ParabolicMultiplier => "parabolic_multiplier",
            Clause::ArcInRepellingPetals => "arc_in_repelling_petals",
            Clause::ArcInvariance => "arc_invariance",
            Clause::ArcEndpoints => "arc_endpoints",
            Clause::OmegaCompactness => "omega_compactness",
            Clause::DeltaIsomorphism => "delta_isomorphism",
            Clause::AttractingPetalInDelta => "attracting_petal_in_delta",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ClauseResult {
    Pass,
    Fail(String),
    Unverifiable(String),
}

impl ClauseResult {
    pub fn is_fail(&self) -> bool {
        matches!(self, ClauseResult::Fail(_))
    }

    fn check(ok: bool, detail: String) -> ClauseResult {
        if ok {
            ClauseResult::Pass
        } else {
            ClauseResult::Fail(detail)
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub clauses: Vec<(Clause, ClauseResult)>,
    /// Free-form measurements (degree, residuals, distances).
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn get(&self, c: Clause) -> Option<&ClauseResult> {
        self.clauses.iter().find(|(k, _)| *k == c).map(|(_, r)| r)
    }

    pub fn failing(&self) -> Vec<Clause> {
        self.clauses.iter().filter(|(_, r)| r.is_fail()).map(|(c, _)| *c).collect()
    }

    pub fn all_pass(&self) -> bool {
        self.failing().is_empty()
    }

    fn set(&mut self, c: Clause, r: ClauseResult) {
        self.clauses.push((c, r));
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = Clause::ALL.iter().map(|c| c.name().len()).max().unwrap_or(0);
        for (c, r) in &self.clauses {
            let (tag, detail) = match r {
                ClauseResult::Pass => ("pass", ""),
                ClauseResult::Fail(d) => ("FAIL", d.as_str()),
                ClauseResult::Unverifiable(d) => ("unverifiable", d.as_str()),
            };
            writeln!(f, "{:<width$}  {:<12}  {}", c.name(), tag, detail, width = width)?;
        }
        for n in &self.notes {
            writeln!(f, "# {n}")?;
        }
        Ok(())
    }
}

/// Sub-regions cut out by the dividing arc.
#[derive(Clone, Debug)]
pub struct Pieces {
    pub omega: Region,
    pub omega_prime: Region,
    pub delta: Region,
    pub delta_prime: Region,
}

#[derive(Clone, Debug)]
pub struct PLMap {
    pub map: MapSpec,
    pub u_prime: Region,
    pub u: Region,
    pub gamma: DividingArc,
    pub degree_d: usize,
    pub parabolic_point: C64,
    pub pieces: Pieces,
    pub germ: Arc<ParabolicGerm>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KMembership {
    Inside,
    Escaped(usize),
    Undecided,
}

/// Splits `U'` along `γ` restricted to `|t| <= 1/d` and `U` along `γ`; `Ω'` is
/// the side holding the critical points of `f` in `U'`.
fn split_pieces(map: &MapSpec, u_prime: &Region, u: &Region, gamma: &DividingArc) -> Result<(Pieces, usize)> {
    let d = gamma.base_degree_d as f64;
    let inner = gamma.restricted(0.0, 1.0 / d);
    let tol_p = 1e-3 * u_prime.diameter();
    let tol = 1e-3 * u.diameter();
    let (lp, rp) = u_prime.split(inner.polyline(), tol_p)?;
    let (l, r) = u.split(gamma.polyline(), tol)?;
    let crit: Vec<C64> = map
        .critical_points()?
        .into_iter()
        .filter_map(|p| p.finite())
        .filter(|&c| u_prime.winding_number(c) != 0)
        .collect();
    let nl = crit.iter().filter(|&&c| lp.winding_number(c) != 0).count();
    let nr = crit.iter().filter(|&&c| rp.winding_number(c) != 0).count();
    let pieces = if nl >= nr {
        Pieces { omega: l, omega_prime: lp, delta: r, delta_prime: rp }
    } else {
        Pieces { omega: r, omega_prime: rp, delta: l, delta_prime: lp }
    };
    Ok((pieces, crit.len()))
}

fn boundary_distance_to(region: &Region, pts: &[C64]) -> f64 {
    pts.iter().map(|&z| region.distance_to_boundary(z)).fold(f64::INFINITY, f64::min)
}

/// Assembles and validates `(f, U', U, γ)`. The map is returned only when no clause fails.
pub fn assemble(
    map: &MapSpec,
    u_prime: Region,
    u: Region,
    gamma: DividingArc,
) -> Result<(Option<PLMap>, ValidationReport)> {
    if gamma.points.len() < 3 {
        return Err(Error::Structural("dividing arc has too few samples".into()));
    }
    let z0 = gamma.center();
    let mut rep = ValidationReport::default();
    let diam = u.diameter();

    // domain shape
    let simple = u.is_simple() && u_prime.is_simple();
    let not_contained = u_prime.boundary().iter().any(|&z| u.classify(z, 1e-9 * diam) == Membership::Outside);
    rep.set(
        Clause::DomainShape,
        ClauseResult::check(
            simple && not_contained,
            format!("simple boundaries: {simple}, U' not inside U: {not_contained}"),
        ),
    );

    // parabolic multiplier
    let (fz, mu) = map.eval_deriv_c(z0);
    let mult_ok = (mu - 1.0).norm() <= MULTIPLIER_TOL && (fz - z0).norm() <= 1e-10 * (1.0 + z0.norm());
    rep.set(
        Clause::ParabolicMultiplier,
        ClauseResult::check(mult_ok, format!("|f'(z0) - 1| = {:e}", (mu - 1.0).norm())),
    );
    let germ = Arc::new(germ_analyze(map, Point::Finite(z0))?);

    // properness and degree
    let image_gap = u_prime
        .boundary()
        .iter()
        .map(|&z| u.distance_to_boundary(map.eval_c(z)))
        .fold(0.0, f64::max);
    let ws = u.interior_samples(DEGREE_SAMPLES, 0.02 * diam, 11);
    let mut degrees = Vec::new();
    for &w in &ws {
        match map_degree_on(map, &u_prime, w) {
            Ok(k) => degrees.push(k),
            Err(e) => rep.notes.push(format!("degree sample {w} rejected: {e}")),
        }
    }
    let degree = degrees.first().copied().unwrap_or(0);
    let constant = !degrees.is_empty() && degrees.iter().all(|&k| k == degree);
    rep.notes.push(format!("degree {degree} over {} samples; max dist(f(dU'), dU) = {image_gap:e}", degrees.len()));
    rep.set(
        Clause::ProperDegree,
        ClauseResult::check(
            constant && degree >= 2 && degree as usize == gamma.base_degree_d && image_gap <= 1e-6 * diam,
            format!("degrees {degrees:?}, boundary image gap {image_gap:e}, arc degree {}", gamma.base_degree_d),
        ),
    );

    // arc sits in repelling petals near z0
    let petal_check = arc_in_repelling_petals(&germ, &gamma);
    let arc_ok = petal_check == ClauseResult::Pass;
    rep.set(Clause::ArcInRepellingPetals, petal_check);
    let dependent = |what: &str| ClauseResult::Unverifiable(format!("{what} depends on the arc lying in repelling petals"));

    if !arc_ok {
        for c in [
            Clause::ArcInvariance,
            Clause::ArcEndpoints,
            Clause::OmegaCompactness,
            Clause::DeltaIsomorphism,
            Clause::AttractingPetalInDelta,
        ] {
            rep.set(c, dependent(c.name()));
        }
        return Ok((None, rep));
    }

    // invariance, and γ on 1/d <= |t| < 1 in U minus U'
    let res = check_arc_invariance(map, &gamma);
    let d = gamma.base_degree_d as f64;
    let mut misplaced = 0;
    for (&t, &z) in gamma.params.iter().zip(&gamma.points) {
        if t.abs() > 1.0 / d * (1.0 + 1e-9) && t.abs() < 1.0 - 1e-9 {
            let in_u = u.classify(z, 1e-6 * diam) != Membership::Outside;
            let in_up = u_prime.classify(z, 1e-6 * diam) == Membership::Inside;
            if !in_u || in_up {
                misplaced += 1;
            }
        }
    }
    rep.notes.push(format!("arc invariance residual {res:e}"));
    rep.set(
        Clause::ArcInvariance,
        ClauseResult::check(
            res < ARC_INVARIANCE_TOL && misplaced == 0,
            format!("residual {res:e}, {misplaced} samples of the outer arc outside U \\ U'"),
        ),
    );

    let e = u.distance_to_boundary(gamma.start()).max(u.distance_to_boundary(gamma.end()));
    rep.set(
        Clause::ArcEndpoints,
        ClauseResult::check(e <= 1e-6 * diam, format!("endpoint distance to dU {e:e}")),
    );

    let (pieces, ncrit) = match split_pieces(map, &u_prime, &u, &gamma) {
        Ok(p) => p,
        Err(e) => {
            for c in [Clause::OmegaCompactness, Clause::DeltaIsomorphism, Clause::AttractingPetalInDelta] {
                rep.set(c, ClauseResult::Unverifiable(format!("pieces unavailable: {e}")));
            }
            return Ok((None, rep));
        }
    };
    rep.notes.push(format!("{ncrit} critical point(s) in U'"));

    // Ω' ⊂⊂ U
    let omega_pts = pieces.omega_prime.boundary();
    let inside = omega_pts.iter().all(|&z| u.winding_number(z) != 0);
    let gap = boundary_distance_to(&u, omega_pts);
    rep.set(
        Clause::OmegaCompactness,
        ClauseResult::check(inside && gap > 1e-6 * diam, format!("min dist(dΩ', dU) = {gap:e}, inside U: {inside}")),
    );

    rep.set(Clause::DeltaIsomorphism, delta_isomorphism(map, &pieces));
    rep.set(Clause::AttractingPetalInDelta, attracting_petal_in_delta(&germ, &pieces, u_prime.distance_to_boundary(z0)));

    if rep.all_pass() {
        let plm = PLMap {
            map: map.clone(),
            u_prime,
            u,
            degree_d: degree as usize,
            parabolic_point: z0,
            pieces,
            gamma,
            germ,
        };
        Ok((Some(plm), rep))
    } else {
        Ok((None, rep))
    }
}

/// Arc samples inside the local validity radius must lie closer to their
/// repelling direction than to any attracting direction.
fn arc_in_repelling_petals(germ: &ParabolicGerm, gamma: &DividingArc) -> ClauseResult {
    let r = germ.local_radius();
    let n = germ.multiplicity as f64;
    let k0 = gamma.params.iter().position(|&t| t == 0.0).unwrap_or(0);
    for k in [k0.checked_sub(1), Some(k0 + 1)].into_iter().flatten() {
        let Some(&z) = gamma.points.get(k) else { continue };
        let dist = germ.local.to_local(z).norm();
        if !(dist < r) {
            return ClauseResult::Fail(format!(
                "innermost sample t = {:e} is {dist:e} from the parabolic point (local radius {r:e})",
                gamma.params[k]
            ));
        }
    }
    let mut checked = 0;
    for (&t, &z) in gamma.params.iter().zip(&gamma.points) {
        if t == 0.0 {
            continue;
        }
        let u = germ.local.to_local(z);
        if u.norm() >= r || u.norm() == 0.0 {
            continue;
        }
        checked += 1;
        let want = if t > 0.0 { gamma.petal_plus } else { gamma.petal_minus };
        let idx = germ.nearest_repelling(u);
        let off = wrap_angle(u.arg() - germ.repelling_dirs[idx]).abs();
        if idx != want || off >= PI / (2.0 * n) {
            return ClauseResult::Fail(format!(
                "sample t = {t:e} has direction offset {off:.3} rad from repelling petal {idx} (expected {want})"
            ));
        }
    }
    if checked == 0 {
        ClauseResult::Unverifiable("no arc samples within the local petal radius".into())
    } else {
        ClauseResult::Pass
    }
}

fn delta_isomorphism(map: &MapSpec, p: &Pieces) -> ClauseResult {
    let diam = p.delta.diameter();
    let ws = p.delta.interior_samples(DEGREE_SAMPLES / 2, 0.02 * diam, 23);
    let mut degrees = Vec::new();
    for &w in &ws {
        match map_degree_on(map, &p.delta_prime, w) {
            Ok(k) => degrees.push(k),
            Err(e) => return ClauseResult::Unverifiable(format!("degree on Δ' at {w}: {e}")),
        }
    }
    if degrees.is_empty() {
        return ClauseResult::Unverifiable("no interior samples of Δ".into());
    }
    if degrees.iter().any(|&k| k != 1) {
        return ClauseResult::Fail(format!("degree of f on Δ' over Δ samples: {degrees:?}"));
    }
    // spot check: no second preimage inside Δ'
    let (num, den) = map.rational();
    let dd = p.delta_prime.diameter();
    let zs = p.delta_prime.interior_samples(INJECTIVITY_SAMPLES, 1e-3 * dd, 29);
    let mut collisions = 0;
    for &z in &zs {
        let w = map.eval_c(z);
        let g = num.sub(&den.scale(w));
        let Ok(roots) = g.roots() else { continue };
        let count = roots
            .iter()
            .filter(|&&r| (r - z).norm() > 1e-7 * (1.0 + z.norm()))
            .filter(|&&r| p.delta_prime.classify(r, 1e-9 * dd) == Membership::Inside)
            .count();
        if count > 0 {
            collisions += 1;
        }
    }
    ClauseResult::check(
        collisions == 0,
        format!("{collisions} of {} samples share an image inside Δ'", zs.len()),
    )
}

/// Probes along each attracting direction, no further than `reach` from `γ(0)`.
fn attracting_petal_in_delta(germ: &ParabolicGerm, p: &Pieces, reach: f64) -> ClauseResult {
    let r = germ.local_radius().min(reach);
    let eps = 1e-9 * p.delta_prime.diameter();
    for &th in &germ.attracting_dirs {
        let all = [0.5, 0.25, 0.1].iter().all(|&s| {
            let z = germ.local.to_global(C64::from_polar(s * r, th));
            p.delta_prime.classify(z, eps) == Membership::Inside
        });
        if all {
            return ClauseResult::Pass;
        }
    }
    ClauseResult::Fail("no attracting direction points into Δ'".into())
}

/// Orbit test against `Ω' ∪ {γ(0)}` with boundary tolerance `1e-9 · diam(Ω')`.
pub fn in_filled_julia(plm: &PLMap, z: C64, max_iter: usize) -> KMembership {
    let omega = &plm.pieces.omega_prime;
    let eps = 1e-9 * omega.diameter();
    let mut w = z;
    for k in 0..=max_iter {
        if (w - plm.parabolic_point).norm() <= eps {
            return KMembership::Inside;
        }
        match omega.classify(w, eps) {
            Membership::Inside => {}
            Membership::Outside => return KMembership::Escaped(k),
            Membership::Boundary => return KMembership::Undecided,
        }
        if k < max_iter {
            w = plm.map.eval_c(w);
        }
    }
    KMembership::Inside
}

/// `P_0(z) = z + 1/z` and the conjugating Möbius map `(z + 1)/(z - 1)`.
fn p0(z: C64) -> C64 {
    z + z.inv()
}

fn moebius(z: C64) -> C64 {
    (z + 1.0) / (z - 1.0)
}

/// Max relative residual of `φ∘h₂ = P₀∘φ` on random points of `|z| < 3`.
pub fn h2_p0_conjugacy_residual(n_samples: usize, seed: u64) -> f64 {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let s3 = 3f64.sqrt();
    let poles = [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, s3), C64::new(0.0, -s3)];
    let mut worst: f64 = 0.0;
    let mut taken = 0;
    while taken < n_samples {
        let z = C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        if z.norm() >= 3.0 || poles.iter().any(|p| (z - p).norm() < 1e-3) {
            continue;
        }
        taken += 1;
        let lhs = moebius(MapSpec::HTwo.eval_c(z));
        let rhs = p0(moebius(z));
        worst = worst.max((lhs - rhs).norm() / (1.0 + rhs.norm()));
    }
    worst
}

#[derive(Clone, Debug)]
pub struct ExpansionProfile {
    pub min_modulus: f64,
    pub argmin_angles: Vec<f64>,
}

/// `|h₂'(e^{iθ})|` on `n` uniform circle samples.
pub fn circle_expansion_profile(n_samples: usize) -> Result<ExpansionProfile> {
    if n_samples < 360 {
        return Err(Error::InvalidInput("need at least 360 circle samples".into()));
    }
    let vals: Vec<(f64, f64)> = (0..n_samples)
        .map(|k| {
            let th = std::f64::consts::TAU * k as f64 / n_samples as f64;
            let z = C64::from_polar(1.0, th);
            (th, MapSpec::HTwo.eval_deriv_c(z).1.norm())
        })
        .collect();
    let min = vals.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    let argmin_angles = vals.iter().filter(|v| v.1 - min <= 1e-6).map(|v| v.0).collect();
    Ok(ExpansionProfile { min_modulus: min, argmin_angles })
}

/// `c_{p/q} = λ/2 - λ²/4` with `λ = e^{2πi p/q}`.
pub fn c_pq(p: u32, q: u32) -> C64 {
    let lam = C64::from_polar(1.0, std::f64::consts::TAU * p as f64 / q as f64);
    lam / 2.0 - lam * lam / 4.0
}
