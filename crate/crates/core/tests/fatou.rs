use num_complex::Complex64 as C64;
use parlike::fatou::{ecalle_project, FatouChart, PetalKind};
use parlike::germ::{germ_analyze, germ_analyze_with_order};
use parlike::{MapSpec, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn chart(map: &MapSpec, base: Point, kind: PetalKind, petal: usize) -> FatouChart {
    let g = Arc::new(germ_analyze(map, base).unwrap());
    FatouChart::new(map, g, kind, petal).unwrap()
}

/// Points of the petal at translation-chart values spread over a box.
fn petal_samples(ch: &FatouChart, n: usize, seed: u64) -> Vec<C64> {
    let r = ch.germ.validity_radius();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sign = if ch.kind == PetalKind::Attracting { 1.0 } else { -1.0 };
    (0..n)
        .map(|_| {
            let w = c(sign * rng.gen_range(0.5 * r..3.0 * r), rng.gen_range(-1.5 * r..1.5 * r));
            ch.petal_point(w)
        })
        .collect()
}

fn max_residual(map: &MapSpec, ch: &FatouChart, pts: &[C64]) -> f64 {
    pts.iter()
        .map(|&z| {
            let a = ch.eval(z).unwrap();
            let b = ch.eval(map.eval_c(z)).unwrap();
            (b - a - 1.0).norm()
        })
        .fold(0.0, f64::max)
}

#[test]
fn functional_equation_perone_attracting() {
    let map = MapSpec::PerOne(c(1.0, 0.0));
    let ch = chart(&map, Point::Infinity, PetalKind::Attracting, 0);
    let pts = petal_samples(&ch, 200, 1);
    assert!(max_residual(&map, &ch, &pts) < 1e-6);
}

#[test]
fn functional_equation_cubic_both_kinds() {
    let map = MapSpec::CubicC(c(0.0, 1.0));
    for kind in [PetalKind::Attracting, PetalKind::Repelling] {
        let ch = chart(&map, Point::Finite(c(0.0, 0.0)), kind, 0);
        let pts = petal_samples(&ch, 100, 2);
        let r = max_residual(&map, &ch, &pts);
        assert!(r < 1e-6, "{kind:?}: {r}");
    }
}

#[test]
fn functional_equation_htwo_all_petals() {
    let map = MapSpec::HTwo;
    for kind in [PetalKind::Attracting, PetalKind::Repelling] {
        for p in 0..2 {
            let ch = chart(&map, Point::Finite(c(1.0, 0.0)), kind, p);
            let pts = petal_samples(&ch, 50, 3 + p as u64);
            let r = max_residual(&map, &ch, &pts);
            assert!(r < 1e-6, "{kind:?} petal {p}: {r}");
        }
    }
}

#[test]
fn perone_normalizations() {
    for a in [c(1.0, 0.0), c(0.5, 0.0), c(0.5, 0.5)] {
        let map = MapSpec::PerOne(a);
        let ch = chart(&map, Point::Infinity, PetalKind::Attracting, 0)
            .with_anchor(2.0 + a, c(1.0, 0.0))
            .unwrap();
        assert_eq!(ch.eval(2.0 + a).unwrap(), c(1.0, 0.0));
        let next = ch.eval(map.eval_c(2.0 + a)).unwrap();
        assert!((next - 2.0).norm() < 1e-9, "A={a}: {next}");
    }
}

#[test]
fn inverse_round_trip_and_equivariance() {
    let cases: Vec<(MapSpec, Point, PetalKind, usize)> = vec![
        (MapSpec::PerOne(c(1.0, 0.0)), Point::Infinity, PetalKind::Attracting, 0),
        (MapSpec::CubicC(c(0.0, 1.0)), Point::Finite(c(0.0, 0.0)), PetalKind::Repelling, 0),
        (MapSpec::CubicC(c(0.0, 1.0)), Point::Finite(c(0.0, 0.0)), PetalKind::Attracting, 0),
        (MapSpec::HTwo, Point::Finite(c(1.0, 0.0)), PetalKind::Repelling, 1),
        (MapSpec::HTwo, Point::Finite(c(1.0, 0.0)), PetalKind::Attracting, 0),
    ];
    for (map, base, kind, petal) in cases {
        let ch = chart(&map, base, kind, petal);
        let r = ch.germ.validity_radius();
        let sign = if kind == PetalKind::Attracting { 1.0 } else { -1.0 };
        for i in 0..10 {
            for j in 0..10 {
                let w = c(sign * (2.0 * r + 3.0 * i as f64), -r + 0.2 * r * j as f64);
                let z = ch.inverse(w).unwrap();
                let back = ch.eval(z).unwrap();
                assert!((back - w).norm() < 1e-8, "{map:?} {kind:?} w={w}");
                let z1 = ch.inverse(w + 1.0).unwrap();
                assert!((z1 - map.eval_c(z)).norm() < 1e-8 * (1.0 + z1.norm()));
            }
        }
    }
}

#[test]
fn two_expansion_orders_differ_by_a_constant() {
    let map = MapSpec::HTwo;
    let base = Point::Finite(c(1.0, 0.0));
    let g1 = Arc::new(germ_analyze(&map, base).unwrap());
    let g2 = Arc::new(germ_analyze_with_order(&map, base, Some(3)).unwrap());
    let a = FatouChart::new(&map, g1, PetalKind::Attracting, 1).unwrap();
    let b = FatouChart::new(&map, g2, PetalKind::Attracting, 1).unwrap();
    let pts = petal_samples(&a, 100, 9);
    let diffs: Vec<C64> = pts.iter().map(|&z| a.eval(z).unwrap() - b.eval(z).unwrap()).collect();
    let spread = diffs.iter().map(|d| (d - diffs[0]).norm()).fold(0.0, f64::max);
    assert!(spread < 1e-7, "{spread}");
}

#[test]
fn estimates_converge_on_doubling() {
    // the bare expansion (no positive powers) converges slowly enough to observe
    let map = MapSpec::CubicC(c(0.0, 1.0));
    let g = Arc::new(germ_analyze_with_order(&map, Point::Finite(c(0.0, 0.0)), Some(0)).unwrap());
    let ch = FatouChart::new(&map, g, PetalKind::Attracting, 0).unwrap();
    let z = ch.petal_point(c(80.0, 5.0));
    let ks = [100, 200, 400, 800, 1600, 3200];
    let est = ch.estimates(z, &ks);
    let diffs: Vec<f64> = est.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    for w in diffs.windows(2) {
        assert!(w[1] < w[0], "{diffs:?}");
    }
}

#[test]
fn overlap_difference_is_orbit_invariant() {
    let map = MapSpec::HTwo;
    let base = Point::Finite(c(1.0, 0.0));
    let g = Arc::new(germ_analyze(&map, base).unwrap());
    let att = FatouChart::new(&map, g.clone(), PetalKind::Attracting, 1).unwrap();
    let rep = FatouChart::new(&map, g, PetalKind::Repelling, 1).unwrap();
    // attracting direction pi, repelling pi/2: overlap near 3pi/4, close to the base
    for k in 0..10 {
        let r = 0.02 + 0.002 * k as f64;
        let z = c(1.0, 0.0) + C64::from_polar(r, 0.72 * std::f64::consts::PI);
        let d0 = att.eval(z).unwrap() - rep.eval(z).unwrap();
        let fz = map.eval_c(z);
        let d1 = att.eval(fz).unwrap() - rep.eval(fz).unwrap();
        let e = ecalle_project(d0 - d1 + 0.5) - 0.5;
        assert!(e.norm() < 1e-7, "r={r}: {d0} vs {d1}");
    }
}

#[test]
fn htwo_circle_maps_to_horizontal_line() {
    let map = MapSpec::HTwo;
    let base = Point::Finite(c(1.0, 0.0));
    let g = Arc::new(germ_analyze(&map, base).unwrap());
    let up = g.repelling_dirs.iter().position(|&d| d > 0.0).unwrap();
    let ch = FatouChart::new(&map, g, PetalKind::Repelling, up)
        .unwrap()
        .calibrated_real_at(C64::from_polar(1.0, 0.2))
        .unwrap();
    for k in 1..40 {
        let th = 0.01 * k as f64;
        let w = ch.eval(C64::from_polar(1.0, th)).unwrap();
        assert!(w.im.abs() < 1e-8, "theta={th}: {w}");
        assert!(w.re < 0.0);
    }
}
