use parlike::poly::Poly;
use parlike::{MapSpec, Point, C64};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn fin(p: Point) -> C64 {
    p.finite().expect("finite point")
}

fn catalog() -> Vec<MapSpec> {
    vec![
        MapSpec::PerOne(c(1.0, 0.0)),
        MapSpec::PerOne(c(0.5, 0.5)),
        MapSpec::PerOne(c(0.0, 0.0)),
        MapSpec::HTwo,
        MapSpec::CubicC(c(0.0, 1.0)),
        MapSpec::QuadIter { c: parlike::plm::c_pq(1, 3), q: 3 },
        MapSpec::QuadIter { c: c(-1.0, 0.0), q: 2 },
        MapSpec::rational_pair(Poly::from_real(&[0.0, 1.0, 0.5]), Poly::from_real(&[1.0, 0.0, 0.25])).unwrap(),
    ]
}

#[test]
fn eval_examples() {
    assert_eq!(fin(MapSpec::HTwo.eval(Point::Finite(c(0.0, 0.0)))), c(1.0 / 3.0, 0.0));
    assert_eq!(fin(MapSpec::PerOne(c(1.0, 0.0)).eval(Point::Finite(c(-1.0, 0.0)))), c(-1.0, 0.0));
    assert_eq!(fin(MapSpec::PerOne(c(0.0, 0.0)).eval(Point::Finite(c(0.0, 1.0)))), c(0.0, 0.0));
}

#[test]
fn poles_map_to_infinity() {
    assert_eq!(MapSpec::PerOne(c(1.0, 0.0)).eval(Point::Finite(c(0.0, 0.0))), Point::Infinity);
    let r = MapSpec::rational_pair(Poly::from_real(&[1.0]), Poly::from_real(&[-2.0, 1.0])).unwrap();
    assert_eq!(r.eval(Point::Finite(c(2.0, 0.0))), Point::Infinity);
    assert_eq!(MapSpec::CubicC(c(0.0, 1.0)).eval(Point::Infinity), Point::Infinity);
    assert_eq!(fin(MapSpec::HTwo.eval(Point::Infinity)), c(3.0, 0.0));
}

#[test]
fn deriv_examples() {
    assert_eq!(fin(MapSpec::PerOne(c(0.3, 0.1)).deriv(c(1.0, 0.0))), c(0.0, 0.0));
    let d = fin(MapSpec::HTwo.deriv(c(0.0, 1.0)));
    assert!((d - c(0.0, 4.0)).norm() < 1e-14, "{d}");
    assert_eq!(fin(MapSpec::CubicC(c(0.0, 1.0)).deriv(c(0.0, -1.0))), c(0.0, 0.0));
    assert_eq!(MapSpec::PerOne(c(1.0, 0.0)).deriv(c(0.0, 0.0)), Point::Infinity);
}

#[test]
fn orbit_examples() {
    let p0 = MapSpec::PerOne(c(0.0, 0.0));
    let o: Vec<C64> = p0.orbit(Point::Finite(c(1.0, 0.0)), 2).into_iter().map(fin).collect();
    assert_eq!(o, vec![c(1.0, 0.0), c(2.0, 0.0), c(2.5, 0.0)]);
    let o: Vec<C64> = p0.orbit(Point::Finite(c(-1.0, 0.0)), 2).into_iter().map(fin).collect();
    assert_eq!(o, vec![c(-1.0, 0.0), c(-2.0, 0.0), c(-2.5, 0.0)]);
    let o = MapSpec::HTwo.orbit(Point::Finite(c(1.0, 0.0)), 5);
    assert_eq!(o, vec![Point::Finite(c(1.0, 0.0)); 6]);
}

#[test]
fn orbit_stops_at_infinity() {
    let o = MapSpec::PerOne(c(1.0, 0.0)).orbit(Point::Finite(c(0.0, 0.0)), 5);
    assert_eq!(o, vec![Point::Finite(c(0.0, 0.0)), Point::Infinity]);
}

#[test]
fn htwo_fixed_points() {
    let fps = MapSpec::HTwo.fixed_points().unwrap();
    assert_eq!(fps.len(), 1);
    assert!((fin(fps[0].location) - 1.0).norm() < 1e-10);
    assert_eq!(fps[0].algebraic_multiplicity, 3);
    assert!((fps[0].multiplier - 1.0).norm() < 1e-8);
}

#[test]
fn cubic_fixed_points() {
    let mut fps = MapSpec::CubicC(c(0.0, 1.0)).fixed_points().unwrap();
    fps.retain(|f| !f.location.is_infinite());
    fps.sort_by(|a, b| fin(a.location).im.total_cmp(&fin(b.location).im));
    assert_eq!(fps.len(), 2);
    assert!((fin(fps[0].location) - c(0.0, -1.0)).norm() < 1e-12);
    assert!(fps[0].multiplier.norm() < 1e-12);
    assert!(fin(fps[1].location).norm() < 1e-10);
    assert_eq!(fps[1].algebraic_multiplicity, 2);
    assert!((fps[1].multiplier - 1.0).norm() < 1e-9);
}

#[test]
fn perone_fixed_points() {
    let fps = MapSpec::PerOne(c(1.0, 0.0)).fixed_points().unwrap();
    assert_eq!(fps.len(), 2);
    let inf = fps.iter().find(|f| f.location.is_infinite()).unwrap();
    assert_eq!(inf.multiplier, c(1.0, 0.0));
    let m1 = fps.iter().find(|f| !f.location.is_infinite()).unwrap();
    assert!((fin(m1.location) + 1.0).norm() < 1e-14);
    assert!(m1.multiplier.norm() < 1e-14);
}

#[test]
fn critical_point_examples() {
    let h = MapSpec::HTwo.critical_points().unwrap();
    assert_eq!(h.len(), 2);
    assert!(h.contains(&Point::Infinity));
    assert!(h.iter().any(|p| p.finite().is_some_and(|z| z.norm() < 1e-12)));
    for a in [c(0.0, 0.0), c(1.0, 0.0), c(0.3, -2.0)] {
        let mut cp: Vec<C64> = MapSpec::PerOne(a).critical_points().unwrap().into_iter().map(fin).collect();
        cp.sort_by(|x, y| x.re.total_cmp(&y.re));
        assert!((cp[0] + 1.0).norm() < 1e-12 && (cp[1] - 1.0).norm() < 1e-12, "A={a}: {cp:?}");
    }
    let cc: Vec<C64> = MapSpec::CubicC(c(0.0, 1.0)).critical_points().unwrap().into_iter().filter_map(|p| p.finite()).collect();
    assert_eq!(cc.len(), 2);
    assert!(cc.iter().any(|z| (z - c(0.0, -1.0)).norm() < 1e-12));
    assert!(cc.iter().any(|z| (z - c(0.0, 1.0 / 3.0)).norm() < 1e-12));
}

#[test]
fn series_examples() {
    for a in [c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0), c(0.4, -0.7)] {
        let s = MapSpec::PerOne(a).series_at(Point::Infinity, 3).unwrap();
        let want = [c(0.0, 0.0), c(1.0, 0.0), -a, a * a - 1.0];
        for k in 0..4 {
            assert!((s[k] - want[k]).norm() < 1e-12, "A={a} k={k}: {:?}", s);
        }
    }
    let s = MapSpec::PerOne(c(0.0, 0.0)).series_at(Point::Infinity, 3).unwrap();
    assert_eq!(s, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
    let s = MapSpec::CubicC(c(0.0, 1.0)).series_at(Point::Finite(c(0.0, 0.0)), 3).unwrap();
    assert_eq!(s, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(1.0, 0.0)]);
}

#[test]
fn series_rejects_non_fixed_point() {
    assert!(MapSpec::HTwo.series_at(Point::Finite(c(0.0, 0.0)), 3).is_err());
}

#[test]
fn quaditer_series_matches_expanded_polynomial() {
    let map = MapSpec::QuadIter { c: c(-0.75, 0.0), q: 2 };
    let z0 = c(-0.5, 0.0);
    let s = map.series_at(Point::Finite(z0), 5).unwrap();
    let (num, _) = map.rational();
    let shifted = num.taylor_shift(z0);
    for k in 1..=4 {
        assert!((s[k] - shifted.coeff(k)).norm() < 1e-12, "k={k}");
    }
}

#[test]
fn rational_pair_rejects_shared_root() {
    let num = Poly::from_real(&[-1.0, 0.0, 1.0]);
    let den = Poly::from_real(&[-1.0, 1.0]);
    assert!(MapSpec::rational_pair(num, den).is_err());
    assert!(MapSpec::rational_pair(Poly::z(), Poly::from_real(&[0.0])).is_err());
}

#[test]
fn fixed_and_critical_residuals() {
    for map in catalog() {
        for fp in map.fixed_points().unwrap() {
            if let Point::Finite(z) = fp.location {
                if fp.algebraic_multiplicity == 1 {
                    assert!((map.eval_c(z) - z).norm() < 1e-10 * (1.0 + z.norm()), "{map:?} at {z}");
                }
            }
        }
        for cp in map.critical_points().unwrap() {
            if let Point::Finite(z) = cp {
                let d = map.eval_deriv_c(z).1.norm();
                assert!(d < 1e-10 * (1.0 + map.eval_c(z).norm()), "{map:?} at {z}: {d:e}");
            }
        }
    }
}

fn small_c() -> impl Strategy<Value = C64> {
    (-2.5f64..2.5, -2.5f64..2.5).prop_map(|(a, b)| C64::new(a, b))
}

proptest! {
    #[test]
    fn sign_symmetry(a in small_c(), z in small_c()) {
        prop_assume!(z.norm() > 1e-3);
        let lhs = -MapSpec::PerOne(a).eval_c(-z);
        let rhs = MapSpec::PerOne(-a).eval_c(z);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn htwo_circle_symmetry(z in small_c()) {
        prop_assume!(z.norm() > 1e-3 && (z * z + 3.0).norm() > 1e-3 && (3.0 * z * z + 1.0).norm() > 1e-3);
        let lhs = MapSpec::HTwo.eval_c(z.inv());
        let rhs = MapSpec::HTwo.eval_c(z).inv();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn derivative_matches_finite_difference(idx in 0usize..8, z in small_c()) {
        let map = &catalog()[idx];
        let (f, d) = map.eval_deriv_c(z);
        prop_assume!(f.is_finite() && d.norm() > 1e-6 && d.norm() < 1e6);
        let h = 1e-6 * (1.0 + z.norm());
        let fd = (map.eval_c(z + h) - map.eval_c(z - h)) / (2.0 * h);
        prop_assert!((fd - d).norm() <= 1e-6 * d.norm(), "{:?} at {}: {} vs {}", map, z, fd, d);
    }
}
