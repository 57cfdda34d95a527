use parlike::instances;
use parlike::plm::{assemble, in_filled_julia, KMembership};
use parlike::render::{
    classify_julia, classify_paramplane, classify_parameter, classify_perone, pgm_bytes, ppm_bytes, render_julia,
    render_paramplane, write_ppm, Class, ClassGrid, JuliaTarget, Palette, RasterImage, Viewport, JULIA_MAX_ITER,
    PARAM_MAX_ITER,
};
use parlike::C64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn perone_zero_half_planes() {
    assert_eq!(classify_perone(c(0.0, 0.0), c(-2.0, 0.0), JULIA_MAX_ITER), Class::InK);
    assert!(matches!(classify_perone(c(0.0, 0.0), c(2.0, 0.0), JULIA_MAX_ITER), Class::Escaped(_)));
}

#[test]
fn perone_one_fixed_point_in_k() {
    assert_eq!(classify_perone(c(1.0, 0.0), c(-1.0, 0.0), JULIA_MAX_ITER), Class::InK);
}

#[test]
fn escape_needs_alignment_with_drift() {
    // far out but on the wrong side: the orbit must first come back past the origin
    let a = c(1.0, 0.0);
    assert_eq!(classify_perone(a, c(-500.0, 0.0), 0), Class::InK);
    assert_eq!(classify_perone(a, c(500.0, 0.0), 0), Class::Escaped(0));
    assert!(matches!(classify_perone(a, c(-500.0, 50.0), 2000), Class::Escaped(k) if k > 500));
    // the negative real axis drifts into the superattracting point -1
    assert_eq!(classify_perone(a, c(-500.0, 0.0), 2000), Class::InK);
}

#[test]
fn pole_maps_to_parabolic_point() {
    assert_eq!(classify_perone(c(1.0, 0.0), c(0.0, 0.0), 10), Class::Escaped(1));
}

#[test]
fn parameter_examples() {
    assert_eq!(classify_parameter(c(1.0, 0.0), PARAM_MAX_ITER), Class::InK);
    assert!(matches!(classify_parameter(c(4.0, 0.0), PARAM_MAX_ITER), Class::Escaped(k) if k < 100));
    assert_eq!(classify_parameter(c(0.0, 0.0), PARAM_MAX_ITER), Class::InK);
}

#[test]
fn viewport_pixel_centres() {
    let vp = Viewport::new(c(1.0, 2.0), 4.0, 2.0, 4, 2).unwrap();
    assert_eq!(vp.pixel(0, 0), c(1.0 - 1.5, 2.0 + 0.5));
    assert_eq!(vp.pixel(3, 1), c(1.0 + 1.5, 2.0 - 0.5));
    assert_eq!(vp.locate(c(1.2, 1.9)), Some((2, 1)));
    assert_eq!(vp.locate(c(10.0, 0.0)), None);
    assert!(Viewport::new(c(0.0, 0.0), 0.0, 1.0, 4, 4).is_err());
    assert!(Viewport::new(c(0.0, 0.0), 1.0, 1.0, 0, 4).is_err());
}

#[test]
fn palette_colours() {
    let p = Palette::default();
    assert_eq!(p.color(Class::InK), [0, 0, 0]);
    assert_eq!(p.color(Class::Undecided), [128, 128, 128]);
    assert_eq!(p.color(Class::Escaped(0)), [255, 0, 0]);
    assert_eq!(p.color(Class::Escaped(64)), p.color(Class::Escaped(0)));
    assert_ne!(p.color(Class::Escaped(1)), p.color(Class::Escaped(0)));
}

#[test]
fn ppm_byte_layout() {
    let white = RasterImage { px_w: 1, px_h: 1, pixels: vec![[255, 255, 255]] };
    assert_eq!(ppm_bytes(&white), b"P6\n1 1\n255\n\xFF\xFF\xFF".to_vec());
    let bw = RasterImage { px_w: 2, px_h: 1, pixels: vec![[0, 0, 0], [255, 255, 255]] };
    assert_eq!(ppm_bytes(&bw), b"P6\n2 1\n255\n\x00\x00\x00\xFF\xFF\xFF".to_vec());
}

#[test]
fn pgm_byte_layout() {
    let grid = ClassGrid { px_w: 3, px_h: 1, cells: vec![Class::InK, Class::Escaped(7), Class::Undecided] };
    assert_eq!(pgm_bytes(&grid), b"P5\n3 1\n255\n\x00\xFF\x80".to_vec());
}

#[test]
fn ppm_file_matches_bytes_and_is_reproducible() {
    let vp = Viewport::square(c(0.0, 0.0), 8.0, 64).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for run in 0..2 {
        let img = render_julia(&JuliaTarget::PerOne(c(1.0, 0.0)), &vp, 500, Palette::default(), None).unwrap();
        let path = dir.path().join(format!("run{run}.ppm"));
        write_ppm(&img, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(bytes, ppm_bytes(&img));
        assert_eq!(bytes.len(), "P6\n64 64\n255\n".len() + 3 * 64 * 64);
        files.push(bytes);
    }
    assert_eq!(files[0], files[1]);
    assert!(write_ppm(&RasterImage { px_w: 1, px_h: 1, pixels: vec![[0; 3]] }, &dir.path().join("no/such/dir.ppm")).is_err());
}

#[test]
fn thread_count_does_not_change_pixels() {
    let vp = Viewport::square(c(0.0, 0.0), 8.0, 128).unwrap();
    let target = JuliaTarget::PerOne(c(1.0, 0.0));
    let one = render_julia(&target, &vp, JULIA_MAX_ITER, Palette::default(), Some(1)).unwrap();
    let many = render_julia(&target, &vp, JULIA_MAX_ITER, Palette::default(), Some(8)).unwrap();
    assert_eq!(ppm_bytes(&one), ppm_bytes(&many));
    let p1 = render_paramplane(&vp, PARAM_MAX_ITER, Palette::default(), Some(1)).unwrap();
    let p8 = render_paramplane(&vp, PARAM_MAX_ITER, Palette::default(), Some(8)).unwrap();
    assert_eq!(ppm_bytes(&p1), ppm_bytes(&p8));
}

#[test]
fn perone_zero_mask_is_left_half() {
    let px = 256;
    let vp = Viewport::square(c(0.0, 0.0), 4.0, px).unwrap();
    let grid = classify_julia(&JuliaTarget::PerOne(c(0.0, 0.0)), &vp, JULIA_MAX_ITER, None).unwrap();
    for j in 0..px {
        for i in 0..px {
            let in_k = grid.get(i, j) == Class::InK;
            if i + 2 < px / 2 {
                assert!(in_k, "({i}, {j})");
            } else if i >= px / 2 + 2 {
                assert!(!in_k, "({i}, {j})");
            }
        }
    }
}

fn downsample_any(mask: &[bool], px: usize) -> Vec<bool> {
    let h = px / 2;
    (0..h * h).map(|k| {
        let (i, j) = (k % h, k / h);
        [(0, 0), (1, 0), (0, 1), (1, 1)].iter().any(|(di, dj)| mask[(2 * j + dj) * px + 2 * i + di])
    })
    .collect()
}

fn dilate(mask: &[bool], px: usize) -> Vec<bool> {
    let at = |i: isize, j: isize| i >= 0 && j >= 0 && (i as usize) < px && (j as usize) < px && mask[j as usize * px + i as usize];
    (0..px * px)
        .map(|k| {
            let (i, j) = ((k % px) as isize, (k / px) as isize);
            (-1..=1).any(|di| (-1..=1).any(|dj| at(i + di, j + dj)))
        })
        .collect()
}

#[test]
fn mask_refines_with_resolution() {
    let target = JuliaTarget::PerOne(c(1.0, 0.0));
    let fine = classify_julia(&target, &Viewport::square(c(0.0, 0.0), 8.0, 512).unwrap(), JULIA_MAX_ITER, None).unwrap();
    let coarse = classify_julia(&target, &Viewport::square(c(0.0, 0.0), 8.0, 256).unwrap(), JULIA_MAX_ITER, None).unwrap();
    let allowed = dilate(&downsample_any(&fine.in_k_mask(), 512), 256);
    let coarse = coarse.in_k_mask();
    assert!(coarse.iter().any(|&b| b));
    for (k, (&c, &a)) in coarse.iter().zip(&allowed).enumerate() {
        assert!(!c || a, "coarse pixel ({}, {}) not covered", k % 256, k / 256);
    }
}

#[test]
fn paramplane_mask_symmetric_under_negation() {
    let px = 128;
    let vp = Viewport::square(c(0.0, 0.0), 8.0, px).unwrap();
    let grid = classify_paramplane(&vp, PARAM_MAX_ITER, None).unwrap();
    let mut mismatches = 0;
    for j in 0..px {
        for i in 0..px {
            // with a power-of-two size, pixel (px-1-i, px-1-j) is exactly the negated parameter
            if grid.get(i, j) != grid.get(px - 1 - i, px - 1 - j) {
                mismatches += 1;
            }
            let a = vp.pixel(i, j);
            assert_eq!(classify_parameter(a, PARAM_MAX_ITER), classify_parameter(-a, PARAM_MAX_ITER), "A = {a}");
        }
    }
    assert_eq!(mismatches, 0);
}

#[test]
fn cubic_plm_mask() {
    let q = instances::example2().unwrap();
    let (plm, _) = assemble(&q.map, q.u_prime, q.u, q.gamma).unwrap();
    let plm = plm.unwrap();
    let vp = Viewport::square(c(0.0, 0.0), 4.0, 128).unwrap();
    let grid = classify_julia(&JuliaTarget::Plm(&plm), &vp, JULIA_MAX_ITER, None).unwrap();
    let (i, j) = vp.locate(c(0.0, -1.0)).unwrap();
    assert_eq!(grid.get(i, j), Class::InK);
    assert_eq!(in_filled_julia(&plm, vp.pixel(i, j), JULIA_MAX_ITER), KMembership::Inside);
    let (i, j) = vp.locate(c(1.5, 0.0)).unwrap();
    assert_ne!(grid.get(i, j), Class::InK);
}

fn any_c() -> impl Strategy<Value = C64> {
    (-4.0f64..4.0, -4.0f64..4.0).prop_map(|(a, b)| C64::new(a, b))
}

proptest! {
    #[test]
    fn perone_classification_sign_symmetric(a in any_c(), z in any_c()) {
        prop_assert_eq!(classify_perone(a, z, 300), classify_perone(-a, -z, 300));
    }
}
