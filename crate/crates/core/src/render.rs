//! Deterministic raster images of filled Julia sets and of the `Per₁(1)` parameter plane.

use crate::error::{Error, Result};
use crate::plm::{in_filled_julia, KMembership, PLMap};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::io::Write;
use std::path::Path;

pub const JULIA_MAX_ITER: usize = 2000;
pub const PARAM_MAX_ITER: usize = 500;
const HUE_PERIOD: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Viewport {
    pub center: C64,
    pub width: f64,
    pub height: f64,
    pub px_w: usize,
    pub px_h: usize,
}

impl Viewport {
    pub fn new(center: C64, width: f64, height: f64, px_w: usize, px_h: usize) -> Result<Viewport> {
        if !(width > 0.0 && height > 0.0) || px_w == 0 || px_h == 0 {
            return Err(Error::InvalidInput("viewport needs positive extent and pixel counts".into()));
        }
        Ok(Viewport { center, width, height, px_w, px_h })
    }

    /// Square viewport with `px × px` pixels.
    pub fn square(center: C64, width: f64, px: usize) -> Result<Viewport> {
        Viewport::new(center, width, width, px, px)
    }

    /// Center of pixel `(i, j)`; row 0 is the top.
    pub fn pixel(&self, i: usize, j: usize) -> C64 {
        let x = ((i as f64 + 0.5) / self.px_w as f64 - 0.5) * self.width;
        let y = (0.5 - (j as f64 + 0.5) / self.px_h as f64) * self.height;
        self.center + C64::new(x, y)
    }

    /// Pixel containing `z`, if inside the viewport.
    pub fn locate(&self, z: C64) -> Option<(usize, usize)> {
        let d = z - self.center;
        let fi = (d.re / self.width + 0.5) * self.px_w as f64;
        let fj = (0.5 - d.im / self.height) * self.px_h as f64;
        if fi < 0.0 || fj < 0.0 || fi >= self.px_w as f64 || fj >= self.px_h as f64 {
            return None;
        }
        Some((fi as usize, fj as usize))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Class {
    InK,
    Escaped(usize),
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Palette {
    /// Escape step `k` at hue `(k mod 64)/64`, full saturation and value.
    #[default]
    HueCycle,
}

impl Palette {
    pub fn color(&self, c: Class) -> [u8; 3] {
        match c {
            Class::InK => [0, 0, 0],
            Class::Undecided => [128, 128, 128],
            Class::Escaped(k) => hsv_full((k % HUE_PERIOD) as f64 / HUE_PERIOD as f64),
        }
    }
}

fn hsv_full(h: f64) -> [u8; 3] {
    let x = h * 6.0;
    let sector = x.floor() as usize % 6;
    let f = x - x.floor();
    let up = (255.0 * f).round() as u8;
    let down = 255 - up;
    match sector {
        0 => [255, up, 0],
        1 => [down, 255, 0],
        2 => [0, 255, up],
        3 => [0, down, 255],
        4 => [up, 0, 255],
        _ => [255, 0, down],
    }
}

/// Per-pixel classification, row-major from the top row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassGrid {
    pub px_w: usize,
    pub px_h: usize,
    pub cells: Vec<Class>,
}

impl ClassGrid {
    pub fn get(&self, i: usize, j: usize) -> Class {
        self.cells[j * self.px_w + i]
    }

    pub fn in_k_mask(&self) -> Vec<bool> {
        self.cells.iter().map(|c| *c == Class::InK).collect()
    }

    pub fn to_image(&self, palette: Palette) -> RasterImage {
        let pixels = self.cells.iter().map(|&c| palette.color(c)).collect();
        RasterImage { px_w: self.px_w, px_h: self.px_h, pixels }
    }

    /// Grayscale bytes: 0 in K, 255 escaped, 128 undecided.
    pub fn mask_bytes(&self) -> Vec<u8> {
        self.cells
            .iter()
            .map(|c| match c {
                Class::InK => 0,
                Class::Escaped(_) => 255,
                Class::Undecided => 128,
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RasterImage {
    pub px_w: usize,
    pub px_h: usize,
    pub pixels: Vec<[u8; 3]>,
}

pub enum JuliaTarget<'a> {
    PerOne(C64),
    Plm(&'a PLMap),
}

/// Escape radius for `P_A`, `A ≠ 0`.
pub fn escape_radius(a: C64) -> f64 {
    100f64.max(10.0 / a.norm())
}

/// Orbit classification for `P_A(z) = z + 1/z + A`. For `A = 0` the orbit is
/// in `Λ` once it enters the invariant right half-plane.
pub fn classify_perone(a: C64, z: C64, max_iter: usize) -> Class {
    let zero = a == C64::new(0.0, 0.0);
    let r2 = if zero { 0.0 } else { escape_radius(a).powi(2) };
    let mut w = z;
    for k in 0..=max_iter {
        if zero {
            if w.re > 0.0 {
                return Class::Escaped(k);
            }
        } else if w.norm_sqr() > r2 && (w * a.conj()).re > 0.0 {
            return Class::Escaped(k);
        }
        if k < max_iter {
            w = w + w.inv() + a;
            if !w.is_finite() {
                // the pole at 0 maps onto the parabolic point
                return Class::Escaped(k + 1);
            }
        }
    }
    Class::InK
}

fn run_rows<F>(vp: &Viewport, threads: Option<usize>, f: F) -> Result<ClassGrid>
where
    F: Fn(C64) -> Class + Sync,
{
    let job = || {
        let mut cells = vec![Class::Undecided; vp.px_w * vp.px_h];
        cells.par_chunks_mut(vp.px_w).enumerate().for_each(|(j, row)| {
            for (i, cell) in row.iter_mut().enumerate() {
                *cell = f(vp.pixel(i, j));
            }
        });
        cells
    };
    let cells = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?
            .install(job),
        None => job(),
    };
    Ok(ClassGrid { px_w: vp.px_w, px_h: vp.px_h, cells })
}

pub fn classify_julia(target: &JuliaTarget, vp: &Viewport, max_iter: usize, threads: Option<usize>) -> Result<ClassGrid> {
    match target {
        JuliaTarget::PerOne(a) => run_rows(vp, threads, |z| classify_perone(*a, z, max_iter)),
        JuliaTarget::Plm(plm) => run_rows(vp, threads, |z| match in_filled_julia(plm, z, max_iter) {
            KMembership::Inside => Class::InK,
            KMembership::Escaped(k) => Class::Escaped(k),
            KMembership::Undecided => Class::Undecided,
        }),
    }
}

pub fn render_julia(
    target: &JuliaTarget,
    vp: &Viewport,
    max_iter: usize,
    palette: Palette,
    threads: Option<usize>,
) -> Result<RasterImage> {
    Ok(classify_julia(target, vp, max_iter, threads)?.to_image(palette))
}

/// Parameter-plane pixel: in the locus unless both critical orbits `±1` escape;
/// otherwise the later escape step.
pub fn classify_parameter(a: C64, max_iter: usize) -> Class {
    let one = C64::new(1.0, 0.0);
    match (classify_perone_nonzero(a, one, max_iter), classify_perone_nonzero(a, -one, max_iter)) {
        (Class::Escaped(p), Class::Escaped(q)) => Class::Escaped(p.max(q)),
        _ => Class::InK,
    }
}

/// The `A ≠ 0` rule applied to every `A`; at `A = 0` nothing escapes.
fn classify_perone_nonzero(a: C64, z: C64, max_iter: usize) -> Class {
    if a == C64::new(0.0, 0.0) {
        return Class::InK;
    }
    classify_perone(a, z, max_iter)
}

pub fn classify_paramplane(vp: &Viewport, max_iter: usize, threads: Option<usize>) -> Result<ClassGrid> {
    run_rows(vp, threads, |a| classify_parameter(a, max_iter))
}

pub fn render_paramplane(vp: &Viewport, max_iter: usize, palette: Palette, threads: Option<usize>) -> Result<RasterImage> {
    Ok(classify_paramplane(vp, max_iter, threads)?.to_image(palette))
}

pub fn ppm_bytes(img: &RasterImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.px_w, img.px_h).into_bytes();
    out.reserve(3 * img.pixels.len());
    for p in &img.pixels {
        out.extend_from_slice(p);
    }
    out
}

pub fn pgm_bytes(grid: &ClassGrid) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", grid.px_w, grid.px_h).into_bytes();
    out.extend(grid.mask_bytes());
    out
}

fn write_all(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::File::create(path)?.write_all(bytes)?;
    Ok(())
}

pub fn write_ppm(img: &RasterImage, path: &Path) -> Result<()> {
    write_all(path, &ppm_bytes(img))
}

pub fn write_pgm(grid: &ClassGrid, path: &Path) -> Result<()> {
    write_all(path, &pgm_bytes(grid))
}
