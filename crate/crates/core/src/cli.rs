//! Command implementations behind the `parlike` binary.

use crate::arc::{arc_residuals, build_dividing_arc, DEFAULT_LEVELS};
use crate::config::{ConfigError, JobConfig};
use crate::dynamics::{fmt_c, MapSpec, Point};
use crate::error::Error;
use crate::fatou::{FatouChart, PetalKind};
use crate::germ::germ_analyze;
use crate::instances::{self, FatouDisk, Quadruple};
use crate::plm::{assemble, c_pq, circle_expansion_profile, h2_p0_conjugacy_residual};
use crate::render::{self, JuliaTarget, Palette, Viewport};
use crate::straighten::{perone_fixed_multiplier, straighten_estimate};
use num_complex::Complex64 as C64;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

pub const COMMANDS: &[&str] = &["analyze", "fatou", "arc", "verify-plm", "julia", "paramplane", "straighten", "selftest"];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Numerical(#[from] Error),
    #[error("unknown command `{0}`")]
    UnknownCommand(String),
    #[error("output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::UnknownCommand(_) => 2,
            CliError::Numerical(_) | CliError::Output(_) => 3,
        }
    }
}

pub type CliResult = std::result::Result<i32, CliError>;

const PARABOLIC_TOL: f64 = 1e-9;

/// Runs `command`; the returned value is the process exit status.
pub fn run(command: &str, cfg: &JobConfig, threads: Option<usize>, out: &mut dyn Write) -> CliResult {
    match command {
        "analyze" => analyze(cfg, out),
        "fatou" => fatou(cfg, out),
        "arc" => arc(cfg, out),
        "verify-plm" => verify(cfg, out),
        "julia" => julia(cfg, threads, out),
        "paramplane" => paramplane(cfg, threads, out),
        "straighten" => straighten(cfg, out),
        "selftest" => selftest(out),
        other => Err(CliError::UnknownCommand(other.to_string())),
    }
}

fn analyze(cfg: &JobConfig, out: &mut dyn Write) -> CliResult {
    let map = cfg.map()?;
    let fps = map.fixed_points()?;
    for fp in &fps {
        writeln!(
            out,
            "fixed     {:<50} multiplier {:<50} multiplicity {}",
            fp.location.to_string(),
            fmt_c(fp.multiplier),
            fp.algebraic_multiplicity
        )?;
    }
    for c in map.critical_points()? {
        writeln!(out, "critical  {c}")?;
    }
    for fp in fps.iter().filter(|f| (f.multiplier - 1.0).norm() <= PARABOLIC_TOL) {
        let g = germ_analyze(&map, fp.location)?;
        writeln!(out, "parabolic {}", fp.location)?;
        writeln!(out, "  n          {}", g.multiplicity)?;
        writeln!(out, "  a          {}", fmt_c(g.leading_coeff))?;
        writeln!(out, "  c_hat      {}", fmt_c(g.c_hat))?;
        let dirs = |v: &[f64]| v.iter().map(|d| format!("{d:.16e}")).collect::<Vec<_>>().join(" ");
        writeln!(out, "  attracting {}", dirs(&g.attracting_dirs))?;
        writeln!(out, "  repelling  {}", dirs(&g.repelling_dirs))?;
    }
    Ok(0)
}

/// Parabolic fixed point of highest multiplicity.
fn parabolic_point(map: &MapSpec) -> Result<Point, CliError> {
    map.fixed_points()?
        .into_iter()
        .filter(|f| (f.multiplier - 1.0).norm() <= PARABOLIC_TOL)
        .max_by_key(|f| f.algebraic_multiplicity)
        .map(|f| f.location)
        .ok_or_else(|| Error::Structural("map has no parabolic fixed point".into()).into())
}

fn viewport(cfg: &JobConfig, center: C64, width: f64, px: usize) -> Result<Viewport, CliError> {
    let c = cfg.complex("center", center)?;
    let w = cfg.real("width", width)?;
    let px = cfg.int("px", px)?;
    Ok(Viewport::square(c, w, px)?)
}

fn fatou(cfg: &JobConfig, out: &mut dyn Write) -> CliResult {
    let map = cfg.map()?;
    let base = parabolic_point(&map)?;
    let germ = Arc::new(germ_analyze(&map, base)?);
    let mut chart = FatouChart::new(&map, germ, PetalKind::Attracting, 0)?;
    if let MapSpec::PerOne(a) = map {
        chart = chart.with_anchor(a + 2.0, C64::new(1.0, 0.0))?;
    }
    let vp = viewport(cfg, base.finite().unwrap_or_default(), 4.0, 32)?;
    writeln!(out, "z_re,z_im,phi_re,phi_im,residual")?;
    for j in 0..vp.px_h {
        for i in 0..vp.px_w {
            let z = vp.pixel(i, j);
            let (Ok(phi), Ok(next)) = (chart.eval(z), chart.eval(map.eval_c(z))) else { continue };
            let res = (next - phi - 1.0).norm();
            writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", z.re, z.im, phi.re, phi.im, res)?;
        }
    }
    Ok(0)
}

/// The built-in parabolic-like restriction for the configured map.
pub fn instance(cfg: &JobConfig) -> Result<Quadruple, CliError> {
    let map = cfg.map()?;
    let unsupported = || Error::Structural(format!("no built-in parabolic-like restriction for {map:?}"));
    match &map {
        MapSpec::HTwo => {
            let eps = cfg.real("epsilon", 0.25)?;
            let mut q = instances::example1(eps)?;
            let mp = cfg.complex_opt("m_plus")?;
            let mm = cfg.complex_opt("m_minus")?;
            if mp.is_some() || mm.is_some() {
                let (plus, minus) = instances::h2_repelling_charts()?;
                let m_plus = match mp {
                    Some(m) => m,
                    None => instances::example1_m_plus(&plus, 1.0 + eps, instances::EXAMPLE1_IM_M)?,
                };
                let m_minus = mm.unwrap_or(m_plus.conj());
                q.gamma = build_dividing_arc(&plus.germ, &plus, &minus, m_plus, m_minus, 2, DEFAULT_LEVELS)?;
            }
            Ok(q)
        }
        MapSpec::CubicC(a) if (*a - C64::new(0.0, 1.0)).norm() < 1e-12 => Ok(instances::example2()?),
        MapSpec::QuadIter { c, q: 3 } if (*c - c_pq(1, 3)).norm() < 1e-12 => Ok(instances::example3()?),
        MapSpec::PerOne(a) if *a != C64::new(0.0, 0.0) => Ok(instances::perone_restriction(*a, FatouDisk::default())?.quad),
        _ => Err(unsupported().into()),
    }
}

fn arc(cfg: &JobConfig, out: &mut dyn Write) -> CliResult {
    let q = instance(cfg)?;
    writeln!(out, "t,z_re,z_im,residual")?;
    let res = arc_residuals(&q.map, &q.gamma);
    for ((t, z), r) in q.gamma.params.iter().zip(&q.gamma.points).zip(res) {
        let r = r.map_or("nan".to_string(), |r| format!("{r:.16e}"));
        writeln!(out, "{t:.16e},{:.16e},{:.16e},{r}", z.re, z.im)?;
    }
    Ok(0)
}

fn verify(cfg: &JobConfig, out: &mut dyn Write) -> CliResult {
    let q = instance(cfg)?;
    let (_, report) = assemble(&q.map, q.u_prime, q.u, q.gamma)?;
    writeln!(out, "{report}")?;
    Ok(if report.all_pass() { 0 } else { 1 })
}

fn write_image(path: &str, grid: &render::ClassGrid, out: &mut dyn Write) -> CliResult {
    let p = Path::new(path);
    if p.extension().is_some_and(|e| e == "pgm") {
        render::write_pgm(grid, p)?;
    } else {
        render::write_ppm(&grid.to_image(Palette::default()), p)?;
    }
    writeln!(out, "wrote {path}")?;
    Ok(0)
}

fn julia(cfg: &JobConfig, threads: Option<usize>, out: &mut dyn Write) -> CliResult {
    let max_iter = cfg.int("max_iter", render::JULIA_MAX_ITER)?;
    let path = cfg.get("out").unwrap_or("julia.ppm").to_string();
    let grid = match cfg.map()? {
        MapSpec::PerOne(a) => {
            let vp = viewport(cfg, C64::new(0.0, 0.0), 8.0, 512)?;
            render::classify_julia(&JuliaTarget::PerOne(a), &vp, max_iter, threads)?
        }
        _ => {
            let q = instance(cfg)?;
            let (plm, report) = assemble(&q.map, q.u_prime, q.u, q.gamma)?;
            let plm = plm.ok_or_else(|| Error::Structural(format!("restriction is not parabolic-like:\n{report}")))?;
            let (lo, hi) = plm.u_prime.bbox();
            let side = (hi.re - lo.re).max(hi.im - lo.im) * 1.05;
            let vp = viewport(cfg, (lo + hi) * 0.5, side, 512)?;
            render::classify_julia(&JuliaTarget::Plm(&plm), &vp, max_iter, threads)?
        }
    };
    write_image(&path, &grid, out)
}

fn paramplane(cfg: &JobConfig, threads: Option<usize>, out: &mut dyn Write) -> CliResult {
    let max_iter = cfg.int("max_iter", render::PARAM_MAX_ITER)?;
    let path = cfg.get("out").unwrap_or("paramplane.ppm").to_string();
    let vp = viewport(cfg, C64::new(0.0, 0.0), 8.0, 512)?;
    let grid = render::classify_paramplane(&vp, max_iter, threads)?;
    write_image(&path, &grid, out)
}

fn straighten(cfg: &JobConfig, out: &mut dyn Write) -> CliResult {
    let q = instance(cfg)?;
    let (plm, report) = assemble(&q.map, q.u_prime, q.u, q.gamma)?;
    let Some(plm) = plm else {
        writeln!(out, "{report}")?;
        return Ok(1);
    };
    writeln!(out, "{}", straighten_estimate(&plm)?)?;
    Ok(0)
}

fn selftest(out: &mut dyn Write) -> CliResult {
    let mut ok = true;
    let mut check = |name: &str, pass: bool, detail: String| -> std::io::Result<()> {
        ok &= pass;
        writeln!(out, "{} {name:<28} {detail}", if pass { "PASS" } else { "FAIL" })
    };
    let r = h2_p0_conjugacy_residual(10_000, 1);
    check("h2-p0 conjugacy", r < 1e-12, format!("max residual {r:.16e}"))?;
    let prof = circle_expansion_profile(10_000)?;
    let near = |t: f64| t.min(std::f64::consts::TAU - t).min((t - std::f64::consts::PI).abs()) <= 1e-3;
    let pass = (prof.min_modulus - 1.0).abs() <= 1e-9 && prof.argmin_angles.iter().all(|&t| near(t));
    check("h2 expansion profile", pass, format!("min |h2'| = {:.16e}", prof.min_modulus))?;
    let d = (MapSpec::HTwo.eval_deriv_c(C64::new(0.0, 1.0)).1.norm() - 4.0).abs();
    check("|h2'(i)| = 4", d <= 1e-12, format!("error {d:.16e}"))?;
    let c = c_pq(1, 3);
    let e = (c - C64::new(-1.0, 3.0 * 3f64.sqrt()) / 8.0).norm();
    check("c_1/3", e <= 1e-12, format!("error {e:.16e}"))?;
    let m = perone_fixed_multiplier(C64::new(1.0, 0.0))?;
    check("Per1 multiplier at A = 1", m.norm() <= 1e-15, fmt_c(m))?;
    Ok(if ok { 0 } else { 1 })
}
