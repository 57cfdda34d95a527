//! Polygonal Jordan regions with a uniform-grid index for fast membership,
//! distance and intersection queries.

use crate::dynamics::MapSpec;
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Positive,
    Negative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Outside,
    Boundary,
}

/// Nearest boundary location of a point.
#[derive(Clone, Copy, Debug)]
pub struct Projection {
    pub edge: usize,
    /// Position along the edge in [0, 1].
    pub s: f64,
    pub point: C64,
    pub distance: f64,
}

#[derive(Clone, Debug)]
struct Grid {
    x0: f64,
    y0: f64,
    cw: f64,
    ch: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<u32>>,
    /// Winding number at the centre of each empty cell.
    empty_winding: Vec<i32>,
}

impl Grid {
    fn cx(&self, x: f64) -> usize {
        (((x - self.x0) / self.cw).floor().max(0.0) as usize).min(self.nx - 1)
    }

    fn cy(&self, y: f64) -> usize {
        (((y - self.y0) / self.ch).floor().max(0.0) as usize).min(self.ny - 1)
    }
}

#[derive(Clone, Debug)]
pub struct Region {
    boundary: Vec<C64>,
    orientation: Orientation,
    grid: Grid,
    diameter: f64,
}

fn seg_dist(p: C64, a: C64, b: C64) -> (f64, f64) {
    let d = b - a;
    let l2 = d.norm_sqr();
    let s = if l2 == 0.0 { 0.0 } else { (((p - a) * d.conj()).re / l2).clamp(0.0, 1.0) };
    ((a + d * s - p).norm(), s)
}

fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Proper or touching intersection of segments `ab` and `cd`; returns the
/// parameters along each.
pub fn segment_intersection(a: C64, b: C64, c: C64, d: C64) -> Option<(f64, f64)> {
    let r = b - a;
    let s = d - c;
    let den = cross(r, s);
    if den == 0.0 {
        return None;
    }
    let t = cross(c - a, s) / den;
    let u = cross(c - a, r) / den;
    ((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)).then_some((t, u))
}

impl Region {
    pub fn from_boundary(points: Vec<C64>) -> Result<Region> {
        let mut pts = points;
        if pts.len() > 1 && pts[0] == pts[pts.len() - 1] {
            pts.pop();
        }
        pts.dedup();
        if pts.len() < 3 {
            return Err(Error::Structural("region needs at least three boundary samples".into()));
        }
        if pts.iter().any(|z| !z.is_finite()) {
            return Err(Error::Structural("non-finite boundary sample".into()));
        }
        let n = pts.len();
        let area2: f64 = (0..n).map(|i| cross(pts[i], pts[(i + 1) % n])).sum();
        if area2 == 0.0 {
            return Err(Error::Structural("degenerate boundary".into()));
        }
        let orientation = if area2 > 0.0 { Orientation::Positive } else { Orientation::Negative };
        let grid = build_grid(&pts);
        let diameter = ((grid.nx as f64 * grid.cw).powi(2) + (grid.ny as f64 * grid.ch).powi(2)).sqrt();
        Ok(Region { boundary: pts, orientation, grid, diameter })
    }

    pub fn circle(center: C64, radius: f64, samples: usize) -> Region {
        let pts = (0..samples)
            .map(|k| center + C64::from_polar(radius, std::f64::consts::TAU * k as f64 / samples as f64))
            .collect();
        Region::from_boundary(pts).expect("circle")
    }

    /// Reads one "re im" pair per line; blank lines and `#` comments are skipped.
    pub fn from_file(path: &Path) -> Result<Region> {
        let text = std::fs::read_to_string(path)?;
        let mut pts = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |s: Option<&str>| -> Result<f64> {
                s.and_then(|v| v.parse().ok())
                    .ok_or_else(|| Error::InvalidInput(format!("region file line {}: expected 're im'", i + 1)))
            };
            let re = parse(it.next())?;
            let im = parse(it.next())?;
            pts.push(C64::new(re, im));
        }
        Region::from_boundary(pts)
    }

    pub fn boundary(&self) -> &[C64] {
        &self.boundary
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Lower-left and upper-right corners of the bounding box.
    pub fn bbox(&self) -> (C64, C64) {
        let mut lo = C64::new(f64::INFINITY, f64::INFINITY);
        let mut hi = C64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for z in &self.boundary {
            lo = C64::new(lo.re.min(z.re), lo.im.min(z.im));
            hi = C64::new(hi.re.max(z.re), hi.im.max(z.im));
        }
        (lo, hi)
    }

    /// Deterministic interior points at least `margin` from the boundary.
    pub fn interior_samples(&self, n: usize, margin: f64, seed: u64) -> Vec<C64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let (lo, hi) = self.bbox();
        let mut out = Vec::with_capacity(n);
        for _ in 0..200 * n.max(1) {
            if out.len() == n {
                break;
            }
            let z = C64::new(rng.gen_range(lo.re..hi.re), rng.gen_range(lo.im..hi.im));
            if self.winding_number(z) != 0 && self.distance_to_boundary(z) > margin {
                out.push(z);
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundary.is_empty()
    }

    fn edge(&self, i: usize) -> (C64, C64) {
        (self.boundary[i], self.boundary[(i + 1) % self.boundary.len()])
    }

    /// Boundary traversed counterclockwise.
    pub fn ccw_boundary(&self) -> Vec<C64> {
        let mut b = self.boundary.clone();
        if self.orientation == Orientation::Negative {
            b.reverse();
        }
        b
    }

    /// Winding number of the boundary (as given) about `p`.
    pub fn winding_number(&self, p: C64) -> i32 {
        let g = &self.grid;
        if p.im < g.y0 || p.im > g.y0 + g.ny as f64 * g.ch || p.re > g.x0 + g.nx as f64 * g.cw {
            return 0;
        }
        let cy = g.cy(p.im);
        let cx0 = if p.re < g.x0 { 0 } else { g.cx(p.re) };
        let cell = cy * g.nx + cx0;
        if p.re >= g.x0 && g.cells[cell].is_empty() {
            return g.empty_winding[cell];
        }
        let mut wn = 0;
        for cx in cx0..g.nx {
            for &e in &g.cells[cy * g.nx + cx] {
                let (a, b) = self.edge(e as usize);
                if (a.im <= p.im) != (b.im <= p.im) {
                    let x = a.re + (p.im - a.im) * (b.re - a.re) / (b.im - a.im);
                    let lo = g.cx(a.re.min(b.re));
                    let hi = g.cx(a.re.max(b.re));
                    if x > p.re && g.cx(x).clamp(lo, hi) == cx {
                        wn += if b.im > a.im { 1 } else { -1 };
                    }
                }
            }
        }
        wn
    }

    /// Edges whose distance to `p` is below `eps`, with those distances.
    fn edges_near(&self, p: C64, eps: f64) -> Vec<(usize, f64, f64)> {
        let g = &self.grid;
        let (i0, i1) = (g.cx(p.re - eps), g.cx(p.re + eps));
        let (j0, j1) = (g.cy(p.im - eps), g.cy(p.im + eps));
        let mut out = Vec::new();
        for j in j0..=j1 {
            for i in i0..=i1 {
                for &e in &g.cells[j * g.nx + i] {
                    let (a, b) = self.edge(e as usize);
                    let (d, s) = seg_dist(p, a, b);
                    if d < eps {
                        out.push((e as usize, d, s));
                    }
                }
            }
        }
        out
    }

    pub fn classify(&self, p: C64, eps: f64) -> Membership {
        if eps > 0.0 && !self.edges_near(p, eps).is_empty() {
            return Membership::Boundary;
        }
        if self.winding_number(p) != 0 {
            Membership::Inside
        } else {
            Membership::Outside
        }
    }

    /// Winding-number membership with ambiguity tolerance equal to the local
    /// sample spacing, capped at 1e-3 of the diameter.
    pub fn contains(&self, p: C64) -> Result<bool> {
        let cap = 1e-3 * self.diameter;
        for (e, d, _) in self.edges_near(p, cap) {
            let (a, b) = self.edge(e);
            if d < (b - a).norm().min(cap) {
                return Err(Error::BoundaryAmbiguous { eps: (b - a).norm().min(cap) });
            }
        }
        Ok(self.winding_number(p) != 0)
    }

    pub fn project(&self, p: C64) -> Projection {
        let g = &self.grid;
        let ci = g.cx(p.re) as i64;
        let cj = g.cy(p.im) as i64;
        let step = g.cw.min(g.ch);
        let offset = {
            let cx = p.re.clamp(g.x0, g.x0 + g.nx as f64 * g.cw);
            let cy = p.im.clamp(g.y0, g.y0 + g.ny as f64 * g.ch);
            (C64::new(cx, cy) - p).norm()
        };
        let mut best = Projection { edge: 0, s: 0.0, point: self.boundary[0], distance: f64::INFINITY };
        let rmax = g.nx.max(g.ny) as i64;
        for r in 0..=rmax {
            for j in (cj - r)..=(cj + r) {
                if j < 0 || j >= g.ny as i64 {
                    continue;
                }
                for i in (ci - r)..=(ci + r) {
                    if i < 0 || i >= g.nx as i64 {
                        continue;
                    }
                    if (i - ci).abs() != r && (j - cj).abs() != r {
                        continue;
                    }
                    for &e in &g.cells[j as usize * g.nx + i as usize] {
                        let (a, b) = self.edge(e as usize);
                        let (d, s) = seg_dist(p, a, b);
                        if d < best.distance {
                            best = Projection { edge: e as usize, s, point: a + (b - a) * s, distance: d };
                        }
                    }
                }
            }
            if best.distance <= r as f64 * step - offset {
                break;
            }
        }
        best
    }

    pub fn distance_to_boundary(&self, p: C64) -> f64 {
        self.project(p).distance
    }

    /// First crossing of segment `a -> b` with the boundary: (segment parameter, edge, edge parameter).
    pub fn first_crossing(&self, a: C64, b: C64) -> Option<(f64, usize, f64)> {
        let g = &self.grid;
        let (i0, i1) = (g.cx(a.re.min(b.re)), g.cx(a.re.max(b.re)));
        let (j0, j1) = (g.cy(a.im.min(b.im)), g.cy(a.im.max(b.im)));
        let mut best: Option<(f64, usize, f64)> = None;
        for j in j0..=j1 {
            for i in i0..=i1 {
                for &e in &g.cells[j * g.nx + i] {
                    let (c, d) = self.edge(e as usize);
                    if let Some((t, u)) = segment_intersection(a, b, c, d) {
                        if best.is_none_or(|bb| t < bb.0) {
                            best = Some((t, e as usize, u));
                        }
                    }
                }
            }
        }
        best
    }

    /// True when no two non-adjacent edges intersect.
    pub fn is_simple(&self) -> bool {
        let n = self.boundary.len();
        let g = &self.grid;
        for cell in &g.cells {
            for (k, &e1) in cell.iter().enumerate() {
                for &e2 in &cell[k + 1..] {
                    let (i, j) = (e1 as usize, e2 as usize);
                    if (i + 1) % n == j || (j + 1) % n == i || i == j {
                        continue;
                    }
                    let (a, b) = self.edge(i);
                    let (c, d) = self.edge(j);
                    if segment_intersection(a, b, c, d).is_some() {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Linear subdivision so no edge exceeds `max_step`.
    pub fn densified(&self, max_step: f64) -> Region {
        let n = self.boundary.len();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let (a, b) = self.edge(i);
            let m = ((b - a).norm() / max_step).ceil().max(1.0) as usize;
            for k in 0..m {
                out.push(a + (b - a) * (k as f64 / m as f64));
            }
        }
        Region::from_boundary(out).expect("densified region")
    }

    /// Splits along an arc whose endpoints lie on the boundary. Returns the
    /// pieces to the left and to the right of the arc's direction of travel.
    pub fn split(&self, arc: &[C64], tol: f64) -> Result<(Region, Region)> {
        if arc.len() < 2 {
            return Err(Error::Structural("splitting arc needs two points".into()));
        }
        let ccw = Region::from_boundary(self.ccw_boundary())?;
        let n = ccw.boundary.len();
        let start = ccw.project(arc[0]);
        let end = ccw.project(arc[arc.len() - 1]);
        if start.distance > tol || end.distance > tol {
            return Err(Error::Structural(format!(
                "arc endpoints are {:e} and {:e} from the boundary",
                start.distance, end.distance
            )));
        }
        // vertices strictly after location `from` up to and including the edge of `to`
        let path = |from: &Projection, to: &Projection| -> Vec<C64> {
            let mut v = Vec::new();
            let same = from.edge == to.edge && from.s <= to.s;
            if same {
                return v;
            }
            let mut e = (from.edge + 1) % n;
            loop {
                v.push(ccw.boundary[e]);
                if e == to.edge {
                    break;
                }
                e = (e + 1) % n;
            }
            v
        };
        let inner = &arc[1..arc.len() - 1];
        let mut left = vec![start.point];
        left.extend_from_slice(inner);
        left.push(end.point);
        left.extend(path(&end, &start));
        let mut right = vec![start.point];
        right.extend(path(&start, &end));
        right.push(end.point);
        right.extend(inner.iter().rev());
        Ok((Region::from_boundary(left)?, Region::from_boundary(right)?))
    }
}

fn build_grid(pts: &[C64]) -> Grid {
    let n = pts.len();
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in pts {
        xmin = xmin.min(p.re);
        xmax = xmax.max(p.re);
        ymin = ymin.min(p.im);
        ymax = ymax.max(p.im);
    }
    let pad = 1e-9 * ((xmax - xmin) + (ymax - ymin)).max(1e-300);
    xmin -= pad;
    ymin -= pad;
    xmax += pad;
    ymax += pad;
    let side = ((n as f64).sqrt().ceil() as usize).clamp(4, 1024);
    let (w, h) = (xmax - xmin, ymax - ymin);
    let (nx, ny) = if w >= h {
        (side, ((side as f64 * h / w).ceil() as usize).clamp(1, side))
    } else {
        (((side as f64 * w / h).ceil() as usize).clamp(1, side), side)
    };
    let mut g = Grid {
        x0: xmin,
        y0: ymin,
        cw: w / nx as f64,
        ch: h / ny as f64,
        nx,
        ny,
        cells: vec![Vec::new(); nx * ny],
        empty_winding: vec![0; nx * ny],
    };
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        for j in g.cy(a.im.min(b.im))..=g.cy(a.im.max(b.im)) {
            for k in g.cx(a.re.min(b.re))..=g.cx(a.re.max(b.re)) {
                g.cells[j * nx + k].push(i as u32);
            }
        }
    }
    // winding at empty-cell centres, one sweep per row
    for j in 0..ny {
        let yc = g.y0 + (j as f64 + 0.5) * g.ch;
        let mut crossings: Vec<(f64, i32)> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for k in 0..nx {
            for &e in &g.cells[j * nx + k] {
                if !seen.insert(e) {
                    continue;
                }
                let (a, b) = (pts[e as usize], pts[(e as usize + 1) % n]);
                if (a.im <= yc) != (b.im <= yc) {
                    let x = a.re + (yc - a.im) * (b.re - a.re) / (b.im - a.im);
                    crossings.push((x, if b.im > a.im { 1 } else { -1 }));
                }
            }
        }
        for k in 0..nx {
            if g.cells[j * nx + k].is_empty() {
                let xc = g.x0 + (k as f64 + 0.5) * g.cw;
                g.empty_winding[j * nx + k] = crossings.iter().filter(|c| c.0 > xc).map(|c| c.1).sum();
            }
        }
    }
    g
}

/// Number of solutions of `f(z) = w` inside the region, by the trapezoid
/// rule on `G'/G` with `G = num - w den`, refined until integral.
pub fn map_degree_on(map: &MapSpec, domain: &Region, w: C64) -> Result<i64> {
    let (num, den) = map.rational();
    let g = num.sub(&den.scale(w));
    let dg = g.derivative();
    let scale = g.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let pts = domain.ccw_boundary();
    let n = pts.len();
    let integrand = |z: C64| -> Option<C64> {
        let v = g.eval(z);
        if v.norm() <= 1e-13 * g.abs_eval(z).max(scale * 1e-300) {
            return None;
        }
        Some(dg.eval(z) / v)
    };
    let mut prev: Option<f64> = None;
    let mut sub = 1usize;
    loop {
        let mut total = C64::new(0.0, 0.0);
        for i in 0..n {
            let a = pts[i];
            let b = pts[(i + 1) % n];
            let h = (b - a) / sub as f64;
            let mut fa = integrand(a).ok_or(Error::OnBoundaryImage)?;
            for k in 1..=sub {
                let z = a + h * k as f64;
                let fb = integrand(z).ok_or(Error::OnBoundaryImage)?;
                total += 0.5 * (fa + fb) * h;
                fa = fb;
            }
        }
        let v = total.im / std::f64::consts::TAU;
        let near = (v - v.round()).abs() < 0.05;
        let stable = prev.is_some_and(|p| (p - v).abs() < 0.02);
        if near && (stable || sub >= 64) {
            return Ok(v.round() as i64);
        }
        if sub >= 64 {
            return Err(Error::NonIntegralDegree(v));
        }
        prev = Some(v);
        sub *= 2;
    }
}
