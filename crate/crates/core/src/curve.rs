//! The algebraic curve `Z = {f2 = 0}`: sampling, branch tracking,
//! monodromy, chart atlas, line crossings and Bézout counts.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{dist2, BivariatePoly, Point2, UnivariatePoly, C64, ZERO};
use crate::resultant::resultant_in_w;
use crate::roots;
use crate::weierstrass::Frame;

/// Points of `Z` inside a ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSampleCloud {
    pub points: Vec<Point2>,
    /// The fibre parameter each point was solved from (`w` for fibres
    /// `f2(·, w) = 0`, `z` for fibres `f2(z, ·) = 0`).
    pub source_ws: Vec<C64>,
}

/// Polar grid of `n × n` nodes on the closed disk `D(c, r)`, ring `|· - c| = r` included.
pub(crate) fn polar_grid(c: C64, r: f64, n: usize) -> Vec<C64> {
    let n = n.max(2);
    let mut out = Vec::with_capacity(n * n);
    out.push(c);
    for i in 1..n {
        let rad = r * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let t = std::f64::consts::TAU * (j as f64 + 0.5 * (i % 2) as f64) / n as f64;
            out.push(c + C64::from_polar(rad, t));
        }
    }
    out
}

/// Roots of `f2(·, w)` at each `w`, and of `f2(z, ·)` at each `z` of a
/// polar grid, filtered to the closed ball `B(center, radius)`.
pub fn sample_curve(f2: &BivariatePoly, center: Point2, radius: f64, grid_n: usize) -> CurveSampleCloud {
    let ws = polar_grid(center[1], radius, grid_n);
    let zs = polar_grid(center[0], radius, grid_n);
    let from_w: Vec<(Point2, C64)> = ws
        .par_iter()
        .flat_map_iter(|&w| {
            let p = f2.in_z(w);
            let rs = if p.degree() >= 1 { roots::roots(&p, 1e-9).unwrap_or_default() } else { Vec::new() };
            rs.into_iter().map(move |z| ([z, w], w))
        })
        .collect();
    let from_z: Vec<(Point2, C64)> = zs
        .par_iter()
        .flat_map_iter(|&z| {
            let p = f2.in_w(z);
            let rs = if p.degree() >= 1 { roots::roots(&p, 1e-9).unwrap_or_default() } else { Vec::new() };
            rs.into_iter().map(move |w| ([z, w], z))
        })
        .collect();
    let (points, source_ws) = from_w
        .into_iter()
        .chain(from_z)
        .filter(|(v, _)| dist2(*v, center) <= radius)
        .unzip();
    CurveSampleCloud { points, source_ws }
}

const MAX_SPLITS: usize = 40;

fn fibre_roots(f2: &BivariatePoly, w: C64) -> Vec<C64> {
    let p = f2.in_z(w);
    if p.degree() < 1 {
        return Vec::new();
    }
    roots::roots(&p, roots::DEFAULT_TOL).unwrap_or_default()
}

/// Nearest-neighbour matching of `prev` into `next`, accepted only when each
/// match is unambiguous (second-nearest more than twice as far) and injective.
fn match_roots(prev: &[C64], next: &[C64]) -> Option<Vec<C64>> {
    if next.len() < prev.len() {
        return None;
    }
    let mut used = vec![false; next.len()];
    let mut out = Vec::with_capacity(prev.len());
    for &z in prev {
        let (mut i1, mut d1, mut d2) = (usize::MAX, f64::INFINITY, f64::INFINITY);
        for (i, &r) in next.iter().enumerate() {
            let d = (r - z).norm();
            if d < d1 {
                d2 = d1;
                d1 = d;
                i1 = i;
            } else if d < d2 {
                d2 = d;
            }
        }
        if i1 == usize::MAX || used[i1] || !(d2 > 2.0 * d1) {
            return None;
        }
        used[i1] = true;
        out.push(next[i1]);
    }
    Some(out)
}

fn advance(f2: &BivariatePoly, a: C64, b: C64, cur: &[C64], depth: usize) -> Result<Vec<C64>> {
    if let Some(m) = match_roots(cur, &fibre_roots(f2, b)) {
        return Ok(m);
    }
    if depth >= MAX_SPLITS {
        return Err(Error::CollisionUnresolved { w: b });
    }
    let mid = (a + b) * 0.5;
    let half = advance(f2, a, mid, cur, depth + 1)?;
    advance(f2, mid, b, &half, depth + 1)
}

/// Continue the zeros `z_init` of `f2(·, w_path[0])` along the path.
/// An empty `z_init` tracks every zero of the first fibre.
pub fn track_branches(f2: &BivariatePoly, w_path: &[C64], z_init: &[C64]) -> Result<Vec<Vec<C64>>> {
    let Some(&w0) = w_path.first() else {
        return Ok(Vec::new());
    };
    let start = if z_init.is_empty() {
        fibre_roots(f2, w0)
    } else {
        match_roots(z_init, &fibre_roots(f2, w0)).ok_or(Error::CollisionUnresolved { w: w0 })?
    };
    let mut out = Vec::with_capacity(w_path.len());
    out.push(start);
    for pair in w_path.windows(2) {
        let next = advance(f2, pair[0], pair[1], out.last().expect("non-empty"), 0)?;
        out.push(next);
    }
    Ok(out)
}

/// Monodromy of the fibre zeros around a loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monodromy {
    pub w0: C64,
    pub loop_radius: f64,
    /// Zeros at `w0 + loop_radius`.
    pub start_roots: Vec<C64>,
    /// `permutation[i]`: index of the start zero reached from start zero `i`.
    pub permutation: Vec<usize>,
    pub cycles: Vec<Vec<usize>>,
    pub orders: Vec<usize>,
    pub k: usize,
}

pub const LOOP_NODES: usize = 128;

/// Cycle decomposition of the permutation induced on the zeros of
/// `f2(·, w)` by one turn around `|w - singular_w| = loop_radius`.
pub fn branch_order(f2: &BivariatePoly, singular_w: C64, loop_radius: f64) -> Result<Monodromy> {
    if !(loop_radius > 0.0) {
        return Err(Error::InvalidArgument("loop radius must be positive".into()));
    }
    let path: Vec<C64> = (0..=LOOP_NODES)
        .map(|k| singular_w + C64::from_polar(loop_radius, TAU * k as f64 / LOOP_NODES as f64))
        .collect();
    let tracked = track_branches(f2, &path, &[])?;
    let start = tracked[0].clone();
    let end = tracked.last().expect("non-empty");
    let mut permutation = Vec::with_capacity(start.len());
    let mut seen = vec![false; start.len()];
    for z in end {
        let j = nearest(&start, *z);
        if seen[j] {
            return Err(Error::CollisionUnresolved { w: path[0] });
        }
        seen[j] = true;
        permutation.push(j);
    }
    let mut cycles = Vec::new();
    let mut visited = vec![false; start.len()];
    for i in 0..start.len() {
        if visited[i] {
            continue;
        }
        let mut cyc = vec![i];
        visited[i] = true;
        let mut j = permutation[i];
        while j != i {
            visited[j] = true;
            cyc.push(j);
            j = permutation[j];
        }
        cycles.push(cyc);
    }
    let orders = cycles.iter().map(|c| c.len()).collect();
    Ok(Monodromy { w0: singular_w, loop_radius, k: start.len(), start_roots: start, permutation, cycles, orders })
}

fn nearest(pts: &[C64], z: C64) -> usize {
    pts.iter()
        .enumerate()
        .min_by(|a, b| (a.1 - z).norm().total_cmp(&(b.1 - z).norm()))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Branch orders of the cycles converging to one point of a fibre.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalMonodromy {
    #[serde(with = "crate::json::point4")]
    pub point: Point2,
    pub orders: Vec<usize>,
    /// Zero count of `f2(·, w0)` near `z0` (multiplicity of the fibre zero).
    pub k: usize,
    pub sum_matches: bool,
}

pub fn local_branch_order(f2: &BivariatePoly, point: Point2, loop_radius: f64) -> Result<LocalMonodromy> {
    let [z0, w0] = point;
    let fibre = f2.in_z(w0);
    if fibre.is_zero() {
        return Err(Error::InvalidArgument("fibre vanishes identically".into()));
    }
    let rs = if fibre.degree() >= 1 { roots::roots(&fibre, roots::DEFAULT_TOL)? } else { Vec::new() };
    let clusters = cluster(&rs, CLUSTER_TOL);
    let far = clusters
        .iter()
        .map(|(c, _)| (c - z0).norm())
        .filter(|&d| d > CLUSTER_TOL * (1.0 + z0.norm()) * 10.0)
        .fold(f64::INFINITY, f64::min);
    let rho = if far.is_finite() { far / 2.0 } else { 1.0 };
    let k = crate::weierstrass::winding_count(&fibre.compose_affine(z0, C64::new(1.0, 0.0)), rho)?;
    let m = branch_order(f2, w0, loop_radius)?;
    let orders: Vec<usize> = m
        .cycles
        .iter()
        .filter(|c| (m.start_roots[c[0]] - z0).norm() < rho)
        .map(|c| c.len())
        .collect();
    let sum: usize = orders.iter().sum();
    Ok(LocalMonodromy { point, orders, k, sum_matches: sum == k })
}

const CLUSTER_TOL: f64 = 1e-3;

/// Single-linkage clusters (mean, size) at relative distance `tol`.
fn cluster(pts: &[C64], tol: f64) -> Vec<(C64, usize)> {
    let n = pts.len();
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in 0..i {
            if (pts[i] - pts[j]).norm() <= tol * (1.0 + pts[i].norm().max(pts[j].norm())) {
                let (a, b) = (label[i], label[j]);
                for l in label.iter_mut() {
                    if *l == a {
                        *l = b;
                    }
                }
            }
        }
    }
    let mut groups: Vec<(usize, C64, usize)> = Vec::new();
    for i in 0..n {
        match groups.iter_mut().find(|g| g.0 == label[i]) {
            Some(g) => {
                g.1 += pts[i];
                g.2 += 1;
            }
            None => groups.push((label[i], pts[i], 1)),
        }
    }
    groups.into_iter().map(|(_, s, c)| (s / c as f64, c)).collect()
}

/// Hadamard-type scale of `Res_z(f, g)` on `|w| = 1`.
fn resultant_scale(f: &BivariatePoly, g: &BivariatePoly) -> f64 {
    let l1 = |p: &BivariatePoly| p.terms().map(|t| t.2.norm()).sum::<f64>();
    l1(f).powi(g.degz().max(0) as i32) * l1(g).powi(f.degz().max(0) as i32)
}

/// `Res_z(f, g)` vanishes identically relative to its natural scale.
pub(crate) fn resultant_vanishes(f: &BivariatePoly, g: &BivariatePoly) -> bool {
    resultant_in_w(f, g).max_abs_coeff() <= 1e-10 * resultant_scale(f, g)
}

fn nonzero_resultant(f: &BivariatePoly, g: &BivariatePoly) -> Result<UnivariatePoly> {
    let r = resultant_in_w(f, g);
    if r.max_abs_coeff() <= 1e-10 * resultant_scale(f, g) {
        return Err(Error::CommonFactor);
    }
    Ok(r.trim_relative(1e-12))
}

/// `Res_z(f2, ∂_z f2)` as a polynomial in `w`.
pub fn discriminant(f2: &BivariatePoly) -> Result<UnivariatePoly> {
    if f2.degz() < 1 && f2.degw() < 1 {
        return Err(Error::NotACurve);
    }
    if f2.degz() < 1 {
        return Ok(UnivariatePoly::constant(C64::new(1.0, 0.0)));
    }
    nonzero_resultant(f2, &f2.partial_z())
}

/// Zeros of the discriminant and of the leading `z`-coefficient, clustered.
pub fn discriminant_points(f2: &BivariatePoly) -> Result<Vec<C64>> {
    let d = discriminant(f2)?;
    let mut pts = if d.degree() >= 1 { roots::roots(&d, roots::DEFAULT_TOL)? } else { Vec::new() };
    if f2.degz() >= 1 {
        let lead = f2.z_coeff_poly(f2.degz() as usize);
        if lead.degree() >= 1 {
            pts.extend(roots::roots(&lead, roots::DEFAULT_TOL)?);
        }
    }
    Ok(cluster(&pts, 1e-5).into_iter().map(|c| c.0).collect())
}

/// `w`-values whose whole fibre lies in the curve: `f2(·, w) ≡ 0`.
pub fn horizontal_components(f2: &BivariatePoly) -> Result<Vec<C64>> {
    let rows: Vec<UnivariatePoly> = (0..=f2.degz().max(0) as usize).map(|i| f2.z_coeff_poly(i)).filter(|p| !p.is_zero()).collect();
    let Some(pivot) = rows.iter().min_by_key(|p| p.degree()) else {
        return Err(Error::AllZero);
    };
    if pivot.degree() < 1 {
        return Ok(Vec::new());
    }
    let cands = cluster(&roots::roots(pivot, roots::DEFAULT_TOL)?, 1e-6);
    Ok(cands
        .into_iter()
        .map(|c| c.0)
        .filter(|&w| rows.iter().all(|p| p.eval(w).norm() <= 1e-8 * p.coeffs().iter().map(|c| c.norm()).sum::<f64>() * (1.0 + w.norm()).powi(p.degree() as i32)))
        .collect())
}

/// A point of the curve where the projection to `w` branches.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularPoint {
    #[serde(with = "crate::json::point4")]
    pub point: Point2,
    pub multiplicity: usize,
}

/// Multiple zeros of the fibres over the discriminant points.
pub fn singular_points(f2: &BivariatePoly) -> Result<Vec<SingularPoint>> {
    let mut out = Vec::new();
    for w in discriminant_points(f2)? {
        for (z, m) in cluster(&fibre_roots(f2, w), CLUSTER_TOL) {
            if m >= 2 {
                out.push(SingularPoint { point: [z, w], multiplicity: m });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChartKind {
    Regular,
    Puiseux,
}

/// A branch of the curve parametrised over the unit disk: in frame
/// coordinates `u ↦ (b_z + ζ(u), b_w + ε u^p)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchChart {
    pub kind: ChartKind,
    #[serde(with = "crate::json::point4")]
    pub base_point: Point2,
    pub p: usize,
    pub epsilon: f64,
    /// `max |ζ|` over the grid.
    pub delta: f64,
    pub frame: Frame,
    pub grid: Vec<C64>,
    pub zeta_samples: Vec<C64>,
    /// `max |f2| / scale` over the grid points.
    pub residual: f64,
}

impl BranchChart {
    fn base_local(&self) -> Point2 {
        self.frame.to_local(self.base_point)
    }

    fn w_local(&self, u: C64) -> C64 {
        self.base_local()[1] + u.powu(self.p as u32) * self.epsilon
    }

    pub fn point(&self, idx: usize) -> Point2 {
        let b = self.base_local();
        self.frame.to_world([b[0] + self.zeta_samples[idx], self.w_local(self.grid[idx])])
    }

    pub fn points(&self) -> Vec<Point2> {
        (0..self.grid.len()).map(|i| self.point(i)).collect()
    }

    /// Curve points at the parameters `us`, continued from the grid node
    /// nearest to `us[0]`.
    pub fn trace_path(&self, f2: &BivariatePoly, us: &[C64]) -> Result<Vec<Point2>> {
        let Some(&u0) = us.first() else {
            return Ok(Vec::new());
        };
        let fl = self.frame.pull_back(f2);
        let b = self.base_local();
        let k = nearest(&self.grid, u0);
        let uk = self.grid[k];
        let mut params: Vec<C64> = (0..16).map(|s| uk + (u0 - uk) * (s as f64 / 16.0)).collect();
        let lead = params.len();
        params.extend_from_slice(us);
        let ws: Vec<C64> = params.iter().map(|&u| self.w_local(u)).collect();
        let tracked = track_branches(&fl, &ws, &[b[0] + self.zeta_samples[k]])?;
        Ok(tracked[lead..]
            .iter()
            .zip(&ws[lead..])
            .map(|(z, &w)| self.frame.to_world([z[0], w]))
            .collect())
    }

    pub fn locate(&self, f2: &BivariatePoly, u: C64) -> Result<Point2> {
        Ok(self.trace_path(f2, &[u])?[0])
    }
}

fn chart_residual(f2: &BivariatePoly, pts: &[Point2]) -> f64 {
    pts.iter().map(|&v| f2.eval_at(v).norm() / f2.scale_at(v)).fold(0.0, f64::max)
}

fn finish_chart(f2: &BivariatePoly, kind: ChartKind, frame: Frame, base_local: Point2, p: usize, epsilon: f64, grid: Vec<C64>, zeta: Vec<C64>) -> BranchChart {
    let mut c = BranchChart {
        kind,
        base_point: frame.to_world(base_local),
        p,
        epsilon,
        delta: zeta.iter().map(|z| z.norm()).fold(0.0, f64::max),
        frame,
        grid,
        zeta_samples: zeta,
        residual: 0.0,
    };
    c.residual = chart_residual(f2, &c.points());
    c
}

fn ring_radius(i: usize, n: usize) -> f64 {
    i as f64 / (n - 1) as f64
}

fn ring_angle(i: usize, j: usize, n: usize) -> f64 {
    TAU * (j as f64 + 0.5 * (i % 2) as f64) / n as f64
}

/// Regular chart of the branch through `base`, graph over `w` on `D(base_w, ε)`.
pub fn regular_chart(f2: &BivariatePoly, base: Point2, epsilon: f64, grid_n: usize) -> Result<BranchChart> {
    regular_chart_in(f2, Frame::identity(), base, epsilon, grid_n)
}

fn regular_chart_in(f2: &BivariatePoly, frame: Frame, base: Point2, epsilon: f64, grid_n: usize) -> Result<BranchChart> {
    let n = grid_n.max(2);
    let fl = frame.pull_back(f2);
    let b = frame.to_local(base);
    let start = match_roots(&[b[0]], &fibre_roots(&fl, b[1])).ok_or(Error::CollisionUnresolved { w: b[1] })?[0];
    let b = [start, b[1]];
    let grid = polar_grid(ZERO, 1.0, n);
    let mut zeta = vec![ZERO; grid.len()];
    for parity in 0..2 {
        for j in 0..n {
            let ang = TAU * (j as f64 + 0.5 * parity as f64) / n as f64;
            let rings: Vec<usize> = (1..n).filter(|i| i % 2 == parity).collect();
            if rings.is_empty() {
                continue;
            }
            let mut ws = vec![b[1]];
            for &i in &rings {
                ws.push(b[1] + C64::from_polar(ring_radius(i, n) * epsilon, ang));
            }
            let tr = track_branches(&fl, &ws, &[start])?;
            for (t, &i) in rings.iter().enumerate() {
                zeta[1 + (i - 1) * n + j] = tr[t + 1][0] - start;
            }
        }
    }
    Ok(finish_chart(f2, ChartKind::Regular, frame, b, 1, epsilon, grid, zeta))
}

/// Chart of the cycle of length `p` through `start_root` (a zero of the
/// fibre at `w = b_w + ε`), centred at the singular point `base`.
fn loop_chart(f2: &BivariatePoly, base: Point2, start_root: C64, p: usize, epsilon: f64, grid_n: usize) -> Result<BranchChart> {
    let n = grid_n.max(2);
    let [bz, bw] = base;
    let w_of = |u: C64| bw + u.powu(p as u32) * epsilon;
    let angles: Vec<C64> = (0..=2 * n).map(|j| C64::from_polar(1.0, TAU * j as f64 / (2 * n) as f64)).collect();
    let circle = track_branches(f2, &angles.iter().map(|&u| w_of(u)).collect::<Vec<_>>(), &[start_root])?;
    let grid = polar_grid(ZERO, 1.0, n);
    let mut zeta = vec![ZERO; grid.len()];
    for j2 in 0..2 * n {
        let parity = j2 % 2;
        let j = j2 / 2;
        let rings: Vec<usize> = (1..n).rev().filter(|i| i % 2 == parity).collect();
        if rings.is_empty() {
            continue;
        }
        let ang = ring_angle(parity, j, n);
        let mut ws = vec![w_of(angles[j2])];
        ws.extend(rings.iter().map(|&i| w_of(C64::from_polar(ring_radius(i, n), ang))));
        let tr = track_branches(f2, &ws, &[circle[j2][0]])?;
        for (t, &i) in rings.iter().enumerate() {
            zeta[1 + (i - 1) * n + j] = tr[t + 1][0] - bz;
        }
    }
    let kind = if p == 1 { ChartKind::Regular } else { ChartKind::Puiseux };
    Ok(finish_chart(f2, kind, Frame::identity(), base, p, epsilon, grid, zeta))
}

/// Charts covering the curve inside the ball `B(center, radius)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atlas {
    pub charts: Vec<BranchChart>,
    pub discriminant_points: Vec<C64>,
    pub singular_points: Vec<SingularPoint>,
    pub horizontal_lines: Vec<C64>,
    /// Branches whose continuation failed (they leave every bounded region).
    pub skipped: usize,
}

pub fn build_atlas(f2: &BivariatePoly, center: Point2, radius: f64, grid_n: usize) -> Result<Atlas> {
    if f2.degz() < 1 && f2.degw() < 1 {
        return Err(Error::NotACurve);
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument("region radius must be positive".into()));
    }
    let [c0, c1] = center;
    let horizontal = horizontal_components(f2)?;
    let mut charts = Vec::new();
    let mut skipped = 0;
    let swap = Frame::identity().swapped();
    let grid = polar_grid(ZERO, 1.0, grid_n.max(2));
    for &w in &horizontal {
        let d = (w - c1).norm();
        if d > radius {
            continue;
        }
        let eps = (radius * radius - d * d).sqrt().max(radius * 1e-3);
        let zeta = vec![ZERO; grid.len()];
        charts.push(finish_chart(f2, ChartKind::Regular, swap, [w, c0], 1, eps, grid.clone(), zeta));
    }
    if f2.degz() < 1 {
        return Ok(Atlas { charts, discriminant_points: Vec::new(), singular_points: Vec::new(), horizontal_lines: horizontal, skipped });
    }
    let disc = discriminant_points(f2)?;
    let reach = 2.0 * radius;
    let near: Vec<C64> = disc.iter().copied().filter(|w| (w - c1).norm() <= reach).collect();
    let singular: Vec<SingularPoint> = singular_points(f2)?.into_iter().filter(|s| (s.point[1] - c1).norm() <= reach).collect();
    let keep = |v: Point2| dist2(v, center) <= reach;

    if near.is_empty() {
        for z in fibre_roots(f2, c1) {
            if keep([z, c1]) {
                match regular_chart(f2, [z, c1], radius * 1.01, grid_n) {
                    Ok(c) => charts.push(c),
                    Err(_) => skipped += 1,
                }
            }
        }
        return Ok(Atlas { charts, discriminant_points: disc, singular_points: singular, horizontal_lines: horizontal, skipped });
    }

    // charts at the branch points: one per cycle on D(w_j, ε_j/8)
    let mut local_radius = Vec::with_capacity(near.len());
    for (a, &wj) in near.iter().enumerate() {
        let sep = near.iter().enumerate().filter(|(b, _)| *b != a).map(|(_, w)| (w - wj).norm()).fold(4.0 * radius, f64::min);
        let eps = sep / 8.0;
        local_radius.push(eps);
        let m = match branch_order(f2, wj, eps) {
            Ok(m) => m,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        let fibre = cluster(&fibre_roots(f2, wj), CLUSTER_TOL);
        for cyc in &m.cycles {
            let start = m.start_roots[cyc[0]];
            let base_z = fibre
                .iter()
                .map(|c| c.0)
                .min_by(|a, b| (a - start).norm().total_cmp(&(b - start).norm()))
                .unwrap_or(start);
            if !keep([base_z, wj]) {
                continue;
            }
            match loop_chart(f2, [base_z, wj], start, cyc.len(), eps, grid_n) {
                Ok(c) if c.residual <= 1e-8 => charts.push(c),
                _ => skipped += 1,
            }
        }
    }

    // regular charts on a square grid of w-centres outside those disks
    let min_local = local_radius.iter().copied().fold(f64::INFINITY, f64::min);
    let h = (min_local / 2.2).clamp(radius / 8.0, radius / 2.0);
    let steps = (radius / h).ceil() as i64 + 1;
    for a in -steps..=steps {
        for b in -steps..=steps {
            let wc = c1 + C64::new(a as f64 * h, b as f64 * h);
            let reach_c = 0.75 * h;
            if (wc - c1).norm() > radius + reach_c {
                continue;
            }
            if near.iter().zip(&local_radius).any(|(w, r)| (wc - w).norm() + reach_c <= *r) {
                continue;
            }
            let clearance = disc.iter().map(|w| (wc - w).norm()).fold(f64::INFINITY, f64::min);
            let eps = reach_c.min(0.9 * clearance);
            if !(eps > 0.0) {
                continue;
            }
            for z in fibre_roots(f2, wc) {
                if !keep([z, wc]) {
                    continue;
                }
                match regular_chart(f2, [z, wc], eps, grid_n) {
                    Ok(c) if c.residual <= 1e-8 => charts.push(c),
                    _ => skipped += 1,
                }
            }
        }
    }
    Ok(Atlas { charts, discriminant_points: disc, singular_points: singular, horizontal_lines: horizontal, skipped })
}

/// Sign changes of `Im(e^{-iθ} g)` along a real segment of a chart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub count: usize,
    /// A sample vanished without a sign change around it.
    pub tangential: bool,
    /// Every sample lies on the line.
    pub on_line: bool,
    /// `(deg f)^2 deg g`
    pub bound: usize,
}

pub fn line_crossing_count(
    f: &BivariatePoly,
    g: &BivariatePoly,
    chart: &BranchChart,
    theta: f64,
    xi_range: (f64, f64),
    n_samples: usize,
) -> Result<CrossingReport> {
    if chart.kind != ChartKind::Regular {
        return Err(Error::InvalidArgument("line crossings need a regular chart".into()));
    }
    let (a, b) = xi_range;
    if !(a < b) || n_samples < 2 {
        return Err(Error::InvalidArgument("need a < b and at least two samples".into()));
    }
    let mut us: Vec<C64> = (0..=16).map(|s| C64::new(a * s as f64 / 16.0, 0.0)).collect();
    let lead = us.len();
    us.extend((0..n_samples).map(|k| C64::new(a + (b - a) * k as f64 / (n_samples - 1) as f64, 0.0)));
    let pts = chart.trace_path(f, &us)?;
    let rot = C64::from_polar(1.0, -theta);
    let vals: Vec<(f64, f64)> = pts[lead..]
        .iter()
        .map(|&v| ((rot * g.eval_at(v)).im, g.scale_at(v)))
        .collect();
    let zero = |(h, s): (f64, f64)| h.abs() <= 1e-10 * s;
    let on_line = vals.iter().all(|&v| zero(v));
    let mut count = 0;
    let mut tangential = false;
    let mut last: Option<f64> = None;
    let mut pending_zero = false;
    for &v in &vals {
        if zero(v) {
            pending_zero = true;
            continue;
        }
        let s = v.0.signum();
        if let Some(l) = last {
            if l != s {
                count += 1;
            } else if pending_zero {
                tangential = true;
            }
        }
        pending_zero = false;
        last = Some(s);
    }
    let df = f.total_degree().max(0) as usize;
    let dg = g.total_degree().max(0) as usize;
    Ok(CrossingReport { count, tangential: tangential && !on_line, on_line, bound: df * df * dg })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BezoutReport {
    pub count: usize,
    #[serde(with = "point_list")]
    pub solutions: Vec<Point2>,
    /// `deg f1 · deg f2`
    pub bound: usize,
    pub within_bound: bool,
}

mod point_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Point2], s: S) -> std::result::Result<S::Ok, S::Error> {
        let flat: Vec<[f64; 4]> = v.iter().map(|p| [p[0].re, p[0].im, p[1].re, p[1].im]).collect();
        flat.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Point2>, D::Error> {
        let flat = Vec::<[f64; 4]>::deserialize(d)?;
        Ok(flat.into_iter().map(|a| [C64::new(a[0], a[1]), C64::new(a[2], a[3])]).collect())
    }
}

/// Isolated common zeros of `f1, f2` from the zeros of `Res_z(f1, f2)`.
pub fn bezout_count(f1: &BivariatePoly, f2: &BivariatePoly) -> Result<BezoutReport> {
    if f1.is_zero() || f2.is_zero() {
        return Err(Error::CommonFactor);
    }
    let r = nonzero_resultant(f1, f2)?;
    let ws = if r.degree() >= 1 { cluster(&roots::roots(&r, roots::DEFAULT_TOL)?, 1e-5) } else { Vec::new() };
    let mut solutions: Vec<Point2> = Vec::new();
    for (w, _) in ws {
        let (p1, p2) = (f1.in_z(w), f2.in_z(w));
        let pivot = [&p1, &p2].into_iter().filter(|p| p.degree() >= 1).min_by_key(|p| p.degree());
        let Some(pivot) = pivot else { continue };
        let zs = cluster(&roots::roots(pivot, roots::DEFAULT_TOL)?, 1e-5);
        for (z, _) in zs {
            let v = [z, w];
            if f1.eval_at(v).norm() <= 1e-6 * f1.scale_at(v) && f2.eval_at(v).norm() <= 1e-6 * f2.scale_at(v) && !solutions.iter().any(|s| dist2(*s, v) <= 1e-5 * (1.0 + crate::poly::norm2(v))) {
                solutions.push(v);
            }
        }
    }
    let bound = (f1.total_degree().max(0) * f2.total_degree().max(0)) as usize;
    Ok(BezoutReport { count: solutions.len(), within_bound: solutions.len() <= bound, solutions, bound })
}

/// `M(r) - M(μ r)` for `φ = f1 ∘ chart` on circles about `u0` in the chart disk.
pub fn chart_bernstein(f1: &BivariatePoly, f2: &BivariatePoly, chart: &BranchChart, mu: f64, u0: C64, r: f64, nodes: usize) -> Result<f64> {
    if chart.kind != ChartKind::Regular || u0.norm() + r >= 1.0 {
        return Err(Error::InvalidArgument("circle must lie in a regular chart disk".into()));
    }
    let circle_max = |rad: f64| -> Result<f64> {
        let mut us: Vec<C64> = (0..=8).map(|s| u0 + rad * s as f64 / 8.0).collect();
        us.extend((0..=nodes).map(|k| u0 + C64::from_polar(rad, TAU * k as f64 / nodes as f64)));
        let pts = chart.trace_path(f2, &us)?;
        Ok(pts[9..].iter().map(|&v| f1.log_abs(v)).fold(f64::NEG_INFINITY, f64::max))
    };
    Ok(circle_max(r)? - circle_max(mu * r)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use rand::Rng;

    fn bp(t: &[(usize, usize, f64)]) -> BivariatePoly {
        BivariatePoly::from_real_terms(t).unwrap()
    }

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn square_root_branches() {
        let f = bp(&[(2, 0, 1.0), (0, 1, -1.0)]);
        let path: Vec<C64> = (0..=50).map(|k| c(0.01 + 0.99 * k as f64 / 50.0)).collect();
        let tr = track_branches(&f, &path, &[c(0.1), c(-0.1)]).unwrap();
        let end = tr.last().unwrap();
        assert!((end[0] - 1.0).norm() < 1e-10 && (end[1] + 1.0).norm() < 1e-10);
        let zw = bp(&[(1, 1, 1.0)]);
        let tr = track_branches(&zw, &[c(0.5), c(0.7), C64::new(0.1, 0.2)], &[]).unwrap();
        assert!(tr.iter().all(|r| r.len() == 1 && r[0].norm() < 1e-14));
    }

    #[test]
    fn folium_residuals() {
        let f = bp(&[(3, 0, 1.0), (1, 1, -3.0), (0, 3, 1.0)]);
        let disc = discriminant_points(&f).unwrap();
        let mut rng = sampling::rng(4);
        let mut path = vec![C64::new(0.3, 0.4)];
        for _ in 0..40 {
            let last = *path.last().unwrap();
            path.push(last + C64::new(rng.random_range(-0.05..0.05), rng.random_range(-0.05..0.05)));
        }
        assert!(path.iter().all(|w| disc.iter().all(|d| (w - d).norm() > 0.02)));
        let tr = track_branches(&f, &path, &[]).unwrap();
        for (w, zs) in path.iter().zip(&tr) {
            assert_eq!(zs.len(), 3);
            for z in zs {
                assert!(f.eval(*z, *w).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn monodromy_orders() {
        let sq = bp(&[(2, 0, 1.0), (0, 1, -1.0)]);
        assert_eq!(branch_order(&sq, ZERO, 0.5).unwrap().orders, vec![2]);
        let cube = bp(&[(3, 0, 1.0), (0, 1, -1.0)]);
        assert_eq!(branch_order(&cube, ZERO, 0.5).unwrap().orders, vec![3]);
        let two = bp(&[(2, 0, 1.0), (0, 0, -1.0)]);
        let m = branch_order(&two, c(0.3), 0.5).unwrap();
        assert_eq!(m.orders, vec![1, 1]);
        assert_eq!(m.permutation, vec![0, 1]);
        let l = local_branch_order(&cube, [ZERO, ZERO], 0.1).unwrap();
        assert_eq!((l.orders.clone(), l.k, l.sum_matches), (vec![3], 3, true));
    }

    #[test]
    fn local_orders_sum_to_multiplicity() {
        let mut rng = sampling::rng(11);
        let mut checked = 0;
        while checked < 10 {
            let terms: Vec<(usize, usize, f64)> = (0..=3)
                .flat_map(|i| (0..=2).map(move |j| (i, j)))
                .map(|(i, j)| (i, j, if i == 3 && j == 0 { 1.0 } else { 0.0 }))
                .collect();
            let mut f = bp(&terms);
            for i in 0..3 {
                for j in 0..=2 {
                    let t = BivariatePoly::from_terms(&[(i, j, C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))]).unwrap();
                    f = &f + &t;
                }
            }
            let disc = discriminant_points(&f).unwrap();
            for s in singular_points(&f).unwrap() {
                let sep = disc.iter().map(|d| (d - s.point[1]).norm()).filter(|&d| d > 1e-6).fold(1.0, f64::min);
                let l = local_branch_order(&f, s.point, sep / 8.0).unwrap();
                assert!(l.sum_matches, "{l:?}");
                checked += 1;
            }
        }
    }

    #[test]
    fn atlas_examples() {
        let line = bp(&[(1, 0, 1.0), (0, 0, -0.3)]);
        let a = build_atlas(&line, [ZERO, ZERO], 1.0, 6).unwrap();
        assert_eq!(a.charts.len(), 1);
        assert!(a.charts[0].delta < 1e-12);

        let sq = bp(&[(2, 0, 1.0), (0, 1, -1.0)]);
        let a = build_atlas(&sq, [ZERO, ZERO], 0.5, 6).unwrap();
        let puiseux: Vec<_> = a.charts.iter().filter(|c| c.kind == ChartKind::Puiseux).collect();
        assert_eq!(puiseux.len(), 1);
        assert_eq!(puiseux[0].p, 2);
        assert!(a.charts.iter().filter(|c| c.kind == ChartKind::Regular).count() > 1);
        assert!(a.charts.iter().all(|c| c.residual <= 1e-8));

        let zw = bp(&[(1, 1, 1.0)]);
        let a = build_atlas(&zw, [ZERO, ZERO], 0.5, 6).unwrap();
        assert_eq!(a.horizontal_lines.len(), 1);
        assert!(a.charts.iter().all(|c| c.kind == ChartKind::Regular && c.p == 1));
        // both sheets {z = 0} and {w = 0} appear
        let pts: Vec<Point2> = a.charts.iter().flat_map(|c| c.points()).collect();
        assert!(pts.iter().any(|v| v[0].norm() > 0.1 && v[1].norm() < 1e-14));
        assert!(pts.iter().any(|v| v[1].norm() > 0.1 && v[0].norm() < 1e-14));
        assert!(matches!(build_atlas(&BivariatePoly::constant(c(2.0)), [ZERO, ZERO], 1.0, 4), Err(Error::NotACurve)));
    }

    #[test]
    fn puiseux_chart_is_on_curve() {
        let cube = bp(&[(3, 0, 1.0), (0, 1, -1.0), (1, 1, 0.2)]);
        let a = build_atlas(&cube, [ZERO, ZERO], 0.3, 8).unwrap();
        let p = a.charts.iter().find(|c| c.kind == ChartKind::Puiseux).unwrap();
        assert_eq!(p.p, 3);
        assert!(p.residual <= 1e-8);
    }

    #[test]
    fn crossing_examples() {
        let f = bp(&[(1, 0, 1.0), (0, 1, -1.0)]);
        let g = bp(&[(1, 0, 1.0)]);
        let chart = regular_chart(&f, [ZERO, ZERO], 1.0, 6).unwrap();
        let r = line_crossing_count(&f, &g, &chart, std::f64::consts::FRAC_PI_2, (-0.5, 0.5), 100).unwrap();
        assert_eq!(r.count, 1);
        assert!(r.count <= r.bound && !r.on_line);
        let r = line_crossing_count(&f, &g, &chart, 0.0, (-0.5, 0.5), 100).unwrap();
        assert!(r.on_line);

        let f = bp(&[(2, 0, 1.0), (0, 1, -1.0)]);
        let g = bp(&[(1, 0, 1.0), (0, 1, 1.0)]);
        let chart = regular_chart(&f, [c(0.5), c(0.25)], 0.2, 6).unwrap();
        let over: usize = (0..16)
            .map(|k| line_crossing_count(&f, &g, &chart, std::f64::consts::PI * k as f64 / 16.0, (-0.9, 0.9), 400).unwrap())
            .filter(|r| r.count > r.bound)
            .count();
        assert!(over <= 1);
    }

    #[test]
    fn bezout_examples() {
        let r = bezout_count(&bp(&[(2, 0, 1.0), (0, 1, -1.0)]), &bp(&[(1, 0, 1.0), (0, 2, -1.0)])).unwrap();
        assert_eq!(r.count, 4);
        let r = bezout_count(&bp(&[(1, 0, 1.0), (0, 0, -1.0)]), &bp(&[(0, 1, 1.0), (0, 0, -1.0)])).unwrap();
        assert_eq!(r.count, 1);
        assert!((r.solutions[0][0] - 1.0).norm() < 1e-10 && (r.solutions[0][1] - 1.0).norm() < 1e-10);
        let r = bezout_count(&bp(&[(2, 0, 1.0), (0, 2, 1.0), (0, 0, -1.0)]), &bp(&[(1, 0, 1.0), (0, 1, -1.0)])).unwrap();
        assert_eq!(r.count, 2);
        let common = bp(&[(1, 0, 1.0), (0, 1, -1.0)]);
        let f = &common * &bp(&[(1, 0, 1.0), (0, 0, 2.0)]);
        let g = &common * &bp(&[(0, 1, 1.0), (0, 0, 3.0)]);
        assert!(matches!(bezout_count(&f, &g), Err(Error::CommonFactor)));
    }

    #[test]
    fn chart_exponent_shape() {
        // f1 vanishes simply at the chart base on f2 = 0
        let f2 = bp(&[(2, 0, 1.0), (0, 1, -1.0)]);
        let chart = regular_chart(&f2, [c(0.5), c(0.25)], 0.2, 6).unwrap();
        let f1 = bp(&[(1, 0, 1.0), (0, 1, 1.0), (0, 0, -0.75)]);
        let bs: Vec<f64> = [0.05, 0.1, 0.2].iter().map(|&r| chart_bernstein(&f1, &f2, &chart, 0.25, ZERO, r, 128).unwrap()).collect();
        let (lo, hi) = bs.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        assert!((hi - lo) / hi <= 0.25, "{bs:?}");
    }
}
