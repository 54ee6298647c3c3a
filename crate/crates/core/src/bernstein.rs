//! Maximum modulus and Bernstein exponents on disks, balls and curve traces,
//! plus Harnack and zero-count doubling checks.

use std::f64::consts::{LN_2, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve;
use crate::error::{Error, Result};
use crate::extrema;
use crate::poly::{dist2, log_abs, BivariatePoly, Point2, UnivariatePoly, C64};
use crate::roots;
use crate::sampling;

/// Anything with a pointwise `log|f|` on C².
pub trait LogModulus: Sync {
    fn log_modulus(&self, v: Point2) -> f64;
}

impl LogModulus for BivariatePoly {
    fn log_modulus(&self, v: Point2) -> f64 {
        self.log_abs(v)
    }
}

/// Wraps a closure returning `log|f(v)|`.
pub struct LogFn<F>(pub F);

impl<F: Fn(Point2) -> f64 + Sync> LogModulus for LogFn<F> {
    fn log_modulus(&self, v: Point2) -> f64 {
        (self.0)(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallMax {
    pub value: f64,
    pub argmax: Point2,
    pub samples_used: usize,
    /// Change of the estimate when the budget was last doubled.
    pub doubling_delta: f64,
}

const REFINE_STARTS: usize = 8;
const DOUBLING_TOL: f64 = 1e-7;
const MAX_DOUBLINGS: usize = 4;

fn to_r4(v: Point2) -> [f64; 4] {
    [v[0].re, v[0].im, v[1].re, v[1].im]
}

fn from_r4(x: [f64; 4]) -> Point2 {
    let n = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    [C64::new(x[0] / n, x[1] / n), C64::new(x[2] / n, x[3] / n)]
}

/// Compass search on the unit sphere for `g`.
fn refine_on_sphere<G: Fn(Point2) -> f64>(g: &G, start: Point2, value: f64) -> (Point2, f64) {
    let mut x = to_r4(start);
    let mut best = value;
    let mut step = 0.05;
    while step > 1e-10 {
        let mut improved = false;
        for k in 0..8 {
            let mut y = x;
            y[k / 2] += if k % 2 == 0 { step } else { -step };
            let p = from_r4(y);
            let v = g(p);
            if v > best {
                best = v;
                x = to_r4(p);
                improved = true;
                break;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (from_r4(x), best)
}

fn ball_max_once<F: LogModulus>(f: &F, center: Point2, r: f64, budget: usize, seed: u64) -> (f64, Point2) {
    let mut rng = sampling::rng(seed);
    let dirs: Vec<Point2> = (0..budget).map(|_| sampling::sphere_point(&mut rng)).collect();
    let g = |s: Point2| f.log_modulus([center[0] + s[0] * r, center[1] + s[1] * r]);
    let mut vals: Vec<(f64, Point2)> = dirs.par_iter().map(|s| (g(*s), *s)).collect();
    vals.sort_by(|a, b| b.0.total_cmp(&a.0));
    let refined: Vec<(Point2, f64)> = vals
        .par_iter()
        .take(REFINE_STARTS)
        .filter(|(v, _)| v.is_finite())
        .map(|(v, s)| refine_on_sphere(&g, *s, *v))
        .collect();
    let (mut best_v, mut best_s) = (vals[0].0, vals[0].1);
    for (s, v) in refined {
        if v > best_v {
            best_v = v;
            best_s = s;
        }
    }
    (best_v, [center[0] + best_s[0] * r, center[1] + best_s[1] * r])
}

/// `sup log|f|` over the closed ball `B(center, r)`, taken on the boundary
/// sphere. The budget is doubled until the estimate is stable.
pub fn max_log_ball<F: LogModulus>(f: &F, center: Point2, r: f64, budget: usize) -> Result<BallMax> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be > 0, got {r}")));
    }
    let budget = budget.max(16);
    let (mut prev, mut arg) = ball_max_once(f, center, r, budget, 0);
    let mut used = budget;
    let mut b = budget;
    let mut delta = f64::INFINITY;
    for k in 1..=MAX_DOUBLINGS {
        b *= 2;
        let (v, a) = ball_max_once(f, center, r, b, k as u64);
        used += b;
        delta = if v == prev { 0.0 } else { (v - prev).abs() };
        if v > prev {
            arg = a;
        }
        let best = v.max(prev);
        if delta <= DOUBLING_TOL * best.abs().max(1.0) || (v == f64::NEG_INFINITY && prev == v) {
            return Ok(BallMax { value: best, argmax: arg, samples_used: used, doubling_delta: delta });
        }
        prev = best;
    }
    Err(Error::BudgetTooSmall { delta })
}

/// Point on `Z` maximising `log|f1|` in a ball, with the sampled cloud size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceMax {
    pub value: f64,
    pub argmax: Point2,
    pub samples: usize,
}

pub const DEFAULT_TRACE_GRID: usize = 256;

/// Newton projection onto `f2 = 0` moving one coordinate.
fn project(f2: &BivariatePoly, v: Point2, along_z: bool) -> Option<Point2> {
    let mut v = v;
    for _ in 0..40 {
        let (val, d) = if along_z {
            f2.in_z(v[1]).eval_with_derivative(v[0])
        } else {
            f2.in_w(v[0]).eval_with_derivative(v[1])
        };
        if val.norm() <= 1e-14 * f2.scale_at(v) {
            return Some(v);
        }
        if d.norm() == 0.0 {
            return None;
        }
        let step = val / d;
        if along_z {
            v[0] -= step;
        } else {
            v[1] -= step;
        }
    }
    let r = f2.eval_at(v).norm();
    (r <= 1e-10 * f2.scale_at(v)).then_some(v)
}

/// Pattern search along the curve from `start`, staying in the ball.
fn refine_on_curve(f1: &BivariatePoly, f2: &BivariatePoly, center: Point2, radius: f64, start: Point2, h0: f64) -> (Point2, f64) {
    let dz = f2.partial_z().eval_at(start).norm();
    let dw = f2.partial_w().eval_at(start).norm();
    if dz == 0.0 && dw == 0.0 {
        return (start, f1.log_abs(start));
    }
    // move the coordinate with the smaller partial, solve for the other
    let param_is_w = dz >= dw;
    let mut v = start;
    let mut best = f1.log_abs(v);
    let mut step = h0;
    let dirs: Vec<C64> = (0..8).map(|k| C64::from_polar(1.0, TAU * k as f64 / 8.0)).collect();
    let moved = |v: Point2, d: C64, t: f64| -> Option<Point2> {
        let mut cand = v;
        if param_is_w {
            cand[1] += d * t;
        } else {
            cand[0] += d * t;
        }
        let p = project(f2, cand, param_is_w)?;
        (dist2(p, v) <= 4.0 * t + 1e-300).then_some(p)
    };
    while step > 1e-13 * radius.max(1e-300) {
        let mut improved = false;
        for &d in &dirs {
            let Some(mut p) = moved(v, d, step) else { continue };
            if dist2(p, center) > radius {
                // last point of the segment still inside the ball
                let (mut lo, mut hi) = (0.0, 1.0);
                for _ in 0..40 {
                    let mid = 0.5 * (lo + hi);
                    match moved(v, d, mid * step) {
                        Some(q) if dist2(q, center) <= radius => lo = mid,
                        _ => hi = mid,
                    }
                }
                match moved(v, d, lo * step) {
                    Some(q) if lo > 0.0 && dist2(q, center) <= radius => p = q,
                    _ => continue,
                }
            }
            let val = f1.log_abs(p);
            if val > best {
                best = val;
                v = p;
                improved = true;
                break;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (v, best)
}

/// `sup log|f1|` over `Z ∩ B(center, radius)` with `Z = {f2 = 0}`.
pub fn trace_max(f1: &BivariatePoly, f2: &BivariatePoly, center: Point2, radius: f64, grid_n: usize) -> Result<TraceMax> {
    let cloud = curve::sample_curve(f2, center, radius, grid_n);
    if cloud.points.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let mut vals: Vec<(f64, Point2)> = cloud.points.iter().map(|v| (f1.log_abs(*v), *v)).collect();
    vals.sort_by(|a, b| b.0.total_cmp(&a.0));
    let h0 = radius / grid_n.max(2) as f64;
    let refined: Vec<(Point2, f64)> = vals
        .par_iter()
        .take(16)
        .filter(|(v, _)| v.is_finite())
        .map(|(_, p)| refine_on_curve(f1, f2, center, radius, *p, h0))
        .collect();
    let mut best = (vals[0].1, vals[0].0);
    for (p, v) in refined {
        if v > best.1 {
            best = (p, v);
        }
    }
    Ok(TraceMax { value: best.1, argmax: best.0, samples: cloud.points.len() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernsteinQuery {
    pub mu: f64,
    pub center: Point2,
    #[serde(rename = "R")]
    pub radius: f64,
    /// `f2` of the curve `Z = {f2 = 0}` when the exponent is taken on the trace.
    pub trace: Option<BivariatePoly>,
    pub budget: usize,
}

impl BernsteinQuery {
    pub fn ball(mu: f64, center: Point2, radius: f64) -> Self {
        Self { mu, center, radius, trace: None, budget: 512 }
    }

    pub fn on_trace(mu: f64, center: Point2, radius: f64, f2: BivariatePoly) -> Self {
        Self { mu, center, radius, trace: Some(f2), budget: DEFAULT_TRACE_GRID }
    }

    fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return Err(Error::InvalidArgument(format!("mu must lie in (0,1), got {}", self.mu)));
        }
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(Error::InvalidArgument(format!("R must be > 0, got {}", self.radius)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernsteinReport {
    #[serde(rename = "M_outer")]
    pub m_outer: f64,
    #[serde(rename = "M_inner")]
    pub m_inner: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub samples_used: usize,
    pub is_identically_zero: bool,
}

impl BernsteinReport {
    fn zero() -> Self {
        Self {
            m_outer: f64::NEG_INFINITY,
            m_inner: f64::NEG_INFINITY,
            b: 0.0,
            samples_used: 0,
            is_identically_zero: true,
        }
    }

    fn from_pair(outer: f64, inner: f64, samples_used: usize) -> Self {
        let b = if outer == inner { 0.0 } else { outer - inner };
        Self { m_outer: outer, m_inner: inner, b, samples_used, is_identically_zero: false }
    }
}

/// `B_f(μ; v0, R) = M_f(v0, R) - M_f(v0, μR)` on balls or on the trace of a curve.
pub fn bernstein_exponent(f: &BivariatePoly, q: &BernsteinQuery) -> Result<BernsteinReport> {
    q.validate()?;
    if f.is_zero() {
        return Ok(BernsteinReport::zero());
    }
    match &q.trace {
        None => {
            let outer = max_log_ball(f, q.center, q.radius, q.budget)?;
            let inner = max_log_ball(f, q.center, q.mu * q.radius, q.budget)?;
            Ok(BernsteinReport::from_pair(outer.value, inner.value, outer.samples_used + inner.samples_used))
        }
        Some(f2) => {
            let grid = q.budget.max(16);
            let outer = trace_max(f, f2, q.center, q.radius, grid)?;
            let inner = trace_max(f, f2, q.center, q.mu * q.radius, grid)?;
            Ok(BernsteinReport::from_pair(outer.value, inner.value, outer.samples + inner.samples))
        }
    }
}

/// Exponent for a general log-modulus on balls.
pub fn bernstein_exponent_fn<F: LogModulus>(f: &F, mu: f64, center: Point2, radius: f64, budget: usize) -> Result<BernsteinReport> {
    BernsteinQuery::ball(mu, center, radius).validate()?;
    let outer = max_log_ball(f, center, radius, budget)?;
    let inner = max_log_ball(f, center, mu * radius, budget)?;
    if outer.value == f64::NEG_INFINITY {
        return Ok(BernsteinReport::zero());
    }
    Ok(BernsteinReport::from_pair(outer.value, inner.value, outer.samples_used + inner.samples_used))
}

/// Exponent of a univariate polynomial on disks.
pub fn bernstein_exponent_1d(p: &UnivariatePoly, mu: f64, z0: C64, radius: f64) -> Result<BernsteinReport> {
    BernsteinQuery::ball(mu, [z0, z0], radius).validate()?;
    if p.is_zero() {
        return Ok(BernsteinReport::zero());
    }
    let n = extrema::default_samples(p.degree());
    let outer = extrema::circle_extrema(p, z0, radius, n)?.max_log_abs;
    let inner = extrema::circle_extrema(p, z0, mu * radius, n)?.max_log_abs;
    Ok(BernsteinReport::from_pair(outer, inner, 2 * n))
}

/// `sup_{v0, R} B_f(μ; v0, R)` over a finite lattice of centers in
/// `B(0, 1/4)` and radii `R ≤ 1/4`.
pub fn bernstein_lattice_sup(f: &BivariatePoly, mu: f64, budget: usize) -> Result<f64> {
    if f.is_zero() {
        return Ok(0.0);
    }
    let q = 0.125;
    let d = q / std::f64::consts::SQRT_2;
    let z = C64::new(0.0, 0.0);
    let centers: [Point2; 9] = [
        [z, z],
        [C64::new(q, 0.0), z],
        [C64::new(-q, 0.0), z],
        [z, C64::new(q, 0.0)],
        [z, C64::new(-q, 0.0)],
        [C64::new(0.0, q), z],
        [z, C64::new(0.0, q)],
        [C64::new(d, 0.0), C64::new(d, 0.0)],
        [C64::new(d, 0.0), C64::new(-d, 0.0)],
    ];
    let mut best: f64 = 0.0;
    for c in centers {
        for r in [0.25, 0.125, 0.0625] {
            let rep = bernstein_exponent(f, &BernsteinQuery { budget, ..BernsteinQuery::ball(mu, c, r) })?;
            best = best.max(rep.b);
        }
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarnackVerdict {
    /// `M_h(z0, R)`
    pub m: f64,
    pub lower: f64,
    pub upper: f64,
    /// `log|h(z)| - log|h(z0)|`
    pub value: f64,
    pub holds: bool,
}

/// Winding number of `h` around `|z - z0| = r`.
pub fn winding_number<F: Fn(C64) -> C64>(h: &F, z0: C64, r: f64, nodes: usize) -> Option<i64> {
    let mut total = 0.0;
    let mut prev = h(z0 + C64::new(r, 0.0));
    if prev.norm() == 0.0 {
        return None;
    }
    for k in 1..=nodes {
        let cur = h(z0 + C64::from_polar(r, TAU * k as f64 / nodes as f64));
        if cur.norm() == 0.0 {
            return None;
        }
        total += (cur / prev).arg();
        prev = cur;
    }
    Some((total / TAU).round() as i64)
}

/// Harnack's two-sided bound for a zero-free `h` on `D(z0, R)` at a point `z`.
pub fn check_harnack<F: Fn(C64) -> C64>(h: F, z0: C64, big_r: f64, z: C64) -> Result<HarnackVerdict> {
    let r = (z - z0).norm();
    if !(r < big_r) {
        return Err(Error::InvalidArgument(format!("|z - z0| = {r} must be < R = {big_r}")));
    }
    for frac in [1.0, 0.75, 0.5, 0.25] {
        match winding_number(&h, z0, big_r * frac, 2048) {
            Some(0) => {}
            _ => return Err(Error::NotZeroFree),
        }
    }
    let m = extrema::extrema_on_circle(|t| log_abs(h(z0 + C64::from_polar(big_r, t))), 256).max_log_abs;
    let at0 = log_abs(h(z0));
    let u0 = m - at0;
    let lower = -2.0 * r / (big_r - r) * u0;
    let upper = 2.0 * r / (big_r + r) * u0;
    let value = log_abs(h(z)) - at0;
    let tol = 1e-9 * (1.0 + m.abs() + at0.abs());
    Ok(HarnackVerdict { m, lower, upper, value, holds: lower - tol <= value && value <= upper + tol })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarnackChainReport {
    #[serde(rename = "B_phi")]
    pub b_phi: f64,
    /// Zeros of `φ` in `D(0, 3/4)`.
    pub n: usize,
    /// `M_φ(0, 1/4)`
    pub m: f64,
    /// `M_h(0, 3/4)` for `h = φ / P`
    pub m_h_outer: f64,
    /// `M_h(0, 1/4)`
    pub m_h_inner: f64,
    /// `B_P(μ; z0, r)` for `P = ∏ (z - a_k)`
    pub b_p: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub bound: f64,
    /// `M_h(0,3/4) ≤ n log 4`
    pub h_sup_holds: bool,
    /// `B_P ≤ -n log μ`
    pub b_p_holds: bool,
    pub holds: bool,
}

/// Doubling bound for `φ` normalised by `M_φ(0,1) ≤ 0`, with the constants
/// of each Harnack step written out.
pub fn check_harnack_chain(phi: &UnivariatePoly, z0: C64, r: f64, mu: f64) -> Result<HarnackChainReport> {
    if phi.is_zero() {
        return Err(Error::AllZero);
    }
    if !(z0.norm() < 0.125 && r > 0.0 && r < 0.125 && mu > 0.0 && mu < 1.0) {
        return Err(Error::InvalidArgument("need |z0| < 1/8, 0 < r < 1/8, mu in (0,1)".into()));
    }
    let zero = C64::new(0.0, 0.0);
    let ns = extrema::default_samples(phi.degree()).max(256);
    let sup1 = extrema::circle_extrema(phi, zero, 1.0, ns)?.max_log_abs;
    if sup1 > 1e-9 {
        return Err(Error::NormalizationViolated { sup_log: sup1 });
    }
    let zs: Vec<C64> = if phi.degree() >= 1 {
        roots::roots(phi, roots::DEFAULT_TOL)?.into_iter().filter(|a| a.norm() < 0.75).collect()
    } else {
        Vec::new()
    };
    let n = zs.len();
    let p = UnivariatePoly::from_roots(C64::new(1.0, 0.0), &zs);
    let b_phi = bernstein_exponent_1d(phi, mu, z0, r)?.b;
    let m = extrema::circle_extrema(phi, zero, 0.25, ns)?.max_log_abs;
    let log_h = |z: C64| phi.log_abs(z) - p.log_abs(z);
    let m_h_outer = extrema::extrema_on_circle(|t| log_h(C64::from_polar(0.75, t)), ns).max_log_abs;
    let m_h_inner = extrema::extrema_on_circle(|t| log_h(C64::from_polar(0.25, t)), ns).max_log_abs;
    let b_p = bernstein_exponent_1d(&p, mu, z0, r)?.b;

    let mr = mu * r;
    let c1 = 4.0 * mr / (0.5 - 2.0 * mr);
    let c2 = 2.0 * (1.0 + mu) * r / (0.5 + (1.0 + mu) * r);
    let rho = 0.25 + z0.norm() + mr;
    let c3 = 2.0 * rho / (0.5 - rho);
    let nf = n as f64;
    let bound = (c1 + c2) * (1.0 + c3) * (nf * 2.0 * LN_2 - m) - nf * mu.ln();
    let tol = 1e-9 * (1.0 + bound.abs());
    Ok(HarnackChainReport {
        b_phi,
        n,
        m,
        m_h_outer,
        m_h_inner,
        b_p,
        c1,
        c2,
        c3,
        bound,
        h_sup_holds: m_h_outer <= nf * 2.0 * LN_2 + tol,
        b_p_holds: b_p <= -nf * mu.ln() + tol,
        holds: b_phi <= bound + tol,
    })
}

/// Degree-`deg` Taylor polynomial of `exp(-N + N z)`.
pub fn exp_taylor(n_param: f64, deg: usize) -> UnivariatePoly {
    let mut c = Vec::with_capacity(deg + 1);
    let mut term = (-n_param).exp();
    for k in 0..=deg {
        c.push(C64::new(term, 0.0));
        term *= n_param / (k + 1) as f64;
    }
    UnivariatePoly::new(c).expect("finite coefficients")
}
