//! Numerical Weierstrass preparation: regular directions, circle and radius
//! selection, and the factorization `f = P·g` with `P` monic in `z`.
//!
//! Power sums of the zeros inside `|z| = ρ0` come from the trapezoidal rule
//! applied to `(1/2πi) ∮ z^p ∂_z f / f dz`, and Newton's identities turn
//! them into the coefficients of `P`.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extrema;
use crate::poly::{inner2, norm2, BivariatePoly, Point2, UnivariatePoly, C64, ONE, ZERO};
use crate::roots;
use crate::sampling;

/// Affine chart `(z, w) ↦ origin + scale·(z e1 + w e2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    #[serde(with = "crate::json::point4")]
    pub e1: Point2,
    #[serde(with = "crate::json::point4")]
    pub e2: Point2,
    #[serde(with = "crate::json::point4")]
    pub origin: Point2,
    pub scale: f64,
}

impl Frame {
    pub fn identity() -> Self {
        Frame { e1: [ONE, ZERO], e2: [ZERO, ONE], origin: [ZERO, ZERO], scale: 1.0 }
    }

    pub fn new(e1: Point2, e2: Point2, origin: Point2, scale: f64) -> Result<Self> {
        for e in [e1, e2] {
            if (norm2(e) - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument("frame vectors must be unit".into()));
            }
        }
        if inner2(e1, e2).norm() > 0.1 {
            return Err(Error::InvalidArgument("frame vectors are nearly collinear".into()));
        }
        if !(scale > 0.0) {
            return Err(Error::InvalidArgument("frame scale must be positive".into()));
        }
        Ok(Frame { e1, e2, origin, scale })
    }

    /// Frame with first direction `e1` and its Hermitian complement.
    pub fn from_direction(e1: Point2, origin: Point2, scale: f64) -> Result<Self> {
        let n = norm2(e1);
        let e1 = [e1[0] / n, e1[1] / n];
        let e2 = [-e1[1].conj(), e1[0].conj()];
        Frame::new(e1, e2, origin, scale)
    }

    /// The same chart with the roles of `z` and `w` exchanged.
    pub fn swapped(&self) -> Self {
        Frame { e1: self.e2, e2: self.e1, ..*self }
    }

    /// `2 / (1 - |<e1, e2>|)`
    pub fn distortion(&self) -> f64 {
        2.0 / (1.0 - inner2(self.e1, self.e2).norm())
    }

    pub fn to_world(&self, v: Point2) -> Point2 {
        let s = self.scale;
        [
            self.origin[0] + (v[0] * self.e1[0] + v[1] * self.e2[0]) * s,
            self.origin[1] + (v[0] * self.e1[1] + v[1] * self.e2[1]) * s,
        ]
    }

    pub fn to_local(&self, v: Point2) -> Point2 {
        let d = [(v[0] - self.origin[0]) / self.scale, (v[1] - self.origin[1]) / self.scale];
        let det = self.e1[0] * self.e2[1] - self.e2[0] * self.e1[1];
        [
            (d[0] * self.e2[1] - self.e2[0] * d[1]) / det,
            (self.e1[0] * d[1] - d[0] * self.e1[1]) / det,
        ]
    }

    /// `f` written in the chart coordinates.
    pub fn pull_back(&self, f: &BivariatePoly) -> BivariatePoly {
        let s = C64::new(self.scale, 0.0);
        f.substitute_linear(
            [self.origin[0], self.e1[0] * s, self.e2[0] * s],
            [self.origin[1], self.e1[1] * s, self.e2[1] * s],
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularDirection {
    #[serde(with = "crate::json::point4")]
    pub direction: Point2,
    pub m_level: f64,
    /// `sup_{|z| ≤ R0/4} log|f(v0 + z e)|`
    pub sup_log: f64,
    #[serde(with = "crate::json::point4")]
    pub witness: Point2,
    pub tries: usize,
}

fn restricted_sup(f: &BivariatePoly, v0: Point2, e: Point2, rad: f64) -> Option<(f64, Point2)> {
    let g = f.restrict_line(v0, e);
    if g.is_zero() {
        return None;
    }
    let ex = extrema::circle_extrema(&g, ZERO, rad, extrema::default_samples(g.degree())).ok()?;
    let z = C64::from_polar(rad, ex.argmax_angle);
    Some((ex.max_log_abs, [v0[0] + z * e[0], v0[1] + z * e[1]]))
}

/// First direction `e` (coordinate axes, then seeded random ones) with
/// `sup_{|z| ≤ R0/4} log|f(v0 + z e)| ≥ m`.
pub fn find_regular_direction(
    f: &BivariatePoly,
    v0: Point2,
    r0: f64,
    m: f64,
    max_tries: usize,
    seed: u64,
) -> Result<RegularDirection> {
    if f.is_zero() {
        return Err(Error::AllZero);
    }
    let mut rng = sampling::rng(seed);
    for t in 0..max_tries {
        let e = match t {
            0 => [ONE, ZERO],
            1 => [ZERO, ONE],
            _ => sampling::sphere_point(&mut rng),
        };
        if let Some((sup, witness)) = restricted_sup(f, v0, e, r0 / 4.0) {
            if sup >= m {
                return Ok(RegularDirection { direction: e, m_level: m, sup_log: sup, witness, tries: t + 1 });
            }
        }
    }
    Err(Error::NoRegularDirection { tries: max_tries })
}

/// Fraction of `n` seeded random directions that are not `m`-regular.
pub fn regular_failure_rate(f: &BivariatePoly, v0: Point2, r0: f64, m: f64, n: usize, seed: u64) -> f64 {
    let mut rng = sampling::rng(seed);
    let fails = (0..n)
        .filter(|_| {
            let e = sampling::sphere_point(&mut rng);
            !matches!(restricted_sup(f, v0, e, r0 / 4.0), Some((s, _)) if s >= m)
        })
        .count();
    fails as f64 / n.max(1) as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleChoice {
    pub rho0: f64,
    /// Smallest `log|f_i|` over the chosen circle, minimised over `i`.
    pub min_log: f64,
}

pub const CIRCLE_CANDIDATES: usize = 128;

/// Radius in `(1/8, 1/4)` maximising the joint circle minimum of `fs`.
pub fn select_circle(fs: &[UnivariatePoly], threshold_log: f64) -> Result<CircleChoice> {
    if fs.is_empty() || fs.iter().any(|f| f.is_zero()) {
        return Err(Error::AllZero);
    }
    let mut best = CircleChoice { rho0: 0.0, min_log: f64::NEG_INFINITY };
    for k in 0..CIRCLE_CANDIDATES {
        let rho = 0.125 + 0.125 * (k as f64 + 0.5) / CIRCLE_CANDIDATES as f64;
        let joint = fs
            .iter()
            .map(|f| {
                extrema::circle_extrema(f, ZERO, rho, extrema::default_samples(f.degree()))
                    .map(|e| e.min_log_abs)
                    .unwrap_or(f64::NEG_INFINITY)
            })
            .fold(f64::INFINITY, f64::min);
        if joint > best.min_log {
            best = CircleChoice { rho0: rho, min_log: joint };
        }
    }
    if best.min_log < threshold_log {
        return Err(Error::NoGoodCircle { best: best.min_log });
    }
    Ok(best)
}

const BASE_NODES: usize = 512;
const MAX_NODES: usize = 8192;

/// Power sums `b_1..b_k` of the zeros of `p` inside `|z| = rho`, plus the
/// argument-principle count, by the trapezoidal rule with `nodes` points.
fn contour_sums(p: &UnivariatePoly, rho: f64, kmax: usize, nodes: usize) -> Option<(C64, Vec<C64>)> {
    let dp = p.derivative();
    let mut count = ZERO;
    let mut sums = vec![ZERO; kmax];
    for j in 0..nodes {
        let z = C64::from_polar(rho, TAU * j as f64 / nodes as f64);
        let v = p.eval(z);
        if v.norm() == 0.0 {
            return None;
        }
        let q = z * dp.eval(z) / v;
        count += q;
        let mut zp = ONE;
        for s in sums.iter_mut() {
            zp *= z;
            *s += zp * q;
        }
    }
    let n = nodes as f64;
    Some((count / n, sums.into_iter().map(|s| s / n).collect()))
}

/// Argument-principle zero count of `p` inside `|z| = rho`.
pub fn winding_count(p: &UnivariatePoly, rho: f64) -> Result<usize> {
    let mut nodes = BASE_NODES;
    loop {
        let (c, _) = contour_sums(p, rho, 0, nodes).ok_or(Error::ZeroOnContour { w: ZERO })?;
        let k = c.re.round();
        let residual = (c - k).norm();
        if residual < 0.1 && k >= 0.0 {
            return Ok(k as usize);
        }
        if nodes >= MAX_NODES {
            return Err(Error::WindingNotInteger { residual });
        }
        nodes *= 2;
    }
}

/// Monic `P` of degree `k` whose zeros are the zeros of `p` inside `|z| = rho`.
pub fn weierstrass_polynomial(p: &UnivariatePoly, rho: f64, k: usize, w: C64) -> Result<UnivariatePoly> {
    let mut nodes = BASE_NODES;
    let mut prev: Option<Vec<C64>> = None;
    loop {
        let (count, sums) = contour_sums(p, rho, k, nodes).ok_or(Error::ZeroOnContour { w })?;
        if (count - k as f64).norm() >= 0.1 {
            return Err(Error::ZeroOnContour { w });
        }
        if let Some(pr) = &prev {
            let stable = pr
                .iter()
                .zip(&sums)
                .enumerate()
                .all(|(i, (a, b))| (a - b).norm() <= 1e-10 * rho.powi(i as i32 + 1).max(1e-300) * (k as f64).max(1.0));
            if stable {
                return Ok(newton_identities(&sums));
            }
        }
        if nodes >= MAX_NODES {
            return Ok(newton_identities(&sums));
        }
        prev = Some(sums);
        nodes *= 2;
    }
}

/// Monic polynomial from power sums `p_1..p_k` of its roots.
pub fn newton_identities(power_sums: &[C64]) -> UnivariatePoly {
    let k = power_sums.len();
    let mut e = vec![ONE; k + 1];
    for j in 1..=k {
        let mut acc = ZERO;
        for i in 1..=j {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += e[j - i] * power_sums[i - 1] * sign;
        }
        e[j] = acc / j as f64;
    }
    // a_{k-j} = (-1)^j e_j
    let coeffs: Vec<C64> = (0..=k)
        .map(|i| {
            let j = k - i;
            if j % 2 == 0 {
                e[j]
            } else {
                -e[j]
            }
        })
        .collect();
    UnivariatePoly::new(coeffs).expect("finite power sums")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GSample {
    pub z: C64,
    pub w: C64,
    pub g: C64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeierstrassFactorization {
    pub k: usize,
    pub rho0: f64,
    pub r1: f64,
    /// Outer polydisk radius used in the upper bound for `g`.
    pub r0: f64,
    pub frame: Frame,
    /// `f` in frame coordinates.
    pub f_local: BivariatePoly,
    pub w_grid: Vec<C64>,
    /// `a_0(w) .. a_{k-1}(w)` at each grid node.
    pub a_coeffs: Vec<Vec<C64>>,
    /// Quotient `g(·, w) = f(·, w) / P(·, w)` at each grid node.
    pub g_quotients: Vec<UnivariatePoly>,
    pub g_samples: Vec<GSample>,
    /// `max |f - P g| / exp(sup log|f|)` over the validation grid.
    pub residual: f64,
    /// Largest modulus of a zero of any `P(·, w)` on the grid.
    pub max_root_modulus: f64,
}

impl WeierstrassFactorization {
    pub fn p_at_node(&self, idx: usize) -> UnivariatePoly {
        let mut c = self.a_coeffs[idx].clone();
        c.push(ONE);
        UnivariatePoly::new(c).expect("finite coefficients")
    }

    /// `P(·, w)` at an arbitrary `w ∈ D(0, r1)`, recomputed from the contour.
    pub fn p_at(&self, w: C64) -> Result<UnivariatePoly> {
        weierstrass_polynomial(&self.f_local.in_z(w), self.rho0, self.k, w)
    }

    /// Root confinement: every zero of every grid `P(·, w)` is inside `|z| < ρ0`.
    pub fn roots_confined(&self) -> bool {
        self.max_root_modulus < self.rho0
    }
}

/// Default outer radius of the polydisk `D(0,R0)²`.
pub const OUTER_RADIUS: f64 = 0.7;

/// Factor `f` (pulled back through `frame`) as `P·g` on `D(0,ρ0) × D(0,r1)`.
pub fn prepare(f: &BivariatePoly, frame: Frame, rho0: f64, r1: f64, grid_n: usize) -> Result<WeierstrassFactorization> {
    if f.is_zero() {
        return Err(Error::AllZero);
    }
    if !(rho0 > 0.0 && rho0 < OUTER_RADIUS / 2.0 && r1 > 0.0 && r1 < OUTER_RADIUS) {
        return Err(Error::InvalidArgument(format!("need 0 < rho0 < R0/2 and 0 < r1 < R0, got {rho0}, {r1}")));
    }
    let fl = frame.pull_back(f);
    let f0 = fl.in_z(ZERO);
    if f0.is_zero() {
        return Err(Error::ZeroOnContour { w: ZERO });
    }
    let k = winding_count(&f0, rho0).map_err(|e| match e {
        Error::ZeroOnContour { .. } => Error::ZeroOnContour { w: ZERO },
        other => other,
    })?;
    let w_grid = crate::curve::polar_grid(ZERO, r1, grid_n.max(2));
    let z_grid = crate::curve::polar_grid(ZERO, rho0, grid_n.max(2));

    let per_w: Vec<Result<(Vec<C64>, UnivariatePoly, f64, f64, f64, Vec<GSample>)>> = w_grid
        .par_iter()
        .map(|&w| {
            let fw = fl.in_z(w);
            let p = weierstrass_polynomial(&fw, rho0, k, w)?;
            let (g, _) = fw.div_rem(&p)?;
            let mut max_root: f64 = 0.0;
            if k > 0 {
                for r in roots::roots(&p, roots::DEFAULT_TOL)? {
                    max_root = max_root.max(r.norm());
                }
            }
            let mut worst: f64 = 0.0;
            let mut sup_f = f64::NEG_INFINITY;
            let mut samples = Vec::with_capacity(z_grid.len());
            for &z in &z_grid {
                let fv = fw.eval(z);
                let gv = g.eval(z);
                worst = worst.max((fv - p.eval(z) * gv).norm());
                sup_f = sup_f.max(fv.norm().ln());
                samples.push(GSample { z, w, g: gv });
            }
            let a = p.coeffs()[..k].to_vec();
            Ok((a, g, max_root, worst, sup_f, samples))
        })
        .collect();

    let mut a_coeffs = Vec::with_capacity(w_grid.len());
    let mut g_quotients = Vec::with_capacity(w_grid.len());
    let mut g_samples = Vec::new();
    let (mut max_root_modulus, mut worst, mut sup_f) = (0.0f64, 0.0f64, f64::NEG_INFINITY);
    for r in per_w {
        let (a, g, mr, wr, sf, s) = r?;
        a_coeffs.push(a);
        g_quotients.push(g);
        g_samples.extend(s);
        max_root_modulus = max_root_modulus.max(mr);
        worst = worst.max(wr);
        sup_f = sup_f.max(sf);
    }
    Ok(WeierstrassFactorization {
        k,
        rho0,
        r1,
        r0: OUTER_RADIUS,
        frame,
        f_local: fl,
        w_grid,
        a_coeffs,
        g_quotients,
        g_samples,
        residual: worst / sup_f.exp(),
        max_root_modulus,
    })
}

/// Coefficient bound for `sup |∂_w f|` over `|z| ≤ rz`, `|w| ≤ rw`.
pub fn dw_bound(f: &BivariatePoly, rz: f64, rw: f64) -> f64 {
    f.terms()
        .filter(|t| t.1 > 0)
        .map(|(i, j, c)| c.norm() * j as f64 * rz.powi(i as i32) * rw.powi(j as i32 - 1))
        .sum()
}

/// Largest `r1` returned by [`choose_r1`].
pub const R1_CAP: f64 = 0.25;

/// `r1` from the Cauchy estimate `|f(z,w) - f(z,0)| ≤ |w| sup|∂_w f|`,
/// halved until the zero count inside `|z| = ρ0` is constant on the grid.
pub fn choose_r1(fs: &[BivariatePoly], rho0: f64, grid_n: usize) -> Result<f64> {
    let mut r1 = f64::INFINITY;
    let mut ks = Vec::new();
    for f in fs {
        let f0 = f.in_z(ZERO);
        let cmin = extrema::circle_extrema(&f0, ZERO, rho0, extrema::default_samples(f0.degree()).max(256))?.min_log_abs;
        let lip = dw_bound(f, rho0, R1_CAP).max(f64::MIN_POSITIVE);
        r1 = r1.min(cmin.exp() / (2.0 * lip));
        ks.push(winding_count(&f0, rho0)?);
    }
    let mut r1 = r1.min(R1_CAP);
    for _ in 0..60 {
        let grid = crate::curve::polar_grid(ZERO, r1, grid_n.max(4));
        let ok = fs.iter().zip(&ks).all(|(f, &k)| {
            grid.iter().all(|&w| {
                let fw = f.in_z(w);
                !fw.is_zero() && matches!(winding_count(&fw, rho0), Ok(c) if c == k)
            })
        });
        if ok {
            return Ok(r1);
        }
        r1 *= 0.5;
    }
    Err(Error::ZeroOnContour { w: ZERO })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsDReport {
    /// `inf log|f|` over `Γ_{ρ0} × D(0, r1)`
    pub inf_log_f_contour: f64,
    /// `sup log|f|` over `D(0,R0)²`
    pub sup_log_f_outer: f64,
    pub inf_log_g: f64,
    pub sup_log_g: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
    #[serde(with = "crate::json::point4")]
    pub worst_lower: Point2,
    #[serde(with = "crate::json::point4")]
    pub worst_upper: Point2,
}

/// Two-sided bounds for `log|g|` on the validation grid.
pub fn bounds_d_report(wf: &WeierstrassFactorization) -> BoundsDReport {
    let fl = &wf.f_local;
    let n = 256;
    let mut inf_f = f64::INFINITY;
    for &w in &wf.w_grid {
        let fw = fl.in_z(w);
        for j in 0..n {
            let z = C64::from_polar(wf.rho0, TAU * j as f64 / n as f64);
            inf_f = inf_f.min(fw.log_abs(z));
        }
    }
    let m = 64;
    let mut sup_f = f64::NEG_INFINITY;
    for a in 0..m {
        let z = C64::from_polar(wf.r0, TAU * a as f64 / m as f64);
        let fz = fl.in_w(z);
        let e = extrema::circle_extrema(&fz, ZERO, wf.r0, extrema::default_samples(fz.degree())).map(|e| e.max_log_abs);
        sup_f = sup_f.max(e.unwrap_or(f64::NEG_INFINITY));
    }
    let (mut inf_g, mut sup_g) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut worst_lower, mut worst_upper) = ([ZERO, ZERO], [ZERO, ZERO]);
    for s in &wf.g_samples {
        let v = s.g.norm().ln();
        if v < inf_g {
            inf_g = v;
            worst_lower = [s.z, s.w];
        }
        if v > sup_g {
            sup_g = v;
            worst_upper = [s.z, s.w];
        }
    }
    let k = wf.k as f64;
    let lower_bound = inf_f - k * (2.0 * wf.rho0).ln();
    let upper_bound = sup_f + k * (2.0 / wf.r0).ln();
    let tol = |x: f64| 1e-9 * (1.0 + x.abs());
    BoundsDReport {
        inf_log_f_contour: inf_f,
        sup_log_f_outer: sup_f,
        inf_log_g: inf_g,
        sup_log_g: sup_g,
        lower_bound,
        upper_bound,
        lower_holds: inf_g >= lower_bound - tol(lower_bound),
        upper_holds: sup_g <= upper_bound + tol(upper_bound),
        worst_lower,
        worst_upper,
    }
}

/// As [`bounds_d_report`], failing with the worst point on violation.
pub fn check_bounds_d(wf: &WeierstrassFactorization) -> Result<BoundsDReport> {
    let r = bounds_d_report(wf);
    if !r.lower_holds {
        return Err(Error::BoundViolated { which: "inf log|g|", worst: r.worst_lower, margin: r.inf_log_g - r.lower_bound });
    }
    if !r.upper_holds {
        return Err(Error::BoundViolated { which: "sup log|g|", worst: r.worst_upper, margin: r.upper_bound - r.sup_log_g });
    }
    Ok(r)
}
