//! Certified `Car₂,₀` covers of the joint near-zero set of a transversal
//! pair `F = (f1, f2)` inside `B(0, 1/4)`.
//!
//! Each input ball is split until it is small against the Weierstrass
//! radius of both functions; there the resultant of the two Weierstrass
//! polynomials is covered by 1-D Cartan disks in both coordinate
//! directions, and the cylinder intersections become the output balls.

use std::f64::consts::{SQRT_2, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bernstein;
use crate::cartan::{self, Car20Cover, MinModulusCertificate};
use crate::error::{Error, Result};
use crate::extrema;
use crate::poly::{dist2, norm2, Ball, BivariatePoly, Disk, Point2, UnivariatePoly, C64, ZERO};
use crate::resultant;
use crate::sampling;
use crate::weierstrass::{self, Frame};

/// Joint near-zero data of a pair: the level `e^{-H0}`, a cover of its
/// near-zero set in `B(0, 1/2)` by balls of radius `e^{-H1}`, and `B0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransversalityData {
    #[serde(rename = "H0")]
    pub h0: f64,
    #[serde(rename = "H1")]
    pub h1: f64,
    #[serde(rename = "K1")]
    pub k1: usize,
    #[serde(rename = "B0")]
    pub b0: f64,
    pub input_cover: Car20Cover,
    pub gates: Gates,
}

/// The scale separations `H0 ≥ 10 H1`, `H1 ≥ 10 B0`, `H1 ≥ 10 log K1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gates {
    pub h0_over_h1: bool,
    pub h1_over_b0: bool,
    pub h1_over_log_k1: bool,
}

impl Gates {
    pub fn evaluate(h0: f64, h1: f64, b0: f64, k1: usize) -> Self {
        Gates {
            h0_over_h1: h0 >= 10.0 * h1,
            h1_over_b0: h1 >= 10.0 * b0,
            h1_over_log_k1: h1 >= 10.0 * (k1.max(1) as f64).ln(),
        }
    }

    pub fn all(&self) -> bool {
        self.h0_over_h1 && self.h1_over_b0 && self.h1_over_log_k1
    }
}

/// `|f(c)| - Σ_{(a,b) ≠ 0} |T_ab| ρ^{a+b}`, a lower bound for `|f|` on the
/// polydisk `D(c_z, ρ) × D(c_w, ρ)`.
pub fn taylor_lower_bound(f: &BivariatePoly, c: Point2, rho: f64) -> f64 {
    let t = f.shift(c);
    let mut lb = t.coeff(0, 0).norm();
    for (a, b, v) in t.terms() {
        if a + b > 0 {
            lb -= v.norm() * rho.powi((a + b) as i32);
        }
    }
    lb
}

fn pair_lower_bound(f1: &BivariatePoly, f2: &BivariatePoly, c: Point2, rho: f64) -> f64 {
    taylor_lower_bound(f1, c, rho).max(taylor_lower_bound(f2, c, rho))
}

/// `log |F|` with the Euclidean norm.
pub fn log_norm(f1: &BivariatePoly, f2: &BivariatePoly, v: Point2) -> f64 {
    0.5 * (f1.eval_at(v).norm_sqr() + f2.eval_at(v).norm_sqr()).ln()
}

pub const MAX_SURVIVORS: usize = 4096;

/// Near-zero data from the ball lattice exponent and an adaptive box
/// subdivision of `B(0, 1/2)` at level `eps0`.
pub fn estimate_inputs(f1: &BivariatePoly, f2: &BivariatePoly, eps0: f64, subdivision_depth: usize) -> Result<TransversalityData> {
    if !(eps0 > 0.0 && eps0 < 1.0) {
        return Err(Error::InvalidArgument("eps0 must lie in (0, 1)".into()));
    }
    if f1.is_zero() || f2.is_zero() {
        return Err(Error::AllZero);
    }
    let h0 = -eps0.ln();
    let b0 = bernstein::bernstein_lattice_sup(f1, 0.25, 256)?.max(bernstein::bernstein_lattice_sup(f2, 0.25, 256)?);

    // boxes are given by centre and half-width in each of the four real coordinates
    let mut boxes: Vec<Point2> = vec![[ZERO, ZERO]];
    let mut half = 0.5;
    for _ in 0..subdivision_depth {
        let child = half / 2.0;
        let next: Vec<Point2> = boxes
            .par_iter()
            .flat_map_iter(|&c| {
                (0..16).filter_map(move |m| {
                    let o = |bit: usize| if m >> bit & 1 == 1 { child } else { -child };
                    let v = [c[0] + C64::new(o(0), o(1)), c[1] + C64::new(o(2), o(3))];
                    let keep = norm2(v) - 2.0 * child <= 0.5 && pair_lower_bound(f1, f2, v, SQRT_2 * child) < eps0;
                    keep.then_some(v)
                })
            })
            .collect();
        boxes = next;
        half = child;
        if boxes.len() > MAX_SURVIVORS {
            return Err(Error::SubdivisionBudgetExceeded { survivors: boxes.len() });
        }
    }
    if boxes.len() > MAX_SURVIVORS / 16 {
        return Err(Error::SubdivisionBudgetExceeded { survivors: boxes.len() });
    }

    // connected clusters of surviving boxes, each enclosed in one ball
    let n = boxes.len();
    let mut label: Vec<usize> = (0..n).collect();
    let touch = 4.0 * half * 1.0001;
    for i in 0..n {
        for j in 0..i {
            if dist2(boxes[i], boxes[j]) <= touch && label[i] != label[j] {
                let (a, b) = (label[i], label[j]);
                label.iter_mut().filter(|l| **l == a).for_each(|l| *l = b);
            }
        }
    }
    let mut ids: Vec<usize> = label.clone();
    ids.sort_unstable();
    ids.dedup();
    let mut centres = Vec::new();
    let mut radius: f64 = 0.0;
    for id in ids {
        let members: Vec<Point2> = (0..n).filter(|&i| label[i] == id).map(|i| boxes[i]).collect();
        let m = members.len() as f64;
        let c = [members.iter().map(|v| v[0]).sum::<C64>() / m, members.iter().map(|v| v[1]).sum::<C64>() / m];
        let r = members.iter().map(|&v| dist2(v, c)).fold(0.0, f64::max) + 2.0 * half;
        radius = radius.max(r);
        centres.push(c);
    }
    let h1 = if centres.is_empty() { h0 } else { -radius.ln() };
    let r = (-h1).exp();
    let k1 = centres.len();
    let input_cover = Car20Cover { balls: centres.into_iter().map(|c| Ball { center: c, radius: r }).collect(), h: h1, k: k1 };
    Ok(TransversalityData { h0, h1, k1, b0, input_cover, gates: Gates::evaluate(h0, h1, b0, k1) })
}

/// Where a leaf ball of the subdivision was certified.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeafRecord {
    pub input_ball: usize,
    #[serde(with = "crate::json::point4")]
    pub center: Point2,
    pub radius: f64,
    pub frame: Frame,
    pub k1: usize,
    pub k2: usize,
    pub k1_swapped: usize,
    pub k2_swapped: usize,
    pub rho0: f64,
    pub rho0_swapped: f64,
    pub r1: f64,
    pub r1_swapped: f64,
    /// Cartan level used on the resultants.
    pub h_cartan: f64,
    pub bound_log: f64,
    pub balls: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverResult {
    pub cover: Car20Cover,
    /// `log |F|` is at least `threshold_log` on `B(0,1/4)` outside the cover.
    pub threshold_log: f64,
    /// `-H B0² H0`
    pub reference_threshold_log: f64,
    pub exterior_certificate: MinModulusCertificate,
    pub c_pipeline: f64,
    /// `c_pipeline · K1 · B0² · H0²`
    pub k_bound: f64,
    pub k_ratio: f64,
    pub provenance: Vec<LeafRecord>,
}

pub const C_PIPELINE: f64 = 16.0;
pub const MAX_LEAVES: usize = 20_000;
const FIT_NODES: usize = 64;
const FIT_RING: f64 = 1.0;
/// The leaf bound holds on `|w| ≤ LEAF_W · r1`.
const LEAF_W: f64 = 0.75;

struct Side {
    k: [usize; 2],
    rho0: f64,
    r1: f64,
    /// `w`-disks of the resultant cover in this orientation.
    disks: Vec<Disk>,
    bound_log: f64,
}

/// Frame-local lower bound for `log|F|` off a union of `w`-disks, on
/// `D(0, ρ0) × D(0, LEAF_W r1)`.
fn side_bound(fl: [&BivariatePoly; 2], h_c: f64, seed: u64) -> Result<Side> {
    let slices = [fl[0].in_z(ZERO), fl[1].in_z(ZERO)];
    let choice = weierstrass::select_circle(&slices, -700.0)?;
    let rho0 = choice.rho0;
    let r1 = weierstrass::choose_r1(&[fl[0].clone(), fl[1].clone()], rho0, 4)?;
    let mut k = [0usize; 2];
    let mut inf_g = [0.0f64; 2];
    for i in 0..2 {
        k[i] = weierstrass::winding_count(&slices[i], rho0)?;
        let cmin = extrema::circle_extrema(&slices[i], ZERO, rho0, extrema::default_samples(slices[i].degree()).max(256))?.min_log_abs;
        let slack = cmin.exp() - r1 * weierstrass::dw_bound(fl[i], rho0, weierstrass::R1_CAP);
        if !(slack > 0.0) {
            return Err(Error::ZeroOnContour { w: ZERO });
        }
        inf_g[i] = slack.ln() - k[i] as f64 * (2.0 * rho0).ln();
    }
    if k[0] == 0 || k[1] == 0 {
        let bound_log = match (k[0], k[1]) {
            (0, 0) => inf_g[0].max(inf_g[1]),
            (0, _) => inf_g[0],
            _ => inf_g[1],
        };
        return Ok(Side { k, rho0, r1, disks: Vec::new(), bound_log });
    }

    let res_at = |w: C64| -> Result<C64> {
        let p1 = weierstrass::weierstrass_polynomial(&fl[0].in_z(w), rho0, k[0], w)?;
        let p2 = weierstrass::weierstrass_polynomial(&fl[1].in_z(w), rho0, k[1], w)?;
        Ok(resultant::resultant(&p1, &p2))
    };
    let ring = FIT_RING * r1;
    let values: Vec<C64> = (0..FIT_NODES)
        .into_par_iter()
        .map(|j| res_at(C64::from_polar(ring, TAU * j as f64 / FIT_NODES as f64)))
        .collect::<Result<_>>()?;
    let kk = (k[0] * k[1]) as i32;
    let sup = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if sup <= 1e-10 * (2.0 * rho0).powi(kk) {
        return Err(Error::DegenerateResultant);
    }
    // Taylor coefficients of u ↦ R(ring · u) on the unit circle
    let coeffs: Vec<C64> = (0..FIT_NODES)
        .map(|m| {
            values
                .iter()
                .enumerate()
                .map(|(j, v)| v * C64::from_polar(1.0, -TAU * (j * m % FIT_NODES) as f64 / FIT_NODES as f64))
                .sum::<C64>()
                / FIT_NODES as f64
        })
        .collect();
    let full = UnivariatePoly::new(coeffs)?;
    let q = full.trim_relative(1e-13);
    let u_dom = LEAF_W / FIT_RING;
    let trimmed: f64 = full.coeffs()[q.coeffs().len()..].iter().enumerate().map(|(i, c)| c.norm() * u_dom.powi((q.coeffs().len() + i) as i32)).sum();
    let checks: Vec<C64> = std::iter::once(ZERO)
        .chain((0..32).map(|j| C64::from_polar(LEAF_W * r1 / (1 + j / 16) as f64, TAU * (j as f64 + 0.5) / 16.0)))
        .collect();
    let mut fit_err: f64 = 0.0;
    for w in checks {
        fit_err = fit_err.max((res_at(w)? - q.eval(w / ring)).norm());
    }
    if fit_err > 1e-9 * sup {
        return Err(Error::NoConvergence { residual: fit_err / sup });
    }
    let err = 10.0 * fit_err + trimmed;

    // disks of total radius below e^{-h_c} in w, i.e. e^{-h_c} / ring in u
    let h_u = (h_c + ring.ln()).max(1.0);
    let (cover, cert) = cartan::cartan_cover_poly_with(&q, Disk::new(ZERO, u_dom)?, h_u, 256, seed)?;
    let lb = cert.lower_bound_log.exp() - err;
    if !(lb > 0.0) {
        return Err(Error::NoConvergence { residual: err / cert.lower_bound_log.exp() });
    }
    let log_x = (lb.ln() - 2f64.ln() - (kk - 1) as f64 * (2.0 * rho0).ln()).min(0.0);
    let bound_log = k[0].max(k[1]) as f64 * log_x + inf_g[0].min(inf_g[1]);
    let disks = cover.disks.iter().map(|d| Disk { center: d.center * ring, radius: d.radius * ring }).collect();
    Ok(Side { k, rho0, r1, disks, bound_log })
}

struct Leaf {
    record: LeafRecord,
    balls: Vec<Point2>,
}

fn candidate_frames(center: Point2, seed: u64) -> Vec<Frame> {
    let mut rng = sampling::rng(seed);
    let mut out = vec![Frame::identity()];
    for _ in 0..3 {
        if let Ok(f) = Frame::from_direction(sampling::sphere_point(&mut rng), [ZERO, ZERO], 1.0) {
            out.push(f);
        }
    }
    out.into_iter().map(|f| Frame { origin: center, ..f }).collect()
}

/// Best frame at `center` by the smaller of the two Weierstrass radii.
fn frame_radii(f1: &BivariatePoly, f2: &BivariatePoly, center: Point2, seed: u64) -> Option<(Frame, f64)> {
    let mut best: Option<(Frame, f64)> = None;
    for fr in candidate_frames(center, seed) {
        let mut radii = [0.0; 2];
        let mut ok = true;
        for (s, frame) in [fr, fr.swapped()].into_iter().enumerate() {
            let (a, b) = (frame.pull_back(f1), frame.pull_back(f2));
            let r = weierstrass::select_circle(&[a.in_z(ZERO), b.in_z(ZERO)], -700.0)
                .and_then(|c| weierstrass::choose_r1(&[a, b], c.rho0, 4));
            match r {
                Ok(r) => radii[s] = r,
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let score = radii[0].min(radii[1]);
            if best.as_ref().is_none_or(|b| score > b.1) {
                best = Some((fr, score));
            }
        }
    }
    best
}

fn process_leaf(f1: &BivariatePoly, f2: &BivariatePoly, input_ball: usize, center: Point2, radius: f64, frame: Frame, h: f64, seed: u64) -> Result<Leaf> {
    let h_c = (h + (frame.scale * SQRT_2 * frame.distortion()).ln()).max(h);
    let a = side_bound([&frame.pull_back(f1), &frame.pull_back(f2)], h_c, seed)?;
    let sw = frame.swapped();
    let (b, balls) = if a.disks.is_empty() {
        (None, Vec::new())
    } else {
        let b = side_bound([&sw.pull_back(f1), &sw.pull_back(f2)], h_c, seed ^ 0x9e37)?;
        // the swapped chart's w is this chart's z
        let mut balls = Vec::new();
        for dz in &b.disks {
            for dw in &a.disks {
                let v = frame.to_world([dz.center, dw.center]);
                if dist2(v, center) <= radius + (-h).exp() {
                    balls.push(v);
                }
            }
        }
        (Some(b), balls)
    };
    let bound_log = match &b {
        Some(b) => a.bound_log.min(b.bound_log),
        None => a.bound_log,
    };
    let (k1s, k2s, rho0s, r1s) = b.as_ref().map_or((0, 0, 0.0, 0.0), |b| (b.k[0], b.k[1], b.rho0, b.r1));
    Ok(Leaf {
        record: LeafRecord {
            input_ball,
            center,
            radius,
            frame,
            k1: a.k[0],
            k2: a.k[1],
            k1_swapped: k1s,
            k2_swapped: k2s,
            rho0: a.rho0,
            rho0_swapped: rho0s,
            r1: a.r1,
            r1_swapped: r1s,
            h_cartan: h_c,
            bound_log,
            balls: balls.len(),
        },
        balls,
    })
}

/// Balls of radius `s` centred on the lattice `c + s Z⁴` that cover `B(c, ρ)`;
/// the covering radius of that lattice is exactly `s`.
fn split_ball(c: Point2, rho: f64, s: f64) -> Vec<Point2> {
    let n = ((rho + s) / s).ceil() as i32;
    let mut out = Vec::new();
    for a in -n..=n {
        for b in -n..=n {
            for d in -n..=n {
                for e in -n..=n {
                    let off = [C64::new(a as f64 * s, b as f64 * s), C64::new(d as f64 * s, e as f64 * s)];
                    if norm2(off) <= rho + s {
                        out.push([c[0] + off[0], c[1] + off[1]]);
                    }
                }
            }
        }
    }
    out
}

fn process_input_ball(f1: &BivariatePoly, f2: &BivariatePoly, data: &TransversalityData, idx: usize, h: f64, seed: u64) -> Result<Vec<Leaf>> {
    let prune = (-data.h0).exp();
    let ball = data.input_cover.balls[idx];
    let mut queue = vec![(ball.center, ball.radius)];
    let mut leaves = Vec::new();
    let mut visited = 0usize;
    let tiny = (-h).exp();
    while let Some((c, rho)) = queue.pop() {
        if norm2(c) - rho > 0.25 || pair_lower_bound(f1, f2, c, rho) >= prune {
            continue;
        }
        visited += 1;
        if visited > MAX_LEAVES {
            return Err(Error::SubdivisionBudgetExceeded { survivors: queue.len() + leaves.len() });
        }
        if rho <= tiny {
            // already below the output radius: keep it as an uncertified ball
            leaves.push(Leaf {
                record: LeafRecord {
                    input_ball: idx,
                    center: c,
                    radius: rho,
                    frame: Frame { origin: c, ..Frame::identity() },
                    k1: 0,
                    k2: 0,
                    k1_swapped: 0,
                    k2_swapped: 0,
                    rho0: 0.0,
                    rho0_swapped: 0.0,
                    r1: 0.0,
                    r1_swapped: 0.0,
                    h_cartan: h,
                    bound_log: f64::INFINITY,
                    balls: 1,
                },
                balls: vec![c],
            });
            continue;
        }
        let leaf_seed = sampling::substream(seed, (idx as u64) << 32 | visited as u64).next_u64_det();
        let step = match frame_radii(f1, f2, c, leaf_seed) {
            Some((frame, r)) if rho <= (LEAF_W * r).min(0.125) => {
                leaves.push(process_leaf(f1, f2, idx, c, rho, frame, h, leaf_seed)?);
                continue;
            }
            // aim just below the certifiable radius, at most 8 levels of refinement at once
            Some((_, r)) => (0.8 * (LEAF_W * r).min(0.125)).clamp(rho / 8.0, rho / 2.0),
            None => rho / 2.0,
        };
        queue.extend(split_ball(c, rho, step).into_iter().map(|v| (v, step)).rev());
    }
    Ok(leaves)
}

trait NextDet {
    fn next_u64_det(self) -> u64;
}

impl NextDet for sampling::SeededRng {
    fn next_u64_det(mut self) -> u64 {
        rand::RngCore::next_u64(&mut self)
    }
}

/// Cover of `{|F| < e^{threshold}} ∩ B(0, 1/4)` by balls of radius `e^{-H}`.
pub fn build_cover(f1: &BivariatePoly, f2: &BivariatePoly, data: &TransversalityData, h: f64) -> Result<CoverResult> {
    build_cover_seeded(f1, f2, data, h, 0)
}

pub fn build_cover_seeded(f1: &BivariatePoly, f2: &BivariatePoly, data: &TransversalityData, h: f64, seed: u64) -> Result<CoverResult> {
    if !(h >= 1.0) {
        return Err(Error::InvalidArgument(format!("H must be >= 1, got {h}")));
    }
    if f1.is_zero() || f2.is_zero() {
        return Err(Error::AllZero);
    }
    let common = if f1.degz() >= 1 || f2.degz() >= 1 {
        crate::curve::resultant_vanishes(f1, f2)
    } else {
        crate::curve::resultant_vanishes(&f1.swap_vars(), &f2.swap_vars())
    };
    if common {
        return Err(Error::DegenerateResultant);
    }
    let per_ball: Vec<Vec<Leaf>> = (0..data.input_cover.balls.len())
        .into_par_iter()
        .map(|i| process_input_ball(f1, f2, data, i, h, seed))
        .collect::<Result<_>>()?;
    let leaves: Vec<Leaf> = per_ball.into_iter().flatten().collect();
    let threshold_log = leaves.iter().map(|l| l.record.bound_log).fold(-data.h0, f64::min);
    let r = (-h).exp();
    let level = threshold_log.exp();
    let mut centres: Vec<Point2> = leaves
        .iter()
        .flat_map(|l| l.balls.iter().copied())
        .filter(|&v| norm2(v) <= 0.25 + r)
        .filter(|&v| pair_lower_bound(f1, f2, v, r) < level)
        .collect();
    centres.sort_by(|a, b| {
        let ka = [a[0].re, a[0].im, a[1].re, a[1].im];
        let kb = [b[0].re, b[0].im, b[1].re, b[1].im];
        ka.partial_cmp(&kb).expect("finite centres")
    });
    centres.dedup_by(|a, b| dist2(*a, *b) <= 1e-12 * r);
    let k_bound = C_PIPELINE * data.k1.max(1) as f64 * data.b0.max(1.0).powi(2) * data.h0.powi(2);
    let count = centres.len();
    if count as f64 > k_bound {
        return Err(Error::InvalidArgument(format!("{count} balls exceed the recorded bound {k_bound}")));
    }
    let cover = Car20Cover { balls: centres.into_iter().map(|c| Ball { center: c, radius: r }).collect(), h, k: k_bound.floor() as usize };
    cover.validate()?;
    let exterior_certificate = exterior_check(f1, f2, &cover, threshold_log, 1024, seed)?;
    Ok(CoverResult {
        cover,
        threshold_log,
        reference_threshold_log: -h * data.b0 * data.b0 * data.h0,
        exterior_certificate,
        c_pipeline: C_PIPELINE,
        k_bound,
        k_ratio: count as f64 / (data.k1.max(1) as f64 * data.b0.max(1.0).powi(2) * data.h0.powi(2)),
        provenance: leaves.into_iter().map(|l| l.record).collect(),
    })
}

fn exterior_check(f1: &BivariatePoly, f2: &BivariatePoly, cover: &Car20Cover, threshold_log: f64, n: usize, seed: u64) -> Result<MinModulusCertificate> {
    let pts = exterior_points(cover, n, seed);
    let mut worst = ([ZERO, ZERO], f64::INFINITY);
    for &v in &pts {
        let l = log_norm(f1, f2, v);
        if l < worst.1 {
            worst = (v, l);
        }
    }
    if worst.1 < threshold_log {
        return Err(Error::BoundViolated { which: "cover exterior bound", worst: worst.0, margin: worst.1 - threshold_log });
    }
    Ok(MinModulusCertificate { lower_bound_log: threshold_log, sample_count: pts.len(), worst_point: worst.0.to_vec(), worst_value: worst.1 })
}

/// Points of `B(0,1/4)` outside the cover: half uniform, half at log-uniform
/// distance `[e^{-H}/100, 10 e^{-H}]` from a ball centre.
pub fn exterior_points(cover: &Car20Cover, n: usize, seed: u64) -> Vec<Point2> {
    let mut rng = sampling::rng(seed);
    let origin = [ZERO, ZERO];
    let r = cover.radius();
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while out.len() < n && attempts < 200 * n.max(1) {
        attempts += 1;
        let v = if attempts % 2 == 0 || cover.balls.is_empty() {
            sampling::uniform_ball(&mut rng, origin, 0.25)
        } else {
            let b = cover.balls[attempts / 2 % cover.balls.len()];
            sampling::log_shell(&mut rng, b.center, r / 100.0, 10.0 * r)
        };
        if norm2(v) <= 0.25 && !cartan::cover_membership(cover, &v) {
            out.push(v);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub threshold_log: f64,
    pub reference_threshold_log: f64,
    pub n_samples: usize,
    pub violations: usize,
    pub reference_violations: usize,
    #[serde(with = "crate::json::point4")]
    pub worst_point: Point2,
    /// `min log|F| - threshold` over the samples.
    pub worst_margin: f64,
    /// Margin quantiles at 0, 1%, 10%, 50%.
    pub margin_quantiles: [f64; 4],
}

/// Samples outside the cover and counts points with `log|F|` below the threshold.
pub fn verify_cover(f1: &BivariatePoly, f2: &BivariatePoly, result: &CoverResult, n_samples: usize, seed: u64) -> VerificationReport {
    let pts = exterior_points(&result.cover, n_samples, seed);
    let logs: Vec<f64> = pts.par_iter().map(|&v| log_norm(f1, f2, v)).collect();
    let t = result.threshold_log;
    let mut margins: Vec<f64> = logs.iter().map(|l| l - t).collect();
    let (mut worst_point, mut worst_margin) = ([ZERO, ZERO], f64::INFINITY);
    for (v, m) in pts.iter().zip(&margins) {
        if *m < worst_margin {
            worst_margin = *m;
            worst_point = *v;
        }
    }
    let violations = margins.iter().filter(|m| **m < 0.0).count();
    let reference_violations = logs.iter().filter(|l| **l < result.reference_threshold_log).count();
    margins.sort_by(f64::total_cmp);
    let q = |p: f64| margins.get(((margins.len() as f64 - 1.0) * p).round() as usize).copied().unwrap_or(f64::INFINITY);
    VerificationReport {
        threshold_log: t,
        reference_threshold_log: result.reference_threshold_log,
        n_samples: pts.len(),
        violations,
        reference_violations,
        worst_point,
        worst_margin,
        margin_quantiles: [q(0.0), q(0.01), q(0.1), q(0.5)],
    }
}

/// The same cover with every radius divided by `factor`.
pub fn shrunk(result: &CoverResult, factor: f64) -> CoverResult {
    CoverResult { cover: result.cover.scaled(1.0 / factor), ..result.clone() }
}
