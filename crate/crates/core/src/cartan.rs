//! Cartan covers in C and C².
//!
//! The one-dimensional construction is the classical greedy grouping: with
//! `n` points and a scale `h`, repeatedly take the largest `λ` such that a
//! disk of radius `λh/n` holds `λ` of the remaining points, remove them, and
//! finally double every radius. Outside the doubled disks
//! `∏|z - a_k| > (h/e)^n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extrema;
use crate::poly::{dist2, log_abs, Ball, Disk, Point2, UnivariatePoly, C64};
use crate::roots;
use crate::sampling;

const CONTAIN_TOL: f64 = 1e-12;

/// Finite union of disks with total radius below `e^{-H}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Car1Cover {
    pub disks: Vec<Disk>,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "K")]
    pub k: usize,
}

/// Finite union of balls of common radius `e^{-H}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Car20Cover {
    pub balls: Vec<Ball>,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "K")]
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinModulusCertificate {
    pub lower_bound_log: f64,
    pub sample_count: usize,
    /// Coordinates of the worst sample (one entry in C, two in C²).
    pub worst_point: Vec<C64>,
    pub worst_value: f64,
}

pub trait Cover {
    type Point;
    fn contains(&self, p: &Self::Point) -> bool;
}

impl Cover for Car1Cover {
    type Point = C64;
    fn contains(&self, z: &C64) -> bool {
        self.disks.iter().any(|d| d.contains(*z))
    }
}

impl Cover for Car20Cover {
    type Point = Point2;
    fn contains(&self, v: &Point2) -> bool {
        self.balls.iter().any(|b| b.contains(*v))
    }
}

/// Closed membership test.
pub fn cover_membership<C: Cover>(cover: &C, point: &C::Point) -> bool {
    cover.contains(point)
}

impl Car1Cover {
    pub fn total_radius(&self) -> f64 {
        self.disks.iter().map(|d| d.radius).sum()
    }

    /// Count, total radius and zero containment.
    pub fn validate(&self, zeros: &[C64]) -> Result<()> {
        if self.disks.len() > self.k {
            return Err(Error::InvalidArgument(format!(
                "{} disks exceed K = {}",
                self.disks.len(),
                self.k
            )));
        }
        if self.total_radius() > (-self.h).exp() {
            return Err(Error::InvalidArgument(format!(
                "total radius {} exceeds e^-H = {}",
                self.total_radius(),
                (-self.h).exp()
            )));
        }
        for d in &self.disks {
            if !zeros.iter().any(|z| (z - d.center).norm() <= d.radius * (1.0 + CONTAIN_TOL)) {
                return Err(Error::InvalidArgument(format!("disk at {} holds no zero", d.center)));
            }
        }
        Ok(())
    }
}

impl Car20Cover {
    pub fn radius(&self) -> f64 {
        (-self.h).exp()
    }

    pub fn validate(&self) -> Result<()> {
        if self.balls.len() > self.k {
            return Err(Error::InvalidArgument(format!(
                "{} balls exceed K = {}",
                self.balls.len(),
                self.k
            )));
        }
        let r = self.radius();
        for b in &self.balls {
            if (b.radius - r).abs() > 1e-12 * r {
                return Err(Error::InvalidArgument(format!(
                    "ball radius {} differs from e^-H = {r}",
                    b.radius
                )));
            }
        }
        Ok(())
    }

    /// Copy with every radius multiplied by `factor`; `H` is adjusted so the
    /// uniform-radius invariant is kept.
    pub fn scaled(&self, factor: f64) -> Self {
        let h = self.h - factor.ln();
        let r = (-h).exp();
        Car20Cover {
            balls: self.balls.iter().map(|b| Ball { center: b.center, radius: r }).collect(),
            h,
            k: self.k,
        }
    }
}

/// Largest number of points in a closed disk of radius `r`, with a center
/// achieving it. Candidate centers are the points themselves and the
/// centers of radius-`r` circles through pairs of points.
fn max_points_in_disk(pts: &[C64], r: f64) -> (C64, Vec<usize>) {
    let tol = CONTAIN_TOL * (1.0 + r);
    let inside = |c: C64| -> Vec<usize> {
        (0..pts.len()).filter(|&k| (pts[k] - c).norm() <= r + tol).collect()
    };
    let mut best = (pts[0], inside(pts[0]));
    let consider = |c: C64, best: &mut (C64, Vec<usize>)| {
        let ins = inside(c);
        if ins.len() > best.1.len() {
            *best = (c, ins);
        }
    };
    for &p in pts.iter().skip(1) {
        consider(p, &mut best);
    }
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let d = pts[j] - pts[i];
            let dn = d.norm();
            if dn == 0.0 || dn > 2.0 * r + tol {
                continue;
            }
            let mid = pts[i] + d * 0.5;
            let h = (r * r - dn * dn / 4.0).max(0.0).sqrt();
            let perp = C64::new(-d.im, d.re) / dn;
            consider(mid + perp * h, &mut best);
            consider(mid - perp * h, &mut best);
        }
    }
    best
}

/// Merge overlapping disks into enclosing disks until none overlap.
fn merge_disks(mut disks: Vec<Disk>) -> Vec<Disk> {
    loop {
        let mut merged = false;
        'outer: for i in 0..disks.len() {
            for j in (i + 1)..disks.len() {
                let (a, b) = (disks[i], disks[j]);
                let d = (b.center - a.center).norm();
                if d < a.radius + b.radius {
                    let enclosing = if d + b.radius <= a.radius {
                        a
                    } else if d + a.radius <= b.radius {
                        b
                    } else {
                        let r = (d + a.radius + b.radius) / 2.0;
                        let c = a.center + (b.center - a.center) * ((r - a.radius) / d);
                        Disk { center: c, radius: r }
                    };
                    disks[i] = enclosing;
                    disks.swap_remove(j);
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            return disks;
        }
    }
}

/// `n log(e^{-H} / (4 e n))`: the certified lower bound for `log ∏|z - a_k|`
/// outside the cover.
pub fn cartan_log_bound(n: usize, h: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    n * (-h - (4.0 * std::f64::consts::E * n).ln())
}

/// Cartan cover of `zeros` with total radius at most `e^{-H}`, and the lower
/// bound on `log ∏|z - a_k|` valid outside it.
pub fn cartan_cover_1d(zeros: &[C64], h: f64) -> Result<(Car1Cover, f64)> {
    if !(h >= 1.0) || !h.is_finite() {
        return Err(Error::InvalidArgument(format!("H must be >= 1, got {h}")));
    }
    if zeros.is_empty() {
        return Err(Error::InvalidArgument("need at least one zero".into()));
    }
    if zeros.iter().any(|z| !crate::poly::is_finite(*z)) {
        return Err(Error::NonFinite);
    }
    let n = zeros.len();
    // doubled radii sum to 2h' < e^{-H}
    let hp = (-h).exp() * (1.0 - 1e-9) / 2.0;
    let mut remaining: Vec<C64> = zeros.to_vec();
    let mut disks = Vec::new();
    while !remaining.is_empty() {
        let mut chosen = None;
        for lambda in (1..=remaining.len()).rev() {
            let r = lambda as f64 * hp / n as f64;
            let (c, ins) = max_points_in_disk(&remaining, r);
            if ins.len() >= lambda {
                chosen = Some((c, r, ins));
                break;
            }
        }
        let (c, r, ins) = chosen.expect("lambda = 1 always succeeds");
        disks.push(Disk { center: c, radius: 2.0 * r });
        let mut k = 0;
        remaining.retain(|_| {
            let keep = !ins.contains(&k);
            k += 1;
            keep
        });
    }
    let disks = merge_disks(disks);
    let cover = Car1Cover { k: n, disks, h };
    cover.validate(zeros)?;
    Ok((cover, cartan_log_bound(n, h)))
}

/// Sample count and seed used by [`cartan_cover_poly`].
pub const DEFAULT_CERT_SAMPLES: usize = 1024;

/// Cartan cover of the zeros of `p` near `domain` together with a lower
/// bound for `log|p|` on `domain` minus the cover.
pub fn cartan_cover_poly(
    p: &UnivariatePoly,
    domain: Disk,
    h: f64,
) -> Result<(Car1Cover, MinModulusCertificate)> {
    cartan_cover_poly_with(p, domain, h, DEFAULT_CERT_SAMPLES, 0)
}

pub fn cartan_cover_poly_with(
    p: &UnivariatePoly,
    domain: Disk,
    h: f64,
    n_samples: usize,
    seed: u64,
) -> Result<(Car1Cover, MinModulusCertificate)> {
    if p.is_zero() {
        return Err(Error::AllZero);
    }
    if !(h >= 1.0) {
        return Err(Error::InvalidArgument(format!("H must be >= 1, got {h}")));
    }
    if !(domain.radius > 0.0) {
        return Err(Error::InvalidArgument("domain radius must be positive".into()));
    }
    let c = domain.center;
    let rho = domain.radius;
    let all = if p.degree() >= 1 { roots::roots(p, roots::DEFAULT_TOL)? } else { Vec::new() };
    let (inner, outer): (Vec<C64>, Vec<C64>) =
        all.into_iter().partition(|z| (z - c).norm() < 3.0 * rho);

    let (cover, poly_lb) = if inner.is_empty() {
        (Car1Cover { disks: Vec::new(), h, k: 0 }, 0.0)
    } else {
        cartan_cover_1d(&inner, h)?
    };

    // cofactor h = lead · ∏_{outer} (z - b), zero-free on D(c, 3ρ)
    let lead = p.leading();
    let cofactor = |z: C64| -> f64 {
        log_abs(lead) + outer.iter().map(|b| (z - b).norm().ln()).sum::<f64>()
    };
    let direct = log_abs(lead) + outer.iter().map(|b| ((b - c).norm() - rho).ln()).sum::<f64>();
    let harnack = {
        // Harnack on D(c, 3ρ) at distance ρ: factor 2ρ/(3ρ - ρ) = 1
        let at_c = cofactor(c);
        let m = extrema::extrema_on_circle(
            |t| cofactor(c + C64::from_polar(3.0 * rho, t)),
            extrema::default_samples(outer.len() as isize),
        )
        .max_log_abs;
        at_c - (m - at_c)
    };
    let cofactor_lb = direct.max(harnack);
    let lower_bound_log = poly_lb + cofactor_lb;

    let mut rng = sampling::rng(seed);
    let mut worst = (c, f64::INFINITY);
    let mut taken = 0;
    let mut attempts = 0;
    while taken < n_samples && attempts < 50 * n_samples.max(1) {
        attempts += 1;
        let z = if attempts % 2 == 0 || cover.disks.is_empty() {
            sampling::uniform_disk(&mut rng, c, rho)
        } else {
            let d = cover.disks[attempts % cover.disks.len()];
            sampling::log_annulus(&mut rng, d.center, d.radius, 4.0 * d.radius)
        };
        if !domain.contains(z) || cover.contains(&z) {
            continue;
        }
        taken += 1;
        let v = p.log_abs(z);
        if v < worst.1 {
            worst = (z, v);
        }
    }
    let cert = MinModulusCertificate {
        lower_bound_log,
        sample_count: taken,
        worst_point: vec![worst.0],
        worst_value: worst.1,
    };
    if taken > 0 && worst.1 < lower_bound_log {
        return Err(Error::BoundViolated {
            which: "cartan exterior bound",
            worst: [worst.0, C64::new(0.0, 0.0)],
            margin: worst.1 - lower_bound_log,
        });
    }
    Ok((cover, cert))
}

/// Points of `domain` outside `cover`, half drawn just outside the disks.
pub fn exterior_samples(cover: &Car1Cover, domain: Disk, n: usize, seed: u64) -> Vec<C64> {
    let mut rng = sampling::rng(seed);
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while out.len() < n && attempts < 100 * n.max(1) {
        attempts += 1;
        let z = if attempts % 2 == 0 || cover.disks.is_empty() {
            sampling::uniform_disk(&mut rng, domain.center, domain.radius)
        } else {
            let d = cover.disks[attempts % cover.disks.len()];
            sampling::log_annulus(&mut rng, d.center, d.radius * (1.0 + 1e-9), 3.0 * d.radius)
        };
        if domain.contains(z) && !cover.contains(&z) {
            out.push(z);
        }
    }
    out
}

/// Minimum distance between `v` and the ball centers, minus the radius.
pub fn signed_distance(cover: &Car20Cover, v: Point2) -> f64 {
    cover
        .balls
        .iter()
        .map(|b| dist2(v, b.center) - b.radius)
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{ONE, ZERO};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn log_prod(zeros: &[C64], z: C64) -> f64 {
        zeros.iter().map(|a| (z - a).norm().ln()).sum()
    }

    #[test]
    fn single_and_double_zero() {
        let (c, lb) = cartan_cover_1d(&[ZERO], 3.0).unwrap();
        assert_eq!(c.disks.len(), 1);
        assert!((c.disks[0].radius - (-3.0f64).exp()).abs() < 2e-9 * (-3.0f64).exp());
        assert!((-3.0f64) >= lb);
        let (c, lb) = cartan_cover_1d(&[ZERO, ZERO], 3.0).unwrap();
        assert_eq!(c.disks.len(), 1);
        assert!(c.disks[0].center.norm() < 1e-15);
        assert!(c.total_radius() <= (-3.0f64).exp());
        // outside: |z|^2 >= e^-6 up to the 1e-9 shave
        let r = c.disks[0].radius * (1.0 + 1e-12);
        assert!(2.0 * r.ln() >= -6.0 - 1e-8 && 2.0 * r.ln() >= lb);
    }

    #[test]
    fn random_four_zeros_exterior() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let zeros: Vec<C64> = (0..4).map(|_| sampling::uniform_disk(&mut rng, ZERO, 1.0)).collect();
        let (cover, lb) = cartan_cover_1d(&zeros, 5.0).unwrap();
        assert!((lb - 4.0 * ((-5.0f64).exp() / (16.0 * std::f64::consts::E)).ln()).abs() < 1e-12);
        let dom = Disk::new(ZERO, 2.0).unwrap();
        let pts = exterior_samples(&cover, dom, 10_000, 1);
        let worst = pts.iter().map(|z| log_prod(&zeros, *z)).fold(f64::INFINITY, f64::min);
        assert!(worst >= lb, "{worst} < {lb}");
    }

    #[test]
    fn poly_examples() {
        let z = UnivariatePoly::monomial(ONE, 1);
        let (c, cert) = cartan_cover_poly(&z, Disk::new(ZERO, 1.0).unwrap(), 2.0).unwrap();
        assert_eq!(c.disks.len(), 1);
        assert!(c.disks[0].center.norm() < 1e-12);
        assert!((c.disks[0].radius - (-2.0f64).exp()).abs() < 1e-9);
        assert!(cert.worst_value >= cert.lower_bound_log);

        let q = UnivariatePoly::from_real(&[-1.0, 0.0, 1.0]).unwrap();
        let (c, _) = cartan_cover_poly(&q, Disk::new(ZERO, 2.0).unwrap(), 3.0).unwrap();
        assert_eq!(c.disks.len(), 2);
        assert!(c.contains(&C64::new(1.0, 0.0)) && c.contains(&C64::new(-1.0, 0.0)));
        assert!(matches!(
            cartan_cover_poly(&UnivariatePoly::zero(), Disk::new(ZERO, 1.0).unwrap(), 2.0),
            Err(Error::AllZero)
        ));
    }

    #[test]
    fn random_degree_five_certificate() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let coeffs: Vec<C64> = (0..6).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let p = UnivariatePoly::new(coeffs).unwrap();
        let (_, cert) = cartan_cover_poly_with(&p, Disk::new(ZERO, 1.0).unwrap(), 4.0, 10_000, 3).unwrap();
        assert_eq!(cert.sample_count, 10_000);
        assert!(cert.worst_value >= cert.lower_bound_log);
    }

    #[test]
    fn membership() {
        let (c, _) = cartan_cover_1d(&[C64::new(0.3, 0.1), C64::new(-0.5, 0.2)], 2.0).unwrap();
        let d = c.disks[0];
        assert!(cover_membership(&c, &d.center));
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..1000 {
            let z = sampling::uniform_disk(&mut rng, ZERO, 1.0);
            let oracle = c.disks.iter().any(|d| (z - d.center).norm() <= d.radius);
            assert_eq!(cover_membership(&c, &z), oracle);
        }
        let far = C64::new(5.0, 0.0);
        let single = Car1Cover { disks: vec![Disk::new(ZERO, 1.0).unwrap()], h: 1.0, k: 1 };
        assert!(!cover_membership(&single, &(far * 0.0 + C64::new(1.0 + 1e-12, 0.0))));
    }

    #[test]
    fn translation_covariance() {
        let zeros = [C64::new(0.1, 0.2), C64::new(0.5, -0.3), C64::new(-0.4, 0.0)];
        let shift = C64::new(0.7, -1.1);
        let rot = C64::from_polar(1.0, 0.9);
        let (a, _) = cartan_cover_1d(&zeros, 3.0).unwrap();
        let moved: Vec<C64> = zeros.iter().map(|z| rot * z + shift).collect();
        let (b, _) = cartan_cover_1d(&moved, 3.0).unwrap();
        assert_eq!(a.disks.len(), b.disks.len());
        for d in &a.disks {
            let c = rot * d.center + shift;
            assert!(b.disks.iter().any(|e| (e.center - c).norm() < 1e-9 && (e.radius - d.radius).abs() < 1e-15));
        }
    }

    #[test]
    fn car20_validation_and_scaling() {
        let r = (-4.0f64).exp();
        let c = Car20Cover { balls: vec![Ball { center: [ZERO, ZERO], radius: r }], h: 4.0, k: 1 };
        c.validate().unwrap();
        let s = c.scaled(0.1);
        s.validate().unwrap();
        assert!((s.balls[0].radius - r / 10.0).abs() < 1e-15);
        assert!(cover_membership(&c, &[ZERO, C64::new(r, 0.0)]));
        assert!(!cover_membership(&c, &[ZERO, C64::new(r * (1.0 + 1e-9), 0.0)]));
    }

    proptest::proptest! {
        #[test]
        fn invariants_and_monotonicity(seed in 0u64..5000, n in 1usize..7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let zeros: Vec<C64> = (0..n).map(|_| sampling::uniform_disk(&mut rng, ZERO, 1.0)).collect();
            let mut last = f64::INFINITY;
            for h in [3.0, 5.0, 8.0] {
                let (c, _) = cartan_cover_1d(&zeros, h).unwrap();
                c.validate(&zeros).unwrap();
                proptest::prop_assert!(c.disks.len() <= n);
                proptest::prop_assert!(c.total_radius() <= last);
                last = c.total_radius();
            }
        }
    }
}
