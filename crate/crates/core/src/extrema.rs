//! Extremal values of `log|p|` on circles and Jensen zero counts.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{UnivariatePoly, C64};
use crate::roots;

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const ANGLE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleExtrema {
    pub max_log_abs: f64,
    pub min_log_abs: f64,
    pub argmax_angle: f64,
    pub argmin_angle: f64,
    /// A sample landed exactly on a zero; `min_log_abs` is then `-inf`.
    pub hit_zero: bool,
}

/// Sample count used when the caller has no preference.
pub fn default_samples(degree: isize) -> usize {
    4 * degree.max(0) as usize + 64
}

/// Max and min of `log|p|` on the circle `|z - center| = radius`.
pub fn circle_extrema(
    p: &UnivariatePoly,
    center: C64,
    radius: f64,
    n_samples: usize,
) -> Result<CircleExtrema> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument(format!("radius must be > 0, got {radius}")));
    }
    if n_samples < 8 {
        return Err(Error::InvalidArgument("need at least 8 samples".into()));
    }
    if p.is_zero() {
        return Ok(CircleExtrema {
            max_log_abs: f64::NEG_INFINITY,
            min_log_abs: f64::NEG_INFINITY,
            argmax_angle: 0.0,
            argmin_angle: 0.0,
            hit_zero: true,
        });
    }
    Ok(extrema_on_circle(
        |t| p.log_abs(center + C64::from_polar(radius, t)),
        n_samples,
    ))
}

/// Max/min over `θ ∈ [0, 2π)` of a periodic function, sampled uniformly and
/// then refined by golden-section search around the best samples.
pub fn extrema_on_circle<F: Fn(f64) -> f64>(f: F, n: usize) -> CircleExtrema {
    let h = TAU / n as f64;
    let values: Vec<f64> = (0..n).map(|k| f(k as f64 * h)).collect();
    let (imax, _) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc });
    let (imin, vmin) = values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (k, &v)| if v < acc.1 { (k, v) } else { acc });

    let t0 = imax as f64 * h;
    let (argmax_angle, max_log_abs) = golden_max(&f, t0 - h, t0 + h);
    let max_log_abs = max_log_abs.max(values[imax]);

    let hit_zero = vmin == f64::NEG_INFINITY;
    let (argmin_angle, min_log_abs) = if hit_zero {
        (imin as f64 * h, f64::NEG_INFINITY)
    } else {
        let t1 = imin as f64 * h;
        let (t, v) = golden_max(&|t| -f(t), t1 - h, t1 + h);
        (t, (-v).min(vmin))
    };
    CircleExtrema {
        max_log_abs,
        min_log_abs,
        argmax_angle: argmax_angle.rem_euclid(TAU),
        argmin_angle: argmin_angle.rem_euclid(TAU),
        hit_zero,
    }
}

/// Golden-section maximisation on `[a, b]`.
pub(crate) fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> (f64, f64) {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > ANGLE_TOL {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `M_p(center, r) = sup_{D(center, r)} log|p|`, attained on the boundary.
pub fn max_log_disk(p: &UnivariatePoly, center: C64, r: f64) -> Result<f64> {
    Ok(circle_extrema(p, center, r, default_samples(p.degree()).max(256))?.max_log_abs)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JensenCount {
    /// Zeros in the open disk `D(center, r)`, with multiplicity.
    pub count: usize,
    /// `(M_p(center,R) - log|p(center)|) / log(R/r)`; `None` when `p(center) = 0`.
    pub jensen_bound: Option<f64>,
}

pub fn jensen_zero_count(
    p: &UnivariatePoly,
    center: C64,
    r: f64,
    big_r: f64,
) -> Result<JensenCount> {
    if !(0.0 < r && r < big_r) {
        return Err(Error::InvalidArgument(format!("need 0 < r < R, got r={r}, R={big_r}")));
    }
    if p.is_zero() {
        return Err(Error::AllZero);
    }
    let count = if p.degree() >= 1 {
        roots::roots(p, roots::DEFAULT_TOL)?
            .into_iter()
            .filter(|z| (z - center).norm() < r)
            .count()
    } else {
        0
    };
    let at_center = p.log_abs(center);
    let jensen_bound = if at_center == f64::NEG_INFINITY {
        None
    } else {
        let m = max_log_disk(p, center, big_r)?;
        Some((m - at_center) / (big_r / r).ln())
    };
    Ok(JensenCount { count, jensen_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ONE;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn example_square_on_shifted_circle() {
        let r = 0.1;
        let p = UnivariatePoly::monomial(ONE, 2);
        let e = circle_extrema(&p, C64::new(r / 4.0, 0.0), r / 4.0, 64).unwrap();
        assert!((e.max_log_abs - 2.0 * 0.05f64.ln()).abs() < 1e-12);
        assert!((e.max_log_abs - (-5.99146)).abs() < 1e-5);
        assert!(e.argmax_angle.abs() < 1e-6 || (e.argmax_angle - TAU).abs() < 1e-6);
    }

    #[test]
    fn constant_modulus() {
        let p = UnivariatePoly::monomial(ONE, 1);
        let e = circle_extrema(&p, C64::new(0.0, 0.0), 1.0, 16).unwrap();
        assert!(e.max_log_abs.abs() < 1e-14 && e.min_log_abs.abs() < 1e-14);
    }

    #[test]
    fn against_dense_scan() {
        // (z-1)(z+1) on |z| = 2: brute-force 10^6-point scan
        let p = UnivariatePoly::from_real(&[-1.0, 0.0, 1.0]).unwrap();
        let n = 1_000_000;
        let (mut mx, mut mn) = (f64::NEG_INFINITY, f64::INFINITY);
        for k in 0..n {
            let v = p.log_abs(C64::from_polar(2.0, TAU * k as f64 / n as f64));
            mx = mx.max(v);
            mn = mn.min(v);
        }
        let e = circle_extrema(&p, C64::new(0.0, 0.0), 2.0, default_samples(2)).unwrap();
        assert!((e.max_log_abs - mx).abs() < 1e-9);
        assert!((e.min_log_abs - mn).abs() < 1e-9);
        assert!((e.max_log_abs - 5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn zero_on_sample_reports_minus_infinity() {
        let p = UnivariatePoly::from_real(&[-1.0, 1.0]).unwrap();
        let e = circle_extrema(&p, C64::new(0.0, 0.0), 1.0, 8).unwrap();
        assert!(e.hit_zero);
        assert_eq!(e.min_log_abs, f64::NEG_INFINITY);
    }

    #[test]
    fn max_is_monotone_in_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let coeffs: Vec<C64> = (0..6).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
            let p = UnivariatePoly::new(coeffs).unwrap();
            let c = C64::new(rng.random::<f64>() - 0.5, 0.0);
            let mut last = f64::NEG_INFINITY;
            for k in 1..=12 {
                let m = max_log_disk(&p, c, 0.1 * k as f64).unwrap();
                assert!(m >= last - 1e-12);
                last = m;
            }
        }
    }

    #[test]
    fn jensen_examples() {
        let cube = UnivariatePoly::monomial(ONE, 3);
        let j = jensen_zero_count(&cube, C64::new(1.0, 0.0), 0.5, 2.0).unwrap();
        assert_eq!(j.count, 0);
        let j = jensen_zero_count(&cube, C64::new(0.1, 0.0), 0.5, 2.0).unwrap();
        assert_eq!(j.count, 3);
        // (log 2.1^3 - log 0.1^3) / log 4
        let expected = 3.0 * (2.1f64 / 0.1).ln() / 4f64.ln();
        assert!((j.jensen_bound.unwrap() - expected).abs() < 1e-9);
        assert!(j.jensen_bound.unwrap() >= 3.0);
        let far = UnivariatePoly::from_real(&[12.0, -7.0, 1.0]).unwrap();
        assert_eq!(jensen_zero_count(&far, C64::new(0.0, 0.0), 1.0, 2.0).unwrap().count, 0);
        let j = jensen_zero_count(&cube, C64::new(0.0, 0.0), 0.5, 2.0).unwrap();
        assert_eq!(j.count, 3);
        assert!(j.jensen_bound.is_none());
    }

    #[test]
    fn jensen_count_below_bound_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let coeffs: Vec<C64> = (0..7).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
            let p = UnivariatePoly::new(coeffs).unwrap();
            let j = jensen_zero_count(&p, C64::new(0.0, 0.0), 0.5, 1.5).unwrap();
            assert!(j.count as f64 <= j.jensen_bound.unwrap() + 1e-9);
        }
    }

    #[test]
    fn mean_of_log_on_quarter_circles() {
        // (1/2π)∮ log|z - a + e^{iθ}/4| dθ >= log(1/4)
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let nodes = 2048;
        for _ in 0..100 {
            let d = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            let mean: f64 = (0..nodes)
                .map(|k| (d + C64::from_polar(0.25, TAU * (k as f64 + 0.5) / nodes as f64)).norm().ln())
                .sum::<f64>()
                / nodes as f64;
            assert!(mean - 0.25f64.ln() >= -1e-6, "mean {mean}");
        }
    }
}
