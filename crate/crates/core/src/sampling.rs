//! Seeded sampling in disks, balls and spheres.
//!
//! All randomness flows through ChaCha8 so runs are reproducible across
//! platforms.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::poly::{Point2, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derived stream for subproblem `index` of a run seeded with `seed`.
pub fn substream(seed: u64, index: u64) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index + 1);
    r
}

pub fn uniform_disk<R: Rng>(rng: &mut R, center: C64, radius: f64) -> C64 {
    let r = radius * rng.random::<f64>().sqrt();
    center + C64::from_polar(r, TAU * rng.random::<f64>())
}

/// Point at log-uniform distance in `[r_in, r_out]` from `center`.
pub fn log_annulus<R: Rng>(rng: &mut R, center: C64, r_in: f64, r_out: f64) -> C64 {
    let t = rng.random::<f64>();
    let r = (r_in.ln() + t * (r_out / r_in).ln()).exp();
    center + C64::from_polar(r, TAU * rng.random::<f64>())
}

/// Uniform point on the unit sphere `S³ ⊂ C²`.
pub fn sphere_point<R: Rng>(rng: &mut R) -> Point2 {
    loop {
        let g: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let n = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return [C64::new(g[0] / n, g[1] / n), C64::new(g[2] / n, g[3] / n)];
        }
    }
}

pub fn uniform_ball<R: Rng>(rng: &mut R, center: Point2, radius: f64) -> Point2 {
    let s = sphere_point(rng);
    let r = radius * rng.random::<f64>().powf(0.25);
    [center[0] + s[0] * r, center[1] + s[1] * r]
}

/// Point at log-uniform distance in `[r_in, r_out]` from `center` in C².
pub fn log_shell<R: Rng>(rng: &mut R, center: Point2, r_in: f64, r_out: f64) -> Point2 {
    let s = sphere_point(rng);
    let t = rng.random::<f64>();
    let r = (r_in.ln() + t * (r_out / r_in).ln()).exp();
    [center[0] + s[0] * r, center[1] + s[1] * r]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::norm2;

    #[test]
    fn sphere_points_have_unit_norm() {
        let mut r = rng(1);
        for _ in 0..1000 {
            assert!((norm2(sphere_point(&mut r)) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ball_and_disk_stay_inside() {
        let mut r = rng(2);
        let c = [C64::new(0.1, 0.0), C64::new(0.0, -0.2)];
        for _ in 0..1000 {
            assert!(crate::poly::dist2(uniform_ball(&mut r, c, 0.3), c) <= 0.3 + 1e-15);
            assert!((uniform_disk(&mut r, c[0], 0.5) - c[0]).norm() <= 0.5 + 1e-15);
            let a = log_annulus(&mut r, c[0], 0.01, 0.1);
            let d = (a - c[0]).norm();
            assert!((0.01 - 1e-15..=0.1 + 1e-15).contains(&d));
        }
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = substream(5, 0).random();
        let b: f64 = substream(5, 0).random();
        let c: f64 = substream(5, 1).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
