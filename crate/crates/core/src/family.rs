//! Test families: characteristic determinants of quasi-periodic Schrödinger
//! operators, random normalized polynomials, and named examples.

use std::f64::consts::TAU;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::bernstein::{self, LogFn};
use crate::error::{Error, Result};
use crate::poly::{BivariatePoly, Point2, C64, ONE, ZERO};
use crate::sampling;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    TrigDeterminant,
    RandomPoly,
    Named,
}

/// Grid `c[m + k][n + k]` of a trigonometric polynomial
/// `V(z, w) = Σ c_{m,n} e(m z + n w)`, `e(ζ) = exp(2πiζ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFamilySpec {
    pub kind: FamilyKind,
    pub k: usize,
    pub coeffs: Vec<Vec<C64>>,
    pub omega: [f64; 2],
    pub lambda: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub seed: u64,
    /// Name for [`FamilyKind::Named`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

fn gaussian_grid(rows: usize, cols: usize, seed: u64) -> Vec<Vec<C64>> {
    let mut rng = sampling::rng(seed);
    let mut g: Vec<Vec<C64>> = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    C64::new(re, im)
                })
                .collect()
        })
        .collect();
    let norm = g.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    g.iter_mut().flatten().for_each(|c| *c /= norm);
    g
}

fn sphere_norm(grid: &[Vec<C64>]) -> f64 {
    grid.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>()
}

impl TestFamilySpec {
    /// Random trigonometric potential of degree `k` on the unit coefficient sphere.
    pub fn trig(k: usize, omega: [f64; 2], lambda: f64, n: usize, seed: u64) -> Self {
        let side = 2 * k + 1;
        TestFamilySpec { kind: FamilyKind::TrigDeterminant, k, coeffs: gaussian_grid(side, side, seed), omega, lambda, n, seed, name: None }
    }

    /// Random bivariate polynomial of degree `k` in each variable on the unit sphere.
    pub fn random_poly(k: usize, seed: u64) -> Self {
        TestFamilySpec { kind: FamilyKind::RandomPoly, k, coeffs: gaussian_grid(k + 1, k + 1, seed), omega: [0.0; 2], lambda: 0.0, n: 0, seed, name: None }
    }

    pub fn named(name: &str) -> Result<Self> {
        named_pair(name)?;
        Ok(TestFamilySpec { kind: FamilyKind::Named, k: 0, coeffs: Vec::new(), omega: [0.0; 2], lambda: 0.0, n: 0, seed: 0, name: Some(name.to_string()) })
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            FamilyKind::Named => {
                named_pair(self.name.as_deref().unwrap_or(""))?;
            }
            FamilyKind::TrigDeterminant | FamilyKind::RandomPoly => {
                let side = if self.kind == FamilyKind::TrigDeterminant { 2 * self.k + 1 } else { self.k + 1 };
                if self.coeffs.len() != side || self.coeffs.iter().any(|r| r.len() != side) {
                    return Err(Error::InvalidArgument(format!("coefficient grid must be {side} x {side}")));
                }
                if (sphere_norm(&self.coeffs) - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidArgument("coefficients must satisfy sum |c|^2 = 1".into()));
                }
                if self.kind == FamilyKind::TrigDeterminant && self.n < 1 {
                    return Err(Error::InvalidArgument("determinant size N must be >= 1".into()));
                }
            }
        }
        Ok(())
    }

    /// `V(v)` for complex `v`.
    pub fn potential(&self, v: Point2) -> C64 {
        let k = self.k as i64;
        let ez = (C64::i() * TAU * v[0]).exp();
        let ew = (C64::i() * TAU * v[1]).exp();
        let mut acc = ZERO;
        let mut pz = ez.powi(-(k as i32));
        for row in &self.coeffs {
            let mut pw = ew.powi(-(k as i32));
            for c in row {
                acc += c * pz * pw;
                pw *= ew;
            }
            pz *= ez;
        }
        acc
    }

    /// The polynomial of a `RandomPoly` or `Named` spec (`f1` for pairs).
    pub fn polynomial(&self) -> Result<BivariatePoly> {
        match self.kind {
            FamilyKind::RandomPoly => BivariatePoly::new(self.coeffs.clone()),
            FamilyKind::Named => Ok(named_pair(self.name.as_deref().unwrap_or(""))?.0),
            FamilyKind::TrigDeterminant => Err(Error::InvalidArgument("use dirichlet_determinant or taylor_truncation".into())),
        }
    }
}

/// Named pairs `(f1, f2)` used across the examples.
pub fn named_pair(name: &str) -> Result<(BivariatePoly, BivariatePoly)> {
    let b = |t: &[(usize, usize, f64)]| BivariatePoly::from_real_terms(t).expect("finite");
    match name {
        "example-logR" => Ok((b(&[(2, 0, 1.0), (0, 1, 1.0)]), b(&[(1, 1, 1.0)]))),
        "linear" => Ok((b(&[(1, 0, 1.0), (0, 1, -1.0)]), b(&[(1, 0, 1.0), (0, 1, 1.0)]))),
        "coordinates" => Ok((b(&[(1, 0, 1.0)]), b(&[(0, 1, 1.0)]))),
        "parabola-hyperbola" => Ok((b(&[(2, 0, 1.0), (0, 1, 1.0)]), b(&[(1, 1, 1.0), (0, 0, -0.05)]))),
        "bezout-four" => Ok((b(&[(2, 0, 1.0), (0, 1, -1.0)]), b(&[(1, 0, 1.0), (0, 2, -1.0)]))),
        _ => Err(Error::InvalidArgument(format!("unknown named example {name:?}"))),
    }
}

/// `value = mantissa · e^{log_prefactor}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledValue {
    pub mantissa: C64,
    pub log_prefactor: f64,
}

impl ScaledValue {
    pub fn value(&self) -> C64 {
        self.mantissa * self.log_prefactor.exp()
    }

    pub fn log_abs(&self) -> f64 {
        self.mantissa.norm().ln() + self.log_prefactor
    }
}

const RESCALE_AT: f64 = 1e150;

/// Characteristic determinant `f_N(v)` from
/// `D_n = λ V(v + (n-1)ω) D_{n-1} - D_{n-2}`, `D_0 = 1`, `D_{-1} = 0`.
pub fn dirichlet_determinant(spec: &TestFamilySpec, v: Point2) -> Result<ScaledValue> {
    if spec.kind != FamilyKind::TrigDeterminant {
        return Err(Error::InvalidArgument("spec is not a determinant family".into()));
    }
    spec.validate()?;
    let (mut prev, mut cur) = (ZERO, ONE);
    let mut log_prefactor = 0.0;
    for n in 1..=spec.n {
        let shift = (n - 1) as f64;
        let p = [v[0] + spec.omega[0] * shift, v[1] + spec.omega[1] * shift];
        let next = cur * spec.potential(p) * spec.lambda - prev;
        prev = cur;
        cur = next;
        let m = cur.norm().max(prev.norm());
        if m > RESCALE_AT {
            prev /= m;
            cur /= m;
            log_prefactor += m.ln();
        }
    }
    Ok(ScaledValue { mantissa: cur, log_prefactor })
}

/// Taylor truncation of `v ↦ f_N(r0 v)` at total degree `degree`, and a
/// Cauchy bound for the truncation error on the closed unit polydisk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub poly: BivariatePoly,
    pub error_bound: f64,
    /// `log` of the common factor divided out of the coefficients.
    pub log_scale: f64,
}

pub fn taylor_truncation(spec: &TestFamilySpec, r0: f64, degree: usize) -> Result<Truncation> {
    if !(r0 > 0.0) {
        return Err(Error::InvalidArgument("rescaling radius must be positive".into()));
    }
    // Taylor coefficients on the torus of radius `big` (a Cauchy radius > 1)
    let big = 2.0;
    let m = (2 * degree + 8).next_power_of_two();
    let mut vals = vec![vec![ScaledValue { mantissa: ZERO, log_prefactor: 0.0 }; m]; m];
    let mut log_sup = f64::NEG_INFINITY;
    for (a, row) in vals.iter_mut().enumerate() {
        for (b, slot) in row.iter_mut().enumerate() {
            let z = C64::from_polar(big, TAU * a as f64 / m as f64) * r0;
            let w = C64::from_polar(big, TAU * b as f64 / m as f64) * r0;
            *slot = dirichlet_determinant(spec, [z, w])?;
            log_sup = log_sup.max(slot.log_abs());
        }
    }
    let mut terms = Vec::new();
    for i in 0..=degree {
        for j in 0..=(degree - i) {
            let mut acc = ZERO;
            for (a, row) in vals.iter().enumerate() {
                for (b, s) in row.iter().enumerate() {
                    let phase = C64::from_polar(1.0, -TAU * ((i * a) as f64 + (j * b) as f64) / m as f64);
                    acc += s.mantissa * (s.log_prefactor - log_sup).exp() * phase;
                }
            }
            let c = acc / (m * m) as f64 / big.powi((i + j) as i32);
            terms.push((i, j, c));
        }
    }
    // |c_ab| ≤ sup / big^{a+b}; tail on the unit polydisk
    let tail: f64 = ((degree + 1)..(degree + 400)).map(|s| (s + 1) as f64 * big.powi(-(s as i32))).sum();
    Ok(Truncation { poly: BivariatePoly::from_terms(&terms)?, error_bound: tail, log_scale: log_sup })
}

/// `B_{f_N}(1/4; 0, R)` of `v ↦ log|f_N(r0 v)|`, maximised over `R ∈ {1/4, 1/8, 1/16}`.
pub fn dirichlet_b0(spec: &TestFamilySpec, r0: f64, budget: usize) -> Result<f64> {
    spec.validate()?;
    let f = LogFn(|v: Point2| {
        dirichlet_determinant(spec, [v[0] * r0, v[1] * r0]).map(|s| s.log_abs()).unwrap_or(f64::NEG_INFINITY)
    });
    let mut best: f64 = 0.0;
    for r in [0.25, 0.125, 0.0625] {
        let rep = bernstein::bernstein_exponent_fn(&f, 0.25, [ZERO, ZERO], r, budget)?;
        best = best.max(rep.b);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, lambda: f64) -> TestFamilySpec {
        TestFamilySpec::trig(2, [0.5f64.sqrt(), 3f64.sqrt() - 1.0], lambda, n, 7)
    }

    #[test]
    fn normalization() {
        let s = spec(4, 1.0);
        assert!((sphere_norm(&s.coeffs) - 1.0).abs() < 1e-12);
        s.validate().unwrap();
        let mut bad = s.clone();
        bad.coeffs[0][0] += 0.1;
        assert!(bad.validate().is_err());
        assert!((sphere_norm(&TestFamilySpec::random_poly(3, 2).coeffs) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_determinants() {
        let v = [C64::new(0.1, 0.02), C64::new(-0.3, 0.01)];
        let s1 = spec(1, 1.7);
        let d1 = dirichlet_determinant(&s1, v).unwrap().value();
        assert!((d1 - s1.potential(v) * 1.7).norm() < 1e-12);
        let s2 = spec(2, 1.7);
        let vw = [v[0] + s2.omega[0], v[1] + s2.omega[1]];
        let want = s2.potential(v) * s2.potential(vw) * 1.7 * 1.7 - 1.0;
        assert!((dirichlet_determinant(&s2, v).unwrap().value() - want).norm() < 1e-12);
        let s0 = spec(4, 0.0);
        assert!((dirichlet_determinant(&s0, v).unwrap().value() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn tridiagonal_oracle() {
        // direct LU determinant of the N×N tridiagonal matrix
        let s = spec(6, 2.3);
        let v = [C64::new(0.2, 0.05), C64::new(0.7, -0.02)];
        let n = s.n;
        let mut m = nalgebra::DMatrix::<C64>::zeros(n, n);
        for i in 0..n {
            let p = [v[0] + s.omega[0] * i as f64, v[1] + s.omega[1] * i as f64];
            m[(i, i)] = s.potential(p) * s.lambda;
            if i + 1 < n {
                m[(i, i + 1)] = ONE;
                m[(i + 1, i)] = ONE;
            }
        }
        let want = m.lu().determinant();
        let got = dirichlet_determinant(&s, v).unwrap().value();
        assert!((got - want).norm() < 1e-10 * want.norm().max(1.0));
    }

    #[test]
    fn large_n_does_not_overflow() {
        let s = spec(4000, 50.0);
        let d = dirichlet_determinant(&s, [C64::new(0.1, 0.3), ZERO]).unwrap();
        assert!(d.log_abs().is_finite() && d.log_abs() > 300.0);
        assert!(d.mantissa.norm() <= RESCALE_AT);
    }

    #[test]
    fn truncation_matches_function() {
        let s = spec(3, 0.8);
        let t = taylor_truncation(&s, 0.05, 10).unwrap();
        let v = [C64::new(0.3, -0.2), C64::new(0.1, 0.4)];
        let exact = dirichlet_determinant(&s, [v[0] * 0.05, v[1] * 0.05]).unwrap().value();
        let approx = t.poly.eval_at(v) * t.log_scale.exp();
        assert!((exact - approx).norm() <= t.error_bound * t.log_scale.exp() * 1.0001);
        assert!((exact - approx).norm() < 1e-4 * t.log_scale.exp());
    }

    #[test]
    fn named_examples() {
        let (f1, f2) = named_pair("example-logR").unwrap();
        assert_eq!((f1.total_degree(), f2.total_degree()), (2, 2));
        assert!(TestFamilySpec::named("nope").is_err());
        assert_eq!(TestFamilySpec::named("linear").unwrap().polynomial().unwrap().degz(), 1);
    }
}
