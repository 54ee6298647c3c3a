//! Dense complex polynomials in one and two variables.
//!
//! Univariate coefficients are stored lowest degree first. Bivariate
//! coefficients live on a rectangular grid `c[i][j]` multiplying `z^i w^j`.
//! Trailing zero rows and columns are always trimmed, so the stored shape
//! determines `degz` and `degw`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// A point of C².
pub type Point2 = [C64; 2];

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn is_finite(c: C64) -> bool {
    c.re.is_finite() && c.im.is_finite()
}

/// Euclidean norm of a point of C².
pub fn norm2(v: Point2) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

pub fn dist2(a: Point2, b: Point2) -> f64 {
    norm2([a[0] - b[0], a[1] - b[1]])
}

/// Hermitian inner product `<a, b> = Σ a_k conj(b_k)`.
pub fn inner2(a: Point2, b: Point2) -> C64 {
    a[0] * b[0].conj() + a[1] * b[1].conj()
}

/// `log |c|`, with `-inf` for zero.
pub fn log_abs(c: C64) -> f64 {
    let n = c.norm();
    if n == 0.0 {
        f64::NEG_INFINITY
    } else {
        n.ln()
    }
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "crate::json::PolyJson", into = "crate::json::PolyJson")]
pub struct UnivariatePoly {
    coeffs: Vec<C64>,
}

impl TryFrom<Vec<C64>> for UnivariatePoly {
    type Error = Error;
    fn try_from(v: Vec<C64>) -> Result<Self> {
        UnivariatePoly::new(v)
    }
}

impl From<UnivariatePoly> for Vec<C64> {
    fn from(p: UnivariatePoly) -> Self {
        p.coeffs
    }
}

impl UnivariatePoly {
    /// Builds a polynomial from coefficients `c_0, c_1, ...`.
    pub fn new(mut coeffs: Vec<C64>) -> Result<Self> {
        if !coeffs.iter().all(|&c| is_finite(c)) {
            return Err(Error::NonFinite);
        }
        while coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c]).expect("finite constant")
    }

    pub fn monomial(c: C64, n: usize) -> Self {
        let mut coeffs = vec![ZERO; n + 1];
        coeffs[n] = c;
        Self::new(coeffs).expect("finite monomial")
    }

    /// `lead * Π (z - r)`.
    pub fn from_roots(lead: C64, roots: &[C64]) -> Self {
        let mut coeffs = vec![lead];
        for &r in roots {
            let mut next = vec![ZERO; coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * r;
            }
            coeffs = next;
        }
        Self::new(coeffs).expect("finite roots")
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Degree, with `-1` for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or(ZERO)
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    /// Horner evaluation, highest degree first.
    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    pub fn eval_with_derivative(&self, z: C64) -> (C64, C64) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn log_abs(&self, z: C64) -> f64 {
        log_abs(self.eval(z))
    }

    /// `Σ |c_j| max(1,|z|)^j`, the scale used for backward-error residuals.
    pub fn scale_at(&self, z: C64) -> f64 {
        let r = z.norm().max(1.0);
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        Self::new(coeffs).expect("finite derivative")
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect()).expect("finite scaling")
    }

    /// `p(a + b z)`.
    pub fn compose_affine(&self, a: C64, b: C64) -> Self {
        let mut out = vec![ZERO; self.coeffs.len()];
        // Horner in polynomial arithmetic: acc = acc * (a + b z) + c
        for &c in self.coeffs.iter().rev() {
            let mut next = vec![ZERO; out.len()];
            for k in 0..out.len() {
                next[k] += out[k] * a;
                if k + 1 < next.len() {
                    next[k + 1] += out[k] * b;
                }
            }
            next[0] += c;
            out = next;
        }
        Self::new(out).expect("finite composition")
    }

    /// Drops leading coefficients whose magnitude is below `tol * max|c|`.
    pub fn trim_relative(&self, tol: f64) -> Self {
        let m = self.max_abs_coeff();
        let mut coeffs = self.coeffs.clone();
        while let Some(c) = coeffs.last() {
            if c.norm() <= tol * m {
                coeffs.pop();
            } else {
                break;
            }
        }
        Self { coeffs }
    }

    /// Quotient and remainder of division by a monic-or-not divisor.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        if divisor.is_zero() {
            return Err(Error::InvalidArgument("division by zero polynomial".into()));
        }
        let dd = divisor.degree() as usize;
        if self.degree() < divisor.degree() {
            return Ok((Self::zero(), self.clone()));
        }
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        let nq = rem.len() - dd;
        let mut quot = vec![ZERO; nq];
        for k in (0..nq).rev() {
            let q = rem[k + dd] / lead;
            quot[k] = q;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= q * d;
            }
        }
        rem.truncate(dd);
        Ok((Self::new(quot)?, Self::new(rem)?))
    }
}

impl Add for &UnivariatePoly {
    type Output = UnivariatePoly;
    fn add(self, rhs: Self) -> UnivariatePoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        UnivariatePoly::new(coeffs).expect("finite sum")
    }
}

impl Sub for &UnivariatePoly {
    type Output = UnivariatePoly;
    fn sub(self, rhs: Self) -> UnivariatePoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect();
        UnivariatePoly::new(coeffs).expect("finite difference")
    }
}

impl Mul for &UnivariatePoly {
    type Output = UnivariatePoly;
    fn mul(self, rhs: Self) -> UnivariatePoly {
        if self.is_zero() || rhs.is_zero() {
            return UnivariatePoly::zero();
        }
        let mut coeffs = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        UnivariatePoly::new(coeffs).expect("finite product")
    }
}

impl Neg for &UnivariatePoly {
    type Output = UnivariatePoly;
    fn neg(self) -> UnivariatePoly {
        self.scale(-ONE)
    }
}

/// Dense polynomial in `(z, w)`; `c[i][j]` multiplies `z^i w^j`.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "crate::json::PolyJson", into = "crate::json::PolyJson")]
pub struct BivariatePoly {
    coeffs: Vec<Vec<C64>>,
}

impl BivariatePoly {
    /// Builds from a grid indexed `[i][j]`. Rows may be ragged; they are
    /// padded with zeros and then trimmed.
    pub fn new(grid: Vec<Vec<C64>>) -> Result<Self> {
        if !grid.iter().flatten().all(|&c| is_finite(c)) {
            return Err(Error::NonFinite);
        }
        let mut p = Self { coeffs: grid };
        p.normalize();
        Ok(p)
    }

    /// Builds from `(i, j, c)` triples; repeated indices accumulate.
    pub fn from_terms(terms: &[(usize, usize, C64)]) -> Result<Self> {
        let nz = terms.iter().map(|t| t.0 + 1).max().unwrap_or(0);
        let nw = terms.iter().map(|t| t.1 + 1).max().unwrap_or(0);
        let mut grid = vec![vec![ZERO; nw]; nz];
        for &(i, j, c) in terms {
            grid[i][j] += c;
        }
        Self::new(grid)
    }

    pub fn from_real_terms(terms: &[(usize, usize, f64)]) -> Result<Self> {
        let t: Vec<_> = terms
            .iter()
            .map(|&(i, j, x)| (i, j, C64::new(x, 0.0)))
            .collect();
        Self::from_terms(&t)
    }

    /// Embeds a univariate polynomial in `z`.
    pub fn from_univariate_z(p: &UnivariatePoly) -> Self {
        Self::new(p.coeffs().iter().map(|&c| vec![c]).collect()).expect("finite")
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![vec![c]]).expect("finite constant")
    }

    fn normalize(&mut self) {
        let width = self.coeffs.iter().map(Vec::len).max().unwrap_or(0);
        for row in &mut self.coeffs {
            row.resize(width, ZERO);
        }
        while self
            .coeffs
            .last()
            .is_some_and(|row| row.iter().all(|&c| c == ZERO))
        {
            self.coeffs.pop();
        }
        loop {
            let w = self.coeffs.first().map_or(0, Vec::len);
            if w == 0 || self.coeffs.iter().any(|row| row[w - 1] != ZERO) {
                break;
            }
            for row in &mut self.coeffs {
                row.pop();
            }
        }
        if self.coeffs.first().is_some_and(Vec::is_empty) {
            self.coeffs.clear();
        }
    }

    pub fn grid(&self) -> &[Vec<C64>] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize) -> C64 {
        self.coeffs
            .get(i)
            .and_then(|row| row.get(j))
            .copied()
            .unwrap_or(ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degz(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn degw(&self) -> isize {
        self.coeffs.first().map_or(0, Vec::len) as isize - 1
    }

    pub fn total_degree(&self) -> isize {
        self.terms().map(|(i, j, _)| (i + j) as isize).max().unwrap_or(-1)
    }

    /// Nonzero terms `(i, j, c)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.coeffs.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, c)| **c != ZERO)
                .map(move |(j, &c)| (i, j, c))
        })
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms().map(|t| t.2.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: C64, w: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, row| {
            acc * z + row.iter().rev().fold(ZERO, |a, &c| a * w + c)
        })
    }

    pub fn eval_at(&self, v: Point2) -> C64 {
        self.eval(v[0], v[1])
    }

    pub fn log_abs(&self, v: Point2) -> f64 {
        log_abs(self.eval(v[0], v[1]))
    }

    /// `Σ |c_ij| max(1,|z|)^i max(1,|w|)^j`.
    pub fn scale_at(&self, v: Point2) -> f64 {
        let rz = v[0].norm().max(1.0);
        let rw = v[1].norm().max(1.0);
        self.terms()
            .map(|(i, j, c)| c.norm() * rz.powi(i as i32) * rw.powi(j as i32))
            .sum()
    }

    /// `f(·, w)` as a polynomial in `z`.
    pub fn in_z(&self, w: C64) -> UnivariatePoly {
        let coeffs = self
            .coeffs
            .iter()
            .map(|row| row.iter().rev().fold(ZERO, |a, &c| a * w + c))
            .collect();
        UnivariatePoly::new(coeffs).expect("finite slice")
    }

    /// `f(z, ·)` as a polynomial in `w`.
    pub fn in_w(&self, z: C64) -> UnivariatePoly {
        let width = self.degw() + 1;
        let coeffs = (0..width.max(0) as usize)
            .map(|j| {
                self.coeffs
                    .iter()
                    .rev()
                    .fold(ZERO, |a, row| a * z + row[j])
            })
            .collect();
        UnivariatePoly::new(coeffs).expect("finite slice")
    }

    /// Coefficient of `z^i` as a polynomial in `w`.
    pub fn z_coeff_poly(&self, i: usize) -> UnivariatePoly {
        match self.coeffs.get(i) {
            Some(row) => UnivariatePoly::new(row.clone()).expect("finite"),
            None => UnivariatePoly::zero(),
        }
    }

    /// Exchanges the roles of `z` and `w`.
    pub fn swap_vars(&self) -> Self {
        let terms: Vec<_> = self.terms().map(|(i, j, c)| (j, i, c)).collect();
        Self::from_terms(&terms).expect("finite")
    }

    pub fn partial_z(&self) -> Self {
        let terms: Vec<_> = self
            .terms()
            .filter(|t| t.0 > 0)
            .map(|(i, j, c)| (i - 1, j, c * i as f64))
            .collect();
        Self::from_terms(&terms).expect("finite")
    }

    pub fn partial_w(&self) -> Self {
        let terms: Vec<_> = self
            .terms()
            .filter(|t| t.1 > 0)
            .map(|(i, j, c)| (i, j - 1, c * j as f64))
            .collect();
        Self::from_terms(&terms).expect("finite")
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .map(|row| row.iter().map(|&c| c * s).collect())
                .collect(),
        )
        .expect("finite scaling")
    }

    /// `f(a0 + a1 z + a2 w, b0 + b1 z + b2 w)`.
    pub fn substitute_linear(&self, a: [C64; 3], b: [C64; 3]) -> Self {
        let lz = Self::from_terms(&[(0, 0, a[0]), (1, 0, a[1]), (0, 1, a[2])]).expect("finite");
        let lw = Self::from_terms(&[(0, 0, b[0]), (1, 0, b[1]), (0, 1, b[2])]).expect("finite");
        let nz = self.coeffs.len();
        let nw = self.degw().max(-1) + 1;
        let mut pz = vec![Self::constant(ONE)];
        for k in 1..nz {
            pz.push(&pz[k - 1] * &lz);
        }
        let mut pw = vec![Self::constant(ONE)];
        for k in 1..nw as usize {
            pw.push(&pw[k - 1] * &lw);
        }
        let mut out = Self::zero();
        for (i, j, c) in self.terms() {
            out = &out + &(&pz[i] * &pw[j]).scale(c);
        }
        out
    }

    /// Coordinates centred at `v`: returns `f(v + (z, w))`.
    pub fn shift(&self, v: Point2) -> Self {
        self.substitute_linear([v[0], ONE, ZERO], [v[1], ZERO, ONE])
    }

    /// `t ↦ f(v0 + t e)`.
    pub fn restrict_line(&self, v0: Point2, e: Point2) -> UnivariatePoly {
        let g = self.substitute_linear([v0[0], e[0], ZERO], [v0[1], e[1], ZERO]);
        UnivariatePoly::new(g.coeffs.iter().map(|row| row[0]).collect()).expect("finite")
    }
}

impl Add for &BivariatePoly {
    type Output = BivariatePoly;
    fn add(self, rhs: Self) -> BivariatePoly {
        let mut terms: Vec<_> = self.terms().collect();
        terms.extend(rhs.terms());
        BivariatePoly::from_terms(&terms).expect("finite sum")
    }
}

impl Sub for &BivariatePoly {
    type Output = BivariatePoly;
    fn sub(self, rhs: Self) -> BivariatePoly {
        let mut terms: Vec<_> = self.terms().collect();
        terms.extend(rhs.terms().map(|(i, j, c)| (i, j, -c)));
        BivariatePoly::from_terms(&terms).expect("finite difference")
    }
}

impl Mul for &BivariatePoly {
    type Output = BivariatePoly;
    fn mul(self, rhs: Self) -> BivariatePoly {
        let mut terms = Vec::new();
        for (i, j, a) in self.terms() {
            for (k, l, b) in rhs.terms() {
                terms.push((i + k, j + l, a * b));
            }
        }
        BivariatePoly::from_terms(&terms).expect("finite product")
    }
}

/// Closed disk in C.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    #[serde(rename = "c")]
    pub center: C64,
    #[serde(rename = "r")]
    pub radius: f64,
}

impl Disk {
    pub fn new(center: C64, radius: f64) -> Result<Self> {
        if !is_finite(center) || !radius.is_finite() {
            return Err(Error::NonFinite);
        }
        if radius < 0.0 {
            return Err(Error::InvalidArgument(format!("negative radius {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn contains(&self, z: C64) -> bool {
        (z - self.center).norm() <= self.radius
    }
}

/// Closed ball in C².
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    #[serde(rename = "c", with = "crate::json::point4")]
    pub center: Point2,
    #[serde(rename = "r")]
    pub radius: f64,
}

impl Ball {
    pub fn contains(&self, v: Point2) -> bool {
        dist2(v, self.center) <= self.radius
    }
}
