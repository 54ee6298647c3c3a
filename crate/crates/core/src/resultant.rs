//! Sylvester resultants and the quantitative near-common-root bounds.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{BivariatePoly, UnivariatePoly, C64, ONE, ZERO};
use crate::roots;

/// Sylvester matrix of coefficient vectors of formal degrees `n = f.len()-1`
/// and `m = g.len()-1`. Rows `0..m` hold shifted copies of `f`, rows
/// `m..m+n` shifted copies of `g`, highest coefficient first.
pub fn sylvester_matrix_formal(f: &[C64], g: &[C64]) -> DMatrix<C64> {
    let n = f.len().saturating_sub(1);
    let m = g.len().saturating_sub(1);
    let size = n + m;
    let mut s = DMatrix::<C64>::zeros(size, size);
    for row in 0..m {
        for (k, c) in f.iter().rev().enumerate() {
            s[(row, row + k)] = *c;
        }
    }
    for row in 0..n {
        for (k, c) in g.iter().rev().enumerate() {
            s[(m + row, row + k)] = *c;
        }
    }
    s
}

pub fn sylvester_matrix(f: &UnivariatePoly, g: &UnivariatePoly) -> DMatrix<C64> {
    sylvester_matrix_formal(f.coeffs(), g.coeffs())
}

/// Determinant by LU with partial pivoting.
pub fn determinant(m: DMatrix<C64>) -> C64 {
    if m.nrows() == 0 {
        return ONE;
    }
    m.lu().determinant()
}

/// Resultant for formal degrees: the leading entries may vanish, which is
/// what makes `w ↦ Res_z(f(·,w), g(·,w))` a polynomial.
pub fn resultant_formal(f: &[C64], g: &[C64]) -> C64 {
    if f.is_empty() || g.is_empty() {
        return ZERO;
    }
    determinant(sylvester_matrix_formal(f, g))
}

/// `Res(f, g)` as the Sylvester determinant. Both degrees must be at least 1.
pub fn resultant_sylvester(f: &UnivariatePoly, g: &UnivariatePoly) -> Result<C64> {
    if f.degree() < 1 || g.degree() < 1 {
        return Err(Error::InvalidArgument(format!(
            "resultant needs degrees >= 1, got {} and {}",
            f.degree(),
            g.degree()
        )));
    }
    Ok(determinant(sylvester_matrix(f, g)))
}

/// `Res(f, g)` for arbitrary degrees: zero if either vanishes identically,
/// `c^{deg g}` / `c^{deg f}` when one side is a nonzero constant `c`.
pub fn resultant(f: &UnivariatePoly, g: &UnivariatePoly) -> C64 {
    if f.is_zero() || g.is_zero() {
        return ZERO;
    }
    determinant(sylvester_matrix(f, g))
}

/// `w ↦ Res_z(f(·,w), g(·,w))` with the formal `z`-degrees of `f` and `g`,
/// interpolated from its values at roots of unity.
pub fn resultant_in_w(f: &BivariatePoly, g: &BivariatePoly) -> UnivariatePoly {
    if f.is_zero() || g.is_zero() {
        return UnivariatePoly::zero();
    }
    let (m, n) = (f.degz().max(0) as usize, g.degz().max(0) as usize);
    let bound = m * g.degw().max(0) as usize + n * f.degw().max(0) as usize;
    let nodes = bound + 1;
    let formal = |p: &BivariatePoly, d: usize, w: C64| -> Vec<C64> {
        (0..=d).map(|i| p.z_coeff_poly(i).eval(w)).collect()
    };
    let values: Vec<C64> = (0..nodes)
        .map(|k| {
            let w = C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / nodes as f64);
            resultant_formal(&formal(f, m, w), &formal(g, n, w))
        })
        .collect();
    let coeffs = (0..nodes)
        .map(|j| {
            let s: C64 = values
                .iter()
                .enumerate()
                .map(|(k, v)| v * C64::from_polar(1.0, -std::f64::consts::TAU * (j * k % nodes) as f64 / nodes as f64))
                .sum();
            s / nodes as f64
        })
        .collect();
    UnivariatePoly::new(coeffs).expect("finite resultant values")
}

/// The three root-product expressions of the resultant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultantForms {
    /// `a^m b^n ∏ (ζ_i - η_j)`
    pub product: C64,
    /// `a^m ∏ g(ζ_i)`
    pub g_form: C64,
    /// `(-1)^{mn} b^n ∏ f(η_j)`
    pub f_form: C64,
}

pub fn resultant_forms(f: &UnivariatePoly, g: &UnivariatePoly, tol: f64) -> Result<ResultantForms> {
    if f.degree() < 1 || g.degree() < 1 {
        return Err(Error::InvalidArgument("resultant needs degrees >= 1".into()));
    }
    let zf = roots::roots(f, tol)?;
    let zg = roots::roots(g, tol)?;
    let (a, b) = (f.leading(), g.leading());
    let (n, m) = (zf.len() as i32, zg.len() as i32);
    let lead = a.powi(m) * b.powi(n);
    let product = zf
        .iter()
        .flat_map(|z| zg.iter().map(move |e| z - e))
        .fold(lead, |acc, d| acc * d);
    let g_form = zf.iter().fold(a.powi(m), |acc, z| acc * g.eval(*z));
    let sign = if (m * n) % 2 == 0 { 1.0 } else { -1.0 };
    let f_form = zg.iter().fold(b.powi(n) * sign, |acc, e| acc * f.eval(*e));
    Ok(ResultantForms { product, g_form, f_form })
}

/// `a^m b^n ∏ (ζ_i - η_j)` from computed roots; the independent check on
/// [`resultant_sylvester`].
pub fn resultant_product_oracle(f: &UnivariatePoly, g: &UnivariatePoly, tol: f64) -> Result<C64> {
    Ok(resultant_forms(f, g, tol)?.product)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultantBounds {
    pub t_f: f64,
    pub t_g: f64,
    pub big_t_f: f64,
    pub big_t_g: f64,
    /// Displayed root radii `T_f m / t_f` and `T_g n / t_g`, used for part 2.
    pub r_f: f64,
    pub r_g: f64,
    /// Provable root radii `max(T deg / t, 1 + T/t)`, used for part 0.
    pub root_bound_f: f64,
    pub root_bound_g: f64,
    pub s: usize,
    pub t: f64,
    pub r: f64,
}

impl ResultantBounds {
    pub fn new(f: &UnivariatePoly, g: &UnivariatePoly) -> Self {
        let n = f.degree().max(0) as f64;
        let m = g.degree().max(0) as f64;
        let t_f = f.leading().norm().min(1.0);
        let t_g = g.leading().norm().min(1.0);
        let big_t_f = f.max_abs_coeff().max(1.0);
        let big_t_g = g.max_abs_coeff().max(1.0);
        let r_f = big_t_f * m / t_f;
        let r_g = big_t_g * n / t_g;
        let root_bound_f = (big_t_f * n / t_f).max(1.0 + big_t_f / t_f);
        let root_bound_g = (big_t_g * m / t_g).max(1.0 + big_t_g / t_g);
        Self {
            t_f,
            t_g,
            big_t_f,
            big_t_g,
            r_f,
            r_g,
            root_bound_f,
            root_bound_g,
            s: n.max(m) as usize,
            t: t_f.min(t_g),
            r: r_f.max(r_g),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    /// The hypothesis of the implication is false.
    Vacuous,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommonRootReport {
    pub delta: f64,
    pub resultant: C64,
    pub abs_resultant: f64,
    pub bounds: ResultantBounds,
    pub part0: Verdict,
    pub max_root_f: f64,
    pub max_root_g: f64,
    /// Whether the displayed radii `r_f`, `r_g` also contain the roots.
    pub displayed_radii_hold: bool,
    pub part1: Verdict,
    pub part1_threshold: f64,
    /// Root `η_j` of `g` with `|f(η_j)| < δ`.
    pub part1_witness: Option<C64>,
    pub part1_witness_value: Option<f64>,
    pub part2: Verdict,
    pub part2_point: C64,
    pub part2_min_max: f64,
    pub part2_threshold: f64,
    pub part2_log_bound: f64,
}

const PART2_GRID: usize = 32;

pub fn check_common_root(f: &UnivariatePoly, g: &UnivariatePoly, delta: f64) -> Result<CommonRootReport> {
    if !(0.0 < delta && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0,1), got {delta}")));
    }
    let res = resultant_sylvester(f, g)?;
    let abs_res = res.norm();
    let b = ResultantBounds::new(f, g);
    let zf = roots::roots(f, roots::DEFAULT_TOL)?;
    let zg = roots::roots(g, roots::DEFAULT_TOL)?;
    let max_mod = |zs: &[C64]| zs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let (max_root_f, max_root_g) = (max_mod(&zf), max_mod(&zg));
    let part0 = if max_root_f <= b.root_bound_f && max_root_g <= b.root_bound_g {
        Verdict::Holds
    } else {
        Verdict::Violated
    };
    let displayed_radii_hold = max_root_f <= b.r_f && max_root_g <= b.r_g;

    let n = f.degree() as i32;
    let m = g.degree() as i32;
    let part1_threshold = delta.powi(m) * b.t_g.powi(n);
    let (part1, part1_witness, part1_witness_value) = if abs_res < part1_threshold {
        let best = zg
            .iter()
            .map(|e| (*e, f.eval(*e).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("g has roots");
        if best.1 < delta {
            (Verdict::Holds, Some(best.0), Some(best.1))
        } else {
            (Verdict::Violated, None, Some(best.1))
        }
    } else {
        (Verdict::Vacuous, None, None)
    };

    let rb = b.root_bound_f.max(b.root_bound_g);
    let mut candidates: Vec<C64> = zf.iter().chain(zg.iter()).copied().collect();
    for i in 0..PART2_GRID {
        for j in 0..PART2_GRID {
            let x = -rb + 2.0 * rb * i as f64 / (PART2_GRID - 1) as f64;
            let y = -rb + 2.0 * rb * j as f64 / (PART2_GRID - 1) as f64;
            if x * x + y * y <= rb * rb {
                candidates.push(C64::new(x, y));
            }
        }
    }
    let (part2_point, part2_min_max) = candidates
        .iter()
        .map(|z| (*z, f.eval(*z).norm().max(g.eval(*z).norm())))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("nonempty candidate set");
    let s = b.s as f64;
    let part2_threshold = b.t * delta.powf(s);
    let part2_log_bound = 2.0 * s * b.t.ln() + s * s * (2.0 * b.r).ln() + delta.ln();
    let part2 = if part2_min_max < part2_threshold {
        if abs_res == 0.0 || abs_res.ln() < part2_log_bound {
            Verdict::Holds
        } else {
            Verdict::Violated
        }
    } else {
        Verdict::Vacuous
    };

    Ok(CommonRootReport {
        delta,
        resultant: res,
        abs_resultant: abs_res,
        bounds: b,
        part0,
        max_root_f,
        max_root_g,
        displayed_radii_hold,
        part1,
        part1_threshold,
        part1_witness,
        part1_witness_value,
        part2,
        part2_point,
        part2_min_max,
        part2_threshold,
        part2_log_bound,
    })
}
