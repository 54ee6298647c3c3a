//! The `log R^{-1}` example: `f1 = z² + w` on the curve `z w = 0`, where
//! the trace exponent at `(R/4, 0)` equals `log(√15 / R)`.

use serde::{Deserialize, Serialize};

use crate::bernstein::{bernstein_exponent, BernsteinQuery};
use crate::error::{Error, Result};
use crate::family::named_pair;
use crate::poly::{C64, ZERO};

pub const B_TOL: f64 = 1e-2;
pub const SUP_TOL: f64 = 1e-6;
pub const SLOPE_TOL: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldenEntry {
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub b_expected: f64,
    pub inner_sup: f64,
    pub inner_expected: f64,
    pub outer_sup: f64,
    pub outer_expected: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldenReport {
    pub entries: Vec<GoldenEntry>,
    /// Least-squares slope of `B` against `log R^{-1}` (absent for one `R`).
    pub slope: Option<f64>,
    pub slope_pass: bool,
    pub pass: bool,
}

pub fn verify_example_log_r(r_values: &[f64]) -> Result<GoldenReport> {
    if r_values.is_empty() || r_values.iter().any(|&r| !(r > 0.0 && r < 0.5)) {
        return Err(Error::InvalidArgument("each R must lie in (0, 1/2)".into()));
    }
    let (f1, f2) = named_pair("example-logR")?;
    let mut entries = Vec::with_capacity(r_values.len());
    for &r in r_values {
        let q = BernsteinQuery::on_trace(0.25, [C64::new(r / 4.0, 0.0), ZERO], r, f2.clone());
        let rep = bernstein_exponent(&f1, &q)?;
        let b_expected = (15f64.sqrt() / r).ln();
        let inner_expected = 2.0 * (r / 2.0).ln();
        let outer_expected = (15f64.sqrt() * r / 4.0).ln();
        let pass = (rep.b - b_expected).abs() <= B_TOL
            && (rep.m_inner - inner_expected).abs() <= SUP_TOL
            && (rep.m_outer - outer_expected).abs() <= SUP_TOL;
        entries.push(GoldenEntry {
            r,
            b: rep.b,
            b_expected,
            inner_sup: rep.m_inner,
            inner_expected,
            outer_sup: rep.m_outer,
            outer_expected,
            pass,
        });
    }
    let slope = fit_slope(&entries.iter().map(|e| (-e.r.ln(), e.b)).collect::<Vec<_>>());
    let slope_pass = slope.is_none_or(|s| (s - 1.0).abs() <= SLOPE_TOL);
    let pass = slope_pass && entries.iter().all(|e| e.pass);
    Ok(GoldenReport { entries, slope, slope_pass, pass })
}

/// Least-squares slope of `y` on `x`.
pub fn fit_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}
