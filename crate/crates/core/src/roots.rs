//! Simultaneous root finding for univariate complex polynomials.
//!
//! Aberth–Ehrlich iteration from a perturbed circle of initial guesses; when
//! it stalls the companion-matrix eigenvalues are used instead.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::poly::{UnivariatePoly, C64, ZERO};

/// Default backward-error tolerance for [`roots`].
pub const DEFAULT_TOL: f64 = 1e-10;

const MAX_ITER: usize = 800;

/// All `degree` roots of `p`, repeated according to multiplicity.
///
/// Every returned root satisfies `|p(root)| <= tol * Σ|c_j| max(1,|root|)^j`.
pub fn roots(p: &UnivariatePoly, tol: f64) -> Result<Vec<C64>> {
    let n = p.degree();
    if n < 1 {
        return Err(Error::InvalidArgument(format!(
            "root finding needs degree >= 1, got {n}"
        )));
    }
    // exact zero roots first
    let shift = p.coeffs().iter().take_while(|c| **c == ZERO).count();
    let mut out = vec![ZERO; shift];
    let reduced = UnivariatePoly::new(p.coeffs()[shift..].to_vec())?;
    if reduced.degree() >= 1 {
        out.extend(roots_nonzero(&reduced, tol)?);
    }
    Ok(out)
}

fn worst_residual(p: &UnivariatePoly, zs: &[C64]) -> f64 {
    zs.iter()
        .map(|&z| p.eval(z).norm() / p.scale_at(z))
        .fold(0.0, f64::max)
}

fn roots_nonzero(p: &UnivariatePoly, tol: f64) -> Result<Vec<C64>> {
    let lead = p.leading();
    let monic = p.scale(lead.inv());
    let n = monic.degree() as usize;
    match n {
        1 => return Ok(vec![-monic.coeff(0)]),
        2 => {
            let (b, c) = (monic.coeff(1), monic.coeff(0));
            let disc = (b * b - 4.0 * c).sqrt();
            // pick the sign avoiding cancellation
            let q = if (-b + disc).norm() >= (-b - disc).norm() {
                (-b + disc) / 2.0
            } else {
                (-b - disc) / 2.0
            };
            let r2 = if q.norm() > 0.0 { c / q } else { ZERO };
            let zs = vec![q, r2];
            if worst_residual(&monic, &zs) <= tol {
                return Ok(zs);
            }
        }
        _ => {}
    }

    let mut zs = aberth(&monic);
    polish(&monic, &mut zs);
    if worst_residual(&monic, &zs) <= tol {
        return Ok(zs);
    }
    let mut zs = companion_eigenvalues(&monic);
    polish(&monic, &mut zs);
    let residual = worst_residual(&monic, &zs);
    if residual <= tol {
        Ok(zs)
    } else {
        Err(Error::NoConvergence { residual })
    }
}

fn initial_guesses(p: &UnivariatePoly) -> Vec<C64> {
    let n = p.degree() as usize;
    // geometric mean of |c_k|^{1/(n-k)} as a radius estimate
    let radius = (0..n)
        .filter(|&k| p.coeff(k).norm() > 0.0)
        .map(|k| p.coeff(k).norm().powf(1.0 / (n - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            C64::from_polar(radius * (1.0 + 0.03 * k as f64 / n as f64), theta)
        })
        .collect()
}

fn aberth(p: &UnivariatePoly) -> Vec<C64> {
    let mut zs = initial_guesses(p);
    let n = zs.len();
    for _ in 0..MAX_ITER {
        let mut converged = true;
        for i in 0..n {
            let (v, dv) = p.eval_with_derivative(zs[i]);
            if v == ZERO {
                continue;
            }
            let ratio = v / dv;
            let sum: C64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = zs[i] - zs[j];
                    if d == ZERO {
                        ZERO
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (C64::new(1.0, 0.0) - ratio * sum);
            if !(step.re.is_finite() && step.im.is_finite()) {
                continue;
            }
            zs[i] -= step;
            if step.norm() > 4.0 * f64::EPSILON * zs[i].norm().max(f64::MIN_POSITIVE) {
                converged = false;
            }
        }
        if converged {
            break;
        }
    }
    zs
}

/// A few Newton steps, kept only where they reduce the residual.
fn polish(p: &UnivariatePoly, zs: &mut [C64]) {
    for z in zs.iter_mut() {
        for _ in 0..3 {
            let (v, dv) = p.eval_with_derivative(*z);
            if dv == ZERO {
                break;
            }
            let cand = *z - v / dv;
            if p.eval(cand).norm() < v.norm() {
                *z = cand;
            } else {
                break;
            }
        }
    }
}

fn companion_eigenvalues(monic: &UnivariatePoly) -> Vec<C64> {
    let n = monic.degree() as usize;
    let mut m = DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        m[(0, k)] = -monic.coeff(n - 1 - k);
        if k + 1 < n {
            m[(k + 1, k)] = C64::new(1.0, 0.0);
        }
    }
    match m.clone().try_schur(f64::EPSILON, 10_000) {
        Some(schur) => {
            let (_, t) = schur.unpack();
            (0..n).map(|k| t[(k, k)]).collect()
        }
        None => initial_guesses(monic),
    }
}
