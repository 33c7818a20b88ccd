//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_DEPTH: u32 = 60;
const MIN_DEPTH: u32 = 4;
/// Endpoints are sampled this far inside `[a, b]`, so integrands that are
/// undefined exactly at an endpoint (such as a density at the censoring point)
/// can be passed as-is.
const ENDPOINT_OFFSET: f64 = 1e-12;

/// Integrates `f` over `[a, b]` to absolute accuracy `tol`.
///
/// Returns [`Error::Accuracy`] carrying the best available estimate if the
/// recursion depth is exhausted before every panel meets its tolerance.
pub fn quadrature<T, F>(f: F, a: T, b: T, tol: T) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    if !(a < b) {
        return Err(Error::Domain(format!("quadrature needs a < b, got [{a}, {b}]")));
    }
    let off = T::lit(ENDPOINT_OFFSET);
    let fa = f(a + off);
    let fb = f(b - off);
    let m = (a + b) / T::lit(2.0);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let mut exhausted = false;
    let est = refine(&f, a, b, fa, fm, fb, whole, tol, 0, &mut exhausted);
    if !est.is_finite() {
        return Err(Error::Accuracy { estimate: est.to_f64_lossy() });
    }
    if exhausted {
        Err(Error::Accuracy { estimate: est.to_f64_lossy() })
    } else {
        Ok(est)
    }
}

/// [`quadrature`] at the default tolerance.
pub fn integrate<T: Scalar, F: Fn(T) -> T>(f: F, a: T, b: T) -> Result<T> {
    quadrature(f, a, b, T::tol(DEFAULT_TOL))
}

#[inline]
fn simpson<T: Scalar>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<T, F>(
    f: &F,
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
    depth: u32,
    exhausted: &mut bool,
) -> T
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let two = T::lit(2.0);
    let m = (a + b) / two;
    let lm = (a + m) / two;
    let rm = (m + b) / two;
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let sum = left + right;
    let delta = sum - whole;
    // Rounding noise floor: below it, halving tol only burns recursion.
    let floor = T::epsilon() * T::lit(64.0) * sum.abs();
    let done = depth >= MIN_DEPTH && (delta.abs() <= T::lit(15.0) * tol || delta.abs() <= floor);
    if done {
        return sum + delta / T::lit(15.0);
    }
    if depth >= MAX_DEPTH {
        *exhausted = true;
        return sum + delta / T::lit(15.0);
    }
    let half = tol / two;
    refine(f, a, m, fa, flm, fm, left, half, depth + 1, exhausted)
        + refine(f, m, b, fm, frm, fb, right, half, depth + 1, exhausted)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_linear() {
        assert!((integrate(|_: f64| 1.0, 0.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((integrate(|z: f64| 2.0 * z, 0.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn smooth_transcendental() {
        let v = integrate(|z: f64| (-2.0 * z).exp(), 0.0, 1.0).unwrap();
        assert!((v - (1.0 - (-2.0f64).exp()) / 2.0).abs() < 1e-11);
        let v = integrate(|z: f64| z.sin(), 0.0, std::f64::consts::PI).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn endpoints_are_never_sampled() {
        let v = integrate(|z: f64| if z <= 0.0 || z >= 1.0 { f64::NAN } else { z }, 0.0, 1.0).unwrap();
        assert!((v - 0.5).abs() < 1e-10);
    }

    #[test]
    fn reversed_interval_is_rejected() {
        assert!(matches!(integrate(|z: f64| z, 1.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn single_precision_terminates() {
        let v = integrate(|z: f32| 3.0 * z * z, 0.0, 1.0).unwrap();
        assert!((v - 1.0).abs() < 1e-5);
    }
}
