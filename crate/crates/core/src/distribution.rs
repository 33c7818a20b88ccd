//! Distributions on `[0, 1]` with an absolutely continuous part on `[0, 1)`
//! and an atom at the censoring point `z = 1`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::ExposureCurve;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// CDF, density, atom and mean of a right-censored normalized loss.
///
/// `cdf(z)` is `0` below `0` and `1` from `z = 1` on; the left limit at `1`
/// is `1 - point_mass()`. `pdf` is the density of the continuous part and is
/// only meaningful on `[0, 1)`.
pub trait CensoredDistribution<T: Scalar>: Send + Sync {
    fn cdf(&self, z: T) -> T;
    fn pdf(&self, z: T) -> T;
    fn point_mass(&self) -> T;
    fn mean(&self) -> T;
}

impl<T: Scalar, D: CensoredDistribution<T> + ?Sized> CensoredDistribution<T> for &D {
    fn cdf(&self, z: T) -> T {
        (**self).cdf(z)
    }
    fn pdf(&self, z: T) -> T {
        (**self).pdf(z)
    }
    fn point_mass(&self) -> T {
        (**self).point_mass()
    }
    fn mean(&self) -> T {
        (**self).mean()
    }
}

impl<T: Scalar, D: CensoredDistribution<T> + ?Sized> CensoredDistribution<T> for Box<D> {
    fn cdf(&self, z: T) -> T {
        (**self).cdf(z)
    }
    fn pdf(&self, z: T) -> T {
        (**self).pdf(z)
    }
    fn point_mass(&self) -> T {
        (**self).point_mass()
    }
    fn mean(&self) -> T {
        (**self).mean()
    }
}

impl<T: Scalar, D: CensoredDistribution<T> + ?Sized> CensoredDistribution<T> for Arc<D> {
    fn cdf(&self, z: T) -> T {
        (**self).cdf(z)
    }
    fn pdf(&self, z: T) -> T {
        (**self).pdf(z)
    }
    fn point_mass(&self) -> T {
        (**self).point_mass()
    }
    fn mean(&self) -> T {
        (**self).mean()
    }
}

/// The distribution induced by an exposure curve:
/// `F(z) = 1 - G'(z)/G'(0)` on `[0, 1)`, `f = -G''/G'(0)`,
/// `p = G'(1)/G'(0)` and mean `1/G'(0)`.
#[derive(Debug, Clone)]
pub struct CurveDistribution<T, C> {
    curve: C,
    slope0: T,
    slope1: T,
}

/// Turns an exposure curve into its censored distribution.
///
/// Only `G'(0) > 0` is checked here; run
/// [`validate_exposure_curve`](crate::curve::validate_exposure_curve) first
/// for the full definition.
pub fn curve_to_distribution<T: Scalar, C: ExposureCurve<T>>(
    curve: C,
) -> Result<CurveDistribution<T, C>> {
    let slope0 = curve.dg(T::zero());
    let slope1 = curve.dg(T::one());
    if !(slope0 > T::zero()) || !slope0.is_finite() {
        return Err(Error::InvalidCurve {
            z: 0.0,
            reason: format!("G'(0) = {slope0} must be positive"),
        });
    }
    if !slope1.is_finite() {
        return Err(Error::InvalidCurve { z: 1.0, reason: "G'(1) is not finite".into() });
    }
    Ok(CurveDistribution { curve, slope0, slope1 })
}

impl<T: Scalar, C: ExposureCurve<T>> CurveDistribution<T, C> {
    pub fn curve(&self) -> &C {
        &self.curve
    }
}

impl<T: Scalar, C: ExposureCurve<T>> CensoredDistribution<T> for CurveDistribution<T, C> {
    fn cdf(&self, z: T) -> T {
        if z < T::zero() {
            T::zero()
        } else if z >= T::one() {
            T::one()
        } else {
            T::one() - self.curve.dg(z) / self.slope0
        }
    }
    fn pdf(&self, z: T) -> T {
        if z < T::zero() || z >= T::one() {
            return T::zero();
        }
        -self.curve.d2g(z) / self.slope0
    }
    fn point_mass(&self) -> T {
        self.slope1 / self.slope0
    }
    fn mean(&self) -> T {
        T::one() / self.slope0
    }
}

/// The law of `Z` given `Z < 1`: density `f / (1 - p)`, mean `(E[Z] - p) / (1 - p)`.
#[derive(Debug, Clone)]
pub struct Conditional<D> {
    base: D,
}

pub fn conditional_distribution<T: Scalar, D: CensoredDistribution<T>>(
    dist: D,
) -> Result<Conditional<D>> {
    let p = dist.point_mass();
    if !(p < T::one() - T::tol(1e-12)) {
        return Err(Error::Degenerate(format!("point mass p = {p} leaves no continuous part")));
    }
    Ok(Conditional { base: dist })
}

impl<D> Conditional<D> {
    pub fn base(&self) -> &D {
        &self.base
    }

    pub fn pdf0<T: Scalar>(&self, z: T) -> T
    where
        D: CensoredDistribution<T>,
    {
        self.base.pdf(z) / (T::one() - self.base.point_mass())
    }

    pub fn cdf0<T: Scalar>(&self, z: T) -> T
    where
        D: CensoredDistribution<T>,
    {
        if z >= T::one() {
            return T::one();
        }
        self.base.cdf(z) / (T::one() - self.base.point_mass())
    }

    pub fn mean0<T: Scalar>(&self) -> T
    where
        D: CensoredDistribution<T>,
    {
        let p = self.base.point_mass();
        (self.base.mean() - p) / (T::one() - p)
    }
}

/// Replaces the atom of `base` by a free point mass `q`, keeping the shape
/// of the continuous part: `f_q = (1 - q) f_0`.
#[derive(Debug, Clone)]
pub struct OneInflated<T, D> {
    base: D,
    q: T,
}

pub fn one_inflate<T: Scalar, D: CensoredDistribution<T>>(
    dist: D,
    q: T,
) -> Result<OneInflated<T, D>> {
    if !(q > T::zero() && q < T::one()) {
        return Err(Error::Domain(format!("point mass q = {q} must lie in (0, 1)")));
    }
    let p = dist.point_mass();
    if !(p < T::one() - T::tol(1e-12)) {
        return Err(Error::Degenerate(format!("point mass p = {p} leaves no continuous part")));
    }
    Ok(OneInflated { base: dist, q })
}

impl<T: Scalar, D: CensoredDistribution<T>> OneInflated<T, D> {
    pub fn q(&self) -> T {
        self.q
    }

    pub fn base(&self) -> &D {
        &self.base
    }

    #[inline]
    fn scale(&self) -> T {
        (T::one() - self.q) / (T::one() - self.base.point_mass())
    }
}

impl<T: Scalar, D: CensoredDistribution<T>> CensoredDistribution<T> for OneInflated<T, D> {
    fn cdf(&self, z: T) -> T {
        if z >= T::one() {
            T::one()
        } else {
            self.scale() * self.base.cdf(z)
        }
    }
    fn pdf(&self, z: T) -> T {
        self.scale() * self.base.pdf(z)
    }
    fn point_mass(&self) -> T {
        self.q
    }
    fn mean(&self) -> T {
        let p = self.base.point_mass();
        let mean0 = (self.base.mean() - p) / (T::one() - p);
        (T::one() - self.q) * mean0 + self.q
    }
}

const QUANTILE_FTOL: f64 = 1e-12;
const QUANTILE_XTOL: f64 = 1e-14;

/// Generalized inverse of the CDF.
///
/// Returns exactly `1` when `u >= 1 - p` (the atom); otherwise bisects on
/// `[0, 1)` until `|F(z) - u| <= 1e-12` or the bracket is narrower than `1e-14`.
pub fn quantile<T: Scalar, D: CensoredDistribution<T> + ?Sized>(dist: &D, u: T) -> Result<T> {
    if !(u > T::zero() && u < T::one()) {
        return Err(Error::Domain(format!("quantile level u = {u} must lie in (0, 1)")));
    }
    let below_atom = T::one() - dist.point_mass();
    if u >= below_atom {
        return Ok(T::one());
    }
    let ftol = T::tol(QUANTILE_FTOL);
    let xtol = T::tol(QUANTILE_XTOL);
    let slack = T::tol(1e-12);
    let (mut lo, mut hi) = (T::zero(), T::one());
    let (mut flo, mut fhi) = (dist.cdf(T::zero()), below_atom);
    if flo >= u {
        return Ok(T::zero());
    }
    let two = T::lit(2.0);
    loop {
        let mid = (lo + hi) / two;
        let fm = dist.cdf(mid);
        if !fm.is_finite() || fm < flo - slack || fm > fhi + slack {
            return Err(Error::InvalidDistribution(format!(
                "cdf is not monotone near z = {mid} (F = {fm}, bracket [{flo}, {fhi}])"
            )));
        }
        if (fm - u).abs() <= ftol || hi - lo <= xtol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if fm < u {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
}

/// `n` inverse-CDF draws from a ChaCha8 stream seeded with `seed`.
///
/// The same `(seed, n)` always produces bit-identical output.
pub fn sample<T: Scalar, D: CensoredDistribution<T> + ?Sized>(
    dist: &D,
    n: usize,
    seed: u64,
) -> Result<Vec<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let u: f64 = rng.gen();
        let u = T::lit(u);
        if u <= T::zero() || u >= T::one() {
            continue;
        }
        out.push(quantile(dist, u)?);
    }
    Ok(out)
}
