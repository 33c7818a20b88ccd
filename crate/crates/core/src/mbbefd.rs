//! The MBBEFD family of exposure curves.
//!
//! Parameters `b >= 0`, `g >= 1`. The curve has four closed forms:
//!
//! | case                | `G(z)`                                              |
//! |---------------------|-----------------------------------------------------|
//! | `g = 1` or `b = 0`  | `z`                                                 |
//! | `b = 1`             | `ln(1 + (g-1) z) / ln g`                            |
//! | `bg = 1`            | `(1 - b^z) / (1 - b)`                               |
//! | otherwise           | `ln(((g-1) b + (1-bg) b^z) / (1-b)) / ln(bg)`       |
//!
//! The induced distribution always has point mass `1/g` at the censoring
//! point. For `bg < 1` the density is a rescaled logistic density, see
//! [`logistic_form_pdf`].

use serde::Serialize;

use crate::curve::ExposureCurve;
use crate::distribution::CensoredDistribution;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::shape::ShapeReport;

/// Distance to `b = 1` or `bg = 1` below which the limit formula is used;
/// the general formula is `0/0` there.
pub const BRANCH_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MbbefdParams<T> {
    pub b: T,
    pub g: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// `g = 1` or `b = 0`: the identity curve.
    Identity,
    /// `b = 1`
    UnitB,
    /// `bg = 1`
    UnitBg,
    General,
}

impl<T: Scalar> MbbefdParams<T> {
    pub fn new(b: T, g: T) -> Result<Self> {
        if !b.is_finite() || !g.is_finite() {
            return Err(Error::Domain(format!("MBBEFD parameters must be finite (b = {b}, g = {g})")));
        }
        if b < T::zero() {
            return Err(Error::Domain(format!("MBBEFD requires b >= 0, got b = {b}")));
        }
        if g < T::one() {
            return Err(Error::Domain(format!("MBBEFD requires g >= 1, got g = {g}")));
        }
        Ok(Self { b, g })
    }

    /// `g = 1` or `b = 0`: all mass on the censoring point.
    pub fn is_degenerate(&self) -> bool {
        self.g == T::one() || self.b == T::zero()
    }

    pub fn branch(&self) -> Branch {
        let tol = T::tol(BRANCH_TOL);
        if self.is_degenerate() {
            Branch::Identity
        } else if (self.b - T::one()).abs() <= tol {
            Branch::UnitB
        } else if (self.b * self.g - T::one()).abs() <= tol {
            Branch::UnitBg
        } else {
            Branch::General
        }
    }
}

/// The MBBEFD exposure curve with analytic `G'` and `G''`.
#[derive(Debug, Clone, Copy)]
pub struct MbbefdCurve<T> {
    params: MbbefdParams<T>,
    branch: Branch,
}

pub fn mbbefd_curve<T: Scalar>(params: MbbefdParams<T>) -> Result<MbbefdCurve<T>> {
    let params = MbbefdParams::new(params.b, params.g)?;
    Ok(MbbefdCurve { branch: params.branch(), params })
}

impl<T: Scalar> MbbefdCurve<T> {
    pub fn params(&self) -> MbbefdParams<T> {
        self.params
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }
}

impl<T: Scalar> ExposureCurve<T> for MbbefdCurve<T> {
    fn g(&self, z: T) -> T {
        let MbbefdParams { b, g } = self.params;
        let one = T::one();
        match self.branch {
            Branch::Identity => z,
            Branch::UnitB => ((g - one) * z).ln_1p() / g.ln(),
            Branch::UnitBg => -(z * b.ln()).exp_m1() / (one - b),
            Branch::General => {
                let bz = (z * b.ln()).exp();
                (((g - one) * b + (one - b * g) * bz) / (one - b)).ln() / (b * g).ln()
            }
        }
    }

    fn dg(&self, z: T) -> T {
        let MbbefdParams { b, g } = self.params;
        let one = T::one();
        match self.branch {
            Branch::Identity => one,
            Branch::UnitB => (g - one) / ((one + (g - one) * z) * g.ln()),
            Branch::UnitBg => {
                let lb = b.ln();
                -lb * (z * lb).exp() / (one - b)
            }
            Branch::General => {
                let lb = b.ln();
                let bz = (z * lb).exp();
                let d = (g - one) * b + (one - b * g) * bz;
                (one - b * g) * lb * bz / (d * (b * g).ln())
            }
        }
    }

    fn d2g(&self, z: T) -> T {
        let MbbefdParams { b, g } = self.params;
        let one = T::one();
        match self.branch {
            Branch::Identity => T::zero(),
            Branch::UnitB => {
                let s = one + (g - one) * z;
                -(g - one) * (g - one) / (s * s * g.ln())
            }
            Branch::UnitBg => {
                let lb = b.ln();
                -lb * lb * (z * lb).exp() / (one - b)
            }
            Branch::General => {
                let lb = b.ln();
                let bz = (z * lb).exp();
                let d = (g - one) * b + (one - b * g) * bz;
                (one - b * g) * (g - one) * b * lb * lb * bz / (d * d * (b * g).ln())
            }
        }
    }

    fn label(&self) -> String {
        format!("mbbefd(b={}, g={})", self.params.b, self.params.g)
    }
}

/// Closed-form MBBEFD distribution for `g > 1`, `b > 0`.
#[derive(Debug, Clone, Copy)]
pub struct MbbefdDistribution<T> {
    params: MbbefdParams<T>,
    branch: Branch,
}

pub fn mbbefd_distribution<T: Scalar>(params: MbbefdParams<T>) -> Result<MbbefdDistribution<T>> {
    let params = MbbefdParams::new(params.b, params.g)?;
    if params.is_degenerate() {
        return Err(Error::Degenerate(format!(
            "MBBEFD with g = {} and b = {} is a pure point mass at 1",
            params.g, params.b
        )));
    }
    Ok(MbbefdDistribution { branch: params.branch(), params })
}

impl<T: Scalar> MbbefdDistribution<T> {
    pub fn params(&self) -> MbbefdParams<T> {
        self.params
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn curve(&self) -> MbbefdCurve<T> {
        MbbefdCurve { params: self.params, branch: self.branch }
    }

    /// Closed-form `f'(z)` on `[0, 1)`.
    pub fn pdf_derivative(&self, z: T) -> T {
        let MbbefdParams { b, g } = self.params;
        let one = T::one();
        match self.branch {
            Branch::Identity => T::zero(),
            Branch::UnitB => {
                let s = one + (g - one) * z;
                -T::lit(2.0) * (g - one) * (g - one) / (s * s * s)
            }
            Branch::UnitBg => {
                let lb = b.ln();
                -lb * lb * (z * lb).exp()
            }
            Branch::General => {
                let lb = b.ln();
                let b1z = ((one - z) * lb).exp();
                let num = (g - one) * b1z - (one - b * g);
                let den = (g - one) * b1z + (one - b * g);
                (g - one) * (b - one) * lb * lb * b1z * num / (den * den * den)
            }
        }
    }
}

impl<T: Scalar> CensoredDistribution<T> for MbbefdDistribution<T> {
    fn cdf(&self, z: T) -> T {
        if z < T::zero() {
            return T::zero();
        }
        if z >= T::one() {
            return T::one();
        }
        let MbbefdParams { b, g } = self.params;
        let one = T::one();
        match self.branch {
            Branch::Identity => T::zero(),
            Branch::UnitB => one - one / (one + (g - one) * z),
            Branch::UnitBg => -(z * b.ln()).exp_m1(),
            Branch::General => {
                let b1z = ((one - z) * b.ln()).exp();
                one - (one - b) / ((g - one) * b1z + (one - b * g))
            }
        }
    }

    fn pdf(&self, z: T) -> T {
        if z < T::zero() || z >= T::one() {
            return T::zero();
        }
        let MbbefdParams { b, g } = self.params;
        let one = T::one();
        match self.branch {
            Branch::Identity => T::zero(),
            Branch::UnitB => {
                let s = one + (g - one) * z;
                (g - one) / (s * s)
            }
            Branch::UnitBg => {
                let lb = b.ln();
                -lb * (z * lb).exp()
            }
            Branch::General => {
                let lb = b.ln();
                let b1z = ((one - z) * lb).exp();
                let den = (g - one) * b1z + (one - b * g);
                (g - one) * (b - one) * lb * b1z / (den * den)
            }
        }
    }

    fn point_mass(&self) -> T {
        T::one() / self.params.g
    }

    fn mean(&self) -> T {
        let MbbefdParams { b, g } = self.params;
        let one = T::one();
        match self.branch {
            Branch::Identity => one,
            Branch::UnitB => g.ln() / (g - one),
            Branch::UnitBg => (b - one) / b.ln(),
            Branch::General => (b - one) / b.ln() * (b * g).ln() / (b * g - one),
        }
    }
}

/// Shape of the MBBEFD density and, when unimodal, its mode
/// `z* = 1 - ln((1 - bg)/(g - 1)) / ln b`.
pub fn classify_shape<T: Scalar>(params: MbbefdParams<T>) -> Result<ShapeReport> {
    let d = mbbefd_distribution(params)?;
    let MbbefdParams { b, g } = d.params;
    let one = T::one();
    if b * g >= one || d.branch != Branch::General {
        return Ok(ShapeReport::monotone(false));
    }
    let r = (one - b * g) / (g - one);
    if r <= b {
        Ok(ShapeReport::monotone(false))
    } else if r >= one {
        Ok(ShapeReport::monotone(true))
    } else {
        let z_star = one - r.ln() / b.ln();
        Ok(ShapeReport::unimodal(z_star.to_f64_lossy()))
    }
}

/// Logistic density `e^t / (e^t + 1)^2`.
#[inline]
pub fn logistic_density<T: Scalar>(t: T) -> T {
    let e = (-t.abs()).exp();
    let s = T::one() + e;
    e / (s * s)
}

/// The MBBEFD density for `bg < 1` written as a scaled logistic density:
/// `(a + 1) ln(1/b) psi'(z ln(1/b) + ln a)` with `a = b(g - 1)/(1 - bg)`.
pub fn logistic_form_pdf<T: Scalar>(params: MbbefdParams<T>, z: T) -> Result<T> {
    let params = MbbefdParams::new(params.b, params.g)?;
    let MbbefdParams { b, g } = params;
    if params.is_degenerate() || !(b * g < T::one() - T::tol(BRANCH_TOL)) {
        return Err(Error::Domain(format!("logistic form needs g > 1, b > 0 and bg < 1 (bg = {})", b * g)));
    }
    if z < T::zero() || z >= T::one() {
        return Err(Error::Domain(format!("z = {z} must lie in [0, 1)")));
    }
    let a = b * (g - T::one()) / (T::one() - b * g);
    let rate = -b.ln();
    Ok((a + T::one()) * rate * logistic_density(z * rate + a.ln()))
}

/// `(a, b)` coordinates of the MBBEFD family: `G(z) = ln((a + b^z)/(a + 1)) / ln((a + b)/(a + 1))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbParams<T> {
    pub a: T,
    pub b: T,
}

impl<T: Scalar> AbParams<T> {
    pub fn new(a: T, b: T) -> Result<Self> {
        if !(b >= T::zero()) || !b.is_finite() {
            return Err(Error::Domain(format!("(a, b) form requires b >= 0, got b = {b}")));
        }
        let bound = -T::one().min(b);
        if !(a > bound) || !a.is_finite() {
            return Err(Error::Domain(format!("(a, b) form requires a > -min(1, b) = {bound}, got a = {a}")));
        }
        Ok(Self { a, b })
    }
}

/// `a = b(g - 1)/(1 - bg)`; singular at `bg = 1`.
pub fn to_ab<T: Scalar>(params: MbbefdParams<T>) -> Result<AbParams<T>> {
    let MbbefdParams { b, g } = MbbefdParams::new(params.b, params.g)?;
    if (b * g - T::one()).abs() <= T::tol(BRANCH_TOL) {
        return Err(Error::Degenerate("(a, b) reparametrization is singular at bg = 1".into()));
    }
    Ok(AbParams { a: b * (g - T::one()) / (T::one() - b * g), b })
}

/// `g = (a + b)/((a + 1) b)`.
pub fn from_ab<T: Scalar>(ab: AbParams<T>) -> Result<MbbefdParams<T>> {
    let AbParams { a, b } = ab;
    let den = (a + T::one()) * b;
    if den == T::zero() || !den.is_finite() {
        return Err(Error::Degenerate(format!("(a + 1) b = {den} must be non-zero")));
    }
    MbbefdParams::new(b, (a + b) / den)
}

/// One-parameter curves `b(c) = exp(3.1 - 0.15 (1 + c) c)`, `g(c) = exp((0.78 + 0.12 c) c)`.
///
/// `c = 1.5, 2, 3, 4` are the Swiss Re curves and `c = 5` the Lloyd's curve.
pub fn swiss_re_params<T: Scalar>(c: T) -> Result<MbbefdParams<T>> {
    if !(c > T::zero()) || !c.is_finite() {
        return Err(Error::Domain(format!("Swiss Re parameter c = {c} must be positive")));
    }
    let b = (T::lit(3.1) - T::lit(0.15) * (T::one() + c) * c).exp();
    let g = ((T::lit(0.78) + T::lit(0.12) * c) * c).exp();
    MbbefdParams::new(b, g)
}
