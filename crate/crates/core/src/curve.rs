//! Exposure curves: validation, identity blends and convex mixtures.
//!
//! An exposure curve is a non-decreasing, concave, twice continuously
//! differentiable `G` on `[0, 1]` with `G(0) = 0`, `G(1) = 1` and `G'(0) > 0`.
//! Every curve supplies its first two derivatives analytically; finite
//! differences only appear in [`validate_exposure_curve`] as a cross-check.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A curve `G` together with its analytic derivatives.
pub trait ExposureCurve<T: Scalar>: Send + Sync {
    /// `G(z)`
    fn g(&self, z: T) -> T;
    /// `G'(z)`
    fn dg(&self, z: T) -> T;
    /// `G''(z)`
    fn d2g(&self, z: T) -> T;
    fn label(&self) -> String;
}

/// Shared, type-erased curve handle used for mixtures.
pub type CurveRef<T> = Arc<dyn ExposureCurve<T>>;

impl<T: Scalar, C: ExposureCurve<T> + ?Sized> ExposureCurve<T> for &C {
    fn g(&self, z: T) -> T {
        (**self).g(z)
    }
    fn dg(&self, z: T) -> T {
        (**self).dg(z)
    }
    fn d2g(&self, z: T) -> T {
        (**self).d2g(z)
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

impl<T: Scalar, C: ExposureCurve<T> + ?Sized> ExposureCurve<T> for Arc<C> {
    fn g(&self, z: T) -> T {
        (**self).g(z)
    }
    fn dg(&self, z: T) -> T {
        (**self).dg(z)
    }
    fn d2g(&self, z: T) -> T {
        (**self).d2g(z)
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

impl<T: Scalar, C: ExposureCurve<T> + ?Sized> ExposureCurve<T> for Box<C> {
    fn g(&self, z: T) -> T {
        (**self).g(z)
    }
    fn dg(&self, z: T) -> T {
        (**self).dg(z)
    }
    fn d2g(&self, z: T) -> T {
        (**self).d2g(z)
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

/// `G(z) = z`: all mass sits on the censoring point.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityCurve;

impl<T: Scalar> ExposureCurve<T> for IdentityCurve {
    fn g(&self, z: T) -> T {
        z
    }
    fn dg(&self, _z: T) -> T {
        T::one()
    }
    fn d2g(&self, _z: T) -> T {
        T::zero()
    }
    fn label(&self) -> String {
        "identity".into()
    }
}

/// A curve given by three closures. Useful for ad-hoc candidates that still
/// have to pass [`validate_exposure_curve`].
pub struct FnCurve<T> {
    label: String,
    g: Box<dyn Fn(T) -> T + Send + Sync>,
    dg: Box<dyn Fn(T) -> T + Send + Sync>,
    d2g: Box<dyn Fn(T) -> T + Send + Sync>,
}

impl<T: Scalar> FnCurve<T> {
    pub fn new(
        label: impl Into<String>,
        g: impl Fn(T) -> T + Send + Sync + 'static,
        dg: impl Fn(T) -> T + Send + Sync + 'static,
        d2g: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Self {
        Self { label: label.into(), g: Box::new(g), dg: Box::new(dg), d2g: Box::new(d2g) }
    }
}

impl<T: Scalar> ExposureCurve<T> for FnCurve<T> {
    fn g(&self, z: T) -> T {
        (self.g)(z)
    }
    fn dg(&self, z: T) -> T {
        (self.dg)(z)
    }
    fn d2g(&self, z: T) -> T {
        (self.d2g)(z)
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}

/// `w G(z) + (1 - w) z`.
///
/// The induced distribution scales the density by `w` and moves the
/// remaining `1 - w` onto the censoring point: `p~ = w p + (1 - w)`.
#[derive(Debug, Clone)]
pub struct Blend<C> {
    pub curve: C,
    pub w: f64,
}

/// Blends `curve` with the identity curve. `w` must lie in `[0, 1]`.
pub fn blend_with_identity<C>(curve: C, w: f64) -> Result<Blend<C>> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::Domain(format!("blend weight w = {w} must lie in [0, 1]")));
    }
    Ok(Blend { curve, w })
}

impl<T: Scalar, C: ExposureCurve<T>> ExposureCurve<T> for Blend<C> {
    fn g(&self, z: T) -> T {
        let w = T::lit(self.w);
        w * self.curve.g(z) + (T::one() - w) * z
    }
    fn dg(&self, z: T) -> T {
        let w = T::lit(self.w);
        w * self.curve.dg(z) + (T::one() - w)
    }
    fn d2g(&self, z: T) -> T {
        T::lit(self.w) * self.curve.d2g(z)
    }
    fn label(&self) -> String {
        format!("blend({}, w={})", self.curve.label(), self.w)
    }
}

/// Mixture weights: the curve weights `alphas` and the induced distribution
/// weights `w_i = alpha_i G_i'(0) / sum_j alpha_j G_j'(0)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixtureWeights {
    pub alphas: Vec<f64>,
    pub derived_w: Vec<f64>,
}

/// Convex combination `sum_i alpha_i G_i`.
pub struct Mixture<T> {
    components: Vec<CurveRef<T>>,
    alphas: Vec<T>,
}

impl<T: Scalar> Mixture<T> {
    pub fn components(&self) -> &[CurveRef<T>] {
        &self.components
    }
}

impl<T: Scalar> ExposureCurve<T> for Mixture<T> {
    fn g(&self, z: T) -> T {
        self.components.iter().zip(&self.alphas).fold(T::zero(), |acc, (c, &a)| acc + a * c.g(z))
    }
    fn dg(&self, z: T) -> T {
        self.components.iter().zip(&self.alphas).fold(T::zero(), |acc, (c, &a)| acc + a * c.dg(z))
    }
    fn d2g(&self, z: T) -> T {
        self.components.iter().zip(&self.alphas).fold(T::zero(), |acc, (c, &a)| acc + a * c.d2g(z))
    }
    fn label(&self) -> String {
        let parts: Vec<String> = self
            .components
            .iter()
            .zip(&self.alphas)
            .map(|(c, a)| format!("{a}*{}", c.label()))
            .collect();
        format!("mixture({})", parts.join(" + "))
    }
}

/// Builds `G = sum_i alpha_i G_i` and the induced distribution weights.
pub fn mix_curves<T: Scalar>(
    curves: Vec<CurveRef<T>>,
    alphas: &[f64],
) -> Result<(Mixture<T>, MixtureWeights)> {
    if curves.is_empty() {
        return Err(Error::Weight("at least one curve is required".into()));
    }
    if curves.len() != alphas.len() {
        return Err(Error::Weight(format!(
            "{} curves but {} weights",
            curves.len(),
            alphas.len()
        )));
    }
    if let Some(a) = alphas.iter().find(|a| !(**a >= 0.0) || !a.is_finite()) {
        return Err(Error::Weight(format!("weight {a} is negative or not finite")));
    }
    let total: f64 = alphas.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Weight(format!("weights sum to {total}, expected 1")));
    }
    let slopes: Vec<f64> = curves.iter().map(|c| c.dg(T::zero()).to_f64_lossy()).collect();
    let norm: f64 = alphas.iter().zip(&slopes).map(|(a, s)| a * s).sum();
    if !(norm > 0.0) {
        return Err(Error::Weight("mixture has G'(0) <= 0".into()));
    }
    let derived_w = alphas.iter().zip(&slopes).map(|(a, s)| a * s / norm).collect();
    let mixture = Mixture { components: curves, alphas: alphas.iter().map(|&a| T::lit(a)).collect() };
    Ok((mixture, MixtureWeights { alphas: alphas.to_vec(), derived_w }))
}

/// One named clause of the exposure-curve definition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// The quantity the clause was decided on (residual, minimum, maximum, ...).
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub label: String,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub const CHECK_G0: &str = "G(0) = 0";
pub const CHECK_G1: &str = "G(1) = 1";
pub const CHECK_SLOPE0: &str = "G'(0) > 0";
pub const CHECK_MONOTONE: &str = "G' >= 0";
pub const CHECK_CONCAVE: &str = "G'' <= 0";
pub const CHECK_DERIVATIVE: &str = "G' matches finite differences of G";

const FD_STEP: f64 = 1e-5;

/// Grid check of the exposure-curve definition on `grid_points` uniform
/// points of `[0, 1]`, plus a finite-difference cross-check of `G'`
/// (relative to `max(1, |G'|)`).
///
/// A non-finite evaluation anywhere on the grid is an error rather than a
/// failed check.
pub fn validate_exposure_curve<T, C>(curve: &C, grid_points: usize) -> Result<ValidationReport>
where
    T: Scalar,
    C: ExposureCurve<T> + ?Sized,
{
    if grid_points < 3 {
        return Err(Error::Domain(format!("grid_points = {grid_points} must be at least 3")));
    }
    let h = T::lit(FD_STEP);
    let two = T::lit(2.0);
    let last = T::from_usize(grid_points - 1).expect("grid size");

    let mut min_slope = f64::INFINITY;
    let mut max_curv = f64::NEG_INFINITY;
    let mut max_fd_err: f64 = 0.0;
    for i in 0..grid_points {
        let z = T::from_usize(i).expect("grid index") / last;
        let (g, dg, d2g) = (curve.g(z), curve.dg(z), curve.d2g(z));
        if !(g.is_finite() && dg.is_finite() && d2g.is_finite()) {
            return Err(Error::InvalidCurve {
                z: z.to_f64_lossy(),
                reason: format!("non-finite evaluation (G={g}, G'={dg}, G''={d2g})"),
            });
        }
        min_slope = min_slope.min(dg.to_f64_lossy());
        max_curv = max_curv.max(d2g.to_f64_lossy());

        // Second-order stencils (one-sided at the ends, so every sample stays
        // in [0, 1]) with one Richardson step, which keeps the truncation
        // error small for steep curves.
        let stencil = |h: T| {
            if z - h < T::zero() {
                (-T::lit(3.0) * g + T::lit(4.0) * curve.g(z + h) - curve.g(z + two * h)) / (two * h)
            } else if z + h > T::one() {
                (T::lit(3.0) * g - T::lit(4.0) * curve.g(z - h) + curve.g(z - two * h)) / (two * h)
            } else {
                (curve.g(z + h) - curve.g(z - h)) / (two * h)
            }
        };
        let fd = (T::lit(4.0) * stencil(h / two) - stencil(h)) / T::lit(3.0);
        let err = ((fd - dg).abs() / dg.abs().max(T::one())).to_f64_lossy();
        if !err.is_finite() {
            return Err(Error::InvalidCurve {
                z: z.to_f64_lossy(),
                reason: "non-finite finite-difference evaluation".into(),
            });
        }
        max_fd_err = max_fd_err.max(err);
    }

    let g0 = curve.g(T::zero()).to_f64_lossy();
    let g1 = curve.g(T::one()).to_f64_lossy();
    let s0 = curve.dg(T::zero()).to_f64_lossy();
    let end_tol = T::tol(1e-12).to_f64_lossy();
    let slope_tol = T::tol(1e-12).to_f64_lossy();
    let curv_tol = T::tol(1e-9).to_f64_lossy();
    let fd_tol = T::tol(1e-6).max(T::epsilon().sqrt()).to_f64_lossy();
    let checks = vec![
        Check { name: CHECK_G0, passed: g0.abs() <= end_tol, value: g0 },
        Check { name: CHECK_G1, passed: (g1 - 1.0).abs() <= end_tol, value: g1 },
        Check { name: CHECK_SLOPE0, passed: s0 > 0.0, value: s0 },
        Check { name: CHECK_MONOTONE, passed: min_slope >= -slope_tol, value: min_slope },
        Check { name: CHECK_CONCAVE, passed: max_curv <= curv_tol, value: max_curv },
        Check { name: CHECK_DERIVATIVE, passed: max_fd_err <= fd_tol, value: max_fd_err },
    ];
    Ok(ValidationReport { label: curve.label(), checks })
}
