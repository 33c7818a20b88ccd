//! Linked exposure curves `G(z) = (B(z) - B(0)) / (B(1) - B(0))` with
//! `B = h(b(z))` for a link `h` (logarithm or exponential) and an inner
//! function `b`.
//!
//! Which curves are admissible is decided per grid point: for the log link
//! `b > 0` and either `b'(0) > 0, b' >= 0, b''b - b'^2 <= 0` or the mirrored
//! set; for the exponential link the curvature term is `b'' + b'^2`.
//! Distribution, density, atom, mean and `f'` are then closed forms in
//! `b, b', b'', b'''`.

use serde::Serialize;

use crate::curve::ExposureCurve;
use crate::distribution::CensoredDistribution;
use crate::error::{Error, Result};
use crate::mbbefd::{AbParams, Branch, MbbefdParams};
use crate::scalar::Scalar;
use crate::shape::{scan_shape, ShapeReport};

/// Grid used to verify the link conditions.
pub const CONDITION_GRID: usize = 1001;
/// Slack on the sign conditions, absorbing rounding at exact boundaries.
pub const CONDITION_TOL: f64 = 1e-10;

/// The inner function `b` and its derivatives on `[0, 1]`.
pub trait InnerFunction<T: Scalar>: Send + Sync {
    fn value(&self, z: T) -> T;
    fn d1(&self, z: T) -> T;
    fn d2(&self, z: T) -> T;
    /// `(b, b', b'')` in one call; override to share work between them.
    fn eval2(&self, z: T) -> (T, T, T) {
        (self.value(z), self.d1(z), self.d2(z))
    }
    /// `b'''`; needed only for the density derivative.
    fn d3(&self, _z: T) -> Option<T> {
        None
    }
    fn label(&self) -> String;
}

impl<T: Scalar, I: InnerFunction<T> + ?Sized> InnerFunction<T> for &I {
    fn value(&self, z: T) -> T {
        (**self).value(z)
    }
    fn d1(&self, z: T) -> T {
        (**self).d1(z)
    }
    fn d2(&self, z: T) -> T {
        (**self).d2(z)
    }
    fn eval2(&self, z: T) -> (T, T, T) {
        (**self).eval2(z)
    }
    fn d3(&self, z: T) -> Option<T> {
        (**self).d3(z)
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Link {
    Log,
    Exp,
}

/// Which of the two admissible condition sets the inner function satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl Link {
    fn curvature_term(self) -> &'static str {
        match self {
            Link::Log => "b''(z) b(z) - b'(z)^2",
            Link::Exp => "b''(z) + b'(z)^2",
        }
    }
}

/// A linked exposure curve and the distribution it induces.
#[derive(Debug, Clone)]
pub struct Linked<T, I> {
    inner: I,
    link: Link,
    direction: Direction,
    b0: T,
    b1: T,
    db0: T,
    db1: T,
    /// `ln b(1) - ln b(0)` for the log link, `e^{b(1) - b(0)} - 1` for the exponential link.
    norm: T,
}

impl<T: Scalar, I: InnerFunction<T>> Linked<T, I> {
    /// Builds the curve after verifying the link conditions on a
    /// [`CONDITION_GRID`]-point grid.
    pub fn new(inner: I, link: Link) -> Result<Self> {
        let b0 = inner.value(T::zero());
        let b1 = inner.value(T::one());
        let db0 = inner.d1(T::zero());
        let db1 = inner.d1(T::one());
        for (z, v) in [(0.0, b0), (1.0, b1), (0.0, db0), (1.0, db1)] {
            if !v.is_finite() {
                return Err(Error::InvalidCurve { z, reason: format!("inner function is not finite ({v})") });
            }
        }
        if b0 == b1 {
            return Err(not_curve("b(0) != b(1)", 0.0));
        }
        if db0 == T::zero() {
            return Err(not_curve("b'(0) != 0", 0.0));
        }
        let direction = if db0 > T::zero() { Direction::Increasing } else { Direction::Decreasing };
        verify_conditions(&inner, link, direction)?;
        let norm = match link {
            Link::Log => b1.ln() - b0.ln(),
            Link::Exp => (b1 - b0).exp_m1(),
        };
        Ok(Self { inner, link, direction, b0, b1, db0, db1, norm })
    }

    pub fn inner(&self) -> &I {
        &self.inner
    }

    pub fn link(&self) -> Link {
        self.link
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Closed-form `f'(z)`; requires `b'''`.
    pub fn pdf_derivative(&self, z: T) -> Result<T> {
        let d3 = self.inner.d3(z).ok_or_else(|| {
            Error::Unsupported(format!("{} has no third derivative", self.inner.label()))
        })?;
        let (b, d1, d2) = self.inner.eval2(z);
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        Ok(match self.link {
            Link::Log => {
                let num = d3 * b * b - three * d2 * d1 * b + two * d1 * d1 * d1;
                self.b0 / (-self.db0) * num / (b * b * b)
            }
            Link::Exp => {
                -(b - self.b0).exp() * (d1 * d1 * d1 + three * d1 * d2 + d3) / self.db0
            }
        })
    }
}

fn not_curve(inequality: impl Into<String>, z: f64) -> Error {
    Error::NotExposureCurve { inequality: inequality.into(), z }
}

fn verify_conditions<T: Scalar, I: InnerFunction<T>>(inner: &I, link: Link, direction: Direction) -> Result<()> {
    let tol = T::tol(CONDITION_TOL);
    let last = T::from_usize(CONDITION_GRID - 1).expect("grid size");
    for i in 0..CONDITION_GRID {
        let z = T::from_usize(i).expect("grid index") / last;
        let zf = z.to_f64_lossy();
        let (b, d1, d2) = inner.eval2(z);
        if !(b.is_finite() && d1.is_finite() && d2.is_finite()) {
            return Err(Error::InvalidCurve {
                z: zf,
                reason: format!("inner function is not finite (b={b}, b'={d1}, b''={d2})"),
            });
        }
        if link == Link::Log && !(b > T::zero()) {
            return Err(not_curve("b(z) > 0", zf));
        }
        let h = match link {
            Link::Log => d2 * b - d1 * d1,
            Link::Exp => d2 + d1 * d1,
        };
        match direction {
            Direction::Increasing => {
                if d1 < -tol {
                    return Err(not_curve("b'(z) >= 0", zf));
                }
                if h > tol {
                    return Err(not_curve(format!("{} <= 0", link.curvature_term()), zf));
                }
            }
            Direction::Decreasing => {
                if d1 > tol {
                    return Err(not_curve("b'(z) <= 0", zf));
                }
                if h < -tol {
                    return Err(not_curve(format!("{} >= 0", link.curvature_term()), zf));
                }
            }
        }
    }
    Ok(())
}

impl<T: Scalar, I: InnerFunction<T>> ExposureCurve<T> for Linked<T, I> {
    fn g(&self, z: T) -> T {
        let b = self.inner.value(z);
        match self.link {
            Link::Log => (b.ln() - self.b0.ln()) / self.norm,
            Link::Exp => (b - self.b0).exp_m1() / self.norm,
        }
    }

    fn dg(&self, z: T) -> T {
        let (b, d1) = (self.inner.value(z), self.inner.d1(z));
        match self.link {
            Link::Log => d1 / (b * self.norm),
            Link::Exp => (b - self.b0).exp() * d1 / self.norm,
        }
    }

    fn d2g(&self, z: T) -> T {
        let (b, d1, d2) = self.inner.eval2(z);
        match self.link {
            Link::Log => (d2 * b - d1 * d1) / (b * b * self.norm),
            Link::Exp => (b - self.b0).exp() * (d2 + d1 * d1) / self.norm,
        }
    }

    fn label(&self) -> String {
        match self.link {
            Link::Log => format!("log-linked({})", self.inner.label()),
            Link::Exp => format!("exp-linked({})", self.inner.label()),
        }
    }
}

impl<T: Scalar, I: InnerFunction<T>> CensoredDistribution<T> for Linked<T, I> {
    fn cdf(&self, z: T) -> T {
        if z < T::zero() {
            return T::zero();
        }
        if z >= T::one() {
            return T::one();
        }
        let (b, d1) = (self.inner.value(z), self.inner.d1(z));
        match self.link {
            Link::Log => T::one() - (d1 / self.db0) * (self.b0 / b),
            Link::Exp => T::one() - (b - self.b0).exp() * d1 / self.db0,
        }
    }

    fn pdf(&self, z: T) -> T {
        if z < T::zero() || z >= T::one() {
            return T::zero();
        }
        let (b, d1, d2) = self.inner.eval2(z);
        match self.link {
            Link::Log => self.b0 / (-self.db0) * (d2 * b - d1 * d1) / (b * b),
            Link::Exp => -(b - self.b0).exp() * (d1 * d1 + d2) / self.db0,
        }
    }

    fn point_mass(&self) -> T {
        match self.link {
            Link::Log => (self.db1 / self.db0) * (self.b0 / self.b1),
            Link::Exp => (self.b1 - self.b0).exp() * self.db1 / self.db0,
        }
    }

    fn mean(&self) -> T {
        match self.link {
            Link::Log => self.b0 / (-self.db0) * (self.b0 / self.b1).ln(),
            Link::Exp => self.norm / self.db0,
        }
    }
}

pub fn log_linked_curve<T: Scalar, I: InnerFunction<T>>(inner: I) -> Result<Linked<T, I>> {
    Linked::new(inner, Link::Log)
}

pub fn exp_linked_curve<T: Scalar, I: InnerFunction<T>>(inner: I) -> Result<Linked<T, I>> {
    Linked::new(inner, Link::Exp)
}

/// Same object as [`log_linked_curve`]; it implements both the curve and
/// the distribution traits.
pub fn log_linked_distribution<T: Scalar, I: InnerFunction<T>>(inner: I) -> Result<Linked<T, I>> {
    log_linked_curve(inner)
}

pub fn exp_linked_distribution<T: Scalar, I: InnerFunction<T>>(inner: I) -> Result<Linked<T, I>> {
    exp_linked_curve(inner)
}

/// Finite-difference spot check of `b'` and `b''` at 101 points of `[0, 1]`.
/// Returns the largest absolute error.
pub fn check_inner_smoothness<T: Scalar, I: InnerFunction<T>>(inner: &I) -> Result<f64> {
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for i in 0..=100 {
        let z = i as f64 / 100.0;
        // keep every sample inside [0, 1]
        let c = z.clamp(h, 1.0 - h);
        let at = |x: f64| T::lit(x);
        let v = |x: f64| inner.value(at(x)).to_f64_lossy();
        let d = |x: f64| inner.d1(at(x)).to_f64_lossy();
        let fd1 = (v(c + h) - v(c - h)) / (2.0 * h);
        let fd2 = (d(c + h) - d(c - h)) / (2.0 * h);
        let e1 = (fd1 - d(c)).abs();
        let e2 = (fd2 - inner.d2(at(c)).to_f64_lossy()).abs();
        if !(e1.is_finite() && e2.is_finite()) {
            return Err(Error::InvalidCurve { z: c, reason: "inner function is not finite".into() });
        }
        worst = worst.max(e1).max(e2);
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Concrete inner functions
// ---------------------------------------------------------------------------

/// `b(z) = scale (a + base^z)`: the inner function behind the MBBEFD curve.
///
/// A positive `scale` leaves the log-linked curve unchanged. The MBBEFD
/// constructor picks `scale = (1 - bg)/(1 - b)`, which keeps the inner
/// function positive in every regime including `bg > 1`, where `a + b^z < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffineExpInner<T> {
    pub a: T,
    pub base: T,
    pub scale: T,
}

impl<T: Scalar> AffineExpInner<T> {
    pub fn from_ab(ab: AbParams<T>) -> Self {
        Self { a: ab.a, base: ab.b, scale: T::one() }
    }

    pub fn from_mbbefd(params: MbbefdParams<T>) -> Result<Self> {
        let params = MbbefdParams::new(params.b, params.g)?;
        if params.branch() != Branch::General {
            return Err(Error::Degenerate(format!(
                "(a, b) inner function needs b != 1, bg != 1 and g > 1 (b = {}, g = {})",
                params.b, params.g
            )));
        }
        let MbbefdParams { b, g } = params;
        let one = T::one();
        Ok(Self { a: b * (g - one) / (one - b * g), base: b, scale: (one - b * g) / (one - b) })
    }
}

impl<T: Scalar> InnerFunction<T> for AffineExpInner<T> {
    fn value(&self, z: T) -> T {
        self.scale * (self.a + (z * self.base.ln()).exp())
    }
    fn d1(&self, z: T) -> T {
        let l = self.base.ln();
        self.scale * l * (z * l).exp()
    }
    fn d2(&self, z: T) -> T {
        let l = self.base.ln();
        self.scale * l * l * (z * l).exp()
    }
    fn d3(&self, z: T) -> Option<T> {
        let l = self.base.ln();
        Some(self.scale * l * l * l * (z * l).exp())
    }
    fn eval2(&self, z: T) -> (T, T, T) {
        let l = self.base.ln();
        let e = self.scale * (z * l).exp();
        (self.scale * self.a + e, l * e, l * l * e)
    }
    fn label(&self) -> String {
        format!("{} * ({} + {}^z)", self.scale, self.a, self.base)
    }
}

/// `b(z) = (1 - z/alpha)^delta + a`, log link.
///
/// Well defined for `alpha > 1`, `delta > 1`, `a > 1/(delta - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLogParams<T> {
    pub alpha: T,
    pub delta: T,
    pub a: T,
}

impl<T: Scalar> PowerLogParams<T> {
    pub fn new(alpha: T, delta: T, a: T) -> Result<Self> {
        finite(&[alpha, delta, a])?;
        if !(alpha > T::one()) {
            return Err(Error::Domain(format!("power-log requires alpha > 1, got {alpha}")));
        }
        if !(delta > T::one()) {
            return Err(Error::Domain(format!("power-log requires delta > 1, got {delta}")));
        }
        let bound = T::one() / (delta - T::one());
        if !(a > bound) {
            return Err(Error::Domain(format!("power-log requires a > 1/(delta - 1) = {bound}, got {a}")));
        }
        Ok(Self { alpha, delta, a })
    }

    #[inline]
    fn base(&self, z: T) -> T {
        T::one() - z / self.alpha
    }
}

impl<T: Scalar> InnerFunction<T> for PowerLogParams<T> {
    fn value(&self, z: T) -> T {
        self.base(z).powf(self.delta) + self.a
    }
    fn d1(&self, z: T) -> T {
        -(self.delta / self.alpha) * self.base(z).powf(self.delta - T::one())
    }
    fn d2(&self, z: T) -> T {
        let (al, de) = (self.alpha, self.delta);
        de * (de - T::one()) / (al * al) * self.base(z).powf(de - T::lit(2.0))
    }
    fn eval2(&self, z: T) -> (T, T, T) {
        let (al, de) = (self.alpha, self.delta);
        let s = self.base(z);
        let w = s.powf(de - T::lit(2.0));
        (w * s * s + self.a, -(de / al) * w * s, de * (de - T::one()) / (al * al) * w)
    }
    fn d3(&self, z: T) -> Option<T> {
        let (al, de) = (self.alpha, self.delta);
        Some(
            -de * (de - T::one()) * (de - T::lit(2.0)) / (al * al * al)
                * self.base(z).powf(de - T::lit(3.0)),
        )
    }
    fn label(&self) -> String {
        format!("(1 - z/{})^{} + {}", self.alpha, self.delta, self.a)
    }
}

/// `b(z) = sin(alpha z + beta) + a`, log link.
///
/// Well defined for `beta in (-pi/2, 0)`, `alpha in (0, pi/2 - beta)`,
/// `a in (-sin beta, -1/sin beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SineLogParams<T> {
    pub alpha: T,
    pub beta: T,
    pub a: T,
}

impl<T: Scalar> SineLogParams<T> {
    pub fn new(alpha: T, beta: T, a: T) -> Result<Self> {
        finite(&[alpha, beta, a])?;
        let half_pi = T::FRAC_PI_2();
        if !(beta > -half_pi && beta < T::zero()) {
            return Err(Error::Domain(format!("sine-log requires -pi/2 < beta < 0, got {beta}")));
        }
        if !(alpha > T::zero() && alpha < half_pi - beta) {
            return Err(Error::Domain(format!(
                "sine-log requires 0 < alpha < pi/2 - beta = {}, got {alpha}",
                half_pi - beta
            )));
        }
        let (lo, hi) = (-beta.sin(), -T::one() / beta.sin());
        if !(a > lo) {
            return Err(Error::Domain(format!("sine-log requires a > -sin(beta) = {lo}, got {a}")));
        }
        if !(a < hi) {
            return Err(Error::Domain(format!("sine-log requires a < -1/sin(beta) = {hi}, got {a}")));
        }
        Ok(Self { alpha, beta, a })
    }

    /// Candidate mode `(asin((a^2 - 2)/a) - beta)/alpha`, when the arcsine is defined.
    pub fn mode_candidate(&self) -> Option<T> {
        let s = (self.a * self.a - T::lit(2.0)) / self.a;
        if s.abs() > T::one() {
            return None;
        }
        Some((s.asin() - self.beta) / self.alpha)
    }
}

impl<T: Scalar> InnerFunction<T> for SineLogParams<T> {
    fn value(&self, z: T) -> T {
        (self.alpha * z + self.beta).sin() + self.a
    }
    fn d1(&self, z: T) -> T {
        self.alpha * (self.alpha * z + self.beta).cos()
    }
    fn d2(&self, z: T) -> T {
        -self.alpha * self.alpha * (self.alpha * z + self.beta).sin()
    }
    fn eval2(&self, z: T) -> (T, T, T) {
        let (sn, cs) = (self.alpha * z + self.beta).sin_cos();
        (sn + self.a, self.alpha * cs, -self.alpha * self.alpha * sn)
    }
    fn d3(&self, z: T) -> Option<T> {
        Some(-self.alpha * self.alpha * self.alpha * (self.alpha * z + self.beta).cos())
    }
    fn label(&self) -> String {
        format!("sin({} z + {}) + {}", self.alpha, self.beta, self.a)
    }
}

/// `b(z) = alpha z^2 + beta z`, exponential link.
///
/// Well defined for `alpha < 0`, `beta < -sqrt(-2 alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadExpParams<T> {
    pub alpha: T,
    pub beta: T,
}

impl<T: Scalar> QuadExpParams<T> {
    pub fn new(alpha: T, beta: T) -> Result<Self> {
        finite(&[alpha, beta])?;
        if !(alpha < T::zero()) {
            return Err(Error::Domain(format!("quad-exp requires alpha < 0, got {alpha}")));
        }
        let bound = -(-T::lit(2.0) * alpha).sqrt();
        if !(beta < bound) {
            return Err(Error::Domain(format!("quad-exp requires beta < -sqrt(-2 alpha) = {bound}, got {beta}")));
        }
        Ok(Self { alpha, beta })
    }

    /// Interior bounds of `beta` for a unimodal density:
    /// `-sqrt(-6 alpha) < beta < -2 alpha - sqrt(-6 alpha)`.
    pub fn unimodal_beta_range(&self) -> (T, T) {
        let r = (-T::lit(6.0) * self.alpha).sqrt();
        (-r, -T::lit(2.0) * self.alpha - r)
    }

    /// `z_- = (-beta - sqrt(-6 alpha)) / (2 alpha)`.
    pub fn mode_candidate(&self) -> T {
        (-self.beta - (-T::lit(6.0) * self.alpha).sqrt()) / (T::lit(2.0) * self.alpha)
    }
}

impl<T: Scalar> InnerFunction<T> for QuadExpParams<T> {
    fn value(&self, z: T) -> T {
        (self.alpha * z + self.beta) * z
    }
    fn d1(&self, z: T) -> T {
        T::lit(2.0) * self.alpha * z + self.beta
    }
    fn d2(&self, _z: T) -> T {
        T::lit(2.0) * self.alpha
    }
    fn d3(&self, _z: T) -> Option<T> {
        Some(T::zero())
    }
    fn label(&self) -> String {
        format!("{} z^2 + {} z", self.alpha, self.beta)
    }
}

/// `b(z) = epsilon (z + delta)^alpha - beta z`, exponential link.
///
/// Well defined for `alpha in (1, 2)`, `delta > 0`, `epsilon < 0` and
/// `beta > epsilon alpha delta^(alpha-1) + sqrt(-epsilon alpha (alpha-1) delta^(alpha-2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerExpParams<T> {
    pub alpha: T,
    pub delta: T,
    pub epsilon: T,
    pub beta: T,
}

impl<T: Scalar> PowerExpParams<T> {
    pub fn new(alpha: T, delta: T, epsilon: T, beta: T) -> Result<Self> {
        finite(&[alpha, delta, epsilon, beta])?;
        if !(alpha > T::one() && alpha < T::lit(2.0)) {
            return Err(Error::Domain(format!("power-exp requires 1 < alpha < 2, got {alpha}")));
        }
        if !(delta > T::zero()) {
            return Err(Error::Domain(format!("power-exp requires delta > 0, got {delta}")));
        }
        if !(epsilon < T::zero()) {
            return Err(Error::Domain(format!("power-exp requires epsilon < 0, got {epsilon}")));
        }
        let bound = Self::beta_bound(alpha, delta, epsilon);
        if !(beta > bound) {
            return Err(Error::Domain(format!(
                "power-exp requires beta > eps alpha delta^(alpha-1) + sqrt(-eps alpha (alpha-1) delta^(alpha-2)) = {bound}, got {beta}"
            )));
        }
        Ok(Self { alpha, delta, epsilon, beta })
    }

    /// Lower bound on `beta` given the other three parameters.
    pub fn beta_bound(alpha: T, delta: T, epsilon: T) -> T {
        let one = T::one();
        epsilon * alpha * delta.powf(alpha - one)
            + (-epsilon * alpha * (alpha - one) * delta.powf(alpha - T::lit(2.0))).sqrt()
    }
}

impl<T: Scalar> InnerFunction<T> for PowerExpParams<T> {
    fn value(&self, z: T) -> T {
        self.epsilon * (z + self.delta).powf(self.alpha) - self.beta * z
    }
    fn d1(&self, z: T) -> T {
        self.alpha * self.epsilon * (z + self.delta).powf(self.alpha - T::one()) - self.beta
    }
    fn d2(&self, z: T) -> T {
        let al = self.alpha;
        al * (al - T::one()) * self.epsilon * (z + self.delta).powf(al - T::lit(2.0))
    }
    fn eval2(&self, z: T) -> (T, T, T) {
        let al = self.alpha;
        let s = z + self.delta;
        let w = self.epsilon * s.powf(al - T::lit(2.0));
        (w * s * s - self.beta * z, al * w * s - self.beta, al * (al - T::one()) * w)
    }
    fn d3(&self, z: T) -> Option<T> {
        let al = self.alpha;
        Some(
            al * (al - T::one()) * (al - T::lit(2.0)) * self.epsilon
                * (z + self.delta).powf(al - T::lit(3.0)),
        )
    }
    fn label(&self) -> String {
        format!("{} (z + {})^{} - {} z", self.epsilon, self.delta, self.alpha, self.beta)
    }
}

/// `b(z) = -lambda z`, exponential link: `Z = min(Y, 1)` with `Y ~ Exp(lambda)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentialParams<T> {
    pub lambda: T,
}

impl<T: Scalar> ExponentialParams<T> {
    pub fn new(lambda: T) -> Result<Self> {
        if !(lambda > T::zero()) || !lambda.is_finite() {
            return Err(Error::Domain(format!("exponential requires lambda > 0, got {lambda}")));
        }
        Ok(Self { lambda })
    }
}

impl<T: Scalar> InnerFunction<T> for ExponentialParams<T> {
    fn value(&self, z: T) -> T {
        -self.lambda * z
    }
    fn d1(&self, _z: T) -> T {
        -self.lambda
    }
    fn d2(&self, _z: T) -> T {
        T::zero()
    }
    fn d3(&self, _z: T) -> Option<T> {
        Some(T::zero())
    }
    fn label(&self) -> String {
        format!("-{} z", self.lambda)
    }
}

fn finite<T: Scalar>(values: &[T]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Domain(format!("parameters must be finite, got {values:?}")))
    }
}

pub fn power_log_distribution<T: Scalar>(p: PowerLogParams<T>) -> Result<Linked<T, PowerLogParams<T>>> {
    let p = PowerLogParams::new(p.alpha, p.delta, p.a)?;
    log_linked_distribution(p)
}

pub fn sine_log_distribution<T: Scalar>(p: SineLogParams<T>) -> Result<Linked<T, SineLogParams<T>>> {
    let p = SineLogParams::new(p.alpha, p.beta, p.a)?;
    log_linked_distribution(p)
}

pub fn quad_exp_distribution<T: Scalar>(p: QuadExpParams<T>) -> Result<Linked<T, QuadExpParams<T>>> {
    let p = QuadExpParams::new(p.alpha, p.beta)?;
    exp_linked_distribution(p)
}

pub fn power_exp_distribution<T: Scalar>(p: PowerExpParams<T>) -> Result<Linked<T, PowerExpParams<T>>> {
    let p = PowerExpParams::new(p.alpha, p.delta, p.epsilon, p.beta)?;
    exp_linked_distribution(p)
}

/// The distribution of `min(Y, 1)` for `Y ~ Exp(lambda)`, built through the
/// exponential link with `b(z) = -lambda z`.
pub fn censored_exponential<T: Scalar>(lambda: T) -> Result<Linked<T, ExponentialParams<T>>> {
    exp_linked_distribution(ExponentialParams::new(lambda)?)
}

// ---------------------------------------------------------------------------
// Shape analysis
// ---------------------------------------------------------------------------

/// Points used when a family's shape has to be decided numerically.
pub const SHAPE_SCAN_POINTS: usize = 10_000;

fn monotone_from_midpoint<T: Scalar, I: InnerFunction<T>>(d: &Linked<T, I>) -> Result<ShapeReport> {
    let s = d.pdf_derivative(T::lit(0.5))?;
    Ok(ShapeReport::monotone(s > T::zero()))
}

/// Power-log: the density can only have an interior maximum for `delta > 2`.
/// The critical points solve a quadratic in `y = (1 - z/alpha)^delta`; the
/// smaller root `y_-` gives a maximum iff it lies in `((1 - 1/alpha)^delta, 1)`.
pub fn power_log_shape<T: Scalar>(p: PowerLogParams<T>) -> Result<ShapeReport> {
    let d = power_log_distribution(p)?;
    let (al, de, a) = (p.alpha.to_f64_lossy(), p.delta.to_f64_lossy(), p.a.to_f64_lossy());
    if de > 2.0 {
        let disc = (de - 1.0).powi(2) * (de + 4.0).powi(2) - 8.0 * (de - 1.0) * (de - 2.0);
        let y_minus = a * ((de - 1.0) * (de + 4.0) - disc.sqrt()) / 4.0;
        let y_at_one = (1.0 - 1.0 / al).powf(de);
        if y_minus > y_at_one && y_minus < 1.0 {
            return Ok(ShapeReport::unimodal(al * (1.0 - y_minus.powf(1.0 / de))));
        }
    }
    monotone_from_midpoint(&d)
}

/// Sine-log: an interior maximum needs `1 <= a <= 2`, and then sits at
/// `(asin((a^2 - 2)/a) - beta)/alpha` if that point is inside `(0, 1)`.
pub fn sine_log_shape<T: Scalar>(p: SineLogParams<T>) -> Result<ShapeReport> {
    let d = sine_log_distribution(p)?;
    let a = p.a.to_f64_lossy();
    if (1.0..=2.0).contains(&a) {
        if let Some(z) = p.mode_candidate() {
            let z = z.to_f64_lossy();
            if z > 0.0 && z < 1.0 {
                return Ok(ShapeReport::unimodal(z));
            }
        }
        // No interior root of the closed-form derivative: let the derivative decide.
        return Ok(scan_shape(|z| d.pdf_derivative(T::lit(z)).map(|v| v.to_f64_lossy()).unwrap_or(f64::NAN), SHAPE_SCAN_POINTS));
    }
    monotone_from_midpoint(&d)
}

/// Quad-exp: unimodal iff `-sqrt(-6 alpha) < beta < -2 alpha - sqrt(-6 alpha)`,
/// with mode `z_- = (-beta - sqrt(-6 alpha))/(2 alpha)`.
pub fn quad_exp_shape<T: Scalar>(p: QuadExpParams<T>) -> Result<ShapeReport> {
    let d = quad_exp_distribution(p)?;
    let (lo, hi) = p.unimodal_beta_range();
    if p.beta > lo && p.beta < hi {
        return Ok(ShapeReport::unimodal(p.mode_candidate().to_f64_lossy()));
    }
    monotone_from_midpoint(&d)
}

/// Power-exp has no closed-form critical point; the shape is decided by
/// counting sign changes of `f'` on a [`SHAPE_SCAN_POINTS`] grid.
pub fn power_exp_shape<T: Scalar>(p: PowerExpParams<T>) -> Result<ShapeReport> {
    let d = power_exp_distribution(p)?;
    Ok(scan_shape(
        |z| d.pdf_derivative(T::lit(z)).map(|v| v.to_f64_lossy()).unwrap_or(f64::NAN),
        SHAPE_SCAN_POINTS,
    ))
}

/// The censored exponential density `lambda e^{-lambda z}` is decreasing.
pub fn exponential_shape<T: Scalar>(p: ExponentialParams<T>) -> Result<ShapeReport> {
    ExponentialParams::new(p.lambda)?;
    Ok(ShapeReport::monotone(false))
}
