//! Registry of the fittable families.
//!
//! Each family has a parameter vector in a fixed order, a validity box (where
//! the distribution exists), a fitting domain `Theta` (the open subset the
//! optimizer searches) and a bijection between `Theta` and `R^dim`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::curve::ExposureCurve;
use crate::distribution::CensoredDistribution;
use crate::error::{Error, Result};
use crate::linked::{
    censored_exponential, exponential_shape, power_exp_distribution, power_exp_shape, power_log_distribution,
    power_log_shape, quad_exp_distribution, quad_exp_shape, sine_log_distribution, sine_log_shape,
    ExponentialParams, InnerFunction, Linked, PowerExpParams, PowerLogParams, QuadExpParams, SineLogParams,
};
use crate::mbbefd::{classify_shape, mbbefd_distribution, MbbefdDistribution, MbbefdParams};
use crate::scalar::{logistic, logit, Scalar};
use crate::shape::ShapeReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Mbbefd,
    PowerLog,
    SineLog,
    QuadExp,
    PowerExp,
    Exponential,
}

impl Family {
    pub const ALL: [Family; 6] =
        [Family::Mbbefd, Family::PowerLog, Family::SineLog, Family::QuadExp, Family::PowerExp, Family::Exponential];

    pub fn name(self) -> &'static str {
        match self {
            Family::Mbbefd => "mbbefd",
            Family::PowerLog => "power-log",
            Family::SineLog => "sine-log",
            Family::QuadExp => "quad-exp",
            Family::PowerExp => "power-exp",
            Family::Exponential => "exponential",
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::Mbbefd => &["b", "g"],
            Family::PowerLog => &["alpha", "delta", "a"],
            Family::SineLog => &["alpha", "beta", "a"],
            Family::QuadExp => &["alpha", "beta"],
            Family::PowerExp => &["alpha", "delta", "epsilon", "beta"],
            Family::Exponential => &["lambda"],
        }
    }

    pub fn dim(self) -> usize {
        self.param_names().len()
    }

    fn check_len(self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::Domain(format!(
                "{} expects {} parameters ({}), got {}",
                self.name(),
                self.dim(),
                self.param_names().join(", "),
                len
            )));
        }
        Ok(())
    }

    /// Builds the distribution; fails if `theta` is outside the validity box.
    pub fn distribution<T: Scalar>(self, theta: &[T]) -> Result<FamilyDistribution<T>> {
        self.check_len(theta.len())?;
        let t = theta;
        Ok(match self {
            Family::Mbbefd => FamilyDistribution::Mbbefd(mbbefd_distribution(MbbefdParams::new(t[0], t[1])?)?),
            Family::PowerLog => FamilyDistribution::PowerLog(power_log_distribution(PowerLogParams::new(t[0], t[1], t[2])?)?),
            Family::SineLog => FamilyDistribution::SineLog(sine_log_distribution(SineLogParams::new(t[0], t[1], t[2])?)?),
            Family::QuadExp => FamilyDistribution::QuadExp(quad_exp_distribution(QuadExpParams::new(t[0], t[1])?)?),
            Family::PowerExp => {
                FamilyDistribution::PowerExp(power_exp_distribution(PowerExpParams::new(t[0], t[1], t[2], t[3])?)?)
            }
            Family::Exponential => FamilyDistribution::Exponential(censored_exponential(t[0])?),
        })
    }

    /// Checks `theta` against the validity box.
    pub fn check_valid(self, theta: &[f64]) -> Result<()> {
        self.check_len(theta.len())?;
        self.distribution(theta).map(|_| ())
    }

    /// Checks `theta` against the fitting domain `Theta`, which for the
    /// MBBEFD, power-log, sine-log and quad-exp families is the region where
    /// the density is unimodal.
    pub fn check_fit_domain(self, theta: &[f64]) -> Result<()> {
        self.check_valid(theta)?;
        let t = theta;
        match self {
            Family::Mbbefd => {
                let (b, g) = (t[0], t[1]);
                let (lo, hi) = mbbefd_b_bounds(g);
                if !(b > lo && b < hi) {
                    return Err(Error::Domain(format!(
                        "mbbefd fit domain requires max(0, (2 - g)/g) = {lo} < b < 1/(2g - 1) = {hi}, got b = {b}"
                    )));
                }
            }
            Family::PowerLog => {
                if !(t[1] > 2.0) {
                    return Err(Error::Domain(format!("power-log fit domain requires delta > 2, got {}", t[1])));
                }
            }
            Family::SineLog => {
                let hi = sine_a_upper(t[1]);
                if !(t[2] > 1.0 && t[2] < hi) {
                    return Err(Error::Domain(format!(
                        "sine-log fit domain requires 1 < a < min(-1/sin(beta), 2) = {hi}, got {}",
                        t[2]
                    )));
                }
            }
            Family::QuadExp => {
                let (lo, hi) = quad_beta_bounds(t[0]);
                if !(t[1] > lo && t[1] < hi) {
                    return Err(Error::Domain(format!(
                        "quad-exp fit domain requires -sqrt(-6 alpha) = {lo} < beta < min(-2 alpha - sqrt(-6 alpha), -sqrt(-2 alpha)) = {hi}, got {}",
                        t[1]
                    )));
                }
            }
            Family::PowerExp | Family::Exponential => {}
        }
        Ok(())
    }

    /// Maps `R^dim` onto `Theta`.
    pub fn from_unconstrained(self, u: &[f64]) -> Vec<f64> {
        match self {
            Family::Mbbefd => {
                let g = 1.0 + u[0].exp();
                let (lo, hi) = mbbefd_b_bounds(g);
                vec![lo + (hi - lo) * logistic(u[1]), g]
            }
            Family::PowerLog => {
                let alpha = 1.0 + u[0].exp();
                let delta = 2.0 + u[1].exp();
                vec![alpha, delta, 1.0 / (delta - 1.0) + u[2].exp()]
            }
            Family::SineLog => {
                let beta = -FRAC_PI_2 * logistic(u[0]);
                let alpha = (FRAC_PI_2 - beta) * logistic(u[1]);
                let a = 1.0 + (sine_a_upper(beta) - 1.0) * logistic(u[2]);
                vec![alpha, beta, a]
            }
            Family::QuadExp => {
                let alpha = -u[0].exp();
                let (lo, hi) = quad_beta_bounds(alpha);
                vec![alpha, lo + (hi - lo) * logistic(u[1])]
            }
            Family::PowerExp => {
                let alpha = 1.0 + logistic(u[0]);
                let delta = u[1].exp();
                let epsilon = -u[2].exp();
                let beta = PowerExpParams::beta_bound(alpha, delta, epsilon) + u[3].exp();
                vec![alpha, delta, epsilon, beta]
            }
            Family::Exponential => vec![u[0].exp()],
        }
    }

    /// Inverse of [`Family::from_unconstrained`]; fails outside `Theta`.
    pub fn to_unconstrained(self, theta: &[f64]) -> Result<Vec<f64>> {
        self.check_fit_domain(theta)?;
        let t = theta;
        Ok(match self {
            Family::Mbbefd => {
                let (lo, hi) = mbbefd_b_bounds(t[1]);
                vec![(t[1] - 1.0).ln(), logit((t[0] - lo) / (hi - lo))]
            }
            Family::PowerLog => vec![(t[0] - 1.0).ln(), (t[1] - 2.0).ln(), (t[2] - 1.0 / (t[1] - 1.0)).ln()],
            Family::SineLog => {
                let (alpha, beta, a) = (t[0], t[1], t[2]);
                vec![
                    logit(-beta / FRAC_PI_2),
                    logit(alpha / (FRAC_PI_2 - beta)),
                    logit((a - 1.0) / (sine_a_upper(beta) - 1.0)),
                ]
            }
            Family::QuadExp => {
                let (lo, hi) = quad_beta_bounds(t[0]);
                vec![(-t[0]).ln(), logit((t[1] - lo) / (hi - lo))]
            }
            Family::PowerExp => {
                let (alpha, delta, epsilon, beta) = (t[0], t[1], t[2], t[3]);
                vec![
                    logit(alpha - 1.0),
                    delta.ln(),
                    (-epsilon).ln(),
                    (beta - PowerExpParams::beta_bound(alpha, delta, epsilon)).ln(),
                ]
            }
            Family::Exponential => vec![t[0].ln()],
        })
    }

    /// Five deterministic starting points in unconstrained coordinates: a
    /// family-specific centre and four displacements around it.
    pub fn initial_points(self) -> Vec<Vec<f64>> {
        let centre: Vec<f64> = match self {
            // g = 3, b in the middle of its bounds
            Family::Mbbefd => vec![2f64.ln(), 0.0],
            // alpha = 2, delta = 3, a = 1.5
            Family::PowerLog => vec![0.0, 0.0, 0.0],
            // beta = -pi/4, alpha and a mid-range
            Family::SineLog => vec![0.0, 0.0, 0.0],
            // alpha = -2, beta mid-range
            Family::QuadExp => vec![2f64.ln(), 0.0],
            // alpha = 1.5, delta = 0.5, epsilon = -1
            Family::PowerExp => vec![0.0, 0.5f64.ln(), 0.0, 0.5f64.ln()],
            Family::Exponential => vec![0.0],
        };
        let d = centre.len();
        let alternating: Vec<f64> = (0..d).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let mut out = vec![centre.clone()];
        for (sign, dir) in [(1.0, &alternating), (-1.0, &alternating), (1.0, &vec![1.0; d]), (-1.0, &vec![1.0; d])] {
            out.push(centre.iter().zip(dir.iter()).map(|(c, v)| c + sign * v).collect());
        }
        out
    }

    pub fn shape(self, theta: &[f64]) -> Result<ShapeReport> {
        self.check_len(theta.len())?;
        let t = theta;
        match self {
            Family::Mbbefd => classify_shape(MbbefdParams::new(t[0], t[1])?),
            Family::PowerLog => power_log_shape(PowerLogParams::new(t[0], t[1], t[2])?),
            Family::SineLog => sine_log_shape(SineLogParams::new(t[0], t[1], t[2])?),
            Family::QuadExp => quad_exp_shape(QuadExpParams::new(t[0], t[1])?),
            Family::PowerExp => power_exp_shape(PowerExpParams::new(t[0], t[1], t[2], t[3])?),
            Family::Exponential => exponential_shape(ExponentialParams::new(t[0])?),
        }
    }

    /// Parses `name=value` pairs into a parameter vector in registry order.
    pub fn params_from_pairs(self, pairs: &[(String, f64)]) -> Result<Vec<f64>> {
        let names = self.param_names();
        let mut out = vec![None; names.len()];
        for (k, v) in pairs {
            let i = names.iter().position(|n| n == k).ok_or_else(|| {
                Error::Domain(format!("unknown parameter `{k}` for {} (expected {})", self.name(), names.join(", ")))
            })?;
            if out[i].replace(*v).is_some() {
                return Err(Error::Domain(format!("parameter `{k}` given twice")));
            }
        }
        out.iter()
            .zip(names)
            .map(|(v, n)| v.ok_or_else(|| Error::Domain(format!("missing parameter `{n}` for {}", self.name()))))
            .collect()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| {
            let known: Vec<_> = Family::ALL.iter().map(|f| f.name()).collect();
            Error::Domain(format!("unknown family `{s}` (expected one of {})", known.join(", ")))
        })
    }
}

fn mbbefd_b_bounds(g: f64) -> (f64, f64) {
    (((2.0 - g) / g).max(0.0), 1.0 / (2.0 * g - 1.0))
}

fn sine_a_upper(beta: f64) -> f64 {
    (-1.0 / beta.sin()).min(2.0)
}

fn quad_beta_bounds(alpha: f64) -> (f64, f64) {
    let r6 = (-6.0 * alpha).sqrt();
    (-r6, (-2.0 * alpha - r6).min(-(-2.0 * alpha).sqrt()))
}

/// A named parameter vector of one family.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    pub family: Family,
    pub values: Vec<f64>,
}

impl ParamVector {
    pub fn new(family: Family, values: Vec<f64>) -> Result<Self> {
        family.check_valid(&values)?;
        Ok(Self { family, values })
    }

    pub fn from_unconstrained(family: Family, u: &[f64]) -> Self {
        Self { family, values: family.from_unconstrained(u) }
    }

    pub fn to_unconstrained(&self) -> Result<Vec<f64>> {
        self.family.to_unconstrained(&self.values)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.family.param_names().iter().position(|n| *n == name).map(|i| self.values[i])
    }

    /// `{name: value}` in registry order.
    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .family
            .param_names()
            .iter()
            .zip(&self.values)
            .map(|(n, v)| (n.to_string(), serde_json::json!(v)))
            .collect();
        serde_json::Value::Object(map)
    }
}

impl Serialize for ParamVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// A distribution from one of the registered families.
#[derive(Debug, Clone)]
pub enum FamilyDistribution<T> {
    Mbbefd(MbbefdDistribution<T>),
    PowerLog(Linked<T, PowerLogParams<T>>),
    SineLog(Linked<T, SineLogParams<T>>),
    QuadExp(Linked<T, QuadExpParams<T>>),
    PowerExp(Linked<T, PowerExpParams<T>>),
    Exponential(Linked<T, ExponentialParams<T>>),
}

macro_rules! dispatch {
    ($self:expr, $d:ident => $body:expr) => {
        match $self {
            FamilyDistribution::Mbbefd($d) => $body,
            FamilyDistribution::PowerLog($d) => $body,
            FamilyDistribution::SineLog($d) => $body,
            FamilyDistribution::QuadExp($d) => $body,
            FamilyDistribution::PowerExp($d) => $body,
            FamilyDistribution::Exponential($d) => $body,
        }
    };
}

impl<T: Scalar> FamilyDistribution<T> {
    pub fn family(&self) -> Family {
        match self {
            FamilyDistribution::Mbbefd(_) => Family::Mbbefd,
            FamilyDistribution::PowerLog(_) => Family::PowerLog,
            FamilyDistribution::SineLog(_) => Family::SineLog,
            FamilyDistribution::QuadExp(_) => Family::QuadExp,
            FamilyDistribution::PowerExp(_) => Family::PowerExp,
            FamilyDistribution::Exponential(_) => Family::Exponential,
        }
    }

    pub fn pdf_derivative(&self, z: T) -> Result<T> {
        match self {
            FamilyDistribution::Mbbefd(d) => Ok(d.pdf_derivative(z)),
            FamilyDistribution::PowerLog(d) => d.pdf_derivative(z),
            FamilyDistribution::SineLog(d) => d.pdf_derivative(z),
            FamilyDistribution::QuadExp(d) => d.pdf_derivative(z),
            FamilyDistribution::PowerExp(d) => d.pdf_derivative(z),
            FamilyDistribution::Exponential(d) => d.pdf_derivative(z),
        }
    }

    /// The exposure curve `G` behind the distribution.
    pub fn g(&self, z: T) -> T {
        match self {
            FamilyDistribution::Mbbefd(d) => d.curve().g(z),
            FamilyDistribution::PowerLog(d) => d.g(z),
            FamilyDistribution::SineLog(d) => d.g(z),
            FamilyDistribution::QuadExp(d) => d.g(z),
            FamilyDistribution::PowerExp(d) => d.g(z),
            FamilyDistribution::Exponential(d) => d.g(z),
        }
    }

    /// The inner function label, or the MBBEFD parameters.
    pub fn label(&self) -> String {
        match self {
            FamilyDistribution::Mbbefd(d) => format!("mbbefd(b = {}, g = {})", d.params().b, d.params().g),
            FamilyDistribution::PowerLog(d) => d.inner().label(),
            FamilyDistribution::SineLog(d) => d.inner().label(),
            FamilyDistribution::QuadExp(d) => d.inner().label(),
            FamilyDistribution::PowerExp(d) => d.inner().label(),
            FamilyDistribution::Exponential(d) => d.inner().label(),
        }
    }
}

impl<T: Scalar> CensoredDistribution<T> for FamilyDistribution<T> {
    fn cdf(&self, z: T) -> T {
        dispatch!(self, d => d.cdf(z))
    }
    fn pdf(&self, z: T) -> T {
        dispatch!(self, d => d.pdf(z))
    }
    fn point_mass(&self) -> T {
        dispatch!(self, d => d.point_mass())
    }
    fn mean(&self) -> T {
        dispatch!(self, d => d.mean())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("pareto".parse::<Family>().is_err());
    }

    #[test]
    fn transforms_round_trip_and_stay_inside() {
        for f in Family::ALL {
            for start in f.initial_points() {
                let theta = f.from_unconstrained(&start);
                f.check_fit_domain(&theta).unwrap_or_else(|e| panic!("{f}: {e}"));
                let back = f.to_unconstrained(&theta).unwrap();
                for (a, b) in start.iter().zip(&back) {
                    assert!((a - b).abs() < 1e-12, "{f}: {start:?} vs {back:?}");
                }
            }
        }
    }

    #[test]
    fn extreme_coordinates_stay_valid() {
        for f in Family::ALL {
            for v in [-30.0, -5.0, 5.0, 30.0] {
                let u = vec![v; f.dim()];
                let theta = f.from_unconstrained(&u);
                assert!(theta.iter().all(|x| x.is_finite()), "{f}: {theta:?}");
            }
        }
    }

    #[test]
    fn centre_points() {
        let t = Family::Mbbefd.from_unconstrained(&Family::Mbbefd.initial_points()[0]);
        assert!((t[1] - 3.0).abs() < 1e-14 && (t[0] - 0.1).abs() < 1e-14);
        let t = Family::QuadExp.from_unconstrained(&[2f64.ln(), 0.0]);
        assert!((t[0] + 2.0).abs() < 1e-14);
    }

    #[test]
    fn fit_domain_errors_name_the_bound() {
        let e = Family::PowerLog.check_fit_domain(&[2.0, 1.8, 2.0]).unwrap_err();
        assert!(e.to_string().contains("delta > 2"));
        let e = Family::Mbbefd.check_fit_domain(&[0.5, 3.0]).unwrap_err();
        assert!(e.to_string().contains("1/(2g - 1)"));
        assert!(Family::Mbbefd.check_valid(&[0.5, 3.0]).is_ok());
    }

    #[test]
    fn params_from_pairs() {
        let p = Family::Mbbefd.params_from_pairs(&[("g".into(), 3.0), ("b".into(), 0.1)]).unwrap();
        assert_eq!(p, vec![0.1, 3.0]);
        assert!(Family::Mbbefd.params_from_pairs(&[("c".into(), 3.0)]).is_err());
        assert!(Family::Mbbefd.params_from_pairs(&[("b".into(), 3.0)]).is_err());
    }

    #[test]
    fn param_vector_json_keeps_order() {
        let p = ParamVector::new(Family::PowerExp, vec![1.5, 0.5, -1.0, 0.5]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"alpha":1.5,"delta":0.5,"epsilon":-1.0,"beta":0.5}"#);
    }
}
