//! Exposure curves and the censored loss-degree distributions they induce.
//!
//! An exposure curve `G` on `[0, 1]` determines the distribution of a
//! normalized, right-censored loss `Z`: `F = 1 - G'/G'(0)` on `[0, 1)`, an
//! atom `G'(1)/G'(0)` at `z = 1` and mean `1/G'(0)`. This crate provides the
//! MBBEFD family, curves built from an inner function through a log or
//! exponential link, censored maximum-likelihood fitting and model comparison.
//!
//! The numerical core is generic over the scalar type (`f32` or `f64`);
//! fitting and data handling work in `f64`.
//!
//! ```
//! use bernegger::prelude::*;
//!
//! let d = mbbefd_distribution(MbbefdParams::new(0.1f64, 3.0).unwrap()).unwrap();
//! assert!((d.point_mass() - 1.0 / 3.0).abs() < 1e-15);
//! ```

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod claims;
pub mod curve;
pub mod distribution;
pub mod error;
pub mod family;
pub mod fitting;
pub mod linked;
pub mod mbbefd;
pub mod quadrature;
pub mod scalar;
pub mod shape;
pub mod simplex;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub mod prelude {
    pub use crate::claims::{load_claims, transform_claim, ClaimRecord, NormalizedSample, Schema};
    pub use crate::curve::{blend_with_identity, mix_curves, validate_exposure_curve, ExposureCurve};
    pub use crate::distribution::{
        conditional_distribution, curve_to_distribution, one_inflate, quantile, sample, CensoredDistribution,
    };
    pub use crate::error::{Error, Result};
    pub use crate::family::{Family, FamilyDistribution, ParamVector};
    pub use crate::fitting::{
        aic, compare, empirical_stats, fit, loglik_extended, loglik_standard, FitMode, FitOptions, FitResult,
        Observations,
    };
    pub use crate::linked::{
        censored_exponential, exp_linked_curve, exp_linked_distribution, log_linked_curve, log_linked_distribution,
        InnerFunction,
    };
    pub use crate::mbbefd::{classify_shape, mbbefd_curve, mbbefd_distribution, swiss_re_params, MbbefdParams};
    pub use crate::scalar::Scalar;
    pub use crate::shape::{Shape, ShapeReport};
}

pub type MbbefdParams64 = mbbefd::MbbefdParams<f64>;
pub type MbbefdParams32 = mbbefd::MbbefdParams<f32>;
pub type Mbbefd64 = mbbefd::MbbefdDistribution<f64>;
pub type Mbbefd32 = mbbefd::MbbefdDistribution<f32>;
pub type PowerLog64 = linked::Linked<f64, linked::PowerLogParams<f64>>;
pub type PowerLog32 = linked::Linked<f32, linked::PowerLogParams<f32>>;
pub type SineLog64 = linked::Linked<f64, linked::SineLogParams<f64>>;
pub type SineLog32 = linked::Linked<f32, linked::SineLogParams<f32>>;
pub type QuadExp64 = linked::Linked<f64, linked::QuadExpParams<f64>>;
pub type QuadExp32 = linked::Linked<f32, linked::QuadExpParams<f32>>;
pub type PowerExp64 = linked::Linked<f64, linked::PowerExpParams<f64>>;
pub type PowerExp32 = linked::Linked<f32, linked::PowerExpParams<f32>>;
pub type CensoredExponential64 = linked::Linked<f64, linked::ExponentialParams<f64>>;
pub type CensoredExponential32 = linked::Linked<f32, linked::ExponentialParams<f32>>;
pub type FamilyDistribution64 = family::FamilyDistribution<f64>;
pub type FamilyDistribution32 = family::FamilyDistribution<f32>;
