//! Shape of the continuous part of a density on `[0, 1)`.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    MonotoneDecreasing,
    Unimodal,
    MonotoneIncreasing,
    /// An interior minimum or several interior extrema.
    Irregular,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShapeReport {
    pub shape: Shape,
    /// Location of the maximum; present iff `shape == Unimodal`.
    pub mode: Option<f64>,
}

impl ShapeReport {
    pub fn unimodal(mode: f64) -> Self {
        Self { shape: Shape::Unimodal, mode: Some(mode) }
    }

    pub fn monotone(increasing: bool) -> Self {
        let shape = if increasing { Shape::MonotoneIncreasing } else { Shape::MonotoneDecreasing };
        Self { shape, mode: None }
    }

    pub fn is_unimodal(&self) -> bool {
        self.shape == Shape::Unimodal
    }
}

/// Classifies a density from its derivative by counting sign changes of
/// `df` on `points` uniform points of `[0, 1)`.
///
/// No change means monotone, a single `+ -> -` change means unimodal (the
/// mode is then refined by bisection on `df`), anything else is irregular.
pub fn scan_shape(df: impl Fn(f64) -> f64, points: usize) -> ShapeReport {
    let points = points.max(2);
    let step = 1.0 / points as f64;
    let mut signs: Vec<(f64, f64)> = Vec::new();
    let mut last_sign = 0.0;
    for i in 0..points {
        let z = i as f64 * step;
        let d = df(z);
        if !d.is_finite() || d == 0.0 {
            continue;
        }
        let s = d.signum();
        if s != last_sign {
            signs.push((z, s));
            last_sign = s;
        }
    }
    match signs.as_slice() {
        [] => ShapeReport::monotone(false),
        [(_, s)] => ShapeReport::monotone(*s > 0.0),
        [(_, s0), (z1, s1)] if *s0 > 0.0 && *s1 < 0.0 => {
            let mut lo = z1 - step;
            let mut hi = *z1;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if df(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-15 {
                    break;
                }
            }
            ShapeReport::unimodal(0.5 * (lo + hi))
        }
        _ => ShapeReport { shape: Shape::Irregular, mode: None },
    }
}

/// Arg-max of `f` over `points` uniform points of `[0, 1)`.
pub fn grid_argmax(f: impl Fn(f64) -> f64, points: usize) -> f64 {
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 0..points {
        let z = i as f64 / points as f64;
        let v = f(z);
        if v > best.0 {
            best = (v, z);
        }
    }
    best.1
}
