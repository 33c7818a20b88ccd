//! Censored maximum likelihood, empirical summaries, AIC and family comparison.
//!
//! Standard problem: `l_Z(theta) = sum_{z<1} ln f(z) + n_1 ln p`.
//! Extended problem: the atom `q` is free,
//! `l_Z(theta, q) = sum_{z<1} ln f0(z) + n_0 ln(1 - q) + n_1 ln q` with
//! `f0 = f/(1 - p)`. The `q` terms separate, so `q` is set to the censored
//! fraction and only `theta` is optimized.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::distribution::CensoredDistribution;
use crate::error::{Error, Result};
use crate::family::{Family, FamilyDistribution, ParamVector};
use crate::simplex::{nelder_mead, SimplexOptions, SimplexResult};

/// `z >= 1 - CENSOR_TOL` counts as censored.
pub const CENSOR_TOL: f64 = 1e-12;
/// Partition size for the likelihood sums.
const CHUNK: usize = 4096;

/// A sample split into uncensored values and a censored count.
#[derive(Debug, Clone, PartialEq)]
pub struct Observations {
    uncensored: Vec<f64>,
    n_censored: usize,
}

impl Observations {
    /// Accepts values in `[0, 1]`; values within `1e-12` of either end are
    /// allowed, and those at the top count as censored.
    pub fn new(sample: &[f64]) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::Data("empty sample".into()));
        }
        let mut uncensored = Vec::with_capacity(sample.len());
        let mut n_censored = 0;
        for (i, &z) in sample.iter().enumerate() {
            if !z.is_finite() || !(-CENSOR_TOL..=1.0 + CENSOR_TOL).contains(&z) {
                return Err(Error::Data(format!("observation {i} = {z} is outside [0, 1]")));
            }
            if z >= 1.0 - CENSOR_TOL {
                n_censored += 1;
            } else {
                uncensored.push(z.max(0.0));
            }
        }
        Ok(Self { uncensored, n_censored })
    }

    pub fn n(&self) -> usize {
        self.uncensored.len() + self.n_censored
    }

    pub fn n_censored(&self) -> usize {
        self.n_censored
    }

    pub fn n_uncensored(&self) -> usize {
        self.uncensored.len()
    }

    pub fn uncensored(&self) -> &[f64] {
        &self.uncensored
    }

    pub fn censored_fraction(&self) -> f64 {
        self.n_censored as f64 / self.n() as f64
    }

    /// Every `k`-th uncensored value and `1/k` of the censored count.
    fn thinned(&self, k: usize) -> Observations {
        Observations {
            uncensored: self.uncensored.iter().step_by(k).copied().collect(),
            n_censored: (self.n_censored as f64 / k as f64).round() as usize,
        }
    }
}

/// `x ln y` with `0 ln 0 = 0`.
fn xlny(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if y > 0.0 {
        x * y.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// `sum ln f(z)` over the uncensored values, in fixed chunks reduced in
/// order, so the result does not depend on the thread count. Any `f(z) <= 0`
/// gives `-inf`.
fn sum_log_pdf<D: CensoredDistribution<f64>>(d: &D, xs: &[f64]) -> f64 {
    let partial: Vec<f64> = xs
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut s = 0.0;
            for &z in chunk {
                let v = d.pdf(z);
                if !(v > 0.0 && v.is_finite()) {
                    return f64::NEG_INFINITY;
                }
                s += v.ln();
            }
            s
        })
        .collect();
    pairwise_sum(&partial)
}

fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

fn family_sum_log_pdf(d: &FamilyDistribution<f64>, xs: &[f64]) -> f64 {
    match d {
        FamilyDistribution::Mbbefd(d) => sum_log_pdf(d, xs),
        FamilyDistribution::PowerLog(d) => sum_log_pdf(d, xs),
        FamilyDistribution::SineLog(d) => sum_log_pdf(d, xs),
        FamilyDistribution::QuadExp(d) => sum_log_pdf(d, xs),
        FamilyDistribution::PowerExp(d) => sum_log_pdf(d, xs),
        FamilyDistribution::Exponential(d) => sum_log_pdf(d, xs),
    }
}

/// `l_Z` for an arbitrary censored distribution.
pub fn loglik_standard_dist<D: CensoredDistribution<f64>>(d: &D, obs: &Observations) -> f64 {
    sum_log_pdf(d, &obs.uncensored) + xlny(obs.n_censored as f64, d.point_mass())
}

/// `sum_{z<1} ln f0(z)` for an arbitrary censored distribution.
pub fn loglik_conditional_dist<D: CensoredDistribution<f64>>(d: &D, obs: &Observations) -> f64 {
    sum_log_pdf(d, &obs.uncensored) - xlny(obs.n_uncensored() as f64, 1.0 - d.point_mass())
}

/// `l_Z(theta)`; `-inf` if the density or the atom vanishes at some observation.
pub fn loglik_standard(family: Family, theta: &[f64], obs: &Observations) -> Result<f64> {
    let d = family.distribution(theta)?;
    Ok(family_sum_log_pdf(&d, &obs.uncensored) + xlny(obs.n_censored as f64, d.point_mass()))
}

/// `sum_{z<1} ln f0(z)`.
pub fn loglik_conditional(family: Family, theta: &[f64], obs: &Observations) -> Result<f64> {
    let d = family.distribution(theta)?;
    Ok(conditional(&d, obs))
}

fn conditional(d: &FamilyDistribution<f64>, obs: &Observations) -> f64 {
    family_sum_log_pdf(d, &obs.uncensored) - xlny(obs.n_uncensored() as f64, 1.0 - d.point_mass())
}

/// `l_Z(theta, q)` for `q` in `(0, 1)`.
pub fn loglik_extended(family: Family, theta: &[f64], q: f64, obs: &Observations) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("q = {q} must lie in (0, 1)")));
    }
    Ok(loglik_conditional(family, theta, obs)? + extended_q_terms(q, obs))
}

fn extended_q_terms(q: f64, obs: &Observations) -> f64 {
    xlny(obs.n_uncensored() as f64, 1.0 - q) + xlny(obs.n_censored as f64, q)
}

/// `2k - 2 l`.
pub fn aic(loglik_total: f64, k: usize) -> f64 {
    2.0 * k as f64 - 2.0 * loglik_total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMode {
    Standard,
    Extended,
}

impl FitMode {
    pub fn name(self) -> &'static str {
        match self {
            FitMode::Standard => "standard",
            FitMode::Extended => "extended",
        }
    }
}

impl fmt::Display for FitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(FitMode::Standard),
            "extended" => Ok(FitMode::Extended),
            _ => Err(Error::Domain(format!("unknown mode `{s}` (expected standard or extended)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub simplex: SimplexOptions,
    /// Restart once from the optimum with a smaller simplex.
    pub restart: bool,
    pub restart_step: f64,
    /// Starting parameter vectors in natural coordinates; the family's five
    /// default points when `None`.
    pub starts: Option<Vec<Vec<f64>>>,
    /// Evaluation budget for the short run from each start; the best one is
    /// then run to convergence. `0` runs every start to convergence.
    pub screen_evals: usize,
    /// The short runs use a strided subsample of at most this many observations.
    pub screen_size: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { simplex: SimplexOptions::default(), restart: true, restart_step: 0.1, starts: None, screen_evals: 200, screen_size: 5_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub family: Family,
    pub mode: FitMode,
    pub params: ParamVector,
    /// Fitted atom in extended mode.
    pub q: Option<f64>,
    pub loglik_total: f64,
    pub loglik_conditional: f64,
    pub aic: f64,
    pub point_mass: f64,
    pub mean: f64,
    pub n: usize,
    pub converged: bool,
    pub iterations: usize,
    /// Largest absolute unconstrained coordinate at the optimum; large values
    /// mean the estimate sits close to the edge of the fitting domain.
    pub boundary_proximity: f64,
    /// Extended mode with no censored observation: `q = 0` is on the boundary.
    pub q_on_boundary: bool,
}

impl FitResult {
    /// Number of fitted parameters, counting `q` in extended mode.
    pub fn k(&self) -> usize {
        self.family.dim() + usize::from(self.mode == FitMode::Extended)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "family": self.family.name(),
            "mode": self.mode.name(),
            "params": self.params.to_json(),
            "q": self.q,
            "point_mass": self.point_mass,
            "mean": self.mean,
            "loglik_total": self.loglik_total,
            "loglik_conditional": self.loglik_conditional,
            "aic": self.aic,
            "n": self.n,
            "converged": self.converged,
            "iterations": self.iterations,
        })
    }
}

/// Fits one family by maximum likelihood.
///
/// The optimizer works on `-l / n` in the family's unconstrained
/// coordinates: a short Nelder-Mead run from each start, a full run from the
/// best of them, then one restart from the optimum.
pub fn fit(family: Family, obs: &Observations, mode: FitMode, opts: &FitOptions) -> Result<FitResult> {
    if obs.n_uncensored() < family.dim() {
        return Err(Error::FitFailure(format!(
            "{} has {} parameters but the sample has only {} uncensored observations",
            family.name(),
            family.dim(),
            obs.n_uncensored()
        )));
    }
    let starts: Vec<Vec<f64>> = match &opts.starts {
        Some(s) => s.iter().map(|t| family.to_unconstrained(t)).collect::<Result<_>>()?,
        None => family.initial_points(),
    };
    if starts.is_empty() {
        return Err(Error::Domain("no starting points".into()));
    }
    let objective_on = |data: &Observations, u: &[f64]| -> f64 {
        let theta = family.from_unconstrained(u);
        let Ok(d) = family.distribution(&theta) else {
            return f64::INFINITY;
        };
        let l = match mode {
            FitMode::Standard => family_sum_log_pdf(&d, &data.uncensored) + xlny(data.n_censored as f64, d.point_mass()),
            FitMode::Extended => conditional(&d, data),
        };
        if l.is_finite() {
            -l / data.n() as f64
        } else {
            f64::INFINITY
        }
    };
    let objective = |u: &[f64]| objective_on(obs, u);
    let screen_data = if opts.screen_evals > 0 && obs.n() > opts.screen_size.max(1) {
        Some(obs.thinned(obs.n().div_ceil(opts.screen_size.max(1))))
    } else {
        None
    };
    let screen_objective = |u: &[f64]| objective_on(screen_data.as_ref().unwrap_or(obs), u);

    let mut iterations = 0;
    let mut trace = Vec::new();
    let mut best: Option<SimplexResult> = None;
    for s in &starts {
        let r = if opts.screen_evals > 0 {
            nelder_mead(screen_objective, s, SimplexOptions { max_evals: opts.screen_evals, ..opts.simplex })
        } else {
            nelder_mead(objective, s, opts.simplex)
        };
        iterations += r.iterations;
        trace.push(format!("start {:?} -> {}", family.from_unconstrained(s), -r.f));
        if r.f.is_finite() && best.as_ref().is_none_or(|b| r.f < b.f) {
            best = Some(r);
        }
    }
    let Some(mut best) = best else {
        return Err(Error::FitFailure(format!(
            "{}: likelihood is -inf from every start ({})",
            family.name(),
            trace.join("; ")
        )));
    };
    let mut converged = best.converged;
    if opts.screen_evals > 0 {
        best = nelder_mead(objective, &best.x, opts.simplex);
        iterations += best.iterations;
        converged = best.converged;
    }
    if opts.restart {
        let r = nelder_mead(objective, &best.x, SimplexOptions { step: opts.restart_step, ..opts.simplex });
        iterations += r.iterations;
        converged = converged && r.converged;
        if r.f <= best.f {
            best = r;
        }
    }
    // never end below a starting point
    for s in &starts {
        let f = objective(s);
        if f < best.f {
            best = SimplexResult { x: s.clone(), f, evals: 1, iterations: 0, converged: false };
            converged = false;
        }
    }

    let theta = family.from_unconstrained(&best.x);
    let d = family.distribution(&theta)?;
    let boundary_proximity = best.x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let loglik_conditional = conditional(&d, obs);
    let p = d.point_mass();
    let (q, loglik_total, point_mass, mean) = match mode {
        FitMode::Standard => {
            (None, family_sum_log_pdf(&d, &obs.uncensored) + xlny(obs.n_censored as f64, p), p, d.mean())
        }
        FitMode::Extended => {
            let q = obs.censored_fraction();
            let mean0 = (d.mean() - p) / (1.0 - p);
            (Some(q), loglik_conditional + extended_q_terms(q, obs), q, (1.0 - q) * mean0 + q)
        }
    };
    if !loglik_total.is_finite() {
        return Err(Error::FitFailure(format!(
            "{}: no finite likelihood at the optimum {theta:?} ({})",
            family.name(),
            trace.join("; ")
        )));
    }
    let k = family.dim() + usize::from(mode == FitMode::Extended);
    Ok(FitResult {
        family,
        mode,
        params: ParamVector { family, values: theta },
        q,
        loglik_total,
        loglik_conditional,
        aic: aic(loglik_total, k),
        point_mass,
        mean,
        n: obs.n(),
        converged,
        iterations,
        boundary_proximity,
        q_on_boundary: mode == FitMode::Extended && obs.n_censored == 0,
    })
}

/// Points at which the kernel density estimate is reported.
pub const KDE_GRID: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    /// `bins + 1` edges from 0 to 1.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalStats {
    pub n: usize,
    pub n_censored: usize,
    pub point_mass_at_1: f64,
    pub mean: f64,
    /// Histogram of the uncensored observations over `[0, 1)`.
    pub histogram: Histogram,
    /// Kernel bandwidth; `None` when there are too few distinct uncensored values.
    pub bandwidth: Option<f64>,
    /// `(z, density)` of the Gaussian kernel estimate on `z = i/100`, renormalized to unit mass on `[0, 1)`.
    pub kde: Vec<(f64, f64)>,
}

/// Counts, mean, histogram and kernel density estimate of a sample in `(0, 1]`.
pub fn empirical_stats(sample: &[f64], bins: usize) -> Result<EmpiricalStats> {
    if sample.is_empty() {
        return Err(Error::Data("empty sample".into()));
    }
    if bins == 0 {
        return Err(Error::Domain("bins must be at least 1".into()));
    }
    let mut uncensored = Vec::with_capacity(sample.len());
    let mut n_censored = 0;
    for (i, &z) in sample.iter().enumerate() {
        if !z.is_finite() || z <= -CENSOR_TOL || z > 1.0 + CENSOR_TOL {
            return Err(Error::Data(format!("observation {i} = {z} is outside (0, 1]")));
        }
        if z >= 1.0 - CENSOR_TOL {
            n_censored += 1;
        } else {
            uncensored.push(z.max(0.0));
        }
    }
    let n = sample.len();
    let mean = sample.iter().sum::<f64>() / n as f64;

    let edges: Vec<f64> = (0..=bins).map(|i| i as f64 / bins as f64).collect();
    let mut counts = vec![0usize; bins];
    for &z in &uncensored {
        counts[((z * bins as f64) as usize).min(bins - 1)] += 1;
    }

    let bandwidth = silverman_bandwidth(&uncensored);
    let kde = match bandwidth {
        Some(h) => kde_on_unit_interval(&uncensored, h),
        None => Vec::new(),
    };
    Ok(EmpiricalStats {
        n,
        n_censored,
        point_mass_at_1: n_censored as f64 / n as f64,
        mean,
        histogram: Histogram { edges, counts },
        bandwidth,
        kde,
    })
}

/// `0.9 min(sd, IQR/1.34) m^(-1/5)`, falling back to `sd` when the IQR is zero.
fn silverman_bandwidth(xs: &[f64]) -> Option<f64> {
    let m = xs.len();
    if m < 2 {
        return None;
    }
    let mean = xs.iter().sum::<f64>() / m as f64;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1) as f64).sqrt();
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    (spread > 0.0).then(|| 0.9 * spread * (m as f64).powf(-0.2))
}

/// Linear interpolation between order statistics.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

fn kde_on_unit_interval(xs: &[f64], h: f64) -> Vec<(f64, f64)> {
    let norm_cdf = |t: f64| 0.5 * libm::erfc(-t / std::f64::consts::SQRT_2);
    let mass: f64 = xs.iter().map(|&x| norm_cdf((1.0 - x) / h) - norm_cdf(-x / h)).sum::<f64>() / xs.len() as f64;
    let c = 1.0 / (xs.len() as f64 * h * (2.0 * std::f64::consts::PI).sqrt() * mass);
    (0..KDE_GRID)
        .map(|i| {
            let z = i as f64 / KDE_GRID as f64;
            let s: f64 = xs.iter().map(|&x| (-0.5 * ((z - x) / h).powi(2)).exp()).sum();
            (z, c * s)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    /// Family name, or `empirical` for the data row.
    pub family: String,
    pub mode: Option<FitMode>,
    pub point_mass: Option<f64>,
    pub mean: Option<f64>,
    pub loglik_conditional: Option<f64>,
    pub loglik_total: Option<f64>,
    pub aic: Option<f64>,
    /// `ok`, `not-converged`, or `failed: <reason>`.
    pub status: String,
    #[serde(skip)]
    pub k: usize,
}

/// The empirical row followed by one row per fit, fits sorted by AIC
/// (ties: fewer parameters, then family name); failed fits last.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

pub const TABLE_COLUMNS: [&str; 8] =
    ["family", "mode", "point_mass", "mean", "loglik_conditional", "loglik_total", "aic", "status"];

impl ComparisonTable {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        wr.write_record(TABLE_COLUMNS).map_err(io)?;
        let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            wr.write_record([
                r.family.clone(),
                r.mode.map(|m| m.name().to_string()).unwrap_or_default(),
                cell(r.point_mass),
                cell(r.mean),
                cell(r.loglik_conditional),
                cell(r.loglik_total),
                cell(r.aic),
                r.status.clone(),
            ])
            .map_err(io)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    json!({
                        "family": r.family,
                        "mode": r.mode.map(FitMode::name),
                        "point_mass": r.point_mass,
                        "mean": r.mean,
                        "loglik_conditional": r.loglik_conditional,
                        "loglik_total": r.loglik_total,
                        "aic": r.aic,
                        "status": r.status,
                    })
                })
                .collect(),
        )
    }
}

/// Fits every `(family, mode)` pair and tabulates the results next to the
/// empirical point mass and mean. A failing fit becomes a row with its
/// reason; it never aborts the table.
pub fn compare(families: &[Family], modes: &[FitMode], sample: &[f64], opts: &FitOptions) -> Result<ComparisonTable> {
    if families.is_empty() || modes.is_empty() {
        return Err(Error::Domain("compare needs at least one family and one mode".into()));
    }
    let stats = empirical_stats(sample, 1)?;
    let obs = Observations::new(sample)?;
    let jobs: Vec<(Family, FitMode)> =
        families.iter().flat_map(|&f| modes.iter().map(move |&m| (f, m))).collect();
    let results: Vec<(Family, FitMode, Result<FitResult>)> =
        jobs.par_iter().map(|&(f, m)| (f, m, fit(f, &obs, m, opts))).collect();

    let mut fitted = Vec::new();
    let mut failed = Vec::new();
    for (family, mode, r) in results {
        let k = family.dim() + usize::from(mode == FitMode::Extended);
        match r {
            Ok(fr) => fitted.push(ComparisonRow {
                family: family.name().into(),
                mode: Some(mode),
                point_mass: Some(fr.point_mass),
                mean: Some(fr.mean),
                loglik_conditional: Some(fr.loglik_conditional),
                loglik_total: Some(fr.loglik_total),
                aic: Some(fr.aic),
                status: if fr.converged { "ok".into() } else { "not-converged".into() },
                k,
            }),
            Err(e) => failed.push(ComparisonRow {
                family: family.name().into(),
                mode: Some(mode),
                point_mass: None,
                mean: None,
                loglik_conditional: None,
                loglik_total: None,
                aic: None,
                status: format!("failed: {e}"),
                k,
            }),
        }
    }
    fitted.sort_by(|a, b| {
        a.aic
            .unwrap()
            .total_cmp(&b.aic.unwrap())
            .then(a.k.cmp(&b.k))
            .then(a.family.cmp(&b.family))
            .then(a.mode.map(FitMode::name).cmp(&b.mode.map(FitMode::name)))
    });
    let mut rows = vec![ComparisonRow {
        family: "empirical".into(),
        mode: None,
        point_mass: Some(stats.point_mass_at_1),
        mean: Some(stats.mean),
        loglik_conditional: None,
        loglik_total: None,
        aic: None,
        status: "ok".into(),
        k: 0,
    }];
    rows.extend(fitted);
    rows.extend(failed);
    Ok(ComparisonTable { rows })
}
