//! Fortification of sub-additive set measures.
//!
//! * [`weak_fortify`] removes a maximal "cheap" set `Λ_max` (one whose
//!   measure falls below `ρ·(|Λ_max|/|Σ|)·μ(Σ)`), grown one merge at a time.
//! * [`inverse_fortify`] descends to a minimal set with
//!   `|Λ₀|/|Σ| ≤ (μ(Λ₀)/μ(Σ))^c`.
//! * [`fortify`] composes them with `c = log₂|Σ|` and `ρ = 1/(2·log₂|Σ|)`;
//!   the result is `1/(4·log₂|Σ|)`-fortified and keeps a quarter of `μ(Σ)`.
//!
//! Every scan visits subsets by size and then lexicographically, so the
//! chosen subsets and the traces are deterministic. All guarantees are
//! re-checked by exhaustive scans rather than trusted.

use rayon::prelude::*;
use serde::Serialize;

use crate::bits::{self, ones};
use crate::cover::cover_measure;
use crate::error::{cap, Error, Result};
use crate::fooling::{min_fooling_delta, FoolingCertificate};
use crate::measure::{slack, MeasureOracle};
use crate::problem::{CellSet, Problem};

pub const DEFAULT_SCAN_CAP: usize = 16;
pub const HARD_SCAN_CAP: usize = 24;

fn check_sigma(m: &dyn MeasureOracle, sigma: u64, max: usize) -> Result<usize> {
    if sigma == 0 {
        return Err(Error::EmptyCellSet);
    }
    if sigma & !m.ground() != 0 {
        return Err(Error::NotASubset);
    }
    let n = sigma.count_ones() as usize;
    cap("subset scan size", n, max.min(HARD_SCAN_CAP))?;
    Ok(n)
}

fn first_subset(base: u64, pred: impl Fn(u64) -> bool + Sync) -> Option<u64> {
    bits::subsets_by_size(base).into_par_iter().find_first(|&t| pred(t))
}

pub fn to_list(set: u64) -> Vec<usize> {
    ones(set).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakFortification {
    #[serde(serialize_with = "ser_set")]
    pub lambda1: u64,
    #[serde(serialize_with = "ser_set")]
    pub lambda_max: u64,
    /// `Λ_max` after each merge.
    #[serde(skip)]
    pub trace: Vec<u64>,
}

/// Weak fortification of `sigma` at level `rho`.
pub fn weak_fortify(m: &dyn MeasureOracle, sigma: u64, rho: f64, max: usize) -> Result<WeakFortification> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidRho(rho));
    }
    let n = check_sigma(m, sigma, max)? as f64;
    let mu_sigma = m.eval(sigma);
    let cheap = |u: u64| {
        let rhs = rho * u.count_ones() as f64 / n * mu_sigma;
        m.eval(u) < rhs - slack(rhs)
    };
    let mut lambda_max = 0u64;
    let mut trace = Vec::new();
    while let Some(t) = first_subset(sigma & !lambda_max, |t| cheap(lambda_max | t)) {
        lambda_max |= t;
        trace.push(lambda_max);
    }
    Ok(WeakFortification { lambda1: sigma & !lambda_max, lambda_max, trace })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InverseFortification {
    #[serde(serialize_with = "ser_set")]
    pub lambda0: u64,
    /// `Λ₀` after each descent step.
    #[serde(skip)]
    pub trace: Vec<u64>,
}

fn dense_cheap(m: &dyn MeasureOracle, t: u64, n: f64, mu_sigma: f64, c: f64) -> bool {
    let lhs = t.count_ones() as f64 / n;
    let rhs = (m.eval(t) / mu_sigma).powf(c);
    lhs <= rhs + slack(rhs)
}

/// Inverse fortification of `sigma` with exponent `c ≥ 1`. The empty set
/// is never a candidate.
pub fn inverse_fortify(m: &dyn MeasureOracle, sigma: u64, c: f64, max: usize) -> Result<InverseFortification> {
    if !c.is_finite() || c < 1.0 {
        return Err(Error::InvalidExponent(c));
    }
    let n = check_sigma(m, sigma, max)? as f64;
    let mu_sigma = m.eval(sigma);
    if mu_sigma <= 0.0 {
        return Err(Error::ZeroMeasure);
    }
    let mut lambda0 = sigma;
    let mut trace = Vec::new();
    while let Some(t) = first_subset(lambda0, |t| t != lambda0 && dense_cheap(m, t, n, mu_sigma, c)) {
        lambda0 = t;
        trace.push(lambda0);
    }
    Ok(InverseFortification { lambda0, trace })
}

/// First nonempty `T ⊆ lambda` with `μ(T) < ρ·(|T|/|Λ|)·μ(Λ)`, or `None`
/// when `lambda` is `rho`-fortified.
pub fn certify_fortified(m: &dyn MeasureOracle, lambda: u64, rho: f64, max: usize) -> Result<Option<u64>> {
    let n = check_sigma(m, lambda, max)? as f64;
    let mu = m.eval(lambda);
    Ok(first_subset(lambda, |t| {
        let rhs = rho * t.count_ones() as f64 / n * mu;
        m.eval(t) < rhs - slack(rhs)
    }))
}

pub fn is_fortified(m: &dyn MeasureOracle, lambda: u64, rho: f64, max: usize) -> Result<bool> {
    certify_fortified(m, lambda, rho, max).map(|v| v.is_none())
}

/// Outcome of re-checking a weak or inverse fortification.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageCheck {
    /// First subset breaking the per-subset inequality.
    #[serde(serialize_with = "ser_opt_set")]
    pub violation: Option<u64>,
    /// Whether the mass inequality holds.
    pub mass: bool,
}

impl StageCheck {
    pub fn holds(&self) -> bool {
        self.violation.is_none() && self.mass
    }
}

/// Both weak-fortification guarantees: every `T ⊆ Λ₁` has
/// `μ(T) ≥ ρ·(|T|/|Σ|)·μ(Σ)`, and `μ(Λ₁) ≥ (1−ρ)·μ(Σ)`.
pub fn certify_weak(m: &dyn MeasureOracle, sigma: u64, lambda1: u64, rho: f64, max: usize) -> Result<StageCheck> {
    let n = check_sigma(m, sigma, max)? as f64;
    if lambda1 & !sigma != 0 {
        return Err(Error::NotASubset);
    }
    let mu_sigma = m.eval(sigma);
    let violation = first_subset(lambda1, |t| {
        let rhs = rho * t.count_ones() as f64 / n * mu_sigma;
        m.eval(t) < rhs - slack(rhs)
    });
    let floor = (1.0 - rho) * mu_sigma;
    Ok(StageCheck { violation, mass: m.eval(lambda1) >= floor - slack(floor) })
}

/// Both inverse-fortification guarantees: every `T ⊆ Λ₀` has
/// `|T|/|Λ₀| ≥ (μ(T)/μ(Λ₀))^c`, and `μ(Λ₀) ≥ (1/|Σ|)^{1/c}·μ(Σ)`.
pub fn certify_inverse(m: &dyn MeasureOracle, sigma: u64, lambda0: u64, c: f64, max: usize) -> Result<StageCheck> {
    let n = check_sigma(m, sigma, max)? as f64;
    if lambda0 == 0 || lambda0 & !sigma != 0 {
        return Err(Error::NotASubset);
    }
    let k = lambda0.count_ones() as f64;
    let mu0 = m.eval(lambda0);
    if mu0 <= 0.0 {
        return Err(Error::ZeroMeasure);
    }
    let violation = first_subset(lambda0, |t| {
        let rhs = (m.eval(t) / mu0).powf(c);
        (t.count_ones() as f64 / k) < rhs - slack(rhs)
    });
    let floor = (1.0 / n).powf(1.0 / c) * m.eval(sigma);
    Ok(StageCheck { violation, mass: mu0 >= floor - slack(floor) })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FortificationResult {
    #[serde(serialize_with = "ser_set")]
    pub sigma: u64,
    #[serde(serialize_with = "ser_set")]
    pub lambda0: u64,
    #[serde(serialize_with = "ser_set")]
    pub lambda: u64,
    pub c: f64,
    /// Level used for the weak stage, `1/(2·log₂|Σ|)`.
    pub weak_rho: f64,
    /// Certified fortification level, `1/(4·log₂|Σ|)`.
    pub rho: f64,
    pub measure_sigma: f64,
    pub measure_lambda: f64,
    pub inverse_steps: usize,
    pub weak_merges: usize,
    #[serde(skip)]
    pub inverse_trace: Vec<u64>,
    #[serde(skip)]
    pub weak_trace: Vec<u64>,
    /// First subset of `Λ` breaking `rho`-fortification.
    #[serde(serialize_with = "ser_opt_set")]
    pub violation: Option<u64>,
    pub certified: bool,
}

/// Inverse then weak fortification, with an exhaustive certificate that
/// `Λ` is `1/(4·log₂|Σ|)`-fortified and `μ(Λ) ≥ μ(Σ)/4`.
pub fn fortify(m: &dyn MeasureOracle, sigma: u64, max: usize) -> Result<FortificationResult> {
    let n = check_sigma(m, sigma, max)?;
    let measure_sigma = m.eval(sigma);
    if measure_sigma <= 0.0 {
        return Err(Error::ZeroMeasure);
    }
    if n == 1 {
        return Ok(FortificationResult {
            sigma,
            lambda0: sigma,
            lambda: sigma,
            c: 1.0,
            weak_rho: 0.5,
            rho: 1.0,
            measure_sigma,
            measure_lambda: measure_sigma,
            inverse_steps: 0,
            weak_merges: 0,
            inverse_trace: Vec::new(),
            weak_trace: Vec::new(),
            violation: None,
            certified: true,
        });
    }
    let log_n = (n as f64).log2();
    let inv = inverse_fortify(m, sigma, log_n, max)?;
    let weak_rho = 1.0 / (2.0 * log_n);
    let weak = weak_fortify(m, inv.lambda0, weak_rho, max)?;
    let rho = 1.0 / (4.0 * log_n);
    let lambda = weak.lambda1;
    let measure_lambda = m.eval(lambda);
    let violation = if lambda == 0 { Some(0) } else { certify_fortified(m, lambda, rho, max)? };
    let quarter = measure_sigma / 4.0;
    let certified = violation.is_none() && measure_lambda >= quarter - slack(quarter);
    Ok(FortificationResult {
        sigma,
        lambda0: inv.lambda0,
        lambda,
        c: log_n,
        weak_rho,
        rho,
        measure_sigma,
        measure_lambda,
        inverse_steps: inv.trace.len(),
        weak_merges: weak.trace.len(),
        inverse_trace: inv.trace,
        weak_trace: weak.trace,
        violation,
        certified,
    })
}

/// Fortification of the cover number over the whole domain, with the
/// fooling certificate of the resulting set.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverFortification {
    pub result: FortificationResult,
    pub lambda: CellSet,
    pub fooling: FoolingCertificate,
    pub cov: usize,
    /// `16·log₂(|X||Y|)/Cov(S)`.
    pub delta_nominal: f64,
    /// `δ_min ≤ max(δ_nominal, 1)`.
    pub nominal_holds: bool,
    /// `Cov(T) ≥ (|T|/|Λ|)·Cov(S)/(16·log₂(|X||Y|))` for every `T ⊆ Λ`.
    pub density_bound_holds: bool,
}

pub fn fortify_cover(p: &Problem, max: usize) -> Result<CoverFortification> {
    p.require_total()?;
    cap("cells for fortification", p.ncells(), max.min(HARD_SCAN_CAP))?;
    let m = cover_measure(p)?;
    let result = fortify(&m, m.ground(), max)?;
    let lambda = m.to_cells(p.ncells(), result.lambda);
    let fooling = min_fooling_delta(p, &lambda)?;
    let cov = m.cover(m.ground()) as usize;
    let log_cells = (p.ncells() as f64).log2();
    let delta_nominal = 16.0 * log_cells / cov as f64;
    let delta = *fooling.delta().numer() as f64 / *fooling.delta().denom() as f64;
    let nominal_holds = delta <= delta_nominal.max(1.0);
    let k = result.lambda.count_ones() as f64;
    let density_bound_holds = log_cells == 0.0
        || first_subset(result.lambda, |t| {
            let rhs = t.count_ones() as f64 / k * cov as f64 / (16.0 * log_cells);
            m.eval(t) < rhs - slack(rhs)
        })
        .is_none();
    Ok(CoverFortification { result, lambda, fooling, cov, delta_nominal, nominal_holds, density_bound_holds })
}

fn ser_set<S: serde::Serializer>(set: &u64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(ones(*set))
}

fn ser_opt_set<S: serde::Serializer>(set: &Option<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match set {
        Some(v) => s.collect_seq(ones(*v)),
        None => s.serialize_none(),
    }
}
