//! Set functions over a finite ground set `{0, .., n-1}` and their
//! semipositivity / subadditivity audit.
//!
//! Subsets are `u64` masks. Values are `f64`; integer-valued measures
//! (cover number, cardinality) are exact.

use std::collections::HashMap;
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bits::{self, ones};
use crate::error::{Error, Result};

/// Relative slack for comparisons between measure expressions.
pub const TOLERANCE: f64 = 1e-9;

pub(crate) fn slack(scale: f64) -> f64 {
    TOLERANCE * scale.abs().max(1.0)
}

/// A set function `μ : 2^Σ → ℝ≥0` with `Σ = {0, .., ground_size-1}`.
pub trait MeasureOracle: Send + Sync {
    fn name(&self) -> &str;

    fn ground_size(&self) -> usize;

    fn eval(&self, set: u64) -> f64;

    fn ground(&self) -> u64 {
        bits::full(self.ground_size())
    }
}

/// `μ(T) = |T|`.
#[derive(Clone, Debug)]
pub struct Cardinality {
    n: usize,
}

impl Cardinality {
    pub fn new(n: usize) -> Self {
        Cardinality { n }
    }
}

impl MeasureOracle for Cardinality {
    fn name(&self) -> &str {
        "cardinality"
    }

    fn ground_size(&self) -> usize {
        self.n
    }

    fn eval(&self, set: u64) -> f64 {
        set.count_ones() as f64
    }
}

/// A measure given by a closure, memoized.
pub struct FnMeasure<F> {
    name: String,
    n: usize,
    f: F,
    memo: Mutex<HashMap<u64, f64>>,
}

impl<F: Fn(u64) -> f64 + Send + Sync> FnMeasure<F> {
    pub fn new(name: impl Into<String>, n: usize, f: F) -> Self {
        FnMeasure { name: name.into(), n, f, memo: Mutex::new(HashMap::new()) }
    }
}

impl<F: Fn(u64) -> f64 + Send + Sync> MeasureOracle for FnMeasure<F> {
    fn name(&self) -> &str {
        &self.name
    }

    fn ground_size(&self) -> usize {
        self.n
    }

    fn eval(&self, set: u64) -> f64 {
        if set == 0 {
            return 0.0;
        }
        if let Some(&v) = self.memo.lock().unwrap().get(&set) {
            return v;
        }
        let v = (self.f)(set);
        self.memo.lock().unwrap().insert(set, v);
        v
    }
}

/// Shannon entropy (bits) of marginals of a joint distribution over `n`
/// binary variables. Outcome index bit `n-1-i` is variable `i`.
#[derive(Debug)]
pub struct EntropyMeasure {
    n: usize,
    probs: Vec<f64>,
    memo: Mutex<HashMap<u64, f64>>,
}

pub const MAX_VARIABLES: usize = 16;

pub fn entropy_measure(n: usize, probs: &[f64]) -> Result<EntropyMeasure> {
    if n == 0 || n > MAX_VARIABLES {
        return Err(Error::InvalidDistribution(format!("variable count must be in 1..={MAX_VARIABLES}, got {n}")));
    }
    if probs.len() != 1 << n {
        return Err(Error::InvalidDistribution(format!("expected {} probabilities, got {}", 1usize << n, probs.len())));
    }
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::InvalidDistribution(format!("probability {p} is negative or not finite")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidDistribution(format!("probabilities sum to {total}, not 1")));
    }
    Ok(EntropyMeasure { n, probs: probs.to_vec(), memo: Mutex::new(HashMap::new()) })
}

impl EntropyMeasure {
    fn outcome_mask(&self, set: u64) -> usize {
        ones(set).fold(0usize, |m, i| m | 1 << (self.n - 1 - i))
    }

    pub fn marginal(&self, set: u64) -> HashMap<usize, f64> {
        let mask = self.outcome_mask(set);
        let mut marg: HashMap<usize, f64> = HashMap::new();
        for (idx, &p) in self.probs.iter().enumerate() {
            if p > 0.0 {
                *marg.entry(idx & mask).or_default() += p;
            }
        }
        marg
    }
}

impl MeasureOracle for EntropyMeasure {
    fn name(&self) -> &str {
        "entropy"
    }

    fn ground_size(&self) -> usize {
        self.n
    }

    fn eval(&self, set: u64) -> f64 {
        if set == 0 {
            return 0.0;
        }
        if let Some(&v) = self.memo.lock().unwrap().get(&set) {
            return v;
        }
        let mut marg: Vec<(usize, f64)> = self.marginal(set).into_iter().collect();
        marg.sort_by_key(|&(k, _)| k);
        let h = marg.iter().filter(|&&(_, p)| p > 0.0).map(|&(_, p)| -p * p.log2()).sum::<f64>().max(0.0);
        self.memo.lock().unwrap().insert(set, h);
        h
    }
}

/// Distribution file format: probability `i` is the outcome whose bit
/// `n-1-v` gives variable `v`.
#[derive(Clone, Debug, PartialEq, serde::Deserialize, Serialize)]
pub struct DistributionJson {
    pub variables: usize,
    pub probabilities: Vec<f64>,
}

impl DistributionJson {
    pub fn into_measure(&self) -> Result<EntropyMeasure> {
        entropy_measure(self.variables, &self.probabilities)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureReport {
    pub measure: String,
    pub ground_size: usize,
    pub exhaustive: bool,
    pub subsets_checked: u64,
    pub pairs_checked: u64,
    /// Nonempty subsets with `μ ≤ 0`, or `∅` with `μ ≠ 0`.
    pub semipositivity_violations: Vec<Vec<usize>>,
    /// Pairs `(A, B)` with `μ(A∪B) > μ(A) + μ(B)`.
    pub subadditivity_violations: Vec<(Vec<usize>, Vec<usize>)>,
}

impl MeasureReport {
    pub fn valid(&self) -> bool {
        self.semipositivity_violations.is_empty() && self.subadditivity_violations.is_empty()
    }
}

pub const EXHAUSTIVE_PAIR_LIMIT: usize = 12;
const MAX_REPORTED: usize = 16;
const SAMPLED_SUBSETS: u64 = 4096;
const SAMPLED_PAIRS: u64 = 100_000;

/// Audits semipositivity on every subset and subadditivity on every pair
/// when the ground set has at most 12 elements; otherwise on a seeded sample.
pub fn check_measure(m: &dyn MeasureOracle, seed: u64) -> MeasureReport {
    let n = m.ground_size();
    let exhaustive = n <= EXHAUSTIVE_PAIR_LIMIT;
    let mut report = MeasureReport {
        measure: m.name().to_string(),
        ground_size: n,
        exhaustive,
        subsets_checked: 0,
        pairs_checked: 0,
        semipositivity_violations: Vec::new(),
        subadditivity_violations: Vec::new(),
    };
    let ground = m.ground();
    let semi = |set: u64, report: &mut MeasureReport| {
        report.subsets_checked += 1;
        let v = m.eval(set);
        let bad = if set == 0 { v != 0.0 } else { v <= 0.0 };
        if bad && report.semipositivity_violations.len() < MAX_REPORTED {
            report.semipositivity_violations.push(ones(set).collect());
        }
    };
    let sub = |a: u64, b: u64, report: &mut MeasureReport| {
        report.pairs_checked += 1;
        let (va, vb, vu) = (m.eval(a), m.eval(b), m.eval(a | b));
        if vu > va + vb + slack(va + vb) && report.subadditivity_violations.len() < MAX_REPORTED {
            report.subadditivity_violations.push((ones(a).collect(), ones(b).collect()));
        }
    };
    if exhaustive {
        let all = 1u64 << n;
        for s in 0..all {
            semi(s, &mut report);
        }
        for a in 1..all {
            for b in a + 1..all {
                if a & b != a && a & b != b {
                    sub(a, b, &mut report);
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        semi(0, &mut report);
        for _ in 0..SAMPLED_SUBSETS {
            let s = rng.gen::<u64>() & ground;
            semi(s, &mut report);
        }
        for _ in 0..SAMPLED_PAIRS {
            let (a, b) = (rng.gen::<u64>() & ground, rng.gen::<u64>() & ground);
            sub(a, b, &mut report);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cardinality_is_valid() {
        let r = check_measure(&Cardinality::new(5), 0);
        assert!(r.valid() && r.exhaustive);
        assert_eq!(r.subsets_checked, 32);
    }

    #[test]
    fn exponential_is_not_subadditive() {
        let m = FnMeasure::new("2^|T|-1", 3, |s| (1u64 << s.count_ones()) as f64 - 1.0);
        let r = check_measure(&m, 0);
        assert!(!r.valid());
        assert!(r.semipositivity_violations.is_empty());
        // μ({0,1}) = 3 > μ({0}) + μ({1}) = 2 is the first pair scanned
        assert_eq!(r.subadditivity_violations[0], (vec![0], vec![1]));
        // the disjoint sizes 1 and 2 case: 7 > 1 + 3
        assert!(r.subadditivity_violations.contains(&(vec![0], vec![1, 2])));
    }

    #[test]
    fn entropy_examples() {
        let indep = entropy_measure(2, &[0.25; 4]).unwrap();
        assert_eq!(indep.eval(0b01), 1.0);
        assert_eq!(indep.eval(0b11), 2.0);
        let corr = entropy_measure(2, &[0.5, 0.0, 0.0, 0.5]).unwrap();
        assert_eq!(corr.eval(0b11), 1.0);
        assert_eq!(corr.eval(0b01), 1.0);
        // uniform over {000, 011, 101, 110}
        let mut p = vec![0.0; 8];
        for i in [0b000, 0b011, 0b101, 0b110] {
            p[i] = 0.25;
        }
        let par = entropy_measure(3, &p).unwrap();
        for pair in [0b011, 0b101, 0b110] {
            assert!((par.eval(pair) - 2.0).abs() < 1e-12);
        }
        assert!((par.eval(0b111) - 2.0).abs() < 1e-12);
        assert!(check_measure(&par, 0).valid());
    }

    #[test]
    fn entropy_variable_order_is_msb_first() {
        // variable 0 is a fair coin, variable 1 is constant 0
        let m = entropy_measure(2, &[0.5, 0.0, 0.5, 0.0]).unwrap();
        assert_eq!(m.eval(0b01), 1.0);
        assert_eq!(m.eval(0b10), 0.0);
        let r = check_measure(&m, 0);
        assert_eq!(r.semipositivity_violations, vec![vec![1]]);
    }

    #[test]
    fn invalid_distributions() {
        assert!(matches!(entropy_measure(2, &[0.5, 0.5]), Err(Error::InvalidDistribution(_))));
        assert!(matches!(entropy_measure(1, &[0.7, 0.7]), Err(Error::InvalidDistribution(_))));
        assert!(matches!(entropy_measure(1, &[1.5, -0.5]), Err(Error::InvalidDistribution(_))));
        assert!(matches!(entropy_measure(17, &[]), Err(Error::InvalidDistribution(_))));
    }

    #[test]
    fn sampled_mode_for_large_grounds() {
        let r = check_measure(&Cardinality::new(20), 7);
        assert!(!r.exhaustive && r.valid());
        assert_eq!(r.pairs_checked, SAMPLED_PAIRS);
    }
}
