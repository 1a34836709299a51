//! δ-fooling sets: certification, the `Cov(Λ) ≥ 1/δ` bound, and search.
//!
//! `Λ` is δ-fooling iff every monochromatic rectangle holds at most `δ|Λ|`
//! cells of `Λ`. A subset of `Λ` fits in one monochromatic rectangle iff it
//! fits in a maximal one, so scanning the rectangle index gives the least
//! such δ exactly.

use std::cmp::Ordering;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{self, ones};
use crate::error::{cap, Error, Result};
use crate::fortify::fortify_cover;
use crate::problem::{CellSet, CellSetJson, ColoredRect, Problem, Rect};
use crate::rects::{enumerate_maximal, MonoRectIndex};

pub const DEFAULT_EXHAUSTIVE_CELLS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoolingCertificate {
    pub lambda: CellSet,
    /// Largest number of `Λ` cells in one monochromatic rectangle.
    pub overlap: usize,
    pub size: usize,
    pub witness: ColoredRect,
}

impl FoolingCertificate {
    /// `δ_min = overlap / |Λ|`, reduced.
    pub fn delta(&self) -> Ratio<i64> {
        Ratio::new(self.overlap as i64, self.size as i64)
    }

    pub fn cov_lower_bound(&self) -> usize {
        cov_lower_bound(self)
    }

    pub fn to_json(&self, p: &Problem) -> CertificateJson {
        CertificateJson {
            lambda: self.lambda.to_json(p).cells,
            delta: Frac { num: self.overlap as i64, den: self.size as i64 },
            witness: self.witness.rect,
            cov_lb: self.cov_lower_bound(),
        }
    }
}

/// An exact rational on the wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frac {
    pub num: i64,
    pub den: i64,
}

impl From<Ratio<i64>> for Frac {
    fn from(r: Ratio<i64>) -> Self {
        Frac { num: *r.numer(), den: *r.denom() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub lambda: Vec<[usize; 2]>,
    pub delta: Frac,
    pub witness: Rect,
    pub cov_lb: usize,
}

impl CertificateJson {
    pub fn cells(&self) -> CellSetJson {
        CellSetJson { cells: self.lambda.clone() }
    }
}

pub fn min_fooling_delta(p: &Problem, lambda: &CellSet) -> Result<FoolingCertificate> {
    let idx = enumerate_maximal(p)?;
    min_fooling_delta_with(p, &idx, lambda)
}

pub fn min_fooling_delta_with(p: &Problem, idx: &MonoRectIndex, lambda: &CellSet) -> Result<FoolingCertificate> {
    let (overlap, witness) = idx.max_overlap(p, lambda)?;
    if let Some(c) = lambda.iter().find(|&c| {
        let (x, y) = p.coords(c);
        p.colors_at(x, y) == 0
    }) {
        let (x, y) = p.coords(c);
        return Err(Error::Uncoverable { x, y });
    }
    Ok(FoolingCertificate { lambda: lambda.clone(), overlap, size: lambda.len(), witness })
}

/// Whether `Λ` is δ-fooling: no monochromatic rectangle holds a fraction
/// of `Λ` strictly above `δ`.
pub fn is_delta_fooling(p: &Problem, lambda: &CellSet, delta: Ratio<i64>) -> Result<bool> {
    if delta <= Ratio::from_integer(0) || delta > Ratio::from_integer(1) {
        return Err(Error::InvalidDelta(delta.to_string()));
    }
    let cert = min_fooling_delta(p, lambda)?;
    Ok(delta >= cert.delta())
}

/// `⌈1/δ_min⌉`.
pub fn cov_lower_bound(cert: &FoolingCertificate) -> usize {
    cert.size.div_ceil(cert.overlap)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Exhaustive,
    Greedy,
    Fortify,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exhaustive" => Ok(Strategy::Exhaustive),
            "greedy" => Ok(Strategy::Greedy),
            "fortify" => Ok(Strategy::Fortify),
            other => Err(format!("unknown strategy {other:?}")),
        }
    }
}

/// Ranks candidate fooling sets: smaller δ, then larger `|Λ|`, then
/// lexicographically smaller cell list.
fn rank(a: (usize, u64), b: (usize, u64)) -> Ordering {
    let (oa, la) = a;
    let (ob, lb) = b;
    let (na, nb) = (la.count_ones() as u64, lb.count_ones() as u64);
    (oa as u64 * nb)
        .cmp(&(ob as u64 * na))
        .then_with(|| nb.cmp(&na))
        .then_with(|| bits::lex_cmp(la, lb))
}

fn deposit(mut idx: u64, pool: &[usize]) -> u64 {
    let mut m = 0u64;
    for &c in pool {
        if idx & 1 == 1 {
            m |= 1 << c;
        }
        idx >>= 1;
    }
    m
}

pub fn search_fooling(p: &Problem, strategy: Strategy, size_hint: Option<usize>) -> Result<FoolingCertificate> {
    search_fooling_capped(p, strategy, size_hint, DEFAULT_EXHAUSTIVE_CELLS)
}

pub fn search_fooling_capped(
    p: &Problem,
    strategy: Strategy,
    size_hint: Option<usize>,
    max_cells: usize,
) -> Result<FoolingCertificate> {
    match strategy {
        Strategy::Fortify => {
            cap("cells for fortification", p.ncells(), max_cells.min(crate::fortify::HARD_SCAN_CAP))?;
            fortify_cover(p, max_cells).map(|r| r.fooling)
        }
        Strategy::Exhaustive => {
            cap("cells for exhaustive fooling search", p.ncells(), max_cells.min(30))?;
            let idx = enumerate_maximal(p)?;
            let masks = rect_masks(p, &idx);
            let pool: Vec<usize> = (0..p.ncells()).filter(|&c| colorable(p, c)).collect();
            if pool.is_empty() {
                return Err(Error::EmptyCellSet);
            }
            let limit = size_hint.unwrap_or(usize::MAX);
            let best = (1u64..1 << pool.len())
                .into_par_iter()
                .filter(|i| (i.count_ones() as usize) <= limit)
                .map(|i| {
                    let lam = deposit(i, &pool);
                    (overlap(&masks, lam), lam)
                })
                .min_by(|&a, &b| rank(a, b))
                .unwrap();
            let cells = CellSet::from_indices(p.ncells(), ones(best.1));
            min_fooling_delta_with(p, &idx, &cells)
        }
        Strategy::Greedy => {
            cap("cells for greedy fooling search", p.ncells(), 64)?;
            let idx = enumerate_maximal(p)?;
            let masks = rect_masks(p, &idx);
            let pool: Vec<usize> = (0..p.ncells()).filter(|&c| colorable(p, c)).collect();
            let first = *pool.first().ok_or(Error::EmptyCellSet)?;
            let limit = size_hint.unwrap_or(usize::MAX).max(1);
            let mut lam = 1u64 << first;
            let mut ov = 1usize;
            while (lam.count_ones() as usize) < limit {
                let next = pool
                    .iter()
                    .filter(|&&c| lam >> c & 1 == 0)
                    .map(|&c| (overlap(&masks, lam | 1 << c), c))
                    .min();
                let Some((nov, c)) = next else { break };
                let n = lam.count_ones() as usize;
                // keep growing while δ does not increase
                if nov * n > ov * (n + 1) {
                    break;
                }
                lam |= 1 << c;
                ov = nov;
            }
            let cells = CellSet::from_indices(p.ncells(), ones(lam));
            min_fooling_delta_with(p, &idx, &cells)
        }
    }
}

fn colorable(p: &Problem, c: usize) -> bool {
    let (x, y) = p.coords(c);
    p.colors_at(x, y) != 0
}

fn rect_masks(p: &Problem, idx: &MonoRectIndex) -> Vec<u64> {
    idx.rects()
        .iter()
        .map(|r| {
            let mut m = 0u64;
            for x in ones(r.rect.rows) {
                for y in ones(r.rect.cols) {
                    m |= 1 << p.cell(x, y);
                }
            }
            m
        })
        .collect()
}

fn overlap(masks: &[u64], lam: u64) -> usize {
    masks.iter().map(|m| (m & lam).count_ones() as usize).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::cover_number;

    fn eq1() -> Problem {
        Problem::function("EQ1", &[vec![1, 0], vec![0, 1]], 2).unwrap()
    }

    fn and() -> Problem {
        Problem::function("AND", &[vec![0, 0], vec![0, 1]], 2).unwrap()
    }

    #[test]
    fn delta_min_examples() {
        let e = eq1();
        let diag = CellSet::from_pairs(&e, &[(0, 0), (1, 1)]).unwrap();
        let cert = min_fooling_delta(&e, &diag).unwrap();
        assert_eq!(cert.delta(), Ratio::new(1, 2));
        assert_eq!(cov_lower_bound(&cert), 2);
        assert_eq!(cover_number(&e, &diag).unwrap().value, 2);

        let c = Problem::function("C", &vec![vec![0; 4]; 4], 1).unwrap();
        let lam = CellSet::from_pairs(&c, &[(0, 0), (3, 2), (1, 1)]).unwrap();
        let cert = min_fooling_delta(&c, &lam).unwrap();
        assert_eq!(cert.delta(), Ratio::from_integer(1));
        assert_eq!(cov_lower_bound(&cert), 1);

        let a = and();
        let lam = CellSet::from_pairs(&a, &[(0, 0), (1, 1)]).unwrap();
        let cert = min_fooling_delta(&a, &lam).unwrap();
        assert_eq!(cert.delta(), Ratio::new(1, 2));
        assert_eq!(cov_lower_bound(&cert), 2);
        assert_eq!(cover_number(&a, &lam).unwrap().value, 2);
    }

    #[test]
    fn is_delta_fooling_examples() {
        let e = eq1();
        let diag = CellSet::from_pairs(&e, &[(0, 0), (1, 1)]).unwrap();
        assert_eq!(is_delta_fooling(&e, &diag, Ratio::new(1, 2)), Ok(true));
        assert_eq!(is_delta_fooling(&e, &diag, Ratio::new(1, 4)), Ok(false));
        assert_eq!(is_delta_fooling(&e, &diag, Ratio::from_integer(1)), Ok(true));
        assert!(matches!(is_delta_fooling(&e, &diag, Ratio::from_integer(0)), Err(Error::InvalidDelta(_))));
        assert!(matches!(is_delta_fooling(&e, &diag, Ratio::new(3, 2)), Err(Error::InvalidDelta(_))));
        assert_eq!(min_fooling_delta(&e, &CellSet::empty(4)), Err(Error::EmptyCellSet));
    }

    #[test]
    fn exhaustive_search() {
        // every maximal rectangle of EQ1 is a single cell, so the whole
        // domain is a 1/4-fooling set
        let e = eq1();
        let cert = search_fooling(&e, Strategy::Exhaustive, None).unwrap();
        assert_eq!(cert.delta(), Ratio::new(1, 4));
        assert_eq!(cert.lambda, e.full_cells());
        // restricted to two cells the diagonal comes first lexicographically
        let cert = search_fooling(&e, Strategy::Exhaustive, Some(2)).unwrap();
        assert_eq!(cert.lambda, CellSet::from_pairs(&e, &[(0, 0), (0, 1)]).unwrap());
        assert_eq!(cert.delta(), Ratio::new(1, 2));

        let c = Problem::function("C", &vec![vec![0; 3]; 2], 1).unwrap();
        let cert = search_fooling(&c, Strategy::Exhaustive, None).unwrap();
        assert_eq!(cert.delta(), Ratio::from_integer(1));
        assert_eq!(cert.size, 6);

        let big = Problem::function("B", &vec![vec![0; 5]; 4], 1).unwrap();
        assert!(matches!(search_fooling(&big, Strategy::Exhaustive, None), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn greedy_search() {
        let e = eq1();
        let cert = search_fooling(&e, Strategy::Greedy, None).unwrap();
        assert_eq!(cert.delta(), Ratio::new(1, 4));
        let a = and();
        let cert = search_fooling(&a, Strategy::Greedy, None).unwrap();
        assert!(cert.cov_lower_bound() <= 3);
    }

    #[test]
    fn certificate_json() {
        let e = eq1();
        let diag = CellSet::from_pairs(&e, &[(0, 0), (1, 1)]).unwrap();
        let cert = min_fooling_delta(&e, &diag).unwrap();
        let s = serde_json::to_string(&cert.to_json(&e)).unwrap();
        assert_eq!(
            s,
            r#"{"lambda":[[0,0],[1,1]],"delta":{"num":1,"den":2},"witness":{"rows":[0],"cols":[0]},"cov_lb":2}"#
        );
    }
}
