//! Exact cover numbers by branch-and-bound set cover over the maximal
//! monochromatic rectangles.

use std::collections::{HashMap, HashSet};
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::bits::{ones, ones128};
use crate::error::{cap, Error, Result};
use crate::measure::MeasureOracle;
use crate::problem::{CellSet, ColoredCover, ColoredRect, Problem};
use crate::rects::{enumerate_maximal, MonoRectIndex};

pub const MAX_UNIVERSE: usize = 128;
pub const MAX_MEASURE_GROUND: usize = 64;
/// Ground sets up to this size are tabulated in full on first use.
pub const TABULATE_GROUND: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverResult {
    pub value: usize,
    pub witness: ColoredCover,
    #[serde(skip)]
    pub explored: u64,
}

/// Restriction of the rectangle index to a universe of cells.
struct SetSystem {
    cells: Vec<usize>,
    sets: Vec<u128>,
    origin: Vec<ColoredRect>,
}

impl SetSystem {
    fn build(p: &Problem, idx: &MonoRectIndex, cells: &CellSet) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::EmptyCellSet);
        }
        let cells: Vec<usize> = cells.iter().collect();
        cap("cells in cover universe", cells.len(), MAX_UNIVERSE)?;
        let coords: Vec<(usize, usize)> = cells.iter().map(|&i| p.coords(i)).collect();
        let mut seen = HashSet::new();
        let mut raw: Vec<(u128, ColoredRect)> = Vec::new();
        for r in idx.rects() {
            let mask = coords
                .iter()
                .enumerate()
                .filter(|(_, &(x, y))| r.rect.contains(x, y))
                .fold(0u128, |m, (i, _)| m | 1 << i);
            if mask != 0 && seen.insert(mask) {
                raw.push((mask, *r));
            }
        }
        let covered = raw.iter().fold(0u128, |m, &(s, _)| m | s);
        if let Some(i) = (0..cells.len()).find(|&i| covered >> i & 1 == 0) {
            let (x, y) = coords[i];
            return Err(Error::Uncoverable { x, y });
        }
        // drop sets strictly inside another; a minimum cover never needs them
        let keep: Vec<bool> = raw
            .iter()
            .map(|&(s, _)| !raw.iter().any(|&(t, _)| t != s && s & !t == 0))
            .collect();
        let (sets, origin) = raw.into_iter().zip(keep).filter(|(_, k)| *k).map(|(r, _)| r).unzip();
        Ok(SetSystem { cells, sets, origin })
    }
}

struct Search<'a> {
    sets: &'a [u128],
    containing: Vec<Vec<usize>>,
    reach: Vec<u128>,
    // elements by ascending number of containing sets
    order: Vec<usize>,
    best: Vec<usize>,
    explored: u64,
}

impl Search<'_> {
    fn lower_bound(&self, uncovered: u128) -> usize {
        let mut rem = uncovered;
        let mut lb = 0;
        for &e in &self.order {
            if rem >> e & 1 == 1 {
                lb += 1;
                rem &= !self.reach[e];
            }
        }
        lb
    }

    fn run(&mut self, uncovered: u128, chosen: &mut Vec<usize>) {
        self.explored += 1;
        if uncovered == 0 {
            if chosen.len() < self.best.len() {
                self.best = chosen.clone();
            }
            return;
        }
        if chosen.len() + self.lower_bound(uncovered) >= self.best.len() {
            return;
        }
        let e = *self.order.iter().find(|&&e| uncovered >> e & 1 == 1).unwrap();
        let mut cands = self.containing[e].clone();
        cands.sort_by_key(|&s| (std::cmp::Reverse((self.sets[s] & uncovered).count_ones()), s));
        for s in cands {
            chosen.push(s);
            self.run(uncovered & !self.sets[s], chosen);
            chosen.pop();
        }
    }
}

fn greedy(sets: &[u128], universe: u128) -> Vec<usize> {
    let mut rem = universe;
    let mut out = Vec::new();
    while rem != 0 {
        let (i, _) = sets
            .iter()
            .enumerate()
            .max_by_key(|&(i, s)| ((s & rem).count_ones(), std::cmp::Reverse(i)))
            .unwrap();
        out.push(i);
        rem &= !sets[i];
    }
    out
}

pub fn cover_number(p: &Problem, cells: &CellSet) -> Result<CoverResult> {
    let idx = enumerate_maximal(p)?;
    cover_number_with(p, &idx, cells)
}

/// `Cov(cells)` with a minimum witness cover.
pub fn cover_number_with(p: &Problem, idx: &MonoRectIndex, cells: &CellSet) -> Result<CoverResult> {
    let sys = SetSystem::build(p, idx, cells)?;
    let n = sys.cells.len();
    let universe = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    let mut containing = vec![Vec::new(); n];
    let mut reach = vec![0u128; n];
    for (si, &s) in sys.sets.iter().enumerate() {
        for e in ones128(s) {
            containing[e].push(si);
            reach[e] |= s;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&e| (containing[e].len(), e));
    let mut search = Search { sets: &sys.sets, containing, reach, order, best: greedy(&sys.sets, universe), explored: 0 };
    search.run(universe, &mut Vec::new());
    let mut chosen = search.best.clone();
    chosen.sort_unstable();
    Ok(CoverResult {
        value: chosen.len(),
        witness: ColoredCover(chosen.iter().map(|&s| sys.origin[s]).collect()),
        explored: search.explored,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverViolation {
    EmptyEntry { entry: usize },
    NotMonochromatic { entry: usize, color: usize },
    Uncovered { x: usize, y: usize },
}

impl std::fmt::Display for CoverViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoverViolation::EmptyEntry { entry } => write!(f, "entry {entry} is empty"),
            CoverViolation::NotMonochromatic { entry, color } => {
                write!(f, "entry {entry} is not monochromatic with color {color}")
            }
            CoverViolation::Uncovered { x, y } => write!(f, "cell ({x},{y}) is not covered"),
        }
    }
}

/// Checks that every entry is monochromatic for its color and that the
/// entries cover `cells`; reports the first failure.
pub fn verify_cover(p: &Problem, cells: &CellSet, cover: &ColoredCover) -> Result<(), CoverViolation> {
    for (i, e) in cover.iter().enumerate() {
        if e.rect.is_empty() {
            return Err(CoverViolation::EmptyEntry { entry: i });
        }
        let in_domain = e.rect.rows >> p.nx() == 0 && e.rect.cols >> p.ny() == 0;
        if !in_domain || !p.is_mono_with(&e.rect, e.color) {
            return Err(CoverViolation::NotMonochromatic { entry: i, color: e.color });
        }
    }
    for c in cells.iter() {
        let (x, y) = p.coords(c);
        if !cover.iter().any(|e| e.rect.contains(x, y)) {
            return Err(CoverViolation::Uncovered { x, y });
        }
    }
    Ok(())
}

/// `Σ ↦ Cov(Σ)` over a fixed ground set of cells, memoized.
///
/// Evaluated by the exact recursion `Cov(S) = 1 + min_{R ∋ e} Cov(S ∖ R)`
/// where `e` is the element of `S` lying in the fewest rectangles.
pub struct CoverMeasure {
    name: String,
    ground: Vec<usize>,
    sets: Vec<u64>,
    containing: Vec<Vec<usize>>,
    memo: Mutex<HashMap<u64, u32>>,
    table: OnceLock<Vec<u8>>,
}

/// The cover measure over the whole domain of a total problem.
pub fn cover_measure(p: &Problem) -> Result<CoverMeasure> {
    p.require_total()?;
    cover_measure_on(p, &p.full_cells())
}

/// The cover measure over an arbitrary colorable ground set of at most 64 cells.
pub fn cover_measure_on(p: &Problem, ground: &CellSet) -> Result<CoverMeasure> {
    let idx = enumerate_maximal(p)?;
    let cells: Vec<usize> = ground.iter().collect();
    cap("cells in measure ground set", cells.len(), MAX_MEASURE_GROUND)?;
    if let Some(&c) = cells.iter().find(|&&c| {
        let (x, y) = p.coords(c);
        p.colors_at(x, y) == 0
    }) {
        let (x, y) = p.coords(c);
        return Err(Error::Uncoverable { x, y });
    }
    let mut sets: Vec<u64> = Vec::new();
    for r in idx.rects() {
        let m = cells.iter().enumerate().fold(0u64, |m, (i, &c)| {
            let (x, y) = p.coords(c);
            if r.rect.contains(x, y) {
                m | 1 << i
            } else {
                m
            }
        });
        if m != 0 && !sets.contains(&m) {
            sets.push(m);
        }
    }
    let all = sets.clone();
    sets.retain(|&s| !all.iter().any(|&t| t != s && s & !t == 0));
    let mut containing = vec![Vec::new(); cells.len()];
    for (si, &s) in sets.iter().enumerate() {
        for e in ones(s) {
            containing[e].push(si);
        }
    }
    Ok(CoverMeasure {
        name: format!("cover({})", p.name()),
        ground: cells,
        sets,
        containing,
        memo: Mutex::new(HashMap::new()),
        table: OnceLock::new(),
    })
}

impl CoverMeasure {
    /// Ground element `i` is this cell index of the problem.
    pub fn cell_of(&self, i: usize) -> usize {
        self.ground[i]
    }

    pub fn to_cells(&self, ncells: usize, set: u64) -> CellSet {
        CellSet::from_indices(ncells, ones(set).map(|i| self.ground[i]))
    }

    pub fn from_cells(&self, cells: &CellSet) -> Result<u64> {
        cells.iter().try_fold(0u64, |m, c| match self.ground.iter().position(|&g| g == c) {
            Some(i) => Ok(m | 1 << i),
            None => Err(Error::NotASubset),
        })
    }

    pub fn cover(&self, set: u64) -> u32 {
        if self.ground.len() <= TABULATE_GROUND {
            return self.table.get_or_init(|| self.tabulate())[set as usize] as u32;
        }
        let mut memo = self.memo.lock().unwrap();
        self.solve(set, &mut memo)
    }

    /// `Cov` of every subset, in increasing mask order; `set ∖ R < set`.
    fn tabulate(&self) -> Vec<u8> {
        let mut t = vec![0u8; 1 << self.ground.len()];
        for set in 1..t.len() {
            let e = set.trailing_zeros() as usize;
            t[set] = 1 + self.containing[e].iter().map(|&s| t[set & !self.sets[s] as usize]).min().unwrap();
        }
        t
    }

    fn solve(&self, set: u64, memo: &mut HashMap<u64, u32>) -> u32 {
        if set == 0 {
            return 0;
        }
        if let Some(&v) = memo.get(&set) {
            return v;
        }
        let e = ones(set).min_by_key(|&e| (self.containing[e].len(), e)).unwrap();
        let mut best = u32::MAX;
        for &s in &self.containing[e] {
            best = best.min(1 + self.solve(set & !self.sets[s], memo));
            if best == 1 {
                break;
            }
        }
        memo.insert(set, best);
        best
    }
}

impl MeasureOracle for CoverMeasure {
    fn name(&self) -> &str {
        &self.name
    }

    fn ground_size(&self) -> usize {
        self.ground.len()
    }

    fn eval(&self, set: u64) -> f64 {
        self.cover(set) as f64
    }
}
