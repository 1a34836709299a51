//! Exhaustive reference implementations. They read a problem only through
//! `nx`, `ny`, `nz` and `accepts`, and enumerate every rectangle, every
//! rectangle family and every protocol tree directly.

#![allow(dead_code)]

use std::collections::HashMap;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rectlab_core::{Problem, Rect};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_function(rng: &mut ChaCha8Rng, nx: usize, ny: usize, nz: usize) -> Problem {
    let t: Vec<Vec<usize>> = (0..nx).map(|_| (0..ny).map(|_| rng.gen_range(0..nz)).collect()).collect();
    Problem::function("R", &t, nz).unwrap()
}

/// A random function with each side drawn from `1..=max_side`.
pub fn random_small(rng: &mut ChaCha8Rng, max_side: usize, nz: usize) -> Problem {
    let nx = rng.gen_range(1..=max_side);
    let ny = rng.gen_range(1..=max_side);
    random_function(rng, nx, ny, nz)
}

/// Every function `nx×ny → nz`.
pub fn all_functions(nx: usize, ny: usize, nz: usize) -> impl Iterator<Item = Problem> {
    let n = nx * ny;
    (0..nz.pow(n as u32)).map(move |mut code| {
        let mut t = vec![vec![0; ny]; nx];
        for i in 0..n {
            t[i / ny][i % ny] = code % nz;
            code /= nz;
        }
        Problem::function("F", &t, nz).unwrap()
    })
}

pub fn is_mono(p: &Problem, rows: u64, cols: u64, z: usize) -> bool {
    (0..p.nx())
        .filter(|x| rows >> x & 1 == 1)
        .all(|x| (0..p.ny()).filter(|y| cols >> y & 1 == 1).all(|y| p.accepts(x, y, z)))
}

pub fn mono_any(p: &Problem, rows: u64, cols: u64) -> bool {
    (0..p.nz()).any(|z| is_mono(p, rows, cols, z))
}

/// All nonempty monochromatic rectangles as `(rows, cols, color)`.
pub fn all_mono_rects(p: &Problem) -> Vec<(u64, u64, usize)> {
    let mut out = Vec::new();
    for rows in 1u64..1 << p.nx() {
        for cols in 1u64..1 << p.ny() {
            for z in 0..p.nz() {
                if is_mono(p, rows, cols, z) {
                    out.push((rows, cols, z));
                }
            }
        }
    }
    out
}

/// Cell mask (row-major `x·ny + y`) of a rectangle.
pub fn cell_mask(p: &Problem, rows: u64, cols: u64) -> u64 {
    let mut m = 0u64;
    for x in 0..p.nx() {
        for y in 0..p.ny() {
            if rows >> x & 1 == 1 && cols >> y & 1 == 1 {
                m |= 1 << (x * p.ny() + y);
            }
        }
    }
    m
}

/// `Cov` of every subset of the domain (at most 20 cells); `u8::MAX` marks
/// subsets containing an uncolorable cell. Each entry is the least `k` such
/// that some `k` monochromatic rectangles cover the subset.
pub struct CoverTable {
    pub table: Vec<u8>,
}

impl CoverTable {
    pub fn new(p: &Problem) -> Self {
        let n = p.ncells();
        assert!(n <= 20);
        let mut masks: Vec<u64> = all_mono_rects(p).iter().map(|&(r, c, _)| cell_mask(p, r, c)).collect();
        masks.sort_unstable();
        masks.dedup();
        // breadth-first over unions of rectangles; a subset's value is the
        // fewest rectangles whose union contains it
        let size = 1usize << n;
        let mut reach = vec![u8::MAX; size];
        reach[0] = 0;
        let mut frontier = vec![0usize];
        let mut k = 0u8;
        while !frontier.is_empty() {
            k += 1;
            let mut next = Vec::new();
            for &u in &frontier {
                for &m in &masks {
                    let v = u | m as usize;
                    if reach[v] == u8::MAX {
                        reach[v] = k;
                        next.push(v);
                    }
                }
            }
            frontier = next;
        }
        // push values down to subsets: superset-min transform
        let mut table = reach;
        for b in 0..n {
            for s in 0..size {
                if s >> b & 1 == 0 {
                    table[s] = table[s].min(table[s | 1 << b]);
                }
            }
        }
        CoverTable { table }
    }

    pub fn cov(&self, cells: u64) -> u8 {
        self.table[cells as usize]
    }
}

pub fn full_mask(p: &Problem) -> u64 {
    (1u64 << p.ncells()) - 1
}

/// `(min leaves, min depth)` over every protocol tree for `rows × cols`,
/// including trees that keep splitting monochromatic rectangles. Splits
/// range over all ordered proper subsets of the split side.
pub fn protocol_oracle(p: &Problem, rows: u64, cols: u64) -> (usize, usize) {
    let mut memo = HashMap::new();
    let pareto = trees(p, rows, cols, &mut memo);
    let l = pareto.iter().map(|&(l, _)| l).min().unwrap();
    let c = pareto.iter().map(|&(_, c)| c).min().unwrap();
    (l, c)
}

/// All achievable `(leaves, depth)` pairs, reduced to their Pareto front.
fn trees(p: &Problem, rows: u64, cols: u64, memo: &mut HashMap<(u64, u64), Vec<(usize, usize)>>) -> Vec<(usize, usize)> {
    if let Some(v) = memo.get(&(rows, cols)) {
        return v.clone();
    }
    let mut all = Vec::new();
    if mono_any(p, rows, cols) {
        all.push((1, 0));
    }
    for (side, set) in [(0, rows), (1, cols)] {
        let mut sub = (set - 1) & set;
        while sub != 0 {
            let rest = set & !sub;
            let (a, b) = if side == 0 {
                (trees(p, sub, cols, memo), trees(p, rest, cols, memo))
            } else {
                (trees(p, rows, sub, memo), trees(p, rows, rest, memo))
            };
            for &(la, ca) in &a {
                for &(lb, cb) in &b {
                    all.push((la + lb, 1 + ca.max(cb)));
                }
            }
            sub = (sub - 1) & set;
        }
    }
    all.sort_unstable();
    all.dedup();
    let front: Vec<(usize, usize)> =
        all.iter().copied().filter(|&(l, c)| !all.iter().any(|&(l2, c2)| (l2, c2) != (l, c) && l2 <= l && c2 <= c)).collect();
    memo.insert((rows, cols), front.clone());
    front
}

/// δ_min by the definition: the least δ such that every monochromatic
/// rectangle meets at most `δ·|Λ|` cells of `Λ`.
pub fn delta_literal(p: &Problem, lambda: u64) -> Ratio<i64> {
    let size = lambda.count_ones() as i64;
    let worst = all_mono_rects(p).iter().map(|&(r, c, _)| (cell_mask(p, r, c) & lambda).count_ones()).max().unwrap_or(0);
    Ratio::new(worst as i64, size)
}

pub fn rect_of(r: &Rect) -> (u64, u64) {
    (r.rows, r.cols)
}

/// Shannon entropy of the marginal on the variables in `set`; variable `i`
/// is bit `n-1-i` of an outcome index.
pub fn entropy(n: usize, probs: &[f64], set: u64) -> f64 {
    let mut marg: HashMap<usize, f64> = HashMap::new();
    for (o, &q) in probs.iter().enumerate() {
        let key: usize = (0..n).filter(|i| set >> i & 1 == 1).map(|i| (o >> (n - 1 - i)) & 1).fold(0, |k, b| k << 1 | b);
        *marg.entry(key).or_default() += q;
    }
    -marg.values().filter(|&&q| q > 0.0).map(|q| q * q.log2()).sum::<f64>()
}

/// A random distribution on `n` bits with some zero outcomes.
pub fn random_distribution(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..1 << n).map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen::<f64>() }).collect();
    if w.iter().all(|&x| x == 0.0) {
        w[0] = 1.0;
    }
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    // make the sum exactly representable close to one
    let err: f64 = 1.0 - w.iter().sum::<f64>();
    let i = w.iter().position(|&x| x > 0.0).unwrap();
    w[i] += err;
    w
}
