//! Concrete checks of the direct-sum bounds on product instances.
//!
//! For problems `S ⊆ (A×B)×O`, `T ⊆ (P×Q)×Z` and a δ-fooling set `Λ` of `T`:
//!
//! * `Cov(S×T) ≥ Cov(S)/δ`, already on the hardcore
//!   `⋃_{(p,q)∈Λ} (A×{p})×(B×{q})`;
//! * `L(S×T) ≥ L(S)/δ`, via the tree measure
//!   `φ(π) = (1/|Λ|)·Σ_{(p,q)∈Λ} L((R_π ∩ (A×{p})×(B×{q}))|_S)`, which is
//!   sub-additive on any protocol tree, equals `L(S)` at the root and is at
//!   most `δ` on every leaf.
//!
//! Every bound is recorded as a row with exact arithmetic where the values
//! are rational; log-form bounds are real-valued and flagged vacuous when
//! their right-hand side is not positive.

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::cover::cover_number;
use crate::error::{cap, Error, Result};
use crate::fooling::{min_fooling_delta, search_fooling, FoolingCertificate, Frac, Strategy};
use crate::problem::{CellSet, Problem, Rect};
use crate::protocol::{ProtocolSolver, ProtocolTree, DEFAULT_SIDES_CAP};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Value {
    Exact(Ratio<i64>),
    Real(f64),
}

impl Value {
    pub fn int(v: usize) -> Self {
        Value::Exact(Ratio::from_integer(v as i64))
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Value::Real(x) => *x,
        }
    }

    /// The exact rational; reals are converted through their binary expansion.
    pub fn as_frac(&self) -> Frac {
        match self {
            Value::Exact(r) => (*r).into(),
            Value::Real(x) => dyadic(*x),
        }
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Exact(r) => write!(f, "{r}"),
            Value::Real(x) => write!(f, "{x:.6}"),
        }
    }
}

/// The exact value of a finite `f64` as `num/2^k`; falls back to rounding
/// at 2^-40 when the exact form overflows.
fn dyadic(x: f64) -> Frac {
    if x == 0.0 || !x.is_finite() {
        return Frac { num: 0, den: 1 };
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut m, mut e) = if exp == 0 { (frac, -1074) } else { (frac | 1 << 52, exp - 1075) };
    let tz = m.trailing_zeros() as i64;
    m >>= tz;
    e += tz;
    if (0..62).contains(&e) && (m as u128) << e < i64::MAX as u128 {
        return Frac { num: sign * ((m as i64) << e), den: 1 };
    }
    if e < 0 && -e <= 62 && m < i64::MAX as u64 {
        return Frac { num: sign * m as i64, den: 1i64 << -e };
    }
    let den = 1i64 << 40;
    Frac { num: (x * den as f64).round() as i64, den }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundRow {
    pub bound: String,
    pub lhs: Value,
    pub rhs: Value,
    pub holds: bool,
    pub vacuous: bool,
}

impl BoundRow {
    fn ge(bound: &str, lhs: Value, rhs: Value, vacuous: bool) -> Self {
        let holds = match (lhs, rhs) {
            (Value::Exact(a), Value::Exact(b)) => a >= b,
            (a, b) => a.as_f64() >= b.as_f64() - 1e-9,
        };
        BoundRow { bound: bound.to_string(), lhs, rhs, holds, vacuous }
    }

    fn eq(bound: &str, lhs: Value, rhs: Value) -> Self {
        BoundRow { bound: bound.to_string(), lhs, rhs, holds: lhs == rhs, vacuous: false }
    }
}

impl Serialize for BoundRow {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("BoundRow", 5)?;
        st.serialize_field("bound", &self.bound)?;
        match self.lhs {
            Value::Exact(r) if r.is_integer() => st.serialize_field("lhs", r.numer())?,
            other => st.serialize_field("lhs", &other.as_f64())?,
        }
        st.serialize_field("rhs", &self.rhs.as_frac())?;
        st.serialize_field("holds", &self.holds)?;
        st.serialize_field("vacuous", &self.vacuous)?;
        st.end()
    }
}

fn ceil_div(a: usize, delta: Ratio<i64>) -> Value {
    Value::Exact((Ratio::from_integer(a as i64) / delta).ceil())
}

/// `log₂ a + log₂ b − log₂ log₂ cells − 4`; `None` when `cells < 2`.
fn log_form(a: usize, b: usize, cells: usize) -> Option<f64> {
    (cells >= 2).then(|| (a as f64).log2() + (b as f64).log2() - (cells as f64).log2().log2() - 4.0)
}

fn log_row(bound: &str, lhs: usize, a: usize, b: usize, cells: usize) -> BoundRow {
    let lhs = Value::Real((lhs as f64).log2());
    match log_form(a, b, cells) {
        Some(rhs) => BoundRow::ge(bound, lhs, Value::Real(rhs), rhs <= 0.0),
        None => BoundRow { bound: bound.into(), lhs, rhs: Value::Real(0.0), holds: true, vacuous: true },
    }
}

/// Cells `((a,p),(b,q))` of `S×T` with `(p,q) ∈ lambda`.
pub fn hardcore(s: &Problem, t: &Problem, lambda: &CellSet) -> Result<CellSet> {
    if lambda.is_empty() {
        return Err(Error::EmptyCellSet);
    }
    let (tx, ty) = (t.nx(), t.ny());
    let ny = s.ny() * ty;
    let mut out = CellSet::empty(s.ncells() * t.ncells());
    for c in lambda.iter() {
        let (p, q) = t.coords(c);
        for a in 0..s.nx() {
            for b in 0..s.ny() {
                out.insert((a * tx + p) * ny + (b * ty + q));
            }
        }
    }
    Ok(out)
}

fn check_factor(product: &Problem, s: &Problem, t: &Problem) -> Result<()> {
    let shape = product.shape().ok_or(Error::NotAProduct)?;
    if shape.s != (s.nx(), s.ny(), s.nz()) || shape.t != (t.nx(), t.ny(), t.nz()) {
        return Err(Error::InvalidShape("product does not match its factors".into()));
    }
    Ok(())
}

/// Evaluates `φ` on rectangles of `S×T`, memoizing `L` of `S`.
pub struct PhiEvaluator<'a> {
    s: &'a Problem,
    t: &'a Problem,
    blocks: Vec<(usize, usize)>,
    solver: ProtocolSolver<'a>,
}

impl<'a> PhiEvaluator<'a> {
    pub fn new(s: &'a Problem, t: &'a Problem, lambda: &CellSet, sides_cap: usize) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::EmptyCellSet);
        }
        Ok(PhiEvaluator {
            s,
            t,
            blocks: lambda.pairs(t),
            solver: ProtocolSolver::with_cap(s, sides_cap),
        })
    }

    /// `(R ∩ (A×{p})×(B×{q}))|_S`.
    pub fn block_projection(&self, r: &Rect, p: usize, q: usize) -> Rect {
        let (tx, ty) = (self.t.nx(), self.t.ny());
        let rows = (0..self.s.nx()).filter(|a| r.rows >> (a * tx + p) & 1 == 1).fold(0u64, |m, a| m | 1 << a);
        let cols = (0..self.s.ny()).filter(|b| r.cols >> (b * ty + q) & 1 == 1).fold(0u64, |m, b| m | 1 << b);
        Rect::new(rows, cols)
    }

    pub fn phi(&mut self, r: &Rect) -> Result<Ratio<i64>> {
        if r.is_empty() {
            return Err(Error::EmptyRect);
        }
        let mut total = 0i64;
        for i in 0..self.blocks.len() {
            let (p, q) = self.blocks[i];
            let proj = self.block_projection(r, p, q);
            total += self.solver.size(&proj)? as i64;
        }
        Ok(Ratio::new(total, self.blocks.len() as i64))
    }
}

/// `φ` of one node rectangle of `S×T`.
pub fn phi(s: &Problem, t: &Problem, lambda: &CellSet, node: &Rect) -> Result<Ratio<i64>> {
    PhiEvaluator::new(s, t, lambda, DEFAULT_SIDES_CAP)?.phi(node)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Thm41Check {
    pub cov_s: usize,
    pub cov_t: usize,
    pub cov_product: usize,
    pub cov_hardcore: usize,
    pub delta: Ratio<i64>,
    pub rows: Vec<BoundRow>,
}

/// The cover-number direct sum bound for one `(S, T, Λ)`.
pub fn check_thm41(s: &Problem, t: &Problem, lambda: &CellSet) -> Result<Thm41Check> {
    s.require_total()?;
    t.require_total()?;
    let product = Problem::product(s, t)?;
    check_thm41_on(s, t, &product, lambda)
}

pub fn check_thm41_on(s: &Problem, t: &Problem, product: &Problem, lambda: &CellSet) -> Result<Thm41Check> {
    check_factor(product, s, t)?;
    let delta = min_fooling_delta(t, lambda)?.delta();
    let cov_s = cover_number(s, &s.full_cells())?.value;
    let cov_t = cover_number(t, &t.full_cells())?.value;
    let cov_product = cover_number(product, &product.full_cells())?.value;
    let core = hardcore(s, t, lambda)?;
    let cov_hardcore = cover_number(product, &core)?.value;
    let target = ceil_div(cov_s, delta);
    let trivial = target.as_f64() <= 1.0;
    let rows = vec![
        BoundRow::ge("thm41", Value::int(cov_product), target, trivial),
        BoundRow::ge("thm41_hardcore", Value::int(cov_hardcore), target, trivial),
        log_row("thm41_log", cov_product, cov_s, cov_t, t.ncells()),
        BoundRow::ge("cov_product_upper", Value::int(cov_s * cov_t), Value::int(cov_product), false),
    ];
    Ok(Thm41Check { cov_s, cov_t, cov_product, cov_hardcore, delta, rows })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Thm43Check {
    pub l_s: usize,
    pub l_product: usize,
    pub c_s: usize,
    pub c_product: usize,
    pub delta: Ratio<i64>,
    pub phi_root: Ratio<i64>,
    pub witness: ProtocolTree,
    pub rows: Vec<BoundRow>,
}

/// The protocol-size direct sum bound, plus the `φ` facts checked node by
/// node on an optimal protocol of `S×T`.
pub fn check_thm43(s: &Problem, t: &Problem, lambda: &CellSet, sides_cap: usize) -> Result<Thm43Check> {
    s.require_total()?;
    t.require_total()?;
    let product = Problem::product(s, t)?;
    let mut solver = ProtocolSolver::with_cap(&product, sides_cap);
    let witness = solver.size_tree(&product.full_rect())?;
    let c_product = solver.depth(&product.full_rect())? as usize;
    check_thm43_with(s, t, lambda, &witness, c_product, sides_cap)
}

/// As [`check_thm43`], with a given protocol of `S×T` standing in for the
/// optimal one (`L(S×T)` is then the leaf count of that protocol).
pub fn check_thm43_with(
    s: &Problem,
    t: &Problem,
    lambda: &CellSet,
    protocol: &ProtocolTree,
    c_product: usize,
    sides_cap: usize,
) -> Result<Thm43Check> {
    let delta = min_fooling_delta(t, lambda)?.delta();
    let mut s_solver = ProtocolSolver::with_cap(s, sides_cap);
    let l_s = s_solver.size(&s.full_rect())? as usize;
    let c_s = s_solver.depth(&s.full_rect())? as usize;
    let cov_t = cover_number(t, &t.full_cells())?.value;
    let l_product = protocol.leaves();

    let mut eval = PhiEvaluator::new(s, t, lambda, sides_cap)?;
    let phi_root = eval.phi(&protocol.rect())?;
    let (mut internal, mut internal_ok, mut leaves, mut leaves_ok) = (0usize, 0usize, 0usize, 0usize);
    let mut leaf_sum = Ratio::zero();
    for node in protocol.nodes() {
        let v = eval.phi(&node.rect())?;
        match node.children() {
            Some([a, b]) => {
                internal += 1;
                if v <= eval.phi(&a.rect())? + eval.phi(&b.rect())? {
                    internal_ok += 1;
                }
            }
            None => {
                leaves += 1;
                leaf_sum += v;
                if v <= delta {
                    leaves_ok += 1;
                }
            }
        }
    }
    let target = ceil_div(l_s, delta);
    let rows = vec![
        BoundRow::ge("thm43", Value::int(l_product), target, target.as_f64() <= 1.0),
        log_row("thm43_log", l_product, l_s, cov_t, t.ncells()),
        BoundRow::eq("phi_root", Value::Exact(phi_root), Value::int(l_s)),
        BoundRow::eq("phi_subadditive", Value::int(internal_ok), Value::int(internal)),
        BoundRow::eq("phi_leaf_le_delta", Value::int(leaves_ok), Value::int(leaves)),
        BoundRow::ge("phi_leaf_sum", Value::Exact(leaf_sum), Value::Exact(phi_root), false),
    ];
    Ok(Thm43Check { l_s, l_product, c_s, c_product, delta, phi_root, witness: protocol.clone(), rows })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DirectSumReport {
    pub s: String,
    pub t: String,
    pub cov_s: usize,
    pub cov_t: usize,
    pub cov_product: usize,
    pub cov_hardcore: usize,
    pub l_s: usize,
    pub l_product: usize,
    pub c_s: usize,
    pub c_product: usize,
    pub lambda: Vec<[usize; 2]>,
    pub delta: Frac,
    pub bounds: Vec<BoundRow>,
}

impl DirectSumReport {
    pub fn all_hold(&self) -> bool {
        self.bounds.iter().all(|b| b.holds)
    }
}

/// The default fooling set of `T`: the exhaustive optimum.
pub fn default_fooling_set(t: &Problem) -> Result<FoolingCertificate> {
    search_fooling(t, Strategy::Exhaustive, None)
}

pub fn direct_sum_report(s: &Problem, t: &Problem, lambda: &CellSet, sides_cap: usize) -> Result<DirectSumReport> {
    let a = check_thm41(s, t, lambda)?;
    let b = check_thm43(s, t, lambda, sides_cap)?;
    let mut bounds = a.rows;
    bounds.extend(b.rows);
    Ok(DirectSumReport {
        s: s.name().to_string(),
        t: t.name().to_string(),
        cov_s: a.cov_s,
        cov_t: a.cov_t,
        cov_product: a.cov_product,
        cov_hardcore: a.cov_hardcore,
        l_s: b.l_s,
        l_product: b.l_product,
        c_s: b.c_s,
        c_product: b.c_product,
        lambda: lambda.to_json(t).cells,
        delta: Frac { num: *a.delta.numer(), den: *a.delta.denom() },
        bounds,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExploreRow {
    pub rows: usize,
    pub cols: usize,
    pub table: Vec<Vec<usize>>,
    pub l_f: usize,
    pub l_ff: usize,
    pub c_f: usize,
    pub c_ff: usize,
    /// `log₂ L(F×F) − log₂ L(F)`.
    pub log_gap: f64,
    /// `C(F×F) − C(F)`.
    pub c_gap: i64,
}

fn encode(table: &[Vec<usize>]) -> u32 {
    table.iter().flatten().enumerate().fold(0, |m, (i, &v)| m | (v as u32) << i)
}

fn decode(code: u32, r: usize, c: usize) -> Vec<Vec<usize>> {
    (0..r).map(|x| (0..c).map(|y| (code >> (x * c + y) & 1) as usize).collect()).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Boolean functions on `r×c`, one per class under row and column
/// permutations and swapping the two output values.
pub fn function_classes(r: usize, c: usize) -> Vec<Vec<Vec<usize>>> {
    let (rp, cp) = (permutations(r), permutations(c));
    let n = r * c;
    let mut reps = Vec::new();
    for code in 0u32..1 << n {
        let t = decode(code, r, c);
        let mut min = u32::MAX;
        for pr in &rp {
            for pc in &cp {
                let g: Vec<Vec<usize>> = (0..r).map(|x| (0..c).map(|y| t[pr[x]][pc[y]]).collect()).collect();
                let e = encode(&g);
                min = min.min(e).min(!e & ((1u32 << n) - 1));
            }
        }
        if min == code {
            reps.push(t);
        }
    }
    reps
}

/// Tabulates `L`, `C` of `F` and `F×F` for every Boolean `F` up to
/// `max_side × max_side`. No bound is asserted.
pub fn explore_conjectures(max_side: usize) -> Result<Vec<ExploreRow>> {
    cap("side for exploration", max_side, 3)?;
    let mut shapes = Vec::new();
    for r in 1..=max_side {
        for c in 1..=max_side {
            for t in function_classes(r, c) {
                shapes.push((r, c, t));
            }
        }
    }
    shapes
        .into_par_iter()
        .map(|(r, c, table)| {
            let f = Problem::function("F", &table, 2)?;
            let ff = Problem::product(&f, &f)?;
            let mut sf = ProtocolSolver::with_cap(&f, r + c);
            let mut sff = ProtocolSolver::with_cap(&ff, r * r + c * c);
            let (l_f, c_f) = (sf.size(&f.full_rect())? as usize, sf.depth(&f.full_rect())? as usize);
            let (l_ff, c_ff) = (sff.size(&ff.full_rect())? as usize, sff.depth(&ff.full_rect())? as usize);
            Ok(ExploreRow {
                rows: r,
                cols: c,
                table,
                l_f,
                l_ff,
                c_f,
                c_ff,
                log_gap: (l_ff as f64).log2() - (l_f as f64).log2(),
                c_gap: c_ff as i64 - c_f as i64,
            })
        })
        .collect()
}

/// Whether both projections of `r` are monochromatic in their factors.
pub fn projections_are_mono(product: &Problem, r: &Rect, s: &Problem, t: &Problem) -> Result<bool> {
    let (rs, rt) = (product.project_s(r)?, product.project_t(r)?);
    Ok(s.is_mono(&rs) && t.is_mono(&rt))
}
