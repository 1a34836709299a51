//! Communication problems, rectangles and cell sets.
//!
//! A problem is a relation `S ⊆ (X×Y)×Z` stored as one color mask per cell
//! (bit `z` set iff `(x,y,z) ∈ S`). Rows, columns and colors are each capped
//! at 64 so that every side of a rectangle fits in a `u64`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::{self, ones};
use crate::error::{cap, Error, Result};

pub const MAX_SIDE: usize = 64;
pub const MAX_COLORS: usize = 64;

/// A combinatorial rectangle `rows × cols`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "RectJson", into = "RectJson")]
pub struct Rect {
    pub rows: u64,
    pub cols: u64,
}

#[derive(Serialize, Deserialize)]
struct RectJson {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl From<RectJson> for Rect {
    fn from(r: RectJson) -> Self {
        Rect {
            rows: bits::from_indices(r.rows.into_iter().filter(|&i| i < 64)),
            cols: bits::from_indices(r.cols.into_iter().filter(|&i| i < 64)),
        }
    }
}

impl From<Rect> for RectJson {
    fn from(r: Rect) -> Self {
        RectJson { rows: ones(r.rows).collect(), cols: ones(r.cols).collect() }
    }
}

impl Rect {
    pub fn new(rows: u64, cols: u64) -> Self {
        Rect { rows, cols }
    }

    pub fn from_lists(rows: &[usize], cols: &[usize]) -> Self {
        Rect::new(bits::from_indices(rows.iter().copied()), bits::from_indices(cols.iter().copied()))
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.rows >> x & 1 == 1 && self.cols >> y & 1 == 1
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.rows & !self.rows == 0 && other.cols & !self.cols == 0
    }

    pub fn intersect(&self, other: &Rect) -> Rect {
        Rect::new(self.rows & other.rows, self.cols & other.cols)
    }

    pub fn area(&self) -> usize {
        (self.rows.count_ones() * self.cols.count_ones()) as usize
    }

    pub fn lex_cmp(&self, other: &Rect) -> std::cmp::Ordering {
        bits::lex_cmp(self.rows, other.rows).then_with(|| bits::lex_cmp(self.cols, other.cols))
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |m: u64| ones(m).map(|i| i.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{{{}}}x{{{}}}", list(self.rows), list(self.cols))
    }
}

/// A rectangle tagged with the color it is monochromatic for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColoredRect {
    pub color: usize,
    #[serde(flatten)]
    pub rect: Rect,
}

impl ColoredRect {
    pub fn new(rect: Rect, color: usize) -> Self {
        ColoredRect { color, rect }
    }
}

/// An ordered list of `(rectangle, color)` entries.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColoredCover(pub Vec<ColoredRect>);

impl ColoredCover {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ColoredRect> {
        self.0.iter()
    }
}

/// A subset of `X×Y`, row-major (`x·ny + y`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CellSet {
    words: Vec<u64>,
}

impl CellSet {
    pub fn empty(ncells: usize) -> Self {
        CellSet { words: vec![0; ncells.div_ceil(64).max(1)] }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(ncells: usize, it: I) -> Self {
        let mut s = Self::empty(ncells);
        for i in it {
            s.insert(i);
        }
        s
    }

    /// Cells given as `(x, y)` pairs, validated against `p`'s domain.
    pub fn from_pairs(p: &Problem, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut s = Self::empty(p.ncells());
        for &(x, y) in pairs {
            if x >= p.nx() || y >= p.ny() {
                return Err(Error::InvalidCell { x, y, nx: p.nx(), ny: p.ny() });
            }
            s.insert(p.cell(x, y));
        }
        Ok(s)
    }

    pub fn insert(&mut self, i: usize) {
        let w = i / 64;
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        if let Some(w) = self.words.get_mut(i / 64) {
            *w &= !(1 << (i % 64));
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words.get(i / 64).is_some_and(|w| w >> (i % 64) & 1 == 1)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &m)| ones(m).map(move |i| w * 64 + i))
    }

    pub fn union(&self, other: &CellSet) -> CellSet {
        let n = self.words.len().max(other.words.len());
        let words = (0..n)
            .map(|i| self.words.get(i).copied().unwrap_or(0) | other.words.get(i).copied().unwrap_or(0))
            .collect();
        CellSet { words }
    }

    pub fn is_subset(&self, other: &CellSet) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, &w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn pairs(&self, p: &Problem) -> Vec<(usize, usize)> {
        self.iter().map(|i| p.coords(i)).collect()
    }

    pub fn lex_cmp(&self, other: &CellSet) -> std::cmp::Ordering {
        bits::lex_cmp_words(&self.words, &other.words)
    }

    /// Canonical width for equality: trailing zero words dropped.
    pub fn normalized(mut self) -> Self {
        while self.words.len() > 1 && *self.words.last().unwrap() == 0 {
            self.words.pop();
        }
        self
    }

    pub fn to_json(&self, p: &Problem) -> CellSetJson {
        CellSetJson { cells: self.pairs(p).into_iter().map(|(x, y)| [x, y]).collect() }
    }
}

/// `{"cells": [[x, y], ...]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellSetJson {
    pub cells: Vec<[usize; 2]>,
}

impl CellSetJson {
    pub fn resolve(&self, p: &Problem) -> Result<CellSet> {
        let pairs: Vec<(usize, usize)> = self.cells.iter().map(|c| (c[0], c[1])).collect();
        CellSet::from_pairs(p, &pairs)
    }
}

/// Factor dimensions kept on a product problem so rectangles can be projected.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProductShape {
    pub s: (usize, usize, usize),
    pub t: (usize, usize, usize),
}

#[derive(Clone, Debug)]
pub struct Problem {
    name: String,
    nx: usize,
    ny: usize,
    nz: usize,
    colors: Vec<u64>,
    // support[z * nx + x] = columns y with (x, y, z) accepted
    support: Vec<u64>,
    shape: Option<ProductShape>,
}

impl PartialEq for Problem {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.nx == other.nx
            && self.ny == other.ny
            && self.nz == other.nz
            && self.colors == other.colors
    }
}

impl Eq for Problem {}

impl Problem {
    /// Builds a relation from per-cell color masks (row-major).
    pub fn from_masks(name: impl Into<String>, nx: usize, ny: usize, nz: usize, colors: Vec<u64>) -> Result<Self> {
        if nx == 0 || ny == 0 || nz == 0 {
            return Err(Error::InvalidShape(format!("dimensions must be positive, got {nx}x{ny} with {nz} colors")));
        }
        cap("rows", nx, MAX_SIDE)?;
        cap("cols", ny, MAX_SIDE)?;
        cap("colors", nz, MAX_COLORS)?;
        if colors.len() != nx * ny {
            return Err(Error::InvalidShape(format!("expected {} cells, got {}", nx * ny, colors.len())));
        }
        let allowed = bits::full(nz);
        if let Some(i) = colors.iter().position(|&m| m & !allowed != 0) {
            let bad = (colors[i] & !allowed).trailing_zeros() as usize;
            return Err(Error::InvalidColor { x: i / ny, y: i % ny, color: bad, nz });
        }
        let mut support = vec![0u64; nz * nx];
        for x in 0..nx {
            for y in 0..ny {
                for z in ones(colors[x * ny + y]) {
                    support[z * nx + x] |= 1 << y;
                }
            }
        }
        Ok(Problem { name: name.into(), nx, ny, nz, colors, support, shape: None })
    }

    /// A function given by its table: `accept(x,y,z) ⇔ grid[x][y] = z`.
    pub fn function(name: impl Into<String>, grid: &[Vec<usize>], nz: usize) -> Result<Self> {
        let nx = grid.len();
        let ny = grid.first().map_or(0, |r| r.len());
        if grid.iter().any(|r| r.len() != ny) {
            return Err(Error::InvalidShape("table rows have different lengths".into()));
        }
        let mut colors = Vec::with_capacity(nx * ny);
        for (x, row) in grid.iter().enumerate() {
            for (y, &z) in row.iter().enumerate() {
                if z >= nz || z >= MAX_COLORS {
                    return Err(Error::InvalidColor { x, y, color: z, nz });
                }
                colors.push(1u64 << z);
            }
        }
        Self::from_masks(name, nx, ny, nz, colors)
    }

    /// A relation given by its accepted triples.
    pub fn relation(name: impl Into<String>, nx: usize, ny: usize, nz: usize, accept: &[[usize; 3]]) -> Result<Self> {
        let mut colors = vec![0u64; nx * ny];
        for &[x, y, z] in accept {
            if x >= nx || y >= ny {
                return Err(Error::InvalidCell { x, y, nx, ny });
            }
            if z >= nz || z >= MAX_COLORS {
                return Err(Error::InvalidColor { x, y, color: z, nz });
            }
            colors[x * ny + y] |= 1 << z;
        }
        Self::from_masks(name, nx, ny, nz, colors)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn nz(&self) -> usize {
        self.nz
    }

    pub fn ncells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn cell(&self, x: usize, y: usize) -> usize {
        x * self.ny + y
    }

    pub fn coords(&self, i: usize) -> (usize, usize) {
        (i / self.ny, i % self.ny)
    }

    pub fn shape(&self) -> Option<ProductShape> {
        self.shape
    }

    /// Valid colors of one cell as a mask.
    pub fn colors_at(&self, x: usize, y: usize) -> u64 {
        self.colors[x * self.ny + y]
    }

    pub fn accepts(&self, x: usize, y: usize, z: usize) -> bool {
        z < self.nz && self.colors_at(x, y) >> z & 1 == 1
    }

    /// Columns `y` with `(x, y, z)` accepted.
    pub fn support(&self, z: usize, x: usize) -> u64 {
        self.support[z * self.nx + x]
    }

    pub fn first_uncolorable(&self) -> Option<(usize, usize)> {
        self.colors.iter().position(|&m| m == 0).map(|i| self.coords(i))
    }

    pub fn is_total(&self) -> bool {
        self.first_uncolorable().is_none()
    }

    pub fn require_total(&self) -> Result<()> {
        match self.first_uncolorable() {
            Some((x, y)) => Err(Error::NotTotal { x, y }),
            None => Ok(()),
        }
    }

    pub fn is_function(&self) -> bool {
        self.colors.iter().all(|m| m.count_ones() == 1)
    }

    pub fn full_rect(&self) -> Rect {
        Rect::new(bits::full(self.nx), bits::full(self.ny))
    }

    pub fn full_cells(&self) -> CellSet {
        CellSet::from_indices(self.ncells(), 0..self.ncells())
    }

    pub fn cells_of(&self, r: &Rect) -> CellSet {
        let mut s = CellSet::empty(self.ncells());
        for x in ones(r.rows) {
            for y in ones(r.cols) {
                s.insert(self.cell(x, y));
            }
        }
        s
    }

    fn in_domain(&self, r: &Rect) -> bool {
        r.rows & !bits::full(self.nx) == 0 && r.cols & !bits::full(self.ny) == 0
    }

    /// Colors valid on every cell of `r`, as a mask; empty iff `r` is not
    /// monochromatic.
    pub fn valid_colors(&self, r: &Rect) -> Result<u64> {
        if r.is_empty() {
            return Err(Error::EmptyRect);
        }
        if !self.in_domain(r) {
            return Err(Error::InvalidShape(format!("rectangle {r} exceeds the {}x{} domain", self.nx, self.ny)));
        }
        Ok(self.valid_colors_unchecked(r))
    }

    pub(crate) fn valid_colors_unchecked(&self, r: &Rect) -> u64 {
        let mut out = 0;
        for z in 0..self.nz {
            if ones(r.rows).all(|x| r.cols & !self.support(z, x) == 0) {
                out |= 1 << z;
            }
        }
        out
    }

    /// Lowest valid color of a nonempty rectangle, if any.
    pub fn mono_color(&self, r: &Rect) -> Option<usize> {
        let m = self.valid_colors_unchecked(r);
        (m != 0).then(|| m.trailing_zeros() as usize)
    }

    pub fn is_mono(&self, r: &Rect) -> bool {
        !r.is_empty() && self.valid_colors_unchecked(r) != 0
    }

    pub fn is_mono_with(&self, r: &Rect, z: usize) -> bool {
        z < self.nz && ones(r.rows).all(|x| r.cols & !self.support(z, x) == 0)
    }

    /// First cell of `r` without a valid color.
    pub fn uncolorable_in(&self, r: &Rect) -> Option<(usize, usize)> {
        ones(r.rows).flat_map(|x| ones(r.cols).map(move |y| (x, y))).find(|&(x, y)| self.colors_at(x, y) == 0)
    }

    /// The direct-sum product `S×T`.
    ///
    /// Row `(a,p)` is `a·nx_T + p`, column `(b,q)` is `b·ny_T + q` and color
    /// `(o,z)` is `o·nz_T + z`.
    pub fn product(s: &Problem, t: &Problem) -> Result<Problem> {
        cap("product rows", s.nx * t.nx, MAX_SIDE)?;
        cap("product cols", s.ny * t.ny, MAX_SIDE)?;
        cap("product colors", s.nz * t.nz, MAX_COLORS)?;
        let (nx, ny, nz) = (s.nx * t.nx, s.ny * t.ny, s.nz * t.nz);
        let mut colors = vec![0u64; nx * ny];
        for a in 0..s.nx {
            for p in 0..t.nx {
                for b in 0..s.ny {
                    for q in 0..t.ny {
                        let mut m = 0u64;
                        for o in ones(s.colors_at(a, b)) {
                            for z in ones(t.colors_at(p, q)) {
                                m |= 1 << (o * t.nz + z);
                            }
                        }
                        colors[(a * t.nx + p) * ny + (b * t.ny + q)] = m;
                    }
                }
            }
        }
        let mut out = Problem::from_masks(format!("{}x{}", s.name, t.name), nx, ny, nz, colors)?;
        out.shape = Some(ProductShape { s: (s.nx, s.ny, s.nz), t: (t.nx, t.ny, t.nz) });
        Ok(out)
    }

    /// `R|_S`: all `(a,b)` with some `((a,p),(b,q)) ∈ R`.
    pub fn project_s(&self, r: &Rect) -> Result<Rect> {
        let shape = self.shape.ok_or(Error::NotAProduct)?;
        let (tx, ty) = (shape.t.0, shape.t.1);
        Ok(Rect::new(
            bits::from_indices(ones(r.rows).map(|i| i / tx)),
            bits::from_indices(ones(r.cols).map(|j| j / ty)),
        ))
    }

    /// `R|_T`: all `(p,q)` with some `((a,p),(b,q)) ∈ R`.
    pub fn project_t(&self, r: &Rect) -> Result<Rect> {
        let shape = self.shape.ok_or(Error::NotAProduct)?;
        let (tx, ty) = (shape.t.0, shape.t.1);
        Ok(Rect::new(
            bits::from_indices(ones(r.rows).map(|i| i % tx)),
            bits::from_indices(ones(r.cols).map(|j| j % ty)),
        ))
    }

    /// The function table when every cell has exactly one valid color.
    pub fn table(&self) -> Option<Vec<Vec<usize>>> {
        self.is_function().then(|| {
            (0..self.nx)
                .map(|x| (0..self.ny).map(|y| self.colors_at(x, y).trailing_zeros() as usize).collect())
                .collect()
        })
    }
}

/// Problem file format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProblemJson {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub colors: usize,
    pub kind: ProblemKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accept: Option<Vec<[usize; 3]>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Function,
    Relation,
}

impl ProblemJson {
    pub fn into_problem(self) -> Result<Problem> {
        let p = match self.kind {
            ProblemKind::Function => {
                let table = self.table.ok_or_else(|| Error::InvalidShape("function without \"table\"".into()))?;
                if table.len() != self.rows || table.iter().any(|r| r.len() != self.cols) {
                    return Err(Error::InvalidShape(format!("table is not {}x{}", self.rows, self.cols)));
                }
                Problem::function(self.name, &table, self.colors)?
            }
            ProblemKind::Relation => {
                let accept = self.accept.ok_or_else(|| Error::InvalidShape("relation without \"accept\"".into()))?;
                Problem::relation(self.name, self.rows, self.cols, self.colors, &accept)?
            }
        };
        Ok(p)
    }
}

impl From<&Problem> for ProblemJson {
    fn from(p: &Problem) -> Self {
        let table = p.table();
        let accept = table.is_none().then(|| {
            let mut v = Vec::new();
            for x in 0..p.nx {
                for y in 0..p.ny {
                    for z in ones(p.colors_at(x, y)) {
                        v.push([x, y, z]);
                    }
                }
            }
            v
        });
        ProblemJson {
            name: p.name.clone(),
            rows: p.nx,
            cols: p.ny,
            colors: p.nz,
            kind: if table.is_some() { ProblemKind::Function } else { ProblemKind::Relation },
            table,
            accept,
        }
    }
}

impl Serialize for Problem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ProblemJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Problem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        ProblemJson::deserialize(d)?.into_problem().map_err(serde::de::Error::custom)
    }
}
