//! Maximal monochromatic rectangles.
//!
//! For each color the rectangles are the closed pairs of the boolean matrix
//! `M_z(x,y) = accept(x,y,z)`: every nonempty row subset `A` gives
//! `cols(A) = ⋂_{x∈A} support_z(x)` and the closure `rows(cols(A))`.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{self, ones};
use crate::error::{cap, Error, Result};
use crate::problem::{CellSet, ColoredRect, Problem, Rect};

pub const DEFAULT_ENUM_ROWS: usize = 16;

/// Every maximal monochromatic rectangle of a problem, ordered by color and
/// then lexicographically by rows and columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MonoRectIndex {
    rects: Vec<ColoredRect>,
}

impl MonoRectIndex {
    pub fn rects(&self) -> &[ColoredRect] {
        &self.rects
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    pub fn of_color(&self, z: usize) -> impl Iterator<Item = &ColoredRect> {
        self.rects.iter().filter(move |r| r.color == z)
    }

    /// `max |R ∩ cells|` over indexed rectangles; the witness is the first
    /// maximum in index order.
    pub fn max_overlap(&self, p: &Problem, cells: &CellSet) -> Result<(usize, ColoredRect)> {
        if cells.is_empty() {
            return Err(Error::EmptyCellSet);
        }
        let pairs = cells.pairs(p);
        let mut best: Option<(usize, ColoredRect)> = None;
        for r in &self.rects {
            let n = pairs.iter().filter(|&&(x, y)| r.rect.contains(x, y)).count();
            if n > 0 && best.is_none_or(|(b, _)| n > b) {
                best = Some((n, *r));
            }
        }
        best.ok_or_else(|| {
            let (x, y) = pairs[0];
            Error::Uncoverable { x, y }
        })
    }
}

pub fn rect_order(a: &ColoredRect, b: &ColoredRect) -> Ordering {
    a.color.cmp(&b.color).then_with(|| a.rect.lex_cmp(&b.rect))
}

pub fn enumerate_maximal(p: &Problem) -> Result<MonoRectIndex> {
    enumerate_maximal_capped(p, DEFAULT_ENUM_ROWS)
}

pub fn enumerate_maximal_capped(p: &Problem, max_rows: usize) -> Result<MonoRectIndex> {
    cap("rows for rectangle enumeration", p.nx(), max_rows.min(30))?;
    let nx = p.nx();
    let mut rects: Vec<ColoredRect> = (0..p.nz())
        .flat_map(|z| {
            let supports: Vec<u64> = (0..nx).map(|x| p.support(z, x)).collect();
            let mut found: Vec<ColoredRect> = (1u64..1 << nx)
                .into_par_iter()
                .filter_map(|a| {
                    let cols = ones(a).fold(u64::MAX, |c, x| c & supports[x]);
                    if cols == 0 {
                        return None;
                    }
                    let rows = bits::from_indices((0..nx).filter(|&x| cols & !supports[x] == 0));
                    // keep only the canonical generator so each pair appears once
                    (rows == a).then_some(ColoredRect::new(Rect::new(rows, cols), z))
                })
                .collect();
            found.retain(|r| is_maximal(&supports, r.rect));
            found
        })
        .collect();
    rects.sort_by(rect_order);
    rects.dedup();
    Ok(MonoRectIndex { rects })
}

fn is_maximal(supports: &[u64], r: Rect) -> bool {
    let cols = ones(r.rows).fold(u64::MAX, |c, x| c & supports[x]);
    let rows = (0..supports.len()).filter(|&x| r.cols & !supports[x] == 0).fold(0u64, |m, x| m | 1 << x);
    cols == r.cols && rows == r.rows
}
