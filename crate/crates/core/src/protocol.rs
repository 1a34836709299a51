//! Protocol trees, exact protocol size `L` and communication depth `C`.
//!
//! Both are memoized recursions over sub-rectangles. A node splits one
//! side into two nonempty parts; the part holding the lowest element is
//! always child 0, which halves the bipartitions to try.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::{self, ones};
use crate::error::{cap, Error, Result};
use crate::problem::{Problem, Rect};

pub const DEFAULT_SIDES_CAP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Owner {
    #[serde(rename = "A")]
    Alice,
    #[serde(rename = "B")]
    Bob,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProtocolTree {
    Internal {
        owner: Owner,
        #[serde(flatten)]
        rect: Rect,
        children: Box<[ProtocolTree; 2]>,
    },
    Leaf {
        color: usize,
        #[serde(flatten)]
        rect: Rect,
    },
}

impl ProtocolTree {
    pub fn leaf(rect: Rect, color: usize) -> Self {
        ProtocolTree::Leaf { color, rect }
    }

    pub fn split(owner: Owner, rect: Rect, c0: ProtocolTree, c1: ProtocolTree) -> Self {
        ProtocolTree::Internal { owner, rect, children: Box::new([c0, c1]) }
    }

    pub fn rect(&self) -> Rect {
        match self {
            ProtocolTree::Internal { rect, .. } | ProtocolTree::Leaf { rect, .. } => *rect,
        }
    }

    pub fn children(&self) -> Option<&[ProtocolTree; 2]> {
        match self {
            ProtocolTree::Internal { children, .. } => Some(children),
            ProtocolTree::Leaf { .. } => None,
        }
    }

    pub fn leaves(&self) -> usize {
        match self.children() {
            Some([a, b]) => a.leaves() + b.leaves(),
            None => 1,
        }
    }

    /// Longest root-to-leaf path, in edges.
    pub fn depth(&self) -> usize {
        match self.children() {
            Some([a, b]) => 1 + a.depth().max(b.depth()),
            None => 0,
        }
    }

    /// Preorder traversal.
    pub fn nodes(&self) -> Vec<&ProtocolTree> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            out.push(n);
            if let Some([a, b]) = n.children() {
                stack.push(b);
                stack.push(a);
            }
        }
        out
    }

    pub fn leaf_nodes(&self) -> Vec<&ProtocolTree> {
        self.nodes().into_iter().filter(|n| n.children().is_none()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    Leaf(usize),
    Rows(u64),
    Cols(u64),
}

/// Memoized solver for one problem. Size and depth memos are separate.
pub struct ProtocolSolver<'a> {
    p: &'a Problem,
    cap: usize,
    size_memo: HashMap<(u64, u64), (u32, Step)>,
    depth_memo: HashMap<(u64, u64), (u32, Step)>,
}

impl<'a> ProtocolSolver<'a> {
    pub fn new(p: &'a Problem) -> Self {
        Self::with_cap(p, DEFAULT_SIDES_CAP)
    }

    /// `cap` bounds `|rows| + |cols|` of any queried rectangle.
    pub fn with_cap(p: &'a Problem, cap: usize) -> Self {
        ProtocolSolver { p, cap, size_memo: HashMap::new(), depth_memo: HashMap::new() }
    }

    pub fn problem(&self) -> &Problem {
        self.p
    }

    fn check(&self, r: &Rect) -> Result<()> {
        if r.is_empty() {
            return Err(Error::EmptyRect);
        }
        if r.rows & !bits::full(self.p.nx()) != 0 || r.cols & !bits::full(self.p.ny()) != 0 {
            return Err(Error::InvalidShape(format!("rectangle {r} exceeds the domain")));
        }
        cap("rows+cols of protocol rectangle", (r.rows.count_ones() + r.cols.count_ones()) as usize, self.cap)?;
        match self.p.uncolorable_in(r) {
            Some((x, y)) => Err(Error::NoProtocol { x, y }),
            None => Ok(()),
        }
    }

    /// `L(r)`; zero for the empty rectangle.
    pub fn size(&mut self, r: &Rect) -> Result<u32> {
        if r.is_empty() {
            return Ok(0);
        }
        self.check(r)?;
        Ok(self.size_rec(r.rows, r.cols))
    }

    pub fn depth(&mut self, r: &Rect) -> Result<u32> {
        self.check(r)?;
        Ok(self.depth_rec(r.rows, r.cols))
    }

    pub fn size_tree(&mut self, r: &Rect) -> Result<ProtocolTree> {
        self.size(r)?;
        Ok(self.build(r.rows, r.cols, true))
    }

    pub fn depth_tree(&mut self, r: &Rect) -> Result<ProtocolTree> {
        self.depth(r)?;
        Ok(self.build(r.rows, r.cols, false))
    }

    fn size_rec(&mut self, rows: u64, cols: u64) -> u32 {
        if let Some(&(v, _)) = self.size_memo.get(&(rows, cols)) {
            return v;
        }
        let rect = Rect::new(rows, cols);
        let (v, step) = if let Some(z) = self.p.mono_color(&rect) {
            (1, Step::Leaf(z))
        } else {
            let mut best = (u32::MAX, Step::Leaf(0));
            'outer: for (side, set) in [(0, rows), (1, cols)] {
                for part in bits::bipartitions(set) {
                    let (r0, r1) = if side == 0 {
                        ((part, cols), (set & !part, cols))
                    } else {
                        ((rows, part), (rows, set & !part))
                    };
                    let a = self.size_rec(r0.0, r0.1);
                    if a + 1 >= best.0 {
                        continue;
                    }
                    let total = a + self.size_rec(r1.0, r1.1);
                    if total < best.0 {
                        best = (total, if side == 0 { Step::Rows(part) } else { Step::Cols(part) });
                        if total == 2 {
                            break 'outer;
                        }
                    }
                }
            }
            best
        };
        self.size_memo.insert((rows, cols), (v, step));
        v
    }

    fn depth_rec(&mut self, rows: u64, cols: u64) -> u32 {
        if let Some(&(v, _)) = self.depth_memo.get(&(rows, cols)) {
            return v;
        }
        let rect = Rect::new(rows, cols);
        let (v, step) = if let Some(z) = self.p.mono_color(&rect) {
            (0, Step::Leaf(z))
        } else {
            let mut best = (u32::MAX, Step::Leaf(0));
            'outer: for (side, set) in [(0, rows), (1, cols)] {
                for part in bits::bipartitions(set) {
                    let (r0, r1) = if side == 0 {
                        ((part, cols), (set & !part, cols))
                    } else {
                        ((rows, part), (rows, set & !part))
                    };
                    let a = self.depth_rec(r0.0, r0.1);
                    if a + 1 >= best.0 {
                        continue;
                    }
                    let d = 1 + a.max(self.depth_rec(r1.0, r1.1));
                    if d < best.0 {
                        best = (d, if side == 0 { Step::Rows(part) } else { Step::Cols(part) });
                        if d == 1 {
                            break 'outer;
                        }
                    }
                }
            }
            best
        };
        self.depth_memo.insert((rows, cols), (v, step));
        v
    }

    fn build(&mut self, rows: u64, cols: u64, size: bool) -> ProtocolTree {
        let memo = if size { &self.size_memo } else { &self.depth_memo };
        let step = memo[&(rows, cols)].1;
        let rect = Rect::new(rows, cols);
        match step {
            Step::Leaf(z) => ProtocolTree::leaf(rect, z),
            Step::Rows(part) => {
                let c0 = self.child(part, cols, size);
                let c1 = self.child(rows & !part, cols, size);
                ProtocolTree::split(Owner::Alice, rect, c0, c1)
            }
            Step::Cols(part) => {
                let c0 = self.child(rows, part, size);
                let c1 = self.child(rows, cols & !part, size);
                ProtocolTree::split(Owner::Bob, rect, c0, c1)
            }
        }
    }

    fn child(&mut self, rows: u64, cols: u64, size: bool) -> ProtocolTree {
        // children are memoized unless pruning skipped them for a losing split
        if size {
            self.size_rec(rows, cols);
        } else {
            self.depth_rec(rows, cols);
        }
        self.build(rows, cols, size)
    }
}

pub fn protocol_size(p: &Problem, r: &Rect) -> Result<usize> {
    ProtocolSolver::new(p).size(r).map(|v| v as usize)
}

pub fn comm_depth(p: &Problem, r: &Rect) -> Result<usize> {
    ProtocolSolver::new(p).depth(r).map(|v| v as usize)
}

/// Optimal size and depth of a whole problem, each with a witness tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SizeDepthResult {
    pub size: usize,
    pub depth: usize,
    pub size_witness: ProtocolTree,
    pub depth_witness: ProtocolTree,
}

pub fn solve_protocol(p: &Problem, cap: usize) -> Result<SizeDepthResult> {
    let mut s = ProtocolSolver::with_cap(p, cap);
    let full = p.full_rect();
    let size_witness = s.size_tree(&full)?;
    let depth_witness = s.depth_tree(&full)?;
    Ok(SizeDepthResult { size: size_witness.leaves(), depth: depth_witness.depth(), size_witness, depth_witness })
}

/// The protocol that halves rows down to singletons, then columns.
/// Every cell must be colorable.
pub fn cellwise_protocol(p: &Problem, r: &Rect) -> Result<ProtocolTree> {
    if r.is_empty() {
        return Err(Error::EmptyRect);
    }
    if let Some((x, y)) = p.uncolorable_in(r) {
        return Err(Error::NoProtocol { x, y });
    }
    fn halve(set: u64) -> (u64, u64) {
        let k = set.count_ones() / 2;
        let low = ones(set).take(k as usize).fold(0u64, |m, i| m | 1 << i);
        (low, set & !low)
    }
    fn go(p: &Problem, r: Rect) -> ProtocolTree {
        if r.rows.count_ones() > 1 {
            let (a, b) = halve(r.rows);
            ProtocolTree::split(Owner::Alice, r, go(p, Rect::new(a, r.cols)), go(p, Rect::new(b, r.cols)))
        } else if r.cols.count_ones() > 1 {
            let (a, b) = halve(r.cols);
            ProtocolTree::split(Owner::Bob, r, go(p, Rect::new(r.rows, a)), go(p, Rect::new(r.rows, b)))
        } else {
            ProtocolTree::leaf(r, p.mono_color(&r).unwrap())
        }
    }
    Ok(go(p, *r))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProtocolViolation {
    RootNotDomain { expected: Rect, found: Rect },
    EmptyNode { path: String },
    NotAPartition { path: String },
    LeafNotMonochromatic { path: String, color: usize },
}

impl fmt::Display for ProtocolViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProtocolViolation::RootNotDomain { expected, found } => {
                write!(f, "root rectangle {found} is not the domain {expected}")
            }
            ProtocolViolation::EmptyNode { path } => write!(f, "node {path} has an empty rectangle"),
            ProtocolViolation::NotAPartition { path } => {
                write!(f, "children of node {path} do not partition the owner's side")
            }
            ProtocolViolation::LeafNotMonochromatic { path, color } => {
                write!(f, "leaf {path} is not monochromatic with color {color}")
            }
        }
    }
}

/// Checks the tree is a protocol for the whole problem.
pub fn verify_protocol(p: &Problem, t: &ProtocolTree) -> Result<(), ProtocolViolation> {
    verify_protocol_on(p, t, &p.full_rect())
}

/// Checks the tree is a protocol for `p` restricted to `root`.
pub fn verify_protocol_on(p: &Problem, t: &ProtocolTree, root: &Rect) -> Result<(), ProtocolViolation> {
    if t.rect() != *root {
        return Err(ProtocolViolation::RootNotDomain { expected: *root, found: t.rect() });
    }
    let mut stack = vec![(t, String::from("root"))];
    while let Some((node, path)) = stack.pop() {
        let r = node.rect();
        if r.is_empty() {
            return Err(ProtocolViolation::EmptyNode { path });
        }
        match node {
            ProtocolTree::Leaf { color, .. } => {
                if !p.is_mono_with(&r, *color) {
                    return Err(ProtocolViolation::LeafNotMonochromatic { path, color: *color });
                }
            }
            ProtocolTree::Internal { owner, children, .. } => {
                let (a, b) = (children[0].rect(), children[1].rect());
                let ok = match owner {
                    Owner::Alice => {
                        a.cols == r.cols && b.cols == r.cols && a.rows & b.rows == 0 && a.rows | b.rows == r.rows
                    }
                    Owner::Bob => {
                        a.rows == r.rows && b.rows == r.rows && a.cols & b.cols == 0 && a.cols | b.cols == r.cols
                    }
                };
                if !ok {
                    return Err(ProtocolViolation::NotAPartition { path });
                }
                stack.push((&children[1], format!("{path}.1")));
                stack.push((&children[0], format!("{path}.0")));
            }
        }
    }
    Ok(())
}
