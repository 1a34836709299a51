//! Bundled named problems.

use crate::problem::Problem;

pub const NAMES: [&str; 5] = ["EQ1", "EQ2", "AND2", "GT2", "CONST"];

fn table(n: usize, m: usize, f: impl Fn(usize, usize) -> usize) -> Vec<Vec<usize>> {
    (0..n).map(|x| (0..m).map(|y| f(x, y)).collect()).collect()
}

/// Looks up a bundled problem by name (case-insensitive).
pub fn named(name: &str) -> Option<Problem> {
    let up = name.to_ascii_uppercase();
    let (t, nz) = match up.as_str() {
        "EQ1" => (table(2, 2, |x, y| (x == y) as usize), 2),
        "EQ2" => (table(4, 4, |x, y| (x == y) as usize), 2),
        "AND2" => (table(2, 2, |x, y| x & y), 2),
        "GT2" => (table(4, 4, |x, y| (x > y) as usize), 2),
        "CONST" => (table(4, 4, |_, _| 0), 1),
        _ => return None,
    };
    Some(Problem::function(&up, &t, nz).expect("bundled tables are valid"))
}

pub fn all() -> Vec<Problem> {
    NAMES.iter().filter_map(|n| named(n)).collect()
}

/// Every total function `2×2 → {0,1}`, named by its row-major bits.
pub fn boolean_2x2() -> Vec<Problem> {
    (0..16usize)
        .map(|code| {
            let t = table(2, 2, |x, y| code >> (2 * x + y) & 1);
            Problem::function(format!("F{code:04b}"), &t, 2).unwrap()
        })
        .collect()
}
