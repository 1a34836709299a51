//! Small helpers over `u64` / `u128` masks used as finite sets.

use std::cmp::Ordering;

/// Iterates the set bits of `mask` in ascending order.
pub fn ones(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

pub fn ones128(mut mask: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> u64 {
    it.into_iter().fold(0, |m, i| m | (1u64 << i))
}

pub fn full(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Lexicographic order of the sorted element lists of two sets:
/// `{0} < {0,1} < {0,2} < {1}`.
pub fn lex_cmp(a: u64, b: u64) -> Ordering {
    let (mut a, mut b) = (a, b);
    loop {
        match (a == 0, b == 0) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let (x, y) = (a.trailing_zeros(), b.trailing_zeros());
        if x != y {
            return x.cmp(&y);
        }
        a &= a - 1;
        b &= b - 1;
    }
}

/// Same order as [`lex_cmp`] over multi-word sets.
pub fn lex_cmp_words(a: &[u64], b: &[u64]) -> Ordering {
    let mut ia = a.iter().enumerate().flat_map(|(w, &m)| ones(m).map(move |i| w * 64 + i));
    let mut ib = b.iter().enumerate().flat_map(|(w, &m)| ones(m).map(move |i| w * 64 + i));
    loop {
        match (ia.next(), ib.next()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) if x != y => return x.cmp(&y),
            _ => {}
        }
    }
}

/// All nonempty subsets of `base`, ordered by size ascending and then
/// lexicographically. Materialized; callers cap `base` at 2^16-ish.
pub fn subsets_by_size(base: u64) -> Vec<u64> {
    let elems: Vec<usize> = ones(base).collect();
    let n = elems.len();
    let mut out = Vec::with_capacity((1usize << n).saturating_sub(1));
    for k in 1..=n {
        combinations(n, k, |idx| out.push(idx.iter().fold(0u64, |m, &i| m | (1u64 << elems[i]))));
    }
    out
}

/// Visits the k-combinations of 0..n in lexicographic order.
fn combinations(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Proper nonempty bipartitions of `set` with the lowest element pinned
/// into the first part. Yields the first part.
pub fn bipartitions(set: u64) -> impl Iterator<Item = u64> {
    let low = set & set.wrapping_neg();
    let rest = set & !low;
    // submasks of `rest` other than `rest` itself, ascending
    let mut sub: u64 = 0;
    let mut done = rest == 0;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let cur = sub;
        sub = (sub.wrapping_sub(rest)) & rest;
        if sub == rest || sub == 0 {
            done = true;
        }
        Some(low | cur)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lex_order_matches_sorted_lists() {
        let sets = [0b1u64, 0b11, 0b101, 0b10, 0b110, 0b100];
        let mut sorted = sets.to_vec();
        sorted.sort_by(|&a, &b| lex_cmp(a, b));
        assert_eq!(sorted, vec![0b1, 0b11, 0b101, 0b10, 0b110, 0b100]);
        assert_eq!(lex_cmp_words(&[0b1, 0], &[0b11, 0]), Ordering::Less);
        assert_eq!(lex_cmp_words(&[0, 1], &[0b10, 0]), Ordering::Greater);
    }

    #[test]
    fn subsets_are_size_then_lex() {
        let s = subsets_by_size(0b1011);
        assert_eq!(s, vec![0b1, 0b10, 0b1000, 0b11, 0b1001, 0b1010, 0b1011]);
        assert_eq!(subsets_by_size(full(10)).len(), 1023);
        assert!(subsets_by_size(0).is_empty());
    }

    #[test]
    fn bipartitions_pin_lowest() {
        let parts: Vec<u64> = bipartitions(0b1101).collect();
        assert_eq!(parts, vec![0b0001, 0b0101, 0b1001]);
        assert_eq!(bipartitions(0b100).count(), 0);
        assert_eq!(bipartitions(full(5)).count(), 15);
        for p in bipartitions(0b11110) {
            assert!(p & 0b10 != 0 && p != 0b11110 && p & !0b11110 == 0);
        }
    }
}
