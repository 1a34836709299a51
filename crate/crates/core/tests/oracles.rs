mod oracle;

use num_rational::Ratio;
use oracle::*;
use rectlab_core::direct_sum::PhiEvaluator;
use rectlab_core::protocol::cellwise_protocol;
use rectlab_core::rects::enumerate_maximal;
use rectlab_core::*;

fn mask_cells(p: &Problem, mask: u64) -> CellSet {
    CellSet::from_indices(p.ncells(), (0..p.ncells()).filter(|i| mask >> i & 1 == 1))
}

#[test]
fn cover_matches_oracle_on_every_subset_of_small_functions() {
    for (nx, ny) in [(1, 2), (2, 2), (2, 3)] {
        for p in all_functions(nx, ny, 2).chain(all_functions(nx, ny, 3).step_by(7)) {
            let table = CoverTable::new(&p);
            for mask in 1..=full_mask(&p) {
                let cells = mask_cells(&p, mask);
                let got = cover_number(&p, &cells).unwrap();
                assert_eq!(got.value, table.cov(mask) as usize, "{:?} mask {mask:b}", p.table());
                assert_eq!(verify_cover(&p, &cells, &got.witness), Ok(()));
            }
        }
    }
}

#[test]
fn cover_matches_oracle_on_random_4x4() {
    let mut r = rng(11);
    for _ in 0..40 {
        let nz = 2 + (rand::Rng::gen_range(&mut r, 0..2));
        let p = random_function(&mut r, 4, 4, nz);
        let table = CoverTable::new(&p);
        assert_eq!(cover_number(&p, &p.full_cells()).unwrap().value, table.cov(full_mask(&p)) as usize);
        let m = cover_measure(&p).unwrap();
        for mask in (1..=full_mask(&p)).step_by(97) {
            assert_eq!(m.cover(mask) as u8, table.cov(mask));
        }
    }
}

#[test]
fn cover_measure_recursion_beyond_tabulation() {
    // 5×5 identity: 25 cells, so the measure uses the memoized recursion
    let t: Vec<Vec<usize>> = (0..5).map(|x| (0..5).map(|y| (x == y) as usize).collect()).collect();
    let p = Problem::function("EQ", &t, 2).unwrap();
    let m = cover_measure(&p).unwrap();
    let mut r = rng(3);
    for _ in 0..40 {
        let mask: u64 = rand::Rng::gen_range(&mut r, 1..1u64 << 25);
        assert_eq!(m.cover(mask) as usize, cover_number(&p, &m.to_cells(25, mask)).unwrap().value);
    }
}

#[test]
fn protocol_matches_tree_enumeration() {
    for (nx, ny) in [(1, 1), (1, 3), (2, 2), (2, 3), (3, 2)] {
        for p in all_functions(nx, ny, 2).chain(all_functions(nx, ny, 3)) {
            let full = p.full_rect();
            let (l, c) = protocol_oracle(&p, full.rows, full.cols);
            let res = solve_protocol(&p, 16).unwrap();
            assert_eq!((res.size, res.depth), (l, c), "{:?}", p.table());
            assert_eq!(res.size_witness.leaves(), l);
            assert_eq!(res.depth_witness.depth(), c);
            assert_eq!(verify_protocol(&p, &res.size_witness), Ok(()));
            assert_eq!(verify_protocol(&p, &res.depth_witness), Ok(()));
        }
    }
}

#[test]
fn protocol_on_relations_matches_enumeration() {
    let mut r = rng(5);
    for _ in 0..200 {
        let (nx, ny) = (rand::Rng::gen_range(&mut r, 1..4), rand::Rng::gen_range(&mut r, 1..4));
        let colors: Vec<u64> = (0..nx * ny).map(|_| rand::Rng::gen_range(&mut r, 1u64..8)).collect();
        let p = Problem::from_masks("rel", nx, ny, 3, colors).unwrap();
        let full = p.full_rect();
        assert_eq!(
            (protocol_size(&p, &full).unwrap(), comm_depth(&p, &full).unwrap()),
            protocol_oracle(&p, full.rows, full.cols)
        );
        let table = CoverTable::new(&p);
        assert_eq!(cover_number(&p, &p.full_cells()).unwrap().value, table.cov(full_mask(&p)) as usize);
    }
}

#[test]
fn maximal_index_is_complete_and_maximal() {
    let mut r = rng(7);
    for _ in 0..100 {
        let p = random_function(&mut r, 3, 4, 2);
        let idx = enumerate_maximal(&p).unwrap();
        let all = all_mono_rects(&p);
        let maximal: Vec<_> = all
            .iter()
            .copied()
            .filter(|&(r1, c1, z)| {
                !all.iter().any(|&(r2, c2, z2)| z2 == z && (r2, c2) != (r1, c1) && r1 & !r2 == 0 && c1 & !c2 == 0)
            })
            .collect();
        let mut got: Vec<_> = idx.rects().iter().map(|cr| (cr.rect.rows, cr.rect.cols, cr.color)).collect();
        assert_eq!(got.len(), maximal.len());
        got.sort_unstable();
        let mut want = maximal.clone();
        want.sort_unstable();
        assert_eq!(got, want);
    }
}

#[test]
fn fooling_delta_matches_definition() {
    for p in all_functions(2, 2, 2).chain(all_functions(2, 3, 2).step_by(5)) {
        let table = CoverTable::new(&p);
        for lambda in 1..=full_mask(&p) {
            let cert = min_fooling_delta(&p, &mask_cells(&p, lambda)).unwrap();
            let d = delta_literal(&p, lambda);
            assert_eq!(cert.delta(), d);
            assert!(is_delta_fooling(&p, &mask_cells(&p, lambda), d).unwrap());
            if d > Ratio::new(1, lambda.count_ones() as i64) {
                let below = d - Ratio::new(1, lambda.count_ones() as i64);
                assert!(!is_delta_fooling(&p, &mask_cells(&p, lambda), below).unwrap());
            }
            assert!(cert.cov_lower_bound() <= table.cov(lambda) as usize);
        }
    }
}

#[test]
fn exhaustive_fooling_search_is_optimal() {
    let mut r = rng(9);
    for _ in 0..30 {
        let p = random_function(&mut r, 3, 3, 2);
        let best = search_fooling(&p, Strategy::Exhaustive, None).unwrap();
        let min = (1..=full_mask(&p)).map(|m| delta_literal(&p, m)).min().unwrap();
        assert_eq!(best.delta(), min);
        for s in [Strategy::Greedy, Strategy::Fortify] {
            let c = search_fooling(&p, s, None).unwrap();
            assert!(c.delta() >= min);
            assert_eq!(c.delta(), delta_literal(&p, c.lambda.iter().fold(0, |m, i| m | 1 << i)));
        }
    }
}

#[test]
fn named_values_from_oracles() {
    let eq1 = corpus::named("EQ1").unwrap();
    let and = corpus::named("AND2").unwrap();
    let konst = corpus::named("CONST").unwrap();
    for (p, want) in [(&eq1, (4, 4, 2)), (&and, (3, 3, 2)), (&konst, (1, 1, 0))] {
        let full = p.full_rect();
        let cov = CoverTable::new(p).cov(full_mask(p)) as usize;
        let (l, c) = protocol_oracle(p, full.rows, full.cols);
        assert_eq!((cov, l, c), want);
        let r = solve_protocol(p, 16).unwrap();
        assert_eq!((cover_number(p, &p.full_cells()).unwrap().value, r.size, r.depth), want);
    }
    let pr = Problem::product(&eq1, &eq1).unwrap();
    assert_eq!(CoverTable::new(&pr).cov(full_mask(&pr)), 16);
    let full = pr.full_rect();
    assert_eq!(protocol_oracle(&pr, full.rows, full.cols).0, 16);
    let diag = CellSet::from_pairs(&eq1, &[(0, 0), (1, 1)]).unwrap();
    let core = hardcore(&eq1, &eq1, &diag).unwrap();
    let core_mask = core.iter().fold(0u64, |m, i| m | 1 << i);
    assert_eq!(CoverTable::new(&pr).cov(core_mask), 8);
    assert_eq!(cover_number(&pr, &core).unwrap().value, 8);
}

/// φ recomputed from the tree oracle for `S`.
fn phi_oracle(s: &Problem, t: &Problem, lambda: &[(usize, usize)], r: &Rect) -> Ratio<i64> {
    let mut total = 0;
    for &(p, q) in lambda {
        let rows = (0..s.nx()).filter(|a| r.rows >> (a * t.nx() + p) & 1 == 1).fold(0u64, |m, a| m | 1 << a);
        let cols = (0..s.ny()).filter(|b| r.cols >> (b * t.ny() + q) & 1 == 1).fold(0u64, |m, b| m | 1 << b);
        if rows != 0 && cols != 0 {
            total += protocol_oracle(s, rows, cols).0 as i64;
        }
    }
    Ratio::new(total, lambda.len() as i64)
}

#[test]
fn phi_matches_oracle_on_cellwise_protocol() {
    let eq1 = corpus::named("EQ1").unwrap();
    let pr = Problem::product(&eq1, &eq1).unwrap();
    let tree = cellwise_protocol(&pr, &pr.full_rect()).unwrap();
    assert_eq!(tree.leaves(), 16);
    let pairs = [(0, 0), (1, 1)];
    let diag = CellSet::from_pairs(&eq1, &pairs).unwrap();
    let mut ev = PhiEvaluator::new(&eq1, &eq1, &diag, 16).unwrap();
    for node in tree.nodes() {
        assert_eq!(ev.phi(&node.rect()).unwrap(), phi_oracle(&eq1, &eq1, &pairs, &node.rect()));
    }
    assert_eq!(ev.phi(&tree.rect()).unwrap(), Ratio::from_integer(4));
}

#[test]
fn projections_of_product_rectangles_are_monochromatic() {
    let mut r = rng(13);
    let mut seen = 0;
    while seen < 300 {
        let s = random_small(&mut r, 3, 2);
        let t = random_small(&mut r, 3, 2);
        let pr = Problem::product(&s, &t).unwrap();
        for (rows, cols, _) in all_mono_rects(&pr).into_iter().step_by(5) {
            let rect = Rect::new(rows, cols);
            let (a, b) = (pr.project_s(&rect).unwrap(), pr.project_t(&rect).unwrap());
            assert!(mono_any(&s, a.rows, a.cols) && mono_any(&t, b.rows, b.cols));
            seen += 1;
        }
    }
}
