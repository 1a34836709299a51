mod oracle;

use num_rational::Ratio;
use proptest::prelude::*;
use rectlab_core::{
    cover_number, direct_sum_report, min_fooling_delta, protocol_size, solve_protocol, verify_cover, verify_protocol, CellSet,
    Problem, Rect,
};

fn function(max_side: usize, max_colors: usize) -> impl Strategy<Value = Problem> {
    (1..=max_side, 1..=max_side, 1..=max_colors).prop_flat_map(|(nx, ny, nz)| {
        proptest::collection::vec(proptest::collection::vec(0..nz, ny), nx)
            .prop_map(move |t| Problem::function("P", &t, nz).unwrap())
    })
}

fn relation(max_side: usize) -> impl Strategy<Value = Problem> {
    (1..=max_side, 1..=max_side).prop_flat_map(|(nx, ny)| {
        proptest::collection::vec(1u64..8, nx * ny).prop_map(move |c| Problem::from_masks("Q", nx, ny, 3, c).unwrap())
    })
}

fn subset(p: &Problem, mask: u64) -> CellSet {
    let n = p.ncells();
    CellSet::from_indices(n, (0..n).filter(|i| mask >> (i % 64) & 1 == 1))
}

fn cov(p: &Problem) -> usize {
    cover_number(p, &p.full_cells()).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cover_is_monotone_and_subadditive(p in function(4, 3), a in any::<u64>(), b in any::<u64>()) {
        let (sa, sb) = (subset(&p, a), subset(&p, b));
        let v = |s: &CellSet| if s.is_empty() { 0 } else { cover_number(&p, s).unwrap().value };
        let u = sa.union(&sb);
        prop_assert!(v(&u) <= v(&sa) + v(&sb));
        prop_assert!(v(&sa) <= v(&u));
    }

    #[test]
    fn witnesses_verify(p in relation(4)) {
        let c = cover_number(&p, &p.full_cells()).unwrap();
        prop_assert_eq!(c.witness.len(), c.value);
        prop_assert_eq!(verify_cover(&p, &p.full_cells(), &c.witness), Ok(()));
        let r = solve_protocol(&p, 16).unwrap();
        prop_assert_eq!(verify_protocol(&p, &r.size_witness), Ok(()));
        prop_assert_eq!(verify_protocol(&p, &r.depth_witness), Ok(()));
    }

    #[test]
    fn size_depth_chain(p in function(4, 3)) {
        let r = solve_protocol(&p, 16).unwrap();
        // log₂ L ≤ C ≤ 2 log₂ L, as 2^C ≥ L and 2^C ≤ L²
        prop_assert!(1u64 << r.depth >= r.size as u64);
        prop_assert!(1u64 << r.depth <= (r.size * r.size) as u64);
        prop_assert!(r.size >= cov(&p));
    }

    #[test]
    fn product_cover_bounds(s in function(2, 2), t in function(2, 2)) {
        let pr = Problem::product(&s, &t).unwrap();
        let c = cov(&pr);
        prop_assert!(c <= cov(&s) * cov(&t));
        prop_assert!(c >= cov(&s).max(cov(&t)));
        let l = protocol_size(&pr, &pr.full_rect()).unwrap();
        prop_assert!(l >= protocol_size(&s, &s.full_rect()).unwrap());
    }

    #[test]
    fn product_is_associative(a in function(2, 2), b in function(2, 2), c in function(2, 2)) {
        let left = Problem::product(&Problem::product(&a, &b).unwrap(), &c).unwrap();
        let right = Problem::product(&a, &Problem::product(&b, &c).unwrap()).unwrap();
        prop_assert_eq!((left.nx(), left.ny(), left.nz()), (right.nx(), right.ny(), right.nz()));
        prop_assert_eq!(left.table(), right.table());
    }

    #[test]
    fn projections_stay_monochromatic(s in function(3, 2), t in function(3, 2), rows in any::<u64>(), cols in any::<u64>()) {
        let pr = Problem::product(&s, &t).unwrap();
        let r = Rect::new(rows & ((1 << pr.nx()) - 1), cols & ((1 << pr.ny()) - 1));
        prop_assume!(!r.is_empty() && pr.is_mono(&r));
        prop_assert!(s.is_mono(&pr.project_s(&r).unwrap()));
        prop_assert!(t.is_mono(&pr.project_t(&r).unwrap()));
    }

    #[test]
    fn fooling_bound_below_cover(p in function(3, 3), mask in 1u64..512) {
        let lambda = subset(&p, mask);
        prop_assume!(!lambda.is_empty());
        let cert = min_fooling_delta(&p, &lambda).unwrap();
        prop_assert!(cert.delta() > Ratio::from_integer(0));
        prop_assert!(cert.cov_lower_bound() <= cover_number(&p, &lambda).unwrap().value);
        prop_assert_eq!(cert.delta(), oracle::delta_literal(&p, lambda.iter().fold(0, |m, i| m | 1 << i)));
    }

    #[test]
    fn problem_json_round_trip(p in relation(4)) {
        let text = serde_json::to_string(&p).unwrap();
        let back: Problem = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn direct_sum_bounds_hold(s in function(2, 2), t in function(2, 2), mask in 1u64..16) {
        let lambda = subset(&t, mask);
        prop_assume!(!lambda.is_empty());
        let rep = direct_sum_report(&s, &t, &lambda, 16).unwrap();
        for row in &rep.bounds {
            prop_assert!(row.holds || row.vacuous, "{:?}", row);
        }
        prop_assert!(rep.bounds.iter().filter(|b| !b.bound.ends_with("_log")).all(|b| b.holds));
    }
}
