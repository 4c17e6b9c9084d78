use proptest::prelude::*;

use jsmac::fourier_motzkin::{Inequality, InequalitySystem};
use jsmac::infotheory::BoundTable;
use jsmac::region::closed_form_region;
use jsmac::subsets::{
    compact_form_direct, compact_form_recursive, presence_vector, SetFamily, SubsetMask,
};

fn family() -> impl Strategy<Value = SetFamily> {
    (1usize..=5).prop_flat_map(|k| {
        prop::collection::vec(0u32..(1 << k), 1..=6).prop_map(move |bits| {
            let members = bits
                .into_iter()
                .map(|b| SubsetMask::new(b, k).unwrap())
                .collect();
            SetFamily::new(k, members).unwrap()
        })
    })
}

/// Bound tables with nonnegative gaps, built from a random nonnegative
/// `b-` and a `b+` that dominates it.
fn bounds(k: usize) -> impl Strategy<Value = BoundTable> {
    let n = 1usize << k;
    (
        prop::collection::vec(0.0f64..2.0, n),
        prop::collection::vec(0.0f64..1.0, n),
    )
        .prop_map(move |(gap, minus)| {
            let plus: Vec<f64> = gap.iter().zip(&minus).map(|(g, m)| g + m).collect();
            BoundTable::from_values(k, plus, minus).unwrap()
        })
}

proptest! {
    #[test]
    fn compact_form_is_idempotent(f in family()) {
        let once = compact_form_direct(&f).unwrap();
        prop_assert_eq!(compact_form_direct(&once).unwrap(), once);
    }

    #[test]
    fn compact_form_is_nested(f in family()) {
        let c = compact_form_direct(&f).unwrap();
        for pair in c.members().windows(2) {
            prop_assert!(pair[1].is_subset_of(pair[0]));
        }
    }

    #[test]
    fn recursion_matches_threshold_form(f in family()) {
        prop_assert_eq!(compact_form_recursive(&f).unwrap(), compact_form_direct(&f).unwrap());
    }

    #[test]
    fn presence_determines_compact_form(f in family(), seed in any::<u64>()) {
        // reordering and replacing (A, B) by (A ∪ B, A ∩ B) keep the presence vector
        let mut members = f.members().to_vec();
        let n = members.len();
        for i in (1..n).rev() {
            members.swap(i, (seed as usize).wrapping_add(i * 31) % (i + 1));
        }
        if n >= 2 {
            let (a, b) = (members[0], members[1]);
            members[0] = a.union(b);
            members[1] = a.intersection(b);
        }
        let g = SetFamily::new(f.k(), members).unwrap();
        prop_assert_eq!(presence_vector(&g), presence_vector(&f));
        prop_assert_eq!(
            compact_form_direct(&g).unwrap().without_empty(),
            compact_form_direct(&f).unwrap().without_empty()
        );
    }

    #[test]
    fn elementary_rows_round_trip_through_text(k in 1usize..=4, rows in prop::collection::vec((any::<u32>(), any::<u32>()), 1..8)) {
        let mask = |b: u32| SubsetMask::new(b & ((1 << k) - 1), k).unwrap();
        let rows: Vec<Inequality> = rows
            .into_iter()
            .map(|(s, t)| Inequality::elementary(mask(s), mask(s).intersection(mask(t))).normalized())
            .collect();
        let sys = InequalitySystem::new(k, rows).unwrap();
        prop_assert_eq!(InequalitySystem::parse(&sys.to_text(), k).unwrap(), sys);
    }

    #[test]
    fn region_is_downward_closed(bt in bounds(3), point in prop::collection::vec(0.0f64..1.0, 3), shrink in 0.0f64..1.0) {
        let region = closed_form_region(&bt);
        if region.contains(&point).unwrap() {
            let smaller: Vec<f64> = point.iter().map(|x| x * shrink).collect();
            prop_assert!(region.contains(&smaller).unwrap());
        }
    }

    #[test]
    fn region_grows_with_the_gap(bt in bounds(3), point in prop::collection::vec(0.0f64..1.0, 3), extra in 0.0f64..1.0) {
        let region = closed_form_region(&bt);
        let mut looser = bt.clone();
        for s in SubsetMask::all_nonempty(3).unwrap() {
            looser.set_plus(s, bt.plus(s) + extra);
        }
        if region.contains(&point).unwrap() {
            prop_assert!(closed_form_region(&looser).contains(&point).unwrap());
        }
    }
}
