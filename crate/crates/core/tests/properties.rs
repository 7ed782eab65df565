use std::collections::BTreeMap;

use proptest::prelude::*;

use pbij::blocks::{block_count_below, block_of, index_within, pair_decode, pair_encode};
use pbij::pbij::{finite_map, power, Eval, PartialBijection, Point};
use pbij::sets::{self, BlockSelection};

const SUPPORT: Point = 64;

/// Random injective pairs inside [0, SUPPORT).
fn pairs() -> impl Strategy<Value = Vec<(Point, Point)>> {
    (Just((0..SUPPORT).collect::<Vec<_>>()).prop_shuffle(), proptest::collection::vec(0..SUPPORT, 0..40))
        .prop_map(|(images, sources)| {
            let mut seen = std::collections::BTreeSet::new();
            sources
                .into_iter()
                .filter(|s| seen.insert(*s))
                .map(|s| (s, images[s as usize]))
                .collect()
        })
}

// Plain table oracle.
type Table = BTreeMap<Point, Point>;

fn table(p: &[(Point, Point)]) -> Table {
    p.iter().copied().collect()
}

fn t_compose(a: &Table, b: &Table) -> Table {
    a.iter().filter_map(|(x, y)| b.get(y).map(|z| (*x, *z))).collect()
}

fn t_invert(a: &Table) -> Table {
    a.iter().map(|(x, y)| (*y, *x)).collect()
}

fn agrees(p: &PartialBijection, t: &Table) -> bool {
    (0..SUPPORT + 4).all(|x| match t.get(&x) {
        Some(y) => p.apply(x) == Eval::Defined(*y),
        None => p.apply(x) == Eval::Undefined,
    })
}

proptest! {
    #[test]
    fn pairing_round_trip(i in 0u64..1 << 20, k in 0u64..1 << 20) {
        let x = pair_encode(i, k).unwrap();
        prop_assert_eq!(pair_decode(x), (i, k));
        prop_assert_eq!(block_of(x), i);
        prop_assert_eq!(index_within(x), k);
    }

    #[test]
    fn decode_then_encode(x in any::<u64>()) {
        let (i, k) = pair_decode(x);
        prop_assert_eq!(pair_encode(i, k), Some(x));
    }

    #[test]
    fn block_counts_match_enumeration(i in 0u64..12, x in 0u64..3000) {
        let brute = (0..x).filter(|&y| block_of(y) == i).count() as u64;
        prop_assert_eq!(block_count_below(i, x), brute);
    }

    #[test]
    fn compose_matches_table(a in pairs(), b in pairs()) {
        let (p, q) = (finite_map(a.clone()).unwrap(), finite_map(b.clone()).unwrap());
        prop_assert!(agrees(&p.then(&q), &t_compose(&table(&a), &table(&b))));
    }

    #[test]
    fn invert_matches_table(a in pairs()) {
        let p = finite_map(a.clone()).unwrap();
        prop_assert!(agrees(&p.invert(), &t_invert(&table(&a))));
        prop_assert!(agrees(&p.invert().invert(), &table(&a)));
    }

    #[test]
    fn power_matches_table(a in pairs(), n in 0u32..6) {
        let p = finite_map(a.clone()).unwrap();
        let t = table(&a);
        let mut want: Table = if n == 0 { (0..SUPPORT + 4).map(|x| (x, x)).collect() } else { t.clone() };
        for _ in 1..n {
            want = t_compose(&want, &t);
        }
        let got = power(&p, n);
        let ok = (0..SUPPORT + 4).all(|x| match want.get(&x) {
            Some(y) => got.apply(x) == Eval::Defined(*y),
            None => got.apply(x) == Eval::Undefined,
        });
        prop_assert!(ok);
    }

    #[test]
    fn composition_is_associative(a in pairs(), b in pairs(), c in pairs()) {
        let (p, q, r) = (finite_map(a).unwrap(), finite_map(b).unwrap(), finite_map(c).unwrap());
        let left = p.then(&q).then(&r);
        let right = p.then(&q.then(&r));
        for x in 0..SUPPORT + 4 {
            prop_assert_eq!(left.apply(x), right.apply(x));
        }
    }

    #[test]
    fn maps_are_injective_and_invertible(a in pairs(), b in pairs()) {
        let p = finite_map(a).unwrap().then(&finite_map(b).unwrap());
        let mut seen = std::collections::BTreeSet::new();
        for x in 0..SUPPORT + 4 {
            if let Eval::Defined(y) = p.apply(x) {
                prop_assert!(seen.insert(y));
                prop_assert_eq!(p.unapply(y), Eval::Defined(x));
            }
        }
    }

    #[test]
    fn block_set_rank_and_select(chosen in proptest::collection::btree_set(0u64..10, 1..5), r in 0u64..200) {
        let s = sets::blocks(BlockSelection::of(chosen.iter().copied()));
        let x = s.select(r).unwrap();
        prop_assert!(chosen.contains(&block_of(x)));
        prop_assert_eq!(s.rank(x).unwrap(), r);
        let brute = (0..x).filter(|&y| chosen.contains(&block_of(y))).count() as u64;
        prop_assert_eq!(brute, r);
    }

    #[test]
    fn complement_partitions(chosen in proptest::collection::btree_set(0u64..10, 1..5), x in 0u64..5000) {
        let s = sets::blocks(BlockSelection::of(chosen.iter().copied()));
        let c = sets::complement(s.clone());
        prop_assert!(s.contains(x) != c.contains(x));
        prop_assert_eq!(s.count_below(x).unwrap() + c.count_below(x).unwrap(), x);
    }
}
