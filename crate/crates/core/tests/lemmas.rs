use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pbij::lemmas::{relative_extend, relative_extend_cyclic};
use pbij::pbij::{double, finite_map, halve, Eval, PartialBijection, Permutation, Point};
use pbij::sets;

const WINDOW: Point = 5000;

fn random_h(rng: &mut ChaCha8Rng) -> PartialBijection {
    let n = rng.random_range(0..40);
    let mut used = (std::collections::HashSet::new(), std::collections::HashSet::new());
    let mut pairs = Vec::new();
    while pairs.len() < n {
        let (x, y) = (rng.random_range(0..3000), rng.random_range(0..3000));
        if !used.0.contains(&x) && !used.1.contains(&y) {
            used.0.insert(x);
            used.1.insert(y);
            pairs.push((x, y));
        }
    }
    finite_map(pairs).unwrap()
}

/// f·a·g = h on the window, Undefined included; a is a bijection there.
fn assert_exact(a: &Permutation, h: &PartialBijection) {
    let fag = double().then(a).then(&halve());
    for x in 0..WINDOW {
        assert_eq!(fag.apply(x), h.apply(x), "x = {x}");
        let y = a.apply(x).defined().expect("a is total");
        assert_eq!(a.unapply(y), Eval::Defined(x), "a⁻¹ at {y}");
        let z = a.unapply(x).defined().expect("a is onto");
        assert_eq!(a.apply(z), Eval::Defined(x));
    }
}

#[test]
fn rank_routing_on_random_finite_h() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let h = random_h(&mut rng);
        assert_exact(&relative_extend(&double(), &halve(), &h).unwrap(), &h);
    }
}

#[test]
fn doubling_halving_fixture() {
    let h = finite_map([(5, 7)]).unwrap();
    let a = relative_extend(&double(), &halve(), &h).unwrap();
    assert_eq!(a.apply(10), Eval::Defined(14));
    assert_eq!(a.apply(6), Eval::Defined(13));
    assert_eq!(a.apply(1), Eval::Defined(0));
    assert_exact(&a, &h);
}

#[test]
fn cyclic_routing_on_random_finite_h() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let h = random_h(&mut rng);
        let pool = sets::complement(sets::evens());
        assert_exact(&relative_extend_cyclic(&double(), &halve(), &h, pool).unwrap(), &h);
    }
}
