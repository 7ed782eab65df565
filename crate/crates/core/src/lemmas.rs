//! Orbit anchoring, the two-involution and cancel involutions, and the
//! relative extension `h = f·a·g`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pbij::{
    CoCardinality, Cause, Eval, PartialBijection, PartialMap, Permutation, Point, Unresolved,
};
use crate::sets::{self, SetError, SetRef};

pub const DEFAULT_BUDGET: u64 = 100_000;

/// Coordinates of a point inside its orbit: `x = base·σ^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitAnchor {
    pub base: Point,
    pub exponent: i64,
    /// `None` for a ℤ-chain.
    pub cycle_length: Option<u64>,
}

struct Cycle {
    /// base, base·σ, base·σ², …
    points: Vec<Point>,
}

/// Budgeted, memoized orbit exploration for one permutation.
///
/// Only closed cycles are cached. The cached answer for a point depends on
/// its orbit alone, so concurrent fills agree with sequential ones.
pub struct OrbitIndex {
    a: Permutation,
    budget: u64,
    name: String,
    cache: RwLock<HashMap<Point, (Arc<Cycle>, usize)>>,
}

fn anchor_failure(name: &str, cause: Cause, x: Point, spent: u64) -> Box<Unresolved> {
    let mut u = Unresolved::new(name, cause, x);
    u.budget_spent = spent;
    Box::new(u)
}

impl OrbitIndex {
    pub fn new(a: &Permutation, budget: u64) -> Self {
        OrbitIndex {
            name: format!("anchor({})", a.label()),
            a: a.clone(),
            budget: budget.max(1),
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    fn lookup(&self, x: Point) -> Option<(Arc<Cycle>, usize)> {
        self.cache.read().unwrap().get(&x).cloned()
    }

    /// One step of σ (forward) or σ⁻¹; failures become anchor outcomes.
    fn step(&self, x: Point, forward: bool, origin: Point, spent: u64) -> std::result::Result<Point, Box<Unresolved>> {
        let v = if forward { self.a.apply(x) } else { self.a.unapply(x) };
        match v {
            Eval::Defined(y) => Ok(y),
            Eval::Undefined => Err(anchor_failure(&self.name, Cause::NotTotal, origin, spent)),
            Eval::Unresolved(u) if u.cause == Cause::Overflow => {
                Err(anchor_failure(&self.name, Cause::AnchorOverflow, origin, spent))
            }
            Eval::Unresolved(u) => Err(Box::new(*u)),
        }
    }

    /// Explore the orbit of `x` in both directions, alternating, until it
    /// closes or the budget runs out.
    fn explore(&self, x: Point) -> std::result::Result<(Arc<Cycle>, usize), Box<Unresolved>> {
        if let Some(hit) = self.lookup(x) {
            return Ok(hit);
        }
        let mut seen: HashMap<Point, i64> = HashMap::from([(x, 0)]);
        let (mut fwd, mut fwd_e) = (x, 0i64);
        let (mut bwd, mut bwd_e) = (x, 0i64);
        let mut spent = 0u64;
        let length = loop {
            if spent >= self.budget {
                return Err(anchor_failure(&self.name, Cause::AnchorBudget, x, spent));
            }
            let forward = spent.is_multiple_of(2);
            spent += 1;
            if forward {
                let y = self.step(fwd, true, x, spent)?;
                if let Some(&e) = seen.get(&y) {
                    break (fwd_e + 1 - e) as u64;
                }
                fwd = y;
                fwd_e += 1;
                seen.insert(y, fwd_e);
            } else {
                let y = self.step(bwd, false, x, spent)?;
                if let Some(&e) = seen.get(&y) {
                    break (e - (bwd_e - 1)) as u64;
                }
                bwd = y;
                bwd_e -= 1;
                seen.insert(y, bwd_e);
            }
        };
        let c = length as i64;
        let (_, &base_e) = seen.iter().min_by_key(|(p, _)| **p).unwrap();
        let mut points = vec![0; length as usize];
        for (&p, &e) in &seen {
            points[(e - base_e).rem_euclid(c) as usize] = p;
        }
        let cycle = Arc::new(Cycle { points });
        let mut cache = self.cache.write().unwrap();
        for (i, &p) in cycle.points.iter().enumerate() {
            cache.insert(p, (cycle.clone(), i));
        }
        Ok((cycle, (-base_e).rem_euclid(c) as usize))
    }

    pub fn anchor(&self, x: Point) -> std::result::Result<OrbitAnchor, Box<Unresolved>> {
        match self.explore(x) {
            Ok((cycle, i)) => Ok(OrbitAnchor {
                base: cycle.points[0],
                exponent: i as i64,
                cycle_length: Some(cycle.points.len() as u64),
            }),
            Err(u) if u.cause.is_anchor_exhaustion() => self.a.declared_anchor(x).ok_or(u),
            Err(u) => Err(u),
        }
    }

    /// base·σⁿ for the orbit of `x`, with `n = shift − exponent(x)`.
    fn reflect(&self, x: Point, shift: i64) -> Eval {
        match self.explore(x) {
            Ok((cycle, i)) => {
                let c = cycle.points.len() as i64;
                Eval::Defined(cycle.points[(shift - i as i64).rem_euclid(c) as usize])
            }
            Err(u) if u.cause.is_anchor_exhaustion() => match self.a.declared_anchor(x) {
                Some(anchor) => self.walk(anchor.base, shift - anchor.exponent, x),
                None => Eval::Unresolved(u),
            },
            Err(u) => Eval::Unresolved(u),
        }
    }

    /// base·σⁿ along a declared chain.
    fn walk(&self, base: Point, n: i64, origin: Point) -> Eval {
        let mut cur = base;
        for spent in 0..n.unsigned_abs() {
            if spent >= self.budget {
                return Eval::Unresolved(anchor_failure(&self.name, Cause::AnchorBudget, origin, spent));
            }
            match self.step(cur, n > 0, origin, spent) {
                Ok(y) => cur = y,
                Err(u) => return Eval::Unresolved(u),
            }
        }
        Eval::Defined(cur)
    }
}

/// Canonical orbit coordinates of `x` under `a`, exploring at most
/// `budget` steps.
pub fn orbit_anchor(a: &Permutation, x: Point, budget: u64) -> std::result::Result<OrbitAnchor, Box<Unresolved>> {
    OrbitIndex::new(a, budget).anchor(x)
}

/// The involution base·σⁿ ↦ base·σ^{shift−n}.
struct Reflection {
    orbits: Arc<OrbitIndex>,
    shift: i64,
    name: String,
}

impl PartialMap for Reflection {
    fn apply(&self, x: Point) -> Eval {
        self.orbits.reflect(x, self.shift).traced(&self.name)
    }
    fn unapply(&self, y: Point) -> Eval {
        self.apply(y)
    }
    fn dom_co(&self) -> CoCardinality {
        CoCardinality::empty()
    }
    fn ran_co(&self) -> CoCardinality {
        CoCardinality::empty()
    }
    fn label(&self) -> String {
        self.name.clone()
    }
    fn in_domain(&self, _: Point) -> bool {
        true
    }
    fn in_range(&self, _: Point) -> bool {
        true
    }
    fn is_involution(&self) -> bool {
        true
    }
}

fn reflection(orbits: &Arc<OrbitIndex>, shift: i64, name: String) -> Permutation {
    PartialBijection::new(Reflection {
        orbits: orbits.clone(),
        shift,
        name,
    })
}

/// Involutions `r`, `s` with `r·s = a`: r(bσⁿ) = bσ⁻ⁿ, s(bσⁿ) = bσ^{1−n}.
pub fn two_involutions(a: &Permutation, budget: u64) -> (Permutation, Permutation) {
    let orbits = Arc::new(OrbitIndex::new(a, budget));
    let label = a.label();
    (
        reflection(&orbits, 0, format!("r({label})")),
        reflection(&orbits, 1, format!("s({label})")),
    )
}

/// The involution `j` with `(aj)·a·(aj) = a⁻¹`: j(bσⁿ) = bσ^{1−n}.
pub fn cancel_involution(a: &Permutation, budget: u64) -> Permutation {
    let orbits = Arc::new(OrbitIndex::new(a, budget));
    reflection(&orbits, 1, format!("cancel({})", a.label()))
}

// ---------------------------------------------------------------------------
// Relative extension

fn set_failure(source: &str, e: SetError, x: Point) -> Eval {
    let cause = match e {
        SetError::ScanLimit => Cause::ScanLimit,
        SetError::Overflow => Cause::Overflow,
        SetError::Exhausted => Cause::NotTotal,
    };
    Eval::Unresolved(Box::new(Unresolved::new(source, cause, x)))
}

fn check_hypotheses(f: &PartialBijection, g: &PartialBijection, h: &PartialBijection) -> Result<()> {
    let fail = |msg: &str| Err(Error::Precondition(msg.into()));
    if !f.dom_co().is_empty() {
        return fail("f must be total (empty domain complement)");
    }
    if !f.ran_co().is_infinite() {
        return fail("the range of f must have infinite complement");
    }
    if !g.ran_co().is_empty() {
        return fail("g must be onto (empty range complement)");
    }
    if !g.dom_co().is_infinite() {
        return fail("the domain of g must have infinite complement");
    }
    if matches!(h.dom_co(), CoCardinality::Unknown) || matches!(h.ran_co(), CoCardinality::Unknown) {
        return fail("h must carry exact complement metadata");
    }
    Ok(())
}

/// The forced part p = f⁻¹·h·g⁻¹ of any solution.
#[derive(Clone)]
struct Forced {
    f: PartialBijection,
    g: PartialBijection,
    h: PartialBijection,
}

impl Forced {
    fn apply(&self, x: Point) -> Eval {
        self.f.unapply(x).and_then(|u| self.h.apply(u)).and_then(|v| self.g.unapply(v))
    }
    fn unapply(&self, y: Point) -> Eval {
        self.g.apply(y).and_then(|v| self.h.unapply(v)).and_then(|u| self.f.apply(u))
    }
    /// (ℕ∖dom h)f when dom h is cofinite or finite, else a scan.
    fn free_domain(&self, omega_f: &SetRef) -> SetRef {
        if let Some(pairs) = self.h.finite_pairs() {
            let dom_p: Vec<Point> = pairs.iter().filter_map(|&(u, _)| self.f.apply(u).defined()).collect();
            return sets::minus(omega_f.clone(), dom_p);
        }
        if let Some(gap) = self.h.dom_co().finite() {
            return sets::finite(gap.iter().filter_map(|&u| self.f.apply(u).defined()));
        }
        let me = self.clone();
        let omega_f = omega_f.clone();
        sets::scanned(move |x| omega_f.contains(x) && me.apply(x).is_undefined())
    }
    /// dom g ∖ ran p.
    fn free_range(&self, dom_g: &SetRef) -> SetRef {
        if let Some(pairs) = self.h.finite_pairs() {
            let ran_p: Vec<Point> = pairs.iter().filter_map(|&(_, v)| self.g.unapply(v).defined()).collect();
            return sets::minus(dom_g.clone(), ran_p);
        }
        if let Some(gap) = self.h.ran_co().finite() {
            return sets::finite(gap.iter().filter_map(|&v| self.g.unapply(v).defined()));
        }
        let me = self.clone();
        let dom_g = dom_g.clone();
        sets::scanned(move |y| dom_g.contains(y) && me.unapply(y).is_undefined())
    }
}

/// Rank-routed extension of p to a permutation of ℕ.
struct RankRouted {
    p: Forced,
    omega_f: SetRef,
    a2: SetRef,
    a3: SetRef,
    p1: SetRef,
    /// Target of A3: P2 merged with the part of P1 that A2 does not use.
    q: SetRef,
    /// `None` when A2 is infinite (A2 uses even P1 ranks).
    a2_len: Option<u64>,
    name: String,
}

impl RankRouted {
    fn route(&self, x: Point) -> std::result::Result<Point, SetError> {
        if self.omega_f.contains(x) {
            let r = self.a2.rank(x)?;
            match self.a2_len {
                None => self.p1.select(r.checked_mul(2).ok_or(SetError::Overflow)?),
                Some(_) => self.p1.select(r),
            }
        } else {
            self.q.select(self.a3.rank(x)?)
        }
    }

    fn unroute(&self, y: Point) -> std::result::Result<Point, SetError> {
        if self.p1.contains(y) {
            let t = self.p1.rank(y)?;
            match self.a2_len {
                None if t % 2 == 0 => return self.a2.select(t / 2),
                Some(n) if t < n => return self.a2.select(t),
                _ => {}
            }
        }
        self.a3.select(self.q.rank(y)?)
    }
}

impl PartialMap for RankRouted {
    fn apply(&self, x: Point) -> Eval {
        match self.p.apply(x) {
            Eval::Undefined => match self.route(x) {
                Ok(y) => Eval::Defined(y),
                Err(e) => set_failure(&self.name, e, x),
            },
            other => other,
        }
        .traced(&self.name)
    }
    fn unapply(&self, y: Point) -> Eval {
        match self.p.unapply(y) {
            Eval::Undefined => match self.unroute(y) {
                Ok(x) => Eval::Defined(x),
                Err(e) => set_failure(&self.name, e, y),
            },
            other => other,
        }
        .traced(&self.name)
    }
    fn dom_co(&self) -> CoCardinality {
        CoCardinality::empty()
    }
    fn ran_co(&self) -> CoCardinality {
        CoCardinality::empty()
    }
    fn label(&self) -> String {
        self.name.clone()
    }
    fn in_domain(&self, _: Point) -> bool {
        true
    }
    fn in_range(&self, _: Point) -> bool {
        true
    }
}

/// A permutation `a` with `f·a·g = h` exactly, domains included.
///
/// `a` agrees with p = f⁻¹·h·g⁻¹ on dom p. The rest of Ωf is sent into
/// ℕ∖dom g, which is what makes `f·a·g` undefined off dom h. Free points
/// are matched by rank:
///
/// * A2 = Ωf∖dom p infinite: A2 rank r ↦ P1 rank 2r, and A3 = ℕ∖Ωf rank r
///   ↦ rank r of P2 ∪ (odd-rank part of P1), where P1 = ℕ∖dom g and
///   P2 = dom g∖ran p.
/// * A2 finite with n points: A2 rank r ↦ P1 rank r, and A3 takes
///   P2 ∪ (P1 minus its first n points).
pub fn relative_extend(f: &PartialBijection, g: &PartialBijection, h: &PartialBijection) -> Result<Permutation> {
    check_hypotheses(f, g, h)?;
    let p = Forced {
        f: f.clone(),
        g: g.clone(),
        h: h.clone(),
    };
    let omega_f = f.range_set_or_scan();
    let dom_g = g.domain_set_or_scan();
    let a2 = p.free_domain(&omega_f);
    let a3 = sets::complement(omega_f.clone());
    let p1 = sets::complement(dom_g.clone());
    let p2 = p.free_range(&dom_g);
    let a2_len = match h.dom_co() {
        CoCardinality::Infinite => None,
        _ => Some(a2.count_below(u64::MAX).map_err(|e| Error::Precondition(format!("{e:?}")))?),
    };
    let spare = match a2_len {
        None => sets::odd_rank(p1.clone()),
        Some(n) => sets::skip_first(p1.clone(), n),
    };
    let q = sets::merge(p2, spare);
    Ok(PartialBijection::new(RankRouted {
        name: format!("extend({})", h.label()),
        p,
        omega_f,
        a2,
        a3,
        p1,
        q,
        a2_len,
    }))
}

/// Finite-cycle extension for finite `h`.
///
/// Same exactness guarantee as [`relative_extend`], but every orbit is a
/// finite cycle, so the involutions derived from it resolve everywhere.
/// `pool` must be an infinite set disjoint from Ωf ∪ dom g.
struct Cyclic {
    /// Explicit moves: p, path closures, connectors.
    moves: BTreeMap<Point, Point>,
    back: BTreeMap<Point, Point>,
    /// (Ωf ∩ dom g) ∖ (dom p ∪ ran p), swapped with pool rank `offset + r`.
    exposed: SetRef,
    pool: SetRef,
    offset: u64,
    name: String,
}

impl Cyclic {
    fn swap(&self, x: Point) -> std::result::Result<Point, SetError> {
        if self.exposed.contains(x) {
            return self.pool.select(self.exposed.rank(x)? + self.offset);
        }
        if self.pool.contains(x) {
            let r = self.pool.rank(x)?;
            if r >= self.offset {
                return self.exposed.select(r - self.offset);
            }
        }
        Ok(x)
    }

    fn eval(&self, x: Point, table: &BTreeMap<Point, Point>) -> Eval {
        if let Some(&y) = table.get(&x) {
            return Eval::Defined(y);
        }
        match self.swap(x) {
            Ok(y) => Eval::Defined(y),
            Err(e) => set_failure(&self.name, e, x),
        }
    }
}

impl PartialMap for Cyclic {
    fn apply(&self, x: Point) -> Eval {
        self.eval(x, &self.moves).traced(&self.name)
    }
    fn unapply(&self, y: Point) -> Eval {
        self.eval(y, &self.back).traced(&self.name)
    }
    fn dom_co(&self) -> CoCardinality {
        CoCardinality::empty()
    }
    fn ran_co(&self) -> CoCardinality {
        CoCardinality::empty()
    }
    fn label(&self) -> String {
        self.name.clone()
    }
    fn in_domain(&self, _: Point) -> bool {
        true
    }
    fn in_range(&self, _: Point) -> bool {
        true
    }
}

pub fn relative_extend_cyclic(
    f: &PartialBijection,
    g: &PartialBijection,
    h: &PartialBijection,
    pool: SetRef,
) -> Result<Permutation> {
    check_hypotheses(f, g, h)?;
    let pairs = h
        .finite_pairs()
        .ok_or_else(|| Error::Precondition("finite-cycle extension needs a finite h".into()))?;
    let omega_f = f.range_set_or_scan();
    let dom_g = g.domain_set_or_scan();
    let defined = |v: Eval| {
        v.defined()
            .ok_or_else(|| Error::Precondition(format!("hypotheses fail while forming p: {v}")))
    };
    let mut moves = BTreeMap::new();
    for &(u, v) in pairs {
        moves.insert(defined(f.apply(u))?, defined(g.unapply(v))?);
    }
    let sources: BTreeSet<Point> = moves.keys().copied().collect();
    let images: BTreeSet<Point> = moves.values().copied().collect();

    // Close every maximal path start → … → end.
    let mut connectors = 0u64;
    for &start in sources.difference(&images) {
        let mut end = start;
        while let Some(&next) = moves.get(&end) {
            end = next;
        }
        if omega_f.contains(end) && dom_g.contains(start) {
            let z = pool.select(connectors).map_err(|e| Error::Precondition(format!("pool: {e:?}")))?;
            connectors += 1;
            moves.insert(end, z);
            moves.insert(z, start);
        } else {
            moves.insert(end, start);
        }
    }
    let touched: Vec<Point> = sources.union(&images).copied().collect();
    let exposed = sets::minus(sets::intersect(omega_f, dom_g), touched);
    let back = moves.iter().map(|(&x, &y)| (y, x)).collect();
    Ok(PartialBijection::new(Cyclic {
        moves,
        back,
        exposed,
        pool,
        offset: connectors,
        name: format!("extend({})", h.label()),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pbij::{double, finite_map, finite_permutation, halve, identity};

    fn cycle123() -> Permutation {
        finite_permutation([(1, 2), (2, 3), (3, 1)]).unwrap()
    }

    #[test]
    fn anchor_of_three_cycle() {
        let a = orbit_anchor(&cycle123(), 3, 100).unwrap();
        assert_eq!(
            a,
            OrbitAnchor {
                base: 1,
                exponent: 2,
                cycle_length: Some(3)
            }
        );
        let fixed = orbit_anchor(&identity(), 9, 100).unwrap();
        assert_eq!((fixed.base, fixed.exponent, fixed.cycle_length), (9, 0, Some(1)));
    }

    #[test]
    fn chain_exhausts_budget() {
        // double on odds-and-evens is not a permutation, so build a chain:
        // x ↦ x+2 on evens, x ↦ x−2 on odds ≥ 3, 1 ↦ 0.
        struct Zig;
        impl PartialMap for Zig {
            fn apply(&self, x: Point) -> Eval {
                Eval::Defined(match x {
                    1 => 0,
                    x if x % 2 == 0 => x + 2,
                    x => x - 2,
                })
            }
            fn unapply(&self, y: Point) -> Eval {
                Eval::Defined(match y {
                    0 => 1,
                    y if y % 2 == 0 => y - 2,
                    y => y + 2,
                })
            }
            fn dom_co(&self) -> CoCardinality {
                CoCardinality::empty()
            }
            fn ran_co(&self) -> CoCardinality {
                CoCardinality::empty()
            }
            fn label(&self) -> String {
                "zig".into()
            }
        }
        let z = PartialBijection::new(Zig);
        let err = orbit_anchor(&z, 4, 50).unwrap_err();
        assert_eq!(err.cause, Cause::AnchorBudget);
        assert_eq!(err.budget_spent, 50);
        let (r, _) = two_involutions(&z, 50);
        assert!(r.apply(4).is_unresolved());
    }

    #[test]
    fn involutions_of_three_cycle() {
        let a = cycle123();
        let (r, s) = two_involutions(&a, 100);
        let got = |p: &Permutation| (1..=3).map(|x| p.apply(x).defined().unwrap()).collect::<Vec<_>>();
        assert_eq!(got(&r), vec![1, 3, 2]);
        assert_eq!(got(&s), vec![2, 1, 3]);
        assert_eq!(got(&r.then(&s)), vec![2, 3, 1]);
        let j = cancel_involution(&a, 100);
        assert_eq!(got(&j), vec![2, 1, 3]);
        let aj = a.then(&j);
        assert_eq!(got(&aj), vec![1, 3, 2]);
        assert_eq!(got(&aj.then(&a).then(&aj)), vec![3, 1, 2]);
    }

    #[test]
    fn involutions_of_transposition() {
        let a = finite_permutation([(1, 2), (2, 1)]).unwrap();
        let (r, s) = two_involutions(&a, 10);
        assert_eq!(r.apply(1), Eval::Defined(1));
        assert_eq!(r.apply(2), Eval::Defined(2));
        assert_eq!(s.apply(1), Eval::Defined(2));
        let j = cancel_involution(&a, 10);
        assert_eq!(j.apply(2), Eval::Defined(1));
    }

    #[test]
    fn relative_extend_fixture() {
        let h = finite_map([(5, 7)]).unwrap();
        let a = relative_extend(&double(), &halve(), &h).unwrap();
        assert_eq!(a.apply(10), Eval::Defined(14));
        assert_eq!(a.apply(6), Eval::Defined(13));
        assert_eq!(a.apply(1), Eval::Defined(0));
        let fag = double().then(&a).then(&halve());
        assert_eq!(fag.apply(5), Eval::Defined(7));
        assert_eq!(fag.apply(3), Eval::Undefined);
        for x in 0..2000 {
            let y = a.apply(x).defined().unwrap();
            assert_eq!(a.unapply(y), Eval::Defined(x), "x={x}");
        }
    }

    #[test]
    fn relative_extend_rejects_bad_metadata() {
        let h = finite_map([(5, 7)]).unwrap();
        assert!(matches!(relative_extend(&halve(), &halve(), &h), Err(Error::Precondition(_))));
        assert!(matches!(relative_extend(&double(), &double(), &h), Err(Error::Precondition(_))));
    }

    #[test]
    fn relative_extend_with_cofinite_h() {
        let h = crate::pbij::cofinite_identity([(3, 8)]).unwrap();
        let a = relative_extend(&double(), &halve(), &h).unwrap();
        let fag = double().then(&a).then(&halve());
        for x in 0..500 {
            assert_eq!(fag.apply(x), h.apply(x), "x={x}");
            let y = a.apply(x).defined().unwrap();
            assert_eq!(a.unapply(y), Eval::Defined(x));
        }
    }

    #[test]
    fn cyclic_extension_is_exact_with_finite_orbits() {
        // f = double, g = halve; pool = odds ∩ … must avoid evens ∪ evens.
        let h = finite_map([(5, 7), (7, 2), (1, 1), (4, 9)]).unwrap();
        let pool = sets::complement(sets::evens());
        let a = relative_extend_cyclic(&double(), &halve(), &h, pool).unwrap();
        let fag = double().then(&a).then(&halve());
        for x in 0..1000 {
            assert_eq!(fag.apply(x), h.apply(x), "x={x}");
            let y = a.apply(x).defined().unwrap();
            assert_eq!(a.unapply(y), Eval::Defined(x));
            assert!(orbit_anchor(&a, x, 1000).is_ok());
        }
    }
}
