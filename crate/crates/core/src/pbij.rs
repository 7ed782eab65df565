//! Computable partial bijections of ℕ.
//!
//! Maps are written on the right and composed left to right: `p.then(&q)`
//! sends `x` to `(x)p` and then through `q`. Every evaluation is
//! three-valued (see [`Eval`]) so that "outside the domain" and "gave up
//! within budget" stay distinct all the way up to word evaluation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lemmas::OrbitAnchor;
use crate::sets::{self, SetRef};

/// An element of the universe ℕ.
pub type Point = u64;

/// Why an evaluation could not produce a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cause {
    /// Orbit exploration used its whole step budget without closing.
    AnchorBudget,
    /// Orbit exploration reached a point that does not fit in a `u64`.
    AnchorOverflow,
    /// A point left the representable range during plain evaluation.
    Overflow,
    /// A scanned rank computation hit its scan limit.
    ScanLimit,
    /// Two pieces of a disjoint union both claimed the point.
    Overlap,
    /// A map that was supposed to be total was undefined somewhere.
    NotTotal,
}

impl Cause {
    pub fn is_anchor_exhaustion(self) -> bool {
        matches!(self, Cause::AnchorBudget | Cause::AnchorOverflow)
    }
}

/// Provenance of an [`Eval::Unresolved`] outcome.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unresolved {
    /// Label of the innermost object that gave up.
    pub source: String,
    pub cause: Cause,
    /// Point at which `source` was queried.
    pub point: Point,
    pub budget_spent: u64,
    /// Labels of enclosing objects, innermost first.
    pub trace: Vec<String>,
}

impl Unresolved {
    pub fn new(source: impl Into<String>, cause: Cause, point: Point) -> Self {
        Unresolved {
            source: source.into(),
            cause,
            point,
            budget_spent: 0,
            trace: Vec::new(),
        }
    }

    pub fn overflow(source: &str, point: Point) -> Eval {
        Eval::Unresolved(Box::new(Unresolved::new(source, Cause::Overflow, point)))
    }
}

impl fmt::Display for Unresolved {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} in {} at {}", self.cause, self.source, self.point)?;
        if self.budget_spent > 0 {
            write!(f, " after {} steps", self.budget_spent)?;
        }
        for t in &self.trace {
            write!(f, " <- {t}")?;
        }
        Ok(())
    }
}

/// Outcome of applying a partial bijection at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Eval {
    Defined(Point),
    Undefined,
    Unresolved(Box<Unresolved>),
}

impl Eval {
    pub fn defined(&self) -> Option<Point> {
        match self {
            Eval::Defined(y) => Some(*y),
            _ => None,
        }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, Eval::Defined(_))
    }

    pub fn is_undefined(&self) -> bool {
        matches!(self, Eval::Undefined)
    }

    pub fn is_unresolved(&self) -> bool {
        matches!(self, Eval::Unresolved(_))
    }

    pub fn unresolved(&self) -> Option<&Unresolved> {
        match self {
            Eval::Unresolved(u) => Some(u),
            _ => None,
        }
    }

    /// Continue with `next` when defined; Undefined and Unresolved absorb.
    #[inline]
    pub fn and_then(self, next: impl FnOnce(Point) -> Eval) -> Eval {
        match self {
            Eval::Defined(y) => next(y),
            other => other,
        }
    }

    pub fn from_option(v: Option<Point>) -> Eval {
        v.map_or(Eval::Undefined, Eval::Defined)
    }

    /// Append `label` to the trace of an unresolved outcome.
    pub fn traced(self, label: &str) -> Eval {
        match self {
            Eval::Unresolved(mut u) => {
                u.trace.push(label.to_string());
                Eval::Unresolved(u)
            }
            other => other,
        }
    }
}

impl fmt::Display for Eval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Eval::Defined(y) => write!(f, "{y}"),
            Eval::Undefined => f.write_str("undefined"),
            Eval::Unresolved(u) => write!(f, "unresolved ({u})"),
        }
    }
}

/// What is known about the complement of a domain or range.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "elements", rename_all = "kebab-case")]
pub enum CoCardinality {
    /// The complement is exactly this strictly increasing list.
    Finite(Vec<Point>),
    Infinite,
    /// A combinator could not decide the kind from its inputs.
    Unknown,
}

impl CoCardinality {
    pub fn empty() -> Self {
        CoCardinality::Finite(Vec::new())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, CoCardinality::Infinite)
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, CoCardinality::Finite(v) if v.is_empty())
    }

    pub fn finite(&self) -> Option<&[Point]> {
        match self {
            CoCardinality::Finite(v) => Some(v),
            _ => None,
        }
    }

    fn from_set(set: BTreeSet<Point>) -> Self {
        CoCardinality::Finite(set.into_iter().collect())
    }
}

/// The behaviour behind a [`PartialBijection`].
///
/// `apply(x) = Defined(y)` must hold exactly when `unapply(y) = Defined(x)`.
pub trait PartialMap: Send + Sync {
    fn apply(&self, x: Point) -> Eval;
    fn unapply(&self, y: Point) -> Eval;
    /// Complement of the domain.
    fn dom_co(&self) -> CoCardinality;
    /// Complement of the range.
    fn ran_co(&self) -> CoCardinality;

    fn label(&self) -> String;

    fn in_domain(&self, x: Point) -> bool {
        !self.apply(x).is_undefined()
    }

    fn in_range(&self, y: Point) -> bool {
        !self.unapply(y).is_undefined()
    }

    /// Domain as a rank-capable set, when it has a closed form.
    fn domain_set(&self) -> Option<SetRef> {
        None
    }

    fn range_set(&self) -> Option<SetRef> {
        None
    }

    /// Orbit coordinates attached at build time.
    fn declared_anchor(&self, _x: Point) -> Option<OrbitAnchor> {
        None
    }

    /// The explicit pair list of a finite-support map.
    fn finite_pairs(&self) -> Option<&[(Point, Point)]> {
        None
    }

    /// `Some(inner)` when this map is the formal inverse of `inner`.
    fn inverse_of(&self) -> Option<&PartialBijection> {
        None
    }

    /// The factors of a left-to-right composite, for flattening.
    fn compose_parts(&self) -> Option<&[PartialBijection]> {
        None
    }

    /// The pieces of a disjoint union.
    fn union_pieces(&self) -> Option<&[PartialBijection]> {
        None
    }

    /// True when the map is an involution of its domain by construction,
    /// whether or not every point of it can be evaluated.
    fn is_involution(&self) -> bool {
        false
    }
}

/// A shareable, immutable partial bijection of ℕ.
#[derive(Clone)]
pub struct PartialBijection(Arc<dyn PartialMap>);

/// A partial bijection whose domain and range are all of ℕ.
pub type Permutation = PartialBijection;

impl fmt::Debug for PartialBijection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PartialBijection({})", self.label())
    }
}

impl PartialBijection {
    pub fn new(map: impl PartialMap + 'static) -> Self {
        PartialBijection(Arc::new(map))
    }

    #[inline]
    pub fn apply(&self, x: Point) -> Eval {
        self.0.apply(x)
    }

    #[inline]
    pub fn unapply(&self, y: Point) -> Eval {
        self.0.unapply(y)
    }

    pub fn in_domain(&self, x: Point) -> bool {
        self.0.in_domain(x)
    }

    pub fn in_range(&self, y: Point) -> bool {
        self.0.in_range(y)
    }

    pub fn dom_co(&self) -> CoCardinality {
        self.0.dom_co()
    }

    pub fn ran_co(&self) -> CoCardinality {
        self.0.ran_co()
    }

    pub fn label(&self) -> String {
        self.0.label()
    }

    pub fn domain_set(&self) -> Option<SetRef> {
        self.0.domain_set()
    }

    pub fn range_set(&self) -> Option<SetRef> {
        self.0.range_set()
    }

    pub fn declared_anchor(&self, x: Point) -> Option<OrbitAnchor> {
        self.0.declared_anchor(x)
    }

    pub fn finite_pairs(&self) -> Option<&[(Point, Point)]> {
        self.0.finite_pairs()
    }

    pub fn union_pieces(&self) -> Option<&[PartialBijection]> {
        self.0.union_pieces()
    }

    pub fn is_involution(&self) -> bool {
        self.0.is_involution()
    }

    pub fn is_permutation(&self) -> bool {
        self.dom_co().is_empty() && self.ran_co().is_empty()
    }

    /// Domain as a set: the closed form if the map has one, else a scan.
    pub fn domain_set_or_scan(&self) -> SetRef {
        self.domain_set().unwrap_or_else(|| {
            let me = self.clone();
            sets::scanned(move |x| me.in_domain(x))
        })
    }

    pub fn range_set_or_scan(&self) -> SetRef {
        self.range_set().unwrap_or_else(|| {
            let me = self.clone();
            sets::scanned(move |y| me.in_range(y))
        })
    }

    pub fn invert(&self) -> PartialBijection {
        if let Some(inner) = self.0.inverse_of() {
            return inner.clone();
        }
        PartialBijection::new(Inverse(self.clone()))
    }

    /// Left-to-right composition: first `self`, then `next`.
    pub fn then(&self, next: &PartialBijection) -> PartialBijection {
        compose_lr(self, next)
    }

    pub fn power(&self, n: u32) -> PartialBijection {
        power(self, n)
    }

    /// Attach a label that appears in unresolved traces.
    pub fn labeled(&self, name: impl Into<String>) -> PartialBijection {
        PartialBijection::new(Labeled {
            inner: self.clone(),
            name: name.into(),
            dom: None,
            ran: None,
            dom_set: None,
            ran_set: None,
            silent: false,
        })
    }

    /// Override complement metadata with facts the caller has established.
    pub fn with_metadata(&self, dom_co: CoCardinality, ran_co: CoCardinality) -> PartialBijection {
        PartialBijection::new(Labeled {
            inner: self.clone(),
            name: self.label(),
            dom: Some(dom_co),
            ran: Some(ran_co),
            dom_set: None,
            ran_set: None,
            silent: true,
        })
    }

    /// Attach closed-form domain and range sets the caller knows to be exact.
    pub fn with_sets(&self, domain: SetRef, range: SetRef) -> PartialBijection {
        PartialBijection::new(Labeled {
            inner: self.clone(),
            name: self.label(),
            dom: None,
            ran: None,
            dom_set: Some(domain),
            ran_set: Some(range),
            silent: true,
        })
    }

    pub fn restrict_to(
        &self,
        member: impl Fn(Point) -> bool + Send + Sync + 'static,
        co_info: CoCardinality,
    ) -> PartialBijection {
        restrict_to(self, member, co_info)
    }
}

/// Apply `p` at `x`.
pub fn apply_at(p: &PartialBijection, x: Point) -> Eval {
    p.apply(x)
}

pub fn invert(p: &PartialBijection) -> PartialBijection {
    p.invert()
}

struct Inverse(PartialBijection);

impl PartialMap for Inverse {
    fn apply(&self, x: Point) -> Eval {
        self.0.unapply(x)
    }
    fn unapply(&self, y: Point) -> Eval {
        self.0.apply(y)
    }
    fn dom_co(&self) -> CoCardinality {
        self.0.ran_co()
    }
    fn ran_co(&self) -> CoCardinality {
        self.0.dom_co()
    }
    fn label(&self) -> String {
        format!("({})^-1", self.0.label())
    }
    fn in_domain(&self, x: Point) -> bool {
        self.0.in_range(x)
    }
    fn in_range(&self, y: Point) -> bool {
        self.0.in_domain(y)
    }
    fn domain_set(&self) -> Option<SetRef> {
        self.0.range_set()
    }
    fn range_set(&self) -> Option<SetRef> {
        self.0.domain_set()
    }
    fn inverse_of(&self) -> Option<&PartialBijection> {
        Some(&self.0)
    }
}

struct Labeled {
    inner: PartialBijection,
    name: String,
    dom: Option<CoCardinality>,
    ran: Option<CoCardinality>,
    dom_set: Option<SetRef>,
    ran_set: Option<SetRef>,
    /// Metadata-only wrappers do not add a trace entry.
    silent: bool,
}

impl PartialMap for Labeled {
    fn apply(&self, x: Point) -> Eval {
        let v = self.inner.apply(x);
        if self.silent {
            v
        } else {
            v.traced(&self.name)
        }
    }
    fn unapply(&self, y: Point) -> Eval {
        let v = self.inner.unapply(y);
        if self.silent {
            v
        } else {
            v.traced(&self.name)
        }
    }
    fn dom_co(&self) -> CoCardinality {
        self.dom.clone().unwrap_or_else(|| self.inner.dom_co())
    }
    fn ran_co(&self) -> CoCardinality {
        self.ran.clone().unwrap_or_else(|| self.inner.ran_co())
    }
    fn label(&self) -> String {
        self.name.clone()
    }
    fn in_domain(&self, x: Point) -> bool {
        self.inner.in_domain(x)
    }
    fn in_range(&self, y: Point) -> bool {
        self.inner.in_range(y)
    }
    fn domain_set(&self) -> Option<SetRef> {
        self.dom_set.clone().or_else(|| self.inner.domain_set())
    }
    fn range_set(&self) -> Option<SetRef> {
        self.ran_set.clone().or_else(|| self.inner.range_set())
    }
    fn declared_anchor(&self, x: Point) -> Option<OrbitAnchor> {
        self.inner.declared_anchor(x)
    }
    fn finite_pairs(&self) -> Option<&[(Point, Point)]> {
        self.inner.finite_pairs()
    }
    fn union_pieces(&self) -> Option<&[PartialBijection]> {
        self.inner.union_pieces()
    }
    fn is_involution(&self) -> bool {
        self.inner.is_involution()
    }
}

// ---------------------------------------------------------------------------
// Composition

struct Compose {
    parts: Vec<PartialBijection>,
    dom: CoCardinality,
    ran: CoCardinality,
}

impl PartialMap for Compose {
    fn apply(&self, x: Point) -> Eval {
        let mut cur = x;
        for p in &self.parts {
            match p.apply(cur) {
                Eval::Defined(y) => cur = y,
                other => return other,
            }
        }
        Eval::Defined(cur)
    }
    fn unapply(&self, y: Point) -> Eval {
        let mut cur = y;
        for p in self.parts.iter().rev() {
            match p.unapply(cur) {
                Eval::Defined(x) => cur = x,
                other => return other,
            }
        }
        Eval::Defined(cur)
    }
    fn dom_co(&self) -> CoCardinality {
        self.dom.clone()
    }
    fn ran_co(&self) -> CoCardinality {
        self.ran.clone()
    }
    fn label(&self) -> String {
        let names: Vec<String> = self.parts.iter().map(|p| p.label()).collect();
        names.join("·")
    }
    fn compose_parts(&self) -> Option<&[PartialBijection]> {
        Some(&self.parts)
    }
}

/// Complement of dom(p·q), from the complement metadata of both sides.
///
/// ℕ∖dom(pq) = (ℕ∖dom p) ⊔ p⁻¹((ℕ∖dom q) ∩ ran p).
fn compose_dom_co(p: &PartialBijection, q: &PartialBijection) -> CoCardinality {
    match (p.dom_co(), q.dom_co()) {
        (CoCardinality::Infinite, _) => CoCardinality::Infinite,
        (CoCardinality::Finite(ep), CoCardinality::Finite(eq)) => {
            let mut out: BTreeSet<Point> = ep.into_iter().collect();
            for y in eq {
                match p.unapply(y) {
                    Eval::Defined(x) => {
                        out.insert(x);
                    }
                    Eval::Undefined => {}
                    Eval::Unresolved(_) => return CoCardinality::Unknown,
                }
            }
            CoCardinality::from_set(out)
        }
        (CoCardinality::Finite(_), CoCardinality::Infinite) => {
            // An infinite set minus a finite one stays infinite.
            if p.ran_co().finite().is_some() {
                CoCardinality::Infinite
            } else {
                CoCardinality::Unknown
            }
        }
        _ => CoCardinality::Unknown,
    }
}

/// Left-to-right composition `(x)(p·q) = ((x)p)q`.
pub fn compose_lr(p: &PartialBijection, q: &PartialBijection) -> PartialBijection {
    let dom = compose_dom_co(p, q);
    let ran = compose_dom_co(&q.invert(), &p.invert());
    let mut parts = Vec::new();
    for side in [p, q] {
        match side.0.compose_parts() {
            Some(inner) => parts.extend(inner.iter().cloned()),
            None => parts.push(side.clone()),
        }
    }
    PartialBijection::new(Compose { parts, dom, ran })
}

/// Compose a sequence left to right; the empty sequence is the identity.
pub fn compose_all(parts: &[PartialBijection]) -> PartialBijection {
    match parts.split_first() {
        None => identity(),
        Some((first, rest)) => rest.iter().fold(first.clone(), |acc, p| acc.then(p)),
    }
}

struct Square(PartialBijection);

impl Square {
    /// The union piece claiming `x`, if it is an involution by construction.
    fn involutive_piece(&self, x: Point, forward: bool) -> bool {
        let Some(pieces) = self.0.union_pieces() else {
            return self.0.is_involution();
        };
        pieces.iter().any(|p| {
            p.is_involution() && if forward { p.in_domain(x) } else { p.in_range(x) }
        })
    }
}

impl PartialMap for Square {
    fn apply(&self, x: Point) -> Eval {
        if self.involutive_piece(x, true) {
            return Eval::Defined(x);
        }
        self.0.apply(x).and_then(|y| self.0.apply(y))
    }
    fn unapply(&self, y: Point) -> Eval {
        if self.involutive_piece(y, false) {
            return Eval::Defined(y);
        }
        self.0.unapply(y).and_then(|x| self.0.unapply(x))
    }
    fn dom_co(&self) -> CoCardinality {
        compose_dom_co(&self.0, &self.0)
    }
    fn ran_co(&self) -> CoCardinality {
        let inv = self.0.invert();
        compose_dom_co(&inv, &inv)
    }
    fn label(&self) -> String {
        format!("{}²", self.0.label())
    }
}

/// p·p, where a union piece that is an involution by construction
/// contributes the identity without being evaluated.
pub fn square(p: &PartialBijection) -> PartialBijection {
    PartialBijection::new(Square(p.clone()))
}

/// `n`-fold left-to-right composition; `power(p, 0)` is the identity.
pub fn power(p: &PartialBijection, n: u32) -> PartialBijection {
    if n == 0 {
        return identity();
    }
    let mut acc = p.clone();
    for _ in 1..n {
        acc = acc.then(p);
    }
    acc
}

// ---------------------------------------------------------------------------
// Restriction and disjoint union

type Member = Arc<dyn Fn(Point) -> bool + Send + Sync>;

struct Restrict {
    inner: PartialBijection,
    member: Member,
    dom: CoCardinality,
    ran: CoCardinality,
}

impl PartialMap for Restrict {
    fn apply(&self, x: Point) -> Eval {
        if (self.member)(x) {
            self.inner.apply(x)
        } else {
            Eval::Undefined
        }
    }
    fn unapply(&self, y: Point) -> Eval {
        match self.inner.unapply(y) {
            Eval::Defined(x) if (self.member)(x) => Eval::Defined(x),
            Eval::Defined(_) => Eval::Undefined,
            other => other,
        }
    }
    fn dom_co(&self) -> CoCardinality {
        self.dom.clone()
    }
    fn ran_co(&self) -> CoCardinality {
        self.ran.clone()
    }
    fn label(&self) -> String {
        format!("{}|restricted", self.inner.label())
    }
}

/// Restrict the domain of `p` to `member`; `co_info` describes
/// ℕ∖{x : member(x) and x ∈ dom p}.
pub fn restrict_to(
    p: &PartialBijection,
    member: impl Fn(Point) -> bool + Send + Sync + 'static,
    co_info: CoCardinality,
) -> PartialBijection {
    let member: Member = Arc::new(member);
    // ℕ∖ran(p|M) = (ℕ∖ran p) ⊔ p(dom p ∖ M); decidable when both are finite.
    let ran = match (p.ran_co(), &co_info) {
        (CoCardinality::Finite(er), CoCardinality::Finite(dropped)) => {
            let mut out: BTreeSet<Point> = er.into_iter().collect();
            let mut unknown = false;
            for &x in dropped {
                match p.apply(x) {
                    Eval::Defined(y) => {
                        out.insert(y);
                    }
                    Eval::Undefined => {}
                    Eval::Unresolved(_) => unknown = true,
                }
            }
            if unknown {
                CoCardinality::Unknown
            } else {
                CoCardinality::from_set(out)
            }
        }
        (CoCardinality::Infinite, _) => CoCardinality::Infinite,
        _ => CoCardinality::Unknown,
    };
    PartialBijection::new(Restrict {
        inner: p.clone(),
        member,
        dom: co_info,
        ran,
    })
}

struct DisjointUnion {
    pieces: Vec<PartialBijection>,
    dom: CoCardinality,
    ran: CoCardinality,
}

impl DisjointUnion {
    fn pick(&self, x: Point, forward: bool) -> Eval {
        let mut found: Option<Point> = None;
        let mut pending: Option<Eval> = None;
        for piece in &self.pieces {
            let v = if forward {
                piece.apply(x)
            } else {
                piece.unapply(x)
            };
            match v {
                Eval::Defined(y) => {
                    if found.is_some() {
                        return Eval::Unresolved(Box::new(Unresolved::new(
                            self.label(),
                            Cause::Overlap,
                            x,
                        )));
                    }
                    found = Some(y);
                }
                Eval::Undefined => {}
                u @ Eval::Unresolved(_) => {
                    pending.get_or_insert(u);
                }
            }
        }
        match (found, pending) {
            (_, Some(u)) => u,
            (Some(y), None) => Eval::Defined(y),
            (None, None) => Eval::Undefined,
        }
    }
}

impl PartialMap for DisjointUnion {
    fn apply(&self, x: Point) -> Eval {
        self.pick(x, true)
    }
    fn unapply(&self, y: Point) -> Eval {
        self.pick(y, false)
    }
    fn dom_co(&self) -> CoCardinality {
        self.dom.clone()
    }
    fn ran_co(&self) -> CoCardinality {
        self.ran.clone()
    }
    fn label(&self) -> String {
        let names: Vec<String> = self.pieces.iter().map(|p| p.label()).collect();
        format!("⊔[{}]", names.join(", "))
    }
    fn union_pieces(&self) -> Option<&[PartialBijection]> {
        Some(&self.pieces)
    }
}

/// Complement of a union of domains: the intersection of the complements.
fn union_co(pieces: &[PartialBijection], forward: bool) -> CoCardinality {
    let cos: Vec<CoCardinality> = pieces
        .iter()
        .map(|p| if forward { p.dom_co() } else { p.ran_co() })
        .collect();
    if let Some(list) = cos.iter().find_map(|c| c.finite()) {
        let kept = list.iter().copied().filter(|&x| {
            pieces.iter().all(|p| {
                if forward {
                    !p.in_domain(x)
                } else {
                    !p.in_range(x)
                }
            })
        });
        return CoCardinality::Finite(kept.collect());
    }
    if pieces.is_empty() {
        return CoCardinality::Infinite;
    }
    CoCardinality::Unknown
}

/// Pointwise union of pieces with pairwise disjoint domains and ranges.
///
/// Finite-support pieces are checked against every other piece up front;
/// everything else is checked lazily, at evaluation time, where a second
/// claimant turns the outcome into an `Overlap` unresolved.
pub fn disjoint_union_of(pieces: Vec<PartialBijection>) -> Result<PartialBijection> {
    for (i, piece) in pieces.iter().enumerate() {
        let Some(pairs) = piece.finite_pairs() else {
            continue;
        };
        for (j, other) in pieces.iter().enumerate() {
            if i == j {
                continue;
            }
            for &(x, y) in pairs {
                if other.in_domain(x) {
                    return Err(Error::Overlap(x));
                }
                if other.in_range(y) {
                    return Err(Error::Overlap(y));
                }
            }
        }
    }
    let dom = union_co(&pieces, true);
    let ran = union_co(&pieces, false);
    Ok(PartialBijection::new(DisjointUnion { pieces, dom, ran }))
}

// ---------------------------------------------------------------------------
// Leaf maps

struct Identity;

impl PartialMap for Identity {
    fn apply(&self, x: Point) -> Eval {
        Eval::Defined(x)
    }
    fn unapply(&self, y: Point) -> Eval {
        Eval::Defined(y)
    }
    fn dom_co(&self) -> CoCardinality {
        CoCardinality::empty()
    }
    fn ran_co(&self) -> CoCardinality {
        CoCardinality::empty()
    }
    fn label(&self) -> String {
        "identity".into()
    }
    fn is_involution(&self) -> bool {
        true
    }
    fn in_domain(&self, _: Point) -> bool {
        true
    }
    fn in_range(&self, _: Point) -> bool {
        true
    }
    fn domain_set(&self) -> Option<SetRef> {
        Some(sets::all())
    }
    fn range_set(&self) -> Option<SetRef> {
        Some(sets::all())
    }
}

/// The identity on all of ℕ.
pub fn identity() -> Permutation {
    PartialBijection::new(Identity)
}

/// A partial bijection with finite support, stored as sorted pairs.
pub struct FiniteMap {
    pairs: Vec<(Point, Point)>,
    backward: BTreeMap<Point, Point>,
    name: String,
}

impl FiniteMap {
    pub fn new(pairs: impl IntoIterator<Item = (Point, Point)>) -> Result<Self> {
        let mut forward = BTreeMap::new();
        let mut backward = BTreeMap::new();
        for (x, y) in pairs {
            if forward.insert(x, y).is_some() {
                return Err(Error::Precondition(format!("repeated source {x}")));
            }
            if backward.insert(y, x).is_some() {
                return Err(Error::Precondition(format!("repeated image {y}")));
            }
        }
        let pairs: Vec<(Point, Point)> = forward.into_iter().collect();
        let name = if pairs.len() <= 4 {
            let shown: Vec<String> = pairs.iter().map(|(x, y)| format!("{x}↦{y}")).collect();
            format!("{{{}}}", shown.join(", "))
        } else {
            format!("finite[{}]", pairs.len())
        };
        Ok(FiniteMap {
            pairs,
            backward,
            name,
        })
    }

    pub fn pairs(&self) -> &[(Point, Point)] {
        &self.pairs
    }
}

impl PartialMap for FiniteMap {
    fn apply(&self, x: Point) -> Eval {
        match self.pairs.binary_search_by_key(&x, |&(a, _)| a) {
            Ok(i) => Eval::Defined(self.pairs[i].1),
            Err(_) => Eval::Undefined,
        }
    }
    fn unapply(&self, y: Point) -> Eval {
        Eval::from_option(self.backward.get(&y).copied())
    }
    fn dom_co(&self) -> CoCardinality {
        CoCardinality::Infinite
    }
    fn ran_co(&self) -> CoCardinality {
        CoCardinality::Infinite
    }
    fn label(&self) -> String {
        self.name.clone()
    }
    fn domain_set(&self) -> Option<SetRef> {
        Some(sets::finite(self.pairs.iter().map(|&(x, _)| x)))
    }
    fn range_set(&self) -> Option<SetRef> {
        Some(sets::finite(self.backward.keys().copied()))
    }
    fn finite_pairs(&self) -> Option<&[(Point, Point)]> {
        Some(&self.pairs)
    }
}

/// Finite partial bijection from explicit pairs.
pub fn finite_map(pairs: impl IntoIterator<Item = (Point, Point)>) -> Result<PartialBijection> {
    Ok(PartialBijection::new(FiniteMap::new(pairs)?))
}

/// A permutation that moves finitely many points, given by its moved pairs.
pub fn finite_permutation(pairs: impl IntoIterator<Item = (Point, Point)>) -> Result<Permutation> {
    let moved = FiniteMap::new(pairs)?;
    let sources: BTreeSet<Point> = moved.pairs.iter().map(|&(x, _)| x).collect();
    let images: BTreeSet<Point> = moved.backward.keys().copied().collect();
    if sources != images {
        return Err(Error::Precondition(
            "moved points must form a permutation of their support".into(),
        ));
    }
    Ok(cofinite_identity(moved.pairs.iter().copied())?.labeled("finite-permutation"))
}

struct Double;

impl PartialMap for Double {
    fn apply(&self, x: Point) -> Eval {
        match x.checked_mul(2) {
            Some(y) => Eval::Defined(y),
            None => Unresolved::overflow("double", x),
        }
    }
    fn unapply(&self, y: Point) -> Eval {
        if y.is_multiple_of(2) {
            Eval::Defined(y / 2)
        } else {
            Eval::Undefined
        }
    }
    fn dom_co(&self) -> CoCardinality {
        CoCardinality::empty()
    }
    fn ran_co(&self) -> CoCardinality {
        CoCardinality::Infinite
    }
    fn label(&self) -> String {
        "double".into()
    }
    fn in_domain(&self, _: Point) -> bool {
        true
    }
    fn in_range(&self, y: Point) -> bool {
        y.is_multiple_of(2)
    }
    fn domain_set(&self) -> Option<SetRef> {
        Some(sets::all())
    }
    fn range_set(&self) -> Option<SetRef> {
        Some(sets::evens())
    }
}

/// x ↦ 2x.
pub fn double() -> PartialBijection {
    PartialBijection::new(Double)
}

/// 2k ↦ k.
pub fn halve() -> PartialBijection {
    double().invert().labeled("halve")
}

/// Identity outside a finite set of exception pairs.
///
/// Each pair `(x, y)` sends `x` to `y`. A point that is an image but not a
/// source leaves the domain; a point that is a source but not an image
/// leaves the range. Both complements are therefore finite and exact.
pub struct CofiniteIdentity {
    moved: FiniteMap,
    dom_gap: Vec<Point>,
    ran_gap: Vec<Point>,
}

impl PartialMap for CofiniteIdentity {
    fn apply(&self, x: Point) -> Eval {
        match self.moved.apply(x) {
            Eval::Defined(y) => Eval::Defined(y),
            _ if self.dom_gap.binary_search(&x).is_ok() => Eval::Undefined,
            _ => Eval::Defined(x),
        }
    }
    fn unapply(&self, y: Point) -> Eval {
        match self.moved.unapply(y) {
            Eval::Defined(x) => Eval::Defined(x),
            _ if self.ran_gap.binary_search(&y).is_ok() => Eval::Undefined,
            _ => Eval::Defined(y),
        }
    }
    fn dom_co(&self) -> CoCardinality {
        CoCardinality::Finite(self.dom_gap.clone())
    }
    fn ran_co(&self) -> CoCardinality {
        CoCardinality::Finite(self.ran_gap.clone())
    }
    fn label(&self) -> String {
        format!("cofinite-identity{}", self.moved.label())
    }
    fn domain_set(&self) -> Option<SetRef> {
        Some(sets::all_except(self.dom_gap.iter().copied()))
    }
    fn range_set(&self) -> Option<SetRef> {
        Some(sets::all_except(self.ran_gap.iter().copied()))
    }
}

pub fn cofinite_identity(
    exceptions: impl IntoIterator<Item = (Point, Point)>,
) -> Result<PartialBijection> {
    let moved = FiniteMap::new(exceptions)?;
    let sources: BTreeSet<Point> = moved.pairs.iter().map(|&(x, _)| x).collect();
    let images: BTreeSet<Point> = moved.backward.keys().copied().collect();
    let dom_gap = images.difference(&sources).copied().collect();
    let ran_gap = sources.difference(&images).copied().collect();
    Ok(PartialBijection::new(CofiniteIdentity {
        moved,
        dom_gap,
        ran_gap,
    }))
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: &[&str] = &["identity", "double", "halve"];

/// Builtin families by name.
pub fn builtin(name: &str) -> Result<PartialBijection> {
    match name {
        "identity" => Ok(identity()),
        "double" => Ok(double()),
        "halve" => Ok(halve()),
        other => Err(Error::Precondition(format!("unknown builtin {other:?}"))),
    }
}

// ---------------------------------------------------------------------------
// Sampling

/// Outcome counts of comparing two maps on `[0, window)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EqualityReport {
    pub window: u64,
    pub matches: u64,
    pub mismatches: u64,
    pub unresolved: u64,
    pub mismatch_samples: Vec<(Point, String, String)>,
}

impl EqualityReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches == 0
    }
}

const MISMATCH_SAMPLES: usize = 16;

/// Compare two outcomes: `Some(true)` on agreement, `None` if either side
/// is unresolved.
pub fn same_outcome(a: &Eval, b: &Eval) -> Option<bool> {
    match (a, b) {
        (Eval::Unresolved(_), _) | (_, Eval::Unresolved(_)) => None,
        (Eval::Defined(x), Eval::Defined(y)) => Some(x == y),
        (Eval::Undefined, Eval::Undefined) => Some(true),
        _ => Some(false),
    }
}

pub fn sample_equal(p: &PartialBijection, q: &PartialBijection, window: u64) -> EqualityReport {
    let mut report = EqualityReport {
        window,
        ..Default::default()
    };
    for x in 0..window {
        let (a, b) = (p.apply(x), q.apply(x));
        match same_outcome(&a, &b) {
            None => report.unresolved += 1,
            Some(true) => report.matches += 1,
            Some(false) => {
                report.mismatches += 1;
                if report.mismatch_samples.len() < MISMATCH_SAMPLES {
                    report.mismatch_samples.push((x, a.to_string(), b.to_string()));
                }
            }
        }
    }
    report
}

/// True iff `(x)p² = x` at every `x < window` where both steps resolve.
pub fn check_involution(p: &Permutation, window: u64) -> bool {
    (0..window).all(|x| match p.apply(x) {
        Eval::Defined(y) => match p.apply(y) {
            Eval::Defined(z) => z == x,
            Eval::Undefined => false,
            Eval::Unresolved(_) => true,
        },
        Eval::Undefined => false,
        Eval::Unresolved(_) => true,
    })
}
