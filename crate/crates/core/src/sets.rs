//! Decidable subsets of ℕ with rank (`count_below`) and select.
//!
//! The rank-routed extension needs "the r-th element of this set" and
//! "how many elements lie below x" for sets such as ℕ∖dom g. Sets made of
//! whole blocks have closed forms; anything else falls back to a cached
//! linear scan.

use std::sync::{Arc, RwLock};

use crate::blocks;
use crate::pbij::Point;

pub type SetRef = Arc<dyn PointSet>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetError {
    /// The set has no element of the requested rank.
    Exhausted,
    /// A scanned set reached its scan limit.
    ScanLimit,
    /// The answer does not fit in a `u64`.
    Overflow,
}

pub trait PointSet: Send + Sync {
    fn contains(&self, x: Point) -> bool;

    /// |{y ∈ S : y < x}|
    fn count_below(&self, x: Point) -> Result<u64, SetError>;

    /// The element of rank `r` (0-based).
    fn select(&self, r: u64) -> Result<Point, SetError> {
        select_by_count(self, r)
    }

    /// Rank of a member.
    fn rank(&self, x: Point) -> Result<u64, SetError> {
        self.count_below(x)
    }

    /// Block decomposition, when the set is a union of whole blocks.
    fn as_blocks(&self) -> Option<BlockSelection> {
        None
    }
}

/// Smallest `x` with `count_below(x + 1) > r`, by galloping then bisection.
fn select_by_count<S: PointSet + ?Sized>(set: &S, r: u64) -> Result<Point, SetError> {
    let mut hi: u64 = r.saturating_mul(2).saturating_add(64);
    loop {
        if set.count_below(hi)? > r {
            break;
        }
        if hi == u64::MAX {
            return Err(SetError::Exhausted);
        }
        hi = hi.saturating_mul(2);
    }
    // count_below(lo) <= r < count_below(hi)
    let mut lo = 0u64;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if set.count_below(mid)? > r {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo)
}

struct All;

impl PointSet for All {
    fn contains(&self, _: Point) -> bool {
        true
    }
    fn count_below(&self, x: Point) -> Result<u64, SetError> {
        Ok(x)
    }
    fn select(&self, r: u64) -> Result<Point, SetError> {
        Ok(r)
    }
    fn as_blocks(&self) -> Option<BlockSelection> {
        Some(BlockSelection::complement_of(Vec::new()))
    }
}

pub fn all() -> SetRef {
    Arc::new(All)
}

struct Evens;

impl PointSet for Evens {
    fn contains(&self, x: Point) -> bool {
        x.is_multiple_of(2)
    }
    fn count_below(&self, x: Point) -> Result<u64, SetError> {
        Ok(x.div_ceil(2))
    }
    fn select(&self, r: u64) -> Result<Point, SetError> {
        r.checked_mul(2).ok_or(SetError::Overflow)
    }
}

pub fn evens() -> SetRef {
    Arc::new(Evens)
}

/// A finite set kept as a sorted vector.
pub struct FiniteSet(Vec<Point>);

impl FiniteSet {
    pub fn new(points: impl IntoIterator<Item = Point>) -> Self {
        let mut v: Vec<Point> = points.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        FiniteSet(v)
    }

    pub fn points(&self) -> &[Point] {
        &self.0
    }
}

impl PointSet for FiniteSet {
    fn contains(&self, x: Point) -> bool {
        self.0.binary_search(&x).is_ok()
    }
    fn count_below(&self, x: Point) -> Result<u64, SetError> {
        Ok(self.0.partition_point(|&y| y < x) as u64)
    }
    fn select(&self, r: u64) -> Result<Point, SetError> {
        self.0.get(r as usize).copied().ok_or(SetError::Exhausted)
    }
}

pub fn finite(points: impl IntoIterator<Item = Point>) -> SetRef {
    Arc::new(FiniteSet::new(points))
}

/// A set of block indices: either the listed blocks or all but them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSelection {
    listed: Vec<u64>,
    complement: bool,
}

impl BlockSelection {
    pub fn of(blocks: impl IntoIterator<Item = u64>) -> Self {
        let mut listed: Vec<u64> = blocks.into_iter().collect();
        listed.sort_unstable();
        listed.dedup();
        BlockSelection {
            listed,
            complement: false,
        }
    }

    pub fn complement_of(blocks: impl IntoIterator<Item = u64>) -> Self {
        BlockSelection {
            complement: true,
            ..BlockSelection::of(blocks)
        }
    }

    pub fn includes(&self, block: u64) -> bool {
        self.listed.binary_search(&block).is_ok() != self.complement
    }

    pub fn intersect(&self, other: &BlockSelection) -> BlockSelection {
        match (self.complement, other.complement) {
            (false, _) => BlockSelection::of(
                self.listed.iter().copied().filter(|&b| other.includes(b)),
            ),
            (true, false) => other.intersect(self),
            (true, true) => BlockSelection::complement_of(
                self.listed.iter().chain(other.listed.iter()).copied(),
            ),
        }
    }
}

struct Blocks(BlockSelection);

impl PointSet for Blocks {
    fn contains(&self, x: Point) -> bool {
        self.0.includes(blocks::block_of(x))
    }
    fn count_below(&self, x: Point) -> Result<u64, SetError> {
        let listed: u64 = self
            .0
            .listed
            .iter()
            .map(|&b| blocks::block_count_below(b, x))
            .sum();
        Ok(if self.0.complement { x - listed } else { listed })
    }
    fn select(&self, r: u64) -> Result<Point, SetError> {
        match (self.0.complement, self.0.listed.as_slice()) {
            (false, [b]) => blocks::pair_encode(*b, r).ok_or(SetError::Overflow),
            (false, []) => Err(SetError::Exhausted),
            _ => select_by_count(self, r),
        }
    }
    fn as_blocks(&self) -> Option<BlockSelection> {
        Some(self.0.clone())
    }
}

pub fn blocks(selection: BlockSelection) -> SetRef {
    Arc::new(Blocks(selection))
}

/// ℕ∖S.
struct Complement(SetRef);

impl PointSet for Complement {
    fn contains(&self, x: Point) -> bool {
        !self.0.contains(x)
    }
    fn count_below(&self, x: Point) -> Result<u64, SetError> {
        Ok(x - self.0.count_below(x)?)
    }
}

pub fn complement(set: SetRef) -> SetRef {
    if let Some(sel) = set.as_blocks() {
        let flipped = BlockSelection {
            complement: !sel.complement,
            ..sel
        };
        return blocks(flipped);
    }
    Arc::new(Complement(set))
}

/// ℕ minus a finite list.
pub fn all_except(points: impl IntoIterator<Item = Point>) -> SetRef {
    minus(all(), points)
}

/// S minus a finite list of points.
struct Minus {
    base: SetRef,
    removed: Vec<Point>,
}

impl PointSet for Minus {
    fn contains(&self, x: Point) -> bool {
        self.base.contains(x) && self.removed.binary_search(&x).is_err()
    }
    fn count_below(&self, x: Point) -> Result<u64, SetError> {
        let below = self.removed.partition_point(|&y| y < x) as u64;
        Ok(self.base.count_below(x)? - below)
    }
}

pub fn minus(base: SetRef, points: impl IntoIterator<Item = Point>) -> SetRef {
    let mut removed: Vec<Point> = points.into_iter().filter(|&p| base.contains(p)).collect();
    removed.sort_unstable();
    removed.dedup();
    if removed.is_empty() {
        return base;
    }
    Arc::new(Minus { base, removed })
}

/// Union of two disjoint sets, ordered as a sorted merge.
struct Merge(SetRef, SetRef);

impl PointSet for Merge {
    fn contains(&self, x: Point) -> bool {
        self.0.contains(x) || self.1.contains(x)
    }
    fn count_below(&self, x: Point) -> Result<u64, SetError> {
        Ok(self.0.count_below(x)? + self.1.count_below(x)?)
    }
}

pub fn merge(a: SetRef, b: SetRef) -> SetRef {
    Arc::new(Merge(a, b))
}

/// Elements of S whose rank in S is odd.
struct OddRank(SetRef);

impl PointSet for OddRank {
    fn contains(&self, x: Point) -> bool {
        self.0.contains(x) && self.0.count_below(x).is_ok_and(|c| c % 2 == 1)
    }
    fn count_below(&self, x: Point) -> Result<u64, SetError> {
        Ok(self.0.count_below(x)? / 2)
    }
    fn select(&self, r: u64) -> Result<Point, SetError> {
        self.0
            .select(r.checked_mul(2).and_then(|v| v.checked_add(1)).ok_or(SetError::Overflow)?)
    }
}

pub fn odd_rank(set: SetRef) -> SetRef {
    Arc::new(OddRank(set))
}

/// S without its first `n` elements.
struct SkipFirst(SetRef, u64);

impl PointSet for SkipFirst {
    fn contains(&self, x: Point) -> bool {
        self.0.contains(x) && self.0.count_below(x).is_ok_and(|c| c >= self.1)
    }
    fn count_below(&self, x: Point) -> Result<u64, SetError> {
        Ok(self.0.count_below(x)?.saturating_sub(self.1))
    }
    fn select(&self, r: u64) -> Result<Point, SetError> {
        self.0.select(r.checked_add(self.1).ok_or(SetError::Overflow)?)
    }
}

pub fn skip_first(set: SetRef, n: u64) -> SetRef {
    if n == 0 {
        return set;
    }
    Arc::new(SkipFirst(set, n))
}

/// Default ceiling on how far a scanned set may walk.
pub const DEFAULT_SCAN_LIMIT: u64 = 1 << 26;

struct ScanState {
    scanned_to: Point,
    members: Vec<Point>,
}

/// A set known only through its membership predicate; ranks come from a
/// lazily extended, cached scan.
struct Scanned<F> {
    pred: F,
    limit: u64,
    state: RwLock<ScanState>,
}

impl<F: Fn(Point) -> bool + Send + Sync> Scanned<F> {
    fn extend_to(&self, x: Point) -> Result<(), SetError> {
        if self.state.read().unwrap().scanned_to >= x {
            return Ok(());
        }
        if x > self.limit {
            return Err(SetError::ScanLimit);
        }
        let mut st = self.state.write().unwrap();
        while st.scanned_to < x {
            let y = st.scanned_to;
            if (self.pred)(y) {
                st.members.push(y);
            }
            st.scanned_to += 1;
        }
        Ok(())
    }

    fn extend_until(&self, count: usize) -> Result<(), SetError> {
        if self.state.read().unwrap().members.len() >= count {
            return Ok(());
        }
        let mut st = self.state.write().unwrap();
        while st.members.len() < count {
            if st.scanned_to >= self.limit {
                return Err(SetError::ScanLimit);
            }
            let y = st.scanned_to;
            if (self.pred)(y) {
                st.members.push(y);
            }
            st.scanned_to += 1;
        }
        Ok(())
    }
}

impl<F: Fn(Point) -> bool + Send + Sync> PointSet for Scanned<F> {
    fn contains(&self, x: Point) -> bool {
        (self.pred)(x)
    }
    fn count_below(&self, x: Point) -> Result<u64, SetError> {
        self.extend_to(x)?;
        let st = self.state.read().unwrap();
        Ok(st.members.partition_point(|&y| y < x) as u64)
    }
    fn select(&self, r: u64) -> Result<Point, SetError> {
        let want = usize::try_from(r).map_err(|_| SetError::Overflow)? + 1;
        self.extend_until(want)?;
        Ok(self.state.read().unwrap().members[want - 1])
    }
}

pub fn scanned(pred: impl Fn(Point) -> bool + Send + Sync + 'static) -> SetRef {
    scanned_with_limit(pred, DEFAULT_SCAN_LIMIT)
}

pub fn scanned_with_limit(pred: impl Fn(Point) -> bool + Send + Sync + 'static, limit: u64) -> SetRef {
    Arc::new(Scanned {
        pred,
        limit,
        state: RwLock::new(ScanState {
            scanned_to: 0,
            members: Vec::new(),
        }),
    })
}

/// S ∩ T, closed-form when both are block unions, else scanned.
pub fn intersect(a: SetRef, b: SetRef) -> SetRef {
    if let (Some(x), Some(y)) = (a.as_blocks(), b.as_blocks()) {
        return blocks(x.intersect(&y));
    }
    scanned(move |p| a.contains(p) && b.contains(p))
}
