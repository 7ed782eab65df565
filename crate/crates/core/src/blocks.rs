//! The partition of ℕ into infinite blocks Ω_0, Ω_1, … by Cantor pairing,
//! the shift `f` between blocks, and the four block maps of `g`.

use crate::construction::Layout;
use crate::pbij::{CoCardinality, Eval, PartialBijection, PartialMap, Point, Unresolved};
use crate::sets::{self, BlockSelection, SetRef};

/// (i+k)(i+k+1)/2 + k, or `None` when it does not fit in a `u64`.
pub fn pair_encode(i: u64, k: u64) -> Option<Point> {
    let w = i.checked_add(k)?;
    let tri = if w % 2 == 0 {
        (w / 2).checked_mul(w.checked_add(1)?)?
    } else {
        w.checked_mul(w.div_ceil(2))?
    };
    tri.checked_add(k)
}

/// Largest w with w(w+1)/2 <= x.
fn diagonal(x: Point) -> u64 {
    let x = x as u128;
    let mut w = ((8 * x + 1).isqrt() - 1) / 2;
    while w * (w + 1) / 2 > x {
        w -= 1;
    }
    while (w + 1) * (w + 2) / 2 <= x {
        w += 1;
    }
    w as u64
}

pub fn pair_decode(x: Point) -> (u64, u64) {
    let w = diagonal(x);
    let tri = (w as u128 * (w as u128 + 1) / 2) as u64;
    let k = x - tri;
    (w - k, k)
}

pub fn block_of(x: Point) -> u64 {
    pair_decode(x).0
}

pub fn index_within(x: Point) -> u64 {
    pair_decode(x).1
}

/// |Ω_i ∩ [0, x)|.
///
/// code(i,k) = w(w+3)/2 − i with w = i+k, so the count is the number of
/// w ≥ i with w(w+3)/2 < x+i.
pub fn block_count_below(i: u64, x: Point) -> u64 {
    let bound = x as u128 + i as u128;
    if bound == 0 {
        return 0;
    }
    // largest w with w(w+3) <= 2·bound − 1
    let lim = 2 * bound - 1;
    let mut w = ((4 * lim + 9).isqrt() - 3) / 2;
    while w * (w + 3) > lim {
        w -= 1;
    }
    while (w + 1) * (w + 4) <= lim {
        w += 1;
    }
    let total = w + 1;
    total.saturating_sub(i as u128) as u64
}

fn code(i: u64, k: u64, source: &str, at: Point) -> Eval {
    match pair_encode(i, k) {
        Some(y) => Eval::Defined(y),
        None => Unresolved::overflow(source, at),
    }
}

/// code(i,k) ↦ code(i+n,k).
struct Shift(u64);

impl PartialMap for Shift {
    fn apply(&self, x: Point) -> Eval {
        let (i, k) = pair_decode(x);
        match i.checked_add(self.0) {
            Some(j) => code(j, k, &self.label(), x),
            None => Unresolved::overflow(&self.label(), x),
        }
    }
    fn unapply(&self, y: Point) -> Eval {
        let (i, k) = pair_decode(y);
        if i < self.0 {
            return Eval::Undefined;
        }
        Eval::Defined(pair_encode(i - self.0, k).expect("smaller code fits"))
    }
    fn dom_co(&self) -> CoCardinality {
        CoCardinality::empty()
    }
    fn ran_co(&self) -> CoCardinality {
        if self.0 == 0 {
            CoCardinality::empty()
        } else {
            CoCardinality::Infinite
        }
    }
    fn label(&self) -> String {
        match self.0 {
            1 => "f".into(),
            n => format!("f^{n}"),
        }
    }
    fn in_domain(&self, _: Point) -> bool {
        true
    }
    fn in_range(&self, y: Point) -> bool {
        block_of(y) >= self.0
    }
    fn domain_set(&self) -> Option<SetRef> {
        Some(sets::all())
    }
    fn range_set(&self) -> Option<SetRef> {
        Some(sets::blocks(BlockSelection::complement_of(0..self.0)))
    }
}

/// The generator f: Ω_i → Ω_{i+1}, code(i,k) ↦ code(i+1,k).
pub fn build_f() -> PartialBijection {
    PartialBijection::new(Shift(1))
}

/// fⁿ in closed form; agrees with `power(f, n)` pointwise.
pub fn f_power(n: u64) -> PartialBijection {
    PartialBijection::new(Shift(n))
}

/// Identity on a union of blocks.
struct BlockIdentity(BlockSelection);

impl PartialMap for BlockIdentity {
    fn apply(&self, x: Point) -> Eval {
        if self.0.includes(block_of(x)) {
            Eval::Defined(x)
        } else {
            Eval::Undefined
        }
    }
    fn unapply(&self, y: Point) -> Eval {
        self.apply(y)
    }
    fn dom_co(&self) -> CoCardinality {
        CoCardinality::Infinite
    }
    fn ran_co(&self) -> CoCardinality {
        CoCardinality::Infinite
    }
    fn label(&self) -> String {
        "slot-identity".into()
    }
    fn is_involution(&self) -> bool {
        true
    }
    fn domain_set(&self) -> Option<SetRef> {
        Some(sets::blocks(self.0.clone()))
    }
    fn range_set(&self) -> Option<SetRef> {
        Some(sets::blocks(self.0.clone()))
    }
}

pub fn block_identity(selection: BlockSelection) -> PartialBijection {
    PartialBijection::new(BlockIdentity(selection))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Split,
    Spread,
    Fold,
    Tail,
}

struct BlockMap {
    kind: Kind,
    layout: Layout,
}

impl BlockMap {
    fn name(&self) -> &'static str {
        match self.kind {
            Kind::Split => "split",
            Kind::Spread => "spread",
            Kind::Fold => "fold",
            Kind::Tail => "tail",
        }
    }
}

impl PartialMap for BlockMap {
    fn apply(&self, x: Point) -> Eval {
        let l = &self.layout;
        let (i, k) = pair_decode(x);
        let name = self.name();
        match self.kind {
            Kind::Split if i == l.b1 => {
                if k % 2 == 0 {
                    code(l.b1, k / 2, name, x)
                } else {
                    code(l.b2, k / 2, name, x)
                }
            }
            Kind::Spread if i == l.b2 => {
                let (n, kk) = pair_decode(k);
                match l.b3.checked_add(n) {
                    Some(b) => code(b, kk, name, x),
                    None => Unresolved::overflow(name, x),
                }
            }
            Kind::Fold if i == l.b3 => {
                let width = l.s - 1;
                code(k % width + 1, k / width, name, x)
            }
            Kind::Tail if i >= l.t => match pair_encode(i - l.t, k) {
                Some(kk) => code(0, kk, name, x),
                None => Unresolved::overflow(name, x),
            },
            _ => Eval::Undefined,
        }
    }

    fn unapply(&self, y: Point) -> Eval {
        let l = &self.layout;
        let (i, k) = pair_decode(y);
        let name = self.name();
        let twice = |k: u64, extra: u64| k.checked_mul(2).and_then(|v| v.checked_add(extra));
        match self.kind {
            Kind::Split if i == l.b1 || i == l.b2 => {
                match twice(k, u64::from(i == l.b2)) {
                    Some(kk) => code(l.b1, kk, name, y),
                    None => Unresolved::overflow(name, y),
                }
            }
            Kind::Spread if i >= l.b3 => match pair_encode(i - l.b3, k) {
                Some(kk) => code(l.b2, kk, name, y),
                None => Unresolved::overflow(name, y),
            },
            Kind::Fold if (1..l.s).contains(&i) => {
                let kk = k.checked_mul(l.s - 1).and_then(|v| v.checked_add(i - 1));
                match kk {
                    Some(kk) => code(l.b3, kk, name, y),
                    None => Unresolved::overflow(name, y),
                }
            }
            Kind::Tail if i == 0 => {
                let (n, kk) = pair_decode(k);
                match l.t.checked_add(n) {
                    Some(b) => code(b, kk, name, y),
                    None => Unresolved::overflow(name, y),
                }
            }
            _ => Eval::Undefined,
        }
    }

    fn dom_co(&self) -> CoCardinality {
        CoCardinality::Infinite
    }
    fn ran_co(&self) -> CoCardinality {
        CoCardinality::Infinite
    }
    fn label(&self) -> String {
        self.name().into()
    }
    fn domain_set(&self) -> Option<SetRef> {
        let l = &self.layout;
        Some(sets::blocks(match self.kind {
            Kind::Split => BlockSelection::of([l.b1]),
            Kind::Spread => BlockSelection::of([l.b2]),
            Kind::Fold => BlockSelection::of([l.b3]),
            Kind::Tail => BlockSelection::complement_of(0..l.t),
        }))
    }
    fn range_set(&self) -> Option<SetRef> {
        let l = &self.layout;
        Some(sets::blocks(match self.kind {
            Kind::Split => BlockSelection::of([l.b1, l.b2]),
            Kind::Spread => BlockSelection::complement_of(0..l.b3),
            Kind::Fold => BlockSelection::of(1..l.s),
            Kind::Tail => BlockSelection::of([0]),
        }))
    }
}

/// The four non-slot pieces of g.
#[derive(Clone)]
pub struct BlockMaps {
    /// Ω_{B1} → Ω_{B1} ∪ Ω_{B2}
    pub split: PartialBijection,
    /// Ω_{B2} → ⋃_{n≥B3} Ω_n
    pub spread: PartialBijection,
    /// Ω_{B3} → Ω_1 ∪ … ∪ Ω_{s−1}
    pub fold: PartialBijection,
    /// ⋃_{n≥T} Ω_n → Ω_0
    pub tail: PartialBijection,
}

impl BlockMaps {
    pub fn all(&self) -> [PartialBijection; 4] {
        [
            self.split.clone(),
            self.spread.clone(),
            self.fold.clone(),
            self.tail.clone(),
        ]
    }
}

pub fn build_block_maps(layout: &Layout) -> BlockMaps {
    let make = |kind| {
        PartialBijection::new(BlockMap {
            kind,
            layout: layout.clone(),
        })
    };
    BlockMaps {
        split: make(Kind::Split),
        spread: make(Kind::Spread),
        fold: make(Kind::Fold),
        tail: make(Kind::Tail),
    }
}
