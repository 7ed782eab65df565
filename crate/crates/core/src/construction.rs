//! The two generators f, g for m targets, and everything derived on the way.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::blocks::{self, block_of, build_block_maps, build_f, f_power, BlockMaps};
use crate::error::{Error, Result};
use crate::lemmas::{cancel_involution, relative_extend, relative_extend_cyclic, two_involutions};
use crate::pbij::{
    compose_all, disjoint_union_of, identity, square, CoCardinality, Eval, PartialBijection, PartialMap,
    Permutation, Point,
};
use crate::sets::{self, BlockSelection};
use crate::words::{synthesize_words, Word, WordSet};

/// Label of the permutation whose cancel involution fills slot 2m+1.
pub const PI_TAU_INV: &str = "πτ⁻¹";

/// Block indices of the construction for `m` targets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub m: u64,
    /// Number of slot blocks, 2m+2.
    pub l: u64,
    /// First slot block.
    pub s: u64,
    pub b1: u64,
    pub b2: u64,
    pub b3: u64,
    /// First tail block.
    pub t: u64,
}

impl Layout {
    pub fn slots(&self) -> std::ops::RangeInclusive<u64> {
        self.s..=self.s + self.l - 1
    }

    /// Number of involutions j_k: two per target, the cancel one, the identity.
    pub fn j_count(&self) -> usize {
        self.l as usize
    }

    /// Index of the cancel involution (1-based).
    pub fn cancel_index(&self) -> usize {
        2 * self.m as usize + 1
    }

    /// Slot block carrying j_k.
    pub fn slot_of(&self, k: usize) -> u64 {
        self.s - 1 + k as u64
    }
}

pub fn layout_for(m: u64) -> Result<Layout> {
    if m == 0 {
        return Err(Error::Precondition("at least one target is required".into()));
    }
    let l = m
        .checked_mul(2)
        .and_then(|v| v.checked_add(2))
        .filter(|&l| l < 1 << 20)
        .ok_or_else(|| Error::Precondition(format!("too many targets: {m}")))?;
    let s = l + 3;
    Ok(Layout {
        m,
        l,
        s,
        b1: s + l,
        b2: s + l + 1,
        b3: s + l + 2,
        t: s + l + 3,
    })
}

/// g with the identity in every slot.
pub fn build_g_skeleton(layout: &Layout) -> PartialBijection {
    assemble_from_slots(layout, vec![blocks::block_identity(BlockSelection::of(layout.slots()))])
}

fn assemble_from_slots(layout: &Layout, mut pieces: Vec<PartialBijection>) -> PartialBijection {
    let BlockMaps {
        split,
        spread,
        fold,
        tail,
    } = build_block_maps(layout);
    pieces.extend([split, spread, fold, tail]);
    disjoint_union_of(pieces)
        .expect("block pieces have disjoint supports")
        .labeled("g")
        .with_metadata(CoCardinality::Infinite, CoCardinality::empty())
        .with_sets(
            sets::blocks(BlockSelection::complement_of(0..layout.s)),
            sets::all(),
        )
}

/// g²: domain Ω_s ∪ … ∪ Ω_{B2}, onto ℕ. Slots contribute the identity
/// without evaluating their involutions, which is why g² does not depend
/// on what the slots carry.
pub fn g_squared(layout: &Layout, g: &PartialBijection) -> PartialBijection {
    square(g)
        .labeled("g²")
        .with_metadata(CoCardinality::Infinite, CoCardinality::empty())
        .with_sets(sets::blocks(BlockSelection::of(layout.s..=layout.b2)), sets::all())
}

/// π = f^T·g and τ = g⁻²·f^{−(s−1)}·g⁻¹·f^{−B3}, both bijections ℕ → Ω_0.
pub fn build_pi_tau(layout: &Layout, g: &PartialBijection) -> (PartialBijection, PartialBijection) {
    let ran = sets::blocks(BlockSelection::of([0]));
    let gi = g.invert();
    let g2i = g_squared(layout, g).invert();
    let pi = f_power(layout.t)
        .then(g)
        .labeled("π")
        .with_metadata(CoCardinality::empty(), CoCardinality::Infinite)
        .with_sets(sets::all(), ran.clone());
    let tau = compose_all(&[
        g2i,
        f_power(layout.s - 1).invert(),
        gi,
        f_power(layout.b3).invert(),
    ])
    .labeled("τ")
    .with_metadata(CoCardinality::empty(), CoCardinality::Infinite)
    .with_sets(sets::all(), ran);
    (pi, tau)
}

/// A target partial bijection with the description it was built from.
#[derive(Clone)]
pub struct Target {
    pub spec: TargetSpec,
    pub map: PartialBijection,
}

/// Serializable description of a target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TargetSpec {
    Finite { pairs: Vec<(Point, Point)> },
    Builtin { name: String },
    CofiniteIdentity { exceptions: Vec<(Point, Point)> },
}

impl TargetSpec {
    pub fn build(&self) -> Result<Target> {
        let map = match self {
            TargetSpec::Finite { pairs } => crate::pbij::finite_map(pairs.iter().copied())?,
            TargetSpec::Builtin { name } if name == "cofinite-identity" => crate::pbij::cofinite_identity([])?,
            TargetSpec::Builtin { name } => crate::pbij::builtin(name)?,
            TargetSpec::CofiniteIdentity { exceptions } => {
                crate::pbij::cofinite_identity(exceptions.iter().copied())?
            }
        };
        Ok(Target {
            spec: self.clone(),
            map,
        })
    }
}

/// Knobs for deliberately broken builds, used to show the checks bite.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sabotage {
    /// Swap j_a and j_b (1-based) when filling the slots of g.
    pub swap_j: Option<(usize, usize)>,
    /// Replace the involution in this slot block by a 3-cycle.
    pub non_involutive_slot: Option<u64>,
}

/// Everything the main proof constructs.
#[derive(Clone)]
pub struct Derivation {
    pub layout: Layout,
    pub budget: u64,
    pub targets: Vec<Target>,
    pub f: PartialBijection,
    pub g_skeleton: PartialBijection,
    pub g: PartialBijection,
    /// a_i with f·a_i·g² = h_i.
    pub a: Vec<Permutation>,
    /// j_1 … j_L (index k−1).
    pub j: Vec<Permutation>,
    /// (n, i_n) for each slot block n.
    pub slot_involutions: Vec<(u64, PartialBijection)>,
    pub pi: PartialBijection,
    pub tau: PartialBijection,
    /// πτ⁻¹ over the skeleton.
    pub pi_tau_inv: Permutation,
    pub words: WordSet,
    pub sabotage: Sabotage,
}

impl Derivation {
    /// j_k, 1-based.
    pub fn j_k(&self, k: usize) -> &Permutation {
        &self.j[k - 1]
    }
}

/// f, g² and the a_i — the reduction to the symmetric group.
pub fn reduce_to_symmetric(
    targets: &[PartialBijection],
    layout: &Layout,
) -> Result<(PartialBijection, PartialBijection, Vec<Permutation>)> {
    let f = build_f();
    let g2 = g_squared(layout, &build_g_skeleton(layout));
    let a = targets
        .iter()
        .map(|h| extend_for(&f, &g2, h))
        .collect::<Result<Vec<_>>>()?;
    Ok((f, g2, a))
}

fn extend_for(f: &PartialBijection, g2: &PartialBijection, h: &PartialBijection) -> Result<Permutation> {
    if h.finite_pairs().is_some() {
        // Ω_0 is disjoint from ran f and from dom g².
        relative_extend_cyclic(f, g2, h, sets::blocks(BlockSelection::of([0])))
    } else {
        relative_extend(f, g2, h)
    }
}

/// a_i and j_1 … j_L.
pub fn derive_involutions(
    targets: &[PartialBijection],
    layout: &Layout,
    budget: u64,
) -> Result<(Vec<Permutation>, Vec<Permutation>)> {
    if targets.len() as u64 != layout.m {
        return Err(Error::Precondition(format!(
            "layout is for {} targets, got {}",
            layout.m,
            targets.len()
        )));
    }
    let (_, _, a) = reduce_to_symmetric(targets, layout)?;
    let mut j = Vec::with_capacity(layout.j_count());
    for (i, ai) in a.iter().enumerate() {
        let (r, s) = two_involutions(ai, budget);
        j.push(r.labeled(format!("j{}", 2 * i + 1)));
        j.push(s.labeled(format!("j{}", 2 * i + 2)));
    }
    let (pi, tau) = build_pi_tau(layout, &build_g_skeleton(layout));
    let ptau = pi.then(&tau.invert()).labeled(PI_TAU_INV);
    j.push(cancel_involution(&ptau, budget).labeled(format!("j{}", layout.cancel_index())));
    j.push(identity().labeled(format!("j{}", layout.cancel_index() + 1)));
    Ok((a, j))
}

/// i_n = (τfⁿ)⁻¹·j·(τfⁿ) on Ω_n.
struct SlotInvolution {
    n: u64,
    /// A conjugate of an involution is one.
    involutive: bool,
    conj: PartialBijection,
    name: String,
}

impl PartialMap for SlotInvolution {
    fn apply(&self, x: Point) -> Eval {
        if block_of(x) != self.n {
            return Eval::Undefined;
        }
        self.conj.apply(x).traced(&self.name)
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
        self.name.clone()
    }
    fn in_domain(&self, x: Point) -> bool {
        block_of(x) == self.n
    }
    fn in_range(&self, y: Point) -> bool {
        block_of(y) == self.n
    }
    fn is_involution(&self) -> bool {
        self.involutive
    }
}

fn slot_involution(n: u64, j: &Permutation, tau: &PartialBijection) -> PartialBijection {
    let carry = tau.then(&f_power(n));
    let conj = compose_all(&[carry.invert(), j.clone(), carry]);
    PartialBijection::new(SlotInvolution {
        n,
        involutive: j.is_involution(),
        conj,
        name: format!("i{n}"),
    })
}

/// A 3-cycle on the first three points of Ω_n, identity elsewhere on Ω_n.
fn three_cycle_slot(n: u64) -> PartialBijection {
    let c = |k| blocks::pair_encode(n, k).expect("small code");
    let moved = crate::pbij::finite_permutation([(c(0), c(1)), (c(1), c(2)), (c(2), c(0))])
        .expect("valid cycle");
    moved.restrict_to(move |x| block_of(x) == n, CoCardinality::Infinite)
}

/// g with slot n carrying i_n; non-slot blocks as in the skeleton.
pub fn assemble_g(
    layout: &Layout,
    j: &[Permutation],
    tau: &PartialBijection,
    sabotage: &Sabotage,
) -> Result<(PartialBijection, Vec<(u64, PartialBijection)>)> {
    if j.len() != layout.j_count() {
        return Err(Error::Precondition(format!(
            "expected {} involutions, got {}",
            layout.j_count(),
            j.len()
        )));
    }
    let mut j = j.to_vec();
    if let Some((x, y)) = sabotage.swap_j {
        j.swap(x - 1, y - 1);
    }
    let slots: Vec<(u64, PartialBijection)> = (1..=j.len())
        .map(|k| {
            let n = layout.slot_of(k);
            let map = if sabotage.non_involutive_slot == Some(n) {
                three_cycle_slot(n)
            } else {
                slot_involution(n, &j[k - 1], tau)
            };
            (n, map)
        })
        .collect();
    let g = assemble_from_slots(layout, slots.iter().map(|(_, p)| p.clone()).collect());
    Ok((g, slots))
}

/// Result of the whole pipeline.
#[derive(Clone)]
pub struct EmbeddingResult {
    pub derivation: Arc<Derivation>,
    pub generator_f: PartialBijection,
    pub generator_g: PartialBijection,
    /// One word per target; may be edited to test the checks.
    pub target_words: Vec<Word>,
}

pub fn embed(targets: &[TargetSpec], budget: u64) -> Result<EmbeddingResult> {
    embed_with(targets, budget, &Sabotage::default())
}

pub fn embed_with(targets: &[TargetSpec], budget: u64, sabotage: &Sabotage) -> Result<EmbeddingResult> {
    let layout = layout_for(targets.len() as u64)?;
    let built = targets.iter().map(TargetSpec::build).collect::<Result<Vec<_>>>()?;
    let maps: Vec<PartialBijection> = built.iter().map(|t| t.map.clone()).collect();
    let f = build_f();
    let g_skeleton = build_g_skeleton(&layout);
    let (pi, tau) = build_pi_tau(&layout, &g_skeleton);
    let (a, j) = derive_involutions(&maps, &layout, budget)?;
    if let Some(n) = sabotage.non_involutive_slot {
        if !layout.slots().contains(&n) {
            return Err(Error::Precondition(format!("{n} is not a slot block")));
        }
    }
    if let Some((x, y)) = sabotage.swap_j {
        if x == 0 || y == 0 || x > j.len() || y > j.len() {
            return Err(Error::Precondition(format!("cannot swap j{x} and j{y}")));
        }
    }
    let (g, slot_involutions) = assemble_g(&layout, &j, &tau, sabotage)?;
    let pi_tau_inv = pi.then(&tau.invert()).labeled(PI_TAU_INV);
    let words = synthesize_words(&layout);
    let derivation = Derivation {
        layout,
        budget,
        targets: built,
        f: f.clone(),
        g_skeleton,
        g: g.clone(),
        a,
        j,
        slot_involutions,
        pi,
        tau,
        pi_tau_inv,
        words: words.clone(),
        sabotage: sabotage.clone(),
    };
    Ok(EmbeddingResult {
        derivation: Arc::new(derivation),
        generator_f: f,
        generator_g: g,
        target_words: words.targets.clone(),
    })
}
