//! Constants, fold/unfold and the standard families.

use alloc::vec;
use alloc::vec::Vec;
use core::hash::Hash;

use hashbrown::HashMap;
use num_bigint::BigInt;
use num_traits::One;

use crate::core::{Grouping, GroupingId, InternalGrouping, Manager, ValueTuple, Wcflobdd};
use crate::error::{Error, Result};
use crate::matrix::kronecker;
use crate::semifield::{Field, Numeric, Rational, Semifield, Tropical};

/// The level-k grouping of the constant-zero function.
pub fn constant_zero_proto<W: Semifield>(mgr: &mut Manager<W>, level: u32) -> GroupingId {
    while mgr.zero_protos.len() <= level as usize {
        let k = mgr.zero_protos.len() as u32;
        let g = if k == 0 {
            mgr.dont_care(W::zero(), W::one())
        } else {
            let below = mgr.zero_protos[k as usize - 1];
            chain(mgr, k, below)
        };
        mgr.caches.canonical.insert(g);
        mgr.zero_protos.push(g);
    }
    mgr.zero_protos[level as usize]
}

/// The level-k grouping of the constant-one function.
pub fn constant_one_proto<W: Semifield>(mgr: &mut Manager<W>, level: u32) -> GroupingId {
    while mgr.one_protos.len() <= level as usize {
        let k = mgr.one_protos.len() as u32;
        let g = if k == 0 {
            mgr.dont_care(W::one(), W::one())
        } else {
            let below = mgr.one_protos[k as usize - 1];
            chain(mgr, k, below)
        };
        mgr.caches.canonical.insert(g);
        mgr.one_protos.push(g);
    }
    mgr.one_protos[level as usize]
}

/// `Internal(g, [g], [[1]], 1)`.
fn chain<W: Semifield>(mgr: &mut Manager<W>, level: u32, g: GroupingId) -> GroupingId {
    mgr.intern_unchecked(Grouping::Internal(InternalGrouping {
        level,
        a_connection: g,
        b_connections: vec![g],
        b_return_tuples: vec![vec![1]],
        number_of_exits: 1,
    }))
}

pub fn constant_zero<W: Semifield>(mgr: &mut Manager<W>, level: u32) -> Wcflobdd<W> {
    Wcflobdd { factor: W::zero(), head: constant_zero_proto(mgr, level), values: ValueTuple::Zero }
}

pub fn constant_one<W: Semifield>(mgr: &mut Manager<W>, level: u32) -> Wcflobdd<W> {
    Wcflobdd { factor: W::one(), head: constant_one_proto(mgr, level), values: ValueTuple::One }
}

/// The constant function `a ↦ w`.
pub fn constant<W: Semifield>(mgr: &mut Manager<W>, level: u32, w: W) -> Wcflobdd<W> {
    let one = constant_one(mgr, level);
    scalar_multiply(mgr, &w, &one)
}

/// `w · c`, by scaling the factor weight.
pub fn scalar_multiply<W: Semifield>(mgr: &mut Manager<W>, w: &W, c: &Wcflobdd<W>) -> Wcflobdd<W> {
    let factor = w.mul(&c.factor);
    if factor.is_zero() {
        return constant_zero(mgr, mgr.level(c.head));
    }
    Wcflobdd { factor, head: c.head, values: c.values }
}

/// Normal form of a level-0 grouping from its two path values and exit labels.
/// A zero value must carry the zero label, which no nonzero value shares.
pub(crate) fn leaf_normal<W: Semifield, L: Clone + Eq>(
    mgr: &mut Manager<W>,
    (u0, c0): (W, L),
    (u1, c1): (W, L),
) -> (GroupingId, W, Vec<L>) {
    let (lw, rw, w) = if !u0.is_zero() {
        let r = u1.div(&u0).expect("nonzero");
        (W::one(), r, u0)
    } else if !u1.is_zero() {
        (W::zero(), W::one(), u1)
    } else {
        (W::zero(), W::one(), W::zero())
    };
    let (g, labels) = if c0 == c1 {
        (mgr.dont_care(lw, rw), vec![c0])
    } else {
        (mgr.fork(lw, rw), vec![c0, c1])
    };
    mgr.caches.canonical.insert(g);
    (g, w, labels)
}

/// Interns the internal grouping with A-connection `a` whose i-th middle
/// vertex calls `middles[i].0` and labels its exits with `middles[i].1`.
/// Exits are numbered by first occurrence of their label; the labels of the
/// new exits are returned in that order.
pub(crate) fn assemble<W: Semifield, L: Clone + Eq + Hash>(
    mgr: &mut Manager<W>,
    level: u32,
    a: GroupingId,
    middles: &[(GroupingId, Vec<L>)],
) -> (GroupingId, Vec<L>) {
    let (g, labels) = assemble_raw(mgr, level, a, middles);
    mgr.caches.canonical.insert(g);
    (g, labels)
}

/// [`assemble`] for groupings that need not be in normal form.
pub(crate) fn assemble_raw<W: Semifield, L: Clone + Eq + Hash>(
    mgr: &mut Manager<W>,
    level: u32,
    a: GroupingId,
    middles: &[(GroupingId, Vec<L>)],
) -> (GroupingId, Vec<L>) {
    let mut index: HashMap<L, u32> = HashMap::new();
    let mut labels = Vec::new();
    let mut b_connections = Vec::with_capacity(middles.len());
    let mut b_return_tuples = Vec::with_capacity(middles.len());
    for (h, ls) in middles {
        let rt = ls
            .iter()
            .map(|l| {
                *index.entry(l.clone()).or_insert_with(|| {
                    labels.push(l.clone());
                    labels.len() as u32
                })
            })
            .collect();
        b_connections.push(*h);
        b_return_tuples.push(rt);
    }
    let g = mgr.intern_unchecked(Grouping::Internal(InternalGrouping {
        level,
        a_connection: a,
        b_connections,
        b_return_tuples,
        number_of_exits: labels.len() as u32,
    }));
    (g, labels)
}

/// Normal form of the level-k function whose leaves, in assignment order,
/// are `leaves[i].0`, with exit labels `leaves[i].1`. Zero leaves must carry
/// the zero label, which no nonzero leaf shares.
pub(crate) fn fold_labeled<W: Semifield, L: Clone + Eq + Hash>(
    mgr: &mut Manager<W>,
    level: u32,
    leaves: &[(W, L)],
) -> (GroupingId, W, Vec<L>) {
    if leaves.iter().all(|(w, _)| w.is_zero()) {
        return (constant_zero_proto(mgr, level), W::zero(), vec![leaves[0].1.clone()]);
    }
    if level == 0 {
        return leaf_normal(mgr, leaves[0].clone(), leaves[1].clone());
    }
    let chunk = leaves.len() >> (1usize << (level - 1));
    let mut index: HashMap<(GroupingId, Vec<L>), u32> = HashMap::new();
    let mut middles = Vec::new();
    let mut upper = Vec::with_capacity(leaves.len() / chunk);
    for part in leaves.chunks(chunk) {
        let (h, w, ls) = fold_labeled(mgr, level - 1, part);
        let m = *index.entry((h, ls.clone())).or_insert_with(|| {
            middles.push((h, ls));
            middles.len() as u32 - 1
        });
        upper.push((w, m));
    }
    let (a, wa, order) = fold_labeled(mgr, level - 1, &upper);
    debug_assert!(order.iter().enumerate().all(|(i, &m)| m as usize == i));
    let (g, labels) = assemble(mgr, level, a, &middles);
    (g, wa, labels)
}

/// Level of a table with `len` leaves, if `len = 2^(2^k)`.
pub fn level_of_leaf_count(len: usize) -> Option<u32> {
    if !len.is_power_of_two() || len < 2 {
        return None;
    }
    let vars = len.trailing_zeros();
    vars.is_power_of_two().then(|| vars.trailing_zeros())
}

/// Builds the canonical diagram of a value table in assignment order.
pub fn fold<W: Semifield>(mgr: &mut Manager<W>, leaves: &[W]) -> Result<Wcflobdd<W>> {
    let level = level_of_leaf_count(leaves.len()).ok_or_else(|| {
        Error::Usage(alloc::format!("a table needs 2^(2^k) leaves, got {}", leaves.len()))
    })?;
    let labeled: Vec<(W, bool)> = leaves.iter().map(|w| (w.clone(), !w.is_zero())).collect();
    let (head, factor, labels) = fold_labeled(mgr, level, &labeled);
    if factor.is_zero() {
        return Ok(constant_zero(mgr, level));
    }
    let values = ValueTuple::from_bits(&labels).expect("at most two exits");
    Ok(Wcflobdd { factor, head, values })
}

/// The value table of `c`, in assignment order.
pub fn unfold<W: Semifield>(mgr: &Manager<W>, c: &Wcflobdd<W>) -> Vec<W> {
    mgr.unfold_values(c)
}

/// A weighted decision tree in normal form: every node's edge weights are
/// `(1, r)` or `(0, 1)` and leaves are `0` or `1`.
#[derive(Clone, Debug)]
pub struct WeightedDecisionTree<W> {
    pub factor: W,
    /// Edge weights of the internal nodes in heap order (children of node
    /// `i` are `2i+1` and `2i+2`).
    pub edges: Vec<(W, W)>,
    pub leaves: Vec<bool>,
}

impl<W: Semifield> WeightedDecisionTree<W> {
    pub fn evaluate(&self, a: &[bool]) -> W {
        let mut node = 0;
        let mut w = self.factor.clone();
        for &bit in a {
            let (l, r) = &self.edges[node];
            w = w.mul(if bit { r } else { l });
            node = 2 * node + 1 + bit as usize;
        }
        if self.leaves[node - self.edges.len()] {
            w
        } else {
            W::zero()
        }
    }
}

/// Normalizes a value table (of any power-of-two length) into a weighted
/// decision tree.
pub fn tree_to_wdt<W: Semifield>(leaves: &[W]) -> Result<WeightedDecisionTree<W>> {
    if !leaves.len().is_power_of_two() || leaves.len() < 2 {
        return Err(Error::Usage(alloc::format!("{} leaves is not a power of two", leaves.len())));
    }
    let n = leaves.len();
    let mut value: Vec<W> = vec![W::zero(); 2 * n - 1];
    value[n - 1..].clone_from_slice(leaves);
    let mut edges = vec![(W::zero(), W::one()); n - 1];
    for i in (0..n - 1).rev() {
        let (v0, v1) = (&value[2 * i + 1], &value[2 * i + 2]);
        let (e, v) = if !v0.is_zero() {
            ((W::one(), v1.div(v0).expect("nonzero")), v0.clone())
        } else if !v1.is_zero() {
            ((W::zero(), W::one()), v1.clone())
        } else {
            ((W::zero(), W::one()), W::zero())
        };
        edges[i] = e;
        value[i] = v;
    }
    Ok(WeightedDecisionTree {
        factor: value[0].clone(),
        edges,
        leaves: leaves.iter().map(|w| !w.is_zero()).collect(),
    })
}

/// Instances that can hold the leaf weights `2^(2^i)` of the exponential family.
pub trait ExpWeight: Semifield {
    fn exp_weight(i: u32) -> Result<Self>;
}

impl ExpWeight for Rational {
    fn exp_weight(i: u32) -> Result<Self> {
        if i > 24 {
            return Err(Error::Domain(alloc::format!("2^(2^{i}) is too large for an exact rational")));
        }
        Ok(Rational::from_integer(BigInt::one() << (1usize << i)))
    }
}

impl ExpWeight for Tropical {
    /// The exponent `2^i`.
    fn exp_weight(i: u32) -> Result<Self> {
        Ok(Tropical::finite(Rational::from_integer(BigInt::one() << i as usize)))
    }
}

impl ExpWeight for f64 {
    fn exp_weight(i: u32) -> Result<Self> {
        if i > 9 {
            return Err(Error::Domain(alloc::format!("2^(2^{i}) overflows f64")));
        }
        Ok(libm::exp2(libm::exp2(i as f64)))
    }
}

/// `EXP_n(x) = 2^(x_{n-1} … x_0)` over `n = 2^l` variables, the first
/// variable most significant: one don't-care leaf `(1, 2^(2^i))` per variable.
pub fn exp_family<W: ExpWeight>(mgr: &mut Manager<W>, n: usize) -> Result<Wcflobdd<W>> {
    if !n.is_power_of_two() {
        return Err(Error::Usage(alloc::format!("EXP_n needs n a power of two, got {n}")));
    }
    let level = n.trailing_zeros();
    let head = exp_grouping(mgr, level, 0, n)?;
    Ok(Wcflobdd { factor: W::one(), head, values: ValueTuple::One })
}

fn exp_grouping<W: ExpWeight>(mgr: &mut Manager<W>, level: u32, first: usize, n: usize) -> Result<GroupingId> {
    let g = if level == 0 {
        let w = W::exp_weight((n - 1 - first) as u32)?;
        mgr.dont_care(W::one(), w)
    } else {
        let half = 1usize << (level - 1);
        let a = exp_grouping(mgr, level - 1, first, n)?;
        let b = exp_grouping(mgr, level - 1, first + half, n)?;
        mgr.intern_unchecked(Grouping::Internal(InternalGrouping {
            level,
            a_connection: a,
            b_connections: vec![b],
            b_return_tuples: vec![vec![1]],
            number_of_exits: 1,
        }))
    };
    mgr.caches.canonical.insert(g);
    Ok(g)
}

/// The `2^(2^(l-1))`-square Walsh matrix `[[1,1],[1,-1]]^{⊗}` times
/// `scale^(2^(l-1))`, at level `l ≥ 1`.
pub fn hadamard_with_scale<W: Field>(mgr: &mut Manager<W>, level: u32, scale: &W) -> Result<Wcflobdd<W>> {
    if level == 0 {
        return Err(Error::Usage("Hadamard matrices start at level 1".into()));
    }
    let one = W::one();
    let mut h = fold(mgr, &[one.clone(), one.clone(), one.clone(), one.neg()])?;
    h.factor = h.factor.mul(scale);
    for k in 2..=level {
        h = Wcflobdd {
            factor: h.factor.mul(&h.factor),
            head: chain(mgr, k, h.head),
            values: ValueTuple::One,
        };
        mgr.caches.canonical.insert(h.head);
    }
    Ok(h)
}

/// `H_{2^l}` with entries `±(1/√2)^(2^(l-1))`.
pub fn hadamard_family<W: Numeric>(mgr: &mut Manager<W>, level: u32) -> Result<Wcflobdd<W>> {
    hadamard_with_scale(mgr, level, &W::from_f64(core::f64::consts::FRAC_1_SQRT_2))
}

/// `H_{2^l}` for `l ≥ 2`, whose entries `±2^(-2^(l-2))` are exact in any
/// field containing `1/2`.
pub fn hadamard_dyadic<W: Field>(mgr: &mut Manager<W>, level: u32) -> Result<Wcflobdd<W>> {
    if level < 2 {
        return Err(Error::Domain("H at level 1 has irrational entries".into()));
    }
    let mut h = hadamard_with_scale(mgr, level, &W::one())?;
    let mut f = W::from_ratio(1, 2);
    for _ in 2..level {
        f = f.mul(&f);
    }
    h.factor = h.factor.mul(&f);
    Ok(h)
}

fn tensor_power<W: Semifield>(mgr: &mut Manager<W>, base: Wcflobdd<W>, level: u32) -> Result<Wcflobdd<W>> {
    if level == 0 {
        return Err(Error::Usage("matrices start at level 1".into()));
    }
    let mut m = base;
    for _ in 1..level {
        m = kronecker(mgr, &m, &m)?;
    }
    Ok(m)
}

/// Identity matrix at level `l ≥ 1`.
pub fn identity_matrix<W: Semifield>(mgr: &mut Manager<W>, level: u32) -> Result<Wcflobdd<W>> {
    let (o, z) = (W::one(), W::zero());
    let base = fold(mgr, &[o.clone(), z.clone(), z, o])?;
    let id = tensor_power(mgr, base, level)?;
    let slot = level as usize;
    if mgr.identity_protos.len() <= slot {
        mgr.identity_protos.resize(slot + 1, None);
    }
    mgr.identity_protos[slot] = Some(id.head);
    Ok(id)
}

/// The bit-flip permutation `X ⊗ … ⊗ X` at level `l ≥ 1`.
pub fn not_matrix<W: Semifield>(mgr: &mut Manager<W>, level: u32) -> Result<Wcflobdd<W>> {
    let (o, z) = (W::one(), W::zero());
    let base = fold(mgr, &[z.clone(), o.clone(), o, z])?;
    tensor_power(mgr, base, level)
}
