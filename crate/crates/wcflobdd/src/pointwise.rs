//! Pointwise multiplication and addition.

use alloc::rc::Rc;
use alloc::vec::Vec;
use core::hash::Hash;

use hashbrown::HashMap;

use crate::construct::{
    assemble, assemble_raw, constant_one_proto, constant_zero, constant_zero_proto, leaf_normal, scalar_multiply,
};
use crate::core::{Grouping, GroupingId, Manager, PairTuple, ValueTuple, Wcflobdd, WeightedPairTuple};
use crate::error::{Error, Result};
use crate::semifield::{Field, Semifield};

/// Merges equal entries of `t`. Returns the distinct entries in order of
/// first occurrence and, per position, the 1-based class of its entry.
pub fn collapse_classes_leftmost<T: Clone + Eq + Hash>(t: &[T]) -> (Vec<T>, Vec<u32>) {
    let mut index: HashMap<&T, u32> = HashMap::new();
    let mut distinct = Vec::new();
    let classes = t
        .iter()
        .map(|x| {
            *index.entry(x).or_insert_with(|| {
                distinct.push(x.clone());
                distinct.len() as u32
            })
        })
        .collect();
    (distinct, classes)
}

/// B-connections of a grouping under construction, deduplicated.
#[derive(Clone, Debug, Default)]
pub struct BConnections {
    pub connections: Vec<(GroupingId, Vec<u32>)>,
    index: HashMap<(GroupingId, Vec<u32>), u32>,
}

impl BConnections {
    pub fn new() -> Self {
        Self::default()
    }

    /// 1-based position of `(h, rt)`, appending it if new.
    pub fn insert_b_connection(&mut self, h: GroupingId, rt: Vec<u32>) -> u32 {
        let next = self.connections.len() as u32 + 1;
        let pos = *self.index.entry((h, rt.clone())).or_insert(next);
        if pos == next {
            self.connections.push((h, rt));
        }
        pos
    }
}

/// Reduction of `g` by an exit partition.
///
/// `red[e-1]` is the class of exit `e` (compact, numbered by first
/// occurrence) and `vals[e-1]` a weight pushed onto it. Returns `(h, w)` in
/// normal form with `w · ⟦h⟧(a) = ⟦g⟧(a) · vals[e(a)]` and `h` reaching exit
/// `red[e(a)]`. Paths with `⟦g⟧(a) = 0` must have `vals[e(a)] = 0`, and a
/// value is zero exactly when its class is the zero class.
pub fn reduce<W: Semifield>(mgr: &mut Manager<W>, g: GroupingId, red: &[u32], vals: &[W]) -> (GroupingId, W) {
    debug_assert_eq!(red.len(), mgr.exits(g) as usize);
    debug_assert_eq!(vals.len(), red.len());
    let Some(c) = vals.iter().find(|v| !v.is_zero()).cloned() else {
        let level = mgr.level(g);
        return (constant_zero_proto(mgr, level), W::zero());
    };
    let normalized: Vec<W> = if c.is_one() {
        vals.to_vec()
    } else {
        let inv = c.inverse().expect("nonzero");
        vals.iter().map(|v| v.mul(&inv)).collect()
    };
    let identity = red.iter().enumerate().all(|(i, &r)| r as usize == i + 1);
    if identity && normalized.iter().all(W::is_one) && mgr.caches.canonical.contains(&g) {
        return (g, c);
    }
    let key = (g, red.to_vec(), normalized.iter().map(W::key).collect::<Vec<_>>());
    if let Some((h, w)) = mgr.caches.reduce.get(&key) {
        return (*h, w.mul(&c));
    }
    let (h, w) = reduce_uncached(mgr, g, red, &normalized);
    mgr.caches.reduce.insert(key, (h, w.clone()));
    (h, w.mul(&c))
}

fn reduce_uncached<W: Semifield>(mgr: &mut Manager<W>, g: GroupingId, red: &[u32], vals: &[W]) -> (GroupingId, W) {
    match mgr.grouping(g).clone() {
        Grouping::Fork { lw, rw } => {
            let (h, w, _) = leaf_normal(mgr, (lw.mul(&vals[0]), red[0]), (rw.mul(&vals[1]), red[1]));
            (h, w)
        }
        Grouping::DontCare { lw, rw } => {
            let (h, w, _) = leaf_normal(mgr, (lw.mul(&vals[0]), red[0]), (rw.mul(&vals[0]), red[0]));
            (h, w)
        }
        Grouping::Internal(i) => {
            let mut table = BConnections::new();
            let mut positions = Vec::with_capacity(i.b_connections.len());
            let mut weights = Vec::with_capacity(i.b_connections.len());
            for (b, rt) in i.b_connections.iter().zip(&i.b_return_tuples) {
                let classes: Vec<u32> = rt.iter().map(|&e| red[e as usize - 1]).collect();
                let sub_vals: Vec<W> = rt.iter().map(|&e| vals[e as usize - 1].clone()).collect();
                let (proj, induced) = collapse_classes_leftmost(&classes);
                let (h, w) = reduce(mgr, *b, &induced, &sub_vals);
                positions.push(table.insert_b_connection(h, proj));
                weights.push(w);
            }
            let (a, wa) = reduce(mgr, i.a_connection, &positions, &weights);
            let (h, labels) = assemble(mgr, i.level, a, &table.connections);
            debug_assert!(labels.iter().enumerate().all(|(k, &l)| l as usize == k + 1));
            (h, wa)
        }
    }
}

fn is_proto(protos: &[GroupingId], g: GroupingId, level: u32) -> bool {
    protos.get(level as usize) == Some(&g)
}

/// Product grouping of `g1` and `g2`: `⟦g⟧ = ⟦g1⟧ · ⟦g2⟧`, and exit `k` of `g`
/// is reached exactly by the assignments reaching the pair `pt[k-1]`.
pub fn pair_product<W: Semifield>(mgr: &mut Manager<W>, g1: GroupingId, g2: GroupingId) -> (GroupingId, PairTuple) {
    let level = mgr.level(g1);
    constant_zero_proto(mgr, level);
    constant_one_proto(mgr, level);
    if is_proto(&mgr.one_protos, g1, level) {
        return (g2, Rc::new((1..=mgr.exits(g2)).map(|k| (1, k)).collect()));
    }
    if is_proto(&mgr.one_protos, g2, level) {
        return (g1, Rc::new((1..=mgr.exits(g1)).map(|k| (k, 1)).collect()));
    }
    if is_proto(&mgr.zero_protos, g1, level) || is_proto(&mgr.zero_protos, g2, level) {
        let cz = mgr.zero_protos[level as usize];
        return (cz, Rc::new(alloc::vec![(1, 1)]));
    }
    if let Some((g, pt)) = mgr.caches.pair_product.get(&(g1, g2)) {
        return (*g, pt.clone());
    }
    let result = match (mgr.grouping(g1).clone(), mgr.grouping(g2).clone()) {
        (Grouping::Internal(i1), Grouping::Internal(i2)) => {
            let (a, pt_a) = pair_product(mgr, i1.a_connection, i2.a_connection);
            let mut middles = Vec::with_capacity(pt_a.len());
            for &(m1, m2) in pt_a.iter() {
                let (m1, m2) = (m1 as usize - 1, m2 as usize - 1);
                let (b, pt_b) = pair_product(mgr, i1.b_connections[m1], i2.b_connections[m2]);
                let labels = pt_b
                    .iter()
                    .map(|&(e1, e2)| {
                        (i1.b_return_tuples[m1][e1 as usize - 1], i2.b_return_tuples[m2][e2 as usize - 1])
                    })
                    .collect();
                middles.push((b, labels));
            }
            let (g, pt) = assemble_raw(mgr, level, a, &middles);
            (g, Rc::new(pt))
        }
        (x, y) => {
            let (lw, rw) = leaf_weights(&x);
            let (lw2, rw2) = leaf_weights(&y);
            let (lw, rw) = (lw.mul(&lw2), rw.mul(&rw2));
            let right = (if is_fork(&x) { 2 } else { 1 }, if is_fork(&y) { 2 } else { 1 });
            if right == (1, 1) {
                (mgr.dont_care(lw, rw), Rc::new(alloc::vec![(1, 1)]))
            } else {
                (mgr.fork(lw, rw), Rc::new(alloc::vec![(1, 1), right]))
            }
        }
    };
    mgr.caches.pair_product.insert((g1, g2), result.clone());
    result
}

fn leaf_weights<W: Clone>(g: &Grouping<W>) -> (W, W) {
    match g {
        Grouping::Fork { lw, rw } | Grouping::DontCare { lw, rw } => (lw.clone(), rw.clone()),
        Grouping::Internal(_) => unreachable!("levels agree"),
    }
}

fn is_fork<W>(g: &Grouping<W>) -> bool {
    matches!(g, Grouping::Fork { .. })
}

fn check_levels<W: Semifield>(mgr: &Manager<W>, c1: &Wcflobdd<W>, c2: &Wcflobdd<W>) -> Result<u32> {
    let (l1, l2) = (mgr.level(c1.head), mgr.level(c2.head));
    if l1 != l2 {
        return Err(Error::LevelMismatch(l1, l2));
    }
    Ok(l1)
}

/// Terminal values and reduction tuple for per-exit values `v`: nonzero
/// entries become `1̄`, then equal entries collapse leftmost.
pub fn terminal_classes<W: Semifield>(v: &[W]) -> (ValueTuple, Vec<u32>) {
    let nonzero: Vec<bool> = v.iter().map(|x| !x.is_zero()).collect();
    let (proj, red) = collapse_classes_leftmost(&nonzero);
    (ValueTuple::from_bits(&proj).expect("at most two classes"), red)
}

/// `[v1[e1] · v2[e2]]` over a pair tuple.
pub fn product_values<W: Semifield>(pt: &[(u32, u32)], v1: ValueTuple, v2: ValueTuple) -> Vec<W> {
    pt.iter().map(|&(e1, e2)| v1.value::<W>(e1).mul(&v2.value::<W>(e2))).collect()
}

/// `[q1 · v1[e1] + q2 · v2[e2]]` over a weighted pair tuple.
pub fn sum_values<W: Semifield>(pt: &[((W, u32), (W, u32))], v1: ValueTuple, v2: ValueTuple) -> Vec<W> {
    pt.iter()
        .map(|((q1, e1), (q2, e2))| q1.mul(&v1.value::<W>(*e1)).add(&q2.mul(&v2.value::<W>(*e2))))
        .collect()
}

/// Turns per-exit values into a normal-form diagram over `g`.
pub(crate) fn finish<W: Semifield>(mgr: &mut Manager<W>, g: GroupingId, factor: W, vals: &[W]) -> Wcflobdd<W> {
    let level = mgr.level(g);
    let (values, red) = terminal_classes(vals);
    let (head, w) = reduce(mgr, g, &red, vals);
    let factor = factor.mul(&w);
    if factor.is_zero() {
        return constant_zero(mgr, level);
    }
    Wcflobdd { factor, head, values }
}

/// Pointwise product `c1 · c2`.
pub fn multiply<W: Semifield>(mgr: &mut Manager<W>, c1: &Wcflobdd<W>, c2: &Wcflobdd<W>) -> Result<Wcflobdd<W>> {
    let level = check_levels(mgr, c1, c2)?;
    if c1.factor.is_zero() || c2.factor.is_zero() {
        return Ok(constant_zero(mgr, level));
    }
    let (g, pt) = pair_product(mgr, c1.head, c2.head);
    let vals: Vec<W> = product_values(&pt, c1.values, c2.values);
    Ok(finish(mgr, g, c1.factor.mul(&c2.factor), &vals))
}

type Entry<W> = ((W, u32), (W, u32));

fn entry_key<W: Semifield>(e: &Entry<W>) -> ((W::Key, u32), (W::Key, u32)) {
    let ((q1, e1), (q2, e2)) = e;
    ((q1.key(), *e1), (q2.key(), *e2))
}

/// Weighted product grouping: for every assignment `a` reaching exit `k` of
/// `g`, with `pt[k-1] = ((q1, e1), (q2, e2))`, the exits of `g1` and `g2` are
/// `e1` and `e2` and `⟦g⟧(a) · q_i = p_i · ⟦g_i⟧(a)`.
pub fn weighted_pair_product<W: Semifield>(
    mgr: &mut Manager<W>,
    g1: GroupingId,
    g2: GroupingId,
    p1: &W,
    p2: &W,
) -> (GroupingId, WeightedPairTuple<W>) {
    let level = mgr.level(g1);
    constant_zero_proto(mgr, level);
    if p1.is_zero() || is_proto(&mgr.zero_protos, g1, level) {
        let pt = (1..=mgr.exits(g2)).map(|k| ((W::zero(), 1), (p2.clone(), k))).collect();
        return (g2, Rc::new(pt));
    }
    if p2.is_zero() || is_proto(&mgr.zero_protos, g2, level) {
        let pt = (1..=mgr.exits(g1)).map(|k| ((p1.clone(), k), (W::zero(), 1))).collect();
        return (g1, Rc::new(pt));
    }
    if g1 == g2 {
        let pt = (1..=mgr.exits(g1)).map(|k| ((p1.clone(), k), (p2.clone(), k))).collect();
        return (g1, Rc::new(pt));
    }
    let ratio = p2.div(p1).expect("nonzero");
    let key = (g1, g2, ratio.key());
    let (g, pt) = match mgr.caches.weighted_pair.get(&key) {
        Some(hit) => hit.clone(),
        None => {
            let result = weighted_pair_uncached(mgr, g1, g2, &ratio);
            mgr.caches.weighted_pair.insert(key, result.clone());
            result
        }
    };
    if p1.is_one() {
        return (g, pt);
    }
    let scaled = pt.iter().map(|((q1, e1), (q2, e2))| ((q1.mul(p1), *e1), (q2.mul(p1), *e2))).collect();
    (g, Rc::new(scaled))
}

fn weighted_pair_uncached<W: Semifield>(
    mgr: &mut Manager<W>,
    g1: GroupingId,
    g2: GroupingId,
    p2: &W,
) -> (GroupingId, WeightedPairTuple<W>) {
    let p1 = W::one();
    match (mgr.grouping(g1).clone(), mgr.grouping(g2).clone()) {
        (Grouping::Internal(i1), Grouping::Internal(i2)) => {
            let (a, pt_a) = weighted_pair_product(mgr, i1.a_connection, i2.a_connection, &p1, p2);
            let mut middles = Vec::with_capacity(pt_a.len());
            let mut entries: HashMap<_, Entry<W>> = HashMap::new();
            for ((q1, m1), (q2, m2)) in pt_a.iter() {
                let (m1, m2) = (*m1 as usize - 1, *m2 as usize - 1);
                let (b, pt_b) = weighted_pair_product(mgr, i1.b_connections[m1], i2.b_connections[m2], q1, q2);
                let labels = pt_b
                    .iter()
                    .map(|((r1, e1), (r2, e2))| {
                        let entry = (
                            (r1.clone(), i1.b_return_tuples[m1][*e1 as usize - 1]),
                            (r2.clone(), i2.b_return_tuples[m2][*e2 as usize - 1]),
                        );
                        let k = entry_key(&entry);
                        entries.entry(k.clone()).or_insert(entry);
                        k
                    })
                    .collect();
                middles.push((b, labels));
            }
            let (g, labels) = assemble_raw(mgr, mgr.level(g1), a, &middles);
            let pt = labels.iter().map(|k| entries[k].clone()).collect();
            (g, Rc::new(pt))
        }
        (x, y) => {
            let (lw1, rw1) = leaf_weights(&x);
            let (lw2, rw2) = leaf_weights(&y);
            let left: Entry<W> = ((lw1, 1), (p2.mul(&lw2), 1));
            let right: Entry<W> = ((rw1, if is_fork(&x) { 2 } else { 1 }), (p2.mul(&rw2), if is_fork(&y) { 2 } else { 1 }));
            if entry_key(&left) == entry_key(&right) {
                (mgr.dont_care(W::one(), W::one()), Rc::new(alloc::vec![left]))
            } else {
                (mgr.fork(W::one(), W::one()), Rc::new(alloc::vec![left, right]))
            }
        }
    }
}

/// Pointwise sum `c1 + c2`.
pub fn add<W: Semifield>(mgr: &mut Manager<W>, c1: &Wcflobdd<W>, c2: &Wcflobdd<W>) -> Result<Wcflobdd<W>> {
    check_levels(mgr, c1, c2)?;
    if c1.factor.is_zero() {
        return Ok(c2.clone());
    }
    if c2.factor.is_zero() {
        return Ok(c1.clone());
    }
    let (g, pt) = weighted_pair_product(mgr, c1.head, c2.head, &c1.factor, &c2.factor);
    let vals: Vec<W> = sum_values(&pt, c1.values, c2.values);
    Ok(finish(mgr, g, W::one(), &vals))
}

/// Pointwise difference `c1 - c2`.
pub fn subtract<W: Field>(mgr: &mut Manager<W>, c1: &Wcflobdd<W>, c2: &Wcflobdd<W>) -> Result<Wcflobdd<W>> {
    let neg = scalar_multiply(mgr, &W::one().neg(), c2);
    add(mgr, c1, &neg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semifield::Rational;

    fn q(x: i64) -> Rational {
        Rational::from_i64(x)
    }

    #[test]
    fn multiplication_collapse_example() {
        let pt = [(1, 1), (1, 2), (2, 1)];
        let v: Vec<Rational> = product_values(&pt, ValueTuple::OneZero, ValueTuple::ZeroOne);
        assert_eq!(v, [q(0), q(1), q(0)]);
        assert_eq!(terminal_classes(&v), (ValueTuple::ZeroOne, alloc::vec![1, 2, 1]));
    }

    #[test]
    fn addition_terminal_example() {
        let pt = [((q(2), 1), (q(1), 1)), ((q(3), 2), (q(2), 1))];
        let v = sum_values(&pt, ValueTuple::OneZero, ValueTuple::One);
        assert_eq!(v, [q(3), q(2)]);
        assert_eq!(terminal_classes(&v).0, ValueTuple::One);
    }

    #[test]
    fn collapse_and_insert() {
        let (d, r) = collapse_classes_leftmost(&['b', 'a', 'b', 'c', 'a']);
        assert_eq!(d, ['b', 'a', 'c']);
        assert_eq!(r, [1, 2, 1, 3, 2]);
        let mut t = BConnections::new();
        let g = GroupingId(0);
        assert_eq!(t.insert_b_connection(g, alloc::vec![1]), 1);
        assert_eq!(t.insert_b_connection(g, alloc::vec![2, 1]), 2);
        assert_eq!(t.insert_b_connection(g, alloc::vec![1]), 1);
    }
}
