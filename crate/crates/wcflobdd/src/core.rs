//! Grouping store, the diagram triple and evaluation.

use alloc::rc::Rc;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;

use crate::error::{Error, Result};
use crate::semifield::Semifield;

/// Handle of an interned grouping. Equal handles within one [`Manager`] mean
/// structurally equal groupings.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GroupingId(pub(crate) u32);

impl GroupingId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Assignment bits in the library-wide order: the A half of a level-k
/// diagram reads the first `2^(k-1)` bits, the B half the rest.
pub type Assignment = Vec<bool>;

/// A level-k grouping with `k ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InternalGrouping {
    pub level: u32,
    pub a_connection: GroupingId,
    pub b_connections: Vec<GroupingId>,
    /// 1-based exit indices of this grouping, one tuple per B-connection.
    pub b_return_tuples: Vec<Vec<u32>>,
    pub number_of_exits: u32,
}

impl InternalGrouping {
    /// The A-connection return tuple, always `[1..=middles]`.
    pub fn a_return_tuple(&self) -> Vec<u32> {
        (1..=self.b_connections.len() as u32).collect()
    }
}

#[derive(Clone, Debug)]
pub enum Grouping<W> {
    Fork { lw: W, rw: W },
    DontCare { lw: W, rw: W },
    Internal(InternalGrouping),
}

impl<W: Semifield> Grouping<W> {
    pub fn level(&self) -> u32 {
        match self {
            Grouping::Internal(i) => i.level,
            _ => 0,
        }
    }

    pub fn number_of_exits(&self) -> u32 {
        match self {
            Grouping::Fork { .. } => 2,
            Grouping::DontCare { .. } => 1,
            Grouping::Internal(i) => i.number_of_exits,
        }
    }

    pub(crate) fn key(&self) -> NodeKey<W::Key> {
        match self {
            Grouping::Fork { lw, rw } => NodeKey::Fork(lw.key(), rw.key()),
            Grouping::DontCare { lw, rw } => NodeKey::DontCare(lw.key(), rw.key()),
            Grouping::Internal(i) => NodeKey::Internal(i.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum NodeKey<K> {
    Fork(K, K),
    DontCare(K, K),
    Internal(InternalGrouping),
}

/// Terminal values attached to the exits of the head grouping.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ValueTuple {
    Zero,
    One,
    ZeroOne,
    OneZero,
}

impl ValueTuple {
    pub fn bits(self) -> &'static [bool] {
        match self {
            ValueTuple::Zero => &[false],
            ValueTuple::One => &[true],
            ValueTuple::ZeroOne => &[false, true],
            ValueTuple::OneZero => &[true, false],
        }
    }

    pub fn from_bits(bits: &[bool]) -> Option<ValueTuple> {
        match bits {
            [false] => Some(ValueTuple::Zero),
            [true] => Some(ValueTuple::One),
            [false, true] => Some(ValueTuple::ZeroOne),
            [true, false] => Some(ValueTuple::OneZero),
            _ => None,
        }
    }

    pub fn len(self) -> usize {
        self.bits().len()
    }

    pub fn is_empty(self) -> bool {
        false
    }

    /// 1-based position of the zero terminal, if any.
    pub fn zero_position(self) -> Option<u32> {
        self.bits().iter().position(|b| !b).map(|p| p as u32 + 1)
    }

    pub fn value<W: Semifield>(self, exit: u32) -> W {
        if self.bits()[exit as usize - 1] {
            W::one()
        } else {
            W::zero()
        }
    }
}

impl fmt::Display for ValueTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<&str> = self.bits().iter().map(|&b| if b { "1" } else { "0" }).collect();
        write!(f, "[{}]", s.join(","))
    }
}

/// A diagram `⟨f, G, V⟩` denoting `a ↦ f · ⟦G⟧(a) · V[⟨G⟩(a)]`.
#[derive(Clone, Debug)]
pub struct Wcflobdd<W> {
    pub factor: W,
    pub head: GroupingId,
    pub values: ValueTuple,
}

impl<W: Semifield> Wcflobdd<W> {
    /// Handle identity: same factor key, head handle and value tuple.
    pub fn same(&self, other: &Self) -> bool {
        self.head == other.head && self.values == other.values && self.factor.same(&other.factor)
    }
}

impl<W: Semifield> PartialEq for Wcflobdd<W> {
    fn eq(&self, other: &Self) -> bool {
        self.same(other)
    }
}

#[derive(Clone, Debug)]
struct Node<W> {
    grouping: Grouping<W>,
    level: u32,
    exits: u32,
}

pub(crate) type PairTuple = Rc<Vec<(u32, u32)>>;
pub(crate) type WeightedPairTuple<W> = Rc<Vec<((W, u32), (W, u32))>>;

/// Memo tables for the operations. None of them affects results.
pub(crate) struct Caches<W: Semifield> {
    pub pair_product: HashMap<(GroupingId, GroupingId), (GroupingId, PairTuple)>,
    pub weighted_pair: HashMap<(GroupingId, GroupingId, W::Key), (GroupingId, WeightedPairTuple<W>)>,
    pub reduce: HashMap<(GroupingId, Vec<u32>, Vec<W::Key>), (GroupingId, W)>,
    pub matmul: HashMap<(GroupingId, GroupingId), (GroupingId, Rc<Vec<crate::matrix::BilinearPolynomial<W>>>)>,
    pub weights: HashMap<GroupingId, Rc<Vec<W>>>,
    pub branches: HashMap<(GroupingId, u32), Rc<Vec<(u32, u32, W)>>>,
    /// Natural logarithms of path weights, for sampling real diagrams.
    pub log_weights: HashMap<GroupingId, Rc<Vec<f64>>>,
    pub log_branches: HashMap<(GroupingId, u32), Rc<Vec<(u32, u32, f64)>>>,
    pub zero_exit: HashMap<GroupingId, Option<u32>>,
    /// Groupings known to be in normal form (outputs of fold and reduce).
    pub canonical: hashbrown::HashSet<GroupingId>,
}

impl<W: Semifield> Default for Caches<W> {
    fn default() -> Self {
        Caches {
            pair_product: HashMap::new(),
            weighted_pair: HashMap::new(),
            reduce: HashMap::new(),
            matmul: HashMap::new(),
            weights: HashMap::new(),
            branches: HashMap::new(),
            log_weights: HashMap::new(),
            log_branches: HashMap::new(),
            zero_exit: HashMap::new(),
            canonical: hashbrown::HashSet::new(),
        }
    }
}

/// Owner of the unique table and all operation caches. Handles are only
/// meaningful for the manager that issued them.
pub struct Manager<W: Semifield> {
    nodes: Vec<Node<W>>,
    unique: HashMap<NodeKey<W::Key>, GroupingId>,
    pub(crate) zero_protos: Vec<GroupingId>,
    pub(crate) one_protos: Vec<GroupingId>,
    pub(crate) identity_protos: Vec<Option<GroupingId>>,
    pub(crate) caches: Caches<W>,
}

impl<W: Semifield> Default for Manager<W> {
    fn default() -> Self {
        Self::new()
    }
}

impl<W: Semifield> Manager<W> {
    pub fn new() -> Self {
        Manager {
            nodes: Vec::new(),
            unique: HashMap::new(),
            zero_protos: Vec::new(),
            one_protos: Vec::new(),
            identity_protos: Vec::new(),
            caches: Caches::default(),
        }
    }

    /// Number of interned groupings.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn clear_caches(&mut self) {
        self.caches = Caches::default();
    }

    pub fn grouping(&self, g: GroupingId) -> &Grouping<W> {
        &self.nodes[g.index()].grouping
    }

    pub fn level(&self, g: GroupingId) -> u32 {
        self.nodes[g.index()].level
    }

    pub fn exits(&self, g: GroupingId) -> u32 {
        self.nodes[g.index()].exits
    }

    pub fn contains(&self, g: GroupingId) -> bool {
        g.index() < self.nodes.len()
    }

    /// Interns without checking any invariant. Callers that accept untrusted
    /// structure (importers, hand-built counterexamples) should run
    /// [`crate::validate`] afterwards. Connection handles must exist.
    pub fn intern_unchecked(&mut self, g: Grouping<W>) -> GroupingId {
        let key = g.key();
        if let Some(&id) = self.unique.get(&key) {
            return id;
        }
        let id = GroupingId(self.nodes.len() as u32);
        let level = g.level();
        let exits = g.number_of_exits();
        self.nodes.push(Node { grouping: g, level, exits });
        self.unique.insert(key, id);
        id
    }

    /// Interns `g` after checking its local structural and weight invariants.
    pub fn representative_grouping(&mut self, g: Grouping<W>) -> Result<GroupingId> {
        if let Some(problem) = self.local_violation(&g) {
            return Err(Error::InvalidGrouping(problem));
        }
        Ok(self.intern_unchecked(g))
    }

    pub(crate) fn lookup(&self, g: &Grouping<W>) -> Option<GroupingId> {
        self.unique.get(&g.key()).copied()
    }

    pub(crate) fn local_violation(&self, g: &Grouping<W>) -> Option<alloc::string::String> {
        crate::validate::local_violations(self, g).into_iter().next().map(|v| v.detail)
    }

    pub(crate) fn fork(&mut self, lw: W, rw: W) -> GroupingId {
        self.intern_unchecked(Grouping::Fork { lw, rw })
    }

    pub(crate) fn dont_care(&mut self, lw: W, rw: W) -> GroupingId {
        self.intern_unchecked(Grouping::DontCare { lw, rw })
    }

    /// Evaluates `c` at `a` (`|a| = 2^level`).
    pub fn evaluate(&self, c: &Wcflobdd<W>, a: &[bool]) -> Result<W> {
        self.check_len(c.head, a)?;
        if c.factor.is_zero() {
            return Ok(W::zero());
        }
        let (w, exit) = self.eval_grouping(c.head, a);
        Ok(c.factor.mul(&w).mul(&c.values.value::<W>(exit)))
    }

    /// Exit index (1-based) reached by `a` in `g`.
    pub fn trace_exit(&self, g: GroupingId, a: &[bool]) -> Result<u32> {
        self.check_len(g, a)?;
        Ok(self.eval_grouping(g, a).1)
    }

    fn check_len(&self, g: GroupingId, a: &[bool]) -> Result<()> {
        let expected = 1usize << self.level(g);
        if a.len() != expected {
            return Err(Error::AssignmentLength { got: a.len(), expected });
        }
        Ok(())
    }

    /// Path weight and exit for `a`.
    pub(crate) fn eval_grouping(&self, g: GroupingId, a: &[bool]) -> (W, u32) {
        match self.grouping(g) {
            Grouping::Fork { lw, rw } => {
                if a[0] {
                    (rw.clone(), 2)
                } else {
                    (lw.clone(), 1)
                }
            }
            Grouping::DontCare { lw, rw } => (if a[0] { rw.clone() } else { lw.clone() }, 1),
            Grouping::Internal(i) => {
                let half = a.len() / 2;
                let (wa, m) = self.eval_grouping(i.a_connection, &a[..half]);
                let j = m as usize - 1;
                let (wb, e) = self.eval_grouping(i.b_connections[j], &a[half..]);
                (wa.mul(&wb), i.b_return_tuples[j][e as usize - 1])
            }
        }
    }

    /// Every grouping reachable from `g`, in depth-first discovery order
    /// (A-connection before B-connections).
    pub fn reachable(&self, g: GroupingId) -> Vec<GroupingId> {
        let mut seen = hashbrown::HashSet::new();
        let mut order = Vec::new();
        let mut stack = alloc::vec![g];
        while let Some(x) = stack.pop() {
            if !seen.insert(x) {
                continue;
            }
            order.push(x);
            if let Grouping::Internal(i) = self.grouping(x) {
                for &b in i.b_connections.iter().rev() {
                    stack.push(b);
                }
                stack.push(i.a_connection);
            }
        }
        order
    }

    /// All values of `c`, in assignment order (bit 0 most significant).
    /// Exponential; meant for small levels.
    pub fn unfold_values(&self, c: &Wcflobdd<W>) -> Vec<W> {
        let n = 1usize << self.level(c.head);
        assert!(n <= 24, "unfold is limited to 24 variables");
        let mut memo = HashMap::new();
        let table = self.path_table(c.head, &mut memo);
        table
            .iter()
            .map(|(w, e)| c.factor.mul(w).mul(&c.values.value::<W>(*e)))
            .collect()
    }

    /// `(weight, exit)` for every assignment of `g`, in assignment order.
    fn path_table(&self, g: GroupingId, memo: &mut HashMap<GroupingId, Rc<Vec<(W, u32)>>>) -> Rc<Vec<(W, u32)>> {
        if let Some(t) = memo.get(&g) {
            return t.clone();
        }
        let table = match self.grouping(g) {
            Grouping::Fork { lw, rw } => alloc::vec![(lw.clone(), 1), (rw.clone(), 2)],
            Grouping::DontCare { lw, rw } => alloc::vec![(lw.clone(), 1), (rw.clone(), 1)],
            Grouping::Internal(i) => {
                let a = self.path_table(i.a_connection, memo);
                let bs: Vec<_> = i.b_connections.iter().map(|&b| self.path_table(b, memo)).collect();
                let mut out = Vec::with_capacity(a.len() * a.len());
                for (wa, m) in a.iter() {
                    let j = *m as usize - 1;
                    let tuple = &i.b_return_tuples[j];
                    out.extend(bs[j].iter().map(|(wb, e)| (wa.mul(wb), tuple[*e as usize - 1])));
                }
                out
            }
        };
        let table = Rc::new(table);
        memo.insert(g, table.clone());
        table
    }
}

/// Counts of distinct groupings, vertices and edges of a diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct SizeMetric {
    pub groupings: usize,
    pub vertices: usize,
    pub edges: usize,
    pub total: usize,
}

impl<W: Semifield> Manager<W> {
    /// Size under the counting convention used throughout the crate:
    ///
    /// * each distinct grouping counts once;
    /// * vertices: entry, middle and exit vertices of every distinct grouping;
    /// * edges: two decision edges per level-0 grouping; for an internal
    ///   grouping one A-call edge, one A-return edge and one B-call edge per
    ///   middle vertex, and one B-return edge per entry of each B-return tuple;
    /// * at top level one edge per exit to its terminal value, plus the free
    ///   edge when its factor weight is not `1̄`.
    pub fn size(&self, c: &Wcflobdd<W>) -> SizeMetric {
        let mut m = SizeMetric::default();
        for g in self.reachable(c.head) {
            m.groupings += 1;
            match self.grouping(g) {
                Grouping::Fork { .. } => {
                    m.vertices += 3;
                    m.edges += 2;
                }
                Grouping::DontCare { .. } => {
                    m.vertices += 2;
                    m.edges += 2;
                }
                Grouping::Internal(i) => {
                    let mids = i.b_connections.len();
                    m.vertices += 1 + mids + i.number_of_exits as usize;
                    m.edges += 1 + 2 * mids + i.b_return_tuples.iter().map(Vec::len).sum::<usize>();
                }
            }
        }
        m.edges += self.exits(c.head) as usize;
        if !c.factor.is_one() {
            m.edges += 1;
        }
        m.total = m.groupings + m.vertices + m.edges;
        m
    }
}
