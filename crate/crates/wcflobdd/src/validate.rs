//! Structural-invariant and weight-constraint checker.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::{HashMap, HashSet};

use crate::core::{Grouping, GroupingId, InternalGrouping, Manager, Wcflobdd};
use crate::semifield::Semifield;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    /// A connection does not point exactly one level down, or a handle is unknown.
    Level,
    /// A-connection exits are not in bijection with the middle vertices.
    Invariant1,
    /// A B-return tuple is not a 1-to-1 map into the exit vertices.
    Invariant2a,
    /// New exit vertices do not compactly extend the ones seen before.
    Invariant2b,
    /// The unique table holds two representatives of one grouping.
    Invariant3,
    /// Two B-connections share both target and return tuple.
    Invariant4,
    /// Leaf weights are not of the form `(1̄, rw)` or `(0̄, 1̄)`.
    Weight1,
    /// Zero-weight paths are not routed to a single all-zero exit.
    Weight2,
    /// Top-level exits and terminal values disagree about zero.
    Weight3,
    /// Factor weight is zero exactly when the function is.
    Weight4,
    /// Value tuple length differs from the head's exit count.
    ValueTuple,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::Level => "level",
            ViolationKind::Invariant1 => "invariant-1",
            ViolationKind::Invariant2a => "invariant-2a",
            ViolationKind::Invariant2b => "invariant-2b",
            ViolationKind::Invariant3 => "invariant-3",
            ViolationKind::Invariant4 => "invariant-4",
            ViolationKind::Weight1 => "weight-constraint-1",
            ViolationKind::Weight2 => "weight-constraint-2",
            ViolationKind::Weight3 => "weight-constraint-3",
            ViolationKind::Weight4 => "weight-constraint-4",
            ViolationKind::ValueTuple => "value-tuple",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub grouping: Option<GroupingId>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.grouping {
            Some(g) => write!(f, "{} (grouping {}): {}", self.kind, g.index(), self.detail),
            None => write!(f, "{}: {}", self.kind, self.detail),
        }
    }
}

fn violation(kind: ViolationKind, grouping: Option<GroupingId>, detail: String) -> Violation {
    Violation { kind, grouping, detail: format!("{kind}: {detail}") }
}

/// Invariants checkable from one grouping and its direct connections.
pub(crate) fn local_violations<W: Semifield>(mgr: &Manager<W>, g: &Grouping<W>) -> Vec<Violation> {
    let mut out = Vec::new();
    let me = mgr.lookup(g);
    match g {
        Grouping::Fork { lw, rw } | Grouping::DontCare { lw, rw } => {
            let ok = lw.is_one() || (lw.is_zero() && rw.is_one());
            if !ok {
                out.push(violation(
                    ViolationKind::Weight1,
                    me,
                    format!("leaf weights ({lw}, {rw}) are not normalized"),
                ));
            }
        }
        Grouping::Internal(i) => internal_violations(mgr, i, me, &mut out),
    }
    out
}

fn internal_violations<W: Semifield>(
    mgr: &Manager<W>,
    i: &InternalGrouping,
    me: Option<GroupingId>,
    out: &mut Vec<Violation>,
) {
    use ViolationKind::*;
    if i.level == 0 {
        out.push(violation(Level, me, "internal grouping at level 0".into()));
        return;
    }
    let below = i.level - 1;
    for &c in core::iter::once(&i.a_connection).chain(&i.b_connections) {
        if !mgr.contains(c) {
            out.push(violation(Level, me, format!("unknown grouping handle {}", c.index())));
            return;
        }
        if mgr.level(c) != below {
            out.push(violation(
                Level,
                me,
                format!("connection to level {} from level {}", mgr.level(c), i.level),
            ));
        }
    }
    if i.b_connections.is_empty() {
        out.push(violation(Invariant1, me, "no middle vertices".into()));
        return;
    }
    if mgr.exits(i.a_connection) as usize != i.b_connections.len() {
        out.push(violation(
            Invariant1,
            me,
            format!(
                "A-connection has {} exits but there are {} middle vertices",
                mgr.exits(i.a_connection),
                i.b_connections.len()
            ),
        ));
    }
    if i.b_return_tuples.len() != i.b_connections.len() {
        out.push(violation(Invariant2a, me, "one return tuple per B-connection required".into()));
        return;
    }
    let mut next_new = 1u32;
    let mut seen_pairs: HashSet<(GroupingId, &[u32])> = HashSet::new();
    for (j, (&b, rt)) in i.b_connections.iter().zip(&i.b_return_tuples).enumerate() {
        if rt.len() != mgr.exits(b) as usize {
            out.push(violation(
                Invariant2a,
                me,
                format!("return tuple {} has {} entries for {} exits", j + 1, rt.len(), mgr.exits(b)),
            ));
        }
        let mut local = HashSet::new();
        for &e in rt {
            if e == 0 || e > i.number_of_exits {
                out.push(violation(Invariant2a, me, format!("return target {e} out of range")));
            } else if !local.insert(e) {
                out.push(violation(Invariant2a, me, format!("return tuple {} is not 1-to-1", j + 1)));
            }
            if e == next_new {
                next_new += 1;
            } else if e > next_new {
                out.push(violation(
                    Invariant2b,
                    me,
                    format!("exit {e} introduced before exit {next_new}"),
                ));
                next_new = e + 1;
            }
        }
        if !seen_pairs.insert((b, rt.as_slice())) {
            out.push(violation(
                Invariant4,
                me,
                format!("B-connection {} duplicates an earlier (grouping, return tuple) pair", j + 1),
            ));
        }
    }
    if next_new != i.number_of_exits + 1 {
        out.push(violation(
            Invariant2b,
            me,
            format!("{} exits declared, {} reached", i.number_of_exits, next_new - 1),
        ));
    }
}

/// Handle of the all-zero proto at `level`, if it was ever interned.
pub(crate) fn find_zero_proto<W: Semifield>(mgr: &Manager<W>, level: u32) -> Option<GroupingId> {
    if let Some(&g) = mgr.zero_protos.get(level as usize) {
        return Some(g);
    }
    let mut g = mgr.lookup(&Grouping::DontCare { lw: W::zero(), rw: W::one() })?;
    for k in 1..=level {
        g = mgr.lookup(&Grouping::Internal(InternalGrouping {
            level: k,
            a_connection: g,
            b_connections: alloc::vec![g],
            b_return_tuples: alloc::vec![alloc::vec![1]],
            number_of_exits: 1,
        }))?;
    }
    Some(g)
}

struct Checker<'a, W: Semifield> {
    mgr: &'a Manager<W>,
    zero_exit: HashMap<GroupingId, Option<u32>>,
    out: Vec<Violation>,
}

impl<W: Semifield> Checker<'_, W> {
    /// The exit of `g` that collects every all-zero path, if any. Reports
    /// weight-constraint-2 violations along the way.
    fn zero_exit(&mut self, g: GroupingId) -> Option<u32> {
        if let Some(&z) = self.zero_exit.get(&g) {
            return z;
        }
        let z = self.compute_zero_exit(g);
        self.zero_exit.insert(g, z);
        z
    }

    fn compute_zero_exit(&mut self, g: GroupingId) -> Option<u32> {
        use ViolationKind::Weight2;
        let mgr = self.mgr;
        match mgr.grouping(g) {
            Grouping::DontCare { lw, rw } => {
                if lw.is_zero() {
                    Some(1)
                } else if rw.is_zero() {
                    self.out.push(violation(
                        Weight2,
                        Some(g),
                        "zero-weight edge shares its exit with a nonzero edge".into(),
                    ));
                    None
                } else {
                    None
                }
            }
            Grouping::Fork { lw, rw } => {
                if lw.is_zero() {
                    Some(1)
                } else if rw.is_zero() {
                    Some(2)
                } else {
                    None
                }
            }
            Grouping::Internal(i) => {
                let za = self.zero_exit(i.a_connection);
                let zero_b = find_zero_proto(mgr, i.level - 1);
                let mut target: Option<u32> = None;
                let mut nonzero_targets = HashSet::new();
                for (j, (&b, rt)) in i.b_connections.iter().zip(&i.b_return_tuples).enumerate() {
                    let m = j as u32 + 1;
                    let is_zero_b = Some(b) == zero_b;
                    if za == Some(m) && !is_zero_b {
                        self.out.push(violation(
                            Weight2,
                            Some(g),
                            format!("middle vertex {m} is reached by a zero path but its B-connection is not all-zero"),
                        ));
                    }
                    if za != Some(m) && is_zero_b {
                        self.out.push(violation(
                            Weight2,
                            Some(g),
                            format!("middle vertex {m} leads only to zero but its A-path weight is nonzero"),
                        ));
                    }
                    let zb = self.zero_exit(b);
                    for (k, &e) in rt.iter().enumerate() {
                        if Some(k as u32 + 1) == zb {
                            match target {
                                None => target = Some(e),
                                Some(t) if t != e => self.out.push(violation(
                                    Weight2,
                                    Some(g),
                                    format!("zero paths reach two exits ({t} and {e})"),
                                )),
                                _ => {}
                            }
                        } else {
                            nonzero_targets.insert(e);
                        }
                    }
                }
                if let Some(t) = target {
                    if nonzero_targets.contains(&t) {
                        self.out.push(violation(
                            Weight2,
                            Some(g),
                            format!("exit {t} mixes zero and nonzero paths"),
                        ));
                    }
                }
                target
            }
        }
    }
}

/// Checks every structural invariant and weight constraint of `c`. An empty
/// result means `c` is in canonical form.
pub fn validate<W: Semifield>(mgr: &Manager<W>, c: &Wcflobdd<W>) -> Vec<Violation> {
    use ViolationKind::*;
    let mut checker = Checker { mgr, zero_exit: HashMap::new(), out: Vec::new() };
    if !mgr.contains(c.head) {
        checker.out.push(violation(Level, None, "unknown head grouping".into()));
        return checker.out;
    }
    let reachable = mgr.reachable(c.head);
    let mut structurally_ok = true;
    for &g in &reachable {
        let grouping = mgr.grouping(g);
        let local = local_violations(mgr, grouping);
        if local.iter().any(|v| v.kind != Weight1) {
            structurally_ok = false;
        }
        checker.out.extend(local.into_iter().map(|mut v| {
            v.grouping = Some(g);
            v
        }));
        if mgr.lookup(grouping) != Some(g) {
            checker.out.push(violation(
                Invariant3,
                Some(g),
                "grouping is not the unique-table representative".into(),
            ));
        }
    }
    if !structurally_ok {
        return checker.out;
    }
    let head_exits = mgr.exits(c.head);
    if c.values.len() != head_exits as usize {
        checker.out.push(violation(
            ValueTuple,
            None,
            format!("{} terminal values for {} exits", c.values.len(), head_exits),
        ));
        return checker.out;
    }
    let z = checker.zero_exit(c.head);
    for (k, &bit) in c.values.bits().iter().enumerate() {
        let e = k as u32 + 1;
        if Some(e) == z && bit {
            checker.out.push(violation(
                Weight3,
                None,
                format!("exit {e} collects only zero paths but maps to 1"),
            ));
        }
        if Some(e) != z && !bit {
            checker.out.push(violation(
                Weight3,
                None,
                format!("exit {e} has nonzero paths but maps to 0"),
            ));
        }
    }
    let all_zero = c.values.bits() == [false];
    if c.factor.is_zero() != all_zero {
        checker.out.push(violation(
            Weight4,
            None,
            format!("factor weight {} disagrees with the value tuple {}", c.factor, c.values),
        ));
    }
    checker.out
}

/// Zero exit of a grouping known to be canonical.
pub(crate) fn zero_exit_of<W: Semifield>(mgr: &mut Manager<W>, g: GroupingId) -> Option<u32> {
    if let Some(&z) = mgr.caches.zero_exit.get(&g) {
        return z;
    }
    let memo = core::mem::take(&mut mgr.caches.zero_exit);
    let mut checker = Checker { mgr: &*mgr, zero_exit: memo, out: Vec::new() };
    let z = checker.zero_exit(g);
    let memo = checker.zero_exit;
    mgr.caches.zero_exit = memo;
    z
}
