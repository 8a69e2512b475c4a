//! Path weights and sampling of assignments in proportion to them.

use alloc::rc::Rc;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;
use rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::core::{Assignment, Grouping, GroupingId, InternalGrouping, Manager, Wcflobdd};
use crate::error::{Error, Result};
use crate::semifield::{Numeric, Semifield};

/// Per exit of `g`, the sum of the weights of the matched paths reaching it.
pub fn compute_weights<W: Semifield>(mgr: &mut Manager<W>, g: GroupingId) -> Rc<Vec<W>> {
    if let Some(w) = mgr.caches.weights.get(&g) {
        return w.clone();
    }
    let weights = match mgr.grouping(g).clone() {
        Grouping::Fork { lw, rw } => vec![lw, rw],
        Grouping::DontCare { lw, rw } => vec![lw.add(&rw)],
        Grouping::Internal(i) => {
            let wa = compute_weights(mgr, i.a_connection);
            let mut out = vec![W::zero(); i.number_of_exits as usize];
            for (j, (b, rt)) in i.b_connections.iter().zip(&i.b_return_tuples).enumerate() {
                let wb = compute_weights(mgr, *b);
                for (x, &e) in rt.iter().enumerate() {
                    let slot = &mut out[e as usize - 1];
                    *slot = slot.add(&wa[j].mul(&wb[x]));
                }
            }
            out
        }
    };
    let weights = Rc::new(weights);
    mgr.caches.weights.insert(g, weights.clone());
    weights
}

/// Copy of `c` in the real instance with every weight replaced by `|w|²`.
/// Path weights of the copy are the squared magnitudes of those of `c`.
pub fn measure_view<W: Numeric>(mgr: &Manager<W>, c: &Wcflobdd<W>, view: &mut Manager<f64>) -> Wcflobdd<f64> {
    let mut map = HashMap::new();
    let f = |w: &W| w.norm_sqr();
    let head = view_grouping(mgr, c.head, view, &mut map, &f);
    Wcflobdd { factor: c.factor.norm_sqr(), head, values: c.values }
}

/// Copy of `c` in the real instance with the same weights. Fails unless
/// every weight is a nonnegative real.
pub fn real_view<W: Numeric>(mgr: &Manager<W>, c: &Wcflobdd<W>, view: &mut Manager<f64>) -> Result<Wcflobdd<f64>> {
    let bad = core::cell::Cell::new(false);
    let f = |w: &W| {
        let z = w.to_complex();
        if z.re < 0.0 || z.im != 0.0 {
            bad.set(true);
        }
        z.re
    };
    let mut map = HashMap::new();
    let head = view_grouping(mgr, c.head, view, &mut map, &f);
    let factor = f(&c.factor);
    if bad.get() {
        return Err(Error::Domain("sampling needs nonnegative real weights".into()));
    }
    Ok(Wcflobdd { factor, head, values: c.values })
}

fn view_grouping<W: Numeric>(
    mgr: &Manager<W>,
    g: GroupingId,
    view: &mut Manager<f64>,
    map: &mut HashMap<GroupingId, GroupingId>,
    f: &dyn Fn(&W) -> f64,
) -> GroupingId {
    if let Some(&v) = map.get(&g) {
        return v;
    }
    let grouping = match mgr.grouping(g) {
        Grouping::Fork { lw, rw } => Grouping::Fork { lw: f(lw), rw: f(rw) },
        Grouping::DontCare { lw, rw } => Grouping::DontCare { lw: f(lw), rw: f(rw) },
        Grouping::Internal(i) => {
            let a_connection = view_grouping(mgr, i.a_connection, view, map, f);
            let b_connections = i.b_connections.iter().map(|&b| view_grouping(mgr, b, view, map, f)).collect();
            Grouping::Internal(InternalGrouping {
                level: i.level,
                a_connection,
                b_connections,
                b_return_tuples: i.b_return_tuples.clone(),
                number_of_exits: i.number_of_exits,
            })
        }
    };
    let v = view.intern_unchecked(grouping);
    map.insert(g, v);
    v
}

/// Seeded random source; equal seeds give equal sample sequences.
#[derive(Clone, Debug)]
pub struct SampleContext {
    pub seed: u64,
    rng: ChaCha8Rng,
}

impl SampleContext {
    pub fn new(seed: u64) -> Self {
        SampleContext { seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Uniform in `[0, 1)`.
    pub fn next_unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Ways of reaching exit `e` of an internal grouping: `(middle, B exit,
/// weight)` with positive weight.
fn branches<W: Semifield>(mgr: &mut Manager<W>, g: GroupingId, e: u32) -> Rc<Vec<(u32, u32, W)>> {
    if let Some(b) = mgr.caches.branches.get(&(g, e)) {
        return b.clone();
    }
    let i = match mgr.grouping(g) {
        Grouping::Internal(i) => i.clone(),
        _ => unreachable!("internal grouping"),
    };
    let wa = compute_weights(mgr, i.a_connection);
    let mut out = Vec::new();
    for (j, (b, rt)) in i.b_connections.iter().zip(&i.b_return_tuples).enumerate() {
        if let Some(x) = rt.iter().position(|&t| t == e) {
            let wb = compute_weights(mgr, *b);
            let w = wa[j].mul(&wb[x]);
            if !w.is_zero() {
                out.push((j as u32 + 1, x as u32 + 1, w));
            }
        }
    }
    let out = Rc::new(out);
    mgr.caches.branches.insert((g, e), out.clone());
    out
}

/// Exits of the head with terminal `1̄` and positive total weight.
fn top_choices<W: Semifield>(mgr: &mut Manager<W>, c: &Wcflobdd<W>) -> Vec<(u32, W)> {
    if c.factor.is_zero() {
        return Vec::new();
    }
    let weights = compute_weights(mgr, c.head);
    c.values
        .bits()
        .iter()
        .enumerate()
        .filter(|(e, &v)| v && !weights[*e].is_zero())
        .map(|(e, _)| (e as u32 + 1, weights[e].clone()))
        .collect()
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + libm::log1p(libm::exp(lo - hi))
    }
}

/// [`compute_weights`] of a nonnegative real diagram in log space, where
/// sums over `2^(2^k)` paths cannot overflow.
pub fn log_weights(mgr: &mut Manager<f64>, g: GroupingId) -> Rc<Vec<f64>> {
    if let Some(w) = mgr.caches.log_weights.get(&g) {
        return w.clone();
    }
    let weights = match mgr.grouping(g).clone() {
        Grouping::Fork { lw, rw } => vec![libm::log(lw), libm::log(rw)],
        Grouping::DontCare { lw, rw } => vec![libm::log(lw + rw)],
        Grouping::Internal(i) => {
            let la = log_weights(mgr, i.a_connection);
            let mut out = vec![f64::NEG_INFINITY; i.number_of_exits as usize];
            for (j, (b, rt)) in i.b_connections.iter().zip(&i.b_return_tuples).enumerate() {
                let lb = log_weights(mgr, *b);
                for (x, &e) in rt.iter().enumerate() {
                    let slot = &mut out[e as usize - 1];
                    *slot = log_add(*slot, la[j] + lb[x]);
                }
            }
            out
        }
    };
    let weights = Rc::new(weights);
    mgr.caches.log_weights.insert(g, weights.clone());
    weights
}

/// Ways of reaching exit `e`, as in [`branches`], with log weights.
fn log_branches(mgr: &mut Manager<f64>, g: GroupingId, e: u32) -> Rc<Vec<(u32, u32, f64)>> {
    if let Some(b) = mgr.caches.log_branches.get(&(g, e)) {
        return b.clone();
    }
    let i = match mgr.grouping(g) {
        Grouping::Internal(i) => i.clone(),
        _ => unreachable!("internal grouping"),
    };
    let la = log_weights(mgr, i.a_connection);
    let mut out = Vec::new();
    for (j, (b, rt)) in i.b_connections.iter().zip(&i.b_return_tuples).enumerate() {
        if let Some(x) = rt.iter().position(|&t| t == e) {
            let lb = log_weights(mgr, *b);
            let w = la[j] + lb[x];
            if w > f64::NEG_INFINITY {
                out.push((j as u32 + 1, x as u32 + 1, w));
            }
        }
    }
    let out = Rc::new(out);
    mgr.caches.log_branches.insert((g, e), out.clone());
    out
}

/// Natural log of the sum of `c` over all assignments, for a nonnegative
/// real diagram; `-inf` for the zero function.
pub fn log_total(mgr: &mut Manager<f64>, c: &Wcflobdd<f64>) -> f64 {
    let lw = log_weights(mgr, c.head);
    let sum = c
        .values
        .bits()
        .iter()
        .zip(lw.iter())
        .filter(|(v, _)| **v)
        .fold(f64::NEG_INFINITY, |acc, (_, w)| log_add(acc, *w));
    sum + libm::log(c.factor)
}

/// Index drawn with probability proportional to `exp(logs[k])`.
fn pick_log(ctx: &mut SampleContext, logs: &[f64]) -> usize {
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let target = ctx.next_unit() * logs.iter().map(|l| libm::exp(l - max)).sum::<f64>();
    let mut acc = 0.0;
    let mut last = 0;
    for (k, l) in logs.iter().enumerate() {
        let w = libm::exp(l - max);
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last = k;
        if target < acc {
            return k;
        }
    }
    last
}

/// Samples an assignment reaching terminal `1̄`, in proportion to path
/// weights. Weights must be nonnegative reals.
pub fn sample_assignment(mgr: &mut Manager<f64>, c: &Wcflobdd<f64>, ctx: &mut SampleContext) -> Result<Assignment> {
    let lw = log_weights(mgr, c.head);
    let choices: Vec<(u32, f64)> = c
        .values
        .bits()
        .iter()
        .enumerate()
        .filter(|(e, &v)| v && lw[*e] > f64::NEG_INFINITY)
        .map(|(e, _)| (e as u32 + 1, lw[e]))
        .collect();
    if c.factor.is_zero() || choices.is_empty() {
        return Err(Error::Domain("no path to terminal 1 has positive weight".into()));
    }
    let logs: Vec<f64> = choices.iter().map(|o| o.1).collect();
    let k = pick_log(ctx, &logs);
    let mut out = Vec::with_capacity(1 << mgr.level(c.head));
    sample_grouping(mgr, c.head, choices[k].0, ctx, &mut out);
    Ok(out)
}

fn sample_grouping(mgr: &mut Manager<f64>, g: GroupingId, e: u32, ctx: &mut SampleContext, out: &mut Assignment) {
    match mgr.grouping(g) {
        Grouping::Fork { .. } => out.push(e == 2),
        Grouping::DontCare { lw, rw } => {
            let logs = [libm::log(*lw), libm::log(*rw)];
            out.push(pick_log(ctx, &logs) == 1);
        }
        Grouping::Internal(_) => {
            let options = log_branches(mgr, g, e);
            let logs: Vec<f64> = options.iter().map(|o| o.2).collect();
            let (m, x, _) = options[pick_log(ctx, &logs)];
            let (a, b) = match mgr.grouping(g) {
                Grouping::Internal(i) => (i.a_connection, i.b_connections[m as usize - 1]),
                _ => unreachable!(),
            };
            sample_grouping(mgr, a, m, ctx, out);
            sample_grouping(mgr, b, x, ctx, out);
        }
    }
}

/// The exact output distribution of [`sample_assignment`]: every assignment
/// it can return, with the product of the choice probabilities along the
/// sampler's recursion. Exponential; for small levels.
pub fn sampler_distribution<W: Semifield>(mgr: &mut Manager<W>, c: &Wcflobdd<W>) -> Result<Vec<(Assignment, W)>> {
    let choices = top_choices(mgr, c);
    let total = choices.iter().fold(W::zero(), |acc, (_, w)| acc.add(w));
    if total.is_zero() {
        return Err(Error::Domain("no path to terminal 1 has positive weight".into()));
    }
    let mut out = Vec::new();
    for (e, w) in choices {
        let p = w.div(&total)?;
        for (a, q) in grouping_distribution(mgr, c.head, e)? {
            out.push((a, p.mul(&q)));
        }
    }
    Ok(out)
}

fn grouping_distribution<W: Semifield>(mgr: &mut Manager<W>, g: GroupingId, e: u32) -> Result<Vec<(Assignment, W)>> {
    match mgr.grouping(g).clone() {
        Grouping::Fork { .. } => Ok(vec![(vec![e == 2], W::one())]),
        Grouping::DontCare { lw, rw } => {
            let total = lw.add(&rw);
            let mut out = Vec::new();
            for (bit, w) in [(false, lw), (true, rw)] {
                if !w.is_zero() {
                    out.push((vec![bit], w.div(&total)?));
                }
            }
            Ok(out)
        }
        Grouping::Internal(i) => {
            let options = branches(mgr, g, e);
            let total = options.iter().fold(W::zero(), |acc, o| acc.add(&o.2));
            let mut out = Vec::new();
            for (m, x, w) in options.iter() {
                let p = w.div(&total)?;
                let lower = grouping_distribution(mgr, i.b_connections[*m as usize - 1], *x)?;
                for (aa, pa) in grouping_distribution(mgr, i.a_connection, *m)? {
                    for (ab, pb) in &lower {
                        let mut a = aa.clone();
                        a.extend_from_slice(ab);
                        out.push((a, p.mul(&pa).mul(pb)));
                    }
                }
            }
            Ok(out)
        }
    }
}
