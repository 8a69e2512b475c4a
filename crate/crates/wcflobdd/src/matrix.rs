//! Matrices as diagrams over interleaved row/column bits.
//!
//! A level-k diagram with `n = 2^k` variables denotes a `2^(n/2)`-square
//! matrix: even positions hold row bits, odd positions column bits, most
//! significant pair first.

use alloc::rc::Rc;
use alloc::vec;
use alloc::vec::Vec;

use crate::construct::{assemble, assemble_raw, constant_zero, constant_zero_proto, fold_labeled};
use crate::core::{Grouping, GroupingId, Manager, ValueTuple, Wcflobdd};
use crate::error::{Error, Result};
use crate::pointwise::{collapse_classes_leftmost, finish, reduce, weighted_pair_product};
use crate::semifield::Semifield;
use crate::validate::zero_exit_of;

/// `Σ c · x_{e1} · y_{e2}` over exit pairs `(e1, e2)` of two groupings.
/// Terms are kept sorted by exit pair, without zero coefficients.
#[derive(Clone, Debug, Default)]
pub struct BilinearPolynomial<W> {
    pub terms: Vec<((u32, u32), W)>,
}

impl<W: Semifield> BilinearPolynomial<W> {
    pub fn zero() -> Self {
        BilinearPolynomial { terms: Vec::new() }
    }

    pub fn monomial(e1: u32, e2: u32, c: W) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            BilinearPolynomial { terms: vec![((e1, e2), c)] }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sums arbitrary terms.
    pub fn from_terms(mut terms: Vec<((u32, u32), W)>) -> Self {
        terms.sort_by_key(|t| t.0);
        let mut out: Vec<((u32, u32), W)> = Vec::with_capacity(terms.len());
        for (p, c) in terms {
            match out.last_mut() {
                Some((q, d)) if *q == p => *d = d.add(&c),
                _ => out.push((p, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        BilinearPolynomial { terms: out }
    }

    /// Renames exit pairs through `f`.
    pub fn map_exits(&self, f: impl Fn(u32, u32) -> (u32, u32)) -> Self {
        Self::from_terms(self.terms.iter().map(|((a, b), c)| (f(*a, *b), c.clone())).collect())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let (a, b) = (&self.terms, &rhs.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push(b[j].clone());
                j += 1;
            } else {
                let c = a[i].1.add(&b[j].1);
                if !c.is_zero() {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        BilinearPolynomial { terms: out }
    }

    pub fn scale(&self, w: &W) -> Self {
        if w.is_zero() {
            return Self::zero();
        }
        let terms = self
            .terms
            .iter()
            .filter_map(|(p, c)| {
                let c = c.mul(w);
                (!c.is_zero()).then_some((*p, c))
            })
            .collect();
        BilinearPolynomial { terms }
    }

    /// Value at `x_e = xs[e-1]`, `y_e = ys[e-1]`.
    pub fn evaluate(&self, xs: &[W], ys: &[W]) -> W {
        self.terms.iter().fold(W::zero(), |acc, ((e1, e2), c)| {
            acc.add(&c.mul(&xs[*e1 as usize - 1]).mul(&ys[*e2 as usize - 1]))
        })
    }

    /// `(p / c, c)` with `c` the first coefficient, or `(0, 0)`.
    pub fn normalize(&self) -> (Self, W) {
        match self.terms.first() {
            None => (Self::zero(), W::zero()),
            Some((_, c)) => {
                let inv = c.inverse().expect("nonzero coefficient");
                (self.scale(&inv), c.clone())
            }
        }
    }

    pub fn key(&self) -> Vec<((u32, u32), W::Key)> {
        self.terms.iter().map(|(p, c)| (*p, c.key())).collect()
    }
}

impl<W: Semifield> PartialEq for BilinearPolynomial<W> {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl<W: Semifield> Eq for BilinearPolynomial<W> {}

impl<W: Semifield> core::hash::Hash for BilinearPolynomial<W> {
    fn hash<H: core::hash::Hasher>(&self, state: &mut H) {
        self.key().hash(state)
    }
}

fn same_level<W: Semifield>(mgr: &Manager<W>, c1: &Wcflobdd<W>, c2: &Wcflobdd<W>) -> Result<u32> {
    let (l1, l2) = (mgr.level(c1.head), mgr.level(c2.head));
    if l1 != l2 {
        return Err(Error::LevelMismatch(l1, l2));
    }
    Ok(l1)
}

/// `M1 ⊗ M2` for two level-k matrices; the result has level `k+1`.
pub fn kronecker<W: Semifield>(mgr: &mut Manager<W>, c1: &Wcflobdd<W>, c2: &Wcflobdd<W>) -> Result<Wcflobdd<W>> {
    let level = same_level(mgr, c1, c2)?;
    let factor = c1.factor.mul(&c2.factor);
    if factor.is_zero() {
        return Ok(constant_zero(mgr, level + 1));
    }
    let cz = constant_zero_proto(mgr, level);
    let middles: Vec<_> = c1
        .values
        .bits()
        .iter()
        .map(|&v| if v { (c2.head, c2.values.bits().to_vec()) } else { (cz, vec![false]) })
        .collect();
    let (head, labels) = assemble(mgr, level + 1, c1.head, &middles);
    let values = ValueTuple::from_bits(&labels).expect("at most two exits");
    Ok(Wcflobdd { factor, head, values })
}

type Labeled<W> = (GroupingId, Vec<BilinearPolynomial<W>>);

/// Normal form of a polynomial-labelled grouping: exits whose labels agree
/// up to a scalar merge, the scalar moving into the weights.
fn canonical_labels<W: Semifield>(mgr: &mut Manager<W>, g: GroupingId, labels: &[BilinearPolynomial<W>]) -> Labeled<W> {
    let (shapes, leads): (Vec<_>, Vec<_>) = labels.iter().map(BilinearPolynomial::normalize).unzip();
    let (proj, red) = collapse_classes_leftmost(&shapes);
    let (h, w) = reduce(mgr, g, &red, &leads);
    if w.is_zero() {
        return (h, vec![BilinearPolynomial::zero()]);
    }
    (h, proj.iter().map(|p| p.scale(&w)).collect())
}

/// `p1 · x + p2 · y` for polynomial-labelled groupings.
fn labeled_sum<W: Semifield>(mgr: &mut Manager<W>, x: &Labeled<W>, y: &Labeled<W>, p1: &W, p2: &W) -> Labeled<W> {
    let (g, pt) = weighted_pair_product(mgr, x.0, y.0, p1, p2);
    let labels: Vec<_> = pt
        .iter()
        .map(|((q1, e1), (q2, e2))| x.1[*e1 as usize - 1].scale(q1).add(&y.1[*e2 as usize - 1].scale(q2)))
        .collect();
    canonical_labels(mgr, g, &labels)
}

/// The four cell polynomials of the product of two level-1 groupings, in
/// assignment order `(row, column)`.
pub fn base_cell_products<W: Semifield>(mgr: &Manager<W>, g1: GroupingId, g2: GroupingId) -> Vec<BilinearPolynomial<W>> {
    let mut cells = Vec::with_capacity(4);
    for r in [false, true] {
        for c in [false, true] {
            let terms = [false, true]
                .iter()
                .map(|&m| {
                    let (w1, e1) = mgr.eval_grouping(g1, &[r, m]);
                    let (w2, e2) = mgr.eval_grouping(g2, &[m, c]);
                    ((e1, e2), w1.mul(&w2))
                })
                .collect();
            cells.push(BilinearPolynomial::from_terms(terms));
        }
    }
    cells
}

/// Matrix product of two level-k groupings (`k ≥ 1`). Returns `g` and one
/// polynomial per exit of `g` such that, for exits `e1`, `e2` of the
/// operands, `Σ_m [g1 reaches e1]·⟦g1⟧(r,m) · [g2 reaches e2]·⟦g2⟧(m,c)` is
/// `⟦g⟧(r,c)` times the `(e1, e2)` coefficient of the polynomial at the exit
/// reached by `(r, c)`.
pub fn matrix_product_grouping<W: Semifield>(mgr: &mut Manager<W>, g1: GroupingId, g2: GroupingId) -> Labeled<W> {
    let level = mgr.level(g1);
    let cz = constant_zero_proto(mgr, level);
    if g1 == cz || g2 == cz {
        return (cz, vec![BilinearPolynomial::zero()]);
    }
    let identity = mgr.identity_protos.get(level as usize).copied().flatten();
    if identity == Some(g1) {
        let z = zero_exit_of(mgr, g2);
        let labels = (1..=mgr.exits(g2))
            .map(|e| if Some(e) == z { BilinearPolynomial::zero() } else { BilinearPolynomial::monomial(1, e, W::one()) })
            .collect();
        return (g2, labels);
    }
    if identity == Some(g2) {
        let z = zero_exit_of(mgr, g1);
        let labels = (1..=mgr.exits(g1))
            .map(|e| if Some(e) == z { BilinearPolynomial::zero() } else { BilinearPolynomial::monomial(e, 1, W::one()) })
            .collect();
        return (g1, labels);
    }
    if let Some((g, labels)) = mgr.caches.matmul.get(&(g1, g2)) {
        return (*g, labels.to_vec());
    }
    let result = if level == 1 {
        let cells = base_cell_products(mgr, g1, g2);
        let leaves: Vec<(W, BilinearPolynomial<W>)> = cells
            .iter()
            .map(|p| {
                let (shape, lead) = p.normalize();
                (lead, shape)
            })
            .collect();
        let (g, w, labels) = fold_labeled(mgr, 1, &leaves);
        (g, labels.iter().map(|p| p.scale(&w)).collect())
    } else {
        let (Grouping::Internal(i1), Grouping::Internal(i2)) = (mgr.grouping(g1).clone(), mgr.grouping(g2).clone())
        else {
            unreachable!("levels agree")
        };
        let (ga, pa) = matrix_product_grouping(mgr, i1.a_connection, i2.a_connection);
        let cz_below = constant_zero_proto(mgr, level - 1);
        let mut middles = Vec::with_capacity(pa.len());
        for p in &pa {
            let mut acc: Option<Labeled<W>> = None;
            for ((j1, j2), coef) in &p.terms {
                let (j1, j2) = (*j1 as usize - 1, *j2 as usize - 1);
                let (h, q) = matrix_product_grouping(mgr, i1.b_connections[j1], i2.b_connections[j2]);
                let (rt1, rt2) = (&i1.b_return_tuples[j1], &i2.b_return_tuples[j2]);
                let lifted: Vec<_> = q
                    .iter()
                    .map(|b| b.map_exits(|x1, x2| (rt1[x1 as usize - 1], rt2[x2 as usize - 1])))
                    .collect();
                let term = (h, lifted);
                acc = Some(match acc {
                    None => {
                        let scaled: Vec<_> = term.1.iter().map(|b| b.scale(coef)).collect();
                        canonical_labels(mgr, h, &scaled)
                    }
                    Some(sum) => labeled_sum(mgr, &sum, &term, &W::one(), coef),
                });
            }
            middles.push(acc.unwrap_or_else(|| (cz_below, vec![BilinearPolynomial::zero()])));
        }
        let (graw, labels) = assemble_raw(mgr, level, ga, &middles);
        canonical_labels(mgr, graw, &labels)
    };
    mgr.caches.matmul.insert((g1, g2), (result.0, Rc::new(result.1.clone())));
    result
}

/// Matrix product `M1 · M2` of two level-k matrices, `k ≥ 1`.
pub fn matrix_multiply<W: Semifield>(mgr: &mut Manager<W>, c1: &Wcflobdd<W>, c2: &Wcflobdd<W>) -> Result<Wcflobdd<W>> {
    let level = same_level(mgr, c1, c2)?;
    if level == 0 {
        return Err(Error::Usage("matrices need level at least 1".into()));
    }
    if c1.factor.is_zero() || c2.factor.is_zero() {
        return Ok(constant_zero(mgr, level));
    }
    let (g, labels) = matrix_product_grouping(mgr, c1.head, c2.head);
    let v1: Vec<W> = (1..=c1.values.len() as u32).map(|e| c1.values.value(e)).collect();
    let v2: Vec<W> = (1..=c2.values.len() as u32).map(|e| c2.values.value(e)).collect();
    let vals: Vec<W> = labels.iter().map(|p| p.evaluate(&v1, &v2)).collect();
    Ok(finish(mgr, g, c1.factor.mul(&c2.factor), &vals))
}

/// `M · v` for a vector stored as a broadcast column (`v(r, c) = v_r`).
pub fn apply_matrix_to_vector<W: Semifield>(mgr: &mut Manager<W>, m: &Wcflobdd<W>, v: &Wcflobdd<W>) -> Result<Wcflobdd<W>> {
    matrix_multiply(mgr, m, v)
}

/// Dense `2^(2^(k-1))`-square matrix of a level-k diagram, row-major.
pub fn to_dense<W: Semifield>(mgr: &Manager<W>, c: &Wcflobdd<W>) -> Vec<Vec<W>> {
    let vars = 1usize << mgr.level(c.head);
    let half = vars / 2;
    let dim = 1usize << half;
    let mut bits = vec![false; vars];
    let mut rows = Vec::with_capacity(dim);
    for r in 0..dim {
        let mut row = Vec::with_capacity(dim);
        for col in 0..dim {
            for i in 0..half {
                bits[2 * i] = (r >> (half - 1 - i)) & 1 == 1;
                bits[2 * i + 1] = (col >> (half - 1 - i)) & 1 == 1;
            }
            row.push(mgr.evaluate(c, &bits).expect("length matches"));
        }
        rows.push(row);
    }
    rows
}

/// Leaves of a matrix given row-major, in assignment order.
pub fn matrix_leaves<W: Clone>(rows: &[Vec<W>]) -> Vec<W> {
    let dim = rows.len();
    let half = dim.trailing_zeros() as usize;
    let vars = 2 * half;
    (0..1usize << vars)
        .map(|idx| {
            let (mut r, mut c) = (0, 0);
            for i in 0..half {
                r = (r << 1) | ((idx >> (vars - 1 - 2 * i)) & 1);
                c = (c << 1) | ((idx >> (vars - 2 - 2 * i)) & 1);
            }
            rows[r][c].clone()
        })
        .collect()
}
