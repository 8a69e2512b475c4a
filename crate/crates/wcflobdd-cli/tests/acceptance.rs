//! Acceptance suite: one PASS/FAIL line per criterion. Oracles are dense
//! brute-force computations written here, independent of the library.

use std::collections::{BTreeMap, HashMap};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use wcflobdd::construct::{constant_zero, fold, hadamard_family, identity_matrix, tree_to_wdt, unfold};
use wcflobdd::core::{Grouping, InternalGrouping, ValueTuple};
use wcflobdd::matrix::{base_cell_products, kronecker, matrix_multiply, BilinearPolynomial};
use wcflobdd::pointwise::{add, multiply, product_values, subtract, sum_values, terminal_classes};
use wcflobdd::quantum::{bernstein_vazirani, deutsch_jozsa, ghz, qft, Circuit, Gate, Simulator};
use wcflobdd::sampling::sampler_distribution;
use wcflobdd::{validate, Complex64, Field, Manager, Rational, Semifield, Wcflobdd};
use wcflobdd_cli::bench::{run_suite, run_unit, BenchConfig, Status, Suite};

const AMPLITUDE_TOL: f64 = 1e-9;
const FLOAT_TOL: f64 = 1e-9;
const CHI_SQUARE_MIN_P: f64 = 0.001;
const SHOTS: usize = 10_000;

/// Validation tally shared by every criterion.
#[derive(Default)]
struct Audit {
    checked: usize,
    failures: Vec<String>,
}

impl Audit {
    fn check<W: Semifield>(&mut self, what: &str, mgr: &Manager<W>, c: &Wcflobdd<W>) {
        self.checked += 1;
        if let Some(v) = validate(mgr, c).first() {
            self.failures.push(format!("{what}: {v}"));
        }
    }
}

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(x: i64) -> Rational {
    Rational::from_i64(x)
}

fn bits_of(i: usize, n: usize) -> Vec<bool> {
    (0..n).map(|b| (i >> (n - 1 - b)) & 1 == 1).collect()
}

/// Leaves in assignment order (row and column bits interleaved, row bit
/// first) as a row-major square matrix.
fn to_rows<T: Clone>(leaves: &[T]) -> Vec<Vec<T>> {
    let vars = leaves.len().trailing_zeros() as usize;
    let half = vars / 2;
    let dim = 1usize << half;
    let mut rows = vec![Vec::with_capacity(dim); dim];
    let mut cells: Vec<(usize, usize, T)> = Vec::with_capacity(leaves.len());
    for (i, v) in leaves.iter().enumerate() {
        let b = bits_of(i, vars);
        let r = (0..half).fold(0, |acc, k| acc * 2 + b[2 * k] as usize);
        let c = (0..half).fold(0, |acc, k| acc * 2 + b[2 * k + 1] as usize);
        cells.push((r, c, v.clone()));
    }
    cells.sort_by_key(|&(r, c, _)| (r, c));
    for (r, _, v) in cells {
        rows[r].push(v);
    }
    rows
}

fn dense_matmul<W: Semifield>(a: &[Vec<W>], b: &[Vec<W>]) -> Vec<Vec<W>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).fold(W::zero(), |acc, k| acc.add(&a[i][k].mul(&b[k][j])))).collect())
        .collect()
}

fn dense_kron<W: Semifield>(a: &[Vec<W>], b: &[Vec<W>]) -> Vec<Vec<W>> {
    let (na, nb) = (a.len(), b.len());
    (0..na * nb)
        .map(|i| (0..na * nb).map(|j| a[i / nb][j / nb].mul(&b[i % nb][j % nb])).collect())
        .collect()
}

fn run(name: &str, limit: Duration, body: impl FnOnce() -> Outcome) -> bool {
    let t0 = Instant::now();
    let result = body();
    let elapsed = t0.elapsed();
    let (ok, detail) = match result {
        Ok(d) if elapsed <= limit => (true, d),
        Ok(d) => (false, format!("{d}; took {:.1}s, limit {}s", elapsed.as_secs_f64(), limit.as_secs())),
        Err(e) => (false, e),
    };
    println!(
        "{} {name} ({:.2}s): {detail}",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    ok
}

fn criterion_1() -> Outcome {
    let cfg = BenchConfig {
        suite: Suite::Separation,
        params: None,
        instance: wcflobdd::Instance::Rational,
        timeout: Duration::from_secs(60),
        seed: 0,
    };
    let rows = run_suite(&cfg, |_| Ok(())).map_err(|e| e.to_string())?;
    let mut exp = BTreeMap::new();
    let mut h = BTreeMap::new();
    for r in &rows {
        ensure(r.status == Status::Ok, || format!("{} {}: {:?} {:?}", r.bench, r.param, r.status, r.message))?;
        let total = r.total.unwrap_or_default();
        match r.bench.as_str() {
            "EXP" => exp.insert(r.param, total),
            _ => h.insert(r.param, total),
        };
    }
    for l in 0..=10usize {
        let want = 13 * (1 << l) - 7;
        ensure(exp.get(&l) == Some(&want), || format!("EXP l={l}: {:?} != {want}", exp.get(&l)))?;
    }
    for l in 1..=10usize {
        let want = 8 * l + 22;
        ensure(h.get(&l) == Some(&want), || format!("H l={l}: {:?} != {want}", h.get(&l)))?;
    }
    ensure(exp[&0] == 6 && exp[&1] == 19 && h[&1] == 30 && h[&2] == 38, || "anchors".into())?;
    Ok(format!("EXP 13·2^l−7 for l 0..10, H 8l+22 for l 1..10 ({} rows)", rows.len()))
}

const TREE_WEIGHTS: [(i64, i64); 6] = [(0, 1), (1, 1), (-1, 1), (2, 1), (-2, 1), (1, 2)];

fn random_leaves(rng: &mut StdRng, level: u32) -> Vec<Rational> {
    let n = 1usize << (1usize << level);
    (0..n)
        .map(|_| {
            let (p, d) = TREE_WEIGHTS[rng.gen_range(0..TREE_WEIGHTS.len())];
            Rational::from_ratio(p, d)
        })
        .collect()
}

fn criterion_2(audit: &mut Audit) -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    let mut mgr = Manager::<Rational>::new();
    let mut seen: HashMap<(String, usize, Vec<bool>), Vec<Rational>> = HashMap::new();
    for t in 0..1000 {
        let level = 1 + (t % 2) as u32;
        let leaves = random_leaves(&mut rng, level);
        let c = fold(&mut mgr, &leaves).map_err(|e| e.to_string())?;
        audit.check("fold", &mgr, &c);
        let back = unfold(&mgr, &c);
        ensure(back == leaves, || format!("tree {t}: unfold(fold) differs"))?;
        let again = fold(&mut mgr, &back).map_err(|e| e.to_string())?;
        ensure(again.same(&c), || format!("tree {t}: fold∘unfold∘fold changed the handle"))?;
        let wdt = tree_to_wdt(&leaves).map_err(|e| e.to_string())?;
        for (i, v) in leaves.iter().enumerate() {
            ensure(&wdt.evaluate(&bits_of(i, 1 << level)) == v, || format!("tree {t}: decision tree leaf {i}"))?;
        }
        let key = (c.factor.to_string(), c.head.index(), c.values.bits().to_vec());
        if let Some(prev) = seen.insert(key, leaves.clone()) {
            ensure(prev == leaves, || format!("tree {t}: two functions share a handle"))?;
        }
    }
    Ok(format!("1000 trees, {} distinct handles, all round trips identical", seen.len()))
}

fn random_rational(rng: &mut StdRng) -> Rational {
    match rng.gen_range(0..10) {
        0..=3 => q(0),
        4 => q(1),
        5 => q(-1),
        6 => q(2),
        7 => Rational::from_ratio(1, 2),
        8 => Rational::from_ratio(-3, 2),
        _ => q(rng.gen_range(-5..=5)),
    }
}

fn random_complex(rng: &mut StdRng) -> Complex64 {
    let grid = [0.0, 0.0, 1.0, -1.0, 0.5, 0.25, std::f64::consts::FRAC_1_SQRT_2];
    Complex64::new(grid[rng.gen_range(0..grid.len())], grid[rng.gen_range(0..grid.len())])
}

#[derive(Clone, Copy, Debug)]
enum Op {
    Mul,
    Add,
    Kron,
    Matmul,
}

/// Applies `op` through the library and through the dense oracle.
/// The diagram, its unfolded values, and the dense expectation.
type OpResult<W> = (Wcflobdd<W>, Vec<W>, Vec<W>);

fn op_pair<W: Semifield>(
    mgr: &mut Manager<W>,
    op: Op,
    a: &[W],
    b: &[W],
) -> Result<OpResult<W>, String> {
    let ca = fold(mgr, a).map_err(|e| e.to_string())?;
    let cb = fold(mgr, b).map_err(|e| e.to_string())?;
    let (c, expected) = match op {
        Op::Mul => (multiply(mgr, &ca, &cb), a.iter().zip(b).map(|(x, y)| x.mul(y)).collect()),
        Op::Add => (add(mgr, &ca, &cb), a.iter().zip(b).map(|(x, y)| x.add(y)).collect()),
        Op::Kron => (kronecker(mgr, &ca, &cb), dense_kron(&to_rows(a), &to_rows(b)).concat()),
        Op::Matmul => (matrix_multiply(mgr, &ca, &cb), dense_matmul(&to_rows(a), &to_rows(b)).concat()),
    };
    let c = c.map_err(|e| e.to_string())?;
    let got = unfold(mgr, &c);
    let got = match op {
        Op::Mul | Op::Add => got,
        Op::Kron | Op::Matmul => to_rows(&got).concat(),
    };
    Ok((c, got, expected))
}

fn criterion_3(audit: &mut Audit) -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let mut exact = Manager::<Rational>::new();
    let mut complex = Manager::<Complex64>::new();
    let mut worst = 0.0f64;
    for op in [Op::Mul, Op::Add, Op::Kron, Op::Matmul] {
        for t in 0..500 {
            let level = 1 + (t % 3) as u32;
            let n = 1usize << (1usize << level);
            let a: Vec<Rational> = (0..n).map(|_| random_rational(&mut rng)).collect();
            let b: Vec<Rational> = (0..n).map(|_| random_rational(&mut rng)).collect();
            let (c, got, want) = op_pair(&mut exact, op, &a, &b)?;
            audit.check("rational op", &exact, &c);
            ensure(got == want, || format!("{op:?} rational pair {t} at level {level} differs"))?;

            let a: Vec<Complex64> = (0..n).map(|_| random_complex(&mut rng)).collect();
            let b: Vec<Complex64> = (0..n).map(|_| random_complex(&mut rng)).collect();
            let (c, got, want) = op_pair(&mut complex, op, &a, &b)?;
            audit.check("complex op", &complex, &c);
            for (x, y) in got.iter().zip(&want) {
                worst = worst.max((x - y).norm());
            }
            ensure(worst <= AMPLITUDE_TOL, || format!("{op:?} complex pair {t}: error {worst:e}"))?;
        }
    }
    Ok(format!("4 ops × 500 pairs × 2 instances; rational exact, complex max error {worst:.1e}"))
}

fn criterion_4(audit: &mut Audit) -> Outcome {
    let v: Vec<Rational> = product_values(&[(1, 1), (1, 2), (2, 1)], ValueTuple::OneZero, ValueTuple::ZeroOne);
    ensure(v == [q(0), q(1), q(0)], || format!("product tuple {v:?}"))?;
    let (values, red) = terminal_classes(&v);
    ensure(values == ValueTuple::ZeroOne && red == [1, 2, 1], || format!("collapse gave {values:?} {red:?}"))?;

    let pt = [((q(2), 1), (q(1), 1)), ((q(3), 2), (q(2), 1))];
    let v = sum_values(&pt, ValueTuple::OneZero, ValueTuple::One);
    ensure(v == [q(3), q(2)], || format!("sum tuple {v:?}"))?;
    ensure(terminal_classes(&v).0 == ValueTuple::One, || "addition terminals".into())?;

    // [[e1, e1], [2e2, 4e3]] × [[e1', 0e2'], [3e1', 3e3']]
    let mut mgr = Manager::<Rational>::new();
    let leaf = |mgr: &mut Manager<Rational>, dc: bool, l: i64, r: i64| {
        let g = if dc { Grouping::DontCare { lw: q(l), rw: q(r) } } else { Grouping::Fork { lw: q(l), rw: q(r) } };
        mgr.intern_unchecked(g)
    };
    let dc = leaf(&mut mgr, true, 1, 1);
    let f12 = leaf(&mut mgr, false, 1, 2);
    let f10 = leaf(&mut mgr, false, 1, 0);
    let f11 = leaf(&mut mgr, false, 1, 1);
    let f13 = leaf(&mut mgr, false, 1, 3);
    let internal = |mgr: &mut Manager<Rational>, a, bs: Vec<(_, Vec<u32>)>| {
        let (b_connections, b_return_tuples) = bs.into_iter().unzip();
        mgr.intern_unchecked(Grouping::Internal(InternalGrouping {
            level: 1,
            a_connection: a,
            b_connections,
            b_return_tuples,
            number_of_exits: 3,
        }))
    };
    let g1 = internal(&mut mgr, f12, vec![(dc, vec![1]), (f12, vec![2, 3])]);
    let g2 = internal(&mut mgr, f13, vec![(f10, vec![1, 2]), (f11, vec![1, 3])]);
    let cells = base_cell_products(&mgr, g1, g2);
    let expected = vec![
        BilinearPolynomial::from_terms(vec![((1, 1), q(4))]),
        BilinearPolynomial::from_terms(vec![((1, 3), q(3))]),
        BilinearPolynomial::from_terms(vec![((2, 1), q(2)), ((3, 1), q(12))]),
        BilinearPolynomial::from_terms(vec![((3, 3), q(12))]),
    ];
    ensure(cells == expected, || format!("MatMultTuple {cells:?}"))?;

    let zero = constant_zero(&mut mgr, 1);
    audit.check("zero", &mgr, &zero);
    Ok("collapse [0,1,0] → [0,1] with [1,2,1]; addition → [1]; 2×2 symbolic product".into())
}

fn criterion_5(audit: &mut Audit) -> Outcome {
    let mut mgr = Manager::<f64>::new();
    for l in 1..=6u32 {
        let h = hadamard_family(&mut mgr, l).map_err(|e| e.to_string())?;
        let hh = matrix_multiply(&mut mgr, &h, &h).map_err(|e| e.to_string())?;
        let diff = subtract(&mut mgr, &h, &h).map_err(|e| e.to_string())?;
        audit.check("H × H", &mgr, &hh);
        audit.check("H − H", &mgr, &diff);
        let id = identity_matrix(&mut mgr, l).map_err(|e| e.to_string())?;
        let zero = constant_zero(&mut mgr, l);
        ensure(hh.same(&id), || format!("l={l}: H × H is not the identity handle"))?;
        ensure(diff.same(&zero), || format!("l={l}: H − H is not the zero handle"))?;
        if l <= 3 {
            let rows = to_rows(&unfold(&mgr, &hh));
            for (i, row) in rows.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    ensure((v - want).abs() <= FLOAT_TOL, || format!("l={l}: (H × H)[{i}][{j}] = {v}"))?;
                }
            }
            ensure(unfold(&mgr, &diff).iter().all(|v| v.abs() <= FLOAT_TOL), || format!("l={l}: H − H nonzero"))?;
        }
        for bench in ["B3", "B5"] {
            let cfg = BenchConfig {
                suite: Suite::Synthetic,
                params: None,
                instance: wcflobdd::Instance::Real,
                timeout: Duration::from_secs(60),
                seed: 0,
            };
            let row = run_unit(&cfg, bench, l as usize);
            ensure(row.status == Status::Ok, || format!("bench {bench} l={l}: {:?}", row.message))?;
        }
    }
    Ok("H × H = I and H − H = 0 as canonical handles for l 1..6".into())
}

/// Dense state-vector simulator; qubit 0 is the most significant bit.
fn dense_run(circuit: &Circuit) -> Vec<Complex64> {
    let n = circuit.qubits;
    let dim = 1usize << n;
    let mut psi = vec![Complex64::new(0.0, 0.0); dim];
    psi[0] = Complex64::new(1.0, 0.0);
    let bit = |i: usize, q: usize| (i >> (n - 1 - q)) & 1;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for g in &circuit.gates {
        let mut next = vec![Complex64::new(0.0, 0.0); dim];
        for (i, &a) in psi.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            match *g {
                Gate::H(t) => {
                    let flip = i ^ (1 << (n - 1 - t));
                    let sign = if bit(i, t) == 1 { -1.0 } else { 1.0 };
                    next[i] += a * s * sign;
                    next[flip] += a * s;
                }
                Gate::X(t) => next[i ^ (1 << (n - 1 - t))] += a,
                Gate::Cnot(c, t) => {
                    let j = if bit(i, c) == 1 { i ^ (1 << (n - 1 - t)) } else { i };
                    next[j] += a;
                }
                Gate::Cp(theta, c, t) => {
                    let phase = if bit(i, c) == 1 && bit(i, t) == 1 { Complex64::from_polar(1.0, theta) } else { 1.0.into() };
                    next[i] += a * phase;
                }
                Gate::Phase(theta, t) => {
                    let phase = if bit(i, t) == 1 { Complex64::from_polar(1.0, theta) } else { 1.0.into() };
                    next[i] += a * phase;
                }
                Gate::I => next[i] += a,
                Gate::Dense(_) => unimplemented!("dense gates are not used here"),
            }
        }
        psi = next;
    }
    psi
}

fn criterion_6(audit: &mut Audit) -> Outcome {
    let mut rng = StdRng::seed_from_u64(6);
    let mut worst = 0.0f64;
    let mut circuits = 0;
    for n in 1..=8usize {
        let hidden: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        let b = rng.gen();
        let mut shifted = Circuit::new(n);
        shifted.gates.extend((0..n).filter(|_| rng.gen()).map(Gate::X));
        shifted.gates.extend(qft(n).gates);
        let mut random = Circuit::new(n);
        for _ in 0..4 * n {
            let t = rng.gen_range(0..n);
            let c = (t + rng.gen_range(1..n.max(2))) % n;
            random.gates.push(match rng.gen_range(0..4) {
                0 => Gate::H(t),
                1 => Gate::X(t),
                2 if c != t => Gate::Cnot(c, t),
                3 if c != t => Gate::Cp(rng.gen_range(0.0..std::f64::consts::TAU), c, t),
                _ => Gate::H(t),
            });
        }
        let family = [ghz(n), bernstein_vazirani(&hidden), deutsch_jozsa(&hidden, b), qft(n), shifted, random];
        for circuit in family {
            let mut sim = Simulator::new();
            let state = sim.run_circuit(&circuit).map_err(|e| e.to_string())?;
            audit.check("circuit state", &sim.mgr, &state.rep);
            let got = sim.amplitudes(&state).map_err(|e| e.to_string())?;
            let dense = dense_run(&circuit);
            ensure(got.len() == dense.len(), || format!("n={n}: {} amplitudes, want {}", got.len(), dense.len()))?;
            for (x, y) in got.iter().zip(dense) {
                worst = worst.max((x - y).norm());
            }
            ensure(worst <= AMPLITUDE_TOL, || format!("n={n}: amplitude error {worst:e}"))?;
            circuits += 1;
        }
    }
    let mut recovered = 0;
    for n in [1usize, 3, 8, 32, 128] {
        for seed in 0..20u64 {
            let hidden: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
            for circuit in [bernstein_vazirani(&hidden), deutsch_jozsa(&hidden, seed % 2 == 0)] {
                let mut sim = Simulator::new();
                let state = sim.run_circuit(&circuit).map_err(|e| e.to_string())?;
                let want: String = hidden.iter().map(|&b| if b { '1' } else { '0' }).collect();
                let hist = sim.measure(&state, 4, seed).map_err(|e| e.to_string())?;
                ensure(hist.keys().all(|k| k[..n] == want), || format!("n={n} seed={seed}: {hist:?}"))?;
                recovered += 1;
            }
        }
    }
    let mut sizes = Vec::new();
    for n in [16usize, 64, 256, 1024, 4096] {
        let mut sim = Simulator::new();
        let state = sim.run_circuit(&ghz(n)).map_err(|e| e.to_string())?;
        audit.check("GHZ", &sim.mgr, &state.rep);
        sizes.push(sim.mgr.size(&state.rep).total);
    }
    let steps: Vec<usize> = sizes.windows(2).map(|w| w[1] - w[0]).collect();
    ensure(steps.iter().all(|&d| d == steps[0]), || format!("GHZ sizes {sizes:?}"))?;
    Ok(format!(
        "{circuits} circuits within {worst:.1e}; {recovered} BV/DJ runs recovered; GHZ 16..4096 sizes {sizes:?} (+{} per step)",
        steps[0]
    ))
}

fn chi_square_p(hist: &BTreeMap<String, usize>, expected: &BTreeMap<String, f64>) -> Result<f64, String> {
    let total: usize = hist.values().sum();
    for k in hist.keys() {
        ensure(expected.contains_key(k), || format!("outcome {k} has probability 0"))?;
    }
    let stat: f64 = expected
        .iter()
        .map(|(k, p)| {
            let e = p * total as f64;
            let o = *hist.get(k).unwrap_or(&0) as f64;
            (o - e).powi(2) / e
        })
        .sum();
    let dist = ChiSquared::new((expected.len() - 1) as f64).map_err(|e| e.to_string())?;
    Ok(1.0 - dist.cdf(stat))
}

fn criterion_7(audit: &mut Audit) -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let mut checked = 0;
    for t in 0..300 {
        let level = (t % 3) as u32;
        let n = 1usize << (1usize << level);
        let leaves: Vec<Rational> = (0..n).map(|_| Rational::from_ratio(rng.gen_range(0..4), rng.gen_range(1..4))).collect();
        let total = leaves.iter().fold(q(0), |a, v| a.add(v));
        if total == q(0) {
            continue;
        }
        let mut mgr = Manager::<Rational>::new();
        let c = fold(&mut mgr, &leaves).map_err(|e| e.to_string())?;
        audit.check("sampling input", &mgr, &c);
        let dist = sampler_distribution(&mut mgr, &c).map_err(|e| e.to_string())?;
        let mut got = vec![q(0); n];
        for (a, p) in dist {
            let i = a.iter().fold(0, |acc, &b| acc * 2 + b as usize);
            got[i] = got[i].add(&p);
        }
        for (i, v) in leaves.iter().enumerate() {
            let want = v.div(&total).map_err(|e| e.to_string())?;
            ensure(got[i] == want, || format!("tree {t}: P({i}) = {} != {want}", got[i]))?;
        }
        checked += 1;
    }

    let uniform = |keys: &[&str]| keys.iter().map(|k| (k.to_string(), 1.0 / keys.len() as f64)).collect();
    let cases: Vec<(&str, Circuit, BTreeMap<String, f64>)> = vec![
        ("GHZ_2", ghz(2), uniform(&["00", "11"])),
        ("H|0⟩", {
            let mut c = Circuit::new(1);
            c.gates.push(Gate::H(0));
            c
        }, uniform(&["0", "1"])),
        ("uniform-3", {
            let mut c = Circuit::new(3);
            c.gates.extend((0..3).map(Gate::H));
            c
        }, uniform(&["000", "001", "010", "011", "100", "101", "110", "111"])),
    ];
    let mut ps = Vec::new();
    for (name, circuit, expected) in cases {
        let mut sim = Simulator::new();
        let state = sim.run_circuit(&circuit).map_err(|e| e.to_string())?;
        audit.check(name, &sim.mgr, &state.rep);
        let hist = sim.measure(&state, SHOTS, 7).map_err(|e| e.to_string())?;
        let p = chi_square_p(&hist, &expected)?;
        ensure(p > CHI_SQUARE_MIN_P, || format!("{name}: chi-square p = {p:.2e}"))?;
        ps.push(format!("{name} p={p:.3}"));
    }
    Ok(format!("{checked} exact distributions equal; {}", ps.join(", ")))
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= FLOAT_TOL * (1.0 + a.abs().max(b.abs()))
}

fn close_c(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= FLOAT_TOL * (1.0 + a.norm().max(b.norm()))
}

fn laws<W: Field>(
    runner: &mut TestRunner,
    strategy: impl Strategy<Value = W> + Clone,
    eq: impl Fn(&W, &W) -> bool,
) -> Result<u32, String> {
    let cases = runner.config().cases;
    runner
        .run(&(strategy.clone(), strategy.clone(), strategy), |(a, b, c)| {
            let check = |ok: bool, law: &str| -> Result<(), TestCaseError> {
                if ok {
                    Ok(())
                } else {
                    Err(TestCaseError::fail(format!("{law} fails for {a}, {b}, {c}")))
                }
            };
            check(eq(&a.add(&b), &b.add(&a)), "additive commutativity")?;
            check(eq(&a.mul(&b), &b.mul(&a)), "multiplicative commutativity")?;
            check(eq(&a.add(&b).add(&c), &a.add(&b.add(&c))), "additive associativity")?;
            check(eq(&a.mul(&b).mul(&c), &a.mul(&b.mul(&c))), "multiplicative associativity")?;
            check(eq(&a.mul(&b.add(&c)), &a.mul(&b).add(&a.mul(&c))), "distributivity")?;
            check(eq(&a.add(&W::zero()), &a), "additive identity")?;
            check(eq(&a.mul(&W::one()), &a), "multiplicative identity")?;
            check(a.mul(&W::zero()).is_zero(), "zero annihilates")?;
            check(a.add(&a.neg()).is_zero(), "additive inverse")?;
            if !a.is_zero() {
                check(eq(&a.mul(&a.inverse().unwrap()), &W::one()), "multiplicative inverse")?;
            } else {
                check(a.inverse().is_err(), "zero has no inverse")?;
            }
            check(W::parse(&a.to_text()).map(|p| eq(&p, &a)).unwrap_or(false), "text round trip")?;
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(cases)
}

fn criterion_9() -> Outcome {
    let mut runner = TestRunner::new(Config { cases: 512, failure_persistence: None, ..Config::default() });
    let small = || (-40i64..40, 1i64..9);
    let n = laws(&mut runner, small().prop_map(|(p, d)| Rational::from_ratio(p, d)), |a, b| a == b)?;
    let real = || (-1000i32..1000).prop_map(|k| k as f64 / 37.0);
    laws(&mut runner, real(), |a: &f64, b: &f64| close(*a, *b))?;
    laws(&mut runner, (real(), real()).prop_map(|(x, y)| Complex64::new(x, y)), |a: &Complex64, b: &Complex64| {
        close_c(*a, *b)
    })?;
    Ok(format!("{n} cases each for rational (exact), float and complex ({FLOAT_TOL:e})"))
}

fn main() -> ExitCode {
    let mut audit = Audit::default();
    let secs = Duration::from_secs;
    let results = [
        run("1 size formulas", secs(5), criterion_1),
        run("2 canonicity round trip", secs(30), || criterion_2(&mut audit)),
        run("3 operations vs dense oracle", secs(120), || criterion_3(&mut audit)),
        run("4 worked examples", secs(1), || criterion_4(&mut audit)),
        run("5 benchmark identities", secs(60), || criterion_5(&mut audit)),
        run("6 quantum circuits", secs(300), || criterion_6(&mut audit)),
        run("7 sampling", secs(60), || criterion_7(&mut audit)),
        run("8 invariant closure", secs(1), || {
            ensure(audit.failures.is_empty(), || {
                format!("{} of {} diagrams invalid: {}", audit.failures.len(), audit.checked, audit.failures[0])
            })?;
            Ok(format!("{} diagrams from criteria 2–7 validated, 0 violations", audit.checked))
        }),
        run("9 semifield axioms", secs(10), criterion_9),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
