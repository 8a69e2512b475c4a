//! Benchmark harness: synthetic matrix identities, separation families and
//! quantum circuits. Each unit runs in a fresh manager; the reported time is
//! the wall time of the unit body only.

use std::io::Write;
use std::time::{Duration, Instant};

use anyhow::{bail, Result};
use serde::Serialize;
use wcflobdd::construct::{constant_zero, exp_family, hadamard_dyadic, hadamard_family, identity_matrix, not_matrix, fold};
use wcflobdd::core::SizeMetric;
use wcflobdd::matrix::matrix_multiply;
use wcflobdd::pointwise::{add, subtract};
use wcflobdd::quantum::{bernstein_vazirani, deutsch_jozsa, ghz, grover, qft, Circuit, QuantumState, Simulator};
use wcflobdd::sampling::SampleContext;
use wcflobdd::{validate, Complex64, Field, Instance, Manager, Numeric, Rational, Semifield, Tropical, Wcflobdd};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Synthetic,
    Separation,
    Quantum,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Synthetic => "synthetic",
            Suite::Separation => "separation",
            Suite::Quantum => "quantum",
        }
    }

    /// Desk-scale parameters: levels for matrices and families, qubit
    /// counts for circuits.
    pub fn default_params(self, bench: &str) -> Vec<usize> {
        match (self, bench) {
            (Suite::Synthetic, "B2") => (2..=6).collect(),
            (Suite::Synthetic, _) => (1..=6).collect(),
            (Suite::Separation, "H") => (1..=10).collect(),
            (Suite::Separation, _) => (0..=10).collect(),
            (Suite::Quantum, "Grover") => (2..=4).collect(),
            (Suite::Quantum, "QFT") => vec![4, 8, 16, 64],
            (Suite::Quantum, _) => vec![4, 16, 64, 256, 1024],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Timeout,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub suite: String,
    pub bench: String,
    pub param: usize,
    pub instance: String,
    pub time_s: f64,
    pub groupings: Option<usize>,
    pub vertices: Option<usize>,
    pub edges: Option<usize>,
    pub total: Option<usize>,
    pub status: Status,
    #[serde(skip)]
    pub message: Option<String>,
}

pub struct BenchConfig {
    pub suite: Suite,
    /// `None` runs each benchmark's default parameters.
    pub params: Option<Vec<usize>>,
    pub instance: Instance,
    pub timeout: Duration,
    pub seed: u64,
}

struct Outcome {
    size: SizeMetric,
    instance: Instance,
    problem: Option<String>,
}

fn outcome<W: Semifield>(mgr: &Manager<W>, c: &Wcflobdd<W>, check: Option<String>) -> Outcome {
    let problem = check.or_else(|| validate(mgr, c).first().map(|v| v.to_string()));
    Outcome { size: mgr.size(c), instance: W::INSTANCE, problem }
}

pub fn bench_names(suite: Suite) -> &'static [&'static str] {
    match suite {
        Suite::Synthetic => &["B1", "B2", "B3", "B4", "B5"],
        Suite::Separation => &["EXP", "H"],
        Suite::Quantum => &["GHZ", "BV", "DJ", "QFT", "Grover"],
    }
}

/// Runs every (benchmark, parameter) unit, handing each row to `sink` as it
/// finishes. Once the suite budget is spent the remaining rows are emitted
/// with status `timeout`.
pub fn run_suite(cfg: &BenchConfig, mut sink: impl FnMut(&BenchRow) -> Result<()>) -> Result<Vec<BenchRow>> {
    let start = Instant::now();
    let mut rows = Vec::new();
    for &bench in bench_names(cfg.suite) {
        let params = cfg.params.clone().unwrap_or_else(|| cfg.suite.default_params(bench));
        for param in params {
            let row = if start.elapsed() >= cfg.timeout {
                BenchRow {
                    suite: cfg.suite.name().into(),
                    bench: bench.into(),
                    param,
                    instance: cfg.instance.to_string(),
                    time_s: 0.0,
                    groupings: None,
                    vertices: None,
                    edges: None,
                    total: None,
                    status: Status::Timeout,
                    message: None,
                }
            } else {
                run_unit(cfg, bench, param)
            };
            sink(&row)?;
            rows.push(row);
        }
    }
    Ok(rows)
}

pub fn run_unit(cfg: &BenchConfig, bench: &str, param: usize) -> BenchRow {
    let t0 = Instant::now();
    let result = match cfg.suite {
        Suite::Synthetic => match cfg.instance {
            Instance::Real => synthetic::<f64>(bench, param),
            Instance::Complex => synthetic::<Complex64>(bench, param),
            Instance::Rational => synthetic_rational(bench, param),
            Instance::Tropical => Err(anyhow::anyhow!("the synthetic suite needs a field")),
        },
        Suite::Separation => separation(bench, param, cfg.instance),
        Suite::Quantum => quantum(bench, param, cfg.seed),
    };
    let time_s = t0.elapsed().as_secs_f64();
    let base = BenchRow {
        suite: cfg.suite.name().into(),
        bench: bench.into(),
        param,
        instance: if cfg.suite == Suite::Quantum { Instance::Complex } else { cfg.instance }.to_string(),
        time_s,
        groupings: None,
        vertices: None,
        edges: None,
        total: None,
        status: Status::Error,
        message: None,
    };
    match result {
        Ok(o) => BenchRow {
            instance: o.instance.to_string(),
            groupings: Some(o.size.groupings),
            vertices: Some(o.size.vertices),
            edges: Some(o.size.edges),
            total: Some(o.size.total),
            status: if o.problem.is_none() { Status::Ok } else { Status::Error },
            message: o.problem,
            ..base
        },
        Err(e) => BenchRow { message: Some(e.to_string()), ..base },
    }
}

/// `⊗` of 2×2 matrices placed on qubits of a `2^p`-qubit register,
/// identity elsewhere. Entries are row-major `[m00, m01, m10, m11]`.
pub fn tensor<W: Field>(mgr: &mut Manager<W>, ops: &[(usize, [W; 4])], p: u32) -> Result<Wcflobdd<W>> {
    if ops.is_empty() {
        return Ok(identity_matrix(mgr, p + 1)?);
    }
    if p == 0 {
        return Ok(fold(mgr, &ops[0].1)?);
    }
    let half = 1usize << (p - 1);
    let lo: Vec<_> = ops.iter().filter(|(q, _)| *q < half).cloned().collect();
    let hi: Vec<_> = ops.iter().filter(|(q, _)| *q >= half).map(|(q, m)| (q - half, m.clone())).collect();
    let a = tensor(mgr, &lo, p - 1)?;
    let b = tensor(mgr, &hi, p - 1)?;
    Ok(wcflobdd::matrix::kronecker(mgr, &a, &b)?)
}

/// CNOT on a `2^p`-qubit register.
pub fn cnot_matrix<W: Field>(mgr: &mut Manager<W>, p: u32, control: usize, target: usize) -> Result<Wcflobdd<W>> {
    let (o, z) = (W::one(), W::zero());
    let p0 = [o.clone(), z.clone(), z.clone(), z.clone()];
    let p1 = [z.clone(), z.clone(), z.clone(), o.clone()];
    let x = [z.clone(), o.clone(), o, z];
    let off = tensor(mgr, &[(control, p0)], p)?;
    let on = tensor(mgr, &[(control, p1), (target, x)], p)?;
    Ok(add(mgr, &off, &on)?)
}

/// Matrices of level `l` act on `2^(l-1)` qubits.
fn synthetic<W: Numeric>(bench: &str, l: usize) -> Result<Outcome> {
    synthetic_with(bench, l, |m, level| Ok(hadamard_family::<W>(m, level)?))
}

fn synthetic_with<W: Field>(
    bench: &str,
    l: usize,
    hadamard: impl Fn(&mut Manager<W>, u32) -> Result<Wcflobdd<W>>,
) -> Result<Outcome> {
    if l == 0 {
        bail!("matrices start at level 1");
    }
    let level = l as u32;
    let mut mgr = Manager::<W>::new();
    let m = &mut mgr;
    let (c, check) = match bench {
        "B1" => {
            let i = identity_matrix(m, level)?;
            let x = not_matrix(m, level)?;
            (add(m, &i, &x)?, None)
        }
        "B2" => {
            let n = 1usize << (level - 1);
            if n < 2 {
                bail!("B2 needs at least two qubits");
            }
            let a = cnot_matrix(m, level - 1, 0, n - 1)?;
            let b = cnot_matrix(m, level - 1, n / 2 - 1, n / 2)?;
            (matrix_multiply(m, &a, &b)?, None)
        }
        "B3" => {
            let h = hadamard(m, level)?;
            let p = matrix_multiply(m, &h, &h)?;
            let i = identity_matrix(m, level)?;
            let check = (!p.same(&i)).then(|| "H × H is not the identity".to_string());
            (p, check)
        }
        "B4" => {
            let h = hadamard(m, level)?;
            let i = identity_matrix(m, level)?;
            let x = not_matrix(m, level)?;
            let hi = matrix_multiply(m, &h, &i)?;
            let ix = matrix_multiply(m, &i, &x)?;
            (add(m, &hi, &ix)?, None)
        }
        "B5" => {
            let h = hadamard(m, level)?;
            let d = subtract(m, &h, &h)?;
            let z = constant_zero(m, level);
            let check = (!d.same(&z)).then(|| "H − H is not the zero diagram".to_string());
            (d, check)
        }
        _ => bail!("unknown synthetic benchmark {bench}"),
    };
    Ok(outcome(&mgr, &c, check))
}

/// H needs `1/√2` at level 1, so the rational suite starts H benchmarks at
/// level 2.
fn synthetic_rational(bench: &str, l: usize) -> Result<Outcome> {
    synthetic_with::<Rational>(bench, l, |m, level| Ok(hadamard_dyadic(m, level)?))
}

fn separation(bench: &str, l: usize, instance: Instance) -> Result<Outcome> {
    let (o, expected) = match bench {
        "EXP" => {
            let n = 1usize << l;
            // Exact weights 2^(2^i) outgrow any rational store past l = 4;
            // the max-plus instance holds their base-2 logarithms instead.
            let o = if l <= 4 && instance == Instance::Rational {
                let mut mgr = Manager::<Rational>::new();
                let c = exp_family(&mut mgr, n)?;
                outcome(&mgr, &c, None)
            } else {
                let mut mgr = Manager::<Tropical>::new();
                let c = exp_family(&mut mgr, n)?;
                outcome(&mgr, &c, None)
            };
            (o, 13 * n - 7)
        }
        "H" => {
            if l == 0 {
                bail!("H starts at level 1");
            }
            let level = l as u32;
            let o = match instance {
                Instance::Complex => {
                    let mut mgr = Manager::<Complex64>::new();
                    let c = hadamard_family(&mut mgr, level)?;
                    outcome(&mgr, &c, None)
                }
                Instance::Real => {
                    let mut mgr = Manager::<f64>::new();
                    let c = hadamard_family(&mut mgr, level)?;
                    outcome(&mgr, &c, None)
                }
                _ if l == 1 => {
                    let mut mgr = Manager::<f64>::new();
                    let c = hadamard_family(&mut mgr, level)?;
                    outcome(&mgr, &c, None)
                }
                _ => {
                    let mut mgr = Manager::<Rational>::new();
                    let c = hadamard_dyadic(&mut mgr, level)?;
                    outcome(&mgr, &c, None)
                }
            };
            (o, 8 * l + 22)
        }
        _ => bail!("unknown separation family {bench}"),
    };
    let problem = o
        .problem
        .clone()
        .or_else(|| (o.size.total != expected).then(|| format!("size {} differs from {expected}", o.size.total)));
    Ok(Outcome { problem, ..o })
}

fn hidden_string(n: usize, seed: u64) -> Vec<bool> {
    let mut ctx = SampleContext::new(seed);
    (0..n).map(|_| ctx.next_unit() < 0.5).collect()
}

fn quantum(bench: &str, n: usize, seed: u64) -> Result<Outcome> {
    if n == 0 {
        bail!("circuits need at least one qubit");
    }
    let hidden = hidden_string(n, seed);
    let circuit: Circuit = match bench {
        "GHZ" => ghz(n),
        "BV" => bernstein_vazirani(&hidden),
        "DJ" => deutsch_jozsa(&hidden, seed % 2 == 1),
        "QFT" => qft(n),
        "Grover" => grover(n, (seed as usize) % (1 << n.min(4)))?,
        _ => bail!("unknown circuit {bench}"),
    };
    let mut sim = Simulator::new();
    let state = sim.run_circuit(&circuit)?;
    let mut check = None;
    if let Some(h) = &circuit.hidden {
        let want: String = h.iter().map(|&b| if b { '1' } else { '0' }).collect();
        let p = prefix_probability(&sim, &state, h)?;
        let shots = sim.measure(&state, 1, seed)?;
        if p < 0.5 {
            check = Some(format!("{want} has probability {p}"));
        } else if bench != "Grover" && !shots.keys().all(|k| k.starts_with(&want)) {
            check = Some(format!("measurement did not recover {want}"));
        }
    }
    Ok(outcome(&sim.mgr, &state.rep, check))
}

/// Probability that the leading qubits read `prefix`, summing over the
/// remaining (at most a few ancilla) qubits.
fn prefix_probability(sim: &Simulator, state: &QuantumState, prefix: &[bool]) -> Result<f64> {
    let extra = state.qubits - prefix.len();
    if extra > 8 {
        bail!("too many qubits outside the hidden string");
    }
    let mut p = 0.0;
    for tail in 0..1usize << extra {
        let mut x = prefix.to_vec();
        x.extend((0..extra).map(|b| (tail >> b) & 1 == 1));
        p += sim.amplitude(state, &x)?.norm_sqr();
    }
    Ok(p)
}

pub const HEADER: [&str; 10] =
    ["suite", "bench", "param", "instance", "time_s", "groupings", "vertices", "edges", "total", "status"];

fn cells(row: &BenchRow) -> [String; 10] {
    let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
    [
        row.suite.clone(),
        row.bench.clone(),
        row.param.to_string(),
        row.instance.clone(),
        format!("{:.6}", row.time_s),
        opt(row.groupings),
        opt(row.vertices),
        opt(row.edges),
        opt(row.total),
        match row.status {
            Status::Ok => "ok",
            Status::Timeout => "timeout",
            Status::Error => "error",
        }
        .into(),
    ]
}

/// Streams rows as CSV (with a header) or as JSON lines.
pub struct RowWriter<Wr: Write> {
    csv: Option<csv::Writer<Wr>>,
    json: Option<Wr>,
}

impl<Wr: Write> RowWriter<Wr> {
    pub fn csv(out: Wr) -> Result<Self> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(HEADER)?;
        Ok(RowWriter { csv: Some(w), json: None })
    }

    pub fn json(out: Wr) -> Self {
        RowWriter { csv: None, json: Some(out) }
    }

    pub fn write(&mut self, row: &BenchRow) -> Result<()> {
        if let Some(w) = &mut self.csv {
            w.write_record(cells(row))?;
            w.flush()?;
        }
        if let Some(w) = &mut self.json {
            serde_json::to_writer(&mut *w, row)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}
