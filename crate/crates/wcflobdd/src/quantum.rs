//! Quantum circuits on diagrams over the complex instance.
//!
//! An `n`-qubit register is padded to `N = 2^p` qubits; its state is the
//! level-`(p+1)` broadcast column `v(r, c) = v_r`. Qubit 0 is the most
//! significant row bit and padding qubits stay in `|0⟩`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

use hashbrown::HashMap;

use crate::construct::{fold, identity_matrix};
use crate::core::{Manager, Wcflobdd};
use crate::error::{Error, Result};
use crate::matrix::{apply_matrix_to_vector, kronecker, matrix_leaves};
use crate::pointwise::add;
use crate::sampling::{log_total, measure_view, sample_assignment, SampleContext};
use crate::semifield::Complex64;

type Mat2 = [[Complex64; 2]; 2];

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    I,
    Phase(f64, usize),
    Cnot(usize, usize),
    /// Controlled phase `CP(θ, control, target)`.
    Cp(f64, usize, usize),
    /// A unitary on the first `log2(dim)` qubits, row-major.
    Dense(Vec<Vec<Complex64>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum GateKey {
    H(usize),
    X(usize),
    I,
    Phase(u64, usize),
    Cnot(usize, usize),
    Cp(u64, usize, usize),
}

impl Gate {
    fn key(&self) -> Option<GateKey> {
        Some(match *self {
            Gate::H(q) => GateKey::H(q),
            Gate::X(q) => GateKey::X(q),
            Gate::I => GateKey::I,
            Gate::Phase(t, q) => GateKey::Phase(t.to_bits(), q),
            Gate::Cnot(c, t) => GateKey::Cnot(c, t),
            Gate::Cp(t, c, q) => GateKey::Cp(t.to_bits(), c, q),
            Gate::Dense(_) => return None,
        })
    }

    fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::Phase(_, q) => vec![q],
            Gate::Cnot(a, b) | Gate::Cp(_, a, b) => vec![a, b],
            Gate::I | Gate::Dense(_) => vec![],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub qubits: usize,
    pub gates: Vec<Gate>,
    pub hidden: Option<Vec<bool>>,
}

impl Circuit {
    pub fn new(qubits: usize) -> Self {
        Circuit { qubits, gates: Vec::new(), hidden: None }
    }

    /// Checks gate positions and the hidden-string length.
    pub fn check(&self) -> Result<()> {
        if self.qubits == 0 {
            return Err(Error::Usage("a circuit needs at least one qubit".into()));
        }
        for (k, g) in self.gates.iter().enumerate() {
            let qs = g.qubits();
            if let Some(q) = qs.iter().find(|&&q| q >= self.qubits) {
                return Err(Error::Usage(alloc::format!("gate {k}: qubit {q} out of range")));
            }
            if qs.len() == 2 && qs[0] == qs[1] {
                return Err(Error::Usage(alloc::format!("gate {k}: control equals target")));
            }
            if let Gate::Dense(m) = g {
                let dim = m.len();
                if !dim.is_power_of_two() || dim > 1 << self.qubits || m.iter().any(|r| r.len() != dim) {
                    return Err(Error::Usage(alloc::format!("gate {k}: bad dense matrix")));
                }
            }
        }
        if let Some(h) = &self.hidden {
            if h.len() > self.qubits {
                return Err(Error::Usage("hidden string longer than the register".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct QuantumState {
    pub qubits: usize,
    /// `log2` of the padded qubit count.
    pub pad_log: u32,
    pub rep: Wcflobdd<Complex64>,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn mat_h() -> Mat2 {
    let s = c(FRAC_1_SQRT_2);
    [[s, s], [s, -s]]
}

fn mat_x() -> Mat2 {
    [[c(0.0), c(1.0)], [c(1.0), c(0.0)]]
}

fn mat_phase(theta: f64) -> Mat2 {
    [[c(1.0), c(0.0)], [c(0.0), Complex64::from_polar(1.0, theta)]]
}

fn proj(bit: usize) -> Mat2 {
    let mut m = [[c(0.0); 2]; 2];
    m[bit][bit] = c(1.0);
    m
}

/// `log2` of the padded size of an `n`-qubit register.
pub fn pad_log(n: usize) -> u32 {
    n.max(1).next_power_of_two().trailing_zeros()
}

/// Owns the manager and memoizes embedded gates.
pub struct Simulator {
    pub mgr: Manager<Complex64>,
    gates: HashMap<(u32, GateKey), Wcflobdd<Complex64>>,
}

impl Default for Simulator {
    fn default() -> Self {
        Self::new()
    }
}

impl Simulator {
    pub fn new() -> Self {
        Simulator { mgr: Manager::new(), gates: HashMap::new() }
    }

    /// `⊗` of 2×2 matrices on a `2^p`-qubit register, identity elsewhere.
    fn embed(&mut self, ops: &[(usize, Mat2)], p: u32) -> Result<Wcflobdd<Complex64>> {
        if ops.is_empty() {
            return identity_matrix(&mut self.mgr, p + 1);
        }
        if p == 0 {
            let m = &ops[0].1;
            return fold(&mut self.mgr, &[m[0][0], m[0][1], m[1][0], m[1][1]]);
        }
        let half = 1usize << (p - 1);
        let lo: Vec<_> = ops.iter().filter(|(q, _)| *q < half).cloned().collect();
        let hi: Vec<_> = ops.iter().filter(|(q, _)| *q >= half).map(|(q, m)| (q - half, *m)).collect();
        let a = self.embed(&lo, p - 1)?;
        let b = self.embed(&hi, p - 1)?;
        kronecker(&mut self.mgr, &a, &b)
    }

    /// The matrix of `gate` on a `2^p`-qubit register.
    pub fn build_gate(&mut self, gate: &Gate, p: u32) -> Result<Wcflobdd<Complex64>> {
        let Some(key) = gate.key() else {
            let Gate::Dense(m) = gate else { unreachable!() };
            return self.dense_gate(m, p);
        };
        if let Some(g) = self.gates.get(&(p, key.clone())) {
            return Ok(g.clone());
        }
        let g = match *gate {
            Gate::H(q) => self.embed(&[(q, mat_h())], p)?,
            Gate::X(q) => self.embed(&[(q, mat_x())], p)?,
            Gate::I => self.embed(&[], p)?,
            Gate::Phase(t, q) => self.embed(&[(q, mat_phase(t))], p)?,
            Gate::Cnot(a, b) | Gate::Cp(_, a, b) => {
                if a == b {
                    return Err(Error::Usage("control equals target".into()));
                }
                let u = match *gate {
                    Gate::Cp(t, ..) => mat_phase(t),
                    _ => mat_x(),
                };
                let off = self.embed(&[(a, proj(0))], p)?;
                let on = self.embed(&[(a, proj(1)), (b, u)], p)?;
                add(&mut self.mgr, &off, &on)?
            }
            Gate::Dense(_) => unreachable!(),
        };
        self.gates.insert((p, key), g.clone());
        Ok(g)
    }

    fn dense_gate(&mut self, m: &[Vec<Complex64>], p: u32) -> Result<Wcflobdd<Complex64>> {
        let full = 1usize << (1usize << p);
        if full > 256 {
            return Err(Error::Usage("dense gates are limited to 8 padded qubits".into()));
        }
        let reps = full / m.len();
        let rows: Vec<Vec<Complex64>> = (0..full)
            .map(|i| {
                (0..full)
                    .map(|j| if i % reps == j % reps { m[i / reps][j / reps] } else { c(0.0) })
                    .collect()
            })
            .collect();
        fold(&mut self.mgr, &matrix_leaves(&rows))
    }

    /// `|x⟩` for an `n`-qubit register (`x[0]` is qubit 0).
    pub fn basis_state(&mut self, x: &[bool]) -> Result<QuantumState> {
        let p = pad_log(x.len());
        let zero = fold(&mut self.mgr, &[c(1.0), c(1.0), c(0.0), c(0.0)])?;
        let one = fold(&mut self.mgr, &[c(0.0), c(0.0), c(1.0), c(1.0)])?;
        let mut layer: Vec<_> = (0..1usize << p).map(|q| if x.get(q) == Some(&true) { one.clone() } else { zero.clone() }).collect();
        while layer.len() > 1 {
            let mut next = Vec::with_capacity(layer.len() / 2);
            for pair in layer.chunks(2) {
                next.push(kronecker(&mut self.mgr, &pair[0], &pair[1])?);
            }
            layer = next;
        }
        Ok(QuantumState { qubits: x.len(), pad_log: p, rep: layer.pop().expect("one qubit") })
    }

    pub fn apply(&mut self, state: &QuantumState, gate: &Gate) -> Result<QuantumState> {
        let m = self.build_gate(gate, state.pad_log)?;
        let rep = apply_matrix_to_vector(&mut self.mgr, &m, &state.rep)?;
        Ok(QuantumState { rep, ..state.clone() })
    }

    /// Left fold of the gates over `|0…0⟩`.
    pub fn run_circuit(&mut self, circuit: &Circuit) -> Result<QuantumState> {
        circuit.check()?;
        let mut state = self.basis_state(&vec![false; circuit.qubits])?;
        for gate in &circuit.gates {
            state = self.apply(&state, gate)?;
        }
        Ok(state)
    }

    /// Amplitude of basis state `x`.
    pub fn amplitude(&self, state: &QuantumState, x: &[bool]) -> Result<Complex64> {
        let n = 1usize << state.pad_log;
        let mut bits = vec![false; 2 * n];
        for (q, &b) in x.iter().enumerate() {
            bits[2 * q] = b;
        }
        self.mgr.evaluate(&state.rep, &bits)
    }

    /// All `2^n` amplitudes, basis states in binary order (qubit 0 first).
    pub fn amplitudes(&self, state: &QuantumState) -> Result<Vec<Complex64>> {
        let n = state.qubits;
        if n > 20 {
            return Err(Error::Usage("dense amplitudes are limited to 20 qubits".into()));
        }
        (0..1usize << n)
            .map(|i| {
                let x: Vec<bool> = (0..n).map(|q| (i >> (n - 1 - q)) & 1 == 1).collect();
                self.amplitude(state, &x)
            })
            .collect()
    }

    /// `Σ |amplitude|²`.
    pub fn norm_sqr(&self, state: &QuantumState) -> f64 {
        let mut view = Manager::<f64>::new();
        let v = measure_view(&self.mgr, &state.rep, &mut view);
        // Every column of the broadcast state repeats the vector.
        let columns = (1u64 << state.pad_log) as f64 * core::f64::consts::LN_2;
        libm::exp(log_total(&mut view, &v) - columns)
    }

    /// `shots` samples of the register, as bit-strings (qubit 0 first).
    pub fn measure(&self, state: &QuantumState, shots: usize, seed: u64) -> Result<BTreeMap<String, usize>> {
        let mut view = Manager::<f64>::new();
        let v = measure_view(&self.mgr, &state.rep, &mut view);
        let mut ctx = SampleContext::new(seed);
        let mut hist = BTreeMap::new();
        for _ in 0..shots {
            let a = sample_assignment(&mut view, &v, &mut ctx)?;
            let s: String = (0..state.qubits).map(|q| if a[2 * q] { '1' } else { '0' }).collect();
            *hist.entry(s).or_insert(0) += 1;
        }
        Ok(hist)
    }
}

/// `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz(n: usize) -> Circuit {
    let mut c = Circuit::new(n);
    c.gates.push(Gate::H(0));
    c.gates.extend((1..n).map(|t| Gate::Cnot(0, t)));
    c
}

/// Bernstein–Vazirani for `f(x) = s·x`, with the ancilla as the last qubit.
pub fn bernstein_vazirani(hidden: &[bool]) -> Circuit {
    phase_oracle_circuit(hidden, false)
}

/// Deutsch–Jozsa for `f(x) = s·x ⊕ b`: balanced when `s ≠ 0`, constant
/// otherwise. The measured register is `s`.
pub fn deutsch_jozsa(hidden: &[bool], b: bool) -> Circuit {
    phase_oracle_circuit(hidden, b)
}

fn phase_oracle_circuit(hidden: &[bool], b: bool) -> Circuit {
    let n = hidden.len();
    let mut c = Circuit::new(n + 1);
    c.gates.push(Gate::X(n));
    c.gates.extend((0..=n).map(Gate::H));
    c.gates.extend(hidden.iter().enumerate().filter(|(_, &s)| s).map(|(i, _)| Gate::Cnot(i, n)));
    if b {
        c.gates.push(Gate::X(n));
    }
    c.gates.extend((0..n).map(Gate::H));
    c.hidden = Some(hidden.to_vec());
    c
}

/// Quantum Fourier transform on `n` qubits (with the final reversal).
pub fn qft(n: usize) -> Circuit {
    let mut c = Circuit::new(n);
    append_qft(&mut c, n);
    c
}

pub fn append_qft(c: &mut Circuit, n: usize) {
    for i in 0..n {
        c.gates.push(Gate::H(i));
        for j in i + 1..n {
            c.gates.push(Gate::Cp(PI / (1u64 << (j - i)) as f64, j, i));
        }
    }
    for i in 0..n / 2 {
        let (a, b) = (i, n - 1 - i);
        c.gates.extend([Gate::Cnot(a, b), Gate::Cnot(b, a), Gate::Cnot(a, b)]);
    }
}

/// Grover search for `marked` on `n ≤ 4` qubits, with dense oracle and
/// diffusion matrices.
pub fn grover(n: usize, marked: usize) -> Result<Circuit> {
    if n == 0 || n > 4 || marked >= 1 << n {
        return Err(Error::Usage("Grover needs 1 ≤ n ≤ 4 and a marked state in range".into()));
    }
    let dim = 1usize << n;
    let oracle: Vec<Vec<Complex64>> = (0..dim)
        .map(|i| (0..dim).map(|j| c(if i != j { 0.0 } else if i == marked { -1.0 } else { 1.0 })).collect())
        .collect();
    let diffusion: Vec<Vec<Complex64>> = (0..dim)
        .map(|i| (0..dim).map(|j| c(2.0 / dim as f64 - if i == j { 1.0 } else { 0.0 })).collect())
        .collect();
    let mut circ = Circuit::new(n);
    circ.gates.extend((0..n).map(Gate::H));
    let rounds = libm::floor(PI / 4.0 * libm::sqrt(dim as f64)).max(1.0) as usize;
    for _ in 0..rounds {
        circ.gates.push(Gate::Dense(oracle.clone()));
        circ.gates.push(Gate::Dense(diffusion.clone()));
    }
    circ.hidden = Some((0..n).map(|q| (marked >> (n - 1 - q)) & 1 == 1).collect());
    Ok(circ)
}

/// Basis-state bits of `x` on `n` qubits, qubit 0 most significant.
pub fn bits_of(x: usize, n: usize) -> Vec<bool> {
    (0..n).map(|q| (x >> (n - 1 - q)) & 1 == 1).collect()
}
