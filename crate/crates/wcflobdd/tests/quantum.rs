use std::f64::consts::{FRAC_1_SQRT_2, PI};

use wcflobdd::quantum::{
    bernstein_vazirani, bits_of, deutsch_jozsa, ghz, grover, qft, Circuit, Gate, Simulator,
};
use wcflobdd::validate::validate;
use wcflobdd::Complex64;

/// Dense state-vector simulator; qubit 0 is the most significant bit.
fn dense_run(circuit: &Circuit) -> Vec<Complex64> {
    let n = circuit.qubits;
    let dim = 1usize << n;
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    v[0] = Complex64::new(1.0, 0.0);
    let bit = |i: usize, q: usize| (i >> (n - 1 - q)) & 1;
    for gate in &circuit.gates {
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for i in 0..dim {
            match gate {
                Gate::H(q) => {
                    let j = i ^ (1 << (n - 1 - q));
                    let s = if bit(i, *q) == 1 { -1.0 } else { 1.0 };
                    let (lo, hi) = if bit(i, *q) == 0 { (i, j) } else { (j, i) };
                    out[i] = (v[lo] + v[hi] * s) * FRAC_1_SQRT_2;
                    let _ = hi;
                }
                Gate::X(q) => out[i] = v[i ^ (1 << (n - 1 - q))],
                Gate::I => out[i] = v[i],
                Gate::Phase(t, q) => {
                    out[i] = if bit(i, *q) == 1 { v[i] * Complex64::from_polar(1.0, *t) } else { v[i] }
                }
                Gate::Cnot(c, t) => {
                    out[i] = if bit(i, *c) == 1 { v[i ^ (1 << (n - 1 - t))] } else { v[i] }
                }
                Gate::Cp(th, c, t) => {
                    out[i] = if bit(i, *c) == 1 && bit(i, *t) == 1 {
                        v[i] * Complex64::from_polar(1.0, *th)
                    } else {
                        v[i]
                    }
                }
                Gate::Dense(m) => {
                    let k = m.len().trailing_zeros() as usize;
                    let shift = n - k;
                    let (hi, lo) = (i >> shift, i & ((1 << shift) - 1));
                    out[i] = (0..m.len()).map(|j| m[hi][j] * v[(j << shift) | lo]).sum();
                }
            }
        }
        v = out;
    }
    v
}

fn assert_close(a: &[Complex64], b: &[Complex64]) {
    assert_eq!(a.len(), b.len());
    for (k, (x, y)) in a.iter().zip(b).enumerate() {
        assert!((x - y).norm() < 1e-9, "amplitude {k}: {x} vs {y}");
    }
}

fn check(circuit: &Circuit) -> Simulator {
    let mut sim = Simulator::new();
    let state = sim.run_circuit(circuit).unwrap();
    assert_close(&sim.amplitudes(&state).unwrap(), &dense_run(circuit));
    assert!((sim.norm_sqr(&state) - 1.0).abs() < 1e-6);
    assert!(validate(&sim.mgr, &state.rep).is_empty());
    sim
}

#[test]
fn circuits_match_dense_simulation() {
    for n in 1..=8 {
        check(&ghz(n));
        check(&qft(n));
    }
    for s in [vec![true], vec![true, false, true], vec![false, true, true, false, true, false, true]] {
        check(&bernstein_vazirani(&s));
        check(&deutsch_jozsa(&s, true));
    }
    for n in 1..=4 {
        check(&grover(n, (1 << n) - 1).unwrap());
    }
}

#[test]
fn qft_of_basis_state() {
    let mut circ = Circuit::new(3);
    circ.gates.extend([Gate::X(0), Gate::X(2)]);
    circ.gates.extend(qft(3).gates);
    let mut sim = Simulator::new();
    let state = sim.run_circuit(&circ).unwrap();
    for k in 0..8 {
        let expected = Complex64::from_polar(1.0 / 8f64.sqrt(), 2.0 * PI * 5.0 * k as f64 / 8.0);
        let got = sim.amplitude(&state, &bits_of(k, 3)).unwrap();
        assert!((got - expected).norm() < 1e-9);
    }
}

#[test]
fn hidden_strings_are_recovered() {
    let s = vec![true, false, true, true, false];
    for circ in [bernstein_vazirani(&s), deutsch_jozsa(&s, false)] {
        let mut sim = Simulator::new();
        let state = sim.run_circuit(&circ).unwrap();
        for seed in 0..20 {
            let hist = sim.measure(&state, 5, seed).unwrap();
            let expected: String = s.iter().map(|&b| if b { '1' } else { '0' }).collect();
            let mut prefixes: Vec<&str> = hist.keys().map(|k| &k[..5]).collect();
            prefixes.dedup();
            assert_eq!(prefixes, vec![expected.as_str()]);
        }
    }
}

#[test]
fn cnot_matrices() {
    let mut sim = Simulator::new();
    let m = sim.build_gate(&Gate::Cnot(0, 1), 1).unwrap();
    let dense = wcflobdd::matrix::to_dense(&sim.mgr, &m);
    let one = Complex64::new(1.0, 0.0);
    for (i, row) in dense.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let target = [0, 1, 3, 2][i];
            assert_eq!(*v, if j == target { one } else { Complex64::new(0.0, 0.0) });
        }
    }
    let m = sim.build_gate(&Gate::Cnot(0, 3), 2).unwrap();
    let dense = wcflobdd::matrix::to_dense(&sim.mgr, &m);
    for (i, row) in dense.iter().enumerate() {
        let target = if i & 8 != 0 { i ^ 1 } else { i };
        for (j, v) in row.iter().enumerate() {
            assert_eq!(v.re, (j == target) as i32 as f64);
        }
    }
    assert!(sim.build_gate(&Gate::Cnot(1, 1), 1).is_err());
}
