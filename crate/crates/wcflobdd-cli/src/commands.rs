//! Command bodies. Each returns the text to print; the binary decides where
//! it goes.

use std::collections::BTreeMap;
use std::fmt::Write;

use anyhow::{anyhow, bail, Context, Result};
use wcflobdd::construct::{
    constant_one, constant_zero, exp_family, fold, hadamard_family, identity_matrix, level_of_leaf_count, not_matrix,
};
use wcflobdd::dot::export_dot;
use wcflobdd::matrix::{kronecker, matrix_leaves, matrix_multiply};
use wcflobdd::pointwise::{add, multiply};
use wcflobdd::quantum::Simulator;
use wcflobdd::sampling::{measure_view, real_view, sample_assignment, SampleContext};
use wcflobdd::{validate, Complex64, Instance, Manager, Numeric, Rational, Semifield, Wcflobdd};

use crate::circuit::{echo_circuit, parse_circuit};
use crate::dump::{peek_instance, read_dump, write_dump};

/// Runs `$body` with `$w` bound to the weight type of `$inst`.
macro_rules! with_instance {
    ($inst:expr, $w:ident => $body:expr) => {
        match $inst {
            Instance::Rational => {
                type $w = Rational;
                $body
            }
            Instance::Real => {
                type $w = f64;
                $body
            }
            Instance::Complex => {
                type $w = Complex64;
                $body
            }
            Instance::Tropical => Err(anyhow!("the tropical instance is internal to the separation benchmark")),
        }
    };
}

fn load<W: Semifield>(mgr: &mut Manager<W>, text: &str, name: &str) -> Result<Wcflobdd<W>> {
    read_dump(mgr, text).with_context(|| format!("reading {name}"))
}

fn parse_bits(bits: &str) -> Result<Vec<bool>> {
    bits.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(anyhow!("assignment must be a bit string, found `{c}`")),
        })
        .collect()
}

pub fn bit_string(a: &[bool]) -> String {
    a.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn eval(dump: &str, bits: &str) -> Result<String> {
    let a = parse_bits(bits)?;
    with_instance!(peek_instance(dump)?, W => {
        let mut mgr = Manager::<W>::new();
        let c = load(&mut mgr, dump, "diagram")?;
        Ok(format!("{}\n", mgr.evaluate(&c, &a)?.to_display()))
    })
}

/// The report text and whether the diagram is clean.
pub fn validate_dump(dump: &str) -> Result<(String, bool)> {
    with_instance!(peek_instance(dump)?, W => {
        let mut mgr = Manager::<W>::new();
        let c = load(&mut mgr, dump, "diagram")?;
        let found = validate(&mgr, &c);
        let mut out = String::new();
        for v in &found {
            let _ = writeln!(out, "{v}");
        }
        if found.is_empty() {
            out.push_str("ok\n");
        }
        Ok((out, found.is_empty()))
    })
}

pub fn export(dump: &str) -> Result<String> {
    with_instance!(peek_instance(dump)?, W => {
        let mut mgr = Manager::<W>::new();
        let c = load(&mut mgr, dump, "diagram")?;
        Ok(export_dot(&mgr, &c))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinaryOp {
    Mul,
    Add,
    Kron,
    Matmul,
}

pub fn op(kind: BinaryOp, left: &str, right: &str) -> Result<String> {
    let inst = peek_instance(left)?;
    let other = peek_instance(right)?;
    if inst != other {
        bail!("operands hold {inst} and {other} weights");
    }
    with_instance!(inst, W => {
        let mut mgr = Manager::<W>::new();
        let a = load(&mut mgr, left, "left operand")?;
        let b = load(&mut mgr, right, "right operand")?;
        let c = match kind {
            BinaryOp::Mul => multiply(&mut mgr, &a, &b)?,
            BinaryOp::Add => add(&mut mgr, &a, &b)?,
            BinaryOp::Kron => kronecker(&mut mgr, &a, &b)?,
            BinaryOp::Matmul => matrix_multiply(&mut mgr, &a, &b)?,
        };
        Ok(write_dump(&mgr, &c))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Exp,
    Hadamard,
    Identity,
    Not,
    Zero,
    One,
}

fn make_in<W: Numeric>(family: Family, param: usize) -> Result<String> {
    let mut mgr = Manager::<W>::new();
    let level = param as u32;
    let c = match family {
        Family::Exp => return Err(anyhow!("exp is built by make_exp")),
        Family::Hadamard => hadamard_family(&mut mgr, level)?,
        Family::Identity => identity_matrix(&mut mgr, level)?,
        Family::Not => not_matrix(&mut mgr, level)?,
        Family::Zero => constant_zero(&mut mgr, level),
        Family::One => constant_one(&mut mgr, level),
    };
    Ok(write_dump(&mgr, &c))
}

/// A family member as a dump. `param` is the variable count for `exp` and
/// the level for the rest.
pub fn make(family: Family, param: usize, instance: Instance) -> Result<String> {
    if family == Family::Exp {
        return match instance {
            Instance::Rational => {
                let mut mgr = Manager::<Rational>::new();
                let c = exp_family(&mut mgr, param)?;
                Ok(write_dump(&mgr, &c))
            }
            Instance::Real => {
                let mut mgr = Manager::<f64>::new();
                let c = exp_family(&mut mgr, param)?;
                Ok(write_dump(&mgr, &c))
            }
            _ => bail!("exp is available in the rational and float instances"),
        };
    }
    if family == Family::Hadamard && instance == Instance::Rational {
        bail!("H has irrational weights; use the float or complex instance");
    }
    with_instance!(instance, W => make_in::<W>(family, param))
}

/// Folds a fixture of whitespace-separated weights. With `matrix`, the
/// fixture is a row-major square matrix; otherwise it lists the leaves in
/// assignment order.
pub fn fold_fixture(text: &str, instance: Instance, matrix: bool) -> Result<String> {
    let words: Vec<&str> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or_default())
        .flat_map(str::split_whitespace)
        .collect();
    if level_of_leaf_count(words.len()).is_none() {
        bail!("{} leaves is not 2^(2^k) for any k", words.len());
    }
    with_instance!(instance, W => {
        let leaves: Vec<W> = words.iter().map(|w| W::parse(w)).collect::<Result<_, _>>()?;
        let leaves = if matrix {
            let dim = (leaves.len() as f64).sqrt() as usize;
            let rows: Vec<Vec<W>> = leaves.chunks(dim).map(<[W]>::to_vec).collect();
            matrix_leaves(&rows)
        } else {
            leaves
        };
        let mut mgr = Manager::<W>::new();
        let c = fold(&mut mgr, &leaves)?;
        Ok(write_dump(&mgr, &c))
    })
}

/// `count` assignments, one bit string per line, drawn in proportion to path
/// weights. Complex diagrams are sampled by squared magnitude.
pub fn sample(dump: &str, seed: u64, count: usize) -> Result<String> {
    let inst = peek_instance(dump)?;
    let mut view = Manager::<f64>::new();
    let c = with_instance!(inst, W => {
        let mut mgr = Manager::<W>::new();
        let c = load(&mut mgr, dump, "diagram")?;
        if inst == Instance::Complex {
            Ok(measure_view(&mgr, &c, &mut view))
        } else {
            real_view(&mgr, &c, &mut view).map_err(anyhow::Error::from)
        }
    })?;
    let mut ctx = SampleContext::new(seed);
    let mut out = String::new();
    for _ in 0..count {
        let a = sample_assignment(&mut view, &c, &mut ctx)?;
        out.push_str(&bit_string(&a));
        out.push('\n');
    }
    Ok(out)
}

pub fn check_circuit(text: &str) -> Result<String> {
    Ok(echo_circuit(&parse_circuit(text)?))
}

/// Measurement histogram of a circuit file as JSON.
pub fn run(text: &str, shots: usize, seed: u64) -> Result<String> {
    let circuit = parse_circuit(text)?;
    let mut sim = Simulator::new();
    let state = sim.run_circuit(&circuit)?;
    let hist: BTreeMap<String, usize> = sim.measure(&state, shots, seed)?;
    let mut out = serde_json::to_string_pretty(&hist)?;
    out.push('\n');
    Ok(out)
}
