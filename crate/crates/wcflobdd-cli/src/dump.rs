//! Versioned text dump of a diagram.
//!
//! ```text
//! wcflobdd-dump 1
//! instance rational
//! g0 fork 1 1/2
//! g1 dontcare 1 1
//! g2 internal 1 2 a=g1 b=g0:1,2
//! top 3/4 g2 0,1
//! ```
//!
//! Groupings come children first. Internal lines carry the level, the exit
//! count, the A-connection and one `b=` item per middle vertex with its
//! return tuple. `top` holds the factor, the head and the terminal bits.

use std::collections::HashMap;
use std::fmt::Write;

use thiserror::Error;
use wcflobdd::core::{Grouping, InternalGrouping, ValueTuple};
use wcflobdd::{GroupingId, Instance, Manager, Semifield, Wcflobdd};

pub const MAGIC: &str = "wcflobdd-dump 1";

#[derive(Debug, Error)]
#[error("line {line}: {message}")]
pub struct DumpError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> DumpError {
    DumpError { line, message: message.into() }
}

pub fn instance_name(i: Instance) -> String {
    i.to_string()
}

pub fn parse_instance(text: &str) -> Option<Instance> {
    match text {
        "rational" => Some(Instance::Rational),
        "float" => Some(Instance::Real),
        "complex" => Some(Instance::Complex),
        "tropical" => Some(Instance::Tropical),
        _ => None,
    }
}

/// Reads only the header, to pick the instance before a full parse.
pub fn peek_instance(text: &str) -> Result<Instance, DumpError> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, MAGIC)) => {}
        Some((n, _)) => return Err(err(n, format!("expected `{MAGIC}`"))),
        None => return Err(err(1, "empty dump")),
    }
    let (n, line) = lines.next().ok_or_else(|| err(2, "missing instance line"))?;
    let name = line.strip_prefix("instance ").ok_or_else(|| err(n, "expected `instance NAME`"))?;
    parse_instance(name.trim()).ok_or_else(|| err(n, format!("unknown instance `{}`", name.trim())))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn postorder<W: Semifield>(mgr: &Manager<W>, g: GroupingId, seen: &mut HashMap<GroupingId, usize>, out: &mut Vec<GroupingId>) {
    if seen.contains_key(&g) {
        return;
    }
    if let Grouping::Internal(i) = mgr.grouping(g) {
        postorder(mgr, i.a_connection, seen, out);
        for &b in &i.b_connections {
            postorder(mgr, b, seen, out);
        }
    }
    seen.insert(g, out.len());
    out.push(g);
}

pub fn write_dump<W: Semifield>(mgr: &Manager<W>, c: &Wcflobdd<W>) -> String {
    let mut seen = HashMap::new();
    let mut order = Vec::new();
    postorder(mgr, c.head, &mut seen, &mut order);
    let mut out = format!("{MAGIC}\ninstance {}\n", W::INSTANCE);
    for (n, &g) in order.iter().enumerate() {
        match mgr.grouping(g) {
            Grouping::Fork { lw, rw } => {
                let _ = writeln!(out, "g{n} fork {} {}", lw.to_text(), rw.to_text());
            }
            Grouping::DontCare { lw, rw } => {
                let _ = writeln!(out, "g{n} dontcare {} {}", lw.to_text(), rw.to_text());
            }
            Grouping::Internal(i) => {
                let _ = write!(out, "g{n} internal {} {} a=g{}", i.level, i.number_of_exits, seen[&i.a_connection]);
                for (b, rt) in i.b_connections.iter().zip(&i.b_return_tuples) {
                    let rt: Vec<String> = rt.iter().map(u32::to_string).collect();
                    let _ = write!(out, " b=g{}:{}", seen[b], rt.join(","));
                }
                out.push('\n');
            }
        }
    }
    let bits: Vec<&str> = c.values.bits().iter().map(|&b| if b { "1" } else { "0" }).collect();
    let _ = writeln!(out, "top {} g{} {}", c.factor.to_text(), seen[&c.head], bits.join(","));
    out
}

fn node_ref(text: &str, ids: &[GroupingId], line: usize) -> Result<GroupingId, DumpError> {
    let n: usize = text
        .strip_prefix('g')
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| err(line, format!("bad grouping reference `{text}`")))?;
    ids.get(n).copied().ok_or_else(|| err(line, format!("`{text}` is not defined yet")))
}

fn weight<W: Semifield>(text: Option<&str>, line: usize) -> Result<W, DumpError> {
    let text = text.ok_or_else(|| err(line, "missing weight"))?;
    W::parse(text).map_err(|e| err(line, e.to_string()))
}

fn number(text: Option<&str>, line: usize, what: &str) -> Result<u32, DumpError> {
    text.and_then(|t| t.parse().ok()).ok_or_else(|| err(line, format!("bad {what}")))
}

/// Parses a dump into `mgr`. Groupings are interned through the checked
/// constructor, so a dump of a canonical diagram yields the same handles as
/// building it directly.
pub fn read_dump<W: Semifield>(mgr: &mut Manager<W>, text: &str) -> Result<Wcflobdd<W>, DumpError> {
    let instance = peek_instance(text)?;
    if instance != W::INSTANCE {
        return Err(err(2, format!("dump holds {instance} weights, expected {}", W::INSTANCE)));
    }
    let mut ids: Vec<GroupingId> = Vec::new();
    for (line, content) in content_lines(text).skip(2) {
        let mut tok = content.split_whitespace();
        let name = tok.next().unwrap_or_default();
        if name == "top" {
            let factor = weight::<W>(tok.next(), line)?;
            let head = node_ref(tok.next().unwrap_or_default(), &ids, line)?;
            let bits: Vec<bool> = tok
                .next()
                .unwrap_or_default()
                .split(',')
                .map(|b| match b {
                    "0" => Ok(false),
                    "1" => Ok(true),
                    _ => Err(err(line, format!("bad terminal bit `{b}`"))),
                })
                .collect::<Result<_, _>>()?;
            let values = ValueTuple::from_bits(&bits).ok_or_else(|| err(line, "terminal tuple must be 1, 0,1 or 1,0"))?;
            if tok.next().is_some() {
                return Err(err(line, "trailing tokens"));
            }
            return Ok(Wcflobdd { factor, head, values });
        }
        if name != format!("g{}", ids.len()) {
            return Err(err(line, format!("expected `g{}` or `top`", ids.len())));
        }
        let grouping = match tok.next() {
            Some("fork") => Grouping::Fork { lw: weight(tok.next(), line)?, rw: weight(tok.next(), line)? },
            Some("dontcare") => Grouping::DontCare { lw: weight(tok.next(), line)?, rw: weight(tok.next(), line)? },
            Some("internal") => {
                let level = number(tok.next(), line, "level")?;
                let number_of_exits = number(tok.next(), line, "exit count")?;
                let a = tok
                    .next()
                    .and_then(|t| t.strip_prefix("a="))
                    .ok_or_else(|| err(line, "expected `a=gN`"))?;
                let a_connection = node_ref(a, &ids, line)?;
                let mut b_connections = Vec::new();
                let mut b_return_tuples = Vec::new();
                for item in tok.by_ref() {
                    let (b, rt) = item
                        .strip_prefix("b=")
                        .and_then(|t| t.split_once(':'))
                        .ok_or_else(|| err(line, format!("expected `b=gN:e,..`, got `{item}`")))?;
                    b_connections.push(node_ref(b, &ids, line)?);
                    let rt: Vec<u32> = rt
                        .split(',')
                        .map(|e| e.parse().map_err(|_| err(line, format!("bad exit `{e}`"))))
                        .collect::<Result<_, _>>()?;
                    b_return_tuples.push(rt);
                }
                Grouping::Internal(InternalGrouping { level, a_connection, b_connections, b_return_tuples, number_of_exits })
            }
            other => return Err(err(line, format!("unknown grouping kind `{}`", other.unwrap_or_default()))),
        };
        if tok.next().is_some() {
            return Err(err(line, "trailing tokens"));
        }
        let g = mgr.representative_grouping(grouping).map_err(|e| err(line, e.to_string()))?;
        ids.push(g);
    }
    Err(err(text.lines().count().max(1), "missing `top` line"))
}
