//! Tersoff parameter files in the common 17-token layout.
//!
//! ```text
//! elem_i elem_j elem_k  m gamma lambda3 c d h n beta lambda2 B R D lambda1 A
//! ```
//!
//! `#` starts a comment. An entry may continue on following lines as long as
//! those lines start with a number; a line starting with a name begins a new
//! entry. Species are numbered in order of first appearance and every ordered
//! triple must be present exactly once.

use std::collections::HashMap;
use std::fmt::Write;

use crate::error::{Error, Result};
use crate::potential::{ParamTable, TersoffParams};

pub const TOKENS_PER_ENTRY: usize = 17;

const FIELD_NAMES: [&str; 14] =
    ["m", "gamma", "lambda3", "c", "d", "h", "n", "beta", "lambda2", "B", "R", "D", "lambda1", "A"];

/// The published carbon set shipped with the crate.
pub const CARBON: &str = include_str!("../data/C.tersoff");
/// The published silicon set shipped with the crate.
pub const SILICON: &str = include_str!("../data/Si.tersoff");

struct RawEntry<'a> {
    line: usize,
    tokens: Vec<&'a str>,
}

fn is_number(tok: &str) -> bool {
    tok.parse::<f64>().is_ok()
}

fn split_entries(text: &str) -> Result<Vec<RawEntry<'_>>> {
    let mut entries: Vec<RawEntry> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        let mut tokens = body.split_whitespace().peekable();
        let Some(&first) = tokens.peek() else { continue };
        let continues = entries.last().is_some_and(|e| e.tokens.len() < TOKENS_PER_ENTRY) && is_number(first);
        if continues {
            let last = entries.last_mut().unwrap();
            last.tokens.extend(tokens);
            if last.tokens.len() > TOKENS_PER_ENTRY {
                return Err(Error::parse(
                    line,
                    format!("expected {TOKENS_PER_ENTRY} tokens, entry has {}", last.tokens.len()),
                ));
            }
            continue;
        }
        if let Some(prev) = entries.last() {
            check_count(prev)?;
        }
        if is_number(first) {
            return Err(Error::parse(line, format!("entry must start with an element name, found '{first}'")));
        }
        entries.push(RawEntry { line, tokens: tokens.collect() });
    }
    if let Some(prev) = entries.last() {
        check_count(prev)?;
    }
    Ok(entries)
}

fn check_count(e: &RawEntry) -> Result<()> {
    if e.tokens.len() != TOKENS_PER_ENTRY {
        return Err(Error::parse(e.line, format!("expected {TOKENS_PER_ENTRY} tokens, found {}", e.tokens.len())));
    }
    Ok(())
}

fn parse_fields(e: &RawEntry) -> Result<TersoffParams> {
    let mut v = [0.0; 14];
    for (slot, (tok, name)) in v.iter_mut().zip(e.tokens[3..].iter().zip(FIELD_NAMES)) {
        *slot =
            tok.parse::<f64>().map_err(|_| Error::parse(e.line, format!("field {name}: '{tok}' is not a number")))?;
        if !slot.is_finite() {
            return Err(Error::parse(e.line, format!("field {name}: '{tok}' is not finite")));
        }
    }
    let m = match v[0] {
        1.0 => 1,
        3.0 => 3,
        x => return Err(Error::parse(e.line, format!("m must be 1 or 3, found {x}"))),
    };
    Ok(TersoffParams {
        m,
        gamma: v[1],
        lambda3: v[2],
        c: v[3],
        d: v[4],
        h: v[5],
        eta: v[6],
        beta: v[7],
        lambda2: v[8],
        big_b: v[9],
        big_r: v[10],
        big_d: v[11],
        lambda1: v[12],
        big_a: v[13],
    })
}

/// Parses a parameter file. Errors carry the offending line number.
pub fn parse(text: &str) -> Result<ParamTable> {
    let raw = split_entries(text)?;
    let mut species: Vec<String> = Vec::new();
    let mut parsed = Vec::with_capacity(raw.len());
    for e in &raw {
        let mut ids = [0usize; 3];
        for (id, name) in ids.iter_mut().zip(&e.tokens[..3]) {
            if is_number(name) {
                return Err(Error::parse(e.line, format!("'{name}' is not an element name")));
            }
            *id = match species.iter().position(|s| s == name) {
                Some(i) => i,
                None => {
                    species.push(name.to_string());
                    species.len() - 1
                }
            };
        }
        parsed.push((e.line, ids, parse_fields(e)?));
    }

    let n = species.len();
    if n == 0 {
        return Err(Error::parse(text.lines().count().max(1), "no entries"));
    }
    let mut seen: HashMap<[usize; 3], usize> = HashMap::new();
    let mut slots: Vec<Option<TersoffParams>> = vec![None; n * n * n];
    for (line, ids, p) in parsed {
        if let Some(first) = seen.insert(ids, line) {
            return Err(Error::parse(
                line,
                format!(
                    "duplicate triple {} {} {} (first at line {first})",
                    species[ids[0]], species[ids[1]], species[ids[2]]
                ),
            ));
        }
        p.validate(ids[1] == ids[2]).map_err(|msg| Error::parse(line, msg))?;
        slots[(ids[0] * n + ids[1]) * n + ids[2]] = Some(p);
    }
    let end = text.lines().count();
    let mut entries = Vec::with_capacity(slots.len());
    for (idx, slot) in slots.into_iter().enumerate() {
        match slot {
            Some(p) => entries.push(p),
            None => {
                let (i, j, k) = (idx / (n * n), idx / n % n, idx % n);
                return Err(Error::parse(end, format!("missing triple {} {} {}", species[i], species[j], species[k])));
            }
        }
    }
    ParamTable::new(species, entries)
}

/// Reads and parses a parameter file from disk.
pub fn load(path: &std::path::Path) -> Result<ParamTable> {
    parse(&std::fs::read_to_string(path)?)
}

/// Writes `table` back in the 17-token layout; numbers use the shortest
/// representation that parses back to the same `f64`.
pub fn serialize(table: &ParamTable) -> String {
    let mut out = String::from("# elem_i elem_j elem_k m gamma lambda3 c d h n beta lambda2 B R D lambda1 A\n");
    let names = table.species();
    let n = names.len();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let p = table.get(i, j, k);
                let _ = writeln!(
                    out,
                    "{} {} {} {} {} {} {} {} {} {} {} {} {} {} {} {} {}",
                    names[i],
                    names[j],
                    names[k],
                    p.m,
                    p.gamma,
                    p.lambda3,
                    p.c,
                    p.d,
                    p.h,
                    p.eta,
                    p.beta,
                    p.lambda2,
                    p.big_b,
                    p.big_r,
                    p.big_d,
                    p.lambda1,
                    p.big_a
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_of(err: Error) -> usize {
        match err {
            Error::Parse { line, .. } => line,
            other => panic!("expected a parse error, got {other}"),
        }
    }

    #[test]
    fn shipped_sets_parse() {
        let c = parse(CARBON).unwrap();
        assert_eq!(c.species(), ["C"]);
        assert_eq!(c.entries().len(), 1);
        assert_eq!(*c.get(0, 0, 0), TersoffParams::carbon());
        assert!((c.cutoff() - 2.1).abs() < 1e-15);
        assert_eq!(*parse(SILICON).unwrap().get(0, 0, 0), TersoffParams::silicon());
    }

    #[test]
    fn round_trip() {
        for text in [CARBON, SILICON] {
            let t = parse(text).unwrap();
            assert_eq!(parse(&serialize(&t)).unwrap(), t);
        }
    }

    #[test]
    fn continuation_lines() {
        let text = "C C C 3 1 0 38049 4.3484\n  -0.57058 0.72751 1.5724e-7 2.2119\n346.74 1.95 0.15 3.4879 1393.6\n";
        assert_eq!(*parse(text).unwrap().get(0, 0, 0), TersoffParams::carbon());
    }

    #[test]
    fn missing_triple() {
        let one = "C C C 3 1 0 38049 4.3484 -0.57058 0.72751 1.5724e-7 2.2119 346.74 1.95 0.15 3.4879 1393.6\n";
        let two = format!("{one}{}", one.replacen("C C C", "C C Si", 1));
        let err = parse(&two).unwrap_err();
        assert!(err.to_string().contains("missing triple"), "{err}");
    }

    #[test]
    fn errors_name_the_line() {
        let good =
            "# header\n\nC C C 3 1 0 38049 4.3484 -0.57058 0.72751 1.5724e-7 2.2119 346.74 1.95 0.15 3.4879 1393.6\n";
        let short = good.replace(" 1393.6", "");
        assert_eq!(line_of(parse(&short).unwrap_err()), 3);
        let nan = good.replace("4.3484", "four");
        assert_eq!(line_of(parse(&nan).unwrap_err()), 3);
        let bad_m = good.replace("C C C 3 ", "C C C 2 ");
        assert_eq!(line_of(parse(&bad_m).unwrap_err()), 3);
        let dup = format!("{good}{}", good.lines().last().unwrap());
        assert_eq!(line_of(parse(&dup).unwrap_err()), 4);
    }
}
