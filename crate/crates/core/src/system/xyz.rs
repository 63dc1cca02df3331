//! XYZ text frames: atom count, comment, then `element x y z` rows.
//!
//! Written comments carry the box as `box=Lx,Ly,Lz pbc=TTF`; a frame without
//! them is read as an open system with a box around the atoms.

use std::io::Write;

use crate::error::{Error, Result};
use crate::vec3::Vec3;

use super::{SimBox, SimulationState};

/// Vacuum around atoms of a frame without box information (Å).
const VACUUM: f64 = 10.0;

pub fn write_frame<W: Write + ?Sized>(out: &mut W, state: &SimulationState, comment: &str) -> Result<()> {
    let b = &state.sim_box;
    let pbc: String = b.periodic.iter().map(|&p| if p { 'T' } else { 'F' }).collect();
    writeln!(out, "{}", state.n_atoms())?;
    writeln!(
        out,
        "box={},{},{} pbc={pbc} time={}{}{}",
        b.lengths[0],
        b.lengths[1],
        b.lengths[2],
        state.time,
        if comment.is_empty() { "" } else { " " },
        comment.replace('\n', " ")
    )?;
    for (i, p) in state.positions.iter().enumerate() {
        writeln!(out, "{} {} {} {}", state.elements[state.species[i]], p[0], p[1], p[2])?;
    }
    Ok(())
}

pub fn to_string(state: &SimulationState, comment: &str) -> String {
    let mut buf = Vec::new();
    write_frame(&mut buf, state, comment).expect("writing to memory");
    String::from_utf8(buf).expect("frames are ASCII apart from the comment, which was UTF-8")
}

fn parse_box(comment: &str) -> Result<Option<SimBox>> {
    let mut lengths = None;
    let mut periodic = [false; 3];
    for tok in comment.split_whitespace() {
        if let Some(v) = tok.strip_prefix("box=") {
            let parts: Vec<f64> = v
                .split(',')
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::parse(2, format!("bad box '{v}'")))?;
            if parts.len() != 3 {
                return Err(Error::parse(2, format!("box needs three lengths, got '{v}'")));
            }
            lengths = Some([parts[0], parts[1], parts[2]]);
        } else if let Some(v) = tok.strip_prefix("pbc=") {
            let flags: Vec<char> = v.chars().collect();
            if flags.len() != 3 || flags.iter().any(|c| !matches!(c, 'T' | 'F')) {
                return Err(Error::parse(2, format!("pbc must be three of T/F, got '{v}'")));
            }
            periodic = std::array::from_fn(|a| flags[a] == 'T');
        }
    }
    Ok(lengths.map(|lengths| SimBox { lengths, periodic }))
}

/// Reads the first frame of `text`.
pub fn parse(text: &str) -> Result<SimulationState> {
    let mut lines = text.lines();
    let count_line = lines.next().ok_or_else(|| Error::parse(1, "empty XYZ input"))?;
    let n: usize = count_line
        .trim()
        .parse()
        .map_err(|_| Error::parse(1, format!("expected an atom count, got '{count_line}'")))?;
    let comment = lines.next().ok_or_else(|| Error::parse(2, "missing comment line"))?;
    let mut elements: Vec<String> = Vec::new();
    let mut species = Vec::with_capacity(n);
    let mut positions: Vec<Vec3> = Vec::with_capacity(n);
    for a in 0..n {
        let line_no = a + 3;
        let line = lines.next().ok_or_else(|| Error::parse(line_no, format!("expected {n} atoms, found {a}")))?;
        let tok: Vec<&str> = line.split_whitespace().collect();
        if tok.len() < 4 {
            return Err(Error::parse(line_no, format!("expected 'element x y z', got '{line}'")));
        }
        let mut p: Vec3 = [0.0; 3];
        for (slot, t) in p.iter_mut().zip(&tok[1..4]) {
            *slot = t.parse().map_err(|_| Error::parse(line_no, format!("'{t}' is not a number")))?;
            if !slot.is_finite() {
                return Err(Error::Input(format!("line {line_no}: non-finite coordinate")));
            }
        }
        let s = match elements.iter().position(|e| e == tok[0]) {
            Some(s) => s,
            None => {
                elements.push(tok[0].to_string());
                elements.len() - 1
            }
        };
        species.push(s);
        positions.push(p);
    }
    let sim_box = match parse_box(comment)? {
        Some(b) => b,
        None => {
            let mut lo = [f64::INFINITY; 3];
            let mut hi = [f64::NEG_INFINITY; 3];
            for p in &positions {
                for a in 0..3 {
                    lo[a] = lo[a].min(p[a]);
                    hi[a] = hi[a].max(p[a]);
                }
            }
            let lengths = std::array::from_fn(|a| if n == 0 { 2.0 * VACUUM } else { hi[a] - lo[a] + 2.0 * VACUUM });
            SimBox::open(lengths)
        }
    };
    let time =
        comment.split_whitespace().find_map(|t| t.strip_prefix("time=")).and_then(|t| t.parse().ok()).unwrap_or(0.0);
    let mut state = SimulationState::new(positions, species, elements, sim_box)?;
    state.time = time;
    Ok(state)
}

pub fn read(path: &std::path::Path) -> Result<SimulationState> {
    parse(&std::fs::read_to_string(path)?)
}
