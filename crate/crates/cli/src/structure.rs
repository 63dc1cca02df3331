//! Structures from XYZ files or generator specs.

use std::path::Path;

use tersoff_core::system::{gen_diamond, gen_nanotube, random_cluster, xyz, ClusterSpec, NANOTUBE_BOND};
use tersoff_core::{ParamTable, SimulationState};

use crate::error::{usage, Result};

/// Diamond lattice constant of carbon (Å).
pub const DIAMOND_LATTICE: f64 = 3.5668;

fn numbers<T: std::str::FromStr>(spec: &str, fields: &[&str]) -> Result<Vec<T>> {
    fields
        .iter()
        .map(|f| f.trim().parse().map_err(|_| usage(format!("bad number '{f}' in structure spec '{spec}'"))))
        .collect()
}

/// Parses a generator spec, or returns `None` when `spec` is not one.
pub fn generate(spec: &str, seed: u64) -> Result<Option<SimulationState>> {
    let Some((kind, rest)) = spec.split_once(':') else { return Ok(None) };
    let fields: Vec<&str> = rest.split(',').collect();
    let state = match kind {
        "nanotube" => {
            if !(2..=3).contains(&fields.len()) {
                return Err(usage(format!("expected nanotube:N,CELLS[,BOND], got '{spec}'")));
            }
            let ints = numbers::<usize>(spec, &fields[..2])?;
            let bond = match fields.get(2) {
                Some(b) => numbers::<f64>(spec, &[b])?[0],
                None => NANOTUBE_BOND,
            };
            gen_nanotube(ints[0], ints[1], bond)?
        }
        "diamond" => {
            if !(1..=3).contains(&fields.len()) {
                return Err(usage(format!("expected diamond:CELLS[,LATTICE[,ELEMENT]], got '{spec}'")));
            }
            let cells = numbers::<usize>(spec, &fields[..1])?[0];
            let lattice = match fields.get(1) {
                Some(a) => numbers::<f64>(spec, &[a])?[0],
                None => DIAMOND_LATTICE,
            };
            gen_diamond(cells, lattice, fields.get(2).map_or("C", |e| e.trim()))?
        }
        "cluster" => {
            if !(1..=2).contains(&fields.len()) {
                return Err(usage(format!("expected cluster:ATOMS[,EL+EL...], got '{spec}'")));
            }
            let atoms = numbers::<usize>(spec, &fields[..1])?[0];
            let elements: Vec<&str> = fields.get(1).map_or(vec!["C"], |e| e.split('+').map(str::trim).collect());
            random_cluster(&ClusterSpec::new(atoms, &elements, seed))?
        }
        _ => return Ok(None),
    };
    Ok(Some(state))
}

pub fn load(spec: &str, seed: u64) -> Result<SimulationState> {
    if let Some(state) = generate(spec, seed)? {
        return Ok(state);
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(usage(format!("'{spec}' is neither a file nor a structure spec (nanotube:, diamond:, cluster:)")));
    }
    Ok(xyz::read(path)?)
}

/// Built-in parameters covering the elements of `state`.
pub fn builtin_params(state: &SimulationState) -> Result<ParamTable> {
    let has = |e: &str| state.elements.iter().any(|x| x == e);
    if let Some(other) = state.elements.iter().find(|e| *e != "C" && *e != "Si") {
        return Err(usage(format!("no built-in parameters for '{other}'; pass --params")));
    }
    Ok(match (has("C"), has("Si")) {
        (true, true) => ParamTable::silicon_carbide(),
        (false, true) => ParamTable::silicon(),
        _ => ParamTable::carbon(),
    })
}
