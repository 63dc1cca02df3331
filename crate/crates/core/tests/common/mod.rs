#![allow(dead_code)]

use tersoff_core::kernels::{compute, BackendSpec, ForceEnergyResult, KernelVariant, VariantTag, EMULATED_WIDTHS};
use tersoff_core::{NeighborList, ParamTable, Precision, SimulationState};

/// Same parameters in the oracle's layout.
pub fn oracle_table(table: &ParamTable) -> tersoff_oracle::Table {
    let entries = table
        .entries()
        .iter()
        .map(|p| tersoff_oracle::Entry {
            m: p.m as f64,
            gamma: p.gamma,
            lambda3: p.lambda3,
            c: p.c,
            d: p.d,
            h: p.h,
            n: p.eta,
            beta: p.beta,
            lambda2: p.lambda2,
            big_b: p.big_b,
            big_r: p.big_r,
            big_d: p.big_d,
            lambda1: p.lambda1,
            big_a: p.big_a,
        })
        .collect();
    tersoff_oracle::Table { n_species: table.n_species(), entries }
}

/// Oracle energy of an open cluster; species must be indexed like `table`.
pub fn oracle_energy(state: &SimulationState, table: &ParamTable) -> f64 {
    let species = table_species(state, table);
    tersoff_oracle::energy_f64(&state.positions, &species, &oracle_table(table)).to_f64()
}

pub fn table_species(state: &SimulationState, table: &ParamTable) -> Vec<usize> {
    state.species.iter().map(|&s| table.species_index(&state.elements[s]).expect("element in table")).collect()
}

/// Every variant and backend the crate builds without the native feature.
pub fn all_variants(precision: Precision) -> Vec<KernelVariant> {
    let mut out = vec![KernelVariant::reference(precision), KernelVariant::scalar_opt(precision)];
    for tag in [VariantTag::VecJ, VariantTag::VecI] {
        out.push(KernelVariant::new(tag, BackendSpec::scalar(precision)).unwrap());
        for w in EMULATED_WIDTHS {
            out.push(KernelVariant::new(tag, BackendSpec::emulated(w, precision)).unwrap());
            out.push(KernelVariant::new(tag, BackendSpec::emulated_strict(w, precision)).unwrap());
        }
    }
    out
}

pub fn evaluate(variant: &KernelVariant, state: &SimulationState, table: &ParamTable) -> ForceEnergyResult {
    let nl = NeighborList::build(&state.positions, &state.sim_box, table.cutoff(), 0.3).unwrap();
    compute(variant, state, &nl, table).unwrap()
}

pub fn max_force_diff(a: &[[f64; 3]], b: &[[f64; 3]]) -> f64 {
    a.iter().zip(b).flat_map(|(f, g)| (0..3).map(move |k| (f[k] - g[k]).abs())).fold(0.0, f64::max)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
