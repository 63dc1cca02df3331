//! Shared setup for the criterion benches.

use tersoff_core::kernels::{native_width, BackendSpec, KernelVariant, VariantTag};
use tersoff_core::system::{gen_nanotube, maxwell_boltzmann, NANOTUBE_BOND};
use tersoff_core::{simd, NeighborList, ParamTable, Precision, SimulationState};

/// Armchair (5, 5) tube with `cells` cells (20 atoms each), thermalized at
/// 300 K and moved by one small step so the geometry is not perfectly regular.
pub fn warm_tube(cells: usize) -> SimulationState {
    let mut s = gen_nanotube(5, cells, NANOTUBE_BOND).expect("valid tube");
    maxwell_boltzmann(&mut s, 300.0, 1).expect("valid temperature");
    for (x, v) in s.positions.iter_mut().zip(&s.velocities) {
        for k in 0..3 {
            x[k] += 2.0 * v[k];
        }
    }
    s
}

pub fn neighbor_list(state: &SimulationState, table: &ParamTable) -> NeighborList {
    NeighborList::build(&state.positions, &state.sim_box, table.cutoff(), 0.3).expect("valid box")
}

/// Reference, scalar-optimized, and both vector kernels on every lane
/// backend this build has, at the register width.
pub fn variants(precision: Precision) -> Vec<KernelVariant> {
    let w = native_width(precision);
    let mut out = vec![KernelVariant::reference(precision), KernelVariant::scalar_opt(precision)];
    for tag in [VariantTag::VecJ, VariantTag::VecI] {
        let mut backends = vec![BackendSpec::emulated(w, precision)];
        if simd::NATIVE_AVAILABLE {
            backends.push(BackendSpec::native(precision));
        }
        out.extend(backends.into_iter().map(|b| KernelVariant::new(tag, b).expect("supported width")));
    }
    out
}

/// Short label for bench ids, e.g. `vec-i/native/4`.
pub fn label(v: &KernelVariant) -> String {
    format!("{}/{}/{}", v.tag.name(), v.backend.name(), v.width())
}
