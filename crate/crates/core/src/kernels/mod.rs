//! The four force kernels and the threaded driver around them.
//!
//! * [`VariantTag::Reference`]: the textbook double loop over the skin list.
//!   Each `(i, j)` walks the neighbors of `i` twice, once for `zeta` and once
//!   for its gradient, recomputing the geometry every time.
//! * [`VariantTag::ScalarOpt`]: one walk per `(i, j)` over the packed list;
//!   `zeta` gradients are cached and only scaled by `delta_zeta` afterwards.
//! * [`VariantTag::VecJ`]: lanes hold the neighbors `j` of one atom `i`.
//! * [`VariantTag::VecI`]: lanes hold consecutive `(i, j)` pairs; each lane
//!   walks its own neighbor row with a private cursor.
//!
//! Atoms are split into fixed chunks of [`CHUNK_ATOMS`]. Each chunk has its
//! own force buffer and the buffers are summed in chunk order, so results do
//! not depend on the number of worker threads.

mod dispatch;
mod evaluator;
mod probe;
mod reference;
mod scalar_opt;
mod vec_i;
mod vec_j;

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::neighbor::{Batches, NeighborList, PackMode, PairCutoffs, PairList};
use crate::potential::lanes::Prepared;
use crate::potential::ParamTable;
use crate::simd::{Precision, Scalar, SimdVector, NATIVE_AVAILABLE};
use crate::system::{SimBox, SimulationState};
use crate::vec3::Vec3;

pub use evaluator::Evaluator;
pub use probe::{NoProbe, Probe, Tally, WorkCounts};

/// Atoms per work unit of the threaded driver.
pub const CHUNK_ATOMS: usize = 4096;

/// Widths the emulated backend is instantiated for.
pub const EMULATED_WIDTHS: [usize; 5] = [1, 2, 4, 8, 16];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VariantTag {
    Reference,
    ScalarOpt,
    VecJ,
    VecI,
}

impl VariantTag {
    pub const ALL: [VariantTag; 4] = [VariantTag::Reference, VariantTag::ScalarOpt, VariantTag::VecJ, VariantTag::VecI];

    /// Command-line spelling.
    pub fn name(self) -> &'static str {
        match self {
            VariantTag::Reference => "reference",
            VariantTag::ScalarOpt => "scalar",
            VariantTag::VecJ => "vec-j",
            VariantTag::VecI => "vec-i",
        }
    }

    pub fn is_vectorized(self) -> bool {
        matches!(self, VariantTag::VecJ | VariantTag::VecI)
    }
}

impl fmt::Display for VariantTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VariantTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        VariantTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown variant '{s}' (reference, scalar, vec-j, vec-i)")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BackendKind {
    Scalar,
    Emulated,
    Native,
}

impl BackendKind {
    pub fn name(self) -> &'static str {
        match self {
            BackendKind::Scalar => "scalar",
            BackendKind::Emulated => "emulated",
            BackendKind::Native => "native",
        }
    }
}

impl FromStr for BackendKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scalar" => Ok(BackendKind::Scalar),
            "emulated" => Ok(BackendKind::Emulated),
            "native" => Ok(BackendKind::Native),
            _ => Err(Error::Config(format!("unknown backend '{s}' (scalar, emulated, native)"))),
        }
    }
}

/// Which lane type a vectorized kernel runs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BackendSpec {
    pub kind: BackendKind,
    pub width: usize,
    pub precision: Precision,
    /// Emulated only: standard library transcendentals per lane.
    pub strict: bool,
}

impl BackendSpec {
    pub fn scalar(precision: Precision) -> Self {
        BackendSpec { kind: BackendKind::Scalar, width: 1, precision, strict: false }
    }

    pub fn emulated(width: usize, precision: Precision) -> Self {
        BackendSpec { kind: BackendKind::Emulated, width, precision, strict: false }
    }

    pub fn emulated_strict(width: usize, precision: Precision) -> Self {
        BackendSpec { kind: BackendKind::Emulated, width, precision, strict: true }
    }

    /// The native backend at its register width for `precision`.
    pub fn native(precision: Precision) -> Self {
        BackendSpec { kind: BackendKind::Native, width: native_width(precision), precision, strict: false }
    }

    pub fn name(&self) -> &'static str {
        match (self.kind, self.strict) {
            (BackendKind::Emulated, true) => "emulated-strict",
            (kind, _) => kind.name(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            BackendKind::Scalar if self.width != 1 => {
                Err(Error::Config(format!("the scalar backend has width 1, got {}", self.width)))
            }
            BackendKind::Emulated if !EMULATED_WIDTHS.contains(&self.width) => {
                Err(Error::Config(format!("emulated width must be one of {EMULATED_WIDTHS:?}, got {}", self.width)))
            }
            BackendKind::Native if !NATIVE_AVAILABLE => Err(Error::Config(
                "the native backend is not built; enable the `native` feature and compile with avx2 and fma".into(),
            )),
            BackendKind::Native if self.width != native_width(self.precision) => Err(Error::Config(format!(
                "native {} lanes have width {}, got {}",
                self.precision,
                native_width(self.precision),
                self.width
            ))),
            _ => Ok(()),
        }
    }
}

/// Lanes per 256-bit register.
pub fn native_width(precision: Precision) -> usize {
    match precision {
        Precision::Double => 4,
        Precision::Single => 8,
    }
}

/// A kernel together with the backend it runs on.
///
/// Reference and ScalarOpt only use the precision of `backend`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct KernelVariant {
    pub tag: VariantTag,
    pub backend: BackendSpec,
}

impl KernelVariant {
    pub fn new(tag: VariantTag, backend: BackendSpec) -> Result<Self> {
        let backend = if tag.is_vectorized() { backend } else { BackendSpec::scalar(backend.precision) };
        backend.validate()?;
        Ok(KernelVariant { tag, backend })
    }

    pub fn reference(precision: Precision) -> Self {
        KernelVariant { tag: VariantTag::Reference, backend: BackendSpec::scalar(precision) }
    }

    pub fn scalar_opt(precision: Precision) -> Self {
        KernelVariant { tag: VariantTag::ScalarOpt, backend: BackendSpec::scalar(precision) }
    }

    pub fn precision(&self) -> Precision {
        self.backend.precision
    }

    pub fn width(&self) -> usize {
        self.backend.width
    }
}

impl fmt::Display for KernelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{} W={} {}]", self.tag, self.backend.name(), self.backend.width, self.backend.precision)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ForceEnergyResult {
    /// eV/Å
    pub forces: Vec<Vec3>,
    /// eV
    pub potential_energy: f64,
    /// `1/2 sum_j V(i, j)` per atom, eV.
    pub atom_energy: Vec<f64>,
}

/// Per-chunk accumulators.
pub(crate) struct Accum<T> {
    pub forces: Vec<[T; 3]>,
    pub atom_energy: Vec<T>,
    pub energy: f64,
}

impl<T: Scalar> Accum<T> {
    fn new(n: usize) -> Self {
        let zero = T::from_f64(0.0);
        Accum { forces: vec![[zero; 3]; n], atom_energy: vec![zero; n], energy: 0.0 }
    }

    fn add(&mut self, o: &Accum<T>) {
        for (f, g) in self.forces.iter_mut().zip(&o.forces) {
            f[0] += g[0];
            f[1] += g[1];
            f[2] += g[2];
        }
        for (e, g) in self.atom_energy.iter_mut().zip(&o.atom_energy) {
            *e += *g;
        }
        self.energy += o.energy;
    }

    fn finish(self) -> ForceEnergyResult {
        ForceEnergyResult {
            forces: self.forces.into_iter().map(|f| f.map(<T as Scalar>::to_f64)).collect(),
            potential_energy: self.energy,
            atom_energy: self.atom_energy.into_iter().map(<T as Scalar>::to_f64).collect(),
        }
    }
}

/// Read-only inputs of the packed kernels.
pub(crate) struct Frame<'a, T> {
    pub pairs: &'a PairList<T>,
    /// Table species of each atom.
    pub species: &'a [i32],
    pub prep: &'a Prepared<T>,
}

/// Everything a force evaluation needs besides the kernel choice.
pub(crate) struct Inputs<'a> {
    pub positions: &'a [Vec3],
    pub sim_box: &'a SimBox,
    pub nl: &'a NeighborList,
    /// Table species of each atom.
    pub species: &'a [usize],
    pub table: &'a ParamTable,
    pub cutoffs: &'a PairCutoffs,
    pub pool: Option<&'a rayon::ThreadPool>,
}

impl Inputs<'_> {
    pub fn n_atoms(&self) -> usize {
        self.positions.len()
    }

    pub fn n_chunks(&self) -> usize {
        self.n_atoms().div_ceil(CHUNK_ATOMS)
    }

    pub fn chunk_rows(&self, c: usize) -> Range<usize> {
        c * CHUNK_ATOMS..((c + 1) * CHUNK_ATOMS).min(self.n_atoms())
    }

    pub fn species_i32(&self) -> Vec<i32> {
        self.species.iter().map(|&s| s as i32).collect()
    }

    pub fn pairs<T: Scalar>(&self) -> PairList<T> {
        PairList::build(self.positions, self.sim_box, self.nl, self.species, self.cutoffs)
    }

    pub fn batches<T: Scalar>(&self, pairs: &PairList<T>, mode: PackMode, width: usize) -> Batches {
        Batches::new(&pairs.row_start, 0..self.n_atoms(), mode, width, CHUNK_ATOMS)
    }

    /// Runs `chunk` for every chunk and sums the results in chunk order.
    pub fn run_chunks<T, P, F>(&self, chunk: F) -> (ForceEnergyResult, P)
    where
        T: Scalar,
        P: Probe,
        F: Fn(usize, &mut Accum<T>, &mut P) + Sync,
    {
        let n = self.n_atoms();
        let one = |c: usize| {
            let mut acc = Accum::new(n);
            let mut probe = P::default();
            chunk(c, &mut acc, &mut probe);
            (acc, probe)
        };
        let parts: Vec<(Accum<T>, P)> = match self.pool {
            Some(pool) if self.n_chunks() > 1 => {
                pool.install(|| (0..self.n_chunks()).into_par_iter().map(one).collect())
            }
            _ => (0..self.n_chunks()).map(one).collect(),
        };
        let mut parts = parts.into_iter();
        let Some((mut total, mut probe)) = parts.next() else {
            return (Accum::<T>::new(0).finish(), P::default());
        };
        for (acc, p) in parts {
            total.add(&acc);
            probe.merge(p);
        }
        (total.finish(), probe)
    }
}

/// Maps the element names of `state` onto species of `table`.
pub fn species_map(state: &SimulationState, table: &ParamTable) -> Result<Vec<usize>> {
    let by_element = state
        .elements
        .iter()
        .map(|e| {
            table
                .species_index(e)
                .ok_or_else(|| Error::Config(format!("parameter table has no entries for element '{e}'")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(state.species.iter().map(|&s| by_element[s]).collect())
}

fn check_inputs(state: &SimulationState, nl: &NeighborList) -> Result<()> {
    state.validate()?;
    if nl.n_atoms() != state.n_atoms() {
        return Err(Error::Config(format!(
            "neighbor list covers {} atoms, state has {}",
            nl.n_atoms(),
            state.n_atoms()
        )));
    }
    Ok(())
}

fn evaluate<P: Probe>(
    variant: &KernelVariant,
    state: &SimulationState,
    nl: &NeighborList,
    table: &ParamTable,
    pool: Option<&rayon::ThreadPool>,
) -> Result<(ForceEnergyResult, P)> {
    check_inputs(state, nl)?;
    variant.backend.validate()?;
    if nl.cutoff < table.cutoff() {
        return Err(Error::Config(format!(
            "neighbor list cutoff {} Å is below the potential cutoff {} Å",
            nl.cutoff,
            table.cutoff()
        )));
    }
    let species = species_map(state, table)?;
    let cutoffs = PairCutoffs::new(table);
    let inputs = Inputs {
        positions: &state.positions,
        sim_box: &state.sim_box,
        nl,
        species: &species,
        table,
        cutoffs: &cutoffs,
        pool,
    };
    Ok(dispatch::run::<P>(variant, &inputs))
}

/// Energy and forces of `state` with one kernel, single-threaded.
///
/// `nl` must be current for `state` (see [`NeighborList::needs_rebuild`]).
pub fn compute(
    variant: &KernelVariant,
    state: &SimulationState,
    nl: &NeighborList,
    table: &ParamTable,
) -> Result<ForceEnergyResult> {
    evaluate::<NoProbe>(variant, state, nl, table, None).map(|(r, _)| r)
}

/// Like [`compute`], also counting the work done.
pub fn count_flops_and_visits(
    variant: &KernelVariant,
    state: &SimulationState,
    nl: &NeighborList,
    table: &ParamTable,
) -> Result<(ForceEnergyResult, WorkCounts)> {
    evaluate::<Tally>(variant, state, nl, table, None).map(|(r, p)| (r, p.counts()))
}

/// Lane type dispatch target: one generic body, instantiated per backend.
pub(crate) trait LaneVisitor {
    type Output;
    fn visit<V: SimdVector>(self) -> Self::Output;
}
