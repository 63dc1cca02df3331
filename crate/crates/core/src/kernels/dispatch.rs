//! From a runtime [`KernelVariant`] to a monomorphized kernel.

use std::marker::PhantomData;

use crate::neighbor::PackMode;
use crate::potential::lanes::Prepared;
use crate::simd::{Emulated, Fast, Precision, Scalar, SimdVector, Strict};

use super::{
    reference, scalar_opt, vec_i, vec_j, BackendKind, BackendSpec, ForceEnergyResult, Frame, Inputs, KernelVariant,
    LaneVisitor, Probe, VariantTag,
};

pub(crate) fn run<P: Probe>(variant: &KernelVariant, inp: &Inputs) -> (ForceEnergyResult, P) {
    match (variant.tag, variant.backend.precision) {
        (VariantTag::Reference, Precision::Double) => run_reference::<f64, P>(inp),
        (VariantTag::Reference, Precision::Single) => run_reference::<f32, P>(inp),
        (VariantTag::ScalarOpt, Precision::Double) => run_scalar_opt::<f64, P>(inp),
        (VariantTag::ScalarOpt, Precision::Single) => run_scalar_opt::<f32, P>(inp),
        (tag, _) => with_lanes(&variant.backend, Packed { inp, tag, probe: PhantomData::<P> }),
    }
}

fn run_reference<T, P>(inp: &Inputs) -> (ForceEnergyResult, P)
where
    T: Scalar + SimdVector<Scalar = T>,
    P: Probe,
{
    let prep = Prepared::<T>::new(inp.table);
    inp.run_chunks(|c, acc, probe| reference::chunk(inp, &prep, inp.chunk_rows(c), acc, probe))
}

fn run_scalar_opt<T, P>(inp: &Inputs) -> (ForceEnergyResult, P)
where
    T: Scalar + SimdVector<Scalar = T>,
    P: Probe,
{
    let prep = Prepared::<T>::new(inp.table);
    let pairs = inp.pairs::<T>();
    let species = inp.species_i32();
    let fr = Frame { pairs: &pairs, species: &species, prep: &prep };
    inp.run_chunks(|c, acc, probe| scalar_opt::chunk(&fr, inp.chunk_rows(c), acc, probe))
}

struct Packed<'a, 'b, P> {
    inp: &'a Inputs<'b>,
    tag: VariantTag,
    probe: PhantomData<P>,
}

impl<P: Probe> LaneVisitor for Packed<'_, '_, P> {
    type Output = (ForceEnergyResult, P);

    fn visit<V: SimdVector>(self) -> Self::Output {
        let inp = self.inp;
        let prep = Prepared::<V::Scalar>::new(inp.table);
        let pairs = inp.pairs::<V::Scalar>();
        let species = inp.species_i32();
        let fr = Frame { pairs: &pairs, species: &species, prep: &prep };
        match self.tag {
            VariantTag::VecI => {
                let batches = inp.batches(&pairs, PackMode::I, V::LANES);
                inp.run_chunks(|c, acc, probe| vec_i::chunk::<V, P>(&fr, &batches, c, acc, probe))
            }
            _ => {
                let batches = inp.batches(&pairs, PackMode::J, V::LANES);
                inp.run_chunks(|c, acc, probe| vec_j::chunk::<V, P>(&fr, &batches, c, acc, probe))
            }
        }
    }
}

macro_rules! emulated_width {
    ($vis:expr, $t:ty, $mode:ty, $w:expr) => {
        match $w {
            1 => $vis.visit::<Emulated<$t, 1, $mode>>(),
            2 => $vis.visit::<Emulated<$t, 2, $mode>>(),
            4 => $vis.visit::<Emulated<$t, 4, $mode>>(),
            8 => $vis.visit::<Emulated<$t, 8, $mode>>(),
            16 => $vis.visit::<Emulated<$t, 16, $mode>>(),
            w => unreachable!("emulated width {w} passed validation"),
        }
    };
}

/// Calls `vis` with the lane type described by `spec`, which must be valid.
pub(crate) fn with_lanes<Vis: LaneVisitor>(spec: &BackendSpec, vis: Vis) -> Vis::Output {
    match (spec.kind, spec.precision, spec.strict) {
        (BackendKind::Scalar, Precision::Double, _) => vis.visit::<f64>(),
        (BackendKind::Scalar, Precision::Single, _) => vis.visit::<f32>(),
        (BackendKind::Emulated, Precision::Double, false) => emulated_width!(vis, f64, Fast, spec.width),
        (BackendKind::Emulated, Precision::Single, false) => emulated_width!(vis, f32, Fast, spec.width),
        (BackendKind::Emulated, Precision::Double, true) => emulated_width!(vis, f64, Strict, spec.width),
        (BackendKind::Emulated, Precision::Single, true) => emulated_width!(vis, f32, Strict, spec.width),
        (BackendKind::Native, precision, _) => native(vis, precision),
    }
}

#[cfg(all(feature = "native", target_arch = "x86_64", target_feature = "avx2", target_feature = "fma"))]
fn native<Vis: LaneVisitor>(vis: Vis, precision: Precision) -> Vis::Output {
    use crate::simd::native::{F32x8, F64x4};
    match precision {
        Precision::Double => vis.visit::<F64x4>(),
        Precision::Single => vis.visit::<F32x8>(),
    }
}

#[cfg(not(all(feature = "native", target_arch = "x86_64", target_feature = "avx2", target_feature = "fma")))]
fn native<Vis: LaneVisitor>(_vis: Vis, _precision: Precision) -> Vis::Output {
    unreachable!("native backend requested but not built; BackendSpec::validate rejects this")
}
