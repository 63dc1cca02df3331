use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use tersoff_bench::{label, neighbor_list, variants, warm_tube};
use tersoff_core::kernels::{compute, BackendSpec, KernelVariant, VariantTag, EMULATED_WIDTHS};
use tersoff_core::{ParamTable, Precision};

fn force_evaluation(c: &mut Criterion) {
    let table = ParamTable::carbon();
    let state = warm_tube(100);
    let nl = neighbor_list(&state, &table);
    for precision in [Precision::Double, Precision::Single] {
        let mut group = c.benchmark_group(format!("force/{}", precision.name()));
        group.throughput(Throughput::Elements(state.n_atoms() as u64));
        for v in variants(precision) {
            group.bench_function(BenchmarkId::from_parameter(label(&v)), |b| {
                b.iter(|| compute(&v, &state, &nl, &table).expect("evaluation"))
            });
        }
        group.finish();
    }
}

fn emulated_widths(c: &mut Criterion) {
    let table = ParamTable::carbon();
    let state = warm_tube(25);
    let nl = neighbor_list(&state, &table);
    let mut group = c.benchmark_group("emulated-width");
    for tag in [VariantTag::VecJ, VariantTag::VecI] {
        for w in EMULATED_WIDTHS {
            let v = KernelVariant::new(tag, BackendSpec::emulated(w, Precision::Double)).expect("supported width");
            group.bench_with_input(BenchmarkId::new(tag.name(), w), &v, |b, v| {
                b.iter(|| compute(v, &state, &nl, &table).expect("evaluation"))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, force_evaluation, emulated_widths);
criterion_main!(benches);
