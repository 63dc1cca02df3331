use proptest::prelude::*;

use super::fastmath::{ulp_distance, ulp_distance_f32};
use super::*;

type E4 = Emulated<f64, 4>;
type E8 = Emulated<f64, 8>;

#[test]
fn splat_fills_every_lane() {
    assert_eq!(E4::splat(1.5).to_array(), [1.5; 4]);
    assert_eq!(E4::zero().to_array(), [0.0; 4]);
    let e = E8::splat(-2.25);
    for l in 0..8 {
        assert_eq!(e.lane(l).to_bits(), <f64 as SimdVector>::splat(-2.25).to_bits());
    }
}

#[test]
fn masked_gather_definition() {
    type E2 = Emulated<f64, 2>;
    let base = [10.0, 20.0, 30.0];
    let g = E2::masked_gather(&base, IndexLanes([0, 2]), MaskLanes([true, true]), 0.0);
    assert_eq!(g.to_array(), [10.0, 30.0]);
    // inactive lanes are never dereferenced, even with garbage indices
    let g = E2::masked_gather(&base, IndexLanes([-1, 99]), MaskLanes([false, false]), 7.0);
    assert_eq!(g.to_array(), [7.0, 7.0]);
}

#[test]
fn gather_transpose_definition() {
    type E2 = Emulated<f64, 2>;
    let recs = [[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]];
    let [a, b, c] = E2::gather_transpose(&recs, IndexLanes([1, 0]), MaskLanes([true, true]));
    assert_eq!((a.to_array(), b.to_array(), c.to_array()), ([4.0, 1.0], [5.0, 2.0], [6.0, 3.0]));
    let [a, b, c] = E2::gather_transpose(&recs, IndexLanes([1, -1]), MaskLanes([true, false]));
    assert_eq!((a.lane(1), b.lane(1), c.lane(1)), (0.0, 0.0, 0.0));
}

#[test]
fn scatter_accumulates_duplicates() {
    type E2 = Emulated<f64, 2>;
    let mut dest = [0.0, 0.0];
    E2::accumulate_scatter(&mut dest, IndexLanes([0, 0]), E2::new([1.0, 2.0]), MaskLanes([true, true]));
    assert_eq!(dest, [3.0, 0.0]);
    E2::accumulate_scatter(&mut dest, IndexLanes([-1, 5]), E2::new([9.0, 9.0]), MaskLanes([false, false]));
    assert_eq!(dest, [3.0, 0.0]);
}

#[test]
fn lane_arith_examples() {
    assert_eq!(E4::zero().exp().to_array(), [1.0; 4]);
    assert_eq!(E4::new([1.0, 2.0, 3.0, 4.0]).reduce_sum(), 10.0);
    let a = E4::new([1.0, -2.0, 3.0, f64::NAN]);
    let b = E4::new([0.5, 4.0, -1.0, 1.0]);
    let m = a.lanes_lt(b);
    assert_eq!(m, MaskLanes([false, true, false, false]));
    assert_eq!(E4::select(m, a, b).to_array()[..3], [0.5, -2.0, -1.0]);
    assert!((a + b).lane(3).is_nan());
}

#[test]
fn descriptors_name_backends() {
    assert_eq!(
        <f64 as SimdVector>::descriptor(),
        BackendDescriptor { name: "scalar", width: 1, precision: Precision::Double }
    );
    assert_eq!(E8::descriptor().width, 8);
    assert_eq!(Emulated::<f32, 16, Strict>::descriptor().name, "emulated-strict");
    assert_eq!(Emulated::<f32, 16, Strict>::descriptor().precision, Precision::Single);
}

#[test]
fn index_helpers() {
    let i = IndexLanes([3, -1, 7, 2]);
    let m = MaskLanes([true, false, true, false]);
    assert_eq!(i.max_active(m), 7);
    assert_eq!(i.max_active(MaskLanes([false; 4])), i32::MIN);
    assert_eq!(i.mul_scalar(2), IndexLanes([6, -2, 14, 4]));
    assert_eq!(m.count(), 2);
    assert!(m.any() && !m.all() && !MaskLanes([false; 4]).any());
    let base = [0, 10, 20, 30, 40, 50, 60, 70];
    assert_eq!(IndexLanes::masked_gather(&base, i, m, -1), IndexLanes([30, -1, 70, -1]));
}

fn lanes_f64<const W: usize>() -> impl Strategy<Value = [f64; W]> {
    proptest::array::uniform::<_, W>(-50.0f64..50.0)
}

fn check_backend_equivalence<const W: usize>(a: [f64; W], b: [f64; W]) {
    type One = f64;
    let ea = Emulated::<f64, W, Strict>::new(a);
    let eb = Emulated::<f64, W, Strict>::new(b);
    let fa = Emulated::<f64, W, Fast>::new(a);
    for l in 0..W {
        let (x, y) = (a[l], b[l]);
        assert_eq!((ea + eb).lane(l).to_bits(), (x + y).to_bits());
        assert_eq!((ea - eb).lane(l).to_bits(), (x - y).to_bits());
        assert_eq!((ea * eb).lane(l).to_bits(), (x * y).to_bits());
        assert_eq!((ea / eb).lane(l).to_bits(), (x / y).to_bits());
        assert_eq!(ea.min(eb).lane(l).to_bits(), <One as SimdVector>::min(x, y).to_bits());
        assert_eq!(ea.abs().sqrt().lane(l).to_bits(), SimdVector::sqrt(x.abs()).to_bits());
        assert_eq!(ea.mul_add(eb, eb).lane(l).to_bits(), SimdVector::mul_add(x, y, y).to_bits());
        assert_eq!(ea.exp().lane(l).to_bits(), SimdVector::exp(x).to_bits());
        assert_eq!(ea.sin().lane(l).to_bits(), SimdVector::sin(x).to_bits(), "sin {x:e} lane {l} of {W}");
        assert_eq!(ea.cos().lane(l).to_bits(), SimdVector::cos(x).to_bits());
        assert!(ulp_distance(fa.exp().lane(l), x.exp()) <= 4);
        assert!(ulp_distance(fa.sin().lane(l), x.sin()) <= 4);
        assert!(ulp_distance(fa.cos().lane(l), x.cos()) <= 4);
    }
}

proptest! {
    #[test]
    fn emulated_matches_scalar_per_lane(a in lanes_f64::<8>(), b in lanes_f64::<8>()) {
        check_backend_equivalence::<8>(a, b);
        check_backend_equivalence::<1>([a[0]], [b[0]]);
        check_backend_equivalence::<2>([a[0], a[1]], [b[0], b[1]]);
    }

    #[test]
    fn single_precision_fast_math_within_4_ulp(x in -80.0f32..80.0) {
        let v = Emulated::<f32, 4>::splat(x);
        prop_assert!(ulp_distance_f32(v.exp().lane(0), x.exp()) <= 4);
        prop_assert!(ulp_distance_f32(v.sin().lane(2), x.sin()) <= 4);
        prop_assert!(ulp_distance_f32(v.cos().lane(3), x.cos()) <= 4);
    }

    #[test]
    fn masked_gather_matches_scalar_loop(
        base in proptest::collection::vec(-1e3f64..1e3, 1..40),
        raw in proptest::array::uniform8(0usize..1000),
        bits in proptest::array::uniform8(any::<bool>()),
    ) {
        let idx = IndexLanes(raw.map(|r| (r % base.len()) as i32));
        let mask = MaskLanes(bits);
        let g = E8::masked_gather(&base, idx, mask, -0.5);
        for l in 0..8 {
            let want = if bits[l] { base[idx.0[l] as usize] } else { -0.5 };
            prop_assert_eq!(g.lane(l).to_bits(), want.to_bits());
        }
    }

    #[test]
    fn gather_transpose_matches_field_gathers(
        recs in proptest::collection::vec(proptest::array::uniform4(-1e3f64..1e3), 1..30),
        raw in proptest::array::uniform8(0usize..1000),
        bits in proptest::array::uniform8(any::<bool>()),
    ) {
        let idx = IndexLanes(raw.map(|r| (r % recs.len()) as i32));
        let mask = MaskLanes(bits);
        let t = E8::gather_transpose(&recs, idx, mask);
        for f in 0..4 {
            let field: Vec<f64> = recs.iter().map(|r| r[f]).collect();
            let g = E8::masked_gather(&field, idx, mask, 0.0);
            prop_assert_eq!(t[f].to_array(), g.to_array());
        }
    }

    #[test]
    fn scatter_matches_scalar_loop(
        raw in proptest::array::uniform8(0usize..4),
        vals in lanes_f64::<8>(),
        bits in proptest::array::uniform8(any::<bool>()),
    ) {
        let idx = IndexLanes(raw.map(|r| r as i32));
        let mut got = [0.1, 0.2, 0.3, 0.4];
        let mut want = got;
        E8::accumulate_scatter(&mut got, idx, E8::new(vals), MaskLanes(bits));
        for l in 0..8 {
            if bits[l] {
                want[raw[l]] += vals[l];
            }
        }
        prop_assert_eq!(got.map(f64::to_bits), want.map(f64::to_bits));

        let mut got3 = [[0.0; 3]; 4];
        let v3 = [E8::new(vals), -E8::new(vals), E8::new(vals) * E8::splat(2.0)];
        E8::accumulate_scatter3(&mut got3, idx, v3, MaskLanes(bits));
        let mut want3 = [[0.0; 3]; 4];
        for l in 0..8 {
            if bits[l] {
                want3[raw[l]][0] += vals[l];
                want3[raw[l]][1] += -vals[l];
                want3[raw[l]][2] += vals[l] * 2.0;
            }
        }
        prop_assert_eq!(got3, want3);
    }

    #[test]
    fn reduce_sum_is_ascending_lane_order(vals in lanes_f64::<8>()) {
        let mut s = 0.0;
        for v in vals {
            s += v;
        }
        prop_assert_eq!(E8::new(vals).reduce_sum().to_bits(), s.to_bits());
    }
}
