use aqss_core::channels::{apply, apply_product, sample_ruc, ChannelFamily};
use aqss_core::linalg::{
    hs_norm, maximally_entangled_state, mutual_information, partial_trace, tensor_product, trace_norm,
    von_neumann_entropy, ComplexMatrix, DensityMatrix, Subsystem, C64,
};
use aqss_core::protocol::{charlie_encode, cooperate_decode, ProtocolConfig};
use aqss_core::random::{random_pure_state, random_separable_state};
use aqss_core::RngStream;
use proptest::prelude::*;

fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |v| {
        let m = ComplexMatrix::from_row_major(n, n, v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap();
        &m + &m.adjoint()
    })
}

fn mixed_state(d: usize, seed: u64) -> DensityMatrix {
    let mut rng = RngStream::new(seed, 0);
    let a = random_pure_state(d, &mut rng).unwrap();
    let b = random_pure_state(d, &mut rng).unwrap();
    let mut m = a.matrix().scale(0.6);
    m.add_scaled(b.matrix(), 0.4);
    DensityMatrix::new(m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_norm_bounded_by_scaled_hs_norm(x in (1usize..9).prop_flat_map(hermitian)) {
        let k = x.rows() as f64;
        prop_assert!(trace_norm(&x).unwrap() <= k.sqrt() * hs_norm(&x) + 1e-12);
        prop_assert!(hs_norm(&x) <= trace_norm(&x).unwrap() + 1e-12);
    }

    #[test]
    fn partial_trace_preserves_trace_and_positivity(da in 1usize..5, db in 1usize..5, seed in any::<u64>()) {
        let rho = random_separable_state(da, db, 3, &mut RngStream::new(seed, 0)).unwrap();
        for keep in [Subsystem::A, Subsystem::B] {
            let r = partial_trace(&rho, (da, db), keep).unwrap();
            prop_assert!((r.matrix().trace().re - 1.0).abs() <= 1e-10);
            prop_assert!(r.eigenvalues()[0] >= -1e-10);
        }
    }

    #[test]
    fn partial_trace_inverts_tensor_product(da in 2usize..4, db in 2usize..4, seed in any::<u64>()) {
        let a = mixed_state(da, seed);
        let b = mixed_state(db, seed ^ 1);
        let rho = DensityMatrix::new(tensor_product(a.matrix(), b.matrix())).unwrap();
        prop_assert!(partial_trace(&rho, (da, db), Subsystem::A).unwrap().matrix().max_abs_diff(a.matrix()) <= 1e-10);
        prop_assert!(partial_trace(&rho, (da, db), Subsystem::B).unwrap().matrix().max_abs_diff(b.matrix()) <= 1e-10);
    }

    #[test]
    fn entropy_is_bounded_by_log_dimension(d in 1usize..9, seed in any::<u64>()) {
        let rho = mixed_state(d, seed);
        let s = von_neumann_entropy(&rho);
        prop_assert!(s >= 0.0 && s <= (d as f64).log2() + 1e-8);
    }

    #[test]
    fn channels_are_unital_and_trace_preserving(d in 2usize..5, n in 1usize..12, seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 0);
        let ch = sample_ruc(d, n, &mut rng).unwrap();
        let rho = random_pure_state(d, &mut rng).unwrap();
        let out = apply(&ch, &rho).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() <= 1e-10);
        prop_assert!(out.eigenvalues()[0] >= -1e-10);
        let mixed = ComplexMatrix::identity(d).scale(1.0 / d as f64);
        let fixed = apply(&ch, &DensityMatrix::new(mixed.clone()).unwrap()).unwrap();
        prop_assert!(fixed.matrix().max_abs_diff(&mixed) <= 1e-10);
    }

    #[test]
    fn product_output_never_beats_its_marginal(seed in any::<u64>()) {
        // Contractivity of the trace norm under partial trace.
        let mut rng = RngStream::new(seed, 0);
        let fam = ChannelFamily::new(vec![sample_ruc(2, 4, &mut rng).unwrap(), sample_ruc(2, 4, &mut rng).unwrap()]).unwrap();
        let rho = random_pure_state(4, &mut rng).unwrap();
        let out = apply_product(&fam, &rho).unwrap();
        let marginal = partial_trace(&out, (2, 2), Subsystem::A).unwrap();
        prop_assert!(marginal.distance_to_maximally_mixed() <= out.distance_to_maximally_mixed() + 1e-12);
    }

    #[test]
    fn decode_inverts_encode(d in 2usize..4, n in 1usize..6, seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 0);
        let cfg = ProtocolConfig::new(d, 0.5, 2).unwrap().with_n(n).unwrap();
        let phi = random_pure_state(d * d, &mut rng).unwrap();
        let s = charlie_encode(&cfg, &phi, &mut rng).unwrap();
        prop_assert!(cooperate_decode(&s).unwrap().matrix().max_abs_diff(phi.matrix()) <= 1e-12);
    }
}

#[test]
fn maximally_entangled_mutual_information() {
    for d in 2..=5 {
        let i = mutual_information(&maximally_entangled_state(d).unwrap(), (d, d)).unwrap();
        assert!((i - 2.0 * (d as f64).log2()).abs() <= 1e-8);
    }
}
