use mixlab::instances::{make_coset_mixer, make_layered_instance, make_offset_mixer, Hiding, LayeredVariant};
use mixlab::quantum::{component_projector_matrix, measure_component_projector, trace_distance, QuantumState, Register};
use mixlab::verify::{connectivity_report, first_round_trip_failure, verify_instant_mixing, verify_no_cross_mixing};
use mixlab::{GroundTruthPartition, QuerySession};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A partition of a subset of {0,1}^n; class 0 is garbage.
fn partition() -> impl Strategy<Value = GroundTruthPartition> {
    (1u32..=4).prop_flat_map(|n| {
        prop::collection::vec(0usize..4, 1usize << n).prop_filter_map("empty S", move |classes| {
            let mut comps = vec![Vec::new(); 3];
            for (x, &c) in classes.iter().enumerate() {
                if c > 0 {
                    comps[c - 1].push(x as u64);
                }
            }
            comps.retain(|c| !c.is_empty());
            (!comps.is_empty()).then(|| GroundTruthPartition::from_components(n, comps).unwrap())
        })
    })
}

fn amplitudes(dim: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
        .prop_filter("zero vector", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn offset_mixers_satisfy_the_definition(t in partition()) {
        let m = make_offset_mixer(&t).unwrap();
        prop_assert!(first_round_trip_failure(&m).is_none());
        prop_assert!(verify_no_cross_mixing(&m, &t));
        prop_assert_eq!(verify_instant_mixing(&m, &t, 0).max_tv, 0.0);
        prop_assert!(connectivity_report(&m, &t).holds());
    }

    #[test]
    fn coset_mixers_satisfy_the_definition(
        (modulus, gens) in (1u64..40).prop_flat_map(|m| (Just(m), prop::collection::vec(0..m, 0..3))),
    ) {
        let (m, t) = make_coset_mixer(modulus, &gens).unwrap();
        prop_assert!(first_round_trip_failure(&m).is_none());
        prop_assert!(verify_no_cross_mixing(&m, &t));
        prop_assert_eq!(verify_instant_mixing(&m, &t, 0).max_tv, 0.0);
        prop_assert!(connectivity_report(&m, &t).holds());
    }

    #[test]
    fn projector_probability_is_the_expectation(
        (t, amps) in partition().prop_flat_map(|t| { let dim = 1usize << t.n(); (Just(t), amplitudes(dim)) }),
        seed in any::<u64>(),
    ) {
        let m = make_offset_mixer(&t).unwrap();
        let psi = QuantumState::normalized(vec![Register::qubits("A", t.n())], amps).unwrap();
        let p = component_projector_matrix(&t, true);
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        let expect = v.dotc(&(&p * &v)).re;
        let mut session = QuerySession::new(&m);
        let out = measure_component_projector(&mut session, &psi, 0, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert!((out.probability_one - expect).abs() < 1e-9);
        prop_assert!(out.b_fidelity > 1.0 - 1e-9);
        prop_assert!(out.state.is_normalized());
        prop_assert_eq!(session.counts().controlled_m, 2);
    }

    #[test]
    fn trace_distance_is_a_metric(a in amplitudes(4), b in amplitudes(4), c in amplitudes(4)) {
        let reg = vec![Register::qubits("A", 2)];
        let rho = |v: Vec<Complex64>| QuantumState::normalized(reg.clone(), v).unwrap().density().unwrap();
        let (x, y, z) = (rho(a), rho(b), rho(c));
        let xy = trace_distance(&x, &y).unwrap();
        prop_assert!((xy - trace_distance(&y, &x).unwrap()).abs() < 1e-9);
        prop_assert!((-1e-12..=1.0 + 1e-9).contains(&xy));
        prop_assert!(xy <= trace_distance(&x, &z).unwrap() + trace_distance(&z, &y).unwrap() + 1e-9);
        prop_assert!(trace_distance(&x, &x).unwrap() < 1e-9);
    }

    #[test]
    fn hiding_preserves_component_structure(seed in any::<u64>(), variant in 0usize..4) {
        let t = GroundTruthPartition::from_components(2, vec![vec![0, 1], vec![2]]).unwrap();
        let base = make_offset_mixer(&t).unwrap();
        let v = [LayeredVariant::Row0, LayeredVariant::Row(1), LayeredVariant::Row(3), LayeredVariant::Nowhere][variant];
        let inst = make_layered_instance(&base, &t, 0, v).unwrap();
        let h = Hiding::random(4, &mut ChaCha8Rng::seed_from_u64(seed));
        let hidden = inst.hide_with(&h).unwrap();
        prop_assert!(verify_no_cross_mixing(hidden.mixer(), hidden.truth()));
        prop_assert!(first_round_trip_failure(hidden.mixer()).is_none());
        prop_assert_eq!(hidden.label_valid(), inst.label_valid());
        prop_assert_eq!(hidden.truth().component_sizes(), inst.truth().component_sizes());
    }
}
