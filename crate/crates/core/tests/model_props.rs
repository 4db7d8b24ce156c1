//! Property tests for the domain types and the instance grammar.

use nalgebra::DVector;
use proptest::prelude::*;
use radiso_core::model::{
    normalize_scaling, parse_instance, serialize_instance_json, InstanceFormat, Normalization,
    ScalingVector, VectorSet, WeightVector,
};
use radiso_core::potential::{assemble, f_value};
use radiso_core::synth;

fn vector_entries(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parse_serialize_round_trip_is_bit_exact(
        raw in prop::collection::vec(vector_entries(3), 3..8),
    ) {
        let Ok(x) = VectorSet::from_vectors(3, &raw) else {
            return Ok(()); // rank-deficient or zero draws are rejected inputs
        };
        let c = WeightVector::uniform(3, x.count()).unwrap();
        let s = serialize_instance_json(&x, &c);
        let (x2, c2) = parse_instance(&s, InstanceFormat::Json(None)).unwrap();
        prop_assert_eq!(x.matrix(), x2.matrix());
        prop_assert_eq!(c.vector(), c2.vector());
        prop_assert_eq!(s, serialize_instance_json(&x2, &c2));
    }

    #[test]
    fn min_zero_normalization_pins_minimum(entries in prop::collection::vec(-50.0f64..50.0, 2..12)) {
        let t = ScalingVector::raw(DVector::from_vec(entries));
        let out = normalize_scaling(&t, Normalization::MinZero);
        prop_assert_eq!(out.vector().min(), 0.0);
        prop_assert!(out.vector().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn mean_zero_normalization_centers(entries in prop::collection::vec(-50.0f64..50.0, 2..12)) {
        let t = ScalingVector::raw(DVector::from_vec(entries));
        let out = normalize_scaling(&t, Normalization::MeanZeroOn1);
        let scale = 1.0 + out.vector().amax();
        prop_assert!(out.vector().sum().abs() <= 1e-12 * out.vector().len() as f64 * scale);
    }

    #[test]
    fn objective_invariant_along_all_ones(seed in 0u64..500, alpha in -5.0f64..5.0) {
        let mut rng = synth::rng(seed);
        let x = synth::random_unit_vectors(3, 6, &mut rng);
        let c = synth::random_interior_weights(3, 6, &mut rng);
        let t = synth::random_scaling(6, 2.0, &mut rng);
        let f0 = f_value(&assemble(&x, &ScalingVector::raw(t.clone()), 1e-14).unwrap(), &c).unwrap();
        let f1 = f_value(
            &assemble(&x, &ScalingVector::raw(t.add_scalar(alpha)), 1e-14).unwrap(),
            &c,
        )
        .unwrap();
        prop_assert!((f0 - f1).abs() <= 1e-10 * (1.0 + f0.abs()));
    }
}
