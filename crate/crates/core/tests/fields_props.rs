//! Property tests for the spectral field toolbox.

use ndarray::Array3;
use proptest::prelude::*;

use oseen::fields::{
    apply_dealias, derivative, forward_transform, heat_propagate, inverse_transform,
    leray_project, VectorField,
};
use oseen::grid::GridSpec;

const N: usize = 8;

fn field_from(values: &[f64]) -> VectorField<f64> {
    let grid = GridSpec::new(1.25, N).unwrap();
    let mut v = VectorField::zeros(grid);
    for c in 0..3 {
        let comp: Vec<f64> = values[c * N * N * N..(c + 1) * N * N * N].to_vec();
        v.components[c] = Array3::from_shape_vec((N, N, N), comp).unwrap();
    }
    v
}

fn samples() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0f64..1.0, 3 * N * N * N)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip_within_machine_bound(values in samples()) {
        let v = field_from(&values);
        let back = inverse_transform(&forward_transform(&v).unwrap()).unwrap();
        let scale = v.max_abs().max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for c in 0..3 {
            for (a, b) in back.components[c].iter().zip(v.components[c].iter()) {
                worst = worst.max((a - b).abs());
            }
        }
        prop_assert!(worst <= 100.0 * f64::EPSILON * scale, "round trip error {worst:e}");
    }

    #[test]
    fn forward_output_is_conjugate_symmetric(values in samples()) {
        let v = field_from(&values);
        let vhat = forward_transform(&v).unwrap();
        let mut worst = 0.0f64;
        let scale = vhat.max_abs().max(f64::MIN_POSITIVE);
        for c in 0..3 {
            for k0 in 0..N {
                for k1 in 0..N {
                    for k2 in 0..N {
                        let neg = [(N - k0) % N, (N - k1) % N, (N - k2) % N];
                        let a = vhat.components[c][[k0, k1, k2]];
                        let b = vhat.components[c][neg].conj();
                        worst = worst.max((a - b).norm());
                    }
                }
            }
        }
        prop_assert!(worst <= 1e-13 * scale, "asymmetry {worst:e}");
    }

    #[test]
    fn projection_is_idempotent_and_solenoidal(values in samples()) {
        let v = field_from(&values);
        let vhat = forward_transform(&v).unwrap();
        let once = leray_project(&vhat);
        let twice = leray_project(&once);
        let scale = vhat.max_abs().max(f64::MIN_POSITIVE);
        for c in 0..3 {
            for (a, b) in twice.components[c].iter().zip(once.components[c].iter()) {
                prop_assert!((*a - *b).norm() <= 1e-13 * scale);
            }
        }
        prop_assert!(once.max_relative_divergence() <= 1e-12);
    }

    #[test]
    fn heat_semigroup_property(values in samples(), dt1 in 0.0f64..0.5, dt2 in 0.0f64..0.5) {
        let v = field_from(&values);
        let vhat = forward_transform(&v).unwrap();
        let nu = 0.7;
        let joint = heat_propagate(&vhat, dt1 + dt2, nu).unwrap();
        let split = heat_propagate(&heat_propagate(&vhat, dt1, nu).unwrap(), dt2, nu).unwrap();
        let scale = vhat.max_abs().max(f64::MIN_POSITIVE);
        for c in 0..3 {
            for (a, b) in joint.components[c].iter().zip(split.components[c].iter()) {
                prop_assert!((*a - *b).norm() <= 1e-14 * scale);
            }
        }
        // contraction: no coefficient grows
        for c in 0..3 {
            for (a, b) in joint.components[c].iter().zip(vhat.components[c].iter()) {
                prop_assert!(a.norm() <= b.norm() * (1.0 + 1e-15));
            }
        }
    }

    #[test]
    fn projected_dealiased_fields_have_tiny_divergence_via_derivative(values in samples()) {
        let v = field_from(&values);
        let mut vhat = forward_transform(&v).unwrap();
        apply_dealias(&mut vhat);
        let p = leray_project(&vhat);
        let d0 = derivative(&p, 0);
        let d1 = derivative(&p, 1);
        let d2 = derivative(&p, 2);
        let mut div = 0.0f64;
        for k0 in 0..N {
            for k1 in 0..N {
                for k2 in 0..N {
                    let idx = [k0, k1, k2];
                    let s = d0.components[0][idx] + d1.components[1][idx] + d2.components[2][idx];
                    div = div.max(s.norm());
                }
            }
        }
        prop_assert!(div <= 1e-12 * p.max_abs().max(f64::MIN_POSITIVE) * 20.0);
    }
}
