use std::f64::consts::PI;

use kleinx_core::extremal;
use kleinx_core::specfun;
use kleinx_core::systems::{first_integrals, rhs_full, PhiState};
use proptest::prelude::*;

fn unit() -> impl Strategy<Value = f64> {
    -1.0f64..1.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn integral_relations_hold_on_the_manifold(
        pos in [unit(), unit(), unit()],
        vel in [unit(), unit(), unit()],
    ) {
        prop_assume!(pos.iter().map(|v| v * v).sum::<f64>() > 1e-3);
        let Ok(s) = PhiState::on_manifold(0.0, pos, vel) else {
            return Ok(());
        };
        for d in first_integrals(&s).relation_defects() {
            prop_assert!(d.abs() < 1e-10);
        }
    }

    #[test]
    fn constraints_are_invariant_to_first_order(
        pos in [unit(), unit(), unit()],
        vel in [unit(), unit(), unit()],
    ) {
        prop_assume!(pos.iter().map(|v| v * v).sum::<f64>() > 1e-3);
        let Ok(s) = PhiState::on_manifold(0.0, pos, vel) else {
            return Ok(());
        };
        // d/dy of each constraint vanishes on the manifold
        let x = s.to_full();
        let dx = rhs_full(&x);
        let norm = 2.0 * (0..3).map(|i| x[i] * dx[i]).sum::<f64>();
        let tangency: f64 = (0..3).map(|i| dx[i] * x[i + 3] + x[i] * dx[i + 3]).sum();
        let energy = 2.0 * (0..3).map(|i| x[i + 3] * dx[i + 3]).sum::<f64>()
            - 2.0 * (x[1] * dx[1] + 4.0 * x[2] * dx[2]);
        prop_assert!(norm.abs() < 1e-12);
        prop_assert!(tangency.abs() < 1e-12);
        prop_assert!(energy.abs() < 1e-12);
    }

    #[test]
    fn symmetric_states_give_symmetric_fields(
        pos in [unit(), unit(), unit()],
        vel in [unit(), unit(), unit()],
    ) {
        let x = [pos[0], pos[1], pos[2], vel[0], vel[1], vel[2]];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let a = rhs_full(&x);
        let b = rhs_full(&neg);
        for i in 0..6 {
            prop_assert!((a[i] + b[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn jacobi_identities(u in -50.0f64..50.0, k in 0.0f64..0.9999) {
        let (cn, sn, dn) = specfun::jacobi_cn_sn_dn(u, k).unwrap();
        prop_assert!((sn * sn + cn * cn - 1.0).abs() < 1e-12);
        prop_assert!((dn * dn + k * k * sn * sn - 1.0).abs() < 1e-12);
    }

    #[test]
    fn y_of_theta_is_increasing(t in -10.0f64..10.0, d in 1e-3f64..1.0) {
        prop_assert!(extremal::y_of_theta(t + d) > extremal::y_of_theta(t));
    }

    #[test]
    fn embedding_lies_on_the_sphere(x in 0.0f64..PI, y in -10.0f64..10.0) {
        let p = extremal::embed(x, y);
        prop_assert!((p.norm() - 1.0).abs() < 1e-10);
        let q = extremal::embed(x + PI, -y);
        for i in 0..5 {
            prop_assert!((p.coords[i] - q.coords[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn metric_stays_between_three_and_five(y in -20.0f64..20.0) {
        let lf = extremal::metric_from_phi0(extremal::phi_closed_form(y)[0]);
        prop_assert!((3.0 - 1e-12..=5.0 + 1e-12).contains(&lf));
    }
}
