mod common;

use std::f64::consts::{PI, TAU};

use csikit::{decompose, principal_arg, recompose, unwrap, wrap_to_pi, Complex64, CsiMatrix, Grid};
use proptest::prelude::*;

#[test]
fn staircase_becomes_a_ramp() {
    let ramp: Vec<f64> = (0..40).map(|k| 0.45 * k as f64 - 3.0).collect();
    let wrapped: Vec<f64> = ramp.iter().map(|&x| wrap_to_pi(x)).collect();
    let un = unwrap(&wrapped).unwrap();
    assert_eq!(un[0], wrapped[0]);
    assert!(common::max_abs_diff(&un, &ramp) < 1e-12);
}

#[test]
fn branch_cut() {
    assert_eq!(principal_arg(Complex64::new(-1.0, 0.0)), PI);
    assert_eq!(principal_arg(Complex64::new(-1.0, -0.0)), PI);
    assert_eq!(wrap_to_pi(-PI), PI);
    assert_eq!(wrap_to_pi(3.0 * PI), PI);
}

proptest! {
    #[test]
    fn steps_land_in_principal_interval(v in prop::collection::vec(-50.0f64..50.0, 1..200)) {
        let u = unwrap(&v).unwrap();
        prop_assert_eq!(u[0], v[0]);
        for (w, x) in u.windows(2).zip(v.windows(2)) {
            let step = w[1] - w[0];
            prop_assert!(step > -PI - 1e-9 && step <= PI + 1e-9);
            // the correction is a whole number of turns
            let turns = ((w[1] - x[1]) - (w[0] - x[0])) / TAU;
            prop_assert!((turns - turns.round()).abs() < 1e-9);
        }
    }

    #[test]
    fn unwrap_is_idempotent(v in prop::collection::vec(-50.0f64..50.0, 1..200)) {
        let once = unwrap(&v).unwrap();
        let twice = unwrap(&once).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn wrap_lands_in_range(x in -1e6f64..1e6) {
        let w = wrap_to_pi(x);
        prop_assert!(w > -PI && w <= PI);
        let turns = (x - w) / TAU;
        prop_assert!((turns - turns.round()).abs() < 1e-6);
    }

    #[test]
    fn decompose_recompose_round_trip(
        cells in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 6..60),
    ) {
        let cols = 2 + cells.len() % 4;
        let rows = cells.len() / cols;
        let data: Vec<Complex64> = cells[..rows * cols].iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        let csi = CsiMatrix::new(Grid::from_vec(rows, cols, data).unwrap()).unwrap();
        let polar = decompose(&csi);
        for (z, (&a, &p)) in csi.grid().as_slice().iter().zip(
            polar.amplitude.grid().as_slice().iter().zip(polar.phase.grid().as_slice()),
        ) {
            prop_assert_eq!(a, z.re.hypot(z.im));
            prop_assert!(p > -PI && p <= PI);
        }
        let back = recompose(&polar.amplitude, &polar.phase).unwrap();
        for (a, b) in back.grid().as_slice().iter().zip(csi.grid().as_slice()) {
            prop_assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0));
        }
    }
}
