//! Property tests and an eigendecomposition oracle.

use std::f64::consts::FRAC_PI_2;

use approx::assert_abs_diff_eq;
use holonoise::fidelity::{average_gate_fidelity, ChannelEstimate};
use holonoise::geometry::solid_angle;
use holonoise::linalg::step_exp;
use holonoise::model::{hamiltonian, holonomy_target, polar_to_cartesian, ParamPoint};
use holonoise::CMat;
use nalgebra::{Complex, Matrix4, SymmetricEigen};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn to_na(m: &CMat) -> Matrix4<Complex<f64>> {
    Matrix4::from_fn(|i, j| m[(i, j)])
}

/// `exp(−iH dt)` from nalgebra's Hermitian eigendecomposition.
fn eigen_exp(h: &CMat, dt: f64) -> Matrix4<Complex<f64>> {
    let eig = SymmetricEigen::new(to_na(h));
    let phases = eig.eigenvalues.map(|l| Complex::from_polar(1.0, -l * dt));
    let v = eig.eigenvectors;
    v * Matrix4::from_diagonal(&phases) * v.adjoint()
}

fn point() -> impl Strategy<Value = ParamPoint> {
    prop::array::uniform6(-2.0f64..2.0).prop_map(|a| {
        ParamPoint::new(
            C64::new(a[0], a[1]),
            C64::new(a[2], a[3]),
            C64::new(a[4], a[5]),
        )
    })
}

proptest! {
    #[test]
    fn step_exp_matches_eigendecomposition(p in point(), dt in 0.0f64..3.0) {
        let u = step_exp(&p, dt);
        let e = eigen_exp(&hamiltonian(&p), dt);
        let d = (to_na(&u) - e).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(d < 1e-10, "deviation {d:e}");
    }

    #[test]
    fn step_exp_is_unitary_and_composes(p in point(), a in 0.0f64..2.0, b in 0.0f64..2.0) {
        prop_assert!(step_exp(&p, a).unitarity_defect() < 1e-12);
        let joined = step_exp(&p, a) * step_exp(&p, b);
        prop_assert!(joined.max_diff(&step_exp(&p, a + b)) < 1e-12);
        prop_assert!((step_exp(&p, a) * step_exp(&p, -a)).max_diff(&CMat::identity(4)) < 1e-12);
    }

    #[test]
    fn fidelity_ignores_global_phase(alpha in 0.0f64..6.3, p in point(), dt in 0.1f64..2.0) {
        let v = step_exp(&p, dt);
        let target = holonomy_target(FRAC_PI_2);
        let a = ChannelEstimate::from_propagators(vec![v], 0, 1).unwrap();
        let b = ChannelEstimate::from_propagators(vec![v.scale(C64::from_polar(1.0, alpha))], 0, 1).unwrap();
        let (fa, fb) = (average_gate_fidelity(&a, &target).f, average_gate_fidelity(&b, &target).f);
        prop_assert!((fa - fb).abs() < 1e-12);
    }

    #[test]
    fn solid_angle_flips_with_orientation(theta in 0.1f64..1.4, n in 3usize..40) {
        // Circle of constant polar angle: area 2π(1 − cos ϑ) (not the small-circle
        // polygon, which has geodesic edges; compare both orientations instead).
        let pts: Vec<ParamPoint> = (0..n)
            .map(|i| polar_to_cartesian(1.0, theta, std::f64::consts::TAU * i as f64 / n as f64))
            .collect();
        let w = solid_angle(&pts).unwrap();
        let mut rev = pts.clone();
        rev.reverse();
        prop_assert!((w + solid_angle(&rev).unwrap()).abs() < 1e-12);
        prop_assert!(w > 0.0 && w < std::f64::consts::TAU * (1.0 - theta.cos()) + 1e-12);
    }
}

#[test]
fn on_sphere_spectrum_is_two_dark_and_two_bright() {
    for k in 0..50 {
        let r = 0.3 + 0.05 * k as f64;
        let p = polar_to_cartesian(r, 0.13 * k as f64, 0.29 * k as f64);
        let mut ev: Vec<f64> = SymmetricEigen::new(to_na(&hamiltonian(&p)))
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(ev[0], -r, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[2], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[3], r, epsilon = 1e-12);
    }
}

#[test]
fn north_pole_squared_hamiltonian() {
    // H at (Ω, 0, 0) squares to Ω²(|0⟩⟨0| + |e⟩⟨e|).
    let h = hamiltonian(&ParamPoint::real(1.7, 0.0, 0.0));
    let h2 = h * h;
    let mut expect = CMat::zeros(4);
    expect[(0, 0)] = C64::new(1.7f64.powi(2), 0.0);
    expect[(3, 3)] = C64::new(1.7f64.powi(2), 0.0);
    assert!(h2.max_diff(&expect) < 1e-14);
}
