use std::f64::consts::FRAC_1_SQRT_2;
use std::time::Instant;

use ouqubits_core::oracles::OuProcess;
use ouqubits_core::{
    build_ewl, embed, evolve_analytic, evolve_montecarlo_at, sample_ou_path, EwlSpec, Family, McSettings, ModelParams,
};

#[test]
fn ou_ensemble_moments() {
    let p = ModelParams::with_ratio(0.0, 0.1).unwrap();
    let var0 = OuProcess::new(&p).stationary_variance();
    let n = 100_000u64;
    // Grid step 1/γ = 10, so samples 1 and 2 are one correlation time apart.
    let (mut m1, mut cov, mut v1) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let path = sample_ou_path(&p, 20.0, 10.0, 2024, i).unwrap();
        let (x, y) = (path.omega_a[1], path.omega_a[2]);
        m1 += x;
        cov += x * y;
        v1 += x * x;
    }
    let nf = n as f64;
    assert!((m1 / nf).abs() < 4.0 * (var0 / nf).sqrt());
    let want = var0 * (-1.0f64).exp();
    // The product of two unit-variance normals has variance at most 2.
    let tol = 4.0 * var0 * (2.0 / nf).sqrt();
    assert!((cov / nf - want).abs() < tol, "cov {} want {want}", cov / nf);
    assert!((v1 / nf - var0).abs() < tol);
}

fn assert_within_statistics(est: &ouqubits_core::McEstimate, exact: &ouqubits_core::DensityMatrix, floor: f64) {
    for i in 0..4 {
        for j in 0..4 {
            let d = (est.mean.get(i, j) - exact.get(i, j)).norm();
            let tol = (3.0 * est.std_err[(i, j)]).max(floor).max(1e-12);
            assert!(
                d <= tol,
                "t={} ({i},{j}): |Δ|={d:e}, se={:e}",
                est.t,
                est.std_err[(i, j)]
            );
        }
    }
}

#[test]
fn monte_carlo_reproduces_uncoupled_master_equation() {
    // Without coupling the noise commutes with the Hamiltonian and the
    // master equation is exact.
    let p = ModelParams::with_ratio(0.0, 0.1).unwrap();
    let rho0 = embed(&build_ewl(EwlSpec::new(Family::Phi, 1.0, FRAC_1_SQRT_2).unwrap()).unwrap());
    let settings = McSettings {
        n_traj: 4000,
        dt: 1e-3,
        seed: 17,
    };
    let start = Instant::now();
    let est = evolve_montecarlo_at(&rho0, &p, &[1.0, 3.0, 6.0], &settings).unwrap();
    eprintln!("{} trajectories in {:?}", settings.n_traj, start.elapsed());
    for e in &est {
        assert_within_statistics(e, &evolve_analytic(&rho0, &p, e.t).unwrap(), 0.0);
    }
}

#[test]
fn monte_carlo_tracks_master_equation_for_fast_noise() {
    let p = ModelParams::with_ratio(0.5, 10.0).unwrap();
    let rho0 = embed(&build_ewl(EwlSpec::new(Family::Phi, 1.0, FRAC_1_SQRT_2).unwrap()).unwrap());
    let settings = McSettings {
        n_traj: 4000,
        dt: 1e-3,
        seed: 5,
    };
    for e in &evolve_montecarlo_at(&rho0, &p, &[1.0, 3.0, 6.0], &settings).unwrap() {
        assert_within_statistics(e, &evolve_analytic(&rho0, &p, e.t).unwrap(), 0.02);
    }
}

#[test]
fn slow_noise_with_coupling_departs_from_master_equation() {
    // The exchange gap 4J shields the symmetric Bell state from slow
    // frequency noise, which the time-local master equation does not
    // capture: the trajectory average keeps ρ23 near 1/2 while the
    // master equation decays it as e^{-2f}.
    let p = ModelParams::with_ratio(0.5, 0.1).unwrap();
    let rho0 = embed(&build_ewl(EwlSpec::new(Family::Phi, 1.0, FRAC_1_SQRT_2).unwrap()).unwrap());
    let settings = McSettings {
        n_traj: 2000,
        dt: 1e-3,
        seed: 17,
    };
    let est = evolve_montecarlo_at(&rho0, &p, &[6.0], &settings).unwrap();
    let me = evolve_analytic(&rho0, &p, 6.0).unwrap();
    let mc = est[0].mean.get(1, 2).re;
    assert!(mc > 0.45, "{mc}");
    assert!(mc - me.get(1, 2).re > 0.3);
}

#[test]
fn mixed_initial_state_is_averaged_over_its_eigenbasis() {
    let p = ModelParams::with_ratio(0.0, 1.0).unwrap();
    let rho0 = embed(&build_ewl(EwlSpec::new(Family::Phi, 0.6, 0.9).unwrap()).unwrap());
    let settings = McSettings {
        n_traj: 2000,
        dt: 2e-3,
        seed: 3,
    };
    let est = evolve_montecarlo_at(&rho0, &p, &[0.0, 2.0], &settings).unwrap();
    assert!(est[0].mean.max_abs_diff(&rho0) < 1e-12);
    assert_within_statistics(&est[1], &evolve_analytic(&rho0, &p, 2.0).unwrap(), 0.0);
}
