use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::*;
use crate::model::{fractional_coefficient, quadratic_coefficient};
use crate::spectral::first_derivative;

fn params(s: f64, chi: f64) -> ModelParams {
    ModelParams {
        coupling_chi: chi,
        ..ModelParams::default().with_exponent(s)
    }
}

fn grid(l: f64, m: usize) -> Arc<SpectralGrid> {
    SpectralGrid::shared(l, m).unwrap()
}

fn gaussian(g: &Arc<SpectralGrid>, x0: f64, width: f64, k0: f64, amp: f64) -> Field {
    Field::from_fn(g.clone(), |x| {
        let d = x - x0;
        Complex64::from_polar(amp * (-d * d / (2.0 * width * width)).exp(), k0 * x)
    })
}

/// Phase velocity of a single mode measured by unwrapping its projection.
fn measured_frequency(solver: &ContinuumSolver, psi: Field, k0: f64, steps: usize) -> f64 {
    let mut st = ContinuumState::from_psi(psi);
    let project = |f: &Field| -> Complex64 {
        f.values()
            .iter()
            .zip(f.grid().positions())
            .map(|(v, x)| v * Complex64::from_polar(1.0, -k0 * x))
            .sum()
    };
    let mut phase = 0.0;
    let mut last = project(&st.psi).arg();
    for _ in 0..steps {
        st = solver.step(&st).unwrap();
        let a = project(&st.psi).arg();
        let mut d = a - last;
        while d > PI {
            d -= 2.0 * PI;
        }
        while d < -PI {
            d += 2.0 * PI;
        }
        phase += d;
        last = a;
    }
    -phase / (steps as f64 * solver.dt())
}

#[test]
fn kind_exponent_compatibility() {
    use ScenarioKind::*;
    assert!(Nlfse.check_exponent(2.5).is_ok());
    assert!(matches!(Nlfse.check_exponent(3.0), Err(Error::Incompatible { .. })));
    assert!(FractionalZakharov.check_exponent(2.0).is_err());
    assert!(HilbertNls.check_exponent(2.0).is_ok());
    assert!(HilbertZakharov.check_exponent(2.1).is_err());
    assert!(ClassicalNls.check_exponent(3.0).is_err());
    assert!(ClassicalNls.check_exponent(4.0).is_ok());
    assert!(GeneralNonlocal.check_exponent(1.5).is_ok());
    assert!(matches!(GeneralNonlocal.check_exponent(1.0), Err(Error::SumDivergence(_))));
}

#[test]
fn nonlinearity_examples() {
    let mut p = params(2.5, 0.0);
    assert_eq!(effective_nonlinearity(&p, Coefficients::Corrected), 0.0);
    p.coupling_chi = 1.0;
    p.elasticity = 2.0;
    assert_eq!(effective_nonlinearity(&p, Coefficients::Corrected), 1.0);
    assert_eq!(effective_nonlinearity(&p, Coefficients::Literal), 1.0);
    p.coupling_chi = 3.0;
    assert_eq!(effective_nonlinearity(&p, Coefficients::Corrected), 9.0);
    assert_eq!(effective_nonlinearity(&p, Coefficients::Literal), 3.0);
}

#[test]
fn stationary_sigma_examples() {
    let g = grid(40.0, 128);
    let p = params(2.5, 0.7);
    let uniform = Field::from_real(g.clone(), |_| 0.3);
    assert!(stationary_sigma(&uniform, &p).values().iter().all(|v| v.norm() < 1e-15));
    assert!(stationary_sigma(&gaussian(&g, 0.0, 2.0, 0.0, 1.0), &params(2.5, 0.0))
        .values()
        .iter()
        .all(|v| v.norm() == 0.0));

    let psi = gaussian(&g, 1.0, 2.0, 0.4, 1.3);
    let sigma = stationary_sigma(&psi, &p);
    let rho = Field::from_parts(
        g.clone(),
        psi.values().iter().map(|v| Complex64::new(v.norm_sqr(), 0.0)).collect(),
    );
    let ds = first_derivative(&sigma);
    let dr = first_derivative(&rho);
    for (a, b) in ds.values().iter().zip(dr.values()) {
        assert!((p.elasticity * a + 2.0 * p.coupling_chi * b).norm() < 1e-10);
    }
    // inverted bump
    let centre = g.points() / 2 + 3;
    assert!(sigma.values()[centre].re < 0.0);
}

#[test]
fn linear_frequencies_are_exact() {
    let g = grid(2.0 * PI * 32.0, 256);
    let k0 = 5.0 / 32.0;
    let plane = Field::from_fn(g.clone(), |x| Complex64::from_polar(1.0, k0 * x));

    let p = params(2.5, 0.0);
    let spec = ScenarioSpec::new(ScenarioKind::FractionalZakharov);
    let solver = ContinuumSolver::new(p, spec, g.clone(), 0.05).unwrap();
    let expected = fractional_coefficient(&p).unwrap() * k0.powf(1.5) / p.hbar;
    let w = measured_frequency(&solver, plane.clone(), k0, 100);
    assert!(((w - expected) / expected).abs() < 1e-10, "{w} vs {expected}");

    let p2 = params(2.0, 0.0);
    let spec = ScenarioSpec::new(ScenarioKind::HilbertNls);
    let solver = ContinuumSolver::new(p2, spec, g.clone(), 0.05).unwrap();
    let expected = PI * p2.interaction_j * k0 / p2.hbar;
    let w = measured_frequency(&solver, plane, k0, 100);
    assert!(((w - expected) / expected).abs() < 1e-10, "{w} vs {expected}");
}

#[test]
fn gauge_shift_is_a_global_phase() {
    let g = grid(64.0, 128);
    let p = params(2.5, 0.4);
    let psi = gaussian(&g, 0.0, 4.0, 0.3, 1.0);
    let mut spec = ScenarioSpec::new(ScenarioKind::FractionalZakharov);
    let plain = ContinuumSolver::new(p, spec, g.clone(), 0.05).unwrap();
    spec.lambda_shift = 0.8;
    let shifted = ContinuumSolver::new(p, spec, g.clone(), 0.05).unwrap();
    let a = plain.advance(&ContinuumState::from_psi(psi.clone()), 200).unwrap();
    let b = shifted.advance(&ContinuumState::from_psi(psi), 200).unwrap();
    let phase = Complex64::from_polar(1.0, 0.8 * b.time / p.hbar);
    for (x, y) in a.psi.values().iter().zip(b.psi.values()) {
        assert!((x - y * phase).norm() < 1e-10);
    }
}

#[test]
fn zero_state_stays_zero() {
    let g = grid(32.0, 64);
    for kind in [ScenarioKind::FractionalZakharov, ScenarioKind::Nlfse] {
        let solver =
            ContinuumSolver::new(params(2.5, 0.5), ScenarioSpec::new(kind), g.clone(), 0.05).unwrap();
        let st = solver.advance(&ContinuumState::from_psi(Field::zeros(g.clone())), 10).unwrap();
        assert!(st.psi.values().iter().chain(st.sigma.values()).all(|v| v.norm() == 0.0));
        let o = solver.observables(&st).unwrap();
        assert_eq!((o.norm, o.hamiltonian, o.momentum, o.max_density), (0.0, 0.0, 0.0, 0.0));
    }
}

#[test]
fn free_evolution_keeps_spectral_density() {
    let g = grid(64.0, 128);
    let p = params(2.5, 0.0);
    let mut spec = ScenarioSpec::new(ScenarioKind::Nlfse);
    spec.nonlinearity_g = Some(0.0);
    let solver = ContinuumSolver::new(p, spec, g.clone(), 0.1).unwrap();
    let st0 = ContinuumState::from_psi(gaussian(&g, 0.0, 3.0, 0.5, 1.0));
    let st = solver.advance(&st0, 300).unwrap();
    let dens = |f: &Field| -> Vec<f64> {
        crate::spectral::forward_transform(f).iter().map(|c| c.norm_sqr()).collect()
    };
    let (a, b) = (dens(&st0.psi), dens(&st.psi));
    let scale = a.iter().cloned().fold(0.0, f64::max);
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-12 * scale);
    }
}

#[test]
fn norm_is_conserved_in_every_scenario() {
    let g = grid(128.0, 128);
    for kind in ScenarioKind::ALL {
        let s = match kind {
            ScenarioKind::HilbertZakharov | ScenarioKind::HilbertNls => 2.0,
            ScenarioKind::ClassicalNls => 4.0,
            _ => 2.5,
        };
        let p = params(s, 0.6);
        let solver = ContinuumSolver::new(p, ScenarioSpec::new(kind), g.clone(), 0.1).unwrap();
        let st0 = ContinuumState::from_psi(gaussian(&g, 0.0, 5.0, 0.3, 0.8));
        let n0 = st0.norm();
        let st = solver.advance(&st0, 1000).unwrap();
        assert!(((st.norm() - n0) / n0).abs() < 1e-12, "{kind:?}");
        assert!(st.sigma.max_abs_imag() < 1e-10 && st.sigma_rate.max_abs_imag() < 1e-10);
    }
}

#[test]
fn sound_pulse_travels_at_sound_speed() {
    let g = grid(400.0, 1024);
    let p = ModelParams {
        mass: 1.0,
        elasticity: 2.25,
        ..params(2.5, 0.5)
    };
    let spec = ScenarioSpec::new(ScenarioKind::FractionalZakharov);
    let dt = 0.04;
    let solver = ContinuumSolver::new(p, spec, g.clone(), dt).unwrap();
    let sigma = Field::from_real(g.clone(), |x| (-x * x / 8.0).exp());
    let st0 = ContinuumState::new(Field::zeros(g.clone()), sigma, Field::zeros(g.clone())).unwrap();
    let steps = 1000;
    let st = solver.advance(&st0, steps).unwrap();
    // right-moving peak, refined by a parabola through the three largest samples
    let vals = st.sigma.real_part();
    let half = g.points() / 2;
    let (i, _) = vals[half..]
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |(bi, bv), (i, v)| if *v > bv { (i, *v) } else { (bi, bv) });
    let i = i + half;
    let (a, b, c) = (vals[i - 1], vals[i], vals[i + 1]);
    let offset = 0.5 * (a - c) / (a - 2.0 * b + c);
    let x = g.position(i) + offset * g.dx();
    let speed = x / (steps as f64 * dt);
    assert!((speed / p.sound_speed() - 1.0).abs() < 0.02, "{speed}");
}

#[test]
fn free_phonon_energy_exact_but_not_with_verlet() {
    let g = grid(100.0, 256);
    let p = params(2.5, 0.5);
    let sigma = Field::from_real(g.clone(), |x| (-x * x / 4.0).exp() * (1.0 + 0.3 * x.sin()));
    // sigma_t = d/dx xi_t has zero mean on the ring
    let rate = Field::from_real(g.clone(), |x| -0.2 * (x - 3.0) / 4.5 * (-(x - 3.0).powi(2) / 9.0).exp());
    let st0 = ContinuumState::new(Field::zeros(g.clone()), sigma, rate).unwrap();
    let mut spec = ScenarioSpec::new(ScenarioKind::FractionalZakharov);
    let dt = 0.5 / (p.sound_speed() * g.k_max());
    let exact = ContinuumSolver::new(p, spec, g.clone(), dt).unwrap();
    let e0 = exact.observables(&st0).unwrap().hamiltonian;
    let e1 = exact.observables(&exact.advance(&st0, 2000).unwrap()).unwrap().hamiltonian;
    assert!(((e1 - e0) / e0).abs() < 1e-8, "{e0} {e1}");
    spec.phonon_integrator = PhononIntegrator::VelocityVerlet;
    let vv = ContinuumSolver::new(p, spec, g.clone(), dt).unwrap();
    let e2 = vv.observables(&vv.advance(&st0, 2000).unwrap()).unwrap().hamiltonian;
    assert!(((e2 - e0) / e0).abs() > 1e-6, "{e0} {e2}");
}

#[test]
fn zakharov_energy_drift_is_second_order() {
    let g = grid(64.0, 128);
    let p = params(2.5, 0.8);
    let spec = ScenarioSpec::new(ScenarioKind::FractionalZakharov);
    let st0 = ContinuumState::from_psi(gaussian(&g, 0.0, 3.0, 0.4, 1.0));
    let drift = |dt: f64, steps: usize| {
        let s = ContinuumSolver::new(p, spec, g.clone(), dt).unwrap();
        let e0 = s.observables(&st0).unwrap().hamiltonian;
        let e = s.observables(&s.advance(&st0, steps).unwrap()).unwrap().hamiltonian;
        (e - e0).abs()
    };
    let coarse = drift(0.04, 250);
    let fine = drift(0.02, 500);
    assert!(coarse / fine > 3.5, "{coarse} {fine}");
}

#[test]
fn step_guard_and_kind_checks() {
    let g = grid(64.0, 128);
    let p = params(2.5, 0.5);
    let spec = ScenarioSpec::new(ScenarioKind::FractionalZakharov);
    assert!(matches!(
        ContinuumSolver::new(p, spec, g.clone(), 1.0),
        Err(Error::StepTooLarge { .. })
    ));
    let st = ContinuumState::from_psi(Field::zeros(g.clone()));
    assert!(step_nlfse(&st, &p, &spec, 0.05).is_err());
    assert!(step_zakharov(&st, &p, &spec, 0.05).is_ok());
    let nls = ScenarioSpec::new(ScenarioKind::Nlfse);
    assert!(step_zakharov(&st, &p, &nls, 0.05).is_err());
    assert!(matches!(
        ContinuumSolver::new(params(3.0, 0.5), nls, g, 0.05),
        Err(Error::Incompatible { .. })
    ));
}

#[test]
fn observables_of_a_plane_wave() {
    let g = grid(2.0 * PI * 8.0, 64);
    let k0 = 3.0 / 8.0;
    let a = 0.7;
    let psi = Field::from_fn(g.clone(), |x| Complex64::from_polar(a, k0 * x));
    let p = params(2.5, 0.0);
    let o = observables(&ContinuumState::from_psi(psi), &p, &ScenarioSpec::new(ScenarioKind::Nlfse)).unwrap();
    assert!((o.norm - a * a * g.length()).abs() < 1e-12);
    assert!((o.momentum - k0 * a * a * g.length()).abs() < 1e-11);
    assert!((o.max_density - a * a).abs() < 1e-15);
}

#[test]
fn classical_nls_soliton_keeps_its_shape() {
    let p = params(4.0, 1.0);
    let a = quadratic_coefficient(&p);
    let spec = ScenarioSpec::new(ScenarioKind::ClassicalNls);
    let gnl = spec.nonlinearity(&p);
    let eta = 1.0;
    let beta = eta * (gnl / (2.0 * a)).sqrt();
    let g = grid(60.0, 512);
    let psi = Field::from_real(g.clone(), |x| eta / (beta * x).cosh());
    let period = 2.0 * PI * p.hbar * 2.0 / (gnl * eta * eta);
    let steps = 2000;
    let solver = ContinuumSolver::new(p, spec, g.clone(), period / steps as f64).unwrap();
    let st = solver.advance(&ContinuumState::from_psi(psi.clone()), steps).unwrap();
    let err = st
        .psi
        .values()
        .iter()
        .zip(psi.values())
        .fold(0.0f64, |m, (x, y)| m.max((x.norm() - y.norm()).abs()));
    assert!(err < 1e-3, "{err}");
}

#[test]
fn exact_and_asymptotic_dispersion_agree_for_long_waves() {
    let p = params(2.5, 0.0);
    let g = grid(1024.0, 1024);
    // spectral width 1/60 keeps the packet well inside |k| <= 0.05
    let psi = gaussian(&g, 0.0, 60.0, 0.0, 1.0);
    let mut spec = ScenarioSpec::new(ScenarioKind::GeneralNonlocal);
    let exact = ContinuumSolver::new(p, spec, g.clone(), 0.1).unwrap();
    spec.dispersion_mode = DispersionMode::Asymptotic;
    let asym = ContinuumSolver::new(p, spec, g.clone(), 0.1).unwrap();
    let st0 = ContinuumState::from_psi(psi);
    let a = exact.advance(&st0, 100).unwrap();
    let b = asym.advance(&st0, 100).unwrap();
    let num: f64 = a.psi.values().iter().zip(b.psi.values()).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = a.psi.values().iter().map(|x| x.norm_sqr()).sum();
    assert!((num / den).sqrt() < 0.01, "{}", (num / den).sqrt());
}
