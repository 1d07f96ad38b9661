//! Acceptance criteria 1-13. Each test prints one `PASS`/`FAIL` line to the
//! process stdout (not the harness capture buffer) before asserting.

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use exciton_core::config::parse_config;
use exciton_core::continuum::{
    effective_nonlinearity, stationary_sigma, Coefficients, ContinuumSolver, ContinuumState,
    ScenarioKind, ScenarioSpec,
};
use exciton_core::lattice::{LatticeOptions, LatticeState, LatticeSystem, LatticeTopology};
use exciton_core::model::{dispersion_at_zero, lattice_dispersion, spectral_gap, DEFAULT_SUM_TOL};
use exciton_core::runner::{compare, run, CompareOptions};
use exciton_core::spectral::{
    exact_gap_operator, first_derivative, hilbert_transform, hilbert_transform_unnormalized,
    inverse_transform, riesz_derivative, second_derivative, Field, SpectralGrid,
};
use exciton_core::traveling::{
    fgl_residual_shifted, gamma_coefficient, sigma_profile, solve_profile_with, ProfileDispersion,
    SolverMethod, SolverOptions, TravelingWaveProblem,
};
use exciton_core::ModelParams;

/// `pi / (Gamma(s) sin(pi (s - 1) / 2))` with `J = 1`, evaluated independently.
const D_2_2: f64 = 2.9980563908116564;
const D_2_5: f64 = 3.342171032841333;
const D_2_8: f64 = 6.064099760540398;

struct Check {
    passed: bool,
    detail: String,
}

impl Check {
    fn new() -> Self {
        Self {
            passed: true,
            detail: String::new(),
        }
    }

    fn item(&mut self, ok: bool, text: String) {
        self.passed &= ok;
        if !self.detail.is_empty() {
            self.detail.push_str("; ");
        }
        self.detail.push_str(&text);
        if !ok {
            self.detail.push_str(" [miss]");
        }
    }
}

fn report(n: u32, name: &str, c: Check) {
    let line = format!(
        "\ncriterion {n:>2} {} {name}: {}\n",
        if c.passed { "PASS" } else { "FAIL" },
        c.detail
    );
    // a fresh handle on fd 1 is not intercepted by the harness
    match fs::OpenOptions::new().append(true).open("/dev/stdout") {
        Ok(mut out) => out.write_all(line.as_bytes()).unwrap(),
        Err(_) => print!("{line}"),
    }
    assert!(c.passed, "{}", line.trim_end());
}

fn params(s: f64, chi: f64) -> ModelParams {
    ModelParams {
        coupling_chi: chi,
        ..ModelParams::default().with_exponent(s)
    }
}

fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Least-squares line through `(ln k, ln G)`: returns (slope, exp(intercept)).
fn power_fit(s: f64) -> (f64, f64) {
    let p = params(s, 0.0);
    let n = 41;
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let lk = (1e-3f64).ln() + (10f64).ln() * i as f64 / (n - 1) as f64;
            let g = spectral_gap(lk.exp(), &p, DEFAULT_SUM_TOL).unwrap();
            (lk, g.ln())
        })
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, (my - slope * mx).exp())
}

#[test]
fn criterion_01_dispersion_asymptotics() {
    let mut c = Check::new();
    for (s, d) in [(2.2, D_2_2), (2.5, D_2_5), (2.8, D_2_8)] {
        let (slope, pref) = power_fit(s);
        let es = (slope - (s - 1.0)) / (s - 1.0);
        let ep = (pref - d) / d;
        c.item(es.abs() < 0.01, format!("s={s} exponent {slope:.6} ({:+.3}%)", 100.0 * es));
        c.item(ep.abs() < 0.02, format!("s={s} prefactor {pref:.6} vs {d:.6} ({:+.3}%)", 100.0 * ep));
    }
    let (_, pref) = power_fit(2.001);
    let e = (pref - PI) / PI;
    c.item(e.abs() < 0.005, format!("s=2.001 prefactor {pref:.6} vs pi ({:+.3}%)", 100.0 * e));
    let k = 1e-3;
    let ratio = spectral_gap(k, &params(4.0, 0.0), DEFAULT_SUM_TOL).unwrap() / (k * k);
    let target = PI * PI / 12.0;
    let e = (ratio - target) / target;
    c.item(e.abs() < 0.01, format!("s=4 G/k^2 {ratio:.7} vs zeta(2)/2 {target:.7} ({:+.1}%)", 100.0 * e));
    report(1, "dispersion asymptotics", c);
}

#[test]
fn criterion_02_brute_force_dispersion() {
    let mut c = Check::new();
    let g = spectral_gap(PI, &params(4.0, 0.0), DEFAULT_SUM_TOL).unwrap();
    let exact = PI.powi(4) / 45.0 + 7.0 * PI.powi(4) / 360.0;
    // independent brute force: 2 sum (1 - (-1)^n) / n^4 = 4 sum_odd n^-4, tail < 2 N^-3 / 3
    let brute: f64 = 4.0 * (0..2_000_000u64).map(|i| ((2 * i + 1) as f64).powi(-4)).sum::<f64>();
    c.item((g - exact).abs() < 1e-8, format!("G(pi) = {g:.12} vs {exact:.12}"));
    c.item((brute - exact).abs() < 1e-8, format!("direct sum {brute:.12}"));
    report(2, "brute-force dispersion oracle", c);
}

fn lattice_drifts(sys: &LatticeSystem, st0: &LatticeState, dt: f64, steps: usize) -> (f64, f64) {
    let n0 = st0.norm();
    let e0 = sys.total_energy(st0).unwrap();
    let mut st = st0.clone();
    for _ in 0..steps {
        st = sys.step_rk4(&st, dt).unwrap();
    }
    (
        ((st.norm() - n0) / n0).abs(),
        ((sys.total_energy(&st).unwrap() - e0) / e0).abs(),
    )
}

#[test]
fn criterion_03_lattice_conservation() {
    let mut p = params(2.5, 0.5);
    let j0 = dispersion_at_zero(&p).unwrap();
    p.site_energy = j0;
    let sites = 256;
    let sys = LatticeSystem::new(p, LatticeTopology::default(), sites, LatticeOptions::default()).unwrap();
    let st0 = LatticeState::gaussian_packet(sites, 128.0, 10.0, 0.3, 1.0).unwrap();
    let dt = 0.1 * p.hbar / p.site_energy.abs().max(j0);
    let (dn, de) = lattice_drifts(&sys, &st0, dt, 10_000);
    let (dn2, de2) = lattice_drifts(&sys, &st0, dt / 2.0, 20_000);
    let mut c = Check::new();
    c.item(dn < 1e-8, format!("norm drift {dn:.2e}"));
    c.item(de < 1e-6, format!("energy drift {de:.2e}"));
    c.item(dn / dn2 >= 8.0, format!("norm ratio {:.1}", dn / dn2));
    c.item(de / de2 >= 8.0, format!("energy ratio {:.1}", de / de2));
    report(3, "lattice conservation", c);
}

#[test]
fn criterion_04_lattice_discrete_dispersion() {
    let p = ModelParams {
        site_energy: 5.0,
        ..params(2.5, 0.0)
    };
    let sites = 64;
    let sys = LatticeSystem::new(p, LatticeTopology::default(), sites, LatticeOptions::default()).unwrap();
    let mut c = Check::new();
    let dt = 5e-4;
    let steps = 4000;
    for q in [1usize, 5, 12, 20, 32] {
        let k = 2.0 * PI * q as f64 / sites as f64;
        let psi = (0..sites).map(|n| Complex64::from_polar(0.125, k * n as f64)).collect();
        let mut st = LatticeState::from_psi(psi).unwrap();
        let project = |st: &LatticeState| -> Complex64 {
            st.psi
                .iter()
                .enumerate()
                .map(|(n, v)| v * Complex64::from_polar(1.0, -k * n as f64))
                .sum()
        };
        let mut last = project(&st);
        let mut phase = 0.0;
        for _ in 0..steps {
            st = sys.step_rk4(&st, dt).unwrap();
            let now = project(&st);
            phase += (now / last).arg();
            last = now;
        }
        let w = -phase / (steps as f64 * dt);
        let expected = (p.site_energy - lattice_dispersion(k, &p, DEFAULT_SUM_TOL).unwrap()) / p.hbar;
        let e = (w - expected) / expected;
        c.item(e.abs() < 1e-10, format!("k={k:.4} rel {e:.1e}"));
    }
    report(4, "lattice discrete dispersion", c);
}

/// Frequency of mode `k0` from the unwrapped phase of its projection.
fn continuum_frequency(solver: &ContinuumSolver, k0: f64, steps: usize) -> f64 {
    let g = solver.grid().clone();
    let mut st = ContinuumState::from_psi(Field::from_fn(g.clone(), |x| Complex64::from_polar(1.0, k0 * x)));
    let project = |f: &Field| -> Complex64 {
        f.values()
            .iter()
            .zip(f.grid().positions())
            .map(|(v, x)| v * Complex64::from_polar(1.0, -k0 * x))
            .sum()
    };
    let mut last = project(&st.psi);
    let mut phase = 0.0;
    for _ in 0..steps {
        st = solver.step(&st).unwrap();
        let now = project(&st.psi);
        phase += (now / last).arg();
        last = now;
    }
    -phase / (steps as f64 * solver.dt())
}

#[test]
fn criterion_05_continuum_linear_dispersion() {
    let g = SpectralGrid::shared(2.0 * PI * 32.0, 256).unwrap();
    let mut c = Check::new();
    let p = params(2.5, 0.0);
    let frac = ContinuumSolver::new(p, ScenarioSpec::new(ScenarioKind::FractionalZakharov), g.clone(), 0.05).unwrap();
    let p2 = params(2.0, 0.0);
    let hil = ContinuumSolver::new(p2, ScenarioSpec::new(ScenarioKind::HilbertNls), g.clone(), 0.05).unwrap();
    for m in [1.0, 5.0, 17.0] {
        let k = m / 32.0;
        let w = continuum_frequency(&frac, k, 100);
        let expected = D_2_5 * k.powf(1.5);
        let e = (w - expected) / expected;
        c.item(e.abs() < 1e-10, format!("fractional k={k:.4} rel {e:.1e}"));
        let w = continuum_frequency(&hil, k, 100);
        let expected = PI * k;
        let e = (w - expected) / expected;
        c.item(e.abs() < 1e-10, format!("hilbert k={k:.4} rel {e:.1e}"));
    }
    report(5, "continuum linear dispersion", c);
}

#[test]
fn criterion_06_sound_speed() {
    let g = SpectralGrid::shared(400.0, 1024).unwrap();
    let p = ModelParams {
        elasticity: 2.25,
        ..params(2.5, 0.5)
    };
    let dt = 0.04;
    let steps = 1000;
    let solver = ContinuumSolver::new(p, ScenarioSpec::new(ScenarioKind::FractionalZakharov), g.clone(), dt).unwrap();
    let sigma = Field::from_real(g.clone(), |x| (-x * x / 8.0).exp());
    let st0 = ContinuumState::new(Field::zeros(g.clone()), sigma, Field::zeros(g.clone())).unwrap();
    let st = solver.advance(&st0, steps).unwrap();
    let vals = st.sigma.real_part();
    let half = g.points() / 2;
    let i = half
        + vals[half..]
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
    let (a, b, cc) = (vals[i - 1], vals[i], vals[i + 1]);
    let x = g.position(i) + 0.5 * (a - cc) / (a - 2.0 * b + cc) * g.dx();
    let speed = x / (steps as f64 * dt);
    let vs = (p.elasticity / p.mass).sqrt();
    let mut c = Check::new();
    let e = speed / vs - 1.0;
    c.item(e.abs() < 0.02, format!("peak speed {speed:.5} vs {vs:.5} ({:+.3}%)", 100.0 * e));
    report(6, "Zakharov sound speed", c);
}

#[test]
fn criterion_07_split_step_norm() {
    let g = SpectralGrid::shared(128.0, 128).unwrap();
    let mut c = Check::new();
    for kind in ScenarioKind::ALL {
        let s = match kind {
            ScenarioKind::HilbertZakharov | ScenarioKind::HilbertNls => 2.0,
            ScenarioKind::ClassicalNls => 4.0,
            _ => 2.5,
        };
        let solver = ContinuumSolver::new(params(s, 0.6), ScenarioSpec::new(kind), g.clone(), 0.1).unwrap();
        let psi = Field::from_fn(g.clone(), |x| Complex64::from_polar(0.8 * (-x * x / 50.0).exp(), 0.3 * x));
        let st0 = ContinuumState::from_psi(psi);
        let n0 = st0.norm();
        let st = solver.advance(&st0, 10_000).unwrap();
        let d = ((st.norm() - n0) / n0).abs();
        c.item(d < 1e-12, format!("{} {d:.1e}", kind.name()));
    }
    report(7, "split-step norm exactness", c);
}

#[test]
fn criterion_08_nls_soliton() {
    let p = params(4.0, 1.0);
    let spec = ScenarioSpec::new(ScenarioKind::ClassicalNls);
    let g = SpectralGrid::shared(60.0, 512).unwrap();
    let gnl = effective_nonlinearity(&p, Coefficients::Corrected);
    // quadratic coefficient J zeta(2) / 2 of the reduced model
    let a = PI * PI / 12.0;
    let eta = 1.0;
    let beta = eta * (gnl / (2.0 * a)).sqrt();
    let mu = gnl * eta * eta / 2.0;
    let phi = Field::from_real(g.clone(), |x| eta / (beta * x).cosh());
    let period = 2.0 * PI * p.hbar / mu;
    let steps = 2000;
    let solver = ContinuumSolver::new(p, spec, g.clone(), period / steps as f64).unwrap();

    // residual of the implemented linear operator on the stationary ansatz:
    // mu phi + Omega phi - g |phi|^2 phi = 0
    let lin = g.apply_table(phi.values(), solver.omega());
    let residual = phi
        .values()
        .iter()
        .zip(&lin)
        .map(|(f, l)| (mu * f + l - solver.nonlinearity() * f.norm_sqr() * f).norm())
        .fold(0.0, f64::max);
    let st = solver.advance(&ContinuumState::from_psi(phi.clone()), steps).unwrap();
    let shape = st
        .psi
        .values()
        .iter()
        .zip(phi.values())
        .map(|(x, y)| (x.norm() - y.norm()).abs())
        .fold(0.0, f64::max);
    let mut c = Check::new();
    c.item(residual < 1e-8, format!("ansatz residual {residual:.1e}"));
    c.item(shape < 1e-3, format!("shape error after one period {shape:.1e}"));
    report(8, "NLS soliton limit", c);
}

#[test]
fn criterion_09_operator_algebra() {
    let g = SpectralGrid::shared(256.0, 256).unwrap();
    let m = g.points();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut c = Check::new();
    let (mut hh, mut riesz2, mut imag) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..8 {
        let mut spec: Vec<Complex64> = (0..m)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        spec[0] = Complex64::new(0.0, 0.0);
        spec[m / 2] = Complex64::new(0.0, 0.0);
        let f = inverse_transform(&g, &spec).unwrap();
        let twice = hilbert_transform(&hilbert_transform(&f));
        hh = hh.max(
            twice
                .values()
                .iter()
                .zip(f.values())
                .map(|(a, b)| (a + b).norm())
                .fold(0.0, f64::max),
        );

        let samples: Vec<Complex64> = (0..m).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).collect();
        let real = Field::new(g.clone(), samples).unwrap();
        riesz2 = riesz2.max(riesz_derivative(&real, 2.0).unwrap().max_diff(&second_derivative(&real)));
        for out in [
            hilbert_transform(&real),
            hilbert_transform_unnormalized(&real),
            first_derivative(&real),
            second_derivative(&real),
            riesz_derivative(&real, 1.5).unwrap(),
            exact_gap_operator(&real, &params(2.5, 0.0)).unwrap(),
        ] {
            imag = imag.max(out.max_abs_imag());
        }
    }
    c.item(hh < 1e-12, format!("|HH f + f| {hh:.1e}"));
    c.item(riesz2 < 1e-12, format!("|R_2 f - f''| {riesz2:.1e}"));
    c.item(imag < 1e-12, format!("max imaginary residue {imag:.1e}"));
    report(9, "operator algebra", c);
}

#[test]
fn criterion_10_lattice_vs_continuum() {
    let o = CompareOptions::default();
    assert_eq!((o.sites, o.width, o.t_end, o.params.exponent_s), (1024, 50.0, 10.0, 2.5));
    let rows = compare(&o).unwrap();
    let worst = rows.iter().map(|r| r.distance).fold(0.0, f64::max);
    let mut c = Check::new();
    c.item(worst < 0.05, format!("max relative L2 distance {worst:.2e} up to t = {}", rows.last().unwrap().t));
    report(10, "lattice vs continuum", c);
}

/// `min_theta |a - e^{i theta} b| / |b|`.
fn phase_aligned_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let overlap: Complex64 = b.iter().zip(a).map(|(x, y)| x.conj() * y).sum();
    let rot = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { Complex64::new(1.0, 0.0) };
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - rot * y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

#[test]
fn criterion_11_traveling_waves() {
    let mut c = Check::new();

    // plane-wave branch: a^2 = (D q^{s-1} - hbar v q + mu) / (-gamma)
    let grid = SpectralGrid::shared(2.0 * PI * 16.0, 128).unwrap();
    let p = params(2.5, 0.7);
    let q: f64 = 0.25;
    for (v, mu, methods) in [
        (0.0, 0.05, &[SolverMethod::Petviashvili, SolverMethod::Newton][..]),
        (0.4, 0.0, &[SolverMethod::Newton][..]),
    ] {
        let problem = TravelingWaveProblem::new(p, v, grid.clone(), ProfileDispersion::Fractional).unwrap();
        let gamma = 2.0 * p.coupling_chi.powi(2) / (p.mass * (v * v - p.elasticity / p.mass));
        let a = ((D_2_5 * q.powf(1.5) - v * q + mu) / -gamma).sqrt();
        let seed = Field::from_fn(grid.clone(), |x| Complex64::from_polar(0.9 * a, q * x));
        for &method in methods {
            let opts = SolverOptions {
                method,
                ..SolverOptions::default()
            };
            let sol = solve_profile_with(&problem, &seed, mu, &opts).unwrap();
            let e = (max_abs(sol.profile.values()) - a).abs();
            c.item(e < 1e-10, format!("plane wave v={v} {method:?} amp err {e:.1e}"));
        }
    }

    // localized profiles
    let length = 120.0;
    let grid = SpectralGrid::shared(length, 512).unwrap();
    let guess = Field::from_real(grid.clone(), |x| 1.0 / (x / 2.0).cosh());
    let v = 0.3;
    let mu = 0.3;
    let pf = params(2.5, 1.0);
    let frac = TravelingWaveProblem::new(pf, v, grid.clone(), ProfileDispersion::Fractional).unwrap();
    let sol = solve_profile_with(&frac, &guess, mu, &SolverOptions::default()).unwrap();
    let r = max_abs(fgl_residual_shifted(&sol.profile, &frac, mu).values());
    c.item(r < 1e-8, format!("fractional profile residual {r:.1e}"));
    let hil = TravelingWaveProblem::new(params(2.0, 1.0), v, grid.clone(), ProfileDispersion::Hilbert).unwrap();
    let hsol = solve_profile_with(&hil, &guess, mu, &SolverOptions::default()).unwrap();
    let r = max_abs(fgl_residual_shifted(&hsol.profile, &hil, mu).values());
    c.item(r < 1e-8, format!("hilbert profile residual {r:.1e}"));

    // translation in the time-dependent solver with slaved strain
    let phi = sol.profile;
    let sigma = sigma_profile(&phi, v, &pf).unwrap();
    let d_sigma = first_derivative(&sigma);
    let rate = Field::new(grid.clone(), d_sigma.values().iter().map(|z| -v * z).collect()).unwrap();
    let st0 = ContinuumState::new(phi.clone(), sigma, rate).unwrap();
    let transit = length / v;
    let steps = 16_000;
    let solver =
        ContinuumSolver::new(pf, ScenarioSpec::new(ScenarioKind::FractionalZakharov), grid.clone(), transit / steps as f64)
            .unwrap();
    let mid = solver.advance(&st0, steps / 2).unwrap();
    // half a transit moves the profile by L/2, exactly M/2 samples
    let m = grid.points();
    let shifted: Vec<Complex64> = (0..m).map(|i| phi.values()[(i + m / 2) % m]).collect();
    let d_half = phase_aligned_distance(mid.psi.values(), &shifted);
    let end = solver.advance(&mid, steps / 2).unwrap();
    let d_full = phase_aligned_distance(end.psi.values(), phi.values());
    c.item(d_half < 0.01, format!("shape change at half transit {:.3}%", 100.0 * d_half));
    c.item(d_full < 0.01, format!("shape change after one transit {:.3}%", 100.0 * d_full));
    report(11, "traveling-wave solver", c);
}

#[test]
fn criterion_12_consistency_chain() {
    let mut c = Check::new();
    let p = ModelParams {
        mass: 1.5,
        elasticity: 2.0,
        ..params(2.5, 0.8)
    };
    let g = effective_nonlinearity(&p, Coefficients::Corrected);
    let g_indep = 2.0 * 0.8 * 0.8 / 2.0;
    let gamma0 = gamma_coefficient(0.0, &p).unwrap();
    c.item((g - g_indep).abs() < 1e-12, format!("g = 2 chi^2 / w: {g}"));
    c.item((gamma0 + g).abs() < 1e-12, format!("gamma(0) + g = {:.1e}", gamma0 + g));

    let grid = SpectralGrid::shared(40.0, 256).unwrap();
    let psi = Field::from_fn(grid.clone(), |x| Complex64::from_polar(1.2 / (0.7 * x).cosh(), 0.4 * x));
    let rho: Vec<f64> = psi.values().iter().map(|z| z.norm_sqr()).collect();
    let mean = rho.iter().sum::<f64>() / rho.len() as f64;
    let stat = stationary_sigma(&psi, &p);
    let d = sigma_profile(&psi, 0.0, &p).unwrap().max_diff(&stat);
    c.item(d < 1e-12, format!("sigma_profile(v=0) - stationary_sigma {d:.1e}"));
    // chi sigma is the cubic potential: -g (rho - mean) at rest, gamma(v) (rho - mean) in motion
    let e = stat
        .values()
        .iter()
        .zip(&rho)
        .map(|(s, r)| (p.coupling_chi * s.re + g * (r - mean)).abs())
        .fold(0.0, f64::max);
    c.item(e < 1e-12, format!("chi stationary_sigma + g rho {e:.1e}"));
    let mut worst: f64 = 0.0;
    for v in [1e-6, 0.3, 0.9, 2.0] {
        let sig = sigma_profile(&psi, v, &p).unwrap();
        let gam = gamma_coefficient(v, &p).unwrap();
        worst = worst.max(
            sig.values()
                .iter()
                .zip(&rho)
                .map(|(s, r)| (p.coupling_chi * s.re - gam * (r - mean)).abs())
                .fold(0.0, f64::max),
        );
    }
    c.item(worst < 1e-12, format!("chi sigma_profile - gamma rho {worst:.1e}"));
    let near = gamma_coefficient(1e-7, &p).unwrap();
    c.item((near - gamma0).abs() < 1e-12, format!("gamma(1e-7) - gamma(0) {:.1e}", near - gamma0));
    report(12, "consistency chain", c);
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn criterion_13_determinism() {
    let configs = [
        r#"{"scenario": {"type": "continuum", "kind": "fractional_zakharov"},
            "params": {"exponent_s": 2.5, "coupling_chi": 0.5},
            "grid": {"length": 64.0, "points": 128},
            "initial_condition": {"type": "gaussian_packet", "width": 4.0, "k0": 0.3},
            "integrator": {"dt": 0.05, "t_end": 5.0, "series_every": 0.5, "snapshot_every": 1.0}}"#,
        r#"{"scenario": {"type": "lattice"},
            "params": {"exponent_s": 2.5, "coupling_chi": 0.5},
            "grid": {"points": 128},
            "initial_condition": {"type": "gaussian_packet", "width": 6.0, "k0": 0.2},
            "integrator": {"dt": 0.02, "t_end": 2.0, "series_every": 0.2, "snapshot_every": 1.0}}"#,
        r#"{"scenario": {"type": "traveling_wave", "wave_speed": 0.3, "frequency_shift": 0.3},
            "params": {"exponent_s": 2.5, "coupling_chi": 1.0},
            "grid": {"length": 120.0, "points": 256},
            "initial_condition": {"type": "sech_soliton", "eta": 1.0, "width": 2.0},
            "seed": 7}"#,
    ];
    let tmp = tempfile::TempDir::new().unwrap();
    let mut c = Check::new();
    for (i, text) in configs.iter().enumerate() {
        let cfg = parse_config(text).unwrap();
        let a = tmp.path().join(format!("{i}a"));
        let b = tmp.path().join(format!("{i}b"));
        assert_eq!(run(&cfg, &a).unwrap().exit_code(), 0);
        assert_eq!(run(&cfg, &b).unwrap().exit_code(), 0);
        let (fa, fb) = (csv_files(&a), csv_files(&b));
        let same = !fa.is_empty() && fa == fb;
        c.item(same, format!("{} csv files identical: {same}", fa.len()));
    }
    report(13, "determinism", c);
}
