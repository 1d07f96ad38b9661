//! Power-law lattice sums `sum_{n>=1} cos(kn) / n^s` and `sum_{n>=1} (1 - cos kn) / n^s`.
//!
//! The sum is split at `N`: the head `n <= N` is summed directly and the tail
//! `T = sum_{n>N} e^{ikn} n^{-s}` is expanded around `a = N + 1`. Writing
//! `n^{-s}` as a Laplace integral gives
//!
//! ```text
//! T = z^a a^{-s} sum_p (-1)^p L_p (s)_p / (p! a^p),   z = e^{ik},
//! L_0 = 1/(1 - z),   L_p = Li_{-p}(z)  (p >= 1)
//! ```
//!
//! which is asymptotic with term ratio close to `(s + p) / (|k| a)`. `N` is
//! picked so that `|k| a` exceeds `ln(1/tol)` by a margin, which puts the
//! smallest term far below the requested tolerance. The negative-order
//! polylogarithms are polynomials in `u = 1/(1 - z)`:
//! `P_0 = u - 1`, `P_{p+1} = u (u - 1) P_p'(u)`.
//!
//! For `(1 - cos kn)` the non-oscillating part of the tail is the Hurwitz zeta
//! `zeta(s, a)`, so the gap is accumulated from positive terms without the
//! `J(0) - J(k)` cancellation.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::special::{hurwitz_zeta, zeta};

const MAX_ORDER: usize = 64;
/// Hard cap on directly summed terms (about 0.1 s of work).
pub(crate) const MAX_HEAD_TERMS: usize = 1 << 25;

/// Result of one lattice-sum evaluation.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LatticeSums {
    /// `sum cos(kn) / n^s`
    pub cosine: f64,
    /// `sum (1 - cos kn) / n^s`
    pub gap: f64,
}

fn polylog_polys() -> &'static [Vec<f64>] {
    static POLYS: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    POLYS.get_or_init(|| {
        let mut polys: Vec<Vec<f64>> = Vec::with_capacity(MAX_ORDER + 1);
        polys.push(vec![-1.0, 1.0]);
        for p in 0..MAX_ORDER {
            let cur = &polys[p];
            let mut next = vec![0.0; cur.len() + 1];
            for i in 1..cur.len() {
                let d = i as f64 * cur[i];
                next[i + 1] += d;
                next[i] -= d;
            }
            polys.push(next);
        }
        polys
    })
}

fn horner(coeffs: &[f64], u: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * u + c)
}

/// Reduce `k` into `[0, pi]` using periodicity and evenness.
pub(crate) fn reduce_wavenumber(k: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = k.rem_euclid(two_pi);
    if r > PI {
        r = two_pi - r;
    }
    r
}

/// Asymptotic expansion of `sum_{n>=a} e^{ikn} n^{-s}` for `0 < k <= pi`.
/// Returns the tail and the magnitude of the last retained term.
pub(crate) fn oscillatory_tail(k: f64, s: f64, a: f64, abs_tol: f64) -> (Complex64, f64) {
    let z = Complex64::from_polar(1.0, k);
    let u = (Complex64::new(1.0, 0.0) - z).inv();
    let polys = polylog_polys();

    let inv_a = 1.0 / a;
    let prefactor = Complex64::from_polar(1.0, (k * a).rem_euclid(2.0 * PI)) * a.powf(-s);
    let scale = prefactor.norm();

    let mut rising = 1.0; // (s)_p / p!
    let mut inv_pow = 1.0; // a^{-p}
    let mut sum = Complex64::new(0.0, 0.0);
    // Li_{-p}(z) can vanish for single orders (every even p at z = -1), so
    // growth and convergence are judged on pairs of consecutive terms.
    let mut prev = f64::INFINITY;
    let mut last = f64::INFINITY;
    #[allow(clippy::needless_range_loop)]
    for p in 0..=MAX_ORDER {
        let l = if p == 0 { u } else { horner(&polys[p], u) };
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        let term = l * (sign * rising * inv_pow);
        let mag = term.norm() * scale;
        if p > 1 && mag > prev.max(last) {
            break;
        }
        sum += term;
        prev = last;
        last = mag;
        if mag.max(prev) <= abs_tol {
            break;
        }
        rising *= (s + p as f64) / (p as f64 + 1.0);
        inv_pow *= inv_a;
    }
    (prefactor * sum, last.max(prev))
}

/// Evaluate both lattice sums to absolute accuracy about `tol * zeta(s)`.
pub(crate) fn lattice_sums(k: f64, s: f64, tol: f64) -> LatticeSums {
    let kr = reduce_wavenumber(k);
    let zeta_s = zeta(s);
    if kr == 0.0 {
        return LatticeSums {
            cosine: zeta_s,
            gap: 0.0,
        };
    }

    let margin = (1.0 / tol).ln().max(0.0) + 12.0;
    let wanted = (margin.max(24.0) / kr).ceil();
    let head_terms = if wanted >= MAX_HEAD_TERMS as f64 {
        MAX_HEAD_TERMS
    } else {
        (wanted as usize).max(1)
    };

    // Neumaier-compensated head sums.
    let (mut cos_sum, mut cos_c) = (0.0f64, 0.0f64);
    let (mut gap_sum, mut gap_c) = (0.0f64, 0.0f64);
    for n in 1..=head_terms {
        let x = n as f64;
        let w = (-s * x.ln()).exp();
        let half = 0.5 * kr * x;
        let sh = half.sin();
        let c_term = (kr * x).cos() * w;
        let g_term = 2.0 * sh * sh * w;
        neumaier(&mut cos_sum, &mut cos_c, c_term);
        neumaier(&mut gap_sum, &mut gap_c, g_term);
    }
    let a = head_terms as f64 + 1.0;
    let (tail, _) = oscillatory_tail(kr, s, a, 1e-3 * tol * zeta_s);
    let cosine = cos_sum + cos_c + tail.re;
    let gap = gap_sum + gap_c + hurwitz_zeta(s, a) - tail.re;
    LatticeSums { cosine, gap }
}

#[inline]
fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}
