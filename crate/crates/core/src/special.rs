//! Zeta functions needed by the lattice sums.
//!
//! Hurwitz zeta is evaluated by Euler-Maclaurin summation: a short direct
//! head followed by the integral, endpoint and Bernoulli corrections. With
//! the shifted argument kept at or above 16 and ten Bernoulli terms the
//! remainder is far below f64 resolution for every s > 1.

/// B_2, B_4, ..., B_20.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

const SHIFT: f64 = 16.0;

/// Hurwitz zeta `sum_{n>=0} (a + n)^{-s}` for `a > 0`, continued to `s < 1` (`s != 1`).
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    debug_assert!(s != 1.0 && a > 0.0);
    let mut head = 0.0;
    let mut x = a;
    while x < SHIFT {
        head += x.powf(-s);
        x += 1.0;
    }
    let mut sum = head + x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);

    // (s)_{2j-1} x^{-s-2j+1} / (2j)!, built incrementally.
    let mut factor = s * x.powf(-s - 1.0) / 2.0;
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b * factor;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        let m = 2.0 * j as f64 + 2.0;
        factor *= (s + m - 1.0) * (s + m) / (x * x * (m + 1.0) * (m + 2.0));
    }
    sum
}

/// Riemann zeta, `s != 1`.
pub fn zeta(s: f64) -> f64 {
    hurwitz_zeta(s, 1.0)
}

pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}
