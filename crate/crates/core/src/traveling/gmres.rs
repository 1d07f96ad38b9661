//! Restarted GMRES over complex vectors viewed as real vectors of twice the
//! length, so that real-linear operators (those involving `conj`) are allowed.

use num_complex::Complex64;

fn dot(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `A x = b` from `x = 0` until `|b - A x| <= rtol |b|` or the
/// iteration budget runs out.
pub(crate) fn gmres<A>(apply: A, b: &[Complex64], rtol: f64, restart: usize, max_iter: usize) -> Vec<Complex64>
where
    A: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let n = b.len();
    let bnorm = norm(b);
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    if bnorm == 0.0 {
        return x;
    }
    let mut total = 0;
    let mut rel;
    while total < max_iter {
        let ax = apply(&x);
        let r: Vec<Complex64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let beta = norm(&r);
        rel = beta / bnorm;
        if rel <= rtol {
            break;
        }
        let m = restart.min(max_iter - total);
        let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|v| v / beta).collect());
        let mut h = vec![vec![0.0; m]; m + 1];
        let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut used = 0;
        for j in 0..m {
            let mut w = apply(&basis[j]);
            // modified Gram-Schmidt, twice
            for _ in 0..2 {
                for (i, v) in basis.iter().enumerate() {
                    let c = dot(v, &w);
                    h[i][j] += c;
                    for (wk, vk) in w.iter_mut().zip(v) {
                        *wk -= vk * c;
                    }
                }
            }
            let hn = norm(&w);
            h[j + 1][j] = hn;
            for i in 0..j {
                let t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let d = h[j][j].hypot(h[j + 1][j]);
            if d == 0.0 {
                break;
            }
            cs[j] = h[j][j] / d;
            sn[j] = h[j + 1][j] / d;
            h[j][j] = d;
            h[j + 1][j] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];
            used = j + 1;
            total += 1;
            rel = g[j + 1].abs() / bnorm;
            if rel <= rtol || hn <= 1e-14 * beta {
                break;
            }
            basis.push(w.iter().map(|v| v / hn).collect());
        }
        if used == 0 {
            break;
        }
        let mut y = vec![0.0; used];
        for i in (0..used).rev() {
            let s: f64 = (i + 1..used).map(|k| h[i][k] * y[k]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        for (yi, v) in y.iter().zip(&basis) {
            for (xk, vk) in x.iter_mut().zip(v) {
                *xk += vk * *yi;
            }
        }
        if rel <= rtol {
            break;
        }
    }
    x
}
