//! Special functions: log-gamma, generalized Laguerre polynomials and
//! Gauss-Legendre nodes.

use num_complex::Complex64;
use std::f64::consts::PI;

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// ln(n!) for integer n.
pub fn ln_factorial(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// Generalized Laguerre polynomial `L_n^alpha(x)` by the upward recurrence
///
/// (j+1) L_{j+1} = (2j + 1 + alpha - x) L_j - (j + alpha) L_{j-1}.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + alpha - x) * cur - (jf + alpha) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// All of `L_0^alpha(x) ..= L_n^alpha(x)` in one pass.
pub fn laguerre_all(n: usize, alpha: f64, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    out.push(1.0 + alpha - x);
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + alpha - x) * out[j] - (jf + alpha) * out[j - 1]) / (jf + 1.0);
        out.push(next);
    }
    out
}

/// Same recurrence at a complex argument.
pub fn laguerre_complex(n: usize, alpha: f64, z: Complex64) -> Complex64 {
    let mut prev = Complex64::new(1.0, 0.0);
    if n == 0 {
        return prev;
    }
    let mut cur = Complex64::new(1.0 + alpha, 0.0) - z;
    for j in 1..n {
        let jf = j as f64;
        let next = ((Complex64::new(2.0 * jf + 1.0 + alpha, 0.0) - z) * cur - prev * (jf + alpha))
            / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Gauss-Legendre nodes and weights on [-1, 1], Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

/// Gauss-Legendre rule mapped onto [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|t| half * t).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(a: f64, k: usize) -> f64 {
        // generalized binomial (a choose k)
        (0..k).fold(1.0, |acc, i| acc * (a - i as f64) / (i as f64 + 1.0))
    }

    /// Explicit coefficient sum L_n^a(x) = sum_i (-1)^i C(n+a, n-i) x^i / i!
    fn laguerre_explicit(n: usize, a: f64, x: f64) -> f64 {
        (0..=n)
            .map(|i| {
                let fact: f64 = (1..=i).map(|t| t as f64).product();
                (-1f64).powi(i as i32) * binom(n as f64 + a, n - i) * x.powi(i as i32) / fact
            })
            .sum()
    }

    #[test]
    fn laguerre_degree_zero_is_one() {
        for &(a, x) in &[(0.0, 0.3), (2.5, 7.0), (-0.5, 100.0)] {
            assert_eq!(laguerre(0, a, x), 1.0);
        }
    }

    #[test]
    fn laguerre_degree_one() {
        assert!((laguerre(1, 2.0, 1.5) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn laguerre_cubic_matches_coefficient_sum() {
        let want = laguerre_explicit(3, 1.0, 2.0);
        assert!((laguerre(3, 1.0, 2.0) - want).abs() < 1e-13, "{want}");
        for n in 0..12 {
            for &a in &[0.0, 1.0, 2.5] {
                for &x in &[0.1, 1.7, 6.0] {
                    let e = laguerre_explicit(n, a, x);
                    assert!((laguerre(n, a, x) - e).abs() < 1e-10 * e.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn laguerre_all_agrees_with_single() {
        let all = laguerre_all(9, 1.5, 3.3);
        for (n, v) in all.iter().enumerate() {
            assert_eq!(*v, laguerre(n, 1.5, 3.3));
        }
    }

    #[test]
    fn complex_laguerre_on_real_axis() {
        for n in 0..8 {
            let z = laguerre_complex(n, 2.0, Complex64::new(1.3, 0.0));
            assert!((z.re - laguerre(n, 2.0, 1.3)).abs() < 1e-13 && z.im == 0.0);
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        // exact up to degree 19
        for p in 0..20 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum();
            let exact = if p % 2 == 1 {
                0.0
            } else {
                2.0 / (p as f64 + 1.0)
            };
            assert!((q - exact).abs() < 1e-14, "degree {p}: {q} vs {exact}");
        }
    }

    #[test]
    fn gauss_legendre_large_rule_weights_sum() {
        let (_, w) = gauss_legendre(128);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
        let (x, w) = gauss_legendre_on(64, 0.0, 30.0);
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * (-x).exp()).sum();
        assert!((q - (1.0 - (-30f64).exp())).abs() < 1e-14);
    }

    #[test]
    fn ln_gamma_integer_values() {
        assert!((ln_factorial(10) - 3628800f64.ln()).abs() < 1e-12);
        assert!((ln_gamma(0.5) - PI.sqrt().ln()).abs() < 1e-14);
    }
}
