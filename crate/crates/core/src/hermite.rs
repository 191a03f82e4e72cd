//! Physicists' Hermite polynomials over the complex plane.

use num_complex::Complex64 as C64;

/// `H_n(z)` by the three-term recurrence `H_{k+1} = 2z H_k - 2k H_{k-1}`.
pub fn hermite(n: u32, z: C64) -> C64 {
    let mut prev = C64::new(1.0, 0.0);
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * z;
    for k in 1..n {
        let next = 2.0 * z * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `H_n(z)`, `H_n'(z)` and `H_n''(z)`, using `H_n' = 2n H_{n-1}`.
pub fn hermite_with_derivatives(n: u32, z: C64) -> (C64, C64, C64) {
    let h = hermite(n, z);
    let dh = if n >= 1 {
        2.0 * n as f64 * hermite(n - 1, z)
    } else {
        C64::new(0.0, 0.0)
    };
    let d2h = if n >= 2 {
        4.0 * (n * (n - 1)) as f64 * hermite(n - 2, z)
    } else {
        C64::new(0.0, 0.0)
    };
    (h, dh, d2h)
}

/// Real zeros of `H_n`, ascending. All `n` zeros are real and lie inside
/// `|z| < sqrt(2n + 1)`; they are bracketed on a fine grid and bisected.
pub fn hermite_zeros(n: u32) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    let f = |x: f64| hermite(n, C64::new(x, 0.0)).re;
    let bound = (2.0 * n as f64 + 1.0).sqrt() + 0.5;
    let samples = 400 * n as usize;
    let dx = 2.0 * bound / samples as f64;
    let mut zeros = Vec::with_capacity(n as usize);
    let mut a = -bound;
    let mut fa = f(a);
    for i in 1..=samples {
        let b = -bound + i as f64 * dx;
        let fb = f(b);
        if fb == 0.0 {
            zeros.push(b);
        } else if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = f(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            zeros.push(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    zeros
}
