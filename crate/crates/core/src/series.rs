//! Truncated power series in one variable. A series of length `n` holds the
//! coefficients of `u^0 .. u^(n-1)`.

use num_complex::Complex64 as C64;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

pub fn truncate(a: &[C64], n: usize) -> Vec<C64> {
    (0..n).map(|k| a.get(k).copied().unwrap_or_default()).collect()
}

pub fn mul(a: &[C64], b: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if *x == zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Reciprocal; requires `a[0] != 0`.
pub fn inv(a: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![zero(); n];
    let a0 = a[0];
    out[0] = a0.inv();
    for k in 1..n {
        let mut s = zero();
        for j in 1..=k {
            if let Some(aj) = a.get(j) {
                s += aj * out[k - j];
            }
        }
        out[k] = -s / a0;
    }
    out
}

/// Quotient `a / b` with `b[0] != 0`.
pub fn div(a: &[C64], b: &[C64], n: usize) -> Vec<C64> {
    mul(a, &inv(b, n), n)
}

/// `log(1 + h)` for `h(0) = 0`.
pub fn log1p(h: &[C64], n: usize) -> Vec<C64> {
    // d/du log(1+h) = h' / (1+h)
    let mut one_plus = truncate(h, n);
    one_plus[0] += C64::new(1.0, 0.0);
    let dh: Vec<C64> = (1..n.max(1)).map(|k| h.get(k).copied().unwrap_or_default() * k as f64).collect();
    let q = div(&dh, &one_plus, n.saturating_sub(1).max(1));
    let mut out = vec![zero(); n];
    for k in 1..n {
        out[k] = q[k - 1] / k as f64;
    }
    out
}

/// `exp(g)` for `g(0) = 0`.
pub fn exp(g: &[C64], n: usize) -> Vec<C64> {
    // E' = g' E
    let mut out = vec![zero(); n];
    out[0] = C64::new(1.0, 0.0);
    for k in 1..n {
        let mut s = zero();
        for j in 1..=k {
            if let Some(gj) = g.get(j) {
                s += gj * j as f64 * out[k - j];
            }
        }
        out[k] = s / k as f64;
    }
    out
}

/// `(1 + h)^m` for integer `m` (any sign) and `h(0) = 0`.
pub fn one_plus_pow(h: &[C64], m: i64, n: usize) -> Vec<C64> {
    let l = log1p(h, n);
    let scaled: Vec<C64> = l.iter().map(|c| c * m as f64).collect();
    exp(&scaled, n)
}

/// Composition `a(b(u))` with `b(0) = 0`.
pub fn compose(a: &[C64], b: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![zero(); n];
    let mut power = vec![zero(); n];
    power[0] = C64::new(1.0, 0.0);
    for (k, ak) in a.iter().enumerate() {
        if k > 0 {
            power = mul(&power, b, n);
        }
        for i in 0..n {
            out[i] += ak * power[i];
        }
        if k + 1 >= n && b.first().copied().unwrap_or_default() == zero() {
            break;
        }
    }
    out
}
