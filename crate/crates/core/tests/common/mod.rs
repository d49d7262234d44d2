//! Oracles for the integration tests. None of these call into the library.

#![allow(dead_code)]

use rug::float::Constant;
use rug::Float;

/// Squarefree test by trial division with `p^2`.
pub fn squarefree_trial(n: u64) -> bool {
    let mut k = 2u64;
    while k * k <= n {
        if n.is_multiple_of(k * k) {
            return false;
        }
        k += 1;
    }
    n > 0
}

/// `p + 1 - #E(F_p)` for `y^2 = x^3 + a x` from a table of squares mod `p`.
pub fn trace_by_counting(a: i64, p: u64) -> i64 {
    let mut sq = vec![0i64; p as usize];
    for y in 0..p {
        sq[(y * y % p) as usize] += 1;
    }
    let am = a.rem_euclid(p as i64) as u64;
    let mut affine = 0i64;
    for x in 0..p {
        let rhs = (x * x % p * x % p + am * x % p) % p;
        affine += sq[rhs as usize];
    }
    p as i64 + 1 - (affine + 1)
}

pub fn primes_below(n: u64) -> Vec<u64> {
    (2..n).filter(|&k| (2..).take_while(|d| d * d <= k).all(|d| k % d != 0)).collect()
}

/// Tanh-sinh quadrature of `int_0^1 f(t) dt`, with `f` given `t` and `1 - t` to keep
/// precision near the endpoint singularities.
pub fn tanh_sinh_unit(prec: u32, level: u32, f: impl Fn(&Float, &Float) -> Float) -> Float {
    let h = Float::with_val(prec, 1) >> level;
    let pi = Float::with_val(prec, Constant::Pi);
    let mut sum = Float::new(prec);
    let n_max = (6i64) << level;
    for k in -n_max..=n_max {
        let u = Float::with_val(prec, &h * k);
        let s = Float::with_val(prec, u.sinh_ref());
        let c = Float::with_val(prec, u.cosh_ref());
        let e = Float::with_val(prec, &pi * &s).exp();
        // t = e / (1 + e), 1 - t = 1 / (1 + e)
        let one_plus = Float::with_val(prec, 1 + &e);
        let t = Float::with_val(prec, &e / &one_plus);
        let omt = Float::with_val(prec, one_plus.recip_ref());
        if t.is_zero() || omt.is_zero() {
            continue;
        }
        // dt/du = pi cosh u * t (1 - t)
        let w = Float::with_val(prec, &pi * &c) * &t * &omt;
        sum += w * f(&t, &omt);
    }
    sum * h
}

/// `2 int_1^inf dx / sqrt(x^3 - x)` by quadrature after `x = 1/t^2`, which turns the
/// integrand into `4 / sqrt(1 - t^4)` on `[0, 1]`.
pub fn e1_period_by_quadrature(prec: u32, level: u32) -> Float {
    tanh_sinh_unit(prec, level, |t, omt| {
        let t2 = Float::with_val(prec, t.square_ref());
        let r = Float::with_val(prec, 2 - omt) * omt * (t2 + 1u32);
        Float::with_val(prec, 4u32) / r.sqrt()
    })
}

/// `#{(x, y, z) : a x^2 + y^2 + c z^2 = m}` by a signed triple loop.
pub fn ternary_count(a: i64, c: i64, m: i64) -> u64 {
    let r = |k: i64| ((m / k) as f64).sqrt() as i64 + 1;
    let mut n = 0;
    for x in -r(a)..=r(a) {
        for y in -r(1)..=r(1) {
            let rest = m - a * x * x - y * y;
            if rest < 0 || rest % c != 0 {
                continue;
            }
            let z2 = rest / c;
            let z = (z2 as f64).sqrt().round() as i64;
            if z * z == z2 {
                n += if z == 0 { 1 } else { 2 };
            }
        }
    }
    n
}
