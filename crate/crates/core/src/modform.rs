//! Weight-2 CM newforms of levels 32 and 64 and the Abel map `z(tau) = sum a_n q^n / n`.

use crate::error::{Error, Result};
use crate::hp::HPComplex;

/// Coefficients `a_1..a_len` of a newform; `coeffs[0]` is unused and zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QExpansion {
    pub level: u32,
    pub coeffs: Vec<i64>,
}

impl QExpansion {
    pub fn len(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn a(&self, n: usize) -> i64 {
        self.coeffs[n]
    }
}

/// `prod_{n>=1} (1 - x^n)` up to `x^len`, by Euler's pentagonal theorem.
fn euler_product_sparse(len: usize) -> Vec<(usize, i64)> {
    let mut out = vec![(0usize, 1i64)];
    let mut k: usize = 1;
    loop {
        let sign = if k % 2 == 1 { -1 } else { 1 };
        let e1 = k * (3 * k - 1) / 2;
        let e2 = k * (3 * k + 1) / 2;
        if e1 > len {
            break;
        }
        out.push((e1, sign));
        if e2 <= len {
            out.push((e2, sign));
        }
        k += 1;
    }
    out
}

fn mul_sparse(dense: &[i64], sparse: &[(usize, i64)]) -> Vec<i64> {
    let mut out = vec![0i64; dense.len()];
    for (i, &v) in dense.iter().enumerate() {
        if v == 0 {
            continue;
        }
        for &(e, c) in sparse {
            if i + e >= out.len() {
                break;
            }
            out[i + e] += v * c;
        }
    }
    out
}

/// `q prod (1 - q^{4n})^2 (1 - q^{8n})^2`, truncated after `q^len`.
pub fn coefficients_level32(len: usize) -> QExpansion {
    let len = len.max(1);
    // a_{4k+1} = g_k with g(x) = P(x)^2 P(x^2)^2
    let k_max = (len - 1) / 4;
    let p = euler_product_sparse(k_max);
    let p2: Vec<(usize, i64)> = euler_product_sparse(k_max / 2)
        .into_iter()
        .map(|(e, c)| (2 * e, c))
        .collect();
    let mut g = vec![0i64; k_max + 1];
    g[0] = 1;
    for factor in [&p, &p, &p2, &p2] {
        g = mul_sparse(&g, factor);
    }
    let mut coeffs = vec![0i64; len + 1];
    for (k, v) in g.into_iter().enumerate() {
        coeffs[4 * k + 1] = v;
    }
    QExpansion { level: 32, coeffs }
}

/// `p + 1 - #E(F_p)` for `y^2 = x^3 + a x` and an odd prime `p`.
pub fn trace_of_frobenius(a: i64, p: u64) -> i64 {
    let p_us = p as usize;
    let mut is_sq = vec![false; p_us];
    for x in 1..p {
        is_sq[((x * x) % p) as usize] = true;
    }
    let a = a.rem_euclid(p as i64) as u64;
    let mut s: i64 = 0;
    for x in 0..p {
        let v = ((x * x % p) * x % p + a * x % p) % p;
        if v != 0 {
            s += if is_sq[v as usize] { 1 } else { -1 };
        }
    }
    -s
}

/// Newform of `y^2 = x^3 - 4x` from point counts and the Hecke recursion.
pub fn coefficients_level64(len: usize) -> QExpansion {
    let len = len.max(1);
    let spf = crate::arith::SpfTable::new(len);
    let mut coeffs = vec![0i64; len + 1];
    coeffs[1] = 1;
    for n in 2..=len {
        let p = spf.smallest_factor(n as u64) as usize;
        let mut m = n;
        let mut e = 0u32;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        if m > 1 {
            coeffs[n] = coeffs[n / m] * coeffs[m];
            continue;
        }
        // n = p^e
        coeffs[n] = if p == 2 {
            0
        } else if e == 1 {
            trace_of_frobenius(-4, p as u64)
        } else {
            let ap = coeffs[p];
            let prev = coeffs[n / p];
            let prev2 = coeffs[n / (p * p)];
            ap * prev - (p as i64) * prev2
        };
    }
    QExpansion { level: 64, coeffs }
}

/// Smallest `M` with `2 |q|^(M+1) / (1 - |q|) < target`, from the bound `|a_n|/n <= d(n)/sqrt(n) <= 2`.
pub fn terms_needed(im_tau: f64, target_err: f64) -> usize {
    terms_needed_bits(im_tau, -target_err.log2())
}

/// [`terms_needed`] for the target `2^-bits`, which may lie below the f64 range.
pub fn terms_needed_bits(im_tau: f64, bits: f64) -> usize {
    let two_pi_y = 2.0 * std::f64::consts::PI * im_tau;
    let abs_q = (-two_pi_y).exp();
    let num = 2f64.ln() - (1.0 - abs_q).ln() + bits * 2f64.ln();
    let m = (num / two_pi_y).ceil() - 1.0;
    m.max(1.0) as usize
}

/// Guaranteed bound on the truncation tail after `m` terms. Never below the smallest
/// positive f64, so an underflowing bound stays an upper bound.
pub fn tail_bound(im_tau: f64, m: usize) -> f64 {
    let two_pi_y = 2.0 * std::f64::consts::PI * im_tau;
    let abs_q = (-two_pi_y).exp();
    (2.0 * (-(two_pi_y * (m as f64 + 1.0))).exp() / (1.0 - abs_q)).max(f64::MIN_POSITIVE)
}

#[derive(Debug, Clone)]
pub struct AbelValue {
    pub z: HPComplex,
    /// Absolute error bound: truncation tail plus rounding.
    pub err: f64,
    pub terms: usize,
}

/// `z(tau) = sum_{n<=M} a_n q^n / n`, with `M` chosen from the tail bound.
///
/// Fails with [`Error::SeriesCeiling`] when `M` would exceed `ceiling` or the
/// available coefficients, which means `tau` should be reduced first.
pub fn abel_map(f: &QExpansion, tau: &HPComplex, target_err: f64, ceiling: usize) -> Result<AbelValue> {
    abel_map_bits(f, tau, -target_err.log2(), ceiling)
}

/// [`abel_map`] with the target given as `2^-bits`.
pub fn abel_map_bits(f: &QExpansion, tau: &HPComplex, bits: f64, ceiling: usize) -> Result<AbelValue> {
    let prec = tau.prec();
    let y = tau.im.to_f64();
    if y.is_nan() || y <= 0.0 {
        return Err(Error::Domain("abel_map: Im(tau) must be positive".into()));
    }
    let m = terms_needed_bits(y, bits);
    let cap = ceiling.min(f.len());
    if m > cap {
        return Err(Error::SeriesCeiling {
            needed: m,
            ceiling: cap,
            im_tau: y,
        });
    }
    let q = HPComplex::exp_2pi_i(tau);
    let four_tau = tau.scale_i64(4);
    let q4 = HPComplex::exp_2pi_i(&four_tau);
    let mut qn = q;
    let mut z = HPComplex::zero(prec);
    let mut n = 1usize;
    while n <= m {
        let a = f.coeffs[n];
        if a != 0 {
            let mut term = qn.scale_i64(a);
            term = term.div_i64(n as i64);
            z += &term;
        }
        n += 4;
        if n <= m {
            qn = &qn * &q4;
        }
    }
    let abs_q = (-2.0 * std::f64::consts::PI * y).exp();
    let magnitude = 2.0 / (1.0 - abs_q);
    let rounding = ((m as f64) * 2f64.powi(3 - prec as i32) * magnitude).max(f64::MIN_POSITIVE);
    Ok(AbelValue {
        z,
        err: tail_bound(y, m) + rounding,
        terms: m,
    })
}
