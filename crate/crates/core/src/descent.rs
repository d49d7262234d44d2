//! Descent via the 2-isogeny `E: y^2 = x^3 - D^2 x -> E': y^2 = x^3 + 4 D^2 x`.
//!
//! `selmer_phi` counts `d | D` (signed) with `N^2 = d M^4 - (D^2/d) e^4` everywhere
//! locally solvable, `selmer_phihat` counts `d | 2D`, `d > 0`, with
//! `N^2 = d M^4 + (4D^2/d) e^4` solvable. Then `rank <= dim_phi + dim_phihat - 2`.

use crate::arith::{factor, gcd_i128, kronecker};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelmerBound {
    pub d: i64,
    pub dim_phi: u32,
    pub dim_phihat: u32,
    pub rank_upper: u32,
    pub passes_rank3: bool,
}

fn val_p(mut n: i128, p: i128) -> u32 {
    debug_assert!(n != 0);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

fn unit_part(mut n: i128, p: i128) -> i128 {
    while n % p == 0 {
        n /= p;
    }
    n
}

/// Whether a nonzero p-adic integer given exactly is a square in Q_p.
fn is_padic_square(v: i128, p: i128) -> bool {
    let m = val_p(v, p);
    if m % 2 == 1 {
        return false;
    }
    let u = unit_part(v, p);
    if p == 2 {
        u.rem_euclid(8) == 1
    } else {
        kronecker(u.rem_euclid(p) as i64, p as i64) == 1
    }
}

fn binom(n: u32, k: u32) -> i128 {
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

/// Taylor coefficient `g^(i)(t0) / i!` of a polynomial with coefficients `c[j]`.
fn taylor(c: &[i128; 5], t0: i128, i: u32) -> Option<i128> {
    let mut s: i128 = 0;
    for j in i..=4 {
        let term = c[j as usize]
            .checked_mul(binom(j, i))?
            .checked_mul(t0.checked_pow(j - i)?)?;
        s = s.checked_add(term)?;
    }
    Some(s)
}

/// Is `g(t)` a square in Q_p for some `t` in `t0 + p^k Z_p`? `None` when undecided.
fn search_class(c: &[i128; 5], p: i128, t0: i128, k: u32, kmax: u32) -> Option<bool> {
    let v = taylor(c, t0, 0)?;
    if v == 0 {
        return Some(true);
    }
    let m = val_p(v, p);
    let need = m + if p == 2 { 3 } else { 1 };
    let pk = p.checked_pow(k)?;
    let mut variation = u32::MAX;
    for i in 1..=4u32 {
        let gi = taylor(c, t0, i)?;
        if gi != 0 {
            variation = variation.min(val_p(gi, p) + k * i);
        }
    }
    if variation >= need {
        return Some(is_padic_square(v, p));
    }
    // a simple root inside the class gives a point with N = 0
    let g1 = taylor(c, t0, 1)?;
    if g1 != 0 {
        let v1 = val_p(g1, p);
        if m > 2 * v1 && m - v1 >= k {
            return Some(true);
        }
    }
    if k >= kmax {
        return None;
    }
    let mut undecided = false;
    for j in 0..p {
        let t = t0.checked_add(j.checked_mul(pk)?)?;
        match search_class(c, p, t, k + 1, kmax) {
            Some(true) => return Some(true),
            Some(false) => {}
            None => undecided = true,
        }
    }
    if undecided {
        None
    } else {
        Some(false)
    }
}

fn depth_limit(p: i128, a: i128, b: i128) -> u32 {
    // keep b p^4 t^4 with t < p^k inside i128
    let bits = |n: i128| 128 - n.unsigned_abs().leading_zeros();
    let logp = bits(p);
    let budget = 120u32.saturating_sub(bits(a).max(bits(b)) + 4 * logp);
    (budget / (4 * logp)).clamp(1, 24)
}

/// Local solvability of `N^2 = a M^4 + b e^4` over Q_p by exhaustive refinement.
/// `None` means the depth limit was reached without a decision.
pub fn locally_solvable_search(a: i128, b: i128, p: i128) -> Option<bool> {
    let kmax = depth_limit(p, a, b);
    let p4 = p.checked_pow(4)?;
    let chart1 = [b, 0, 0, 0, a];
    let chart2 = [a, 0, 0, 0, b.checked_mul(p4)?];
    let r1 = search_class(&chart1, p, 0, 0, kmax);
    if r1 == Some(true) {
        return Some(true);
    }
    let r2 = search_class(&chart2, p, 0, 0, kmax);
    match (r1, r2) {
        (_, Some(true)) => Some(true),
        (Some(false), Some(false)) => Some(false),
        _ => None,
    }
}

fn is_fourth_power_mod(x: i128, p: i128) -> bool {
    let x = x.rem_euclid(p);
    if x == 0 {
        return false;
    }
    let g = if (p - 1) % 4 == 0 { 4 } else { 2 };
    let e = (p - 1) / g;
    let mut r: i128 = 1;
    let mut base = x;
    let mut k = e;
    while k > 0 {
        if k & 1 == 1 {
            r = r * base % p;
        }
        base = base * base % p;
        k >>= 1;
    }
    r == 1
}

/// Local solvability of `N^2 = a M^4 + b e^4` over Q_p for odd `p`, by valuation cases.
pub fn locally_solvable_odd(a: i128, b: i128, p: i128) -> bool {
    let (mut al, mut be) = (val_p(a, p), val_p(b, p));
    let (mut u, mut w) = (unit_part(a, p), unit_part(b, p));
    // N -> pN, M -> pM, e -> pe rescale valuations by 2 and 4
    let common = al.min(be) / 2;
    al -= 2 * common;
    be -= 2 * common;
    al %= 4;
    be %= 4;
    if al > be {
        std::mem::swap(&mut al, &mut be);
        std::mem::swap(&mut u, &mut w);
    }
    let qr = |x: i128| kronecker(x.rem_euclid(p) as i64, p as i64) == 1;
    match (al, be) {
        (0, 0) => true,
        (0, 1) | (0, 3) => qr(u),
        (0, 2) => qr(u) || qr(w),
        (1, 1) => is_fourth_power_mod(-w * inv_mod(u, p), p),
        (1, 2) => qr(w),
        // rescaling only swaps the two coefficients, and p | M is forced each time
        (1, 3) => false,
        _ => locally_solvable_search(a, b, p).unwrap_or(true),
    }
}

fn inv_mod(x: i128, p: i128) -> i128 {
    let (mut r0, mut r1) = (x.rem_euclid(p), p);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    s0.rem_euclid(p)
}

/// Everywhere-local solvability of `N^2 = a M^4 + b e^4`, checking the real place
/// and the primes in `bad`. Undecided 2-adic cases count as solvable, which keeps
/// the resulting Selmer count an upper bound.
pub fn torsor_solvable(a: i128, b: i128, bad: &[u64]) -> bool {
    if a < 0 && b < 0 {
        return false;
    }
    bad.iter().all(|&p| {
        let p = p as i128;
        if p == 2 {
            locally_solvable_search(a, b, 2).unwrap_or(true)
        } else {
            locally_solvable_odd(a, b, p)
        }
    })
}

fn squarefree_divisors(primes: &[u64]) -> Vec<i128> {
    let mut out = vec![1i128];
    for &p in primes {
        let more: Vec<i128> = out.iter().map(|d| d * p as i128).collect();
        out.extend(more);
    }
    out
}

fn bad_primes(d: i64) -> Vec<u64> {
    let mut ps: Vec<u64> = factor(d.unsigned_abs()).into_iter().map(|(p, _)| p).collect();
    if !ps.contains(&2) {
        ps.insert(0, 2);
    }
    ps
}

fn log2_exact(n: usize) -> u32 {
    assert!(n.is_power_of_two(), "Selmer count {n} is not a power of 2");
    n.trailing_zeros()
}

/// Classes `a | D` (signed) with `N^2 = a M^4 - (D^2/a) e^4` everywhere locally solvable.
pub fn selmer_phi_classes(d: i64) -> Vec<i128> {
    let dd = d as i128;
    let odd_primes: Vec<u64> = factor(d.unsigned_abs()).into_iter().map(|(p, _)| p).collect();
    let bad = bad_primes(d);
    let mut out = Vec::new();
    for delta in squarefree_divisors(&odd_primes) {
        for a in [delta, -delta] {
            if torsor_solvable(a, -(dd * dd) / a, &bad) {
                out.push(a);
            }
        }
    }
    out
}

/// Dimension of the Selmer group of `N^2 = d M^4 - (D^2/d) e^4`, `d | D` signed.
pub fn selmer_phi(d: i64) -> u32 {
    log2_exact(selmer_phi_classes(d).len())
}

/// Classes `a | 2D`, `a > 0`, with `N^2 = a M^4 + (4 D^2/a) e^4` everywhere locally solvable.
pub fn selmer_phihat_classes(d: i64) -> Vec<i128> {
    let dd = d as i128;
    let mut primes: Vec<u64> = factor(d.unsigned_abs()).into_iter().map(|(p, _)| p).collect();
    if !primes.contains(&2) {
        primes.push(2);
    }
    let bad = bad_primes(d);
    squarefree_divisors(&primes)
        .into_iter()
        .filter(|&a| torsor_solvable(a, 4 * dd * dd / a, &bad))
        .collect()
}

/// Dimension of the Selmer group of `N^2 = d M^4 + (4 D^2/d) e^4`, `d | 2D`, `d > 0`.
pub fn selmer_phihat(d: i64) -> u32 {
    log2_exact(selmer_phihat_classes(d).len())
}

pub fn selmer_bound(d: i64) -> SelmerBound {
    let dim_phi = selmer_phi(d);
    let dim_phihat = selmer_phihat(d);
    let rank_upper = (dim_phi + dim_phihat).saturating_sub(2);
    SelmerBound {
        d,
        dim_phi,
        dim_phihat,
        rank_upper,
        passes_rank3: rank_upper >= 3,
    }
}

pub fn rank3_filter(d: i64) -> bool {
    selmer_bound(d).passes_rank3
}

/// Squarefree class of a nonzero rational `num/den`, as a squarefree integer.
pub fn square_class(num: i128, den: i128) -> i128 {
    // num/den ~ num*den mod squares
    let n = num * den;
    debug_assert!(n != 0);
    let sign = n.signum();
    let mut m = n.unsigned_abs();
    let mut out: u128 = 1;
    let mut p: u128 = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            let mut odd = false;
            while m.is_multiple_of(p) {
                m /= p;
                odd = !odd;
            }
            if odd {
                out *= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    sign * (out * m) as i128
}

/// Image of a point of `y^2 = x^3 - D^2 x` in `(Q*/Q*^2)^2` under `P -> (x, x - D)`,
/// with the usual substitutions at the 2-torsion points.
pub fn two_descent_image(d: i64, x_num: i128, x_den: i128) -> (i128, i128) {
    let dd = d as i128;
    let g = gcd_i128(x_num, x_den);
    let (xn, xd) = (x_num / g, x_den / g);
    if xn == 0 {
        return (square_class(-(dd * dd), 1), square_class(-dd, 1));
    }
    if xn == dd * xd {
        return (square_class(dd, 1), square_class(2 * dd * dd, 1));
    }
    let first = square_class(xn, xd);
    let second = square_class(xn - dd * xd, xd);
    (first, second)
}

/// Images of the rational 2-torsion, spanning a 2-dimensional subspace.
pub fn torsion_images(d: i64) -> Vec<(i128, i128)> {
    let dd = d as i128;
    vec![two_descent_image(d, 0, 1), two_descent_image(d, dd, 1), two_descent_image(d, -dd, 1)]
}

/// GF(2)-rank of a set of square classes given as squarefree integers (sign included).
pub fn gf2_rank(vectors: &[Vec<i128>]) -> usize {
    let mut primes: Vec<u128> = Vec::new();
    for v in vectors {
        for &c in v {
            for (p, _) in factor_u128(c.unsigned_abs()) {
                if !primes.contains(&p) {
                    primes.push(p);
                }
            }
        }
    }
    let width = primes.len() + 1;
    let mut rows: Vec<Vec<bool>> = Vec::new();
    for v in vectors {
        let mut row = Vec::with_capacity(width * v.len());
        for &c in v {
            row.push(c < 0);
            for &p in &primes {
                row.push(c.unsigned_abs() % p == 0);
            }
        }
        rows.push(row);
    }
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col]) else {
            continue;
        };
        rows.swap(rank, piv);
        for r in 0..rows.len() {
            if r != rank && rows[r][col] {
                let pivot = rows[rank].clone();
                for (x, y) in rows[r].iter_mut().zip(pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn factor_u128(mut m: u128) -> Vec<(u128, u32)> {
    let mut out = Vec::new();
    let mut p: u128 = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}
