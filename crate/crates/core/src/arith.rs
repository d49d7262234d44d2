//! Exact integer kernel: squarefree decomposition, Kronecker symbols,
//! squarefree sieving by residue class, and reduced binary quadratic forms.

use std::fmt;

use crate::error::{Error, Result};

pub fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Extended Euclid: returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

pub fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn isqrt(n: u64) -> u64 {
    isqrt_u128(n as u128) as u64
}

/// Exact square test; negative numbers are never squares.
pub fn is_square_i128(n: i128) -> bool {
    if n < 0 {
        return false;
    }
    // quick rejection by quadratic residues mod 64
    if (0x0202_0213_0203_0213u64 >> (n & 63)) & 1 == 0 {
        return false;
    }
    let r = isqrt_u128(n as u128);
    r * r == n as u128
}

/// `n = c^2 * s` with `s` squarefree and carrying the sign of `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SquarefreeSplit {
    pub s: i64,
    pub c: u64,
}

impl SquarefreeSplit {
    pub fn reconstruct(&self) -> i128 {
        (self.c as i128) * (self.c as i128) * (self.s as i128)
    }
}

pub fn squarefree_split(n: i64) -> Result<SquarefreeSplit> {
    if n == 0 {
        return Err(Error::Domain("squarefree_split: n must be nonzero".into()));
    }
    let sign = n.signum();
    let mut m = n.unsigned_abs();
    let mut s: u64 = 1;
    let mut c: u64 = 1;
    let mut p: u64 = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            let mut e = 0u32;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            c *= p.pow(e / 2);
            if e % 2 == 1 {
                s *= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    s *= m;
    Ok(SquarefreeSplit { s: sign * s as i64, c })
}

pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            m /= p;
            if m.is_multiple_of(p) {
                return false;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

/// Trial-division factorization of `|n|`, primes ascending.
pub fn factor(n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut m = n;
    let mut p = 2u64;
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

pub fn primes_up_to(n: usize) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Smallest-prime-factor table, for fast squarefree parts of many small integers.
#[derive(Debug, Clone)]
pub struct SpfTable {
    spf: Vec<u32>,
}

impl SpfTable {
    pub fn new(limit: usize) -> Self {
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        SpfTable { spf }
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    pub fn smallest_factor(&self, n: u64) -> u64 {
        self.spf[n as usize] as u64
    }

    /// Squarefree part of `n` (n >= 1, n <= limit).
    pub fn squarefree_part(&self, n: u64) -> u64 {
        debug_assert!(n >= 1 && n <= self.limit());
        let mut m = n as usize;
        let mut s = 1u64;
        while m > 1 {
            let p = self.spf[m] as usize;
            let mut odd = false;
            while m.is_multiple_of(p) {
                m /= p;
                odd = !odd;
            }
            if odd {
                s *= p as u64;
            }
        }
        s
    }
}

/// A set of residues modulo 16, used to select congruence classes of `|D|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResidueSet(u16);

impl ResidueSet {
    pub const EMPTY: ResidueSet = ResidueSet(0);

    pub fn from_mod16(residues: &[u8]) -> Self {
        let mut bits = 0u16;
        for &r in residues {
            bits |= 1 << (r % 16);
        }
        ResidueSet(bits)
    }

    /// Lift residues modulo 8 to both of their residues modulo 16.
    pub fn from_mod8(residues: &[u8]) -> Self {
        let mut bits = 0u16;
        for &r in residues {
            let r = r % 8;
            bits |= 1 << r;
            bits |= 1 << (r + 8);
        }
        ResidueSet(bits)
    }

    /// `|D|` congruent to 5, 6 or 7 mod 8.
    pub fn odd_sign() -> Self {
        Self::from_mod8(&[5, 6, 7])
    }

    /// `|D|` congruent to 1, 2 or 3 mod 8.
    pub fn even_sign() -> Self {
        Self::from_mod8(&[1, 2, 3])
    }

    pub fn union(self, other: Self) -> Self {
        ResidueSet(self.0 | other.0)
    }

    pub fn contains(&self, n: u64) -> bool {
        (self.0 >> (n % 16)) & 1 == 1
    }

    pub fn residues(&self) -> Vec<u8> {
        (0..16u8).filter(|&r| (self.0 >> r) & 1 == 1).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }
}

/// Squarefree positive integers below a bound whose residue mod 16 lies in a set.
///
/// Segmented: each block marks multiples of `p^2` for `p <= sqrt(bound)`, so memory
/// stays at one block regardless of the bound.
pub struct SquarefreeSieve {
    bound: u64,
    classes: ResidueSet,
    primes: Vec<u64>,
    block_start: u64,
    block: Vec<bool>,
    pos: usize,
}

const SIEVE_BLOCK: u64 = 1 << 16;

impl SquarefreeSieve {
    pub fn new(bound: u64, classes: ResidueSet) -> Self {
        let root = isqrt(bound.saturating_sub(1)) as usize;
        let primes = primes_up_to(root.max(2));
        let mut sieve = SquarefreeSieve {
            bound,
            classes,
            primes,
            block_start: 1,
            block: Vec::new(),
            pos: 0,
        };
        sieve.fill_block();
        sieve
    }

    /// Restrict to values `>= start`.
    pub fn starting_at(bound: u64, classes: ResidueSet, start: u64) -> Self {
        let root = isqrt(bound.saturating_sub(1)) as usize;
        let primes = primes_up_to(root.max(2));
        let mut sieve = SquarefreeSieve {
            bound,
            classes,
            primes,
            block_start: start.max(1),
            block: Vec::new(),
            pos: 0,
        };
        sieve.fill_block();
        sieve
    }

    fn fill_block(&mut self) {
        let lo = self.block_start;
        let hi = (lo + SIEVE_BLOCK).min(self.bound);
        self.pos = 0;
        if lo >= hi {
            self.block.clear();
            return;
        }
        let len = (hi - lo) as usize;
        self.block.clear();
        self.block.resize(len, true);
        for &p in &self.primes {
            let sq = p * p;
            if sq >= hi {
                break;
            }
            let mut m = lo.div_ceil(sq) * sq;
            while m < hi {
                self.block[(m - lo) as usize] = false;
                m += sq;
            }
        }
    }
}

impl Iterator for SquarefreeSieve {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            if self.pos >= self.block.len() {
                if self.block.is_empty() {
                    return None;
                }
                self.block_start += self.block.len() as u64;
                self.fill_block();
                if self.block.is_empty() {
                    return None;
                }
            }
            let n = self.block_start + self.pos as u64;
            let keep = self.block[self.pos] && self.classes.contains(n);
            self.pos += 1;
            if keep {
                return Some(n);
            }
        }
    }
}

pub fn sieve_squarefree_classes(bound: u64, classes: ResidueSet) -> SquarefreeSieve {
    SquarefreeSieve::new(bound, classes)
}

pub fn count_squarefree_classes(bound: u64, classes: ResidueSet) -> u64 {
    sieve_squarefree_classes(bound, classes).count() as u64
}

/// Integral binary quadratic form `a x^2 + b xy + c y^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        QuadForm { a, b, c }
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_primitive(&self) -> bool {
        gcd(gcd(self.a, self.b), self.c) == 1
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        a > 0 && b.abs() <= a && a <= c && !((b.abs() == a || a == c) && b < 0)
    }

    /// The reduced form in the SL2(Z)-class of a positive definite form.
    pub fn reduce(&self) -> QuadForm {
        let (mut a, mut b, mut c) = (self.a as i128, self.b as i128, self.c as i128);
        debug_assert!(a > 0 && b * b - 4 * a * c < 0);
        loop {
            if !(-a < b && b <= a) {
                let r = (a - b).div_euclid(2 * a);
                c += r * (b + a * r);
                b += 2 * a * r;
            }
            if a > c {
                std::mem::swap(&mut a, &mut c);
                b = -b;
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            return QuadForm::new(a as i64, b as i64, c as i64);
        }
    }

    pub fn eval(&self, x: i64, y: i64) -> i128 {
        let (x, y) = (x as i128, y as i128);
        self.a as i128 * x * x + self.b as i128 * x * y + self.c as i128 * y * y
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.a, self.b, self.c)
    }
}

fn check_disc(disc: i64) -> Result<()> {
    if disc >= 0 || disc.rem_euclid(4) > 1 {
        return Err(Error::Domain(format!(
            "{disc} is not a negative discriminant (need disc < 0, disc = 0,1 mod 4)"
        )));
    }
    Ok(())
}

/// All reduced primitive forms of a negative discriminant; the length is h(disc).
pub fn reduced_forms(disc: i64) -> Result<Vec<QuadForm>> {
    check_disc(disc)?;
    let n = -disc;
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= n {
        for b in -a + 1..=a {
            if (b - disc).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            let f = QuadForm::new(a, b, c);
            if f.is_reduced() && f.is_primitive() {
                out.push(f);
            }
        }
        a += 1;
    }
    Ok(out)
}

pub fn class_number(disc: i64) -> Result<usize> {
    reduced_forms(disc).map(|v| v.len())
}

/// Fundamental discriminant of `Q(sqrt(r))` for a squarefree integer `r != 1`.
pub fn fundamental_discriminant(r: i64) -> i64 {
    if r.rem_euclid(4) == 1 {
        r
    } else {
        4 * r
    }
}

pub fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let m = m as u128;
    let mut acc: u128 = 1 % m;
    let mut b = b as u128 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc as u64
}

/// A square root of `a` modulo an odd prime `p` (Tonelli-Shanks), if one exists.
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let mut q = p - 1;
    let mut s = 0;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mul = |x: u64, y: u64| (x as u128 * y as u128 % p as u128) as u64;
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul(t2, t2);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul(b, b);
        t = mul(t, c);
        r = mul(r, b);
    }
    Some(r)
}

/// Kronecker symbol `(a/n)` for arbitrary integers.
pub fn kronecker(a: i64, n: i64) -> i8 {
    let mut a = a as i128;
    let mut n = n as i128;
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result: i8 = 1;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let v = n.trailing_zeros();
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if v % 2 == 1 {
            let r = a.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        n >>= v;
    }
    // now n odd positive: Jacobi symbol (a/n)
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

pub fn divisor_count(n: u64) -> u64 {
    factor(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trial_squarefree(n: u64) -> bool {
        (2..).take_while(|p| p * p <= n).all(|p| !n.is_multiple_of(p * p))
    }

    #[test]
    fn split_examples() {
        assert_eq!(squarefree_split(1).unwrap(), SquarefreeSplit { s: 1, c: 1 });
        assert_eq!(squarefree_split(48).unwrap(), SquarefreeSplit { s: 3, c: 4 });
        assert_eq!(squarefree_split(-50).unwrap(), SquarefreeSplit { s: -2, c: 5 });
        assert!(squarefree_split(0).is_err());
    }

    #[test]
    fn split_reconstructs_on_range() {
        for n in -10_000i64..=10_000 {
            if n == 0 {
                continue;
            }
            let sp = squarefree_split(n).unwrap();
            assert_eq!(sp.reconstruct(), n as i128);
            assert!(trial_squarefree(sp.s.unsigned_abs()));
            assert_eq!(sp.s.signum(), n.signum());
        }
    }

    #[test]
    fn sieve_small_cases() {
        let v: Vec<u64> = sieve_squarefree_classes(10, ResidueSet::odd_sign()).collect();
        assert_eq!(v, vec![5, 6, 7]);
        let c6 = ResidueSet::from_mod16(&[6]);
        let brute = (1..100u64).filter(|&n| n % 16 == 6 && trial_squarefree(n)).count() as u64;
        assert_eq!(count_squarefree_classes(100, c6), brute);
    }

    #[test]
    fn sieve_matches_trial_division_up_to_1e5() {
        let classes = ResidueSet::odd_sign();
        let brute: Vec<u64> = (1..100_000u64)
            .filter(|&n| classes.contains(n) && trial_squarefree(n))
            .collect();
        let sieved: Vec<u64> = sieve_squarefree_classes(100_000, classes).collect();
        assert_eq!(brute, sieved);
        let all = ResidueSet::from_mod16(&(0..16).collect::<Vec<_>>());
        let brute_all = (1..100_000u64).filter(|&n| trial_squarefree(n)).count() as u64;
        assert_eq!(count_squarefree_classes(100_000, all), brute_all);
    }

    #[test]
    fn sieve_resumes_mid_range() {
        let classes = ResidueSet::odd_sign();
        let full: Vec<u64> = sieve_squarefree_classes(5000, classes)
            .filter(|&n| n >= 1234)
            .collect();
        let tail: Vec<u64> = SquarefreeSieve::starting_at(5000, classes, 1234).collect();
        assert_eq!(full, tail);
    }

    fn brute_class_number(disc: i64) -> usize {
        // every (a,b,c) in the reduction box |b| <= a <= sqrt(|disc|/3)
        let n = -disc;
        let mut count = 0;
        let mut a = 1;
        while 3 * a * a <= n {
            for b in -a..=a {
                for c in a..=(n + a * a) / (4 * a) + 1 {
                    let f = QuadForm::new(a, b, c);
                    if f.disc() == disc && f.is_reduced() && f.is_primitive() {
                        count += 1;
                    }
                }
            }
            a += 1;
        }
        count
    }

    #[test]
    fn class_numbers_small() {
        assert_eq!(reduced_forms(-4).unwrap(), vec![QuadForm::new(1, 0, 1)]);
        assert_eq!(class_number(-20).unwrap(), brute_class_number(-20));
        assert_eq!(class_number(-20).unwrap(), 2);
        assert_eq!(class_number(-23).unwrap(), 3);
        assert!(reduced_forms(5).is_err());
        assert!(reduced_forms(-6).is_err());
    }

    #[test]
    fn reduced_forms_agree_with_box_count() {
        for disc in (-2000i64..0).filter(|d| d.rem_euclid(4) <= 1) {
            let forms = reduced_forms(disc).unwrap();
            assert_eq!(forms.len(), brute_class_number(disc), "disc {disc}");
            let mut sorted = forms.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), forms.len());
            for f in forms {
                assert!(f.is_reduced() && f.is_primitive() && f.disc() == disc);
            }
        }
    }

    #[test]
    fn reduced_form_counts_full_range() {
        // the box count is quadratic per discriminant, so sample the range sparsely
        for disc in (-10_000i64..0).step_by(37).filter(|d| d.rem_euclid(4) <= 1) {
            assert_eq!(class_number(disc).unwrap(), brute_class_number(disc), "disc {disc}");
        }
    }

    #[test]
    fn modular_square_roots() {
        for p in primes_up_to(400).into_iter().skip(1) {
            for a in 0..p {
                let expected = (0..p).any(|x| x * x % p == a);
                match sqrt_mod_prime(a, p) {
                    Some(r) => assert_eq!(r * r % p, a),
                    None => assert!(!expected, "{a} mod {p}"),
                }
            }
        }
        assert_eq!(pow_mod(2, 10, 1000), 24);
        assert_eq!(pow_mod(7, 0, 1), 0);
    }

    #[test]
    fn kronecker_examples() {
        for n in 1..50 {
            assert_eq!(kronecker(1, n), 1);
            assert_eq!(kronecker(1, -n), 1);
        }
        assert_eq!(kronecker(2, 7), 1);
        for p in [3i64, 7, 11, 19, 23, 31, 43] {
            assert_eq!(kronecker(-1, p), -1);
        }
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(-20, 2), 0);
        assert_eq!(kronecker(5, -1), 1);
        assert_eq!(kronecker(-5, -1), -1);
    }

    fn legendre_euler(a: i64, p: i64) -> i8 {
        let a = a.rem_euclid(p);
        if a == 0 {
            return 0;
        }
        let mut r = 1i64;
        let mut base = a;
        let mut e = (p - 1) / 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        if r == 1 {
            1
        } else {
            -1
        }
    }

    proptest! {
        #[test]
        fn kronecker_matches_euler_on_odd_primes(a in -500i64..500, idx in 0usize..40) {
            let primes = primes_up_to(200);
            let p = primes[1 + idx % (primes.len() - 1)] as i64;
            prop_assert_eq!(kronecker(a, p), legendre_euler(a, p));
        }

        #[test]
        fn kronecker_multiplicative_in_top(a in -300i64..300, b in -300i64..300, n in 1i64..400) {
            prop_assert_eq!(kronecker(a * b, n), kronecker(a, n) * kronecker(b, n));
        }

        #[test]
        fn reduce_preserves_disc_and_lands_reduced(a in 1i64..200, b in -400i64..400, c in 1i64..200) {
            let f = QuadForm::new(a, b, c);
            prop_assume!(f.disc() < 0);
            let r = f.reduce();
            prop_assert_eq!(r.disc(), f.disc());
            prop_assert!(r.is_reduced());
        }
    }
}
