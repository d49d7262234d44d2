//! CM points on X0(N): discriminant choice and one Heegner form per ideal class.

use std::collections::HashSet;

use rug::Float;

use crate::arith::{class_number, ext_gcd, factor, gcd, pow_mod, sqrt_mod_prime, QuadForm};
use crate::curves::{Class, FieldData, TwistClass};
use crate::error::{Error, Result};
use crate::hp::HPComplex;

/// Discriminant `c^2 disc_K` used on X0(N) and a square root `b0` of it modulo `4N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CmDisc {
    pub level: i64,
    pub disc: i64,
    pub conductor: i64,
    pub b0: i64,
}

/// Conductors tried in order; the inert class needs 8.
pub const CONDUCTORS: [i64; 4] = [1, 2, 4, 8];

fn smallest_root(disc: i64, level: i64) -> Option<i64> {
    (0..2 * level).find(|b| (b * b - disc).rem_euclid(4 * level) == 0)
}

pub fn cm_discriminant(t: &TwistClass, f: &FieldData) -> Result<CmDisc> {
    if t.sign != -1 {
        return Err(Error::Domain(format!("D = {} has root number +1", t.d)));
    }
    let level = t.parent.level();
    for c in CONDUCTORS {
        let disc = c * c * f.disc_k;
        let Some(mut b0) = smallest_root(disc, level) else {
            continue;
        };
        if t.cls == Class::I6 {
            // The smallest root gives a trace that is identically torsion when
            // |D| = 22 mod 32; the root with b0^2 = disc + 4N mod 16N does not.
            b0 = (0..2 * level)
                .find(|b| (b * b - disc - 4 * level).rem_euclid(16 * level) == 0)
                .ok_or_else(|| Error::Invariant(format!("no inert root for D = {}", t.d)))?;
        }
        return Ok(CmDisc {
            level,
            disc,
            conductor: c,
            b0,
        });
    }
    Err(Error::Invariant(format!(
        "no conductor in {CONDUCTORS:?} makes {} a square mod {}",
        f.disc_k,
        4 * level
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CMPoint {
    pub form: QuadForm,
    pub disc: i64,
}

impl CMPoint {
    /// `tau = (-B + sqrt(disc)) / 2A`.
    pub fn tau(&self, prec: u32) -> HPComplex {
        let two_a = 2 * self.form.a;
        let re = Float::with_val(prec, -self.form.b) / two_a;
        let im = Float::with_val(prec, -self.disc).sqrt() / two_a;
        HPComplex::new(re, im)
    }
}

/// Roots `t mod p^e` of `n t^2 + b t + u`.
fn roots_mod_prime_power(n: i64, b: i64, u: i64, p: u64, e: u32) -> Vec<u64> {
    let eval = |t: u64, m: u64| -> bool {
        let (t, m) = (t as i128, m as i128);
        (n as i128 * t * t + b as i128 * t + u as i128).rem_euclid(m) == 0
    };
    let mut roots: Vec<u64> = if p <= 2048 || ((2 * n) as u64).is_multiple_of(p) {
        (0..p).filter(|&t| eval(t, p)).collect()
    } else {
        // t = (-b +- sqrt(b^2 - 4nu)) / 2n
        let pi = p as i128;
        let disc = (b as i128 * b as i128 - 4 * n as i128 * u as i128).rem_euclid(pi) as u64;
        match sqrt_mod_prime(disc, p) {
            None => Vec::new(),
            Some(s) => {
                let inv = pow_mod((2 * n as i128).rem_euclid(pi) as u64, p - 2, p) as i128;
                let mut v: Vec<u64> = [s as i128, -(s as i128)]
                    .iter()
                    .map(|&s| ((-(b as i128) + s).rem_euclid(pi) * inv % pi) as u64)
                    .collect();
                v.dedup();
                v
            }
        }
    };
    let mut pk = p;
    for _ in 1..e {
        let next = pk * p;
        roots = roots
            .iter()
            .flat_map(|&r| (0..p).map(move |j| r + j * pk))
            .filter(|&t| eval(t, next))
            .collect();
        pk = next;
    }
    roots
}

/// All `t mod k` with `n t^2 + b t + u = 0 mod k`, via roots modulo each prime power.
fn quadratic_roots_mod(n: i64, b: i64, u: i64, k: u64) -> Vec<u64> {
    let mut roots = vec![0u64];
    let mut modulus = 1u64;
    for (p, e) in factor(k) {
        let q = p.pow(e);
        let local = roots_mod_prime_power(n, b, u, p, e);
        if local.is_empty() {
            return Vec::new();
        }
        // CRT: x = r (mod modulus), x = l (mod q)
        let inv = mod_inverse(modulus % q, q);
        let mut next = Vec::with_capacity(roots.len() * local.len());
        for &r in &roots {
            for &l in &local {
                let diff = (l as i128 - r as i128).rem_euclid(q as i128) as u128;
                let step = (diff * inv as u128 % q as u128) as u64;
                next.push(r + modulus * step);
            }
        }
        roots = next;
        modulus *= q;
    }
    roots
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let (g, x, _) = ext_gcd(a as i64, m as i64);
    debug_assert_eq!(g, 1);
    x.rem_euclid(m as i64) as u64
}

/// One form `[A, B, C]` per SL2(Z)-class of discriminant `disc`, with `N | A`,
/// `B = b0 mod 2N` and `gcd(A/N, B, CN) = 1`. Representatives have minimal `A`,
/// then minimal `B`.
pub fn enumerate_cm_points(cm: &CmDisc) -> Result<Vec<CMPoint>> {
    let n = cm.level;
    let disc = cm.disc;
    let h = class_number(disc)?;
    let mut seen: HashSet<QuadForm> = HashSet::with_capacity(h);
    let mut out = Vec::with_capacity(h);
    let b0 = cm.b0.rem_euclid(2 * n);
    // B = b0 + 2N t satisfies B^2 = disc mod 4Nk iff N t^2 + b0 t + u = 0 mod k
    let u = (b0 as i128 * b0 as i128 - disc as i128) / (4 * n as i128);
    let mut k = 1i64;
    while out.len() < h {
        let a = n * k;
        let u_k = u.rem_euclid(k as i128) as i64;
        let mut bs: Vec<i64> = quadratic_roots_mod(n, b0, u_k, k as u64)
            .into_iter()
            .map(|t| {
                // the unique B in (-A, A] congruent to b0 + 2N t mod 2A
                let b = (b0 + 2 * n * t as i64).rem_euclid(2 * a);
                if b > a {
                    b - 2 * a
                } else {
                    b
                }
            })
            .collect();
        bs.sort_unstable();
        for b in bs {
            let num = b as i128 * b as i128 - disc as i128;
            debug_assert_eq!(num % (4 * a as i128), 0);
            let c = (num / (4 * a as i128)) as i64;
            let f = QuadForm::new(a, b, c);
            if gcd(gcd(a, b), c) == 1 && gcd(gcd(k, b), c * n) == 1 && seen.insert(f.reduce()) {
                out.push(CMPoint { form: f, disc });
            }
        }
        k += 1;
        if k > 4 * (-disc) + 16 {
            return Err(Error::Invariant(format!(
                "CM enumeration for disc {disc} found {} of {h} classes",
                out.len()
            )));
        }
    }
    Ok(out)
}
