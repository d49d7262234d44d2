//! Period lattices of the parent curves and arithmetic on `C / omega Z[i]`.

use rug::{Complete, Float, Integer};

use crate::curves::Parent;
use crate::error::{Error, Result};
use crate::hp::{pi, HPComplex};

/// Square lattice `omega1 Z + i omega1 Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub omega1: Float,
}

impl Lattice {
    pub fn new(omega1: Float) -> Self {
        Lattice { omega1 }
    }

    pub fn omega2(&self) -> HPComplex {
        HPComplex::new(Float::new(self.omega1.prec()), self.omega1.clone())
    }

    pub fn prec(&self) -> u32 {
        self.omega1.prec()
    }

    /// The lattice scaled by a real factor.
    pub fn scaled(&self, s: &Float) -> Lattice {
        Lattice::new(self.omega1.clone() * s)
    }
}

pub fn agm(a: &Float, b: &Float) -> Float {
    a.clone().agm(b)
}

/// Periods of the invariant differential `dx / 2y`.
///
/// E1 (`y^2 = x^3 - x`): `omega1 = pi / agm(sqrt 2, 1)`; E2 (`y^2 = x^3 - 4x`):
/// `omega1 = pi / agm(2, sqrt 2)`.
pub fn periods(parent: Parent, prec: u32) -> Lattice {
    let guard = prec + 32;
    let sqrt2 = Float::with_val(guard, 2).sqrt();
    let m = match parent {
        Parent::E1 => agm(&sqrt2, &Float::with_val(guard, 1)),
        Parent::E2 => agm(&Float::with_val(guard, 2), &sqrt2),
    };
    Lattice::new(Float::with_val(prec, pi(guard) / m))
}

#[derive(Debug, Clone)]
pub struct TorusPoint {
    pub z: HPComplex,
    pub lattice: Lattice,
    pub err: f64,
}

fn frac_mod(x: &Float, w: &Float) -> Float {
    let k = Float::with_val(x.prec(), x / w).floor();
    let mut r = x.clone() - k * w;
    // floor can land exactly on w after rounding
    if r >= *w || r < 0 {
        r = Float::new(x.prec());
    }
    r
}

pub fn reduce_mod_lattice(z: &HPComplex, lattice: &Lattice, err: f64) -> TorusPoint {
    let w = &lattice.omega1;
    TorusPoint {
        z: HPComplex::new(frac_mod(&z.re, w), frac_mod(&z.im, w)),
        lattice: lattice.clone(),
        err,
    }
}

fn dist_to_grid(x: &Float, step: &Float) -> Float {
    let r = frac_mod(x, step);
    let other = Float::with_val(x.prec(), step - &r);
    if r < other {
        r
    } else {
        other
    }
}

/// Absolute distance from `p.z` to the nearest point of `(1/2) Lambda`.
pub fn dist_to_half_lattice(p: &TorusPoint) -> Float {
    let half = Float::with_val(p.lattice.prec(), &p.lattice.omega1 / 2u32);
    let dr = dist_to_grid(&p.z.re, &half);
    let di = dist_to_grid(&p.z.im, &half);
    (dr.clone() * &dr + di.clone() * &di).sqrt()
}

/// Weierstrass `wp(z)` for the square lattice via its q-expansion.
///
/// With `u = exp(2 pi i z / omega1)` and `q = exp(-2 pi)`:
/// `wp = (2 pi i / omega1)^2 [1/12 + u/(1-u)^2 + sum_n (q^n u/(1-q^n u)^2 + q^n/u/(1-q^n/u)^2 - 2 q^n/(1-q^n)^2)]`.
pub fn weierstrass_p(z: &HPComplex, lattice: &Lattice) -> Result<HPComplex> {
    let prec = lattice.prec();
    let w = &lattice.omega1;
    // centre Im(z)/omega in [-1/2, 1/2) so both u and 1/u terms converge alike
    let mut zc = reduce_mod_lattice(z, lattice, 0.0).z;
    let half = Float::with_val(prec, w / 2u32);
    if zc.im >= half {
        zc.im -= w;
    }
    if zc.re.is_zero() && zc.im.is_zero() {
        return Err(Error::Domain("wp has a pole at lattice points".into()));
    }
    let arg = zc.div(&HPComplex::from_real(w.clone()));
    let u = HPComplex::exp_2pi_i(&arg);
    let u_inv = u.recip();
    let q = Float::with_val(prec, -(pi(prec) * 2u32)).exp();
    let one = HPComplex::one(prec);
    let frac = |v: &HPComplex| -> HPComplex {
        let d = &one - v;
        v.div(&(&d * &d))
    };
    let mut s = HPComplex::from_f64(prec, 1.0 / 12.0, 0.0);
    s.re = Float::with_val(prec, 1) / 12u32;
    s += &frac(&u);
    let mut qn = q.clone();
    let eps = Float::with_val(prec, 1) >> (prec + 8);
    loop {
        let qnc = HPComplex::from_real(qn.clone());
        s += &frac(&(&qnc * &u));
        s += &frac(&(&qnc * &u_inv));
        let qr = qn.clone() / Float::with_val(prec, 1 - qn.clone()).square();
        s.re -= qr * 2u32;
        // |u^-1| <= exp(pi) after centring, so the u^-1 terms decay like q^(n - 1/2)
        if Float::with_val(prec, &qn * 24u32) < eps {
            break;
        }
        qn *= &q;
    }
    let c = Float::with_val(prec, pi(prec) * 2u32) / w;
    let c2 = Float::with_val(prec, c.square_ref());
    // (2 pi i / omega)^2 = -(2 pi / omega)^2
    Ok(s.scale(&c2).scale_i64(-1))
}

/// A rational `num/den` within tolerance of the real number `x`, with `|num|, den < height_bound`.
pub fn rational_from_real(x: &Float, tol: &Float, height_bound: u64) -> Option<(i128, i128)> {
    let prec = x.prec();
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut r = x.clone();
    for _ in 0..200 {
        let a = Float::with_val(prec, r.floor_ref());
        let af = a.to_f64();
        if !(af.abs() < 9.0e15) {
            return None;
        }
        let ai = af as i128;
        let p2 = ai.checked_mul(p1)?.checked_add(p0)?;
        let q2 = ai.checked_mul(q1)?.checked_add(q0)?;
        if p2.unsigned_abs() >= height_bound as u128 || q2.unsigned_abs() >= height_bound as u128 {
            return None;
        }
        let approx = Float::with_val(prec, p2) / Float::with_val(prec, q2);
        if Float::with_val(prec, &approx - x).abs() <= *tol {
            return Some((p2, q2));
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let f = Float::with_val(prec, &r - &a);
        if f.is_zero() {
            return None;
        }
        r = f.recip();
    }
    None
}

/// Like [`rational_from_real`] with unbounded integers; the denominator is capped at
/// `max_den_bits` bits.
pub fn rational_from_real_big(x: &Float, tol: &Float, max_den_bits: u32) -> Option<(Integer, Integer)> {
    let prec = x.prec();
    let (mut p0, mut q0) = (Integer::ZERO, Integer::from(1));
    let (mut p1, mut q1) = (Integer::from(1), Integer::ZERO);
    let mut r = x.clone();
    loop {
        let a = r.clone().floor().to_integer()?;
        let p2 = (&a * &p1).complete() + &p0;
        let q2 = (&a * &q1).complete() + &q0;
        if q2.significant_bits() > max_den_bits {
            return None;
        }
        let approx = Float::with_val(prec, &p2) / Float::with_val(prec, &q2);
        if Float::with_val(prec, approx - x).abs() <= *tol {
            return Some((p2, q2));
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let f = Float::with_val(prec, &r - &a);
        if f.is_zero() {
            return None;
        }
        r = f.recip();
    }
}

/// Recover a rational x-coordinate of `wp(p.z)`, if one of small height lies within the error.
pub fn recognize_rational(p: &TorusPoint, height_bound: u64) -> Result<Option<(i128, i128)>> {
    if !(p.err < 1e-12) {
        return Err(Error::Precision(format!(
            "torus error {:.3e} too large to recognise rationals",
            p.err
        )));
    }
    let x = weierstrass_p(&p.z, &p.lattice)?;
    // x varies like wp' * dz; a generous factor covers moderate derivatives
    let tol = p.err * 1e6;
    if x.im.to_f64().abs() > tol {
        return Ok(None);
    }
    let tolf = Float::with_val(x.re.prec(), tol);
    Ok(rational_from_real(&x.re, &tolf, height_bound))
}
