//! Moving CM points toward the cusp at infinity.
//!
//! Plain mode uses only Gamma0(N). Normalizer mode also uses shifts by 1/8 and the
//! Fricke involutions of both levels. The two newforms are related by
//! `z32(tau + 1/8) = zeta8 z64(tau)` and `z64(tau + 1/8) = zeta8 z32(tau)`, so a shift
//! by `j/8` multiplies by `zeta8^j` and switches level when `j` is odd. Fricke at
//! level M gives `z_M(tau) = -z_M(-1/(M tau)) + L_M / 2` with `L_32 = omega/2` and
//! `L_64 = omega/sqrt 2`, `omega` the real period of `y^2 = x^3 - x`.

use rug::Float;

use crate::arith::ext_gcd;
use crate::error::{Error, Result};
use crate::hp::HPComplex;

const MAX_STEPS: usize = 100_000;
const IMPROVEMENT: f64 = 1e-12;

/// How the reduced point relates to the original one:
/// `z_start(tau) = zeta8^zeta_exp * z_level(tau') + sum zeta8^e_k L_{M_k} / 2`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TransformRecord {
    pub level: i64,
    pub zeta_exp: i64,
    /// `(M_k, e_k)` for each Fricke step.
    pub fricke: Vec<(i64, i64)>,
    pub gamma0_steps: usize,
}

impl TransformRecord {
    /// The additive constant, given the real period of `y^2 = x^3 - x`.
    pub fn constant(&self, omega: &Float) -> HPComplex {
        let prec = omega.prec();
        let l32 = Float::with_val(prec, omega / 4u32);
        let l64 = Float::with_val(prec, omega / Float::with_val(prec, 8u32).sqrt());
        let mut c = HPComplex::zero(prec);
        for &(m, e) in &self.fricke {
            let half = if m == 32 { &l32 } else { &l64 };
            c += &HPComplex::zeta8(prec, e).scale(half);
        }
        c
    }
}

#[derive(Debug, Clone)]
pub struct Reduced {
    pub tau: HPComplex,
    pub record: TransformRecord,
}

fn approx(t: &HPComplex) -> (f64, f64) {
    t.to_f64()
}

/// The Gamma0(n) element `(c, d)` minimising `|c tau + d|` with `|c tau + d| < 1`, if any.
fn best_gamma0(x: f64, y: f64, n: i64) -> Option<(i64, i64, f64)> {
    let mut best: Option<(i64, i64, f64)> = None;
    let mut k = 1i64;
    while (n * k) as f64 * y < 1.0 {
        let c = n * k;
        let d0 = (-(c as f64) * x).round() as i64;
        for d in d0 - 2..=d0 + 2 {
            if crate::arith::gcd(c, d) != 1 {
                continue;
            }
            let re = c as f64 * x + d as f64;
            let im = c as f64 * y;
            let v = re * re + im * im;
            if v < 1.0 - IMPROVEMENT && best.is_none_or(|b| v < b.2 * (1.0 - IMPROVEMENT)) {
                best = Some((c, d, v));
            }
        }
        k += 1;
    }
    best
}

fn apply_gamma0(tau: &HPComplex, c: i64, d: i64) -> HPComplex {
    // a d - b c = 1
    let (_, x, y) = ext_gcd(d, c);
    let (a, b) = (x, -y);
    debug_assert_eq!(a as i128 * d as i128 - b as i128 * c as i128, 1);
    let prec = tau.prec();
    let num = &tau.scale_i64(a) + &HPComplex::from_real(Float::with_val(prec, b));
    let den = &tau.scale_i64(c) + &HPComplex::from_real(Float::with_val(prec, d));
    num.div(&den)
}

fn fricke(tau: &HPComplex, m: i64) -> HPComplex {
    tau.scale_i64(m).recip().scale_i64(-1)
}

fn shift(tau: &HPComplex, eighths: i64) -> HPComplex {
    let prec = tau.prec();
    let s = Float::with_val(prec, eighths) / 8u32;
    HPComplex::new(Float::with_val(prec, &tau.re - s), tau.im.clone())
}

fn other(level: i64) -> i64 {
    if level == 32 {
        64
    } else {
        32
    }
}

/// Reduce `tau` on X0(`level`) toward infinity.
pub fn reduce_toward_cusp_infinity(tau: &HPComplex, level: i64, use_normalizer: bool) -> Result<Reduced> {
    if !(level == 32 || level == 64) {
        return Err(Error::Domain(format!("level {level} not supported")));
    }
    if tau.im <= 0 {
        return Err(Error::Domain("tau must lie in the upper half-plane".into()));
    }
    let mut tau = tau.clone();
    let mut rec = TransformRecord {
        level,
        ..Default::default()
    };
    for _ in 0..MAX_STEPS {
        let (x, _) = approx(&tau);
        let j = if use_normalizer {
            (8.0 * x).round() as i64
        } else {
            8 * x.round() as i64
        };
        if j != 0 {
            tau = shift(&tau, j);
            rec.zeta_exp += j;
            if j % 2 != 0 {
                rec.level = other(rec.level);
            }
        }
        let (x, y) = approx(&tau);
        let n = rec.level;

        enum Move {
            Fricke,
            ShiftFricke(i64),
            Gamma0(i64, i64),
        }
        let mut best: Option<(f64, Move)> = None;
        let mut consider = |im: f64, mv: Move| {
            if im > y * (1.0 + IMPROVEMENT) && best.as_ref().is_none_or(|b| im > b.0) {
                best = Some((im, mv));
            }
        };
        if use_normalizer {
            let r2 = x * x + y * y;
            consider(y / (n as f64 * r2), Move::Fricke);
            let m = other(n) as f64;
            for e in [1i64, -1] {
                let xs = x - e as f64 / 8.0;
                consider(y / (m * (xs * xs + y * y)), Move::ShiftFricke(e));
            }
        }
        if let Some((c, d, v)) = best_gamma0(x, y, n) {
            consider(y / v, Move::Gamma0(c, d));
        }
        let Some((_, mv)) = best else {
            rec.zeta_exp = rec.zeta_exp.rem_euclid(8);
            return Ok(Reduced { tau, record: rec });
        };
        match mv {
            Move::Fricke => {
                rec.fricke.push((n, rec.zeta_exp.rem_euclid(8)));
                rec.zeta_exp += 4;
                tau = fricke(&tau, n);
            }
            Move::ShiftFricke(e) => {
                tau = shift(&tau, e);
                rec.zeta_exp += e;
                rec.level = other(n);
                rec.fricke.push((rec.level, rec.zeta_exp.rem_euclid(8)));
                rec.zeta_exp += 4;
                tau = fricke(&tau, rec.level);
            }
            Move::Gamma0(c, d) => {
                rec.gamma0_steps += 1;
                tau = apply_gamma0(&tau, c, d);
            }
        }
    }
    Err(Error::Invariant("reduction did not terminate".into()))
}
