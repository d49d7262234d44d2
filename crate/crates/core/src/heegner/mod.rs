//! Traces of CM points on X0(32) and X0(64) and their distance to 2-torsion.
//!
//! For each `D` with root number -1 the CM points of one discriminant are summed
//! under the Abel map, one per ideal class. The anti-invariant part
//! `w = z_K - conj(z_K)` is torsion exactly when it lies on the half-lattice of
//! the torsion-test lattice: `(omega/2) Z[i]` at level 32 and `(omega/sqrt 2) Z[i]`
//! at level 64, `omega` the real period of `y^2 = x^3 - x`.

mod cm;
mod reduce;

pub use cm::{cm_discriminant, enumerate_cm_points, CMPoint, CmDisc, CONDUCTORS};
pub use reduce::{reduce_toward_cusp_infinity, Reduced, TransformRecord};

use std::fmt;

use rug::{Float, Integer};

use crate::curves::{field_data, Parent, TwistClass};
use crate::error::{Error, Result};
use crate::hp::HPComplex;
use crate::modform::{abel_map_bits, coefficients_level32, coefficients_level64, QExpansion};
use crate::torus::{
    dist_to_half_lattice, periods, rational_from_real_big, reduce_mod_lattice, weierstrass_p, Lattice, TorusPoint,
};

/// Identifies the CM recipe in output metadata.
pub const CM_RECIPE: &str = "full-class-trace;conductor<=8;inert-b0=disc+4N";

/// Newform coefficients shared by every computation.
#[derive(Debug, Clone)]
pub struct Newforms {
    pub f32: QExpansion,
    pub f64: QExpansion,
}

impl Newforms {
    pub fn new(len: usize) -> Self {
        Newforms {
            f32: coefficients_level32(len),
            f64: coefficients_level64(len),
        }
    }

    pub fn len(&self) -> usize {
        self.f32.len().min(self.f64.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn level(&self, n: i64) -> &QExpansion {
        if n == 32 {
            &self.f32
        } else {
            &self.f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeegnerConfig {
    pub ladder: Vec<u32>,
    pub threshold_nontorsion: f64,
    pub threshold_torsion: f64,
    pub use_normalizer: bool,
    /// Maximum number of series terms per Abel-map evaluation.
    pub series_ceiling: usize,
}

impl Default for HeegnerConfig {
    fn default() -> Self {
        HeegnerConfig {
            ladder: vec![256, 512, 1024],
            threshold_nontorsion: 1e-8,
            threshold_torsion: 1e-20,
            use_normalizer: true,
            series_ceiling: 4096,
        }
    }
}

impl HeegnerConfig {
    /// Coefficient count that covers the configured ceiling.
    pub fn newforms(&self) -> Newforms {
        Newforms::new(self.series_ceiling)
    }
}

/// Per-point series target, in bits, at a given precision: comfortably below the rounding floor.
pub fn point_target_bits(prec: u32) -> f64 {
    prec as f64 - 40.0
}

#[derive(Debug, Clone)]
pub struct PDValue {
    /// `w` reduced modulo the torsion-test lattice.
    pub w: TorusPoint,
    pub z_k: HPComplex,
    pub err: f64,
    pub cm: CmDisc,
    pub class_number: usize,
    pub min_im_tau: f64,
    pub terms: usize,
}

/// Lattice on whose half-points `w` sits exactly when `P_D` is torsion.
pub fn torsion_lattice(parent: Parent, prec: u32) -> Lattice {
    let omega = periods(Parent::E1, prec).omega1;
    match parent {
        Parent::E1 => Lattice::new(omega / 2u32),
        Parent::E2 => periods(Parent::E2, prec),
    }
}

pub fn compute_pd(t: &TwistClass, forms: &Newforms, prec: u32, cfg: &HeegnerConfig) -> Result<PDValue> {
    let f = field_data(t)?;
    let cm = cm_discriminant(t, &f)?;
    let points = enumerate_cm_points(&cm)?;
    let omega = periods(Parent::E1, prec + 16).omega1;
    let target = point_target_bits(prec);
    let mut z_k = HPComplex::zero(prec);
    let mut err = 0.0;
    let mut min_im = f64::INFINITY;
    let mut terms = 0;
    for p in &points {
        let red = reduce_toward_cusp_infinity(&p.tau(prec), cm.level, cfg.use_normalizer)?;
        min_im = min_im.min(red.tau.im.to_f64());
        let v = abel_map_bits(forms.level(red.record.level), &red.tau, target, cfg.series_ceiling)?;
        terms = terms.max(v.terms);
        let rotated = &HPComplex::zeta8(prec, red.record.zeta_exp) * &v.z;
        z_k += &rotated;
        z_k += &red.record.constant(&omega);
        // rotation by zeta8 and the Fricke constants add a few ulps each
        err += v.err + ((red.record.fricke.len() as f64 + 4.0) * 2f64.powi(4 - prec as i32)).max(f64::MIN_POSITIVE);
    }
    let w = &z_k - &z_k.conj();
    let lattice = torsion_lattice(t.parent, prec);
    Ok(PDValue {
        w: reduce_mod_lattice(&w, &lattice, 2.0 * err),
        z_k,
        err: 2.0 * err,
        cm,
        class_number: points.len(),
        min_im_tau: min_im,
        terms,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Nontorsion,
    TorsionCandidate,
    Indeterminate,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Nontorsion => "Nontorsion",
            Verdict::TorsionCandidate => "TorsionCandidate",
            Verdict::Indeterminate => "Indeterminate",
        }
    }

    pub fn parse(s: &str) -> Option<Verdict> {
        match s {
            "Nontorsion" => Some(Verdict::Nontorsion),
            "TorsionCandidate" => Some(Verdict::TorsionCandidate),
            "Indeterminate" => Some(Verdict::Indeterminate),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub d: i64,
    pub verdict: Verdict,
    /// Distance to the nearest half-lattice point, in units of the parent's real period.
    pub dist: f64,
    pub err: f64,
    pub prec_bits: u32,
    pub class_number: usize,
    pub cm_disc: i64,
    pub min_im_tau: f64,
}

fn dist_ratio(v: &PDValue, parent: Parent) -> (f64, f64) {
    let prec = v.w.lattice.prec();
    let omega = periods(parent, prec).omega1;
    let d = Float::with_val(prec, dist_to_half_lattice(&v.w) / &omega);
    (d.to_f64(), v.err / omega.to_f64())
}

pub fn classify_pd(t: &TwistClass, forms: &Newforms, cfg: &HeegnerConfig) -> Result<Classification> {
    if t.sign != -1 {
        return Err(Error::Domain(format!("D = {} has root number +1", t.d)));
    }
    let mut last: Option<Classification> = None;
    for &prec in &cfg.ladder {
        let v = match compute_pd(t, forms, prec, cfg) {
            Ok(v) => v,
            Err(Error::SeriesCeiling { .. }) => break,
            Err(e) => return Err(e),
        };
        let (dist, err) = dist_ratio(&v, t.parent);
        let verdict = if dist >= cfg.threshold_nontorsion && err < 0.1 * cfg.threshold_nontorsion {
            Verdict::Nontorsion
        } else if dist <= cfg.threshold_torsion && err < 0.1 * cfg.threshold_torsion {
            Verdict::TorsionCandidate
        } else {
            Verdict::Indeterminate
        };
        let c = Classification {
            d: t.d,
            verdict,
            dist,
            err,
            prec_bits: prec,
            class_number: v.class_number,
            cm_disc: v.cm.disc,
            min_im_tau: v.min_im_tau,
        };
        if verdict != Verdict::Indeterminate {
            return Ok(c);
        }
        last = Some(c);
    }
    Ok(last.unwrap_or_else(|| Classification {
        d: t.d,
        verdict: Verdict::Indeterminate,
        dist: f64::NAN,
        err: f64::INFINITY,
        prec_bits: cfg.ladder.last().copied().unwrap_or(0),
        class_number: 0,
        cm_disc: 0,
        min_im_tau: f64::NAN,
    }))
}

/// A rational point on `|D| y^2 = x^3 - x` read off the Heegner trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeegnerPoint {
    pub d: u64,
    pub x_num: Integer,
    pub x_den: Integer,
    pub prec_bits: u32,
}

impl HeegnerPoint {
    /// Exact check that `x` lies on the curve with `y != 0`.
    pub fn verify(&self) -> bool {
        on_twist(self.d, &self.x_num, &self.x_den)
    }

    pub fn height_bits(&self) -> u32 {
        self.x_num.significant_bits().max(self.x_den.significant_bits())
    }
}

fn on_twist(d: u64, n: &Integer, den: &Integer) -> bool {
    if *den <= 0 {
        return false;
    }
    // y^2 = (n^3 - n den^2) / (d den^3), a square iff d den (n^3 - n den^2) is one
    let v = (Integer::from(n * n) - Integer::from(den * den)) * n * den * d;
    v > 0 && v.is_perfect_square()
}

/// Recognise `P_D` as a rational point.
///
/// On `C / Lambda` of the parent curve the anti-invariant trace `w` has
/// `x = -wp(w)` at level 32 and `x = -wp(w)/2` at level 64; when `w` is only
/// known up to 2-torsion `2w` is tried as well. Returns `None` for torsion traces
/// or when no rational of at most `prec/3` bits in the denominator fits.
pub fn heegner_point(t: &TwistClass, forms: &Newforms, cfg: &HeegnerConfig) -> Result<Option<HeegnerPoint>> {
    if t.sign != -1 {
        return Err(Error::Domain(format!("D = {} has root number +1", t.d)));
    }
    for &prec in &cfg.ladder {
        let v = match compute_pd(t, forms, prec, cfg) {
            Ok(v) => v,
            Err(Error::SeriesCeiling { .. }) => break,
            Err(e) => return Err(e),
        };
        let w = &v.z_k - &v.z_k.conj();
        let lattice = periods(t.parent, prec);
        let scale = match t.parent {
            Parent::E1 => -1,
            Parent::E2 => -2,
        };
        let tol = Float::with_val(prec, 1) >> (prec / 2);
        for k in [1, 2] {
            let Ok(x) = weierstrass_p(&w.scale_i64(k), &lattice) else {
                continue;
            };
            let x = Float::with_val(prec, &x.re / scale);
            if let Some((n, den)) = rational_from_real_big(&x, &tol, prec / 3) {
                if on_twist(t.abs_d, &n, &den) {
                    return Ok(Some(HeegnerPoint {
                        d: t.abs_d,
                        x_num: n,
                        x_den: den,
                        prec_bits: prec,
                    }));
                }
            }
        }
    }
    Ok(None)
}
