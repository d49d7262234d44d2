//! The twists `E_D: Dy^2 = x^3 - x`, stored internally as `y^2 = x^3 - D^2 x`.

use std::fmt;

use crate::arith::{class_number, fundamental_discriminant, kronecker, squarefree_split};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    /// `|D| = 5 mod 8`: 2 ramifies in `K_D`.
    S5,
    /// `|D| = 7 mod 8`: 2 splits.
    S7,
    /// `|D| = 6 mod 16`: 2 inert.
    I6,
    /// `|D| = 14 mod 16`: 2 splits.
    I14,
    /// `|D| = 1, 2, 3 mod 8`: root number +1.
    EvenSign,
}

impl Class {
    pub const ODD_SIGN: [Class; 4] = [Class::S5, Class::S7, Class::I6, Class::I14];

    pub fn of_abs(abs_d: u64) -> Class {
        match abs_d % 16 {
            5 | 13 => Class::S5,
            7 | 15 => Class::S7,
            6 => Class::I6,
            14 => Class::I14,
            _ => Class::EvenSign,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Class::S5 => "S5",
            Class::S7 => "S7",
            Class::I6 => "I6",
            Class::I14 => "I14",
            Class::EvenSign => "EVEN_SIGN",
        }
    }

    pub fn parse(s: &str) -> Option<Class> {
        match s {
            "S5" => Some(Class::S5),
            "S7" => Some(Class::S7),
            "I6" => Some(Class::I6),
            "I14" => Some(Class::I14),
            "EVEN_SIGN" => Some(Class::EvenSign),
            _ => None,
        }
    }

    /// Residues of `|D|` mod 16 belonging to this class (squarefree values only
    /// ever hit the ones listed).
    pub fn residues_mod16(&self) -> &'static [u8] {
        match self {
            Class::S5 => &[5, 13],
            Class::S7 => &[7, 15],
            Class::I6 => &[6],
            Class::I14 => &[14],
            Class::EvenSign => &[1, 2, 3, 9, 10, 11],
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parent {
    /// `y^2 = x^3 - x`, conductor 32.
    E1,
    /// `y^2 = x^3 - 4x`, conductor 64.
    E2,
}

impl Parent {
    pub fn level(&self) -> i64 {
        match self {
            Parent::E1 => 32,
            Parent::E2 => 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwistClass {
    /// Squarefree representative.
    pub d: i64,
    pub abs_d: u64,
    pub cls: Class,
    pub sign: i8,
    pub parent: Parent,
}

pub fn classify(d: i64) -> Result<TwistClass> {
    let s = squarefree_split(d)?.s;
    let abs_d = s.unsigned_abs();
    if abs_d % 4 == 0 {
        return Err(Error::Invariant(format!("squarefree part {s} divisible by 4")));
    }
    let cls = Class::of_abs(abs_d);
    Ok(TwistClass {
        d: s,
        abs_d,
        cls,
        sign: if cls == Class::EvenSign { 1 } else { -1 },
        parent: if abs_d % 2 == 1 { Parent::E1 } else { Parent::E2 },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoBehavior {
    Split,
    Ramified,
    Inert,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldData {
    pub radicand: i64,
    pub disc_k: i64,
    pub two_behavior: TwoBehavior,
    pub class_number: usize,
}

pub fn field_data(t: &TwistClass) -> Result<FieldData> {
    if t.sign != -1 {
        return Err(Error::Domain(format!(
            "field data requested for root-number +1 twist D = {}",
            t.d
        )));
    }
    let radicand = match t.parent {
        Parent::E1 => -(t.abs_d as i64),
        Parent::E2 => -(t.abs_d as i64 / 2),
    };
    let disc_k = fundamental_discriminant(radicand);
    let two_behavior = match kronecker(disc_k, 2) {
        1 => TwoBehavior::Split,
        -1 => TwoBehavior::Inert,
        _ => TwoBehavior::Ramified,
    };
    Ok(FieldData {
        radicand,
        disc_k,
        two_behavior,
        class_number: class_number(disc_k)?,
    })
}

/// `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurveModel {
    pub a1: i128,
    pub a2: i128,
    pub a3: i128,
    pub a4: i128,
    pub a6: i128,
    pub conductor: u128,
}

impl CurveModel {
    pub fn short(a4: i128, a6: i128, conductor: u128) -> Self {
        CurveModel {
            a1: 0,
            a2: 0,
            a3: 0,
            a4,
            a6,
            conductor,
        }
    }

    /// Discriminant of a short model, `-16(4 a4^3 + 27 a6^2)`.
    pub fn discriminant(&self) -> i128 {
        debug_assert!(self.a1 == 0 && self.a2 == 0 && self.a3 == 0);
        -16 * (4 * self.a4 * self.a4 * self.a4 + 27 * self.a6 * self.a6)
    }

    pub fn contains(&self, x: i128, y: i128) -> bool {
        y * y + self.a1 * x * y + self.a3 * y
            == x * x * x + self.a2 * x * x + self.a4 * x + self.a6
    }
}

/// Conductor of `E_D` for squarefree `D`: `32 D^2` for odd `D`, `16 D^2` for even `D`.
pub fn conductor(d: i64) -> u128 {
    let a = d.unsigned_abs() as u128;
    if a % 2 == 1 {
        32 * a * a
    } else {
        16 * a * a
    }
}

pub fn model(d: i64) -> CurveModel {
    let d = d as i128;
    CurveModel::short(-d * d, 0, conductor(d as i64))
}

/// The three 2-isogenous twists `Dy^2 = x^3 + 4x` and `Dy^2 = x^3 - 11x +/- 14`,
/// scaled to integral short models.
pub fn isogenous_models(d: i64) -> [CurveModel; 3] {
    let n = conductor(d);
    let d = d as i128;
    let d2 = d * d;
    [
        CurveModel::short(4 * d2, 0, n),
        CurveModel::short(-11 * d2, 14 * d2 * d, n),
        CurveModel::short(-11 * d2, -14 * d2 * d, n),
    ]
}

/// Rational 2-torsion on `y^2 = x^3 - D^2 x`; `None` is the point at infinity.
pub fn two_torsion(d: i64) -> [Option<(i64, i64)>; 4] {
    [None, Some((0, 0)), Some((d, 0)), Some((-d, 0))]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{factor, reduced_forms, sieve_squarefree_classes, ResidueSet};

    #[test]
    fn class_examples() {
        let t = classify(7).unwrap();
        assert_eq!((t.cls, t.sign, t.parent), (Class::S7, -1, Parent::E1));
        assert_eq!(field_data(&t).unwrap().two_behavior, TwoBehavior::Split);
        let t = classify(5).unwrap();
        assert_eq!(t.cls, Class::S5);
        assert_eq!(field_data(&t).unwrap().two_behavior, TwoBehavior::Ramified);
        let t = classify(6).unwrap();
        assert_eq!((t.cls, t.parent), (Class::I6, Parent::E2));
        assert_eq!(field_data(&t).unwrap().two_behavior, TwoBehavior::Inert);
        let t = classify(1).unwrap();
        assert_eq!((t.cls, t.sign), (Class::EvenSign, 1));
        assert!(field_data(&t).is_err());
    }

    #[test]
    fn field_examples() {
        let f = field_data(&classify(7).unwrap()).unwrap();
        assert_eq!((f.radicand, f.disc_k, f.class_number), (-7, -7, 1));
        let f = field_data(&classify(5).unwrap()).unwrap();
        assert_eq!((f.radicand, f.disc_k), (-5, -20));
        assert_eq!(f.class_number, reduced_forms(-20).unwrap().len());
        assert_eq!(f.class_number, 2);
        let f = field_data(&classify(6).unwrap()).unwrap();
        assert_eq!((f.radicand, f.disc_k, f.class_number), (-3, -3, 1));
    }

    #[test]
    fn twist_invariance() {
        for d in sieve_squarefree_classes(2000, ResidueSet::from_mod16(&(0..16).collect::<Vec<_>>())) {
            let d = d as i64;
            let t = classify(d).unwrap();
            assert_eq!(t.cls, classify(-d).unwrap().cls);
            assert_eq!(t.cls, classify(9 * d).unwrap().cls);
            assert_eq!(t.cls, classify(-25 * d).unwrap().cls);
            assert_eq!(t.parent == Parent::E2, d % 2 == 0);
        }
    }

    #[test]
    fn two_behavior_matches_disc_mod_8() {
        for d in sieve_squarefree_classes(1000, ResidueSet::odd_sign()) {
            let t = classify(d as i64).unwrap();
            let f = field_data(&t).unwrap();
            let expected = if f.disc_k % 2 == 0 {
                TwoBehavior::Ramified
            } else if f.disc_k.rem_euclid(8) == 1 {
                TwoBehavior::Split
            } else {
                TwoBehavior::Inert
            };
            assert_eq!(f.two_behavior, expected, "D = {d}");
            let by_class = match t.cls {
                Class::S7 | Class::I14 => TwoBehavior::Split,
                Class::S5 => TwoBehavior::Ramified,
                _ => TwoBehavior::Inert,
            };
            assert_eq!(f.two_behavior, by_class);
        }
    }

    #[test]
    fn isogenous_models_for_one() {
        let [a, b, c] = isogenous_models(1);
        assert_eq!((a.a4, a.a6), (4, 0));
        assert_eq!((b.a4, b.a6), (-11, 14));
        assert_eq!((c.a4, c.a6), (-11, -14));
    }

    #[test]
    fn isogenous_models_share_bad_primes() {
        for d in [1i64, 5, 6, 7, -13, 30, 101] {
            let mut supports = Vec::new();
            for m in isogenous_models(d).iter().chain(std::iter::once(&model(d))) {
                let disc = m.discriminant();
                assert_ne!(disc, 0);
                let mut primes: Vec<u64> =
                    factor(disc.unsigned_abs() as u64).iter().map(|&(p, _)| p).collect();
                primes.sort();
                supports.push(primes);
            }
            assert!(supports.windows(2).all(|w| w[0] == w[1]), "D = {d}: {supports:?}");
        }
        let five: Vec<u64> = factor(isogenous_models(5)[1].discriminant().unsigned_abs() as u64)
            .iter()
            .map(|&(p, _)| p)
            .collect();
        assert_eq!(five, vec![2, 5]);
    }

    #[test]
    fn torsion_points_on_curve() {
        for d in [1i64, 5, 6, 7, 210] {
            let m = model(d);
            for p in two_torsion(d).iter().flatten() {
                assert!(m.contains(p.0 as i128, p.1 as i128));
            }
        }
        let xs: Vec<i64> = two_torsion(5).iter().flatten().map(|p| p.0).collect();
        assert_eq!(xs, vec![0, 5, -5]);
    }

    #[test]
    fn conductor_closed_form() {
        assert_eq!(conductor(1), 32);
        assert_eq!(conductor(2), 64);
        // E_D for even D is the twist of the level-64 curve by the odd part of D
        for d in (1..=100i64).filter(|d| crate::arith::is_squarefree(*d as u64)) {
            let t = classify(d).unwrap();
            let expected = match t.parent {
                Parent::E1 => 32 * (d * d) as u128,
                Parent::E2 => 64 * ((d / 2) * (d / 2)) as u128,
            };
            assert_eq!(conductor(d), expected);
        }
    }
}
