//! Even-sign twists: whether `L(E_n, 1)` vanishes, from representation counts by two
//! ternary forms.
//!
//! Odd `n` counts `n = 2x^2 + y^2 + 32z^2` against `n = 2x^2 + y^2 + 8z^2`; even
//! `n = 2m` counts `m = 4x^2 + y^2 + 32z^2` against `m = 4x^2 + y^2 + 8z^2`. The
//! L-value vanishes iff the first count is half the second. A nonzero L-value proves
//! rank 0.

use crate::arith::{is_squarefree, isqrt, ResidueSet, SquarefreeSieve};
use crate::error::{Error, Result};
use crate::search::{naive_search, FoundPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TunnellCounts {
    pub n: u64,
    pub count_a: u64,
    pub count_b: u64,
    pub vanishing: bool,
}

/// Coefficient of `x^2` and the form argument for the parity of `n`.
fn forms_for(n: u64) -> (u64, u64) {
    if n.is_multiple_of(2) {
        (4, n / 2)
    } else {
        (2, n)
    }
}

fn eligible(n: u64) -> Result<()> {
    if n == 0 || !is_squarefree(n) {
        return Err(Error::Domain(format!("{n} is not a positive squarefree integer")));
    }
    if !matches!(n % 8, 1..=3) {
        return Err(Error::Domain(format!("{n} has root number -1; L(E_n, 1) = 0 identically")));
    }
    Ok(())
}

/// Solutions of `a x^2 + y^2 + c z^2 = m`, looping over `x, z` and solving for `y`.
pub fn count_representations(a: u64, c: u64, m: u64) -> u64 {
    let mut count = 0;
    let xmax = isqrt(m / a);
    let zmax = isqrt(m / c);
    for x in 0..=xmax {
        let ax = a * x * x;
        for z in 0..=zmax {
            let rest = match m.checked_sub(ax + c * z * z) {
                Some(r) => r,
                None => break,
            };
            let y = isqrt(rest);
            if y * y != rest {
                continue;
            }
            let mult = |v: u64| if v == 0 { 1 } else { 2 };
            count += mult(x) * mult(y) * mult(z);
        }
    }
    count
}

/// Same count with a plain triple loop over signed values.
pub fn count_representations_naive(a: u64, c: u64, m: u64) -> u64 {
    let r = |k: u64| isqrt(m / k) as i64;
    let (xm, ym, zm) = (r(a), r(1), r(c));
    let mut count = 0;
    for x in -xm..=xm {
        for y in -ym..=ym {
            for z in -zm..=zm {
                let v = a as i64 * x * x + y * y + c as i64 * z * z;
                if v == m as i64 {
                    count += 1;
                }
            }
        }
    }
    count
}

pub fn tunnell_counts(n: u64) -> Result<TunnellCounts> {
    eligible(n)?;
    let (a, m) = forms_for(n);
    let count_a = count_representations(a, 32, m);
    let count_b = count_representations(a, 8, m);
    Ok(TunnellCounts {
        n,
        count_a,
        count_b,
        vanishing: 2 * count_a == count_b,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvenSignRow {
    pub n: u64,
    pub rank0_proved: bool,
    pub l_vanishes: bool,
    /// Search result for vanishing rows, up to the report's height bound.
    pub point: Option<FoundPoint>,
}

/// One row per squarefree `n <= bound` with `n = 1, 2, 3 mod 8`.
pub fn even_sign_report(bound: u64, height_bound: i64) -> Vec<EvenSignRow> {
    SquarefreeSieve::new(bound + 1, ResidueSet::even_sign())
        .map(|n| {
            let t = tunnell_counts(n).expect("eligible by construction");
            let point = if t.vanishing && height_bound > 0 {
                naive_search(n as i64, height_bound)
            } else {
                None
            };
            EvenSignRow {
                n,
                rank0_proved: !t.vanishing,
                l_vanishes: t.vanishing,
                point,
            }
        })
        .collect()
}
