//! Rational points on `E_D` from `x = r/s`: `s^4 (x^3 - x) = rs(r^2 - s^2)` must be
//! `D` times a square.
//!
//! The four factors `r, s, r+s, r-s` (halved when `r = s mod 2`) are pairwise
//! coprime, so `|D|` is the product of their squarefree parts. With `|D| < Delta`
//! one factor has squarefree part below `(4 Delta)^(1/4)` and another at most
//! `(4 Delta / f)^(1/3)`; the pruned search enumerates exactly those two factors.
//!
//! For a single `D`, [`descent_search`] reaches much larger heights by searching the
//! quartics left over by the 2-isogeny descent.

use std::collections::BTreeMap;

use rug::{Complete, Integer};

use crate::arith::{gcd, gcd_i128, isqrt_u128, SpfTable};
use crate::descent::{gf2_rank, selmer_phi_classes, selmer_phihat_classes, torsion_images, two_descent_image};

/// A point with `x = r/s` on `D y^2 = x^3 - x`, `D > 0`.
///
/// `y` is determined up to sign by `x` and is recovered exactly by [`FoundPoint::y`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FoundPoint {
    pub d: i64,
    pub r: i128,
    pub s: i128,
}

impl FoundPoint {
    pub fn new(d: i64, r: i128, s: i128) -> Self {
        FoundPoint { d, r, s }
    }

    pub fn height(&self) -> i128 {
        self.r.abs().max(self.s)
    }

    /// Order used to pick one point per `D`: height, then `|r|`, then `s`.
    pub fn key(&self) -> (i128, i128, i128, i128) {
        (self.height(), self.r.abs(), self.s, self.r)
    }

    /// `rs(r^2 - s^2)`, which is `D` times the square of `s^2 y`.
    fn quartic(&self) -> Integer {
        let (r, s) = (Integer::from(self.r), Integer::from(self.s));
        let diff = (&r * &r).complete() - (&s * &s).complete();
        r * s * diff
    }

    /// Nonnegative `y` as a reduced fraction, when `x` is on the curve.
    pub fn y(&self) -> Option<(Integer, Integer)> {
        if self.d <= 0 || self.s < 1 || gcd_i128(self.r, self.s) != 1 {
            return None;
        }
        let q = self.quartic();
        if q <= 0 {
            return None;
        }
        let (k, rem) = q.div_rem(Integer::from(self.d));
        if rem != 0 || !k.is_perfect_square() {
            return None;
        }
        let num = k.sqrt();
        let den = Integer::from(self.s) * Integer::from(self.s);
        let g = num.gcd_ref(&den).complete();
        Some((num / &g, den / g))
    }

    /// `D y^2 = x^3 - x` with `y != 0`, in exact arithmetic.
    pub fn verify(&self) -> bool {
        self.y().is_some()
    }
}

/// Point on `E_D` (D > 0) for coprime `(r, s)`, `s >= 1`, if `rs(r^2-s^2)` is nonzero.
/// Flips the sign of `r` when needed so that `D > 0`.
fn point_from_pair(r: i64, s: i64, spf: &SpfTable) -> Option<FoundPoint> {
    if r == 0 || r == s || r == -s {
        return None;
    }
    let half = (r - s) % 2 == 0;
    let (f3, f4) = if half {
        ((r + s) / 2, (r - s) / 2)
    } else {
        (r + s, r - s)
    };
    let factors = [r, s, f3, f4];
    let d: u64 = factors.iter().map(|f| spf.squarefree_part(f.unsigned_abs())).product();
    let negative = factors.iter().filter(|f| **f < 0).count() % 2 == 1;
    let r = if negative { -r } else { r };
    Some(FoundPoint::new(d as i64, r as i128, s as i128))
}

/// Exhaustive search over coprime `|r|, s <= h` for a point on `E_D`.
pub fn naive_search(d: i64, h: i64) -> Option<FoundPoint> {
    let d = d.unsigned_abs() as i128;
    for height in 1..=h {
        let mut best: Option<FoundPoint> = None;
        for ra in 0..=height {
            for s in 1..=height {
                if ra.max(s) != height || gcd(ra, s) != 1 {
                    continue;
                }
                for r in [ra, -ra] {
                    if r == 0 || r == s || r == -s {
                        continue;
                    }
                    let (ri, si) = (r as i128, s as i128);
                    let prod = ri * si * (ri * ri - si * si);
                    if prod <= 0 || prod % d != 0 {
                        continue;
                    }
                    let q = prod / d;
                    let k = isqrt_u128(q as u128) as i128;
                    if k * k != q {
                        continue;
                    }
                    let p = FoundPoint::new(d as i64, ri, si);
                    if best.is_none_or(|b| p.key() < b.key()) {
                        best = Some(p);
                    }
                }
            }
        }
        if best.is_some() {
            return best;
        }
    }
    None
}
fn squarefree_values(max_sf: u64, bound: u64, spf: &SpfTable) -> Vec<i64> {
    // all v with |v| <= bound and squarefree part <= max_sf
    let mut out = Vec::new();
    for f in 1..=max_sf.min(bound) {
        if spf.squarefree_part(f) != f {
            continue;
        }
        let mut a = 1u64;
        while f * a * a <= bound {
            let v = (f * a * a) as i64;
            out.push(v);
            out.push(-v);
            a += 1;
        }
    }
    out
}

/// Solve for `(r, s)` given the values of factor positions `i` and `j`
/// (0: r, 1: s, 2: r+s, 3: r-s, halved when `half`).
fn solve_pair(i: usize, vi: i64, j: usize, vj: i64, half: bool) -> Option<(i64, i64)> {
    let m = if half { 2 } else { 1 };
    let (i, vi, j, vj) = if i < j { (i, vi, j, vj) } else { (j, vj, i, vi) };
    let rs = match (i, j) {
        (0, 1) => (vi, vj),
        (0, 2) => (vi, m * vj - vi),
        (0, 3) => (vi, vi - m * vj),
        (1, 2) => (m * vj - vi, vi),
        (1, 3) => (m * vj + vi, vi),
        (2, 3) => {
            let (a, b) = (m * vi, m * vj);
            if (a + b) % 2 != 0 {
                return None;
            }
            ((a + b) / 2, (a - b) / 2)
        }
        _ => return None,
    };
    Some(rs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchParams {
    pub height_bound: i64,
    pub d_bound: u64,
}

/// Pruned search: for each `D < d_bound` passing `filter`, the point of least height
/// with `|r|, s <= height_bound`.
pub fn pruned_search(
    params: SearchParams,
    filter: Option<&dyn Fn(u64) -> bool>,
) -> BTreeMap<u64, FoundPoint> {
    let h = params.height_bound;
    let delta4 = 4.0 * params.d_bound as f64;
    let bound = 2 * h as u64;
    let spf = SpfTable::new(bound as usize + 1);
    let f_max = (delta4.powf(0.25) - 1e-9).floor() as u64;
    let first = squarefree_values(f_max, bound, &spf);
    let mut out: BTreeMap<u64, FoundPoint> = BTreeMap::new();
    let mut consider = |r: i64, s: i64, half: bool| {
        let (r, s) = if s < 0 { (-r, -s) } else { (r, s) };
        if s == 0 || r.abs() > h || s > h || ((r - s) % 2 == 0) != half || gcd(r, s) != 1 {
            return;
        }
        let Some(p) = point_from_pair(r, s, &spf) else {
            return;
        };
        let d = p.d as u64;
        if d >= params.d_bound || filter.is_some_and(|f| !f(d)) {
            return;
        }
        let e = out.entry(d).or_insert(p);
        if p.key() < e.key() {
            *e = p;
        }
    };
    for &vi in &first {
        let f = spf.squarefree_part(vi.unsigned_abs());
        let g_max = (delta4 / f as f64).cbrt().floor() as u64;
        let second = squarefree_values(g_max, bound, &spf);
        for i in 0..4 {
            for j in 0..4 {
                if i == j {
                    continue;
                }
                for &vj in &second {
                    for half in [false, true] {
                        if let Some((r, s)) = solve_pair(i, vi, j, vj, half) {
                            consider(r, s, half);
                        }
                    }
                }
            }
        }
    }
    out
}


const SIEVE_MODULI: [u64; 14] = [64, 9, 25, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43];

/// For each modulus and residue of `e`, 64-bit windows marking the `M` for which
/// `a M^4 + b e^4` is a square modulo that modulus.
struct QuarticSieve {
    // words[k][er * m + o]: bit j set iff M = o + j (mod m) passes
    words: Vec<Vec<u64>>,
}

impl QuarticSieve {
    fn new(a: i128, b: i128) -> Self {
        let words = SIEVE_MODULI
            .iter()
            .map(|&m| {
                let mu = m as usize;
                let mut sq = vec![false; mu];
                for x in 0..m {
                    sq[(x * x % m) as usize] = true;
                }
                let fourth = |c: i128, x: u64| -> usize {
                    let mi = m as i128;
                    let x2 = (x * x % m) as i128;
                    (c.rem_euclid(mi) * (x2 * x2 % mi) % mi) as usize
                };
                let a4: Vec<usize> = (0..m).map(|x| fourth(a, x)).collect();
                let mut w = vec![0u64; mu * mu];
                for er in 0..mu {
                    let be = fourth(b, er as u64);
                    let pat: Vec<bool> = (0..mu).map(|x| sq[(a4[x] + be) % mu]).collect();
                    for o in 0..mu {
                        let mut word = 0u64;
                        for j in 0..64 {
                            if pat[(o + j) % mu] {
                                word |= 1 << j;
                            }
                        }
                        w[er * mu + o] = word;
                    }
                }
                w
            })
            .collect();
        QuarticSieve { words }
    }

    fn window(&self, e: u64, m0: u64) -> u64 {
        let mut w = !0u64;
        for (k, &m) in SIEVE_MODULI.iter().enumerate() {
            w &= self.words[k][((e % m) * m + m0 % m) as usize];
            if w == 0 {
                break;
            }
        }
        w
    }
}

/// First solution with `1 <= M, e <= bound` coprime of `N^2 = a M^4 + b e^4`, scanning
/// `e` and then `M` upward within each of a few growing boxes.
fn quartic_solution(a: i128, b: i128, bound: u64) -> Option<(i128, i128, i128)> {
    let sieve = QuarticSieve::new(a, b);
    let mut boxes: Vec<u64> = [32u64, 256, 2048].into_iter().filter(|&x| x < bound).collect();
    boxes.push(bound);
    let mut done = 0u64;
    for &bx in &boxes {
        for e in 1..=bx {
            // pairs inside the previous box were already tried
            let mut m0 = if e <= done { done + 1 } else { 1 };
            while m0 <= bx {
                let mut w = sieve.window(e, m0);
                if bx - m0 < 63 {
                    w &= (1u64 << (bx - m0 + 1)) - 1;
                }
                while w != 0 {
                    let j = w.trailing_zeros() as u64;
                    w &= w - 1;
                    let (m, e) = ((m0 + j) as i128, e as i128);
                    if gcd_i128(m, e) != 1 {
                        continue;
                    }
                    let (m2, e2) = (m * m, e * e);
                    let v = b.checked_mul(e2 * e2).and_then(|be| (a * m2 * m2).checked_add(be));
                    let Some(v) = v.filter(|&v| v > 0) else {
                        continue;
                    };
                    let n = isqrt_u128(v as u128) as i128;
                    if n * n == v {
                        return Some((m, n, e));
                    }
                }
                m0 += 64;
            }
        }
        done = bx;
    }
    None
}

fn point_from_fraction(d: i128, num: Integer, den: Integer) -> Option<FoundPoint> {
    let g = num.gcd_ref(&den).complete();
    let (mut r, mut s) = (num / &g, den / g);
    if s < 0 {
        r = -r;
        s = -s;
    }
    let p = FoundPoint::new(d as i64, r.to_i128()?, s.to_i128()?);
    p.verify().then_some(p)
}

/// Search the locally solvable quartics of both isogeny descents for `M, e <= bound`.
///
/// `N^2 = a M^4 + (4D^2/a) e^4` gives a point on `y^2 = x^3 + 4D^2 x` whose image under
/// the dual isogeny has `X = N^2 / (4 M^2 e^2)` on `Y^2 = X^3 - D^2 X`; this reaches
/// `x`-heights near `bound^4` and is tried first. `N^2 = a M^4 - (D^2/a) e^4` gives
/// `X = a M^2 / e^2` directly. The first hit is returned.
pub fn descent_search(d: i64, bound: u64) -> Option<FoundPoint> {
    let dd = d.unsigned_abs() as i128;
    for a in selmer_phihat_classes(dd as i64) {
        if let Some((m, n, e)) = quartic_solution(a, 4 * dd * dd / a, bound) {
            // x = X / D
            let num = Integer::from(n) * Integer::from(n);
            let den = Integer::from(4 * dd) * Integer::from(m * m) * Integer::from(e * e);
            if let Some(p) = point_from_fraction(dd, num, den) {
                return Some(p);
            }
        }
    }
    let mut phi = selmer_phi_classes(dd as i64);
    phi.sort_by_key(|a| (a.unsigned_abs(), *a < 0));
    for a in phi {
        if let Some((m, _, e)) = quartic_solution(a, -(dd * dd / a), bound) {
            let num = Integer::from(a * m * m);
            let den = Integer::from(dd * e * e);
            if let Some(p) = point_from_fraction(dd, num, den) {
                return Some(p);
            }
        }
    }
    None
}

/// Every point with `|r|, s <= h` on `E_D` for `D < d_bound`, up to `cap` per `D`,
/// in increasing key order.
pub fn collect_points(h: i64, d_bound: u64, cap: usize) -> BTreeMap<u64, Vec<FoundPoint>> {
    let spf = SpfTable::new(2 * h as usize + 1);
    let mut out: BTreeMap<u64, Vec<FoundPoint>> = BTreeMap::new();
    for s in 1..=h {
        for r in -h..=h {
            if gcd(r, s) != 1 {
                continue;
            }
            if let Some(p) = point_from_pair(r, s, &spf) {
                if (p.d as u64) < d_bound {
                    out.entry(p.d as u64).or_default().push(p);
                }
            }
        }
    }
    for v in out.values_mut() {
        v.sort_by_key(|p| p.key());
        v.truncate(cap);
    }
    out
}

/// Number of points independent modulo torsion, via their images in `E(Q)/2E(Q)`.
pub fn independence_check(points: &[FoundPoint]) -> usize {
    let Some(first) = points.first() else {
        return 0;
    };
    let d = first.d;
    let mut vecs: Vec<Vec<i128>> = torsion_images(d).into_iter().map(|(a, b)| vec![a, b]).collect();
    for p in points {
        // X = D r / s on y^2 = x^3 - D^2 x
        let (a, b) = two_descent_image(d, d as i128 * p.r, p.s);
        vecs.push(vec![a, b]);
    }
    gf2_rank(&vecs).saturating_sub(2)
}

/// Greedy independent subset of `points`, in the given order.
pub fn independent_subset(points: &[FoundPoint]) -> Vec<FoundPoint> {
    let mut chosen: Vec<FoundPoint> = Vec::new();
    for p in points {
        let mut trial = chosen.clone();
        trial.push(*p);
        if independence_check(&trial) == trial.len() {
            chosen = trial;
        }
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_congruent_numbers() {
        let found = pruned_search(SearchParams { height_bound: 100, d_bound: 10 }, None);
        assert_eq!(found[&5].r * 5, -4 * found[&5].s);
        assert_eq!((found[&6].r, found[&6].s), (-1, 2));
        // 25/7 is on E_7, but -9/16 has smaller height
        assert!(found[&7].height() <= 25);
        assert!(FoundPoint::new(7, 25, 7).verify());
        for d in [1, 2, 3] {
            assert!(!found.contains_key(&d));
        }
        for p in found.values() {
            assert!(p.verify());
        }
    }

    #[test]
    fn y_coordinate() {
        // 6 (1/4)^2 = (-1/2)^3 + 1/2
        let (n, d) = FoundPoint::new(6, -1, 2).y().unwrap();
        assert_eq!((n, d), (Integer::from(1), Integer::from(4)));
        assert!(!FoundPoint::new(6, 1, 2).verify());
        assert!(!FoundPoint::new(5, 1, 1).verify());
    }

    #[test]
    fn naive_examples() {
        let p = naive_search(5, 10).unwrap();
        assert_eq!((p.r, p.s), (-4, 5));
        assert!(p.verify());
        assert!(naive_search(1, 60).is_none());
        let p = naive_search(7, 30).unwrap();
        assert!(p.verify());
    }

    #[test]
    fn pruned_agrees_with_naive_small() {
        let found = pruned_search(SearchParams { height_bound: 60, d_bound: 61 }, None);
        for d in 1..61u64 {
            if !crate::arith::is_squarefree(d) {
                continue;
            }
            let naive = naive_search(d as i64, 60);
            assert_eq!(found.get(&d).copied(), naive, "D = {d}");
        }
    }

    #[test]
    fn descent_search_reaches_large_heights() {
        for d in [5i64, 6, 7, 41, 47] {
            let p = descent_search(d, 200).unwrap_or_else(|| panic!("D = {d}"));
            assert!(p.verify(), "{p:?}");
        }
        // the smallest point on E_47 has x of height above 10^5
        assert!(naive_search(47, 300).is_none());
        assert!(descent_search(1, 100).is_none());
        assert!(descent_search(3, 100).is_none());
    }

    #[test]
    fn sieve_keeps_every_solution() {
        // N^2 = 2 M^4 + 2 e^4 at M = e = 1
        assert_eq!(quartic_solution(2, 2, 10), Some((1, 2, 1)));
        let sieve = QuarticSieve::new(3, 5);
        for e in 1..40u64 {
            for m in 1..300u64 {
                let v = 3 * (m as i128).pow(4) + 5 * (e as i128).pow(4);
                let n = isqrt_u128(v as u128) as i128;
                let bit = sieve.window(e, m) & 1 == 1;
                assert!(bit || n * n != v);
            }
        }
    }

    #[test]
    fn independence_examples() {
        let p = naive_search(5, 10).unwrap();
        assert_eq!(independence_check(&[p]), 1);
        // 2P on y^2 = x^3 - 25x: X(2P) = ((X^2 + 25)/(2Y))^2 with (X, Y) = (-4, 6) gives 1681/144
        let double = FoundPoint::new(5, 1681, 720);
        assert!(double.verify());
        assert_eq!(independence_check(&[p, double]), 1);
    }

    #[test]
    fn rank_three_candidate_has_three_points() {
        let pts = collect_points(400, 1255, 64);
        let chosen = independent_subset(&pts[&1254]);
        assert_eq!(chosen.len(), 3, "{:?}", pts[&1254]);
    }
}
