//! Rational points on Dy^2 = x^3 - x: naive search for one D, the pruned sweep over
//! all D, and the quartic search on 2-descent torsors.

use congruum::search::{descent_search, independent_subset, naive_search, pruned_search, SearchParams};

fn main() {
    for d in [5i64, 6, 7, 41, 157] {
        match naive_search(d, 200) {
            Some(p) => println!("D = {d:>3}: x = {}/{}  (height {})", p.r, p.s, p.height()),
            None => println!("D = {d:>3}: nothing up to height 200"),
        }
    }

    let found = pruned_search(SearchParams { height_bound: 100, d_bound: 200 }, None);
    println!("\npruned search, height <= 100: {} values of D < 200 have a point", found.len());
    println!("first: {:?}", found.keys().take(15).collect::<Vec<_>>());

    for d in [47i64, 79, 103] {
        match descent_search(d, 512) {
            Some(p) => println!("D = {d}: descent search x = {}/{}, verified {}", p.r, p.s, p.verify()),
            None => println!("D = {d}: descent search found nothing"),
        }
    }

    let pts = congruum::search::collect_points(400, 1255, 64).remove(&1254).unwrap_or_default();
    println!("\nD = 1254: {} points up to height 400, {} independent mod 2E", pts.len(), independent_subset(&pts).len());
}
