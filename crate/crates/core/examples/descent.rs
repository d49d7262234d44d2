//! 2-isogeny Selmer bounds and the rank-3 filter.

use congruum::curves::Class;
use congruum::descent::{rank3_filter, selmer_bound, selmer_phi_classes, selmer_phihat_classes};

fn main() {
    println!("     D  class  phi  phihat  rank <=");
    for d in [5i64, 6, 7, 14, 34, 41, 1254, 2605, 5070] {
        let b = selmer_bound(d);
        println!("{d:>6}  {:<5} {:>4} {:>7} {:>8}", Class::of_abs(d as u64).name(), b.dim_phi, b.dim_phihat, b.rank_upper);
    }
    println!("\nSelmer classes for D = 1254");
    println!("  phi:    {:?}", selmer_phi_classes(1254));
    println!("  phihat: {:?}", selmer_phihat_classes(1254));

    let survivors: Vec<u64> = (5..3000u64)
        .filter(|&d| matches!(d % 8, 5..=7) && congruum::arith::is_squarefree(d))
        .filter(|&d| rank3_filter(d as i64))
        .collect();
    println!("\n{} twists below 3000 pass the rank-3 filter: {:?}", survivors.len(), survivors);
}
