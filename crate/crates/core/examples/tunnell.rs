//! Representation counts deciding L(E_n, 1) = 0 for root-number +1 twists.

use congruum::tunnell::{even_sign_report, tunnell_counts};

fn main() {
    for n in [1u64, 2, 3, 10, 17, 34, 41, 219] {
        let t = tunnell_counts(n).expect("eligible n");
        println!("n = {n:>3}: A = {:>3}  B = {:>3}  L(E_n,1) {}", t.count_a, t.count_b, if t.vanishing { "= 0" } else { "!= 0" });
    }
    let rows = even_sign_report(1000, 200);
    let vanish: Vec<_> = rows.iter().filter(|r| r.l_vanishes).collect();
    let with_point = vanish.iter().filter(|r| r.point.is_some()).count();
    println!(
        "\nn <= 1000: {} even-sign twists, {} with rank 0 proved, {} with L = 0 ({} with a point of height <= 200)",
        rows.len(),
        rows.len() - vanish.len(),
        vanish.len(),
        with_point
    );
}
