//! Count squarefree |D| in each twist class below a bound.
//!
//!     cargo run --release --example sieve -- 1000000

use congruum::arith::{count_squarefree_classes, ResidueSet};
use congruum::curves::Class;

fn main() {
    let bound: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1_000_000);
    let mut total = 0;
    for cls in Class::ODD_SIGN {
        let n = count_squarefree_classes(bound, ResidueSet::from_mod16(cls.residues_mod16()));
        println!("{:>4} {n}", cls.name());
        total += n;
    }
    println!("odd-sign squarefree |D| < {bound}: {total}");
    let even = count_squarefree_classes(bound, ResidueSet::even_sign());
    println!("even-sign squarefree |D| < {bound}: {even}");
}
