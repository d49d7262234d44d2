//! Coefficients of the level 32 and 64 newforms, checked against point counts mod p.

use congruum::arith::primes_up_to;
use congruum::modform::{coefficients_level32, coefficients_level64, trace_of_frobenius};

fn main() {
    let f32 = coefficients_level32(200);
    let f64_ = coefficients_level64(200);
    let show = |f: &congruum::modform::QExpansion| (1..=30).map(|n| f.a(n).to_string()).collect::<Vec<_>>().join(" ");
    println!("level 32: {}", show(&f32));
    println!("level 64: {}", show(&f64_));

    println!("\n  p  a_p(32)  p+1-#E(F_p)  a_p(64)  y^2=x^3-4x");
    for p in primes_up_to(60).into_iter().skip(1) {
        println!(
            "{p:>3} {:>8} {:>12} {:>8} {:>11}",
            f32.a(p as usize),
            trace_of_frobenius(-1, p),
            f64_.a(p as usize),
            trace_of_frobenius(-4, p)
        );
    }
}
