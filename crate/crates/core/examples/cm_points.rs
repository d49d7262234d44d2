//! Heegner discriminant and the CM points on X0(N) used for a twist.
//!
//!     cargo run --release --example cm_points -- 39

use congruum::curves::{classify, field_data};
use congruum::heegner::{cm_discriminant, enumerate_cm_points};

fn main() {
    let d: i64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(39);
    let t = classify(d).expect("squarefree D");
    let f = field_data(&t).expect("odd root number");
    let cm = cm_discriminant(&t, &f).expect("admissible conductor");
    println!(
        "D = {d} ({}): level {}, disc {} = {}^2 * {}, b0 = {}",
        t.cls.name(),
        cm.level,
        cm.disc,
        cm.conductor,
        f.disc_k,
        cm.b0
    );
    let pts = enumerate_cm_points(&cm).expect("points");
    println!("{} points", pts.len());
    for p in pts.iter().take(12) {
        let tau = p.tau(64);
        println!("  [{}, {}, {}]  tau = {:.6} + {:.6} i", p.form.a, p.form.b, p.form.c, tau.re.to_f64(), tau.im.to_f64());
    }
}
