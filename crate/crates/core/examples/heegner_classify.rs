//! Classify twists by the distance of the Heegner trace to 2-torsion.
//!
//!     cargo run --release --example heegner_classify -- 5 6 7 1254

use congruum::curves::classify;
use congruum::heegner::{classify_pd, HeegnerConfig};

fn main() {
    let mut ds: Vec<i64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    if ds.is_empty() {
        ds = vec![5, 6, 7, 13, 14, 15, 21, 22, 23, 1254];
    }
    let cfg = HeegnerConfig::default();
    let forms = cfg.newforms();
    println!("     D  class  h     cm_disc  verdict           dist        prec  min Im tau");
    for d in ds {
        let t = match classify(d) {
            Ok(t) => t,
            Err(e) => {
                println!("{d:>6}  {e}");
                continue;
            }
        };
        match classify_pd(&t, &forms, &cfg) {
            Ok(c) => println!(
                "{d:>6}  {:<5} {:>3} {:>11}  {:<16} {:>10.3e} {:>6} {:>10.4}",
                t.cls.name(),
                c.class_number,
                c.cm_disc,
                c.verdict.name(),
                c.dist,
                c.prec_bits,
                c.min_im_tau
            ),
            Err(e) => println!("{d:>6}  {}  {e}", t.cls.name()),
        }
    }
}
