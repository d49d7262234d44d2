//! Twist class, parent curve, conductor and imaginary quadratic field for a few D.

use congruum::curves::{classify, conductor, field_data, model, two_torsion};

fn main() {
    for d in [5i64, -5, 6, 7, 14, 21, 34, 1254] {
        let t = classify(d).expect("squarefree");
        print!(
            "D = {d:>5}  class {:<9} sign {:+}  parent level {}  N = {}",
            t.cls.name(),
            t.sign,
            t.parent.level(),
            conductor(d)
        );
        match field_data(&t) {
            Ok(f) => println!("  K = Q(sqrt {}), disc {}, 2 {:?}, h = {}", f.radicand, f.disc_k, f.two_behavior, f.class_number),
            Err(_) => println!("  (root number +1, no Heegner point)"),
        }
    }
    let m = model(5);
    println!("\nE_5 model y^2 = x^3 + {} x + {}, discriminant {}", m.a4, m.a6, m.discriminant());
    println!("2-torsion of E_5: {:?}", two_torsion(5));
}
