//! Real periods by AGM and rational recognition of a Weierstrass value.

use congruum::curves::Parent;
use congruum::hp::HPComplex;
use congruum::torus::{periods, reduce_mod_lattice, weierstrass_p};
use rug::Float;

fn main() {
    for prec in [64u32, 256, 1024] {
        let l = periods(Parent::E1, prec);
        println!("omega(E1) at {prec:>4} bits: {:.40}", l.omega1);
    }
    println!("omega(E2) at 256 bits: {:.40}", periods(Parent::E2, 256).omega1);

    // half the real period is the 2-torsion point (1, 0) on y^2 = x^3 - x
    let l = periods(Parent::E1, 256);
    let half = HPComplex::new(Float::with_val(256, &l.omega1 / 2u32), Float::new(256));
    let p = reduce_mod_lattice(&half, &l, 1e-70);
    let wp = weierstrass_p(&p.z, &l).expect("not a lattice point");
    println!("p(omega/2) = {:.30} + {:.3e} i", wp.re, wp.im.to_f64());
}
