//! The smallest nontrivial monodromy computation: two unit intervals with a
//! quarter-turn jump give W(z) = [[1, z], [−z, 1 − z²]], so
//! log |w22(ir)| = log(1 + r²) in closed form.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

use nevanlinna::{log_abs_w22, monodromy, HamburgerHamiltonian};

fn main() {
    let h = HamburgerHamiltonian::new(vec![1.0, 1.0], vec![FRAC_PI_2, 0.0]).unwrap();

    let z = Complex64::new(0.3, 0.7);
    let w = monodromy(&h, z);
    println!("W(z) at z = {z}:");
    for i in 0..2 {
        println!("  [{:.6}, {:.6}]", w.entry(i, 0), w.entry(i, 1));
    }
    println!(
        "unit-determinant residual: {:.3e}",
        w.unit_det_log_residual()
    );

    println!("\nr, log|w22(ir)|, log(1+r²), rel. difference");
    for exp in [-2i32, 0, 2, 4, 6, 8, 10] {
        let r = 10f64.powi(exp);
        let got = log_abs_w22(&h, r);
        let expected = (1.0 + r * r).ln();
        println!(
            "{:>8.0e}  {:>12.6e}  {:>12.6e}  {:.2e}",
            r,
            got,
            expected,
            ((got - expected) / expected).abs()
        );
    }
}
