//! Indeterminacy diagnostics: the kernel sum Σ K_{jk}² equals 2·det Ω(0, L)
//! exactly, and its tail behavior separates limit circle from limit point.

use nevanlinna::jacobi::{carleman_sum, indeterminacy_diagnostic};
use nevanlinna::JacobiParameters;

fn main() {
    // b_n = (n+1)²: indeterminate (limit circle).
    let n = 4500;
    let fast = JacobiParameters::new(
        vec![0.0; n],
        (0..n).map(|k| ((k + 1) as f64).powi(2)).collect(),
    )
    .unwrap();
    let rep = indeterminacy_diagnostic(&fast).unwrap();
    println!("b_n = (n+1)²:");
    println!("  Σ K² = {:.9}", rep.sum_k_squared);
    println!("  2 det Ω = {:.9}", rep.two_det_omega);
    println!("  identity rel. err = {:.2e}", rep.identity_rel_err);
    println!("  tail flag: {:?}", rep.flag);

    // b_n = 1: determinate (limit point), the sum grows without bound.
    let n = 800;
    let flat = JacobiParameters::new(vec![0.0; n], vec![1.0; n]).unwrap();
    let rep = indeterminacy_diagnostic(&flat).unwrap();
    println!("\nb_n = 1:");
    println!("  Σ K² = {:.3} over {n} terms", rep.sum_k_squared);
    println!("  tail flag: {:?}", rep.flag);

    // Carleman's condition Σ 1/b_n = ∞ forces limit point.
    let n = 100_000;
    let harmonic = JacobiParameters::new(
        vec![0.0; n],
        (0..n).map(|k| (k + 1) as f64).collect(),
    )
    .unwrap();
    let c = carleman_sum(&harmonic, n).unwrap();
    println!("\nb_n = n+1: Σ 1/b_n partial = {:.4}, flag {:?}", c.partial_sum, c.flag);
}
