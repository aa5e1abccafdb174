//! Convergence-exponent estimation on the window sequences b_j^{(s)}: for
//! the alternating family (α₀, α₁) = (2, 3) the exponents are 2/5 at s = 2
//! and 1/2 at s = 3, so widening the window sharpens the lower order bound.

use nevanlinna::experiments::FamilyKind;
use nevanlinna::exponents::{convergence_exponent, lp_sum, ExponentMethod};

fn main() {
    let family = FamilyKind::AlternatingPower {
        alpha0: 2.0,
        alpha1: 3.0,
    };
    let h = family.hamiltonian_truncation(30_000).unwrap();

    for s in [2usize, 3, 4] {
        let b = h.b_s_sequence(s).unwrap();
        let ratio = convergence_exponent(&b, ExponentMethod::RatioLimsup).unwrap();
        let slope = convergence_exponent(&b, ExponentMethod::CountingSlope).unwrap();
        println!(
            "E(b^({s})): ratio-limsup {:.4} (residual {:.3}), counting-slope {:.4} (residual {:.3})",
            ratio.value, ratio.residual, slope.value, slope.residual
        );
    }

    let exact = convergence_exponent(&[1.0; 64], ExponentMethod::ExactPower(2.0)).unwrap();
    println!("declared n² data: exponent {}", exact.value);

    let s = lp_sum(h.lengths(), 0.5).unwrap();
    println!(
        "ℓ^(1/2) sum of lengths: {:.4} (largest term at index {})",
        s.value, s.largest_term_index
    );
}
