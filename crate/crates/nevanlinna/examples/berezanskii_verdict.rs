//! Numerical check of the Berezanskii-type hypotheses for b_n = (n+1)^β:
//! violated Carleman condition, summable β-increments, off-diagonal
//! regularity, and the predicted order 1/β.

use nevanlinna::experiments::FamilyKind;
use nevanlinna::jacobi::berezanskii_check;

fn main() {
    for beta in [1.5f64, 2.0, 3.0] {
        let family = FamilyKind::BerezanskiiPower {
            beta,
            diag_ratio: 0.0,
        };
        let j = family.jacobi_truncation(50_000).unwrap();
        let rep = berezanskii_check(&j).unwrap();
        println!("β = {beta}:");
        println!("  Σ 1/b_n = {:.6} ({:?})", rep.carleman.partial_sum, rep.carleman.flag);
        println!(
            "  Σ |β_{{n+1}} − β_n| = {:.3e} ({:?})",
            rep.beta_increment_sum, rep.beta_increment_flag
        );
        println!(
            "  Σ |b_n/√(b_(n−1) b_(n+1)) − 1| = {:.6} ({:?})",
            rep.offdiag_regularity_sum, rep.offdiag_regularity_flag
        );
        println!(
            "  β limit ≈ {:.3} ± {:.1e}, inside (−1,1): {}",
            rep.beta_limit_estimate, rep.beta_limit_spread, rep.beta_limit_in_range
        );
        println!(
            "  verdict: {:?}, predicted order {:.4} (expected {:.4})",
            rep.verdict,
            rep.predicted_order.value,
            1.0 / beta
        );
    }
}
