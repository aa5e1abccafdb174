//! The det Ω partition counters behind the lower bounds: the greedy sweep
//! packs disjoint intervals with det Ω ≥ 1/r², and the σ-partition cuts
//! [0, L] at exact det Ω = 1/r² boundaries; the two counts differ by at
//! most one.

use nevanlinna::HamburgerHamiltonian;

fn main() {
    let n = 400;
    let lengths: Vec<f64> = (1..=n).map(|j| (j as f64).powf(-1.5)).collect();
    let angles: Vec<f64> = (1..=n).map(|j| j as f64 * 0.9).collect();
    let h = HamburgerHamiltonian::new(lengths, angles).unwrap();

    println!("det Ω(0, L) = {:.6}", h.det_omega_nodes(0, n).unwrap());
    println!("\n{:>10}  {:>8}  {:>8}", "r", "greedy k", "sigma κ");
    for exp in 0..7 {
        let r = 10f64.powi(exp);
        let greedy = h.greedy_partition_count(r);
        let part = h.sigma_partition(r);
        println!("{r:>10.0e}  {greedy:>8}  {:>8}", part.kappa);
        assert!(greedy <= part.kappa && part.kappa <= greedy + 1);
    }

    let r = 100.0;
    let part = h.sigma_partition(r);
    println!("\nfirst σ-points at r = {r}: {:?}", &part.points[..4.min(part.points.len())]);
    let d = h.det_omega_real(part.points[0], part.points[1]).unwrap();
    println!("det Ω(σ_0, σ_1) = {d:.6e} (target 1/r² = {:.6e})", r.powi(-2));
}
