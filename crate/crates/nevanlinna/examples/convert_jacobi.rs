//! Jacobi ↔ Hamiltonian conversion: the free Jacobi matrix (a = 0, b = 1)
//! maps to unit lengths with quarter-turn angle jumps, and the round trip
//! recovers the parameters to near machine precision.

use nevanlinna::jacobi::{hamiltonian_to_jacobi, jacobi_to_hamiltonian};
use nevanlinna::JacobiParameters;

fn main() {
    let free = JacobiParameters::new(vec![0.0; 8], vec![1.0; 8]).unwrap();
    let h = jacobi_to_hamiltonian(&free).unwrap();
    println!("free Jacobi bridge: N = {} intervals", h.len());
    println!("first lengths: {:?}", &h.lengths()[..4]);
    println!(
        "first angle jumps (π units): {:?}",
        h.angles()
            .windows(2)
            .take(4)
            .map(|w| (w[1] - w[0]) / std::f64::consts::PI)
            .collect::<Vec<_>>()
    );

    let j = JacobiParameters::new(
        vec![0.4, -1.1, 0.9, 0.0, 2.2, -0.3],
        vec![1.3, 0.8, 2.0, 0.6, 1.7, 1.0],
    )
    .unwrap();
    let back = hamiltonian_to_jacobi(&jacobi_to_hamiltonian(&j).unwrap()).unwrap();
    let mut max_rel = 0.0f64;
    for n in 0..j.len() {
        max_rel = max_rel
            .max((back.a()[n] - j.a()[n]).abs() / j.a()[n].abs().max(1.0))
            .max((back.b()[n] - j.b()[n]).abs() / j.b()[n]);
    }
    println!("round-trip max relative error: {max_rel:.3e}");
}
