//! Property tests for the structural invariants: determinant monotonicity
//! and superadditivity, bridge round trips, window-sequence monotonicity,
//! and product symmetries on random instances.

use num_complex::Complex64;
use proptest::prelude::*;

use nevanlinna::jacobi::{hamiltonian_to_jacobi, jacobi_to_hamiltonian, k_kernel, poly_at_zero};
use nevanlinna::monodromy::monodromy;
use nevanlinna::{HamburgerHamiltonian, JacobiParameters};

fn hamiltonian_strategy(max_n: usize) -> impl Strategy<Value = HamburgerHamiltonian> {
    let interval = (1e-6f64..1.0, 0.05f64..3.0);
    proptest::collection::vec(interval, 3..max_n).prop_map(|data| {
        let lengths: Vec<f64> = data.iter().map(|(l, _)| *l).collect();
        let mut phi = 0.4f64;
        let angles: Vec<f64> = data
            .iter()
            .map(|(_, jump)| {
                let out = phi;
                phi += *jump;
                out
            })
            .collect();
        HamburgerHamiltonian::new(lengths, angles).unwrap()
    })
}

fn jacobi_strategy(max_n: usize) -> impl Strategy<Value = JacobiParameters> {
    let entry = (-2.0f64..2.0, 0.3f64..3.0);
    proptest::collection::vec(entry, 3..max_n).prop_map(|data| {
        let a: Vec<f64> = data.iter().map(|(a, _)| *a).collect();
        let b: Vec<f64> = data.iter().map(|(_, b)| *b).collect();
        JacobiParameters::new(a, b).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sqrt_det_superadditive(h in hamiltonian_strategy(40), split in 0.1f64..0.9) {
        let n = h.len();
        let p = ((n as f64 * split) as usize).clamp(1, n - 1);
        let whole = h.det_omega_nodes(0, n).unwrap().sqrt();
        let parts = h.det_omega_nodes(0, p).unwrap().sqrt()
            + h.det_omega_nodes(p, n).unwrap().sqrt();
        prop_assert!(parts <= whole * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn window_sequence_monotone_in_s(h in hamiltonian_strategy(24)) {
        if h.len() >= 4 {
            let b2 = h.b_s_sequence(2).unwrap();
            let b3 = h.b_s_sequence(3).unwrap();
            let b4 = h.b_s_sequence(4).unwrap();
            for j in 0..b4.len() {
                prop_assert!(b3[j] <= b2[j] * (1.0 + 1e-12));
                prop_assert!(b4[j] <= b3[j] * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn partition_counters_consistent(h in hamiltonian_strategy(20), r in 0.5f64..50.0) {
        let greedy = h.greedy_partition_count(r);
        let kappa = h.sigma_partition(r).kappa;
        prop_assert!(greedy <= kappa && kappa <= greedy + 1,
            "greedy {greedy}, κ {kappa}");
    }

    #[test]
    fn bridge_round_trip(j in jacobi_strategy(24)) {
        let h = jacobi_to_hamiltonian(&j).unwrap();
        let back = hamiltonian_to_jacobi(&h).unwrap();
        prop_assert_eq!(back.len(), j.len());
        for n in 0..j.len() {
            let da = (back.a()[n] - j.a()[n]).abs() / j.a()[n].abs().max(1.0);
            let db = (back.b()[n] - j.b()[n]).abs() / j.b()[n];
            prop_assert!(da <= 1e-10 && db <= 1e-10, "n = {}: da {da:e}, db {db:e}", n);
        }
    }

    #[test]
    fn wronskian_conservation(j in jacobi_strategy(32)) {
        let poly = poly_at_zero(&j);
        for n in 0..j.len() {
            let k = k_kernel(&poly, n + 1, n);
            let err = (k * j.b()[n] - 1.0).abs();
            prop_assert!(err <= 1e-12, "n = {}: err {err:e}", n);
        }
    }

    #[test]
    fn monodromy_conjugation_and_det(h in hamiltonian_strategy(16), re in -3.0f64..3.0, im in 0.1f64..3.0) {
        let z = Complex64::new(re, im);
        let w = monodromy(&h, z);
        let wc = monodromy(&h, z.conj());
        for i in 0..2 {
            for k in 0..2 {
                let d = (wc.entry(i, k) - w.entry(i, k).conj()).norm();
                prop_assert!(d <= 1e-11 * w.entry(i, k).norm().max(1.0));
            }
        }
        // Small products resolve the unit determinant exactly.
        prop_assert!(w.unit_det_log_residual().abs() <= 1e-10);
    }
}
