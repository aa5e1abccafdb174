//! Lower and upper growth-bound curves for one family, compared by their
//! log-log slopes (the universal prefactors are unknown, so slopes are the
//! meaningful output).

use nevanlinna::bounds::{
    lower_count_curve, lower_k4_curve, upper_k49_curve, upper_k79_curve, AnalyticTails,
    InverseVariant,
};
use nevanlinna::experiments::FamilyKind;
use nevanlinna::grid::geometric_grid;

fn main() {
    let family = FamilyKind::AlternatingPower {
        alpha0: 2.0,
        alpha1: 3.0,
    };
    let h = family.hamiltonian_truncation(60_000).unwrap();
    let grid = geometric_grid(1e3, 1e7, 5).unwrap();
    let tails = AnalyticTails::default();

    println!("method        slope   (true order = 0.5)");
    for s in [2usize, 3, 4] {
        let c = lower_count_curve(&h, s, &grid).unwrap();
        println!("lower-count s={s}: {:?}", c.slope());
    }
    let c = lower_k4_curve(&h, 4, &grid).unwrap();
    println!("lower-k4   s=4: {:?}", c.slope());

    let c = upper_k79_curve(&h, 2.0, 2.0, 0.0, &grid, &tails).unwrap();
    println!("upper-k79     : {:?}", c.slope());
    let c = upper_k49_curve(&h, 2.0, 0.5, 0.0, &grid, &tails, InverseVariant::Geq).unwrap();
    println!("upper-k49-geq : {:?}", c.slope());
    let c = upper_k49_curve(&h, 2.0, 0.5, 0.0, &grid, &tails, InverseVariant::Literal).unwrap();
    println!("upper-k49 (literal inverse, reference only): {:?}", c.slope());
}
