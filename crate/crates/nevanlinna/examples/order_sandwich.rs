//! Full sandwich report for one preset: fitted order of the actual growth,
//! bracketed between the counting lower bounds and the applicable upper
//! bounds. (A modest r-window keeps this example quick; the acceptance
//! suite runs the wide windows.)

use nevanlinna::experiments::{sandwich_report_with, EvalPolicy, FamilySpec, FamilyKind, TruncationRule};

fn main() {
    let spec = FamilySpec {
        kind: FamilyKind::AlternatingPower {
            alpha0: 2.0,
            alpha1: 3.0,
        },
        truncation: TruncationRule::AutoForR(1e6),
    };
    let report = sandwich_report_with(&spec, 1e3, 1e6, 16, &EvalPolicy::default()).unwrap();

    println!(
        "family {} (known order {:?})",
        report.family.kind.name(),
        report.known_order
    );
    println!(
        "fitted slope {:.4} over r ∈ [{:.0e}, {:.0e}] (residual {:.3})",
        report.fit.slope, report.fit.r_window.0, report.fit.r_window.1, report.fit.residual
    );
    for (s, slope) in &report.lower_count_slopes {
        println!("  lower-count s={s}: {slope:?}");
    }
    println!("  lower-k4 s={}: {:?}", report.lower_k4.0, report.lower_k4.1);
    for u in &report.uppers {
        println!(
            "  {} slope {:?}{}",
            u.method,
            u.slope,
            if u.applicable { "" } else { "  (reference only)" }
        );
    }
    for (name, b) in &report.order_boxes {
        println!("  order box {name}: [{:.4}, {:.4}]", b.lower, b.upper);
    }
    println!(
        "sandwich: lower {:?} ≤ fit {:.4} ≤ upper {:?} → pass = {:?}",
        report.best_lower_slope, report.fit.slope, report.best_upper_slope, report.pass
    );
}
