//! Convergence-exponent estimation and ℓ^p utilities.
//!
//! The convergence exponent E((λ_n)) = inf { α > 0 : Σ |λ_n|^{−α} < ∞ } is
//! an asymptotic quantity; the estimators here declare their index windows
//! so callers can tighten them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kahan::KahanSum;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExponentMethod {
    /// limsup log n / log α_n over a decade of indices of the nondecreasing
    /// rearrangement, anchored at the median so that subsequences exhausted
    /// by the truncation do not bias the estimate.
    RatioLimsup,
    /// Regression of log N(r) on log r over two decades of r ending at the
    /// median value, for the same reason.
    CountingSlope,
    /// Caller declares the data is λ_n ≍ n^rate; the exponent is 1/rate.
    ExactPower(f64),
}

impl ExponentMethod {
    fn tag(&self) -> &'static str {
        match self {
            ExponentMethod::RatioLimsup => "ratio-limsup",
            ExponentMethod::CountingSlope => "counting-slope",
            ExponentMethod::ExactPower(_) => "exact-power",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExponentEstimate {
    pub value: f64,
    pub method: &'static str,
    /// Index range of the rearranged sequence that entered the estimate.
    pub window: (usize, usize),
    pub residual: f64,
}

/// Least-squares fit y = slope·x + intercept; returns (slope, intercept,
/// rms residual).
pub fn linear_fit(points: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Some((slope, intercept, rms))
}

pub fn convergence_exponent(seq: &[f64], method: ExponentMethod) -> Result<ExponentEstimate> {
    if seq.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::InvalidInput(
            "convergence exponent needs a positive sequence".into(),
        ));
    }
    match method {
        ExponentMethod::ExactPower(rate) => {
            if !(rate > 0.0) {
                return Err(Error::ParameterOutOfRange(format!(
                    "exact power rate {rate} must be positive"
                )));
            }
            Ok(ExponentEstimate {
                value: 1.0 / rate,
                method: method.tag(),
                window: (0, seq.len()),
                residual: 0.0,
            })
        }
        ExponentMethod::RatioLimsup => {
            if seq.len() < 64 {
                return Err(Error::SequenceTooShort {
                    needed: 64,
                    got: seq.len(),
                });
            }
            let mut sorted = seq.to_vec();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let start = (sorted.len() / 4).max(1);
            let end = (sorted.len() / 2).max(start + 1);
            let mut lo = f64::INFINITY;
            let mut hi: f64 = 0.0;
            for (n, &alpha) in sorted.iter().enumerate().take(end).skip(start) {
                if alpha <= 1.0 {
                    continue;
                }
                let ratio = ((n + 1) as f64).ln() / alpha.ln();
                lo = lo.min(ratio);
                hi = hi.max(ratio);
            }
            if hi == 0.0 {
                return Err(Error::InvalidInput(
                    "sequence never exceeds 1; exponent not estimable".into(),
                ));
            }
            Ok(ExponentEstimate {
                value: hi,
                method: method.tag(),
                window: (start, end),
                residual: hi - lo.min(hi),
            })
        }
        ExponentMethod::CountingSlope => {
            if seq.len() < 64 {
                return Err(Error::SequenceTooShort {
                    needed: 64,
                    got: seq.len(),
                });
            }
            let mut sorted = seq.to_vec();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let end = sorted.len() / 2 + 1;
            let r_hi = sorted[end - 1];
            let r_lo = r_hi / 100.0;
            // Two value-decades below the median, widened to at least ten
            // points for sparse (fast-growing) sequences.
            let mut start = sorted[..end].partition_point(|&x| x < r_lo);
            start = start.min(end.saturating_sub(10));
            let points: Vec<(f64, f64)> = sorted[start..end]
                .iter()
                .enumerate()
                .filter(|(_, &alpha)| alpha > 0.0)
                .map(|(i, &alpha)| (alpha.ln(), ((start + i + 1) as f64).ln()))
                .collect();
            if points.len() < 10 {
                return Err(Error::SequenceTooShort {
                    needed: 10,
                    got: points.len(),
                });
            }
            let (slope, _, rms) = linear_fit(&points)
                .ok_or_else(|| Error::InvalidInput("degenerate counting regression".into()))?;
            Ok(ExponentEstimate {
                value: slope.max(0.0),
                method: method.tag(),
                window: (start, end),
                residual: rms,
            })
        }
    }
}

/// Σ seq_j^p accumulated in log space to dodge pow underflow.
#[derive(Debug, Clone, Serialize)]
pub struct LpSum {
    pub value: f64,
    pub log_value: f64,
    pub largest_term_index: usize,
}

pub fn lp_sum(seq: &[f64], p: f64) -> Result<LpSum> {
    if !(p > 0.0) {
        return Err(Error::ParameterOutOfRange(format!("p = {p} must be > 0")));
    }
    if seq.is_empty() {
        return Ok(LpSum {
            value: 0.0,
            log_value: f64::NEG_INFINITY,
            largest_term_index: 0,
        });
    }
    if seq.iter().any(|&x| !(x >= 0.0)) {
        return Err(Error::InvalidInput("lp_sum needs nonnegative terms".into()));
    }
    let mut m = f64::NEG_INFINITY;
    let mut argmax = 0usize;
    let logs: Vec<f64> = seq
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let t = p * x.ln();
            if t > m {
                m = t;
                argmax = i;
            }
            t
        })
        .collect();
    if m == f64::NEG_INFINITY {
        return Ok(LpSum {
            value: 0.0,
            log_value: f64::NEG_INFINITY,
            largest_term_index: argmax,
        });
    }
    let mut acc = KahanSum::new();
    for &t in &logs {
        acc.add((t - m).exp());
    }
    let log_value = m + acc.value().ln();
    Ok(LpSum {
        value: log_value.exp(),
        log_value,
        largest_term_index: argmax,
    })
}

/// Σ_{j>n} of a sequence: the analytic tail when the generator provides one,
/// otherwise the truncated remainder with a truncation-only flag.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TailSum {
    pub value: f64,
    pub truncation_only: bool,
}

pub fn tail_sum(seq: &[f64], n: usize, analytic: Option<f64>) -> Result<TailSum> {
    if n > seq.len() {
        return Err(Error::IndexOutOfRange {
            index: n,
            limit: seq.len(),
        });
    }
    if let Some(value) = analytic {
        return Ok(TailSum {
            value,
            truncation_only: false,
        });
    }
    Ok(TailSum {
        value: KahanSum::sum_iter(seq[n..].iter().copied()),
        truncation_only: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_closed_form() {
        let seq: Vec<f64> = (1..=100).map(|n| (n as f64).powi(2)).collect();
        let e = convergence_exponent(&seq, ExponentMethod::ExactPower(2.0)).unwrap();
        assert_eq!(e.value, 0.5);
        assert_eq!(e.residual, 0.0);
        assert!(convergence_exponent(&seq, ExponentMethod::ExactPower(0.0)).is_err());
    }

    #[test]
    fn exponential_sequence_has_exponent_zero() {
        let seq: Vec<f64> = (1..=400).map(|n| (n as f64).exp()).collect();
        let e = convergence_exponent(&seq, ExponentMethod::RatioLimsup).unwrap();
        assert!(e.value < 0.05, "value {}", e.value);
        let e = convergence_exponent(&seq, ExponentMethod::CountingSlope).unwrap();
        assert!(e.value < 0.05, "value {}", e.value);
    }

    #[test]
    fn estimators_agree_on_power_data() {
        let seq: Vec<f64> = (1..=20_000).map(|n| (n as f64).powf(1.7)).collect();
        let r = convergence_exponent(&seq, ExponentMethod::RatioLimsup).unwrap();
        let c = convergence_exponent(&seq, ExponentMethod::CountingSlope).unwrap();
        let exact = 1.0 / 1.7;
        assert!((r.value - exact).abs() < 0.05, "ratio {}", r.value);
        assert!((c.value - exact).abs() < 0.05, "slope {}", c.value);
        assert!((r.value - c.value).abs() < 0.05);
    }

    #[test]
    fn short_sequences_rejected_for_estimation() {
        let seq = vec![1.0, 2.0, 3.0];
        assert!(convergence_exponent(&seq, ExponentMethod::RatioLimsup).is_err());
    }

    #[test]
    fn lp_sum_values() {
        assert_eq!(lp_sum(&[1.0, 1.0, 1.0, 1.0], 2.0).unwrap().value, 4.0);

        let seq: Vec<f64> = (1..=100_000).map(|j| (j as f64).powi(-2)).collect();
        let s = lp_sum(&seq, 1.0).unwrap();
        assert!((s.value - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-4);
        assert_eq!(s.largest_term_index, 0);

        // Tiny terms survive the log-space path (exp∘ln costs ~1e-13 in
        // relative terms at this magnitude, nothing more).
        let s = lp_sum(&[1e-300, 1e-300], 1.0).unwrap();
        assert!(s.value > 0.0);
        assert!((s.value - 2e-300).abs() < 1e-12 * 2e-300);
    }

    #[test]
    fn lp_sum_nonincreasing_in_p_for_bounded_seq() {
        let seq: Vec<f64> = (1..=50).map(|j| 1.0 / (1.0 + j as f64)).collect();
        let mut prev = f64::INFINITY;
        for &p in &[0.5, 1.0, 2.0, 4.0] {
            let v = lp_sum(&seq, p).unwrap().value;
            assert!(v <= prev * (1.0 + 1e-12));
            prev = v;
        }
    }

    #[test]
    fn tail_sums() {
        let seq: Vec<f64> = (1..=1000).map(|j| (j as f64).powi(-2)).collect();
        let t = tail_sum(&seq, 1000, None).unwrap();
        assert_eq!(t.value, 0.0);
        assert!(t.truncation_only);

        let t = tail_sum(&seq, 100, None).unwrap();
        // Integral bracket: 1/(N+1) ≤ tail ≤ 1/N up to truncation of the list.
        assert!(t.value < 0.01 && t.value > 0.008);

        let t = tail_sum(&seq, 100, Some(0.00995)).unwrap();
        assert!(!t.truncation_only);
        assert_eq!(t.value, 0.00995);
    }
}
