//! Jacobi parameters, orthogonal polynomials at zero, and the two-way bridge
//! to Hamburger-Hamiltonian parameters.

use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::exponents::{convergence_exponent, ExponentEstimate, ExponentMethod};
use crate::hamiltonian::{HamburgerHamiltonian, ANGLE_JUMP_TOL};
use crate::kahan::KahanSum;

/// Above this magnitude the polynomial recurrence state is rescaled into a
/// mantissa + shared log-scale pair.
const POLY_RESCALE_THRESHOLD: f64 = 1e150;

/// Half-line Jacobi matrix parameters: diagonal a_n and off-diagonal b_n > 0.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiParameters {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl JacobiParameters {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.len() != offdiag.len() {
            return Err(Error::InvalidInput(format!(
                "{} diagonal but {} off-diagonal entries",
                diag.len(),
                offdiag.len()
            )));
        }
        if diag.is_empty() {
            return Err(Error::InvalidInput("empty Jacobi parameters".into()));
        }
        for (n, &b) in offdiag.iter().enumerate() {
            if !(b > 0.0) || !b.is_finite() {
                return Err(Error::InvalidInput(format!("b_{n} = {b} must be positive")));
            }
        }
        for (n, &a) in diag.iter().enumerate() {
            if !a.is_finite() {
                return Err(Error::InvalidInput(format!("a_{n} = {a} not finite")));
            }
        }
        Ok(Self { diag, offdiag })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn a(&self) -> &[f64] {
        &self.diag
    }

    pub fn b(&self) -> &[f64] {
        &self.offdiag
    }
}

/// Orthogonal polynomials of the first (p) and second (q) kind evaluated at
/// zero, stored as mantissas with a shared per-index log scale so that
/// rapidly growing solutions do not overflow.
#[derive(Debug, Clone)]
pub struct PolyAtZero {
    p: Vec<f64>,
    q: Vec<f64>,
    log_scale: Vec<f64>,
}

impl PolyAtZero {
    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn p_mantissa(&self, n: usize) -> f64 {
        self.p[n]
    }

    pub fn q_mantissa(&self, n: usize) -> f64 {
        self.q[n]
    }

    pub fn log_scale(&self, n: usize) -> f64 {
        self.log_scale[n]
    }

    /// p_n(0) as a plain f64 (may overflow to ±inf for determinate data).
    pub fn p_value(&self, n: usize) -> f64 {
        self.p[n] * self.log_scale[n].exp()
    }

    pub fn q_value(&self, n: usize) -> f64 {
        self.q[n] * self.log_scale[n].exp()
    }
}

/// Solve the three-term recurrence at z = 0 with p_0 = 1, p_1 = −a_0/b_0,
/// q_0 = 0, q_1 = 1/b_0, producing indices 0..=N.
pub fn poly_at_zero(j: &JacobiParameters) -> PolyAtZero {
    let n = j.len();
    let a = j.a();
    let b = j.b();
    let mut p = Vec::with_capacity(n + 1);
    let mut q = Vec::with_capacity(n + 1);
    let mut log_scale = Vec::with_capacity(n + 1);

    let mut scale = 0.0f64;
    let (mut p_prev, mut q_prev) = (1.0f64, 0.0f64);
    let (mut p_cur, mut q_cur) = (-a[0] / b[0], 1.0 / b[0]);
    p.push(p_prev);
    q.push(q_prev);
    log_scale.push(scale);
    p.push(p_cur);
    q.push(q_cur);
    log_scale.push(scale);

    for k in 1..n {
        let p_next = -(a[k] * p_cur + b[k - 1] * p_prev) / b[k];
        let q_next = -(a[k] * q_cur + b[k - 1] * q_prev) / b[k];
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
        let m = p_cur
            .abs()
            .max(q_cur.abs())
            .max(p_prev.abs())
            .max(q_prev.abs());
        if m > POLY_RESCALE_THRESHOLD {
            let shift = m.log2().floor();
            let factor = f64::exp2(-shift);
            p_prev *= factor;
            q_prev *= factor;
            p_cur *= factor;
            q_cur *= factor;
            scale += shift * std::f64::consts::LN_2;
        }
        p.push(p_cur);
        q.push(q_cur);
        log_scale.push(scale);
    }
    PolyAtZero { p, q, log_scale }
}

/// K_{jk} = q_j(0) p_k(0) − p_j(0) q_k(0); antisymmetric with K_{jj} = 0.
pub fn k_kernel(poly: &PolyAtZero, j: usize, k: usize) -> f64 {
    let mant = poly.q[j] * poly.p[k] - poly.p[j] * poly.q[k];
    mant * (poly.log_scale[j] + poly.log_scale[k]).exp()
}

/// Primary Jacobi → Hamiltonian conversion through the orthogonal-polynomial
/// route: l_{n+1} = p_n(0)² + q_n(0)², directions (−q_n, p_n), angles lifted
/// so that φ_{n+1} − φ_n ∈ (0, π).
pub fn jacobi_to_hamiltonian(j: &JacobiParameters) -> Result<HamburgerHamiltonian> {
    let poly = poly_at_zero(j);
    let mut lengths = Vec::with_capacity(poly.len());
    let mut angles = Vec::with_capacity(poly.len());
    let mut phi = FRAC_PI_2;
    for n in 0..poly.len() {
        let (pm, qm, s) = (poly.p[n], poly.q[n], poly.log_scale[n]);
        let norm2 = pm * pm + qm * qm;
        if norm2 == 0.0 {
            return Err(Error::Internal(format!(
                "p_{n}(0) = q_{n}(0) = 0 in a valid recurrence"
            )));
        }
        let l = norm2 * (2.0 * s).exp();
        if !l.is_finite() || l == 0.0 {
            return Err(Error::InvalidInput(format!(
                "length l_{} = {l} not representable; data too far from limit circle",
                n + 1
            )));
        }
        if n == 0 {
            lengths.push(1.0);
            angles.push(phi);
            continue;
        }
        let theta = pm.atan2(-qm);
        let mut delta = (theta - phi).rem_euclid(PI);
        if delta == 0.0 {
            delta = PI; // boundary of the branch; construction will validate
        }
        phi += delta;
        lengths.push(l);
        angles.push(phi);
    }
    HamburgerHamiltonian::new(lengths, angles)
}

/// Cross-check conversion solving the parameter relations forward; divides
/// by sines of angle differences and is less stable than the primary route.
pub fn jacobi_to_hamiltonian_recursive(j: &JacobiParameters) -> Result<HamburgerHamiltonian> {
    let a = j.a();
    let b = j.b();
    let mut lengths = vec![1.0f64];
    let mut angles = vec![FRAC_PI_2];
    // a_0 = tan φ_2 with φ_2 − φ_1 ∈ (0, π).
    let delta1 = 1.0f64.atan2(-a[0]);
    angles.push(FRAC_PI_2 + delta1);
    lengths.push(1.0 / (b[0] * b[0] * delta1.sin().powi(2)));
    for n in 1..j.len() {
        let v = angles[n] - angles[n - 1];
        let k = a[n] * lengths[n] * v.sin();
        // cot u = −(k + cos v)/sin v with u ∈ (0, π).
        let cot = -(k + v.cos()) / v.sin();
        let u = 1.0f64.atan2(cot);
        angles.push(angles[n] + u);
        lengths.push(1.0 / (b[n] * b[n] * lengths[n] * u.sin().powi(2)));
    }
    HamburgerHamiltonian::new(lengths, angles)
}

/// Inverse bridge: recover (a_n, b_n) from a bridge-normalized Hamiltonian.
pub fn hamiltonian_to_jacobi(h: &HamburgerHamiltonian) -> Result<JacobiParameters> {
    let n = h.len();
    if n < 2 {
        return Err(Error::SequenceTooShort { needed: 2, got: n });
    }
    let lengths = h.lengths();
    let angles = h.angles();
    if (lengths[0] - 1.0).abs() > 1e-9 {
        return Err(Error::NotBridgeNormalized(format!(
            "l_1 = {}, expected 1",
            lengths[0]
        )));
    }
    if (angles[0] - FRAC_PI_2).sin().abs() > 1e-9 {
        return Err(Error::NotBridgeNormalized(format!(
            "φ_1 = {}, expected π/2 mod π",
            angles[0]
        )));
    }
    let m = n - 1;
    let mut a = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    a.push((angles[1]).tan());
    for k in 1..m {
        // a_k per the forward relation, indices shifted to storage.
        let s20 = (angles[k + 1] - angles[k - 1]).sin();
        let s21 = (angles[k + 1] - angles[k]).sin();
        let s10 = (angles[k] - angles[k - 1]).sin();
        if s21.abs() < ANGLE_JUMP_TOL || s10.abs() < ANGLE_JUMP_TOL {
            return Err(Error::DegenerateJump {
                index: k,
                sin_abs: s21.abs().min(s10.abs()),
            });
        }
        a.push(-s20 / (lengths[k] * s21 * s10));
    }
    for k in 0..m {
        let s = (angles[k + 1] - angles[k]).sin().abs();
        if s < ANGLE_JUMP_TOL {
            return Err(Error::DegenerateJump {
                index: k,
                sin_abs: s,
            });
        }
        b.push(1.0 / ((lengths[k] * lengths[k + 1]).sqrt() * s));
    }
    JacobiParameters::new(a, b)
}

/// Convergence diagnostic of a truncated series from its partial sums at the
/// last two index decades.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TailFlag {
    AppearsSummable,
    AppearsDivergent,
    Inconclusive,
}

/// Classify from snapshots S(N/100), S(N/10), S(N) of the partial sums of N
/// terms. A sum looks divergent when the last index decade contributes at
/// least as much as the one before it (harmonic-or-slower decay); it looks
/// summable when the mean increment over the last decade has fallen below
/// 1e−6 of the total.
pub fn classify_tail(s_hundredth: f64, s_tenth: f64, s_full: f64, count: usize) -> TailFlag {
    if s_full <= 0.0 {
        return TailFlag::AppearsSummable;
    }
    let d2 = s_full - s_tenth;
    let d1 = s_tenth - s_hundredth;
    if d2 > 0.0 && d2 >= d1 * (1.0 - 1e-3) {
        return TailFlag::AppearsDivergent;
    }
    let last_decade_len = (count - count / 10).max(1) as f64;
    if d2 / last_decade_len < 1e-6 * s_full {
        TailFlag::AppearsSummable
    } else {
        TailFlag::Inconclusive
    }
}

fn run_tail_diag<I: Iterator<Item = f64>>(terms: I, count: usize) -> (f64, TailFlag) {
    let i100 = count / 100;
    let i10 = count / 10;
    let mut acc = KahanSum::new();
    let (mut s100, mut s10) = (0.0, 0.0);
    for (idx, t) in terms.enumerate() {
        if idx == i100 {
            s100 = acc.value();
        }
        if idx == i10 {
            s10 = acc.value();
        }
        acc.add(t);
    }
    let total = acc.value();
    if count < 100 {
        return (total, TailFlag::Inconclusive);
    }
    (total, classify_tail(s100, s10, total, count))
}

/// Σ_{n<N} 1/b_n with a convergence heuristic; a divergent sum is Carleman's
/// condition, which forces limit point case.
#[derive(Debug, Clone, Serialize)]
pub struct CarlemanSum {
    pub partial_sum: f64,
    pub flag: TailFlag,
    pub terms_used: usize,
}

pub fn carleman_sum(j: &JacobiParameters, n: usize) -> Result<CarlemanSum> {
    if n > j.len() {
        return Err(Error::IndexOutOfRange {
            index: n,
            limit: j.len(),
        });
    }
    let (partial_sum, flag) = run_tail_diag(j.b()[..n].iter().map(|b| 1.0 / b), n);
    Ok(CarlemanSum {
        partial_sum,
        flag,
        terms_used: n,
    })
}

/// Partial sum S_N = Σ_{j,k<N} K_{jk}², the cross-module identity check
/// S_N = 2·det Ω(0, x_N), and a convergence heuristic on the increments.
#[derive(Debug, Clone, Serialize)]
pub struct IndeterminacyReport {
    pub sum_k_squared: f64,
    pub two_det_omega: f64,
    pub identity_rel_err: f64,
    pub flag: TailFlag,
}

pub fn indeterminacy_diagnostic(j: &JacobiParameters) -> Result<IndeterminacyReport> {
    if j.len() < 2 {
        return Err(Error::SequenceTooShort {
            needed: 2,
            got: j.len(),
        });
    }
    let poly = poly_at_zero(j);
    let n = poly.len();
    // Increment at m is 2 Σ_{j<m} K_{jm}²; snapshot partial sums at decades.
    let i100 = n / 100;
    let i10 = n / 10;
    let mut acc = KahanSum::new();
    let (mut s100, mut s10) = (0.0, 0.0);
    for m in 0..n {
        if m == i100 {
            s100 = acc.value();
        }
        if m == i10 {
            s10 = acc.value();
        }
        let mut inc = KahanSum::new();
        for jj in 0..m {
            let k = k_kernel(&poly, jj, m);
            inc.add(k * k);
        }
        acc.add(2.0 * inc.value());
    }
    let sum_k_squared = acc.value();
    let flag = if n < 100 {
        TailFlag::Inconclusive
    } else {
        classify_tail(s100, s10, sum_k_squared, n)
    };

    let h = jacobi_to_hamiltonian(j)?;
    let two_det = 2.0 * h.det_omega_nodes(0, h.len())?;
    let denom = two_det.abs().max(sum_k_squared.abs()).max(1e-300);
    Ok(IndeterminacyReport {
        sum_k_squared,
        two_det_omega: two_det,
        identity_rel_err: (sum_k_squared - two_det).abs() / denom,
        flag,
    })
}

/// b_n^{(3)} = b_n b_{n+1} / sqrt(a_{n+1}² + b_n² + b_{n+1}²).
pub fn b3_sequence(j: &JacobiParameters) -> Result<Vec<f64>> {
    if j.len() < 2 {
        return Err(Error::SequenceTooShort {
            needed: 2,
            got: j.len(),
        });
    }
    let a = j.a();
    let b = j.b();
    Ok((0..j.len() - 1)
        .map(|n| b[n] * b[n + 1] / (a[n + 1].powi(2) + b[n].powi(2) + b[n + 1].powi(2)).sqrt())
        .collect())
}

/// Numerical check of the Berezanskii-type hypotheses and the predicted
/// order (the convergence exponent of the off-diagonal sequence).
#[derive(Debug, Clone, Serialize)]
pub struct BerezanskiiReport {
    pub carleman: CarlemanSum,
    pub beta_increment_sum: f64,
    pub beta_increment_flag: TailFlag,
    pub offdiag_regularity_sum: f64,
    pub offdiag_regularity_flag: TailFlag,
    pub beta_limit_estimate: f64,
    pub beta_limit_spread: f64,
    pub beta_limit_in_range: bool,
    pub verdict: TailVerdict,
    pub predicted_order: ExponentEstimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TailVerdict {
    Satisfied,
    Violated,
    Inconclusive,
}

pub fn berezanskii_check(j: &JacobiParameters) -> Result<BerezanskiiReport> {
    let n = j.len();
    if n < 3 {
        return Err(Error::SequenceTooShort { needed: 3, got: n });
    }
    let a = j.a();
    let b = j.b();
    // β_n = −a_n / (2 sqrt(b_{n−1} b_n)), n ≥ 1.
    let beta: Vec<f64> = (1..n)
        .map(|k| -a[k] / (2.0 * (b[k - 1] * b[k]).sqrt()))
        .collect();
    let carleman = carleman_sum(j, n)?;
    let (beta_increment_sum, beta_increment_flag) = run_tail_diag(
        beta.windows(2).map(|w| (w[1] - w[0]).abs()),
        beta.len().saturating_sub(1),
    );
    let (offdiag_regularity_sum, offdiag_regularity_flag) = run_tail_diag(
        (1..n - 1).map(|k| (b[k] / (b[k - 1] * b[k + 1]).sqrt() - 1.0).abs()),
        n - 2,
    );
    // Limit of β from the last index decade.
    let start = (beta.len() * 9) / 10;
    let window = &beta[start.min(beta.len() - 1)..];
    let mean = window.iter().sum::<f64>() / window.len() as f64;
    let spread = window
        .iter()
        .map(|x| (x - mean).abs())
        .fold(0.0f64, f64::max);
    let in_range = mean.abs() + spread < 1.0 - 1e-6;

    let all_summable = carleman.flag == TailFlag::AppearsSummable
        && beta_increment_flag == TailFlag::AppearsSummable
        && offdiag_regularity_flag == TailFlag::AppearsSummable;
    let any_divergent = carleman.flag == TailFlag::AppearsDivergent
        || beta_increment_flag == TailFlag::AppearsDivergent
        || offdiag_regularity_flag == TailFlag::AppearsDivergent;
    let verdict = if all_summable && in_range {
        TailVerdict::Satisfied
    } else if any_divergent || (mean.abs() - spread) >= 1.0 {
        TailVerdict::Violated
    } else {
        TailVerdict::Inconclusive
    };

    let predicted_order = convergence_exponent(b, ExponentMethod::CountingSlope)?;
    Ok(BerezanskiiReport {
        carleman,
        beta_increment_sum,
        beta_increment_flag,
        offdiag_regularity_sum,
        offdiag_regularity_flag,
        beta_limit_estimate: mean,
        beta_limit_spread: spread,
        beta_limit_in_range: in_range,
        verdict,
        predicted_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jac(a: &[f64], b: &[f64]) -> JacobiParameters {
        JacobiParameters::new(a.to_vec(), b.to_vec()).unwrap()
    }

    #[test]
    fn poly_base_cases() {
        let p = poly_at_zero(&jac(&[0.0], &[1.0]));
        assert_eq!(p.p_value(0), 1.0);
        assert_eq!(p.p_value(1), 0.0);
        assert_eq!(p.q_value(0), 0.0);
        assert_eq!(p.q_value(1), 1.0);

        let p = poly_at_zero(&jac(&[2.0], &[1.0]));
        assert_eq!(p.p_value(1), -2.0);
        assert_eq!(p.q_value(1), 1.0);
    }

    #[test]
    fn wronskian_identity() {
        let j = jac(
            &[0.5, -1.2, 2.0, 0.0, 0.7],
            &[1.0, 0.6, 2.5, 1.1, 0.9],
        );
        let poly = poly_at_zero(&j);
        for n in 0..j.len() {
            let k = k_kernel(&poly, n + 1, n);
            let expected = 1.0 / j.b()[n];
            assert!(
                (k - expected).abs() <= 1e-12 * expected.abs(),
                "n = {n}: K = {k}, 1/b = {expected}"
            );
        }
    }

    #[test]
    fn kernel_antisymmetry_and_closed_forms() {
        let j = jac(
            &[0.3, -0.8, 1.5, 0.2, -0.4],
            &[1.2, 0.7, 1.9, 0.5, 1.1],
        );
        let poly = poly_at_zero(&j);
        for jj in 0..4 {
            assert_eq!(k_kernel(&poly, jj, jj), 0.0);
            for kk in 0..4 {
                let x = k_kernel(&poly, jj, kk);
                let y = k_kernel(&poly, kk, jj);
                assert!((x + y).abs() <= 1e-14 * x.abs().max(1.0));
            }
        }
        // Short-range kernels in terms of (a_n, b_n), from unrolling the
        // recurrence; magnitudes are what every consumer uses.
        let a = j.a();
        let b = j.b();
        for n in 0..2 {
            let k2 = k_kernel(&poly, n + 2, n);
            let expected = -a[n + 1] / (b[n] * b[n + 1]);
            assert!(
                (k2 - expected).abs() <= 1e-12 * expected.abs().max(1e-12),
                "K(n+2,n): {k2} vs {expected}"
            );
            let k3 = k_kernel(&poly, n + 3, n);
            let expected = (a[n + 1] * a[n + 2] - b[n + 1] * b[n + 1])
                / (b[n] * b[n + 1] * b[n + 2]);
            assert!(
                (k3 - expected).abs() <= 1e-12 * expected.abs().max(1e-12),
                "K(n+3,n): {k3} vs {expected}"
            );
            let k4 = k_kernel(&poly, n + 4, n);
            let expected = (a[n + 1] * b[n + 2] * b[n + 2] + a[n + 3] * b[n + 1] * b[n + 1]
                - a[n + 1] * a[n + 2] * a[n + 3])
                / (b[n] * b[n + 1] * b[n + 2] * b[n + 3]);
            assert!(
                (k4 - expected).abs() <= 1e-12 * expected.abs().max(1e-12),
                "K(n+4,n): {k4} vs {expected}"
            );
        }
    }

    #[test]
    fn kernel_matches_recursive_route_geometry() {
        // Independent oracle: |K_{jk}| = √(l_{j+1} l_{k+1})·|sin(φ_{j+1} −
        // φ_{k+1})| with lengths and angles from the forward parameter
        // relations, not from the polynomial recurrence.
        let j = jac(
            &[0.3, -0.8, 1.5, 0.2, -0.4],
            &[1.2, 0.7, 1.9, 0.5, 1.1],
        );
        let poly = poly_at_zero(&j);
        let h = jacobi_to_hamiltonian_recursive(&j).unwrap();
        for jj in 0..h.len() {
            for kk in 0..jj {
                let expected = (h.lengths()[jj] * h.lengths()[kk]).sqrt()
                    * (h.angles()[jj] - h.angles()[kk]).sin().abs();
                let got = k_kernel(&poly, jj, kk).abs();
                assert!(
                    (got - expected).abs() <= 1e-9 * expected.max(1e-9),
                    "({jj},{kk}): {got} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn free_jacobi_bridge() {
        // a = 0, b = 1: unit lengths, quarter-turn jumps.
        let j = jac(&[0.0; 6], &[1.0; 6]);
        let h = jacobi_to_hamiltonian(&j).unwrap();
        assert_eq!(h.len(), 7);
        for &l in h.lengths() {
            assert!((l - 1.0).abs() < 1e-14);
        }
        for w in h.angles().windows(2) {
            assert!(((w[1] - w[0]) - FRAC_PI_2).abs() < 1e-12);
        }
        // b_0^{(2)} = 1 via the determinant window.
        let b2 = h.b_s_sequence(2).unwrap();
        assert!((b2[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bridge_round_trip() {
        let j = jac(
            &[0.4, -1.1, 0.9, 0.0, 2.2, -0.3],
            &[1.3, 0.8, 2.0, 0.6, 1.7, 1.0],
        );
        let h = jacobi_to_hamiltonian(&j).unwrap();
        let back = hamiltonian_to_jacobi(&h).unwrap();
        assert_eq!(back.len(), j.len());
        for n in 0..j.len() {
            assert!(
                (back.a()[n] - j.a()[n]).abs() <= 1e-10 * j.a()[n].abs().max(1.0),
                "a_{n}: {} vs {}",
                back.a()[n],
                j.a()[n]
            );
            assert!(
                (back.b()[n] - j.b()[n]).abs() <= 1e-10 * j.b()[n],
                "b_{n}: {} vs {}",
                back.b()[n],
                j.b()[n]
            );
        }
    }

    #[test]
    fn recursive_route_cross_check() {
        let j = jac(
            &[0.4, -1.1, 0.9, 0.0, 2.2],
            &[1.3, 0.8, 2.0, 0.6, 1.7],
        );
        let h1 = jacobi_to_hamiltonian(&j).unwrap();
        let h2 = jacobi_to_hamiltonian_recursive(&j).unwrap();
        assert_eq!(h1.len(), h2.len());
        for n in 0..h1.len() {
            let (l1, l2) = (h1.lengths()[n], h2.lengths()[n]);
            assert!((l1 - l2).abs() <= 1e-9 * l1.max(l2), "l_{n}: {l1} vs {l2}");
            let d = (h1.angles()[n] - h2.angles()[n]).sin().abs();
            assert!(d < 1e-9, "φ_{n} differ mod π by sin = {d}");
        }
    }

    #[test]
    fn inverse_bridge_hand_example() {
        let h = HamburgerHamiltonian::new(
            vec![1.0, 1.0, 1.0],
            vec![FRAC_PI_2, PI, 3.0 * FRAC_PI_2],
        )
        .unwrap();
        let j = hamiltonian_to_jacobi(&h).unwrap();
        assert!(j.a()[0].abs() < 1e-12); // tan(π) = 0
        assert!((j.b()[0] - 1.0).abs() < 1e-12);
        // Quarter-turn jumps with unit lengths: a_1 = 0 since sin(φ_3 − φ_1) = 0.
        assert!(j.a()[1].abs() < 1e-12);
    }

    #[test]
    fn inverse_bridge_rejects_unnormalized() {
        let h = HamburgerHamiltonian::new(vec![2.0, 1.0], vec![FRAC_PI_2, 0.0]).unwrap();
        assert!(matches!(
            hamiltonian_to_jacobi(&h),
            Err(Error::NotBridgeNormalized(_))
        ));
        let h = HamburgerHamiltonian::new(vec![1.0, 1.0], vec![0.3, 1.4]).unwrap();
        assert!(hamiltonian_to_jacobi(&h).is_err());
    }

    #[test]
    fn b3_closed_forms() {
        // a = 0, constant b: b³ = b/√2.
        let j = jac(&[0.0; 5], &[2.0; 5]);
        let b3 = b3_sequence(&j).unwrap();
        for &v in &b3 {
            assert!((v - 2.0 / 2f64.sqrt()).abs() < 1e-14);
        }
        // Large diagonal forces the value toward b_n b_{n+1}/|a_{n+1}|.
        let j = jac(&[0.0, 1e9, 0.0], &[1.0, 1.0, 1.0]);
        let b3 = b3_sequence(&j).unwrap();
        assert!(b3[0] < 2e-9);
    }

    #[test]
    fn b3_matches_detomega_window() {
        let j = jac(
            &[0.4, -1.1, 0.9, 0.0, 2.2, -0.3],
            &[1.3, 0.8, 2.0, 0.6, 1.7, 1.0],
        );
        let h = jacobi_to_hamiltonian(&j).unwrap();
        let from_h = h.b_s_sequence(3).unwrap();
        let from_j = b3_sequence(&j).unwrap();
        for n in 0..from_j.len().min(from_h.len()) {
            assert!(
                (from_j[n] - from_h[n]).abs() <= 1e-10 * from_j[n],
                "n = {n}: {} vs {}",
                from_j[n],
                from_h[n]
            );
        }
    }

    #[test]
    fn b2_equals_offdiagonal() {
        let j = jac(
            &[0.4, -1.1, 0.9, 0.0, 2.2, -0.3],
            &[1.3, 0.8, 2.0, 0.6, 1.7, 1.0],
        );
        let h = jacobi_to_hamiltonian(&j).unwrap();
        let b2 = h.b_s_sequence(2).unwrap();
        for n in 0..j.len() {
            assert!(
                (b2[n] - j.b()[n]).abs() <= 1e-10 * j.b()[n],
                "n = {n}: {} vs {}",
                b2[n],
                j.b()[n]
            );
        }
    }

    #[test]
    fn indeterminacy_identity_and_flags() {
        let j = jac(
            &[0.4, -1.1, 0.9, 0.0, 2.2, -0.3, 0.1, 0.8],
            &[1.3, 0.8, 2.0, 0.6, 1.7, 1.0, 1.4, 0.9],
        );
        let rep = indeterminacy_diagnostic(&j).unwrap();
        assert!(
            rep.identity_rel_err < 1e-8,
            "identity error {}",
            rep.identity_rel_err
        );

        // b_n = (n+1)²: indeterminate, increments decay fast.
        let n = 4000;
        let b: Vec<f64> = (0..n).map(|k| ((k + 1) as f64).powi(2)).collect();
        let rep = indeterminacy_diagnostic(&jac(&vec![0.0; n], &b)).unwrap();
        assert_eq!(rep.flag, TailFlag::AppearsSummable);

        // b_n = 1: determinate, S_N grows linearly.
        let n = 600;
        let rep = indeterminacy_diagnostic(&jac(&vec![0.0; n], &vec![1.0; n])).unwrap();
        assert_eq!(rep.flag, TailFlag::AppearsDivergent);
    }

    #[test]
    fn carleman_examples() {
        let n = 200_000;
        let b: Vec<f64> = (0..n).map(|k| ((k + 1) as f64).powi(2)).collect();
        let c = carleman_sum(&jac(&vec![0.0; n], &b), n).unwrap();
        assert!((c.partial_sum - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-4);
        assert_eq!(c.flag, TailFlag::AppearsSummable);

        let b = vec![1.0; 100];
        let c = carleman_sum(&jac(&vec![0.0; 100], &b), 10).unwrap();
        assert_eq!(c.partial_sum, 10.0);

        let n = 100_000;
        let b: Vec<f64> = (0..n).map(|k| (k + 1) as f64).collect();
        let c = carleman_sum(&jac(&vec![0.0; n], &b), n).unwrap();
        assert_eq!(c.flag, TailFlag::AppearsDivergent);
    }

    #[test]
    fn berezanskii_power_family() {
        let n = 5000;
        let b: Vec<f64> = (0..n).map(|k| ((k + 1) as f64).powi(2)).collect();
        let rep = berezanskii_check(&jac(&vec![0.0; n], &b)).unwrap();
        assert_eq!(rep.verdict, TailVerdict::Satisfied);
        assert!(rep.beta_limit_estimate.abs() < 1e-12);
        assert!(
            (rep.predicted_order.value - 0.5).abs() < 0.02,
            "predicted order {}",
            rep.predicted_order.value
        );

        // a_n = b_n: β_n → −1/2, inside (−1, 1); increments vanish.
        let b: Vec<f64> = (0..n).map(|k| ((k + 1) as f64).powf(1.5)).collect();
        let rep = berezanskii_check(&jac(&b.clone(), &b)).unwrap();
        assert!((rep.beta_limit_estimate + 0.5).abs() < 0.01);
        assert!(rep.beta_limit_in_range);

        // Exponential growth: convergence exponent 0.
        let n = 400;
        let b: Vec<f64> = (0..n).map(|k| (k as f64).exp().min(1e300)).collect();
        let b = {
            let mut b = b;
            b[0] = 1.0;
            b
        };
        let rep = berezanskii_check(&jac(&vec![0.0; n], &b)).unwrap();
        assert!(rep.predicted_order.value < 0.05);
    }
}
