//! Preset parameter families, truncation-controlled evaluation of
//! log |w_{H,22}(ir)| over r-grids, order fitting, and the sandwich reports
//! comparing the measured growth against the lower and upper bound curves.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2, PI};

use crate::bounds::{
    k118_branch_values, k120_branch_values, lower_count_curve, lower_k4_curve,
    mixed_active_branch, order_box, upper_k49_curve, upper_k66_curve, upper_k79_curve,
    upper_k89_curve, AnalyticTails, BoundCurve, InverseVariant, OrderBox, OrderCase,
};
use crate::error::{Error, Result};
use crate::exponents::linear_fit;
use crate::grid::geometric_grid_n;
use crate::hamiltonian::{HamburgerHamiltonian, Interval};
use crate::jacobi::{
    berezanskii_check, jacobi_to_hamiltonian, BerezanskiiReport, JacobiParameters,
};
use crate::monodromy::ScaledMatrix2;

/// Materialized truncations refuse to allocate past this many intervals;
/// streamed evaluation has no such limit.
const MATERIALIZE_MAX: usize = 1 << 21;

/// Truncation rule carried by a family: either a fixed interval count or a
/// target r for which the truncation is chosen by the tail rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TruncationRule {
    TargetN(usize),
    AutoForR(f64),
}

/// Parameter families from the worked examples, plus explicit lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum FamilyKind {
    /// l_j = j^{−α}, |sin Δφ_j| = min(1, j^{−β}), Δφ ∈ (0, π/2].
    PurePower { alpha: f64, beta: f64 },
    /// l_j = j^{−α₀} (even j), j^{−α₁} (odd j); φ_j = jπ/4.
    AlternatingPower { alpha0: f64, alpha1: f64 },
    /// l_j = j^{−ν/2} at j = k², else j^{−α}; |sin Δφ| = min(1, j^{−β});
    /// optionally the angles drift toward ψ = 0 with |sin(φ_j − ψ)| ≲ j^{−γ}.
    MixedPeaks {
        alpha: f64,
        nu: f64,
        beta: f64,
        gamma: Option<f64>,
    },
    /// Jacobi side: b_n = (n+1)^β, a_n = diag_ratio·b_n.
    BerezanskiiPower { beta: f64, diag_ratio: f64 },
    ExplicitHamiltonian { lengths: Vec<f64>, angles: Vec<f64> },
    ExplicitJacobi { a: Vec<f64>, b: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub truncation: TruncationRule,
}

impl FamilySpec {
    pub fn auto(kind: FamilyKind, r: f64) -> Self {
        Self {
            kind,
            truncation: TruncationRule::AutoForR(r),
        }
    }

    pub fn with_n(kind: FamilyKind, n: usize) -> Self {
        Self {
            kind,
            truncation: TruncationRule::TargetN(n),
        }
    }

    /// Materialize the family at its truncation rule.
    pub fn generate(&self) -> Result<GeneratedSystem> {
        self.kind.validate()?;
        let n = match self.truncation {
            TruncationRule::TargetN(n) => n,
            TruncationRule::AutoForR(r) => auto_truncation_n(&self.kind, r, MATERIALIZE_MAX)
                .ok_or_else(|| {
                    Error::TruncationUnsatisfiable(format!(
                        "r = {r} needs more than {MATERIALIZE_MAX} intervals to materialize"
                    ))
                })?,
        };
        if n > MATERIALIZE_MAX {
            return Err(Error::TruncationUnsatisfiable(format!(
                "{n} intervals exceed the materialization budget {MATERIALIZE_MAX}"
            )));
        }
        match &self.kind {
            FamilyKind::BerezanskiiPower { .. } | FamilyKind::ExplicitJacobi { .. } => {
                Ok(GeneratedSystem::Jacobi(self.kind.jacobi_truncation(n)?))
            }
            _ => Ok(GeneratedSystem::Hamiltonian(
                self.kind.hamiltonian_truncation(n)?,
            )),
        }
    }
}

/// A materialized system.
#[derive(Debug, Clone)]
pub enum GeneratedSystem {
    Hamiltonian(HamburgerHamiltonian),
    Jacobi(JacobiParameters),
}

impl GeneratedSystem {
    pub fn into_hamiltonian(self) -> Result<HamburgerHamiltonian> {
        match self {
            GeneratedSystem::Hamiltonian(h) => Ok(h),
            GeneratedSystem::Jacobi(j) => jacobi_to_hamiltonian(&j),
        }
    }
}

/// x^p with fast paths for integer and half-integer exponents; the r-grid
/// ladders walk 10^7-interval products, so pow cost dominates otherwise.
#[derive(Debug, Clone, Copy)]
struct PowEval {
    p: f64,
    kind: PowKind,
}

#[derive(Debug, Clone, Copy)]
enum PowKind {
    Int(i32),
    HalfInt(i32),
    General,
}

impl PowEval {
    fn new(p: f64) -> Self {
        let kind = if p == p.round() && p.abs() <= 32.0 {
            PowKind::Int(p as i32)
        } else if (p - 0.5) == (p - 0.5).round() && p.abs() <= 32.0 {
            PowKind::HalfInt((p - 0.5) as i32)
        } else {
            PowKind::General
        };
        Self { p, kind }
    }

    #[inline]
    fn eval(self, x: f64) -> f64 {
        match self.kind {
            PowKind::Int(k) => x.powi(k),
            PowKind::HalfInt(k) => x.powi(k) * x.sqrt(),
            PowKind::General => x.powf(self.p),
        }
    }
}

/// Tail Σ_{j>n} j^{−p} for p > 1 by the midpoint rule.
fn power_tail(p: f64, n: f64) -> f64 {
    (n + 0.5).powf(1.0 - p) / (p - 1.0)
}

impl FamilyKind {
    pub fn validate(&self) -> Result<()> {
        match self {
            FamilyKind::PurePower { alpha, beta } => {
                if !(*alpha > 1.0) {
                    return Err(Error::ParameterOutOfRange(format!(
                        "pure power needs α > 1 for limit circle, got {alpha}"
                    )));
                }
                if !(*beta >= 0.0) {
                    return Err(Error::ParameterOutOfRange(format!("β = {beta} < 0")));
                }
            }
            FamilyKind::AlternatingPower { alpha0, alpha1 } => {
                if !(*alpha1 > *alpha0 && *alpha0 > 1.0) {
                    return Err(Error::ParameterOutOfRange(format!(
                        "alternating power needs α₁ > α₀ > 1, got ({alpha0}, {alpha1})"
                    )));
                }
            }
            FamilyKind::MixedPeaks {
                alpha,
                nu,
                beta,
                gamma,
            } => {
                if !(*nu > 1.0 && *alpha > 1.0) {
                    return Err(Error::ParameterOutOfRange(format!(
                        "mixed peaks needs ν, α > 1, got ({nu}, {alpha})"
                    )));
                }
                if !(*beta >= 0.0) {
                    return Err(Error::ParameterOutOfRange(format!("β = {beta} < 0")));
                }
                if let Some(g) = gamma {
                    if !(*g >= 0.0 && g <= beta) {
                        return Err(Error::ParameterOutOfRange(format!(
                            "mixed peaks needs 0 ≤ γ ≤ β, got γ = {g}, β = {beta}"
                        )));
                    }
                }
            }
            FamilyKind::BerezanskiiPower { beta, .. } => {
                if !(*beta > 1.0) {
                    return Err(Error::ParameterOutOfRange(format!(
                        "Berezanskii power needs β > 1 so that Σ 1/b_n < ∞, got {beta}"
                    )));
                }
            }
            FamilyKind::ExplicitHamiltonian { lengths, angles } => {
                HamburgerHamiltonian::new(lengths.clone(), angles.clone())?;
            }
            FamilyKind::ExplicitJacobi { a, b } => {
                JacobiParameters::new(a.clone(), b.clone())?;
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::PurePower { .. } => "pure-power",
            FamilyKind::AlternatingPower { .. } => "alternating-power",
            FamilyKind::MixedPeaks { .. } => "mixed-peaks",
            FamilyKind::BerezanskiiPower { .. } => "berezanskii",
            FamilyKind::ExplicitHamiltonian { .. } => "explicit-hamiltonian",
            FamilyKind::ExplicitJacobi { .. } => "explicit-jacobi",
        }
    }

    /// Paper-asserted order of the family, when one is known.
    pub fn known_order(&self) -> Option<f64> {
        match self {
            FamilyKind::PurePower { alpha, beta } if alpha + beta >= 2.0 => {
                Some(1.0 / (alpha + beta))
            }
            FamilyKind::AlternatingPower { alpha0, .. } => Some(1.0 / alpha0),
            FamilyKind::MixedPeaks {
                alpha, nu, beta, ..
            } if *beta > 1.0 && nu >= alpha => Some(1.0 / (alpha + beta)),
            FamilyKind::BerezanskiiPower { beta, diag_ratio } if *diag_ratio == 0.0 => {
                Some(1.0 / beta)
            }
            _ => None,
        }
    }

    /// Number of intervals available; None means the family is unbounded.
    pub fn available_intervals(&self) -> Option<usize> {
        match self {
            FamilyKind::ExplicitHamiltonian { lengths, .. } => Some(lengths.len()),
            // The bridge of an M-term Jacobi matrix has M+1 intervals.
            FamilyKind::ExplicitJacobi { a, .. } => Some(a.len() + 1),
            _ => None,
        }
    }

    /// Analytic tail Σ_{j>n} l_j when the family has one.
    pub fn length_tail(&self, n: usize) -> Option<f64> {
        let nf = n as f64;
        match self {
            FamilyKind::PurePower { alpha, .. } => Some(power_tail(*alpha, nf)),
            FamilyKind::AlternatingPower { alpha0, alpha1 } => {
                let even = 2f64.powf(-alpha0) * power_tail(*alpha0, nf / 2.0);
                let odd = 2f64.powf(-alpha1) * power_tail(*alpha1, nf / 2.0);
                Some(even + odd)
            }
            FamilyKind::MixedPeaks { alpha, nu, .. } => {
                Some(power_tail(*alpha, nf) + power_tail(*nu, nf.sqrt()))
            }
            _ => None,
        }
    }

    /// Analytic tail Σ_{j>n} |sin Δφ_j| (finite ones only).
    fn sin_jump_tail(&self, n: usize) -> Option<f64> {
        match self {
            FamilyKind::PurePower { beta, .. } | FamilyKind::MixedPeaks { beta, .. }
                if *beta > 1.0 =>
            {
                Some(power_tail(*beta, n as f64))
            }
            _ => None,
        }
    }

    /// Analytic tail Σ_{j>n} l_j^{1/a} (finite ones only).
    fn length_lp_tail(&self, n: usize, a: f64) -> Option<f64> {
        let nf = n as f64;
        match self {
            FamilyKind::PurePower { alpha, .. } if alpha / a > 1.0 => {
                Some(power_tail(alpha / a, nf))
            }
            FamilyKind::AlternatingPower { alpha0, alpha1 } if alpha0 / a > 1.0 => {
                let even = 2f64.powf(-alpha0 / a) * power_tail(alpha0 / a, nf / 2.0);
                let odd = 2f64.powf(-alpha1 / a) * power_tail(alpha1 / a, nf / 2.0);
                Some(even + odd)
            }
            FamilyKind::MixedPeaks { alpha, nu, .. }
                if alpha / a > 1.0 && nu / a > 2.0 =>
            {
                Some(power_tail(alpha / a, nf) + power_tail(nu / (2.0 * a), nf.sqrt()))
            }
            _ => None,
        }
    }

    /// Analytic tail Σ_{j>n} |sin Δφ_j|^{1/b} (finite ones only).
    fn sin_jump_lp_tail(&self, n: usize, b: f64) -> Option<f64> {
        match self {
            FamilyKind::PurePower { beta, .. } | FamilyKind::MixedPeaks { beta, .. }
                if beta / b > 1.0 =>
            {
                Some(power_tail(beta / b, n as f64))
            }
            _ => None,
        }
    }

    /// Analytic tail Σ_{j>n} l_j sin²(φ_j − ψ).
    fn l_sin2_tail(&self, n: usize) -> Option<f64> {
        let nf = n as f64;
        match self {
            // Angles wander: sin² averages 1/2.
            FamilyKind::PurePower { alpha, beta } if *beta <= 1.0 => {
                Some(0.5 * power_tail(*alpha, nf))
            }
            FamilyKind::MixedPeaks {
                alpha,
                nu,
                gamma: Some(g),
                ..
            } => Some(power_tail(alpha + 2.0 * g, nf) + power_tail(nu + 4.0 * g, nf.sqrt())),
            FamilyKind::MixedPeaks {
                alpha,
                nu,
                gamma: None,
                ..
            } => Some(0.5 * (power_tail(*alpha, nf) + power_tail(*nu, nf.sqrt()))),
            _ => None,
        }
    }

    /// Angle convergence target of the constructed families.
    pub fn psi(&self) -> f64 {
        0.0
    }

    /// Stream the first `n_max` intervals into `f`; stop early when `f`
    /// returns false.
    pub fn for_each_interval<F: FnMut(Interval) -> bool>(&self, n_max: usize, mut f: F) {
        match self {
            FamilyKind::AlternatingPower { alpha0, alpha1 } => {
                let p0 = PowEval::new(-alpha0);
                let p1 = PowEval::new(-alpha1);
                // φ_j = jπ/4 cycles through eight directions.
                let table: Vec<(f64, f64)> = (0..8)
                    .map(|k| {
                        let phi = k as f64 * FRAC_PI_4;
                        (phi.cos(), phi.sin())
                    })
                    .collect();
                for j in 1..=n_max {
                    let x = j as f64;
                    let length = if j % 2 == 0 { p0.eval(x) } else { p1.eval(x) };
                    let (cos_phi, sin_phi) = table[j % 8];
                    if !f(Interval {
                        length,
                        cos_phi,
                        sin_phi,
                    }) {
                        return;
                    }
                }
            }
            FamilyKind::PurePower { alpha, beta } => {
                let pl = PowEval::new(-alpha);
                let ps = PowEval::new(-beta);
                // Incremental rotation starting at φ_1 = π/2.
                let (mut c, mut s) = (0.0f64, 1.0f64);
                for j in 1..=n_max {
                    let x = j as f64;
                    if !f(Interval {
                        length: pl.eval(x),
                        cos_phi: c,
                        sin_phi: s,
                    }) {
                        return;
                    }
                    let sd = ps.eval(x).min(1.0);
                    let cd = (1.0 - sd * sd).sqrt();
                    let (cn, sn) = (c * cd - s * sd, s * cd + c * sd);
                    c = cn;
                    s = sn;
                    if j % 4096 == 0 {
                        let h = c.hypot(s);
                        c /= h;
                        s /= h;
                    }
                }
            }
            FamilyKind::MixedPeaks {
                alpha,
                nu,
                beta,
                gamma,
            } => {
                let pl = PowEval::new(-alpha);
                let pp = PowEval::new(-nu / 2.0);
                let ps = PowEval::new(-beta);
                let pg = gamma.map(|g| PowEval::new(-g));
                let psi = self.psi();
                let mut phi = FRAC_PI_2;
                let mut next_root = 1usize;
                for j in 1..=n_max {
                    let x = j as f64;
                    let length = if j == next_root * next_root {
                        next_root += 1;
                        pp.eval(x)
                    } else {
                        pl.eval(x)
                    };
                    if !f(Interval {
                        length,
                        cos_phi: phi.cos(),
                        sin_phi: phi.sin(),
                    }) {
                        return;
                    }
                    let step = ps.eval(x).min(1.0).asin();
                    match pg {
                        None => phi += step,
                        Some(pg) => {
                            // Damped walk: head for ψ while outside the
                            // corridor j^{−γ}, bounce along its edge inside.
                            let err = (phi - psi + FRAC_PI_2).rem_euclid(PI) - FRAC_PI_2;
                            let corridor = pg.eval(x).min(1.0);
                            if err.sin().abs() > corridor {
                                phi -= err.signum() * step;
                            } else {
                                phi += err.signum() * step;
                            }
                        }
                    }
                }
            }
            FamilyKind::BerezanskiiPower { beta, diag_ratio } => {
                let pb = PowEval::new(*beta);
                let ratio = *diag_ratio;
                stream_bridged(
                    |k| ratio * pb.eval((k + 1) as f64),
                    |k| pb.eval((k + 1) as f64),
                    n_max,
                    f,
                );
            }
            FamilyKind::ExplicitHamiltonian { lengths, angles } => {
                for (l, phi) in lengths.iter().zip(angles).take(n_max) {
                    if !f(Interval {
                        length: *l,
                        cos_phi: phi.cos(),
                        sin_phi: phi.sin(),
                    }) {
                        return;
                    }
                }
            }
            FamilyKind::ExplicitJacobi { a, b } => {
                stream_bridged(|k| a[k], |k| b[k], n_max.min(a.len() + 1), f);
            }
        }
    }

    /// Materialize the first n intervals as a Hamiltonian.
    pub fn hamiltonian_truncation(&self, n: usize) -> Result<HamburgerHamiltonian> {
        self.validate()?;
        match self {
            FamilyKind::BerezanskiiPower { .. } | FamilyKind::ExplicitJacobi { .. } => {
                let j = self.jacobi_truncation(n.saturating_sub(1).max(2))?;
                jacobi_to_hamiltonian(&j)
            }
            _ => {
                let mut lengths = Vec::with_capacity(n);
                let mut angles = Vec::with_capacity(n);
                // Lift the streamed directions back to cumulative angles with
                // jumps in (0, π).
                let mut prev = None::<f64>;
                self.for_each_interval(n, |iv| {
                    lengths.push(iv.length);
                    let theta = iv.sin_phi.atan2(iv.cos_phi);
                    let phi = match prev {
                        None => theta,
                        Some(p) => {
                            let mut d = (theta - p).rem_euclid(PI);
                            if d == 0.0 {
                                d = PI;
                            }
                            p + d
                        }
                    };
                    angles.push(phi);
                    prev = Some(phi);
                    true
                });
                HamburgerHamiltonian::new(lengths, angles)
            }
        }
    }

    /// Materialize the first n Jacobi parameters (Jacobi-side families).
    pub fn jacobi_truncation(&self, n: usize) -> Result<JacobiParameters> {
        match self {
            FamilyKind::BerezanskiiPower { beta, diag_ratio } => {
                let pb = PowEval::new(*beta);
                let b: Vec<f64> = (0..n).map(|k| pb.eval((k + 1) as f64)).collect();
                let a: Vec<f64> = b.iter().map(|x| x * diag_ratio).collect();
                JacobiParameters::new(a, b)
            }
            FamilyKind::ExplicitJacobi { a, b } => JacobiParameters::new(
                a[..n.min(a.len())].to_vec(),
                b[..n.min(b.len())].to_vec(),
            ),
            _ => Err(Error::InvalidInput(format!(
                "{} is not a Jacobi-side family",
                self.name()
            ))),
        }
    }
}

/// Stream the Hamburger Hamiltonian of a Jacobi matrix straight from the
/// polynomial recurrence at zero. Directions come from (−q_n, p_n); the sign
/// ambiguity is harmless because the factors only use ξξᵀ.
fn stream_bridged<A, B, F>(a: A, b: B, n_max: usize, mut f: F)
where
    A: Fn(usize) -> f64,
    B: Fn(usize) -> f64,
    F: FnMut(Interval) -> bool,
{
    let mut log_scale = 0.0f64;
    let (mut p_prev, mut q_prev) = (0.0f64, 0.0f64);
    let (mut p_cur, mut q_cur) = (1.0f64, 0.0f64); // index 0
    let mut b_prev = 0.0f64;
    for m in 0..n_max {
        let norm = p_cur.hypot(q_cur);
        if !(norm > 0.0) || !norm.is_finite() {
            return;
        }
        let length = (norm * norm) * (2.0 * log_scale).exp();
        if !(length > 0.0) || !length.is_finite() {
            return;
        }
        if !f(Interval {
            length,
            cos_phi: -q_cur / norm,
            sin_phi: p_cur / norm,
        }) {
            return;
        }
        // Advance (p, q) from index m to m+1.
        let bm = b(m);
        let (p_next, q_next) = if m == 0 {
            (-a(0) / bm, 1.0 / bm)
        } else {
            let am = a(m);
            (
                -(am * p_cur + b_prev * p_prev) / bm,
                -(am * q_cur + b_prev * q_prev) / bm,
            )
        };
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
        b_prev = bm;
        let m_abs = p_cur
            .abs()
            .max(q_cur.abs())
            .max(p_prev.abs())
            .max(q_prev.abs());
        if m_abs > 1e150 || (m_abs > 0.0 && m_abs < 1e-150) {
            let shift = m_abs.log2().floor();
            let factor = f64::exp2(-shift);
            p_prev *= factor;
            q_prev *= factor;
            p_cur *= factor;
            q_cur *= factor;
            log_scale += shift * LN_2;
        }
    }
}

/// Smallest n with r·tail(n) ≤ 1e−3 under the analytic tail rule, when the
/// family has one and the cap admits it.
fn auto_truncation_n(kind: &FamilyKind, r: f64, cap: usize) -> Option<usize> {
    let tail = |n: usize| kind.length_tail(n);
    tail(0)?;
    if r * tail(cap)? > 1e-3 {
        return None;
    }
    let (mut lo, mut hi) = (0usize, cap);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if r * tail(mid)? <= 1e-3 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi.max(2))
}

/// Per-point evaluation policy for log |w22(ir)|.
#[derive(Debug, Clone, Copy)]
pub struct EvalPolicy {
    /// The doubling ladder stops when the value moves by less than this,
    /// relative to max(1, |value|).
    pub rel_tol: f64,
    pub n_start: usize,
    pub n_max: usize,
}

impl Default for EvalPolicy {
    fn default() -> Self {
        Self {
            rel_tol: 1e-3,
            n_start: 1024,
            n_max: 1 << 25,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EvalPoint {
    pub r: f64,
    pub log_w22: f64,
    pub n_used: usize,
    pub truncation_limited: bool,
}

/// Evaluate log |w22(ir)| with per-r truncation: the analytic tail rule
/// r·Σ_{j>N} l_j ≤ 1e−3 when the family carries a tail formula and the rule
/// is affordable, otherwise doubling N until the value stabilizes.
pub fn eval_log_w22(kind: &FamilyKind, r: f64, policy: &EvalPolicy) -> EvalPoint {
    let z = Complex64::new(0.0, r);
    let available = kind.available_intervals();
    let cap = available.map_or(policy.n_max, |len| len.min(policy.n_max));

    if let Some(n_abs) = auto_truncation_n(kind, r, cap) {
        if n_abs <= cap {
            let mut w = ScaledMatrix2::identity();
            let mut used = 0usize;
            kind.for_each_interval(n_abs, |iv| {
                w.apply_interval(iv, z);
                used += 1;
                true
            });
            return EvalPoint {
                r,
                log_w22: w.log_abs_entry(1, 1),
                n_used: used,
                truncation_limited: false,
            };
        }
    }

    // One pass with doubling checkpoints.
    let mut w = ScaledMatrix2::identity();
    let mut count = 0usize;
    let mut checkpoint = policy.n_start.clamp(2, cap);
    let mut prev: Option<f64> = None;
    let mut converged: Option<(f64, usize)> = None;
    kind.for_each_interval(cap, |iv| {
        w.apply_interval(iv, z);
        count += 1;
        if count == checkpoint {
            let v = w.log_abs_entry(1, 1);
            if let Some(p) = prev {
                if (v - p).abs() <= policy.rel_tol * v.abs().max(1.0) {
                    converged = Some((v, count));
                    return false;
                }
            }
            prev = Some(v);
            if checkpoint == cap {
                return false;
            }
            checkpoint = (checkpoint * 2).min(cap);
        }
        true
    });
    match converged {
        Some((log_w22, n_used)) => EvalPoint {
            r,
            log_w22,
            n_used,
            truncation_limited: false,
        },
        None => EvalPoint {
            r,
            log_w22: w.log_abs_entry(1, 1),
            n_used: count,
            // Running out of explicit data is not a truncation failure; the
            // finite system is the object itself.
            truncation_limited: available.is_none(),
        },
    }
}

/// Evaluate a whole grid; points are independent and run in parallel.
pub fn eval_grid(kind: &FamilyKind, grid: &[f64], policy: &EvalPolicy) -> Vec<EvalPoint> {
    grid.par_iter()
        .map(|&r| eval_log_w22(kind, r, policy))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub r_window: (f64, f64),
    pub points: Vec<EvalPoint>,
}

/// Fit the order: least-squares slope of log log |w22(ir)| against log r on
/// a geometric grid.
pub fn order_fit(
    kind: &FamilyKind,
    r_lo: f64,
    r_hi: f64,
    points: usize,
    policy: &EvalPolicy,
) -> Result<OrderFit> {
    kind.validate()?;
    if !(r_hi / r_lo >= 100.0) {
        return Err(Error::ParameterOutOfRange(format!(
            "order fit needs r_hi/r_lo ≥ 100, got {}",
            r_hi / r_lo
        )));
    }
    if points < 10 {
        return Err(Error::ParameterOutOfRange(format!(
            "order fit needs ≥ 10 points, got {points}"
        )));
    }
    let grid = geometric_grid_n(r_lo, r_hi, points)?;
    let evals = eval_grid(kind, &grid, policy);
    let fit_pts: Vec<(f64, f64)> = evals
        .iter()
        .filter(|p| p.log_w22 > 1.0)
        .map(|p| (p.r.ln(), p.log_w22.ln()))
        .collect();
    let (slope, intercept, residual) = linear_fit(&fit_pts).ok_or_else(|| {
        Error::InvalidInput("too few usable points for the order fit".into())
    })?;
    Ok(OrderFit {
        slope,
        intercept,
        residual,
        r_window: (r_lo, r_hi),
        points: evals,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct UpperEntry {
    pub method: &'static str,
    pub params: BTreeMap<String, f64>,
    pub slope: Option<f64>,
    /// False when the curve is emitted for reference but its hypothesis
    /// fails for this family (it then does not enter the best-upper slope).
    pub applicable: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchTable {
    /// Printed branch values in order: ν ≥ 2α−1, α ≤ ν < 2α−1, ν < α.
    pub branches: [f64; 3],
    pub active: usize,
    pub gamma_used: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AngleValidation {
    pub target_beta: f64,
    pub measured_beta: f64,
    pub target_gamma: Option<f64>,
    pub measured_gamma: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub family: FamilySpec,
    pub known_order: Option<f64>,
    pub fit: OrderFit,
    /// (s, slope) of the disjoint-window counts for s = 2, 3, 4.
    pub lower_count_slopes: Vec<(usize, Option<f64>)>,
    /// (s, slope) of the pointwise lower curve at the best counting s.
    pub lower_k4: (usize, Option<f64>),
    pub uppers: Vec<UpperEntry>,
    pub order_boxes: Vec<(String, OrderBox)>,
    pub branch_table: Option<BranchTable>,
    pub berezanskii: Option<BerezanskiiReport>,
    pub angle_validation: Option<AngleValidation>,
    pub best_lower_slope: Option<f64>,
    pub best_upper_slope: Option<f64>,
    pub pass: Option<bool>,
    #[serde(skip)]
    pub curves: Vec<BoundCurve>,
}

/// Truncation for the bound curves: large enough that the counting curves
/// do not saturate below r_hi, within a memory cap.
fn curve_truncation(kind: &FamilyKind, r_hi: f64) -> usize {
    let cap: usize = 1 << 20;
    let mut n: usize = 1 << 14;
    loop {
        // b^{(2)} largest entry grows like the window index; probe cheaply
        // through the 2-window determinant of the last intervals.
        let h = match kind.hamiltonian_truncation(n) {
            Ok(h) => h,
            Err(_) => return n,
        };
        let last = h
            .b_s_sequence(2)
            .ok()
            .and_then(|b| b.last().copied())
            .unwrap_or(f64::INFINITY);
        if last > 10.0 * r_hi || n >= cap {
            return n;
        }
        n *= 2;
    }
}

fn slope_entry(curve: &BoundCurve, applicable: bool) -> UpperEntry {
    UpperEntry {
        method: curve.method,
        params: curve.params.clone(),
        slope: curve.slope(),
        applicable,
    }
}

fn measure_power(n: usize, take_abs: impl Fn(usize) -> f64) -> Option<f64> {
    // Log-spaced bins over the index range with envelope maxima per bin.
    // A walk can pass exactly through its target, so narrow bins at small j
    // would admit spurious near-zero outliers; start past the first decade
    // and require a few samples per bin.
    if n < 1000 {
        return None;
    }
    let bins = 24usize;
    let base = 16f64;
    let span = (n as f64) / base;
    let mut pts = Vec::new();
    for b in 0..bins {
        let lo = (base * span.powf(b as f64 / bins as f64)).floor() as usize;
        let hi = (base * span.powf((b + 1) as f64 / bins as f64)).ceil() as usize;
        let (lo, hi) = (lo.max(1), hi.min(n));
        if hi < lo + 4 {
            continue;
        }
        let mut vmax: f64 = 0.0;
        let mut jmax = lo;
        for j in lo..hi {
            let v = take_abs(j);
            if v > vmax {
                vmax = v;
                jmax = j;
            }
        }
        if vmax > 0.0 {
            pts.push(((jmax as f64).ln(), vmax.ln()));
        }
    }
    linear_fit(&pts).map(|(slope, _, _)| -slope)
}

/// Aggregate the fitted growth against every applicable lower and upper
/// bound, the closed-form order boxes, and the family diagnostics.
pub fn sandwich_report(spec: &FamilySpec, r_lo: f64, r_hi: f64) -> Result<SandwichReport> {
    sandwich_report_with(spec, r_lo, r_hi, 41, &EvalPolicy::default())
}

pub fn sandwich_report_with(
    spec: &FamilySpec,
    r_lo: f64,
    r_hi: f64,
    points: usize,
    policy: &EvalPolicy,
) -> Result<SandwichReport> {
    spec.kind.validate()?;
    let fit = order_fit(&spec.kind, r_lo, r_hi, points, policy)?;
    let grid: Vec<f64> = fit.points.iter().map(|p| p.r).collect();

    let n_curve = curve_truncation(&spec.kind, r_hi);
    let h = spec.kind.hamiltonian_truncation(n_curve)?;
    let psi = spec.kind.psi();
    let mut curves: Vec<BoundCurve> = Vec::new();

    // Lower bounds.
    let mut lower_count_slopes = Vec::new();
    for s in [2usize, 3, 4] {
        let c = lower_count_curve(&h, s, &grid)?;
        lower_count_slopes.push((s, c.slope()));
        curves.push(c);
    }
    let best_lower_slope = lower_count_slopes
        .iter()
        .filter_map(|(_, sl)| *sl)
        .fold(None, |acc: Option<f64>, x| {
            Some(acc.map_or(x, |a| a.max(x)))
        });
    let best_s = lower_count_slopes
        .iter()
        .filter(|(_, sl)| sl.is_some())
        .max_by(|a, b| a.1.unwrap().partial_cmp(&b.1.unwrap()).unwrap())
        .map(|(s, _)| *s)
        .unwrap_or(2);
    let k4 = lower_k4_curve(&h, best_s, &grid)?;
    let lower_k4 = (best_s, k4.slope());
    curves.push(k4);

    // Upper bounds and order boxes per family.
    let tails = AnalyticTails {
        lengths: spec.kind.length_tail(n_curve),
        sin_jumps: spec.kind.sin_jump_tail(n_curve),
        l_sin2: spec.kind.l_sin2_tail(n_curve),
        lengths_lp: None,
        sin_jumps_lp: None,
        l_sin2_lp: None,
    };
    let mut uppers: Vec<UpperEntry> = Vec::new();
    let mut order_boxes: Vec<(String, OrderBox)> = Vec::new();
    let mut branch_table = None;
    let mut angle_validation = None;

    let push_curve = |curves: &mut Vec<BoundCurve>,
                          uppers: &mut Vec<UpperEntry>,
                          curve: BoundCurve,
                          applicable: bool| {
        uppers.push(slope_entry(&curve, applicable));
        curves.push(curve);
    };

    match spec.kind {
        FamilyKind::AlternatingPower { alpha0, .. } => {
            let t = AnalyticTails {
                lengths_lp: spec.kind.length_lp_tail(n_curve, alpha0),
                ..tails
            };
            let c = upper_k79_curve(&h, alpha0, alpha0, psi, &grid, &t)?;
            push_curve(&mut curves, &mut uppers, c, true);
            // Constant angle jumps: the increment sums diverge, so the
            // summable-increment bound is reference only.
            let c = upper_k89_curve(&h, alpha0, 1.0, &grid, &t)?;
            push_curve(&mut curves, &mut uppers, c, false);
            order_boxes.push((
                "k94".into(),
                order_box(OrderCase::K94 {
                    alpha0,
                    omega0: alpha0,
                })?,
            ));
        }
        FamilyKind::PurePower { alpha, beta } => {
            let t = AnalyticTails {
                lengths_lp: spec.kind.length_lp_tail(n_curve, alpha),
                sin_jumps_lp: spec.kind.sin_jump_lp_tail(n_curve, beta.max(1.0)),
                l_sin2_lp: None,
                ..tails
            };
            if beta > 1.0 {
                let c = upper_k89_curve(&h, alpha, beta, &grid, &t)?;
                push_curve(&mut curves, &mut uppers, c, true);
                let c = upper_k66_curve(&h, &grid, &t)?;
                push_curve(&mut curves, &mut uppers, c, true);
                order_boxes.push((
                    "k104".into(),
                    order_box(OrderCase::K104 {
                        alpha0: alpha,
                        beta0: beta,
                    })?,
                ));
            }
            let c = upper_k79_curve(&h, alpha, alpha, psi, &grid, &t)?;
            push_curve(&mut curves, &mut uppers, c, true);
            let beta_eff = if beta >= 1.0 { 1.0 - 1e-9 } else { beta };
            if beta > 0.0 {
                let c = upper_k49_curve(&h, alpha, beta_eff, psi, &grid, &t, InverseVariant::Geq)?;
                push_curve(&mut curves, &mut uppers, c, true);
                let c =
                    upper_k49_curve(&h, alpha, beta_eff, psi, &grid, &t, InverseVariant::Literal)?;
                push_curve(&mut curves, &mut uppers, c, false);
                if beta <= 1.0 {
                    order_boxes.push((
                        "k91".into(),
                        order_box(OrderCase::K91 {
                            alpha0: alpha,
                            beta0: beta.max(1e-6),
                        })?,
                    ));
                }
            }
            order_boxes.push((
                "k74".into(),
                order_box(OrderCase::K74 {
                    alpha0: alpha,
                    beta0: beta.max(1e-6),
                })?,
            ));
        }
        FamilyKind::MixedPeaks {
            alpha,
            nu,
            beta,
            gamma,
        } => {
            let a_len = alpha.min(nu);
            let measured_beta =
                measure_power(h.len(), |j| {
                    if j + 1 < h.len() {
                        (h.angles()[j + 1] - h.angles()[j]).sin().abs()
                    } else {
                        0.0
                    }
                })
                .unwrap_or(beta);
            let measured_gamma = gamma.and_then(|_| {
                measure_power(h.len(), |j| (h.angles()[j] - psi).sin().abs())
            });
            angle_validation = Some(AngleValidation {
                target_beta: beta,
                measured_beta,
                target_gamma: gamma,
                measured_gamma,
            });
            let t = AnalyticTails {
                lengths_lp: spec.kind.length_lp_tail(n_curve, a_len),
                sin_jumps_lp: spec.kind.sin_jump_lp_tail(n_curve, beta.max(1.0)),
                l_sin2_lp: None,
                ..tails
            };
            if beta > 1.0 {
                let c = upper_k89_curve(&h, a_len, beta, &grid, &t)?;
                push_curve(&mut curves, &mut uppers, c, true);
                let c = upper_k66_curve(&h, &grid, &t)?;
                push_curve(&mut curves, &mut uppers, c, true);
                order_boxes.push((
                    "mixed-case1".into(),
                    order_box(OrderCase::Mixed1 { alpha, nu, beta })?,
                ));
            } else {
                let g_used = measured_gamma.or(gamma);
                if let Some(g) = g_used {
                    // Convergent angles: ω₀ = min(ν + 4γ, α + 2γ).
                    let omega = (nu + 4.0 * g).min(alpha + 2.0 * g).max(1.0);
                    let c = upper_k79_curve(&h, a_len, omega, psi, &grid, &t)?;
                    push_curve(&mut curves, &mut uppers, c, true);
                    branch_table = Some(BranchTable {
                        branches: k118_branch_values(alpha, nu, beta, g),
                        active: mixed_active_branch(alpha, nu),
                        gamma_used: Some(g),
                    });
                    order_boxes.push((
                        "mixed-case4".into(),
                        order_box(OrderCase::Mixed4 {
                            alpha,
                            nu,
                            beta,
                            gamma: g.min(beta),
                        })?,
                    ));
                } else {
                    let c = upper_k79_curve(&h, a_len, a_len, psi, &grid, &t)?;
                    push_curve(&mut curves, &mut uppers, c, true);
                    branch_table = Some(BranchTable {
                        branches: k120_branch_values(alpha, nu, beta),
                        active: mixed_active_branch(alpha, nu),
                        gamma_used: None,
                    });
                    order_boxes.push((
                        "mixed-case3".into(),
                        order_box(OrderCase::Mixed3 { alpha, nu, beta })?,
                    ));
                }
                if beta > 0.0 && beta < 1.0 {
                    let c =
                        upper_k49_curve(&h, a_len, beta, psi, &grid, &t, InverseVariant::Geq)?;
                    push_curve(&mut curves, &mut uppers, c, true);
                }
            }
        }
        FamilyKind::BerezanskiiPower { beta, .. } => {
            let c = upper_k79_curve(&h, beta, beta, psi, &grid, &tails)?;
            push_curve(&mut curves, &mut uppers, c, true);
            order_boxes.push((
                "k94".into(),
                order_box(OrderCase::K94 {
                    alpha0: beta,
                    omega0: beta,
                })?,
            ));
        }
        FamilyKind::ExplicitHamiltonian { .. } | FamilyKind::ExplicitJacobi { .. } => {
            // No family structure to pick parameters from; K79 with the
            // universal sin² ≤ 1 envelope is always available.
            let c = upper_k79_curve(&h, 1.0, 1.0, psi, &grid, &tails)?;
            push_curve(&mut curves, &mut uppers, c, true);
        }
    }

    let berezanskii = match &spec.kind {
        FamilyKind::BerezanskiiPower { .. } => {
            let j = spec.kind.jacobi_truncation(50_000)?;
            Some(berezanskii_check(&j)?)
        }
        _ => None,
    };

    let best_upper_slope = uppers
        .iter()
        .filter(|u| u.applicable)
        .filter_map(|u| u.slope)
        .fold(None, |acc: Option<f64>, x| {
            Some(acc.map_or(x, |a: f64| a.min(x)))
        });
    let pass = match (best_lower_slope, best_upper_slope) {
        (Some(lo), Some(hi)) => {
            Some(lo <= fit.slope + 0.05 && fit.slope <= hi + 0.05)
        }
        _ => None,
    };

    Ok(SandwichReport {
        known_order: spec.kind.known_order(),
        family: spec.clone(),
        fit,
        lower_count_slopes,
        lower_k4,
        uppers,
        order_boxes,
        branch_table,
        berezanskii,
        angle_validation,
        best_lower_slope,
        best_upper_slope,
        pass,
        curves,
    })
}
