//! Hamburger Hamiltonians: piecewise-constant rank-one trace-normalized
//! Hamiltonians on (0, L), stored as finite truncations of their length and
//! angle sequences, together with the determinant functional det Ω and the
//! partition counters built on it.

use crate::error::{Error, Result};
use crate::kahan::KahanSum;

/// Angle jumps with |sin(Δφ)| below this are rejected at construction;
/// without a genuine jump at every node the lengths are not unique.
pub const ANGLE_JUMP_TOL: f64 = 1e-14;

/// Windows of at most this many intervals evaluate det Ω through the
/// cancellation-free double sum; wider windows use the O(w) accumulation.
pub const DET_DOUBLE_SUM_MAX: usize = 512;

/// When the accumulated determinant loses more than ten digits to
/// cancellation, fall back to the (exact-sign) double sum.
pub const DET_CANCELLATION_GUARD: f64 = 1e-10;

/// Relative tolerance deciding the σ-partition termination tie.
pub const SIGMA_TIE_TOL: f64 = 1e-12;

/// One constant interval of the Hamiltonian: length and direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub length: f64,
    pub cos_phi: f64,
    pub sin_phi: f64,
}

/// A finite truncation of a Hamburger Hamiltonian.
///
/// `lengths[j]` and `angles[j]` are l_{j+1} and φ_{j+1} of the interval
/// `[x_j, x_{j+1})`; node positions are the prefix sums of the lengths.
#[derive(Debug, Clone)]
pub struct HamburgerHamiltonian {
    lengths: Vec<f64>,
    angles: Vec<f64>,
    nodes: Vec<f64>,
    trig: Vec<(f64, f64)>,
}

/// Ω(s,t) = ∫ H over [s,t], with its determinant carried separately so the
/// cancellation-guarded evaluation path is preserved.
#[derive(Debug, Clone, Copy)]
pub struct OmegaMatrix {
    pub m11: f64,
    pub m12: f64,
    pub m22: f64,
    pub det: f64,
}

impl OmegaMatrix {
    pub fn trace(&self) -> f64 {
        self.m11 + self.m22
    }
}

/// Result of the σ-partition of [0, L] at a given r.
#[derive(Debug, Clone)]
pub struct SigmaPartition {
    /// σ_0 = 0 < σ_1 < … < σ_κ = L.
    pub points: Vec<f64>,
    /// Number of segments.
    pub kappa: usize,
}

impl HamburgerHamiltonian {
    pub fn new(lengths: Vec<f64>, angles: Vec<f64>) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::InvalidInput("no intervals".into()));
        }
        if lengths.len() != angles.len() {
            return Err(Error::InvalidInput(format!(
                "{} lengths but {} angles",
                lengths.len(),
                angles.len()
            )));
        }
        for (j, &l) in lengths.iter().enumerate() {
            if !(l > 0.0) || !l.is_finite() {
                return Err(Error::InvalidInput(format!("length {} at index {j}", l)));
            }
        }
        for (j, &phi) in angles.iter().enumerate() {
            if !phi.is_finite() {
                return Err(Error::InvalidInput(format!("angle {} at index {j}", phi)));
            }
            if j + 1 < angles.len() {
                let sin_abs = (angles[j + 1] - phi).sin().abs();
                if sin_abs < ANGLE_JUMP_TOL {
                    return Err(Error::DegenerateJump { index: j, sin_abs });
                }
            }
        }
        let mut nodes = Vec::with_capacity(lengths.len() + 1);
        nodes.push(0.0);
        let mut acc = KahanSum::new();
        for &l in &lengths {
            acc.add(l);
            nodes.push(acc.value());
        }
        let trig = angles.iter().map(|&p| (p.cos(), p.sin())).collect();
        Ok(Self {
            lengths,
            angles,
            nodes,
            trig,
        })
    }

    /// Number of intervals N of the truncation.
    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// x_N, the truncated total length.
    pub fn total_length(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Node position x_n = Σ_{j≤n} l_j, with x_0 = 0.
    pub fn node_position(&self, n: usize) -> Result<f64> {
        self.nodes
            .get(n)
            .copied()
            .ok_or(Error::IndexOutOfRange {
                index: n,
                limit: self.len(),
            })
    }

    /// Angle increments φ_{j+2} − φ_{j+1} as |sin|, j = 0..N−2.
    pub fn sin_jumps(&self) -> Vec<f64> {
        self.angles
            .windows(2)
            .map(|w| (w[1] - w[0]).sin().abs())
            .collect()
    }

    pub fn intervals(&self) -> impl Iterator<Item = Interval> + '_ {
        self.lengths
            .iter()
            .zip(&self.trig)
            .map(|(&length, &(cos_phi, sin_phi))| Interval {
                length,
                cos_phi,
                sin_phi,
            })
    }

    #[inline]
    fn sin_diff(&self, j: usize, k: usize) -> f64 {
        // sin(φ_j − φ_k) from the stored direction vectors.
        let (cj, sj) = self.trig[j];
        let (ck, sk) = self.trig[k];
        sj * ck - cj * sk
    }

    /// det Ω(x_m, x_n) between nodes.
    pub fn det_omega_nodes(&self, m: usize, n: usize) -> Result<f64> {
        self.check_node_pair(m, n)?;
        Ok(self.det_window(m, n, None, None))
    }

    /// Cancellation-free double-sum evaluation of det Ω(x_m, x_n).
    pub fn det_omega_double_sum(&self, m: usize, n: usize) -> Result<f64> {
        self.check_node_pair(m, n)?;
        Ok(self.det_window_double_sum(m, n, None, None))
    }

    /// O(w) compensated accumulation of Ω followed by determinant
    /// extraction, without the cancellation fallback.
    pub fn det_omega_accumulated(&self, m: usize, n: usize) -> Result<f64> {
        self.check_node_pair(m, n)?;
        Ok(self.accumulate_window(m, n, None, None).1)
    }

    /// det Ω(s, t) for real endpoints; boundary intervals contribute
    /// fractional lengths.
    pub fn det_omega_real(&self, s: f64, t: f64) -> Result<f64> {
        let (a, b, w_first, w_last) = self.window_for(s, t)?;
        if b <= a {
            return Ok(0.0);
        }
        Ok(self.det_window(a, b, w_first, w_last))
    }

    /// Ω(s, t) with its determinant computed through the guarded path.
    pub fn omega(&self, s: f64, t: f64) -> Result<OmegaMatrix> {
        let (a, b, w_first, w_last) = self.window_for(s, t)?;
        let ((m11, m12, m22), _) = self.accumulate_window(a, b, w_first, w_last);
        let det = if b > a {
            self.det_window(a, b, w_first, w_last)
        } else {
            0.0
        };
        Ok(OmegaMatrix { m11, m12, m22, det })
    }

    /// b_j^{(s)} = det Ω(x_j, x_{j+s})^{−1/2} for j = 0..N−s.
    pub fn b_s_sequence(&self, s: usize) -> Result<Vec<f64>> {
        if s < 2 {
            return Err(Error::ParameterOutOfRange(format!("s = {s}, need s ≥ 2")));
        }
        if self.len() < s {
            return Err(Error::SequenceTooShort {
                needed: s,
                got: self.len(),
            });
        }
        Ok((0..=self.len() - s)
            .map(|j| {
                let det = self.det_window_double_sum(j, j + s, None, None);
                det.sqrt().recip()
            })
            .collect())
    }

    /// Maximal number of consecutive disjoint subintervals of [0, L] with
    /// det Ω ≥ 1/r², found by the left-to-right greedy sweep (greedy is
    /// maximal because det Ω is monotone under interval inclusion).
    pub fn greedy_partition_count(&self, r: f64) -> usize {
        assert!(r > 0.0, "r must be positive");
        let target = r.powi(-2);
        let total = self.total_length();
        let pos_tol = 1e-12 * total;
        let mut count = 0usize;
        let mut start = 0.0f64;
        loop {
            let rest = self.det_omega_real(start, total).unwrap_or(0.0);
            if rest < target {
                break;
            }
            // Minimal t with det Ω(start, t) ≥ target; keep the feasible side.
            let mut lo = start;
            let mut hi = total;
            while hi - lo > pos_tol {
                let mid = 0.5 * (lo + hi);
                if self.det_omega_real(start, mid).unwrap_or(0.0) >= target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            count += 1;
            if hi >= total {
                break;
            }
            start = hi;
        }
        count
    }

    /// σ-partition: σ_0 = 0, det Ω(σ_{k−1}, σ_k) = 1/r² until the remainder
    /// falls at or below 1/r², which closes the partition at L.
    pub fn sigma_partition(&self, r: f64) -> SigmaPartition {
        assert!(r > 0.0, "r must be positive");
        let target = r.powi(-2);
        let total = self.total_length();
        let pos_tol = 1e-12 * total;
        let mut points = vec![0.0f64];
        loop {
            let last = *points.last().unwrap();
            let rest = self.det_omega_real(last, total).unwrap_or(0.0);
            if rest <= target * (1.0 + SIGMA_TIE_TOL) {
                points.push(total);
                break;
            }
            let mut lo = last;
            let mut hi = total;
            while hi - lo > pos_tol {
                let mid = 0.5 * (lo + hi);
                if self.det_omega_real(last, mid).unwrap_or(0.0) >= target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let sigma = 0.5 * (lo + hi);
            if sigma <= last + pos_tol {
                // Degenerate progress; close the partition rather than loop.
                points.push(total);
                break;
            }
            points.push(sigma);
        }
        let kappa = points.len() - 1;
        SigmaPartition { points, kappa }
    }

    fn check_node_pair(&self, m: usize, n: usize) -> Result<()> {
        if n > self.len() {
            return Err(Error::IndexOutOfRange {
                index: n,
                limit: self.len(),
            });
        }
        if m >= n {
            return Err(Error::EmptyInterval {
                lo: m as f64,
                hi: n as f64,
            });
        }
        Ok(())
    }

    /// Map real endpoints to an interval window [a, b) plus fractional
    /// first/last weights.
    fn window_for(&self, s: f64, t: f64) -> Result<(usize, usize, Option<f64>, Option<f64>)> {
        let total = self.total_length();
        if !(s < t) {
            return Err(Error::EmptyInterval { lo: s, hi: t });
        }
        if s < 0.0 || t > total * (1.0 + 1e-12) {
            return Err(Error::EndpointOutOfRange {
                value: if s < 0.0 { s } else { t },
                limit: total,
            });
        }
        let t = t.min(total);
        // a = first interval with x_{a+1} > s, b = last interval with x_{b-1} < t.
        let a = match self.nodes.binary_search_by(|x| x.partial_cmp(&s).unwrap()) {
            Ok(i) => i.min(self.len()),
            Err(i) => i - 1,
        };
        let b = match self.nodes.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => i,
            Err(i) => i,
        };
        let b = b.min(self.len());
        if b <= a {
            // Both endpoints inside one interval: rank-one segment.
            return Ok((a, a, None, None));
        }
        let w_first = (self.nodes[a + 1].min(t) - s).max(0.0);
        let w_last = (t - self.nodes[b - 1].max(s)).max(0.0);
        if b == a + 1 {
            // Single interval: the overlap is w_first; suppress w_last.
            return Ok((a, b, Some(w_first), None));
        }
        Ok((a, b, Some(w_first), Some(w_last)))
    }

    #[inline]
    fn weight(&self, j: usize, a: usize, b: usize, w_first: Option<f64>, w_last: Option<f64>) -> f64 {
        if j == a {
            if let Some(w) = w_first {
                return w;
            }
        }
        if j + 1 == b {
            if let Some(w) = w_last {
                return w;
            }
        }
        self.lengths[j]
    }

    fn det_window(&self, a: usize, b: usize, w_first: Option<f64>, w_last: Option<f64>) -> f64 {
        if b <= a + 1 {
            return 0.0;
        }
        if b - a <= DET_DOUBLE_SUM_MAX {
            return self.det_window_double_sum(a, b, w_first, w_last);
        }
        let ((m11, m12, m22), det) = self.accumulate_window(a, b, w_first, w_last);
        if det < DET_CANCELLATION_GUARD * m11 * m22 || !(m12.is_finite()) {
            return self.det_window_double_sum(a, b, w_first, w_last);
        }
        det
    }

    /// ½ Σ_{j,k} w_j w_k sin²(φ_j − φ_k) over the window; every term is
    /// nonnegative, so the sign of the result is exact.
    fn det_window_double_sum(
        &self,
        a: usize,
        b: usize,
        w_first: Option<f64>,
        w_last: Option<f64>,
    ) -> f64 {
        let mut acc = KahanSum::new();
        for k in a + 1..b {
            let wk = self.weight(k, a, b, w_first, w_last);
            for j in a..k {
                let wj = self.weight(j, a, b, w_first, w_last);
                let sd = self.sin_diff(j, k);
                acc.add(wj * wk * (sd * sd));
            }
        }
        acc.value()
    }

    fn accumulate_window(
        &self,
        a: usize,
        b: usize,
        w_first: Option<f64>,
        w_last: Option<f64>,
    ) -> ((f64, f64, f64), f64) {
        let mut m11 = KahanSum::new();
        let mut m12 = KahanSum::new();
        let mut m22 = KahanSum::new();
        for j in a..b {
            let w = self.weight(j, a, b, w_first, w_last);
            let (c, s) = self.trig[j];
            m11.add(w * c * c);
            m12.add(w * c * s);
            m22.add(w * s * s);
        }
        let (m11, m12, m22) = (m11.value(), m12.value(), m22.value());
        ((m11, m12, m22), m11 * m22 - m12 * m12)
    }
}
