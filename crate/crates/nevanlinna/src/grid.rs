//! Geometric r-grids shared by curve evaluation and the CLI.

use crate::error::{Error, Result};

/// Geometric grid with a fixed number of points per decade of r, endpoints
/// included when they land on the lattice: r_k = lo·10^(k/per_decade).
pub fn geometric_grid(r_lo: f64, r_hi: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(r_lo > 0.0) || !(r_hi > r_lo) {
        return Err(Error::ParameterOutOfRange(format!(
            "need 0 < r_lo < r_hi, got [{r_lo}, {r_hi}]"
        )));
    }
    if per_decade == 0 {
        return Err(Error::ParameterOutOfRange("per_decade = 0".into()));
    }
    let decades = (r_hi / r_lo).log10();
    let steps = (decades * per_decade as f64 + 1e-9).floor() as usize;
    Ok((0..=steps)
        .map(|k| r_lo * 10f64.powf(k as f64 / per_decade as f64))
        .collect())
}

/// Geometric grid with a fixed total point count, both endpoints included.
pub fn geometric_grid_n(r_lo: f64, r_hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(r_lo > 0.0) || !(r_hi > r_lo) {
        return Err(Error::ParameterOutOfRange(format!(
            "need 0 < r_lo < r_hi, got [{r_lo}, {r_hi}]"
        )));
    }
    if points < 2 {
        return Err(Error::ParameterOutOfRange("need at least 2 points".into()));
    }
    let ratio = r_hi / r_lo;
    Ok((0..points)
        .map(|k| r_lo * ratio.powf(k as f64 / (points - 1) as f64))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn per_decade_point_count() {
        // Four decades at 20/decade: 81 grid points.
        let g = geometric_grid(1e4, 1e8, 20).unwrap();
        assert_eq!(g.len(), 81);
        assert!((g[0] - 1e4).abs() < 1e-6);
        assert!((g[80] - 1e8).abs() < 1e-2);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn fixed_count_endpoints() {
        let g = geometric_grid_n(1.0, 100.0, 5).unwrap();
        assert_eq!(g.len(), 5);
        assert!((g[0] - 1.0).abs() < 1e-12);
        assert!((g[4] - 100.0).abs() < 1e-10);
        assert!(geometric_grid_n(2.0, 1.0, 5).is_err());
    }
}
