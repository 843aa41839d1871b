//! One-dimensional distances between empirical distributions.
//!
//! All three are evaluated on the sorted union of both samples using
//! right-continuous empirical CDFs, `F(z) = #{x <= z} / n`. The integrals
//! are exact for step functions: the CDF difference is constant on every
//! interval between consecutive grid points.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DistanceError {
    #[error("empty sample")]
    Empty,
    #[error("sample contains a non-finite value")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distances {
    pub ks: f64,
    pub w1: f64,
    pub cvm: f64,
}

/// Grid points and the CDF difference `F_X - F_Y` at each of them.
fn aligned_cdf_gaps(x: &[f64], y: &[f64]) -> Result<(Vec<f64>, Vec<f64>), DistanceError> {
    if x.is_empty() || y.is_empty() {
        return Err(DistanceError::Empty);
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(DistanceError::NonFinite);
    }
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let mut grid: Vec<f64> = xs.iter().chain(&ys).copied().collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let (nx, ny) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut gaps = Vec::with_capacity(grid.len());
    for &z in &grid {
        while i < xs.len() && xs[i] <= z {
            i += 1;
        }
        while j < ys.len() && ys[j] <= z {
            j += 1;
        }
        gaps.push(i as f64 / nx - j as f64 / ny);
    }
    Ok((grid, gaps))
}

pub fn ks_distance(x: &[f64], y: &[f64]) -> Result<f64, DistanceError> {
    let (_, gaps) = aligned_cdf_gaps(x, y)?;
    Ok(gaps.iter().fold(0.0, |m, g| m.max(g.abs())))
}

pub fn w1_distance(x: &[f64], y: &[f64]) -> Result<f64, DistanceError> {
    let (grid, gaps) = aligned_cdf_gaps(x, y)?;
    Ok(grid.windows(2).zip(&gaps).map(|(w, g)| g.abs() * (w[1] - w[0])).sum())
}

/// Unweighted squared-CDF integral.
pub fn cvm_distance(x: &[f64], y: &[f64]) -> Result<f64, DistanceError> {
    let (grid, gaps) = aligned_cdf_gaps(x, y)?;
    Ok(grid.windows(2).zip(&gaps).map(|(w, g)| g * g * (w[1] - w[0])).sum())
}

pub fn distances(x: &[f64], y: &[f64]) -> Result<Distances, DistanceError> {
    Ok(Distances {
        ks: ks_distance(x, y)?,
        w1: w1_distance(x, y)?,
        cvm: cvm_distance(x, y)?,
    })
}
