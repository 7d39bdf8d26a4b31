//! Binned bivariate densities with separable Gaussian smoothing, exported
//! as CSV, a JSON sidecar and a 16-bit PGM image.

use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::fmt::format_sig;
use crate::io::write_atomic;

pub const DEFAULT_BINS: usize = 1000;
pub const DEFAULT_SIGMA: f64 = 8.0;
/// Kernel radius in units of sigma.
pub const TRUNCATE_SIGMAS: f64 = 4.0;
const COLLAPSED_AXIS_PAD: f64 = 0.005;

#[derive(Debug, Error)]
pub enum HeatmapError {
    #[error("no points to bin")]
    NoPoints,
    #[error("point {0} has a non-finite coordinate")]
    NonFiniteCoordinate(usize),
    #[error("bins must be positive")]
    ZeroBins,
    #[error("sigma must be non-negative, got {0}")]
    NegativeSigma(f64),
    #[error("writing {path}: {source}")]
    IoFailure {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// Square density grid. `counts[row * bins + col]`, row = y bin (row 0 is
/// the lowest y), col = x bin.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapGrid {
    pub bins: usize,
    pub counts: Vec<f64>,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub x_mean: f64,
    pub y_mean: f64,
    pub sigma: f64,
}

impl HeatmapGrid {
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.counts[row * self.bins + col]
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }
}

fn axis_range(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let min = values.clone().fold(f64::INFINITY, f64::min);
    let max = values.fold(f64::NEG_INFINITY, f64::max);
    if min < max {
        return (min, max);
    }
    let pad = if min == 0.0 {
        COLLAPSED_AXIS_PAD
    } else {
        min.abs() * COLLAPSED_AXIS_PAD
    };
    (min - pad, max + pad)
}

fn bin_of(v: f64, (lo, hi): (f64, f64), bins: usize) -> usize {
    let pos = ((v - lo) / (hi - lo) * bins as f64).floor();
    // top edge is closed
    (pos.max(0.0) as usize).min(bins - 1)
}

pub fn histogram2d(points: &[(f64, f64)], bins: usize) -> Result<HeatmapGrid, HeatmapError> {
    if points.is_empty() {
        return Err(HeatmapError::NoPoints);
    }
    if bins == 0 {
        return Err(HeatmapError::ZeroBins);
    }
    if let Some(i) = points
        .iter()
        .position(|(x, y)| !x.is_finite() || !y.is_finite())
    {
        return Err(HeatmapError::NonFiniteCoordinate(i));
    }
    let x_range = axis_range(points.iter().map(|p| p.0));
    let y_range = axis_range(points.iter().map(|p| p.1));
    let mut counts = vec![0.0; bins * bins];
    for &(x, y) in points {
        counts[bin_of(y, y_range, bins) * bins + bin_of(x, x_range, bins)] += 1.0;
    }
    let n = points.len() as f64;
    Ok(HeatmapGrid {
        bins,
        counts,
        x_range,
        y_range,
        x_mean: points.iter().map(|p| p.0).sum::<f64>() / n,
        y_mean: points.iter().map(|p| p.1).sum::<f64>() / n,
        sigma: 0.0,
    })
}

/// Normalised Gaussian taps for offsets `-radius..=radius`.
fn kernel(sigma: f64) -> Vec<f64> {
    let radius = (TRUNCATE_SIGMAS * sigma).ceil() as i64;
    let taps: Vec<f64> = (-radius..=radius)
        .map(|k| (-(k * k) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = taps.iter().sum();
    taps.into_iter().map(|w| w / total).collect()
}

/// Half-sample symmetric reflection: `.. b a | a b .. y z | z y ..`.
fn reflect(i: i64, n: i64) -> usize {
    let period = 2 * n;
    let m = i.rem_euclid(period);
    (if m < n { m } else { period - 1 - m }) as usize
}

fn convolve_rows(data: &[f64], width: usize, taps: &[f64]) -> Vec<f64> {
    let radius = (taps.len() / 2) as i64;
    let n = width as i64;
    let mut out = vec![0.0; data.len()];
    out.par_chunks_mut(width)
        .zip(data.par_chunks(width))
        .for_each(|(dst, src)| {
            for (i, slot) in dst.iter_mut().enumerate() {
                let i = i as i64;
                let mut acc = 0.0;
                for (k, w) in taps.iter().enumerate() {
                    acc += w * src[reflect(i + k as i64 - radius, n)];
                }
                *slot = acc;
            }
        });
    out
}

fn transpose(data: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; data.len()];
    for r in 0..n {
        for c in 0..n {
            out[c * n + r] = data[r * n + c];
        }
    }
    out
}

/// Separable Gaussian blur with a kernel truncated at `ceil(4 sigma)` and
/// renormalised, reflecting at the borders. `sigma == 0` is the identity.
pub fn gaussian_blur(grid: &HeatmapGrid, sigma: f64) -> Result<HeatmapGrid, HeatmapError> {
    if sigma.is_nan() || sigma < 0.0 {
        return Err(HeatmapError::NegativeSigma(sigma));
    }
    let mut out = grid.clone();
    out.sigma = sigma;
    if sigma == 0.0 {
        return Ok(out);
    }
    let taps = kernel(sigma);
    let n = grid.bins;
    let along_x = convolve_rows(&grid.counts, n, &taps);
    let along_y = convolve_rows(&transpose(&along_x, n), n, &taps);
    out.counts = transpose(&along_y, n);
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct GridSidecar<'a> {
    pub name: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub bins: usize,
    pub x_range: [f64; 2],
    pub y_range: [f64; 2],
    pub x_mean: f64,
    pub y_mean: f64,
    pub sigma: f64,
    pub total_mass: f64,
    pub kernel_radius: usize,
    pub boundary: &'static str,
    pub csv_row_order: &'static str,
    pub pgm_row_order: &'static str,
}

/// Axis labels carried into the sidecar.
#[derive(Debug, Clone, Copy)]
pub struct AxisLabels<'a> {
    pub name: &'a str,
    pub x: &'a str,
    pub y: &'a str,
}

impl Default for AxisLabels<'_> {
    fn default() -> Self {
        AxisLabels {
            name: "heatmap",
            x: "x",
            y: "y",
        }
    }
}

/// Paths written by [`export_grid`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridFiles {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub pgm: PathBuf,
}

pub fn grid_to_csv(grid: &HeatmapGrid) -> String {
    let mut out = String::with_capacity(grid.bins * grid.bins * 4);
    for row in grid.counts.chunks(grid.bins) {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format_sig(*v, 9));
        }
        out.push('\n');
    }
    out
}

/// 16-bit binary PGM, min-max normalised, highest y row first.
pub fn grid_to_pgm(grid: &HeatmapGrid) -> Vec<u8> {
    let n = grid.bins;
    let min = grid.counts.iter().copied().fold(f64::INFINITY, f64::min);
    let max = grid
        .counts
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    let header = format!("P5\n{n} {n}\n65535\n");
    let mut out = Vec::with_capacity(header.len() + 2 * n * n);
    out.extend_from_slice(header.as_bytes());
    for row in grid.counts.chunks(n).rev() {
        for &v in row {
            let level = if span > 0.0 {
                ((v - min) / span * 65535.0).round() as u16
            } else {
                0
            };
            out.extend_from_slice(&level.to_be_bytes());
        }
    }
    out
}

pub fn export_grid(
    grid: &HeatmapGrid,
    labels: AxisLabels<'_>,
    base: &Path,
) -> Result<GridFiles, HeatmapError> {
    let with_ext = |ext: &str| {
        let mut p = base.as_os_str().to_owned();
        p.push(".");
        p.push(ext);
        PathBuf::from(p)
    };
    let files = GridFiles {
        csv: with_ext("csv"),
        json: with_ext("json"),
        pgm: with_ext("pgm"),
    };
    let sidecar = GridSidecar {
        name: labels.name,
        x_label: labels.x,
        y_label: labels.y,
        bins: grid.bins,
        x_range: [grid.x_range.0, grid.x_range.1],
        y_range: [grid.y_range.0, grid.y_range.1],
        x_mean: grid.x_mean,
        y_mean: grid.y_mean,
        sigma: grid.sigma,
        total_mass: grid.total(),
        kernel_radius: (TRUNCATE_SIGMAS * grid.sigma).ceil() as usize,
        boundary: "reflect (half-sample symmetric), truncated kernel renormalised",
        csv_row_order: "row 0 = lowest y bin",
        pgm_row_order: "row 0 = highest y bin",
    };
    let mut json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    json.push('\n');
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| HeatmapError::IoFailure { path, source }
    };
    write_atomic(&files.csv, grid_to_csv(grid).as_bytes()).map_err(io_err(&files.csv))?;
    write_atomic(&files.json, json.as_bytes()).map_err(io_err(&files.json))?;
    write_atomic(&files.pgm, &grid_to_pgm(grid)).map_err(io_err(&files.pgm))?;
    Ok(files)
}
