//! Efficiency of reciprocity-based beamforming (analytic and Monte Carlo),
//! SNR regimes, beam sweeping, and spatial path-gain fields.
//!
//! The analytic expected path gain under a noisy channel estimate is
//!
//! ```text
//! PG_R = SNR / (1 + SNR) * (L * P_ch + P_n),   SNR = P_ch / P_n
//! ```
//!
//! with three asymptotic regimes: `P_ch` when `L * SNR` is small (random
//! beamforming), `L * P_ch * SNR` in the linear transition, and saturation
//! at the full array gain `L * P_ch` once the estimate is clean. The Monte
//! Carlo path draws noisy estimates, beamforms with their conjugate, and
//! reports sample statistics plus empirical coverage of the analytic value
//! +- n standard deviations.

use std::fmt;

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arrays::local_angles;
use crate::arrays::ElementRef;
use crate::beamform::{path_gain, pw_weights, sw_los_weights, PwVariant, Weights};
use crate::channel::{add_complex_gaussian, channel_power, ChannelVector};
use crate::scenario::Scenario;
use crate::{Error, Result};

/// Asymptotic SNR regime of the reciprocity-based beamformer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnrRegime {
    Low,
    Linear,
    High,
}

impl fmt::Display for SnrRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SnrRegime::Low => "low",
            SnrRegime::Linear => "linear",
            SnrRegime::High => "high",
        };
        f.write_str(s)
    }
}

/// Classifies an operating point. Boundaries are half-open: low when
/// `L * SNR <= 1`, high when `SNR >= L`, linear in between.
pub fn snr_regime(l: usize, snr: f64) -> SnrRegime {
    let l = l as f64;
    if l * snr <= 1.0 {
        SnrRegime::Low
    } else if snr >= l {
        SnrRegime::High
    } else {
        SnrRegime::Linear
    }
}

/// Expected path gain of the reciprocity-based beamformer for `L` elements,
/// channel power `P_ch`, and estimation-noise variance `P_n`. A noise-free
/// estimate saturates at the full array gain `L * P_ch`.
pub fn reciprocity_pg_analytic(l: usize, p_ch: f64, p_n: f64) -> Result<(f64, SnrRegime)> {
    if l == 0 {
        return Err(Error::InvalidArgument(
            "element count must be positive".into(),
        ));
    }
    if !(p_ch > 0.0) {
        return Err(Error::InvalidArgument(
            "channel power must be positive".into(),
        ));
    }
    if !(p_n >= 0.0) {
        return Err(Error::InvalidArgument(
            "noise power must be nonnegative".into(),
        ));
    }
    if p_n == 0.0 {
        return Ok((l as f64 * p_ch, SnrRegime::High));
    }
    let snr = p_ch / p_n;
    let pg = snr / (1.0 + snr) * (l as f64 * p_ch + p_n);
    Ok((pg, snr_regime(l, snr)))
}

/// One operating point of a reciprocity Monte Carlo run.
#[derive(Debug, Clone)]
pub struct ReciprocityPoint {
    /// Channel SNR of the point (dB); infinite for a noise-free estimate.
    pub snr_db: f64,
    /// Estimation-noise variance per complex entry.
    pub sigma_h2: f64,
    /// Analytic expected path gain.
    pub pg_analytic: f64,
    /// Sample mean of the Monte Carlo path gains.
    pub pg_mc_mean: f64,
    /// Sample standard deviation of the Monte Carlo path gains.
    pub pg_mc_std: f64,
    /// Empirical coverage of `pg_analytic +- n * pg_mc_std` for n = 1, 2, 3.
    pub coverage: [f64; 3],
    pub regime: SnrRegime,
}

/// Monte Carlo efficiency of reciprocity beamforming at one noise level:
/// draws `m` noisy estimates of `h`, beamforms with the conjugate of each
/// estimate, and accumulates path-gain statistics. Realization `i` uses RNG
/// stream `i` of the seed, so results are independent of evaluation order.
pub fn reciprocity_mc(h: &ChannelVector, sigma_h2: f64, m: usize, seed: u64) -> ReciprocityPoint {
    let l = h.len();
    let p_ch = channel_power(h);
    let (pg_analytic, regime) = reciprocity_pg_analytic(l, p_ch, sigma_h2)
        .expect("nonempty channel with positive power");
    let snr = if sigma_h2 == 0.0 {
        f64::INFINITY
    } else {
        p_ch / sigma_h2
    };

    let mut gains = Vec::with_capacity(m);
    for realization in 0..m {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(realization as u64);
        let mut estimate = h.entries.clone();
        add_complex_gaussian(&mut estimate, sigma_h2, &mut rng);
        // w = estimate* / ||estimate||; PG = |h^T w|^2.
        let norm_sq: f64 = estimate.iter().map(|e| e.norm_sqr()).sum();
        if norm_sq == 0.0 {
            gains.push(0.0);
            continue;
        }
        let inner: Complex64 = h
            .entries
            .iter()
            .zip(&estimate)
            .map(|(h, e)| h * e.conj())
            .sum();
        gains.push(inner.norm_sqr() / norm_sq);
    }

    let n = gains.len() as f64;
    let mean = gains.iter().sum::<f64>() / n;
    let var = if gains.len() > 1 {
        gains.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let std = var.sqrt();
    let mut coverage = [0.0; 3];
    for (i, cov) in coverage.iter_mut().enumerate() {
        let half_width = (i + 1) as f64 * std;
        let inside = gains
            .iter()
            .filter(|g| (**g - pg_analytic).abs() <= half_width)
            .count();
        *cov = inside as f64 / n;
    }

    ReciprocityPoint {
        snr_db: crate::db(snr),
        sigma_h2,
        pg_analytic,
        pg_mc_mean: mean,
        pg_mc_std: std,
        coverage,
        regime,
    }
}

/// Monte Carlo sweep over a channel-SNR grid.
#[derive(Debug, Clone)]
pub struct ReciprocityReport {
    pub elements: usize,
    pub p_ch: f64,
    pub points: Vec<ReciprocityPoint>,
}

/// Runs [`reciprocity_mc`] for every SNR grid point (dB), deriving the
/// noise variance from the channel power of `h`. Each point gets its own
/// seed derived from `seed` and the point index.
pub fn reciprocity_report(
    h: &ChannelVector,
    snr_db_grid: &[f64],
    m: usize,
    seed: u64,
) -> Result<ReciprocityReport> {
    if h.is_empty() {
        return Err(Error::InvalidArgument("empty channel".into()));
    }
    if m == 0 {
        return Err(Error::InvalidArgument(
            "realization count must be positive".into(),
        ));
    }
    let p_ch = channel_power(h);
    let points = snr_db_grid
        .iter()
        .enumerate()
        .map(|(i, snr_db)| {
            let sigma_h2 = p_ch / crate::from_db(*snr_db);
            let point_seed = seed.wrapping_add((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut point = reciprocity_mc(h, sigma_h2, m, point_seed);
            // Report the grid coordinate, not the back-derived ratio.
            point.snr_db = *snr_db;
            point
        })
        .collect();
    Ok(ReciprocityReport {
        elements: h.len(),
        p_ch,
        points,
    })
}

/// Which beamformer a sweep instantiates per grid point.
#[derive(Debug, Clone)]
pub enum SweepBeamformer {
    /// Planar wavefront over an (elevation, azimuth) grid.
    Pw { variant: PwVariant },
    /// Spherical-wavefront line-of-sight focus over 3D positions.
    SwLos,
    /// Composite specular beams focused at 3D positions, with fixed beam
    /// phases (zeros when omitted).
    SwSmc { phases: Option<Vec<f64>> },
}

/// Candidate grid of a sweep.
#[derive(Debug, Clone)]
pub enum SweepGrid {
    /// Elevation x azimuth angles (rad), scanned elevation-major.
    Angles { thetas: Vec<f64>, phis: Vec<f64> },
    /// Explicit list of focus positions.
    Positions(Vec<Vector3<f64>>),
}

/// Result of an exhaustive beam sweep.
#[derive(Debug, Clone)]
pub struct SweepResult {
    /// Parameter tuple per candidate: `[theta, phi]` (rad) for angular
    /// sweeps, `[x, y, z]` (m) for spatial sweeps.
    pub params: Vec<Vec<f64>>,
    /// Path gain per candidate.
    pub pg: Vec<f64>,
    /// Index of the best candidate (first in scan order on ties).
    pub argmax: usize,
    pub pg_max: f64,
    /// True for angular sweeps, false for spatial ones.
    pub angular: bool,
}

/// Exhaustively evaluates a beamformer over a grid against a fixed channel.
pub fn beam_sweep(
    h_eval: &ChannelVector,
    scenario: &Scenario,
    beamformer: &SweepBeamformer,
    grid: &SweepGrid,
) -> Result<SweepResult> {
    let layout = &scenario.rw;
    let wavelength = scenario.wavelength;
    let mut params = Vec::new();
    let mut weights: Vec<Weights> = Vec::new();
    match (beamformer, grid) {
        (SweepBeamformer::Pw { variant }, SweepGrid::Angles { thetas, phis }) => {
            for &theta in thetas {
                for &phi in phis {
                    params.push(vec![theta, phi]);
                    weights.push(pw_weights(layout, theta, phi, *variant, wavelength)?);
                }
            }
        }
        (SweepBeamformer::SwLos, SweepGrid::Positions(positions)) => {
            for p in positions {
                params.push(vec![p.x, p.y, p.z]);
                weights.push(sw_los_weights(layout, p, wavelength)?);
            }
        }
        (SweepBeamformer::SwSmc { phases }, SweepGrid::Positions(positions)) => {
            for p in positions {
                params.push(vec![p.x, p.y, p.z]);
                weights.push(scenario.sw_smc_weights(p, phases.as_deref())?);
            }
        }
        (SweepBeamformer::Pw { .. }, SweepGrid::Positions(_)) => {
            return Err(Error::InvalidArgument(
                "planar-wavefront sweeps need an angular grid".into(),
            ));
        }
        (_, SweepGrid::Angles { .. }) => {
            return Err(Error::InvalidArgument(
                "spherical-wavefront sweeps need a position grid".into(),
            ));
        }
    }
    if weights.is_empty() {
        return Err(Error::InvalidArgument("sweep grid is empty".into()));
    }
    let mut pg = Vec::with_capacity(weights.len());
    let mut argmax = 0;
    let mut pg_max = f64::NEG_INFINITY;
    for (i, w) in weights.iter().enumerate() {
        let g = path_gain(h_eval, w)?;
        if g > pg_max {
            pg_max = g;
            argmax = i;
        }
        pg.push(g);
    }
    let angular = matches!(grid, SweepGrid::Angles { .. });
    Ok(SweepResult {
        params,
        pg,
        argmax,
        pg_max,
        angular,
    })
}

/// Inclusive range of angles (rad) for a sweep around the true device
/// direction seen from the array center.
pub fn device_direction(scenario: &Scenario, device_pos: &Vector3<f64>) -> Result<(f64, f64)> {
    local_angles(&scenario.rw, ElementRef::Center, device_pos)
}

/// Path-gain field of fixed weights over a receiver grid: synthesizes the
/// total channel (diffuse term off) at every point and evaluates
/// `|h^T w|^2`. Output order matches the input grid (row-major fields are
/// the caller's responsibility).
pub fn heatmap(
    w: &Weights,
    receiver_grid: &[Vector3<f64>],
    scenario: &Scenario,
) -> Result<Vec<f64>> {
    if receiver_grid.is_empty() {
        return Err(Error::InvalidArgument("heatmap grid is empty".into()));
    }
    receiver_grid
        .iter()
        .map(|p| {
            let h = scenario.total_channel_at(p, None)?;
            path_gain(&h, w)
        })
        .collect()
}

/// Rectangular receiver grid parallel to the xy-plane, centered on a point
/// with the given spacing; row-major with x varying fastest.
pub fn xy_grid(center: &Vector3<f64>, nx: usize, ny: usize, spacing: f64) -> Vec<Vector3<f64>> {
    let off_x = (nx as f64 - 1.0) / 2.0;
    let off_y = (ny as f64 - 1.0) / 2.0;
    let mut grid = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            grid.push(Vector3::new(
                center.x + (ix as f64 - off_x) * spacing,
                center.y + (iy as f64 - off_y) * spacing,
                center.z,
            ));
        }
    }
    grid
}

/// Cubic grid of focus candidates with the given resolution, centered on a
/// point; scan order z-major, then y, then x fastest.
pub fn box_grid(center: &Vector3<f64>, half_extent: f64, step: f64) -> Vec<Vector3<f64>> {
    let n = (2.0 * half_extent / step).floor() as usize + 1;
    let start = center - Vector3::new(half_extent, half_extent, half_extent);
    let mut grid = Vec::with_capacity(n * n * n);
    for iz in 0..n {
        for iy in 0..n {
            for ix in 0..n {
                grid.push(
                    start + Vector3::new(ix as f64 * step, iy as f64 * step, iz as f64 * step),
                );
            }
        }
    }
    grid
}
