//! Search procedures for composite-beam phases and reflection coefficients,
//! and per-component power budgets.
//!
//! The phase search treats the path gain as a black-box feedback oracle, so
//! the same routine runs against a modeled channel during initial access or
//! against received-power feedback after a device has woken up. The first
//! beam phase is pinned to zero; only K-1 phases are searched. All searches
//! are deterministic: grid scans break ties by first-found in lexicographic
//! order, random search is seeded.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::beamform::mrt_weights;
use crate::beamform::path_gain;
use crate::channel::ChannelVector;
use crate::{Error, Result};

/// Path gain of each component beam applied alone:
/// `PG_k = |h_ref^T w_k|^2` with `w_k = h_k* / ||h_k||`.
pub fn per_smc_budget(
    h_ref: &ChannelVector,
    per_smc_channels: &[ChannelVector],
) -> Result<Vec<f64>> {
    per_smc_channels
        .iter()
        .map(|h_k| {
            let w_k = mrt_weights(h_k)?;
            path_gain(h_ref, &w_k)
        })
        .collect()
}

/// Strategy for the beam-phase search.
#[derive(Debug, Clone, Copy)]
pub enum PhaseSearch {
    /// Exhaustive scan of a (K-1)-dimensional grid with the given step
    /// (rad) over [0, 2 pi).
    Grid { step_rad: f64 },
    /// Best of `budget` uniform draws (plus the all-zero baseline).
    Random { budget: usize, seed: u64 },
}

/// Finds beam phases maximizing a path-gain oracle. The oracle receives the
/// full K-length phase vector with entry 0 pinned to zero. Returns the best
/// phases and the achieved gain, which is never below the all-zero baseline.
pub fn optimize_phases<F>(objective: F, k: usize, method: PhaseSearch) -> Result<(Vec<f64>, f64)>
where
    F: Fn(&[f64]) -> f64,
{
    optimize_phases_observed(objective, k, method, |_, _| {})
}

/// [`optimize_phases`] with an observer invoked for every evaluated
/// candidate, in evaluation order.
pub fn optimize_phases_observed<F, O>(
    objective: F,
    k: usize,
    method: PhaseSearch,
    mut observer: O,
) -> Result<(Vec<f64>, f64)>
where
    F: Fn(&[f64]) -> f64,
    O: FnMut(&[f64], f64),
{
    if k == 0 {
        return Err(Error::InvalidArgument(
            "phase search needs at least one component".into(),
        ));
    }
    let mut best_phases = vec![0.0; k];
    let mut best_pg = objective(&best_phases);
    if k == 1 {
        observer(&best_phases, best_pg);
        return Ok((best_phases, best_pg));
    }
    match method {
        PhaseSearch::Grid { step_rad } => {
            if !(step_rad > 0.0) {
                return Err(Error::InvalidArgument(
                    "grid step must be positive".into(),
                ));
            }
            let steps = (2.0 * std::f64::consts::PI / step_rad).ceil() as usize;
            let mut indices = vec![0usize; k - 1];
            let mut phases = vec![0.0; k];
            loop {
                for (dim, idx) in indices.iter().enumerate() {
                    phases[dim + 1] = *idx as f64 * step_rad;
                }
                let pg = objective(&phases);
                observer(&phases, pg);
                if pg > best_pg {
                    best_pg = pg;
                    best_phases.copy_from_slice(&phases);
                }
                // Lexicographic increment, last dimension fastest.
                let mut dim = k - 1;
                loop {
                    dim -= 1;
                    indices[dim] += 1;
                    if indices[dim] < steps {
                        break;
                    }
                    indices[dim] = 0;
                    if dim == 0 {
                        return Ok((best_phases, best_pg));
                    }
                }
            }
        }
        PhaseSearch::Random { budget, seed } => {
            if budget == 0 {
                return Err(Error::InvalidArgument(
                    "random search budget must be positive".into(),
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut phases = vec![0.0; k];
            for _ in 0..budget {
                for p in phases.iter_mut().skip(1) {
                    *p = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
                }
                let pg = objective(&phases);
                observer(&phases, pg);
                if pg > best_pg {
                    best_pg = pg;
                    best_phases.copy_from_slice(&phases);
                }
            }
            Ok((best_phases, best_pg))
        }
    }
}

/// Builds the model-based phase objective: the path gain of the normalized
/// composite beam,
/// `PG(phi) = | sum_k b_k e^{j phi_k} |^2 / || sum_k w_k e^{j phi_k} ||^2`
/// with `b_k = h_ref^T w_k` and unit beams `w_k = h_k* / ||h_k||`. Per-beam
/// responses and the beam Gram matrix are precomputed, so one evaluation
/// costs O(K^2). Candidates whose beams cancel completely score zero.
pub fn phase_objective(
    h_ref: &ChannelVector,
    per_smc_channels: &[ChannelVector],
) -> Result<impl Fn(&[f64]) -> f64> {
    let k = per_smc_channels.len();
    let mut responses = Vec::with_capacity(k);
    let mut norms = Vec::with_capacity(k);
    for h_k in per_smc_channels {
        let norm = h_k.norm();
        if norm == 0.0 {
            return Err(Error::InvalidArgument(
                "phase objective: zero component channel".into(),
            ));
        }
        if h_k.len() != h_ref.len() {
            return Err(Error::Dimension(
                "phase objective: component length mismatch".into(),
            ));
        }
        norms.push(norm);
        responses.push(
            h_ref
                .entries
                .iter()
                .zip(&h_k.entries)
                .map(|(r, h)| r * h.conj())
                .sum::<Complex64>()
                / norm,
        );
    }
    // Gram matrix of the unit beams: <w_i, w_j>.
    let mut gram = vec![Complex64::new(0.0, 0.0); k * k];
    for (i, h_i) in per_smc_channels.iter().enumerate() {
        for (j, h_j) in per_smc_channels.iter().enumerate() {
            let inner: Complex64 = h_i
                .entries
                .iter()
                .zip(&h_j.entries)
                .map(|(a, b)| a * b.conj())
                .sum();
            gram[i * k + j] = inner / (norms[i] * norms[j]);
        }
    }
    Ok(move |phases: &[f64]| {
        let rotations: Vec<Complex64> = phases
            .iter()
            .map(|phi| Complex64::from_polar(1.0, *phi))
            .collect();
        let num = responses
            .iter()
            .zip(&rotations)
            .map(|(b, rot)| b * rot)
            .sum::<Complex64>()
            .norm_sqr();
        let mut den = 0.0;
        for i in 0..k {
            for j in 0..k {
                den += (rotations[i].conj() * rotations[j] * gram[i * k + j]).re;
            }
        }
        if den <= 1e-12 {
            return 0.0;
        }
        num / den
    })
}

/// Grid of candidate amplitude reflection coefficients per non-LoS
/// component.
#[derive(Debug, Clone, Copy)]
pub struct GammaGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for GammaGrid {
    fn default() -> Self {
        Self {
            min: 0.0,
            max: 1.0,
            points: 41,
        }
    }
}

impl GammaGrid {
    fn values(&self) -> Result<Vec<f64>> {
        if self.points == 0 || self.min > self.max || !(self.min >= 0.0) {
            return Err(Error::InvalidArgument(
                "reflection-coefficient grid is empty or invalid".into(),
            ));
        }
        if self.points == 1 {
            return Ok(vec![self.min]);
        }
        let step = (self.max - self.min) / (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|i| self.min + step * i as f64)
            .collect())
    }
}

/// Strategy for the reflection-coefficient search.
#[derive(Debug, Clone, Copy)]
pub enum GammaSearch {
    /// One coordinate-wise pass per component, in component order.
    CoordinateWise,
    /// Full joint grid over all non-LoS components; exponential in K.
    Joint,
}

/// Finds reflection coefficients maximizing
/// `| hhat(gamma)^H h_ref |^2 / ||hhat(gamma)||^2` where
/// `hhat(gamma) = sum_k gamma_k h_k exp(-j phi_k)` is assembled from the
/// unit-reflection base channels and the previously optimized beam phases.
/// `gamma_1` is pinned to 1 (line of sight). Returns the coefficient vector
/// and the achieved path gain.
pub fn optimize_reflcoeffs(
    h_ref: &ChannelVector,
    base_channels: &[ChannelVector],
    phases: &[f64],
    grid: GammaGrid,
    method: GammaSearch,
) -> Result<(Vec<f64>, f64)> {
    optimize_reflcoeffs_observed(h_ref, base_channels, phases, grid, method, |_, _| {})
}

/// [`optimize_reflcoeffs`] with an observer invoked for every evaluated
/// candidate, in evaluation order.
pub fn optimize_reflcoeffs_observed<O>(
    h_ref: &ChannelVector,
    base_channels: &[ChannelVector],
    phases: &[f64],
    grid: GammaGrid,
    method: GammaSearch,
    mut observer: O,
) -> Result<(Vec<f64>, f64)>
where
    O: FnMut(&[f64], f64),
{
    let k = base_channels.len();
    if k == 0 {
        return Err(Error::InvalidArgument(
            "reflection-coefficient search needs at least one component".into(),
        ));
    }
    if phases.len() != k {
        return Err(Error::Dimension(format!(
            "{} phases for {} components",
            phases.len(),
            k
        )));
    }
    let values = grid.values()?;

    // Rotated conjugate components u_k = conj(h_k) e^{j phi_k}; the candidate
    // weight direction is s(gamma) = sum_k gamma_k u_k and the objective is
    // |h_ref^T s|^2 / ||s||^2. Precompute the beam responses t_k = h_ref^T u_k
    // and the Gram matrix <u_i, u_j> so each candidate costs O(K^2).
    let mut responses = Vec::with_capacity(k);
    let mut gram = vec![Complex64::new(0.0, 0.0); k * k];
    for (i, h_i) in base_channels.iter().enumerate() {
        if h_i.len() != h_ref.len() {
            return Err(Error::Dimension(
                "reflection search: component length mismatch".into(),
            ));
        }
        if h_i.norm() == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "reflection search: component {} is a zero channel",
                i + 1
            )));
        }
        let rot_i = Complex64::from_polar(1.0, phases[i]);
        let t: Complex64 = h_ref
            .entries
            .iter()
            .zip(&h_i.entries)
            .map(|(r, h)| r * h.conj())
            .sum();
        responses.push(t * rot_i);
        for (j, h_j) in base_channels.iter().enumerate() {
            let rot_j = Complex64::from_polar(1.0, phases[j]);
            // <u_i, u_j> = e^{-j phi_i} e^{j phi_j} sum_l h_i[l] conj(h_j[l])
            let inner: Complex64 = h_i
                .entries
                .iter()
                .zip(&h_j.entries)
                .map(|(a, b)| a * b.conj())
                .sum();
            gram[i * k + j] = rot_i.conj() * rot_j * inner;
        }
    }
    let objective = |gammas: &[f64]| -> f64 {
        let num: Complex64 = responses
            .iter()
            .zip(gammas)
            .map(|(t, g)| t * *g)
            .sum();
        let mut den = 0.0;
        for i in 0..k {
            for j in 0..k {
                den += (gammas[i] * gammas[j] * gram[i * k + j]).re;
            }
        }
        if den <= 0.0 {
            return f64::NEG_INFINITY;
        }
        num.norm_sqr() / den
    };

    if k == 1 {
        let best = vec![1.0];
        let pg = objective(&best);
        observer(&best, pg);
        return Ok((best, pg));
    }
    match method {
        GammaSearch::CoordinateWise => {
            // One in-order pass; every free coordinate ends on a grid value.
            let mut current = vec![1.0; k];
            for dim in 1..k {
                let mut best_value = values[0];
                let mut best_here = f64::NEG_INFINITY;
                for &g in &values {
                    current[dim] = g;
                    let pg = objective(&current);
                    observer(&current, pg);
                    if pg > best_here {
                        best_here = pg;
                        best_value = g;
                    }
                }
                current[dim] = best_value;
            }
            let pg = objective(&current);
            Ok((current, pg))
        }
        GammaSearch::Joint => {
            let dims = k - 1;
            let mut best = vec![1.0; k];
            let mut best_pg = f64::NEG_INFINITY;
            let mut indices = vec![0usize; dims];
            let mut current = vec![1.0; k];
            loop {
                for (dim, idx) in indices.iter().enumerate() {
                    current[dim + 1] = values[*idx];
                }
                let pg = objective(&current);
                observer(&current, pg);
                if pg > best_pg {
                    best_pg = pg;
                    best.copy_from_slice(&current);
                }
                let mut dim = dims;
                loop {
                    dim -= 1;
                    indices[dim] += 1;
                    if indices[dim] < values.len() {
                        break;
                    }
                    indices[dim] = 0;
                    if dim == 0 {
                        return Ok((best, best_pg));
                    }
                }
            }
        }
    }
}
