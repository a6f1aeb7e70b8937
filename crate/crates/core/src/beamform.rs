//! Transmit weight computation and path-gain evaluation.
//!
//! All strategies return unit-norm weight vectors. The received phasor is
//! `y = h^T w sqrt(Pt)` (plain transpose, no conjugation), so
//! maximum-ratio transmission uses the conjugated channel `w = h* / ||h||`
//! and achieves the path-gain bound `|h^T w|^2 = ||h||^2`.

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::arrays::ArrayLayout;
use crate::channel::ChannelVector;
use crate::{wavenumber, Error, Result};

/// Unit-norm complex transmit weights.
#[derive(Debug, Clone)]
pub struct Weights {
    entries: Vec<Complex64>,
}

impl Weights {
    /// Normalizes a nonzero vector onto the unit sphere.
    pub fn from_unnormalized(entries: Vec<Complex64>) -> Result<Self> {
        let norm_sq: f64 = entries.iter().map(|w| w.norm_sqr()).sum();
        if norm_sq == 0.0 || !norm_sq.is_finite() {
            return Err(Error::InvalidArgument(
                "weights cannot be normalized: zero or non-finite vector".into(),
            ));
        }
        let norm = norm_sq.sqrt();
        Ok(Self {
            entries: entries.into_iter().map(|w| w / norm).collect(),
        })
    }

    /// Accepts an already unit-norm vector (tolerance 1e-12).
    pub fn from_normalized(entries: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = entries.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "weights must have unit norm (got {norm})"
            )));
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// `h^T w` (plain transpose).
fn transmit_sum(h: &ChannelVector, w: &Weights) -> Result<Complex64> {
    if h.len() != w.len() {
        return Err(Error::Dimension(format!(
            "channel has {} entries, weights {}",
            h.len(),
            w.len()
        )));
    }
    Ok(h.entries
        .iter()
        .zip(w.entries())
        .map(|(h, w)| h * w)
        .sum())
}

/// Path gain `|h^T w|^2`, the RF-to-RF transmission efficiency.
pub fn path_gain(h: &ChannelVector, w: &Weights) -> Result<f64> {
    Ok(transmit_sum(h, w)?.norm_sqr())
}

/// Received complex baseband amplitude `y = h^T w sqrt(Pt) + n`.
pub fn receive_phasor(
    h: &ChannelVector,
    w: &Weights,
    transmit_power: f64,
    noise_sample: Option<Complex64>,
) -> Result<Complex64> {
    if !(transmit_power >= 0.0) {
        return Err(Error::InvalidArgument(
            "transmit power must be nonnegative".into(),
        ));
    }
    let y = transmit_sum(h, w)? * transmit_power.sqrt();
    Ok(y + noise_sample.unwrap_or(Complex64::new(0.0, 0.0)))
}

/// Maximum-ratio transmission weights `w = h* / ||h||`.
pub fn mrt_weights(h_model: &ChannelVector) -> Result<Weights> {
    Weights::from_unnormalized(h_model.entries.iter().map(|h| h.conj()).collect())
        .map_err(|_| Error::InvalidArgument("MRT weights undefined for a zero channel".into()))
}

/// Wave vector for look angles `(theta, phi)` in the array frame:
/// `k = k0 [sin(theta) cos(phi), sin(theta) sin(phi), cos(theta)]`.
pub fn wave_vector(theta: f64, phi: f64, wavelength: f64) -> Vector3<f64> {
    let k0 = wavenumber(wavelength);
    Vector3::new(
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ) * k0
}

/// Phase-reference variants of the planar-wavefront beamformer. Both point
/// the same beam; they differ only in a constant phase shift across all
/// weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PwVariant {
    /// Phases referenced to the element positions alone.
    Centered,
    /// Additionally carries the propagation phase `k0 * range_m` of a
    /// nominal target at that range along the look direction.
    Offset { range_m: f64 },
}

/// Planar-wavefront weights towards look angles `(theta, phi)` given in the
/// array's local frame. Element phases conjugate the modeled plane-wave
/// channel `exp(j p^T k)`; the offset variant multiplies all entries by the
/// constant `exp(j k0 range)`.
pub fn pw_weights(
    layout: &ArrayLayout,
    theta: f64,
    phi: f64,
    variant: PwVariant,
    wavelength: f64,
) -> Result<Weights> {
    if !(wavelength > 0.0) {
        return Err(Error::InvalidArgument("wavelength must be positive".into()));
    }
    let k_local = wave_vector(theta, phi, wavelength);
    // The look angles live in the array frame; element positions are global.
    let k_global = layout.orientation().transpose() * k_local;
    let mut entries: Vec<Complex64> = layout
        .positions()
        .iter()
        .map(|p| Complex64::from_polar(1.0, -p.dot(&k_global)))
        .collect();
    if let PwVariant::Offset { range_m } = variant {
        let shift = Complex64::from_polar(1.0, wavenumber(wavelength) * range_m);
        for w in &mut entries {
            *w *= shift;
        }
    }
    Weights::from_unnormalized(entries)
}

/// Spherical-wavefront line-of-sight weights focusing on a 3D point:
/// `w[l] = exp(+j k0 ||p - p_l||) / sqrt(L)`.
pub fn sw_los_weights(
    layout: &ArrayLayout,
    device_pos: &Vector3<f64>,
    wavelength: f64,
) -> Result<Weights> {
    let k0 = wavenumber(wavelength);
    let mut entries = Vec::with_capacity(layout.len());
    for p in layout.positions() {
        let r = (device_pos - p).norm();
        if r == 0.0 {
            return Err(Error::InvalidArgument(
                "focus point coincides with an array element".into(),
            ));
        }
        entries.push(Complex64::from_polar(1.0, k0 * r));
    }
    Weights::from_unnormalized(entries)
}

/// Composite multi-beam weights: a normalized sum of per-component MRT
/// beams, each rotated by a beam phase and optionally rescaled,
/// `w = normalize( sum_k a_k (h_k* / ||h_k||) exp(j phi_k) )`.
///
/// The components are typically the per-SMC model channels of one device;
/// passing channels of several devices instead extends the scheme to
/// multi-receiver power transfer, with `amp_scales` steering how much power
/// each beam receives.
pub fn smc_composite_weights(
    per_smc_channels: &[ChannelVector],
    phases: &[f64],
    amp_scales: Option<&[f64]>,
) -> Result<Weights> {
    if per_smc_channels.is_empty() {
        return Err(Error::InvalidArgument(
            "composite weights need at least one component".into(),
        ));
    }
    if phases.len() != per_smc_channels.len() {
        return Err(Error::Dimension(format!(
            "{} phases for {} components",
            phases.len(),
            per_smc_channels.len()
        )));
    }
    if let Some(a) = amp_scales {
        if a.len() != per_smc_channels.len() {
            return Err(Error::Dimension(format!(
                "{} amplitude scales for {} components",
                a.len(),
                per_smc_channels.len()
            )));
        }
    }
    let l = per_smc_channels[0].len();
    let mut sum = vec![Complex64::new(0.0, 0.0); l];
    for (k, h_k) in per_smc_channels.iter().enumerate() {
        if h_k.len() != l {
            return Err(Error::Dimension(
                "component channels must share one length".into(),
            ));
        }
        let norm = h_k.norm();
        if norm == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "component {} is a zero channel",
                k + 1
            )));
        }
        let scale = amp_scales.map_or(1.0, |a| a[k]);
        let rotation = Complex64::from_polar(scale / norm, phases[k]);
        for (s, h) in sum.iter_mut().zip(&h_k.entries) {
            *s += h.conj() * rotation;
        }
    }
    Weights::from_unnormalized(sum)
        .map_err(|_| Error::InvalidArgument("composite beams cancel to a zero vector".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::Matrix3;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn cv(entries: Vec<Complex64>) -> ChannelVector {
        ChannelVector::new(entries, 0.1)
    }

    fn random_channel(rng: &mut impl Rng, l: usize) -> ChannelVector {
        cv((0..l)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect())
    }

    #[test]
    fn path_gain_basis_vectors() {
        let h = cv(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let w = Weights::from_normalized(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
            .unwrap();
        assert_relative_eq!(path_gain(&h, &w).unwrap(), 1.0);
        let w_orth =
            Weights::from_normalized(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])
                .unwrap();
        assert_relative_eq!(path_gain(&h, &w_orth).unwrap(), 0.0);
    }

    #[test]
    fn path_gain_rejects_dimension_mismatch() {
        let h = cv(vec![Complex64::new(1.0, 0.0)]);
        let w = Weights::from_normalized(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ])
        .unwrap();
        assert!(path_gain(&h, &w).is_err());
    }

    #[test]
    fn mrt_reaches_channel_norm() {
        let h = cv(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
        ]);
        let w = mrt_weights(&h).unwrap();
        assert_relative_eq!(path_gain(&h, &w).unwrap(), h.norm_sq(), epsilon = 1e-12);
    }

    #[test]
    fn mrt_simple_shapes() {
        let h = cv(vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)]);
        let w = mrt_weights(&h).unwrap();
        assert_relative_eq!(w.entries()[0].re, 1.0, epsilon = 1e-12);
        assert_relative_eq!(w.entries()[1].norm(), 0.0);

        let h = cv(vec![Complex64::new(3.0, 0.0), Complex64::new(3.0, 0.0)]);
        let w = mrt_weights(&h).unwrap();
        for e in w.entries() {
            assert_relative_eq!(e.re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        }
    }

    #[test]
    fn mrt_rejects_zero_channel() {
        assert!(mrt_weights(&cv(vec![Complex64::new(0.0, 0.0); 3])).is_err());
    }

    #[test]
    fn mrt_beats_random_weights() {
        let mut rng = StdRng::seed_from_u64(5);
        let h = random_channel(&mut rng, 64);
        let bound = path_gain(&h, &mrt_weights(&h).unwrap()).unwrap();
        assert_relative_eq!(bound, h.norm_sq(), max_relative = 1e-12);
        for _ in 0..1000 {
            let w = Weights::from_unnormalized(
                (0..64)
                    .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                    .collect(),
            )
            .unwrap();
            assert!(path_gain(&h, &w).unwrap() <= bound + 1e-12);
        }
    }

    #[test]
    fn receive_phasor_power_and_noise() {
        let h = cv(vec![Complex64::new(0.5, 0.0)]);
        let w = Weights::from_normalized(vec![Complex64::new(1.0, 0.0)]).unwrap();
        let y = receive_phasor(&h, &w, 1.0, None).unwrap();
        assert_relative_eq!(y.norm_sqr(), path_gain(&h, &w).unwrap(), epsilon = 1e-15);
        let n = Complex64::new(0.1, -0.2);
        let y = receive_phasor(&h, &w, 0.0, Some(n)).unwrap();
        assert_eq!(y, n);
    }

    #[test]
    fn milliwatt_at_one_watt_needs_minus_30_db() {
        // PG = -30 dB at Pt = 1 W receives exactly 1 mW.
        let pg = crate::from_db(-30.0);
        let h = cv(vec![Complex64::new(pg.sqrt(), 0.0)]);
        let w = Weights::from_normalized(vec![Complex64::new(1.0, 0.0)]).unwrap();
        let y = receive_phasor(&h, &w, 1.0, None).unwrap();
        assert_relative_eq!(y.norm_sqr(), 1e-3, epsilon = 1e-15);
    }

    #[test]
    fn all_weight_constructors_are_unit_norm() {
        let mut rng = StdRng::seed_from_u64(9);
        let layout = crate::arrays::make_ura(
            4,
            3,
            0.05,
            0.06,
            Vector3::new(1.0, -0.5, 2.0),
            Vector3::x(),
        )
        .unwrap();
        for _ in 0..20 {
            let w = pw_weights(
                &layout,
                rng.gen::<f64>() * std::f64::consts::PI,
                rng.gen::<f64>() * 2.0 - 1.0,
                PwVariant::Centered,
                0.08,
            )
            .unwrap();
            assert!((w.norm() - 1.0).abs() < 1e-12);
            let focus = Vector3::new(rng.gen::<f64>() * 5.0 + 6.0, rng.gen(), rng.gen());
            let w = sw_los_weights(&layout, &focus, 0.08).unwrap();
            assert!((w.norm() - 1.0).abs() < 1e-12);
            let h = random_channel(&mut rng, 12);
            let w = mrt_weights(&h).unwrap();
            assert!((w.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pw_single_element_is_unit_weight() {
        let layout = crate::arrays::make_ura(1, 1, 1.0, 1.0, Vector3::zeros(), Vector3::x())
            .unwrap();
        let w = pw_weights(&layout, 0.7, -1.1, PwVariant::Centered, 0.1).unwrap();
        assert_eq!(w.len(), 1);
        assert_relative_eq!(w.entries()[0].norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn pw_broadside_gives_uniform_weights() {
        // Array in the yz-plane through the origin, beam along +x:
        // all projections p . k vanish.
        let layout =
            crate::arrays::make_ura(3, 3, 0.04, 0.04, Vector3::zeros(), Vector3::x()).unwrap();
        let w = pw_weights(
            &layout,
            std::f64::consts::FRAC_PI_2,
            0.0,
            PwVariant::Centered,
            0.1,
        )
        .unwrap();
        let expected = 1.0 / 3.0;
        for e in w.entries() {
            assert_relative_eq!(e.re, expected, epsilon = 1e-12);
            assert_relative_eq!(e.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn pw_variants_agree_up_to_global_phase() {
        let mut rng = StdRng::seed_from_u64(21);
        for _ in 0..100 {
            let layout = crate::arrays::make_ura(
                3,
                4,
                0.03 + rng.gen::<f64>() * 0.05,
                0.03 + rng.gen::<f64>() * 0.05,
                Vector3::new(rng.gen::<f64>() * 4.0, rng.gen(), rng.gen()),
                Vector3::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                    .normalize(),
            )
            .unwrap();
            let theta = rng.gen::<f64>() * std::f64::consts::PI;
            let phi = (rng.gen::<f64>() - 0.5) * 2.0 * std::f64::consts::PI;
            let wc = pw_weights(&layout, theta, phi, PwVariant::Centered, 0.0789).unwrap();
            let wo = pw_weights(
                &layout,
                theta,
                phi,
                PwVariant::Offset {
                    range_m: rng.gen::<f64>() * 20.0,
                },
                0.0789,
            )
            .unwrap();
            let h = random_channel(&mut rng, layout.len());
            let a = transmit_sum(&h, &wc).unwrap().norm();
            let b = transmit_sum(&h, &wo).unwrap().norm();
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }

    #[test]
    fn global_phase_leaves_path_gain_unchanged() {
        let mut rng = StdRng::seed_from_u64(33);
        let h = random_channel(&mut rng, 16);
        let w = mrt_weights(&h).unwrap();
        let base = path_gain(&h, &w).unwrap();
        for _ in 0..10 {
            let alpha = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
            let rotated = Weights::from_unnormalized(
                w.entries()
                    .iter()
                    .map(|e| e * Complex64::from_polar(1.0, alpha))
                    .collect(),
            )
            .unwrap();
            assert_relative_eq!(path_gain(&h, &rotated).unwrap(), base, max_relative = 1e-12);
        }
    }

    #[test]
    fn sw_los_equidistant_elements_get_equal_phase() {
        // Four elements on a circle, focus on its axis: equal distances.
        let r = 0.3;
        let positions = vec![
            Vector3::new(0.0, r, 0.0),
            Vector3::new(0.0, -r, 0.0),
            Vector3::new(0.0, 0.0, r),
            Vector3::new(0.0, 0.0, -r),
        ];
        let layout = ArrayLayout::new(positions, Matrix3::identity(), Vector3::z()).unwrap();
        let w = sw_los_weights(&layout, &Vector3::new(2.0, 0.0, 0.0), 0.1).unwrap();
        let first = w.entries()[0];
        for e in w.entries() {
            assert_relative_eq!((e - first).norm(), 0.0, epsilon = 1e-12);
            assert_relative_eq!(e.norm(), 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn sw_los_aligns_phases_on_los_channel() {
        // On an isotropic LoS channel the focused beam adds amplitudes
        // coherently: |h^T w| = sum |h_l| / sqrt(L).
        let wavelength = 0.0789;
        let layout =
            crate::arrays::make_ura(5, 4, 0.05, 0.05, Vector3::new(8.0, 0.3, 1.2), Vector3::x())
                .unwrap();
        let device = crate::channel::Device::isotropic(Vector3::new(0.2, -0.4, 0.9));
        let component = crate::channel::SmcComponent::new(
            1,
            layout.clone(),
            1.0,
            None,
            crate::geometry::VisibilityVector::all_visible(layout.len()),
        )
        .unwrap();
        let h = crate::channel::smc_channel(
            &component,
            &device,
            &crate::arrays::GainPattern::Isotropic,
            wavelength,
        )
        .unwrap();
        let w = sw_los_weights(&layout, &device.position, wavelength).unwrap();
        let coherent: f64 =
            h.entries.iter().map(|e| e.norm()).sum::<f64>() / (layout.len() as f64).sqrt();
        let achieved = transmit_sum(&h, &w).unwrap().norm();
        assert_relative_eq!(achieved, coherent, max_relative = 1e-12);
    }

    #[test]
    fn sw_los_rejects_focus_on_element() {
        let layout =
            crate::arrays::make_ura(2, 2, 0.1, 0.1, Vector3::zeros(), Vector3::x()).unwrap();
        let on_element = layout.position(0);
        assert!(sw_los_weights(&layout, &on_element, 0.1).is_err());
    }

    #[test]
    fn composite_single_component_is_mrt() {
        let mut rng = StdRng::seed_from_u64(55);
        let h = random_channel(&mut rng, 8);
        let composite = smc_composite_weights(std::slice::from_ref(&h), &[0.0], None).unwrap();
        let mrt = mrt_weights(&h).unwrap();
        for (a, b) in composite.entries().iter().zip(mrt.entries()) {
            assert_relative_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn composite_zero_phases_on_orthogonal_components_matches_model_mrt() {
        // Orthogonal equal-norm components: summing unit beams equals MRT on
        // the summed channel.
        let h1 = cv(vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)]);
        let h2 = cv(vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 2.0)]);
        let sum = h1.add(&h2).unwrap();
        let composite = smc_composite_weights(&[h1, h2], &[0.0, 0.0], None).unwrap();
        let mrt = mrt_weights(&sum).unwrap();
        for (a, b) in composite.entries().iter().zip(mrt.entries()) {
            assert_relative_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn composite_optimal_phase_matches_grid_oracle() {
        // Two orthogonal components inside a synthetic total channel with a
        // known phase offset; exhaustive 1-D scan is the reference.
        let h1 = cv(vec![
            Complex64::new(1.0, 0.5),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.2, -0.3),
            Complex64::new(0.0, 0.0),
        ]);
        let h2 = cv(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(-0.4, 0.8),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.6, 0.1),
        ]);
        let offset = 1.9; // injected inter-beam phase
        let mut total = h1.clone();
        for (t, e) in total.entries.iter_mut().zip(&h2.entries) {
            *t += e * Complex64::from_polar(1.0, offset);
        }
        let mut best = (0.0, f64::NEG_INFINITY);
        let steps = 3600;
        for i in 0..steps {
            let phi = i as f64 / steps as f64 * 2.0 * std::f64::consts::PI;
            let w =
                smc_composite_weights(&[h1.clone(), h2.clone()], &[0.0, phi], None).unwrap();
            let pg = path_gain(&total, &w).unwrap();
            if pg > best.1 {
                best = (phi, pg);
            }
        }
        // The optimum aligns the beams: phi = -offset (mod 2 pi).
        let expected = (2.0 * std::f64::consts::PI - offset) % (2.0 * std::f64::consts::PI);
        assert!(
            (best.0 - expected).abs() < 2.0 * std::f64::consts::PI / steps as f64 * 1.5,
            "grid best {} vs expected {}",
            best.0,
            expected
        );
        // And achieves the coherent sum of the per-beam gains.
        let coherent = {
            let a = (h1.norm_sq() + 0.0) / h1.norm(); // |total^T w_1| for aligned h1
            let b = h2.norm_sq() / h2.norm();
            (a + b).powi(2) / 2.0
        };
        assert_relative_eq!(best.1, coherent, max_relative = 1e-3);
    }

    #[test]
    fn beamformer_hierarchy_on_los_channels() {
        // For isotropic LoS channels the focused spherical beam attains the
        // phase-only optimum, so PG(pw) <= PG(sw_los) <= PG(mrt) holds per
        // scenario, with the MRT bound strict whenever amplitudes vary.
        let mut rng = StdRng::seed_from_u64(71);
        let wavelength = 0.0789;
        for _ in 0..100 {
            let layout = crate::arrays::make_ura(
                6 + rng.gen_range(0..6),
                4 + rng.gen_range(0..6),
                0.4 * wavelength + rng.gen::<f64>() * 0.5 * wavelength,
                0.4 * wavelength + rng.gen::<f64>() * 0.5 * wavelength,
                Vector3::zeros(),
                Vector3::x(),
            )
            .unwrap();
            // Device in the radiative near field of the aperture.
            let aperture = 12.0 * 0.9 * wavelength;
            let distance = aperture * (0.5 + rng.gen::<f64>() * 1.5);
            let device_pos = Vector3::new(
                distance,
                (rng.gen::<f64>() - 0.5) * aperture,
                (rng.gen::<f64>() - 0.5) * aperture,
            );
            let device = crate::channel::Device::isotropic(device_pos);
            let component = crate::channel::SmcComponent::new(
                1,
                layout.clone(),
                1.0,
                None,
                crate::geometry::VisibilityVector::all_visible(layout.len()),
            )
            .unwrap();
            let h = crate::channel::smc_channel(
                &component,
                &device,
                &crate::arrays::GainPattern::Isotropic,
                wavelength,
            )
            .unwrap();
            let (theta, phi) = crate::arrays::local_angles(
                &layout,
                crate::arrays::ElementRef::Center,
                &device_pos,
            )
            .unwrap();
            let pg_pw = path_gain(
                &h,
                &pw_weights(&layout, theta, phi, PwVariant::Centered, wavelength).unwrap(),
            )
            .unwrap();
            let pg_sw = path_gain(
                &h,
                &sw_los_weights(&layout, &device_pos, wavelength).unwrap(),
            )
            .unwrap();
            let pg_mrt = path_gain(&h, &mrt_weights(&h).unwrap()).unwrap();
            assert!(
                pg_pw <= pg_sw * (1.0 + 1e-12),
                "PG(pw) {pg_pw} exceeded PG(sw) {pg_sw}"
            );
            assert!(pg_sw < pg_mrt, "PG(sw) {pg_sw} not below PG(mrt) {pg_mrt}");
        }
    }

    #[test]
    fn composite_splits_power_between_two_receivers() {
        // Passing per-device channels as components extends the composite
        // beamformer to several receivers; amplitude scales steer the split.
        let wavelength = 0.0789;
        let layout = crate::arrays::make_ura(
            8,
            6,
            0.6 * wavelength,
            0.6 * wavelength,
            Vector3::zeros(),
            Vector3::x(),
        )
        .unwrap();
        let pattern = crate::arrays::GainPattern::Isotropic;
        let component = crate::channel::SmcComponent::new(
            1,
            layout.clone(),
            1.0,
            None,
            crate::geometry::VisibilityVector::all_visible(layout.len()),
        )
        .unwrap();
        let dev_a = crate::channel::Device::isotropic(Vector3::new(3.0, 1.0, 0.2));
        let dev_b = crate::channel::Device::isotropic(Vector3::new(3.0, -1.2, -0.4));
        let h_a = crate::channel::smc_channel(&component, &dev_a, &pattern, wavelength).unwrap();
        let h_b = crate::channel::smc_channel(&component, &dev_b, &pattern, wavelength).unwrap();
        let even =
            smc_composite_weights(&[h_a.clone(), h_b.clone()], &[0.0, 0.0], None).unwrap();
        let pg_a_even = path_gain(&h_a, &even).unwrap();
        let pg_b_even = path_gain(&h_b, &even).unwrap();
        assert!(pg_a_even > 0.0 && pg_b_even > 0.0);
        // Tilting the amplitude scales towards receiver A raises its share.
        let tilted = smc_composite_weights(
            &[h_a.clone(), h_b.clone()],
            &[0.0, 0.0],
            Some(&[2.0, 0.5]),
        )
        .unwrap();
        let pg_a_tilted = path_gain(&h_a, &tilted).unwrap();
        let pg_b_tilted = path_gain(&h_b, &tilted).unwrap();
        assert!(pg_a_tilted > pg_a_even);
        assert!(pg_b_tilted < pg_b_even);
    }

    #[test]
    fn composite_rejects_bad_inputs() {
        let h = cv(vec![Complex64::new(1.0, 0.0)]);
        assert!(smc_composite_weights(&[], &[], None).is_err());
        assert!(smc_composite_weights(std::slice::from_ref(&h), &[0.0, 1.0], None).is_err());
        let zero = cv(vec![Complex64::new(0.0, 0.0)]);
        assert!(smc_composite_weights(&[zero], &[0.0], None).is_err());
        // Two identical beams with opposite amplitude scales cancel exactly.
        let cancel = smc_composite_weights(
            &[h.clone(), h.clone()],
            &[0.0, 0.0],
            Some(&[1.0, -1.0]),
        );
        assert!(cancel.is_err());
    }
}
