//! Geometry-based synthesis of specular-multipath channel vectors, channel
//! power, and noisy CSI generation.
//!
//! Each specular component k is an image source of the transmit array: its
//! (possibly mirrored) layout, an amplitude reflection coefficient, and a
//! per-element visibility mask. The entry of a component channel vector for
//! element l is
//!
//! ```text
//! h[l] = vis * sqrt(Gt) * sqrt(Gr) * (lambda / (4 pi d)) * gamma * g_pol * exp(-j k0 d)
//! ```
//!
//! where `d` is the distance from the mirrored element to the device, which
//! equals the length of the physical reflected path.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::arrays::{direction_angles, gain_lookup, ArrayLayout, ElementRef, GainPattern};
use crate::arrays::{local_angles, polarization_loss};
use crate::geometry::VisibilityVector;
use crate::{wavenumber, Error, Result};

/// Complex transmission coefficients from every array element to the device.
#[derive(Debug, Clone)]
pub struct ChannelVector {
    pub entries: Vec<Complex64>,
    /// Carrier wavelength (m) the coefficients were evaluated at.
    pub wavelength: f64,
}

impl ChannelVector {
    pub fn new(entries: Vec<Complex64>, wavelength: f64) -> Self {
        Self {
            entries,
            wavelength,
        }
    }

    pub fn zeros(len: usize, wavelength: f64) -> Self {
        Self {
            entries: vec![Complex64::new(0.0, 0.0); len],
            wavelength,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|h| h.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Entrywise sum; wavelengths must match.
    pub fn add(&self, other: &ChannelVector) -> Result<ChannelVector> {
        if self.len() != other.len() {
            return Err(Error::Dimension(format!(
                "channel lengths differ: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(ChannelVector::new(entries, self.wavelength))
    }
}

/// i.i.d. circular complex Gaussian noise on a channel estimate, with
/// per-complex-entry variance `sigma_h^2` split equally between the
/// quadratures.
#[derive(Debug, Clone, Copy)]
pub struct ChannelNoiseModel {
    pub variance: f64,
}

impl ChannelNoiseModel {
    pub fn new(variance: f64) -> Result<Self> {
        if !(variance >= 0.0) {
            return Err(Error::InvalidArgument(
                "channel noise variance must be nonnegative".into(),
            ));
        }
        Ok(Self { variance })
    }
}

/// One specular multipath component: the line-of-sight (k = 1, physical
/// layout, unit reflection coefficient) or a first-order image source.
#[derive(Debug, Clone)]
pub struct SmcComponent {
    /// 1-based component index; k = 1 is the line of sight.
    pub index: usize,
    /// Physical layout for k = 1, mirrored layout otherwise.
    pub layout: ArrayLayout,
    /// Amplitude reflection coefficient of the generating wall (1 for LoS).
    pub refl_coeff: f64,
    /// Id of the generating wall; `None` for the LoS component.
    pub generating_wall: Option<String>,
    /// Per-element visibility towards the device.
    pub visibility: VisibilityVector,
}

impl SmcComponent {
    pub fn new(
        index: usize,
        layout: ArrayLayout,
        refl_coeff: f64,
        generating_wall: Option<String>,
        visibility: VisibilityVector,
    ) -> Result<Self> {
        if index == 1 && (generating_wall.is_some() || refl_coeff != 1.0) {
            return Err(Error::InvalidArgument(
                "LoS component must have no generating wall and unit reflection coefficient"
                    .into(),
            ));
        }
        if visibility.len() != layout.len() {
            return Err(Error::Dimension(format!(
                "visibility length {} does not match layout length {}",
                visibility.len(),
                layout.len()
            )));
        }
        if !(refl_coeff >= 0.0) {
            return Err(Error::InvalidArgument(
                "reflection coefficient must be nonnegative".into(),
            ));
        }
        Ok(Self {
            index,
            layout,
            refl_coeff,
            generating_wall,
            visibility,
        })
    }
}

/// Receive side of a link: position, gain pattern, polarization, and the
/// orientation of the device antenna frame.
#[derive(Debug, Clone)]
pub struct Device {
    pub position: Vector3<f64>,
    pub pattern: GainPattern,
    pub polarization: Vector3<f64>,
    pub orientation: Matrix3<f64>,
}

impl Device {
    pub fn isotropic(position: Vector3<f64>) -> Self {
        Self {
            position,
            pattern: GainPattern::Isotropic,
            polarization: Vector3::z(),
            orientation: Matrix3::identity(),
        }
    }
}

/// Synthesizes the channel vector of a single specular component.
///
/// `tx_pattern` is the shared gain pattern of the array elements, evaluated
/// in the component layout's frame (which carries the wall reflection for
/// mirrored components, so the angles match the physical outgoing ray).
pub fn smc_channel(
    component: &SmcComponent,
    device: &Device,
    tx_pattern: &GainPattern,
    wavelength: f64,
) -> Result<ChannelVector> {
    let k0 = wavenumber(wavelength);
    let g_pol = polarization_loss(&component.layout.polarization(), &device.polarization);
    let mut entries = Vec::with_capacity(component.layout.len());
    for (l, element) in component.layout.positions().iter().enumerate() {
        if !component.visibility.get(l) {
            entries.push(Complex64::new(0.0, 0.0));
            continue;
        }
        let d = (device.position - element).norm();
        if d == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "device position coincides with element {l} of component {}",
                component.index
            )));
        }
        let (theta_t, phi_t) = local_angles(&component.layout, ElementRef::Index(l), &device.position)?;
        let g_t = gain_lookup(tx_pattern, theta_t, phi_t)?;
        let (theta_r, phi_r) =
            direction_angles(&(element - device.position), &device.orientation)?;
        let g_r = gain_lookup(&device.pattern, theta_r, phi_r)?;
        let amplitude = g_t.sqrt()
            * g_r.sqrt()
            * (wavelength / (4.0 * std::f64::consts::PI * d))
            * component.refl_coeff
            * g_pol;
        entries.push(Complex64::from_polar(amplitude, -k0 * d));
    }
    Ok(ChannelVector::new(entries, wavelength))
}

/// Optional diffuse-multipath term: i.i.d. circular complex Gaussian with
/// the given per-entry variance, drawn deterministically from the seed.
#[derive(Debug, Clone, Copy)]
pub struct DiffuseModel {
    pub variance: f64,
    pub seed: u64,
}

/// Sums the component channels (and the diffuse term, when configured) into
/// the total channel vector.
pub fn total_channel(
    components: &[SmcComponent],
    device: &Device,
    tx_pattern: &GainPattern,
    wavelength: f64,
    dm: Option<DiffuseModel>,
) -> Result<ChannelVector> {
    if components.is_empty() {
        return Err(Error::InvalidArgument(
            "total channel needs at least one component".into(),
        ));
    }
    let mut total = ChannelVector::zeros(components[0].layout.len(), wavelength);
    for component in components {
        let h_k = smc_channel(component, device, tx_pattern, wavelength)?;
        total = total.add(&h_k)?;
    }
    if let Some(dm) = dm {
        let mut rng = ChaCha8Rng::seed_from_u64(dm.seed);
        add_complex_gaussian(&mut total.entries, dm.variance, &mut rng);
    }
    Ok(total)
}

/// Average per-element channel power `||h||^2 / L`.
pub fn channel_power(h: &ChannelVector) -> f64 {
    if h.is_empty() {
        return 0.0;
    }
    h.norm_sq() / h.len() as f64
}

/// Draws a noisy channel estimate `h + n_h` with i.i.d. circular complex
/// Gaussian noise of per-entry variance `noise.variance`; deterministic for
/// a fixed seed.
pub fn noisy_estimate(h: &ChannelVector, noise: &ChannelNoiseModel, seed: u64) -> ChannelVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = h.entries.clone();
    add_complex_gaussian(&mut entries, noise.variance, &mut rng);
    ChannelVector::new(entries, h.wavelength)
}

/// Adds circular complex Gaussian noise with per-entry variance `variance`
/// (each quadrature gets `variance / 2`).
pub(crate) fn add_complex_gaussian(
    entries: &mut [Complex64],
    variance: f64,
    rng: &mut impl rand::Rng,
) {
    if variance == 0.0 {
        return;
    }
    let normal = Normal::new(0.0, (variance / 2.0).sqrt()).expect("valid std dev");
    for h in entries.iter_mut() {
        *h += Complex64::new(normal.sample(rng), normal.sample(rng));
    }
}
