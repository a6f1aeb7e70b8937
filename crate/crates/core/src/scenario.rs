//! Scenario configuration: a strict JSON schema describing the carrier, the
//! transmit array, the walls, and the devices, plus the scene-assembly
//! methods that turn a parsed scenario into specular components and channel
//! vectors.
//!
//! Parsing is strict: unknown fields are rejected, and every semantic
//! violation names the offending field. Direction vectors that miss unit
//! norm by at most 1e-6 are normalized with a warning; larger deviations
//! are errors.

use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use serde::Deserialize;

use crate::arrays::{make_ura, ArrayLayout, GainPattern};
use crate::channel::{
    total_channel, smc_channel, ChannelVector, Device, DiffuseModel, SmcComponent,
};
use crate::beamform::{smc_composite_weights, Weights};
use crate::geometry::{visibility_vector, mirror_array, Wall};
use crate::{wavelength, Error, Result};

/// Current schema version accepted by the parser.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    schema_version: u32,
    frequency_hz: f64,
    array: ArraySpec,
    #[serde(default)]
    walls: Vec<WallSpec>,
    devices: Vec<DeviceSpec>,
    #[serde(default)]
    dm_variance: Option<f64>,
    #[serde(default)]
    occlusion: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArraySpec {
    count_y: usize,
    count_z: usize,
    #[serde(default)]
    spacing_y_m: Option<f64>,
    #[serde(default)]
    spacing_z_m: Option<f64>,
    #[serde(default)]
    spacing_y_wavelengths: Option<f64>,
    #[serde(default)]
    spacing_z_wavelengths: Option<f64>,
    center_m: [f64; 3],
    normal: [f64; 3],
    #[serde(default)]
    orientation: Option<AxesSpec>,
    #[serde(default)]
    polarization: Option<[f64; 3]>,
    #[serde(default)]
    pattern_csv: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AxesSpec {
    x_axis: [f64; 3],
    y_axis: [f64; 3],
    z_axis: [f64; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WallSpec {
    id: String,
    normal: [f64; 3],
    offset_m: f64,
    u_axis: [f64; 3],
    v_axis: [f64; 3],
    u_range_m: [f64; 2],
    v_range_m: [f64; 2],
    reflection_coeff: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeviceSpec {
    position_m: [f64; 3],
    #[serde(default)]
    polarization: Option<[f64; 3]>,
    #[serde(default)]
    orientation: Option<AxesSpec>,
    #[serde(default)]
    pattern_csv: Option<String>,
}

/// A fully validated scenario with derived quantities resolved once.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub frequency_hz: f64,
    /// Carrier wavelength, `c / f`.
    pub wavelength: f64,
    /// The physical transmit array.
    pub rw: ArrayLayout,
    /// Shared gain pattern of the transmit elements.
    pub tx_pattern: GainPattern,
    pub walls: Vec<Wall>,
    pub devices: Vec<Device>,
    /// Per-entry variance of the optional diffuse-multipath term.
    pub dm_variance: Option<f64>,
    /// Whether specular visibility also tests occlusion by other walls.
    pub occlusion: bool,
    /// Non-fatal findings from parsing (auto-normalized vectors).
    pub warnings: Vec<String>,
}

/// Parses and validates a scenario document. Relative gain-pattern paths
/// are resolved against `base_dir` when given, the working directory
/// otherwise.
pub fn parse_scenario_with_base(text: &str, base_dir: Option<&Path>) -> Result<Scenario> {
    let file: ScenarioFile =
        serde_json::from_str(text).map_err(|e| Error::Scenario(format!("schema: {e}")))?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(Error::Scenario(format!(
            "schema_version: expected {SCHEMA_VERSION}, got {}",
            file.schema_version
        )));
    }
    if !(file.frequency_hz > 0.0) {
        return Err(Error::Scenario("frequency_hz: must be positive".into()));
    }
    let lambda = wavelength(file.frequency_hz);
    let mut warnings = Vec::new();

    let spacing_y = resolve_spacing(
        "array.spacing_y",
        file.array.spacing_y_m,
        file.array.spacing_y_wavelengths,
        lambda,
    )?;
    let spacing_z = resolve_spacing(
        "array.spacing_z",
        file.array.spacing_z_m,
        file.array.spacing_z_wavelengths,
        lambda,
    )?;
    if file.array.count_y == 0 || file.array.count_z == 0 {
        return Err(Error::Scenario(
            "array.count_y/count_z: must be at least 1".into(),
        ));
    }
    let normal = unit_vector("array.normal", file.array.normal, &mut warnings)?;
    let orientation = match &file.array.orientation {
        Some(axes) => orientation_matrix("array.orientation", axes, &mut warnings)?,
        None => Matrix3::identity(),
    };
    let polarization = unit_vector(
        "array.polarization",
        file.array.polarization.unwrap_or([0.0, 0.0, 1.0]),
        &mut warnings,
    )?;
    let rw = make_ura(
        file.array.count_y,
        file.array.count_z,
        spacing_y,
        spacing_z,
        Vector3::from(file.array.center_m),
        normal,
    )
    .map_err(|e| Error::Scenario(format!("array: {e}")))?
    .with_orientation(orientation)
    .map_err(|e| Error::Scenario(format!("array.orientation: {e}")))?
    .with_polarization(polarization)
    .map_err(|e| Error::Scenario(format!("array.polarization: {e}")))?;

    let tx_pattern = load_pattern("array.pattern_csv", &file.array.pattern_csv, base_dir)?;

    let mut walls = Vec::with_capacity(file.walls.len());
    for (i, spec) in file.walls.iter().enumerate() {
        let field = format!("walls[{i}]");
        if walls.iter().any(|w: &Wall| w.id() == spec.id) {
            return Err(Error::Scenario(format!(
                "{field}.id: duplicate wall id '{}'",
                spec.id
            )));
        }
        let normal = unit_vector(&format!("{field}.normal"), spec.normal, &mut warnings)?;
        let u_axis = unit_vector(&format!("{field}.u_axis"), spec.u_axis, &mut warnings)?;
        let v_axis = unit_vector(&format!("{field}.v_axis"), spec.v_axis, &mut warnings)?;
        let wall = Wall::new(
            spec.id.clone(),
            normal,
            spec.offset_m,
            u_axis,
            v_axis,
            (spec.u_range_m[0], spec.u_range_m[1]),
            (spec.v_range_m[0], spec.v_range_m[1]),
            spec.reflection_coeff,
        )
        .map_err(|e| Error::Scenario(format!("{field}: {e}")))?;
        walls.push(wall);
    }

    if file.devices.is_empty() {
        return Err(Error::Scenario(
            "devices: at least one device position is required".into(),
        ));
    }
    let mut devices = Vec::with_capacity(file.devices.len());
    for (i, spec) in file.devices.iter().enumerate() {
        let field = format!("devices[{i}]");
        let polarization = unit_vector(
            &format!("{field}.polarization"),
            spec.polarization.unwrap_or([0.0, 0.0, 1.0]),
            &mut warnings,
        )?;
        let orientation = match &spec.orientation {
            Some(axes) => {
                orientation_matrix(&format!("{field}.orientation"), axes, &mut warnings)?
            }
            None => Matrix3::identity(),
        };
        let pattern = load_pattern(
            &format!("{field}.pattern_csv"),
            &spec.pattern_csv,
            base_dir,
        )?;
        devices.push(Device {
            position: Vector3::from(spec.position_m),
            pattern,
            polarization,
            orientation,
        });
    }

    if let Some(v) = file.dm_variance {
        if !(v >= 0.0) {
            return Err(Error::Scenario("dm_variance: must be nonnegative".into()));
        }
    }

    Ok(Scenario {
        frequency_hz: file.frequency_hz,
        wavelength: lambda,
        rw,
        tx_pattern,
        walls,
        devices,
        dm_variance: file.dm_variance,
        occlusion: file.occlusion,
        warnings,
    })
}

/// Parses a scenario document with pattern paths resolved against the
/// working directory.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    parse_scenario_with_base(text, None)
}

/// Loads a scenario file; relative pattern paths resolve against the file's
/// directory.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_scenario_with_base(&text, path.parent())
}

fn resolve_spacing(
    field: &str,
    meters: Option<f64>,
    wavelengths: Option<f64>,
    lambda: f64,
) -> Result<f64> {
    let value = match (meters, wavelengths) {
        (Some(m), None) => m,
        (None, Some(wl)) => wl * lambda,
        (None, None) => {
            return Err(Error::Scenario(format!(
                "{field}: one of {field}_m or {field}_wavelengths is required"
            )));
        }
        (Some(_), Some(_)) => {
            return Err(Error::Scenario(format!(
                "{field}: give either {field}_m or {field}_wavelengths, not both"
            )));
        }
    };
    if !(value > 0.0) {
        return Err(Error::Scenario(format!("{field}: must be positive")));
    }
    Ok(value)
}

/// Validates a direction vector; norms within 1e-6 of unity are fixed up
/// with a warning, anything else is an error naming the field.
fn unit_vector(field: &str, raw: [f64; 3], warnings: &mut Vec<String>) -> Result<Vector3<f64>> {
    let v = Vector3::from(raw);
    let norm = v.norm();
    if !norm.is_finite() || norm == 0.0 {
        return Err(Error::Scenario(format!("{field}: zero or non-finite vector")));
    }
    let deviation = (norm - 1.0).abs();
    if deviation > 1e-6 {
        return Err(Error::Scenario(format!(
            "{field}: not a unit vector (norm {norm})"
        )));
    }
    if deviation > 1e-12 {
        warnings.push(format!("{field}: normalized (norm was {norm})"));
    }
    Ok(v / norm)
}

fn orientation_matrix(
    field: &str,
    axes: &AxesSpec,
    warnings: &mut Vec<String>,
) -> Result<Matrix3<f64>> {
    let x = unit_vector(&format!("{field}.x_axis"), axes.x_axis, warnings)?;
    let y = unit_vector(&format!("{field}.y_axis"), axes.y_axis, warnings)?;
    let z = unit_vector(&format!("{field}.z_axis"), axes.z_axis, warnings)?;
    // Rows are the local axes expressed in global coordinates, so the matrix
    // maps global vectors into the local frame.
    let m = Matrix3::from_rows(&[x.transpose(), y.transpose(), z.transpose()]);
    let residual = (m * m.transpose() - Matrix3::identity()).abs().max();
    if residual > 1e-9 {
        return Err(Error::Scenario(format!(
            "{field}: axes are not orthonormal (residual {residual:.2e})"
        )));
    }
    Ok(m)
}

fn load_pattern(
    field: &str,
    path: &Option<String>,
    base_dir: Option<&Path>,
) -> Result<GainPattern> {
    match path {
        None => Ok(GainPattern::Isotropic),
        Some(p) => {
            let path = Path::new(p);
            let resolved = if path.is_relative() {
                base_dir.map_or_else(|| path.to_path_buf(), |d| d.join(path))
            } else {
                path.to_path_buf()
            };
            let table = crate::io::read_gain_table_csv(&resolved)
                .map_err(|e| Error::Scenario(format!("{field}: {e}")))?;
            Ok(GainPattern::Tabulated(table))
        }
    }
}

impl Scenario {
    /// Number of modeled components: line of sight plus one per wall.
    pub fn component_count(&self) -> usize {
        1 + self.walls.len()
    }

    /// Device by 1-based index.
    pub fn device(&self, index: usize) -> Result<&Device> {
        if index == 0 || index > self.devices.len() {
            return Err(Error::InvalidArgument(format!(
                "device index {index} out of range (1..={})",
                self.devices.len()
            )));
        }
        Ok(&self.devices[index - 1])
    }

    /// A device like the configured ones but at an arbitrary position;
    /// pattern, polarization, and orientation are taken from the first
    /// configured device.
    pub fn probe_device_at(&self, position: &Vector3<f64>) -> Device {
        let template = &self.devices[0];
        Device {
            position: *position,
            pattern: template.pattern.clone(),
            polarization: template.polarization,
            orientation: template.orientation,
        }
    }

    /// Assembles the specular components towards a receiver position:
    /// component 1 is the line of sight, followed by one first-order image
    /// source per wall in configuration order. Visibility is evaluated per
    /// element against this receiver.
    pub fn components_for(&self, receiver: &Vector3<f64>) -> Result<Vec<SmcComponent>> {
        self.components_with_gamma(receiver, None)
    }

    /// Like [`Scenario::components_for`] but overriding every wall's
    /// reflection coefficient (used to synthesize unit-reflection base
    /// channels for the coefficient search).
    pub fn components_with_gamma(
        &self,
        receiver: &Vector3<f64>,
        gamma_override: Option<f64>,
    ) -> Result<Vec<SmcComponent>> {
        let mut components = Vec::with_capacity(self.component_count());
        let los_visibility = visibility_vector(&self.rw, receiver, None, &self.walls, false);
        components.push(SmcComponent::new(
            1,
            self.rw.clone(),
            1.0,
            None,
            los_visibility,
        )?);
        for (i, wall) in self.walls.iter().enumerate() {
            let mirrored = mirror_array(&self.rw, wall);
            let visibility =
                visibility_vector(&mirrored, receiver, Some(wall), &self.walls, self.occlusion);
            components.push(SmcComponent::new(
                i + 2,
                mirrored,
                gamma_override.unwrap_or_else(|| wall.reflection_coeff()),
                Some(wall.id().to_string()),
                visibility,
            )?);
        }
        Ok(components)
    }

    /// Per-component model channels towards a receiver position.
    pub fn per_smc_channels_at(&self, receiver: &Vector3<f64>) -> Result<Vec<ChannelVector>> {
        let device = self.probe_device_at(receiver);
        self.components_for(receiver)?
            .iter()
            .map(|c| smc_channel(c, &device, &self.tx_pattern, self.wavelength))
            .collect()
    }

    /// Per-component channels with unit reflection coefficients; entry k is
    /// linear in the true coefficient of wall k.
    pub fn unit_gamma_channels_at(&self, receiver: &Vector3<f64>) -> Result<Vec<ChannelVector>> {
        let device = self.probe_device_at(receiver);
        self.components_with_gamma(receiver, Some(1.0))?
            .iter()
            .map(|c| smc_channel(c, &device, &self.tx_pattern, self.wavelength))
            .collect()
    }

    /// Total model channel at a receiver position. The diffuse term is
    /// added only when the scenario configures a variance and a seed is
    /// provided.
    pub fn total_channel_at(
        &self,
        receiver: &Vector3<f64>,
        dm_seed: Option<u64>,
    ) -> Result<ChannelVector> {
        let device = self.probe_device_at(receiver);
        let components = self.components_for(receiver)?;
        let dm = match (self.dm_variance, dm_seed) {
            (Some(variance), Some(seed)) if variance > 0.0 => {
                Some(DiffuseModel { variance, seed })
            }
            _ => None,
        };
        total_channel(&components, &device, &self.tx_pattern, self.wavelength, dm)
    }

    /// Composite specular-beam weights focused at a position, with fixed
    /// beam phases (all zero when omitted). Components whose visibility is
    /// entirely masked (zero channel) are skipped.
    pub fn sw_smc_weights(
        &self,
        receiver: &Vector3<f64>,
        phases: Option<&[f64]>,
    ) -> Result<Weights> {
        let channels = self.per_smc_channels_at(receiver)?;
        let mut live = Vec::with_capacity(channels.len());
        let mut live_phases = Vec::with_capacity(channels.len());
        for (k, h_k) in channels.into_iter().enumerate() {
            let phase = phases.map_or(0.0, |p| p.get(k).copied().unwrap_or(0.0));
            if h_k.norm() > 0.0 {
                live.push(h_k);
                live_phases.push(phase);
            }
        }
        if live.is_empty() {
            return Err(Error::InvalidArgument(
                "no visible specular component towards the focus position".into(),
            ));
        }
        smc_composite_weights(&live, &live_phases, None)
    }
}
