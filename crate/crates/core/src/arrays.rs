//! Array layouts, antenna gain patterns, local look angles, and polarization
//! mismatch.
//!
//! An [`ArrayLayout`] is an ordered set of element positions together with a
//! shared element frame (one orthogonal map from global to local antenna
//! coordinates) and a linear polarization vector. Look angles follow the
//! wave-vector convention: elevation `theta` is measured from the local +z
//! axis, azimuth `phi` from local +x towards local +y.

use nalgebra::{Matrix3, Vector3};

use crate::{Error, Result};

/// Tolerance for unit-vector and orthonormality checks on layout frames.
const FRAME_TOL: f64 = 1e-9;

/// Ordered antenna positions with a common element frame.
#[derive(Debug, Clone)]
pub struct ArrayLayout {
    positions: Vec<Vector3<f64>>,
    center: Vector3<f64>,
    /// Maps global directions into the local antenna frame. Orthogonal but
    /// not necessarily proper: mirroring an array across a wall composes a
    /// reflection into the frame.
    orientation: Matrix3<f64>,
    /// Unit polarization vector in global coordinates.
    polarization: Vector3<f64>,
}

impl ArrayLayout {
    /// Builds a layout from explicit element positions. The center of
    /// gravity is derived from the positions.
    pub fn new(
        positions: Vec<Vector3<f64>>,
        orientation: Matrix3<f64>,
        polarization: Vector3<f64>,
    ) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidArgument(
                "array layout needs at least one element".into(),
            ));
        }
        for (i, a) in positions.iter().enumerate() {
            for b in positions.iter().skip(i + 1) {
                if (a - b).norm() == 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "array layout has coincident elements at {:?}",
                        a
                    )));
                }
            }
        }
        let ortho = orientation.transpose() * orientation - Matrix3::identity();
        if ortho.abs().max() > FRAME_TOL {
            return Err(Error::InvalidArgument(
                "element orientation must be an orthogonal matrix".into(),
            ));
        }
        let pol = polarization.norm();
        if (pol - 1.0).abs() > FRAME_TOL {
            return Err(Error::InvalidArgument(format!(
                "polarization vector must have unit norm (got {pol})"
            )));
        }
        let center = positions.iter().sum::<Vector3<f64>>() / positions.len() as f64;
        Ok(Self {
            positions,
            center,
            orientation,
            polarization,
        })
    }

    /// Rebuilds the layout with every piece given explicitly; used by the
    /// mirroring operation which must keep element order and carry a
    /// reflected (improper) frame.
    pub(crate) fn from_parts(
        positions: Vec<Vector3<f64>>,
        center: Vector3<f64>,
        orientation: Matrix3<f64>,
        polarization: Vector3<f64>,
    ) -> Self {
        Self {
            positions,
            center,
            orientation,
            polarization,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Vector3<f64>] {
        &self.positions
    }

    pub fn position(&self, element: usize) -> Vector3<f64> {
        self.positions[element]
    }

    /// Center of gravity of the element positions.
    pub fn center(&self) -> Vector3<f64> {
        self.center
    }

    /// Global-to-local map of the shared element frame.
    pub fn orientation(&self) -> &Matrix3<f64> {
        &self.orientation
    }

    pub fn polarization(&self) -> Vector3<f64> {
        self.polarization
    }

    pub fn with_orientation(mut self, orientation: Matrix3<f64>) -> Result<Self> {
        let ortho = orientation.transpose() * orientation - Matrix3::identity();
        if ortho.abs().max() > FRAME_TOL {
            return Err(Error::InvalidArgument(
                "element orientation must be an orthogonal matrix".into(),
            ));
        }
        self.orientation = orientation;
        Ok(self)
    }

    pub fn with_polarization(mut self, polarization: Vector3<f64>) -> Result<Self> {
        if (polarization.norm() - 1.0).abs() > FRAME_TOL {
            return Err(Error::InvalidArgument(
                "polarization vector must have unit norm".into(),
            ));
        }
        self.polarization = polarization;
        Ok(self)
    }
}

/// Reference into a layout: a single element or the array center.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementRef {
    Center,
    Index(usize),
}

/// Builds a uniform rectangular array in the plane orthogonal to
/// `plane_normal`, centered at `center`, with `ly * lz` elements spaced
/// `dy` along the in-plane horizontal axis and `dz` along the in-plane
/// vertical axis. Element order is row-major with the vertical index
/// varying fastest. The frame defaults to identity and the polarization to
/// global +z; adjust with [`ArrayLayout::with_orientation`] /
/// [`ArrayLayout::with_polarization`].
pub fn make_ura(
    ly: usize,
    lz: usize,
    dy: f64,
    dz: f64,
    center: Vector3<f64>,
    plane_normal: Vector3<f64>,
) -> Result<ArrayLayout> {
    if ly == 0 || lz == 0 {
        return Err(Error::InvalidArgument(
            "URA element counts must be at least 1".into(),
        ));
    }
    if dy <= 0.0 || dz <= 0.0 {
        return Err(Error::InvalidArgument(
            "URA element spacings must be positive".into(),
        ));
    }
    let n = plane_normal.norm();
    if n == 0.0 {
        return Err(Error::InvalidArgument("URA plane normal is zero".into()));
    }
    let normal = plane_normal / n;

    // In-plane axes: the vertical axis is global +z projected into the
    // plane; if the normal is (anti)parallel to +z, fall back to global +y.
    let z = Vector3::z();
    let mut axis_v = z - normal * z.dot(&normal);
    if axis_v.norm() < 1e-9 {
        let y = Vector3::y();
        axis_v = y - normal * y.dot(&normal);
    }
    let axis_v = axis_v.normalize();
    let axis_u = normal.cross(&axis_v);

    let mut positions = Vec::with_capacity(ly * lz);
    let off_u = (ly as f64 - 1.0) / 2.0;
    let off_v = (lz as f64 - 1.0) / 2.0;
    for iy in 0..ly {
        for iz in 0..lz {
            let u = (iy as f64 - off_u) * dy;
            let v = (iz as f64 - off_v) * dz;
            positions.push(center + axis_u * u + axis_v * v);
        }
    }
    ArrayLayout::new(positions, Matrix3::identity(), Vector3::z())
}

/// Look angles `(theta, phi)` from an element (or the array center) to a
/// target point, expressed in the layout's local frame. `theta` is measured
/// from local +z, `phi = atan2(y_local, x_local)`; at the poles the azimuth
/// is reported as 0.
pub fn local_angles(
    layout: &ArrayLayout,
    element: ElementRef,
    target: &Vector3<f64>,
) -> Result<(f64, f64)> {
    let origin = match element {
        ElementRef::Center => layout.center(),
        ElementRef::Index(i) => {
            if i >= layout.len() {
                return Err(Error::InvalidArgument(format!(
                    "element index {i} out of range (L = {})",
                    layout.len()
                )));
            }
            layout.position(i)
        }
    };
    direction_angles(&(target - origin), layout.orientation())
}

/// Angles of a global-frame direction vector in a local frame.
pub fn direction_angles(direction: &Vector3<f64>, frame: &Matrix3<f64>) -> Result<(f64, f64)> {
    let norm = direction.norm();
    if norm == 0.0 {
        return Err(Error::InvalidArgument(
            "look angles undefined for coincident points".into(),
        ));
    }
    let local = frame * direction;
    let theta = (local.z / norm).clamp(-1.0, 1.0).acos();
    let phi = if local.x == 0.0 && local.y == 0.0 {
        0.0
    } else {
        local.y.atan2(local.x)
    };
    Ok((theta, phi))
}

/// Antenna gain pattern in linear power units.
#[derive(Debug, Clone)]
pub enum GainPattern {
    Isotropic,
    Tabulated(GainTable),
}

impl GainPattern {
    pub fn is_isotropic(&self) -> bool {
        matches!(self, GainPattern::Isotropic)
    }
}

/// Gain values on a regular elevation x azimuth grid, bilinearly
/// interpolated with azimuth wrap-around.
#[derive(Debug, Clone)]
pub struct GainTable {
    /// Strictly increasing elevations in [0, pi].
    thetas: Vec<f64>,
    /// Strictly increasing azimuths in (-pi, pi].
    phis: Vec<f64>,
    /// Row-major `thetas.len() x phis.len()` linear power gains.
    gains: Vec<f64>,
}

impl GainTable {
    pub fn new(thetas: Vec<f64>, phis: Vec<f64>, gains: Vec<f64>) -> Result<Self> {
        if thetas.is_empty() || phis.is_empty() {
            return Err(Error::InvalidArgument("gain table grid is empty".into()));
        }
        if gains.len() != thetas.len() * phis.len() {
            return Err(Error::Dimension(format!(
                "gain table needs {} x {} = {} values, got {}",
                thetas.len(),
                phis.len(),
                thetas.len() * phis.len(),
                gains.len()
            )));
        }
        if !thetas.windows(2).all(|w| w[0] < w[1]) || !phis.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(
                "gain table grid axes must be strictly increasing".into(),
            ));
        }
        if thetas[0] < 0.0 || *thetas.last().unwrap() > std::f64::consts::PI + 1e-12 {
            return Err(Error::InvalidArgument(
                "gain table elevations must lie in [0, pi]".into(),
            ));
        }
        if phis[0] <= -std::f64::consts::PI - 1e-12
            || *phis.last().unwrap() > std::f64::consts::PI + 1e-12
        {
            return Err(Error::InvalidArgument(
                "gain table azimuths must lie in (-pi, pi]".into(),
            ));
        }
        if gains.iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err(Error::InvalidArgument(
                "gain table values must be finite and nonnegative".into(),
            ));
        }
        Ok(Self {
            thetas,
            phis,
            gains,
        })
    }

    fn value(&self, it: usize, ip: usize) -> f64 {
        self.gains[it * self.phis.len() + ip]
    }

    /// Bilinear interpolation; elevation clamps at the table edges, azimuth
    /// wraps across the (-pi, pi] seam.
    fn lookup(&self, theta: f64, phi: f64) -> f64 {
        let (it0, it1, ft) = bracket_clamped(&self.thetas, theta);
        let (ip0, ip1, fp) = self.bracket_phi(phi);
        let g00 = self.value(it0, ip0);
        let g01 = self.value(it0, ip1);
        let g10 = self.value(it1, ip0);
        let g11 = self.value(it1, ip1);
        let g0 = g00 + (g01 - g00) * fp;
        let g1 = g10 + (g11 - g10) * fp;
        g0 + (g1 - g0) * ft
    }

    fn bracket_phi(&self, phi: f64) -> (usize, usize, f64) {
        let n = self.phis.len();
        if n == 1 {
            return (0, 0, 0.0);
        }
        if phi < self.phis[0] || phi > self.phis[n - 1] {
            // Wrap-around segment between the last and (first + 2*pi) sample.
            let lo = self.phis[n - 1];
            let hi = self.phis[0] + 2.0 * std::f64::consts::PI;
            let span = hi - lo;
            if span <= 0.0 {
                return (n - 1, n - 1, 0.0);
            }
            let x = if phi < self.phis[0] {
                phi + 2.0 * std::f64::consts::PI
            } else {
                phi
            };
            return (n - 1, 0, ((x - lo) / span).clamp(0.0, 1.0));
        }
        let (i0, i1, f) = bracket_clamped(&self.phis, phi);
        (i0, i1, f)
    }
}

/// Index pair and interpolation fraction for a sorted axis, clamped to the
/// table edges.
fn bracket_clamped(axis: &[f64], x: f64) -> (usize, usize, f64) {
    let n = axis.len();
    if n == 1 || x <= axis[0] {
        return (0, 0, 0.0);
    }
    if x >= axis[n - 1] {
        return (n - 1, n - 1, 0.0);
    }
    let i1 = axis.partition_point(|a| *a <= x);
    let i0 = i1 - 1;
    let f = (x - axis[i0]) / (axis[i1] - axis[i0]);
    (i0, i1, f)
}

/// Linear power gain at look angles `(theta, phi)`; `theta` must lie in
/// [0, pi] and `phi` in (-pi, pi].
pub fn gain_lookup(pattern: &GainPattern, theta: f64, phi: f64) -> Result<f64> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::InvalidArgument(format!(
            "elevation {theta} outside [0, pi]"
        )));
    }
    if phi <= -std::f64::consts::PI - 1e-12 || phi > std::f64::consts::PI + 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "azimuth {phi} outside (-pi, pi]"
        )));
    }
    match pattern {
        GainPattern::Isotropic => Ok(1.0),
        GainPattern::Tabulated(table) => Ok(table.lookup(theta, phi)),
    }
}

/// Amplitude loss factor for a linear-polarization mismatch: the magnitude
/// of the projection of one unit polarization vector onto the other.
pub fn polarization_loss(rho_t: &Vector3<f64>, rho_r: &Vector3<f64>) -> f64 {
    (rho_t.dot(rho_r) / (rho_t.norm() * rho_r.norm()))
        .abs()
        .min(1.0)
}
