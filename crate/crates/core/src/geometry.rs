//! Bounded-plane walls, ray-wall intersection, array mirroring across walls,
//! and per-element visibility vectors.
//!
//! Walls are finite rectangles: a plane (unit normal plus scalar offset)
//! carrying two orthonormal in-plane axes and extent limits along them. A
//! first-order image source of an array is obtained by reflecting the element
//! positions with the Householder matrix of the wall normal and shifting the
//! center of gravity by twice its signed distance to the plane. Visibility of
//! a specular component per element reduces to a ray-cast test: the segment
//! from the receiver to the mirrored element must pierce the generating wall
//! inside its extent.

use nalgebra::{Matrix3, Vector3};

use crate::arrays::ArrayLayout;
use crate::{Error, Result};

/// Rays closer to parallel than this (|e_r . n_w|) do not intersect a wall.
pub const PARALLEL_EPS: f64 = 1e-12;
/// Segments are shrunk by this length (m) at both ends before occlusion
/// tests, so a segment touching a wall exactly at an endpoint does not count
/// as blocked.
pub const SEGMENT_SHRINK: f64 = 1e-9;
/// Unit-norm tolerance for wall normals, ray directions, and in-plane axes.
const UNIT_TOL: f64 = 1e-12;

/// A bounded planar wall with a scalar amplitude reflection coefficient.
#[derive(Debug, Clone)]
pub struct Wall {
    id: String,
    normal: Vector3<f64>,
    offset: f64,
    u_axis: Vector3<f64>,
    v_axis: Vector3<f64>,
    u_range: (f64, f64),
    v_range: (f64, f64),
    reflection_coeff: f64,
}

impl Wall {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        id: impl Into<String>,
        normal: Vector3<f64>,
        offset: f64,
        u_axis: Vector3<f64>,
        v_axis: Vector3<f64>,
        u_range: (f64, f64),
        v_range: (f64, f64),
        reflection_coeff: f64,
    ) -> Result<Self> {
        let id = id.into();
        if (normal.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::Geometry(format!(
                "wall '{id}': normal must have unit norm"
            )));
        }
        if (u_axis.norm() - 1.0).abs() > UNIT_TOL || (v_axis.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::Geometry(format!(
                "wall '{id}': extent axes must have unit norm"
            )));
        }
        if u_axis.dot(&v_axis).abs() > UNIT_TOL
            || u_axis.dot(&normal).abs() > UNIT_TOL
            || v_axis.dot(&normal).abs() > UNIT_TOL
        {
            return Err(Error::Geometry(format!(
                "wall '{id}': extent axes must be orthogonal to each other and to the normal"
            )));
        }
        if u_range.0 >= u_range.1 || v_range.0 >= v_range.1 {
            return Err(Error::Geometry(format!(
                "wall '{id}': extent limits must satisfy min < max"
            )));
        }
        if !(reflection_coeff >= 0.0) {
            return Err(Error::Geometry(format!(
                "wall '{id}': reflection coefficient must be nonnegative"
            )));
        }
        Ok(Self {
            id,
            normal,
            offset,
            u_axis,
            v_axis,
            u_range,
            v_range,
            reflection_coeff,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn normal(&self) -> Vector3<f64> {
        self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn reflection_coeff(&self) -> f64 {
        self.reflection_coeff
    }

    pub fn u_axis(&self) -> &Vector3<f64> {
        &self.u_axis
    }

    pub fn v_axis(&self) -> &Vector3<f64> {
        &self.v_axis
    }

    pub fn u_range(&self) -> (f64, f64) {
        self.u_range
    }

    pub fn v_range(&self) -> (f64, f64) {
        self.v_range
    }

    /// Signed distance of a point to the wall plane: `p . n - offset`.
    pub fn signed_distance(&self, p: &Vector3<f64>) -> f64 {
        p.dot(&self.normal) - self.offset
    }

    /// Whether a point assumed to lie on the wall plane falls inside the
    /// rectangular extent.
    pub fn contains(&self, point: &Vector3<f64>) -> bool {
        let u = point.dot(&self.u_axis);
        let v = point.dot(&self.v_axis);
        u >= self.u_range.0 && u <= self.u_range.1 && v >= self.v_range.0 && v <= self.v_range.1
    }

    /// Mirror image of a point across the wall plane.
    pub fn mirror_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        p - self.normal * (2.0 * self.signed_distance(p))
    }

    /// Returns a copy with the extent limits replaced; used to study
    /// visibility as a function of wall size.
    pub fn with_extent(&self, u_range: (f64, f64), v_range: (f64, f64)) -> Result<Self> {
        Wall::new(
            self.id.clone(),
            self.normal,
            self.offset,
            self.u_axis,
            self.v_axis,
            u_range,
            v_range,
            self.reflection_coeff,
        )
    }
}

/// A ray with unit direction.
#[derive(Debug, Clone, Copy)]
pub struct Ray {
    origin: Vector3<f64>,
    direction: Vector3<f64>,
}

impl Ray {
    pub fn new(origin: Vector3<f64>, direction: Vector3<f64>) -> Result<Self> {
        if (direction.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::Geometry(
                "ray direction must have unit norm".into(),
            ));
        }
        Ok(Self { origin, direction })
    }

    /// Ray through two distinct points, directed from `a` to `b`.
    pub fn between(a: &Vector3<f64>, b: &Vector3<f64>) -> Result<Self> {
        let d = b - a;
        let n = d.norm();
        if n == 0.0 {
            return Err(Error::Geometry("ray endpoints coincide".into()));
        }
        Ok(Self {
            origin: *a,
            direction: d / n,
        })
    }

    pub fn origin(&self) -> Vector3<f64> {
        self.origin
    }

    pub fn direction(&self) -> Vector3<f64> {
        self.direction
    }

    pub fn at(&self, l: f64) -> Vector3<f64> {
        self.origin + self.direction * l
    }
}

/// Forward intersection of a ray with a bounded wall.
#[derive(Debug, Clone, Copy)]
pub struct RayHit {
    /// Ray parameter of the hit (m), strictly positive.
    pub distance: f64,
    pub point: Vector3<f64>,
}

/// Intersects a ray with a wall. Returns `None` for rays parallel to the
/// plane (|e_r . n_w| < 1e-12), hits behind or at the origin, and hits
/// outside the wall extent.
pub fn ray_wall_intersection(ray: &Ray, wall: &Wall) -> Option<RayHit> {
    let denom = ray.direction.dot(&wall.normal);
    if denom.abs() < PARALLEL_EPS {
        return None;
    }
    let l = (wall.offset - ray.origin.dot(&wall.normal)) / denom;
    if l <= 0.0 {
        return None;
    }
    let point = ray.at(l);
    if !wall.contains(&point) {
        return None;
    }
    Some(RayHit { distance: l, point })
}

/// Householder reflection matrix `H = I - 2 n n^T` for a unit normal.
/// The result is symmetric, involutory, orthogonal, and has determinant -1.
pub fn householder_matrix(normal: &Vector3<f64>) -> Result<Matrix3<f64>> {
    if (normal.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::Geometry(format!(
            "householder normal must have unit norm (got {})",
            normal.norm()
        )));
    }
    Ok(Matrix3::identity() - 2.0 * normal * normal.transpose())
}

/// Mirrors an array layout across a wall: relative element positions are
/// reflected with the Householder matrix of the wall normal, the center of
/// gravity is shifted by twice its signed distance to the plane, and the
/// element frame picks up the reflection so that look angles evaluated in
/// the mirrored frame match the physical reflected ray. Element order is
/// preserved; applying the operation twice restores the input.
pub fn mirror_array(layout: &ArrayLayout, wall: &Wall) -> ArrayLayout {
    let h = Matrix3::identity() - 2.0 * wall.normal * wall.normal.transpose();
    let center = layout.center();
    let mirrored_center = center - wall.normal * (2.0 * wall.signed_distance(&center));
    let positions: Vec<Vector3<f64>> = layout
        .positions()
        .iter()
        .map(|p| mirrored_center + h * (p - center))
        .collect();
    // Global -> local of the mirrored frame: undo the reflection first,
    // then apply the physical frame.
    let orientation = layout.orientation() * h;
    ArrayLayout::from_parts(positions, mirrored_center, orientation, layout.polarization())
}

/// Whether the open segment between two points is free of walls. The
/// segment is shrunk by [`SEGMENT_SHRINK`] at both ends so antennas sitting
/// exactly on a wall plane do not occlude themselves; `exclude` skips one
/// wall by id (the generating wall of a specular component).
pub fn segment_visible(
    a: &Vector3<f64>,
    b: &Vector3<f64>,
    walls: &[Wall],
    exclude: Option<&str>,
) -> bool {
    let ray = match Ray::between(a, b) {
        Ok(r) => r,
        Err(_) => return true,
    };
    let length = (b - a).norm();
    let lo = SEGMENT_SHRINK;
    let hi = length - SEGMENT_SHRINK;
    for wall in walls {
        if exclude.is_some_and(|id| id == wall.id()) {
            continue;
        }
        if let Some(hit) = ray_wall_intersection(&ray, wall) {
            if hit.distance > lo && hit.distance < hi {
                return false;
            }
        }
    }
    true
}

/// Per-element binary visibility mask of one propagation component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisibilityVector {
    entries: Vec<bool>,
}

impl VisibilityVector {
    pub fn new(entries: Vec<bool>) -> Self {
        Self { entries }
    }

    pub fn all_visible(len: usize) -> Self {
        Self {
            entries: vec![true; len],
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, element: usize) -> bool {
        self.entries[element]
    }

    pub fn entries(&self) -> &[bool] {
        &self.entries
    }

    /// Number of visible elements.
    pub fn count_visible(&self) -> usize {
        self.entries.iter().filter(|v| **v).count()
    }
}

/// Computes the visibility vector of one component towards a receiver.
///
/// For the line-of-sight component (`generating_wall` is `None`) an element
/// is visible when the segment from the receiver to the element crosses no
/// wall. For a specular component the layout must be the mirrored one and an
/// element is visible when the segment from the receiver to the mirrored
/// element pierces the generating wall inside its extent (the specular point
/// exists); with `occlusion_enabled` both physical sub-segments
/// (receiver to specular point, specular point to physical element) must
/// additionally be free of the other walls.
pub fn visibility_vector(
    component_layout: &ArrayLayout,
    receiver: &Vector3<f64>,
    generating_wall: Option<&Wall>,
    walls: &[Wall],
    occlusion_enabled: bool,
) -> VisibilityVector {
    let entries = component_layout
        .positions()
        .iter()
        .map(|element| match generating_wall {
            None => segment_visible(receiver, element, walls, None),
            Some(wall) => {
                let to_element = element - receiver;
                let length = to_element.norm();
                let ray = match Ray::between(receiver, element) {
                    Ok(r) => r,
                    Err(_) => return false,
                };
                let Some(hit) = ray_wall_intersection(&ray, wall) else {
                    return false;
                };
                if hit.distance >= length {
                    return false;
                }
                if occlusion_enabled {
                    let specular = hit.point;
                    let physical = wall.mirror_point(element);
                    segment_visible(receiver, &specular, walls, Some(wall.id()))
                        && segment_visible(&specular, &physical, walls, Some(wall.id()))
                } else {
                    true
                }
            }
        })
        .collect();
    VisibilityVector::new(entries)
}
