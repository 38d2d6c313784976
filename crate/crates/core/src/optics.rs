//! Photon modes, Householder reflections and the two-port element algebra.
//!
//! All quantities are in natural units, so a mode's energy is the modulus of
//! its momentum.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interferometer::VertexId;

/// Transversality and unit-length tolerance for polarization vectors.
pub const TRANSVERSE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpticsError {
    #[error("reflection normal must be nonzero")]
    DegenerateNormal,
    #[error("momentum must be nonzero and finite")]
    ZeroMomentum,
    #[error("polarization must be a unit vector (|ε| = {0})")]
    NonUnitPolarization(f64),
    #[error("polarization is not transverse to the momentum (ε·p̂ = {0:e})")]
    NotTransverse(f64),
    #[error("packet width must be positive, got {0}")]
    NonPositiveWidth(f64),
    #[error("packet overlap is only defined for equal widths ({0} vs {1})")]
    UnequalWidths(f64, f64),
    #[error("locality tolerance must lie in (0, 1), got {0}")]
    InvalidTolerance(f64),
}

/// Normalizes `v`, repeating until the result is a fixed point so that
/// normalizing an already normalized vector is the identity.
pub(crate) fn unit_vector(v: &Vector3<f64>) -> Option<Vector3<f64>> {
    let n = v.norm();
    if !(n.is_finite() && n > 0.0) {
        return None;
    }
    let mut u = *v;
    for _ in 0..4 {
        if (u.norm_squared() - 1.0).abs() <= 8.0 * f64::EPSILON {
            return Some(u);
        }
        u /= u.norm();
    }
    Some(u)
}

/// Photon three-momentum. Its modulus is the mode energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 3]", from = "[f64; 3]")]
pub struct Momentum3(pub Vector3<f64>);

impl Momentum3 {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, OpticsError> {
        let v = Vector3::new(x, y, z);
        let n = v.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(OpticsError::ZeroMomentum);
        }
        Ok(Momentum3(v))
    }

    pub fn energy(&self) -> f64 {
        self.0.norm()
    }

    pub fn direction(&self) -> Vector3<f64> {
        self.0 / self.0.norm()
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.0.x, self.0.y, self.0.z]
    }
}

impl From<Momentum3> for [f64; 3] {
    fn from(p: Momentum3) -> Self {
        p.as_array()
    }
}

impl From<[f64; 3]> for Momentum3 {
    fn from(a: [f64; 3]) -> Self {
        Momentum3(Vector3::from(a))
    }
}

/// A field mode label: momentum plus transverse unit polarization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonMode {
    momentum: Momentum3,
    polarization: Vector3<f64>,
}

impl PhotonMode {
    pub fn new(momentum: Momentum3, polarization: Vector3<f64>) -> Result<Self, OpticsError> {
        let norm = polarization.norm();
        if (norm - 1.0).abs() > TRANSVERSE_TOL {
            return Err(OpticsError::NonUnitPolarization(norm));
        }
        let dot = polarization.dot(&momentum.direction());
        if dot.abs() > TRANSVERSE_TOL {
            return Err(OpticsError::NotTransverse(dot));
        }
        Ok(PhotonMode {
            momentum,
            polarization,
        })
    }

    pub fn momentum(&self) -> Momentum3 {
        self.momentum
    }

    pub fn polarization(&self) -> Vector3<f64> {
        self.polarization
    }

    pub fn energy(&self) -> f64 {
        self.momentum.energy()
    }
}

/// `R = I − 2 n̂ n̂ᵀ` for a unit normal `n̂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HouseholderReflection {
    normal: Vector3<f64>,
}

/// Builds the reflection through the plane orthogonal to `normal`.
pub fn householder(normal: Vector3<f64>) -> Result<HouseholderReflection, OpticsError> {
    let normal = unit_vector(&normal).ok_or(OpticsError::DegenerateNormal)?;
    Ok(HouseholderReflection { normal })
}

impl HouseholderReflection {
    pub fn normal(&self) -> Vector3<f64> {
        self.normal
    }

    /// Spatial 3×3 matrix.
    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::identity() - 2.0 * self.normal * self.normal.transpose()
    }

    /// Space-time block `diag(1, R)`; the time component is left fixed.
    pub fn spacetime(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(1, 1).copy_from(&self.matrix());
        m
    }

    /// `x − 2(n̂·x) n̂`, applied without forming the matrix.
    pub fn apply(&self, x: &Vector3<f64>) -> Vector3<f64> {
        x - 2.0 * self.normal.dot(x) * self.normal
    }
}

/// Reflects both the momentum and the polarization of a mode.
pub fn reflect_mode(refl: &HouseholderReflection, mode: &PhotonMode) -> PhotonMode {
    PhotonMode {
        momentum: Momentum3(refl.apply(&mode.momentum.0)),
        polarization: refl.apply(&mode.polarization),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementKind {
    Mirror,
    BeamSplitter,
}

impl ElementKind {
    /// Mixing angle: a quarter turn for a mirror, an eighth for a 50:50 splitter.
    pub fn alpha(self) -> f64 {
        match self {
            ElementKind::Mirror => FRAC_PI_2,
            ElementKind::BeamSplitter => FRAC_PI_4,
        }
    }
}

/// An ideal lossless point-like element acting at a vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalElement {
    pub kind: ElementKind,
    pub reflection: HouseholderReflection,
    pub vertex: VertexId,
}

impl OpticalElement {
    pub fn new(kind: ElementKind, normal: Vector3<f64>, vertex: VertexId) -> Result<Self, OpticsError> {
        Ok(OpticalElement {
            kind,
            reflection: householder(normal)?,
            vertex,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.kind.alpha()
    }
}

/// Rotation `[[cos α, sin α], [−sin α, cos α]]` acting on the column of
/// (unprimed, primed) port amplitudes.
///
/// Entries for the two supported angles are written out exactly so that a
/// mirror has literal zeros on its diagonal.
pub fn port_matrix(element: &OpticalElement) -> Matrix2<f64> {
    match element.kind {
        ElementKind::Mirror => Matrix2::new(0.0, 1.0, -1.0, 0.0),
        ElementKind::BeamSplitter => {
            let h = FRAC_1_SQRT_2;
            Matrix2::new(h, h, -h, h)
        }
    }
}

/// The same rotation for an arbitrary angle.
pub fn rotation_matrix(alpha: f64) -> Matrix2<f64> {
    let (s, c) = alpha.sin_cos();
    Matrix2::new(c, s, -s, c)
}

/// A Gaussian wave packet localized around `center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    pub center: Vector3<f64>,
    pub width: f64,
    pub carrier: PhotonMode,
}

impl GaussianPacket {
    pub fn new(center: Vector3<f64>, width: f64, carrier: PhotonMode) -> Result<Self, OpticsError> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(OpticsError::NonPositiveWidth(width));
        }
        Ok(GaussianPacket {
            center,
            width,
            carrier,
        })
    }
}

/// Inner product of two equal-width normalized Gaussians,
/// `exp(−|c₁ − c₂|² / 4σ²)`.
pub fn packet_overlap(w1: &GaussianPacket, w2: &GaussianPacket) -> Result<f64, OpticsError> {
    for w in [w1.width, w2.width] {
        if !(w > 0.0) {
            return Err(OpticsError::NonPositiveWidth(w));
        }
    }
    if w1.width != w2.width {
        return Err(OpticsError::UnequalWidths(w1.width, w2.width));
    }
    let d2 = (w1.center - w2.center).norm_squared();
    Ok((-d2 / (4.0 * w1.width * w1.width)).exp())
}

/// True iff the packets overlap less than `tolerance`, so the branches can be
/// propagated independently.
pub fn locality_check(w1: &GaussianPacket, w2: &GaussianPacket, tolerance: f64) -> Result<bool, OpticsError> {
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(OpticsError::InvalidTolerance(tolerance));
    }
    Ok(packet_overlap(w1, w2)? < tolerance)
}
