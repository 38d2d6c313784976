use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::LayoutError;
use crate::optics::{ElementKind, Momentum3, OpticalElement, PhotonMode};

/// The four vertices of the interferometer. Beamsplitters sit at `L11` and
/// `L22`, mirrors at `L12` and `L21`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VertexId {
    L11,
    L12,
    L21,
    L22,
}

impl VertexId {
    pub const ALL: [VertexId; 4] = [VertexId::L11, VertexId::L12, VertexId::L21, VertexId::L22];

    /// Element kind required at this vertex.
    pub fn expected_kind(self) -> ElementKind {
        match self {
            VertexId::L11 | VertexId::L22 => ElementKind::BeamSplitter,
            VertexId::L12 | VertexId::L21 => ElementKind::Mirror,
        }
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            VertexId::L11 => "L11",
            VertexId::L12 => "L12",
            VertexId::L21 => "L21",
            VertexId::L22 => "L22",
        };
        f.write_str(s)
    }
}

impl FromStr for VertexId {
    type Err = LayoutError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "L11" => Ok(VertexId::L11),
            "L12" => Ok(VertexId::L12),
            "L21" => Ok(VertexId::L21),
            "L22" => Ok(VertexId::L22),
            _ => Err(LayoutError::UnknownVertex(s.to_owned())),
        }
    }
}

/// A directed arm, identified by its endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ArmId {
    pub from: VertexId,
    pub to: VertexId,
}

impl ArmId {
    pub const fn new(from: VertexId, to: VertexId) -> Self {
        ArmId { from, to }
    }

    /// The four arms every layout must have.
    pub const REQUIRED: [ArmId; 4] = [
        ArmId::new(VertexId::L11, VertexId::L12),
        ArmId::new(VertexId::L11, VertexId::L21),
        ArmId::new(VertexId::L12, VertexId::L22),
        ArmId::new(VertexId::L21, VertexId::L22),
    ];
}

impl fmt::Display for ArmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.from, self.to)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arm {
    pub id: ArmId,
    pub length: f64,
    pub label: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DetectorId {
    D1,
    D2,
}

impl fmt::Display for DetectorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DetectorId::D1 => "D1",
            DetectorId::D2 => "D2",
        })
    }
}

/// Output port of an element: `A` carries the unprimed field, `B` the
/// primed (reflected-momentum) field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Port {
    A,
    B,
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Port::A => "a",
            Port::B => "b",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Obstruction {
    pub arm: ArmId,
    pub efficiency: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Source {
    pub mode: PhotonMode,
    pub width: f64,
}

/// A validated interferometer layout.
///
/// Constructed through [`Layout::new`] or [`Layout::square`]; every
/// instance satisfies the element placement and arm invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    vertices: BTreeMap<VertexId, Vector3<f64>>,
    elements: BTreeMap<VertexId, OpticalElement>,
    arms: BTreeMap<ArmId, Arm>,
    detectors: BTreeMap<DetectorId, Port>,
    obstruction: Option<Obstruction>,
    source: Source,
}

/// Unvalidated parts of a [`Layout`].
#[derive(Debug, Clone, Default)]
pub struct LayoutParts {
    pub vertices: BTreeMap<VertexId, Vector3<f64>>,
    pub elements: BTreeMap<VertexId, OpticalElement>,
    pub arms: Vec<Arm>,
    pub detectors: BTreeMap<DetectorId, Port>,
    pub obstruction: Option<Obstruction>,
    pub source: Option<Source>,
}

impl Layout {
    pub fn new(parts: LayoutParts) -> Result<Self, LayoutError> {
        for v in VertexId::ALL {
            if !parts.vertices.contains_key(&v) {
                return Err(LayoutError::MissingVertex(v));
            }
            match parts.elements.get(&v) {
                None => return Err(LayoutError::MissingElement(v)),
                Some(el) if el.kind != v.expected_kind() => {
                    return Err(LayoutError::WrongElement {
                        vertex: v,
                        expected: v.expected_kind(),
                        found: el.kind,
                    })
                }
                Some(el) if el.vertex != v => {
                    return Err(LayoutError::WrongElementVertex { key: v, element: el.vertex })
                }
                Some(_) => {}
            }
        }

        let mut arms = BTreeMap::new();
        for arm in parts.arms {
            if !ArmId::REQUIRED.contains(&arm.id) {
                return Err(LayoutError::UnexpectedArm(arm.id));
            }
            if !(arm.length > 0.0 && arm.length.is_finite()) {
                return Err(LayoutError::NonPositiveLength { arm: arm.id, length: arm.length });
            }
            if let Some(label) = &arm.label {
                if arms.values().any(|a: &Arm| a.label.as_deref() == Some(label)) {
                    return Err(LayoutError::DuplicateLabel(label.clone()));
                }
            }
            let id = arm.id;
            if arms.insert(id, arm).is_some() {
                return Err(LayoutError::DuplicateArm(id));
            }
        }
        for id in ArmId::REQUIRED {
            if !arms.contains_key(&id) {
                return Err(LayoutError::MissingArm(id));
            }
        }

        let ports: Vec<Port> = [DetectorId::D1, DetectorId::D2]
            .iter()
            .map(|d| parts.detectors.get(d).copied().ok_or(LayoutError::MissingDetector(*d)))
            .collect::<Result<_, _>>()?;
        if ports[0] == ports[1] {
            return Err(LayoutError::SharedDetectorPort(ports[0]));
        }

        let source = parts.source.ok_or(LayoutError::MissingSource)?;
        if !(source.width > 0.0 && source.width.is_finite()) {
            return Err(LayoutError::Optics(crate::optics::OpticsError::NonPositiveWidth(source.width)));
        }

        if let Some(obs) = parts.obstruction {
            check_efficiency(obs.efficiency)?;
        }

        Ok(Layout {
            vertices: parts.vertices,
            elements: parts.elements,
            arms,
            detectors: parts.detectors,
            obstruction: parts.obstruction,
            source,
        })
    }

    /// The square interferometer: unit arms, all element normals at 45° in
    /// the xy-plane, source momentum `|p| = 1` along +x polarized along z.
    ///
    /// ```text
    ///   L11 ---upper---> L21
    ///    |                |
    ///  lower           upper2
    ///    v                v
    ///   L12 ---lower2--> L22 ---> D1 (+x)
    ///                     |
    ///                     v D2 (−y)
    /// ```
    pub fn square() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let normal = Vector3::new(h, h, 0.0);
        let mut parts = LayoutParts::default();
        for (v, pos) in [
            (VertexId::L11, [0.0, 0.0, 0.0]),
            (VertexId::L12, [0.0, -1.0, 0.0]),
            (VertexId::L21, [1.0, 0.0, 0.0]),
            (VertexId::L22, [1.0, -1.0, 0.0]),
        ] {
            parts.vertices.insert(v, Vector3::from(pos));
            let el = OpticalElement::new(v.expected_kind(), normal, v).expect("nonzero normal");
            parts.elements.insert(v, el);
        }
        for (id, label) in ArmId::REQUIRED.into_iter().zip(["lower", "upper", "lower2", "upper2"]) {
            parts.arms.push(Arm {
                id,
                length: 1.0,
                label: Some(label.to_owned()),
            });
        }
        parts.detectors.insert(DetectorId::D1, Port::A);
        parts.detectors.insert(DetectorId::D2, Port::B);
        let mode = PhotonMode::new(Momentum3(Vector3::x()), Vector3::z()).expect("transverse");
        parts.source = Some(Source { mode, width: 0.05 });
        Layout::new(parts).expect("square layout is valid")
    }

    pub fn vertices(&self) -> &BTreeMap<VertexId, Vector3<f64>> {
        &self.vertices
    }

    pub fn position(&self, v: VertexId) -> Vector3<f64> {
        self.vertices[&v]
    }

    pub fn elements(&self) -> &BTreeMap<VertexId, OpticalElement> {
        &self.elements
    }

    pub fn element(&self, v: VertexId) -> &OpticalElement {
        &self.elements[&v]
    }

    pub fn arms(&self) -> impl Iterator<Item = &Arm> {
        self.arms.values()
    }

    pub fn arm(&self, id: ArmId) -> &Arm {
        &self.arms[&id]
    }

    pub fn detectors(&self) -> &BTreeMap<DetectorId, Port> {
        &self.detectors
    }

    pub fn detector_port(&self, d: DetectorId) -> Port {
        self.detectors[&d]
    }

    pub fn obstruction(&self) -> Option<&Obstruction> {
        self.obstruction.as_ref()
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    /// Looks an arm up by label, or by `FROM-TO` vertex notation.
    pub fn find_arm(&self, name: &str) -> Result<ArmId, LayoutError> {
        if let Some(arm) = self.arms.values().find(|a| a.label.as_deref() == Some(name)) {
            return Ok(arm.id);
        }
        if let Some((from, to)) = name.split_once('-') {
            if let (Ok(from), Ok(to)) = (from.parse(), to.parse()) {
                let id = ArmId::new(from, to);
                if self.arms.contains_key(&id) {
                    return Ok(id);
                }
            }
        }
        Err(LayoutError::UnknownArm(name.to_owned()))
    }

    /// Returns a copy with an absorbing obstruction on the named arm.
    pub fn with_obstruction(&self, arm: &str, efficiency: f64) -> Result<Layout, LayoutError> {
        let arm = self.find_arm(arm)?;
        check_efficiency(efficiency)?;
        let mut out = self.clone();
        out.obstruction = Some(Obstruction { arm, efficiency });
        Ok(out)
    }

    /// Returns a copy with no obstruction.
    pub fn without_obstruction(&self) -> Layout {
        let mut out = self.clone();
        out.obstruction = None;
        out
    }

    /// Returns a copy with the given arm length.
    pub fn with_arm_length(&self, id: ArmId, length: f64) -> Result<Layout, LayoutError> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(LayoutError::NonPositiveLength { arm: id, length });
        }
        let mut out = self.clone();
        out.arms
            .get_mut(&id)
            .ok_or(LayoutError::MissingArm(id))?
            .length = length;
        Ok(out)
    }
}

fn check_efficiency(e: f64) -> Result<(), LayoutError> {
    if (0.0..=1.0).contains(&e) {
        Ok(())
    } else {
        Err(LayoutError::InvalidEfficiency(e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_layout_has_expected_elements() {
        let l = Layout::square();
        let mirrors = l.elements().values().filter(|e| e.kind == ElementKind::Mirror).count();
        assert_eq!(mirrors, 2);
        assert_eq!(l.elements().len(), 4);
        assert_eq!(l.arms().count(), 4);
        assert!(l.obstruction().is_none());
    }

    #[test]
    fn obstruction_is_a_copy() {
        let l = Layout::square();
        let b = l.with_obstruction("lower", 1.0).unwrap();
        assert!(l.obstruction().is_none());
        assert_eq!(
            b.obstruction(),
            Some(&Obstruction {
                arm: ArmId::new(VertexId::L11, VertexId::L12),
                efficiency: 1.0
            })
        );
        let by_vertices = l.with_obstruction("L11-L21", 0.5).unwrap();
        assert_eq!(by_vertices.obstruction().unwrap().arm, ArmId::new(VertexId::L11, VertexId::L21));
    }

    #[test]
    fn obstruction_errors() {
        let l = Layout::square();
        assert_eq!(
            l.with_obstruction("middle", 1.0).unwrap_err(),
            LayoutError::UnknownArm("middle".into())
        );
        assert_eq!(
            l.with_obstruction("lower", 1.5).unwrap_err(),
            LayoutError::InvalidEfficiency(1.5)
        );
        assert!(l.with_obstruction("lower", f64::NAN).is_err());
    }

    #[test]
    fn invariants_enforced() {
        let base = Layout::square();
        let mut parts = LayoutParts {
            vertices: base.vertices.clone(),
            elements: base.elements.clone(),
            arms: base.arms().cloned().collect(),
            detectors: base.detectors.clone(),
            obstruction: None,
            source: Some(base.source),
        };
        assert_eq!(Layout::new(parts.clone()).unwrap(), base);

        let mut swapped = parts.clone();
        let mirror = OpticalElement::new(ElementKind::Mirror, Vector3::x(), VertexId::L11).unwrap();
        swapped.elements.insert(VertexId::L11, mirror);
        assert!(matches!(Layout::new(swapped), Err(LayoutError::WrongElement { .. })));

        let mut short = parts.clone();
        short.arms[0].length = 0.0;
        assert!(matches!(Layout::new(short), Err(LayoutError::NonPositiveLength { .. })));

        let mut missing = parts.clone();
        missing.vertices.remove(&VertexId::L21);
        assert_eq!(Layout::new(missing).unwrap_err(), LayoutError::MissingVertex(VertexId::L21));

        parts.detectors.insert(DetectorId::D2, Port::A);
        assert_eq!(Layout::new(parts).unwrap_err(), LayoutError::SharedDetectorPort(Port::A));
    }
}
