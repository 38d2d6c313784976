//! Mach-Zehnder layouts, branch propagation, shot sampling and fringe scans.

mod fringe;
mod layout;
mod propagate;
mod shots;

use thiserror::Error;

use crate::optics::{ElementKind, OpticsError};

pub use fringe::{fringe_scan, FringePoint, FRINGE_ARM};
pub use layout::{Arm, ArmId, DetectorId, Layout, LayoutParts, Obstruction, Port, Source, VertexId};
pub use propagate::{
    propagate_analytic, propagation_phase, Branch, DetectionReport, InteractionEvent, LOCALITY_TOLERANCE,
};
pub use shots::{run_shots, ShotCounts, ShotRun, SHOT_BATCH};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LayoutError {
    #[error("unknown vertex `{0}` (expected L11, L12, L21 or L22)")]
    UnknownVertex(String),
    #[error("vertex {0} has no position")]
    MissingVertex(VertexId),
    #[error("no element placed at {0}")]
    MissingElement(VertexId),
    #[error("{vertex} needs a {expected:?}, found a {found:?}")]
    WrongElement {
        vertex: VertexId,
        expected: ElementKind,
        found: ElementKind,
    },
    #[error("element stored under {key} claims vertex {element}")]
    WrongElementVertex { key: VertexId, element: VertexId },
    #[error("arm {0} is not part of the interferometer")]
    UnexpectedArm(ArmId),
    #[error("arm {0} is declared twice")]
    DuplicateArm(ArmId),
    #[error("arm {0} is missing")]
    MissingArm(ArmId),
    #[error("arm label `{0}` is used twice")]
    DuplicateLabel(String),
    #[error("no arm named `{0}`")]
    UnknownArm(String),
    #[error("arm {arm} length must be positive, got {length}")]
    NonPositiveLength { arm: ArmId, length: f64 },
    #[error("trigger efficiency must lie in [0, 1], got {0}")]
    InvalidEfficiency(f64),
    #[error("detector {0} is not attached to a port")]
    MissingDetector(DetectorId),
    #[error("both detectors are attached to port {0}")]
    SharedDetectorPort(Port),
    #[error("no source declared")]
    MissingSource,
    #[error("beam leaving {vertex} along {direction:?} does not follow any arm")]
    Misaligned { vertex: VertexId, direction: [f64; 3] },
    #[error("beams do not recombine at {0}: the two inputs are not a reflected pair")]
    NoRecombination(VertexId),
    #[error(
        "branch packets overlap by {overlap:e} (tolerance {tolerance:e}); \
         increase the arm separation or decrease the packet width"
    )]
    NotLocalized { overlap: f64, tolerance: f64 },
    #[error("propagation needs length >= 0 and |p| > 0, got length {length}, |p| {momentum}")]
    PhaseDomain { length: f64, momentum: f64 },
    #[error("fringe scans need an unobstructed layout")]
    ObstructionPresent,
    #[error("fringe scan needs at least 2 steps, got {0}")]
    TooFewSteps(usize),
    #[error(transparent)]
    Optics(#[from] OpticsError),
}
