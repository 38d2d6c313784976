use std::collections::BTreeMap;

use nalgebra::Vector3;
use num_complex::Complex64;

use super::{ArmId, DetectorId, Layout, LayoutError, Port, VertexId};
use crate::optics::{locality_check, packet_overlap, port_matrix, reflect_mode, GaussianPacket, Momentum3, PhotonMode};

/// Overlap below which two branch packets are treated as independent.
pub const LOCALITY_TOLERANCE: f64 = 1e-6;

/// Cosine threshold for a beam direction to count as following an arm.
const ALIGN_TOL: f64 = 1e-9;

/// One localized component of the split single-photon field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub amplitude: Complex64,
    pub mode: PhotonMode,
    pub vertex: VertexId,
    pub path_length: f64,
    pub port: Port,
}

/// A branch terminated by the obstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionEvent {
    pub arm: ArmId,
    pub position: Vector3<f64>,
    pub absorbed_weight: f64,
}

/// Detection probabilities and detector-side kinematics.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport {
    pub p_d1: f64,
    pub p_d2: f64,
    pub p_absorbed: f64,
    pub momentum_d1: Momentum3,
    pub momentum_d2: Momentum3,
    pub amplitude_d1: Complex64,
    pub amplitude_d2: Complex64,
    /// `exp(i |p| L̄)` with `L̄` the mean length of the two routes.
    pub reference_phase: Complex64,
    pub events: Vec<InteractionEvent>,
}

impl DetectionReport {
    pub fn probability(&self, d: DetectorId) -> f64 {
        match d {
            DetectorId::D1 => self.p_d1,
            DetectorId::D2 => self.p_d2,
        }
    }

    pub fn total(&self) -> f64 {
        self.p_d1 + self.p_d2 + self.p_absorbed
    }

    /// Detector amplitude with the common propagation phase removed. For a
    /// balanced layout this is the bare product of element matrices.
    pub fn relative_amplitude(&self, d: DetectorId) -> Complex64 {
        let amp = match d {
            DetectorId::D1 => self.amplitude_d1,
            DetectorId::D2 => self.amplitude_d2,
        };
        amp / self.reference_phase
    }
}

/// On-shell free propagation phase `exp(i |p| L)`.
pub fn propagation_phase(length: f64, momentum: f64) -> Result<Complex64, LayoutError> {
    if !(length >= 0.0 && length.is_finite() && momentum > 0.0 && momentum.is_finite()) {
        return Err(LayoutError::PhaseDomain { length, momentum });
    }
    Ok(Complex64::cis(momentum * length))
}

/// Splits a branch at the element sitting on its vertex. Structurally zero
/// port couplings (the mirror diagonal) produce no output branch.
fn scatter(layout: &Layout, branch: &Branch) -> Vec<Branch> {
    let element = layout.element(branch.vertex);
    let m = port_matrix(element);
    let reflected = reflect_mode(&element.reflection, &branch.mode);
    let col = match branch.port {
        Port::A => 0,
        Port::B => 1,
    };
    [(Port::A, 0), (Port::B, 1)]
        .into_iter()
        .filter_map(|(port, row)| {
            let coeff = m[(row, col)];
            if coeff == 0.0 {
                return None;
            }
            // an element keeps the mode on the diagonal and reflects it off it
            let mode = if row == col { branch.mode } else { reflected };
            Some(Branch {
                amplitude: branch.amplitude * coeff,
                mode,
                port,
                ..*branch
            })
        })
        .collect()
}

fn route(layout: &Layout, branch: &Branch) -> Result<ArmId, LayoutError> {
    let dir = branch.mode.momentum().direction();
    let origin = layout.position(branch.vertex);
    layout
        .arms()
        .filter(|a| a.id.from == branch.vertex)
        .find(|a| {
            let d = layout.position(a.id.to) - origin;
            d.norm() > 0.0 && d.normalize().dot(&dir) > 1.0 - ALIGN_TOL
        })
        .map(|a| a.id)
        .ok_or(LayoutError::Misaligned {
            vertex: branch.vertex,
            direction: [dir.x, dir.y, dir.z],
        })
}

fn arm_midpoint(layout: &Layout, id: ArmId) -> Vector3<f64> {
    (layout.position(id.from) + layout.position(id.to)) * 0.5
}

/// Checks that the two branches leaving the first beamsplitter are far enough
/// apart half-way along their arms to be propagated independently.
fn certify_locality(layout: &Layout, first: &[Branch]) -> Result<(), LayoutError> {
    let width = layout.source().width;
    let packets = first
        .iter()
        .map(|b| {
            let arm = route(layout, b)?;
            Ok(GaussianPacket::new(arm_midpoint(layout, arm), width, b.mode)?)
        })
        .collect::<Result<Vec<_>, LayoutError>>()?;
    for (i, w1) in packets.iter().enumerate() {
        for w2 in &packets[i + 1..] {
            if !locality_check(w1, w2, LOCALITY_TOLERANCE)? {
                return Err(LayoutError::NotLocalized {
                    overlap: packet_overlap(w1, w2)?,
                    tolerance: LOCALITY_TOLERANCE,
                });
            }
        }
    }
    Ok(())
}

/// Propagates the source through the layout and returns the Born-rule
/// detection probabilities.
///
/// Branches are scattered at each element with [`port_matrix`], carried
/// along arms with [`propagation_phase`], and, on an obstructed arm, lose
/// weight `|amp|² × efficiency` to the absorber while the surviving
/// amplitude is scaled by `√(1 − efficiency)`. The two output ports of the
/// last beamsplitter are summed coherently.
pub fn propagate_analytic(layout: &Layout) -> Result<DetectionReport, LayoutError> {
    let source = layout.source();
    let energy = source.mode.energy();
    let mut pending: BTreeMap<VertexId, Vec<Branch>> = BTreeMap::new();
    pending.entry(VertexId::L11).or_default().push(Branch {
        amplitude: Complex64::new(1.0, 0.0),
        mode: source.mode,
        vertex: VertexId::L11,
        path_length: 0.0,
        port: Port::A,
    });

    let mut events = Vec::new();
    let mut outputs: BTreeMap<Port, (Complex64, PhotonMode)> = BTreeMap::new();

    // vertex ids are ordered so that every arm points forward
    for vertex in VertexId::ALL {
        let arriving = pending.remove(&vertex).unwrap_or_default();
        for branch in &arriving {
            let scattered = scatter(layout, branch);
            if vertex == VertexId::L11 {
                certify_locality(layout, &scattered)?;
            }
            for mut out in scattered {
                if vertex == VertexId::L22 {
                    match outputs.get_mut(&out.port) {
                        None => {
                            outputs.insert(out.port, (out.amplitude, out.mode));
                        }
                        Some((amp, mode)) => {
                            let same = (mode.momentum().0 - out.mode.momentum().0).norm()
                                <= ALIGN_TOL * energy;
                            if !same {
                                return Err(LayoutError::NoRecombination(vertex));
                            }
                            *amp += out.amplitude;
                        }
                    }
                    continue;
                }
                let id = route(layout, &out)?;
                let arm = layout.arm(id);
                out.amplitude *= propagation_phase(arm.length, out.mode.energy())?;
                if let Some(obs) = layout.obstruction().filter(|o| o.arm == id) {
                    let absorbed = out.amplitude.norm_sqr() * obs.efficiency;
                    events.push(InteractionEvent {
                        arm: id,
                        position: arm_midpoint(layout, id),
                        absorbed_weight: absorbed,
                    });
                    out.amplitude *= (1.0 - obs.efficiency).sqrt();
                }
                out.path_length += arm.length;
                out.vertex = id.to;
                pending.entry(id.to).or_default().push(out);
            }
        }
    }

    let detector = |d: DetectorId| {
        outputs
            .get(&layout.detector_port(d))
            .copied()
            .ok_or(LayoutError::NoRecombination(VertexId::L22))
    };
    let (amp1, mode1) = detector(DetectorId::D1)?;
    let (amp2, mode2) = detector(DetectorId::D2)?;
    let route_length = |via: VertexId| {
        layout.arm(ArmId::new(VertexId::L11, via)).length + layout.arm(ArmId::new(via, VertexId::L22)).length
    };
    let mean_length = 0.5 * (route_length(VertexId::L12) + route_length(VertexId::L21));
    Ok(DetectionReport {
        reference_phase: propagation_phase(mean_length, energy)?,
        p_d1: amp1.norm_sqr(),
        p_d2: amp2.norm_sqr(),
        p_absorbed: events.iter().map(|e| e.absorbed_weight).sum(),
        momentum_d1: mode1.momentum(),
        momentum_d2: mode2.momentum(),
        amplitude_d1: amp1,
        amplitude_d2: amp2,
        events,
    })
}
