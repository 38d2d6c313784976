use serde::Serialize;

use super::{propagate_analytic, ArmId, Layout, LayoutError, VertexId};

/// The arm whose length is detuned by a fringe scan.
pub const FRINGE_ARM: ArmId = ArmId::new(VertexId::L11, VertexId::L21);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FringePoint {
    pub delta_l: f64,
    pub p_d1: f64,
    pub p_d2: f64,
}

/// Detection probabilities as the [`FRINGE_ARM`] length is detuned by
/// `steps` evenly spaced offsets from `min` to `max` inclusive.
pub fn fringe_scan(layout: &Layout, min: f64, max: f64, steps: usize) -> Result<Vec<FringePoint>, LayoutError> {
    if layout.obstruction().is_some() {
        return Err(LayoutError::ObstructionPresent);
    }
    if steps < 2 {
        return Err(LayoutError::TooFewSteps(steps));
    }
    let base = layout.arm(FRINGE_ARM).length;
    (0..steps)
        .map(|i| {
            let delta_l = min + (max - min) * i as f64 / (steps - 1) as f64;
            let detuned = layout.with_arm_length(FRINGE_ARM, base + delta_l)?;
            let r = propagate_analytic(&detuned)?;
            Ok(FringePoint {
                delta_l,
                p_d1: r.p_d1,
                p_d2: r.p_d2,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn cosine_squared_law() {
        let l = Layout::square();
        let k = l.source().mode.energy();
        let scan = fringe_scan(&l, -0.9, 2.0 * PI, 41).unwrap();
        assert_eq!(scan.first().unwrap().delta_l, -0.9);
        assert_eq!(scan.last().unwrap().delta_l, 2.0 * PI);
        for pt in &scan {
            let expected = (k * pt.delta_l / 2.0).cos().powi(2);
            assert!((pt.p_d1 - expected).abs() < 1e-12);
            assert!((pt.p_d1 + pt.p_d2 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_and_half_wave() {
        let l = Layout::square();
        let scan = fringe_scan(&l, 0.0, PI, 2).unwrap();
        assert!((scan[0].p_d1 - 1.0).abs() < 1e-12);
        assert!(scan[1].p_d1.abs() < 1e-12);
    }

    #[test]
    fn periodic() {
        let l = Layout::square();
        let period = 2.0 * PI / l.source().mode.energy();
        let a = fringe_scan(&l, 0.1, 0.7, 7).unwrap();
        let b = fringe_scan(&l, 0.1 + period, 0.7 + period, 7).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.p_d1 - y.p_d1).abs() < 1e-12);
        }
    }

    #[test]
    fn errors() {
        let l = Layout::square();
        assert_eq!(fringe_scan(&l, 0.0, 1.0, 1).unwrap_err(), LayoutError::TooFewSteps(1));
        let bomb = l.with_obstruction("lower", 0.0).unwrap();
        assert_eq!(fringe_scan(&bomb, 0.0, 1.0, 5).unwrap_err(), LayoutError::ObstructionPresent);
        assert!(matches!(
            fringe_scan(&l, -2.0, 0.0, 3),
            Err(LayoutError::NonPositiveLength { .. })
        ));
    }
}
