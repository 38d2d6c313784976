//! Property suite behind `ifm verify`: Fock-space operator identities and
//! Householder/port algebra, each reported as a residual against a fixed
//! tolerance.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::fock::{
    commutator, commutator_preservation_check, number_operator, rotation_check, v_unitary, FockError, FockSpace,
    ModePair,
};
use crate::optics::{householder, reflect_mode, rotation_matrix, Momentum3, PhotonMode};

pub const ROTATION_TOL: f64 = 1e-9;
pub const COMMUTATOR_TOL: f64 = 1e-10;
pub const UNITARITY_TOL: f64 = 1e-12;
pub const GROUP_TOL: f64 = 1e-10;
pub const HOUSEHOLDER_TOL: f64 = 1e-14;
pub const ENERGY_TOL: f64 = 1e-12;
pub const PORT_TOL: f64 = 1e-15;

/// Angles used by the Fock-space checks.
pub const ORACLE_ANGLES: [f64; 3] = [PI / 7.0, PI / 4.0, PI / 2.0];

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub n_max: usize,
    /// Multiplies every tolerance. 1 is the contract; anything else is for
    /// probing the harness.
    pub tol_scale: f64,
    pub random_normals: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            n_max: crate::fock::DEFAULT_N_MAX,
            tol_scale: 1.0,
            random_normals: 1000,
            seed: 0,
        }
    }
}

struct Suite {
    scale: f64,
    results: Vec<CheckResult>,
}

impl Suite {
    fn record(&mut self, name: String, residual: f64, tolerance: f64) {
        let tolerance = tolerance * self.scale;
        self.results.push(CheckResult {
            name,
            residual,
            tolerance,
            passed: residual < tolerance,
        });
    }
}

fn max_abs3(m: &Matrix3<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

pub fn fock_checks(cfg: &VerifyConfig) -> Result<Vec<CheckResult>, FockError> {
    let space = FockSpace::new(&["p", "Rp"], cfg.n_max)?;
    let pair = ModePair::new("p", "Rp");
    let mut s = Suite {
        scale: cfg.tol_scale,
        results: Vec::new(),
    };
    let id = space.identity();
    let n_op = number_operator(&space);

    for (k, &alpha) in ORACLE_ANGLES.iter().enumerate() {
        let label = ["π/7", "π/4", "π/2"][k];
        s.record(format!("rotation law, α = {label}"), rotation_check(&space, &pair, alpha)?, ROTATION_TOL);
        s.record(
            format!("commutator preservation, α = {label}"),
            commutator_preservation_check(&space, &pair, alpha)?,
            COMMUTATOR_TOL,
        );
        let v = v_unitary(&space, &pair, alpha)?;
        s.record(
            format!("unitarity V†V = I, α = {label}"),
            v.adjoint().mul(&v)?.sub(&id)?.max_norm(),
            UNITARITY_TOL,
        );
        let v_inv = v_unitary(&space, &pair, -alpha)?;
        s.record(
            format!("inverse V(α)V(−α) = I, α = {label}"),
            v.mul(&v_inv)?.sub(&id)?.max_norm(),
            UNITARITY_TOL,
        );
        s.record(
            format!("photon number conserved, α = {label}"),
            commutator(&n_op, &v)?.max_norm(),
            GROUP_TOL,
        );
    }

    let (a, b) = (0.37, 1.91);
    let lhs = v_unitary(&space, &pair, a)?.mul(&v_unitary(&space, &pair, b)?)?;
    let rhs = v_unitary(&space, &pair, a + b)?;
    s.record("group law V(α)V(β) = V(α+β)".into(), lhs.sub(&rhs)?.max_norm(), GROUP_TOL);

    let grid_worst = (0..16)
        .map(|i| rotation_check(&space, &pair, 2.0 * PI * i as f64 / 16.0))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    s.record("rotation law, 16-angle grid".into(), grid_worst, ROTATION_TOL);

    Ok(s.results)
}

pub fn optics_checks(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut s = Suite {
        scale: cfg.tol_scale,
        results: Vec::new(),
    };
    let random_vec =|rng: &mut ChaCha8Rng| loop {
        let v = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        if v.norm() > 1e-3 {
            return v;
        }
    };

    let (mut orth, mut invol, mut det, mut det4, mut energy, mut transverse) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..cfg.random_normals {
        let r = householder(random_vec(&mut rng)).expect("nonzero normal");
        let m = r.matrix();
        orth = orth.max(max_abs3(&(m.transpose() * m - Matrix3::identity())));
        invol = invol.max(max_abs3(&(m * m - Matrix3::identity())));
        det = det.max((m.determinant() + 1.0).abs());
        det4 = det4.max((r.spacetime().determinant() + 1.0).abs());

        let p = random_vec(&mut rng) * rng.random_range(0.1..10.0);
        let e = random_vec(&mut rng);
        let e = e - e.dot(&p) / p.norm_squared() * p;
        if e.norm() < 1e-3 {
            continue;
        }
        let mode = PhotonMode::new(Momentum3(p), e / e.norm()).expect("transverse by construction");
        let out = reflect_mode(&r, &mode);
        energy = energy.max((out.energy() - mode.energy()).abs() / mode.energy().max(1.0));
        transverse = transverse.max(out.polarization().dot(&out.momentum().0).abs() / mode.energy().max(1.0));
    }
    s.record("Householder orthogonality RᵀR = I".into(), orth, HOUSEHOLDER_TOL);
    s.record("Householder involution R² = I".into(), invol, HOUSEHOLDER_TOL);
    s.record("Householder det R = −1".into(), det, HOUSEHOLDER_TOL);
    s.record("space-time block det = −1".into(), det4, HOUSEHOLDER_TOL);
    s.record("reflected energy |Rp| = |p|".into(), energy, ENERGY_TOL);
    s.record("reflected transversality (Rε)·(Rp) = 0".into(), transverse, ENERGY_TOL);

    let port = (0..64)
        .map(|i| {
            let alpha = -PI + 2.0 * PI * i as f64 / 63.0;
            let prod = rotation_matrix(alpha) * rotation_matrix(-alpha) - nalgebra::Matrix2::identity();
            prod.iter().fold(0.0f64, |a, x| a.max(x.abs()))
        })
        .fold(0.0, f64::max);
    s.record("port rotation inverse".into(), port, PORT_TOL);
    s.results
}

/// Runs both suites.
pub fn run_suite(cfg: &VerifyConfig) -> Result<Vec<CheckResult>, FockError> {
    let mut all = fock_checks(cfg)?;
    all.extend(optics_checks(cfg));
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let results = run_suite(&VerifyConfig::default()).unwrap();
        for r in &results {
            assert!(r.passed, "{} residual {:e} tol {:e}", r.name, r.residual, r.tolerance);
        }
        assert!(results.len() > 20);
    }

    #[test]
    fn zero_scale_fails() {
        let cfg = VerifyConfig {
            tol_scale: 0.0,
            n_max: 2,
            random_normals: 5,
            ..VerifyConfig::default()
        };
        assert!(run_suite(&cfg).unwrap().iter().any(|r| !r.passed));
    }
}
