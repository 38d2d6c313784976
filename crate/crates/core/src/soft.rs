//! Low-energy photon emission statistics and detector pollution.
//!
//! Emission factors are reported in units of `e²`; multiply by
//! [`E_SQUARED_HEAVISIDE_LORENTZ`] (or another convention) for a number.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;
use thiserror::Error;

use crate::interferometer::DetectionReport;

/// `e² = 4π α` in Heaviside-Lorentz units with `α = 1/137.035999`.
pub const E_SQUARED_HEAVISIDE_LORENTZ: f64 = 4.0 * PI / 137.035999;

/// Below this velocity `arctanh(β)/β` is evaluated from its Maclaurin series.
pub const SERIES_CROSSOVER: f64 = 1e-4;

const FOUR_PI_SQ: f64 = 4.0 * PI * PI;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SoftError {
    #[error("emission factor is divergent for β = 1 (got β = {0})")]
    Divergent(f64),
    #[error("velocity must lie in [0, 1), got {0}")]
    InvalidVelocity(f64),
    #[error("direction flag must be +1 or -1, got {0}")]
    InvalidDirection(i32),
    #[error("relative velocity matrix must be {expected}x{expected}, got {rows}x{cols}")]
    VelocityShape { expected: usize, rows: usize, cols: usize },
    #[error("relative velocity matrix is not symmetric at ({0}, {1})")]
    AsymmetricVelocities(usize, usize),
    #[error("relative velocity matrix has nonzero diagonal at {0}")]
    NonzeroDiagonal(usize),
    #[error("E- = {0} <= 0: μ diverges, leading to a cloud of low-energy photons")]
    InfraredDivergence(f64),
    #[error("energy window needs E+ >= E-, got E- = {e_minus}, E+ = {e_plus}")]
    InvalidWindow { e_minus: f64, e_plus: f64 },
    #[error("emission factor must be nonnegative, got {0}")]
    NegativeFactor(f64),
    #[error("Poisson mean must be nonnegative, got {0}")]
    NegativeMean(f64),
    #[error("detector solid-angle fraction must lie in (0, 1], got {0}")]
    InvalidSolidAngle(f64),
    #[error("pollution probability must lie in [0, 1], got {0}")]
    InvalidPollution(f64),
}

/// One charged line of the scattering process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessLeg {
    /// Charge in units of the elementary charge.
    pub charge: f64,
    /// +1 outgoing, −1 incoming.
    pub eta: i32,
    /// Speed in units of c.
    pub beta: f64,
}

impl ProcessLeg {
    pub fn new(charge: f64, eta: i32, beta: f64) -> Result<Self, SoftError> {
        let leg = ProcessLeg { charge, eta, beta };
        leg.validate()?;
        Ok(leg)
    }

    pub fn validate(&self) -> Result<(), SoftError> {
        if self.eta != 1 && self.eta != -1 {
            return Err(SoftError::InvalidDirection(self.eta));
        }
        if !(0.0..1.0).contains(&self.beta) {
            return Err(SoftError::InvalidVelocity(self.beta));
        }
        Ok(())
    }
}

/// Detectable photon energy window `(E−, E+)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SoftWindow {
    e_minus: f64,
    e_plus: f64,
}

impl SoftWindow {
    pub fn new(e_minus: f64, e_plus: f64) -> Result<Self, SoftError> {
        if !(e_minus > 0.0) {
            return Err(SoftError::InfraredDivergence(e_minus));
        }
        if !(e_plus >= e_minus && e_plus.is_finite()) {
            return Err(SoftError::InvalidWindow { e_minus, e_plus });
        }
        Ok(SoftWindow { e_minus, e_plus })
    }

    pub fn e_minus(&self) -> f64 {
        self.e_minus
    }

    pub fn e_plus(&self) -> f64 {
        self.e_plus
    }

    /// `ln(E+/E−)`.
    pub fn log_ratio(&self) -> f64 {
        (self.e_plus / self.e_minus).ln()
    }
}

/// Emission factor and the resulting Poisson mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmissionModel {
    /// Weinberg factor in units of e².
    pub weinberg_a: f64,
    pub mean: f64,
}

impl EmissionModel {
    pub fn new(weinberg_a: f64, window: &SoftWindow) -> Result<Self, SoftError> {
        Ok(EmissionModel {
            weinberg_a,
            mean: mean_photons(weinberg_a, window)?,
        })
    }
}

/// Isotropic detector acceptance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PollutionConfig {
    solid_angle_fraction: f64,
}

impl PollutionConfig {
    pub fn new(solid_angle_fraction: f64) -> Result<Self, SoftError> {
        if !(solid_angle_fraction > 0.0 && solid_angle_fraction <= 1.0) {
            return Err(SoftError::InvalidSolidAngle(solid_angle_fraction));
        }
        Ok(PollutionConfig { solid_angle_fraction })
    }

    pub fn solid_angle_fraction(&self) -> f64 {
        self.solid_angle_fraction
    }
}

/// `arctanh(β)/β − 1`, with the removable singularity at 0 handled by series.
fn excess_rapidity_ratio(beta: f64) -> f64 {
    if beta < SERIES_CROSSOVER {
        let b2 = beta * beta;
        b2 * (1.0 / 3.0 + b2 * (1.0 / 5.0 + b2 / 7.0))
    } else {
        beta.atanh() / beta - 1.0
    }
}

fn check_velocity(beta: f64) -> Result<(), SoftError> {
    if beta >= 1.0 {
        return Err(SoftError::Divergent(beta));
    }
    if !(beta >= 0.0) {
        return Err(SoftError::InvalidVelocity(beta));
    }
    Ok(())
}

/// Factor for a single charge scattered from velocity zero to `beta`:
/// `2/(2π)² [arctanh(β)/β − 1]`, in units of e².
pub fn weinberg_factor_fermion(beta: f64) -> Result<f64, SoftError> {
    check_velocity(beta)?;
    Ok(2.0 / FOUR_PI_SQ * excess_rapidity_ratio(beta))
}

/// The two ways of reading the fermion factor at `beta`: as written
/// with the `(2π)²` denominator, and with that denominator dropped.
pub fn fermion_factor_readings(beta: f64) -> Result<(f64, f64), SoftError> {
    let printed = weinberg_factor_fermion(beta)?;
    Ok((printed, printed * FOUR_PI_SQ))
}

/// `−Σ_{n,m} e_n e_m η_n η_m arctanh(β_nm) / ((2π)² β_nm)` in units of e².
///
/// `pairwise_beta` holds relative velocities; its diagonal must be zero and
/// the diagonal terms take the limit `arctanh(β)/β → 1`.
pub fn weinberg_factor_general(legs: &[ProcessLeg], pairwise_beta: &[Vec<f64>]) -> Result<f64, SoftError> {
    let n = legs.len();
    for leg in legs {
        leg.validate()?;
    }
    if pairwise_beta.len() != n || pairwise_beta.iter().any(|row| row.len() != n) {
        return Err(SoftError::VelocityShape {
            expected: n,
            rows: pairwise_beta.len(),
            cols: pairwise_beta.first().map_or(0, Vec::len),
        });
    }
    for (i, row) in pairwise_beta.iter().enumerate() {
        if row[i] != 0.0 {
            return Err(SoftError::NonzeroDiagonal(i));
        }
        for (j, &b) in row.iter().enumerate() {
            check_velocity(b)?;
            if b != pairwise_beta[j][i] {
                return Err(SoftError::AsymmetricVelocities(i, j));
            }
        }
    }

    let mut sum = 0.0;
    for (i, li) in legs.iter().enumerate() {
        for (j, lj) in legs.iter().enumerate() {
            let ratio = 1.0 + excess_rapidity_ratio(pairwise_beta[i][j]);
            sum += li.charge * lj.charge * f64::from(li.eta * lj.eta) * ratio;
        }
    }
    Ok(-sum / FOUR_PI_SQ)
}

/// Mean number of emitted photons in the window, `μ = A ln(E+/E−)`.
pub fn mean_photons(a: f64, window: &SoftWindow) -> Result<f64, SoftError> {
    if !(a >= 0.0) {
        return Err(SoftError::NegativeFactor(a));
    }
    Ok(a * window.log_ratio())
}

/// Lower threshold `E−` at which the mean reaches `target`, for `a > 0`.
pub fn threshold_for_mean(a: f64, e_plus: f64, target: f64) -> Result<f64, SoftError> {
    if !(a > 0.0) {
        return Err(SoftError::NegativeFactor(a));
    }
    Ok(e_plus * (-target / a).exp())
}

/// `P(N; μ) = μ^N e^{−μ} / N!`.
pub fn poisson_pmf(n: u64, mu: f64) -> Result<f64, SoftError> {
    if !(mu >= 0.0) {
        return Err(SoftError::NegativeMean(mu));
    }
    if mu == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    Ok((n as f64 * mu.ln() - mu - ln_factorial(n)).exp())
}

/// Truncation point `⌈μ + 20√μ + 20⌉` beyond which the pmf tail is negligible.
pub fn poisson_cutoff(mu: f64) -> u64 {
    (mu + 20.0 * mu.sqrt() + 20.0).ceil() as u64
}

/// Probability that at least one emitted photon lands in the detector
/// acceptance, `1 − exp(−μ f)`.
pub fn pollution_probability(mu: f64, config: &PollutionConfig) -> Result<f64, SoftError> {
    if !(mu >= 0.0) {
        return Err(SoftError::NegativeMean(mu));
    }
    Ok(-(-mu * config.solid_angle_fraction).exp_m1())
}

/// Detection report with absorbed-branch pollution folded in.
///
/// `p_d1`/`p_d2` are detector click probabilities including clicks caused
/// by a low-energy photon from a triggered obstruction; the joint terms
/// record those events separately so that
/// `clean_d1 + clean_d2 + p_absorbed = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrectedReport {
    pub p_d1: f64,
    pub p_d2: f64,
    pub p_absorbed: f64,
    pub clean_d1: f64,
    pub clean_d2: f64,
    pub absorbed_with_d1: f64,
    pub absorbed_with_d2: f64,
    pub absorbed_only: f64,
}

/// Share of polluting photons that reach each detector. Both detectors are
/// assumed to subtend the same solid angle.
pub const DETECTOR_SHARE: [f64; 2] = [0.5, 0.5];

pub fn corrected_probabilities(report: &DetectionReport, pollution: f64) -> Result<CorrectedReport, SoftError> {
    if !(0.0..=1.0).contains(&pollution) {
        return Err(SoftError::InvalidPollution(pollution));
    }
    let with_d1 = report.p_absorbed * pollution * DETECTOR_SHARE[0];
    let with_d2 = report.p_absorbed * pollution * DETECTOR_SHARE[1];
    Ok(CorrectedReport {
        p_d1: report.p_d1 + with_d1,
        p_d2: report.p_d2 + with_d2,
        p_absorbed: report.p_absorbed,
        clean_d1: report.p_d1,
        clean_d2: report.p_d2,
        absorbed_with_d1: with_d1,
        absorbed_with_d2: with_d2,
        absorbed_only: report.p_absorbed - with_d1 - with_d2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interferometer::{propagate_analytic, Layout};
    use proptest::prelude::*;

    #[test]
    fn fermion_factor_reference_values() {
        // arctanh(0.5) = ln 3 / 2; A = 2/(4π²) (ln 3 − 1)
        let oracle = 2.0 / FOUR_PI_SQ * (3f64.ln() - 1.0);
        let a = weinberg_factor_fermion(0.5).unwrap();
        assert!((a - oracle).abs() < 1e-16);
        assert!((a - 0.0049958).abs() < 1e-7);

        // arctanh(0.9999) = ln(19999) / 2
        let a = weinberg_factor_fermion(0.9999).unwrap();
        let oracle = 2.0 / FOUR_PI_SQ * (19999f64.ln() / 2.0 / 0.9999 - 1.0);
        assert!((a - oracle).abs() < 1e-14);
        assert!((a - 0.20022).abs() < 1e-5);
        let (_, dropped) = fermion_factor_readings(0.9999).unwrap();
        assert!((dropped - 7.9044).abs() < 1e-3);
    }

    #[test]
    fn fermion_small_velocity_limit() {
        for &b in &[1e-7, 1e-5, 5e-5] {
            let a = weinberg_factor_fermion(b).unwrap();
            let leading = 2.0 / FOUR_PI_SQ * b * b / 3.0;
            assert!((a - leading).abs() <= leading * b * b);
        }
        assert_eq!(weinberg_factor_fermion(0.0).unwrap(), 0.0);
    }

    #[test]
    fn series_and_direct_agree_at_crossover() {
        let b = SERIES_CROSSOVER;
        let direct = 2.0 / FOUR_PI_SQ * (b.atanh() / b - 1.0);
        let series = weinberg_factor_fermion(b * (1.0 - 1e-15)).unwrap();
        assert!((direct - series).abs() < 1e-12);
    }

    #[test]
    fn divergence_and_domain() {
        assert_eq!(weinberg_factor_fermion(1.0), Err(SoftError::Divergent(1.0)));
        assert_eq!(weinberg_factor_fermion(1.5), Err(SoftError::Divergent(1.5)));
        assert!(matches!(weinberg_factor_fermion(-0.1), Err(SoftError::InvalidVelocity(_))));
        assert!(weinberg_factor_fermion(f64::NAN).is_err());
        assert!(SoftError::Divergent(1.0).to_string().contains("divergent for β = 1"));
    }

    #[test]
    fn general_reduces_to_fermion() {
        let legs = [ProcessLeg::new(1.0, -1, 0.0).unwrap(), ProcessLeg::new(1.0, 1, 0.5).unwrap()];
        for i in 0..50 {
            let b = 0.98 * i as f64 / 49.0;
            let m = vec![vec![0.0, b], vec![b, 0.0]];
            let g = weinberg_factor_general(&legs, &m).unwrap();
            let f = weinberg_factor_fermion(b).unwrap();
            assert!((g - f).abs() < 1e-12, "β={b}: {g} vs {f}");
        }
    }

    #[test]
    fn general_hand_sum() {
        // +1 and −1 both outgoing, β = 0.5; term-by-term:
        // (1,1): 1·1·1, (2,2): 1·1·1, (1,2),(2,1): (+1)(−1)(+1)(+1)·arctanh(.5)/.5
        let legs = [ProcessLeg::new(1.0, 1, 0.3).unwrap(), ProcessLeg::new(-1.0, 1, 0.3).unwrap()];
        let m = vec![vec![0.0, 0.5], vec![0.5, 0.0]];
        let cross = 0.5f64.atanh() / 0.5;
        let hand = -(1.0 + 1.0 - 2.0 * cross) / FOUR_PI_SQ;
        assert!((weinberg_factor_general(&legs, &m).unwrap() - hand).abs() < 1e-16);
    }

    #[test]
    fn general_static_charge_conserving_is_zero() {
        let legs = [
            ProcessLeg::new(1.0, -1, 0.0).unwrap(),
            ProcessLeg::new(-1.0, -1, 0.0).unwrap(),
            ProcessLeg::new(1.0, 1, 0.0).unwrap(),
            ProcessLeg::new(-1.0, 1, 0.0).unwrap(),
        ];
        let m = vec![vec![0.0; 4]; 4];
        assert_eq!(weinberg_factor_general(&legs, &m).unwrap(), 0.0);
    }

    #[test]
    fn general_validation() {
        let legs = [ProcessLeg::new(1.0, -1, 0.0).unwrap(), ProcessLeg::new(1.0, 1, 0.0).unwrap()];
        assert_eq!(
            weinberg_factor_general(&legs, &[vec![0.0, 0.3], vec![0.4, 0.0]]),
            Err(SoftError::AsymmetricVelocities(0, 1))
        );
        assert_eq!(
            weinberg_factor_general(&legs, &[vec![0.0, 1.0], vec![1.0, 0.0]]),
            Err(SoftError::Divergent(1.0))
        );
        assert_eq!(
            weinberg_factor_general(&legs, &[vec![0.1, 0.3], vec![0.3, 0.0]]),
            Err(SoftError::NonzeroDiagonal(0))
        );
        assert!(matches!(
            weinberg_factor_general(&legs, &[vec![0.0]]),
            Err(SoftError::VelocityShape { .. })
        ));
        assert_eq!(ProcessLeg::new(1.0, 0, 0.0), Err(SoftError::InvalidDirection(0)));
    }

    #[test]
    fn mean_examples() {
        let w = SoftWindow::new(2.0, 2.0).unwrap();
        assert_eq!(mean_photons(0.7, &w).unwrap(), 0.0);
        let w = SoftWindow::new(1.0, std::f64::consts::E).unwrap();
        assert!((mean_photons(1.0, &w).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(SoftWindow::new(0.0, 1.0), Err(SoftError::InfraredDivergence(0.0)));
        assert!(SoftWindow::new(-1.0, 1.0).unwrap_err().to_string().contains("μ diverges"));
        assert!(matches!(SoftWindow::new(2.0, 1.0), Err(SoftError::InvalidWindow { .. })));
        assert!(mean_photons(-1.0, &SoftWindow::new(1.0, 2.0).unwrap()).is_err());
        let m = EmissionModel::new(0.3, &SoftWindow::new(1e-3, 1.0).unwrap()).unwrap();
        assert!((m.mean - 0.3 * 1000f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn poisson_examples() {
        assert!((poisson_pmf(0, 1.7).unwrap() - (-1.7f64).exp()).abs() < 1e-16);
        // 0.25 e^{-0.5} / 2
        assert!((poisson_pmf(2, 0.5).unwrap() - 0.125 * (-0.5f64).exp()).abs() < 1e-16);
        assert!((poisson_pmf(2, 0.5).unwrap() - 0.075816).abs() < 1e-6);
        assert_eq!(poisson_pmf(0, 0.0).unwrap(), 1.0);
        assert_eq!(poisson_pmf(3, 0.0).unwrap(), 0.0);
        assert_eq!(poisson_pmf(1, -0.1), Err(SoftError::NegativeMean(-0.1)));
    }

    #[test]
    fn pollution_examples() {
        let cfg = PollutionConfig::new(1e-3).unwrap();
        assert_eq!(pollution_probability(0.0, &cfg).unwrap(), 0.0);
        let p = pollution_probability(0.01, &cfg).unwrap();
        assert!((p - 1e-5).abs() < 1e-10);
        let full = PollutionConfig::new(1.0).unwrap();
        assert_eq!(pollution_probability(1e3, &full).unwrap(), 1.0);
        assert!(PollutionConfig::new(0.0).is_err());
        assert!(PollutionConfig::new(1.01).is_err());
    }

    #[test]
    fn corrected_probabilities_cases() {
        let bomb = propagate_analytic(&Layout::square().with_obstruction("lower", 1.0).unwrap()).unwrap();
        let same = corrected_probabilities(&bomb, 0.0).unwrap();
        assert_eq!((same.p_d1, same.p_d2, same.p_absorbed), (bomb.p_d1, bomb.p_d2, bomb.p_absorbed));

        let c = corrected_probabilities(&bomb, 1e-5).unwrap();
        assert!(c.p_d2 - bomb.p_d2 <= 0.5 * 1e-5);
        assert!((c.p_d2 - bomb.p_d2) / bomb.p_d2 < 1e-3);
        assert!((c.clean_d1 + c.clean_d2 + c.p_absorbed - 1.0).abs() < 1e-12);

        let all = corrected_probabilities(&bomb, 1.0).unwrap();
        assert!((all.absorbed_with_d1 + all.absorbed_with_d2 - all.p_absorbed).abs() < 1e-15);
        assert_eq!(all.absorbed_only, 0.0);
        assert!(corrected_probabilities(&bomb, 1.1).is_err());
    }

    proptest! {
        #[test]
        fn halving_threshold_adds_log2(a in 0.0f64..10.0, e_minus in 1e-6f64..1.0) {
            let w1 = SoftWindow::new(e_minus, 1.0).unwrap();
            let w2 = SoftWindow::new(e_minus / 2.0, 1.0).unwrap();
            let d = mean_photons(a, &w2).unwrap() - mean_photons(a, &w1).unwrap();
            prop_assert!((d - a * 2f64.ln()).abs() < 1e-12 * (1.0 + a * 20.0));
        }

        #[test]
        fn fermion_factor_monotone(b1 in 0.0f64..0.999, b2 in 0.0f64..0.999) {
            let (lo, hi) = if b1 <= b2 { (b1, b2) } else { (b2, b1) };
            prop_assert!(weinberg_factor_fermion(lo).unwrap() <= weinberg_factor_fermion(hi).unwrap());
            prop_assert!(weinberg_factor_fermion(lo).unwrap() >= 0.0);
        }

        #[test]
        fn pmf_sums_to_one(mu in 0.0f64..200.0) {
            let cutoff = poisson_cutoff(mu);
            let mut total = 0.0;
            let mut mean = 0.0;
            for n in 0..=cutoff {
                let p = poisson_pmf(n, mu).unwrap();
                prop_assert!(p >= 0.0);
                total += p;
                mean += n as f64 * p;
            }
            prop_assert!((1.0 - total).abs() < 1e-10);
            prop_assert!((mean - mu).abs() < 1e-10 * mu.max(1.0));
        }

        #[test]
        fn pollution_monotone(mu1 in 0.0f64..50.0, mu2 in 0.0f64..50.0, f1 in 1e-6f64..1.0, f2 in 1e-6f64..1.0) {
            let (m_lo, m_hi) = if mu1 <= mu2 { (mu1, mu2) } else { (mu2, mu1) };
            let (f_lo, f_hi) = if f1 <= f2 { (f1, f2) } else { (f2, f1) };
            let p = |m: f64, f: f64| pollution_probability(m, &PollutionConfig::new(f).unwrap()).unwrap();
            prop_assert!(p(m_lo, f_lo) <= p(m_hi, f_lo));
            prop_assert!(p(m_lo, f_lo) <= p(m_lo, f_hi));
        }
    }
}
