//! Low-energy photons from a triggered absorber can fake a click. Shows the
//! emission factor, the mean photon number and how little the blocked
//! interferometer's table moves.

use ifm::soft::{
    corrected_probabilities, fermion_factor_readings, mean_photons, pollution_probability, weinberg_factor_fermion,
    PollutionConfig, SoftWindow, E_SQUARED_HEAVISIDE_LORENTZ,
};
use ifm::{propagate_analytic, Layout};

fn main() {
    let beta = 0.5;
    let a = weinberg_factor_fermion(beta).unwrap();
    let window = SoftWindow::new(1e-3, 1.0).unwrap();
    let mu = mean_photons(a, &window).unwrap();
    let mu_physical = mean_photons(a * E_SQUARED_HEAVISIDE_LORENTZ, &window).unwrap();
    println!("A(β = {beta}) = {a:.7} e²");
    println!("μ = {mu:.6} in units of e², {mu_physical:.3e} with e² = 4π/137.036");

    let pollution = pollution_probability(mu, &PollutionConfig::new(1e-3).unwrap()).unwrap();
    let report = propagate_analytic(&Layout::square().with_obstruction("lower", 1.0).unwrap()).unwrap();
    let c = corrected_probabilities(&report, pollution).unwrap();
    println!("pollution probability {pollution:.3e}");
    println!("p(D1) {} → {}", c.clean_d1, c.p_d1);
    println!("p(D2) {} → {}", c.clean_d2, c.p_d2);

    let (with, without) = fermion_factor_readings(0.9999).unwrap();
    println!("A(0.9999) = {with:.5} e² with the (2π)² denominator, {without:.3} e² without");

    for k in [3, 30, 300] {
        let w = SoftWindow::new(10f64.powi(-k), 1.0).unwrap();
        let mu = mean_photons(a, &w).unwrap();
        let p = pollution_probability(mu, &PollutionConfig::new(1.0).unwrap()).unwrap();
        println!("E- = 1e-{k:<3} μ = {mu:>8.4}  full-acceptance pollution {p:.4}");
    }
}
