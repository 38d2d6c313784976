//! Balanced interferometer: every photon reaches D1, D2 stays dark.

use ifm::interferometer::DetectorId;
use ifm::{propagate_analytic, Layout};

fn main() {
    let layout = Layout::square();
    let r = propagate_analytic(&layout).expect("square layout propagates");
    println!("p(D1) = {:.15}", r.p_d1);
    println!("p(D2) = {:.3e}", r.p_d2);
    let a = r.relative_amplitude(DetectorId::D1);
    println!("D1 amplitude relative to the source: {:+.15} {:+.3e}i", a.re, a.im);
}
