//! Lengthening one arm moves the interferometer through bright and dark
//! fringes. Prints CSV.

use ifm::interferometer::fringe_scan;
use ifm::Layout;

fn main() {
    let points = fringe_scan(&Layout::square(), 0.0, 4.0 * std::f64::consts::PI, 33).expect("valid scan");
    println!("delta_l,p_d1,p_d2");
    for p in points {
        println!("{},{},{}", p.delta_l, p.p_d1, p.p_d2);
    }
}
