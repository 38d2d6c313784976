//! An absorber in one arm opens the dark port. Sweeps the absorber
//! efficiency and prints the three outcome probabilities.

use ifm::{propagate_analytic, Layout};

fn main() {
    let base = Layout::square();
    println!("{:>10} {:>10} {:>10} {:>10}", "efficiency", "p_d1", "p_d2", "absorbed");
    for step in 0..=10 {
        let e = step as f64 / 10.0;
        let layout = base.with_obstruction("lower", e).expect("valid efficiency");
        let r = propagate_analytic(&layout).expect("layout propagates");
        println!("{e:>10.1} {:>10.6} {:>10.6} {:>10.6}", r.p_d1, r.p_d2, r.p_absorbed);
    }
    let r = propagate_analytic(&base.with_obstruction("lower", 1.0).unwrap()).unwrap();
    for ev in &r.events {
        println!("absorbed on {} at {:?} with weight {}", ev.arm, ev.position.as_slice(), ev.absorbed_weight);
    }
}
