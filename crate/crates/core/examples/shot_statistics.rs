//! Monte Carlo clicks for the blocked interferometer. Pass the shot count and
//! seed as arguments: `cargo run --example shot_statistics -- 100000 7`.

use ifm::{run_shots, Layout};

fn main() {
    let mut args = std::env::args().skip(1);
    let n: u64 = args.next().map_or(100_000, |s| s.parse().expect("shot count"));
    let seed: u64 = args.next().map_or(7, |s| s.parse().expect("seed"));
    let layout = Layout::square().with_obstruction("lower", 1.0).unwrap();
    let run = run_shots(&layout, n, seed).expect("valid shot request");
    let c = run.counts;
    let nf = n as f64;
    for (name, count, p) in [("D1", c.d1, 0.25), ("D2", c.d2, 0.25), ("absorbed", c.absorbed, 0.5)] {
        let sd = (nf * p * (1.0 - p)).sqrt();
        println!("{name:>9}: {count:>8}  expected {:>10.1} ± {sd:.1}  z = {:+.2}", nf * p, (count as f64 - nf * p) / sd);
    }
    println!("{} batches", run.batches.len());
}
