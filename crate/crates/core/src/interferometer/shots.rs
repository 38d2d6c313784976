use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{propagate_analytic, Layout, LayoutError};

/// Shots per batch. Each batch owns one ChaCha stream keyed by its index, so
/// the tallies do not depend on how batches are spread across threads.
pub const SHOT_BATCH: u64 = 4096;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ShotCounts {
    pub d1: u64,
    pub d2: u64,
    pub absorbed: u64,
}

impl ShotCounts {
    pub fn total(&self) -> u64 {
        self.d1 + self.d2 + self.absorbed
    }

    fn merge(self, other: Self) -> Self {
        ShotCounts {
            d1: self.d1 + other.d1,
            d2: self.d2 + other.d2,
            absorbed: self.absorbed + other.absorbed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotRun {
    pub counts: ShotCounts,
    pub batches: Vec<ShotCounts>,
}

/// Outcome sampler over (D1, D2, absorbed). Zero-probability outcomes are
/// never drawn, whatever the rounding of the cumulative sums.
struct Outcomes {
    cumulative: [f64; 3],
    last: usize,
}

impl Outcomes {
    fn new(p: [f64; 3]) -> Self {
        let p = p.map(|x| x.max(0.0));
        let total: f64 = p.iter().sum();
        let mut acc = 0.0;
        let cumulative = p.map(|x| {
            acc += x / total;
            acc
        });
        let last = p.iter().rposition(|&x| x > 0.0).unwrap_or(0);
        Outcomes { cumulative, last }
    }

    fn draw(&self, u: f64) -> usize {
        (0..self.last)
            .find(|&i| self.cumulative[i] > u && (i == 0 || self.cumulative[i] > self.cumulative[i - 1]))
            .unwrap_or(self.last)
    }
}

/// Samples `n_shots` single-photon runs from the analytic detection
/// probabilities of `layout`.
pub fn run_shots(layout: &Layout, n_shots: u64, seed: u64) -> Result<ShotRun, LayoutError> {
    let report = propagate_analytic(layout)?;
    let outcomes = Outcomes::new([report.p_d1, report.p_d2, report.p_absorbed]);
    let n_batches = n_shots.div_ceil(SHOT_BATCH);

    let batches: Vec<ShotCounts> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let size = SHOT_BATCH.min(n_shots - b * SHOT_BATCH);
            let mut c = ShotCounts::default();
            for _ in 0..size {
                match outcomes.draw(rng.random::<f64>()) {
                    0 => c.d1 += 1,
                    1 => c.d2 += 1,
                    _ => c.absorbed += 1,
                }
            }
            c
        })
        .collect();

    let counts = batches.iter().copied().fold(ShotCounts::default(), ShotCounts::merge);
    Ok(ShotRun { counts, batches })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_distribution() {
        let run = run_shots(&Layout::square(), 10_000, 3).unwrap();
        assert_eq!(run.counts, ShotCounts { d1: 10_000, d2: 0, absorbed: 0 });
    }

    #[test]
    fn single_shot() {
        let bomb = Layout::square().with_obstruction("lower", 1.0).unwrap();
        for seed in 0..20 {
            let c = run_shots(&bomb, 1, seed).unwrap().counts;
            assert_eq!(c.total(), 1);
            assert_eq!([c.d1, c.d2, c.absorbed].iter().filter(|&&x| x == 1).count(), 1);
        }
    }

    #[test]
    fn batches_sum_to_total() {
        let bomb = Layout::square().with_obstruction("upper", 0.3).unwrap();
        let run = run_shots(&bomb, 10_001, 11).unwrap();
        assert_eq!(run.batches.len(), 3);
        assert_eq!(run.counts.total(), 10_001);
        assert_eq!(run.batches.iter().map(|b| b.total()).sum::<u64>(), 10_001);
    }

    #[test]
    fn sampler_skips_zero_outcomes() {
        let o = Outcomes::new([1.0, 0.0, 0.0]);
        assert_eq!(o.draw(0.0), 0);
        assert_eq!(o.draw(0.999_999_999_999_999_9), 0);
        let o = Outcomes::new([0.25, 0.0, 0.75]);
        assert_eq!(o.draw(0.1), 0);
        assert_eq!(o.draw(0.25), 2);
        assert_eq!(o.draw(0.9), 2);
        let o = Outcomes::new([0.0, 0.5, 0.5]);
        assert_eq!(o.draw(0.0), 1);
    }
}
