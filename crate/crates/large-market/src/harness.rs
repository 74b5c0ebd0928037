//! Seeded, order-independent trial runner.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Stream `index` of the ChaCha8 generator seeded with `master`. Each trial
/// sees the same numbers whatever the thread count or schedule.
pub fn trial_rng(master: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

/// Runs `trials` independent trials in parallel and returns their results in
/// trial order.
pub fn run_trials<T, F>(master: u64, trials: usize, trial: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> T + Sync,
{
    (0..trials as u64).into_par_iter().map(|i| trial(i, &mut trial_rng(master, i))).collect()
}

/// A sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    /// Sample mean and `s / sqrt(n)`; zero error for fewer than two samples.
    pub fn mean(samples: &[f64]) -> Self {
        let n = samples.len();
        if n == 0 {
            return Estimate { value: 0.0, stderr: 0.0 };
        }
        let value = samples.iter().sum::<f64>() / n as f64;
        let stderr = if n < 2 {
            0.0
        } else {
            let var = samples.iter().map(|x| (x - value).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        };
        Estimate { value, stderr }
    }

    /// Frequency of hits with the binomial standard error.
    pub fn proportion(hits: usize, trials: usize) -> Self {
        if trials == 0 {
            return Estimate { value: 0.0, stderr: 0.0 };
        }
        let p = hits as f64 / trials as f64;
        Estimate { value: p, stderr: (p * (1.0 - p) / trials as f64).sqrt() }
    }

    /// Standard errors between the value and zero.
    pub fn sigmas(&self) -> f64 {
        if self.stderr == 0.0 {
            if self.value == 0.0 { 0.0 } else { f64::INFINITY.copysign(self.value) }
        } else {
            self.value / self.stderr
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn results_do_not_depend_on_threads() {
        let draw = |_: u64, rng: &mut ChaCha8Rng| rng.random::<u64>();
        let par = run_trials(9, 64, draw);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let serial = pool.install(|| run_trials(9, 64, draw));
        assert_eq!(par, serial);
        let mut again = trial_rng(9, 5);
        assert_eq!(par[5], again.random::<u64>());
        assert_ne!(par[5], par[6]);
    }

    #[test]
    fn estimates() {
        let e = Estimate::mean(&[1.0, 2.0, 3.0]);
        assert_eq!(e.value, 2.0);
        assert!((e.stderr - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(Estimate::proportion(1, 4).value, 0.25);
        assert_eq!(Estimate::mean(&[]).value, 0.0);
    }
}
