use super::CoalescentHistory;
use crate::error::{domain, Result};
use crate::lambda::{LambdaModel, MergerSampler};
use rand::Rng;
use rand_distr::{Distribution, Exp1};

/// When to stop a simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stop {
    AtOneBlock,
    Horizon(f64),
}

/// Simulates a Λ-coalescent on `n` labels.
pub fn simulate<R: Rng + ?Sized>(
    n: u32,
    model: &LambdaModel,
    stop: Stop,
    rng: &mut R,
) -> Result<CoalescentHistory> {
    let sampler = MergerSampler::new(model, n as u64, 100_000)?;
    simulate_with(&sampler, n, stop, rng)
}

/// Gillespie loop with a prebuilt sampler, so replicates share the rate
/// tables. With `b` blocks: wait `Exp(g(b))`, draw `k` with weight
/// `γ_{b,k}`, merge a uniform `k`-subset of the current blocks.
pub fn simulate_with<R: Rng + ?Sized>(
    sampler: &MergerSampler,
    n: u32,
    stop: Stop,
    rng: &mut R,
) -> Result<CoalescentHistory> {
    if n < 2 {
        return domain("simulate needs n ≥ 2");
    }
    if sampler.n_max() < n as u64 {
        return domain("sampler was built for fewer blocks");
    }
    let horizon = match stop {
        Stop::AtOneBlock => f64::INFINITY,
        Stop::Horizon(h) if h >= 0.0 => h,
        Stop::Horizon(h) => return domain(format!("negative horizon {h}")),
    };
    let mut active: Vec<u32> = (0..n).collect();
    let mut times = Vec::new();
    let mut offsets = vec![0u32];
    let mut children = Vec::new();
    let mut t = 0.0f64;
    let mut next_id = n;
    while active.len() > 1 {
        let b = active.len() as u64;
        let wait: f64 = Exp1.sample(rng);
        let mut tn = t + wait / sampler.total(b);
        if tn > horizon {
            break;
        }
        if tn <= t {
            // Duplicate time from rounding: move up by one ulp.
            tn = f64::from_bits(t.to_bits() + 1);
        }
        t = tn;
        let k = sampler.sample_k(b, rng)? as usize;
        // Partial Fisher-Yates: move k uniform picks to the tail and drain.
        let len = active.len();
        for i in 0..k {
            let j = rng.random_range(0..len - i);
            active.swap(j, len - 1 - i);
        }
        children.extend(active.drain(len - k..));
        active.push(next_id);
        next_id += 1;
        times.push(t);
        offsets.push(children.len() as u32);
    }
    let absorbed = active.len() == 1;
    let final_time = if absorbed { t } else { horizon };
    Ok(CoalescentHistory::from_parts(
        n, final_time, absorbed, times, offsets, children,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn absorbs_and_counts() {
        let m = LambdaModel::beta(1.5).unwrap();
        let mut rng = stream(3, "sim", 0);
        let h = simulate(50, &m, Stop::AtOneBlock, &mut rng).unwrap();
        assert!(h.absorbed);
        assert_eq!(h.block_count(h.final_time).unwrap(), 1);
        let mut prev = u32::MAX;
        for &t in h.event_times() {
            let c = h.block_count(t).unwrap();
            assert!(c < prev);
            prev = c;
        }
    }

    #[test]
    fn zero_horizon_is_empty() {
        let m = LambdaModel::kingman();
        let h = simulate(10, &m, Stop::Horizon(0.0), &mut stream(1, "sim", 0)).unwrap();
        assert_eq!(h.event_count(), 0);
        assert!(!h.absorbed);
    }

    #[test]
    fn n2_mean_time() {
        let m = LambdaModel::kingman();
        let s = MergerSampler::new(&m, 2, 1).unwrap();
        let reps = 10_000;
        let mean: f64 = (0..reps)
            .map(|i| {
                simulate_with(&s, 2, Stop::AtOneBlock, &mut stream(9, "n2", i))
                    .unwrap()
                    .final_time
            })
            .sum::<f64>()
            / reps as f64;
        assert!((mean - 1.0).abs() < 0.05, "{mean}");
    }
}
