use std::time::Instant;

use exlab_core::bounds::{
    analytic_tail_bound, classical_ic_lower_bound, classical_message_bits, compressed_qubits, compression_error_bound,
    majority_error_formula, perturbation_bounds, pjo_info_cost_bound,
};
use exlab_core::game::{restrict, strings, subsets};
use exlab_core::protocols::Strategy;
use exlab_core::{BitString, Error as CoreError, ExactRational, InputPair, Subset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Mode, StrategyKind};
use crate::error::{HarnessError, Result};
use crate::record::{BoundEntry, ResultRecord, Value};

/// Largest `n` simulated exhaustively with `2^n`-amplitude states.
pub const QUANTUM_CAP: usize = 10;
/// Largest `n` enumerated exhaustively for strategies without states.
pub const CLASSICAL_CAP: usize = 12;
/// Overrides both caps.
pub const CAP_ENV: &str = "EXLAB_MAX_QUBITS";

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959963984540054;

/// The cap for `kind`, honoring [`CAP_ENV`].
pub fn exhaustive_cap(kind: StrategyKind) -> usize {
    if let Some(cap) = cap_override() {
        return cap;
    }
    if kind.simulates_state() {
        QUANTUM_CAP
    } else {
        CLASSICAL_CAP
    }
}

pub fn cap_override() -> Option<usize> {
    std::env::var(CAP_ENV).ok()?.trim().parse().ok()
}

/// Wilson score interval for `successes` out of `trials` at 95%.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

fn base_record(config: &ExperimentConfig) -> Result<ResultRecord> {
    let params = config.resolved_params()?;
    Ok(ResultRecord {
        suite: config.suite.clone(),
        n: config.game.n,
        m: config.game.m,
        gamma: config.gamma()?,
        strategy: config.strategy.name.as_str().into(),
        param_k: params.k,
        param_r: params.r,
        param_t: params.t,
        cost: None,
        worst_err: None,
        mean_err: None,
        bounds: Vec::new(),
        seed: config.seed,
        trials: None,
        wall_time: None,
    })
}

/// Message size without simulating: qubits or bits.
pub fn formula_cost(config: &ExperimentConfig) -> Result<Option<u128>> {
    let n = config.game.n;
    Ok(match config.strategy.name {
        StrategyKind::Pjo => Some(n as u128),
        StrategyKind::CompressedPjo => Some(compressed_qubits(n, config.cutoff().expect("validated"))?.qubits as u128),
        StrategyKind::ClassicalSim if n < 100 => {
            Some(classical_message_bits(n, config.accuracy()?.expect("accuracy")))
        }
        StrategyKind::Amplified => {
            let qubits = compressed_qubits(n, config.cutoff().expect("validated"))?.qubits as usize;
            if qubits < 100 {
                Some(classical_message_bits(qubits, config.accuracy()?.expect("accuracy")))
            } else {
                None
            }
        }
        StrategyKind::ClassicalSim => None,
        StrategyKind::Majority => Some(1),
        StrategyKind::RandomGuess => Some(0),
    })
}

/// Bounds that apply to the configured strategy.
pub fn bound_values(config: &ExperimentConfig) -> Result<Vec<BoundEntry>> {
    let (n, m) = (config.game.n, config.game.m);
    let mut out = Vec::new();
    match config.strategy.name {
        StrategyKind::Pjo => out.push(BoundEntry::new("pjo_info_cost_bound", pjo_info_cost_bound(n, m)?)),
        StrategyKind::CompressedPjo | StrategyKind::Amplified => {
            let k = config.cutoff().expect("validated");
            out.push(BoundEntry::new("compression_error_bound", compression_error_bound(n, m, k)?));
            match analytic_tail_bound(n, m, k) {
                Ok(v) => out.push(BoundEntry::new("analytic_tail_bound", v)),
                Err(CoreError::BoundNotApplicable { .. } | CoreError::InvalidParameter(_))
                | Err(CoreError::PreconditionViolated(_)) => {}
                Err(e) => return Err(e.into()),
            }
            out.push(BoundEntry::new("compressed_qubits_log2", compressed_qubits(n, k)?.log2));
        }
        StrategyKind::ClassicalSim => {
            let acc = config.accuracy()?.expect("accuracy");
            if n < 63 {
                let l = 1usize << n;
                if let Ok(p) = perturbation_bounds(l, acc.value()) {
                    out.push(BoundEntry::new("perturbation_probability_bound", p.probability));
                }
            }
            out.push(BoundEntry::new("uniform_threshold", ExactRational::pow2_neg(m as u32)));
        }
        StrategyKind::Majority => {
            out.push(BoundEntry::new("majority_error_formula", majority_error_formula(n, m)?));
            out.push(BoundEntry::new("classical_ic_lower_bound", classical_ic_lower_bound(n, m)?));
        }
        StrategyKind::RandomGuess => out.push(BoundEntry::new("random_guess_error", ExactRational::pow2_neg(m as u32))),
    }
    Ok(out)
}

/// Runs the configured mode once; any sweep section is ignored.
pub fn run(config: &ExperimentConfig) -> Result<ResultRecord> {
    match config.mode {
        Mode::Exhaustive => exhaustive_check(config),
        Mode::Sampled => sampled_check(config),
        Mode::Bounds => bounds_only(config),
    }
}

pub fn bounds_only(config: &ExperimentConfig) -> Result<ResultRecord> {
    let mut record = base_record(config)?;
    record.cost = formula_cost(config)?;
    record.bounds = bound_values(config)?;
    Ok(record)
}

#[derive(Default)]
struct Tally {
    sum: f64,
    worst: f64,
    losses: u64,
    count: u64,
    deterministic: bool,
}

fn tally_input(strategy: &dyn Strategy, x: &BitString, ys: &[Subset], seed: u64) -> Result<Tally> {
    let message = strategy.encode(x)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ x.value());
    let mut t = Tally { deterministic: true, ..Tally::default() };
    for y in ys {
        let excluded = restrict(x, y)?;
        let p = match strategy.output_distribution(&message, y)? {
            Some(dist) => dist.prob(&excluded),
            None => f64::from(u8::from(strategy.decode(&message, y, &mut rng)? == excluded)),
        };
        t.deterministic &= p == 0.0 || p == 1.0;
        t.losses += u64::from(p == 1.0);
        t.sum += p;
        t.worst = t.worst.max(p);
        t.count += 1;
    }
    Ok(t)
}

/// Runs the strategy on every `(x, y)`. Errors are exact probabilities
/// when the strategy exposes its output distribution; exact rationals
/// when every input is won or lost with certainty.
pub fn exhaustive_check(config: &ExperimentConfig) -> Result<ResultRecord> {
    let game = config.game()?;
    let (n, m) = (game.n(), game.m());
    let cap = exhaustive_cap(config.strategy.name);
    if n > cap {
        return Err(HarnessError::CapExceeded { n, cap });
    }
    let strategy = config.build_strategy()?;
    let ys: Vec<Subset> = subsets(n, m).collect();
    let xs: Vec<BitString> = strings(n).collect();
    let tallies: Vec<Tally> = xs
        .par_iter()
        .map(|x| tally_input(strategy.as_ref(), x, &ys, config.seed))
        .collect::<Result<_>>()?;

    let mut total = Tally { deterministic: true, ..Tally::default() };
    for t in &tallies {
        total.sum += t.sum;
        total.worst = total.worst.max(t.worst);
        total.losses += t.losses;
        total.count += t.count;
        total.deterministic &= t.deterministic;
    }
    let mut record = base_record(config)?;
    record.cost = Some(strategy.encode(&BitString::zeros(n))?.cost() as u128);
    if total.deterministic {
        record.worst_err = Some(Value::Exact(ExactRational::from_integer(u8::from(total.losses > 0))));
        record.mean_err = Some(Value::Exact(ExactRational::new(total.losses, total.count)));
    } else {
        record.worst_err = Some(Value::Float(total.worst));
        record.mean_err = Some(Value::Float(total.sum / total.count as f64));
    }
    record.bounds = bound_values(config)?;
    Ok(record)
}

fn random_input(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Result<InputPair> {
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let x = BitString::new(n, rng.random::<u64>() & mask)?;
    let positions: Vec<usize> = rand::seq::index::sample(rng, n, m).into_iter().map(|i| i + 1).collect();
    Ok(InputPair::new(x, Subset::new(n, positions)?)?)
}

/// Runs the strategy on `trials` uniform `(x, y)` pairs drawn from a
/// generator seeded with `seed`, reporting the empirical error and its
/// Wilson 95% interval.
pub fn sampled_check(config: &ExperimentConfig) -> Result<ResultRecord> {
    let game = config.game()?;
    let (n, m) = (game.n(), game.m());
    let strategy = config.build_strategy()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut losses = 0u64;
    let mut cost = 0usize;
    for _ in 0..config.trials {
        let pair = random_input(n, m, &mut rng)?;
        let run = strategy.run(&pair, &mut rng)?;
        losses += u64::from(!run.won);
        cost = cost.max(run.cost);
    }
    let (lo, hi) = wilson_interval(losses, config.trials);
    let mut record = base_record(config)?;
    record.cost = Some(cost as u128);
    record.mean_err = Some(Value::Float(losses as f64 / config.trials as f64));
    record.trials = Some(config.trials);
    record.bounds = bound_values(config)?;
    record.bounds.push(BoundEntry::new("wilson95_lower", lo));
    record.bounds.push(BoundEntry::new("wilson95_upper", hi));
    Ok(record)
}

/// One record per grid point, in grid order. Point `i` runs with seed
/// `seed ⊕ i`.
pub fn sweep(config: &ExperimentConfig, timing: bool) -> Result<Vec<ResultRecord>> {
    let spec = config.sweep.as_ref().ok_or_else(|| HarnessError::Config("config has no [sweep] section".into()))?;
    if spec.values.is_empty() {
        return Err(HarnessError::Config("sweep grid is empty".into()));
    }
    let points: Vec<ExperimentConfig> = spec
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut c = config.with_parameter(spec.parameter, v, spec.m_rule)?;
            c.seed = config.seed ^ i as u64;
            Ok(c)
        })
        .collect::<Result<_>>()?;
    points.par_iter().map(|c| if timing { run_timed(c) } else { run(c) }).collect()
}

/// [`run`], recording wall time.
pub fn run_timed(config: &ExperimentConfig) -> Result<ResultRecord> {
    let start = Instant::now();
    let mut record = run(config)?;
    record.wall_time = Some(start.elapsed().as_secs_f64());
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(strategy: &str, n: usize, m: usize, extra: &str) -> ExperimentConfig {
        let text = format!(
            "suite = \"t\"\nseed = 11\n{extra}\n[game]\nn = {n}\nm = {m}\n[strategy]\nname = \"{strategy}\"\n"
        );
        ExperimentConfig::from_toml(&text).unwrap()
    }

    #[test]
    fn pjo_and_classical_sim_never_lose() {
        for name in ["pjo", "classical-sim"] {
            let r = exhaustive_check(&config(name, 6, 3, "")).unwrap();
            assert!(r.worst_err.unwrap().to_f64() <= 1e-10, "{name}");
        }
        let r = exhaustive_check(&config("classical-sim", 6, 3, "")).unwrap();
        assert_eq!(r.worst_err, Some(Value::Exact(ExactRational::zero())));
        assert_eq!(r.cost, Some(128 * 15));
    }

    #[test]
    fn majority_reports_enumeration_and_formula() {
        let r = exhaustive_check(&config("majority", 4, 2, "")).unwrap();
        assert_eq!(r.mean_err, Some(Value::Exact(ExactRational::new(1, 16))));
        assert_eq!(r.bound("majority_error_formula"), Some(&Value::Exact(ExactRational::new(1, 8))));
        let r = exhaustive_check(&config("majority", 5, 2, "")).unwrap();
        assert_eq!(r.mean_err.as_ref().and_then(Value::as_exact), r.bound("majority_error_formula").and_then(Value::as_exact));
        assert!(r.worst_err.unwrap().to_f64() >= r.mean_err.unwrap().to_f64());
    }

    #[test]
    fn cap_is_enforced() {
        let mut c = config("pjo", 10, 2, "");
        c.game.n = 11;
        if cap_override().is_none() {
            assert!(matches!(exhaustive_check(&c), Err(HarnessError::CapExceeded { n: 11, cap: 10 })));
        }
    }

    #[test]
    fn random_guess_sampled_rate() {
        let c = config("random-guess", 8, 2, "mode = \"sampled\"\ntrials = 100000");
        let r = sampled_check(&c).unwrap();
        let err = r.mean_err.as_ref().unwrap().to_f64();
        assert!((err - 0.25).abs() < 0.01, "{err}");
        assert_eq!(sampled_check(&c).unwrap(), r);
    }

    #[test]
    fn pjo_sampled_is_error_free() {
        let c = config("pjo", 9, 4, "mode = \"sampled\"\ntrials = 10000");
        let r = sampled_check(&c).unwrap();
        assert_eq!(r.mean_err, Some(Value::Float(0.0)));
    }

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.03699).abs() < 1e-4);
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.4038).abs() < 1e-4 && (hi - 0.5962).abs() < 1e-4);
    }

    #[test]
    fn sweep_preserves_order_and_seeds() {
        let text = "suite = \"t\"\nseed = 11\n[game]\nn = 6\nm = 2\n[strategy]\nname = \"compressed-pjo\"\nk = 0\n";
        let mut c = ExperimentConfig::from_toml(text).unwrap();
        c.sweep = Some(crate::config::SweepSpec {
            parameter: crate::config::SweepParameter::K,
            values: vec![0.0, 1.0, 2.0, 6.0],
            m_rule: None,
        });
        let records = sweep(&c, false).unwrap();
        let ks: Vec<_> = records.iter().map(|r| r.param_k.unwrap()).collect();
        assert_eq!(ks, [0, 1, 2, 6]);
        let seeds: Vec<_> = records.iter().map(|r| r.seed).collect();
        assert_eq!(seeds, [11, 10, 9, 8]);
        let errs: Vec<f64> = records.iter().map(|r| r.mean_err.as_ref().unwrap().to_f64()).collect();
        assert!(errs.windows(2).all(|w| w[1] <= w[0]));
        assert!(errs[3] <= 1e-10);
    }
}
