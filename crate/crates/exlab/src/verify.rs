//! Invariant suites behind `exlab verify`. Each check reports pass or
//! fail with a short detail line; a panic or error inside a check counts
//! as a failure.

use std::fmt;

use exlab_core::bounds::{
    binomial, classical_ic_lower_bound, compression_error_bound, hoeffding_repetitions, majority_error_exact,
    perturbation_bounds, pjo_info_cost_bound, rectangle_construction_error, rectangle_threshold,
};
use exlab_core::game::{enumerate_inputs, is_win, restrict, strings, subsets};
use exlab_core::linalg::{
    born_probability, inner_product, partial_trace, tensor_product, trace_distance_pure, von_neumann_entropy,
};
use exlab_core::protocols::{
    accuracy_for_zero_error, classical_sim_decode, classical_sim_distribution, compressed_pjo_state,
    compression_error_exact, encoded_len, half_angle_sq, pjo_ensemble_density, pjo_measure, pjo_state,
    quantize_amplitudes, zeta, HammingBallCodec,
};
use exlab_core::{AmplitudeVector, BitString, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ExperimentConfig;
use crate::emit::{read_json, write_csv, write_json, CSV_COLUMNS};
use crate::harness::{exhaustive_check, sampled_check};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    CoreLinalg,
    Game,
    Protocols,
    Bounds,
    Harness,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::CoreLinalg => "core-linalg",
            Suite::Game => "game",
            Suite::Protocols => "protocols",
            Suite::Bounds => "bounds",
            Suite::Harness => "harness",
            Suite::All => "all",
        }
    }
}

/// Optional restriction of the enumerated games to one `n` and/or `m`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Scope {
    pub n: Option<usize>,
    pub m: Option<usize>,
}

impl Scope {
    fn ns(&self, max: usize) -> Vec<usize> {
        match self.n {
            Some(n) => vec![n],
            None => (1..=max).collect(),
        }
    }

    fn ms(&self, n: usize) -> Vec<usize> {
        match self.m {
            Some(m) if m <= n => vec![m],
            Some(_) => vec![],
            None => (1..=n).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {}::{} {}", self.suite, self.name, self.detail)
    }
}

type Outcome = Result<String, String>;

fn run_check(suite: &'static str, name: &'static str, f: impl FnOnce() -> Outcome) -> Check {
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f))
        .unwrap_or_else(|p| Err(format!("panicked: {}", panic_message(&p))));
    match result {
        Ok(detail) => Check { suite, name, passed: true, detail },
        Err(detail) => Check { suite, name, passed: false, detail },
    }
}

fn panic_message(p: &Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<String>()
        .cloned()
        .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "unknown".into())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

fn random_state(t: usize, rng: &mut ChaCha8Rng) -> AmplitudeVector {
    let amps = (0..1usize << t).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    AmplitudeVector::new(t, amps).and_then(|v| v.normalized()).expect("non-zero random state")
}

pub fn run(suite: Suite, scope: Scope) -> Vec<Check> {
    match suite {
        Suite::CoreLinalg => linalg_suite(),
        Suite::Game => game_suite(scope),
        Suite::Protocols => protocols_suite(scope),
        Suite::Bounds => bounds_suite(scope),
        Suite::Harness => harness_suite(),
        Suite::All => [Suite::CoreLinalg, Suite::Game, Suite::Protocols, Suite::Bounds, Suite::Harness]
            .into_iter()
            .flat_map(|s| run(s, scope))
            .collect(),
    }
}

fn linalg_suite() -> Vec<Check> {
    let s = Suite::CoreLinalg.name();
    vec![
        run_check(s, "normalization", || {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            for t in 0..=6 {
                let v = random_state(t, &mut rng);
                ensure(v.dim() == 1 << t && (v.norm_sqr() - 1.0).abs() <= 1e-10, || format!("t={t}"))?;
            }
            Ok("t <= 6".into())
        }),
        run_check(s, "trace_distance_metric", || {
            let mut rng = ChaCha8Rng::seed_from_u64(2);
            for _ in 0..200 {
                let t = rng.random_range(1..=4);
                let (a, b, c) = (random_state(t, &mut rng), random_state(t, &mut rng), random_state(t, &mut rng));
                let ab = trace_distance_pure(&a, &b).map_err(err)?;
                let ba = trace_distance_pure(&b, &a).map_err(err)?;
                let ac = trace_distance_pure(&a, &c).map_err(err)?;
                let cb = trace_distance_pure(&c, &b).map_err(err)?;
                ensure((ab - ba).abs() < 1e-12 && (0.0..=1.0).contains(&ab), || format!("symmetry {ab} {ba}"))?;
                ensure(ab <= ac + cb + 1e-12, || format!("triangle {ab} > {ac} + {cb}"))?;
            }
            Ok("200 random triples".into())
        }),
        run_check(s, "partial_trace_valid", || {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let v = random_state(5, &mut rng);
            for mask in 0u32..32 {
                let keep: Vec<usize> = (1..=5).filter(|i| mask >> (i - 1) & 1 == 1).collect();
                let rho = partial_trace(&v, &keep).map_err(err)?;
                rho.validate().map_err(err)?;
                ensure(rho.eigenvalues().map_err(err)?.iter().all(|&e| e >= -1e-10), || format!("{keep:?}"))?;
            }
            Ok("all 32 subsystems of a 5-qubit state".into())
        }),
        run_check(s, "entropy_additivity", || {
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            for _ in 0..50 {
                let (a, b) = (random_state(2, &mut rng), random_state(2, &mut rng));
                let joint = partial_trace(&tensor_product(&a, &b), &[1, 3]).map_err(err)?;
                let sa = von_neumann_entropy(&partial_trace(&a, &[1]).map_err(err)?).map_err(err)?;
                let sb = von_neumann_entropy(&partial_trace(&b, &[1]).map_err(err)?).map_err(err)?;
                let s = von_neumann_entropy(&joint).map_err(err)?;
                ensure((s - sa - sb).abs() < 1e-8, || format!("{s} != {sa} + {sb}"))?;
            }
            Ok("50 product states".into())
        }),
        run_check(s, "born_rule_completeness", || {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            let v = random_state(3, &mut rng);
            let rho = partial_trace(&v, &[1, 3]).map_err(err)?;
            let total: f64 = strings(2).map(|z| born_probability(&rho, &zeta(&z))).sum::<exlab_core::Result<f64>>().map_err(err)?;
            ensure((total - 1.0).abs() < 1e-10, || format!("sum {total}"))?;
            Ok(format!("sum {total:.12}"))
        }),
    ]
}

fn game_suite(scope: Scope) -> Vec<Check> {
    let s = Suite::Game.name();
    vec![
        run_check(s, "input_count", || {
            for n in scope.ns(8) {
                for m in scope.ms(n) {
                    let count = enumerate_inputs(n, m, 12).map_err(err)?.count();
                    let expected = (binomial(n, m) << n).to_string();
                    ensure(count.to_string() == expected, || format!("n={n} m={m}: {count} != {expected}"))?;
                }
            }
            Ok("2^n C(n,m) pairs".into())
        }),
        run_check(s, "one_losing_answer", || {
            for n in scope.ns(6) {
                for m in scope.ms(n) {
                    for pair in enumerate_inputs(n, m, 12).map_err(err)? {
                        let losing = strings(m)
                            .filter(|z| !is_win(&pair.x, &pair.y, z).expect("sizes match"))
                            .collect::<Vec<_>>();
                        ensure(losing == [pair.restriction()], || format!("{pair:?}"))?;
                    }
                }
            }
            Ok("each input excludes exactly its restriction".into())
        }),
    ]
}

fn protocols_suite(scope: Scope) -> Vec<Check> {
    let s = Suite::Protocols.name();
    vec![
        run_check(s, "zeta_orthonormal", || {
            for m in 1..=6 {
                let basis: Vec<_> = strings(m).map(|z| zeta(&z)).collect();
                for (i, a) in basis.iter().enumerate() {
                    for (j, b) in basis.iter().enumerate() {
                        let ip = inner_product(a, b).map_err(err)?;
                        let want = if i == j { 1.0 } else { 0.0 };
                        ensure((ip - C64::new(want, 0.0)).norm_sqr() < 1e-20, || format!("m={m} ({i},{j})"))?;
                    }
                }
            }
            Ok("m <= 6".into())
        }),
        run_check(s, "pjo_zero_error", || {
            let mut worst = 0.0f64;
            for n in scope.ns(7) {
                for m in scope.ms(n) {
                    for x in strings(n) {
                        let state = pjo_state(&x, m).map_err(err)?;
                        for y in subsets(n, m) {
                            let p = pjo_measure(&state, &y, m).map_err(err)?.prob(&restrict(&x, &y).map_err(err)?);
                            worst = worst.max(p);
                        }
                    }
                }
            }
            ensure(worst <= 1e-10, || format!("max weight on the restriction {worst:e}"))?;
            Ok(format!("max weight on the restriction {worst:e}"))
        }),
        run_check(s, "classical_sim_zero_error", || {
            for n in scope.ns(5) {
                for m in scope.ms(n) {
                    let acc = accuracy_for_zero_error(m, n).map_err(err)?;
                    let threshold = (0.5f64).powi(m as i32);
                    for x in strings(n) {
                        let enc = quantize_amplitudes(&pjo_state(&x, m).map_err(err)?, acc).map_err(err)?;
                        ensure(enc.payload().len() as u128 == encoded_len(n, acc), || "payload length".into())?;
                        for y in subsets(n, m) {
                            let losing = restrict(&x, &y).map_err(err)?;
                            let dist = classical_sim_distribution(&enc, &y).map_err(err)?;
                            ensure(dist.prob(&losing) < threshold, || format!("x={x} y={y}: p' too large"))?;
                            let z = classical_sim_decode(&enc, &y, m).map_err(err)?;
                            ensure(z != losing, || format!("x={x} y={y}: lost"))?;
                        }
                    }
                }
            }
            Ok("thresholded decoder never loses".into())
        }),
        run_check(s, "compressed_consistency", || {
            for n in scope.ns(5) {
                for m in scope.ms(n) {
                    for k in 0..=n {
                        let bound = compression_error_bound(n, m, k).map_err(err)?;
                        for x in strings(n) {
                            let state = compressed_pjo_state(&x, m, k).map_err(err)?;
                            for y in subsets(n, m) {
                                let losing = restrict(&x, &y).map_err(err)?;
                                let rho = partial_trace(&state, y.indices()).map_err(err)?;
                                let via_rho = born_probability(&rho, &zeta(&losing)).map_err(err)?;
                                let exact = compression_error_exact(&x, &y, m, k).map_err(err)?;
                                ensure((via_rho - exact).abs() < 1e-9, || format!("n={n} m={m} k={k} x={x} y={y}"))?;
                                ensure(exact <= bound + 1e-12, || format!("{exact} > bound {bound}"))?;
                            }
                        }
                    }
                }
            }
            Ok("density-matrix route matches and stays below the bound".into())
        }),
        run_check(s, "hamming_ball_codec", || {
            for n in scope.ns(8) {
                for k in 0..=n {
                    let codec = HammingBallCodec::new(n, k).map_err(err)?;
                    let x = BitString::new(n, 0b1011 & ((1 << n) - 1)).map_err(err)?;
                    let state = compressed_pjo_state(&x, 2.min(n), k).map_err(err)?;
                    let small = codec.compress(&state).map_err(err)?;
                    ensure(codec.decompress(&small).map_err(err)? == state, || format!("n={n} k={k}"))?;
                }
            }
            Ok("round trip".into())
        }),
    ]
}

fn bounds_suite(scope: Scope) -> Vec<Check> {
    let s = Suite::Bounds.name();
    vec![
        run_check(s, "half_angle_below_inverse_square", || {
            for m in 2..=10_000usize {
                let (_, s2) = half_angle_sq(m).map_err(err)?;
                ensure(s2 * ((m * m) as f64) < 1.0, || format!("m={m}"))?;
            }
            Ok("m in 2..=10^4".into())
        }),
        run_check(s, "majority_formula_matches_enumeration", || {
            let mut discrepancies = Vec::new();
            for n in scope.ns(13) {
                for m in scope.ms(n).into_iter().filter(|&m| 2 * m <= n) {
                    let e = majority_error_exact(n, m).map_err(err)?;
                    let d = e.discrepancy().expect("enumerated");
                    if n % 2 == 1 {
                        ensure(d.is_zero(), || format!("n={n} m={m}: formula {} enumeration {:?}", e.formula, e.enumerated))?;
                    } else if !d.is_zero() {
                        discrepancies.push(format!("n={n},m={m}:{d}"));
                    }
                }
            }
            Ok(format!("odd n exact; even-n discrepancies [{}]", discrepancies.join(" ")))
        }),
        run_check(s, "rectangle_formula_matches_enumeration", || {
            for n in scope.ns(12) {
                for m in scope.ms(n) {
                    let r = rectangle_construction_error(n, m).map_err(err)?;
                    ensure(r.enumerated.as_ref() == Some(&r.formula), || format!("n={n} m={m}"))?;
                    ensure(r.formula >= rectangle_threshold(n, m), || format!("n={n} m={m} below (n+1)^-m"))?;
                }
            }
            Ok("n <= 12".into())
        }),
        run_check(s, "ic_lower_bound_linear", || {
            let mut min_ratio = f64::INFINITY;
            for n in (4..=12).map(|e| 1usize << e) {
                for alpha in [0.1, 0.25, 0.4] {
                    let m = ((alpha * n as f64).floor() as usize).max(1);
                    min_ratio = min_ratio.min(classical_ic_lower_bound(n, m).map_err(err)? / n as f64);
                }
            }
            ensure(min_ratio > 0.0, || format!("min ratio {min_ratio}"))?;
            Ok(format!("min ratio {min_ratio:.4}"))
        }),
        run_check(s, "info_cost_matches_ensemble_entropy", || {
            for n in scope.ns(6) {
                for m in scope.ms(n) {
                    let rho = pjo_ensemble_density(n, m).map_err(err)?;
                    let s2 = 2.0 * von_neumann_entropy(&rho).map_err(err)?;
                    let formula = pjo_info_cost_bound(n, m).map_err(err)?;
                    ensure((s2 - formula).abs() < 1e-8, || format!("n={n} m={m}: {s2} vs {formula}"))?;
                }
            }
            Ok("within 1e-8".into())
        }),
        run_check(s, "calculator_examples", || {
            ensure(hoeffding_repetitions(0.5, (-2.0f64).exp()).map_err(err)? == 4, || "hoeffding".into())?;
            ensure(perturbation_bounds(4, 0.059).is_err(), || "perturbation precondition".into())?;
            let b = perturbation_bounds(4, 1.0 / 1024.0).map_err(err)?;
            ensure(b.trace_distance == 20.0 / 1024.0 && b.probability == 40.0 / 1024.0, || "perturbation".into())?;
            Ok("hoeffding, perturbation".into())
        }),
    ]
}

fn harness_suite() -> Vec<Check> {
    let s = Suite::Harness.name();
    let config = |mode: &str, name: &str| {
        ExperimentConfig::from_toml(&format!(
            "suite = \"verify\"\nmode = \"{mode}\"\ntrials = 500\nseed = 5\n[game]\nn = 5\nm = 2\n[strategy]\nname = \"{name}\"\n"
        ))
        .map_err(err)
    };
    vec![
        run_check(s, "sampled_determinism", || {
            let c = config("sampled", "random-guess")?;
            ensure(sampled_check(&c).map_err(err)? == sampled_check(&c).map_err(err)?, || "records differ".into())?;
            Ok("same seed, same record".into())
        }),
        run_check(s, "worst_at_least_mean", || {
            for name in ["pjo", "majority", "random-guess", "classical-sim"] {
                let r = exhaustive_check(&config("exhaustive", name)?).map_err(err)?;
                let (w, m) = (r.worst_err.expect("worst").to_f64(), r.mean_err.expect("mean").to_f64());
                ensure(w >= m, || format!("{name}: worst {w} < mean {m}"))?;
            }
            Ok("exhaustive records".into())
        }),
        run_check(s, "emit_round_trip", || {
            let r = exhaustive_check(&config("exhaustive", "majority")?).map_err(err)?;
            let mut json = Vec::new();
            write_json(std::slice::from_ref(&r), &mut json).map_err(err)?;
            ensure(read_json(json.as_slice()).map_err(err)? == [r.clone()], || "json".into())?;
            let mut csv = Vec::new();
            write_csv(&[], &mut csv).map_err(err)?;
            ensure(String::from_utf8_lossy(&csv).trim_end() == CSV_COLUMNS.join(","), || "csv header".into())?;
            Ok("json read-back, csv header".into())
        }),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass_at_small_scope() {
        let checks = run(Suite::All, Scope { n: Some(4), m: None });
        for c in &checks {
            assert!(c.passed, "{c}");
        }
        assert!(checks.len() > 15);
    }

    #[test]
    fn failures_are_caught() {
        let c = run_check("t", "boom", || panic!("bad"));
        assert!(!c.passed && c.detail.contains("bad"));
        assert!(c.to_string().starts_with("FAIL t::boom"));
    }
}
