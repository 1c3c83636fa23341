//! Experiment configuration, read from TOML.
//!
//! ```toml
//! suite = "compression"
//! mode = "exhaustive"        # exhaustive | sampled | bounds
//! trials = 10000             # sampled mode only
//! seed = 7
//!
//! [game]
//! n = 10
//! m = 4
//! gamma = "0/1"
//!
//! [strategy]
//! name = "compressed-pjo"
//! k = 3
//!
//! [sweep]
//! parameter = "k"
//! values = [0, 1, 2, 3]
//! ```

use std::path::Path;

use exlab_core::bounds::compressed_qubits;
use exlab_core::protocols::{
    accuracy_for_zero_error, AmplifiedStrategy, ClassicalSimStrategy, CompressedPjoStrategy, DyadicAccuracy,
    MajorityStrategy, PjoStrategy, RandomGuessStrategy, Strategy,
};
use exlab_core::{ExactRational, GameInstance};
use serde::{Deserialize, Serialize};

use crate::emit::Format;
use crate::error::{HarnessError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: String,
    #[serde(default)]
    pub mode: Mode,
    pub game: GameSpec,
    pub strategy: StrategySpec,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_path: Option<String>,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

fn default_trials() -> u64 {
    10_000
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Exhaustive,
    Sampled,
    /// Evaluate the strategy's bounds without simulating it.
    Bounds,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSpec {
    pub n: usize,
    pub m: usize,
    #[serde(default = "zero_gamma")]
    pub gamma: String,
}

fn zero_gamma() -> String {
    "0/1".into()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    Pjo,
    CompressedPjo,
    ClassicalSim,
    Amplified,
    Majority,
    RandomGuess,
}

impl StrategyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pjo => "pjo",
            Self::CompressedPjo => "compressed-pjo",
            Self::ClassicalSim => "classical-sim",
            Self::Amplified => "amplified",
            Self::Majority => "majority",
            Self::RandomGuess => "random-guess",
        }
    }

    /// Whether running the strategy needs a `2^n`-amplitude state vector.
    pub fn simulates_state(self) -> bool {
        !matches!(self, Self::Majority | Self::RandomGuess)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategySpec {
    pub name: StrategyKind,
    /// Hamming-weight cutoff.
    #[serde(default)]
    pub k: Option<usize>,
    /// Fraction bits of the amplitude quantization.
    #[serde(default)]
    pub r: Option<u32>,
    /// Resampling rounds.
    #[serde(default)]
    pub t: Option<u64>,
    /// Cutoff exponent: `k = ⌈m^{1+η}⌉`, capped at `n`.
    #[serde(default)]
    pub eta: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParameter {
    N,
    M,
    K,
    R,
    T,
    Eta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MRule {
    /// `m = ⌈√(n log₂ n)⌉`.
    SqrtNLogN,
}

impl MRule {
    pub fn apply(self, n: usize) -> usize {
        match self {
            Self::SqrtNLogN => {
                let nf = n as f64;
                ((nf * nf.log2()).sqrt().ceil() as usize).clamp(1, n.max(1))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    /// Recompute `m` from `n` at each grid point.
    #[serde(default)]
    pub m_rule: Option<MRule>,
}

/// Strategy parameters after defaults are filled in.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ResolvedParams {
    pub k: Option<usize>,
    pub r: Option<u32>,
    pub t: Option<u64>,
}

fn invalid(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn gamma(&self) -> Result<ExactRational> {
        self.game.gamma.parse().map_err(|_| invalid(format!("gamma {:?} is not p/q", self.game.gamma)))
    }

    pub fn game(&self) -> Result<GameInstance> {
        Ok(GameInstance::new(self.game.n, self.game.m, self.gamma()?)?)
    }

    /// Checks the game and every strategy parameter before anything runs.
    /// Bounds-only runs may use `n` beyond what can be simulated.
    pub fn validate(&self) -> Result<()> {
        let (n, m) = (self.game.n, self.game.m);
        let gamma = self.gamma()?;
        if m == 0 || m > n {
            return Err(invalid(format!("need 1 <= m <= n, got n = {n}, m = {m}")));
        }
        if gamma.is_negative() || gamma >= ExactRational::one() {
            return Err(invalid("need 0 <= gamma < 1"));
        }
        if self.mode != Mode::Bounds {
            self.game()?;
        }
        let s = &self.strategy;
        let name = s.name.as_str();
        let allowed: &[&str] = match s.name {
            StrategyKind::Pjo | StrategyKind::Majority | StrategyKind::RandomGuess => &[],
            StrategyKind::CompressedPjo => &["k", "eta"],
            StrategyKind::ClassicalSim => &["r"],
            StrategyKind::Amplified => &["k", "eta", "r", "t"],
        };
        let given = [("k", s.k.is_some()), ("r", s.r.is_some()), ("t", s.t.is_some()), ("eta", s.eta.is_some())];
        for (param, present) in given {
            if present && !allowed.contains(&param) {
                return Err(invalid(format!("strategy {name} takes no parameter {param}")));
            }
        }
        if matches!(s.name, StrategyKind::CompressedPjo | StrategyKind::Amplified) {
            match (s.k, s.eta) {
                (Some(_), Some(_)) => return Err(invalid("give either k or eta, not both")),
                (None, None) => return Err(invalid(format!("strategy {name} needs k or eta"))),
                (Some(k), None) if k > n => return Err(invalid(format!("k = {k} exceeds n = {n}"))),
                (None, Some(eta)) if !(eta >= 0.0 && eta.is_finite()) => {
                    return Err(invalid("eta must be a finite non-negative number"))
                }
                _ => {}
            }
        }
        if let Some(r) = s.r {
            DyadicAccuracy::from_bits(r)?;
        }
        if s.name == StrategyKind::Amplified && !matches!(s.t, Some(t) if t >= 1) {
            return Err(invalid("strategy amplified needs t >= 1"));
        }
        if self.mode == Mode::Sampled && self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(invalid("sweep grid is empty"));
            }
            if sweep.m_rule.is_some() && sweep.parameter != SweepParameter::N {
                return Err(invalid("m_rule applies only to a sweep over n"));
            }
            for &v in &sweep.values {
                self.with_parameter(sweep.parameter, v, sweep.m_rule)?;
            }
        }
        Ok(())
    }

    /// A copy with one parameter replaced, revalidated.
    pub fn with_parameter(&self, parameter: SweepParameter, value: f64, m_rule: Option<MRule>) -> Result<Self> {
        let integer = || -> Result<u64> {
            if value >= 0.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
                Ok(value as u64)
            } else {
                Err(invalid(format!("{parameter:?} must be a non-negative integer, got {value}")))
            }
        };
        let mut next = self.clone();
        next.sweep = None;
        match parameter {
            SweepParameter::N => {
                next.game.n = integer()? as usize;
                if let Some(rule) = m_rule {
                    next.game.m = rule.apply(next.game.n);
                }
            }
            SweepParameter::M => next.game.m = integer()? as usize,
            SweepParameter::K => {
                next.strategy.k = Some(integer()? as usize);
                next.strategy.eta = None;
            }
            SweepParameter::R => next.strategy.r = Some(integer()? as u32),
            SweepParameter::T => next.strategy.t = Some(integer()?),
            SweepParameter::Eta => {
                next.strategy.eta = Some(value);
                next.strategy.k = None;
            }
        }
        next.validate()?;
        Ok(next)
    }

    /// Hamming-weight cutoff, resolving `η` when given.
    pub fn cutoff(&self) -> Option<usize> {
        let n = self.game.n;
        match (self.strategy.k, self.strategy.eta) {
            (Some(k), _) => Some(k),
            (None, Some(eta)) => {
                let k = (self.game.m as f64).powf(1.0 + eta).ceil();
                Some(if k >= n as f64 { n } else { k as usize })
            }
            (None, None) => None,
        }
    }

    /// Quantization accuracy actually used by the strategy.
    pub fn accuracy(&self) -> Result<Option<DyadicAccuracy>> {
        let (n, m) = (self.game.n, self.game.m);
        match self.strategy.name {
            StrategyKind::ClassicalSim => Ok(Some(match self.strategy.r {
                Some(r) => DyadicAccuracy::from_bits(r)?,
                None => accuracy_for_zero_error(m, n)?,
            })),
            StrategyKind::Amplified => {
                let k = self.cutoff().expect("validated");
                let qubits = compressed_qubits(n, k)?.qubits.max(1) as usize;
                Ok(Some(match self.strategy.r {
                    Some(r) => DyadicAccuracy::from_bits(r)?,
                    None => accuracy_for_zero_error(m, qubits)?,
                }))
            }
            _ => Ok(None),
        }
    }

    pub fn resolved_params(&self) -> Result<ResolvedParams> {
        Ok(ResolvedParams {
            k: self.cutoff(),
            r: self.accuracy()?.map(|a| a.fraction_bits()),
            t: self.strategy.t,
        })
    }

    pub fn build_strategy(&self) -> Result<Box<dyn Strategy>> {
        let (n, m) = (self.game.n, self.game.m);
        Ok(match self.strategy.name {
            StrategyKind::Pjo => Box::new(PjoStrategy::new(m)?),
            StrategyKind::CompressedPjo => Box::new(CompressedPjoStrategy::new(n, m, self.cutoff().expect("validated"))?),
            StrategyKind::ClassicalSim => Box::new(ClassicalSimStrategy::new(m, self.accuracy()?)?),
            StrategyKind::Amplified => {
                let source = CompressedPjoStrategy::new(n, m, self.cutoff().expect("validated"))?;
                let accuracy = self.accuracy()?.expect("amplified has an accuracy");
                Box::new(AmplifiedStrategy::new(source, accuracy, self.strategy.t.expect("validated"))?)
            }
            StrategyKind::Majority => Box::new(MajorityStrategy::new(m)?),
            StrategyKind::RandomGuess => Box::new(RandomGuessStrategy::new(m)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
suite = "demo"
seed = 3

[game]
n = 6
m = 3

[strategy]
name = "compressed-pjo"
k = 2
"#;

    #[test]
    fn parses_and_defaults() {
        let c = ExperimentConfig::from_toml(BASE).unwrap();
        assert_eq!(c.mode, Mode::Exhaustive);
        assert_eq!(c.trials, 10_000);
        assert_eq!(c.game().unwrap().gamma(), &ExactRational::zero());
        assert_eq!(c.resolved_params().unwrap(), ResolvedParams { k: Some(2), r: None, t: None });
    }

    #[test]
    fn rejects_parameters_foreign_to_the_strategy() {
        let text = BASE.replace("compressed-pjo", "pjo");
        assert!(matches!(ExperimentConfig::from_toml(&text), Err(HarnessError::Config(_))));
        let text = BASE.replace("k = 2", "k = 7");
        assert!(ExperimentConfig::from_toml(&text).is_err());
        let text = BASE.replace("k = 2", "");
        assert!(ExperimentConfig::from_toml(&text).is_err());
        let text = BASE.replace("k = 2", "k = 2\nbogus = 1");
        assert!(matches!(ExperimentConfig::from_toml(&text), Err(HarnessError::Toml(_))));
    }

    #[test]
    fn gamma_must_be_rational() {
        let text = BASE.replace("m = 3", "m = 3\ngamma = \"0.1\"");
        assert!(ExperimentConfig::from_toml(&text).is_err());
        let text = BASE.replace("m = 3", "m = 3\ngamma = \"1/343\"");
        let c = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(c.game().unwrap().gamma(), &ExactRational::new(1, 343));
    }

    #[test]
    fn eta_resolves_cutoff() {
        let text = BASE.replace("k = 2", "eta = 0.5");
        let c = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(c.cutoff(), Some(6));
        let c = c.with_parameter(SweepParameter::Eta, 0.0, None).unwrap();
        assert_eq!(c.cutoff(), Some(3));
    }

    #[test]
    fn sweep_values_are_checked() {
        let text = format!("{BASE}\n[sweep]\nparameter = \"k\"\nvalues = [0, 1, 9]\n");
        assert!(ExperimentConfig::from_toml(&text).is_err());
        let text = format!("{BASE}\n[sweep]\nparameter = \"k\"\nvalues = []\n");
        assert!(ExperimentConfig::from_toml(&text).is_err());
        let text = format!("{BASE}\n[sweep]\nparameter = \"n\"\nvalues = [6, 8]\nm_rule = \"sqrt-n-log-n\"\n");
        let c = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(c.with_parameter(SweepParameter::N, 16.0, Some(MRule::SqrtNLogN)).unwrap().game.m, 8);
    }

    #[test]
    fn amplified_defaults_accuracy_to_message_size() {
        let text = BASE.replace("compressed-pjo", "amplified").replace("k = 2", "k = 2\nt = 5");
        let c = ExperimentConfig::from_toml(&text).unwrap();
        // 1 + 6 + 15 = 22 basis strings fit in 5 qubits.
        assert_eq!(c.accuracy().unwrap(), Some(accuracy_for_zero_error(3, 5).unwrap()));
        assert!(ExperimentConfig::from_toml(&text.replace("t = 5", "")).is_err());
    }
}
