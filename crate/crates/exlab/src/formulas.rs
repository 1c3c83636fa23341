use exlab_core::bounds::{
    a_k, a_k_complement, analytic_tail_bound, classical_ic_lower_bound, classical_message_bits, compressed_qubits,
    compression_error_bound, hoeffding_repetitions, majority_error_exact, perturbation_bounds, pjo_info_cost_bound,
    rectangle_construction_error, rectangle_threshold,
};
use exlab_core::protocols::{accuracy_for_amplification, accuracy_for_zero_error, theta, DyadicAccuracy};
use exlab_core::ExactRational;

use crate::error::{HarnessError, Result};
use crate::record::{BoundEntry, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Formula {
    Theta,
    Ak,
    AkComplement,
    CompressionError,
    AnalyticTail,
    CompressedQubits,
    MajorityError,
    IcLowerBound,
    RectangleError,
    RectangleThreshold,
    PjoInfoCost,
    Perturbation,
    Hoeffding,
    MessageBits,
    ZeroErrorAccuracy,
    AmplificationAccuracy,
}

#[derive(Clone, Debug, Default)]
pub struct FormulaArgs {
    pub n: usize,
    pub m: usize,
    pub k: Option<usize>,
    pub gamma: Option<ExactRational>,
    pub r: Option<u32>,
    /// Qubit count for message-size formulas; defaults to `n`.
    pub qubits: Option<usize>,
    pub l: Option<usize>,
    pub epsilon: Option<f64>,
    pub gap: Option<f64>,
    pub tau: Option<f64>,
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| HarnessError::Config(format!("this formula needs --{flag}")))
}

/// Evaluates `formula` into named values.
pub fn evaluate(formula: Formula, a: &FormulaArgs) -> Result<Vec<BoundEntry>> {
    let (n, m) = (a.n, a.m);
    let one = |name: &str, v: Value| Ok(vec![BoundEntry { name: name.into(), value: v }]);
    match formula {
        Formula::Theta => one("theta", theta(m)?.into()),
        Formula::Ak => one("a_k", a_k(n, m, need(a.k, "k")?)?.to_f64().into()),
        Formula::AkComplement => one("a_k_complement", a_k_complement(n, m, need(a.k, "k")?)?.to_f64().into()),
        Formula::CompressionError => one("compression_error_bound", compression_error_bound(n, m, need(a.k, "k")?)?.into()),
        Formula::AnalyticTail => one("analytic_tail_bound", analytic_tail_bound(n, m, need(a.k, "k")?)?.into()),
        Formula::CompressedQubits => {
            let c = compressed_qubits(n, need(a.k, "k")?)?;
            Ok(vec![
                BoundEntry::new("compressed_basis_states", ExactRational::from_biguints(c.basis_states, 1u32.into())),
                BoundEntry::new("compressed_qubits_log2", c.log2),
                BoundEntry::new("compressed_qubits", ExactRational::from_integer(c.qubits)),
            ])
        }
        Formula::MajorityError => {
            let e = majority_error_exact(n, m)?;
            let mut out = vec![BoundEntry::new("majority_error_formula", e.formula.clone())];
            if let Some(d) = e.discrepancy() {
                out.push(BoundEntry::new("majority_error_enumerated", e.enumerated.expect("enumerated")));
                out.push(BoundEntry::new("majority_error_discrepancy", d));
            }
            Ok(out)
        }
        Formula::IcLowerBound => one("classical_ic_lower_bound", classical_ic_lower_bound(n, m)?.into()),
        Formula::RectangleError => {
            let r = rectangle_construction_error(n, m)?;
            let mut out = vec![BoundEntry::new("rectangle_error_formula", r.formula)];
            if let Some(e) = r.enumerated {
                out.push(BoundEntry::new("rectangle_error_enumerated", e));
            }
            Ok(out)
        }
        Formula::RectangleThreshold => one("rectangle_threshold", rectangle_threshold(n, m).into()),
        Formula::PjoInfoCost => one("pjo_info_cost_bound", pjo_info_cost_bound(n, m)?.into()),
        Formula::Perturbation => {
            let b = perturbation_bounds(need(a.l, "l")?, need(a.epsilon, "epsilon")?)?;
            Ok(vec![
                BoundEntry::new("perturbation_trace_distance", b.trace_distance),
                BoundEntry::new("perturbation_probability", b.probability),
            ])
        }
        Formula::Hoeffding => {
            let t = hoeffding_repetitions(need(a.gap, "gap")?, need(a.tau, "tau")?)?;
            one("hoeffding_repetitions", ExactRational::from_integer(t).into())
        }
        Formula::MessageBits => {
            let acc = DyadicAccuracy::from_bits(need(a.r, "r")?)?;
            let bits = classical_message_bits(a.qubits.unwrap_or(n), acc);
            one("classical_message_bits", ExactRational::from_integer(bits).into())
        }
        Formula::ZeroErrorAccuracy => {
            let acc = accuracy_for_zero_error(m, a.qubits.unwrap_or(n))?;
            one("accuracy_fraction_bits", ExactRational::from_integer(acc.fraction_bits()).into())
        }
        Formula::AmplificationAccuracy => {
            let gamma = a.gamma.clone().ok_or_else(|| HarnessError::Config("this formula needs --gamma".into()))?;
            let acc = accuracy_for_amplification(m, &gamma, a.qubits.unwrap_or(n))?;
            one("accuracy_fraction_bits", ExactRational::from_integer(acc.fraction_bits()).into())
        }
    }
}
