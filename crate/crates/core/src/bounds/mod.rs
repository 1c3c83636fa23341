//! Closed-form error and cost calculators. Purely combinatorial
//! quantities are exact rationals; quantities that involve `θ_m` are
//! evaluated in adaptive-precision fixed point.

mod fixed;
mod rational;

use alloc::string::String;
use core::ops::RangeInclusive;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::game::{enumerate_inputs, restrict, strings, subsets};
use crate::protocols::{half_angle_sq, majority_decode, majority_encode, DyadicAccuracy};

pub use fixed::HighPrecision;
pub use rational::ExactRational;

/// Largest `n` for which the majority strategy is enumerated.
pub const MAJORITY_ENUMERATION_CAP: usize = 14;
/// Largest `n` for which the rectangle construction is enumerated.
pub const RECTANGLE_ENUMERATION_CAP: usize = 12;

/// Guard bits carried beyond the magnitude of the smallest relevant term.
const GUARD_BITS: u32 = 192;

/// One evaluated bound, with its inputs echoed.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub name: String,
    pub exact: Option<ExactRational>,
    pub value: f64,
    pub n: usize,
    pub m: usize,
    pub k: Option<usize>,
    pub gamma: Option<ExactRational>,
}

impl BoundReport {
    pub fn float(name: &str, value: f64, n: usize, m: usize) -> Self {
        Self { name: name.into(), exact: None, value, n, m, k: None, gamma: None }
    }

    pub fn exact(name: &str, exact: ExactRational, n: usize, m: usize) -> Self {
        let value = exact.to_f64();
        Self { name: name.into(), exact: Some(exact), value, n, m, k: None, gamma: None }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_gamma(mut self, gamma: ExactRational) -> Self {
        self.gamma = Some(gamma);
        self
    }
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * BigUint::from(n - i) / BigUint::from(i + 1))
}

/// `Σ_{i=0}^{k} C(n,i)`.
pub fn binomial_prefix_sum(n: usize, k: usize) -> BigUint {
    let mut term = BigUint::one();
    let mut sum = BigUint::one();
    for i in 0..k.min(n) {
        term = term * BigUint::from(n - i) / BigUint::from(i + 1);
        sum += &term;
    }
    sum
}

/// `log₂` of a positive big integer, to double precision.
pub fn log2_big(value: &BigUint) -> f64 {
    let bits = value.bits();
    assert!(bits > 0, "log of zero");
    let drop = bits.saturating_sub(64);
    let top = (value >> drop as usize).to_u64().expect("64 bits") as f64;
    libm::log2(top) + drop as f64
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * libm::log2(p) - (1.0 - p) * libm::log2(1.0 - p)
}

fn log2_binomial(n: usize, i: usize) -> f64 {
    let ln = libm::lgamma(n as f64 + 1.0) - libm::lgamma(i as f64 + 1.0) - libm::lgamma((n - i) as f64 + 1.0);
    ln / core::f64::consts::LN_2
}

/// `Σ_{i∈range} C(n,i) cos^{2(n−i)}(θ_m/2) sin^{2i}(θ_m/2)`, with working
/// precision chosen so the largest term keeps at least 192 significant bits.
fn weighted_binomial_sum(n: usize, m: usize, range: RangeInclusive<usize>) -> Result<HighPrecision> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be positive"));
    }
    let (c2, s2) = half_angle_sq(m)?;
    let largest = range
        .clone()
        .map(|i| log2_binomial(n, i) + i as f64 * libm::log2(s2) + (n - i) as f64 * libm::log2(c2))
        .fold(f64::NEG_INFINITY, f64::max);
    if largest == f64::NEG_INFINITY {
        return Ok(HighPrecision::zero(GUARD_BITS));
    }
    let frac_bits = GUARD_BITS + (-largest).max(0.0) as u32;
    // cos² = 1/(1+u²), sin² = u²/(1+u²) with u = 2^{1/m} − 1.
    let one = HighPrecision::one(frac_bits);
    let u = HighPrecision::integer_root(2, m as u32, frac_bits).sub(&one);
    let u2 = u.mul(&u);
    let denominator = one.add(&u2).powi(n as u64);
    let mut power = u2.powi(*range.start() as u64);
    let mut sum = HighPrecision::zero(frac_bits);
    for i in range {
        sum = sum.add(&power.mul_integer(&binomial(n, i)));
        power = power.mul(&u2);
    }
    Ok(sum.div(&denominator))
}

/// `A_k = Σ_{i=0}^{k} C(n,i) cos^{2(n−i)}(θ_m/2) sin^{2i}(θ_m/2)`, the
/// squared norm the PJO message keeps after projection onto weight `<= k`.
pub fn a_k(n: usize, m: usize, k: usize) -> Result<HighPrecision> {
    if k > n {
        return Err(Error::InvalidParameter("need k <= n"));
    }
    weighted_binomial_sum(n, m, 0..=k)
}

/// `1 − A_k`, summed directly over `i > k` so tiny values keep full
/// relative precision.
pub fn a_k_complement(n: usize, m: usize, k: usize) -> Result<HighPrecision> {
    if k > n {
        return Err(Error::InvalidParameter("need k <= n"));
    }
    if k == n {
        return Ok(HighPrecision::zero(GUARD_BITS));
    }
    weighted_binomial_sum(n, m, k + 1..=n)
}

/// `√(1 − A_k)`: the trace distance between the full and compressed PJO
/// messages, which bounds the compressed strategy's error probability.
pub fn compression_error_bound(n: usize, m: usize, k: usize) -> Result<f64> {
    Ok(a_k_complement(n, m, k)?.sqrt().to_f64())
}

/// `ln((n+1)(ne/(m²k))^k)`; requires `k >= 1` and `m >= 2`.
pub fn ln_analytic_tail_bound(n: usize, m: usize, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("need k >= 1"));
    }
    if m < 2 {
        return Err(Error::PreconditionViolated("need m >= 2 so that sin²(θ_m/2) < 1/m²"));
    }
    let (n, m, k) = (n as f64, m as f64, k as f64);
    Ok(libm::log(n + 1.0) + k * libm::log(n * core::f64::consts::E / (m * m * k)))
}

/// `(n+1)(ne/(m²k))^k`, an upper bound on `1 − A_k`. Fails with
/// [`Error::BoundNotApplicable`] when the value is at least 1.
pub fn analytic_tail_bound(n: usize, m: usize, k: usize) -> Result<f64> {
    let ln = ln_analytic_tail_bound(n, m, k)?;
    let value = libm::exp(ln);
    if ln >= 0.0 {
        return Err(Error::BoundNotApplicable { value });
    }
    Ok(value)
}

/// Size of the Hamming-ball message.
#[derive(Clone, Debug, PartialEq)]
pub struct CompressedSize {
    /// `Σ_{i=0}^{k} C(n,i)`.
    pub basis_states: BigUint,
    /// `log₂` of the basis-state count.
    pub log2: f64,
    /// Whole qubits, `⌈log₂ Σ C(n,i)⌉`.
    pub qubits: u64,
}

pub fn compressed_qubits(n: usize, k: usize) -> Result<CompressedSize> {
    if k > n {
        return Err(Error::InvalidParameter("need k <= n"));
    }
    let basis_states = binomial_prefix_sum(n, k);
    let bits = basis_states.bits();
    let power_of_two = basis_states.count_ones() == 1;
    let qubits = if power_of_two { bits - 1 } else { bits };
    let log2 = if power_of_two { (bits - 1) as f64 } else { log2_big(&basis_states) };
    Ok(CompressedSize { basis_states, log2, qubits })
}

/// `Σ_{i=m}^{⌊n/2⌋} C(n,i)C(i,m) / (2^{n−1} C(n,m))`, the closed form for
/// the one-bit majority strategy's error. Zero when `m > n/2`.
pub fn majority_error_formula(n: usize, m: usize) -> Result<ExactRational> {
    if m == 0 || m > n {
        return Err(Error::InvalidGame("need 1 <= m <= n"));
    }
    let numerator: BigUint = (m..=n / 2).map(|i| binomial(n, i) * binomial(i, m)).sum();
    let denominator = (BigUint::one() << (n - 1)) * binomial(n, m);
    Ok(ExactRational::from_biguints(numerator, denominator))
}

/// Fraction of all `(x, y)` on which the majority strategy errs, counted
/// by running it on every input.
pub fn majority_error_enumerated(n: usize, m: usize) -> Result<ExactRational> {
    let mut errors = 0u64;
    let mut total = 0u64;
    for pair in enumerate_inputs(n, m, MAJORITY_ENUMERATION_CAP)? {
        let answer = majority_decode(majority_encode(&pair.x), m);
        if answer == pair.restriction() {
            errors += 1;
        }
        total += 1;
    }
    Ok(ExactRational::new(errors, total))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MajorityError {
    pub formula: ExactRational,
    pub enumerated: Option<ExactRational>,
}

impl MajorityError {
    /// `formula − enumerated`, when both are known.
    pub fn discrepancy(&self) -> Option<ExactRational> {
        self.enumerated.as_ref().map(|e| &self.formula - e)
    }
}

/// Closed form, plus the enumerated value for `n <= 14`.
pub fn majority_error_exact(n: usize, m: usize) -> Result<MajorityError> {
    let formula = majority_error_formula(n, m)?;
    let enumerated = if n <= MAJORITY_ENUMERATION_CAP { Some(majority_error_enumerated(n, m)?) } else { None };
    Ok(MajorityError { formula, enumerated })
}

/// `n − log₂ Σ_{i=0}^{m−1} C(n,i)`, the information any zero-error
/// classical strategy must reveal.
pub fn classical_ic_lower_bound(n: usize, m: usize) -> Result<f64> {
    if m == 0 || m > n {
        return Err(Error::InvalidGame("need 1 <= m <= n"));
    }
    Ok(n as f64 - log2_big(&binomial_prefix_sum(n, m - 1)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RectangleError {
    /// `1 / Σ_{i=0}^{m} C(n,i)`.
    pub formula: ExactRational,
    /// Enumerated error fraction of the construction, for `n <= 12`.
    pub enumerated: Option<ExactRational>,
}

/// Error fraction of the rectangle `S × Y` with
/// `S = {x : weight(x) >= n − m}` when Bob always answers `0^m`.
pub fn rectangle_construction_error(n: usize, m: usize) -> Result<RectangleError> {
    if m == 0 || m > n {
        return Err(Error::InvalidGame("need 1 <= m <= n"));
    }
    let formula = ExactRational::from_biguints(BigUint::one(), binomial_prefix_sum(n, m));
    let enumerated = if n <= RECTANGLE_ENUMERATION_CAP { Some(rectangle_enumerated(n, m)?) } else { None };
    Ok(RectangleError { formula, enumerated })
}

fn rectangle_enumerated(n: usize, m: usize) -> Result<ExactRational> {
    let answer = BitString::zeros(m);
    let ys: alloc::vec::Vec<_> = subsets(n, m).collect();
    let mut errors = 0u64;
    let mut total = 0u64;
    for x in strings(n).filter(|x| x.weight() as usize + m >= n) {
        for y in &ys {
            if restrict(&x, y)? == answer {
                errors += 1;
            }
            total += 1;
        }
    }
    Ok(ExactRational::new(errors, total))
}

/// `(n+1)^{-m}`.
pub fn rectangle_threshold(n: usize, m: usize) -> ExactRational {
    ExactRational::from_integer(BigInt::from(n + 1)).pow(m as u32).recip()
}

/// `2·n·h(sin²(θ_m/2))`: twice the entropy of the PJO message ensemble,
/// an upper bound on the strategy's information cost.
pub fn pjo_info_cost_bound(n: usize, m: usize) -> Result<f64> {
    let (_, s2) = half_angle_sq(m)?;
    Ok(2.0 * n as f64 * binary_entropy(s2))
}

/// Guarantees for amplitudes perturbed by at most `ε` per part in an
/// `l`-dimensional space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbationBounds {
    /// `10√l·ε`, bounding the trace distance after renormalization.
    pub trace_distance: f64,
    /// `20√l·ε`, bounding the shift of any outcome probability.
    pub probability: f64,
}

/// Requires `ε < 1/(6√(2l))`.
pub fn perturbation_bounds(l: usize, epsilon: f64) -> Result<PerturbationBounds> {
    if l == 0 || epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidParameter("need l >= 1 and epsilon > 0"));
    }
    let l = l as f64;
    if epsilon * 6.0 * libm::sqrt(2.0 * l) >= 1.0 {
        return Err(Error::PreconditionViolated("epsilon must be below 1/(6·sqrt(2l))"));
    }
    let root = libm::sqrt(l);
    Ok(PerturbationBounds { trace_distance: 10.0 * root * epsilon, probability: 20.0 * root * epsilon })
}

/// `⌈ln(1/τ) / (2·gap²)⌉` rounds of sampling make the plurality pick the
/// wrong one of two outcomes whose probabilities differ by `2·gap` with
/// probability at most `τ`.
pub fn hoeffding_repetitions(gap: f64, tau: f64) -> Result<u64> {
    if !(gap > 0.0 && gap <= 1.0) {
        return Err(Error::InvalidParameter("gap must lie in (0, 1]"));
    }
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::InvalidParameter("tau must lie in (0, 1)"));
    }
    let exact = libm::log(1.0 / tau) / (2.0 * gap * gap);
    // Absorb last-place rounding in the logarithm.
    Ok(libm::ceil(exact * (1.0 - 1e-12)).max(1.0) as u64)
}

/// `2^{t+1}(r+1)` bits for a `t`-qubit state at accuracy `2^{-r}`.
pub fn classical_message_bits(num_qubits: usize, accuracy: DyadicAccuracy) -> u128 {
    crate::protocols::encoded_len(num_qubits, accuracy)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(16, 4), BigUint::from(1820u32));
        assert_eq!(binomial(4, 5), BigUint::zero());
        assert_eq!(binomial_prefix_sum(16, 4), BigUint::from(2517u32));
        assert_eq!(binomial_prefix_sum(10, 10), BigUint::from(1024u32));
        assert_eq!(binomial_prefix_sum(10, 20), BigUint::from(1024u32));
    }

    #[test]
    fn a_k_edges() {
        for (n, m) in [(4, 2), (7, 3), (10, 1)] {
            let full = a_k(n, m, n).unwrap();
            assert!((full.to_f64() - 1.0).abs() < 1e-15);
            let (c2, _) = half_angle_sq(m).unwrap();
            assert!((a_k(n, m, 0).unwrap().to_f64() - libm::pow(c2, n as f64)).abs() < 1e-14);
            let mut prev = 0.0;
            for k in 0..=n {
                let v = a_k(n, m, k).unwrap().to_f64();
                assert!(v >= prev && v > 0.0 && v <= 1.0 + 1e-15);
                prev = v;
            }
        }
        assert!(a_k(3, 2, 4).is_err());
    }

    #[test]
    fn complement_agrees_with_subtraction() {
        for k in 0..=8 {
            let a = a_k(8, 3, k).unwrap();
            let c = a_k_complement(8, 3, k).unwrap();
            assert!((a.to_f64() + c.to_f64() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn compression_bound_edges() {
        assert_eq!(compression_error_bound(6, 3, 6).unwrap(), 0.0);
        let mut prev = f64::INFINITY;
        for k in 0..=6 {
            let b = compression_error_bound(6, 3, k).unwrap();
            assert!(b <= prev);
            prev = b;
        }
    }

    #[test]
    fn tail_bound_applicability() {
        let bound = analytic_tail_bound(16, 8, 4).unwrap();
        let tail = a_k_complement(16, 8, 4).unwrap().to_f64();
        assert!(tail < bound);
        assert!(matches!(analytic_tail_bound(16, 2, 1), Err(Error::BoundNotApplicable { .. })));
        assert!(analytic_tail_bound(16, 1, 1).is_err());
        assert!(analytic_tail_bound(16, 4, 0).is_err());
    }

    #[test]
    fn compressed_sizes() {
        let full = compressed_qubits(9, 9).unwrap();
        assert_eq!((full.log2, full.qubits), (9.0, 9));
        let none = compressed_qubits(9, 0).unwrap();
        assert_eq!((none.log2, none.qubits), (0.0, 0));
        let c = compressed_qubits(16, 4).unwrap();
        assert!((c.log2 - libm::log2(2517.0)).abs() < 1e-12);
        assert_eq!(c.qubits, 12);
    }

    #[test]
    fn majority_formula_small_cases() {
        assert_eq!(majority_error_formula(4, 2).unwrap(), ExactRational::new(1, 8));
        assert_eq!(majority_error_formula(4, 3).unwrap(), ExactRational::zero());
        let e = majority_error_exact(5, 2).unwrap();
        assert_eq!(Some(e.formula.clone()), e.enumerated);
        assert_eq!(e.discrepancy(), Some(ExactRational::zero()));
    }

    #[test]
    fn ic_lower_bound_examples() {
        assert_eq!(classical_ic_lower_bound(9, 1).unwrap(), 9.0);
        assert!((classical_ic_lower_bound(4, 2).unwrap() - (4.0 - libm::log2(5.0))).abs() < 1e-12);
        assert!(classical_ic_lower_bound(4, 0).is_err());
    }

    #[test]
    fn rectangle_small_cases() {
        let r = rectangle_construction_error(4, 2).unwrap();
        assert_eq!(r.formula, ExactRational::new(1, 11));
        assert_eq!(r.enumerated, Some(ExactRational::new(1, 11)));
        assert_eq!(rectangle_construction_error(5, 5).unwrap().formula, ExactRational::new(1, 32));
        assert_eq!(rectangle_threshold(4, 2), ExactRational::new(1, 25));
    }

    #[test]
    fn info_cost_examples() {
        assert!((pjo_info_cost_bound(7, 1).unwrap() - 14.0).abs() < 1e-12);
        let mut prev = f64::INFINITY;
        for m in 1..=12 {
            let v = pjo_info_cost_bound(12, m).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn perturbation_examples() {
        let b = perturbation_bounds(4, 1.0 / 1024.0).unwrap();
        assert_eq!(b.trace_distance, 20.0 / 1024.0);
        assert_eq!(b.probability, 40.0 / 1024.0);
        assert!(matches!(perturbation_bounds(4, 0.059), Err(Error::PreconditionViolated(_))));
        assert!(perturbation_bounds(4, 0.058).is_ok());
    }

    #[test]
    fn hoeffding_examples() {
        assert_eq!(hoeffding_repetitions(0.5, libm::exp(-2.0)).unwrap(), 4);
        let gap = 0.1;
        let t1 = hoeffding_repetitions(gap, 0.01).unwrap();
        let t2 = hoeffding_repetitions(gap, 0.005).unwrap();
        let step = libm::ceil(core::f64::consts::LN_2 / (2.0 * gap * gap)) as u64;
        assert!(t2 >= t1 && t2 - t1 <= step);
        assert!(hoeffding_repetitions(0.0, 0.1).is_err());
        assert!(hoeffding_repetitions(0.1, 1.0).is_err());
    }

    #[test]
    fn message_bit_counts() {
        let r3 = DyadicAccuracy::from_bits(3).unwrap();
        assert_eq!(classical_message_bits(2, r3), 32);
        let r4 = DyadicAccuracy::from_bits(4).unwrap();
        assert_eq!(classical_message_bits(2, r4) - classical_message_bits(2, r3), 8);
    }
}
