//! Fixed-point amplitude encoding of pure states and Bob's classical
//! decoders built on it.
//!
//! Wire format of a [`ClassicalEncoding`] payload: `2^{t+1}` blocks of
//! `r + 1` bits, ordered `b_1, c_1, b_2, c_2, …` (real then imaginary part
//! of each amplitude). Each block is a sign bit (1 = negative) followed by
//! the `r` leading fraction bits of `|value|`, most significant first.
//! The byte form is padded with zero bits at the end.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rand::{Rng, RngCore};

use crate::bits::{BitString, Bits, Subset};
use crate::bounds::ExactRational;
use crate::error::{Error, Result};
use crate::linalg::{AmplitudeVector, ProbabilityDistribution, C64};
use crate::protocols::zeta_distribution;

/// Largest supported number of fraction bits.
pub const MAX_FRACTION_BITS: u32 = 62;

/// An accuracy of the form `2^{-r}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyadicAccuracy {
    r: u32,
}

impl DyadicAccuracy {
    pub fn from_bits(r: u32) -> Result<Self> {
        if r == 0 || r > MAX_FRACTION_BITS {
            return Err(Error::InvalidParameter("fraction bits must lie in 1..=62"));
        }
        Ok(Self { r })
    }

    /// Accepts only exact powers of two `2^{-r}`, `1 <= r <= 62`.
    pub fn from_epsilon(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) || epsilon.to_bits() & ((1 << 52) - 1) != 0 {
            return Err(Error::NonDyadicAccuracy(epsilon));
        }
        let r = 1023 - ((epsilon.to_bits() >> 52) & 0x7ff) as i64;
        Self::from_bits(r as u32).map_err(|_| Error::NonDyadicAccuracy(epsilon))
    }

    /// Largest `2^{-r}` not exceeding `value`.
    pub fn floor(value: &ExactRational) -> Result<Self> {
        if !value.numer().is_positive() {
            return Err(Error::InvalidParameter("accuracy must be positive"));
        }
        // Smallest r with numer · 2^r >= denom.
        let numer = value.numer();
        let denom = value.denom();
        let mut r = (denom.bits() as i64 - numer.bits() as i64).max(0) as u32;
        while (numer << r as usize) < *denom {
            r += 1;
        }
        while r > 0 && (numer << (r - 1) as usize) >= *denom {
            r -= 1;
        }
        Self::from_bits(r.max(1))
    }

    pub fn fraction_bits(&self) -> u32 {
        self.r
    }

    pub fn value(&self) -> f64 {
        libm::ldexp(1.0, -(self.r as i32))
    }

    pub fn exact(&self) -> ExactRational {
        ExactRational::new(1, BigInt::one() << self.r as usize)
    }
}

/// `2^{-(m+q)}/20`, rounded down to a power of two: the accuracy at which
/// the thresholded classical simulation of a `q`-qubit message never errs.
pub fn accuracy_for_zero_error(m: usize, q: usize) -> Result<DyadicAccuracy> {
    if m == 0 || q == 0 {
        return Err(Error::InvalidParameter("m and q must be positive"));
    }
    let target = ExactRational::pow2_neg((m + q) as u32) * ExactRational::new(1, 20);
    DyadicAccuracy::floor(&target)
}

/// `(2^{-m} − γ)·2^{-s}/20`, rounded down to a power of two: the accuracy
/// used by the resample-and-vote decoder for an `s`-qubit message.
pub fn accuracy_for_amplification(m: usize, gamma: &ExactRational, s: usize) -> Result<DyadicAccuracy> {
    let slack = ExactRational::pow2_neg(m as u32) - gamma.clone();
    if !slack.numer().is_positive() {
        return Err(Error::PreconditionViolated("gamma must be below 2^-m"));
    }
    DyadicAccuracy::floor(&(slack * ExactRational::pow2_neg(s as u32) * ExactRational::new(1, 20)))
}

/// Bit-exact classical description of a `t`-qubit pure state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalEncoding {
    num_qubits: usize,
    accuracy: DyadicAccuracy,
    payload: Bits,
}

impl ClassicalEncoding {
    /// Reinterprets a raw payload; the qubit count follows from its length.
    pub fn from_payload(payload: Bits, accuracy: DyadicAccuracy) -> Result<Self> {
        let block = accuracy.r as usize + 1;
        if !payload.len().is_multiple_of(block) {
            return Err(Error::MalformedPayload("length is not a multiple of the block size"));
        }
        let parts = payload.len() / block;
        if parts < 2 || !parts.is_power_of_two() {
            return Err(Error::MalformedPayload("block count is not 2^(t+1)"));
        }
        let num_qubits = parts.trailing_zeros() as usize - 1;
        Ok(Self { num_qubits, accuracy, payload })
    }

    /// Parses the padded byte form of a `num_qubits`-qubit encoding.
    pub fn from_bytes(bytes: &[u8], num_qubits: usize, accuracy: DyadicAccuracy) -> Result<Self> {
        let len = encoded_len(num_qubits, accuracy);
        let len = usize::try_from(len).map_err(|_| Error::MalformedPayload("too long"))?;
        Self::from_payload(Bits::from_bytes(bytes, len)?, accuracy)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn accuracy(&self) -> DyadicAccuracy {
        self.accuracy
    }

    pub fn payload(&self) -> &Bits {
        &self.payload
    }

    pub fn into_payload(self) -> Bits {
        self.payload
    }

    pub fn to_bytes(&self) -> &[u8] {
        self.payload.as_bytes()
    }

    /// Decoded parts `b̃_1, c̃_1, b̃_2, c̃_2, …`, each in `[−1, 1]`.
    pub fn components(&self) -> Vec<f64> {
        let r = self.accuracy.r as usize;
        let scale = self.accuracy.value();
        (0..self.payload.len() / (r + 1))
            .map(|i| {
                let start = i * (r + 1);
                let magnitude = self.payload.read_uint(start + 1, r) as f64 * scale;
                if self.payload.get(start) {
                    -magnitude
                } else {
                    magnitude
                }
            })
            .collect()
    }
}

/// `2^{t+1}(r+1)`.
pub fn encoded_len(num_qubits: usize, accuracy: DyadicAccuracy) -> u128 {
    (1u128 << (num_qubits + 1)) * (accuracy.r as u128 + 1)
}

fn quantize_part(value: f64, r: u32) -> (bool, u64) {
    let max = (1u64 << r) - 1;
    let magnitude = libm::floor(libm::ldexp(value.abs(), r as i32));
    let fraction = if magnitude >= max as f64 { max } else { magnitude as u64 };
    (value < 0.0 && fraction != 0, fraction)
}

/// Truncates each real and imaginary part toward zero to `r` fraction
/// bits, so every decoded part is within `2^{-r}` of the original.
pub fn quantize_amplitudes(state: &AmplitudeVector, accuracy: DyadicAccuracy) -> Result<ClassicalEncoding> {
    state.ensure_normalized()?;
    let r = accuracy.r;
    let mut payload = Bits::with_capacity(encoded_len(state.num_qubits(), accuracy) as usize);
    for a in state.amplitudes() {
        for part in [a.re, a.im] {
            let (negative, fraction) = quantize_part(part, r);
            payload.push(negative);
            payload.push_uint(fraction, r as usize);
        }
    }
    Ok(ClassicalEncoding { num_qubits: state.num_qubits(), accuracy, payload })
}

/// `Σ_j (b̃_j + i c̃_j)|j⟩ / ν` with `ν² = Σ b̃_j² + c̃_j²`.
pub fn decode_and_normalize(encoding: &ClassicalEncoding) -> Result<AmplitudeVector> {
    let parts = encoding.components();
    let amplitudes: Vec<C64> = parts.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect();
    AmplitudeVector::new(encoding.num_qubits, amplitudes)?.normalized()
}

/// Bob's approximate outcome probabilities `p'_z`: Born's rule for the
/// exclusion measurement on `y`, applied to the decoded state.
pub fn classical_sim_distribution(encoding: &ClassicalEncoding, y: &Subset) -> Result<ProbabilityDistribution> {
    let state = decode_and_normalize(encoding)?;
    zeta_distribution(&state, y)
}

/// Thresholded classical decoder: the lexicographically smallest `z` with
/// `p'_z >= 2^{-m}`.
pub fn classical_sim_decode(encoding: &ClassicalEncoding, y: &Subset, m: usize) -> Result<BitString> {
    if y.len() != m {
        return Err(Error::LengthMismatch { expected: m, found: y.len() });
    }
    let dist = classical_sim_distribution(encoding, y)?;
    let threshold = libm::ldexp(1.0, -(m as i32));
    let found = dist.iter().find(|&(_, p)| p >= threshold).map(|(z, _)| z);
    found.ok_or(Error::NoCandidate { threshold })
}

/// Draws one outcome from `dist`.
pub fn sample<R: RngCore + ?Sized>(dist: &ProbabilityDistribution, rng: &mut R) -> BitString {
    let u: f64 = rng.random::<f64>() * dist.total();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in dist.probabilities().iter().enumerate() {
        if p > 0.0 {
            last = i;
        }
        acc += p;
        if u < acc {
            last = i;
            break;
        }
    }
    BitString::new(dist.bits(), last as u64).expect("outcome fits")
}

/// Samples `repetitions` outcomes and returns the most frequent one, ties
/// going to the lexicographically smallest.
pub fn plurality_vote<R: RngCore + ?Sized>(
    dist: &ProbabilityDistribution,
    repetitions: u64,
    rng: &mut R,
) -> Result<BitString> {
    if repetitions == 0 {
        return Err(Error::InvalidParameter("at least one repetition is required"));
    }
    let mut counts = alloc::vec![0u64; dist.probabilities().len()];
    for _ in 0..repetitions {
        counts[sample(dist, rng).value() as usize] += 1;
    }
    let best = counts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .expect("non-empty");
    Ok(BitString::new(dist.bits(), best as u64).expect("outcome fits"))
}

/// Decodes an `n`-qubit encoding, runs the exclusion measurement on `y`
/// `repetitions` times and returns the plurality outcome.
pub fn resample_amplify<R: RngCore + ?Sized>(
    encoding: &ClassicalEncoding,
    y: &Subset,
    m: usize,
    repetitions: u64,
    rng: &mut R,
) -> Result<BitString> {
    if y.len() != m {
        return Err(Error::LengthMismatch { expected: m, found: y.len() });
    }
    let dist = classical_sim_distribution(encoding, y)?;
    plurality_vote(&dist, repetitions, rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_accuracy_parsing() {
        assert_eq!(DyadicAccuracy::from_epsilon(0.25).unwrap().fraction_bits(), 2);
        assert_eq!(DyadicAccuracy::from_epsilon(libm::ldexp(1.0, -20)).unwrap().fraction_bits(), 20);
        assert!(matches!(DyadicAccuracy::from_epsilon(0.3), Err(Error::NonDyadicAccuracy(_))));
        assert!(DyadicAccuracy::from_epsilon(1.0).is_err());
        assert!(DyadicAccuracy::from_epsilon(0.0).is_err());
        assert_eq!(DyadicAccuracy::floor(&ExactRational::new(1, 320)).unwrap().fraction_bits(), 9);
        assert_eq!(DyadicAccuracy::floor(&ExactRational::new(1, 256)).unwrap().fraction_bits(), 8);
        assert_eq!(DyadicAccuracy::floor(&ExactRational::new(3, 4)).unwrap().fraction_bits(), 1);
    }

    #[test]
    fn zero_error_accuracy_examples() {
        assert_eq!(accuracy_for_zero_error(2, 2).unwrap().fraction_bits(), 9);
        assert_eq!(accuracy_for_zero_error(1, 1).unwrap().fraction_bits(), 7);
        let mut prev = 0;
        for s in 2..30 {
            let r = accuracy_for_zero_error(1, s - 1).unwrap().fraction_bits();
            assert!(r > prev);
            prev = r;
        }
    }

    #[test]
    fn amplification_accuracy() {
        // (1/4 − 1/8)·2^{-3}/20 = 1/1280 → 2^{-11}.
        let acc = accuracy_for_amplification(2, &ExactRational::new(1, 8), 3).unwrap();
        assert_eq!(acc.fraction_bits(), 11);
        assert!(accuracy_for_amplification(2, &ExactRational::new(1, 4), 3).is_err());
    }

    #[test]
    fn quantize_single_parts() {
        assert_eq!(quantize_part(0.75, 2), (false, 0b11));
        assert_eq!(quantize_part(-0.75, 2), (true, 0b11));
        let (neg, frac) = quantize_part(1.0 / 3.0, 2);
        assert!(!neg);
        let decoded = frac as f64 / 4.0;
        assert_eq!(decoded, 0.25);
        assert!((1.0 / 3.0 - decoded - 1.0 / 12.0).abs() < 1e-15);
        assert_eq!(quantize_part(1.0, 3), (false, 7));
        assert_eq!(quantize_part(-1e-9, 3), (false, 0));
    }

    #[test]
    fn payload_layout_is_bit_exact() {
        let state = AmplitudeVector::new(1, alloc::vec![C64::new(0.6, -0.0), C64::new(0.0, -0.8)]).unwrap();
        let acc = DyadicAccuracy::from_bits(3).unwrap();
        let enc = quantize_amplitudes(&state, acc).unwrap();
        // 0.6 → 0 100, 0 → 0 000, 0 → 0 000, −0.8 → 1 110
        assert_eq!(enc.payload().to_bit_string(), "0100000000001110");
        assert_eq!(enc.to_bytes(), &[0b0100_0000, 0b0000_1110]);
        assert_eq!(ClassicalEncoding::from_bytes(enc.to_bytes(), 1, acc).unwrap(), enc);
        assert_eq!(enc.components(), [0.5, 0.0, 0.0, -0.75]);
    }

    #[test]
    fn payload_length_formula() {
        let state = AmplitudeVector::basis(2, 1).unwrap();
        let enc = quantize_amplitudes(&state, DyadicAccuracy::from_bits(3).unwrap()).unwrap();
        assert_eq!(enc.payload().len(), 32);
        assert_eq!(enc.num_qubits(), 2);
    }

    #[test]
    fn decode_basis_state_exactly() {
        let zero = AmplitudeVector::basis(1, 0).unwrap();
        let enc = quantize_amplitudes(&zero, DyadicAccuracy::from_bits(4).unwrap()).unwrap();
        assert_eq!(decode_and_normalize(&enc).unwrap(), zero);
    }

    #[test]
    fn malformed_payloads_are_rejected() {
        let acc = DyadicAccuracy::from_bits(3).unwrap();
        let mut bits = Bits::new();
        bits.push_uint(0, 12);
        assert!(ClassicalEncoding::from_payload(bits, acc).is_err());
        let mut zeros = Bits::new();
        zeros.push_uint(0, 16);
        let enc = ClassicalEncoding::from_payload(zeros, acc).unwrap();
        assert_eq!(decode_and_normalize(&enc), Err(Error::ZeroNorm));
        let loose = AmplitudeVector::from_real(1, &[1.0, 1.0]).unwrap();
        assert!(quantize_amplitudes(&loose, acc).is_err());
    }
}
