//! One-way strategies for the exclusion game.
//!
//! The zero-error quantum strategy encodes each bit of `x` as the qubit
//! `cos(θ_m/2)|0⟩ + (−1)^{x_i} sin(θ_m/2)|1⟩` with
//! `θ_m = 2·arctan(2^{1/m} − 1)`, and Bob measures the qubits named by `y`
//! in the exclusion basis `ζ(z)`, which is orthogonal to the reduced state
//! whenever `z = x|_y`.

mod quantize;
mod strategy;

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore};

use crate::bits::{low_mask, BitString, Subset};
use crate::error::{Error, Result};
use crate::game::strings;
use crate::linalg::{AmplitudeVector, DensityMatrix, ProbabilityDistribution, Split, C64};

pub use quantize::{
    accuracy_for_amplification, accuracy_for_zero_error, classical_sim_decode, classical_sim_distribution,
    decode_and_normalize, encoded_len, plurality_vote, quantize_amplitudes, resample_amplify, sample,
    ClassicalEncoding, DyadicAccuracy, MAX_FRACTION_BITS,
};
pub use strategy::{
    AmplifiedStrategy, ClassicalSimStrategy, CompressedPjoStrategy, MajorityStrategy, Message, PjoStrategy,
    ProtocolRun, RandomGuessStrategy, Strategy,
};

/// `tan(θ_m/2) = 2^{1/m} − 1`.
fn half_angle_tangent(m: usize) -> f64 {
    libm::expm1(core::f64::consts::LN_2 / m as f64)
}

/// `θ_m = 2·arctan(2^{1/m} − 1)`, in `(0, π/2]`.
pub fn theta(m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be positive"));
    }
    Ok(2.0 * libm::atan(half_angle_tangent(m)))
}

/// `(cos(θ_m/2), sin(θ_m/2))`.
pub fn half_angle(m: usize) -> Result<(f64, f64)> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be positive"));
    }
    let u = half_angle_tangent(m);
    let norm = libm::sqrt(1.0 + u * u);
    Ok((1.0 / norm, u / norm))
}

/// `(cos²(θ_m/2), sin²(θ_m/2))`.
pub fn half_angle_sq(m: usize) -> Result<(f64, f64)> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be positive"));
    }
    let u = half_angle_tangent(m);
    let u2 = u * u;
    Ok((1.0 / (1.0 + u2), u2 / (1.0 + u2)))
}

/// Amplitude `(−1)^{x·r} cos^{n−|r|} sin^{|r|}` of every basis string `r`,
/// optionally dropping strings of weight above `max_weight`.
fn pjo_amplitudes(x: &BitString, m: usize, max_weight: usize) -> Result<Vec<C64>> {
    let n = x.len();
    let (c, s) = half_angle(m)?;
    let powers: Vec<f64> = (0..=n).map(|w| libm::pow(c, (n - w) as f64) * libm::pow(s, w as f64)).collect();
    Ok((0..1u64 << n)
        .map(|r| {
            let w = r.count_ones() as usize;
            if w > max_weight {
                return C64::new(0.0, 0.0);
            }
            let sign = if (x.value() & r).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
            C64::new(sign * powers[w], 0.0)
        })
        .collect())
}

/// The PJO message `⊗_i (cos(θ_m/2)|0⟩ + (−1)^{x_i} sin(θ_m/2)|1⟩)`.
pub fn pjo_state(x: &BitString, m: usize) -> Result<AmplitudeVector> {
    AmplitudeVector::new(x.len(), pjo_amplitudes(x, m, x.len())?)
}

/// The PJO message projected onto Hamming weight `<= k` and renormalized
/// by the kept squared norm `A_k`.
pub fn compressed_pjo_state(x: &BitString, m: usize, k: usize) -> Result<AmplitudeVector> {
    if k > x.len() {
        return Err(Error::InvalidParameter("need k <= n"));
    }
    let amplitudes = pjo_amplitudes(x, m, k)?;
    AmplitudeVector::new(x.len(), amplitudes)?.normalized()
}

/// Exclusion basis vector `ζ(z) = 2^{-m/2}(|0⟩ − Σ_{s≠0} (−1)^{z·s}|s⟩)`.
pub fn zeta(z: &BitString) -> AmplitudeVector {
    let m = z.len();
    let scale = 1.0 / libm::sqrt((1u64 << m) as f64);
    let amplitudes = (0..1u64 << m)
        .map(|s| {
            let odd = (z.value() & s).count_ones() & 1 == 1;
            let a = if s == 0 || odd { scale } else { -scale };
            C64::new(a, 0.0)
        })
        .collect();
    AmplitudeVector::new(m, amplitudes).expect("dimension matches")
}

/// In-place Walsh–Hadamard transform: `v_z ← Σ_s (−1)^{z·s} v_s`.
fn walsh_hadamard(v: &mut [C64]) {
    let mut h = 1;
    while h < v.len() {
        for block in v.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Outcome distribution of the exclusion measurement `{ζ(z)}` on the
/// qubits in `y`, i.e. `p_z = ⟨ζ(z)| Tr_{\y}|ψ⟩⟨ψ| |ζ(z)⟩`.
///
/// Evaluated as `Σ_e |⟨ζ(z) ⊗ e|ψ⟩|²` over environment basis states `e`,
/// using `⟨ζ(z)|v⟩ = 2^{-m/2}(2v_0 − Σ_s (−1)^{z·s} v_s)`.
pub fn zeta_distribution(state: &AmplitudeVector, y: &Subset) -> Result<ProbabilityDistribution> {
    if y.universe() != state.num_qubits() {
        return Err(Error::DimensionMismatch { expected: state.num_qubits(), found: y.universe() });
    }
    let split = Split::new(state.num_qubits(), y.indices())?;
    let m = y.len();
    let scale = 1.0 / (1u64 << m) as f64;
    let a = state.amplitudes();
    let mut probabilities = vec![0.0; 1 << m];
    let mut buffer = vec![C64::new(0.0, 0.0); 1 << m];
    for &e in &split.env {
        let mut any = false;
        for (slot, &k) in buffer.iter_mut().zip(&split.kept) {
            *slot = a[k | e];
            any |= *slot != C64::new(0.0, 0.0);
        }
        if !any {
            continue;
        }
        let v0 = buffer[0];
        walsh_hadamard(&mut buffer);
        for (p, w) in probabilities.iter_mut().zip(&buffer) {
            *p += (v0 * 2.0 - w).norm_sqr() * scale;
        }
    }
    for p in &mut probabilities {
        *p = p.clamp(0.0, 1.0);
    }
    ProbabilityDistribution::new(m, probabilities)
}

/// Bob's measurement in the PJO strategy for a game with subset size `m`.
pub fn pjo_measure(state: &AmplitudeVector, y: &Subset, m: usize) -> Result<ProbabilityDistribution> {
    if y.len() != m {
        return Err(Error::LengthMismatch { expected: m, found: y.len() });
    }
    zeta_distribution(state, y)
}

/// `Σ_e |⟨ζ(z) ⊗ e|v⟩|²` for an arbitrary (not necessarily normalized)
/// amplitude table `v`.
fn exclusion_weight(amplitudes: &[C64], y: &Subset, z: &BitString) -> Result<f64> {
    let split = Split::new(y.universe(), y.indices())?;
    let overlap: Vec<C64> = zeta(z).amplitudes().iter().map(|c| c.conj()).collect();
    Ok(split
        .env
        .iter()
        .map(|&e| split.kept.iter().zip(&overlap).map(|(&k, w)| w * amplitudes[k | e]).sum::<C64>().norm_sqr())
        .sum())
}

/// Probability that the exclusion measurement on `y` yields `z`.
pub fn exclusion_probability(state: &AmplitudeVector, y: &Subset, z: &BitString) -> Result<f64> {
    if z.len() != y.len() {
        return Err(Error::LengthMismatch { expected: y.len(), found: z.len() });
    }
    if y.universe() != state.num_qubits() {
        return Err(Error::DimensionMismatch { expected: state.num_qubits(), found: y.universe() });
    }
    Ok(exclusion_weight(state.amplitudes(), y, z)?.clamp(0.0, 1.0))
}

/// Error probability `ε_k` of the compressed strategy on `(x, y)`: the
/// weight the exclusion measurement puts on the losing answer `x|_y`.
///
/// The full PJO state has zero overlap with `ζ(x|_y) ⊗ e` for every `e`,
/// so the kept part's overlap is minus the discarded part's, and
/// `ε_k = Σ_e |⟨ζ(x|_y) ⊗ e|P_{>k}Φ⟩|² / A_k`. Summing only the discarded
/// weight avoids cancellation and gives exactly zero when `k = n`.
pub fn compression_error_exact(x: &BitString, y: &Subset, m: usize, k: usize) -> Result<f64> {
    let n = x.len();
    if k > n {
        return Err(Error::InvalidParameter("need k <= n"));
    }
    if y.universe() != n {
        return Err(Error::DimensionMismatch { expected: n, found: y.universe() });
    }
    if y.len() != m {
        return Err(Error::LengthMismatch { expected: m, found: y.len() });
    }
    let mut discarded = pjo_amplitudes(x, m, n)?;
    let mut kept_norm = 0.0;
    for (r, a) in discarded.iter_mut().enumerate() {
        if r.count_ones() as usize <= k {
            kept_norm += a.norm_sqr();
            *a = C64::new(0.0, 0.0);
        }
    }
    let losing = crate::game::restrict(x, y)?;
    Ok((exclusion_weight(&discarded, y, &losing)? / kept_norm).clamp(0.0, 1.0))
}

/// Isometry between the span of `n`-bit basis strings of weight `<= k`
/// and the first `Σ_{i<=k} C(n,i)` basis states of `⌈log₂ Σ C(n,i)⌉`
/// qubits. Strings are ranked in increasing numeric order.
#[derive(Clone, Debug)]
pub struct HammingBallCodec {
    n: usize,
    k: usize,
    members: Vec<u64>,
    qubits: usize,
}

impl HammingBallCodec {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::InvalidParameter("need k <= n"));
        }
        if n >= 40 {
            return Err(Error::InvalidParameter("Hamming-ball codec is limited to n < 40"));
        }
        let members: Vec<u64> = (0..1u64 << n).filter(|r| r.count_ones() as usize <= k).collect();
        let qubits = members.len().next_power_of_two().trailing_zeros() as usize;
        Ok(Self { n, k, members, qubits })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Compressed register size `⌈log₂ Σ_{i<=k} C(n,i)⌉`.
    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn rank(&self, r: u64) -> Option<usize> {
        self.members.binary_search(&r).ok()
    }

    /// Rewrites a weight-`<= k` supported `n`-qubit state on the compressed
    /// register.
    pub fn compress(&self, state: &AmplitudeVector) -> Result<AmplitudeVector> {
        if state.num_qubits() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: state.num_qubits() });
        }
        let zero = C64::new(0.0, 0.0);
        let a = state.amplitudes();
        if a.iter().enumerate().any(|(r, &v)| v != zero && r.count_ones() as usize > self.k) {
            return Err(Error::InvalidParameter("state has weight above k"));
        }
        let mut out = vec![zero; 1 << self.qubits];
        for (slot, &r) in out.iter_mut().zip(&self.members) {
            *slot = a[r as usize];
        }
        AmplitudeVector::new(self.qubits, out)
    }

    /// Inverse of [`compress`](Self::compress).
    pub fn decompress(&self, state: &AmplitudeVector) -> Result<AmplitudeVector> {
        if state.num_qubits() != self.qubits {
            return Err(Error::DimensionMismatch { expected: self.qubits, found: state.num_qubits() });
        }
        let zero = C64::new(0.0, 0.0);
        let a = state.amplitudes();
        if a[self.members.len()..].iter().any(|&v| v != zero) {
            return Err(Error::InvalidParameter("amplitude outside the code space"));
        }
        let mut out = vec![zero; 1 << self.n];
        for (&v, &r) in a.iter().zip(&self.members) {
            out[r as usize] = v;
        }
        AmplitudeVector::new(self.n, out)
    }
}

/// The message ensemble `2^{-n} Σ_x |Φ(x)⟩⟨Φ(x)|`, built term by term.
pub fn pjo_ensemble_density(n: usize, m: usize) -> Result<DensityMatrix> {
    let states: Vec<AmplitudeVector> = strings(n).map(|x| pjo_state(&x, m)).collect::<Result<_>>()?;
    DensityMatrix::mixture(&states)
}

/// One bit: set iff `x` has strictly more ones than zeros.
pub fn majority_encode(x: &BitString) -> bool {
    2 * x.weight() as usize > x.len()
}

/// All ones after a majority-zeros bit, all zeros otherwise.
pub fn majority_decode(bit: bool, m: usize) -> BitString {
    if bit {
        BitString::zeros(m)
    } else {
        BitString::ones(m)
    }
}

/// A uniformly random `m`-bit answer.
pub fn random_guess<R: RngCore + ?Sized>(m: usize, rng: &mut R) -> BitString {
    BitString::new(m, rng.random::<u64>() & low_mask(m)).expect("masked")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{enumerate_inputs, restrict};
    use crate::linalg::{born_probability, inner_product, partial_trace, tensor_product};
    use nalgebra::ComplexField;
    use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn close(a: &AmplitudeVector, b: &[f64]) -> bool {
        a.amplitudes().iter().zip(b).all(|(x, &y)| (x - C64::new(y, 0.0)).modulus() < 1e-12)
    }

    #[test]
    fn theta_values() {
        assert_eq!(theta(1).unwrap(), FRAC_PI_2);
        assert!((theta(2).unwrap() - FRAC_PI_4).abs() < 1e-15);
        // 2·atan(2^{1/4} − 1), 30-digit reference 0.373993152473045...
        assert!((theta(4).unwrap() - 0.373_993_152_473_045_2).abs() < 1e-15);
        assert!(theta(0).is_err());
        for m in 1..200 {
            let t = theta(m).unwrap();
            assert!(t > 0.0 && t <= FRAC_PI_2);
        }
    }

    #[test]
    fn single_qubit_pjo_states() {
        assert!(close(&pjo_state(&bs("0"), 1).unwrap(), &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]));
        assert!(close(&pjo_state(&bs("1"), 1).unwrap(), &[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]));
        let v = pjo_state(&bs("0110"), 1).unwrap();
        assert!(v.amplitudes().iter().all(|a| (a.modulus() - 0.25).abs() < 1e-12));
    }

    #[test]
    fn pjo_state_is_a_product() {
        let x = bs("01");
        let product = tensor_product(&pjo_state(&bs("0"), 1).unwrap(), &pjo_state(&bs("1"), 1).unwrap());
        assert!(close(&product, &[0.5, -0.5, 0.5, -0.5]));
        assert_eq!(pjo_state(&x, 1).unwrap(), product);
        let x = bs("101");
        let parts: Vec<_> = (1..=3).map(|i| pjo_state(&bs(if x.bit(i) { "1" } else { "0" }), 3).unwrap()).collect();
        let full = tensor_product(&tensor_product(&parts[0], &parts[1]), &parts[2]);
        let direct = pjo_state(&x, 3).unwrap();
        for (a, b) in full.amplitudes().iter().zip(direct.amplitudes()) {
            assert!((a - b).modulus() < 1e-15);
        }
        assert!(direct.is_normalized());
    }

    #[test]
    fn zeta_examples_and_orthonormality() {
        assert!(close(&zeta(&bs("0")), &[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]));
        assert!(close(&zeta(&bs("1")), &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]));
        for m in 1..=8 {
            let basis: Vec<_> = strings(m).map(|z| zeta(&z)).collect();
            for (i, a) in basis.iter().enumerate() {
                for (j, b) in basis.iter().enumerate() {
                    let ip = inner_product(a, b).unwrap();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((ip - C64::new(expected, 0.0)).modulus() < 1e-10, "m={m} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn zeta_distribution_matches_density_matrix_route() {
        for (n, m) in [(3, 1), (3, 2), (4, 2), (4, 3), (5, 3)] {
            for pair in enumerate_inputs(n, m, 12).unwrap().step_by(3) {
                let state = pjo_state(&pair.x, m).unwrap();
                let fast = pjo_measure(&state, &pair.y, m).unwrap();
                let rho = partial_trace(&state, pair.y.indices()).unwrap();
                for (z, p) in fast.iter() {
                    let slow = born_probability(&rho, &zeta(&z)).unwrap();
                    assert!((p - slow).abs() < 1e-12);
                    assert!((exclusion_probability(&state, &pair.y, &z).unwrap() - slow).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn measurement_never_returns_the_restriction() {
        for n in 1..=5 {
            for m in 1..=n {
                for pair in enumerate_inputs(n, m, 12).unwrap() {
                    let dist = pjo_measure(&pjo_state(&pair.x, m).unwrap(), &pair.y, m).unwrap();
                    assert!(dist.prob(&pair.restriction()) <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn single_qubit_measurement_is_deterministic() {
        for x in strings(3) {
            for i in 1..=3 {
                let y = Subset::new(3, [i]).unwrap();
                let dist = pjo_measure(&pjo_state(&x, 1).unwrap(), &y, 1).unwrap();
                let complement = restrict(&x, &y).unwrap().complement();
                assert!((dist.prob(&complement) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn measuring_a_zero_qubit_is_uniform() {
        let state = tensor_product(&AmplitudeVector::basis(1, 0).unwrap(), &pjo_state(&bs("0"), 1).unwrap());
        let dist = pjo_measure(&state, &Subset::new(2, [1]).unwrap(), 1).unwrap();
        assert!((dist.probabilities()[0] - 0.5).abs() < 1e-12);
        assert!((dist.probabilities()[1] - 0.5).abs() < 1e-12);
        assert!(pjo_measure(&state, &Subset::new(3, [1]).unwrap(), 1).is_err());
    }

    #[test]
    fn compressed_state_edges() {
        let x = bs("1011");
        let full = compressed_pjo_state(&x, 2, 4).unwrap();
        let reference = pjo_state(&x, 2).unwrap();
        assert!(full.amplitudes().iter().zip(reference.amplitudes()).all(|(a, b)| (a - b).modulus() < 1e-15));
        let k0 = compressed_pjo_state(&x, 2, 0).unwrap();
        assert!(close(&k0, &{
            let mut v = vec![0.0; 16];
            v[0] = 1.0;
            v
        }));
        assert!(compressed_pjo_state(&x, 2, 5).is_err());
        for k in 0..=4 {
            assert!(compressed_pjo_state(&x, 3, k).unwrap().is_normalized());
        }
    }

    #[test]
    fn compression_error_matches_direct_measurement() {
        for n in 1..=6 {
            for m in 1..=n {
                for pair in enumerate_inputs(n, m, 12).unwrap().step_by(7) {
                    for k in 0..=n {
                        let state = compressed_pjo_state(&pair.x, m, k).unwrap();
                        let direct = exclusion_probability(&state, &pair.y, &pair.restriction()).unwrap();
                        let exact = compression_error_exact(&pair.x, &pair.y, m, k).unwrap();
                        assert!((direct - exact).abs() < 1e-13, "n={n} m={m} k={k}: {direct} vs {exact}");
                        if k == n {
                            assert_eq!(exact, 0.0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn hamming_ball_codec_round_trip() {
        let codec = HammingBallCodec::new(5, 2).unwrap();
        assert_eq!(codec.qubits(), 4); // 1 + 5 + 10 = 16 strings
        let state = compressed_pjo_state(&bs("10110"), 3, 2).unwrap();
        let small = codec.compress(&state).unwrap();
        assert_eq!(small.num_qubits(), 4);
        assert_eq!(codec.decompress(&small).unwrap(), state);
        assert!(codec.compress(&pjo_state(&bs("10110"), 3).unwrap()).is_err());
        assert_eq!(HammingBallCodec::new(4, 0).unwrap().qubits(), 0);
        assert_eq!(HammingBallCodec::new(4, 4).unwrap().qubits(), 4);
        assert_eq!(HammingBallCodec::new(4, 1).unwrap().qubits(), 3);
        assert_eq!(codec.rank(0b00011), Some(3));
        assert_eq!(codec.rank(0b00111), None);
    }

    #[test]
    fn majority_strategy_pieces() {
        assert!(!majority_encode(&bs("0001")));
        assert!(majority_encode(&bs("1110")));
        assert!(!majority_encode(&bs("0011")));
        assert!(majority_encode(&bs("011")));
        assert_eq!(majority_decode(false, 3), bs("111"));
        assert_eq!(majority_decode(true, 3), bs("000"));
    }

    #[test]
    fn ensemble_entropy_for_one_qubit_is_one_bit() {
        let rho = pjo_ensemble_density(1, 1).unwrap();
        let h = crate::linalg::von_neumann_entropy(&rho).unwrap();
        assert!((h - 1.0).abs() < 1e-12);
    }
}
