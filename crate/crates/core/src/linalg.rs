//! Dense complex linear algebra at desk scale: state vectors, density
//! matrices, partial traces, entropies and Born-rule probabilities.
//!
//! Qubit 1 is the most significant bit of a basis index.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Complex, ComplexField, DMatrix};

use crate::bits::BitString;
use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Absolute tolerance for analytic zero tests and normalization checks.
pub const TOLERANCE: f64 = 1e-10;

/// Eigenvalues below this are treated as exactly zero in entropies.
pub const EIGEN_FLOOR: f64 = 1e-12;

/// Complex amplitudes over the computational basis of `num_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeVector {
    num_qubits: usize,
    amplitudes: Vec<C64>,
}

impl AmplitudeVector {
    pub fn new(num_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let expected = dim(num_qubits)?;
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: amplitudes.len() });
        }
        Ok(Self { num_qubits, amplitudes })
    }

    pub fn from_real(num_qubits: usize, amplitudes: &[f64]) -> Result<Self> {
        Self::new(num_qubits, amplitudes.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// The basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        let d = dim(num_qubits)?;
        if index >= d {
            return Err(Error::DimensionMismatch { expected: d, found: index + 1 });
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); d];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { num_qubits, amplitudes })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= TOLERANCE
    }

    pub fn ensure_normalized(&self) -> Result<()> {
        let norm_sqr = self.norm_sqr();
        if (norm_sqr - 1.0).abs() <= TOLERANCE {
            Ok(())
        } else {
            Err(Error::NotNormalized { norm_sqr })
        }
    }

    /// Returns the vector scaled to unit norm.
    pub fn normalized(&self) -> Result<Self> {
        let norm = libm::sqrt(self.norm_sqr());
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            num_qubits: self.num_qubits,
            amplitudes: self.amplitudes.iter().map(|a| a / norm).collect(),
        })
    }
}

fn dim(num_qubits: usize) -> Result<usize> {
    if num_qubits >= usize::BITS as usize - 1 {
        return Err(Error::InvalidParameter("too many qubits"));
    }
    Ok(1usize << num_qubits)
}

/// `a ⊗ b`; entry `j·2^{t_b} + k` is `a_j·b_k`.
pub fn tensor_product(a: &AmplitudeVector, b: &AmplitudeVector) -> AmplitudeVector {
    let amplitudes = a
        .amplitudes
        .iter()
        .flat_map(|&x| b.amplitudes.iter().map(move |&y| x * y))
        .collect();
    AmplitudeVector { num_qubits: a.num_qubits + b.num_qubits, amplitudes }
}

/// `⟨a|b⟩`, conjugate-linear in `a`.
pub fn inner_product(a: &AmplitudeVector, b: &AmplitudeVector) -> Result<C64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| x.conj() * y).sum())
}

/// Trace distance between pure states, `√(1 − |⟨a|b⟩|²)`.
pub fn trace_distance_pure(a: &AmplitudeVector, b: &AmplitudeVector) -> Result<f64> {
    a.ensure_normalized()?;
    b.ensure_normalized()?;
    let overlap = inner_product(a, b)?.norm_sqr();
    Ok(libm::sqrt((1.0 - overlap).clamp(0.0, 1.0)))
}

/// Index bookkeeping for splitting `n` qubits into a kept register and
/// its environment.
///
/// `kept[s] | env[e]` is the full basis index whose kept qubits read `s`
/// (first kept qubit most significant) and whose other qubits read `e`.
#[derive(Clone, Debug)]
pub struct Split {
    pub kept: Vec<usize>,
    pub env: Vec<usize>,
}

impl Split {
    /// `keep` holds 1-based qubit indices, strictly increasing.
    pub fn new(num_qubits: usize, keep: &[usize]) -> Result<Self> {
        if let Some(&bad) = keep.iter().find(|&&i| i == 0 || i > num_qubits) {
            return Err(Error::IndexOutOfRange { index: bad, num_qubits });
        }
        if keep.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSubset("kept qubits must be strictly increasing"));
        }
        let kept_bits: Vec<usize> = keep.iter().map(|&i| num_qubits - i).collect();
        let env_bits: Vec<usize> = (1..=num_qubits)
            .filter(|i| keep.binary_search(i).is_err())
            .map(|i| num_qubits - i)
            .collect();
        Ok(Self { kept: scatter_table(&kept_bits), env: scatter_table(&env_bits) })
    }
}

/// For bit positions `p_1..p_k` (first is most significant in the
/// compact index), maps every compact index to its scattered form.
fn scatter_table(positions: &[usize]) -> Vec<usize> {
    let k = positions.len();
    (0..1usize << k)
        .map(|s| {
            positions
                .iter()
                .enumerate()
                .filter(|(j, _)| (s >> (k - 1 - j)) & 1 == 1)
                .fold(0, |acc, (_, &p)| acc | (1usize << p))
        })
        .collect()
}

/// A dense `2^t × 2^t` density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    entries: DMatrix<C64>,
}

impl DensityMatrix {
    /// Wraps a matrix after checking shape, Hermiticity and unit trace.
    pub fn new(num_qubits: usize, entries: DMatrix<C64>) -> Result<Self> {
        let d = dim(num_qubits)?;
        if entries.nrows() != d || entries.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: entries.nrows() });
        }
        let rho = Self { num_qubits, entries };
        rho.check_hermitian()?;
        if (rho.trace().re - 1.0).abs() > TOLERANCE {
            return Err(Error::InvalidDensityMatrix("trace differs from 1"));
        }
        Ok(rho)
    }

    /// `|v⟩⟨v|`.
    pub fn from_pure(v: &AmplitudeVector) -> Self {
        let a = &v.amplitudes;
        let entries = DMatrix::from_fn(a.len(), a.len(), |i, j| a[i] * a[j].conj());
        Self { num_qubits: v.num_qubits, entries }
    }

    /// Uniform mixture of the given pure states.
    pub fn mixture(states: &[AmplitudeVector]) -> Result<Self> {
        let first = states.first().ok_or(Error::InvalidParameter("empty ensemble"))?;
        let d = first.dim();
        let mut entries = DMatrix::<C64>::zeros(d, d);
        for v in states {
            if v.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: v.dim() });
            }
            let a = &v.amplitudes;
            for j in 0..d {
                let col = a[j].conj();
                for i in 0..d {
                    entries[(i, j)] += a[i] * col;
                }
            }
        }
        entries /= C64::new(states.len() as f64, 0.0);
        Ok(Self { num_qubits: first.num_qubits, entries })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    fn check_hermitian(&self) -> Result<()> {
        let d = self.dim();
        for i in 0..d {
            for j in i..d {
                if (self.entries[(i, j)] - self.entries[(j, i)].conj()).modulus() > TOLERANCE {
                    return Err(Error::InvalidDensityMatrix("not Hermitian"));
                }
            }
        }
        Ok(())
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.check_hermitian()?;
        let d = self.dim();
        let mut off_diagonal = 0.0f64;
        let mut imaginary = 0.0f64;
        for j in 0..d {
            for i in 0..d {
                let e = self.entries[(i, j)];
                imaginary = imaginary.max(e.im.abs());
                if i != j {
                    off_diagonal = off_diagonal.max(e.modulus());
                }
            }
        }
        let mut values: Vec<f64> = if off_diagonal == 0.0 {
            (0..d).map(|i| self.entries[(i, i)].re).collect()
        } else if imaginary == 0.0 {
            let real = self.entries.map(|e| e.re);
            real.symmetric_eigenvalues().iter().copied().collect()
        } else {
            self.entries.clone().symmetric_eigenvalues().iter().copied().collect()
        };
        values.sort_by(f64::total_cmp);
        Ok(values)
    }

    /// Full validity check: Hermitian, unit trace, eigenvalues ≥ −1e−10.
    pub fn validate(&self) -> Result<()> {
        if (self.trace().re - 1.0).abs() > TOLERANCE {
            return Err(Error::InvalidDensityMatrix("trace differs from 1"));
        }
        if self.eigenvalues()?.first().is_some_and(|&l| l < -TOLERANCE) {
            return Err(Error::InvalidDensityMatrix("negative eigenvalue"));
        }
        Ok(())
    }

    /// `ρ ⊗ σ`.
    pub fn kron(&self, other: &Self) -> Self {
        Self { num_qubits: self.num_qubits + other.num_qubits, entries: self.entries.kronecker(&other.entries) }
    }
}

/// Reduced state on the 1-based qubits in `keep` (strictly increasing).
pub fn partial_trace(state: &AmplitudeVector, keep: &[usize]) -> Result<DensityMatrix> {
    let split = Split::new(state.num_qubits, keep)?;
    let d = split.kept.len();
    let a = &state.amplitudes;
    let mut entries = DMatrix::<C64>::zeros(d, d);
    for &e in &split.env {
        for (j, &kj) in split.kept.iter().enumerate() {
            let col = a[kj | e].conj();
            if col == C64::new(0.0, 0.0) {
                continue;
            }
            for (i, &ki) in split.kept.iter().enumerate() {
                entries[(i, j)] += a[ki | e] * col;
            }
        }
    }
    Ok(DensityMatrix { num_qubits: keep.len(), entries })
}

/// `−Σ λ log₂ λ` over the eigenvalues of `rho`, in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let eigenvalues = rho.eigenvalues()?;
    if eigenvalues.first().is_some_and(|&l| l < -TOLERANCE) {
        return Err(Error::InvalidDensityMatrix("negative eigenvalue"));
    }
    let entropy: f64 = eigenvalues
        .iter()
        .filter(|&&l| l > EIGEN_FLOOR)
        .map(|&l| -l * libm::log2(l))
        .sum();
    Ok(entropy.clamp(0.0, rho.num_qubits as f64))
}

/// `⟨effect|ρ|effect⟩`, clipped to `[0, 1]`.
pub fn born_probability(rho: &DensityMatrix, effect: &AmplitudeVector) -> Result<f64> {
    if rho.dim() != effect.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: effect.dim() });
    }
    let e = &effect.amplitudes;
    let mut total = C64::new(0.0, 0.0);
    for (j, ej) in e.iter().enumerate() {
        let row: C64 = e.iter().enumerate().map(|(i, ei)| ei.conj() * rho.entries[(i, j)]).sum();
        total += row * ej;
    }
    if total.im.abs() > TOLERANCE {
        return Err(Error::InvalidDensityMatrix("expectation value is not real"));
    }
    Ok(total.re.clamp(0.0, 1.0))
}

/// A distribution over all `m`-bit outcomes, indexed by the outcome's
/// integer value.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityDistribution {
    bits: usize,
    probabilities: Vec<f64>,
    unnormalized: bool,
}

impl ProbabilityDistribution {
    /// A normalized distribution; the sum must be within 1e−9 of 1.
    pub fn new(bits: usize, probabilities: Vec<f64>) -> Result<Self> {
        let dist = Self::unnormalized(bits, probabilities)?;
        if (dist.total() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter("probabilities do not sum to 1"));
        }
        Ok(Self { unnormalized: false, ..dist })
    }

    /// Weights that are not required to sum to one.
    pub fn unnormalized(bits: usize, probabilities: Vec<f64>) -> Result<Self> {
        let expected = dim(bits)?;
        if probabilities.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: probabilities.len() });
        }
        if probabilities.iter().any(|p| !(0.0..=1.0 + 1e-9).contains(p)) {
            return Err(Error::InvalidParameter("probability outside [0, 1]"));
        }
        Ok(Self { bits, probabilities, unnormalized: true })
    }

    pub fn uniform(bits: usize) -> Self {
        let d = 1usize << bits;
        Self { bits, probabilities: vec![1.0 / d as f64; d], unnormalized: false }
    }

    pub fn point_mass(z: BitString) -> Self {
        let mut probabilities = vec![0.0; 1usize << z.len()];
        probabilities[z.value() as usize] = 1.0;
        Self { bits: z.len(), probabilities, unnormalized: false }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn is_unnormalized(&self) -> bool {
        self.unnormalized
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn prob(&self, z: &BitString) -> f64 {
        self.probabilities[z.value() as usize]
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Outcomes paired with their probabilities, in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (BitString, f64)> + '_ {
        let bits = self.bits;
        self.probabilities
            .iter()
            .enumerate()
            .map(move |(z, &p)| (BitString::new(bits, z as u64).expect("outcome fits"), p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn plus() -> AmplitudeVector {
        AmplitudeVector::from_real(1, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap()
    }

    #[test]
    fn tensor_of_basis_states() {
        let zero = AmplitudeVector::basis(1, 0).unwrap();
        let one = AmplitudeVector::basis(1, 1).unwrap();
        assert_eq!(tensor_product(&zero, &zero), AmplitudeVector::basis(2, 0).unwrap());
        let v = tensor_product(&one, &plus());
        assert_eq!(v.num_qubits(), 2);
        let expected = [0.0, 0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2];
        for (a, e) in v.amplitudes().iter().zip(expected) {
            assert!((a - c(e)).modulus() < 1e-15);
        }
    }

    #[test]
    fn inner_products_and_distances() {
        let zero = AmplitudeVector::basis(1, 0).unwrap();
        let one = AmplitudeVector::basis(1, 1).unwrap();
        assert_eq!(inner_product(&zero, &zero).unwrap(), c(1.0));
        assert_eq!(inner_product(&zero, &one).unwrap(), c(0.0));
        assert_eq!(trace_distance_pure(&plus(), &plus()).unwrap(), 0.0);
        assert_eq!(trace_distance_pure(&zero, &one).unwrap(), 1.0);
        let two = AmplitudeVector::basis(2, 0).unwrap();
        assert!(matches!(inner_product(&zero, &two), Err(Error::DimensionMismatch { .. })));
        let loose = AmplitudeVector::from_real(1, &[1.0, 1.0]).unwrap();
        assert!(matches!(trace_distance_pure(&loose, &zero), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn inner_product_is_conjugate_linear_in_first_argument() {
        let a = AmplitudeVector::new(1, vec![C64::new(0.0, 1.0), c(0.0)]).unwrap();
        let b = AmplitudeVector::basis(1, 0).unwrap();
        assert_eq!(inner_product(&a, &b).unwrap(), C64::new(0.0, -1.0));
    }

    #[test]
    fn partial_trace_identity_and_product_cases() {
        let v = tensor_product(&plus(), &AmplitudeVector::basis(1, 1).unwrap());
        let all = partial_trace(&v, &[1, 2]).unwrap();
        assert_eq!(all, DensityMatrix::from_pure(&v));
        let first = partial_trace(&v, &[1]).unwrap();
        let expected = DensityMatrix::from_pure(&plus());
        assert!((first.entries() - expected.entries()).norm() < 1e-15);
        let second = partial_trace(&v, &[2]).unwrap();
        assert!((second.get(1, 1) - c(1.0)).modulus() < 1e-15);
        assert!(matches!(partial_trace(&v, &[3]), Err(Error::IndexOutOfRange { index: 3, .. })));
        assert!(partial_trace(&v, &[2, 1]).is_err());
    }

    #[test]
    fn entropy_of_pure_and_mixed_states() {
        let pure = DensityMatrix::from_pure(&plus());
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-12);
        let mixed = DensityMatrix::mixture(&[
            AmplitudeVector::basis(1, 0).unwrap(),
            AmplitudeVector::basis(1, 1).unwrap(),
        ])
        .unwrap();
        assert!((von_neumann_entropy(&mixed).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_rejects_invalid_input() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.3), c(0.0), c(0.5)]);
        assert!(DensityMatrix::new(1, m).is_err());
        let negative = DensityMatrix { num_qubits: 1, entries: DMatrix::from_diagonal_element(2, 2, c(0.0)) };
        let mut entries = negative.entries.clone();
        entries[(0, 0)] = c(1.5);
        entries[(1, 1)] = c(-0.5);
        let rho = DensityMatrix { num_qubits: 1, entries };
        assert!(matches!(von_neumann_entropy(&rho), Err(Error::InvalidDensityMatrix(_))));
    }

    #[test]
    fn complex_hermitian_eigenvalues() {
        // |+i⟩⟨+i| has eigenvalues 0 and 1.
        let v = AmplitudeVector::new(1, vec![c(FRAC_1_SQRT_2), C64::new(0.0, FRAC_1_SQRT_2)]).unwrap();
        let eig = DensityMatrix::from_pure(&v).eigenvalues().unwrap();
        assert!(eig[0].abs() < 1e-12 && (eig[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn born_rule_on_basis_states() {
        let rho = DensityMatrix::from_pure(&AmplitudeVector::basis(1, 0).unwrap());
        assert_eq!(born_probability(&rho, &AmplitudeVector::basis(1, 0).unwrap()).unwrap(), 1.0);
        assert_eq!(born_probability(&rho, &AmplitudeVector::basis(1, 1).unwrap()).unwrap(), 0.0);
        assert!(born_probability(&rho, &AmplitudeVector::basis(2, 1).unwrap()).is_err());
    }

    #[test]
    fn distributions_check_their_totals() {
        assert!(ProbabilityDistribution::new(1, vec![0.5, 0.4]).is_err());
        let raw = ProbabilityDistribution::unnormalized(1, vec![0.5, 0.4]).unwrap();
        assert!(raw.is_unnormalized());
        let u = ProbabilityDistribution::uniform(2);
        assert_eq!(u.probabilities(), &[0.25; 4]);
        assert!(ProbabilityDistribution::new(1, vec![0.5]).is_err());
    }
}
