//! The exclusion game: Alice holds `x ∈ {0,1}^n`, Bob holds `y ⊆ [n]`
//! with `|y| = m`, and they win when Bob outputs any `z ≠ x|_y`.

use alloc::vec::Vec;

use crate::bits::{BitString, Subset, MAX_BITS};
use crate::bounds::ExactRational;
use crate::error::{Error, Result};

/// Default largest `n` for which inputs are enumerated exhaustively.
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 12;

/// `EXC_{n,m,γ}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameInstance {
    n: usize,
    m: usize,
    gamma: ExactRational,
}

impl GameInstance {
    pub fn new(n: usize, m: usize, gamma: ExactRational) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::InvalidGame("need 1 <= m <= n"));
        }
        if n > MAX_BITS {
            return Err(Error::InvalidGame("n is limited to 64"));
        }
        if gamma.is_negative() || gamma >= ExactRational::one() {
            return Err(Error::InvalidGame("need 0 <= gamma < 1"));
        }
        Ok(Self { n, m, gamma })
    }

    pub fn zero_error(n: usize, m: usize) -> Result<Self> {
        Self::new(n, m, ExactRational::zero())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn gamma(&self) -> &ExactRational {
        &self.gamma
    }
}

/// One input pair `(x, y)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InputPair {
    pub x: BitString,
    pub y: Subset,
}

impl InputPair {
    pub fn new(x: BitString, y: Subset) -> Result<Self> {
        if y.universe() != x.len() {
            return Err(Error::LengthMismatch { expected: x.len(), found: y.universe() });
        }
        Ok(Self { x, y })
    }

    pub fn restriction(&self) -> BitString {
        restrict_unchecked(&self.x, &self.y)
    }
}

/// `x` restricted to the positions in `y`, in ascending index order.
pub fn restrict(x: &BitString, y: &Subset) -> Result<BitString> {
    if y.universe() != x.len() {
        return Err(Error::LengthMismatch { expected: x.len(), found: y.universe() });
    }
    Ok(restrict_unchecked(x, y))
}

fn restrict_unchecked(x: &BitString, y: &Subset) -> BitString {
    let value = y.indices().iter().fold(0u64, |acc, &i| (acc << 1) | x.bit(i) as u64);
    BitString::new(y.len(), value).expect("restriction fits")
}

/// True iff `z ≠ x|_y`.
pub fn is_win(x: &BitString, y: &Subset, z: &BitString) -> Result<bool> {
    if z.len() != y.len() {
        return Err(Error::LengthMismatch { expected: y.len(), found: z.len() });
    }
    Ok(restrict(x, y)? != *z)
}

/// All size-`m` subsets of `{1..n}` in lexicographic order.
pub fn subsets(n: usize, m: usize) -> Subsets {
    Subsets { n, current: if m <= n { Some((1..=m).collect()) } else { None } }
}

#[derive(Clone, Debug)]
pub struct Subsets {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for Subsets {
    type Item = Subset;

    fn next(&mut self) -> Option<Subset> {
        let current = self.current.take()?;
        let out = Subset::new(self.n, current.clone()).expect("valid by construction");
        let m = current.len();
        let mut next = current;
        // Rightmost index that can still advance.
        if let Some(j) = (0..m).rev().find(|&j| next[j] < self.n - (m - 1 - j)) {
            next[j] += 1;
            for l in j + 1..m {
                next[l] = next[l - 1] + 1;
            }
            self.current = Some(next);
        }
        Some(out)
    }
}

/// All `2^n` strings of length `n` in lexicographic order.
pub fn strings(n: usize) -> impl Iterator<Item = BitString> + Clone {
    (0..1u64 << n).map(move |v| BitString::new(n, v).expect("fits"))
}

/// Every `(x, y)` pair of `EXC_{n,m,·}` exactly once: `x` in
/// lexicographic order, then `y` in lexicographic order.
pub fn enumerate_inputs(n: usize, m: usize, cap: usize) -> Result<impl Iterator<Item = InputPair>> {
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    if m == 0 || m > n {
        return Err(Error::InvalidGame("need 1 <= m <= n"));
    }
    let ys: Vec<Subset> = subsets(n, m).collect();
    Ok(strings(n).flat_map(move |x| {
        ys.clone().into_iter().map(move |y| InputPair { x, y })
    }))
}
