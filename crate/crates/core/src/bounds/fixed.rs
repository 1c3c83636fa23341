use alloc::string::String;
use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Binary fixed-point real `mantissa · 2^{-frac_bits}` with an explicit
/// working precision. Operands of a binary operation must share the same
/// precision.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct HighPrecision {
    mantissa: BigInt,
    frac_bits: u32,
}

impl HighPrecision {
    pub fn from_integer(value: impl Into<BigInt>, frac_bits: u32) -> Self {
        Self { mantissa: value.into() << frac_bits as usize, frac_bits }
    }

    pub fn zero(frac_bits: u32) -> Self {
        Self { mantissa: BigInt::zero(), frac_bits }
    }

    pub fn one(frac_bits: u32) -> Self {
        Self::from_integer(1, frac_bits)
    }

    /// Exact conversion of a finite double (truncated below `2^{-frac_bits}`).
    pub fn from_f64(value: f64, frac_bits: u32) -> Self {
        assert!(value.is_finite(), "non-finite value");
        if value == 0.0 {
            return Self::zero(frac_bits);
        }
        let bits = value.abs().to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let (significand, exp) = if exp == 0 {
            (bits & ((1 << 52) - 1), -1074)
        } else {
            ((bits & ((1 << 52) - 1)) | (1 << 52), exp - 1075)
        };
        let shift = exp + frac_bits as i64;
        let magnitude = if shift >= 0 {
            BigInt::from(significand) << shift as usize
        } else {
            BigInt::from(significand) >> (-shift) as usize
        };
        let mantissa = if value < 0.0 { -magnitude } else { magnitude };
        Self { mantissa, frac_bits }
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.frac_bits, other.frac_bits, "precision mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        Self { mantissa: &self.mantissa + &other.mantissa, frac_bits: self.frac_bits }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other);
        Self { mantissa: &self.mantissa - &other.mantissa, frac_bits: self.frac_bits }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        Self { mantissa: (&self.mantissa * &other.mantissa) >> self.frac_bits as usize, frac_bits: self.frac_bits }
    }

    pub fn mul_integer(&self, factor: &BigUint) -> Self {
        Self { mantissa: &self.mantissa * BigInt::from(factor.clone()), frac_bits: self.frac_bits }
    }

    /// Truncating division; panics on a zero divisor.
    pub fn div(&self, other: &Self) -> Self {
        self.check(other);
        assert!(!other.is_zero(), "division by zero");
        Self {
            mantissa: (&self.mantissa << self.frac_bits as usize).div_floor(&other.mantissa),
            frac_bits: self.frac_bits,
        }
    }

    pub fn powi(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.frac_bits);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Positive `m`-th root of the positive integer `base`, by Newton's
    /// method started from the double-precision estimate.
    pub fn integer_root(base: u64, m: u32, frac_bits: u32) -> Self {
        assert!(base > 0 && m > 0);
        if m == 1 {
            return Self::from_integer(base, frac_bits);
        }
        let target = Self::from_integer(base, frac_bits);
        let m_fixed = Self::from_integer(m, frac_bits);
        let mut y = Self::from_f64(libm::pow(base as f64, 1.0 / m as f64), frac_bits);
        for _ in 0..64 {
            let y_pow = y.powi(m as u64 - 1);
            let residual = y_pow.mul(&y).sub(&target);
            let step = residual.div(&m_fixed.mul(&y_pow));
            y = y.sub(&step);
            if step.mantissa.magnitude() <= &BigUint::from(4u32) {
                break;
            }
        }
        y
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.is_negative(), "square root of a negative value");
        let scaled = self.mantissa.magnitude() << self.frac_bits as usize;
        Self { mantissa: BigInt::from_biguint(Sign::Plus, scaled.sqrt()), frac_bits: self.frac_bits }
    }

    /// Nearest double, handling magnitudes far below `f64::MIN_POSITIVE`.
    pub fn to_f64(&self) -> f64 {
        let magnitude = self.mantissa.magnitude();
        let bits = magnitude.bits();
        if bits == 0 {
            return 0.0;
        }
        // Keep 64 leading bits so the conversion rounds once.
        let drop = bits.saturating_sub(64);
        let top = (magnitude >> drop as usize).to_u64().expect("64 bits") as f64;
        let value = libm::scalbn(top, drop as i32 - self.frac_bits as i32);
        if self.is_negative() {
            -value
        } else {
            value
        }
    }

    /// `log₂|value|`; `-inf` for zero.
    pub fn log2(&self) -> f64 {
        let magnitude = self.mantissa.magnitude();
        let bits = magnitude.bits();
        if bits == 0 {
            return f64::NEG_INFINITY;
        }
        let drop = bits.saturating_sub(64);
        let top = (magnitude >> drop as usize).to_u64().expect("64 bits") as f64;
        libm::log2(top) + drop as f64 - self.frac_bits as f64
    }

    /// Decimal expansion truncated to `digits` places after the point.
    pub fn to_decimal(&self, digits: usize) -> String {
        let mut out = String::new();
        if self.is_negative() {
            out.push('-');
        }
        let magnitude = self.mantissa.magnitude();
        let one = BigUint::one() << self.frac_bits as usize;
        let (int, mut frac) = magnitude.div_rem(&one);
        out.push_str(&alloc::format!("{int}."));
        for _ in 0..digits {
            frac *= 10u32;
            let (d, r) = frac.div_rem(&one);
            out.push(char::from(b'0' + d.to_u8().expect("digit")));
            frac = r;
        }
        out
    }
}

impl fmt::Debug for HighPrecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HighPrecision({})", self.to_decimal(30))
    }
}

impl fmt::Display for HighPrecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal(f.precision().unwrap_or(50)))
    }
}
