//! The ⊛_{l,k} operation on ℤ and its iterated forms.
//!
//! `a ⊛ b` is the pullback of integer multiplication along the affine map
//! `a ↦ l·a + k` (the *image* of `a`). Everything in this module is computed
//! through images: a ⊛-product of `a₁ … aₙ` is the preimage of `∏ (l·aᵢ + k)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::ExactScalar;

/// Default bound on the input length accepted by [`SymmetricContext::gfold_esp`].
pub const DEFAULT_ESP_MAX_LEN: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymmetricError {
    #[error("l must be nonzero")]
    ZeroL,
    #[error("l = {l} does not divide k(k-1) = {product} for k = {k}")]
    DivisibilityViolation { l: i64, k: i64, product: i128 },
    #[error("input list must be nonempty")]
    EmptyInput,
    #[error("input length {len} exceeds the configured bound {max}")]
    LengthExceeded { len: usize, max: usize },
    #[error("context (l={l}, k={k}) has no integer identity: l does not divide k-1")]
    NonUnitalIdentity { l: i64, k: i64 },
    #[error("negative power of an element whose image l*a+k is zero")]
    DivisionByZeroImage,
    #[error("{a} is not invertible: its image {image} is not ±1")]
    NotInvertible { a: BigInt, image: BigInt },
    #[error("exponent {0} is too large to evaluate")]
    ExponentTooLarge(String),
}

impl SymmetricError {
    /// Variant name, for messages and machine-readable error output.
    pub fn kind(&self) -> &'static str {
        match self {
            SymmetricError::ZeroL => "ZeroL",
            SymmetricError::DivisibilityViolation { .. } => "DivisibilityViolation",
            SymmetricError::EmptyInput => "EmptyInput",
            SymmetricError::LengthExceeded { .. } => "LengthExceeded",
            SymmetricError::NonUnitalIdentity { .. } => "NonUnitalIdentity",
            SymmetricError::DivisionByZeroImage => "DivisionByZeroImage",
            SymmetricError::NotInvertible { .. } => "NotInvertible",
            SymmetricError::ExponentTooLarge(_) => "ExponentTooLarge",
        }
    }
}

/// The pair `(l, k)` with `l ≠ 0` and `l | k(k-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawContext", into = "RawContext")]
pub struct SymmetricContext {
    l: i64,
    k: i64,
    unital: bool,
}

#[derive(Serialize, Deserialize)]
struct RawContext {
    l: i64,
    k: i64,
}

impl TryFrom<RawContext> for SymmetricContext {
    type Error = SymmetricError;
    fn try_from(raw: RawContext) -> Result<Self, Self::Error> {
        SymmetricContext::new(raw.l, raw.k)
    }
}

impl From<SymmetricContext> for RawContext {
    fn from(ctx: SymmetricContext) -> Self {
        RawContext { l: ctx.l, k: ctx.k }
    }
}

/// Divide and insist the division is exact. The context invariant guarantees
/// exactness for every call site; a failure here is a bug, not bad input.
fn div_exact(numerator: &BigInt, divisor: &BigInt) -> BigInt {
    let (q, r) = numerator.div_rem(divisor);
    assert!(r.is_zero(), "inexact division {numerator} / {divisor}");
    q
}

impl SymmetricContext {
    /// Validates `l ≠ 0` and `l | k(k-1)` and records whether the identity
    /// `-(k-1)/l` is an integer.
    pub fn new(l: i64, k: i64) -> Result<Self, SymmetricError> {
        if l == 0 {
            return Err(SymmetricError::ZeroL);
        }
        let product = i128::from(k) * (i128::from(k) - 1);
        if product % i128::from(l) != 0 {
            return Err(SymmetricError::DivisibilityViolation { l, k, product });
        }
        let unital = (i128::from(k) - 1) % i128::from(l) == 0;
        Ok(SymmetricContext { l, k, unital })
    }

    pub fn l(&self) -> i64 {
        self.l
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn is_unital(&self) -> bool {
        self.unital
    }

    pub(crate) fn l_big(&self) -> BigInt {
        BigInt::from(self.l)
    }

    pub(crate) fn k_big(&self) -> BigInt {
        BigInt::from(self.k)
    }

    /// The ⊛-identity `-(k-1)/l`, when it is an integer.
    pub fn identity(&self) -> Option<BigInt> {
        self.unital.then(|| BigInt::from((1 - i128::from(self.k)) / i128::from(self.l)))
    }

    fn require_identity(&self) -> Result<BigInt, SymmetricError> {
        self.identity()
            .ok_or(SymmetricError::NonUnitalIdentity { l: self.l, k: self.k })
    }

    /// The affine image `l·a + k`.
    pub fn image(&self, a: &BigInt) -> BigInt {
        self.l_big() * a + self.k_big()
    }

    /// The integer `v` with `l·v + k = image`, if there is one.
    pub fn preimage(&self, image: &BigInt) -> Option<BigInt> {
        let (q, r) = (image - self.k_big()).div_rem(&self.l_big());
        r.is_zero().then_some(q)
    }

    /// `(image - k) / l` in the rationals.
    pub fn preimage_exact(&self, image: &ExactScalar) -> ExactScalar {
        let shifted = image.as_rational() - num_rational::BigRational::from_integer(self.k_big());
        ExactScalar::from(shifted / num_rational::BigRational::from_integer(self.l_big()))
    }

    /// Preimage of an image known to lie in `l·ℤ + k`. Products of images
    /// always do: `image ≡ k (mod l)` and `k² ≡ k (mod l)`.
    fn preimage_of_product(&self, image: &BigInt) -> BigInt {
        div_exact(&(image - self.k_big()), &self.l_big())
    }

    /// `a ⊛ b = l·a·b + k(a + b) + (k² - k)/l`.
    pub fn star(&self, a: &BigInt, b: &BigInt) -> BigInt {
        let l = self.l_big();
        let k = self.k_big();
        let offset = div_exact(&(&k * &k - &k), &l);
        &l * a * b + &k * (a + b) + offset
    }

    /// The (l,k)-symmetric polynomial of `xs`, i.e. the ⊛-product of all
    /// entries, computed as `(∏ (l·xᵢ + k) - k) / l`.
    pub fn gfold(&self, xs: &[BigInt]) -> Result<BigInt, SymmetricError> {
        if xs.is_empty() {
            return Err(SymmetricError::EmptyInput);
        }
        let product = xs.iter().fold(BigInt::one(), |acc, x| acc * self.image(x));
        Ok(self.preimage_of_product(&product))
    }

    /// [`Self::gfold`] through the elementary symmetric polynomials:
    /// `Σⱼ l^{j-1} k^{n-j} eⱼ(xs) + (kⁿ - k)/l`. Kept as an independent
    /// evaluation route for cross-checking; bounded by [`DEFAULT_ESP_MAX_LEN`].
    pub fn gfold_esp(&self, xs: &[BigInt]) -> Result<BigInt, SymmetricError> {
        self.gfold_esp_bounded(xs, DEFAULT_ESP_MAX_LEN)
    }

    pub fn gfold_esp_bounded(&self, xs: &[BigInt], max_len: usize) -> Result<BigInt, SymmetricError> {
        if xs.is_empty() {
            return Err(SymmetricError::EmptyInput);
        }
        if xs.len() > max_len {
            return Err(SymmetricError::LengthExceeded { len: xs.len(), max: max_len });
        }
        let n = xs.len();
        let l = self.l_big();
        let k = self.k_big();
        let e = elementary_symmetric(xs);
        let mut total = BigInt::zero();
        for (j, ej) in e.iter().enumerate().skip(1) {
            let coefficient = num_traits::pow(l.clone(), j - 1) * num_traits::pow(k.clone(), n - j);
            total += coefficient * ej;
        }
        let tail = div_exact(&(num_traits::pow(k.clone(), n) - &k), &l);
        Ok(total + tail)
    }

    /// `a^{(c)}`: the value `v` with `l·v + k = (l·a + k)^c`.
    ///
    /// `c = 0` yields the identity and needs a unital context; `c < 0`
    /// inverts the image and is generally not an integer.
    pub fn power(&self, a: &BigInt, c: i64) -> Result<ExactScalar, SymmetricError> {
        if c == 0 {
            return self.require_identity().map(ExactScalar::from_integer);
        }
        let image = self.image(a);
        if c < 0 && image.is_zero() {
            return Err(SymmetricError::DivisionByZeroImage);
        }
        let magnitude = u32::try_from(c.unsigned_abs())
            .map_err(|_| SymmetricError::ExponentTooLarge(c.to_string()))?;
        let raised = num_traits::pow(image, magnitude as usize);
        if c > 0 {
            Ok(ExactScalar::from_integer(self.preimage_of_product(&raised)))
        } else {
            let inverted = ExactScalar::new(BigInt::one(), raised);
            Ok(self.preimage_exact(&inverted))
        }
    }

    /// The ⊛-inverse of `a`; exists in ℤ only when `l·a + k = ±1`.
    pub fn inverse(&self, a: &BigInt) -> Result<BigInt, SymmetricError> {
        self.require_identity()?;
        let image = self.image(a);
        if image.abs().is_one() {
            // ±1 is its own multiplicative inverse.
            Ok(a.clone())
        } else {
            Err(SymmetricError::NotInvertible { a: a.clone(), image })
        }
    }

    /// ⊛ extended to the rationals (same affine formula).
    pub fn star_exact(&self, a: &ExactScalar, b: &ExactScalar) -> ExactScalar {
        let product = self.image_exact(a).as_rational() * self.image_exact(b).as_rational();
        self.preimage_exact(&ExactScalar::from(product))
    }

    /// `l·a + k` for a rational `a`.
    pub fn image_exact(&self, a: &ExactScalar) -> ExactScalar {
        let l = num_rational::BigRational::from_integer(self.l_big());
        let k = num_rational::BigRational::from_integer(self.k_big());
        ExactScalar::from(l * a.as_rational() + k)
    }

    /// `a^{(c)}` for a rational base. `c = 0` gives `-(k-1)/l`, which is an
    /// integer only in unital contexts; in the rational extension it always exists.
    pub fn power_exact(&self, a: &ExactScalar, c: i64) -> Result<ExactScalar, SymmetricError> {
        let image = self.image_exact(a);
        let raised = image.pow(c).ok_or(if image.is_zero() {
            SymmetricError::DivisionByZeroImage
        } else {
            SymmetricError::ExponentTooLarge(c.to_string())
        })?;
        Ok(self.preimage_exact(&raised))
    }
}

/// `[e₀, e₁, …, eₙ]` of `xs` by the usual O(n²) recurrence (`e₀ = 1`).
pub fn elementary_symmetric(xs: &[BigInt]) -> Vec<BigInt> {
    let mut e = vec![BigInt::zero(); xs.len() + 1];
    e[0] = BigInt::one();
    for (i, x) in xs.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            let term = &e[j - 1] * x;
            e[j] += term;
        }
    }
    e
}
