//! Ordinary integer polynomials and ⊛-polynomials `(ℤᵐ, +) → (ℤ, ⊛)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::images::{ImageError, ImageProduct, Limit};
use crate::scalar::ExactScalar;
use crate::symmetric::{SymmetricContext, SymmetricError};

/// An ordinary polynomial over ℤ, coefficients stored constant term first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    coefficients: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(coefficients: Vec<BigInt>) -> Self {
        IntPolynomial { coefficients }
    }

    pub fn from_i64(coefficients: &[i64]) -> Self {
        Self::new(coefficients.iter().copied().map(BigInt::from).collect())
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn has_zero_constant(&self) -> bool {
        self.coefficients.first().is_none_or(Zero::is_zero)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coefficients
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }
}

/// `P(x) = aₙ^{(xⁿ)} ⊛ aₙ₋₁^{(xⁿ⁻¹)} ⊛ ⋯ ⊛ a₀`.
///
/// `coefficients[i]` is `aᵢ`; the constant term comes first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarPolynomial {
    coefficients: Vec<BigInt>,
    ctx: SymmetricContext,
}

fn image_error(err: ImageError, exponent_hint: impl FnOnce() -> String) -> SymmetricError {
    match err {
        ImageError::DivisionByZeroImage => SymmetricError::DivisionByZeroImage,
        ImageError::TooLarge => SymmetricError::ExponentTooLarge(exponent_hint()),
    }
}

impl StarPolynomial {
    /// `coefficients` must be nonempty (degree `n = len - 1 >= 0`).
    pub fn new(ctx: SymmetricContext, coefficients: Vec<BigInt>) -> Result<Self, SymmetricError> {
        if coefficients.is_empty() {
            return Err(SymmetricError::EmptyInput);
        }
        Ok(StarPolynomial { coefficients, ctx })
    }

    pub fn ctx(&self) -> &SymmetricContext {
        &self.ctx
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Membership in the class of polynomials with `P(0)` equal to the identity.
    pub fn has_identity_constant(&self) -> bool {
        self.ctx.identity().as_ref() == Some(&self.coefficients[0])
    }

    /// The image product `∏ᵢ (l·aᵢ + k)^{xⁱ}` whose preimage is `P(x)`.
    pub(crate) fn image_product(&self, x: &BigInt) -> ImageProduct {
        let mut product = ImageProduct::new();
        let mut power = BigInt::one();
        for a in &self.coefficients {
            product.push(self.ctx.image(a), power.clone());
            power *= x;
        }
        product
    }

    /// `(1/l)[(l·aₙ + k)^{xⁿ} ⋯ (l·a₀ + k) - k]` in exact rationals.
    pub fn eval(&self, x: &BigInt) -> Result<ExactScalar, SymmetricError> {
        let value = self
            .image_product(x)
            .evaluate(&self.ctx, &Limit::Exact)
            .map_err(|e| image_error(e, || format!("x^{} at x = {x}", self.degree())))?;
        match value.preimage(&self.ctx) {
            crate::images::Preimage::Value(v) => Ok(v),
            crate::images::Preimage::OutOfRange { .. } => unreachable!("exact limit"),
        }
    }
}

/// `P(x₁,…,xₘ) = ⊛ over monomials of α^{(x₁^{i₁}⋯xₘ^{iₘ})}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiStarPolynomial {
    arity: usize,
    monomials: BTreeMap<Vec<u32>, BigInt>,
    ctx: SymmetricContext,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolynomialError {
    #[error("monomial exponent vector {exponents:?} has arity {got}, expected {expected}")]
    ArityMismatch { exponents: Vec<u32>, expected: usize, got: usize },
    #[error("evaluation point has {got} coordinates, polynomial has arity {expected}")]
    PointArity { expected: usize, got: usize },
    #[error(transparent)]
    Symmetric(#[from] SymmetricError),
}

impl MultiStarPolynomial {
    pub fn new(
        ctx: SymmetricContext,
        arity: usize,
        monomials: impl IntoIterator<Item = (Vec<u32>, BigInt)>,
    ) -> Result<Self, PolynomialError> {
        let mut map = BTreeMap::new();
        for (exponents, coefficient) in monomials {
            if exponents.len() != arity {
                let got = exponents.len();
                return Err(PolynomialError::ArityMismatch { exponents, expected: arity, got });
            }
            // Repeated exponent vectors combine by ⊛ (their images multiply).
            let merged = match map.remove(&exponents) {
                Some(previous) => ctx.star(&previous, &coefficient),
                None => coefficient,
            };
            map.insert(exponents, merged);
        }
        Ok(MultiStarPolynomial { arity, monomials: map, ctx })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn ctx(&self) -> &SymmetricContext {
        &self.ctx
    }

    pub fn monomials(&self) -> &BTreeMap<Vec<u32>, BigInt> {
        &self.monomials
    }

    pub fn total_degree(&self) -> u32 {
        self.monomials.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub(crate) fn image_product(&self, point: &[BigInt]) -> Result<ImageProduct, PolynomialError> {
        if point.len() != self.arity {
            return Err(PolynomialError::PointArity { expected: self.arity, got: point.len() });
        }
        let mut product = ImageProduct::new();
        for (exponents, alpha) in &self.monomials {
            let exponent = exponents
                .iter()
                .zip(point)
                .fold(BigInt::one(), |acc, (&i, x)| acc * num_traits::pow(x.clone(), i as usize));
            product.push(self.ctx.image(alpha), exponent);
        }
        Ok(product)
    }

    /// Exact value at `point`. An empty ⊛-fold (no monomial with a nonzero
    /// exponent) is the identity and needs a unital context.
    pub fn eval(&self, point: &[BigInt]) -> Result<ExactScalar, PolynomialError> {
        let product = self.image_product(point)?;
        if product.is_empty() && !self.ctx.is_unital() {
            return Err(SymmetricError::NonUnitalIdentity { l: self.ctx.l(), k: self.ctx.k() }.into());
        }
        let value = product
            .evaluate(&self.ctx, &Limit::Exact)
            .map_err(|e| image_error(e, || format!("monomial exponent at {point:?}")))?;
        match value.preimage(&self.ctx) {
            crate::images::Preimage::Value(v) => Ok(v),
            crate::images::Preimage::OutOfRange { .. } => unreachable!("exact limit"),
        }
    }
}
