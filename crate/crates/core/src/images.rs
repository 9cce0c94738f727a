//! Products of affine images `∏ (l·aᵢ + k)^{eᵢ}` with large exponents.
//!
//! Every family in this crate reduces to such a product followed by the
//! preimage `(P - k)/l`. Exponents like `c^d` grow quickly, so when the caller
//! only cares about values inside a window the product is bounded from below
//! by bit lengths and never materialised once it is certainly out of range.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::scalar::ExactScalar;
use crate::symmetric::SymmetricContext;

/// Hard ceiling on the bit length of any product that is computed exactly.
pub(crate) const MAX_EXACT_BITS: u64 = 1 << 24;

#[derive(Debug, Clone)]
pub(crate) enum Limit {
    /// Compute exactly (up to [`MAX_EXACT_BITS`]).
    Exact,
    /// Only preimages with `|value| <= bound` matter.
    Magnitude(BigInt),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum ImageValue {
    Exact(BigRational),
    /// `|P|` certainly exceeds the limit. Only possible when every exponent
    /// is non-negative, so `P` is an integer; `residue = P mod |l|`.
    Huge { residue: BigInt },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum ImageError {
    DivisionByZeroImage,
    TooLarge,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct ImageProduct {
    factors: Vec<(BigInt, BigInt)>,
}

impl ImageProduct {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn push(&mut self, image: BigInt, exponent: BigInt) -> &mut Self {
        if !exponent.is_zero() {
            self.factors.push((image, exponent));
        }
        self
    }

    pub(crate) fn push_image(&mut self, image: BigInt) -> &mut Self {
        self.push(image, BigInt::one())
    }

    pub(crate) fn extend(&mut self, other: &ImageProduct) -> &mut Self {
        self.factors.extend(other.factors.iter().cloned());
        self
    }

    /// True when no factor is present (the empty product is 1).
    pub(crate) fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub(crate) fn evaluate(&self, ctx: &SymmetricContext, limit: &Limit) -> Result<ImageValue, ImageError> {
        if self.factors.iter().any(|(f, e)| f.is_zero() && e.is_negative()) {
            return Err(ImageError::DivisionByZeroImage);
        }
        if self.factors.iter().any(|(f, _)| f.is_zero()) {
            return Ok(ImageValue::Exact(BigRational::zero()));
        }
        let mut negative_sign = false;
        let mut lower_bits: u64 = 0;
        let mut upper_bits: u64 = 0;
        let mut any_negative = false;
        let mut active = Vec::new();
        for (f, e) in &self.factors {
            if f.abs().is_one() {
                if f.is_negative() && e.is_odd() {
                    negative_sign = !negative_sign;
                }
                continue;
            }
            any_negative |= e.is_negative();
            let bits = f.bits();
            let magnitude = e.abs().to_u64();
            let (lo, hi) = match magnitude {
                Some(m) => (m.saturating_mul(bits - 1), m.saturating_mul(bits)),
                None => (u64::MAX, u64::MAX),
            };
            lower_bits = lower_bits.saturating_add(lo);
            upper_bits = upper_bits.saturating_add(hi);
            active.push((f, e));
        }

        if let Limit::Magnitude(bound) = limit {
            if !any_negative {
                let cap = BigInt::from(ctx.l().unsigned_abs()) * bound + BigInt::from(ctx.k().unsigned_abs());
                if lower_bits >= cap.bits() && lower_bits > 0 {
                    return Ok(ImageValue::Huge { residue: self.residue(ctx) });
                }
            }
        }
        if upper_bits > MAX_EXACT_BITS {
            return Err(ImageError::TooLarge);
        }

        let mut numerator = BigInt::one();
        let mut denominator = BigInt::one();
        for (f, e) in active {
            let m = e.abs().to_usize().expect("bounded by MAX_EXACT_BITS");
            let raised = num_traits::pow(f.clone(), m);
            if e.is_negative() {
                denominator *= raised;
            } else {
                numerator *= raised;
            }
        }
        if negative_sign {
            numerator = -numerator;
        }
        Ok(ImageValue::Exact(BigRational::new(numerator, denominator)))
    }

    /// `P mod |l|` for a product with non-negative exponents.
    fn residue(&self, ctx: &SymmetricContext) -> BigInt {
        let modulus = BigInt::from(ctx.l().unsigned_abs());
        let mut acc = BigInt::one().mod_floor(&modulus);
        for (f, e) in &self.factors {
            acc = acc * f.mod_floor(&modulus).modpow(e, &modulus) % &modulus;
        }
        acc
    }
}

/// The preimage `(P - k)/l` of an evaluated product.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Preimage {
    Value(ExactScalar),
    /// Certainly outside the magnitude limit; `integral` tells whether the
    /// (unmaterialised) value would be an integer.
    OutOfRange { integral: bool },
}

impl ImageValue {
    pub(crate) fn preimage(&self, ctx: &SymmetricContext) -> Preimage {
        match self {
            ImageValue::Exact(p) => Preimage::Value(ctx.preimage_exact(&ExactScalar::from(p.clone()))),
            ImageValue::Huge { residue } => {
                let modulus = BigInt::from(ctx.l().unsigned_abs());
                let k = BigInt::from(ctx.k()).mod_floor(&modulus);
                Preimage::OutOfRange { integral: residue.mod_floor(&modulus) == k }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn exact_product_and_preimage() {
        let ctx = SymmetricContext::new(3, 1).unwrap();
        let mut p = ImageProduct::new();
        p.push_image(big(4)).push(big(4), big(2));
        let v = p.evaluate(&ctx, &Limit::Exact).unwrap();
        assert_eq!(v.preimage(&ctx), Preimage::Value(ExactScalar::from(21)));
    }

    #[test]
    fn huge_products_are_not_materialised() {
        let ctx = SymmetricContext::new(3, 1).unwrap();
        let mut p = ImageProduct::new();
        p.push(big(4), BigInt::from(10u64).pow(30));
        let v = p.evaluate(&ctx, &Limit::Magnitude(big(1000))).unwrap();
        // 4^e ≡ 1 (mod 3) ≡ k, so the preimage would be integral.
        assert_eq!(v.preimage(&ctx), Preimage::OutOfRange { integral: true });
        assert_eq!(p.evaluate(&ctx, &Limit::Exact), Err(ImageError::TooLarge));
    }

    #[test]
    fn zero_factor_short_circuits() {
        let ctx = SymmetricContext::new(1, 1).unwrap();
        let mut p = ImageProduct::new();
        p.push(big(7), BigInt::from(10u64).pow(30)).push_image(big(0));
        assert_eq!(p.evaluate(&ctx, &Limit::Exact).unwrap(), ImageValue::Exact(BigRational::zero()));
        let mut q = ImageProduct::new();
        q.push(big(0), big(-1));
        assert_eq!(q.evaluate(&ctx, &Limit::Exact), Err(ImageError::DivisionByZeroImage));
    }

    #[test]
    fn unit_factors_only_affect_sign() {
        let ctx = SymmetricContext::new(1, 1).unwrap();
        let mut p = ImageProduct::new();
        p.push(big(-1), BigInt::from(10u64).pow(40) + 1).push(big(3), big(2));
        assert_eq!(
            p.evaluate(&ctx, &Limit::Exact).unwrap(),
            ImageValue::Exact(BigRational::from_integer(big(-9)))
        );
    }

    #[test]
    fn boundary_of_magnitude_cap_is_exact() {
        let ctx = SymmetricContext::new(1, 0).unwrap();
        // 2^10 = 1024 with bound 1024 must still be computed exactly.
        let mut p = ImageProduct::new();
        p.push(big(2), big(10));
        let v = p.evaluate(&ctx, &Limit::Magnitude(big(1024))).unwrap();
        assert_eq!(v.preimage(&ctx), Preimage::Value(ExactScalar::from(1024)));
    }
}
