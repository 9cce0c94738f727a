//! The operations ⊕ and ⊗ on ℕ = {1, 2, …} obtained by transporting
//! addition and multiplication of pairs through the 2-adic bijections
//!
//! * `φ(n) = (f(n), (odd(n) + 1)/2)` onto `ω × ℕ` under componentwise `+`,
//! * `ρ(n) = (f(n), odd(n) + 1)` onto `ω × 2ℕ` under `(a, e)·(c, g) = (ac, eg)`,
//!
//! where `f` is the 2-adic valuation and `odd(n) = n / 2^{f(n)}`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::symmetric::SymmetricContext;

/// Largest power of two these routines will materialise.
const MAX_SHIFT: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DyadicError {
    #[error("{0} is not a positive integer")]
    NonPositive(BigInt),
    #[error("empty input")]
    EmptyInput,
    #[error("result exceeds 2^{MAX_SHIFT}")]
    TooLarge,
    #[error("{0} is not a valid image pair")]
    InvalidPair(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicDecomposition {
    pub valuation: u64,
    pub odd_part: BigInt,
}

impl DyadicDecomposition {
    pub fn recompose(&self) -> BigInt {
        &self.odd_part << self.valuation
    }
}

fn check_positive(n: &BigInt) -> Result<(), DyadicError> {
    if n.is_positive() {
        Ok(())
    } else {
        Err(DyadicError::NonPositive(n.clone()))
    }
}

pub fn decompose(n: &BigInt) -> Result<DyadicDecomposition, DyadicError> {
    check_positive(n)?;
    let valuation = n.trailing_zeros().unwrap_or(0);
    Ok(DyadicDecomposition { valuation, odd_part: n >> valuation })
}

fn shift(value: BigInt, exponent: &BigInt) -> Result<BigInt, DyadicError> {
    match exponent.to_u64() {
        Some(e) if e <= MAX_SHIFT => Ok(value << e),
        _ => Err(DyadicError::TooLarge),
    }
}

pub fn phi(n: &BigInt) -> Result<(u64, BigInt), DyadicError> {
    let d = decompose(n)?;
    Ok((d.valuation, (d.odd_part + 1u32) >> 1))
}

/// `φ⁻¹(x, y) = 2^x (2y − 1)`, defined for `y ≥ 1`.
pub fn phi_inv(x: u64, y: &BigInt) -> Result<BigInt, DyadicError> {
    if !y.is_positive() {
        return Err(DyadicError::InvalidPair(format!("({x}, {y})")));
    }
    shift((y << 1u32) - 1u32, &BigInt::from(x))
}

pub fn rho(n: &BigInt) -> Result<(u64, BigInt), DyadicError> {
    let d = decompose(n)?;
    Ok((d.valuation, d.odd_part + 1u32))
}

/// `ρ⁻¹(x, e) = 2^x (e − 1)`, defined for even `e ≥ 2`.
pub fn rho_inv(x: u64, e: &BigInt) -> Result<BigInt, DyadicError> {
    if !e.is_positive() || e.is_odd() {
        return Err(DyadicError::InvalidPair(format!("({x}, {e})")));
    }
    shift(e - 1u32, &BigInt::from(x))
}

/// Componentwise sum on `ω × ℕ`.
pub fn phi_pair_add(p: &(u64, BigInt), q: &(u64, BigInt)) -> (u64, BigInt) {
    (p.0 + q.0, &p.1 + &q.1)
}

/// Product on `ω × 2ℕ`: `(a, 2b)·(c, 2d) = (ac, 4bd)`.
pub fn rho_pair_mul(p: &(u64, BigInt), q: &(u64, BigInt)) -> (u64, BigInt) {
    (p.0 * q.0, &p.1 * &q.1)
}

/// `m ⊕ n = 2^{f(m)+f(n)} (odd(m) + odd(n) + 1)`.
pub fn oplus(m: &BigInt, n: &BigInt) -> Result<BigInt, DyadicError> {
    oplus_fold(&[m.clone(), n.clone()])
}

/// `2^{Σ f(aᵢ)} (Σ odd(aᵢ) + n − 1)`.
pub fn oplus_fold(xs: &[BigInt]) -> Result<BigInt, DyadicError> {
    if xs.is_empty() {
        return Err(DyadicError::EmptyInput);
    }
    let mut valuation = BigInt::zero();
    let mut odd_sum = BigInt::zero();
    for x in xs {
        let d = decompose(x)?;
        valuation += d.valuation;
        odd_sum += d.odd_part;
    }
    shift(odd_sum + (xs.len() - 1), &valuation)
}

/// `m ⊗ n = 2^{f(m)·f(n)} 𝔊₁,₁(odd(m), odd(n))`.
pub fn otimes(m: &BigInt, n: &BigInt) -> Result<BigInt, DyadicError> {
    otimes_fold(&[m.clone(), n.clone()])
}

/// `2^{∏ f(aᵢ)} 𝔊₁,₁(odd(a₁), …, odd(aₙ))`.
pub fn otimes_fold(xs: &[BigInt]) -> Result<BigInt, DyadicError> {
    if xs.is_empty() {
        return Err(DyadicError::EmptyInput);
    }
    let mut valuation = BigInt::one();
    let mut image = BigInt::one();
    for x in xs {
        let d = decompose(x)?;
        valuation *= d.valuation;
        image *= d.odd_part + 1u32;
    }
    shift(image - 1u32, &valuation)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DyadicFamilyKind {
    OplusHJ,
    OtimesHJ,
}

/// One letter of a dyadic Hales-Jewett family: the fold of the fixed part
/// followed by `c` copies of the letter, next to the closed forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicLetter {
    pub letter: BigInt,
    pub fold: BigInt,
    /// ⊕: `x·2^{c f(a)}(y + c·odd(a))`. ⊗: `x·2^{f(a)^c}·𝔊₁,₁(y, odd(a)^{(c)})`.
    pub closed_form: BigInt,
    /// ⊗ only: `2^{x·f(a)^c}·𝔊₁,₁(y, odd(a)^{(c)})`.
    pub corrected_form: Option<BigInt>,
}

impl DyadicLetter {
    pub fn closed_form_matches(&self) -> bool {
        self.closed_form == self.fold
    }

    pub fn corrected_form_matches(&self) -> Option<bool> {
        self.corrected_form.as_ref().map(|v| *v == self.fold)
    }
}

pub fn gen_dyadic_family(
    kind: DyadicFamilyKind,
    fixed: &[BigInt],
    letters: &[BigInt],
    c: u32,
) -> Result<Vec<DyadicLetter>, DyadicError> {
    if c == 0 {
        return Err(DyadicError::NonPositive(BigInt::zero()));
    }
    let fixed_parts = fixed.iter().map(decompose).collect::<Result<Vec<_>, _>>()?;
    letters
        .iter()
        .map(|a| {
            let da = decompose(a)?;
            let mut word = fixed.to_vec();
            word.extend(std::iter::repeat_n(a.clone(), c as usize));
            match kind {
                DyadicFamilyKind::OplusHJ => {
                    let fold = oplus_fold(&word)?;
                    let x_exp: u64 = fixed_parts.iter().map(|d| d.valuation).sum();
                    let y = fixed_parts.iter().map(|d| &d.odd_part).sum::<BigInt>() + fixed.len() + c - 1u32;
                    let inner = y + &da.odd_part * c;
                    let closed_form = shift(shift(inner, &BigInt::from(x_exp))?, &(BigInt::from(c) * da.valuation))?;
                    Ok(DyadicLetter { letter: a.clone(), fold, closed_form, corrected_form: None })
                }
                DyadicFamilyKind::OtimesHJ => {
                    let fold = otimes_fold(&word)?;
                    let x: BigInt = fixed_parts.iter().map(|d| BigInt::from(d.valuation)).product();
                    let ctx = SymmetricContext::new(1, 1).expect("(1,1) is a valid context");
                    let odds: Vec<BigInt> = fixed_parts.iter().map(|d| d.odd_part.clone()).collect();
                    // 𝔊₁,₁ of the empty sequence is the identity 0.
                    let y = if odds.is_empty() { BigInt::zero() } else { ctx.gfold(&odds).expect("nonempty") };
                    let tail = (y + 1u32) * (&da.odd_part + 1u32).pow(c) - 1u32;
                    let fa_c = BigInt::from(da.valuation).pow(c);
                    let closed_form = &x * shift(tail.clone(), &fa_c)?;
                    let corrected_form = shift(tail, &(&x * &fa_c))?;
                    Ok(DyadicLetter { letter: a.clone(), fold, closed_form, corrected_form: Some(corrected_form) })
                }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn bs(vs: &[i64]) -> Vec<BigInt> {
        vs.iter().copied().map(b).collect()
    }

    #[test]
    fn decompose_examples() {
        for (n, v, o) in [(12, 2, 3), (1, 0, 1), (8, 3, 1)] {
            let d = decompose(&b(n)).unwrap();
            assert_eq!((d.valuation, d.odd_part.clone()), (v, b(o)));
            assert_eq!(d.recompose(), b(n));
        }
        assert_eq!(decompose(&b(0)), Err(DyadicError::NonPositive(b(0))));
        assert!(decompose(&b(-4)).is_err());
    }

    #[test]
    fn fold_examples() {
        assert_eq!(oplus_fold(&bs(&[4, 6])).unwrap(), b(40));
        assert_eq!(oplus_fold(&bs(&[1, 1, 1])).unwrap(), b(5));
        assert_eq!(otimes_fold(&bs(&[4, 6])).unwrap(), b(28));
        assert_eq!(otimes_fold(&bs(&[3, 5])).unwrap(), b(23));
        for n in [1, 2, 7, 96] {
            assert_eq!(oplus_fold(&bs(&[n])).unwrap(), b(n));
            assert_eq!(otimes_fold(&bs(&[n])).unwrap(), b(n));
        }
        assert_eq!(oplus_fold(&[]), Err(DyadicError::EmptyInput));
    }

    #[test]
    fn pair_transport() {
        let (m, n) = (b(4), b(6));
        let sum = phi_pair_add(&phi(&m).unwrap(), &phi(&n).unwrap());
        assert_eq!(phi_inv(sum.0, &sum.1).unwrap(), oplus(&m, &n).unwrap());
        let prod = rho_pair_mul(&rho(&m).unwrap(), &rho(&n).unwrap());
        assert_eq!(rho_inv(prod.0, &prod.1).unwrap(), otimes(&m, &n).unwrap());
        assert!(rho_inv(1, &b(3)).is_err());
        assert!(phi_inv(1, &b(0)).is_err());
    }

    #[test]
    fn oplus_family_example() {
        let fam = gen_dyadic_family(DyadicFamilyKind::OplusHJ, &bs(&[3]), &bs(&[5]), 1).unwrap();
        assert_eq!(fam[0].fold, b(9));
        assert!(fam[0].closed_form_matches());
        let fam = gen_dyadic_family(DyadicFamilyKind::OplusHJ, &[], &bs(&[12]), 1).unwrap();
        assert_eq!(fam[0].fold, b(12));
    }

    #[test]
    fn otimes_family_example() {
        let fam = gen_dyadic_family(DyadicFamilyKind::OtimesHJ, &bs(&[3]), &bs(&[5]), 1).unwrap();
        assert_eq!(fam[0].fold, b(23));
        // x = f(3) = 0 zeroes the printed prefactor; the corrected exponent form agrees.
        assert_eq!(fam[0].closed_form, b(0));
        assert_eq!(fam[0].corrected_form_matches(), Some(true));
        let fam = gen_dyadic_family(DyadicFamilyKind::OtimesHJ, &[], &bs(&[7]), 1).unwrap();
        assert_eq!(fam[0].fold, b(7));
    }

    #[test]
    fn corrected_form_always_matches() {
        for fixed in [vec![], bs(&[2]), bs(&[4, 6]), bs(&[3, 12, 5])] {
            for kind in [DyadicFamilyKind::OplusHJ, DyadicFamilyKind::OtimesHJ] {
                for c in 1..4 {
                    let letters = bs(&[1, 2, 3, 8, 10]);
                    for l in gen_dyadic_family(kind, &fixed, &letters, c).unwrap() {
                        match kind {
                            DyadicFamilyKind::OplusHJ => assert!(l.closed_form_matches()),
                            DyadicFamilyKind::OtimesHJ => assert_eq!(l.corrected_form_matches(), Some(true)),
                        }
                    }
                }
            }
        }
    }
}
