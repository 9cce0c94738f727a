//! Finite instances of the ⊛-variant of Deuber's (m,p,c)-sets built from
//! base sequences and families of multivariable ⊛-polynomials.
//!
//! Row 0 is `𝔊(B₀[S₀])`; row `j ≥ 1` holds `𝔊(Bⱼ[Sⱼ], f(σ₀,…,σⱼ₋₁))` for
//! every `f ∈ Fⱼ`, where `σᵢ = Σ Bᵢ[Sᵢ]` is the component sum.

use num_bigint::BigInt;
use num_traits::Zero;

use super::poly::MultiStarPolynomial;
use super::{Element, FamilyError, Instance};
use crate::images::{ImageProduct, Limit};
use crate::symmetric::SymmetricContext;

/// Everything about a Deuber configuration except the base entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeuberShape {
    /// `|Bⱼ|` for `j = 0..=m`.
    pub base_lengths: Vec<usize>,
    /// `Sⱼ`: strictly increasing indices into `Bⱼ`, nonempty.
    pub selections: Vec<Vec<usize>>,
    /// `F₁ … Fₘ`; every polynomial in `Fⱼ` has arity `j`.
    pub families: Vec<Vec<MultiStarPolynomial>>,
    /// Add `𝔊(Bⱼ[Sⱼ])` for `j ≥ 1` (the trivial polynomial in each `Fⱼ`).
    pub include_identity_rows: bool,
    /// Add the selected entries of `B₀` themselves.
    pub include_b0_entries: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeuberSpec {
    pub ctx: SymmetricContext,
    pub shape: DeuberShape,
    pub bases: Vec<Vec<BigInt>>,
}

impl DeuberShape {
    pub fn m(&self) -> usize {
        self.base_lengths.len().saturating_sub(1)
    }

    pub fn validate(&self) -> Result<(), FamilyError> {
        let invalid = |msg: String| Err(FamilyError::InvalidParams(msg));
        if self.base_lengths.is_empty() {
            return invalid("at least one base sequence is required".into());
        }
        let m = self.m();
        if self.selections.len() != m + 1 {
            return invalid(format!("expected {} selections, got {}", m + 1, self.selections.len()));
        }
        if self.families.len() != m {
            return invalid(format!("expected {m} polynomial families, got {}", self.families.len()));
        }
        for (j, (selection, &len)) in self.selections.iter().zip(&self.base_lengths).enumerate() {
            if selection.is_empty() {
                return invalid(format!("selection S_{j} is empty"));
            }
            if selection.windows(2).any(|w| w[0] >= w[1]) {
                return invalid(format!("selection S_{j} is not strictly increasing"));
            }
            if selection.iter().any(|&i| i >= len) {
                return invalid(format!("selection S_{j} indexes past |B_{j}| = {len}"));
            }
        }
        for (j, family) in self.families.iter().enumerate() {
            if let Some(f) = family.iter().find(|f| f.arity() != j + 1) {
                return invalid(format!("polynomial in F_{} has arity {}", j + 1, f.arity()));
            }
        }
        Ok(())
    }

    pub fn free_names(&self) -> Vec<String> {
        self.base_lengths
            .iter()
            .enumerate()
            .flat_map(|(j, &len)| (0..len).map(move |i| format!("b{j}_{i}")))
            .collect()
    }

    /// Split a flat free-parameter vector into base sequences.
    pub fn split_bases(&self, flat: &[BigInt]) -> Vec<Vec<BigInt>> {
        let mut rest = flat;
        self.base_lengths
            .iter()
            .map(|&len| {
                let (head, tail) = rest.split_at(len);
                rest = tail;
                head.to_vec()
            })
            .collect()
    }
}

impl DeuberSpec {
    pub fn new(ctx: SymmetricContext, shape: DeuberShape, bases: Vec<Vec<BigInt>>) -> Result<Self, FamilyError> {
        let lengths: Vec<usize> = bases.iter().map(Vec::len).collect();
        if lengths != shape.base_lengths {
            return Err(FamilyError::InvalidParams(format!(
                "base lengths {lengths:?} do not match shape {:?}",
                shape.base_lengths
            )));
        }
        shape.validate()?;
        Ok(DeuberSpec { ctx, shape, bases })
    }

    /// The configuration of the multiplicative corollary for `(l,k) = (1,0)`:
    /// `B₀ = bs`, `B₁ = cs`, `F₁ = {aⱼ^{(x)}}`, everything selected, with the
    /// identity rows and the entries of `B₀` included.
    pub fn product_corollary(bs: &[BigInt], cs: &[BigInt], a: &[BigInt]) -> Result<Self, FamilyError> {
        let ctx = SymmetricContext::new(1, 0).expect("(1,0) is valid");
        let family = a
            .iter()
            .map(|aj| MultiStarPolynomial::new(ctx, 1, [(vec![1], aj.clone())]))
            .collect::<Result<Vec<_>, _>>()?;
        let shape = DeuberShape {
            base_lengths: vec![bs.len(), cs.len()],
            selections: vec![(0..bs.len()).collect(), (0..cs.len()).collect()],
            families: vec![family],
            include_identity_rows: true,
            include_b0_entries: true,
        };
        DeuberSpec::new(ctx, shape, vec![bs.to_vec(), cs.to_vec()])
    }
}

/// Closed form of [`DeuberSpec::product_corollary`]:
/// `{x, bᵢ, ∏bᵢ, x·aⱼ^{Σbᵢ}}` with `x = ∏cₛ`.
pub fn product_corollary_set(bs: &[BigInt], cs: &[BigInt], a: &[BigInt]) -> Result<Instance, FamilyError> {
    let x: BigInt = cs.iter().product();
    let b_product: BigInt = bs.iter().product();
    let b_sum: BigInt = bs.iter().sum();
    let exponent = usize::try_from(&b_sum)
        .map_err(|_| FamilyError::InvalidParams(format!("Σbᵢ = {b_sum} must be a non-negative machine integer")))?;
    let mut raw = vec![x.clone()];
    raw.extend(bs.iter().cloned());
    raw.push(b_product);
    raw.extend(a.iter().map(|aj| &x * num_traits::pow(aj.clone(), exponent)));
    let provenance = bs
        .iter()
        .enumerate()
        .map(|(i, b)| (format!("b{i}"), b.clone()))
        .chain(cs.iter().enumerate().map(|(i, c)| (format!("c{i}"), c.clone())))
        .collect();
    Ok(Instance::from_raw(raw, provenance))
}

pub(crate) fn deuber_elements(
    ctx: &SymmetricContext,
    shape: &DeuberShape,
    bases: &[Vec<BigInt>],
    limit: &Limit,
) -> Result<Vec<Element>, FamilyError> {
    let selected: Vec<Vec<&BigInt>> = shape
        .selections
        .iter()
        .zip(bases)
        .map(|(sel, base)| sel.iter().map(|&i| &base[i]).collect())
        .collect();
    let sums: Vec<BigInt> = selected
        .iter()
        .map(|entries| entries.iter().fold(BigInt::zero(), |acc, &b| acc + b))
        .collect();
    let base_product = |j: usize| {
        let mut product = ImageProduct::new();
        for b in &selected[j] {
            product.push_image(ctx.image(b));
        }
        product
    };

    let mut out = Vec::new();
    if shape.include_b0_entries {
        out.extend(selected[0].iter().map(|&b| Element::Value(b.clone())));
    }
    out.push(super::affine_element(ctx, &base_product(0), limit)?);
    for j in 1..=shape.m() {
        if shape.include_identity_rows {
            out.push(super::affine_element(ctx, &base_product(j), limit)?);
        }
        for f in &shape.families[j - 1] {
            let f_product = f.image_product(&sums[..j])?;
            if f_product.is_empty() && !ctx.is_unital() {
                return Err(crate::symmetric::SymmetricError::NonUnitalIdentity { l: ctx.l(), k: ctx.k() }.into());
            }
            // f must land in ℤ before it is ⊛-combined with the base entries;
            // only its integrality matters here, not its magnitude.
            super::affine_element(ctx, &f_product, limit)?;
            let mut row = base_product(j);
            row.extend(&f_product);
            out.push(super::affine_element(ctx, &row, limit)?);
        }
    }
    Ok(out)
}

/// `D(m, F⃗, ⊛, S^<, B)` for explicit base sequences.
pub fn gen_deuber_star(spec: &DeuberSpec) -> Result<Instance, FamilyError> {
    let elements = deuber_elements(&spec.ctx, &spec.shape, &spec.bases, &Limit::Exact)?;
    let provenance = spec
        .shape
        .free_names()
        .into_iter()
        .zip(spec.bases.iter().flatten().cloned())
        .collect();
    super::instance_from_elements(elements, provenance)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bigs(vs: &[i64]) -> Vec<BigInt> {
        vs.iter().copied().map(BigInt::from).collect()
    }

    fn single_family(ctx: SymmetricContext, alpha: i64) -> Vec<Vec<MultiStarPolynomial>> {
        vec![vec![MultiStarPolynomial::new(ctx, 1, [(vec![1], BigInt::from(alpha))]).unwrap()]]
    }

    fn spec(ctx: SymmetricContext, b0: &[i64], b1: &[i64], alpha: i64) -> DeuberSpec {
        let shape = DeuberShape {
            base_lengths: vec![b0.len(), b1.len()],
            selections: vec![(0..b0.len()).collect(), (0..b1.len()).collect()],
            families: single_family(ctx, alpha),
            include_identity_rows: false,
            include_b0_entries: false,
        };
        DeuberSpec::new(ctx, shape, vec![bigs(b0), bigs(b1)]).unwrap()
    }

    #[test]
    fn worked_examples() {
        let c10 = SymmetricContext::new(1, 0).unwrap();
        let inst = gen_deuber_star(&spec(c10, &[2, 3], &[5], 2)).unwrap();
        assert_eq!(inst.elements, bigs(&[6, 160]));
        let inst = gen_deuber_star(&spec(c10, &[2], &[3], 3)).unwrap();
        assert_eq!(inst.elements, bigs(&[2, 27]));
    }

    #[test]
    fn m_zero_is_just_row_zero() {
        let c11 = SymmetricContext::new(1, 1).unwrap();
        let shape = DeuberShape {
            base_lengths: vec![3],
            selections: vec![vec![0, 2]],
            families: vec![],
            include_identity_rows: false,
            include_b0_entries: false,
        };
        let spec = DeuberSpec::new(c11, shape, vec![bigs(&[1, 9, 2])]).unwrap();
        assert_eq!(gen_deuber_star(&spec).unwrap().elements, bigs(&[5]));
    }

    #[test]
    fn corollary_matches_closed_form() {
        let (bs, cs, a) = (bigs(&[2, 3]), bigs(&[5]), bigs(&[2]));
        let via_rows = gen_deuber_star(&DeuberSpec::product_corollary(&bs, &cs, &a).unwrap()).unwrap();
        let closed = product_corollary_set(&bs, &cs, &a).unwrap();
        assert_eq!(via_rows.elements, closed.elements);
        assert_eq!(closed.elements, bigs(&[2, 3, 5, 6, 160]));
    }

    #[test]
    fn shape_validation() {
        let c10 = SymmetricContext::new(1, 0).unwrap();
        let mut shape = spec(c10, &[2, 3], &[5], 2).shape;
        shape.selections[0] = vec![1, 0];
        assert!(shape.validate().is_err());
        shape.selections[0] = vec![];
        assert!(shape.validate().is_err());
        shape.selections[0] = vec![0, 5];
        assert!(shape.validate().is_err());
        shape.selections[0] = vec![0];
        shape.families = vec![vec![MultiStarPolynomial::new(c10, 2, [(vec![1, 1], BigInt::from(2))]).unwrap()]];
        assert!(shape.validate().is_err());
    }
}
