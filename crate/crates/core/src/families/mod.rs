//! Generators for the monochromatic configuration families.
//!
//! A [`FamilyDescriptor`] fixes the *shape* of a family (lengths, orders,
//! polynomials, coefficient tuples) and, optionally, the values of its free
//! parameters. [`generate`] evaluates one instance; the search engine
//! enumerates free parameters over a box instead.

pub mod deuber;
mod json;
pub mod poly;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::images::{ImageError, ImageProduct, Limit, Preimage};
use crate::symmetric::{SymmetricContext, SymmetricError};
use deuber::DeuberShape;
use poly::{IntPolynomial, PolynomialError};

pub use deuber::{gen_deuber_star, product_corollary_set, DeuberSpec};
pub use json::{bigint_from_json, bigint_to_json};

/// Default bound on the length of a symmetric-system generator sequence.
pub const DEFAULT_SYSTEM_MAX_LEN: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error(transparent)]
    Symmetric(#[from] SymmetricError),
    #[error("family {0} needs a symmetric context (l, k)")]
    MissingContext(&'static str),
    #[error("non-integral element: {0}")]
    NonIntegralElement(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("expected {expected} free parameters, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("free parameters are required to generate an instance")]
    MissingParams,
    #[error("an element is too large to evaluate exactly")]
    TooLarge,
    #[error("sequence length {len} exceeds the configured bound {max}")]
    LengthExceeded { len: usize, max: usize },
    #[error("unknown family kind {0:?}")]
    UnknownKind(String),
}

impl From<PolynomialError> for FamilyError {
    fn from(err: PolynomialError) -> Self {
        match err {
            PolynomialError::Symmetric(e) => FamilyError::Symmetric(e),
            other => FamilyError::InvalidParams(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyKind {
    APlain,
    StarSchur,
    GeoArithAdd,
    GeoArithStar,
    Gap,
    PolyProgression,
    PolyVdW,
    SymmetricSystem,
    MpcSet,
    DeuberStar,
    CstCorollary,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 11] = [
        FamilyKind::APlain,
        FamilyKind::StarSchur,
        FamilyKind::GeoArithAdd,
        FamilyKind::GeoArithStar,
        FamilyKind::Gap,
        FamilyKind::PolyProgression,
        FamilyKind::PolyVdW,
        FamilyKind::SymmetricSystem,
        FamilyKind::MpcSet,
        FamilyKind::DeuberStar,
        FamilyKind::CstCorollary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::APlain => "ap",
            FamilyKind::StarSchur => "star-schur",
            FamilyKind::GeoArithAdd => "geo-arith-add",
            FamilyKind::GeoArithStar => "geo-arith-star",
            FamilyKind::Gap => "gap",
            FamilyKind::PolyProgression => "poly-progression",
            FamilyKind::PolyVdW => "poly-vdw",
            FamilyKind::SymmetricSystem => "symmetric-system",
            FamilyKind::MpcSet => "mpc-set",
            FamilyKind::DeuberStar => "deuber-star",
            FamilyKind::CstCorollary => "cst-corollary",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Kinds whose elements are defined through ⊛.
    pub fn needs_context(self) -> bool {
        !matches!(
            self,
            FamilyKind::APlain | FamilyKind::Gap | FamilyKind::PolyProgression | FamilyKind::MpcSet
        )
    }
}

impl std::fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// The fixed structure of a family; free parameters are listed by
/// [`FamilyDescriptor::free_names`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shape {
    /// `{a + i·d : 0 ≤ i < len}`; free `a, d`.
    APlain { len: usize },
    /// `{x, y, x ⊛ y}`; free `x, y`.
    StarSchur,
    /// `{(1/l)[(lx+k)(l(y+iz)+k)^j - k] : 0 ≤ i,j ≤ m}`; free `x, y, z`.
    GeoArithAdd { m: u32 },
    /// `{(1/l)[(lx+k)(ly+k)^j(lz+k)^{ij} - k] : 0 ≤ i,j ≤ m}`; free `x, y, z`.
    GeoArithStar { m: u32 },
    /// `{a₀ + i₁a₁ + ⋯ + iₘaₘ : 0 ≤ iₜ ≤ len}`; free `a0 … a{order}`.
    Gap { order: usize, len: u32 },
    /// `{a + b·Pᵢ(d)}` for zero-constant `Pᵢ`; free `a, b, d`.
    PolyProgression { polys: Vec<IntPolynomial> },
    /// `{(1/l)[(l·d′+k) ∏ₜ (l·aₜ⁽ⁱ⁾+k)^{cᵗ} - k]}` over coefficient tuples;
    /// free `dp, c`.
    PolyVdW { coeffs: Vec<Vec<BigInt>> },
    /// `{𝔊(sub) : sub a nonempty subsequence of x₁…xₙ}`; free `x1 … x{len}`.
    SymmetricSystem { len: usize },
    /// Deuber's `(m,p,c)`-set; free `s0 … s{m}` (nonzero).
    MpcSet { m: usize, p: i64, c: i64 },
    /// ⊛-Deuber rows; free: every base entry.
    DeuberStar(DeuberShape),
    /// `{(1/l)[∏_{j∈β}(l·xⱼ+k) ∏ₜ (l·aₜ⁽ⁱ⁾+k)^{z_β^t} - k]}` over nonempty
    /// `β ⊆ [len]`, `z_β = Σ_{j∈β} zⱼ`; free `x1 … x{len}, z1 … z{len}`.
    CstCorollary { len: usize, coeffs: Vec<Vec<BigInt>> },
}

impl Shape {
    pub fn kind(&self) -> FamilyKind {
        match self {
            Shape::APlain { .. } => FamilyKind::APlain,
            Shape::StarSchur => FamilyKind::StarSchur,
            Shape::GeoArithAdd { .. } => FamilyKind::GeoArithAdd,
            Shape::GeoArithStar { .. } => FamilyKind::GeoArithStar,
            Shape::Gap { .. } => FamilyKind::Gap,
            Shape::PolyProgression { .. } => FamilyKind::PolyProgression,
            Shape::PolyVdW { .. } => FamilyKind::PolyVdW,
            Shape::SymmetricSystem { .. } => FamilyKind::SymmetricSystem,
            Shape::MpcSet { .. } => FamilyKind::MpcSet,
            Shape::DeuberStar(_) => FamilyKind::DeuberStar,
            Shape::CstCorollary { .. } => FamilyKind::CstCorollary,
        }
    }
}

/// A family shape with its context and, optionally, free-parameter values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyDescriptor {
    pub ctx: Option<SymmetricContext>,
    pub shape: Shape,
    pub params: Option<Vec<BigInt>>,
}

/// One concrete generated configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    /// Strictly ascending, deduplicated.
    pub elements: Vec<BigInt>,
    /// Number of generated values before deduplication.
    pub raw_count: usize,
    /// Some generated values coincided.
    pub degenerate: bool,
    /// The free parameters that produced this instance, by name.
    pub provenance: Vec<(String, BigInt)>,
}

impl Instance {
    pub fn from_raw(mut raw: Vec<BigInt>, provenance: Vec<(String, BigInt)>) -> Self {
        let raw_count = raw.len();
        raw.sort();
        raw.dedup();
        Instance { degenerate: raw.len() < raw_count, elements: raw, raw_count, provenance }
    }
}

/// One generated value, possibly known only to lie outside a magnitude limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Element {
    Value(BigInt),
    OutOfRange,
}

/// Preimage `(P - k)/l` of a product of images, which must be an integer.
pub(crate) fn affine_element(
    ctx: &SymmetricContext,
    product: &ImageProduct,
    limit: &Limit,
) -> Result<Element, FamilyError> {
    let value = product.evaluate(ctx, limit).map_err(|e| match e {
        ImageError::DivisionByZeroImage => FamilyError::Symmetric(SymmetricError::DivisionByZeroImage),
        ImageError::TooLarge => FamilyError::TooLarge,
    })?;
    match value.preimage(ctx) {
        Preimage::Value(v) => v
            .to_integer()
            .map(Element::Value)
            .ok_or_else(|| FamilyError::NonIntegralElement(format!("{v} for (l,k) = ({}, {})", ctx.l(), ctx.k()))),
        Preimage::OutOfRange { integral: true } => Ok(Element::OutOfRange),
        Preimage::OutOfRange { integral: false } => Err(FamilyError::NonIntegralElement(format!(
            "out-of-range value not divisible by l = {}",
            ctx.l()
        ))),
    }
}

pub(crate) fn instance_from_elements(
    elements: Vec<Element>,
    provenance: Vec<(String, BigInt)>,
) -> Result<Instance, FamilyError> {
    let raw = elements
        .into_iter()
        .map(|e| match e {
            Element::Value(v) => Ok(v),
            Element::OutOfRange => Err(FamilyError::TooLarge),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Instance::from_raw(raw, provenance))
}

fn check_coefficient_tuples(ctx: &SymmetricContext, coeffs: &[Vec<BigInt>]) -> Result<(), FamilyError> {
    let invalid = |msg: String| Err(FamilyError::InvalidParams(msg));
    let Some(first) = coeffs.first() else {
        return invalid("at least one coefficient tuple is required".into());
    };
    if first.is_empty() {
        return invalid("coefficient tuples must be nonempty".into());
    }
    if coeffs.iter().any(|t| t.len() != first.len()) {
        return invalid("coefficient tuples must share one length".into());
    }
    // Coefficients with image 0 or -1 (a = -k/l, a = -(k+1)/l) are excluded.
    for a in coeffs.iter().flatten() {
        let image = ctx.image(a);
        if image.is_zero() || image == -BigInt::one() {
            return invalid(format!("coefficient {a} has excluded image {image}"));
        }
    }
    Ok(())
}

impl FamilyDescriptor {
    /// Validate a shape/context pair without free parameters.
    pub fn new(shape: Shape, ctx: Option<SymmetricContext>) -> Result<Self, FamilyError> {
        let desc = FamilyDescriptor { ctx, shape, params: None };
        desc.validate()?;
        Ok(desc)
    }

    pub fn with_params(mut self, params: Vec<BigInt>) -> Result<Self, FamilyError> {
        let expected = self.free_arity();
        if params.len() != expected {
            return Err(FamilyError::Arity { expected, got: params.len() });
        }
        self.params = Some(params);
        Ok(self)
    }

    pub fn with_i64_params(self, params: &[i64]) -> Result<Self, FamilyError> {
        self.with_params(params.iter().copied().map(BigInt::from).collect())
    }

    pub fn kind(&self) -> FamilyKind {
        self.shape.kind()
    }

    pub(crate) fn context(&self) -> Result<&SymmetricContext, FamilyError> {
        self.ctx.as_ref().ok_or(FamilyError::MissingContext(self.kind().name()))
    }

    pub fn validate(&self) -> Result<(), FamilyError> {
        let invalid = |msg: &str| Err(FamilyError::InvalidParams(msg.to_string()));
        if self.kind().needs_context() {
            self.context()?;
        }
        match &self.shape {
            Shape::APlain { len } if *len == 0 => return invalid("ap length must be at least 1"),
            Shape::PolyProgression { polys } => {
                if polys.is_empty() {
                    return invalid("at least one polynomial is required");
                }
                if polys.iter().any(|p| !p.has_zero_constant()) {
                    return invalid("polynomials must have zero constant term");
                }
            }
            Shape::PolyVdW { coeffs } => check_coefficient_tuples(self.context()?, coeffs)?,
            Shape::CstCorollary { len, coeffs } => {
                if *len == 0 || *len > DEFAULT_SYSTEM_MAX_LEN {
                    return Err(FamilyError::LengthExceeded { len: *len, max: DEFAULT_SYSTEM_MAX_LEN });
                }
                check_coefficient_tuples(self.context()?, coeffs)?;
            }
            Shape::SymmetricSystem { len } => {
                if *len == 0 {
                    return invalid("symmetric system needs at least one generator");
                }
                if *len > DEFAULT_SYSTEM_MAX_LEN {
                    return Err(FamilyError::LengthExceeded { len: *len, max: DEFAULT_SYSTEM_MAX_LEN });
                }
            }
            Shape::MpcSet { p, c, .. } => {
                if *p < 1 || *c < 1 {
                    return invalid("(m,p,c)-sets need p >= 1 and c >= 1");
                }
            }
            Shape::DeuberStar(shape) => {
                shape.validate()?;
                let ctx = self.context()?;
                if shape.families.iter().flatten().any(|f| f.ctx() != ctx) {
                    return invalid("deuber polynomials must share the family context");
                }
            }
            _ => {}
        }
        if let Some(params) = &self.params {
            let expected = self.free_arity();
            if params.len() != expected {
                return Err(FamilyError::Arity { expected, got: params.len() });
            }
        }
        Ok(())
    }

    pub fn free_names(&self) -> Vec<String> {
        let owned = |names: &[&str]| names.iter().map(|s| s.to_string()).collect();
        match &self.shape {
            Shape::APlain { .. } => owned(&["a", "d"]),
            Shape::StarSchur => owned(&["x", "y"]),
            Shape::GeoArithAdd { .. } | Shape::GeoArithStar { .. } => owned(&["x", "y", "z"]),
            Shape::Gap { order, .. } => (0..=*order).map(|i| format!("a{i}")).collect(),
            Shape::PolyProgression { .. } => owned(&["a", "b", "d"]),
            Shape::PolyVdW { .. } => owned(&["dp", "c"]),
            Shape::SymmetricSystem { len } => (1..=*len).map(|i| format!("x{i}")).collect(),
            Shape::MpcSet { m, .. } => (0..=*m).map(|i| format!("s{i}")).collect(),
            Shape::DeuberStar(shape) => shape.free_names(),
            Shape::CstCorollary { len, .. } => (1..=*len)
                .map(|i| format!("x{i}"))
                .chain((1..=*len).map(|i| format!("z{i}")))
                .collect(),
        }
    }

    pub fn free_arity(&self) -> usize {
        self.free_names().len()
    }

    /// Free parameters that act as exponents and range over ℕ = {1, 2, …}
    /// regardless of the search domain.
    pub fn natural_params(&self) -> Vec<usize> {
        match &self.shape {
            Shape::PolyVdW { .. } => vec![1],
            Shape::CstCorollary { len, .. } => (*len..2 * *len).collect(),
            _ => vec![],
        }
    }

    /// Free parameters that must be nonzero.
    pub fn nonzero_params(&self) -> Vec<usize> {
        match &self.shape {
            Shape::MpcSet { m, .. } => (0..=*m).collect(),
            _ => vec![],
        }
    }

    /// Evaluate every generated value for the given free parameters.
    pub(crate) fn evaluate(&self, free: &[BigInt], limit: &Limit) -> Result<Vec<Element>, FamilyError> {
        let expected = self.free_arity();
        if free.len() != expected {
            return Err(FamilyError::Arity { expected, got: free.len() });
        }
        let values = |vs: Vec<BigInt>| Ok(vs.into_iter().map(Element::Value).collect());
        match &self.shape {
            Shape::APlain { len } => {
                let (a, d) = (&free[0], &free[1]);
                values((0..*len).map(|i| a + d * BigInt::from(i)).collect())
            }
            Shape::StarSchur => {
                let ctx = self.context()?;
                values(vec![free[0].clone(), free[1].clone(), ctx.star(&free[0], &free[1])])
            }
            Shape::GeoArithAdd { m } => {
                let ctx = self.context()?;
                let (x, y, z) = (&free[0], &free[1], &free[2]);
                let mut out = Vec::new();
                for i in 0..=*m {
                    let inner = ctx.image(&(y + z * BigInt::from(i)));
                    for j in 0..=*m {
                        let mut product = ImageProduct::new();
                        product.push_image(ctx.image(x)).push(inner.clone(), BigInt::from(j));
                        out.push(affine_element(ctx, &product, limit)?);
                    }
                }
                Ok(out)
            }
            Shape::GeoArithStar { m } => {
                let ctx = self.context()?;
                let (x, y, z) = (ctx.image(&free[0]), ctx.image(&free[1]), ctx.image(&free[2]));
                let mut out = Vec::new();
                for i in 0..=*m {
                    for j in 0..=*m {
                        let mut product = ImageProduct::new();
                        product
                            .push_image(x.clone())
                            .push(y.clone(), BigInt::from(j))
                            .push(z.clone(), BigInt::from(i * j));
                        out.push(affine_element(ctx, &product, limit)?);
                    }
                }
                Ok(out)
            }
            Shape::Gap { order, len } => {
                let mut out = Vec::new();
                let mut counters = vec![0u32; *order];
                loop {
                    let value = counters
                        .iter()
                        .zip(&free[1..])
                        .fold(free[0].clone(), |acc, (&i, a)| acc + a * BigInt::from(i));
                    out.push(value);
                    // odometer over {0..=len}^order, last coordinate fastest
                    let Some(pos) = counters.iter().rposition(|&c| c < *len) else { break };
                    counters[pos] += 1;
                    counters[pos + 1..].iter_mut().for_each(|c| *c = 0);
                }
                values(out)
            }
            Shape::PolyProgression { polys } => {
                let (a, b, d) = (&free[0], &free[1], &free[2]);
                values(polys.iter().map(|p| a + b * p.eval(d)).collect())
            }
            Shape::PolyVdW { coeffs } => {
                let ctx = self.context()?;
                let (dp, c) = (&free[0], &free[1]);
                let mut out = Vec::with_capacity(coeffs.len());
                for tuple in coeffs {
                    let mut product = ImageProduct::new();
                    product.push_image(ctx.image(dp));
                    let mut exponent = BigInt::one();
                    for a in tuple {
                        exponent *= c;
                        product.push(ctx.image(a), exponent.clone());
                    }
                    out.push(affine_element(ctx, &product, limit)?);
                }
                Ok(out)
            }
            Shape::SymmetricSystem { .. } => {
                let ctx = self.context()?;
                values(symmetric_system_values(ctx, free))
            }
            Shape::MpcSet { m, p, c } => {
                if let Some(i) = free.iter().position(Zero::is_zero) {
                    return Err(FamilyError::InvalidParams(format!("s{i} must be nonzero")));
                }
                let mut out = Vec::new();
                for j in 0..=*m {
                    let top = BigInt::from(*c) * &free[j];
                    let mut counters = vec![-*p; j];
                    loop {
                        let value = counters
                            .iter()
                            .zip(free)
                            .fold(top.clone(), |acc, (&i, s)| acc + s * BigInt::from(i));
                        out.push(value);
                        let Some(pos) = counters.iter().rposition(|&i| i < *p) else { break };
                        counters[pos] += 1;
                        counters[pos + 1..].iter_mut().for_each(|i| *i = -*p);
                    }
                }
                values(out)
            }
            Shape::DeuberStar(shape) => {
                let ctx = self.context()?;
                deuber::deuber_elements(ctx, shape, &shape.split_bases(free), limit)
            }
            Shape::CstCorollary { len, coeffs } => {
                let ctx = self.context()?;
                let (xs, zs) = free.split_at(*len);
                let mut out = Vec::new();
                for beta in 1u32..(1 << *len) {
                    let members = (0..*len).filter(|j| beta & (1 << j) != 0);
                    let mut base = ImageProduct::new();
                    let mut z_beta = BigInt::zero();
                    for j in members {
                        base.push_image(ctx.image(&xs[j]));
                        z_beta += &zs[j];
                    }
                    for tuple in coeffs {
                        let mut product = base.clone();
                        let mut exponent = BigInt::one();
                        for a in tuple {
                            exponent *= &z_beta;
                            product.push(ctx.image(a), exponent.clone());
                        }
                        out.push(affine_element(ctx, &product, limit)?);
                    }
                }
                Ok(out)
            }
        }
    }
}

fn symmetric_system_values(ctx: &SymmetricContext, xs: &[BigInt]) -> Vec<BigInt> {
    let images: Vec<BigInt> = xs.iter().map(|x| ctx.image(x)).collect();
    let n = xs.len();
    // products[mask] = ∏ images over mask, built from the lowest set bit
    let mut products = vec![BigInt::one(); 1 << n];
    let mut out = Vec::with_capacity((1 << n) - 1);
    for mask in 1usize..(1 << n) {
        let low = mask.trailing_zeros() as usize;
        products[mask] = &products[mask & (mask - 1)] * &images[low];
        let value = ctx.preimage(&products[mask]).expect("products of images stay in lℤ + k");
        out.push(value);
    }
    out
}

/// Evaluate one instance of a fully parameterised descriptor.
pub fn generate(desc: &FamilyDescriptor) -> Result<Instance, FamilyError> {
    desc.validate()?;
    let params = desc.params.as_ref().ok_or(FamilyError::MissingParams)?;
    let elements = desc.evaluate(params, &Limit::Exact)?;
    let provenance = desc.free_names().into_iter().zip(params.iter().cloned()).collect();
    instance_from_elements(elements, provenance)
}

/// `{𝔊(sub) : sub nonempty subsequence of xs}` with the default length bound.
pub fn gen_symmetric_system(ctx: &SymmetricContext, xs: &[BigInt]) -> Result<Instance, FamilyError> {
    gen_symmetric_system_bounded(ctx, xs, DEFAULT_SYSTEM_MAX_LEN)
}

pub fn gen_symmetric_system_bounded(
    ctx: &SymmetricContext,
    xs: &[BigInt],
    max_len: usize,
) -> Result<Instance, FamilyError> {
    if xs.is_empty() {
        return Err(SymmetricError::EmptyInput.into());
    }
    if xs.len() > max_len {
        return Err(FamilyError::LengthExceeded { len: xs.len(), max: max_len });
    }
    let provenance = xs.iter().enumerate().map(|(i, x)| (format!("x{}", i + 1), x.clone())).collect();
    Ok(Instance::from_raw(symmetric_system_values(ctx, xs), provenance))
}
