//! Seeded randomized self-test of the algebraic identities that hold for
//! ⊛, its folds and powers, the family generators, the dyadic operations and
//! the word-evaluation map.

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::dyadic;
use crate::families::poly::{IntPolynomial, StarPolynomial};
use crate::families::{generate, FamilyDescriptor, Shape};
use crate::hales_jewett::{eval_word_star, LocatedWord};
use crate::scalar::ExactScalar;
use crate::symmetric::SymmetricContext;

/// The contexts every ⊛ identity is checked in.
pub const CONTEXTS: [(i64, i64); 6] = [(1, 0), (1, 1), (2, 1), (3, 1), (2, 3), (-1, 2)];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub cases: u64,
    pub failures: u64,
    pub first_failure: Option<String>,
}

impl IdentityCheck {
    fn new(name: &'static str) -> Self {
        IdentityCheck { name, cases: 0, failures: 0, first_failure: None }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub seed: u64,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(IdentityCheck::passed)
    }

    pub fn total_cases(&self) -> u64 {
        self.checks.iter().map(|c| c.cases).sum()
    }

    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "cases": c.cases,
                    "failures": c.failures,
                    "first_failure": c.first_failure,
                })
            })
            .collect();
        json!({"seed": self.seed, "passed": self.all_passed(), "checks": checks})
    }
}

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

fn contexts() -> Vec<SymmetricContext> {
    CONTEXTS.iter().map(|&(l, k)| SymmetricContext::new(l, k).expect("listed contexts are valid")).collect()
}

fn rand_vec(rng: &mut ChaCha8Rng, len: usize, bound: i64) -> Vec<BigInt> {
    (0..len).map(|_| big(rng.gen_range(-bound..=bound))).collect()
}

/// Run every identity `cases` times per context (or per sample for the
/// context-free ones).
pub fn run_identity_suite(seed: u64, cases: u64) -> IdentityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ctxs = contexts();
    let mut checks = Vec::new();

    let mut assoc = IdentityCheck::new("star associativity");
    let mut comm = IdentityCheck::new("star commutativity");
    let mut affine = IdentityCheck::new("affine isomorphism");
    let mut perm = IdentityCheck::new("fold permutation invariance");
    let mut merge = IdentityCheck::new("fold merge law");
    let mut dual = IdentityCheck::new("product and symmetric-function folds agree");
    let mut identity = IdentityCheck::new("identity law (unital contexts)");
    let mut linear = IdentityCheck::new("star of a progression is a progression");
    let mut poly_prog = IdentityCheck::new("star of a polynomial progression");
    let mut power_add = IdentityCheck::new("power exponent addition");
    let mut power_mul = IdentityCheck::new("power exponent multiplication");
    let mut gap = IdentityCheck::new("star translate of a GAP is a GAP");
    let mut degree = IdentityCheck::new("difference quotient of a star polynomial");
    for ctx in &ctxs {
        let l = big(ctx.l());
        let k = big(ctx.k());
        let offset = (&k * &k - &k) / &l;
        for _ in 0..cases {
            let v = rand_vec(&mut rng, 5, 60);
            let (a, b, c) = (&v[0], &v[1], &v[2]);
            let ab_c = ctx.star(&ctx.star(a, b), c);
            let a_bc = ctx.star(a, &ctx.star(b, c));
            assoc.record(ab_c == a_bc, || format!("ctx {ctx:?} a={a} b={b} c={c}"));
            comm.record(ctx.star(a, b) == ctx.star(b, a), || format!("ctx {ctx:?} a={a} b={b}"));

            let n = rng.gen_range(1..=8);
            let xs = rand_vec(&mut rng, n, 30);
            let fold = ctx.gfold(&xs).expect("nonempty");
            let product: BigInt = xs.iter().map(|x| ctx.image(x)).product();
            affine.record(product == &l * &fold + &k, || format!("ctx {ctx:?} xs={xs:?}"));
            let mut shuffled = xs.clone();
            shuffled.shuffle(&mut rng);
            perm.record(ctx.gfold(&shuffled).expect("nonempty") == fold, || format!("ctx {ctx:?} xs={xs:?}"));
            let esp = ctx.gfold_esp(&xs).expect("short input");
            dual.record(esp == fold, || format!("ctx {ctx:?} xs={xs:?}"));
            let merged = ctx.star(&ctx.gfold(&v[..2]).unwrap(), &ctx.gfold(&v[2..]).unwrap());
            merge.record(merged == ctx.gfold(&v).unwrap(), || format!("ctx {ctx:?} v={v:?}"));
            if let Some(e) = ctx.identity() {
                identity.record(ctx.star(&e, a) == *a, || format!("ctx {ctx:?} a={a}"));
            }

            // b ⊛ (a + i·d) = y + i·z with y = b ⊛ a and z = d(lb + k)
            let (d, i) = (&v[3], big(rng.gen_range(0..=40)));
            let y = &l * a * b + &k * (a + b) + &offset;
            let z = d * ctx.image(b);
            linear.record(ctx.star(b, &(a + &i * d)) == &y + &i * &z, || format!("ctx {ctx:?} a={a} b={b} d={d} i={i}"));

            let x = &v[4];
            let degree_p = rng.gen_range(1..=3);
            let mut coeffs = vec![BigInt::zero()];
            coeffs.extend(rand_vec(&mut rng, degree_p, 6));
            let poly = IntPolynomial::new(coeffs);
            let pd = poly.eval(d);
            let p = &l * a * x + &k * x + a * &k + &offset;
            let q = ctx.image(x) * b;
            poly_prog.record(ctx.star(x, &(a + b * &pd)) == &p + &q * &pd, || {
                format!("ctx {ctx:?} x={x} a={a} b={b} d={d} P={:?}", poly.coefficients())
            });

            let base = ExactScalar::from(a.clone());
            let (e1, e2) = (rng.gen_range(-3..=3i64), rng.gen_range(-3..=3i64));
            if !ctx.image(a).is_zero() {
                let lhs = ctx.power_exact(&base, e1 + e2).unwrap();
                let rhs = ctx.star_exact(&ctx.power_exact(&base, e1).unwrap(), &ctx.power_exact(&base, e2).unwrap());
                power_add.record(lhs == rhs, || format!("ctx {ctx:?} a={a} c={e1} d={e2}"));
                let lhs = ctx.power_exact(&base, e1 * e2).unwrap();
                let rhs = ctx.power_exact(&ctx.power_exact(&base, e1).unwrap(), e2).unwrap();
                power_mul.record(lhs == rhs, || format!("ctx {ctx:?} a={a} c={e1} d={e2}"));
            }

            let order = rng.gen_range(1..=3usize);
            let len = rng.gen_range(1..=3u32);
            let coeffs = rand_vec(&mut rng, order + 1, 20);
            let desc = FamilyDescriptor::new(Shape::Gap { order, len }, None).unwrap();
            let original = generate(&desc.clone().with_params(coeffs.clone()).unwrap()).unwrap();
            let mut translated: Vec<BigInt> = original.elements.iter().map(|e| ctx.star(x, e)).collect();
            translated.sort();
            translated.dedup();
            let mut shifted = vec![ctx.star(x, &coeffs[0])];
            shifted.extend(coeffs[1..].iter().map(|c| ctx.image(x) * c));
            let expected = generate(&desc.with_params(shifted).unwrap()).unwrap();
            gap.record(translated == expected.elements, || format!("ctx {ctx:?} x={x} a={coeffs:?}"));

            // P(x+h) ⊛ P(x)^{-1} has images ∏_j B_j^{x^j}, B_j = ∏_{i>j} A_i^{C(i,j) h^{i-j}}
            let n = rng.gen_range(1..=3usize);
            let sp_coeffs = rand_vec(&mut rng, n + 1, 4);
            let sp = StarPolynomial::new(*ctx, sp_coeffs.clone()).unwrap();
            let (xv, h) = (rng.gen_range(0..=4u32), rng.gen_range(0..=3u32));
            let images: Vec<BigInt> = sp_coeffs.iter().map(|c| ctx.image(c)).collect();
            let lhs = ctx.image_exact(&sp.eval(&BigInt::from(xv + h)).unwrap());
            let mut rhs = ctx.image_exact(&sp.eval(&BigInt::from(xv)).unwrap()).into_rational();
            for j in 0..n {
                let mut bj = BigInt::one();
                for (i, ai) in images.iter().enumerate().skip(j + 1) {
                    let e = binomial(i as u32, j as u32) * BigInt::from(h).pow((i - j) as u32);
                    bj *= Pow::pow(ai, e.to_biguint().expect("non-negative"));
                }
                rhs *= num_rational::BigRational::from_integer(Pow::pow(&bj, xv.pow(j as u32)));
            }
            degree.record(*lhs.as_rational() == rhs, || format!("ctx {ctx:?} P={sp_coeffs:?} x={xv} h={h}"));
        }
    }
    checks.extend([
        assoc, comm, affine, perm, merge, dual, identity, linear, poly_prog, power_add, power_mul, gap, degree,
    ]);

    checks.extend(dyadic_checks(&mut rng, cases));

    let mut homomorphism = IdentityCheck::new("word evaluation respects disjoint unions");
    for ctx in ctxs.iter().filter(|c| c.is_unital()) {
        for _ in 0..cases.min(2000) {
            let mut alpha = LocatedWord::new();
            let mut beta = LocatedWord::new();
            for p in 1..=8u64 {
                match rng.gen_range(0..3) {
                    0 => {}
                    1 => {
                        alpha.letters.insert(p, rng.gen_range(0..=3u64));
                    }
                    _ => {
                        beta.letters.insert(p, rng.gen_range(0..=3u64));
                    }
                }
            }
            let union = alpha.union(&beta).expect("disjoint by construction");
            let lhs = eval_word_star(ctx, &union).unwrap();
            let rhs = ctx.star(&eval_word_star(ctx, &alpha).unwrap(), &eval_word_star(ctx, &beta).unwrap());
            homomorphism.record(lhs == rhs, || format!("ctx {ctx:?} alpha={alpha:?} beta={beta:?}"));
        }
    }
    checks.push(homomorphism);

    IdentityReport { seed, checks }
}

fn binomial(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

fn dyadic_checks(rng: &mut ChaCha8Rng, cases: u64) -> Vec<IdentityCheck> {
    let mut round_trip = IdentityCheck::new("dyadic bijections round-trip");
    let mut assoc = IdentityCheck::new("oplus and otimes associativity");
    let mut comm = IdentityCheck::new("oplus and otimes commutativity");
    let mut hom = IdentityCheck::new("phi and rho are homomorphisms");
    let mut odd = IdentityCheck::new("otimes on odd numbers is star in (1,1)");
    let mut folds = IdentityCheck::new("folds equal iterated binary operations");
    let c11 = SymmetricContext::new(1, 1).expect("valid");
    for _ in 0..cases {
        let n = big(rng.gen_range(1..=100_000));
        let (x, y) = dyadic::phi(&n).unwrap();
        let (u, e) = dyadic::rho(&n).unwrap();
        round_trip.record(
            dyadic::phi_inv(x, &y).unwrap() == n && dyadic::rho_inv(u, &e).unwrap() == n,
            || format!("n={n}"),
        );
        let v: Vec<BigInt> = (0..4).map(|_| big(rng.gen_range(1..=200))).collect();
        let (a, b, c) = (&v[0], &v[1], &v[2]);
        let op = dyadic::oplus;
        let ot = dyadic::otimes;
        assoc.record(
            op(&op(a, b).unwrap(), c).unwrap() == op(a, &op(b, c).unwrap()).unwrap()
                && ot(&ot(a, b).unwrap(), c).unwrap() == ot(a, &ot(b, c).unwrap()).unwrap(),
            || format!("a={a} b={b} c={c}"),
        );
        comm.record(
            op(a, b).unwrap() == op(b, a).unwrap() && ot(a, b).unwrap() == ot(b, a).unwrap(),
            || format!("a={a} b={b}"),
        );
        let sum = dyadic::phi_pair_add(&dyadic::phi(a).unwrap(), &dyadic::phi(b).unwrap());
        let prod = dyadic::rho_pair_mul(&dyadic::rho(a).unwrap(), &dyadic::rho(b).unwrap());
        hom.record(
            dyadic::phi(&op(a, b).unwrap()).unwrap() == sum && dyadic::rho(&ot(a, b).unwrap()).unwrap() == prod,
            || format!("a={a} b={b}"),
        );
        let (m, k) = (big(2 * rng.gen_range(0..500) + 1), big(2 * rng.gen_range(0..500) + 1));
        odd.record(ot(&m, &k).unwrap() == c11.star(&m, &k), || format!("m={m} n={k}"));
        let left_op = v[1..].iter().fold(v[0].clone(), |acc, x| op(&acc, x).unwrap());
        let left_ot = v[1..].iter().fold(v[0].clone(), |acc, x| ot(&acc, x).unwrap());
        folds.record(
            dyadic::oplus_fold(&v).unwrap() == left_op && dyadic::otimes_fold(&v).unwrap() == left_ot,
            || format!("xs={v:?}"),
        );
    }
    vec![round_trip, assoc, comm, hom, odd, folds]
}
