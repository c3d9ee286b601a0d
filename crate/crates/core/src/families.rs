//! Constructors and predicates for the named families of (candidate) maximum
//! scattered linear sets: pseudoregulus, LP, the binomial-pair normal forms
//! L_{α,β,s} and their specializations, the two rank-4/4 candidate families,
//! and the scatteredness criteria that bypass the geometry.

use crate::gfield::{FFElement, FieldCtx, EXT};
use crate::linpoly::{LinearSet, LinearizedPoly};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("invalid pair: delta^2 * eps = 1")]
    InvalidPair,
    #[error("b must be nonzero")]
    ZeroB,
}

/// A named family member. All parameters are elements of F_{q^5} (constraints
/// per kind are validated by `pair_for`/`construct`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilySpec {
    /// x^{q^s}
    Pseudoregulus { s: usize },
    /// x^{q^s} + delta x^{q^{5-s}}, N(delta) not in {0,1}
    Lp { delta: FFElement, s: usize },
    /// U = {(x - alpha x^{q^{2s}}, x^{q^s} - beta x^{q^{2s}})}
    AlphaBeta {
        alpha: FFElement,
        beta: FFElement,
        s: usize,
    },
    /// L_{1, 1-e, s} with e in F_q
    FormaE { e: FFElement, s: usize },
    /// U = {(x - k^{-1} x^{q^{2s}}, x^{q^s} - delta k^{q^{4s}+q^{2s}} x^{q^{2s}})},
    /// delta in F_q*
    FormaK {
        k: FFElement,
        delta: FFElement,
        s: usize,
    },
    /// U = {(eta(x^q - x) + tr(rho x), x^q - x^{q^4})}, tr(eta)=0, eta != 0,
    /// tr(rho) != 0
    C3 { eta: FFElement, rho: FFElement },
    /// (x, k(x^q + x^{q^3}) + x^{q^2} + x^{q^4}), N(k) = 1
    C4 { k: FFElement },
    /// (x, tr(eta^{-1}) x^{q^4} - (eta^{-q^4} + eta^{-1}) tr(x)), the
    /// rho-eliminated form of C3 when tr(eta^{-1}) != 0
    F1 { eta: FFElement },
    /// x^{q^2} + b x^{q^4}, b != 0 (never scattered)
    Gb { b: FFElement },
}

fn check_s(s: usize) -> Result<(), FamilyError> {
    if s.is_multiple_of(EXT) {
        Err(FamilyError::BadParameters("gcd(s,5) != 1".into()))
    } else {
        Ok(())
    }
}

impl FamilySpec {
    /// The defining pair of F_q-linear maps (g, h); the family set is the
    /// linear set of U = {(g(x), h(x))}.
    pub fn pair_for(
        &self,
        ctx: &FieldCtx,
    ) -> Result<(LinearizedPoly, LinearizedPoly), FamilyError> {
        let x = LinearizedPoly::monomial(0, ctx.one());
        match *self {
            FamilySpec::Pseudoregulus { s } => {
                check_s(s)?;
                Ok((x, LinearizedPoly::frob_power(ctx, s)))
            }
            FamilySpec::Lp { delta, s } => {
                check_s(s)?;
                let n = ctx.norm(delta);
                if n.is_zero() || n == ctx.one() {
                    return Err(FamilyError::BadParameters(
                        "LP needs N(delta) not in {0,1}".into(),
                    ));
                }
                let h = LinearizedPoly::monomial(s % EXT, ctx.one())
                    .add(ctx, &LinearizedPoly::monomial((EXT - s % EXT) % EXT, delta));
                Ok((x, h))
            }
            FamilySpec::AlphaBeta { alpha, beta, s } => {
                check_s(s)?;
                if alpha.is_zero() && beta.is_zero() {
                    return Err(FamilyError::BadParameters("(alpha,beta) = (0,0)".into()));
                }
                Ok(alpha_beta_pair(ctx, alpha, beta, s))
            }
            FamilySpec::FormaE { e, s } => {
                check_s(s)?;
                if !ctx.in_fq(e) {
                    return Err(FamilyError::BadParameters("e must lie in F_q".into()));
                }
                Ok(alpha_beta_pair(ctx, ctx.one(), ctx.sub(ctx.one(), e), s))
            }
            FamilySpec::FormaK { k, delta, s } => {
                check_s(s)?;
                if k.is_zero() {
                    return Err(FamilyError::BadParameters("k = 0".into()));
                }
                if delta.is_zero() || !ctx.in_fq(delta) {
                    return Err(FamilyError::BadParameters("delta must lie in F_q*".into()));
                }
                let alpha = ctx.inv(k);
                let beta = ctx.mul(
                    delta,
                    ctx.pow_u(k, ctx.qpow(4 * s % EXT) + ctx.qpow(2 * s % EXT)),
                );
                Ok(alpha_beta_pair(ctx, alpha, beta, s))
            }
            FamilySpec::C3 { eta, rho } => {
                if eta.is_zero() || !ctx.trace(eta).is_zero() {
                    return Err(FamilyError::BadParameters(
                        "C3 needs eta != 0, tr(eta) = 0".into(),
                    ));
                }
                if ctx.trace(rho).is_zero() {
                    return Err(FamilyError::BadParameters("C3 needs tr(rho) != 0".into()));
                }
                // g = eta(x^q - x) + tr(rho x): coefficients rho^{q^i}, with
                // -eta on x and +eta on x^q
                let mut g = LinearizedPoly::zero();
                for i in 0..EXT {
                    g.coeffs[i] = ctx.frob(rho, i);
                }
                g.coeffs[0] = ctx.sub(g.coeffs[0], eta);
                g.coeffs[1] = ctx.add(g.coeffs[1], eta);
                let h = LinearizedPoly::monomial(1, ctx.one())
                    .add(ctx, &LinearizedPoly::monomial(4, ctx.neg(ctx.one())));
                Ok((g, h))
            }
            FamilySpec::C4 { k } => {
                if k.is_zero() || ctx.norm(k) != ctx.one() {
                    return Err(FamilyError::BadParameters("C4 needs N(k) = 1".into()));
                }
                let mut h = LinearizedPoly::zero();
                h.coeffs[1] = k;
                h.coeffs[3] = k;
                h.coeffs[2] = ctx.one();
                h.coeffs[4] = ctx.one();
                Ok((x, h))
            }
            FamilySpec::F1 { eta } => {
                if eta.is_zero() || !ctx.trace(eta).is_zero() {
                    return Err(FamilyError::BadParameters(
                        "F1 needs eta != 0, tr(eta) = 0".into(),
                    ));
                }
                let rho = ctx.inv(eta);
                let t = ctx.trace(rho);
                if t.is_zero() {
                    return Err(FamilyError::BadParameters(
                        "F1 needs tr(eta^{-1}) != 0".into(),
                    ));
                }
                let u = ctx.add(ctx.frob(rho, 4), rho);
                let mut h = LinearizedPoly::zero();
                for i in 0..EXT {
                    h.coeffs[i] = ctx.neg(u);
                }
                h.coeffs[4] = ctx.add(h.coeffs[4], t);
                Ok((x, h))
            }
            FamilySpec::Gb { b } => {
                if b.is_zero() {
                    return Err(FamilyError::ZeroB);
                }
                let h = LinearizedPoly::monomial(2, ctx.one())
                    .add(ctx, &LinearizedPoly::monomial(4, b));
                Ok((x, h))
            }
        }
    }

    /// The literal point set of the family member.
    pub fn construct(&self, ctx: &FieldCtx) -> Result<LinearSet, FamilyError> {
        let (g, h) = self.pair_for(ctx)?;
        Ok(LinearSet::of_pair(ctx, &g, &h))
    }

    pub fn fmt(&self, ctx: &FieldCtx) -> String {
        match *self {
            FamilySpec::Pseudoregulus { s } => format!("pseudoregulus(s={s})"),
            FamilySpec::Lp { delta, s } => format!("LP(delta={},s={s})", ctx.fmt_elt(delta)),
            FamilySpec::AlphaBeta { alpha, beta, s } => format!(
                "L(alpha={},beta={},s={s})",
                ctx.fmt_elt(alpha),
                ctx.fmt_elt(beta)
            ),
            FamilySpec::FormaE { e, s } => format!("L(1,1-e,s) e={} s={s}", ctx.fmt_elt(e)),
            FamilySpec::FormaK { k, delta, s } => format!(
                "K(k={},delta={},s={s})",
                ctx.fmt_elt(k),
                ctx.fmt_elt(delta)
            ),
            FamilySpec::C3 { eta, rho } => {
                format!("C3(eta={},rho={})", ctx.fmt_elt(eta), ctx.fmt_elt(rho))
            }
            FamilySpec::C4 { k } => format!("C4(k={})", ctx.fmt_elt(k)),
            FamilySpec::F1 { eta } => format!("F1(eta={})", ctx.fmt_elt(eta)),
            FamilySpec::Gb { b } => format!("g_b(b={})", ctx.fmt_elt(b)),
        }
    }
}

pub fn alpha_beta_pair(
    ctx: &FieldCtx,
    alpha: FFElement,
    beta: FFElement,
    s: usize,
) -> (LinearizedPoly, LinearizedPoly) {
    let s = s % EXT;
    let g = LinearizedPoly::monomial(0, ctx.one())
        .add(ctx, &LinearizedPoly::monomial(2 * s % EXT, ctx.neg(alpha)));
    let h = LinearizedPoly::monomial(s, ctx.one())
        .add(ctx, &LinearizedPoly::monomial(2 * s % EXT, ctx.neg(beta)));
    (g, h)
}

/// The three L_{α,β,s} predicates: rank defect, pseudoregulus membership, and
/// the no-solution scatteredness criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbPredicates {
    pub rank_lt5: bool,
    pub pseudoregulus: bool,
    pub scattered_by_criterion: bool,
    /// log of the solution u when the criterion found one
    pub criterion_witness: Option<u32>,
}

/// rank_lt5 iff alpha^{q^s} = beta^{q^s+1} and N(alpha) = N(beta) = 1;
/// pseudoregulus iff the first equality holds but the norms are not both 1;
/// scattered_by_criterion iff no u with N(u) = -1 satisfies
/// beta^{q^{3s}+q^s+1} u^{q^s} - beta^{q^s+1} u^{q^{2s}+q^s+1} (1-alpha u)^{q^{3s}}
///   + beta^{q^{3s}} (1-alpha u)^{q^s+1} = 0.
///
/// The printed equation presumes beta != 0 (it degenerates to 0 = 0
/// otherwise). For beta = 0 the substitution x = y^{q^{5-s}} followed by a
/// component swap turns U into the graph of y^{q^s} - alpha^{-1} y^{q^{5-s}},
/// a binomial of LP shape with delta = -alpha^{-1}; scatteredness is then
/// N(delta) = -N(alpha)^{-1} outside {0, 1}, i.e. N(alpha) != -1.
pub fn alpha_beta_predicates(
    ctx: &FieldCtx,
    alpha: FFElement,
    beta: FFElement,
    s: usize,
) -> AbPredicates {
    assert!(!(alpha.is_zero() && beta.is_zero()));
    let s = s % EXT;
    assert!(s != 0);
    let lhs = ctx.frob(alpha, s);
    let rhs = ctx.pow_u(beta, ctx.qpow(s) + 1);
    let eq = lhs == rhs;
    let nboth1 = ctx.norm(alpha) == ctx.one() && ctx.norm(beta) == ctx.one();
    let (scattered, witness) = if beta.is_zero() {
        (ctx.norm(alpha) != ctx.minus_one(), None)
    } else {
        let witness = fulemma41_solution(ctx, alpha, beta, s);
        (witness.is_none(), witness)
    };
    AbPredicates {
        rank_lt5: eq && nboth1,
        pseudoregulus: eq && !nboth1,
        scattered_by_criterion: scattered,
        criterion_witness: witness.map(|u| u.log().unwrap()),
    }
}

/// First u (in generator order on the norm fiber) violating the criterion.
pub fn fulemma41_solution(
    ctx: &FieldCtx,
    alpha: FFElement,
    beta: FFElement,
    s: usize,
) -> Option<FFElement> {
    let c1 = ctx.pow_u(beta, ctx.qpow(3 * s % EXT) + ctx.qpow(s) + 1);
    let c2 = ctx.pow_u(beta, ctx.qpow(s) + 1);
    let c3 = ctx.frob(beta, 3 * s % EXT);
    let e23 = ctx.qpow(2 * s % EXT) + ctx.qpow(s) + 1;
    ctx.norm_fiber(ctx.minus_one()).find(|&u| {
        let w = ctx.sub(ctx.one(), ctx.mul(alpha, u));
        let t1 = ctx.mul(c1, ctx.frob(u, s));
        let t2 = ctx.mul(c2, ctx.mul(ctx.pow_u(u, e23), ctx.frob(w, 3 * s % EXT)));
        let t3 = ctx.mul(c3, ctx.mul(ctx.frob(w, s), w));
        ctx.add(ctx.sub(t1, t2), t3).is_zero()
    })
}

/// Necessary condition for a maximum scattered L_{α,β,s} with beta != 0:
/// alpha^{q^s} / beta^{q^s+1} must lie in F_q.
pub fn plus_generale_ok(ctx: &FieldCtx, alpha: FFElement, beta: FFElement, s: usize) -> bool {
    if beta.is_zero() {
        return true;
    }
    let r = ctx.div(
        ctx.frob(alpha, s % EXT),
        ctx.pow_u(beta, ctx.qpow(s % EXT) + 1),
    );
    ctx.in_fq(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SctnessOutcome {
    Witness(FFElement),
    NoSolution,
}

/// Search x with eps N(x) = -1 solving
/// delta^2 eps x^{q^s} - delta eps x^{q^{2s}+q^s+1} (1-x)^{q^{3s}} + (1-x)^{q^s+1} = 0,
/// iterating only over the norm fiber {x : N(x) = -1/eps}.
pub fn sctness_solve(
    ctx: &FieldCtx,
    delta: FFElement,
    eps: FFElement,
    s: usize,
) -> Result<SctnessOutcome, FamilyError> {
    let s = s % EXT;
    assert!(s != 0, "gcd(s,5)=1 required");
    for (name, v) in [("delta", delta), ("eps", eps)] {
        if v.is_zero() || !ctx.in_fq(v) {
            return Err(FamilyError::BadParameters(format!(
                "{name} must lie in F_q*"
            )));
        }
    }
    if ctx.mul(ctx.mul(delta, delta), eps) == ctx.one() {
        return Err(FamilyError::InvalidPair);
    }
    let target = ctx.neg(ctx.inv(eps));
    let d2e = ctx.mul(ctx.mul(delta, delta), eps);
    let de = ctx.mul(delta, eps);
    let e23 = ctx.qpow(2 * s) + ctx.qpow(s) + 1;
    for x in ctx.norm_fiber(target) {
        if sctness_equation_holds(ctx, d2e, de, e23, s, x) {
            return Ok(SctnessOutcome::Witness(x));
        }
    }
    Ok(SctnessOutcome::NoSolution)
}

#[inline]
fn sctness_equation_holds(
    ctx: &FieldCtx,
    d2e: FFElement,
    de: FFElement,
    e23: u64,
    s: usize,
    x: FFElement,
) -> bool {
    let w = ctx.sub(ctx.one(), x);
    let t1 = ctx.mul(d2e, ctx.frob(x, s));
    let t2 = ctx.mul(de, ctx.mul(ctx.pow_u(x, e23), ctx.frob(w, 3 * s % EXT)));
    let t3 = ctx.mul(ctx.frob(w, s), w);
    ctx.add(ctx.sub(t1, t2), t3).is_zero()
}

/// Re-check a witness independently of the fiber iteration.
pub fn verify_sctness_witness(
    ctx: &FieldCtx,
    delta: FFElement,
    eps: FFElement,
    s: usize,
    x: FFElement,
) -> bool {
    let s = s % EXT;
    if ctx.mul(eps, ctx.norm(x)) != ctx.minus_one() {
        return false;
    }
    let d2e = ctx.mul(ctx.mul(delta, delta), eps);
    let de = ctx.mul(delta, eps);
    let e23 = ctx.qpow(2 * s) + ctx.qpow(s) + 1;
    sctness_equation_holds(ctx, d2e, de, e23, s, x)
}

/// delta^3 eps^2 + (1 - 3 delta) eps + 1, the guard of the witness-existence
/// theorem.
pub fn tconj_discriminant(ctx: &FieldCtx, delta: FFElement, eps: FFElement) -> FFElement {
    let d3e2 = ctx.mul(ctx.pow_u(delta, 3), ctx.mul(eps, eps));
    let three = ctx.from_int(3);
    let mid = ctx.mul(ctx.sub(ctx.one(), ctx.mul(three, delta)), eps);
    ctx.add(ctx.add(d3e2, mid), ctx.one())
}

/// g_b = x^{q^2} + b x^{q^4} is never scattered; returns the verdict with a
/// verified witness pair.
pub fn gb_check(
    ctx: &FieldCtx,
    b: FFElement,
) -> Result<(bool, Option<(FFElement, FFElement)>), FamilyError> {
    if b.is_zero() {
        return Err(FamilyError::ZeroB);
    }
    let g = LinearizedPoly::monomial(2, ctx.one()).add(ctx, &LinearizedPoly::monomial(4, b));
    match crate::linpoly::is_scattered(ctx, &g).unwrap() {
        crate::linpoly::Scatteredness::Scattered => Ok((true, None)),
        crate::linpoly::Scatteredness::Witness(y, z) => {
            assert!(crate::linpoly::verify_witness(ctx, &g, y, z));
            Ok((false, Some((y, z))))
        }
    }
}

/// Explicit projectivity carrying the C3 set onto L_{F1} when tr(eta^{-1}) != 0:
/// [[rho, 0], [-rho tr(rho), tr(rho)]] with rho = eta^{-1}.
pub fn c3_to_f1_matrix(ctx: &FieldCtx, eta: FFElement) -> [[FFElement; 2]; 2] {
    let rho = ctx.inv(eta);
    let t = ctx.trace(rho);
    assert!(!t.is_zero());
    [[rho, FFElement::ZERO], [ctx.neg(ctx.mul(rho, t)), t]]
}
