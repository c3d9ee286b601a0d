//! The plane curve Q attached to a (delta, eps) parameter pair, exact point
//! counting over F_q and F_{q^5}, the lifting chain back to the five-variable
//! system, and the eps = 1 conic special case.

use crate::families::verify_sctness_witness;
use crate::gfield::{FFElement, FieldCtx, EXT};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("invalid pair: {0}")]
    InvalidPair(String),
    #[error("degenerate lift: {0} vanished")]
    Degenerate(&'static str),
    #[error("x^2 + 3x + 1 has no root in F_q")]
    NoDeltaRoot,
    #[error("internal inconsistency: {0}")]
    Inconsistent(&'static str),
}

/// The curve X^2 Y^2 f0 + XY(X+Y) f1 + (X^2+Y^2) f2 + XY f3 + (X+Y) f4 + f5,
/// of degree 4, or 3 exactly when delta*eps = 1.
pub struct CurveQ {
    pub delta: FFElement,
    pub eps: FFElement,
    pub f: [FFElement; 6],
    pub degree: u8,
}

impl CurveQ {
    pub fn new(ctx: &FieldCtx, delta: FFElement, eps: FFElement) -> Result<CurveQ, CurveError> {
        for (name, v) in [("delta", delta), ("eps", eps)] {
            if v.is_zero() || !ctx.in_fq(v) {
                return Err(CurveError::InvalidPair(format!("{name} not in F_q*")));
            }
        }
        let one = ctx.one();
        let d2e = ctx.mul(ctx.mul(delta, delta), eps);
        if d2e == one {
            return Err(CurveError::InvalidPair("delta^2 eps = 1".into()));
        }
        if crate::families::tconj_discriminant(ctx, delta, eps).is_zero() {
            return Err(CurveError::InvalidPair(
                "delta^3 eps^2 + (1-3delta) eps + 1 = 0".into(),
            ));
        }
        let de = ctx.mul(delta, eps);
        let two = ctx.from_int(2);
        let m = |a: FFElement, b: FFElement| ctx.mul(a, b);
        let d2e_1 = ctx.sub(d2e, one);
        let f0 = m(ctx.sub(one, d2e), ctx.sub(de, one));
        let f1 = m(ctx.sub(ctx.add(d2e, de), two), d2e_1);
        let f2 = ctx.neg(m(d2e_1, d2e_1));
        // delta^6 eps^3 - 5 delta^4 eps^2 + 6 delta^2 eps + delta eps + delta - 4
        let f3 = {
            let t1 = ctx.pow_u(ctx.mul(ctx.mul(delta, delta), ctx.pow_u(eps, 0)), 1);
            let _ = t1;
            let d2 = ctx.mul(delta, delta);
            let a = ctx.mul(ctx.pow_u(d2, 3), ctx.pow_u(eps, 3));
            let b = ctx.mul(ctx.from_int(5), ctx.mul(ctx.pow_u(d2, 2), ctx.mul(eps, eps)));
            let c = ctx.mul(ctx.from_int(6), ctx.mul(d2, eps));
            let mut acc = ctx.sub(a, b);
            acc = ctx.add(acc, c);
            acc = ctx.add(acc, de);
            acc = ctx.add(acc, delta);
            ctx.sub(acc, ctx.from_int(4))
        };
        let f4 = m(d2e_1, ctx.sub(ctx.add(d2e, delta), two));
        let f5 = m(ctx.sub(delta, one), ctx.sub(one, d2e));
        let degree = if f0.is_zero() { 3 } else { 4 };
        debug_assert_eq!(f0.is_zero(), de == one, "degree law");
        Ok(CurveQ {
            delta,
            eps,
            f: [f0, f1, f2, f3, f4, f5],
            degree,
        })
    }

    pub fn eval(&self, ctx: &FieldCtx, x: FFElement, y: FFElement) -> FFElement {
        let [f0, f1, f2, f3, f4, f5] = self.f;
        let xy = ctx.mul(x, y);
        let x2 = ctx.mul(x, x);
        let y2 = ctx.mul(y, y);
        let mut acc = ctx.mul(ctx.mul(x2, y2), f0);
        acc = ctx.add(acc, ctx.mul(ctx.mul(xy, ctx.add(x, y)), f1));
        acc = ctx.add(acc, ctx.mul(ctx.add(x2, y2), f2));
        acc = ctx.add(acc, ctx.mul(xy, f3));
        acc = ctx.add(acc, ctx.mul(ctx.add(x, y), f4));
        ctx.add(acc, f5)
    }

    /// Coefficients of the quadratic in Y at a fixed X:
    /// (X^2 f0 + X f1 + f2) Y^2 + (X^2 f1 + X f3 + f4) Y + (X^2 f2 + X f4 + f5).
    fn y_quadratic(&self, ctx: &FieldCtx, x: FFElement) -> (FFElement, FFElement, FFElement) {
        let [f0, f1, f2, f3, f4, f5] = self.f;
        let x2 = ctx.mul(x, x);
        let a = ctx.add(ctx.add(ctx.mul(x2, f0), ctx.mul(x, f1)), f2);
        let b = ctx.add(ctx.add(ctx.mul(x2, f1), ctx.mul(x, f3)), f4);
        let c = ctx.add(ctx.add(ctx.mul(x2, f2), ctx.mul(x, f4)), f5);
        (a, b, c)
    }

    /// Exact affine point count over F_{q^k}, k in {1, 5}, by iterating X and
    /// solving the quadratic in Y.
    pub fn count_points(&self, ctx: &FieldCtx, k: usize) -> u64 {
        assert!(k == 1 || k == EXT, "supported extension degrees: 1, 5");
        let xs: Vec<FFElement> = if k == 1 {
            ctx.fq_elements()
        } else {
            std::iter::once(FFElement::ZERO)
                .chain(ctx.all_nonzero())
                .collect()
        };
        let mut count = 0u64;
        for &x in &xs {
            count += self.roots_at(ctx, x, k).len() as u64;
        }
        count
    }

    /// Y-roots over F_{q^k} at a fixed X in F_{q^k}.
    pub fn roots_at(&self, ctx: &FieldCtx, x: FFElement, k: usize) -> Vec<FFElement> {
        let in_sub = |y: FFElement| k == EXT || ctx.in_fq(y);
        let (a, b, c) = self.y_quadratic(ctx, x);
        if a.is_zero() {
            if b.is_zero() {
                if c.is_zero() {
                    // the whole Y-line lies on the curve at this X
                    return if k == 1 {
                        ctx.fq_elements()
                    } else {
                        std::iter::once(FFElement::ZERO)
                            .chain(ctx.all_nonzero())
                            .collect()
                    };
                }
                return Vec::new();
            }
            let y = ctx.neg(ctx.div(c, b));
            return if in_sub(y) { vec![y] } else { Vec::new() };
        }
        ctx.solve_quadratic(a, b, c)
            .into_iter()
            .filter(|&y| in_sub(y))
            .collect()
    }

    /// Iterator of up to `limit` non-degenerate curve points over F_{q^5}
    /// (points where the lifting chain's denominators are all nonzero).
    pub fn sample_points(&self, ctx: &FieldCtx, limit: usize) -> Vec<(FFElement, FFElement)> {
        let mut out = Vec::with_capacity(limit);
        for x in std::iter::once(FFElement::ZERO).chain(ctx.all_nonzero()) {
            for y in self.roots_at(ctx, x, EXT) {
                if lift(ctx, self.delta, self.eps, x, y).is_ok() {
                    out.push((x, y));
                    if out.len() == limit {
                        return out;
                    }
                }
            }
        }
        out
    }
}

/// G(A,B,C,D,E) = ABCDE*eps + 1.
pub fn eq_g(ctx: &FieldCtx, eps: FFElement, p: &[FFElement; 5]) -> FFElement {
    let mut prod = eps;
    for &v in p {
        prod = ctx.mul(prod, v);
    }
    ctx.add(prod, ctx.one())
}

/// F_0(A,B,C,D,E) = delta^2 eps B - delta eps A B C (1 - D) + (1-A)(1-B);
/// F_{i+1}(args) = F_i(args rotated left).
pub fn eq_f(
    ctx: &FieldCtx,
    delta: FFElement,
    eps: FFElement,
    p: &[FFElement; 5],
    i: usize,
) -> FFElement {
    let g = |k: usize| p[(k + i) % 5];
    let (a, b, c, d) = (g(0), g(1), g(2), g(3));
    let one = ctx.one();
    let t1 = ctx.mul(ctx.mul(ctx.mul(delta, delta), eps), b);
    let t2 = ctx.mul(
        ctx.mul(ctx.mul(delta, eps), ctx.mul(a, ctx.mul(b, c))),
        ctx.sub(one, d),
    );
    let t3 = ctx.mul(ctx.sub(one, a), ctx.sub(one, b));
    ctx.add(ctx.sub(t1, t2), t3)
}

fn lift(
    ctx: &FieldCtx,
    delta: FFElement,
    eps: FFElement,
    a: FFElement,
    b: FFElement,
) -> Result<[FFElement; 5], CurveError> {
    let one = ctx.one();
    let d2e = ctx.mul(ctx.mul(delta, delta), eps);
    let de = ctx.mul(delta, eps);
    if a.is_zero() {
        return Err(CurveError::Degenerate("A"));
    }
    if b.is_zero() {
        return Err(CurveError::Degenerate("B"));
    }
    // C = (B d2e - B - delta + 1) / (A (B de - B - d2e + 1))
    let den_c = ctx.mul(a, ctx.add(ctx.sub(ctx.mul(b, de), b), ctx.sub(one, d2e)));
    if den_c.is_zero() {
        return Err(CurveError::Degenerate("B de - B - d2e + 1"));
    }
    let num_c = ctx.add(ctx.sub(ctx.mul(b, d2e), b), ctx.sub(one, delta));
    let c = ctx.div(num_c, den_c);
    if c.is_zero() {
        return Err(CurveError::Degenerate("C"));
    }
    // D = (A B C de - A B + A - B d2e + B - 1) / (A B C de)
    let abc = ctx.mul(a, ctx.mul(b, c));
    let den_d = ctx.mul(abc, de);
    let num_d = {
        let mut acc = den_d;
        acc = ctx.sub(acc, ctx.mul(a, b));
        acc = ctx.add(acc, a);
        acc = ctx.sub(acc, ctx.mul(b, d2e));
        acc = ctx.add(acc, b);
        ctx.sub(acc, one)
    };
    let d = ctx.div(num_d, den_d);
    if d.is_zero() {
        return Err(CurveError::Degenerate("D"));
    }
    // E = -1/(eps A B C D)
    let e = ctx.neg(ctx.inv(ctx.mul(eps, ctx.mul(abc, d))));
    Ok([a, b, c, d, e])
}

/// Lift a curve point to the five-variable system and verify all six
/// equations exactly.
pub fn lift_and_verify(
    ctx: &FieldCtx,
    delta: FFElement,
    eps: FFElement,
    a: FFElement,
    b: FFElement,
) -> Result<[FFElement; 5], CurveError> {
    let p = lift(ctx, delta, eps, a, b)?;
    if !eq_g(ctx, eps, &p).is_zero() {
        return Err(CurveError::Inconsistent("G != 0 after lift"));
    }
    for i in 0..5 {
        if !eq_f(ctx, delta, eps, &p, i).is_zero() {
            return Err(CurveError::Inconsistent("some F_i != 0 after lift"));
        }
    }
    Ok(p)
}

/// Verified data of the eps = 1 conic special case.
pub struct ConicWitness {
    pub delta: FFElement,
    pub ell: FFElement,
    pub chain: [FFElement; 5],
}

/// The eps = 1 branch: when delta^2 + 3 delta + 1 has a root delta in F_q, the
/// conic XY - (delta+1)X - Y + 1 = 0 is a component of Q and carries a point
/// (l, l^{q^s}) whose lift is the Frobenius orbit of l. Verifies the full
/// chain and, where defined, the solvability criterion of the 2x2 matrix
/// M = [[0, delta], [1, delta]]^5.
pub fn conic_case(ctx: &FieldCtx, s: usize) -> Result<ConicWitness, CurveError> {
    let s = s % EXT;
    assert!(s != 0);
    let one = ctx.one();
    let three = ctx.from_int(3);
    let delta = ctx
        .fq_elements()
        .into_iter()
        .find(|&d| {
            !d.is_zero()
                && ctx
                    .add(ctx.add(ctx.mul(d, d), ctx.mul(three, d)), one)
                    .is_zero()
        })
        .ok_or(CurveError::NoDeltaRoot)?;
    let eps = one;
    if ctx.mul(ctx.mul(delta, delta), eps) == one {
        // char 5: the only root is delta = 1, excluded by delta^2 eps != 1
        return Err(CurveError::InvalidPair(
            "conic delta has delta^2 eps = 1".into(),
        ));
    }
    // matrix criterion of M = [[0, delta], [1, delta]]^5
    let m5 = {
        let mut m = [[FFElement::ZERO, delta], [one, delta]];
        let mul2 = |x: &[[FFElement; 2]; 2], y: &[[FFElement; 2]; 2]| {
            let mut r = [[FFElement::ZERO; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    r[i][j] = ctx.add(
                        ctx.mul(x[i][0], y[0][j]),
                        ctx.mul(x[i][1], y[1][j]),
                    );
                }
            }
            r
        };
        let m2 = mul2(&m, &m);
        let m4 = mul2(&m2, &m2);
        m = mul2(&m4, &m);
        m
    };
    if ctx.p() == 2 {
        // G5 = (2,2)-entry of M^5 = delta^3 (delta+1) (delta+3)
        let g5 = m5[1][1];
        let expect = ctx.mul(
            ctx.pow_u(delta, 3),
            ctx.mul(ctx.add(delta, one), ctx.add(delta, three)),
        );
        if g5 != expect {
            return Err(CurveError::Inconsistent("G5 closed form"));
        }
    } else {
        // Delta = tr(M)^2 - 4 det(M) must vanish at the conic delta
        let tr = ctx.add(m5[0][0], m5[1][1]);
        let det = ctx.sub(ctx.mul(m5[0][0], m5[1][1]), ctx.mul(m5[0][1], m5[1][0]));
        let disc = ctx.sub(ctx.mul(tr, tr), ctx.mul(ctx.from_int(4), det));
        if !disc.is_zero() {
            return Err(CurveError::Inconsistent("matrix discriminant nonzero"));
        }
    }
    // brute-force xi with xi^{q^s+1} - delta xi - delta = 0; then l = xi + 1
    let ell = ctx
        .all_nonzero()
        .find(|&xi| {
            let lhs = ctx.mul(ctx.frob(xi, s), xi);
            ctx.sub(ctx.sub(lhs, ctx.mul(delta, xi)), delta).is_zero()
        })
        .map(|xi| ctx.add(xi, one))
        .ok_or(CurveError::Inconsistent("no conic point found"))?;
    // (lqs): l^{q^s} = ((delta+1) l - 1)/(l - 1)
    let lqs = ctx.frob(ell, s);
    let rhs = ctx.div(
        ctx.sub(ctx.mul(ctx.add(delta, one), ell), one),
        ctx.sub(ell, one),
    );
    if lqs != rhs {
        return Err(CurveError::Inconsistent("(l, l^{q^s}) not on the conic"));
    }
    // (l, l^{q^s}) lies on Q
    let curve = CurveQ::new(ctx, delta, eps)?;
    if !curve.eval(ctx, ell, lqs).is_zero() {
        return Err(CurveError::Inconsistent("conic is not a component of Q"));
    }
    // (lq2s): l^{q^{2s}} = ((delta+2) l - 1)/l
    let lq2s = ctx.frob(ell, 2 * s % EXT);
    let rhs = ctx.div(
        ctx.sub(ctx.mul(ctx.add(delta, ctx.from_int(2)), ell), one),
        ell,
    );
    if lq2s != rhs {
        return Err(CurveError::Inconsistent("l^{q^2s} closed form"));
    }
    // the lift equals the Frobenius orbit of l
    let chain = lift_and_verify(ctx, delta, eps, ell, lqs)?;
    let orbit: [FFElement; 5] = core::array::from_fn(|i| ctx.frob(ell, i * s % EXT));
    if chain != orbit {
        return Err(CurveError::Inconsistent("lift differs from orbit"));
    }
    if !verify_sctness_witness(ctx, delta, eps, s, ell) {
        return Err(CurveError::Inconsistent("l fails the witness equations"));
    }
    Ok(ConicWitness { delta, ell, chain })
}

/// Valid (delta, eps) pairs: both in F_q*, delta^2 eps != 1 and the cubic
/// discriminant nonzero.
pub fn valid_pairs(ctx: &FieldCtx) -> Vec<(FFElement, FFElement)> {
    let one = ctx.one();
    let mut out = Vec::new();
    for &delta in ctx.fq_elements().iter().skip(1) {
        for &eps in ctx.fq_elements().iter().skip(1) {
            if ctx.mul(ctx.mul(delta, delta), eps) == one {
                continue;
            }
            if crate::families::tconj_discriminant(ctx, delta, eps).is_zero() {
                continue;
            }
            out.push((delta, eps));
        }
    }
    out
}
