//! Exact linear algebra in PG(4,q^5): spans, meets, the canonical subgeometry
//! Σ in its rational and Moore models (plus custom semilinear models used by
//! the synthetic configuration builders), point rank, the Γ_{f0} construction,
//! and projection maps onto lines.

use crate::gfield::{FFElement, FieldCtx, Mat5, Vec5, EXT, ZERO_VEC5};
use crate::linpoly::{LinearSet, LinearizedPoly, Pg1Point};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProjError {
    #[error("vertex contains the point")]
    VertexContainsPoint,
    #[error("vertex meets the subgeometry")]
    VertexMeetsSigma,
    #[error("subspace arguments have the wrong dimension")]
    BadDimension,
    #[error("invalid subgeometry model: {0}")]
    BadModel(String),
}

/// A point of PG(4,q^5), normalized so the first nonzero coordinate is 1.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ProjPoint {
    pub coords: Vec5,
}

impl ProjPoint {
    pub fn normalize(ctx: &FieldCtx, v: &Vec5) -> Option<ProjPoint> {
        let lead = v.iter().find(|c| !c.is_zero())?;
        let d = ctx.inv(*lead);
        let coords: Vec5 = core::array::from_fn(|i| ctx.mul(d, v[i]));
        Some(ProjPoint { coords })
    }

    pub fn fmt(&self, ctx: &FieldCtx) -> String {
        let parts: Vec<String> = self.coords.iter().map(|&c| ctx.fmt_elt(c)).collect();
        format!("[{}]", parts.join(","))
    }
}

/// A subspace of PG(4,q^5) as a reduced-row-echelon basis matrix (unique per
/// subspace, so equality is representation equality).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProjSubspace {
    pub basis: Vec<Vec5>,
}

impl ProjSubspace {
    pub fn empty() -> Self {
        ProjSubspace { basis: Vec::new() }
    }

    pub fn from_rows(ctx: &FieldCtx, rows: &[Vec5]) -> Self {
        let mut m: Vec<Vec<FFElement>> = rows.iter().map(|r| r.to_vec()).collect();
        ctx.row_reduce(&mut m);
        ProjSubspace {
            basis: m
                .into_iter()
                .map(|r| {
                    let mut v = ZERO_VEC5;
                    v.copy_from_slice(&r);
                    v
                })
                .collect(),
        }
    }

    pub fn from_point(p: &ProjPoint) -> Self {
        ProjSubspace {
            basis: vec![p.coords],
        }
    }

    /// Projective dimension: -1 for empty, 0 for a point, ...
    pub fn pdim(&self) -> isize {
        self.basis.len() as isize - 1
    }

    pub fn is_point(&self) -> bool {
        self.basis.len() == 1
    }

    pub fn as_point(&self, ctx: &FieldCtx) -> Option<ProjPoint> {
        if self.is_point() {
            ProjPoint::normalize(ctx, &self.basis[0])
        } else {
            None
        }
    }

    pub fn contains_vec(&self, ctx: &FieldCtx, v: &Vec5) -> bool {
        let mut r = *v;
        for row in &self.basis {
            let lead = row.iter().position(|c| !c.is_zero()).unwrap();
            if !r[lead].is_zero() {
                let f = r[lead];
                for k in 0..EXT {
                    r[k] = ctx.sub(r[k], ctx.mul(f, row[k]));
                }
            }
        }
        r.iter().all(|c| c.is_zero())
    }

    pub fn contains_point(&self, ctx: &FieldCtx, p: &ProjPoint) -> bool {
        self.contains_vec(ctx, &p.coords)
    }

    pub fn span_with(&self, ctx: &FieldCtx, other: &ProjSubspace) -> ProjSubspace {
        let mut rows = self.basis.clone();
        rows.extend_from_slice(&other.basis);
        ProjSubspace::from_rows(ctx, &rows)
    }

    /// Zassenhaus intersection.
    pub fn meet(&self, ctx: &FieldCtx, other: &ProjSubspace) -> ProjSubspace {
        let mut rows: Vec<Vec<FFElement>> = Vec::new();
        for r in &self.basis {
            let mut row: Vec<FFElement> = r.to_vec();
            row.extend_from_slice(r);
            rows.push(row);
        }
        for r in &other.basis {
            let mut row: Vec<FFElement> = r.to_vec();
            row.extend(std::iter::repeat_n(FFElement::ZERO, EXT));
            rows.push(row);
        }
        ctx.row_reduce(&mut rows);
        let meet_rows: Vec<Vec5> = rows
            .iter()
            .filter(|r| r[..EXT].iter().all(|c| c.is_zero()))
            .map(|r| {
                let mut v = ZERO_VEC5;
                v.copy_from_slice(&r[EXT..]);
                v
            })
            .collect();
        ProjSubspace::from_rows(ctx, &meet_rows)
    }

    pub fn fmt(&self, ctx: &FieldCtx) -> String {
        let rows: Vec<String> = self
            .basis
            .iter()
            .map(|r| {
                let parts: Vec<String> = r.iter().map(|&c| ctx.fmt_elt(c)).collect();
                format!("[{}]", parts.join(","))
            })
            .collect();
        format!("{{{}}}", rows.join(";"))
    }

    pub fn parse(ctx: &FieldCtx, text: &str) -> Result<ProjSubspace, ProjError> {
        let t = text.trim().trim_start_matches('{').trim_end_matches('}');
        let mut rows = Vec::new();
        for row_s in t.split(';') {
            let row_s = row_s.trim().trim_start_matches('[').trim_end_matches(']');
            let parts: Vec<&str> = row_s.split(',').collect();
            if parts.len() != EXT {
                return Err(ProjError::BadDimension);
            }
            let mut v = ZERO_VEC5;
            for (i, p) in parts.iter().enumerate() {
                v[i] = ctx
                    .parse_elt(p)
                    .map_err(|e| ProjError::BadModel(e.to_string()))?;
            }
            rows.push(v);
        }
        Ok(ProjSubspace::from_rows(ctx, &rows))
    }
}

/// Span, meet and the Grassmann data of a subspace pair.
pub struct SpanMeet {
    pub span: ProjSubspace,
    pub meet: ProjSubspace,
}

pub fn span_meet(ctx: &FieldCtx, s: &ProjSubspace, t: &ProjSubspace) -> SpanMeet {
    SpanMeet {
        span: s.span_with(ctx, t),
        meet: s.meet(ctx, t),
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum ModelKind {
    /// Σ = points with F_q-rational coordinates; σ is coordinatewise x -> x^{q^s}.
    Rational,
    /// Σ = {[u, u^q, u^{q^2}, u^{q^3}, u^{q^4}]}; σ is the s-th power of the
    /// shift-Frobenius [x0,...,x4] -> [x4^q, x0^q, x1^q, x2^q, x3^q].
    Moore,
    /// σ: X -> M X^{(q^s)} for an arbitrary matrix with σ^5 = id.
    Custom,
}

/// A model of the canonical subgeometry Σ together with a chosen generator σ
/// of its pointwise stabilizer, acting on vectors as `X -> mats[1] · X^{(q^s)}`.
#[derive(Clone)]
pub struct SubgeometryModel {
    pub kind: ModelKind,
    pub s: usize,
    mats: [Mat5; 6],
    fixed_basis: [Vec5; EXT],
}

fn identity_mat(ctx: &FieldCtx) -> Mat5 {
    let mut m = [ZERO_VEC5; EXT];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ctx.one();
    }
    m
}

fn mat_frob(ctx: &FieldCtx, m: &Mat5, i: usize) -> Mat5 {
    let mut out = [ZERO_VEC5; EXT];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = ctx.frob(m[r][c], i);
        }
    }
    out
}

impl SubgeometryModel {
    pub fn rational(ctx: &FieldCtx, s: usize) -> SubgeometryModel {
        assert!(!s.is_multiple_of(EXT), "gcd(s,5)=1 required");
        let id = identity_mat(ctx);
        let fixed_basis: [Vec5; EXT] = core::array::from_fn(|i| {
            let mut v = ZERO_VEC5;
            v[i] = ctx.one();
            v
        });
        SubgeometryModel {
            kind: ModelKind::Rational,
            s: s % EXT,
            mats: [id; 6],
            fixed_basis,
        }
    }

    pub fn moore(ctx: &FieldCtx, s: usize) -> SubgeometryModel {
        assert!(!s.is_multiple_of(EXT), "gcd(s,5)=1 required");
        let s = s % EXT;
        let mut shift = [ZERO_VEC5; EXT];
        shift[0][EXT - 1] = ctx.one();
        for i in 1..EXT {
            shift[i][i - 1] = ctx.one();
        }
        let mut mats = [identity_mat(ctx); 6];
        for (i, mat) in mats.iter_mut().enumerate() {
            // σ^i = shift^{s·i} ∘ (q^{s·i})-power
            let mut m = identity_mat(ctx);
            for _ in 0..(s * i) % EXT {
                m = ctx.mat5_mul(&shift, &m);
            }
            *mat = m;
        }
        // the normal basis of γ gives five independent fixed vectors
        let gamma = ctx.gamma();
        let fixed_basis: [Vec5; EXT] =
            core::array::from_fn(|k| core::array::from_fn(|i| ctx.frob(gamma, k + i)));
        SubgeometryModel {
            kind: ModelKind::Moore,
            s,
            mats,
            fixed_basis,
        }
    }

    /// Custom semilinear generator X -> m X^{(q^s)}. The matrix is rescaled so
    /// that σ^5 = id exactly; errors out when that is impossible or the fixed
    /// space does not span a PG(4,q).
    pub fn custom(ctx: &FieldCtx, m: &Mat5, s: usize) -> Result<SubgeometryModel, ProjError> {
        if s.is_multiple_of(EXT) {
            return Err(ProjError::BadModel("s must be coprime to 5".into()));
        }
        let s = s % EXT;
        let mut m1 = *m;
        let pow5 = |m1: &Mat5| {
            let mut acc = *m1;
            for _ in 1..EXT {
                acc = ctx.mat5_mul(m1, &mat_frob(ctx, &acc, s));
            }
            acc
        };
        let m5 = pow5(&m1);
        let c = m5[0][0];
        if c.is_zero() {
            return Err(ProjError::BadModel("singular generator".into()));
        }
        for (i, row) in m5.iter().enumerate() {
            for (j, &cell) in row.iter().enumerate() {
                let expect = if i == j { c } else { FFElement::ZERO };
                if cell != expect {
                    return Err(ProjError::BadModel("σ^5 is not scalar".into()));
                }
            }
        }
        if c != ctx.one() {
            // rescale by d with N(d) = c^{-1}
            let cinv = ctx.inv(c);
            if !ctx.in_fq(cinv) {
                return Err(ProjError::BadModel("σ^5 scalar outside F_q".into()));
            }
            let d = ctx.norm_fiber(cinv).next().unwrap();
            for row in m1.iter_mut() {
                for cell in row.iter_mut() {
                    *cell = ctx.mul(d, *cell);
                }
            }
        }
        let mut mats = [identity_mat(ctx); 6];
        mats[1] = m1;
        for i in 2..6 {
            mats[i] = ctx.mat5_mul(&m1, &mat_frob(ctx, &mats[i - 1], s));
        }
        if mats[5] != identity_mat(ctx) {
            return Err(ProjError::BadModel("σ^5 != id after rescale".into()));
        }
        let fixed = fixed_space(ctx, &m1, s)?;
        Ok(SubgeometryModel {
            kind: ModelKind::Custom,
            s,
            mats,
            fixed_basis: fixed,
        })
    }

    /// σ^i on vectors.
    pub fn apply_vec(&self, ctx: &FieldCtx, v: &Vec5, i: usize) -> Vec5 {
        let i = i % EXT;
        if i == 0 {
            return *v;
        }
        let tw: Vec5 = core::array::from_fn(|k| ctx.frob(v[k], (self.s * i) % EXT));
        ctx.mat5_apply(&self.mats[i], &tw)
    }

    pub fn apply_point(&self, ctx: &FieldCtx, p: &ProjPoint, i: usize) -> ProjPoint {
        ProjPoint::normalize(ctx, &self.apply_vec(ctx, &p.coords, i)).unwrap()
    }

    pub fn apply_subspace(&self, ctx: &FieldCtx, s: &ProjSubspace, i: usize) -> ProjSubspace {
        let rows: Vec<Vec5> = s.basis.iter().map(|r| self.apply_vec(ctx, r, i)).collect();
        ProjSubspace::from_rows(ctx, &rows)
    }

    /// Basis of the F_q-space of σ-fixed vectors (lifts of Σ).
    pub fn fixed_basis(&self) -> &[Vec5; EXT] {
        &self.fixed_basis
    }

    /// Is the point in Σ (σ-fixed projectively)?
    pub fn in_sigma(&self, ctx: &FieldCtx, p: &ProjPoint) -> bool {
        self.apply_point(ctx, p, 1) == *p
    }

    /// Deterministic enumeration of the (q^5-1)/(q-1) points of Σ, as σ-fixed
    /// vectors (one per point).
    pub fn sigma_vectors(&self, ctx: &FieldCtx) -> Vec<Vec5> {
        let fq: Vec<FFElement> = ctx.fq_elements();
        let q = ctx.q() as u64;
        let mut out = Vec::with_capacity(ctx.coset_count() as usize);
        for k in 0..EXT {
            let tail = EXT - 1 - k;
            let count = q.pow(tail as u32);
            for idx in 0..count {
                let mut v = self.fixed_basis[k];
                let mut rem = idx;
                for t in 0..tail {
                    let digit = (rem % q) as usize;
                    rem /= q;
                    let c = fq[digit];
                    if !c.is_zero() {
                        for i in 0..EXT {
                            v[i] = ctx.add(v[i], ctx.mul(c, self.fixed_basis[k + 1 + t][i]));
                        }
                    }
                }
                out.push(v);
            }
        }
        out
    }
}

/// Solve M X^{(q^s)} = X over F_q (25 unknowns: normal-basis coordinates of
/// the five vector components); returns a basis when the solution space has
/// F_q-dimension exactly five.
fn fixed_space(ctx: &FieldCtx, m: &Mat5, s: usize) -> Result<[Vec5; EXT], ProjError> {
    let nn = EXT * EXT;
    let mut rows: Vec<Vec<FFElement>> = vec![vec![FFElement::ZERO; nn]; nn];
    for i in 0..EXT {
        for j in 0..EXT {
            if m[i][j].is_zero() {
                continue;
            }
            for k in 0..EXT {
                // x_{jk} contributes m[i][j] * γ^{q^{k+s}} to component i
                let val = ctx.mul(m[i][j], ctx.frob(ctx.gamma(), (k + s) % EXT));
                let co = ctx.fq_coords(val);
                for (l, &c) in co.iter().enumerate() {
                    rows[i * EXT + l][j * EXT + k] = ctx.add(rows[i * EXT + l][j * EXT + k], c);
                }
            }
        }
    }
    for d in 0..nn {
        rows[d][d] = ctx.sub(rows[d][d], ctx.one());
    }
    let (rank, pivots) = ctx.row_reduce(&mut rows);
    if nn - rank != EXT {
        return Err(ProjError::BadModel(format!(
            "fixed space has F_q-dimension {}, want 5",
            nn - rank
        )));
    }
    let mut basis = [ZERO_VEC5; EXT];
    let mut bi = 0;
    for free in 0..nn {
        if pivots.contains(&free) {
            continue;
        }
        let mut coords = vec![FFElement::ZERO; nn];
        coords[free] = ctx.one();
        for (r, &pc) in pivots.iter().enumerate() {
            coords[pc] = ctx.neg(rows[r][free]);
        }
        for j in 0..EXT {
            let mut acc = FFElement::ZERO;
            for k in 0..EXT {
                acc = ctx.add(acc, ctx.mul(coords[j * EXT + k], ctx.frob(ctx.gamma(), k)));
            }
            basis[bi][j] = acc;
        }
        bi += 1;
    }
    Ok(basis)
}

/// Rank of a point with respect to Σ: 1 + dim of the span of its σ-orbit.
pub fn point_rank(ctx: &FieldCtx, model: &SubgeometryModel, p: &ProjPoint) -> usize {
    let mut rows: Vec<Vec<FFElement>> = Vec::with_capacity(EXT);
    for i in 0..EXT {
        rows.push(model.apply_vec(ctx, &p.coords, i).to_vec());
    }
    ctx.row_reduce(&mut rows).0
}

/// Γ_{f0} = <[0,-a4,0,0,1], [0,-a3,0,1,0], [0,-a2,1,0,0]> in the Moore model;
/// projecting Σ from it onto the line of the first two base points reproduces
/// L_{f0} with f0 = x^q + a2 x^{q^2} + a3 x^{q^3} + a4 x^{q^4}.
pub fn gamma_from_poly(
    ctx: &FieldCtx,
    a2: FFElement,
    a3: FFElement,
    a4: FFElement,
) -> ProjSubspace {
    let z = FFElement::ZERO;
    let one = ctx.one();
    let rows = [
        [z, ctx.neg(a4), z, z, one],
        [z, ctx.neg(a3), z, one, z],
        [z, ctx.neg(a2), one, z, z],
    ];
    ProjSubspace::from_rows(ctx, &rows)
}

pub fn f0_poly(ctx: &FieldCtx, a2: FFElement, a3: FFElement, a4: FFElement) -> LinearizedPoly {
    let mut coeffs = ZERO_VEC5;
    coeffs[1] = ctx.one();
    coeffs[2] = a2;
    coeffs[3] = a3;
    coeffs[4] = a4;
    LinearizedPoly::new(coeffs)
}

/// Geometric projection of a single point from a plane onto a line:
/// <Γ, P> ∩ Λ (requires Γ ∩ Λ = ∅ and P outside Γ).
pub fn project_from_plane(
    ctx: &FieldCtx,
    gamma: &ProjSubspace,
    line: &ProjSubspace,
    p: &ProjPoint,
) -> Result<ProjPoint, ProjError> {
    if gamma.pdim() != 2 || line.pdim() != 1 {
        return Err(ProjError::BadDimension);
    }
    if gamma.contains_point(ctx, p) {
        return Err(ProjError::VertexContainsPoint);
    }
    debug_assert_eq!(gamma.meet(ctx, line).pdim(), -1);
    let solid = gamma.span_with(ctx, &ProjSubspace::from_point(p));
    let meet = solid.meet(ctx, line);
    meet.as_point(ctx).ok_or(ProjError::BadDimension)
}

/// The projection along Γ onto a complementary coordinate line, realized as
/// two linear forms: v decomposes as (Γ-part) + c0·e_i + c1·e_j and the map
/// returns (c0, c1).
pub struct ProjectionMap {
    pub line: (usize, usize),
    rows: [Vec5; 2],
}

impl ProjectionMap {
    /// Deterministic target: the first coordinate line (e_i, e_j) in
    /// lexicographic order that is complementary to Γ.
    pub fn new(ctx: &FieldCtx, gamma: &ProjSubspace) -> Result<ProjectionMap, ProjError> {
        if gamma.pdim() != 2 {
            return Err(ProjError::BadDimension);
        }
        for i in 0..EXT {
            for j in (i + 1)..EXT {
                // columns: Γ basis, e_i, e_j; invert to read coefficients
                let mut cols = [ZERO_VEC5; EXT];
                for (r, row) in gamma.basis.iter().enumerate() {
                    for c in 0..EXT {
                        cols[c][r] = row[c];
                    }
                }
                cols[i][3] = ctx.one();
                cols[j][4] = ctx.one();
                if let Some(inv) = ctx.invert_mat5(&cols) {
                    return Ok(ProjectionMap {
                        line: (i, j),
                        rows: [inv[3], inv[4]],
                    });
                }
            }
        }
        Err(ProjError::BadDimension)
    }

    #[inline]
    pub fn apply(&self, ctx: &FieldCtx, v: &Vec5) -> (FFElement, FFElement) {
        let mut c0 = FFElement::ZERO;
        let mut c1 = FFElement::ZERO;
        for k in 0..EXT {
            if !v[k].is_zero() {
                c0 = ctx.add(c0, ctx.mul(self.rows[0][k], v[k]));
                c1 = ctx.add(c1, ctx.mul(self.rows[1][k], v[k]));
            }
        }
        (c0, c1)
    }
}

/// Outcome of projecting all of Σ from a plane.
pub enum SigmaProjection {
    /// Weighted point set of the projection, with the target line used.
    Set {
        set: LinearSet,
        line: (usize, usize),
    },
    /// Γ meets Σ in this point: the projection is undefined.
    MeetsSigma(ProjPoint),
}

/// Project every point of Σ from Γ; exact weights.
pub fn project_sigma(
    ctx: &FieldCtx,
    model: &SubgeometryModel,
    gamma: &ProjSubspace,
) -> Result<SigmaProjection, ProjError> {
    let pm = ProjectionMap::new(ctx, gamma)?;
    let mut counts: BTreeMap<Pg1Point, u32> = BTreeMap::new();
    for v in model.sigma_vectors(ctx) {
        let (a, b) = pm.apply(ctx, &v);
        match Pg1Point::normalize(ctx, a, b) {
            Some(p) => *counts.entry(p).or_default() += 1,
            None => {
                let p = ProjPoint::normalize(ctx, &v).unwrap();
                return Ok(SigmaProjection::MeetsSigma(p));
            }
        }
    }
    let q = ctx.q() as u64;
    let mut points = BTreeMap::new();
    let mut weight_sum = 0u64;
    for (p, c) in counts {
        let mut acc = 0u64;
        let mut w = 0u32;
        let mut pw = 1u64;
        while acc < c as u64 {
            acc += pw;
            pw *= q;
            w += 1;
        }
        assert_eq!(acc, c as u64, "projection multiplicity not (q^w-1)/(q-1)");
        points.insert(p, w as u8);
        weight_sum += q.pow(w) - 1;
    }
    assert_eq!(weight_sum, q.pow(EXT as u32) - 1);
    Ok(SigmaProjection::Set {
        set: LinearSet { rank: 5, points },
        line: pm.line,
    })
}

/// Convert a point between the rational and Moore models (same generator
/// exponent) via the Moore-matrix projectivity of γ.
pub fn model_convert(
    ctx: &FieldCtx,
    from: &SubgeometryModel,
    to: &SubgeometryModel,
    p: &ProjPoint,
) -> Result<ProjPoint, ProjError> {
    if from.s != to.s {
        return Err(ProjError::BadModel("generator exponents differ".into()));
    }
    let v = match (from.kind, to.kind) {
        (ModelKind::Rational, ModelKind::Moore) => ctx.mat5_apply(ctx.moore(), &p.coords),
        (ModelKind::Moore, ModelKind::Rational) => ctx.mat5_apply(ctx.moore_inv(), &p.coords),
        (a, b) if a == b => p.coords,
        _ => return Err(ProjError::BadModel("unsupported conversion".into())),
    };
    ProjPoint::normalize(ctx, &v).ok_or(ProjError::BadDimension)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linpoly::LinearSet;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn ctx(p: u32, h: u32) -> Arc<FieldCtx> {
        FieldCtx::shared(p, h).unwrap()
    }

    fn rand_subspace(f: &FieldCtx, rng: &mut impl Rng, k: usize) -> ProjSubspace {
        loop {
            let rows: Vec<Vec5> = (0..k)
                .map(|_| core::array::from_fn(|_| f.rand_elt(rng)))
                .collect();
            let s = ProjSubspace::from_rows(f, &rows);
            if s.pdim() >= 0 {
                return s;
            }
        }
    }

    #[test]
    fn span_meet_grassmann() {
        for &(p, h) in &[(2u32, 1u32), (3, 1)] {
            let f = ctx(p, h);
            let mut rng = ChaCha8Rng::seed_from_u64(20);
            for _ in 0..1000 {
                let ka = rng.random_range(1..=4);
                let kb = rng.random_range(1..=4);
                let a = rand_subspace(&f, &mut rng, ka);
                let b = rand_subspace(&f, &mut rng, kb);
                let sm = span_meet(&f, &a, &b);
                assert_eq!(
                    sm.span.pdim() + sm.meet.pdim(),
                    a.pdim() + b.pdim(),
                    "Grassmann identity"
                );
                assert_eq!(ProjSubspace::from_rows(&f, &sm.span.basis), sm.span);
            }
        }
    }

    #[test]
    fn span_meet_examples() {
        let f = ctx(2, 1);
        let z = FFElement::ZERO;
        let p1 = ProjSubspace::from_rows(&f, &[[f.one(), z, z, z, z]]);
        let p2 = ProjSubspace::from_rows(&f, &[[z, f.one(), z, z, z]]);
        let sm = span_meet(&f, &p1, &p2);
        assert_eq!(sm.span.pdim(), 1);
        assert_eq!(sm.meet.pdim(), -1);
        let sm = span_meet(&f, &p1, &p1);
        assert_eq!(sm.span, p1);
        assert_eq!(sm.meet, p1);
    }

    #[test]
    fn sigma_fixes_subgeometry() {
        let f = ctx(3, 1);
        for s in [1usize, 2, 3, 4] {
            let rat = SubgeometryModel::rational(&f, s);
            let moo = SubgeometryModel::moore(&f, s);
            for model in [&rat, &moo] {
                for v in model.sigma_vectors(&f).iter().take(30) {
                    let p = ProjPoint::normalize(&f, v).unwrap();
                    assert!(model.in_sigma(&f, &p));
                    for i in 0..5 {
                        assert_eq!(model.apply_point(&f, &p, i), p);
                    }
                }
                assert_eq!(model.sigma_vectors(&f).len(), f.coset_count() as usize);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            for _ in 0..20 {
                let v: Vec5 = core::array::from_fn(|_| f.rand_elt(&mut rng));
                let Some(p) = ProjPoint::normalize(&f, &v) else {
                    continue;
                };
                assert_eq!(rat.apply_point(&f, &p, 5), p);
                let around = moo.apply_point(&f, &moo.apply_point(&f, &p, 2), 3);
                assert_eq!(around, p);
            }
        }
    }

    #[test]
    fn point_rank_examples() {
        let f = ctx(3, 1);
        let rat = SubgeometryModel::rational(&f, 1);
        let moo = SubgeometryModel::moore(&f, 1);
        let z = FFElement::ZERO;
        let e0 = ProjPoint::normalize(&f, &[f.one(), z, z, z, z]).unwrap();
        assert_eq!(point_rank(&f, &rat, &e0), 1);
        let omega = f.generator();
        assert!(!f.in_fq(omega));
        let p = ProjPoint::normalize(&f, &[omega, f.one(), z, z, z]).unwrap();
        assert_eq!(point_rank(&f, &rat, &p), 2);
        // Moore-model base point e1: the orbit is the five base points
        let e1 = ProjPoint::normalize(&f, &[z, f.one(), z, z, z]).unwrap();
        assert_eq!(point_rank(&f, &moo, &e1), 5);
        for s in [2usize, 3, 4] {
            let m2 = SubgeometryModel::moore(&f, s);
            assert_eq!(point_rank(&f, &m2, &e1), 5);
        }
    }

    #[test]
    fn gamma_f0_projection_matches_polynomial() {
        let f = ctx(3, 1);
        let moo = SubgeometryModel::moore(&f, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for trial in 0..100 {
            let (a2, a3, a4) = if trial == 0 {
                (FFElement::ZERO, FFElement::ZERO, FFElement::ZERO)
            } else {
                (
                    f.rand_elt(&mut rng),
                    f.rand_elt(&mut rng),
                    f.rand_elt(&mut rng),
                )
            };
            let gamma = gamma_from_poly(&f, a2, a3, a4);
            assert_eq!(gamma.pdim(), 2);
            let f0 = f0_poly(&f, a2, a3, a4);
            match project_sigma(&f, &moo, &gamma).unwrap() {
                SigmaProjection::Set { set, line } => {
                    assert_eq!(line, (0, 1));
                    assert_eq!(set, LinearSet::of_poly(&f, &f0));
                }
                SigmaProjection::MeetsSigma(_) => panic!("Γ_f0 never meets Σ"),
            }
        }
    }

    #[test]
    fn project_point_basics() {
        let f = ctx(2, 1);
        let z = FFElement::ZERO;
        let gamma = gamma_from_poly(&f, z, z, z);
        let line = ProjSubspace::from_rows(
            &f,
            &[[f.one(), z, z, z, z], [z, f.one(), z, z, z]],
        );
        // P already on the line projects to itself
        let p = ProjPoint::normalize(&f, &[f.one(), f.generator(), z, z, z]).unwrap();
        assert_eq!(project_from_plane(&f, &gamma, &line, &p).unwrap(), p);
        // a vertex point is rejected
        let vert = ProjPoint::normalize(&f, &gamma.basis[0]).unwrap();
        assert!(matches!(
            project_from_plane(&f, &gamma, &line, &vert),
            Err(ProjError::VertexContainsPoint)
        ));
        // <Γ,P> is a solid meeting the line in exactly one point
        let moo = SubgeometryModel::moore(&f, 1);
        for v in moo.sigma_vectors(&f).iter().take(10) {
            let p = ProjPoint::normalize(&f, v).unwrap();
            let solid = gamma.span_with(&f, &ProjSubspace::from_point(&p));
            assert_eq!(solid.pdim(), 3);
            assert_eq!(solid.meet(&f, &line).pdim(), 0);
        }
    }

    #[test]
    fn injectivity_iff_min_rank_three() {
        // exhaustive points of Γ at q=2 for several planes
        let f = ctx(2, 1);
        let moo = SubgeometryModel::moore(&f, 1);
        let z = FFElement::ZERO;
        let cases = [
            (z, z, z), // pseudoregulus
            (f.one(), z, z),
            (z, f.generator(), z),
            (f.generator(), f.one(), f.generator()),
        ];
        for (a2, a3, a4) in cases {
            let gamma = gamma_from_poly(&f, a2, a3, a4);
            let injective = match project_sigma(&f, &moo, &gamma).unwrap() {
                SigmaProjection::Set { set, .. } => set.size() == f.coset_count() as usize,
                SigmaProjection::MeetsSigma(_) => false,
            };
            // all q^10 + q^5 + 1 points of the plane
            let b = &gamma.basis;
            let mut pts: Vec<Vec5> = Vec::new();
            let all: Vec<FFElement> = f.all_nonzero().chain([FFElement::ZERO]).collect();
            for &v in &all {
                for &w in &all {
                    let mut row = ZERO_VEC5;
                    for i in 0..EXT {
                        row[i] = f.add(b[0][i], f.add(f.mul(v, b[1][i]), f.mul(w, b[2][i])));
                    }
                    pts.push(row);
                }
            }
            for &v in &all {
                let mut row = ZERO_VEC5;
                for i in 0..EXT {
                    row[i] = f.add(b[1][i], f.mul(v, b[2][i]));
                }
                pts.push(row);
            }
            pts.push(b[2]);
            assert_eq!(pts.len(), 1024 + 32 + 1);
            let mut min_rank = 5;
            for v in pts {
                let p = ProjPoint::normalize(&f, &v).unwrap();
                min_rank = min_rank.min(point_rank(&f, &moo, &p));
            }
            assert_eq!(
                injective,
                min_rank >= 3,
                "projection injective iff every vertex point has rank > 2"
            );
        }
    }

    #[test]
    fn model_conversion() {
        let f = ctx(3, 1);
        for s in [1usize, 2] {
            let rat = SubgeometryModel::rational(&f, s);
            let moo = SubgeometryModel::moore(&f, s);
            for v in rat.sigma_vectors(&f).iter().take(20) {
                let p = ProjPoint::normalize(&f, v).unwrap();
                let m = model_convert(&f, &rat, &moo, &p).unwrap();
                assert!(moo.in_sigma(&f, &m));
                assert_eq!(model_convert(&f, &moo, &rat, &m).unwrap(), p);
            }
            // σ-equivariance on random points
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            for _ in 0..100 {
                let v: Vec5 = core::array::from_fn(|_| f.rand_elt(&mut rng));
                let Some(p) = ProjPoint::normalize(&f, &v) else {
                    continue;
                };
                let lhs = model_convert(&f, &rat, &moo, &rat.apply_point(&f, &p, 1)).unwrap();
                let rhs = moo.apply_point(&f, &model_convert(&f, &rat, &moo, &p).unwrap(), 1);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn custom_model_matches_moore() {
        let f = ctx(3, 1);
        let moo = SubgeometryModel::moore(&f, 1);
        let mut shift = [ZERO_VEC5; EXT];
        shift[0][4] = f.one();
        for i in 1..EXT {
            shift[i][i - 1] = f.one();
        }
        let custom = SubgeometryModel::custom(&f, &shift, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let v: Vec5 = core::array::from_fn(|_| f.rand_elt(&mut rng));
            let Some(p) = ProjPoint::normalize(&f, &v) else {
                continue;
            };
            assert_eq!(custom.apply_point(&f, &p, 1), moo.apply_point(&f, &p, 1));
        }
        let mut cs: Vec<ProjPoint> = custom
            .sigma_vectors(&f)
            .iter()
            .map(|v| ProjPoint::normalize(&f, v).unwrap())
            .collect();
        let mut ms: Vec<ProjPoint> = moo
            .sigma_vectors(&f)
            .iter()
            .map(|v| ProjPoint::normalize(&f, v).unwrap())
            .collect();
        cs.sort();
        ms.sort();
        assert_eq!(cs, ms);
    }

    #[test]
    fn subspace_parse_round_trip() {
        let f = ctx(2, 1);
        let gamma = gamma_from_poly(&f, f.generator(), f.one(), FFElement::ZERO);
        let s = gamma.fmt(&f);
        assert_eq!(ProjSubspace::parse(&f, &s).unwrap(), gamma);
    }
}
