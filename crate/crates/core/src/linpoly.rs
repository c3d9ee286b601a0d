//! F_q-linearized polynomials over F_{q^5}, the scatteredness oracle, and
//! linear sets of PG(1,q^5) with exact point weights.

use crate::gfield::{FFElement, FieldCtx, Mat5, Vec5, EXT, ZERO_VEC5};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinPolyError {
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("both maps of the pair are zero")]
    ZeroPair,
    #[error("cannot parse polynomial term {0:?}")]
    Parse(String),
}

/// `f(x) = sum_i coeffs[i] * x^{q^i}`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub struct LinearizedPoly {
    pub coeffs: Vec5,
}

impl LinearizedPoly {
    pub fn new(coeffs: Vec5) -> Self {
        LinearizedPoly { coeffs }
    }

    pub fn zero() -> Self {
        LinearizedPoly { coeffs: ZERO_VEC5 }
    }

    /// c * x^{q^i}
    pub fn monomial(i: usize, c: FFElement) -> Self {
        let mut coeffs = ZERO_VEC5;
        coeffs[i % EXT] = c;
        LinearizedPoly { coeffs }
    }

    /// x^{q^s}
    pub fn frob_power(ctx: &FieldCtx, s: usize) -> Self {
        Self::monomial(s, ctx.one())
    }

    /// The relative trace as a linearized polynomial.
    pub fn trace_poly(ctx: &FieldCtx) -> Self {
        LinearizedPoly {
            coeffs: [ctx.one(); EXT],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, ctx: &FieldCtx, other: &Self) -> Self {
        let mut coeffs = ZERO_VEC5;
        for i in 0..EXT {
            coeffs[i] = ctx.add(self.coeffs[i], other.coeffs[i]);
        }
        LinearizedPoly { coeffs }
    }

    pub fn scale(&self, ctx: &FieldCtx, c: FFElement) -> Self {
        let mut coeffs = ZERO_VEC5;
        for i in 0..EXT {
            coeffs[i] = ctx.mul(c, self.coeffs[i]);
        }
        LinearizedPoly { coeffs }
    }

    pub fn eval(&self, ctx: &FieldCtx, x: FFElement) -> FFElement {
        let mut acc = FFElement::ZERO;
        for (i, &a) in self.coeffs.iter().enumerate() {
            if !a.is_zero() {
                acc = ctx.add(acc, ctx.mul(a, ctx.frob(x, i)));
            }
        }
        acc
    }

    /// Composition f∘g reduced mod x^{q^5} - x: c_k = sum_{i+j=k (5)} a_i b_j^{q^i}.
    pub fn compose(&self, ctx: &FieldCtx, g: &Self) -> Self {
        let mut coeffs = ZERO_VEC5;
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in g.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let k = (i + j) % EXT;
                coeffs[k] = ctx.add(coeffs[k], ctx.mul(a, ctx.frob(b, i)));
            }
        }
        LinearizedPoly { coeffs }
    }

    /// Adjoint polynomial: the coefficient of x^{q^j} is a_{5-j}^{q^j}.
    /// It defines the same linear set (L_f = L_{f^}).
    pub fn adjoint(&self, ctx: &FieldCtx) -> Self {
        let mut coeffs = ZERO_VEC5;
        for (j, cj) in coeffs.iter_mut().enumerate() {
            let src = (EXT - j) % EXT;
            *cj = ctx.frob(self.coeffs[src], j);
        }
        LinearizedPoly { coeffs }
    }

    /// Dickson matrix `D[i][j] = a_{(j-i) mod 5}^{q^i}`.
    pub fn dickson(&self, ctx: &FieldCtx) -> Mat5 {
        let mut m = [ZERO_VEC5; EXT];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let src = (j + EXT - i) % EXT;
                *cell = ctx.frob(self.coeffs[src], i);
            }
        }
        m
    }

    /// Rank of the Dickson matrix over F_{q^5}; equals 5 - dim_{F_q} ker f.
    pub fn dickson_rank(&self, ctx: &FieldCtx) -> usize {
        ctx.mat5_rank(&self.dickson(ctx))
    }

    /// F_q-basis of ker f and rank, via the field's normal-basis solver.
    pub fn kernel(&self, ctx: &FieldCtx) -> (Vec<FFElement>, usize) {
        let images: Vec5 = core::array::from_fn(|i| self.eval(ctx, ctx.frob(ctx.gamma(), i)));
        ctx.fq_kernel_from_images(&images)
    }

    /// Inverse map as a linearized polynomial (Dickson matrix inversion);
    /// `None` when f is not bijective.
    pub fn inverse(&self, ctx: &FieldCtx) -> Option<Self> {
        let inv = ctx.invert_mat5(&self.dickson(ctx))?;
        let mut coeffs = ZERO_VEC5;
        coeffs.copy_from_slice(&inv[0]);
        Some(LinearizedPoly { coeffs })
    }

    pub fn fmt(&self, ctx: &FieldCtx) -> String {
        self.coeffs
            .iter()
            .map(|&c| ctx.fmt_elt(c))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Parse "x^q", "x^q2"/"x^q^2", "g^3*x^q4 + x", or a raw coefficient list
/// "g^0,g^2,0,0,g^7" into a linearized polynomial.
pub fn parse_poly(ctx: &FieldCtx, text: &str) -> Result<LinearizedPoly, LinPolyError> {
    let t = text.trim();
    if !t.contains('x') {
        let parts: Vec<&str> = t.split(',').collect();
        if parts.len() != EXT {
            return Err(LinPolyError::Parse(text.to_string()));
        }
        let mut coeffs = ZERO_VEC5;
        for (i, part) in parts.iter().enumerate() {
            coeffs[i] = ctx
                .parse_elt(part)
                .map_err(|_| LinPolyError::Parse(part.to_string()))?;
        }
        return Ok(LinearizedPoly::new(coeffs));
    }
    let mut poly = LinearizedPoly::zero();
    for term in t.split('+') {
        let term = term.trim();
        let (coef_s, var_s) = match term.split_once('*') {
            Some((c, v)) => (Some(c.trim()), v.trim()),
            None => (None, term),
        };
        let coef = match coef_s {
            Some(c) => ctx
                .parse_elt(c)
                .map_err(|_| LinPolyError::Parse(term.to_string()))?,
            None => ctx.one(),
        };
        let i = match var_s {
            "x" => 0usize,
            "x^q" => 1,
            _ => {
                let rest = var_s
                    .strip_prefix("x^q^")
                    .or_else(|| var_s.strip_prefix("x^q"))
                    .ok_or_else(|| LinPolyError::Parse(term.to_string()))?;
                rest.parse::<usize>()
                    .map_err(|_| LinPolyError::Parse(term.to_string()))?
            }
        };
        if i >= EXT {
            return Err(LinPolyError::Parse(term.to_string()));
        }
        poly = poly.add(ctx, &LinearizedPoly::monomial(i, coef));
    }
    Ok(poly)
}

/// Reusable collision workspace for the scatteredness oracle; one per thread.
pub struct ScatterScratch {
    stamp: Vec<u32>,
    val: Vec<u32>,
    gen: u32,
}

impl ScatterScratch {
    pub fn new(ctx: &FieldCtx) -> Self {
        let n = ctx.big_size() as usize + 2;
        ScatterScratch {
            stamp: vec![0; n],
            val: vec![0; n],
            gen: 0,
        }
    }

    #[inline]
    fn begin(&mut self) {
        if self.gen == u32::MAX {
            self.stamp.fill(0);
            self.gen = 0;
        }
        self.gen += 1;
    }

    /// Returns the previously seen coset index for `key`, if any.
    #[inline]
    fn probe(&mut self, key: u32, j: u32) -> Option<u32> {
        let k = key as usize;
        if self.stamp[k] == self.gen {
            Some(self.val[k])
        } else {
            self.stamp[k] = self.gen;
            self.val[k] = j;
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scatteredness {
    Scattered,
    /// Representatives of distinct cosets whose points coincide (for a pair
    /// with nontrivial joint kernel, the witness is the kernel coset repeated);
    /// every negative verdict is independently checkable.
    Witness(FFElement, FFElement),
}

impl Scatteredness {
    pub fn is_scattered(&self) -> bool {
        matches!(self, Scatteredness::Scattered)
    }
}

#[inline]
fn ratio_key(order: u32, v: FFElement, j: u32) -> u32 {
    match v.log() {
        None => order, // ratio 0
        Some(k) => {
            let mut d = k + order - j;
            if d >= order {
                d -= order;
            }
            d
        }
    }
}

struct TermState {
    log: u32,
    step: u32,
}

fn term_states(ctx: &FieldCtx, f: &LinearizedPoly) -> Vec<TermState> {
    let order = ctx.order() as u64;
    f.coeffs
        .iter()
        .enumerate()
        .filter_map(|(i, a)| {
            a.log().map(|k| TermState {
                log: k,
                step: (ctx.qpow(i) % order) as u32,
            })
        })
        .collect()
}

#[inline]
fn eval_terms(ctx: &FieldCtx, terms: &[TermState]) -> FFElement {
    let mut v = FFElement::ZERO;
    for t in terms {
        v = ctx.add(v, FFElement(t.log));
    }
    v
}

#[inline]
fn advance(order: u32, terms: &mut [TermState]) {
    for t in terms {
        t.log += t.step;
        if t.log >= order {
            t.log -= order;
        }
    }
}

/// Scatteredness of f: iterate one representative per F_q*-coset
/// (x = g^j, j < (q^5-1)/(q-1)), hash f(x)/x, early-exit on the first
/// collision across distinct cosets.
pub fn scatter_check(
    ctx: &FieldCtx,
    f: &LinearizedPoly,
    scratch: &mut ScatterScratch,
) -> Result<Scatteredness, LinPolyError> {
    if f.is_zero() {
        return Err(LinPolyError::ZeroPolynomial);
    }
    scratch.begin();
    let order = ctx.order();
    let mut terms = term_states(ctx, f);
    for j in 0..ctx.coset_count() {
        let v = eval_terms(ctx, &terms);
        let key = ratio_key(order, v, j);
        if let Some(prev) = scratch.probe(key, j) {
            return Ok(Scatteredness::Witness(FFElement(prev), FFElement(j)));
        }
        advance(order, &mut terms);
    }
    Ok(Scatteredness::Scattered)
}

/// Scatteredness of the linear set of the pair U = {(g(x), h(x))} as a
/// maximum (rank 5) scattered set. A nontrivial joint kernel is reported as a
/// `Witness(j, j)` with j a kernel coset representative (the rank drops below
/// five, so the set cannot be maximum scattered).
pub fn scatter_check_pair(
    ctx: &FieldCtx,
    g: &LinearizedPoly,
    h: &LinearizedPoly,
    scratch: &mut ScatterScratch,
) -> Result<Scatteredness, LinPolyError> {
    if g.is_zero() && h.is_zero() {
        return Err(LinPolyError::ZeroPair);
    }
    scratch.begin();
    let order = ctx.order();
    let mut gterms = term_states(ctx, g);
    let mut hterms = term_states(ctx, h);
    for j in 0..ctx.coset_count() {
        let vg = eval_terms(ctx, &gterms);
        let vh = eval_terms(ctx, &hterms);
        let key = match (vg.log(), vh.log()) {
            (None, None) => {
                return Ok(Scatteredness::Witness(FFElement(j), FFElement(j)));
            }
            (Some(_), None) => order,     // slope 0
            (None, Some(_)) => order + 1, // infinity
            (Some(kg), Some(kh)) => {
                let mut d = kh + order - kg;
                if d >= order {
                    d -= order;
                }
                d
            }
        };
        if let Some(prev) = scratch.probe(key, j) {
            return Ok(Scatteredness::Witness(FFElement(prev), FFElement(j)));
        }
        advance(order, &mut gterms);
        advance(order, &mut hterms);
    }
    Ok(Scatteredness::Scattered)
}

/// Check a negative witness: f(y)/y = f(z)/z with y/z not in F_q.
pub fn verify_witness(ctx: &FieldCtx, f: &LinearizedPoly, y: FFElement, z: FFElement) -> bool {
    if y.is_zero() || z.is_zero() || ctx.in_fq(ctx.div(y, z)) {
        return false;
    }
    ctx.div(f.eval(ctx, y), y) == ctx.div(f.eval(ctx, z), z)
}

pub fn verify_witness_pair(
    ctx: &FieldCtx,
    g: &LinearizedPoly,
    h: &LinearizedPoly,
    y: FFElement,
    z: FFElement,
) -> bool {
    if y.is_zero() || z.is_zero() {
        return false;
    }
    if y == z {
        // joint-kernel witness: the pair has rank < 5
        return g.eval(ctx, y).is_zero() && h.eval(ctx, y).is_zero();
    }
    if ctx.in_fq(ctx.div(y, z)) {
        return false;
    }
    let py = (g.eval(ctx, y), h.eval(ctx, y));
    let pz = (g.eval(ctx, z), h.eval(ctx, z));
    ctx.sub(ctx.mul(py.0, pz.1), ctx.mul(py.1, pz.0)).is_zero()
}

pub fn is_scattered(ctx: &FieldCtx, f: &LinearizedPoly) -> Result<Scatteredness, LinPolyError> {
    scatter_check(ctx, f, &mut ScatterScratch::new(ctx))
}

/// A point of PG(1,q^5) in normalized coordinates.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Pg1Point {
    /// <(1, m)>
    Affine(FFElement),
    /// <(0, 1)>
    Infinity,
}

impl Pg1Point {
    pub fn normalize(ctx: &FieldCtx, a: FFElement, b: FFElement) -> Option<Pg1Point> {
        if a.is_zero() {
            if b.is_zero() {
                None
            } else {
                Some(Pg1Point::Infinity)
            }
        } else {
            Some(Pg1Point::Affine(ctx.div(b, a)))
        }
    }

    pub fn fmt(&self, ctx: &FieldCtx) -> String {
        match self {
            Pg1Point::Infinity => "inf".to_string(),
            Pg1Point::Affine(m) => ctx.fmt_elt(*m),
        }
    }
}

/// A weighted point set of PG(1,q^5) with its rank.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearSet {
    pub rank: u8,
    pub points: BTreeMap<Pg1Point, u8>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct LinearSetDigest {
    pub size: usize,
    pub weight_histogram: BTreeMap<u8, u32>,
    pub sha256: String,
}

impl LinearSet {
    /// The rank-5 set {<(x, f(x))>} with exact weights.
    pub fn of_poly(ctx: &FieldCtx, f: &LinearizedPoly) -> LinearSet {
        Self::of_pair(ctx, &LinearizedPoly::monomial(0, ctx.one()), f)
    }

    /// The linear set of U = {(g(x), h(x))}; rank 5 - dim ker(g,h).
    pub fn of_pair(ctx: &FieldCtx, g: &LinearizedPoly, h: &LinearizedPoly) -> LinearSet {
        assert!(!(g.is_zero() && h.is_zero()), "zero pair");
        let q = ctx.q() as u64;
        let mut counts: BTreeMap<Pg1Point, u32> = BTreeMap::new();
        let mut kernel_cosets = 0u64;
        for x in ctx.coset_reps() {
            match Pg1Point::normalize(ctx, g.eval(ctx, x), h.eval(ctx, x)) {
                Some(p) => *counts.entry(p).or_default() += 1,
                None => kernel_cosets += 1,
            }
        }
        // kernel dimension k from its coset count (q^k - 1)/(q - 1)
        let k = exact_dim_from_cosets(q, kernel_cosets);
        let rank = 5 - k as u8;
        let mut points = BTreeMap::new();
        let mut weight_sum = 0u64;
        for (p, c) in counts {
            // cosets mapping to a weight-w point: q^k (q^w - 1)/(q - 1)
            let t = c as u64 * (q - 1);
            let qk = q.pow(k);
            assert!(t.is_multiple_of(qk), "inconsistent point multiplicity");
            let w = exact_dim_from_cosets(q, (t / qk) / (q - 1));
            debug_assert_eq!(qk * (q.pow(w) - 1), t);
            points.insert(p, w as u8);
            weight_sum += q.pow(w) - 1;
        }
        assert_eq!(
            weight_sum,
            q.pow(rank as u32) - 1,
            "weight-sum identity violated"
        );
        LinearSet { rank, points }
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    /// Scattered iff every weight is 1 iff size = (q^rank - 1)/(q - 1).
    pub fn is_scattered(&self) -> bool {
        self.points.values().all(|&w| w == 1)
    }

    pub fn weight_histogram(&self) -> BTreeMap<u8, u32> {
        let mut h = BTreeMap::new();
        for &w in self.points.values() {
            *h.entry(w).or_default() += 1;
        }
        h
    }

    /// Image under an invertible 2x2 projectivity (row-major, acting on
    /// column vectors (a, b)).
    pub fn transform(&self, ctx: &FieldCtx, m: &[[FFElement; 2]; 2]) -> LinearSet {
        let det = ctx.sub(ctx.mul(m[0][0], m[1][1]), ctx.mul(m[0][1], m[1][0]));
        assert!(!det.is_zero(), "singular projectivity");
        let mut points = BTreeMap::new();
        for (&p, &w) in &self.points {
            let (a, b) = match p {
                Pg1Point::Infinity => (FFElement::ZERO, ctx.one()),
                Pg1Point::Affine(s) => (ctx.one(), s),
            };
            let a2 = ctx.add(ctx.mul(m[0][0], a), ctx.mul(m[0][1], b));
            let b2 = ctx.add(ctx.mul(m[1][0], a), ctx.mul(m[1][1], b));
            let p2 = Pg1Point::normalize(ctx, a2, b2).expect("projectivity maps points to points");
            let prev = points.insert(p2, w);
            assert!(prev.is_none());
        }
        LinearSet {
            rank: self.rank,
            points,
        }
    }

    pub fn digest(&self, ctx: &FieldCtx) -> LinearSetDigest {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        for (p, w) in &self.points {
            hasher.update(p.fmt(ctx).as_bytes());
            hasher.update([b':', b'0' + *w, b';']);
        }
        let sha = hasher.finalize();
        LinearSetDigest {
            size: self.size(),
            weight_histogram: self.weight_histogram(),
            sha256: hex_string(&sha),
        }
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Given (q^k - 1)/(q - 1), find k; panics when the count is not of that shape.
fn exact_dim_from_cosets(q: u64, cosets: u64) -> u32 {
    let mut acc = 0u64;
    let mut k = 0u32;
    let mut pw = 1u64;
    while acc < cosets {
        acc += pw;
        pw *= q;
        k += 1;
    }
    assert_eq!(acc, cosets, "coset count is not (q^k-1)/(q-1)");
    k
}

/// Joint kernel dimension of the pair map x -> (g(x), h(x)).
pub fn pair_kernel_dim(ctx: &FieldCtx, g: &LinearizedPoly, h: &LinearizedPoly) -> usize {
    // 10x5 matrix over F_q: coordinates of g and h images of the normal basis
    let mut by_cols: Vec<[FFElement; 10]> = vec![[FFElement::ZERO; 10]; EXT];
    for (j, col) in by_cols.iter_mut().enumerate() {
        let b = ctx.frob(ctx.gamma(), j);
        let cg = ctx.fq_coords(g.eval(ctx, b));
        let ch = ctx.fq_coords(h.eval(ctx, b));
        for i in 0..EXT {
            col[i] = cg[i];
            col[i + EXT] = ch[i];
        }
    }
    let mut rows: Vec<Vec<FFElement>> = (0..2 * EXT)
        .map(|i| (0..EXT).map(|j| by_cols[j][i]).collect())
        .collect();
    let (rank, _) = ctx.row_reduce(&mut rows);
    EXT - rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn ctx(p: u32, h: u32) -> Arc<FieldCtx> {
        FieldCtx::shared(p, h).unwrap()
    }

    fn rand_poly(ctx: &FieldCtx, rng: &mut impl Rng) -> LinearizedPoly {
        loop {
            let coeffs: Vec5 = core::array::from_fn(|_| ctx.rand_elt(rng));
            let f = LinearizedPoly::new(coeffs);
            if !f.is_zero() {
                return f;
            }
        }
    }

    #[test]
    fn eval_is_fq_linear() {
        let f = ctx(3, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let p = rand_poly(&f, &mut rng);
            let x = f.rand_elt(&mut rng);
            let y = f.rand_elt(&mut rng);
            assert_eq!(p.eval(&f, f.add(x, y)), f.add(p.eval(&f, x), p.eval(&f, y)));
            for c in f.fq_elements() {
                assert_eq!(p.eval(&f, f.mul(c, x)), f.mul(c, p.eval(&f, x)));
            }
        }
    }

    #[test]
    fn compose_matches_eval() {
        let f = ctx(3, 1);
        let xq = LinearizedPoly::frob_power(&f, 1);
        assert_eq!(xq.compose(&f, &xq), LinearizedPoly::frob_power(&f, 2));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let a = rand_poly(&f, &mut rng);
            let b = rand_poly(&f, &mut rng);
            let c = a.compose(&f, &b);
            let x = f.rand_elt(&mut rng);
            assert_eq!(c.eval(&f, x), a.eval(&f, b.eval(&f, x)));
        }
    }

    #[test]
    fn adjoint_formula_and_involution() {
        let f = ctx(3, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = f.rand_nonzero(&mut rng);
        // f = x^q + a x^{q^4}  ->  f^ = a^q x^q + x^{q^4}
        let p = LinearizedPoly::monomial(1, f.one()).add(&f, &LinearizedPoly::monomial(4, a));
        let adj = p.adjoint(&f);
        let expect = LinearizedPoly::monomial(1, f.frob(a, 1))
            .add(&f, &LinearizedPoly::monomial(4, f.one()));
        assert_eq!(adj, expect);
        for _ in 0..30 {
            let p = rand_poly(&f, &mut rng);
            assert_eq!(p.adjoint(&f).adjoint(&f), p);
        }
    }

    #[test]
    fn adjoint_preserves_linear_set() {
        let f = ctx(3, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let p = rand_poly(&f, &mut rng);
            let l1 = LinearSet::of_poly(&f, &p);
            let l2 = LinearSet::of_poly(&f, &p.adjoint(&f));
            assert_eq!(l1, l2);
        }
    }

    #[test]
    fn dickson_rank_examples() {
        for &(p, h) in &[(2, 1), (3, 1), (5, 1)] {
            let f = ctx(p, h);
            let id = LinearizedPoly::monomial(0, f.one());
            assert_eq!(id.dickson_rank(&f), 5);
            let fr = LinearizedPoly::monomial(1, f.one())
                .add(&f, &LinearizedPoly::monomial(0, f.minus_one()));
            assert_eq!(fr.dickson_rank(&f), 4);
            assert_eq!(LinearizedPoly::trace_poly(&f).dickson_rank(&f), 1);
        }
    }

    #[test]
    fn dickson_is_multiplicative() {
        let f = ctx(3, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = rand_poly(&f, &mut rng);
            let b = rand_poly(&f, &mut rng);
            let lhs = a.compose(&f, &b).dickson(&f);
            let rhs = f.mat5_mul(&a.dickson(&f), &b.dickson(&f));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn dickson_rank_vs_kernel_random() {
        for &(p, h) in &[(3, 1), (2, 2), (5, 1)] {
            let f = ctx(p, h);
            let mut rng = ChaCha8Rng::seed_from_u64(6);
            for _ in 0..200 {
                let poly = rand_poly(&f, &mut rng);
                let (ker, _) = poly.kernel(&f);
                assert_eq!(poly.dickson_rank(&f) + ker.len(), 5);
                for k in ker {
                    assert!(poly.eval(&f, k).is_zero());
                }
            }
        }
    }

    #[test]
    fn inverse_poly_round_trip() {
        let f = ctx(3, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut found = 0;
        while found < 10 {
            let p = rand_poly(&f, &mut rng);
            let Some(pinv) = p.inverse(&f) else { continue };
            found += 1;
            let x = f.rand_elt(&mut rng);
            assert_eq!(pinv.eval(&f, p.eval(&f, x)), x);
        }
    }

    #[test]
    fn linear_set_examples() {
        let f = ctx(2, 1);
        let l = LinearSet::of_poly(&f, &LinearizedPoly::frob_power(&f, 1));
        assert_eq!(l.size(), 31);
        assert!(l.is_scattered());
        let l = LinearSet::of_poly(&f, &LinearizedPoly::zero());
        assert_eq!(l.size(), 1);
        assert_eq!(l.points.get(&Pg1Point::Affine(FFElement::ZERO)), Some(&5));
        let l = LinearSet::of_poly(&f, &LinearizedPoly::monomial(0, f.one()));
        assert_eq!(l.points.get(&Pg1Point::Affine(f.one())), Some(&5));
        let l = LinearSet::of_pair(
            &f,
            &LinearizedPoly::monomial(0, f.one()),
            &LinearizedPoly::frob_power(&f, 1),
        );
        assert_eq!(l.size(), 31);
        assert_eq!(l.rank, 5);
        let g = LinearizedPoly::monomial(0, f.one());
        let l = LinearSet::of_pair(&f, &g, &g);
        assert_eq!((l.size(), l.rank), (1, 5));
    }

    #[test]
    fn scatter_examples_small_q() {
        for &(p, h) in &[(2u32, 1u32), (3, 1)] {
            let f = ctx(p, h);
            let mut scratch = ScatterScratch::new(&f);
            for s in [1usize, 2, 3, 4] {
                let res =
                    scatter_check(&f, &LinearizedPoly::frob_power(&f, s), &mut scratch).unwrap();
                assert!(res.is_scattered(), "x^(q^{s}) must be scattered");
            }
            // g_b = x^{q^2} + b x^{q^4} is never scattered
            for b in f.all_nonzero() {
                let g =
                    LinearizedPoly::monomial(2, f.one()).add(&f, &LinearizedPoly::monomial(4, b));
                match scatter_check(&f, &g, &mut scratch).unwrap() {
                    Scatteredness::Scattered => panic!("g_b scattered at q={}", f.q()),
                    Scatteredness::Witness(y, z) => {
                        assert!(verify_witness(&f, &g, y, z));
                    }
                }
            }
        }
        // LP binomial x^q + d x^{q^4}: scattered exactly when N(d) != 0, 1 (q=3)
        let f = ctx(3, 1);
        let mut scratch = ScatterScratch::new(&f);
        for d in f.all_nonzero() {
            let n = f.norm(d);
            let lp = LinearizedPoly::monomial(1, f.one()).add(&f, &LinearizedPoly::monomial(4, d));
            let res = scatter_check(&f, &lp, &mut scratch).unwrap();
            assert_eq!(res.is_scattered(), n != f.one(), "LP criterion at q=3");
        }
    }

    #[test]
    fn scatter_matches_set_size() {
        let f = ctx(3, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut scratch = ScatterScratch::new(&f);
        for _ in 0..200 {
            let p = rand_poly(&f, &mut rng);
            let fast = scatter_check(&f, &p, &mut scratch).unwrap().is_scattered();
            let set = LinearSet::of_poly(&f, &p);
            assert_eq!(fast, set.is_scattered());
            assert_eq!(fast, set.size() == f.coset_count() as usize);
        }
    }

    #[test]
    fn pair_scatter_matches_set() {
        let f = ctx(3, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut scratch = ScatterScratch::new(&f);
        for _ in 0..200 {
            let g = rand_poly(&f, &mut rng);
            let h = rand_poly(&f, &mut rng);
            let fast = scatter_check_pair(&f, &g, &h, &mut scratch)
                .unwrap()
                .is_scattered();
            let set = LinearSet::of_pair(&f, &g, &h);
            let k = pair_kernel_dim(&f, &g, &h);
            assert_eq!(set.rank as usize, 5 - k);
            assert_eq!(fast, set.rank == 5 && set.is_scattered());
        }
    }

    #[test]
    fn parse_poly_forms() {
        let f = ctx(2, 1);
        assert_eq!(
            parse_poly(&f, "x^q").unwrap(),
            LinearizedPoly::frob_power(&f, 1)
        );
        assert_eq!(
            parse_poly(&f, "x^q2").unwrap(),
            LinearizedPoly::frob_power(&f, 2)
        );
        assert_eq!(
            parse_poly(&f, "x^q^2").unwrap(),
            LinearizedPoly::frob_power(&f, 2)
        );
        let p = parse_poly(&f, "g^3*x^q4 + x").unwrap();
        assert_eq!(p.coeffs[0], f.one());
        assert_eq!(p.coeffs[4], f.pow_u(f.generator(), 3));
        let q = parse_poly(&f, "g^0,0,0,0,g^3").unwrap();
        assert_eq!(p, q);
        assert!(parse_poly(&f, "x^q7").is_err());
    }

    #[test]
    fn digest_is_stable() {
        let f = ctx(2, 1);
        let l = LinearSet::of_poly(&f, &LinearizedPoly::frob_power(&f, 1));
        let d1 = l.digest(&f);
        let d2 = l.digest(&f);
        assert_eq!(d1, d2);
        assert_eq!(d1.size, 31);
        assert_eq!(d1.weight_histogram.get(&1), Some(&31));
    }
}
