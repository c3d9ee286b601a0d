//! The exhaustive campaigns: the Γ_{f0} plane census, the witness-existence
//! table over (delta, eps, s), the C3/C4 family sweeps, and the (k, delta, s)
//! normal-form census — all with static sharding, in-order merging,
//! checkpoint/resume, and in-run validation of every orbit reduction used.
//!
//! Output determinism contract: the results file depends only on the job
//! parameters and seed (never on shard count, thread count or timing), so
//! reruns and re-sharded runs are byte-identical.

use crate::config::{classify, classify_pair, ConfigClass};
use crate::families::{
    alpha_beta_predicates, fulemma41_solution, sctness_solve, tconj_discriminant,
    verify_sctness_witness, FamilyError, FamilySpec, SctnessOutcome,
};
use crate::gfield::{FFElement, FieldCtx, EXT};
use crate::linpoly::{scatter_check, scatter_check_pair, ScatterScratch};
use crate::projgeom::{f0_poly, gamma_from_poly, SubgeometryModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad job: {0}")]
    BadJob(String),
    #[error("reduction validation failed: {0}")]
    ReductionValidation(String),
    #[error("checkpoint does not match this job")]
    CheckpointMismatch,
    #[error(transparent)]
    Field(#[from] crate::gfield::FieldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Campaign {
    /// all planes Γ_{f0} over (a2, a3, a4)
    Census,
    /// witness table over valid (delta, eps) pairs and s
    TConj,
    /// the C4 sweep plus the two C3 branches
    C3C4,
    /// scatteredness and classification of the (k, delta, s) normal form
    FormaK,
}

impl Campaign {
    pub fn name(&self) -> &'static str {
        match self {
            Campaign::Census => "census",
            Campaign::TConj => "tconj",
            Campaign::C3C4 => "c3c4",
            Campaign::FormaK => "formak",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub campaign: Campaign,
    pub p: u32,
    pub h: u32,
    pub s_set: Vec<usize>,
    pub reduce: bool,
    pub shards: usize,
    pub jobs: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub resume: Option<PathBuf>,
    /// complete at most this many further shards, then stop (for resume tests)
    pub stop_after: Option<usize>,
    /// restrict the c3c4 campaign to the C4 branch (the stretch tier sweeps
    /// C4 alone at larger q, where the residual index space is impractical)
    pub c4_only: bool,
}

impl ScanConfig {
    pub fn new(campaign: Campaign, p: u32, h: u32) -> ScanConfig {
        ScanConfig {
            campaign,
            p,
            h,
            s_set: vec![1],
            reduce: false,
            shards: 1,
            jobs: 1,
            seed: 1,
            out: None,
            resume: None,
            stop_after: None,
            c4_only: false,
        }
    }
}

/// Canonical first line of a results file; shard and thread counts are
/// deliberately excluded so re-sharded runs stay byte-identical.
#[derive(Serialize)]
struct Header<'a> {
    schema: u32,
    campaign: &'a str,
    q: String,
    s_set: &'a [usize],
    reduce: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    c4_only: Option<bool>,
    seed: u64,
    field: crate::gfield::FieldDescriptor,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct ScanSummary {
    pub units: u64,
    pub records: u64,
    pub counterexamples: u64,
    pub census: BTreeMap<String, u64>,
    pub complete: bool,
}

#[derive(Default)]
struct ShardOutput {
    lines: Vec<String>,
    census: BTreeMap<String, u64>,
    counterexamples: u64,
    units: u64,
}

impl ShardOutput {
    fn bump(&mut self, key: &str, by: u64) {
        *self.census.entry(key.to_string()).or_default() += by;
    }
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    fingerprint: String,
    shards: usize,
    shards_done: usize,
    bytes_written: u64,
    summary: ScanSummary,
}

fn fingerprint(header: &str, shards: usize) -> String {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    h.update(header.as_bytes());
    h.update(shards.to_le_bytes());
    let d = h.finalize();
    d.iter().map(|b| format!("{b:02x}")).collect()
}

/// Contiguous index ranges [lo, hi) that exactly partition [0, total).
pub fn shard_ranges(total: u64, shards: usize) -> Vec<(u64, u64)> {
    let shards = shards.max(1) as u64;
    let ranges: Vec<(u64, u64)> = (0..shards)
        .map(|i| (i * total / shards, (i + 1) * total / shards))
        .collect();
    // index-arithmetic self-test: no overlap, no gap
    assert_eq!(ranges[0].0, 0);
    assert_eq!(ranges.last().unwrap().1, total);
    for w in ranges.windows(2) {
        assert_eq!(w[0].1, w[1].0);
    }
    ranges
}

/// Entry point for every campaign.
pub fn run_scan(cfg: &ScanConfig) -> Result<ScanSummary, SearchError> {
    let ctx = FieldCtx::shared(cfg.p, cfg.h)?;
    for &s in &cfg.s_set {
        if s % EXT == 0 {
            return Err(SearchError::BadJob(format!("s = {s} not coprime to 5")));
        }
    }
    let total = match cfg.campaign {
        Campaign::Census => census_units(&ctx, cfg.reduce),
        Campaign::TConj => {
            (ctx.q() as u64 - 1) * (ctx.q() as u64 - 1) * cfg.s_set.len() as u64
        }
        Campaign::C3C4 => c3c4_layout(&ctx, cfg.reduce, cfg.c4_only).total,
        Campaign::FormaK => {
            (ctx.big_size() as u64 - 1) * (ctx.q() as u64 - 1) * cfg.s_set.len() as u64
        }
    };
    // in-run validation of the reductions this job will rely on
    if cfg.reduce {
        match cfg.campaign {
            Campaign::Census => validate_census_reduction(&ctx, cfg.seed)?,
            Campaign::C3C4 => validate_c3c4_reductions(&ctx, cfg.seed, cfg.c4_only)?,
            _ => {}
        }
    }
    let header_struct = Header {
        schema: 1,
        campaign: cfg.campaign.name(),
        q: format!("{}^{}", cfg.p, cfg.h),
        s_set: &cfg.s_set,
        reduce: cfg.reduce,
        c4_only: (cfg.campaign == Campaign::C3C4 && cfg.c4_only).then_some(true),
        seed: cfg.seed,
        field: ctx.descriptor(),
    };
    let header = serde_json::to_string(&header_struct).unwrap();
    let fp = fingerprint(&header, cfg.shards);
    let ranges = shard_ranges(total, cfg.shards);

    // resume state
    let mut start_shard = 0usize;
    let mut summary = ScanSummary::default();
    let mut bytes_written = (header.len() + 1) as u64;
    if let Some(ck_path) = &cfg.resume {
        if ck_path.exists() {
            let ck: Checkpoint = serde_json::from_str(&fs::read_to_string(ck_path)?)
                .map_err(|e| SearchError::BadJob(format!("checkpoint parse: {e}")))?;
            if ck.fingerprint != fp || ck.shards != cfg.shards {
                return Err(SearchError::CheckpointMismatch);
            }
            start_shard = ck.shards_done;
            summary = ck.summary;
            bytes_written = ck.bytes_written;
        }
    }

    // output file, truncated to the checkpointed prefix
    let mut out_file = match &cfg.out {
        Some(path) => {
            let file = if start_shard > 0 && path.exists() {
                let f = fs::OpenOptions::new().read(true).write(true).open(path)?;
                f.set_len(bytes_written)?;
                let mut f = fs::OpenOptions::new().append(true).open(path)?;
                f.flush()?;
                Some(f)
            } else {
                let mut f = fs::File::create(path)?;
                writeln!(f, "{header}")?;
                Some(f)
            };
            file
        }
        None => None,
    };

    let next = AtomicUsize::new(start_shard);
    let shards_total = cfg.shards;
    // a deterministic stop budget: schedule only this many further shards
    let sched_end = match cfg.stop_after {
        Some(k) => (start_shard + k).min(shards_total),
        None => shards_total,
    };
    let (tx, rx) = mpsc::channel::<(usize, ShardOutput)>();
    let mut complete = start_shard == shards_total;
    std::thread::scope(|scope| -> Result<(), SearchError> {
        for _ in 0..cfg.jobs.max(1) {
            let tx = tx.clone();
            let ctx = &ctx;
            let ranges = &ranges;
            let next = &next;
            scope.spawn(move || {
                let mut scratch = ScatterScratch::new(ctx);
                loop {
                    let s = next.fetch_add(1, Ordering::Relaxed);
                    if s >= sched_end {
                        break;
                    }
                    let (lo, hi) = ranges[s];
                    let out = run_shard(ctx, cfg, lo, hi, &mut scratch);
                    if tx.send((s, out)).is_err() {
                        break;
                    }
                }
            });
        }
        drop(tx);
        let mut pending: BTreeMap<usize, ShardOutput> = BTreeMap::new();
        let mut done = start_shard;
        while let Ok((s, out)) = rx.recv() {
            pending.insert(s, out);
            while let Some(out) = pending.remove(&done) {
                for line in &out.lines {
                    bytes_written += (line.len() + 1) as u64;
                    if let Some(f) = out_file.as_mut() {
                        writeln!(f, "{line}")?;
                    }
                }
                summary.records += out.lines.len() as u64;
                summary.units += out.units;
                summary.counterexamples += out.counterexamples;
                for (k, v) in &out.census {
                    *summary.census.entry(k.clone()).or_default() += v;
                }
                done += 1;
                if let Some(f) = out_file.as_mut() {
                    f.flush()?;
                }
                if let Some(ck_path) = &cfg.resume {
                    let ck = Checkpoint {
                        fingerprint: fp.clone(),
                        shards: cfg.shards,
                        shards_done: done,
                        bytes_written,
                        summary: summary.clone(),
                    };
                    let tmp = ck_path.with_extension("tmp");
                    fs::write(&tmp, serde_json::to_string(&ck).unwrap())?;
                    fs::rename(&tmp, ck_path)?;
                }
            }
        }
        complete = done == shards_total;
        Ok(())
    })?;
    summary.complete = complete;
    if complete {
        if cfg.campaign == Campaign::Census {
            // the reduced orbit multipliers must re-cover the whole space
            let n = ctx.big_size() as u64;
            let covered = summary.census.values().sum::<u64>();
            assert_eq!(covered, n * n * n, "census multipliers must tile the space");
        }
        if let Some(f) = out_file.as_mut() {
            let line = serde_json::to_string(&serde_json::json!({"summary": summary})).unwrap();
            writeln!(f, "{line}")?;
            f.flush()?;
        }
    }
    Ok(summary)
}

fn run_shard(
    ctx: &FieldCtx,
    cfg: &ScanConfig,
    lo: u64,
    hi: u64,
    scratch: &mut ScatterScratch,
) -> ShardOutput {
    match cfg.campaign {
        Campaign::Census => census_shard(ctx, cfg, lo, hi, scratch),
        Campaign::TConj => tconj_shard(ctx, cfg, lo, hi),
        Campaign::C3C4 => c3c4_shard(ctx, cfg, lo, hi, scratch),
        Campaign::FormaK => formak_shard(ctx, cfg, lo, hi),
    }
}

// ----- the Γ_{f0} census -----

fn census_units(ctx: &FieldCtx, reduce: bool) -> u64 {
    let n = ctx.big_size() as u64;
    if reduce {
        let q1 = ctx.q() as u64 - 1;
        q1 * n * n + q1 * n + q1 + 1
    } else {
        n * n * n
    }
}

/// digit -> element: 0 is zero, k is g^{k-1}
#[inline]
fn elt_of_digit(d: u64) -> FFElement {
    if d == 0 {
        FFElement::ZERO
    } else {
        FFElement((d - 1) as u32)
    }
}

#[inline]
fn key_of(e: FFElement) -> u32 {
    e.log().unwrap_or(u32::MAX)
}

/// Constants of the diagonal-orbit reduction.
struct OrbitConsts {
    order: u64,
    m: u64, // (q^5-1)/(q-1)
    q1: u64,
    /// exponents of the action on (a2, a3, a4): c^{-e}
    exps: [u64; 3],
    /// t-solvers: t = r * inv_e mod m per stratum
    invs: [u64; 3],
}

fn orbit_consts(ctx: &FieldCtx) -> OrbitConsts {
    let q = ctx.q() as u64;
    let order = ctx.order() as u64;
    let m = ctx.coset_count() as u64;
    let exps = [q, q * q + q, q * q * q + q * q + q];
    let inv_mod = |a: u64, m: u64| -> u64 {
        // extended euclid; gcd is 1 for all three exponents
        let (mut r0, mut r1) = (m as i128, (a % m) as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let d = r0 / r1;
            (r0, r1) = (r1, r0 - d * r1);
            (t0, t1) = (t1, t0 - d * t1);
        }
        assert_eq!(r0, 1, "orbit exponent not invertible mod m");
        t0.rem_euclid(m as i128) as u64
    };
    OrbitConsts {
        order,
        m,
        q1: q - 1,
        exps,
        invs: [inv_mod(q, m), inv_mod(q * q + q, m), inv_mod(q * q * q + q * q + q, m)],
    }
}

impl OrbitConsts {
    /// apply the diagonal element c = g^{(q-1) t} to a triple (log arithmetic)
    fn scale(&self, triple: [FFElement; 3], t: u64) -> [FFElement; 3] {
        let clog = (self.q1 * t) % self.order;
        let mut out = triple;
        for (i, e) in self.exps.iter().enumerate() {
            if let Some(l) = triple[i].log() {
                // multiply by c^{-e}
                let delta = (clog as u128 * (*e as u128)) % self.order as u128;
                let nl = (l as u128 + self.order as u128 - delta) % self.order as u128;
                out[i] = FFElement(nl as u32);
            }
        }
        out
    }

    /// canonical representative of the diagonal orbit of a nonzero triple
    fn canonical_diag(&self, triple: [FFElement; 3]) -> [FFElement; 3] {
        let stratum = triple.iter().position(|e| !e.is_zero()).unwrap();
        let l = triple[stratum].log().unwrap() as u64;
        let r = l % self.q1;
        // need c with lead * c^{-e} = g^r: t = floor(l/(q-1)) * inv_e mod m
        let d = (l - r) / self.q1;
        let t = (d % self.m) * self.invs[stratum] % self.m;
        let out = self.scale(triple, t);
        debug_assert_eq!(out[stratum].log().unwrap() as u64, r);
        out
    }

    /// coefficientwise Frobenius followed by diagonal re-canonicalization
    fn frob_step(&self, ctx: &FieldCtx, triple: [FFElement; 3]) -> [FFElement; 3] {
        let img: [FFElement; 3] = core::array::from_fn(|i| ctx.frob(triple[i], 1));
        if img.iter().all(|e| e.is_zero()) {
            return img;
        }
        self.canonical_diag(img)
    }

    /// full canonical representative: diagonal + Frobenius minimum
    fn canonical(&self, ctx: &FieldCtx, triple: [FFElement; 3]) -> [FFElement; 3] {
        if triple.iter().all(|e| e.is_zero()) {
            return triple;
        }
        let mut cur = self.canonical_diag(triple);
        let mut best = cur;
        for _ in 0..4 {
            cur = self.frob_step(ctx, cur);
            if triple_key(&cur) < triple_key(&best) {
                best = cur;
            }
        }
        best
    }
}

fn triple_key(t: &[FFElement; 3]) -> [u32; 3] {
    [key_of(t[0]), key_of(t[1]), key_of(t[2])]
}

/// The reduction claims class equality along orbits; check it on random
/// triples before trusting it (the run aborts on any mismatch).
fn validate_census_reduction(ctx: &FieldCtx, seed: u64) -> Result<(), SearchError> {
    let consts = orbit_consts(ctx);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc3a5);
    let mut scratch = ScatterScratch::new(ctx);
    let model = SubgeometryModel::moore(ctx, 1);
    let samples = 1000usize;
    for _ in 0..samples {
        let triple: [FFElement; 3] = core::array::from_fn(|_| ctx.rand_elt(&mut rng));
        let rep = consts.canonical(ctx, triple);
        let sc1 = census_scatter(ctx, &triple, &mut scratch);
        let sc2 = census_scatter(ctx, &rep, &mut scratch);
        if sc1 != sc2 {
            return Err(SearchError::ReductionValidation(format!(
                "scatteredness differs along an orbit: {:?}",
                triple_key(&triple)
            )));
        }
        if sc1 {
            let c1 = classify(ctx, &model, &gamma_from_poly(ctx, triple[0], triple[1], triple[2]))
                .map_err(|e| SearchError::ReductionValidation(e.to_string()))?
                .class;
            let c2 = classify(ctx, &model, &gamma_from_poly(ctx, rep[0], rep[1], rep[2]))
                .map_err(|e| SearchError::ReductionValidation(e.to_string()))?
                .class;
            if c1 != c2 {
                return Err(SearchError::ReductionValidation(format!(
                    "class differs along an orbit: {c1:?} vs {c2:?}"
                )));
            }
        }
    }
    Ok(())
}

#[inline]
fn census_scatter(ctx: &FieldCtx, t: &[FFElement; 3], scratch: &mut ScatterScratch) -> bool {
    let f0 = f0_poly(ctx, t[0], t[1], t[2]);
    scatter_check(ctx, &f0, scratch).unwrap().is_scattered()
}

#[derive(Serialize)]
struct CensusRecord<'a> {
    c: &'static str,
    i: u64,
    a2: &'a str,
    a3: &'a str,
    a4: &'a str,
    class: &'static str,
    mult: u64,
}

fn class_key(class: ConfigClass) -> &'static str {
    match class {
        ConfigClass::InvalidVertex => "invalid_vertex",
        ConfigClass::NonScattered => "non_scattered",
        ConfigClass::Pseudoregulus => "pseudoregulus",
        ConfigClass::LpConfigI => "lp_config_i",
        ConfigClass::LpConfigII => "lp_config_ii",
        ConfigClass::NewCandidate => "new_candidate",
    }
}

fn census_shard(
    ctx: &FieldCtx,
    cfg: &ScanConfig,
    lo: u64,
    hi: u64,
    scratch: &mut ScatterScratch,
) -> ShardOutput {
    let mut out = ShardOutput::default();
    let n = ctx.big_size() as u64;
    let consts = orbit_consts(ctx);
    let model = SubgeometryModel::moore(ctx, 1);
    let q1 = ctx.q() as u64 - 1;
    for idx in lo..hi {
        out.units += 1;
        let (triple, base_mult) = if !cfg.reduce {
            (
                [
                    elt_of_digit(idx / (n * n)),
                    elt_of_digit(idx / n % n),
                    elt_of_digit(idx % n),
                ],
                1u64,
            )
        } else {
            // strata: a2 != 0 | a2 = 0, a3 != 0 | a2 = a3 = 0, a4 != 0 | zero
            let a_end = q1 * n * n;
            let b_end = a_end + q1 * n;
            let c_end = b_end + q1;
            let t = if idx < a_end {
                [
                    FFElement((idx / (n * n)) as u32),
                    elt_of_digit(idx / n % n),
                    elt_of_digit(idx % n),
                ]
            } else if idx < b_end {
                let j = idx - a_end;
                [FFElement::ZERO, FFElement((j / n) as u32), elt_of_digit(j % n)]
            } else if idx < c_end {
                [FFElement::ZERO, FFElement::ZERO, FFElement((idx - b_end) as u32)]
            } else {
                [FFElement::ZERO; 3]
            };
            if t.iter().all(|e| e.is_zero()) {
                (t, 1)
            } else {
                // keep only Frobenius-minimal representatives
                let mut images = [t; 5];
                for i in 1..5 {
                    images[i] = consts.frob_step(ctx, images[i - 1]);
                }
                let selfkey = triple_key(&t);
                if images[1..].iter().any(|im| triple_key(im) < selfkey) {
                    continue;
                }
                let mut distinct = 1u64;
                for i in 1..5 {
                    if images[..i].iter().all(|im| triple_key(im) != triple_key(&images[i])) {
                        distinct += 1;
                    }
                }
                (t, consts.m * distinct)
            }
        };
        if !census_scatter(ctx, &triple, scratch) {
            out.bump("non_scattered", base_mult);
            continue;
        }
        let gamma = gamma_from_poly(ctx, triple[0], triple[1], triple[2]);
        let report = classify(ctx, &model, &gamma).expect("census plane classification");
        let key = class_key(report.class);
        debug_assert!(
            !matches!(report.class, ConfigClass::NonScattered | ConfigClass::InvalidVertex),
            "scattered polynomial classified as non-scattered"
        );
        out.bump(key, base_mult);
        out.bump("scattered_total", base_mult);
        if report.class == ConfigClass::NewCandidate {
            out.counterexamples += 1;
        }
        let rec = CensusRecord {
            c: "census",
            i: idx,
            a2: &ctx.fmt_elt(triple[0]),
            a3: &ctx.fmt_elt(triple[1]),
            a4: &ctx.fmt_elt(triple[2]),
            class: key,
            mult: base_mult,
        };
        out.lines.push(serde_json::to_string(&rec).unwrap());
    }
    // the census accumulates the scattered_total key twice above; remove the
    // double count for the class-sum self-test
    if let Some(v) = out.census.remove("scattered_total") {
        let sum: u64 = out
            .census
            .iter()
            .filter(|(k, _)| k.as_str() != "non_scattered")
            .map(|(_, v)| *v)
            .sum();
        debug_assert_eq!(v, sum);
    }
    out
}

// ----- the witness table -----

#[derive(Serialize)]
struct TconjRecord<'a> {
    c: &'static str,
    i: u64,
    delta: &'a str,
    eps: &'a str,
    s: usize,
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    x: Option<String>,
}

fn tconj_shard(ctx: &FieldCtx, cfg: &ScanConfig, lo: u64, hi: u64) -> ShardOutput {
    let mut out = ShardOutput::default();
    let q1 = ctx.q() as u64 - 1;
    let fq = ctx.fq_elements();
    for idx in lo..hi {
        out.units += 1;
        let s = cfg.s_set[(idx / (q1 * q1)) as usize];
        let rest = idx % (q1 * q1);
        let delta = fq[1 + (rest / q1) as usize];
        let eps = fq[1 + (rest % q1) as usize];
        let (verdict, x) = match sctness_solve(ctx, delta, eps, s) {
            Err(FamilyError::InvalidPair) => ("excluded_square", None),
            Err(e) => panic!("tconj solve: {e}"),
            Ok(_) if tconj_discriminant(ctx, delta, eps).is_zero() => ("excluded_cubic", None),
            Ok(SctnessOutcome::Witness(x)) => {
                assert!(verify_sctness_witness(ctx, delta, eps, s, x));
                ("witness", Some(ctx.fmt_elt(x)))
            }
            Ok(SctnessOutcome::NoSolution) => {
                out.counterexamples += 1;
                ("no_solution", None)
            }
        };
        out.bump(verdict, 1);
        let rec = TconjRecord {
            c: "tconj",
            i: idx,
            delta: &ctx.fmt_elt(delta),
            eps: &ctx.fmt_elt(eps),
            s,
            verdict,
            x,
        };
        out.lines.push(serde_json::to_string(&rec).unwrap());
    }
    out
}

// ----- C3/C4 sweeps -----

struct C3C4Layout {
    c4: u64,
    f1_branch: u64,
    total: u64,
    /// basis of the trace-zero F_q-subspace
    tz_basis: Vec<FFElement>,
}

fn trace_zero_basis(ctx: &FieldCtx) -> Vec<FFElement> {
    let images: crate::gfield::Vec5 =
        core::array::from_fn(|i| ctx.trace(ctx.frob(ctx.gamma(), i)));
    let (kernel, rank) = ctx.fq_kernel_from_images(&images);
    assert_eq!(rank, 1);
    kernel
}

fn c3c4_layout(ctx: &FieldCtx, reduce: bool, c4_only: bool) -> C3C4Layout {
    let q = ctx.q() as u64;
    // the C4 parameter space is the norm-one subgroup; the Frobenius classes
    // are enumerated by filtering, so the index space does not shrink
    let c4 = ctx.coset_count() as u64;
    if c4_only {
        return C3C4Layout {
            c4,
            f1_branch: 0,
            total: c4,
            tz_basis: trace_zero_basis(ctx),
        };
    }
    // η over nonzero trace-zero combinations; with the scaling reduction only
    // leading-coefficient-one representatives are visited
    let eta_reps = if reduce {
        (q.pow(4) - 1) / (q - 1)
    } else {
        q.pow(4) - 1
    };
    // residual branch: (η, ρ) with tr(η^{-1}) = 0 filtered inside; ρ ranges
    // over all of F_{q^5} with the tr(ρ) != 0 filter applied inside
    let residual = eta_reps * ctx.big_size() as u64;
    C3C4Layout {
        c4,
        f1_branch: eta_reps,
        total: c4 + eta_reps + residual,
        tz_basis: trace_zero_basis(ctx),
    }
}

/// η for a unit index: F_q-combination of the trace-zero basis; with the
/// reduction the first nonzero digit is 1.
fn eta_of_index(ctx: &FieldCtx, basis: &[FFElement], reduce: bool, idx: u64) -> Option<FFElement> {
    let q = ctx.q() as u64;
    let fq = ctx.fq_elements();
    let digits: Vec<usize> = if reduce {
        // leading-one representatives, same layout as Σ enumeration
        let mut rem = idx;
        let mut lead = 0;
        loop {
            let count = q.pow((3 - lead) as u32);
            if rem < count {
                break;
            }
            rem -= count;
            lead += 1;
            if lead == 4 {
                return None;
            }
        }
        let mut d = vec![0usize; 4];
        d[lead] = 1;
        for t in 0..(3 - lead) {
            d[lead + 1 + t] = (rem % q) as usize;
            rem /= q;
        }
        d
    } else {
        let mut rem = idx + 1; // skip the zero combination
        let mut d = vec![0usize; 4];
        for digit in d.iter_mut() {
            *digit = (rem % q) as usize;
            rem /= q;
        }
        d
    };
    let mut eta = FFElement::ZERO;
    for (t, &d) in digits.iter().enumerate() {
        if d != 0 {
            eta = ctx.add(eta, ctx.mul(fq[d], basis[t]));
        }
    }
    if eta.is_zero() {
        None
    } else {
        Some(eta)
    }
}

fn validate_c3c4_reductions(ctx: &FieldCtx, seed: u64, c4_only: bool) -> Result<(), SearchError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc3c4);
    let mut scratch = ScatterScratch::new(ctx);
    // C4: coefficient Frobenius preserves scatteredness
    let fiber: Vec<FFElement> = ctx.norm_fiber(ctx.one()).collect();
    for _ in 0..100 {
        let k = fiber[rng.random_range(0..fiber.len())];
        let (g1, h1) = FamilySpec::C4 { k }.pair_for(ctx).unwrap();
        let (g2, h2) = FamilySpec::C4 { k: ctx.frob(k, 1) }.pair_for(ctx).unwrap();
        let s1 = scatter_check_pair(ctx, &g1, &h1, &mut scratch).unwrap();
        let s2 = scatter_check_pair(ctx, &g2, &h2, &mut scratch).unwrap();
        if s1.is_scattered() != s2.is_scattered() {
            return Err(SearchError::ReductionValidation(
                "C4 Frobenius reduction".into(),
            ));
        }
    }
    if c4_only {
        return Ok(());
    }
    // C3: the F1 polynomial form matches the (η, ρ) set through the explicit
    // projectivity, and scaling η preserves scatteredness
    let mut done = 0;
    while done < 20 {
        let eta = ctx.rand_nonzero(&mut rng);
        if !ctx.trace(eta).is_zero() {
            continue;
        }
        let c = ctx.fq_elements()[1 + (rng.random::<u64>() % (ctx.q() as u64 - 1)) as usize];
        let spec1 = FamilySpec::C3 {
            eta,
            rho: crate::config::canonical_rho(ctx),
        };
        let spec2 = FamilySpec::C3 {
            eta: ctx.mul(c, eta),
            rho: crate::config::canonical_rho(ctx),
        };
        let l1 = spec1.construct(ctx).unwrap();
        let l2 = spec2.construct(ctx).unwrap();
        if l1.is_scattered() != l2.is_scattered() {
            return Err(SearchError::ReductionValidation("C3 scaling".into()));
        }
        if !ctx.trace(ctx.inv(eta)).is_zero() {
            let f1 = FamilySpec::F1 { eta }.construct(ctx).unwrap();
            let m = crate::families::c3_to_f1_matrix(ctx, eta);
            if l1.transform(ctx, &m) != f1 {
                return Err(SearchError::ReductionValidation("C3 to F1 map".into()));
            }
        }
        done += 1;
    }
    Ok(())
}

#[derive(Serialize)]
struct C3c4Record {
    c: &'static str,
    i: u64,
    branch: &'static str,
    params: String,
    verdict: &'static str,
}

fn c3c4_shard(
    ctx: &FieldCtx,
    cfg: &ScanConfig,
    lo: u64,
    hi: u64,
    scratch: &mut ScatterScratch,
) -> ShardOutput {
    let mut out = ShardOutput::default();
    let layout = c3c4_layout(ctx, cfg.reduce, cfg.c4_only);
    let fiber: Vec<FFElement> = ctx.norm_fiber(ctx.one()).collect();
    for idx in lo..hi {
        out.units += 1;
        if idx < layout.c4 {
            let k = fiber[idx as usize];
            if cfg.reduce {
                // process only the log-minimal member of the Frobenius orbit
                let klog = k.log().unwrap();
                let min = (0..5)
                    .map(|i| ctx.frob(k, i).log().unwrap())
                    .min()
                    .unwrap();
                if klog != min {
                    out.bump("c4_skipped", 1);
                    continue;
                }
            }
            let (g, h) = FamilySpec::C4 { k }.pair_for(ctx).unwrap();
            let scattered = scatter_check_pair(ctx, &g, &h, scratch)
                .unwrap()
                .is_scattered();
            out.bump("c4_tested", 1);
            if scattered {
                out.bump("c4_scattered", 1);
                out.counterexamples += 1;
                out.lines.push(
                    serde_json::to_string(&C3c4Record {
                        c: "c3c4",
                        i: idx,
                        branch: "c4",
                        params: format!("k={}", ctx.fmt_elt(k)),
                        verdict: "scattered",
                    })
                    .unwrap(),
                );
            }
        } else if idx < layout.c4 + layout.f1_branch {
            let j = idx - layout.c4;
            let Some(eta) = eta_of_index(ctx, &layout.tz_basis, cfg.reduce, j) else {
                continue;
            };
            if ctx.trace(ctx.inv(eta)).is_zero() {
                // belongs to the residual branch
                out.bump("f1_deferred", 1);
                continue;
            }
            let (g, h) = FamilySpec::F1 { eta }.pair_for(ctx).unwrap();
            let scattered = scatter_check_pair(ctx, &g, &h, scratch)
                .unwrap()
                .is_scattered();
            out.bump("f1_tested", 1);
            if scattered {
                out.bump("c3_scattered", 1);
                out.counterexamples += 1;
                out.lines.push(
                    serde_json::to_string(&C3c4Record {
                        c: "c3c4",
                        i: idx,
                        branch: "c3_f1",
                        params: format!("eta={}", ctx.fmt_elt(eta)),
                        verdict: "scattered",
                    })
                    .unwrap(),
                );
            }
        } else {
            let j = idx - layout.c4 - layout.f1_branch;
            let per_eta = ctx.big_size() as u64;
            let Some(eta) = eta_of_index(ctx, &layout.tz_basis, cfg.reduce, j / per_eta) else {
                continue;
            };
            if !ctx.trace(ctx.inv(eta)).is_zero() {
                continue; // covered by the F1 branch
            }
            let rho = match j % per_eta {
                0 => FFElement::ZERO,
                r => FFElement((r - 1) as u32),
            };
            if ctx.trace(rho).is_zero() {
                continue;
            }
            let (g, h) = FamilySpec::C3 { eta, rho }.pair_for(ctx).unwrap();
            let scattered = scatter_check_pair(ctx, &g, &h, scratch)
                .unwrap()
                .is_scattered();
            out.bump("residual_tested", 1);
            if scattered {
                out.bump("c3_scattered", 1);
                out.counterexamples += 1;
                out.lines.push(
                    serde_json::to_string(&C3c4Record {
                        c: "c3c4",
                        i: idx,
                        branch: "c3_residual",
                        params: format!("eta={},rho={}", ctx.fmt_elt(eta), ctx.fmt_elt(rho)),
                        verdict: "scattered",
                    })
                    .unwrap(),
                );
            }
        }
    }
    out
}

// ----- the (k, delta, s) normal-form census -----

#[derive(Serialize)]
struct FormakRecord<'a> {
    c: &'static str,
    i: u64,
    k: &'a str,
    delta: &'a str,
    s: usize,
    class: &'static str,
}

fn formak_shard(ctx: &FieldCtx, cfg: &ScanConfig, lo: u64, hi: u64) -> ShardOutput {
    let mut out = ShardOutput::default();
    let q1 = ctx.q() as u64 - 1;
    let nstar = ctx.big_size() as u64 - 1;
    let fq = ctx.fq_elements();
    let one = ctx.one();
    for idx in lo..hi {
        out.units += 1;
        let s = cfg.s_set[(idx / (nstar * q1)) as usize];
        let rest = idx % (nstar * q1);
        let k = FFElement((rest / q1) as u32);
        let delta = fq[1 + (rest % q1) as usize];
        let alpha = ctx.inv(k);
        let beta = ctx.mul(
            delta,
            ctx.pow_u(k, ctx.qpow(4 * s % EXT) + ctx.qpow(2 * s % EXT)),
        );
        // scatteredness via the no-solution criterion
        let scattered = fulemma41_solution(ctx, alpha, beta, s).is_none();
        if !scattered {
            out.bump("not_scattered", 1);
            continue;
        }
        out.bump("scattered", 1);
        let (g, h) = crate::families::alpha_beta_pair(ctx, alpha, beta, s);
        let report = classify_pair(ctx, &g, &h, s).expect("formak classification");
        let key = class_key(report.class);
        out.bump(key, 1);
        if report.class == ConfigClass::NewCandidate {
            // consistent only if the no-solution conditions fail, which the
            // theory excludes: report as a counterexample with its data
            let eps = ctx.norm(k);
            let d2e = ctx.mul(ctx.mul(delta, delta), eps);
            let disc = tconj_discriminant(ctx, delta, eps);
            let sct = sctness_solve(ctx, delta, eps, s);
            let survived = d2e != one
                && !disc.is_zero()
                && matches!(sct, Ok(SctnessOutcome::NoSolution));
            let _ = alpha_beta_predicates(ctx, alpha, beta, s);
            out.counterexamples += 1;
            out.bump(
                if survived {
                    "new_candidate_survived"
                } else {
                    "new_candidate_contradicted"
                },
                1,
            );
        }
        let rec = FormakRecord {
            c: "formak",
            i: idx,
            k: &ctx.fmt_elt(k),
            delta: &ctx.fmt_elt(delta),
            s,
            class: key,
        };
        out.lines.push(serde_json::to_string(&rec).unwrap());
    }
    out
}
