//! Batch front end: every operation as a subcommand with reproducible
//! JSON-lines output. Exit codes: 0 = consistent, 2 = counterexample found,
//! 1 = internal error, 64 = usage error.

use clap::{ArgAction, Args, Parser, Subcommand};
use msls5::config::{
    classify, extract, invariant_battery, rk44_extract, synth_rank44, uab_projection, ConfigClass,
};
use msls5::curve::{conic_case, lift_and_verify, valid_pairs, CurveError, CurveQ};
use msls5::families::{
    alpha_beta_pair, alpha_beta_predicates, sctness_solve, verify_sctness_witness, SctnessOutcome,
};
use msls5::gfield::{FFElement, FieldCtx};
use msls5::linpoly::{
    parse_poly, scatter_check, scatter_check_pair, verify_witness, LinearSet, LinearizedPoly,
    ScatterScratch,
};
use msls5::projgeom::{
    f0_poly, gamma_from_poly, point_rank, project_sigma, ProjSubspace, SigmaProjection,
    SubgeometryModel,
};
use msls5::search::{run_scan, Campaign, ScanConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "msls5", version, about = "scattered linear sets of PG(1,q^5)")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct ScanArgs {
    /// field size as q or p^h
    #[arg(long)]
    q: String,
    /// shard count (determinism is shard-count independent)
    #[arg(long, default_value_t = 1)]
    shards: usize,
    /// worker threads
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// results file (JSON lines); stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// checkpoint file for resumable runs
    #[arg(long)]
    resume: Option<PathBuf>,
    /// seed for the in-run reduction validation
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the field descriptor and basic constants
    FieldInfo {
        #[arg(long)]
        q: String,
    },
    /// Scatteredness of a linearized polynomial
    ScatteredCheck {
        #[arg(long)]
        q: String,
        /// e.g. "x^q", "x^q2 + g^3*x^q4", or a coefficient list "g^0,0,0,0,g^3"
        #[arg(long)]
        poly: String,
    },
    /// Classify a plane: either the Γ_{f0} of a coefficient triple, or
    /// explicit basis rows
    ClassifyPlane {
        #[arg(long)]
        q: String,
        /// a2,a3,a4 in generator-power notation (Moore model)
        #[arg(long)]
        triple: Option<String>,
        /// basis rows "{[..,..,..,..,..];[..];[..]}" (rational model)
        #[arg(long)]
        rows: Option<String>,
        #[arg(long, default_value_t = 1)]
        s: usize,
        /// also run the geometric identity battery
        #[arg(long, action = ArgAction::SetTrue)]
        battery: bool,
    },
    /// Full census of the planes Γ_{f0} over (a2,a3,a4)
    Census {
        #[command(flatten)]
        scan: ScanArgs,
        /// use the validated diagonal/Frobenius orbit reduction
        #[arg(long, action = ArgAction::SetTrue, overrides_with = "no_reduce")]
        reduce: bool,
        #[arg(long, action = ArgAction::SetTrue)]
        no_reduce: bool,
    },
    /// Witness table over valid (delta, eps) pairs
    Tconj {
        #[command(flatten)]
        scan: ScanArgs,
        /// comma-separated exponents, e.g. 1,2,3,4
        #[arg(long, default_value = "1,2,3,4")]
        s: String,
    },
    /// C4 sweep plus the two C3 branches
    C3c4 {
        #[command(flatten)]
        scan: ScanArgs,
        #[arg(long, action = ArgAction::SetTrue, overrides_with = "no_reduce")]
        reduce: bool,
        #[arg(long, action = ArgAction::SetTrue)]
        no_reduce: bool,
        /// sweep the C4 branch alone (practical at larger q)
        #[arg(long, action = ArgAction::SetTrue)]
        c4_only: bool,
    },
    /// Census of the (k, delta, s) normal form
    Formak {
        #[command(flatten)]
        scan: ScanArgs,
        #[arg(long, default_value = "1,2,3,4")]
        s: String,
    },
    /// Build the curve of a (delta, eps) pair, count points, verify lifts and
    /// the conic special case
    CurveVerify {
        #[arg(long)]
        q: String,
        /// element of F_q: a small integer or g^k
        #[arg(long)]
        delta: String,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 1)]
        s: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Seeded randomized property suite across all modules
    PropSuite {
        #[arg(long)]
        q: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        cases: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(64);
        }
    };
    match run(cli) {
        Ok(counterexamples) => {
            if counterexamples > 0 {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn field(q: &str) -> Result<Arc<FieldCtx>, Box<dyn std::error::Error>> {
    let (p, h) = FieldCtx::parse_q(q)?;
    Ok(FieldCtx::shared(p, h)?)
}

fn parse_fq_elt(ctx: &FieldCtx, text: &str) -> Result<FFElement, Box<dyn std::error::Error>> {
    if let Ok(k) = text.trim().parse::<i64>() {
        return Ok(ctx.from_int(k));
    }
    Ok(ctx.parse_elt(text)?)
}

fn header(ctx: &FieldCtx, cmd: &str) {
    println!(
        "{}",
        json!({"schema": 1, "cmd": cmd, "q": format!("{}^{}", ctx.p(), ctx.h()),
               "field": ctx.descriptor()})
    );
}

fn scan_cfg(campaign: Campaign, scan: &ScanArgs) -> Result<ScanConfig, Box<dyn std::error::Error>> {
    let (p, h) = FieldCtx::parse_q(&scan.q)?;
    let mut cfg = ScanConfig::new(campaign, p, h);
    cfg.shards = scan.shards.max(1);
    cfg.jobs = scan.jobs.max(1);
    cfg.seed = scan.seed;
    cfg.resume = scan.resume.clone();
    cfg.out = scan.out.clone();
    Ok(cfg)
}

fn parse_s_set(text: &str) -> Result<Vec<usize>, Box<dyn std::error::Error>> {
    let mut out = Vec::new();
    for part in text.split(',') {
        out.push(part.trim().parse::<usize>()?);
    }
    Ok(out)
}

/// Run a campaign; when no --out was given, spool through a temp file and
/// replay it to stdout so the canonical bytes are what the user sees.
fn run_campaign(mut cfg: ScanConfig) -> Result<u64, Box<dyn std::error::Error>> {
    let spool = if cfg.out.is_none() {
        let dir = tempfile::tempdir()?;
        let path = dir.path().join("scan.jsonl");
        cfg.out = Some(path.clone());
        Some((dir, path))
    } else {
        None
    };
    let summary = run_scan(&cfg)?;
    if let Some((_dir, path)) = spool {
        print!("{}", std::fs::read_to_string(path)?);
    }
    eprintln!(
        "{} units={} records={} counterexamples={} complete={}",
        cfg.campaign.name(),
        summary.units,
        summary.records,
        summary.counterexamples,
        summary.complete
    );
    Ok(summary.counterexamples)
}

fn run(cli: Cli) -> Result<u64, Box<dyn std::error::Error>> {
    match cli.cmd {
        Cmd::FieldInfo { q } => {
            let ctx = field(&q)?;
            header(&ctx, "field-info");
            println!(
                "{}",
                json!({
                    "p": ctx.p(), "h": ctx.h(), "q": ctx.q(),
                    "big_size": ctx.big_size(),
                    "mode": format!("{:?}", ctx.mode()),
                    "generator": "g",
                    "gamma": ctx.fmt_elt(ctx.gamma()),
                    "sigma_size": ctx.coset_count(),
                })
            );
            Ok(0)
        }
        Cmd::ScatteredCheck { q, poly } => {
            let ctx = field(&q)?;
            header(&ctx, "scattered-check");
            let f = parse_poly(&ctx, &poly)?;
            let mut scratch = ScatterScratch::new(&ctx);
            let out = match scatter_check(&ctx, &f, &mut scratch)? {
                msls5::linpoly::Scatteredness::Scattered => {
                    let set = LinearSet::of_poly(&ctx, &f);
                    json!({"poly": f.fmt(&ctx), "scattered": true, "size": set.size(),
                           "digest": set.digest(&ctx)})
                }
                msls5::linpoly::Scatteredness::Witness(y, z) => {
                    assert!(verify_witness(&ctx, &f, y, z));
                    json!({"poly": f.fmt(&ctx), "scattered": false,
                           "witness": [ctx.fmt_elt(y), ctx.fmt_elt(z)]})
                }
            };
            println!("{out}");
            Ok(0)
        }
        Cmd::ClassifyPlane {
            q,
            triple,
            rows,
            s,
            battery,
        } => {
            let ctx = field(&q)?;
            header(&ctx, "classify-plane");
            let (model, gamma) = match (&triple, &rows) {
                (Some(t), None) => {
                    let parts: Vec<&str> = t.split(',').collect();
                    if parts.len() != 3 {
                        return Err("triple must be a2,a3,a4".into());
                    }
                    let a2 = parse_fq_elt(&ctx, parts[0])?;
                    let a3 = parse_fq_elt(&ctx, parts[1])?;
                    let a4 = parse_fq_elt(&ctx, parts[2])?;
                    (
                        SubgeometryModel::moore(&ctx, s),
                        gamma_from_poly(&ctx, a2, a3, a4),
                    )
                }
                (None, Some(r)) => (
                    SubgeometryModel::rational(&ctx, s),
                    ProjSubspace::parse(&ctx, r)?,
                ),
                _ => return Err("give exactly one of --triple or --rows".into()),
            };
            let report = classify(&ctx, &model, &gamma)?;
            let mut obj = json!({
                "class": report.class,
                "s": report.s,
                "gamma": gamma.fmt(&ctx),
            });
            if let Some(w) = &report.low_rank_witness {
                obj["low_rank_witness"] = json!(w.fmt(&ctx));
                obj["witness_rank"] = json!(point_rank(&ctx, &model, w));
            }
            if let Some(i) = report.pseudoregulus_power {
                obj["pseudoregulus_power"] = json!(i);
            }
            if let Some(ex) = &report.extraction {
                obj["a"] = json!(ex.a.fmt(&ctx));
                obj["b"] = json!(ex.b.fmt(&ctx));
                obj["rk_a"] = json!(ex.rk_a);
                obj["rk_b"] = json!(ex.rk_b);
                obj["lambda"] = json!(ctx.fmt_elt(ex.lambda));
                obj["mu"] = json!(ctx.fmt_elt(ex.mu));
                obj["u4"] = json!(ex.u4.iter().map(|c| ctx.fmt_elt(*c)).collect::<Vec<_>>());
                obj["eq_b"] = json!(ctx.fmt_elt(ex.eq_b));
            }
            if let Some(set) = &report.projection {
                obj["projection"] = json!(set.digest(&ctx));
            }
            println!("{obj}");
            if battery {
                if report.extraction.is_some() {
                    for finding in invariant_battery(&ctx, &model, &report) {
                        println!("{}", serde_json::to_string(&finding)?);
                    }
                } else {
                    println!("{}", json!({"battery": "skipped (no A/B extraction)"}));
                }
            }
            Ok(0)
        }
        Cmd::Census {
            scan,
            reduce,
            no_reduce,
        } => {
            let mut cfg = scan_cfg(Campaign::Census, &scan)?;
            cfg.reduce = (reduce || !no_reduce) && !no_reduce;
            run_campaign(cfg)
        }
        Cmd::Tconj { scan, s } => {
            let mut cfg = scan_cfg(Campaign::TConj, &scan)?;
            cfg.s_set = parse_s_set(&s)?;
            run_campaign(cfg)
        }
        Cmd::C3c4 {
            scan,
            reduce,
            no_reduce,
            c4_only,
        } => {
            let mut cfg = scan_cfg(Campaign::C3C4, &scan)?;
            cfg.reduce = (reduce || !no_reduce) && !no_reduce;
            cfg.c4_only = c4_only;
            run_campaign(cfg)
        }
        Cmd::Formak { scan, s } => {
            let mut cfg = scan_cfg(Campaign::FormaK, &scan)?;
            cfg.s_set = parse_s_set(&s)?;
            run_campaign(cfg)
        }
        Cmd::CurveVerify {
            q,
            delta,
            eps,
            s,
            samples,
        } => {
            let ctx = field(&q)?;
            header(&ctx, "curve-verify");
            let delta = parse_fq_elt(&ctx, &delta)?;
            let eps = parse_fq_elt(&ctx, &eps)?;
            let curve = CurveQ::new(&ctx, delta, eps)?;
            let count_fq = curve.count_points(&ctx, 1);
            let count_big = curve.count_points(&ctx, 5);
            let pts = curve.sample_points(&ctx, samples);
            for (x, y) in &pts {
                lift_and_verify(&ctx, delta, eps, *x, *y)?;
            }
            println!(
                "{}",
                json!({
                    "delta": ctx.fmt_elt(delta), "eps": ctx.fmt_elt(eps),
                    "degree": curve.degree,
                    "points_fq": count_fq, "points_fq5": count_big,
                    "lifts_verified": pts.len(),
                })
            );
            match conic_case(&ctx, s) {
                Ok(w) => println!(
                    "{}",
                    json!({"conic": "verified", "conic_delta": ctx.fmt_elt(w.delta),
                           "ell": ctx.fmt_elt(w.ell)})
                ),
                Err(CurveError::NoDeltaRoot) => {
                    println!("{}", json!({"conic": "no delta root"}))
                }
                Err(CurveError::InvalidPair(reason)) => {
                    println!("{}", json!({"conic": "excluded", "reason": reason}))
                }
                Err(e) => return Err(e.into()),
            }
            Ok(0)
        }
        Cmd::PropSuite { q, seed, cases } => {
            let ctx = field(&q)?;
            header(&ctx, "prop-suite");
            Ok(prop_suite(&ctx, seed, cases))
        }
    }
}

/// Seeded cross-module property checks; returns the number of failures.
fn prop_suite(ctx: &FieldCtx, seed: u64, cases: usize) -> u64 {
    let mut failures = 0u64;
    let mut emit = |check: &str, cases: usize, fail: usize| {
        println!(
            "{}",
            json!({"check": check, "cases": cases, "failures": fail})
        );
        failures += fail as u64;
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // frobenius is an order-5 field automorphism
    let mut fail = 0;
    for _ in 0..cases {
        let x = ctx.rand_elt(&mut rng);
        let y = ctx.rand_elt(&mut rng);
        let mut z = x;
        for _ in 0..5 {
            z = ctx.frob(z, 1);
        }
        let ok = z == x
            && ctx.frob(ctx.add(x, y), 1) == ctx.add(ctx.frob(x, 1), ctx.frob(y, 1))
            && ctx.frob(ctx.mul(x, y), 1) == ctx.mul(ctx.frob(x, 1), ctx.frob(y, 1));
        if !ok {
            fail += 1;
        }
    }
    emit("frobenius_automorphism", cases, fail);
    // trace/norm land in F_q and match the orbit sums/products
    let mut fail = 0;
    for _ in 0..cases {
        let x = ctx.rand_elt(&mut rng);
        let mut t = FFElement::ZERO;
        let mut n = ctx.one();
        for i in 0..5 {
            t = ctx.add(t, ctx.frob(x, i));
            n = ctx.mul(n, ctx.frob(x, i));
        }
        if x.is_zero() {
            n = FFElement::ZERO;
        }
        if t != ctx.trace(x) || n != ctx.norm(x) || !ctx.in_fq(t) || !ctx.in_fq(n) {
            fail += 1;
        }
    }
    emit("trace_norm", cases, fail);
    // scattered <=> maximum size, polynomials and pairs
    let mut scratch = ScatterScratch::new(ctx);
    let mut fail = 0;
    for _ in 0..cases {
        let f = loop {
            let coeffs: msls5::gfield::Vec5 = core::array::from_fn(|_| ctx.rand_elt(&mut rng));
            let f = LinearizedPoly::new(coeffs);
            if !f.is_zero() {
                break f;
            }
        };
        let fast = scatter_check(ctx, &f, &mut scratch).unwrap().is_scattered();
        let set = LinearSet::of_poly(ctx, &f);
        if fast != set.is_scattered() || fast != (set.size() == ctx.coset_count() as usize) {
            fail += 1;
        }
        let (ker, _) = f.kernel(ctx);
        if f.dickson_rank(ctx) + ker.len() != 5 {
            fail += 1;
        }
        if LinearSet::of_poly(ctx, &f.adjoint(ctx)) != set {
            fail += 1;
        }
    }
    emit("scatter_size_dickson_adjoint", cases, fail);
    // criterion vs direct scatteredness for L_{α,β,s}
    let mut fail = 0;
    for _ in 0..cases {
        let alpha = ctx.rand_elt(&mut rng);
        let beta = ctx.rand_elt(&mut rng);
        if alpha.is_zero() && beta.is_zero() {
            continue;
        }
        let s = 1 + (rng.random::<u64>() % 4) as usize;
        let preds = alpha_beta_predicates(ctx, alpha, beta, s);
        let (g, h) = alpha_beta_pair(ctx, alpha, beta, s);
        let direct = scatter_check_pair(ctx, &g, &h, &mut scratch)
            .unwrap()
            .is_scattered();
        if preds.scattered_by_criterion != direct {
            fail += 1;
        }
    }
    emit("ab_criterion_vs_direct", cases, fail);
    // classification is generator independent on Γ_{f0} planes
    let mut fail = 0;
    let trials = (cases / 20).max(3);
    for _ in 0..trials {
        let a2 = ctx.rand_elt(&mut rng);
        let a3 = ctx.rand_elt(&mut rng);
        let a4 = ctx.rand_elt(&mut rng);
        let gamma = gamma_from_poly(ctx, a2, a3, a4);
        let classes: Vec<ConfigClass> = (1..5)
            .map(|s| {
                let m = SubgeometryModel::moore(ctx, s);
                classify(ctx, &m, &gamma).unwrap().class
            })
            .collect();
        if classes[1..].iter().any(|c| *c != classes[0]) {
            fail += 1;
        }
        // projections match the polynomial
        let m = SubgeometryModel::moore(ctx, 1);
        match project_sigma(ctx, &m, &gamma).unwrap() {
            SigmaProjection::Set { set, .. } => {
                if set != LinearSet::of_poly(ctx, &f0_poly(ctx, a2, a3, a4)) {
                    fail += 1;
                }
            }
            SigmaProjection::MeetsSigma(_) => fail += 1,
        }
    }
    emit("classify_generator_invariance", trials, fail);
    // rank-4/4 synthetic round trip
    let mut fail = 0;
    let mut done = 0;
    while done < trials {
        let w = ctx.rand_nonzero(&mut rng);
        if !ctx.trace(w).is_zero() {
            continue;
        }
        done += 1;
        let ok = (|| -> Option<bool> {
            let syn = synth_rank44(ctx, ctx.one(), w).ok()?;
            let ex = extract(ctx, &syn.model, &syn.gamma).ok()?;
            let form = rk44_extract(ctx, &syn.model, &ex).ok()?;
            Some(form.lambda_is_one)
        })();
        if ok != Some(true) {
            fail += 1;
        }
    }
    emit("rank44_round_trip", trials, fail);
    // witness-existence solves on all valid pairs for s = 1
    let mut fail = 0;
    let mut n = 0;
    for (d, e) in valid_pairs(ctx) {
        n += 1;
        match sctness_solve(ctx, d, e, 1) {
            Ok(SctnessOutcome::Witness(x)) => {
                if !verify_sctness_witness(ctx, d, e, 1, x) {
                    fail += 1;
                }
            }
            _ => fail += 1,
        }
    }
    emit("witness_table_s1", n, fail);
    // uab projections are consistent with the small-q classification
    let mut fail = 0;
    for _ in 0..trials {
        let a: [FFElement; 3] = core::array::from_fn(|_| ctx.rand_elt(&mut rng));
        let b: [FFElement; 3] = core::array::from_fn(|_| ctx.rand_elt(&mut rng));
        match uab_projection(ctx, &a, &b) {
            Ok(res) => {
                if res.set.rank == 5 && res.set.is_scattered() {
                    let gamma = msls5::config::gamma_of_columns(ctx, &res.cols);
                    if let Ok(gamma) = gamma {
                        let m = SubgeometryModel::rational(ctx, 1);
                        match classify(ctx, &m, &gamma) {
                            Ok(rep) if rep.class == ConfigClass::NewCandidate => fail += 1,
                            Ok(_) => {}
                            Err(_) => fail += 1,
                        }
                    }
                }
            }
            Err(msls5::config::ConfigError::MZero) => {}
            Err(_) => fail += 1,
        }
    }
    emit("uab_consistency", trials, fail);
    failures
}
