use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use serde_json::{json, Value};

use tq_core::bounds::{curve, theorem_pipeline, BoundProfile, Claim, CurveMode, PipelineInput, Verdict};
use tq_core::catalog::{
    builtin_degeneration, by_name, expand_rank_expression, named_degenerations, rank_expression_tp_shifted,
    structural_tensor, TpField,
};
use tq_core::construct::{check_sumfree, extract_sumfree, sumfree_bound, Phase1, SumFreeSet};
use tq_core::degeneration::{transfer_independent, verify_degeneration, MonomialDegeneration};
use tq_core::io::{
    degeneration_from_json, kill_sets_from_json, kill_sets_to_json, rank_expression_to_json, read_json,
    tensor_from_json, tensor_to_json,
};
use tq_core::tensor::{max_independent_oracle, tensor_power, KillSets, Tensor};
use tq_core::{Error, Result};

use crate::{Artifact, Ctx, PipelineArgs, RingChoice};

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

/// Strips the envelope fields so a document can be nested.
fn bare(mut v: Value) -> Value {
    if let Some(m) = v.as_object_mut() {
        m.remove("schema");
        m.remove("kind");
    }
    v
}

pub enum Source {
    File(PathBuf),
    Builtin(String, usize),
}

impl Source {
    /// A path that exists, otherwise `family:q`.
    fn parse(spec: &str) -> Result<Source> {
        if Path::new(spec).exists() {
            return Ok(Source::File(spec.into()));
        }
        let (family, q) = spec
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("{spec:?} is neither a file nor FAMILY:Q")))?;
        let q = q.parse().map_err(|_| Error::InvalidArgument(format!("bad q in {spec:?}")))?;
        Ok(Source::Builtin(family.to_string(), q))
    }

    fn describe(&self) -> Value {
        match self {
            Source::File(p) => json!({"file": p.display().to_string()}),
            Source::Builtin(f, q) => json!({"builtin": f, "q": q}),
        }
    }

    fn load(&self) -> Result<MonomialDegeneration> {
        match self {
            Source::File(p) => degeneration_from_json(&read_json(p)?),
            Source::Builtin(f, q) => builtin_degeneration(f, *q),
        }
    }
}

fn load_tensor(spec: &str) -> Result<Tensor> {
    if Path::new(spec).exists() {
        tensor_from_json(&read_json(Path::new(spec))?)
    } else {
        by_name(spec)
    }
}

fn load_kills(path: &Path) -> Result<KillSets> {
    kill_sets_from_json(&read_json(path)?)
}

/// Kill sets keeping a maximum induced independent subset.
fn oracle_kills(t: &Tensor, ctx: &Ctx) -> Result<KillSets> {
    let best = max_independent_oracle(t, ctx.oracle_cap)?;
    Ok(KillSets::keeping(t, &best.triples))
}

pub fn catalog_show(name: &str) -> Result<Artifact> {
    let t = by_name(name)?;
    Ok(Artifact::ok("tensor", tensor_to_json(&t)))
}

pub fn catalog_list() -> Result<Artifact> {
    let tensors = json!([
        {"name": "T<q>", "description": "structural tensor of Z_q"},
        {"name": "CW<q>", "description": "rotated Coppersmith-Winograd tensor, inside a relabelled T_{q+2}"},
        {"name": "C<q>", "description": "Coppersmith-Winograd tensor"},
        {"name": "S<q>", "description": "Strassen tensor"},
        {"name": "MM(n,m,p)", "description": "matrix multiplication tensor <n,m,p>"},
    ]);
    let degenerations: Vec<Value> = named_degenerations()?
        .iter()
        .map(|nd| {
            let verified = verify_degeneration(&nd.degeneration).map(|r| r.verified).unwrap_or(false);
            json!({"name": nd.name, "family": to_value(&nd.family), "q": nd.q, "verified": verified})
        })
        .collect();
    Ok(Artifact::ok("catalog", json!({"tensors": tensors, "degenerations": degenerations})))
}

pub fn verify_degen(src: Source) -> Result<Artifact> {
    let d = src.load()?;
    let report = verify_degeneration(&d)?;
    let ok = report.verified;
    Ok(Artifact::checked("degeneration-report", json!({"source": src.describe(), "report": to_value(&report)}), ok))
}

pub fn verify_rank_expr(p: usize, ring: RingChoice, z_offset: i64, emit: bool) -> Result<Artifact> {
    let field = match ring {
        RingChoice::Cyclotomic => TpField::Cyclotomic,
        RingChoice::Prime => TpField::Prime,
    };
    let r = rank_expression_tp_shifted(p, field, z_offset)?;
    let e = expand_rank_expression(&r)?;
    let want: Tensor = structural_tensor(p, z_offset)?.to_ring(&r.ring)?;
    let equal = e.order == 0 && e.tensor == want;
    let mut body = json!({
        "p": p,
        "ring": to_value(&r.ring),
        "z_offset": z_offset,
        "rank": r.rank(),
        "terms": want.len(),
        "expansion_equals_tensor": equal,
    });
    if emit {
        body["expression"] = bare(rank_expression_to_json(&r));
    }
    Ok(Artifact::checked("rank-expression-report", body, equal))
}

pub fn power(spec: &str, n: usize, ctx: &Ctx) -> Result<Artifact> {
    let t = load_tensor(spec)?;
    Ok(Artifact::ok("tensor", tensor_to_json(&tensor_power(&t, n, ctx.power_cap)?)))
}

#[allow(clippy::too_many_arguments)]
pub fn construct(
    q: usize,
    m: usize,
    n: usize,
    seed: u64,
    modulus: Option<u64>,
    emit_kills: bool,
    seeds: Option<u64>,
    ctx: &Ctx,
) -> Result<Artifact> {
    let phase1 = Phase1::new(q, m, n)?;
    if let Some(count) = seeds {
        if count == 0 {
            return Err(Error::InvalidArgument("--seeds must be positive".into()));
        }
        let mut runs = Vec::new();
        let mut best = (0u64, seed);
        let mut total = 0u64;
        for s in seed..seed + count {
            let r = phase1.run(s, modulus)?;
            if r.phase3_triples > best.0 {
                best = (r.phase3_triples, s);
            }
            total += r.phase3_triples;
            runs.push(json!({"seed": s, "phase3_triples": r.phase3_triples, "pair_bound": r.pair_bound}));
        }
        let body = json!({
            "balance": to_value(&phase1.balance),
            "modulus": modulus.unwrap_or_else(|| phase1.default_modulus()),
            "first_seed": seed,
            "seeds": count,
            "runs": runs,
            "best": best.0,
            "best_seed": best.1,
            "mean": total as f64 / count as f64,
        });
        return Ok(Artifact::ok("construction-sweep", body));
    }
    let r = phase1.run(seed, modulus)?;
    let mut body = to_value(&r);
    if emit_kills {
        body["kills"] = bare(kill_sets_to_json(&r.kill_sets(ctx.power_cap)?));
    }
    Ok(Artifact::ok("construction", body))
}

pub fn transfer(degen: &str, n: usize, kills: Option<&Path>, ctx: &Ctx) -> Result<Artifact> {
    let src = Source::parse(degen)?;
    let d = src.load()?;
    let (small_kills, kills_source) = match kills {
        Some(p) => (load_kills(p)?, json!({"file": p.display().to_string()})),
        None => (oracle_kills(&tensor_power(&d.small, n, ctx.power_cap)?, ctx)?, json!("oracle")),
    };
    let tr = transfer_independent(&d, n, &small_kills, ctx.power_cap)?;
    let ok = tr.layers.pigeonhole_holds() && tr.triples.is_independent();
    let body = json!({
        "degeneration": src.describe(),
        "n": n,
        "kills_source": kills_source,
        "input_count": tr.layers.input_count,
        "count": tr.triples.len(),
        "pigeonhole_holds": tr.layers.pigeonhole_holds(),
        "layers": to_value(&tr.layers),
        "triples": to_value(&tr.triples),
        "kills": bare(kill_sets_to_json(&tr.kills)),
    });
    Ok(Artifact::checked("transfer", body, ok))
}

fn sumfree_body(s: &SumFreeSet, sumfree: bool, ctx: &Ctx) -> Result<(Value, bool)> {
    let bound = sumfree_bound(s, ctx.prec)?;
    let ok = sumfree && (bound.within || !bound.rigorous);
    let mut body = to_value(s);
    body["size"] = json!(s.len());
    body["sumfree"] = json!(sumfree);
    body["bound"] = to_value(&bound);
    Ok((body, ok))
}

pub fn sumfree_check(file: &Path, ctx: &Ctx) -> Result<Artifact> {
    let v = read_json(file)?;
    tq_core::io::check_envelope(&v, "sumfree-set")?;
    let s: SumFreeSet = serde_json::from_value(v)?;
    let sumfree = check_sumfree(&s)?;
    let (body, ok) = sumfree_body(&s, sumfree, ctx)?;
    Ok(Artifact::checked("sumfree-set", body, ok))
}

pub fn sumfree_extract(p: usize, n: usize, kills: &Path, ctx: &Ctx) -> Result<Artifact> {
    let s = extract_sumfree(p, n, &load_kills(kills)?, ctx.power_cap)?;
    let (body, ok) = sumfree_body(&s, true, ctx)?;
    Ok(Artifact::checked("sumfree-set", body, ok))
}

fn high_precision(p: &BoundProfile) -> Value {
    let d = p.digits as usize;
    json!({
        "rho": p.rho.as_ref().map(|r| r.digits(d)),
        "gamma": p.gamma.digits(d),
        "c": p.c.digits(d),
        "omega_lb_eps1": p.omega_lb_eps1.digits(d),
        "alpha_ub": p.alpha_ub.digits(d),
    })
}

pub fn bounds_profile(q: u64, ctx: &Ctx) -> Result<Artifact> {
    let p = BoundProfile::new(q, ctx.prec)?;
    let mut body = to_value(&p);
    body["decimal"] = high_precision(&p);
    Ok(Artifact::ok("bound-profile", body))
}

pub fn bounds_curve(qmin: u64, qmax: u64, mode: CurveMode, eps: &[f64], csv: bool, ctx: &Ctx) -> Result<Artifact> {
    let c = curve(qmin, qmax, mode, eps, ctx.prec)?;
    let mut a = Artifact::ok("bound-curve", to_value(&c));
    if csv {
        a.csv = Some(c.to_csv());
    }
    Ok(a)
}

pub enum PipelineError {
    Usage(String),
    Core(Error),
}

impl From<Error> for PipelineError {
    fn from(e: Error) -> Self {
        PipelineError::Core(e)
    }
}

fn big(s: &str, name: &str) -> std::result::Result<BigUint, PipelineError> {
    s.parse().map_err(|_| PipelineError::Usage(format!("--{name} must be a non-negative integer, got {s:?}")))
}

pub fn pipeline(a: &PipelineArgs, ctx: &Ctx) -> std::result::Result<Artifact, PipelineError> {
    let claim = match (&a.f, &a.g, &a.omega) {
        (Some(f), Some(g), None) => Some(Claim::Finite { f: big(f, "F")?, g: big(g, "G")? }),
        (None, None, Some(w)) => Some(Claim::Asymptotic { omega: w.clone() }),
        (None, None, None) => None,
        _ => return Err(PipelineError::Usage("give either --F and --G, or --omega".into())),
    };
    let chain = match (&a.degen, &a.kills) {
        (None, None) => None,
        (degen, kills) => {
            let d = match degen {
                Some(spec) => Source::parse(spec)?.load()?,
                None => MonomialDegeneration::identity(&structural_tensor(a.p as usize, 0)?),
            };
            let k = match kills {
                Some(p) => load_kills(p)?,
                None => oracle_kills(&tensor_power(&d.small, a.n_power, ctx.power_cap)?, ctx)?,
            };
            Some((d, k))
        }
    };
    if claim.is_none() && chain.is_none() {
        return Err(PipelineError::Usage("nothing to check: give a claim (--F/--G or --omega) or a chain (--kills/--degen)".into()));
    }
    let input = PipelineInput {
        p: a.p,
        eps: a.eps,
        n: a.n_power,
        claim,
        chain,
        power_cap: ctx.power_cap,
        oracle_cap: ctx.oracle_cap,
        precision: ctx.prec,
    };
    let r = theorem_pipeline(&input)?;
    let ok = matches!(r.verdict, Verdict::Consistent | Verdict::Degenerate);
    Ok(Artifact::checked("pipeline-report", to_value(&r), ok))
}
