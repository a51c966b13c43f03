//! Consistency check of a claimed exponent bound against the sum-free
//! lower bound, optionally replaying the full zeroing chain.

use num_bigint::BigUint;
use rug::Float;
use serde::Serialize;

use super::{gamma, is_prime_power, schonhage_bound, Precision, Real};
use crate::catalog::structural_tensor;
use crate::construct::{matmul_copies, read_sumfree, sumfree_bound, SumFreeBound, SumFreeSet};
use crate::degeneration::{transfer_independent, verify_degeneration, LayerReport, MonomialDegeneration};
use crate::error::{Error, Result};
use crate::tensor::{max_independent_oracle, tensor_power, zero_out, KillSets, Tensor, Triple};

/// What the caller claims about `T^{⊗N}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Claim {
    /// `T^{⊗N}` zeroes out into `f` copies of `⟨g, g^ε, g⟩`.
    Finite { f: BigUint, g: BigUint },
    /// A limiting exponent, compared with no finite-`N` slack.
    Asymptotic { omega: String },
}

#[derive(Clone, Debug)]
pub struct PipelineInput {
    pub p: u64,
    pub eps: f64,
    pub n: usize,
    pub claim: Option<Claim>,
    /// A degeneration of `T_p` into `T` and kill sets on `T^{⊗N}`.
    pub chain: Option<(MonomialDegeneration, KillSets)>,
    pub power_cap: u128,
    pub oracle_cap: usize,
    pub precision: Precision,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Consistent,
    Inconsistent,
    /// `G = 1`: no exponent is defined.
    Degenerate,
    SumFreeBoundViolated,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub copies: usize,
    pub dims: (usize, usize, usize),
    /// Independent triples selected inside the copies.
    pub independent_in_t: usize,
    pub layers: LayerReport,
    pub pigeonhole_holds: bool,
    pub transferred: usize,
    pub sumfree: SumFreeSet,
    pub sumfree_bound: SumFreeBound,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub p: u64,
    pub eps: f64,
    pub n: usize,
    pub mode: &'static str,
    pub f: Option<String>,
    pub g: Option<String>,
    pub omega_prime: Option<Real>,
    /// `(1+ε) ln p / γ_p`.
    pub bound: Real,
    /// `ln(N²) / (N ln G)` in finite mode, 0 otherwise.
    pub slack: Option<Real>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
    pub chain: Option<ChainReport>,
}

fn sub_tensor(parent: &Tensor, triples: &[Triple]) -> Result<Tensor> {
    let uniq = |f: fn(&Triple) -> &crate::tensor::Label| {
        let mut v: Vec<_> = triples.iter().map(f).cloned().collect();
        v.sort();
        v.dedup();
        v
    };
    let mut t = Tensor::new(parent.ring().clone(), uniq(|t| &t.x), uniq(|t| &t.y), uniq(|t| &t.z))?;
    for tr in triples {
        let c = parent.coeff(tr).expect("block term comes from the parent").clone();
        t.insert(tr.clone(), c)?;
    }
    Ok(t)
}

fn run_chain(input: &PipelineInput, d: &MonomialDegeneration, kills: &KillSets) -> Result<(ChainReport, u64, u64)> {
    let p = input.p as usize;
    if !verify_degeneration(d)?.verified {
        return Err(Error::Structural("the supplied degeneration does not verify".into()));
    }
    let support = d.big.support();
    let z_offset = (0..p as i64)
        .find(|&off| structural_tensor(p, off).map(|t| t.support() == support).unwrap_or(false))
        .ok_or_else(|| Error::Structural(format!("the degeneration does not start from T_{p}")))?;
    let t_n = tensor_power(&d.small, input.n, input.power_cap)?;
    let zeroed = zero_out(&t_n, kills)?;
    let copies = matmul_copies(&zeroed)?;
    let dims = copies.first().map(|c| c.dims).ok_or_else(|| Error::Structural("zeroing leaves no terms".into()))?;
    if copies.iter().any(|c| c.dims != dims) {
        return Err(Error::Structural("copies have different shapes".into()));
    }
    let (g, m, g2) = dims;
    if g != g2 {
        return Err(Error::Structural(format!("copies are ⟨{g},{m},{g2}⟩, not square in the outer dimensions")));
    }
    let expected_m = (g as f64).powf(input.eps);
    if (expected_m - m as f64).abs() > 1e-9 {
        return Err(Error::Structural(format!("middle dimension {m} is not {g}^{}", input.eps)));
    }

    let mut chosen = Vec::new();
    for copy in &copies {
        let block = sub_tensor(&zeroed, &copy.triples)?;
        chosen.extend(max_independent_oracle(&block, input.oracle_cap)?.triples);
    }
    let t_kills = KillSets::keeping(&t_n, &chosen);
    let independent = zero_out(&t_n, &t_kills)?;
    if !independent.is_independent() || independent.len() != chosen.len() {
        return Err(Error::NotIndependent("selection inside the copies is not a zeroing".into()));
    }
    let transfer = transfer_independent(d, input.n, &t_kills, input.power_cap)?;
    let sumfree = read_sumfree(&transfer.power.big, p, input.n, z_offset, &transfer.kills)?;
    let bound = sumfree_bound(&sumfree, input.precision)?;
    let report = ChainReport {
        copies: copies.len(),
        dims,
        independent_in_t: chosen.len(),
        pigeonhole_holds: transfer.layers.pigeonhole_holds(),
        layers: transfer.layers,
        transferred: transfer.triples.len(),
        sumfree,
        sumfree_bound: bound,
    };
    Ok((report, copies.len() as u64, g as u64))
}

/// Compares the exponent a zeroing would give with `(1+ε) ln p / γ_p`.
///
/// In finite mode `ω' = log_G ⌈p^N / F⌉` is checked against the bound less
/// the slack `ln(N²)/(N ln G)`. With a chain, `F` and `G` are read off the
/// zeroing itself and the independent triples are carried back to
/// `T_p^{⊗N}`, where they must form a sum-free set of size at most `c_p^N`.
pub fn theorem_pipeline(input: &PipelineInput) -> Result<PipelineReport> {
    let prec = input.precision;
    if input.p < 2 || input.n < 1 {
        return Err(Error::InvalidArgument("need p >= 2 and N >= 1".into()));
    }
    if !(input.eps > 0.0 && input.eps <= 1.0) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0,1], got {}", input.eps)));
    }
    let g_p = gamma(input.p, is_prime_power(input.p), prec)?;
    let bound = super::omega_from_gamma(input.p, &g_p, input.eps, prec);
    let mut notes = Vec::new();
    let mut chain = None;
    let mut claim = input.claim.clone();
    if let Some((d, kills)) = &input.chain {
        let (report, f, g) = run_chain(input, d, kills)?;
        let derived = Claim::Finite { f: f.into(), g: g.into() };
        match &claim {
            Some(c) if *c != derived => {
                return Err(Error::Structural(format!("claimed {c:?} but the zeroing gives {derived:?}")));
            }
            _ => claim = Some(derived),
        }
        chain = Some(report);
    }
    let claim = claim.ok_or_else(|| Error::InvalidArgument("need F and G, a claimed exponent, or kill sets".into()))?;

    let mut report = PipelineReport {
        p: input.p,
        eps: input.eps,
        n: input.n,
        mode: "finite",
        f: None,
        g: None,
        omega_prime: None,
        bound: Real(bound.clone()),
        slack: None,
        verdict: Verdict::Consistent,
        notes: Vec::new(),
        chain: None,
    };
    match claim {
        Claim::Asymptotic { omega } => {
            report.mode = "asymptotic";
            let parsed = Float::parse(&omega).map_err(|_| Error::InvalidArgument(format!("bad exponent {omega:?}")))?;
            let w = Float::with_val(prec.bits(), parsed);
            report.verdict = if w >= bound { Verdict::Consistent } else { Verdict::Inconsistent };
            report.omega_prime = Some(Real(w));
            report.slack = Some(Real(prec.float(0)));
        }
        Claim::Finite { f, g } => {
            report.f = Some(f.to_string());
            report.g = Some(g.to_string());
            let rank = BigUint::from(input.p).pow(input.n as u32);
            if g < BigUint::from(2u32) {
                report.verdict = Verdict::Degenerate;
                notes.push("G = 1: log base 1 is undefined, no exponent bound follows".into());
            } else if f > rank {
                return Err(Error::InvalidArgument(format!("F = {f} exceeds p^N = {rank}")));
            } else {
                let w = schonhage_bound(&f, &g, input.eps, &rank, prec)?;
                let n = prec.float(input.n as f64);
                let ln_g = Float::with_val(prec.bits(), Float::parse(g.to_string()).expect("integer parses")).ln();
                let slack = Float::with_val(prec.bits(), &n * &n).ln() / (n * ln_g);
                let threshold = Float::with_val(prec.bits(), &bound - &slack);
                report.verdict = if w >= threshold { Verdict::Consistent } else { Verdict::Inconsistent };
                report.omega_prime = Some(Real(w));
                report.slack = Some(Real(slack));
            }
        }
    }
    if let Some(c) = &chain {
        if c.sumfree_bound.rigorous && !c.sumfree_bound.within {
            report.verdict = Verdict::SumFreeBoundViolated;
            notes.push(format!("sum-free set of size {} exceeds c_p^N", c.sumfree.len()));
        }
        if !c.sumfree_bound.rigorous {
            notes.push("c_p^N is only an asymptotic bound for non-prime-power p".into());
        }
    }
    report.notes = notes;
    report.chain = chain;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::cw_degeneration;
    use crate::tensor::{DEFAULT_ORACLE_CAP, DEFAULT_POWER_CAP};

    fn input(p: u64, n: usize, claim: Option<Claim>) -> PipelineInput {
        PipelineInput {
            p,
            eps: 1.0,
            n,
            claim,
            chain: None,
            power_cap: DEFAULT_POWER_CAP,
            oracle_cap: DEFAULT_ORACLE_CAP,
            precision: Precision::default(),
        }
    }

    #[test]
    fn trivial_copy_is_degenerate() {
        let r = theorem_pipeline(&input(2, 1, Some(Claim::Finite { f: 1u32.into(), g: 1u32.into() }))).unwrap();
        assert_eq!(r.verdict, Verdict::Degenerate);
        assert!(r.omega_prime.is_none());
    }

    #[test]
    fn small_n_slack() {
        let r = theorem_pipeline(&input(2, 2, Some(Claim::Finite { f: 1u32.into(), g: 2u32.into() }))).unwrap();
        assert_eq!(r.verdict, Verdict::Consistent);
        assert!((r.omega_prime.unwrap().to_f64() - 2.0).abs() < 1e-15);
        assert!((r.slack.unwrap().to_f64() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn asymptotic_claim_below_bound() {
        let r = theorem_pipeline(&input(7, 1, Some(Claim::Asymptotic { omega: "2.10".into() }))).unwrap();
        assert_eq!(r.verdict, Verdict::Inconsistent);
        let r = theorem_pipeline(&input(7, 1, Some(Claim::Asymptotic { omega: "2.15".into() }))).unwrap();
        assert_eq!(r.verdict, Verdict::Consistent);
    }

    #[test]
    fn chain_through_cw1() {
        let d = cw_degeneration(1).unwrap();
        let mut inp = input(3, 1, None);
        inp.chain = Some((d, KillSets::default()));
        // CW_1 itself is not a disjoint union of matrix products
        assert!(matches!(theorem_pipeline(&inp), Err(Error::Structural(_))));
        let cw = cw_degeneration(1).unwrap().small;
        let best = max_independent_oracle(&cw, DEFAULT_ORACLE_CAP).unwrap();
        inp.chain = Some((cw_degeneration(1).unwrap(), KillSets::keeping(&cw, &best.triples)));
        let r = theorem_pipeline(&inp).unwrap();
        let c = r.chain.unwrap();
        assert_eq!(c.dims, (1, 1, 1));
        assert_eq!(c.copies, best.len());
        assert!(c.sumfree_bound.within && c.pigeonhole_holds);
        assert_eq!(r.verdict, Verdict::Degenerate);
    }
}
