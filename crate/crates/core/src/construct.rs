//! Independent triples inside powers of `⟨q, m, q⟩`, progression-free
//! residue sets, and tri-colored sum-free sets read off independent
//! zeroings of `T_p^{⊗N}`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{c_q, is_prime_power, Precision, Real};
use crate::catalog::{matmul_tensor, structural_tensor};
use crate::error::{Error, Result};
use crate::scalar::is_prime;
use crate::tensor::{tensor_power, zero_out, KillSets, Label, Tensor, Triple, TripleRole, TripleSet};

/// Largest modulus searched exhaustively by default.
pub const DEFAULT_BRUTEFORCE_MAX: u64 = 31;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SalemSpencerMode {
    Bruteforce,
    Greedy,
}

fn require_odd_prime(m: u64) -> Result<()> {
    if m % 2 == 1 && is_prime(m) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("modulus {m} is not an odd prime")))
    }
}

fn half(m: u64) -> u64 {
    m.div_ceil(2)
}

/// No `a ≠ b` in `h` with `(a + b)/2 mod m` in `h`.
pub fn is_ap_free(h: &[u64], m: u64) -> bool {
    let set: BTreeSet<u64> = h.iter().map(|&a| a % m).collect();
    let inv2 = half(m);
    set.iter().all(|&a| set.iter().all(|&b| a == b || !set.contains(&((a + b) % m * inv2 % m))))
}

/// Residues that would complete a progression with `x` and some member of `set`.
fn blocked_by(x: u64, set: &[u64], m: u64) -> impl Iterator<Item = u64> + '_ {
    let inv2 = half(m);
    set.iter().flat_map(move |&s| [(x + s) % m * inv2 % m, (2 * s + m - x) % m, (2 * x + m - s) % m])
}

/// An AP-free subset of `Z_m`. Bruteforce returns a maximum one, the
/// lexicographically smallest among those; greedy scans upward.
pub fn salem_spencer(m: u64, mode: SalemSpencerMode) -> Result<Vec<u64>> {
    salem_spencer_with_limit(m, mode, DEFAULT_BRUTEFORCE_MAX)
}

pub fn salem_spencer_with_limit(m: u64, mode: SalemSpencerMode, limit: u64) -> Result<Vec<u64>> {
    require_odd_prime(m)?;
    match mode {
        SalemSpencerMode::Greedy => {
            let mut h = Vec::new();
            let mut blocked = vec![false; m as usize];
            for x in 0..m {
                if !blocked[x as usize] {
                    let marks: Vec<u64> = blocked_by(x, &h, m).collect();
                    for b in marks {
                        blocked[b as usize] = true;
                    }
                    h.push(x);
                    blocked[x as usize] = true;
                }
            }
            Ok(h)
        }
        SalemSpencerMode::Bruteforce => {
            if m > limit {
                return Err(Error::CapExceeded { what: "exhaustive Salem-Spencer search", size: m as u128, cap: limit as u128 });
            }
            let mut search = ApSearch { m, blocked: vec![0; m as usize], current: Vec::new(), best: Vec::new() };
            search.run(0);
            Ok(search.best)
        }
    }
}

struct ApSearch {
    m: u64,
    blocked: Vec<u32>,
    current: Vec<u64>,
    best: Vec<u64>,
}

impl ApSearch {
    fn run(&mut self, from: u64) {
        if self.current.len() > self.best.len() {
            self.best = self.current.clone();
        }
        let free = (from..self.m).filter(|&x| self.blocked[x as usize] == 0).count();
        if self.current.len() + free <= self.best.len() {
            return;
        }
        for x in from..self.m {
            if self.blocked[x as usize] != 0 {
                continue;
            }
            let marks: Vec<u64> = blocked_by(x, &self.current, self.m).collect();
            for &b in &marks {
                self.blocked[b as usize] += 1;
            }
            self.current.push(x);
            self.run(x + 1);
            self.current.pop();
            for &b in &marks {
                self.blocked[b as usize] -= 1;
            }
            let free = (x + 1..self.m).filter(|&y| self.blocked[y as usize] == 0).count();
            if self.current.len() + free <= self.best.len() {
                return;
            }
        }
    }
}

/// Balance counts after phase one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BalanceProfile {
    pub q: usize,
    pub m: usize,
    pub n: usize,
    /// Balanced `(i, k)` pairs.
    pub l2: u64,
    /// Balanced `(i, j)` pairs.
    pub l1eps: u64,
    /// Balanced `(j, k)` pairs.
    pub ljk: u64,
    /// Choices of `k` completing a balanced `(i, j)`.
    pub k1: u64,
    /// Choices of `j` completing a balanced `(i, k)`.
    pub keps: u64,
}

impl BalanceProfile {
    pub fn identity_holds(&self) -> bool {
        self.l2 * self.keps == self.l1eps * self.k1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HashScheme {
    pub modulus: u64,
    pub seed: u64,
    /// `w_0, …, w_n` in draw order.
    pub w: Vec<u64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PhaseCounts {
    pub terms: u64,
    pub x: u64,
    pub y: u64,
    pub z: u64,
}

/// `|S_h|` and the pairs in `S_h` sharing an `x`, `y` or `z` variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CollisionStat {
    pub h: u64,
    pub s: u64,
    pub p: u64,
    pub q: u64,
    pub r: u64,
}

/// Sequences in `[base]^n` stored as integers, digit `α` at position `α`.
fn digits(mut v: u32, base: usize, n: usize) -> Vec<u8> {
    (0..n)
        .map(|_| {
            let d = (v % base as u32) as u8;
            v /= base as u32;
            d
        })
        .collect()
}

fn encode(d: &[u8], base: usize) -> u32 {
    d.iter().rev().fold(0u32, |acc, &x| acc * base as u32 + x as u32)
}

/// All pairs `(u, v)` of sequences over `[a]^n × [b]^n` in which each of
/// the `a·b` symbol pairs occurs `n/(ab)` times.
fn balanced_pairs(a: usize, b: usize, n: usize) -> Vec<(u32, u32)> {
    let per = n / (a * b);
    let mut out = Vec::new();
    let mut counts = vec![0usize; a * b];
    let mut u = vec![0u8; n];
    let mut v = vec![0u8; n];
    fn rec(
        pos: usize,
        a: usize,
        b: usize,
        per: usize,
        counts: &mut [usize],
        u: &mut [u8],
        v: &mut [u8],
        out: &mut Vec<(u32, u32)>,
    ) {
        if pos == u.len() {
            out.push((encode(u, a), encode(v, b)));
            return;
        }
        for x in 0..a {
            for y in 0..b {
                if counts[x * b + y] < per {
                    counts[x * b + y] += 1;
                    u[pos] = x as u8;
                    v[pos] = y as u8;
                    rec(pos + 1, a, b, per, counts, u, v, out);
                    counts[x * b + y] -= 1;
                }
            }
        }
    }
    rec(0, a, b, per, &mut counts, &mut u, &mut v, &mut out);
    out
}

/// All `w ∈ [c]^n` such that both `(u, w)` and `(v, w)` are balanced.
fn completions(u: &[u8], a: usize, v: &[u8], b: usize, c: usize) -> Vec<u32> {
    let n = u.len();
    let (per_u, per_v) = (n / (a * c), n / (b * c));
    let mut out = Vec::new();
    let mut cu = vec![0usize; a * c];
    let mut cv = vec![0usize; b * c];
    let mut w = vec![0u8; n];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        pos: usize,
        u: &[u8],
        v: &[u8],
        c: usize,
        per: (usize, usize),
        cu: &mut [usize],
        cv: &mut [usize],
        w: &mut [u8],
        out: &mut Vec<u32>,
    ) {
        if pos == u.len() {
            out.push(encode(w, c));
            return;
        }
        for z in 0..c {
            let iu = u[pos] as usize * c + z;
            let iv = v[pos] as usize * c + z;
            if cu[iu] < per.0 && cv[iv] < per.1 {
                cu[iu] += 1;
                cv[iv] += 1;
                w[pos] = z as u8;
                rec(pos + 1, u, v, c, per, cu, cv, w, out);
                cu[iu] -= 1;
                cv[iv] -= 1;
            }
        }
    }
    rec(0, u, v, c, (per_u, per_v), &mut cu, &mut cv, &mut w, &mut out);
    out
}

/// The phase-one survivors of `⟨q, m, q⟩^{⊗n}`; independent of the seed,
/// so one instance serves a whole seed sweep.
#[derive(Clone, Debug)]
pub struct Phase1 {
    pub balance: BalanceProfile,
    /// Surviving terms as `(i, j, k)` sequence codes.
    terms: Vec<(u32, u32, u32)>,
    x_alive: u64,
    y_alive: u64,
    z_alive: u64,
}

impl Phase1 {
    pub fn new(q: usize, m: usize, n: usize) -> Result<Self> {
        if q < 2 || m < 1 || m > q || n < 1 {
            return Err(Error::InvalidArgument(format!("need q >= 2, 1 <= m <= q, n >= 1; got q={q} m={m} n={n}")));
        }
        if n % (q * q) != 0 || n % (q * m) != 0 {
            return Err(Error::InvalidArgument(format!("balance needs q^2 | n and q*m | n; got q={q} m={m} n={n}")));
        }
        if (q as f64).powi(n as i32) > u32::MAX as f64 {
            return Err(Error::CapExceeded { what: "index sequences", size: (q as u128).pow(n as u32), cap: u32::MAX as u128 });
        }
        let ij = balanced_pairs(q, m, n);
        let mut terms = Vec::new();
        let mut k1 = None;
        for &(i, j) in &ij {
            let ks = completions(&digits(i, q, n), q, &digits(j, m, n), m, q);
            match k1 {
                None => k1 = Some(ks.len() as u64),
                Some(k) if k != ks.len() as u64 => {
                    return Err(Error::Structural(format!("K_1 varies: {k} vs {}", ks.len())));
                }
                _ => {}
            }
            terms.extend(ks.into_iter().map(|k| (i, j, k)));
        }
        let ik = balanced_pairs(q, q, n);
        let keps = ik
            .first()
            .map(|&(i, k)| completions(&digits(i, q, n), q, &digits(k, q, n), q, m).len() as u64)
            .unwrap_or(0);
        let ljk = balanced_pairs(m, q, n).len() as u64;
        let balance = BalanceProfile {
            q,
            m,
            n,
            l2: ik.len() as u64,
            l1eps: ij.len() as u64,
            ljk,
            k1: k1.unwrap_or(0),
            keps,
        };
        Ok(Phase1 { x_alive: balance.l1eps, y_alive: ljk, z_alive: balance.l2, balance, terms })
    }

    /// Smallest odd prime at least `12 K_1`.
    pub fn default_modulus(&self) -> u64 {
        let mut m = (12 * self.balance.k1).max(3);
        while !(m % 2 == 1 && is_prime(m)) {
            m += 1;
        }
        m
    }

    fn counts(&self) -> PhaseCounts {
        PhaseCounts { terms: self.terms.len() as u64, x: self.x_alive, y: self.y_alive, z: self.z_alive }
    }

    /// Phases two and three for one seed.
    pub fn run(&self, seed: u64, modulus: Option<u64>) -> Result<ConstructionReport> {
        let b = &self.balance;
        let (q, m, n) = (b.q, b.m, b.n);
        let big_m = modulus.unwrap_or_else(|| self.default_modulus());
        require_odd_prime(big_m)?;
        let mode = if big_m <= DEFAULT_BRUTEFORCE_MAX { SalemSpencerMode::Bruteforce } else { SalemSpencerMode::Greedy };
        let h_set = salem_spencer(big_m, mode)?;
        let in_h: BTreeSet<u64> = h_set.iter().copied().collect();

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<u64> = (0..=n).map(|_| rng.gen_range(0..big_m)).collect();
        let mi = big_m as i64;
        let lin = |u: u32, ub: usize, v: u32, vb: usize| -> i64 {
            let (du, dv) = (digits(u, ub, n), digits(v, vb, n));
            (0..n).map(|a| w[a + 1] as i64 * (du[a] as i64 - dv[a] as i64)).sum::<i64>().rem_euclid(mi)
        };
        let mut hx: HashMap<(u32, u32), u64> = HashMap::new();
        let mut hy: HashMap<(u32, u32), u64> = HashMap::new();
        let mut hz: HashMap<(u32, u32), u64> = HashMap::new();
        let mut survivors = Vec::new();
        for &(i, j, k) in &self.terms {
            let x = *hx.entry((i, j)).or_insert_with(|| (2 * lin(i, q, j, m)).rem_euclid(mi) as u64);
            let y = *hy.entry((j, k)).or_insert_with(|| (2 * w[0] as i64 + 2 * lin(j, m, k, q)).rem_euclid(mi) as u64);
            let z = *hz.entry((k, i)).or_insert_with(|| (w[0] as i64 + lin(i, q, k, q)).rem_euclid(mi) as u64);
            if (x + y) % big_m != 2 * z % big_m {
                return Err(Error::Structural(format!("hash identity fails at term ({i},{j},{k})")));
            }
            if in_h.contains(&x) && in_h.contains(&y) && in_h.contains(&z) {
                if x != y || y != z {
                    return Err(Error::Structural(format!("phase-two survivor ({i},{j},{k}) has unequal hashes")));
                }
                survivors.push((i, j, k, x));
            }
        }
        let alive = |h: &HashMap<(u32, u32), u64>| h.values().filter(|v| in_h.contains(v)).count() as u64;
        let phase2 = PhaseCounts { terms: survivors.len() as u64, x: alive(&hx), y: alive(&hy), z: alive(&hz) };

        let mut cx: HashMap<(u32, u32), u64> = HashMap::new();
        let mut cy: HashMap<(u32, u32), u64> = HashMap::new();
        let mut cz: HashMap<(u32, u32), u64> = HashMap::new();
        for &(i, j, k, _) in &survivors {
            *cx.entry((i, j)).or_default() += 1;
            *cy.entry((j, k)).or_default() += 1;
            *cz.entry((k, i)).or_default() += 1;
        }
        let mut stats: BTreeMap<u64, CollisionStat> =
            h_set.iter().map(|&h| (h, CollisionStat { h, s: 0, p: 0, q: 0, r: 0 })).collect();
        let pairs = |c: u64| c * c.saturating_sub(1) / 2;
        for &(_, _, _, h) in &survivors {
            stats.get_mut(&h).expect("survivor hash lies in H").s += 1;
        }
        for (key, &c) in &cx {
            stats.get_mut(&hx[key]).expect("in H").p += pairs(c);
        }
        for (key, &c) in &cy {
            stats.get_mut(&hy[key]).expect("in H").q += pairs(c);
        }
        for (key, &c) in &cz {
            stats.get_mut(&hz[key]).expect("in H").r += pairs(c);
        }

        let kept: Vec<(u32, u32, u32)> = survivors
            .iter()
            .filter(|&&(i, j, k, _)| cx[&(i, j)] == 1 && cy[&(j, k)] == 1 && cz[&(k, i)] == 1)
            .map(|&(i, j, k, _)| (i, j, k))
            .collect();
        let lower_bound: i64 = stats.values().map(|s| s.s as i64 - 2 * (s.p + s.q + s.r) as i64).sum();
        if (kept.len() as i64) < lower_bound {
            return Err(Error::Structural("phase three kept fewer terms than the pair-counting bound".into()));
        }

        let labels = Labeller { q, m, n };
        let triples: Vec<Triple> = kept.iter().map(|&(i, j, k)| labels.triple(i, j, k)).collect();
        let result = TripleSet { role: TripleRole::Independent, triples };
        if !result.is_independent() {
            return Err(Error::NotIndependent("phase-three output shares a variable".into()));
        }
        Ok(ConstructionReport {
            balance: self.balance.clone(),
            hash: HashScheme { modulus: big_m, seed, w },
            salem_spencer: h_set,
            salem_spencer_mode: mode,
            phase1_survivors: self.counts(),
            phase2_survivors: phase2,
            phase3_triples: kept.len() as u64,
            pair_bound: lower_bound,
            collision_stats: stats.into_values().collect(),
            result,
            kept,
        })
    }
}

/// Labels of `⟨q, m, q⟩^{⊗n}` as produced by `matmul_tensor` and `tensor_power`.
#[derive(Clone, Copy)]
struct Labeller {
    q: usize,
    m: usize,
    n: usize,
}

impl Labeller {
    fn var(&self, u: u32, ub: usize, v: u32, vb: usize) -> Label {
        let (du, dv) = (digits(u, ub, self.n), digits(v, vb, self.n));
        let coords: Vec<Label> = du.iter().zip(&dv).map(|(a, b)| Label::Name(format!("{a},{b}"))).collect();
        if self.n == 1 {
            coords.into_iter().next().expect("one coordinate")
        } else {
            Label::Tuple(coords)
        }
    }

    fn triple(&self, i: u32, j: u32, k: u32) -> Triple {
        let (q, m) = (self.q, self.m);
        Triple::new(self.var(i, q, j, m), self.var(j, m, k, q), self.var(k, q, i, q))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstructionReport {
    pub balance: BalanceProfile,
    pub hash: HashScheme,
    pub salem_spencer: Vec<u64>,
    pub salem_spencer_mode: SalemSpencerMode,
    pub phase1_survivors: PhaseCounts,
    pub phase2_survivors: PhaseCounts,
    pub phase3_triples: u64,
    /// `Σ_h |S_h| - 2(|P_h| + |Q_h| + |R_h|)`, a floor for `phase3_triples`.
    pub pair_bound: i64,
    pub collision_stats: Vec<CollisionStat>,
    pub result: TripleSet,
    #[serde(skip)]
    kept: Vec<(u32, u32, u32)>,
}

impl ConstructionReport {
    /// The zeroing of `⟨q,m,q⟩^{⊗n}` keeping only the result's variables.
    pub fn kill_sets(&self, cap: u128) -> Result<KillSets> {
        let b = &self.balance;
        let (q, m, n) = (b.q, b.m, b.n);
        let size = ((q * m) as u128).pow(n as u32).max((q * q) as u128).pow(1);
        if size > cap {
            return Err(Error::CapExceeded { what: "kill-set listing", size, cap });
        }
        let labels = Labeller { q, m, n };
        let xs: BTreeSet<(u32, u32)> = self.kept.iter().map(|&(i, j, _)| (i, j)).collect();
        let ys: BTreeSet<(u32, u32)> = self.kept.iter().map(|&(_, j, k)| (j, k)).collect();
        let zs: BTreeSet<(u32, u32)> = self.kept.iter().map(|&(i, _, k)| (k, i)).collect();
        let all = |a: usize, b: usize, alive: &BTreeSet<(u32, u32)>| -> BTreeSet<Label> {
            let (na, nb) = (a.pow(n as u32) as u32, b.pow(n as u32) as u32);
            (0..na)
                .flat_map(|u| (0..nb).map(move |v| (u, v)))
                .filter(|p| !alive.contains(p))
                .map(|(u, v)| labels.var(u, a, v, b))
                .collect()
        };
        Ok(KillSets { x: all(q, m, &xs), y: all(m, q, &ys), z: all(q, q, &zs) })
    }

    /// Rebuilds `⟨q,m,q⟩^{⊗n}`, applies [`Self::kill_sets`] and checks that
    /// exactly the result survives and is independent.
    pub fn verify_against_tensor(&self, cap: u128) -> Result<bool> {
        let b = &self.balance;
        let t = tensor_power(&matmul_tensor(b.q, b.m, b.q)?, b.n, cap)?;
        let z = zero_out(&t, &self.kill_sets(cap)?)?;
        let survivors: BTreeSet<&Triple> = z.terms().map(|(t, _)| t).collect();
        let expected: BTreeSet<&Triple> = self.result.triples.iter().collect();
        Ok(survivors == expected && z.is_independent())
    }
}

/// One run of the three-phase construction on `⟨q, m, q⟩^{⊗n}`.
pub fn build_independent(q: usize, m: usize, n: usize, seed: u64, modulus: Option<u64>) -> Result<ConstructionReport> {
    Phase1::new(q, m, n)?.run(seed, modulus)
}

/// Triples in `(Z_q^n)^3`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumFreeSet {
    pub q: u64,
    pub n: usize,
    pub triples: Vec<[Vec<u64>; 3]>,
}

impl SumFreeSet {
    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    fn validate(&self) -> Result<()> {
        if self.q < 2 {
            return Err(Error::InvalidArgument(format!("group order must be at least 2, got {}", self.q)));
        }
        for t in &self.triples {
            for e in t {
                if e.len() != self.n || e.iter().any(|&c| c >= self.q) {
                    return Err(Error::InvalidArgument(format!("{e:?} is not an element of Z_{}^{}", self.q, self.n)));
                }
            }
        }
        Ok(())
    }
}

fn neg_sum(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| (2 * q - x - y) % q).collect()
}

/// `a_i + b_j + c_k = 0` exactly when `i = j = k`.
pub fn check_sumfree(s: &SumFreeSet) -> Result<bool> {
    s.validate()?;
    let mut by_c: HashMap<&[u64], Vec<usize>> = HashMap::new();
    for (k, t) in s.triples.iter().enumerate() {
        by_c.entry(t[2].as_slice()).or_default().push(k);
    }
    for (i, ti) in s.triples.iter().enumerate() {
        for (j, tj) in s.triples.iter().enumerate() {
            let need = neg_sum(&ti[0], &tj[1], s.q);
            let hits = by_c.get(need.as_slice()).map(Vec::as_slice).unwrap_or(&[]);
            let ok = if i == j { hits == [i] } else { hits.is_empty() };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn label_digits(l: &Label) -> Result<Vec<u64>> {
    l.coords()
        .into_iter()
        .map(|c| match c {
            Label::Name(s) => s.parse().map_err(|_| Error::InvalidArgument(format!("label {c} is not an index"))),
            Label::Tuple(_) => Err(Error::InvalidArgument(format!("nested label {c}"))),
        })
        .collect()
}

/// Size of a sum-free set against `c_q^n`.
#[derive(Clone, Debug, Serialize)]
pub struct SumFreeBound {
    pub size: usize,
    pub bound: Real,
    pub within: bool,
    /// Whether `c_q^n` is a proven bound at this `n` (prime powers) or
    /// only an asymptotic one.
    pub rigorous: bool,
}

pub fn sumfree_bound(s: &SumFreeSet, prec: Precision) -> Result<SumFreeBound> {
    let c = c_q(s.q, prec)?;
    let bound = Real(rug::Float::with_val(prec.bits(), rug::ops::Pow::pow(&c, s.n as u32)));
    let within = rug::Float::with_val(prec.bits(), s.len() as f64) <= bound.0;
    Ok(SumFreeBound { size: s.len(), bound, within, rigorous: is_prime_power(s.q) })
}

/// The index triples surviving an independent zeroing of `T_p^{⊗N}`.
pub fn extract_sumfree(p: usize, n_power: usize, kills: &KillSets, cap: u128) -> Result<SumFreeSet> {
    let t = tensor_power(&structural_tensor(p, 0)?, n_power, cap)?;
    extract_from_zeroing(&t, p, n_power, kills)
}

/// As [`extract_sumfree`], with `T_p^{⊗N}` already built.
pub fn extract_from_zeroing(t: &Tensor, p: usize, n_power: usize, kills: &KillSets) -> Result<SumFreeSet> {
    let s = read_sumfree(t, p, n_power, 0, kills)?;
    let bound = sumfree_bound(&s, Precision::default())?;
    if bound.rigorous && !bound.within {
        return Err(Error::Structural(format!(
            "sum-free set of size {} exceeds c_{p}^{n_power} = {}",
            s.len(),
            bound.bound.digits(12)
        )));
    }
    Ok(s)
}

/// Reads the surviving index triples and checks the sum-free property,
/// without comparing the size to `c_p^N`. For a power of
/// `structural_tensor(p, z_offset)` the offset is added back to each `z`
/// coordinate so the triples sum to zero.
pub fn read_sumfree(t: &Tensor, p: usize, n_power: usize, z_offset: i64, kills: &KillSets) -> Result<SumFreeSet> {
    let z = zero_out(t, kills)?;
    if !z.is_independent() {
        return Err(Error::NotIndependent("zeroing of the structural tensor power shares variables".into()));
    }
    let triples = z
        .terms()
        .map(|(t, _)| {
            let z = label_digits(&t.z)?.into_iter().map(|c| (c as i64 + z_offset).rem_euclid(p as i64) as u64).collect();
            Ok([label_digits(&t.x)?, label_digits(&t.y)?, z])
        })
        .collect::<Result<Vec<_>>>()?;
    let s = SumFreeSet { q: p as u64, n: n_power, triples };
    if !check_sumfree(&s)? {
        return Err(Error::Structural("extracted triples are not tri-colored sum-free".into()));
    }
    Ok(s)
}

/// One connected block of a tensor, identified as `⟨a, b, c⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatmulCopy {
    pub dims: (usize, usize, usize),
    pub triples: Vec<Triple>,
}

/// Splits `t` into variable-disjoint blocks and checks each is a matrix
/// multiplication tensor with unit coefficients.
pub fn matmul_copies(t: &Tensor) -> Result<Vec<MatmulCopy>> {
    let terms: Vec<&Triple> = t.terms().map(|(tr, c)| {
        if c.is_one() {
            Ok(tr)
        } else {
            Err(Error::Structural(format!("coefficient of {} {} {} is not 1", tr.x, tr.y, tr.z)))
        }
    }).collect::<Result<_>>()?;
    // union-find over terms sharing a variable
    let mut parent: Vec<usize> = (0..terms.len()).collect();
    fn find(p: &mut [usize], mut a: usize) -> usize {
        while p[a] != a {
            p[a] = p[p[a]];
            a = p[a];
        }
        a
    }
    let mut first: [HashMap<&Label, usize>; 3] = Default::default();
    for (idx, tr) in terms.iter().enumerate() {
        for (axis, l) in [&tr.x, &tr.y, &tr.z].into_iter().enumerate() {
            if let Some(&other) = first[axis].get(l) {
                let (ra, rb) = (find(&mut parent, idx), find(&mut parent, other));
                parent[ra] = rb;
            } else {
                first[axis].insert(l, idx);
            }
        }
    }
    let mut blocks: BTreeMap<usize, Vec<Triple>> = BTreeMap::new();
    for idx in 0..terms.len() {
        let root = find(&mut parent, idx);
        blocks.entry(root).or_default().push(terms[idx].clone());
    }
    let mut copies: Vec<MatmulCopy> = blocks.into_values().map(identify_matmul).collect::<Result<_>>()?;
    copies.sort_by(|a, b| a.triples.cmp(&b.triples));
    Ok(copies)
}

fn neighbour_classes<'a>(m: &BTreeMap<&'a Label, BTreeSet<&'a Label>>) -> BTreeMap<BTreeSet<&'a Label>, usize> {
    let mut out = BTreeMap::new();
    for s in m.values() {
        let next = out.len();
        out.entry(s.clone()).or_insert(next);
    }
    out
}

fn identify_matmul(triples: Vec<Triple>) -> Result<MatmulCopy> {
    let fail = |what: &str| Error::Structural(format!("block of {} terms is not a matrix product: {what}", triples.len()));
    let mut xy: BTreeMap<&Label, BTreeSet<&Label>> = BTreeMap::new();
    let mut xz: BTreeMap<&Label, BTreeSet<&Label>> = BTreeMap::new();
    let mut yx: BTreeMap<&Label, BTreeSet<&Label>> = BTreeMap::new();
    let mut yz: BTreeMap<&Label, BTreeSet<&Label>> = BTreeMap::new();
    let mut zx: BTreeMap<&Label, BTreeSet<&Label>> = BTreeMap::new();
    let mut zy: BTreeMap<&Label, BTreeSet<&Label>> = BTreeMap::new();
    for t in &triples {
        xy.entry(&t.x).or_default().insert(&t.y);
        xz.entry(&t.x).or_default().insert(&t.z);
        yx.entry(&t.y).or_default().insert(&t.x);
        yz.entry(&t.y).or_default().insert(&t.z);
        zx.entry(&t.z).or_default().insert(&t.x);
        zy.entry(&t.z).or_default().insert(&t.y);
    }
    // x_{ij} sees z_{·i} and y_{j·}; y_{jk} sees z_{k·}
    let i_class = neighbour_classes(&xz);
    let j_class = neighbour_classes(&xy);
    let k_class = neighbour_classes(&yz);
    let (a, b, c) = (i_class.len(), j_class.len(), k_class.len());
    if xy.len() != a * b || yx.len() != b * c || zx.len() != c * a || triples.len() != a * b * c {
        return Err(fail("variable counts"));
    }
    let xi = |x: &Label| i_class[&xz[x]];
    let xj = |x: &Label| j_class[&xy[x]];
    let yk = |y: &Label| k_class[&yz[y]];
    // y_{jk} sees exactly the x's of one j-class; z_{ki} the x's of one i-class
    let x_by_j: BTreeMap<usize, BTreeSet<&Label>> = xy.keys().fold(BTreeMap::new(), |mut acc, &x| {
        acc.entry(xj(x)).or_insert_with(BTreeSet::new).insert(x);
        acc
    });
    let x_by_i: BTreeMap<usize, BTreeSet<&Label>> = xy.keys().fold(BTreeMap::new(), |mut acc, &x| {
        acc.entry(xi(x)).or_insert_with(BTreeSet::new).insert(x);
        acc
    });
    let y_by_k: BTreeMap<usize, BTreeSet<&Label>> = yx.keys().fold(BTreeMap::new(), |mut acc, &y| {
        acc.entry(yk(y)).or_insert_with(BTreeSet::new).insert(y);
        acc
    });
    let lookup = |groups: &BTreeMap<usize, BTreeSet<&Label>>, s: &BTreeSet<&Label>| {
        groups.iter().find(|(_, g)| *g == s).map(|(&k, _)| k)
    };
    let mut yj = BTreeMap::new();
    for (&y, xs) in &yx {
        yj.insert(y, lookup(&x_by_j, xs).ok_or_else(|| fail("y neighbourhood"))?);
    }
    let mut zi = BTreeMap::new();
    let mut zk = BTreeMap::new();
    for (&z, xs) in &zx {
        zi.insert(z, lookup(&x_by_i, xs).ok_or_else(|| fail("z neighbourhood in x"))?);
        zk.insert(z, lookup(&y_by_k, &zy[z]).ok_or_else(|| fail("z neighbourhood in y"))?);
    }
    let distinct = |v: Vec<(usize, usize)>, n: usize| v.into_iter().collect::<BTreeSet<_>>().len() == n;
    if !distinct(xy.keys().map(|&x| (xi(x), xj(x))).collect(), a * b)
        || !distinct(yx.keys().map(|&y| (yj[y], yk(y))).collect(), b * c)
        || !distinct(zx.keys().map(|&z| (zk[z], zi[z])).collect(), c * a)
    {
        return Err(fail("index assignment is not a bijection"));
    }
    for t in &triples {
        if xj(&t.x) != yj[&t.y] || yk(&t.y) != zk[&t.z] || zi[&t.z] != xi(&t.x) {
            return Err(fail("term indices disagree"));
        }
    }
    Ok(MatmulCopy { dims: (a, b, c), triples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{max_independent_oracle, DEFAULT_POWER_CAP};

    #[test]
    fn ap_free_examples() {
        assert!(is_ap_free(&[], 5));
        assert!(is_ap_free(&[1, 2], 5));
        assert!(!is_ap_free(&[0, 1, 2], 3));
        assert_eq!(salem_spencer(3, SalemSpencerMode::Bruteforce).unwrap(), vec![0, 1]);
        assert!(salem_spencer(9, SalemSpencerMode::Greedy).is_err());
        assert!(salem_spencer(37, SalemSpencerMode::Bruteforce).is_err());
    }

    #[test]
    fn greedy_is_maximal() {
        for m in [5u64, 7, 11, 13, 31, 101] {
            let h = salem_spencer(m, SalemSpencerMode::Greedy).unwrap();
            assert!(is_ap_free(&h, m));
            for x in 0..m {
                if !h.contains(&x) {
                    let mut g = h.clone();
                    g.push(x);
                    assert!(!is_ap_free(&g, m), "m={m} x={x}");
                }
            }
        }
    }

    #[test]
    fn phase_one_counts_for_small_cases() {
        let p = Phase1::new(2, 2, 4).unwrap();
        assert_eq!(p.balance.l2, 24);
        assert_eq!(p.balance.l1eps, 24);
        assert!(p.balance.identity_holds());
        let p = Phase1::new(2, 1, 4).unwrap();
        assert_eq!(p.balance.l1eps, 6);
        assert!(p.balance.identity_holds());
        assert!(Phase1::new(2, 2, 6).is_err());
        assert!(Phase1::new(2, 3, 12).is_err());
    }

    #[test]
    fn construction_output_is_a_genuine_zeroing() {
        let p = Phase1::new(2, 2, 4).unwrap();
        for seed in 0..5 {
            let r = p.run(seed, Some(5)).unwrap();
            assert!(r.result.is_independent());
            assert!(r.phase3_triples as i64 >= r.pair_bound);
            assert!(r.verify_against_tensor(DEFAULT_POWER_CAP).unwrap());
        }
        assert!(p.run(0, Some(9)).is_err());
    }

    #[test]
    fn construction_is_deterministic() {
        let a = build_independent(2, 2, 4, 7, Some(7)).unwrap();
        let b = build_independent(2, 2, 4, 7, Some(7)).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn sumfree_examples() {
        let s = |q, n, t: Vec<[Vec<u64>; 3]>| SumFreeSet { q, n, triples: t };
        assert!(check_sumfree(&s(2, 1, vec![[vec![0], vec![0], vec![0]]])).unwrap());
        // shared c: a_1 + b_1 + c_2 = 0
        assert!(!check_sumfree(&s(2, 1, vec![[vec![0], vec![0], vec![0]], [vec![1], vec![1], vec![0]]])).unwrap());
        assert!(!check_sumfree(&s(2, 2, vec![[vec![0, 0], vec![0, 0], vec![0, 0]], [vec![0, 1], vec![0, 1], vec![0, 0]]]))
            .unwrap());
        assert!(check_sumfree(&s(3, 1, vec![[vec![0], vec![0], vec![0]], [vec![1], vec![1], vec![1]]])).unwrap());
        assert!(!check_sumfree(&s(2, 1, vec![[vec![0], vec![1], vec![1]], [vec![1], vec![0], vec![1]]])).unwrap());
        assert!(check_sumfree(&s(2, 1, vec![[vec![2], vec![0], vec![0]]])).is_err());
        assert!(check_sumfree(&s(3, 1, vec![])).unwrap());
    }

    #[test]
    fn extraction_from_t2() {
        let kills = KillSets {
            x: [Label::idx(1)].into(),
            y: [Label::idx(1)].into(),
            z: [Label::idx(1)].into(),
        };
        let s = extract_sumfree(2, 1, &kills, DEFAULT_POWER_CAP).unwrap();
        assert_eq!(s.triples, vec![[vec![0], vec![0], vec![0]]]);
        assert!(matches!(extract_sumfree(2, 1, &KillSets::default(), DEFAULT_POWER_CAP), Err(Error::NotIndependent(_))));
    }

    #[test]
    fn matmul_blocks_are_recognised() {
        let t = matmul_tensor(2, 3, 2).unwrap();
        let copies = matmul_copies(&t).unwrap();
        assert_eq!(copies.len(), 1);
        assert_eq!(copies[0].dims, (2, 3, 2));
        let t2 = structural_tensor(3, 0).unwrap();
        assert!(matmul_copies(&t2).is_err());
        let best = max_independent_oracle(&t2, 24).unwrap();
        let z = zero_out(&t2, &KillSets::keeping(&t2, &best.triples)).unwrap();
        let copies = matmul_copies(&z).unwrap();
        assert!(copies.iter().all(|c| c.dims == (1, 1, 1)));
    }
}
