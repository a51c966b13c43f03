//! Sparse trilinear tensors over three labelled variable sets.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Ring, Scalar};

/// Default bound on the number of terms a power may produce.
pub const DEFAULT_POWER_CAP: u128 = 1 << 22;
/// Default bound on the support size handed to the exhaustive oracles.
pub const DEFAULT_ORACLE_CAP: usize = 24;

/// A variable label. Base tensors use names; products and powers use tuples.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Name(String),
    Tuple(Vec<Label>),
}

impl Label {
    pub fn idx(i: usize) -> Label {
        Label::Name(i.to_string())
    }

    pub fn name(s: impl Into<String>) -> Label {
        Label::Name(s.into())
    }

    /// Coordinates of a power label; a plain name is a single coordinate.
    pub fn coords(&self) -> Vec<&Label> {
        match self {
            Label::Tuple(v) => v.iter().collect(),
            name => vec![name],
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Name(s) => f.write_str(s),
            Label::Tuple(v) => {
                f.write_str("(")?;
                for (i, l) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{l}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Which of the three variable sets a label belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn as_char(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }
}

/// An ordered set of distinct labels.
#[derive(Clone, Debug, Default)]
pub struct VarSet {
    labels: Vec<Label>,
    pos: HashMap<Label, usize>,
}

impl PartialEq for VarSet {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
    }
}

impl Eq for VarSet {}

impl VarSet {
    pub fn new(axis: Axis, labels: Vec<Label>) -> Result<Self> {
        let mut pos = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if pos.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateLabel { axis: axis.as_char(), label: l.to_string() });
            }
        }
        Ok(VarSet { labels, pos })
    }

    pub fn indexed(axis: Axis, n: usize) -> Self {
        VarSet::new(axis, (0..n).map(Label::idx).collect()).expect("indices are distinct")
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, l: &Label) -> bool {
        self.pos.contains_key(l)
    }

    pub fn position(&self, l: &Label) -> Option<usize> {
        self.pos.get(l).copied()
    }
}

/// One support entry `x y z`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triple {
    pub x: Label,
    pub y: Label,
    pub z: Label,
}

impl Triple {
    pub fn new(x: Label, y: Label, z: Label) -> Self {
        Triple { x, y, z }
    }

    pub fn independent_of(&self, other: &Triple) -> bool {
        self.x != other.x && self.y != other.y && self.z != other.z
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{} y{} z{}", self.x, self.y, self.z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TripleRole {
    Support,
    Independent,
    Sumfree,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleSet {
    pub role: TripleRole,
    pub triples: Vec<Triple>,
}

impl TripleSet {
    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Pairwise independence of the listed triples.
    pub fn is_independent(&self) -> bool {
        let mut xs = BTreeSet::new();
        let mut ys = BTreeSet::new();
        let mut zs = BTreeSet::new();
        self.triples.iter().all(|t| xs.insert(&t.x) && ys.insert(&t.y) && zs.insert(&t.z))
    }
}

/// Variables substituted by zero, per axis.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KillSets {
    #[serde(default)]
    pub x: BTreeSet<Label>,
    #[serde(default)]
    pub y: BTreeSet<Label>,
    #[serde(default)]
    pub z: BTreeSet<Label>,
}

impl KillSets {
    pub fn get(&self, axis: Axis) -> &BTreeSet<Label> {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
            Axis::Z => &self.z,
        }
    }

    pub fn get_mut(&mut self, axis: Axis) -> &mut BTreeSet<Label> {
        match axis {
            Axis::X => &mut self.x,
            Axis::Y => &mut self.y,
            Axis::Z => &mut self.z,
        }
    }

    pub fn kills(&self, t: &Triple) -> bool {
        self.x.contains(&t.x) || self.y.contains(&t.y) || self.z.contains(&t.z)
    }

    /// Kills every variable of `tensor` that none of `keep` uses.
    pub fn keeping(tensor: &Tensor, keep: &[Triple]) -> KillSets {
        let used_x: BTreeSet<_> = keep.iter().map(|t| &t.x).collect();
        let used_y: BTreeSet<_> = keep.iter().map(|t| &t.y).collect();
        let used_z: BTreeSet<_> = keep.iter().map(|t| &t.z).collect();
        KillSets {
            x: tensor.x.labels().iter().filter(|l| !used_x.contains(l)).cloned().collect(),
            y: tensor.y.labels().iter().filter(|l| !used_y.contains(l)).cloned().collect(),
            z: tensor.z.labels().iter().filter(|l| !used_z.contains(l)).cloned().collect(),
        }
    }

    pub fn union(&self, other: &KillSets) -> KillSets {
        KillSets {
            x: self.x.union(&other.x).cloned().collect(),
            y: self.y.union(&other.y).cloned().collect(),
            z: self.z.union(&other.z).cloned().collect(),
        }
    }
}

/// A trilinear form `Σ T_xyz x y z` with exact nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    ring: Ring,
    x: VarSet,
    y: VarSet,
    z: VarSet,
    terms: BTreeMap<Triple, Scalar>,
}

impl Tensor {
    pub fn new(ring: Ring, x: Vec<Label>, y: Vec<Label>, z: Vec<Label>) -> Result<Self> {
        ring.validate()?;
        Ok(Tensor {
            ring,
            x: VarSet::new(Axis::X, x)?,
            y: VarSet::new(Axis::Y, y)?,
            z: VarSet::new(Axis::Z, z)?,
            terms: BTreeMap::new(),
        })
    }

    pub fn from_varsets(ring: Ring, x: VarSet, y: VarSet, z: VarSet) -> Self {
        Tensor { ring, x, y, z, terms: BTreeMap::new() }
    }

    /// Tensor over `0..nx`, `0..ny`, `0..nz` with the given unit-coefficient terms.
    pub fn indexed_01(nx: usize, ny: usize, nz: usize, support: &[(usize, usize, usize)]) -> Tensor {
        let mut t = Tensor::from_varsets(
            Ring::Rational,
            VarSet::indexed(Axis::X, nx),
            VarSet::indexed(Axis::Y, ny),
            VarSet::indexed(Axis::Z, nz),
        );
        for &(i, j, k) in support {
            t.insert(Triple::new(Label::idx(i), Label::idx(j), Label::idx(k)), Ring::Rational.one())
                .expect("indices in range");
        }
        t
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn varset(&self, axis: Axis) -> &VarSet {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
            Axis::Z => &self.z,
        }
    }

    pub fn x(&self) -> &VarSet {
        &self.x
    }

    pub fn y(&self) -> &VarSet {
        &self.y
    }

    pub fn z(&self) -> &VarSet {
        &self.z
    }

    /// Number of nonzero coefficients.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Triple, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, t: &Triple) -> Option<&Scalar> {
        self.terms.get(t)
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.terms.contains_key(t)
    }

    fn check_labels(&self, t: &Triple) -> Result<()> {
        for (axis, l) in [(Axis::X, &t.x), (Axis::Y, &t.y), (Axis::Z, &t.z)] {
            if !self.varset(axis).contains(l) {
                return Err(Error::UnknownLabel { axis: axis.as_char(), label: l.to_string() });
            }
        }
        Ok(())
    }

    /// Adds `c` to the coefficient of `t`, dropping it if the sum vanishes.
    pub fn insert(&mut self, t: Triple, c: Scalar) -> Result<()> {
        self.check_labels(&t)?;
        if c.ring() != self.ring {
            return Err(Error::RingMismatch { left: self.ring.clone(), right: c.ring() });
        }
        let sum = match self.terms.get(&t) {
            Some(old) => old.add(&c)?,
            None => c,
        };
        if sum.is_zero() {
            self.terms.remove(&t);
        } else {
            self.terms.insert(t, sum);
        }
        Ok(())
    }

    pub fn support(&self) -> TripleSet {
        TripleSet { role: TripleRole::Support, triples: self.terms.keys().cloned().collect() }
    }

    pub fn same_varsets(&self, other: &Tensor) -> bool {
        self.x == other.x && self.y == other.y && self.z == other.z
    }

    /// Re-embeds integer coefficients into another ring.
    pub fn to_ring(&self, ring: &Ring) -> Result<Tensor> {
        ring.validate()?;
        let mut out = Tensor::from_varsets(ring.clone(), self.x.clone(), self.y.clone(), self.z.clone());
        for (t, c) in &self.terms {
            let v = match c {
                Scalar::Rational(r) if r.is_integer() => ring.from_bigint(r.numer()),
                other if other.ring() == *ring => other.clone(),
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "cannot move coefficient {other} from {} to {ring}",
                        other.ring()
                    )))
                }
            };
            out.insert(t.clone(), v)?;
        }
        Ok(out)
    }

    /// Tensor with the same support but the variable sets replaced.
    pub fn relabel(&self, map: impl Fn(Axis, &Label) -> Label) -> Result<Tensor> {
        let remap = |axis: Axis, vs: &VarSet| VarSet::new(axis, vs.labels().iter().map(|l| map(axis, l)).collect());
        let mut out = Tensor::from_varsets(
            self.ring.clone(),
            remap(Axis::X, &self.x)?,
            remap(Axis::Y, &self.y)?,
            remap(Axis::Z, &self.z)?,
        );
        for (t, c) in &self.terms {
            let nt = Triple::new(map(Axis::X, &t.x), map(Axis::Y, &t.y), map(Axis::Z, &t.z));
            out.insert(nt, c.clone())?;
        }
        Ok(out)
    }

    /// True iff no two distinct terms share a variable.
    pub fn is_independent(&self) -> bool {
        self.support().is_independent()
    }
}

/// `a ⊗ b`; labels of the result are pairs `(a-label, b-label)`.
pub fn tensor_product(a: &Tensor, b: &Tensor) -> Result<Tensor> {
    if a.ring != b.ring {
        return Err(Error::RingMismatch { left: a.ring.clone(), right: b.ring.clone() });
    }
    let pair = |p: &Label, q: &Label| Label::Tuple(vec![p.clone(), q.clone()]);
    let cross = |axis: Axis, p: &VarSet, q: &VarSet| {
        let labels = p.labels().iter().flat_map(|l| q.labels().iter().map(move |m| pair(l, m))).collect();
        VarSet::new(axis, labels)
    };
    let mut out = Tensor::from_varsets(
        a.ring.clone(),
        cross(Axis::X, &a.x, &b.x)?,
        cross(Axis::Y, &a.y, &b.y)?,
        cross(Axis::Z, &a.z, &b.z)?,
    );
    for (s, c) in &a.terms {
        for (t, d) in &b.terms {
            let prod = c.mul(d)?;
            if !prod.is_zero() {
                out.terms.insert(Triple::new(pair(&s.x, &t.x), pair(&s.y, &t.y), pair(&s.z, &t.z)), prod);
            }
        }
    }
    Ok(out)
}

/// `a^{⊗n}` with flat `n`-tuple labels; `a^{⊗1}` is `a` itself.
pub fn tensor_power(a: &Tensor, n: usize, cap: u128) -> Result<Tensor> {
    if n == 0 {
        return Err(Error::InvalidArgument("tensor power must be at least 1".into()));
    }
    if n == 1 {
        return Ok(a.clone());
    }
    let widest = [a.len(), a.x.len(), a.y.len(), a.z.len()].into_iter().max().unwrap_or(0) as u128;
    let size = widest.checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > cap {
        return Err(Error::CapExceeded { what: "tensor power", size, cap });
    }
    let power_labels = |axis: Axis, vs: &VarSet| {
        let mut acc: Vec<Vec<Label>> = vec![Vec::new()];
        for _ in 0..n {
            acc = acc
                .into_iter()
                .flat_map(|prefix| {
                    vs.labels().iter().map(move |l| {
                        let mut p = prefix.clone();
                        p.push(l.clone());
                        p
                    })
                })
                .collect();
        }
        VarSet::new(axis, acc.into_iter().map(Label::Tuple).collect())
    };
    let mut out = Tensor::from_varsets(
        a.ring.clone(),
        power_labels(Axis::X, &a.x)?,
        power_labels(Axis::Y, &a.y)?,
        power_labels(Axis::Z, &a.z)?,
    );
    let base: Vec<(&Triple, &Scalar)> = a.terms.iter().collect();
    let mut partial: Vec<([Vec<Label>; 3], Scalar)> = vec![([Vec::new(), Vec::new(), Vec::new()], a.ring.one())];
    for _ in 0..n {
        let mut next = Vec::with_capacity(partial.len() * base.len());
        for (labels, c) in &partial {
            for (t, d) in &base {
                let prod = c.mul(d)?;
                if prod.is_zero() {
                    continue;
                }
                let mut l = labels.clone();
                l[0].push(t.x.clone());
                l[1].push(t.y.clone());
                l[2].push(t.z.clone());
                next.push((l, prod));
            }
        }
        partial = next;
    }
    for ([x, y, z], c) in partial {
        out.terms.insert(Triple::new(Label::Tuple(x), Label::Tuple(y), Label::Tuple(z)), c);
    }
    Ok(out)
}

/// Substitutes zero for every killed variable; variable sets are unchanged.
pub fn zero_out(a: &Tensor, kills: &KillSets) -> Result<Tensor> {
    for axis in Axis::ALL {
        let vs = a.varset(axis);
        if let Some(l) = kills.get(axis).iter().find(|l| !vs.contains(l)) {
            return Err(Error::UnknownLabel { axis: axis.as_char(), label: l.to_string() });
        }
    }
    let mut out = Tensor::from_varsets(a.ring.clone(), a.x.clone(), a.y.clone(), a.z.clone());
    out.terms = a.terms.iter().filter(|(t, _)| !kills.kills(t)).map(|(t, c)| (t.clone(), c.clone())).collect();
    Ok(out)
}

/// `a ⊆ b`: every term of `a` appears in `b` with the same coefficient.
pub fn is_subset(a: &Tensor, b: &Tensor) -> bool {
    a.ring == b.ring && a.same_varsets(b) && a.terms.iter().all(|(t, c)| b.terms.get(t) == Some(c))
}

pub fn independent_support(a: &Tensor) -> bool {
    a.is_independent()
}

/// Index form of a support: each term as positions in the three variable sets.
struct SupportGraph {
    terms: Vec<[usize; 3]>,
    /// For each axis and variable, the terms touching it.
    touching: [Vec<Vec<usize>>; 3],
}

impl SupportGraph {
    fn new(a: &Tensor) -> Self {
        let terms: Vec<[usize; 3]> = a
            .terms
            .keys()
            .map(|t| {
                [
                    a.x.position(&t.x).expect("label in varset"),
                    a.y.position(&t.y).expect("label in varset"),
                    a.z.position(&t.z).expect("label in varset"),
                ]
            })
            .collect();
        let mut touching = [vec![Vec::new(); a.x.len()], vec![Vec::new(); a.y.len()], vec![Vec::new(); a.z.len()]];
        for (i, t) in terms.iter().enumerate() {
            for ax in 0..3 {
                touching[ax][t[ax]].push(i);
            }
        }
        SupportGraph { terms, touching }
    }
}

struct Search<'a> {
    g: &'a SupportGraph,
    induced: bool,
    used: [Vec<bool>; 3],
    chosen: Vec<usize>,
    best: Vec<usize>,
}

impl Search<'_> {
    fn free(&self, i: usize) -> bool {
        let t = self.g.terms[i];
        (0..3).all(|ax| !self.used[ax][t[ax]])
    }

    fn covered(&self, i: usize) -> bool {
        let t = self.g.terms[i];
        (0..3).all(|ax| self.used[ax][t[ax]])
    }

    /// After adding term `i`, no unchosen term may have all three variables alive.
    fn still_induced(&self, i: usize) -> bool {
        let t = self.g.terms[i];
        (0..3).all(|ax| {
            self.g.touching[ax][t[ax]].iter().all(|&u| u == i || self.chosen.contains(&u) || !self.covered(u))
        })
    }

    fn set(&mut self, i: usize, on: bool) {
        let t = self.g.terms[i];
        for ax in 0..3 {
            self.used[ax][t[ax]] = on;
        }
    }

    fn run(&mut self, from: usize) {
        if self.chosen.len() > self.best.len() {
            self.best = self.chosen.clone();
        }
        let remaining = (from..self.g.terms.len()).filter(|&i| self.free(i)).count();
        if self.chosen.len() + remaining <= self.best.len() {
            return;
        }
        let Some(i) = (from..self.g.terms.len()).find(|&i| self.free(i)) else {
            return;
        };
        self.set(i, true);
        self.chosen.push(i);
        if !self.induced || self.still_induced(i) {
            self.run(i + 1);
        }
        self.chosen.pop();
        self.set(i, false);
        self.run(i + 1);
    }
}

fn max_independent(a: &Tensor, cap: usize, induced: bool) -> Result<TripleSet> {
    if a.len() > cap {
        return Err(Error::CapExceeded { what: "independent-set oracle", size: a.len() as u128, cap: cap as u128 });
    }
    let g = SupportGraph::new(a);
    let mut s = Search {
        g: &g,
        induced,
        used: [vec![false; a.x.len()], vec![false; a.y.len()], vec![false; a.z.len()]],
        chosen: Vec::new(),
        best: Vec::new(),
    };
    s.run(0);
    let keys: Vec<&Triple> = a.terms.keys().collect();
    let triples = s.best.iter().map(|&i| keys[i].clone()).collect();
    Ok(TripleSet { role: TripleRole::Independent, triples })
}

/// Largest independent set of support triples that is realised by a zeroing
/// out: killing every variable it does not use leaves exactly these terms.
///
/// Exhaustive branch and bound; among maximum sets the lexicographically
/// first (in term order) is returned.
pub fn max_independent_oracle(a: &Tensor, cap: usize) -> Result<TripleSet> {
    max_independent(a, cap, true)
}

/// Largest pairwise-independent subset of the support (a 3-dimensional
/// matching), without requiring it to be a zeroing out.
pub fn max_independent_subset(a: &Tensor, cap: usize) -> Result<TripleSet> {
    max_independent(a, cap, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t2() -> Tensor {
        Tensor::indexed_01(2, 2, 2, &[(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)])
    }

    fn trip(i: usize, j: usize, k: usize) -> Triple {
        Triple::new(Label::idx(i), Label::idx(j), Label::idx(k))
    }

    #[test]
    fn product_sizes_multiply() {
        let p = tensor_product(&t2(), &t2()).unwrap();
        assert_eq!(p.len(), 16);
        assert_eq!(p.x().len(), 4);
        let empty = Tensor::indexed_01(1, 1, 1, &[]);
        assert!(tensor_product(&t2(), &empty).unwrap().is_empty());
    }

    #[test]
    fn power_sizes() {
        assert_eq!(tensor_power(&t2(), 3, DEFAULT_POWER_CAP).unwrap().len(), 64);
        let single = Tensor::indexed_01(1, 1, 1, &[(0, 0, 0)]);
        let p5 = tensor_power(&single, 5, DEFAULT_POWER_CAP).unwrap();
        assert_eq!(p5.len(), 1);
        assert_eq!(tensor_power(&t2(), 1, DEFAULT_POWER_CAP).unwrap(), t2());
        assert!(matches!(tensor_power(&t2(), 12, 1000), Err(Error::CapExceeded { .. })));
        assert!(tensor_power(&t2(), 0, DEFAULT_POWER_CAP).is_err());
    }

    #[test]
    fn zero_out_drops_touching_terms() {
        let mut kills = KillSets::default();
        kills.x.insert(Label::idx(1));
        let z = zero_out(&t2(), &kills).unwrap();
        let kept: Vec<_> = z.terms().map(|(t, _)| t.clone()).collect();
        assert_eq!(kept, vec![trip(0, 0, 0), trip(0, 1, 1)]);
        assert_eq!(z.x(), t2().x());

        let all = KillSets { x: t2().x().labels().iter().cloned().collect(), ..Default::default() };
        assert!(zero_out(&t2(), &all).unwrap().is_empty());

        let mut bad = KillSets::default();
        bad.z.insert(Label::idx(7));
        assert!(matches!(zero_out(&t2(), &bad), Err(Error::UnknownLabel { axis: 'z', .. })));
    }

    #[test]
    fn subset_relation() {
        let a = t2();
        assert!(is_subset(&a, &a));
        let mut kills = KillSets::default();
        kills.y.insert(Label::idx(0));
        let b = zero_out(&a, &kills).unwrap();
        assert!(is_subset(&b, &a));
        assert!(!is_subset(&a, &b));
    }

    #[test]
    fn independence_examples() {
        assert!(Tensor::indexed_01(2, 2, 2, &[(0, 0, 0), (1, 1, 1)]).is_independent());
        assert!(!Tensor::indexed_01(2, 2, 2, &[(0, 0, 0), (0, 1, 1)]).is_independent());
        assert!(!t2().is_independent());
    }

    #[test]
    fn insert_rejects_unknown_labels_and_cancels() {
        let mut t = Tensor::indexed_01(1, 1, 1, &[(0, 0, 0)]);
        assert!(t.insert(trip(0, 0, 1), Ring::Rational.one()).is_err());
        t.insert(trip(0, 0, 0), Ring::Rational.from_int(-1)).unwrap();
        assert!(t.is_empty());
        assert!(Tensor::new(Ring::Rational, vec![Label::idx(0), Label::idx(0)], vec![], vec![]).is_err());
    }

    #[test]
    fn oracle_on_small_tensors() {
        assert_eq!(max_independent_oracle(&t2(), DEFAULT_ORACLE_CAP).unwrap().len(), 1);
        assert_eq!(max_independent_subset(&t2(), DEFAULT_ORACLE_CAP).unwrap().len(), 1);
        let single = Tensor::indexed_01(1, 1, 1, &[(0, 0, 0)]);
        assert_eq!(max_independent_oracle(&single, 1).unwrap().len(), 1);
        assert!(max_independent_oracle(&t2(), 3).is_err());
    }

    #[test]
    fn oracle_kill_sets_realise_the_set() {
        let t3 = Tensor::indexed_01(
            3,
            3,
            3,
            &(0..3).flat_map(|i| (0..3).map(move |j| (i, j, (6 - i - j) % 3))).collect::<Vec<_>>(),
        );
        let best = max_independent_oracle(&t3, DEFAULT_ORACLE_CAP).unwrap();
        let z = zero_out(&t3, &KillSets::keeping(&t3, &best.triples)).unwrap();
        assert_eq!(z.support().triples, best.triples);
        assert!(z.is_independent());
        // a matching need not be a zeroing: the diagonal of T_3 is one
        assert_eq!(max_independent_subset(&t3, DEFAULT_ORACLE_CAP).unwrap().len(), 3);
        assert!(best.len() < 3);
    }
}
