//! Monomial degenerations: verification, powers, the layer-slicing transfer
//! of independent zeroings, and conversion of rank expressions into border
//! rank expressions.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::catalog::{expand_rank_expression, RankExpression, RankFactor};
use crate::error::{Error, Result};
use crate::scalar::{Ring, Scalar};
use crate::tensor::{
    tensor_power, tensor_product, zero_out, Axis, KillSets, Label, Tensor, Triple, TripleRole,
    TripleSet, VarSet,
};

pub type Weights = BTreeMap<Label, i64>;

/// `small` obtained from `big` by integer weights on the variables: every
/// term of `big` has weight sum `≥ 0`, with equality exactly on `small`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialDegeneration {
    pub big: Tensor,
    pub small: Tensor,
    pub a: Weights,
    pub b: Weights,
    pub c: Weights,
}

impl MonomialDegeneration {
    pub fn new(big: Tensor, small: Tensor, a: Weights, b: Weights, c: Weights) -> Self {
        MonomialDegeneration { big, small, a, b, c }
    }

    /// `small == big` with all weights zero.
    pub fn identity(t: &Tensor) -> Self {
        let zeros = |vs: &VarSet| vs.labels().iter().map(|l| (l.clone(), 0)).collect();
        MonomialDegeneration::new(t.clone(), t.clone(), zeros(t.x()), zeros(t.y()), zeros(t.z()))
    }

    pub fn weights(&self, axis: Axis) -> &Weights {
        match axis {
            Axis::X => &self.a,
            Axis::Y => &self.b,
            Axis::Z => &self.c,
        }
    }

    pub fn weight_sum(&self, t: &Triple) -> i64 {
        self.a[&t.x] + self.b[&t.y] + self.c[&t.z]
    }

    /// `(min, max)` of a weight map over its variable set.
    pub fn range(&self, axis: Axis) -> (i64, i64) {
        let w = self.weights(axis);
        let lo = w.values().copied().min().unwrap_or(0);
        let hi = w.values().copied().max().unwrap_or(0);
        (lo, hi)
    }

    fn check_labels(&self) -> Result<()> {
        for axis in Axis::ALL {
            if self.big.varset(axis) != self.small.varset(axis) {
                return Err(Error::VarSetMismatch(axis.as_char()));
            }
            let vs = self.big.varset(axis);
            let w = self.weights(axis);
            if let Some(l) = vs.labels().iter().find(|l| !w.contains_key(*l)) {
                return Err(Error::UnknownLabel { axis: axis.as_char(), label: format!("{l} (no weight)") });
            }
            if let Some(l) = w.keys().find(|l| !vs.contains(l)) {
                return Err(Error::UnknownLabel { axis: axis.as_char(), label: l.to_string() });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// A term of the big tensor with negative weight sum.
    NegativeSum,
    /// Weight sum 0 on a term the small tensor lacks.
    ZeroOutsideSmall,
    /// Positive weight sum on a term of the small tensor.
    PositiveInsideSmall,
    /// A term of the small tensor missing from (or differing in) the big one.
    NotSubset,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub x: Label,
    pub y: Label,
    pub z: Label,
    pub weight_sum: Option<i64>,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub verified: bool,
    pub big_terms: usize,
    pub small_terms: usize,
    /// Distinct weight sums over the big tensor's terms.
    pub weight_sums: BTreeSet<i64>,
    pub violations: Vec<Violation>,
}

pub fn verify_degeneration(d: &MonomialDegeneration) -> Result<VerificationReport> {
    d.check_labels()?;
    let mut violations = Vec::new();
    let mut weight_sums = BTreeSet::new();
    let mut push = |t: &Triple, weight_sum, kind| {
        violations.push(Violation { x: t.x.clone(), y: t.y.clone(), z: t.z.clone(), weight_sum, kind })
    };
    if d.big.ring() != d.small.ring() {
        return Err(Error::RingMismatch { left: d.big.ring().clone(), right: d.small.ring().clone() });
    }
    for (t, c) in d.small.terms() {
        if d.big.coeff(t) != Some(c) {
            push(t, Some(d.weight_sum(t)), ViolationKind::NotSubset);
        }
    }
    for (t, _) in d.big.terms() {
        let s = d.weight_sum(t);
        weight_sums.insert(s);
        let kept = d.small.contains(t);
        let kind = match (s, kept) {
            (s, _) if s < 0 => Some(ViolationKind::NegativeSum),
            (0, false) => Some(ViolationKind::ZeroOutsideSmall),
            (s, true) if s > 0 => Some(ViolationKind::PositiveInsideSmall),
            _ => None,
        };
        if let Some(kind) = kind {
            push(t, Some(s), kind);
        }
    }
    Ok(VerificationReport {
        verified: violations.is_empty(),
        big_terms: d.big.len(),
        small_terms: d.small.len(),
        weight_sums,
        violations,
    })
}

fn require_verified(d: &MonomialDegeneration) -> Result<()> {
    let report = verify_degeneration(d)?;
    if report.verified {
        Ok(())
    } else {
        Err(Error::DegenerationInvalid(report.violations.len()))
    }
}

fn power_weights(w: &Weights, vs: &VarSet) -> Weights {
    vs.labels().iter().map(|l| (l.clone(), l.coords().into_iter().map(|c| w[c]).sum())).collect()
}

/// Degeneration of `big^{⊗n}` onto `small^{⊗n}` with additively extended weights.
pub fn power_degeneration(d: &MonomialDegeneration, n: usize, cap: u128) -> Result<MonomialDegeneration> {
    require_verified(d)?;
    if n == 1 {
        return Ok(d.clone());
    }
    let big = tensor_power(&d.big, n, cap)?;
    let small = tensor_power(&d.small, n, cap)?;
    let a = power_weights(&d.a, big.x());
    let b = power_weights(&d.b, big.y());
    let c = power_weights(&d.c, big.z());
    Ok(MonomialDegeneration::new(big, small, a, b, c))
}

/// `d1 ⊗ d2`: weights of a pair label add.
pub fn product_degeneration(d1: &MonomialDegeneration, d2: &MonomialDegeneration) -> Result<MonomialDegeneration> {
    let big = tensor_product(&d1.big, &d2.big)?;
    let small = tensor_product(&d1.small, &d2.small)?;
    let pairwise = |w1: &Weights, w2: &Weights, vs: &VarSet| -> Weights {
        vs.labels()
            .iter()
            .map(|l| {
                let Label::Tuple(parts) = l else { unreachable!("product labels are pairs") };
                (l.clone(), w1[&parts[0]] + w2[&parts[1]])
            })
            .collect()
    };
    let a = pairwise(&d1.a, &d2.a, big.x());
    let b = pairwise(&d1.b, &d2.b, big.y());
    let c = pairwise(&d1.c, &d2.c, big.z());
    Ok(MonomialDegeneration::new(big, small, a, b, c))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerCount {
    pub p: i64,
    pub q: i64,
    pub r: i64,
    pub count: usize,
}

/// Distribution of an independent zeroing over the zero-sum weight layers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerReport {
    /// Every zero-sum layer of the window, including empty ones.
    pub layers: Vec<LayerCount>,
    pub best: (i64, i64, i64),
    pub best_count: usize,
    /// Weight ranges `[w⁻ n, w⁺ n]` for the three axes.
    pub window: [(i64, i64); 3],
    pub zero_sum_layers: usize,
    pub input_count: usize,
}

impl LayerReport {
    /// Pigeonhole guarantee: `best_count · zero_sum_layers ≥ input_count`.
    pub fn pigeonhole_holds(&self) -> bool {
        self.best_count * self.zero_sum_layers >= self.input_count
    }
}

#[derive(Clone, Debug)]
pub struct Transfer {
    /// Zeroing of `big^{⊗n}` realising the chosen layer.
    pub kills: KillSets,
    pub triples: TripleSet,
    pub layers: LayerReport,
    /// The powered degeneration the transfer ran against.
    pub power: MonomialDegeneration,
}

/// Number of integer triples in the box with `p + q + r = 0`.
pub fn count_zero_sum(window: &[(i64, i64); 3]) -> usize {
    let [(a0, a1), (b0, b1), _] = *window;
    let (c0, c1) = window[2];
    let mut n = 0;
    for p in a0..=a1 {
        for q in b0..=b1 {
            let r = -p - q;
            if (c0..=c1).contains(&r) {
                n += 1;
            }
        }
    }
    n
}

/// Moves an independent zeroing of `small^{⊗n}` to one of `big^{⊗n}`.
///
/// The zeroing of `small^{⊗n}` splits across the zero-sum weight layers
/// `(p, q, r)`; restricting `big^{⊗n}` to the variables of weight `p`, `q`
/// and `r` and applying the same kills leaves exactly that layer's share.
/// The fullest layer is kept, ties broken by the smallest `(p, q, r)`.
pub fn transfer_independent(
    d: &MonomialDegeneration,
    n: usize,
    small_kills: &KillSets,
    cap: u128,
) -> Result<Transfer> {
    let power = power_degeneration(d, n, cap)?;
    let zeroed = zero_out(&power.small, small_kills)?;
    if !zeroed.is_independent() {
        return Err(Error::NotIndependent("zeroing of the small power shares variables".into()));
    }
    if zeroed.is_empty() {
        return Err(Error::NotIndependent("zeroing of the small power is empty".into()));
    }
    let mut window = [(0, 0); 3];
    for (slot, axis) in window.iter_mut().zip(Axis::ALL) {
        let (lo, hi) = d.range(axis);
        *slot = (lo * n as i64, hi * n as i64);
    }
    let mut counts: BTreeMap<(i64, i64, i64), usize> = BTreeMap::new();
    for (t, _) in zeroed.terms() {
        *counts.entry((power.a[&t.x], power.b[&t.y], power.c[&t.z])).or_default() += 1;
    }
    let mut layers = Vec::new();
    for p in window[0].0..=window[0].1 {
        for q in window[1].0..=window[1].1 {
            let r = -p - q;
            if (window[2].0..=window[2].1).contains(&r) {
                layers.push(LayerCount { p, q, r, count: counts.get(&(p, q, r)).copied().unwrap_or(0) });
            }
        }
    }
    let best = layers
        .iter()
        .fold(None::<&LayerCount>, |acc, l| match acc {
            Some(b) if b.count >= l.count => Some(b),
            _ => Some(l),
        })
        .expect("window contains the zero layer");
    let (bp, bq, br) = (best.p, best.q, best.r);

    let mut kills = small_kills.clone();
    for (axis, target, w) in [(Axis::X, bp, &power.a), (Axis::Y, bq, &power.b), (Axis::Z, br, &power.c)] {
        kills.get_mut(axis).extend(w.iter().filter(|(_, &v)| v != target).map(|(l, _)| l.clone()));
    }
    let layer = zero_out(&power.big, &kills)?;
    if !layer.is_independent() {
        return Err(Error::NotIndependent("layer of the big power is not independent".into()));
    }
    debug_assert!(layer.terms().all(|(t, _)| zeroed.contains(t)));
    let triples = TripleSet { role: TripleRole::Independent, triples: layer.support().triples };
    let report = LayerReport {
        zero_sum_layers: layers.len(),
        best: (bp, bq, br),
        best_count: triples.len(),
        layers,
        window,
        input_count: zeroed.len(),
    };
    Ok(Transfer { kills, triples, layers: report, power })
}

/// Applies the weights of `d` (shifted so each axis minimum is 0) as
/// powers of `ε` to every coefficient of `r`, a rank expression for
/// `d.big`. The result is a border expression of the same rank whose
/// coefficient of `ε^h` is `d.small`, with `h = -(a⁻ + b⁻ + c⁻)`.
pub fn compose_border(r: &RankExpression, d: &MonomialDegeneration) -> Result<RankExpression> {
    require_verified(d)?;
    if r.eps_graded() {
        return Err(Error::InvalidArgument("compose_border expects a plain rank expression".into()));
    }
    for axis in Axis::ALL {
        let vs = match axis {
            Axis::X => &r.x,
            Axis::Y => &r.y,
            Axis::Z => &r.z,
        };
        if vs != d.big.varset(axis) {
            return Err(Error::VarSetMismatch(axis.as_char()));
        }
    }
    let expanded = expand_rank_expression(r)?.tensor;
    if expanded != d.big.to_ring(&r.ring)? {
        return Err(Error::InvalidArgument("rank expression does not expand to the degeneration's big tensor".into()));
    }
    let inner = r.ring.clone();
    let ring = Ring::eps(inner.clone());
    let lift = |coeffs: &[Scalar], vs: &VarSet, axis: Axis| -> Result<Vec<Scalar>> {
        let (lo, _) = d.range(axis);
        let w = d.weights(axis);
        coeffs
            .iter()
            .zip(vs.labels())
            .map(|(c, l)| Scalar::eps_monomial(&inner, (w[l] - lo) as usize).mul(&Scalar::eps_poly(inner.clone(), vec![c.clone()])))
            .collect()
    };
    let factors = r
        .factors
        .iter()
        .map(|f| {
            Ok(RankFactor { x: lift(&f.x, &r.x, Axis::X)?, y: lift(&f.y, &r.y, Axis::Y)?, z: lift(&f.z, &r.z, Axis::Z)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let shift: i64 = Axis::ALL.iter().map(|&a| d.range(a).0).sum();
    Ok(RankExpression {
        ring,
        x: r.x.clone(),
        y: r.y.clone(),
        z: r.z.clone(),
        factors,
        scale: r.scale.clone(),
        border_order: Some((-shift) as usize),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{
        cw_degeneration, cw_tensor, expand_full, named_degenerations, rank_expression_tp_shifted,
        strassen_degeneration, structural_tensor, Family, TpField,
    };
    use crate::tensor::{max_independent_oracle, DEFAULT_POWER_CAP};

    #[test]
    fn cw_weights_verify_with_expected_sums() {
        let r = verify_degeneration(&cw_degeneration(2).unwrap()).unwrap();
        assert!(r.verified, "{:?}", r.violations);
        assert!(r.weight_sums.iter().all(|s| (0..=3).contains(s)));
    }

    #[test]
    fn perturbed_weight_breaks_verification() {
        let mut d = cw_degeneration(2).unwrap();
        d.c.insert(Label::idx(0), -3);
        let r = verify_degeneration(&d).unwrap();
        assert!(!r.verified);
        let bad = r
            .violations
            .iter()
            .find(|v| v.x == Label::idx(1) && v.y == Label::idx(2) && v.z == Label::idx(0))
            .expect("x1 y2 z0 has sum -1");
        assert_eq!(bad.weight_sum, Some(-1));
        assert_eq!(bad.kind, ViolationKind::NegativeSum);
    }

    #[test]
    fn identity_verifies_and_powers_to_identity() {
        let t = structural_tensor(3, 0).unwrap();
        let id = MonomialDegeneration::identity(&t);
        assert!(verify_degeneration(&id).unwrap().verified);
        let p = power_degeneration(&id, 3, DEFAULT_POWER_CAP).unwrap();
        assert_eq!(p.big, p.small);
        assert!(p.a.values().chain(p.b.values()).chain(p.c.values()).all(|&w| w == 0));
        assert_eq!(power_degeneration(&id, 1, DEFAULT_POWER_CAP).unwrap(), id);
    }

    #[test]
    fn missing_weight_is_a_label_error() {
        let mut d = cw_degeneration(1).unwrap();
        d.a.remove(&Label::idx(2));
        assert!(matches!(verify_degeneration(&d), Err(Error::UnknownLabel { axis: 'x', .. })));
        let mut d = cw_degeneration(1).unwrap();
        d.b.insert(Label::idx(9), 0);
        assert!(matches!(verify_degeneration(&d), Err(Error::UnknownLabel { axis: 'y', .. })));
    }

    #[test]
    fn identity_transfer_keeps_the_zeroing() {
        let cw = cw_tensor(1, true).unwrap();
        let id = MonomialDegeneration::identity(&cw);
        let best = max_independent_oracle(&cw, 24).unwrap();
        let kills = KillSets::keeping(&cw, &best.triples);
        let tr = transfer_independent(&id, 1, &kills, DEFAULT_POWER_CAP).unwrap();
        assert_eq!(tr.triples.triples, best.triples);
        assert_eq!(tr.layers.best, (0, 0, 0));
        assert_eq!(tr.layers.zero_sum_layers, 1);
    }

    #[test]
    fn transfer_rejects_dependent_zeroing() {
        let d = cw_degeneration(1).unwrap();
        let err = transfer_independent(&d, 1, &KillSets::default(), DEFAULT_POWER_CAP).unwrap_err();
        assert!(matches!(err, Error::NotIndependent(_)));
    }

    #[test]
    fn zero_sum_counting() {
        assert_eq!(count_zero_sum(&[(0, 0), (0, 0), (0, 0)]), 1);
        // a, b ∈ [0,2], c ∈ [-2,0]: pairs with a+b ≤ 2
        assert_eq!(count_zero_sum(&[(0, 2), (0, 2), (-2, 0)]), 6);
    }

    #[test]
    fn builtin_families_verify_except_as_printed() {
        for nd in named_degenerations().unwrap() {
            let ok = verify_degeneration(&nd.degeneration).unwrap().verified;
            assert_eq!(ok, nd.family != Family::StrassenAsPrinted, "{}", nd.name);
        }
    }

    #[test]
    fn border_composition_of_cw2() {
        let d = cw_degeneration(2).unwrap();
        let r = rank_expression_tp_shifted(4, TpField::Cyclotomic, 1).unwrap();
        let b = compose_border(&r, &d).unwrap();
        assert_eq!(b.border_order, Some(2));
        assert_eq!(b.rank(), 4);
        let e = expand_rank_expression(&b).unwrap();
        assert_eq!(e.order, 2);
        assert_eq!(e.tensor, d.small.to_ring(&r.ring).unwrap());
        let full = expand_full(&b).unwrap();
        assert!(full.terms().all(|(_, c)| c.eps_lowest_order().unwrap().0 >= 2));
    }

    #[test]
    fn border_composition_rejects_wrong_expression() {
        let d = strassen_degeneration(2).unwrap();
        let r = rank_expression_tp_shifted(3, TpField::Cyclotomic, 0).unwrap();
        assert!(compose_border(&r, &d).is_err());
        let r = rank_expression_tp_shifted(3, TpField::Cyclotomic, 1).unwrap();
        let b = compose_border(&r, &d).unwrap();
        assert_eq!(b.border_order, Some(1));
        let e = expand_rank_expression(&b).unwrap();
        assert_eq!((e.order, e.tensor), (1, d.small.to_ring(&r.ring).unwrap()));
    }

    #[test]
    fn identity_border_is_order_zero() {
        let t = structural_tensor(3, 0).unwrap();
        let r = rank_expression_tp_shifted(3, TpField::Cyclotomic, 0).unwrap();
        let b = compose_border(&r, &MonomialDegeneration::identity(&t)).unwrap();
        assert_eq!(b.border_order, Some(0));
        assert_eq!(expand_rank_expression(&b).unwrap().tensor, t.to_ring(&r.ring).unwrap());
    }

    #[test]
    fn product_matches_power_on_terms() {
        let d = cw_degeneration(1).unwrap();
        let p = product_degeneration(&d, &d).unwrap();
        let q = power_degeneration(&d, 2, DEFAULT_POWER_CAP).unwrap();
        assert!(verify_degeneration(&p).unwrap().verified);
        assert_eq!(p.big.len(), q.big.len());
        assert_eq!(p.small.len(), q.small.len());
        assert_eq!(verify_degeneration(&q).unwrap().weight_sums, verify_degeneration(&p).unwrap().weight_sums);
    }
}
