//! Named tensors, their rank expressions and the explicit degenerations
//! between them.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::degeneration::MonomialDegeneration;
use crate::error::{Error, Result};
use crate::scalar::{is_prime, Ring, Scalar};
use crate::tensor::{Axis, Label, Tensor, Triple, VarSet};

/// `T_q` with `z` relabelled by `offset`: all `x_i y_j z_k` with
/// `i + j + k ≡ -offset (mod q)`. Offset 0 is the structural tensor of
/// `Z_q`; offset 1 is the form in which `CW_{q-2}` and `S_{q-1}` sit.
pub fn structural_tensor(q: usize, z_offset: i64) -> Result<Tensor> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("structural tensor needs q >= 2, got {q}")));
    }
    let qi = q as i64;
    let support: Vec<_> = (0..q)
        .flat_map(|i| (0..q).map(move |j| (i, j, (-(i as i64) - j as i64 - z_offset).rem_euclid(qi) as usize)))
        .collect();
    Ok(Tensor::indexed_01(q, q, q, &support))
}

fn pair_label(a: usize, b: usize) -> Label {
    Label::Name(format!("{a},{b}"))
}

/// `⟨n,m,p⟩ = Σ x_{ij} y_{jk} z_{ki}`; labels are `"i,j"` strings.
pub fn matmul_tensor(n: usize, m: usize, p: usize) -> Result<Tensor> {
    if n == 0 || m == 0 || p == 0 {
        return Err(Error::InvalidArgument("matrix dimensions must be positive".into()));
    }
    let grid = |a: usize, b: usize| (0..a).flat_map(move |i| (0..b).map(move |j| pair_label(i, j))).collect();
    let mut t = Tensor::new(Ring::Rational, grid(n, m), grid(m, p), grid(p, n))?;
    for i in 0..n {
        for j in 0..m {
            for k in 0..p {
                t.insert(Triple::new(pair_label(i, j), pair_label(j, k), pair_label(k, i)), Ring::Rational.one())?;
            }
        }
    }
    Ok(t)
}

/// Coppersmith-Winograd tensor over `0..=q+1`. `rotated` gives `CW_q`
/// (z-index `q+1-k` on the middle block), otherwise the classical `C_q`.
pub fn cw_tensor(q: usize, rotated: bool) -> Result<Tensor> {
    if q == 0 {
        return Err(Error::InvalidArgument("CW tensor needs q >= 1".into()));
    }
    let top = q + 1;
    let mut support = vec![(0, 0, top), (0, top, 0), (top, 0, 0)];
    for k in 1..=q {
        let zk = if rotated { q + 1 - k } else { k };
        if rotated {
            support.extend([(0, k, zk), (k, 0, zk), (k, q + 1 - k, 0)]);
        } else {
            support.extend([(0, k, zk), (k, 0, zk), (k, k, 0)]);
        }
    }
    Ok(Tensor::indexed_01(q + 2, q + 2, q + 2, &support))
}

/// Strassen's tensor `S_q = Σ_{i=1..q} x_0 y_i z_{q+1-i} + x_i y_0 z_{q+1-i}` over `0..=q`.
pub fn strassen_tensor(q: usize) -> Result<Tensor> {
    strassen_with_shift(q, 1)
}

/// `S_q` with z-indices `q-i`, the labelling under which it is a
/// degeneration of `T_{q+1}` in its offset-1 form.
pub fn strassen_tensor_shifted(q: usize) -> Result<Tensor> {
    strassen_with_shift(q, 0)
}

fn strassen_with_shift(q: usize, shift: usize) -> Result<Tensor> {
    if q == 0 {
        return Err(Error::InvalidArgument("Strassen tensor needs q >= 1".into()));
    }
    let support: Vec<_> = (1..=q).flat_map(|i| [(0, i, q + shift - i), (i, 0, q + shift - i)]).collect();
    Ok(Tensor::indexed_01(q + 1, q + 1, q + 1, &support))
}

/// Looks up a tensor by its CLI name: `T<q>`, `MM(n,m,p)`, `CW<q>`, `C<q>`, `S<q>`.
pub fn by_name(name: &str) -> Result<Tensor> {
    let bad = || Error::InvalidArgument(format!("unknown catalog tensor {name:?}"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    if let Some(args) = name.strip_prefix("MM(").and_then(|s| s.strip_suffix(')')) {
        let dims: Vec<usize> = args.split(',').map(num).collect::<Result<_>>()?;
        return match dims[..] {
            [n, m, p] => matmul_tensor(n, m, p),
            _ => Err(bad()),
        };
    }
    if let Some(q) = name.strip_prefix("CW") {
        return cw_tensor(num(q)?, true);
    }
    if let Some(q) = name.strip_prefix('T') {
        return structural_tensor(num(q)?, 0);
    }
    if let Some(q) = name.strip_prefix('C') {
        return cw_tensor(num(q)?, false);
    }
    if let Some(q) = name.strip_prefix('S') {
        return strassen_tensor(num(q)?);
    }
    Err(bad())
}

/// One rank-one summand: a coefficient per variable of each set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankFactor {
    pub x: Vec<Scalar>,
    pub y: Vec<Scalar>,
    pub z: Vec<Scalar>,
}

/// `scale · Σ_f (Σ a_x x)(Σ b_y y)(Σ c_z z)`. Over an eps ring this is a
/// border expression whose represented tensor is the coefficient of
/// `ε^order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankExpression {
    pub ring: Ring,
    pub x: VarSet,
    pub y: VarSet,
    pub z: VarSet,
    pub factors: Vec<RankFactor>,
    pub scale: BigRational,
    /// Designated lowest order `h` for border expressions.
    pub border_order: Option<usize>,
}

impl RankExpression {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn eps_graded(&self) -> bool {
        matches!(self.ring, Ring::EpsPoly(_))
    }

    fn validate(&self) -> Result<()> {
        if self.factors.is_empty() {
            return Err(Error::InvalidArgument("rank expression needs at least one factor".into()));
        }
        for f in &self.factors {
            for (axis, coeffs, vs) in [(Axis::X, &f.x, &self.x), (Axis::Y, &f.y, &self.y), (Axis::Z, &f.z, &self.z)] {
                if coeffs.len() != vs.len() {
                    return Err(Error::InvalidArgument(format!(
                        "factor has {} {} coefficients for {} variables",
                        coeffs.len(),
                        axis.as_char(),
                        vs.len()
                    )));
                }
                if let Some(c) = coeffs.iter().find(|c| c.ring() != self.ring) {
                    return Err(Error::RingMismatch { left: self.ring.clone(), right: c.ring() });
                }
            }
        }
        Ok(())
    }
}

/// Field in which the rank-`p` expression for `T_p` is written.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TpField {
    /// `p`-th roots of unity, scale `1/p`.
    Cyclotomic,
    /// `GF(p+1)` with the nonzero residues as evaluation points, scale `-1`.
    Prime,
}

pub fn rank_expression_tp(p: usize, field: TpField) -> Result<RankExpression> {
    rank_expression_tp_shifted(p, field, 0)
}

/// Rank expression for `structural_tensor(p, z_offset)`.
pub fn rank_expression_tp_shifted(p: usize, field: TpField, z_offset: i64) -> Result<RankExpression> {
    if p < 2 {
        return Err(Error::InvalidArgument(format!("T_p rank expression needs p >= 2, got {p}")));
    }
    let shift = |k: usize| (k as i64 + z_offset).rem_euclid(p as i64) as u64;
    let (ring, factors, scale) = match field {
        TpField::Cyclotomic => {
            let ring = Ring::cyclotomic(p as u32)?;
            let factors = (0..p as u64)
                .map(|l| {
                    let powers = |e: &dyn Fn(usize) -> u64| {
                        (0..p).map(|i| Scalar::root_of_unity(p as u32, l * e(i))).collect::<Vec<_>>()
                    };
                    RankFactor { x: powers(&|i| i as u64), y: powers(&|i| i as u64), z: powers(&shift) }
                })
                .collect();
            (ring, factors, BigRational::new(BigInt::one(), BigInt::from(p)))
        }
        TpField::Prime => {
            let m = p as u64 + 1;
            if !is_prime(m) {
                return Err(Error::NotPrime(m));
            }
            let ring = Ring::PrimeField(m);
            let factors = (1..m)
                .map(|a| {
                    let powers = |e: &dyn Fn(usize) -> u64| {
                        (0..p).map(|i| ring.from_bigint(&BigInt::from(a).pow(e(i) as u32))).collect::<Vec<_>>()
                    };
                    RankFactor { x: powers(&|i| i as u64), y: powers(&|i| i as u64), z: powers(&shift) }
                })
                .collect();
            (ring, factors, -BigRational::one())
        }
    };
    Ok(RankExpression {
        ring,
        x: VarSet::indexed(Axis::X, p),
        y: VarSet::indexed(Axis::Y, p),
        z: VarSet::indexed(Axis::Z, p),
        factors,
        scale,
        border_order: None,
    })
}

/// Result of expanding a rank expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    /// The represented tensor (for border expressions, the `ε^order` coefficient).
    pub tensor: Tensor,
    /// Lowest `ε` order; 0 for plain expressions.
    pub order: usize,
}

fn nonzero(v: &[Scalar]) -> Vec<(usize, &Scalar)> {
    v.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect()
}

/// Full expansion of `scale · Σ factors` as a tensor over the expression's ring.
pub fn expand_full(r: &RankExpression) -> Result<Tensor> {
    r.validate()?;
    let mut acc: BTreeMap<(usize, usize, usize), Scalar> = BTreeMap::new();
    for f in &r.factors {
        let (fx, fy, fz) = (nonzero(&f.x), nonzero(&f.y), nonzero(&f.z));
        for &(i, a) in &fx {
            for &(j, b) in &fy {
                let ab = a.mul(b)?;
                for &(k, c) in &fz {
                    let term = ab.mul(c)?;
                    match acc.get_mut(&(i, j, k)) {
                        Some(s) => *s = s.add(&term)?,
                        None => {
                            acc.insert((i, j, k), term);
                        }
                    }
                }
            }
        }
    }
    let mut out = Tensor::from_varsets(r.ring.clone(), r.x.clone(), r.y.clone(), r.z.clone());
    for ((i, j, k), c) in acc {
        let c = c.scale(&r.scale)?;
        if !c.is_zero() {
            let t = Triple::new(r.x.labels()[i].clone(), r.y.labels()[j].clone(), r.z.labels()[k].clone());
            out.insert(t, c)?;
        }
    }
    Ok(out)
}

/// Expands `r`. Border expressions are checked against the definition:
/// every coefficient below the designated order must vanish, and the
/// result is the coefficient tensor at that order.
pub fn expand_rank_expression(r: &RankExpression) -> Result<Expansion> {
    let full = expand_full(r)?;
    let Ring::EpsPoly(inner) = &r.ring else {
        return Ok(Expansion { tensor: full, order: 0 });
    };
    let lowest = full
        .terms()
        .map(|(_, c)| c.eps_lowest_order().map(|(d, _)| d))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min();
    let order = match (r.border_order, lowest) {
        (Some(h), Some(low)) if low < h => return Err(Error::BorderOrderViolated { degree: low, order: h }),
        (Some(h), _) => h,
        (None, Some(low)) => low,
        (None, None) => 0,
    };
    let mut tensor = Tensor::from_varsets((**inner).clone(), r.x.clone(), r.y.clone(), r.z.clone());
    for (t, c) in full.terms() {
        let coeff = c.eps_coeff(order)?;
        if !coeff.is_zero() {
            tensor.insert(t.clone(), coeff)?;
        }
    }
    Ok(Expansion { tensor, order })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `T_{q+2}` onto the rotated Coppersmith-Winograd tensor.
    Cw,
    /// `T_{q+1}` onto Strassen's tensor, repaired weights.
    StrassenCorrected,
    /// `T_{q+1}` onto Strassen's tensor, weights as originally stated.
    StrassenAsPrinted,
}

#[derive(Clone, Debug)]
pub struct NamedDegeneration {
    pub name: String,
    pub family: Family,
    pub q: usize,
    pub degeneration: MonomialDegeneration,
}

fn weights(n: usize, f: impl Fn(usize) -> i64) -> BTreeMap<Label, i64> {
    (0..n).map(|i| (Label::idx(i), f(i))).collect()
}

/// `T_{q+2}` (offset 1) onto `CW_q` with `a = b = (0, 1, …, 1, 2)` and
/// `c = (-2, -1, …, -1, 0)`.
pub fn cw_degeneration(q: usize) -> Result<MonomialDegeneration> {
    let big = structural_tensor(q + 2, 1)?;
    let small = cw_tensor(q, true)?;
    let ab = |i: usize| match i {
        0 => 0,
        i if i == q + 1 => 2,
        _ => 1,
    };
    let c = |k: usize| match k {
        0 => -2,
        k if k == q + 1 => 0,
        _ => -1,
    };
    Ok(MonomialDegeneration::new(big, small, weights(q + 2, ab), weights(q + 2, ab), weights(q + 2, c)))
}

/// `T_{q+1}` (offset 1) onto `S_q` with z-indices `q-i`; `c(z_k) = -1` for
/// `k < q` and `c(z_q) = +1`.
pub fn strassen_degeneration(q: usize) -> Result<MonomialDegeneration> {
    let big = structural_tensor(q + 1, 1)?;
    let small = strassen_tensor_shifted(q)?;
    let ab = |i: usize| if i == 0 { 0 } else { 1 };
    let c = |k: usize| if k == q { 1 } else { -1 };
    Ok(MonomialDegeneration::new(big, small, weights(q + 1, ab), weights(q + 1, ab), weights(q + 1, c)))
}

/// The Strassen-family weights exactly as stated: `c(z_q) = 0`,
/// `c(z_k) = -1` for the other `k ≥ 1`. `c(z_0)` is left unspecified there
/// and is set to 0 here. The pair is `S_q` as written inside `T_{q+1}` in
/// its offset-1 form. This assignment does not verify.
pub fn strassen_degeneration_as_printed(q: usize) -> Result<MonomialDegeneration> {
    let big = structural_tensor(q + 1, 1)?;
    let small = strassen_tensor(q)?;
    let ab = |i: usize| if i == 0 { 0 } else { 1 };
    let c = |k: usize| if k == 0 || k == q { 0 } else { -1 };
    Ok(MonomialDegeneration::new(big, small, weights(q + 1, ab), weights(q + 1, ab), weights(q + 1, c)))
}

/// Every catalog degeneration for `q ∈ 1..=8`.
pub fn named_degenerations() -> Result<Vec<NamedDegeneration>> {
    let mut out = Vec::new();
    for q in 1..=8 {
        out.push(NamedDegeneration { name: format!("cw-{q}"), family: Family::Cw, q, degeneration: cw_degeneration(q)? });
        out.push(NamedDegeneration {
            name: format!("strassen-{q}"),
            family: Family::StrassenCorrected,
            q,
            degeneration: strassen_degeneration(q)?,
        });
        out.push(NamedDegeneration {
            name: format!("strassen-{q}-as-printed"),
            family: Family::StrassenAsPrinted,
            q,
            degeneration: strassen_degeneration_as_printed(q)?,
        });
    }
    Ok(out)
}

/// Builtin degeneration by family name (`cw`, `strassen`, `strassen-as-printed`).
pub fn builtin_degeneration(family: &str, q: usize) -> Result<MonomialDegeneration> {
    if q == 0 {
        return Err(Error::InvalidArgument("builtin degenerations need q >= 1".into()));
    }
    match family {
        "cw" => cw_degeneration(q),
        "strassen" => strassen_degeneration(q),
        "strassen-as-printed" => strassen_degeneration_as_printed(q),
        other => Err(Error::InvalidArgument(format!("unknown degeneration family {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::is_subset;

    fn trip(i: usize, j: usize, k: usize) -> Triple {
        Triple::new(Label::idx(i), Label::idx(j), Label::idx(k))
    }

    #[test]
    fn structural_tensor_t2() {
        let t = structural_tensor(2, 0).unwrap();
        let s: Vec<_> = t.support().triples;
        assert_eq!(s, vec![trip(0, 0, 0), trip(0, 1, 1), trip(1, 0, 1), trip(1, 1, 0)]);
        for q in 2..10 {
            assert_eq!(structural_tensor(q, 0).unwrap().len(), q * q);
            assert_eq!(structural_tensor(q, 3).unwrap().len(), q * q);
        }
        let t4 = structural_tensor(4, 1).unwrap();
        assert!(t4.terms().all(|(t, _)| {
            let v = |l: &Label| l.to_string().parse::<usize>().unwrap();
            (v(&t.x) + v(&t.y) + v(&t.z)) % 4 == 3
        }));
        assert!(structural_tensor(1, 0).is_err());
    }

    #[test]
    fn matmul_sizes() {
        assert_eq!(matmul_tensor(1, 1, 1).unwrap().len(), 1);
        let m = matmul_tensor(2, 2, 2).unwrap();
        assert_eq!((m.len(), m.x().len(), m.y().len(), m.z().len()), (8, 4, 4, 4));
        assert_eq!(matmul_tensor(2, 1, 2).unwrap().len(), 4);
        let m = matmul_tensor(2, 3, 4).unwrap();
        assert_eq!((m.len(), m.x().len(), m.y().len(), m.z().len()), (24, 6, 12, 8));
    }

    #[test]
    fn cw_and_strassen_shapes() {
        let cw1 = cw_tensor(1, true).unwrap();
        assert_eq!(
            cw1.support().triples,
            {
                let mut v = vec![trip(0, 0, 2), trip(0, 2, 0), trip(2, 0, 0), trip(0, 1, 1), trip(1, 0, 1), trip(1, 1, 0)];
                v.sort();
                v
            }
        );
        for q in 1..=8 {
            assert_eq!(cw_tensor(q, true).unwrap().len(), 3 * q + 3);
            assert_eq!(cw_tensor(q, false).unwrap().len(), 3 * q + 3);
            assert_eq!(strassen_tensor(q).unwrap().len(), 2 * q);
        }
        assert_eq!(strassen_tensor(1).unwrap().support().triples, vec![trip(0, 1, 1), trip(1, 0, 1)]);
    }

    #[test]
    fn cw_is_subset_of_relabelled_t() {
        let t4 = structural_tensor(4, 1).unwrap();
        let cw2 = cw_tensor(2, true).unwrap();
        assert!(is_subset(&cw2, &t4));
        assert!(!is_subset(&t4, &cw2));
        // exactly the terms touching x_0, y_0 or z_0
        let zero = Label::idx(0);
        let touching: Vec<_> =
            t4.support().triples.into_iter().filter(|t| t.x == zero || t.y == zero || t.z == zero).collect();
        assert_eq!(touching, cw2.support().triples);
    }

    #[test]
    fn names_resolve() {
        assert_eq!(by_name("CW2").unwrap().len(), 9);
        assert_eq!(by_name("C3").unwrap().len(), 12);
        assert_eq!(by_name("T5").unwrap().len(), 25);
        assert_eq!(by_name("S4").unwrap().len(), 8);
        assert_eq!(by_name("MM(2,3,4)").unwrap().len(), 24);
        assert!(by_name("Q7").is_err());
        assert!(by_name("MM(2,3)").is_err());
    }

    #[test]
    fn cyclotomic_coefficients_of_t3() {
        let e = expand_rank_expression(&rank_expression_tp(3, TpField::Cyclotomic).unwrap()).unwrap();
        let one = Ring::Cyclotomic(3).one();
        assert_eq!(e.tensor.coeff(&trip(0, 0, 0)), Some(&one));
        assert_eq!(e.tensor.coeff(&trip(0, 0, 1)), None);
        assert_eq!(e.order, 0);
    }

    #[test]
    fn prime_field_needs_prime_successor() {
        assert!(matches!(rank_expression_tp(3, TpField::Prime), Err(Error::NotPrime(4))));
        assert!(rank_expression_tp(4, TpField::Prime).is_ok());
    }

    #[test]
    fn single_factor_expands_to_single_term() {
        let r = Ring::Rational;
        let expr = RankExpression {
            ring: r.clone(),
            x: VarSet::indexed(Axis::X, 2),
            y: VarSet::indexed(Axis::Y, 1),
            z: VarSet::indexed(Axis::Z, 1),
            factors: vec![RankFactor { x: vec![r.one(), r.zero()], y: vec![r.one()], z: vec![r.one()] }],
            scale: BigRational::one(),
            border_order: None,
        };
        let e = expand_rank_expression(&expr).unwrap();
        assert_eq!(e.tensor.support().triples, vec![trip(0, 0, 0)]);
    }

    #[test]
    fn border_order_violation_is_reported() {
        let inner = Ring::Rational;
        let ring = Ring::eps(inner.clone());
        let eps = Scalar::eps_monomial(&inner, 1);
        let expr = RankExpression {
            ring: ring.clone(),
            x: VarSet::indexed(Axis::X, 2),
            y: VarSet::indexed(Axis::Y, 1),
            z: VarSet::indexed(Axis::Z, 1),
            factors: vec![RankFactor { x: vec![ring.one(), eps], y: vec![ring.one()], z: vec![ring.one()] }],
            scale: BigRational::one(),
            border_order: Some(1),
        };
        assert!(matches!(expand_rank_expression(&expr), Err(Error::BorderOrderViolated { degree: 0, order: 1 })));
        let free = RankExpression { border_order: None, ..expr };
        let e = expand_rank_expression(&free).unwrap();
        assert_eq!(e.order, 0);
        assert_eq!(e.tensor.support().triples, vec![trip(0, 0, 0)]);
    }
}
