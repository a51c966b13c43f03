//! Sum-free capacity constants and the exponent bounds derived from them,
//! in arbitrary-precision floating point.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rug::ops::Pow;
use rug::Float;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub mod pipeline;
pub use pipeline::{theorem_pipeline, ChainReport, Claim, PipelineInput, PipelineReport, Verdict};

pub const DEFAULT_DIGITS: u32 = 50;
/// Environment variable overriding [`DEFAULT_DIGITS`].
pub const PRECISION_ENV: &str = "TQ_PRECISION";
/// Constant in the general-`q` sum-free bound `q^{n(1 - κ/q)}`.
pub const KAPPA: &str = "0.02831";

/// Working precision, in significant decimal digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Precision {
    pub digits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision { digits: DEFAULT_DIGITS }
    }
}

impl Precision {
    pub fn new(digits: u32) -> Result<Self> {
        if !(10..=10_000).contains(&digits) {
            return Err(Error::InvalidArgument(format!("precision must be 10..=10000 digits, got {digits}")));
        }
        Ok(Precision { digits })
    }

    /// [`PRECISION_ENV`] if set, otherwise the default.
    pub fn from_env() -> Result<Self> {
        match std::env::var(PRECISION_ENV) {
            Ok(s) => {
                let d = s
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("{PRECISION_ENV}={s:?} is not an integer")))?;
                Precision::new(d)
            }
            Err(_) => Ok(Precision::default()),
        }
    }

    /// Mantissa bits: the decimal digits plus 16 guard bits.
    pub fn bits(&self) -> u32 {
        (self.digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 16
    }

    pub fn float(&self, v: impl Into<f64>) -> Float {
        Float::with_val(self.bits(), v.into())
    }

    fn int(&self, v: &BigUint) -> Float {
        let parsed = Float::parse(v.to_str_radix(10)).expect("decimal integer parses");
        Float::with_val(self.bits(), parsed)
    }

    /// Root-finding tolerance: `10^{-(digits - 5)}`.
    pub fn tol(&self) -> Float {
        let ten = self.float(10);
        ten.pow(-(self.digits as i32 - 5))
    }
}

/// A high-precision value; serializes as a JSON number.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct Real(pub Float);

impl Real {
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// Decimal string with `digits` significant digits.
    pub fn digits(&self, digits: usize) -> String {
        format!("{:.*}", digits, self.0)
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.to_f64())
    }
}

pub fn is_prime_power(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let p = (2..).take_while(|d| d * d <= q).find(|d| q % d == 0).unwrap_or(q);
    let mut r = q;
    while r % p == 0 {
        r /= p;
    }
    r == 1
}

/// Coefficients (ascending) of `3(ρ + … + ρ^{q-1}) - (q-1)(1 + 2ρ^q)`.
fn rho_polynomial(q: u64) -> Vec<i64> {
    let q1 = q as i64 - 1;
    let mut c = vec![3i64; q as usize + 1];
    c[0] = -q1;
    c[q as usize] = -2 * q1;
    c
}

fn horner(coeffs: &[i64], x: &Float) -> Float {
    let mut acc = Float::with_val(x.prec(), 0);
    for &c in coeffs.iter().rev() {
        acc *= x;
        acc += c;
    }
    acc
}

/// `ρ + … + ρ^{q-1} - (q-1)/3 (1 + 2ρ^q)`.
pub fn rho_residual(q: u64, rho: &Float) -> Float {
    horner(&rho_polynomial(q), rho) / 3u32
}

/// The root in `(0,1)` of `ρ + … + ρ^{q-1} = (q-1)/3 (1 + 2ρ^q)`.
///
/// `ρ = 1` is always a root, so bisection runs on the quotient by `ρ - 1`,
/// which is `q - 1` at 0 and `-q(q-1)/2` at 1.
pub fn solve_rho(q: u64, tol: &Float, prec: Precision) -> Result<Float> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("q must be at least 2, got {q}")));
    }
    let f = rho_polynomial(q);
    // synthetic division by (ρ - 1)
    let mut quotient = vec![0i64; f.len() - 1];
    let mut carry = 0i64;
    for d in (1..f.len()).rev() {
        carry += f[d];
        quotient[d - 1] = carry;
    }
    debug_assert_eq!(carry + f[0], 0);
    let mut lo = prec.float(0);
    let mut hi = prec.float(1);
    let sign_lo = horner(&quotient, &lo).is_sign_positive();
    if sign_lo == horner(&quotient, &hi).is_sign_positive() {
        return Err(Error::NoBracket(q));
    }
    for _ in 0..prec.bits() + 8 {
        let mid = Float::with_val(prec.bits(), &lo + &hi) / 2u32;
        if horner(&quotient, &mid).is_sign_positive() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rho = Float::with_val(prec.bits(), &lo + &hi) / 2u32;
    if rho_residual(q, &rho).abs() >= *tol {
        return Err(Error::NoBracket(q));
    }
    Ok(rho)
}

/// `γ_q`. With `prime_power` set: `ln(1-ρ^q) - ln(1-ρ) - (q-1)/3 ln ρ`;
/// otherwise `(1 - κ/q) ln q`.
pub fn gamma(q: u64, prime_power: bool, prec: Precision) -> Result<Float> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("q must be at least 2, got {q}")));
    }
    let bits = prec.bits();
    if prime_power {
        let rho = solve_rho(q, &prec.tol(), prec)?;
        Ok(gamma_from_rho(q, &rho))
    } else {
        let kappa = Float::with_val(bits, Float::parse(KAPPA).expect("constant parses"));
        let ln_q = prec.float(q as f64).ln();
        Ok((1 - kappa / q) * ln_q)
    }
}

fn gamma_from_rho(q: u64, rho: &Float) -> Float {
    let bits = rho.prec();
    let rho_q = Float::with_val(bits, rho.pow(q as u32));
    let a = Float::with_val(bits, 1 - rho_q).ln();
    let b = Float::with_val(bits, 1 - rho).ln();
    let c = Float::with_val(bits, rho.ln_ref()) * (q - 1) / 3u32;
    a - b - c
}

/// `c_q = e^{γ_q}` with prime-power status detected.
pub fn c_q(q: u64, prec: Precision) -> Result<Float> {
    Ok(gamma(q, is_prime_power(q), prec)?.exp())
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("eps must lie in (0,1], got {eps}")))
    }
}

/// `(1+ε) ln q / γ_q`.
pub fn omega_lower_bound(q: u64, prime_power: bool, eps: f64, prec: Precision) -> Result<Float> {
    check_eps(eps)?;
    let g = gamma(q, prime_power, prec)?;
    Ok(omega_from_gamma(q, &g, eps, prec))
}

fn omega_from_gamma(q: u64, g: &Float, eps: f64, prec: Precision) -> Float {
    let ln_q = prec.float(q as f64).ln();
    (prec.float(1) + prec.float(eps)) * ln_q / g
}

/// `2 γ_q / ln q - 1`.
pub fn alpha_upper_bound(q: u64, prime_power: bool, prec: Precision) -> Result<Float> {
    let g = gamma(q, prime_power, prec)?;
    Ok(alpha_from_gamma(q, &g, prec))
}

fn alpha_from_gamma(q: u64, g: &Float, prec: Precision) -> Float {
    2 * Float::with_val(prec.bits(), g) / prec.float(q as f64).ln() - 1
}

/// `log_n ⌈g/f⌉`: the exponent bound from `f` disjoint copies of
/// `⟨n, n^ε, n⟩` with rank at most `g`. The ceiling is taken on integers.
pub fn schonhage_bound(f: &BigUint, n: &BigUint, eps: f64, g: &BigUint, prec: Precision) -> Result<Float> {
    check_eps(eps)?;
    if f.is_zero() || g < f {
        return Err(Error::InvalidArgument("need g >= f >= 1".into()));
    }
    if *n < BigUint::from(2u32) {
        return Err(Error::InvalidArgument("need n >= 2".into()));
    }
    let ceil = g.div_ceil(f);
    if ceil.is_one() {
        return Ok(prec.float(0));
    }
    Ok(prec.int(&ceil).ln() / prec.int(n).ln())
}

/// Everything the bounds module knows about one `q`.
#[derive(Clone, Debug, Serialize)]
pub struct BoundProfile {
    pub q: u64,
    pub prime_power: bool,
    pub rho: Option<Real>,
    pub rho_residual: Option<Real>,
    pub gamma: Real,
    pub c: Real,
    pub ln_q_over_gamma: Real,
    pub omega_lb_eps1: Real,
    pub alpha_ub: Real,
    pub digits: u32,
}

impl BoundProfile {
    pub fn new(q: u64, prec: Precision) -> Result<Self> {
        let prime_power = is_prime_power(q);
        let (rho, g) = if prime_power {
            let rho = solve_rho(q, &prec.tol(), prec)?;
            let g = gamma_from_rho(q, &rho);
            (Some(rho), g)
        } else {
            (None, gamma(q, false, prec)?)
        };
        let ln_q = prec.float(q as f64).ln();
        Ok(BoundProfile {
            q,
            prime_power,
            rho_residual: rho.as_ref().map(|r| Real(rho_residual(q, r))),
            rho: rho.map(Real),
            c: Real(Float::with_val(prec.bits(), g.exp_ref())),
            ln_q_over_gamma: Real(ln_q / &g),
            omega_lb_eps1: Real(omega_from_gamma(q, &g, 1.0, prec)),
            alpha_ub: Real(alpha_from_gamma(q, &g, prec)),
            gamma: Real(g),
            digits: prec.digits,
        })
    }

    /// `(1+ε) ln q / γ_q` for this profile's `γ`.
    pub fn omega_lb(&self, eps: f64, prec: Precision) -> Result<Float> {
        check_eps(eps)?;
        Ok(omega_from_gamma(self.q, &self.gamma.0, eps, prec))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveMode {
    PrimePowerOnly,
    /// Every `q`; `γ` from `ρ` on prime powers and from `κ` elsewhere.
    General,
}

impl std::str::FromStr for CurveMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prime-power-only" | "prime_power_only" => Ok(CurveMode::PrimePowerOnly),
            "general" => Ok(CurveMode::General),
            _ => Err(Error::InvalidArgument(format!("unknown curve mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveRow {
    pub profile: BoundProfile,
    /// `(ε, (1+ε) ln q / γ_q)` for each extra `ε`.
    pub omega_lb: Vec<(f64, Real)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Curve {
    pub mode: CurveMode,
    pub eps: Vec<f64>,
    pub rows: Vec<CurveRow>,
    pub omega_strictly_decreasing: bool,
    pub alpha_strictly_increasing: bool,
    pub gamma_ratio_strictly_increasing: bool,
}

fn strictly<T: PartialOrd>(v: &[T], increasing: bool) -> bool {
    v.windows(2).all(|w| if increasing { w[0] < w[1] } else { w[0] > w[1] })
}

/// Bound profiles for `q_min..=q_max`. The `ε = 1` column is always
/// present; `eps` adds further ω columns.
pub fn curve(q_min: u64, q_max: u64, mode: CurveMode, eps: &[f64], prec: Precision) -> Result<Curve> {
    if q_min < 2 || q_max < q_min {
        return Err(Error::InvalidArgument(format!("need 2 <= qmin <= qmax, got {q_min}..{q_max}")));
    }
    let extra: Vec<f64> = eps.iter().copied().filter(|&e| e != 1.0).collect();
    for &e in &extra {
        check_eps(e)?;
    }
    let mut rows = Vec::new();
    for q in q_min..=q_max {
        if mode == CurveMode::PrimePowerOnly && !is_prime_power(q) {
            continue;
        }
        let profile = BoundProfile::new(q, prec)?;
        let omega_lb = extra.iter().map(|&e| Ok((e, Real(profile.omega_lb(e, prec)?)))).collect::<Result<_>>()?;
        rows.push(CurveRow { profile, omega_lb });
    }
    let omega: Vec<_> = rows.iter().map(|r| &r.profile.omega_lb_eps1).collect();
    let alpha: Vec<_> = rows.iter().map(|r| &r.profile.alpha_ub).collect();
    let ratio: Vec<Float> = rows.iter().map(|r| Float::with_val(prec.bits(), 1 / &r.profile.ln_q_over_gamma.0)).collect();
    Ok(Curve {
        mode,
        eps: extra,
        omega_strictly_decreasing: strictly(&omega, false),
        alpha_strictly_increasing: strictly(&alpha, true),
        gamma_ratio_strictly_increasing: strictly(&ratio, true),
        rows,
    })
}

/// `v` printed with 12 significant digits.
pub fn sig12(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let decimals = (11 - v.abs().log10().floor() as i32).max(0) as usize;
    format!("{v:.decimals$}")
}

fn eps_column(e: f64) -> String {
    format!("omega_lb_eps{e}")
}

impl Curve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,prime_power,rho,gamma,omega_lb_eps1,alpha_ub");
        for &e in &self.eps {
            out.push(',');
            out.push_str(&eps_column(e));
        }
        out.push('\n');
        for row in &self.rows {
            let p = &row.profile;
            let rho = p.rho.as_ref().map(|r| sig12(r.to_f64())).unwrap_or_default();
            write!(
                out,
                "{},{},{},{},{},{}",
                p.q,
                p.prime_power,
                rho,
                sig12(p.gamma.to_f64()),
                sig12(p.omega_lb_eps1.to_f64()),
                sig12(p.alpha_ub.to_f64())
            )
            .expect("writing to a String");
            for (_, w) in &row.omega_lb {
                write!(out, ",{}", sig12(w.to_f64())).expect("writing to a String");
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::default()
    }

    fn close(a: &Float, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() < tol
    }

    #[test]
    fn prime_powers() {
        let pp: Vec<u64> = (1..=32).filter(|&q| is_prime_power(q)).collect();
        assert_eq!(pp, [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32]);
    }

    #[test]
    fn rho_for_two_is_one_half() {
        let rho = solve_rho(2, &p().tol(), p()).unwrap();
        let err = Float::with_val(p().bits(), &rho - 0.5f64).abs();
        assert!(err < 1e-45, "{rho}");
    }

    #[test]
    fn rho_for_seven() {
        let rho = solve_rho(7, &p().tol(), p()).unwrap();
        assert!(close(&rho, 0.7680, 5e-4));
    }

    #[test]
    fn kappa_gamma_for_six() {
        let g = gamma(6, false, p()).unwrap();
        let expected = (1.0 - 0.02831 / 6.0) * 6f64.ln();
        assert!(close(&g, expected, 1e-14));
        assert!(close(&omega_lower_bound(6, false, 1.0, p()).unwrap(), 2.0 / (1.0 - 0.02831 / 6.0), 1e-12));
    }

    #[test]
    fn schonhage_examples() {
        let b = |f: u32, n: u32, g: u32| schonhage_bound(&f.into(), &n.into(), 1.0, &g.into(), p()).unwrap().to_f64();
        assert!((b(1, 2, 7) - 7f64.log2()).abs() < 1e-14);
        assert_eq!(b(5, 3, 5), 0.0);
        assert!((b(3, 4, 100) - 34f64.ln() / 4f64.ln()).abs() < 1e-14);
        assert!(schonhage_bound(&3u32.into(), &2u32.into(), 1.0, &2u32.into(), p()).is_err());
    }

    #[test]
    fn precision_from_digits() {
        assert_eq!(Precision::new(50).unwrap().bits(), 183);
        assert!(Precision::new(3).is_err());
    }

    #[test]
    fn sig12_formatting() {
        assert_eq!(sig12(2.14135069812345), "2.14135069812");
        assert_eq!(sig12(0.5), "0.500000000000");
        assert_eq!(sig12(17.0), "17.0000000000");
    }

    #[test]
    fn csv_header_and_rows() {
        let c = curve(6, 7, CurveMode::General, &[1.0, 0.5], p()).unwrap();
        let csv = c.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "q,prime_power,rho,gamma,omega_lb_eps1,alpha_ub,omega_lb_eps0.5");
        assert!(lines[1].starts_with("6,false,,"));
        assert!(lines[2].starts_with("7,true,0.76780"));
        assert_eq!(lines.len(), 3);
    }
}
