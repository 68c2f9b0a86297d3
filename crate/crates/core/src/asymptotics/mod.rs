//! The doubly exponential growth of `A_n`.
//!
//! Writing `E_n = ln(A_n / (A_{n-1} A_{n-2}))`, the logs `Q_n = ln A_n` obey
//! `Q_n = Q_{n-1} + Q_{n-2} + E_n`, a linear recurrence with characteristic
//! roots `λ1 = (1 - √5)/2` and `λ2 = (1 + √5)/2`. Solving it gives
//! `A_n ≈ K1 · K2^(λ2^n)` with
//!
//! ```text
//! ln K2 = (ln 2 + Σ_{i≥2} E_i λ2^(1-i)) / √5
//! ln K1 = -(1/√5) Σ_{i=2}^{n} E_i λ1^(n-i+1)    (as n grows)
//! ```
//!
//! The `K1` sum tends to zero because `|λ1| < 1` and `E_i → 0`, so its
//! limit is exactly 1. This module therefore only exposes the value at a
//! finite `n` and the empirical prefactor `C_n = A_n K2^(-λ2^n)`, and
//! [`k1_discrepancy`] lays both next to the published constant.
//!
//! All values carry a half-width that folds in series truncation and a
//! conservative rounding allowance.

mod float;

use std::fmt;

use astro_float::BigFloat;
use num_bigint::{BigInt, BigUint};
use thiserror::Error;

use crate::fib::fibonacci;
use crate::recurrence::n_sequence;
use float::{from_bigint, from_biguint, ratio, Ctx};

pub use float::{format_fixed, format_sci};

pub const DEFAULT_PRECISION: usize = 256;
pub const MIN_PRECISION: usize = 64;
pub const DEFAULT_TERMS: usize = 30;

/// Published values, to 14 places.
pub const PUBLISHED_K1: &str = "1.00001887227319";
pub const PUBLISHED_K2: &str = "1.48369689570172";

/// Above this propagated error the empirical prefactor is refused.
pub const PREFACTOR_TOLERANCE: f64 = 1e-6;

/// Extra bits carried internally beyond the requested precision.
const GUARD: usize = 64;

/// Below this size `A_n` is kept as an exact integer inside [`compute_k2`].
const EXACT_BITS: u64 = 1 << 16;

const LOG10_K2: f64 = 0.171_345_188_025_707_8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AsymptoticsError {
    #[error("E_{i} needs A_{needed}, but the sequence stops at A_{have}")]
    InsufficientSequence {
        i: usize,
        needed: usize,
        have: isize,
    },
    #[error("log argument for E_{i} is not positive; the sequence is corrupted")]
    NonPositiveLogArgument { i: usize },
    #[error("propagated error {error:.3e} for C_{n} exceeds {PREFACTOR_TOLERANCE:e}")]
    PrecisionInsufficient { n: usize, error: f64 },
}

impl AsymptoticsError {
    pub fn name(&self) -> &'static str {
        match self {
            AsymptoticsError::InsufficientSequence { .. } => "InsufficientSequence",
            AsymptoticsError::NonPositiveLogArgument { .. } => "NonPositiveLogArgument",
            AsymptoticsError::PrecisionInsufficient { .. } => "PrecisionInsufficient",
        }
    }
}

/// Approximate number of decimal digits of `A_n`.
pub fn predicted_decimal_digits(n: usize) -> f64 {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    phi.powi(n.min(i32::MAX as usize) as i32) * LOG10_K2 + 1.0
}

/// A value with a symmetric error bound.
#[derive(Debug, Clone)]
pub struct Estimate {
    pub value: BigFloat,
    pub half_width: BigFloat,
}

impl Estimate {
    pub fn to_f64(&self) -> f64 {
        format_fixed(&self.value, 17).parse().expect("decimal")
    }

    /// Decimal value followed by `± half-width`.
    pub fn display(&self, digits: usize) -> String {
        format!(
            "{} ± {}",
            format_fixed(&self.value, digits),
            format_sci(&self.half_width, 2)
        )
    }
}

/// `ln K2` and `K2` from a truncated series.
#[derive(Debug, Clone)]
pub struct K2Estimate {
    pub terms: usize,
    pub precision: usize,
    pub value: BigFloat,
    pub half_width: BigFloat,
    pub ln_value: BigFloat,
    pub ln_half_width: BigFloat,
    /// Bound on the dropped part of `Σ E_i λ2^(1-i)`, using `|E_{terms+1}|`
    /// as the size of every later term.
    pub truncation_bound: BigFloat,
    /// Whether `|E_{terms+2}| <= |E_{terms+1}|`, the premise of that bound.
    pub tail_decreasing: bool,
}

impl K2Estimate {
    pub fn estimate(&self) -> Estimate {
        Estimate {
            value: self.value.clone(),
            half_width: self.half_width.clone(),
        }
    }
}

/// `(1 - √5)/2`.
pub fn lambda1(precision: usize) -> BigFloat {
    let c = Ctx::new(precision);
    c.div(&c.sub(&c.int(1), &c.sqrt(&c.int(5))), &c.int(2))
}

/// `(1 + √5)/2`.
pub fn lambda2(precision: usize) -> BigFloat {
    let c = Ctx::new(precision);
    c.div(&c.add(&c.int(1), &c.sqrt(&c.int(5))), &c.int(2))
}

/// `λ2^n` as `F_n λ2 + F_{n-1}` (with `F_{-1} = 1`).
pub fn lambda2_pow(n: usize, precision: usize) -> BigFloat {
    let fn_ = fibonacci(n as u64);
    let fn1 = if n == 0 {
        BigUint::from(1u32)
    } else {
        fibonacci(n as u64 - 1)
    };
    let wp = precision + fn_.bits() as usize + GUARD;
    let c = Ctx::new(wp);
    let l2 = lambda2(wp);
    c.add(
        &c.mul(&from_biguint(&fn_, wp), &l2),
        &from_biguint(&fn1, wp),
    )
}

/// `x_i` with `E_i = ln(1 + x_i)`, from `a = A_{i-2}`, `b = A_{i-1}`:
/// `x = (2 + a - a²) / (2ab)`.
fn e_argument(a: &BigUint, b: &BigUint, i: usize, p: usize) -> Result<BigFloat, AsymptoticsError> {
    let a_ = BigInt::from(a.clone());
    let num: BigInt = BigInt::from(2) + &a_ - &a_ * &a_;
    let den: BigUint = a * b * 2u32;
    if &num + BigInt::from(den.clone()) <= BigInt::from(0) {
        return Err(AsymptoticsError::NonPositiveLogArgument { i });
    }
    Ok(ratio(&num, &den, p))
}

/// `E_i`; needs `A_{i-2}` and `A_{i-1}` in `seq`.
pub fn e_term(i: usize, seq: &[BigUint], precision: usize) -> Result<BigFloat, AsymptoticsError> {
    assert!(i >= 2, "E_i is defined from i = 2");
    if seq.len() < i {
        return Err(AsymptoticsError::InsufficientSequence {
            i,
            needed: i - 1,
            have: seq.len() as isize - 1,
        });
    }
    let c = Ctx::new(precision + GUARD);
    let x = e_argument(&seq[i - 2], &seq[i - 1], i, c.p)?;
    Ok(c.ln1p(&x))
}

/// `E_2..=E_last` at working precision `wp`, regenerating `A_n` as it goes.
///
/// While `A_{i-2}` has at most `exact_bits` bits the exact formula is used.
/// Past that, `1/A` is far below `2^-wp`, so `x_i = -(A_{i-2}/A_{i-1})/2`
/// to working precision and only `ln A` needs to be tracked.
fn e_series(last: usize, wp: usize, exact_bits: u64) -> Vec<BigFloat> {
    let c = Ctx::new(wp);
    let exact_bits = exact_bits.max(2 * wp as u64 + 128);
    let mut out = Vec::with_capacity(last.saturating_sub(1));
    let (mut a, mut b) = (BigUint::from(1u32), BigUint::from(2u32));
    let mut i = 2;
    while i <= last && a.bits() <= exact_bits {
        let x = e_argument(&a, &b, i, wp).expect("sequence is well formed");
        out.push(c.ln1p(&x));
        let next = crate::recurrence::next_term(&a, &b);
        a = std::mem::replace(&mut b, next);
        i += 1;
    }
    if i > last {
        return out;
    }

    // log domain; errors in ln A add up along the recurrence, so carry
    // roughly one extra bit per step
    let l = Ctx::new(wp + GUARD + last);
    let mut la = l.ln(&from_biguint(&a, l.p));
    let mut lb = l.ln(&from_biguint(&b, l.p));
    while i <= last {
        if lb.exponent().expect("finite") > 28 {
            // ln A past 2^28 would soon leave the float exponent range; the
            // remaining |E_i| are below 2^(-10^7) and are flushed to zero
            out.resize(last - 1, BigFloat::from_word(0, wp));
            break;
        }
        let r = l.exp(&l.sub(&la, &lb));
        let x = c.div(&r, &c.int(2)).neg();
        let e = c.ln1p(&x);
        let next = l.add(&l.add(&la, &lb), &e);
        la = std::mem::replace(&mut lb, next);
        out.push(e);
        i += 1;
    }
    out
}

/// `K2` from the series truncated after `E_terms`.
pub fn compute_k2(terms: usize, precision: usize) -> K2Estimate {
    assert!(terms >= 2, "need at least the E_2 term");
    assert!(
        precision >= MIN_PRECISION,
        "precision below {MIN_PRECISION} bits"
    );
    k2_with(terms, precision, EXACT_BITS)
}

fn k2_with(terms: usize, precision: usize, exact_bits: u64) -> K2Estimate {
    let wp = precision + GUARD;
    let c = Ctx::new(wp);
    let e = e_series(terms + 2, wp, exact_bits); // e[k] = E_{k+2}
    let inv = c.div(&c.int(1), &lambda2(wp));
    let sqrt5 = c.sqrt(&c.int(5));

    let mut sum = c.ln2();
    let mut w = c.int(1);
    for ei in &e[..terms - 1] {
        w = c.mul(&w, &inv);
        sum = c.add(&sum, &c.mul(ei, &w));
    }

    let next = e[terms - 1].abs();
    let after = e[terms].abs();
    let tail_decreasing = after <= next;
    // |E_{terms+1}| λ2^(1-terms) / (1 - λ2^-1)
    let w_tail = c.div(&w, &inv);
    let truncation_bound = c.div(&c.mul(&next, &w_tail), &c.sub(&c.int(1), &inv));

    let ln_value = c.div(&sum, &sqrt5);
    let value = c.exp(&ln_value);
    let rounding = c.pow2(-(precision as i64 - 8));
    let ln_half_width = c.add(&c.div(&truncation_bound, &sqrt5), &rounding);
    let half_width = c.mul(&value, &expm1_bound(&c, &ln_half_width));

    K2Estimate {
        terms,
        precision,
        value,
        half_width,
        ln_value,
        ln_half_width,
        truncation_bound,
        tail_decreasing,
    }
}

/// An upper bound on `e^h - 1` for `h >= 0`.
fn expm1_bound(c: &Ctx, h: &BigFloat) -> BigFloat {
    if h.is_zero() || h.exponent().expect("finite") < -10 {
        // h + h² < 2h
        c.mul(h, &c.int(2))
    } else {
        c.sub(&c.exp(h), &c.int(1))
    }
}

/// `exp(-(1/√5) Σ_{i=2}^{n} E_i λ1^(n-i+1))` at the given `n`, no limit taken.
pub fn compute_k1_truncated(
    n: usize,
    seq: &[BigUint],
    precision: usize,
) -> Result<Estimate, AsymptoticsError> {
    assert!(n >= 2, "the sum starts at i = 2");
    if seq.len() <= n {
        return Err(AsymptoticsError::InsufficientSequence {
            i: n,
            needed: n,
            have: seq.len() as isize - 1,
        });
    }
    let wp = precision + GUARD;
    let c = Ctx::new(wp);
    let l1 = lambda1(wp);
    let mut sum = c.int(0);
    let mut w = c.int(1);
    for i in (2..=n).rev() {
        w = c.mul(&w, &l1);
        sum = c.add(&sum, &c.mul(&e_term(i, seq, wp)?, &w));
    }
    let value = c.exp(&c.div(&sum, &c.sqrt(&c.int(5))).neg());
    let half_width = c.mul(&value, &c.pow2(-(precision as i64 - 8)));
    Ok(Estimate { value, half_width })
}

/// `C_n = A_n K2^(-λ2^n)`, whose limit is the true `K1`.
pub fn prefactor_empirical(
    n: usize,
    k2: &K2Estimate,
    seq: &[BigUint],
    precision: usize,
) -> Result<Estimate, AsymptoticsError> {
    if seq.len() <= n {
        return Err(AsymptoticsError::InsufficientSequence {
            i: n,
            needed: n,
            have: seq.len() as isize - 1,
        });
    }
    let pow = lambda2_pow(n, precision);
    let wp = pow.mantissa_max_bit_len().expect("finite");
    let c = Ctx::new(wp);
    let ln_a = c.ln(&from_biguint(&seq[n], wp));
    let ln_c = c.sub(&ln_a, &c.mul(&pow, &k2.ln_value));
    let value = c.exp(&ln_c);

    // an error h in ln K2 becomes λ2^n h in ln C_n
    let h = c.add(
        &c.mul(&pow, &k2.ln_half_width),
        &c.pow2(-(precision as i64 - 8)),
    );
    let half_width = c.mul(&value, &expm1_bound(&c, &h));
    let err: f64 = format_sci(&half_width, 3).parse().expect("float");
    if err > PREFACTOR_TOLERANCE {
        return Err(AsymptoticsError::PrecisionInsufficient { n, error: err });
    }
    Ok(Estimate { value, half_width })
}

/// Constants needed for predictions, at one precision.
#[derive(Debug, Clone)]
pub struct AsymptoticConstants {
    pub lambda1: BigFloat,
    pub lambda2: BigFloat,
    pub k2: K2Estimate,
    pub k1_truncated: Estimate,
    /// The `n` at which `k1_truncated` was evaluated.
    pub k1_index: usize,
    pub terms_used: usize,
    pub precision: usize,
}

/// Default index for [`AsymptoticConstants::k1_truncated`].
pub const DEFAULT_K1_INDEX: usize = 16;

pub fn compute_constants(precision: usize, terms: usize, k1_index: usize) -> AsymptoticConstants {
    let seq = n_sequence(k1_index);
    AsymptoticConstants {
        lambda1: lambda1(precision + GUARD),
        lambda2: lambda2(precision + GUARD),
        k2: compute_k2(terms, precision),
        k1_truncated: compute_k1_truncated(k1_index, &seq, precision)
            .expect("sequence covers the index"),
        k1_index,
        terms_used: terms,
        precision,
    }
}

/// Value of `K1` used in a prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum K1Mode {
    /// The published constant.
    Paper,
    /// The limit of the defining sum, which is 1.
    Unity,
}

/// An estimate `K1 · K2^x` of `A_n`, kept in log form.
#[derive(Debug, Clone)]
pub struct Prediction {
    pub n: usize,
    pub k1_mode: K1Mode,
    pub by_leaves: bool,
    /// `x`: `λ2^n`, or `((3√5 - 5)/2) F_{n+2}` in the leaf-count form.
    pub exponent: BigFloat,
    pub ln_value: BigFloat,
    precision: usize,
}

fn published_constant(text: &str, p: usize) -> BigFloat {
    let (int, frac) = text.split_once('.').expect("decimal point");
    let num: BigInt = format!("{int}{frac}").parse().expect("digits");
    ratio(&num, &BigUint::from(10u32).pow(frac.len() as u32), p)
}

/// The published `K1`.
pub fn published_k1(precision: usize) -> BigFloat {
    published_constant(PUBLISHED_K1, precision)
}

/// The published `K2`.
pub fn published_k2(precision: usize) -> BigFloat {
    published_constant(PUBLISHED_K2, precision)
}

fn k1_ln(mode: K1Mode, c: &Ctx) -> BigFloat {
    match mode {
        K1Mode::Paper => {
            let k1 = published_k1(c.p);
            c.ln(&k1)
        }
        K1Mode::Unity => c.int(0),
    }
}

/// `K1 · K2^(λ2^n)`.
pub fn predict(n: usize, constants: &AsymptoticConstants, k1_mode: K1Mode) -> Prediction {
    let exponent = lambda2_pow(n, constants.precision);
    finish_prediction(n, constants, k1_mode, false, exponent)
}

/// `K1 · K2^(((3√5 - 5)/2) |f_n|)`, the same estimate driven by the leaf
/// count `|f_n| = F_{n+2}`.
pub fn predict_by_leaves(n: usize, constants: &AsymptoticConstants, k1_mode: K1Mode) -> Prediction {
    let leaves = fibonacci(n as u64 + 2);
    let wp = constants.precision + leaves.bits() as usize + GUARD;
    let c = Ctx::new(wp);
    let coef = c.div(
        &c.sub(&c.mul(&c.int(3), &c.sqrt(&c.int(5))), &c.int(5)),
        &c.int(2),
    );
    let exponent = c.mul(&coef, &from_biguint(&leaves, wp));
    finish_prediction(n, constants, k1_mode, true, exponent)
}

fn finish_prediction(
    n: usize,
    constants: &AsymptoticConstants,
    k1_mode: K1Mode,
    by_leaves: bool,
    exponent: BigFloat,
) -> Prediction {
    let wp = exponent.mantissa_max_bit_len().expect("finite");
    let c = Ctx::new(wp);
    let ln_value = c.add(
        &k1_ln(k1_mode, &c),
        &c.mul(&exponent, &constants.k2.ln_value),
    );
    Prediction {
        n,
        k1_mode,
        by_leaves,
        exponent,
        ln_value,
        precision: constants.precision,
    }
}

impl Prediction {
    /// `m.mmm…e<d>` with `sig` significant digits.
    pub fn scientific(&self, sig: usize) -> String {
        let wp = self.ln_value.mantissa_max_bit_len().expect("finite");
        let c = Ctx::new(wp);
        let log10 = c.div(&self.ln_value, &c.ln10());
        let d = float::floor_int(&log10);
        let frac = c.sub(&log10, &from_bigint(&d, wp));
        let mant = c.exp(&c.mul(&frac, &c.ln10()));
        let mut text = format_fixed(&mant, sig.saturating_sub(1));
        let mut d = d;
        if text.starts_with("10") {
            text = format_fixed(&c.div(&mant, &c.int(10)), sig.saturating_sub(1));
            d += 1;
        }
        format!("{text}e{d}")
    }

    /// Plain decimal value when it has at most `max_digits` integer digits.
    pub fn plain(&self, places: usize, max_digits: usize) -> Option<String> {
        let bits = self.ln_value.exponent().unwrap_or(0);
        // ln value < 2^bits, so the value has at most 0.63 * 2^bits digits
        if bits > 0 && (1u64 << bits.min(60)) as f64 * 0.44 > max_digits as f64 {
            return None;
        }
        let v = self.value();
        let text = format_fixed(&v, places);
        (text.split('.').next().expect("digits").len() <= max_digits).then_some(text)
    }

    /// The estimate itself; may overflow to infinity for very large `n`.
    pub fn value(&self) -> BigFloat {
        let c = Ctx::new(self.precision + GUARD);
        c.exp(&self.ln_value)
    }

    /// `estimate / exact - 1`.
    pub fn relative_error(&self, exact: &BigUint) -> BigFloat {
        let wp = self.ln_value.mantissa_max_bit_len().expect("finite");
        let c = Ctx::new(wp);
        let ln_exact = c.ln(&from_biguint(exact, wp));
        let d = c.sub(&self.ln_value, &ln_exact);
        let r = c.exp(&d);
        c.sub(&r, &c.int(1))
    }
}

/// One row of [`K1Discrepancy`].
#[derive(Debug, Clone)]
pub struct DiscrepancyRow {
    pub n: usize,
    pub k1_truncated: Estimate,
    pub prefactor: Estimate,
}

/// The finite-`n` views of `K1` next to its published value and its limit.
#[derive(Debug, Clone)]
pub struct K1Discrepancy {
    pub published: BigFloat,
    pub rows: Vec<DiscrepancyRow>,
}

/// Tabulates `K1_trunc(n)` and `C_n` over `ns` (each `n >= 2`).
pub fn k1_discrepancy(
    ns: std::ops::RangeInclusive<usize>,
    k2: &K2Estimate,
    precision: usize,
) -> Result<K1Discrepancy, AsymptoticsError> {
    let seq = n_sequence(*ns.end());
    let mut rows = Vec::new();
    for n in ns {
        rows.push(DiscrepancyRow {
            n,
            k1_truncated: compute_k1_truncated(n, &seq, precision)?,
            prefactor: prefactor_empirical(n, k2, &seq, precision)?,
        });
    }
    Ok(K1Discrepancy {
        published: published_k1(precision + GUARD),
        rows,
    })
}

impl fmt::Display for K1Discrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.published.mantissa_max_bit_len().unwrap_or(128);
        let c = Ctx::new(p);
        writeln!(f, "K1 published: {PUBLISHED_K1}")?;
        writeln!(
            f,
            "K1 as a limit: 1 (the defining sum tends to 0 since |λ1| < 1 and E_i -> 0)"
        )?;
        writeln!(
            f,
            "{:>3}  {:>22}  {:>22}  {:>10}  {:>10}",
            "n", "K1_trunc(n)", "C_n", "C_n-pub", "C_n-1"
        )?;
        for r in &self.rows {
            let cn = &r.prefactor.value;
            writeln!(
                f,
                "{:>3}  {:>22}  {:>22}  {:>10}  {:>10}",
                r.n,
                format_fixed(&r.k1_truncated.value, 18),
                format_fixed(cn, 18),
                format_sci(&c.sub(cn, &self.published), 2),
                format_sci(&c.sub(cn, &c.int(1)), 2),
            )?;
        }
        if let Some(last) = self.rows.last() {
            let cn = &last.prefactor.value;
            let to_published = c.sub(cn, &self.published).abs();
            let to_one = c.sub(cn, &c.int(1)).abs();
            let closer = if to_one < to_published {
                "1"
            } else {
                "the published value"
            };
            writeln!(f, "C_{} is closer to {closer}", last.n)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::float::RM;
    use super::*;

    /// 60-digit references from an independent 512-bit evaluation.
    const K2_REF: &str = "1.483696895701722983475616235657749439457451968726222834907941";
    const K2_TWO_TERMS: &str = "1.525088806995946146153561976531468393028916744775050269066757";

    fn close(x: &BigFloat, want: &str, tol_exp: i32) -> bool {
        let (int, frac) = want.split_once('.').unwrap();
        let neg = int.starts_with('-');
        let num: BigInt = format!("{}{frac}", int.trim_start_matches('-'))
            .parse()
            .unwrap();
        let num = if neg { -num } else { num };
        let w = ratio(&num, &BigUint::from(10u32).pow(frac.len() as u32), 512);
        let d = x.sub(&w, 512, RM).abs();
        let tol = BigFloat::from_word(1, 64).div(
            &BigFloat::from_word(10, 64).powi(tol_exp as usize, 64, RM),
            64,
            RM,
        );
        d <= tol
    }

    #[test]
    fn lambda_identities() {
        let p = 256;
        let c = Ctx::new(p);
        let (l1, l2) = (lambda1(p), lambda2(p));
        let tiny = c.pow2(-(p as i64 - 4));
        assert!(c.sub(&c.add(&l1, &l2), &c.int(1)).abs() <= tiny);
        assert!(c.add(&c.mul(&l1, &l2), &c.int(1)).abs() <= tiny);
        assert!(c.sub(&c.sub(&l2, &l1), &c.sqrt(&c.int(5))).abs() <= tiny);
    }

    #[test]
    fn lambda2_power_identity() {
        let p = 256;
        let c = Ctx::new(p);
        let l2 = lambda2(p + 64);
        let mut it = c.int(1);
        for n in 0..=64 {
            let fib = lambda2_pow(n, p);
            let rel = c.div(&c.sub(&fib, &it), &it).abs();
            assert!(rel <= c.pow2(-(p as i64 - 16)), "n={n}");
            it = it.mul(&l2, p + 64, RM);
        }
    }

    #[test]
    fn e_terms() {
        let seq = n_sequence(20);
        let c = Ctx::new(256);
        let e2 = e_term(2, &seq, 256).unwrap();
        let want = c.ln(&ratio(&BigInt::from(3), &BigUint::from(2u32), 256));
        assert!(c.sub(&e2, &want).abs() <= c.pow2(-250));
        assert!(e_term(3, &seq, 256).unwrap().is_zero());
        let e4 = e_term(4, &seq, 256).unwrap();
        let want = c.ln(&ratio(&BigInt::from(8), &BigUint::from(9u32), 256));
        assert!(e4.is_negative());
        assert!(c.sub(&e4, &want).abs() <= c.pow2(-250));

        assert_eq!(
            e_term(9, &seq[..5], 256).unwrap_err(),
            AsymptoticsError::InsufficientSequence {
                i: 9,
                needed: 8,
                have: 4
            }
        );
        let mut bad = seq.clone();
        bad[7] = BigUint::from(1u32);
        let err = e_term(8, &bad, 256).unwrap_err();
        assert_eq!(err.name(), "NonPositiveLogArgument");
    }

    #[test]
    fn e_identity() {
        for p in [64usize, 256] {
            let seq = n_sequence(20);
            let c = Ctx::new(p + 128);
            let logs: Vec<BigFloat> = seq.iter().map(|a| c.ln(&from_biguint(a, c.p))).collect();
            for i in 2..=20 {
                let direct = c.sub(&c.sub(&logs[i], &logs[i - 1]), &logs[i - 2]);
                let e = e_term(i, &seq, p).unwrap();
                assert!(
                    c.sub(&direct, &e).abs() <= c.pow2(-(p as i64 - 8)),
                    "p={p} i={i}"
                );
            }
        }
    }

    #[test]
    fn log_domain_matches_exact() {
        let wp = 320;
        let exact = e_series(28, wp, u64::MAX);
        let mixed = e_series(28, wp, 0);
        let c = Ctx::new(wp);
        for (k, (a, b)) in exact.iter().zip(&mixed).enumerate() {
            let d = c.sub(a, b).abs();
            let rel = c.mul(&a.abs(), &c.pow2(-(wp as i64 - 16)));
            assert!(d <= rel, "i={}", k + 2);
        }
        let far = e_series(60, wp, 0);
        assert_eq!(far.len(), 59);
        assert!(far[58].is_zero());
    }

    #[test]
    fn k2_reference() {
        let k = compute_k2(30, 256);
        assert!(close(&k.value, K2_REF, 58));
        assert!(k.tail_decreasing);
        assert!(close(&compute_k2(20, 128).value, K2_REF, 35));
        assert!(close(&compute_k2(20, 128).value, PUBLISHED_K2, 14));
        let two = compute_k2(2, 256);
        assert!(close(&two.value, K2_TWO_TERMS, 58));
        assert!(!two.tail_decreasing);
    }

    #[test]
    fn k2_saturates() {
        let c = Ctx::new(256);
        let a = compute_k2(20, 256);
        let b = compute_k2(40, 256);
        let diff = c.sub(&a.value, &b.value).abs();
        assert!(diff.is_zero() || diff.exponent().unwrap() < -166); // < 1e-50
    }

    #[test]
    fn k2_truncation_bound_covers_next_step() {
        let c = Ctx::new(256);
        for t in 3..16 {
            let a = compute_k2(t, 256);
            let b = compute_k2(t + 1, 256);
            let d = c.sub(&a.ln_value, &b.ln_value).abs();
            assert!(d <= a.ln_half_width, "terms={t}");
        }
    }

    #[test]
    fn k1_truncated() {
        let seq = n_sequence(16);
        let k3 = compute_k1_truncated(3, &seq, 256).unwrap();
        let c = Ctx::new(320);
        let l1 = lambda1(320);
        let want = c.exp(
            &c.div(
                &c.mul(
                    &c.mul(&l1, &l1),
                    &c.ln(&ratio(&BigInt::from(3), &BigUint::from(2u32), 320)),
                ),
                &c.sqrt(&c.int(5)),
            )
            .neg(),
        );
        assert!(c.sub(&k3.value, &want).abs() <= c.pow2(-240));
        let k8 = compute_k1_truncated(8, &seq, 256).unwrap().to_f64();
        assert!(k8 > 1.004 && k8 < 1.008, "{k8}");
        assert!(close(
            &compute_k1_truncated(8, &seq, 256).unwrap().value,
            "1.0059093126026026361",
            18
        ));
        assert!(close(
            &compute_k1_truncated(16, &seq, 256).unwrap().value,
            "1.000129359630416937",
            17
        ));
        // oscillates around 1 and shrinks
        let mut prev = f64::INFINITY;
        for n in 8..=16 {
            let d = compute_k1_truncated(n, &seq, 256).unwrap().to_f64() - 1.0;
            assert_eq!(d > 0.0, n % 2 == 0, "n={n}");
            assert!(d.abs() < prev);
            prev = d.abs();
        }
        assert_eq!(
            compute_k1_truncated(9, &seq[..5], 256).unwrap_err().name(),
            "InsufficientSequence"
        );
    }

    #[test]
    fn prefactor() {
        let seq = n_sequence(17);
        let k2 = compute_k2(30, 256);
        let c0 = prefactor_empirical(0, &k2, &seq, 256).unwrap();
        let c = Ctx::new(320);
        let inv = c.div(&c.int(1), &k2.value);
        assert!(c.sub(&c0.value, &inv).abs() <= c.pow2(-240));
        let refs = [
            (8, "0.99948376716281834244"),
            (12, "0.99992389451805208185"),
            (16, "0.99998889599893067264"),
            (17, "1.0000068627117219768"),
        ];
        for (n, want) in refs {
            let cn = prefactor_empirical(n, &k2, &seq, 256).unwrap();
            assert!(close(&cn.value, want, 18), "n={n}");
            assert!(format_sci(&cn.half_width, 2).parse::<f64>().unwrap() < 1e-60);
        }
    }

    #[test]
    fn prefactor_precision_guard() {
        let seq = n_sequence(12);
        let k2 = compute_k2(3, 256);
        let err = prefactor_empirical(12, &k2, &seq, 256).unwrap_err();
        assert!(matches!(
            err,
            AsymptoticsError::PrecisionInsufficient { n: 12, .. }
        ));
    }

    #[test]
    fn predictions() {
        let k = compute_constants(256, 30, 16);
        let seq = n_sequence(8);
        let p8 = predict(8, &k, K1Mode::Paper);
        let rel: f64 = format_sci(&p8.relative_error(&seq[8]), 4).parse().unwrap();
        assert!(rel.abs() < 1e-3, "{rel}");
        let p5 = predict(5, &k, K1Mode::Unity);
        let rel: f64 = format_sci(&p5.relative_error(&seq[5]), 4).parse().unwrap();
        assert!(rel.abs() < 0.15, "{rel}");
        assert_eq!(p8.scientific(4), "1.121e8");
        assert!(p8.plain(1, 30).unwrap().starts_with("1120"));
        assert!(predict(60, &k, K1Mode::Paper).plain(1, 30).is_none());

        let leaves = predict_by_leaves(8, &k, K1Mode::Paper);
        let c = Ctx::new(320);
        let gap = c.sub(&leaves.exponent, &p8.exponent).abs();
        let l1 = lambda1(64).abs();
        let bound = c.div(&l1.powi(10, 64, RM), &c.sqrt(&c.int(5)));
        assert!(gap <= bound);
    }

    #[test]
    fn prediction_forms_converge() {
        let k = compute_constants(256, 30, 16);
        let c = Ctx::new(320);
        let a = predict(40, &k, K1Mode::Paper);
        let b = predict_by_leaves(40, &k, K1Mode::Paper);
        let ratio_ln = c.sub(&a.ln_value, &b.ln_value).abs();
        assert!(ratio_ln <= c.pow2(-20)); // ratio within 1e-6
    }

    #[test]
    fn digits_estimate() {
        let seq = n_sequence(22);
        for (n, a) in seq.iter().enumerate().skip(5) {
            let d = a.to_string().len() as f64;
            assert!((d - predicted_decimal_digits(n)).abs() <= 1.5, "n={n}");
        }
    }

    #[test]
    fn discrepancy_report() {
        let k2 = compute_k2(30, 256);
        let rep = k1_discrepancy(12..=16, &k2, 256).unwrap();
        assert_eq!(rep.rows.len(), 5);
        let text = rep.to_string();
        assert!(text.contains("K1 published: 1.00001887227319"));
        assert!(text.contains("C_16 is closer to 1"));
    }
}
