//! Glue between astro-float and num-bigint, plus decimal rendering.

use std::cell::RefCell;

use astro_float::{BigFloat, Consts, RoundingMode, Sign, Word, EXPONENT_MAX};
use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};

pub(crate) const RM: RoundingMode = RoundingMode::ToEven;

/// Arithmetic at one fixed working precision.
pub(crate) struct Ctx {
    pub p: usize,
    cc: RefCell<Consts>,
}

impl Ctx {
    pub fn new(p: usize) -> Self {
        Ctx {
            p,
            cc: RefCell::new(Consts::new().expect("astro-float constant cache")),
        }
    }

    pub fn int(&self, v: u64) -> BigFloat {
        BigFloat::from_word(v as Word, self.p)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.p, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.p, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.p, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.p, RM)
    }

    pub fn ln(&self, a: &BigFloat) -> BigFloat {
        a.ln(self.p, RM, &mut self.cc.borrow_mut())
    }

    pub fn exp(&self, a: &BigFloat) -> BigFloat {
        a.exp(self.p, RM, &mut self.cc.borrow_mut())
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.p, RM)
    }

    pub fn ln2(&self) -> BigFloat {
        self.cc.borrow_mut().ln_2(self.p, RM)
    }

    pub fn ln10(&self) -> BigFloat {
        self.cc.borrow_mut().ln_10(self.p, RM)
    }

    /// `2^k`, `k` possibly negative.
    pub fn pow2(&self, k: i64) -> BigFloat {
        let mut one = self.int(1);
        // 1 = 0.1b * 2^1
        one.set_exponent((k + 1).clamp(i32::MIN as i64, EXPONENT_MAX as i64) as i32);
        one
    }

    /// `ln(1 + x)` without losing relative accuracy for tiny `x`.
    pub fn ln1p(&self, x: &BigFloat) -> BigFloat {
        if x.is_zero() {
            return x.clone();
        }
        let ex = x.exponent().expect("finite") as i64;
        if ex > -20 {
            let wp = self.p + 64;
            let y = x.add(&BigFloat::from_word(1, wp), wp, RM);
            let r = y.ln(wp, RM, &mut self.cc.borrow_mut());
            return r.add(&BigFloat::from_word(0, self.p), self.p, RM);
        }
        let stop = ex - self.p as i64 - 8;
        let mut sum = x.clone();
        let mut pow = x.clone();
        for k in 2u64.. {
            pow = self.mul(&pow, x);
            if pow.is_zero() || (pow.exponent().expect("finite") as i64) < stop {
                break;
            }
            let term = self.div(&pow, &self.int(k));
            sum = if k % 2 == 0 {
                self.sub(&sum, &term)
            } else {
                self.add(&sum, &term)
            };
        }
        sum
    }
}

/// `n` rounded to `p + 64` significant bits.
pub(crate) fn from_biguint(n: &BigUint, p: usize) -> BigFloat {
    if n.is_zero() {
        return BigFloat::from_word(0, p);
    }
    let keep = (p + 64) as u64;
    let bits = n.bits();
    let shift = bits.saturating_sub(keep);
    let top = n >> shift;
    let words: Vec<Word> = top.iter_u64_digits().map(|w| w as Word).collect();
    let e = (words.len() as u64 * 64 + shift) as i64;
    assert!(
        e <= EXPONENT_MAX as i64,
        "integer too large for a float exponent"
    );
    BigFloat::from_words(&words, Sign::Pos, e as i32)
}

pub(crate) fn from_bigint(n: &BigInt, p: usize) -> BigFloat {
    let f = from_biguint(n.magnitude(), p);
    if n.is_negative() {
        f.neg()
    } else {
        f
    }
}

/// `num / den` to about `p + 64` bits; `den` must be positive.
pub(crate) fn ratio(num: &BigInt, den: &BigUint, p: usize) -> BigFloat {
    assert!(!den.is_zero(), "zero denominator");
    if num.is_zero() {
        return BigFloat::from_word(0, p);
    }
    let mag = num.magnitude();
    let want = (p + 64) as i64 + den.bits() as i64 - mag.bits() as i64;
    let shift = want.max(0) as u64;
    let q: BigUint = (mag << shift) / den;
    let mut f = from_biguint(&q, p);
    let e = f.exponent().expect("finite") as i64 - shift as i64;
    f.set_exponent(e as i32);
    if num.is_negative() {
        f.neg()
    } else {
        f
    }
}

/// `floor(x)` for finite `x`.
pub(crate) fn floor_int(x: &BigFloat) -> BigInt {
    let (m, _, sign, e, _) = x.as_raw_parts().expect("finite value");
    let mut mag = BigUint::zero();
    for &w in m.iter().rev() {
        mag = (mag << 64u32) + BigUint::from(w);
    }
    let shift = e as i64 - 64 * m.len() as i64;
    let (int, exact) = if shift >= 0 {
        (mag << shift as u64, true)
    } else {
        let s = (-shift) as u64;
        let int = &mag >> s;
        let exact = (&int << s) == mag;
        (int, exact)
    };
    let int = BigInt::from(int);
    if sign == Sign::Neg {
        if exact {
            -int
        } else {
            -int - 1
        }
    } else {
        int
    }
}

/// `x` rounded to `digits` places after the decimal point.
pub fn format_fixed(x: &BigFloat, digits: usize) -> String {
    let p = x.mantissa_max_bit_len().unwrap_or(64) + 4 * digits + 64;
    let scale = from_biguint(&BigUint::from(10u32).pow(digits as u32), p);
    let half = BigFloat::from_word(1, p).div(&BigFloat::from_word(2, p), p, RM);
    let y = x.abs().mul(&scale, p, RM).add(&half, p, RM);
    let n = floor_int(&y).magnitude().to_string();
    let n = format!("{n:0>width$}", width = digits + 1);
    let (int, frac) = n.split_at(n.len() - digits);
    let sign = if x.is_negative() && n.bytes().any(|b| b != b'0') {
        "-"
    } else {
        ""
    };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// Rough `m.me±d` rendering with `sig` significant digits, for error bounds.
pub fn format_sci(x: &BigFloat, sig: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let (m, _, sign, e, _) = x.as_raw_parts().expect("finite value");
    let top = *m.last().expect("nonempty mantissa") as f64 / 2f64.powi(64);
    let l = top.log10() + e as f64 * std::f64::consts::LOG10_2;
    let mut d = l.floor();
    let mut mant = 10f64.powf(l - d);
    let r = 10f64.powi(sig as i32 - 1);
    mant = (mant * r).round() / r;
    if mant >= 10.0 {
        mant /= 10.0;
        d += 1.0;
    }
    let sign = if sign == Sign::Neg { "-" } else { "" };
    format!("{sign}{mant:.prec$}e{d}", prec = sig.saturating_sub(1))
}
