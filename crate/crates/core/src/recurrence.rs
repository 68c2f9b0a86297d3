//! Exact values of `A_n`, the number of nonisomorphic leaf-induced subtrees of
//! the leaf-Fibonacci tree `f_n`.
//!
//! `A_0 = 1`, `A_1 = 2`, and for `n >= 2`
//!
//! ```text
//! A_n = 1 + C(1 + A_{n-2}, 2) + A_{n-2} * (A_{n-1} - A_{n-2})
//! ```
//!
//! which is the same as `1 + A_{n-2}/2 - A_{n-2}^2/2 + A_{n-2} A_{n-1}` but
//! stays in the integers.

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::asymptotics::predicted_decimal_digits;

/// Refuse to compute terms predicted to have more decimal digits than this.
pub const DEFAULT_DIGITS_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SequenceError {
    #[error("A_{n} would have about {predicted:.0} decimal digits, over the cap of {cap}")]
    DigitsCap { n: usize, predicted: f64, cap: u64 },
}

impl SequenceError {
    pub fn name(&self) -> &'static str {
        match self {
            SequenceError::DigitsCap { .. } => "DigitsCapExceeded",
        }
    }
}

/// `A_n` from `A_{n-2}` and `A_{n-1}`.
pub fn next_term(a2: &BigUint, a1: &BigUint) -> BigUint {
    let binom = ((a2 + 1u32) * a2) >> 1;
    BigUint::one() + binom + a2 * (a1 - a2)
}

/// `[A_0, ..., A_{n_max}]`.
pub fn n_sequence(n_max: usize) -> Vec<BigUint> {
    let mut seq = Vec::with_capacity(n_max + 1);
    seq.push(BigUint::from(1u32));
    if n_max >= 1 {
        seq.push(BigUint::from(2u32));
    }
    for n in 2..=n_max {
        let next = next_term(&seq[n - 2], &seq[n - 1]);
        seq.push(next);
    }
    seq
}

/// Like [`n_sequence`], refusing up front when the last term is predicted to
/// exceed `digits_cap` decimal digits.
pub fn n_sequence_capped(n_max: usize, digits_cap: u64) -> Result<Vec<BigUint>, SequenceError> {
    let predicted = predicted_decimal_digits(n_max);
    if predicted > digits_cap as f64 {
        return Err(SequenceError::DigitsCap {
            n: n_max,
            predicted,
            cap: digits_cap,
        });
    }
    Ok(n_sequence(n_max))
}

/// `A_n`.
pub fn n_of(n: usize) -> BigUint {
    n_sequence(n).pop().expect("nonempty")
}

/// Which of the two growth bounds failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// `2 A_n >= A_{n-1} A_{n-2}`, required from `n = 2`.
    Lower,
    /// `A_n <= A_{n-1} A_{n-2}`, required from `n = 3`.
    Upper,
}

/// First index violating a bound, if any.
pub fn first_bound_violation(seq: &[BigUint]) -> Option<(usize, Bound)> {
    for n in 2..seq.len() {
        let prod = &seq[n - 1] * &seq[n - 2];
        if &seq[n] * 2u32 < prod {
            return Some((n, Bound::Lower));
        }
        if n >= 3 && seq[n] > prod {
            return Some((n, Bound::Upper));
        }
    }
    None
}

/// True when both growth bounds hold along all of `seq`, which must have at
/// least four terms (shorter input returns false).
pub fn check_bounds(seq: &[BigUint]) -> bool {
    seq.len() >= 4 && first_bound_violation(seq).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::Zero;

    const KNOWN: [u64; 9] = [1, 2, 3, 6, 16, 82, 1193, 94506, 112034631];

    #[test]
    fn known_prefix() {
        let seq = n_sequence(8);
        let want: Vec<BigUint> = KNOWN.iter().map(|&v| BigUint::from(v)).collect();
        assert_eq!(seq, want);
        assert_eq!(n_sequence(0), vec![BigUint::from(1u32)]);
        assert_eq!(n_sequence(1).len(), 2);
        assert_eq!(n_of(5), BigUint::from(82u32));
        assert_eq!(n_of(1), BigUint::from(2u32));
    }

    #[test]
    fn ninth_term() {
        let a = BigUint::from(94506u32);
        let b = BigUint::from(112034631u32);
        let want = BigUint::one() + (&a + 1u32) * &a / 2u32 + &a * (&b - &a);
        assert_eq!(n_of(9), want);
        assert_eq!(want.to_string(), "10583479192522");
    }

    #[test]
    fn halved_form_agrees() {
        let seq = n_sequence(20);
        for n in 2..seq.len() {
            let a = BigInt::from(seq[n - 2].clone());
            let b = BigInt::from(seq[n - 1].clone());
            let lhs = BigInt::from(seq[n].clone()) * 2;
            let rhs = BigInt::from(2) + &a - &a * &a + BigInt::from(2) * &a * &b;
            assert_eq!(lhs, rhs, "n={n}");
        }
    }

    #[test]
    fn bounds() {
        assert!(check_bounds(&n_sequence(8)));
        assert!(check_bounds(&n_sequence(30)));
        let seq = n_sequence(3);
        assert_eq!(&seq[3], &(&seq[2] * &seq[1]));
        assert!(!check_bounds(&n_sequence(2)));

        let mut bad = n_sequence(6);
        bad[5] = BigUint::from(97u32); // > A_4 * A_3 = 96
        assert_eq!(first_bound_violation(&bad), Some((5, Bound::Upper)));
        bad[5] = BigUint::from(47u32); // 2 * 47 < 96
        assert_eq!(first_bound_violation(&bad), Some((5, Bound::Lower)));
        bad[5] = BigUint::zero();
        assert!(!check_bounds(&bad));
    }

    #[test]
    fn monotone_and_ratio_decay() {
        let seq = n_sequence(14);
        for n in 1..seq.len() {
            assert!(seq[n] > seq[n - 1]);
        }
        // A_{n-1}/A_n decreasing from n = 3: A_n^2 < A_{n-1} A_{n+1}
        for n in 3..seq.len() - 1 {
            assert!(&seq[n] * &seq[n] < &seq[n - 1] * &seq[n + 1], "n={n}");
        }
        assert!(&seq[8] * 1000u32 < seq[9]);
    }

    #[test]
    fn digits_cap() {
        assert!(n_sequence_capped(30, DEFAULT_DIGITS_CAP).is_ok());
        let err = n_sequence_capped(60, DEFAULT_DIGITS_CAP).unwrap_err();
        assert!(matches!(err, SequenceError::DigitsCap { n: 60, .. }));
        let digits = n_of(20).to_string().len() as f64;
        let predicted = predicted_decimal_digits(20);
        assert!((digits - predicted).abs() <= 2.0, "{digits} vs {predicted}");
    }
}
