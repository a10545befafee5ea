//! Exact arithmetic in the ring Z[σ], where σ = (√5 − 1)/2 is the positive
//! root of σ² + σ = 1.
//!
//! Every weight, slack and bound in this crate is a [`SigmaValue`]. Values are
//! stored as a pair of `i128` coefficients; all arithmetic is checked and the
//! operator impls panic on overflow instead of wrapping. Powers of σ up to
//! |i| ≈ 180 fit comfortably, which is far beyond anything a board produces.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;

/// Floating point value of σ, for display only.
pub const SIGMA_F64: f64 = 0.618_033_988_749_894_8;

/// The number `a + bσ`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SigmaValue {
    pub a: i128,
    pub b: i128,
}

const OVERFLOW: &str = "Z[σ] coefficient overflow";

impl SigmaValue {
    pub const ZERO: SigmaValue = SigmaValue { a: 0, b: 0 };
    pub const ONE: SigmaValue = SigmaValue { a: 1, b: 0 };
    pub const SIGMA: SigmaValue = SigmaValue { a: 0, b: 1 };

    pub const fn new(a: i128, b: i128) -> Self {
        SigmaValue { a, b }
    }

    pub fn from_int(a: i128) -> Self {
        SigmaValue { a, b: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn checked_add(self, rhs: Self) -> Option<Self> {
        Some(SigmaValue {
            a: self.a.checked_add(rhs.a)?,
            b: self.b.checked_add(rhs.b)?,
        })
    }

    pub fn checked_sub(self, rhs: Self) -> Option<Self> {
        Some(SigmaValue {
            a: self.a.checked_sub(rhs.a)?,
            b: self.b.checked_sub(rhs.b)?,
        })
    }

    /// (a+bσ)(c+dσ) = (ac+bd) + (ad+bc−bd)σ, using σ² = 1 − σ.
    pub fn checked_mul(self, rhs: Self) -> Option<Self> {
        let ac = self.a.checked_mul(rhs.a)?;
        let bd = self.b.checked_mul(rhs.b)?;
        let ad = self.a.checked_mul(rhs.b)?;
        let bc = self.b.checked_mul(rhs.a)?;
        Some(SigmaValue {
            a: ac.checked_add(bd)?,
            b: ad.checked_add(bc)?.checked_sub(bd)?,
        })
    }

    pub fn checked_scale(self, k: i128) -> Option<Self> {
        Some(SigmaValue {
            a: self.a.checked_mul(k)?,
            b: self.b.checked_mul(k)?,
        })
    }

    pub fn scale(self, k: i128) -> Self {
        self.checked_scale(k).expect(OVERFLOW)
    }

    /// Sign of the real number `a + bσ`, decided exactly.
    ///
    /// 2(a + bσ) = (2a − b) + b√5, so the sign follows from comparing
    /// (2a − b)² against 5b² when the two terms disagree in sign.
    pub fn signum(&self) -> Ordering {
        match (
            self.a.checked_mul(2).and_then(|t| t.checked_sub(self.b)),
            self.b,
        ) {
            (Some(p), q) => sign_p_plus_q_sqrt5(p, q),
            (None, _) => {
                let p = BigInt::from(self.a) * 2 - BigInt::from(self.b);
                sign_p_plus_q_sqrt5_big(p, BigInt::from(self.b))
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    /// Double-precision approximation. Never used for decisions.
    ///
    /// Small values with large coefficients cancel badly in a + bσ, so they
    /// are evaluated as N / (a + bσ̄) with the exact norm N = a² − ab − b²
    /// and the conjugate σ̄ = −1 − σ.
    pub fn to_f64(&self) -> f64 {
        let (a, b) = (self.a as f64, self.b as f64);
        let direct = a + b * SIGMA_F64;
        let conj = a - b * (1.0 + SIGMA_F64);
        if direct.abs() >= conj.abs() {
            return direct;
        }
        let norm = self
            .a
            .checked_mul(self.a)
            .and_then(|aa| aa.checked_sub(self.a.checked_mul(self.b)?))
            .and_then(|t| t.checked_sub(self.b.checked_mul(self.b)?));
        match norm {
            Some(n) => n as f64 / conj,
            None => direct,
        }
    }

    /// The exact part of the display form, e.g. `2-3σ`.
    pub fn exact_string(&self) -> String {
        let coef = |b: i128| match b {
            1 => "σ".to_string(),
            -1 => "-σ".to_string(),
            _ => format!("{b}σ"),
        };
        match (self.a, self.b) {
            (a, 0) => a.to_string(),
            (0, b) => coef(b),
            (a, b) if b > 0 => format!("{a}+{}", coef(b)),
            (a, b) => format!("{a}{}", coef(b)),
        }
    }
}

fn sign_p_plus_q_sqrt5(p: i128, q: i128) -> Ordering {
    match (p.signum(), q.signum()) {
        (0, s) | (s, 0) => s.cmp(&0),
        (1, 1) => Ordering::Greater,
        (-1, -1) => Ordering::Less,
        _ => {
            // Opposite signs: compare p² with 5q².
            let p2 = p.checked_mul(p);
            let q5 = q.checked_mul(q).and_then(|v| v.checked_mul(5));
            match (p2, q5) {
                (Some(p2), Some(q5)) => {
                    let mag = p2.cmp(&q5);
                    if p > 0 {
                        mag
                    } else {
                        mag.reverse()
                    }
                }
                _ => sign_p_plus_q_sqrt5_big(BigInt::from(p), BigInt::from(q)),
            }
        }
    }
}

fn sign_p_plus_q_sqrt5_big(p: BigInt, q: BigInt) -> Ordering {
    let zero = BigInt::from(0);
    let ps = p.cmp(&zero);
    let qs = q.cmp(&zero);
    match (ps, qs) {
        (Ordering::Equal, s) | (s, Ordering::Equal) => s,
        (Ordering::Greater, Ordering::Greater) => Ordering::Greater,
        (Ordering::Less, Ordering::Less) => Ordering::Less,
        _ => {
            let mag = (&p * &p).cmp(&(&q * &q * 5));
            if ps == Ordering::Greater {
                mag
            } else {
                mag.reverse()
            }
        }
    }
}

impl Add for SigmaValue {
    type Output = SigmaValue;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(rhs).expect(OVERFLOW)
    }
}

impl AddAssign for SigmaValue {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for SigmaValue {
    type Output = SigmaValue;
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(rhs).expect(OVERFLOW)
    }
}

impl SubAssign for SigmaValue {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl Neg for SigmaValue {
    type Output = SigmaValue;
    fn neg(self) -> Self {
        SigmaValue::ZERO - self
    }
}

impl Mul for SigmaValue {
    type Output = SigmaValue;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(rhs).expect(OVERFLOW)
    }
}

impl Sum for SigmaValue {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(SigmaValue::ZERO, Add::add)
    }
}

impl PartialOrd for SigmaValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SigmaValue {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        match self.checked_sub(*other) {
            Some(d) => d.signum(),
            None => {
                let p = (BigInt::from(self.a) - BigInt::from(other.a)) * 2
                    - (BigInt::from(self.b) - BigInt::from(other.b));
                let q = BigInt::from(self.b) - BigInt::from(other.b);
                sign_p_plus_q_sqrt5_big(p, q)
            }
        }
    }
}

impl fmt::Display for SigmaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (≈{:.4})", self.exact_string(), self.to_f64())
    }
}

impl fmt::Debug for SigmaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.exact_string())
    }
}

/// Fibonacci numbers extended to negative indices: F_0 = 0, F_1 = 1 and
/// F_{−i} = (−1)^{i+1} F_i.
pub fn fibonacci(i: i64) -> i128 {
    let n = i.unsigned_abs();
    let (mut prev, mut cur): (i128, i128) = (0, 1);
    if n == 0 {
        return 0;
    }
    for _ in 1..n {
        let next = prev.checked_add(cur).expect("Fibonacci overflow");
        prev = cur;
        cur = next;
    }
    if i < 0 && n.is_multiple_of(2) {
        -cur
    } else {
        cur
    }
}

/// σ^i = (−1)^i (F_{i−1} − F_i σ), valid for every integer i.
pub fn sigma_pow(i: i32) -> SigmaValue {
    let i = i as i64;
    let v = SigmaValue::new(fibonacci(i - 1), -fibonacci(i));
    if i.rem_euclid(2) == 1 {
        -v
    } else {
        v
    }
}

/// Collapses a coefficient row right to left with σ^k = σ^{k−2} − σ^{k−1}
/// until only the two leading columns are non-zero, as in a hand tableau.
/// Returns those two leading coefficients (c₀, c₁): the row equals
/// σ^base (c₀ + c₁σ).
pub fn tableau_collapse(coeffs: &[i64]) -> (i128, i128) {
    let mut row: Vec<i128> = coeffs.iter().map(|&c| c as i128).collect();
    for k in (2..row.len()).rev() {
        let c = row[k];
        row[k - 2] = row[k - 2].checked_add(c).expect(OVERFLOW);
        row[k - 1] = row[k - 1].checked_sub(c).expect(OVERFLOW);
        row[k] = 0;
    }
    (
        row.first().copied().unwrap_or(0),
        row.get(1).copied().unwrap_or(0),
    )
}

/// Σ_k coeffs[k] σ^{base+k}, computed by tableau collapse.
pub fn tableau_reduce(coeffs: &[i64], base_exponent: i32) -> SigmaValue {
    if coeffs.is_empty() {
        return SigmaValue::ZERO;
    }
    let (c0, c1) = tableau_collapse(coeffs);
    sigma_pow(base_exponent) * SigmaValue::new(c0, c1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn real(v: SigmaValue) -> f64 {
        v.to_f64()
    }

    #[test]
    fn add_examples() {
        assert_eq!(
            SigmaValue::new(1, 0) + SigmaValue::new(0, 1),
            SigmaValue::new(1, 1)
        );
        assert_eq!(sigma_pow(2) + sigma_pow(1), SigmaValue::ONE);
        assert_eq!(
            SigmaValue::new(-3, 5) + SigmaValue::new(5, -8),
            SigmaValue::new(2, -3)
        );
    }

    #[test]
    fn mul_examples() {
        assert_eq!(
            SigmaValue::SIGMA * SigmaValue::SIGMA,
            SigmaValue::new(1, -1)
        );
        assert_eq!(
            SigmaValue::new(1, 1) * SigmaValue::new(2, 1),
            SigmaValue::new(3, 2)
        );
        assert_eq!(sigma_pow(-3), SigmaValue::new(3, 2));
        let x = SigmaValue::new(-17, 42);
        assert_eq!(x * SigmaValue::ONE, x);
    }

    #[test]
    fn fibonacci_examples() {
        assert_eq!(fibonacci(7), 13);
        assert_eq!(fibonacci(0), 0);
        assert_eq!(fibonacci(-3), 2);
        assert_eq!(fibonacci(-4), -3);
        assert_eq!(fibonacci(1), 1);
        assert_eq!(fibonacci(2), 1);
    }

    #[test]
    fn pow_examples() {
        assert_eq!(sigma_pow(4), SigmaValue::new(2, -3));
        assert_eq!(sigma_pow(0), SigmaValue::ONE);
        assert_eq!(sigma_pow(-6), SigmaValue::new(13, 8));
    }

    #[test]
    fn compare_examples() {
        assert_eq!(
            sigma_pow(9).cmp(&(sigma_pow(11) + sigma_pow(13))),
            Ordering::Greater
        );
        assert_eq!(SigmaValue::ZERO.cmp(&SigmaValue::ZERO), Ordering::Equal);
    }

    #[test]
    fn to_real_examples() {
        assert!((SigmaValue::SIGMA.to_f64() - 0.618).abs() < 1e-3);
        assert_eq!(SigmaValue::ZERO.to_f64(), 0.0);
        let oracle = SIGMA_F64.powi(11) + SIGMA_F64.powi(13);
        assert!(((sigma_pow(11) + sigma_pow(13)).to_f64() - oracle).abs() < 1e-12);
        assert!((oracle - 0.00695).abs() < 1e-5);
    }

    #[test]
    fn tableau_examples() {
        assert_eq!(tableau_collapse(&[1, 3, 5, 7, 3]), (5, 3));
        assert_eq!(tableau_reduce(&[1, 3, 5, 7, 3], 4), SigmaValue::ONE);
        assert_eq!(tableau_collapse(&[5, 7, 9, 12, 13, 5]), (13, 8));
        assert_eq!(
            tableau_reduce(&[5, 7, 9, 12, 13, 5], 8),
            SigmaValue::new(1, -1)
        );
        assert_eq!(tableau_reduce(&[], 3), SigmaValue::ZERO);
    }

    #[test]
    fn display_format() {
        assert_eq!(sigma_pow(4).to_string(), "2-3σ (≈0.1459)");
        assert_eq!(SigmaValue::SIGMA.exact_string(), "σ");
        assert_eq!(SigmaValue::new(3, 2).exact_string(), "3+2σ");
        assert_eq!(SigmaValue::new(1, -1).exact_string(), "1-σ");
        assert_eq!(SigmaValue::new(0, -5).exact_string(), "-5σ");
        assert_eq!(SigmaValue::new(-4, 0).exact_string(), "-4");
    }

    #[test]
    fn compare_falls_back_to_bigint() {
        let big = SigmaValue::new(i128::MAX / 2, -(i128::MAX / 3));
        // 2a − b overflows i128 here; the exact answer comes from BigInt.
        assert_eq!(big.signum(), Ordering::Greater);
        let tiny = SigmaValue::new(fibonacci(169), -fibonacci(170));
        assert_eq!(tiny, sigma_pow(170));
        assert!(tiny.is_positive());
        assert!((-tiny).is_negative());
    }

    #[test]
    fn golden_identity_over_range() {
        for i in -20..=20 {
            assert_eq!(sigma_pow(i) + sigma_pow(i - 1), sigma_pow(i - 2), "i = {i}");
        }
    }

    #[test]
    fn summation_identities_numerically() {
        let s = SIGMA_F64;
        for n in 0..30 {
            let n_f = n as f64;
            let geo: f64 = (n..n + 200).map(|i| s.powi(i)).sum();
            let even: f64 = (n..n + 200).map(|i| s.powi(2 * i)).sum();
            let lin: f64 = (n..n + 200).map(|i| i as f64 * s.powi(i)).sum();
            assert!((geo - real(sigma_pow(n - 2))).abs() < 1e-9);
            assert!((even - real(sigma_pow(2 * n - 1))).abs() < 1e-9);
            let rhs = n_f * real(sigma_pow(n - 2)) + real(sigma_pow(n - 3));
            assert!((lin - rhs).abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn powers_multiply(i in -60i32..60, j in -60i32..60) {
            prop_assert_eq!(sigma_pow(i) * sigma_pow(j), sigma_pow(i + j));
        }

        #[test]
        fn golden_identity(i in -150i32..150) {
            prop_assert_eq!(sigma_pow(i) + sigma_pow(i - 1), sigma_pow(i - 2));
        }

        #[test]
        fn compare_agrees_with_floats(
            a in -1_000_000i128..=1_000_000, b in -1_000_000i128..=1_000_000,
            c in -1_000_000i128..=1_000_000, d in -1_000_000i128..=1_000_000,
        ) {
            let x = SigmaValue::new(a, b);
            let y = SigmaValue::new(c, d);
            let diff = x.to_f64() - y.to_f64();
            if diff.abs() > 1e-9 {
                let expected = if diff > 0.0 { Ordering::Greater } else { Ordering::Less };
                prop_assert_eq!(x.cmp(&y), expected);
            }
            prop_assert_eq!(x.cmp(&y) == Ordering::Equal, x == y);
        }

        #[test]
        fn tableau_matches_termwise_sum(
            coeffs in proptest::collection::vec(-50i64..50, 0..12),
            base in -10i32..20,
        ) {
            let naive: SigmaValue = coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| sigma_pow(base + k as i32).scale(c as i128))
                .sum();
            prop_assert_eq!(tableau_reduce(&coeffs, base), naive);
        }
    }
}
