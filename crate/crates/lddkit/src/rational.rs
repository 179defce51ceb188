//! Exact rational helpers. Every guarantee check in the crate goes through these.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i128) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qu(n: u64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// floor(x) as i128. Panics if it does not fit, which would mean a threshold
/// far outside any representable distance.
pub fn floor_i128(x: &Q) -> i128 {
    x.floor().to_integer().to_i128().expect("threshold exceeds i128")
}

pub fn floor_big(x: &Q) -> BigInt {
    x.floor().to_integer()
}

pub fn pow(x: &Q, k: u32) -> Q {
    let mut acc = Q::one();
    for _ in 0..k {
        acc *= x;
    }
    acc
}

/// floor(log2 x) for x > 0.
pub fn log2_floor(x: &Q) -> i64 {
    assert!(x.is_positive(), "log2 of non-positive value");
    let n = x.numer().abs();
    let d = x.denom().abs();
    // n/d lies in (2^(k-1), 2^(k+1)), so the answer is k or k-1
    let k = n.bits() as i64 - d.bits() as i64;
    let lhs = if k >= 0 { d << (k as usize) } else { d };
    let rhs = if k >= 0 { n } else { n << ((-k) as usize) };
    if rhs < lhs {
        k - 1
    } else {
        k
    }
}

/// ceil(log2 x) for x > 0.
pub fn log2_ceil(x: &Q) -> i64 {
    let f = log2_floor(x);
    let p = if f >= 0 { qi(1i128 << f) } else { Q::new(BigInt::one(), BigInt::one() << ((-f) as usize)) };
    if &p == x {
        f
    } else {
        f + 1
    }
}

/// ceil(log2 n) for n >= 1, 0 for n <= 1.
pub fn ceil_log2_u(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// floor(log2 n) for n >= 1 on exact integers.
pub fn floor_log2_big(n: &BigInt) -> u64 {
    assert!(n.is_positive());
    n.bits() - 1
}

pub fn min_q(a: &Q, b: &Q) -> Q {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}

/// The exponent used by the blur budgets: max(0, floor(log2(2D))).
pub fn blur_exponent(d: &Q) -> u32 {
    let two_d = d * qi(2);
    if two_d < Q::one() {
        0
    } else {
        log2_floor(&two_d).max(0) as u32
    }
}

/// 1 / (1-eps)^e, exactly.
pub fn inv_one_minus_pow(eps: &Q, e: u32) -> Q {
    let base = Q::one() - eps;
    pow(&base, e).recip()
}

/// Render as "p/q" (or "p" for integers) for reports.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().ok()?;
        let b: BigInt = b.trim().parse().ok()?;
        if b.is_zero() {
            return None;
        }
        Some(Q::new(a, b))
    } else {
        let a: BigInt = s.parse().ok()?;
        Some(Q::from_integer(a))
    }
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log2_exact() {
        assert_eq!(log2_floor(&qi(1)), 0);
        assert_eq!(log2_floor(&qi(7)), 2);
        assert_eq!(log2_floor(&qi(8)), 3);
        assert_eq!(log2_floor(&q(1, 2)), -1);
        assert_eq!(log2_floor(&q(3, 4)), -1);
        assert_eq!(log2_floor(&q(1, 3)), -2);
        assert_eq!(log2_ceil(&qi(8)), 3);
        assert_eq!(log2_ceil(&qi(9)), 4);
        assert_eq!(log2_ceil(&q(1, 3)), -1);
        assert_eq!(ceil_log2_u(1), 0);
        assert_eq!(ceil_log2_u(5), 3);
        assert_eq!(ceil_log2_u(8), 3);
    }

    #[test]
    fn blur_exponent_values() {
        assert_eq!(blur_exponent(&q(1, 4)), 0);
        assert_eq!(blur_exponent(&qi(1)), 1);
        assert_eq!(blur_exponent(&qi(3)), 2);
        assert_eq!(blur_exponent(&qi(4)), 3);
    }

    #[test]
    fn parse_roundtrip() {
        let x = q(-6, 4);
        assert_eq!(parse_q(&fmt_q(&x)).unwrap(), x);
        assert_eq!(parse_q("12").unwrap(), qi(12));
        assert!(parse_q("1/0").is_none());
    }
}
