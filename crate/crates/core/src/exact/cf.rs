//! Exact decimal parsing, continued fractions and rational reconstruction.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseDecimalError(pub String);

impl fmt::Display for ParseDecimalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "malformed decimal {:?}", self.0)
    }
}

/// A terminating decimal read exactly, with the count of digits after the
/// point (the precision the string carries).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decimal {
    pub value: BigRational,
    pub frac_digits: u32,
}

pub fn parse_decimal(s: &str) -> Result<Decimal, ParseDecimalError> {
    let err = || ParseDecimalError(String::from(s));
    let t = s.trim();
    let (neg, body) = match t.as_bytes().first() {
        Some(b'-') => (true, &t[1..]),
        Some(b'+') => (false, &t[1..]),
        _ => (false, t),
    };
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !int.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let mut digits = String::with_capacity(int.len() + frac.len());
    digits.push_str(int);
    digits.push_str(frac);
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| err())? };
    let den: BigInt = Pow::pow(BigInt::from(10u32), frac.len() as u32);
    let mut value = BigRational::new(num, den);
    if neg {
        value = -value;
    }
    Ok(Decimal { value, frac_digits: frac.len() as u32 })
}

/// Standard continued fraction (floor convention) of an exact rational.
pub fn cf_of_rational(r: &BigRational, max_terms: usize) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut n = r.numer().clone();
    let mut d = r.denom().clone();
    while !d.is_zero() && out.len() < max_terms {
        let (q, rem) = n.div_mod_floor(&d);
        out.push(q);
        n = d;
        d = rem;
    }
    out
}

pub fn cf_expand(decimal: &str, max_terms: usize) -> Result<Vec<BigInt>, ParseDecimalError> {
    Ok(cf_of_rational(&parse_decimal(decimal)?.value, max_terms))
}

/// Convergents h_i/k_i of a partial-quotient list.
pub fn convergents(terms: &[BigInt]) -> Vec<BigRational> {
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut out = Vec::with_capacity(terms.len());
    for a in terms {
        let h2 = a * &h1 + &h0;
        let k2 = a * &k1 + &k0;
        out.push(BigRational::new(h2.clone(), k2.clone()));
        h0 = core::mem::replace(&mut h1, h2);
        k0 = core::mem::replace(&mut k1, k2);
    }
    out
}

/// Convergent just before the first partial quotient (after the integer
/// part) exceeding `threshold`, accepted only if it reproduces the input to
/// within 10^-(d-5), d the number of fractional digits. A terminating
/// expansion with no large quotient returns the exact value.
pub fn rational_reconstruct(
    decimal: &str,
    threshold: &BigInt,
) -> Result<Option<BigRational>, ParseDecimalError> {
    let dec = parse_decimal(decimal)?;
    let terms = cf_of_rational(&dec.value, usize::MAX);
    let cut = terms.iter().skip(1).position(|a| a > threshold).map(|i| i + 1);
    let conv = convergents(&terms);
    let cand = match cut {
        Some(i) => conv[i - 1].clone(),
        None => return Ok(conv.last().cloned()),
    };
    let d = dec.frac_digits as i64 - 5;
    let tol = if d >= 0 {
        BigRational::new(BigInt::one(), Pow::pow(BigInt::from(10u32), d as u32))
    } else {
        BigRational::from_integer(Pow::pow(BigInt::from(10u32), (-d) as u32))
    };
    if (&cand - &dec.value).abs() <= tol {
        Ok(Some(cand))
    } else {
        Ok(None)
    }
}

/// Decimal rendering of a rational, rounded half away from zero to
/// `digits` places after the point.
pub fn rational_to_decimal(r: &BigRational, digits: u32) -> String {
    let scale: BigInt = Pow::pow(BigInt::from(10u32), digits);
    let x = r * BigRational::from_integer(scale);
    let neg = x.is_negative();
    let a = x.abs();
    let rounded = (a + BigRational::new(BigInt::one(), BigInt::from(2))).floor().to_integer();
    let mut s = alloc::format!("{}", rounded);
    if digits > 0 {
        let w = digits as usize + 1;
        while s.len() < w {
            s.insert(0, '0');
        }
        s.insert(s.len() - digits as usize, '.');
    }
    if neg && rounded != BigInt::zero() {
        s.insert(0, '-');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    const REFERENCE_DEC: &str = "0.0100470823379774368182814145009";

    #[test]
    fn reference_expansion() {
        let cf = cf_expand(REFERENCE_DEC, 14).unwrap();
        assert_eq!(&cf[..10], &ints(&[0, 99, 1, 1, 7, 2, 6, 1, 6, 1])[..]);
        assert_eq!(cf[10], "877118077264803576596".parse::<BigInt>().unwrap());
        assert_eq!(&cf[11..14], &ints(&[1, 3, 2])[..]);
        assert_eq!(cf_expand("0.5", 10).unwrap(), ints(&[0, 2]));
    }

    #[test]
    fn reference_reconstruction() {
        let r = rational_reconstruct(REFERENCE_DEC, &BigInt::from(10_000_000_000i64)).unwrap().unwrap();
        assert_eq!(r, BigRational::new(1880.into(), 187119.into()));
        let r = rational_reconstruct("0.333333333333333333", &BigInt::from(1_000_000)).unwrap();
        assert_eq!(r, Some(BigRational::new(1.into(), 3.into())));
    }

    #[test]
    fn pi_approximant() {
        let r = BigRational::new(355.into(), 113.into());
        let s = rational_to_decimal(&r, 20);
        assert_eq!(s, "3.14159292035398230088");
        let cf = cf_expand(&s, 4).unwrap();
        assert_eq!(cf, ints(&[3, 7, 15, 1]));
        let t = rational_reconstruct(&s, &BigInt::from(1_000_000)).unwrap();
        assert_eq!(t, Some(r));
    }

    #[test]
    fn table_entry_roundtrip() {
        // 5·59/(2^2·3^3·7^2·13)
        let r = BigRational::new(295.into(), 68796.into());
        let s = rational_to_decimal(&r, 25);
        let t = rational_reconstruct(&s, &BigInt::from(10_000_000_000i64)).unwrap();
        assert_eq!(t, Some(r));
    }

    #[test]
    fn malformed() {
        assert!(parse_decimal("1.2.3").is_err());
        assert!(parse_decimal("abc").is_err());
        assert!(parse_decimal("").is_err());
        assert!(parse_decimal("-.5").is_ok());
    }

    #[test]
    fn noise_rejected() {
        // a decimal with no large quotient anywhere is returned exactly,
        // while a huge quotient preceded by a poor convergent is rejected
        let r = rational_reconstruct("0.25", &BigInt::from(1_000_000)).unwrap();
        assert_eq!(r, Some(BigRational::new(1.into(), 4.into())));
        let r = rational_reconstruct("0.000000012300000000001", &BigInt::from(1_000_000)).unwrap();
        assert_eq!(r, None);
    }
}
