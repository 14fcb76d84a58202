//! Elements a + b√D of a real quadratic field.

use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::factor::{factorize, FactorError};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadInt {
    pub a: BigRational,
    pub b: BigRational,
    d: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuadError {
    /// D ≤ 0 after extracting squares, or D a perfect square.
    NotRealQuadratic(BigInt),
    Factor(FactorError),
    FieldMismatch,
}

impl fmt::Display for QuadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadError::NotRealQuadratic(d) => write!(f, "√{} does not generate a real quadratic field", d),
            QuadError::Factor(e) => write!(f, "{}", e),
            QuadError::FieldMismatch => write!(f, "operands lie in different quadratic fields"),
        }
    }
}

/// Split n > 0 as c²·D with D squarefree.
pub fn square_part(n: &BigInt) -> Result<(BigInt, BigInt), FactorError> {
    let f = factorize(n)?;
    let mut c = BigInt::one();
    let mut d = BigInt::one();
    for pp in &f.factors {
        let p = BigInt::from(pp.prime.clone());
        c *= num_traits::pow(p.clone(), (pp.exp / 2) as usize);
        if pp.exp % 2 == 1 {
            d *= p;
        }
    }
    Ok((c, d))
}

impl QuadInt {
    /// Build a + b√D, rewriting D = f²·D' to the squarefree D'.
    pub fn new(a: BigRational, b: BigRational, d: &BigInt) -> Result<Self, QuadError> {
        if !d.is_positive() {
            return Err(QuadError::NotRealQuadratic(d.clone()));
        }
        let (c, sf) = square_part(d).map_err(QuadError::Factor)?;
        if sf.is_one() {
            return Err(QuadError::NotRealQuadratic(d.clone()));
        }
        Ok(QuadInt { a, b: b * BigRational::from_integer(c), d: sf })
    }

    pub fn from_ints(a: i64, b: i64, d: i64) -> Result<Self, QuadError> {
        Self::new(BigRational::from_integer(a.into()), BigRational::from_integer(b.into()), &BigInt::from(d))
    }

    pub fn rational(a: BigRational, like: &QuadInt) -> Self {
        QuadInt { a, b: BigRational::zero(), d: like.d.clone() }
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn conj(&self) -> Self {
        QuadInt { a: self.a.clone(), b: -self.b.clone(), d: self.d.clone() }
    }

    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - BigRational::from_integer(self.d.clone()) * &self.b * &self.b
    }

    pub fn trace(&self) -> BigRational {
        &self.a + &self.a
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self, QuadError> {
        self.same(o)?;
        Ok(QuadInt { a: &self.a + &o.a, b: &self.b + &o.b, d: self.d.clone() })
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self, QuadError> {
        self.same(o)?;
        let d = BigRational::from_integer(self.d.clone());
        Ok(QuadInt {
            a: &self.a * &o.a + d * &self.b * &o.b,
            b: &self.a * &o.b + &self.b * &o.a,
            d: self.d.clone(),
        })
    }

    fn same(&self, o: &Self) -> Result<(), QuadError> {
        if self.d == o.d || self.b.is_zero() || o.b.is_zero() {
            Ok(())
        } else {
            Err(QuadError::FieldMismatch)
        }
    }

    fn field_of(&self, o: &Self) -> BigInt {
        if self.b.is_zero() {
            o.d.clone()
        } else {
            self.d.clone()
        }
    }
}

pub fn quad_norm(x: &QuadInt) -> BigRational {
    x.norm()
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let sign = if self.b.is_negative() { '-' } else { '+' };
        let b = self.b.abs();
        if self.a.is_zero() {
            if self.b.is_negative() {
                write!(f, "-")?;
            }
        } else {
            write!(f, "{} {} ", self.a, sign)?;
        }
        if b.is_one() {
            write!(f, "√{}", self.d)
        } else {
            write!(f, "{}√{}", b, self.d)
        }
    }
}

// Operator forms panic on a field mismatch; use the checked variants when
// operands come from different sources.
impl Add for &QuadInt {
    type Output = QuadInt;
    fn add(self, o: &QuadInt) -> QuadInt {
        let d = self.field_of(o);
        let mut r = self.checked_add(o).expect("quadratic field mismatch");
        r.d = d;
        r
    }
}

impl Sub for &QuadInt {
    type Output = QuadInt;
    fn sub(self, o: &QuadInt) -> QuadInt {
        self + &(-o)
    }
}

impl Mul for &QuadInt {
    type Output = QuadInt;
    fn mul(self, o: &QuadInt) -> QuadInt {
        let d = self.field_of(o);
        let mut r = self.checked_mul(o).expect("quadratic field mismatch");
        r.d = d;
        r
    }
}

impl Neg for &QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        QuadInt { a: -self.a.clone(), b: -self.b.clone(), d: self.d.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64, d: i64) -> QuadInt {
        QuadInt::from_ints(a, b, d).unwrap()
    }

    #[test]
    fn norms() {
        assert_eq!(q(22416, -192, 79).norm(), BigRational::from_integer(499564800.into()));
        assert_eq!(q(67032, -216, 641).norm(), BigRational::from_integer(4463382528i64.into()));
        assert_eq!(q(1, 0, 5).norm(), BigRational::one());
    }

    #[test]
    fn normalizes_d() {
        let x = q(1, 3, 12);
        assert_eq!(x.d(), &BigInt::from(3));
        assert_eq!(x.b, BigRational::from_integer(6.into()));
        assert_eq!(x, q(1, 6, 3));
        assert!(QuadInt::from_ints(1, 1, 49).is_err());
        assert!(QuadInt::from_ints(1, 1, -5).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(alloc::format!("{}", q(-384, 192, 79)), "-384 + 192√79");
        assert_eq!(alloc::format!("{}", q(0, -1, 2)), "-√2");
    }

    #[test]
    fn mismatch() {
        assert_eq!(q(1, 1, 2).checked_mul(&q(1, 1, 3)), Err(QuadError::FieldMismatch));
    }
}
