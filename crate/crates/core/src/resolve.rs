//! From Hecke traces to individual eigenvalues.

use alloc::format;
use alloc::string::String;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::exact::{square_part, FactorError, QuadInt};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EigenOutcome {
    /// Both roots rational, larger first.
    Rational(BigRational, BigRational),
    /// a ± b√D, stored as the root with b > 0.
    Pair(QuadInt),
}

impl EigenOutcome {
    pub fn sum(&self) -> BigRational {
        match self {
            EigenOutcome::Rational(x, y) => x + y,
            EigenOutcome::Pair(q) => q.trace(),
        }
    }

    pub fn sum_of_squares(&self) -> BigRational {
        match self {
            EigenOutcome::Rational(x, y) => x * x + y * y,
            EigenOutcome::Pair(q) => {
                let d = BigRational::from_integer(q.d().clone());
                (&q.a * &q.a + d * &q.b * &q.b) * BigRational::from_integer(2.into())
            }
        }
    }
}

impl fmt::Display for EigenOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EigenOutcome::Rational(x, y) => write!(f, "{}, {}", x, y),
            EigenOutcome::Pair(q) => write!(f, "{}", render_pm(q, "±")),
        }
    }
}

/// `a ± b√D` with a chosen sign glyph; b is taken in absolute value.
pub fn render_pm(q: &QuadInt, pm: &str) -> String {
    if q.a.is_zero() {
        format!("{}{}√{}", if pm == "±" { "±" } else { "" }, q.b.abs(), q.d())
    } else {
        format!("{} {} {}√{}", q.a, pm, q.b.abs(), q.d())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResolveError {
    NegativeDiscriminant(BigInt),
    Factor(FactorError),
}

impl fmt::Display for ResolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResolveError::NegativeDiscriminant(d) => {
                write!(f, "discriminant {} is negative; the traces are inconsistent", d)
            }
            ResolveError::Factor(e) => write!(f, "{}", e),
        }
    }
}

/// trace − Σ scale·eigenvalue.
pub fn endoscopic_subtract(trace: &BigInt, contributions: &[(BigInt, BigInt)]) -> BigInt {
    contributions.iter().fold(trace.clone(), |acc, (s, e)| acc - s * e)
}

/// tr T(p)² from tr T(p²) and tr T(p,p), with motivic weight w:
/// T(p)² = T(p²) + (p+1)T(p,p) + p^(w−5)(p⁵+…+1) on each eigenvector.
pub fn trace_square(tr_tp2: &BigInt, tr_tpp: &BigInt, p: u64, w: u32, dim: u32) -> BigInt {
    assert!(w >= 5, "weight {} too small for the square relation", w);
    let pb = BigInt::from(p);
    let geo: BigInt = (0..=5).map(|i| num_traits::pow(pb.clone(), i)).sum();
    let scalar = num_traits::pow(pb.clone(), (w - 5) as usize) * geo * BigInt::from(dim);
    tr_tp2 + (pb + 1u32) * tr_tpp + scalar
}

pub fn restrict_square(total_sq: &BigInt, known: &[BigInt]) -> BigInt {
    known.iter().fold(total_sq.clone(), |acc, e| acc - e * e)
}

/// Roots of x² − sum·x + (sum² − sum_sq)/2.
pub fn quadratic_resolve(sum: &BigInt, sum_sq: &BigInt) -> Result<EigenOutcome, ResolveError> {
    let disc: BigInt = sum_sq * 2u32 - sum * sum;
    if disc.is_negative() {
        return Err(ResolveError::NegativeDiscriminant(disc));
    }
    let half = |x: BigInt| BigRational::new(x, BigInt::from(2));
    let r = disc.sqrt();
    if &r * &r == disc {
        return Ok(EigenOutcome::Rational(half(sum + &r), half(sum - &r)));
    }
    let (c, d) = square_part(&disc).map_err(ResolveError::Factor)?;
    debug_assert!(!d.is_one());
    let q = QuadInt::new(half(sum.clone()), half(c), &d).expect("squarefree part is not 1");
    Ok(EigenOutcome::Pair(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn subtraction() {
        assert_eq!(endoscopic_subtract(&b(-96), &[(b(16), b(-528)), (b(1), b(1920))]), b(6432));
        assert_eq!(endoscopic_subtract(&b(15216), &[(b(64), b(216)), (b(1), b(7440))]), b(-6048));
        assert_eq!(endoscopic_subtract(&b(7), &[]), b(7));
    }

    #[test]
    fn squares() {
        assert_eq!(trace_square(&b(-36421632), &b(-29859840), 2, 25, 2), b(6119424));
        assert_eq!(trace_square(&b(79978752), &b(65968128), 2, 25, 3), b(476064000));
        assert_eq!(trace_square(&b(3207168), &b(-22394880), 2, 25, 3), b(134203392));
        assert_eq!(restrict_square(&b(476064000), &[b(-20064)]), b(73499904));
        assert_eq!(restrict_square(&b(134203392), &[b(3552)]), b(121586688));
        assert_eq!(restrict_square(&b(5), &[]), b(5));
    }

    #[test]
    fn pairs() {
        let cases = [(-768, 6119424, "-384 ± 192√79"), (5232, 73499904, "2616 ± 216√641"), (6624, 121586688, "3312 ± 240√865")];
        for (s, sq, want) in cases {
            let o = quadratic_resolve(&b(s), &b(sq)).unwrap();
            assert_eq!(o.to_string(), want);
            assert_eq!(o.sum(), BigRational::from_integer(b(s)));
            assert_eq!(o.sum_of_squares(), BigRational::from_integer(b(sq)));
        }
        let r = quadratic_resolve(&b(5), &b(13)).unwrap();
        assert_eq!(r, EigenOutcome::Rational(BigRational::from_integer(b(3)), BigRational::from_integer(b(2))));
        assert!(matches!(quadratic_resolve(&b(10), &b(1)), Err(ResolveError::NegativeDiscriminant(_))));
    }
}
