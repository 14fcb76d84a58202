//! Exact arithmetic: big rationals, quadratic integers, factorization and
//! continued fractions.

pub mod cf;
pub mod factor;
pub mod quad;

pub use cf::{cf_expand, convergents, parse_decimal, rational_reconstruct, rational_to_decimal, Decimal, ParseDecimalError};
pub use factor::{factorize, is_prime_big, is_prime_u64, primes_below, parse_factored, FactorError, Factorization, Factorizer, PrimePower};
pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;
pub use quad::{quad_norm, square_part, QuadError, QuadInt};

use num_traits::{One, Signed};

/// Table-style rendering of a rational: `2^3.5.47/(3^2.17.1223)`.
pub fn render_rational(r: &BigRational, sep: &str) -> alloc::string::String {
    let fac = Factorizer::default();
    let n = fac.factorize(r.numer());
    let d = fac.factorize(r.denom());
    match (n, d) {
        (Ok(n), Ok(d)) => {
            if r.denom().is_one() {
                n.render(sep, None)
            } else {
                let num = n.render(sep, None);
                let den = d.render(sep, None);
                if d.factors.len() > 1 || d.factors.first().map_or(false, |f| f.exp > 1) {
                    alloc::format!("{}/({})", num, den)
                } else {
                    alloc::format!("{}/{}", num, den)
                }
            }
        }
        _ => alloc::format!("{}", r),
    }
}

/// Parse `a/b`, `-a/b` or `a` into a rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let b: BigInt = b.trim().parse().ok()?;
            if b.is_positive() || b.is_negative() {
                Some(BigRational::new(a.trim().parse().ok()?, b))
            } else {
                None
            }
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}
