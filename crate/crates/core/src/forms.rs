//! Level-1 elliptic modular forms as exact q-expansions.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Truncated power series Σ c_n qⁿ, n = 0..=order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    coeffs: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormsError {
    UnsupportedWeight(u32),
    OrderTooSmall(usize),
}

impl fmt::Display for FormsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormsError::UnsupportedWeight(k) => {
                write!(f, "weight {} is not one of 12, 16, 18, 20, 22, 26", k)
            }
            FormsError::OrderTooSmall(n) => write!(f, "truncation order {} is below 2", n),
        }
    }
}

pub const WEIGHTS: [u32; 6] = [12, 16, 18, 20, 22, 26];

impl QSeries {
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> QSeries {
        assert!(!coeffs.is_empty());
        QSeries { coeffs }
    }

    pub fn zero(order: usize) -> QSeries {
        QSeries { coeffs: vec![BigInt::zero(); order + 1] }
    }

    pub fn one(order: usize) -> QSeries {
        let mut s = QSeries::zero(order);
        s.coeffs[0] = BigInt::one();
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &BigInt {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> QSeries {
        QSeries { coeffs: self.coeffs[..=order.min(self.order())].to_vec() }
    }

    pub fn add(&self, o: &QSeries) -> QSeries {
        let n = self.order().min(o.order());
        QSeries { coeffs: (0..=n).map(|i| &self.coeffs[i] + &o.coeffs[i]).collect() }
    }

    pub fn sub(&self, o: &QSeries) -> QSeries {
        let n = self.order().min(o.order());
        QSeries { coeffs: (0..=n).map(|i| &self.coeffs[i] - &o.coeffs[i]).collect() }
    }

    pub fn scale(&self, c: &BigInt) -> QSeries {
        QSeries { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn mul(&self, o: &QSeries) -> QSeries {
        let n = self.order().min(o.order());
        let mut out = vec![BigInt::zero(); n + 1];
        for (i, a) in self.coeffs[..=n].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs[..=n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        QSeries { coeffs: out }
    }

    pub fn pow(&self, mut e: u32) -> QSeries {
        let mut r = QSeries::one(self.order());
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        r
    }

    /// Multiply by q, dropping the top coefficient.
    pub fn shift_q(&self) -> QSeries {
        let mut c = Vec::with_capacity(self.coeffs.len());
        c.push(BigInt::zero());
        c.extend_from_slice(&self.coeffs[..self.order()]);
        QSeries { coeffs: c }
    }
}

fn divisor_power_sums(order: usize, k: u32) -> Vec<BigInt> {
    let mut s = vec![BigInt::zero(); order + 1];
    for d in 1..=order {
        let dk = num_traits::pow(BigInt::from(d), k as usize);
        let mut m = d;
        while m <= order {
            s[m] += &dk;
            m += d;
        }
    }
    s
}

fn eisenstein(order: usize, k: u32, c: i64) -> QSeries {
    let mut s = divisor_power_sums(order, k - 1);
    let c = BigInt::from(c);
    for x in s.iter_mut().skip(1) {
        *x *= &c;
    }
    s[0] = BigInt::one();
    QSeries { coeffs: s }
}

/// E₄ = 1 + 240 Σ σ₃(n) qⁿ.
pub fn e4(order: usize) -> QSeries {
    eisenstein(order, 4, 240)
}

/// E₆ = 1 − 504 Σ σ₅(n) qⁿ.
pub fn e6(order: usize) -> QSeries {
    eisenstein(order, 6, -504)
}

/// Euler's product Π(1 − qⁿ) from the pentagonal number theorem.
pub fn euler_product(order: usize) -> QSeries {
    let mut s = QSeries::zero(order);
    let mut k: i64 = 0;
    loop {
        let mut any = false;
        for kk in [k, -k] {
            let e = kk * (3 * kk - 1) / 2;
            if e as usize <= order {
                s.coeffs[e as usize] = if kk.is_odd() { -BigInt::one() } else { BigInt::one() };
                any = true;
            }
            if k == 0 {
                break;
            }
        }
        if !any {
            break;
        }
        k += 1;
    }
    s
}

/// Δ = q Π(1 − qⁿ)²⁴.
pub fn delta(order: usize) -> QSeries {
    euler_product(order).pow(24).shift_q()
}

fn monomial(k: u32) -> Result<(u32, u32), FormsError> {
    Ok(match k {
        12 => (0, 0),
        16 => (1, 0),
        18 => (0, 1),
        20 => (2, 0),
        22 => (1, 1),
        26 => (2, 1),
        _ => return Err(FormsError::UnsupportedWeight(k)),
    })
}

/// Normalized cusp eigenform of weight k as Δ·E₄^a·E₆^b.
pub fn eigenform(k: u32, order: usize) -> Result<QSeries, FormsError> {
    let (a, b) = monomial(k)?;
    if order < 2 {
        return Err(FormsError::OrderTooSmall(order));
    }
    let mut f = delta(order);
    if a > 0 {
        f = f.mul(&e4(order).pow(a));
    }
    if b > 0 {
        f = f.mul(&e6(order).pow(b));
    }
    Ok(f)
}

/// Fourier coefficients of all six eigenforms up to a common order,
/// computed once and shared.
#[derive(Clone, Debug)]
pub struct EigenformTable {
    order: usize,
    forms: Vec<(u32, QSeries)>,
}

impl EigenformTable {
    pub fn new(order: usize) -> EigenformTable {
        let order = order.max(2);
        let d = delta(order);
        let e4 = e4(order);
        let e6 = e6(order);
        let e4sq = e4.mul(&e4);
        let d4 = d.mul(&e4);
        let d6 = d.mul(&e6);
        let d44 = d.mul(&e4sq);
        let forms = vec![
            (12, d.clone()),
            (16, d4.clone()),
            (18, d6),
            (20, d44.clone()),
            (22, d4.mul(&e6)),
            (26, d44.mul(&e6)),
        ];
        EigenformTable { order, forms }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn form(&self, k: u32) -> Result<&QSeries, FormsError> {
        self.forms.iter().find(|(w, _)| *w == k).map(|(_, f)| f).ok_or(FormsError::UnsupportedWeight(k))
    }

    /// a_n(f_k); panics past the table order.
    pub fn coeff(&self, k: u32, n: usize) -> Result<&BigInt, FormsError> {
        assert!(n <= self.order, "index {} beyond table order {}", n, self.order);
        Ok(self.form(k)?.coeff(n))
    }
}

/// a_p(f_k), the Hecke eigenvalue at p.
pub fn ap(k: u32, p: u64) -> Result<BigInt, FormsError> {
    let f = eigenform(k, (p as usize).max(2))?;
    Ok(f.coeff(p as usize).clone())
}

/// f_k is ordinary at q when q ∤ a_q(f_k).
pub fn is_ordinary(k: u32, q: u64) -> Result<bool, FormsError> {
    Ok(!ap(k, q)?.mod_floor(&BigInt::from(q)).is_zero())
}

/// |a_p| < 2p^((k−1)/2), checked exactly as a_p² < 4p^(k−1).
pub fn within_hasse(k: u32, p: u64, a: &BigInt) -> bool {
    let bound = num_traits::pow(BigInt::from(p), (k - 1) as usize) * 4u32;
    &(a.abs() * a.abs()) < &bound
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> BigInt {
        s.parse().unwrap()
    }

    #[test]
    fn delta_start() {
        let d = delta(6);
        let want = [0, 1, -24, 252, -1472, 4830, -6048];
        for (i, w) in want.iter().enumerate() {
            assert_eq!(d.coeff(i), &BigInt::from(*w));
        }
    }

    #[test]
    fn second_coefficients() {
        let t = EigenformTable::new(10);
        let want = [(12, -24), (16, 216), (18, -528), (20, 456), (22, -288), (26, -48)];
        for (k, a2) in want {
            assert_eq!(t.coeff(k, 2).unwrap(), &BigInt::from(a2));
            assert_eq!(t.coeff(k, 1).unwrap(), &BigInt::one());
            assert_eq!(t.coeff(k, 0).unwrap(), &BigInt::zero());
        }
    }

    #[test]
    fn large_primes() {
        assert_eq!(ap(20, 31).unwrap(), b("-104626880141728"));
        assert_eq!(ap(22, 73).unwrap(), b("-43284759511102937494"));
        assert!(is_ordinary(20, 31).unwrap());
        assert!(is_ordinary(22, 43).unwrap());
        assert!(is_ordinary(12, 691).unwrap());
    }

    #[test]
    fn eisenstein_identity() {
        let n = 60;
        let lhs = e4(n).pow(3).sub(&e6(n).pow(2));
        assert_eq!(lhs, delta(n).scale(&BigInt::from(1728)));
    }

    #[test]
    fn unsupported() {
        assert_eq!(eigenform(14, 10), Err(FormsError::UnsupportedWeight(14)));
        assert_eq!(eigenform(12, 1), Err(FormsError::OrderTooSmall(1)));
    }
}
