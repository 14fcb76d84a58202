//! Local Euler factors as integer polynomials in T = p^(−s).

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// 1 + c₁T + … + c_dT^d. A `None` coefficient is unknown; such a factor is
/// partial and only determines the prime-power coefficients below it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerFactor {
    pub p: u64,
    pub poly: Vec<Option<BigInt>>,
}

fn pow(p: u64, e: u64) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

impl EulerFactor {
    pub fn complete(p: u64, poly: Vec<BigInt>) -> EulerFactor {
        assert!(poly.first().map_or(false, |c| c.is_one()), "constant term must be 1");
        EulerFactor { p, poly: poly.into_iter().map(Some).collect() }
    }

    /// A degree-d factor about which nothing is known.
    pub fn unknown(p: u64, d: usize) -> EulerFactor {
        let mut poly = vec![None; d + 1];
        poly[0] = Some(BigInt::one());
        EulerFactor { p, poly }
    }

    pub fn degree(&self) -> usize {
        self.poly.len() - 1
    }

    pub fn is_complete(&self) -> bool {
        self.poly.iter().all(Option::is_some)
    }

    pub fn coefficient(&self, i: usize) -> Option<&BigInt> {
        self.poly.get(i).and_then(Option::as_ref)
    }

    /// Coefficients b_e of 1/poly(T) = Σ b_e T^e for e = 0..=emax; b_e is
    /// `None` as soon as an unknown coefficient enters.
    pub fn prime_power_coeffs(&self, emax: usize) -> Vec<Option<BigInt>> {
        let d = self.degree();
        let mut b: Vec<Option<BigInt>> = Vec::with_capacity(emax + 1);
        b.push(Some(BigInt::one()));
        for e in 1..=emax {
            let mut acc = BigInt::zero();
            let mut ok = true;
            for i in 1..=e.min(d) {
                match (&self.poly[i], &b[e - i]) {
                    (Some(c), Some(x)) => acc -= c * x,
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            b.push(if ok { Some(acc) } else { None });
        }
        b
    }

    /// The sign ε with c_(d−i) = ε·p^((d/2−i)w)·c_i for all i, if it exists.
    pub fn self_dual_sign(&self, w: u64) -> Option<i32> {
        let d = self.degree();
        if (d as u64 * w) % 2 != 0 || !self.is_complete() {
            return None;
        }
        let c: Vec<&BigInt> = self.poly.iter().map(|x| x.as_ref().unwrap()).collect();
        'sign: for eps in [1i32, -1] {
            for i in 0..=d / 2 {
                let e = (d as u64 - 2 * i as u64) * w / 2;
                let lhs = c[d - i].clone();
                let rhs = c[i] * pow(self.p, e) * BigInt::from(eps);
                if lhs != rhs {
                    continue 'sign;
                }
            }
            return Some(eps);
        }
        None
    }
}

pub fn zeta_euler(p: u64) -> EulerFactor {
    EulerFactor::complete(p, vec![BigInt::one(), -BigInt::one()])
}

/// 1 − a_pT + p^(k−1)T².
pub fn elliptic_euler(p: u64, ap: &BigInt, k: u32) -> EulerFactor {
    EulerFactor::complete(p, vec![BigInt::one(), -ap, pow(p, k as u64 - 1)])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityError {
    pub p: u64,
}

/// Degree-4 spinor factor with w = j + 2k − 3:
/// 1 − λ_pT + ½(λ_p² − λ_(p²))T² − λ_p p^w T³ + p^(2w) T⁴.
/// Without λ_(p²) the T² coefficient is unknown.
pub fn spinor_euler(p: u64, lambda_p: &BigInt, lambda_p2: Option<&BigInt>, j: u32, k: u32) -> Result<EulerFactor, ParityError> {
    let w = (j + 2 * k - 3) as u64;
    let c2 = match lambda_p2 {
        Some(l2) => {
            let (q, r) = (lambda_p * lambda_p - l2).div_rem(&BigInt::from(2));
            if !r.is_zero() {
                return Err(ParityError { p });
            }
            Some(q)
        }
        None => None,
    };
    Ok(EulerFactor {
        p,
        poly: vec![
            Some(BigInt::one()),
            Some(-lambda_p),
            c2,
            Some(-lambda_p * pow(p, w)),
            Some(pow(p, 2 * w)),
        ],
    })
}

/// Power sums α^m + α'^m of the roots of x² − a x + q, m = 0..=n.
fn pair_power_sums(a: &BigInt, q: &BigInt, n: usize) -> Vec<BigInt> {
    let mut s = vec![BigInt::from(2), a.clone()];
    for m in 2..=n {
        let v = a * &s[m - 1] - q * &s[m - 2];
        s.push(v);
    }
    s.truncate(n + 1);
    s
}

/// Π(1 − rT) over the roots r with the given power sums P_1..P_d (Newton).
fn poly_from_power_sums(ps: &[BigInt], d: usize) -> Vec<BigInt> {
    let mut e = vec![BigInt::one()];
    for i in 1..=d {
        let mut acc = BigInt::zero();
        for j in 1..=i {
            let t = &e[i - j] * &ps[j];
            if j % 2 == 1 {
                acc += t;
            } else {
                acc -= t;
            }
        }
        let (q, r) = acc.div_rem(&BigInt::from(i));
        debug_assert!(r.is_zero());
        e.push(q);
    }
    e.iter().enumerate().map(|(i, x)| if i % 2 == 1 { -x } else { x.clone() }).collect()
}

/// Degree-8 triple product factor Π(1 − α^±β^±γ^± T), expanded through
/// power sums so that only integers appear.
pub fn triple_euler(p: u64, af: &BigInt, ag: &BigInt, ah: &BigInt, k1: u32, k2: u32, k3: u32) -> EulerFactor {
    let sf = pair_power_sums(af, &pow(p, k1 as u64 - 1), 8);
    let sg = pair_power_sums(ag, &pow(p, k2 as u64 - 1), 8);
    let sh = pair_power_sums(ah, &pow(p, k3 as u64 - 1), 8);
    let ps: Vec<BigInt> = (0..=8).map(|m| &sf[m] * &sg[m] * &sh[m]).collect();
    EulerFactor::complete(p, poly_from_power_sums(&ps, 8))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> BigInt {
        s.parse().unwrap()
    }

    #[test]
    fn spinor_coefficients() {
        let f = spinor_euler(2, &BigInt::from(3600), None, 16, 6).unwrap();
        assert_eq!(f.coefficient(4), Some(&(BigInt::one() << 50usize)));
        assert_eq!(f.coefficient(3), Some(&(BigInt::from(-3600) << 25usize)));
        assert!(!f.is_complete());
        let pp = f.prime_power_coeffs(3);
        assert_eq!(pp[1], Some(BigInt::from(3600)));
        assert_eq!(pp[2], None);
        // a_(p²) = (λ² + λ_(p²))/2
        let l2 = BigInt::from(-1234);
        let g = spinor_euler(2, &BigInt::from(3600), Some(&l2), 16, 6).unwrap();
        assert_eq!(g.prime_power_coeffs(2)[2], Some((BigInt::from(3600 * 3600) + &l2) / 2));
        assert_eq!(g.self_dual_sign(25), Some(1));
        assert!(spinor_euler(2, &BigInt::from(3), Some(&BigInt::from(2)), 16, 6).is_err());
    }

    #[test]
    fn triple_matches_expansion() {
        // Oracle: sympy expansion of the eightfold product over Q(α, β, γ).
        let f = triple_euler(2, &BigInt::from(456), &BigInt::from(216), &BigInt::from(-24), 20, 16, 12);
        let want = [
            "1",
            "2363904",
            "30727479492608",
            "-241060076075888934912",
            "19520077101010378731552768",
            "-8481547412416225194600961130102784",
            "38038777170219864276269673168859081736192",
            "102962540581615887044470411264817485073111580672",
            "1532495540865888858358347027150309183618739122183602176",
        ];
        for (i, w) in want.iter().enumerate() {
            assert_eq!(f.coefficient(i), Some(&b(w)), "T^{}", i);
        }
        assert_eq!(f.coefficient(8), Some(&pow(2, 4 * 45)));
        assert_eq!(f.self_dual_sign(45), Some(1));
    }

    #[test]
    fn elliptic_inverse_is_tau() {
        let f = elliptic_euler(2, &BigInt::from(-24), 12);
        let pp = f.prime_power_coeffs(4);
        let want = [1, -24, -1472, 84480, 987136];
        for (x, w) in pp.iter().zip(want) {
            assert_eq!(x.as_ref().unwrap(), &BigInt::from(w));
        }
        assert_eq!(f.self_dual_sign(11), Some(1));
        assert_eq!(f.self_dual_sign(12), None);
        assert_eq!(zeta_euler(5).prime_power_coeffs(3), vec![Some(BigInt::one()); 4]);
    }
}
