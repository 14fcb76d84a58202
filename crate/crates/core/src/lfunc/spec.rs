//! L-function data: gamma factor, functional equation and coefficients.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;

use super::coeffs::{assemble, coefficient_bound, generic_ball, prime_power_table, spinor_ball, Coeff};
use super::euler::{elliptic_euler, spinor_euler, triple_euler, zeta_euler, EulerFactor};
use super::LError;
use crate::dataset::{Dataset, Op};
use crate::exact::primes_below;
use crate::forms::{EigenformTable, WEIGHTS};
use crate::rootdata::jk_to_cr;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LKind {
    Zeta,
    Elliptic { k: u32 },
    Spinor { j: u32, k: u32 },
    /// Weights stored in decreasing order.
    Triple { k1: u32, k2: u32, k3: u32 },
}

impl LKind {
    pub fn triple(k1: u32, k2: u32, k3: u32) -> LKind {
        let mut w = [k1, k2, k3];
        w.sort_unstable_by(|a, b| b.cmp(a));
        LKind::Triple { k1: w[0], k2: w[1], k3: w[2] }
    }

    pub fn degree(&self) -> usize {
        match self {
            LKind::Zeta => 1,
            LKind::Elliptic { .. } => 2,
            LKind::Spinor { .. } => 4,
            LKind::Triple { .. } => 8,
        }
    }

    /// Motivic weight w; the functional equation reflects s ↔ w + 1 − s.
    pub fn weight(&self) -> u32 {
        match *self {
            LKind::Zeta => 0,
            LKind::Elliptic { k } => k - 1,
            LKind::Spinor { j, k } => j + 2 * k - 3,
            LKind::Triple { k1, k2, k3 } => k1 + k2 + k3 - 3,
        }
    }

    pub fn gamma_shifts(&self) -> Vec<i64> {
        let gc = |m: i64| [m, m + 1];
        match *self {
            LKind::Zeta => vec![0],
            LKind::Elliptic { .. } => gc(0).to_vec(),
            LKind::Spinor { k, .. } => [gc(0), gc(-(k as i64 - 2))].concat(),
            LKind::Triple { k1, k2, k3 } => {
                [gc(0), gc(-(k1 as i64 - 1)), gc(-(k2 as i64 - 1)), gc(-(k3 as i64 - 1))].concat()
            }
        }
    }

    pub fn sign(&self) -> i32 {
        match *self {
            LKind::Zeta => 1,
            LKind::Elliptic { k } => {
                if k % 4 == 0 {
                    1
                } else {
                    -1
                }
            }
            LKind::Spinor { k, .. } => {
                if k % 2 == 0 {
                    1
                } else {
                    -1
                }
            }
            LKind::Triple { .. } => -1,
        }
    }

    /// Poles of the completed function with their residues.
    pub fn poles(&self) -> Vec<(i64, i64)> {
        match self {
            LKind::Zeta => vec![(1, 1), (0, -1)],
            _ => Vec::new(),
        }
    }

    fn check(&self) -> Result<(), LError> {
        let ok = |k: u32| WEIGHTS.contains(&k);
        match *self {
            LKind::Zeta => Ok(()),
            LKind::Elliptic { k } if ok(k) => Ok(()),
            LKind::Triple { k1, k2, k3 } if ok(k1) && ok(k2) && ok(k3) => Ok(()),
            LKind::Spinor { j, k } if j % 2 == 0 && k >= 3 => Ok(()),
            _ => Err(LError::Unsupported(self.to_string())),
        }
    }
}

impl fmt::Display for LKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LKind::Zeta => f.write_str("zeta"),
            LKind::Elliptic { k } => write!(f, "elliptic:{}", k),
            LKind::Spinor { j, k } => write!(f, "spinor:{},{}", j, k),
            LKind::Triple { k1, k2, k3 } => write!(f, "triple:{},{},{}", k1, k2, k3),
        }
    }
}

impl FromStr for LKind {
    type Err = LError;
    fn from_str(s: &str) -> Result<LKind, LError> {
        let bad = || LError::Unsupported(s.to_string());
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let nums: Vec<u32> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
        };
        let kind = match (name.trim(), nums.as_slice()) {
            ("zeta", []) => LKind::Zeta,
            ("elliptic", [k]) => LKind::Elliptic { k: *k },
            ("spinor", [j, k]) => LKind::Spinor { j: *j, k: *k },
            ("triple", [a, b, c]) => LKind::triple(*a, *b, *c),
            _ => return Err(bad()),
        };
        kind.check()?;
        Ok(kind)
    }
}

#[derive(Clone, Debug)]
pub struct LSpec {
    pub kind: LKind,
    pub gamma_shifts: Vec<i64>,
    pub w1: i64,
    pub sign: i32,
    pub conductor: u64,
    pub poles: Vec<(i64, i64)>,
    prime_powers: BTreeMap<u64, Vec<Coeff>>,
    coeffs: Vec<Coeff>,
}

impl LSpec {
    /// Build from Euler factors for every prime up to n; unknown prime-power
    /// coefficients become balls.
    pub fn from_factors(
        kind: LKind,
        factors: &BTreeMap<u64, EulerFactor>,
        n: usize,
        fill: impl FnMut(u64, u32) -> Coeff,
    ) -> Result<LSpec, LError> {
        let pp = prime_power_table(factors, n, fill).map_err(|e| LError::MissingFactor(e.0))?;
        let coeffs = assemble(&pp, n);
        Ok(LSpec {
            gamma_shifts: kind.gamma_shifts(),
            w1: kind.weight() as i64 + 1,
            sign: kind.sign(),
            conductor: 1,
            poles: kind.poles(),
            kind,
            prime_powers: pp,
            coeffs,
        })
    }

    pub fn degree(&self) -> usize {
        self.gamma_shifts.len()
    }

    pub fn weight(&self) -> u32 {
        (self.w1 - 1) as u32
    }

    /// Number of coefficients carried.
    pub fn len(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// a_n for 1 ≤ n ≤ len().
    pub fn coeff(&self, n: usize) -> &Coeff {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[Coeff] {
        &self.coeffs[1..]
    }

    pub fn available(&self, n: usize) -> bool {
        self.coeffs[n].is_exact()
    }

    pub fn unavailable(&self) -> Vec<usize> {
        (1..=self.len()).filter(|&n| !self.available(n)).collect()
    }

    pub fn coefficient_bound(&self, n: u64) -> f64 {
        coefficient_bound(n, self.degree() as u32, self.weight())
    }

    /// Copy with the given prime-power coefficients replaced by the generic
    /// bound; every a_n they enter becomes a ball.
    pub fn hide(&self, prime_powers: &[u64]) -> Result<LSpec, LError> {
        let mut pp = self.prime_powers.clone();
        for &q in prime_powers {
            let (p, e) = prime_power(q).ok_or(LError::Range(format!("{} is not a prime power", q)))?;
            let row = pp.get_mut(&p).filter(|r| r.len() > e as usize);
            let row = row.ok_or(LError::Range(format!("{} exceeds the coefficient count", q)))?;
            row[e as usize] = generic_ball(p, e, self.degree() as u32, self.weight());
        }
        let coeffs = assemble(&pp, self.len());
        Ok(LSpec { prime_powers: pp, coeffs, ..self.clone() })
    }

    pub fn with_sign(&self, sign: i32) -> LSpec {
        LSpec { sign, ..self.clone() }
    }
}

fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let (mut m, mut e) = (q, 0);
    while m % p == 0 {
        m /= p;
        e += 1;
    }
    (m == 1).then_some((p, e))
}

fn primes(n: usize) -> Vec<u64> {
    primes_below(n as u32 + 1).into_iter().map(u64::from).collect()
}

/// Dataset space holding the eigenvalues of the genus-2 form of weight
/// Sym^j ⊗ det^k.
pub fn spinor_space(j: u32, k: u32) -> Result<String, LError> {
    let l = jk_to_cr(j as i64, k as i64).map_err(|e| LError::Unsupported(e.to_string()))?;
    let parts: Vec<String> = l.weights.iter().map(|w| w.to_string()).collect();
    Ok(format!("D{}", parts.join("_")))
}

/// Coefficients a_1..a_n for the given kind. Spinor data comes from the
/// dataset (T(p) and, where present, λ(p²)); absent primes are bounded.
pub fn build_lspec(kind: &LKind, n: usize, data: Option<&Dataset>) -> Result<LSpec, LError> {
    kind.check()?;
    let n = n.max(1);
    let ps = primes(n);
    let w = kind.weight();
    let r = kind.degree() as u32;
    let mut factors = BTreeMap::new();
    match *kind {
        LKind::Zeta => {
            for &p in &ps {
                factors.insert(p, zeta_euler(p));
            }
        }
        LKind::Elliptic { k } => {
            let t = EigenformTable::new(n);
            for &p in &ps {
                factors.insert(p, elliptic_euler(p, t.coeff(k, p as usize)?, k));
            }
        }
        LKind::Triple { k1, k2, k3 } => {
            let t = EigenformTable::new(n);
            for &p in &ps {
                let a = |k: u32| t.coeff(k, p as usize);
                factors.insert(p, triple_euler(p, a(k1)?, a(k2)?, a(k3)?, k1, k2, k3));
            }
        }
        LKind::Spinor { j, k } => {
            let data = data.ok_or_else(|| LError::Unsupported(format!("{} needs a dataset", kind)))?;
            return spinor_lspec(j, k, n, data, &spinor_space(j, k)?);
        }
    }
    LSpec::from_factors(kind.clone(), &factors, n, |p, e| generic_ball(p, e, r, w))
}

pub fn spinor_lspec(j: u32, k: u32, n: usize, data: &Dataset, space: &str) -> Result<LSpec, LError> {
    let kind = LKind::Spinor { j, k };
    kind.check()?;
    let w = kind.weight();
    let mut lambdas: BTreeMap<u64, BigInt> = BTreeMap::new();
    let mut factors = BTreeMap::new();
    for p in primes(n) {
        let f = match data.query(space, Op::Tp, p) {
            Ok(l) => {
                lambdas.insert(p, l.clone());
                let l2 = data.query(space, Op::LambdaP2, p).ok();
                spinor_euler(p, l, l2, j, k).map_err(|e| LError::Parity(e.p))?
            }
            Err(_) => EulerFactor::unknown(p, 4),
        };
        factors.insert(p, f);
    }
    LSpec::from_factors(kind, &factors, n, |p, e| match lambdas.get(&p) {
        Some(l) => spinor_ball(p, l, e, w),
        None => generic_ball(p, e, 4, w),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let s: LKind = "spinor:16,6".parse().unwrap();
        assert_eq!(s.gamma_shifts(), [0, 1, -4, -3]);
        assert_eq!((s.weight() + 1, s.sign()), (26, 1));
        let t: LKind = "triple:12,20,16".parse().unwrap();
        assert_eq!(t, LKind::Triple { k1: 20, k2: 16, k3: 12 });
        assert_eq!(t.gamma_shifts(), [0, 1, -19, -18, -15, -14, -11, -10]);
        assert_eq!((t.weight() + 1, t.sign()), (46, -1));
        assert_eq!(LKind::Zeta.gamma_shifts(), [0]);
        assert_eq!("elliptic:18".parse::<LKind>().unwrap().sign(), -1);
        assert_eq!(t.to_string(), "triple:20,16,12");
        for bad in ["triple:12,14,16", "elliptic:13", "spinor:15,6", "nope", "zeta:3"] {
            assert!(bad.parse::<LKind>().is_err(), "{}", bad);
        }
    }

    #[test]
    fn spinor_from_bundled_data() {
        let d = Dataset::bundled();
        assert_eq!(spinor_space(16, 6).unwrap(), "D25_17");
        let l = build_lspec(&LKind::Spinor { j: 16, k: 6 }, 14, Some(&d)).unwrap();
        assert_eq!(l.unavailable(), [4, 8, 9, 12, 13]);
        assert_eq!(l.coeff(2), &Coeff::Exact(BigInt::from(3600)));
        assert!(l.coeff(13).radius() >= 4.0 * libm::pow(13.0, 12.5));
    }

    #[test]
    fn hiding_prime_powers() {
        let l = build_lspec(&LKind::triple(20, 16, 12), 30, None).unwrap();
        assert!(l.unavailable().is_empty());
        let h = l.hide(&[4]).unwrap();
        assert_eq!(h.unavailable(), [4, 12, 20, 28]);
        assert!(l.hide(&[6]).is_err());
        assert!(l.hide(&[64]).is_err());
    }
}
