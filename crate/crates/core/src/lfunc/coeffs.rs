//! Dirichlet coefficients, exact where the Euler factors allow and
//! otherwise as real balls.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::euler::EulerFactor;
use crate::exact::primes_below;

#[derive(Clone, Debug, PartialEq)]
pub enum Coeff {
    Exact(BigInt),
    /// center ± radius; the radius also covers rounding of the center.
    Ball { center: f64, radius: f64 },
}

fn big_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

impl Coeff {
    pub fn is_exact(&self) -> bool {
        matches!(self, Coeff::Exact(_))
    }

    pub fn center(&self) -> f64 {
        match self {
            Coeff::Exact(x) => big_f64(x),
            Coeff::Ball { center, .. } => *center,
        }
    }

    pub fn radius(&self) -> f64 {
        match self {
            Coeff::Exact(_) => 0.0,
            Coeff::Ball { radius, .. } => *radius,
        }
    }

    /// Largest possible absolute value.
    pub fn magnitude(&self) -> f64 {
        self.center().abs() + self.radius()
    }

    pub fn mul(&self, o: &Coeff) -> Coeff {
        match (self, o) {
            (Coeff::Exact(a), Coeff::Exact(b)) => Coeff::Exact(a * b),
            _ => {
                let (c1, r1) = (self.center(), self.radius());
                let (c2, r2) = (o.center(), o.radius());
                let c = c1 * c2;
                let r = c1.abs() * r2 + r1 * c2.abs() + r1 * r2 + c.abs() * 4.0 * f64::EPSILON;
                Coeff::Ball { center: c, radius: r }
            }
        }
    }
}

fn binom(n: u64, k: u64) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// d_r(n), the number of ordered factorizations of n into r factors.
pub fn divisor_r(n: u64, r: u32) -> f64 {
    let mut m = n;
    let mut out = 1.0;
    let mut p = 2;
    while p * p <= m {
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        if e > 0 {
            out *= binom(e + r as u64 - 1, r as u64 - 1);
        }
        p += 1;
    }
    if m > 1 {
        out *= r as f64;
    }
    out
}

/// Bound on |a_n| for a tempered degree-r series of motivic weight w.
pub fn coefficient_bound(n: u64, r: u32, w: u32) -> f64 {
    divisor_r(n, r) * libm::pow(n as f64, w as f64 / 2.0)
}

/// Ball for an unknown prime-power coefficient a_(p^e).
pub fn generic_ball(p: u64, e: u32, r: u32, w: u32) -> Coeff {
    let rad = binom((e + r - 1) as u64, (r - 1) as u64) * libm::pow(p as f64, e as f64 * w as f64 / 2.0);
    Coeff::Ball { center: 0.0, radius: rad * (1.0 + 1e-12) }
}

fn chebyshev_u(n: usize, x: f64) -> f64 {
    let (mut a, mut b) = (1.0, 2.0 * x);
    if n == 0 {
        return a;
    }
    for _ in 1..n {
        let c = 2.0 * x * b - a;
        a = b;
        b = c;
    }
    b
}

/// Ball for a_(p^e) of a tempered degree-4 spinor factor when only λ_p is
/// known: with unitary Satake data the normalized factor is
/// (1 − 2c₁T + T²)(1 − 2c₂T + T²) with c₁ + c₂ = λ_p / (2p^(w/2)) and
/// c₁, c₂ ∈ [−1, 1].
pub fn spinor_ball(p: u64, lambda_p: &BigInt, e: u32, w: u32) -> Coeff {
    let scale = libm::pow(p as f64, e as f64 * w as f64 / 2.0);
    let t = big_f64(lambda_p) / (2.0 * libm::pow(p as f64, w as f64 / 2.0));
    let lo = (t - 1.0).max(-1.0);
    let hi = (t + 1.0).min(1.0);
    if lo > hi {
        return generic_ball(p, e, 4, w);
    }
    let e = e as usize;
    let f = |c1: f64| (0..=e).map(|i| chebyshev_u(i, c1) * chebyshev_u(e - i, t - c1)).sum::<f64>();
    const SAMPLES: usize = 2000;
    let step = (hi - lo) / SAMPLES as f64;
    let (mut mn, mut mx) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..=SAMPLES {
        let v = f(lo + step * i as f64);
        mn = mn.min(v);
        mx = mx.max(v);
    }
    // |U_n| ≤ n+1 and |U_n'| ≤ n(n+1)(n+2)/3 on [−1, 1].
    let lip: f64 = (0..=e)
        .map(|i| {
            let (a, b) = (i as f64, (e - i) as f64);
            a * (a + 1.0) * (a + 2.0) / 3.0 * (b + 1.0) + (a + 1.0) * b * (b + 1.0) * (b + 2.0) / 3.0
        })
        .sum();
    let slack = lip * step / 2.0 + 1e-9 * (e as f64 + 1.0) * (e as f64 + 1.0);
    let center = (mn + mx) / 2.0 * scale;
    let radius = ((mx - mn) / 2.0 + slack) * scale;
    Coeff::Ball { center, radius: radius + center.abs() * 1e-12 }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MissingFactor(pub u64);

/// Prime-power coefficients for every p ≤ n from the supplied factors;
/// unknown entries are filled by `fill(p, e)`.
pub fn prime_power_table(
    factors: &BTreeMap<u64, EulerFactor>,
    n: usize,
    mut fill: impl FnMut(u64, u32) -> Coeff,
) -> Result<BTreeMap<u64, Vec<Coeff>>, MissingFactor> {
    let mut out = BTreeMap::new();
    for p in primes_below(n as u32 + 1).into_iter().map(u64::from) {
        let f = factors.get(&p).ok_or(MissingFactor(p))?;
        let mut emax = 0;
        let mut q = 1u64;
        while q.saturating_mul(p) <= n as u64 {
            q *= p;
            emax += 1;
        }
        let row = f
            .prime_power_coeffs(emax)
            .into_iter()
            .enumerate()
            .map(|(e, c)| match c {
                Some(x) => Coeff::Exact(x),
                None => fill(p, e as u32),
            })
            .collect();
        out.insert(p, row);
    }
    Ok(out)
}

/// a_0..a_n (a_0 = 0 unused) by multiplicativity.
pub fn assemble(pp: &BTreeMap<u64, Vec<Coeff>>, n: usize) -> Vec<Coeff> {
    let mut spf = vec![0u64; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u64;
                }
                j += i;
            }
        }
    }
    let mut a: Vec<Coeff> = Vec::with_capacity(n + 1);
    a.push(Coeff::Exact(BigInt::zero()));
    if n >= 1 {
        a.push(Coeff::Exact(BigInt::from(1)));
    }
    for m in 2..=n {
        let p = spf[m];
        let mut rest = m as u64;
        let mut e = 0usize;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        let c = pp[&p][e].mul(&a[rest as usize]);
        a.push(c);
    }
    a
}

/// Multiplicative expansion of the factors up to n; indices that need an
/// unknown prime-power coefficient come back as balls from `fill`.
pub fn dirichlet_coefficients(
    factors: &BTreeMap<u64, EulerFactor>,
    n: usize,
    fill: impl FnMut(u64, u32) -> Coeff,
) -> Result<Vec<Coeff>, MissingFactor> {
    let pp = prime_power_table(factors, n, fill)?;
    Ok(assemble(&pp, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::delta;
    use crate::lfunc::euler::{elliptic_euler, spinor_euler, zeta_euler};

    #[test]
    fn zeta_and_tau() {
        let n = 200;
        let z: BTreeMap<u64, EulerFactor> = primes_below(n as u32 + 1).into_iter().map(u64::from).map(|p| (p, zeta_euler(p))).collect();
        let a = dirichlet_coefficients(&z, n, |_, _| unreachable!()).unwrap();
        assert!(a[1..].iter().all(|c| *c == Coeff::Exact(BigInt::from(1))));
        let d = delta(n);
        let f: BTreeMap<u64, EulerFactor> =
            primes_below(n as u32 + 1).into_iter().map(u64::from).map(|p| (p, elliptic_euler(p, d.coeff(p as usize), 12))).collect();
        let a = dirichlet_coefficients(&f, n, |_, _| unreachable!()).unwrap();
        for m in 1..=n {
            assert_eq!(a[m], Coeff::Exact(d.coeff(m).clone()), "n = {}", m);
        }
        let mut g = f.clone();
        g.remove(&97);
        assert_eq!(dirichlet_coefficients(&g, n, |_, _| unreachable!()), Err(MissingFactor(97)));
    }

    #[test]
    fn spinor_flags() {
        let lam = [(2u64, 3600i64), (3, -59400), (5, -51768600), (7, 1319136000), (11, 47003747400), (13, 1)];
        let f: BTreeMap<u64, EulerFactor> =
            lam.iter().map(|(p, l)| (*p, spinor_euler(*p, &BigInt::from(*l), None, 16, 6).unwrap())).collect();
        let a = dirichlet_coefficients(&f, 14, |p, e| generic_ball(p, e, 4, 25)).unwrap();
        let flagged: Vec<usize> = (1..=14).filter(|&m| !a[m].is_exact()).collect();
        assert_eq!(flagged, [4, 8, 9, 12]);
        assert_eq!(a[6], Coeff::Exact(BigInt::from(3600i64 * -59400)));
    }

    #[test]
    fn spinor_ball_contains_truth() {
        // Unitary (c₁, c₂) with known sum; every admissible c₁ lands inside.
        let (p, w) = (2u64, 25u32);
        let lam = BigInt::from(3600);
        let t = 3600.0 / (2.0 * libm::pow(2.0, 12.5));
        for e in 2..=6u32 {
            let ball = spinor_ball(p, &lam, e, w);
            let scale = libm::pow(2.0, 12.5 * e as f64);
            for i in 0..=37 {
                let c1 = (t - 1.0).max(-1.0) + ((t + 1.0).min(1.0) - (t - 1.0).max(-1.0)) * i as f64 / 37.0;
                let v: f64 = (0..=e as usize).map(|k| chebyshev_u(k, c1) * chebyshev_u(e as usize - k, t - c1)).sum();
                assert!((v * scale - ball.center()).abs() <= ball.radius(), "e = {}", e);
            }
            assert!(ball.radius() < generic_ball(p, e, 4, w).radius());
        }
    }

    #[test]
    fn divisor_counts() {
        assert_eq!(divisor_r(12, 2), 6.0);
        assert_eq!(divisor_r(8, 8), 120.0);
        assert_eq!(divisor_r(1, 8), 1.0);
        assert_eq!(divisor_r(30, 3), 27.0);
    }
}
