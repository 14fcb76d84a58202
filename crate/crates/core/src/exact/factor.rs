//! Integer factorization: trial division, Brent's rho, Miller–Rabin.
//!
//! Inputs below 2^64 run on machine words; larger cofactors fall back to
//! `BigUint` arithmetic. Primality answers are deterministic below
//! 3.3·10^24; above that bound a factor is marked `certified: false`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

const TRIAL_LIMIT: u32 = 1_000_000;

/// Deterministic Miller–Rabin bound for the first 13 prime bases.
const MR_DET_BOUND: &str = "3317044064679887385961981";
const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimePower {
    pub prime: BigUint,
    pub exp: u32,
    /// False only for probable primes above the deterministic witness bound.
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Factorization {
    pub negative: bool,
    pub factors: Vec<PrimePower>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorError {
    Zero,
    /// Rho ran out of iterations on a composite cofactor.
    Budget { partial: Factorization, cofactor: BigUint },
}

impl fmt::Display for FactorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorError::Zero => write!(f, "cannot factor zero"),
            FactorError::Budget { partial, cofactor } => write!(
                f,
                "effort budget exhausted; partial {} with unfactored cofactor {}",
                partial.render(".", None),
                cofactor
            ),
        }
    }
}

impl Factorization {
    pub fn recompose(&self) -> BigInt {
        let mut acc = BigUint::one();
        for f in &self.factors {
            acc *= f.prime.pow(f.exp);
        }
        let s = if self.negative { Sign::Minus } else { Sign::Plus };
        BigInt::from_biguint(s, acc)
    }

    pub fn is_certified(&self) -> bool {
        self.factors.iter().all(|f| f.certified)
    }

    pub fn contains(&self, q: &BigUint) -> bool {
        self.factors.iter().any(|f| &f.prime == q)
    }

    /// Table-style rendering, e.g. `-2^4.3.5.23.47`; `mark` wraps one prime
    /// in `**…**`. The unit renders as `1`.
    pub fn render(&self, sep: &str, mark: Option<&BigUint>) -> String {
        use core::fmt::Write;
        let mut s = String::new();
        if self.negative {
            s.push('-');
        }
        if self.factors.is_empty() {
            s.push('1');
        }
        for (i, f) in self.factors.iter().enumerate() {
            if i > 0 {
                s.push_str(sep);
            }
            let marked = mark == Some(&f.prime);
            if marked {
                s.push_str("**");
            }
            let _ = write!(s, "{}", f.prime);
            if f.exp > 1 {
                let _ = write!(s, "^{}", f.exp);
            }
            if !f.certified {
                s.push('?');
            }
            if marked {
                s.push_str("**");
            }
        }
        s
    }

    fn push(&mut self, p: BigUint, certified: bool) {
        match self.factors.binary_search_by(|f| f.prime.cmp(&p)) {
            Ok(i) => self.factors[i].exp += 1,
            Err(i) => self.factors.insert(i, PrimePower { prime: p, exp: 1, certified }),
        }
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(".", None))
    }
}

/// Parse a table-style factored string such as `-2^6.3^2.13.31` or
/// `2^4·3·5`. Factors may appear in any order; the result is sorted and
/// merged. Returns `None` on malformed input.
pub fn parse_factored(s: &str) -> Option<Factorization> {
    let s = s.trim().replace("**", "");
    let (negative, body) = match s.strip_prefix('-').or_else(|| s.strip_prefix('−')) {
        Some(rest) => (true, rest.trim()),
        None => (false, s.as_str()),
    };
    let mut out = Factorization { negative, factors: Vec::new() };
    if body == "1" {
        return Some(out);
    }
    for tok in body.split(|c| c == '.' || c == '·' || c == '*') {
        let tok = tok.trim();
        if tok.is_empty() {
            return None;
        }
        let (b, e) = match tok.split_once('^') {
            Some((b, e)) => (b, e.parse::<u32>().ok()?),
            None => (tok, 1),
        };
        let p: BigUint = b.parse().ok()?;
        for _ in 0..e {
            out.push(p.clone(), true);
        }
    }
    Some(out)
}

/// Reusable factorizer holding the trial-division prime table.
pub struct Factorizer {
    small: Vec<u32>,
    budget: u64,
}

impl Default for Factorizer {
    fn default() -> Self {
        Self::new(4_000_000)
    }
}

impl Factorizer {
    /// `budget` caps the total rho iterations spent per input.
    pub fn new(budget: u64) -> Self {
        Factorizer { small: primes_below(TRIAL_LIMIT), budget }
    }

    pub fn factorize(&self, n: &BigInt) -> Result<Factorization, FactorError> {
        if n.is_zero() {
            return Err(FactorError::Zero);
        }
        let mut out = Factorization { negative: n.sign() == Sign::Minus, factors: Vec::new() };
        let mut m = n.magnitude().clone();
        if let Some(v) = m.to_u64() {
            let rest = self.trial_u64(v, &mut out);
            if rest > 1 {
                let mut left = self.budget;
                if !self.split_u64(rest, &mut out, &mut left) {
                    return Err(FactorError::Budget { partial: out, cofactor: BigUint::from(rest) });
                }
            }
            return Ok(out);
        }
        for &p in &self.small {
            let pb = BigUint::from(p);
            if &pb * &pb > m {
                break;
            }
            loop {
                let (q, r) = m.div_rem(&pb);
                if !r.is_zero() {
                    break;
                }
                m = q;
                out.push(pb.clone(), true);
            }
        }
        if m.is_one() {
            return Ok(out);
        }
        let lim = BigUint::from(TRIAL_LIMIT);
        if &lim * &lim > m {
            out.push(m, true);
            return Ok(out);
        }
        let mut left = self.budget;
        let mut stack = alloc::vec![m];
        while let Some(c) = stack.pop() {
            if let Some(v) = c.to_u64() {
                if !self.split_u64(v, &mut out, &mut left) {
                    return Err(FactorError::Budget { partial: out, cofactor: c });
                }
                continue;
            }
            let (prime, certified) = is_prime_big(&c);
            if prime {
                out.push(c, certified);
                continue;
            }
            match rho_big(&c, &mut left) {
                Some(d) => {
                    let e = &c / &d;
                    stack.push(d);
                    stack.push(e);
                }
                None => {
                    let mut rest = c;
                    for s in stack.drain(..) {
                        rest *= s;
                    }
                    return Err(FactorError::Budget { partial: out, cofactor: rest });
                }
            }
        }
        Ok(out)
    }

    fn trial_u64(&self, mut v: u64, out: &mut Factorization) -> u64 {
        for &p in &self.small {
            let p = p as u64;
            if p * p > v {
                break;
            }
            while v % p == 0 {
                v /= p;
                out.push(BigUint::from(p), true);
            }
        }
        let lim = TRIAL_LIMIT as u64;
        if v > 1 && (v < lim * lim) {
            out.push(BigUint::from(v), true);
            return 1;
        }
        v
    }

    fn split_u64(&self, v: u64, out: &mut Factorization, left: &mut u64) -> bool {
        let mut stack = alloc::vec![v];
        while let Some(c) = stack.pop() {
            if c == 1 {
                continue;
            }
            if is_prime_u64(c) {
                out.push(BigUint::from(c), true);
                continue;
            }
            match rho_u64(c, left) {
                Some(d) => {
                    stack.push(d);
                    stack.push(c / d);
                }
                None => return false,
            }
        }
        true
    }
}

/// Factor with a default-budget factorizer. Builds the prime table on each
/// call; reuse a [`Factorizer`] for batches.
pub fn factorize(n: &BigInt) -> Result<Factorization, FactorError> {
    Factorizer::default().factorize(n)
}

pub fn primes_below(limit: u32) -> Vec<u32> {
    let n = limit as usize;
    let mut sieve = alloc::vec![true; n.max(2)];
    sieve[0] = false;
    if n > 1 {
        sieve[1] = false;
    }
    let mut i = 2;
    while i * i < n {
        if sieve[i] {
            let mut j = i * i;
            while j < n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as u32).collect()
}

#[inline]
fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    r
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &MR_BASES[..12] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Returns (is_prime, certified). Above the deterministic bound, extra
/// bases are tried and a positive answer is flagged as probable only.
pub fn is_prime_big(n: &BigUint) -> (bool, bool) {
    if let Some(v) = n.to_u64() {
        return (is_prime_u64(v), true);
    }
    for &p in &MR_BASES {
        if (n % p).is_zero() {
            return (false, true);
        }
    }
    let bound: BigUint = MR_DET_BOUND.parse().unwrap();
    let det = n < &bound;
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    let extra = [43u64, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97];
    let bases = MR_BASES.iter().chain(if det { [].iter() } else { extra.iter() });
    'outer: for &a in bases {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == nm1 {
                continue 'outer;
            }
        }
        return (false, true);
    }
    (true, det)
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Brent's rho on a composite word; returns a nontrivial divisor.
fn rho_u64(n: u64, left: &mut u64) -> Option<u64> {
    if n % 2 == 0 {
        return Some(2);
    }
    const M: u64 = 128;
    for c in 1..64u64 {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
        let mut g = 1;
        let (mut x, mut ys) = (0u64, 0u64);
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                let lim = M.min(r - k);
                for _ in 0..lim {
                    y = f(y);
                    q = mulmod(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += lim;
                if *left < lim {
                    return None;
                }
                *left -= lim;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return Some(g);
        }
    }
    None
}

fn rho_big(n: &BigUint, left: &mut u64) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    const M: u64 = 128;
    let one = BigUint::one();
    for c in 1..64u32 {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r = 1u64;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = BigUint::zero();
        let mut ys = BigUint::zero();
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                let lim = M.min(r - k);
                for _ in 0..lim {
                    y = f(&y);
                    let d = if x > y { &x - &y } else { &y - &x };
                    q = q * d % n;
                }
                g = q.gcd(n);
                k += lim;
                if *left < lim {
                    return None;
                }
                *left -= lim;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let d = if x > ys { &x - &ys } else { &ys - &x };
                g = d.gcd(n);
                if g > one {
                    break;
                }
            }
        }
        if &g != n {
            return Some(g);
        }
    }
    None
}
