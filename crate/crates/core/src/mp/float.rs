use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

/// Binary floating point value `man · 2^exp`, rounded to `prec` bits after
/// every operation (round half away from zero). The exponent is unbounded
/// for practical purposes.
#[derive(Clone, Debug)]
pub struct Float {
    man: BigInt,
    exp: i64,
    prec: u32,
}

fn round_shr(m: &BigInt, sh: u64) -> BigInt {
    if sh == 0 {
        return m.clone();
    }
    let a = (m.magnitude() >> (sh - 1) as usize) + 1u32;
    let a = a >> 1usize;
    BigInt::from_biguint(m.sign(), a)
}

impl Float {
    pub(crate) fn from_parts(man: BigInt, exp: i64, prec: u32) -> Float {
        if man.is_zero() {
            return Float { man, exp: 0, prec };
        }
        let bits = man.bits();
        if bits > prec as u64 {
            let sh = bits - prec as u64;
            let man = round_shr(&man, sh);
            Float { man, exp: exp + sh as i64, prec }
        } else {
            Float { man, exp, prec }
        }
    }

    pub fn zero(prec: u32) -> Float {
        Float { man: BigInt::zero(), exp: 0, prec }
    }

    pub fn one(prec: u32) -> Float {
        Float { man: BigInt::one(), exp: 0, prec }
    }

    pub fn from_i64(v: i64, prec: u32) -> Float {
        Float::from_parts(BigInt::from(v), 0, prec)
    }

    pub fn from_bigint(v: &BigInt, prec: u32) -> Float {
        Float::from_parts(v.clone(), 0, prec)
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Float {
        Float::from_bigint(r.numer(), prec + 8).div(&Float::from_bigint(r.denom(), prec + 8)).with_prec(prec)
    }

    /// Exact conversion of a finite double.
    pub fn from_f64(x: f64, prec: u32) -> Float {
        if x == 0.0 || !x.is_finite() {
            return Float::zero(prec);
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let e = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if e == 0 { (frac, -1074) } else { (frac | (1u64 << 52), e - 1075) };
        Float::from_parts(BigInt::from(m as i64 * sign), e, prec)
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(&self, prec: u32) -> Float {
        Float::from_parts(self.man.clone(), self.exp, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    pub fn signum(&self) -> i32 {
        match self.man.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Float {
        Float { man: self.man.abs(), exp: self.exp, prec: self.prec }
    }

    pub fn mul_2exp(&self, k: i64) -> Float {
        if self.is_zero() {
            return self.clone();
        }
        Float { man: self.man.clone(), exp: self.exp + k, prec: self.prec }
    }

    /// Position of the leading bit: |x| ∈ [2^(t-1), 2^t).
    pub fn top(&self) -> i64 {
        self.exp + self.man.bits() as i64
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.man.bits() as i64;
        let (m, e) = if bits > 60 {
            (round_shr(&self.man, (bits - 60) as u64), self.exp + bits - 60)
        } else {
            (self.man.clone(), self.exp)
        };
        let m = m.to_i64().unwrap() as f64;
        let e = e.clamp(-4000, 4000) as i32;
        libm::ldexp(m, e)
    }

    /// log2|x| without overflow; -inf for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.man.bits() as i64;
        let sh = (bits - 60).max(0);
        let m = round_shr(&self.man, sh as u64).abs().to_i64().unwrap() as f64;
        libm::log2(m) + (self.exp + sh) as f64
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.man << self.exp as usize)
        } else {
            BigRational::new(self.man.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    /// Fixed-point image round(x·2^f).
    pub(crate) fn to_fixed(&self, f: u32) -> BigInt {
        let sh = self.exp + f as i64;
        if sh >= 0 {
            &self.man << sh as usize
        } else {
            round_shr(&self.man, (-sh) as u64)
        }
    }

    pub(crate) fn from_fixed(v: BigInt, f: u32, prec: u32) -> Float {
        Float::from_parts(v, -(f as i64), prec)
    }

    pub fn sqrt(&self) -> Float {
        assert!(!self.is_negative(), "square root of a negative number");
        if self.is_zero() {
            return self.clone();
        }
        let p = self.prec as i64;
        let bits = self.man.bits() as i64;
        let mut sh = 2 * p + 4 - bits;
        if sh < 0 {
            sh = 0;
        }
        if (self.exp - sh).rem_euclid(2) != 0 {
            sh += 1;
        }
        let m = (&self.man << sh as usize).sqrt();
        Float::from_parts(m, (self.exp - sh) / 2, self.prec)
    }

    pub fn powi(&self, n: u32) -> Float {
        let mut r = Float::one(self.prec);
        let mut b = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                r = &r * &b;
            }
            b = &b * &b;
            n >>= 1;
        }
        r
    }

    fn add_impl(&self, o: &Float, prec: u32) -> Float {
        if o.is_zero() {
            return self.with_prec(prec);
        }
        if self.is_zero() {
            return o.with_prec(prec);
        }
        let ta = self.top();
        let tb = o.top();
        let gap = prec as i64 + 3;
        if ta > tb + gap {
            return self.with_prec(prec);
        }
        if tb > ta + gap {
            return o.with_prec(prec);
        }
        let e = self.exp.min(o.exp);
        let m = (&self.man << (self.exp - e) as usize) + (&o.man << (o.exp - e) as usize);
        Float::from_parts(m, e, prec)
    }

    pub fn div(&self, o: &Float) -> Float {
        assert!(!o.is_zero(), "division by zero");
        let prec = self.prec.max(o.prec);
        if self.is_zero() {
            return Float::zero(prec);
        }
        let sh = (prec as i64 + 4 + o.man.bits() as i64 - self.man.bits() as i64).max(0);
        let q = (&self.man << sh as usize) / &o.man;
        Float::from_parts(q, self.exp - o.exp - sh, prec)
    }

    /// Decimal scientific rendering with `digits` significant digits.
    pub fn to_sci(&self, digits: u32) -> String {
        if self.is_zero() {
            return String::from("0");
        }
        let digits = digits.max(1);
        let e10 = libm::floor(self.log2_abs() * core::f64::consts::LOG10_2) as i64;
        let mut e10 = e10;
        let r = self.to_rational().abs();
        let mut m = scaled_round(&r, digits as i64 - 1 - e10);
        let lim: BigInt = Pow::pow(BigInt::from(10u32), digits);
        if m >= lim {
            e10 += 1;
            m = scaled_round(&r, digits as i64 - 1 - e10);
        }
        let lo: BigInt = Pow::pow(BigInt::from(10u32), digits - 1);
        if m < lo {
            e10 -= 1;
            m = scaled_round(&r, digits as i64 - 1 - e10);
        }
        let s = alloc::format!("{}", m);
        let (a, b) = s.split_at(1);
        let sign = if self.is_negative() { "-" } else { "" };
        if b.is_empty() {
            alloc::format!("{}{}e{}", sign, a, e10)
        } else {
            alloc::format!("{}{}.{}e{}", sign, a, b, e10)
        }
    }

    /// Fixed-point decimal rendering with `frac` digits after the point.
    pub fn to_fixed_string(&self, frac: u32) -> String {
        crate::exact::rational_to_decimal(&self.to_rational(), frac)
    }
}

fn scaled_round(r: &BigRational, k: i64) -> BigInt {
    let ten = BigInt::from(10u32);
    let x = if k >= 0 {
        r * BigRational::from_integer(Pow::pow(ten, k as u32))
    } else {
        r / BigRational::from_integer(Pow::pow(ten, (-k) as u32))
    };
    let (q, rem) = x.numer().div_rem(x.denom());
    if rem * 2u32 >= *x.denom() {
        q + 1u32
    } else {
        q
    }
}

impl fmt::Display for Float {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = f.precision().unwrap_or(((self.prec as f64) * 0.30103) as usize).max(1);
        f.write_str(&self.to_sci(d as u32))
    }
}

impl PartialEq for Float {
    fn eq(&self, o: &Float) -> bool {
        self.cmp_exact(o) == Ordering::Equal
    }
}

impl PartialOrd for Float {
    fn partial_cmp(&self, o: &Float) -> Option<Ordering> {
        Some(self.cmp_exact(o))
    }
}

impl Float {
    pub fn cmp_exact(&self, o: &Float) -> Ordering {
        let d = self.add_impl(&-o, u32::MAX);
        d.signum().cmp(&0)
    }

    pub fn max_f(self, o: Float) -> Float {
        if o > self {
            o
        } else {
            self
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Float> for &Float {
            type Output = Float;
            fn $m(self, o: &Float) -> Float {
                let f: fn(&Float, &Float) -> Float = $body;
                f(self, o)
            }
        }
        impl $tr<Float> for Float {
            type Output = Float;
            fn $m(self, o: Float) -> Float {
                (&self).$m(&o)
            }
        }
        impl $tr<&Float> for Float {
            type Output = Float;
            fn $m(self, o: &Float) -> Float {
                (&self).$m(o)
            }
        }
        impl $tr<Float> for &Float {
            type Output = Float;
            fn $m(self, o: Float) -> Float {
                self.$m(&o)
            }
        }
    };
}

binop!(Add, add, |a, b| a.add_impl(b, a.prec.max(b.prec)));
binop!(Sub, sub, |a, b| a.add_impl(&-b, a.prec.max(b.prec)));
binop!(Mul, mul, |a, b| Float::from_parts(&a.man * &b.man, a.exp + b.exp, a.prec.max(b.prec)));
binop!(Div, div, |a, b| Float::div(a, b));

impl Neg for &Float {
    type Output = Float;
    fn neg(self) -> Float {
        Float { man: -&self.man, exp: self.exp, prec: self.prec }
    }
}

impl Neg for Float {
    type Output = Float;
    fn neg(self) -> Float {
        Float { man: -self.man, exp: self.exp, prec: self.prec }
    }
}
