//! Multiprecision real and complex arithmetic, elementary functions and the
//! complex gamma function.
//!
//! All transcendental kernels run on fixed-point `BigInt`s with guard bits
//! after reducing the argument to a small interval.

mod complex;
mod float;

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub use complex::Complex;
pub use float::Float;

const GUARD: u32 = 64;

// Fixed-point product truncated toward zero, so series terms of either sign
// reach zero.
fn fmul(a: &BigInt, b: &BigInt, f: u32) -> BigInt {
    let m = a * b;
    let q = m.magnitude() >> f as usize;
    BigInt::from_biguint(m.sign(), q)
}

/// Working precision plus cached constants.
#[derive(Clone, Debug)]
pub struct MpContext {
    pub prec: u32,
    pi: Float,
    ln2: Float,
    ln_pi: Float,
    half_ln_2pi: Float,
    stirling: Vec<Float>,
}

fn atan_inv_fixed(n: u64, f: u32) -> BigInt {
    let one = BigInt::one() << f as usize;
    let n2 = BigInt::from(n * n);
    let mut term = one / n;
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    while !term.is_zero() {
        let t = &term / (2 * k + 1);
        if k % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
        term /= &n2;
        k += 1;
    }
    sum
}

fn pi_fixed(f: u32) -> BigInt {
    (atan_inv_fixed(5, f + 8) * 16 - atan_inv_fixed(239, f + 8) * 4) >> 8usize
}

fn ln2_fixed(f: u32) -> BigInt {
    let f2 = f + 8;
    let mut term = (BigInt::one() << f2 as usize) / 3u32;
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    while !term.is_zero() {
        sum += &term / (2 * k + 1);
        term /= 9u32;
        k += 1;
    }
    (sum * 2) >> 8usize
}

/// B_2k for k = 1..=n from the tangent numbers.
pub fn bernoulli_even(n: usize) -> Vec<num_rational::BigRational> {
    use num_rational::BigRational;
    let mut t: Vec<BigInt> = alloc::vec![BigInt::zero(); n + 1];
    if n == 0 {
        return Vec::new();
    }
    t[1] = BigInt::one();
    for k in 2..=n {
        t[k] = &t[k - 1] * BigInt::from(k - 1);
    }
    for k in 2..=n {
        for j in k..=n {
            t[j] = &t[j - 1] * BigInt::from(j - k) + &t[j] * BigInt::from(j - k + 2);
        }
    }
    (1..=n)
        .map(|k| {
            let four_k = BigInt::one() << (2 * k);
            let num = BigInt::from(2 * k) * &t[k];
            let den = &four_k * (&four_k - 1u32);
            let r = BigRational::new(num, den);
            if k % 2 == 1 {
                r
            } else {
                -r
            }
        })
        .collect()
}

/// Γ(w) = exp(log_part) / denom.
#[derive(Clone, Debug)]
pub struct GammaParts {
    pub log_part: Complex,
    pub denom: Complex,
}

impl MpContext {
    pub fn new(prec: u32) -> MpContext {
        let hp = prec + GUARD;
        let f = hp + 8;
        let pi = Float::from_fixed(pi_fixed(f), f, hp);
        let ln2 = Float::from_fixed(ln2_fixed(f), f, hp);
        let mut ctx = MpContext {
            prec,
            pi: pi.clone(),
            ln2,
            ln_pi: Float::zero(hp),
            half_ln_2pi: Float::zero(hp),
            stirling: Vec::new(),
        };
        let hctx = MpContext { prec: hp, ..ctx.clone() };
        ctx.ln_pi = hctx.ln(&pi);
        ctx.half_ln_2pi = hctx.ln(&pi.mul_2exp(1)).mul_2exp(-1);
        let nb = (prec as usize) / 3 + 12;
        ctx.stirling = bernoulli_even(nb)
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let k = (i + 1) as i64;
                let c = b / num_rational::BigRational::from_integer(BigInt::from(2 * k * (2 * k - 1)));
                Float::from_rational(&c, hp)
            })
            .collect();
        ctx
    }

    pub fn pi(&self) -> Float {
        self.pi.with_prec(self.prec)
    }

    pub fn ln2(&self) -> Float {
        self.ln2.with_prec(self.prec)
    }

    pub fn ln_pi(&self) -> Float {
        self.ln_pi.with_prec(self.prec)
    }

    pub fn float(&self, v: i64) -> Float {
        Float::from_i64(v, self.prec)
    }

    pub fn ratio(&self, a: i64, b: i64) -> Float {
        self.float(a).div(&self.float(b))
    }

    fn fbits(&self) -> u32 {
        self.prec + 40
    }

    pub fn exp(&self, x: &Float) -> Float {
        let p = self.prec;
        if x.is_zero() {
            return Float::one(p);
        }
        let xf = x.to_f64();
        assert!(xf.abs() < 1e15, "exp argument out of range");
        let k = libm::round(xf / core::f64::consts::LN_2) as i64;
        let r = x.with_prec(p + GUARD + 64) - &self.ln2 * &Float::from_i64(k, 64);
        let j = 10u32;
        let f = self.fbits() + j;
        let one = BigInt::one() << f as usize;
        let rr = r.mul_2exp(-(j as i64)).to_fixed(f);
        let mut sum = one.clone();
        let mut term = one;
        let mut n = 1u32;
        loop {
            term = fmul(&term, &rr, f) / n;
            if term.is_zero() {
                break;
            }
            sum += &term;
            n += 1;
        }
        for _ in 0..j {
            sum = fmul(&sum, &sum, f);
        }
        Float::from_fixed(sum, f, p).mul_2exp(k)
    }

    pub fn ln(&self, x: &Float) -> Float {
        assert!(x.signum() > 0, "logarithm of a non-positive number");
        let p = self.prec;
        let mut e = x.top();
        let mut f = x.mul_2exp(-e);
        // f ∈ [1/2, 1); move it into [1/√2, √2)
        if f.to_f64() < core::f64::consts::FRAC_1_SQRT_2 {
            e -= 1;
            f = f.mul_2exp(1);
        }
        let fb = self.fbits();
        let one = BigInt::one() << fb as usize;
        let ff = f.to_fixed(fb);
        let u = ((&ff - &one) << fb as usize) / (&ff + &one);
        let u2 = fmul(&u, &u, fb);
        let mut term = u;
        let mut sum = BigInt::zero();
        let mut k = 0u64;
        while !term.is_zero() {
            sum += &term / (2 * k + 1);
            term = fmul(&term, &u2, fb);
            k += 1;
        }
        let lnf = Float::from_fixed(sum * 2, fb, p + GUARD);
        (lnf + &self.ln2 * &Float::from_i64(e, 64)).with_prec(p)
    }

    pub fn sin_cos(&self, y: &Float) -> (Float, Float) {
        let p = self.prec;
        let two_pi = self.pi.mul_2exp(1);
        let yf = y.to_f64();
        let q = libm::round(yf / core::f64::consts::TAU) as i64;
        let r = if q == 0 {
            y.clone()
        } else {
            y.with_prec(p + GUARD + 64) - &two_pi * &Float::from_i64(q, 64)
        };
        let j = 8u32;
        let fb = self.fbits() + 2 * j;
        let one = BigInt::one() << fb as usize;
        let rr = r.mul_2exp(-(j as i64)).to_fixed(fb);
        let mut s = BigInt::zero();
        let mut c = BigInt::zero();
        let mut term = one.clone();
        let mut n = 0u32;
        while !term.is_zero() {
            match n % 4 {
                0 => c += &term,
                1 => s += &term,
                2 => c -= &term,
                _ => s -= &term,
            }
            n += 1;
            term = fmul(&term, &rr, fb) / n;
        }
        for _ in 0..j {
            let s2 = fmul(&s, &c, fb - 1);
            let c2 = fmul(&c, &c, fb) - fmul(&s, &s, fb);
            s = s2;
            c = c2;
        }
        (Float::from_fixed(s, fb, p), Float::from_fixed(c, fb, p))
    }

    /// atan(t) for |t| ≤ 1.
    fn atan_small(&self, t: &Float) -> Float {
        let fb = self.fbits() + 8;
        let one = BigInt::one() << fb as usize;
        let mut tt = t.to_fixed(fb);
        let halvings = 4;
        for _ in 0..halvings {
            let s = ((&one << fb as usize) + &tt * &tt).sqrt();
            tt = (&tt << fb as usize) / (&one + s);
        }
        let t2 = fmul(&tt, &tt, fb);
        let mut term = tt;
        let mut sum = BigInt::zero();
        let mut k = 0u64;
        while !term.is_zero() {
            let v = &term / (2 * k + 1);
            if k % 2 == 0 {
                sum += v;
            } else {
                sum -= v;
            }
            term = fmul(&term, &t2, fb);
            k += 1;
        }
        Float::from_fixed(sum << halvings as usize, fb, self.prec)
    }

    pub fn atan2(&self, y: &Float, x: &Float) -> Float {
        let pi = self.pi();
        if x.is_zero() && y.is_zero() {
            return Float::zero(self.prec);
        }
        if y.abs() <= x.abs() {
            let base = self.atan_small(&y.div(x));
            if x.signum() > 0 {
                base
            } else if y.signum() >= 0 {
                base + pi
            } else {
                base - pi
            }
        } else {
            let base = self.atan_small(&x.div(y));
            let h = pi.mul_2exp(-1);
            if y.signum() > 0 {
                h - base
            } else {
                -h - base
            }
        }
    }

    pub fn cexp(&self, z: &Complex) -> Complex {
        let m = self.exp(&z.re);
        let (s, c) = self.sin_cos(&z.im);
        Complex::new(&m * &c, &m * &s)
    }

    /// Principal logarithm.
    pub fn cln(&self, z: &Complex) -> Complex {
        let re = self.ln(&z.norm_sqr()).mul_2exp(-1);
        let im = self.atan2(&z.im, &z.re);
        Complex::new(re, im)
    }

    /// x^z for real x > 0, given ln x.
    pub fn pow_ln(&self, lnx: &Float, z: &Complex) -> Complex {
        self.cexp(&z.scale(lnx))
    }

    /// Stirling series for ln Γ(w), valid for Re w ≥ 1 and |w| large.
    fn stirling(&self, w: &Complex) -> Complex {
        let p = self.prec;
        let lw = self.cln(w);
        let half = Float::one(p).mul_2exp(-1);
        let mut s = &(&w.add_real(&-&half) * &lw) - w;
        s = s.add_real(&self.half_ln_2pi.with_prec(p));
        let inv = w.inv();
        let inv2 = &inv * &inv;
        let mut pw = inv;
        let target = -(p as f64) - 8.0 + s.log2_abs().max(0.0);
        for c in &self.stirling {
            let t = pw.scale(&c.with_prec(p));
            let small = t.log2_abs() < target;
            s = &s + &t;
            if small {
                return s;
            }
            pw = &pw * &inv2;
        }
        panic!("Stirling series did not converge; increase the shift");
    }

    fn stirling_radius(&self) -> f64 {
        0.2 * self.prec as f64 + 4.0
    }

    /// Γ(w) split as exp(L)/D with L from Stirling after shifting w.
    pub fn gamma_parts(&self, w: &Complex) -> GammaParts {
        let p = self.prec;
        let r = self.stirling_radius();
        let (wr, wi) = w.to_f64();
        let mut m = 0i64;
        if wr < 1.0 {
            m = libm::ceil(1.0 - wr) as i64;
        }
        let mr = wr + m as f64;
        if mr * mr + wi * wi < r * r {
            let need = libm::sqrt(r * r - wi * wi) - mr;
            if need > 0.0 {
                m += libm::ceil(need) as i64;
            }
        }
        let mut denom = Complex::one(p);
        let mut cur = w.clone();
        for _ in 0..m {
            denom = &denom * &cur;
            cur = cur.add_real(&Float::one(p));
        }
        GammaParts { log_part: self.stirling(&cur), denom }
    }

    pub fn gamma(&self, w: &Complex) -> Complex {
        let g = self.gamma_parts(w);
        self.cexp(&g.log_part).div(&g.denom)
    }

    pub fn gamma_real(&self, x: &Float) -> Float {
        self.gamma(&Complex::real(x.clone())).re
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Float, s: &str, bits: f64) {
        let d = crate::exact::parse_decimal(s).unwrap().value;
        let b = Float::from_rational(&d, a.prec() + 20);
        let err = (a.with_prec(a.prec() + 20) - &b).abs();
        let rel = err.log2_abs() - b.log2_abs();
        assert!(rel < -bits, "{} vs {} (rel 2^{})", a, s, rel);
    }

    #[test]
    fn constants() {
        let c = MpContext::new(200);
        close(&c.pi(), "3.14159265358979323846264338327950288419716939937510582097494459", 195.0);
        close(&c.ln2(), "0.693147180559945309417232121458176568075500134360255254120680009", 195.0);
        close(&c.exp(&c.float(1)), "2.71828182845904523536028747135266249775724709369995957496696763", 190.0);
    }

    #[test]
    fn elementary() {
        let c = MpContext::new(160);
        close(&c.exp(&c.float(-30)), "0.00000000000009357622968840174604915832223378706744958322688935880416", 150.0);
        close(&c.ln(&c.float(10)), "2.30258509299404568401799145468436420760110148862877", 150.0);
        close(&c.ln(&c.ratio(1001, 1000)), "0.000999500333083533166809398920535011460755062393166551997019744", 140.0);
        let (s, co) = c.sin_cos(&c.float(100));
        close(&s, "-0.506365641109758793656557610459785432065032721290657", 140.0);
        close(&co, "0.862318872287683934101938513950842535510084008535510829280162", 140.0);
        close(&c.atan2(&c.float(1), &c.float(-1)), "2.35619449019234492884698253745962716314787704953133", 150.0);
        close(&c.atan2(&c.float(-3), &c.float(1)), "-1.24904577239825442582991707728109012307782940412989", 150.0);
    }

    #[test]
    fn bernoulli() {
        use num_rational::BigRational;
        let b = bernoulli_even(6);
        let want = [(1, 6), (-1, 30), (1, 42), (-1, 30), (5, 66), (-691, 2730)];
        for (x, (n, d)) in b.iter().zip(want) {
            assert_eq!(*x, BigRational::new(n.into(), d.into()));
        }
    }

    #[test]
    fn gamma_values() {
        let c = MpContext::new(180);
        let half = c.ratio(1, 2);
        let g = c.gamma_real(&half);
        close(&(&g * &g), "3.14159265358979323846264338327950288419716939937510582097494459", 165.0);
        close(&c.gamma_real(&c.float(20)), "121645100408832000", 165.0);
        close(&c.gamma_real(&c.ratio(-7, 2)), "0.270088205852269108921625521271031646902483726647220895727818", 160.0);
        let z = c.gamma(&Complex::new(c.float(3), c.float(40)));
        close(&z.re, "-0.000000000000000000000001586960998451476363330472698814294148766631711115589134", 150.0);
        close(&z.im, "-0.00000000000000000000001300714980038894280964552217847814908402140572370027764", 150.0);
    }
}
