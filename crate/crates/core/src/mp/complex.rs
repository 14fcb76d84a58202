use core::ops::{Add, Mul, Neg, Sub};

use super::Float;

#[derive(Clone, Debug)]
pub struct Complex {
    pub re: Float,
    pub im: Float,
}

impl Complex {
    pub fn new(re: Float, im: Float) -> Complex {
        Complex { re, im }
    }

    pub fn real(re: Float) -> Complex {
        let im = Float::zero(re.prec());
        Complex { re, im }
    }

    pub fn zero(prec: u32) -> Complex {
        Complex::real(Float::zero(prec))
    }

    pub fn one(prec: u32) -> Complex {
        Complex::real(Float::one(prec))
    }

    pub fn conj(&self) -> Complex {
        Complex { re: self.re.clone(), im: -&self.im }
    }

    pub fn norm_sqr(&self) -> Float {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn abs(&self) -> Float {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, k: &Float) -> Complex {
        Complex { re: &self.re * k, im: &self.im * k }
    }

    pub fn mul_2exp(&self, k: i64) -> Complex {
        Complex { re: self.re.mul_2exp(k), im: self.im.mul_2exp(k) }
    }

    pub fn add_real(&self, k: &Float) -> Complex {
        Complex { re: &self.re + k, im: self.im.clone() }
    }

    pub fn div(&self, o: &Complex) -> Complex {
        let d = o.norm_sqr();
        let re = (&self.re * &o.re + &self.im * &o.im).div(&d);
        let im = (&self.im * &o.re - &self.re * &o.im).div(&d);
        Complex { re, im }
    }

    pub fn inv(&self) -> Complex {
        Complex::one(self.re.prec()).div(self)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// log2 of the modulus, finite for any nonzero value.
    pub fn log2_abs(&self) -> f64 {
        let a = self.re.log2_abs();
        let b = self.im.log2_abs();
        let m = a.max(b);
        if m == f64::NEG_INFINITY {
            return m;
        }
        m + 0.5 * libm::log2(libm::exp2(2.0 * (a - m)) + libm::exp2(2.0 * (b - m)))
    }
}

impl Add<&Complex> for &Complex {
    type Output = Complex;
    fn add(self, o: &Complex) -> Complex {
        Complex { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Sub<&Complex> for &Complex {
    type Output = Complex;
    fn sub(self, o: &Complex) -> Complex {
        Complex { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Mul<&Complex> for &Complex {
    type Output = Complex;
    fn mul(self, o: &Complex) -> Complex {
        Complex {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Neg for &Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex { re: -&self.re, im: -&self.im }
    }
}
