//! Numerical evaluation of L(s) through the smoothed functional equation
//!
//!   Λ(s) = A^(−s) I(s; A) + ε A^(w₁−s) I(w₁−s; 1/A) − Σ r A^(ρ−s)/(ρ−s),
//!   I(s; A) = (1/2πi) ∫_(c) γ(z) Σ a_n (n/A)^(−z) dz / (z − s),
//!
//! where ρ runs over the poles of Λ with residues r. The line integral is
//! a trapezoid sum with nodes z_k = c + ikh; the Dirichlet sums at the
//! nodes are shared by every evaluation point.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::spec::LSpec;
use super::LError;
use crate::mp::{Complex, Float, MpContext};

/// Distance from the contour to the rightmost singularity it must clear.
const CONTOUR_GAP: f64 = 5.0;
pub const DEFAULT_DIGITS_CAP: u32 = 38;

#[derive(Clone, Debug)]
pub struct EvalResult {
    pub value: Float,
    /// Absolute bound on |computed − true|.
    pub envelope: f64,
    pub digits: u32,
    pub coeffs_used: usize,
}

impl EvalResult {
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn relative_envelope(&self) -> f64 {
        self.envelope / self.value.to_f64().abs()
    }

    /// True when the envelope leaves at least three significant digits.
    pub fn has_three_digits(&self) -> bool {
        let v = self.value.to_f64().abs();
        if v == 0.0 || !self.envelope.is_finite() {
            return false;
        }
        let lead = libm::floor(libm::log10(v));
        self.envelope <= 0.5 * libm::pow(10.0, lead - 2.0)
    }

    /// Does [value − envelope, value + envelope] contain x?
    pub fn contains(&self, x: &BigRational) -> bool {
        let p = self.value.prec() + 64;
        let d = (self.value.with_prec(p) - Float::from_rational(x, p)).abs();
        d.to_f64() <= self.envelope
    }
}

fn rat_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn log2_sum(vals: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = vals.into_iter().filter(|x| *x > f64::NEG_INFINITY).collect();
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + libm::log2(v.iter().map(|x| libm::exp2(x - m)).sum::<f64>())
}

const LN2: f64 = core::f64::consts::LN_2;
const LN_PI: f64 = 1.1447298858494002;

/// ln|Γ(x + iy)| for x > 0.
pub(crate) fn ln_abs_gamma(x: f64, y: f64) -> f64 {
    let mut x = x;
    let mut shift = 0.0;
    while x < 12.0 {
        shift += 0.5 * libm::log(x * x + y * y);
        x += 1.0;
    }
    let r2 = x * x + y * y;
    let th = libm::atan2(y, x);
    let main = (x - 0.5) * 0.5 * libm::log(r2) - y * th - x + 0.5 * libm::log(2.0 * core::f64::consts::PI);
    let inv1 = x / (12.0 * r2);
    let r6 = r2 * r2 * r2;
    let (x2, y2) = (x * x, y * y);
    let inv3 = (x2 * x - 3.0 * x * y2) / (360.0 * r6);
    let inv5 = (x2 * x2 * x - 10.0 * x2 * x * y2 + 5.0 * x * y2 * y2) / (1260.0 * r6 * r2 * r2);
    let inv7 = x * (x2 * x2 * x2 - 21.0 * x2 * x2 * y2 + 35.0 * x2 * y2 * y2 - 7.0 * y2 * y2 * y2) / (1680.0 * r6 * r6 * r2);
    main + inv1 - inv3 + inv5 - inv7 - shift
}

/// ln|γ(x + iy)| with γ(z) = Π π^(−(z+μ)/2) Γ((z+μ)/2).
pub(crate) fn ln_abs_gamma_factor(shifts: &[i64], x: f64, y: f64) -> f64 {
    shifts.iter().map(|&m| -(x + m as f64) / 2.0 * LN_PI + ln_abs_gamma((x + m as f64) / 2.0, y / 2.0)).sum()
}

/// ln|γ(x)| for real x off the poles.
fn ln_abs_gamma_real(shifts: &[i64], x: f64) -> f64 {
    shifts.iter().map(|&m| -(x + m as f64) / 2.0 * LN_PI + libm::lgamma((x + m as f64) / 2.0)).sum()
}

/// ln of min over lines c of t^(−c)γ(c)J(c)/2π, a bound on |K_s(t)| where
/// K_s(t) = (1/2πi)∫_(c) γ(z)t^(−z)dz/(z − s). J bounds ∫|γ(c+iy)/γ(c)|/|c+iy−s| dy
/// through |Γ(x+iv)| ≤ Γ(x)(1 + v²/x²)^(−1/2).
fn ln_kernel_bound(shifts: &[i64], s: f64, ln_t: f64) -> f64 {
    let d = shifts.len() as f64;
    let mu_min = shifts.iter().cloned().min().unwrap_or(0) as f64;
    let mu_max = shifts.iter().cloned().max().unwrap_or(0) as f64;
    let lo = s.max(-mu_min) + 0.05;
    let f = |cp: f64| {
        let b = cp - s;
        let x = cp + mu_max;
        let j = if b <= x { 2.0 * (2.0 + libm::log(x / b)) } else { 2.0 * (x / b + 1.0) };
        ln_abs_gamma_real(shifts, cp) - cp * ln_t + libm::log(j) - libm::log(2.0 * core::f64::consts::PI)
    };
    // the minimum sits near c ≈ 2π t^(2/d)
    let mut hi = lo + 4.0 * core::f64::consts::PI * libm::exp(2.0 * ln_t / d) + 10.0 * d + 10.0;
    while f(hi) < f(hi - 1.0) {
        hi = lo + 2.0 * (hi - lo);
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        if b - a < 1e-3 {
            break;
        }
        let m1 = a + (b - a) * 0.381966;
        let m2 = b - (b - a) * 0.381966;
        if f(m1) < f(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    f(a).min(f(b)).min(f(lo))
}

/// Running sums of d_r(n), extended on demand.
struct DivisorSums {
    r: u32,
    prefix: Vec<f64>,
}

impl DivisorSums {
    fn new(r: u32) -> DivisorSums {
        DivisorSums { r, prefix: vec![0.0] }
    }

    fn ensure(&mut self, m: usize) {
        if m < self.prefix.len() {
            return;
        }
        let m = m.max(2 * self.prefix.len());
        let mut spf = vec![0u32; m + 1];
        for i in 2..=m {
            if spf[i] == 0 {
                let mut j = i;
                while j <= m {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        let mut d = vec![1.0f64; m + 1];
        for i in 2..=m {
            let p = spf[i] as usize;
            let (mut rest, mut e) = (i, 0u64);
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            d[i] = d[rest] * binom_f(e + self.r as u64 - 1, self.r as u64 - 1);
        }
        let mut prefix = Vec::with_capacity(m + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for x in d.iter().skip(1) {
            acc += x;
            prefix.push(acc);
        }
        self.prefix = prefix;
    }

    /// Σ_(a ≤ n ≤ b) d_r(n).
    fn range(&mut self, a: usize, b: usize) -> f64 {
        self.ensure(b);
        self.prefix[b] - self.prefix[a - 1]
    }
}

fn binom_f(n: u64, k: u64) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Bound on Σ_(n>N) |a_n|·A^(−s)|K_s(n/A)| for a tempered series,
/// |a_n| ≤ d_r(n)n^(w/2), summed over blocks n ∈ [t, (1+1/32)t) with the
/// kernel bound taken at the left end. Returned as a natural logarithm.
pub fn ln_tail_bound(shifts: &[i64], w: u32, s: f64, a: f64, n: usize) -> f64 {
    let r = shifts.len() as u32;
    let mut sums = DivisorSums::new(r);
    ln_tail_bound_with(&mut sums, shifts, w, s, a, n)
}

fn ln_tail_bound_with(sums: &mut DivisorSums, shifts: &[i64], w: u32, s: f64, a: f64, n: usize) -> f64 {
    const CAP: usize = 1 << 22;
    let ln_a = libm::log(a);
    let mut parts: Vec<f64> = Vec::new();
    let mut best = f64::NEG_INFINITY;
    let mut lo = n + 1;
    while lo <= CAP {
        let hi = (lo + lo / 32).max(lo).min(CAP);
        let ln_k = ln_kernel_bound(shifts, s, libm::log(lo as f64) - ln_a) - s * ln_a;
        let v = libm::log(sums.range(lo, hi)) + w as f64 / 2.0 * libm::log(hi as f64) + ln_k;
        parts.push(v);
        best = best.max(v);
        if v < best - 60.0 {
            return log2_sum(parts.iter().map(|x| x / LN2)) * LN2;
        }
        lo = hi + 1;
    }
    // beyond the sieve: d_r(n) ≤ 2^(r−1)n^((r−1)/2) and one line for all n
    let rr = shifts.len() as f64;
    let beta = w as f64 / 2.0 + (rr - 1.0) / 2.0;
    let ln_m = libm::log(CAP as f64);
    let mu_min = shifts.iter().cloned().min().unwrap_or(0) as f64;
    let mut cp = s.max(beta + 1.0).max(-mu_min) + 0.5;
    let mut far = f64::INFINITY;
    for _ in 0..2000 {
        let v = (rr - 1.0) * LN2 + (cp - s) * ln_a + ln_kernel_bound_at(shifts, s, cp) + (beta - cp + 1.0) * ln_m
            - libm::log(cp - beta - 1.0);
        far = far.min(v);
        cp += 0.5;
    }
    parts.push(far);
    log2_sum(parts.iter().map(|x| x / LN2)) * LN2
}

/// The kernel bound on one fixed line c, without the t^(−c) factor.
fn ln_kernel_bound_at(shifts: &[i64], s: f64, cp: f64) -> f64 {
    let mu_max = shifts.iter().cloned().max().unwrap_or(0) as f64;
    let b = cp - s;
    let x = cp + mu_max;
    let j = if b <= x { 2.0 * (2.0 + libm::log(x / b)) } else { 2.0 * (x / b + 1.0) };
    ln_abs_gamma_real(shifts, cp) + libm::log(j) - libm::log(2.0 * core::f64::consts::PI)
}

struct Node {
    z: Complex,
    /// w_k·(h/2π)·γ(z_k)
    g: Complex,
    sum: Complex,
}

/// Precomputed quadrature for one L-function and a fixed set of points.
pub struct Evaluator<'a> {
    spec: &'a LSpec,
    ctx: MpContext,
    digits: u32,
    c: f64,
    h: Float,
    nodes: Vec<Node>,
    lines: Vec<BigRational>,
    /// (n, K_ℓ(n) for each line ℓ) for every index carrying a ball.
    kernels: Vec<(usize, Vec<Float>)>,
    /// f64 estimates that do not depend on the line.
    s_abs_c: f64,
}

impl<'a> Evaluator<'a> {
    /// Nodes and Dirichlet sums for evaluation at the given points (and
    /// their reflections). Digits are the target for L(s).
    pub fn new(spec: &'a LSpec, points: &[BigRational], digits: u32) -> Result<Evaluator<'a>, LError> {
        let w1 = BigRational::from_integer(BigInt::from(spec.w1));
        let mut lines: Vec<BigRational> = Vec::new();
        for s in points {
            check_point(spec, s)?;
            for l in [s.clone(), &w1 - s] {
                if !lines.contains(&l) {
                    lines.push(l);
                }
            }
        }
        if lines.is_empty() {
            return Err(LError::Range("no evaluation points".into()));
        }
        let shifts = &spec.gamma_shifts;
        let mu_min = *shifts.iter().min().unwrap() as f64;
        let mut right = -mu_min;
        for l in &lines {
            right = right.max(rat_f64(l));
        }
        for (p, _) in &spec.poles {
            right = right.max(*p as f64);
        }
        let c = libm::ceil(right) + CONTOUR_GAP;
        let gap = CONTOUR_GAP - 0.5;

        // |Λ|-relative cancellation: the terms are of size γ(c)Σ|a_n|n^(−c)
        // while the result is about γ(s).
        let s_abs_c: f64 = (1..=spec.len())
            .map(|n| spec.coeff(n).magnitude() * libm::pow(n as f64, -c))
            .sum();
        let ln_gamma_c = ln_abs_gamma_factor(shifts, c, 0.0);
        let mut cancel: f64 = 0.0;
        for l in &lines {
            let lf = rat_f64(l);
            let num = ln_gamma_c + libm::log(s_abs_c) - libm::log(c - lf);
            cancel = cancel.max((num - ln_abs_gamma_real(shifts, lf)) / LN2);
        }
        let prec = (digits as f64 * 3.3219281 + 40.0 + cancel + 8.0 * libm::log2(spec.len() as f64 + 2.0)) as u32;
        let ctx = MpContext::new(prec);
        let h = 2.0 * core::f64::consts::PI * gap / (prec as f64 * LN2 + 10.0);
        let hf = Float::from_f64(h, prec);

        // Nodes until |γ(c+iy)| drops 2^−(prec+10) below γ(c).
        let scale = hf.div(&ctx.pi().with_prec(prec).mul_2exp(1));
        let mut nodes = Vec::new();
        let mut g0_log2 = 0.0;
        for k in 0.. {
            let z = Complex::new(Float::from_f64(c, prec), &hf * &Float::from_i64(k, prec));
            let mut g = gamma_factor(&ctx, shifts, &z).scale(&scale);
            if k > 0 {
                g = g.mul_2exp(1);
            } else {
                g0_log2 = g.log2_abs();
            }
            let small = g.log2_abs() < g0_log2 - prec as f64 - 10.0;
            nodes.push(Node { z, g, sum: Complex::zero(prec) });
            if small {
                break;
            }
        }

        // Dirichlet sums S_k = Σ a_n n^(−z_k), advanced by the ratio n^(−ih).
        let n = spec.len();
        let mut v: Vec<(usize, Complex)> = Vec::new();
        let mut f: Vec<(usize, Complex)> = Vec::new();
        let mut u: Vec<Complex> = vec![Complex::zero(prec); n + 1];
        let cf = Float::from_f64(c, prec);
        for m in 1..=n {
            let ln = ctx.ln(&Float::from_i64(m as i64, prec));
            let e = ctx.exp(&-(&cf * &ln));
            let (sn, cs) = ctx.sin_cos(&(&hf * &ln));
            u[m] = Complex::new(cs, -sn);
            let a = spec.coeff(m);
            let center = match a {
                super::Coeff::Exact(x) => Float::from_bigint(x, prec),
                super::Coeff::Ball { center, .. } => Float::from_f64(*center, prec),
            };
            if !center.is_zero() {
                v.push((m, Complex::real(&center * &e)));
            }
            if a.radius() > 0.0 {
                f.push((m, Complex::real(e)));
            }
        }
        let line_f: Vec<Complex> = lines.iter().map(|l| Complex::real(Float::from_rational(l, prec))).collect();
        let mut kern: Vec<Vec<Float>> = vec![vec![Float::zero(prec); lines.len()]; f.len()];
        for node in nodes.iter_mut() {
            let mut acc = Complex::zero(prec);
            for (m, x) in v.iter_mut() {
                acc = &acc + x;
                *x = &*x * &u[*m];
            }
            node.sum = acc;
            if !f.is_empty() {
                let q: Vec<Complex> = line_f.iter().map(|l| node.g.div(&(&node.z - l))).collect();
                for (i, (m, x)) in f.iter_mut().enumerate() {
                    for (j, qj) in q.iter().enumerate() {
                        let t = &qj.re * &x.re - &qj.im * &x.im;
                        kern[i][j] = &kern[i][j] + &t;
                    }
                    *x = &*x * &u[*m];
                }
            }
        }
        let kernels = f.into_iter().map(|(m, _)| m).zip(kern).collect();
        Ok(Evaluator { spec, ctx, digits, c, h: hf, nodes, lines, kernels, s_abs_c })
    }

    pub fn precision(&self) -> u32 {
        self.ctx.prec
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn contour(&self) -> f64 {
        self.c
    }

    fn line_index(&self, l: &BigRational) -> Result<usize, LError> {
        self.lines.iter().position(|x| x == l).ok_or_else(|| LError::Range("point was not prepared".into()))
    }

    /// Σ_k Re[g_k S_k A^(z_k)/(z_k − ℓ)] and log2 of Σ_k |…|.
    fn integral(&self, l: &BigRational, ln_a: Option<&Float>) -> (Float, f64) {
        let p = self.ctx.prec;
        let lf = Complex::real(Float::from_rational(l, p));
        let mut acc = Float::zero(p);
        let mut mags = Vec::with_capacity(self.nodes.len());
        let twist = ln_a.map(|la| {
            let base = self.ctx.exp(&(&Float::from_f64(self.c, p) * la));
            let (s, c) = self.ctx.sin_cos(&(&self.h * la));
            (Complex::real(base), Complex::new(c, s))
        });
        let mut pw = twist.as_ref().map(|t| t.0.clone());
        for node in &self.nodes {
            let mut t = &node.g * &node.sum;
            if let (Some(w), Some((_, step))) = (pw.as_mut(), twist.as_ref()) {
                t = &t * w;
                *w = &*w * step;
            }
            let t = t.div(&(&node.z - &lf));
            mags.push(t.log2_abs());
            acc = &acc + &t.re;
        }
        (acc, log2_sum(mags))
    }

    /// Λ(s) at A = 1 together with an absolute error bound.
    pub fn lambda(&self, s: &BigRational) -> Result<(Float, f64), LError> {
        let spec = self.spec;
        let p = self.ctx.prec;
        let w1 = BigRational::from_integer(BigInt::from(spec.w1));
        let r = &w1 - s;
        let (i1, m1) = self.integral(s, None);
        let (i2, m2) = self.integral(&r, None);
        let eps = Float::from_i64(spec.sign as i64, p);
        let mut val = &i1 + &(&eps * &i2);
        for (rho, res) in &spec.poles {
            let d = BigRational::from_integer(BigInt::from(*rho)) - s;
            val = &val - &Float::from_rational(&(BigRational::from_integer(BigInt::from(*res)) / d), p);
        }

        let sf = rat_f64(s);
        let rf = rat_f64(&r);
        let shifts = &spec.gamma_shifts;
        let mut parts: Vec<f64> = Vec::new();
        // rounding in the node sums
        parts.push(m1.max(m2) + 1.0 - p as f64 + 24.0);
        // nodes beyond the last one: geometric decay at rate e^(−dπh/4)
        let d = spec.degree() as f64;
        let hf = self.h.to_f64();
        let last = self.nodes.last().unwrap();
        let tail_nodes = last.g.log2_abs() + libm::log2(self.s_abs_c) + libm::log2(1.0 + 8.0 / (d * core::f64::consts::PI * hf));
        parts.push(tail_nodes - libm::log2(self.c - sf.max(rf)));
        // trapezoid discretization
        let gap = CONTOUR_GAP - 0.5;
        let q = 2.0 * core::f64::consts::PI * gap / hf;
        let m = self.strip_mass(sf).max(self.strip_mass(rf));
        parts.push(m + 2.0 - q / LN2);
        // coefficients beyond N
        let n = spec.len();
        parts.push(log2_sum([ln_tail_bound(shifts, spec.weight(), sf, 1.0, n), ln_tail_bound(shifts, spec.weight(), rf, 1.0, n)]) / LN2);
        let mut env = libm::exp2(log2_sum(parts));
        // balls
        if !self.kernels.is_empty() {
            let (a, b) = (self.line_index(s)?, self.line_index(&r)?);
            for (m, k) in &self.kernels {
                let wv = (&k[a] + &(&eps * &k[b])).to_f64().abs();
                env += spec.coeff(*m).radius() * wv * (1.0 + 1e-10);
            }
        }
        Ok((val, env))
    }

    /// log2 of (1/2π)∫|γ(x+iy)|Σ|a_n|n^(−x)/|x+iy−ℓ| dy on the lines x = c ± gap.
    fn strip_mass(&self, l: f64) -> f64 {
        let gap = CONTOUR_GAP - 0.5;
        let shifts = &self.spec.gamma_shifts;
        let mut best = f64::NEG_INFINITY;
        for x in [self.c - gap, self.c + gap] {
            let sa: f64 = (1..=self.spec.len())
                .map(|n| self.spec.coeff(n).magnitude() * libm::pow(n as f64, -x))
                .sum();
            let peak = ln_abs_gamma_factor(shifts, x, 0.0);
            let step = 0.05;
            let mut tot = Vec::new();
            let mut y: f64 = 0.0;
            loop {
                let v = ln_abs_gamma_factor(shifts, x, y) - 0.5 * libm::log((x - l) * (x - l) + y * y);
                tot.push(v / LN2);
                if v < peak - 80.0 {
                    break;
                }
                y += step;
            }
            let int = log2_sum(tot) + libm::log2(2.0 * step / (2.0 * core::f64::consts::PI));
            best = best.max(int + libm::log2(sa) + 1.0);
        }
        best
    }

    /// Λ(s) with the scaling parameter A; no error bound.
    pub fn lambda_scaled(&self, s: &BigRational, a: &BigRational) -> Float {
        let spec = self.spec;
        let p = self.ctx.prec;
        let la = self.ctx.ln(&Float::from_rational(a, p));
        let w1 = BigRational::from_integer(BigInt::from(spec.w1));
        let r = &w1 - s;
        let (i1, _) = self.integral(s, Some(&la));
        let (i2, _) = self.integral(&r, Some(&-&la));
        let sf = Float::from_rational(s, p);
        let rf = Float::from_rational(&r, p);
        let pre1 = self.ctx.exp(&-(&sf * &la));
        let pre2 = self.ctx.exp(&(&rf * &la));
        let eps = Float::from_i64(spec.sign as i64, p);
        let mut val = &(&pre1 * &i1) + &(&eps * &(&pre2 * &i2));
        for (rho, res) in &spec.poles {
            let d = BigRational::from_integer(BigInt::from(*rho)) - s;
            let e = Float::from_rational(&d, p);
            let pw = self.ctx.exp(&(&e * &la));
            val = &val - &(&pw * &Float::from_rational(&(BigRational::from_integer(BigInt::from(*res)) / d), p));
        }
        val
    }

    /// L(s) = Λ(s)/γ(s) with its envelope.
    pub fn value(&self, s: &BigRational) -> Result<EvalResult, LError> {
        let (lam, env) = self.lambda(s)?;
        let g = gamma_factor_real(&self.ctx, &self.spec.gamma_shifts, s);
        let value = lam.div(&g);
        let envelope = env / g.to_f64().abs();
        let envelope = if envelope.is_finite() { envelope } else { libm::exp2(libm::log2(env) - g.log2_abs()) };
        Ok(EvalResult { value, envelope, digits: self.digits, coeffs_used: self.spec.len() })
    }
}

fn check_point(spec: &LSpec, s: &BigRational) -> Result<(), LError> {
    for m in &spec.gamma_shifts {
        let x = s + BigRational::from_integer(BigInt::from(*m));
        if x.is_integer() && !x.is_positive() && (x.to_integer() % 2u32).is_zero() {
            return Err(LError::Divergent(s.clone()));
        }
    }
    for (rho, _) in &spec.poles {
        if *s == BigRational::from_integer(BigInt::from(*rho)) {
            return Err(LError::Divergent(s.clone()));
        }
    }
    Ok(())
}

/// γ(z) = Π_j π^(−(z+μ_j)/2) Γ((z+μ_j)/2), with one Stirling evaluation per
/// parity class of shifts and the rest by the recurrence Γ(w−m) = Γ(w)/Π(w−i).
pub fn gamma_factor(ctx: &MpContext, shifts: &[i64], z: &Complex) -> Complex {
    let p = ctx.prec;
    let d = shifts.len() as i64;
    let sum_mu: i64 = shifts.iter().sum();
    let half_ln_pi = ctx.ln_pi().mul_2exp(-1).with_prec(p);
    let mut log = z.scale(&Float::from_i64(d, p)).add_real(&Float::from_i64(sum_mu, p)).scale(&-&half_ln_pi);
    let mut den = Complex::one(p);
    for parity in [0i64, 1] {
        let class: Vec<i64> = shifts.iter().cloned().filter(|m| m.rem_euclid(2) == parity).collect();
        let Some(&b) = class.iter().max() else { continue };
        let w0 = z.add_real(&Float::from_i64(b, p)).mul_2exp(-1);
        let gp = ctx.gamma_parts(&w0);
        let cnt = Float::from_i64(class.len() as i64, p);
        log = &log + &gp.log_part.scale(&cnt);
        for _ in 0..class.len() {
            den = &den * &gp.denom;
        }
        let mut steps: Vec<i64> = class.iter().map(|m| (b - m) / 2).collect();
        steps.sort_unstable();
        let mut prod = Complex::one(p);
        let mut at = 0;
        for st in steps {
            while at < st {
                at += 1;
                prod = &prod * &w0.add_real(&Float::from_i64(-at, p));
            }
            if st > 0 {
                den = &den * &prod;
            }
        }
    }
    ctx.cexp(&log).div(&den)
}

fn gamma_factor_real(ctx: &MpContext, shifts: &[i64], s: &BigRational) -> Float {
    let p = ctx.prec;
    let z = Complex::real(Float::from_rational(s, p));
    gamma_factor(ctx, shifts, &z).re
}

/// L(s) with envelope; fails when fewer than three digits survive.
pub fn evaluate(spec: &LSpec, s: &BigRational, digits: u32) -> Result<EvalResult, LError> {
    evaluate_capped(spec, s, digits, DEFAULT_DIGITS_CAP)
}

pub fn evaluate_capped(spec: &LSpec, s: &BigRational, digits: u32, cap: u32) -> Result<EvalResult, LError> {
    if digits > cap {
        return Err(LError::DigitsCap { digits, cap });
    }
    let ev = Evaluator::new(spec, core::slice::from_ref(s), digits)?;
    let r = ev.value(s)?;
    if !r.has_three_digits() {
        return Err(LError::Insufficient { value: r.to_f64(), envelope: r.envelope });
    }
    Ok(r)
}

/// max over probes of |Λ(s) − εΛ(w₁−s)|/|Λ(s)|, the two sides computed
/// with different splittings (A = 1 and A = 6/5).
pub fn fe_residual(spec: &LSpec, probes: &[BigRational], digits: u32) -> Result<f64, LError> {
    fe_residual_with(spec, probes, digits, &BigRational::new(BigInt::from(6), BigInt::from(5)))
}

/// As `fe_residual` with the second splitting at scale A = a.
pub fn fe_residual_with(spec: &LSpec, probes: &[BigRational], digits: u32, a: &BigRational) -> Result<f64, LError> {
    let ev = Evaluator::new(spec, probes, digits)?;
    let w1 = BigRational::from_integer(BigInt::from(spec.w1));
    let eps = Float::from_i64(spec.sign as i64, ev.precision());
    let mut worst: f64 = 0.0;
    for s in probes {
        let (l1, _) = ev.lambda(s)?;
        let l2 = ev.lambda_scaled(&(&w1 - s), a);
        let d = (&l1 - &(&eps * &l2)).abs();
        let rel = libm::exp2(d.log2_abs() - l1.log2_abs());
        worst = worst.max(rel);
    }
    Ok(worst)
}

/// L(t1) / (π^(d(t1−t2)/2) L(t2)) with the relative envelopes added.
pub fn ratio(spec: &LSpec, t1: &BigRational, t2: &BigRational, digits: u32) -> Result<EvalResult, LError> {
    let ev = Evaluator::new(spec, &[t1.clone(), t2.clone()], digits)?;
    ratio_with(&ev, spec, t1, t2)
}

pub fn ratio_with(ev: &Evaluator<'_>, spec: &LSpec, t1: &BigRational, t2: &BigRational) -> Result<EvalResult, LError> {
    let a = ev.value(t1)?;
    let b = ev.value(t2)?;
    let rb = b.relative_envelope();
    if !(rb < 0.5) {
        return Err(LError::ZeroDenominator(t2.clone()));
    }
    let p = ev.precision();
    let e = (t1 - t2) * BigRational::new(BigInt::from(spec.degree() as i64), BigInt::from(2));
    let pi_pow = ev.ctx.exp(&(&Float::from_rational(&e, p) * &ev.ctx.ln_pi().with_prec(p)));
    let value = a.value.div(&(&pi_pow * &b.value));
    let v = value.to_f64().abs();
    let ra = a.relative_envelope();
    let rel = ra + rb / (1.0 - rb) + ra * rb / (1.0 - rb);
    Ok(EvalResult { value, envelope: v * rel, digits: a.digits, coeffs_used: a.coeffs_used })
}

/// ceil(((digits·ln10)/(2π))^(d/2)·√conductor·1.2).
pub fn coeffs_required(spec: &LSpec, digits: u32) -> usize {
    let d = spec.degree() as f64;
    let base = digits as f64 * core::f64::consts::LN_10 / (2.0 * core::f64::consts::PI);
    libm::ceil(libm::pow(base, d / 2.0) * libm::sqrt(spec.conductor as f64) * 1.2) as usize
}

/// Smallest N whose tail bound stays below 10^−digits relative to γ(s) at
/// every point, allowing the scale A up to 6/5 on either side.
pub fn auto_cutoff(shifts: &[i64], w: u32, points: &[f64], digits: u32) -> usize {
    let w1 = w as f64 + 1.0;
    let target = -(digits as f64 + 2.0) * core::f64::consts::LN_10;
    let ok = |n: usize| {
        points.iter().all(|&s| {
            let rel = |x: f64, a: f64| ln_tail_bound(shifts, w, x, a, n) - ln_abs_gamma_real(shifts, s);
            rel(s, 1.2) < target && rel(w1 - s, 1.2) < target
        })
    };
    let mut hi = 8;
    while !ok(hi) {
        hi *= 2;
        if hi > 1 << 22 {
            return hi;
        }
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_gamma_helpers() {
        // mpmath: loggamma(3.5+7j).real
        let v = ln_abs_gamma(3.5, 7.0);
        assert!((v - (-4.15388909134237)).abs() < 1e-10, "{}", v);
        assert!((ln_abs_gamma(0.5, 0.0) - 0.5723649429247001).abs() < 1e-12);
        let sum = log2_sum([3.0, 3.0]);
        assert!((sum - 4.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_factor_matches_direct_product() {
        let ctx = MpContext::new(160);
        let shifts = [0i64, 1, -19, -18, -15, -14, -11, -10];
        let z = Complex::new(ctx.ratio(61, 2), ctx.ratio(37, 10));
        let g = gamma_factor(&ctx, &shifts, &z);
        let mut want = Complex::one(160);
        for m in shifts {
            let w = z.add_real(&ctx.float(m)).mul_2exp(-1);
            let pw = ctx.cexp(&w.scale(&-&ctx.ln_pi()));
            want = &(&want * &pw) * &ctx.gamma(&w);
        }
        let err = (&g - &want).log2_abs() - want.log2_abs();
        assert!(err < -140.0, "{}", err);
    }
}
