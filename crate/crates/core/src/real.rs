//! Fixed-point real and complex arithmetic over `BigInt`.
//!
//! A value is an integer mantissa scaled by 2^bits, with `bits` fixed per
//! context.  This is enough for the analytic side of the pipeline (periods,
//! L-series, Gauss sums): magnitudes stay within a few orders of unity, so a
//! global scale with generous guard bits beats a full floating-point layer.
//! Rounding errors are one ulp per operation; callers track error budgets at
//! the level of whole computations (series tails, AGM convergence).

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Copy, Debug)]
pub struct RealCtx {
    pub bits: u32,
}

pub type Fx = BigInt;

impl RealCtx {
    pub fn new(bits: u32) -> Self {
        RealCtx { bits }
    }

    /// Context sized for `digits` decimal digits plus guard bits that grow
    /// with the expected number of accumulated operations.
    pub fn for_digits(digits: u32, op_count_log2: u32) -> Self {
        let bits = (digits as f64 * 3.322).ceil() as u32 + 32 + op_count_log2;
        RealCtx { bits: bits.max(64) }
    }

    pub fn from_i64(&self, n: i64) -> Fx {
        BigInt::from(n) << self.bits
    }

    pub fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Fx {
        assert!(!den.is_zero());
        let scaled = num << self.bits;
        round_div(&scaled, den)
    }

    pub fn from_rational(&self, q: &BigRational) -> Fx {
        self.from_ratio(q.numer(), q.denom())
    }

    pub fn from_f64(&self, x: f64) -> Fx {
        assert!(x.is_finite());
        let scaled = x * 2f64.powi(62);
        let m = BigInt::from(scaled as i128);
        if self.bits >= 62 {
            m << (self.bits - 62)
        } else {
            m >> (62 - self.bits)
        }
    }

    pub fn to_f64(&self, x: &Fx) -> f64 {
        // mantissa may exceed f64 range during intermediate work; split
        let bits = x.bits() as i64;
        if bits <= 900 {
            x.to_f64().unwrap_or(0.0) / 2f64.powi(self.bits as i32)
        } else {
            let shift = bits - 100;
            let top = (x >> shift).to_f64().unwrap_or(0.0);
            top * 2f64.powi((shift - self.bits as i64) as i32)
        }
    }

    pub fn mul(&self, a: &Fx, b: &Fx) -> Fx {
        let prod = a * b;
        shift_round(&prod, self.bits)
    }

    pub fn div(&self, a: &Fx, b: &Fx) -> Fx {
        assert!(!b.is_zero(), "division by zero");
        let scaled = a << self.bits;
        round_div(&scaled, b)
    }

    pub fn inv(&self, a: &Fx) -> Fx {
        self.div(&self.one(), a)
    }

    pub fn one(&self) -> Fx {
        BigInt::one() << self.bits
    }

    pub fn half(&self, a: &Fx) -> Fx {
        shift_round(a, 1)
    }

    /// Nonnegative square root.
    pub fn sqrt(&self, a: &Fx) -> Fx {
        assert!(!a.is_negative(), "sqrt of negative value");
        let shifted: BigUint = (a << self.bits).to_biguint().unwrap();
        BigInt::from(num_integer::Roots::sqrt(&shifted))
    }

    /// pi by Machin's formula; integer series, error below one ulp + tail.
    pub fn pi(&self) -> Fx {
        let a = self.atan_inv(5);
        let b = self.atan_inv(239);
        (a << 4) - (b << 2)
    }

    /// arctan(1/k) for integer k >= 2, by the alternating Taylor series.
    fn atan_inv(&self, k: u64) -> Fx {
        let guard = 16u32;
        let one = BigInt::one() << (self.bits + guard);
        let k2 = BigInt::from(k * k);
        let mut term = &one / BigInt::from(k);
        let mut sum = term.clone();
        let mut j = 1u64;
        while !term.is_zero() {
            term = &term / &k2;
            if term.is_zero() {
                break;
            }
            let t = &term / BigInt::from(2 * j + 1);
            if j % 2 == 1 {
                sum -= &t;
            } else {
                sum += &t;
            }
            j += 1;
        }
        shift_round(&sum, guard)
    }

    /// exp(x) by scaling-and-squaring plus Taylor.
    pub fn exp(&self, x: &Fx) -> Fx {
        // halve until |x| < 1/16
        let mut halvings = 0u32;
        let mut xs = x.clone();
        let threshold = BigInt::one() << (self.bits - 4);
        while xs.abs() > threshold {
            xs = shift_round(&xs, 1);
            halvings += 1;
            assert!(halvings < 64, "exp argument too large");
        }
        let guard = 2 * halvings + 16;
        let ctx = RealCtx::new(self.bits + guard);
        let xs = xs << guard;
        let mut term = ctx.one();
        let mut sum = ctx.one();
        let mut j = 1u64;
        loop {
            term = ctx.mul(&term, &xs);
            term = round_div(&term, &BigInt::from(j));
            if term.is_zero() {
                break;
            }
            sum += &term;
            j += 1;
        }
        for _ in 0..halvings {
            sum = ctx.mul(&sum, &sum);
        }
        shift_round(&sum, guard)
    }

    /// (cos t, sin t) with argument reduction modulo 2 pi.
    pub fn sincos(&self, t: &Fx) -> (Fx, Fx) {
        let guard = 32u32;
        let ctx = RealCtx::new(self.bits + guard);
        let two_pi = ctx.pi() << 1;
        let mut t = t.clone() << guard;
        // reduce |t| <= pi: subtract the nearest integer multiple of 2 pi
        let q = round_div(&t, &two_pi);
        t -= &q * &two_pi;
        // halve until |t| < 1/16, rebuild by double-angle
        let mut halvings = 0u32;
        let threshold = BigInt::one() << (ctx.bits - 4);
        while t.abs() > threshold {
            t = shift_round(&t, 1);
            halvings += 1;
            assert!(halvings < 64);
        }
        let (mut c, mut s) = ctx.sincos_small(&t);
        for _ in 0..halvings {
            // cos 2a = 2cos^2 a - 1; sin 2a = 2 sin a cos a
            let c2 = ctx.mul(&c, &c);
            let new_c = (&c2 << 1) - ctx.one();
            let new_s = ctx.mul(&s, &c) << 1;
            c = new_c;
            s = new_s;
        }
        (shift_round(&c, guard), shift_round(&s, guard))
    }

    fn sincos_small(&self, t: &Fx) -> (Fx, Fx) {
        // Taylor with |t| < 1/16
        let mut cos = self.one();
        let mut sin = t.clone();
        let t2 = self.mul(t, t);
        let mut term_c = self.one();
        let mut term_s = t.clone();
        let mut j = 1u64;
        loop {
            term_c = round_div(&self.mul(&term_c, &t2), &BigInt::from((2 * j - 1) * (2 * j)));
            term_s = round_div(&self.mul(&term_s, &t2), &BigInt::from((2 * j) * (2 * j + 1)));
            if term_c.is_zero() && term_s.is_zero() {
                break;
            }
            if j % 2 == 1 {
                cos -= &term_c;
                sin -= &term_s;
            } else {
                cos += &term_c;
                sin += &term_s;
            }
            j += 1;
        }
        (cos, sin)
    }

    /// Arithmetic-geometric mean of positive reals.
    pub fn agm(&self, a0: &Fx, b0: &Fx) -> Fx {
        let mut a = a0.clone();
        let mut b = b0.clone();
        assert!(a.is_positive() && b.is_positive());
        for _ in 0..(2 * self.bits.max(64)) {
            let am = shift_round(&(&a + &b), 1);
            let gm = self.sqrt(&self.mul(&a, &b));
            if (&am - &gm).abs() <= BigInt::from(4) {
                return am;
            }
            a = am;
            b = gm;
        }
        a
    }

    /// Continued-fraction rational reconstruction with bounded denominator.
    /// Returns q with |x - q| < 2^-(bits/2) if such q with den <= max_den exists.
    pub fn reconstruct_rational(&self, x: &Fx, max_den: u64) -> Option<BigRational> {
        let target = BigRational::new(x.clone(), BigInt::one() << self.bits);
        let tol = BigRational::new(BigInt::one(), BigInt::one() << (self.bits / 2));
        let mut a = target.clone();
        let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
        let (mut p1, mut q1) = (a.floor().to_integer(), BigInt::one());
        a -= BigRational::from(p1.clone());
        for _ in 0..200 {
            let cand = BigRational::new(p1.clone(), q1.clone());
            if (&cand - &target).abs() < tol && q1.magnitude() <= &BigUint::from(max_den) {
                return Some(cand);
            }
            if a.is_zero() {
                break;
            }
            a = a.recip();
            let fl = a.floor().to_integer();
            a -= BigRational::from(fl.clone());
            let p2 = &fl * &p1 + &p0;
            let q2 = &fl * &q1 + &q0;
            (p0, q0, p1, q1) = (p1, q1, p2, q2);
            if q1.magnitude() > &BigUint::from(max_den) {
                break;
            }
        }
        None
    }
}

fn shift_round(x: &Fx, bits: u32) -> Fx {
    if bits == 0 {
        return x.clone();
    }
    let half = BigInt::one() << (bits - 1);
    if x.is_negative() {
        -((-x + half) >> bits)
    } else {
        (x + half) >> bits
    }
}

fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    let r2: BigInt = &r * 2;
    if r2.abs() >= b.abs() {
        if (a.sign() == Sign::Minus) ^ (b.sign() == Sign::Minus) {
            q - 1
        } else {
            q + 1
        }
    } else {
        q
    }
}

/// Complex value over a `RealCtx`.
#[derive(Clone, Debug)]
pub struct Cx {
    pub re: Fx,
    pub im: Fx,
}

impl Cx {
    pub fn zero() -> Self {
        Cx {
            re: BigInt::zero(),
            im: BigInt::zero(),
        }
    }
    pub fn real(re: Fx) -> Self {
        Cx {
            re,
            im: BigInt::zero(),
        }
    }
    pub fn add(&self, o: &Cx) -> Cx {
        Cx {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
    pub fn sub(&self, o: &Cx) -> Cx {
        Cx {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
    pub fn mul(&self, o: &Cx, ctx: &RealCtx) -> Cx {
        Cx {
            re: ctx.mul(&self.re, &o.re) - ctx.mul(&self.im, &o.im),
            im: ctx.mul(&self.re, &o.im) + ctx.mul(&self.im, &o.re),
        }
    }
    pub fn conj(&self) -> Cx {
        Cx {
            re: self.re.clone(),
            im: -&self.im,
        }
    }
    pub fn norm_sq(&self, ctx: &RealCtx) -> Fx {
        ctx.mul(&self.re, &self.re) + ctx.mul(&self.im, &self.im)
    }
    pub fn abs(&self, ctx: &RealCtx) -> Fx {
        ctx.sqrt(&self.norm_sq(ctx))
    }
    pub fn div(&self, o: &Cx, ctx: &RealCtx) -> Cx {
        let n = o.norm_sq(ctx);
        let t = self.mul(&o.conj(), ctx);
        Cx {
            re: ctx.div(&t.re, &n),
            im: ctx.div(&t.im, &n),
        }
    }
    pub fn scale_int(&self, s: &BigInt) -> Cx {
        Cx {
            re: &self.re * s,
            im: &self.im * s,
        }
    }
}
