//! Arithmetic in O_d / p^k where O_d = Z_p[mu_d] is the unramified extension
//! generated by a primitive d-th root of unity (gcd(d, p) = 1).
//!
//! The quotient is realised as (Z/p^k)[x] / (m(x)) where m is a monic
//! degree-f Hensel lift of an irreducible factor of the d-th cyclotomic
//! polynomial mod p, and f is the multiplicative order of p mod d.  The
//! class of x is a primitive d-th root of unity; valuations are computed
//! coefficientwise, which is correct because the extension is unramified.

use crate::arith::{self, SplitMix64};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PadicError {
    #[error("{0} is not prime (p >= 5 required)")]
    NotPrime(u64),
    #[error("gcd(d, p) != 1: extension O_{d}/{p} would be ramified")]
    RamifiedExtension { d: u64, p: u64 },
    #[error("elements belong to different rings")]
    MixedRings,
    #[error("element is not a unit")]
    NotAUnit,
}

/// p-adic valuation of an element of O_d/p^k: finite, or +infinity for the
/// zero class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Val {
    Finite(u32),
    Infinity,
}

impl Val {
    pub fn is_finite(self) -> bool {
        matches!(self, Val::Finite(_))
    }
    pub fn finite(self) -> Option<u32> {
        match self {
            Val::Finite(v) => Some(v),
            Val::Infinity => None,
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Finite(v) => write!(f, "{v}"),
            Val::Infinity => write!(f, "inf"),
        }
    }
}

/// Descriptor of the quotient ring O_d / p^k.  Immutable after construction;
/// elements hold an `Arc` to it.
pub struct PadicQuotient {
    pub p: u64,
    pub k: u32,
    pub d: u64,
    pub f: u32,
    pub pk: BigUint,
    p_big: BigUint,
    /// monic modulus m(x): coefficients of degree 0..f-1 (leading 1 implicit),
    /// reduced mod p^k
    pub modulus_poly: Vec<BigUint>,
    /// x^f = sum_i reduction[i] x^i  (i.e. -m_i mod p^k)
    reduction: Vec<BigUint>,
    /// set iff p^k fits in 63 bits: single-word residue fast path
    pub pk_word: Option<u64>,
}

impl fmt::Debug for PadicQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PadicQuotient(p={}, k={}, d={}, f={})",
            self.p, self.k, self.d, self.f
        )
    }
}

/// Element of O_d/p^k: f residues in [0, p^k), coefficients of 1, x, .., x^{f-1}.
#[derive(Clone)]
pub struct CyclotomicInteger {
    pub ring: Arc<PadicQuotient>,
    pub coeffs: Vec<BigUint>,
}

// ---------------------------------------------------------------------------
// F_p[x] helpers (word-sized p).  Polynomials are coefficient vectors,
// lowest degree first, no trailing zeros.

fn poly_trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = arith::addmod(out[i + j], arith::mulmod(ai, bj, p), p);
        }
    }
    poly_trim(&mut out);
    out
}

/// Remainder of a by monic-normalised b (b need not be monic).
fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = arith::invmod(b[db], p).expect("leading coeff invertible");
    while r.len() > db {
        let da = r.len() - 1;
        let c = arith::mulmod(r[da], lead_inv, p);
        if c != 0 {
            for j in 0..=db {
                let idx = da - db + j;
                r[idx] = arith::submod(r[idx], arith::mulmod(c, b[j], p), p);
            }
        }
        r.pop();
        poly_trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    r
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(&l) = a.last() {
        let inv = arith::invmod(l, p).unwrap();
        for c in &mut a {
            *c = arith::mulmod(*c, inv, p);
        }
    }
    a
}

/// a^e mod (m, p) by square and multiply; e is a BigUint exponent.
fn poly_powmod(a: &[u64], e: &BigUint, m: &[u64], p: u64) -> Vec<u64> {
    let mut base = poly_rem(a, m, p);
    let mut acc = vec![1u64];
    for i in 0..e.bits() {
        if e.bit(i) {
            acc = poly_rem(&poly_mul(&acc, &base, p), m, p);
        }
        if i + 1 < e.bits() {
            base = poly_rem(&poly_mul(&base, &base, p), m, p);
        }
    }
    acc
}

/// Inverse of a mod (m, p) via extended Euclid; m monic, gcd(a, m) = 1.
fn poly_invmod(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    // extended euclid over F_p[x]
    let (mut r0, mut r1) = (m.to_vec(), poly_rem(a, m, p));
    let (mut t0, mut t1): (Vec<u64>, Vec<u64>) = (vec![], vec![1]);
    while !r1.is_empty() {
        // q = r0 quo r1
        let q = poly_quo(&r0, &r1, p);
        let r2 = poly_sub(&r0, &poly_mul(&q, &r1, p), p);
        let t2 = poly_sub(&t0, &poly_mul(&q, &t1, p), p);
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = t2;
    }
    assert_eq!(r0.len(), 1, "poly_invmod: input not invertible");
    let inv = arith::invmod(r0[0], p).unwrap();
    t0.iter().map(|&c| arith::mulmod(c, inv, p)).collect()
}

fn poly_quo(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.len() < b.len() {
        return vec![];
    }
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = arith::invmod(b[db], p).unwrap();
    let mut q = vec![0u64; a.len() - db];
    while r.len() > db {
        let da = r.len() - 1;
        let c = arith::mulmod(r[da], lead_inv, p);
        q[da - db] = c;
        if c != 0 {
            for j in 0..=db {
                let idx = da - db + j;
                r[idx] = arith::submod(r[idx], arith::mulmod(c, b[j], p), p);
            }
        }
        r.pop();
        poly_trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    poly_trim(&mut q);
    q
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for i in 0..n {
        let ai = a.get(i).copied().unwrap_or(0);
        let bi = b.get(i).copied().unwrap_or(0);
        out[i] = arith::submod(ai, bi, p);
    }
    poly_trim(&mut out);
    out
}

/// Phi_d mod p, computed by exact division of x^d - 1 by Phi_e for e | d, e < d.
fn cyclotomic_mod_p(d: u64, p: u64) -> Vec<u64> {
    if d == 1 {
        return vec![p - 1, 1]; // x - 1
    }
    let mut num = vec![0u64; d as usize + 1];
    num[0] = p - 1;
    num[d as usize] = 1; // x^d - 1
    let mut poly = num;
    for e in arith::divisors(d) {
        if e == d {
            continue;
        }
        let phi_e = cyclotomic_mod_p(e, p);
        poly = poly_quo(&poly, &phi_e, p);
    }
    poly
}

/// Cantor-Zassenhaus equal-degree factorisation: all irreducible factors of
/// the squarefree `poly` have degree f.  Deterministically seeded.
fn equal_degree_factor(poly: &[u64], f: u32, p: u64, rng: &mut SplitMix64) -> Vec<Vec<u64>> {
    let deg = poly.len() - 1;
    if deg == f as usize {
        return vec![monicise(poly, p)];
    }
    // q = p^f; split with gcd(r^((q-1)/2) - 1, poly)
    let q = BigUint::from(p).pow(f);
    let half = (&q - BigUint::one()) >> 1;
    loop {
        let rdeg = 1 + (rng.below(deg as u64 - 1) as usize);
        let mut r: Vec<u64> = (0..=rdeg).map(|_| rng.below(p)).collect();
        poly_trim(&mut r);
        if r.len() < 2 {
            continue;
        }
        let mut h = poly_powmod(&r, &half, poly, p);
        // h - 1
        if h.is_empty() {
            h = vec![p - 1];
        } else {
            h[0] = arith::submod(h[0], 1, p);
            poly_trim(&mut h);
        }
        if h.is_empty() {
            continue;
        }
        let g = poly_gcd(&h, poly, p);
        if g.len() <= 1 || g.len() == poly.len() {
            continue;
        }
        let other = poly_quo(poly, &g, p);
        let mut out = equal_degree_factor(&g, f, p, rng);
        out.extend(equal_degree_factor(&other, f, p, rng));
        return out;
    }
}

fn monicise(a: &[u64], p: u64) -> Vec<u64> {
    let inv = arith::invmod(*a.last().unwrap(), p).unwrap();
    a.iter().map(|&c| arith::mulmod(c, inv, p)).collect()
}

// ---------------------------------------------------------------------------

impl PadicQuotient {
    /// Build O_d / p^k.  The modulus polynomial is the Hensel lift of the
    /// irreducible factor of Phi_d mod p whose coefficient tuple
    /// (c_0, .., c_{f-1}) is lexicographically least; this makes the
    /// construction deterministic across runs.
    pub fn build(p: u64, k: u32, d: u64) -> Result<Arc<PadicQuotient>, PadicError> {
        if !arith::is_prime(p) || p < 5 {
            return Err(PadicError::NotPrime(p));
        }
        if d == 0 || num_integer::gcd(d, p) != 1 {
            return Err(PadicError::RamifiedExtension { d, p });
        }
        assert!(k >= 1);
        let f = if d == 1 { 1 } else { arith::mult_order(p % d, d) as u32 };
        let phi = cyclotomic_mod_p(d, p);
        let mut rng = SplitMix64::new(p ^ (d << 24) ^ 0x5eed);
        let mut factors = equal_degree_factor(&phi, f, p, &mut rng);
        factors.sort();
        let g0 = factors.into_iter().next().unwrap();
        debug_assert_eq!(g0.len(), f as usize + 1);

        // Linear Hensel lift of g0 from mod p to mod p^k.
        let p_big = BigUint::from(p);
        let pk = p_big.pow(k);
        // cofactor H = Phi_d / g0 mod p, and its inverse mod (g0, p)
        let h = poly_quo(&phi, &g0, p);
        let hinv = poly_invmod(&h, &g0, p);
        // work with big-int coefficient copy of g, modulo increasing powers
        let mut g: Vec<BigUint> = g0.iter().map(|&c| BigUint::from(c)).collect();
        let mut pj = p_big.clone();
        for _ in 1..k {
            let pj1 = &pj * &p_big;
            // rho = (Phi_d mod g mod p^{j+1}) / p^j   (degree < f, coeffs mod p)
            let phi_z = cyclotomic_big(d, &pj1);
            let r = big_poly_rem(&phi_z, &g, &pj1);
            let rho: Vec<u64> = (0..f as usize)
                .map(|i| {
                    let c = r.get(i).cloned().unwrap_or_else(BigUint::zero);
                    let q = &c / &pj;
                    (q % &p_big).to_u64_digits().first().copied().unwrap_or(0)
                })
                .collect();
            // delta = rho * H^{-1} mod (g mod p, p)
            let gp: Vec<u64> = g
                .iter()
                .map(|c| (c % &p_big).to_u64_digits().first().copied().unwrap_or(0))
                .collect();
            let delta = poly_rem(&poly_mul(&rho, &hinv, p), &gp, p);
            for (i, &dc) in delta.iter().enumerate() {
                let add = &pj * BigUint::from(dc);
                g[i] = (&g[i] + add) % &pj1;
            }
            pj = pj1;
        }
        // final sanity: g divides Phi_d mod p^k
        let phi_z = cyclotomic_big(d, &pk);
        let r = big_poly_rem(&phi_z, &g, &pk);
        assert!(
            r.iter().all(|c| c.is_zero()),
            "Hensel lift failed to divide Phi_d mod p^k"
        );

        let modulus_poly: Vec<BigUint> = g[..f as usize].to_vec();
        let reduction: Vec<BigUint> = modulus_poly
            .iter()
            .map(|c| (&pk - (c % &pk)) % &pk)
            .collect();
        let pk_word = if pk.bits() <= 63 {
            Some(pk.to_u64_digits().first().copied().unwrap_or(0))
        } else {
            None
        };
        Ok(Arc::new(PadicQuotient {
            p,
            k,
            d,
            f,
            pk,
            p_big,
            modulus_poly,
            reduction,
            pk_word,
        }))
    }

    pub fn zero(self: &Arc<Self>) -> CyclotomicInteger {
        CyclotomicInteger {
            ring: self.clone(),
            coeffs: vec![BigUint::zero(); self.f as usize],
        }
    }

    pub fn one(self: &Arc<Self>) -> CyclotomicInteger {
        self.from_biguint(BigUint::one())
    }

    pub fn from_biguint(self: &Arc<Self>, n: BigUint) -> CyclotomicInteger {
        let mut coeffs = vec![BigUint::zero(); self.f as usize];
        coeffs[0] = n % &self.pk;
        CyclotomicInteger {
            ring: self.clone(),
            coeffs,
        }
    }

    pub fn from_u64(self: &Arc<Self>, n: u64) -> CyclotomicInteger {
        self.from_biguint(BigUint::from(n))
    }

    pub fn from_i64(self: &Arc<Self>, n: i64) -> CyclotomicInteger {
        if n >= 0 {
            self.from_u64(n as u64)
        } else {
            -&self.from_u64(n.unsigned_abs())
        }
    }

    /// The chosen primitive d-th root of unity (class of x); 1 when d = 1.
    pub fn zeta(self: &Arc<Self>) -> CyclotomicInteger {
        if self.f == 1 {
            // x = root of the linear modulus: x = -m_0
            let z = (&self.pk - &self.modulus_poly[0]) % &self.pk;
            return self.from_biguint(z);
        }
        let mut coeffs = vec![BigUint::zero(); self.f as usize];
        coeffs[1] = BigUint::one();
        CyclotomicInteger {
            ring: self.clone(),
            coeffs,
        }
    }

    /// zeta^e for e in Z (reduced mod d).
    pub fn zeta_pow(self: &Arc<Self>, e: i64) -> CyclotomicInteger {
        let e = e.rem_euclid(self.d as i64) as u64;
        self.zeta().pow(e)
    }

    fn same(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other)
            || (self.p == other.p && self.k == other.k && self.d == other.d
                && self.modulus_poly == other.modulus_poly)
    }
}

fn cyclotomic_big(d: u64, modulus: &BigUint) -> Vec<BigUint> {
    // Phi_d over Z has small coefficients for the d we use; compute it as
    // i64 via the same exact-division recursion, then lift.
    fn phi_z(d: u64) -> Vec<i64> {
        if d == 1 {
            return vec![-1, 1];
        }
        let mut poly = vec![0i64; d as usize + 1];
        poly[0] = -1;
        poly[d as usize] = 1;
        for e in arith::divisors(d) {
            if e == d {
                continue;
            }
            poly = div_exact(&poly, &phi_z(e));
        }
        poly
    }
    fn div_exact(a: &[i64], b: &[i64]) -> Vec<i64> {
        let mut r = a.to_vec();
        let db = b.len() - 1;
        assert_eq!(b[db].abs(), 1);
        let mut q = vec![0i64; r.len() - db];
        while r.len() > db {
            let da = r.len() - 1;
            let c = r[da] * b[db]; // b monic up to sign
            q[da - db] = c;
            for j in 0..=db {
                r[da - db + j] -= c * b[j];
            }
            while r.last() == Some(&0) {
                r.pop();
            }
            if r.is_empty() {
                break;
            }
        }
        assert!(r.is_empty(), "cyclotomic division not exact");
        q
    }
    phi_z(d)
        .into_iter()
        .map(|c| {
            if c >= 0 {
                BigUint::from(c as u64) % modulus
            } else {
                (modulus - BigUint::from((-c) as u64) % modulus) % modulus
            }
        })
        .collect()
}

fn big_poly_rem(a: &[BigUint], g: &[BigUint], modulus: &BigUint) -> Vec<BigUint> {
    // g is monic of degree f (leading coeff implicit in len(g) entries? no:
    // here g has f entries c_0..c_{f-1} plus implicit leading 1 when called
    // with the lifted modulus; but during lifting g still has an explicit
    // leading coefficient equal to 1.  Accept both: treat last entry == 1 of
    // a full vector as the leading coefficient.
    let (body, deg) = if g.last().map(|c| c.is_one()).unwrap_or(false) && g.len() >= 2 {
        (&g[..g.len() - 1], g.len() - 1)
    } else {
        (g, g.len())
    };
    let mut r: Vec<BigUint> = a.iter().map(|c| c % modulus).collect();
    while r.len() > deg {
        let da = r.len() - 1;
        let c = r[da].clone();
        if !c.is_zero() {
            for j in 0..deg {
                let t = (&c * &body[j]) % modulus;
                let cur = &r[da - deg + j] % modulus;
                r[da - deg + j] = ((cur + modulus) - t) % modulus;
            }
        }
        r.pop();
        while r.last().map(|c| c.is_zero()).unwrap_or(false) && r.len() > deg {
            r.pop();
        }
    }
    r
}

impl CyclotomicInteger {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// ord(x) = max j with x in p^j * (O_d/p^k); infinity for the zero class.
    /// Coefficientwise minimum of valuations (unramified extension).
    pub fn valuation(&self) -> Val {
        if self.is_zero() {
            return Val::Infinity;
        }
        let mut min = self.ring.k;
        for c in &self.coeffs {
            if c.is_zero() {
                continue;
            }
            let mut v = 0u32;
            let mut m = c.clone();
            while (&m % &self.ring.p_big).is_zero() {
                m /= &self.ring.p_big;
                v += 1;
            }
            min = min.min(v);
        }
        Val::Finite(min)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PadicError> {
        if !self.ring.same(&other.ring) {
            return Err(PadicError::MixedRings);
        }
        let pk = &self.ring.pk;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a + b) % pk)
            .collect();
        Ok(CyclotomicInteger {
            ring: self.ring.clone(),
            coeffs,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PadicError> {
        if !self.ring.same(&other.ring) {
            return Err(PadicError::MixedRings);
        }
        let pk = &self.ring.pk;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| ((a + pk) - (b % pk)) % pk)
            .collect();
        Ok(CyclotomicInteger {
            ring: self.ring.clone(),
            coeffs,
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PadicError> {
        if !self.ring.same(&other.ring) {
            return Err(PadicError::MixedRings);
        }
        let f = self.ring.f as usize;
        let pk = &self.ring.pk;
        let mut prod = vec![BigUint::zero(); 2 * f - 1];
        for i in 0..f {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..f {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                let t = (&self.coeffs[i] * &other.coeffs[j]) % pk;
                prod[i + j] = (&prod[i + j] + t) % pk;
            }
        }
        // reduce x^{f+i} via x^f = reduction
        for deg in (f..2 * f - 1).rev() {
            let c = std::mem::replace(&mut prod[deg], BigUint::zero());
            if c.is_zero() {
                continue;
            }
            for j in 0..f {
                let t = (&c * &self.ring.reduction[j]) % pk;
                prod[deg - f + j] = (&prod[deg - f + j] + t) % pk;
            }
        }
        prod.truncate(f);
        Ok(CyclotomicInteger {
            ring: self.ring.clone(),
            coeffs: prod,
        })
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.ring.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&base).unwrap();
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(&base).unwrap();
            }
        }
        acc
    }

    /// Multiply by an ordinary integer residue.
    pub fn scale(&self, s: &BigUint) -> Self {
        let pk = &self.ring.pk;
        let s = s % pk;
        CyclotomicInteger {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|c| (c * &s) % pk).collect(),
        }
    }

    /// Inverse of a unit, by Newton lifting from the residue field.
    pub fn invert(&self) -> Result<Self, PadicError> {
        if self.valuation() != Val::Finite(0) {
            return Err(PadicError::NotAUnit);
        }
        let ring = &self.ring;
        let p = ring.p;
        // inverse mod (modulus, p) via F_p[x] extended euclid
        let gp: Vec<u64> = ring
            .modulus_poly
            .iter()
            .map(|c| (c % &ring.p_big).to_u64_digits().first().copied().unwrap_or(0))
            .chain(std::iter::once(1))
            .collect();
        let ap: Vec<u64> = self
            .coeffs
            .iter()
            .map(|c| (c % &ring.p_big).to_u64_digits().first().copied().unwrap_or(0))
            .collect();
        let mut ap = ap;
        poly_trim(&mut ap);
        let inv0 = poly_invmod(&ap, &gp, p);
        let mut y = ring.zero();
        for (i, &c) in inv0.iter().enumerate() {
            y.coeffs[i] = BigUint::from(c);
        }
        // Newton: y <- y (2 - x y), doubling precision each round
        let two = ring.from_u64(2);
        let mut prec = 1u32;
        while prec < ring.k {
            let t = two.checked_sub(&self.checked_mul(&y)?)?;
            y = y.checked_mul(&t)?;
            prec *= 2;
        }
        debug_assert!(self.checked_mul(&y)?.checked_sub(&ring.one())?.is_zero());
        Ok(y)
    }
}

impl PartialEq for CyclotomicInteger {
    fn eq(&self, other: &Self) -> bool {
        self.ring.same(&other.ring) && self.coeffs == other.coeffs
    }
}
impl Eq for CyclotomicInteger {}

impl fmt::Debug for CyclotomicInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "] (mod {}^{})", self.ring.p, self.ring.k)
    }
}

macro_rules! binop {
    ($trait:ident, $fn:ident, $method:ident) => {
        impl std::ops::$trait for &CyclotomicInteger {
            type Output = CyclotomicInteger;
            fn $fn(self, rhs: &CyclotomicInteger) -> CyclotomicInteger {
                self.$method(rhs).expect("mixed rings")
            }
        }
    };
}
binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl std::ops::Neg for &CyclotomicInteger {
    type Output = CyclotomicInteger;
    fn neg(self) -> CyclotomicInteger {
        let pk = &self.ring.pk;
        CyclotomicInteger {
            ring: self.ring.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|c| (pk - (c % pk)) % pk)
                .collect(),
        }
    }
}
