//! Normalized modular-symbol evaluation a/m -> [a/m]^± in Q.
//!
//! The evaluator pairs the dual eigenvectors from `cut_eigenspace` with the
//! continued-fraction (Manin trick) expansion of {oo, a/m}: each convergent
//! contributes one P^1 lookup, so evaluation costs O(log m).  The rational
//! scale on each sign is pinned analytically: for a quadratic character
//! chi_D with L(E, chi_D, 1) != 0 the Birch identity
//!     sum_a chi_D(a) [a/|D|]^{chi_D(-1)} = tau(chi_D)^{-1} L(E,chi_D,1) / Omega^{chi_D(-1)}
//! determines scale_± by rational reconstruction (D = 1 handles the + sign
//! whenever L(E,1) != 0).

use super::{ManinSymbolSpace, ModSymError};
use crate::analytic::{periods, twisted_l_value, LValue, PeriodData};
use crate::arith;
use crate::chars::{DirichletCharacter, FieldSpec};
use crate::curve::{ApTable, CurveModel};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::sync::Arc;

/// Unscaled value of every P^1 symbol under a dual vector, as exact
/// rationals, together with the rational normalisation for each sign.
pub struct SymbolEvaluator {
    pub n: u64,
    pub p1: Arc<super::P1>,
    w_plus: Vec<BigRational>,
    w_minus: Vec<BigRational>,
    pub scale_plus: BigRational,
    pub scale_minus: BigRational,
}

impl SymbolEvaluator {
    /// Build from a space and curve: cut eigenvectors, tabulate w, normalise.
    pub fn build(
        space: &ManinSymbolSpace,
        e: &CurveModel,
        aps: &ApTable,
        eps: i8,
        digits: u32,
        max_den: u64,
    ) -> Result<SymbolEvaluator, ModSymError> {
        let (dual_plus, dual_minus) = space.cut_eigenspace(aps)?;
        let w = |dual: &Vec<BigInt>| -> Vec<BigRational> {
            (0..space.p1.len())
                .map(|i| {
                    let mut acc = BigRational::zero();
                    for (&b, v) in &space.proj[i] {
                        acc += BigRational::from(dual[b as usize].clone()) * v;
                    }
                    acc
                })
                .collect()
        };
        let w_plus = w(&dual_plus);
        let w_minus = w(&dual_minus);
        let p1 = Arc::new(super::P1::build(space.n));
        let mut ev = SymbolEvaluator {
            n: space.n,
            p1,
            w_plus,
            w_minus,
            scale_plus: BigRational::one(),
            scale_minus: BigRational::one(),
        };
        let pd = periods(e, digits).map_err(|_| ModSymError::NormalizationMismatch(0))?;
        ev.scale_plus = normalise_sign(&ev, e, aps, eps, &pd, 1, max_den)?;
        ev.scale_minus = normalise_sign(&ev, e, aps, eps, &pd, -1, max_den)?;
        Ok(ev)
    }

    /// Raw (unscaled) pairing of the sign eigenvector with the path
    /// {oo, a/m}: sum over continued-fraction convergents.
    pub fn raw_path(&self, a: i64, m: i64, sign: i8) -> BigRational {
        debug_assert!(m >= 1);
        let w = if sign > 0 { &self.w_plus } else { &self.w_minus };
        let mut acc = BigRational::zero();
        for (c, d) in cf_edges(a, m) {
            let idx = self
                .p1
                .lookup(c, d)
                .expect("continued-fraction edge not in P^1");
            acc += &w[idx as usize];
        }
        acc
    }

    /// [a/m]^sign as an exact rational.
    pub fn evaluate(&self, a: i64, m: i64, sign: i8) -> BigRational {
        let scale = if sign > 0 {
            &self.scale_plus
        } else {
            &self.scale_minus
        };
        self.raw_path(a, m, sign) * scale
    }

    /// Normalized per-symbol value table reduced mod p^k (single word)
    /// for the fast summation paths; errors if any denominator meets p
    /// ((E2) policing).
    pub fn table_mod(&self, p: u64, pk: u64, sign: i8) -> Result<Vec<u64>, ModSymError> {
        let w = if sign > 0 { &self.w_plus } else { &self.w_minus };
        let scale = if sign > 0 {
            &self.scale_plus
        } else {
            &self.scale_minus
        };
        w.iter()
            .map(|v| rational_mod(&(v * scale), p, pk))
            .collect()
    }

    /// [a/m]^sign mod p^k via a precomputed `table_mod` output.
    #[inline]
    pub fn evaluate_mod(&self, table: &[u64], pk: u64, a: i64, m: i64) -> u64 {
        let mut acc = 0u64;
        for (c, d) in cf_edges(a, m) {
            let idx = self.p1.lookup(c, d).unwrap();
            acc = arith::addmod(acc, table[idx as usize], pk);
        }
        acc
    }

    /// [a/m]^sign reduced into Z/p^k with a multiword modulus.
    pub fn evaluate_big_mod(
        &self,
        a: i64,
        m: i64,
        sign: i8,
        p: u64,
        pk: &BigUint,
    ) -> Result<BigUint, ModSymError> {
        rational_big_mod(&self.evaluate(a, m, sign), p, pk)
    }
}

fn rational_mod(x: &BigRational, p: u64, pk: u64) -> Result<u64, ModSymError> {
    let den_red = (x.denom().magnitude() % BigUint::from(pk))
        .to_u64()
        .unwrap()
        % pk;
    if den_red % p == 0 {
        return Err(ModSymError::DenominatorNotPrimeToP(p));
    }
    let num = x.numer();
    let mut num_red = (num.magnitude() % BigUint::from(pk)).to_u64().unwrap() % pk;
    if num.is_negative() && num_red != 0 {
        num_red = pk - num_red;
    }
    Ok(arith::mulmod(
        num_red,
        arith::invmod(den_red, pk).unwrap(),
        pk,
    ))
}

fn rational_big_mod(x: &BigRational, p: u64, pk: &BigUint) -> Result<BigUint, ModSymError> {
    let den = x.denom().magnitude() % pk;
    if (&den % BigUint::from(p)).is_zero() {
        return Err(ModSymError::DenominatorNotPrimeToP(p));
    }
    let num = x.numer();
    let mut num_red = num.magnitude() % pk;
    if num.is_negative() && !num_red.is_zero() {
        num_red = pk - num_red;
    }
    let inv = biguint_invmod(&den, pk);
    Ok((num_red * inv) % pk)
}

pub fn biguint_invmod(a: &BigUint, m: &BigUint) -> BigUint {
    let e = num_integer::Integer::extended_gcd(&BigInt::from(a.clone()), &BigInt::from(m.clone()));
    debug_assert!(e.gcd.is_one());
    num_integer::Integer::mod_floor(&e.x, &BigInt::from(m.clone()))
        .magnitude()
        .clone()
}

/// Manin-trick edges for the path {oo, a/m}: successive convergents
/// p_{j-1}/q_{j-1} -> p_j/q_j give Manin symbols (q_j : (-1)^{j+1} q_{j-1}).
pub fn cf_edges(a: i64, m: i64) -> Vec<(i64, i64)> {
    assert!(m >= 1);
    let g = num_integer::gcd(a.unsigned_abs(), m.unsigned_abs()) as i64;
    let (mut num, mut den) = (a / g.max(1), m / g.max(1));
    let mut quotients = Vec::new();
    while den != 0 {
        let q = num.div_euclid(den);
        quotients.push(q);
        let r = num - q * den;
        num = den;
        den = r;
    }
    let mut out = Vec::with_capacity(quotients.len());
    let (mut p_prev, mut q_prev) = (1i64, 0i64); // p_{-1}/q_{-1}
    let (mut p_cur, mut q_cur) = (quotients[0], 1i64);
    out.push((q_cur, -q_prev)); // j = 0: (q_0 : (-1)^{0+1} q_{-1})
    for (j, &c) in quotients.iter().enumerate().skip(1) {
        let p_next = c * p_cur + p_prev;
        let q_next = c * q_cur + q_prev;
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
        let sgn = if (j + 1) % 2 == 0 { 1 } else { -1 };
        out.push((q_cur, sgn * q_prev));
    }
    out
}

/// Kronecker symbol (d / n) for fundamental discriminant d.
pub fn kronecker(d: i64, n: u64) -> i32 {
    let mut n = n as i64;
    if n == 0 {
        return i32::from(d.abs() == 1);
    }
    let mut result = 1i32;
    while n % 2 == 0 {
        n /= 2;
        result *= match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
        if result == 0 {
            return 0;
        }
    }
    if n == 1 {
        return result;
    }
    result * arith::jacobi(d.rem_euclid(n), n as u64)
}

fn normalise_sign(
    ev: &SymbolEvaluator,
    e: &CurveModel,
    aps: &ApTable,
    eps: i8,
    pd: &PeriodData,
    sign: i8,
    max_den: u64,
) -> Result<BigRational, ModSymError> {
    let ctx = pd.ctx;
    let discs: &[i64] = if sign > 0 {
        &[1, 5, 8, 12, 13, 17, 21, 24, 28, 29, 33, 37, 40]
    } else {
        &[-3, -4, -7, -8, -11, -15, -19, -20, -23, -24, -31, -35]
    };
    for &d in discs {
        let cond = d.unsigned_abs().max(1);
        if num_integer::gcd(cond, e.conductor) != 1 {
            continue;
        }
        // exact side: sum_a chi_D(a) * raw(a/|D|)
        let mut exact = BigRational::zero();
        for a in 0..cond {
            match kronecker(d, a) {
                1 => exact += ev.raw_path(a as i64, cond as i64, sign),
                -1 => exact -= ev.raw_path(a as i64, cond as i64, sign),
                _ => {}
            }
        }
        if exact.is_zero() {
            continue;
        }
        // analytic side: tau(chi_D)^{-1} L(E, chi_D, 1) / Omega^{sign}
        let chi = if d == 1 {
            let spec = FieldSpec::rational();
            crate::chars::enumerate_characters(&spec).pop().unwrap()
        } else {
            kronecker_character(d).ok_or(ModSymError::NormalizationMismatch(sign))?
        };
        let lv: LValue = twisted_l_value(e, &chi, aps, eps, &ctx)
            .map_err(|_| ModSymError::NormalizationMismatch(sign))?;
        let l_re = ctx.to_f64(&lv.value.re);
        debug_assert!(ctx.to_f64(&lv.value.im).abs() < 1e-8);
        if l_re.abs() < 1e-6 + lv.err * 4.0 {
            continue; // vanishing twist: try the next discriminant
        }
        // classical Birch: L = (tau(chi_D)/|D|) sum_a chi_D(a) lambda(a/|D|),
        // so the exact sum equals |D| L / (tau(chi_D) Omega^{sign}); with
        // tau = sqrt(D) (even) or i sqrt|D| (odd) and Omega^- = i Omega_im
        // this is sqrt(D) L / Omega_re, resp. -sqrt|D| L / Omega_im.
        let sqrt_d = ctx.sqrt(&ctx.from_i64(cond as i64));
        let analytic = if sign > 0 {
            ctx.div(&ctx.mul(&lv.value.re, &sqrt_d), &pd.omega_re)
        } else {
            -ctx.div(&ctx.mul(&lv.value.re, &sqrt_d), &pd.omega_im)
        };
        let ratio = ctx.div(&analytic, &ctx.from_rational(&exact));
        if let Some(q) = ctx.reconstruct_rational(&ratio, max_den) {
            if !q.is_zero() {
                return Ok(q);
            }
        }
        return Err(ModSymError::NormalizationMismatch(sign));
    }
    Err(ModSymError::NormalizationMismatch(sign))
}

/// The quadratic character attached to Q(sqrt(d)) as a Dirichlet character
/// mod |d| (fundamental discriminants only).
fn kronecker_character(d: i64) -> Option<DirichletCharacter> {
    let cond = d.unsigned_abs();
    let spec = FieldSpec::cyclotomic(cond).ok()?;
    crate::chars::enumerate_characters(&spec)
        .into_iter()
        .find(|chi| {
            chi.order == 2
                && chi.conductor == cond
                && (1..cond)
                    .filter(|&a| num_integer::gcd(a, cond) == 1)
                    .all(|a| {
                        let k = kronecker(d, a);
                        let e = chi.raw_exponent(a).unwrap();
                        (k == 1 && e == 0) || (k == -1 && e == 1)
                    })
        })
}

/// On-disk cache of the expensive build: symbol value tables + scales.
#[derive(Serialize, Deserialize)]
pub struct EvaluatorCache {
    pub version: u32,
    pub n: u64,
    pub a_invariants: [i64; 5],
    pub p1_len: usize,
    pub w_plus: Vec<String>,
    pub w_minus: Vec<String>,
    pub scale_plus: String,
    pub scale_minus: String,
    pub checksum: String,
}

pub const CACHE_VERSION: u32 = 1;

fn rat_to_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn rat_from_string(s: &str) -> Option<BigRational> {
    let (n, d) = s.split_once('/')?;
    Some(BigRational::new(n.parse().ok()?, d.parse().ok()?))
}

impl EvaluatorCache {
    pub fn from_evaluator(ev: &SymbolEvaluator, e: &CurveModel) -> EvaluatorCache {
        let mut c = EvaluatorCache {
            version: CACHE_VERSION,
            n: ev.n,
            a_invariants: e.a,
            p1_len: ev.p1.len(),
            w_plus: ev.w_plus.iter().map(rat_to_string).collect(),
            w_minus: ev.w_minus.iter().map(rat_to_string).collect(),
            scale_plus: rat_to_string(&ev.scale_plus),
            scale_minus: rat_to_string(&ev.scale_minus),
            checksum: String::new(),
        };
        c.checksum = c.digest();
        c
    }

    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!(
            "{}|{}|{:?}|{}|{:?}|{:?}|{}|{}",
            self.version,
            self.n,
            self.a_invariants,
            self.p1_len,
            self.w_plus,
            self.w_minus,
            self.scale_plus,
            self.scale_minus
        ));
        hex_lower(&h.finalize())
    }

    pub fn into_evaluator(self, e: &CurveModel) -> Option<SymbolEvaluator> {
        if self.version != CACHE_VERSION
            || self.a_invariants != e.a
            || self.n != e.conductor
            || self.checksum != self.digest()
        {
            return None;
        }
        let p1 = Arc::new(super::P1::build(self.n));
        if p1.len() != self.p1_len {
            return None;
        }
        Some(SymbolEvaluator {
            n: self.n,
            p1,
            w_plus: self
                .w_plus
                .iter()
                .map(|s| rat_from_string(s))
                .collect::<Option<_>>()?,
            w_minus: self
                .w_minus
                .iter()
                .map(|s| rat_from_string(s))
                .collect::<Option<_>>()?,
            scale_plus: rat_from_string(&self.scale_plus)?,
            scale_minus: rat_from_string(&self.scale_minus)?,
        })
    }
}

fn hex_lower(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modsym::ManinSymbolSpace;

    fn build_11a1() -> (CurveModel, SymbolEvaluator) {
        let e = CurveModel::new([0, -1, 1, -10, -20], Some("11a1".into())).unwrap();
        let aps = ApTable::build(&e, 5000);
        let space = ManinSymbolSpace::build(11);
        let ev = SymbolEvaluator::build(&space, &e, &aps, 1, 30, 1_000_000).unwrap();
        (e, ev)
    }

    #[test]
    fn cf_edges_basics() {
        // 0/1 gives the single edge (1 : 0)
        assert_eq!(cf_edges(0, 1), vec![(1, 0)]);
        for (a, m) in [(3i64, 7i64), (22, 61), (-5, 13), (104, 231)] {
            assert!(!cf_edges(a, m).is_empty());
        }
    }

    #[test]
    fn value_at_zero_is_one_fifth() {
        let (_e, ev) = build_11a1();
        assert_eq!(
            ev.evaluate(0, 1, 1),
            BigRational::new(BigInt::from(1), BigInt::from(5)),
            "[0/1]^+ = 1/5 for 11a1"
        );
        // the minus symbol at 0 vanishes by oddness
        assert!(ev.evaluate(0, 1, -1).is_zero());
    }

    #[test]
    fn periodicity_and_parity() {
        let (_e, ev) = build_11a1();
        for (a, m) in [(2i64, 7i64), (3, 5), (1, 9), (5, 13)] {
            assert_eq!(ev.evaluate(a, m, 1), ev.evaluate(a + m, m, 1));
            assert_eq!(ev.evaluate(a, m, -1), ev.evaluate(a + m, m, -1));
            assert_eq!(ev.evaluate(a, m, 1), ev.evaluate(-a, m, 1));
            assert_eq!(ev.evaluate(a, m, -1), -ev.evaluate(-a, m, -1));
        }
    }

    #[test]
    fn hecke_identity_on_values() {
        // sum_{b mod q} [(a + b m)/(q m)] + [q a / m] = a_q [a/m]
        let (e, ev) = build_11a1();
        let mut rng = arith::SplitMix64::new(11);
        for &q in &[2u64, 3, 5, 7, 13] {
            let aq = e.trace_of_frobenius(q);
            for _ in 0..8 {
                let m = 1 + rng.below(40) as i64;
                let a = rng.below(200) as i64 - 100;
                for sign in [1i8, -1] {
                    let mut lhs = ev.evaluate(q as i64 * a, m, sign);
                    for b in 0..q as i64 {
                        lhs += ev.evaluate(a + b * m, q as i64 * m, sign);
                    }
                    let rhs = ev.evaluate(a, m, sign) * BigRational::from(BigInt::from(aq));
                    assert_eq!(lhs, rhs, "Hecke identity q={q} a={a} m={m} sign={sign}");
                }
            }
        }
    }

    #[test]
    fn mod_table_matches_exact() {
        let (_e, ev) = build_11a1();
        let pk = 101u64.pow(2);
        let table = ev.table_mod(101, pk, 1).unwrap();
        for (a, m) in [(3i64, 61i64), (17, 61), (5, 7)] {
            let exact = ev.evaluate(a, m, 1);
            let red = rational_mod(&exact, 101, pk).unwrap();
            assert_eq!(ev.evaluate_mod(&table, pk, a, m), red);
        }
    }

    #[test]
    fn scale_stable_across_precision() {
        let e = CurveModel::new([0, 1, 1, 9, 1], Some("35a1".into())).unwrap();
        let aps = ApTable::build(&e, 5000);
        let space = ManinSymbolSpace::build(35);
        let ev1 = SymbolEvaluator::build(&space, &e, &aps, 1, 25, 1_000_000).unwrap();
        let ev2 = SymbolEvaluator::build(&space, &e, &aps, 1, 45, 1_000_000).unwrap();
        assert_eq!(ev1.scale_plus, ev2.scale_plus);
        assert_eq!(ev1.scale_minus, ev2.scale_minus);
    }

    #[test]
    fn cache_roundtrip() {
        let (e, ev) = build_11a1();
        let cache = EvaluatorCache::from_evaluator(&ev, &e);
        let json = serde_json::to_string(&cache).unwrap();
        let back: EvaluatorCache = serde_json::from_str(&json).unwrap();
        let ev2 = back.into_evaluator(&e).unwrap();
        assert_eq!(ev.evaluate(3, 7, 1), ev2.evaluate(3, 7, 1));
        assert_eq!(ev.evaluate(3, 7, -1), ev2.evaluate(3, 7, -1));
        let mut bad: EvaluatorCache = serde_json::from_str(&json).unwrap();
        bad.scale_plus = "7/1".into();
        assert!(bad.into_evaluator(&e).is_none());
    }
}
