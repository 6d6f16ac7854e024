//! Exact modular symbols for Gamma_0(N): the Manin-symbol presentation on
//! P^1(Z/N) with the 2- and 3-term relations, Hecke operators through the
//! Merel-Heilbronn family, the star involution, the boundary map to cusps,
//! and dual eigenvector extraction for a given newform.
//!
//! Conventions: a Manin symbol (c:d) stands for the path {g0, g(inf)} where
//! g in SL_2(Z) has bottom row (c, d); relations x + xS = 0 and
//! x + xR + xR^2 = 0 with S = [0,-1;1,0], R = [0,-1;1,-1].

pub mod evaluator;
pub mod linalg;

use crate::arith;
use crate::curve::ApTable;
use linalg::{eliminate, kernel, primitive_integer_vector, SparseRow};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModSymError {
    #[error("level {0} too large for the dense index table (cap {1})")]
    LevelTooLarge(u64, u64),
    #[error("eigenspace not one-dimensional for sign {sign}: dim {dim} after q = {qs:?}")]
    EigenspaceNotOneDimensional { sign: i8, dim: usize, qs: Vec<u64> },
    #[error("normalisation mismatch: no small rational matches the analytic ratio for sign {0}")]
    NormalizationMismatch(i8),
    #[error("symbol value has denominator divisible by p = {0}")]
    DenominatorNotPrimeToP(u64),
}

/// P^1(Z/N): canonical representatives and index lookup.
pub struct P1 {
    pub n: u64,
    pub reps: Vec<(u64, u64)>,
    index: HashMap<(u64, u64), u32>,
    /// dense (c, d) -> index+1 table when N is small; 0 marks non-P^1 pairs
    dense: Option<Vec<u32>>,
}

const DENSE_CAP: u64 = 4096;

/// Canonical representative of (u : v) in P^1(Z/N); assumes gcd(u, v, N) = 1.
pub fn p1_normalize(n: u64, u: i64, v: i64) -> (u64, u64) {
    if n == 1 {
        return (0, 0);
    }
    let u = u.rem_euclid(n as i64) as u64;
    let v = v.rem_euclid(n as i64) as u64;
    if u == 0 {
        debug_assert_eq!(num_integer::gcd(v, n), 1);
        return (0, 1);
    }
    let (g, s, _) = arith::ext_gcd(u as i128, n as i128);
    let g = g as u64;
    let mut s = s.rem_euclid(n as i128) as u64;
    // s u = g (mod n), but s must also be a unit: adjust by multiples of n/g
    // (valid since u * (n/g) = 0 mod n), possible because gcd(s, n/g) = 1
    while num_integer::gcd(s, n) != 1 {
        s = (s + n / g) % n;
    }
    // scale so the first coordinate is g
    let v1 = arith::mulmod(s, v, n);
    if g == 1 {
        return (1, v1);
    }
    // remaining freedom: units t = 1 mod n/g
    let t = n / g;
    let mut vmin = v1;
    let mut k = 1u64;
    while k < g {
        let lam = 1 + k * t;
        if num_integer::gcd(lam, n) == 1 {
            let cand = arith::mulmod(v1, lam % n, n);
            if cand < vmin {
                vmin = cand;
            }
        }
        k += 1;
    }
    (g, vmin)
}

impl P1 {
    pub fn build(n: u64) -> P1 {
        let mut reps = Vec::new();
        let mut index = HashMap::new();
        if n == 1 {
            reps.push((0, 0));
            index.insert((0, 0), 0);
        } else {
            for g in arith::divisors(n) {
                if g == n {
                    // (0 : 1) only
                    let key = (0, 1);
                    if !index.contains_key(&key) {
                        index.insert(key, reps.len() as u32);
                        reps.push(key);
                    }
                    continue;
                }
                for v in 0..n {
                    if num_integer::gcd(num_integer::gcd(g, v), n) != 1 {
                        continue;
                    }
                    let key = p1_normalize(n, g as i64, v as i64);
                    if !index.contains_key(&key) {
                        index.insert(key, reps.len() as u32);
                        reps.push(key);
                    }
                }
            }
        }
        let dense = if n <= DENSE_CAP {
            let mut t = vec![0u32; (n * n) as usize];
            for c in 0..n {
                for d in 0..n {
                    if num_integer::gcd(num_integer::gcd(c, d), n) == 1 {
                        let key = p1_normalize(n, c as i64, d as i64);
                        t[(c * n + d) as usize] = index[&key] + 1;
                    }
                }
            }
            Some(t)
        } else {
            None
        };
        P1 {
            n,
            reps,
            index,
            dense,
        }
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Index of (c : d); None if gcd(c, d, N) > 1.
    #[inline]
    pub fn lookup(&self, c: i64, d: i64) -> Option<u32> {
        if self.n == 1 {
            return Some(0);
        }
        let cm = c.rem_euclid(self.n as i64) as u64;
        let dm = d.rem_euclid(self.n as i64) as u64;
        if let Some(t) = &self.dense {
            let v = t[(cm * self.n + dm) as usize];
            return if v == 0 { None } else { Some(v - 1) };
        }
        if num_integer::gcd(num_integer::gcd(cm, dm), self.n) != 1 {
            return None;
        }
        Some(self.index[&p1_normalize(self.n, c, d)])
    }
}

/// Cusp class bookkeeping: cusps are reduced fractions p/q (infinity = 1/0).
#[derive(Debug, Clone, PartialEq, Eq)]
struct Cusp {
    p: i64,
    q: i64,
}

/// Gamma_0(N)-equivalence of cusps (Cremona, Prop. 2.2.3): p1/q1 ~ p2/q2
/// iff s1 q2 = s2 q1 mod gcd(q1 q2, N) with s_i = p_i^{-1} mod q_i.
fn cusps_equivalent(n: u64, a: &Cusp, b: &Cusp) -> bool {
    let s1 = inv_mod_or_zero(a.p, a.q);
    let s2 = inv_mod_or_zero(b.p, b.q);
    let g = num_integer::gcd((a.q * b.q).unsigned_abs(), n);
    if g == 0 {
        return (s1 - s2) == 0;
    }
    (s1 * b.q - s2 * a.q).rem_euclid(g as i64) == 0
}

fn inv_mod_or_zero(p: i64, q: i64) -> i64 {
    if q == 0 {
        return if p >= 0 { 1 } else { -1 };
    }
    let q = q.abs();
    if q == 1 {
        return 0;
    }
    let (g, x, _) = arith::ext_gcd(p.rem_euclid(q) as i128, q as i128);
    debug_assert_eq!(g, 1);
    x.rem_euclid(q as i128) as i64
}

/// The modular-symbol space for Gamma_0(N): Manin relations eliminated over Q.
pub struct ManinSymbolSpace {
    pub n: u64,
    pub p1: P1,
    /// free generators (as P^1 indices) spanning the relation quotient
    pub basis: Vec<u32>,
    /// projection of each P^1 index into basis coordinates
    pub proj: Vec<SparseRow>,
    /// dimension of the cuspidal subspace (= 2 genus(X_0(N)))
    pub cuspidal_dim: usize,
    /// number of cusp classes
    pub n_cusps: usize,
    /// boundary map: for each basis element, its cusp-class divisor
    pub boundary: Vec<Vec<BigRational>>,
}

impl ManinSymbolSpace {
    pub fn build(n: u64) -> ManinSymbolSpace {
        let p1 = P1::build(n);
        let nv = p1.len();
        // S: (c:d) -> (d:-c); R: (c:d) -> (d : -c-d)
        let act_s = |i: u32| {
            let (c, d) = p1.reps[i as usize];
            p1.lookup(d as i64, -(c as i64)).unwrap()
        };
        let act_r = |i: u32| {
            let (c, d) = p1.reps[i as usize];
            p1.lookup(d as i64, -(c as i64) - d as i64).unwrap()
        };
        let mut rows: Vec<SparseRow> = Vec::new();
        let mut seen = vec![false; nv];
        for i in 0..nv as u32 {
            if seen[i as usize] {
                continue;
            }
            let j = act_s(i);
            seen[i as usize] = true;
            seen[j as usize] = true;
            let mut row = SparseRow::new();
            *row.entry(i).or_insert_with(BigRational::zero) += BigRational::one();
            *row.entry(j).or_insert_with(BigRational::zero) += BigRational::one();
            row.retain(|_, v| !v.is_zero());
            rows.push(row);
        }
        let mut seen = vec![false; nv];
        for i in 0..nv as u32 {
            if seen[i as usize] {
                continue;
            }
            let j = act_r(i);
            let k = act_r(j);
            seen[i as usize] = true;
            seen[j as usize] = true;
            seen[k as usize] = true;
            let mut row = SparseRow::new();
            for t in [i, j, k] {
                *row.entry(t).or_insert_with(BigRational::zero) += BigRational::one();
            }
            row.retain(|_, v| !v.is_zero());
            rows.push(row);
        }
        let (basis, proj) = eliminate(nv, rows);

        // boundary map and cusp classes on the basis
        let mut classes: Vec<Cusp> = Vec::new();
        let class_of = |c: Cusp, classes: &mut Vec<Cusp>| -> usize {
            for (i, k) in classes.iter().enumerate() {
                if cusps_equivalent(n, k, &c) {
                    return i;
                }
            }
            classes.push(c);
            classes.len() - 1
        };
        let mut boundary_rows: Vec<(usize, usize)> = Vec::new(); // (to-class, from-class)
        for &g in &basis {
            let (c, d) = p1.reps[g as usize];
            let (a, b, cc, dd) = lift_to_sl2(c, d, n);
            // boundary of {b/dd -> a/cc}: [a/cc] - [b/dd]
            let to = class_of(reduce_cusp(a, cc), &mut classes);
            let from = class_of(reduce_cusp(b, dd), &mut classes);
            boundary_rows.push((to, from));
        }
        let n_cusps = classes.len();
        let boundary: Vec<Vec<BigRational>> = boundary_rows
            .iter()
            .map(|&(to, from)| {
                let mut v = vec![BigRational::zero(); n_cusps];
                v[to] += BigRational::one();
                v[from] -= BigRational::one();
                v
            })
            .collect();
        // cuspidal dimension = dim ker(boundary on the quotient)
        let rows: Vec<Vec<BigRational>> = (0..n_cusps)
            .map(|cusp| {
                (0..basis.len())
                    .map(|b| boundary[b][cusp].clone())
                    .collect()
            })
            .collect();
        let cuspidal_dim = kernel(&rows, basis.len()).len();

        ManinSymbolSpace {
            n,
            p1,
            basis,
            proj,
            cuspidal_dim,
            n_cusps,
            boundary,
        }
    }

    /// Matrix of T_q on basis coordinates (columns indexed by basis).
    pub fn hecke_matrix(&self, q: u64) -> Result<Vec<Vec<BigRational>>, ModSymError> {
        assert!(
            self.n % q != 0,
            "Hecke operator only implemented for q not dividing N"
        );
        let dim = self.basis.len();
        let heilbronn = merel_matrices(q);
        let mut cols: Vec<Vec<BigRational>> = Vec::with_capacity(dim);
        for &g in &self.basis {
            let (u, v) = self.p1.reps[g as usize];
            let mut acc: SparseRow = SparseRow::new();
            for &[a, b, c, d] in &heilbronn {
                // right action: (u:v) [a b; c d] = (a u + c v : b u + d v)
                let uu = a * u as i64 + c * v as i64;
                let vv = b * u as i64 + d * v as i64;
                if let Some(idx) = self.p1.lookup(uu, vv) {
                    for (&bcol, val) in &self.proj[idx as usize] {
                        let e = acc.entry(bcol).or_insert_with(BigRational::zero);
                        *e += val;
                    }
                }
            }
            let mut col = vec![BigRational::zero(); dim];
            for (bcol, val) in acc {
                if !val.is_zero() {
                    col[bcol as usize] = val;
                }
            }
            cols.push(col);
        }
        // transpose columns into row-major matrix
        let m = (0..dim)
            .map(|r| (0..dim).map(|c| cols[c][r].clone()).collect())
            .collect();
        Ok(m)
    }

    /// Matrix of the star involution (c:d) -> (-c:d).
    pub fn star_matrix(&self) -> Vec<Vec<BigRational>> {
        let dim = self.basis.len();
        let mut cols: Vec<Vec<BigRational>> = Vec::with_capacity(dim);
        for &g in &self.basis {
            let (c, d) = self.p1.reps[g as usize];
            let idx = self.p1.lookup(-(c as i64), d as i64).unwrap();
            let mut col = vec![BigRational::zero(); dim];
            for (&bcol, val) in &self.proj[idx as usize] {
                col[bcol as usize] = val.clone();
            }
            cols.push(col);
        }
        (0..dim)
            .map(|r| (0..dim).map(|c| cols[c][r].clone()).collect())
            .collect()
    }

    /// Dual eigenvectors for a_q(E), one per star sign: v with
    /// v T_q = a_q v and v star = sign v, primitive integer coordinates.
    pub fn cut_eigenspace(
        &self,
        aps: &ApTable,
    ) -> Result<(Vec<BigInt>, Vec<BigInt>), ModSymError> {
        let star = self.star_matrix();
        let mut out: Vec<Vec<BigInt>> = Vec::new();
        for sign in [1i8, -1i8] {
            // stack rows of (star^T - sign) and (T_q^T - a_q) until kernel is 1-dim
            let dim = self.basis.len();
            let mut rows: Vec<Vec<BigRational>> = Vec::new();
            for c in 0..dim {
                let mut row: Vec<BigRational> = (0..dim).map(|r| star[r][c].clone()).collect();
                row[c] -= BigRational::from(BigInt::from(sign as i64));
                rows.push(row);
            }
            let mut used_q = Vec::new();
            let mut ker = kernel(&rows, dim);
            let mut q = 2u64;
            while ker.len() > 1 {
                if self.n % q == 0 || !arith::is_prime(q) {
                    q += 1;
                    continue;
                }
                if q > 97 {
                    return Err(ModSymError::EigenspaceNotOneDimensional {
                        sign,
                        dim: ker.len(),
                        qs: used_q,
                    });
                }
                let tq = self.hecke_matrix(q)?;
                let aq = BigRational::from(BigInt::from(aps.a(q as usize)));
                for c in 0..dim {
                    let mut row: Vec<BigRational> = (0..dim).map(|r| tq[r][c].clone()).collect();
                    row[c] -= &aq;
                    rows.push(row);
                }
                used_q.push(q);
                ker = kernel(&rows, dim);
                q += 1;
            }
            if ker.is_empty() {
                return Err(ModSymError::EigenspaceNotOneDimensional {
                    sign,
                    dim: 0,
                    qs: used_q,
                });
            }
            out.push(primitive_integer_vector(&ker[0]));
        }
        let minus = out.pop().unwrap();
        let plus = out.pop().unwrap();
        Ok((plus, minus))
    }
}

/// Lift (c:d) in P^1(Z/N) to a matrix [a b; c' d'] in SL_2(Z).
pub fn lift_to_sl2(c: u64, d: u64, n: u64) -> (i64, i64, i64, i64) {
    if n == 1 {
        return (1, 0, 0, 1);
    }
    let c = (c % n) as i64;
    let mut d = (d % n) as i64;
    if c == 0 {
        // (0 : d) with gcd(d, N) = 1 ~ (0 : 1)
        return (1, 0, 0, 1);
    }
    // adjust d by multiples of N until gcd(c, d) = 1
    let mut t = 0;
    while num_integer::gcd(c.unsigned_abs(), d.unsigned_abs()) != 1 {
        d += n as i64;
        t += 1;
        assert!(t < 10_000, "lift_to_sl2 failed");
    }
    let (g, x, y) = arith::ext_gcd(d as i128, c as i128);
    debug_assert_eq!(g.abs(), 1);
    let sgn = g.signum() as i64;
    // a d - b c = 1 with a = sgn*x, b = -sgn*y
    let a = sgn * x as i64;
    let b = -sgn * y as i64;
    debug_assert_eq!(a * d - b * c, 1);
    (a, b, c, d)
}

fn reduce_cusp(p: i64, q: i64) -> Cusp {
    if q == 0 {
        return Cusp { p: 1, q: 0 };
    }
    let g = num_integer::gcd(p.unsigned_abs(), q.unsigned_abs()) as i64;
    let (mut p, mut q) = (p / g, q / g);
    if q < 0 {
        p = -p;
        q = -q;
    }
    Cusp { p, q }
}

/// Merel's set of determinant-n integer matrices [a b; c d] with
/// a > b >= 0 and d > c >= 0; T_n x = sum over the family of x * g.
pub fn merel_matrices(n: u64) -> Vec<[i64; 4]> {
    let n = n as i64;
    let mut out = Vec::new();
    for a in 1..=n {
        for d in 1..=(n + 1 - a) {
            let m = a * d - n;
            if m < 0 {
                continue;
            }
            if m == 0 {
                for c in 0..d {
                    out.push([a, 0, c, d]);
                }
                for b in 1..a {
                    out.push([a, b, 0, d]);
                }
                continue;
            }
            // factor m = b c with 0 < b < a, 0 < c < d
            let mut b = 1;
            while b * b <= m {
                if m % b == 0 {
                    let c = m / b;
                    if b < a && c < d {
                        out.push([a, b, c, d]);
                    }
                    if c != b && c < a && b < d {
                        out.push([a, c, b, d]);
                    }
                }
                b += 1;
            }
        }
    }
    out
}

/// psi(N) = N prod_{l | N} (1 + 1/l) = #P^1(Z/N)
pub fn psi(n: u64) -> u64 {
    arith::factor(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveModel;

    #[test]
    fn p1_sizes() {
        assert_eq!(P1::build(11).len(), 12);
        assert_eq!(P1::build(35).len() as u64, psi(35));
        assert_eq!(P1::build(27).len() as u64, psi(27));
        assert_eq!(P1::build(60).len() as u64, psi(60));
    }

    #[test]
    fn p1_normalize_scaling_invariance() {
        let n = 60u64;
        let p1 = P1::build(n);
        let mut rng = arith::SplitMix64::new(3);
        for _ in 0..500 {
            let c = rng.below(n) as i64;
            let d = rng.below(n) as i64;
            if num_integer::gcd(num_integer::gcd(c as u64, d as u64), n) != 1 {
                continue;
            }
            let i = p1.lookup(c, d).unwrap();
            // scaling by a unit leaves the class unchanged
            let lam = loop {
                let l = 1 + rng.below(n - 1);
                if num_integer::gcd(l, n) == 1 {
                    break l as i64;
                }
            };
            let j = p1.lookup(c * lam, d * lam).unwrap();
            assert_eq!(i, j);
        }
    }

    #[test]
    fn space_dimensions() {
        // quotient dim = 2g + (#cusps - 1); cuspidal dim = 2g
        let s = ManinSymbolSpace::build(11);
        assert_eq!(s.cuspidal_dim, 2);
        assert_eq!(s.n_cusps, 2);
        assert_eq!(s.basis.len(), 3);
        let s = ManinSymbolSpace::build(35);
        assert_eq!(s.cuspidal_dim, 6);
        assert_eq!(s.n_cusps, 4);
        let s = ManinSymbolSpace::build(27);
        assert_eq!(s.cuspidal_dim, 2);
        assert_eq!(s.n_cusps, 6);
        let s = ManinSymbolSpace::build(1);
        assert_eq!(s.cuspidal_dim, 0);
    }

    #[test]
    fn merel_determinants() {
        for n in [2u64, 3, 5, 7] {
            for m in merel_matrices(n) {
                assert_eq!((m[0] * m[3] - m[1] * m[2]) as u64, n);
                assert!(m[0] > m[1] && m[1] >= 0);
                assert!(m[3] > m[2] && m[2] >= 0);
            }
        }
    }

    #[test]
    fn hecke_commute_and_star() {
        let s = ManinSymbolSpace::build(11);
        let t2 = s.hecke_matrix(2).unwrap();
        let t3 = s.hecke_matrix(3).unwrap();
        let ab = mat_mul(&t2, &t3);
        let ba = mat_mul(&t3, &t2);
        assert_eq!(ab, ba);
        let st = s.star_matrix();
        let s2 = mat_mul(&st, &st);
        // star^2 = identity
        for (i, row) in s2.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(
                    *v,
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                );
            }
        }
        // star commutes with Hecke
        assert_eq!(mat_mul(&st, &t2), mat_mul(&t2, &st));
    }

    fn mat_mul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
        let n = a.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn eigenspace_11a1() {
        let e = CurveModel::new([0, -1, 1, -10, -20], None).unwrap();
        let aps = ApTable::build(&e, 100);
        let s = ManinSymbolSpace::build(11);
        // T_2 on the cuspidal part has eigenvalue a_2 = -2
        let (plus, minus) = s.cut_eigenspace(&aps).unwrap();
        assert!(!plus.iter().all(|x| x.is_zero()));
        assert!(!minus.iter().all(|x| x.is_zero()));
        // dual vector property: v T_q = a_q v for several q
        let check = |v: &Vec<BigInt>, q: u64, aq: i64| {
            let t = s.hecke_matrix(q).unwrap();
            let dim = v.len();
            for c in 0..dim {
                let mut acc = BigRational::zero();
                for r in 0..dim {
                    acc += BigRational::from(v[r].clone()) * &t[r][c];
                }
                assert_eq!(acc, BigRational::from(&v[c] * BigInt::from(aq)));
            }
        };
        for (q, aq) in [(2u64, -2i64), (3, -1), (5, 1), (7, -2), (13, 4)] {
            assert_eq!(e.trace_of_frobenius(q), aq);
            check(&plus, q, aq);
            check(&minus, q, aq);
        }
    }

    #[test]
    fn eigenspace_wrong_ap_fails() {
        let e = CurveModel::new([0, -1, 1, -10, -20], None).unwrap();
        let mut aps = ApTable::build(&e, 100);
        aps.an[2] = 5; // wrong a_2
        let s = ManinSymbolSpace::build(11);
        assert!(s.cut_eigenspace(&aps).is_err());
    }

    #[test]
    fn eigenspace_35a1() {
        let e = CurveModel::new([0, 1, 1, 9, 1], None).unwrap();
        let aps = ApTable::build(&e, 100);
        let s = ManinSymbolSpace::build(35);
        let (plus, minus) = s.cut_eigenspace(&aps).unwrap();
        assert_eq!(plus.len(), s.basis.len());
        assert_eq!(minus.len(), s.basis.len());
    }
}
