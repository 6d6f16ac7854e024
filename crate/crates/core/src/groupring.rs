//! Group rings over products of cyclic groups: Mazur-Tate modular elements,
//! the Kolyvagin derivative operator D_l = sum i sigma_l^i, its telescoping
//! identity D_l (sigma_l - 1) = p^{n_l} - N_l, and the discrete-log formula
//! for Galois-invariant derivatives.

use crate::curve::KolyvaginPrimeRecord;
use crate::modsym::evaluator::SymbolEvaluator;
use crate::modsym::ModSymError;
use crate::padic::{CyclotomicInteger, PadicQuotient};
use num_bigint::BigUint;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GroupRingError {
    #[error("elements live over different groups")]
    GroupMismatch,
    #[error("symbol reduction failed: {0}")]
    Symbol(#[from] ModSymError),
}

/// Finite abelian group presented as a product of cyclic factors; elements
/// are exponent vectors in mixed radix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicProduct {
    pub orders: Vec<u64>,
    /// optional tag per factor (e.g. the prime l for G_l)
    pub labels: Vec<u64>,
}

impl CyclicProduct {
    pub fn new(orders: Vec<u64>, labels: Vec<u64>) -> Arc<CyclicProduct> {
        assert_eq!(orders.len(), labels.len());
        Arc::new(CyclicProduct { orders, labels })
    }

    pub fn size(&self) -> usize {
        self.orders.iter().product::<u64>() as usize
    }

    pub fn index(&self, exps: &[u64]) -> usize {
        let mut idx = 0usize;
        for (i, &e) in exps.iter().enumerate() {
            idx = idx * self.orders[i] as usize + (e % self.orders[i]) as usize;
        }
        idx
    }

    pub fn exps(&self, mut idx: usize) -> Vec<u64> {
        let mut out = vec![0u64; self.orders.len()];
        for i in (0..self.orders.len()).rev() {
            out[i] = (idx as u64) % self.orders[i];
            idx /= self.orders[i] as usize;
        }
        out
    }

    fn add_exps(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .zip(&self.orders)
            .map(|((&x, &y), &o)| (x + y) % o)
            .collect()
    }

    fn neg_exps(&self, a: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(&self.orders)
            .map(|(&x, &o)| (o - x % o) % o)
            .collect()
    }
}

/// Element of (O_d/p^k)[G] with dense coefficient storage.
#[derive(Clone)]
pub struct GroupRingElement {
    pub group: Arc<CyclicProduct>,
    pub ring: Arc<PadicQuotient>,
    pub coeffs: Vec<CyclotomicInteger>,
}

impl GroupRingElement {
    pub fn zero(group: &Arc<CyclicProduct>, ring: &Arc<PadicQuotient>) -> Self {
        GroupRingElement {
            group: group.clone(),
            ring: ring.clone(),
            coeffs: vec![ring.zero(); group.size()],
        }
    }

    pub fn monomial(
        group: &Arc<CyclicProduct>,
        ring: &Arc<PadicQuotient>,
        exps: &[u64],
        coeff: CyclotomicInteger,
    ) -> Self {
        let mut el = Self::zero(group, ring);
        el.coeffs[group.index(exps)] = coeff;
        el
    }

    /// The norm element of one factor: sum of all powers of sigma_i.
    pub fn factor_norm(group: &Arc<CyclicProduct>, ring: &Arc<PadicQuotient>, i: usize) -> Self {
        let mut el = Self::zero(group, ring);
        let mut exps = vec![0u64; group.orders.len()];
        for e in 0..group.orders[i] {
            exps[i] = e;
            el.coeffs[group.index(&exps)] = ring.one();
        }
        el
    }

    /// The Kolyvagin derivative D_i = sum_{j=1}^{o-1} j sigma_i^j on factor i.
    pub fn derivative_op(group: &Arc<CyclicProduct>, ring: &Arc<PadicQuotient>, i: usize) -> Self {
        let mut el = Self::zero(group, ring);
        let mut exps = vec![0u64; group.orders.len()];
        for j in 1..group.orders[i] {
            exps[i] = j;
            el.coeffs[group.index(&exps)] = ring.from_u64(j);
        }
        el
    }

    pub fn add(&self, o: &Self) -> Result<Self, GroupRingError> {
        if self.group != o.group {
            return Err(GroupRingError::GroupMismatch);
        }
        Ok(GroupRingElement {
            group: self.group.clone(),
            ring: self.ring.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| a.checked_add(b).unwrap())
                .collect(),
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self, GroupRingError> {
        if self.group != o.group {
            return Err(GroupRingError::GroupMismatch);
        }
        Ok(GroupRingElement {
            group: self.group.clone(),
            ring: self.ring.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| a.checked_sub(b).unwrap())
                .collect(),
        })
    }

    pub fn mul(&self, o: &Self) -> Result<Self, GroupRingError> {
        if self.group != o.group {
            return Err(GroupRingError::GroupMismatch);
        }
        let g = &self.group;
        let mut out = Self::zero(g, &self.ring);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let ei = g.exps(i);
            for (j, b) in o.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let idx = g.index(&g.add_exps(&ei, &g.exps(j)));
                out.coeffs[idx] = out.coeffs[idx]
                    .checked_add(&a.checked_mul(b).unwrap())
                    .unwrap();
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &CyclotomicInteger) -> Self {
        GroupRingElement {
            group: self.group.clone(),
            ring: self.ring.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.checked_mul(s).unwrap())
                .collect(),
        }
    }

    /// Image under inversion sigma -> sigma^{-1}.
    pub fn invert_group(&self) -> Self {
        let g = &self.group;
        let mut out = Self::zero(g, &self.ring);
        for (i, c) in self.coeffs.iter().enumerate() {
            let idx = g.index(&g.neg_exps(&g.exps(i)));
            out.coeffs[idx] = c.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// True iff the element is fixed by every group translation, modulo p^j.
    pub fn is_invariant_mod(&self, j: u32) -> bool {
        let g = &self.group;
        let pj = BigUint::from(self.ring.p).pow(j);
        for f in 0..g.orders.len() {
            let mut shift = vec![0u64; g.orders.len()];
            shift[f] = 1;
            for (i, c) in self.coeffs.iter().enumerate() {
                let moved = g.index(&g.add_exps(&g.exps(i), &shift));
                let diff = c.checked_sub(&self.coeffs[moved]).unwrap();
                if !diff
                    .coeffs
                    .iter()
                    .all(|x| (x % &pj) == BigUint::ZERO)
                {
                    return false;
                }
            }
        }
        true
    }
}

/// The Mazur-Tate modular element theta_n = sum over a in (Z/n)^* of
/// ([a/n]^+ + [a/n]^-) sigma_a, coefficients reduced into `ring`.
pub fn mazur_tate_element(
    ev: &SymbolEvaluator,
    n: u64,
    ring: &Arc<PadicQuotient>,
) -> Result<GroupRingElement, GroupRingError> {
    let ug = crate::chars::UnitGroup::new(n).expect("modulus in range");
    let orders: Vec<u64> = ug.gens.iter().map(|&(_, o)| o).collect();
    let labels: Vec<u64> = ug.gens.iter().map(|&(g, _)| g).collect();
    let group = CyclicProduct::new(orders, labels);
    let mut el = GroupRingElement::zero(&group, ring);
    let p = ring.p;
    if n == 1 {
        // single term a = 0 -> [0/1]^+ ([0/1]^- vanishes by oddness)
        let v = ev
            .evaluate_big_mod(0, 1, 1, p, &ring.pk)
            .map_err(GroupRingError::Symbol)?;
        el.coeffs[0] = ring.from_biguint(v);
        return Ok(el);
    }
    for a in 1..n {
        let Some(dl) = ug.dlog(a) else { continue };
        let exps: Vec<u64> = dl.iter().map(|&x| x as u64).collect();
        let plus = ev
            .evaluate_big_mod(a as i64, n as i64, 1, p, &ring.pk)
            .map_err(GroupRingError::Symbol)?;
        let minus = ev
            .evaluate_big_mod(a as i64, n as i64, -1, p, &ring.pk)
            .map_err(GroupRingError::Symbol)?;
        el.coeffs[group.index(&exps)] = ring.from_biguint((plus + minus) % &ring.pk);
    }
    Ok(el)
}

/// sigma_a for the Mazur-Tate group of level n.
pub fn sigma_a(_el: &GroupRingElement, n: u64, a: u64) -> Option<Vec<u64>> {
    let ug = crate::chars::UnitGroup::new(n).ok()?;
    ug.dlog(a % n)
        .map(|dl| dl.iter().map(|&x| x as u64).collect())
}

/// D_n = prod over the record factors, acting on x by multiplication.
/// The group of x must contain, for each record, a factor of order
/// p^{v_p(l-1)} labelled by l.
pub fn kolyvagin_derivative(
    x: &GroupRingElement,
    records: &[&KolyvaginPrimeRecord],
    p: u64,
) -> Result<GroupRingElement, GroupRingError> {
    let mut out = x.clone();
    for rec in records {
        let Some(i) = x
            .group
            .labels
            .iter()
            .position(|&lab| lab == rec.l)
        else {
            return Err(GroupRingError::GroupMismatch);
        };
        if x.group.orders[i] != p.pow(rec.vp_l_minus_1) {
            return Err(GroupRingError::GroupMismatch);
        }
        let d = GroupRingElement::derivative_op(&x.group, &x.ring, i);
        out = out.mul(&d)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{self, SplitMix64};

    fn ring5() -> Arc<PadicQuotient> {
        PadicQuotient::build(5, 2, 1).unwrap()
    }

    #[test]
    fn telescoping_identity() {
        // D_l (sigma_l - 1) = p^{n_l} - N_l over G_l of order p^{n_l}
        let ring = ring5();
        for orders in [vec![5u64], vec![25], vec![5, 5]] {
            let labels: Vec<u64> = (0..orders.len() as u64).map(|i| 11 + i).collect();
            let g = CyclicProduct::new(orders.clone(), labels);
            for i in 0..orders.len() {
                let d = GroupRingElement::derivative_op(&g, &ring, i);
                let mut sig = vec![0u64; orders.len()];
                sig[i] = 1;
                let sigma = GroupRingElement::monomial(&g, &ring, &sig, ring.one());
                let one = GroupRingElement::monomial(
                    &g,
                    &ring,
                    &vec![0; orders.len()],
                    ring.one(),
                );
                let lhs = d.mul(&sigma.sub(&one).unwrap()).unwrap();
                let pn = GroupRingElement::monomial(
                    &g,
                    &ring,
                    &vec![0; orders.len()],
                    ring.from_u64(orders[i]),
                );
                let rhs = pn.sub(&GroupRingElement::factor_norm(&g, &ring, i)).unwrap();
                assert!(lhs.sub(&rhs).unwrap().is_zero(), "telescoping at {orders:?}");
            }
        }
    }

    #[test]
    fn derivative_of_norm() {
        // D_l N_l = (p^n (p^n - 1)/2) N_l
        let ring = ring5();
        let g = CyclicProduct::new(vec![5], vec![11]);
        let d = GroupRingElement::derivative_op(&g, &ring, 0);
        let n = GroupRingElement::factor_norm(&g, &ring, 0);
        let lhs = d.mul(&n).unwrap();
        let rhs = n.scale(&ring.from_u64(5 * 4 / 2));
        assert!(lhs.sub(&rhs).unwrap().is_zero());
    }

    #[test]
    fn logs_formula_brute_force() {
        // over G_11 x G_31 at p = 5: theta with a_sigma = c1^i c2^j for
        // c = 1 mod 5 has Galois-invariant D_n theta mod 5, and
        // D_n theta = (-1)^nu sum a_sigma log(sigma_1) log(sigma_2) N_n mod 5
        let ring = ring5(); // Z/25, reduce claims mod 5
        let g = CyclicProduct::new(vec![5, 5], vec![11, 31]);
        let mut rng = SplitMix64::new(123);
        for _ in 0..5 {
            let c1 = 1 + 5 * rng.below(5);
            let c2 = 1 + 5 * rng.below(5);
            let mut theta = GroupRingElement::zero(&g, &ring);
            for i in 0..5u64 {
                for j in 0..5u64 {
                    let a = arith::powmod(c1, i, 25) * arith::powmod(c2, j, 25) % 25;
                    theta.coeffs[g.index(&[i, j])] = ring.from_u64(a);
                }
            }
            let d1 = GroupRingElement::derivative_op(&g, &ring, 0);
            let d2 = GroupRingElement::derivative_op(&g, &ring, 1);
            let dn_theta = theta.mul(&d1).unwrap().mul(&d2).unwrap();
            assert!(dn_theta.is_invariant_mod(1), "D_n theta invariant mod 5");
            // rhs = (-1)^2 sum a_sigma i j N_n
            let mut coeff = ring.zero();
            for i in 0..5u64 {
                for j in 0..5u64 {
                    let a = arith::powmod(c1, i, 25) * arith::powmod(c2, j, 25) % 25;
                    coeff = coeff
                        .checked_add(&ring.from_u64(a * i * j % 25))
                        .unwrap();
                }
            }
            let nn = GroupRingElement::factor_norm(&g, &ring, 0)
                .mul(&GroupRingElement::factor_norm(&g, &ring, 1))
                .unwrap();
            let rhs = nn.scale(&coeff);
            let diff = dn_theta.sub(&rhs).unwrap();
            // equality mod 5
            let p1 = BigUint::from(5u32);
            for c in &diff.coeffs {
                assert!(
                    c.coeffs.iter().all(|x| (x % &p1) == BigUint::ZERO),
                    "logs formula mod 5"
                );
            }
        }
    }

    #[test]
    fn mazur_tate_small_level() {
        use crate::curve::{ApTable, CurveModel};
        use crate::modsym::evaluator::SymbolEvaluator;
        use crate::modsym::ManinSymbolSpace;
        let e = CurveModel::new([0, -1, 1, -10, -20], Some("11a1".into())).unwrap();
        let aps = ApTable::build(&e, 3000);
        let space = ManinSymbolSpace::build(11);
        let ev = SymbolEvaluator::build(&space, &e, &aps, 1, 30, 1_000_000).unwrap();
        let ring = PadicQuotient::build(7, 3, 1).unwrap();
        // n = 1: single coefficient [0/1]^+
        let theta1 = mazur_tate_element(&ev, 1, &ring).unwrap();
        let expect = ev.evaluate_big_mod(0, 1, 1, 7, &ring.pk).unwrap();
        assert_eq!(theta1.coeffs[0], ring.from_biguint(expect));
        // coefficient pairing: coeff(sigma_{-a}) = [a/n]^+ - [a/n]^-
        let n = 5u64;
        let theta5 = mazur_tate_element(&ev, n, &ring).unwrap();
        for a in [1u64, 2, 3, 4] {
            let idx_neg = theta5.group.index(&sigma_a(&theta5, n, n - a).unwrap());
            let plus = ev.evaluate_big_mod(a as i64, n as i64, 1, 7, &ring.pk).unwrap();
            let minus = ev.evaluate_big_mod(a as i64, n as i64, -1, 7, &ring.pk).unwrap();
            let want = ring
                .from_biguint(plus)
                .checked_sub(&ring.from_biguint(minus))
                .unwrap();
            assert_eq!(theta5.coeffs[idx_neg], want, "conjugate coefficient at {a}");
        }
        // functional equation iota(theta_5) = eps sigma_{-11} theta_5, eps = +1
        let iota = theta5.invert_group();
        let shift = sigma_a(&theta5, n, (n as i64 - 11i64).rem_euclid(n as i64) as u64).unwrap();
        let shifted = theta5
            .mul(&GroupRingElement::monomial(
                &theta5.group,
                &ring,
                &shift,
                ring.one(),
            ))
            .unwrap();
        assert!(iota.sub(&shifted).unwrap().is_zero(), "MT functional equation");
    }
}
