//! Dirichlet characters mod c with values in mu_d, the abelian field they cut
//! out, Gauss sums, and the split-completely predicate used by the
//! Kolyvagin-prime search.
//!
//! A character is stored as its exponent tuple on a fixed generating set of
//! (Z/c)^*: chi(g_i) = zeta_{o_i}^{t_i}.  Evaluation goes through a
//! precomputed discrete-log table (moduli here are character conductors, so
//! small), producing an exponent in Z/ord(chi); embedding into a `PadicQuotient`
//! maps that exponent onto the chosen primitive root of unity.

use crate::arith;
use crate::padic::PadicQuotient;
use crate::real::{Cx, RealCtx};
use num_integer::Integer;
use std::collections::HashSet;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CharError {
    #[error("subgroup generators are not units mod {0}")]
    BadSubgroup(u64),
    #[error("character order {ord} does not divide ring d = {d}")]
    OrderMismatch { ord: u64, d: u64 },
    #[error("character mod {0} is not primitive")]
    NotPrimitive(u64),
    #[error("prime {0} ramifies in the field (divides the conductor)")]
    RamifiedPrime(u64),
    #[error("modulus {0} too large for character table")]
    ModulusTooLarge(u64),
}

const MAX_MODULUS: u64 = 5_000_000;

/// Structure of (Z/m)^* as a product of cyclic groups, with a full
/// discrete-log table.
#[derive(Debug, Clone)]
pub struct UnitGroup {
    pub modulus: u64,
    /// (generator, order) pairs
    pub gens: Vec<(u64, u64)>,
    /// exponent tuple for each unit residue; None for non-units
    dlog: Vec<Option<Vec<u32>>>,
}

impl UnitGroup {
    pub fn new(m: u64) -> Result<UnitGroup, CharError> {
        if m > MAX_MODULUS {
            return Err(CharError::ModulusTooLarge(m));
        }
        assert!(m >= 1);
        let mut gens: Vec<(u64, u64)> = Vec::new();
        for (q, e) in arith::factor(m) {
            let qe = q.pow(e);
            let rest = m / qe;
            if q == 2 {
                match e {
                    1 => {}
                    2 => gens.push((crt_to(3, qe, rest), 2)),
                    _ => {
                        gens.push((crt_to(qe - 1, qe, rest), 2));
                        gens.push((crt_to(5, qe, rest), 1 << (e - 2)));
                    }
                }
            } else {
                let mut g = arith::least_primitive_root(q);
                if e > 1 && arith::powmod(g, q - 1, q * q) == 1 {
                    g += q;
                }
                let ord = qe / q * (q - 1);
                gens.push((crt_to(g % qe, qe, rest), ord));
            }
        }
        // dlog table by enumerating the full group
        let mut dlog: Vec<Option<Vec<u32>>> = vec![None; m as usize];
        let r = gens.len();
        let mut exps = vec![0u32; r];
        let mut val = 1u64 % m;
        let total: u64 = gens.iter().map(|&(_, o)| o).product();
        for _ in 0..total {
            dlog[val as usize] = Some(exps.clone());
            // increment odometer
            let mut i = 0;
            loop {
                if i == r {
                    break;
                }
                exps[i] += 1;
                val = arith::mulmod(val, gens[i].0, m);
                if (exps[i] as u64) < gens[i].1 {
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
        }
        if m == 1 {
            dlog[0] = Some(vec![]); // the unique residue class
        }
        Ok(UnitGroup {
            modulus: m,
            gens,
            dlog,
        })
    }

    pub fn phi(&self) -> u64 {
        self.gens.iter().map(|&(_, o)| o).product()
    }

    pub fn dlog(&self, a: u64) -> Option<&Vec<u32>> {
        self.dlog[(a % self.modulus.max(1)) as usize].as_ref()
    }

    pub fn is_unit(&self, a: u64) -> bool {
        if self.modulus == 1 {
            return true;
        }
        self.dlog[(a % self.modulus) as usize].is_some()
    }
}

fn crt_to(a: u64, m: u64, rest: u64) -> u64 {
    if rest == 1 {
        a % m
    } else {
        arith::crt_pair(a, m, 1, rest)
    }
}

/// The abelian field K inside Q(mu_c) fixed by the subgroup H of (Z/c)^*.
#[derive(Debug, Clone)]
pub struct FieldSpec {
    pub conductor: u64,
    pub group: Arc<UnitGroup>,
    /// residues of H, closed under multiplication
    pub subgroup: HashSet<u64>,
    pub degree: u64,
    pub label: Option<String>,
}

impl FieldSpec {
    pub fn new(conductor: u64, h_gens: &[u64], label: Option<String>) -> Result<Self, CharError> {
        let group = Arc::new(UnitGroup::new(conductor)?);
        let mut sub: HashSet<u64> = HashSet::new();
        sub.insert(1 % conductor.max(1));
        let mut frontier = vec![1 % conductor.max(1)];
        for &g in h_gens {
            if !group.is_unit(g) {
                return Err(CharError::BadSubgroup(conductor));
            }
        }
        while let Some(x) = frontier.pop() {
            for &g in h_gens {
                let y = arith::mulmod(x, g % conductor, conductor.max(2));
                if sub.insert(y) {
                    frontier.push(y);
                }
            }
        }
        let degree = group.phi() / sub.len() as u64;
        Ok(FieldSpec {
            conductor,
            group,
            subgroup: sub,
            degree,
            label,
        })
    }

    /// The full cyclotomic field Q(mu_c).
    pub fn cyclotomic(c: u64) -> Result<Self, CharError> {
        FieldSpec::new(c, &[], Some(format!("Q(mu_{c})")))
    }

    /// K = Q (trivial field).
    pub fn rational() -> Self {
        FieldSpec::new(1, &[], Some("Q".into())).unwrap()
    }

    /// True iff the unramified prime l splits completely in K/Q,
    /// i.e. l mod c lies in H.
    pub fn splits_completely(&self, l: u64) -> Result<bool, CharError> {
        if self.conductor == 1 {
            return Ok(true);
        }
        if l % self.conductor == 0 || num_integer::gcd(l, self.conductor) != 1 {
            return Err(CharError::RamifiedPrime(l));
        }
        Ok(self.subgroup.contains(&(l % self.conductor)))
    }
}

/// Dirichlet character mod `modulus`, values in mu_order.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    pub modulus: u64,
    group: Arc<UnitGroup>,
    /// chi(g_i) = zeta_{o_i}^{exponents[i]}
    pub exponents: Vec<u64>,
    pub order: u64,
    pub conductor: u64,
    /// chi(-1)
    pub parity: i8,
}

impl DirichletCharacter {
    pub fn from_exponents(group: Arc<UnitGroup>, exponents: Vec<u64>) -> Self {
        assert_eq!(exponents.len(), group.gens.len());
        let d_exp: u64 = group
            .gens
            .iter()
            .map(|&(_, o)| o)
            .fold(1u64, |a, o| a.lcm(&o));
        // order = D / gcd(D, all t_i * D / o_i)
        let mut g = d_exp;
        for (i, &(_, o)) in group.gens.iter().enumerate() {
            g = g.gcd(&(exponents[i] * (d_exp / o)));
        }
        let order = if g == 0 { 1 } else { d_exp / g };
        let mut chi = DirichletCharacter {
            modulus: group.modulus,
            group,
            exponents,
            order,
            conductor: 1,
            parity: 1,
        };
        chi.conductor = chi.compute_conductor();
        chi.parity = if chi.modulus <= 2 {
            1
        } else {
            let e = chi.raw_exponent(chi.modulus - 1).unwrap();
            if e == 0 {
                1
            } else {
                -1
            }
        };
        chi
    }

    pub fn trivial(group: Arc<UnitGroup>) -> Self {
        let n = group.gens.len();
        Self::from_exponents(group, vec![0; n])
    }

    /// Exponent e in Z/ord(chi) with chi(a) = zeta_order^e; None when
    /// gcd(a, modulus) > 1.
    pub fn raw_exponent(&self, a: u64) -> Option<u64> {
        let dl = self.group.dlog(a.rem_euclid(self.modulus.max(1)))?;
        let d_exp: u64 = self
            .group
            .gens
            .iter()
            .map(|&(_, o)| o)
            .fold(1u64, |x, o| x.lcm(&o));
        let mut acc: u128 = 0;
        for (i, &(_, o)) in self.group.gens.iter().enumerate() {
            acc += (self.exponents[i] as u128) * ((d_exp / o) as u128) * (dl[i] as u128);
        }
        let r = (acc % d_exp as u128) as u64;
        // r is a multiple of D/order
        let step = d_exp / self.order;
        debug_assert_eq!(r % step, 0);
        Some((r / step) % self.order)
    }

    /// chi(a) as an element of O_d/p^k (zeta_d^(e * d/order)); None marks 0.
    pub fn evaluate(
        &self,
        a: i64,
        ring: &Arc<PadicQuotient>,
    ) -> Result<Option<crate::padic::CyclotomicInteger>, CharError> {
        if ring.d % self.order != 0 {
            return Err(CharError::OrderMismatch {
                ord: self.order,
                d: ring.d,
            });
        }
        let a = a.rem_euclid(self.modulus.max(1) as i64) as u64;
        Ok(self
            .raw_exponent(a)
            .map(|e| ring.zeta_pow((e * (ring.d / self.order)) as i64)))
    }

    /// conjugate character chi-bar = chi^{-1}
    pub fn conjugate(&self) -> Self {
        let exps = self
            .group
            .gens
            .iter()
            .zip(&self.exponents)
            .map(|(&(_, o), &t)| if t == 0 { 0 } else { o - t })
            .collect();
        Self::from_exponents(self.group.clone(), exps)
    }

    /// chi^m
    pub fn power(&self, m: u64) -> Self {
        let exps = self
            .group
            .gens
            .iter()
            .zip(&self.exponents)
            .map(|(&(_, o), &t)| ((t as u128 * m as u128) % o as u128) as u64)
            .collect();
        Self::from_exponents(self.group.clone(), exps)
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn is_quadratic(&self) -> bool {
        self.order == 2
    }

    pub fn is_self_dual(&self) -> bool {
        self.order <= 2
    }

    fn compute_conductor(&self) -> u64 {
        'outer: for m in arith::divisors(self.modulus) {
            // chi factors through (Z/m)^* iff chi(a) = 1 whenever a = 1 mod m
            let mut a = 1 + m;
            while a < self.modulus {
                if num_integer::gcd(a, self.modulus) == 1
                    && self.raw_exponent(a) != Some(0)
                {
                    continue 'outer;
                }
                a += m;
            }
            return m.max(1);
        }
        self.modulus
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus
    }

    /// The primitive character mod conductor inducing this one.
    pub fn primitive_core(&self) -> Result<DirichletCharacter, CharError> {
        if self.is_primitive() {
            return Ok(self.clone());
        }
        let g = Arc::new(UnitGroup::new(self.conductor)?);
        // determine exponents on the generators of the smaller group
        let mut exps = Vec::new();
        for &(gen, _o) in &g.gens {
            // lift gen to a unit mod modulus congruent to gen mod conductor
            let mut lift = gen;
            while num_integer::gcd(lift, self.modulus) != 1 {
                lift += self.conductor;
            }
            let e = self.raw_exponent(lift).unwrap();
            // chi(gen) = zeta_order^e = zeta_o^(e * o / order) requires order | o scaling
            exps.push(e);
        }
        // express exponents in terms of each generator's own order
        let exps = g
            .gens
            .iter()
            .zip(exps)
            .map(|(&(_, o), e)| {
                // zeta_order^e = zeta_o^(e * o / order); order | o not guaranteed
                // per generator, so go through the common exponent
                ((e as u128 * o as u128 / self.order as u128) % o as u128) as u64
            })
            .collect();
        let core = DirichletCharacter::from_exponents(g, exps);
        debug_assert_eq!(core.order, self.order);
        Ok(core)
    }

    /// The field cut out by ker(chi): degree = order, conductor = cond(chi).
    pub fn kernel_field(&self) -> Result<FieldSpec, CharError> {
        let core = self.primitive_core()?;
        let kernel: Vec<u64> = (1..core.modulus.max(2))
            .filter(|&a| core.raw_exponent(a) == Some(0))
            .collect();
        let fs = FieldSpec::new(core.modulus, &kernel, None)?;
        debug_assert_eq!(fs.degree, core.order);
        Ok(fs)
    }
}

/// All d characters of (Z/c)^* trivial on H, i.e. the character group of
/// Gal(K/Q).  Includes the trivial character.
pub fn enumerate_characters(spec: &FieldSpec) -> Vec<DirichletCharacter> {
    let group = &spec.group;
    let r = group.gens.len();
    let mut out = Vec::new();
    let mut exps = vec![0u64; r];
    let h_gens: Vec<u64> = spec.subgroup.iter().copied().collect();
    loop {
        let chi = DirichletCharacter::from_exponents(group.clone(), exps.clone());
        if h_gens.iter().all(|&h| chi.raw_exponent(h) == Some(0)) {
            out.push(chi);
        }
        // odometer
        let mut i = 0;
        loop {
            if i == r {
                debug_assert_eq!(out.len() as u64, spec.degree);
                out.sort_by_key(|c| (c.order, c.exponents.clone()));
                return out;
            }
            exps[i] += 1;
            if exps[i] < group.gens[i].1 {
                break;
            }
            exps[i] = 0;
            i += 1;
        }
    }
}

/// Gauss sum tau(chi) = sum_a chi(a) e^{2 pi i a / c} for primitive chi,
/// evaluated in fixed-point complex arithmetic.
pub fn gauss_sum_complex(
    chi: &DirichletCharacter,
    ctx: &RealCtx,
) -> Result<Cx, CharError> {
    if !chi.is_primitive() {
        return Err(CharError::NotPrimitive(chi.modulus));
    }
    let c = chi.modulus;
    if c == 1 {
        return Ok(Cx::real(ctx.one()));
    }
    // zeta_order powers and e^{2 pi i a/c} by repeated multiplication
    let pi = ctx.pi();
    let step = ctx.div(&(&pi << 1), &ctx.from_i64(c as i64));
    let mut out = Cx::zero();
    for a in 1..c {
        if let Some(e) = chi.raw_exponent(a) {
            // chi(a) = e^{2 pi i e / order}
            let ang_chi = ctx.div(
                &ctx.mul(&(&pi << 1), &ctx.from_i64(e as i64)),
                &ctx.from_i64(chi.order as i64),
            );
            let (cc, sc) = ctx.sincos(&ang_chi);
            let ang_a = ctx.mul(&step, &ctx.from_i64(a as i64));
            let (ca, sa) = ctx.sincos(&ang_a);
            let term = Cx { re: cc, im: sc }.mul(&Cx { re: ca, im: sa }, ctx);
            out = out.add(&term);
        }
    }
    Ok(out)
}


impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus && self.exponents == other.exponents
    }
}
impl Eq for DirichletCharacter {}
