//! Complex-analytic side: Neron periods via the AGM, numerically evaluated
//! twisted L-values L(E, chi, 1), and the root number.  Used to pin the
//! rational normalisation of exact modular symbols and to cross-check the
//! exact Kurihara sums; never feeds the p-adic pipeline directly.
//!
//! Period formulas (cubic 4x^3 + b2 x^2 + 2 b4 x + b6):
//!   three real roots e1 > e2 > e3 (rectangular lattice):
//!     Omega_re = pi / M(sqrt(e1-e3), sqrt(e1-e2))
//!     Omega_im = pi / M(sqrt(e1-e3), sqrt(e2-e3))
//!   one real root e1, complex pair P +- Qi, A = |e1 - (P+Qi)| (rhombic):
//!     Omega_re = pi / M(sqrt((A + e1 - P)/2), sqrt(A))
//!     Omega_im = pi / M(sqrt((A - e1 + P)/2), sqrt(A))
//! both checked against direct quadrature of dx/y before being frozen here.

use crate::chars::{gauss_sum_complex, DirichletCharacter};
use crate::curve::{ApTable, CurveModel};
use crate::real::{Cx, Fx, RealCtx};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalyticError {
    #[error("requested precision unreachable: {0}")]
    PrecisionUnreachable(String),
    #[error("twisted L-series term budget exceeded for conductor {0}")]
    ConductorTooLarge(u64),
    #[error("root number did not converge to +-1 (got {0})")]
    RootNumberAmbiguous(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeType {
    Rectangular,
    Rhombic,
}

/// Neron periods of the minimal model.  `omega_im` is the magnitude of the
/// least purely-imaginary lattice element (Omega^- = i * omega_im).
pub struct PeriodData {
    pub omega_re: Fx,
    pub omega_im: Fx,
    pub lattice: LatticeType,
    pub ctx: RealCtx,
    /// absolute error bound on both periods
    pub err: f64,
}

fn binvs_i128(a: &[i64; 5]) -> (i128, i128, i128) {
    let [a1, a2, a3, a4, a6] = a.map(i128::from);
    (
        a1 * a1 + 4 * a2,
        2 * a4 + a1 * a3,
        a3 * a3 + 4 * a6,
    )
}

/// Newton refinement of a root of the cubic 4x^3 + b2 x^2 + 2 b4 x + b6.
fn refine_root(ctx: &RealCtx, b: (i128, i128, i128), seed: f64) -> Fx {
    let (b2, b4, b6) = b;
    let c3 = ctx.from_i64(4);
    let c2 = ctx.from_ratio(&BigInt::from(b2), &BigInt::from(1));
    let c1 = ctx.from_ratio(&BigInt::from(2 * b4), &BigInt::from(1));
    let c0 = ctx.from_ratio(&BigInt::from(b6), &BigInt::from(1));
    let mut x = ctx.from_f64(seed);
    for _ in 0..ctx.bits {
        // f = ((4x + b2) x + 2 b4) x + b6 ; f' = (12 x + 2 b2) x + 2 b4
        let fx = {
            let t = ctx.mul(&x, &c3) + &c2;
            let t = ctx.mul(&t, &x) + &c1;
            ctx.mul(&t, &x) + &c0
        };
        let dfx = {
            let t = ctx.mul(&x, &ctx.from_i64(12)) + (&c2 << 1);
            ctx.mul(&t, &x) + &c1
        };
        if dfx.is_zero() {
            break;
        }
        let step = ctx.div(&fx, &dfx);
        let done = step.abs() <= BigInt::from(8);
        x -= step;
        if done {
            break;
        }
    }
    x
}

fn cubic_roots_f64(b: (i128, i128, i128)) -> Vec<f64> {
    let (b2, b4, b6) = (b.0 as f64, b.1 as f64, b.2 as f64);
    // roots of 4x^3 + b2 x^2 + 2 b4 x + b6 via the depressed trigonometric form
    let a = b2 / 4.0;
    let bb = 2.0 * b4 / 4.0;
    let c = b6 / 4.0;
    // x^3 + a x^2 + bb x + c
    let p = bb - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * bb / 3.0 + c;
    let disc = -4.0 * p * p * p - 27.0 * q * q;
    let shift = -a / 3.0;
    if disc > 0.0 {
        // three real roots
        let m = 2.0 * (-p / 3.0).sqrt();
        let theta = (3.0 * q / (p * m)).clamp(-1.0, 1.0).acos() / 3.0;
        let mut rs: Vec<f64> = (0..3)
            .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + shift)
            .collect();
        rs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        rs
    } else {
        // one real root (Cardano)
        let d = (q * q / 4.0 + p * p * p / 27.0).sqrt();
        let u = (-q / 2.0 + d).cbrt();
        let v = (-q / 2.0 - d).cbrt();
        vec![u + v + shift]
    }
}

/// Real and imaginary Neron periods by AGM; error tracked via context size.
pub fn periods(e: &CurveModel, digits: u32) -> Result<PeriodData, AnalyticError> {
    let ctx = RealCtx::for_digits(digits, 16);
    let b = binvs_i128(&e.a);
    let rect = e.disc.is_positive();
    let pi = ctx.pi();
    let (omega_re, omega_im) = if rect {
        let roots = cubic_roots_f64(b);
        if roots.len() != 3 {
            return Err(AnalyticError::PrecisionUnreachable(
                "discriminant sign inconsistent with root count".into(),
            ));
        }
        let e3 = refine_root(&ctx, b, roots[0]);
        let e2 = refine_root(&ctx, b, roots[1]);
        let e1 = refine_root(&ctx, b, roots[2]);
        let s13 = ctx.sqrt(&(&e1 - &e3));
        let s12 = ctx.sqrt(&(&e1 - &e2));
        let s23 = ctx.sqrt(&(&e2 - &e3));
        (
            ctx.div(&pi, &ctx.agm(&s13, &s12)),
            ctx.div(&pi, &ctx.agm(&s13, &s23)),
        )
    } else {
        let roots = cubic_roots_f64(b);
        let e1 = refine_root(&ctx, b, roots[0]);
        // quadratic cofactor: 4x^3+... = 4(x - e1)(x^2 + beta x + gamma)
        // sum of all roots = -b2/4 => P = (-b2/4 - e1)/2; product = -b6/4
        let pp = {
            let t = ctx.from_ratio(&BigInt::from(-b.0), &BigInt::from(4)) - &e1;
            ctx.half(&t)
        };
        // |z|^2 = (-b6/4) / e1 ... careful with e1 = 0
        let z_norm2 = if e1.is_zero() {
            ctx.from_ratio(&BigInt::from(-b.2), &BigInt::from(4))
        } else {
            ctx.div(&ctx.from_ratio(&BigInt::from(-b.2), &BigInt::from(4)), &e1)
        };
        let q2 = &z_norm2 - ctx.mul(&pp, &pp);
        if q2.is_negative() {
            return Err(AnalyticError::PrecisionUnreachable(
                "complex root pair collapsed".into(),
            ));
        }
        let diff = &e1 - &pp; // e1 - P
        let a_len = ctx.sqrt(&(ctx.mul(&diff, &diff) + q2));
        let sa = ctx.sqrt(&a_len);
        let re_arg = ctx.sqrt(&ctx.half(&(&a_len + &diff)));
        let im_arg = ctx.sqrt(&ctx.half(&(&a_len - &diff)));
        (
            ctx.div(&pi, &ctx.agm(&re_arg, &sa)),
            ctx.div(&pi, &ctx.agm(&im_arg, &sa)),
        )
    };
    let err = 2f64.powi(-(ctx.bits as i32 - 12));
    Ok(PeriodData {
        omega_re,
        omega_im,
        lattice: if rect {
            LatticeType::Rectangular
        } else {
            LatticeType::Rhombic
        },
        ctx,
        err,
    })
}

/// Root number epsilon from the functional equation of f: the sum
/// F(y) = sum a_n e^{-2 pi n y / sqrt(N)} satisfies F(1/y) = eps y^2 F(y).
pub fn root_number(e: &CurveModel, aps: &ApTable, ctx: &RealCtx) -> Result<i8, AnalyticError> {
    let sqrt_n = ctx.sqrt(&ctx.from_i64(e.conductor as i64));
    for y_num in [11i64, 13, 17] {
        let y = ctx.from_ratio(&BigInt::from(y_num), &BigInt::from(10));
        let f_y = f_sum(aps, ctx, &sqrt_n, &y);
        let inv_y = ctx.div(&ctx.one(), &y);
        let f_inv = f_sum(aps, ctx, &sqrt_n, &inv_y);
        let y2 = ctx.mul(&y, &y);
        let denom = ctx.mul(&y2, &f_y);
        if ctx.to_f64(&denom).abs() < 1e-10 {
            continue;
        }
        let ratio = ctx.to_f64(&ctx.div(&f_inv, &denom));
        if (ratio - 1.0).abs() < 1e-6 {
            return Ok(1);
        }
        if (ratio + 1.0).abs() < 1e-6 {
            return Ok(-1);
        }
        return Err(AnalyticError::RootNumberAmbiguous(ratio));
    }
    Err(AnalyticError::RootNumberAmbiguous(f64::NAN))
}

fn f_sum(aps: &ApTable, ctx: &RealCtx, sqrt_n: &Fx, y: &Fx) -> Fx {
    // r = exp(-2 pi y / sqrt N), terms a_n r^n while meaningful
    let pi = ctx.pi();
    let expo = ctx.div(&ctx.mul(&(&pi << 1), y), sqrt_n);
    let r = ctx.exp(&-&expo);
    let mut rn = r.clone();
    let mut sum = Fx::zero();
    let rf = ctx.to_f64(&r);
    let max_n = ((ctx.bits as f64) * std::f64::consts::LN_2 / -rf.ln()).ceil() as usize + 8;
    for n in 1..=max_n.min(aps.bound) {
        let a = aps.a(n);
        if a != 0 {
            sum += &rn * BigInt::from(a);
        }
        rn = ctx.mul(&rn, &r);
    }
    sum
}

pub struct LValue {
    pub value: Cx,
    /// rigorous bound on |computed - true|
    pub err: f64,
    pub terms: usize,
}

/// L(E, chi, 1) for primitive chi with gcd(cond(chi), N) = 1, by the
/// exponentially convergent symmetrised series
///   L = sum_n (a_n / n)(chi(n) + eps_chi chibar(n)) e^{-2 pi n / (c sqrt N)},
/// where eps_chi = eps(E) chi(N) tau(chi)^2 / c.
pub fn twisted_l_value(
    e: &CurveModel,
    chi: &DirichletCharacter,
    aps: &ApTable,
    eps: i8,
    ctx: &RealCtx,
) -> Result<LValue, AnalyticError> {
    let c = chi.conductor;
    assert!(chi.is_primitive(), "twisted_l_value needs a primitive character");
    assert_eq!(num_integer::gcd(c, e.conductor), 1);
    let pi = ctx.pi();
    // A = c sqrt(N)
    let a_param = ctx.sqrt(&ctx.from_i64((c * c * e.conductor) as i64));
    let r = ctx.exp(&-&ctx.div(&(&pi << 1), &a_param));
    let rf = ctx.to_f64(&r);
    // choose M so that 4 (M+1)^2 r^(M+1) / (1-r)^3 < 2^-(bits/2)
    let target = -((ctx.bits / 2) as f64) * std::f64::consts::LN_2;
    let mut m_terms = 64usize;
    for _ in 0..30 {
        let lhs = (4.0f64).ln() + 2.0 * ((m_terms + 1) as f64).ln()
            + ((m_terms + 1) as f64) * rf.ln()
            - 3.0 * (1.0 - rf).ln();
        if lhs < target {
            break;
        }
        m_terms = m_terms * 3 / 2 + 16;
    }
    if m_terms > aps.bound {
        return Err(AnalyticError::ConductorTooLarge(c));
    }
    // eps_chi = eps chi(N) tau(chi)^2 / c
    let tau = gauss_sum_complex(chi, ctx).map_err(|_| AnalyticError::ConductorTooLarge(c))?;
    let tau2 = tau.mul(&tau, ctx);
    let chi_n = unit_value(chi, e.conductor as i64, ctx);
    let mut eps_chi = tau2.mul(&chi_n, ctx);
    eps_chi = Cx {
        re: ctx.div(&eps_chi.re, &ctx.from_i64(c as i64)),
        im: ctx.div(&eps_chi.im, &ctx.from_i64(c as i64)),
    };
    if eps < 0 {
        eps_chi = Cx {
            re: -eps_chi.re,
            im: -eps_chi.im,
        };
    }
    // roots-of-unity table for chi values
    let ord = chi.order;
    let table: Vec<Cx> = (0..ord)
        .map(|j| {
            let ang = ctx.div(
                &ctx.mul(&(&pi << 1), &ctx.from_i64(j as i64)),
                &ctx.from_i64(ord as i64),
            );
            let (cc, ss) = ctx.sincos(&ang);
            Cx { re: cc, im: ss }
        })
        .collect();
    let mut rn = r.clone();
    let mut acc = Cx::zero();
    for n in 1..=m_terms {
        let a = aps.a(n);
        if a != 0 {
            if let Some(eexp) = chi.raw_exponent(n as u64) {
                let chi_v = &table[eexp as usize];
                let chibar_v = table[((ord - eexp) % ord) as usize].clone();
                let combo = chi_v.add(&eps_chi.mul(&chibar_v, ctx));
                let coef = ctx.from_ratio(&BigInt::from(a), &BigInt::from(n as i64));
                let term = combo.mul(&Cx::real(ctx.mul(&coef, &rn)), ctx);
                acc = acc.add(&term);
            }
        }
        rn = ctx.mul(&rn, &r);
    }
    let tail = 4.0 * ((m_terms + 1) as f64).powi(2) * rf.powi(m_terms as i32 + 1)
        / (1.0 - rf).powi(3);
    Ok(LValue {
        value: acc,
        err: tail + 2f64.powi(-(ctx.bits as i32 / 2)),
        terms: m_terms,
    })
}

fn unit_value(chi: &DirichletCharacter, a: i64, ctx: &RealCtx) -> Cx {
    let e = chi.raw_exponent(a.rem_euclid(chi.modulus as i64) as u64);
    let pi = ctx.pi();
    match e {
        None => Cx::zero(),
        Some(e) => {
            let ang = ctx.div(
                &ctx.mul(&(&pi << 1), &ctx.from_i64(e as i64)),
                &ctx.from_i64(chi.order as i64),
            );
            let (cc, ss) = ctx.sincos(&ang);
            Cx { re: cc, im: ss }
        }
    }
}

/// Rational reconstruction of an analytic ratio; denominator cap per config.
pub fn reconstruct_ratio(
    ctx: &RealCtx,
    value: &Fx,
    max_den: u64,
) -> Option<BigRational> {
    ctx.reconstruct_rational(value, max_den)
}


/// Result of the Birch cross-check for one character.
pub struct BirchCheck {
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub exact_abs: f64,
    pub analytic_abs: f64,
}

/// Compare the exact sum sum_a chibar(a) [a/c]^{chi(-1)} (embedded into C by
/// zeta_d -> e^{2 pi i/d}) with tau(chibar)^{-1} L(E, chi, 1) / Omega^{chi(-1)}.
pub fn birch_consistency(
    e: &CurveModel,
    chi: &DirichletCharacter,
    ev: &crate::modsym::evaluator::SymbolEvaluator,
    aps: &ApTable,
    eps: i8,
    pd: &PeriodData,
    digits: u32,
) -> Result<BirchCheck, AnalyticError> {
    assert!(chi.is_primitive());
    let ctx = pd.ctx;
    let c = chi.modulus.max(1);
    let ord = chi.order;
    // exact side: accumulate rational coefficients per exponent of zeta_ord
    let mut coeffs = vec![num_rational::BigRational::from(BigInt::from(0)); ord as usize];
    let sign = chi.parity;
    for a in 0..c {
        if c > 1 && num_integer::gcd(a, c) != 1 {
            continue;
        }
        let Some(eexp) = chi.raw_exponent(a) else { continue };
        let bar = ((ord - eexp) % ord) as usize;
        coeffs[bar] += ev.evaluate(a as i64, c as i64, sign);
    }
    let pi = ctx.pi();
    let mut exact = Cx::zero();
    for (j, q) in coeffs.iter().enumerate() {
        if q.numer().is_zero() {
            continue;
        }
        let ang = ctx.div(
            &ctx.mul(&(&pi << 1), &ctx.from_i64(j as i64)),
            &ctx.from_i64(ord as i64),
        );
        let (cc, ss) = ctx.sincos(&ang);
        let v = ctx.from_rational(q);
        exact = exact.add(&Cx {
            re: ctx.mul(&cc, &v),
            im: ctx.mul(&ss, &v),
        });
    }
    // analytic side, from the classical Birch formula
    // L(E, chi, 1) = (tau(chi)/c) sum_a chibar(a) lambda(a/c):
    // the exact sum equals c L / (tau(chi) Omega^{chi(-1)})
    let lv = twisted_l_value(e, chi, aps, eps, &ctx)?;
    let tau = crate::chars::gauss_sum_complex(chi, &ctx)
        .map_err(|_| AnalyticError::ConductorTooLarge(c))?;
    let omega = if sign > 0 {
        Cx::real(pd.omega_re.clone())
    } else {
        Cx {
            re: num_bigint::BigInt::from(0),
            im: pd.omega_im.clone(),
        }
    };
    let denom = tau.mul(&omega, &ctx);
    let analytic = lv.value.scale_int(&BigInt::from(c)).div(&denom, &ctx);
    let diff = exact.sub(&analytic);
    let residual = ctx.to_f64(&diff.abs(&ctx));
    let tolerance = 10f64.powi(-((digits / 2) as i32));
    Ok(BirchCheck {
        residual,
        tolerance,
        pass: residual < tolerance,
        exact_abs: ctx.to_f64(&exact.abs(&ctx)),
        analytic_abs: ctx.to_f64(&analytic.abs(&ctx)),
    })
}
