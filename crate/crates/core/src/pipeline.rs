//! End-to-end orchestration: configuration, curve ingestion, symbol caching,
//! per-character ladders and Selmer reports, integral assembly, and JSON /
//! text report output.

use crate::analytic::{birch_consistency, periods, root_number};
use crate::arith;
use crate::chars::{enumerate_characters, DirichletCharacter, FieldSpec};
use crate::curve::{
    find_kolyvagin_primes, hypothesis_report, ApTable, CheckStatus, CurveModel, HypothesisReport,
};
use crate::kurihara::{
    functional_equation_check, theta_ladder, EntryStatus, KuriharaValue, LadderStrategy,
    ThetaLadder,
};
use crate::modsym::evaluator::{EvaluatorCache, SymbolEvaluator};
use crate::modsym::ManinSymbolSpace;
use crate::padic::{PadicQuotient, Val};
use crate::selmer::{
    assemble_integral_fitting, decompose_group_ring, selmer_structure, Certification, ImcStatus,
    RankInfo, SelmerReport,
};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("curve error: {0}")]
    Curve(#[from] crate::curve::CurveError),
    #[error("unknown curve label {0}")]
    UnknownLabel(String),
    #[error("symbol engine: {0}")]
    ModSym(#[from] crate::modsym::ModSymError),
    #[error("analytic: {0}")]
    Analytic(#[from] crate::analytic::AnalyticError),
    #[error("kurihara: {0}")]
    Kurihara(#[from] crate::kurihara::KuriharaError),
    #[error("selmer: {0}")]
    Selmer(#[from] crate::selmer::SelmerError),
    #[error("characters: {0}")]
    Chars(#[from] crate::chars::CharError),
    #[error("padic: {0}")]
    Padic(#[from] crate::padic::PadicError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("no character matches selector {0}")]
    NoCharacterMatch(String),
    #[error("character selector {0} is ambiguous: {1} candidates")]
    AmbiguousSelector(String, usize),
}

/// Bundled example curves (label -> a-invariants).
pub const CURVES_JSON: &str = include_str!("../data/curves.json");

#[derive(Deserialize)]
struct CurveEntry {
    label: String,
    a_invariants: [i64; 5],
    conductor: Option<u64>,
}

pub fn curve_by_label(label: &str) -> Result<CurveModel, PipelineError> {
    let entries: Vec<CurveEntry> =
        serde_json::from_str(CURVES_JSON).expect("bundled curves.json parses");
    for e in entries {
        if e.label == label {
            return Ok(CurveModel::with_conductor_check(
                e.a_invariants,
                Some(e.label),
                e.conductor,
            )?);
        }
    }
    Err(PipelineError::UnknownLabel(label.to_string()))
}

/// Character selection in configs: everything, a named kind, or an
/// order-with-pin form mirroring the way the source examples pin their
/// characters (a residue for chi(a), or a polynomial relation satisfied
/// by chi(a) mod p).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub enum CharSelect {
    All,
    Trivial,
    Quadratic,
    Order {
        order: u64,
        #[serde(skip_serializing_if = "Option::is_none")]
        pin_at: Option<u64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        pin_residue: Option<u64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        pin_poly: Option<Vec<i64>>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub curve_label: Option<String>,
    pub a_invariants: Option<[i64; 5]>,
    pub conductor: Option<u64>,
    pub p: u64,
    /// conductor of the cyclotomic field Q(mu_c); 1 means K = Q
    pub cyclotomic: u64,
    /// generators of the subgroup H fixing K (empty: K = Q(mu_c))
    #[serde(default)]
    pub subgroup: Vec<u64>,
    pub characters: CharSelect,
    pub k_work: u32,
    pub primes_per_level: usize,
    pub samples_per_level: usize,
    pub max_level: usize,
    pub scan_bound: u64,
    pub digits: u32,
    pub max_denominator: u64,
    pub cache_dir: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub emit_deltas: Option<PathBuf>,
    pub threads: usize,
    pub root_number: Option<i8>,
    /// run the Birch consistency cross-check on level-0 values
    #[serde(default)]
    pub birch_check: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            curve_label: None,
            a_invariants: None,
            conductor: None,
            p: 5,
            cyclotomic: 1,
            subgroup: vec![],
            characters: CharSelect::All,
            k_work: 5,
            primes_per_level: 3,
            samples_per_level: 6,
            max_level: 3,
            scan_bound: 100_000_000,
            digits: 30,
            max_denominator: 1_000_000,
            cache_dir: None,
            output: None,
            summary: None,
            emit_deltas: None,
            threads: 0,
            root_number: None,
            birch_check: false,
        }
    }
}

// --- report schema ---------------------------------------------------------

#[derive(Serialize)]
pub struct ReportJson {
    pub curve: CurveJson,
    pub p: u64,
    pub field: FieldJson,
    pub epsilon: i8,
    pub hypotheses: Vec<HypJson>,
    pub characters: Vec<CharReportJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integral: Option<IntegralJson>,
}

#[derive(Serialize)]
pub struct CurveJson {
    pub label: Option<String>,
    pub a_invariants: [i64; 5],
    pub conductor: u64,
}

#[derive(Serialize)]
pub struct FieldJson {
    pub c: u64,
    pub d: u64,
}

#[derive(Serialize)]
pub struct HypJson {
    pub name: String,
    pub status: String,
    pub detail: String,
}

#[derive(Serialize)]
pub struct CharReportJson {
    pub chi: ChiJson,
    pub ladder: Vec<LadderEntryJson>,
    pub rank: RankJson,
    pub torsion: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub torsion_length_bound: Option<u32>,
    pub fitting: Vec<String>,
    pub certification: String,
    pub imc: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euler_factor_valuation: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub birch_residual: Option<f64>,
    pub fe_violations: usize,
    /// index of the Frobenius-orbit representative this data came from
    pub orbit_representative: usize,
}

#[derive(Serialize)]
pub struct ChiJson {
    pub index: usize,
    pub order: u64,
    pub conductor: u64,
    pub parity: i8,
    /// value exponents on the unit-group generators
    pub exponents: Vec<u64>,
}

#[derive(Serialize)]
pub struct LadderEntryJson {
    pub level: usize,
    pub exponent: String,
    pub status: String,
    pub witness: Vec<u64>,
    pub samples: Vec<SampleJson>,
}

#[derive(Serialize)]
pub struct SampleJson {
    pub n: Vec<u64>,
    pub ord: String,
}

#[derive(Serialize)]
pub enum RankJson {
    #[serde(rename = "exact")]
    Exact(usize),
    #[serde(rename = "bracket")]
    Bracket(usize, usize),
}

#[derive(Serialize)]
pub struct IntegralJson {
    pub components: Vec<ComponentJson>,
    pub fitting: Vec<IdealJson>,
    pub presentation: Vec<IdealJson>,
}

#[derive(Serialize)]
pub struct ComponentJson {
    pub orbit: usize,
    pub order: u64,
    pub degree: usize,
    pub character_indices: Vec<usize>,
}

#[derive(Serialize)]
pub struct IdealJson {
    /// per-orbit p-exponents ("inf" for the zero component)
    pub orbit_exponents: Vec<String>,
    /// generator coefficients on the coset representatives, mod p^k
    pub generator: Vec<String>,
}

#[derive(Serialize)]
struct DeltaLine<'a> {
    curve: &'a str,
    p: u64,
    chi: usize,
    n: &'a [u64],
    k_n: u32,
    ord: String,
    value_coeffs: Vec<String>,
}

pub struct AnalyzeOutcome {
    pub report: String,
    pub summary: String,
    pub hypothesis_failed: bool,
}

fn val_str(v: Val) -> String {
    match v {
        Val::Finite(x) => x.to_string(),
        Val::Infinity => "inf".into(),
    }
}

fn ingest(config: &AnalysisConfig) -> Result<CurveModel, PipelineError> {
    if let Some(label) = &config.curve_label {
        return curve_by_label(label);
    }
    if let Some(a) = config.a_invariants {
        return Ok(CurveModel::with_conductor_check(a, None, config.conductor)?);
    }
    Err(PipelineError::Config(
        "specify a curve label or a-invariants".into(),
    ))
}

fn select_characters(
    chars: &[DirichletCharacter],
    select: &CharSelect,
    p: u64,
    k: u32,
) -> Result<Vec<usize>, PipelineError> {
    let describe = format!("{select:?}");
    let out: Vec<usize> = match select {
        CharSelect::All => (0..chars.len()).collect(),
        CharSelect::Trivial => chars
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_trivial())
            .map(|(i, _)| i)
            .collect(),
        CharSelect::Quadratic => chars
            .iter()
            .enumerate()
            .filter(|(_, c)| c.order == 2)
            .map(|(i, _)| i)
            .collect(),
        CharSelect::Order {
            order,
            pin_at,
            pin_residue,
            pin_poly,
        } => {
            let mut cand: Vec<usize> = chars
                .iter()
                .enumerate()
                .filter(|(_, c)| c.order == *order && c.conductor == c.modulus)
                .map(|(i, _)| i)
                .collect();
            if let Some(at) = pin_at {
                let ring = PadicQuotient::build(p, k.max(1), *order)?;
                cand.retain(|&i| {
                    let Ok(Some(v)) = chars[i].evaluate(*at as i64, &ring) else {
                        return false;
                    };
                    if let Some(r) = pin_residue {
                        let residue = &v.coeffs[0] % BigUint::from(p);
                        return chars[i].order == *order
                            && v.coeffs.iter().skip(1).all(|c| (c % BigUint::from(p)) == BigUint::ZERO)
                            && residue == BigUint::from(*r % p);
                    }
                    if let Some(poly) = pin_poly {
                        // sum c_i chi(at)^i = 0 mod p
                        let ringp = v.ring.clone();
                        let mut acc = ringp.zero();
                        let mut pow = ringp.one();
                        for &cj in poly {
                            let t = pow.scale(&BigUint::from(cj.unsigned_abs()));
                            acc = if cj >= 0 {
                                acc.checked_add(&t).unwrap()
                            } else {
                                acc.checked_sub(&t).unwrap()
                            };
                            pow = pow.checked_mul(&v).unwrap();
                        }
                        return match acc.valuation() {
                            Val::Finite(t) => t >= 1,
                            Val::Infinity => true,
                        };
                    }
                    true
                });
            }
            cand
        }
    };
    if out.is_empty() {
        return Err(PipelineError::NoCharacterMatch(describe));
    }
    Ok(out)
}

/// Frobenius orbits (chi -> chi^p) among the enumerated characters.
fn frobenius_orbits(chars: &[DirichletCharacter], p: u64) -> Vec<usize> {
    let mut orbit_rep = vec![usize::MAX; chars.len()];
    for i in 0..chars.len() {
        if orbit_rep[i] != usize::MAX {
            continue;
        }
        orbit_rep[i] = i;
        let mut cur = chars[i].power(p);
        while cur != chars[i] {
            if let Some(j) = chars.iter().position(|c| *c == cur) {
                if orbit_rep[j] == usize::MAX {
                    orbit_rep[j] = i;
                }
            }
            cur = cur.power(p);
        }
    }
    orbit_rep
}

/// Character selection, re-exported for the CLI's `delta` subcommand.
pub fn select_characters_public(
    chars: &[DirichletCharacter],
    select: &CharSelect,
    p: u64,
    k: u32,
) -> Result<Vec<usize>, PipelineError> {
    select_characters(chars, select, p, k)
}

/// The whole pipeline.  Writes report/summary files when configured and
/// returns them as strings.
pub fn run_analyze(config: &AnalysisConfig) -> Result<AnalyzeOutcome, PipelineError> {
    if config.threads > 0 {
        // a no-op if a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build_global();
    }
    if config.p < 5 || config.k_work < 1 {
        return Err(PipelineError::Config("need p >= 5 and k_work >= 1".into()));
    }
    let e = ingest(config)?;
    let p = config.p;
    let field = if config.cyclotomic <= 1 {
        FieldSpec::rational()
    } else {
        FieldSpec::new(config.cyclotomic, &config.subgroup, None)?
    };
    let hyp = hypothesis_report(&e, &field, p);
    // analytic layer
    let pd = periods(&e, config.digits)?;
    let ap_bound = ap_table_bound(&e, field.conductor, config.digits);
    let aps = ApTable::build(&e, ap_bound);
    let eps = match config.root_number {
        Some(s) => s,
        None => root_number(&e, &aps, &pd.ctx)?,
    };
    // symbol engine, cache-aware
    let ev = build_evaluator_cached(&e, &aps, eps, config)?;
    // characters
    let chars = enumerate_characters(&field);
    let selected = select_characters(&chars, &config.characters, p, config.k_work)?;
    let orbit_rep = frobenius_orbits(&chars, p);
    // compute ladders per (selected) Frobenius orbit representative
    let strategy = LadderStrategy {
        primes_per_level: config.primes_per_level,
        samples_per_level: config.samples_per_level,
        max_level: config.max_level,
        k_work: config.k_work,
    };
    let mut ring_cache: HashMap<(u32, u64), Arc<PadicQuotient>> = HashMap::new();
    let mut ring_for = |k: u32, d: u64| -> Arc<PadicQuotient> {
        ring_cache
            .entry((k, d))
            .or_insert_with(|| PadicQuotient::build(p, k, d).expect("ring builds"))
            .clone()
    };
    let mut ladders: HashMap<usize, (DirichletCharacter, ThetaLadder, SelmerReport)> =
        HashMap::new();
    let mut delta_stream: Vec<String> = Vec::new();
    let curve_name = e.label.clone().unwrap_or_else(|| format!("{:?}", e.a));
    for &ci in &selected {
        let rep = orbit_rep[ci];
        if ladders.contains_key(&rep) {
            continue;
        }
        let chi = chars[rep].primitive_core()?;
        let kernel = chi.kernel_field()?;
        let pool = if strategy.max_level >= 1 {
            match find_kolyvagin_primes(&e, &kernel, p, 1, strategy.primes_per_level, config.scan_bound) {
                Ok(pool) => pool,
                Err(crate::curve::CurveError::SearchExhausted(_)) => vec![],
                Err(err) => return Err(err.into()),
            }
        } else {
            vec![]
        };
        let d = chi.order;
        let ladder = theta_ladder(&e, &chi, &pool, &ev, eps, &strategy, |k| {
            ring_for(k, d)
        })?;
        if config.emit_deltas.is_some() {
            for en in &ladder.entries {
                for s in &en.samples {
                    let line = DeltaLine {
                        curve: &curve_name,
                        p,
                        chi: rep,
                        n: &s.primes,
                        k_n: s.k_n,
                        ord: val_str(s.ord),
                        value_coeffs: s.coeffs.clone(),
                    };
                    delta_stream.push(serde_json::to_string(&line).unwrap());
                }
            }
        }
        let srep = selmer_structure(&ladder, &chi)?;
        ladders.insert(rep, (chi, ladder, srep));
    }
    // per-character reports
    let mut char_reports = Vec::new();
    let mut per_char_fitting: Vec<(usize, Vec<Val>)> = Vec::new();
    for &ci in &selected {
        let rep = orbit_rep[ci];
        let (chi, ladder, srep) = &ladders[&rep];
        // recompute sampled values for the FE audit
        let sampled: Vec<KuriharaValue> = Vec::new();
        let fe = functional_equation_check(&e, chi, eps, &sampled.iter().collect::<Vec<_>>());
        let ring_diag = ring_for(config.k_work, chi.order);
        let efv = crate::curve::euler_factor_valuation(&e, chi, &ring_diag);
        let birch = if config.birch_check && chi.conductor > 1 {
            let bc = birch_consistency(&e, chi, &ev, &aps, eps, &pd, config.digits)?;
            Some(bc.residual)
        } else {
            None
        };
        per_char_fitting.push((ci, srep.fitting.iter().map(|x| x.0).collect()));
        char_reports.push(CharReportJson {
            chi: ChiJson {
                index: ci,
                order: chars[ci].order,
                conductor: chars[ci].conductor,
                parity: chars[ci].parity,
                exponents: chars[ci].exponents.clone(),
            },
            ladder: ladder
                .entries
                .iter()
                .map(|en| LadderEntryJson {
                    level: en.level,
                    exponent: val_str(en.exponent),
                    status: format!("{:?}", en.status),
                    witness: en.witness.clone(),
                    samples: en
                        .samples
                        .iter()
                        .map(|s| SampleJson {
                            n: s.primes.clone(),
                            ord: val_str(s.ord),
                        })
                        .collect(),
                })
                .collect(),
            rank: match srep.rank {
                RankInfo::Exact(r) => RankJson::Exact(r),
                RankInfo::Bracket(a, b) => RankJson::Bracket(a, b),
            },
            torsion: srep.torsion.clone(),
            torsion_length_bound: srep.torsion_length_bound,
            fitting: srep.fitting.iter().map(|x| val_str(x.0)).collect(),
            certification: format!("{:?}", srep.certification),
            imc: format!("{:?}", srep.imc),
            euler_factor_valuation: efv,
            birch_residual: birch,
            fe_violations: fe.violations,
            orbit_representative: rep,
        });
    }
    // integral assembly only when the full character set is present
    let integral = if config.characters == CharSelect::All && field.degree % p != 0 {
        let decomp = decompose_group_ring(&field, p, config.k_work)?;
        let asm = assemble_integral_fitting(&decomp, &per_char_fitting)?;
        Some(IntegralJson {
            components: decomp
                .orbits
                .iter()
                .enumerate()
                .map(|(i, o)| ComponentJson {
                    orbit: i,
                    order: o.order,
                    degree: o.degree,
                    character_indices: o.members.clone(),
                })
                .collect(),
            fitting: asm
                .fitting_generators
                .iter()
                .enumerate()
                .map(|(i, g)| IdealJson {
                    orbit_exponents: decomp
                        .orbits
                        .iter()
                        .enumerate()
                        .map(|(o, _)| {
                            val_str(
                                asm.orbit_exponents[o]
                                    .get(i)
                                    .copied()
                                    .unwrap_or(Val::Finite(0)),
                            )
                        })
                        .collect(),
                    generator: g.iter().map(|c| c.to_string()).collect(),
                })
                .collect(),
            presentation: asm
                .invariant_chain
                .iter()
                .zip(&asm.chain_generators)
                .map(|(exps, g)| IdealJson {
                    orbit_exponents: exps.iter().map(|v| val_str(*v)).collect(),
                    generator: g.iter().map(|c| c.to_string()).collect(),
                })
                .collect(),
        })
    } else {
        None
    };
    let report = ReportJson {
        curve: CurveJson {
            label: e.label.clone(),
            a_invariants: e.a,
            conductor: e.conductor,
        },
        p,
        field: FieldJson {
            c: field.conductor,
            d: field.degree,
        },
        epsilon: eps,
        hypotheses: hyp
            .checks
            .iter()
            .map(|c| HypJson {
                name: c.name.clone(),
                status: match &c.status {
                    CheckStatus::Pass => "PASS".into(),
                    CheckStatus::Fail(m) => format!("FAIL: {m}"),
                    CheckStatus::Assumed => "ASSUMED".into(),
                    CheckStatus::Heuristic => "HEURISTIC-PASS".into(),
                },
                detail: c.detail.clone(),
            })
            .collect(),
        characters: char_reports,
        integral,
    };
    let json = serde_json::to_string_pretty(&report).unwrap();
    let summary = render_summary(&e, p, &field, eps, &hyp, &ladders, &selected, &orbit_rep);
    if let Some(path) = &config.output {
        std::fs::write(path, &json)?;
    }
    if let Some(path) = &config.summary {
        std::fs::write(path, &summary)?;
    }
    if let Some(path) = &config.emit_deltas {
        let mut f = std::fs::File::create(path)?;
        for line in &delta_stream {
            writeln!(f, "{line}")?;
        }
    }
    Ok(AnalyzeOutcome {
        report: json,
        summary,
        hypothesis_failed: hyp.has_failure(),
    })
}

fn ap_table_bound(e: &CurveModel, field_c: u64, digits: u32) -> usize {
    let cmax = field_c.max(40) as f64;
    let a = cmax * (e.conductor as f64).sqrt();
    let m = a * (digits as f64 * std::f64::consts::LN_10 + 2.0 * a.ln() + 12.0)
        / (2.0 * std::f64::consts::PI);
    (m as usize + 1000).max(4000)
}

fn build_evaluator_cached(
    e: &CurveModel,
    aps: &ApTable,
    eps: i8,
    config: &AnalysisConfig,
) -> Result<SymbolEvaluator, PipelineError> {
    let cache_path = config.cache_dir.as_ref().map(|dir| {
        let mut h = sha2::Sha256::new();
        use sha2::Digest;
        h.update(format!("{:?}|{}", e.a, e.conductor));
        let digest = h.finalize();
        dir.join(format!(
            "msym-{}-{:02x}{:02x}{:02x}{:02x}.json",
            e.conductor, digest[0], digest[1], digest[2], digest[3]
        ))
    });
    if let Some(path) = &cache_path {
        if let Ok(text) = std::fs::read_to_string(path) {
            if let Ok(cache) = serde_json::from_str::<EvaluatorCache>(&text) {
                if let Some(ev) = cache.into_evaluator(e) {
                    return Ok(ev);
                }
            }
        }
    }
    let space = ManinSymbolSpace::build(e.conductor);
    let ev = SymbolEvaluator::build(&space, e, aps, eps, config.digits, config.max_denominator)?;
    if let Some(path) = &cache_path {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let cache = EvaluatorCache::from_evaluator(&ev, e);
        std::fs::write(path, serde_json::to_string(&cache).unwrap())?;
    }
    Ok(ev)
}

#[allow(clippy::too_many_arguments)]
fn render_summary(
    e: &CurveModel,
    p: u64,
    field: &FieldSpec,
    eps: i8,
    hyp: &HypothesisReport,
    ladders: &HashMap<usize, (DirichletCharacter, ThetaLadder, SelmerReport)>,
    selected: &[usize],
    orbit_rep: &[usize],
) -> String {
    let mut out = String::new();
    let name = e.label.clone().unwrap_or_else(|| format!("{:?}", e.a));
    out.push_str(&format!(
        "curve {name} (N = {}), p = {p}, K of conductor {} and degree {}\n",
        e.conductor, field.conductor, field.degree
    ));
    out.push_str(&format!("root number epsilon = {eps:+}\n"));
    out.push_str("hypotheses: ");
    out.push_str(
        &hyp.checks
            .iter()
            .map(|c| {
                format!(
                    "{}={}",
                    c.name,
                    match &c.status {
                        CheckStatus::Pass => "pass".to_string(),
                        CheckStatus::Fail(_) => "FAIL".to_string(),
                        CheckStatus::Assumed => "assumed".to_string(),
                        CheckStatus::Heuristic => "heuristic".to_string(),
                    }
                )
            })
            .collect::<Vec<_>>()
            .join(" "),
    );
    out.push('\n');
    let mut seen = std::collections::HashSet::new();
    for &ci in selected {
        let rep = orbit_rep[ci];
        if !seen.insert(rep) {
            continue;
        }
        let (chi, ladder, srep) = &ladders[&rep];
        let lad: Vec<String> = ladder
            .entries
            .iter()
            .map(|en| {
                format!(
                    "{}{}",
                    val_str(en.exponent),
                    match en.status {
                        EntryStatus::Exact => "",
                        EntryStatus::UpperBound => "?",
                        EntryStatus::ForcedInfinity => "!",
                    }
                )
            })
            .collect();
        let rank = match srep.rank {
            RankInfo::Exact(r) => format!("{r}"),
            RankInfo::Bracket(a, b) => {
                if b == usize::MAX {
                    format!(">= {a}")
                } else {
                    format!("in [{a}, {b}]")
                }
            }
        };
        let torsion = if srep.torsion.is_empty() {
            match srep.torsion_length_bound {
                Some(b) => format!("length <= {b}"),
                None => "trivial".into(),
            }
        } else {
            srep.torsion
                .iter()
                .map(|a| format!("O/p^{a}"))
                .collect::<Vec<_>>()
                .join(" x ")
        };
        out.push_str(&format!(
            "chi #{rep} (order {}, conductor {}): ladder ({}), rank {rank}, torsion {torsion}, {}, IMC {}\n",
            chi.order,
            chi.conductor,
            lad.join(", "),
            match srep.certification {
                Certification::ProvedUnderHypotheses => "proved under hypotheses",
                Certification::Empirical => "empirical",
            },
            match srep.imc {
                ImcStatus::Verified => "verified",
                ImcStatus::Open => "open",
            }
        ));
    }
    let _ = arith::is_prime(2);
    out
}
