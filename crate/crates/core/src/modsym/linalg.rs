//! Sparse exact linear algebra over Q used by the Manin-relation quotient:
//! elimination of a sparse relation matrix with fill-in-aware pivoting, and
//! dense kernel computation for the (small) eigenspace cuts.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};

pub type SparseRow = BTreeMap<u32, BigRational>;

/// Eliminate `rows` (relations = 0) on `nvars` variables.  Returns
/// (free variable list, expression of every variable over the free ones).
pub fn eliminate(nvars: usize, rows: Vec<SparseRow>) -> (Vec<u32>, Vec<SparseRow>) {
    // working copy; drop empties
    let mut rows: Vec<SparseRow> = rows.into_iter().filter(|r| !r.is_empty()).collect();
    // pivot bookkeeping: var -> solved expression (var = sum of others)
    let mut solved: HashMap<u32, SparseRow> = HashMap::new();
    // occurrence count per column for pivot choice
    loop {
        // pick the shortest row
        rows.retain(|r| !r.is_empty());
        if rows.is_empty() {
            break;
        }
        let (idx, _) = rows
            .iter()
            .enumerate()
            .min_by_key(|(_, r)| r.len())
            .unwrap();
        let row = rows.swap_remove(idx);
        // pivot on the entry whose column occurs least often elsewhere
        let mut col_count: HashMap<u32, usize> = HashMap::new();
        for r in &rows {
            for (&c, _) in r.iter() {
                if row.contains_key(&c) {
                    *col_count.entry(c).or_insert(0) += 1;
                }
            }
        }
        let (&pivot, pval) = row
            .iter()
            .min_by_key(|(c, _)| col_count.get(c).copied().unwrap_or(0))
            .unwrap();
        // var_pivot = -(row - pivot term)/pval
        let inv = -pval.recip();
        let mut expr: SparseRow = BTreeMap::new();
        for (&c, v) in row.iter() {
            if c != pivot {
                expr.insert(c, v * &inv);
            }
        }
        // substitute into remaining rows
        for r in rows.iter_mut() {
            if let Some(coef) = r.remove(&pivot) {
                for (&c, v) in expr.iter() {
                    let e = r.entry(c).or_insert_with(BigRational::zero);
                    *e += &coef * v;
                    if e.is_zero() {
                        r.remove(&c);
                    }
                }
            }
        }
        // substitute into already-solved expressions
        for (_, ex) in solved.iter_mut() {
            if let Some(coef) = ex.remove(&pivot) {
                for (&c, v) in expr.iter() {
                    let e = ex.entry(c).or_insert_with(BigRational::zero);
                    *e += &coef * v;
                    if e.is_zero() {
                        ex.remove(&c);
                    }
                }
            }
        }
        solved.insert(pivot, expr);
    }
    let mut free: Vec<u32> = (0..nvars as u32)
        .filter(|v| !solved.contains_key(v))
        .collect();
    free.sort_unstable();
    let pos: HashMap<u32, u32> = free.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
    // rewrite expressions over the free basis indices
    let mut proj: Vec<SparseRow> = Vec::with_capacity(nvars);
    for v in 0..nvars as u32 {
        let mut row = BTreeMap::new();
        match solved.get(&v) {
            None => {
                row.insert(pos[&v], BigRational::one());
            }
            Some(expr) => {
                for (&c, val) in expr {
                    debug_assert!(pos.contains_key(&c), "expression not fully reduced");
                    row.insert(pos[&c], val.clone());
                }
            }
        }
        proj.push(row);
    }
    (free, proj)
}

/// Dense kernel over Q of an r x c matrix (row-major).  Returns a basis of
/// column vectors.
pub fn kernel(rows: &[Vec<BigRational>], ncols: usize) -> Vec<Vec<BigRational>> {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let nrows = m.len();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut rank = 0usize;
    for col in 0..ncols {
        // find pivot
        let mut piv = None;
        for r in rank..nrows {
            if !m[r][col].is_zero() {
                piv = Some(r);
                break;
            }
        }
        let Some(piv) = piv else { continue };
        m.swap(rank, piv);
        let inv = m[rank][col].recip();
        for x in m[rank].iter_mut() {
            *x *= &inv;
        }
        for r in 0..nrows {
            if r != rank && !m[r][col].is_zero() {
                let coef = m[r][col].clone();
                for cc in 0..ncols {
                    let t = &coef * &m[rank][cc];
                    m[r][cc] -= t;
                }
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
    }
    let mut basis = Vec::new();
    for col in 0..ncols {
        if pivot_of_col[col].is_some() {
            continue;
        }
        let mut v = vec![BigRational::zero(); ncols];
        v[col] = BigRational::one();
        for c2 in 0..ncols {
            if let Some(r) = pivot_of_col[c2] {
                v[c2] = -m[r][col].clone();
            }
        }
        basis.push(v);
    }
    basis
}

/// Scale a rational vector to a primitive integer vector (content 1).
pub fn primitive_integer_vector(v: &[BigRational]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for x in v {
        lcm = num_integer::lcm(lcm, x.denom().clone());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let mut gcd = BigInt::zero();
    for x in &ints {
        gcd = num_integer::gcd(gcd, x.clone());
    }
    if gcd.is_zero() || gcd.is_one() {
        return ints;
    }
    ints.into_iter().map(|x| x / &gcd).collect()
}
