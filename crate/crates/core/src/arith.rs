//! Small exact-arithmetic helpers shared by the geometry and zeta code.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q_int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// `base^exp` for an integer exponent of either sign.
pub fn q_pow(base: u64, exp: i64) -> Q {
    let b = Q::from_integer(BigInt::from(base));
    if exp >= 0 {
        num_traits::pow(b, exp as usize)
    } else {
        num_traits::pow(b, (-exp) as usize).recip()
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn gcd_slice(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Divides out the content; the zero vector is returned unchanged.
pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = gcd_slice(v);
    if g == 0 {
        return v.to_vec();
    }
    v.iter().map(|x| x / g).collect()
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn to_q_rows(rows: &[Vec<i64>]) -> Vec<Vec<Q>> {
    rows.iter()
        .map(|r| r.iter().map(|&x| q_int(x)).collect())
        .collect()
}

/// Row-reduces in place and returns the rank.
#[allow(clippy::needless_range_loop)]
pub fn rank_q(rows: &mut [Vec<Q>]) -> usize {
    let nrows = rows.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = rows[0].len();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..nrows).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pv = rows[rank][col].clone();
        for r in 0..nrows {
            if r != rank && !rows[r][col].is_zero() {
                let factor = &rows[r][col] / &pv;
                for c in col..ncols {
                    let delta = &factor * &rows[rank][c];
                    rows[r][c] -= delta;
                }
            }
        }
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

pub fn rank_i64(rows: &[Vec<i64>]) -> usize {
    rank_q(&mut to_q_rows(rows))
}

#[allow(clippy::needless_range_loop)]
pub fn det_q(mut m: Vec<Vec<Q>>) -> Q {
    let n = m.len();
    let mut det = Q::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Q::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let pv = m[col][col].clone();
        det *= &pv;
        for r in col + 1..n {
            if !m[r][col].is_zero() {
                let factor = &m[r][col] / &pv;
                for c in col..n {
                    let delta = &factor * &m[col][c];
                    m[r][c] -= delta;
                }
            }
        }
    }
    det
}

pub fn det_i64(m: &[Vec<i64>]) -> i64 {
    det_q(to_q_rows(m))
        .to_integer()
        .to_i64()
        .expect("determinant fits in i64")
}

/// Integer vector orthogonal to the `n - 1` rows, via signed maximal minors.
/// Zero when the rows are dependent.
pub fn cofactor_normal(rows: &[Vec<i64>], n: usize) -> Vec<i64> {
    debug_assert_eq!(rows.len() + 1, n);
    (0..n)
        .map(|skip| {
            let minor: Vec<Vec<i64>> = rows
                .iter()
                .map(|r| (0..n).filter(|&c| c != skip).map(|c| r[c]).collect())
                .collect();
            let d = if minor.is_empty() { 1 } else { det_i64(&minor) };
            if skip % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect()
}

/// Visits every `k`-subset of `0..n` in lexicographic order.
pub fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Gcd of the maximal (r x r) minors of the r x n matrix with rows `gens`.
/// This is the index of the generated lattice in its saturation, or zero
/// when the rows are dependent.
pub fn gcd_maximal_minors(gens: &[Vec<i64>]) -> i64 {
    let r = gens.len();
    if r == 0 {
        return 1;
    }
    let n = gens[0].len();
    let mut g = 0i64;
    for_each_subset(n, r, |cols| {
        let minor: Vec<Vec<i64>> = gens
            .iter()
            .map(|row| cols.iter().map(|&c| row[c]).collect())
            .collect();
        g = g.gcd(&det_i64(&minor));
    });
    g.abs()
}

/// Solves `sum_j lambda_j * gens[j] = target` for linearly independent
/// generators. Returns `None` when `target` is outside their span.
pub struct SpanSolver {
    gens: Vec<Vec<Q>>,
    rows: Vec<usize>,
    inverse: Vec<Vec<Q>>,
}

impl SpanSolver {
    pub fn new(gens: &[Vec<i64>]) -> Option<Self> {
        let r = gens.len();
        let n = gens.first().map_or(0, Vec::len);
        let qgens = to_q_rows(gens);
        if r == 0 {
            return Some(Self { gens: qgens, rows: vec![], inverse: vec![] });
        }
        let mut chosen = None;
        for_each_subset(n, r, |rows| {
            if chosen.is_some() {
                return;
            }
            let m: Vec<Vec<Q>> = rows
                .iter()
                .map(|&i| (0..r).map(|j| qgens[j][i].clone()).collect())
                .collect();
            if !det_q(m.clone()).is_zero() {
                chosen = Some((rows.to_vec(), m));
            }
        });
        let (rows, m) = chosen?;
        let inverse = invert(m)?;
        Some(Self { gens: qgens, rows, inverse })
    }

    pub fn solve(&self, target: &[Q]) -> Option<Vec<Q>> {
        let r = self.rows.len();
        let lambda: Vec<Q> = (0..r)
            .map(|j| {
                self.rows
                    .iter()
                    .enumerate()
                    .map(|(k, &row)| &self.inverse[j][k] * &target[row])
                    .fold(Q::zero(), |a, b| a + b)
            })
            .collect();
        for (i, t) in target.iter().enumerate() {
            let mut s = Q::zero();
            for (j, l) in lambda.iter().enumerate() {
                s += l * &self.gens[j][i];
            }
            if &s != t {
                return None;
            }
        }
        Some(lambda)
    }

    pub fn solve_i64(&self, target: &[i64]) -> Option<Vec<Q>> {
        let t: Vec<Q> = target.iter().map(|&x| q_int(x)).collect();
        self.solve(&t)
    }
}

#[allow(clippy::needless_range_loop)]
fn invert(m: Vec<Vec<Q>>) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut aug: Vec<Vec<Q>> = m
        .into_iter()
        .enumerate()
        .map(|(i, mut row)| {
            row.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(col, pivot);
        let pv = aug[col][col].clone();
        for c in 0..2 * n {
            aug[col][c] = &aug[col][c] / &pv;
        }
        for r in 0..n {
            if r != col && !aug[r][col].is_zero() {
                let factor = aug[r][col].clone();
                for c in 0..2 * n {
                    let delta = &factor * &aug[col][c];
                    aug[r][c] -= delta;
                }
            }
        }
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn q_is_integer(x: &Q) -> bool {
    x.is_integer()
}

pub fn q_to_i64(x: &Q) -> Option<i64> {
    if x.is_integer() {
        x.to_integer().to_i64()
    } else {
        None
    }
}

pub fn q_nonneg(x: &Q) -> bool {
    !x.is_negative()
}
