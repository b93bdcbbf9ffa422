//! Brute-force counting of solutions of `f(x) = 0 mod p^j` and the
//! truncated zeta series it determines.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, q_pow, Q};
use crate::error::{Error, Result};
use crate::poly::{Exponent, Mapping};
use crate::zeta::{Region, ZetaFunction};

/// `N_0, ..., N_J` for one region.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceCounts {
    pub p: u64,
    pub nvars: usize,
    pub depth: usize,
    pub region: Region,
    pub counts: Vec<u64>,
}

/// An integer system with one row of `(coefficient, exponent)` per component.
struct IntegerSystem {
    rows: Vec<Vec<(BigInt, Exponent)>>,
}

impl IntegerSystem {
    /// Scales every component by the lcm of its coefficient denominators,
    /// which must be prime to `p`.
    fn new(mapping: &Mapping, p: u64) -> Result<Self> {
        let mut rows = Vec::new();
        for f in mapping.components().iter().filter(|f| !f.is_zero()) {
            let den = f.denominator_lcm();
            if (&den % BigInt::from(p)).is_zero() {
                return Err(Error::DenominatorDivisible { denominator: den.to_string(), p });
            }
            let row = f
                .terms()
                .iter()
                .map(|(e, c)| ((c * Q::from_integer(den.clone())).to_integer(), e.clone()))
                .collect();
            rows.push(row);
        }
        Ok(Self { rows })
    }

    /// Coefficients reduced into `[0, modulus)`.
    fn reduced(&self, modulus: u64) -> Vec<Vec<(u128, &Exponent)>> {
        let m = BigInt::from(modulus);
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|(c, e)| (c.mod_floor(&m).to_u128().expect("reduced coefficient"), e))
                    .collect()
            })
            .collect()
    }
}

fn pow_mod(mut b: u128, mut e: u32, m: u128) -> u128 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

fn vanishes(system: &[Vec<(u128, &Exponent)>], x: &[u64], m: u128) -> bool {
    system.iter().all(|row| {
        let mut s = 0u128;
        for (c, e) in row {
            let mut term = *c;
            for (xi, &k) in x.iter().zip(e.iter()) {
                if k > 0 {
                    term = term * pow_mod(*xi as u128, k, m) % m;
                }
            }
            s = (s + term) % m;
        }
        s == 0
    })
}

/// Counts `x mod p^j` with every component `= 0 mod p^j`, for `j = 0..=depth`,
/// lifting the level `j` solutions by all `p^n` digit vectors. With
/// `Region::Origin` only `x = 0 mod p` is counted. `budget` caps the
/// total number of candidate lifts examined.
pub fn count_solutions(mapping: &Mapping, p: u64, depth: usize, region: Region, budget: u64) -> Result<CongruenceCounts> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let n = mapping.nvars();
    let system = IntegerSystem::new(mapping, p)?;
    let modulus_top = (p as u128).checked_pow(depth as u32).filter(|m| *m <= u64::MAX as u128);
    if modulus_top.is_none() {
        return Err(Error::BudgetExceeded { required: u128::MAX, budget });
    }
    let lifts = (p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    let digits: Vec<Vec<u64>> = (0..lifts as u64)
        .map(|mut k| {
            (0..n)
                .map(|_| {
                    let d = k % p;
                    k /= p;
                    d
                })
                .rev()
                .collect()
        })
        .collect();
    let mut level: Vec<Vec<u64>> = vec![vec![0; n]];
    let mut counts = vec![1u64];
    let mut spent: u128 = 0;
    let mut scale: u64 = 1;
    for _ in 0..depth {
        let m = scale as u128 * p as u128;
        let candidates: &[Vec<u64>] = match (region, counts.len()) {
            (Region::Origin, 1) => &digits[..1],
            _ => &digits,
        };
        spent += level.len() as u128 * candidates.len() as u128;
        if spent > budget as u128 {
            return Err(Error::BudgetExceeded { required: spent, budget });
        }
        let reduced = system.reduced(m as u64);
        level = level
            .par_iter()
            .flat_map_iter(|x| {
                let reduced = &reduced;
                candidates.iter().filter_map(move |k| {
                    let y: Vec<u64> = x.iter().zip(k).map(|(a, b)| a + b * scale).collect();
                    vanishes(reduced, &y, m).then_some(y)
                })
            })
            .collect();
        counts.push(level.len() as u64);
        scale = m as u64;
    }
    Ok(CongruenceCounts { p, nvars: n, depth, region, counts })
}

impl CongruenceCounts {
    /// `vol{x in W | f(x) = 0 mod p^j}` for `j = 0..=depth`.
    pub fn volumes(&self) -> Vec<Q> {
        let n = self.nvars as i64;
        self.counts
            .iter()
            .enumerate()
            .map(|(j, &c)| match (self.region, j) {
                (Region::Origin, 0) => q_pow(self.p, -n),
                _ => Q::from_integer(c.into()) * q_pow(self.p, -n * j as i64),
            })
            .collect()
    }
}

/// Coefficients `c_j = vol{|f| = p^-j}`, `j < depth`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleSeries {
    pub p: u64,
    pub depth: usize,
    pub coefficients: Vec<Q>,
}

pub fn volume_series(counts: &CongruenceCounts) -> OracleSeries {
    let v = counts.volumes();
    let coefficients = v.windows(2).map(|w| &w[0] - &w[1]).collect();
    OracleSeries { p: counts.p, depth: counts.depth, coefficients }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub matched: bool,
    pub first_mismatch: Option<usize>,
}

/// Compares the Taylor coefficients of `z` with the oracle series.
pub fn verify_zeta(z: &ZetaFunction, series: &OracleSeries) -> Result<Verification> {
    if z.q() != series.p {
        return Err(Error::MismatchedQ(z.q(), series.p));
    }
    let taylor = z.taylor(series.coefficients.len());
    let first_mismatch = taylor.iter().zip(&series.coefficients).position(|(a, b)| a != b);
    Ok(Verification { matched: first_mismatch.is_none(), first_mismatch })
}

/// Heuristic bracket for `lambda` from finite-depth counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum LambdaEstimate {
    NoZeroLocus,
    Bracket {
        lower: f64,
        upper: f64,
        /// `log_p` of `(N_j p^{-nj})^{1/j}` for `j = 1..=J`.
        exponents: Vec<f64>,
    },
}

/// Brackets `lambda` between the averaged and last-ratio estimates,
/// widened below by `n / J`.
pub fn lambda_estimate(counts: &CongruenceCounts) -> LambdaEstimate {
    let c = &counts.counts;
    if c.iter().skip(1).all(|&x| x == 0) || c.len() < 2 {
        return LambdaEstimate::NoZeroLocus;
    }
    let n = counts.nvars as f64;
    let lp = |x: f64| x.ln() / (counts.p as f64).ln();
    let depth = c.len() - 1;
    let exponents: Vec<f64> = (1..=depth).map(|j| lp(c[j] as f64) / j as f64 - n).collect();
    let last = c[depth];
    if last == 0 {
        return LambdaEstimate::NoZeroLocus;
    }
    let average = n - lp(last as f64) / depth as f64;
    let ratio = n - lp(last as f64 / c[depth - 1] as f64);
    let slack = n / depth as f64;
    LambdaEstimate::Bracket { lower: average.min(ratio) - slack, upper: average.max(ratio), exponents }
}

/// `sum c_j + N_J p^{-nJ} = vol(W)`.
pub fn telescopes(counts: &CongruenceCounts) -> bool {
    let series = volume_series(counts);
    let v = counts.volumes();
    let total = series.coefficients.iter().fold(Q::zero(), |a, c| a + c) + v.last().cloned().unwrap_or_else(Q::zero);
    total == v[0] && !series.coefficients.iter().any(Signed::is_negative) && v[0] <= Q::one()
}
