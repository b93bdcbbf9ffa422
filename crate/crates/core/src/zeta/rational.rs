use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::arith::{q_int, q_pow, Q};
use crate::error::{Error, Result};

/// The factor `(1 - q^{-v} t^N)`; constant when `N = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DenominatorFactor {
    pub v: u32,
    pub n: u32,
}

impl DenominatorFactor {
    pub fn new(v: u32, n: u32) -> Self {
        Self { v, n }
    }

    pub fn expand(&self, q: u64) -> Vec<Q> {
        let c = q_pow(q, -(self.v as i64));
        let mut poly = vec![Q::zero(); self.n as usize + 1];
        poly[0] = Q::one();
        poly[self.n as usize] -= c;
        trim(poly)
    }
}

/// Rational function in `t = q^{-s}` for a fixed numeric `q`: a numerator
/// polynomial over a multiset of factors `(1 - q^{-v} t^N)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaFunction {
    q: u64,
    numerator: Vec<Q>,
    factors: BTreeMap<DenominatorFactor, u32>,
}

pub(crate) fn trim(mut p: Vec<Q>) -> Vec<Q> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

pub(crate) fn poly_add(a: &[Q], b: &[Q]) -> Vec<Q> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(Q::zero);
            let y = b.get(i).cloned().unwrap_or_else(Q::zero);
            x + y
        })
        .collect();
    trim(out)
}

pub(crate) fn poly_mul(a: &[Q], b: &[Q]) -> Vec<Q> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

/// Exact quotient `a / b`, or `None` if `b` does not divide `a`.
pub(crate) fn poly_div_exact(a: &[Q], b: &[Q]) -> Option<Vec<Q>> {
    let b = trim(b.to_vec());
    let lead = b.last()?.clone();
    let mut rem = trim(a.to_vec());
    if rem.is_empty() {
        return Some(vec![]);
    }
    if rem.len() < b.len() {
        return None;
    }
    let mut quot = vec![Q::zero(); rem.len() - b.len() + 1];
    for k in (0..quot.len()).rev() {
        let c = &rem[k + b.len() - 1] / &lead;
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                rem[k + j] -= &c * bj;
            }
        }
        quot[k] = c;
    }
    trim(rem).is_empty().then(|| trim(quot))
}

fn poly_eval(p: &[Q], t: &Q) -> Q {
    p.iter().rev().fold(Q::zero(), |acc, c| acc * t + c)
}

impl ZetaFunction {
    pub fn new<I>(q: u64, numerator: Vec<Q>, factors: I) -> Self
    where
        I: IntoIterator<Item = DenominatorFactor>,
    {
        let mut map = BTreeMap::new();
        for f in factors {
            *map.entry(f).or_insert(0) += 1;
        }
        Self { q, numerator: trim(numerator), factors: map }
    }

    pub fn zero(q: u64) -> Self {
        Self::new(q, vec![], [])
    }

    pub fn one(q: u64) -> Self {
        Self::constant(q, Q::one())
    }

    pub fn constant(q: u64, c: Q) -> Self {
        Self::new(q, vec![c], [])
    }

    /// `c * t^k`.
    pub fn monomial(q: u64, c: Q, k: usize) -> Self {
        let mut num = vec![Q::zero(); k + 1];
        num[k] = c;
        Self::new(q, num, [])
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn numerator(&self) -> &[Q] {
        &self.numerator
    }

    /// Denominator factors with multiplicities, in canonical order.
    pub fn factors(&self) -> impl Iterator<Item = (DenominatorFactor, u32)> + '_ {
        self.factors.iter().map(|(f, m)| (*f, *m))
    }

    pub fn factor_list(&self) -> Vec<(DenominatorFactor, u32)> {
        self.factors().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_empty()
    }

    pub fn denominator(&self) -> Vec<Q> {
        self.factors
            .iter()
            .fold(vec![Q::one()], |acc, (f, &m)| (0..m).fold(acc, |a, _| poly_mul(&a, &f.expand(self.q))))
    }

    fn same_q(&self, other: &Self) -> Result<()> {
        if self.q != other.q {
            return Err(Error::MismatchedQ(self.q, other.q));
        }
        Ok(())
    }

    /// Sum over the least common multiple of the two factor multisets.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_q(other)?;
        let mut lcm = self.factors.clone();
        for (f, &m) in &other.factors {
            let e = lcm.entry(*f).or_insert(0);
            *e = (*e).max(m);
        }
        let lift = |z: &Self| -> Vec<Q> {
            lcm.iter().fold(z.numerator.clone(), |acc, (f, &m)| {
                let have = z.factors.get(f).copied().unwrap_or(0);
                (have..m).fold(acc, |a, _| poly_mul(&a, &f.expand(self.q)))
            })
        };
        let numerator = poly_add(&lift(self), &lift(other));
        Ok(Self { q: self.q, numerator, factors: lcm })
    }

    pub fn neg(&self) -> Self {
        Self { q: self.q, numerator: self.numerator.iter().map(|c| -c).collect(), factors: self.factors.clone() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_q(other)?;
        let mut factors = self.factors.clone();
        for (f, &m) in &other.factors {
            *factors.entry(*f).or_insert(0) += m;
        }
        Ok(Self { q: self.q, numerator: poly_mul(&self.numerator, &other.numerator), factors })
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self {
            q: self.q,
            numerator: trim(self.numerator.iter().map(|x| x * c).collect()),
            factors: self.factors.clone(),
        }
    }

    /// Multiplies by the polynomial `p(t)`.
    pub fn mul_poly(&self, p: &[Q]) -> Self {
        Self { q: self.q, numerator: poly_mul(&self.numerator, p), factors: self.factors.clone() }
    }

    /// Division by a function whose numerator is a nonzero constant.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.same_q(other)?;
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if other.numerator.len() != 1 {
            return Err(Error::NotDivisible("divisor numerator is not a constant".into()));
        }
        let c = other.numerator[0].recip();
        Ok(self.mul_poly(&other.denominator()).scale(&c))
    }

    /// Cancels every denominator factor that divides the numerator, to a
    /// fixed point. Constant factors always cancel.
    pub fn normalize(&self) -> Self {
        let mut out = self.clone();
        if out.numerator.is_empty() {
            out.factors.clear();
            return out;
        }
        loop {
            let mut changed = false;
            let keys: Vec<DenominatorFactor> = out.factors.keys().copied().collect();
            for f in keys {
                while out.factors.get(&f).copied().unwrap_or(0) > 0 {
                    let Some(q) = poly_div_exact(&out.numerator, &f.expand(out.q)) else {
                        break;
                    };
                    out.numerator = q;
                    let m = out.factors.get_mut(&f).expect("present");
                    *m -= 1;
                    if *m == 0 {
                        out.factors.remove(&f);
                    }
                    changed = true;
                }
            }
            if !changed {
                return out;
            }
        }
    }

    /// Equality as rational functions, by cross multiplication.
    pub fn same_function(&self, other: &Self) -> bool {
        self.q == other.q
            && poly_mul(&self.numerator, &other.denominator()) == poly_mul(&other.numerator, &self.denominator())
    }

    /// Value at `t`, or `None` at a zero of the denominator.
    pub fn eval(&self, t: &Q) -> Option<Q> {
        let den = poly_eval(&self.denominator(), t);
        if den.is_zero() {
            return None;
        }
        Some(poly_eval(&self.numerator, t) / den)
    }

    /// The first `order` Taylor coefficients at `t = 0`.
    pub fn taylor(&self, order: usize) -> Vec<Q> {
        let den = self.denominator();
        let d0 = den[0].clone();
        let mut out: Vec<Q> = Vec::with_capacity(order);
        for k in 0..order {
            let mut c = self.numerator.get(k).cloned().unwrap_or_else(Q::zero);
            for j in 1..=k.min(den.len().saturating_sub(1)) {
                c -= &den[j] * &out[k - j];
            }
            out.push(c / &d0);
        }
        out
    }

    /// `t`-degree of the numerator minus that of the denominator; `None`
    /// for the zero function.
    pub fn degree(&self) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        let den: i64 = self.factors.iter().map(|(f, &m)| f.n as i64 * m as i64).sum();
        Some(self.numerator.len() as i64 - 1 - den)
    }

    /// Human readable form with `q` substituted; `symbolic` keeps the
    /// factors as `q^-v` instead.
    pub fn render(&self, symbolic: bool) -> String {
        let num = render_poly(&self.numerator);
        if self.factors.is_empty() {
            return num;
        }
        let factors: Vec<String> = self
            .factors
            .iter()
            .map(|(f, &m)| {
                let base = if symbolic { "q".to_string() } else { self.q.to_string() };
                let t = match f.n {
                    0 => String::new(),
                    1 => " t".to_string(),
                    n => format!(" t^{n}"),
                };
                let s = format!("(1 - {base}^-{}{t})", f.v);
                if m > 1 {
                    format!("{s}^{m}")
                } else {
                    s
                }
            })
            .collect();
        format!("({num}) / ({})", factors.join(" "))
    }
}

fn render_poly(p: &[Q]) -> String {
    if p.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, c) in p.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
        let neg = c.is_negative();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let a = c.abs();
        match k {
            0 => out.push_str(&a.to_string()),
            _ => {
                if !a.is_one() {
                    out.push_str(&a.to_string());
                    out.push(' ');
                }
                out.push('t');
                if k > 1 {
                    out.push_str(&format!("^{k}"));
                }
            }
        }
    }
    out
}

impl fmt::Display for ZetaFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false))
    }
}

/// `1 - t`.
pub(crate) fn one_minus_t() -> Vec<Q> {
    vec![Q::one(), q_int(-1)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn additive_identity() {
        let a = ZetaFunction::new(5, vec![r(3, 2), r(1, 7)], [DenominatorFactor::new(1, 1)]);
        let s = a.add(&ZetaFunction::zero(5)).unwrap().normalize();
        assert_eq!(s, a.normalize());
        assert!(s.same_function(&a));
    }

    #[test]
    fn cancels_dividing_factor() {
        let u = vec![r(2, 1), r(1, 3)];
        let num = poly_mul(&DenominatorFactor::new(2, 1).expand(5), &u);
        let z = ZetaFunction::new(5, num, [DenominatorFactor::new(2, 1), DenominatorFactor::new(4, 3)]).normalize();
        assert_eq!(z.numerator(), &u[..]);
        assert_eq!(z.factor_list(), vec![(DenominatorFactor::new(4, 3), 1)]);
    }

    #[test]
    fn constant_factors_cancel() {
        let z = ZetaFunction::new(3, vec![r(1, 3)], [DenominatorFactor::new(1, 0)]).normalize();
        assert_eq!(z.numerator(), &[r(1, 2)]);
        assert_eq!(z.factors().count(), 0);
    }

    #[test]
    fn mismatched_q_rejected() {
        let a = ZetaFunction::one(3);
        let b = ZetaFunction::one(5);
        assert!(matches!(a.add(&b), Err(Error::MismatchedQ(3, 5))));
        assert!(matches!(a.mul(&b), Err(Error::MismatchedQ(3, 5))));
        assert!(matches!(a.div(&ZetaFunction::zero(3)), Err(Error::DivisionByZero)));
    }

    #[test]
    fn taylor_of_geometric_series() {
        // (1 - 1/3) / (1 - t/3) = sum (2/3) 3^-j t^j
        let z = ZetaFunction::new(3, vec![r(2, 3)], [DenominatorFactor::new(1, 1)]);
        let c = z.taylor(4);
        assert_eq!(c, vec![r(2, 3), r(2, 9), r(2, 27), r(2, 81)]);
    }

    #[test]
    fn rendering() {
        let z = ZetaFunction::new(5, vec![r(1, 1), r(0, 1), r(-2, 5)], [DenominatorFactor::new(4, 3)]);
        assert_eq!(z.render(false), "(1 - 2/5 t^2) / ((1 - 5^-4 t^3))");
        assert_eq!(z.render(true), "(1 - 2/5 t^2) / ((1 - q^-4 t^3))");
    }

    fn arb_fn() -> impl Strategy<Value = ZetaFunction> {
        (
            prop::collection::vec(-5i64..5, 1..4),
            prop::collection::vec((1u32..5, 0u32..3), 0..3),
        )
            .prop_map(|(num, fs)| {
                ZetaFunction::new(3, num.into_iter().map(q_int).collect(), fs.into_iter().map(|(v, n)| DenominatorFactor::new(v, n)))
            })
    }

    proptest! {
        #[test]
        fn normalize_preserves_the_function(a in arb_fn(), b in arb_fn()) {
            let s = a.add(&b).unwrap();
            let n = s.normalize();
            prop_assert!(n.same_function(&s));
            for (f, _) in n.factors() {
                prop_assert!(n.is_zero() || poly_div_exact(n.numerator(), &f.expand(3)).is_none());
            }
            let t = r(1, 7);
            prop_assert_eq!(n.eval(&t), s.eval(&t));
        }

        #[test]
        fn product_evaluates_pointwise(a in arb_fn(), b in arb_fn()) {
            let t = r(2, 11);
            let prod = a.mul(&b).unwrap();
            let expected = a.eval(&t).unwrap() * b.eval(&t).unwrap();
            prop_assert_eq!(prod.eval(&t).unwrap(), expected);
        }
    }
}
