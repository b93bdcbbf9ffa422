use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rational::{one_minus_t, DenominatorFactor, ZetaFunction};
use crate::arith::{is_prime, q_int, q_pow, Q};
use crate::error::{Error, Result};
use crate::geometry::{cone_parallelepiped, Cone, Fan, FaceKey, NewtonPolyhedron};
use crate::nondegen::{card_d_tau, check_strong, DEFAULT_BUDGET};
use crate::poly::Mapping;

/// Domain of integration: all of `Z_p^n`, or the neighbourhood `(pZ_p)^n`
/// of the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    Global,
    Origin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ZetaOptions {
    /// Skip the non-degeneracy precondition.
    pub force: bool,
    pub budget: u64,
}

impl Default for ZetaOptions {
    fn default() -> Self {
        Self { force: false, budget: DEFAULT_BUDGET }
    }
}

/// `L_tau = q^{-n} ((q-1)^n - card (1 - t) / (1 - q^{-m} t))`, `m = min(l, n)`.
pub fn l_tau(q: u64, n: usize, l: usize, card: u64) -> ZetaFunction {
    let m = l.min(n) as u32;
    let scale = q_pow(q, -(n as i64));
    let torus = q_int(q as i64 - 1);
    let torus = (0..n).fold(Q::from_integer(1.into()), |acc, _| acc * &torus);
    let mut num: Vec<Q> = DenominatorFactor::new(m, 1).expand(q).into_iter().map(|c| c * &torus).collect();
    let card = Q::from_integer(card.into());
    for (i, c) in one_minus_t().into_iter().enumerate() {
        num[i] -= c * &card;
    }
    let num = num.into_iter().map(|c| c * &scale).collect();
    ZetaFunction::new(q, num, [DenominatorFactor::new(m, 1)]).normalize()
}

/// The contribution of a simplicial cone with generators `a_j`:
/// `sum_h q^{sigma(h) - sum sigma(a_j)} t^{sum d(a_j) - d(h)}` over the
/// parallelepiped points `h`, over `prod (1 - q^{-sigma(a_j)} t^{d(a_j)})`.
pub fn s_tau_i(fan: &Fan, cone: &Cone, poly: &NewtonPolyhedron, q: u64) -> Result<ZetaFunction> {
    if !cone.simplicial {
        return Err(Error::NonSimplicial);
    }
    let rays: Vec<_> = cone.rays.iter().map(|&r| &fan.rays()[r]).collect();
    let sigma: i64 = rays.iter().map(|r| r.sigma).sum();
    let d: i64 = rays.iter().map(|r| r.d).sum();
    let points = cone_parallelepiped(fan, cone, poly)?;
    let mut num = vec![Q::zero(); d as usize + 1];
    for h in points {
        let k = (d - h.d) as usize;
        num[k] += q_pow(q, h.sigma - sigma);
    }
    let factors = rays.iter().map(|r| DenominatorFactor::new(r.sigma as u32, r.d as u32));
    Ok(ZetaFunction::new(q, num, factors))
}

/// One summand of the explicit formula: `L_tau` alone for the whole
/// polyhedron, `L_tau * S` for a cone of the fan.
#[derive(Clone, Debug)]
pub struct FormulaTerm {
    pub face: FaceKey,
    pub cone: Option<usize>,
    pub card: u64,
    pub value: ZetaFunction,
}

/// Unnormalized terms of the explicit formula in canonical order.
pub fn formula_terms(
    mapping: &Mapping,
    poly: &NewtonPolyhedron,
    fan: &Fan,
    q: u64,
    region: Region,
    budget: u64,
) -> Result<Vec<FormulaTerm>> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if fan.cones().iter().any(|c| !c.simplicial) {
        return Err(Error::NonSimplicial);
    }
    let (n, l) = (mapping.nvars(), mapping.len());
    let faces: Vec<_> = poly
        .faces()
        .iter()
        .filter(|f| match region {
            Region::Global => true,
            Region::Origin => f.compact,
        })
        .collect();
    let cards: BTreeMap<FaceKey, u64> = faces
        .par_iter()
        .map(|f| card_d_tau(mapping, poly, f, q, budget).map(|c| (f.key.clone(), c)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .collect();
    let mut jobs: Vec<(FaceKey, Option<usize>)> = Vec::new();
    if region == Region::Global {
        jobs.push((poly.whole().key.clone(), None));
    }
    for (i, c) in fan.cones().iter().enumerate() {
        if cards.contains_key(&c.face) {
            jobs.push((c.face.clone(), Some(i)));
        }
    }
    jobs.par_iter()
        .map(|(face, cone)| {
            let card = cards[face];
            let l_value = l_tau(q, n, l, card);
            let value = match cone {
                None => l_value,
                Some(i) => l_value.mul(&s_tau_i(fan, &fan.cones()[*i], poly, q)?)?,
            };
            Ok(FormulaTerm { face: face.clone(), cone: *cone, card, value })
        })
        .collect()
}

/// Sum of the terms, reduced sequentially so the result does not depend
/// on the thread count.
pub fn assemble(terms: &[FormulaTerm], q: u64) -> Result<ZetaFunction> {
    terms
        .iter()
        .try_fold(ZetaFunction::zero(q), |acc, t| acc.add(&t.value))
        .map(|z| z.normalize())
}

fn zeta(mapping: &Mapping, poly: &NewtonPolyhedron, fan: &Fan, q: u64, region: Region, opts: ZetaOptions) -> Result<ZetaFunction> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if !opts.force {
        let verdict = check_strong(mapping, poly, q, region == Region::Origin, opts.budget)?;
        if !verdict.holds {
            return Err(Error::Degenerate(Box::new(verdict)));
        }
    }
    assemble(&formula_terms(mapping, poly, fan, q, region, opts.budget)?, q)
}

/// `Z(s, f)` over `Z_p^n` from a simplicial fan subordinated to `poly`.
pub fn zeta_global(mapping: &Mapping, poly: &NewtonPolyhedron, fan: &Fan, q: u64, opts: ZetaOptions) -> Result<ZetaFunction> {
    zeta(mapping, poly, fan, q, Region::Global, opts)
}

/// `Z_0(s, f)` over `(pZ_p)^n`: only cones of compact faces contribute.
pub fn zeta_origin(mapping: &Mapping, poly: &NewtonPolyhedron, fan: &Fan, q: u64, opts: ZetaOptions) -> Result<ZetaFunction> {
    zeta(mapping, poly, fan, q, Region::Origin, opts)
}
