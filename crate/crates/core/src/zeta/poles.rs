use std::collections::BTreeMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::rational::{one_minus_t, DenominatorFactor, ZetaFunction};
use crate::arith::Q;
use crate::error::Result;
use crate::geometry::{NewtonPolyhedron, Ray};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoleProvenance {
    FacetNormal,
    ExtraRay,
    CodimBlowup,
}

impl PoleProvenance {
    pub fn name(self) -> &'static str {
        match self {
            PoleProvenance::FacetNormal => "facet-normal",
            PoleProvenance::ExtraRay => "extra-ray",
            PoleProvenance::CodimBlowup => "codim-blowup",
        }
    }
}

/// A candidate pole `s = realPart + 2 pi i k / (period log q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidatePole {
    pub real_part: Q,
    pub period: u32,
    pub provenance: PoleProvenance,
    /// The vector `xi`; `None` for the codimension blow-up.
    pub ray: Option<Vec<i64>>,
}

/// `-sigma(xi)/d(xi)` for every facet normal with `d > 0`, then `-l` when
/// `l < n`, then the given extra rays.
pub fn candidate_poles(poly: &NewtonPolyhedron, l: usize, extra_rays: &[&Ray]) -> Vec<CandidatePole> {
    let mut out: Vec<CandidatePole> = poly
        .facets()
        .iter()
        .filter(|f| f.offset > 0)
        .map(|f| CandidatePole {
            real_part: Q::new((-f.sigma()).into(), f.offset.into()),
            period: f.offset as u32,
            provenance: PoleProvenance::FacetNormal,
            ray: Some(f.normal.clone()),
        })
        .collect();
    if l < poly.nvars() {
        out.push(CandidatePole {
            real_part: Q::from_integer((-(l as i64)).into()),
            period: 1,
            provenance: PoleProvenance::CodimBlowup,
            ray: None,
        });
    }
    out.extend(extra_rays.iter().filter(|r| r.d > 0).map(|r| CandidatePole {
        real_part: Q::new((-r.sigma).into(), r.d.into()),
        period: r.d as u32,
        provenance: PoleProvenance::ExtraRay,
        ray: Some(r.vector.clone()),
    }));
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pole {
    pub real_part: Q,
    /// Order of the real pole: total multiplicity of factors with this real part.
    pub order: u32,
    /// Least common multiple of the `N` of those factors.
    pub period: u32,
}

/// Poles read off the surviving denominator factors, sorted by real part.
pub fn poles_of(z: &ZetaFunction) -> Vec<Pole> {
    let mut grouped: BTreeMap<Q, (u32, u32)> = BTreeMap::new();
    for (DenominatorFactor { v, n }, m) in z.factors() {
        if n == 0 {
            continue;
        }
        let e = grouped.entry(Q::new((-(v as i64)).into(), (n as i64).into())).or_insert((0, 1));
        e.0 += m;
        e.1 = e.1.lcm(&n);
    }
    grouped.into_iter().map(|(real_part, (order, period))| Pole { real_part, order, period }).collect()
}

/// `t`-degree of `z`; `None` for the zero function.
pub fn degree_of(z: &ZetaFunction) -> Option<i64> {
    z.degree()
}

/// `P(t) = (1 - t Z(t)) / (1 - t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoincareSeries {
    pub q: u64,
    pub series: ZetaFunction,
}

impl PoincareSeries {
    /// Checks `P(t)(1 - t) + t Z(t) = 1`.
    pub fn satisfies_identity(&self, z: &ZetaFunction) -> Result<bool> {
        let lhs = self.series.mul_poly(&one_minus_t()).add(&z.mul_poly(&[Q::from_integer(0.into()), Q::from_integer(1.into())]))?;
        Ok(lhs.same_function(&ZetaFunction::one(self.q)))
    }
}

pub fn poincare_series(z: &ZetaFunction) -> Result<PoincareSeries> {
    let q = z.q();
    let t_z = z.mul_poly(&[Q::from_integer(0.into()), Q::from_integer(1.into())]);
    let one_minus = ZetaFunction::one(q).sub(&t_z)?;
    let series = one_minus.mul(&ZetaFunction::new(q, vec![Q::from_integer(1.into())], [DenominatorFactor::new(0, 1)]))?.normalize();
    Ok(PoincareSeries { q, series })
}
