//! Non-degeneracy of a mapping with respect to Newton polyhedra, decided
//! over `F_p` by exhaustive enumeration of the torus `(F_p^x)^n`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Face, Fan, NewtonPolyhedron};
use crate::poly::{Jacobian, Mapping, PrimeFieldPolynomial};

/// Default cap on the number of torus points enumerated per face.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    StrongGlobal,
    StrongAtOrigin,
    Saia,
    Khovanskii,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::StrongGlobal => "strong-global",
            VerdictKind::StrongAtOrigin => "strong-at-origin",
            VerdictKind::Saia => "saia",
            VerdictKind::Khovanskii => "khovanskii",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Witness {
    /// Facet key of the offending face of `Gamma(f)`; empty for `Gamma` itself
    /// and for Khovanskii cells.
    pub face_key: Vec<usize>,
    pub face_vertices: Vec<Vec<i64>>,
    /// Positive representative vector of a Khovanskii cell.
    pub cell_vector: Option<Vec<i64>>,
    pub point: Vec<u64>,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NondegeneracyVerdict {
    pub kind: VerdictKind,
    pub p: u64,
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl fmt::Display for NondegeneracyVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over F_{}: {}", self.kind, self.p, if self.holds { "holds" } else { "fails" })?;
        if let Some(w) = &self.witness {
            write!(f, " (face {:?}, point {:?}, rank {})", w.face_vertices, w.point, w.rank)?;
        }
        Ok(())
    }
}

/// Outcome of scanning the torus for common zeros of a system.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TorusScan {
    pub zeros: u64,
    /// First zero (lexicographically) where the Jacobian rank is below the target.
    pub violation: Option<(Vec<u64>, usize)>,
}

fn check_budget(p: u64, n: usize, budget: u64) -> Result<()> {
    let required = (p as u128 - 1).checked_pow(n as u32).unwrap_or(u128::MAX);
    if required > budget as u128 {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(())
}

/// Counts torus zeros of `system` and finds the first one where the
/// Jacobian rank differs from `target_rank`. Identically zero components
/// impose no condition. Parallel over the first coordinate; results are
/// merged in point order.
pub fn scan_torus(system: &[PrimeFieldPolynomial], n: usize, p: u64, target_rank: usize, budget: u64) -> Result<TorusScan> {
    check_budget(p, n, budget)?;
    let active: Vec<&PrimeFieldPolynomial> = system.iter().filter(|g| !g.is_zero()).collect();
    if active.iter().any(|g| g.terms().len() == 1) {
        return Ok(TorusScan::default());
    }
    let jac = Jacobian::new(system);
    let per_first: Vec<TorusScan> = (1..p)
        .into_par_iter()
        .map(|x0| {
            let mut scan = TorusScan::default();
            let mut z = vec![1u64; n];
            z[0] = x0;
            loop {
                if active.iter().all(|g| g.eval(&z) == 0) {
                    scan.zeros += 1;
                    if scan.violation.is_none() {
                        let r = jac.rank_at(&z);
                        if r != target_rank {
                            scan.violation = Some((z.clone(), r));
                        }
                    }
                }
                let mut i = n;
                loop {
                    if i <= 1 {
                        return scan;
                    }
                    i -= 1;
                    if z[i] + 1 < p {
                        z[i] += 1;
                        break;
                    }
                    z[i] = 1;
                }
            }
        })
        .collect();
    Ok(per_first.into_iter().fold(TorusScan::default(), |mut acc, s| {
        acc.zeros += s.zeros;
        if acc.violation.is_none() {
            acc.violation = s.violation;
        }
        acc
    }))
}

fn face_system(mapping: &Mapping, poly: &NewtonPolyhedron, face: &Face, p: u64) -> Result<Vec<PrimeFieldPolynomial>> {
    mapping
        .components()
        .iter()
        .map(|f| f.face_restriction(poly, face)?.reduce_mod_p(p))
        .collect()
}

/// `card(D_tau)`: torus zeros over `F_p` of the reduced face system.
pub fn card_d_tau(mapping: &Mapping, poly: &NewtonPolyhedron, face: &Face, p: u64, budget: u64) -> Result<u64> {
    let system = face_system(mapping, poly, face, p)?;
    let target = mapping.len().min(mapping.nvars());
    Ok(scan_torus(&system, mapping.nvars(), p, target, budget)?.zeros)
}

/// Strong non-degeneracy: on every face (every compact face when
/// `at_origin`), torus zeros of the face system have Jacobian rank
/// `min(l, n)`. Faces are visited in canonical key order.
pub fn check_strong(mapping: &Mapping, poly: &NewtonPolyhedron, p: u64, at_origin: bool, budget: u64) -> Result<NondegeneracyVerdict> {
    let kind = if at_origin { VerdictKind::StrongAtOrigin } else { VerdictKind::StrongGlobal };
    let target = mapping.len().min(mapping.nvars());
    for face in poly.faces().iter().filter(|f| !at_origin || f.compact) {
        let system = face_system(mapping, poly, face, p)?;
        let scan = scan_torus(&system, mapping.nvars(), p, target, budget)?;
        if let Some((point, rank)) = scan.violation {
            return Ok(NondegeneracyVerdict {
                kind,
                p,
                holds: false,
                witness: Some(Witness {
                    face_key: face.key.clone(),
                    face_vertices: poly.vertex_coords(face),
                    cell_vector: None,
                    point,
                    rank,
                }),
            });
        }
    }
    Ok(NondegeneracyVerdict { kind, p, holds: true, witness: None })
}

/// Saia's condition: no compact face system has a torus zero.
pub fn check_saia(mapping: &Mapping, poly: &NewtonPolyhedron, p: u64, budget: u64) -> Result<NondegeneracyVerdict> {
    let n = mapping.nvars();
    for face in poly.compact_faces() {
        let system = face_system(mapping, poly, face, p)?;
        // target rank n + 1 is unattainable, so the first zero is reported
        let scan = scan_torus(&system, n, p, n + 1, budget)?;
        if let Some((point, _)) = scan.violation {
            let rank = Jacobian::new(&system).rank_at(&point);
            return Ok(NondegeneracyVerdict {
                kind: VerdictKind::Saia,
                p,
                holds: false,
                witness: Some(Witness {
                    face_key: face.key.clone(),
                    face_vertices: poly.vertex_coords(face),
                    cell_vector: None,
                    point,
                    rank,
                }),
            });
        }
    }
    Ok(NondegeneracyVerdict { kind: VerdictKind::Saia, p, holds: true, witness: None })
}

/// Khovanskii's condition with respect to `(Gamma(f_1), ..., Gamma(f_l))`.
///
/// The common refinement of the component normal fans is the normal fan of
/// their Minkowski sum, whose support is the set of sums `m_1 + ... + m_l`.
/// Its cells meeting the positive orthant are the normal cones of the
/// compact faces; the sum of a cell's generators represents it, and each
/// component is restricted to its own first meet locus of that vector.
pub fn check_khovanskii(mapping: &Mapping, p: u64, budget: u64) -> Result<NondegeneracyVerdict> {
    let n = mapping.nvars();
    let target = mapping.len().min(n);
    let nonzero: Vec<_> = mapping.components().iter().filter(|f| !f.is_zero()).collect();
    let mut sums: Vec<Vec<i64>> = vec![vec![0; n]];
    for f in &nonzero {
        let mut next = std::collections::BTreeSet::new();
        for s in &sums {
            for m in f.terms().keys() {
                next.insert(s.iter().zip(m).map(|(a, &b)| a + b as i64).collect::<Vec<i64>>());
            }
        }
        sums = next.into_iter().collect();
    }
    let minkowski = NewtonPolyhedron::from_points(n, &sums)?;
    let fan = Fan::normal(&minkowski);
    for face in minkowski.compact_faces() {
        let cone = fan.cones().iter().find(|c| c.face == face.key).expect("normal cone of a proper face");
        let a: Vec<i64> = fan
            .generators(cone)
            .iter()
            .fold(vec![0; n], |acc, g| acc.iter().zip(g).map(|(x, y)| x + y).collect());
        debug_assert!(a.iter().all(|&x| x > 0));
        let system: Vec<PrimeFieldPolynomial> = mapping
            .components()
            .iter()
            .map(|f| {
                let d = f
                    .terms()
                    .keys()
                    .map(|m| m.iter().zip(&a).map(|(&e, &w)| e as i64 * w).sum::<i64>())
                    .min();
                let restricted = f.filter_terms(|m| {
                    Some(m.iter().zip(&a).map(|(&e, &w)| e as i64 * w).sum::<i64>()) == d
                });
                restricted.reduce_mod_p(p)
            })
            .collect::<Result<_>>()?;
        let scan = scan_torus(&system, n, p, target, budget)?;
        if let Some((point, rank)) = scan.violation {
            return Ok(NondegeneracyVerdict {
                kind: VerdictKind::Khovanskii,
                p,
                holds: false,
                witness: Some(Witness {
                    face_key: vec![],
                    face_vertices: vec![],
                    cell_vector: Some(a),
                    point,
                    rank,
                }),
            });
        }
    }
    Ok(NondegeneracyVerdict { kind: VerdictKind::Khovanskii, p, holds: true, witness: None })
}
