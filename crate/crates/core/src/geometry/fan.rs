use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::lattice::{is_unimodular, lattice_index, parallelepiped_points};
use super::polyhedron::{FaceKey, NewtonPolyhedron};
use crate::arith::{q_int, q_to_i64, rank_i64, SpanSolver, Q};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RayProvenance {
    FacetNormal,
    ExtraRay,
}

/// A primitive generator `a` with `sigma(a)` (coordinate sum) and `d(a)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ray {
    pub vector: Vec<i64>,
    pub sigma: i64,
    pub d: i64,
    pub provenance: RayProvenance,
    /// Key of the face whose normal cone contains this ray in its relative
    /// interior.
    pub carrier: FaceKey,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FanKind {
    Normal,
    Simplicial,
    Simple,
}

impl FanKind {
    pub fn name(self) -> &'static str {
        match self {
            FanKind::Normal => "normal",
            FanKind::Simplicial => "simplicial",
            FanKind::Simple => "simple",
        }
    }
}

/// A relatively open cone spanned by some of the fan's rays, lying in the
/// normal cone of `face`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    pub rays: Vec<usize>,
    pub face: FaceKey,
    pub dim: usize,
    pub simplicial: bool,
}

/// A partition of `R_+^n \ {0}` into relatively open cones subordinated to
/// a Newton polyhedron.
#[derive(Clone, Debug)]
pub struct Fan {
    kind: FanKind,
    nvars: usize,
    rays: Vec<Ray>,
    cones: Vec<Cone>,
    /// Proper faces of the polyhedron with the dimensions of their normal cones.
    lattice: BTreeMap<FaceKey, usize>,
}

impl Fan {
    /// One cone per proper face, spanned by the normals of the facets that
    /// contain it.
    pub fn normal(poly: &NewtonPolyhedron) -> Self {
        let n = poly.nvars();
        let rays = poly
            .facets()
            .iter()
            .enumerate()
            .map(|(i, f)| Ray {
                vector: f.normal.clone(),
                sigma: f.sigma(),
                d: f.offset,
                provenance: RayProvenance::FacetNormal,
                carrier: vec![i],
            })
            .collect();
        let lattice: BTreeMap<FaceKey, usize> = poly
            .faces()
            .iter()
            .filter(|f| !f.is_whole())
            .map(|f| (f.key.clone(), n - f.dim))
            .collect();
        let cones = lattice
            .iter()
            .map(|(key, &dim)| Cone { rays: key.clone(), face: key.clone(), dim, simplicial: key.len() == dim })
            .collect();
        let mut fan = Self { kind: FanKind::Normal, nvars: n, rays, cones, lattice };
        fan.sort_cones();
        fan
    }

    fn sort_cones(&mut self) {
        self.cones
            .sort_by(|a, b| (a.face.len(), &a.face, &a.rays).cmp(&(b.face.len(), &b.face, &b.rays)));
    }

    pub fn kind(&self) -> FanKind {
        self.kind
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn generators(&self, cone: &Cone) -> Vec<Vec<i64>> {
        cone.rays.iter().map(|&r| self.rays[r].vector.clone()).collect()
    }

    pub fn extra_rays(&self) -> impl Iterator<Item = &Ray> {
        self.rays.iter().filter(|r| r.provenance == RayProvenance::ExtraRay)
    }

    /// Smallest proper face key containing every given key: the cone whose
    /// relative interior holds positive combinations of the rays.
    fn carrier_of(&self, rays: &[usize]) -> FaceKey {
        let union: BTreeSet<usize> = rays.iter().flat_map(|&r| self.rays[r].carrier.iter().copied()).collect();
        self.lattice
            .keys()
            .filter(|k| union.iter().all(|u| k.binary_search(u).is_ok()))
            .min_by_key(|k| k.len())
            .cloned()
            .expect("rays lie in a common normal cone")
    }

    /// Canonical ray priority: lexicographic order of the ray vectors.
    pub fn lexicographic_priority(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.rays.len()).collect();
        order.sort_by(|&a, &b| self.rays[a].vector.cmp(&self.rays[b].vector));
        let mut priority = vec![0; order.len()];
        for (rank, &r) in order.iter().enumerate() {
            priority[r] = rank;
        }
        priority
    }

    /// Triangulates every normal cone without new rays, using the canonical
    /// lexicographic ray order.
    pub fn simplicial_subdivision(&self) -> Result<Fan> {
        self.simplicial_subdivision_with_priority(&self.lexicographic_priority())
    }

    /// Pulling triangulation: the lowest-priority ray of a cone is coned
    /// over the triangulations of the cone's facets that avoid it. Applied
    /// with one global order, the triangulations of adjacent cones agree on
    /// shared faces.
    pub fn simplicial_subdivision_with_priority(&self, priority: &[usize]) -> Result<Fan> {
        if self.kind != FanKind::Normal {
            return Err(Error::FanKind { expected: "normal", found: self.kind.name() });
        }
        let mut memo: BTreeMap<FaceKey, Vec<Vec<usize>>> = BTreeMap::new();
        let mut cells: BTreeSet<Vec<usize>> = BTreeSet::new();
        for key in self.lattice.keys() {
            for simplex in self.pull(key, priority, &mut memo) {
                add_subsets(&simplex, &mut cells);
            }
        }
        Ok(self.with_cells(FanKind::Simplicial, self.rays.clone(), cells))
    }

    fn pull(&self, key: &FaceKey, priority: &[usize], memo: &mut BTreeMap<FaceKey, Vec<Vec<usize>>>) -> Vec<Vec<usize>> {
        if let Some(done) = memo.get(key) {
            return done.clone();
        }
        let dim = self.lattice[key];
        let out = if key.len() == dim {
            vec![key.clone()]
        } else {
            let apex = *key.iter().min_by_key(|&&r| priority[r]).expect("nonempty cone");
            let facets: Vec<FaceKey> = self
                .lattice
                .iter()
                .filter(|(k, &d)| d + 1 == dim && k.len() < key.len() && k.iter().all(|r| key.binary_search(r).is_ok()))
                .filter(|(k, _)| k.binary_search(&apex).is_err())
                .map(|(k, _)| k.clone())
                .collect();
            let mut simplices = vec![];
            for facet in facets {
                for mut s in self.pull(&facet, priority, memo) {
                    s.push(apex);
                    s.sort_unstable();
                    simplices.push(s);
                }
            }
            simplices
        };
        memo.insert(key.clone(), out.clone());
        out
    }

    fn with_cells(&self, kind: FanKind, rays: Vec<Ray>, cells: BTreeSet<Vec<usize>>) -> Fan {
        let mut fan = Fan { kind, nvars: self.nvars, rays, cones: vec![], lattice: self.lattice.clone() };
        fan.cones = cells
            .into_iter()
            .map(|rays| {
                let face = fan.carrier_of(&rays);
                let dim = rays.len();
                Cone { rays, face, dim, simplicial: true }
            })
            .collect();
        fan.sort_cones();
        fan
    }

    /// Refines a simplicial fan into unimodular cones by repeated stellar
    /// subdivision at the parallelepiped point of least coordinate sum.
    pub fn simple_subdivision(&self) -> Result<Fan> {
        if self.kind == FanKind::Normal {
            return Err(Error::FanKind { expected: "simplicial", found: self.kind.name() });
        }
        let n = self.nvars;
        let mut rays = self.rays.clone();
        let mut maximal: BTreeSet<Vec<usize>> =
            self.cones.iter().filter(|c| c.rays.len() == n).map(|c| c.rays.clone()).collect();
        loop {
            let vecs = |ids: &[usize], rays: &[Ray]| -> Vec<Vec<i64>> {
                ids.iter().map(|&r| rays[r].vector.clone()).collect()
            };
            let Some(bad) = maximal.iter().find(|c| !is_unimodular(&vecs(c, &rays))).cloned() else {
                break;
            };
            let points = parallelepiped_points(&vecs(&bad, &rays))?;
            let best = points
                .into_iter()
                .filter(|p| p.point.iter().any(|&x| x != 0))
                .min_by(|a, b| {
                    let sa: i64 = a.point.iter().sum();
                    let sb: i64 = b.point.iter().sum();
                    (sa, &a.point).cmp(&(sb, &b.point))
                })
                .expect("non-unimodular cone has a nonzero parallelepiped point");
            let support: Vec<usize> = bad
                .iter()
                .zip(&best.coords)
                .filter(|(_, c)| !c.is_zero())
                .map(|(&r, _)| r)
                .collect();
            let d = bad
                .iter()
                .zip(&best.coords)
                .fold(Q::zero(), |acc, (&r, c)| acc + c * q_int(rays[r].d));
            let d = q_to_i64(&d).expect("d is linear on normal cones");
            let probe = Fan { kind: self.kind, nvars: n, rays: rays.clone(), cones: vec![], lattice: self.lattice.clone() };
            let carrier = probe.carrier_of(&support);
            let w = rays.len();
            rays.push(Ray {
                sigma: best.point.iter().sum(),
                vector: best.point,
                d,
                provenance: RayProvenance::ExtraRay,
                carrier,
            });
            let touched: Vec<Vec<usize>> = maximal
                .iter()
                .filter(|c| support.iter().all(|s| c.binary_search(s).is_ok()))
                .cloned()
                .collect();
            for cell in touched {
                maximal.remove(&cell);
                for g in &support {
                    let mut next: Vec<usize> = cell.iter().copied().filter(|r| r != g).collect();
                    next.push(w);
                    next.sort_unstable();
                    maximal.insert(next);
                }
            }
        }
        let mut cells = BTreeSet::new();
        for m in &maximal {
            add_subsets(m, &mut cells);
        }
        Ok(self.with_cells(FanKind::Simple, rays, cells))
    }

    /// Indices of the cones whose relative interior contains `point`.
    pub fn locate(&self, point: &[Q]) -> Vec<usize> {
        self.cones
            .iter()
            .enumerate()
            .filter(|(_, c)| cone_contains(&self.generators(c), point))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_simplicial(&self) -> bool {
        self.cones.iter().all(|c| rank_i64(&self.generators(c)) == c.rays.len())
    }

    pub fn is_simple(&self) -> bool {
        self.cones.iter().all(|c| lattice_index(&self.generators(c)) == 1)
    }
}

fn add_subsets(simplex: &[usize], cells: &mut BTreeSet<Vec<usize>>) {
    let k = simplex.len();
    for mask in 1u32..(1 << k) {
        let cell: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| simplex[i]).collect();
        cells.insert(cell);
    }
}

/// Relative-interior membership for a cone with independent generators.
/// Always false for dependent generators.
pub fn cone_contains(gens: &[Vec<i64>], point: &[Q]) -> bool {
    if rank_i64(gens) != gens.len() {
        return false;
    }
    SpanSolver::new(gens)
        .and_then(|s| s.solve(point))
        .is_some_and(|l| l.iter().all(|c| c.is_positive()))
}
