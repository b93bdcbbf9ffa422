use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::arith::{cofactor_normal, dot, for_each_subset, primitive, rank_i64, Q};
use crate::error::{Error, Result};
use crate::poly::Mapping;

/// Canonical identity of a face: the sorted indices of the facets that
/// contain it. The whole polyhedron has the empty key.
pub type FaceKey = Vec<usize>;

/// A facet `{x in Gamma | <a, x> = d(a)}` with primitive inward normal `a`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: i64,
}

impl Facet {
    pub fn sigma(&self) -> i64 {
        self.normal.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub key: FaceKey,
    /// Indices into [`NewtonPolyhedron::vertices`].
    pub vertices: Vec<usize>,
    /// Coordinate directions `e_i` in the recession cone of the face.
    pub recession: Vec<usize>,
    pub dim: usize,
    pub compact: bool,
}

impl Face {
    pub fn is_whole(&self) -> bool {
        self.key.is_empty()
    }
}

/// `Gamma = conv(G + R_+^n)` for a finite set `G` of exponents, stored in
/// both vertex and facet form together with its face lattice.
#[derive(Clone, Debug)]
pub struct NewtonPolyhedron {
    nvars: usize,
    vertices: Vec<Vec<i64>>,
    facets: Vec<Facet>,
    faces: Vec<Face>,
    by_key: BTreeMap<FaceKey, usize>,
}

impl NewtonPolyhedron {
    /// Newton polyhedron of a mapping: the hull of the union of supports.
    pub fn of_mapping(mapping: &Mapping) -> Result<Self> {
        let points: Vec<Vec<i64>> = mapping
            .support()
            .into_iter()
            .map(|m| m.into_iter().map(i64::from).collect())
            .collect();
        if points.is_empty() {
            return Err(Error::InvalidMapping("all components are zero".into()));
        }
        Self::from_points(mapping.nvars(), &points)
    }

    pub fn from_points(nvars: usize, points: &[Vec<i64>]) -> Result<Self> {
        if nvars == 0 {
            return Err(Error::Variables("no variables".into()));
        }
        let pts: BTreeSet<Vec<i64>> = points.iter().cloned().collect();
        if pts.is_empty() {
            return Err(Error::InvalidMapping("empty support".into()));
        }
        for p in &pts {
            if p.len() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, found: p.len() });
            }
        }
        let pts: Vec<Vec<i64>> = pts.into_iter().collect();
        let facets = hull_facets(nvars, &pts);
        let vertices: Vec<Vec<i64>> = pts
            .iter()
            .filter(|p| {
                let tight: Vec<Vec<i64>> = facets
                    .iter()
                    .filter(|f| dot(&f.normal, p) == f.offset)
                    .map(|f| f.normal.clone())
                    .collect();
                rank_i64(&tight) == nvars
            })
            .cloned()
            .collect();
        let mut poly = Self { nvars, vertices, facets, faces: vec![], by_key: BTreeMap::new() };
        poly.build_faces();
        Ok(poly)
    }

    fn tight(&self, facet: usize, vertex: usize) -> bool {
        let f = &self.facets[facet];
        dot(&f.normal, &self.vertices[vertex]) == f.offset
    }

    fn closure(&self, vertices: &[usize], recession: &[usize]) -> FaceKey {
        (0..self.facets.len())
            .filter(|&i| {
                vertices.iter().all(|&v| self.tight(i, v))
                    && recession.iter().all(|&c| self.facets[i].normal[c] == 0)
            })
            .collect()
    }

    fn face_from_key(&self, key: FaceKey) -> Face {
        let vertices: Vec<usize> = (0..self.vertices.len())
            .filter(|&v| key.iter().all(|&i| self.tight(i, v)))
            .collect();
        let recession: Vec<usize> = (0..self.nvars)
            .filter(|&c| key.iter().all(|&i| self.facets[i].normal[c] == 0))
            .collect();
        let v0 = &self.vertices[vertices[0]];
        let mut dirs: Vec<Vec<i64>> = vertices[1..]
            .iter()
            .map(|&v| self.vertices[v].iter().zip(v0).map(|(a, b)| a - b).collect())
            .collect();
        dirs.extend(recession.iter().map(|&c| unit(self.nvars, c)));
        let dim = rank_i64(&dirs);
        let compact = recession.is_empty();
        Face { key, vertices, recession, dim, compact }
    }

    fn build_faces(&mut self) {
        let all_v: Vec<usize> = (0..self.vertices.len()).collect();
        let all_r: Vec<usize> = (0..self.nvars).collect();
        let root = self.closure(&all_v, &all_r);
        let mut seen: BTreeMap<FaceKey, Face> = BTreeMap::new();
        let mut queue = VecDeque::new();
        let whole = self.face_from_key(root);
        queue.push_back(whole.clone());
        seen.insert(whole.key.clone(), whole);
        while let Some(face) = queue.pop_front() {
            for i in 0..self.facets.len() {
                if face.key.binary_search(&i).is_ok() {
                    continue;
                }
                let vs: Vec<usize> = face.vertices.iter().copied().filter(|&v| self.tight(i, v)).collect();
                if vs.is_empty() {
                    continue;
                }
                let rs: Vec<usize> = face
                    .recession
                    .iter()
                    .copied()
                    .filter(|&c| self.facets[i].normal[c] == 0)
                    .collect();
                let key = self.closure(&vs, &rs);
                if let std::collections::btree_map::Entry::Vacant(slot) = seen.entry(key) {
                    let f = self.face_from_key(slot.key().clone());
                    queue.push_back(f.clone());
                    slot.insert(f);
                }
            }
        }
        let mut faces: Vec<Face> = seen.into_values().collect();
        faces.sort_by(|a, b| (a.key.len(), &a.key).cmp(&(b.key.len(), &b.key)));
        self.by_key = faces.iter().enumerate().map(|(i, f)| (f.key.clone(), i)).collect();
        self.faces = faces;
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn vertices(&self) -> &[Vec<i64>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// All faces in canonical order: by number of defining facets, then key.
    /// The whole polyhedron comes first.
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, key: &[usize]) -> Option<&Face> {
        self.by_key.get(key).map(|&i| &self.faces[i])
    }

    pub fn whole(&self) -> &Face {
        &self.faces[0]
    }

    pub fn compact_faces(&self) -> Vec<&Face> {
        self.faces.iter().filter(|f| f.compact).collect()
    }

    /// `d(a) = min <a, x>` over the polyhedron, for `a` with nonnegative entries.
    pub fn d_value(&self, a: &[i64]) -> i64 {
        self.vertices.iter().map(|v| dot(a, v)).min().unwrap_or(0)
    }

    /// The face on which `<a, .>` attains `d(a)`; the whole polyhedron for `a = 0`.
    pub fn first_meet_locus(&self, a: &[i64]) -> &Face {
        let d = self.d_value(a);
        let vs: Vec<usize> = (0..self.vertices.len())
            .filter(|&v| dot(a, &self.vertices[v]) == d)
            .collect();
        let rs: Vec<usize> = (0..self.nvars).filter(|&c| a[c] == 0).collect();
        let key = self.closure(&vs, &rs);
        self.face(&key).expect("first meet locus is a face")
    }

    /// Whether a lattice point of the polyhedron lies on the face.
    pub fn face_contains(&self, face: &Face, m: &[u32]) -> bool {
        face.key.iter().all(|&i| {
            let f = &self.facets[i];
            f.normal.iter().zip(m).map(|(a, &x)| a * x as i64).sum::<i64>() == f.offset
        })
    }

    pub fn vertex_coords(&self, face: &Face) -> Vec<Vec<i64>> {
        face.vertices.iter().map(|&v| self.vertices[v].clone()).collect()
    }

    /// Recomputes the vertex set from the facet inequalities alone: the
    /// points where `n` independent facet hyperplanes meet inside all
    /// half-spaces.
    pub fn vertices_from_facets(&self) -> Vec<Vec<i64>> {
        let n = self.nvars;
        let mut out = BTreeSet::new();
        for_each_subset(self.facets.len(), n, |idx| {
            let rows: Vec<Vec<i64>> = idx.iter().map(|&i| self.facets[i].normal.clone()).collect();
            if rank_i64(&rows) < n {
                return;
            }
            let solver = crate::arith::SpanSolver::new(&transpose(&rows)).expect("full rank");
            let rhs: Vec<Q> = idx.iter().map(|&i| crate::arith::q_int(self.facets[i].offset)).collect();
            let x = solver.solve(&rhs).expect("square system");
            let feasible = self.facets.iter().all(|f| {
                let s: Q = f
                    .normal
                    .iter()
                    .zip(&x)
                    .map(|(a, xi)| crate::arith::q_int(*a) * xi)
                    .fold(Q::from_integer(0.into()), |a, b| a + b);
                s >= crate::arith::q_int(f.offset)
            });
            if feasible {
                out.insert(x);
            }
        });
        out.into_iter()
            .filter(|x| x.iter().all(|c| c.is_integer()))
            .map(|x| x.iter().map(|c| crate::arith::q_to_i64(c).unwrap()).collect())
            .collect()
    }
}

fn transpose(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = rows.first().map_or(0, Vec::len);
    (0..n).map(|c| rows.iter().map(|r| r[c]).collect()).collect()
}

pub(crate) fn unit(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Facets of `conv(points) + R_+^n`. Every facet is spanned, from one of
/// its points, by `n - 1` independent directions drawn from point
/// differences and coordinate rays, so exhausting those choices finds all
/// of them.
fn hull_facets(n: usize, points: &[Vec<i64>]) -> Vec<Facet> {
    let mut normals: BTreeSet<Vec<i64>> = BTreeSet::new();
    if n == 1 {
        normals.insert(vec![1]);
    } else {
        for base in points {
            let mut dirs: Vec<Vec<i64>> = points
                .iter()
                .filter(|p| *p != base)
                .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
                .collect();
            dirs.extend((0..n).map(|i| unit(n, i)));
            for_each_subset(dirs.len(), n - 1, |idx| {
                let rows: Vec<Vec<i64>> = idx.iter().map(|&i| dirs[i].clone()).collect();
                let mut a = primitive(&cofactor_normal(&rows, n));
                if a.iter().all(|&x| x == 0) {
                    return;
                }
                if a.iter().all(|&x| x <= 0) {
                    a.iter_mut().for_each(|x| *x = -*x);
                }
                if a.iter().any(|&x| x < 0) {
                    return;
                }
                normals.insert(a);
            });
        }
    }
    normals
        .into_iter()
        .filter_map(|a| {
            let d = points.iter().map(|p| dot(&a, p)).min()?;
            let tight: Vec<&Vec<i64>> = points.iter().filter(|p| dot(&a, p) == d).collect();
            let t0 = tight[0];
            let mut span: Vec<Vec<i64>> = tight[1..]
                .iter()
                .map(|p| p.iter().zip(t0).map(|(x, y)| x - y).collect())
                .collect();
            span.extend((0..n).filter(|&i| a[i] == 0).map(|i| unit(n, i)));
            (rank_i64(&span) == n - 1).then_some(Facet { normal: a, offset: d })
        })
        .collect()
}

/// Where the diagonal `(t, ..., t)` leaves the complement of the polyhedron.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalInvariants {
    pub t_f: Q,
    pub lambda: Q,
    /// `-1/t_f` when `t_f >= 1/l`; `None` when that bound is not guaranteed.
    pub largest_pole_real_part: Option<Q>,
}

pub fn diagonal_invariants(poly: &NewtonPolyhedron, l: usize) -> Result<DiagonalInvariants> {
    let t_f = poly
        .facets()
        .iter()
        .filter(|f| f.offset > 0)
        .map(|f| Q::new(f.offset.into(), f.sigma().into()))
        .max()
        .ok_or(Error::NoPositiveFacet)?;
    let lambda = t_f.recip();
    let bound = Q::new(1.into(), (l as i64).into());
    let largest_pole_real_part = (t_f >= bound).then(|| -lambda.clone());
    Ok(DiagonalInvariants { t_f, lambda, largest_pole_real_part })
}
