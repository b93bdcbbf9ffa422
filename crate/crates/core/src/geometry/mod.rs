//! Newton polyhedra, their normal fans and subdivisions, and the lattice
//! point data the explicit zeta formula consumes.

mod fan;
mod lattice;
mod polyhedron;

pub use fan::{cone_contains, Cone, Fan, FanKind, Ray, RayProvenance};
pub use lattice::{is_unimodular, lattice_index, parallelepiped_points, ParallelepipedPoint};
pub use polyhedron::{diagonal_invariants, DiagonalInvariants, Face, FaceKey, Facet, NewtonPolyhedron};

/// A parallelepiped lattice point annotated against the polyhedron.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnotatedPoint {
    pub point: Vec<i64>,
    pub sigma: i64,
    pub d: i64,
}

/// Lattice points of the fundamental parallelepiped of `cone`, each with
/// its coordinate sum and its `d` value against `poly`.
pub fn cone_parallelepiped(
    fan: &Fan,
    cone: &Cone,
    poly: &NewtonPolyhedron,
) -> crate::error::Result<Vec<AnnotatedPoint>> {
    let gens = fan.generators(cone);
    Ok(parallelepiped_points(&gens)?
        .into_iter()
        .map(|p| AnnotatedPoint { sigma: p.point.iter().sum(), d: poly.d_value(&p.point), point: p.point })
        .collect())
}
