//! Exact computation of Igusa local zeta functions `Z(s, f)` and `Z_0(s, f)`
//! of polynomial mappings that are non-degenerate with respect to their
//! Newton polyhedra, with a brute-force p-adic counting oracle.
//!
//! ```
//! use igusa::{Fan, Mapping, NewtonPolyhedron, ZetaOptions};
//!
//! let vars = igusa::parse_vars("x,y").unwrap();
//! let f = Mapping::parse("x^3 - x*y; y", &vars).unwrap();
//! let poly = NewtonPolyhedron::of_mapping(&f).unwrap();
//! let fan = Fan::normal(&poly).simplicial_subdivision().unwrap();
//! let z = igusa::zeta_global(&f, &poly, &fan, 5, ZetaOptions::default()).unwrap();
//! assert_eq!(z.degree(), Some(-1));
//! ```

pub mod arith;
pub mod error;
pub mod geometry;
pub mod nondegen;
pub mod oracle;
pub mod poly;
pub mod report;
pub mod zeta;

pub use arith::Q;
pub use error::{Error, Result};
pub use geometry::{diagonal_invariants, Cone, DiagonalInvariants, Face, FaceKey, Facet, Fan, FanKind, NewtonPolyhedron, Ray, RayProvenance};
pub use nondegen::{check_khovanskii, check_saia, check_strong, NondegeneracyVerdict, VerdictKind, Witness, DEFAULT_BUDGET};
pub use oracle::{count_solutions, lambda_estimate, verify_zeta, volume_series, CongruenceCounts, LambdaEstimate, OracleSeries};
pub use poly::{parse_vars, Mapping, Polynomial};
pub use report::{Command, Report, RunConfig, SubdivisionKind, ZetaSelection};
pub use zeta::{
    candidate_poles, poincare_series, poles_of, zeta_global, zeta_origin, CandidatePole, DenominatorFactor, Pole, Region,
    ZetaFunction, ZetaOptions,
};
