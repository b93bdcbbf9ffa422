//! Rational functions in `t = q^{-s}` with factored denominators and the
//! explicit formula for `Z(s, f)` and `Z_0(s, f)`.

mod formula;
mod poles;
mod rational;

pub use formula::{assemble, formula_terms, l_tau, s_tau_i, zeta_global, zeta_origin, FormulaTerm, Region, ZetaOptions};
pub use poles::{candidate_poles, degree_of, poincare_series, poles_of, CandidatePole, PoincareSeries, Pole, PoleProvenance};
pub use rational::{DenominatorFactor, ZetaFunction};
