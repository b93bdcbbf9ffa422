use num_traits::{One, Signed};

use crate::arith::{gcd_maximal_minors, SpanSolver, Q};
use crate::error::{Error, Result};

/// A lattice point `h = sum lambda_j a_j` of a half-open fundamental
/// parallelepiped, with its coordinates `lambda_j in [0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParallelepipedPoint {
    pub point: Vec<i64>,
    pub coords: Vec<Q>,
}

/// Enumerates `Z^n ∩ {sum lambda_j a_j | 0 <= lambda_j < 1}` by scanning the
/// bounding box of the closed parallelepiped. Generators must be linearly
/// independent and nonnegative. Points come out in lexicographic order.
pub fn parallelepiped_points(gens: &[Vec<i64>]) -> Result<Vec<ParallelepipedPoint>> {
    let n = gens.first().map_or(0, Vec::len);
    if gens.is_empty() {
        return Ok(vec![ParallelepipedPoint { point: vec![], coords: vec![] }]);
    }
    let solver = SpanSolver::new(gens).ok_or(Error::NonSimplicial)?;
    if gens.len() > n {
        return Err(Error::NonSimplicial);
    }
    let mut lo = vec![0i64; n];
    let mut hi = vec![0i64; n];
    for g in gens {
        for i in 0..n {
            if g[i] < 0 {
                lo[i] += g[i];
            } else {
                hi[i] += g[i];
            }
        }
    }
    let expected = gcd_maximal_minors(gens) as usize;
    let mut out = Vec::with_capacity(expected);
    let mut h = lo.clone();
    loop {
        if let Some(coords) = solver.solve_i64(&h) {
            if coords.iter().all(|c| !c.is_negative() && c < &Q::one()) {
                out.push(ParallelepipedPoint { point: h.clone(), coords });
            }
        }
        let mut i = n;
        loop {
            if i == 0 {
                debug_assert_eq!(out.len(), expected);
                return Ok(out);
            }
            i -= 1;
            if h[i] < hi[i] {
                h[i] += 1;
                break;
            }
            h[i] = lo[i];
        }
    }
}

/// Lattice index of the sublattice spanned by `gens` in its saturation.
pub fn lattice_index(gens: &[Vec<i64>]) -> i64 {
    gcd_maximal_minors(gens)
}

pub fn is_unimodular(gens: &[Vec<i64>]) -> bool {
    lattice_index(gens) == 1
}


#[cfg(test)]
mod tests {
    use super::*;

    fn pts(gens: &[Vec<i64>]) -> Vec<Vec<i64>> {
        parallelepiped_points(gens).unwrap().into_iter().map(|p| p.point).collect()
    }

    #[test]
    fn planar_cone() {
        assert_eq!(pts(&[vec![1, 3], vec![1, 0]]), vec![vec![0, 0], vec![1, 1], vec![1, 2]]);
    }

    #[test]
    fn unimodular_cones_have_only_origin() {
        assert_eq!(pts(&[vec![1, 0], vec![1, 1]]), vec![vec![0, 0]]);
        assert_eq!(pts(&[vec![2, 3, 3]]), vec![vec![0, 0, 0]]);
    }

    #[test]
    fn three_dimensional_cone() {
        let p = pts(&[vec![1, 0, 0], vec![0, 0, 1], vec![2, 3, 3]]);
        assert_eq!(p, vec![vec![0, 0, 0], vec![1, 1, 1], vec![2, 2, 2]]);
    }

    #[test]
    fn lower_dimensional_cone_in_span_only() {
        let p = pts(&[vec![2, 0, 0], vec![0, 2, 0]]);
        assert_eq!(p.len(), 4);
        assert!(p.iter().all(|h| h[2] == 0));
    }

    #[test]
    fn dependent_generators_rejected() {
        assert!(matches!(
            parallelepiped_points(&[vec![1, 1], vec![2, 2]]),
            Err(Error::NonSimplicial)
        ));
    }
}
