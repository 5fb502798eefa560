//! Intersection numbers of torus-invariant curves and positivity of `-K`.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{Fan2, Ray};
use crate::lattice::{cross, RationalMatrix};

fn ratio(n: i128, d: i128) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// `D_i^2 = -det(u_{i-1}, u_{i+1}) / (det(u_{i-1}, u_i) det(u_i, u_{i+1}))`
pub fn self_intersection(f: &Fan2, i: usize) -> BigRational {
    let i = i as isize;
    let (prev, cur, next) = (f.ray(i - 1), f.ray(i), f.ray(i + 1));
    ratio(-cross(prev, next), cross(prev, cur) * cross(cur, next))
}

/// `K.D_i`, with `K = -sum_j D_j`.
///
/// Equal to `-det(u_i - u_{i-1}, u_{i+1} - u_i) / (det(u_{i-1}, u_i) det(u_i, u_{i+1}))`.
pub fn canonical_degree(f: &Fan2, i: usize) -> BigRational {
    let i = i as isize;
    let (prev, cur, next) = (f.ray(i - 1), f.ray(i), f.ray(i + 1));
    ratio(-turn(prev, cur, next), cross(prev, cur) * cross(cur, next))
}

/// Twice the signed area of the triangle `a, b, c`.
pub(crate) fn turn(a: Ray, b: Ray, c: Ray) -> i128 {
    cross([b[0] - a[0], b[1] - a[1]], [c[0] - b[0], c[1] - b[1]])
}

/// Intersection matrix of the invariant divisors `D_0, ..., D_{n-1}`.
pub fn toric_intersection(f: &Fan2) -> RationalMatrix {
    let n = f.len();
    let mut g = RationalMatrix::zeros(n, n);
    for i in 0..n {
        g[(i, i)] = self_intersection(f, i);
        let j = (i + 1) % n;
        let meet = ratio(1, f.cone_index(i));
        // with three rays every pair is adjacent, each exactly once
        g[(i, j)] = meet.clone();
        g[(j, i)] = meet;
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Positivity {
    Ample,
    NefNotAmple,
    NotNef,
}

impl Positivity {
    pub fn is_nef(self) -> bool {
        self != Positivity::NotNef
    }
}

/// Convex-hull test on the ray tips: ample iff every ray is a vertex of the
/// hull, nef iff every ray lies on its boundary.
pub fn anticanonical_positivity(f: &Fan2) -> Positivity {
    let hull = convex_hull(f.rays());
    let m = hull.len();
    let mut all_vertices = true;
    for &p in f.rays() {
        if hull.contains(&p) {
            continue;
        }
        all_vertices = false;
        let on_edge = (0..m).any(|k| on_segment(hull[k], hull[(k + 1) % m], p));
        if !on_edge {
            return Positivity::NotNef;
        }
    }
    if all_vertices {
        Positivity::Ample
    } else {
        Positivity::NefNotAmple
    }
}

fn on_segment(a: Ray, b: Ray, p: Ray) -> bool {
    turn(a, b, p) == 0
        && p[0] >= a[0].min(b[0])
        && p[0] <= a[0].max(b[0])
        && p[1] >= a[1].min(b[1])
        && p[1] <= a[1].max(b[1])
}

/// Strict convex hull (no collinear points kept), counterclockwise.
fn convex_hull(points: &[Ray]) -> Vec<Ray> {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Ray> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Ray> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// `-K.D_i` for every ray.
pub fn anticanonical_degrees(f: &Fan2) -> Vec<BigRational> {
    (0..f.len()).map(|i| -canonical_degree(f, i)).collect()
}

#[cfg(test)]
fn positivity_by_degrees(f: &Fan2) -> Positivity {
    use num_traits::Zero;
    let d = anticanonical_degrees(f);
    if d.iter().all(|x| *x > BigRational::zero()) {
        Positivity::Ample
    } else if d.iter().all(|x| *x >= BigRational::zero()) {
        Positivity::NefNotAmple
    } else {
        Positivity::NotNef
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{int, rational};
    use crate::toric::parabola_fan;
    use num_traits::One;

    fn fan(p: &[(i64, i64)]) -> Fan2 {
        Fan2::from_pairs(p).unwrap()
    }

    fn quadric() -> Fan2 {
        fan(&[(1, 0), (0, 1), (-1, 0), (0, -1)])
    }

    #[test]
    fn quadric_matrix() {
        let g = toric_intersection(&quadric());
        for i in 0..4 {
            assert_eq!(g[(i, i)], int(0));
            assert_eq!(g[(i, (i + 1) % 4)], int(1));
            assert_eq!(g[(i, (i + 2) % 4)], int(0));
        }
    }

    #[test]
    fn plane_matrix() {
        let g = toric_intersection(&fan(&[(1, 0), (0, 1), (-1, -1)]));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(g[(i, j)], int(1));
            }
        }
    }

    #[test]
    fn weighted_plane_matrix() {
        // canonical order: (-1,-2), (1,0), (0,1)
        let f = fan(&[(1, 0), (0, 1), (-1, -2)]);
        assert_eq!(f.rays()[2], [0, 1]);
        // D^2 of (0,1) = -det((1,0),(-1,-2)) / 1
        assert_eq!(self_intersection(&f, 2), int(2));
        assert_eq!(self_intersection(&f, 1), rational(1, 2));
        assert_eq!(self_intersection(&f, 0), rational(1, 2));
        let g = toric_intersection(&f);
        assert_eq!(g[(0, 1)], rational(1, 2));
        assert_eq!(g[(2, 0)], int(1));
        assert_eq!(g[(1, 2)], int(1));
    }

    /// Linear relations `sum_j <m, u_j> D_j ~ 0` make every row orthogonal
    /// to both coordinate functionals.
    fn check_linear_relations(f: &Fan2) {
        let g = toric_intersection(f);
        for i in 0..f.len() {
            for c in 0..2 {
                let s: BigRational = (0..f.len()).map(|j| int(f.rays()[j][c]) * &g[(i, j)]).sum();
                assert_eq!(s, int(0), "fan {f}, row {i}, coordinate {c}");
            }
        }
    }

    /// Adjunction on invariant curves: `K.D_i = -2 - D_i^2 + sum (1 - 1/r)`
    /// over the two torus-fixed points of `D_i`.
    fn check_adjunction(f: &Fan2) {
        let g = toric_intersection(f);
        let n = f.len();
        for i in 0..n {
            let row_sum: BigRational = (0..n).map(|j| g[(i, j)].clone()).sum();
            let k_dot = -row_sum;
            assert_eq!(k_dot, canonical_degree(f, i));
            let r1 = f.cone_index((i + n - 1) % n);
            let r2 = f.cone_index(i);
            let diff = (BigRational::one() - ratio(1, r1)) + (BigRational::one() - ratio(1, r2));
            assert_eq!(k_dot, int(-2) - &g[(i, i)] + diff);
        }
    }

    #[test]
    fn intersection_consistency_on_library() {
        let mut fans = vec![
            quadric(),
            fan(&[(1, 0), (0, 1), (-1, -1)]),
            fan(&[(1, 0), (0, 1), (-1, -2)]),
            fan(&[(1, 0), (1, 1), (0, 1), (-1, -1)]),
            fan(&[(1, 0), (0, 1), (-1, 3), (0, -1)]),
            fan(&[(3, 1), (-1, 2), (-2, -5), (1, -1)]),
        ];
        for n in 2..12 {
            fans.push(parabola_fan(n).unwrap());
        }
        for f in &fans {
            check_linear_relations(f);
            check_adjunction(f);
            assert!(g_symmetric(f));
            assert_eq!(anticanonical_positivity(f), positivity_by_degrees(f), "{f}");
        }
    }

    fn g_symmetric(f: &Fan2) -> bool {
        toric_intersection(f).is_symmetric()
    }

    #[test]
    fn positivity_examples() {
        assert_eq!(
            anticanonical_positivity(&parabola_fan(3).unwrap()),
            Positivity::Ample
        );
        // blow-up of the plane in a fixed point: del Pezzo
        assert_eq!(
            anticanonical_positivity(&fan(&[(1, 0), (1, 1), (0, 1), (-1, -1)])),
            Positivity::Ample
        );
        // F_2: (0,1) is the midpoint of (1,0) and (-1,2)
        assert_eq!(
            anticanonical_positivity(&fan(&[(1, 0), (0, 1), (-1, 2), (0, -1)])),
            Positivity::NefNotAmple
        );
        // F_3
        assert_eq!(
            anticanonical_positivity(&fan(&[(1, 0), (0, 1), (-1, 3), (0, -1)])),
            Positivity::NotNef
        );
    }
}
