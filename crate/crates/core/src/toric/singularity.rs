//! Cyclic quotient singularities and their Hirzebruch-Jung resolutions.

use std::fmt;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use super::Cone2;
use crate::lattice::{int, solve_rational, LatticeError, RationalMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SingularityError {
    #[error("invalid quotient type 1/{r}(1,{a}): need 0 <= a < r with gcd(a, r) = 1")]
    InvalidType { r: u64, a: u64 },
    #[error("1/1(1,0) is a smooth point; nothing to resolve")]
    Smooth,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// The germ `1/r(1,a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct QuotientSingularity {
    pub r: u64,
    pub a: u64,
}

impl QuotientSingularity {
    pub fn new(r: u64, a: u64) -> Result<Self, SingularityError> {
        let ok = match r {
            0 => false,
            1 => a == 0,
            _ => a > 0 && a < r && a.gcd(&r) == 1,
        };
        if ok {
            Ok(QuotientSingularity { r, a })
        } else {
            Err(SingularityError::InvalidType { r, a })
        }
    }

    pub fn smooth() -> Self {
        QuotientSingularity { r: 1, a: 0 }
    }

    pub fn is_smooth(&self) -> bool {
        self.r == 1
    }

    /// Identifies `1/r(1,a)` with `1/r(1,a^-1)` by keeping the smaller of the two.
    pub fn normalized(&self) -> Self {
        if self.r <= 1 {
            return *self;
        }
        let inv = mod_inverse(self.a, self.r);
        QuotientSingularity {
            r: self.r,
            a: self.a.min(inv),
        }
    }
}

impl fmt::Display for QuotientSingularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1/{}(1,{})", self.r, self.a)
    }
}

fn mod_inverse(a: u64, r: u64) -> u64 {
    let e = (a as i128).extended_gcd(&(r as i128));
    e.x.rem_euclid(r as i128) as u64
}

/// Normal form of a cone: carries it by `GL(2,Z)` onto
/// `Cone((0,1), (r,-a))` and reports the normalized type.
pub fn quotient_type(c: &Cone2) -> QuotientSingularity {
    let [u, v] = c.generators();
    let r = c.index();
    if r == 1 {
        return QuotientSingularity::smooth();
    }
    let (p, q) = (u[0] as i128, u[1] as i128);
    // x*p + y*q = 1, so the rows (-q, p), (x, y) send u to (0, 1)
    let e = p.extended_gcd(&q);
    let (x, y) = if e.gcd < 0 { (-e.x, -e.y) } else { (e.x, e.y) };
    debug_assert_eq!(x * p + y * q, 1);
    let second = x * v[0] as i128 + y * v[1] as i128;
    let a = (-second).rem_euclid(r as i128) as u64;
    QuotientSingularity { r, a }.normalized()
}

/// Hirzebruch-Jung continued fraction `r/a = b1 - 1/(b2 - 1/(...))`.
pub fn hj_expand(r: u64, a: u64) -> Result<Vec<u64>, SingularityError> {
    if r < 2 || a == 0 || a >= r || a.gcd(&r) != 1 {
        return Err(SingularityError::InvalidType { r, a });
    }
    let (mut num, mut den) = (r, a);
    let mut chain = Vec::new();
    while den != 0 {
        let b = num.div_ceil(den);
        chain.push(b);
        (num, den) = (den, b * den - num);
    }
    Ok(chain)
}

/// Value of the continued fraction `b1 - 1/(b2 - 1/(...))`.
pub fn hj_evaluate(chain: &[u64]) -> Option<BigRational> {
    let mut acc: Option<BigRational> = None;
    for &b in chain.iter().rev() {
        let b = int(b as i64);
        acc = Some(match acc {
            None => b,
            Some(t) if t.is_zero() => return None,
            Some(t) => b - t.recip(),
        });
    }
    acc
}

/// Minimal resolution data of a cyclic quotient singularity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HJResolution {
    pub singularity: QuotientSingularity,
    /// Exceptional curves have self-intersection `-b_i`.
    pub chain: Vec<u64>,
    pub discrepancies: Vec<BigRational>,
}

impl HJResolution {
    pub fn log_discrepancies(&self) -> Vec<BigRational> {
        self.discrepancies
            .iter()
            .map(|d| d + BigRational::one())
            .collect()
    }

    /// All discrepancies vanish exactly for Du Val chains.
    pub fn is_canonical(&self) -> bool {
        self.discrepancies.iter().all(|d| d.is_zero())
    }

    pub fn gram(&self) -> RationalMatrix {
        chain_gram(&self.chain)
    }
}

/// Intersection matrix of a chain of rational curves with self-intersections `-b_i`.
pub fn chain_gram(chain: &[u64]) -> RationalMatrix {
    RationalMatrix::from_fn(chain.len(), chain.len(), |i, j| {
        if i == j {
            -int(chain[i] as i64)
        } else if i.abs_diff(j) == 1 {
            BigRational::one()
        } else {
            BigRational::zero()
        }
    })
}

/// Solves `sum_i d_i (E_i.E_j) = K.E_j` with `K.E_j = b_j - 2`.
pub fn resolve_singularity(q: &QuotientSingularity) -> Result<HJResolution, SingularityError> {
    if q.r == 1 {
        return Err(SingularityError::Smooth);
    }
    let chain = hj_expand(q.r, q.a)?;
    let rhs: Vec<BigRational> = chain.iter().map(|&b| int(b as i64 - 2)).collect();
    let discrepancies = solve_rational(&chain_gram(&chain), &rhs)?;
    debug_assert!(discrepancies
        .iter()
        .all(|d| !d.is_positive() && *d > -BigRational::one()));
    Ok(HJResolution {
        singularity: *q,
        chain,
        discrepancies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{is_negative_definite, rational};

    fn q(r: u64, a: u64) -> QuotientSingularity {
        QuotientSingularity::new(r, a).unwrap()
    }

    /// Brute force: the cone is equivalent to `Cone((0,1),(r,-a))` iff the
    /// matrix carrying one generator pair to the other is integral with
    /// determinant +-1, for one of the two pairings.
    fn brute_force_types(c: &Cone2) -> Vec<u64> {
        let [u, v] = c.generators();
        let r = c.index() as i64;
        let mut found = Vec::new();
        for a in 0..r.max(1) {
            let target = [[0, 1], [r, -a]];
            for (s0, s1) in [(u, v), (v, u)] {
                // M * [s0 s1] = [t0 t1]  =>  M = T * S^-1, S^-1 = adj(S)/det(S)
                let det = s0[0] * s1[1] - s1[0] * s0[1];
                let adj = [[s1[1], -s1[0]], [-s0[1], s0[0]]];
                let t = [[target[0][0], target[1][0]], [target[0][1], target[1][1]]];
                let mut m = [[0i64; 2]; 2];
                let mut integral = true;
                for i in 0..2 {
                    for j in 0..2 {
                        let num = t[i][0] * adj[0][j] + t[i][1] * adj[1][j];
                        if num % det != 0 {
                            integral = false;
                        }
                        m[i][j] = num / det;
                    }
                }
                if integral && (m[0][0] * m[1][1] - m[0][1] * m[1][0]).abs() == 1 {
                    found.push(a as u64);
                    break;
                }
            }
        }
        found
    }

    #[test]
    fn quotient_type_examples() {
        let c = Cone2::new([1, 0], [0, 1]).unwrap();
        assert!(quotient_type(&c).is_smooth());
        let c = Cone2::new([0, 1], [2, -1]).unwrap();
        assert_eq!(brute_force_types(&c), vec![1]);
        assert_eq!(quotient_type(&c), q(2, 1));
        let c = Cone2::new([1, 0], [2, 3]).unwrap();
        assert_eq!(quotient_type(&c).r, 3);
    }

    #[test]
    fn quotient_type_matches_brute_force() {
        for x in -6i64..=6 {
            for y in 1i64..=7 {
                for (u, v) in [([1, 0], [x, y]), ([3, 2], [x, y])] {
                    let Ok(c) = Cone2::new(u, v) else { continue };
                    let types = brute_force_types(&c);
                    let got = quotient_type(&c);
                    if got.r == 1 {
                        assert_eq!(types, vec![0]);
                        continue;
                    }
                    let inv = mod_inverse(got.a, got.r);
                    assert!(types.contains(&got.a), "{c:?} -> {got} vs {types:?}");
                    assert!(types.contains(&inv));
                    assert_eq!(got.a, *types.iter().min().unwrap());
                }
            }
        }
    }

    #[test]
    fn hj_examples() {
        assert_eq!(hj_expand(2, 1).unwrap(), vec![2]);
        assert_eq!(hj_expand(3, 1).unwrap(), vec![3]);
        assert_eq!(hj_expand(5, 3).unwrap(), vec![2, 3]);
        assert_eq!(hj_evaluate(&[2, 3]).unwrap(), rational(5, 3));
        assert_eq!(hj_expand(7, 1).unwrap(), vec![7]);
        assert_eq!(hj_expand(7, 6).unwrap(), vec![2; 6]);
        assert!(hj_expand(6, 4).is_err());
        assert!(hj_expand(5, 0).is_err());
        assert!(hj_expand(5, 5).is_err());
    }

    #[test]
    fn hj_round_trip_up_to_200() {
        for r in 2..=200u64 {
            for a in 1..r {
                if a.gcd(&r) != 1 {
                    continue;
                }
                let chain = hj_expand(r, a).unwrap();
                assert!(chain.iter().all(|&b| b >= 2));
                assert_eq!(hj_evaluate(&chain).unwrap(), rational(r as i64, a as i64));
            }
        }
    }

    #[test]
    fn resolution_examples() {
        let res = resolve_singularity(&q(2, 1)).unwrap();
        assert_eq!(res.chain, vec![2]);
        assert_eq!(res.discrepancies, vec![int(0)]);
        let res = resolve_singularity(&q(3, 1)).unwrap();
        assert_eq!(res.discrepancies, vec![rational(-1, 3)]);
        assert_eq!(res.log_discrepancies(), vec![rational(2, 3)]);
        // -2 d1 + d2 = 0, d1 - 3 d2 = 1
        let res = resolve_singularity(&q(5, 3)).unwrap();
        assert_eq!(res.chain, vec![2, 3]);
        assert_eq!(res.discrepancies, vec![rational(-1, 5), rational(-2, 5)]);
        assert_eq!(
            resolve_singularity(&QuotientSingularity::smooth()),
            Err(SingularityError::Smooth)
        );
    }

    #[test]
    fn resolution_properties() {
        for r in 2..=60u64 {
            for a in 1..r {
                if a.gcd(&r) != 1 {
                    continue;
                }
                let res = resolve_singularity(&q(r, a)).unwrap();
                assert!(is_negative_definite(&res.gram()).unwrap());
                for d in &res.discrepancies {
                    assert!(*d > -BigRational::one() && !d.is_positive());
                }
                let du_val = res.chain.iter().all(|&b| b == 2);
                assert_eq!(res.is_canonical(), du_val);
                assert_eq!(du_val, a == r - 1);
            }
        }
    }

    #[test]
    fn type_validation() {
        assert!(QuotientSingularity::new(4, 2).is_err());
        assert!(QuotientSingularity::new(1, 1).is_err());
        assert!(QuotientSingularity::new(0, 0).is_err());
        assert_eq!(q(7, 3).normalized(), q(7, 3));
        assert_eq!(q(7, 5).normalized(), q(7, 3));
    }
}
