//! Cone counts of simplicial fans in arbitrary dimension.
//!
//! Completeness is only checked through a pseudo-manifold proxy: every
//! codimension-one face of a maximal cone must lie in exactly two maximal
//! cones. That is all the face-counting identities below rely on.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{smith_normal_form, IntMatrix, LatticeVector};
use crate::toric::Fan2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanNdError {
    #[error("dimension must be at least 2, got {0}")]
    Dimension(usize),
    #[error("ray {index} has dimension {got}, expected {expected}")]
    RayDimension {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("ray {0} is not primitive")]
    NotPrimitive(usize),
    #[error("maximal cone {cone} has {got} generators, expected {expected}")]
    ConeSize {
        cone: usize,
        got: usize,
        expected: usize,
    },
    #[error("maximal cone {cone} refers to missing ray {ray}")]
    RayIndex { cone: usize, ray: usize },
    #[error("maximal cone {0} repeats a generator")]
    RepeatedGenerator(usize),
    #[error("maximal cone {0} is not full-dimensional")]
    Degenerate(usize),
    #[error("maximal cone {0} appears twice")]
    DuplicateCone(usize),
    #[error("facet {facet:?} lies in {count} maximal cones, expected 2")]
    Facet { facet: Vec<usize>, count: usize },
    #[error("ray {0} lies in no maximal cone")]
    UnusedRay(usize),
    #[error("dimension {k} is outside 2..={d}")]
    ConeDimension { k: usize, d: usize },
}

/// A simplicial fan given by rays and maximal cones (index sets of size `d`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanNd {
    dimension: usize,
    rays: Vec<LatticeVector>,
    maximal_cones: Vec<Vec<usize>>,
}

/// On-disk form: `{"dimension": d, "rays": [[..]..], "maximal_cones": [[..]..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanNdFile {
    pub dimension: usize,
    pub rays: Vec<Vec<i64>>,
    pub maximal_cones: Vec<Vec<usize>>,
}

impl FanNdFile {
    pub fn to_fan(&self) -> Result<FanNd, FanNdError> {
        FanNd::new(
            self.dimension,
            self.rays
                .iter()
                .map(|r| LatticeVector::new(r.clone()))
                .collect(),
            self.maximal_cones.clone(),
        )
    }
}

impl FanNd {
    pub fn new(
        dimension: usize,
        rays: Vec<LatticeVector>,
        maximal_cones: Vec<Vec<usize>>,
    ) -> Result<FanNd, FanNdError> {
        let d = dimension;
        if d < 2 {
            return Err(FanNdError::Dimension(d));
        }
        for (i, r) in rays.iter().enumerate() {
            if r.dim() != d {
                return Err(FanNdError::RayDimension {
                    index: i,
                    got: r.dim(),
                    expected: d,
                });
            }
            if !r.is_primitive() {
                return Err(FanNdError::NotPrimitive(i));
            }
        }
        let mut cones = Vec::with_capacity(maximal_cones.len());
        let mut seen = BTreeSet::new();
        for (c, cone) in maximal_cones.into_iter().enumerate() {
            if cone.len() != d {
                return Err(FanNdError::ConeSize {
                    cone: c,
                    got: cone.len(),
                    expected: d,
                });
            }
            if let Some(&ray) = cone.iter().find(|&&i| i >= rays.len()) {
                return Err(FanNdError::RayIndex { cone: c, ray });
            }
            let mut sorted = cone.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != d {
                return Err(FanNdError::RepeatedGenerator(c));
            }
            let gens: Vec<&LatticeVector> = sorted.iter().map(|&i| &rays[i]).collect();
            if IntMatrix::from_columns(&gens)
                .det()
                .map_or(true, |x| x.is_zero())
            {
                return Err(FanNdError::Degenerate(c));
            }
            if !seen.insert(sorted.clone()) {
                return Err(FanNdError::DuplicateCone(c));
            }
            cones.push(sorted);
        }
        let mut facets: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for cone in &cones {
            for skip in 0..d {
                let facet: Vec<usize> = cone
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != skip)
                    .map(|(_, &i)| i)
                    .collect();
                *facets.entry(facet).or_default() += 1;
            }
        }
        if let Some((facet, &count)) = facets.iter().find(|(_, &c)| c != 2) {
            return Err(FanNdError::Facet {
                facet: facet.clone(),
                count,
            });
        }
        let used: BTreeSet<usize> = cones.iter().flatten().copied().collect();
        if let Some(i) = (0..rays.len()).find(|i| !used.contains(i)) {
            return Err(FanNdError::UnusedRay(i));
        }
        Ok(FanNd {
            dimension: d,
            rays,
            maximal_cones: cones,
        })
    }

    pub fn from_fan2(f: &Fan2) -> FanNd {
        let n = f.len();
        FanNd {
            dimension: 2,
            rays: f.ray_vectors(),
            maximal_cones: (0..n)
                .map(|i| {
                    let mut c = vec![i, (i + 1) % n];
                    c.sort_unstable();
                    c
                })
                .collect(),
        }
    }

    pub fn to_file(&self) -> FanNdFile {
        FanNdFile {
            dimension: self.dimension,
            rays: self.rays.iter().map(|r| r.0.clone()).collect(),
            maximal_cones: self.maximal_cones.clone(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn maximal_cones(&self) -> &[Vec<usize>] {
        &self.maximal_cones
    }

    /// `|Sigma(1)| - d`
    pub fn picard_number(&self) -> i64 {
        self.rays.len() as i64 - self.dimension as i64
    }

    /// Whether the cone on the given rays is smooth: its generators extend
    /// to a lattice basis, i.e. all invariant factors are 1.
    pub fn cone_is_smooth(&self, cone: &[usize]) -> bool {
        let gens: Vec<&LatticeVector> = cone.iter().map(|&i| &self.rays[i]).collect();
        let snf = smith_normal_form(&IntMatrix::from_columns(&gens));
        let factors = snf.invariant_factors();
        factors.len() == cone.len() && factors.iter().all(|x| x.is_one())
    }

    /// Product of the invariant factors of the cone's generator matrix.
    pub fn cone_multiplicity(&self, cone: &[usize]) -> num_bigint::BigInt {
        let gens: Vec<&LatticeVector> = cone.iter().map(|&i| &self.rays[i]).collect();
        smith_normal_form(&IntMatrix::from_columns(&gens))
            .invariant_factors()
            .iter()
            .product()
    }
}

/// Product of two fans: rays `(r, 0)` and `(0, s)`, cones are unions.
pub fn product(a: &FanNd, b: &FanNd) -> FanNd {
    let d = a.dimension + b.dimension;
    let mut rays = Vec::with_capacity(a.rays.len() + b.rays.len());
    for r in &a.rays {
        let mut v = r.0.clone();
        v.resize(d, 0);
        rays.push(LatticeVector(v));
    }
    for r in &b.rays {
        let mut v = vec![0; a.dimension];
        v.extend_from_slice(&r.0);
        rays.push(LatticeVector(v));
    }
    let off = a.rays.len();
    let mut maximal_cones = Vec::new();
    for ca in &a.maximal_cones {
        for cb in &b.maximal_cones {
            let mut c = ca.clone();
            c.extend(cb.iter().map(|i| i + off));
            maximal_cones.push(c);
        }
    }
    FanNd {
        dimension: d,
        rays,
        maximal_cones,
    }
}

/// Fan of a weighted projective space with one weight equal to 1: rays
/// `e_1, ..., e_d` and `-(w_1 e_1 + ... + w_d e_d)`, cones all `d`-subsets.
pub fn weighted_projective_fan(weights: &[i64]) -> Result<FanNd, FanNdError> {
    let d = weights.len();
    let mut rays: Vec<LatticeVector> = (0..d)
        .map(|i| {
            let mut v = vec![0; d];
            v[i] = 1;
            LatticeVector(v)
        })
        .collect();
    rays.push(LatticeVector(weights.iter().map(|w| -w).collect()));
    let cones = (0..=d)
        .map(|skip| (0..=d).filter(|&i| i != skip).collect())
        .collect();
    FanNd::new(d, rays, cones)
}

/// All faces, keyed by dimension `k` (number of generators).
pub fn faces(f: &FanNd) -> BTreeMap<usize, BTreeSet<Vec<usize>>> {
    let mut out: BTreeMap<usize, BTreeSet<Vec<usize>>> = BTreeMap::new();
    for cone in &f.maximal_cones {
        let d = cone.len();
        for mask in 1u32..(1 << d) {
            let face: Vec<usize> = (0..d)
                .filter(|k| mask >> k & 1 == 1)
                .map(|k| cone[k])
                .collect();
            out.entry(face.len()).or_default().insert(face);
        }
    }
    out
}

/// Cone counts and the identities they satisfy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub dimension: usize,
    /// `counts[k-1] = |Sigma(k)|`
    pub counts: Vec<usize>,
    /// Non-smooth cones per dimension, same indexing.
    pub singular_counts: Vec<usize>,
    /// Non-smooth cones all of whose proper faces are smooth.
    pub minimal_singular_counts: Vec<usize>,
    pub euler_characteristic: i64,
    pub euler_ok: bool,
    pub binomial_ok: bool,
    pub picard_number: i64,
    /// `rho + d == |Sigma(1)|`
    pub picard_identity: bool,
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

pub fn census(f: &FanNd) -> CensusReport {
    let d = f.dimension;
    let all = faces(f);
    let mut counts = Vec::with_capacity(d);
    let mut singular_counts = Vec::with_capacity(d);
    let mut minimal = Vec::with_capacity(d);
    let mut smooth: BTreeSet<Vec<usize>> = BTreeSet::new();
    for k in 1..=d {
        let level = all.get(&k).cloned().unwrap_or_default();
        counts.push(level.len());
        let mut sing = 0;
        let mut min_sing = 0;
        for face in &level {
            if f.cone_is_smooth(face) {
                smooth.insert(face.clone());
                continue;
            }
            sing += 1;
            let facets_smooth = (0..face.len()).all(|skip| {
                let sub: Vec<usize> = face
                    .iter()
                    .enumerate()
                    .filter(|&(t, _)| t != skip)
                    .map(|(_, &i)| i)
                    .collect();
                sub.is_empty() || smooth.contains(&sub)
            });
            if facets_smooth {
                min_sing += 1;
            }
        }
        singular_counts.push(sing);
        minimal.push(min_sing);
    }
    let euler: i64 = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| if i % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum();
    let expected = 1 - if d.is_multiple_of(2) { 1 } else { -1 };
    let n1 = counts[0] as u64;
    let binomial_ok = (1..d).all(|k| counts[k - 1] as u128 <= binomial(n1, k as u64));
    let rho = f.picard_number();
    CensusReport {
        dimension: d,
        euler_characteristic: euler,
        euler_ok: euler == expected,
        binomial_ok,
        picard_number: rho,
        picard_identity: rho + d as i64 == counts[0] as i64,
        counts,
        singular_counts,
        minimal_singular_counts: minimal,
    }
}

/// Number of non-smooth `k`-dimensional cones.
pub fn singular_orbit_count(f: &FanNd, k: usize) -> Result<usize, FanNdError> {
    let d = f.dimension;
    if k < 2 || k > d {
        return Err(FanNdError::ConeDimension { k, d });
    }
    Ok(faces(f).get(&k).map_or(0, |level| {
        level.iter().filter(|c| !f.cone_is_smooth(c)).count()
    }))
}

/// Reference fans in dimensions 2, 3 and 4.
pub fn fixture_library() -> Vec<(String, FanNd)> {
    let plane = weighted_projective_fan(&[1, 1]).expect("plane");
    let line = FanNd {
        dimension: 1,
        rays: vec![LatticeVector(vec![1]), LatticeVector(vec![-1])],
        maximal_cones: vec![vec![0], vec![1]],
    };
    let quadric = product(&line, &line);
    let mut out = vec![
        ("P2".to_string(), plane.clone()),
        ("P1xP1".to_string(), quadric.clone()),
        (
            "P(1,1,2)".to_string(),
            weighted_projective_fan(&[1, 2]).expect("wps"),
        ),
        (
            "parabola-3".to_string(),
            FanNd::from_fan2(&crate::toric::parabola_fan(3).expect("family")),
        ),
        (
            "parabola-6".to_string(),
            FanNd::from_fan2(&crate::toric::parabola_fan(6).expect("family")),
        ),
        (
            "P3".to_string(),
            weighted_projective_fan(&[1, 1, 1]).expect("P3"),
        ),
        (
            "P(1,1,1,2)".to_string(),
            weighted_projective_fan(&[1, 1, 2]).expect("wps"),
        ),
        (
            "P(1,1,2,3)".to_string(),
            weighted_projective_fan(&[1, 2, 3]).expect("wps"),
        ),
        ("P2xP1".to_string(), product(&plane, &line)),
        ("P1xP1xP1".to_string(), product(&quadric, &line)),
        (
            "P4".to_string(),
            weighted_projective_fan(&[1, 1, 1, 1]).expect("P4"),
        ),
        (
            "P(1,1,1,2,5)".to_string(),
            weighted_projective_fan(&[1, 1, 2, 5]).expect("wps"),
        ),
        ("P2xP2".to_string(), product(&plane, &plane)),
        (
            "P3xP1".to_string(),
            product(&weighted_projective_fan(&[1, 1, 1]).expect("P3"), &line),
        ),
        (
            "P(1,1,2)xP(1,1,2)".to_string(),
            product(
                &weighted_projective_fan(&[1, 2]).expect("wps"),
                &weighted_projective_fan(&[1, 2]).expect("wps"),
            ),
        ),
    ];
    // products go through the validating constructor too
    for (_, f) in out.iter_mut() {
        *f = FanNd::new(f.dimension, f.rays.clone(), f.maximal_cones.clone())
            .expect("fixture fans are valid");
    }
    out
}
