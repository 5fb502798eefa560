//! Complete two-dimensional fans and the toric surfaces they define.

mod census;
mod enumerate;
mod intersection;
mod mmp;
mod singularity;

pub use census::{
    census, parabola_fan, BoundCheck, SingularPoint, ToricSurfaceReport, FANO_BOUND, NEF_BOUND,
};
pub use enumerate::{gl2_normal_form, ldp_enumerate, ldp_enumerate_with, random_complete_fan};
pub use intersection::{
    anticanonical_degrees, anticanonical_positivity, canonical_degree, self_intersection,
    toric_intersection, Positivity,
};
pub use mmp::{contract_ray, toric_mmp, MmpRun, StepReport};
pub use singularity::{
    hj_evaluate, hj_expand, quotient_type, resolve_singularity, HJResolution, QuotientSingularity,
};

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{cross, primitive, LatticeError, LatticeVector};

pub type Ray = [i64; 2];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanError {
    #[error("a complete fan needs at least 3 rays, got {0}")]
    TooFewRays(usize),
    #[error("duplicate ray direction {0}")]
    DuplicateRay(LatticeVector),
    #[error("rays lie in a closed half-plane; fan is not complete")]
    NotComplete,
    #[error("ray index {index} out of range for a fan with {len} rays")]
    RayIndex { index: usize, len: usize },
    #[error("ray {index} spans a curve with self-intersection {self_intersection} >= 0; not contractible")]
    NotContractible {
        index: usize,
        self_intersection: String,
    },
    #[error("ray {index} has K.D = {canonical_degree} >= 0; not a K-negative step")]
    NotKNegative {
        index: usize,
        canonical_degree: String,
    },
    #[error("family parameter {0} is out of range")]
    InvalidParameter(i64),
    #[error("cone generator {0} is not primitive")]
    NotPrimitive(LatticeVector),
    #[error("cone generators are linearly dependent")]
    DegenerateCone,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Counterclockwise angular comparison of nonzero plane vectors, starting
/// from the positive x-axis.
pub(crate) fn angle_cmp(a: Ray, b: Ray) -> Ordering {
    fn half(v: Ray) -> u8 {
        if v[1] > 0 || (v[1] == 0 && v[0] > 0) {
            0
        } else {
            1
        }
    }
    half(a).cmp(&half(b)).then_with(|| 0.cmp(&cross(a, b)))
}

/// A complete fan in `R^2`: primitive rays in counterclockwise order, rotated
/// so that the lexicographically smallest ray comes first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fan2 {
    rays: Vec<Ray>,
}

/// Primitivizes, sorts and validates a set of rays.
pub fn fan_from_rays(rays: &[LatticeVector]) -> Result<Fan2, FanError> {
    let mut prim = Vec::with_capacity(rays.len());
    for v in rays {
        if v.dim() != 2 {
            return Err(LatticeError::DimensionMismatch {
                expected: 2,
                got: v.dim(),
            }
            .into());
        }
        let p = primitive(v)?;
        prim.push([p.0[0], p.0[1]]);
    }
    Fan2::from_primitive(prim)
}

impl Fan2 {
    /// Builds a fan from already-primitive rays in any order.
    pub fn from_primitive(mut rays: Vec<Ray>) -> Result<Fan2, FanError> {
        if rays.len() < 3 {
            return Err(FanError::TooFewRays(rays.len()));
        }
        rays.sort_by(|&a, &b| angle_cmp(a, b));
        for w in rays.windows(2) {
            if angle_cmp(w[0], w[1]) == Ordering::Equal {
                return Err(FanError::DuplicateRay(w[0].into()));
            }
        }
        let n = rays.len();
        if (0..n).any(|i| cross(rays[i], rays[(i + 1) % n]) <= 0) {
            return Err(FanError::NotComplete);
        }
        Ok(Self::from_ccw_unchecked(rays))
    }

    /// Takes rays already in counterclockwise cyclic order and rotates them
    /// into canonical position.
    pub(crate) fn from_ccw_unchecked(mut rays: Vec<Ray>) -> Fan2 {
        let start = (0..rays.len()).min_by_key(|&i| rays[i]).unwrap_or(0);
        rays.rotate_left(start);
        Fan2 { rays }
    }

    pub fn from_pairs(pairs: &[(i64, i64)]) -> Result<Fan2, FanError> {
        let v: Vec<LatticeVector> = pairs.iter().map(|&(x, y)| [x, y].into()).collect();
        fan_from_rays(&v)
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    pub fn ray_vectors(&self) -> Vec<LatticeVector> {
        self.rays.iter().map(|&r| r.into()).collect()
    }

    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    /// Cyclic ray access.
    pub fn ray(&self, i: isize) -> Ray {
        let n = self.rays.len() as isize;
        self.rays[i.rem_euclid(n) as usize]
    }

    pub fn picard_number(&self) -> usize {
        self.rays.len() - 2
    }

    /// Index of the maximal cone spanned by rays `i` and `i+1`.
    pub fn cone_index(&self, i: usize) -> i128 {
        cross(self.ray(i as isize), self.ray(i as isize + 1))
    }

    /// Maximal cones `Cone(u_i, u_{i+1})` in order.
    pub fn cones(&self) -> impl Iterator<Item = Cone2> + '_ {
        (0..self.len()).map(move |i| Cone2 {
            generators: [self.ray(i as isize), self.ray(i as isize + 1)],
        })
    }

    /// Number of maximal cones of index greater than one.
    pub fn singular_count(&self) -> usize {
        (0..self.len()).filter(|&i| self.cone_index(i) > 1).count()
    }

    /// Image under an integer 2x2 matrix (rows `m[0]`, `m[1]`).
    pub fn transform(&self, m: [[i64; 2]; 2]) -> Result<Fan2, FanError> {
        let rays = self
            .rays
            .iter()
            .map(|&[x, y]| [m[0][0] * x + m[0][1] * y, m[1][0] * x + m[1][1] * y])
            .collect();
        Fan2::from_primitive(rays)
    }

    pub(crate) fn without_ray(&self, i: usize) -> Fan2 {
        let mut rays = self.rays.clone();
        rays.remove(i);
        Fan2::from_ccw_unchecked(rays)
    }
}

impl fmt::Display for Fan2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .rays
            .iter()
            .map(|r| format!("({},{})", r[0], r[1]))
            .collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// On-disk fan description: `{"rays": [[x, y], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanFile {
    pub rays: Vec<Vec<i64>>,
}

impl FanFile {
    pub fn from_fan(f: &Fan2) -> Self {
        FanFile {
            rays: f.rays.iter().map(|r| r.to_vec()).collect(),
        }
    }

    pub fn to_fan(&self) -> Result<Fan2, FanError> {
        let rays: Vec<LatticeVector> = self
            .rays
            .iter()
            .map(|r| LatticeVector::new(r.clone()))
            .collect();
        fan_from_rays(&rays)
    }
}

/// Two-dimensional cone with positively oriented primitive generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cone2 {
    generators: [Ray; 2],
}

impl Cone2 {
    /// Orders the generators so that their determinant is positive.
    pub fn new(a: Ray, b: Ray) -> Result<Cone2, FanError> {
        for v in [a, b] {
            if !LatticeVector::from(v).is_primitive() {
                return Err(FanError::NotPrimitive(v.into()));
            }
        }
        match cross(a, b) {
            0 => Err(FanError::DegenerateCone),
            d if d > 0 => Ok(Cone2 { generators: [a, b] }),
            _ => Ok(Cone2 { generators: [b, a] }),
        }
    }

    pub fn generators(&self) -> [Ray; 2] {
        self.generators
    }

    pub fn index(&self) -> u64 {
        cross(self.generators[0], self.generators[1]) as u64
    }

    pub fn is_smooth(&self) -> bool {
        self.index() == 1
    }
}
