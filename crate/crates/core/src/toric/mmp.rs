//! Divisorial contractions of invariant curves and the greedy toric MMP.

use num_traits::Signed;
use serde::Serialize;

use super::{canonical_degree, self_intersection, Fan2, FanError, Ray};
use crate::lattice::fmt_rational;

/// Bookkeeping for one contraction `X -> Y` of the curve `D_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepReport {
    pub contracted_ray: Ray,
    pub picard_before: usize,
    pub self_intersection: String,
    pub canonical_degree: String,
    pub singular_before: usize,
    pub singular_after: usize,
    /// Singular maximal cones containing the contracted ray.
    pub adjacent_singular: usize,
}

impl StepReport {
    /// At most two singular points on the contracted curve, and the
    /// singular count drops by at most two.
    pub fn invariant_holds(&self) -> bool {
        self.adjacent_singular <= 2 && self.singular_before <= self.singular_after + 2
    }
}

/// Removes ray `i`, provided `D_i^2 < 0` and `K.D_i < 0`.
pub fn contract_ray(f: &Fan2, i: usize) -> Result<(Fan2, StepReport), FanError> {
    if i >= f.len() {
        return Err(FanError::RayIndex {
            index: i,
            len: f.len(),
        });
    }
    let self_int = self_intersection(f, i);
    if !self_int.is_negative() {
        return Err(FanError::NotContractible {
            index: i,
            self_intersection: fmt_rational(&self_int),
        });
    }
    let k_dot = canonical_degree(f, i);
    if !k_dot.is_negative() {
        return Err(FanError::NotKNegative {
            index: i,
            canonical_degree: fmt_rational(&k_dot),
        });
    }
    let n = f.len();
    let adjacent_singular = [(i + n - 1) % n, i]
        .into_iter()
        .filter(|&c| f.cone_index(c) > 1)
        .count();
    // D_i^2 < 0 forces det(u_{i-1}, u_{i+1}) > 0, so the result is complete
    let g = f.without_ray(i);
    let report = StepReport {
        contracted_ray: f.rays()[i],
        picard_before: f.picard_number(),
        self_intersection: fmt_rational(&self_int),
        canonical_degree: fmt_rational(&k_dot),
        singular_before: f.singular_count(),
        singular_after: g.singular_count(),
        adjacent_singular,
    };
    Ok((g, report))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MmpRun {
    pub steps: Vec<StepReport>,
    pub output: Fan2,
}

impl MmpRun {
    pub fn invariant_holds(&self) -> bool {
        self.steps.iter().all(StepReport::invariant_holds)
    }
}

/// Contracts the lowest-index K-negative curve of negative self-intersection
/// until none is left.
pub fn toric_mmp(f: &Fan2) -> MmpRun {
    let mut current = f.clone();
    let mut steps = Vec::new();
    loop {
        let next = (0..current.len()).find_map(|i| contract_ray(&current, i).ok());
        match next {
            Some((g, report)) => {
                steps.push(report);
                current = g;
            }
            None => break,
        }
    }
    MmpRun {
        steps,
        output: current,
    }
}
