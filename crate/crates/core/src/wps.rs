//! Coordinate strata of a weighted projective space and the points a general
//! hypersurface of given degree has on them.
//!
//! Only two kinds of strata are counted: coordinate vertices, and coordinate
//! lines joining two equal weights `w` with `w | d` whose stabilizer is not
//! shared by any other weight. Everything else with a nontrivial stabilizer
//! is flagged for manual analysis.

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WpsError {
    #[error("weights and degree must be positive")]
    NonPositive,
    #[error("need at least two weights, got {0}")]
    TooFewWeights(usize),
    #[error("index {index} out of range for {len} weights")]
    Index { index: usize, len: usize },
    #[error("coordinates {i} and {j} have coprime weights")]
    TrivialStabilizer { i: usize, j: usize },
    #[error("family parameter must be at least 1, got {0}")]
    Parameter(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightedFamily {
    pub weights: Vec<u64>,
    pub degree: u64,
}

impl WeightedFamily {
    pub fn new(weights: Vec<u64>, degree: u64) -> Result<Self, WpsError> {
        if weights.len() < 2 {
            return Err(WpsError::TooFewWeights(weights.len()));
        }
        if degree == 0 || weights.contains(&0) {
            return Err(WpsError::NonPositive);
        }
        Ok(WeightedFamily { weights, degree })
    }

    /// Degree `6k+3` hypersurfaces in `P(1, 3, 3, 3k+1, 3k+2)`.
    pub fn series(k: u64) -> Result<Self, WpsError> {
        if k < 1 {
            return Err(WpsError::Parameter(k));
        }
        Self::new(vec![1, 3, 3, 3 * k + 1, 3 * k + 2], 6 * k + 3)
    }

    fn check(&self, i: usize) -> Result<u64, WpsError> {
        self.weights.get(i).copied().ok_or(WpsError::Index {
            index: i,
            len: self.weights.len(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "membership", rename_all = "snake_case")]
pub enum VertexMembership {
    OnMember { stabilizer: u64 },
    OffMember,
}

/// The coordinate point `P_i` lies on the general member exactly when no
/// pure power of `x_i` has degree `d`.
pub fn vertex_membership(f: &WeightedFamily, i: usize) -> Result<VertexMembership, WpsError> {
    let w = f.check(i)?;
    Ok(if f.degree.is_multiple_of(w) {
        VertexMembership::OffMember
    } else {
        VertexMembership::OnMember { stabilizer: w }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StratumCount {
    /// `count` points, each with stabilizer of order at least `order`.
    Points {
        count: u64,
        order: u64,
    },
    Flagged {
        reason: String,
    },
}

/// Points of the general member on the coordinate line through `P_i` and
/// `P_j`, away from the two vertices.
pub fn stratum_points(f: &WeightedFamily, i: usize, j: usize) -> Result<StratumCount, WpsError> {
    let (wi, wj) = (f.check(i)?, f.check(j)?);
    let g = wi.gcd(&wj);
    if i == j || g == 1 {
        return Err(WpsError::TrivialStabilizer { i, j });
    }
    let flag = |reason: String| Ok(StratumCount::Flagged { reason });
    if wi != wj {
        return flag(format!(
            "weights {wi} and {wj} differ; manual analysis required"
        ));
    }
    let w = wi;
    if !f.degree.is_multiple_of(w) {
        return flag(format!(
            "{w} does not divide {}: the line lies in every member; manual analysis required",
            f.degree
        ));
    }
    if let Some((k, wk)) = f
        .weights
        .iter()
        .enumerate()
        .find(|&(k, &wk)| k != i && k != j && wk % g == 0)
    {
        return flag(format!(
            "weight {wk} at index {k} shares the stabilizer: higher-dimensional stratum; manual analysis required"
        ));
    }
    // a general binary form of degree d/w in x_i, x_j
    Ok(StratumCount::Points {
        count: f.degree / w,
        order: w,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexEntry {
    pub index: usize,
    pub weight: u64,
    #[serde(flatten)]
    pub membership: VertexMembership,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StratumEntry {
    pub indices: [usize; 2],
    pub weights: [u64; 2],
    #[serde(flatten)]
    pub count: StratumCount,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StratumReport {
    pub weights: Vec<u64>,
    pub degree: u64,
    pub vertices: Vec<VertexEntry>,
    pub strata: Vec<StratumEntry>,
    /// Counted singular points; excludes anything flagged.
    pub total: u64,
    /// Stabilizer orders of the counted points, ascending.
    pub orders: Vec<u64>,
    pub flagged: usize,
    /// Singularity types for the `series` family, quoted rather than derived.
    pub quoted_types: Vec<String>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub counts: &'static str,
    pub types: &'static str,
}

pub fn audit(f: &WeightedFamily) -> StratumReport {
    let n = f.weights.len();
    let mut orders = Vec::new();
    let vertices: Vec<VertexEntry> = (0..n)
        .map(|i| {
            let membership = vertex_membership(f, i).expect("index in range");
            if let VertexMembership::OnMember { stabilizer } = membership {
                if stabilizer > 1 {
                    orders.push(stabilizer);
                }
            }
            VertexEntry {
                index: i,
                weight: f.weights[i],
                membership,
            }
        })
        .collect();
    let mut strata = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if f.weights[i].gcd(&f.weights[j]) == 1 {
                continue;
            }
            let count = stratum_points(f, i, j).expect("nontrivial stabilizer");
            if let StratumCount::Points { count, order } = count {
                orders.extend(std::iter::repeat_n(order, count as usize));
            }
            strata.push(StratumEntry {
                indices: [i, j],
                weights: [f.weights[i], f.weights[j]],
                count,
            });
        }
    }
    orders.sort_unstable();
    let flagged = strata
        .iter()
        .filter(|s| matches!(s.count, StratumCount::Flagged { .. }))
        .count();
    StratumReport {
        weights: f.weights.clone(),
        degree: f.degree,
        vertices,
        strata,
        total: orders.len() as u64,
        orders,
        flagged,
        quoted_types: Vec::new(),
        provenance: Provenance {
            counts: "derived",
            types: "none",
        },
    }
}

/// Audit of the `series` family with its quoted singularity types attached.
pub fn audit_family(k: u64) -> Result<StratumReport, WpsError> {
    let f = WeightedFamily::series(k)?;
    let mut r = audit(&f);
    r.quoted_types = vec![
        format!("1/{}(1,3,3)", 3 * k + 1),
        format!("1/{}(1,3,3)", 3 * k + 2),
        format!("{} x 1/3(1,1,2)", 2 * k + 1),
    ];
    r.provenance.types = "quoted";
    Ok(r)
}

/// Expected stabilizer orders for the family: `3` repeated `2k+1` times,
/// then `3k+1` and `3k+2`.
pub fn family_orders(k: u64) -> Vec<u64> {
    let mut v = vec![3; (2 * k + 1) as usize];
    v.extend([3 * k + 1, 3 * k + 2]);
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_vertices() {
        for k in 1..=20 {
            let f = WeightedFamily::series(k).unwrap();
            assert_eq!(
                vertex_membership(&f, 3).unwrap(),
                VertexMembership::OnMember {
                    stabilizer: 3 * k + 1
                }
            );
            assert_eq!(
                vertex_membership(&f, 4).unwrap(),
                VertexMembership::OnMember {
                    stabilizer: 3 * k + 2
                }
            );
            assert_eq!(
                vertex_membership(&f, 0).unwrap(),
                VertexMembership::OffMember
            );
            assert_eq!(
                vertex_membership(&f, 1).unwrap(),
                VertexMembership::OffMember
            );
        }
        let f = WeightedFamily::series(1).unwrap();
        assert!(vertex_membership(&f, 5).is_err());
    }

    #[test]
    fn family_line() {
        let f = WeightedFamily::new(vec![1, 3, 3, 4, 5], 9).unwrap();
        assert_eq!(
            stratum_points(&f, 1, 2).unwrap(),
            StratumCount::Points { count: 3, order: 3 }
        );
        assert!(stratum_points(&f, 0, 1).is_err());
        assert!(stratum_points(&f, 1, 1).is_err());
    }

    #[test]
    fn flags() {
        let f = WeightedFamily::new(vec![1, 2, 4, 5], 10).unwrap();
        assert!(matches!(
            stratum_points(&f, 1, 2).unwrap(),
            StratumCount::Flagged { .. }
        ));
        let f = WeightedFamily::new(vec![1, 2, 2, 3], 7).unwrap();
        assert!(matches!(
            stratum_points(&f, 1, 2).unwrap(),
            StratumCount::Flagged { .. }
        ));
        let f = WeightedFamily::new(vec![1, 2, 2, 4], 8).unwrap();
        assert!(matches!(
            stratum_points(&f, 1, 2).unwrap(),
            StratumCount::Flagged { .. }
        ));
        let r = audit(&f);
        assert!(r.flagged > 0);
    }

    #[test]
    fn family_audit() {
        let r = audit_family(1).unwrap();
        assert_eq!(r.total, 5);
        assert_eq!(r.orders, vec![3, 3, 3, 4, 5]);
        assert_eq!(r.flagged, 0);
        assert_eq!(audit_family(2).unwrap().total, 7);
        for k in 1..=100 {
            let r = audit_family(k).unwrap();
            assert_eq!(r.total, 2 * k + 3);
            assert_eq!(r.orders, family_orders(k));
        }
        assert!(audit_family(0).is_err());
    }

    #[test]
    fn vertex_rule_matches_monomials() {
        for w in 1..=50u64 {
            for d in 1..=300u64 {
                let f = WeightedFamily::new(vec![1, w], d).unwrap();
                let pure_power = (0..=d).any(|m| m * w == d);
                let on = matches!(
                    vertex_membership(&f, 1).unwrap(),
                    VertexMembership::OnMember { .. }
                );
                assert_eq!(on, !pure_power);
            }
        }
    }

    #[test]
    fn line_count_is_binary_form_degree() {
        for w in 2..=12u64 {
            for m in 1..=25u64 {
                let d = w * m;
                let f = WeightedFamily::new(vec![1, w, w], d).unwrap();
                // monomials x^a y^b of degree d span a binary form of degree #-1
                let monomials = (0..=d)
                    .flat_map(|a| (0..=d).map(move |b| (a, b)))
                    .filter(|&(a, b)| w * a + w * b == d)
                    .count() as u64;
                match stratum_points(&f, 1, 2).unwrap() {
                    StratumCount::Points { count, order } => {
                        assert_eq!(count, monomials - 1);
                        assert_eq!(order, w);
                    }
                    other => panic!("unexpected {other:?}"),
                }
            }
        }
    }

    #[test]
    fn rejects_bad_families() {
        assert!(WeightedFamily::new(vec![1], 3).is_err());
        assert!(WeightedFamily::new(vec![1, 0], 3).is_err());
        assert!(WeightedFamily::new(vec![1, 2], 0).is_err());
    }
}
