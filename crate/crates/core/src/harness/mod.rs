//! Claim registry, verification records, scans and the golden suite.

mod scan;
mod suite;

pub use scan::{
    canonical_bytes, fan_record, scan, splitmix64, write_records, ScanConfig, ScanOutput,
    ScanSummary,
};
pub use suite::{golden_suite, golden_suite_on, ClaimOutcome, SuiteReport};

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// One checked statement: which operation checks it and what relation it
/// expects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Claim {
    pub id: &'static str,
    pub anchor: &'static str,
    pub operation: &'static str,
    pub relation: &'static str,
}

pub const CLAIMS: &[Claim] = &[
    Claim {
        id: "toric-family-count",
        anchor: "toric fan family on -e1 and (i, i^2-1)",
        operation: "toric::parabola_fan + toric::census",
        relation: "ample, rho = n, exactly n singular points",
    },
    Claim {
        id: "fano-singular-bound",
        anchor: "klt Fano surfaces: singular points bounded by Picard number",
        operation: "toric::census",
        relation: "n <= 2 rho + 2 when -K is ample",
    },
    Claim {
        id: "nef-singular-bound",
        anchor: "klt surfaces with -K nef: singular points bounded by Picard number",
        operation: "toric::census",
        relation: "n <= 2 rho + 4 when -K is nef",
    },
    Claim {
        id: "mmp-singular-drop",
        anchor: "a divisorial contraction removes at most two singular points",
        operation: "toric::toric_mmp",
        relation: "at most 2 singular cones on the contracted ray; n(before) <= n(after) + 2",
    },
    Claim {
        id: "double-blowup-a1-points",
        anchor: "double blow-up of the quadric contracted to 2n A1 points",
        operation: "surface::scenario_double_blowup",
        relation: "2n points of type 1/2(1,1), discrepancies 0, rho = 2",
    },
    Claim {
        id: "double-blowup-effective-anticanonical",
        anchor: "all points on one horizontal fiber: -K effective",
        operation: "surface::scenario_double_blowup",
        relation: "-K_S = 4F1_S + 2R1_S with an effective pullback",
    },
    Claim {
        id: "double-blowup-log-calabi-yau",
        anchor: "four points on two horizontal fibers: log Calabi-Yau pair",
        operation: "surface::scenario_double_blowup",
        relation: "K_S + R1_S + R2_S = 0",
    },
    Claim {
        id: "double-blowup-fano-optimal",
        anchor: "three points on distinct horizontal fibers: klt Fano with 2 rho + 2 points",
        operation: "surface::scenario_double_blowup",
        relation: "-K_S = 2R_k, R_k^2 = 1/2, n = 6 = 2 rho + 2",
    },
    Claim {
        id: "fiber-contraction-log-discrepancy",
        anchor: "contracting the horizontal fiber after the A1 points",
        operation: "surface::scenario_fiber_contraction",
        relation: "a(R1_S, T) = (4-n)/n; klt, lc, non-lc flip at n = 4",
    },
    Claim {
        id: "fiber-contraction-point-count",
        anchor: "rank one target with n + 1 singular points",
        operation: "surface::scenario_fiber_contraction",
        relation: "n(T) = n + 1, rho(T) = 1",
    },
    Claim {
        id: "fiber-contraction-class-identity",
        anchor: "anti-log-canonical class on the intermediate surface",
        operation: "surface::scenario_fiber_contraction",
        relation: "D = 4F1_S + (4/n)R1_S, nD = 4R'_S, D.R1_S = 0",
    },
    Claim {
        id: "hj-cross-check",
        anchor: "discrepancies of cyclic quotient singularities",
        operation: "toric::resolve_singularity vs surface::chain_discrepancies",
        relation: "equal exact discrepancies for all 1/r(1,a), r <= 50",
    },
    Claim {
        id: "fan-census-euler",
        anchor: "simplicial complete fans triangulate a sphere",
        operation: "fan_census::census",
        relation: "sum (-1)^(k-1) |Sigma(k)| = 1 - (-1)^d",
    },
    Claim {
        id: "fan-census-binomial",
        anchor: "cone counts bounded by binomials in the number of rays",
        operation: "fan_census::census",
        relation: "|Sigma(k)| <= C(|Sigma(1)|, k) for k < d, rho + d = |Sigma(1)|",
    },
    Claim {
        id: "wps-family-count",
        anchor: "weighted threefold family with unbounded isolated singularities",
        operation: "wps::audit_family",
        relation: "2k + 3 points with orders 3 x (2k+1), 3k+1, 3k+2",
    },
];

/// Registry lookup; every record refers to claims through this table.
pub fn claim(id: &str) -> &'static Claim {
    CLAIMS
        .iter()
        .find(|c| c.id == id)
        .unwrap_or_else(|| panic!("claim {id:?} is not registered"))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Check {
    pub claim: &'static str,
    pub anchor: &'static str,
    pub pass: bool,
    pub witness: String,
}

impl Check {
    pub fn new(id: &str, pass: bool, witness: impl Into<String>) -> Self {
        let c = claim(id);
        Check {
            claim: c.id,
            anchor: c.anchor,
            pass,
            witness: witness.into(),
        }
    }
}

/// Checks run against one subject (a fan, a scenario, a family instance).
/// Records carry no timestamps, so equal inputs serialize to equal bytes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct VerificationRecord {
    pub subject: String,
    pub source: String,
    pub checks: Vec<Check>,
}

impl VerificationRecord {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}
