use serde::Serialize;

use super::{anticanonical_positivity, quotient_type, Fan2, FanError, Positivity, Ray};

/// `n <= 2 rho + 2` for toric surfaces with `-K` ample.
pub const FANO_BOUND: &str = "fano-2rho+2";
/// `n <= 2 rho + 4` for toric surfaces with `-K` nef.
pub const NEF_BOUND: &str = "nef-2rho+4";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SingularPoint {
    pub cone_rays: [Ray; 2],
    pub r: u64,
    pub a: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub limit: i64,
    pub value: i64,
    pub pass: bool,
}

impl BoundCheck {
    fn new(name: &str, limit: i64, value: i64) -> Self {
        BoundCheck {
            name: name.to_string(),
            limit,
            value,
            pass: value <= limit,
        }
    }

    pub fn slack(&self) -> i64 {
        self.limit - self.value
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ToricSurfaceReport {
    pub rays: Vec<Ray>,
    pub picard_number: usize,
    pub singular_points: Vec<SingularPoint>,
    pub positivity: Positivity,
    /// Only the bounds whose hypotheses hold for this surface.
    pub bounds: Vec<BoundCheck>,
}

impl ToricSurfaceReport {
    pub fn singular_count(&self) -> usize {
        self.singular_points.len()
    }

    pub fn bound(&self, name: &str) -> Option<&BoundCheck> {
        self.bounds.iter().find(|b| b.name == name)
    }

    pub fn all_pass(&self) -> bool {
        self.bounds.iter().all(|b| b.pass)
    }
}

pub fn census(f: &Fan2) -> ToricSurfaceReport {
    let singular_points: Vec<SingularPoint> = f
        .cones()
        .filter(|c| !c.is_smooth())
        .map(|c| {
            let q = quotient_type(&c);
            SingularPoint {
                cone_rays: c.generators(),
                r: q.r,
                a: q.a,
            }
        })
        .collect();
    let rho = f.picard_number() as i64;
    let n = singular_points.len() as i64;
    let positivity = anticanonical_positivity(f);
    let mut bounds = Vec::new();
    if positivity == Positivity::Ample {
        bounds.push(BoundCheck::new(FANO_BOUND, 2 * rho + 2, n));
    }
    // K is never numerically trivial on a complete toric surface
    if positivity.is_nef() {
        bounds.push(BoundCheck::new(NEF_BOUND, 2 * rho + 4, n));
    }
    ToricSurfaceReport {
        rays: f.rays().to_vec(),
        picard_number: f.picard_number(),
        singular_points,
        positivity,
        bounds,
    }
}

/// Fan on `-e1` and `(i, i^2 - 1)` for `0 <= i <= n`: ample anticanonical
/// class with Picard number `n` and `n` singular points.
pub fn parabola_fan(n: i64) -> Result<Fan2, FanError> {
    if n < 2 {
        return Err(FanError::InvalidParameter(n));
    }
    let mut rays = vec![[-1, 0]];
    rays.extend((0..=n).map(|i| [i, i * i - 1]));
    Fan2::from_primitive(rays)
}
