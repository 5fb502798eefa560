//! Blow-ups of `P^1 x P^1` at points on distinct vertical fibers, followed by
//! a second blow-up on each exceptional curve, and the contractions built from
//! them.
//!
//! The points are `z_i = (u_i, v_i)` with distinct `u_i`; only which `v_i`
//! coincide matters, recorded as a partition of `1..=n`. Each block carries
//! one horizontal fiber `R_b` through its points.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{scale, ClassVector, ContractionResult, SingularityClass, SurfaceError, SurfaceModel};
use crate::lattice::{fmt_rational, int, rational};
use crate::toric::QuotientSingularity;

/// Which of the chosen points share their second coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct VPattern(Vec<Vec<usize>>);

impl VPattern {
    /// Validates and sorts a partition of `1..=n`; blocks are ordered by
    /// their least element.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self, SurfaceError> {
        if n == 0 {
            return Err(SurfaceError::InvalidPartition("n must be positive".into()));
        }
        let mut seen = vec![false; n + 1];
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        for b in &blocks {
            if b.is_empty() {
                return Err(SurfaceError::InvalidPartition("empty block".into()));
            }
            for &i in b {
                if i == 0 || i > n {
                    return Err(SurfaceError::InvalidPartition(format!(
                        "{i} is outside 1..={n}"
                    )));
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(SurfaceError::InvalidPartition(format!("{i} appears twice")));
                }
            }
        }
        if let Some(i) = (1..=n).find(|&i| !seen[i]) {
            return Err(SurfaceError::InvalidPartition(format!("{i} is missing")));
        }
        blocks.sort();
        Ok(VPattern(blocks))
    }

    pub fn all_equal(n: usize) -> Self {
        VPattern(vec![(1..=n).collect()])
    }

    pub fn all_distinct(n: usize) -> Self {
        VPattern((1..=n).map(|i| vec![i]).collect())
    }

    /// Every partition of `1..=n`, in restricted-growth order.
    pub fn all(n: usize) -> Vec<Self> {
        fn rec(i: usize, n: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<VPattern>) {
            if i > n {
                let mut b = blocks.clone();
                b.sort();
                out.push(VPattern(b));
                return;
            }
            for k in 0..blocks.len() {
                blocks[k].push(i);
                rec(i + 1, n, blocks, out);
                blocks[k].pop();
            }
            blocks.push(vec![i]);
            rec(i + 1, n, blocks, out);
            blocks.pop();
        }
        let mut out = Vec::new();
        if n > 0 {
            rec(1, n, &mut Vec::new(), &mut out);
        }
        out
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.iter().map(Vec::len).sum()
    }

    /// 1-based index of the block containing `i`.
    pub fn block_of(&self, i: usize) -> Option<usize> {
        self.0.iter().position(|b| b.contains(&i)).map(|k| k + 1)
    }
}

impl fmt::Display for VPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|b| b.iter().map(usize::to_string).collect::<Vec<_>>().join(","))
            .collect();
        f.write_str(&parts.join("|"))
    }
}

impl FromStr for VPattern {
    type Err = SurfaceError;

    /// Blocks separated by `|`, elements by `,`: `"1,3|2,4"`.
    fn from_str(s: &str) -> Result<Self, SurfaceError> {
        let blocks = s
            .split('|')
            .map(|b| {
                b.split(',')
                    .map(|x| {
                        x.trim().parse::<usize>().map_err(|_| {
                            SurfaceError::InvalidPartition(format!("bad element {x:?}"))
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let n = blocks.iter().map(Vec::len).sum();
        VPattern::new(n, blocks)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Identity {
    /// Which part of the statement this identity belongs to.
    pub group: String,
    pub lhs: String,
    pub rhs: String,
    pub equal: bool,
}

impl Identity {
    fn new(lhs: impl Into<String>, rhs: impl Into<String>, equal: bool) -> Self {
        Identity {
            group: String::new(),
            lhs: lhs.into(),
            rhs: rhs.into(),
            equal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub n: usize,
    pub pattern: VPattern,
    /// Contracted curve to discrepancy, as exact `p/q` strings.
    pub discrepancies: BTreeMap<String, String>,
    pub components: Vec<Vec<String>>,
    pub picard_number: usize,
    pub classification: SingularityClass,
    pub quantities: BTreeMap<String, String>,
    pub identities: Vec<Identity>,
}

impl ScenarioReport {
    pub fn all_hold(&self) -> bool {
        self.identities.iter().all(|i| i.equal)
    }

    pub fn failures(&self) -> Vec<&Identity> {
        self.identities.iter().filter(|i| !i.equal).collect()
    }
}

/// Assigns `group` to identities pushed since the last call.
fn tag(ids: &mut [Identity], group: &str) {
    for i in ids.iter_mut().filter(|i| i.group.is_empty()) {
        i.group = group.to_string();
    }
}

fn label(prefix: &str, i: usize) -> String {
    format!("{prefix}{i}")
}

/// The surface `X` together with its curve labels: `L{i}`, `E{i}`, `F{i}`,
/// `R{b}` per block and a general horizontal fiber `R'`.
pub fn build_x(pattern: &VPattern) -> Result<SurfaceModel, SurfaceError> {
    build_x_on(&SurfaceModel::start_quadric(), pattern)
}

/// As [`build_x`], starting from any model that tracks fiber classes `L`
/// and `R`.
pub fn build_x_on(base: &SurfaceModel, pattern: &VPattern) -> Result<SurfaceModel, SurfaceError> {
    let n = pattern.n();
    let z = base.clone();
    let fiber_l = z.class("L")?.to_vec();
    let fiber_r = z.class("R")?.to_vec();
    let mut s = z;
    for i in 1..=n {
        s = s.with_curve(&label("L", i), fiber_l.clone(), 0)?;
    }
    for b in 1..=pattern.blocks().len() {
        s = s.with_curve(&label("R", b), fiber_r.clone(), 0)?;
    }
    s = s.with_curve("R'", fiber_r, 0)?;
    for i in 1..=n {
        let r = label("R", pattern.block_of(i).expect("partition covers 1..=n"));
        s = s.into_blow_up(&label("E", i), &[(&label("L", i), 1), (&r, 1)])?;
    }
    for i in 1..=n {
        s = s.into_blow_up(&label("F", i), &[(&label("L", i), 1), (&label("E", i), 1)])?;
    }
    Ok(s)
}

fn contract_labels(n: usize, with_r1: bool) -> Vec<String> {
    let mut v: Vec<String> = (1..=n).map(|i| label("E", i)).collect();
    v.extend((1..=n).map(|i| label("L", i)));
    // the R-curve meets every E; keeping it last keeps elimination sparse
    if with_r1 {
        v.push("R1".into());
    }
    v
}

fn contract_on(x: &SurfaceModel, labels: &[String]) -> Result<ContractionResult, SurfaceError> {
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    x.contract(&refs)
}

fn discrepancy_strings(c: &ContractionResult) -> BTreeMap<String, String> {
    c.discrepancies()
        .iter()
        .map(|(k, v)| (k.clone(), fmt_rational(v)))
        .collect()
}

fn neg(v: &[BigRational]) -> ClassVector {
    v.iter().map(|x| -x).collect()
}

fn add(a: &[BigRational], b: &[BigRational]) -> ClassVector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn mul(c: &BigRational, v: &[BigRational]) -> ClassVector {
    v.iter().map(|x| x * c).collect()
}

fn equiv(
    s: &ContractionResult,
    lhs: &str,
    a: &[BigRational],
    rhs: &str,
    b: &[BigRational],
) -> Result<Identity, SurfaceError> {
    Ok(Identity::new(lhs, rhs, s.check_equiv(a, b)?))
}

/// Blow-up of `n` points with the given coincidences among second
/// coordinates, then contraction of all `E_{i,X}` and `L_{i,X}`.
pub fn scenario_double_blowup(
    pattern: &VPattern,
) -> Result<(SurfaceModel, ContractionResult, ScenarioReport), SurfaceError> {
    scenario_double_blowup_on(&SurfaceModel::start_quadric(), pattern)
}

pub fn scenario_double_blowup_on(
    base: &SurfaceModel,
    pattern: &VPattern,
) -> Result<(SurfaceModel, ContractionResult, ScenarioReport), SurfaceError> {
    let n = pattern.n();
    let x = build_x_on(base, pattern)?;
    let s = contract_on(&x, &contract_labels(n, false))?;
    let mut ids = Vec::new();
    let mut quantities = BTreeMap::new();

    ids.push(Identity::new(
        format!("n(S) = {}", s.point_count()),
        format!("2n = {}", 2 * n),
        s.point_count() == 2 * n,
    ));
    ids.push(Identity::new(
        format!("rho(S) = {}", s.picard_number()),
        "2",
        s.picard_number() == 2,
    ));
    ids.push(Identity::new(
        "discrepancies of contracted curves",
        "0",
        s.discrepancies().values().all(Zero::is_zero),
    ));
    let a1 = QuotientSingularity::new(2, 1).expect("valid type");
    ids.push(Identity::new(
        "types of singular points",
        "1/2(1,1)",
        s.point_types().iter().all(|t| *t == Some(a1)),
    ));
    ids.push(Identity::new(
        "adjunction on X",
        "K.C = -2 - C^2",
        x.adjunction_failures().is_empty(),
    ));
    tag(&mut ids, "points");

    let k_s = s.canonical();
    let blocks = pattern.blocks().len();
    if blocks == 1 {
        let rhs = x.combine(&[(int(4), "F1"), (int(2), "R1")])?;
        ids.push(equiv(&s, "-K_S", &neg(&k_s), "4F1_S + 2R1_S", &rhs)?);
        let mut terms = vec![
            (int(2), "L1"),
            (int(2), "E1"),
            (int(4), "F1"),
            (int(2), "R1"),
        ];
        let e_labels: Vec<String> = (1..=n).map(|i| label("E", i)).collect();
        terms.extend(e_labels.iter().map(|l| (int(1), l.as_str())));
        let witness = x.combine(&terms)?;
        ids.push(Identity::new(
            "h^*(-K_S)",
            "2L1_X + 2E1_X + 4F1 + 2R1_X + sum E_i,X",
            neg(&k_s) == witness,
        ));
        tag(&mut ids, "effective");
    }
    if n == 4 && blocks == 2 {
        let b = x.combine(&[(int(1), "R1"), (int(1), "R2")])?;
        let lhs = add(&k_s, &b);
        ids.push(equiv(
            &s,
            "K_S + R1_S + R2_S",
            &lhs,
            "0",
            &vec![BigRational::zero(); x.rank()],
        )?);
        tag(&mut ids, "calabi-yau");
    }
    if n == 3 && blocks == 3 {
        for k in 1..=3 {
            let r = label("R", k);
            let rk = x.class(&r)?.to_vec();
            ids.push(equiv(
                &s,
                "-K_S",
                &neg(&k_s),
                &format!("2{r}_S"),
                &scale(2, &rk),
            )?);
            let sq = s.pairing(&rk, &rk)?;
            quantities.insert(format!("{r}_S^2"), fmt_rational(&sq));
            ids.push(Identity::new(
                format!("{r}_S^2 = {}", fmt_rational(&sq)),
                "1/2",
                sq == rational(1, 2),
            ));
        }
        let rho = s.picard_number();
        ids.push(Identity::new(
            format!("n(S) = {}", s.point_count()),
            format!("2rho(S) + 2 = {}", 2 * rho + 2),
            s.point_count() == 2 * rho + 2,
        ));
        tag(&mut ids, "fano");
    }
    let k_sq = s.pairing(x.canonical(), x.canonical())?;
    quantities.insert("K_S^2".into(), fmt_rational(&k_sq));

    let report = ScenarioReport {
        scenario: "double-blowup".into(),
        n,
        pattern: pattern.clone(),
        discrepancies: discrepancy_strings(&s),
        components: s.components().to_vec(),
        picard_number: s.picard_number(),
        classification: s.classification(),
        quantities,
        identities: ids,
    };
    Ok((x, s, report))
}

/// All points on one horizontal fiber, followed by the further contraction
/// of that fiber: `X -> S -> T`.
pub fn scenario_fiber_contraction(n: usize) -> Result<ScenarioReport, SurfaceError> {
    scenario_fiber_contraction_on(&SurfaceModel::start_quadric(), n)
}

pub fn scenario_fiber_contraction_on(
    base: &SurfaceModel,
    n: usize,
) -> Result<ScenarioReport, SurfaceError> {
    if n < 3 {
        return Err(SurfaceError::InvalidParameter(format!(
            "n must be at least 3, got {n}"
        )));
    }
    let pattern = VPattern::all_equal(n);
    let x = build_x_on(base, &pattern)?;
    let s = contract_on(&x, &contract_labels(n, false))?;
    let t = contract_on(&x, &contract_labels(n, true))?;
    let nn = n as i64;
    let mut ids = Vec::new();
    let mut quantities = BTreeMap::new();

    let a_r = t.log_discrepancy("R1").expect("R1 is contracted");
    let expected = rational(4 - nn, nn);
    quantities.insert("a(R1_S,T)".into(), fmt_rational(&a_r));
    ids.push(Identity::new(
        format!("a(R1_S,T) = {}", fmt_rational(&a_r)),
        format!("(4-n)/n = {}", fmt_rational(&expected)),
        a_r == expected,
    ));
    tag(&mut ids, "discrepancy");
    ids.push(Identity::new(
        format!("n(T) = {}", t.point_count()),
        format!("n+1 = {}", n + 1),
        t.point_count() == n + 1,
    ));
    ids.push(Identity::new(
        format!("rho(T) = {}", t.picard_number()),
        "1",
        t.picard_number() == 1,
    ));
    tag(&mut ids, "points");

    let k_s = s.canonical();
    let r1 = x.class("R1")?.to_vec();
    let f1 = x.class("F1")?.to_vec();
    let f2 = x.class("F2")?.to_vec();
    let r_gen = x.class("R'")?.to_vec();
    let d = neg(&add(&k_s, &mul(&rational(2 * (nn - 2), nn), &r1)));
    let four_f1 = scale(4, &f1);
    ids.push(equiv(
        &s,
        "D = -(K_S + 2(n-2)/n R1_S)",
        &d,
        "4F1_S + (4/n)R1_S",
        &add(&four_f1, &mul(&rational(4, nn), &r1)),
    )?);
    let nd = scale(nn, &d);
    let via_f1 = add(&scale(4 * nn, &f1), &scale(4, &r1));
    let via_f2 = add(&scale(4 * nn, &f2), &scale(4, &r1));
    ids.push(equiv(&s, "nD", &nd, "4nF1_S + 4R1_S", &via_f1)?);
    ids.push(equiv(
        &s,
        "4nF1_S + 4R1_S",
        &via_f1,
        "4nF2_S + 4R1_S",
        &via_f2,
    )?);
    ids.push(equiv(&s, "nD", &nd, "4R'_S", &scale(4, &r_gen))?);
    let d_r = s.pairing(&d, &r1)?;
    ids.push(Identity::new(
        format!("D.R1_S = {}", fmt_rational(&d_r)),
        "0",
        d_r.is_zero(),
    ));
    tag(&mut ids, "class");
    let r_sq = s.pairing(&r1, &r1)?;
    quantities.insert("R1_S^2".into(), fmt_rational(&r_sq));
    ids.push(Identity::new(
        "discrepancies on S",
        "0",
        s.discrepancies().values().all(Zero::is_zero),
    ));
    tag(&mut ids, "points");
    let k_t_sq = t.pairing(x.canonical(), x.canonical())?;
    quantities.insert("K_T^2".into(), fmt_rational(&k_t_sq));
    let expected_class = match a_r.cmp(&BigRational::zero()) {
        std::cmp::Ordering::Greater => SingularityClass::Klt,
        std::cmp::Ordering::Equal => SingularityClass::Lc,
        std::cmp::Ordering::Less => SingularityClass::NonLc,
    };
    ids.push(Identity::new(
        format!("class of T = {}", t.classification()),
        format!("sign of a(R1_S,T) gives {expected_class}"),
        t.classification() == expected_class,
    ));
    // other contracted curves have log discrepancy 2/n or 1
    let other_positive = t.contracted().iter().filter(|l| *l != "R1").all(|l| {
        t.log_discrepancy(l)
            .is_some_and(|a| a > BigRational::zero() && a <= BigRational::one())
    });
    ids.push(Identity::new(
        "log discrepancies of E, L over T",
        "in (0, 1]",
        other_positive,
    ));
    tag(&mut ids, "discrepancy");

    Ok(ScenarioReport {
        scenario: "fiber-contraction".into(),
        n,
        pattern,
        discrepancies: discrepancy_strings(&t),
        components: t.components().to_vec(),
        picard_number: t.picard_number(),
        classification: t.classification(),
        quantities,
        identities: ids,
    })
}
