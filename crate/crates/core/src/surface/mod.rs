//! Picard-lattice bookkeeping for iterated point blow-ups and contractions
//! of negative definite curve configurations on rational surfaces.
//!
//! Points are never given by coordinates: a blow-up is specified by the
//! tracked curves passing through the point and their multiplicities there.

pub mod scenario;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{
    fmt_rational, int, negative_definite_witness, solve_rational, LatticeError, RationalMatrix,
};
use crate::toric::{hj_evaluate, QuotientSingularity};

/// Coefficients over the basis of the ambient lattice.
pub type ClassVector = Vec<BigRational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("unknown curve label {0:?}")]
    UnknownLabel(String),
    #[error("label {0:?} is already in use")]
    DuplicateLabel(String),
    #[error("class has {got} coefficients, lattice rank is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("blow-up makes the genus of {0:?} negative")]
    NegativeGenus(String),
    #[error(
        "intersection matrix of {labels:?} is not negative definite (leading minor {minor} fails)"
    )]
    NotNegativeDefinite { labels: Vec<String>, minor: usize },
    #[error("{a:?} and {b:?} meet in {value}, not a nonnegative integer")]
    NotCurveConfiguration { a: String, b: String, value: String },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot parse {0:?} as a rational number")]
    Parse(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveClass {
    pub label: String,
    pub coeffs: ClassVector,
    /// Arithmetic genus.
    pub genus: u64,
}

/// A smooth projective surface seen through its intersection lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceModel {
    basis: Vec<String>,
    gram: RationalMatrix,
    canonical: ClassVector,
    tracked: BTreeMap<String, CurveClass>,
}

fn unit(rank: usize, i: usize) -> ClassVector {
    let mut v = vec![BigRational::zero(); rank];
    v[i] = BigRational::one();
    v
}

fn ints(v: &[i64]) -> ClassVector {
    v.iter().map(|&x| int(x)).collect()
}

fn nonzero(x: &[BigRational]) -> Vec<(usize, &BigRational)> {
    x.iter().enumerate().filter(|(_, a)| !a.is_zero()).collect()
}

/// `sum c_i v_i`
pub fn linear_combination(terms: &[(BigRational, &[BigRational])]) -> ClassVector {
    let rank = terms.first().map_or(0, |(_, v)| v.len());
    let mut out = vec![BigRational::zero(); rank];
    for (c, v) in terms {
        assert_eq!(v.len(), rank, "class length mismatch");
        for (o, x) in out.iter_mut().zip(v.iter()) {
            if !x.is_zero() {
                *o += c * x;
            }
        }
    }
    out
}

impl SurfaceModel {
    fn from_parts(basis: &[&str], gram: &[[i64; 2]; 2], canonical: &[i64]) -> Self {
        SurfaceModel {
            basis: basis.iter().map(|s| s.to_string()).collect(),
            gram: RationalMatrix::from_i64_rows(gram),
            canonical: ints(canonical),
            tracked: BTreeMap::new(),
        }
    }

    /// General model from an intersection form, canonical class and tracked
    /// curves, all over the given basis.
    pub fn new(
        basis: Vec<String>,
        gram: RationalMatrix,
        canonical: ClassVector,
        curves: Vec<CurveClass>,
    ) -> Result<Self, SurfaceError> {
        let n = basis.len();
        if gram.rows() != n || gram.cols() != n {
            return Err(LatticeError::NotSquare {
                rows: gram.rows(),
                cols: gram.cols(),
            }
            .into());
        }
        if let Some((row, col)) = gram.asymmetry() {
            return Err(LatticeError::NotSymmetric { row, col }.into());
        }
        let mut s = SurfaceModel {
            basis,
            gram,
            canonical,
            tracked: BTreeMap::new(),
        };
        if s.canonical.len() != n {
            return Err(SurfaceError::DimensionMismatch {
                expected: n,
                got: s.canonical.len(),
            });
        }
        for c in curves {
            s = s.with_curve(&c.label, c.coeffs, c.genus)?;
        }
        Ok(s)
    }

    /// `P^1 x P^1` with fiber classes `L`, `R`.
    pub fn start_quadric() -> Self {
        let mut s = Self::from_parts(&["L", "R"], &[[0, 1], [1, 0]], &[-2, -2]);
        s.insert("L", unit(2, 0), 0);
        s.insert("R", unit(2, 1), 0);
        s
    }

    /// Hirzebruch surface with negative section `sigma` and fiber `tau`.
    pub fn start_hirzebruch(m: u32) -> Self {
        let m = i64::from(m);
        let mut s = Self::from_parts(&["sigma", "tau"], &[[-m, 1], [1, 0]], &[-2, -(m + 2)]);
        s.insert("sigma", unit(2, 0), 0);
        s.insert("tau", unit(2, 1), 0);
        s
    }

    fn insert(&mut self, label: &str, coeffs: ClassVector, genus: u64) {
        self.tracked.insert(
            label.to_string(),
            CurveClass {
                label: label.to_string(),
                coeffs,
                genus,
            },
        );
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn gram(&self) -> &RationalMatrix {
        &self.gram
    }

    pub fn canonical(&self) -> &[BigRational] {
        &self.canonical
    }

    pub fn curves(&self) -> impl Iterator<Item = &CurveClass> {
        self.tracked.values()
    }

    pub fn curve(&self, label: &str) -> Result<&CurveClass, SurfaceError> {
        self.tracked
            .get(label)
            .ok_or_else(|| SurfaceError::UnknownLabel(label.to_string()))
    }

    pub fn class(&self, label: &str) -> Result<&[BigRational], SurfaceError> {
        self.curve(label).map(|c| c.coeffs.as_slice())
    }

    /// `sum c_i C_i` over tracked labels.
    pub fn combine(&self, terms: &[(BigRational, &str)]) -> Result<ClassVector, SurfaceError> {
        let mut out = vec![BigRational::zero(); self.rank()];
        for (c, label) in terms {
            for (o, x) in out.iter_mut().zip(self.class(label)?) {
                if !x.is_zero() {
                    *o += c * x;
                }
            }
        }
        Ok(out)
    }

    /// Tracks another curve with a given class.
    pub fn with_curve(
        mut self,
        label: &str,
        coeffs: ClassVector,
        genus: u64,
    ) -> Result<Self, SurfaceError> {
        if self.tracked.contains_key(label) {
            return Err(SurfaceError::DuplicateLabel(label.to_string()));
        }
        if coeffs.len() != self.rank() {
            return Err(SurfaceError::DimensionMismatch {
                expected: self.rank(),
                got: coeffs.len(),
            });
        }
        self.insert(label, coeffs, genus);
        Ok(self)
    }

    /// Intersection number, skipping zero coefficients.
    pub fn dot(&self, x: &[BigRational], y: &[BigRational]) -> BigRational {
        let ys = nonzero(y);
        let mut s = BigRational::zero();
        for (i, a) in nonzero(x) {
            for &(j, b) in &ys {
                let g = &self.gram[(i, j)];
                if !g.is_zero() {
                    s += a * b * g;
                }
            }
        }
        s
    }

    pub fn intersection(&self, a: &str, b: &str) -> Result<BigRational, SurfaceError> {
        Ok(self.dot(self.class(a)?, self.class(b)?))
    }

    pub fn canonical_degree(&self, label: &str) -> Result<BigRational, SurfaceError> {
        Ok(self.dot(&self.canonical, self.class(label)?))
    }

    /// Tracked curves violating `K.C = 2g - 2 - C^2`.
    pub fn adjunction_failures(&self) -> Vec<String> {
        self.tracked
            .values()
            .filter(|c| {
                let lhs = self.dot(&self.canonical, &c.coeffs);
                let rhs = int(2 * c.genus as i64 - 2) - self.dot(&c.coeffs, &c.coeffs);
                lhs != rhs
            })
            .map(|c| c.label.clone())
            .collect()
    }

    /// Blows up a point lying on the curves in `incidence` with the given
    /// multiplicities; every other tracked curve misses it. The exceptional
    /// curve is tracked as `exceptional`.
    pub fn blow_up(
        &self,
        exceptional: &str,
        incidence: &[(&str, u64)],
    ) -> Result<Self, SurfaceError> {
        self.clone().into_blow_up(exceptional, incidence)
    }

    /// Consuming form of [`SurfaceModel::blow_up`], for long blow-up
    /// sequences.
    pub fn into_blow_up(
        mut self,
        exceptional: &str,
        incidence: &[(&str, u64)],
    ) -> Result<Self, SurfaceError> {
        if self.tracked.contains_key(exceptional) {
            return Err(SurfaceError::DuplicateLabel(exceptional.to_string()));
        }
        let mut drops = Vec::with_capacity(incidence.len());
        for &(label, m) in incidence {
            let c = self.curve(label)?;
            let drop = m * m.saturating_sub(1) / 2;
            let genus = c
                .genus
                .checked_sub(drop)
                .ok_or_else(|| SurfaceError::NegativeGenus(label.to_string()))?;
            drops.push((label, m, genus));
        }
        let n = self.rank();
        self.gram.border(-BigRational::one());
        self.basis.push(exceptional.to_string());
        self.canonical.push(BigRational::one());
        for c in self.tracked.values_mut() {
            c.coeffs.push(BigRational::zero());
        }
        for (label, m, genus) in drops {
            let c = self.tracked.get_mut(label).expect("checked above");
            c.coeffs[n] -= BigRational::from_integer(m.into());
            c.genus = genus;
        }
        self.insert(exceptional, unit(n + 1, n), 0);
        Ok(self)
    }

    pub fn dual_graph(&self, labels: &[&str]) -> Result<DualGraph, SurfaceError> {
        let classes = labels
            .iter()
            .map(|l| self.class(l))
            .collect::<Result<Vec<_>, _>>()?;
        let k = labels.len();
        let block = RationalMatrix::from_fn(k, k, |i, j| {
            if i < j {
                self.dot(classes[i], classes[j])
            } else {
                BigRational::zero()
            }
        });
        DualGraph::from_block(labels, &block)
    }

    /// Contracts the given curves, which must have a negative definite
    /// intersection matrix.
    pub fn contract(&self, labels: &[&str]) -> Result<ContractionResult, SurfaceError> {
        let mut seen = BTreeSet::new();
        for l in labels {
            self.curve(l)?;
            if !seen.insert(*l) {
                return Err(SurfaceError::DuplicateLabel(l.to_string()));
            }
        }
        let classes: Vec<ClassVector> = labels
            .iter()
            .map(|l| self.class(l).map(<[_]>::to_vec))
            .collect::<Result<_, _>>()?;
        let k = labels.len();
        let mut block = RationalMatrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let v = self.dot(&classes[i], &classes[j]);
                block[(j, i)] = v.clone();
                block[(i, j)] = v;
            }
        }
        if let Some(minor) = negative_definite_witness(&block)? {
            return Err(SurfaceError::NotNegativeDefinite {
                labels: labels.iter().map(|s| s.to_string()).collect(),
                minor,
            });
        }
        let rhs: Vec<BigRational> = classes
            .iter()
            .map(|c| self.dot(&self.canonical, c))
            .collect();
        let d = solve_rational(&block, &rhs)?;
        let graph = DualGraph::from_block(labels, &block)?;
        Ok(ContractionResult {
            model: self.clone(),
            labels: labels.iter().map(|s| s.to_string()).collect(),
            classes,
            block,
            discrepancies: d,
            components: graph.components(),
            graph,
        })
    }
}

/// On-disk form of a model; rationals are exact strings such as `"-1/2"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceModelFile {
    pub basis: Vec<String>,
    pub gram: Vec<Vec<String>>,
    pub canonical: Vec<String>,
    pub curves: BTreeMap<String, CurveFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    pub class: Vec<String>,
    #[serde(default)]
    pub genus: u64,
}

fn parse_rationals(v: &[String]) -> Result<ClassVector, SurfaceError> {
    v.iter()
        .map(|x| x.trim().parse().map_err(|_| SurfaceError::Parse(x.clone())))
        .collect()
}

impl SurfaceModelFile {
    pub fn from_model(s: &SurfaceModel) -> Self {
        let fmt = |v: &[BigRational]| v.iter().map(fmt_rational).collect::<Vec<_>>();
        SurfaceModelFile {
            basis: s.basis.clone(),
            gram: (0..s.rank()).map(|i| fmt(s.gram.row(i))).collect(),
            canonical: fmt(&s.canonical),
            curves: s
                .tracked
                .values()
                .map(|c| {
                    (
                        c.label.clone(),
                        CurveFile {
                            class: fmt(&c.coeffs),
                            genus: c.genus,
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn to_model(&self) -> Result<SurfaceModel, SurfaceError> {
        let rows: Vec<ClassVector> = self
            .gram
            .iter()
            .map(|r| parse_rationals(r))
            .collect::<Result<_, _>>()?;
        let n = self.basis.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(LatticeError::NotSquare {
                rows: rows.len(),
                cols: rows.first().map_or(0, Vec::len),
            }
            .into());
        }
        let gram = RationalMatrix::from_fn(n, n, |i, j| rows[i][j].clone());
        let curves = self
            .curves
            .iter()
            .map(|(label, c)| {
                Ok(CurveClass {
                    label: label.clone(),
                    coeffs: parse_rationals(&c.class)?,
                    genus: c.genus,
                })
            })
            .collect::<Result<Vec<_>, SurfaceError>>()?;
        SurfaceModel::new(
            self.basis.clone(),
            gram,
            parse_rationals(&self.canonical)?,
            curves,
        )
    }
}

/// Curves as vertices, `C_i.C_j` edges between distinct curves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualGraph {
    pub vertices: Vec<String>,
    /// `(i, j)` with `i < j` to multiplicity; absent pairs are disjoint.
    pub edges: BTreeMap<(usize, usize), u64>,
}

impl DualGraph {
    /// Graph from the upper triangle of an intersection matrix.
    fn from_block(labels: &[&str], block: &RationalMatrix) -> Result<DualGraph, SurfaceError> {
        let mut edges = BTreeMap::new();
        for i in 0..labels.len() {
            for j in i + 1..labels.len() {
                let v = &block[(i, j)];
                if v.is_zero() {
                    continue;
                }
                let m = (v.is_integer() && v.is_positive())
                    .then(|| v.to_integer().to_u64())
                    .flatten()
                    .ok_or_else(|| SurfaceError::NotCurveConfiguration {
                        a: labels[i].to_string(),
                        b: labels[j].to_string(),
                        value: fmt_rational(v),
                    })?;
                edges.insert((i, j), m);
            }
        }
        Ok(DualGraph {
            vertices: labels.iter().map(|s| s.to_string()).collect(),
            edges,
        })
    }

    fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.keys().filter_map(move |&(i, j)| {
            if i == v {
                Some(j)
            } else if j == v {
                Some(i)
            } else {
                None
            }
        })
    }

    fn component_indices(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for w in self.neighbours(v) {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Connected components as label lists, in vertex order.
    pub fn components(&self) -> Vec<Vec<String>> {
        self.component_indices()
            .into_iter()
            .map(|c| c.into_iter().map(|i| self.vertices[i].clone()).collect())
            .collect()
    }

    /// Every component is a tree: edge multiplicities sum to one less than
    /// the number of vertices.
    pub fn is_tree(&self) -> bool {
        let total: u64 = self.edges.values().sum();
        total + self.component_indices().len() as u64 == self.vertices.len() as u64
    }

    /// Vertices of a component in path order, if it is a chain of simple
    /// edges.
    fn path_order(&self, comp: &[usize]) -> Option<Vec<usize>> {
        let inside: BTreeSet<usize> = comp.iter().copied().collect();
        let deg = |v: usize| self.neighbours(v).filter(|w| inside.contains(w)).count();
        if comp.iter().any(|&v| deg(v) > 2)
            || self
                .edges
                .iter()
                .any(|(&(i, _), &m)| inside.contains(&i) && m > 1)
        {
            return None;
        }
        let start = *comp.iter().find(|&&v| deg(v) <= 1)?;
        let mut order = vec![start];
        let mut prev = usize::MAX;
        let mut cur = start;
        while let Some(next) = self
            .neighbours(cur)
            .find(|&w| w != prev && inside.contains(&w))
        {
            order.push(next);
            prev = cur;
            cur = next;
        }
        (order.len() == comp.len()).then_some(order)
    }
}

/// Result of contracting curves on an ambient model. Classes on the target
/// are represented by their pullbacks to the ambient lattice.
#[derive(Debug, Clone)]
pub struct ContractionResult {
    model: SurfaceModel,
    labels: Vec<String>,
    classes: Vec<ClassVector>,
    block: RationalMatrix,
    discrepancies: Vec<BigRational>,
    components: Vec<Vec<String>>,
    graph: DualGraph,
}

/// Singularity class read off from log discrepancies of the contracted
/// curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SingularityClass {
    #[serde(rename = "klt")]
    Klt,
    #[serde(rename = "lc")]
    Lc,
    #[serde(rename = "non-lc")]
    NonLc,
}

impl std::fmt::Display for SingularityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SingularityClass::Klt => "klt",
            SingularityClass::Lc => "lc",
            SingularityClass::NonLc => "non-lc",
        })
    }
}

impl ContractionResult {
    pub fn ambient(&self) -> &SurfaceModel {
        &self.model
    }

    pub fn contracted(&self) -> &[String] {
        &self.labels
    }

    pub fn block(&self) -> &RationalMatrix {
        &self.block
    }

    pub fn dual_graph(&self) -> &DualGraph {
        &self.graph
    }

    /// `d_i` in `K_X = h^* K_S + sum d_i C_i`.
    pub fn discrepancy(&self, label: &str) -> Option<&BigRational> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| &self.discrepancies[i])
    }

    pub fn discrepancies(&self) -> BTreeMap<String, BigRational> {
        self.labels
            .iter()
            .cloned()
            .zip(self.discrepancies.iter().cloned())
            .collect()
    }

    pub fn log_discrepancy(&self, label: &str) -> Option<BigRational> {
        self.discrepancy(label).map(|d| d + BigRational::one())
    }

    pub fn classification(&self) -> SingularityClass {
        let min = self
            .discrepancies
            .iter()
            .map(|d| d + BigRational::one())
            .min()
            .unwrap_or_else(BigRational::one);
        if min.is_positive() {
            SingularityClass::Klt
        } else if min.is_zero() {
            SingularityClass::Lc
        } else {
            SingularityClass::NonLc
        }
    }

    /// One component per point of the target.
    pub fn components(&self) -> &[Vec<String>] {
        &self.components
    }

    pub fn point_count(&self) -> usize {
        self.components.len()
    }

    pub fn picard_number(&self) -> usize {
        self.model.rank() - self.labels.len()
    }

    /// `D + sum c_i C_i` with zero intersection against every contracted
    /// curve.
    pub fn pullback(&self, d: &[BigRational]) -> Result<ClassVector, SurfaceError> {
        if d.len() != self.model.rank() {
            return Err(SurfaceError::DimensionMismatch {
                expected: self.model.rank(),
                got: d.len(),
            });
        }
        let rhs: Vec<BigRational> = self.classes.iter().map(|c| -self.model.dot(d, c)).collect();
        let c = solve_rational(&self.block, &rhs)?;
        let mut out = d.to_vec();
        for (ci, class) in c.iter().zip(&self.classes) {
            if ci.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(class) {
                if !x.is_zero() {
                    *o += ci * x;
                }
            }
        }
        Ok(out)
    }

    /// Pullback of the image of a tracked curve.
    pub fn image(&self, label: &str) -> Result<ClassVector, SurfaceError> {
        self.pullback(self.model.class(label)?)
    }

    /// Pullback of the canonical class of the target.
    pub fn canonical(&self) -> ClassVector {
        self.pullback(&self.model.canonical).expect("rank matches")
    }

    /// Intersection on the target via pullbacks.
    pub fn pairing(
        &self,
        a: &[BigRational],
        b: &[BigRational],
    ) -> Result<BigRational, SurfaceError> {
        Ok(self.model.dot(&self.pullback(a)?, &self.pullback(b)?))
    }

    /// Numerical equivalence on the target.
    pub fn check_equiv(&self, a: &[BigRational], b: &[BigRational]) -> Result<bool, SurfaceError> {
        Ok(self.pullback(a)? == self.pullback(b)?)
    }

    /// Type of each point whose component is a chain of smooth rational
    /// curves, read off its Hirzebruch-Jung continued fraction.
    pub fn point_types(&self) -> Vec<Option<QuotientSingularity>> {
        self.graph
            .component_indices()
            .iter()
            .map(|comp| {
                let order = self.graph.path_order(comp)?;
                let mut chain = Vec::with_capacity(order.len());
                for i in order {
                    let c = &self.classes[i];
                    if self.model.curve(&self.labels[i]).ok()?.genus != 0 {
                        return None;
                    }
                    let b = -self.model.dot(c, c);
                    if !b.is_integer() || b < int(2) {
                        return None;
                    }
                    chain.push(b.to_integer().to_u64()?);
                }
                let q = hj_evaluate(&chain)?;
                let r = q.numer().to_u64()?;
                let a = q.denom().to_u64()?;
                QuotientSingularity::new(r, a).ok().map(|s| s.normalized())
            })
            .collect()
    }
}

/// Builds a chain of smooth rational curves with self-intersections
/// `-b_1, ..., -b_k` (all `b_i >= 2`) by blowing up the quadric: first a
/// string of infinitely near points, then free points on each curve.
/// Returns the model and the chain labels in order.
pub fn chain_surface(chain: &[u64]) -> Result<(SurfaceModel, Vec<String>), SurfaceError> {
    chain_surface_on(&SurfaceModel::start_quadric(), chain)
}

/// As [`chain_surface`], blowing up points of `base` that lie on no tracked
/// curve.
pub fn chain_surface_on(
    base: &SurfaceModel,
    chain: &[u64],
) -> Result<(SurfaceModel, Vec<String>), SurfaceError> {
    if chain.is_empty() || chain.iter().any(|&b| b < 2) {
        return Err(SurfaceError::InvalidParameter(format!(
            "chain entries must be at least 2, got {chain:?}"
        )));
    }
    let k = chain.len();
    let mut s = base.blow_up("c1", &[])?;
    for i in 2..=k {
        let prev = format!("c{}", i - 1);
        s = s.into_blow_up(&format!("c{i}"), &[(prev.as_str(), 1)])?;
    }
    // c_1..c_{k-1} now have self-intersection -2 and c_k has -1
    for (i, &b) in chain.iter().enumerate() {
        let label = format!("c{}", i + 1);
        let have = if i + 1 == k { 1 } else { 2 };
        for t in 0..b - have {
            s = s.into_blow_up(&format!("p{}_{}", i + 1, t + 1), &[(label.as_str(), 1)])?;
        }
    }
    let labels = (1..=k).map(|i| format!("c{i}")).collect();
    Ok((s, labels))
}

/// Discrepancies of the chain `[b_1, ..., b_k]` computed by contracting it on
/// a blown-up quadric.
pub fn chain_discrepancies(chain: &[u64]) -> Result<Vec<BigRational>, SurfaceError> {
    chain_discrepancies_on(&SurfaceModel::start_quadric(), chain)
}

pub fn chain_discrepancies_on(
    base: &SurfaceModel,
    chain: &[u64],
) -> Result<Vec<BigRational>, SurfaceError> {
    let (s, labels) = chain_surface_on(base, chain)?;
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    let c = s.contract(&refs)?;
    Ok(labels
        .iter()
        .map(|l| c.discrepancy(l).expect("contracted").clone())
        .collect())
}

/// Scale a class by an integer.
pub fn scale(c: i64, v: &[BigRational]) -> ClassVector {
    let c = BigRational::from_integer(BigInt::from(c));
    v.iter().map(|x| x * &c).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rational;
    use crate::toric::{hj_expand, resolve_singularity};

    #[test]
    fn quadric_numbers() {
        let s = SurfaceModel::start_quadric();
        let k = s.canonical().to_vec();
        assert_eq!(s.dot(&k, &k), int(8));
        assert_eq!(s.intersection("L", "R").unwrap(), int(1));
        assert_eq!(s.canonical_degree("L").unwrap(), int(-2));
        assert!(s.adjunction_failures().is_empty());
    }

    #[test]
    fn hirzebruch_numbers() {
        for m in 0..6u32 {
            let s = SurfaceModel::start_hirzebruch(m);
            let k = s.canonical().to_vec();
            assert_eq!(s.dot(&k, &k), int(8));
            assert_eq!(
                s.intersection("sigma", "sigma").unwrap(),
                int(-i64::from(m))
            );
            assert_eq!(-s.canonical_degree("tau").unwrap(), int(2));
            assert!(s.adjunction_failures().is_empty());
        }
    }

    #[test]
    fn blow_up_strict_transforms() {
        let s = SurfaceModel::start_quadric()
            .blow_up("e", &[("L", 1), ("R", 1)])
            .unwrap();
        assert_eq!(s.intersection("L", "L").unwrap(), int(-1));
        assert_eq!(s.intersection("R", "R").unwrap(), int(-1));
        assert_eq!(s.intersection("L", "R").unwrap(), int(0));
        let k = s.canonical().to_vec();
        assert_eq!(s.dot(&k, &k), int(7));
        assert!(s.adjunction_failures().is_empty());

        // second blow-up at L ∩ e
        let s = s.blow_up("f", &[("L", 1), ("e", 1)]).unwrap();
        assert_eq!(s.intersection("e", "e").unwrap(), int(-2));
        assert_eq!(s.intersection("L", "L").unwrap(), int(-2));
        assert!(s.adjunction_failures().is_empty());
    }

    #[test]
    fn blow_up_away_from_curves() {
        let s = SurfaceModel::start_quadric()
            .with_curve("L2", unit(2, 0), 0)
            .unwrap();
        let t = s.blow_up("e", &[("L", 1)]).unwrap();
        assert_eq!(
            t.intersection("L2", "R").unwrap(),
            s.intersection("L2", "R").unwrap()
        );
        assert_eq!(t.intersection("L2", "L2").unwrap(), int(0));
    }

    #[test]
    fn blow_up_errors_and_genus() {
        let s = SurfaceModel::start_quadric();
        assert!(matches!(
            s.blow_up("e", &[("X", 1)]),
            Err(SurfaceError::UnknownLabel(_))
        ));
        assert!(matches!(
            s.blow_up("L", &[]),
            Err(SurfaceError::DuplicateLabel(_))
        ));
        // a (2,2) curve has genus 1; a double point makes it rational
        let cubic = s.combine(&[(int(2), "L"), (int(2), "R")]).unwrap();
        let s = s.with_curve("C", cubic, 1).unwrap();
        assert!(s.adjunction_failures().is_empty());
        let t = s.blow_up("e", &[("C", 2)]).unwrap();
        assert_eq!(t.curve("C").unwrap().genus, 0);
        assert!(t.adjunction_failures().is_empty());
        assert!(matches!(
            t.blow_up("e2", &[("C", 2)]),
            Err(SurfaceError::NegativeGenus(_))
        ));
    }

    #[test]
    fn model_file_round_trip() {
        let s = SurfaceModel::start_hirzebruch(3)
            .blow_up("e", &[("tau", 1)])
            .unwrap();
        let file = SurfaceModelFile::from_model(&s);
        let json = serde_json::to_string(&file).unwrap();
        let back: SurfaceModelFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_model().unwrap(), s);

        let mut bad = file.clone();
        bad.gram[0][1] = "7".into();
        assert!(matches!(
            bad.to_model(),
            Err(SurfaceError::Lattice(LatticeError::NotSymmetric { .. }))
        ));
        let mut bad = file;
        bad.canonical[0] = "x/2".into();
        assert!(matches!(bad.to_model(), Err(SurfaceError::Parse(_))));
    }

    #[test]
    fn graphs() {
        let (s, labels) = chain_surface(&[2, 3]).unwrap();
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        let g = s.dual_graph(&refs).unwrap();
        assert!(g.is_tree());
        assert_eq!(g.components().len(), 1);

        // three lines through distinct points pairwise meet
        let s = SurfaceModel::start_hirzebruch(1);
        let h = s.combine(&[(int(1), "sigma"), (int(1), "tau")]).unwrap();
        let s = s
            .with_curve("a", h.clone(), 0)
            .unwrap()
            .with_curve("b", h.clone(), 0)
            .unwrap()
            .with_curve("c", h, 0)
            .unwrap();
        let g = s.dual_graph(&["a", "b", "c"]).unwrap();
        assert_eq!(g.components().len(), 1);
        assert!(!g.is_tree());
    }

    #[test]
    fn contract_minus_two_curve() {
        let s = SurfaceModel::start_quadric()
            .blow_up("e", &[("L", 1)])
            .unwrap()
            .blow_up("f", &[("L", 1)])
            .unwrap();
        assert_eq!(s.intersection("L", "L").unwrap(), int(-2));
        let c = s.contract(&["L"]).unwrap();
        assert_eq!(c.discrepancy("L"), Some(&int(0)));
        assert_eq!(c.point_count(), 1);
        assert_eq!(
            c.point_types(),
            vec![Some(QuotientSingularity::new(2, 1).unwrap())]
        );
        assert_eq!(c.classification(), SingularityClass::Klt);
        assert_eq!(c.picard_number(), 3);
        for l in ["R", "e", "f"] {
            let pb = c.image(l).unwrap();
            assert!(s.dot(&pb, s.class("L").unwrap()).is_zero());
        }
    }

    #[test]
    fn contract_rejects_non_negative_blocks() {
        let s = SurfaceModel::start_quadric();
        match s.contract(&["L"]) {
            Err(SurfaceError::NotNegativeDefinite { minor, .. }) => assert_eq!(minor, 1),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            s.contract(&["Q"]),
            Err(SurfaceError::UnknownLabel(_))
        ));
        assert!(matches!(
            s.contract(&["L", "L"]),
            Err(SurfaceError::DuplicateLabel(_))
        ));
    }

    #[test]
    fn blow_up_then_contract_is_isometric() {
        let s = SurfaceModel::start_hirzebruch(2)
            .blow_up("e", &[("sigma", 1)])
            .unwrap();
        let t = s.blow_up("x", &[("sigma", 1), ("e", 1)]).unwrap();
        let c = t.contract(&["x"]).unwrap();
        assert_eq!(c.discrepancy("x"), Some(&int(1)));
        let n = s.rank();
        for i in 0..n {
            for j in 0..n {
                let mut a = unit(n, i);
                a.push(BigRational::zero());
                let mut b = unit(n, j);
                b.push(BigRational::zero());
                assert_eq!(c.pairing(&a, &b).unwrap(), s.gram()[(i, j)]);
            }
        }
        // images of the strict transforms recover the old classes
        for l in ["sigma", "e", "tau"] {
            let mut old = s.class(l).unwrap().to_vec();
            old.push(BigRational::zero());
            assert_eq!(c.image(l).unwrap(), old);
        }
        let mut k = s.canonical().to_vec();
        k.push(BigRational::zero());
        assert_eq!(c.canonical(), k);
    }

    #[test]
    fn chain_matches_continued_fraction() {
        let cases: &[(u64, u64, &[&str])] =
            &[(5, 3, &["-1/5", "-2/5"]), (2, 1, &["0"]), (3, 1, &["-1/3"])];
        for (r, a, want) in cases {
            let chain = hj_expand(*r, *a).unwrap();
            let d = chain_discrepancies(&chain).unwrap();
            let got: Vec<String> = d.iter().map(fmt_rational).collect();
            assert_eq!(&got, want);
        }
    }

    #[test]
    fn chain_types_and_discrepancies_small() {
        for r in 2..=20u64 {
            for a in 1..r {
                if num_integer::gcd(r, a) != 1 {
                    continue;
                }
                let q = QuotientSingularity::new(r, a).unwrap();
                let res = resolve_singularity(&q).unwrap();
                let (s, labels) = chain_surface(&res.chain).unwrap();
                let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
                let c = s.contract(&refs).unwrap();
                let d: Vec<BigRational> = labels
                    .iter()
                    .map(|l| c.discrepancy(l).unwrap().clone())
                    .collect();
                assert_eq!(d, res.discrepancies);
                assert_eq!(c.point_types(), vec![Some(q.normalized())]);
                assert!(s.adjunction_failures().is_empty());
            }
        }
    }

    #[test]
    fn pullback_is_linear() {
        let (s, labels) = chain_surface(&[3, 2, 4]).unwrap();
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        let c = s.contract(&refs).unwrap();
        let a = s.class("p1_1").unwrap().to_vec();
        let b = s.class("R").unwrap().to_vec();
        let combo = linear_combination(&[(rational(3, 2), &a), (int(-2), &b)]);
        let lhs = c.pullback(&combo).unwrap();
        let rhs = linear_combination(&[
            (rational(3, 2), &c.pullback(&a).unwrap()),
            (int(-2), &c.pullback(&b).unwrap()),
        ]);
        assert_eq!(lhs, rhs);
        for l in &labels {
            assert!(s.dot(&lhs, s.class(l).unwrap()).is_zero());
        }
        // pullback of a contracted curve is zero
        assert!(c.image("c2").unwrap().iter().all(Zero::is_zero));
    }
}
