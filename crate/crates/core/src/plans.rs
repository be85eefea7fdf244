//! State spaces, transport plans and their marginals.
//!
//! Plans come in two representations. A [`DensePlan`] stores the weight of each
//! ordered N-tuple of sites. A [`SymmetricPlan`] stores one coefficient per
//! nondecreasing multi-index `m`, standing for `alpha_m * S delta_m`, where `S`
//! averages over all orderings of the N slots. Site indices are 0-based here and
//! 1-based in every serialized form.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::{self, Rational};
use crate::exact::RationalMatrix;

/// Number of marginals N and number of sites l.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dims {
    pub n_marginals: usize,
    pub n_sites: usize,
}

impl Dims {
    pub fn new(n_marginals: usize, n_sites: usize) -> Result<Self> {
        if n_marginals < 2 {
            return Err(Error::invalid(format!(
                "need at least 2 marginals, got {n_marginals}"
            )));
        }
        if n_sites < 1 {
            return Err(Error::invalid("need at least one site"));
        }
        Ok(Self {
            n_marginals,
            n_sites,
        })
    }

    /// All nondecreasing multi-indices in lexicographic order; there are C(l+N-1, N).
    pub fn multi_indices(&self) -> Vec<MultiIndex> {
        fn rec(start: usize, left: usize, l: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
            if left == 0 {
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for i in start..l {
                cur.push(i);
                rec(i, left - 1, l, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(0, self.n_marginals, self.n_sites, &mut Vec::new(), &mut out);
        out
    }

    /// All ordered N-tuples in lexicographic order (l^N of them).
    pub fn tuples(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for _ in 0..self.n_marginals {
            out = out
                .into_iter()
                .flat_map(|t| {
                    (0..self.n_sites).map(move |i| {
                        let mut t = t.clone();
                        t.push(i);
                        t
                    })
                })
                .collect();
        }
        out
    }

    pub fn uniform_mass(&self) -> Rational {
        rational::rat(1, self.n_sites as i64)
    }
}

/// Optional geometry attached to a state space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Geometry {
    /// Sites are points on the real line.
    Coords1d(Vec<Rational>),
    /// Explicit metric.
    Matrix(RationalMatrix),
}

/// Finite state space `X = {a_1, ..., a_l}` used by `N` marginals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateSpace {
    dims: Dims,
    labels: Vec<String>,
    geometry: Option<Geometry>,
}

impl StateSpace {
    /// Sites labelled `1..=l`, no geometry.
    pub fn new(n_marginals: usize, n_sites: usize) -> Result<Self> {
        let dims = Dims::new(n_marginals, n_sites)?;
        Ok(Self {
            dims,
            labels: (1..=n_sites).map(|i| i.to_string()).collect(),
            geometry: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dims.n_sites {
            return Err(Error::invalid(format!(
                "{} labels given for {} sites",
                labels.len(),
                self.dims.n_sites
            )));
        }
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(Error::invalid("site labels must be distinct"));
        }
        self.labels = labels;
        Ok(self)
    }

    /// Sites at the given points of the real line, with the euclidean metric.
    pub fn on_line(n_marginals: usize, coords: Vec<Rational>) -> Result<Self> {
        let space = Self::new(n_marginals, coords.len())?;
        let labels = coords.iter().map(rational::format_rational).collect();
        let space = space.with_labels(labels)?;
        Ok(Self {
            geometry: Some(Geometry::Coords1d(coords)),
            ..space
        })
    }

    /// Sites with an explicit metric. The matrix is validated as a metric.
    pub fn with_metric(n_marginals: usize, distances: RationalMatrix) -> Result<Self> {
        validate_metric(&distances)?;
        let space = Self::new(n_marginals, distances.rows())?;
        Ok(Self {
            geometry: Some(Geometry::Matrix(distances)),
            ..space
        })
    }

    /// The `x = 1, 2, ..., l` configuration on the line.
    pub fn equispaced_line(n_marginals: usize, n_sites: usize) -> Result<Self> {
        Self::on_line(
            n_marginals,
            (1..=n_sites as i64).map(rational::int).collect(),
        )
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn n_marginals(&self) -> usize {
        self.dims.n_marginals
    }

    pub fn n_sites(&self) -> usize {
        self.dims.n_sites
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn geometry(&self) -> Option<&Geometry> {
        self.geometry.as_ref()
    }

    pub fn distance(&self, i: usize, j: usize) -> Option<Rational> {
        match self.geometry.as_ref()? {
            Geometry::Coords1d(x) => Some((&x[i] - &x[j]).abs()),
            Geometry::Matrix(m) => Some(m[(i, j)].clone()),
        }
    }

    pub fn distance_matrix(&self) -> Option<RationalMatrix> {
        let l = self.n_sites();
        let mut m = RationalMatrix::zeros(l, l);
        for i in 0..l {
            for j in 0..l {
                m[(i, j)] = self.distance(i, j)?;
            }
        }
        Some(m)
    }
}

/// Check symmetry, zero diagonal, positive off-diagonal and the triangle inequality.
pub fn validate_metric(d: &RationalMatrix) -> Result<()> {
    let l = d.rows();
    if d.cols() != l {
        return Err(Error::invalid("distance matrix must be square"));
    }
    for i in 0..l {
        if !d[(i, i)].is_zero() {
            return Err(Error::invalid(format!("d({0},{0}) must be 0", i + 1)));
        }
        for j in 0..l {
            if d[(i, j)] != d[(j, i)] {
                return Err(Error::invalid(format!(
                    "distance matrix not symmetric at ({},{})",
                    i + 1,
                    j + 1
                )));
            }
            if i != j && !d[(i, j)].is_positive() {
                return Err(Error::invalid(format!(
                    "d({},{}) must be positive for distinct sites",
                    i + 1,
                    j + 1
                )));
            }
            for k in 0..l {
                if d[(i, k)] > &d[(i, j)] + &d[(j, k)] {
                    return Err(Error::invalid(format!(
                        "triangle inequality fails: d({a},{c}) > d({a},{b}) + d({b},{c})",
                        a = i + 1,
                        b = j + 1,
                        c = k + 1
                    )));
                }
            }
        }
    }
    Ok(())
}

/// A nondecreasing tuple of N site indices (0-based), the label of `S delta_m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    /// Sort an arbitrary tuple into a multi-index.
    pub fn sorted(indices: &[usize]) -> Self {
        let mut v = indices.to_vec();
        v.sort_unstable();
        Self(v)
    }

    /// Validate 1-based, nondecreasing indices as they appear in JSON.
    pub fn from_one_based(indices: &[usize], dims: Dims) -> Result<Self> {
        let zero_based = tuple_from_one_based(indices, dims)?;
        if zero_based.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid(format!(
                "symmetric term indices must be nondecreasing, got {indices:?}"
            )));
        }
        Ok(Self(zero_based))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    /// How often `site` occurs.
    pub fn multiplicity(&self, site: usize) -> usize {
        self.0.iter().filter(|&&i| i == site).count()
    }

    /// True when all N indices are the same site.
    pub fn is_constant(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }

    /// Distinct orderings of the multiset, in lexicographic order.
    pub fn orderings(&self) -> Vec<Vec<usize>> {
        let mut cur = self.0.clone();
        let mut out = vec![cur.clone()];
        while next_permutation(&mut cur) {
            out.push(cur.clone());
        }
        out
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }
}

impl fmt::Display for MultiIndex {
    /// `1,1,2` style, 1-based.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn tuple_from_one_based(indices: &[usize], dims: Dims) -> Result<Vec<usize>> {
    if indices.len() != dims.n_marginals {
        return Err(Error::invalid(format!(
            "index {indices:?} has {} entries, expected {}",
            indices.len(),
            dims.n_marginals
        )));
    }
    indices
        .iter()
        .map(|&i| {
            if i == 0 || i > dims.n_sites {
                Err(Error::invalid(format!(
                    "site index {i} out of range 1..={}",
                    dims.n_sites
                )))
            } else {
                Ok(i - 1)
            }
        })
        .collect()
}

fn check_weights<'a>(weights: impl Iterator<Item = &'a Rational>) -> Result<()> {
    let mut total = Rational::zero();
    for w in weights {
        if w.is_negative() {
            return Err(Error::invalid(format!("negative weight {w}")));
        }
        total += w;
    }
    if !total.is_one() {
        return Err(Error::invalid(format!("weights sum to {total}, expected 1")));
    }
    Ok(())
}

/// `gamma = sum_m alpha_m S delta_m` over nondecreasing multi-indices `m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymmetricPlan {
    dims: Dims,
    alpha: BTreeMap<MultiIndex, Rational>,
}

impl SymmetricPlan {
    /// Validated constructor: nonnegative coefficients with total mass 1.
    /// Repeated indices are summed and zero coefficients dropped.
    pub fn new(dims: Dims, terms: impl IntoIterator<Item = (MultiIndex, Rational)>) -> Result<Self> {
        let mut alpha: BTreeMap<MultiIndex, Rational> = BTreeMap::new();
        for (m, w) in terms {
            if m.0.len() != dims.n_marginals || m.0.iter().any(|&i| i >= dims.n_sites) {
                return Err(Error::invalid(format!("multi-index {m} does not fit {dims:?}")));
            }
            *alpha.entry(m).or_insert_with(Rational::zero) += w;
        }
        alpha.retain(|_, w| !w.is_zero());
        check_weights(alpha.values())?;
        Ok(Self { dims, alpha })
    }

    /// Build from 1-based index lists, e.g. `[(vec![1,1,2], 1/2), ...]`.
    pub fn from_one_based(dims: Dims, terms: &[(Vec<usize>, Rational)]) -> Result<Self> {
        let terms = terms
            .iter()
            .map(|(idx, w)| Ok((MultiIndex::sorted(&tuple_from_one_based(idx, dims)?), w.clone())))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dims, terms)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn alpha(&self) -> &BTreeMap<MultiIndex, Rational> {
        &self.alpha
    }

    pub fn coefficient(&self, m: &MultiIndex) -> Rational {
        self.alpha.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> Vec<&MultiIndex> {
        self.alpha.keys().collect()
    }

    /// Site masses (identical in every slot for a symmetric plan).
    pub fn site_masses(&self) -> Vec<Rational> {
        let n = rational::int(self.dims.n_marginals as i64);
        let mut mass = vec![Rational::zero(); self.dims.n_sites];
        for (m, w) in &self.alpha {
            for &i in m.indices() {
                mass[i] += w / &n;
            }
        }
        mass
    }

    pub fn has_uniform_marginal(&self) -> bool {
        let u = self.dims.uniform_mass();
        self.site_masses().iter().all(|m| *m == u)
    }

    /// Spread each coefficient equally over the distinct orderings of its index.
    pub fn to_dense(&self) -> DensePlan {
        let mut weights = BTreeMap::new();
        for (m, w) in &self.alpha {
            let orders = m.orderings();
            let share = w / rational::int(orders.len() as i64);
            for t in orders {
                weights.insert(t, share.clone());
            }
        }
        DensePlan {
            dims: self.dims,
            weights,
        }
    }

    /// The 2-point marginal in bistochastic scaling `mu_ij = l * P(x1 = a_i, x2 = a_j)`.
    pub fn two_point_marginal(&self) -> PairMarginal {
        let l = self.dims.n_sites;
        let scale = rational::int(l as i64);
        let mut mu = RationalMatrix::zeros(l, l);
        for (t, w) in self.to_dense().weights {
            mu[(t[0], t[1])] += w * &scale;
        }
        PairMarginal { mu }
    }
}

/// Probability tensor over `X^N`, stored sparsely as tuple -> weight.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DensePlan {
    dims: Dims,
    weights: BTreeMap<Vec<usize>, Rational>,
}

impl DensePlan {
    pub fn new(dims: Dims, terms: impl IntoIterator<Item = (Vec<usize>, Rational)>) -> Result<Self> {
        let mut weights: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
        for (t, w) in terms {
            if t.len() != dims.n_marginals || t.iter().any(|&i| i >= dims.n_sites) {
                return Err(Error::invalid(format!("tuple {t:?} does not fit {dims:?}")));
            }
            *weights.entry(t).or_insert_with(Rational::zero) += w;
        }
        weights.retain(|_, w| !w.is_zero());
        check_weights(weights.values())?;
        Ok(Self { dims, weights })
    }

    /// Build from 1-based tuples.
    pub fn from_one_based(dims: Dims, terms: &[(Vec<usize>, Rational)]) -> Result<Self> {
        let terms = terms
            .iter()
            .map(|(idx, w)| Ok((tuple_from_one_based(idx, dims)?, w.clone())))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dims, terms)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn weights(&self) -> &BTreeMap<Vec<usize>, Rational> {
        &self.weights
    }

    pub fn n_atoms(&self) -> usize {
        self.weights.len()
    }

    pub fn support(&self) -> BTreeSet<&Vec<usize>> {
        self.weights.keys().collect()
    }

    /// Apply the symmetrizer: collect each tuple's weight on its sorted index.
    pub fn symmetrize(&self) -> SymmetricPlan {
        let mut alpha: BTreeMap<MultiIndex, Rational> = BTreeMap::new();
        for (t, w) in &self.weights {
            *alpha.entry(MultiIndex::sorted(t)).or_insert_with(Rational::zero) += w;
        }
        SymmetricPlan {
            dims: self.dims,
            alpha,
        }
    }

    /// Site masses in one slot (0-based).
    pub fn one_point_marginal(&self, slot: usize) -> Result<Vec<Rational>> {
        if slot >= self.dims.n_marginals {
            return Err(Error::invalid(format!(
                "slot {slot} out of range for {} marginals",
                self.dims.n_marginals
            )));
        }
        let mut mass = vec![Rational::zero(); self.dims.n_sites];
        for (t, w) in &self.weights {
            mass[t[slot]] += w;
        }
        Ok(mass)
    }

    /// True when every slot carries the uniform measure (a Kantorovich plan).
    pub fn is_uniform(&self) -> bool {
        let u = self.dims.uniform_mass();
        (0..self.dims.n_marginals).all(|s| {
            self.one_point_marginal(s)
                .map(|m| m.iter().all(|x| *x == u))
                .unwrap_or(false)
        })
    }
}

/// A 2-point marginal in the bistochastic representation `mu_ij = l * p(a_i, a_j)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PairMarginal {
    mu: RationalMatrix,
}

impl PairMarginal {
    /// Wrap a matrix after checking it is nonnegative and bistochastic.
    pub fn new(mu: RationalMatrix) -> Result<Self> {
        let l = mu.rows();
        if mu.cols() != l {
            return Err(Error::invalid("pair marginal must be square"));
        }
        if mu.entries().iter().any(Signed::is_negative) {
            return Err(Error::invalid("pair marginal has a negative entry"));
        }
        for i in 0..l {
            let row: Rational = mu.row(i).iter().sum();
            let col: Rational = (0..l).map(|k| mu[(k, i)].clone()).sum();
            if !row.is_one() || !col.is_one() {
                return Err(Error::invalid(format!(
                    "pair marginal is not bistochastic at index {}",
                    i + 1
                )));
            }
        }
        Ok(Self { mu })
    }

    pub fn mu(&self) -> &RationalMatrix {
        &self.mu
    }

    pub fn n_sites(&self) -> usize {
        self.mu.rows()
    }

    /// Probability `p_ij = mu_ij / l`.
    pub fn probability(&self, i: usize, j: usize) -> Rational {
        &self.mu[(i, j)] / rational::int(self.n_sites() as i64)
    }

    /// Row-major entries, used as LP coordinates.
    pub fn as_vector(&self) -> Vec<Rational> {
        self.mu.entries().to_vec()
    }

    /// Upper-triangle chart `(mu_12, mu_13, mu_23, ...)` in row-major order.
    pub fn upper_chart(&self) -> Vec<Rational> {
        let l = self.n_sites();
        let mut out = Vec::new();
        for i in 0..l {
            for j in i + 1..l {
                out.push(self.mu[(i, j)].clone());
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.mu.is_symmetric()
    }

    /// Convex combination `sum_k lambda_k p_k` (no validation of the weights).
    pub fn combination(points: &[&PairMarginal], lambdas: &[Rational]) -> RationalMatrix {
        let l = points.first().map_or(0, |p| p.n_sites());
        let mut m = RationalMatrix::zeros(l, l);
        for (p, lam) in points.iter().zip(lambdas) {
            for i in 0..l {
                for j in 0..l {
                    m[(i, j)] += &p.mu[(i, j)] * lam;
                }
            }
        }
        m
    }
}

impl fmt::Display for PairMarginal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.n_sites())
            .map(|i| {
                self.mu
                    .row(i)
                    .iter()
                    .map(rational::format_rational)
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        write!(f, "{}", rows.join(" | "))
    }
}

/// Either representation, as read from plan JSON.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Plan {
    Symmetric(SymmetricPlan),
    Dense(DensePlan),
}

impl Plan {
    pub fn dims(&self) -> Dims {
        match self {
            Plan::Symmetric(p) => p.dims(),
            Plan::Dense(p) => p.dims(),
        }
    }

    pub fn symmetrized(&self) -> SymmetricPlan {
        match self {
            Plan::Symmetric(p) => p.clone(),
            Plan::Dense(p) => p.symmetrize(),
        }
    }

    pub fn dense(&self) -> DensePlan {
        match self {
            Plan::Symmetric(p) => p.to_dense(),
            Plan::Dense(p) => p.clone(),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: PlanJson = serde_json::from_str(text)
            .map_err(|e| Error::invalid(format!("plan JSON at line {} column {}: {e}", e.line(), e.column())))?;
        raw.into_plan()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let dims = self.dims();
        let (symmetric, terms): (bool, Vec<TermJson>) = match self {
            Plan::Symmetric(p) => (
                true,
                p.alpha
                    .iter()
                    .map(|(m, w)| TermJson {
                        index: m.one_based(),
                        weight: w.clone(),
                    })
                    .collect(),
            ),
            Plan::Dense(p) => (
                false,
                p.weights
                    .iter()
                    .map(|(t, w)| TermJson {
                        index: t.iter().map(|i| i + 1).collect(),
                        weight: w.clone(),
                    })
                    .collect(),
            ),
        };
        let raw = PlanJson {
            n_marginals: dims.n_marginals,
            n_sites: dims.n_sites,
            symmetric,
            terms,
        };
        serde_json::to_value(raw).expect("plan JSON is always serializable")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanJson {
    n_marginals: usize,
    n_sites: usize,
    symmetric: bool,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermJson {
    index: Vec<usize>,
    #[serde(with = "rational::serde_str")]
    weight: Rational,
}

impl PlanJson {
    fn into_plan(self) -> Result<Plan> {
        let dims = Dims::new(self.n_marginals, self.n_sites)?;
        if self.symmetric {
            let terms = self
                .terms
                .iter()
                .map(|t| Ok((MultiIndex::from_one_based(&t.index, dims)?, t.weight.clone())))
                .collect::<Result<Vec<_>>>()?;
            Ok(Plan::Symmetric(SymmetricPlan::new(dims, terms)?))
        } else {
            let terms = self
                .terms
                .iter()
                .map(|t| Ok((tuple_from_one_based(&t.index, dims)?, t.weight.clone())))
                .collect::<Result<Vec<_>>>()?;
            Ok(Plan::Dense(DensePlan::new(dims, terms)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, rat};

    fn d33() -> Dims {
        Dims::new(3, 3).unwrap()
    }

    fn f112() -> SymmetricPlan {
        SymmetricPlan::from_one_based(d33(), &[(vec![1, 1, 2], rat(1, 2)), (vec![2, 3, 3], rat(1, 2))]).unwrap()
    }

    fn mat(rows: &[&[(i64, i64)]]) -> RationalMatrix {
        RationalMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(p, q)| rat(p, q)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn multi_index_counts() {
        assert_eq!(d33().multi_indices().len(), 10);
        assert_eq!(Dims::new(3, 2).unwrap().multi_indices().len(), 4);
        assert_eq!(Dims::new(2, 4).unwrap().multi_indices().len(), 10);
        assert_eq!(d33().tuples().len(), 27);
        let first: Vec<String> = d33().multi_indices().iter().take(3).map(|m| m.to_string()).collect();
        assert_eq!(first, ["1,1,1", "1,1,2", "1,1,3"]);
    }

    #[test]
    fn symmetrize_single_atom() {
        let p = DensePlan::from_one_based(d33(), &[(vec![1, 1, 2], int(1))]).unwrap();
        let s = p.symmetrize();
        assert_eq!(s.alpha().len(), 1);
        assert_eq!(s.coefficient(&MultiIndex::sorted(&[0, 0, 1])), int(1));
    }

    #[test]
    fn symmetrize_fk_molecules_gives_f112() {
        let p = DensePlan::from_one_based(
            d33(),
            &[(vec![1, 1, 2], rat(1, 2)), (vec![2, 3, 3], rat(1, 2))],
        )
        .unwrap();
        assert_eq!(p.symmetrize(), f112());
    }

    #[test]
    fn to_dense_spreads_over_orderings() {
        let p = SymmetricPlan::from_one_based(d33(), &[(vec![1, 1, 2], int(1))]).unwrap();
        let d = p.to_dense();
        assert_eq!(d.n_atoms(), 3);
        assert!(d.weights().values().all(|w| *w == rat(1, 3)));

        let c = SymmetricPlan::from_one_based(d33(), &[(vec![1, 2, 3], int(1))]).unwrap();
        let d = c.to_dense();
        assert_eq!(d.n_atoms(), 6);
        assert!(d.weights().values().all(|w| *w == rat(1, 6)));

        let d = f112().to_dense();
        assert_eq!(d.n_atoms(), 6);
        assert!(d.weights().values().all(|w| *w == rat(1, 6)));
        assert_eq!(d.symmetrize(), f112());
    }

    #[test]
    fn one_point_marginals() {
        let p = DensePlan::from_one_based(d33(), &[(vec![1, 1, 2], int(1))]).unwrap();
        assert_eq!(p.one_point_marginal(0).unwrap(), vec![int(1), int(0), int(0)]);
        assert!(p.one_point_marginal(3).is_err());

        let d = f112().to_dense();
        for s in 0..3 {
            assert_eq!(d.one_point_marginal(s).unwrap(), vec![rat(1, 3); 3]);
        }
        assert!(d.is_uniform());

        let q = DensePlan::from_one_based(d33(), &[(vec![1, 1, 1], rat(1, 2)), (vec![2, 2, 2], rat(1, 2))]).unwrap();
        assert_eq!(q.one_point_marginal(0).unwrap(), vec![rat(1, 2), rat(1, 2), int(0)]);
        assert!(!q.is_uniform());
    }

    #[test]
    fn two_point_marginals_match_table() {
        let id = SymmetricPlan::from_one_based(
            d33(),
            &[(vec![1, 1, 1], rat(1, 3)), (vec![2, 2, 2], rat(1, 3)), (vec![3, 3, 3], rat(1, 3))],
        )
        .unwrap();
        assert_eq!(id.two_point_marginal().mu(), &RationalMatrix::identity(3));

        let expected = mat(&[&[(1, 2), (1, 2), (0, 1)], &[(1, 2), (0, 1), (1, 2)], &[(0, 1), (1, 2), (1, 2)]]);
        assert_eq!(f112().two_point_marginal().mu(), &expected);

        let c = SymmetricPlan::from_one_based(d33(), &[(vec![1, 2, 3], int(1))]).unwrap();
        let expected = mat(&[&[(0, 1), (1, 2), (1, 2)], &[(1, 2), (0, 1), (1, 2)], &[(1, 2), (1, 2), (0, 1)]]);
        assert_eq!(c.two_point_marginal().mu(), &expected);
        assert!(PairMarginal::new(expected).is_ok());
    }

    #[test]
    fn invalid_plans_are_rejected() {
        assert!(SymmetricPlan::from_one_based(d33(), &[(vec![1, 1, 2], rat(1, 2))]).is_err());
        assert!(SymmetricPlan::from_one_based(d33(), &[(vec![1, 1, 4], int(1))]).is_err());
        assert!(DensePlan::from_one_based(d33(), &[(vec![1, 1], int(1))]).is_err());
        assert!(
            DensePlan::from_one_based(d33(), &[(vec![1, 1, 1], int(2)), (vec![2, 2, 2], int(-1))]).is_err()
        );
        assert!(Dims::new(1, 3).is_err());
        assert!(PairMarginal::new(mat(&[&[(1, 1), (1, 1)], &[(0, 1), (0, 1)]])).is_err());
    }

    #[test]
    fn metric_validation() {
        let ok = mat(&[&[(0, 1), (1, 1), (2, 1)], &[(1, 1), (0, 1), (1, 1)], &[(2, 1), (1, 1), (0, 1)]]);
        assert!(StateSpace::with_metric(3, ok).is_ok());
        let bad = mat(&[&[(0, 1), (1, 1), (3, 1)], &[(1, 1), (0, 1), (1, 1)], &[(3, 1), (1, 1), (0, 1)]]);
        assert!(StateSpace::with_metric(3, bad).is_err());
        let asym = mat(&[&[(0, 1), (1, 1)], &[(2, 1), (0, 1)]]);
        assert!(StateSpace::with_metric(3, asym).is_err());
        assert!(StateSpace::on_line(3, vec![int(1), int(1)]).is_err());
        assert!(StateSpace::new(3, 2).unwrap().with_labels(vec!["a".into(), "a".into()]).is_err());
    }

    #[test]
    fn line_distances() {
        let s = StateSpace::equispaced_line(3, 3).unwrap();
        assert_eq!(s.distance(0, 2), Some(int(2)));
        assert_eq!(s.labels(), ["1", "2", "3"]);
        assert!(StateSpace::new(3, 3).unwrap().distance(0, 1).is_none());
    }

    #[test]
    fn plan_json_round_trip() {
        let text = r#"{"n_marginals":3,"n_sites":3,"symmetric":true,"terms":[{"index":[1,1,2],"weight":"1/2"},{"index":[2,3,3],"weight":"1/2"}]}"#;
        let plan = Plan::from_json_str(text).unwrap();
        assert_eq!(plan, Plan::Symmetric(f112()));
        let back = Plan::from_json_str(&plan.to_json().to_string()).unwrap();
        assert_eq!(back, plan);

        let dense = Plan::Dense(f112().to_dense());
        assert_eq!(Plan::from_json_str(&dense.to_json().to_string()).unwrap(), dense);
    }

    #[test]
    fn plan_json_errors() {
        let unsorted = r#"{"n_marginals":3,"n_sites":3,"symmetric":true,"terms":[{"index":[2,1,1],"weight":"1"}]}"#;
        assert!(Plan::from_json_str(unsorted).is_err());
        let err = Plan::from_json_str("{\n  \"n_marginals\": 3,\n  oops").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }
}
