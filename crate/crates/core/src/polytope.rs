//! Marginal constraint systems, vertex enumeration and the reduced polytope.
//!
//! The symmetric Kantorovich polytope is `{alpha >= 0 : A alpha = b}` with one
//! column per multi-index. Its vertices are the nonnegative basic solutions, found
//! by solving over every column subset of size up to `rank(A)`.

use itertools::Itertools;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{lp_solve, rank, rat, solve_square_system, LpStatus, Rational, RationalMatrix};
use crate::monge::{self, MongeIndex};
use crate::plans::{DensePlan, Dims, MultiIndex, PairMarginal, SymmetricPlan};

/// Default cap on the number of column subsets examined by [`enumerate_bfs`].
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// `A alpha = b` for symmetric plans: `A[i][m] = mult_i(m) / N`, `b_i = 1/l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSystem {
    dims: Dims,
    a: RationalMatrix,
    b: Vec<Rational>,
    columns: Vec<MultiIndex>,
}

pub fn build_constraints(dims: Dims) -> ConstraintSystem {
    let columns = dims.multi_indices();
    let n = dims.n_marginals as i64;
    let mut a = RationalMatrix::zeros(dims.n_sites, columns.len());
    for (j, m) in columns.iter().enumerate() {
        for i in 0..dims.n_sites {
            a[(i, j)] = rat(m.multiplicity(i) as i64, n);
        }
    }
    ConstraintSystem {
        dims,
        a,
        b: vec![dims.uniform_mass(); dims.n_sites],
        columns,
    }
}

impl ConstraintSystem {
    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn a(&self) -> &RationalMatrix {
        &self.a
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }

    pub fn columns(&self) -> &[MultiIndex] {
        &self.columns
    }

    pub fn rank(&self) -> usize {
        rank(&self.a)
    }

    /// Coefficients of `plan` in column order.
    pub fn alpha_vector(&self, plan: &SymmetricPlan) -> Vec<Rational> {
        self.columns.iter().map(|m| plan.coefficient(m)).collect()
    }

    pub fn plan_from_vector(&self, alpha: &[Rational]) -> Result<SymmetricPlan> {
        if alpha.len() != self.columns.len() {
            return Err(Error::invalid("coefficient vector has the wrong length"));
        }
        SymmetricPlan::new(self.dims, self.columns.iter().cloned().zip(alpha.iter().cloned()))
    }

    pub fn is_satisfied_by(&self, plan: &SymmetricPlan) -> bool {
        plan.dims() == self.dims
            && self.a.mul_vec(&self.alpha_vector(plan)).ok().as_deref() == Some(self.b.as_slice())
    }

    /// Column `j` of the linear map `alpha -> mu = l * M2(alpha)`, as a row-major `l*l` vector.
    fn m2_column(&self, j: usize) -> Vec<Rational> {
        let l = self.dims.n_sites;
        let orders = self.columns[j].orderings();
        let share = rat(l as i64, orders.len() as i64);
        let mut out = vec![Rational::zero(); l * l];
        for t in orders {
            out[t[0] * l + t[1]] += &share;
        }
        out
    }
}

/// Marginal constraints on the full (non-symmetric) polytope: one column per
/// ordered tuple and one row per (slot, site), `N * l` rows in all.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FullConstraintSystem {
    dims: Dims,
    a: RationalMatrix,
    b: Vec<Rational>,
    columns: Vec<Vec<usize>>,
}

pub fn build_full_constraints(dims: Dims, budget: u128) -> Result<FullConstraintSystem> {
    let needed = (dims.n_sites as u128)
        .checked_pow(dims.n_marginals as u32)
        .unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::Budget {
            what: format!("full polytope with l^N columns (N={}, l={})", dims.n_marginals, dims.n_sites),
            needed,
            budget,
        });
    }
    let columns = dims.tuples();
    let l = dims.n_sites;
    let mut a = RationalMatrix::zeros(dims.n_marginals * l, columns.len());
    for (j, t) in columns.iter().enumerate() {
        for (slot, &i) in t.iter().enumerate() {
            a[(slot * l + i, j)] = Rational::one();
        }
    }
    Ok(FullConstraintSystem {
        dims,
        a,
        b: vec![dims.uniform_mass(); dims.n_marginals * l],
        columns,
    })
}

impl FullConstraintSystem {
    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn a(&self) -> &RationalMatrix {
        &self.a
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }

    pub fn columns(&self) -> &[Vec<usize>] {
        &self.columns
    }

    pub fn plan_from_vector(&self, x: &[Rational]) -> Result<DensePlan> {
        if x.len() != self.columns.len() {
            return Err(Error::invalid("weight vector has the wrong length"));
        }
        DensePlan::new(self.dims, self.columns.iter().cloned().zip(x.iter().cloned()))
    }

    pub fn weight_vector(&self, plan: &DensePlan) -> Vec<Rational> {
        self.columns
            .iter()
            .map(|t| plan.weights().get(t).cloned().unwrap_or_else(Rational::zero))
            .collect()
    }

    /// Vertices of the full polytope as dense plans.
    pub fn vertices(&self, budget: u128) -> Result<Vec<DensePlan>> {
        enumerate_bfs(&self.a, &self.b, budget)?
            .iter()
            .map(|x| self.plan_from_vector(x))
            .collect()
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| {
        acc.saturating_mul((n - i) as u128) / (i as u128 + 1)
    })
}

/// All vertices of `{x >= 0 : A x = b}`, as dense vectors in canonical order
/// (support size, support positions, coefficients).
///
/// Refuses with [`Error::Budget`] when the number of column subsets of size
/// `<= rank(A)` exceeds `budget`.
pub fn enumerate_bfs(a: &RationalMatrix, b: &[Rational], budget: u128) -> Result<Vec<Vec<Rational>>> {
    if b.len() != a.rows() {
        return Err(Error::invalid("right-hand side length does not match the system"));
    }
    let n = a.cols();
    let r = rank(a);
    let needed = (1..=r).fold(0u128, |acc, k| acc.saturating_add(binomial(n, k)));
    if needed > budget {
        return Err(Error::Budget {
            what: format!("vertex enumeration over {n} columns of rank {r}"),
            needed,
            budget,
        });
    }
    if b.iter().all(Zero::is_zero) {
        return Ok(vec![vec![Rational::zero(); n]]);
    }
    let mut found: Vec<(Vec<usize>, Vec<Rational>)> = (1..=r)
        .flat_map(|k| (0..n).combinations(k))
        .par_bridge()
        .filter_map(|cols| {
            let x = solve_square_system(&a.select_columns(&cols), b).ok()??;
            x.iter().all(Signed::is_positive).then_some((cols, x))
        })
        .collect();
    // Each vertex has exactly one positive support, so duplicates are identical.
    found.sort_by(|p, q| p.0.len().cmp(&q.0.len()).then_with(|| p.0.cmp(&q.0)).then_with(|| p.1.cmp(&q.1)));
    found.dedup();
    Ok(found
        .into_iter()
        .map(|(cols, x)| {
            let mut full = vec![Rational::zero(); n];
            for (j, v) in cols.into_iter().zip(x) {
                full[j] = v;
            }
            full
        })
        .collect())
}

/// Key for the canonical vertex order: support size, support, coefficients.
pub fn plan_sort_key(plan: &SymmetricPlan) -> (usize, Vec<MultiIndex>, Vec<Rational>) {
    (
        plan.alpha().len(),
        plan.alpha().keys().cloned().collect(),
        plan.alpha().values().cloned().collect(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VertexFlags {
    pub symmetrized_monge: bool,
    /// The vertex's 2-point marginal is an extreme point of the reduced polytope.
    pub reduced_extreme: bool,
}

/// Extreme points of the symmetric Kantorovich polytope with names and flags.
#[derive(Clone, Debug)]
pub struct VertexCatalog {
    dims: Dims,
    vertices: Vec<SymmetricPlan>,
    names: Vec<String>,
    flags: Vec<VertexFlags>,
}

impl VertexCatalog {
    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[SymmetricPlan] {
        &self.vertices
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn flags(&self) -> &[VertexFlags] {
        &self.flags
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &SymmetricPlan, VertexFlags)> {
        self.names
            .iter()
            .zip(&self.vertices)
            .zip(&self.flags)
            .map(|((n, v), f)| (n.as_str(), v, *f))
    }

    pub fn position(&self, plan: &SymmetricPlan) -> Option<usize> {
        self.vertices.iter().position(|v| v == plan)
    }

    pub fn get(&self, name: &str) -> Option<&SymmetricPlan> {
        self.names.iter().position(|n| n == name).map(|i| &self.vertices[i])
    }
}

pub fn enumerate_vertices(system: &ConstraintSystem) -> Result<VertexCatalog> {
    enumerate_vertices_with_budget(system, DEFAULT_BUDGET)
}

pub fn enumerate_vertices_with_budget(system: &ConstraintSystem, budget: u128) -> Result<VertexCatalog> {
    let mut vertices = enumerate_bfs(&system.a, &system.b, budget)?
        .iter()
        .map(|x| system.plan_from_vector(x))
        .collect::<Result<Vec<_>>>()?;
    vertices.sort_by_key(plan_sort_key);

    let index = MongeIndex::build(system.dims)?;
    let marginals: Vec<PairMarginal> = vertices.iter().map(SymmetricPlan::two_point_marginal).collect();
    let extreme = filter_extreme(&marginals)?;
    let flags = vertices
        .iter()
        .zip(&marginals)
        .map(|(v, m)| VertexFlags {
            symmetrized_monge: index.contains(v),
            reduced_extreme: extreme.contains(m),
        })
        .collect();
    let names = vertices.iter().map(monge::name_vertex).collect();
    Ok(VertexCatalog {
        dims: system.dims,
        vertices,
        names,
        flags,
    })
}

/// Distinct 2-point marginals of the catalog vertices, in catalog order.
pub fn project_reduced(catalog: &VertexCatalog) -> Vec<PairMarginal> {
    let mut out: Vec<PairMarginal> = Vec::new();
    for v in &catalog.vertices {
        let m = v.two_point_marginal();
        if !out.contains(&m) {
            out.push(m);
        }
    }
    out
}

/// A named extreme point of a reduced polytope with a representative preimage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedVertex {
    pub name: String,
    pub plan: SymmetricPlan,
    pub marginal: PairMarginal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedCatalog {
    pub dims: Dims,
    pub entries: Vec<ReducedVertex>,
}

impl ReducedCatalog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn marginals(&self) -> Vec<PairMarginal> {
        self.entries.iter().map(|e| e.marginal.clone()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&ReducedVertex> {
        self.entries.iter().find(|e| e.name == name)
    }
}

/// Extreme points of the reduced Kantorovich polytope, each with the first
/// catalog vertex that maps onto it.
pub fn reduced_vertices(catalog: &VertexCatalog) -> ReducedCatalog {
    let mut entries: Vec<ReducedVertex> = Vec::new();
    for (name, plan, flags) in catalog.iter() {
        if !flags.reduced_extreme {
            continue;
        }
        let marginal = plan.two_point_marginal();
        if entries.iter().all(|e| e.marginal != marginal) {
            entries.push(ReducedVertex {
                name: name.to_string(),
                plan: plan.clone(),
                marginal,
            });
        }
    }
    ReducedCatalog {
        dims: catalog.dims,
        entries,
    }
}

/// For each point, whether it is extreme in the convex hull of the list.
/// Repeated points count once: later copies are marked `false`.
pub fn extreme_mask(points: &[PairMarginal]) -> Result<Vec<bool>> {
    let mut alive: Vec<bool> = (0..points.len()).map(|i| !points[..i].contains(&points[i])).collect();
    let certified = certify_by_directions(points, &alive);
    let known: Vec<PairMarginal> = (0..points.len())
        .filter(|&i| certified[i])
        .map(|i| points[i].clone())
        .collect();
    for i in 0..points.len() {
        if !alive[i] || certified[i] {
            continue;
        }
        // Entries are nonnegative, so only points supported inside supp(p) can take part.
        let inside = |q: &PairMarginal| {
            q.mu()
                .entries()
                .iter()
                .zip(points[i].mu().entries())
                .all(|(a, b)| a.is_zero() || !b.is_zero())
        };
        let near: Vec<PairMarginal> = known.iter().filter(|q| inside(q)).cloned().collect();
        // A point already known to lie in the hull of the others can be dropped
        // from later tests without changing the hull.
        if decompose(&points[i], &near)?.is_some() {
            alive[i] = false;
            continue;
        }
        let others: Vec<PairMarginal> = (0..points.len())
            .filter(|&j| j != i && alive[j] && inside(&points[j]))
            .map(|j| points[j].clone())
            .collect();
        alive[i] = decompose(&points[i], &others)?.is_none();
    }
    Ok(alive)
}

/// Points that are the unique minimizer of some integer linear functional,
/// hence extreme. Evaluated exactly on integer-scaled coordinates.
fn certify_by_directions(points: &[PairMarginal], distinct: &[bool]) -> Vec<bool> {
    let mut certified = vec![false; points.len()];
    let idx: Vec<usize> = (0..points.len()).filter(|&i| distinct[i]).collect();
    if idx.len() < 2 {
        for &i in &idx {
            certified[i] = true;
        }
        return certified;
    }
    let denom = idx
        .iter()
        .flat_map(|&i| points[i].mu().entries().iter().map(|v| v.denom().clone()))
        .fold(num_bigint::BigInt::one(), |acc, d| num_integer::Integer::lcm(&acc, &d));
    let scaled: Option<Vec<Vec<i64>>> = idx
        .iter()
        .map(|&i| {
            points[i]
                .mu()
                .entries()
                .iter()
                .map(|v| i64::try_from((v * &denom).to_integer()).ok().filter(|x| x.abs() < 1 << 40))
                .collect()
        })
        .collect();
    let Some(scaled) = scaled else { return certified };
    let dim = scaled[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let rounds = (8 * idx.len()).clamp(64, 4096);
    for _ in 0..rounds {
        let c: Vec<i64> = (0..dim).map(|_| rng.gen_range(-1000..=1000)).collect();
        let values: Vec<i128> = scaled
            .iter()
            .map(|x| x.iter().zip(&c).map(|(a, b)| *a as i128 * *b as i128).sum())
            .collect();
        let best = *values.iter().min().expect("nonempty");
        let mut hits = values.iter().enumerate().filter(|(_, v)| **v == best);
        if let (Some((k, _)), None) = (hits.next(), hits.next()) {
            certified[idx[k]] = true;
        }
    }
    certified
}

/// Points not expressible as convex combinations of the other points.
pub fn filter_extreme(points: &[PairMarginal]) -> Result<Vec<PairMarginal>> {
    Ok(points
        .iter()
        .zip(extreme_mask(points)?)
        .filter(|(_, keep)| *keep)
        .map(|(p, _)| p.clone())
        .collect())
}

/// Exact convex coefficients writing `target` over `generators`, if any exist.
pub fn decompose(target: &PairMarginal, generators: &[PairMarginal]) -> Result<Option<Vec<Rational>>> {
    if generators.is_empty() {
        return Ok(None);
    }
    let l = target.n_sites();
    if generators.iter().any(|g| g.n_sites() != l) {
        return Err(Error::invalid("generators and target have different sizes"));
    }
    let mut columns: Vec<Vec<Rational>> = generators.iter().map(PairMarginal::as_vector).collect();
    for c in &mut columns {
        c.push(Rational::one());
    }
    let mut b = target.as_vector();
    b.push(Rational::one());
    // Keep only rows of [A | b] that are independent of the ones already kept.
    let mut kept: Vec<Vec<Rational>> = Vec::new();
    let mut kept_rank = 0;
    for r in 0..b.len() {
        let mut row: Vec<Rational> = columns.iter().map(|c| c[r].clone()).collect();
        row.push(b[r].clone());
        kept.push(row);
        let rk = rank(&RationalMatrix::from_rows(kept.clone())?);
        if rk > kept_rank {
            kept_rank = rk;
        } else {
            kept.pop();
        }
    }
    let b: Vec<Rational> = kept.iter_mut().map(|row| row.pop().expect("augmented row")).collect();
    let a = RationalMatrix::from_rows(kept)?;
    let res = lp_solve(&vec![Rational::zero(); generators.len()], &a, &b, true)?;
    Ok(res.point)
}

/// Whether the polyhedron `{x >= 0 : A x = b}` is a single point.
///
/// `None` when it is empty. Otherwise each coordinate is minimized and maximized
/// exactly; the face is a point iff every range collapses.
pub fn face_is_singleton(a: &RationalMatrix, b: &[Rational]) -> Result<Option<bool>> {
    let n = a.cols();
    let zero = vec![Rational::zero(); n];
    let first = lp_solve(&zero, a, b, true)?;
    let Some(x0) = first.point else {
        return Ok(None);
    };
    for j in 0..n {
        for sign in [1, -1] {
            let mut c = zero.clone();
            c[j] = Rational::from_integer(sign.into());
            let res = lp_solve(&c, a, b, true)?;
            // A bounded polytope, so never unbounded; compare the extreme coordinate.
            match (res.status, res.point) {
                (LpStatus::Optimal, Some(p)) if p[j] == x0[j] => {}
                _ => return Ok(Some(false)),
            }
        }
    }
    Ok(Some(true))
}

/// True iff exactly one symmetric plan in the polytope has 2-point marginal `p`.
pub fn preimage_unique(p: &PairMarginal, system: &ConstraintSystem) -> Result<bool> {
    let l = system.dims.n_sites;
    if p.n_sites() != l {
        return Err(Error::invalid("marginal size does not match the system"));
    }
    let n = system.columns.len();
    let mut a = RationalMatrix::zeros(l + l * l, n);
    for j in 0..n {
        for i in 0..l {
            a[(i, j)] = system.a[(i, j)].clone();
        }
        for (k, v) in system.m2_column(j).into_iter().enumerate() {
            a[(l + k, j)] = v;
        }
    }
    let mut b = system.b.clone();
    b.extend(p.as_vector());
    face_is_singleton(&a, &b)?
        .ok_or_else(|| Error::invalid(format!("marginal [{p}] is not in the reduced polytope")))
}

/// Vertex test by linear independence of the support columns.
pub fn is_vertex(plan: &SymmetricPlan, system: &ConstraintSystem) -> bool {
    if !system.is_satisfied_by(plan) {
        return false;
    }
    let cols: Vec<usize> = system
        .columns
        .iter()
        .enumerate()
        .filter(|(_, m)| plan.alpha().contains_key(*m))
        .map(|(j, _)| j)
        .collect();
    rank(&system.a.select_columns(&cols)) == cols.len()
}

/// Vertex test by the LP certificate: the plan is the only admissible plan
/// supported inside its own support, so it is no mixture of two distinct plans.
pub fn is_irreducible(plan: &SymmetricPlan, system: &ConstraintSystem) -> Result<bool> {
    if !system.is_satisfied_by(plan) {
        return Ok(false);
    }
    let cols: Vec<usize> = system
        .columns
        .iter()
        .enumerate()
        .filter(|(_, m)| plan.alpha().contains_key(*m))
        .map(|(j, _)| j)
        .collect();
    Ok(face_is_singleton(&system.a.select_columns(&cols), &system.b)?.unwrap_or(false))
}
