//! Monge and symmetrized Monge states, and the vertex nomenclature for N = l = 3.
//!
//! A Monge state is `(1/l) sum_nu delta_(tau_1(nu), ..., tau_N(nu))` for
//! permutations `tau_k` of the sites. Reindexing `nu` lets us fix `tau_1 = id`,
//! so there are `(l!)^(N-1)` tuples to enumerate.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::exact::rational::{self, Rational};
use crate::plans::{DensePlan, Dims, MultiIndex, PairMarginal, SymmetricPlan};
use crate::polytope::{self, ReducedCatalog, ReducedVertex};

/// Default cap on the number of permutation tuples enumerated.
pub const DEFAULT_MONGE_BUDGET: u128 = 1_000_000;

/// A permutation of `{0, .., l-1}` stored as its image vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::invalid(format!("{images:?} is not a permutation")));
            }
        }
        Ok(Self(images))
    }

    pub fn identity(l: usize) -> Self {
        Self((0..l).collect())
    }

    /// All `l!` permutations in lexicographic order of their image vectors.
    pub fn all(l: usize) -> Vec<Self> {
        (0..l).permutations(l).map(Self).collect()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// `self ∘ other`, i.e. `x -> self(other(x))`.
    pub fn compose(&self, other: &Self) -> Self {
        Self(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Self(inv)
    }

    /// Name for `l = 3` permutations: Id, T12, T13, T23, C (1->2->3->1), C′.
    pub fn name(&self) -> Option<&'static str> {
        match self.0.as_slice() {
            [0, 1, 2] => Some("Id"),
            [1, 0, 2] => Some("T12"),
            [2, 1, 0] => Some("T13"),
            [0, 2, 1] => Some("T23"),
            [1, 2, 0] => Some("C"),
            [2, 0, 1] => Some("C′"),
            _ => None,
        }
    }

    /// Position in the naming order Id, T12, T13, T23, C, C′ (l = 3 only).
    fn name_rank(&self) -> usize {
        const ORDER: [&str; 6] = ["Id", "T12", "T13", "T23", "C", "C′"];
        self.name()
            .and_then(|n| ORDER.iter().position(|o| *o == n))
            .unwrap_or(usize::MAX)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.name() {
            Some(n) => write!(f, "{n}"),
            None => {
                let one: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
                write!(f, "[{}]", one.join(" "))
            }
        }
    }
}

/// N permutations with the first fixed to the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MongeTuple {
    perms: Vec<Permutation>,
}

impl MongeTuple {
    pub fn new(perms: Vec<Permutation>) -> Result<Self> {
        let Some(first) = perms.first() else {
            return Err(Error::invalid("empty permutation tuple"));
        };
        let l = first.0.len();
        if perms.iter().any(|p| p.0.len() != l) {
            return Err(Error::invalid("permutations act on different site counts"));
        }
        if *first != Permutation::identity(l) {
            return Err(Error::invalid("first permutation must be the identity"));
        }
        Ok(Self { perms })
    }

    /// Every tuple `(id, tau_2, .., tau_N)` for the given dimensions.
    pub fn all(dims: Dims, budget: u128) -> Result<Vec<Self>> {
        let l = dims.n_sites;
        let per: u128 = (1..=l as u128).product();
        let needed = per.checked_pow((dims.n_marginals - 1) as u32).unwrap_or(u128::MAX);
        if needed > budget {
            return Err(Error::Budget {
                what: format!("Monge tuple enumeration for N={} l={l}", dims.n_marginals),
                needed,
                budget,
            });
        }
        let perms = Permutation::all(l);
        let id = Permutation::identity(l);
        Ok((1..dims.n_marginals)
            .map(|_| perms.iter().cloned())
            .multi_cartesian_product()
            .map(|rest| {
                let mut v = vec![id.clone()];
                v.extend(rest);
                Self { perms: v }
            })
            .collect())
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    /// The Monge state `(1/l) sum_nu delta_(tau_1(nu), .., tau_N(nu))`.
    pub fn plan(&self) -> DensePlan {
        let l = self.perms[0].0.len();
        let dims = Dims {
            n_marginals: self.perms.len(),
            n_sites: l,
        };
        let w = rational::rat(1, l as i64);
        DensePlan::new(
            dims,
            (0..l).map(|nu| (self.perms.iter().map(|p| p.apply(nu)).collect(), w.clone())),
        )
        .expect("a Monge state is a valid plan")
    }
}

/// All symmetrized Monge states of a state space, with their generating tuples.
#[derive(Clone, Debug)]
pub struct MongeIndex {
    dims: Dims,
    plans: Vec<SymmetricPlan>,
    generators: HashMap<SymmetricPlan, Vec<MongeTuple>>,
    tuple_count: usize,
}

impl MongeIndex {
    pub fn build(dims: Dims) -> Result<Self> {
        Self::build_with_budget(dims, DEFAULT_MONGE_BUDGET)
    }

    pub fn build_with_budget(dims: Dims, budget: u128) -> Result<Self> {
        let tuples = MongeTuple::all(dims, budget)?;
        let tuple_count = tuples.len();
        let mut generators: HashMap<SymmetricPlan, Vec<MongeTuple>> = HashMap::new();
        for t in tuples {
            generators.entry(t.plan().symmetrize()).or_default().push(t);
        }
        let mut plans: Vec<SymmetricPlan> = generators.keys().cloned().collect();
        plans.sort_by_key(polytope::plan_sort_key);
        Ok(Self {
            dims,
            plans,
            generators,
            tuple_count,
        })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    /// Distinct symmetrized Monge states in canonical order.
    pub fn plans(&self) -> &[SymmetricPlan] {
        &self.plans
    }

    /// Number of permutation tuples that were enumerated.
    pub fn tuple_count(&self) -> usize {
        self.tuple_count
    }

    pub fn contains(&self, plan: &SymmetricPlan) -> bool {
        self.generators.contains_key(plan)
    }

    pub fn generators(&self, plan: &SymmetricPlan) -> &[MongeTuple] {
        self.generators.get(plan).map_or(&[], Vec::as_slice)
    }
}

fn index_33() -> &'static MongeIndex {
    static INDEX: OnceLock<MongeIndex> = OnceLock::new();
    INDEX.get_or_init(|| {
        MongeIndex::build(Dims {
            n_marginals: 3,
            n_sites: 3,
        })
        .expect("3x3 Monge enumeration fits any budget")
    })
}

/// All symmetrized Monge states, deduplicated and canonically ordered.
pub fn enumerate_symmetrized_monge(dims: Dims) -> Result<Vec<SymmetricPlan>> {
    Ok(MongeIndex::build(dims)?.plans)
}

/// Exact membership test against the enumerated symmetrized Monge states.
pub fn is_symmetrized_monge(plan: &SymmetricPlan) -> Result<bool> {
    if plan.dims() == index_33().dims() {
        return Ok(index_33().contains(plan));
    }
    Ok(MongeIndex::build(plan.dims())?.contains(plan))
}

/// True iff the plan is a Monge state: `l` atoms of weight `1/l` whose entries
/// in every slot run through all sites exactly once.
pub fn is_monge(plan: &DensePlan) -> bool {
    let dims = plan.dims();
    let l = dims.n_sites;
    if plan.n_atoms() != l {
        return false;
    }
    let w = dims.uniform_mass();
    if plan.weights().values().any(|x| *x != w) {
        return false;
    }
    (0..dims.n_marginals).all(|slot| {
        let mut seen = vec![false; l];
        plan.weights()
            .keys()
            .all(|t| !std::mem::replace(&mut seen[t[slot]], true))
    })
}

/// Vertices of the reduced Monge polytope: 2-point marginals of all symmetrized
/// Monge states that are not convex combinations of the others.
pub fn monge_polytope_vertices(dims: Dims) -> Result<ReducedCatalog> {
    let index = MongeIndex::build(dims)?;
    let mut reps: Vec<(PairMarginal, &SymmetricPlan)> = Vec::new();
    for plan in index.plans() {
        let m = plan.two_point_marginal();
        if !reps.iter().any(|(q, _)| *q == m) {
            reps.push((m, plan));
        }
    }
    let marginals: Vec<PairMarginal> = reps.iter().map(|(m, _)| m.clone()).collect();
    let mask = polytope::extreme_mask(&marginals)?;
    let entries = reps
        .into_iter()
        .zip(mask)
        .filter(|(_, keep)| *keep)
        .map(|((marginal, plan), _)| ReducedVertex {
            name: name_with_index(plan, &index),
            plan: plan.clone(),
            marginal,
        })
        .collect();
    Ok(ReducedCatalog { dims, entries })
}

/// Label for a plan. For N = l = 3 this follows the usual table nomenclature
/// (Id, Tij, C, "τ,τ′" pairs, Fiij, Kxxx,yyy); otherwise `V` followed by the support.
pub fn name_vertex(plan: &SymmetricPlan) -> String {
    let dims = plan.dims();
    if dims.n_marginals == 3 && dims.n_sites == 3 {
        name_with_index(plan, index_33())
    } else {
        fallback_name(plan)
    }
}

fn compact(m: &MultiIndex, n_sites: usize) -> String {
    let parts: Vec<String> = m.one_based().iter().map(|i| i.to_string()).collect();
    if n_sites <= 9 {
        parts.concat()
    } else {
        parts.join(".")
    }
}

fn fallback_name(plan: &SymmetricPlan) -> String {
    let l = plan.dims().n_sites;
    let support: Vec<String> = plan.support().iter().map(|m| compact(m, l)).collect();
    format!("V{}", support.join("+"))
}

fn name_with_index(plan: &SymmetricPlan, index: &MongeIndex) -> String {
    let dims = plan.dims();
    if dims.n_marginals != 3 || dims.n_sites != 3 {
        return fallback_name(plan);
    }
    if index.contains(plan) {
        if let Some(name) = monge_name(index.generators(plan)) {
            return name;
        }
    }
    let mut terms: Vec<(&MultiIndex, &Rational)> = plan.alpha().iter().collect();
    let half = rational::rat(1, 2);
    if terms.len() == 2 && terms.iter().all(|(_, w)| **w == half) {
        return format!("F{}", compact(terms[0].0, 3));
    }
    if terms.len() == 3 {
        // Biggest two masses; ties go to non-constant indices, then lexicographic.
        terms.sort_by(|a, b| {
            b.1.cmp(a.1)
                .then(a.0.is_constant().cmp(&b.0.is_constant()))
                .then(a.0.cmp(b.0))
        });
        return format!("K{},{}", compact(terms[0].0, 3), compact(terms[1].0, 3));
    }
    fallback_name(plan)
}

/// Among all ways to write the state as `S` of a Monge state with permutations
/// `{id, σ, σ′}`, pick the smallest pair in the order Id, T12, T13, T23, C, C′.
/// A pair generated by powers of one permutation is named after that permutation.
fn monge_name(tuples: &[MongeTuple]) -> Option<String> {
    let mut best: Option<(usize, usize, Permutation, Permutation)> = None;
    for t in tuples {
        for k in 0..t.perms.len() {
            let inv = t.perms[k].inverse();
            let mut rest: Vec<Permutation> = t
                .perms
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != k)
                .map(|(_, p)| p.compose(&inv))
                .collect();
            rest.sort_by_key(Permutation::name_rank);
            let key = (rest[0].name_rank(), rest[1].name_rank());
            if best.as_ref().is_none_or(|b| key < (b.0, b.1)) {
                best = Some((key.0, key.1, rest[0].clone(), rest[1].clone()));
            }
        }
    }
    let (_, _, s, t) = best?;
    if t == s.compose(&s) {
        Some(s.to_string())
    } else if s == t.compose(&t) {
        Some(t.to_string())
    } else {
        Some(format!("{s},{t}"))
    }
}

/// Distinct 2-point marginals of the symmetrized Monge states.
pub fn symmetrized_monge_marginals(dims: Dims) -> Result<Vec<PairMarginal>> {
    let index = MongeIndex::build(dims)?;
    let mut out: Vec<PairMarginal> = Vec::new();
    for p in index.plans() {
        let m = p.two_point_marginal();
        if !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, rat};

    fn d(n: usize, l: usize) -> Dims {
        Dims::new(n, l).unwrap()
    }

    fn sym(dims: Dims, terms: &[(&[usize], (i64, i64))]) -> SymmetricPlan {
        SymmetricPlan::from_one_based(
            dims,
            &terms.iter().map(|(i, (p, q))| (i.to_vec(), rat(*p, *q))).collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn permutation_algebra() {
        let c = Permutation::new(vec![1, 2, 0]).unwrap();
        assert_eq!(c.name(), Some("C"));
        assert_eq!(c.compose(&c).name(), Some("C′"));
        assert_eq!(c.compose(&c.inverse()), Permutation::identity(3));
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert_eq!(Permutation::all(3).len(), 6);
    }

    #[test]
    fn two_by_two_monge_states() {
        let plans = enumerate_symmetrized_monge(d(2, 2)).unwrap();
        assert_eq!(plans.len(), 2);
        assert!(plans.contains(&sym(d(2, 2), &[(&[1, 1], (1, 2)), (&[2, 2], (1, 2))])));
        assert!(plans.contains(&sym(d(2, 2), &[(&[1, 2], (1, 1))])));
    }

    #[test]
    fn two_site_endpoints_are_symmetrized_monge() {
        let g1 = sym(d(3, 2), &[(&[1, 1, 1], (1, 2)), (&[2, 2, 2], (1, 2))]);
        let g2 = sym(d(3, 2), &[(&[1, 1, 2], (1, 2)), (&[1, 2, 2], (1, 2))]);
        assert!(is_symmetrized_monge(&g1).unwrap());
        assert!(is_symmetrized_monge(&g2).unwrap());
    }

    #[test]
    fn classification_of_named_states() {
        let f112 = sym(d(3, 3), &[(&[1, 1, 2], (1, 2)), (&[2, 3, 3], (1, 2))]);
        let c = sym(d(3, 3), &[(&[1, 2, 3], (1, 1))]);
        let k = sym(d(3, 3), &[(&[2, 3, 3], (1, 2)), (&[1, 1, 1], (1, 3)), (&[2, 2, 2], (1, 6))]);
        assert!(!is_symmetrized_monge(&f112).unwrap());
        assert!(is_symmetrized_monge(&c).unwrap());
        assert!(!is_symmetrized_monge(&k).unwrap());
    }

    #[test]
    fn dense_monge_test() {
        let id = DensePlan::from_one_based(
            d(3, 3),
            &[(vec![1, 1, 1], rat(1, 3)), (vec![2, 2, 2], rat(1, 3)), (vec![3, 3, 3], rat(1, 3))],
        )
        .unwrap();
        assert!(is_monge(&id));
        let f112 = sym(d(3, 3), &[(&[1, 1, 2], (1, 2)), (&[2, 3, 3], (1, 2))]).to_dense();
        assert_eq!(f112.n_atoms(), 6);
        assert!(!is_monge(&f112));
        // Three atoms of weight 1/3 that are not a permutation in slot 2.
        let bad = DensePlan::from_one_based(
            d(3, 3),
            &[(vec![1, 1, 1], rat(1, 3)), (vec![2, 1, 2], rat(1, 3)), (vec![3, 3, 3], rat(1, 3))],
        )
        .unwrap();
        assert!(!is_monge(&bad));
    }

    #[test]
    fn is_monge_agrees_with_enumeration() {
        // Brute-force oracle: every tuple plan under every slot reordering is Monge.
        let dims = d(3, 3);
        let tuples = MongeTuple::all(dims, 1000).unwrap();
        assert_eq!(tuples.len(), 36);
        for t in &tuples {
            let p = t.plan();
            assert!(is_monge(&p));
            for order in (0..3).permutations(3) {
                let shuffled = DensePlan::new(
                    dims,
                    p.weights().iter().map(|(k, w)| (order.iter().map(|&s| k[s]).collect(), w.clone())),
                )
                .unwrap();
                assert!(is_monge(&shuffled));
            }
        }
    }

    #[test]
    fn names_of_table_states() {
        let dims = d(3, 3);
        let cases: Vec<(SymmetricPlan, &str)> = vec![
            (sym(dims, &[(&[1, 1, 2], (1, 2)), (&[2, 3, 3], (1, 2))]), "F112"),
            (sym(dims, &[(&[2, 3, 3], (1, 2)), (&[1, 1, 1], (1, 3)), (&[2, 2, 2], (1, 6))]), "K233,111"),
            (sym(dims, &[(&[1, 1, 1], (1, 3)), (&[2, 2, 2], (1, 3)), (&[3, 3, 3], (1, 3))]), "Id"),
            (sym(dims, &[(&[1, 2, 3], (1, 1))]), "C"),
            (sym(dims, &[(&[3, 3, 3], (1, 3)), (&[1, 1, 2], (1, 3)), (&[1, 2, 2], (1, 3))]), "T12"),
            (sym(dims, &[(&[1, 1, 2], (1, 3)), (&[1, 3, 3], (1, 3)), (&[2, 2, 3], (1, 3))]), "Id,C"),
            (sym(dims, &[(&[1, 1, 3], (1, 3)), (&[1, 2, 2], (1, 3)), (&[2, 3, 3], (1, 3))]), "Id,C′"),
            (sym(dims, &[(&[2, 3, 3], (1, 2)), (&[1, 2, 2], (1, 4)), (&[1, 1, 1], (1, 4))]), "K233,122"),
            (sym(dims, &[(&[1, 1, 2], (1, 2)), (&[2, 2, 3], (1, 4)), (&[3, 3, 3], (1, 4))]), "K112,223"),
        ];
        for (plan, name) in cases {
            assert_eq!(name_vertex(&plan), name);
        }
        let g = sym(d(3, 2), &[(&[1, 1, 1], (1, 2)), (&[2, 2, 2], (1, 2))]);
        assert_eq!(name_vertex(&g), "V111+222");
    }

    #[test]
    fn mixed_monge_state_is_named() {
        // S 1/3 (delta_121 + delta_213 + delta_332)
        let p = DensePlan::from_one_based(
            d(3, 3),
            &[(vec![1, 2, 1], rat(1, 3)), (vec![2, 1, 3], rat(1, 3)), (vec![3, 3, 2], rat(1, 3))],
        )
        .unwrap()
        .symmetrize();
        assert_eq!(name_vertex(&p), "T12,T23");
        assert!(is_symmetrized_monge(&p).unwrap());
    }

    #[test]
    fn budget_guard() {
        let err = MongeIndex::build_with_budget(d(4, 4), 100).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert_eq!(int(1), int(1));
    }
}
