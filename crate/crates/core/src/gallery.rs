//! Reproductions of the three-marginal examples on `N = l = 3`, including
//! seeded property suites over random metrics and potentials.

use std::sync::OnceLock;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::costs::{
    self, cost_polynomial, minimize_full_certified, minimize_over_catalog, CostFamily, CostSpec, CostValue,
    Potential, Quadratic, SweepReport,
};
use crate::error::{Error, Result};
use crate::exact::rational::{int, rat};
use crate::exact::{Rational, RationalMatrix};
use crate::monge;
use crate::plans::{Dims, StateSpace, SymmetricPlan};
use crate::polytope::{self, VertexCatalog};

/// Example ids understood by [`run_gallery_example`], in suite order.
pub const EXAMPLE_IDS: [&str; 7] = ["1.1", "4.1", "4.2", "4.3", "4.4", "4.5", "4.6"];

#[derive(Clone, Debug, PartialEq)]
pub struct GalleryReport {
    pub example_id: String,
    pub expected: Value,
    pub computed: Value,
    pub pass: bool,
}

impl GalleryReport {
    pub fn to_json(&self) -> Value {
        json!({
            "example_id": self.example_id,
            "expected": self.expected,
            "computed": self.computed,
            "pass": self.pass,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GalleryParams {
    /// Trials for the property suites (4.3, 4.4, 4.6).
    pub trials: usize,
    /// Seed for the property suites; each example has its own default.
    pub seed: Option<u64>,
}

impl Default for GalleryParams {
    fn default() -> Self {
        Self {
            trials: 1000,
            seed: None,
        }
    }
}

/// The 22-vertex catalog for `N = l = 3`, built once.
pub fn standard_catalog() -> &'static VertexCatalog {
    static CATALOG: OnceLock<VertexCatalog> = OnceLock::new();
    CATALOG.get_or_init(|| {
        polytope::enumerate_vertices(&polytope::build_constraints(Dims {
            n_marginals: 3,
            n_sites: 3,
        }))
        .expect("the 3x3 catalog is small")
    })
}

fn line3() -> StateSpace {
    StateSpace::equispaced_line(3, 3).expect("valid")
}

fn names_json(names: &[String]) -> Value {
    json!(names)
}

/// Spring-cost curves of the reduced-extreme vertices plus the sweep itself.
#[derive(Clone, Debug, PartialEq)]
pub struct FkCurves {
    /// `(vertex name, cost polynomial in a)`.
    pub curves: Vec<(String, Quadratic)>,
    pub sweep: SweepReport,
}

impl FkCurves {
    /// `(a, vertex, cost)` samples for plotting.
    pub fn samples(&self) -> Vec<(Rational, String, Rational)> {
        let mut out = Vec::new();
        for row in &self.sweep.rows {
            for (name, q) in &self.curves {
                out.push((row.a.clone(), name.clone(), q.eval(&row.a)));
            }
        }
        out
    }
}

/// The spring-cost sweep on `X = {1,2,3}` over an increasing grid of `a`.
pub fn fk_sweep(grid: &[Rational]) -> Result<FkCurves> {
    let space = line3();
    let cat = standard_catalog();
    let curves = cat
        .iter()
        .filter(|(_, _, f)| f.reduced_extreme)
        .map(|(n, p, _)| Ok((n.to_string(), cost_polynomial(p, &space, CostFamily::Spring)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FkCurves {
        curves,
        sweep: costs::fk_sweep(&space, cat, grid)?,
    })
}

pub fn run_gallery_example(id: &str, params: &GalleryParams) -> Result<GalleryReport> {
    match id {
        "1.1" => example_1_1(),
        "4.1" => example_4_1(),
        "4.2" => example_4_2(),
        "4.3" => property_attractive(params.trials, params.seed.unwrap_or(3)),
        "4.4" => property_repulsive(params.trials, params.seed.unwrap_or(42)),
        "4.5" => example_4_5(),
        "4.6" => property_repulsive_convex(params.trials, params.seed.unwrap_or(7)),
        other => Err(Error::invalid(format!(
            "unknown gallery example {other:?}; known: {}",
            EXAMPLE_IDS.join(", ")
        ))),
    }
}

pub fn run_suite(params: &GalleryParams) -> Result<Vec<GalleryReport>> {
    EXAMPLE_IDS.iter().map(|id| run_gallery_example(id, params)).collect()
}

fn example_1_1() -> Result<GalleryReport> {
    let cost = CostSpec::new(line3(), Potential::Spring { a: rat(3, 4) })?;
    let full = minimize_full_certified(&cost, polytope::DEFAULT_BUDGET)?;
    let cat = standard_catalog();
    let sym = minimize_over_catalog(&cost, cat)?;
    let f112 = cat.get("F112").expect("catalog has F112");
    let minimizer = full.minimizer.clone();
    let is_f112 = minimizer.as_ref() == Some(&f112.to_dense());
    let monge = minimizer.as_ref().is_some_and(monge::is_monge);
    let sym_monge = monge::is_symmetrized_monge(f112)?;
    let pass = full.unique
        && is_f112
        && full.value == CostValue::Exact(rat(11, 16))
        && sym.value == full.value
        && !monge
        && !sym_monge;
    Ok(GalleryReport {
        example_id: "1.1".into(),
        expected: json!({"minimizer": "F112", "unique": true, "value": "11/16", "monge": false, "symmetrized_monge": false}),
        computed: json!({
            "minimizer": if is_f112 { "F112" } else { "other" },
            "unique": full.unique,
            "value": full.value.to_string(),
            "catalog_value": sym.value.to_string(),
            "monge": monge,
            "symmetrized_monge": sym_monge,
        }),
        pass,
    })
}

fn example_4_1() -> Result<GalleryReport> {
    let mut computed = Vec::new();
    let mut pass = true;
    for p in [0.5, 1.0, 2.0, 3.0] {
        let res = minimize_over_catalog(&CostSpec::new(line3(), Potential::Power { p })?, standard_catalog())?;
        pass &= res.unique && res.argmin == ["Id"];
        computed.push(json!({"p": p, "argmin": names_json(&res.argmin), "value": res.value.to_string()}));
    }
    Ok(GalleryReport {
        example_id: "4.1".into(),
        expected: json!({"argmin": ["Id"], "unique": true}),
        computed: Value::Array(computed),
        pass,
    })
}

fn example_4_2() -> Result<GalleryReport> {
    let mut computed = Vec::new();
    let mut pass = true;
    for alpha in [0.5, 1.0, 2.0] {
        let res = minimize_over_catalog(
            &CostSpec::new(line3(), Potential::NegPower { alpha })?,
            standard_catalog(),
        )?;
        pass &= res.unique && res.argmin == ["C"];
        computed.push(json!({"alpha": alpha, "argmin": names_json(&res.argmin), "value": res.value.to_string()}));
    }
    Ok(GalleryReport {
        example_id: "4.2".into(),
        expected: json!({"argmin": ["C"], "unique": true}),
        computed: Value::Array(computed),
        pass,
    })
}

/// `v(d) = -d^p` on `{1,2,3}`: argmin at `p = 2` and `p = 3`, and the
/// transition exponent located by bisection on the computed argmin.
pub fn example_4_5() -> Result<GalleryReport> {
    let argmin_at = |p: f64| -> Result<Vec<String>> {
        let cost = CostSpec::new(line3(), Potential::RepulsivePower { p })?;
        Ok(minimize_over_catalog(&cost, standard_catalog())?.argmin)
    };
    let at2 = argmin_at(2.0)?;
    let at3 = argmin_at(3.0)?;
    let (mut lo, mut hi) = (2.0_f64, 3.0_f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if argmin_at(mid)? == ["C"] {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p_star = 0.5 * (lo + hi);
    let exact = 6f64.ln() / 2f64.ln();
    // Which cost difference vanishes at the transition.
    let cost = CostSpec::new(line3(), Potential::RepulsivePower { p: p_star })?;
    let value = |n: &str| -> Result<f64> {
        Ok(cost
            .evaluate_symmetric(standard_catalog().get(n).expect("named vertex"))?
            .to_f64())
    };
    let c_minus_t13 = value("C")? - value("T13")?;
    let c_minus_t12 = value("C")? - value("T12")?;
    let pass = at2 == ["C"]
        && at3 == ["T13"]
        && (p_star - exact).abs() < 1e-10
        && (p_star - 2.58496).abs() < 1e-5
        && c_minus_t13.abs() < 1e-9;
    Ok(GalleryReport {
        example_id: "4.5".into(),
        expected: json!({"argmin_p2": ["C"], "argmin_p3": ["T13"], "p_star": exact}),
        computed: json!({
            "argmin_p2": at2,
            "argmin_p3": at3,
            "p_star": p_star,
            "c_minus_t13_at_p_star": c_minus_t13,
            "c_minus_t12_at_p_star": c_minus_t12,
        }),
        pass,
    })
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn random_rational<R: Rng>(rng: &mut R, max_num: i64, max_den: i64) -> Rational {
    rat(rng.gen_range(1..=max_num), rng.gen_range(1..=max_den))
}

/// Three positive rational distances `(d12, d13, d23)` that form a metric.
pub fn random_metric<R: Rng>(rng: &mut R) -> (StateSpace, [Rational; 3]) {
    loop {
        let d = [
            random_rational(rng, 40, 8),
            random_rational(rng, 40, 8),
            random_rational(rng, 40, 8),
        ];
        let m = metric_matrix(&d);
        if let Ok(space) = StateSpace::with_metric(3, m) {
            return (space, d);
        }
    }
}

fn metric_matrix(d: &[Rational; 3]) -> RationalMatrix {
    let z = Rational::zero();
    RationalMatrix::from_rows(vec![
        vec![z.clone(), d[0].clone(), d[1].clone()],
        vec![d[0].clone(), z.clone(), d[2].clone()],
        vec![d[1].clone(), d[2].clone(), z],
    ])
    .expect("square")
}

/// Distinct distances `{0, d12, d13, d23}` in increasing order.
fn distance_set(d: &[Rational; 3]) -> Vec<Rational> {
    let mut v = vec![Rational::zero(), d[0].clone(), d[1].clone(), d[2].clone()];
    v.sort();
    v.dedup();
    v
}

/// Random strictly monotone values on the given increasing distances.
fn random_monotone_table<R: Rng>(rng: &mut R, distances: &[Rational], increasing: bool) -> Potential {
    let mut vals: Vec<Rational> = Vec::new();
    while vals.len() < distances.len() {
        let v = rat(rng.gen_range(-500..=500), rng.gen_range(1..=7));
        if !vals.contains(&v) {
            vals.push(v);
        }
    }
    vals.sort();
    if !increasing {
        vals.reverse();
    }
    Potential::Table {
        values: distances
            .iter()
            .cloned()
            .zip(vals.into_iter().map(CostValue::Exact))
            .collect(),
    }
}

struct TrialOutcome {
    ok: bool,
    argmin: Vec<String>,
}

fn run_trials(trials: usize, seed: u64, trial: impl Fn(&mut ChaCha8Rng) -> Result<TrialOutcome> + Sync) -> Result<Vec<TrialOutcome>> {
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    (0..trials)
        .into_par_iter()
        .map(|t| trial(&mut trial_rng(seed, t)))
        .collect()
}

fn summarize(id: &str, expected: Value, seed: u64, outcomes: &[TrialOutcome]) -> GalleryReport {
    let failures: Vec<usize> = (0..outcomes.len()).filter(|&i| !outcomes[i].ok).collect();
    let mut seen: Vec<&Vec<String>> = Vec::new();
    for o in outcomes {
        if !seen.contains(&&o.argmin) {
            seen.push(&o.argmin);
        }
    }
    seen.sort();
    GalleryReport {
        example_id: id.into(),
        expected,
        computed: json!({
            "trials": outcomes.len(),
            "seed": seed,
            "failures": failures.len(),
            "first_failure": failures.first(),
            "argmin_sets_seen": seen,
        }),
        pass: failures.is_empty(),
    }
}

/// Strictly increasing potentials on random metrics: unique argmin Id.
pub fn property_attractive(trials: usize, seed: u64) -> Result<GalleryReport> {
    let outcomes = run_trials(trials, seed, |rng| {
        let (space, d) = random_metric(rng);
        let pot = random_monotone_table(rng, &distance_set(&d), true);
        let res = minimize_over_catalog(&CostSpec::new(space, pot)?, standard_catalog())?;
        Ok(TrialOutcome {
            ok: res.unique && res.argmin == ["Id"],
            argmin: res.argmin,
        })
    })?;
    Ok(summarize("4.3", json!({"argmin": ["Id"], "unique": true}), seed, &outcomes))
}

const MONGE_REPULSIVE: [&str; 4] = ["T12", "T13", "T23", "C"];

/// Strictly decreasing potentials on random metrics: every optimal vertex is
/// one of T12, T13, T23, C, and the sign condition holds.
pub fn property_repulsive(trials: usize, seed: u64) -> Result<GalleryReport> {
    let outcomes = run_trials(trials, seed, |rng| {
        let (space, d) = random_metric(rng);
        let pot = random_monotone_table(rng, &distance_set(&d), false);
        let cost = CostSpec::new(space, pot)?;
        let signs_ok = cost.sign_coefficients()?.iter().all(Signed::is_negative);
        let res = minimize_over_catalog(&cost, standard_catalog())?;
        Ok(TrialOutcome {
            ok: signs_ok && res.argmin.iter().all(|n| MONGE_REPULSIVE.contains(&n.as_str())),
            argmin: res.argmin,
        })
    })?;
    Ok(summarize(
        "4.4",
        json!({"argmin_subset_of": MONGE_REPULSIVE, "sign_condition": "2c_ij - c_ii - c_jj < 0"}),
        seed,
        &outcomes,
    ))
}

/// `v(x) = a/(x+s) + b/(x+s)^2 - c x` with random positive `a, b, s` and `c >= 0`:
/// strictly decreasing and convex on `[0, inf)`.
fn random_convex_decreasing<R: Rng>(rng: &mut R) -> impl Fn(&Rational) -> Rational {
    let a = random_rational(rng, 20, 5);
    let b = random_rational(rng, 20, 5);
    let s = random_rational(rng, 10, 5);
    let c = rat(rng.gen_range(0..=10), rng.gen_range(1..=5));
    move |x: &Rational| {
        let t = x + &s;
        &a / &t + &b / (&t * &t) - &c * x
    }
}

/// Discrete convexity and strict decrease on an increasing point set.
fn convex_decreasing_on(points: &[Rational], v: &dyn Fn(&Rational) -> Rational) -> bool {
    let vals: Vec<Rational> = points.iter().map(v).collect();
    let decreasing = vals.windows(2).all(|w| w[1] < w[0]);
    let convex = (0..points.len().saturating_sub(2)).all(|i| {
        let s1 = (&vals[i + 1] - &vals[i]) / (&points[i + 1] - &points[i]);
        let s2 = (&vals[i + 2] - &vals[i + 1]) / (&points[i + 2] - &points[i + 1]);
        s1 <= s2
    });
    decreasing && convex
}

/// The inequality `c_ij + c_jk <= v(0) + v(d_ij + d_jk)` for each choice of middle site.
fn chord_inequalities(d: &[Rational; 3], v: &dyn Fn(&Rational) -> Rational) -> bool {
    // (d_ij, d_jk) pairs with j the middle site: (12,23), (12,13), (13,23)
    let pairs = [(&d[0], &d[2]), (&d[0], &d[1]), (&d[1], &d[2])];
    let v0 = v(&Rational::zero());
    pairs
        .iter()
        .all(|(x, y)| v(x) + v(y) <= &v0 + v(&(*x + *y)))
}

/// Strictly decreasing convex potentials on random metrics: unique argmin C.
pub fn property_repulsive_convex(trials: usize, seed: u64) -> Result<GalleryReport> {
    let outcomes = run_trials(trials, seed, |rng| {
        let (space, d) = random_metric(rng);
        let v = random_convex_decreasing(rng);
        let mut points = distance_set(&d);
        points.extend([&d[0] + &d[2], &d[0] + &d[1], &d[1] + &d[2]]);
        points.sort();
        points.dedup();
        let shape_ok = convex_decreasing_on(&points, &v) && chord_inequalities(&d, &v);
        let pot = Potential::Table {
            values: distance_set(&d).iter().map(|x| (x.clone(), CostValue::Exact(v(x)))).collect(),
        };
        let res = minimize_over_catalog(&CostSpec::new(space, pot)?, standard_catalog())?;
        Ok(TrialOutcome {
            ok: shape_ok && res.unique && res.argmin == ["C"],
            argmin: res.argmin,
        })
    })?;
    Ok(summarize("4.6", json!({"argmin": ["C"], "unique": true}), seed, &outcomes))
}

/// Cost of each named vertex under `cost`, for reports.
pub fn vertex_costs(cost: &CostSpec, names: &[&str]) -> Result<Vec<(String, CostValue)>> {
    let cat = standard_catalog();
    names
        .iter()
        .map(|n| {
            let plan: &SymmetricPlan = cat
                .get(n)
                .ok_or_else(|| Error::invalid(format!("no vertex named {n}")))?;
            Ok((n.to_string(), cost.evaluate_symmetric(plan)?))
        })
        .collect()
}

/// `v(0) = 0`, `v(d) = -1` for `d > 0`: weakly decreasing step potential.
pub fn step_potential_fixture() -> Result<costs::MinimizationResult> {
    let pot = Potential::Table {
        values: vec![
            (int(0), CostValue::Exact(int(0))),
            (int(1), CostValue::Exact(int(-1))),
            (int(2), CostValue::Exact(int(-1))),
        ],
    };
    minimize_over_catalog(&CostSpec::new(line3(), pot)?, standard_catalog())
}

/// `v(r) = 1/(r+1)` on `{1,2,3}`, exact.
pub fn inverse_shift_fixture() -> Result<costs::MinimizationResult> {
    let pot = Potential::Table {
        values: (0..3).map(|r| (int(r), CostValue::Exact(rat(1, r + 1)))).collect(),
    };
    minimize_over_catalog(&CostSpec::new(line3(), pot)?, standard_catalog())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_examples_pass() {
        for id in ["1.1", "4.1", "4.2", "4.5"] {
            let r = run_gallery_example(id, &GalleryParams::default()).unwrap();
            assert!(r.pass, "{id}: {}", r.computed);
        }
        assert!(run_gallery_example("9.9", &GalleryParams::default()).is_err());
    }

    #[test]
    fn small_property_runs_are_reproducible() {
        let a = property_repulsive(50, 1).unwrap();
        let b = property_repulsive(50, 1).unwrap();
        assert_eq!(a, b);
        assert!(a.pass);
        assert!(property_repulsive_convex(50, 2).unwrap().pass);
        assert!(property_attractive(50, 3).unwrap().pass);
    }

    #[test]
    fn fixtures() {
        let step = step_potential_fixture().unwrap();
        assert_eq!(step.argmin, ["C"]);
        assert_eq!(step.value, CostValue::Exact(int(-3)));
        assert_eq!(inverse_shift_fixture().unwrap().argmin, ["C"]);
    }

    #[test]
    fn sweep_curves() {
        let grid: Vec<Rational> = (1..8).map(|k| rat(k, 8)).collect();
        let c = fk_sweep(&grid).unwrap();
        assert_eq!(c.curves.len(), 8);
        assert_eq!(c.samples().len(), 7 * 8);
        let at = |n: &str| c.curves.iter().find(|x| x.0 == n).unwrap().1.eval(&rat(3, 4));
        assert!(at("F112") < at("T12") && at("T12") < at("Id"));
    }
}
