//! Pairwise symmetric costs `c(x_1..x_N) = sum_{i<j} v(d(x_i, x_j))`.
//!
//! Costs are evaluated exactly when the potential gives rational values at every
//! occurring distance, and in `f64` otherwise. The two modes never mix.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exact::rational::{self, int, integral_f64, parse_rational, rational_from_json, to_f64};
use crate::exact::{lp_solve, Rational, RationalMatrix};
use crate::plans::{DensePlan, Dims, PairMarginal, StateSpace, SymmetricPlan};
use crate::polytope::{self, VertexCatalog};

/// Absolute tolerance for float-mode comparisons.
pub const FLOAT_TOL: f64 = 1e-12;

/// Extended cost value. `Infinite` is `+infinity`.
#[derive(Clone, Debug, PartialEq)]
pub enum CostValue {
    Exact(Rational),
    Float(f64),
    Infinite,
}

impl CostValue {
    pub fn is_infinite(&self) -> bool {
        matches!(self, CostValue::Infinite)
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            CostValue::Exact(r) => Some(r),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            CostValue::Exact(r) => to_f64(r),
            CostValue::Float(x) => *x,
            CostValue::Infinite => f64::INFINITY,
        }
    }

    fn zero_like(mode: Mode) -> Self {
        match mode {
            Mode::Exact => CostValue::Exact(Rational::zero()),
            Mode::Float => CostValue::Float(0.0),
        }
    }

    /// `self + w * other`.
    fn add_scaled(self, w: &Rational, other: &CostValue) -> Result<Self> {
        Ok(match (self, other) {
            (CostValue::Infinite, _) | (_, CostValue::Infinite) => CostValue::Infinite,
            (CostValue::Exact(a), CostValue::Exact(b)) => CostValue::Exact(a + w * b),
            (CostValue::Float(a), CostValue::Float(b)) => CostValue::Float(a + to_f64(w) * b),
            _ => return Err(Error::Mode("exact and float cost values mixed".into())),
        })
    }

    /// Total order with `Infinite` on top; floats within [`FLOAT_TOL`] compare equal.
    pub fn compare(&self, other: &CostValue) -> Ordering {
        match (self, other) {
            (CostValue::Infinite, CostValue::Infinite) => Ordering::Equal,
            (CostValue::Infinite, _) => Ordering::Greater,
            (_, CostValue::Infinite) => Ordering::Less,
            (CostValue::Exact(a), CostValue::Exact(b)) => a.cmp(b),
            (a, b) => {
                let (x, y) = (a.to_f64(), b.to_f64());
                if (x - y).abs() <= FLOAT_TOL {
                    Ordering::Equal
                } else {
                    x.total_cmp(&y)
                }
            }
        }
    }
}

impl fmt::Display for CostValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostValue::Exact(r) => write!(f, "{r}"),
            CostValue::Float(x) => write!(f, "{x:.15e}"),
            CostValue::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

/// Pair potential `v : [0, inf) -> R ∪ {+inf}`.
#[derive(Clone, Debug, PartialEq)]
pub enum Potential {
    /// `(d - a)^2`.
    Spring { a: Rational },
    /// `d^p`.
    Power { p: f64 },
    /// `-d^p`.
    RepulsivePower { p: f64 },
    /// `d^-alpha`, infinite at 0.
    NegPower { alpha: f64 },
    /// `d^4/4 - d^3/3`.
    QuarticFk,
    /// `sum_k c_k d^k`.
    Polynomial { coefficients: Vec<Rational> },
    /// Explicit values at the distances that occur.
    Table { values: Vec<(Rational, CostValue)> },
}

fn exact_power(d: &Rational, p: f64) -> Option<Rational> {
    let k = integral_f64(p)?;
    let k = u32::try_from(k).ok()?;
    Some(rational::pow(d, k))
}

impl Potential {
    pub fn evaluate(&self, d: &Rational) -> Result<CostValue> {
        if d.is_negative() {
            return Err(Error::invalid(format!("negative distance {d}")));
        }
        Ok(match self {
            Potential::Spring { a } => {
                let x = d - a;
                CostValue::Exact(&x * &x)
            }
            Potential::Power { p } => match exact_power(d, *p) {
                Some(v) => CostValue::Exact(v),
                None => CostValue::Float(to_f64(d).powf(*p)),
            },
            Potential::RepulsivePower { p } => match exact_power(d, *p) {
                Some(v) => CostValue::Exact(-v),
                None => CostValue::Float(-to_f64(d).powf(*p)),
            },
            Potential::NegPower { alpha } => {
                if d.is_zero() {
                    CostValue::Infinite
                } else {
                    match exact_power(d, *alpha) {
                        Some(v) => CostValue::Exact(v.recip()),
                        None => CostValue::Float(to_f64(d).powf(-alpha)),
                    }
                }
            }
            Potential::QuarticFk => {
                let d3 = rational::pow(d, 3);
                CostValue::Exact(&d3 * d / int(4) - d3 / int(3))
            }
            Potential::Polynomial { coefficients } => {
                let mut acc = Rational::zero();
                for c in coefficients.iter().rev() {
                    acc = acc * d + c;
                }
                CostValue::Exact(acc)
            }
            Potential::Table { values } => values
                .iter()
                .find(|(x, _)| x == d)
                .map(|(_, v)| v.clone())
                .ok_or_else(|| Error::invalid(format!("potential table has no value at distance {d}")))?,
        })
    }

    /// Floating-point evaluation on the real line, used by continuous scans.
    /// Tables have no values between their points and are refused.
    pub fn evaluate_f64(&self, r: f64) -> Result<f64> {
        Ok(match self {
            Potential::Spring { a } => (r - to_f64(a)).powi(2),
            Potential::Power { p } => r.powf(*p),
            Potential::RepulsivePower { p } => -r.powf(*p),
            Potential::NegPower { alpha } => {
                if r == 0.0 {
                    f64::INFINITY
                } else {
                    r.powf(-alpha)
                }
            }
            Potential::QuarticFk => r.powi(4) / 4.0 - r.powi(3) / 3.0,
            Potential::Polynomial { coefficients } => coefficients
                .iter()
                .rev()
                .fold(0.0, |acc, c| acc * r + to_f64(c)),
            Potential::Table { .. } => {
                return Err(Error::Unsupported("tabulated potentials have no continuous extension".into()))
            }
        })
    }

    /// Parse `{"kind": ..., params}`. Rational parameters are `"p/q"` strings or
    /// integers; real exponents may be JSON numbers.
    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::invalid("potential must be a JSON object"))?;
        let kind = obj
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::invalid("potential needs a string \"kind\""))?;
        let field = |name: &str| {
            obj.get(name)
                .ok_or_else(|| Error::invalid(format!("potential {kind:?} needs {name:?}")))
        };
        let real = |name: &str| -> Result<f64> {
            let v = field(name)?;
            let x = match v {
                Value::Number(n) => n.as_f64().unwrap_or(f64::NAN),
                _ => to_f64(&rational_from_json(v)?),
            };
            if x.is_finite() && x > 0.0 {
                Ok(x)
            } else {
                Err(Error::invalid(format!("{name} must be a positive number, got {v}")))
            }
        };
        Ok(match kind {
            "spring" => Potential::Spring {
                a: rational_from_json(field("a")?)?,
            },
            "power" => Potential::Power { p: real("p")? },
            "repulsive_power" => Potential::RepulsivePower { p: real("p")? },
            "neg_power" => Potential::NegPower { alpha: real("alpha")? },
            "quartic_fk" => Potential::QuarticFk,
            "polynomial" => Potential::Polynomial {
                coefficients: field("coefficients")?
                    .as_array()
                    .ok_or_else(|| Error::invalid("coefficients must be an array"))?
                    .iter()
                    .map(rational_from_json)
                    .collect::<Result<_>>()?,
            },
            "table" => {
                let map = field("values")?
                    .as_object()
                    .ok_or_else(|| Error::invalid("table values must map distances to values"))?;
                let mut values = Vec::new();
                for (k, v) in map {
                    let value = match v {
                        Value::String(s) if s == "inf" => CostValue::Infinite,
                        Value::String(s) => CostValue::Exact(parse_rational(s)?),
                        Value::Number(n) => match n.as_i64() {
                            Some(i) => CostValue::Exact(int(i)),
                            None => CostValue::Float(n.as_f64().unwrap_or(f64::NAN)),
                        },
                        other => return Err(Error::invalid(format!("bad table value {other}"))),
                    };
                    values.push((parse_rational(k)?, value));
                }
                Potential::Table { values }
            }
            other => return Err(Error::invalid(format!("unknown potential kind {other:?}"))),
        })
    }
}

/// A pairwise symmetric cost on a state space, with the pair table `c_ij = v(d_ij)`.
#[derive(Clone, Debug)]
pub struct CostSpec {
    space: StateSpace,
    potential: Option<Potential>,
    pair: Vec<Vec<CostValue>>,
    mode: Mode,
}

impl CostSpec {
    pub fn new(space: StateSpace, potential: Potential) -> Result<Self> {
        let d = space
            .distance_matrix()
            .ok_or_else(|| Error::invalid("state space has no metric"))?;
        let l = space.n_sites();
        let mut pair = vec![Vec::with_capacity(l); l];
        for (i, row) in pair.iter_mut().enumerate() {
            for j in 0..l {
                row.push(potential.evaluate(&d[(i, j)])?);
            }
        }
        let mut spec = Self::from_pair_table(space, pair)?;
        spec.potential = Some(potential);
        Ok(spec)
    }

    /// A cost given directly by a symmetric table `c_ij`.
    pub fn from_pair_table(space: StateSpace, pair: Vec<Vec<CostValue>>) -> Result<Self> {
        let l = space.n_sites();
        if pair.len() != l || pair.iter().any(|r| r.len() != l) {
            return Err(Error::invalid("pair table must be l x l"));
        }
        for i in 0..l {
            for j in 0..i {
                if pair[i][j].compare(&pair[j][i]) != Ordering::Equal {
                    return Err(Error::invalid("pair table must be symmetric"));
                }
            }
        }
        let has_exact = pair.iter().flatten().any(|v| matches!(v, CostValue::Exact(_)));
        let has_float = pair.iter().flatten().any(|v| matches!(v, CostValue::Float(_)));
        let mode = match (has_exact, has_float) {
            (true, true) => {
                return Err(Error::Mode(
                    "potential mixes exact and floating-point values".into(),
                ))
            }
            (false, true) => Mode::Float,
            _ => Mode::Exact,
        };
        Ok(Self {
            space,
            potential: None,
            pair,
            mode,
        })
    }

    /// Parse `{"metric": {"coords1d": [..]} | {"matrix": [[..]]}, "potential": {..}, "n_marginals": N}`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| {
            Error::invalid(format!(
                "cost JSON parse error at line {} column {}: {e}",
                e.line(),
                e.column()
            ))
        })?;
        let obj = v
            .as_object()
            .ok_or_else(|| Error::invalid("cost must be a JSON object"))?;
        for key in obj.keys() {
            if !["metric", "potential", "n_marginals"].contains(&key.as_str()) {
                return Err(Error::invalid(format!("unknown cost field {key:?}")));
            }
        }
        let n = match obj.get("n_marginals") {
            None => 3,
            Some(x) => x
                .as_u64()
                .ok_or_else(|| Error::invalid("n_marginals must be a positive integer"))?
                as usize,
        };
        let metric = obj
            .get("metric")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::invalid("cost needs a \"metric\" object"))?;
        let space = if let Some(c) = metric.get("coords1d") {
            let coords = c
                .as_array()
                .ok_or_else(|| Error::invalid("coords1d must be an array"))?
                .iter()
                .map(rational_from_json)
                .collect::<Result<Vec<_>>>()?;
            StateSpace::on_line(n, coords)?
        } else if let Some(m) = metric.get("matrix") {
            let rows = m
                .as_array()
                .ok_or_else(|| Error::invalid("matrix must be an array of rows"))?
                .iter()
                .map(|r| {
                    r.as_array()
                        .ok_or_else(|| Error::invalid("matrix rows must be arrays"))?
                        .iter()
                        .map(rational_from_json)
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            StateSpace::with_metric(n, RationalMatrix::from_rows(rows)?)?
        } else {
            return Err(Error::invalid("metric needs \"coords1d\" or \"matrix\""));
        };
        let potential = Potential::from_json(
            obj.get("potential")
                .ok_or_else(|| Error::invalid("cost needs a \"potential\""))?,
        )?;
        Self::new(space, potential)
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn dims(&self) -> Dims {
        self.space.dims()
    }

    pub fn potential(&self) -> Option<&Potential> {
        self.potential.as_ref()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn pair(&self, i: usize, j: usize) -> &CostValue {
        &self.pair[i][j]
    }

    /// `c(x_1..x_N)` for one configuration of site indices.
    pub fn tuple_cost(&self, t: &[usize]) -> CostValue {
        let mut acc = CostValue::zero_like(self.mode);
        let one = Rational::one();
        for a in 0..t.len() {
            for b in a + 1..t.len() {
                acc = acc
                    .add_scaled(&one, &self.pair[t[a]][t[b]])
                    .expect("pair table has a single mode");
            }
        }
        acc
    }

    fn check_dims(&self, dims: Dims) -> Result<()> {
        if dims != self.dims() {
            return Err(Error::invalid(format!(
                "plan dimensions {dims:?} do not match the cost's {:?}",
                self.dims()
            )));
        }
        Ok(())
    }

    /// `C[gamma] = sum_t gamma(t) c(t)`.
    pub fn evaluate_dense(&self, plan: &DensePlan) -> Result<CostValue> {
        self.check_dims(plan.dims())?;
        plan.weights()
            .iter()
            .try_fold(CostValue::zero_like(self.mode), |acc, (t, w)| {
                acc.add_scaled(w, &self.tuple_cost(t))
            })
    }

    /// Same value as the dense form: the cost is symmetric, so each multi-index
    /// contributes `alpha_m c(m)`.
    pub fn evaluate_symmetric(&self, plan: &SymmetricPlan) -> Result<CostValue> {
        self.check_dims(plan.dims())?;
        plan.alpha()
            .iter()
            .try_fold(CostValue::zero_like(self.mode), |acc, (m, w)| {
                acc.add_scaled(w, &self.tuple_cost(m.indices()))
            })
    }

    /// `C'[p] = C(N,2) sum_ij c_ij mu_ij / l`.
    pub fn evaluate_reduced(&self, p: &PairMarginal) -> Result<CostValue> {
        let l = self.space.n_sites();
        if p.n_sites() != l {
            return Err(Error::invalid("marginal size does not match the cost"));
        }
        let n = self.space.n_marginals() as i64;
        let scale = rational::rat(n * (n - 1) / 2, l as i64);
        let mut acc = CostValue::zero_like(self.mode);
        for i in 0..l {
            for j in 0..l {
                let mu = &p.mu()[(i, j)];
                if !mu.is_zero() {
                    acc = acc.add_scaled(&(mu * &scale), &self.pair[i][j])?;
                }
            }
        }
        Ok(acc)
    }

    /// Coefficients `2 c_ij - c_ii - c_jj` for `i < j`, in row-major order.
    /// Requires an exact cost with finite diagonal.
    pub fn sign_coefficients(&self) -> Result<Vec<Rational>> {
        let l = self.space.n_sites();
        let c = |i: usize, j: usize| -> Result<Rational> {
            self.pair[i][j]
                .as_exact()
                .cloned()
                .ok_or_else(|| Error::Mode("affine form needs finite exact pair costs".into()))
        };
        let mut out = Vec::new();
        for i in 0..l {
            for j in i + 1..l {
                out.push(int(2) * c(i, j)? - c(i, i)? - c(j, j)?);
            }
        }
        Ok(out)
    }

    /// The reduced cost as an affine function of the off-diagonal chart:
    /// `C'[mu] = k (sum_i c_ii + sum_{i<j} (2c_ij - c_ii - c_jj) mu_ij)`, `k = C(N,2)/l`.
    /// Valid on symmetric bistochastic `mu`.
    pub fn evaluate_affine(&self, p: &PairMarginal) -> Result<Rational> {
        let l = self.space.n_sites();
        if p.n_sites() != l {
            return Err(Error::invalid("marginal size does not match the cost"));
        }
        let n = self.space.n_marginals() as i64;
        let k = rational::rat(n * (n - 1) / 2, l as i64);
        let mut acc: Rational = Rational::zero();
        for i in 0..l {
            acc += self.pair[i][i]
                .as_exact()
                .ok_or_else(|| Error::Mode("affine form needs finite exact pair costs".into()))?;
        }
        for (s, mu) in self.sign_coefficients()?.iter().zip(p.upper_chart()) {
            acc += s * mu;
        }
        Ok(acc * k)
    }
}

/// Argmin over a finite vertex list.
#[derive(Clone, Debug, PartialEq)]
pub struct MinimizationResult {
    pub value: CostValue,
    pub argmin: Vec<String>,
    pub plans: Vec<SymmetricPlan>,
    /// Exactly one optimal vertex.
    pub unique: bool,
    /// Float mode only: several vertices agree within [`FLOAT_TOL`] but not exactly.
    pub near_tie: bool,
}

/// Exact (or toleranced) minimum of a linear cost over the catalog vertices,
/// with the full argmin set.
pub fn minimize_over_catalog(cost: &CostSpec, catalog: &VertexCatalog) -> Result<MinimizationResult> {
    if catalog.dims() != cost.dims() {
        return Err(Error::invalid("catalog and cost have different dimensions"));
    }
    let values: Vec<CostValue> = catalog
        .vertices()
        .par_iter()
        .map(|v| cost.evaluate_symmetric(v))
        .collect::<Result<_>>()?;
    let best = values
        .iter()
        .min_by(|a, b| a.compare(b))
        .cloned()
        .ok_or_else(|| Error::invalid("empty catalog"))?;
    let hits: Vec<usize> = (0..values.len())
        .filter(|&i| values[i].compare(&best) == Ordering::Equal)
        .collect();
    let near_tie = cost.mode == Mode::Float && hits.iter().any(|&i| values[i] != best);
    Ok(MinimizationResult {
        value: best,
        argmin: hits.iter().map(|&i| catalog.names()[i].clone()).collect(),
        plans: hits.iter().map(|&i| catalog.vertices()[i].clone()).collect(),
        unique: hits.len() == 1,
        near_tie,
    })
}

/// Minimum over the full (non-symmetric) polytope by exact LP.
#[derive(Clone, Debug, PartialEq)]
pub struct FullMinimization {
    pub value: CostValue,
    /// An optimal plan; the unique one when `unique` is set.
    pub minimizer: Option<DensePlan>,
    /// The optimal face is a single point.
    pub unique: bool,
}

/// Solve the Kantorovich LP over all `l^N` tuples exactly and certify
/// uniqueness by collapsing every coordinate range on the optimal face.
pub fn minimize_full_certified(cost: &CostSpec, budget: u128) -> Result<FullMinimization> {
    if cost.mode == Mode::Float {
        return Err(Error::Mode("the exact LP needs an exact cost".into()));
    }
    let full = polytope::build_full_constraints(cost.dims(), budget)?;
    // Infinite-cost tuples carry no mass in any finite-cost plan.
    let keep: Vec<usize> = (0..full.columns().len())
        .filter(|&j| !cost.tuple_cost(&full.columns()[j]).is_infinite())
        .collect();
    let a = full.a().select_columns(&keep);
    let c: Vec<Rational> = keep
        .iter()
        .map(|&j| {
            cost.tuple_cost(&full.columns()[j])
                .as_exact()
                .cloned()
                .expect("exact mode")
        })
        .collect();
    let res = lp_solve(&c, &a, full.b(), true)?;
    let (Some(value), Some(point)) = (res.value, res.point) else {
        return Ok(FullMinimization {
            value: CostValue::Infinite,
            minimizer: None,
            unique: false,
        });
    };
    let mut rows: Vec<Vec<Rational>> = (0..a.rows()).map(|i| a.row(i).to_vec()).collect();
    rows.push(c.clone());
    let mut b = full.b().to_vec();
    b.push(value.clone());
    let unique = polytope::face_is_singleton(&RationalMatrix::from_rows(rows)?, &b)? == Some(true);
    let minimizer = DensePlan::new(
        cost.dims(),
        keep.iter().zip(point).map(|(&j, w)| (full.columns()[j].clone(), w)),
    )?;
    Ok(FullMinimization {
        value: CostValue::Exact(value),
        minimizer: Some(minimizer),
        unique,
    })
}

/// A root of a cost difference.
#[derive(Clone, Debug, PartialEq)]
pub enum Root {
    Exact(Rational),
    Approx(f64),
}

impl Root {
    pub fn to_f64(&self) -> f64 {
        match self {
            Root::Exact(r) => to_f64(r),
            Root::Approx(x) => *x,
        }
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Root::Exact(r) => write!(f, "{r}"),
            Root::Approx(x) => write!(f, "{x}"),
        }
    }
}

/// `c0 + c1 a + c2 a^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quadratic {
    pub c0: Rational,
    pub c1: Rational,
    pub c2: Rational,
}

impl Quadratic {
    pub fn eval(&self, a: &Rational) -> Rational {
        &self.c0 + &self.c1 * a + &self.c2 * a * a
    }

    pub fn sub(&self, other: &Quadratic) -> Quadratic {
        Quadratic {
            c0: &self.c0 - &other.c0,
            c1: &self.c1 - &other.c1,
            c2: &self.c2 - &other.c2,
        }
    }

    /// Real roots in increasing order; exact when the polynomial is linear.
    pub fn roots(&self) -> Vec<Root> {
        if self.c2.is_zero() {
            if self.c1.is_zero() {
                return Vec::new();
            }
            return vec![Root::Exact(-&self.c0 / &self.c1)];
        }
        let disc = &self.c1 * &self.c1 - int(4) * &self.c2 * &self.c0;
        if disc.is_negative() {
            return Vec::new();
        }
        let two_a = int(2) * &self.c2;
        if disc.is_zero() {
            return vec![Root::Exact(-&self.c1 / two_a)];
        }
        let s = to_f64(&disc).sqrt();
        let (b, d) = (to_f64(&self.c1), to_f64(&two_a));
        let mut r = vec![(-b - s) / d, (-b + s) / d];
        r.sort_by(f64::total_cmp);
        r.into_iter().map(Root::Approx).collect()
    }
}

impl fmt::Display for Quadratic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + ({})a + ({})a^2", self.c0, self.c1, self.c2)
    }
}

/// Potential families that admit a closed-form cost polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CostFamily {
    Spring,
    Power,
    NegPower,
    QuarticFk,
}

/// Cost of `plan` as a polynomial in the family parameter. Only the spring
/// family `(d - a)^2` is polynomial in its parameter.
pub fn cost_polynomial(plan: &SymmetricPlan, space: &StateSpace, family: CostFamily) -> Result<Quadratic> {
    if family != CostFamily::Spring {
        return Err(Error::Unsupported(format!(
            "{family:?} costs are not polynomial in their parameter"
        )));
    }
    if plan.dims() != space.dims() {
        return Err(Error::invalid("plan and state space have different dimensions"));
    }
    let mut q = Quadratic {
        c0: Rational::zero(),
        c1: Rational::zero(),
        c2: Rational::zero(),
    };
    for (m, w) in plan.alpha() {
        let t = m.indices();
        for a in 0..t.len() {
            for b in a + 1..t.len() {
                let d = space
                    .distance(t[a], t[b])
                    .ok_or_else(|| Error::invalid("state space has no metric"))?;
                q.c0 += w * &d * &d;
                q.c1 -= w * int(2) * &d;
                q.c2 += w;
            }
        }
    }
    Ok(q)
}

/// One sampled parameter of an FK sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub a: Rational,
    pub argmin: Vec<String>,
    pub value: Rational,
}

/// A transition between consecutive sampled argmins, located exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct Crossing {
    pub from: String,
    pub to: String,
    pub at: Root,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub crossings: Vec<Crossing>,
}

/// Equally spaced grid `from + k (to - from) / steps`, `k = 0..=steps`.
pub fn uniform_grid(from: &Rational, to: &Rational, steps: usize) -> Result<Vec<Rational>> {
    if steps == 0 {
        return Err(Error::invalid("sweep needs at least one step"));
    }
    if from > to {
        return Err(Error::invalid("sweep range is empty"));
    }
    Ok((0..=steps)
        .map(|k| from + (to - from) * rational::rat(k as i64, steps as i64))
        .collect())
}

/// Minimize the spring cost at every grid point and locate each change of
/// minimizer by the exact crossing of the two winners' cost polynomials.
pub fn fk_sweep(space: &StateSpace, catalog: &VertexCatalog, grid: &[Rational]) -> Result<SweepReport> {
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("sweep grid must be strictly increasing"));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for a in grid {
        let cost = CostSpec::new(space.clone(), Potential::Spring { a: a.clone() })?;
        let res = minimize_over_catalog(&cost, catalog)?;
        let value = res.value.as_exact().cloned().expect("spring costs are exact");
        rows.push(SweepRow {
            a: a.clone(),
            argmin: res.argmin,
            value,
        });
    }
    let mut crossings = Vec::new();
    // Compare consecutive unique winners, skipping tied samples in between.
    let mut last: Option<&SweepRow> = None;
    for row in rows.iter().filter(|r| r.argmin.len() == 1) {
        if let Some(prev) = last.filter(|p| p.argmin != row.argmin) {
            let poly = |name: &str| {
                let plan = catalog.get(name).expect("argmin names come from the catalog");
                cost_polynomial(plan, space, CostFamily::Spring)
            };
            let diff = poly(&prev.argmin[0])?.sub(&poly(&row.argmin[0])?);
            if let Some(at) = diff
                .roots()
                .into_iter()
                .find(|r| r.to_f64() >= to_f64(&prev.a) && r.to_f64() <= to_f64(&row.a))
            {
                crossings.push(Crossing {
                    from: prev.argmin[0].clone(),
                    to: row.argmin[0].clone(),
                    at,
                });
            }
        }
        last = Some(row);
    }
    Ok(SweepReport { rows, crossings })
}
