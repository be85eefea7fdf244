//! The continuous Frenkel-Kontorova gas on `[0, 3]` with `v(r) = r^4/4 - r^3/3`:
//! pointwise triple minimization, the exact reduction to `B = {-1, 0, 1}`, the
//! quasi-Monge minimizer, and an explicit Monge minimizing sequence.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::costs::{minimize_full_certified, minimize_over_catalog, CostSpec, CostValue, Potential};
use crate::error::{Error, Result};
use crate::exact::rational::{int, rat};
use crate::exact::Rational;
use crate::gallery::standard_catalog;
use crate::monge::{self, MongeIndex};
use crate::plans::{Dims, StateSpace, SymmetricPlan};
use crate::polytope;

/// `E(r1, r2) = v(r1) + v(r2) + v(r1 + r2)`.
fn triple_energy(v: &Potential, r1: f64, r2: f64) -> Result<f64> {
    Ok(v.evaluate_f64(r1.abs())? + v.evaluate_f64(r2.abs())? + v.evaluate_f64((r1 + r2).abs())?)
}

fn tuple_energy(v: &Potential, x: [f64; 3]) -> Result<f64> {
    triple_energy(v, x[1] - x[0], x[2] - x[1])
}

#[derive(Clone, Debug, PartialEq)]
pub struct TripleMinResult {
    /// Global minimizers on `[0, 3]^2`, sorted.
    pub minimizers: Vec<(f64, f64)>,
    pub min_value: f64,
    pub tolerance: f64,
    /// The energy is constant on the grid; no minimizer is singled out.
    pub flat: bool,
}

const DOMAIN: f64 = 3.0;
const FD_STEP: f64 = 1e-5;

fn grad_hess(v: &Potential, x: f64, y: f64) -> Result<([f64; 2], [[f64; 3]; 1])> {
    let e = |a: f64, b: f64| triple_energy(v, a, b);
    let h = FD_STEP;
    let f = e(x, y)?;
    let (fxp, fxm) = (e(x + h, y)?, e(x - h, y)?);
    let (fyp, fym) = (e(x, y + h)?, e(x, y - h)?);
    let fxy = (e(x + h, y + h)? - e(x + h, y - h)? - e(x - h, y + h)? + e(x - h, y - h)?) / (4.0 * h * h);
    let g = [(fxp - fxm) / (2.0 * h), (fyp - fym) / (2.0 * h)];
    let hxx = (fxp - 2.0 * f + fxm) / (h * h);
    let hyy = (fyp - 2.0 * f + fym) / (h * h);
    Ok((g, [[hxx, fxy, hyy]]))
}

/// Projected Newton iteration on `[0, 3]^2` from a grid point.
fn refine(v: &Potential, mut x: f64, mut y: f64) -> Result<(f64, f64)> {
    for _ in 0..100 {
        let (g, [[hxx, hxy, hyy]]) = grad_hess(v, x, y)?;
        let det = hxx * hyy - hxy * hxy;
        let (dx, dy) = if hxx > 0.0 && det > 0.0 {
            (-(hyy * g[0] - hxy * g[1]) / det, -(hxx * g[1] - hxy * g[0]) / det)
        } else {
            (-1e-3 * g[0], -1e-3 * g[1])
        };
        let (nx, ny) = ((x + dx).clamp(0.0, DOMAIN), (y + dy).clamp(0.0, DOMAIN));
        let moved = (nx - x).abs() + (ny - y).abs();
        x = nx;
        y = ny;
        if moved < 1e-15 {
            break;
        }
    }
    Ok((x, y))
}

/// Grid scan of the triple energy over `[0, 3]^2`, Newton refinement of every
/// discrete local minimum, then a stationarity and Hessian check on the survivors.
pub fn triple_min(v: &Potential, grid: usize, refine_tol: f64) -> Result<TripleMinResult> {
    if grid < 100 {
        return Err(Error::invalid("grid must have at least 100 points per axis"));
    }
    if refine_tol <= 0.0 || refine_tol.is_nan() {
        return Err(Error::invalid("refinement tolerance must be positive"));
    }
    let step = DOMAIN / grid as f64;
    let n = grid + 1;
    let values: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|k| triple_energy(v, (k / n) as f64 * step, (k % n) as f64 * step))
        .collect::<Result<_>>()?;
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if hi - lo <= 1e-14 * (1.0 + lo.abs()) {
        return Ok(TripleMinResult {
            minimizers: Vec::new(),
            min_value: lo,
            tolerance: refine_tol,
            flat: true,
        });
    }
    let at = |i: usize, j: usize| values[i * n + j];
    let mut seeds = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let c = at(i, j);
            let is_min = (i.saturating_sub(1)..=(i + 1).min(n - 1))
                .all(|a| (j.saturating_sub(1)..=(j + 1).min(n - 1)).all(|b| at(a, b) >= c));
            if is_min {
                seeds.push((i as f64 * step, j as f64 * step));
            }
        }
    }
    let mut found: Vec<(f64, f64, f64)> = Vec::new();
    for (x, y) in seeds {
        let (x, y) = refine(v, x, y)?;
        let (g, [[hxx, hxy, hyy]]) = grad_hess(v, x, y)?;
        let interior = |t: f64| t > 0.0 && t < DOMAIN;
        // On the boundary only the tangential derivative has to vanish, the normal one must point inward.
        let gx_ok = if interior(x) { g[0].abs() < refine_tol } else { g[0] > -refine_tol };
        let gy_ok = if interior(y) { g[1].abs() < refine_tol } else { g[1] > -refine_tol };
        let pd = hxx > 0.0 && hxx * hyy - hxy * hxy > 0.0;
        if gx_ok && gy_ok && pd {
            let e = triple_energy(v, x, y)?;
            if !found.iter().any(|p| (p.0 - x).abs() < 1e-7 && (p.1 - y).abs() < 1e-7) {
                found.push((x, y, e));
            }
        }
    }
    let min_value = found.iter().map(|p| p.2).fold(f64::INFINITY, f64::min);
    let mut minimizers: Vec<(f64, f64)> = found
        .iter()
        .filter(|p| p.2 - min_value <= 1e-10)
        .map(|p| (p.0, p.1))
        .collect();
    minimizers.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    Ok(TripleMinResult {
        minimizers,
        min_value,
        tolerance: refine_tol,
        flat: false,
    })
}

/// The FK problem restricted to `B = {-1, 0, 1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteReduction {
    pub minimizer_name: String,
    pub minimizer: SymmetricPlan,
    pub unique: bool,
    pub monge: bool,
    pub symmetrized_monge: bool,
    pub kantorovich_min: Rational,
    /// Same minimum from the LP over all 27 tuples.
    pub full_lp_min: Rational,
    pub full_lp_unique: bool,
    pub monge_min: Rational,
    pub monge_argmin: Vec<String>,
    /// `monge_min - kantorovich_min`.
    pub gap: Rational,
}

impl FiniteReduction {
    pub fn to_json(&self) -> Value {
        json!({
            "sites": ["-1", "0", "1"],
            "minimizer": self.minimizer_name,
            "unique": self.unique,
            "monge": self.monge,
            "symmetrized_monge": self.symmetrized_monge,
            "kantorovich_min": self.kantorovich_min.to_string(),
            "full_lp_min": self.full_lp_min.to_string(),
            "full_lp_unique": self.full_lp_unique,
            "symmetrized_monge_min": self.monge_min.to_string(),
            "symmetrized_monge_argmin": self.monge_argmin,
            "gap": self.gap.to_string(),
        })
    }
}

pub fn finite_reduction() -> Result<FiniteReduction> {
    let space = StateSpace::on_line(3, vec![int(-1), int(0), int(1)])?;
    let cost = CostSpec::new(space, Potential::QuarticFk)?;
    let cat = standard_catalog();
    let res = minimize_over_catalog(&cost, cat)?;
    let exact = |v: &CostValue| {
        v.as_exact()
            .cloned()
            .ok_or_else(|| Error::Mode("the quartic cost is exact".into()))
    };
    let kantorovich_min = exact(&res.value)?;
    let minimizer = res.plans[0].clone();
    let full = minimize_full_certified(&cost, polytope::DEFAULT_BUDGET)?;
    let index = MongeIndex::build(Dims::new(3, 3)?)?;
    let mut monge_values = Vec::new();
    for p in index.plans() {
        monge_values.push((monge::name_vertex(p), exact(&cost.evaluate_symmetric(p)?)?));
    }
    let monge_min = monge_values
        .iter()
        .map(|(_, v)| v.clone())
        .min()
        .ok_or_else(|| Error::invalid("no Monge states"))?;
    let monge_argmin = monge_values
        .iter()
        .filter(|(_, v)| *v == monge_min)
        .map(|(n, _)| n.clone())
        .collect();
    Ok(FiniteReduction {
        minimizer_name: res.argmin[0].clone(),
        unique: res.unique,
        monge: monge::is_monge(&minimizer.to_dense()),
        symmetrized_monge: index.contains(&minimizer),
        minimizer,
        gap: &monge_min - &kantorovich_min,
        full_lp_min: exact(&full.value)?,
        full_lp_unique: full.unique,
        kantorovich_min,
        monge_min,
        monge_argmin,
    })
}

/// Histogram of samples on `[0, 3)`; returns the largest relative deviation
/// of a bin mass from the uniform mass.
pub fn uniformity_deviation(samples: &[(f64, f64)], bins: usize) -> f64 {
    let mut mass = vec![0.0; bins];
    let total: f64 = samples.iter().map(|s| s.1).sum();
    for &(x, w) in samples {
        let b = ((x / DOMAIN) * bins as f64).floor();
        if b >= 0.0 && (b as usize) < bins {
            mass[b as usize] += w;
        }
    }
    let target = total / bins as f64;
    mass.iter().map(|m| (m - target).abs() / target).fold(0.0, f64::max)
}

/// The superposed FK plan `int_0^1 S(1/2 delta_(a,a,a+1) + 1/2 delta_(a+1,a+2,a+2)) da`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiMongeReport {
    pub cost: f64,
    /// Worst relative bin deviation of the one-point marginal.
    pub marginal_deviation: f64,
}

/// Midpoint-rule cost of the quasi-Monge plan, and a histogram check of its
/// one-point marginal on `bins` bins using `10 * bins` samples of `a`.
pub fn quasi_monge_cost(quadrature_points: usize, bins: usize) -> Result<QuasiMongeReport> {
    if quadrature_points < 10 {
        return Err(Error::invalid("need at least 10 quadrature points"));
    }
    if bins == 0 {
        return Err(Error::invalid("need at least one histogram bin"));
    }
    let v = Potential::QuarticFk;
    let mut acc = 0.0;
    for k in 0..quadrature_points {
        let a = (k as f64 + 0.5) / quadrature_points as f64;
        let first = tuple_energy(&v, [a, a, a + 1.0])?;
        let second = tuple_energy(&v, [a + 1.0, a + 2.0, a + 2.0])?;
        acc += 0.5 * first + 0.5 * second;
    }
    let cost = acc / quadrature_points as f64;
    let samples = 10 * bins;
    let mut points = Vec::with_capacity(3 * samples);
    for k in 0..samples {
        let a = (k as f64 + 0.5) / samples as f64;
        // Symmetrized one-point marginal: (delta_a + delta_(a+1) + delta_(a+2)) / 3.
        points.extend([(a, 1.0), (a + 1.0, 1.0), (a + 2.0, 1.0)]);
    }
    Ok(QuasiMongeReport {
        cost,
        marginal_deviation: uniformity_deviation(&points, bins),
    })
}

/// Piecewise-translation Monge maps on `[0, 3]` with cells of width `1/(2 nu)`.
///
/// On `[0,1)` and `[2,3)` the triples realize the optimal distance patterns
/// `(1,1,0)` and `(0,1,1)`. On `[1,2)` they realize `(1+h, h, 1)`, the price of
/// filling the middle third, which vanishes as `h -> 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MongeMapPair {
    pub nu: usize,
}

impl MongeMapPair {
    pub fn new(nu: usize) -> Result<Self> {
        if nu == 0 {
            return Err(Error::invalid("nu must be at least 1"));
        }
        Ok(Self { nu })
    }

    pub fn cell_width(&self) -> f64 {
        1.0 / (2 * self.nu) as f64
    }

    fn locate(&self, x: f64) -> (usize, bool) {
        let k = (x.floor() as usize).min(2);
        let cell = ((x - k as f64) / self.cell_width()).floor() as usize;
        (k, cell % 2 == 0)
    }

    /// `(T2(x), T3(x))` for `x` in `[0, 3)`.
    pub fn maps(&self, x: f64) -> (f64, f64) {
        let h = self.cell_width();
        match self.locate(x) {
            (0, true) => (x + 1.0, x),
            (0, false) => (x, x + 1.0),
            (1, true) => (x + 1.0 + h, x + 1.0),
            (1, false) => (x - 1.0 - h, x - 1.0),
            (_, true) => (x, x - 1.0),
            (_, false) => (x - 1.0, x),
        }
    }

    /// `I[T2, T3] = (1/3) int_0^3 v(|x-T2|) + v(|T2-T3|) + v(|x-T3|) dx` by the
    /// midpoint rule with `points_per_cell` nodes in every cell.
    pub fn energy(&self, points_per_cell: usize) -> Result<f64> {
        if points_per_cell == 0 {
            return Err(Error::invalid("need at least one quadrature point per cell"));
        }
        let v = Potential::QuarticFk;
        let h = self.cell_width();
        let cells = 3 * 2 * self.nu;
        let dx = h / points_per_cell as f64;
        let mut acc = 0.0;
        for c in 0..cells {
            for q in 0..points_per_cell {
                let x = c as f64 * h + (q as f64 + 0.5) * dx;
                let (t2, t3) = self.maps(x);
                acc += v.evaluate_f64((x - t2).abs())?
                    + v.evaluate_f64((t2 - t3).abs())?
                    + v.evaluate_f64((x - t3).abs())?;
            }
        }
        Ok(acc * dx / 3.0)
    }

    /// Exact `I - (-1/6) = (h^2/2 + h^3/3 + h^4/2) / 3`.
    pub fn exact_excess(&self) -> Rational {
        let h = rat(1, 2 * self.nu as i64);
        let h2 = &h * &h;
        let h3 = &h2 * &h;
        let h4 = &h3 * &h;
        (h2 / int(2) + h3 / int(3) + h4 / int(2)) / int(3)
    }

    /// `(x, T2(x), T3(x))` at `n` midpoints of `[0, 3)`.
    pub fn samples(&self, n: usize) -> Vec<(f64, f64, f64)> {
        (0..n)
            .map(|k| {
                let x = DOMAIN * (k as f64 + 0.5) / n as f64;
                let (t2, t3) = self.maps(x);
                (x, t2, t3)
            })
            .collect()
    }

    /// Worst relative bin deviation of the pushforwards of `T2` and `T3`.
    pub fn pushforward_deviation(&self, bins: usize) -> f64 {
        let s = self.samples(20 * bins);
        let t2: Vec<(f64, f64)> = s.iter().map(|p| (p.1, 1.0)).collect();
        let t3: Vec<(f64, f64)> = s.iter().map(|p| (p.2, 1.0)).collect();
        uniformity_deviation(&t2, bins).max(uniformity_deviation(&t3, bins))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MicrostructureItem {
    pub nu: usize,
    pub energy: f64,
    pub exact_excess: Rational,
    pub pushforward_deviation: f64,
}

pub fn microstructure_sequence(nu_list: &[usize], points_per_cell: usize) -> Result<Vec<MicrostructureItem>> {
    nu_list
        .iter()
        .map(|&nu| {
            let pair = MongeMapPair::new(nu)?;
            Ok(MicrostructureItem {
                nu,
                energy: pair.energy(points_per_cell)?,
                exact_excess: pair.exact_excess(),
                pushforward_deviation: pair.pushforward_deviation(600),
            })
        })
        .collect()
}

/// Pointwise weak limits of the maps: `x + 1/2`, `x`, `x - 1/2` on the three thirds.
pub fn weak_limit(x: f64) -> f64 {
    if x < 1.0 {
        x + 0.5
    } else if x < 2.0 {
        x
    } else {
        x - 0.5
    }
}

/// Cell averages of `T2` and `T3` over one period `[m/nu, (m+1)/nu)` minus the weak limit at its center.
pub fn weak_limit_defect(pair: &MongeMapPair, samples_per_period: usize) -> f64 {
    let period = 2.0 * pair.cell_width();
    let periods = (DOMAIN / period).round() as usize;
    (0..periods)
        .map(|m| {
            let start = m as f64 * period;
            let (mut s2, mut s3) = (0.0, 0.0);
            for q in 0..samples_per_period {
                let x = start + (q as f64 + 0.5) * period / samples_per_period as f64;
                let (t2, t3) = pair.maps(x);
                s2 += t2 - x;
                s3 += t3 - x;
            }
            let center = start + period / 2.0;
            let want = weak_limit(center) - center;
            ((s2 / samples_per_period as f64) - want)
                .abs()
                .max(((s3 / samples_per_period as f64) - want).abs())
        })
        .fold(0.0, f64::max)
}
