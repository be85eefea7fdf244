//! Exact two-phase simplex on a dense rational tableau.
//!
//! Solves `min c.x  s.t.  A x = b, x >= 0` (or `x` free). Bland's rule picks both
//! the entering and the leaving variable, which rules out cycling on the highly
//! degenerate systems produced by the transport polytopes.

use num_traits::{Signed, Zero};

use super::matrix::RationalMatrix;
use super::rational::Rational;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpResult {
    pub status: LpStatus,
    /// Optimal objective value, present iff `status == Optimal`.
    pub value: Option<Rational>,
    /// An optimal vertex, present iff `status == Optimal`.
    pub point: Option<Vec<Rational>>,
}

impl LpResult {
    fn infeasible() -> Self {
        Self {
            status: LpStatus::Infeasible,
            value: None,
            point: None,
        }
    }

    fn unbounded() -> Self {
        Self {
            status: LpStatus::Unbounded,
            value: None,
            point: None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Minimize `objective . x` subject to `a_eq x = b_eq`, with `x >= 0` when
/// `nonneg` is set and `x` free otherwise.
pub fn lp_solve(
    objective: &[Rational],
    a_eq: &RationalMatrix,
    b_eq: &[Rational],
    nonneg: bool,
) -> Result<LpResult> {
    if objective.len() != a_eq.cols() {
        return Err(Error::invalid(format!(
            "objective has {} entries but the constraint matrix has {} columns",
            objective.len(),
            a_eq.cols()
        )));
    }
    if b_eq.len() != a_eq.rows() {
        return Err(Error::invalid(format!(
            "right-hand side has {} entries but the constraint matrix has {} rows",
            b_eq.len(),
            a_eq.rows()
        )));
    }
    if nonneg {
        return Ok(Tableau::new(a_eq, b_eq).solve(objective));
    }
    // x = x+ - x-
    let n = a_eq.cols();
    let mut split = RationalMatrix::zeros(a_eq.rows(), 2 * n);
    for i in 0..a_eq.rows() {
        for j in 0..n {
            split[(i, j)] = a_eq[(i, j)].clone();
            split[(i, n + j)] = -a_eq[(i, j)].clone();
        }
    }
    let c: Vec<Rational> = objective
        .iter()
        .cloned()
        .chain(objective.iter().map(|v| -v.clone()))
        .collect();
    let mut res = Tableau::new(&split, b_eq).solve(&c);
    if let Some(p) = res.point.take() {
        res.point = Some((0..n).map(|j| &p[j] - &p[n + j]).collect());
    }
    Ok(res)
}

struct Tableau {
    /// Constraint rows; the last entry of each row is the right-hand side.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Number of structural (non-artificial) variables.
    n: usize,
    /// Row length, fixed at construction (rows may be dropped later).
    width: usize,
}

impl Tableau {
    fn new(a: &RationalMatrix, b: &[Rational]) -> Self {
        let m = a.rows();
        let n = a.cols();
        let width = n + m + 1;
        let rows = (0..m)
            .map(|i| {
                let flip = b[i].is_negative();
                let mut row = vec![Rational::zero(); width];
                for j in 0..n {
                    row[j] = if flip { -a[(i, j)].clone() } else { a[(i, j)].clone() };
                }
                row[n + i] = Rational::from_integer(1.into());
                row[width - 1] = if flip { -b[i].clone() } else { b[i].clone() };
                row
            })
            .collect();
        Self {
            rows,
            basis: (n..n + m).collect(),
            n,
            width,
        }
    }

    fn width(&self) -> usize {
        self.width
    }

    fn pivot(&mut self, cost: &mut [Rational], p: usize, e: usize) {
        let piv = self.rows[p][e].clone();
        for v in self.rows[p].iter_mut() {
            *v /= &piv;
        }
        let prow = self.rows[p].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == p || row[e].is_zero() {
                continue;
            }
            let f = row[e].clone();
            for (v, pv) in row.iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        if !cost[e].is_zero() {
            let f = cost[e].clone();
            for (v, pv) in cost.iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[p] = e;
    }

    /// Pivot over the columns `< allowed` until optimal. Returns false if unbounded.
    ///
    /// Entering columns follow Dantzig's rule; after a run of degenerate pivots the
    /// choice switches to Bland's rule until the objective moves again, which rules out cycling.
    fn run(&mut self, cost: &mut [Rational], allowed: usize) -> bool {
        let rhs = self.width() - 1;
        let mut degenerate = 0;
        loop {
            let bland = degenerate > self.rows.len();
            let entering = if bland {
                (0..allowed).find(|&j| cost[j].is_negative())
            } else {
                (0..allowed)
                    .filter(|&j| cost[j].is_negative())
                    .min_by(|&a, &b| cost[a].cmp(&cost[b]).then(a.cmp(&b)))
            };
            let Some(e) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[e].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[e];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((p, ratio)) = leave else {
                return false;
            };
            if ratio.is_zero() {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(cost, p, e);
        }
    }

    fn solve(mut self, objective: &[Rational]) -> LpResult {
        let n = self.n;
        let width = self.width();
        let rhs = width - 1;

        // Phase 1: minimize the sum of artificials.
        let mut cost = vec![Rational::zero(); width];
        for j in n..width - 1 {
            cost[j] = Rational::from_integer(1.into());
        }
        for row in &self.rows {
            for (c, v) in cost.iter_mut().zip(row) {
                if !v.is_zero() {
                    *c -= v;
                }
            }
        }
        // Basic artificials have reduced cost 1 - 1 = 0 after the subtraction above.
        for j in n..width - 1 {
            cost[j] = Rational::zero();
        }
        self.run(&mut cost, width - 1);
        if !cost[rhs].is_zero() {
            return LpResult::infeasible();
        }

        // Drive artificials out of the basis; drop rows that are redundant.
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= n {
                if let Some(e) = (0..n).find(|&j| !self.rows[i][j].is_zero()) {
                    self.pivot(&mut cost, i, e);
                } else {
                    self.rows.remove(i);
                    self.basis.remove(i);
                    continue;
                }
            }
            i += 1;
        }

        // Phase 2 with the real objective, artificial columns frozen out.
        let mut cost = vec![Rational::zero(); width];
        cost[..n].clone_from_slice(objective);
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = objective[b].clone();
            if cb.is_zero() {
                continue;
            }
            for (c, v) in cost.iter_mut().zip(row) {
                if !v.is_zero() {
                    *c -= &cb * v;
                }
            }
        }
        if !self.run(&mut cost, n) {
            return LpResult::unbounded();
        }
        let mut point = vec![Rational::zero(); n];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            point[b] = row[rhs].clone();
        }
        let value = objective
            .iter()
            .zip(&point)
            .map(|(c, x)| c * x)
            .sum();
        LpResult {
            status: LpStatus::Optimal,
            value: Some(value),
            point: Some(point),
        }
    }
}
