//! Dense linear-program solver for the small and medium problems produced by
//! cutting-surface synthesis (hundreds of variables and constraints).
//!
//! Problems are stated as `min c^T x  s.t.  A x >= b,  x >= lb` with finite
//! lower bounds on every variable. The solver is a two-phase revised simplex
//! with a dense LU-factored basis and product-form updates, Dantzig pricing,
//! and Bland's rule as an anti-cycling fallback after a run of degenerate
//! pivots. Vertex solutions keep the hard constraints of the synthesis LPs
//! exactly active, which is why an exact simplex is used rather than an
//! interior-point method.

use std::io::Write;

use crate::error::{Error, Result};
use crate::linalg::{Lu, Mat};

/// Canonical-form linear program: `min c^T x` subject to `A x >= b`,
/// `x >= lower_bounds` (zero by default).
#[derive(Debug, Clone)]
pub struct LinearProgram {
    objective: Vec<f64>,
    rows: Mat,
    rhs: Vec<f64>,
    lower_bounds: Vec<f64>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>, rows: Mat, rhs: Vec<f64>) -> Result<Self> {
        let n = objective.len();
        let lower_bounds = vec![0.0; n];
        Self::with_lower_bounds(objective, rows, rhs, lower_bounds)
    }

    pub fn with_lower_bounds(
        objective: Vec<f64>,
        rows: Mat,
        rhs: Vec<f64>,
        lower_bounds: Vec<f64>,
    ) -> Result<Self> {
        let n = objective.len();
        if n == 0 {
            return Err(Error::Parameter("linear program needs at least one variable".into()));
        }
        if rows.ncols() != n {
            return Err(Error::Dimension { expected: n, got: rows.ncols() });
        }
        if rows.nrows() != rhs.len() {
            return Err(Error::Dimension { expected: rows.nrows(), got: rhs.len() });
        }
        if lower_bounds.len() != n {
            return Err(Error::Dimension { expected: n, got: lower_bounds.len() });
        }
        let finite = objective.iter().chain(rhs.iter()).chain(lower_bounds.iter()).all(|v| v.is_finite())
            && rows.data().iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::Parameter("linear program entries must be finite".into()));
        }
        Ok(LinearProgram { objective, rows, rhs, lower_bounds })
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.nrows()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn rows(&self) -> &Mat {
        &self.rows
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn lower_bounds(&self) -> &[f64] {
        &self.lower_bounds
    }

    /// Plain-text dump for cross-checking against external solvers: the
    /// objective row, then one `a_1 ... a_n >= b` line per constraint.
    pub fn dump<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        write!(w, "min")?;
        for c in &self.objective {
            write!(w, " {c:.16e}")?;
        }
        writeln!(w)?;
        for i in 0..self.num_rows() {
            for a in self.rows.row(i) {
                write!(w, "{a:.16e} ")?;
            }
            writeln!(w, ">= {:.16e}", self.rhs[i])?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterLimit,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective_value: f64,
    pub iterations: usize,
}

/// Solver options. `max_iters = 0` selects the default `50 * (n + m)`.
/// `warm_start` is an optional feasible (or nearly feasible) point used to
/// crash an initial basis, e.g. from a constructive feasibility certificate.
#[derive(Debug, Clone, Default)]
pub struct LpOptions {
    pub feas_tol: f64,
    pub max_iters: usize,
    pub warm_start: Option<Vec<f64>>,
}

impl LpOptions {
    fn feas_tol(&self) -> f64 {
        if self.feas_tol > 0.0 {
            self.feas_tol
        } else {
            1e-9
        }
    }
}

#[derive(Debug, Clone)]
pub struct RowViolation {
    pub row: usize,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct BoundViolation {
    pub var: usize,
    pub amount: f64,
}

/// Constraint-by-constraint feasibility report.
#[derive(Debug, Clone, Default)]
pub struct ViolationReport {
    pub row_violations: Vec<RowViolation>,
    pub bound_violations: Vec<BoundViolation>,
}

impl ViolationReport {
    pub fn is_clean(&self) -> bool {
        self.row_violations.is_empty() && self.bound_violations.is_empty()
    }
}

/// List every row with residual below `-tol` and every lower-bound violation
/// beyond `tol`. An empty report means the point is feasible at `tol`.
pub fn verify_solution(lp: &LinearProgram, sol: &LpSolution, tol: f64) -> ViolationReport {
    let mut report = ViolationReport::default();
    let ax = lp.rows.matvec(&sol.x);
    for i in 0..lp.num_rows() {
        let residual = ax[i] - lp.rhs[i];
        if residual < -tol {
            report.row_violations.push(RowViolation { row: i, residual });
        }
    }
    for j in 0..lp.num_vars() {
        let gap = sol.x[j] - lp.lower_bounds[j];
        if gap < -tol {
            report.bound_violations.push(BoundViolation { var: j, amount: gap });
        }
    }
    report
}

/// Solve the linear program. Deterministic: identical inputs produce
/// bit-identical solutions.
pub fn solve_lp(lp: &LinearProgram, opts: &LpOptions) -> Result<LpSolution> {
    Simplex::new(lp, opts).run()
}

const REFACTOR_EVERY: usize = 64;
const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

struct Eta {
    row: usize,
    col: Vec<f64>,
}

struct Simplex<'a> {
    lp: &'a LinearProgram,
    n: usize,
    m: usize,
    /// Right-hand side after shifting variables to their lower bounds.
    b: Vec<f64>,
    feas_tol: f64,
    max_iters: usize,
    warm: Option<Vec<f64>>,
    /// Basis column indices, one per row slot.
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    lu: Option<Lu>,
    etas: Vec<Eta>,
    x_basic: Vec<f64>,
    iterations: usize,
    degenerate_streak: usize,
    bland: bool,
}

impl<'a> Simplex<'a> {
    /// Column layout: `0..n` structural (shifted to zero lower bounds),
    /// `n..n+m` surplus (column `-e_i` for row `i`), `n+m..n+2m` artificial
    /// (column `+e_i` for row `i`). Artificials never price in.
    fn new(lp: &'a LinearProgram, opts: &LpOptions) -> Self {
        let n = lp.num_vars();
        let m = lp.num_rows();
        let shift = lp.rows.matvec(&lp.lower_bounds);
        let b: Vec<f64> = lp.rhs.iter().zip(&shift).map(|(r, s)| r - s).collect();
        let max_iters = if opts.max_iters > 0 { opts.max_iters } else { 50 * (n + m) };
        Simplex {
            lp,
            n,
            m,
            b,
            feas_tol: opts.feas_tol(),
            max_iters,
            warm: opts.warm_start.clone(),
            basis: Vec::new(),
            is_basic: vec![false; n + 2 * m],
            lu: None,
            etas: Vec::new(),
            x_basic: Vec::new(),
            iterations: 0,
            degenerate_streak: 0,
            bland: false,
        }
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n + self.m
    }

    fn column(&self, j: usize) -> Vec<f64> {
        let mut col = vec![0.0; self.m];
        if j < self.n {
            for i in 0..self.m {
                col[i] = self.lp.rows.get(i, j);
            }
        } else if j < self.n + self.m {
            col[j - self.n] = -1.0;
        } else {
            col[j - self.n - self.m] = 1.0;
        }
        col
    }

    fn cost(&self, j: usize, phase: Phase) -> f64 {
        match phase {
            Phase::One => {
                if self.is_artificial(j) {
                    1.0
                } else {
                    0.0
                }
            }
            Phase::Two => {
                if j < self.n {
                    self.lp.objective[j]
                } else {
                    0.0
                }
            }
        }
    }

    fn set_basis(&mut self, basis: Vec<usize>) -> Result<()> {
        for f in self.is_basic.iter_mut() {
            *f = false;
        }
        for &j in &basis {
            self.is_basic[j] = true;
        }
        self.basis = basis;
        self.refactor()
    }

    fn refactor(&mut self) -> Result<()> {
        let mut bm = Mat::zeros(self.m, self.m);
        for (slot, &j) in self.basis.iter().enumerate() {
            let col = self.column(j);
            for i in 0..self.m {
                bm.set(i, slot, col[i]);
            }
        }
        let lu = Lu::factor(&bm).map_err(|e| Error::Solver(format!("basis refactorization failed: {e}")))?;
        self.etas.clear();
        self.x_basic = lu.solve(&self.b);
        self.lu = Some(lu);
        Ok(())
    }

    /// FTRAN: solve `B w = v` through the LU factor and the eta file.
    fn ftran(&self, v: &[f64]) -> Vec<f64> {
        let mut w = self.lu.as_ref().expect("factorized basis").solve(v);
        for eta in &self.etas {
            let pivot = w[eta.row] / eta.col[eta.row];
            if pivot != 0.0 {
                for i in 0..self.m {
                    if i != eta.row {
                        w[i] -= eta.col[i] * pivot;
                    }
                }
            }
            w[eta.row] = pivot;
        }
        w
    }

    /// BTRAN: solve `B^T y = v` by unwinding the eta file in reverse.
    fn btran(&self, v: &[f64]) -> Vec<f64> {
        let mut u = v.to_vec();
        for eta in self.etas.iter().rev() {
            let mut s = u[eta.row];
            for i in 0..self.m {
                if i != eta.row {
                    s -= eta.col[i] * u[i];
                }
            }
            u[eta.row] = s / eta.col[eta.row];
        }
        self.lu.as_ref().expect("factorized basis").solve_transpose(&u)
    }

    /// Reduced costs of all non-artificial nonbasic columns; basic and
    /// artificial columns report +inf so they are never selected.
    fn reduced_costs(&self, phase: Phase) -> Vec<f64> {
        let cost_b: Vec<f64> = self.basis.iter().map(|&j| self.cost(j, phase)).collect();
        let y = self.btran(&cost_b);
        let mut d = vec![f64::INFINITY; self.n + self.m];
        // Structural columns in one cache-friendly pass over the rows.
        let mut ay = vec![0.0; self.n];
        for i in 0..self.m {
            let yi = y[i];
            if yi == 0.0 {
                continue;
            }
            for (j, a) in self.lp.rows.row(i).iter().enumerate() {
                ay[j] += yi * a;
            }
        }
        for (j, ayj) in ay.iter().enumerate() {
            if !self.is_basic[j] {
                d[j] = self.cost(j, phase) - ayj;
            }
        }
        for i in 0..self.m {
            let j = self.n + i;
            if !self.is_basic[j] {
                d[j] = self.cost(j, phase) + y[i];
            }
        }
        d
    }

    fn choose_entering(&self, d: &[f64]) -> Option<usize> {
        if self.bland {
            d.iter().position(|&dj| dj < -PIVOT_TOL)
        } else {
            let mut best: Option<(usize, f64)> = None;
            for (j, &dj) in d.iter().enumerate() {
                if dj < -PIVOT_TOL {
                    match best {
                        Some((_, bv)) if dj >= bv => {}
                        _ => best = Some((j, dj)),
                    }
                }
            }
            best.map(|(j, _)| j)
        }
    }

    /// Two-pass ratio test. Among rows within a hair of the minimum ratio,
    /// prefer expelling artificials, then the largest pivot magnitude, then
    /// the lowest basis column index (keeps runs deterministic and, with
    /// Bland pricing, cycle-free).
    fn choose_leaving(&self, w: &[f64]) -> Option<usize> {
        let mut theta = f64::INFINITY;
        for i in 0..self.m {
            if w[i] > PIVOT_TOL {
                let ratio = self.x_basic[i].max(0.0) / w[i];
                if ratio < theta {
                    theta = ratio;
                }
            }
        }
        if !theta.is_finite() {
            return None;
        }
        let slack = 1e-12 * (1.0 + theta.abs());
        let mut best: Option<usize> = None;
        for i in 0..self.m {
            if w[i] > PIVOT_TOL {
                let ratio = self.x_basic[i].max(0.0) / w[i];
                if ratio <= theta + slack {
                    best = match best {
                        None => Some(i),
                        Some(bi) => {
                            let cand = (
                                self.is_artificial(self.basis[i]),
                                w[i].abs(),
                                std::cmp::Reverse(self.basis[i]),
                            );
                            let incumbent = (
                                self.is_artificial(self.basis[bi]),
                                w[bi].abs(),
                                std::cmp::Reverse(self.basis[bi]),
                            );
                            Some(if cand > incumbent { i } else { bi })
                        }
                    };
                }
            }
        }
        best
    }

    /// Replace the basis column at `slot` with `entering`, updating the basic
    /// values through the eta transform.
    fn apply_basis_change(&mut self, entering: usize, slot: usize, w: Vec<f64>) -> Result<f64> {
        let theta = self.x_basic[slot].max(0.0) / w[slot];
        for i in 0..self.m {
            self.x_basic[i] -= theta * w[i];
        }
        self.x_basic[slot] = theta;
        self.is_basic[self.basis[slot]] = false;
        self.is_basic[entering] = true;
        self.basis[slot] = entering;
        self.etas.push(Eta { row: slot, col: w });
        if self.etas.len() >= REFACTOR_EVERY {
            self.refactor()?;
        }
        Ok(theta)
    }

    fn run_phase(&mut self, phase: Phase) -> Result<LpStatus> {
        loop {
            if self.iterations >= self.max_iters {
                return Ok(LpStatus::IterLimit);
            }
            let d = self.reduced_costs(phase);
            let entering = match self.choose_entering(&d) {
                Some(j) => j,
                None => return Ok(LpStatus::Optimal),
            };
            let w = self.ftran(&self.column(entering));
            let leaving = match self.choose_leaving(&w) {
                Some(slot) => slot,
                None => return Ok(LpStatus::Unbounded),
            };
            let theta = self.apply_basis_change(entering, leaving, w)?;
            self.iterations += 1;
            if theta <= DEGENERATE_TOL {
                self.degenerate_streak += 1;
                if self.degenerate_streak > 10 * (self.n + self.m) {
                    self.bland = true;
                }
            } else {
                self.degenerate_streak = 0;
                self.bland = false;
            }
        }
    }

    fn phase_objective(&self, phase: Phase) -> f64 {
        self.basis
            .iter()
            .zip(&self.x_basic)
            .map(|(&j, &v)| self.cost(j, phase) * v)
            .sum()
    }

    /// Pivot every basic artificial out of the basis with degenerate swaps.
    /// With a full surplus column set a pivot always exists; the largest
    /// available pivot magnitude is used.
    fn expel_artificials(&mut self) -> Result<()> {
        loop {
            let slot = match (0..self.m).find(|&s| self.is_artificial(self.basis[s])) {
                Some(s) => s,
                None => return Ok(()),
            };
            let mut e = vec![0.0; self.m];
            e[slot] = 1.0;
            let beta = self.btran(&e);
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.n + self.m {
                if self.is_basic[j] {
                    continue;
                }
                let pivot = if j < self.n {
                    (0..self.m).map(|i| beta[i] * self.lp.rows.get(i, j)).sum::<f64>()
                } else {
                    -beta[j - self.n]
                };
                match best {
                    Some((_, bv)) if pivot.abs() <= bv => {}
                    _ => best = Some((j, pivot.abs())),
                }
            }
            let (j, mag) = best.ok_or_else(|| Error::Solver("no pivot available to expel artificial".into()))?;
            if mag <= PIVOT_TOL {
                return Err(Error::Solver(format!(
                    "cannot expel artificial variable from basis (best pivot {mag:.3e})"
                )));
            }
            let w = self.ftran(&self.column(j));
            self.apply_basis_change(j, slot, w)?;
        }
    }

    /// Try to crash a basis from a caller-supplied point. Returns true when
    /// the resulting basis is primal feasible with artificials at zero.
    fn crash_from_point(&mut self, point: &[f64]) -> Result<bool> {
        if point.len() != self.n {
            return Ok(false);
        }
        if point.iter().any(|v| !v.is_finite()) {
            return Ok(false);
        }
        let u: Vec<f64> = point
            .iter()
            .zip(&self.lp.lower_bounds)
            .map(|(x, lb)| (x - lb).max(0.0))
            .collect();
        let clamped: Vec<f64> = u.iter().zip(&self.lp.lower_bounds).map(|(ui, lb)| ui + lb).collect();
        let ax = self.lp.rows.matvec(&clamped);
        let mut candidates: Vec<usize> = (0..self.n).filter(|&j| u[j] > self.feas_tol).collect();
        candidates.sort_by(|&a, &b| u[b].partial_cmp(&u[a]).unwrap().then(a.cmp(&b)));
        for i in 0..self.m {
            if ax[i] - self.lp.rhs[i] > self.feas_tol {
                candidates.push(self.n + i);
            }
        }

        // Greedy rank selection by sequential elimination.
        let mut pivots: Vec<(usize, Vec<f64>)> = Vec::new();
        let mut pivot_used = vec![false; self.m];
        let mut chosen = Vec::new();
        for &j in &candidates {
            if chosen.len() == self.m {
                break;
            }
            let mut v = self.column(j);
            for (p, col) in &pivots {
                let f = v[*p];
                if f != 0.0 {
                    for i in 0..self.m {
                        v[i] -= col[i] * f;
                    }
                    v[*p] = 0.0;
                }
            }
            let mut p_best = None;
            let mut p_mag = 1e-8;
            for (i, used) in pivot_used.iter().enumerate() {
                if !used && v[i].abs() > p_mag {
                    p_mag = v[i].abs();
                    p_best = Some(i);
                }
            }
            if let Some(p) = p_best {
                let scale = v[p];
                let norm: Vec<f64> = v.iter().map(|x| x / scale).collect();
                pivot_used[p] = true;
                pivots.push((p, norm));
                chosen.push(j);
            }
        }
        for i in 0..self.m {
            if !pivot_used[i] {
                chosen.push(self.n + self.m + i);
            }
        }
        if self.set_basis(chosen).is_err() {
            return Ok(false);
        }
        let feasible = self.x_basic.iter().all(|&v| v >= -self.feas_tol)
            && self
                .basis
                .iter()
                .zip(&self.x_basic)
                .all(|(&j, &v)| !self.is_artificial(j) || v.abs() <= self.feas_tol);
        Ok(feasible)
    }

    fn standard_start(&mut self) -> Result<bool> {
        let mut basis = Vec::with_capacity(self.m);
        let mut needs_phase1 = false;
        for i in 0..self.m {
            if self.b[i] > 0.0 {
                basis.push(self.n + self.m + i);
                needs_phase1 = true;
            } else {
                basis.push(self.n + i);
            }
        }
        self.set_basis(basis)?;
        Ok(needs_phase1)
    }

    fn solution(&mut self, status: LpStatus) -> Result<LpSolution> {
        // Refresh the basic values from a clean factorization before reading
        // out the answer.
        if status == LpStatus::Optimal {
            self.refactor()?;
        }
        let mut x = self.lp.lower_bounds.to_vec();
        for (slot, &j) in self.basis.iter().enumerate() {
            if j < self.n {
                x[j] += self.x_basic[slot];
            }
        }
        let objective_value = crate::geom::dot(&self.lp.objective, &x);
        Ok(LpSolution { status, x, objective_value, iterations: self.iterations })
    }

    fn run(mut self) -> Result<LpSolution> {
        let mut warmed = false;
        if let Some(point) = self.warm.take() {
            warmed = self.crash_from_point(&point)?;
            if warmed {
                self.expel_artificials()?;
            }
        }
        if !warmed {
            let needs_phase1 = self.standard_start()?;
            if needs_phase1 {
                match self.run_phase(Phase::One)? {
                    LpStatus::Optimal => {}
                    LpStatus::IterLimit => return self.solution(LpStatus::IterLimit),
                    _ => return Err(Error::Solver("phase-1 subproblem cannot be unbounded".into())),
                }
                if self.phase_objective(Phase::One) > self.feas_tol {
                    let mut sol = self.solution(LpStatus::Infeasible)?;
                    sol.x = vec![0.0; self.n];
                    sol.objective_value = f64::NAN;
                    return Ok(sol);
                }
                self.expel_artificials()?;
            }
        }
        self.degenerate_streak = 0;
        self.bland = false;
        let status = self.run_phase(Phase::Two)?;
        let sol = self.solution(status)?;
        if sol.status == LpStatus::Optimal {
            let check = verify_solution(self.lp, &sol, self.feas_tol.max(1e-9) * 10.0);
            if !check.is_clean() {
                return Err(Error::Solver(format!(
                    "optimal basis fails feasibility check ({} row, {} bound violations)",
                    check.row_violations.len(),
                    check.bound_violations.len()
                )));
            }
        }
        Ok(sol)
    }
}
