//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Solves `maximize c·x subject to A x <= b, x >= 0`. Sized for the desk
//! scale checks in this crate, not for large programs.

use crate::model::Rational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, solution: Vec<Rational> },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    objective: Vec<Rational>,
    objective_value: Rational,
    basis: Vec<usize>,
    /// Columns allowed to enter the basis.
    allowed: Vec<bool>,
}

enum PivotResult {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let pivot = self.rows[row][col].clone();
        if !pivot.is_one() {
            for v in self.rows[row].iter_mut() {
                *v /= &pivot;
            }
            self.rhs[row] /= &pivot;
        }
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for r in 0..self.rows.len() {
            if r == row || self.rows[r][col].is_zero() {
                continue;
            }
            let factor = self.rows[r][col].clone();
            for (v, p) in self.rows[r].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
            self.rhs[r] -= &factor * &pivot_rhs;
        }
        if !self.objective[col].is_zero() {
            let factor = self.objective[col].clone();
            for (v, p) in self.objective.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
            self.objective_value -= &factor * &pivot_rhs;
        }
        self.basis[row] = col;
    }

    /// Loads `cost` (maximized) as reduced costs relative to the current basis.
    fn set_objective(&mut self, cost: &[Rational]) {
        self.objective = cost.iter().map(|c| -c.clone()).collect();
        self.objective_value = Rational::zero();
        for r in 0..self.rows.len() {
            let cb = &cost[self.basis[r]];
            if cb.is_zero() {
                continue;
            }
            for (v, a) in self.objective.iter_mut().zip(&self.rows[r]) {
                *v += cb * a;
            }
            self.objective_value += cb * &self.rhs[r];
        }
    }

    fn run(&mut self) -> PivotResult {
        loop {
            let entering = (0..self.objective.len()).find(|&c| self.allowed[c] && self.objective[c].is_negative());
            let Some(col) = entering else {
                return PivotResult::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / a;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            match best {
                Some((row, _)) => self.pivot(row, col),
                None => return PivotResult::Unbounded,
            }
        }
    }
}

pub fn maximize(cost: &[Rational], a: &[Vec<Rational>], b: &[Rational]) -> LpOutcome {
    let vars = cost.len();
    let m = a.len();
    let artificial_rows: Vec<usize> = (0..m).filter(|&r| b[r].is_negative()).collect();
    let width = vars + m + artificial_rows.len();
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_artificial = vars + m;
    for r in 0..m {
        let mut row = vec![Rational::zero(); width];
        let negate = b[r].is_negative();
        for (c, v) in a[r].iter().enumerate() {
            row[c] = if negate { -v.clone() } else { v.clone() };
        }
        row[vars + r] = if negate { -Rational::one() } else { Rational::one() };
        if negate {
            row[next_artificial] = Rational::one();
            basis.push(next_artificial);
            next_artificial += 1;
            rhs.push(-b[r].clone());
        } else {
            basis.push(vars + r);
            rhs.push(b[r].clone());
        }
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        rhs,
        objective: Vec::new(),
        objective_value: Rational::zero(),
        basis,
        allowed: vec![true; width],
    };

    if !artificial_rows.is_empty() {
        let mut phase_one = vec![Rational::zero(); width];
        for c in vars + m..width {
            phase_one[c] = -Rational::one();
        }
        t.set_objective(&phase_one);
        t.run();
        if t.objective_value.is_negative() {
            return LpOutcome::Infeasible;
        }
        // Drive zero-valued artificials out of the basis; drop redundant rows.
        let mut r = 0;
        while r < t.rows.len() {
            if t.basis[r] >= vars + m {
                match (0..vars + m).find(|&c| !t.rows[r][c].is_zero()) {
                    Some(c) => t.pivot(r, c),
                    None => {
                        t.rows.remove(r);
                        t.rhs.remove(r);
                        t.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        for c in vars + m..width {
            t.allowed[c] = false;
        }
    }

    let mut full_cost = vec![Rational::zero(); width];
    full_cost[..vars].clone_from_slice(cost);
    t.set_objective(&full_cost);
    match t.run() {
        PivotResult::Unbounded => LpOutcome::Unbounded,
        PivotResult::Optimal => {
            let mut solution = vec![Rational::zero(); vars];
            for (r, &col) in t.basis.iter().enumerate() {
                if col < vars {
                    solution[col] = t.rhs[r].clone();
                }
            }
            LpOutcome::Optimal {
                value: t.objective_value,
                solution,
            }
        }
    }
}
