//! Thin linear-programming facade over `minilp`.
//!
//! Every LP in the crate goes through [`LinearProgram`], so the solver can be
//! swapped without touching the geometric predicates built on top of it.

use minilp::{ComparisonOp, OptimizationDirection, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, x: Vec<f64> },
    Infeasible,
    Unbounded,
}

/// `maximize objective·x` subject to linear rows and per-variable bounds.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    objective: Vec<f64>,
    bounds: Vec<(f64, f64)>,
    rows: Vec<(Vec<f64>, Relation, f64)>,
}

impl LinearProgram {
    /// All variables start free.
    pub fn maximize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            bounds: vec![(f64::NEG_INFINITY, f64::INFINITY); n],
            rows: Vec::new(),
        }
    }

    pub fn bound(&mut self, var: usize, lo: f64, hi: f64) -> &mut Self {
        self.bounds[var] = (lo, hi);
        self
    }

    pub fn row(&mut self, coeffs: Vec<f64>, rel: Relation, rhs: f64) -> &mut Self {
        debug_assert_eq!(coeffs.len(), self.objective.len());
        self.rows.push((coeffs, rel, rhs));
        self
    }

    pub fn solve(&self) -> LpOutcome {
        let mut p = Problem::new(OptimizationDirection::Maximize);
        let vars: Vec<_> = self
            .objective
            .iter()
            .zip(&self.bounds)
            .map(|(c, b)| p.add_var(*c, *b))
            .collect();
        for (coeffs, rel, rhs) in &self.rows {
            let expr: Vec<_> = coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(j, c)| (vars[j], *c))
                .collect();
            let op = match rel {
                Relation::Le => ComparisonOp::Le,
                Relation::Eq => ComparisonOp::Eq,
                Relation::Ge => ComparisonOp::Ge,
            };
            p.add_constraint(expr.as_slice(), op, *rhs);
        }
        match p.solve() {
            // minilp occasionally reports an unbounded ray as an infinite optimum
            Ok(sol) if !sol.objective().is_finite() => LpOutcome::Unbounded,
            Ok(sol) => LpOutcome::Optimal {
                value: sol.objective(),
                x: vars.iter().map(|v| sol[*v]).collect(),
            },
            Err(minilp::Error::Infeasible) => LpOutcome::Infeasible,
            Err(minilp::Error::Unbounded) => LpOutcome::Unbounded,
        }
    }
}
