//! Penalty minimization for the polynomial system: block-coordinate projected
//! gradient descent over the free rows, restarted from random points.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::SolveError;

use super::system::{PolySystem, RowKind};

#[derive(Debug, Clone, Copy)]
pub struct NumericBudget {
    pub starts: usize,
    pub max_iters: u64,
}

impl Default for NumericBudget {
    fn default() -> Self {
        Self {
            starts: 64,
            max_iters: 100_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NumericSolution {
    pub p: Vec<Vec<f64>>,
    pub penalty: f64,
    pub max_violation: f64,
    pub iterations: u64,
    pub start: usize,
}

/// Violations below this are treated as converged.
const TIGHT: f64 = 1e-13;
const STALL_WINDOW: u64 = 256;
const STALL_RATIO: f64 = 0.995;

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(y: &[f64]) -> Vec<f64> {
    let mut u = y.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (i, ui) in u.iter().enumerate() {
        acc += ui;
        let t = (acc - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    y.iter().map(|x| (x - theta).max(0.0)).collect()
}

enum StartOutcome {
    Solved(NumericSolution),
    Stalled(f64),
    OutOfBudget(f64),
}

fn random_point(sys: &PolySystem, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut p = sys.initial();
    for (row, kind) in p.iter_mut().zip(&sys.rows) {
        if let RowKind::Free(bs) = kind {
            let draws: Vec<f64> = bs.iter().map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
            let total: f64 = draws.iter().sum();
            for (&l, d) in bs.iter().zip(draws) {
                row[l] = d / total;
            }
        }
    }
    p
}

fn descend(sys: &PolySystem, mut p: Vec<Vec<f64>>, target: f64, max_iters: u64, start: usize) -> StartOutcome {
    let mut e = sys.evaluate(&p);
    let mut steps: Vec<f64> = vec![1.0; sys.rows.len()];
    let mut checkpoint = e.penalty;
    let mut iters = 0u64;
    let free_rows: Vec<usize> = (0..sys.rows.len())
        .filter(|&j| matches!(sys.rows[j], RowKind::Free(_)))
        .collect();
    let done = |e: &super::system::Evaluation, iters| NumericSolution {
        p: Vec::new(),
        penalty: e.penalty,
        max_violation: e.max_violation,
        iterations: iters,
        start,
    };
    loop {
        if e.max_violation <= TIGHT || free_rows.is_empty() {
            return if e.max_violation <= target {
                StartOutcome::Solved(NumericSolution { p, ..done(&e, iters) })
            } else {
                StartOutcome::Stalled(e.max_violation)
            };
        }
        if iters >= max_iters {
            return if e.max_violation <= target {
                StartOutcome::Solved(NumericSolution { p, ..done(&e, iters) })
            } else {
                StartOutcome::OutOfBudget(e.max_violation)
            };
        }
        for &j in &free_rows {
            let RowKind::Free(bs) = &sys.rows[j] else { unreachable!() };
            let grad = sys.gradient(&p, &e);
            let x: Vec<f64> = bs.iter().map(|&l| p[j][l]).collect();
            let gx: Vec<f64> = bs.iter().map(|&l| grad[j][l]).collect();
            let mut t = steps[j];
            let mut accepted = false;
            for _ in 0..50 {
                let y: Vec<f64> = x.iter().zip(&gx).map(|(a, g)| a - t * g).collect();
                let xn = project_simplex(&y);
                let decrease: f64 = x.iter().zip(&xn).zip(&gx).map(|((a, b), g)| g * (a - b)).sum();
                let mut trial = p.clone();
                for (&l, v) in bs.iter().zip(&xn) {
                    trial[j][l] = *v;
                }
                let et = sys.evaluate(&trial);
                if et.penalty <= e.penalty - 1e-4 * decrease && et.penalty < e.penalty {
                    p = trial;
                    e = et;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            steps[j] = if accepted { (t * 2.0).min(1e6) } else { 1.0 };
        }
        iters += 1;
        if iters.is_multiple_of(STALL_WINDOW) {
            if e.penalty > STALL_RATIO * checkpoint {
                return if e.max_violation <= target {
                    StartOutcome::Solved(NumericSolution { p, ..done(&e, iters) })
                } else {
                    StartOutcome::Stalled(e.max_violation)
                };
            }
            checkpoint = e.penalty;
        }
    }
}

/// Finds a point with every no-improvement violation at most `target`.
///
/// The first start is the uniform point; the rest are random. Fails with
/// `BudgetExhausted` if some start ran out of iterations, otherwise with
/// `Infeasible` (every start stalled at a positive residual).
pub fn solve_system(
    sys: &PolySystem,
    target: f64,
    budget: &NumericBudget,
    rng: &mut ChaCha8Rng,
) -> Result<NumericSolution, SolveError> {
    let mut best = f64::INFINITY;
    let mut exhausted = false;
    let mut work = 0u64;
    for start in 0..budget.starts.max(1) {
        let p0 = if start == 0 { sys.initial() } else { random_point(sys, rng) };
        match descend(sys, p0, target, budget.max_iters, start) {
            StartOutcome::Solved(s) => return Ok(s),
            StartOutcome::Stalled(r) => best = best.min(r),
            StartOutcome::OutOfBudget(r) => {
                best = best.min(r);
                exhausted = true;
            }
        }
        work += 1;
        if sys.num_free() == 0 {
            break;
        }
    }
    if exhausted {
        Err(SolveError::BudgetExhausted {
            work: work * budget.max_iters,
            best_residual: best,
        })
    } else {
        Err(SolveError::Infeasible(format!(
            "all starts stalled, smallest violation {best:e}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_projection() {
        let x = project_simplex(&[0.5, 0.5]);
        assert_eq!(x, vec![0.5, 0.5]);
        let x = project_simplex(&[2.0, 0.0, -1.0]);
        assert_eq!(x, vec![1.0, 0.0, 0.0]);
        let x = project_simplex(&[0.4, 0.4, 0.4]);
        assert!(x.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-12));
    }
}
