//! Dense two-phase simplex over exact rationals with Bland's rule.

use num_traits::{Signed, Zero};

use crate::rational::{one, zero, Rational};

/// `maximize c.x` subject to `ub.x <= ub_rhs`, `eq.x = eq_rhs`, `x >= 0`.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub ub: Vec<Vec<Rational>>,
    pub ub_rhs: Vec<Rational>,
    pub eq: Vec<Vec<Rational>>,
    pub eq_rhs: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// rows[r] = [coefficients..., rhs]
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            *x = &*x / &p;
        }
        let pivot_row = self.rows[r].clone();
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost.x` over the current tableau, restricted to `allowed` columns.
    fn optimize(&mut self, cost: &[Rational], allowed: &dyn Fn(usize) -> bool) -> bool {
        loop {
            // reduced cost: c_j - c_B B^-1 A_j
            let entering = (0..self.cols).filter(|&c| allowed(c)).find(|&c| {
                if self.basis.contains(&c) {
                    return false;
                }
                let mut red = cost[c].clone();
                for (r, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.rows[r][c].is_zero() {
                        red -= &cost[b] * &self.rows[r][c];
                    }
                }
                red.is_positive()
            });
            let Some(c) = entering else { return true };
            let mut leave: Option<(usize, Rational)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[self.cols] / &row[c];
                    let better = match &leave {
                        None => true,
                        Some((lr, best)) => ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr]),
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

impl LinearProgram {
    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn solve(&self) -> LpOutcome {
        let nv = self.num_vars();
        let nu = self.ub.len();
        let ne = self.eq.len();
        // columns: x (nv), slacks (nu), artificials (one per row)
        let rows_total = nu + ne;
        let art0 = nv + nu;
        let cols = art0 + rows_total;
        let mut rows = Vec::with_capacity(rows_total);
        for (r, (a, b)) in self.ub.iter().zip(&self.ub_rhs).chain(self.eq.iter().zip(&self.eq_rhs)).enumerate() {
            let mut row = vec![zero(); cols + 1];
            let flip = b.is_negative();
            for (c, x) in a.iter().enumerate() {
                row[c] = if flip { -x.clone() } else { x.clone() };
            }
            if r < nu {
                row[nv + r] = if flip { -one() } else { one() };
            }
            row[art0 + r] = one();
            row[cols] = b.abs();
            rows.push(row);
        }
        let mut t = Tableau {
            rows,
            basis: (art0..art0 + rows_total).collect(),
            cols,
        };
        // phase 1: maximize -(sum of artificials)
        let mut phase1 = vec![zero(); cols];
        for c in phase1.iter_mut().skip(art0) {
            *c = -one();
        }
        t.optimize(&phase1, &|_| true);
        let infeas: Rational = t
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= art0)
            .map(|(r, _)| t.rows[r][cols].clone())
            .sum();
        if infeas.is_positive() {
            return LpOutcome::Infeasible;
        }
        // drive remaining (zero-valued) artificials out of the basis
        for r in 0..rows_total {
            if t.basis[r] >= art0 {
                if let Some(c) = (0..art0).find(|&c| !t.rows[r][c].is_zero()) {
                    t.pivot(r, c);
                }
            }
        }
        let mut cost = vec![zero(); cols];
        cost[..nv].clone_from_slice(&self.objective);
        let bounded = t.optimize(&cost, &|c| c < art0);
        if !bounded {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![zero(); nv];
        for (r, &b) in t.basis.iter().enumerate() {
            if b < nv {
                x[b] = t.rows[r][cols].clone();
            }
        }
        let value = x.iter().zip(&self.objective).map(|(a, b)| a * b).sum();
        LpOutcome::Optimal { x, value }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn r(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn textbook_lp() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let lp = LinearProgram {
            objective: r(&[3, 5]),
            ub: vec![r(&[1, 0]), r(&[0, 2]), r(&[3, 2])],
            ub_rhs: r(&[4, 12, 18]),
            ..Default::default()
        };
        assert_eq!(
            lp.solve(),
            LpOutcome::Optimal {
                x: r(&[2, 6]),
                value: int(36)
            }
        );
    }

    #[test]
    fn equality_and_infeasibility() {
        let lp = LinearProgram {
            objective: r(&[1, 1]),
            eq: vec![r(&[1, 1])],
            eq_rhs: vec![one()],
            ub: vec![r(&[1, -1])],
            ub_rhs: vec![rat(-1, 2)],
        };
        let LpOutcome::Optimal { x, value } = lp.solve() else { panic!() };
        assert_eq!(value, one());
        assert!(&x[0] - &x[1] <= rat(-1, 2));
        let bad = LinearProgram {
            objective: r(&[1]),
            eq: vec![r(&[1])],
            eq_rhs: vec![one()],
            ub: vec![r(&[1])],
            ub_rhs: vec![rat(1, 2)],
        };
        assert_eq!(bad.solve(), LpOutcome::Infeasible);
        let unb = LinearProgram {
            objective: r(&[1]),
            ..Default::default()
        };
        assert_eq!(unb.solve(), LpOutcome::Unbounded);
    }
}
