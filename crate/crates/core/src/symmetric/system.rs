//! The polynomial system whose solutions are symmetric equilibria with a
//! given support structure.

use num_traits::{FromPrimitive, Num};

use crate::auction::AuctionInstance;
use crate::error::SolveError;
use crate::rational::{to_f64, Rational};

use super::support::{SupportStructure, ValueSupport};

/// How a value's row of the probability matrix is determined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowKind {
    /// Probability 1 on one bid.
    Fixed(usize),
    /// Free probabilities on these (non-overbidding) bids, summing to 1.
    Free(Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct PolySystem {
    pub structure: SupportStructure,
    pub n: usize,
    pub values: Vec<Rational>,
    pub bids: Vec<Rational>,
    pub pmf: Vec<Rational>,
    pub rows: Vec<RowKind>,
    vf: Vec<f64>,
    bf: Vec<f64>,
    ff: Vec<f64>,
}

/// `W(l) = sum_r C(n-1,r) g^r G^(n-1-r) / (r+1)`, the symmetric win probability.
pub fn win_prob_binomial<T: Num + Clone + FromPrimitive>(g: &T, big: &T, n: usize) -> T {
    let mut acc = T::zero();
    let mut binom = T::one();
    for r in 0..n {
        let term = binom.clone() * pow(g, r) * pow(big, n - 1 - r)
            / T::from_usize(r + 1).expect("small integer");
        acc = acc + term;
        binom = binom * T::from_usize(n - 1 - r).unwrap() / T::from_usize(r + 1).unwrap();
    }
    acc
}

/// Telescoped form `(1/n) sum_r G_{l+1}^r G_l^(n-1-r)` of the same quantity.
pub fn win_prob_telescoped<T: Num + Clone + FromPrimitive>(big: &T, big_next: &T, n: usize) -> T {
    let mut acc = T::zero();
    for r in 0..n {
        acc = acc + pow(big_next, r) * pow(big, n - 1 - r);
    }
    acc / T::from_usize(n).expect("small integer")
}

fn pow<T: Num + Clone>(x: &T, e: usize) -> T {
    (0..e).fold(T::one(), |acc, _| acc * x.clone())
}

/// Builds the system for an iid instance under structure `xi`.
///
/// Structures that force an overbid are rejected as infeasible here.
pub fn build_system(a: &AuctionInstance, xi: &SupportStructure) -> Result<PolySystem, SolveError> {
    let (vs, f) = a
        .iid_parts()
        .ok_or_else(|| SolveError::Precondition("instance is not iid".into()))?;
    let bids = a.bid_space().bids().to_vec();
    if xi.k() != vs.len() || xi.m() != bids.len() {
        return Err(SolveError::Precondition("structure does not match the instance".into()));
    }
    let mut rows = Vec::with_capacity(vs.len());
    for (j, v) in vs.values().iter().enumerate() {
        match xi.support(j) {
            ValueSupport::Pure(l) => {
                if &bids[l] > v {
                    return Err(SolveError::Infeasible(format!("value {j} is forced to overbid")));
                }
                rows.push(RowKind::Fixed(l));
            }
            ValueSupport::Mixed { lo, hi } => {
                let allowed: Vec<usize> = (lo..=hi).filter(|&l| &bids[l] <= v).collect();
                match allowed.len() {
                    0 => return Err(SolveError::Infeasible(format!("value {j} has no affordable bid"))),
                    1 => rows.push(RowKind::Fixed(allowed[0])),
                    _ => rows.push(RowKind::Free(allowed)),
                }
            }
        }
    }
    Ok(PolySystem {
        structure: xi.clone(),
        n: a.n(),
        vf: vs.values().iter().map(to_f64).collect(),
        bf: bids.iter().map(to_f64).collect(),
        ff: f.masses().iter().map(to_f64).collect(),
        values: vs.values().to_vec(),
        bids,
        pmf: f.masses().to_vec(),
        rows,
    })
}

/// Intermediate quantities of one evaluation.
pub struct Evaluation {
    /// `G_l` for `l = 0..=m`.
    pub below: Vec<f64>,
    /// `u[j][l]`.
    pub utility: Vec<Vec<f64>>,
    /// `c[j][l] = u[j][l] - sum_l' p[j][l'] u[j][l']`.
    pub gap: Vec<Vec<f64>>,
    pub penalty: f64,
    pub max_violation: f64,
}

impl PolySystem {
    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn m(&self) -> usize {
        self.bids.len()
    }

    pub fn num_free(&self) -> usize {
        self.rows
            .iter()
            .map(|r| match r {
                RowKind::Free(b) => b.len(),
                RowKind::Fixed(_) => 0,
            })
            .sum()
    }

    /// Probability matrix with fixed rows filled and free rows uniform.
    pub fn initial(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| {
                let mut row = vec![0.0; self.m()];
                match r {
                    RowKind::Fixed(l) => row[*l] = 1.0,
                    RowKind::Free(bs) => {
                        for &l in bs {
                            row[l] = 1.0 / bs.len() as f64;
                        }
                    }
                }
                row
            })
            .collect()
    }

    pub fn evaluate(&self, p: &[Vec<f64>]) -> Evaluation {
        let (k, m, n) = (self.k(), self.m(), self.n);
        let mut below = vec![0.0; m + 1];
        for l in 0..m {
            let g: f64 = (0..k).map(|j| p[j][l] * self.ff[j]).sum();
            below[l + 1] = below[l] + g;
        }
        let w: Vec<f64> = (0..m)
            .map(|l| win_prob_telescoped(&below[l], &below[l + 1], n))
            .collect();
        let utility: Vec<Vec<f64>> = (0..k)
            .map(|j| (0..m).map(|l| (self.vf[j] - self.bf[l]) * w[l]).collect())
            .collect();
        let mut penalty = 0.0;
        let mut max_violation: f64 = 0.0;
        let gap: Vec<Vec<f64>> = (0..k)
            .map(|j| {
                let cur: f64 = (0..m).map(|l| p[j][l] * utility[j][l]).sum();
                (0..m)
                    .map(|l| {
                        let c = utility[j][l] - cur;
                        if c > 0.0 {
                            penalty += c * c;
                            max_violation = max_violation.max(c);
                        }
                        c
                    })
                    .collect()
            })
            .collect();
        Evaluation {
            below,
            utility,
            gap,
            penalty,
            max_violation,
        }
    }

    /// Gradient of the penalty with respect to every entry of `p`.
    pub fn gradient(&self, p: &[Vec<f64>], e: &Evaluation) -> Vec<Vec<f64>> {
        let (k, m, n) = (self.k(), self.m(), self.n);
        let nf = n as f64;
        let pos: Vec<Vec<f64>> = e
            .gap
            .iter()
            .map(|row| row.iter().map(|&c| 2.0 * c.max(0.0)).collect())
            .collect();
        let pos_sum: Vec<f64> = pos.iter().map(|r| r.iter().sum()).collect();
        // dPhi/dW_l
        let mut d_w = vec![0.0; m];
        for j in 0..k {
            for l in 0..m {
                let d_u = pos[j][l] - p[j][l] * pos_sum[j];
                d_w[l] += d_u * (self.vf[j] - self.bf[l]);
            }
        }
        // dPhi/dG_mu for mu = 0..=m
        let mut d_big = vec![0.0; m + 1];
        for l in 0..m {
            let (b, a) = (e.below[l], e.below[l + 1]);
            let mut d_a = 0.0;
            let mut d_b = 0.0;
            for r in 0..n {
                let s = n - 1 - r;
                if r > 0 {
                    d_a += r as f64 * a.powi(r as i32 - 1) * b.powi(s as i32);
                }
                if s > 0 {
                    d_b += s as f64 * a.powi(r as i32) * b.powi(s as i32 - 1);
                }
            }
            d_big[l + 1] += d_w[l] * d_a / nf;
            d_big[l] += d_w[l] * d_b / nf;
        }
        // G_mu = sum_{l < mu} g_l, so dPhi/dg_l = sum_{mu > l} dPhi/dG_mu
        let mut d_g = vec![0.0; m];
        let mut acc = 0.0;
        for l in (0..m).rev() {
            acc += d_big[l + 1];
            d_g[l] = acc;
        }
        (0..k)
            .map(|j| {
                (0..m)
                    .map(|l| self.ff[j] * d_g[l] - e.utility[j][l] * pos_sum[j])
                    .collect()
            })
            .collect()
    }
}
