//! No-swap-regret dynamics: each player runs one multiplicative-weights
//! learner per recommended bid and plays the stationary distribution of the
//! resulting row-stochastic matrix. The time average of the played product
//! distributions approaches the correlated-equilibrium set.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::SolveError;
use crate::rational::{rat, to_f64, Rational};
use crate::utility::win_prob_from_pairs;

use super::{ce_regret, CorrelatedDistribution, ProductComponent, TypeAgentGame};

/// Denominator of the snapped marginals.
pub const SNAP: i64 = 1_000_000;

#[derive(Debug, Clone, Copy)]
pub struct DynamicsConfig {
    pub max_rounds: u64,
    /// How often the running average is checked.
    pub check_every: u64,
    pub seed: u64,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self {
            max_rounds: 20_000,
            check_every: 500,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DynamicsResult {
    pub distribution: CorrelatedDistribution,
    pub regret: Rational,
    pub rounds: u64,
}

struct Learner {
    /// log-weights, one row per recommended action
    log_w: Vec<Vec<f64>>,
}

impl Learner {
    fn new(a: usize, rng: &mut ChaCha8Rng) -> Self {
        let log_w = (0..a)
            .map(|_| (0..a).map(|_| 1e-3 * rng.gen::<f64>()).collect())
            .collect();
        Self { log_w }
    }

    fn matrix(&self) -> Vec<Vec<f64>> {
        self.log_w
            .iter()
            .map(|row| {
                let mx = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let e: Vec<f64> = row.iter().map(|x| (x - mx).exp()).collect();
                let s: f64 = e.iter().sum();
                e.into_iter().map(|x| x / s).collect()
            })
            .collect()
    }
}

/// Stationary distribution `q = q Q` of a positive row-stochastic matrix.
fn stationary(q: &[Vec<f64>]) -> Vec<f64> {
    let a = q.len();
    // solve (Q^T - I) x = 0 with the last equation replaced by sum x = 1
    let mut m = vec![vec![0.0; a + 1]; a];
    for r in 0..a {
        for c in 0..a {
            m[r][c] = q[c][r] - if r == c { 1.0 } else { 0.0 };
        }
    }
    for c in 0..a {
        m[a - 1][c] = 1.0;
    }
    m[a - 1][a] = 1.0;
    for col in 0..a {
        let piv = (col..a)
            .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))
            .unwrap();
        m.swap(col, piv);
        let p = m[col][col];
        if p.abs() < 1e-300 {
            continue;
        }
        for c in col..=a {
            m[col][c] /= p;
        }
        for r in 0..a {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for c in col..=a {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
    }
    let x: Vec<f64> = (0..a).map(|r| m[r][a].max(0.0)).collect();
    let s: f64 = x.iter().sum();
    x.into_iter().map(|v| v / s).collect()
}

/// Float payoff table `u[player][bid]` against a product of float marginals.
fn float_payoffs(game: &TypeAgentGame<'_>, marginals: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let auction = game.auction();
    let n = auction.n();
    let na = game.num_actions();
    let bids: Vec<f64> = auction.bid_space().bids().iter().map(to_f64).collect();
    let mut offset = vec![0usize; n + 1];
    for i in 0..n {
        offset[i + 1] = offset[i] + auction.value_space(i).len();
    }
    let mut out = Vec::with_capacity(game.num_players());
    for i in 0..n {
        let tables: Vec<(Vec<f64>, Vec<f64>)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| {
                let f = auction.prior(i, j);
                let mut g = vec![0.0; na];
                for v in f.support() {
                    let fv = to_f64(f.mass(v));
                    for (b, x) in marginals[offset[j] + v].iter().enumerate() {
                        g[b] += fv * x;
                    }
                }
                let mut below = vec![0.0; na];
                for b in 1..na {
                    below[b] = below[b - 1] + g[b - 1];
                }
                (g, below)
            })
            .collect();
        let h: Vec<f64> = (0..na)
            .map(|b| {
                let pairs: Vec<(f64, f64)> = tables.iter().map(|(g, bl)| (g[b], bl[b])).collect();
                win_prob_from_pairs(&pairs)
            })
            .collect();
        for v in auction.value_space(i).values() {
            let vf = to_f64(v);
            out.push(bids.iter().zip(&h).map(|(b, hb)| (vf - b) * hb).collect());
        }
    }
    out
}

/// Rounds to multiples of `1/SNAP`, keeping the sum exactly one.
fn snap_distribution(x: &[f64]) -> Vec<i64> {
    let mut k: Vec<i64> = x.iter().map(|v| (v * SNAP as f64).round().max(0.0) as i64).collect();
    let diff = SNAP - k.iter().sum::<i64>();
    let top = (0..k.len()).max_by_key(|&i| k[i]).unwrap_or(0);
    k[top] += diff;
    if k[top] < 0 {
        // pathological rounding; fall back to a point mass
        k.iter_mut().for_each(|v| *v = 0);
        k[top] = SNAP;
    }
    k
}

/// Runs the dynamics until the exact regret of the time average is at most
/// `eps`, or `max_rounds` is reached.
pub fn solve_ce_dynamics(
    game: &TypeAgentGame<'_>,
    eps: &Rational,
    config: &DynamicsConfig,
) -> Result<DynamicsResult, SolveError> {
    let (np, na) = (game.num_players(), game.num_actions());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut learners: Vec<Learner> = (0..np).map(|_| Learner::new(na, &mut rng)).collect();
    // running (unsnapped) swap gains, to decide when to check exactly
    let mut gains = vec![vec![vec![0.0; na]; na]; np];
    let mut counts: BTreeMap<Vec<Vec<i64>>, u64> = BTreeMap::new();
    let eps_f = to_f64(eps);
    let mut best: Option<(Rational, CorrelatedDistribution)> = None;
    for t in 1..=config.max_rounds {
        let mats: Vec<Vec<Vec<f64>>> = learners.iter().map(Learner::matrix).collect();
        let q: Vec<Vec<f64>> = mats.iter().map(|m| stationary(m)).collect();
        let u = float_payoffs(game, &q);
        let eta = (8.0 * (na as f64).ln().max(1.0) / t as f64).sqrt();
        for p in 0..np {
            for s in 0..na {
                for d in 0..na {
                    gains[p][s][d] += q[p][s] * (u[p][d] - u[p][s]);
                    learners[p].log_w[s][d] += eta * q[p][s] * u[p][d];
                }
            }
        }
        *counts
            .entry(q.iter().map(|x| snap_distribution(x)).collect())
            .or_insert(0) += 1;
        if t % config.check_every == 0 || t == config.max_rounds {
            let est = gains
                .iter()
                .flatten()
                .flatten()
                .fold(0.0f64, |m, &g| m.max(g / t as f64));
            if est <= eps_f / 2.0 || t == config.max_rounds {
                let dist = averaged(&counts, t);
                let r = ce_regret(game, &dist).value;
                if &r <= eps {
                    return Ok(DynamicsResult {
                        distribution: dist,
                        regret: r,
                        rounds: t,
                    });
                }
                if best.as_ref().is_none_or(|(b, _)| &r < b) {
                    best = Some((r, dist));
                }
            }
        }
    }
    let residual = best.map_or(f64::INFINITY, |(r, _)| to_f64(&r));
    Err(SolveError::BudgetExhausted {
        work: config.max_rounds,
        best_residual: residual,
    })
}

fn averaged(counts: &BTreeMap<Vec<Vec<i64>>, u64>, t: u64) -> CorrelatedDistribution {
    let components = counts
        .iter()
        .map(|(marg, &c)| ProductComponent {
            weight: rat(c as i64, t as i64),
            marginals: marg
                .iter()
                .map(|row| row.iter().map(|&k| rat(k, SNAP)).collect())
                .collect(),
        })
        .filter(|c| !c.weight.is_zero())
        .collect();
    CorrelatedDistribution { components }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_of_two_state_chain() {
        let q = vec![vec![0.9, 0.1], vec![0.5, 0.5]];
        let x = stationary(&q);
        assert!((x[0] - 5.0 / 6.0).abs() < 1e-12);
        assert!((x[1] - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn snapping_preserves_total() {
        let k = snap_distribution(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]);
        assert_eq!(k.iter().sum::<i64>(), SNAP);
    }
}
