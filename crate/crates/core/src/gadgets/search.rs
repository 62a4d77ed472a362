//! Exhaustive search for pure eps-PBNE.
//!
//! Bids that are never an eps-best response are removed first (iterated,
//! over the remaining opponent strategies), then profiles are enumerated by
//! backtracking in lexicographic order. A bidder is checked as soon as it
//! and every opponent it cares about have been assigned.

use std::collections::BTreeSet;

use num_traits::Zero;
use rayon::prelude::*;

use crate::auction::{AuctionInstance, PureStrategyProfile};
use crate::error::GadgetError;
use crate::rational::{one, zero, Rational};
use crate::utility::BidMassTable;

/// Limit on the number of profiles left after pruning.
pub const SEARCH_LIMIT: u128 = 1_000_000_000;
/// Limit on opponent combinations examined per elimination step.
const ELIMINATION_LIMIT: u128 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    /// First eps-PBNE in lexicographic order, if any.
    pub profile: Option<PureStrategyProfile>,
    /// Profile count after pruning.
    pub search_space: u128,
    /// Bids removed by elimination, summed over bidders and values.
    pub eliminated: usize,
}

struct Problem<'a> {
    a: &'a AuctionInstance,
    eps: &'a Rational,
    /// `allowed[i][v]`: bids still in play for bidder `i` at value `v`.
    allowed: Vec<Vec<Vec<usize>>>,
    relevant: Vec<Vec<usize>>,
}

/// Bid distribution of `j` as seen by `i` when `j` plays pure strategy `s`.
fn pushforward(a: &AuctionInstance, i: usize, j: usize, s: &[usize]) -> Vec<Rational> {
    let f = a.prior(i, j);
    let mut g = vec![zero(); a.bid_space().len()];
    for v in f.support() {
        g[s[v]] += f.mass(v);
    }
    g
}

/// Bids for bidder `i` at value `v` that are eps-best against the given
/// opponent distributions (non-relevant opponents bid 0).
fn eps_best(p: &Problem<'_>, i: usize, v: usize, masses: &[Option<Vec<Rational>>]) -> Vec<bool> {
    let m = p.a.bid_space().len();
    let mut exact = masses.to_vec();
    for (j, row) in exact.iter_mut().enumerate() {
        if j != i && row.is_none() {
            let mut g = vec![zero(); m];
            g[0] = one();
            *row = Some(g);
        }
    }
    let h = BidMassTable::from_distributions(i, exact).win_probs();
    let value = p.a.value_space(i).get(v);
    let u: Vec<Rational> = p
        .a
        .bid_space()
        .bids()
        .iter()
        .zip(&h)
        .map(|(b, hb)| (value - b) * hb)
        .collect();
    let best = u.iter().max().cloned().unwrap_or_else(zero);
    u.iter().map(|x| x + p.eps >= best).collect()
}

impl Problem<'_> {
    /// Distinct bid tuples of `j` on the support of `i`'s prior about `j`.
    fn projected(&self, i: usize, j: usize) -> Vec<Vec<usize>> {
        let f = self.a.prior(i, j);
        let k = self.a.value_space(j).len();
        let support: Vec<usize> = f.support().collect();
        let mut out = BTreeSet::new();
        let mut stack = vec![vec![0usize; k]];
        for &v in &support {
            let mut next = Vec::new();
            for s in &stack {
                for &b in &self.allowed[j][v] {
                    let mut t = s.clone();
                    t[v] = b;
                    next.push(t);
                }
            }
            stack = next;
        }
        out.extend(stack);
        out.into_iter().collect()
    }

    /// One elimination sweep; returns the number of removed bids.
    fn eliminate_once(&mut self) -> usize {
        let n = self.a.n();
        let mut removed = 0;
        for i in 0..n {
            let opps: Vec<(usize, Vec<Vec<usize>>)> =
                self.relevant[i].iter().map(|&j| (j, self.projected(i, j))).collect();
            let combos = opps
                .iter()
                .try_fold(1u128, |acc, (_, s)| acc.checked_mul(s.len() as u128))
                .unwrap_or(u128::MAX);
            if combos > ELIMINATION_LIMIT || combos == 0 {
                continue;
            }
            let k = self.a.value_space(i).len();
            let mut keep = vec![vec![false; self.a.bid_space().len()]; k];
            let mut idx = vec![0usize; opps.len()];
            loop {
                let mut masses: Vec<Option<Vec<Rational>>> = vec![None; n];
                for ((j, strategies), &x) in opps.iter().zip(&idx) {
                    masses[*j] = Some(pushforward(self.a, i, *j, &strategies[x]));
                }
                for (v, kv) in keep.iter_mut().enumerate() {
                    for (b, ok) in eps_best(self, i, v, &masses).into_iter().enumerate() {
                        kv[b] |= ok;
                    }
                }
                if !advance(&mut idx, |p| opps[p].1.len()) {
                    break;
                }
            }
            for (v, kv) in keep.iter().enumerate() {
                let before = self.allowed[i][v].len();
                self.allowed[i][v].retain(|&b| kv[b]);
                removed += before - self.allowed[i][v].len();
            }
        }
        removed
    }

    fn strategies(&self, i: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for bids in &self.allowed[i] {
            out = out
                .into_iter()
                .flat_map(|s| {
                    bids.iter().map(move |&b| {
                        let mut t = s.clone();
                        t.push(b);
                        t
                    })
                })
                .collect();
        }
        out
    }

    /// Whether bidder `i` eps-best responds in the (partial) assignment.
    fn satisfied(&self, i: usize, assigned: &[Vec<usize>]) -> bool {
        let mut masses: Vec<Option<Vec<Rational>>> = vec![None; self.a.n()];
        for &j in &self.relevant[i] {
            masses[j] = Some(pushforward(self.a, i, j, &assigned[j]));
        }
        (0..self.a.value_space(i).len()).all(|v| eps_best(self, i, v, &masses)[assigned[i][v]])
    }
}

struct Backtrack<'a> {
    problem: &'a Problem<'a>,
    strategies: Vec<Vec<Vec<usize>>>,
    /// Bidders whose check becomes possible once bidder `k` is assigned.
    checks: Vec<Vec<usize>>,
}

impl Backtrack<'_> {
    fn run(&self, k: usize, assigned: &mut Vec<Vec<usize>>) -> bool {
        if k == self.strategies.len() {
            return true;
        }
        for s in &self.strategies[k] {
            assigned.push(s.clone());
            if self.checks[k].iter().all(|&i| self.problem.satisfied(i, assigned))
                && self.run(k + 1, assigned)
            {
                return true;
            }
            assigned.pop();
        }
        false
    }
}

/// Odometer step; false once every combination has been visited.
fn advance(idx: &mut [usize], size: impl Fn(usize) -> usize) -> bool {
    for pos in (0..idx.len()).rev() {
        idx[pos] += 1;
        if idx[pos] < size(pos) {
            return true;
        }
        idx[pos] = 0;
    }
    false
}

/// First pure eps-PBNE in lexicographic order of `(bidder, value)` bids.
pub fn brute_force_pure_search(a: &AuctionInstance, eps: &Rational) -> Result<SearchOutcome, GadgetError> {
    let n = a.n();
    let allowed = (0..n)
        .map(|i| {
            a.value_space(i)
                .values()
                .iter()
                .map(|v| (0..a.bid_space().len()).filter(|&b| a.bid_space().get(b) <= v).collect())
                .collect()
        })
        .collect();
    let relevant = (0..n).map(|i| a.relevant_opponents(i)).collect();
    let mut problem = Problem {
        a,
        eps,
        allowed,
        relevant,
    };
    let mut eliminated = 0;
    loop {
        let r = problem.eliminate_once();
        eliminated += r;
        if r == 0 {
            break;
        }
    }
    let strategies: Vec<Vec<Vec<usize>>> = (0..n).map(|i| problem.strategies(i)).collect();
    let space = strategies
        .iter()
        .try_fold(1u128, |acc, s| acc.checked_mul(s.len() as u128))
        .unwrap_or(u128::MAX);
    if space > SEARCH_LIMIT {
        return Err(GadgetError::TooLarge(space));
    }
    if space.is_zero() {
        return Ok(SearchOutcome {
            profile: None,
            search_space: 0,
            eliminated,
        });
    }
    let mut checks = vec![Vec::new(); n];
    for i in 0..n {
        let last = problem.relevant[i].iter().copied().chain([i]).max().unwrap_or(i);
        checks[last].push(i);
    }
    let bt = Backtrack {
        problem: &problem,
        strategies,
        checks,
    };
    let found = bt.strategies[0].par_iter().find_map_first(|s0| {
        let mut assigned = vec![s0.clone()];
        let ok0 = bt.checks[0].iter().all(|&i| problem.satisfied(i, &assigned));
        (ok0 && bt.run(1, &mut assigned)).then_some(assigned)
    });
    Ok(SearchOutcome {
        profile: found.map(PureStrategyProfile::new),
        search_space: space,
        eliminated,
    })
}
