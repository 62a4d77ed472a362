//! Correlated equilibria of the type-agent game: one player per
//! (bidder, value) pair, each choosing a bid.
//!
//! The regret of a correlated distribution is the largest expected gain,
//! over players and swaps `s -> s'`, from playing `s'` whenever `s` is
//! recommended (weighted by the probability of that recommendation).

pub mod dynamics;
pub mod simplex;

use num_traits::{Signed, Zero};

use crate::auction::{AuctionInstance, MixedStrategy, MixedStrategyProfile};
use crate::error::SolveError;
use crate::rational::{one, zero, Pq, Rational};
use crate::utility::bid_mass;

pub use dynamics::{solve_ce_dynamics, DynamicsConfig, DynamicsResult};
use simplex::{LinearProgram, LpOutcome};

/// Outcome-count guard for the explicit linear program.
pub const LP_OUTCOME_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone)]
pub struct TypeAgentGame<'a> {
    auction: &'a AuctionInstance,
    players: Vec<(usize, usize)>,
}

impl<'a> TypeAgentGame<'a> {
    pub fn new(auction: &'a AuctionInstance) -> Self {
        let players = (0..auction.n())
            .flat_map(|i| (0..auction.value_space(i).len()).map(move |v| (i, v)))
            .collect();
        Self { auction, players }
    }

    pub fn auction(&self) -> &AuctionInstance {
        self.auction
    }

    /// `(bidder, value index)` of each player, bidder-major.
    pub fn players(&self) -> &[(usize, usize)] {
        &self.players
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn num_actions(&self) -> usize {
        self.auction.bid_space().len()
    }

    /// Reassembles per-player bid distributions into an auction profile.
    /// Overbidding rows are allowed here.
    pub fn profile_from_marginals(&self, marginals: &[Vec<Rational>]) -> MixedStrategyProfile {
        let mut rows: Vec<Vec<Vec<Rational>>> = (0..self.auction.n()).map(|_| Vec::new()).collect();
        for (&(i, _), x) in self.players.iter().zip(marginals) {
            rows[i].push(x.clone());
        }
        MixedStrategyProfile::new(rows.into_iter().map(MixedStrategy::from_table).collect())
    }

    fn point_marginals(&self, outcome: &[usize]) -> Vec<Vec<Rational>> {
        let a = self.num_actions();
        outcome
            .iter()
            .map(|&b| {
                let mut row = vec![zero(); a];
                row[b] = one();
                row
            })
            .collect()
    }

    /// Payoff table `u[player][bid]` against a product of marginals.
    pub fn payoffs_against(&self, marginals: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
        let profile = self.profile_from_marginals(marginals);
        let bids = self.auction.bid_space().bids();
        let mut out = vec![Vec::new(); self.num_players()];
        let mut p = 0;
        for i in 0..self.auction.n() {
            let h = bid_mass(self.auction, i, &profile)
                .expect("marginals have the auction's shape")
                .win_probs();
            for v in self.auction.value_space(i).values() {
                out[p] = bids.iter().zip(&h).map(|(b, hb)| (v - b) * hb).collect();
                p += 1;
            }
        }
        out
    }

    /// Payoff of every player at a pure outcome.
    pub fn payoff(&self, outcome: &[usize]) -> Vec<Rational> {
        let table = self.payoffs_against(&self.point_marginals(outcome));
        table.into_iter().zip(outcome).map(|(row, &b)| row[b].clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductComponent {
    pub weight: Rational,
    /// One bid distribution per player.
    pub marginals: Vec<Vec<Rational>>,
}

/// A finite mixture of product distributions over outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelatedDistribution {
    pub components: Vec<ProductComponent>,
}

impl CorrelatedDistribution {
    /// The product distribution induced by a mixed profile.
    pub fn from_profile(game: &TypeAgentGame<'_>, profile: &MixedStrategyProfile) -> Self {
        let marginals = game
            .players()
            .iter()
            .map(|&(i, v)| profile.strategy(i).dist(v).to_vec())
            .collect();
        Self {
            components: vec![ProductComponent {
                weight: one(),
                marginals,
            }],
        }
    }

    /// Point masses on pure outcomes.
    pub fn from_outcomes(game: &TypeAgentGame<'_>, outcomes: &[(Rational, Vec<usize>)]) -> Self {
        Self {
            components: outcomes
                .iter()
                .map(|(w, s)| ProductComponent {
                    weight: w.clone(),
                    marginals: game.point_marginals(s),
                })
                .collect(),
        }
    }

    pub fn check(&self, game: &TypeAgentGame<'_>) -> Result<(), SolveError> {
        let bad = |m: String| Err(SolveError::Precondition(m));
        let total: Rational = self.components.iter().map(|c| &c.weight).sum();
        if total != one() || self.components.iter().any(|c| c.weight.is_negative()) {
            return bad(format!("component weights sum to {}", Pq(&total)));
        }
        for c in &self.components {
            if c.marginals.len() != game.num_players() {
                return bad("marginal count differs from the player count".into());
            }
            for x in &c.marginals {
                if x.len() != game.num_actions()
                    || x.iter().any(|p| p.is_negative())
                    || x.iter().sum::<Rational>() != one()
                {
                    return bad("a marginal is not a distribution".into());
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CeRegret {
    pub value: Rational,
    /// `(player, recommended bid, deviation bid)` attaining the value.
    pub witness: Option<(usize, usize, usize)>,
}

/// Exact swap gains `gain[player][s][s']` of a correlated distribution.
pub fn swap_gains(game: &TypeAgentGame<'_>, dist: &CorrelatedDistribution) -> Vec<Vec<Vec<Rational>>> {
    let a = game.num_actions();
    let mut gain = vec![vec![vec![zero(); a]; a]; game.num_players()];
    for c in &dist.components {
        if c.weight.is_zero() {
            continue;
        }
        let u = game.payoffs_against(&c.marginals);
        for (p, x) in c.marginals.iter().enumerate() {
            for (s, xs) in x.iter().enumerate() {
                if xs.is_zero() {
                    continue;
                }
                let w = &c.weight * xs;
                for t in 0..a {
                    if t != s {
                        gain[p][s][t] += &w * (&u[p][t] - &u[p][s]);
                    }
                }
            }
        }
    }
    gain
}

pub fn ce_regret(game: &TypeAgentGame<'_>, dist: &CorrelatedDistribution) -> CeRegret {
    let mut best = CeRegret {
        value: zero(),
        witness: None,
    };
    for (p, g) in swap_gains(game, dist).into_iter().enumerate() {
        for (s, row) in g.into_iter().enumerate() {
            for (t, x) in row.into_iter().enumerate() {
                if x > best.value {
                    best = CeRegret {
                        value: x,
                        witness: Some((p, s, t)),
                    };
                }
            }
        }
    }
    best
}

fn decode(mut idx: usize, players: usize, actions: usize) -> Vec<usize> {
    let mut s = vec![0; players];
    for x in s.iter_mut().rev() {
        *x = idx % actions;
        idx /= actions;
    }
    s
}

/// A welfare-maximizing vertex of the correlated-equilibrium polytope,
/// found by exact simplex over the explicit joint distribution.
pub fn solve_ce_lp(game: &TypeAgentGame<'_>) -> Result<CorrelatedDistribution, SolveError> {
    let (np, na) = (game.num_players(), game.num_actions());
    let count = (na as u128).checked_pow(np as u32).unwrap_or(u128::MAX);
    if count > LP_OUTCOME_LIMIT {
        return Err(SolveError::TooLarge(format!(
            "{count} joint outcomes exceed the limit of {LP_OUTCOME_LIMIT}"
        )));
    }
    let count = count as usize;
    let payoffs: Vec<Vec<Rational>> = (0..count).map(|o| game.payoff(&decode(o, np, na))).collect();
    let stride: Vec<usize> = (0..np).map(|p| na.pow((np - 1 - p) as u32)).collect();
    let mut lp = LinearProgram {
        objective: payoffs.iter().map(|u| u.iter().sum()).collect(),
        eq: vec![vec![one(); count]],
        eq_rhs: vec![one()],
        ..Default::default()
    };
    for p in 0..np {
        for s in 0..na {
            for t in (0..na).filter(|&t| t != s) {
                let mut row = vec![zero(); count];
                for (o, u) in payoffs.iter().enumerate() {
                    if (o / stride[p]) % na == s {
                        let dev = o + t * stride[p] - s * stride[p];
                        row[o] = &payoffs[dev][p] - &u[p];
                    }
                }
                lp.ub.push(row);
                lp.ub_rhs.push(zero());
            }
        }
    }
    match lp.solve() {
        LpOutcome::Optimal { x, .. } => {
            let outcomes: Vec<(Rational, Vec<usize>)> = x
                .into_iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .map(|(o, w)| (w, decode(o, np, na)))
                .collect();
            Ok(CorrelatedDistribution::from_outcomes(game, &outcomes))
        }
        LpOutcome::Infeasible => Err(SolveError::Infeasible("correlated equilibrium LP".into())),
        LpOutcome::Unbounded => Err(SolveError::Infeasible("correlated equilibrium LP is unbounded".into())),
    }
}
