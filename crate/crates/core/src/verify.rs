//! Exact equilibrium verifiers. Pure deviations suffice for every notion.

use num_traits::{Signed, Zero};

use crate::auction::{AuctionInstance, MixedStrategyProfile, PureStrategyProfile};
use crate::continuous::{ContinuousAuction, StepStrategyProfile};
use crate::error::ModelError;
use crate::rational::{zero, Rational};
use crate::utility::{bid_mass, cfpa_bid_mass};

/// A violated inequality: bidder, value, the offending bid and the gap.
///
/// For PBNE/MBNE/CFPA checks `bid_index` is the profitable deviation; for
/// WSNE it is the supported bid that falls short of the best response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub bidder: usize,
    pub value_index: Option<usize>,
    pub value: Rational,
    pub bid_index: usize,
    pub gain: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub eps: Rational,
    /// Largest gap of the checked notion over all bidders and values.
    pub regret: Rational,
    /// Lexicographically first violation in `(bidder, value, bid)` order.
    pub witness: Option<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegretReport {
    pub max_regret: Rational,
    pub per_bidder: Vec<Rational>,
    /// `(bidder, value index)` attaining the maximum.
    pub argmax: Option<(usize, usize)>,
}

/// `u[value_idx][bid_idx]` for bidder `i`.
pub fn utility_grid(
    a: &AuctionInstance,
    i: usize,
    profile: &MixedStrategyProfile,
) -> Result<Vec<Vec<Rational>>, ModelError> {
    let h = bid_mass(a, i, profile)?.win_probs();
    let bids = a.bid_space().bids();
    Ok(a
        .value_space(i)
        .values()
        .iter()
        .map(|v| bids.iter().zip(&h).map(|(b, hb)| (v - b) * hb).collect())
        .collect())
}

fn best_value(row: &[Rational]) -> Rational {
    // bid 0 is always available and never negative
    row.iter().max().cloned().unwrap_or_else(zero)
}

/// All non-overbidding `eps`-best responses of bidder `i` at value index `v`.
pub fn best_responses(
    a: &AuctionInstance,
    i: usize,
    v: usize,
    profile: &MixedStrategyProfile,
    eps: &Rational,
) -> Result<Vec<usize>, ModelError> {
    let grid = utility_grid(a, i, profile)?;
    let row = &grid[v];
    let best = best_value(row);
    let value = a.value_space(i).get(v);
    Ok((0..row.len())
        .filter(|&b| a.bid_space().get(b) <= value && &row[b] + eps >= best)
        .collect())
}

struct Scan {
    regret: Rational,
    witness: Option<Violation>,
}

impl Scan {
    fn new() -> Self {
        Self {
            regret: zero(),
            witness: None,
        }
    }

    fn record(&mut self, eps: &Rational, v: Violation) {
        if v.gain > self.regret {
            self.regret = v.gain.clone();
        }
        if self.witness.is_none() && &v.gain > eps {
            self.witness = Some(v);
        }
    }

    fn finish(self, eps: &Rational) -> Verdict {
        Verdict {
            holds: self.witness.is_none(),
            eps: eps.clone(),
            regret: self.regret,
            witness: self.witness,
        }
    }
}

/// Pure deviation gains against the mixed value of each row.
fn mixed_scan(
    a: &AuctionInstance,
    profile: &MixedStrategyProfile,
    eps: &Rational,
) -> Result<Verdict, ModelError> {
    profile.check(a)?;
    let mut scan = Scan::new();
    for i in 0..a.n() {
        let grid = utility_grid(a, i, profile)?;
        for (vi, row) in grid.iter().enumerate() {
            let dist = profile.strategy(i).dist(vi);
            let current: Rational = dist
                .iter()
                .zip(row)
                .filter(|(p, _)| !p.is_zero())
                .map(|(p, u)| p * u)
                .sum();
            for (b, u) in row.iter().enumerate() {
                let gain = u - &current;
                if gain.is_positive() {
                    scan.record(
                        eps,
                        Violation {
                            bidder: i,
                            value_index: Some(vi),
                            value: a.value_space(i).get(vi).clone(),
                            bid_index: b,
                            gain,
                        },
                    );
                }
            }
        }
    }
    Ok(scan.finish(eps))
}

pub fn is_eps_pbne(
    a: &AuctionInstance,
    profile: &PureStrategyProfile,
    eps: &Rational,
) -> Result<Verdict, ModelError> {
    mixed_scan(a, &profile.to_mixed(a.bid_space().len()), eps)
}

pub fn is_eps_mbne(
    a: &AuctionInstance,
    profile: &MixedStrategyProfile,
    eps: &Rational,
) -> Result<Verdict, ModelError> {
    mixed_scan(a, profile, eps)
}

/// Every supported bid is within `eps` of the best response.
pub fn is_eps_wsne(
    a: &AuctionInstance,
    profile: &MixedStrategyProfile,
    eps: &Rational,
) -> Result<Verdict, ModelError> {
    profile.check(a)?;
    let mut scan = Scan::new();
    for i in 0..a.n() {
        let grid = utility_grid(a, i, profile)?;
        for (vi, row) in grid.iter().enumerate() {
            let best = best_value(row);
            for b in profile.strategy(i).support(vi) {
                let gain = &best - &row[b];
                if gain.is_positive() {
                    scan.record(
                        eps,
                        Violation {
                            bidder: i,
                            value_index: Some(vi),
                            value: a.value_space(i).get(vi).clone(),
                            bid_index: b,
                            gain,
                        },
                    );
                }
            }
        }
    }
    Ok(scan.finish(eps))
}

/// Supports are ordered across values: `max supp(v) <= min supp(v')` for `v < v'`.
pub fn is_monotone(profile: &MixedStrategyProfile) -> bool {
    profile.strategies().iter().all(|s| {
        let mut prev_max: Option<usize> = None;
        for vi in 0..s.num_values() {
            let supp = s.support(vi);
            let (Some(&lo), Some(&hi)) = (supp.first(), supp.last()) else {
                return false;
            };
            if prev_max.is_some_and(|p| p > lo) {
                return false;
            }
            prev_max = Some(hi);
        }
        true
    })
}

/// Largest pure-deviation gain over the mixed value, per bidder and overall.
pub fn max_regret(
    a: &AuctionInstance,
    profile: &MixedStrategyProfile,
) -> Result<RegretReport, ModelError> {
    profile.check(a)?;
    let mut per_bidder = Vec::with_capacity(a.n());
    let mut best: Option<(Rational, usize, usize)> = None;
    for i in 0..a.n() {
        let grid = utility_grid(a, i, profile)?;
        let mut bidder_max = zero();
        for (vi, row) in grid.iter().enumerate() {
            let current: Rational = profile
                .strategy(i)
                .dist(vi)
                .iter()
                .zip(row)
                .map(|(p, u)| p * u)
                .sum();
            let r = best_value(row) - current;
            if r > bidder_max {
                bidder_max = r.clone();
            }
            if best.as_ref().is_none_or(|(m, _, _)| &r > m) {
                best = Some((r, i, vi));
            }
        }
        per_bidder.push(bidder_max);
    }
    let (max_regret, argmax) = match best {
        Some((r, i, v)) => (r, Some((i, v))),
        None => (zero(), None),
    };
    Ok(RegretReport {
        max_regret,
        per_bidder,
        argmax,
    })
}

/// Exact PBNE check for step strategies in a continuous auction.
///
/// For a fixed bid the utility is affine in the value, so the deviation gain
/// on each region is convex and peaks at the region's endpoints; density
/// breakpoints inside the region are checked as well.
pub fn cfpa_verify_pbne(
    c: &ContinuousAuction,
    profile: &StepStrategyProfile,
    eps: &Rational,
) -> Result<Verdict, ModelError> {
    if profile.len() != c.n() {
        return Err(ModelError::Dimension(format!(
            "{} step strategies for {} bidders",
            profile.len(),
            c.n()
        )));
    }
    let bids = c.bid_space().bids();
    let breakpoints = c.all_breakpoints();
    let mut scan = Scan::new();
    for i in 0..c.n() {
        let s = profile.strategy(i);
        if s.num_bids() != bids.len() {
            return Err(ModelError::Dimension(format!("step strategy {i} has the wrong size")));
        }
        let h = cfpa_bid_mass(c, i, profile).win_probs();
        for l in 0..bids.len() {
            let Some((lo, hi)) = s.region(l) else { continue };
            if bids[l] > lo {
                return Err(ModelError::Step(format!("bidder {i} overbids in region {l}")));
            }
            let mut points = vec![lo.clone(), hi.clone()];
            points.extend(breakpoints.iter().filter(|x| **x > lo && **x < hi).cloned());
            points.sort();
            for v in points {
                let current = (&v - &bids[l]) * &h[l];
                for (b, (bid, hb)) in bids.iter().zip(&h).enumerate() {
                    let gain = (&v - bid) * hb - &current;
                    if gain.is_positive() {
                        scan.record(
                            eps,
                            Violation {
                                bidder: i,
                                value_index: None,
                                value: v.clone(),
                                bid_index: b,
                                gain,
                            },
                        );
                    }
                }
            }
        }
    }
    Ok(scan.finish(eps))
}
