//! Equilibrium-preserving transforms: WSNE filtering, bid-space shrinking,
//! and the two discretization maps between discrete and continuous auctions.

use num_traits::{Signed, Zero};

use crate::auction::{AuctionInstance, BidSpace, MixedStrategy, MixedStrategyProfile, PriorPmf, ValueSpace};
use crate::continuous::{ContinuousAuction, PiecewiseConstantDensity, StepStrategy, StepStrategyProfile};
use crate::error::TransformError;
use crate::rational::{ceil_to_u64, int, one, rat, sqrt_upper, zero, Pq, Rational};
use crate::verify::{is_eps_mbne, is_monotone, utility_grid};

/// Relative precision of the rational square-root over-approximation.
pub const SQRT_SCALE: u64 = 10_000_000_000;

#[derive(Debug, Clone)]
pub struct WsneResult {
    pub profile: MixedStrategyProfile,
    /// The filtering threshold actually used (an upper bound on `sqrt(2 d delta)`).
    pub gamma: Rational,
    /// Guaranteed WSNE level `gamma + 2 d delta / gamma` (0 when `delta = 0`).
    pub eps: Rational,
}

/// Drops bids more than `gamma` below the best response and renormalizes.
///
/// The input must be a `delta`-MBNE, `d` at least the interaction degree
/// and `delta <= 1/(8d)`.
pub fn ne_to_wsne(
    a: &AuctionInstance,
    profile: &MixedStrategyProfile,
    delta: &Rational,
    d: usize,
) -> Result<WsneResult, TransformError> {
    let pre = |m: String| Err(TransformError::Precondition(m));
    if delta.is_negative() {
        return pre("delta must be nonnegative".into());
    }
    let degree = a.interaction_degree();
    if d < degree {
        return pre(format!("d = {d} is below the interaction degree {degree}"));
    }
    let d_r = int(d as i64);
    if delta > &(one() / (int(8) * &d_r)) {
        return pre(format!("delta = {} exceeds 1/(8d)", Pq(delta)));
    }
    let check = is_eps_mbne(a, profile, delta)?;
    if !check.holds {
        return pre(format!(
            "profile is not a {}-MBNE (regret {})",
            Pq(delta),
            Pq(&check.regret)
        ));
    }
    let two_d_delta = int(2) * &d_r * delta;
    let gamma = sqrt_upper(&two_d_delta, SQRT_SCALE);
    let eps = if gamma.is_zero() {
        zero()
    } else {
        &gamma + &two_d_delta / &gamma
    };
    let mut strategies = Vec::with_capacity(a.n());
    for i in 0..a.n() {
        let grid = utility_grid(a, i, profile)?;
        let s = profile.strategy(i);
        let mut rows = Vec::with_capacity(grid.len());
        for (vi, row) in grid.iter().enumerate() {
            let best = row.iter().max().cloned().unwrap_or_else(zero);
            let cutoff = &best - &gamma;
            let mut kept: Vec<Rational> = s
                .dist(vi)
                .iter()
                .zip(row)
                .map(|(p, u)| if u >= &cutoff { p.clone() } else { zero() })
                .collect();
            let total: Rational = kept.iter().sum();
            if total.is_zero() {
                return pre(format!("no mass survives for bidder {i} at value index {vi}"));
            }
            for p in kept.iter_mut() {
                *p = &*p / &total;
            }
            rows.push(kept);
        }
        strategies.push(MixedStrategy::from_table(rows));
    }
    Ok(WsneResult {
        profile: MixedStrategyProfile::new(strategies),
        gamma,
        eps,
    })
}

#[derive(Debug, Clone)]
pub struct ShrinkResult {
    pub bids: BidSpace,
    pub m: u64,
    /// Index in the original bid space of each kept bid.
    pub kept: Vec<usize>,
}

impl ShrinkResult {
    /// An `eps`-MBNE on the shrunk space is this good on the original.
    pub fn guarantee(&self, eps: &Rational) -> Rational {
        eps + rat(1, self.m as i64)
    }

    /// Lifts a profile on the shrunk space to the original bid space.
    pub fn embed(&self, profile: &MixedStrategyProfile, original: &BidSpace) -> MixedStrategyProfile {
        let strategies = profile
            .strategies()
            .iter()
            .map(|s| {
                let rows = s
                    .dists()
                    .iter()
                    .map(|row| {
                        let mut full = vec![zero(); original.len()];
                        for (p, &k) in row.iter().zip(&self.kept) {
                            full[k] = p.clone();
                        }
                        full
                    })
                    .collect();
                MixedStrategy::from_table(rows)
            })
            .collect();
        MixedStrategyProfile::new(strategies)
    }
}

/// Keeps the null bid and the largest bid of each `[l/M, (l+1)/M]` window.
///
/// Every original bid `b` then has a kept bid in `[b, b + 1/M]`, which wins
/// at least as often. Keeping the smallest bid instead would not: rounding
/// down can drop a deviation from a tie into a clean win.
pub fn shrink_bidspace(b: &BidSpace, m: u64) -> Result<ShrinkResult, TransformError> {
    if m == 0 {
        return Err(TransformError::Precondition("M must be positive".into()));
    }
    let mm = m as i64;
    let mut kept: Vec<usize> = vec![0];
    for l in 0..mm {
        let lo = rat(l, mm);
        let hi = rat(l + 1, mm);
        if let Some(k) = b.bids().iter().rposition(|x| x >= &lo && x <= &hi) {
            if kept.last() != Some(&k) {
                kept.push(k);
            }
        }
    }
    let bids = BidSpace::new(kept.iter().map(|&k| b.get(k).clone()).collect())?;
    Ok(ShrinkResult { bids, m, kept })
}

/// Hausdorff distance between two bid spaces.
pub fn hausdorff(a: &BidSpace, b: &BidSpace) -> Rational {
    let one_way = |x: &BidSpace, y: &BidSpace| {
        x.bids()
            .iter()
            .map(|p| y.bids().iter().map(|q| (p - q).abs()).min().expect("nonempty"))
            .max()
            .expect("nonempty")
    };
    one_way(a, b).max(one_way(b, a))
}

/// Bookkeeping needed to move strategies back across a discretization.
#[derive(Debug, Clone)]
pub enum DiscretizationMap {
    /// Each discrete value `v` became the block `[v - delta, v]` (`[0, delta]` for `v = 0`).
    ToContinuous {
        delta: Rational,
        bids: BidSpace,
        values: Vec<ValueSpace>,
    },
    /// `[0,1]` was cut at `grid`; value `grid[k]` stands for `[grid[k], grid[k+1]]`.
    ToDiscrete {
        delta: Rational,
        bids: BidSpace,
        grid: Vec<Rational>,
    },
}

impl DiscretizationMap {
    pub fn delta(&self) -> &Rational {
        match self {
            Self::ToContinuous { delta, .. } | Self::ToDiscrete { delta, .. } => delta,
        }
    }
}

fn block(v: &Rational, delta: &Rational) -> (Rational, Rational) {
    if v.is_zero() {
        (zero(), delta.clone())
    } else {
        (v - delta, v.clone())
    }
}

/// Smallest gap between distinct points of all value spaces and the bid space.
fn min_gap(a: &AuctionInstance) -> Option<Rational> {
    let mut pts: Vec<Rational> = a.bid_space().bids().to_vec();
    for v in a.value_spaces() {
        pts.extend(v.values().iter().cloned());
    }
    pts.sort();
    pts.dedup();
    pts.windows(2).map(|w| &w[1] - &w[0]).min()
}

/// Spreads each value's mass uniformly over a block of width `delta`.
///
/// `delta` is halved until blocks around distinct points cannot overlap;
/// the width used is reported in the map.
pub fn dfpa_to_cfpa(
    a: &AuctionInstance,
    delta: &Rational,
) -> Result<(ContinuousAuction, DiscretizationMap), TransformError> {
    if !delta.is_positive() || delta > &one() {
        return Err(TransformError::Precondition("delta must lie in (0,1]".into()));
    }
    let mut delta = delta.clone();
    if let Some(gap) = min_gap(a) {
        while int(2) * &delta > gap {
            delta /= int(2);
        }
    } else if delta > rat(1, 2) {
        delta = rat(1, 2);
    }
    let n = a.n();
    let mut densities = vec![vec![None; n]; n];
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let f = a.prior(i, j);
            let mut breakpoints = vec![zero()];
            let mut heights = Vec::new();
            for vj in f.support() {
                let (lo, hi) = block(a.value_space(j).get(vj), &delta);
                if &lo > breakpoints.last().unwrap() {
                    breakpoints.push(lo.clone());
                    heights.push(zero());
                }
                breakpoints.push(hi);
                heights.push(f.mass(vj) / &delta);
            }
            if breakpoints.last().unwrap() < &one() {
                breakpoints.push(one());
                heights.push(zero());
            }
            densities[i][j] = Some(PiecewiseConstantDensity::new(breakpoints, heights)?);
        }
    }
    let c = ContinuousAuction::new(a.bid_space().clone(), densities)?;
    let map = DiscretizationMap::ToContinuous {
        delta,
        bids: a.bid_space().clone(),
        values: a.value_spaces().to_vec(),
    };
    Ok((c, map))
}

fn overlap(a: &(Rational, Rational), b: &(Rational, Rational)) -> Rational {
    let lo = (&a.0).max(&b.0);
    let hi = (&a.1).min(&b.1);
    if lo < hi {
        hi - lo
    } else {
        zero()
    }
}

/// Bid distribution at each discrete value: the share of its block spent on each bid.
pub fn mbne_from_cfpa_pbne(
    map: &DiscretizationMap,
    profile: &StepStrategyProfile,
) -> Result<MixedStrategyProfile, TransformError> {
    let DiscretizationMap::ToContinuous { delta, bids, values } = map else {
        return Err(TransformError::Precondition("expected a discrete-to-continuous map".into()));
    };
    if profile.len() != values.len() {
        return Err(TransformError::Precondition("profile size does not match the map".into()));
    }
    let strategies = profile
        .strategies()
        .iter()
        .zip(values)
        .map(|(s, vs)| {
            let rows = vs
                .values()
                .iter()
                .map(|v| {
                    let blk = block(v, delta);
                    (0..bids.len())
                        .map(|l| match s.region(l) {
                            Some(r) => overlap(&r, &blk) / delta,
                            None => zero(),
                        })
                        .collect()
                })
                .collect();
            MixedStrategy::from_table(rows)
        })
        .collect();
    Ok(MixedStrategyProfile::new(strategies))
}

/// Discretizes `[0,1]` on the `1/K` grid plus all density breakpoints.
///
/// `delta` is replaced by `1/K` with `K = ceil(1/delta)`; the value `1`
/// only closes the last cell and is not itself a value.
pub fn cfpa_to_dfpa(
    c: &ContinuousAuction,
    delta: &Rational,
) -> Result<(AuctionInstance, DiscretizationMap), TransformError> {
    if !delta.is_positive() || delta > &one() {
        return Err(TransformError::Precondition("delta must lie in (0,1]".into()));
    }
    let k = ceil_to_u64(&(one() / delta))
        .ok_or_else(|| TransformError::Precondition("delta too small".into()))?;
    let kk = k as i64;
    let mut grid: Vec<Rational> = (0..=kk).map(|x| rat(x, kk)).collect();
    grid.extend(c.all_breakpoints());
    grid.sort();
    grid.dedup();
    let values = ValueSpace::new(grid[..grid.len() - 1].to_vec())?;
    let n = c.n();
    let mut priors = vec![vec![None; n]; n];
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let f = c.density(i, j);
            let masses = grid.windows(2).map(|w| f.integral(&w[0], &w[1])).collect();
            priors[i][j] = Some(PriorPmf::new(masses)?);
        }
    }
    let a = AuctionInstance::new(c.bid_space().clone(), vec![values; n], priors)?;
    let map = DiscretizationMap::ToDiscrete {
        delta: rat(1, kk),
        bids: c.bid_space().clone(),
        grid,
    };
    Ok((a, map))
}

/// Lays each value's bids out over its cell in increasing order.
///
/// Requires a monotone profile; at a jump point the smaller bid is used.
pub fn pbne_from_dfpa_wsne(
    map: &DiscretizationMap,
    profile: &MixedStrategyProfile,
) -> Result<StepStrategyProfile, TransformError> {
    let DiscretizationMap::ToDiscrete { bids, grid, .. } = map else {
        return Err(TransformError::Precondition("expected a continuous-to-discrete map".into()));
    };
    if !is_monotone(profile) {
        return Err(TransformError::Precondition("profile is not monotone".into()));
    }
    let m = bids.len();
    let strategies = profile
        .strategies()
        .iter()
        .map(|s| {
            if s.num_values() + 1 != grid.len() {
                return Err(TransformError::Precondition("profile does not match the grid".into()));
            }
            // end of the last segment using each bid
            let mut ends: Vec<Option<Rational>> = vec![None; m];
            for (k, w) in grid.windows(2).enumerate() {
                let len = &w[1] - &w[0];
                let mut cursor = w[0].clone();
                for (b, p) in s.dist(k).iter().enumerate() {
                    if p.is_zero() {
                        continue;
                    }
                    cursor += p * &len;
                    ends[b] = Some(cursor.clone());
                }
            }
            let mut jumps = Vec::with_capacity(m - 1);
            let mut alpha = zero();
            for end in ends.iter().take(m - 1) {
                if let Some(e) = end {
                    alpha = alpha.max(e.clone());
                }
                jumps.push(alpha.clone());
            }
            Ok(StepStrategy::new(jumps, bids)?)
        })
        .collect::<Result<Vec<_>, TransformError>>()?;
    Ok(StepStrategyProfile::new(strategies))
}
