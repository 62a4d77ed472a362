//! Seeded generators and fixture loading shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use fpa_core::format::{parse_instance, Instance};
use fpa_core::rational::{rat, zero, Rational};
use fpa_core::{
    AuctionInstance, BidSpace, ContinuousAuction, MixedStrategy, MixedStrategyProfile, PiecewiseConstantDensity,
    PriorPmf, ValueSpace,
};
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `len` distinct multiples of `1/denom` in `[0,1]`, increasing; starts at 0 when asked.
pub fn grid(r: &mut ChaCha8Rng, len: usize, denom: i64, with_zero: bool) -> Vec<Rational> {
    let mut picks: Vec<i64> = if with_zero {
        let mut rest: Vec<i64> = sample(r, denom as usize, len - 1).into_iter().map(|x| x as i64 + 1).collect();
        rest.push(0);
        rest
    } else {
        sample(r, denom as usize + 1, len).into_iter().map(|x| x as i64).collect()
    };
    picks.sort_unstable();
    picks.into_iter().map(|x| rat(x, denom)).collect()
}

/// Probability vector with small random integer weights; zeros allowed when `sparse`.
pub fn distribution(r: &mut ChaCha8Rng, len: usize, sparse: bool) -> Vec<Rational> {
    loop {
        let lo = if sparse { 0 } else { 1 };
        let w: Vec<i64> = (0..len).map(|_| r.gen_range(lo..=6)).collect();
        let total: i64 = w.iter().sum();
        if total > 0 {
            return w.into_iter().map(|x| rat(x, total)).collect();
        }
    }
}

pub fn bid_space(r: &mut ChaCha8Rng, m: usize) -> BidSpace {
    BidSpace::new(grid(r, m, 12, true)).unwrap()
}

/// Instance with independent value spaces and subjective priors.
pub fn random_instance(r: &mut ChaCha8Rng, n: usize, max_k: usize, m: usize) -> AuctionInstance {
    let values: Vec<ValueSpace> = (0..n)
        .map(|_| {
            let k = r.gen_range(1..=max_k);
            ValueSpace::new(grid(r, k, 10, false)).unwrap()
        })
        .collect();
    let priors = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (i != j).then(|| PriorPmf::new(distribution(r, values[j].len(), true)).unwrap()))
                .collect()
        })
        .collect();
    AuctionInstance::new(bid_space(r, m), values, priors).unwrap()
}

pub fn random_iid(r: &mut ChaCha8Rng, n: usize, k: usize, bids: BidSpace) -> AuctionInstance {
    let values = ValueSpace::new(grid(r, k, 10, false)).unwrap();
    let f = PriorPmf::new(distribution(r, k, false)).unwrap();
    AuctionInstance::iid(n, bids, values, f).unwrap()
}

/// Arbitrary mixed profile of the right shape; overbids allowed.
pub fn random_profile(r: &mut ChaCha8Rng, a: &AuctionInstance) -> MixedStrategyProfile {
    let m = a.bid_space().len();
    MixedStrategyProfile::new(
        (0..a.n())
            .map(|i| {
                let rows = (0..a.value_space(i).len()).map(|_| distribution(r, m, true)).collect();
                MixedStrategy::from_table(rows)
            })
            .collect(),
    )
}

/// Mixed profile that never overbids.
pub fn random_valid_profile(r: &mut ChaCha8Rng, a: &AuctionInstance) -> MixedStrategyProfile {
    let m = a.bid_space().len();
    MixedStrategyProfile::new(
        (0..a.n())
            .map(|i| {
                let rows = a
                    .value_space(i)
                    .values()
                    .iter()
                    .map(|v| {
                        let ok = a.bid_space().max_affordable(v).unwrap_or(0) + 1;
                        let mut row = distribution(r, ok, true);
                        row.resize(m, zero());
                        row
                    })
                    .collect();
                MixedStrategy::from_table(rows)
            })
            .collect(),
    )
}

/// Density on `[0,1]` with `pieces` constant pieces on a `1/12` grid.
pub fn random_density(r: &mut ChaCha8Rng, pieces: usize) -> PiecewiseConstantDensity {
    let mut cuts = grid(r, pieces + 1, 12, true);
    cuts.pop();
    cuts.push(rat(1, 1));
    let mut cuts: Vec<Rational> = cuts;
    cuts.dedup();
    let masses = distribution(r, cuts.len() - 1, false);
    let heights = cuts.windows(2).zip(masses).map(|(w, p)| p / (&w[1] - &w[0])).collect();
    PiecewiseConstantDensity::new(cuts, heights).unwrap()
}

pub fn random_iid_cfpa(r: &mut ChaCha8Rng, n: usize, bids: BidSpace) -> ContinuousAuction {
    let pieces = r.gen_range(1..=3);
    let d = random_density(r, pieces);
    ContinuousAuction::ipv(bids, vec![d; n]).unwrap()
}

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// Every iid fixture, sorted by file name.
pub fn iid_fixtures() -> Vec<(String, AuctionInstance)> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(fixture_dir().join("iid"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            let Instance::Discrete(a) = parse_instance(&text).unwrap() else {
                panic!("{} is not discrete", p.display())
            };
            (p.file_stem().unwrap().to_string_lossy().into_owned(), a)
        })
        .collect()
}
