//! Discrete first-price auctions with subjective priors, and strategies on them.

use num_traits::{One, Zero};

use crate::error::ModelError;
use crate::rational::{is_nonneg, one, zero, Pq, Rational};

/// Strictly increasing bids in `[0,1]` starting at the null bid `0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BidSpace {
    bids: Vec<Rational>,
}

impl BidSpace {
    pub fn new(bids: Vec<Rational>) -> Result<Self, ModelError> {
        check_grid(&bids, "bid space")?;
        if bids.first().is_none_or(|b| !b.is_zero()) {
            return Err(ModelError::MissingNullBid);
        }
        Ok(Self { bids })
    }

    /// `{0, 1/m, ..., 1}`.
    pub fn uniform(m: u64) -> Self {
        let bids = (0..=m)
            .map(|l| Rational::new((l as i64).into(), (m as i64).into()))
            .collect();
        Self { bids }
    }

    pub fn len(&self) -> usize {
        self.bids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bids.is_empty()
    }

    pub fn bids(&self) -> &[Rational] {
        &self.bids
    }

    pub fn get(&self, idx: usize) -> &Rational {
        &self.bids[idx]
    }

    pub fn index_of(&self, b: &Rational) -> Option<usize> {
        self.bids.binary_search(b).ok()
    }

    /// Largest bid index with `b <= v`, if any.
    pub fn max_affordable(&self, v: &Rational) -> Option<usize> {
        self.bids.iter().rposition(|b| b <= v)
    }
}

/// Strictly increasing values in `[0,1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueSpace {
    values: Vec<Rational>,
}

impl ValueSpace {
    pub fn new(values: Vec<Rational>) -> Result<Self, ModelError> {
        check_grid(&values, "value space")?;
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn get(&self, idx: usize) -> &Rational {
        &self.values[idx]
    }

    pub fn index_of(&self, v: &Rational) -> Option<usize> {
        self.values.binary_search(v).ok()
    }
}

fn check_grid(xs: &[Rational], what: &'static str) -> Result<(), ModelError> {
    if xs.is_empty() {
        return Err(ModelError::EmptySpace(what));
    }
    for x in xs {
        if !is_nonneg(x) || x > &one() {
            return Err(ModelError::OutOfUnitInterval {
                what,
                value: Pq(x).to_string(),
            });
        }
    }
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ModelError::NotStrictlyIncreasing(what));
    }
    Ok(())
}

/// A probability mass function over a bidder's value space, stored densely
/// in the order of that space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorPmf {
    masses: Vec<Rational>,
}

impl PriorPmf {
    pub fn new(masses: Vec<Rational>) -> Result<Self, ModelError> {
        if masses.iter().any(|p| !is_nonneg(p)) {
            return Err(ModelError::NegativeMass);
        }
        let total: Rational = masses.iter().sum();
        if !total.is_one() {
            return Err(ModelError::MassNotOne(Pq(&total).to_string()));
        }
        Ok(Self { masses })
    }

    /// Point mass on the value with index `idx` in a space of `len` values.
    pub fn point(len: usize, idx: usize) -> Self {
        let mut masses = vec![zero(); len];
        masses[idx] = one();
        Self { masses }
    }

    /// Builds a pmf from `(value, mass)` pairs over `space`; unlisted values get 0.
    pub fn from_pairs(
        space: &ValueSpace,
        pairs: &[(Rational, Rational)],
    ) -> Result<Self, ModelError> {
        let mut masses = vec![zero(); space.len()];
        for (v, p) in pairs {
            let idx = space
                .index_of(v)
                .ok_or_else(|| ModelError::ValueNotInSpace(Pq(v).to_string()))?;
            masses[idx] += p;
        }
        Self::new(masses)
    }

    pub fn masses(&self) -> &[Rational] {
        &self.masses
    }

    pub fn mass(&self, idx: usize) -> &Rational {
        &self.masses[idx]
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.masses
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(i, _)| i)
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub n: usize,
    pub bids: usize,
    pub is_ipv: bool,
    pub is_iid: bool,
    pub interaction_degree: usize,
}

/// `n` bidders, a shared bid space, per-bidder value spaces and subjective
/// priors `priors[i][j]` held by `i` about `j` (diagonal unused).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuctionInstance {
    bids: BidSpace,
    values: Vec<ValueSpace>,
    priors: Vec<Vec<Option<PriorPmf>>>,
}

impl AuctionInstance {
    pub fn new(
        bids: BidSpace,
        values: Vec<ValueSpace>,
        priors: Vec<Vec<Option<PriorPmf>>>,
    ) -> Result<Self, ModelError> {
        let inst = Self {
            bids,
            values,
            priors,
        };
        validate_instance(&inst)?;
        Ok(inst)
    }

    /// Builds an instance where every bidder holds the same prior `prior[j]` about `j`.
    pub fn ipv(bids: BidSpace, values: Vec<ValueSpace>, prior: Vec<PriorPmf>) -> Result<Self, ModelError> {
        let n = values.len();
        if prior.len() != n {
            return Err(ModelError::Dimension(format!(
                "{} priors for {} bidders",
                prior.len(),
                n
            )));
        }
        let priors = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (i != j).then(|| prior[j].clone()))
                    .collect()
            })
            .collect();
        Self::new(bids, values, priors)
    }

    /// `n` bidders sharing value space `values` and the common prior `prior`.
    pub fn iid(n: usize, bids: BidSpace, values: ValueSpace, prior: PriorPmf) -> Result<Self, ModelError> {
        Self::ipv(bids, vec![values; n], vec![prior; n])
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn bid_space(&self) -> &BidSpace {
        &self.bids
    }

    pub fn value_space(&self, i: usize) -> &ValueSpace {
        &self.values[i]
    }

    pub fn value_spaces(&self) -> &[ValueSpace] {
        &self.values
    }

    /// Prior of bidder `i` about bidder `j` (`i != j`).
    pub fn prior(&self, i: usize, j: usize) -> &PriorPmf {
        self.priors[i][j]
            .as_ref()
            .expect("prior requested for i == j")
    }

    pub fn with_bid_space(&self, bids: BidSpace) -> Result<Self, ModelError> {
        Self::new(bids, self.values.clone(), self.priors.clone())
    }

    /// True when all observers share the same prior about each bidder.
    pub fn is_ipv(&self) -> bool {
        let n = self.n();
        (0..n).all(|j| {
            let mut obs = (0..n).filter(|&i| i != j);
            match obs.next() {
                None => true,
                Some(first) => obs.all(|i| self.prior(i, j) == self.prior(first, j)),
            }
        })
    }

    /// IPV with one shared value space and one shared prior.
    pub fn is_iid(&self) -> bool {
        if !self.is_ipv() || self.n() < 2 {
            return false;
        }
        let v0 = &self.values[0];
        let f0 = self.prior(1, 0);
        (1..self.n()).all(|j| &self.values[j] == v0 && self.prior(0, j) == f0)
    }

    /// For iid instances: the common value space and prior.
    pub fn iid_parts(&self) -> Option<(&ValueSpace, &PriorPmf)> {
        self.is_iid().then(|| (&self.values[0], self.prior(1, 0)))
    }

    /// Opponents whose bid `i` cannot pin down: all `j` except those known
    /// by `i` to have value `0` with certainty.
    pub fn relevant_opponents(&self, i: usize) -> Vec<usize> {
        (0..self.n())
            .filter(|&j| j != i && !self.is_certain_zero(i, j))
            .collect()
    }

    fn is_certain_zero(&self, i: usize, j: usize) -> bool {
        match self.values[j].index_of(&zero()) {
            Some(z) => self.prior(i, j).mass(z).is_one(),
            None => false,
        }
    }

    /// Max over bidders of the number of relevant opponents, at least 1.
    pub fn interaction_degree(&self) -> usize {
        (0..self.n())
            .map(|i| self.relevant_opponents(i).len())
            .max()
            .unwrap_or(0)
            .max(1)
    }
}

/// Checks every structural invariant of `a`.
pub fn validate_instance(a: &AuctionInstance) -> Result<ValidationReport, ModelError> {
    let n = a.values.len();
    if n < 2 {
        return Err(ModelError::TooFewBidders(n));
    }
    check_grid(a.bids.bids(), "bid space")?;
    if !a.bids.get(0).is_zero() {
        return Err(ModelError::MissingNullBid);
    }
    for v in &a.values {
        check_grid(v.values(), "value space")?;
    }
    if a.priors.len() != n || a.priors.iter().any(|row| row.len() != n) {
        return Err(ModelError::Dimension(format!("prior table must be {n}x{n}")));
    }
    for i in 0..n {
        for j in 0..n {
            match (&a.priors[i][j], i == j) {
                (Some(_), true) => {
                    return Err(ModelError::Dimension(format!("self-prior given for bidder {i}")))
                }
                (None, false) => return Err(ModelError::MissingPrior { i, j }),
                (Some(f), false) => {
                    if f.len() != a.values[j].len() {
                        return Err(ModelError::Dimension(format!(
                            "prior ({i},{j}) has {} masses for {} values",
                            f.len(),
                            a.values[j].len()
                        )));
                    }
                    PriorPmf::new(f.masses.clone())?;
                }
                (None, true) => {}
            }
        }
    }
    Ok(ValidationReport {
        n,
        bids: a.bids.len(),
        is_ipv: a.is_ipv(),
        is_iid: a.is_iid(),
        interaction_degree: a.interaction_degree(),
    })
}

/// Bid distribution per value: `dists[value_idx][bid_idx]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedStrategy {
    dists: Vec<Vec<Rational>>,
}

impl MixedStrategy {
    /// Stores the table without checking it against any instance.
    pub fn from_table(dists: Vec<Vec<Rational>>) -> Self {
        Self { dists }
    }

    pub fn pure(bid_indices: &[usize], bids: usize) -> Self {
        let dists = bid_indices
            .iter()
            .map(|&b| {
                let mut row = vec![zero(); bids];
                row[b] = one();
                row
            })
            .collect();
        Self { dists }
    }

    pub fn dist(&self, value_idx: usize) -> &[Rational] {
        &self.dists[value_idx]
    }

    pub fn dists(&self) -> &[Vec<Rational>] {
        &self.dists
    }

    pub fn num_values(&self) -> usize {
        self.dists.len()
    }

    pub fn support(&self, value_idx: usize) -> Vec<usize> {
        self.dists[value_idx]
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(b, _)| b)
            .collect()
    }

    /// `Some(b)` when the bid at this value is deterministic.
    pub fn as_pure_at(&self, value_idx: usize) -> Option<usize> {
        let s = self.support(value_idx);
        (s.len() == 1).then(|| s[0])
    }

    /// Checks dimensions, distributions and no-overbidding for bidder `i`.
    pub fn check(&self, a: &AuctionInstance, i: usize) -> Result<(), ModelError> {
        let vs = a.value_space(i);
        let m = a.bid_space().len();
        if self.dists.len() != vs.len() {
            return Err(ModelError::Dimension(format!(
                "strategy of bidder {i} has {} rows for {} values",
                self.dists.len(),
                vs.len()
            )));
        }
        for (vi, row) in self.dists.iter().enumerate() {
            if row.len() != m {
                return Err(ModelError::Dimension(format!(
                    "strategy of bidder {i} has {} columns for {m} bids",
                    row.len()
                )));
            }
            if row.iter().any(|p| !is_nonneg(p)) {
                return Err(ModelError::NegativeMass);
            }
            let total: Rational = row.iter().sum();
            if !total.is_one() {
                return Err(ModelError::MassNotOne(Pq(&total).to_string()));
            }
            let v = vs.get(vi);
            for (b, p) in row.iter().enumerate() {
                if !p.is_zero() && a.bid_space().get(b) > v {
                    return Err(ModelError::Overbid {
                        bidder: i,
                        value: Pq(v).to_string(),
                        bid: Pq(a.bid_space().get(b)).to_string(),
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedStrategyProfile {
    strategies: Vec<MixedStrategy>,
}

impl MixedStrategyProfile {
    pub fn new(strategies: Vec<MixedStrategy>) -> Self {
        Self { strategies }
    }

    /// Every bidder plays `s`.
    pub fn symmetric(s: MixedStrategy, n: usize) -> Self {
        Self {
            strategies: vec![s; n],
        }
    }

    pub fn strategy(&self, i: usize) -> &MixedStrategy {
        &self.strategies[i]
    }

    pub fn strategies(&self) -> &[MixedStrategy] {
        &self.strategies
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }

    pub fn check(&self, a: &AuctionInstance) -> Result<(), ModelError> {
        if self.strategies.len() != a.n() {
            return Err(ModelError::Dimension(format!(
                "profile has {} strategies for {} bidders",
                self.strategies.len(),
                a.n()
            )));
        }
        for (i, s) in self.strategies.iter().enumerate() {
            s.check(a, i)?;
        }
        Ok(())
    }
}

/// Deterministic bids: `bids[i][value_idx]` is a bid index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PureStrategyProfile {
    pub bids: Vec<Vec<usize>>,
}

impl PureStrategyProfile {
    pub fn new(bids: Vec<Vec<usize>>) -> Self {
        Self { bids }
    }

    pub fn to_mixed(&self, num_bids: usize) -> MixedStrategyProfile {
        MixedStrategyProfile::new(
            self.bids
                .iter()
                .map(|row| MixedStrategy::pure(row, num_bids))
                .collect(),
        )
    }

    pub fn check(&self, a: &AuctionInstance) -> Result<(), ModelError> {
        self.to_mixed(a.bid_space().len()).check(a)
    }
}
