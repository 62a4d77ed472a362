//! Interim utilities via the tie-counting dynamic program, plus a brute-force oracle.

use num_traits::{FromPrimitive, Num, Zero};

use crate::auction::{AuctionInstance, MixedStrategyProfile};
use crate::continuous::{ContinuousAuction, StepStrategyProfile};
use crate::error::{ModelError, UtilityError};
use crate::rational::{zero, Rational};

/// Term limit for [`brute_force_utility`].
pub const BRUTE_FORCE_LIMIT: u128 = 10_000_000;

/// Opponent bid distributions as seen by one bidder: `exact[j][b]` is the
/// probability that `j` bids `b`, `below[j][b]` that `j` bids strictly less.
#[derive(Debug, Clone)]
pub struct BidMassTable {
    bidder: usize,
    exact: Vec<Option<Vec<Rational>>>,
    below: Vec<Option<Vec<Rational>>>,
}

impl BidMassTable {
    /// Builds the table from per-opponent bid distributions (`None` for the bidder itself).
    pub fn from_distributions(bidder: usize, exact: Vec<Option<Vec<Rational>>>) -> Self {
        let below = exact
            .iter()
            .map(|row| {
                row.as_ref().map(|g| {
                    let mut acc = zero();
                    g.iter()
                        .map(|p| {
                            let out = acc.clone();
                            acc += p;
                            out
                        })
                        .collect()
                })
            })
            .collect();
        Self {
            bidder,
            exact,
            below,
        }
    }

    pub fn bidder(&self) -> usize {
        self.bidder
    }

    pub fn opponents(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.exact.len()).filter(move |&j| j != self.bidder)
    }

    pub fn exact(&self, j: usize, b: usize) -> &Rational {
        &self.exact[j].as_ref().expect("no row for own bidder")[b]
    }

    pub fn below(&self, j: usize, b: usize) -> &Rational {
        &self.below[j].as_ref().expect("no row for own bidder")[b]
    }

    pub fn num_bids(&self) -> usize {
        self.exact
            .iter()
            .flatten()
            .next()
            .map_or(0, |row| row.len())
    }

    /// Full table `T(b, l, k)` over opponents in index order.
    pub fn tie_table(&self, b: usize) -> TieTable {
        let (g, big): (Vec<_>, Vec<_>) = self
            .opponents()
            .map(|j| (self.exact(j, b).clone(), self.below(j, b).clone()))
            .unzip();
        TieTable {
            rows: tie_rows(&g, &big),
        }
    }

    /// Probability of winning with bid `b` under uniform tie-breaking.
    pub fn win_prob(&self, b: usize) -> Rational {
        let pairs: Vec<(Rational, Rational)> = self
            .opponents()
            .map(|j| (self.exact(j, b).clone(), self.below(j, b).clone()))
            .collect();
        win_prob_from_pairs(&pairs)
    }

    pub fn win_probs(&self) -> Vec<Rational> {
        (0..self.num_bids()).map(|b| self.win_prob(b)).collect()
    }
}

/// `T(b, l, k)` for a fixed bid: `rows[l][k]`, `l = 0..n-1`, `k = 0..=l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TieTable {
    pub rows: Vec<Vec<Rational>>,
}

impl TieTable {
    /// Final row `T(b, n-1, k)`.
    pub fn last(&self) -> &[Rational] {
        self.rows.last().expect("table has at least one row")
    }

    pub fn win_prob(&self) -> Rational {
        self.last()
            .iter()
            .enumerate()
            .map(|(k, t)| t / Rational::from_integer((k as i64 + 1).into()))
            .sum()
    }
}

/// Rows of the tie recurrence for tie masses `g` and below masses `big`.
pub fn tie_rows<T: Num + Clone>(g: &[T], big: &[T]) -> Vec<Vec<T>> {
    let mut rows = vec![vec![T::one()]];
    for (gl, bl) in g.iter().zip(big) {
        let prev = rows.last().unwrap();
        let mut next = vec![T::zero(); prev.len() + 1];
        for (k, t) in prev.iter().enumerate() {
            next[k] = next[k].clone() + t.clone() * bl.clone();
            next[k + 1] = t.clone() * gl.clone();
        }
        rows.push(next);
    }
    rows
}

/// Win probability from `(tie mass, below mass)` per opponent.
///
/// Opponents that surely bid below are skipped and sure ties are counted
/// rather than run through the recurrence.
pub fn win_prob_from_pairs<T: Num + Clone + FromPrimitive>(pairs: &[(T, T)]) -> T {
    let mut sure_ties = 0usize;
    let mut t: Vec<T> = vec![T::one()];
    for (g, big) in pairs {
        if g.is_zero() && big.is_one() {
            continue;
        }
        if g.is_one() {
            sure_ties += 1;
            continue;
        }
        if g.is_zero() && big.is_zero() {
            return T::zero();
        }
        let mut next = vec![T::zero(); t.len() + 1];
        for (k, tk) in t.iter().enumerate() {
            next[k] = next[k].clone() + tk.clone() * big.clone();
            next[k + 1] = tk.clone() * g.clone();
        }
        t = next;
    }
    t.into_iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .fold(T::zero(), |acc, (k, x)| {
            acc + x / T::from_usize(k + sure_ties + 1).expect("small integer")
        })
}

fn check_shape(a: &AuctionInstance, profile: &MixedStrategyProfile) -> Result<(), ModelError> {
    if profile.len() != a.n() {
        return Err(ModelError::Dimension(format!(
            "profile has {} strategies for {} bidders",
            profile.len(),
            a.n()
        )));
    }
    let m = a.bid_space().len();
    for (j, s) in profile.strategies().iter().enumerate() {
        if s.num_values() != a.value_space(j).len() || s.dists().iter().any(|r| r.len() != m) {
            return Err(ModelError::Dimension(format!("strategy {j} has the wrong shape")));
        }
    }
    Ok(())
}

/// Opponent bid distributions from bidder `i`'s point of view.
pub fn bid_mass(
    a: &AuctionInstance,
    i: usize,
    profile: &MixedStrategyProfile,
) -> Result<BidMassTable, ModelError> {
    check_shape(a, profile)?;
    let m = a.bid_space().len();
    let exact = (0..a.n())
        .map(|j| {
            (j != i).then(|| {
                let f = a.prior(i, j);
                let s = profile.strategy(j);
                let mut g = vec![zero(); m];
                for v in f.support() {
                    let fv = f.mass(v);
                    for (b, p) in s.dist(v).iter().enumerate() {
                        if !p.is_zero() {
                            g[b] += fv * p;
                        }
                    }
                }
                g
            })
        })
        .collect();
    Ok(BidMassTable::from_distributions(i, exact))
}

pub fn tie_table(
    a: &AuctionInstance,
    i: usize,
    b: usize,
    profile: &MixedStrategyProfile,
) -> Result<TieTable, ModelError> {
    Ok(bid_mass(a, i, profile)?.tie_table(b))
}

pub fn win_prob(
    a: &AuctionInstance,
    i: usize,
    b: usize,
    profile: &MixedStrategyProfile,
) -> Result<Rational, ModelError> {
    Ok(bid_mass(a, i, profile)?.win_prob(b))
}

/// `(v - b) * H(b)`; overbids give a nonpositive number rather than an error.
pub fn interim_utility(
    a: &AuctionInstance,
    i: usize,
    v: &Rational,
    b: usize,
    profile: &MixedStrategyProfile,
) -> Result<Rational, ModelError> {
    let h = win_prob(a, i, b, profile)?;
    Ok((v - a.bid_space().get(b)) * h)
}

/// Expected utility of bid distribution `gamma` at value `v`.
pub fn mixed_utility(
    a: &AuctionInstance,
    i: usize,
    v: &Rational,
    gamma: &[Rational],
    profile: &MixedStrategyProfile,
) -> Result<Rational, ModelError> {
    let t = bid_mass(a, i, profile)?;
    Ok(gamma
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(b, p)| p * (v - a.bid_space().get(b)) * t.win_prob(b))
        .sum())
}

/// Utility by enumerating every opponent value and bid.
pub fn brute_force_utility(
    a: &AuctionInstance,
    i: usize,
    v: &Rational,
    b: usize,
    profile: &MixedStrategyProfile,
) -> Result<Rational, UtilityError> {
    check_shape(a, profile)?;
    // (probability, bid index) outcomes per opponent
    let outcomes: Vec<Vec<(Rational, usize)>> = (0..a.n())
        .filter(|&j| j != i)
        .map(|j| {
            let f = a.prior(i, j);
            let s = profile.strategy(j);
            f.support()
                .flat_map(|vj| {
                    s.dist(vj)
                        .iter()
                        .enumerate()
                        .filter(|(_, p)| !p.is_zero())
                        .map(move |(bj, p)| (f.mass(vj) * p, bj))
                })
                .collect()
        })
        .collect();
    let needed = outcomes
        .iter()
        .try_fold(1u128, |acc, o| acc.checked_mul(o.len() as u128))
        .unwrap_or(u128::MAX);
    if needed > BRUTE_FORCE_LIMIT {
        return Err(UtilityError::TooLarge {
            needed,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let surplus = v - a.bid_space().get(b);
    let mut total = zero();
    let mut idx = vec![0usize; outcomes.len()];
    loop {
        let mut prob = Rational::from_integer(1.into());
        let mut lost = false;
        let mut winners = 1i64;
        for (o, &k) in outcomes.iter().zip(&idx) {
            let (p, bj) = &o[k];
            prob *= p;
            if *bj > b {
                lost = true;
            } else if *bj == b {
                winners += 1;
            }
        }
        if !lost {
            total += prob * &surplus / Rational::from_integer(winners.into());
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return Ok(total);
            }
            idx[pos] += 1;
            if idx[pos] < outcomes[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Bid distribution of `j` seen by `i` when `j` plays step strategy `s[j]`.
pub fn cfpa_bid_distribution(
    c: &ContinuousAuction,
    i: usize,
    j: usize,
    s: &StepStrategyProfile,
) -> Vec<Rational> {
    let f = c.density(i, j);
    let sj = s.strategy(j);
    (0..sj.num_bids())
        .map(|l| match sj.region(l) {
            Some((lo, hi)) => f.integral(&lo, &hi),
            None => zero(),
        })
        .collect()
}

/// Opponent bid table for bidder `i` in a continuous auction.
pub fn cfpa_bid_mass(c: &ContinuousAuction, i: usize, s: &StepStrategyProfile) -> BidMassTable {
    let exact = (0..c.n())
        .map(|j| (j != i).then(|| cfpa_bid_distribution(c, i, j, s)))
        .collect();
    BidMassTable::from_distributions(i, exact)
}

pub fn cfpa_utility(
    c: &ContinuousAuction,
    i: usize,
    v: &Rational,
    b: usize,
    s: &StepStrategyProfile,
) -> Rational {
    (v - c.bid_space().get(b)) * cfpa_bid_mass(c, i, s).win_prob(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auction::{BidSpace, MixedStrategy, PriorPmf, ValueSpace};
    use crate::rational::{one, rat};

    fn two_by_two() -> AuctionInstance {
        let v = ValueSpace::new(vec![zero(), one()]).unwrap();
        let f = PriorPmf::new(vec![rat(1, 2), rat(1, 2)]).unwrap();
        AuctionInstance::iid(2, BidSpace::uniform(2), v, f).unwrap()
    }

    #[test]
    fn two_bidder_hand_values() {
        let a = two_by_two();
        // value 1 bids 1/2
        let s = MixedStrategy::pure(&[0, 1], 3);
        let p = MixedStrategyProfile::symmetric(s, 2);
        assert_eq!(win_prob(&a, 0, 0, &p).unwrap(), rat(1, 4));
        assert_eq!(win_prob(&a, 0, 1, &p).unwrap(), rat(3, 4));
        assert_eq!(win_prob(&a, 0, 2, &p).unwrap(), one());
        assert_eq!(interim_utility(&a, 0, &one(), 1, &p).unwrap(), rat(3, 8));
        assert_eq!(interim_utility(&a, 0, &zero(), 1, &p).unwrap(), rat(-3, 8));
    }

    #[test]
    fn tie_table_matches_compressed_path() {
        let a = two_by_two();
        let s = MixedStrategy::from_table(vec![
            vec![one(), zero(), zero()],
            vec![rat(1, 3), rat(1, 3), rat(1, 3)],
        ]);
        let p = MixedStrategyProfile::symmetric(s, 2);
        let t = bid_mass(&a, 1, &p).unwrap();
        for b in 0..3 {
            assert_eq!(t.tie_table(b).win_prob(), t.win_prob(b));
            let bf = brute_force_utility(&a, 1, &one(), b, &p).unwrap();
            assert_eq!(bf, (one() - a.bid_space().get(b)) * t.win_prob(b));
        }
    }

    #[test]
    fn recurrence_boundary() {
        let rows = tie_rows(&[rat(1, 2), rat(1, 3)], &[rat(1, 4), rat(1, 2)]);
        assert_eq!(rows[0], vec![one()]);
        assert_eq!(rows[1], vec![rat(1, 4), rat(1, 2)]);
        assert_eq!(rows[2], vec![rat(1, 8), rat(1, 12) + rat(1, 4), rat(1, 6)]);
    }

    #[test]
    fn float_and_exact_agree() {
        let pairs = [(0.5, 0.25), (1.0, 0.0), (0.0, 1.0), (0.2, 0.3)];
        let exact: Vec<(Rational, Rational)> = [(1, 2, 1, 4), (1, 1, 0, 1), (0, 1, 1, 1), (1, 5, 3, 10)]
            .iter()
            .map(|&(a, b, c, d)| (rat(a, b), rat(c, d)))
            .collect();
        let x = win_prob_from_pairs(&pairs);
        let y = crate::rational::to_f64(&win_prob_from_pairs(&exact));
        assert!((x - y).abs() < 1e-12);
    }
}
