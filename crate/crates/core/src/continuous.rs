//! Continuous-value auctions with piecewise-constant densities and step strategies.

use num_traits::{One, Zero};

use crate::auction::BidSpace;
use crate::error::ModelError;
use crate::rational::{is_nonneg, one, zero, Pq, Rational};

/// Density on `[0,1]`: `heights[k]` on `[breakpoints[k], breakpoints[k+1]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseConstantDensity {
    breakpoints: Vec<Rational>,
    heights: Vec<Rational>,
}

impl PiecewiseConstantDensity {
    pub fn new(breakpoints: Vec<Rational>, heights: Vec<Rational>) -> Result<Self, ModelError> {
        let bad = |m: &str| ModelError::Density(m.to_string());
        if breakpoints.len() < 2 || heights.len() + 1 != breakpoints.len() {
            return Err(bad("need k+1 breakpoints for k heights"));
        }
        if !breakpoints[0].is_zero() || !breakpoints[breakpoints.len() - 1].is_one() {
            return Err(bad("breakpoints must start at 0 and end at 1"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad("breakpoints must be strictly increasing"));
        }
        if heights.iter().any(|h| !is_nonneg(h)) {
            return Err(bad("negative height"));
        }
        let d = Self {
            breakpoints,
            heights,
        };
        let total = d.integral(&zero(), &one());
        if !total.is_one() {
            return Err(ModelError::Density(format!(
                "integrates to {}, expected 1/1",
                Pq(&total)
            )));
        }
        Ok(d)
    }

    pub fn uniform() -> Self {
        Self {
            breakpoints: vec![zero(), one()],
            heights: vec![one()],
        }
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn heights(&self) -> &[Rational] {
        &self.heights
    }

    /// Exact integral over `[lo, hi]` (clamped to `[0,1]`).
    pub fn integral(&self, lo: &Rational, hi: &Rational) -> Rational {
        let mut acc = zero();
        for (k, h) in self.heights.iter().enumerate() {
            if h.is_zero() {
                continue;
            }
            let a = (&self.breakpoints[k]).max(lo);
            let b = (&self.breakpoints[k + 1]).min(hi);
            if a < b {
                acc += h * (b - a);
            }
        }
        acc
    }
}

/// Continuous auction: `densities[i][j]` is bidder `i`'s belief about `j`'s value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContinuousAuction {
    bids: BidSpace,
    densities: Vec<Vec<Option<PiecewiseConstantDensity>>>,
}

impl ContinuousAuction {
    pub fn new(
        bids: BidSpace,
        densities: Vec<Vec<Option<PiecewiseConstantDensity>>>,
    ) -> Result<Self, ModelError> {
        let n = densities.len();
        if n < 2 {
            return Err(ModelError::TooFewBidders(n));
        }
        for (i, row) in densities.iter().enumerate() {
            if row.len() != n {
                return Err(ModelError::Dimension(format!("density table must be {n}x{n}")));
            }
            for (j, d) in row.iter().enumerate() {
                match (d.is_some(), i == j) {
                    (true, true) => {
                        return Err(ModelError::Dimension(format!("self-density for bidder {i}")))
                    }
                    (false, false) => return Err(ModelError::MissingPrior { i, j }),
                    _ => {}
                }
            }
        }
        Ok(Self { bids, densities })
    }

    /// Every observer holds `density[j]` about `j`.
    pub fn ipv(bids: BidSpace, density: Vec<PiecewiseConstantDensity>) -> Result<Self, ModelError> {
        let n = density.len();
        let densities = (0..n)
            .map(|i| (0..n).map(|j| (i != j).then(|| density[j].clone())).collect())
            .collect();
        Self::new(bids, densities)
    }

    pub fn n(&self) -> usize {
        self.densities.len()
    }

    pub fn bid_space(&self) -> &BidSpace {
        &self.bids
    }

    pub fn density(&self, i: usize, j: usize) -> &PiecewiseConstantDensity {
        self.densities[i][j]
            .as_ref()
            .expect("density requested for i == j")
    }

    pub fn is_ipv(&self) -> bool {
        let n = self.n();
        (0..n).all(|j| {
            let mut obs = (0..n).filter(|&i| i != j);
            let first = obs.next().expect("n >= 2");
            obs.all(|i| self.density(i, j) == self.density(first, j))
        })
    }

    pub fn is_iid(&self) -> bool {
        self.is_ipv() && (1..self.n()).all(|j| self.density(0, j) == self.density(1, 0))
    }

    /// Union of all density breakpoints, sorted.
    pub fn all_breakpoints(&self) -> Vec<Rational> {
        let mut pts: Vec<Rational> = (0..self.n())
            .flat_map(|i| (0..self.n()).filter(move |&j| j != i).map(move |j| (i, j)))
            .flat_map(|(i, j)| self.density(i, j).breakpoints().to_vec())
            .collect();
        pts.sort();
        pts.dedup();
        pts
    }
}

/// Monotone step strategy: bid `b_l` on `(alpha_{l-1}, alpha_l]`, with
/// `alpha_0 = 0` (the first region is closed) and `alpha_m = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepStrategy {
    jump_points: Vec<Rational>,
}

impl StepStrategy {
    /// `jump_points` has one entry fewer than the bid space.
    pub fn new(jump_points: Vec<Rational>, bids: &BidSpace) -> Result<Self, ModelError> {
        if jump_points.len() + 1 != bids.len() {
            return Err(ModelError::Step(format!(
                "{} jump points for {} bids",
                jump_points.len(),
                bids.len()
            )));
        }
        if jump_points.iter().any(|a| !is_nonneg(a) || a > &one()) {
            return Err(ModelError::Step("jump point outside [0,1]".into()));
        }
        if jump_points.windows(2).any(|w| w[0] > w[1]) {
            return Err(ModelError::Step("jump points must be nondecreasing".into()));
        }
        let s = Self { jump_points };
        for l in 0..bids.len() {
            if let Some((lo, _)) = s.region(l) {
                if bids.get(l) > &lo {
                    return Err(ModelError::Step(format!(
                        "bid {} is assigned from value {}",
                        Pq(bids.get(l)),
                        Pq(&lo)
                    )));
                }
            }
        }
        Ok(s)
    }

    pub fn jump_points(&self) -> &[Rational] {
        &self.jump_points
    }

    fn alpha(&self, l: usize) -> Rational {
        // alpha_l in 1-based terms, l in 0..=m
        if l == 0 {
            zero()
        } else if l > self.jump_points.len() {
            one()
        } else {
            self.jump_points[l - 1].clone()
        }
    }

    /// Closure `[lo, hi]` of the region bidding index `l`, or `None` if empty.
    pub fn region(&self, l: usize) -> Option<(Rational, Rational)> {
        let lo = self.alpha(l);
        let hi = self.alpha(l + 1);
        if l == 0 || lo < hi {
            Some((lo, hi))
        } else {
            None
        }
    }

    /// Bid index at value `v`: minimal `l` with `v <= alpha_l`.
    pub fn bid_at(&self, v: &Rational) -> usize {
        self.jump_points
            .iter()
            .position(|a| v <= a)
            .unwrap_or(self.jump_points.len())
    }

    pub fn num_bids(&self) -> usize {
        self.jump_points.len() + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepStrategyProfile {
    strategies: Vec<StepStrategy>,
}

impl StepStrategyProfile {
    pub fn new(strategies: Vec<StepStrategy>) -> Self {
        Self { strategies }
    }

    pub fn strategy(&self, i: usize) -> &StepStrategy {
        &self.strategies[i]
    }

    pub fn strategies(&self) -> &[StepStrategy] {
        &self.strategies
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn density_integrates() {
        let d = PiecewiseConstantDensity::new(
            vec![zero(), rat(1, 4), one()],
            vec![rat(2, 1), rat(2, 3)],
        )
        .unwrap();
        assert_eq!(d.integral(&zero(), &rat(1, 8)), rat(1, 4));
        assert_eq!(d.integral(&rat(1, 8), &rat(1, 2)), rat(1, 4) + rat(1, 6));
        assert!(PiecewiseConstantDensity::new(vec![zero(), one()], vec![rat(1, 2)]).is_err());
    }

    #[test]
    fn step_semantics() {
        let b = BidSpace::new(vec![zero(), rat(1, 2), rat(3, 4)]).unwrap();
        let s = StepStrategy::new(vec![rat(1, 2), rat(3, 4)], &b).unwrap();
        assert_eq!(s.bid_at(&zero()), 0);
        assert_eq!(s.bid_at(&rat(1, 2)), 0);
        assert_eq!(s.bid_at(&rat(2, 3)), 1);
        assert_eq!(s.bid_at(&one()), 2);
        // bid 1/2 from value 1/4 overbids
        assert!(StepStrategy::new(vec![rat(1, 4), rat(3, 4)], &b).is_err());
        // empty middle region is fine
        let b2 = BidSpace::new(vec![zero(), rat(1, 4), rat(1, 2)]).unwrap();
        let t = StepStrategy::new(vec![rat(1, 2), rat(1, 2)], &b2).unwrap();
        assert_eq!(t.region(1), None);
        assert_eq!(t.bid_at(&rat(3, 5)), 2);
        assert!(StepStrategy::new(vec![rat(3, 4), rat(1, 2)], &b).is_err());
    }
}
