//! Symmetric monotone equilibria of iid auctions by support enumeration.

pub mod numeric;
pub mod support;
pub mod system;

use std::sync::Mutex;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::auction::{AuctionInstance, MixedStrategy, MixedStrategyProfile};
use crate::error::SolveError;
use crate::rational::{ceil_to_u64, int, one, rat, snap_f64, to_f64, zero, Pq, Rational};
use crate::transforms::shrink_bidspace;
use crate::verify::{is_eps_mbne, max_regret};

pub use numeric::{solve_system, NumericBudget, NumericSolution};
pub use support::{enumerate_structures, structure_count, SupportStructure, ValueSupport};
pub use system::{build_system, PolySystem, RowKind};

/// Denominator used when turning float probabilities into rationals.
pub const SNAP_DENOMINATOR: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy)]
pub struct SymmetricConfig {
    pub seed: u64,
    pub budget: NumericBudget,
    /// Shrink the bid space to `ceil(2/eps)` windows before solving.
    pub shrink: bool,
}

impl Default for SymmetricConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            budget: NumericBudget::default(),
            shrink: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SymmetricSolution {
    /// Symmetric profile on the instance's own bid space.
    pub profile: MixedStrategyProfile,
    pub structure: SupportStructure,
    /// Index in enumeration order of the returned structure.
    pub structure_index: usize,
    pub structures_total: u128,
    /// `M` when the bid space was shrunk.
    pub shrink_m: Option<u64>,
    pub max_regret: Rational,
}

/// `T(x)`: 0 at or below `delta`, 1 at or above 1, identity otherwise; rows
/// are then renormalized. Requires `delta <= 1/(3m)`.
pub fn round_solution(p: &[Vec<f64>], delta: &Rational, m: usize) -> Result<Vec<Vec<Rational>>, SolveError> {
    if delta > &rat(1, 3 * m as i64) {
        return Err(SolveError::Precondition(format!("delta = {} exceeds 1/(3m)", Pq(delta))));
    }
    p.iter()
        .map(|row| {
            let rounded: Vec<Rational> = row
                .iter()
                .map(|&x| {
                    let r = snap_f64(x, SNAP_DENOMINATOR);
                    if &r <= delta {
                        zero()
                    } else if r >= one() {
                        one()
                    } else {
                        r
                    }
                })
                .collect();
            let total: Rational = rounded.iter().sum();
            if total.is_zero() {
                return Err(SolveError::Infeasible("a row rounds to zero".into()));
            }
            Ok(rounded.into_iter().map(|x| x / &total).collect())
        })
        .collect()
}

/// Fills fixed rows and copies free rows into a strategy over the system's bids.
pub fn expand(sys: &PolySystem, p: &[Vec<Rational>]) -> MixedStrategy {
    let rows = sys
        .rows
        .iter()
        .zip(p)
        .map(|(kind, row)| match kind {
            RowKind::Fixed(l) => {
                let mut r = vec![zero(); sys.m()];
                r[*l] = one();
                r
            }
            RowKind::Free(bs) => {
                let mut r = vec![zero(); sys.m()];
                for &l in bs {
                    r[l] = row[l].clone();
                }
                r
            }
        })
        .collect();
    MixedStrategy::from_table(rows)
}

struct SearchContext<'a> {
    original: &'a AuctionInstance,
    work: AuctionInstance,
    /// Original bid index of each working bid, when shrunk.
    kept: Option<Vec<usize>>,
    eps: Rational,
    target: f64,
    delta: Rational,
    config: SymmetricConfig,
}

impl SearchContext<'_> {
    fn lift(&self, s: MixedStrategy) -> MixedStrategy {
        let Some(kept) = &self.kept else { return s };
        let full = self.original.bid_space().len();
        let rows = s
            .dists()
            .iter()
            .map(|row| {
                let mut r = vec![zero(); full];
                for (p, &l) in row.iter().zip(kept) {
                    r[l] = p.clone();
                }
                r
            })
            .collect();
        MixedStrategy::from_table(rows)
    }

    fn attempt(&self, xi: &SupportStructure, idx: usize) -> Result<MixedStrategyProfile, SolveError> {
        let sys = build_system(&self.work, xi)?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(idx as u64);
        let sol = solve_system(&sys, self.target, &self.config.budget, &mut rng)?;
        let rounded = round_solution(&sol.p, &self.delta, sys.m())?;
        let strategy = self.lift(expand(&sys, &rounded));
        let profile = MixedStrategyProfile::symmetric(strategy, self.original.n());
        let verdict = is_eps_mbne(self.original, &profile, &self.eps)?;
        if verdict.holds {
            Ok(profile)
        } else {
            Err(SolveError::Infeasible(format!(
                "rounded point has regret {}",
                to_f64(&verdict.regret)
            )))
        }
    }
}

/// Searches structures in lexicographic order and returns the first whose
/// rounded numeric solution verifies exactly as an `eps`-MBNE of `a`.
///
/// Structures are tried in parallel; the result does not depend on the
/// number of threads.
pub fn solve_symmetric(
    a: &AuctionInstance,
    eps: &Rational,
    config: &SymmetricConfig,
) -> Result<SymmetricSolution, SolveError> {
    if a.iid_parts().is_none() {
        return Err(SolveError::Precondition("instance is not iid".into()));
    }
    if eps <= &zero() {
        return Err(SolveError::Precondition("eps must be positive".into()));
    }
    let n = a.n() as i64;
    let (work, kept, shrink_m, inner_eps, delta) = if config.shrink {
        let big_m = ceil_to_u64(&(int(2) / eps))
            .ok_or_else(|| SolveError::Precondition("eps too small".into()))?;
        let s = shrink_bidspace(a.bid_space(), big_m)
            .map_err(|e| SolveError::Precondition(e.to_string()))?;
        let inner = eps / int(2);
        let delta = &inner / int(8 * big_m as i64 * n);
        (a.with_bid_space(s.bids.clone())?, Some(s.kept), Some(big_m), inner, delta)
    } else {
        let m = a.bid_space().len() as i64;
        (a.clone(), None, None, eps.clone(), eps / int(8 * m * n))
    };
    let m = work.bid_space().len();
    let k = work.value_space(0).len();
    let ctx = SearchContext {
        original: a,
        target: to_f64(&inner_eps) / 4.0,
        delta: delta.min(rat(1, 3 * m as i64)),
        eps: eps.clone(),
        kept,
        work,
        config: *config,
    };
    let structures: Vec<SupportStructure> = enumerate_structures(k, m).collect();
    let exhausted: Mutex<Option<f64>> = Mutex::new(None);
    let found = structures
        .par_iter()
        .enumerate()
        .find_map_first(|(idx, xi)| match ctx.attempt(xi, idx) {
            Ok(profile) => Some((idx, profile)),
            Err(SolveError::BudgetExhausted { best_residual, .. }) => {
                let mut g = exhausted.lock().expect("poisoned");
                *g = Some(g.map_or(best_residual, |b| b.min(best_residual)));
                None
            }
            Err(_) => None,
        });
    if let Some((idx, profile)) = found {
        let regret = max_regret(a, &profile)?.max_regret;
        return Ok(SymmetricSolution {
            profile,
            structure: structures[idx].clone(),
            structure_index: idx,
            structures_total: structure_count(k, m),
            shrink_m,
            max_regret: regret,
        });
    }
    match exhausted.into_inner().expect("poisoned") {
        Some(best_residual) => Err(SolveError::BudgetExhausted {
            work: structures.len() as u64 * config.budget.starts as u64 * config.budget.max_iters,
            best_residual,
        }),
        None => Err(SolveError::Infeasible(format!(
            "no structure out of {} produced a verified equilibrium",
            structures.len()
        ))),
    }
}
