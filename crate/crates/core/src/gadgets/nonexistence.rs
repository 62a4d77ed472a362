//! Two-bidder instance without approximate pure equilibria.

use crate::auction::{AuctionInstance, BidSpace, PriorPmf, ValueSpace};
use crate::error::GadgetError;
use crate::rational::{int, one, rat, zero, Rational};

fn check_m(m: u64) -> Result<(), GadgetError> {
    if m < 10 {
        return Err(GadgetError::Parameter(format!("M = {m}, need M >= 10")));
    }
    Ok(())
}

/// `q = (M-3)/(M-1) - 2/(3M)`, the mass on value 0.
pub fn nonexistence_q(m: u64) -> Rational {
    let m = m as i64;
    rat(m - 3, m - 1) - rat(2, 3 * m)
}

/// `1/(3M) - 2/M^2`: every eps below this admits no eps-PBNE.
pub fn nonexistence_threshold(m: u64) -> Rational {
    let m = m as i64;
    rat(1, 3 * m) - rat(2, m * m)
}

/// Two bidders, `V = {0, 1}`, `B = {0, 1/M, ..., 1}`, common prior `(q, 1-q)`.
pub fn nonexistence_instance(m: u64) -> Result<AuctionInstance, GadgetError> {
    check_m(m)?;
    let q = nonexistence_q(m);
    if q <= zero() || q >= one() {
        return Err(GadgetError::Parameter(format!("q is outside (0,1) for M = {m}")));
    }
    let values = ValueSpace::new(vec![zero(), one()])?;
    let prior = PriorPmf::new(vec![q.clone(), one() - q])?;
    Ok(AuctionInstance::iid(2, BidSpace::uniform(m), values, prior)?)
}

/// The eight terms of the helper chain, which should be nondecreasing:
/// `qM/2, q(M-2), (q+1)(M-3)/2, M-4, q(M-1), (q+1)(M-2)/2, M-3, (q+1)(M-1)/2`.
pub fn helper_chain(m: u64) -> Vec<Rational> {
    let q = nonexistence_q(m);
    let mm = int(m as i64);
    let half_q1 = (&q + one()) / int(2);
    vec![
        &q * &mm / int(2),
        &q * (&mm - int(2)),
        &half_q1 * (&mm - int(3)),
        &mm - int(4),
        &q * (&mm - int(1)),
        &half_q1 * (&mm - int(2)),
        &mm - int(3),
        &half_q1 * (&mm - int(1)),
    ]
}

pub fn helper_chain_holds(m: u64) -> bool {
    helper_chain(m).windows(2).all(|w| w[0] <= w[1])
}
