//! Pure-Circuit to well-supported equilibrium reduction.
//!
//! Bids are `{0, 1/4, 1/2, 3/4}`. A node bidder bidding `1/4` with
//! certainty reads as 1, never bidding `1/4` reads as 0.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::auction::{AuctionInstance, BidSpace, MixedStrategyProfile, PriorPmf, PureStrategyProfile, ValueSpace};
use crate::error::GadgetError;
use crate::rational::{ceil_to_u64, one, rat, zero, Pq, Rational};
use crate::verify::utility_grid;

use super::netlist::{parse_lines, NetlistLine};

/// Upper limit on bidders in exact mode.
pub const MAX_BIDDERS: usize = 5_000;
/// Minimum bidder count in exact mode.
pub const EXACT_MIN_BIDDERS: usize = 1_000;

pub fn pc_bids() -> BidSpace {
    BidSpace::new(vec![zero(), rat(1, 4), rat(1, 2), rat(3, 4)]).expect("static bid space")
}

/// Largest eps for which the reduction is sound.
pub fn pc_eps_bound() -> Rational {
    rat(1, 36)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcGate {
    Not { x: usize, y: usize },
    And { x: usize, y: usize, z: usize },
    Purify { x: usize, y: usize, z: usize },
}

impl PcGate {
    pub fn inputs(&self) -> Vec<usize> {
        match *self {
            Self::Not { x, .. } | Self::Purify { x, .. } => vec![x],
            Self::And { x, y, .. } => vec![x, y],
        }
    }

    pub fn outputs(&self) -> Vec<usize> {
        match *self {
            Self::Not { y, .. } => vec![y],
            Self::And { z, .. } => vec![z],
            Self::Purify { y, z, .. } => vec![y, z],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Trit {
    Zero,
    One,
    Bot,
}

impl fmt::Display for Trit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trit::Zero => "0",
            Trit::One => "1",
            Trit::Bot => "bot",
        })
    }
}

/// Nodes and gates; every node is the output of exactly one gate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PureCircuitInstance {
    names: Vec<String>,
    gates: Vec<PcGate>,
    /// Producing gate of each node.
    producer: Vec<usize>,
}

impl PureCircuitInstance {
    pub fn new(names: Vec<String>, gates: Vec<PcGate>) -> Result<Self, GadgetError> {
        let n = names.len();
        let bad = |m: String| Err(GadgetError::Circuit(m));
        let mut producer = vec![usize::MAX; n];
        for (g, gate) in gates.iter().enumerate() {
            let mut nodes = gate.inputs();
            nodes.extend(gate.outputs());
            if nodes.iter().any(|&x| x >= n) {
                return bad(format!("gate {g} refers to an unknown node"));
            }
            let mut sorted = nodes.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != nodes.len() {
                return bad(format!("gate {g} uses a node twice"));
            }
            for o in gate.outputs() {
                if producer[o] != usize::MAX {
                    return bad(format!("node {:?} is the output of two gates", names[o]));
                }
                producer[o] = g;
            }
        }
        if let Some(x) = producer.iter().position(|&p| p == usize::MAX) {
            return bad(format!("node {:?} is not the output of any gate", names[x]));
        }
        Ok(Self { names, gates, producer })
    }

    /// Netlist form: `y = NOT x`, `z = AND x y`, `y z = PURIFY x`.
    pub fn parse(text: &str) -> Result<Self, GadgetError> {
        let mut names: Vec<String> = Vec::new();
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        let mut id = |s: &str, names: &mut Vec<String>| -> usize {
            *index.entry(s.to_string()).or_insert_with(|| {
                names.push(s.to_string());
                names.len() - 1
            })
        };
        let mut gates = Vec::new();
        for line in parse_lines(text)? {
            let NetlistLine::Gate {
                line,
                outputs,
                op,
                args,
            } = line
            else {
                let line = match line {
                    NetlistLine::Input { line, .. } | NetlistLine::Output { line, .. } => line,
                    NetlistLine::Gate { line, .. } => line,
                };
                return Err(GadgetError::Netlist {
                    line,
                    msg: "pure circuits take gate lines only".into(),
                });
            };
            let arity = |o: usize, i: usize| {
                if outputs.len() == o && args.len() == i {
                    Ok(())
                } else {
                    Err(GadgetError::Netlist {
                        line,
                        msg: format!("{op} takes {o} output(s) and {i} input(s)"),
                    })
                }
            };
            let gate = match op.as_str() {
                "NOT" => {
                    arity(1, 1)?;
                    PcGate::Not {
                        x: id(&args[0], &mut names),
                        y: id(&outputs[0], &mut names),
                    }
                }
                "AND" => {
                    arity(1, 2)?;
                    PcGate::And {
                        x: id(&args[0], &mut names),
                        y: id(&args[1], &mut names),
                        z: id(&outputs[0], &mut names),
                    }
                }
                "PURIFY" => {
                    arity(2, 1)?;
                    PcGate::Purify {
                        x: id(&args[0], &mut names),
                        y: id(&outputs[0], &mut names),
                        z: id(&outputs[1], &mut names),
                    }
                }
                other => {
                    return Err(GadgetError::Netlist {
                        line,
                        msg: format!("unsupported gate {other}"),
                    })
                }
            };
            gates.push(gate);
        }
        Self::new(names, gates)
    }

    pub fn to_netlist(&self) -> String {
        let nm = |x: usize| self.names[x].as_str();
        self.gates
            .iter()
            .map(|g| match *g {
                PcGate::Not { x, y } => format!("{} = NOT {}\n", nm(y), nm(x)),
                PcGate::And { x, y, z } => format!("{} = AND {} {}\n", nm(z), nm(x), nm(y)),
                PcGate::Purify { x, y, z } => format!("{} {} = PURIFY {}\n", nm(y), nm(z), nm(x)),
            })
            .collect()
    }

    pub fn num_nodes(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn node(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn gates(&self) -> &[PcGate] {
        &self.gates
    }

    pub fn producer(&self, x: usize) -> &PcGate {
        &self.gates[self.producer[x]]
    }

    /// Index of the first gate whose conditions `assignment` violates.
    pub fn first_violation(&self, assignment: &[Trit]) -> Option<usize> {
        use Trit::*;
        self.gates.iter().position(|g| match *g {
            PcGate::Not { x, y } => match assignment[x] {
                Zero => assignment[y] != One,
                One => assignment[y] != Zero,
                Bot => false,
            },
            PcGate::And { x, y, z } => {
                let (a, b, c) = (assignment[x], assignment[y], assignment[z]);
                (a == One && b == One && c != One) || ((a == Zero || b == Zero) && c != Zero)
            }
            PcGate::Purify { x, y, z } => {
                let (a, b, c) = (assignment[x], assignment[y], assignment[z]);
                (b == Bot && c == Bot) || (a != Bot && (b != a || c != a))
            }
        })
    }

    pub fn is_satisfied_by(&self, assignment: &[Trit]) -> bool {
        assignment.len() == self.num_nodes() && self.first_violation(assignment).is_none()
    }

    /// Value of the bidder for node `x`, fixed by its producing gate.
    pub fn node_value(&self, x: usize) -> Rational {
        match *self.producer(x) {
            PcGate::Not { .. } => rat(5, 8),
            PcGate::And { .. } => rat(7, 12),
            PcGate::Purify { y, .. } if y == x => rat(9, 16),
            PcGate::Purify { .. } => rat(11, 16),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PaddingMode {
    /// No padding bidders; gadget-level margins only.
    Small,
    /// Pad to `n >= max(1000, 1/(1/36 - eps))` value-0 bidders.
    Exact { eps: Rational },
}

#[derive(Debug, Clone)]
pub struct PureCircuitReduction {
    pub circuit: PureCircuitInstance,
    pub auction: AuctionInstance,
    pub node_bidder: Vec<usize>,
    /// Auxiliary bidder of each NOT output node.
    pub aux_bidder: Vec<Option<usize>>,
    pub c_bidders: [usize; 2],
    pub const_bidder: usize,
    pub padding: usize,
}

impl PureCircuitReduction {
    pub fn bidder_of(&self, name: &str) -> Option<usize> {
        self.circuit.node(name).map(|x| self.node_bidder[x])
    }
}

fn target_size(base: usize, mode: &PaddingMode) -> Result<usize, GadgetError> {
    match mode {
        PaddingMode::Small => Ok(base),
        PaddingMode::Exact { eps } => {
            let gap = pc_eps_bound() - eps;
            if eps < &zero() || gap <= zero() {
                return Err(GadgetError::Parameter(format!("eps = {} must lie in [0, 1/36)", Pq(eps))));
            }
            let need = ceil_to_u64(&(one() / gap)).unwrap_or(u64::MAX);
            let n = (need.min(usize::MAX as u64) as usize).max(EXACT_MIN_BIDDERS).max(base);
            if n > MAX_BIDDERS {
                return Err(GadgetError::Parameter(format!(
                    "eps = {} needs {n} bidders, over the limit of {MAX_BIDDERS}",
                    Pq(eps)
                )));
            }
            Ok(n)
        }
    }
}

/// Builds the auction: two `C` bidders, the constant bidder, one bidder per
/// node, one auxiliary bidder per NOT gate, then padding.
pub fn pure_circuit_to_dfpa(pc: &PureCircuitInstance, mode: &PaddingMode) -> Result<PureCircuitReduction, GadgetError> {
    let nodes = pc.num_nodes();
    let c_bidders = [0, 1];
    let const_bidder = 2;
    let node_bidder: Vec<usize> = (0..nodes).map(|x| 3 + x).collect();
    let mut aux_bidder = vec![None; nodes];
    let mut next = 3 + nodes;
    for g in pc.gates() {
        if let PcGate::Not { y, .. } = *g {
            aux_bidder[y] = Some(next);
            next += 1;
        }
    }
    let base = next;
    let n = target_size(base, mode)?;
    let sp = |v: Rational| ValueSpace::new(vec![zero(), v]).expect("value in (0,1]");
    let mut values = vec![sp(rat(1, 2)), sp(rat(1, 2)), sp(one())];
    values.extend((0..nodes).map(|x| sp(pc.node_value(x))));
    values.extend(aux_bidder.iter().flatten().map(|_| sp(rat(13, 14))));
    values.extend((base..n).map(|_| ValueSpace::new(vec![zero()]).expect("singleton")));
    let mut priors: Vec<Vec<Option<PriorPmf>>> = (0..n)
        .map(|i| (0..n).map(|j| (i != j).then(|| PriorPmf::point(values[j].len(), 0))).collect())
        .collect();
    let high = || PriorPmf::point(2, 1);
    for c in c_bidders {
        priors[const_bidder][c] = Some(high());
    }
    for g in pc.gates() {
        match *g {
            PcGate::And { x, y, z } => {
                priors[node_bidder[z]][node_bidder[x]] = Some(high());
                priors[node_bidder[z]][node_bidder[y]] = Some(high());
            }
            PcGate::Purify { x, y, z } => {
                priors[node_bidder[y]][node_bidder[x]] = Some(high());
                priors[node_bidder[z]][node_bidder[x]] = Some(high());
            }
            PcGate::Not { x, y } => {
                let aux = aux_bidder[y].expect("assigned above");
                priors[aux][node_bidder[x]] = Some(high());
                priors[aux][const_bidder] = Some(high());
                priors[node_bidder[y]][aux] = Some(PriorPmf::new(vec![rat(1, 9), rat(8, 9)])?);
            }
        }
    }
    let auction = AuctionInstance::new(pc_bids(), values, priors)?;
    Ok(PureCircuitReduction {
        circuit: pc.clone(),
        auction,
        node_bidder,
        aux_bidder,
        c_bidders,
        const_bidder,
        padding: n - base,
    })
}

/// Reads each node off the mass its bidder puts on `1/4` at its high value.
pub fn extract_assignment(red: &PureCircuitReduction, profile: &MixedStrategyProfile) -> Vec<Trit> {
    red.node_bidder
        .iter()
        .map(|&b| {
            let p = &profile.strategy(b).dist(1)[1];
            if p.is_one() {
                Trit::One
            } else if p.is_zero() {
                Trit::Zero
            } else {
                Trit::Bot
            }
        })
        .collect()
}

/// Sequential pure best-response dynamics from `start`, visiting bidders in
/// a fresh seeded order each sweep. Bidders whose only value is 0 are
/// skipped. A bidder keeps its bid when it is already a best response,
/// otherwise moves to the lowest best response. Returns the profile once a
/// full sweep changes nothing (an exact PBNE).
pub fn best_response_dynamics(
    a: &AuctionInstance,
    start: PureStrategyProfile,
    max_sweeps: usize,
    seed: u64,
) -> Result<Option<PureStrategyProfile>, GadgetError> {
    let m = a.bid_space().len();
    let mut active: Vec<usize> = (0..a.n())
        .filter(|&i| a.value_space(i).values().iter().any(|v| !v.is_zero()))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bids = start.bids;
    for _ in 0..max_sweeps {
        let mut changed = false;
        active.shuffle(&mut rng);
        for &i in &active {
            let profile = PureStrategyProfile::new(bids.clone()).to_mixed(m);
            let grid = utility_grid(a, i, &profile)?;
            for (v, row) in grid.iter().enumerate() {
                let value = a.value_space(i).get(v);
                let allowed: Vec<usize> = (0..m).filter(|&b| a.bid_space().get(b) <= value).collect();
                let best = allowed.iter().map(|&b| &row[b]).max().cloned().unwrap_or_else(zero);
                if row[bids[i][v]] != best || !allowed.contains(&bids[i][v]) {
                    bids[i][v] = *allowed.iter().find(|&&b| row[b] == best).expect("bid 0 is allowed");
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(Some(PureStrategyProfile::new(bids)));
        }
    }
    Ok(None)
}

/// Bidder count of the exact-mode reduction for `eps`.
pub fn exact_bidders(pc: &PureCircuitInstance, eps: &Rational) -> Result<usize, GadgetError> {
    let nots = pc.gates().iter().filter(|g| matches!(g, PcGate::Not { .. })).count();
    target_size(3 + pc.num_nodes() + nots, &PaddingMode::Exact { eps: eps.clone() })
}

/// `1/(1/36 - eps)`, the bidder count the soundness argument needs beyond 1000.
pub fn required_bidders(eps: &Rational) -> Rational {
    one() / (pc_eps_bound() - eps)
}
