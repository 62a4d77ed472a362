//! Circuit-SAT to pure-equilibrium reduction over OR, NOT and SPLIT gates.
//!
//! Every bidder has values `{0, 9/40, 1}` and bids `{0, 1/10, 1/5, 3/10}`.
//! False and true are the strategies `s0 = (0, 1/10, 1/5)` and
//! `s1 = (0, 1/5, 3/10)`, written as bid indices `(0,1,2)` and `(0,2,3)`.

use std::collections::{BTreeMap, VecDeque};

use crate::auction::{AuctionInstance, BidSpace, PriorPmf, PureStrategyProfile, ValueSpace};
use crate::error::GadgetError;
use crate::rational::{one, rat, zero, Rational};
use crate::verify::{best_responses, is_eps_pbne};

use super::best_bid;
use super::netlist::{parse_lines, NetlistLine};

pub const S0: [usize; 3] = [0, 1, 2];
pub const S1: [usize; 3] = [0, 2, 3];
/// Largest input count for which assignments are enumerated.
pub const MAX_ENUMERATED_INPUTS: usize = 16;
/// Reductions are padded with value-0 bidders up to this size; below it the
/// `b0` utility `v/n` can come within the uniqueness margin of `b1`.
pub const CIRCUIT_MIN_BIDDERS: usize = 8;

pub fn circuit_values() -> ValueSpace {
    ValueSpace::new(vec![zero(), rat(9, 40), one()]).expect("static value space")
}

pub fn circuit_bids() -> BidSpace {
    BidSpace::new(vec![zero(), rat(1, 10), rat(1, 5), rat(3, 10)]).expect("static bid space")
}

/// Largest eps (after scaling) at which the gadget best responses are unique.
pub fn circuit_eps_bound() -> Rational {
    rat(1, 180)
}

/// `0` w.p. 6/100, `9/40` w.p. 94/100.
pub fn projection_prior() -> PriorPmf {
    PriorPmf::new(vec![rat(6, 100), rat(94, 100), zero()]).expect("static prior")
}

/// `0` w.p. 6/100, `1` w.p. 94/100.
pub fn negation_prior() -> PriorPmf {
    PriorPmf::new(vec![rat(6, 100), zero(), rat(94, 100)]).expect("static prior")
}

/// Prior of `k` about the circuit output: `0` or `9/40`, each w.p. 1/2.
pub fn output_prior() -> PriorPmf {
    PriorPmf::new(vec![rat(1, 2), rat(1, 2), zero()]).expect("static prior")
}

/// Mutual prior of `k` and `l`: `0` w.p. 8/11, `1` w.p. 3/11.
pub fn clash_prior() -> PriorPmf {
    PriorPmf::new(vec![rat(8, 11), zero(), rat(3, 11)]).expect("static prior")
}

pub fn zero_prior() -> PriorPmf {
    PriorPmf::point(3, 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircuitGate {
    Or { a: usize, b: usize, out: usize },
    Not { input: usize, out: usize },
    Split { input: usize, outs: [usize; 2] },
}

impl CircuitGate {
    pub fn inputs(&self) -> Vec<usize> {
        match *self {
            Self::Or { a, b, .. } => vec![a, b],
            Self::Not { input, .. } | Self::Split { input, .. } => vec![input],
        }
    }

    pub fn outputs(&self) -> Vec<usize> {
        match *self {
            Self::Or { out, .. } | Self::Not { out, .. } => vec![out],
            Self::Split { outs, .. } => outs.to_vec(),
        }
    }

    fn map_inputs(&mut self, mut f: impl FnMut(usize) -> usize) {
        match self {
            Self::Or { a, b, .. } => {
                *a = f(*a);
                *b = f(*b);
            }
            Self::Not { input, .. } | Self::Split { input, .. } => *input = f(*input),
        }
    }
}

/// A Boolean circuit with designated inputs and one output. Gates are kept
/// in topological order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitInstance {
    names: Vec<String>,
    inputs: Vec<usize>,
    gates: Vec<CircuitGate>,
    output: usize,
}

impl CircuitInstance {
    pub fn new(
        names: Vec<String>,
        inputs: Vec<usize>,
        gates: Vec<CircuitGate>,
        output: usize,
    ) -> Result<Self, GadgetError> {
        let n = names.len();
        let bad = |m: String| Err(GadgetError::Circuit(m));
        let mut seen = BTreeMap::new();
        for (i, name) in names.iter().enumerate() {
            if seen.insert(name.as_str(), i).is_some() {
                return bad(format!("duplicate node name {name:?}"));
            }
        }
        if output >= n || inputs.iter().any(|&x| x >= n) {
            return bad("node index out of range".into());
        }
        let mut producer: Vec<Option<usize>> = vec![None; n];
        for (g, gate) in gates.iter().enumerate() {
            if gate.inputs().iter().chain(&gate.outputs()).any(|&x| x >= n) {
                return bad(format!("gate {g} refers to an unknown node"));
            }
            if let CircuitGate::Split { outs, .. } = gate {
                if outs[0] == outs[1] {
                    return bad(format!("split gate {g} repeats its output"));
                }
            }
            for o in gate.outputs() {
                if producer[o].replace(g).is_some() {
                    return bad(format!("node {:?} has two producing gates", names[o]));
                }
            }
        }
        let mut is_input = vec![false; n];
        for &x in &inputs {
            if is_input[x] {
                return bad(format!("input {:?} is listed twice", names[x]));
            }
            is_input[x] = true;
        }
        for x in 0..n {
            match (is_input[x], producer[x].is_some()) {
                (true, true) => return bad(format!("input {:?} is produced by a gate", names[x])),
                (false, false) => return bad(format!("node {:?} has no producing gate", names[x])),
                _ => {}
            }
        }
        // Kahn's algorithm, keeping the given order among ready gates
        let mut pending: Vec<usize> = gates
            .iter()
            .map(|g| g.inputs().iter().filter(|&&x| !is_input[x]).count())
            .collect();
        let mut users: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (g, gate) in gates.iter().enumerate() {
            for x in gate.inputs() {
                users[x].push(g);
            }
        }
        let mut ready: VecDeque<usize> = (0..gates.len()).filter(|&g| pending[g] == 0).collect();
        let mut order = Vec::with_capacity(gates.len());
        while let Some(g) = ready.pop_front() {
            order.push(gates[g]);
            for o in gates[g].outputs() {
                for &u in &users[o] {
                    pending[u] -= 1;
                    if pending[u] == 0 {
                        ready.push_back(u);
                    }
                }
            }
        }
        if order.len() != gates.len() {
            return bad("circuit has a cycle".into());
        }
        Ok(Self {
            names,
            inputs,
            gates: order,
            output,
        })
    }

    /// Parses the netlist form (`y = OR a b`, `y = NOT x`, `y z = SPLIT x`,
    /// `input a b`, `output y`). Undeclared unproduced nodes become inputs.
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
        let mut declared = Vec::new();
        let mut output = None;
        for line in parse_lines(text)? {
            match line {
                NetlistLine::Gate {
                    line,
                    outputs,
                    op,
                    args,
                } => {
                    let err = |msg: String| GadgetError::Netlist { line, msg };
                    let arity = |o: usize, i: usize| {
                        if outputs.len() == o && args.len() == i {
                            Ok(())
                        } else {
                            Err(err(format!("{op} takes {o} output(s) and {i} input(s)")))
                        }
                    };
                    let gate = match op.as_str() {
                        "OR" => {
                            arity(1, 2)?;
                            CircuitGate::Or {
                                a: id(&args[0], &mut names),
                                b: id(&args[1], &mut names),
                                out: id(&outputs[0], &mut names),
                            }
                        }
                        "NOT" => {
                            arity(1, 1)?;
                            CircuitGate::Not {
                                input: id(&args[0], &mut names),
                                out: id(&outputs[0], &mut names),
                            }
                        }
                        "SPLIT" => {
                            arity(2, 1)?;
                            CircuitGate::Split {
                                input: id(&args[0], &mut names),
                                outs: [id(&outputs[0], &mut names), id(&outputs[1], &mut names)],
                            }
                        }
                        other => return Err(err(format!("unsupported gate {other}"))),
                    };
                    gates.push(gate);
                }
                NetlistLine::Input { names: xs, .. } => {
                    for x in xs {
                        declared.push(id(&x, &mut names));
                    }
                }
                NetlistLine::Output { line, name } => {
                    if output.is_some() {
                        return Err(GadgetError::Netlist {
                            line,
                            msg: "output declared twice".into(),
                        });
                    }
                    output = Some(id(&name, &mut names));
                }
            }
        }
        let output = output.ok_or_else(|| GadgetError::Circuit("no output declared".into()))?;
        let mut produced = vec![false; names.len()];
        for g in &gates {
            for o in g.outputs() {
                produced[o] = true;
            }
        }
        let mut inputs = declared.clone();
        inputs.extend((0..names.len()).filter(|&x| !produced[x] && !declared.contains(&x)));
        Self::new(names, inputs, gates, output)
    }

    pub fn to_netlist(&self) -> String {
        let nm = |x: usize| self.names[x].as_str();
        let mut s = String::new();
        s.push_str("input");
        for &x in &self.inputs {
            s.push(' ');
            s.push_str(nm(x));
        }
        s.push('\n');
        for g in &self.gates {
            let line = match *g {
                CircuitGate::Or { a, b, out } => format!("{} = OR {} {}", nm(out), nm(a), nm(b)),
                CircuitGate::Not { input, out } => format!("{} = NOT {}", nm(out), nm(input)),
                CircuitGate::Split { input, outs } => {
                    format!("{} {} = SPLIT {}", nm(outs[0]), nm(outs[1]), nm(input))
                }
            };
            s.push_str(&line);
            s.push('\n');
        }
        s.push_str(&format!("output {}\n", nm(self.output)));
        s
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

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn gates(&self) -> &[CircuitGate] {
        &self.gates
    }

    pub fn output(&self) -> usize {
        self.output
    }

    /// Value of every node under the given input assignment.
    pub fn evaluate(&self, inputs: &[bool]) -> Result<Vec<bool>, GadgetError> {
        if inputs.len() != self.inputs.len() {
            return Err(GadgetError::Circuit(format!(
                "{} input values for {} inputs",
                inputs.len(),
                self.inputs.len()
            )));
        }
        let mut val = vec![false; self.num_nodes()];
        for (&x, &b) in self.inputs.iter().zip(inputs) {
            val[x] = b;
        }
        for g in &self.gates {
            match *g {
                CircuitGate::Or { a, b, out } => val[out] = val[a] || val[b],
                CircuitGate::Not { input, out } => val[out] = !val[input],
                CircuitGate::Split { input, outs } => {
                    val[outs[0]] = val[input];
                    val[outs[1]] = val[input];
                }
            }
        }
        Ok(val)
    }

    pub fn is_satisfied_by(&self, inputs: &[bool]) -> Result<bool, GadgetError> {
        Ok(self.evaluate(inputs)?[self.output])
    }

    /// Rewrites the circuit so that every node feeds at most one gate input,
    /// inserting chains of SPLIT gates. Copies of `x` are named `x#1`, `x#2`, ...
    pub fn with_single_fanout(&self) -> Result<Self, GadgetError> {
        let mut uses = vec![0usize; self.num_nodes()];
        for g in &self.gates {
            for x in g.inputs() {
                uses[x] += 1;
            }
        }
        let mut names = self.names.clone();
        let mut gates = Vec::new();
        let mut copies: Vec<VecDeque<usize>> = vec![VecDeque::new(); self.num_nodes()];
        let fresh = |name: String, names: &mut Vec<String>| {
            names.push(name);
            names.len() - 1
        };
        for x in 0..self.num_nodes() {
            if uses[x] < 2 {
                continue;
            }
            let mut src = x;
            for c in 1..uses[x] {
                let copy = fresh(format!("{}#{c}", self.names[x]), &mut names);
                let rest = if c + 1 == uses[x] {
                    fresh(format!("{}#{}", self.names[x], c + 1), &mut names)
                } else {
                    fresh(format!("{}#t{c}", self.names[x]), &mut names)
                };
                gates.push(CircuitGate::Split {
                    input: src,
                    outs: [copy, rest],
                });
                copies[x].push_back(copy);
                if c + 1 == uses[x] {
                    copies[x].push_back(rest);
                }
                src = rest;
            }
        }
        for g in &self.gates {
            let mut g = *g;
            g.map_inputs(|x| copies[x].pop_front().unwrap_or(x));
            gates.push(g);
        }
        Self::new(names, self.inputs.clone(), gates, self.output)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircuitRole {
    /// Primary bidder of an input node.
    Input(usize),
    /// Second bidder of the input pair.
    InputPartner(usize),
    /// OR bidder, before its projection.
    OrRaw(usize),
    /// NOT bidder, before its projection.
    NotRaw(usize),
    /// Projection carrying the node's value.
    Projection(usize),
    OutputK,
    OutputL,
    /// Value-0 bidder, only present to raise `n`.
    Padding,
}

#[derive(Debug, Clone)]
pub struct CircuitReduction {
    /// The circuit after fan-out normalization; node indices refer to it.
    pub circuit: CircuitInstance,
    pub auction: AuctionInstance,
    /// Bidder carrying each node's value.
    pub node_bidder: Vec<usize>,
    pub roles: Vec<CircuitRole>,
    pub output_k: usize,
    pub output_l: usize,
}

impl CircuitReduction {
    pub fn bidder_of(&self, name: &str) -> Option<usize> {
        self.circuit.node(name).map(|x| self.node_bidder[x])
    }
}

/// Builds the auction; guarantees an eps-PBNE for eps below 1/180 exactly
/// when the circuit is satisfiable.
pub fn circuit_to_dfpa(c: &CircuitInstance) -> Result<CircuitReduction, GadgetError> {
    let circuit = c.with_single_fanout()?;
    let mut roles = Vec::new();
    // (observer, observed, prior)
    let mut sees: Vec<(usize, usize, PriorPmf)> = Vec::new();
    let mut node_bidder = vec![usize::MAX; circuit.num_nodes()];
    for &x in circuit.inputs() {
        let (p, q) = (roles.len(), roles.len() + 1);
        roles.push(CircuitRole::Input(x));
        roles.push(CircuitRole::InputPartner(x));
        sees.push((p, q, projection_prior()));
        sees.push((q, p, projection_prior()));
        node_bidder[x] = p;
    }
    for g in circuit.gates() {
        match *g {
            CircuitGate::Or { a, b, out } => {
                let raw = roles.len();
                roles.push(CircuitRole::OrRaw(out));
                sees.push((raw, node_bidder[a], projection_prior()));
                sees.push((raw, node_bidder[b], projection_prior()));
                let proj = roles.len();
                roles.push(CircuitRole::Projection(out));
                sees.push((proj, raw, projection_prior()));
                node_bidder[out] = proj;
            }
            CircuitGate::Not { input, out } => {
                let raw = roles.len();
                roles.push(CircuitRole::NotRaw(out));
                sees.push((raw, node_bidder[input], negation_prior()));
                let proj = roles.len();
                roles.push(CircuitRole::Projection(out));
                sees.push((proj, raw, projection_prior()));
                node_bidder[out] = proj;
            }
            CircuitGate::Split { input, outs } => {
                for o in outs {
                    let proj = roles.len();
                    roles.push(CircuitRole::Projection(o));
                    sees.push((proj, node_bidder[input], projection_prior()));
                    node_bidder[o] = proj;
                }
            }
        }
    }
    let k = roles.len();
    let l = k + 1;
    roles.push(CircuitRole::OutputK);
    roles.push(CircuitRole::OutputL);
    sees.push((k, node_bidder[circuit.output()], output_prior()));
    sees.push((k, l, clash_prior()));
    sees.push((l, k, clash_prior()));
    let active = roles.len();
    while roles.len() < CIRCUIT_MIN_BIDDERS {
        roles.push(CircuitRole::Padding);
    }
    let auction = gadget_auction(active, roles.len(), &sees)?;
    Ok(CircuitReduction {
        circuit,
        auction,
        node_bidder,
        roles,
        output_k: k,
        output_l: l,
    })
}

/// `n` bidders: the first `active` on the circuit spaces, the rest with the
/// single value 0. All priors are the zero point mass except the listed
/// `(observer, observed, prior)` triples.
pub fn gadget_auction(
    active: usize,
    n: usize,
    sees: &[(usize, usize, PriorPmf)],
) -> Result<AuctionInstance, GadgetError> {
    let values: Vec<ValueSpace> = (0..n)
        .map(|i| {
            if i < active {
                circuit_values()
            } else {
                ValueSpace::new(vec![zero()]).expect("singleton")
            }
        })
        .collect();
    let mut priors: Vec<Vec<Option<PriorPmf>>> = (0..n)
        .map(|i| (0..n).map(|j| (i != j).then(|| PriorPmf::point(values[j].len(), 0))).collect())
        .collect();
    for (i, j, f) in sees {
        priors[*i][*j] = Some(f.clone());
    }
    Ok(AuctionInstance::new(circuit_bids(), values, priors)?)
}

/// Pure profile in which input pairs play the encoding of `inputs` and every
/// gate bidder plays its best response, in topological order. The output
/// gadget bidders are left at the all-zero strategy.
pub fn propagate(red: &CircuitReduction, inputs: &[bool]) -> Result<Vec<Vec<usize>>, GadgetError> {
    let c = &red.circuit;
    c.evaluate(inputs)?;
    let a = &red.auction;
    let mut bids: Vec<Vec<usize>> = (0..a.n()).map(|i| vec![0; a.value_space(i).len()]).collect();
    for (i, role) in red.roles.iter().enumerate() {
        match *role {
            CircuitRole::Input(x) | CircuitRole::InputPartner(x) => {
                let pos = c.inputs().iter().position(|&y| y == x).expect("input node");
                bids[i] = if inputs[pos] { S1 } else { S0 }.to_vec();
            }
            CircuitRole::OutputK | CircuitRole::OutputL | CircuitRole::Padding => {}
            _ => respond(a, i, &mut bids, &[1, 2])?,
        }
    }
    Ok(bids)
}

fn respond(a: &AuctionInstance, i: usize, bids: &mut [Vec<usize>], values: &[usize]) -> Result<(), GadgetError> {
    let m = a.bid_space().len();
    for &v in values {
        let profile = PureStrategyProfile::new(bids.to_vec()).to_mixed(m);
        bids[i][v] = best_bid(a, i, v, &profile)?;
    }
    Ok(())
}

/// Exact PBNE for a satisfying input assignment: `k` plays `(0, x, 3)` and
/// `l` plays `(0, x', 1)`, with `x, x'` their best responses at `9/40`.
pub fn assignment_to_pbne(red: &CircuitReduction, inputs: &[bool]) -> Result<PureStrategyProfile, GadgetError> {
    if !red.circuit.is_satisfied_by(inputs)? {
        return Err(GadgetError::Circuit("assignment does not satisfy the circuit".into()));
    }
    let mut bids = propagate(red, inputs)?;
    let (k, l) = (red.output_k, red.output_l);
    bids[k] = vec![0, 0, 3];
    bids[l] = vec![0, 0, 1];
    respond(&red.auction, l, &mut bids, &[1])?;
    respond(&red.auction, k, &mut bids, &[1])?;
    let profile = PureStrategyProfile::new(bids);
    let verdict = is_eps_pbne(&red.auction, &profile, &zero())?;
    if !verdict.holds {
        return Err(GadgetError::Circuit(format!(
            "constructed profile is not an exact PBNE: {:?}",
            verdict.witness
        )));
    }
    Ok(profile)
}

/// Best-response tables of the output gadget at value 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputGadgetTables {
    /// `k_best[c]`: eps-best bids of `k` when `l` bids `c` at value 1.
    pub k_best: Vec<Vec<usize>>,
    /// `l_best[c]`: eps-best bids of `l` when `k` bids `c` at value 1.
    pub l_best: Vec<Vec<usize>>,
    /// `(k bid, l bid)` pairs of mutual eps-best responses.
    pub fixed_points: Vec<(usize, usize)>,
}

/// Tables for the profile induced by `inputs`; the value-`9/40` bids of `k`
/// and `l` do not affect either table.
pub fn output_gadget_tables(
    red: &CircuitReduction,
    inputs: &[bool],
    eps: &Rational,
) -> Result<OutputGadgetTables, GadgetError> {
    let bids = propagate(red, inputs)?;
    let a = &red.auction;
    let (k, l) = (red.output_k, red.output_l);
    let m = a.bid_space().len();
    let table = |me: usize, other: usize| -> Result<Vec<Vec<usize>>, GadgetError> {
        (0..m)
            .map(|c| {
                let mut b = bids.clone();
                b[other] = vec![0, 0, c];
                let profile = PureStrategyProfile::new(b).to_mixed(m);
                Ok(best_responses(a, me, 2, &profile, eps)?)
            })
            .collect()
    };
    let k_best = table(k, l)?;
    let l_best = table(l, k)?;
    let mut fixed_points = Vec::new();
    for (lb, ks) in k_best.iter().enumerate() {
        for &kb in ks {
            if l_best[kb].contains(&lb) {
                fixed_points.push((kb, lb));
            }
        }
    }
    Ok(OutputGadgetTables {
        k_best,
        l_best,
        fixed_points,
    })
}

/// All input assignments in binary counting order, first input most significant.
pub fn all_assignments(count: usize) -> Result<Vec<Vec<bool>>, GadgetError> {
    if count > MAX_ENUMERATED_INPUTS {
        return Err(GadgetError::TooLarge(1u128 << count.min(127)));
    }
    Ok((0..1usize << count)
        .map(|mask| (0..count).map(|i| mask >> (count - 1 - i) & 1 == 1).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_evaluate() {
        let c = CircuitInstance::parse("n = NOT x\ny = OR x n\noutput y\n").unwrap();
        assert_eq!(c.inputs().len(), 1);
        assert!(c.is_satisfied_by(&[false]).unwrap());
        assert!(c.is_satisfied_by(&[true]).unwrap());
        let again = CircuitInstance::parse(&c.to_netlist()).unwrap();
        assert_eq!(again.evaluate(&[true]).unwrap(), c.evaluate(&[true]).unwrap());
    }

    #[test]
    fn fanout_is_split() {
        let c = CircuitInstance::parse("n = NOT x\ny = OR x n\noutput y\n").unwrap();
        let s = c.with_single_fanout().unwrap();
        assert_eq!(s.gates().iter().filter(|g| matches!(g, CircuitGate::Split { .. })).count(), 1);
        for v in [false, true] {
            assert_eq!(s.is_satisfied_by(&[v]).unwrap(), c.is_satisfied_by(&[v]).unwrap());
        }
        let mut uses = vec![0; s.num_nodes()];
        for g in s.gates() {
            for x in g.inputs() {
                uses[x] += 1;
            }
        }
        assert!(uses.iter().all(|&u| u <= 1));
    }

    #[test]
    fn malformed_circuits() {
        assert!(CircuitInstance::parse("y = OR a b\n").is_err());
        assert!(CircuitInstance::parse("a = NOT b\nb = NOT a\noutput a\n").is_err());
        assert!(CircuitInstance::parse("y = AND a b\noutput y\n").is_err());
        assert!(CircuitInstance::parse("y = NOT a\ny = NOT b\noutput y\n").is_err());
    }

    #[test]
    fn identity_circuit_has_pbne() {
        let c = CircuitInstance::parse("input x\noutput x\n").unwrap();
        let red = circuit_to_dfpa(&c).unwrap();
        assert_eq!(red.auction.n(), CIRCUIT_MIN_BIDDERS);
        assert_eq!(red.roles.iter().filter(|r| **r == CircuitRole::Padding).count(), 4);
        let p = assignment_to_pbne(&red, &[true]).unwrap();
        assert_eq!(p.bids[red.output_k][2], 3);
        assert_eq!(p.bids[red.output_l][2], 1);
        assert!(assignment_to_pbne(&red, &[false]).is_err());
    }

    #[test]
    fn or_and_not_chains() {
        let or = CircuitInstance::parse("y = OR a b\noutput y\n").unwrap();
        let red = circuit_to_dfpa(&or).unwrap();
        let p = assignment_to_pbne(&red, &[true, false]).unwrap();
        assert_eq!(p.bids[red.bidder_of("y").unwrap()], S1.to_vec());
        let not = CircuitInstance::parse("y = NOT a\noutput y\n").unwrap();
        let red = circuit_to_dfpa(&not).unwrap();
        let p = assignment_to_pbne(&red, &[false]).unwrap();
        assert_eq!(p.bids[red.bidder_of("y").unwrap()], S1.to_vec());
    }
}
