//! Checks of the gadget payoff tables and best-response margins of both
//! reductions, computed on the constructed instances with exact arithmetic.

use serde::Serialize;

use crate::auction::{AuctionInstance, MixedStrategy, MixedStrategyProfile, PureStrategyProfile};
use crate::error::GadgetError;
use crate::rational::{format_rational, int, one, parse_rational, rat, zero, Rational};
use crate::utility::bid_mass;
use crate::verify::{best_responses, utility_grid};

use super::circuit::{
    all_assignments, assignment_to_pbne, circuit_to_dfpa, clash_prior, gadget_auction, negation_prior,
    output_gadget_tables, output_prior, projection_prior, propagate, CircuitInstance, S0, S1,
};
use super::pure_circuit::{pure_circuit_to_dfpa, PaddingMode, PcGate, PureCircuitInstance, PureCircuitReduction};

/// Bidder counts at which the Circuit-SAT payoff tables are checked.
pub const TABLE_SIZES: [usize; 4] = [3, 4, 8, 32];
/// Bidder counts at which uniqueness of the gadget best responses is checked.
pub const UNIQUE_SIZES: [usize; 2] = [8, 32];
/// Default Pure-Circuit instance; it has one gate of each kind.
pub const DEFAULT_PURE_CIRCUIT: &str = "c = AND a b\nd e = PURIFY c\na = NOT d\nb = NOT e\n";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaSuite {
    /// Circuit-SAT gadgets.
    AppendixC,
    /// Pure-Circuit gadgets.
    AppendixD,
}

#[derive(Debug, Clone, Default)]
pub struct LemmaContext {
    /// Circuit whose assignments are enumerated against the output gadget.
    pub circuit: Option<CircuitInstance>,
    /// Pure circuit for the margin checks; defaults to [`DEFAULT_PURE_CIRCUIT`].
    pub pure_circuit: Option<PureCircuitInstance>,
    /// eps for the exact-mode validity checks; defaults to 1/40.
    pub exact_eps: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaCheck {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub suite: LemmaSuite,
    pub checks: Vec<LemmaCheck>,
}

impl LemmaReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LemmaCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

pub fn check_gadget_lemmas(suite: LemmaSuite, ctx: &LemmaContext) -> Result<LemmaReport, GadgetError> {
    let mut out = Checks::default();
    match suite {
        LemmaSuite::AppendixC => {
            circuit_tables(&mut out)?;
            if let Some(c) = &ctx.circuit {
                circuit_assignments(&mut out, c)?;
            }
        }
        LemmaSuite::AppendixD => {
            let pc = match &ctx.pure_circuit {
                Some(pc) => pc.clone(),
                None => PureCircuitInstance::parse(DEFAULT_PURE_CIRCUIT)?,
            };
            let eps = ctx.exact_eps.clone().unwrap_or_else(|| rat(1, 40));
            pure_circuit_margins(&mut out, &pc)?;
            pure_circuit_validity(&mut out, &pc, &eps)?;
        }
    }
    Ok(LemmaReport {
        suite,
        checks: out.0,
    })
}

#[derive(Default)]
struct Checks(Vec<LemmaCheck>);

fn show(xs: &[Option<Rational>]) -> String {
    let parts: Vec<String> = xs
        .iter()
        .map(|x| x.as_ref().map_or_else(|| "-".to_string(), format_rational))
        .collect();
    format!("[{}]", parts.join(", "))
}

/// Table entry: `"-"` is skipped, a trailing `/n` divides by the bidder count.
fn entry(s: &str, n: usize) -> Option<Rational> {
    if s == "-" {
        return None;
    }
    let (body, per_n) = match s.strip_suffix("/n") {
        Some(b) => (b, true),
        None => (s, false),
    };
    let r = parse_rational(body).expect("well-formed table entry");
    Some(if per_n { r / int(n as i64) } else { r })
}

impl Checks {
    fn push(&mut self, name: String, expected: String, actual: String) {
        let pass = expected == actual;
        self.0.push(LemmaCheck {
            name,
            expected,
            actual,
            pass,
        });
    }

    /// Compares `actual` with the table row scaled by `scale`.
    fn row(&mut self, name: String, table: &[&str], n: usize, scale: &Rational, actual: &[Rational]) {
        let expected: Vec<Option<Rational>> = table.iter().map(|s| entry(s, n).map(|r| r * scale)).collect();
        let shown: Vec<Option<Rational>> = expected
            .iter()
            .zip(actual)
            .map(|(e, a)| e.as_ref().map(|_| a.clone()))
            .collect();
        self.push(name, show(&expected), show(&shown));
    }

    fn value(&mut self, name: String, expected: &Rational, actual: &Rational) {
        self.push(name, format_rational(expected), format_rational(actual));
    }

    fn list<T: std::fmt::Debug>(&mut self, name: String, expected: T, actual: T) {
        self.push(name, format!("{expected:?}"), format!("{actual:?}"));
    }
}

/// eps just below the Circuit-SAT bound, at which best responses must be unique.
fn unique_eps() -> Rational {
    rat(1, 180) - rat(1, 10_000_000_000)
}

fn pure(bids: Vec<Vec<usize>>) -> MixedStrategyProfile {
    PureStrategyProfile::new(bids).to_mixed(4)
}

/// Gadget sub-instance: `active` bidders on the circuit spaces padded to `n`.
fn bids_for(a: &AuctionInstance, set: &[(usize, Vec<usize>)]) -> Vec<Vec<usize>> {
    let mut bids: Vec<Vec<usize>> = (0..a.n()).map(|i| vec![0; a.value_space(i).len()]).collect();
    for (i, s) in set {
        bids[*i] = s.clone();
    }
    bids
}

struct Row<'a> {
    label: String,
    h: &'a [&'a str],
    u_low: &'a [&'a str],
    u_high: Option<&'a [&'a str]>,
}

fn check_rows(
    out: &mut Checks,
    gadget: &str,
    a: &AuctionInstance,
    me: usize,
    set: &[(usize, Vec<usize>)],
    row: &Row<'_>,
    unique: &[(usize, usize)],
) -> Result<(), GadgetError> {
    let n = a.n();
    let tenth = rat(1, 10);
    let p = pure(bids_for(a, set));
    let h = bid_mass(a, me, &p)?.win_probs();
    let u = utility_grid(a, me, &p)?;
    let at = |what: &str| format!("{gadget} {} n={n} {what}", row.label);
    out.row(at("H"), row.h, n, &one(), &h);
    if !row.u_low.is_empty() {
        out.row(at("u(9/40)"), row.u_low, n, &tenth, &u[1]);
    }
    if let Some(high) = row.u_high {
        out.row(at("u(1)"), high, n, &tenth, &u[2]);
    }
    if UNIQUE_SIZES.contains(&n) {
        for &(v, b) in unique {
            let br = best_responses(a, me, v, &p, &unique_eps())?;
            out.list(at(&format!("best response at value index {v}")), vec![b], br);
        }
    }
    Ok(())
}

fn circuit_tables(out: &mut Checks) -> Result<(), GadgetError> {
    let proj: [(&[&str], &[&str], &[&str], usize, usize); 4] = [
        (&["1/n", "1", "1", "1"], &["9/4/n", "5/4", "1/4", "-"], &["10/n", "9", "8", "7"], 1, 1),
        (
            &["3/50/n", "53/100", "1", "1"],
            &["27/200/n", "53/80", "1/4", "-"],
            &["3/5/n", "477/100", "8", "7"],
            1,
            2,
        ),
        (
            &["3/50/n", "3/50", "53/100", "1"],
            &["27/200/n", "3/40", "53/400", "-"],
            &["3/5/n", "27/50", "106/25", "7"],
            2,
            3,
        ),
        (
            &["3/50/n", "3/50", "3/50", "53/100"],
            &["27/200/n", "3/40", "3/200", "-"],
            &["3/5/n", "27/50", "24/50", "371/100"],
            1,
            3,
        ),
    ];
    let or: [(&[usize; 3], &[usize; 3], &[&str], &[&str], usize); 4] = [
        (&S0, &S0, &["9/2500/n", "2659/7500", "1", "1"], &["81/10000/n", "2659/6000", "1/4", "-"], 1),
        (&S0, &S1, &["9/2500/n", "159/5000", "53/100", "1"], &["81/10000/n", "159/4000", "53/400", "-"], 2),
        (&S1, &S0, &["9/2500/n", "159/5000", "53/100", "1"], &["81/10000/n", "159/4000", "53/400", "-"], 2),
        (
            &S1,
            &S1,
            &["9/2500/n", "9/2500", "2659/7500", "1"],
            &["81/10000/n", "9/2000", "2659/30000", "-"],
            2,
        ),
    ];
    let not: [(&[usize; 3], &[&str], &[&str], usize); 2] = [
        (&S0, &["3/50/n", "3/50", "53/100", "1"], &["27/200/n", "3/40", "53/400", "-"], 2),
        (&S1, &["3/50/n", "3/50", "3/50", "53/100"], &["27/200/n", "3/40", "3/200", "-"], 1),
    ];
    let l_rows: [(&[&str], &[&str], usize); 4] = [
        (&["1/n", "1", "1", "1"], &["10/n", "9", "8", "7"], 1),
        (&["8/11/n", "19/22", "1", "1"], &["80/11/n", "171/22", "8", "7"], 2),
        (&["8/11/n", "8/11", "19/22", "1"], &["80/11/n", "72/11", "76/11", "7"], 3),
        (&["8/11/n", "8/11", "8/11", "19/22"], &["80/11/n", "72/11", "64/11", "133/22"], 1),
    ];
    let k_rows: [(&[&str], &[&str], usize); 4] = [
        (&["1/2/n", "3/4", "1", "1"], &["5/n", "27/4", "8", "7"], 2),
        (&["4/11/n", "29/44", "1", "1"], &["40/11/n", "261/44", "8", "7"], 2),
        (&["4/11/n", "6/11", "19/22", "1"], &["40/11/n", "54/11", "76/11", "7"], 3),
        (&["4/11/n", "6/11", "8/11", "19/22"], &["40/11/n", "54/11", "64/11", "133/22"], 3),
    ];
    let case = |s: &[usize]| format!("({},{},{})", s[0], s[1], s[2]);
    for n in TABLE_SIZES {
        let a = gadget_auction(2, n, &[(1, 0, projection_prior())])?;
        for (c, (h, lo, hi, b1, b2)) in proj.iter().enumerate() {
            let row = Row {
                label: format!("i=(0,{c},x)"),
                h,
                u_low: lo,
                u_high: Some(hi),
            };
            check_rows(out, "projection", &a, 1, &[(0, vec![0, c, 3])], &row, &[(1, *b1), (2, *b2)])?;
        }
        let a = gadget_auction(3, n, &[(2, 0, projection_prior()), (2, 1, projection_prior())])?;
        for (si, sj, h, lo, b) in or {
            let row = Row {
                label: format!("i={} j={}", case(si), case(sj)),
                h,
                u_low: lo,
                u_high: None,
            };
            check_rows(out, "or", &a, 2, &[(0, si.to_vec()), (1, sj.to_vec())], &row, &[(1, b)])?;
        }
        let a = gadget_auction(2, n, &[(1, 0, negation_prior())])?;
        for (si, h, lo, b) in not {
            let row = Row {
                label: format!("i={}", case(si)),
                h,
                u_low: lo,
                u_high: None,
            };
            check_rows(out, "not", &a, 1, &[(0, si.to_vec())], &row, &[(1, b)])?;
        }
        // bidder 2 is the circuit output, 0 is k and 1 is l
        let a = gadget_auction(
            3,
            n,
            &[(0, 2, output_prior()), (0, 1, clash_prior()), (1, 0, clash_prior())],
        )?;
        for (c, (h, hi, b)) in l_rows.iter().enumerate() {
            let row = Row {
                label: format!("k=(0,x,{c})"),
                h,
                u_low: &[],
                u_high: Some(hi),
            };
            check_rows(out, "output l", &a, 1, &[(0, vec![0, 0, c]), (2, S0.to_vec())], &row, &[(2, *b)])?;
        }
        for (c, (h, hi, b)) in k_rows.iter().enumerate() {
            let row = Row {
                label: format!("i=s0 l=(0,x,{c})"),
                h,
                u_low: &[],
                u_high: Some(hi),
            };
            check_rows(out, "output k", &a, 0, &[(1, vec![0, 0, c]), (2, S0.to_vec())], &row, &[(2, *b)])?;
        }
        let row = Row {
            label: "i=s1 l=(0,x,1)".into(),
            h: &["4/11/n", "19/44", "3/4", "1"],
            u_low: &[],
            u_high: Some(&["40/11/n", "171/44", "6", "7"]),
        };
        check_rows(out, "output k", &a, 0, &[(1, vec![0, 0, 1]), (2, S1.to_vec())], &row, &[(2, 3)])?;
    }
    input_gadget(out)?;
    clash(out)?;
    Ok(())
}

/// Best-response map of an input pair and its fixed points.
fn input_gadget(out: &mut Checks) -> Result<(), GadgetError> {
    let expected = [[0, 1, 1], [0, 1, 2], [0, 2, 3], [0, 1, 3]];
    for n in UNIQUE_SIZES {
        let a = gadget_auction(2, n, &[(0, 1, projection_prior()), (1, 0, projection_prior())])?;
        let respond = |s: &[usize]| -> Result<Option<Vec<usize>>, GadgetError> {
            let p = pure(bids_for(&a, &[(0, s.to_vec())]));
            let mut r = vec![0];
            for v in 1..3 {
                match best_responses(&a, 1, v, &p, &unique_eps())?.as_slice() {
                    [b] => r.push(*b),
                    _ => return Ok(None),
                }
            }
            Ok(Some(r))
        };
        for (c, want) in expected.iter().enumerate() {
            let got = respond(&[0, c, 3])?;
            out.list(format!("input pair n={n} i=(0,{c},x) best response"), Some(want.to_vec()), got);
        }
        let mut fixed = Vec::new();
        for lo in 0..3 {
            for hi in 0..4 {
                let s = vec![0, lo, hi];
                if respond(&s)?.as_ref() == Some(&s) {
                    fixed.push(s);
                }
            }
        }
        out.list(format!("input pair n={n} fixed points"), vec![S0.to_vec(), S1.to_vec()], fixed);
    }
    Ok(())
}

/// Output gadget on the identity circuit: no fixed point when the output is
/// false, the single fixed point `(3, 1)` when it is true.
fn clash(out: &mut Checks) -> Result<(), GadgetError> {
    let c = CircuitInstance::parse("input x\noutput x\n")?;
    let red = circuit_to_dfpa(&c)?;
    let f = output_gadget_tables(&red, &[false], &unique_eps())?;
    out.list("clash k best responses, output false".into(), vec![vec![2], vec![2], vec![3], vec![3]], f.k_best);
    out.list("clash l best responses, output false".into(), vec![vec![1], vec![2], vec![3], vec![1]], f.l_best);
    out.list("clash fixed points, output false".into(), vec![], f.fixed_points);
    let t = output_gadget_tables(&red, &[true], &unique_eps())?;
    out.list("clash fixed points, output true".into(), vec![(3, 1)], t.fixed_points);
    Ok(())
}

/// For every input assignment: propagation encodes node values, and the
/// output gadget has a fixed point exactly when the assignment satisfies the
/// circuit, in which case an exact PBNE is built.
fn circuit_assignments(out: &mut Checks, c: &CircuitInstance) -> Result<(), GadgetError> {
    let red = circuit_to_dfpa(c)?;
    for inputs in all_assignments(red.circuit.inputs().len())? {
        let label: String = inputs.iter().map(|&b| if b { '1' } else { '0' }).collect();
        let values = red.circuit.evaluate(&inputs)?;
        let bids = propagate(&red, &inputs)?;
        let encoded = (0..red.circuit.num_nodes()).all(|x| {
            let want = if values[x] { S1 } else { S0 };
            bids[red.node_bidder[x]] == want.to_vec()
        });
        out.list(format!("circuit inputs={label} node encoding"), true, encoded);
        let sat = red.circuit.is_satisfied_by(&inputs)?;
        let tables = output_gadget_tables(&red, &inputs, &unique_eps())?;
        out.list(
            format!("circuit inputs={label} output fixed point exists"),
            sat,
            !tables.fixed_points.is_empty(),
        );
        if sat {
            let built = assignment_to_pbne(&red, &inputs).is_ok();
            out.list(format!("circuit inputs={label} exact PBNE"), true, built);
        }
    }
    Ok(())
}

/// Profile in which listed bidders mix over bids at their high value and
/// everyone else bids 0.
fn pc_profile(a: &AuctionInstance, high: &[(usize, Vec<Rational>)]) -> MixedStrategyProfile {
    let point = |b: usize| {
        let mut d = vec![zero(); 4];
        d[b] = one();
        d
    };
    let mut strategies: Vec<MixedStrategy> = (0..a.n())
        .map(|i| MixedStrategy::from_table(vec![point(0); a.value_space(i).len()]))
        .collect();
    for (i, d) in high {
        strategies[*i] = MixedStrategy::from_table(vec![point(0), d.clone()]);
    }
    MixedStrategyProfile::new(strategies)
}

/// Distribution with mass `p` on `b` and the rest on `rest`.
fn split(p: &Rational, b: usize, rest: usize) -> Vec<Rational> {
    let mut d = vec![zero(); 4];
    d[b] += p;
    d[rest] += one() - p;
    d
}

fn high_row(a: &AuctionInstance, i: usize, high: &[(usize, Vec<Rational>)]) -> Result<Vec<Rational>, GadgetError> {
    Ok(utility_grid(a, i, &pc_profile(a, high))?.swap_remove(1))
}

fn pure_circuit_margins(out: &mut Checks, pc: &PureCircuitInstance) -> Result<(), GadgetError> {
    let red = pure_circuit_to_dfpa(pc, &PaddingMode::Small)?;
    let a = &red.auction;
    let n = a.n();
    let c0 = red.c_bidders[0];
    let u = high_row(a, c0, &[])?;
    out.row("C bidder u(1/2)".into(), &["1/2/n", "1/4", "0", "-"], n, &one(), &u);
    let c_at_b1: Vec<(usize, Vec<Rational>)> = red.c_bidders.iter().map(|&c| (c, split(&one(), 1, 1))).collect();
    let u = high_row(a, red.const_bidder, &c_at_b1)?;
    out.row("constant bidder u(1)".into(), &["0", "1/4", "1/2", "1/4"], n, &one(), &u);
    let half = rat(1, 2);
    let mut seen = [false; 3];
    for g in pc.gates() {
        match *g {
            PcGate::And { x, y, z } if !seen[0] => {
                seen[0] = true;
                let cases = [
                    (one(), one(), rat(1, 36)),
                    (zero(), zero(), rat(-1, 36)),
                    (zero(), one(), rat(-1, 24)),
                    (one(), zero(), rat(-1, 24)),
                    (zero(), half.clone(), rat(-5, 144)),
                ];
                for (p, q, want) in cases {
                    let high = [
                        (red.node_bidder[x], split(&p, 1, 2)),
                        (red.node_bidder[y], split(&q, 1, 2)),
                    ];
                    let u = high_row(a, red.node_bidder[z], &high)?;
                    out.value(
                        format!("AND u(b1)-u(b2) p1={} q1={}", p, q),
                        &want,
                        &(&u[1] - &u[2]),
                    );
                }
            }
            PcGate::Purify { x, y, z } if !seen[1] => {
                seen[1] = true;
                for p in [zero(), half.clone(), one()] {
                    let high = [(red.node_bidder[x], split(&p, 1, 2))];
                    for (out_node, offset, label) in [(y, 1, "first"), (z, 3, "second")] {
                        let u = high_row(a, red.node_bidder[out_node], &high)?;
                        let want = (int(4) * &p - int(offset)) / int(32);
                        out.value(
                            format!("PURIFY {label} output u(b1)-u(b2) p1={}", p),
                            &want,
                            &(&u[1] - &u[2]),
                        );
                    }
                }
            }
            PcGate::Not { x, y } if !seen[2] => {
                seen[2] = true;
                let aux = red.aux_bidder[y].expect("NOT output has an auxiliary bidder");
                for (p, want) in [(zero(), rat(1, 28)), (one(), rat(-1, 28))] {
                    let high = [
                        (red.node_bidder[x], split(&p, 1, 2)),
                        (red.const_bidder, split(&one(), 2, 2)),
                    ];
                    let u = high_row(a, aux, &high)?;
                    out.value(
                        format!("NOT auxiliary u(b3)-u(b2) p1={}", p),
                        &want,
                        &(&u[3] - &u[2]),
                    );
                }
                for (b, want) in [(2, rat(1, 36)), (3, rat(-1, 36))] {
                    let u = high_row(a, red.node_bidder[y], &[(aux, split(&one(), b, b))])?;
                    out.value(format!("NOT output u(b2)-u(b1) auxiliary at b{b}"), &want, &(&u[2] - &u[1]));
                }
            }
            _ => {}
        }
    }
    Ok(())
}

/// Smallest gap between the best non-zero bid and bid 0 of bidder `i` at its
/// high value, over pure non-overbidding bids of the bidders it observes.
fn zero_bid_gap(a: &AuctionInstance, i: usize) -> Result<Rational, GadgetError> {
    let observed = a.relevant_opponents(i);
    let options: Vec<Vec<usize>> = observed
        .iter()
        .map(|&j| {
            let v = a.value_space(j).get(a.value_space(j).len() - 1);
            (0..4).filter(|&b| a.bid_space().get(b) <= v).collect()
        })
        .collect();
    let value = a.value_space(i).get(1);
    let mut idx = vec![0usize; observed.len()];
    let mut worst: Option<Rational> = None;
    loop {
        let high: Vec<(usize, Vec<Rational>)> = observed
            .iter()
            .zip(&idx)
            .zip(&options)
            .map(|((&j, &k), opts)| (j, split(&one(), opts[k], opts[k])))
            .collect();
        let u = high_row(a, i, &high)?;
        let best = (1..4)
            .filter(|&b| a.bid_space().get(b) <= value)
            .map(|b| &u[b])
            .max()
            .cloned()
            .unwrap_or_else(zero);
        let gap = best - &u[0];
        if worst.as_ref().is_none_or(|w| &gap < w) {
            worst = Some(gap);
        }
        let mut pos = idx.len();
        loop {
            if pos == 0 {
                return Ok(worst.unwrap_or_else(zero));
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < options[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// In exact mode bid 0 is never an eps-best response at a high value.
fn pure_circuit_validity(out: &mut Checks, pc: &PureCircuitInstance, eps: &Rational) -> Result<(), GadgetError> {
    let red: PureCircuitReduction = pure_circuit_to_dfpa(pc, &PaddingMode::Exact { eps: eps.clone() })?;
    let a = &red.auction;
    let mut targets = vec![
        ("C bidder".to_string(), red.c_bidders[0]),
        ("constant bidder".to_string(), red.const_bidder),
    ];
    let mut seen = [false; 3];
    for g in pc.gates() {
        match *g {
            PcGate::And { z, .. } if !seen[0] => {
                seen[0] = true;
                targets.push(("AND output".into(), red.node_bidder[z]));
            }
            PcGate::Purify { y, z, .. } if !seen[1] => {
                seen[1] = true;
                targets.push(("PURIFY first output".into(), red.node_bidder[y]));
                targets.push(("PURIFY second output".into(), red.node_bidder[z]));
            }
            PcGate::Not { y, .. } if !seen[2] => {
                seen[2] = true;
                targets.push(("NOT auxiliary".into(), red.aux_bidder[y].expect("auxiliary")));
                targets.push(("NOT output".into(), red.node_bidder[y]));
            }
            _ => {}
        }
    }
    for (label, i) in targets {
        let gap = zero_bid_gap(a, i)?;
        let pass = &gap > eps;
        out.0.push(LemmaCheck {
            name: format!("{label} n={} zero-bid gap exceeds eps", a.n()),
            expected: format!("> {}", format_rational(eps)),
            actual: format_rational(&gap),
            pass,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries() {
        assert_eq!(entry("-", 4), None);
        assert_eq!(entry("9/4/n", 3), Some(rat(3, 4)));
        assert_eq!(entry("53/100", 3), Some(rat(53, 100)));
    }

    #[test]
    fn circuit_gadget_tables() {
        let r = check_gadget_lemmas(LemmaSuite::AppendixC, &LemmaContext::default()).unwrap();
        let bad: Vec<_> = r.failures().collect();
        assert!(bad.is_empty(), "{bad:#?}");
    }

    #[test]
    fn pure_circuit_gadget_margins() {
        let r = check_gadget_lemmas(LemmaSuite::AppendixD, &LemmaContext::default()).unwrap();
        let bad: Vec<_> = r.failures().collect();
        assert!(bad.is_empty(), "{bad:#?}");
    }
}
