//! Acceptance criteria, one test each. Every test writes a single
//! `criterion N: PASS|FAIL ...` line straight to stdout so the summary shows
//! up even when libtest captures output.

mod common;

use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use fpa_core::correlated::{ce_regret, solve_ce_dynamics, solve_ce_lp, CorrelatedDistribution, DynamicsConfig, TypeAgentGame};
use fpa_core::gadgets::circuit::S1;
use fpa_core::gadgets::pure_circuit::best_response_dynamics;
use fpa_core::gadgets::{
    assignment_to_pbne, brute_force_pure_search, check_gadget_lemmas, circuit_to_dfpa, extract_assignment,
    helper_chain_holds, nonexistence_instance, nonexistence_threshold, pure_circuit_to_dfpa, CircuitInstance,
    LemmaContext, LemmaSuite, PaddingMode, PureCircuitInstance,
};
use fpa_core::rational::{format_rational, int, one, rat, zero, Rational};
use fpa_core::symmetric::{solve_symmetric, SymmetricConfig, SymmetricSolution};
use fpa_core::transforms::{
    cfpa_to_dfpa, dfpa_to_cfpa, mbne_from_cfpa_pbne, ne_to_wsne, pbne_from_dfpa_wsne, shrink_bidspace,
};
use fpa_core::utility::{brute_force_utility, cfpa_bid_distribution, interim_utility};
use fpa_core::verify::{cfpa_verify_pbne, is_eps_mbne, is_eps_pbne, is_eps_wsne, is_monotone, max_regret};
use fpa_core::{
    AuctionInstance, BidSpace, ContinuousAuction, MixedStrategy, MixedStrategyProfile, PureStrategyProfile,
    StepStrategyProfile,
};
use num_traits::Zero;
use rand::Rng;

use common::*;

fn report(n: u32, pass: bool, elapsed: Duration, limit: Duration, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    writeln!(
        out,
        "criterion {n}: {status} ({:.2}s, limit {}s) {detail}",
        elapsed.as_secs_f64(),
        limit.as_secs()
    )
    .unwrap();
    out.flush().unwrap();
}

/// Runs `body`, prints the line and fails the test when the body fails or
/// runs over the limit.
fn criterion(n: u32, limit_secs: u64, body: impl FnOnce() -> Result<String, String>) {
    let limit = Duration::from_secs(limit_secs);
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    let (pass, detail) = match outcome {
        Ok(d) if elapsed <= limit => (true, d),
        Ok(d) => (false, format!("{d}; over time")),
        Err(e) => (false, e),
    };
    report(n, pass, elapsed, limit, &detail);
    assert!(pass, "criterion {n}: {detail}");
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(r: &Rational) -> String {
    format_rational(r)
}

#[test]
fn criterion_01_utility_oracle_equivalence() {
    criterion(1, 60, || {
        let mut r = rng(0xC1);
        let mut compared = 0usize;
        for t in 0..200 {
            let n = r.gen_range(2..=4);
            let m = r.gen_range(1..=4);
            let a = random_instance(&mut r, n, 3, m);
            let p = random_profile(&mut r, &a);
            for i in 0..n {
                for v in a.value_space(i).values() {
                    for b in 0..m {
                        let fast = interim_utility(&a, i, v, b, &p).map_err(|e| e.to_string())?;
                        let slow = brute_force_utility(&a, i, v, b, &p).map_err(|e| e.to_string())?;
                        ensure(fast == slow, || {
                            format!("instance {t}, bidder {i}, value {}, bid {b}: {} vs {}", q(v), q(&fast), q(&slow))
                        })?;
                        compared += 1;
                    }
                }
            }
        }
        Ok(format!("200 instances, {compared} utilities equal exactly"))
    });
}

#[test]
fn criterion_02_nonexistence_at_twelve() {
    criterion(2, 10, || {
        let a = nonexistence_instance(12).map_err(|e| e.to_string())?;
        let threshold = nonexistence_threshold(12);
        ensure(threshold == rat(1, 72), || format!("threshold {}", q(&threshold)))?;
        let eps = &threshold - rat(1, 1_000_000_000);
        let none = brute_force_pure_search(&a, &eps).map_err(|e| e.to_string())?;
        ensure(none.profile.is_none(), || format!("found {:?} at eps {}", none.profile, q(&eps)))?;
        let some = brute_force_pure_search(&a, &one()).map_err(|e| e.to_string())?;
        let p = some.profile.ok_or("no profile at eps = 1")?;
        let ok = is_eps_pbne(&a, &p, &one()).map_err(|e| e.to_string())?.holds;
        ensure(ok, || "profile found at eps = 1 does not verify".into())?;
        Ok(format!(
            "none at 1/72 - 1e-9 (space {} after pruning), profile at eps = 1",
            none.search_space
        ))
    });
}

#[test]
fn criterion_03_helper_chain() {
    criterion(3, 1, || {
        let bad: Vec<u64> = (10..=50).filter(|&m| !helper_chain_holds(m)).collect();
        ensure(bad.is_empty(), || format!("chain fails for M in {bad:?}"))?;
        Ok("chain holds for M = 10..=50".into())
    });
}

#[test]
fn criterion_04_circuit_gadget_tables() {
    criterion(4, 30, || {
        let rep = check_gadget_lemmas(LemmaSuite::AppendixC, &LemmaContext::default()).map_err(|e| e.to_string())?;
        let bad: Vec<String> = rep
            .failures()
            .map(|c| format!("{}: expected {} got {}", c.name, c.expected, c.actual))
            .collect();
        ensure(bad.is_empty(), || bad.join("; "))?;
        Ok(format!("{} table and uniqueness checks", rep.checks.len()))
    });
}

#[test]
fn criterion_05_circuit_end_to_end() {
    criterion(5, 60, || {
        let sat = CircuitInstance::parse("n = NOT x\ny = OR x n\noutput y\n").map_err(|e| e.to_string())?;
        let unsat =
            CircuitInstance::parse("n = NOT x\no = OR x n\ny = NOT o\noutput y\n").map_err(|e| e.to_string())?;
        let red = circuit_to_dfpa(&sat).map_err(|e| e.to_string())?;
        for x in [false, true] {
            let p = assignment_to_pbne(&red, &[x]).map_err(|e| e.to_string())?;
            let v = is_eps_pbne(&red.auction, &p, &zero()).map_err(|e| e.to_string())?;
            ensure(v.holds, || format!("x = {x}: regret {}", q(&v.regret)))?;
        }
        let ctx = LemmaContext {
            circuit: Some(unsat.clone()),
            ..LemmaContext::default()
        };
        let rep = check_gadget_lemmas(LemmaSuite::AppendixC, &ctx).map_err(|e| e.to_string())?;
        let fixed: Vec<_> = rep.checks.iter().filter(|c| c.name.ends_with("output fixed point exists")).collect();
        ensure(fixed.len() == 2, || format!("{} assignment checks", fixed.len()))?;
        ensure(fixed.iter().all(|c| c.pass && c.actual == "false"), || format!("{fixed:?}"))?;
        ensure(rep.all_pass(), || format!("{:?}", rep.failures().collect::<Vec<_>>()))?;
        let unsat_red = circuit_to_dfpa(&unsat).map_err(|e| e.to_string())?;
        for x in [false, true] {
            ensure(assignment_to_pbne(&unsat_red, &[x]).is_err(), || format!("x = {x} accepted"))?;
        }
        Ok(format!(
            "satisfiable: exact PBNE for both inputs ({} bidders); unsatisfiable: both assignments fixed-point-free",
            red.auction.n()
        ))
    });
}

const SMALL_PURE_CIRCUITS: [&str; 4] = [
    "a = NOT b\nb = NOT a\n",
    "x = NOT y\ny z = PURIFY x\n",
    "c = AND a b\na = NOT c\nb = NOT a\n",
    "a = NOT b\nb = NOT c\nc = NOT a\n",
];

#[test]
fn criterion_06_pure_circuit_gadgets() {
    criterion(6, 30, || {
        let rep = check_gadget_lemmas(LemmaSuite::AppendixD, &LemmaContext::default()).map_err(|e| e.to_string())?;
        let bad: Vec<String> = rep
            .failures()
            .map(|c| format!("{}: expected {} got {}", c.name, c.expected, c.actual))
            .collect();
        ensure(bad.is_empty(), || bad.join("; "))?;
        let quoted = [
            ("C bidder u(1/2)", None),
            ("constant bidder u(1)", None),
            ("AND u(b1)-u(b2) p1=1 q1=1", Some("1/36")),
            ("PURIFY first output u(b1)-u(b2) p1=0", Some("-1/32")),
            ("PURIFY first output u(b1)-u(b2) p1=1/2", Some("1/32")),
            ("PURIFY second output u(b1)-u(b2) p1=1", Some("1/32")),
            ("NOT auxiliary u(b3)-u(b2) p1=0", Some("1/28")),
            ("NOT auxiliary u(b3)-u(b2) p1=1", Some("-1/28")),
        ];
        for (name, want) in quoted {
            let c = rep.checks.iter().find(|c| c.name == name).ok_or_else(|| format!("missing check {name}"))?;
            if let Some(w) = want {
                ensure(c.actual == w, || format!("{name} = {}", c.actual))?;
            }
        }
        let eps = rat(1, 40);
        let mut found = 0;
        for text in SMALL_PURE_CIRCUITS {
            let pc = PureCircuitInstance::parse(text).map_err(|e| e.to_string())?;
            let red = pure_circuit_to_dfpa(&pc, &PaddingMode::Exact { eps: eps.clone() }).map_err(|e| e.to_string())?;
            let a = &red.auction;
            let start = PureStrategyProfile::new((0..a.n()).map(|i| vec![0; a.value_space(i).len()]).collect());
            let Some(p) = best_response_dynamics(a, start, 40, 11).map_err(|e| e.to_string())? else {
                continue;
            };
            let mixed = p.to_mixed(a.bid_space().len());
            let wsne = is_eps_wsne(a, &mixed, &eps).map_err(|e| e.to_string())?;
            ensure(wsne.holds, || format!("{text:?}: dynamics output is not a 1/40-WSNE"))?;
            let asg = extract_assignment(&red, &mixed);
            ensure(pc.is_satisfied_by(&asg), || format!("{text:?}: extracted {asg:?} violates a gate"))?;
            found += 1;
        }
        Ok(format!(
            "{} margin checks exact; extraction sound on {found} of {} dynamics fixed points (n >= 1000)",
            rep.checks.len(),
            SMALL_PURE_CIRCUITS.len()
        ))
    });
}

#[test]
fn criterion_07_shrinkage() {
    criterion(7, 300, || {
        let mut r = rng(0xC7);
        let eps = rat(1, 100);
        let mut worst_slack: Option<Rational> = None;
        let mut solved = 0;
        for t in 0..50 {
            let n = r.gen_range(2..=3);
            let k = r.gen_range(1..=3);
            let len = r.gen_range(5..=8);
            let bids = BidSpace::new(grid(&mut r, len, 12, true)).unwrap();
            let a = random_iid(&mut r, n, k, bids);
            for m in [3u64, 4, 5] {
                let s = shrink_bidspace(a.bid_space(), m).map_err(|e| e.to_string())?;
                let small = a.with_bid_space(s.bids.clone()).map_err(|e| e.to_string())?;
                let config = SymmetricConfig {
                    seed: t,
                    ..SymmetricConfig::default()
                };
                let sol = solve_symmetric(&small, &eps, &config).map_err(|e| format!("instance {t}, M = {m}: {e}"))?;
                let lifted = s.embed(&sol.profile, a.bid_space());
                let regret = max_regret(&a, &lifted).map_err(|e| e.to_string())?.max_regret;
                let bound = s.guarantee(&eps);
                ensure(regret <= bound, || {
                    format!("instance {t}, M = {m}: regret {} > {}", q(&regret), q(&bound))
                })?;
                let slack = &bound - &regret;
                if worst_slack.as_ref().is_none_or(|w| &slack < w) {
                    worst_slack = Some(slack);
                }
                solved += 1;
            }
        }
        Ok(format!(
            "{solved} shrunk solves lifted within eps' + 1/M, smallest slack {}",
            q(&worst_slack.unwrap_or_else(zero))
        ))
    });
}

/// Discrete bid distribution of `j` seen by `i`.
fn discrete_bid_distribution(a: &AuctionInstance, i: usize, j: usize, p: &MixedStrategyProfile) -> Vec<Rational> {
    let f = a.prior(i, j);
    let mut out = vec![zero(); a.bid_space().len()];
    for v in f.support() {
        for (b, x) in p.strategy(j).dist(v).iter().enumerate() {
            out[b] += f.mass(v) * x;
        }
    }
    out
}

fn identity_holds(a: &AuctionInstance, p: &MixedStrategyProfile, c: &ContinuousAuction, s: &StepStrategyProfile) -> bool {
    (0..a.n()).all(|i| {
        (0..a.n())
            .filter(|&j| j != i)
            .all(|j| discrete_bid_distribution(a, i, j, p) == cfpa_bid_distribution(c, i, j, s))
    })
}

#[test]
fn criterion_08_transform_chain() {
    criterion(8, 600, || {
        let mut r = rng(0xC8);
        let delta = rat(1, 4);
        let eps = rat(1, 100);
        let mut pairs = 0;
        let mut worst = zero();
        for t in 0..20 {
            let n = r.gen_range(2..=3);
            let m = r.gen_range(2..=3);
            let bids = BidSpace::new(grid(&mut r, m, 8, true)).unwrap();
            let c = random_iid_cfpa(&mut r, n, bids);
            let (d, map) = cfpa_to_dfpa(&c, &delta).map_err(|e| e.to_string())?;
            let config = SymmetricConfig {
                seed: t,
                ..SymmetricConfig::default()
            };
            let sol = solve_symmetric(&d, &eps, &config).map_err(|e| format!("cfpa {t}: {e}"))?;
            let degree = d.interaction_degree().max(1);
            let w = ne_to_wsne(&d, &sol.profile, &sol.max_regret, degree).map_err(|e| format!("cfpa {t}: {e}"))?;
            ensure(is_monotone(&w.profile), || format!("cfpa {t}: filtered profile is not monotone"))?;
            let wsne = is_eps_wsne(&d, &w.profile, &w.eps).map_err(|e| e.to_string())?;
            ensure(wsne.holds, || format!("cfpa {t}: not a {}-WSNE", q(&w.eps)))?;
            let steps = pbne_from_dfpa_wsne(&map, &w.profile).map_err(|e| format!("cfpa {t}: {e}"))?;
            let target = &w.eps + map.delta();
            let v = cfpa_verify_pbne(&c, &steps, &target).map_err(|e| e.to_string())?;
            ensure(v.holds, || format!("cfpa {t}: regret {} above {}", q(&v.regret), q(&target)))?;
            ensure(identity_holds(&d, &w.profile, &c, &steps), || {
                format!("cfpa {t}: continuous-to-discrete distributions differ")
            })?;
            let (back, back_map) = dfpa_to_cfpa(&d, &delta).map_err(|e| e.to_string())?;
            let lifted = mbne_from_cfpa_pbne(&back_map, &steps).map_err(|e| e.to_string())?;
            ensure(identity_holds(&d, &lifted, &back, &steps), || {
                format!("cfpa {t}: discrete-to-continuous distributions differ")
            })?;
            pairs += 2;
            if v.regret > worst {
                worst = v.regret.clone();
            }
        }
        Ok(format!(
            "20 CFPAs verified at eps + delta2; identity exact on {pairs} transform pairs; largest regret {}",
            q(&worst)
        ))
    });
}

/// Symmetric solutions of the fixture set, computed once per test binary.
fn fixture_solutions() -> &'static Vec<(String, AuctionInstance, Result<SymmetricSolution, String>)> {
    static CELL: OnceLock<Vec<(String, AuctionInstance, Result<SymmetricSolution, String>)>> = OnceLock::new();
    CELL.get_or_init(|| {
        iid_fixtures()
            .into_iter()
            .map(|(name, a)| {
                let sol = solve_symmetric(&a, &rat(1, 100), &SymmetricConfig::default()).map_err(|e| e.to_string());
                (name, a, sol)
            })
            .collect()
    })
}

fn is_symmetric(p: &MixedStrategyProfile) -> bool {
    p.strategies().windows(2).all(|w| w[0] == w[1])
}

#[test]
fn criterion_09_symmetric_solver() {
    criterion(9, 300, || {
        let eps = rat(1, 100);
        let mut exact = 0;
        for (name, a, sol) in fixture_solutions() {
            let sol = sol.as_ref().map_err(|e| format!("{name}: {e}"))?;
            let v = is_eps_mbne(a, &sol.profile, &eps).map_err(|e| e.to_string())?;
            ensure(v.holds, || format!("{name}: regret {}", q(&v.regret)))?;
            ensure(is_monotone(&sol.profile), || format!("{name}: not monotone"))?;
            ensure(is_symmetric(&sol.profile), || format!("{name}: not symmetric"))?;
            if name == "two_by_two" {
                ensure(sol.max_regret.is_zero(), || format!("2x2 regret {}", q(&sol.max_regret)))?;
            }
            if sol.max_regret.is_zero() {
                exact += 1;
            }
        }
        Ok(format!(
            "{} fixtures solved at 1/100, {exact} exact, 2x2 hand case regret 0",
            fixture_solutions().len()
        ))
    });
}

/// All 2-bidder instances with two values and two bids used by criterion 10.
fn ce_instances() -> Vec<AuctionInstance> {
    let mut r = rng(0xCE);
    let mut out = vec![iid_fixtures().into_iter().find(|(n, _)| n == "two_by_two").unwrap().1];
    for _ in 0..9 {
        let bids = BidSpace::new(grid(&mut r, 2, 10, true)).unwrap();
        let values = fpa_core::ValueSpace::new(grid(&mut r, 2, 10, false)).unwrap();
        let priors = (0..2)
            .map(|i| {
                (0..2)
                    .map(|j| (i != j).then(|| fpa_core::PriorPmf::new(distribution(&mut r, 2, false)).unwrap()))
                    .collect()
            })
            .collect();
        out.push(AuctionInstance::new(bids, vec![values; 2], priors).unwrap());
    }
    out
}

#[test]
fn criterion_10_correlated_equilibria() {
    criterion(10, 300, || {
        let mut embedded = 0;
        for (name, a, sol) in fixture_solutions() {
            let Ok(sol) = sol else { continue };
            if !sol.max_regret.is_zero() {
                continue;
            }
            let game = TypeAgentGame::new(a);
            let dist = CorrelatedDistribution::from_profile(&game, &sol.profile);
            let reg = ce_regret(&game, &dist).value;
            ensure(reg.is_zero(), || format!("{name}: product embedding has ce regret {}", q(&reg)))?;
            embedded += 1;
        }
        ensure(embedded > 0, || "no exact equilibrium to embed".into())?;
        let target = rat(1, 20);
        let mut rounds = 0;
        let instances = ce_instances();
        for (t, a) in instances.iter().enumerate() {
            let game = TypeAgentGame::new(a);
            let lp = solve_ce_lp(&game).map_err(|e| format!("instance {t}: {e}"))?;
            lp.check(&game).map_err(|e| e.to_string())?;
            let reg = ce_regret(&game, &lp).value;
            ensure(reg.is_zero(), || format!("instance {t}: LP ce regret {}", q(&reg)))?;
            let dynamics = solve_ce_dynamics(&game, &target, &DynamicsConfig::default())
                .map_err(|e| format!("instance {t}: {e}"))?;
            ensure(dynamics.regret <= target, || format!("instance {t}: dynamics regret {}", q(&dynamics.regret)))?;
            rounds = rounds.max(dynamics.rounds);
        }
        Ok(format!(
            "{embedded} exact equilibria embed with regret 0; LP exact and dynamics <= 1/20 on {} instances (max {rounds} rounds)",
            instances.len()
        ))
    });
}

/// Mixes `p` with weight `w` towards a random non-overbidding profile.
fn perturb(r: &mut rand_chacha::ChaCha8Rng, a: &AuctionInstance, p: &MixedStrategyProfile, w: &Rational) -> MixedStrategyProfile {
    let noise = random_valid_profile(r, a);
    MixedStrategyProfile::new(
        p.strategies()
            .iter()
            .zip(noise.strategies())
            .map(|(s, z)| {
                let rows = s
                    .dists()
                    .iter()
                    .zip(z.dists())
                    .map(|(x, y)| x.iter().zip(y).map(|(a, b)| (one() - w) * a + w * b).collect())
                    .collect();
                MixedStrategy::from_table(rows)
            })
            .collect(),
    )
}

fn support_within(inner: &MixedStrategyProfile, outer: &MixedStrategyProfile) -> bool {
    inner.strategies().iter().zip(outer.strategies()).all(|(s, t)| {
        (0..s.num_values()).all(|v| s.support(v).iter().all(|b| t.support(v).contains(b)))
    })
}

#[test]
fn criterion_11_ne_to_wsne() {
    criterion(11, 60, || {
        let mut r = rng(0xC11);
        let bases: Vec<_> = fixture_solutions()
            .iter()
            .filter_map(|(name, a, s)| s.as_ref().ok().map(|s| (name, a, &s.profile)))
            .collect();
        ensure(!bases.is_empty(), || "no base equilibria".into())?;
        let mut shrunk = 0;
        for t in 0..50 {
            let (name, a, base) = bases[t % bases.len()];
            let d = a.interaction_degree().max(1);
            let cap = one() / int(8 * d as i64);
            let mut w = rat(1, r.gen_range(20..=400));
            let (p, delta) = loop {
                let p = perturb(&mut r, a, base, &w);
                let delta = max_regret(a, &p).map_err(|e| e.to_string())?.max_regret;
                if delta <= cap {
                    break (p, delta);
                }
                w /= int(2);
            };
            let out = ne_to_wsne(a, &p, &delta, d).map_err(|e| format!("{name} #{t}: {e}"))?;
            let expected = if out.gamma.is_zero() {
                zero()
            } else {
                &out.gamma + int(2 * d as i64) * &delta / &out.gamma
            };
            ensure(out.eps == expected, || format!("{name} #{t}: reported level {}", q(&out.eps)))?;
            let v = is_eps_wsne(a, &out.profile, &out.eps).map_err(|e| e.to_string())?;
            ensure(v.holds, || format!("{name} #{t}: regret {} above {}", q(&v.regret), q(&out.eps)))?;
            ensure(support_within(&out.profile, &p), || format!("{name} #{t}: support grew"))?;
            if !support_within(&p, &out.profile) {
                shrunk += 1;
            }
        }
        Ok(format!("50 perturbations filtered to verified WSNE; support strictly shrank in {shrunk}"))
    });
}

#[test]
fn circuit_output_uses_true_encoding() {
    let c = CircuitInstance::parse("y = OR a b\noutput y\n").unwrap();
    let red = circuit_to_dfpa(&c).unwrap();
    let p = assignment_to_pbne(&red, &[false, true]).unwrap();
    assert_eq!(p.bids[red.bidder_of("y").unwrap()], S1.to_vec());
}
