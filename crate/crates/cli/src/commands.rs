use std::path::Path;

use fpa_core::correlated::{
    ce_regret, solve_ce_dynamics, solve_ce_lp, CorrelatedDistribution, DynamicsConfig, TypeAgentGame,
};
use fpa_core::format::{
    cfpa_to_json, instance_to_json, mixed_profile_to_json, parse_instance, parse_profile, parse_step_profile,
    pure_profile_to_json, step_profile_to_json, Instance, Profile,
};
use fpa_core::gadgets::lemmas::DEFAULT_PURE_CIRCUIT;
use fpa_core::gadgets::{
    brute_force_pure_search, check_gadget_lemmas, circuit_to_dfpa, nonexistence_instance, nonexistence_threshold,
    pure_circuit_to_dfpa, CircuitInstance, LemmaContext, LemmaSuite, PaddingMode, PureCircuitInstance,
};
use fpa_core::rational::{format_rational, parse_rational, Rational};
use fpa_core::symmetric::{solve_symmetric, NumericBudget, SymmetricConfig};
use fpa_core::transforms::{
    cfpa_to_dfpa, dfpa_to_cfpa, hausdorff, mbne_from_cfpa_pbne, pbne_from_dfpa_wsne, shrink_bidspace,
    DiscretizationMap,
};
use fpa_core::utility::{brute_force_utility, interim_utility};
use fpa_core::verify::{
    cfpa_verify_pbne, is_eps_mbne, is_eps_pbne, is_eps_wsne, is_monotone, max_regret, Verdict,
};
use fpa_core::{validate_instance, AuctionInstance, ContinuousAuction, MixedStrategyProfile};
use num_traits::Zero;
use serde_json::{json, Map, Value};

use crate::report::{q, qs, CliError, Outcome};
use crate::{CeMethod, Command, Direction, GenKind, Notion, PadMode, Suite};

const DEFAULT_CIRCUIT: &str = "input x\nnx = NOT x\ny = OR x nx\noutput y\n";

type Res = Result<Outcome, CliError>;

pub fn name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Utility { .. } => "utility",
        Command::Verify { .. } => "verify",
        Command::Transform { .. } => "transform",
        Command::Shrink { .. } => "shrink",
        Command::SolveSymmetric { .. } => "solve-symmetric",
        Command::SolveCe { .. } => "solve-ce",
        Command::Gen { .. } => "gen",
        Command::BrutePure { .. } => "brute-pure",
        Command::CheckGadgets { .. } => "check-gadgets",
    }
}

pub fn run(c: &Command, seed: u64) -> Res {
    match c {
        Command::Validate { instance } => validate(instance),
        Command::Utility {
            instance,
            profile,
            bidder,
            value,
            bid,
            brute,
        } => utility(instance, profile, *bidder, value.as_deref(), bid.as_deref(), *brute),
        Command::Verify {
            instance,
            profile,
            notion,
            eps,
            monotone,
        } => verify(instance, profile, *notion, eps, *monotone),
        Command::Transform {
            instance,
            dir,
            delta,
            out_instance,
            map_out,
            lift_profile,
        } => transform(instance, *dir, delta, out_instance.as_deref(), map_out.as_deref(), lift_profile.as_deref()),
        Command::Shrink {
            instance,
            m,
            out_instance,
            profile,
        } => shrink(instance, *m, out_instance.as_deref(), profile.as_deref()),
        Command::SolveSymmetric {
            instance,
            eps,
            starts,
            iters,
            no_shrink,
        } => symmetric(instance, eps, seed, *starts, *iters, !no_shrink),
        Command::SolveCe {
            instance,
            method,
            eps,
            rounds,
        } => correlated(instance, *method, eps, *rounds, seed),
        Command::Gen {
            kind,
            m,
            circuit,
            mode,
            eps,
            out_instance,
        } => generate(*kind, *m, circuit.as_deref(), *mode, eps, out_instance.as_deref()),
        Command::BrutePure { instance, eps } => brute_pure(instance, eps),
        Command::CheckGadgets { suite, circuit, eps } => gadgets(*suite, circuit.as_deref(), eps.as_deref()),
    }
}

fn read(p: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))
}

fn load(p: &Path) -> Result<Instance, CliError> {
    Ok(parse_instance(&read(p)?)?)
}

fn load_discrete(p: &Path) -> Result<AuctionInstance, CliError> {
    match load(p)? {
        Instance::Discrete(a) => Ok(a),
        Instance::Continuous(_) => Err(CliError::Input("expected a discrete instance".into())),
    }
}

fn load_continuous(p: &Path) -> Result<ContinuousAuction, CliError> {
    match load(p)? {
        Instance::Continuous(c) => Ok(c),
        Instance::Discrete(_) => Err(CliError::Input("expected a continuous instance".into())),
    }
}

fn load_mixed(p: &Path, a: &AuctionInstance) -> Result<MixedStrategyProfile, CliError> {
    Ok(match parse_profile(&read(p)?, a)? {
        Profile::Mixed(m) => m,
        Profile::Pure(s) => s.to_mixed(a.bid_space().len()),
        Profile::Step(_) => unreachable!("discrete profiles are never step profiles"),
    })
}

fn rational(s: &str) -> Result<Rational, CliError> {
    Ok(parse_rational(s)?)
}

fn write_json(p: Option<&Path>, v: &Value) -> Result<(), CliError> {
    if let Some(p) = p {
        std::fs::write(p, serde_json::to_string_pretty(v).expect("serializable") + "\n")
            .map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn ok(body: Map<String, Value>) -> Res {
    Ok(Outcome { body, passed: true })
}

fn obj(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("object literal"),
    }
}

fn verdict_json(v: &Verdict) -> Value {
    json!({
        "holds": v.holds,
        "eps": q(&v.eps),
        "regret": q(&v.regret),
        "witness": v.witness.as_ref().map(|w| json!({
            "bidder": w.bidder,
            "value": q(&w.value),
            "bid_index": w.bid_index,
            "gain": q(&w.gain),
        })),
    })
}

fn validate(instance: &Path) -> Res {
    match load(instance)? {
        Instance::Discrete(a) => {
            let r = validate_instance(&a)?;
            ok(obj(json!({
                "verdict": "valid",
                "kind": "dfpa",
                "n": r.n,
                "bids": r.bids,
                "is_ipv": r.is_ipv,
                "is_iid": r.is_iid,
                "interaction_degree": r.interaction_degree,
            })))
        }
        Instance::Continuous(c) => ok(obj(json!({
            "verdict": "valid",
            "kind": "cfpa",
            "n": c.n(),
            "bids": c.bid_space().len(),
            "is_ipv": c.is_ipv(),
            "is_iid": c.is_iid(),
        }))),
    }
}

fn utility(
    instance: &Path,
    profile: &Path,
    bidder: Option<usize>,
    value: Option<&str>,
    bid: Option<&str>,
    brute: bool,
) -> Res {
    let a = load_discrete(instance)?;
    let p = load_mixed(profile, &a)?;
    let bids = a.bid_space();
    let bidders: Vec<usize> = match bidder {
        Some(i) if i >= a.n() => return Err(CliError::Input(format!("bidder {i} out of range"))),
        Some(i) => vec![i],
        None => (0..a.n()).collect(),
    };
    let bid_idx = bid
        .map(|s| {
            let b = rational(s)?;
            bids.index_of(&b)
                .ok_or_else(|| CliError::Input(format!("bid {} is not in the bid space", format_rational(&b))))
        })
        .transpose()?;
    let value = value.map(rational).transpose()?;
    let mut rows = Vec::new();
    let mut agree = true;
    for &i in &bidders {
        let values: Vec<Rational> = match &value {
            Some(v) if a.value_space(i).index_of(v).is_none() => {
                return Err(CliError::Input(format!("value {} is not in V_{i}", format_rational(v))))
            }
            Some(v) => vec![v.clone()],
            None => a.value_space(i).values().to_vec(),
        };
        for v in &values {
            let picks: Vec<usize> = bid_idx.map_or_else(|| (0..bids.len()).collect(), |b| vec![b]);
            let mut us = Vec::new();
            for b in picks {
                let u = interim_utility(&a, i, v, b, &p)?;
                let mut entry = json!({"bid": q(bids.get(b)), "utility": q(&u)});
                if brute {
                    let bf = brute_force_utility(&a, i, v, b, &p)?;
                    agree &= bf == u;
                    entry["brute_force"] = q(&bf);
                }
                us.push(entry);
            }
            rows.push(json!({"bidder": i, "value": q(v), "utilities": us}));
        }
    }
    let mut body = obj(json!({ "rows": rows }));
    if brute {
        body.insert("brute_force_agrees".into(), json!(agree));
    }
    Ok(Outcome { body, passed: agree })
}

fn verify(instance: &Path, profile: &Path, notion: Notion, eps: &str, monotone: bool) -> Res {
    let eps = rational(eps)?;
    if let Notion::CfpaPbne = notion {
        let c = load_continuous(instance)?;
        let s = parse_step_profile(&read(profile)?, &c)?;
        let v = cfpa_verify_pbne(&c, &s, &eps)?;
        return Ok(Outcome {
            passed: v.holds,
            body: obj(json!({"notion": "cfpa-pbne", "result": verdict_json(&v)})),
        });
    }
    let a = load_discrete(instance)?;
    let parsed = parse_profile(&read(profile)?, &a)?;
    let (v, mixed) = match (notion, parsed) {
        (Notion::Pbne, Profile::Pure(s)) => (is_eps_pbne(&a, &s, &eps)?, s.to_mixed(a.bid_space().len())),
        (Notion::Pbne, _) => return Err(CliError::Input("pbne needs a pure profile".into())),
        (n, Profile::Pure(s)) => {
            let m = s.to_mixed(a.bid_space().len());
            (mixed_check(n, &a, &m, &eps)?, m)
        }
        (n, Profile::Mixed(m)) => (mixed_check(n, &a, &m, &eps)?, m),
        (_, Profile::Step(_)) => unreachable!("discrete profiles are never step profiles"),
    };
    let mut body = obj(json!({
        "notion": format!("{notion:?}").to_lowercase(),
        "result": verdict_json(&v),
        "max_regret": q(&max_regret(&a, &mixed)?.max_regret),
    }));
    let mut passed = v.holds;
    if monotone {
        let m = is_monotone(&mixed);
        body.insert("monotone".into(), json!(m));
        passed &= m;
    }
    Ok(Outcome { body, passed })
}

fn mixed_check(n: Notion, a: &AuctionInstance, p: &MixedStrategyProfile, eps: &Rational) -> Result<Verdict, CliError> {
    Ok(match n {
        Notion::Wsne => is_eps_wsne(a, p, eps)?,
        _ => is_eps_mbne(a, p, eps)?,
    })
}

fn map_json(map: &DiscretizationMap) -> Value {
    match map {
        DiscretizationMap::ToContinuous { delta, bids, values } => json!({
            "kind": "to-continuous",
            "delta": q(delta),
            "bids": qs(bids.bids()),
            "values": values.iter().map(|v| qs(v.values())).collect::<Vec<_>>(),
        }),
        DiscretizationMap::ToDiscrete { delta, bids, grid } => json!({
            "kind": "to-discrete",
            "delta": q(delta),
            "bids": qs(bids.bids()),
            "grid": qs(grid),
        }),
    }
}

fn transform(
    instance: &Path,
    dir: Direction,
    delta: &str,
    out_instance: Option<&Path>,
    map_out: Option<&Path>,
    lift: Option<&Path>,
) -> Res {
    let delta = rational(delta)?;
    let mut body = Map::new();
    match dir {
        Direction::D2c => {
            let a = load_discrete(instance)?;
            let (c, map) = dfpa_to_cfpa(&a, &delta)?;
            body.insert("instance".into(), cfpa_to_json(&c));
            body.insert("map".into(), map_json(&map));
            if let Some(p) = lift {
                let s = parse_step_profile(&read(p)?, &c)?;
                let m = mbne_from_cfpa_pbne(&map, &s)?;
                body.insert("lifted_regret".into(), q(&max_regret(&a, &m)?.max_regret));
                body.insert("lifted_profile".into(), mixed_profile_to_json(&a, &m));
            }
        }
        Direction::C2d => {
            let c = load_continuous(instance)?;
            let (d, map) = cfpa_to_dfpa(&c, &delta)?;
            body.insert("instance".into(), instance_to_json(&d));
            body.insert("map".into(), map_json(&map));
            if let Some(p) = lift {
                let m = load_mixed(p, &d)?;
                let s = pbne_from_dfpa_wsne(&map, &m)?;
                body.insert("lifted_regret".into(), q(&cfpa_verify_pbne(&c, &s, &delta)?.regret));
                body.insert("lifted_profile".into(), step_profile_to_json(&s));
            }
        }
    }
    write_json(out_instance, &body["instance"])?;
    write_json(map_out, &body["map"])?;
    body.insert("delta_used".into(), body["map"]["delta"].clone());
    ok(body)
}

fn shrink(instance: &Path, m: u64, out_instance: Option<&Path>, profile: Option<&Path>) -> Res {
    let a = load_discrete(instance)?;
    let s = shrink_bidspace(a.bid_space(), m)?;
    let shrunk = a.with_bid_space(s.bids.clone())?;
    let file = instance_to_json(&shrunk);
    write_json(out_instance, &file)?;
    let mut body = obj(json!({
        "m": m,
        "bids": qs(s.bids.bids()),
        "kept": s.kept,
        "hausdorff": q(&hausdorff(a.bid_space(), &s.bids)),
        "instance": file,
    }));
    if let Some(p) = profile {
        let inner = load_mixed(p, &shrunk)?;
        let inner_regret = max_regret(&shrunk, &inner)?.max_regret;
        let lifted = s.embed(&inner, a.bid_space());
        let outer = max_regret(&a, &lifted)?.max_regret;
        let bound = s.guarantee(&inner_regret);
        body.insert("shrunk_regret".into(), q(&inner_regret));
        body.insert("original_regret".into(), q(&outer));
        body.insert("guarantee".into(), q(&bound));
        body.insert("embedded_profile".into(), mixed_profile_to_json(&a, &lifted));
        let passed = outer <= bound;
        return Ok(Outcome { body, passed });
    }
    ok(body)
}

fn symmetric(instance: &Path, eps: &str, seed: u64, starts: usize, iters: u64, shrink: bool) -> Res {
    let a = load_discrete(instance)?;
    let eps = rational(eps)?;
    let config = SymmetricConfig {
        seed,
        budget: NumericBudget {
            starts,
            max_iters: iters,
        },
        shrink,
    };
    let s = solve_symmetric(&a, &eps, &config)?;
    ok(obj(json!({
        "eps": q(&eps),
        "max_regret": q(&s.max_regret),
        "exact": s.max_regret.is_zero(),
        "monotone": is_monotone(&s.profile),
        "structure": {"xi": s.structure.xi(), "index": s.structure_index, "total": s.structures_total.to_string()},
        "shrink_m": s.shrink_m,
        "profile": mixed_profile_to_json(&a, &s.profile),
    })))
}

fn distribution_json(game: &TypeAgentGame<'_>, d: &CorrelatedDistribution) -> Value {
    let a = game.auction();
    json!({
        "players": game.players().iter().map(|&(i, v)| json!([i, q(a.value_space(i).get(v))])).collect::<Vec<_>>(),
        "components": d.components.iter().map(|c| json!({
            "weight": q(&c.weight),
            "marginals": c.marginals.iter().map(|x| qs(x)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

fn correlated(instance: &Path, method: CeMethod, eps: &str, rounds: u64, seed: u64) -> Res {
    let a = load_discrete(instance)?;
    let game = TypeAgentGame::new(&a);
    let eps = rational(eps)?;
    let (dist, extra) = match method {
        CeMethod::Lp => (solve_ce_lp(&game)?, json!({"method": "lp"})),
        CeMethod::Dynamics => {
            let config = DynamicsConfig {
                max_rounds: rounds,
                seed,
                ..DynamicsConfig::default()
            };
            let r = solve_ce_dynamics(&game, &eps, &config)?;
            (r.distribution, json!({"method": "dynamics", "rounds": r.rounds, "target": q(&eps)}))
        }
    };
    dist.check(&game)?;
    let regret = ce_regret(&game, &dist);
    let mut body = obj(extra);
    body.insert("ce_regret".into(), q(&regret.value));
    body.insert("distribution".into(), distribution_json(&game, &dist));
    ok(body)
}

fn read_or(p: Option<&Path>, default: &str) -> Result<String, CliError> {
    p.map_or_else(|| Ok(default.to_string()), read)
}

fn generate(kind: GenKind, m: u64, circuit: Option<&Path>, mode: PadMode, eps: &str, out: Option<&Path>) -> Res {
    let mut body = Map::new();
    let a = match kind {
        GenKind::Nonexist => {
            body.insert("m".into(), json!(m));
            body.insert("threshold".into(), q(&nonexistence_threshold(m)));
            nonexistence_instance(m)?
        }
        GenKind::Circuit => {
            let c = CircuitInstance::parse(&read_or(circuit, DEFAULT_CIRCUIT)?)?;
            let red = circuit_to_dfpa(&c)?;
            body.insert("netlist".into(), json!(red.circuit.to_netlist()));
            let nodes: Map<String, Value> = red
                .circuit
                .names()
                .iter()
                .zip(&red.node_bidder)
                .map(|(n, b)| (n.clone(), json!(b)))
                .collect();
            body.insert("node_bidder".into(), Value::Object(nodes));
            body.insert(
                "roles".into(),
                json!(red.roles.iter().map(|r| format!("{r:?}")).collect::<Vec<_>>()),
            );
            red.auction
        }
        GenKind::Purecircuit => {
            let pc = PureCircuitInstance::parse(&read_or(circuit, DEFAULT_PURE_CIRCUIT)?)?;
            let mode = match mode {
                PadMode::Small => PaddingMode::Small,
                PadMode::Exact => PaddingMode::Exact { eps: rational(eps)? },
            };
            let red = pure_circuit_to_dfpa(&pc, &mode)?;
            let nodes: Map<String, Value> = pc
                .names()
                .iter()
                .zip(&red.node_bidder)
                .map(|(n, b)| (n.clone(), json!(b)))
                .collect();
            body.insert("node_bidder".into(), Value::Object(nodes));
            body.insert("padding".into(), json!(red.padding));
            red.auction
        }
    };
    let file = instance_to_json(&a);
    write_json(out, &file)?;
    body.insert("n".into(), json!(a.n()));
    body.insert("instance".into(), file);
    ok(body)
}

fn brute_pure(instance: &Path, eps: &str) -> Res {
    let a = load_discrete(instance)?;
    let eps = rational(eps)?;
    let out = brute_force_pure_search(&a, &eps)?;
    ok(obj(json!({
        "verdict": if out.profile.is_some() { "found" } else { "none" },
        "eps": q(&eps),
        "search_space": out.search_space.to_string(),
        "eliminated": out.eliminated,
        "profile": out.profile.as_ref().map(|p| pure_profile_to_json(&a, p)),
    })))
}

fn gadgets(suite: Suite, circuit: Option<&Path>, eps: Option<&str>) -> Res {
    let mut ctx = LemmaContext {
        exact_eps: eps.map(rational).transpose()?,
        ..LemmaContext::default()
    };
    let suite = match suite {
        Suite::AppendixC => {
            ctx.circuit = circuit.map(|p| read(p).and_then(|t| Ok(CircuitInstance::parse(&t)?))).transpose()?;
            LemmaSuite::AppendixC
        }
        Suite::AppendixD => {
            ctx.pure_circuit = circuit.map(|p| read(p).and_then(|t| Ok(PureCircuitInstance::parse(&t)?))).transpose()?;
            LemmaSuite::AppendixD
        }
    };
    let report = check_gadget_lemmas(suite, &ctx)?;
    let passed = report.all_pass();
    let mut body = obj(serde_json::to_value(&report).expect("serializable"));
    body.insert("failures".into(), json!(report.failures().count()));
    Ok(Outcome { body, passed })
}
