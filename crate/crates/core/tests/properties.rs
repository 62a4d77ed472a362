mod common;

use common::*;
use fpa_core::correlated::TypeAgentGame;
use fpa_core::format::{instance_to_json, parse_instance, Instance};
use fpa_core::gadgets::circuit::{all_assignments, assignment_to_pbne, circuit_to_dfpa, CircuitInstance};
use fpa_core::gadgets::nonexistence::{nonexistence_instance, nonexistence_threshold};
use fpa_core::gadgets::search::brute_force_pure_search;
use fpa_core::rational::{one, rat, zero, Rational};
use fpa_core::symmetric::system::{win_prob_binomial, win_prob_telescoped};
use fpa_core::transforms::{hausdorff, ne_to_wsne, shrink_bidspace};
use fpa_core::utility::{bid_mass, interim_utility};
use fpa_core::verify::{is_eps_mbne, is_eps_pbne, is_eps_wsne, max_regret};
use fpa_core::{AuctionInstance, BidSpace, MixedStrategyProfile, PriorPmf, PureStrategyProfile, ValueSpace};
use num_traits::Zero;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn small_instance(r: &mut ChaCha8Rng) -> AuctionInstance {
    let n = r.gen_range(2..=4);
    let m = r.gen_range(1..=4);
    random_instance(r, n, 3, m)
}

fn random_pure(r: &mut ChaCha8Rng, a: &AuctionInstance) -> PureStrategyProfile {
    PureStrategyProfile::new(
        (0..a.n())
            .map(|i| {
                a.value_space(i)
                    .values()
                    .iter()
                    .map(|v| r.gen_range(0..=a.bid_space().max_affordable(v).unwrap_or(0)))
                    .collect()
            })
            .collect(),
    )
}

/// Relabels bidders so that new bidder `k` is old bidder `perm[k]`.
fn permute(a: &AuctionInstance, p: &MixedStrategyProfile, perm: &[usize]) -> (AuctionInstance, MixedStrategyProfile) {
    let values = perm.iter().map(|&k| a.value_space(k).clone()).collect();
    let priors = perm
        .iter()
        .map(|&k| perm.iter().map(|&l| (k != l).then(|| a.prior(k, l).clone())).collect())
        .collect();
    let b = AuctionInstance::new(a.bid_space().clone(), values, priors).unwrap();
    let q = MixedStrategyProfile::new(perm.iter().map(|&k| p.strategy(k).clone()).collect());
    (b, q)
}

fn within_support(inner: &MixedStrategyProfile, outer: &MixedStrategyProfile) -> bool {
    inner.strategies().iter().zip(outer.strategies()).all(|(s, t)| {
        (0..s.num_values()).all(|v| s.support(v).iter().all(|b| !t.dist(v)[*b].is_zero()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn format_roundtrip(seed in any::<u64>()) {
        let a = small_instance(&mut rng(seed));
        let text = instance_to_json(&a).to_string();
        let Instance::Discrete(b) = parse_instance(&text).unwrap() else { panic!("kind changed") };
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(instance_to_json(&b).to_string(), text);
    }

    #[test]
    fn iid_implies_ipv(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=4);
        let k = r.gen_range(1..=3);
        let bids = bid_space(&mut r, 3);
        let a = random_iid(&mut r, n, k, bids);
        prop_assert!(a.is_iid());
        prop_assert!(a.is_ipv());
        let b = small_instance(&mut r);
        prop_assert!(!b.is_iid() || b.is_ipv());
    }

    #[test]
    fn pure_embedding_is_a_valid_mixed_profile(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = small_instance(&mut r);
        let p = random_pure(&mut r, &a);
        p.check(&a).unwrap();
        prop_assert!(p.to_mixed(a.bid_space().len()).check(&a).is_ok());
    }

    #[test]
    fn win_prob_nondecreasing_in_bid(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = small_instance(&mut r);
        let p = random_profile(&mut r, &a);
        for i in 0..a.n() {
            let h = bid_mass(&a, i, &p).unwrap().win_probs();
            prop_assert!(h.windows(2).all(|w| w[0] <= w[1]), "bidder {}: {:?}", i, h);
        }
    }

    #[test]
    fn tie_rows_partition_and_subset_sums(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=6);
        let a = random_instance(&mut r, n, 2, 3);
        let p = random_profile(&mut r, &a);
        for i in 0..n {
            let t = bid_mass(&a, i, &p).unwrap();
            let opp: Vec<usize> = t.opponents().collect();
            for b in 0..a.bid_space().len() {
                let table = t.tie_table(b);
                let last = table.last();
                // nobody above b, split by the number of ties
                let at_most: Rational = opp.iter().map(|&j| t.exact(j, b) + t.below(j, b)).product();
                let total: Rational = last.iter().sum();
                prop_assert_eq!(&total + (one() - &at_most), one());
                for (k, tk) in last.iter().enumerate() {
                    let mut oracle = zero();
                    for mask in 0u32..(1 << opp.len()) {
                        if mask.count_ones() as usize != k {
                            continue;
                        }
                        let term: Rational = opp
                            .iter()
                            .enumerate()
                            .map(|(x, &j)| if mask >> x & 1 == 1 { t.exact(j, b).clone() } else { t.below(j, b).clone() })
                            .product();
                        oracle += term;
                    }
                    prop_assert_eq!(tk, &oracle);
                }
            }
        }
    }

    #[test]
    fn opponent_order_does_not_matter(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = small_instance(&mut r);
        let p = random_profile(&mut r, &a);
        let mut perm: Vec<usize> = (0..a.n()).collect();
        perm.reverse();
        perm.rotate_left(r.gen_range(0..a.n()));
        let (b, q) = permute(&a, &p, &perm);
        for (k, &old) in perm.iter().enumerate() {
            for v in a.value_space(old).values() {
                for bid in 0..a.bid_space().len() {
                    prop_assert_eq!(
                        interim_utility(&a, old, v, bid, &p).unwrap(),
                        interim_utility(&b, k, v, bid, &q).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn verifier_notions_agree(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = small_instance(&mut r);
        let p = random_valid_profile(&mut r, &a);
        let eps = rat(r.gen_range(0..=10), 40);
        let mbne = is_eps_mbne(&a, &p, &eps).unwrap().holds;
        prop_assert_eq!(max_regret(&a, &p).unwrap().max_regret <= eps, mbne);
        if is_eps_wsne(&a, &p, &eps).unwrap().holds {
            prop_assert!(mbne);
        }
        let pure = random_pure(&mut r, &a);
        let mixed = pure.to_mixed(a.bid_space().len());
        prop_assert_eq!(is_eps_pbne(&a, &pure, &eps).unwrap().holds, is_eps_mbne(&a, &mixed, &eps).unwrap().holds);
    }

    #[test]
    fn shrink_stays_close(seed in any::<u64>(), m in 1u64..=20) {
        let mut r = rng(seed);
        let len = r.gen_range(1..=12);
        let b = BidSpace::new(grid(&mut r, len, 24, true)).unwrap();
        let s = shrink_bidspace(&b, m).unwrap();
        prop_assert!(hausdorff(&b, &s.bids) <= rat(1, m as i64));
        prop_assert!(s.bids.bids().iter().all(|x| b.index_of(x).is_some()));
        prop_assert!(s.bids.get(0).is_zero());
        prop_assert!(s.bids.len() as u64 <= m + 1);
        // every bid has a kept bid at most 1/M above it
        for x in b.bids() {
            prop_assert!(s.bids.bids().iter().any(|y| y >= x && y - x <= rat(1, m as i64)));
        }
    }

    #[test]
    fn ne_to_wsne_only_removes_support(seed in any::<u64>()) {
        let mut r = rng(seed);
        // low values keep every non-overbidding profile within 1/(8d)
        let n = r.gen_range(2..=3);
        let top = if n == 2 { 10 } else { 5 };
        let values: Vec<ValueSpace> = (0..n)
            .map(|_| {
                let k = r.gen_range(1..=2);
                ValueSpace::new(grid(&mut r, k, top, false).into_iter().map(|x| x * rat(top, 80)).collect()).unwrap()
            })
            .collect();
        let priors = (0..n)
            .map(|i| (0..n).map(|j| (i != j).then(|| PriorPmf::new(distribution(&mut r, values[j].len(), false)).unwrap())).collect())
            .collect();
        let bids = BidSpace::new(grid(&mut r, 4, 80, true)).unwrap();
        let a = AuctionInstance::new(bids, values, priors).unwrap();
        let p = random_valid_profile(&mut r, &a);
        let d = a.interaction_degree().max(1);
        let delta = max_regret(&a, &p).unwrap().max_regret;
        let out = ne_to_wsne(&a, &p, &delta, d).unwrap();
        prop_assert!(within_support(&out.profile, &p));
        prop_assert!(is_eps_wsne(&a, &out.profile, &out.eps).unwrap().holds);
    }

    #[test]
    fn binomial_and_telescoped_win_probs_agree(a in 0i64..=60, b in 0i64..=60, n in 1usize..=7) {
        let (lo, hi) = (a.min(b), a.max(b));
        let big = rat(lo, 60);
        let g = rat(hi - lo, 60);
        let next = &big + &g;
        prop_assert_eq!(win_prob_binomial(&g, &big, n), win_prob_telescoped(&big, &next, n));
    }

    #[test]
    fn type_agent_payoff_ignores_own_other_types(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = small_instance(&mut r);
        let game = TypeAgentGame::new(&a);
        let na = game.num_actions();
        let s: Vec<usize> = (0..game.num_players()).map(|_| r.gen_range(0..na)).collect();
        let base = game.payoff(&s);
        let players = game.players().to_vec();
        for (p, &(i, v)) in players.iter().enumerate() {
            for (q, &(i2, v2)) in players.iter().enumerate() {
                if i2 == i && v2 != v {
                    let mut t = s.clone();
                    t[q] = (t[q] + 1) % na;
                    prop_assert_eq!(&game.payoff(&t)[p], &base[p]);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn satisfying_assignments_give_exact_equilibria(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut nodes = vec!["x1".to_string(), "x2".to_string()];
        let mut text = String::from("input x1 x2\n");
        for g in 0..r.gen_range(1..=3) {
            let out = format!("g{g}");
            let pick = |r: &mut ChaCha8Rng| nodes[r.gen_range(0..nodes.len())].clone();
            if r.gen_bool(0.5) {
                text += &format!("{out} = NOT {}\n", pick(&mut r));
            } else {
                let (x, y) = (pick(&mut r), pick(&mut r));
                text += &format!("{out} = OR {x} {y}\n");
            }
            nodes.push(out);
        }
        text += &format!("output {}\n", nodes.last().unwrap());
        let c = CircuitInstance::parse(&text).unwrap();
        let red = circuit_to_dfpa(&c).unwrap();
        for x in all_assignments(c.inputs().len()).unwrap() {
            if c.is_satisfied_by(&x).unwrap() {
                let p = assignment_to_pbne(&red, &x).unwrap();
                let v = is_eps_pbne(&red.auction, &p, &zero()).unwrap();
                prop_assert!(v.holds, "{}inputs {:?}: regret {}", text, x, v.regret);
            }
        }
    }
}

#[test]
fn nonexistence_below_threshold() {
    for m in [10, 12, 16] {
        let a = nonexistence_instance(m).unwrap();
        let eps = nonexistence_threshold(m) - rat(1, 1_000_000_000);
        let out = brute_force_pure_search(&a, &eps).unwrap();
        assert!(out.profile.is_none(), "M = {m}: found {:?}", out.profile);
        assert!(brute_force_pure_search(&a, &one()).unwrap().profile.is_some());
    }
}
