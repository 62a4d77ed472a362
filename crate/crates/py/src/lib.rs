//! Python bindings. Instances and profiles cross the boundary as JSON text
//! in the library's file format; rationals are `"p/q"` strings throughout.

use fpa_core::correlated::{ce_regret, solve_ce_lp as ce_lp, TypeAgentGame};
use fpa_core::format::{
    instance_to_json, mixed_profile_to_json, parse_instance, parse_profile, pure_profile_to_json, Instance, Profile,
};
use fpa_core::gadgets::{
    brute_force_pure_search as brute_search, check_gadget_lemmas as lemmas, nonexistence_instance as nonexist,
    LemmaContext, LemmaSuite,
};
use fpa_core::rational::{format_rational, parse_rational, Rational};
use fpa_core::symmetric::{solve_symmetric as solve_sym, SymmetricConfig};
use fpa_core::transforms::shrink_bidspace as shrink;
use fpa_core::utility::interim_utility as utility;
use fpa_core::verify::{is_eps_mbne, is_eps_pbne, is_eps_wsne, max_regret as regret};
use fpa_core::{validate_instance as validate, AuctionInstance, BidSpace, MixedStrategyProfile};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde_json::json;

fn bad<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rational(s: &str) -> PyResult<Rational> {
    parse_rational(s).map_err(bad)
}

fn discrete(text: &str) -> PyResult<AuctionInstance> {
    match parse_instance(text).map_err(bad)? {
        Instance::Discrete(a) => Ok(a),
        Instance::Continuous(_) => Err(PyValueError::new_err("expected a discrete instance")),
    }
}

fn mixed(text: &str, a: &AuctionInstance) -> PyResult<MixedStrategyProfile> {
    Ok(match parse_profile(text, a).map_err(bad)? {
        Profile::Mixed(m) => m,
        Profile::Pure(p) => p.to_mixed(a.bid_space().len()),
        Profile::Step(_) => return Err(PyValueError::new_err("step profiles need a continuous instance")),
    })
}

/// Structural summary of an instance as JSON.
#[pyfunction]
fn validate_instance(instance: &str) -> PyResult<String> {
    let a = discrete(instance)?;
    let r = validate(&a).map_err(bad)?;
    Ok(json!({
        "n": r.n,
        "bids": r.bids,
        "is_ipv": r.is_ipv,
        "is_iid": r.is_iid,
        "interaction_degree": r.interaction_degree,
    })
    .to_string())
}

/// `u_i(b; v)` against the profile.
#[pyfunction]
fn interim_utility(instance: &str, profile: &str, bidder: usize, value: &str, bid: &str) -> PyResult<String> {
    let a = discrete(instance)?;
    let p = mixed(profile, &a)?;
    if bidder >= a.n() {
        return Err(PyValueError::new_err(format!("bidder {bidder} out of range")));
    }
    let b = rational(bid)?;
    let idx = a
        .bid_space()
        .index_of(&b)
        .ok_or_else(|| PyValueError::new_err(format!("bid {bid} is not in the bid space")))?;
    let u = utility(&a, bidder, &rational(value)?, idx, &p).map_err(bad)?;
    Ok(format_rational(&u))
}

/// Checks `notion` in {"pbne", "mbne", "wsne"}; returns `(holds, regret)`.
#[pyfunction]
fn verify(instance: &str, profile: &str, notion: &str, eps: &str) -> PyResult<(bool, String)> {
    let a = discrete(instance)?;
    let eps = rational(eps)?;
    let v = match (notion, parse_profile(profile, &a).map_err(bad)?) {
        ("pbne", Profile::Pure(p)) => is_eps_pbne(&a, &p, &eps),
        ("pbne", _) => return Err(PyValueError::new_err("pbne needs a pure profile")),
        ("mbne" | "wsne", prof) => {
            let m = match prof {
                Profile::Mixed(m) => m,
                Profile::Pure(p) => p.to_mixed(a.bid_space().len()),
                Profile::Step(_) => unreachable!("discrete profiles are never step profiles"),
            };
            if notion == "mbne" {
                is_eps_mbne(&a, &m, &eps)
            } else {
                is_eps_wsne(&a, &m, &eps)
            }
        }
        (other, _) => return Err(PyValueError::new_err(format!("unknown notion {other:?}"))),
    }
    .map_err(bad)?;
    Ok((v.holds, format_rational(&v.regret)))
}

#[pyfunction]
fn max_regret(instance: &str, profile: &str) -> PyResult<String> {
    let a = discrete(instance)?;
    let p = mixed(profile, &a)?;
    Ok(format_rational(&regret(&a, &p).map_err(bad)?.max_regret))
}

/// Kept bids of the 1/M coarsening.
#[pyfunction]
fn shrink_bidspace(bids: Vec<String>, m: u64) -> PyResult<Vec<String>> {
    let b = BidSpace::new(bids.iter().map(|s| rational(s)).collect::<PyResult<_>>()?).map_err(bad)?;
    let s = shrink(&b, m).map_err(bad)?;
    Ok(s.bids.bids().iter().map(format_rational).collect())
}

/// Symmetric eps-MBNE of an iid instance; returns `(profile_json, max_regret)`.
#[pyfunction]
#[pyo3(signature = (instance, eps, seed = 0))]
fn solve_symmetric(py: Python<'_>, instance: &str, eps: &str, seed: u64) -> PyResult<(String, String)> {
    let a = discrete(instance)?;
    let eps = rational(eps)?;
    let config = SymmetricConfig {
        seed,
        ..SymmetricConfig::default()
    };
    let s = py
        .detach(|| solve_sym(&a, &eps, &config))
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok((mixed_profile_to_json(&a, &s.profile).to_string(), format_rational(&s.max_regret)))
}

/// Exact correlated equilibrium; returns its regret, always `"0/1"` on success.
#[pyfunction]
fn solve_ce_lp(instance: &str) -> PyResult<String> {
    let a = discrete(instance)?;
    let game = TypeAgentGame::new(&a);
    let d = ce_lp(&game).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(format_rational(&ce_regret(&game, &d).value))
}

#[pyfunction]
fn nonexistence_instance(m: u64) -> PyResult<String> {
    Ok(instance_to_json(&nonexist(m).map_err(bad)?).to_string())
}

/// First eps-PBNE in lexicographic order as profile JSON, or None.
#[pyfunction]
fn brute_force_pure_search(instance: &str, eps: &str) -> PyResult<Option<String>> {
    let a = discrete(instance)?;
    let out = brute_search(&a, &rational(eps)?).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(out.profile.map(|p| pure_profile_to_json(&a, &p).to_string()))
}

/// Gadget tables for "appendix-c" or "appendix-d"; returns `(all_pass, report_json)`.
#[pyfunction]
fn check_gadget_lemmas(suite: &str) -> PyResult<(bool, String)> {
    let suite = match suite {
        "appendix-c" => LemmaSuite::AppendixC,
        "appendix-d" => LemmaSuite::AppendixD,
        other => return Err(PyValueError::new_err(format!("unknown suite {other:?}"))),
    };
    let r = lemmas(suite, &LemmaContext::default()).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok((r.all_pass(), serde_json::to_string(&r).expect("serializable")))
}

#[pymodule]
fn fpa_auction(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(validate_instance, m)?)?;
    m.add_function(wrap_pyfunction!(interim_utility, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(max_regret, m)?)?;
    m.add_function(wrap_pyfunction!(shrink_bidspace, m)?)?;
    m.add_function(wrap_pyfunction!(solve_symmetric, m)?)?;
    m.add_function(wrap_pyfunction!(solve_ce_lp, m)?)?;
    m.add_function(wrap_pyfunction!(nonexistence_instance, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_pure_search, m)?)?;
    m.add_function(wrap_pyfunction!(check_gadget_lemmas, m)?)?;
    Ok(())
}
