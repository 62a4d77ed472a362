//! JSON file formats. Every rational is a `"p/q"` string; no floats appear.
//!
//! Bidder indices in files are 0-based. A prior or density entry without
//! `"i"` applies to every observer of bidder `"j"`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::auction::{
    AuctionInstance, BidSpace, MixedStrategy, MixedStrategyProfile, PriorPmf, PureStrategyProfile,
    ValueSpace,
};
use crate::continuous::{ContinuousAuction, PiecewiseConstantDensity, StepStrategy, StepStrategyProfile};
use crate::error::ModelError;
use crate::rational::{format_rational, parse_rational, zero, ParseRationalError, Rational};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Rational(#[from] ParseRationalError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0}")]
    Schema(String),
}

fn schema<T>(msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError::Schema(msg.into()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub n: usize,
    pub bids: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub priors: Vec<PriorEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub densities: Vec<DensityEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PriorEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    pub j: usize,
    pub pmf: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    pub j: usize,
    pub breakpoints: Vec<String>,
    pub heights: Vec<String>,
}

#[derive(Debug, Clone)]
pub enum Instance {
    Discrete(AuctionInstance),
    Continuous(ContinuousAuction),
}

fn parse_all(xs: &[String]) -> Result<Vec<Rational>, FormatError> {
    xs.iter().map(|s| Ok(parse_rational(s)?)).collect()
}

fn strings(xs: &[Rational]) -> Vec<String> {
    xs.iter().map(format_rational).collect()
}

/// Fills an `n x n` table from entries that name one observer or all of them.
fn spread<T: Clone>(
    n: usize,
    entries: impl IntoIterator<Item = (Option<usize>, usize, T)>,
) -> Result<Vec<Vec<Option<T>>>, FormatError> {
    let mut table: Vec<Vec<Option<T>>> = vec![vec![None; n]; n];
    for (i, j, x) in entries {
        if j >= n || i.is_some_and(|i| i >= n || i == j) {
            return schema(format!("bad prior indices (i={i:?}, j={j})"));
        }
        let observers: Vec<usize> = match i {
            Some(i) => vec![i],
            None => (0..n).filter(|&o| o != j).collect(),
        };
        for o in observers {
            if table[o][j].is_some() {
                return schema(format!("duplicate prior ({o},{j})"));
            }
            table[o][j] = Some(x.clone());
        }
    }
    Ok(table)
}

pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let file: InstanceFile = serde_json::from_str(text)?;
    instance_from_file(&file)
}

pub fn instance_from_file(file: &InstanceFile) -> Result<Instance, FormatError> {
    let bids = BidSpace::new(parse_all(&file.bids)?)?;
    let n = file.n;
    match file.kind.as_deref().unwrap_or("dfpa") {
        "dfpa" => {
            if file.values.len() != n {
                return schema(format!("{} value spaces for n = {n}", file.values.len()));
            }
            let values = file
                .values
                .iter()
                .map(|v| Ok(ValueSpace::new(parse_all(v)?)?))
                .collect::<Result<Vec<_>, FormatError>>()?;
            let mut entries = Vec::new();
            for e in &file.priors {
                if e.j >= n {
                    return schema(format!("prior about unknown bidder {}", e.j));
                }
                let pairs = e
                    .pmf
                    .iter()
                    .map(|(v, p)| Ok((parse_rational(v)?, parse_rational(p)?)))
                    .collect::<Result<Vec<_>, FormatError>>()?;
                entries.push((e.i, e.j, PriorPmf::from_pairs(&values[e.j], &pairs)?));
            }
            let priors = spread(n, entries)?;
            Ok(Instance::Discrete(AuctionInstance::new(bids, values, priors)?))
        }
        "cfpa" => {
            let mut entries = Vec::new();
            for e in &file.densities {
                let d = PiecewiseConstantDensity::new(parse_all(&e.breakpoints)?, parse_all(&e.heights)?)?;
                entries.push((e.i, e.j, d));
            }
            let densities = spread(n, entries)?;
            Ok(Instance::Continuous(ContinuousAuction::new(bids, densities)?))
        }
        other => schema(format!("unknown instance kind {other:?}")),
    }
}

pub fn instance_to_file(a: &AuctionInstance) -> InstanceFile {
    let n = a.n();
    let mut priors = Vec::new();
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let f = a.prior(i, j);
            let pmf = a
                .value_space(j)
                .values()
                .iter()
                .zip(f.masses())
                .filter(|(_, p)| **p != zero())
                .map(|(v, p)| (format_rational(v), format_rational(p)))
                .collect();
            priors.push(PriorEntry { i: Some(i), j, pmf });
        }
    }
    InstanceFile {
        kind: Some("dfpa".into()),
        n,
        bids: strings(a.bid_space().bids()),
        values: a.value_spaces().iter().map(|v| strings(v.values())).collect(),
        priors,
        densities: Vec::new(),
    }
}

pub fn cfpa_to_file(c: &ContinuousAuction) -> InstanceFile {
    let n = c.n();
    let mut densities = Vec::new();
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let d = c.density(i, j);
            densities.push(DensityEntry {
                i: Some(i),
                j,
                breakpoints: strings(d.breakpoints()),
                heights: strings(d.heights()),
            });
        }
    }
    InstanceFile {
        kind: Some("cfpa".into()),
        n,
        bids: strings(c.bid_space().bids()),
        values: Vec::new(),
        priors: Vec::new(),
        densities,
    }
}

pub fn instance_to_json(a: &AuctionInstance) -> Value {
    serde_json::to_value(instance_to_file(a)).expect("serializable")
}

pub fn cfpa_to_json(c: &ContinuousAuction) -> Value {
    serde_json::to_value(cfpa_to_file(c)).expect("serializable")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProfileFile {
    /// Per bidder: value -> (bid -> probability).
    Mixed {
        strategies: Vec<BTreeMap<String, BTreeMap<String, String>>>,
    },
    /// Per bidder: value -> bid.
    Pure {
        strategies: Vec<BTreeMap<String, String>>,
    },
    /// Per bidder: the jump points of a step strategy.
    Step { jump_points: Vec<Vec<String>> },
}

#[derive(Debug, Clone)]
pub enum Profile {
    Mixed(MixedStrategyProfile),
    Pure(PureStrategyProfile),
    Step(StepStrategyProfile),
}

fn bid_index(bids: &BidSpace, s: &str) -> Result<usize, FormatError> {
    let b = parse_rational(s)?;
    bids.index_of(&b)
        .ok_or_else(|| FormatError::Model(ModelError::BidNotInSpace(format_rational(&b))))
}

fn value_key<'m, T>(
    map: &'m BTreeMap<String, T>,
    v: &Rational,
) -> Result<&'m T, FormatError> {
    for (k, x) in map {
        if &parse_rational(k)? == v {
            return Ok(x);
        }
    }
    schema(format!("strategy is missing value {}", format_rational(v)))
}

/// Parses a profile against a discrete instance (mixed or pure kinds).
pub fn parse_profile(text: &str, a: &AuctionInstance) -> Result<Profile, FormatError> {
    let file: ProfileFile = serde_json::from_str(text)?;
    let bids = a.bid_space();
    match file {
        ProfileFile::Mixed { strategies } => {
            if strategies.len() != a.n() {
                return schema("profile size does not match n");
            }
            let mut out = Vec::new();
            for (i, s) in strategies.iter().enumerate() {
                let mut rows = Vec::new();
                for v in a.value_space(i).values() {
                    let dist = value_key(s, v)?;
                    let mut row = vec![zero(); bids.len()];
                    for (b, p) in dist {
                        row[bid_index(bids, b)?] += parse_rational(p)?;
                    }
                    rows.push(row);
                }
                out.push(MixedStrategy::from_table(rows));
            }
            let p = MixedStrategyProfile::new(out);
            p.check(a)?;
            Ok(Profile::Mixed(p))
        }
        ProfileFile::Pure { strategies } => {
            if strategies.len() != a.n() {
                return schema("profile size does not match n");
            }
            let mut out = Vec::new();
            for (i, s) in strategies.iter().enumerate() {
                let row = a
                    .value_space(i)
                    .values()
                    .iter()
                    .map(|v| bid_index(bids, value_key(s, v)?))
                    .collect::<Result<Vec<_>, _>>()?;
                out.push(row);
            }
            let p = PureStrategyProfile::new(out);
            p.check(a)?;
            Ok(Profile::Pure(p))
        }
        ProfileFile::Step { .. } => schema("step profiles need a continuous instance"),
    }
}

pub fn parse_step_profile(text: &str, c: &ContinuousAuction) -> Result<StepStrategyProfile, FormatError> {
    let file: ProfileFile = serde_json::from_str(text)?;
    let ProfileFile::Step { jump_points } = file else {
        return schema("expected a step profile");
    };
    if jump_points.len() != c.n() {
        return schema("profile size does not match n");
    }
    let strategies = jump_points
        .iter()
        .map(|jp| Ok(StepStrategy::new(parse_all(jp)?, c.bid_space())?))
        .collect::<Result<Vec<_>, FormatError>>()?;
    Ok(StepStrategyProfile::new(strategies))
}

pub fn mixed_profile_to_json(a: &AuctionInstance, p: &MixedStrategyProfile) -> Value {
    let strategies: Vec<BTreeMap<String, BTreeMap<String, String>>> = p
        .strategies()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            a.value_space(i)
                .values()
                .iter()
                .enumerate()
                .map(|(vi, v)| {
                    let dist = s
                        .dist(vi)
                        .iter()
                        .enumerate()
                        .filter(|(_, q)| **q != zero())
                        .map(|(b, q)| (format_rational(a.bid_space().get(b)), format_rational(q)))
                        .collect();
                    (format_rational(v), dist)
                })
                .collect()
        })
        .collect();
    serde_json::to_value(ProfileFile::Mixed { strategies }).expect("serializable")
}

pub fn pure_profile_to_json(a: &AuctionInstance, p: &PureStrategyProfile) -> Value {
    let strategies = p
        .bids
        .iter()
        .enumerate()
        .map(|(i, row)| {
            a.value_space(i)
                .values()
                .iter()
                .zip(row)
                .map(|(v, &b)| (format_rational(v), format_rational(a.bid_space().get(b))))
                .collect()
        })
        .collect();
    serde_json::to_value(ProfileFile::Pure { strategies }).expect("serializable")
}

pub fn step_profile_to_json(p: &StepStrategyProfile) -> Value {
    let jump_points = p.strategies().iter().map(|s| strings(s.jump_points())).collect();
    serde_json::to_value(ProfileFile::Step { jump_points }).expect("serializable")
}

pub fn rational_json(r: &Rational) -> Value {
    json!(format_rational(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    const IID: &str = r#"{
        "n": 2,
        "bids": ["0", "1/2"],
        "values": [["0", "1"], ["0", "1"]],
        "priors": [{"j": 0, "pmf": {"0": "1/2", "1": "1/2"}},
                   {"j": 1, "pmf": {"0": "1/2", "1": "1/2"}}]
    }"#;

    #[test]
    fn instance_round_trip() {
        let Instance::Discrete(a) = parse_instance(IID).unwrap() else { panic!() };
        assert!(a.is_iid());
        let text = serde_json::to_string(&instance_to_json(&a)).unwrap();
        assert!(!text.contains('.'));
        let Instance::Discrete(b) = parse_instance(&text).unwrap() else { panic!() };
        assert_eq!(a, b);
    }

    #[test]
    fn bad_prior_is_rejected() {
        let bad = IID.replace(r#""1": "1/2"}},"#, r#""1": "49/100"}},"#);
        assert!(matches!(
            parse_instance(&bad),
            Err(FormatError::Model(ModelError::MassNotOne(_)))
        ));
    }

    #[test]
    fn profile_round_trip() {
        let Instance::Discrete(a) = parse_instance(IID).unwrap() else { panic!() };
        let p = PureStrategyProfile::new(vec![vec![0, 1], vec![0, 0]]);
        let text = pure_profile_to_json(&a, &p).to_string();
        let Profile::Pure(q) = parse_profile(&text, &a).unwrap() else { panic!() };
        assert_eq!(p, q);
        let m = p.to_mixed(2);
        let text = mixed_profile_to_json(&a, &m).to_string();
        let Profile::Mixed(q) = parse_profile(&text, &a).unwrap() else { panic!() };
        assert_eq!(m, q);
        let overbid = r#"{"kind":"pure","strategies":[{"0":"1/2","1":"1/2"},{"0":"0","1":"0"}]}"#;
        assert!(parse_profile(overbid, &a).is_err());
        assert_eq!(rational_json(&rat(6, 100)), json!("3/50"));
    }
}
