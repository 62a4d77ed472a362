//! Line-oriented netlist syntax shared by both circuit kinds.
//!
//! ```text
//! # comment
//! input a b
//! n = NOT a
//! y = OR a n
//! p q = PURIFY y
//! output y
//! ```

use crate::error::GadgetError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NetlistLine {
    Gate {
        line: usize,
        outputs: Vec<String>,
        op: String,
        args: Vec<String>,
    },
    Input { line: usize, names: Vec<String> },
    Output { line: usize, name: String },
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '\'')
}

pub fn parse_lines(text: &str) -> Result<Vec<NetlistLine>, GadgetError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let err = |msg: &str| GadgetError::Netlist {
            line,
            msg: msg.to_string(),
        };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let check = |names: &[String]| -> Result<(), GadgetError> {
            match names.iter().find(|n| !valid_name(n)) {
                Some(bad) => Err(err(&format!("invalid node name {bad:?}"))),
                None => Ok(()),
            }
        };
        if let Some((lhs, rhs)) = body.split_once('=') {
            let outputs: Vec<String> = lhs.split_whitespace().map(str::to_string).collect();
            let mut rhs = rhs.split_whitespace();
            let op = rhs.next().ok_or_else(|| err("missing gate type"))?.to_ascii_uppercase();
            let args: Vec<String> = rhs.map(str::to_string).collect();
            if outputs.is_empty() {
                return Err(err("missing gate output"));
            }
            check(&outputs)?;
            check(&args)?;
            out.push(NetlistLine::Gate {
                line,
                outputs,
                op,
                args,
            });
            continue;
        }
        let mut words = body.split_whitespace();
        let head = words.next().unwrap_or_default();
        let rest: Vec<String> = words.map(str::to_string).collect();
        check(&rest)?;
        match head {
            "input" => out.push(NetlistLine::Input { line, names: rest }),
            "output" => {
                if rest.len() != 1 {
                    return Err(err("output takes exactly one node"));
                }
                out.push(NetlistLine::Output {
                    line,
                    name: rest[0].clone(),
                });
            }
            other => return Err(err(&format!("unrecognized statement {other:?}"))),
        }
    }
    Ok(out)
}
