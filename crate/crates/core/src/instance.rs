//! JSON instance files: a structure plus an optional team.
//!
//! ```json
//! {"domain": ["a", "b"],
//!  "relations": {"R": {"arity": 2, "tuples": [["a", "b"]]}},
//!  "constants": {"zero": "a", "one": "b"},
//!  "team": {"vars": ["x", "y"], "rows": [{"t": ["a", "b"], "w": "1/3"}]}}
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational, Rational};
use crate::structure::Structure;
use crate::team::WeightedTeam;

#[derive(Debug, Serialize, Deserialize)]
struct RelationFile {
    arity: usize,
    #[serde(default)]
    tuples: Vec<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RowFile {
    t: Vec<String>,
    w: Value,
}

#[derive(Debug, Serialize, Deserialize)]
struct TeamFile {
    vars: Vec<String>,
    rows: Vec<RowFile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct InstanceFile {
    domain: Vec<String>,
    #[serde(default)]
    relations: BTreeMap<String, RelationFile>,
    #[serde(default)]
    constants: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    team: Option<TeamFile>,
}

/// A structure together with the team to evaluate on.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub structure: Structure,
    /// The given team, or the unit team over no variables when absent.
    pub team: WeightedTeam,
    pub has_team: bool,
}

pub fn parse_weight(v: &Value) -> Result<Rational> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => return Err(Error::InvalidWeight(other.to_string())),
    };
    let w = parse_rational(&text).ok_or_else(|| Error::InvalidWeight(text.clone()))?;
    if w < Rational::from_integer(0.into()) {
        return Err(Error::NegativeWeight(text));
    }
    Ok(w)
}

pub fn parse_team(st: &Structure, value: &Value) -> Result<WeightedTeam> {
    let file: TeamFile = serde_json::from_value(value.clone())?;
    let mut rows = Vec::with_capacity(file.rows.len());
    for r in &file.rows {
        let t = r.t.iter().map(|e| st.elem(e)).collect::<Result<Vec<_>>>()?;
        rows.push((t, parse_weight(&r.w)?));
    }
    WeightedTeam::from_rows(file.vars, rows)
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text)?;
    let mut st = Structure::new(file.domain)?;
    for (name, rel) in &file.relations {
        st.add_relation(name, rel.arity, rel.tuples.iter().cloned())?;
    }
    for (name, elem) in &file.constants {
        st.set_constant(name, elem)?;
    }
    let (team, has_team) = match &file.team {
        Some(t) => (parse_team(&st, &serde_json::to_value(t)?)?, true),
        None => (WeightedTeam::unit(), false),
    };
    Ok(Instance {
        structure: st,
        team,
        has_team,
    })
}

pub fn team_to_json(st: &Structure, team: &WeightedTeam) -> Value {
    let rows: Vec<Value> = team
        .rows()
        .map(|(t, w)| {
            serde_json::json!({
                "t": t.iter().map(|&e| st.name(e)).collect::<Vec<_>>(),
                "w": format_rational(w),
            })
        })
        .collect();
    serde_json::json!({"vars": team.vars(), "rows": rows})
}

pub fn instance_to_json(st: &Structure, team: Option<&WeightedTeam>) -> Value {
    let relations: serde_json::Map<String, Value> = st
        .relations()
        .iter()
        .map(|(name, rel)| {
            let tuples: Vec<Vec<&str>> = rel
                .tuples
                .iter()
                .map(|t| t.iter().map(|&e| st.name(e)).collect())
                .collect();
            (
                name.clone(),
                serde_json::json!({"arity": rel.arity, "tuples": tuples}),
            )
        })
        .collect();
    let constants: serde_json::Map<String, Value> = st
        .constants()
        .iter()
        .map(|(k, &e)| (k.clone(), Value::String(st.name(e).to_string())))
        .collect();
    let mut out = serde_json::json!({
        "domain": st.domain(),
        "relations": relations,
        "constants": constants,
    });
    if let Some(team) = team {
        out["team"] = team_to_json(st, team);
    }
    out
}
