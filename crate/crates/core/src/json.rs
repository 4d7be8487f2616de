//! JSON (de)serialization of games and misinformation games.
//!
//! A game is `{"players": n, "strategies": [c1..cn], "payoffs": <tensor>}`
//! where the tensor is nested arrays, player 1 outermost, and every leaf is
//! an array of `n` payoffs. A payoff is an integer or an exact `"p/q"`
//! string; floats are accepted and read bit-exactly. A misinformation game
//! is `{"actual": <game>, "subjective": [<game>..]}`. Round trips are exact.

use num::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::game::{MixedStrategy, NormalFormGame, StrategyProfile};
use crate::misinfo::MisinformationGame;
use crate::rational::{format_rational, parse_rational, Rational};

fn bad(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::InvalidInput(format!("{path}: {msg}"))
}

pub fn rational_to_json(r: &Rational) -> Value {
    if r.is_integer() {
        if let Some(i) = r.numer().to_i64() {
            return json!(i);
        }
    }
    json!(format_rational(r))
}

pub fn rational_from_json(v: &Value, path: &str) -> Result<Rational> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational::from_integer(i.into()))
            } else if let Some(u) = n.as_u64() {
                Ok(Rational::from_integer(u.into()))
            } else {
                let f = n.as_f64().ok_or_else(|| bad(path, "unreadable number"))?;
                Rational::from_float(f).ok_or_else(|| bad(path, "non-finite number"))
            }
        }
        Value::String(s) => {
            parse_rational(s).map_err(|e| bad(path, format!("{e} (in {s:?})")))
        }
        other => Err(bad(
            path,
            format!("expected an integer or a \"p/q\" string, got {other}"),
        )),
    }
}

fn usize_field(obj: &Map<String, Value>, key: &str, path: &str) -> Result<usize> {
    obj.get(key)
        .ok_or_else(|| bad(path, format!("missing field {key:?}")))?
        .as_u64()
        .map(|u| u as usize)
        .ok_or_else(|| bad(&format!("{path}.{key}"), "expected a non-negative integer"))
}

fn payoff_tensor(game: &NormalFormGame, counts: &[usize], prefix: &mut Vec<usize>) -> Value {
    if prefix.len() == counts.len() {
        let cell = game.cell(prefix).expect("in-bounds profile");
        return Value::Array(cell.iter().map(rational_to_json).collect());
    }
    let c = counts[prefix.len()];
    let mut out = Vec::with_capacity(c);
    for s in 0..c {
        prefix.push(s);
        out.push(payoff_tensor(game, counts, prefix));
        prefix.pop();
    }
    Value::Array(out)
}

pub fn game_to_json(game: &NormalFormGame) -> Value {
    let counts = game.strategy_counts();
    json!({
        "players": game.num_players(),
        "strategies": counts,
        "payoffs": payoff_tensor(game, counts, &mut Vec::new()),
    })
}

fn read_tensor(
    v: &Value,
    counts: &[usize],
    players: usize,
    prefix: &mut Vec<usize>,
    path: &mut String,
    out: &mut Vec<Vec<Rational>>,
) -> Result<()> {
    let depth = prefix.len();
    let arr = v
        .as_array()
        .ok_or_else(|| bad(path, format!("expected an array, got {v}")))?;
    if depth == counts.len() {
        if arr.len() != players {
            return Err(bad(
                path,
                format!("cell holds {} payoffs, expected {players}", arr.len()),
            ));
        }
        let mut cell = Vec::with_capacity(players);
        for (i, p) in arr.iter().enumerate() {
            cell.push(rational_from_json(p, &format!("{path}[{i}]"))?);
        }
        out.push(cell);
        return Ok(());
    }
    if arr.len() != counts[depth] {
        return Err(bad(
            path,
            format!(
                "axis for player {} has length {}, expected {}",
                depth + 1,
                arr.len(),
                counts[depth]
            ),
        ));
    }
    for (s, sub) in arr.iter().enumerate() {
        prefix.push(s);
        let mark = path.len();
        path.push_str(&format!("[{s}]"));
        read_tensor(sub, counts, players, prefix, path, out)?;
        path.truncate(mark);
        prefix.pop();
    }
    Ok(())
}

pub fn game_from_json(v: &Value, path: &str) -> Result<NormalFormGame> {
    let obj = v
        .as_object()
        .ok_or_else(|| bad(path, format!("expected an object, got {v}")))?;
    let players = usize_field(obj, "players", path)?;
    let counts_val = obj
        .get("strategies")
        .ok_or_else(|| bad(path, "missing field \"strategies\""))?
        .as_array()
        .ok_or_else(|| bad(&format!("{path}.strategies"), "expected an array"))?;
    if counts_val.len() != players {
        return Err(bad(
            &format!("{path}.strategies"),
            format!("{} entries for {players} players", counts_val.len()),
        ));
    }
    let counts: Vec<usize> = counts_val
        .iter()
        .enumerate()
        .map(|(i, c)| {
            c.as_u64()
                .filter(|&u| u >= 1)
                .map(|u| u as usize)
                .ok_or_else(|| {
                    bad(
                        &format!("{path}.strategies[{i}]"),
                        "expected a positive integer",
                    )
                })
        })
        .collect::<Result<_>>()?;
    let payoffs_val = obj
        .get("payoffs")
        .ok_or_else(|| bad(path, "missing field \"payoffs\""))?;
    let mut payoffs = Vec::new();
    read_tensor(
        payoffs_val,
        &counts,
        players,
        &mut Vec::new(),
        &mut format!("{path}.payoffs"),
        &mut payoffs,
    )?;
    NormalFormGame::new(counts, payoffs)
}

pub fn misinfo_to_json(mg: &MisinformationGame) -> Value {
    json!({
        "actual": game_to_json(&mg.actual),
        "subjective": mg.subjective.iter().map(game_to_json).collect::<Vec<_>>(),
    })
}

pub fn misinfo_from_json(v: &Value, path: &str) -> Result<MisinformationGame> {
    let obj = v
        .as_object()
        .ok_or_else(|| bad(path, format!("expected an object, got {v}")))?;
    let actual = game_from_json(
        obj.get("actual")
            .ok_or_else(|| bad(path, "missing field \"actual\""))?,
        &format!("{path}.actual"),
    )?;
    let views = obj
        .get("subjective")
        .ok_or_else(|| bad(path, "missing field \"subjective\""))?
        .as_array()
        .ok_or_else(|| bad(&format!("{path}.subjective"), "expected an array"))?;
    let subjective = views
        .iter()
        .enumerate()
        .map(|(i, g)| game_from_json(g, &format!("{path}.subjective[{i}]")))
        .collect::<Result<_>>()?;
    Ok(MisinformationGame::new(actual, subjective))
}

fn parse_value(text: &str) -> Result<Value> {
    serde_json::from_str(text)
        .map_err(|e| Error::InvalidInput(format!("JSON parse error: {e}")))
}

pub fn game_from_str(text: &str) -> Result<NormalFormGame> {
    game_from_json(&parse_value(text)?, "$")
}

pub fn misinfo_from_str(text: &str) -> Result<MisinformationGame> {
    misinfo_from_json(&parse_value(text)?, "$")
}

pub fn game_to_string(game: &NormalFormGame) -> String {
    let mut s = serde_json::to_string_pretty(&game_to_json(game)).expect("valid JSON value");
    s.push('\n');
    s
}

pub fn misinfo_to_string(mg: &MisinformationGame) -> String {
    let mut s = serde_json::to_string_pretty(&misinfo_to_json(mg)).expect("valid JSON value");
    s.push('\n');
    s
}

/// A mixed profile as nested probability arrays, one inner array per player.
pub fn profile_to_json(profile: &StrategyProfile) -> Value {
    Value::Array(
        profile
            .strategies
            .iter()
            .map(|m| Value::Array(m.probs.iter().map(rational_to_json).collect()))
            .collect(),
    )
}

pub fn profile_from_json(v: &Value, path: &str) -> Result<StrategyProfile> {
    let arr = v
        .as_array()
        .ok_or_else(|| bad(path, "expected an array of per-player distributions"))?;
    let strategies = arr
        .iter()
        .enumerate()
        .map(|(i, probs)| {
            let ppath = format!("{path}[{i}]");
            let probs = probs
                .as_array()
                .ok_or_else(|| bad(&ppath, "expected an array of probabilities"))?
                .iter()
                .enumerate()
                .map(|(j, p)| rational_from_json(p, &format!("{ppath}[{j}]")))
                .collect::<Result<Vec<_>>>()?;
            MixedStrategy::new(probs).map_err(|e| bad(&ppath, e))
        })
        .collect::<Result<_>>()?;
    Ok(StrategyProfile { strategies })
}
