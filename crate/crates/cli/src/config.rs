//! Run configuration: a flat `key = value` text format.
//!
//! ```text
//! # comments run to the end of the line
//! M = 3
//! T = 100
//! pattern = AABB
//! games.A.rho.default = 0.5
//! games.B.rho.default = 0.5
//! games.B.rho.RR = 0.55
//! ```
//!
//! Recognised keys:
//!
//! | key | value |
//! |-----|-------|
//! | `M` | number of coins, 1..=16 |
//! | `T` | number of steps |
//! | `horizon` | largest `T` the state is sized for (default `T`) |
//! | `pattern` | game letters played cyclically (required) |
//! | `initial` | `antisymmetric` (default) or `all_r` |
//! | `snapshots` | comma-separated steps at which to record distributions |
//! | `window` | smoothing window for peak finding, odd (default 5) |
//! | `prominence` | peak height threshold as a fraction of the maximum (default 0.1) |
//! | `seed` | Monte Carlo seed (default 0) |
//! | `engine` | classical engine: `capital` (default) or `history_walk` |
//! | `out`, `plot` | output paths |
//! | `games.X.rho.default` | retention probability for every history of game `X` |
//! | `games.X.rho.H` | retention probability after history `H` (`M - 1` letters, most recent first) |
//! | `games.X.type` | classical game: `biased`, `capital_mod3` or `history_coins` |
//! | `games.X.p` | winning probability of a `biased` game |
//! | `games.X.p1` .. `games.X.p4` | probabilities of `capital_mod3` (p1, p2) or `history_coins` (p1..p4) games |
//!
//! Unknown keys, repeated keys and out-of-range values are rejected.

use std::collections::BTreeMap;
use std::path::PathBuf;

use hdwalk_core::{
    CapitalGameSpec, CapitalGames, GameSet, GameSpec, HistoryRhoTable, InitialStateKind, SequencePattern,
};
use thiserror::Error;

const MAX_COINS: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key {key:?} given more than once")]
    DuplicateKey { line: usize, key: String },
    #[error("{key}: {msg}")]
    Invalid { key: String, msg: String },
    #[error("{0} required")]
    Missing(&'static str),
}

type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Engine {
    #[default]
    Capital,
    HistoryWalk,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub coins: Option<usize>,
    pub steps: usize,
    pub horizon: usize,
    pub initial: InitialStateKind,
    pub pattern: SequencePattern,
    pub snapshots: Vec<usize>,
    pub window: usize,
    pub prominence: f64,
    pub seed: u64,
    pub engine: Engine,
    pub quantum_games: GameSet,
    pub capital_games: CapitalGames,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

impl RunConfig {
    pub fn coins(&self) -> Result<usize> {
        self.coins.ok_or(ConfigError::Missing("M"))
    }
}

fn invalid(key: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        msg: msg.into(),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| invalid(key, format!("cannot parse {v:?}")))
}

fn parse_prob(key: &str, v: &str) -> Result<f64> {
    let p: f64 = parse_num(key, v)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(key, format!("value {v} outside [0, 1]")));
    }
    Ok(p)
}

fn is_top_level(key: &str) -> bool {
    matches!(
        key,
        "M" | "T"
            | "horizon"
            | "pattern"
            | "initial"
            | "snapshots"
            | "window"
            | "prominence"
            | "seed"
            | "engine"
            | "out"
            | "plot"
    )
}

/// Split `games.X.rest` into `(X, rest)`.
fn game_key(key: &str) -> Option<(char, &str)> {
    let rest = key.strip_prefix("games.")?;
    let (name, field) = rest.split_once('.')?;
    let mut chars = name.chars();
    let c = chars.next()?;
    if chars.next().is_some() || !c.is_ascii_alphabetic() {
        return None;
    }
    let known = matches!(field, "type" | "p" | "p1" | "p2" | "p3" | "p4")
        || field.strip_prefix("rho.").is_some_and(|h| !h.is_empty());
    known.then_some((c, field))
}

fn read_entries(text: &str) -> Result<BTreeMap<String, String>> {
    let mut entries = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap().trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            msg: format!("expected `key = value`, got {content:?}"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                msg: "missing key".into(),
            });
        }
        if !is_top_level(key) && game_key(key).is_none() {
            return Err(ConfigError::UnknownKey {
                line,
                key: key.to_string(),
            });
        }
        if entries.insert(key.to_string(), value.to_string()).is_some() {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
            });
        }
    }
    Ok(entries)
}

/// Parse a configuration document, then apply `overrides` (later entries
/// win) on top of it.
pub fn parse_config(text: &str, overrides: &[(String, String)]) -> Result<RunConfig> {
    let mut entries = read_entries(text)?;
    for (k, v) in overrides {
        if !is_top_level(k) && game_key(k).is_none() {
            return Err(ConfigError::UnknownKey {
                line: 0,
                key: k.clone(),
            });
        }
        entries.insert(k.clone(), v.clone());
    }
    build(&entries)
}

#[derive(Default)]
struct RawGame<'a> {
    rho: Vec<(&'a str, &'a str, String)>,
    kind: Option<&'a str>,
    probs: BTreeMap<&'a str, (&'a str, String)>,
}

fn build(entries: &BTreeMap<String, String>) -> Result<RunConfig> {
    let get = |k: &str| entries.get(k).map(String::as_str);

    let coins = get("M")
        .map(|v| {
            let m: usize = parse_num("M", v)?;
            if !(1..=MAX_COINS).contains(&m) {
                return Err(invalid("M", format!("value {m} outside [1, {MAX_COINS}]")));
            }
            Ok(m)
        })
        .transpose()?;
    let steps: usize = parse_num("T", get("T").ok_or(ConfigError::Missing("T"))?)?;
    let horizon = match get("horizon") {
        Some(v) => parse_num("horizon", v)?,
        None => steps.max(1),
    };
    if steps > horizon {
        return Err(invalid("T", format!("{steps} exceeds horizon {horizon}")));
    }
    let pattern: SequencePattern = get("pattern")
        .filter(|v| !v.is_empty())
        .ok_or(ConfigError::Missing("pattern"))?
        .parse()
        .map_err(|e: hdwalk_core::WalkError| invalid("pattern", e.to_string()))?;
    let initial = match get("initial").unwrap_or("antisymmetric") {
        "antisymmetric" => InitialStateKind::Antisymmetric,
        "all_r" => InitialStateKind::AllR,
        other => {
            return Err(invalid(
                "initial",
                format!("expected antisymmetric or all_r, got {other:?}"),
            ))
        }
    };
    let snapshots = match get("snapshots") {
        Some(v) if !v.is_empty() => v
            .split(',')
            .map(|s| {
                let t: usize = parse_num("snapshots", s.trim())?;
                if t > steps {
                    return Err(invalid("snapshots", format!("step {t} beyond T = {steps}")));
                }
                Ok(t)
            })
            .collect::<Result<Vec<_>>>()?,
        _ => Vec::new(),
    };
    let window = match get("window") {
        Some(v) => {
            let w: usize = parse_num("window", v)?;
            if w.is_multiple_of(2) {
                return Err(invalid("window", format!("must be odd, got {w}")));
            }
            w
        }
        None => 5,
    };
    let prominence = match get("prominence") {
        Some(v) => {
            let p: f64 = parse_num("prominence", v)?;
            if !(p > 0.0 && p < 1.0) {
                return Err(invalid("prominence", format!("value {v} outside (0, 1)")));
            }
            p
        }
        None => 0.1,
    };
    let seed = get("seed").map(|v| parse_num("seed", v)).transpose()?.unwrap_or(0);
    let engine = match get("engine").unwrap_or("capital") {
        "capital" => Engine::Capital,
        "history_walk" => Engine::HistoryWalk,
        other => {
            return Err(invalid(
                "engine",
                format!("expected capital or history_walk, got {other:?}"),
            ))
        }
    };

    let mut raw: BTreeMap<char, RawGame> = BTreeMap::new();
    for (key, value) in entries {
        let Some((name, field)) = game_key(key) else { continue };
        let g = raw.entry(name).or_default();
        if let Some(h) = field.strip_prefix("rho.") {
            g.rho.push((h, value.as_str(), key.clone()));
        } else if field == "type" {
            g.kind = Some(value.as_str());
        } else {
            g.probs.insert(field, (value.as_str(), key.clone()));
        }
    }

    let mut quantum_games = GameSet::new();
    let mut capital_games = CapitalGames::new();
    for (name, g) in &raw {
        let prefix = format!("games.{name}");
        if g.rho.is_empty() {
            capital_games.insert(*name, build_capital(&prefix, g.kind, &g.probs)?);
            continue;
        }
        if g.kind.is_some() || !g.probs.is_empty() {
            return Err(invalid(&prefix, "mixes rho entries with classical game fields"));
        }
        let m = coins.ok_or(ConfigError::Missing("M"))?;
        quantum_games
            .insert(GameSpec::new(*name, build_table(m, &g.rho)?))
            .map_err(|e| invalid(&prefix, e.to_string()))?;
    }
    for &c in pattern.letters() {
        if quantum_games.get(c).is_none() && !capital_games.contains_key(&c) {
            return Err(invalid("pattern", format!("game {c:?} is not defined")));
        }
    }

    Ok(RunConfig {
        coins,
        steps,
        horizon,
        initial,
        pattern,
        snapshots,
        window,
        prominence,
        seed,
        engine,
        quantum_games,
        capital_games,
        out: get("out").map(PathBuf::from),
        plot: get("plot").map(PathBuf::from),
    })
}

fn build_table(coins: usize, rho: &[(&str, &str, String)]) -> Result<HistoryRhoTable> {
    let mut table = HistoryRhoTable::unbiased(coins).expect("coin count validated");
    if let Some((_, v, key)) = rho.iter().find(|(h, _, _)| *h == "default") {
        table = HistoryRhoTable::uniform(coins, parse_prob(key, v)?).expect("probability validated");
    }
    for (h, v, key) in rho.iter().filter(|(h, _, _)| *h != "default") {
        let p = parse_prob(key, v)?;
        table = table.with(h, p).map_err(|e| invalid(key, e.to_string()))?;
    }
    Ok(table)
}

fn build_capital(prefix: &str, kind: Option<&str>, probs: &BTreeMap<&str, (&str, String)>) -> Result<CapitalGameSpec> {
    let kind = kind.ok_or_else(|| invalid(prefix, "needs either rho entries or a type"))?;
    let allowed: &[&str] = match kind {
        "biased" => &["p"],
        "capital_mod3" => &["p1", "p2"],
        "history_coins" => &["p1", "p2", "p3", "p4"],
        other => {
            return Err(invalid(
                &format!("{prefix}.type"),
                format!("expected biased, capital_mod3 or history_coins, got {other:?}"),
            ))
        }
    };
    if let Some((_, (_, key))) = probs.iter().find(|(f, _)| !allowed.contains(f)) {
        return Err(invalid(key, format!("not a field of a {kind} game")));
    }
    let mut values = Vec::new();
    for field in allowed {
        let key = format!("{prefix}.{field}");
        let (v, _) = probs.get(field).ok_or_else(|| invalid(&key, "missing"))?;
        values.push(parse_prob(&key, v)?);
    }
    Ok(match kind {
        "biased" => CapitalGameSpec::BiasedCoin(values[0]),
        "capital_mod3" => CapitalGameSpec::CapitalMod3 {
            p1: values[0],
            p2: values[1],
        },
        _ => CapitalGameSpec::HistoryCoins([values[0], values[1], values[2], values[3]]),
    })
}
