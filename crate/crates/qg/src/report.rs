//! JSON and text renderings of solver results and strategies.

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use qg_core::mcr::SolveStats;
use qg_core::strategies::{CounterStrategy, MemorylessStrategy, Strategy, SwitchingStrategy};
use qg_core::{Arena, ExtValue, Player, ValueVector};

/// Name of the iteration counting convention, printed next to counts.
pub const COUNTING: &str = "every loop-body execution, including the final unchanged pass";

pub fn ext_json(x: ExtValue) -> Value {
    match x {
        ExtValue::Finite(c) => json!(c),
        other => json!(other.to_string()),
    }
}

/// `{name: value}` over the first `shown` vertices, in index order.
pub fn values_json(arena: &Arena, values: &ValueVector, shown: usize) -> Value {
    let map: Map<String, Value> =
        arena.vertices().take(shown).map(|v| (arena.name(v).to_string(), ext_json(values[v]))).collect();
    Value::Object(map)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct StatsJson {
    pub outer_iterations: u64,
    pub inner_iterations: u64,
    pub sweeps: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

impl StatsJson {
    pub fn new(stats: &SolveStats, wall_ms: Option<u64>) -> Self {
        StatsJson {
            outer_iterations: stats.outer_iterations,
            inner_iterations: stats.inner_iterations,
            sweeps: stats.sweeps,
            wall_ms,
        }
    }
}

/// The results document. `wall_ms` is only present when timing was asked
/// for, so repeated runs produce identical bytes otherwise.
pub fn write_results_json(
    arena: &Arena,
    values: &ValueVector,
    shown: usize,
    stats: &SolveStats,
    wall_ms: Option<u64>,
    strategies: Option<Value>,
) -> String {
    let mut doc = Map::new();
    doc.insert("values".into(), values_json(arena, values, shown));
    doc.insert("stats".into(), serde_json::to_value(StatsJson::new(stats, wall_ms)).expect("plain struct"));
    if let Some(s) = strategies {
        doc.insert("strategies".into(), s);
    }
    let mut out = serde_json::to_string_pretty(&Value::Object(doc)).expect("values serialize");
    out.push('\n');
    out
}

fn player_word(p: Player) -> &'static str {
    match p {
        Player::Max => "max",
        Player::Min => "min",
    }
}

fn choice_map(arena: &Arena, s: &MemorylessStrategy, shown: usize) -> Value {
    let map: Map<String, Value> = arena
        .vertices()
        .take(shown)
        .filter(|&v| arena.owner(v) == s.player && !arena.is_target(v))
        .map(|v| (arena.name(v).to_string(), json!(arena.name(s.decide(arena, &(), v)))))
        .collect();
    Value::Object(map)
}

pub fn memoryless_json(arena: &Arena, s: &MemorylessStrategy, shown: usize) -> Value {
    json!({ "player": player_word(s.player), "kind": "memoryless", "choice": choice_map(arena, s, shown) })
}

pub fn switching_json(arena: &Arena, s: &SwitchingStrategy, shown: usize) -> Value {
    json!({
        "player": "min",
        "kind": "switching",
        "sigma1": choice_map(arena, &s.sigma1, shown),
        "sigma2": choice_map(arena, &s.sigma2, shown),
        "sigma2_values": values_json(arena, &s.sigma2_values, shown),
        "threshold": s.threshold,
    })
}

/// The counter strategy as an explicit Moore machine: memory `m` counts
/// moves, saturating at the horizon.
pub fn counter_json(arena: &Arena, s: &CounterStrategy, shown: usize) -> Value {
    let moore = s.to_moore(arena);
    let decision: Vec<Value> = (0..moore.memory_size)
        .map(|m| {
            let map: Map<String, Value> = arena
                .vertices()
                .take(shown)
                .filter(|&v| arena.owner(v) == Player::Min && !arena.is_target(v))
                .map(|v| (arena.name(v).to_string(), json!(arena.name(moore.decide(arena, &m, v)))))
                .collect();
            Value::Object(map)
        })
        .collect();
    let update: Vec<u32> = (0..moore.memory_size).map(|m| (m + 1).min(s.horizon())).collect();
    json!({
        "player": "min",
        "kind": "moore",
        "memory_size": moore.memory_size,
        "initial": moore.initial,
        "update": update,
        "decision": decision,
    })
}

/// Plain-text table: one `name value` line per shown vertex.
pub fn values_table(arena: &Arena, values: &ValueVector, shown: usize) -> String {
    let width = arena.vertices().take(shown).map(|v| arena.name(v).len()).max().unwrap_or(0).max(6);
    let mut out = format!("{:<width$}  value\n", "vertex");
    for v in arena.vertices().take(shown) {
        out.push_str(&format!("{:<width$}  {}\n", arena.name(v), values[v]));
    }
    out
}

/// SHA-256 over `name=value` lines, hex encoded.
pub fn values_hash(arena: &Arena, values: &ValueVector) -> String {
    let mut h = Sha256::new();
    for v in arena.vertices() {
        h.update(format!("{}={}\n", arena.name(v), values[v]).as_bytes());
    }
    hex::encode(h.finalize())
}

/// Tab-separated iterates, one per line, with a header of vertex names.
pub fn trace_tsv(arena: &Arena, trace: &[ValueVector], shown: usize) -> String {
    let names: Vec<&str> = arena.vertices().take(shown).map(|v| arena.name(v)).collect();
    let mut out = format!("step\t{}\n", names.join("\t"));
    for (i, x) in trace.iter().enumerate() {
        let row: Vec<String> = arena.vertices().take(shown).map(|v| x[v].to_string()).collect();
        out.push_str(&format!("{i}\t{}\n", row.join("\t")));
    }
    out
}
