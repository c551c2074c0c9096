//! The `qg` command line.

use std::ffi::OsString;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qg_core::accel::{solve_mcr_accelerated, solve_tp_accelerated, NoClamp, SimplePathOracle, DEFAULT_PATH_CAP};
use qg_core::corpus::{random_arena, RandomSpec};
use qg_core::families::{generate_with, FamilySpec};
use qg_core::mcr::{solve_mcr, McrOptions, SolveStats};
use qg_core::strategies::{
    extract_max_memoryless, extract_min_mcr, make_switching, tp_min_strategy, MemorylessStrategy, Strategy,
};
use qg_core::tp::{solve_tp, TpOptions};
use qg_core::{normalize_target, Arena, Limits, Objective, Player, ValueVector, VertexId};

use crate::check::{check_arena, minimize};
use crate::gamefile::{export_dot, owner_word, parse_with, serialize, ParseError};
use crate::report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qg", version, about = "Solve min-cost reachability and total-payoff games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Accel {
    None,
    Scc,
    #[value(name = "scc+paths")]
    SccPaths,
}

impl Accel {
    fn label(self) -> &'static str {
        match self {
            Accel::None => "none",
            Accel::Scc => "scc",
            Accel::SccPaths => "scc+paths",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Max,
    Min,
}

impl From<Side> for Player {
    fn from(s: Side) -> Player {
        match s {
            Side::Max => Player::Max,
            Side::Min => Player::Min,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Fig1a,
    Fig2a,
    Fig2b,
    #[value(name = "lsp_fig5")]
    LspFig5,
    Layered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Mcr,
    Tp,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Objective {
        match o {
            ObjectiveArg::Mcr => Objective::Mcr,
            ObjectiveArg::Tp => Objective::Tp,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a game and print its values.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "none")]
        accel: Accel,
        #[arg(long, default_value_t = DEFAULT_PATH_CAP)]
        path_cap: usize,
        /// Report iteration counts and wall time.
        #[arg(long)]
        stats: bool,
        /// Write the iterates as TSV (plain solver only).
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Solve a game and print optimal strategies.
    Strategy {
        file: PathBuf,
        #[arg(long, value_enum)]
        player: Option<Side>,
        /// Budget of the switching strategy at vertices of value -inf.
        #[arg(long, allow_hyphen_values = true)]
        threshold: Option<i64>,
        #[arg(long)]
        json: bool,
    },
    /// Cross-check the solvers against brute-force oracles.
    Check {
        /// A game file, or `key=value` parameters with --random.
        #[arg(num_args = 0..)]
        args: Vec<String>,
        /// Check seeded random arenas: seed=N count=K vmax=V wmax=W.
        #[arg(long)]
        random: bool,
        /// Objective of random arenas; both when omitted.
        #[arg(long, value_enum)]
        objective: Option<ObjectiveArg>,
    },
    /// Print a generated example arena.
    Gen {
        #[arg(value_enum)]
        family: Family,
        #[arg(long = "W", default_value_t = 1)]
        w: i64,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, value_enum)]
        objective: Option<ObjectiveArg>,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Iteration counts over a grid of family parameters, as CSV.
    Bench {
        #[arg(long, value_enum, default_value = "layered")]
        family: Family,
        #[arg(long = "W-list", value_delimiter = ',', default_value = "50")]
        w_list: Vec<i64>,
        #[arg(long = "n-list", value_delimiter = ',', default_value = "100")]
        n_list: Vec<usize>,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "none")]
        accel: Vec<Accel>,
        #[arg(long, default_value_t = DEFAULT_PATH_CAP)]
        path_cap: usize,
        /// Fill the wall_ms column.
        #[arg(long)]
        stats: bool,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Play against the optimal strategy, one move per input line.
    Play {
        file: PathBuf,
        #[arg(long = "as", value_enum, default_value = "max")]
        side: Side,
        #[arg(long)]
        start: Option<String>,
        #[arg(long, default_value_t = 1000)]
        max_moves: usize,
    },
    /// Re-emit a game as canonical text or DOT.
    Convert {
        file: PathBuf,
        #[arg(long)]
        dot: bool,
        /// Annotate DOT vertices with their values.
        #[arg(long)]
        values: bool,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
}

/// A failure together with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { code: EXIT_BAD_INPUT, error: e.into() }
    }
}

fn core(e: qg_core::Error) -> anyhow::Error {
    anyhow!("{e}")
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_BAD_INPUT } else { EXIT_OK };
        }
    };
    match execute(cli.command, stdin, stdout, stderr) {
        Ok(code) => code,
        Err(f)
            if f.error.downcast_ref::<std::io::Error>().is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe) =>
        {
            EXIT_OK
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {:#}", f.error);
            f.code
        }
    }
}

fn limits() -> Result<Limits, Failure> {
    let mut limits = Limits::default();
    if let Ok(raw) = std::env::var("QG_MAX_VERTICES") {
        limits.max_vertices = raw.trim().parse().with_context(|| format!("QG_MAX_VERTICES={raw:?} is not a count"))?;
    }
    Ok(limits)
}

/// The parsed arena, normalized when it is an MCR game, and the number of
/// vertices that come from the file.
struct Loaded {
    arena: Arena,
    original: usize,
}

fn load(path: &Path, stderr: &mut dyn Write) -> Result<Loaded, Failure> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let doc = parse_with(&bytes, limits()?).map_err(|e: ParseError| anyhow!("{}: {e}", path.display()))?;
    for w in &doc.warnings {
        writeln!(stderr, "warning: {}: {w}", path.display())?;
    }
    let original = doc.arena.len();
    let arena = match doc.arena.objective() {
        Objective::Mcr => normalize_target(&doc.arena).map_err(|e| anyhow!("{e}"))?,
        Objective::Tp => doc.arena,
    };
    Ok(Loaded { arena, original })
}

struct Solved {
    values: ValueVector,
    stats: SolveStats,
    trace: Option<Vec<ValueVector>>,
    wall_ms: u64,
}

fn solve(arena: &Arena, accel: Accel, path_cap: usize, trace: bool) -> Result<Solved, qg_core::Error> {
    let paths = SimplePathOracle { cap: path_cap };
    let start = Instant::now();
    let (values, stats, trace) = match (arena.objective(), accel) {
        (Objective::Mcr, Accel::None) => {
            let s = solve_mcr(arena, McrOptions { record_trace: trace })?;
            (s.values, s.stats, s.trace)
        }
        (Objective::Tp, Accel::None) => {
            let s = solve_tp(arena, TpOptions { record_outer: trace })?;
            (s.values, s.stats, s.outer_trace)
        }
        (Objective::Mcr, Accel::Scc) => solve_mcr_accelerated(arena, &NoClamp).map(|s| (s.values, s.stats, None))?,
        (Objective::Mcr, Accel::SccPaths) => solve_mcr_accelerated(arena, &paths).map(|s| (s.values, s.stats, None))?,
        (Objective::Tp, Accel::Scc) => solve_tp_accelerated(arena, &NoClamp).map(|s| (s.values, s.stats, None))?,
        (Objective::Tp, Accel::SccPaths) => solve_tp_accelerated(arena, &paths).map(|s| (s.values, s.stats, None))?,
    };
    let wall_ms = start.elapsed().as_millis() as u64;
    Ok(Solved { values, stats, trace, wall_ms })
}

fn emit(output: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display()))?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn execute(
    command: Command,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Failure> {
    match command {
        Command::Solve { file, accel, path_cap, stats, trace, json } => {
            if trace.is_some() && accel != Accel::None {
                return Err(anyhow!("--trace is only available with --accel none").into());
            }
            let Loaded { arena, original } = load(&file, stderr)?;
            let solved = solve(&arena, accel, path_cap, trace.is_some()).map_err(core)?;
            if let (Some(path), Some(iterates)) = (&trace, &solved.trace) {
                emit(Some(path), &report::trace_tsv(&arena, iterates, original), stdout)?;
            }
            let wall = stats.then_some(solved.wall_ms);
            if json {
                let text = report::write_results_json(&arena, &solved.values, original, &solved.stats, wall, None);
                stdout.write_all(text.as_bytes())?;
            } else {
                stdout.write_all(report::values_table(&arena, &solved.values, original).as_bytes())?;
                if let Some(ms) = wall {
                    let s = solved.stats;
                    writeln!(stdout, "\nouter_iterations (k_e)  {}", s.outer_iterations)?;
                    writeln!(stdout, "inner_iterations (k_i)  {}", s.inner_iterations)?;
                    writeln!(stdout, "sweeps                  {}", s.sweeps)?;
                    writeln!(stdout, "wall_ms                 {ms}")?;
                    writeln!(stdout, "counting                {}", report::COUNTING)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Strategy { file, player, threshold, json } => {
            let Loaded { arena, original } = load(&file, stderr)?;
            let doc = strategies(&arena, original, player.map(Player::from), threshold).map_err(core)?;
            if json {
                writeln!(stdout, "{}", serde_json::to_string_pretty(&doc)?)?;
            } else {
                stdout.write_all(strategies_text(&doc).as_bytes())?;
            }
            Ok(EXIT_OK)
        }
        Command::Check { args, random, objective } => {
            if random {
                check_random(&args, objective.map(Objective::from), stdout)
            } else {
                let [file] = args.as_slice() else {
                    return Err(anyhow!("check needs a game file, or --random with key=value parameters").into());
                };
                let Loaded { arena, .. } = load(Path::new(file), stderr)?;
                check_one(&arena, file, stdout)
            }
        }
        Command::Gen { family, w, n, objective, output } => {
            let spec = family_spec(family, w, n);
            let objective = objective.map_or(spec.default_objective(), Objective::from);
            let arena = generate_with(&spec, objective, limits()?).map_err(core)?;
            emit(output.as_deref(), &serialize(&arena), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Bench { family, w_list, n_list, accel, path_cap, stats, csv } => {
            let text = bench(family, &w_list, &n_list, &accel, path_cap, stats)?;
            emit(csv.as_deref(), &text, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Play { file, side, start, max_moves } => {
            let Loaded { arena, .. } = load(&file, stderr)?;
            play(&arena, side.into(), start.as_deref(), max_moves, stdin, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Convert { file, dot, values, output } => {
            let bytes = fs::read(&file).with_context(|| format!("cannot read {}", file.display()))?;
            let doc = parse_with(&bytes, limits()?).map_err(|e| anyhow!("{}: {e}", file.display()))?;
            for w in &doc.warnings {
                writeln!(stderr, "warning: {}: {w}", file.display())?;
            }
            let text = if dot {
                let solved = if values {
                    let arena = match doc.arena.objective() {
                        Objective::Mcr => normalize_target(&doc.arena).map_err(|e| anyhow!("{e}"))?,
                        Objective::Tp => doc.arena.clone(),
                    };
                    let s = solve(&arena, Accel::None, DEFAULT_PATH_CAP, false).map_err(core)?;
                    Some(ValueVector::from_vec(s.values.as_slice()[..doc.arena.len()].to_vec()))
                } else {
                    None
                };
                export_dot(&doc.arena, solved.as_ref())
            } else {
                serialize(&doc.arena)
            };
            emit(output.as_deref(), &text, stdout)?;
            Ok(EXIT_OK)
        }
    }
}

fn family_spec(family: Family, w: i64, n: usize) -> FamilySpec {
    match family {
        Family::Fig1a => FamilySpec::Fig1a,
        Family::Fig2a => FamilySpec::Fig2a { w },
        Family::Fig2b => FamilySpec::Fig2b { w },
        Family::LspFig5 => FamilySpec::LspFig5,
        Family::Layered => FamilySpec::Layered { n, w },
    }
}

fn strategies(
    arena: &Arena,
    shown: usize,
    player: Option<Player>,
    threshold: Option<i64>,
) -> Result<Value, qg_core::Error> {
    let wants = |p: Player| player.map_or(true, |q| q == p);
    let mut out = serde_json::Map::new();
    match arena.objective() {
        Objective::Mcr => {
            let sol = solve_mcr(arena, McrOptions { record_trace: true })?;
            out.insert("values".into(), report::values_json(arena, &sol.values, shown));
            if wants(Player::Max) {
                let max = extract_max_memoryless(arena, &sol.values)?;
                out.insert("max".into(), report::memoryless_json(arena, &max, shown));
            }
            if wants(Player::Min) {
                let mins = extract_min_mcr(arena, &sol)?;
                let sw = make_switching(arena, mins.sigma1, mins.sigma2, sol.values.clone(), threshold)?;
                out.insert("min".into(), report::switching_json(arena, &sw, shown));
                out.insert("min_counter".into(), report::counter_json(arena, &mins.sigma_star, shown));
            }
        }
        Objective::Tp => {
            let values = solve_tp(arena, TpOptions::default())?.values;
            out.insert("values".into(), report::values_json(arena, &values, shown));
            if wants(Player::Max) {
                let max = extract_max_memoryless(arena, &values)?;
                out.insert("max".into(), report::memoryless_json(arena, &max, shown));
            }
            if wants(Player::Min) {
                let min = tp_min_strategy(arena, &values)?;
                out.insert("min".into(), report::memoryless_json(arena, &min, shown));
            }
        }
    }
    Ok(Value::Object(out))
}

fn strategies_text(doc: &Value) -> String {
    let mut out = String::new();
    let moves = |out: &mut String, label: &str, choice: &Value| {
        for (v, u) in choice.as_object().into_iter().flatten() {
            out.push_str(&format!("{label} {v} -> {}\n", u.as_str().unwrap_or("?")));
        }
    };
    if let Some(max) = doc.get("max") {
        moves(&mut out, "max", &max["choice"]);
    }
    if let Some(min) = doc.get("min") {
        if min["kind"] == json!("switching") {
            moves(&mut out, "min sigma1", &min["sigma1"]);
            moves(&mut out, "min sigma2", &min["sigma2"]);
        } else {
            moves(&mut out, "min", &min["choice"]);
        }
    }
    if let Some(counter) = doc.get("min_counter") {
        out.push_str(&format!("min counter memory {}\n", counter["memory_size"]));
    }
    out
}

fn check_one(arena: &Arena, label: &str, stdout: &mut dyn Write) -> Result<i32, Failure> {
    match check_arena(arena).map_err(core)? {
        None => {
            writeln!(stdout, "{label}: ok")?;
            Ok(EXIT_OK)
        }
        Some(report) => {
            writeln!(stdout, "{label}: MISMATCH {report}")?;
            let small = minimize(arena, |a| matches!(check_arena(a), Ok(Some(_))));
            writeln!(stdout, "minimized counterexample ({} vertices):", small.len())?;
            stdout.write_all(serialize(&small).as_bytes())?;
            Ok(EXIT_CHECK_FAILED)
        }
    }
}

fn check_random(params: &[String], objective: Option<Objective>, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let (mut seed, mut count, mut vmax, mut wmax) = (0u64, 100u64, 5usize, 3i64);
    for p in params {
        let (k, v) = p.split_once('=').ok_or_else(|| anyhow!("expected key=value, got {p:?}"))?;
        let bad = || anyhow!("bad value for {k}: {v:?}");
        match k {
            "seed" => seed = v.parse().map_err(|_| bad())?,
            "count" => count = v.parse().map_err(|_| bad())?,
            "vmax" => vmax = v.parse().map_err(|_| bad())?,
            "wmax" => wmax = v.parse().map_err(|_| bad())?,
            _ => return Err(anyhow!("unknown parameter {k}").into()),
        }
    }
    let objectives = match objective {
        Some(o) => vec![o],
        None => vec![Objective::Mcr, Objective::Tp],
    };
    let mut failed = false;
    for objective in objectives {
        let spec = RandomSpec { objective, max_vertices: vmax, max_weight: wmax, max_out_degree: 3 };
        for i in 0..count {
            let arena = random_arena(seed, i, spec).map_err(core)?;
            let label = format!("{objective} #{i}");
            let mut sink = Vec::new();
            if check_one(&arena, &label, &mut sink)? != EXIT_OK {
                stdout.write_all(&sink)?;
                failed = true;
            }
        }
        writeln!(stdout, "{objective}: {count} random arenas checked (seed {seed}, vmax {vmax}, wmax {wmax})")?;
    }
    Ok(if failed { EXIT_CHECK_FAILED } else { EXIT_OK })
}

fn bench(
    family: Family,
    ws: &[i64],
    ns: &[usize],
    accels: &[Accel],
    path_cap: usize,
    timed: bool,
) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["family", "W", "n", "accel", "k_e", "k_i", "wall_ms", "values_hash"])?;
    let family_name = family.to_possible_value().expect("named").get_name().to_string();
    let ns: Vec<usize> = if family == Family::Layered { ns.to_vec() } else { vec![0] };
    for &wv in ws {
        for &n in &ns {
            let spec = family_spec(family, wv, n);
            let arena = generate_with(&spec, spec.default_objective(), limits()?).map_err(core)?;
            let arena = match arena.objective() {
                Objective::Mcr => normalize_target(&arena).map_err(|e| anyhow!("{e}"))?,
                Objective::Tp => arena,
            };
            for &accel in accels {
                let s = solve(&arena, accel, path_cap, false).map_err(core)?;
                let wall = if timed { s.wall_ms.to_string() } else { String::new() };
                w.write_record([
                    family_name.clone(),
                    wv.to_string(),
                    n.to_string(),
                    accel.label().to_string(),
                    s.stats.outer_iterations.to_string(),
                    s.stats.inner_iterations.to_string(),
                    wall,
                    report::values_hash(&arena, &s.values),
                ])?;
            }
        }
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?)
}

/// Optimal memoryless choices for the machine's side. MCR Min plays the
/// switching strategy, which needs memory; it is handled in [`play`].
fn machine_choices(arena: &Arena, values: &ValueVector, side: Player) -> Result<MemorylessStrategy, qg_core::Error> {
    match side {
        Player::Max => extract_max_memoryless(arena, values),
        Player::Min => tp_min_strategy(arena, values),
    }
}

fn play(
    arena: &Arena,
    human: Player,
    start: Option<&str>,
    max_moves: usize,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
) -> Result<(), Failure> {
    let solved = solve(arena, Accel::None, DEFAULT_PATH_CAP, arena.objective() == Objective::Mcr).map_err(core)?;
    let values = solved.values;
    let machine = human.opponent();
    let mut at = match start {
        Some(name) => arena.find(name).ok_or_else(|| anyhow!("no vertex named {name}"))?,
        None => VertexId::new(0),
    };
    // Machine strategies: MCR Min uses the switching strategy, everything
    // else a memoryless one.
    let switching = match (arena.objective(), machine) {
        (Objective::Mcr, Player::Min) => {
            let sol = qg_core::mcr::McrSolution { values: values.clone(), stats: solved.stats, trace: solved.trace };
            let mins = extract_min_mcr(arena, &sol).map_err(core)?;
            Some(make_switching(arena, mins.sigma1, mins.sigma2, values.clone(), None).map_err(core)?)
        }
        _ => None,
    };
    let memoryless = match switching {
        Some(_) => None,
        None => Some(machine_choices(arena, &values, machine).map_err(core)?),
    };
    let mut memory = switching.as_ref().map(|s| s.initial(at));
    let mut sum: i64 = 0;
    writeln!(
        stdout,
        "you play {}; the machine plays optimally. Enter a successor name or number, q to quit.",
        owner_word(human)
    )?;
    for _ in 0..max_moves {
        writeln!(stdout, "at {} (value {}), running sum {sum}", arena.name(at), values[at])?;
        if arena.objective() == Objective::Mcr && arena.is_target(at) {
            writeln!(stdout, "target reached, payoff {sum}")?;
            return Ok(());
        }
        let succ = arena.successors(at);
        let to = if arena.owner(at) == human {
            for (i, e) in succ.iter().enumerate() {
                writeln!(stdout, "  [{i}] {} (weight {}, value {})", arena.name(e.dst), e.weight, values[e.dst])?;
            }
            write!(stdout, "> ")?;
            stdout.flush()?;
            let mut line = String::new();
            if stdin.read_line(&mut line)? == 0 {
                return Ok(());
            }
            let pick = line.trim();
            if pick == "q" {
                return Ok(());
            }
            let chosen = pick
                .parse::<usize>()
                .ok()
                .and_then(|i| succ.get(i))
                .or_else(|| succ.iter().find(|e| arena.name(e.dst) == pick));
            match chosen {
                Some(e) => e.dst,
                None => {
                    writeln!(stdout, "not a successor of {}: {pick:?}", arena.name(at))?;
                    continue;
                }
            }
        } else {
            let to = match (&switching, &memory, &memoryless) {
                (Some(s), Some(m), _) => s.decide(arena, m, at),
                (_, _, Some(s)) => s.decide(arena, &(), at),
                _ => unreachable!("one machine strategy is always present"),
            };
            writeln!(stdout, "machine moves to {}", arena.name(to))?;
            to
        };
        let w = arena.weight(at, to).expect("moves follow edges");
        if let (Some(s), Some(m)) = (&switching, &memory) {
            memory = Some(s.update(m, at, to, w));
        }
        sum += w;
        at = to;
    }
    writeln!(stdout, "move limit reached, running sum {sum}")?;
    Ok(())
}
