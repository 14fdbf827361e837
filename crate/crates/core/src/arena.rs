//! Open-source competitions between learners.
//!
//! Both learners see the game and each other's source, are evaluated under
//! the same fuel, and the pair of evaluations is adjudicated into a single
//! result. Tournaments run every pairing and look for a universal winner.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::dsl::{EvalEnv, EvalResult, Learner, RuntimeFault, Witness, DEFAULT_MEMORY_CAP};
use crate::game::{GameTable, Side};

/// How an evaluation that ran out of fuel is judged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    /// Running out of fuel proves nothing: the match is undecided.
    #[default]
    Strict,
    /// Running out of fuel loses against an opponent that moved.
    Deadline,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Strict => "strict",
            Mode::Deadline => "deadline",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown mode {0:?}; expected strict or deadline")]
pub struct ModeError(String);

impl FromStr for Mode {
    type Err = ModeError;

    fn from_str(s: &str) -> Result<Mode, ModeError> {
        match s {
            "strict" => Ok(Mode::Strict),
            "deadline" => Ok(Mode::Deadline),
            _ => Err(ModeError(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatchResult {
    Win1,
    Win2,
    Draw,
    Undecided,
}

impl MatchResult {
    pub fn as_str(self) -> &'static str {
        match self {
            MatchResult::Win1 => "Win1",
            MatchResult::Win2 => "Win2",
            MatchResult::Draw => "Draw",
            MatchResult::Undecided => "Undecided",
        }
    }

    /// The same result with the learners' roles exchanged.
    pub fn mirrored(self) -> MatchResult {
        match self {
            MatchResult::Win1 => MatchResult::Win2,
            MatchResult::Win2 => MatchResult::Win1,
            other => other,
        }
    }
}

impl fmt::Display for MatchResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One side's evaluation, reduced to what adjudication needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Play {
    /// Halted with this in-range (1-based) strategy.
    Valid(usize),
    FuelExhausted,
    ProvenNonHalting,
    /// A runtime fault or an out-of-range strategy.
    Faulty,
}

impl Play {
    pub fn of(result: &Result<EvalResult, RuntimeFault>, game: &GameTable, side: Side) -> Play {
        match result {
            Ok(EvalResult::Halted(k)) => match usize::try_from(*k) {
                Ok(k) if game.check_index(side, k).is_ok() => Play::Valid(k),
                _ => Play::Faulty,
            },
            Ok(EvalResult::FuelExhausted) => Play::FuelExhausted,
            Ok(EvalResult::ProvenNonHalting(_)) => Play::ProvenNonHalting,
            Err(_) => Play::Faulty,
        }
    }

    /// Tag used in trace lines.
    pub fn tag(self) -> &'static str {
        match self {
            Play::Valid(_) => "halted",
            Play::FuelExhausted => "exhausted",
            Play::ProvenNonHalting => "proven",
            Play::Faulty => "fault",
        }
    }
}

/// Judges a match from both sides' plays. Total: every combination maps to
/// exactly one result.
///
/// A faulty side loses (both faulty: undecided). Two valid strategies are
/// scored by the game. A valid strategy beats a proven non-halter, and beats
/// an exhausted opponent only under [`Mode::Deadline`]. Anything else is
/// undecided.
pub fn adjudicate(game: &GameTable, p1: Play, p2: Play, mode: Mode) -> MatchResult {
    use MatchResult::*;
    match (p1, p2) {
        (Play::Faulty, Play::Faulty) => Undecided,
        (Play::Faulty, _) => Win2,
        (_, Play::Faulty) => Win1,
        (Play::Valid(i), Play::Valid(j)) => match game.outcome(i, j).map(|o| o.value()) {
            Ok(1) => Win1,
            Ok(-1) => Win2,
            Ok(_) => Draw,
            Err(_) => unreachable!("valid plays are in range"),
        },
        (Play::Valid(_), Play::ProvenNonHalting) => Win1,
        (Play::ProvenNonHalting, Play::Valid(_)) => Win2,
        (Play::Valid(_), Play::FuelExhausted) if mode == Mode::Deadline => Win1,
        (Play::FuelExhausted, Play::Valid(_)) if mode == Mode::Deadline => Win2,
        _ => Undecided,
    }
}

/// Resources for one match.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchConfig {
    /// Fuel of the row learner and the column learner.
    pub fuel: (u64, u64),
    pub mode: Mode,
    pub memory_cap: usize,
}

impl MatchConfig {
    /// Equal fuel for both sides, default prover memory.
    pub fn new(fuel: u64, mode: Mode) -> MatchConfig {
        MatchConfig {
            fuel: (fuel, fuel),
            mode,
            memory_cap: DEFAULT_MEMORY_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchRecord {
    pub game: String,
    pub learner1: String,
    pub learner2: String,
    pub result: MatchResult,
    pub detail: (Result<EvalResult, RuntimeFault>, Result<EvalResult, RuntimeFault>),
    pub plays: (Play, Play),
    /// Both strategies, when both sides halted validly.
    pub strategies: Option<(usize, usize)>,
    pub fuel_used: (u64, u64),
    pub mode: Mode,
    /// Non-halting proofs an oracle winner attached to its move.
    pub oracle_witness: (Option<Witness>, Option<Witness>),
}

impl MatchRecord {
    /// `eval1=<tag> eval2=<tag> result=<tag>`.
    pub fn trace_line(&self) -> String {
        format!(
            "eval1={} eval2={} result={}",
            self.plays.0.tag(),
            self.plays.1.tag(),
            self.result
        )
    }

    /// The record as seen with the learners exchanged. Only meaningful for
    /// symmetric games.
    pub fn mirrored(&self) -> MatchRecord {
        MatchRecord {
            game: self.game.clone(),
            learner1: self.learner2.clone(),
            learner2: self.learner1.clone(),
            result: self.result.mirrored(),
            detail: (self.detail.1.clone(), self.detail.0.clone()),
            plays: (self.plays.1, self.plays.0),
            strategies: self.strategies.map(|(i, j)| (j, i)),
            fuel_used: (self.fuel_used.1, self.fuel_used.0),
            mode: self.mode,
            oracle_witness: (self.oracle_witness.1, self.oracle_witness.0),
        }
    }

    /// Multi-line stable report.
    pub fn report(&self) -> String {
        let mut out = format!(
            "match game={} p1={} p2={} mode={}\n",
            self.game, self.learner1, self.learner2, self.mode
        );
        for (n, (detail, plays)) in [(&self.detail.0, self.plays.0), (&self.detail.1, self.plays.1)]
            .into_iter()
            .enumerate()
        {
            let used = if n == 0 { self.fuel_used.0 } else { self.fuel_used.1 };
            out.push_str(&format!("p{} {} fuel_used={used}", n + 1, describe(detail, plays)));
            let witness = if n == 0 { self.oracle_witness.0 } else { self.oracle_witness.1 };
            if let Some(w) = witness {
                out.push_str(&format!(" opponent_witness={}..{}", w.first, w.second));
            }
            out.push('\n');
        }
        out.push_str(&self.trace_line());
        out.push('\n');
        out
    }
}

fn describe(detail: &Result<EvalResult, RuntimeFault>, play: Play) -> String {
    match detail {
        Ok(EvalResult::Halted(k)) if play == Play::Faulty => format!("halted strategy={k} (out of range)"),
        Ok(EvalResult::Halted(k)) => format!("halted strategy={k}"),
        Ok(EvalResult::FuelExhausted) => "exhausted".to_string(),
        Ok(EvalResult::ProvenNonHalting(w)) => format!("proven witness={}..{}", w.first, w.second),
        Err(fault) => format!("fault ({})", fault.0),
    }
}

/// Plays `l1` (rows) against `l2` (columns) under equal fuel.
pub fn run_match(game: &GameTable, l1: &Learner, l2: &Learner, fuel: u64, mode: Mode) -> MatchRecord {
    run_match_with(game, l1, l2, &MatchConfig::new(fuel, mode))
}

pub fn run_match_with(game: &GameTable, l1: &Learner, l2: &Learner, config: &MatchConfig) -> MatchRecord {
    let env = EvalEnv {
        game,
        side: Side::Row,
        opponent_source: l2.source(),
        self_source: "",
        fuel: config.fuel.0,
        memory_cap: config.memory_cap,
    };
    let e1 = l1.evaluate(&env);
    let e2 = l2.evaluate(&EvalEnv {
        side: Side::Col,
        opponent_source: l1.source(),
        fuel: config.fuel.1,
        ..env
    });
    let plays = (
        Play::of(&e1.result, game, Side::Row),
        Play::of(&e2.result, game, Side::Col),
    );
    let strategies = match plays {
        (Play::Valid(i), Play::Valid(j)) => Some((i, j)),
        _ => None,
    };
    MatchRecord {
        game: game.name().to_string(),
        learner1: l1.name().to_string(),
        learner2: l2.name().to_string(),
        result: adjudicate(game, plays.0, plays.1, config.mode),
        detail: (e1.result, e2.result),
        plays,
        strategies,
        fuel_used: (e1.fuel_used, e2.fuel_used),
        mode: config.mode,
        oracle_witness: (e1.oracle_witness, e2.oracle_witness),
    }
}

/// Results of one learner over the matches it played.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub wins: u32,
    pub draws: u32,
    pub losses: u32,
    pub undecided: u32,
}

impl Tally {
    pub fn played(&self) -> u32 {
        self.wins + self.draws + self.losses + self.undecided
    }

    fn add(&mut self, result: MatchResult, first: bool) {
        match (result, first) {
            (MatchResult::Win1, true) | (MatchResult::Win2, false) => self.wins += 1,
            (MatchResult::Win1, false) | (MatchResult::Win2, true) => self.losses += 1,
            (MatchResult::Draw, _) => self.draws += 1,
            (MatchResult::Undecided, _) => self.undecided += 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TournamentConfig {
    pub fuel: u64,
    pub mode: Mode,
    pub memory_cap: usize,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl TournamentConfig {
    pub fn new(fuel: u64, mode: Mode) -> TournamentConfig {
        TournamentConfig {
            fuel,
            mode,
            memory_cap: DEFAULT_MEMORY_CAP,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TournamentReport {
    pub game: String,
    pub symmetric: bool,
    pub learners: Vec<String>,
    pub fuel: u64,
    pub mode: Mode,
    /// `matrix[a][b]`: learner `a` on rows against learner `b` on columns.
    /// The diagonal is empty; for symmetric games `matrix[b][a]` mirrors
    /// `matrix[a][b]`.
    pub matrix: Vec<Vec<Option<MatchRecord>>>,
    pub tallies: Vec<Tally>,
    pub universal_winner: Option<String>,
}

impl TournamentReport {
    pub fn record(&self, a: usize, b: usize) -> Option<&MatchRecord> {
        self.matrix.get(a)?.get(b)?.as_ref()
    }

    /// Stable text report.
    pub fn report(&self) -> String {
        let mut out = format!(
            "tournament game={} learners={} fuel={} mode={}\n",
            self.game,
            self.learners.len(),
            self.fuel,
            self.mode
        );
        for (a, row) in self.matrix.iter().enumerate() {
            for (b, record) in row.iter().enumerate() {
                if let Some(r) = record {
                    let moves = match r.strategies {
                        Some((i, j)) => format!(" strategies={i},{j}"),
                        None => String::new(),
                    };
                    out.push_str(&format!(
                        "pair {} {} {} vs {}: {}{moves}\n",
                        a + 1,
                        b + 1,
                        r.learner1,
                        r.learner2,
                        r.trace_line()
                    ));
                }
            }
        }
        for (name, t) in self.learners.iter().zip(&self.tallies) {
            out.push_str(&format!(
                "tally {name} wins={} draws={} losses={} undecided={}\n",
                t.wins, t.draws, t.losses, t.undecided
            ));
        }
        out.push_str(&format!(
            "universal_winner={}\n",
            self.universal_winner.as_deref().unwrap_or("none")
        ));
        out
    }
}

/// Pairings a tournament actually plays, in report order.
fn schedule(n: usize, symmetric: bool) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && (!symmetric || a < b) {
                pairs.push((a, b));
            }
        }
    }
    pairs
}

/// Round robin over `learners`. Symmetric games play each unordered pair
/// once and record the mirror; other games play every ordered pair. The
/// report does not depend on scheduling or thread count.
pub fn run_tournament(game: &GameTable, learners: &[Learner], config: &TournamentConfig) -> TournamentReport {
    let n = learners.len();
    let symmetric = game.is_symmetric();
    let pairs = schedule(n, symmetric);
    let match_config = MatchConfig {
        fuel: (config.fuel, config.fuel),
        mode: config.mode,
        memory_cap: config.memory_cap,
    };
    let play = |&(a, b): &(usize, usize)| run_match_with(game, &learners[a], &learners[b], &match_config);
    let played: Vec<MatchRecord> = match config.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .expect("thread pool")
            .install(|| pairs.par_iter().map(play).collect()),
        None => pairs.par_iter().map(play).collect(),
    };

    let mut matrix = vec![vec![None; n]; n];
    let mut tallies = vec![Tally::default(); n];
    for (&(a, b), record) in pairs.iter().zip(played) {
        tallies[a].add(record.result, true);
        tallies[b].add(record.result, false);
        if symmetric {
            matrix[b][a] = Some(record.mirrored());
        }
        matrix[a][b] = Some(record);
    }
    let universal_winner = tallies
        .iter()
        .position(|t| t.played() > 0 && t.wins == t.played())
        .map(|a| learners[a].name().to_string());

    TournamentReport {
        game: game.name().to_string(),
        symmetric,
        learners: learners.iter().map(|l| l.name().to_string()).collect(),
        fuel: config.fuel,
        mode: config.mode,
        matrix,
        tallies,
        universal_winner,
    }
}
