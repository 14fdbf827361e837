//! Constructive learners showing why no universal winner exists.
//!
//! - the exploiter simulates its opponent and answers with a best response;
//!   it beats every opponent that halts, yet another exploiter aimed at it
//!   can always out-wait it;
//! - the oracle winner adds a non-halting prover to the exploiter, which
//!   lets it beat opponents that loop, but not ones that grow forever;
//! - the defiant learner grows forever, so nobody can beat it in strict mode.

use crate::arena::{run_match, run_match_with, run_tournament, MatchConfig, MatchRecord, Mode, TournamentConfig};
use crate::dsl::{
    Budget, EvalEnv, Evaluation, Expr, Learner, Source, StrategyProgram, DEFAULT_MEMORY_CAP,
};
use crate::game::{GameTable, Side};

/// Budget of the bounded exploiter in the catalog.
pub const BOUNDED_BUDGET: u64 = 200;

fn exploit(program: Source, budget: Budget) -> StrategyProgram {
    StrategyProgram::from(Expr::Match {
        scrutinee: Box::new(Expr::Sim {
            program,
            input: Source::SelfSource,
            budget,
        }),
        binder: "k".into(),
        on_halted: Box::new(Expr::BestResp(Box::new(Expr::Var("k".into())))),
        on_exhausted: Box::new(Expr::Const(1)),
    })
}

/// Simulates the opponent against itself and best-responds to the result;
/// plays strategy 1 if the simulation runs dry. The program is the same for
/// every game and side: `bestresp` uses the game and side of the match.
pub fn build_exploiter(_game: &GameTable, _side: Side) -> StrategyProgram {
    exploit(Source::Opp, Budget::Rest)
}

/// An exploiter aimed at one fixed program, simulated with `budget`.
pub fn build_exploiter_of(target: &str, budget: Budget) -> StrategyProgram {
    exploit(Source::Quoted(target.to_string()), budget)
}

/// Never halts and never repeats a state.
pub fn build_defiance() -> StrategyProgram {
    StrategyProgram::from(Expr::Grow)
}

/// The prover-assisted best responder, bound to a game, side and budget.
#[derive(Debug, Clone)]
pub struct OracleWinner<'a> {
    pub game: &'a GameTable,
    pub side: Side,
    pub fuel: u64,
    pub memory_cap: usize,
}

pub fn build_oracle_winner(game: &GameTable, side: Side, fuel: u64, memory_cap: usize) -> OracleWinner<'_> {
    OracleWinner {
        game,
        side,
        fuel,
        memory_cap,
    }
}

impl OracleWinner<'_> {
    /// The learner entered into matches; the game, side and fuel then come
    /// from the match itself.
    pub fn learner(&self) -> Learner {
        Learner::oracle_winner("oracle_winner")
    }

    /// Move against `opponent_source`: strategy 1 with a witness if the
    /// opponent provably never halts, the best response if it halts, and
    /// [`crate::dsl::EvalResult::FuelExhausted`] otherwise.
    pub fn respond(&self, opponent_source: &str) -> Evaluation {
        self.learner().evaluate(&EvalEnv {
            game: self.game,
            side: self.side,
            opponent_source,
            self_source: "",
            fuel: self.fuel,
            memory_cap: self.memory_cap,
        })
    }
}

fn named(name: impl Into<String>, program: &StrategyProgram) -> Learner {
    Learner::program(name, program)
}

/// The exploiter of the plain exploiter, given `budget` to simulate it.
pub fn exploiter_of_exploiter(budget: u64) -> Learner {
    let target = exploit(Source::Opp, Budget::Rest);
    named("exploiter_of_exploiter", &build_exploiter_of(target.source(), Budget::Fixed(budget)))
}

/// The standard field of learners for `game` at match fuel `fuel`:
/// a constant for each of the first three strategies, `loop`, the defiant
/// learner, the exploiter, a bounded exploiter, the exploiter of the
/// exploiter (whose budget equals the match fuel) and the oracle winner.
pub fn catalog(game: &GameTable, fuel: u64) -> Vec<Learner> {
    let mut out = Vec::new();
    for k in 1..=game.rows().min(game.cols()).min(3) {
        let program = StrategyProgram::from(Expr::Const(k as i64));
        out.push(named(format!("const_{}", game.label(Side::Row, k)), &program));
    }
    out.push(named("loop", &StrategyProgram::from(Expr::Loop)));
    out.push(named("defiance", &build_defiance()));
    out.push(named("exploiter", &build_exploiter(game, Side::Row)));
    out.push(named("bounded_exploiter", &exploit(Source::Opp, Budget::Fixed(BOUNDED_BUDGET))));
    out.push(exploiter_of_exploiter(fuel));
    out.push(build_oracle_winner(game, Side::Row, fuel, DEFAULT_MEMORY_CAP).learner());
    out
}

fn line(out: &mut String, record: &MatchRecord) {
    out.push_str(&format!(
        "{} vs {}: {}\n",
        record.learner1,
        record.learner2,
        record.trace_line()
    ));
}

fn tournament_tail(out: &mut String, game: &GameTable, learners: &[Learner], fuel: u64) {
    let rep = run_tournament(game, learners, &TournamentConfig::new(fuel, Mode::Strict));
    out.push_str(&format!("tournament over {} learners (strict)\n", learners.len()));
    for (name, t) in rep.learners.iter().zip(&rep.tallies) {
        out.push_str(&format!(
            "tally {name} wins={} draws={} losses={} undecided={}\n",
            t.wins, t.draws, t.losses, t.undecided
        ));
    }
    out.push_str(&format!(
        "universal_winner={}\n",
        rep.universal_winner.as_deref().unwrap_or("none")
    ));
}

/// The exploiter beats every opponent that halts, but is itself beaten by
/// an exploiter with more time, so no learner wins everything.
pub fn theorem1(game: &GameTable, fuel: u64) -> String {
    let learners = catalog(game, fuel);
    let exploiter = named("exploiter", &build_exploiter(game, Side::Row));
    let mut out = format!("# exploiter on {} with fuel {fuel}\n", game.name());
    out.push_str("the exploiter simulates its opponent and plays the best response to its move\n");
    for l in learners.iter().filter(|l| l.name() != "exploiter") {
        line(&mut out, &run_match(game, &exploiter, l, fuel, Mode::Strict));
    }
    out.push_str("an exploiter of the exploiter needs more time than the exploiter has\n");
    let ee = exploiter_of_exploiter(fuel);
    let config = MatchConfig {
        fuel: (fuel * 10, fuel),
        mode: Mode::Deadline,
        memory_cap: DEFAULT_MEMORY_CAP,
    };
    out.push_str("with 10x fuel, deadline: ");
    line(&mut out, &run_match_with(game, &ee, &exploiter, &config));
    out.push_str("with 10x fuel, strict: ");
    line(&mut out, &run_match_with(game, &ee, &exploiter, &MatchConfig { mode: Mode::Strict, ..config }));
    out.push_str("with equal fuel: ");
    line(&mut out, &run_match(game, &ee, &exploiter, fuel, Mode::Strict));
    tournament_tail(&mut out, game, &learners, fuel);
    out
}

/// The oracle winner beats halting and looping opponents, but its prover
/// cannot see through an opponent that grows forever.
pub fn theorem2(game: &GameTable, fuel: u64) -> String {
    let learners = catalog(game, fuel);
    let ow = build_oracle_winner(game, Side::Row, fuel, DEFAULT_MEMORY_CAP).learner();
    let mut out = format!("# oracle winner on {} with fuel {fuel}\n", game.name());
    out.push_str("the oracle winner proves looping opponents non-halting and best-responds to the rest\n");
    for l in learners.iter().filter(|l| !l.is_oracle_winner()) {
        let record = run_match(game, &ow, l, fuel, Mode::Strict);
        line(&mut out, &record);
        if let Some(w) = record.oracle_witness.0 {
            out.push_str(&format!(
                "  witness: opponent state after step {} repeats at step {} ({} bytes)\n",
                w.first, w.second, w.state_bytes
            ));
        }
    }
    tournament_tail(&mut out, game, &learners, fuel);
    out
}

/// The defiant learner is never beaten in strict mode, which is enough to
/// deny everyone else a clean sweep.
pub fn theorem3(game: &GameTable, fuel: u64) -> String {
    let learners = catalog(game, fuel);
    let defiance = named("defiance", &build_defiance());
    let mut out = format!("# defiance on {} with fuel {fuel}\n", game.name());
    out.push_str("the defiant learner never halts and never repeats a state\n");
    for l in learners.iter().filter(|l| l.name() != "defiance") {
        line(&mut out, &run_match(game, l, &defiance, fuel, Mode::Strict));
    }
    out.push_str("under a deadline, refusing to move loses: ");
    if let Some(first) = learners.first() {
        line(&mut out, &run_match(game, first, &defiance, fuel, Mode::Deadline));
    }
    tournament_tail(&mut out, game, &learners, fuel);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::MatchResult;
    use crate::bundled::rps;
    use crate::dsl::{parse_program, EvalResult};

    #[test]
    fn exploiter_source_is_canonical() {
        let g = rps();
        let e = build_exploiter(&g, Side::Row);
        assert_eq!(
            e.source(),
            "match sim(opp, self, rest) { halted(k) => bestresp(k) | exhausted => const 1 }"
        );
        assert_eq!(parse_program(e.source()).unwrap(), e);
    }

    #[test]
    fn exploiter_of_const_wins() {
        let g = rps();
        let r = named("R", &parse_program("const 1").unwrap());
        let e = named("e", &build_exploiter_of("const 1", Budget::Rest));
        let m = run_match(&g, &e, &r, 10_000, Mode::Strict);
        assert_eq!((m.result, m.strategies), (MatchResult::Win1, Some((2, 1))));
    }

    #[test]
    fn oracle_winner_responds() {
        let g = rps();
        let ow = build_oracle_winner(&g, Side::Row, 10_000, DEFAULT_MEMORY_CAP);
        assert_eq!(ow.respond("const 2").result, Ok(EvalResult::Halted(3)));
        let looped = ow.respond("loop");
        assert_eq!(looped.result, Ok(EvalResult::Halted(1)));
        assert!(looped.oracle_witness.is_some());
        assert_eq!(ow.respond("grow").result, Ok(EvalResult::FuelExhausted));
    }

    #[test]
    fn defiance_against_const() {
        let g = rps();
        let r = named("R", &parse_program("const 1").unwrap());
        let d = named("d", &build_defiance());
        assert_eq!(run_match(&g, &d, &r, 1_000, Mode::Strict).result, MatchResult::Undecided);
        assert_eq!(run_match(&g, &d, &r, 1_000, Mode::Deadline).result, MatchResult::Win2);
    }

    #[test]
    fn narratives_end_without_a_winner() {
        let g = rps();
        for text in [theorem1(&g, 2_000), theorem2(&g, 2_000), theorem3(&g, 2_000)] {
            assert!(text.ends_with("universal_winner=none\n"), "{text}");
        }
    }
}
