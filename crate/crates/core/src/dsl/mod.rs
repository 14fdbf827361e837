//! Strategy programs: the learners that take part in open-source
//! competitions.
//!
//! A program sees the game, the side it plays, its own source and its
//! opponent's source, and must halt with a strategy number. Evaluation is
//! deterministic and fuel-metered; see [`machine`] for the exact rules.
//!
//! ```text
//! expr   := "const" INT | INT | ID
//!         | "bestresp" "(" expr ")"
//!         | "sim" "(" src "," src "," budget ")"
//!         | "match" expr "{" "halted" "(" ID ")" "=>" expr "|" "exhausted" "=>" expr "}"
//!         | "if" expr ("==" | "<" | ">") expr "then" expr "else" expr
//!         | "loop" | "grow"
//! src    := "opp" | "self" | QUOTED_PROGRAM
//! budget := "rest" | INT
//! ```
//!
//! `sim(p, x, b)` runs program `p` against input `x`. The simulated program
//! plays the opposing side unless `p` is `self`.

pub mod ast;
pub mod machine;
mod parser;

use thiserror::Error;

pub use ast::{Budget, Cmp, Expr, Source};
pub use machine::{EvalEnv, EvalResult, Evaluation, RuntimeFault, Witness, DEFAULT_MEMORY_CAP, RESERVE};
pub use parser::ParseError;

/// Source text of the built-in oracle winner. It cannot be written in the
/// grammar; the evaluator recognises it when loading a learner.
pub const ORACLE_WINNER_SOURCE: &str = "builtin oracle_winner";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyProgram {
    source: String,
    ast: Expr,
}

impl StrategyProgram {
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    /// Canonical single-line form.
    pub fn canonical(&self) -> String {
        self.ast.to_string()
    }
}

impl From<Expr> for StrategyProgram {
    fn from(ast: Expr) -> Self {
        StrategyProgram {
            source: ast.to_string(),
            ast,
        }
    }
}

pub fn parse_program(text: &str) -> Result<StrategyProgram, ParseError> {
    Ok(StrategyProgram {
        source: text.to_string(),
        ast: parser::parse_expr(text)?,
    })
}

/// Runs `program` under `env`. The prover is always on: a repeated
/// top-level state ends the run with [`EvalResult::ProvenNonHalting`].
pub fn evaluate(program: &StrategyProgram, env: &EvalEnv<'_>) -> Result<EvalResult, RuntimeFault> {
    machine::run_expr(&program.ast, env).result
}

/// A non-halting proof for `program`, if the state-repetition check finds
/// one within `env.fuel` steps. `None` proves nothing.
pub fn prove_nonhalt(program: &StrategyProgram, env: &EvalEnv<'_>) -> Option<Witness> {
    match evaluate(program, env) {
        Ok(EvalResult::ProvenNonHalting(w)) => Some(w),
        _ => None,
    }
}

/// Replays the run described by `env` with the prover off and checks that
/// the states at both witness steps are byte-identical.
pub fn verify_witness(env: &EvalEnv<'_>, witness: &Witness) -> bool {
    if witness.first >= witness.second || witness.second > env.fuel {
        return false;
    }
    match (machine::state_at(env, witness.first), machine::state_at(env, witness.second)) {
        (Some(a), Some(b)) => a == b && a.len() == witness.state_bytes,
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LearnerError {
    #[error("learner file must start with `learner <name>`")]
    MissingHeader,
    #[error("learner {name}: {source}")]
    Program { name: String, source: ParseError },
}

/// A named competitor, identified by its source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Learner {
    name: String,
    source: String,
}

impl Learner {
    pub fn program(name: impl Into<String>, program: &StrategyProgram) -> Learner {
        Learner {
            name: name.into(),
            source: program.source().to_string(),
        }
    }

    /// The built-in oracle winner; game and side come from the match.
    pub fn oracle_winner(name: impl Into<String>) -> Learner {
        Learner {
            name: name.into(),
            source: ORACLE_WINNER_SOURCE.to_string(),
        }
    }

    /// Parses `learner <name>` followed by the program text.
    pub fn from_file(text: &str) -> Result<Learner, LearnerError> {
        let (header, body) = text.split_once('\n').unwrap_or((text, ""));
        let name = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["learner", name] => name.to_string(),
            _ => return Err(LearnerError::MissingHeader),
        };
        if body.trim() == ORACLE_WINNER_SOURCE {
            return Ok(Learner::oracle_winner(name));
        }
        // errors are reported relative to the file, header included
        let program = parse_program(body).map_err(|mut source| {
            source.line += 1;
            LearnerError::Program {
                name: name.clone(),
                source,
            }
        })?;
        Ok(Learner::program(name, &program).with_source(body.trim().to_string()))
    }

    fn with_source(mut self, source: String) -> Learner {
        self.source = source;
        self
    }

    pub fn to_file(&self) -> String {
        format!("learner {}\n{}\n", self.name, self.source)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn is_oracle_winner(&self) -> bool {
        self.source.trim() == ORACLE_WINNER_SOURCE
    }

    /// Evaluates this learner; `env.self_source` is ignored in favour of the
    /// learner's own source.
    pub fn evaluate(&self, env: &EvalEnv<'_>) -> Evaluation {
        let env = EvalEnv {
            self_source: &self.source,
            ..*env
        };
        machine::run_source(&env)
    }
}
