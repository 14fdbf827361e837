//! Small-step evaluator for strategy programs.
//!
//! One machine runs a learner together with every simulation it starts.
//! Each simulation is a frame on an explicit stack and every transition of
//! the topmost frame costs one unit of fuel from a single pool. Frame fuel
//! limits are absolute step counts and only ever shrink going up the stack,
//! so the topmost frame is always the first to run dry.
//!
//! Fuel rules:
//! - `rest` grants everything the caller has left minus [`RESERVE`]. If that
//!   simulation runs dry, the caller runs dry with it.
//! - a fixed budget `n` is granted only if the caller can pay `n` and still
//!   keep [`RESERVE`]; otherwise the caller itself is out of fuel. A fixed
//!   simulation that runs dry reports `exhausted` and costs exactly `n`.
//!
//! Under these rules the result of a simulation depends only on the
//! simulated program, its input and (for fixed budgets) `n`, never on how
//! much fuel the caller happens to hold, which makes halting results
//! monotone in fuel.
//!
//! The prover watches the top-level frame (and the probe frame of the
//! built-in oracle winner) while no simulation is running above it. A
//! repeated encoded state there can never be left again: transitions at
//! that depth do not read the fuel counter, and the visited set is cleared
//! whenever a simulation starts or ends.

use std::collections::HashMap;
use std::rc::Rc;

use thiserror::Error;

use super::ast::{Budget, Cmp, Expr, Source};
use super::parser::parse_expr;
use super::ORACLE_WINNER_SOURCE;
use crate::classify::best_response;
use crate::game::{GameTable, Side};

/// Steps a simulating program always keeps back from a nested simulation.
pub const RESERVE: u64 = 16;

/// Default per-state byte limit for the non-halting prover.
pub const DEFAULT_MEMORY_CAP: usize = 4096;

/// Inputs of one evaluation: the game, the side played, both sources and
/// the resource limits.
#[derive(Debug, Clone, Copy)]
pub struct EvalEnv<'a> {
    pub game: &'a GameTable,
    pub side: Side,
    pub opponent_source: &'a str,
    pub self_source: &'a str,
    pub fuel: u64,
    /// Largest encoded machine state the prover will remember, in bytes.
    pub memory_cap: usize,
}

/// Two step counts at which the watched frame was in bit-identical states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Witness {
    pub first: u64,
    pub second: u64,
    /// Size of the repeated state encoding.
    pub state_bytes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvalResult {
    /// The program produced this strategy number.
    Halted(i64),
    FuelExhausted,
    ProvenNonHalting(Witness),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("runtime fault: {0}")]
pub struct RuntimeFault(pub String);

/// Full record of one evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub result: Result<EvalResult, RuntimeFault>,
    pub fuel_used: u64,
    /// Set when the built-in oracle winner proved its opponent non-halting.
    pub oracle_witness: Option<Witness>,
}

type SrcId = u32;
type NodeId = u32;

#[derive(Debug, Clone, Copy)]
enum SrcRef {
    Opp,
    SelfSource,
    Literal(SrcId),
}

#[derive(Debug, Clone)]
enum Node {
    Lit(i64),
    /// De Bruijn index counted from the innermost binder.
    Var(usize),
    BestResp(NodeId),
    Sim { program: SrcRef, input: SrcRef, budget: Budget },
    Match { scrutinee: NodeId, on_halted: NodeId, on_exhausted: NodeId },
    If { lhs: NodeId, cmp: Cmp, rhs: NodeId, then: NodeId, otherwise: NodeId },
    Loop,
    Grow,
    Oracle,
}

#[derive(Debug)]
struct Compiled {
    nodes: Vec<Node>,
    root: NodeId,
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Int(i64),
    Exhausted,
    Proven,
    Faulted,
}

#[derive(Debug, Clone)]
enum Control {
    Eval(NodeId, Vec<i64>),
    Return(Value),
    Growing(Vec<u8>),
}

#[derive(Debug, Clone)]
enum Kont {
    BestResp,
    Match { node: NodeId, env: Vec<i64> },
    IfLhs { node: NodeId, env: Vec<i64> },
    IfRhs { node: NodeId, env: Vec<i64>, lhs: i64 },
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FrameKind {
    Top,
    Rest,
    Fixed,
    /// The oracle winner's watched simulation of its opponent.
    Probe,
}

#[derive(Debug)]
struct Frame {
    kind: FrameKind,
    start: u64,
    limit: u64,
    side: Side,
    prog: SrcId,
    opp: SrcId,
    code: Rc<Compiled>,
    control: Control,
    konts: Vec<Kont>,
}

enum Loaded {
    Ok(Rc<Compiled>),
    Invalid,
}

/// Interned sources and their compiled programs.
#[derive(Default)]
struct Library {
    texts: Vec<Rc<str>>,
    ids: HashMap<Rc<str>, SrcId>,
    compiled: Vec<Option<Option<Rc<Compiled>>>>,
}

impl Library {
    fn intern(&mut self, text: &str) -> SrcId {
        if let Some(&id) = self.ids.get(text) {
            return id;
        }
        let id = self.texts.len() as SrcId;
        let rc: Rc<str> = Rc::from(text);
        self.texts.push(rc.clone());
        self.ids.insert(rc, id);
        self.compiled.push(None);
        id
    }

    fn load(&mut self, id: SrcId) -> Loaded {
        if let Some(done) = &self.compiled[id as usize] {
            return match done {
                Some(code) => Loaded::Ok(code.clone()),
                None => Loaded::Invalid,
            };
        }
        let text = self.texts[id as usize].clone();
        let code = if text.trim() == ORACLE_WINNER_SOURCE {
            Some(Rc::new(Compiled {
                nodes: vec![Node::Oracle],
                root: 0,
            }))
        } else {
            parse_expr(&text).ok().map(|e| Rc::new(self.compile(&e)))
        };
        self.compiled[id as usize] = Some(code.clone());
        match code {
            Some(code) => Loaded::Ok(code),
            None => Loaded::Invalid,
        }
    }

    fn insert_compiled(&mut self, id: SrcId, expr: &Expr) -> Rc<Compiled> {
        let code = Rc::new(self.compile(expr));
        self.compiled[id as usize] = Some(Some(code.clone()));
        code
    }

    fn compile(&mut self, expr: &Expr) -> Compiled {
        let mut nodes = Vec::new();
        let mut scope = Vec::new();
        let root = self.lower(expr, &mut nodes, &mut scope);
        Compiled { nodes, root }
    }

    fn lower(&mut self, expr: &Expr, nodes: &mut Vec<Node>, scope: &mut Vec<String>) -> NodeId {
        let node = match expr {
            Expr::Const(n) | Expr::Int(n) => Node::Lit(*n),
            Expr::Var(name) => {
                let depth = scope.iter().rev().position(|s| s == name).expect("parser checks scoping");
                Node::Var(depth)
            }
            Expr::BestResp(e) => Node::BestResp(self.lower(e, nodes, scope)),
            Expr::Sim {
                program,
                input,
                budget,
            } => Node::Sim {
                program: self.src_ref(program),
                input: self.src_ref(input),
                budget: *budget,
            },
            Expr::Match {
                scrutinee,
                binder,
                on_halted,
                on_exhausted,
            } => {
                let scrutinee = self.lower(scrutinee, nodes, scope);
                scope.push(binder.clone());
                let on_halted = self.lower(on_halted, nodes, scope);
                scope.pop();
                let on_exhausted = self.lower(on_exhausted, nodes, scope);
                Node::Match {
                    scrutinee,
                    on_halted,
                    on_exhausted,
                }
            }
            Expr::If {
                lhs,
                cmp,
                rhs,
                then,
                otherwise,
            } => Node::If {
                lhs: self.lower(lhs, nodes, scope),
                cmp: *cmp,
                rhs: self.lower(rhs, nodes, scope),
                then: self.lower(then, nodes, scope),
                otherwise: self.lower(otherwise, nodes, scope),
            },
            Expr::Loop => Node::Loop,
            Expr::Grow => Node::Grow,
        };
        nodes.push(node);
        (nodes.len() - 1) as NodeId
    }

    fn src_ref(&mut self, source: &Source) -> SrcRef {
        match source {
            Source::Opp => SrcRef::Opp,
            Source::SelfSource => SrcRef::SelfSource,
            Source::Quoted(text) => SrcRef::Literal(self.intern(text)),
        }
    }
}

type Stop = Result<EvalResult, RuntimeFault>;

struct Machine<'a> {
    game: &'a GameTable,
    library: Library,
    frames: Vec<Frame>,
    used: u64,
    memory_cap: usize,
    prove: bool,
    visited: HashMap<Vec<u8>, u64>,
    scratch: Vec<u8>,
    oracle_witness: Option<Witness>,
}

impl<'a> Machine<'a> {
    fn new(env: &EvalEnv<'a>, top: Option<&Expr>, prove: bool) -> Machine<'a> {
        let mut library = Library::default();
        let prog = library.intern(env.self_source);
        let opp = library.intern(env.opponent_source);
        let code = match top {
            Some(expr) => Some(library.insert_compiled(prog, expr)),
            None => match library.load(prog) {
                Loaded::Ok(code) => Some(code),
                Loaded::Invalid => None,
            },
        };
        let mut m = Machine {
            game: env.game,
            library,
            frames: Vec::new(),
            used: 0,
            memory_cap: env.memory_cap,
            prove,
            visited: HashMap::new(),
            scratch: Vec::new(),
            oracle_witness: None,
        };
        if let Some(code) = code {
            m.frames.push(Frame {
                kind: FrameKind::Top,
                start: 0,
                limit: env.fuel,
                side: env.side,
                prog,
                opp,
                control: Control::Eval(code.root, Vec::new()),
                code,
                konts: Vec::new(),
            });
        }
        m
    }

    fn finish(self, result: Result<EvalResult, RuntimeFault>) -> Evaluation {
        Evaluation {
            result,
            fuel_used: self.used,
            oracle_witness: self.oracle_witness,
        }
    }

    fn run(mut self, stop_at: Option<u64>) -> (Evaluation, Option<Vec<u8>>) {
        if self.frames.is_empty() {
            return (self.finish(Err(RuntimeFault("source does not parse".into()))), None);
        }
        loop {
            if let Some(result) = self.settle() {
                return (self.finish(result), None);
            }
            if stop_at == Some(self.used) {
                let snapshot = (self.frames.len() == 1).then(|| {
                    self.encode_top();
                    self.scratch.clone()
                });
                let result = Err(RuntimeFault("stopped".into()));
                return (self.finish(result), snapshot);
            }
            if self.prove && self.watching() {
                let depth = self.frames.len();
                if let Some(result) = self.check_repeat() {
                    return (self.finish(result), None);
                }
                if self.frames.len() != depth {
                    continue;
                }
            }
            let top = self.frames.last().expect("settle keeps a frame");
            if self.used >= top.limit {
                if let Some(result) = self.exhaust() {
                    return (self.finish(result), None);
                }
                continue;
            }
            self.used += 1;
            if let Some(result) = self.step() {
                return (self.finish(result), None);
            }
        }
    }

    fn watching(&self) -> bool {
        matches!(
            self.frames.last().map(|f| f.kind),
            Some(FrameKind::Top | FrameKind::Probe)
        )
    }

    /// Pops finished frames and delivers their values; costs no fuel.
    fn settle(&mut self) -> Option<Stop> {
        loop {
            let top = self.frames.last()?;
            let value = match (&top.control, top.konts.is_empty()) {
                (Control::Return(v), true) => v.clone(),
                _ => return None,
            };
            match value {
                Value::Int(k) => {
                    if top.kind == FrameKind::Top {
                        return Some(Ok(EvalResult::Halted(k)));
                    }
                    self.pop_deliver(Value::Int(k));
                }
                _ => {
                    if let Some(stop) = self.fault("program finished without a strategy".into()) {
                        return Some(stop);
                    }
                }
            }
        }
    }

    fn pop_deliver(&mut self, value: Value) {
        self.frames.pop();
        self.visited.clear();
        if let Some(parent) = self.frames.last_mut() {
            parent.control = Control::Return(value);
        }
    }

    /// The topmost frame failed outright.
    fn fault(&mut self, message: String) -> Option<Stop> {
        let top = self.frames.last().expect("fault needs a frame");
        match top.kind {
            FrameKind::Top => Some(Err(RuntimeFault(message))),
            FrameKind::Rest | FrameKind::Fixed => {
                self.pop_deliver(Value::Exhausted);
                None
            }
            FrameKind::Probe => {
                self.pop_deliver(Value::Faulted);
                None
            }
        }
    }

    /// The topmost frame is out of fuel.
    fn exhaust(&mut self) -> Option<Stop> {
        loop {
            let top = self.frames.last().expect("exhaust needs a frame");
            self.used = self.used.max(top.limit);
            match top.kind {
                FrameKind::Top => return Some(Ok(EvalResult::FuelExhausted)),
                FrameKind::Fixed => {
                    self.pop_deliver(Value::Exhausted);
                    return None;
                }
                FrameKind::Rest | FrameKind::Probe => {
                    self.frames.pop();
                    self.visited.clear();
                }
            }
        }
    }

    fn check_repeat(&mut self) -> Option<Stop> {
        let top = self.frames.last().expect("watched frame");
        if let Control::Growing(tape) = &top.control {
            if tape.len() > self.memory_cap {
                return None;
            }
        }
        let (kind, here) = (top.kind, self.used - top.start);
        self.encode_top();
        if self.scratch.len() > self.memory_cap {
            return None;
        }
        if let Some(&first) = self.visited.get(&self.scratch) {
            let witness = Witness {
                first,
                second: here,
                state_bytes: self.scratch.len(),
            };
            return match kind {
                FrameKind::Top => Some(Ok(EvalResult::ProvenNonHalting(witness))),
                _ => {
                    if self.frames.len() == 2 {
                        self.oracle_witness = Some(witness);
                    }
                    self.pop_deliver(Value::Proven);
                    None
                }
            };
        }
        self.visited.insert(self.scratch.clone(), here);
        None
    }

    fn encode_top(&mut self) {
        let top = self.frames.last().expect("frame to encode");
        let out = &mut self.scratch;
        out.clear();
        out.push(top.side as u8);
        put(out, top.prog as u64);
        put(out, top.opp as u64);
        match &top.control {
            Control::Eval(node, env) => {
                out.push(0);
                put(out, *node as u64);
                put_env(out, env);
            }
            Control::Return(v) => {
                out.push(1);
                put_value(out, v);
            }
            Control::Growing(tape) => {
                out.push(2);
                put(out, tape.len() as u64);
                out.extend_from_slice(tape);
            }
        }
        put(out, top.konts.len() as u64);
        for k in &top.konts {
            match k {
                Kont::BestResp => out.push(0),
                Kont::Match { node, env } => {
                    out.push(1);
                    put(out, *node as u64);
                    put_env(out, env);
                }
                Kont::IfLhs { node, env } => {
                    out.push(2);
                    put(out, *node as u64);
                    put_env(out, env);
                }
                Kont::IfRhs { node, env, lhs } => {
                    out.push(3);
                    put(out, *node as u64);
                    put_env(out, env);
                    put(out, *lhs as u64);
                }
                Kont::Oracle => out.push(4),
            }
        }
    }

    fn step(&mut self) -> Option<Stop> {
        let frame = self.frames.last_mut().expect("step needs a frame");
        let control = std::mem::replace(&mut frame.control, Control::Return(Value::Exhausted));
        match control {
            Control::Growing(mut tape) => {
                tape.push(tape.len() as u8);
                frame.control = Control::Growing(tape);
                None
            }
            Control::Eval(node, env) => {
                let code = frame.code.clone();
                match &code.nodes[node as usize] {
                    Node::Lit(n) => frame.control = Control::Return(Value::Int(*n)),
                    Node::Var(depth) => {
                        let v = env[env.len() - 1 - depth];
                        frame.control = Control::Return(Value::Int(v));
                    }
                    Node::BestResp(inner) => {
                        frame.konts.push(Kont::BestResp);
                        frame.control = Control::Eval(*inner, env);
                    }
                    Node::Match { scrutinee, .. } => {
                        frame.konts.push(Kont::Match { node, env: env.clone() });
                        frame.control = Control::Eval(*scrutinee, env);
                    }
                    Node::If { lhs, .. } => {
                        frame.konts.push(Kont::IfLhs { node, env: env.clone() });
                        frame.control = Control::Eval(*lhs, env);
                    }
                    Node::Loop => frame.control = Control::Eval(node, env),
                    Node::Grow => frame.control = Control::Growing(Vec::new()),
                    Node::Sim {
                        program,
                        input,
                        budget,
                    } => {
                        let resolve = |r: SrcRef| match r {
                            SrcRef::Opp => frame.opp,
                            SrcRef::SelfSource => frame.prog,
                            SrcRef::Literal(id) => id,
                        };
                        let side = match program {
                            SrcRef::SelfSource => frame.side,
                            _ => frame.side.opposite(),
                        };
                        let (prog, opp) = (resolve(*program), resolve(*input));
                        let kind = match budget {
                            Budget::Rest => FrameKind::Rest,
                            Budget::Fixed(_) => FrameKind::Fixed,
                        };
                        return self.start_child(kind, *budget, side, prog, opp);
                    }
                    Node::Oracle => {
                        frame.konts.push(Kont::Oracle);
                        let (side, prog, opp) = (frame.side.opposite(), frame.opp, frame.prog);
                        return self.start_child(FrameKind::Probe, Budget::Rest, side, prog, opp);
                    }
                }
                None
            }
            Control::Return(value) => {
                let kont = frame.konts.pop().expect("settle handles empty continuations");
                match (kont, value) {
                    (Kont::BestResp, Value::Int(k)) => {
                        let side = frame.side;
                        match usize::try_from(k).ok().and_then(|k| best_response(self.game, side, k).ok()) {
                            Some(r) => frame.control = Control::Return(Value::Int(r as i64)),
                            None => return self.fault(format!("bestresp of invalid strategy {k}")),
                        }
                    }
                    (Kont::Match { node, mut env }, v) => {
                        let Node::Match {
                            on_halted,
                            on_exhausted,
                            ..
                        } = frame.code.nodes[node as usize]
                        else {
                            unreachable!("match continuation points at a match node")
                        };
                        match v {
                            Value::Int(k) => {
                                env.push(k);
                                frame.control = Control::Eval(on_halted, env);
                            }
                            Value::Exhausted => frame.control = Control::Eval(on_exhausted, env),
                            _ => return self.fault("unexpected simulation result".into()),
                        }
                    }
                    (Kont::IfLhs { node, env }, Value::Int(a)) => {
                        let Node::If { rhs, .. } = frame.code.nodes[node as usize] else {
                            unreachable!("if continuation points at an if node")
                        };
                        frame.konts.push(Kont::IfRhs {
                            node,
                            env: env.clone(),
                            lhs: a,
                        });
                        frame.control = Control::Eval(rhs, env);
                    }
                    (Kont::IfRhs { node, env, lhs }, Value::Int(b)) => {
                        let Node::If {
                            cmp, then, otherwise, ..
                        } = frame.code.nodes[node as usize]
                        else {
                            unreachable!("if continuation points at an if node")
                        };
                        let next = if cmp.apply(lhs, b) { then } else { otherwise };
                        frame.control = Control::Eval(next, env);
                    }
                    (Kont::Oracle, v) => {
                        let side = frame.side;
                        let choice = match v {
                            Value::Int(k) => usize::try_from(k)
                                .ok()
                                .and_then(|k| best_response(self.game, side, k).ok())
                                .unwrap_or(1),
                            _ => 1,
                        };
                        frame.control = Control::Return(Value::Int(choice as i64));
                    }
                    (_, Value::Exhausted) => {
                        return self.fault("exhausted simulation used as a strategy".into())
                    }
                    (_, _) => return self.fault("unexpected value".into()),
                }
                None
            }
        }
    }

    fn start_child(&mut self, kind: FrameKind, budget: Budget, side: Side, prog: SrcId, opp: SrcId) -> Option<Stop> {
        let parent = self.frames.last().expect("child needs a parent");
        let remaining = parent.limit - self.used;
        let limit = match budget {
            Budget::Rest if remaining > RESERVE => parent.limit - RESERVE,
            Budget::Fixed(n) if remaining >= n.saturating_add(RESERVE) => self.used + n,
            _ => return self.exhaust(),
        };
        let code = match self.library.load(prog) {
            Loaded::Ok(code) => code,
            Loaded::Invalid => {
                let v = if kind == FrameKind::Probe {
                    Value::Faulted
                } else {
                    Value::Exhausted
                };
                self.frames.last_mut().expect("parent").control = Control::Return(v);
                return None;
            }
        };
        self.visited.clear();
        self.frames.push(Frame {
            kind,
            start: self.used,
            limit,
            side,
            prog,
            opp,
            control: Control::Eval(code.root, Vec::new()),
            code,
            konts: Vec::new(),
        });
        None
    }
}

fn put(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

fn put_env(out: &mut Vec<u8>, env: &[i64]) {
    put(out, env.len() as u64);
    for &v in env {
        put(out, v as u64);
    }
}

fn put_value(out: &mut Vec<u8>, v: &Value) {
    match v {
        Value::Int(k) => {
            out.push(0);
            put(out, *k as u64);
        }
        Value::Exhausted => out.push(1),
        Value::Proven => out.push(2),
        Value::Faulted => out.push(3),
    }
}

/// Evaluates an already parsed program.
pub(crate) fn run_expr(expr: &Expr, env: &EvalEnv<'_>) -> Evaluation {
    Machine::new(env, Some(expr), true).run(None).0
}

/// Evaluates whatever `env.self_source` names, including the built-in
/// oracle winner.
pub(crate) fn run_source(env: &EvalEnv<'_>) -> Evaluation {
    Machine::new(env, None, true).run(None).0
}

/// Encoded top-level state after exactly `step` steps, with the prover
/// off. `None` if the run ends earlier or a simulation is active then.
pub(crate) fn state_at(env: &EvalEnv<'_>, step: u64) -> Option<Vec<u8>> {
    Machine::new(env, None, false).run(Some(step)).1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled::rps;
    use proptest::prelude::*;

    const EXPLOITER: &str = "match sim(opp, self, rest) { halted(k) => bestresp(k) | exhausted => const 1 }";

    fn eval(game: &GameTable, me: &str, opp: &str, fuel: u64, cap: usize) -> Evaluation {
        run_source(&EvalEnv {
            game,
            side: Side::Row,
            opponent_source: opp,
            self_source: me,
            fuel,
            memory_cap: cap,
        })
    }

    #[test]
    fn constants_halt_in_one_step() {
        let g = rps();
        let e = eval(&g, "const 2", "loop", 10, DEFAULT_MEMORY_CAP);
        assert_eq!(e.result, Ok(EvalResult::Halted(2)));
        assert_eq!(e.fuel_used, 1);
    }

    #[test]
    fn loop_repeats_immediately() {
        let g = rps();
        let e = eval(&g, "loop", "const 1", 10_000, DEFAULT_MEMORY_CAP);
        let Ok(EvalResult::ProvenNonHalting(w)) = e.result else {
            panic!("expected a proof, got {:?}", e.result)
        };
        assert_eq!((w.first, w.second), (0, 1));
    }

    #[test]
    fn grow_is_never_proven() {
        let g = rps();
        for cap in [1024, DEFAULT_MEMORY_CAP] {
            let e = eval(&g, "grow", "const 1", 5_000, cap);
            assert_eq!(e.result, Ok(EvalResult::FuelExhausted));
            assert_eq!(e.fuel_used, 5_000);
        }
    }

    #[test]
    fn exploiter_answers_constants() {
        let g = rps();
        for (opp, want) in [("const 1", 2), ("const 2", 3), ("const 3", 1)] {
            let e = eval(&g, EXPLOITER, opp, 10_000, DEFAULT_MEMORY_CAP);
            assert_eq!(e.result, Ok(EvalResult::Halted(want)), "vs {opp}");
        }
    }

    #[test]
    fn mutual_exploiters_run_dry() {
        let g = rps();
        let e = eval(&g, EXPLOITER, EXPLOITER, 10_000, DEFAULT_MEMORY_CAP);
        assert_eq!(e.result, Ok(EvalResult::FuelExhausted));
        assert_eq!(e.fuel_used, 10_000);
    }

    #[test]
    fn fixed_budget_is_charged_in_full() {
        let g = rps();
        let prog = "match sim(\"grow\", self, 100) { halted(k) => k | exhausted => const 3 }";
        let e = eval(&g, prog, "const 1", 10_000, DEFAULT_MEMORY_CAP);
        assert_eq!(e.result, Ok(EvalResult::Halted(3)));
        // match, sim, 100 child steps, branch selection, literal
        assert_eq!(e.fuel_used, 104);
        // cannot afford the budget plus the reserve: the caller runs dry
        let e = eval(&g, prog, "const 1", 110, DEFAULT_MEMORY_CAP);
        assert_eq!(e.result, Ok(EvalResult::FuelExhausted));
    }

    #[test]
    fn faults_surface_at_top_and_become_exhausted_below() {
        let g = rps();
        let e = eval(&g, "bestresp(7)", "const 1", 100, DEFAULT_MEMORY_CAP);
        assert!(e.result.is_err());
        let prog = "match sim(\"bestresp(9)\", self, 50) { halted(k) => k | exhausted => const 2 }";
        let e = eval(&g, prog, "const 1", 100, DEFAULT_MEMORY_CAP);
        assert_eq!(e.result, Ok(EvalResult::Halted(2)));
        let e = eval(&g, "sim(opp, self, rest)", "exhausted +", 100, DEFAULT_MEMORY_CAP);
        assert!(e.result.is_err(), "an unparsable opponent simulates as exhausted");
    }

    #[test]
    fn oracle_winner_cases() {
        let g = rps();
        let ow = ORACLE_WINNER_SOURCE;
        let e = eval(&g, ow, "const 2", 10_000, DEFAULT_MEMORY_CAP);
        assert_eq!(e.result, Ok(EvalResult::Halted(3)));
        let e = eval(&g, ow, "loop", 10_000, DEFAULT_MEMORY_CAP);
        assert_eq!(e.result, Ok(EvalResult::Halted(1)));
        assert_eq!(e.oracle_witness.map(|w| (w.first, w.second)), Some((0, 1)));
        let e = eval(&g, ow, "grow", 10_000, DEFAULT_MEMORY_CAP);
        assert_eq!(e.result, Ok(EvalResult::FuelExhausted));
        assert_eq!(e.oracle_witness, None);
    }

    #[test]
    fn witness_states_replay() {
        let g = rps();
        let prog = "if 1 == 2 then const 1 else loop";
        let env = EvalEnv {
            game: &g,
            side: Side::Col,
            opponent_source: "const 1",
            self_source: prog,
            fuel: 1_000,
            memory_cap: DEFAULT_MEMORY_CAP,
        };
        let Ok(EvalResult::ProvenNonHalting(w)) = run_source(&env).result else {
            panic!("expected a proof")
        };
        let a = state_at(&env, w.first).unwrap();
        assert_eq!(Some(a.clone()), state_at(&env, w.second));
        assert_eq!(a.len(), w.state_bytes);
    }

    fn program() -> impl Strategy<Value = String> {
        let leaf = prop_oneof![
            (1i64..4).prop_map(|k| format!("const {k}")),
            Just("loop".to_string()),
            Just("grow".to_string()),
            Just("sim(opp, self, rest)".to_string()),
            Just("sim(self, opp, rest)".to_string()),
            (0u64..60).prop_map(|n| format!("sim(opp, self, {n})")),
        ];
        leaf.prop_recursive(3, 16, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| format!("bestresp({e})")),
                (inner.clone(), inner.clone(), inner.clone()).prop_map(|(s, h, x)| format!(
                    "match {s} {{ halted(k) => if k > 3 then {h} else bestresp(k) | exhausted => {x} }}"
                )),
                (inner.clone(), inner.clone(), inner)
                    .prop_map(|(a, b, c)| format!("if {a} < 2 then {b} else {c}")),
            ]
        })
    }

    fn halted(e: &Evaluation) -> Option<i64> {
        match e.result {
            Ok(EvalResult::Halted(k)) => Some(k),
            _ => None,
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn fuel_is_monotone(me in program(), opp in program(), fuel in 1u64..400, extra in 0u64..400) {
            let g = rps();
            let lo = eval(&g, &me, &opp, fuel, DEFAULT_MEMORY_CAP);
            let hi = eval(&g, &me, &opp, fuel + extra, DEFAULT_MEMORY_CAP);
            prop_assert!(lo.fuel_used <= fuel);
            prop_assert_eq!(eval(&g, &me, &opp, fuel, DEFAULT_MEMORY_CAP), lo.clone());
            if let Some(k) = halted(&lo) {
                prop_assert_eq!(halted(&hi), Some(k));
            }
        }

        #[test]
        fn proofs_are_sound(me in program(), opp in program(), fuel in 1u64..400) {
            let g = rps();
            let e = eval(&g, &me, &opp, fuel, DEFAULT_MEMORY_CAP);
            if let Ok(EvalResult::ProvenNonHalting(_)) = e.result {
                let big = eval(&g, &me, &opp, fuel * 10, DEFAULT_MEMORY_CAP);
                prop_assert!(halted(&big).is_none());
                let blind = Machine::new(
                    &EvalEnv { game: &g, side: Side::Row, opponent_source: &opp, self_source: &me, fuel: fuel * 10, memory_cap: 0 },
                    None,
                    false,
                ).run(None).0;
                prop_assert!(halted(&blind).is_none());
            }
        }
    }
}
