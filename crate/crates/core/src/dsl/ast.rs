use std::fmt;

/// Where a simulated program (or its input) comes from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Source {
    /// The opponent's source text.
    Opp,
    /// The running program's own source text.
    SelfSource,
    /// A literal program.
    Quoted(String),
}

/// Fuel granted to a nested simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Budget {
    /// Everything the caller has left except the reserve. The simulation
    /// shares the caller's fate: if it runs dry, so does the caller.
    Rest,
    /// Exactly this many steps, charged to the caller up front.
    Fixed(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cmp {
    Eq,
    Lt,
    Gt,
}

impl Cmp {
    pub fn apply(self, a: i64, b: i64) -> bool {
        match self {
            Cmp::Eq => a == b,
            Cmp::Lt => a < b,
            Cmp::Gt => a > b,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Cmp::Eq => "==",
            Cmp::Lt => "<",
            Cmp::Gt => ">",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(i64),
    Int(i64),
    Var(String),
    BestResp(Box<Expr>),
    Sim {
        program: Source,
        input: Source,
        budget: Budget,
    },
    Match {
        scrutinee: Box<Expr>,
        binder: String,
        on_halted: Box<Expr>,
        on_exhausted: Box<Expr>,
    },
    If {
        lhs: Box<Expr>,
        cmp: Cmp,
        rhs: Box<Expr>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
    Loop,
    Grow,
}

pub(crate) fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Opp => f.write_str("opp"),
            Source::SelfSource => f.write_str("self"),
            Source::Quoted(text) => f.write_str(&quote(text)),
        }
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Budget::Rest => f.write_str("rest"),
            Budget::Fixed(n) => write!(f, "{n}"),
        }
    }
}

/// Canonical single-line form.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(n) => write!(f, "const {n}"),
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Var(name) => f.write_str(name),
            Expr::BestResp(e) => write!(f, "bestresp({e})"),
            Expr::Sim {
                program,
                input,
                budget,
            } => write!(f, "sim({program}, {input}, {budget})"),
            Expr::Match {
                scrutinee,
                binder,
                on_halted,
                on_exhausted,
            } => write!(
                f,
                "match {scrutinee} {{ halted({binder}) => {on_halted} | exhausted => {on_exhausted} }}"
            ),
            Expr::If {
                lhs,
                cmp,
                rhs,
                then,
                otherwise,
            } => write!(f, "if {lhs} {} {rhs} then {then} else {otherwise}", cmp.as_str()),
            Expr::Loop => f.write_str("loop"),
            Expr::Grow => f.write_str("grow"),
        }
    }
}
