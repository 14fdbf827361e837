//! Tournament cross-tables of score fractions turned into win/draw/loss
//! tables, so that intransitive cycles among real players can be found.
//!
//! Input is CSV: a header `names,A,B,...` and one row per participant,
//! `A,,0.55,0.45`, where cell (A, B) is A's score fraction against B and the
//! diagonal is empty.

use thiserror::Error;

use crate::game::{GameError, GameTable, Outcome};

/// Largest allowed gap between `s(a,b) + s(b,a)` and 1.
pub const COMPLEMENT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CrosstableError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("scores of {a} vs {b} ({ab}) and {b} vs {a} ({ba}) do not sum to 1")]
    ComplementarityViolation { a: String, b: String, ab: f64, ba: f64 },
    #[error("margin {0} outside [0, 0.5)")]
    BadMargin(f64),
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Crosstable {
    pub names: Vec<String>,
    /// `scores[a][b]`: score fraction of `a` against `b`, if reported.
    pub scores: Vec<Vec<Option<f64>>>,
}

impl Crosstable {
    pub fn parse(text: &str) -> Result<Crosstable, CrosstableError> {
        let err = |line, message: String| CrosstableError::Parse { line, message };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(n, l)| (n + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (n, header) = lines.next().ok_or_else(|| err(1, "empty cross-table".into()))?;
        let mut cells = header.split(',').map(str::trim);
        if cells.next() != Some("names") {
            return Err(err(n, "header must start with `names`".into()));
        }
        let names: Vec<String> = cells.map(str::to_string).collect();
        if names.is_empty() {
            return Err(err(n, "no participants".into()));
        }
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() || name.contains(char::is_whitespace) || names[..i].contains(name) {
                return Err(err(n, format!("bad or duplicate name {name:?}")));
            }
        }
        let k = names.len();
        let mut scores = vec![vec![None; k]; k];
        let mut seen = vec![false; k];
        for (n, line) in lines {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            let a = names
                .iter()
                .position(|name| name == cells[0])
                .ok_or_else(|| err(n, format!("unknown participant {:?}", cells[0])))?;
            if std::mem::replace(&mut seen[a], true) {
                return Err(err(n, format!("second row for {}", names[a])));
            }
            if cells.len() != k + 1 {
                return Err(err(n, format!("expected {} cells, found {}", k + 1, cells.len())));
            }
            for (b, cell) in cells[1..].iter().enumerate() {
                if cell.is_empty() {
                    continue;
                }
                if a == b {
                    return Err(err(n, format!("diagonal cell of {} must be empty", names[a])));
                }
                let s: f64 = cell.parse().map_err(|_| err(n, format!("bad score {cell:?}")))?;
                if !(0.0..=1.0).contains(&s) {
                    return Err(err(n, format!("score {s} outside [0, 1]")));
                }
                scores[a][b] = Some(s);
            }
        }
        let table = Crosstable { names, scores };
        for a in 0..k {
            for b in a + 1..k {
                if let (Some(ab), Some(ba)) = (table.scores[a][b], table.scores[b][a]) {
                    if (ab + ba - 1.0).abs() > COMPLEMENT_TOLERANCE {
                        return Err(CrosstableError::ComplementarityViolation {
                            a: table.names[a].clone(),
                            b: table.names[b].clone(),
                            ab,
                            ba,
                        });
                    }
                }
            }
        }
        Ok(table)
    }

    /// How far `a` scored above an even result against `b`, from both
    /// directions of the pairing; 0 when the pair never met.
    pub fn edge(&self, a: usize, b: usize) -> f64 {
        match (self.scores[a][b], self.scores[b][a]) {
            (Some(ab), Some(ba)) => (ab - ba) / 2.0,
            (Some(ab), None) => ab - 0.5,
            (None, Some(ba)) => 0.5 - ba,
            (None, None) => 0.0,
        }
    }

    /// Symmetric win/draw/loss table: `a` beats `b` when its edge exceeds
    /// `margin`.
    pub fn to_game(&self, margin: f64) -> Result<GameTable, CrosstableError> {
        if !(0.0..0.5).contains(&margin) {
            return Err(CrosstableError::BadMargin(margin));
        }
        let k = self.names.len();
        let mut entries = Vec::with_capacity(k * k);
        for a in 0..k {
            for b in 0..k {
                let e = if a == b { 0.0 } else { self.edge(a, b) };
                entries.push(if e > margin {
                    Outcome::WIN
                } else if e < -margin {
                    Outcome::LOSS
                } else {
                    Outcome::DRAW
                });
            }
        }
        let game = GameTable::new("crosstable", k, k, entries, true)?;
        Ok(game.with_labels(Some(self.names.clone()), Some(self.names.clone()))?)
    }
}

pub fn ingest_crosstable(text: &str, margin: f64) -> Result<(Crosstable, GameTable), CrosstableError> {
    if !(0.0..0.5).contains(&margin) {
        return Err(CrosstableError::BadMargin(margin));
    }
    let table = Crosstable::parse(text)?;
    let game = table.to_game(margin)?;
    Ok((table, game))
}
