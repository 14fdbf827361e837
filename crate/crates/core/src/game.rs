//! Finite two-player win/draw/loss games in normal form.
//!
//! A [`GameTable`] stores the payoff to player 1 for every pair of pure
//! strategies. Strategy indices are 1-based everywhere in the public API,
//! in game files and in reports.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// Upper bound on strategies per side.
pub const MAX_STRATEGIES: usize = 10_000;

/// Largest `rows * cols` for which [`enumerate_game_count`] enumerates tables
/// explicitly instead of using the closed form.
pub const ENUMERATION_LIMIT: usize = 12;

/// Payoff to player 1: loss, draw or win.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Outcome(i8);

impl Outcome {
    pub const LOSS: Outcome = Outcome(-1);
    pub const DRAW: Outcome = Outcome(0);
    pub const WIN: Outcome = Outcome(1);

    pub const ALL: [Outcome; 3] = [Outcome::LOSS, Outcome::DRAW, Outcome::WIN];

    pub fn new(value: i8) -> Option<Outcome> {
        match value {
            -1..=1 => Some(Outcome(value)),
            _ => None,
        }
    }

    /// The sign of an integer as an outcome.
    pub fn from_sign(value: i64) -> Outcome {
        Outcome(value.signum() as i8)
    }

    pub fn value(self) -> i8 {
        self.0
    }

    pub fn negate(self) -> Outcome {
        Outcome(-self.0)
    }

    /// Canonical file spelling: `+1`, `0` or `-1`.
    pub fn token(self) -> &'static str {
        match self.0 {
            1 => "+1",
            0 => "0",
            _ => "-1",
        }
    }

    fn parse_token(token: &str) -> Option<Outcome> {
        match token {
            "w" | "+1" | "1" => Some(Outcome::WIN),
            "d" | "0" | "+0" | "-0" => Some(Outcome::DRAW),
            "l" | "-1" => Some(Outcome::LOSS),
            _ => None,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Which player a strategy belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Player 1, choosing rows.
    Row,
    /// Player 2, choosing columns.
    Col,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Row => Side::Col,
            Side::Col => Side::Row,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Row => "row",
            Side::Col => "col",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("{side} index {index} out of range 1..={len}")]
    Index { side: Side, index: usize, len: usize },
}

fn parse_err(line: usize, message: impl Into<String>) -> GameError {
    GameError::Parse {
        line,
        message: message.into(),
    }
}

/// An `n' x n''` payoff table over {-1, 0, +1}, immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameTable {
    name: String,
    rows: usize,
    cols: usize,
    entries: Vec<Outcome>,
    labels_rows: Option<Vec<String>>,
    labels_cols: Option<Vec<String>>,
    symmetric: bool,
}

impl GameTable {
    /// Builds a table from row-major entries. When `symmetric` is set the
    /// entries must be antisymmetric.
    pub fn new(
        name: impl Into<String>,
        rows: usize,
        cols: usize,
        entries: Vec<Outcome>,
        symmetric: bool,
    ) -> Result<GameTable, GameError> {
        let name = name.into();
        if !is_token(&name) {
            return Err(GameError::Invariant(format!("invalid game name {name:?}")));
        }
        if rows == 0 || cols == 0 {
            return Err(GameError::Invariant("a game needs at least one strategy per side".into()));
        }
        if rows > MAX_STRATEGIES || cols > MAX_STRATEGIES {
            return Err(GameError::Invariant(format!(
                "at most {MAX_STRATEGIES} strategies per side are supported"
            )));
        }
        if entries.len() != rows * cols {
            return Err(GameError::Invariant(format!(
                "expected {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        let table = GameTable {
            name,
            rows,
            cols,
            entries,
            labels_rows: None,
            labels_cols: None,
            symmetric,
        };
        if symmetric && !table.is_symmetric() {
            return Err(GameError::Invariant(format!(
                "game {} is declared symmetric but its payoffs are not antisymmetric",
                table.name
            )));
        }
        Ok(table)
    }

    /// Builds a table from nested integer rows.
    pub fn from_rows(
        name: impl Into<String>,
        rows: &[Vec<i8>],
        symmetric: bool,
    ) -> Result<GameTable, GameError> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(n_rows * n_cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(GameError::Invariant(format!(
                    "row {} has {} entries, expected {n_cols}",
                    i + 1,
                    row.len()
                )));
            }
            for &v in row {
                entries.push(
                    Outcome::new(v)
                        .ok_or_else(|| GameError::Invariant(format!("payoff {v} is not in {{-1, 0, +1}}")))?,
                );
            }
        }
        GameTable::new(name, n_rows, n_cols, entries, symmetric)
    }

    pub fn with_labels(
        mut self,
        rows: Option<Vec<String>>,
        cols: Option<Vec<String>>,
    ) -> Result<GameTable, GameError> {
        if let Some(labels) = &rows {
            check_labels(labels, self.rows, "labels_rows")?;
        }
        if let Some(labels) = &cols {
            check_labels(labels, self.cols, "labels_cols")?;
        }
        self.labels_rows = rows;
        self.labels_cols = cols;
        Ok(self)
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Result<GameTable, GameError> {
        let name = name.into();
        if !is_token(&name) {
            return Err(GameError::Invariant(format!("invalid game name {name:?}")));
        }
        self.name = name;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn strategies(&self, side: Side) -> usize {
        match side {
            Side::Row => self.rows,
            Side::Col => self.cols,
        }
    }

    /// Whether the table was declared (and verified) symmetric.
    pub fn symmetric_flag(&self) -> bool {
        self.symmetric
    }

    pub fn labels(&self, side: Side) -> Option<&[String]> {
        match side {
            Side::Row => self.labels_rows.as_deref(),
            Side::Col => self.labels_cols.as_deref(),
        }
    }

    /// Display name of a 1-based strategy: its label if present, else the index.
    pub fn label(&self, side: Side, index: usize) -> String {
        self.labels(side)
            .and_then(|l| l.get(index.wrapping_sub(1)))
            .cloned()
            .unwrap_or_else(|| index.to_string())
    }

    /// Looks a strategy up by label or by its 1-based number.
    pub fn strategy_index(&self, side: Side, name: &str) -> Option<usize> {
        if let Some(pos) = self.labels(side).and_then(|l| l.iter().position(|x| x == name)) {
            return Some(pos + 1);
        }
        name.parse::<usize>()
            .ok()
            .filter(|&i| i >= 1 && i <= self.strategies(side))
    }

    /// Payoff to player 1 when row `i` meets column `j` (both 1-based).
    pub fn outcome(&self, i: usize, j: usize) -> Result<Outcome, GameError> {
        self.check_index(Side::Row, i)?;
        self.check_index(Side::Col, j)?;
        Ok(self.at(i - 1, j - 1))
    }

    pub fn check_index(&self, side: Side, index: usize) -> Result<(), GameError> {
        let len = self.strategies(side);
        if index == 0 || index > len {
            return Err(GameError::Index { side, index, len });
        }
        Ok(())
    }

    /// Zero-based unchecked-by-contract lookup used by the solvers.
    #[inline]
    pub(crate) fn at(&self, i: usize, j: usize) -> Outcome {
        self.entries[i * self.cols + j]
    }

    pub(crate) fn row_slice(&self, i: usize) -> &[Outcome] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Outcome] {
        &self.entries
    }

    /// True iff the table is square and `C[i][j] = -C[j][i]` everywhere.
    pub fn is_symmetric(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        (0..self.rows).all(|i| (i..self.cols).all(|j| self.at(i, j) == self.at(j, i).negate()))
    }

    /// The same pairings scored for player 2: every payoff negated.
    pub fn role_swapped(&self) -> GameTable {
        GameTable {
            name: format!("{}_swapped", self.name),
            entries: self.entries.iter().map(|o| o.negate()).collect(),
            ..self.clone()
        }
    }

    /// Canonical game-file text.
    pub fn to_canonical(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("game {}\n", self.name));
        out.push_str(&format!("symmetric {}\n", self.symmetric));
        out.push_str(&format!("rows {} cols {}\n", self.rows, self.cols));
        if let Some(labels) = &self.labels_rows {
            out.push_str(&format!("labels_rows {}\n", labels.join(" ")));
        }
        if let Some(labels) = &self.labels_cols {
            out.push_str(&format!("labels_cols {}\n", labels.join(" ")));
        }
        for i in 0..self.rows {
            let row: Vec<&str> = self.row_slice(i).iter().map(|o| o.token()).collect();
            out.push_str(&format!("row {}: {}\n", i + 1, row.join(" ")));
        }
        out
    }
}

fn is_token(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(|c| c.is_whitespace() || c == '#')
}

fn check_labels(labels: &[String], expected: usize, what: &str) -> Result<(), GameError> {
    if labels.len() != expected {
        return Err(GameError::Invariant(format!(
            "{what} has {} labels, expected {expected}",
            labels.len()
        )));
    }
    if let Some(bad) = labels.iter().find(|l| !is_token(l)) {
        return Err(GameError::Invariant(format!("invalid label {bad:?}")));
    }
    Ok(())
}

/// Parses the line-oriented game file format.
pub fn parse_game(text: &str) -> Result<GameTable, GameError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .peekable();

    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| parse_err(text.lines().count(), format!("unexpected end of file, expected {what}")))
    };

    let (n, line) = next("`game <name>`")?;
    let name = match line.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["game", name] => name.to_string(),
        _ => return Err(parse_err(n, "expected `game <name>`")),
    };

    let (n, line) = next("`symmetric <true|false>`")?;
    let symmetric = match line.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["symmetric", "true"] => true,
        ["symmetric", "false"] => false,
        _ => return Err(parse_err(n, "expected `symmetric true` or `symmetric false`")),
    };

    let (n, line) = next("`rows <n> cols <m>`")?;
    let (rows, cols) = match line.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["rows", r, "cols", c] => {
            let r: usize = r.parse().map_err(|_| parse_err(n, format!("bad row count {r:?}")))?;
            let c: usize = c.parse().map_err(|_| parse_err(n, format!("bad column count {c:?}")))?;
            (r, c)
        }
        _ => return Err(parse_err(n, "expected `rows <n> cols <m>`")),
    };
    if rows == 0 || cols == 0 || rows > MAX_STRATEGIES || cols > MAX_STRATEGIES {
        return Err(parse_err(n, format!("shape {rows}x{cols} outside 1..={MAX_STRATEGIES}")));
    }

    let mut labels_rows = None;
    let mut labels_cols = None;
    let mut entries = Vec::with_capacity(rows * cols);
    let mut expected_row = 1;
    let mut last_line = n;
    for (n, line) in lines {
        last_line = n;
        let mut tokens = line.split_whitespace();
        let head = tokens.next().unwrap_or_default();
        match head {
            "labels_rows" if expected_row == 1 && labels_rows.is_none() && labels_cols.is_none() => {
                labels_rows = Some(read_labels(n, head, tokens, rows)?);
            }
            "labels_cols" if expected_row == 1 && labels_cols.is_none() => {
                labels_cols = Some(read_labels(n, head, tokens, cols)?);
            }
            "row" => {
                let index = tokens
                    .next()
                    .and_then(|t| t.strip_suffix(':'))
                    .and_then(|t| t.parse::<usize>().ok())
                    .ok_or_else(|| parse_err(n, "expected `row <i>: <entries>`"))?;
                if index != expected_row {
                    return Err(parse_err(n, format!("expected row {expected_row}, found row {index}")));
                }
                let before = entries.len();
                for token in tokens {
                    let outcome = Outcome::parse_token(token).ok_or_else(|| {
                        parse_err(n, format!("bad entry {token:?}; expected -1, 0, +1, l, d or w"))
                    })?;
                    entries.push(outcome);
                }
                if entries.len() - before != cols {
                    return Err(parse_err(
                        n,
                        format!("row {index} has {} entries, expected {cols}", entries.len() - before),
                    ));
                }
                expected_row += 1;
                if expected_row > rows + 1 {
                    return Err(parse_err(n, format!("more than {rows} rows")));
                }
            }
            _ => return Err(parse_err(n, format!("unexpected line {line:?}"))),
        }
    }
    if expected_row != rows + 1 {
        return Err(parse_err(last_line, format!("expected {rows} rows, found {}", expected_row - 1)));
    }

    GameTable::new(name, rows, cols, entries, symmetric)?.with_labels(labels_rows, labels_cols)
}

fn read_labels<'a>(
    line: usize,
    head: &str,
    tokens: impl Iterator<Item = &'a str>,
    expected: usize,
) -> Result<Vec<String>, GameError> {
    let labels: Vec<String> = tokens.map(str::to_string).collect();
    if labels.len() != expected {
        return Err(parse_err(line, format!("{head} needs {expected} labels, got {}", labels.len())));
    }
    Ok(labels)
}

/// Number of distinct `rows x cols` win/draw/loss tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameCount {
    pub rows: usize,
    pub cols: usize,
    /// The count, when it fits in a `u128`.
    pub count: Option<u128>,
    /// Whether every table was generated and counted.
    pub enumerated: bool,
}

impl GameCount {
    pub fn exponent(&self) -> usize {
        self.rows * self.cols
    }
}

impl fmt::Display for GameCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.count {
            Some(c) => write!(f, "count={c}"),
            None => write!(f, "count=3^{}", self.exponent()),
        }
    }
}

/// Counts the distinct payoff tables of a given shape. Shapes with at most
/// [`ENUMERATION_LIMIT`] cells are enumerated table by table; larger shapes
/// get the closed form `3^(rows*cols)`.
pub fn enumerate_game_count(rows: usize, cols: usize) -> GameCount {
    let cells = rows * cols;
    if cells > ENUMERATION_LIMIT {
        return GameCount {
            rows,
            cols,
            count: u32::try_from(cells).ok().and_then(|e| 3u128.checked_pow(e)),
            enumerated: false,
        };
    }

    let mut seen: HashSet<Vec<Outcome>> = HashSet::new();
    let mut table = vec![Outcome::LOSS; cells];
    loop {
        seen.insert(table.clone());
        // odometer over {-1, 0, +1}^cells
        let mut pos = 0;
        loop {
            if pos == cells {
                return GameCount {
                    rows,
                    cols,
                    count: Some(seen.len() as u128),
                    enumerated: true,
                };
            }
            let v = table[pos].value();
            if v < 1 {
                table[pos] = Outcome(v + 1);
                break;
            }
            table[pos] = Outcome::LOSS;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const RPS: &str = "game rps\nsymmetric true\nrows 3 cols 3\nlabels_rows R P S\nlabels_cols R P S\nrow 1: 0 -1 +1\nrow 2: +1 0 -1\nrow 3: -1 +1 0\n";

    #[test]
    fn parses_rps() {
        let g = parse_game(RPS).unwrap();
        assert_eq!(g.name(), "rps");
        assert!(g.symmetric_flag());
        assert_eq!(g.outcome(1, 1).unwrap(), Outcome::DRAW);
        assert_eq!(g.outcome(1, 2).unwrap(), Outcome::LOSS);
        assert_eq!(g.label(Side::Col, 2), "P");
        assert_eq!(g.to_canonical(), RPS);
    }

    #[test]
    fn aliases_and_comments() {
        let text = "# a comment\ngame t # trailing\nsymmetric false\nrows 1 cols 3\nrow 1: w d l\n";
        let g = parse_game(text).unwrap();
        assert_eq!(g.entries(), &[Outcome::WIN, Outcome::DRAW, Outcome::LOSS]);
        assert_eq!(g.to_canonical(), "game t\nsymmetric false\nrows 1 cols 3\nrow 1: +1 0 -1\n");
    }

    #[test]
    fn single_cell_is_symmetric() {
        let g = parse_game("game one\nsymmetric true\nrows 1 cols 1\nrow 1: 0\n").unwrap();
        assert!(g.is_symmetric());
        assert!(parse_game("game one\nsymmetric true\nrows 1 cols 1\nrow 1: +1\n").is_err());
    }

    #[test]
    fn rejects_bad_input() {
        let bad_entry = "game g\nsymmetric false\nrows 1 cols 2\nrow 1: 0 2\n";
        assert!(matches!(parse_game(bad_entry), Err(GameError::Parse { line: 4, .. })));
        let short_row = "game g\nsymmetric false\nrows 1 cols 2\nrow 1: 0\n";
        assert!(matches!(parse_game(short_row), Err(GameError::Parse { line: 4, .. })));
        let missing_row = "game g\nsymmetric false\nrows 2 cols 1\nrow 1: 0\n";
        assert!(matches!(parse_game(missing_row), Err(GameError::Parse { .. })));
        let not_anti = "game g\nsymmetric true\nrows 2 cols 2\nrow 1: 0 +1\nrow 2: +1 0\n";
        assert!(matches!(parse_game(not_anti), Err(GameError::Invariant(_))));
        assert!(matches!(parse_game(""), Err(GameError::Parse { .. })));
    }

    #[test]
    fn symmetry_checks() {
        let wide = GameTable::from_rows("w", &[vec![1, 0]], false).unwrap();
        assert!(!wide.is_symmetric());
        let bad = GameTable::from_rows("b", &[vec![0, 1], vec![1, 0]], false).unwrap();
        assert!(!bad.is_symmetric());
    }

    #[test]
    fn outcome_index_errors() {
        let g = parse_game(RPS).unwrap();
        assert!(matches!(g.outcome(0, 1), Err(GameError::Index { side: Side::Row, .. })));
        assert!(matches!(g.outcome(1, 4), Err(GameError::Index { side: Side::Col, .. })));
    }

    #[test]
    fn enumeration_small_shapes() {
        assert_eq!(enumerate_game_count(1, 1).count, Some(3));
        assert_eq!(enumerate_game_count(1, 2).count, Some(9));
        let c = enumerate_game_count(2, 2);
        assert!(c.enumerated);
        assert_eq!(c.count, Some(81));
        assert_eq!(c.to_string(), "count=81");
    }

    #[test]
    fn enumeration_closed_form() {
        let c = enumerate_game_count(4, 4);
        assert!(!c.enumerated);
        assert_eq!(c.count, Some(43_046_721));
        let huge = enumerate_game_count(100, 100);
        assert_eq!(huge.count, None);
        assert_eq!(huge.to_string(), "count=3^10000");
    }
}
