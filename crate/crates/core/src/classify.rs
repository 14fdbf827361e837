//! Game classes: transitive domination versus strong intransitivity, plus
//! best responses, pure equilibria and dominance cycles.

use std::fmt;

use thiserror::Error;

use crate::game::{GameError, GameTable, Outcome, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassKind {
    StrictDomination,
    WeakDomination,
    StronglyIntransitive,
    Other,
}

impl ClassKind {
    pub const ALL: [ClassKind; 4] = [
        ClassKind::StrictDomination,
        ClassKind::WeakDomination,
        ClassKind::StronglyIntransitive,
        ClassKind::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassKind::StrictDomination => "StrictDomination",
            ClassKind::WeakDomination => "WeakDomination",
            ClassKind::StronglyIntransitive => "StronglyIntransitive",
            ClassKind::Other => "Other",
        }
    }

    pub fn parse(s: &str) -> Option<ClassKind> {
        ClassKind::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

impl fmt::Display for ClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Beating answers for every strategy of both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witnesses {
    /// For each row `i` (index `i - 1`), the lowest column that beats it.
    pub col_answers: Vec<usize>,
    /// For each column `j`, the lowest row that beats it.
    pub row_answers: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    /// Row `dominator` beats every column.
    StrictDomination { dominator: usize },
    /// Row `dominator` beats or draws every column, and no row beats all.
    WeakDomination { dominator: usize },
    StronglyIntransitive(Witnesses),
    Other,
}

impl Classification {
    pub fn kind(&self) -> ClassKind {
        match self {
            Classification::StrictDomination { .. } => ClassKind::StrictDomination,
            Classification::WeakDomination { .. } => ClassKind::WeakDomination,
            Classification::StronglyIntransitive(_) => ClassKind::StronglyIntransitive,
            Classification::Other => ClassKind::Other,
        }
    }

    pub fn dominator(&self) -> Option<usize> {
        match self {
            Classification::StrictDomination { dominator }
            | Classification::WeakDomination { dominator } => Some(*dominator),
            _ => None,
        }
    }

    /// Stable line-oriented report.
    pub fn report(&self, table: &GameTable) -> String {
        let mut out = format!("classification={}\n", self.kind());
        match self.dominator() {
            Some(d) => out.push_str(&format!("dominator={}\n", table.label(Side::Row, d))),
            None => out.push_str("dominator=none\n"),
        }
        if let Classification::StronglyIntransitive(w) = self {
            for (i, &j) in w.col_answers.iter().enumerate() {
                out.push_str(&format!(
                    "witness col {} -> {}\n",
                    table.label(Side::Row, i + 1),
                    table.label(Side::Col, j)
                ));
            }
            for (j, &i) in w.row_answers.iter().enumerate() {
                out.push_str(&format!(
                    "witness row {} -> {}\n",
                    table.label(Side::Col, j + 1),
                    table.label(Side::Row, i)
                ));
            }
        }
        out
    }
}

/// A cell that is both the maximum of its column and the minimum of its row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NashCell {
    pub i: usize,
    pub j: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("game {0} is not symmetric")]
    NotSymmetric(String),
    #[error("cycle length must be 3, 4 or 5, got {0}")]
    BadCycleLength(usize),
}

/// Lowest row that beats every column (`strict`) or never loses (otherwise).
pub fn find_dominator(table: &GameTable, strict: bool) -> Option<usize> {
    let floor = if strict { Outcome::WIN } else { Outcome::DRAW };
    (0..table.rows())
        .find(|&i| table.row_slice(i).iter().all(|&o| o >= floor))
        .map(|i| i + 1)
}

/// Witness maps when every strategy of each side is strictly beaten by some
/// opposing strategy; `None` otherwise.
pub fn is_strongly_intransitive(table: &GameTable) -> Option<Witnesses> {
    let col_answers = (0..table.rows())
        .map(|i| (0..table.cols()).find(|&j| table.at(i, j) == Outcome::LOSS).map(|j| j + 1))
        .collect::<Option<Vec<_>>>()?;
    let row_answers = (0..table.cols())
        .map(|j| (0..table.rows()).find(|&i| table.at(i, j) == Outcome::WIN).map(|i| i + 1))
        .collect::<Option<Vec<_>>>()?;
    Some(Witnesses {
        col_answers,
        row_answers,
    })
}

/// All pure saddle points in lexicographic order.
pub fn pure_nash(table: &GameTable) -> Vec<NashCell> {
    let col_max: Vec<Outcome> = (0..table.cols())
        .map(|j| (0..table.rows()).map(|i| table.at(i, j)).max().unwrap_or(Outcome::LOSS))
        .collect();
    let mut cells = Vec::new();
    for i in 0..table.rows() {
        let row = table.row_slice(i);
        let row_min = row.iter().copied().min().unwrap_or(Outcome::WIN);
        for (j, &o) in row.iter().enumerate() {
            if o == row_min && o == col_max[j] {
                cells.push(NashCell { i: i + 1, j: j + 1 });
            }
        }
    }
    cells
}

/// Strict domination first, then weak domination (symmetric games only),
/// then strong intransitivity.
///
/// A row that merely never loses guarantees a pure equilibrium only when the
/// game is symmetric: there its diagonal cell is a saddle point. In general
/// tables such a row can coexist with a value strictly between 0 and 1
/// (`[[0, +1], [+1, 0]]`), so those are left as `Other`.
pub fn classify(table: &GameTable) -> Classification {
    let weak = || table.is_symmetric().then(|| find_dominator(table, false)).flatten();
    if let Some(dominator) = find_dominator(table, true) {
        Classification::StrictDomination { dominator }
    } else if let Some(dominator) = weak() {
        Classification::WeakDomination { dominator }
    } else if let Some(w) = is_strongly_intransitive(table) {
        Classification::StronglyIntransitive(w)
    } else {
        Classification::Other
    }
}

/// Best answer on `side` to the opposing strategy `opponent` (1-based).
///
/// Rows maximise and columns minimise the payoff to player 1; ties go to
/// the lowest index, so a win is preferred, then a draw, then a loss.
pub fn best_response(table: &GameTable, side: Side, opponent: usize) -> Result<usize, GameError> {
    table.check_index(side.opposite(), opponent)?;
    let k = opponent - 1;
    let best = match side {
        Side::Row => first_best((0..table.rows()).map(|i| table.at(i, k).value())),
        Side::Col => first_best(table.row_slice(k).iter().map(|o| -o.value())),
    };
    Ok(best + 1)
}

fn first_best(scores: impl Iterator<Item = i8>) -> usize {
    let mut best = (0, i8::MIN);
    for (idx, s) in scores.enumerate() {
        if s > best.1 {
            best = (idx, s);
        }
    }
    best.0
}

/// Simple directed cycles of the dominance digraph (loser -> winner), each
/// starting at its smallest strategy, sorted. Indices are 1-based.
pub fn find_cycles(table: &GameTable, max_len: usize) -> Result<Vec<Vec<usize>>, ClassifyError> {
    if !(3..=5).contains(&max_len) {
        return Err(ClassifyError::BadCycleLength(max_len));
    }
    if !table.is_symmetric() {
        return Err(ClassifyError::NotSymmetric(table.name().to_string()));
    }
    let n = table.rows();
    let beaten_by: Vec<Vec<usize>> = (0..n)
        .map(|a| (0..n).filter(|&b| table.at(b, a) == Outcome::WIN).collect())
        .collect();

    let mut cycles = Vec::new();
    let mut path = Vec::with_capacity(max_len);
    for start in 0..n {
        path.clear();
        path.push(start);
        extend(&beaten_by, start, max_len, &mut path, &mut cycles);
    }
    cycles.sort();
    Ok(cycles)
}

fn extend(
    edges: &[Vec<usize>],
    start: usize,
    max_len: usize,
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let last = *path.last().expect("path starts non-empty");
    for &next in &edges[last] {
        if next == start && path.len() >= 3 {
            out.push(path.iter().map(|v| v + 1).collect());
        } else if next > start && path.len() < max_len && !path.contains(&next) {
            path.push(next);
            extend(edges, start, max_len, path, out);
            path.pop();
        }
    }
}

/// `cycle: a -> b -> c -> a` report line.
pub fn cycle_line(table: &GameTable, cycle: &[usize]) -> String {
    let mut names: Vec<String> = cycle.iter().map(|&v| table.label(Side::Row, v)).collect();
    if let Some(first) = names.first().cloned() {
        names.push(first);
    }
    format!("cycle: {}", names.join(" -> "))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rps() -> GameTable {
        GameTable::from_rows("rps", &[vec![0, -1, 1], vec![1, 0, -1], vec![-1, 1, 0]], true).unwrap()
    }

    fn dice() -> GameTable {
        let rows: Vec<Vec<i8>> = (1..=6i8).map(|i| (1..=6i8).map(|j| (i - j).signum()).collect()).collect();
        GameTable::from_rows("dice", &rows, true).unwrap()
    }

    #[test]
    fn dominators() {
        assert_eq!(find_dominator(&dice(), true), None);
        assert_eq!(find_dominator(&dice(), false), Some(6));
        let one = GameTable::from_rows("one", &[vec![1]], false).unwrap();
        assert_eq!(find_dominator(&one, true), Some(1));
    }

    #[test]
    fn rps_witnesses() {
        let w = is_strongly_intransitive(&rps()).unwrap();
        // R -> P, P -> S, S -> R
        assert_eq!(w.col_answers, vec![2, 3, 1]);
        assert_eq!(w.row_answers, vec![2, 3, 1]);
        assert!(is_strongly_intransitive(&dice()).is_none());
        let zero = GameTable::from_rows("z", &[vec![0]], true).unwrap();
        assert!(is_strongly_intransitive(&zero).is_none());
    }

    #[test]
    fn nash_cells() {
        assert!(pure_nash(&rps()).is_empty());
        assert_eq!(pure_nash(&dice()), vec![NashCell { i: 6, j: 6 }]);
        let zero = GameTable::from_rows("z", &[vec![0]], true).unwrap();
        assert_eq!(pure_nash(&zero), vec![NashCell { i: 1, j: 1 }]);
    }

    #[test]
    fn classifications() {
        assert_eq!(classify(&rps()).kind(), ClassKind::StronglyIntransitive);
        assert_eq!(classify(&dice()), Classification::WeakDomination { dominator: 6 });
        let other = GameTable::from_rows("o", &[vec![0, -1], vec![-1, 0]], false).unwrap();
        assert_eq!(classify(&other), Classification::Other);
    }

    #[test]
    fn best_responses() {
        assert_eq!(best_response(&rps(), Side::Row, 1).unwrap(), 2);
        assert_eq!(best_response(&rps(), Side::Col, 1).unwrap(), 2);
        assert_eq!(best_response(&dice(), Side::Row, 3).unwrap(), 4);
        // column player facing die 3 wants the lowest die above 3
        assert_eq!(best_response(&dice(), Side::Col, 3).unwrap(), 4);
        let lose = GameTable::from_rows("l", &[vec![-1]], false).unwrap();
        assert_eq!(best_response(&lose, Side::Row, 1).unwrap(), 1);
        assert!(best_response(&rps(), Side::Row, 4).is_err());
        assert!(best_response(&rps(), Side::Row, 0).is_err());
    }

    #[test]
    fn best_response_falls_back_to_draw() {
        let g = GameTable::from_rows("g", &[vec![-1, 0], vec![0, -1], vec![0, 0]], false).unwrap();
        assert_eq!(best_response(&g, Side::Row, 1).unwrap(), 2);
        assert_eq!(best_response(&g, Side::Col, 3).unwrap(), 1);
    }

    #[test]
    fn cycles() {
        assert_eq!(find_cycles(&rps(), 3).unwrap(), vec![vec![1, 2, 3]]);
        assert!(find_cycles(&dice(), 5).unwrap().is_empty());
        let asym = GameTable::from_rows("a", &[vec![1, 0]], false).unwrap();
        assert!(matches!(find_cycles(&asym, 3), Err(ClassifyError::NotSymmetric(_))));
        assert!(matches!(find_cycles(&rps(), 6), Err(ClassifyError::BadCycleLength(6))));
        assert_eq!(cycle_line(&rps(), &[1, 2, 3]), "cycle: 1 -> 2 -> 3 -> 1");
    }

    #[test]
    fn report_lines() {
        let report = classify(&dice()).report(&dice());
        assert_eq!(report, "classification=WeakDomination\ndominator=6\n");
    }

    #[test]
    fn never_losing_row_without_saddle_is_other() {
        let g = GameTable::from_rows("g", &[vec![0, 1], vec![1, 0]], false).unwrap();
        assert_eq!(find_dominator(&g, false), Some(1));
        assert!(pure_nash(&g).is_empty());
        assert_eq!(classify(&g).kind(), ClassKind::Other);
    }
}
