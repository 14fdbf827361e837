//! Multi-game series folded into one overall payoff table.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::game::{GameError, GameTable, Outcome, Side};

/// How the per-game outcomes of one pairing combine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Aggregator {
    /// Sign of the summed payoffs.
    SumSign,
    /// Sign of wins minus losses. With payoffs restricted to {-1, 0, +1}
    /// this always agrees with [`Aggregator::SumSign`].
    Majority,
    /// The first game that is not a draw decides.
    Lexicographic,
}

impl Aggregator {
    pub fn as_str(self) -> &'static str {
        match self {
            Aggregator::SumSign => "sum",
            Aggregator::Majority => "majority",
            Aggregator::Lexicographic => "lex",
        }
    }

    fn combine(self, outcomes: impl Iterator<Item = Outcome>) -> Outcome {
        match self {
            Aggregator::SumSign => Outcome::from_sign(outcomes.map(|o| o.value() as i64).sum()),
            Aggregator::Majority => {
                let (mut wins, mut losses) = (0i64, 0i64);
                for o in outcomes {
                    match o.value() {
                        1 => wins += 1,
                        -1 => losses += 1,
                        _ => {}
                    }
                }
                Outcome::from_sign(wins - losses)
            }
            Aggregator::Lexicographic => outcomes.into_iter().find(|o| o.value() != 0).unwrap_or(Outcome::DRAW),
        }
    }
}

impl fmt::Display for Aggregator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("a series needs at least one game")]
    Empty,
    #[error("game {name} is {rows}x{cols}, expected {want_rows}x{want_cols}")]
    ShapeMismatch {
        name: String,
        rows: usize,
        cols: usize,
        want_rows: usize,
        want_cols: usize,
    },
    #[error("unknown aggregator {0:?}; expected sum, majority or lex")]
    UnknownAggregator(String),
    #[error(transparent)]
    Game(#[from] GameError),
}

impl FromStr for Aggregator {
    type Err = SeriesError;

    fn from_str(s: &str) -> Result<Aggregator, SeriesError> {
        match s {
            "sum" => Ok(Aggregator::SumSign),
            "majority" => Ok(Aggregator::Majority),
            "lex" => Ok(Aggregator::Lexicographic),
            _ => Err(SeriesError::UnknownAggregator(s.to_string())),
        }
    }
}

/// Overall table of playing every game in `games` with the same pair of
/// strategies. The result is declared symmetric when every input is and
/// the combined payoffs are antisymmetric.
pub fn compose_series(games: &[GameTable], agg: Aggregator) -> Result<GameTable, SeriesError> {
    let first = games.first().ok_or(SeriesError::Empty)?;
    let (rows, cols) = (first.rows(), first.cols());
    if let Some(bad) = games.iter().find(|g| (g.rows(), g.cols()) != (rows, cols)) {
        return Err(SeriesError::ShapeMismatch {
            name: bad.name().to_string(),
            rows: bad.rows(),
            cols: bad.cols(),
            want_rows: rows,
            want_cols: cols,
        });
    }
    let entries: Vec<Outcome> = (0..rows * cols)
        .map(|cell| agg.combine(games.iter().map(|g| g.entries()[cell])))
        .collect();
    let name = if games.len() == 1 {
        first.name().to_string()
    } else {
        format!("series_{agg}_{}", games.len())
    };
    let plain = GameTable::new(name.clone(), rows, cols, entries.clone(), false)?;
    let symmetric = games.iter().all(GameTable::symmetric_flag) && plain.is_symmetric();
    let labels = |side| first.labels(side).map(<[String]>::to_vec);
    Ok(GameTable::new(name, rows, cols, entries, symmetric)?.with_labels(labels(Side::Row), labels(Side::Col))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled::{dice, rps};
    use proptest::prelude::*;

    #[test]
    fn mirror_cancels() {
        let g = rps();
        let out = compose_series(&[g.clone(), g.role_swapped()], Aggregator::SumSign).unwrap();
        assert!(out.entries().iter().all(|o| o.value() == 0));
        assert!(out.symmetric_flag());
        assert_eq!(compose_series(&[g.clone(), g.clone()], Aggregator::SumSign).unwrap().entries(), g.entries());
    }

    #[test]
    fn lexicographic_first_decisive_game() {
        let rows: Vec<Vec<i8>> = (1..=3)
            .map(|i: i8| (1..=3).map(|j: i8| (i - j).signum()).collect())
            .collect();
        let small_dice = GameTable::from_rows("d3", &rows, true).unwrap();
        let out = compose_series(&[rps(), small_dice.clone()], Aggregator::Lexicographic).unwrap();
        assert_eq!(out.outcome(1, 2).unwrap().value(), -1);
        assert_eq!(out.outcome(1, 1).unwrap().value(), 0);
        let out = compose_series(&[small_dice, rps()], Aggregator::Lexicographic).unwrap();
        assert_eq!(out.outcome(1, 3).unwrap().value(), -1);
    }

    #[test]
    fn shapes_must_agree() {
        assert!(matches!(
            compose_series(&[rps(), dice()], Aggregator::SumSign),
            Err(SeriesError::ShapeMismatch { .. })
        ));
        assert_eq!(compose_series(&[], Aggregator::SumSign), Err(SeriesError::Empty));
    }

    fn table(n: usize) -> impl Strategy<Value = GameTable> {
        proptest::collection::vec(-1i8..=1, n * n).prop_map(move |v| {
            let mut rows = vec![vec![0i8; n]; n];
            for i in 0..n {
                for j in 0..i {
                    rows[i][j] = v[i * n + j];
                    rows[j][i] = -v[i * n + j];
                }
            }
            GameTable::from_rows("t", &rows, true).unwrap()
        })
    }

    proptest! {
        #[test]
        fn closure(games in (2usize..5).prop_flat_map(|n| proptest::collection::vec(table(n), 1..5))) {
            for agg in [Aggregator::SumSign, Aggregator::Majority, Aggregator::Lexicographic] {
                let out = compose_series(&games, agg).unwrap();
                prop_assert!(out.symmetric_flag());
                if games.len() == 1 {
                    prop_assert_eq!(out.entries(), games[0].entries());
                }
            }
            prop_assert_eq!(
                compose_series(&games, Aggregator::SumSign).unwrap().entries().to_vec(),
                compose_series(&games, Aggregator::Majority).unwrap().entries().to_vec()
            );
        }
    }
}
