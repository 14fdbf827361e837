//! Approximate equilibria in mixed strategies by fictitious play.
//!
//! Quality is certified by exploitability: how much each side could gain by
//! switching to its best pure strategy against the other's mixture.

use std::fmt;

use thiserror::Error;

use crate::game::GameTable;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MixedError {
    #[error("mixture of length {got} does not fit {want} strategies")]
    ShapeMismatch { got: usize, want: usize },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
}

/// A probability distribution over one side's strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedStrategy(Vec<f64>);

impl MixedStrategy {
    /// Checks non-negativity and that the weights sum to 1 within 1e-9.
    pub fn new(probs: Vec<f64>) -> Result<MixedStrategy, MixedError> {
        let sum: f64 = probs.iter().sum();
        if probs.is_empty() || probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(MixedError::BadParameter(format!("{probs:?} is not a distribution")));
        }
        Ok(MixedStrategy(probs))
    }

    pub fn pure(n: usize, k: usize) -> MixedStrategy {
        let mut probs = vec![0.0; n];
        probs[k - 1] = 1.0;
        MixedStrategy(probs)
    }

    pub fn uniform(n: usize) -> MixedStrategy {
        MixedStrategy(vec![1.0 / n as f64; n])
    }

    fn from_counts(counts: &[u64], total: u64) -> MixedStrategy {
        MixedStrategy(counts.iter().map(|&c| c as f64 / total as f64).collect())
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }
}

/// Comma-separated probabilities with six decimals.
impl fmt::Display for MixedStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| format!("{p:.6}")).collect();
        f.write_str(&parts.join(","))
    }
}

/// Expected payoff to player 1 of each pure row against `col`, and of each
/// pure column against `row`.
fn payoff_vectors(table: &GameTable, row: &[f64], col: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (n, m) = (table.rows(), table.cols());
    let mut by_row = vec![0.0; n];
    let mut by_col = vec![0.0; m];
    for i in 0..n {
        for j in 0..m {
            let c = table.at(i, j).value() as f64;
            by_row[i] += c * col[j];
            by_col[j] += c * row[i];
        }
    }
    (by_row, by_col)
}

fn check(table: &GameTable, m1: &MixedStrategy, m2: &MixedStrategy) -> Result<(), MixedError> {
    for (m, want) in [(m1, table.rows()), (m2, table.cols())] {
        if m.0.len() != want {
            return Err(MixedError::ShapeMismatch { got: m.0.len(), want });
        }
    }
    Ok(())
}

/// Best pure row payoff against `m2` minus the worst pure column payoff
/// against `m1`; zero exactly at an equilibrium.
pub fn exploitability(table: &GameTable, m1: &MixedStrategy, m2: &MixedStrategy) -> Result<f64, MixedError> {
    check(table, m1, m2)?;
    let (by_row, by_col) = payoff_vectors(table, &m1.0, &m2.0);
    Ok(gap(&by_row, &by_col))
}

fn gap(by_row: &[f64], by_col: &[f64]) -> f64 {
    let best = by_row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let worst = by_col.iter().copied().fold(f64::INFINITY, f64::min);
    (best - worst).max(0.0)
}

/// Expected payoff to player 1.
pub fn expected_payoff(table: &GameTable, m1: &MixedStrategy, m2: &MixedStrategy) -> Result<f64, MixedError> {
    check(table, m1, m2)?;
    let (by_row, _) = payoff_vectors(table, &m1.0, &m2.0);
    Ok(by_row.iter().zip(&m1.0).map(|(v, p)| v * p).sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixedSolution {
    pub row: MixedStrategy,
    pub col: MixedStrategy,
    /// Expected payoff of `row` against `col`.
    pub value: f64,
    pub exploitability: f64,
    /// Rounds of play behind the returned mixtures.
    pub iterations: u64,
    /// Whether `exploitability <= tol`; otherwise these are the least
    /// exploitable mixtures seen.
    pub converged: bool,
}

impl MixedSolution {
    /// `p1=<...> p2=<...> value=<v> exploitability=<e>`.
    pub fn report_line(&self) -> String {
        format!(
            "p1={} p2={} value={:.6} exploitability={:.6}",
            self.row, self.col, self.value, self.exploitability
        )
    }
}

fn argmax_first(v: &[i64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Simultaneous fictitious play from the first strategy of each side: every
/// round both sides best-respond (lowest index on ties) to the opponent's
/// empirical mixture so far. Stops as soon as the empirical mixtures are
/// within `tol` of an equilibrium, or after `iters` rounds.
pub fn fictitious_play(table: &GameTable, iters: u64, tol: f64) -> Result<MixedSolution, MixedError> {
    if iters == 0 {
        return Err(MixedError::BadParameter("iters must be at least 1".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(MixedError::BadParameter("tol must be positive".into()));
    }
    let (n, m) = (table.rows(), table.cols());
    let mut counts1 = vec![0u64; n];
    let mut counts2 = vec![0u64; m];
    // integer payoff sums against the opponent's counts
    let mut row_sums = vec![0i64; n];
    let mut col_sums = vec![0i64; m];
    let (mut r, mut c) = (0, 0);
    let mut best: Option<(f64, u64, Vec<u64>, Vec<u64>)> = None;

    for t in 1..=iters {
        counts1[r] += 1;
        counts2[c] += 1;
        for (i, sum) in row_sums.iter_mut().enumerate() {
            *sum += table.at(i, c).value() as i64;
        }
        for (j, o) in table.row_slice(r).iter().enumerate() {
            col_sums[j] += o.value() as i64;
        }
        let hi = *row_sums.iter().max().expect("non-empty") as f64;
        let lo = *col_sums.iter().min().expect("non-empty") as f64;
        let e = ((hi - lo) / t as f64).max(0.0);
        if best.as_ref().is_none_or(|b| e < b.0) {
            best = Some((e, t, counts1.clone(), counts2.clone()));
        }
        if e <= tol {
            break;
        }
        r = argmax_first(&row_sums);
        c = argmax_first(&col_sums.iter().map(|v| -v).collect::<Vec<_>>());
    }

    let (e, t, c1, c2) = best.expect("at least one round");
    let row = MixedStrategy::from_counts(&c1, t);
    let col = MixedStrategy::from_counts(&c2, t);
    let value = expected_payoff(table, &row, &col)?;
    Ok(MixedSolution {
        row,
        col,
        value,
        exploitability: e,
        iterations: t,
        converged: e <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled::{dice, rps};
    use proptest::prelude::*;

    #[test]
    fn exploitability_examples() {
        let g = rps();
        let u = MixedStrategy::uniform(3);
        assert!(exploitability(&g, &u, &u).unwrap().abs() < 1e-12);
        let r = MixedStrategy::pure(3, 1);
        assert!((exploitability(&g, &r, &u).unwrap() - 1.0).abs() < 1e-12);
        let d = dice();
        let six = MixedStrategy::pure(6, 6);
        assert_eq!(exploitability(&d, &six, &six).unwrap(), 0.0);
        assert!(exploitability(&d, &u, &six).is_err());
    }

    #[test]
    fn rps_converges_to_uniform() {
        let s = fictitious_play(&rps(), 100_000, 1e-2).unwrap();
        assert!(s.converged, "{s:?}");
        assert!(s.value.abs() <= 1e-2);
        for p in s.row.probs().iter().chain(s.col.probs()) {
            assert!((p - 1.0 / 3.0).abs() <= 0.01, "{s:?}");
        }
    }

    #[test]
    fn dice_concentrates_on_six() {
        let s = fictitious_play(&dice(), 100_000, 1e-2).unwrap();
        assert!(s.converged);
        assert!(s.row.probs()[5] >= 0.99, "{s:?}");
        assert!(s.value.abs() <= 1e-2);
    }

    #[test]
    fn single_cell() {
        let g = GameTable::from_rows("one", &[vec![1]], false).unwrap();
        let s = fictitious_play(&g, 10, 1e-3).unwrap();
        assert_eq!((s.row.probs(), s.col.probs(), s.value), (&[1.0][..], &[1.0][..], 1.0));
        assert!(fictitious_play(&g, 0, 1e-3).is_err());
        assert!(fictitious_play(&g, 1, 0.0).is_err());
    }

    fn game() -> impl Strategy<Value = GameTable> {
        (1usize..5, 1usize..5).prop_flat_map(|(n, m)| {
            proptest::collection::vec(-1i8..=1, n * m).prop_map(move |v| {
                let rows: Vec<Vec<i8>> = v.chunks(m).map(<[i8]>::to_vec).collect();
                GameTable::from_rows("g", &rows, false).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn outputs_are_distributions(g in game(), iters in 1u64..300) {
            let s = fictitious_play(&g, iters, 1e-3).unwrap();
            for m in [&s.row, &s.col] {
                prop_assert!(MixedStrategy::new(m.probs().to_vec()).is_ok());
            }
            prop_assert!(s.exploitability >= 0.0);
            let e = exploitability(&g, &s.row, &s.col).unwrap();
            prop_assert!((e - s.exploitability).abs() < 1e-9);
        }
    }
}
