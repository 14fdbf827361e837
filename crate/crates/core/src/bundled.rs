//! Example games, learners and cross-tables shipped with the crate.
//!
//! The files live at the workspace root so the command-line tool can read
//! them directly; they are compiled in here so tests and library users do
//! not depend on the working directory.

use crate::dsl::Learner;
use crate::game::{parse_game, GameTable};

pub const RPS: &str = include_str!("../../../games/rps.gm");
pub const DICE: &str = include_str!("../../../games/dice.gm");
pub const RPSLS: &str = include_str!("../../../games/rpsls.gm");
pub const PENNIES: &str = include_str!("../../../games/pennies.gm");
pub const FIRST_MOVER: &str = include_str!("../../../games/first_mover.gm");

pub const ENGINES_CSV: &str = include_str!("../../../crosstables/engines.csv");

/// `(file stem, text)` of every bundled learner, in file-name order.
pub const LEARNERS: [(&str, &str); 9] = [
    ("bounded_exploiter", include_str!("../../../learners/bounded_exploiter.lrn")),
    ("const_p", include_str!("../../../learners/const_p.lrn")),
    ("const_r", include_str!("../../../learners/const_r.lrn")),
    ("const_s", include_str!("../../../learners/const_s.lrn")),
    ("defiance", include_str!("../../../learners/defiance.lrn")),
    ("exploiter", include_str!("../../../learners/exploiter.lrn")),
    ("exploiter_of_exploiter", include_str!("../../../learners/exploiter_of_exploiter.lrn")),
    ("loop", include_str!("../../../learners/loop.lrn")),
    ("oracle_winner", include_str!("../../../learners/oracle_winner.lrn")),
];

/// `(file stem, text)` of every bundled game.
pub const GAMES: [(&str, &str); 5] = [
    ("rps", RPS),
    ("dice", DICE),
    ("rpsls", RPSLS),
    ("pennies", PENNIES),
    ("first_mover", FIRST_MOVER),
];

fn load(text: &str) -> GameTable {
    parse_game(text).expect("bundled game files are valid")
}

pub fn rps() -> GameTable {
    load(RPS)
}

pub fn dice() -> GameTable {
    load(DICE)
}

pub fn rpsls() -> GameTable {
    load(RPSLS)
}

pub fn learners() -> Vec<Learner> {
    LEARNERS
        .iter()
        .map(|(_, text)| Learner::from_file(text).expect("bundled learner files are valid"))
        .collect()
}

pub fn games() -> Vec<GameTable> {
    GAMES.iter().map(|(_, text)| load(text)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_games_parse_and_round_trip() {
        for (stem, text) in GAMES {
            let g = load(text);
            assert_eq!(g.name(), stem);
            assert_eq!(parse_game(&g.to_canonical()).unwrap(), g);
        }
    }

    #[test]
    fn bundled_learners_load() {
        let ls = learners();
        assert_eq!(ls.len(), LEARNERS.len());
        assert!(ls.iter().any(Learner::is_oracle_winner));
        for l in &ls {
            assert_eq!(Learner::from_file(&l.to_file()).unwrap(), *l);
        }
    }
}
