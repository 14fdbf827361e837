//! Command-line front end. [`dispatch`] is the whole program minus process
//! plumbing, so it can be driven from tests.
//!
//! Exit codes: 0 success, 1 usage error, 2 unreadable or malformed input,
//! 3 a requested assertion failed.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::arena::{run_match, run_tournament, Mode, TournamentConfig};
use crate::classify::{classify, cycle_line, find_cycles, pure_nash, ClassKind};
use crate::crosstable::ingest_crosstable;
use crate::demos::{catalog, theorem1, theorem2, theorem3};
use crate::dsl::Learner;
use crate::game::{enumerate_game_count, parse_game, GameTable, Side};
use crate::mixed::fictitious_play;
use crate::series::{compose_series, Aggregator};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_ASSERT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "intransitive", version, about = "Intransitive games, open-source competitions and their learners")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GameArg {
    /// Game file
    #[arg(value_name = "GAME")]
    path: Option<PathBuf>,
    /// Game file (alternative to the positional argument)
    #[arg(long = "game", value_name = "PATH", conflicts_with = "path")]
    flag: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Strict,
    Deadline,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Strict => Mode::Strict,
            ModeArg::Deadline => Mode::Deadline,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AggregateArg {
    Sum,
    Majority,
    Lex,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Theorem {
    Theorem1,
    Theorem2,
    Theorem3,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a game as dominated, strongly intransitive or other
    Classify {
        #[command(flatten)]
        game: GameArg,
        /// Fail with exit code 3 unless the game has this class
        #[arg(long, value_name = "KIND")]
        assert_class: Option<String>,
    },
    /// List dominance cycles of a symmetric game
    Cycles {
        #[command(flatten)]
        game: GameArg,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(3..=5))]
        max_len: u8,
    },
    /// List pure Nash equilibrium cells
    Nash {
        #[command(flatten)]
        game: GameArg,
    },
    /// Play one open-source match
    Arena {
        #[command(flatten)]
        game: GameArg,
        /// Row learner file
        #[arg(long)]
        p1: PathBuf,
        /// Column learner file
        #[arg(long)]
        p2: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        fuel: u64,
        #[arg(long, value_enum, default_value = "strict")]
        mode: ModeArg,
    },
    /// Round robin between learners
    Tournament {
        #[command(flatten)]
        game: GameArg,
        /// Directory of `.lrn` files; the built-in catalog if omitted
        #[arg(long)]
        learners: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        fuel: u64,
        #[arg(long, value_enum, default_value = "strict")]
        mode: ModeArg,
        /// Worker threads (the report does not depend on this)
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Narrated constructions showing that no learner wins everything
    Demo {
        #[arg(value_enum)]
        which: Theorem,
        #[command(flatten)]
        game: GameArg,
        #[arg(long, default_value_t = 100_000)]
        fuel: u64,
    },
    /// Combine games played in series into one overall table
    Series {
        /// Game files, all of the same shape
        #[arg(required = true)]
        games: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "sum")]
        aggregate: AggregateArg,
    },
    /// Approximate maxmin mixed strategies by fictitious play
    Maxmin {
        #[command(flatten)]
        game: GameArg,
        #[arg(long, default_value_t = 100_000)]
        iters: u64,
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
    },
    /// Turn a cross-table of scores into a game and find its cycles
    Crosstable {
        /// CSV cross-table
        path: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        margin: f64,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(3..=5))]
        max_len: u8,
    },
    /// Count the distinct win/draw/loss tables of a shape
    Enumerate {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
    },
}

/// What a run printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure {
    code: i32,
    message: String,
}

fn input_error(message: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.to_string(),
    }
}

fn usage(message: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.to_string(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load_game(arg: &GameArg) -> Result<GameTable, Failure> {
    let path = arg
        .path
        .as_ref()
        .or(arg.flag.as_ref())
        .ok_or_else(|| usage("a game file is required (positional or --game)"))?;
    parse_game(&read(path)?).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load_learner(path: &Path) -> Result<Learner, Failure> {
    Learner::from_file(&read(path)?).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load_learners(dir: &Path) -> Result<Vec<Learner>, Failure> {
    let entries = fs::read_dir(dir).map_err(|e| input_error(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "lrn"))
        .collect();
    paths.sort();
    paths.iter().map(|p| load_learner(p)).collect()
}

/// Parses `argv` (including the program name) and runs the command.
pub fn dispatch<I, T>(argv: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Output {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let mut stdout = String::new();
    match run(cli.command, &mut stdout) {
        Ok(()) => Output {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        },
        Err(f) => Output {
            code: f.code,
            stdout,
            stderr: format!("error: {}\n", f.message),
        },
    }
}

fn run(command: Command, out: &mut String) -> Result<(), Failure> {
    match command {
        Command::Classify { game, assert_class } => {
            let wanted = assert_class
                .map(|k| ClassKind::parse(&k).ok_or_else(|| usage(format!("unknown class {k:?}"))))
                .transpose()?;
            let table = load_game(&game)?;
            let class = classify(&table);
            out.push_str(&class.report(&table));
            if let Some(want) = wanted {
                if class.kind() != want {
                    return Err(Failure {
                        code: EXIT_ASSERT,
                        message: format!("expected {}, got {}", want.as_str(), class.kind().as_str()),
                    });
                }
            }
        }
        Command::Cycles { game, max_len } => {
            let table = load_game(&game)?;
            let cycles = find_cycles(&table, max_len as usize).map_err(input_error)?;
            for c in &cycles {
                writeln!(out, "{}", cycle_line(&table, c)).expect("write to string");
            }
            writeln!(out, "cycles={}", cycles.len()).expect("write to string");
        }
        Command::Nash { game } => {
            let table = load_game(&game)?;
            let cells = pure_nash(&table);
            for c in &cells {
                writeln!(
                    out,
                    "nash {} {}",
                    table.label(Side::Row, c.i),
                    table.label(Side::Col, c.j)
                )
                .expect("write to string");
            }
            writeln!(out, "pure_nash={}", cells.len()).expect("write to string");
        }
        Command::Arena {
            game,
            p1,
            p2,
            fuel,
            mode,
        } => {
            let table = load_game(&game)?;
            let (l1, l2) = (load_learner(&p1)?, load_learner(&p2)?);
            if fuel == 0 {
                return Err(usage("--fuel must be at least 1"));
            }
            out.push_str(&run_match(&table, &l1, &l2, fuel, mode.into()).report());
        }
        Command::Tournament {
            game,
            learners,
            fuel,
            mode,
            threads,
        } => {
            let table = load_game(&game)?;
            let learners = match learners {
                Some(dir) => load_learners(&dir)?,
                None => catalog(&table, fuel),
            };
            let config = TournamentConfig {
                threads,
                ..TournamentConfig::new(fuel, mode.into())
            };
            out.push_str(&run_tournament(&table, &learners, &config).report());
        }
        Command::Demo { which, game, fuel } => {
            let table = load_game(&game)?;
            let text = match which {
                Theorem::Theorem1 => theorem1(&table, fuel),
                Theorem::Theorem2 => theorem2(&table, fuel),
                Theorem::Theorem3 => theorem3(&table, fuel),
            };
            out.push_str(&text);
        }
        Command::Series { games, aggregate } => {
            let tables = games
                .iter()
                .map(|p| parse_game(&read(p)?).map_err(|e| input_error(format!("{}: {e}", p.display()))))
                .collect::<Result<Vec<_>, _>>()?;
            let agg = match aggregate {
                AggregateArg::Sum => Aggregator::SumSign,
                AggregateArg::Majority => Aggregator::Majority,
                AggregateArg::Lex => Aggregator::Lexicographic,
            };
            let table = compose_series(&tables, agg).map_err(input_error)?;
            out.push_str(&table.to_canonical());
        }
        Command::Maxmin { game, iters, tol } => {
            let table = load_game(&game)?;
            let s = fictitious_play(&table, iters, tol).map_err(usage)?;
            writeln!(out, "{}", s.report_line()).expect("write to string");
            writeln!(out, "iterations={} converged={}", s.iterations, s.converged).expect("write to string");
        }
        Command::Crosstable { path, margin, max_len } => {
            let (_, table) = ingest_crosstable(&read(&path)?, margin).map_err(input_error)?;
            out.push_str(&table.to_canonical());
            let cycles = find_cycles(&table, max_len as usize).map_err(input_error)?;
            for c in &cycles {
                writeln!(out, "{}", cycle_line(&table, c)).expect("write to string");
            }
            writeln!(out, "cycles={}", cycles.len()).expect("write to string");
        }
        Command::Enumerate { rows, cols } => {
            if rows == 0 || cols == 0 {
                return Err(usage("--rows and --cols must be at least 1"));
            }
            writeln!(out, "{}", enumerate_game_count(rows, cols)).expect("write to string");
        }
    }
    Ok(())
}
