use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rummikub_core::counting::{total_hands, winning_table, CountConfig};
use rummikub_core::oracle::{oracle_max_score, OracleBudget, OracleError};
use rummikub_core::solver::{
    best_arrangement, max_score_with, verify_arrangement, Arrangement, RunTileKind, SolveOptions,
};
use rummikub_core::tileset::{Problem, TileSetParams};

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

/// Exact solver and counting experiments for the Rummikub puzzle.
#[derive(Parser)]
#[command(name = "rummikub", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file and print the best arrangement.
    Solve {
        /// Problem file (see README for the grammar).
        problem: PathBuf,
        /// Run the full search even after a provably optimal solution.
        #[arg(long)]
        no_early_stop: bool,
    },
    /// Solve a problem file and verify the arrangement with the
    /// independent checker.
    Check {
        problem: PathBuf,
    },
    /// Solve with both the dynamic program and the exhaustive oracle;
    /// succeeds only if they agree.
    Oracle {
        problem: PathBuf,
        /// Node cap for the oracle search.
        #[arg(long, default_value_t = 200_000_000)]
        budget_nodes: u64,
        /// Tile-count cap for the oracle search.
        #[arg(long, default_value_t = 16)]
        budget_tiles: u32,
    },
    /// Emit hand counts per size as CSV (totals only).
    Count {
        /// Game parameters, e.g. "n=13,k=4,m=2,j=2"; omitted keys keep the
        /// original game values.
        #[arg(long)]
        params: Option<String>,
        #[arg(long)]
        t_from: u32,
        #[arg(long)]
        t_to: u32,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit hand counts, winning-hand counts and ratios per size as CSV.
    Winning {
        #[arg(long)]
        params: Option<String>,
        #[arg(long)]
        t_from: u32,
        #[arg(long)]
        t_to: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; 0 uses all cores.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Abort if the dedup store grows past this many keys.
        #[arg(long)]
        budget_keys: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve { problem, no_early_stop } => run_solve(&problem, no_early_stop),
        Command::Check { problem } => run_check(&problem),
        Command::Oracle { problem, budget_nodes, budget_tiles } => {
            run_oracle(&problem, budget_nodes, budget_tiles)
        }
        Command::Count { params, t_from, t_to, out } => {
            run_count(params.as_deref(), t_from, t_to, out.as_deref(), None)
        }
        Command::Winning { params, t_from, t_to, out, threads, budget_keys } => run_count(
            params.as_deref(),
            t_from,
            t_to,
            out.as_deref(),
            Some(CountConfig { threads, memory_budget_keys: budget_keys, ..Default::default() }),
        ),
    };
    ExitCode::from(code)
}

fn load_problem(path: &std::path::Path) -> Result<Problem, u8> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_ERROR
    })?;
    Problem::parse(&text).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_ERROR
    })
}

fn run_solve(path: &std::path::Path, no_early_stop: bool) -> u8 {
    let problem = match load_problem(path) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let opts = SolveOptions { early_stop: !no_early_stop, ..Default::default() };
    let Some(score) = max_score_with(&problem, &opts) else {
        println!("table constraint unsatisfiable");
        return EXIT_INFEASIBLE;
    };
    let arrangement = best_arrangement(&problem)
        .expect("feasible problems always reconstruct");
    debug_assert_eq!(arrangement.score, score);
    print!("{}", render_arrangement(&problem, &arrangement));
    EXIT_OK
}

fn run_check(path: &std::path::Path) -> u8 {
    let problem = match load_problem(path) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let Some(arrangement) = best_arrangement(&problem) else {
        println!("table constraint unsatisfiable");
        return EXIT_INFEASIBLE;
    };
    println!("score {}", arrangement.score);
    match verify_arrangement(&problem, &arrangement) {
        Ok(()) => {
            println!("verify ok");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: verification failed: {e}");
            EXIT_ERROR
        }
    }
}

fn run_oracle(path: &std::path::Path, budget_nodes: u64, budget_tiles: u32) -> u8 {
    let problem = match load_problem(path) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let solver_score = max_score_with(&problem, &SolveOptions::default());
    let budget = OracleBudget { max_tiles: budget_tiles, max_nodes: budget_nodes };
    let oracle_score = match oracle_max_score(&problem, &budget) {
        Ok(score) => score,
        Err(e @ (OracleError::TooManyTiles { .. } | OracleError::NodeBudget { .. })) => {
            eprintln!("error: {e}");
            return EXIT_BUDGET;
        }
    };
    let fmt = |s: Option<u64>| s.map_or("INFEASIBLE".to_string(), |v| v.to_string());
    println!("solver {}", fmt(solver_score));
    println!("oracle {}", fmt(oracle_score));
    if solver_score == oracle_score {
        EXIT_OK
    } else {
        eprintln!("error: solver and oracle disagree");
        EXIT_ERROR
    }
}

fn run_count(
    params: Option<&str>,
    t_from: u32,
    t_to: u32,
    out: Option<&std::path::Path>,
    winning: Option<CountConfig>,
) -> u8 {
    let params = match parse_params_flag(params) {
        Ok(p) => p,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_ERROR;
        }
    };
    if t_from > t_to || t_to > params.total_tiles() {
        eprintln!(
            "error: invalid size range {t_from}..{t_to} for a tile set of {}",
            params.total_tiles()
        );
        return EXIT_ERROR;
    }

    let mut writer: BufWriter<Box<dyn Write>> = match out {
        Some(path) => match fs::File::create(path) {
            Ok(f) => BufWriter::new(Box::new(f)),
            Err(e) => {
                eprintln!("error: cannot create {}: {e}", path.display());
                return EXIT_ERROR;
            }
        },
        None => BufWriter::new(Box::new(io::stdout())),
    };

    let emit = |writer: &mut BufWriter<Box<dyn Write>>, line: String| -> Result<(), u8> {
        writeln!(writer, "{line}").and_then(|_| writer.flush()).map_err(|e| {
            eprintln!("error: write failed: {e}");
            EXIT_ERROR
        })
    };

    if let Err(code) = emit(&mut writer, "t,total,winning,ratio".to_string()) {
        return code;
    }
    for t in t_from..=t_to {
        let line = match &winning {
            None => match total_hands(&params, t) {
                Ok(total) => format!("{t},{total},,"),
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_ERROR;
                }
            },
            Some(config) => match winning_table(&params, t, t, config) {
                Ok(rows) => {
                    let row = &rows[0];
                    format!("{},{},{},{}", row.t, row.total, row.winning, row.ratio)
                }
                Err(e) => {
                    eprintln!("error: {}; last completed size is {}", e.source, t.wrapping_sub(1));
                    return EXIT_ERROR;
                }
            },
        };
        if let Err(code) = emit(&mut writer, line) {
            return code;
        }
    }
    EXIT_OK
}

fn parse_params_flag(flag: Option<&str>) -> Result<TileSetParams, String> {
    let mut n: u16 = 13;
    let mut k: u8 = 4;
    let mut m: u8 = 2;
    let mut j: u8 = 2;
    if let Some(text) = flag {
        for part in text.split([',', ' ']).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("malformed parameter `{part}`"))?;
            let bad = |_| format!("malformed parameter `{part}`");
            match key {
                "n" => n = value.parse().map_err(bad)?,
                "k" => k = value.parse().map_err(bad)?,
                "m" => m = value.parse().map_err(bad)?,
                "j" => j = value.parse().map_err(bad)?,
                _ => return Err(format!("unknown parameter `{key}`")),
            }
        }
    }
    TileSetParams::new(n, k, m, j).map_err(|e| e.to_string())
}

/// Render the solve report: the score, one line per group and run, and the
/// leftover tiles.
fn render_arrangement(problem: &Problem, arrangement: &Arrangement) -> String {
    let mut out = format!("score {}\n", arrangement.score);
    for group in &arrangement.groups {
        let suits: Vec<String> = group.suits.iter().map(|s| s.to_string()).collect();
        out.push_str(&format!(
            "GROUP value={} suits={} jokers={}\n",
            group.value,
            suits.join(","),
            group.jokers
        ));
    }
    for run in &arrangement.runs {
        let jokers: Vec<String> =
            run.joker_offsets().iter().map(|o| o.to_string()).collect();
        out.push_str(&format!(
            "RUN suit={} start={} len={} jokers={}\n",
            run.suit,
            run.start,
            run.len(),
            jokers.join(",")
        ));
    }

    let params = problem.params();
    let mut used = vec![0u32; params.tile_types()];
    let cell =
        |value: u16, suit: u8| (suit as usize - 1) * params.n() as usize + value as usize - 1;
    for run in &arrangement.runs {
        for (offset, kind) in run.tiles.iter().enumerate() {
            if *kind == RunTileKind::Real {
                used[cell(run.start + offset as u16, run.suit)] += 1;
            }
        }
    }
    for group in &arrangement.groups {
        for &suit in &group.suits {
            used[cell(group.value, suit)] += 1;
        }
    }
    let pooled = problem.pooled();
    out.push_str("unused");
    for suit in 1..=params.k() {
        for value in 1..=params.n() {
            let left = pooled.count(value, suit) as u32 - used[cell(value, suit)];
            for _ in 0..left {
                out.push_str(&format!(" {value}:{suit}"));
            }
        }
    }
    for _ in 0..(pooled.jokers() as u32 - arrangement.jokers_used()) {
        out.push_str(" J");
    }
    out.push('\n');
    out
}
