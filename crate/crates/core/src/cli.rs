//! Command-line front end. `run` takes the argument list and output streams
//! so the binary and the tests share one code path.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use crate::bounds::{
    enumerate_profiles, fibonacci_bound, greedy_size_bound, lower_bound, lower_bound_table,
    max_level, published_minimum, render_level_table, render_lower_bound_table, render_profiles,
    slack_in_powers, ProfileFilters,
};
use crate::engine::{order_jumps, verify_solution, OrderOutcome, Solution, DEFAULT_ORDER_BUDGET};
use crate::error::{Error, Result};
use crate::geometry::{BoardWindow, GeometryKind};
use crate::pagoda::{basic_field, designated_field, PagodaField, Preset};
use crate::solver::{
    build_ip, export_lp, minimum_army, Finish, SearchConfig, SolveStatus, DEFAULT_NODE_CAP,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_TIMEOUT: i32 = 3;

/// Environment variable holding the default worker count for `solve`.
pub const THREADS_ENV: &str = "SOLITAIRE_ARMY_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "solitaire-army",
    version,
    about = "Bounds and minimum armies for solitaire-army puzzles"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FinishArg {
    Target,
    Anchors,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Highest reachable level and per-level lower bounds.
    Bounds {
        geometry: Option<GeometryKind>,
        /// Print the full level and lower-bound tables.
        #[arg(long)]
        table: bool,
    },
    /// Greedy and Fibonacci bounds for one level, optionally listing the
    /// exponent profiles of a given army size.
    LowerBound {
        geometry: GeometryKind,
        level: i32,
        /// Field preset name, or `basic`; defaults to the designated field.
        #[arg(long)]
        field: Option<String>,
        #[arg(long)]
        window: Option<BoardWindow>,
        /// List exponent profiles of this many men.
        #[arg(long)]
        profiles: Option<usize>,
        /// Apply the structural filters to the profile list.
        #[arg(long)]
        filters: bool,
    },
    /// Exact minimum army search.
    Solve {
        geometry: GeometryKind,
        level: i32,
        #[arg(long)]
        max_size: Option<usize>,
        /// Seconds allowed per army size.
        #[arg(long)]
        time_limit: Option<u64>,
        #[arg(long, env = THREADS_ENV, default_value_t = 0)]
        threads: usize,
        #[arg(long)]
        zero_slack_only: bool,
        #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
        node_cap: u64,
        /// Start from the Fibonacci and basic-field bounds instead of the
        /// improved-field table.
        #[arg(long)]
        rigorous: bool,
        #[arg(long)]
        window: Option<BoardWindow>,
        /// Solution file; printed to standard output if omitted.
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long, short)]
        verbose: bool,
    },
    /// Replays a solution file.
    Verify { file: PathBuf },
    /// Orders an unordered jump multiset into a legal play.
    Order {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORDER_BUDGET)]
        budget: u64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Writes the integer model as LP text.
    ExportIp {
        geometry: GeometryKind,
        level: i32,
        #[arg(long)]
        window: Option<BoardWindow>,
        #[arg(long, value_enum, default_value_t = FinishArg::Target)]
        finish: FinishArg,
        /// Preset whose anchors form the final position with `--finish anchors`.
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Draws the starting position of a solution file.
    Render {
        file: PathBuf,
        /// Also print the exponent dump of this field on the solution's board.
        #[arg(long)]
        field: Option<String>,
    },
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Io(_) => EXIT_FAILED,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn read_solution(path: &Path) -> Result<Solution> {
    fs::read_to_string(path)?.parse()
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn check_level(g: GeometryKind, level: i32) -> Result<()> {
    if level < 1 {
        return Err(Error::InvalidLevel(level));
    }
    if level > max_level(g) {
        return Err(Error::LevelUnreachable {
            geometry: g,
            level,
            max: max_level(g),
        });
    }
    Ok(())
}

fn field_by_name(
    name: &str,
    g: GeometryKind,
    level: i32,
    window: BoardWindow,
) -> Result<PagodaField> {
    match name {
        "basic" => Ok(basic_field(g, window)),
        "designated" => Ok(designated_field(g, level, window)),
        _ => {
            let p: Preset = name.parse()?;
            if p.geometry() != g {
                return Err(Error::Parse(format!(
                    "preset `{name}` belongs to {}",
                    p.geometry()
                )));
            }
            p.build(window)
        }
    }
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Bounds { geometry, table } => {
            if let Some(g) = geometry.filter(|_| !table) {
                let max = max_level(g);
                let bounds: Vec<String> =
                    (1..=max).map(|n| lower_bound(g, n).to_string()).collect();
                writeln!(out, "max level {max}; lower bounds {}", bounds.join(" "))?;
                for n in 1..=max + 1 {
                    writeln!(
                        out,
                        "level {n}: lower bound {}, F(n+2) {}, published minimum {}",
                        lower_bound(g, n),
                        fibonacci_bound(n),
                        published_minimum(g, n)
                    )?;
                }
            } else {
                writeln!(out, "{}", render_level_table())?;
                write!(out, "{}", render_lower_bound_table(&lower_bound_table()))?;
            }
            Ok(EXIT_OK)
        }
        Command::LowerBound {
            geometry: g,
            level,
            field,
            window,
            profiles,
            filters,
        } => {
            check_level(g, level)?;
            let window = window.unwrap_or_else(|| BoardWindow::analysis(g, level));
            let f = field_by_name(field.as_deref().unwrap_or("designated"), g, level, window)?;
            let greedy = greedy_size_bound(&f, level);
            writeln!(out, "field {}", f.name)?;
            match greedy {
                Some(k) => writeln!(out, "greedy bound {k}")?,
                None => writeln!(out, "greedy bound Impossible")?,
            }
            writeln!(out, "F(n+2) {}", fibonacci_bound(level))?;
            writeln!(out, "table bound {}", lower_bound(g, level))?;
            if let Some(size) = profiles {
                let flt = if filters {
                    ProfileFilters::ALL
                } else {
                    ProfileFilters::NONE
                };
                let ps = enumerate_profiles(&f, level, size, flt);
                writeln!(out, "{} profile(s) of {size} men", ps.len())?;
                if let (Some(lo), Some(hi)) = (
                    ps.iter().filter_map(|p| p.min_exponent()).min(),
                    ps.iter().filter_map(|p| p.max_exponent()).max(),
                ) {
                    write!(out, "{}", render_profiles(&ps, lo..=hi))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Solve {
            geometry: g,
            level,
            max_size,
            time_limit,
            threads,
            zero_slack_only,
            node_cap,
            rigorous,
            window,
            output,
            verbose,
        } => {
            check_level(g, level)?;
            let cfg = SearchConfig {
                window,
                max_size,
                time_limit: time_limit.map(Duration::from_secs),
                threads,
                zero_slack_only,
                node_cap,
                start_from_table: !rigorous,
                verbose,
                ..SearchConfig::default()
            };
            let r = minimum_army(g, level, &cfg)?;
            match r.size() {
                Some(k) => writeln!(out, "size {k}")?,
                None => writeln!(out, "size none")?,
            }
            writeln!(out, "status {}", r.status)?;
            writeln!(out, "lower bound {}", r.lower_bound)?;
            writeln!(out, "candidates {}", r.candidates)?;
            writeln!(out, "nodes {}", r.nodes)?;
            writeln!(err, "time {:.3}s", r.elapsed.as_secs_f64())?;
            if let Some(sol) = &r.solution {
                if output.is_none() {
                    writeln!(out)?;
                }
                emit(&sol.to_text(), output.as_deref(), out)?;
            }
            Ok(match r.status {
                SolveStatus::Optimal | SolveStatus::Feasible => EXIT_OK,
                SolveStatus::Infeasible => EXIT_FAILED,
                SolveStatus::Timeout => EXIT_TIMEOUT,
            })
        }
        Command::Verify { file } => {
            let sol = read_solution(&file)?;
            match verify_solution(&sol) {
                Ok(()) => {
                    writeln!(
                        out,
                        "ok: {} level {}, {} men, {} jumps",
                        sol.geometry,
                        sol.level,
                        sol.size(),
                        sol.jumps.len()
                    )?;
                    Ok(EXIT_OK)
                }
                Err(e) => {
                    writeln!(out, "invalid: {e}")?;
                    Ok(EXIT_FAILED)
                }
            }
        }
        Command::Order {
            file,
            budget,
            output,
        } => {
            let sol = read_solution(&file)?;
            match order_jumps(sol.geometry, sol.level, &sol.start, &sol.jumps, budget)? {
                OrderOutcome::Ordered(s) => {
                    emit(&s.to_text(), output.as_deref(), out)?;
                    Ok(EXIT_OK)
                }
                OrderOutcome::Impossible => {
                    writeln!(out, "no legal order exists")?;
                    Ok(EXIT_FAILED)
                }
                OrderOutcome::BudgetExhausted => {
                    writeln!(out, "undecided: budget of {budget} nodes exhausted")?;
                    Ok(EXIT_TIMEOUT)
                }
            }
        }
        Command::ExportIp {
            geometry: g,
            level,
            window,
            finish,
            preset,
            output,
        } => {
            check_level(g, level)?;
            let window = window.unwrap_or_else(|| BoardWindow::default_for(g, level));
            let finish = match finish {
                FinishArg::Target => Finish::Target,
                FinishArg::Anchors => {
                    let p: Preset = match preset {
                        Some(name) => name.parse()?,
                        None => Preset::ALL
                            .into_iter()
                            .find(|p| p.geometry() == g)
                            .ok_or_else(|| Error::Parse(format!("no anchored preset for {g}")))?,
                    };
                    Finish::Anchors(p.anchors().into_iter().map(|(c, _)| c).collect())
                }
            };
            let model = build_ip(g, level, window, finish)?;
            emit(&export_lp(&model), output.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Render { file, field } => {
            let sol = read_solution(&file)?;
            writeln!(
                out,
                "{} level {}, {} men",
                sol.geometry,
                sol.level,
                sol.size()
            )?;
            write!(out, "{}", sol.render())?;
            if let Some(name) = field {
                let f = field_by_name(&name, sol.geometry, sol.level, sol.window())?;
                let w: crate::sigma::SigmaValue = sol.start.iter().map(|&c| f.weight(c)).sum();
                writeln!(out, "field {}", f.name)?;
                write!(out, "{}", f.dump())?;
                writeln!(
                    out,
                    "weight {} (slack {})",
                    w,
                    slack_in_powers(w - crate::sigma::SigmaValue::ONE)
                )?;
            }
            Ok(EXIT_OK)
        }
    }
}
