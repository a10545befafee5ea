//! Exact minimum-army search, single-army reachability and the jump-count
//! integer model.
//!
//! Candidate armies are generated size by size from exponent profiles. For
//! each size the improved fields are tried first as guides: their
//! zero-slack armies are searched only along plays that pass through the
//! field's anchor position, which is fast and usually finds a witness. If no
//! guide finds one, every profile of the basic field is expanded and searched
//! exhaustively, and only that pass can refute a size.

mod ip;
mod search;

pub use ip::{
    build_ip, check_jump_vector, export_lp, lattice_check, lattice_check_with_budget, Finish,
    IPModel, LatticeOutcome, SumRow, DEFAULT_LATTICE_BUDGET,
};

use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::bounds::{
    enumerate_profiles, fibonacci_bound, greedy_size_bound, lower_bound, max_level, Bound,
    ExponentProfile, ProfileFilters,
};
use crate::engine::{verify_solution, Solution};
use crate::error::{Error, Result};
use crate::geometry::{BoardWindow, Cell, GeometryKind, JumpId, Layout};
use crate::pagoda::{basic_field, basic_field_on, improved_field_on, PagodaField, Preset};
use search::{Outcome, Searcher, Space};

/// Default node cap for a single candidate army.
pub const DEFAULT_NODE_CAP: u64 = 4_000_000;

#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Board window; `None` means the geometry's default for the level.
    pub window: Option<BoardWindow>,
    pub max_size: Option<usize>,
    /// Wall-clock limit per candidate size.
    pub time_limit: Option<Duration>,
    /// Worker threads; 0 lets rayon decide.
    pub threads: usize,
    /// Only try armies of zero slack under the basic field. Gives up
    /// optimality proofs.
    pub zero_slack_only: bool,
    pub node_cap: u64,
    pub filters: ProfileFilters,
    /// Start at the improved-field lower bound rather than the larger of the
    /// Fibonacci bound and the basic-field greedy bound.
    pub start_from_table: bool,
    /// Print progress lines on standard error.
    pub verbose: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            window: None,
            max_size: None,
            time_limit: None,
            threads: 0,
            zero_slack_only: false,
            node_cap: DEFAULT_NODE_CAP,
            filters: ProfileFilters {
                no_interior_zeros: false,
                tail_non_increasing: false,
                quantized_slack: true,
            },
            start_from_table: true,
            verbose: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    /// Witness found and every smaller size refuted.
    Optimal,
    /// Witness found but some smaller size is undecided.
    Feasible,
    /// No army of any size fits the window.
    Infeasible,
    /// Time, size or node limits stopped the search first.
    Timeout,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Timeout => "timeout",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub army: Option<Vec<Cell>>,
    pub solution: Option<Solution>,
    /// Every army smaller than this is impossible.
    pub lower_bound: usize,
    pub nodes: u64,
    pub candidates: u64,
    pub elapsed: Duration,
}

impl SolveResult {
    pub fn size(&self) -> Option<usize> {
        self.army.as_ref().map(|a| a.len())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Solution),
    /// The search space was exhausted.
    Impossible,
    /// The node budget ran out first.
    Indeterminate,
}

/// Looks for a play from `start` that puts a man on the target, on the
/// layout of `f`. Pruning always uses the basic field of that layout. If `f`
/// carries anchors, only plays passing through a position holding every
/// anchor are explored, so `Impossible` then means none of that shape. With
/// `zero_slack` only jumps that lose no basic weight are tried.
pub fn reachability_search(
    start: &[Cell],
    f: &PagodaField,
    zero_slack: bool,
    budget: u64,
) -> Result<SearchOutcome> {
    let layout = f.layout.clone();
    let mut idx = Vec::with_capacity(start.len());
    for &c in start {
        idx.push(layout.index(c).ok_or(Error::CellOutside(c))?);
    }
    if layout.index(Cell::TARGET).is_none() {
        return Err(Error::CellOutside(Cell::TARGET));
    }
    let basic;
    let (b, guide) = if f.anchors.is_empty() {
        (f, None)
    } else {
        basic = basic_field_on(layout.clone());
        (&basic, Some(f))
    };
    let space = Arc::new(Space::new(b, guide, zero_slack));
    let mut s = Searcher::new(space);
    Ok(match s.run(&idx, budget, None) {
        Outcome::Found(path) => SearchOutcome::Found(witness(&layout, &idx, &path)),
        Outcome::Exhausted => SearchOutcome::Impossible,
        Outcome::Cut => SearchOutcome::Indeterminate,
    })
}

fn witness(layout: &Layout, start: &[usize], path: &[JumpId]) -> Solution {
    let mut cells: Vec<Cell> = start.iter().map(|&i| layout.cells[i]).collect();
    cells.sort_by_key(|c| (c.y, c.x));
    let sol = Solution {
        geometry: layout.geometry,
        level: cells.iter().map(|c| c.y).min().unwrap_or(0),
        start: cells,
        jumps: path.iter().map(|&id| layout.jumps[id]).collect(),
    };
    debug_assert!(
        verify_solution(&sol).is_ok(),
        "search produced an illegal play"
    );
    sol
}

/// Improved fields usable as guides at this level, each with its mirror.
fn guide_fields(layout: &Arc<Layout>, level: i32) -> Vec<PagodaField> {
    if level < 2 {
        return Vec::new();
    }
    let mut out: Vec<PagodaField> = Vec::new();
    for p in Preset::ALL
        .iter()
        .filter(|p| p.geometry() == layout.geometry)
    {
        for anchors in [p.anchors(), p.mirrored_anchors()] {
            if out.iter().any(|f| f.anchors == anchors) {
                continue;
            }
            if let Ok(f) = improved_field_on(layout.clone(), &anchors) {
                out.push(f);
            }
        }
    }
    out
}

/// Calls `emit` with every placement of `profile` on the field's starting
/// region, as sorted cell indices. Stops early when `emit` returns true.
fn for_each_placement(
    f: &PagodaField,
    level: i32,
    profile: &ExponentProfile,
    emit: &mut dyn FnMut(Vec<usize>) -> bool,
) -> bool {
    let classes: Vec<(Vec<usize>, usize)> = f
        .capacities(level)
        .into_iter()
        .filter_map(|(e, cells)| {
            let n = profile.count(e);
            (n > 0).then_some((cells, n))
        })
        .collect();
    let mut chosen = Vec::with_capacity(profile.size());
    placements(&classes, 0, 0, &mut chosen, emit)
}

fn placements(
    classes: &[(Vec<usize>, usize)],
    class: usize,
    next: usize,
    chosen: &mut Vec<usize>,
    emit: &mut dyn FnMut(Vec<usize>) -> bool,
) -> bool {
    let Some((cells, want)) = classes.get(class) else {
        let mut c = chosen.clone();
        c.sort_unstable();
        return emit(c);
    };
    let taken = chosen.len() - classes[..class].iter().map(|c| c.1).sum::<usize>();
    if taken == *want {
        return placements(classes, class + 1, 0, chosen, emit);
    }
    for i in next..cells.len() {
        if cells.len() - i < want - taken {
            break;
        }
        chosen.push(cells[i]);
        let stop = placements(classes, class, i + 1, chosen, emit);
        chosen.pop();
        if stop {
            return true;
        }
    }
    false
}

/// Runs candidate armies in parallel batches. Results are consumed in
/// candidate order, so the first success reported is the same whatever
/// the thread count.
struct Runner<'a> {
    pool: &'a rayon::ThreadPool,
    searchers: Vec<Searcher>,
    batch: Vec<Vec<usize>>,
    batch_size: usize,
    cap: u64,
    deadline: Option<Instant>,
    found: Option<(Vec<usize>, Vec<JumpId>)>,
    cut: bool,
    candidates: u64,
}

impl<'a> Runner<'a> {
    fn new(
        pool: &'a rayon::ThreadPool,
        space: Arc<Space>,
        cap: u64,
        deadline: Option<Instant>,
    ) -> Self {
        let n = pool.current_num_threads().max(1);
        Runner {
            pool,
            searchers: (0..n).map(|_| Searcher::new(space.clone())).collect(),
            batch: Vec::new(),
            batch_size: 16 * n,
            cap,
            deadline,
            found: None,
            cut: false,
            candidates: 0,
        }
    }

    fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn push(&mut self, c: Vec<usize>) -> bool {
        self.batch.push(c);
        if self.batch.len() >= self.batch_size {
            return self.flush();
        }
        false
    }

    fn flush(&mut self) -> bool {
        if self.found.is_some() {
            return true;
        }
        if self.expired() {
            self.cut = true;
            return true;
        }
        if self.batch.is_empty() {
            return false;
        }
        let batch = std::mem::take(&mut self.batch);
        let per = batch.len().div_ceil(self.searchers.len());
        let (cap, deadline) = (self.cap, self.deadline);
        let searchers = &mut self.searchers;
        let results: Vec<Vec<Outcome>> = self.pool.install(|| {
            searchers
                .par_iter_mut()
                .zip(batch.par_chunks(per))
                .map(|(s, chunk)| chunk.iter().map(|c| s.run(c, cap, deadline)).collect())
                .collect()
        });
        for (cand, out) in batch.iter().zip(results.into_iter().flatten()) {
            self.candidates += 1;
            match out {
                Outcome::Found(path) => {
                    self.found = Some((cand.clone(), path));
                    return true;
                }
                Outcome::Cut => self.cut = true,
                Outcome::Exhausted => {}
            }
        }
        self.expired()
    }

    fn nodes(&self) -> u64 {
        self.searchers.iter().map(|s| s.total_nodes).sum()
    }
}

/// Smallest size not excluded by the Fibonacci bound or the basic-field
/// greedy bound.
pub fn rigorous_lower_bound(g: GeometryKind, level: i32) -> Option<u64> {
    let f = basic_field(g, BoardWindow::analysis(g, level));
    greedy_size_bound(&f, level).map(|k| k.max(fibonacci_bound(level)))
}

/// Finds a smallest army reaching `level`, with a witness play.
pub fn minimum_army(g: GeometryKind, level: i32, cfg: &SearchConfig) -> Result<SolveResult> {
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
    let t0 = Instant::now();
    let window = cfg
        .window
        .unwrap_or_else(|| BoardWindow::default_for(g, level));
    let layout = Arc::new(Layout::new(g, window));
    if window.y_max < level {
        return Err(Error::WindowTooShallow {
            level,
            depth: window.y_max,
        });
    }
    if layout.index(Cell::TARGET).is_none() {
        return Err(Error::CellOutside(Cell::TARGET));
    }
    let region = layout.region_indices(level);
    let basic = basic_field_on(layout.clone());
    let guides = guide_fields(&layout, level);
    let symmetric = layout.mirror_closed()
        && layout
            .cells
            .iter()
            .all(|&c| basic.exponent(g.mirror(c)) == basic.exponent(c));
    let mirror_of: Vec<usize> = if symmetric {
        layout
            .cells
            .iter()
            .map(|&c| layout.index(g.mirror(c)).expect("mirror-closed"))
            .collect()
    } else {
        Vec::new()
    };

    let start = if cfg.start_from_table {
        match lower_bound(g, level) {
            Bound::Size(k) => k as usize,
            Bound::Impossible => unreachable!("level checked against max_level"),
        }
    } else {
        rigorous_lower_bound(g, level).expect("level checked against max_level") as usize
    };
    let max_k = cfg.max_size.unwrap_or(usize::MAX).min(region.len());

    let mut builder = rayon::ThreadPoolBuilder::new();
    if cfg.threads > 0 {
        builder = builder.num_threads(cfg.threads);
    }
    let pool = builder.build().map_err(|e| Error::Search(e.to_string()))?;

    let basic_space = Arc::new(Space::new(&basic, None, cfg.zero_slack_only));
    let guide_spaces: Vec<Arc<Space>> = guides
        .iter()
        .map(|f| Arc::new(Space::new(&basic, Some(f), cfg.zero_slack_only)))
        .collect();

    let mut proven = start;
    let mut nodes = 0u64;
    let mut candidates = 0u64;
    let finish =
        |status, army: Option<Vec<Cell>>, solution, proven, nodes, candidates| SolveResult {
            status,
            army,
            solution,
            lower_bound: proven,
            nodes,
            candidates,
            elapsed: t0.elapsed(),
        };

    let whole: Vec<usize> = region.clone();
    if basic_space.basic_weight(&whole) < crate::sigma::SigmaValue::ONE {
        return Ok(finish(
            SolveStatus::Infeasible,
            None,
            None,
            region.len() + 1,
            0,
            0,
        ));
    }

    for k in start..=max_k {
        let deadline = cfg.time_limit.map(|t| Instant::now() + t);
        let mut hit: Option<(Vec<usize>, Vec<JumpId>)> = None;

        for (f, space) in guides.iter().zip(&guide_spaces) {
            let mut run = Runner::new(&pool, space.clone(), cfg.node_cap, deadline);
            for p in enumerate_profiles(f, level, k, cfg.filters) {
                if !p.slack.is_zero() {
                    continue;
                }
                if for_each_placement(f, level, &p, &mut |c| run.push(c)) {
                    break;
                }
            }
            run.flush();
            nodes += run.nodes();
            candidates += run.candidates;
            if cfg.verbose {
                eprintln!("size {k}: guide {} tried {} armies", f.name, run.candidates);
            }
            if let Some(h) = run.found.take() {
                hit = Some(h);
                break;
            }
        }

        let mut exhaustive = !cfg.zero_slack_only;
        if hit.is_none() {
            let mut run = Runner::new(&pool, basic_space.clone(), cfg.node_cap, deadline);
            for p in enumerate_profiles(&basic, level, k, cfg.filters) {
                if cfg.zero_slack_only && !p.slack.is_zero() {
                    continue;
                }
                let stop = for_each_placement(&basic, level, &p, &mut |c| {
                    if symmetric {
                        let mut m: Vec<usize> = c.iter().map(|&i| mirror_of[i]).collect();
                        m.sort_unstable();
                        if m < c {
                            return false;
                        }
                    }
                    run.push(c)
                });
                if stop {
                    break;
                }
            }
            run.flush();
            nodes += run.nodes();
            candidates += run.candidates;
            exhaustive &= !run.cut;
            if cfg.verbose {
                eprintln!(
                    "size {k}: basic field tried {} armies{}",
                    run.candidates,
                    if run.cut { " (some undecided)" } else { "" }
                );
            }
            hit = run.found.take();
        }

        if let Some((army, path)) = hit {
            let sol = witness(&layout, &army, &path);
            if let Err(e) = verify_solution(&sol) {
                return Err(Error::Search(format!("witness failed verification: {e}")));
            }
            let status = if proven == k {
                SolveStatus::Optimal
            } else {
                SolveStatus::Feasible
            };
            let army = sol.start.clone();
            return Ok(finish(
                status,
                Some(army),
                Some(sol),
                proven,
                nodes,
                candidates,
            ));
        }
        if exhaustive && proven == k {
            proven = k + 1;
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return Ok(finish(
                SolveStatus::Timeout,
                None,
                None,
                proven,
                nodes,
                candidates,
            ));
        }
    }
    let status = if proven > region.len() {
        SolveStatus::Infeasible
    } else {
        SolveStatus::Timeout
    };
    Ok(finish(status, None, None, proven, nodes, candidates))
}
