//! Game state on a bitset board, solution replay and verification, jump
//! ordering, weight traces, and the text formats for solutions and boards.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{BoardWindow, Cell, GeometryKind, Jump, JumpId, Layout};
use crate::pagoda::PagodaField;
use crate::sigma::SigmaValue;

/// Occupancy of a layout, one bit per cell.
#[derive(Clone, Debug)]
pub struct BoardState {
    pub layout: Arc<Layout>,
    bits: Vec<u64>,
    men: usize,
}

impl PartialEq for BoardState {
    fn eq(&self, other: &Self) -> bool {
        self.layout.geometry == other.layout.geometry
            && self.layout.window == other.layout.window
            && self.bits == other.bits
    }
}

impl Eq for BoardState {}

impl std::hash::Hash for BoardState {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.bits.hash(h);
    }
}

impl BoardState {
    pub fn empty(layout: Arc<Layout>) -> Self {
        let words = layout.len().div_ceil(64);
        BoardState {
            layout,
            bits: vec![0; words],
            men: 0,
        }
    }

    pub fn new(g: GeometryKind, window: BoardWindow) -> Self {
        BoardState::empty(Arc::new(Layout::new(g, window)))
    }

    pub fn with_men<'a>(
        layout: Arc<Layout>,
        cells: impl IntoIterator<Item = &'a Cell>,
    ) -> Result<Self> {
        let mut s = BoardState::empty(layout);
        for &c in cells {
            let i = s
                .layout
                .index(c)
                .ok_or_else(|| Error::Parse(format!("cell {c} is outside the board")))?;
            if s.get(i) {
                return Err(Error::Parse(format!("cell {c} listed twice")));
            }
            s.set(i, true);
        }
        Ok(s)
    }

    pub fn geometry(&self) -> GeometryKind {
        self.layout.geometry
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.bits[i >> 6] >> (i & 63) & 1 == 1
    }

    #[inline]
    fn set(&mut self, i: usize, on: bool) {
        let was = self.get(i);
        if on {
            self.bits[i >> 6] |= 1 << (i & 63);
        } else {
            self.bits[i >> 6] &= !(1 << (i & 63));
        }
        match (was, on) {
            (false, true) => self.men += 1,
            (true, false) => self.men -= 1,
            _ => {}
        }
    }

    pub fn is_occupied(&self, c: Cell) -> bool {
        self.layout.index(c).is_some_and(|i| self.get(i))
    }

    pub fn men(&self) -> usize {
        self.men
    }

    pub fn cells(&self) -> Vec<Cell> {
        (0..self.layout.len())
            .filter(|&i| self.get(i))
            .map(|i| self.layout.cells[i])
            .collect()
    }

    pub fn words(&self) -> &[u64] {
        &self.bits
    }

    #[inline]
    pub fn id_is_legal(&self, id: JumpId) -> bool {
        let [f, o, t] = self.layout.jump_cells[id];
        self.get(f) && self.get(o) && !self.get(t)
    }

    /// Ids of all currently legal jumps, in layout order.
    pub fn legal_jump_ids(&self) -> Vec<JumpId> {
        (0..self.layout.jumps.len())
            .filter(|&id| self.id_is_legal(id))
            .collect()
    }

    pub fn legal_jumps(&self) -> Vec<Jump> {
        self.legal_jump_ids()
            .into_iter()
            .map(|id| self.layout.jumps[id])
            .collect()
    }

    fn resolve(&self, j: &Jump) -> Result<JumpId> {
        if !j.is_legal_for(self.geometry()) {
            return Err(Error::IllegalJump(
                j.to_string(),
                "not a jump of this geometry",
            ));
        }
        self.layout
            .jump_id(j)
            .ok_or_else(|| Error::IllegalJump(j.to_string(), "leaves the board"))
    }

    pub fn apply_id(&mut self, id: JumpId) {
        let [f, o, t] = self.layout.jump_cells[id];
        self.set(f, false);
        self.set(o, false);
        self.set(t, true);
    }

    pub fn undo_id(&mut self, id: JumpId) {
        let [f, o, t] = self.layout.jump_cells[id];
        self.set(f, true);
        self.set(o, true);
        self.set(t, false);
    }

    pub fn apply_jump(&mut self, j: &Jump) -> Result<()> {
        let id = self.resolve(j)?;
        let [f, o, t] = self.layout.jump_cells[id];
        if !self.get(f) {
            return Err(Error::IllegalJump(
                j.to_string(),
                "no man on the starting cell",
            ));
        }
        if !self.get(o) {
            return Err(Error::IllegalJump(j.to_string(), "no man to jump over"));
        }
        if self.get(t) {
            return Err(Error::IllegalJump(
                j.to_string(),
                "landing cell is occupied",
            ));
        }
        self.apply_id(id);
        Ok(())
    }

    /// Reverses `j`, which must have been the last jump applied.
    pub fn undo_jump(&mut self, j: &Jump) -> Result<()> {
        let id = self.resolve(j)?;
        let [f, o, t] = self.layout.jump_cells[id];
        if self.get(f) || self.get(o) || !self.get(t) {
            return Err(Error::IllegalJump(
                j.to_string(),
                "cannot be undone from this position",
            ));
        }
        self.undo_id(id);
        Ok(())
    }

    pub fn render(&self) -> String {
        render_board(&self.layout, |c| self.is_occupied(c))
    }
}

/// One line per row, target row first. `o` man, `.` empty, `X` empty
/// target, `#` outside the geometry's domain.
pub fn render_board(layout: &Layout, occupied: impl Fn(Cell) -> bool) -> String {
    let g = layout.geometry;
    let w = layout.window;
    let mut out = String::new();
    for y in w.y_min..=w.y_max {
        let mut line = String::new();
        if g == GeometryKind::Pablito {
            line.push_str(&" ".repeat((w.y_max - y).max(0) as usize));
        }
        for x in w.x_min..=w.x_max {
            let c = Cell::new(x, y);
            let ch = if layout.index(c).is_none() {
                if g == GeometryKind::Pablito {
                    continue;
                }
                '#'
            } else if occupied(c) {
                'o'
            } else if c == Cell::TARGET {
                'X'
            } else {
                '.'
            };
            line.push(ch);
            if g == GeometryKind::Pablito {
                line.push(' ');
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// A starting army and the jumps it plays.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Solution {
    pub geometry: GeometryKind,
    pub level: i32,
    pub start: Vec<Cell>,
    pub jumps: Vec<Jump>,
}

impl Solution {
    pub fn size(&self) -> usize {
        self.start.len()
    }

    /// Smallest window containing every cell the solution touches.
    pub fn window(&self) -> BoardWindow {
        let touched: Vec<Cell> = self
            .start
            .iter()
            .copied()
            .chain(self.jumps.iter().flat_map(|j| [j.from, j.over, j.to]))
            .collect();
        BoardWindow::covering(&touched)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Mirror image of the solution.
    pub fn mirrored(&self) -> Solution {
        let m = |c: Cell| self.geometry.mirror(c);
        let mut start: Vec<Cell> = self.start.iter().map(|&c| m(c)).collect();
        start.sort();
        Solution {
            geometry: self.geometry,
            level: self.level,
            start,
            jumps: self
                .jumps
                .iter()
                .map(|j| Jump {
                    from: m(j.from),
                    over: m(j.over),
                    to: m(j.to),
                })
                .collect(),
        }
    }

    pub fn render(&self) -> String {
        let layout = Layout::new(self.geometry, self.window());
        let set: HashSet<Cell> = self.start.iter().copied().collect();
        render_board(&layout, |c| set.contains(&c))
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.geometry, self.level)?;
        writeln!(f, "start:")?;
        for c in &self.start {
            writeln!(f, "{c}")?;
        }
        writeln!(f, "jumps:")?;
        for j in &self.jumps {
            writeln!(f, "{j}")?;
        }
        Ok(())
    }
}

impl FromStr for Solution {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse("empty solution file".into()))?;
        let (g, level) = header
            .split_once(char::is_whitespace)
            .ok_or_else(|| Error::Parse(format!("bad header `{header}`")))?;
        let geometry: GeometryKind = g.parse()?;
        let level: i32 = level
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad level in header `{header}`")))?;
        let mut start = Vec::new();
        let mut jumps = Vec::new();
        let mut section = "";
        for (n, line) in lines {
            match line {
                "start:" | "jumps:" => section = line,
                _ if section == "start:" => start.push(
                    line.parse()
                        .map_err(|_| Error::Parse(format!("line {n}: bad cell `{line}`")))?,
                ),
                _ if section == "jumps:" => {
                    let bad = || Error::Parse(format!("line {n}: bad jump `{line}`"));
                    let (a, b) = line.split_once("->").ok_or_else(bad)?;
                    let from: Cell = a.parse().map_err(|_| bad())?;
                    let to: Cell = b.parse().map_err(|_| bad())?;
                    jumps.push(Jump::between(from, to).ok_or_else(bad)?);
                }
                _ => return Err(Error::Parse(format!("line {n}: expected `start:`"))),
            }
        }
        Ok(Solution {
            geometry,
            level,
            start,
            jumps,
        })
    }
}

/// Why a solution failed to verify.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyError {
    OutsideRegion(Cell),
    DuplicateStart(Cell),
    IllegalJump {
        index: usize,
        jump: Jump,
        reason: String,
    },
    TargetNotReached,
}

impl fmt::Display for VerifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyError::OutsideRegion(c) => {
                write!(f, "start cell {c} is outside the starting region")
            }
            VerifyError::DuplicateStart(c) => write!(f, "start cell {c} listed twice"),
            VerifyError::IllegalJump {
                index,
                jump,
                reason,
            } => {
                write!(f, "jump {index} ({jump}) is illegal: {reason}")
            }
            VerifyError::TargetNotReached => f.write_str("no man reaches the target"),
        }
    }
}

impl std::error::Error for VerifyError {}

/// Replays the solution from scratch and checks that it is a legal play
/// from the starting region that puts a man on the target.
pub fn verify_solution(sol: &Solution) -> std::result::Result<(), VerifyError> {
    let g = sol.geometry;
    let mut seen = HashSet::new();
    for &c in &sol.start {
        if c.y < sol.level.max(1) || !g.in_domain(c) {
            return Err(VerifyError::OutsideRegion(c));
        }
        if !seen.insert(c) {
            return Err(VerifyError::DuplicateStart(c));
        }
    }
    let layout = Arc::new(Layout::new(g, sol.window()));
    let mut board = BoardState::with_men(layout, &sol.start).expect("window covers the start");
    for (index, j) in sol.jumps.iter().enumerate() {
        board.apply_jump(j).map_err(|e| VerifyError::IllegalJump {
            index,
            jump: *j,
            reason: match e {
                Error::IllegalJump(_, why) => why.to_string(),
                other => other.to_string(),
            },
        })?;
    }
    if board.is_occupied(Cell::TARGET) {
        Ok(())
    } else {
        Err(VerifyError::TargetNotReached)
    }
}

/// Total weight before any jump and after each jump.
pub fn weight_trace(sol: &Solution, f: &PagodaField) -> Vec<SigmaValue> {
    let mut men: HashSet<Cell> = sol.start.iter().copied().collect();
    let mut w: SigmaValue = men.iter().map(|&c| f.weight(c)).sum();
    let mut out = vec![w];
    for j in &sol.jumps {
        men.remove(&j.from);
        men.remove(&j.over);
        men.insert(j.to);
        w = w - f.weight(j.from) - f.weight(j.over) + f.weight(j.to);
        out.push(w);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderOutcome {
    Ordered(Solution),
    /// The whole search space was explored without success.
    Impossible,
    BudgetExhausted,
}

pub const DEFAULT_ORDER_BUDGET: u64 = 10_000_000;

/// Finds an order in which every jump of `multiset` can be played legally
/// from `start`, ending with a man on the target.
pub fn order_jumps(
    g: GeometryKind,
    level: i32,
    start: &[Cell],
    multiset: &[Jump],
    budget: u64,
) -> Result<OrderOutcome> {
    for j in multiset {
        if !j.is_legal_for(g) {
            return Err(Error::IllegalJump(
                j.to_string(),
                "not a jump of this geometry",
            ));
        }
    }
    let touched: Vec<Cell> = start
        .iter()
        .copied()
        .chain(multiset.iter().flat_map(|j| [j.from, j.over, j.to]))
        .collect();
    let layout = Arc::new(Layout::new(g, BoardWindow::covering(&touched)));
    let board = BoardState::with_men(layout.clone(), start)?;

    let mut distinct: Vec<JumpId> = Vec::new();
    let mut counts: Vec<u32> = Vec::new();
    let mut pos: HashMap<JumpId, usize> = HashMap::new();
    for j in multiset {
        let id = layout.jump_id(j).expect("window covers every jump");
        let k = *pos.entry(id).or_insert_with(|| {
            distinct.push(id);
            counts.push(0);
            distinct.len() - 1
        });
        counts[k] += 1;
    }
    // How many multiset jumps need a man on each cell (as mover or victim).
    let mut demand = vec![0u32; layout.len()];
    for (k, &id) in distinct.iter().enumerate() {
        let [f, o, _] = layout.jump_cells[id];
        demand[f] += counts[k];
        demand[o] += counts[k];
    }
    let mut search = OrderSearch {
        layout: &layout,
        distinct: &distinct,
        counts,
        demand,
        board,
        played: Vec::with_capacity(multiset.len()),
        failed: HashSet::new(),
        nodes: 0,
        budget,
        exhausted: false,
    };
    let found = search.run(multiset.len());
    Ok(if found {
        OrderOutcome::Ordered(Solution {
            geometry: g,
            level,
            start: start.to_vec(),
            jumps: search.played.iter().map(|&id| layout.jumps[id]).collect(),
        })
    } else if search.exhausted {
        OrderOutcome::BudgetExhausted
    } else {
        OrderOutcome::Impossible
    })
}

struct OrderSearch<'a> {
    layout: &'a Layout,
    distinct: &'a [JumpId],
    counts: Vec<u32>,
    demand: Vec<u32>,
    board: BoardState,
    played: Vec<JumpId>,
    failed: HashSet<Vec<u32>>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl OrderSearch<'_> {
    fn run(&mut self, left: usize) -> bool {
        if left == 0 {
            return self.board.is_occupied(Cell::TARGET);
        }
        if self.failed.contains(&self.counts) {
            return false;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return false;
        }
        let mut options: Vec<(u32, usize)> = (0..self.distinct.len())
            .filter(|&k| self.counts[k] > 0 && self.board.id_is_legal(self.distinct[k]))
            .map(|k| {
                let [f, o, _] = self.layout.jump_cells[self.distinct[k]];
                // Men nobody else needs go first.
                let contention = self.demand[f] + self.demand[o];
                (contention, k)
            })
            .collect();
        options.sort_unstable();
        for (_, k) in options {
            let id = self.distinct[k];
            let [f, o, _] = self.layout.jump_cells[id];
            self.counts[k] -= 1;
            self.demand[f] -= 1;
            self.demand[o] -= 1;
            self.board.apply_id(id);
            self.played.push(id);
            if self.run(left - 1) {
                return true;
            }
            self.played.pop();
            self.board.undo_id(id);
            self.demand[f] += 1;
            self.demand[o] += 1;
            self.counts[k] += 1;
            if self.exhausted {
                return false;
            }
        }
        self.failed.insert(self.counts.clone());
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{starting_region, Dir};
    use crate::pagoda::basic_field;

    fn c(x: i32, y: i32) -> Cell {
        Cell::new(x, y)
    }

    fn two_man() -> Solution {
        Solution {
            geometry: GeometryKind::Conway,
            level: 1,
            start: vec![c(0, 1), c(0, 2)],
            jumps: vec![Jump::new(c(0, 2), Dir(0, -1))],
        }
    }

    #[test]
    fn two_man_army_verifies() {
        assert_eq!(verify_solution(&two_man()), Ok(()));
    }

    #[test]
    fn reordered_jumps_fail_at_index_zero() {
        let good = Solution {
            geometry: GeometryKind::Conway,
            level: 2,
            start: vec![c(0, 2), c(0, 3), c(-1, 2), c(-2, 2)],
            jumps: vec![
                Jump::between(c(0, 3), c(0, 1)).unwrap(),
                Jump::between(c(-2, 2), c(0, 2)).unwrap(),
                Jump::between(c(0, 2), c(0, 0)).unwrap(),
            ],
        };
        // 0,3 over 0,2 lands on 0,1; then -2,2 over -1,2 lands on 0,2; then 0,2 over 0,1 reaches 0,0.
        assert_eq!(verify_solution(&good), Ok(()));
        let mut bad = good.clone();
        bad.jumps.reverse();
        assert!(matches!(
            verify_solution(&bad),
            Err(VerifyError::IllegalJump { index: 0, .. })
        ));
    }

    #[test]
    fn start_checks() {
        let mut s = two_man();
        s.start.push(c(0, 1));
        assert_eq!(
            verify_solution(&s),
            Err(VerifyError::DuplicateStart(c(0, 1)))
        );
        let mut s = two_man();
        s.level = 2;
        assert_eq!(
            verify_solution(&s),
            Err(VerifyError::OutsideRegion(c(0, 1)))
        );
        let mut s = two_man();
        s.jumps.clear();
        assert_eq!(verify_solution(&s), Err(VerifyError::TargetNotReached));
    }

    #[test]
    fn apply_undo_roundtrip() {
        let mut b = BoardState::new(GeometryKind::Conway, BoardWindow::new(-2, 2, 0, 3));
        b = BoardState::with_men(b.layout.clone(), &[c(0, 1), c(0, 2)]).unwrap();
        let before = b.clone();
        let j = Jump::new(c(0, 2), Dir(0, -1));
        let down = Jump::new(c(0, 1), Dir(0, 1));
        assert_eq!(b.legal_jumps(), vec![j, down]);
        b.apply_jump(&j).unwrap();
        assert_eq!(b.cells(), vec![c(0, 0)]);
        assert!(b.apply_jump(&j).is_err());
        b.undo_jump(&j).unwrap();
        assert_eq!(b, before);
        assert!(
            BoardState::new(GeometryKind::Conway, BoardWindow::new(-2, 2, 0, 3))
                .legal_jumps()
                .is_empty()
        );
    }

    #[test]
    fn legal_jumps_full_region_matches_double_loop() {
        let g = GeometryKind::Conway;
        let w = BoardWindow::default_for(g, 4);
        let region = starting_region(g, 4, &w).unwrap();
        let b = BoardState::with_men(Arc::new(Layout::new(g, w)), &region).unwrap();
        let set: HashSet<Cell> = region.iter().copied().collect();
        let mut expected = 0;
        for y in w.y_min..=w.y_max {
            for x in w.x_min..=w.x_max {
                for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                    let (o, t) = (c(x + dx, y + dy), c(x + 2 * dx, y + 2 * dy));
                    if set.contains(&c(x, y))
                        && set.contains(&o)
                        && w.contains(t)
                        && !set.contains(&t)
                    {
                        expected += 1;
                    }
                }
            }
        }
        // Only the upward jumps from row 5 over row 4 into row 3.
        assert_eq!(b.legal_jumps().len(), expected);
        assert_eq!(expected, w.width() as usize);
    }

    #[test]
    fn text_roundtrip() {
        let s = two_man();
        let text = s.to_text();
        assert_eq!(text, "conway 1\nstart:\n0,1\n0,2\njumps:\n0,2 -> 0,0\n");
        let back: Solution = text.parse().unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn two_man_trace() {
        let s = two_man();
        let f = basic_field(
            GeometryKind::Conway,
            BoardWindow::default_for(GeometryKind::Conway, 1),
        );
        assert_eq!(weight_trace(&s, &f), vec![SigmaValue::ONE, SigmaValue::ONE]);
    }

    #[test]
    fn ordering_small_cases() {
        let g = GeometryKind::Conway;
        let single = [Jump::new(c(0, 2), Dir(0, -1))];
        let out = order_jumps(g, 1, &[c(0, 1), c(0, 2)], &single, 1000).unwrap();
        assert!(matches!(out, OrderOutcome::Ordered(ref s) if s.jumps == single));
        // Three men in a line: a horizontal jump has to come first.
        let start = [c(0, 2), c(1, 1), c(2, 1)];
        let jumps = [
            Jump::between(c(0, 2), c(0, 0)).unwrap(),
            Jump::between(c(2, 1), c(0, 1)).unwrap(),
        ];
        match order_jumps(g, 1, &start, &jumps, 1000).unwrap() {
            OrderOutcome::Ordered(s) => {
                assert_eq!(s.jumps, vec![jumps[1], jumps[0]]);
                assert_eq!(verify_solution(&s), Ok(()));
            }
            other => panic!("{other:?}"),
        }
        let unorderable = [Jump::between(c(0, 3), c(0, 1)).unwrap()];
        assert_eq!(
            order_jumps(g, 1, &[c(0, 2), c(0, 3)], &unorderable, 1000).unwrap(),
            OrderOutcome::Impossible
        );
    }

    #[test]
    fn render_shapes() {
        let s = two_man();
        assert_eq!(s.render(), "X\no\no\n");
        let b = BoardState::new(GeometryKind::Skew, BoardWindow::new(-1, 1, 0, 1));
        assert_eq!(b.render(), "#X#\n.#.\n");
        let p = BoardState::new(GeometryKind::Pablito, BoardWindow::triangle(2));
        assert_eq!(p.render(), "  X\n . .\n. . .\n");
    }
}
