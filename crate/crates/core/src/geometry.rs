//! The five army geometries: cells, jump directions, board windows and the
//! indexed board layouts shared by the field, engine and solver modules.
//!
//! Coordinates put the target cell at (0, 0) with rows numbered away from
//! it, so a level-n army starts in rows y ≥ n. The hexagonal lattice is
//! embedded in the square lattice with the six directions (±1, 0), (0, ±1)
//! and ±(1, 1). Pablito's triangle uses the same embedding restricted to
//! 0 ≤ x ≤ y, which makes row r hold exactly r + 1 cells.

use std::fmt;
use std::str::FromStr;

use crate::engine::Solution;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeometryKind {
    Conway,
    Skew,
    Diagonal,
    Hexagonal,
    Pablito,
}

impl GeometryKind {
    pub const ALL: [GeometryKind; 5] = [
        GeometryKind::Conway,
        GeometryKind::Skew,
        GeometryKind::Pablito,
        GeometryKind::Hexagonal,
        GeometryKind::Diagonal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeometryKind::Conway => "conway",
            GeometryKind::Skew => "skew",
            GeometryKind::Diagonal => "diagonal",
            GeometryKind::Hexagonal => "hexagonal",
            GeometryKind::Pablito => "pablito",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            GeometryKind::Conway => "Conway's",
            GeometryKind::Skew => "Skew",
            GeometryKind::Diagonal => "Diagonal",
            GeometryKind::Hexagonal => "Hexagonal",
            GeometryKind::Pablito => "Pablito's",
        }
    }

    /// Jump directions, upward (toward the target) ones first.
    pub fn directions(self) -> &'static [Dir] {
        const CONWAY: [Dir; 4] = [Dir(0, -1), Dir(-1, 0), Dir(1, 0), Dir(0, 1)];
        const SKEW: [Dir; 4] = [Dir(-1, -1), Dir(1, -1), Dir(-1, 1), Dir(1, 1)];
        const DIAGONAL: [Dir; 8] = [
            Dir(0, -1),
            Dir(-1, -1),
            Dir(1, -1),
            Dir(-1, 0),
            Dir(1, 0),
            Dir(-1, 1),
            Dir(1, 1),
            Dir(0, 1),
        ];
        const HEX: [Dir; 6] = [
            Dir(0, -1),
            Dir(-1, -1),
            Dir(-1, 0),
            Dir(1, 0),
            Dir(1, 1),
            Dir(0, 1),
        ];
        match self {
            GeometryKind::Conway => &CONWAY,
            GeometryKind::Skew => &SKEW,
            GeometryKind::Diagonal => &DIAGONAL,
            GeometryKind::Hexagonal | GeometryKind::Pablito => &HEX,
        }
    }

    pub fn in_domain(self, c: Cell) -> bool {
        match self {
            GeometryKind::Skew => (c.x + c.y).rem_euclid(2) == 0,
            GeometryKind::Pablito => 0 <= c.x && c.x <= c.y,
            _ => true,
        }
    }

    /// Left-right reflection that fixes the target and preserves rows.
    pub fn mirror(self, c: Cell) -> Cell {
        match self {
            GeometryKind::Hexagonal | GeometryKind::Pablito => Cell::new(c.y - c.x, c.y),
            _ => Cell::new(-c.x, c.y),
        }
    }
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeometryKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "conway" | "conways" | "conway's" => Ok(GeometryKind::Conway),
            "skew" => Ok(GeometryKind::Skew),
            "diagonal" => Ok(GeometryKind::Diagonal),
            "hexagonal" | "hex" => Ok(GeometryKind::Hexagonal),
            "pablito" | "pablitos" | "pablito's" => Ok(GeometryKind::Pablito),
            other => Err(Error::UnknownGeometry(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dir(pub i32, pub i32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    // Field order gives row-major ordering: y first.
    pub y: i32,
    pub x: i32,
}

impl Cell {
    pub const TARGET: Cell = Cell { x: 0, y: 0 };

    pub const fn new(x: i32, y: i32) -> Self {
        Cell { x, y }
    }

    pub fn step(self, d: Dir, k: i32) -> Cell {
        Cell::new(self.x + k * d.0, self.y + k * d.1)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

impl FromStr for Cell {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad cell `{s}`"));
        let (x, y) = s.trim().split_once(',').ok_or_else(bad)?;
        Ok(Cell::new(
            x.trim().parse().map_err(|_| bad())?,
            y.trim().parse().map_err(|_| bad())?,
        ))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Jump {
    pub from: Cell,
    pub over: Cell,
    pub to: Cell,
}

impl Jump {
    pub fn new(from: Cell, d: Dir) -> Jump {
        Jump {
            from,
            over: from.step(d, 1),
            to: from.step(d, 2),
        }
    }

    /// Builds the jump between two cells two steps apart.
    pub fn between(from: Cell, to: Cell) -> Option<Jump> {
        let (dx, dy) = (to.x - from.x, to.y - from.y);
        if dx % 2 != 0 || dy % 2 != 0 || (dx == 0 && dy == 0) {
            return None;
        }
        Some(Jump::new(from, Dir(dx / 2, dy / 2)))
    }

    pub fn dir(&self) -> Dir {
        Dir(self.over.x - self.from.x, self.over.y - self.from.y)
    }

    /// True when `over` is the midpoint and the step is a legal direction.
    pub fn is_legal_for(&self, g: GeometryKind) -> bool {
        let d = self.dir();
        self.to == self.from.step(d, 2)
            && g.directions().contains(&d)
            && g.in_domain(self.from)
            && g.in_domain(self.over)
            && g.in_domain(self.to)
    }
}

impl fmt::Display for Jump {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.from, self.to)
    }
}

/// Inclusive rectangle of cells; Pablito boards use `x ∈ [0, depth]`,
/// `y ∈ [0, depth]` intersected with the triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BoardWindow {
    pub x_min: i32,
    pub x_max: i32,
    pub y_min: i32,
    pub y_max: i32,
}

impl BoardWindow {
    pub fn new(x_min: i32, x_max: i32, y_min: i32, y_max: i32) -> Self {
        BoardWindow {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    pub fn triangle(depth: i32) -> Self {
        BoardWindow::new(0, depth, 0, depth)
    }

    /// Search window: x ∈ [−(level+6), level+6], y ∈ [0, level+6]; Pablito
    /// gets a triangle of depth level+4.
    pub fn default_for(g: GeometryKind, level: i32) -> Self {
        match g {
            GeometryKind::Pablito => BoardWindow::triangle(level + 4),
            _ => BoardWindow::new(-(level + 6), level + 6, 0, level + 6),
        }
    }

    /// A much larger window for bound computations, wide enough that every
    /// exponent class used by the lower-bound and profile tables is complete.
    pub fn analysis(g: GeometryKind, level: i32) -> Self {
        let r = 2 * level + 8;
        match g {
            GeometryKind::Pablito => BoardWindow::triangle(r),
            _ => BoardWindow::new(-r, r, 0, r),
        }
    }

    /// Smallest window holding every given cell plus the target.
    pub fn covering<'a>(cells: impl IntoIterator<Item = &'a Cell>) -> Self {
        let mut w = BoardWindow::new(0, 0, 0, 0);
        for c in cells {
            w.x_min = w.x_min.min(c.x);
            w.x_max = w.x_max.max(c.x);
            w.y_min = w.y_min.min(c.y);
            w.y_max = w.y_max.max(c.y);
        }
        w
    }

    pub fn contains(&self, c: Cell) -> bool {
        self.x_min <= c.x && c.x <= self.x_max && self.y_min <= c.y && c.y <= self.y_max
    }

    pub fn width(&self) -> i32 {
        self.x_max - self.x_min + 1
    }

    pub fn height(&self) -> i32 {
        self.y_max - self.y_min + 1
    }
}

impl fmt::Display for BoardWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{},{}:{}",
            self.x_min, self.x_max, self.y_min, self.y_max
        )
    }
}

impl FromStr for BoardWindow {
    type Err = Error;
    /// `XMIN:XMAX,YMIN:YMAX`, or a single depth `D` for triangles.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Parse(format!(
                "bad window `{s}` (expected XMIN:XMAX,YMIN:YMAX or DEPTH)"
            ))
        };
        let s = s.trim();
        if let Ok(depth) = s.parse::<i32>() {
            return Ok(BoardWindow::triangle(depth));
        }
        let (xs, ys) = s.split_once(',').ok_or_else(bad)?;
        let range = |t: &str| -> Result<(i32, i32)> {
            let (a, b) = t.split_once(':').ok_or_else(bad)?;
            Ok((
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            ))
        };
        let (x_min, x_max) = range(xs)?;
        let (y_min, y_max) = range(ys)?;
        if x_min > x_max || y_min > y_max {
            return Err(bad());
        }
        Ok(BoardWindow::new(x_min, x_max, y_min, y_max))
    }
}

pub fn jump_directions(g: GeometryKind) -> &'static [Dir] {
    g.directions()
}

/// Minimal number of unit steps along the geometry's directions.
pub fn metric_distance(g: GeometryKind, c: Cell, t: Cell) -> i32 {
    let (dx, dy) = (c.x - t.x, c.y - t.y);
    match g {
        GeometryKind::Conway => dx.abs() + dy.abs(),
        GeometryKind::Skew | GeometryKind::Diagonal => dx.abs().max(dy.abs()),
        GeometryKind::Hexagonal | GeometryKind::Pablito => {
            if (dx >= 0) == (dy >= 0) || dx == 0 || dy == 0 {
                dx.abs().max(dy.abs())
            } else {
                dx.abs() + dy.abs()
            }
        }
    }
}

/// In-window, in-domain cells at or below the starting line `level`.
pub fn starting_region(g: GeometryKind, level: i32, w: &BoardWindow) -> Result<Vec<Cell>> {
    if level < 1 {
        return Err(Error::InvalidLevel(level));
    }
    if w.y_max < level {
        return Err(Error::WindowTooShallow {
            level,
            depth: w.y_max,
        });
    }
    Ok(cells_in(g, w)
        .into_iter()
        .filter(|c| c.y >= level)
        .collect())
}

fn cells_in(g: GeometryKind, w: &BoardWindow) -> Vec<Cell> {
    let mut out = Vec::new();
    for y in w.y_min..=w.y_max {
        for x in w.x_min..=w.x_max {
            let c = Cell::new(x, y);
            if g.in_domain(c) {
                out.push(c);
            }
        }
    }
    out
}

/// Every in-window jump exactly once, sorted by landing cell then direction.
pub fn enumerate_jumps(g: GeometryKind, w: &BoardWindow) -> Vec<Jump> {
    let mut out = Vec::new();
    for to in cells_in(g, w) {
        for &d in g.directions() {
            // `d` is the direction of travel, so the jump starts two steps back.
            let from = to.step(d, -2);
            let j = Jump::new(from, d);
            if w.contains(j.from)
                && w.contains(j.over)
                && g.in_domain(j.from)
                && g.in_domain(j.over)
            {
                out.push(j);
            }
        }
    }
    out
}

/// Index of a jump within a layout.
pub type JumpId = usize;

/// A window with its cells and jumps indexed for fast lookups.
#[derive(Clone, Debug)]
pub struct Layout {
    pub geometry: GeometryKind,
    pub window: BoardWindow,
    pub cells: Vec<Cell>,
    pub jumps: Vec<Jump>,
    /// (from, over, to) cell indices per jump.
    pub jump_cells: Vec<[usize; 3]>,
    /// Jump starting at a cell in each direction, indexed `cell * ndirs + dir`.
    pub jump_from: Vec<Option<JumpId>>,
    grid: Vec<Option<usize>>,
}

impl Layout {
    pub fn new(geometry: GeometryKind, window: BoardWindow) -> Self {
        Layout::masked(geometry, window, |_| true)
    }

    /// A window with only the cells accepted by `keep`; jumps touching a
    /// dropped cell are dropped too.
    pub fn masked(
        geometry: GeometryKind,
        window: BoardWindow,
        keep: impl Fn(Cell) -> bool,
    ) -> Self {
        let cells: Vec<Cell> = cells_in(geometry, &window)
            .into_iter()
            .filter(|&c| keep(c))
            .collect();
        let mut grid = vec![None; (window.width() * window.height()).max(0) as usize];
        for (i, c) in cells.iter().enumerate() {
            let k = ((c.y - window.y_min) * window.width() + (c.x - window.x_min)) as usize;
            grid[k] = Some(i);
        }
        let mut layout = Layout {
            geometry,
            window,
            cells,
            jumps: Vec::new(),
            jump_cells: Vec::new(),
            jump_from: Vec::new(),
            grid,
        };
        let jumps: Vec<Jump> = enumerate_jumps(geometry, &window)
            .into_iter()
            .filter(|j| {
                [j.from, j.over, j.to]
                    .iter()
                    .all(|&c| layout.index(c).is_some())
            })
            .collect();
        let nd = geometry.directions().len();
        let mut jump_from = vec![None; layout.cells.len() * nd];
        let mut jump_cells = Vec::with_capacity(jumps.len());
        for (id, j) in jumps.iter().enumerate() {
            let f = layout.index(j.from).expect("jump inside window");
            let o = layout.index(j.over).expect("jump inside window");
            let t = layout.index(j.to).expect("jump inside window");
            jump_cells.push([f, o, t]);
            let di = geometry
                .directions()
                .iter()
                .position(|&d| d == j.dir())
                .expect("legal direction");
            jump_from[f * nd + di] = Some(id);
        }
        layout.jumps = jumps;
        layout.jump_cells = jump_cells;
        layout.jump_from = jump_from;
        layout
    }

    pub fn index(&self, c: Cell) -> Option<usize> {
        if !self.window.contains(c) {
            return None;
        }
        let k =
            ((c.y - self.window.y_min) * self.window.width() + (c.x - self.window.x_min)) as usize;
        self.grid[k]
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn ndirs(&self) -> usize {
        self.geometry.directions().len()
    }

    pub fn jump_id(&self, j: &Jump) -> Option<JumpId> {
        let f = self.index(j.from)?;
        let di = self
            .geometry
            .directions()
            .iter()
            .position(|&d| d == j.dir())?;
        let id = self.jump_from[f * self.ndirs() + di]?;
        (self.jumps[id] == *j).then_some(id)
    }

    /// True if the reflection maps the window's cells onto themselves.
    pub fn mirror_closed(&self) -> bool {
        self.cells
            .iter()
            .all(|&c| self.index(self.geometry.mirror(c)).is_some())
    }

    pub fn region_indices(&self, level: i32) -> Vec<usize> {
        (0..self.cells.len())
            .filter(|&i| self.cells[i].y >= level)
            .collect()
    }
}

/// Re-expresses a hexagonal solution that never jumps horizontally as a skew
/// solution: (x, y) ↦ (2x − y, y) sends the two slanted hexagonal lines onto
/// the two diagonals and keeps every row in place.
pub fn hex_to_skew(sol: &Solution) -> Result<Solution> {
    if !matches!(
        sol.geometry,
        GeometryKind::Hexagonal | GeometryKind::Pablito
    ) {
        return Err(Error::Translation(format!(
            "expected a hexagonal solution, got {}",
            sol.geometry
        )));
    }
    let map = |c: Cell| Cell::new(2 * c.x - c.y, c.y);
    let mut jumps = Vec::with_capacity(sol.jumps.len());
    for (i, j) in sol.jumps.iter().enumerate() {
        if j.dir().1 == 0 {
            return Err(Error::Translation(format!("jump {i} ({j}) is horizontal")));
        }
        jumps.push(Jump {
            from: map(j.from),
            over: map(j.over),
            to: map(j.to),
        });
    }
    let mut start: Vec<Cell> = sol.start.iter().map(|&c| map(c)).collect();
    start.sort();
    Ok(Solution {
        geometry: GeometryKind::Skew,
        level: sol.level,
        start,
        jumps,
    })
}
