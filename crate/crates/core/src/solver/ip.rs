//! Jump-count integer model: STA + A·J = FIN with per-cell start bounds,
//! LP-format export and two lattice relaxations.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::bounds::ExponentProfile;
use crate::error::{Error, Result};
use crate::geometry::{BoardWindow, Cell, GeometryKind, Jump, Layout};
use crate::pagoda::{Exponent, PagodaField};

/// What the final position must be.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Finish {
    Target,
    /// A multi-man position, usually the anchor cells of an improved field.
    Anchors(Vec<Cell>),
}

/// A named equality Σ x = rhs over STA (cell indices) or J (jump indices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumRow {
    pub name: String,
    pub vars: Vec<usize>,
    pub rhs: i64,
}

#[derive(Clone, Debug)]
pub struct IPModel {
    pub geometry: GeometryKind,
    pub level: i32,
    pub window: BoardWindow,
    pub cells: Vec<Cell>,
    pub jumps: Vec<Jump>,
    /// (from, over, to) rows of each column of A: −1, −1, +1.
    pub columns: Vec<[usize; 3]>,
    pub smax: Vec<i64>,
    pub smin: Vec<i64>,
    pub fin: Vec<i64>,
    /// Σ STA over cells of one exponent = n_i.
    pub exponent_rows: Vec<SumRow>,
    /// Σ J over jumps of one loss class = k.
    pub loss_rows: Vec<SumRow>,
}

/// Model with SMAX = 1 on the starting region and 0 elsewhere.
pub fn build_ip(
    g: GeometryKind,
    level: i32,
    window: BoardWindow,
    finish: Finish,
) -> Result<IPModel> {
    if level < 1 {
        return Err(Error::InvalidLevel(level));
    }
    let layout = Layout::new(g, window);
    let mut fin = vec![0i64; layout.len()];
    let finals = match finish {
        Finish::Target => vec![Cell::TARGET],
        Finish::Anchors(cells) => cells,
    };
    for c in finals {
        fin[layout.index(c).ok_or(Error::CellOutside(c))?] = 1;
    }
    let smax = layout
        .cells
        .iter()
        .map(|c| i64::from(c.y >= level))
        .collect();
    Ok(IPModel {
        geometry: g,
        level,
        window,
        smin: vec![0; layout.len()],
        smax,
        fin,
        cells: layout.cells,
        jumps: layout.jumps,
        columns: layout.jump_cells,
        exponent_rows: Vec::new(),
        loss_rows: Vec::new(),
    })
}

fn coord(v: i32) -> String {
    if v < 0 {
        format!("m{}", -v)
    } else {
        v.to_string()
    }
}

impl IPModel {
    pub fn index(&self, c: Cell) -> Option<usize> {
        self.cells.iter().position(|&x| x == c)
    }

    pub fn sta_name(&self, m: usize) -> String {
        let c = self.cells[m];
        format!("STA_{}_{}", coord(c.x), coord(c.y))
    }

    pub fn jump_name(n: usize) -> String {
        format!("J_{n}")
    }

    /// Pins the starting position: SMIN = SMAX = 1 on `start`, 0 elsewhere.
    pub fn fix_start(&mut self, start: &[Cell]) -> Result<()> {
        self.smin.iter_mut().for_each(|v| *v = 0);
        self.smax.iter_mut().for_each(|v| *v = 0);
        for &c in start {
            let m = self.index(c).ok_or(Error::CellOutside(c))?;
            self.smin[m] = 1;
            self.smax[m] = 1;
        }
        Ok(())
    }

    /// Adds Σ STA = n_e for every exponent `e` in `exps`, using the counts of
    /// `profile` and the cells of `f` (matched by coordinates). Returns the
    /// number of rows added.
    pub fn add_profile_rows(
        &mut self,
        f: &PagodaField,
        profile: &ExponentProfile,
        exps: std::ops::RangeInclusive<i32>,
    ) -> usize {
        let mut added = 0;
        for e in exps {
            let vars: Vec<usize> = (0..self.cells.len())
                .filter(|&m| {
                    self.smax[m] > 0 && f.exponent(self.cells[m]) == Some(Exponent::Finite(e))
                })
                .collect();
            self.exponent_rows.push(SumRow {
                name: format!("exp_{}", coord(e)),
                vars,
                rhs: profile.count(e) as i64,
            });
            added += 1;
        }
        added
    }

    /// Adds Σ J = k over the given jump indices.
    pub fn add_loss_row(&mut self, name: &str, jumps: Vec<usize>, k: i64) {
        self.loss_rows.push(SumRow {
            name: name.to_string(),
            vars: jumps,
            rhs: k,
        });
    }

    /// A·J as a per-cell vector.
    fn apply(&self, counts: &[i64]) -> Vec<i64> {
        let mut v = vec![0i64; self.cells.len()];
        for (n, &k) in counts.iter().enumerate() {
            if k != 0 {
                let [f, o, t] = self.columns[n];
                v[f] -= k;
                v[o] -= k;
                v[t] += k;
            }
        }
        v
    }
}

fn write_terms(out: &mut String, terms: &[(i64, String)]) {
    for (i, (coef, name)) in terms.iter().enumerate() {
        if i > 0 && i % 8 == 0 {
            out.push_str("\n   ");
        }
        let sign = if *coef < 0 { '-' } else { '+' };
        let mag = coef.abs();
        if i == 0 && *coef > 0 {
            if mag == 1 {
                let _ = write!(out, " {name}");
            } else {
                let _ = write!(out, " {mag} {name}");
            }
        } else if mag == 1 {
            let _ = write!(out, " {sign} {name}");
        } else {
            let _ = write!(out, " {sign} {mag} {name}");
        }
    }
    if terms.is_empty() {
        out.push_str(" 0");
    }
}

/// LP-format text: minimise the number of starting men subject to one
/// balance row per cell plus any added rows.
pub fn export_lp(model: &IPModel) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ {} level {} window {}",
        model.geometry.name(),
        model.level,
        model.window
    );
    out.push_str("Minimize\n obj:");
    let obj: Vec<(i64, String)> = (0..model.cells.len())
        .map(|m| (1, model.sta_name(m)))
        .collect();
    write_terms(&mut out, &obj);
    out.push_str("\nSubject To\n");

    let mut by_cell: Vec<Vec<(i64, usize)>> = vec![Vec::new(); model.cells.len()];
    for (n, &[f, o, t]) in model.columns.iter().enumerate() {
        by_cell[f].push((-1, n));
        by_cell[o].push((-1, n));
        by_cell[t].push((1, n));
    }
    for (m, col) in by_cell.iter().enumerate() {
        let mut terms = vec![(1, model.sta_name(m))];
        let mut col = col.clone();
        col.sort_by_key(|&(_, n)| n);
        terms.extend(col.iter().map(|&(a, n)| (a, IPModel::jump_name(n))));
        let name = model.sta_name(m).replacen("STA", "bal", 1);
        let _ = write!(out, " {name}:");
        write_terms(&mut out, &terms);
        let _ = writeln!(out, " = {}", model.fin[m]);
    }
    for row in &model.exponent_rows {
        let _ = write!(out, " {}:", row.name);
        let terms: Vec<(i64, String)> = row.vars.iter().map(|&m| (1, model.sta_name(m))).collect();
        write_terms(&mut out, &terms);
        let _ = writeln!(out, " = {}", row.rhs);
    }
    for row in &model.loss_rows {
        let _ = write!(out, " {}:", row.name);
        let terms: Vec<(i64, String)> = row
            .vars
            .iter()
            .map(|&n| (1, IPModel::jump_name(n)))
            .collect();
        write_terms(&mut out, &terms);
        let _ = writeln!(out, " = {}", row.rhs);
    }

    out.push_str("Bounds\n");
    for m in 0..model.cells.len() {
        let (lo, hi) = (model.smin[m], model.smax[m]);
        if lo == hi {
            let _ = writeln!(out, " {} = {lo}", model.sta_name(m));
        } else if !(lo == 0 && hi == 1) {
            let _ = writeln!(out, " {lo} <= {} <= {hi}", model.sta_name(m));
        }
    }
    out.push_str("Generals\n");
    let gens: Vec<String> = (0..model.jumps.len()).map(IPModel::jump_name).collect();
    for chunk in gens.chunks(10) {
        let _ = writeln!(out, " {}", chunk.join(" "));
    }
    out.push_str("Binaries\n");
    let bins: Vec<String> = (0..model.cells.len())
        .filter(|&m| model.smin[m] == 0 && model.smax[m] == 1)
        .map(|m| model.sta_name(m))
        .collect();
    for chunk in bins.chunks(10) {
        let _ = writeln!(out, " {}", chunk.join(" "));
    }
    out.push_str("End\n");
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeOutcome {
    /// Feasible; in unsigned mode carries one nonnegative jump-count vector.
    Feasible(Option<Vec<i64>>),
    Infeasible,
    Indeterminate,
}

/// True if STA = FIN − A·J lies within the start bounds and the added rows
/// hold.
pub fn check_jump_vector(model: &IPModel, counts: &[i64]) -> bool {
    if counts.len() != model.jumps.len() || counts.iter().any(|&k| k < 0) {
        return false;
    }
    let aj = model.apply(counts);
    let sta: Vec<i64> = model.fin.iter().zip(&aj).map(|(f, a)| f - a).collect();
    let boxed = (0..sta.len()).all(|m| model.smin[m] <= sta[m] && sta[m] <= model.smax[m]);
    boxed
        && model
            .exponent_rows
            .iter()
            .all(|r| r.vars.iter().map(|&m| sta[m]).sum::<i64>() == r.rhs)
        && model
            .loss_rows
            .iter()
            .all(|r| r.vars.iter().map(|&n| counts[n]).sum::<i64>() == r.rhs)
}

pub const DEFAULT_LATTICE_BUDGET: u64 = 1_000_000;

/// Decides whether the balance rows have an integer solution with STA in
/// bounds. Signed mode lets jump counts go negative; unsigned mode runs a
/// bounded search over nonnegative counts. Added exponent and loss rows are
/// honoured only in unsigned mode.
pub fn lattice_check(model: &IPModel, signed: bool) -> LatticeOutcome {
    lattice_check_with_budget(model, signed, DEFAULT_LATTICE_BUDGET)
}

pub fn lattice_check_with_budget(model: &IPModel, signed: bool, budget: u64) -> LatticeOutcome {
    if signed {
        signed_check(model, budget)
    } else {
        unsigned_check(model, budget)
    }
}

/// Row-echelon basis of the lattice spanned by the columns of A.
fn echelon(model: &IPModel) -> Option<Vec<(usize, Vec<i64>)>> {
    let m = model.cells.len();
    let mut rows: Vec<Vec<i64>> = model
        .columns
        .iter()
        .map(|&[f, o, t]| {
            let mut r = vec![0i64; m];
            r[f] -= 1;
            r[o] -= 1;
            r[t] += 1;
            r
        })
        .collect();
    let mut basis = Vec::new();
    for col in 0..m {
        loop {
            let live: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][col] != 0).collect();
            if live.len() <= 1 {
                if let Some(&i) = live.first() {
                    let mut p = rows.swap_remove(i);
                    if p[col] < 0 {
                        p.iter_mut().for_each(|x| *x = -*x);
                    }
                    basis.push((col, p));
                }
                break;
            }
            let piv = *live
                .iter()
                .min_by_key(|&&i| rows[i][col].abs())
                .expect("nonempty");
            let p = rows[piv].clone();
            for &i in &live {
                if i == piv {
                    continue;
                }
                let q = rows[i][col] / p[col];
                for (x, y) in rows[i].iter_mut().zip(&p) {
                    *x = x.checked_sub(q.checked_mul(*y)?)?;
                }
            }
        }
        rows.retain(|r| r.iter().any(|&x| x != 0));
    }
    Some(basis)
}

fn reduce(basis: &[(usize, Vec<i64>)], v: &mut [i64]) -> Option<()> {
    for (col, p) in basis {
        let q = v[*col].div_euclid(p[*col]);
        if q != 0 {
            for (x, y) in v.iter_mut().zip(p) {
                *x = x.checked_sub(q.checked_mul(*y)?)?;
            }
        }
    }
    Some(())
}

fn signed_check(model: &IPModel, budget: u64) -> LatticeOutcome {
    let Some(basis) = echelon(model) else {
        return LatticeOutcome::Indeterminate;
    };
    // FIN − STA must lie in the lattice; walk STA over its box one cell at a
    // time, keeping only canonical residues.
    let mut start: Vec<i64> = model
        .fin
        .iter()
        .zip(&model.smin)
        .map(|(f, s)| f - s)
        .collect();
    if reduce(&basis, &mut start).is_none() {
        return LatticeOutcome::Indeterminate;
    }
    let mut seen: HashSet<Vec<i64>> = HashSet::from([start]);
    for m in 0..model.cells.len() {
        let range = model.smax[m] - model.smin[m];
        if range <= 0 {
            continue;
        }
        let mut next = seen.clone();
        for r in &seen {
            let mut v = r.clone();
            for _ in 0..range {
                v[m] -= 1;
                let mut w = v.clone();
                if reduce(&basis, &mut w).is_none() {
                    return LatticeOutcome::Indeterminate;
                }
                next.insert(w);
            }
        }
        seen = next;
        if seen.len() as u64 > budget {
            return LatticeOutcome::Indeterminate;
        }
    }
    if seen.iter().any(|r| r.iter().all(|&x| x == 0)) {
        LatticeOutcome::Feasible(None)
    } else {
        LatticeOutcome::Infeasible
    }
}

struct Unsigned<'a> {
    model: &'a IPModel,
    into: Vec<Vec<usize>>,
    out_of: Vec<Vec<usize>>,
    counts: Vec<i64>,
    found: Option<Vec<i64>>,
    nodes: u64,
    budget: u64,
}

impl Unsigned<'_> {
    /// `v` is FIN − A·J for the current counts. `None` means undecided.
    fn dfs(&mut self, v: &mut Vec<i64>, left: i64) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        let m = self.model;
        let bad = (0..v.len()).find(|&i| v[i] < m.smin[i] || v[i] > m.smax[i]);
        let Some(i) = bad else {
            if check_jump_vector(m, &self.counts) {
                self.found = Some(self.counts.clone());
                return Some(true);
            }
            // In bounds but an added row fails; extending from here is not
            // searched.
            return None;
        };
        if left == 0 {
            return Some(false);
        }
        let excess: i64 = (0..v.len()).map(|k| (v[k] - m.smax[k]).max(0)).sum();
        let deficit: i64 = (0..v.len()).map(|k| (m.smin[k] - v[k]).max(0)).sum();
        if excess > left || deficit > 2 * left {
            return Some(false);
        }
        // Too many men here: some jump must land on i. Too few: some jump
        // must start from or pass over i.
        let options = if v[i] > m.smax[i] {
            self.into[i].clone()
        } else {
            self.out_of[i].clone()
        };
        let mut undecided = false;
        for n in options {
            let [f, o, t] = m.columns[n];
            v[f] += 1;
            v[o] += 1;
            v[t] -= 1;
            self.counts[n] += 1;
            let r = self.dfs(v, left - 1);
            self.counts[n] -= 1;
            v[f] -= 1;
            v[o] -= 1;
            v[t] += 1;
            match r {
                Some(true) => return Some(true),
                None => undecided = true,
                Some(false) => {}
            }
        }
        if undecided {
            None
        } else {
            Some(false)
        }
    }
}

fn unsigned_check(model: &IPModel, budget: u64) -> LatticeOutcome {
    let mut into = vec![Vec::new(); model.cells.len()];
    let mut out_of = vec![Vec::new(); model.cells.len()];
    for (n, &[f, o, t]) in model.columns.iter().enumerate() {
        into[t].push(n);
        out_of[f].push(n);
        out_of[o].push(n);
    }
    // Every jump removes one man, so Σ STA − #jumps = Σ FIN.
    let left = model.smax.iter().sum::<i64>() - model.fin.iter().sum::<i64>();
    if left < 0 {
        return LatticeOutcome::Infeasible;
    }
    let mut s = Unsigned {
        model,
        into,
        out_of,
        counts: vec![0; model.jumps.len()],
        found: None,
        nodes: 0,
        budget,
    };
    let mut v = model.fin.clone();
    match s.dfs(&mut v, left) {
        Some(true) => LatticeOutcome::Feasible(s.found),
        Some(false) => LatticeOutcome::Infeasible,
        None => LatticeOutcome::Indeterminate,
    }
}
