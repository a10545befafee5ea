//! Level and size bounds: closed-form row and tail weights, the greedy and
//! Fibonacci size bounds, and exponent-profile enumeration.

use std::collections::BTreeMap;
use std::fmt;

use std::sync::Arc;

use crate::geometry::{BoardWindow, GeometryKind, Layout};
use crate::pagoda::{designated_field, improved_field_on, PagodaField, Preset};
use crate::sigma::{fibonacci, sigma_pow, SigmaValue};

fn s(i: i32) -> SigmaValue {
    sigma_pow(i)
}

/// Exact weight of the full row `n` under the basic field.
pub fn row_weight(g: GeometryKind, n: i32) -> SigmaValue {
    let n1 = (n + 1) as i128;
    match g {
        GeometryKind::Conway => s(n - 3),
        GeometryKind::Skew => s(n).scale(n1) + s(n + 1).scale(2),
        GeometryKind::Diagonal => s(n).scale(2 * n as i128) + s(n - 3),
        GeometryKind::Hexagonal => s(n).scale(n1) + s(n - 1).scale(2),
        GeometryKind::Pablito => s(n).scale(n1),
    }
}

/// Exact weight of all rows `n` and beyond under the basic field.
pub fn tail_weight(g: GeometryKind, n: i32) -> SigmaValue {
    let k = n as i128;
    match g {
        GeometryKind::Conway => s(n - 5),
        GeometryKind::Skew => s(n - 3) * SigmaValue::new(3, k - 1),
        GeometryKind::Diagonal => s(n - 5) * SigmaValue::new(3 - 2 * k, 4 * k - 2),
        GeometryKind::Hexagonal => s(n - 3) * SigmaValue::new(3, k + 1),
        GeometryKind::Pablito => s(n - 3) * SigmaValue::new(1, k + 1),
    }
}

/// Highest level whose starting region carries weight above 1. A tail of
/// exactly 1 is out of reach too, since any finite army weighs less.
pub fn max_level(g: GeometryKind) -> i32 {
    (1..64)
        .take_while(|&n| tail_weight(g, n) > SigmaValue::ONE)
        .last()
        .unwrap_or(0)
}

pub fn fibonacci_bound(level: i32) -> u64 {
    fibonacci(level as i64 + 2) as u64
}

/// Smallest number of starting-region cells whose weights can reach 1, or
/// `None` if the whole region in the field's window falls short.
pub fn greedy_size_bound(f: &PagodaField, level: i32) -> Option<u64> {
    let mut total = SigmaValue::ZERO;
    let mut k = 0u64;
    for (e, cells) in f.capacities(level) {
        let w = sigma_pow(e);
        for _ in 0..cells.len() {
            total += w;
            k += 1;
            if total >= SigmaValue::ONE {
                return Some(k);
            }
        }
    }
    None
}

/// One cell of the lower-bound table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Size(u64),
    Impossible,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Size(n) => write!(f, "{n}"),
            Bound::Impossible => f.write_str("Impossible"),
        }
    }
}

/// Lower bound on army size for one geometry and level: the larger of the
/// greedy bound under the geometry's designated field and F(n+2).
pub fn lower_bound(g: GeometryKind, level: i32) -> Bound {
    if level > max_level(g) {
        return Bound::Impossible;
    }
    let f = designated_field(g, level, BoardWindow::analysis(g, level));
    match greedy_size_bound(&f, level) {
        Some(k) => Bound::Size(k.max(fibonacci_bound(level))),
        None => Bound::Impossible,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerBoundTable {
    /// (level, F(level+2), bound per geometry in `GeometryKind::ALL` order).
    pub rows: Vec<(i32, u64, [Bound; 5])>,
}

impl LowerBoundTable {
    pub fn get(&self, g: GeometryKind, level: i32) -> Option<Bound> {
        let col = GeometryKind::ALL.iter().position(|&x| x == g)?;
        self.rows.iter().find(|r| r.0 == level).map(|r| r.2[col])
    }
}

/// Levels 1 through 9 for all five geometries.
pub fn lower_bound_table() -> LowerBoundTable {
    let rows = (1..=9)
        .map(|n| {
            let mut b = [Bound::Impossible; 5];
            for (i, g) in GeometryKind::ALL.iter().enumerate() {
                b[i] = lower_bound(*g, n);
            }
            (n, fibonacci_bound(n), b)
        })
        .collect();
    LowerBoundTable { rows }
}

/// The finite hexagonal board used for the level-7 case analysis: rows 0
/// through 15 and, in the skewed drawing (column 2x − y), columns −19 to 17.
/// On it the improved hexagonal field has capacities 7, 10, .., 25, 24, 23
/// at exponents 7 through 15.
pub fn hexagonal_case_board() -> Arc<Layout> {
    Arc::new(Layout::masked(
        GeometryKind::Hexagonal,
        BoardWindow::new(-10, 16, 0, 15),
        |c| (-19..=17).contains(&(2 * c.x - c.y)),
    ))
}

/// The improved hexagonal field on [`hexagonal_case_board`].
pub fn hexagonal_case_field() -> PagodaField {
    let mut f = improved_field_on(
        hexagonal_case_board(),
        &Preset::HexagonalTwoDiagonal.anchors(),
    )
    .expect("preset anchors lie on the case board");
    f.name = "hexagonal-case-board".to_string();
    f
}

/// Published IP lower bounds, keyed by (geometry, level). Reference values,
/// not recomputed here.
pub const PUBLISHED_IP_BOUNDS: [(GeometryKind, i32, u64); 8] = [
    (GeometryKind::Conway, 4, 20),
    (GeometryKind::Skew, 5, 19),
    (GeometryKind::Pablito, 5, 19),
    (GeometryKind::Hexagonal, 5, 17),
    (GeometryKind::Skew, 6, 46),
    (GeometryKind::Pablito, 6, 53),
    (GeometryKind::Hexagonal, 6, 36),
    (GeometryKind::Hexagonal, 7, 144),
];

/// Published minimum army sizes. Hexagonal level 7 is known only to be 144
/// or 145; the lower value is stored and flagged by [`published_minimum`].
pub const PUBLISHED_MINIMA: [(GeometryKind, &[u64]); 5] = [
    (GeometryKind::Conway, &[2, 4, 8, 20]),
    (GeometryKind::Skew, &[2, 3, 5, 9, 19, 46]),
    (GeometryKind::Pablito, &[2, 3, 5, 9, 19, 53]),
    (GeometryKind::Hexagonal, &[2, 3, 5, 9, 17, 36, 144]),
    (GeometryKind::Diagonal, &[2, 3, 5, 8, 13, 23, 46, 123]),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Published {
    Exact(u64),
    /// Minimum lies in the closed range.
    Range(u64, u64),
    Impossible,
}

impl fmt::Display for Published {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Published::Exact(n) => write!(f, "{n}"),
            Published::Range(a, b) => write!(f, "{a} or {b}"),
            Published::Impossible => f.write_str("Impossible"),
        }
    }
}

pub fn published_minimum(g: GeometryKind, level: i32) -> Published {
    let row = PUBLISHED_MINIMA
        .iter()
        .find(|r| r.0 == g)
        .expect("all geometries listed")
        .1;
    match row.get((level - 1) as usize) {
        _ if level < 1 => Published::Impossible,
        Some(&v) if g == GeometryKind::Hexagonal && level == 7 => Published::Range(v, v + 1),
        Some(&v) => Published::Exact(v),
        None => Published::Impossible,
    }
}

pub fn published_ip_bound(g: GeometryKind, level: i32) -> Option<u64> {
    PUBLISHED_IP_BOUNDS
        .iter()
        .find(|r| r.0 == g && r.1 == level)
        .map(|r| r.2)
}

/// Men per exponent for one candidate army.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentProfile {
    pub level: i32,
    pub counts: BTreeMap<i32, usize>,
    pub slack: SigmaValue,
}

impl ExponentProfile {
    pub fn new(level: i32, counts: BTreeMap<i32, usize>) -> Self {
        let counts: BTreeMap<i32, usize> = counts.into_iter().filter(|&(_, n)| n > 0).collect();
        let slack = counts
            .iter()
            .map(|(&e, &n)| sigma_pow(e).scale(n as i128))
            .sum::<SigmaValue>()
            - SigmaValue::ONE;
        ExponentProfile {
            level,
            counts,
            slack,
        }
    }

    pub fn size(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn count(&self, e: i32) -> usize {
        self.counts.get(&e).copied().unwrap_or(0)
    }

    pub fn max_exponent(&self) -> Option<i32> {
        self.counts.keys().next_back().copied()
    }

    pub fn min_exponent(&self) -> Option<i32> {
        self.counts.keys().next().copied()
    }

    pub fn has_interior_zero(&self) -> bool {
        match (self.min_exponent(), self.max_exponent()) {
            (Some(lo), Some(hi)) => (lo..=hi).any(|e| self.count(e) == 0),
            _ => false,
        }
    }

    /// n_{E−1} ≥ n_E for the largest exponent E.
    pub fn tail_non_increasing(&self) -> bool {
        self.max_exponent()
            .is_none_or(|e| self.count(e - 1) >= self.count(e))
    }

    /// Slack zero, or at least σ^E.
    pub fn slack_quantized(&self) -> bool {
        self.slack.is_zero()
            || self
                .max_exponent()
                .is_some_and(|e| self.slack >= sigma_pow(e))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ProfileFilters {
    pub no_interior_zeros: bool,
    pub tail_non_increasing: bool,
    pub quantized_slack: bool,
}

impl ProfileFilters {
    pub const NONE: ProfileFilters = ProfileFilters {
        no_interior_zeros: false,
        tail_non_increasing: false,
        quantized_slack: false,
    };
    pub const ALL: ProfileFilters = ProfileFilters {
        no_interior_zeros: true,
        tail_non_increasing: true,
        quantized_slack: true,
    };

    pub fn accepts(&self, p: &ExponentProfile) -> bool {
        (!self.no_interior_zeros || !p.has_interior_zero())
            && (!self.tail_non_increasing || p.tail_non_increasing())
            && (!self.quantized_slack || p.slack_quantized())
    }
}

/// All exponent profiles of exactly `size` men in the starting region with
/// slack ≥ 0 that pass `filters`. Sorted by slack, then lexicographically by
/// counts from the lowest exponent down, largest first.
pub fn enumerate_profiles(
    f: &PagodaField,
    level: i32,
    size: usize,
    filters: ProfileFilters,
) -> Vec<ExponentProfile> {
    let caps: Vec<(i32, usize)> = f
        .capacities(level)
        .into_iter()
        .map(|(e, cells)| (e, cells.len()))
        .collect();
    let mut out = Vec::new();
    let mut counts = vec![0usize; caps.len()];
    profile_dfs(
        &caps,
        0,
        size,
        SigmaValue::ZERO,
        &mut counts,
        &mut |counts| {
            let map = caps
                .iter()
                .zip(counts)
                .map(|(&(e, _), &n)| (e, n))
                .collect();
            let p = ExponentProfile::new(level, map);
            if filters.accepts(&p) {
                out.push(p);
            }
        },
    );
    out.sort_by(|a, b| {
        a.slack.cmp(&b.slack).then_with(|| {
            let ka: Vec<usize> = a.counts.values().copied().collect();
            let kb: Vec<usize> = b.counts.values().copied().collect();
            let ea: Vec<i32> = a.counts.keys().copied().collect();
            let eb: Vec<i32> = b.counts.keys().copied().collect();
            ea.cmp(&eb).then(kb.cmp(&ka))
        })
    });
    out
}

/// Largest weight `remaining` men can add using classes `from..`.
fn best_fill(caps: &[(i32, usize)], from: usize, mut remaining: usize) -> Option<SigmaValue> {
    let mut w = SigmaValue::ZERO;
    for &(e, cap) in &caps[from..] {
        if remaining == 0 {
            break;
        }
        let take = cap.min(remaining);
        w += sigma_pow(e).scale(take as i128);
        remaining -= take;
    }
    (remaining == 0).then_some(w)
}

fn profile_dfs(
    caps: &[(i32, usize)],
    i: usize,
    remaining: usize,
    weight: SigmaValue,
    counts: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]),
) {
    if remaining == 0 {
        if weight >= SigmaValue::ONE {
            emit(counts);
        }
        return;
    }
    if i == caps.len() {
        return;
    }
    match best_fill(caps, i, remaining) {
        Some(w) if weight + w >= SigmaValue::ONE => {}
        _ => return,
    }
    let (e, cap) = caps[i];
    let w = sigma_pow(e);
    for n in (0..=cap.min(remaining)).rev() {
        counts[i] = n;
        profile_dfs(
            caps,
            i + 1,
            remaining - n,
            weight + w.scale(n as i128),
            counts,
            emit,
        );
    }
    counts[i] = 0;
}

fn pad(out: &mut String, cells: &[String], widths: &[usize]) {
    let line: Vec<String> = cells
        .iter()
        .zip(widths)
        .map(|(c, &w)| format!("{c:>w$}"))
        .collect();
    out.push_str(line.join("  ").trim_end());
    out.push('\n');
}

fn grid(header: Vec<String>, rows: Vec<Vec<String>>) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in &rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    pad(&mut out, &header, &widths);
    let total = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
    out.push_str(&"-".repeat(total));
    out.push('\n');
    for r in &rows {
        pad(&mut out, r, &widths);
    }
    out
}

fn geometry_header(first: &[&str]) -> Vec<String> {
    first
        .iter()
        .map(|s| s.to_string())
        .chain(GeometryKind::ALL.iter().map(|g| g.title().to_string()))
        .collect()
}

/// Highest reachable level per geometry.
pub fn render_level_table() -> String {
    let header: Vec<String> = GeometryKind::ALL
        .iter()
        .map(|g| g.title().to_string())
        .collect();
    let row = GeometryKind::ALL
        .iter()
        .map(|&g| max_level(g).to_string())
        .collect();
    grid(header, vec![row])
}

pub fn render_lower_bound_table(t: &LowerBoundTable) -> String {
    let rows = t
        .rows
        .iter()
        .map(|(n, fib, b)| {
            let mut r = vec![n.to_string(), fib.to_string()];
            r.extend(b.iter().map(|x| x.to_string()));
            r
        })
        .collect();
    grid(geometry_header(&["Level", "F(n+2)"]), rows)
}

/// Profiles with one column per exponent in `exps`.
pub fn render_profiles(
    profiles: &[ExponentProfile],
    exps: std::ops::RangeInclusive<i32>,
) -> String {
    let mut header = vec!["Case".to_string(), "Men".to_string()];
    header.extend(exps.clone().map(|e| format!("n{e}")));
    header.push("Slack".to_string());
    let rows = profiles
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut r = vec![(i + 1).to_string(), p.size().to_string()];
            r.extend(exps.clone().map(|e| p.count(e).to_string()));
            r.push(slack_in_powers(p.slack));
            r
        })
        .collect();
    grid(header, rows)
}

/// Published minimum sizes per geometry and level 1 through 9.
pub fn render_minimum_table() -> String {
    let rows = (1..=9)
        .map(|n| {
            let mut r = vec![n.to_string()];
            r.extend(
                GeometryKind::ALL
                    .iter()
                    .map(|&g| published_minimum(g, n).to_string()),
            );
            r
        })
        .collect();
    grid(geometry_header(&["Level"]), rows)
}

/// Writes a non-negative value as a sum of distinct non-adjacent powers of
/// σ (for example `σ^14+σ^16`), falling back to the a+bσ form.
pub fn slack_in_powers(v: SigmaValue) -> String {
    if v.is_zero() {
        return "0".into();
    }
    if v.is_negative() {
        return v.exact_string();
    }
    for e in -40..=150 {
        let p = sigma_pow(e);
        if v == p {
            return format!("σ^{e}");
        }
        if v == p.scale(2) {
            return format!("2σ^{e}");
        }
    }
    let mut rest = v;
    let mut terms = Vec::new();
    for e in -40..=150 {
        let p = sigma_pow(e);
        if rest >= p {
            rest -= p;
            terms.push(format!("σ^{e}"));
        }
        if rest.is_zero() {
            return terms.join("+");
        }
    }
    v.exact_string()
}
