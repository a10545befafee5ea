//! Pagoda functions of the form σ^e: basic distance fields, improved fields
//! grown from a pre-final configuration, validation of the pagoda condition,
//! jump-loss classification, and configuration weights.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{metric_distance, BoardWindow, Cell, GeometryKind, Jump, Layout};
use crate::sigma::{sigma_pow, SigmaValue};

/// Integer exponent of a cell weight; `Infinite` is the zero weight σ^∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Exponent {
    Finite(i32),
    Infinite,
}

impl Exponent {
    pub fn weight(self) -> SigmaValue {
        match self {
            Exponent::Finite(e) => sigma_pow(e),
            Exponent::Infinite => SigmaValue::ZERO,
        }
    }

    pub fn finite(self) -> Option<i32> {
        match self {
            Exponent::Finite(e) => Some(e),
            Exponent::Infinite => None,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(e) => write!(f, "{e}"),
            Exponent::Infinite => f.write_str("∞"),
        }
    }
}

/// True iff σ^a + σ^b ≥ σ^c and σ^c + σ^b ≥ σ^a, decided by the exponent
/// type test: one or two consecutive values, a permutation of three
/// consecutive values, a = c < b, or a ≥ b ≤ c.
pub fn pagoda_condition(a: i32, b: i32, c: i32) -> bool {
    let lo = a.min(b).min(c);
    let hi = a.max(b).max(c);
    let consecutive = hi - lo <= 1 || {
        let mut v = [a, b, c];
        v.sort_unstable();
        v[1] == v[0] + 1 && v[2] == v[1] + 1
    };
    consecutive || (a == c && a < b) || (a >= b && b <= c)
}

fn exponent_condition(a: Exponent, b: Exponent, c: Exponent) -> bool {
    match (a, b, c) {
        (Exponent::Finite(a), Exponent::Finite(b), Exponent::Finite(c)) => {
            pagoda_condition(a, b, c)
        }
        _ => a.weight() + b.weight() >= c.weight() && c.weight() + b.weight() >= a.weight(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LossType {
    T111,
    T121,
    T122,
    T123,
    T124,
    T131,
    T132,
    T133,
    T211,
    T311,
    /// At least one cell of weight zero.
    ZeroWeight,
}

impl LossType {
    pub fn code(self) -> &'static str {
        match self {
            LossType::T111 => "1.1.1",
            LossType::T121 => "1.2.1",
            LossType::T122 => "1.2.2",
            LossType::T123 => "1.2.3",
            LossType::T124 => "1.2.4",
            LossType::T131 => "1.3.1",
            LossType::T132 => "1.3.2",
            LossType::T133 => "1.3.3",
            LossType::T211 => "2.1.1",
            LossType::T311 => "3.1.1",
            LossType::ZeroWeight => "∞",
        }
    }

    const ORDERED: [LossType; 10] = [
        LossType::T111,
        LossType::T121,
        LossType::T122,
        LossType::T123,
        LossType::T124,
        LossType::T131,
        LossType::T132,
        LossType::T133,
        LossType::T211,
        LossType::T311,
    ];

    /// Whether the exponents (x, y, z), read in the listed order, fit this
    /// pattern. `a` is always the largest exponent.
    fn fits(self, x: i32, y: i32, z: i32) -> bool {
        let a = x.max(y).max(z);
        match self {
            LossType::T111 => (x, y, z) == (a, a, a),
            LossType::T121 => (x, y, z) == (a, a, a - 1),
            LossType::T122 => (x, y, z) == (a, a - 1, a),
            LossType::T123 => (x, y, z) == (a, a - 1, a - 1),
            LossType::T124 => (x, y, z) == (a - 1, a, a - 1),
            LossType::T131 => (x, y, z) == (a, a - 1, a - 2),
            LossType::T132 => (x, y, z) == (a, a - 2, a - 1),
            LossType::T133 => (x, y, z) == (a - 1, a, a - 2),
            LossType::T211 => x == z && y == a && x < a,
            // (a, a−i−j, a−j); the i = 0 and j = 0 boundary cases are valid
            // triples too and lose at least as much, so they are folded in.
            LossType::T311 => x == a && y <= z && y < a,
            LossType::ZeroWeight => false,
        }
    }
}

/// `Right` means the jump runs in the listed order of its pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Right,
    Left,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct JumpLossClass {
    pub kind: LossType,
    pub side: Side,
}

impl fmt::Display for JumpLossClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = match self.side {
            Side::Right => "right",
            Side::Left => "left",
        };
        write!(f, "{} {side}", self.kind.code())
    }
}

/// Table-style classification of a (from, over, to) exponent triple.
pub fn classify_exponents(from: Exponent, over: Exponent, to: Exponent) -> Option<JumpLossClass> {
    if !exponent_condition(from, over, to) {
        return None;
    }
    let (Some(f), Some(o), Some(t)) = (from.finite(), over.finite(), to.finite()) else {
        return Some(JumpLossClass {
            kind: LossType::ZeroWeight,
            side: Side::Right,
        });
    };
    LossType::ORDERED.iter().find_map(|&kind| {
        if kind.fits(f, o, t) {
            Some(JumpLossClass {
                kind,
                side: Side::Right,
            })
        } else if kind.fits(t, o, f) {
            Some(JumpLossClass {
                kind,
                side: Side::Left,
            })
        } else {
            None
        }
    })
}

/// A σ^e weighting over a board layout.
#[derive(Clone, Debug)]
pub struct PagodaField {
    pub name: String,
    pub layout: Arc<Layout>,
    pub exponents: Vec<Exponent>,
    pub weights: Vec<SigmaValue>,
    pub anchors: Vec<(Cell, i32)>,
}

impl PagodaField {
    /// Builds a field without checking the pagoda condition.
    pub fn unchecked(
        name: impl Into<String>,
        layout: Arc<Layout>,
        exponents: Vec<Exponent>,
        anchors: Vec<(Cell, i32)>,
    ) -> Self {
        assert_eq!(exponents.len(), layout.len());
        let weights = exponents.iter().map(|e| e.weight()).collect();
        PagodaField {
            name: name.into(),
            layout,
            exponents,
            weights,
            anchors,
        }
    }

    /// Builds a field and rejects it unless every in-window jump satisfies
    /// the pagoda condition and no jump has the (a, a, a−1) pattern.
    pub fn checked(
        name: impl Into<String>,
        layout: Arc<Layout>,
        exponents: Vec<Exponent>,
        anchors: Vec<(Cell, i32)>,
    ) -> Result<Self> {
        let f = PagodaField::unchecked(name, layout, exponents, anchors);
        let bad = validate_field(&f);
        if let Some(j) = bad.first() {
            return Err(Error::InvalidField(bad.len(), j.to_string()));
        }
        if let Some(j) = f.excluded_pattern_jumps().first() {
            return Err(Error::ExcludedPattern(j.to_string()));
        }
        Ok(f)
    }

    pub fn geometry(&self) -> GeometryKind {
        self.layout.geometry
    }

    pub fn window(&self) -> BoardWindow {
        self.layout.window
    }

    pub fn exponent(&self, c: Cell) -> Option<Exponent> {
        self.layout.index(c).map(|i| self.exponents[i])
    }

    pub fn weight(&self, c: Cell) -> SigmaValue {
        self.layout
            .index(c)
            .map(|i| self.weights[i])
            .unwrap_or(SigmaValue::ZERO)
    }

    pub fn all_finite(&self) -> bool {
        self.exponents.iter().all(|e| e.finite().is_some())
    }

    /// Jumps whose cells carry the (a, a, a−1) pattern in either direction.
    pub fn excluded_pattern_jumps(&self) -> Vec<Jump> {
        self.layout
            .jumps
            .iter()
            .zip(&self.layout.jump_cells)
            .filter(|(_, [f, o, t])| {
                matches!(
                    (self.exponents[*f].finite(), self.exponents[*o].finite(), self.exponents[*t].finite()),
                    (Some(x), Some(y), Some(z)) if LossType::T121.fits(x, y, z) || LossType::T121.fits(z, y, x)
                )
            })
            .map(|(j, _)| *j)
            .collect()
    }

    /// Exact σ^from + σ^over − σ^to for a layout jump.
    pub fn jump_loss(&self, id: usize) -> SigmaValue {
        let [f, o, t] = self.layout.jump_cells[id];
        self.weights[f] + self.weights[o] - self.weights[t]
    }

    /// Cells of the starting region grouped by finite exponent, ascending.
    pub fn capacities(&self, level: i32) -> Vec<(i32, Vec<usize>)> {
        let mut by_exp: std::collections::BTreeMap<i32, Vec<usize>> = Default::default();
        for i in self.layout.region_indices(level) {
            if let Exponent::Finite(e) = self.exponents[i] {
                by_exp.entry(e).or_default().push(i);
            }
        }
        by_exp.into_iter().collect()
    }

    /// Board-shaped exponent dump; `∞` marks zero-weight cells, `#` cells
    /// outside the geometry's domain.
    pub fn dump(&self) -> String {
        let w = self.window();
        let g = self.geometry();
        let mut out = String::new();
        for y in w.y_min..=w.y_max {
            let mut line = String::new();
            if g == GeometryKind::Pablito {
                line.push_str(&" ".repeat((2 * (w.y_max - y)) as usize));
            }
            for x in w.x_min..=w.x_max {
                let c = Cell::new(x, y);
                let tok = match self.exponent(c) {
                    Some(e) => e.to_string(),
                    None if g == GeometryKind::Pablito => continue,
                    None => "#".to_string(),
                };
                line.push_str(&format!("{tok:>4}"));
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }
}

/// Every in-window jump violating the pagoda condition (in either direction).
pub fn validate_field(f: &PagodaField) -> Vec<Jump> {
    f.layout
        .jumps
        .iter()
        .zip(&f.layout.jump_cells)
        .filter(|(_, [a, b, c])| {
            !exponent_condition(f.exponents[*a], f.exponents[*b], f.exponents[*c])
        })
        .map(|(j, _)| *j)
        .collect()
}

/// Loss class and exact loss of one jump.
pub fn classify_jump(f: &PagodaField, j: &Jump) -> Result<(JumpLossClass, SigmaValue)> {
    let ex = |c: Cell| {
        f.exponent(c)
            .ok_or_else(|| Error::IllegalJump(j.to_string(), "cell outside the field's window"))
    };
    let (a, b, c) = (ex(j.from)?, ex(j.over)?, ex(j.to)?);
    let class = classify_exponents(a, b, c).ok_or_else(|| {
        Error::IllegalJump(
            j.to_string(),
            "exponent triple violates the pagoda condition",
        )
    })?;
    Ok((class, a.weight() + b.weight() - c.weight()))
}

pub fn total_weight<'a>(f: &PagodaField, config: impl IntoIterator<Item = &'a Cell>) -> SigmaValue {
    config.into_iter().map(|&c| f.weight(c)).sum()
}

/// Total weight minus one.
pub fn slack<'a>(f: &PagodaField, config: impl IntoIterator<Item = &'a Cell>) -> SigmaValue {
    total_weight(f, config) - SigmaValue::ONE
}

/// Exponent = distance to the target; Pablito uses the row index.
pub fn basic_field(g: GeometryKind, window: BoardWindow) -> PagodaField {
    let layout = Arc::new(Layout::new(g, window));
    basic_field_on(layout)
}

pub fn basic_field_on(layout: Arc<Layout>) -> PagodaField {
    let g = layout.geometry;
    let exps = layout
        .cells
        .iter()
        .map(|&c| Exponent::Finite(metric_distance(g, c, Cell::TARGET)))
        .collect();
    PagodaField::checked(format!("{g} basic"), layout, exps, vec![])
        .expect("distance fields are pagoda functions")
}

/// Exponent = min over anchors of (anchor exponent + distance to anchor).
/// Pablito instead keeps the row index and zeroes the edge column that the
/// anchors do not touch.
pub fn improved_field(
    g: GeometryKind,
    anchors: &[(Cell, i32)],
    window: BoardWindow,
) -> Result<PagodaField> {
    improved_field_on(Arc::new(Layout::new(g, window)), anchors)
}

/// [`improved_field`] over an arbitrary (possibly masked) layout.
pub fn improved_field_on(layout: Arc<Layout>, anchors: &[(Cell, i32)]) -> Result<PagodaField> {
    let g = layout.geometry;
    let total: SigmaValue = anchors.iter().map(|&(_, e)| sigma_pow(e)).sum();
    if total != SigmaValue::ONE {
        return Err(Error::AnchorWeight(total.to_string()));
    }
    if let Some(&(c, _)) = anchors.iter().find(|(c, _)| !g.in_domain(*c)) {
        return Err(Error::AnchorOutside(c));
    }
    let exps: Vec<Exponent> = if g == GeometryKind::Pablito {
        let right_edge_free = anchors.iter().all(|(c, _)| c.x != c.y);
        layout
            .cells
            .iter()
            .map(|c| {
                let on_edge = if right_edge_free {
                    c.x == c.y
                } else {
                    c.x == 0
                };
                if on_edge {
                    Exponent::Infinite
                } else {
                    Exponent::Finite(c.y)
                }
            })
            .collect()
    } else {
        layout
            .cells
            .iter()
            .map(|&c| {
                let e = anchors
                    .iter()
                    .map(|&(a, e)| e + metric_distance(g, c, a))
                    .min()
                    .expect("at least one anchor");
                Exponent::Finite(e)
            })
            .collect()
    };
    PagodaField::checked(format!("{g} improved"), layout, exps, anchors.to_vec())
}

/// Named improved fields, each the weighting for one way the final jumps
/// can run. Mirror images are available through [`Preset::mirrored_anchors`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    /// Diagonal army, last two jumps diagonal.
    DiagonalTwoDiagonal,
    /// Diagonal army, last jump vertical (or second-to-last vertical).
    DiagonalVertical,
    /// Skew army; same anchors as [`Preset::DiagonalTwoDiagonal`].
    SkewTwoDiagonal,
    /// Hexagonal army, last two jumps along the slanted lines.
    HexagonalTwoDiagonal,
    /// Pablito's army, last jump along the left edge.
    PablitoEdge,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::DiagonalTwoDiagonal,
        Preset::DiagonalVertical,
        Preset::SkewTwoDiagonal,
        Preset::HexagonalTwoDiagonal,
        Preset::PablitoEdge,
    ];

    pub fn geometry(self) -> GeometryKind {
        match self {
            Preset::DiagonalTwoDiagonal | Preset::DiagonalVertical => GeometryKind::Diagonal,
            Preset::SkewTwoDiagonal => GeometryKind::Skew,
            Preset::HexagonalTwoDiagonal => GeometryKind::Hexagonal,
            Preset::PablitoEdge => GeometryKind::Pablito,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::DiagonalTwoDiagonal => "diagonal-two-diagonal",
            Preset::DiagonalVertical => "diagonal-vertical",
            Preset::SkewTwoDiagonal => "skew-two-diagonal",
            Preset::HexagonalTwoDiagonal => "hexagonal-two-diagonal",
            Preset::PablitoEdge => "pablito-edge",
        }
    }

    /// The pre-final configuration, as (cell, exponent) pairs.
    pub fn anchors(self) -> Vec<(Cell, i32)> {
        match self {
            Preset::DiagonalTwoDiagonal | Preset::SkewTwoDiagonal => {
                vec![
                    (Cell::new(2, 2), 2),
                    (Cell::new(0, 2), 2),
                    (Cell::new(-1, 3), 3),
                ]
            }
            Preset::DiagonalVertical | Preset::HexagonalTwoDiagonal => {
                vec![
                    (Cell::new(0, 2), 2),
                    (Cell::new(1, 2), 2),
                    (Cell::new(2, 3), 3),
                ]
            }
            Preset::PablitoEdge => vec![(Cell::new(0, 1), 1), (Cell::new(0, 2), 2)],
        }
    }

    pub fn mirrored_anchors(self) -> Vec<(Cell, i32)> {
        let g = self.geometry();
        self.anchors()
            .into_iter()
            .map(|(c, e)| (g.mirror(c), e))
            .collect()
    }

    pub fn build(self, window: BoardWindow) -> Result<PagodaField> {
        let mut f = improved_field(self.geometry(), &self.anchors(), window)?;
        f.name = self.name().to_string();
        Ok(f)
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown field preset `{s}`")))
    }
}

/// The field whose greedy bound feeds the lower-bound table at `level`.
/// Improved fields assume the last two jumps follow a fixed pattern, so a
/// level-1 army (a single jump) is bounded with the basic field instead.
pub fn designated_field(g: GeometryKind, level: i32, window: BoardWindow) -> PagodaField {
    if level < 2 {
        return basic_field(g, window);
    }
    match g {
        GeometryKind::Conway => Ok(basic_field(g, window)),
        GeometryKind::Skew => Preset::SkewTwoDiagonal.build(window),
        GeometryKind::Diagonal => Preset::DiagonalTwoDiagonal.build(window),
        GeometryKind::Hexagonal => Preset::HexagonalTwoDiagonal.build(window),
        GeometryKind::Pablito => Preset::PablitoEdge.build(window),
    }
    .expect("preset fields are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact_condition(a: i32, b: i32, c: i32) -> bool {
        sigma_pow(a) + sigma_pow(b) >= sigma_pow(c) && sigma_pow(c) + sigma_pow(b) >= sigma_pow(a)
    }

    #[test]
    fn type_test_agrees_with_exact_arithmetic() {
        for a in -3..12 {
            for b in -3..12 {
                for c in -3..12 {
                    assert_eq!(
                        pagoda_condition(a, b, c),
                        exact_condition(a, b, c),
                        "({a},{b},{c})"
                    );
                }
            }
        }
    }

    #[test]
    fn every_valid_triple_is_classified() {
        for a in 0..12 {
            for b in 0..12 {
                for c in 0..12 {
                    let cls = classify_exponents(
                        Exponent::Finite(a),
                        Exponent::Finite(b),
                        Exponent::Finite(c),
                    );
                    assert_eq!(cls.is_some(), pagoda_condition(a, b, c), "({a},{b},{c})");
                }
            }
        }
    }

    fn loss(f: i32, o: i32, t: i32) -> SigmaValue {
        sigma_pow(f) + sigma_pow(o) - sigma_pow(t)
    }

    #[test]
    fn loss_table_values() {
        let s = sigma_pow;
        for a in 2..15 {
            // Each row: pattern (x, y, z), loss jumping right, loss jumping left.
            let rows = [
                ((a, a, a), s(a), s(a)),
                ((a, a, a - 1), s(a + 2), s(a - 1)),
                ((a, a - 1, a), s(a - 1), s(a - 1)),
                ((a, a - 1, a - 1), s(a), s(a - 1) + s(a + 1)),
                ((a - 1, a, a - 1), s(a), s(a)),
                ((a, a - 1, a - 2), SigmaValue::ZERO, s(a - 1).scale(2)),
                ((a, a - 2, a - 1), s(a).scale(2), s(a - 1).scale(2)),
                ((a - 1, a, a - 2), SigmaValue::ZERO, s(a).scale(2)),
            ];
            for ((x, y, z), right, left) in rows {
                assert_eq!(loss(x, y, z), right, "right ({x},{y},{z})");
                assert_eq!(loss(z, y, x), left, "left ({x},{y},{z})");
            }
            for i in 1..4 {
                assert_eq!(loss(a - i, a, a - i), s(a));
                for j in 1..4 {
                    assert!(loss(a, a - i - j, a - j) >= s(a));
                    assert!(loss(a - j, a - i - j, a) >= s(a - j));
                }
            }
        }
    }

    #[test]
    fn classification_examples() {
        let fin = Exponent::Finite;
        let c = classify_exponents(fin(7), fin(6), fin(5)).unwrap();
        assert_eq!((c.kind, c.side), (LossType::T131, Side::Right));
        assert_eq!(loss(7, 6, 5), SigmaValue::ZERO);
        let c = classify_exponents(fin(4), fin(4), fin(4)).unwrap();
        assert_eq!(c.kind, LossType::T111);
        let c = classify_exponents(fin(5), fin(1), fin(3)).unwrap();
        assert_eq!((c.kind, c.side), (LossType::T311, Side::Right));
        assert!(loss(5, 1, 3) >= sigma_pow(5));
        assert!(classify_exponents(fin(5), fin(2), fin(0)).is_none());
        let c = classify_exponents(fin(5), fin(6), fin(7)).unwrap();
        assert_eq!((c.kind, c.side), (LossType::T131, Side::Left));
    }

    #[test]
    fn hand_built_violation_is_reported() {
        let layout = Arc::new(Layout::new(
            GeometryKind::Conway,
            BoardWindow::new(0, 0, 0, 2),
        ));
        // Column (0,0),(0,1),(0,2) with exponents 0, 2, 5.
        let exps = vec![
            Exponent::Finite(0),
            Exponent::Finite(2),
            Exponent::Finite(5),
        ];
        let f = PagodaField::unchecked("bad", layout.clone(), exps.clone(), vec![]);
        let bad = validate_field(&f);
        // Both directions along the column fail.
        assert_eq!(bad.len(), 2);
        assert!(bad.contains(&Jump::new(Cell::new(0, 2), crate::geometry::Dir(0, -1))));
        assert!(PagodaField::checked("bad", layout, exps, vec![]).is_err());
    }

    #[test]
    fn anchors_must_sum_to_one() {
        let w = BoardWindow::default_for(GeometryKind::Diagonal, 5);
        assert!(improved_field(GeometryKind::Diagonal, &[(Cell::new(0, 2), 2)], w).is_err());
    }

    #[test]
    fn anchor_configuration_has_zero_slack() {
        for p in Preset::ALL {
            let f = p.build(BoardWindow::default_for(p.geometry(), 5)).unwrap();
            let cells: Vec<Cell> = p.anchors().iter().map(|a| a.0).collect();
            assert_eq!(slack(&f, &cells), SigmaValue::ZERO, "{}", p.name());
        }
    }

    #[test]
    fn dump_shapes() {
        let f = basic_field(GeometryKind::Conway, BoardWindow::new(-2, 2, 0, 1));
        assert_eq!(f.dump(), "   2   1   0   1   2\n   3   2   1   2   3\n");
        let p = Preset::PablitoEdge.build(BoardWindow::triangle(2)).unwrap();
        assert_eq!(p.dump(), "       ∞\n     1   ∞\n   2   2   ∞\n");
        let s = basic_field(GeometryKind::Skew, BoardWindow::new(-1, 1, 0, 1));
        assert_eq!(s.dump(), "   #   0   #\n   1   #   1\n");
    }
}
