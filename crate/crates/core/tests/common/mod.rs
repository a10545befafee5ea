//! Brute-force oracles built only on the engine's board state.

#![allow(dead_code)]

use std::collections::HashSet;
use std::sync::Arc;

use solitaire_army::engine::BoardState;
use solitaire_army::geometry::{BoardWindow, Cell, GeometryKind, Layout};

fn reaches(board: &mut BoardState, dead: &mut HashSet<Vec<u64>>) -> bool {
    if board.is_occupied(Cell::TARGET) {
        return true;
    }
    if dead.contains(board.words()) {
        return false;
    }
    for id in board.legal_jump_ids() {
        board.apply_id(id);
        let ok = reaches(board, dead);
        board.undo_id(id);
        if ok {
            return true;
        }
    }
    dead.insert(board.words().to_vec());
    false
}

/// True if some order of jumps from `start` puts a man on the target.
pub fn reachable(layout: &Arc<Layout>, start: &[Cell]) -> bool {
    let mut board = BoardState::with_men(layout.clone(), start).expect("start inside window");
    reaches(&mut board, &mut HashSet::new())
}

/// Smallest subset of the starting region that reaches the target, found by
/// trying every subset in order of size.
pub fn brute_minimum(g: GeometryKind, level: i32, window: BoardWindow) -> Option<usize> {
    let layout = Arc::new(Layout::new(g, window));
    let region: Vec<Cell> = layout
        .region_indices(level)
        .iter()
        .map(|&i| layout.cells[i])
        .collect();
    assert!(
        region.len() <= 16,
        "oracle is exponential in the region size"
    );
    for k in 1..=region.len() {
        for mask in 0u32..(1 << region.len()) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let start: Vec<Cell> = (0..region.len())
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| region[i])
                .collect();
            if reachable(&layout, &start) {
                return Some(k);
            }
        }
    }
    None
}
