//! Depth-first reachability over bitset boards with exact pagoda pruning and
//! a cache of refuted positions.

use std::sync::Arc;
use std::time::Instant;

use rustc_hash::FxHashSet;

use crate::geometry::{Cell, JumpId, Layout};
use crate::pagoda::{Exponent, PagodaField};
use crate::sigma::{sigma_pow, SigmaValue};

/// Pruning data for one field: a state whose weight is below `threshold`, or
/// whose surplus is positive but smaller than σ^E, cannot finish.
#[derive(Debug)]
struct Pruner {
    weight: Vec<SigmaValue>,
    loss: Vec<SigmaValue>,
    exps: Vec<i32>,
    threshold: SigmaValue,
    quantized: bool,
    /// σ^e for every finite exponent on the layout, offset by `min_exp`.
    pows: Vec<SigmaValue>,
    min_exp: i32,
}

impl Pruner {
    fn new(f: &PagodaField, threshold: SigmaValue) -> Self {
        let layout = &f.layout;
        let loss = (0..layout.jumps.len()).map(|id| f.jump_loss(id)).collect();
        let exps = f
            .exponents
            .iter()
            .map(|e| match e {
                Exponent::Finite(v) => *v,
                Exponent::Infinite => i32::MAX,
            })
            .collect::<Vec<i32>>();
        let finite = exps.iter().copied().filter(|&e| e != i32::MAX);
        let min_exp = finite.clone().min().unwrap_or(0);
        let max_exp = finite.max().unwrap_or(0);
        Pruner {
            pows: (min_exp..=max_exp).map(sigma_pow).collect(),
            min_exp,
            weight: f.weights.clone(),
            loss,
            exps,
            threshold,
            quantized: f.all_finite() && f.excluded_pattern_jumps().is_empty(),
        }
    }

    fn weight_of(&self, cells: &[usize]) -> SigmaValue {
        cells.iter().map(|&i| self.weight[i]).sum()
    }

    /// True if a state of weight `w` whose largest occupied exponent is `e`
    /// is dead.
    fn dead(&self, w: SigmaValue, e: i32) -> bool {
        if w < self.threshold {
            return true;
        }
        if self.quantized && w > self.threshold && e != i32::MIN {
            return w - self.threshold < self.pows[(e - self.min_exp) as usize];
        }
        false
    }
}

/// An optional second field that restricts the search to plays passing
/// through a position holding all of its anchor cells.
#[derive(Debug)]
struct Guide {
    pruner: Pruner,
    anchors: Vec<usize>,
}

/// Everything about a board that does not change between candidate armies.
#[derive(Debug)]
pub(crate) struct Space {
    pub layout: Arc<Layout>,
    words: usize,
    target: usize,
    basic: Pruner,
    guide: Option<Guide>,
    by_from: Vec<Vec<JumpId>>,
    rank: Vec<u32>,
    lossless_only: bool,
}

impl Space {
    /// `basic` must be a field whose target position is the target cell on
    /// its own; `guide`, if any, an anchored field on the same layout.
    pub fn new(basic: &PagodaField, guide: Option<&PagodaField>, lossless_only: bool) -> Self {
        let layout = basic.layout.clone();
        let target = layout.index(Cell::TARGET).expect("layout holds the target");
        let basic_p = Pruner::new(basic, basic.weights[target]);
        let guide = guide.map(|g| {
            debug_assert!(Arc::ptr_eq(&g.layout, &layout) || g.layout.cells == layout.cells);
            Guide {
                pruner: Pruner::new(g, SigmaValue::ONE),
                anchors: g
                    .anchors
                    .iter()
                    .filter_map(|(c, _)| layout.index(*c))
                    .collect(),
            }
        });
        // Cheap moves toward the target first.
        let order_loss = guide.as_ref().map_or(&basic_p.loss, |g| &g.pruner.loss);
        let mut ids: Vec<JumpId> = (0..layout.jumps.len()).collect();
        ids.sort_by(|&a, &b| {
            order_loss[a]
                .cmp(&order_loss[b])
                .then(
                    basic_p.exps[layout.jump_cells[a][2]]
                        .cmp(&basic_p.exps[layout.jump_cells[b][2]]),
                )
                .then(a.cmp(&b))
        });
        let mut rank = vec![0u32; ids.len()];
        for (r, &id) in ids.iter().enumerate() {
            rank[id] = r as u32;
        }
        let mut by_from = vec![Vec::new(); layout.len()];
        for &id in &ids {
            by_from[layout.jump_cells[id][0]].push(id);
        }
        Space {
            words: layout.len().div_ceil(64),
            layout,
            target,
            basic: basic_p,
            guide,
            by_from,
            rank,
            lossless_only,
        }
    }

    pub fn basic_weight(&self, cells: &[usize]) -> SigmaValue {
        self.basic.weight_of(cells)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Outcome {
    Found(Vec<JumpId>),
    Exhausted,
    Cut,
}

enum Step {
    Found,
    Fail,
    Cut,
}

/// One worker's search state. The refutation cache survives across
/// candidates on the same space.
pub(crate) struct Searcher {
    space: Arc<Space>,
    /// Refuted positions, split by whether the guide was still active.
    refuted: [FxHashSet<Box<[u64]>>; 2],
    cache_cap: usize,
    bits: Vec<u64>,
    path: Vec<JumpId>,
    moves: Vec<Vec<(u32, JumpId)>>,
    nodes: u64,
    cap: u64,
    deadline: Option<Instant>,
    stopped: bool,
    pub total_nodes: u64,
}

impl Searcher {
    pub fn new(space: Arc<Space>) -> Self {
        let words = space.words;
        Searcher {
            space,
            refuted: Default::default(),
            cache_cap: 1 << 21,
            bits: vec![0; words],
            path: Vec::new(),
            moves: Vec::new(),
            nodes: 0,
            cap: u64::MAX,
            deadline: None,
            stopped: false,
            total_nodes: 0,
        }
    }

    /// Searches from `start` (cell indices) with a node cap.
    pub fn run(&mut self, start: &[usize], cap: u64, deadline: Option<Instant>) -> Outcome {
        self.bits.iter_mut().for_each(|w| *w = 0);
        for &i in start {
            self.bits[i / 64] |= 1 << (i % 64);
        }
        self.path.clear();
        self.nodes = 0;
        self.cap = cap;
        self.deadline = deadline;
        self.stopped = false;
        let wb = self.space.basic.weight_of(start);
        let wg = self.space.guide.as_ref().map(|g| g.pruner.weight_of(start));
        let step = self.dfs(0, wb, wg, wg.is_some());
        self.total_nodes += self.nodes;
        match step {
            Step::Found => Outcome::Found(self.path.clone()),
            Step::Fail => Outcome::Exhausted,
            Step::Cut => Outcome::Cut,
        }
    }

    #[inline]
    fn occupied(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    fn flip(&mut self, i: usize) {
        self.bits[i / 64] ^= 1 << (i % 64);
    }

    fn max_exp(&self, p: &Pruner) -> i32 {
        let mut e = i32::MIN;
        for (w, &word) in self.bits.iter().enumerate() {
            let mut x = word;
            while x != 0 {
                let i = w * 64 + x.trailing_zeros() as usize;
                e = e.max(p.exps[i]);
                x &= x - 1;
            }
        }
        e
    }

    fn anchors_held(&self) -> bool {
        match &self.space.guide {
            Some(g) => g.anchors.iter().all(|&a| self.occupied(a)),
            None => true,
        }
    }

    /// `guided` stays true until the play first holds every anchor.
    fn dfs(&mut self, depth: usize, wb: SigmaValue, wg: Option<SigmaValue>, guided: bool) -> Step {
        let space = self.space.clone();
        if self.occupied(space.target) {
            return Step::Found;
        }
        self.nodes += 1;
        if self.stopped || self.nodes > self.cap {
            self.stopped = true;
            return Step::Cut;
        }
        if self.nodes & 0xfff == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.stopped = true;
                    return Step::Cut;
                }
            }
        }
        let guided = guided && !self.anchors_held();
        if self.refuted[guided as usize].contains(&self.bits[..]) {
            return Step::Fail;
        }
        if space.basic.dead(wb, self.max_exp(&space.basic)) {
            return Step::Fail;
        }
        if guided {
            let g = &space.guide.as_ref().expect("guided").pruner;
            if g.dead(wg.expect("guide weight"), self.max_exp(g)) {
                return Step::Fail;
            }
        }

        if self.moves.len() <= depth {
            self.moves.push(Vec::new());
        }
        let mut moves = std::mem::take(&mut self.moves[depth]);
        moves.clear();
        for w in 0..space.words {
            let mut x = self.bits[w];
            while x != 0 {
                let from = w * 64 + x.trailing_zeros() as usize;
                x &= x - 1;
                for &id in &space.by_from[from] {
                    let [_, over, to] = space.layout.jump_cells[id];
                    if !self.occupied(over) || self.occupied(to) {
                        continue;
                    }
                    let lb = space.basic.loss[id];
                    if space.lossless_only && !lb.is_zero() {
                        continue;
                    }
                    if wb - lb < space.basic.threshold {
                        continue;
                    }
                    if guided {
                        let g = &space.guide.as_ref().expect("guided").pruner;
                        if wg.expect("guide weight") - g.loss[id] < g.threshold {
                            continue;
                        }
                    }
                    moves.push((space.rank[id], id));
                }
            }
        }
        moves.sort_unstable();

        let mut cut = false;
        let mut result = Step::Fail;
        for &(_, id) in &moves {
            let [from, over, to] = space.layout.jump_cells[id];
            self.flip(from);
            self.flip(over);
            self.flip(to);
            self.path.push(id);
            let nwg = wg.map(|w| w - space.guide.as_ref().expect("guided").pruner.loss[id]);
            let step = self.dfs(depth + 1, wb - space.basic.loss[id], nwg, guided);
            match step {
                Step::Found => {
                    result = Step::Found;
                }
                Step::Cut => cut = true,
                Step::Fail => {}
            }
            if matches!(result, Step::Found) {
                self.flip(from);
                self.flip(over);
                self.flip(to);
                break;
            }
            self.path.pop();
            self.flip(from);
            self.flip(over);
            self.flip(to);
            if self.stopped {
                break;
            }
        }
        self.moves[depth] = moves;
        match result {
            Step::Found => Step::Found,
            _ if cut => Step::Cut,
            _ => {
                let cache = &mut self.refuted[guided as usize];
                if cache.len() >= self.cache_cap {
                    cache.clear();
                }
                cache.insert(self.bits.clone().into_boxed_slice());
                Step::Fail
            }
        }
    }
}
