mod common;

use std::collections::HashMap;
use std::sync::Arc;

use solitaire_army::bounds::{enumerate_profiles, hexagonal_case_field, ProfileFilters};
use solitaire_army::engine::{verify_solution, Solution};
use solitaire_army::geometry::{enumerate_jumps, BoardWindow, Cell, GeometryKind, Layout};
use solitaire_army::pagoda::{basic_field, Preset};
use solitaire_army::solver::*;

use GeometryKind::*;

fn c(x: i32, y: i32) -> Cell {
    Cell::new(x, y)
}

fn counts_of(model: &IPModel, sol: &Solution) -> Vec<i64> {
    let mut k = vec![0i64; model.jumps.len()];
    for j in &sol.jumps {
        let n = model
            .jumps
            .iter()
            .position(|x| x == j)
            .expect("jump in model");
        k[n] += 1;
    }
    k
}

fn final_position(sol: &Solution) -> Vec<Cell> {
    let mut men: std::collections::BTreeSet<Cell> = sol.start.iter().copied().collect();
    for j in &sol.jumps {
        men.remove(&j.from);
        men.remove(&j.over);
        men.insert(j.to);
    }
    men.into_iter().collect()
}

#[test]
fn jump_columns_have_two_minus_ones_and_a_plus_one() {
    let m = build_ip(Conway, 2, BoardWindow::new(-4, 4, 0, 4), Finish::Target).unwrap();
    for (n, &[f, o, t]) in m.columns.iter().enumerate() {
        let j = m.jumps[n];
        assert_eq!((m.cells[f], m.cells[o], m.cells[t]), (j.from, j.over, j.to));
        assert!(f != o && o != t && f != t);
    }
    let target = m.index(Cell::TARGET).unwrap();
    for (i, &v) in m.fin.iter().enumerate() {
        assert_eq!(v, i64::from(i == target));
    }
}

#[test]
fn conway_level_two_variable_counts() {
    let w = BoardWindow::new(-4, 4, 0, 4);
    let m = build_ip(Conway, 2, w, Finish::Target).unwrap();
    assert_eq!(m.cells.len(), 45);
    // Independent count: horizontal runs of three in 5 rows of 9, vertical
    // runs of three in 9 columns of 5, both directions each.
    assert_eq!(m.jumps.len(), 2 * 7 * 5 + 2 * 9 * 3);
    assert_eq!(m.jumps.len(), enumerate_jumps(Conway, &w).len());
    assert_eq!(m.smax.iter().filter(|&&v| v == 1).count(), 27);
}

/// Minimal LP reader: constraint names and the set of variable names.
fn parse_lp(text: &str) -> (Vec<String>, std::collections::BTreeSet<String>) {
    let mut rows = Vec::new();
    let mut vars = std::collections::BTreeSet::new();
    let mut section = "";
    for line in text.lines() {
        let t = line.trim();
        if t.starts_with('\\') || t.is_empty() {
            continue;
        }
        match t {
            "Minimize" | "Subject To" | "Bounds" | "Generals" | "Binaries" | "End" => {
                section = if t == "Subject To" { "st" } else { t };
                continue;
            }
            _ => {}
        }
        let body = match t.split_once(':') {
            Some((name, rest)) => {
                if section == "st" {
                    rows.push(name.trim().to_string());
                }
                rest
            }
            None => t,
        };
        for tok in body.split_whitespace() {
            if tok.starts_with("STA_") || tok.starts_with("J_") {
                vars.insert(tok.to_string());
            }
        }
    }
    (rows, vars)
}

#[test]
fn lp_export_of_a_three_cell_strip() {
    let m = build_ip(Conway, 2, BoardWindow::new(0, 0, 0, 2), Finish::Target).unwrap();
    let lp = export_lp(&m);
    let (rows, vars) = parse_lp(&lp);
    assert_eq!(rows.len(), 3);
    assert_eq!(vars.iter().filter(|v| v.starts_with("J_")).count(), 2);
    assert_eq!(vars.iter().filter(|v| v.starts_with("STA_")).count(), 3);
    assert!(lp.starts_with("\\ conway level 2"));
    for section in [
        "Minimize",
        "Subject To",
        "Bounds",
        "Generals",
        "Binaries",
        "End",
    ] {
        assert!(lp.lines().any(|l| l == section), "missing {section}");
    }
    let bal: Vec<&str> = lp.lines().filter(|l| l.starts_with(" bal_")).collect();
    assert_eq!(bal.len(), 3);
    assert!(bal
        .iter()
        .any(|l| l.starts_with(" bal_0_0:") && l.ends_with("= 1")));
    assert!(lp.contains(" STA_0_0 = 0") && lp.contains(" STA_0_1 = 0"));
    assert!(lp.lines().skip_while(|l| *l != "Binaries").nth(1) == Some(" STA_0_2"));
}

#[test]
fn lp_round_trip_counts() {
    for (g, level) in [
        (Conway, 4),
        (Diagonal, 3),
        (Pablito, 2),
        (Hexagonal, 3),
        (Skew, 2),
    ] {
        let m = build_ip(g, level, BoardWindow::default_for(g, level), Finish::Target).unwrap();
        let (rows, vars) = parse_lp(&export_lp(&m));
        assert_eq!(rows.len(), m.cells.len(), "{g}");
        assert_eq!(vars.len(), m.cells.len() + m.jumps.len(), "{g}");
        assert_eq!(export_lp(&m), export_lp(&m.clone()));
    }
}

#[test]
fn negative_coordinates_get_an_m_prefix() {
    let m = build_ip(Conway, 1, BoardWindow::new(-2, 2, 0, 2), Finish::Target).unwrap();
    let lp = export_lp(&m);
    assert!(lp.contains("STA_m2_1"));
    assert!(lp.contains("STA_2_1"));
    assert!(!lp.contains("STA_-"));
}

#[test]
fn profile_rows_for_the_first_hexagonal_case() {
    let f = hexagonal_case_field();
    let case1 = enumerate_profiles(&f, 7, 143, ProfileFilters::ALL)
        .into_iter()
        .find(|p| p.slack.is_zero())
        .expect("the 143-man case");
    for i in 7..=12 {
        assert_eq!(case1.count(i) as i32, 3 * i - 14);
    }
    let mut m = build_ip(Hexagonal, 7, f.window(), Finish::Target).unwrap();
    let before = parse_lp(&export_lp(&m)).0.len();
    assert_eq!(m.add_profile_rows(&f, &case1, 7..=12), 6);
    let after = parse_lp(&export_lp(&m)).0.len();
    assert_eq!(after - before, 6);
}

#[test]
fn anchor_finish_sets_three_cells() {
    let anchors: Vec<Cell> = Preset::DiagonalTwoDiagonal
        .anchors()
        .into_iter()
        .map(|a| a.0)
        .collect();
    let m = build_ip(
        Diagonal,
        5,
        BoardWindow::default_for(Diagonal, 5),
        Finish::Anchors(anchors.clone()),
    )
    .unwrap();
    assert_eq!(m.fin.iter().sum::<i64>(), 3);
    for a in anchors {
        assert_eq!(m.fin[m.index(a).unwrap()], 1);
    }
}

#[test]
fn one_man_lattice_examples() {
    let mut m = build_ip(Conway, 1, BoardWindow::new(-4, 4, 0, 6), Finish::Target).unwrap();
    // Signed jumps carry one man three cells at a time.
    m.fix_start(&[c(0, 3)]).unwrap();
    assert!(matches!(
        lattice_check(&m, true),
        LatticeOutcome::Feasible(_)
    ));
    assert_eq!(lattice_check(&m, false), LatticeOutcome::Infeasible);

    // Colouring cells by (x + y) mod 3, every jump changes each class count
    // by an odd amount, so class-count differences keep their parity. A man
    // one cell away flips it even with signed jumps.
    m.fix_start(&[c(0, 1)]).unwrap();
    assert_eq!(lattice_check(&m, true), LatticeOutcome::Infeasible);
    assert_eq!(lattice_check(&m, false), LatticeOutcome::Infeasible);

    m.fix_start(&[]).unwrap();
    assert_eq!(lattice_check(&m, false), LatticeOutcome::Infeasible);
    assert_eq!(lattice_check(&m, true), LatticeOutcome::Infeasible);
}

#[test]
fn unsigned_lattice_accepts_a_real_play() {
    let m = build_ip(Conway, 2, BoardWindow::new(-2, 2, 0, 4), Finish::Target).unwrap();
    let mut fixed = m.clone();
    fixed
        .fix_start(&[c(0, 2), c(0, 3), c(1, 2), c(2, 2)])
        .unwrap();
    match lattice_check(&fixed, false) {
        LatticeOutcome::Feasible(Some(k)) => assert!(check_jump_vector(&fixed, &k)),
        other => panic!("expected feasible, got {other:?}"),
    }
}

#[test]
fn witnesses_satisfy_the_integer_model() {
    for (g, level) in [
        (Conway, 3),
        (Skew, 4),
        (Diagonal, 4),
        (Hexagonal, 3),
        (Pablito, 4),
    ] {
        let r = minimum_army(g, level, &SearchConfig::default()).unwrap();
        let sol = r.solution.unwrap();
        let w = BoardWindow::default_for(g, level);
        let mut m = build_ip(g, level, w, Finish::Anchors(final_position(&sol))).unwrap();
        let k = counts_of(&m, &sol);
        assert!(check_jump_vector(&m, &k), "{g} {level}");
        assert_eq!(k.iter().sum::<i64>() as usize, sol.jumps.len());
        m.fix_start(&sol.start).unwrap();
        assert!(check_jump_vector(&m, &k));
        assert!(matches!(
            lattice_check(&m, true),
            LatticeOutcome::Feasible(_)
        ));
    }
}

#[test]
fn two_man_level_one_reachability() {
    let f = basic_field(Conway, BoardWindow::default_for(Conway, 1));
    match reachability_search(&[c(0, 1), c(0, 2)], &f, false, 1000).unwrap() {
        SearchOutcome::Found(s) => {
            assert_eq!(s.jumps.len(), 1);
            assert!(verify_solution(&s).is_ok());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn three_man_skew_armies_agree_with_the_oracle() {
    let w = BoardWindow::new(-3, 3, 0, 4);
    let layout = Arc::new(Layout::new(Skew, w));
    let f = basic_field(Skew, w);
    let region: Vec<Cell> = layout
        .region_indices(2)
        .iter()
        .map(|&i| layout.cells[i])
        .collect();
    let mut solvable = 0;
    let mut refuted = 0;
    for a in 0..region.len() {
        for b in a + 1..region.len() {
            for d in b + 1..region.len() {
                let start = [region[a], region[b], region[d]];
                let truth = common::reachable(&layout, &start);
                match reachability_search(&start, &f, false, 1_000_000).unwrap() {
                    SearchOutcome::Found(s) => {
                        assert!(truth);
                        assert!(verify_solution(&s).is_ok());
                        solvable += 1;
                    }
                    SearchOutcome::Impossible => {
                        assert!(!truth, "{start:?}");
                        refuted += 1;
                    }
                    SearchOutcome::Indeterminate => panic!("tiny search ran out of budget"),
                }
            }
        }
    }
    assert!(solvable > 0 && refuted > 0);
    // A spread-out army cannot finish.
    assert_eq!(
        reachability_search(&[c(-3, 3), c(3, 3), c(0, 4)], &f, false, 1_000_000).unwrap(),
        SearchOutcome::Impossible
    );
}

#[test]
fn zero_slack_search_stays_lossless() {
    let f = basic_field(Conway, BoardWindow::default_for(Conway, 2));
    let start = [c(0, 2), c(0, 3), c(1, 2), c(2, 2)];
    let SearchOutcome::Found(s) = reachability_search(&start, &f, true, 10_000).unwrap() else {
        panic!("the four-man army has zero slack and a lossless play");
    };
    let trace = solitaire_army::engine::weight_trace(&s, &f);
    assert!(trace.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn diagonal_level_five_witness() {
    let r = minimum_army(Diagonal, 5, &SearchConfig::default()).unwrap();
    let sol = r.solution.expect("witness");
    assert_eq!(sol.size(), 13);
    assert_eq!(sol.level, 5);
    assert!(verify_solution(&sol).is_ok());
    // The same army through the public single-army search.
    let f = basic_field(Diagonal, BoardWindow::default_for(Diagonal, 5));
    assert!(matches!(
        reachability_search(&sol.start, &f, false, 50_000_000).unwrap(),
        SearchOutcome::Found(_)
    ));
}

#[test]
fn minimum_army_examples() {
    let cfg = SearchConfig::default();
    assert_eq!(minimum_army(Conway, 2, &cfg).unwrap().size(), Some(4));
    for g in GeometryKind::ALL {
        let r = minimum_army(g, 1, &cfg).unwrap();
        assert_eq!(r.size(), Some(2), "{g}");
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.lower_bound, 2);
    }
    assert!(minimum_army(Conway, 5, &cfg).is_err());
    assert!(minimum_army(Skew, 0, &cfg).is_err());
}

#[test]
fn search_is_deterministic_across_thread_counts() {
    let mut seen: HashMap<usize, Solution> = HashMap::new();
    for threads in [1, 2, 3] {
        let cfg = SearchConfig {
            threads,
            ..SearchConfig::default()
        };
        let r = minimum_army(Hexagonal, 4, &cfg).unwrap();
        let s = r.solution.unwrap();
        if let Some(prev) = seen.values().next() {
            assert_eq!(prev, &s);
        }
        seen.insert(threads, s);
    }
}

#[test]
fn window_too_small_for_any_army() {
    let cfg = SearchConfig {
        window: Some(BoardWindow::new(0, 0, 0, 4)),
        ..SearchConfig::default()
    };
    let r = minimum_army(Conway, 2, &cfg).unwrap();
    assert_eq!(r.status, SolveStatus::Infeasible);
    assert!(r.solution.is_none());
}

#[test]
fn zero_slack_only_finds_but_does_not_prove() {
    let cfg = SearchConfig {
        zero_slack_only: true,
        start_from_table: false,
        ..SearchConfig::default()
    };
    let r = minimum_army(Skew, 4, &cfg).unwrap();
    assert_eq!(r.size(), Some(9));
    assert_eq!(r.status, SolveStatus::Feasible);
    assert_eq!(r.lower_bound, 8);
}
