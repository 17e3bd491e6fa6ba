use std::collections::HashSet;

use iloca::engine::{run_iloca, ClosingReason, IlocaConfig, Mode, Phase};
use iloca::simgen::{
    gen_kass_table, gen_replicate, replicate_rng, ColumnLaw, DgpConfig, DgpKind, ResponseModel,
    ResponseModelConfig,
};
use iloca::table::{CellState, ContingencyTable, OddsRatioRecord};

fn uniform_tables(n: usize, rows: usize, cols: usize) -> Vec<ContingencyTable> {
    (0..n)
        .map(|rep| {
            let mut rng = replicate_rng(77, rep);
            gen_kass_table(480, rows, cols, ColumnLaw::Uniform, &mut rng)
                .unwrap()
                .table
        })
        .collect()
}

#[test]
fn repeated_runs_are_identical() {
    let cfg = IlocaConfig::default();
    for t in uniform_tables(10, 8, 5) {
        assert_eq!(
            run_iloca(&t, &cfg, None).unwrap(),
            run_iloca(&t, &cfg, None).unwrap()
        );
    }
}

#[test]
fn clusters_are_disjoint_and_skip_empty_cells() {
    let cfg = IlocaConfig::default();
    let mut tables = uniform_tables(30, 8, 5);
    tables.extend(uniform_tables(10, 10, 8));
    for t in tables {
        let (map, _) = run_iloca(&t, &cfg, None).unwrap();
        let mut seen = HashSet::new();
        for c in map.clusters() {
            for &cell in &c.members {
                assert!(seen.insert(cell), "{cell} is in two clusters");
                assert!(matches!(t.state(cell), CellState::Active(_)));
            }
        }
        for &cell in map.untouched.iter().chain(&map.empty) {
            assert!(!seen.contains(&cell));
        }
        assert_eq!(seen.len() + map.untouched.len() + map.empty.len(), t.len());
    }
}

#[test]
fn size_guard_and_thresholds_hold() {
    let cfg = IlocaConfig::default();
    for law in [ColumnLaw::Uniform, ColumnLaw::Lognormal] {
        for rep in 0..30 {
            let mut rng = replicate_rng(5, rep);
            let t = gen_kass_table(480, 8, 5, law, &mut rng).unwrap().table;
            let (map, trace) = run_iloca(&t, &cfg, None).unwrap();
            for step in &trace.steps {
                let limit = match step.phase {
                    Phase::Main => step.threshold,
                    Phase::Straggler => cfg.min_cell_size,
                };
                for &cell in &step.assigned {
                    assert!(
                        t.count(cell).unwrap() < limit,
                        "{cell} absorbed at step {}",
                        step.step
                    );
                }
            }
            for c in map.clusters() {
                if c.phase == Phase::Main && c.reason == ClosingReason::ThresholdMet {
                    assert!(c.total > c.threshold);
                }
                assert_eq!(c.undersized(), c.reason == ClosingReason::PoolExhausted);
            }
        }
    }
}

#[test]
fn generator_joins_its_own_cluster() {
    let cfg = IlocaConfig::default();
    for t in uniform_tables(30, 8, 5) {
        let (map, trace) = run_iloca(&t, &cfg, None).unwrap();
        for step in trace.steps.iter().filter(|s| s.cluster.is_some()) {
            let id = step.cluster.unwrap();
            let cluster = map.clusters().iter().find(|c| c.id == id).unwrap();
            assert_eq!(cluster.members[0], step.generator_cell);
        }
    }
}

#[test]
fn assigned_cells_are_interchangeable_with_the_generator() {
    let cfg = IlocaConfig::default();
    let (mut close, mut total) = (0usize, 0usize);
    for t in uniform_tables(100, 8, 5) {
        let (_, trace) = run_iloca(&t, &cfg, None).unwrap();
        for step in trace.steps.iter().filter(|s| s.phase == Phase::Main) {
            let (i, k, j, l) = step.generator_ratio.unwrap();
            let values = [(i, j), (k, j), (i, l), (k, l)]
                .map(|(r, c)| t.count(iloca::table::CellIndex::new(r, c)).unwrap());
            let gen = OddsRatioRecord::new(i, k, j, l, values);
            let pos = gen.position_of(step.generator_cell).unwrap();
            for &cell in step.assigned.iter().filter(|&&c| c != step.generator_cell) {
                let swapped = gen.phi_with(pos, t.count(cell).unwrap());
                total += 1;
                if (swapped.abs() - gen.abs_phi).abs() < 0.5 {
                    close += 1;
                }
            }
        }
    }
    assert!(total > 0);
    let share = close as f64 / total as f64;
    assert!(
        share >= 0.9,
        "only {close}/{total} assignments interchangeable"
    );
}

#[test]
fn frequency_mode_ignores_responses() {
    let dgp = DgpConfig::new(DgpKind::Dgp1, false);
    let resp = ResponseModelConfig::standard(DgpKind::Dgp1, ResponseModel::Rm1, 0.75).unwrap();
    let cfg = IlocaConfig::default();
    assert_eq!(cfg.mode, Mode::Frequency);
    for rep in 0..5 {
        let (out, _) = gen_replicate(&dgp, &resp, 11, rep).unwrap();
        let table = out.dataset.atomic_table().unwrap();
        let stats = out.dataset.cell_stats().unwrap();

        let mut shuffled = out.dataset.clone();
        let ys: Vec<Option<f64>> = shuffled.records().iter().rev().map(|r| r.y).collect();
        for (rec, y) in shuffled.records_mut().iter_mut().zip(ys) {
            rec.y = y;
        }
        let other = shuffled.cell_stats().unwrap();
        assert_ne!(stats, other);

        let a = run_iloca(&table, &cfg, Some(&stats)).unwrap();
        let b = run_iloca(&table, &cfg, Some(&other)).unwrap();
        let c = run_iloca(&table, &cfg, None).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }
}

#[test]
fn table_without_small_cells_is_left_alone() {
    let t = ContingencyTable::from_rows(&[vec![25.0, 30.0], vec![40.0, 21.0]]).unwrap();
    let (map, trace) = run_iloca(&t, &IlocaConfig::default(), None).unwrap();
    assert!(map.is_empty());
    assert!(trace.steps.is_empty());
    assert_eq!(map.untouched.len(), 4);
}
