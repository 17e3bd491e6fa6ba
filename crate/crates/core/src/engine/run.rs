use super::distance::{apply_scaling, closest_cell};
use super::{
    candidate_distances, select_generator, AggregationTrace, CandidateDistance, CellStats,
    ClosingReason, Cluster, ClusterMap, IlocaConfig, Mode, Phase, Termination, TraceStep,
};
use crate::table::{
    enumerate_log_odds, magnitude_order, sort_by_magnitude, CellIndex, CellState, ClusterId,
    ContingencyTable, OddsRatioRecord,
};
use crate::{Error, Result};

/// Runs the aggregation on `table`.
///
/// Each outer step enumerates the log-odds ratios of the still-active
/// cells, seeds a cluster at the smallest sub-threshold cell of the
/// smallest-`|phi|` ratio, and grows it with the interchangeable cells of
/// the nearest candidate ratios until its total passes the step threshold.
/// A straggler pass then tries to absorb cells still below `M0`.
///
/// `stats` is required in [`Mode::Imputation`] and ignored otherwise.
pub fn run_iloca(
    table: &ContingencyTable,
    config: &IlocaConfig,
    stats: Option<&CellStats>,
) -> Result<(ClusterMap, AggregationTrace)> {
    config.validate()?;
    let stats = match config.mode {
        Mode::Frequency => None,
        Mode::Imputation => {
            let s = stats.ok_or(Error::MissingStats)?;
            if s.rows() != table.rows() || s.cols() != table.cols() {
                return Err(Error::InvalidConfig(format!(
                    "cell statistics are {}x{} but the table is {}x{}",
                    s.rows(),
                    s.cols(),
                    table.rows(),
                    table.cols()
                )));
            }
            Some(s)
        }
    };

    let mut work = table.clone();
    let mut map = ClusterMap::default();
    let mut steps = Vec::new();
    let (m, n) = (table.rows(), table.cols());

    let mut step = 1;
    let termination = loop {
        if step > config.max_steps {
            break Termination::StepLimit;
        }
        let threshold = config.step_threshold(m, n, work.active_count(), step);
        if !work.active_cells().any(|(_, c)| c < threshold) {
            break Termination::NoSmallCells;
        }
        let mut records = enumerate_log_odds(&work);
        sort_by_magnitude(&mut records);
        let Some((gen_pos, gen_cell)) = select_generator(&records, threshold) else {
            break Termination::NoGenerator;
        };
        let generator = &records[gen_pos];
        let k = config.pool_size(records.len());
        let candidates = candidate_distances(&records, generator, gen_cell, k, config.mode, stats)?;

        let id = ClusterId::from_ordinal(map.clusters.len());
        let (members, total, reason) = grow(&work, gen_cell, &candidates, threshold);
        for &cell in &members {
            work.set_state(cell, CellState::Assigned(id));
        }
        steps.push(TraceStep {
            step,
            phase: Phase::Main,
            threshold,
            generator_ratio: Some(generator.key()),
            generator_cell: gen_cell,
            pool_size: candidates.len(),
            assigned: members.clone(),
            reason: Some(reason),
            cluster: Some(id),
        });
        map.clusters.push(Cluster {
            id,
            members,
            total,
            threshold,
            reason,
            phase: Phase::Main,
        });
        step += 1;
    };

    assign_stragglers(&mut work, &mut map, &mut steps, config, stats, step);
    map.finish(table, config.min_cell_size);
    Ok((map, AggregationTrace { steps, termination }))
}

/// Seeds with `seed` and adds candidate interchangeable cells in rank
/// order until the total exceeds `threshold`. Cells already taken, and
/// cells at or above the threshold, are skipped.
fn grow(
    work: &ContingencyTable,
    seed: CellIndex,
    candidates: &[CandidateDistance],
    threshold: f64,
) -> (Vec<CellIndex>, f64, ClosingReason) {
    let mut members = vec![seed];
    let mut total = work.count(seed).unwrap_or(0.0);
    for cand in candidates {
        if total > threshold {
            break;
        }
        let cell = cand.interchangeable;
        if members.contains(&cell) {
            continue;
        }
        match work.count(cell) {
            Some(c) if c < threshold => {
                members.push(cell);
                total += c;
            }
            _ => {}
        }
    }
    let reason = if total > threshold {
        ClosingReason::ThresholdMet
    } else {
        ClosingReason::PoolExhausted
    };
    (members, total, reason)
}

/// Candidates for a straggler anchored at `anchor`: every current ratio
/// containing it, paired with its other cell closest in count.
fn anchor_candidates(
    records: &[OddsRatioRecord],
    anchor: CellIndex,
    anchor_value: f64,
    stats: Option<&CellStats>,
) -> Vec<CandidateDistance> {
    let mut out: Vec<CandidateDistance> = records
        .iter()
        .filter(|r| r.contains(anchor))
        .map(|rec| {
            let cell = closest_cell(rec, anchor_value, &[anchor]).expect("three other cells");
            let value = rec.values[rec.position_of(cell).expect("member")];
            let delta_count = (value - anchor_value).abs();
            let (delta_mean, delta_sd) = match stats {
                Some(s) => (
                    (s.mean(cell) - s.mean(anchor)).abs(),
                    (s.sd(cell) - s.sd(anchor)).abs(),
                ),
                None => (0.0, 0.0),
            };
            CandidateDistance {
                record: rec.clone(),
                delta_count,
                delta_mean,
                delta_sd,
                scaled: [0.0; 3],
                delta: delta_count,
                interchangeable: cell,
            }
        })
        .collect();
    if stats.is_some() {
        apply_scaling(&mut out);
    }
    out.sort_by(|a, b| {
        a.delta
            .total_cmp(&b.delta)
            .then_with(|| magnitude_order(&a.record, &b.record))
    });
    out
}

/// Cleanup pass over cells still active with count below `M0`, in
/// row-major order. Each one anchors a new cluster grown from the ratios
/// that contain it. An anchor that can absorb nothing stays untouched and
/// ends up in [`ClusterMap::undersized_singletons`].
pub fn assign_stragglers(
    work: &mut ContingencyTable,
    map: &mut ClusterMap,
    steps: &mut Vec<TraceStep>,
    config: &IlocaConfig,
    stats: Option<&CellStats>,
    mut step: usize,
) {
    let m0 = config.min_cell_size;
    let stats = match config.mode {
        Mode::Frequency => None,
        Mode::Imputation => stats,
    };
    let anchors: Vec<CellIndex> = work.indices().collect();
    for anchor in anchors {
        let Some(value) = work.count(anchor) else {
            continue;
        };
        if value >= m0 {
            continue;
        }
        let mut records = enumerate_log_odds(work);
        sort_by_magnitude(&mut records);
        let candidates = anchor_candidates(&records, anchor, value, stats);
        let (members, total, reason) = grow(work, anchor, &candidates, m0);

        let mut trace = TraceStep {
            step,
            phase: Phase::Straggler,
            threshold: m0,
            generator_ratio: None,
            generator_cell: anchor,
            pool_size: candidates.len(),
            assigned: Vec::new(),
            reason: None,
            cluster: None,
        };
        if members.len() > 1 {
            let id = ClusterId::from_ordinal(map.clusters.len());
            for &cell in &members {
                work.set_state(cell, CellState::Assigned(id));
            }
            trace.assigned = members.clone();
            trace.reason = Some(reason);
            trace.cluster = Some(id);
            map.clusters.push(Cluster {
                id,
                members,
                total,
                threshold: m0,
                reason,
                phase: Phase::Straggler,
            });
        }
        steps.push(trace);
        step += 1;
    }
}
