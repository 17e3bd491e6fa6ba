use serde::{Deserialize, Serialize};

use crate::table::{CellIndex, CellState, ClusterId, ContingencyTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Main,
    Straggler,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosingReason {
    /// The cluster total passed the step threshold.
    ThresholdMet,
    /// Candidates ran out first; the cluster is under-sized.
    PoolExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// No active cell lies below the step threshold.
    NoSmallCells,
    /// No ratio has a cell below the step threshold (or no ratio exists).
    NoGenerator,
    /// `max_steps` outer steps were run.
    StepLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub id: ClusterId,
    /// Members in assignment order; the first is the generator or anchor.
    pub members: Vec<CellIndex>,
    /// Sum of the members' original counts.
    pub total: f64,
    /// Threshold the cluster was grown against.
    pub threshold: f64,
    pub reason: ClosingReason,
    pub phase: Phase,
}

impl Cluster {
    pub fn undersized(&self) -> bool {
        self.reason == ClosingReason::PoolExhausted
    }
}

/// Disjoint cell clusters plus the cells left alone.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClusterMap {
    pub(crate) clusters: Vec<Cluster>,
    /// Active cells never assigned, row-major.
    pub untouched: Vec<CellIndex>,
    /// Zero-count cells, row-major.
    pub empty: Vec<CellIndex>,
    /// Untouched cells still below the minimum size after all passes.
    pub undersized_singletons: Vec<CellIndex>,
}

impl ClusterMap {
    /// A map with no clusters: every positive cell untouched.
    pub fn identity(table: &ContingencyTable) -> Self {
        let mut map = ClusterMap::default();
        map.finish(table, f64::NEG_INFINITY);
        map
    }

    /// Builds a map from explicit member lists, ids assigned in order.
    pub fn from_members(table: &ContingencyTable, members: Vec<Vec<CellIndex>>) -> Self {
        let clusters = members
            .into_iter()
            .enumerate()
            .map(|(ord, members)| {
                let total = members.iter().filter_map(|&c| table.count(c)).sum();
                Cluster {
                    id: ClusterId::from_ordinal(ord),
                    members,
                    total,
                    threshold: 0.0,
                    reason: ClosingReason::ThresholdMet,
                    phase: Phase::Main,
                }
            })
            .collect();
        let mut map = ClusterMap {
            clusters,
            ..Default::default()
        };
        map.finish(table, f64::NEG_INFINITY);
        map
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn cluster_of(&self, cell: CellIndex) -> Option<ClusterId> {
        self.clusters
            .iter()
            .find(|c| c.members.contains(&cell))
            .map(|c| c.id)
    }

    pub fn assigned_cells(&self) -> usize {
        self.clusters.iter().map(|c| c.members.len()).sum()
    }

    /// Table with assigned cells coloured by their cluster label.
    pub fn coloured(&self, original: &ContingencyTable) -> ContingencyTable {
        let mut t = original.clone();
        for c in &self.clusters {
            for &cell in &c.members {
                t.set_state(cell, CellState::Assigned(c.id));
            }
        }
        t
    }

    /// Fills in untouched, empty and under-sized bookkeeping from `original`.
    pub(crate) fn finish(&mut self, original: &ContingencyTable, min_size: f64) {
        let coloured = self.coloured(original);
        self.untouched.clear();
        self.empty.clear();
        self.undersized_singletons.clear();
        for (idx, state) in coloured.iter() {
            match state {
                CellState::Active(c) => {
                    self.untouched.push(idx);
                    if c < min_size {
                        self.undersized_singletons.push(idx);
                    }
                }
                CellState::Empty => self.empty.push(idx),
                CellState::Assigned(_) => {}
            }
        }
    }
}

/// One outer step of the aggregation, for auditing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    pub phase: Phase,
    pub threshold: f64,
    /// `(i, k, j, l)` of the generator ratio; `None` in the straggler pass.
    pub generator_ratio: Option<(usize, usize, usize, usize)>,
    /// Generator cell (main loop) or anchor cell (straggler pass).
    pub generator_cell: CellIndex,
    pub pool_size: usize,
    pub assigned: Vec<CellIndex>,
    /// `None` when a straggler found nothing to join and stayed untouched.
    pub reason: Option<ClosingReason>,
    pub cluster: Option<ClusterId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregationTrace {
    pub steps: Vec<TraceStep>,
    pub termination: Termination,
}

impl AggregationTrace {
    pub fn main_steps(&self) -> usize {
        self.steps.iter().filter(|s| s.phase == Phase::Main).count()
    }
}
