//! Seeded generators for synthetic tables and survey datasets, and the
//! Monte-Carlo study drivers built on them.
//!
//! Every replicate draws from its own ChaCha8 stream, keyed by the master
//! seed and the replicate index, so replicates can run in parallel and
//! still reproduce bit for bit. Within a replicate, draws are record-major
//! (all data draws first, then the response indicators).

mod dgp;
mod kass;
mod response;
mod study;

pub use dgp::{
    dgp1_response, empirical_classes, gen_dataset, gen_dgp1, gen_dgp2, DgpConfig, DgpKind,
    ReplicateOutput,
};
pub use kass::{
    cyclic_row, gen_blocked_table, gen_kass_table, lognormal_class, uniform_class, ColumnLaw,
    KassTable,
};
pub use response::{
    apply_response, calibrate_intercept, draw_response_indicators, response_probabilities,
    standard_lambda, ResponseDraw, ResponseModel, ResponseModelConfig, CALIBRATION_TOLERANCE,
    P_CLAMP,
};
pub use study::{
    blocked_pairs, clustering_replicate, imputation_replicate, run_clustering_study,
    run_simulation_study, simulate_replicates, summarize_replicates, BlockedPair, BlockedSetting,
    ClusteringReplicate, ClusteringReport, ClusteringSetting, ColourSummary, ImputationReplicate,
    ImputationSetting,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The random stream of replicate `replicate` under `seed`.
pub fn replicate_rng(seed: u64, replicate: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate as u64);
    rng
}

/// Generates a dataset and draws its responses on replicate `replicate`'s
/// stream.
pub fn gen_replicate(
    dgp: &DgpConfig,
    response: &ResponseModelConfig,
    seed: u64,
    replicate: usize,
) -> crate::Result<(ReplicateOutput, ResponseDraw)> {
    let mut rng = replicate_rng(seed, replicate);
    let mut dataset = gen_dataset(dgp, &mut rng)?;
    let draw = apply_response(&mut dataset, response, dgp.kind, &mut rng)?;
    Ok((ReplicateOutput::from_dataset(dataset)?, draw))
}
