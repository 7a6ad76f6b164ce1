//! Numerical studies of the codec: sampling, error statistics, anisotropy,
//! intermediate precision, bucket misses, fractional splitting, companding
//! and idempotence.

mod compand;
mod sampling;
mod smith;
mod split;
mod stats;
mod studies;

pub use compand::{compand_study, CompandedCodec, Compander};
pub use sampling::{sample, DomainKind, SampleDomain, CHUNK_LEN};
pub use smith::smith_theta_bins;
pub use split::{magnitude_for_angle_bits, split_sweep, SplitCodec, SplitConfig};
pub use stats::{merge_all, ErrorAccumulator, ErrorStats};
pub use studies::{
    anisotropy_map, bin_miss_between, bin_miss_study, error_study, idempotence_bound,
    idempotence_study, precision_comparison, round_trip_stats, AnisotropyMap, BinMisses, CellStats,
    IdempotenceReport, PrecisionRow, DEFAULT_ULP_BUDGET,
};
