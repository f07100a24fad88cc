//! Out-of-time-order correlator `C(t) = -<[p(t), p]^2>` by explicit
//! forward evolution, `p` insertion and adjoint evolution, with each leg's
//! norm forced back to the norm of the state the leg started from.

mod backward;
pub mod dense;
mod point;
mod series;
mod trajectory;

pub use backward::{backward_pass, BackwardPass, BackwardSample, Insertion};
pub use dense::{dense_floquet_matrix, dense_oracle_otoc, DenseMatrix, DENSE_MAX_MODES};
pub use point::{correlators, otoc_point, otoc_sample, OtocPoint, OtocSample};
pub use series::{
    linear_schedule, log_schedule, otoc_series, reversal_ratio_series, series_from_trajectory,
    OtocEntry, OtocSeries, ReversalPoint, SeriesOptions, DEFAULT_SAMPLE_COUNT,
};
pub use trajectory::{ForwardTrajectory, StoragePolicy, TrajectoryOptions};
