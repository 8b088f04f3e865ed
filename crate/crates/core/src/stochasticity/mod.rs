//! Selection processes, Church-type frequency statistics and the interval
//! estimators.
//!
//! Indexing convention, used everywhere: the selection value `S(ω_{1:k})`
//! gates the outcome `ω_{k+1}`.

mod church;
mod estimate;
mod selection;

pub use church::{
    church_statistics, church_verdict, verdict_from, ChurchStatistics, ChurchVerdict, Extrema, RatioTrack, Surrogate,
    Violation,
};
pub use estimate::{
    estimate_from, i_phi_estimate, martingale_interval_estimate, smallest_interval_estimate, Attained,
    IPhiEstimate, IntervalEstimate, MartingaleEstimate, SelectionSummary, FINITE_FAMILY_LABEL,
    MARTINGALE_SURROGATE_LABEL,
};
pub use selection::{
    is_double_or_hold, selection_registry, AllOnes, DoublingDetector, Never, Parity, PatternSuffix, Periodic,
    PureSelection, SelectionEval, SelectionProcess, SelectionSpec, Side, ThresholdSelection,
};
