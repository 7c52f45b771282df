//! Metrics, aggregation bands, curve fits, and decision-log regressions.

mod expfit;
mod io;
mod logit;
mod series;
mod summary;

pub use expfit::{fit_negative_exponential, prevalence_mobility_relation, ExpFit};
pub use io::{list_replication_dirs, read_decisions_csv, read_metrics_csv};
pub use logit::{
    design_from_rows, logit_fit, parse_feature_spec, LogitFeature, LogitOptions, LogitProblem,
    LogitResult,
};
pub use series::{cross_run_band, moving_average, Band};
pub use summary::{stay_home_distribution, summarize, summarize_metrics, SeriesSummary};
