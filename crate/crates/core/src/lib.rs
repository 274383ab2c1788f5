pub mod datasets;
pub mod evaluation;
pub mod metrics;
pub mod models;
pub mod numeric;
