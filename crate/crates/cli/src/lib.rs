pub mod expr;
pub mod ops;
pub mod report;
pub mod task;
