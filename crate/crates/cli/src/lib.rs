//! Batch front end for whispering-gallery thermal-noise budgets: scan
//! configuration, budget scans, scaling fits, figure data and the
//! validation suite.

pub mod config;
pub mod figdata;
pub mod fit;
pub mod reference;
pub mod scan;
pub mod validate;
