//! Computational companion to the analytic Hasse principle for the
//! intersection of two quadrics `Q1(x) = F(u, v)`, `Q2(x) = 0`.

pub mod archimedean;
pub mod acceptance;
pub mod arith;
pub mod classgroup;
pub mod cli;
pub mod count;
pub mod delta;
pub mod density;
pub mod error;
pub mod expsum;
pub mod forms;
pub mod model;
pub mod quadform;
pub mod report;
pub mod repnum;
pub mod smith;
pub mod weight;

pub use error::{Error, Result};
