//! Parametrized uncertain design problems.

pub mod bits;
pub mod bundle;
pub mod diagram;
pub mod dp;
pub mod enumerate;
pub mod formula;
pub mod laws;
pub mod monad;
pub mod para;
pub mod poset;
pub mod query;
pub mod random;
pub mod rational;
pub mod suites;
