//! Std companion to `opalg-core`: JSON/CSV file formats, deterministic
//! instance generators, the property-suite runner, and the `opalg` binary.

pub mod gen;
pub mod io;
pub mod suite;
