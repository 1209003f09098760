pub mod building;
pub mod config;
pub mod distribution;
pub mod formal_sum;
pub mod hecke;
pub mod hermitian_lattice;
pub mod linalg;
pub mod local_arith;
pub mod operators;
pub mod report;
pub mod suites;
