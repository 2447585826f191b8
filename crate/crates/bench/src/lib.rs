//! Criterion benchmarks for `gme-core`; see `benches/solvers.rs`.
