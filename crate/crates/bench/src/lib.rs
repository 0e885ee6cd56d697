//! Criterion benchmarks for `bicoef-core`; see `benches/core.rs`.
