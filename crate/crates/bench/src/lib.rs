//! Criterion benchmarks for the model pipeline; see `benches/`.
