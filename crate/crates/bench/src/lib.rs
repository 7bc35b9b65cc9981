//! Criterion benchmarks for the scoring pipeline; see `benches/`.
