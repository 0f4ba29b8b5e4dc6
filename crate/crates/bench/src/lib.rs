//! Criterion benchmarks for qrf-core live under `benches/`.
