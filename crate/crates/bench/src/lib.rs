//! Criterion benchmarks for the theta13 core; see `benches/`.
