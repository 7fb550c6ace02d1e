//! Criterion benchmarks for the analytic chain and the trial engine; see `benches/`.
