//! Criterion benchmarks for the solvers and samplers live under `benches/`.
