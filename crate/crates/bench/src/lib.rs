//! Criterion benchmarks for the pathopt kernels live in `benches/`.
