//! Criterion benchmarks for the mass-center kernels; see `benches/`.
