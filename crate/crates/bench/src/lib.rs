//! Criterion benchmarks for `sublil-core`; see `benches/`.
