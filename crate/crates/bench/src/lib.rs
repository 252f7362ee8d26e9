//! Criterion benchmarks for `hdwalk-core`; see `benches/`.
