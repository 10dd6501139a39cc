//! Criterion benchmarks for the D-AF simulator; see `benches/`.
