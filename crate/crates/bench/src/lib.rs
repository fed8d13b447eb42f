//! Criterion benchmarks for the `fracreach` hot paths; see `benches/`.
