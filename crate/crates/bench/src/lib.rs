//! Criterion benchmarks for `vislat`; see `benches/`.
