//! Criterion benchmarks for `bezout-owf`; see `benches/`.
