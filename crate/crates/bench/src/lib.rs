//! Benchmarks for the model finder and the classifier live in `benches/`.
