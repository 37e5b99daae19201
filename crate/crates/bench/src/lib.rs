//! Benchmarks for the tri3 kernel live in `benches/`; run them with
//! `cargo bench -p tri3-bench`.
