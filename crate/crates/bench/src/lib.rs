//! Benchmark-only crate; see `benches/evaluation.rs` for the criterion
//! groups covering bound evaluation, determinant factorization,
//! trajectory simulation, and the Monte Carlo harness.
