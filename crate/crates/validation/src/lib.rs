//! Acceptance suite for `cavity-cps`; the checks live in `tests/acceptance.rs`
//! and run with `cargo test -p cavity-cps-validation`.
