//! Test-only package. The acceptance checks live in `tests/acceptance.rs`.
