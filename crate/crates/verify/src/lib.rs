//! Hosts the acceptance suite in `tests/acceptance.rs`; it sits in its own
//! package so that it runs after every other test target.
