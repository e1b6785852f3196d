//! Home of the workspace acceptance suite (`tests/acceptance.rs`), kept in
//! its own package so it runs after every other test target. Run it alone
//! with `cargo test -p ncc-validation --test acceptance`.
