//! Shared fixtures for the benchmark harness.

use std::sync::Arc;

use charp_core::arith::{ring, Ring};
use charp_core::random::{ConnectionKind, Fixtures};
use charp_core::ConnectionData;

pub fn plain_ring(p: u64, vars: usize) -> Arc<Ring> {
    let names = ["x", "y", "z"];
    ring(p, &names[..vars], None).expect("small prime")
}

/// A gauge-flat connection of rank `d` over two variables, seeded.
pub fn flat_connection(p: u64, d: usize, seed: u64) -> ConnectionData {
    let r = plain_ring(p, 2);
    Fixtures::new(seed).connection(&r, ConnectionKind::GaugeFlat, d, 1).expect("fixture")
}

/// The same in one variable, for the Cartier kernels.
pub fn flat_connection_1d(p: u64, d: usize, seed: u64) -> ConnectionData {
    let r = plain_ring(p, 1);
    Fixtures::new(seed).connection(&r, ConnectionKind::GaugeFlat, d, 1).expect("fixture")
}
