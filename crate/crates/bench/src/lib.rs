//! Fixtures shared by the criterion benchmarks.

use lr_horizon::dynamics::ProtocolSchedule;
use lr_horizon::lattice::{CouplingModel, LatticeSpec};

/// Ring sizes swept by the transform benchmarks.
pub const RING_SIZES: [usize; 3] = [1 << 10, 1 << 14, 1 << 18];

pub fn ring_with_model(n: usize, alpha: f64) -> (LatticeSpec, CouplingModel) {
    (
        LatticeSpec::ring(n).expect("valid ring"),
        CouplingModel::new(alpha).expect("valid alpha"),
    )
}

/// Two-stage transfer schedule on an open chain of `n` sites.
pub fn transfer_schedule(n: usize) -> ProtocolSchedule {
    ProtocolSchedule::new(n, 0.5, 1).expect("valid protocol")
}
