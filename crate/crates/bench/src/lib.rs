//! Fixtures shared by the solver benchmarks.

use gapscope::{assemble, PathSpec, TridiagonalOperator, WeightProfile};

/// Unit weights with `u = 1` on `2k+1` vertices.
pub fn unit_operator(k: usize) -> TridiagonalOperator {
    assemble(&PathSpec::unit(k, 1.0).expect("valid instance"))
}

/// Power-law weights `1/n²` with `u = 1`.
pub fn decaying_operator(k: usize) -> TridiagonalOperator {
    let weights = WeightProfile::power_law(1.0, 2.0).expect("valid profile");
    assemble(&PathSpec::new(k, weights, 1.0).expect("valid instance"))
}
