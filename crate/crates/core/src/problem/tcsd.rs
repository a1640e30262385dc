use super::{BestKnown, Problem};
use alloc::vec;

const LOWER: [f64; 3] = [0.05, 0.25, 2.0];
const UPPER: [f64; 3] = [2.0, 1.3, 15.0];

/// Costs of `(c1, c2, c3, c4, f)`: the number of multiplications and
/// divisions in each closed form below.
const COSTS: [u64; 5] = [1, 4, 8, 14, 3];

/// Tension/compression spring design: minimize the spring weight subject to
/// outside diameter, surge frequency, minimum deflection and shear stress
/// limits. Variables are the mean coil diameter, wire diameter and the active
/// coil length.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tcsd;

impl Tcsd {
    pub const BEST_POINT: [f64; 3] = [0.051686, 0.35666, 11.29231];
    pub const BEST_VALUE: f64 = 0.0126652;

    pub fn objective_value(x: &[f64]) -> f64 {
        let (x1, x2, x3) = (x[0], x[1], x[2]);
        x1 * x1 * x2 * (x3 + 2.0)
    }

    /// Closed form of constraint `j` (0-based); non-finite on crashes.
    pub fn constraint_value(j: usize, x: &[f64]) -> f64 {
        let (x1, x2, x3) = (x[0], x[1], x[2]);
        match j {
            // outside diameter
            0 => (x1 + x2) / 1.5 - 1.0,
            // surge frequency
            1 => 1.0 - 140.45 * x1 / (x2 * x2 * x3),
            // minimum deflection
            2 => 1.0 - x2 * x2 * x2 * x3 / (71785.0 * x1 * x1 * x1 * x1),
            // shear stress; the denominator vanishes when x2 == x1
            3 => {
                let denom = 12566.0 * (x1 * x1 * x1 * x2 - x1 * x1 * x1 * x1);
                if denom == 0.0 || x1 == 0.0 {
                    return f64::INFINITY;
                }
                (4.0 * x2 * x2 - x1 * x2) / denom + 1.0 / (5108.0 * x1 * x1) - 1.0
            }
            _ => panic!("TCSD has 4 constraints, got index {j}"),
        }
    }
}

impl Problem for Tcsd {
    fn name(&self) -> &str {
        "tcsd"
    }

    fn lower_bounds(&self) -> &[f64] {
        &LOWER
    }

    fn upper_bounds(&self) -> &[f64] {
        &UPPER
    }

    fn num_constraints(&self) -> usize {
        4
    }

    fn costs(&self) -> &[u64] {
        &COSTS
    }

    fn raw_constraint(&self, j: usize, x: &[f64]) -> f64 {
        Self::constraint_value(j, x)
    }

    fn raw_objective(&self, x: &[f64]) -> f64 {
        Self::objective_value(x)
    }

    fn best_known(&self) -> Option<BestKnown> {
        Some(BestKnown { point: vec![Self::BEST_POINT[0], Self::BEST_POINT[1], Self::BEST_POINT[2]], objective_value: Self::BEST_VALUE })
    }
}
