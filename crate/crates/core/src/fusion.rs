//! Late fusion: element-wise mean of several plans, rounded half up.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::plan::BinaryPlan;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FusionError {
    EmptyInput,
    LengthMismatch {
        expected: usize,
        found: usize,
        plan: usize,
    },
}

impl fmt::Display for FusionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FusionError::EmptyInput => f.write_str("fusion needs at least one plan"),
            FusionError::LengthMismatch {
                expected,
                found,
                plan,
            } => {
                write!(f, "plan {plan} has length {found}, expected {expected}")
            }
        }
    }
}

/// Fuses `m` plans of equal length. Bit `j` is set when at least half of the
/// plans set it, i.e. `round(mean)` with 0.5 rounding up. The result is
/// labelled `fused(m)`.
pub fn fuse(plans: &[BinaryPlan]) -> Result<BinaryPlan, FusionError> {
    let first = plans.first().ok_or(FusionError::EmptyInput)?;
    let n = first.len();
    let mut votes: Vec<usize> = alloc::vec![0; n];
    for (index, plan) in plans.iter().enumerate() {
        if plan.len() != n {
            return Err(FusionError::LengthMismatch {
                expected: n,
                found: plan.len(),
                plan: index,
            });
        }
        for (count, bit) in votes.iter_mut().zip(plan.bits()) {
            *count += usize::from(*bit);
        }
    }
    let m = plans.len();
    // 2 * votes >= m is round-half-up of votes / m without float error
    let bits = votes.iter().map(|&v| u8::from(2 * v >= m)).collect();
    Ok(BinaryPlan::new(bits, format!("fused({m})")).expect("votes produce 0/1 bits"))
}
