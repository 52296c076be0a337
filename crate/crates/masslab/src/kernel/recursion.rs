//! Kleene's recursion theorem over the kernel.

use super::library;
use super::machine::{Machine, Outcome};
use super::nat::Nat;
use crate::error::{Error, Result};

/// Returns `n` with `Φ_n ≃ Φ_{b(n)}` where `b = Φ_builder` is total.
///
/// With `d(x) = smn(D, ⟨x⟩)` and `Φ_D(x, n) = Φ_{Φ_x(x)}(n)`, pick `v` computing `x ↦ b(d(x))`;
/// then `n = d(v)` satisfies `Φ_n = Φ_{Φ_v(v)} = Φ_{b(n)}`.
pub fn fixpoint(m: &Machine, builder: &Nat, budget: u64) -> Result<Nat> {
    m.resolve(builder)?;
    let diagonal = library::recursion_diagonal().encode();
    let v = library::recursion_builder_call(&diagonal, builder).encode();
    let n = m.smn(&diagonal, &[v])?;
    match m.run_stats(builder, &[], n.clone(), budget)?.outcome {
        Outcome::Halted(_) => Ok(n),
        other => Err(Error::Construction(format!(
            "builder did not produce an index within {budget} steps ({other:?})"
        ))),
    }
}

/// `Φ_builder(n)` under the harness budget.
pub fn apply_builder(m: &Machine, builder: &Nat, n: &Nat, budget: u64) -> Result<Nat> {
    match m.run_stats(builder, &[], n.clone(), budget)?.outcome {
        Outcome::Halted(v) => Ok(v),
        other => Err(Error::Construction(format!("builder did not halt ({other:?})"))),
    }
}
