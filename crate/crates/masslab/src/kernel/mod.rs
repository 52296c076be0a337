//! A register machine with oracle reads, its Gödel numbering, s-m-n, the recursion theorem,
//! and the diagonal pairing `z(v,u)`.

pub mod corpus;
pub mod library;
pub mod machine;
pub mod nat;
pub mod program;
pub mod recursion;

pub use machine::{DiagCoding, Machine, MachineBuilder, Native, Outcome, Resolved, RunStats, SLOT_LIMIT};
pub use nat::Nat;
pub use program::{assemble, Instr, Program};
pub use recursion::fixpoint;

/// Default harness budget, overridable through `MASSLAB_BUDGET`.
pub const DEFAULT_BUDGET: u64 = 10_000;

pub fn default_budget() -> u64 {
    std::env::var("MASSLAB_BUDGET")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}
