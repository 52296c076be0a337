//! A learner for an increasing union `⋃_i P_i`: guess the program tagging the stream with the
//! least layer it is still in.

use std::sync::Arc;

use serde_json::json;

use super::Transcript;
use crate::kernel::{library, Machine, Nat};
use crate::learners::Learner;
use crate::trees::ClosedClass;
use crate::word::Sym;

pub struct Sigma2Learner {
    machine: Arc<Machine>,
    layers: Vec<ClosedClass>,
    prepend: Nat,
}

impl Sigma2Learner {
    pub fn layers(&self) -> &[ClosedClass] {
        &self.layers
    }

    /// Least `i` with `f ∈ T_{P_i}`, or the number of layers when there is none.
    pub fn tag(&self, f: &[Sym]) -> usize {
        self.layers.iter().position(|p| p.contains(f)).unwrap_or(self.layers.len())
    }

    /// The program `g ↦ i⌢g`.
    pub fn program(&self, i: usize) -> Nat {
        self.machine.smn(&self.prepend, &[Nat::from(i as u64)]).expect("prepend has arity 2")
    }

    /// The converged tag is right when `f` lies in layer `i` but not in layer `i − 1`.
    pub fn tag_correct(&self, f: &[Sym]) -> bool {
        let i = self.tag(f);
        i < self.layers.len() && (i == 0 || !self.layers[i - 1].contains(f))
    }

    pub fn transcript(&self, f: &[Sym]) -> Transcript {
        let mut t = Transcript::new("sigma2-union");
        let mut last = None;
        for n in 0..=f.len() {
            let i = self.tag(&f[..n]);
            if last != Some(i) {
                t.push(n, "learner", "tag", json!({ "layer": i }));
                last = Some(i);
            }
        }
        t
    }
}

impl Learner for Sigma2Learner {
    fn name(&self) -> String {
        let names: Vec<&str> = self.layers.iter().map(|p| p.label()).collect();
        format!("sigma2-union [{}]", names.join(", "))
    }

    fn guess(&self, prefix: &[Sym]) -> Nat {
        self.program(self.tag(prefix))
    }
}

/// The union learner over an increasing chain `P_0 ⊆ P_1 ⊆ …`.
pub fn sigma2_union_learner(machine: Arc<Machine>, layers: Vec<ClosedClass>) -> Sigma2Learner {
    Sigma2Learner { machine, layers, prepend: library::prepend().encode() }
}
