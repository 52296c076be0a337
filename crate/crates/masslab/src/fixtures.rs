//! Named fixture classes and machines shared by the DSL, the check suites and the CLI.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::kernel::{library, Machine, MachineBuilder};
use crate::trees::{dnr, homogeneous, pattern, singleton, ClosedClass, DnrSpec, Pattern};

/// Registry slots of the default machine.
pub const FIXTURE_SLOTS: u64 = 64;

/// Slot 0 outputs 1 within two steps; slot `p ≡ 0 (mod 3)`, `p ≥ 3`, outputs `(p/3) mod 2`
/// after exactly `2p` steps; every other slot loops.
pub fn fixture_machine() -> Arc<Machine> {
    static M: OnceLock<Arc<Machine>> = OnceLock::new();
    M.get_or_init(|| {
        let mut b = MachineBuilder::new();
        for p in 0..FIXTURE_SLOTS {
            let prog = if p == 0 {
                library::constant(1)
            } else if p % 3 == 0 {
                library::slow_constant(2 * p as usize, (p / 3) % 2)
            } else {
                library::looping()
            };
            b.push(&format!("diag{p}"), prog).expect("fixture slot");
        }
        b.build()
    })
    .clone()
}

/// `DNR_2` over the fixture machine; the complete base of recursive meets.
pub fn base() -> ClosedClass {
    dnr(fixture_machine(), &DnrSpec::new(2))
}

fn pat(name: &str, width: u64, avoid_prefix: &[&[u64]], avoid_factor: &[&[u64]]) -> ClosedClass {
    pattern(
        name,
        &Pattern {
            width,
            avoid_prefix: avoid_prefix.iter().map(|w| w.to_vec()).collect(),
            avoid_factor: avoid_factor.iter().map(|w| w.to_vec()).collect(),
        },
    )
}

/// The stock fixture classes.
pub fn classes() -> Vec<ClosedClass> {
    vec![
        pat("fixtureA", 2, &[], &[&[1, 1]]),
        pat("fixtureB", 2, &[], &[&[1, 0], &[1, 1]]),
        pat("fixtureC", 2, &[&[1, 1, 0], &[1, 1, 1]], &[&[0, 1, 1]]),
        singleton(&[0, 1], &[]).relabel("fixtureD"),
        homogeneous(&[[0, 1].into(), [1].into(), [0, 2].into()]).relabel("fixtureE"),
    ]
}

#[derive(Clone)]
pub struct Registry {
    classes: BTreeMap<String, ClosedClass>,
    machine: Arc<Machine>,
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum Entry {
    Pattern(Pattern),
    Homog(Vec<Vec<u64>>),
    Singleton { prefix: Vec<u64>, #[serde(default)] cycle: Vec<u64> },
}

impl Registry {
    pub fn standard() -> Registry {
        Registry {
            classes: classes().into_iter().map(|c| (c.label().to_string(), c)).collect(),
            machine: fixture_machine(),
        }
    }

    pub fn machine(&self) -> Arc<Machine> {
        self.machine.clone()
    }

    pub fn with_machine(mut self, machine: Arc<Machine>) -> Registry {
        self.machine = machine;
        self
    }

    pub fn base(&self) -> ClosedClass {
        dnr(self.machine.clone(), &DnrSpec::new(2))
    }

    pub fn insert(&mut self, name: &str, class: ClosedClass) {
        self.classes.insert(name.to_string(), class.relabel(name));
    }

    pub fn get(&self, name: &str) -> Result<ClosedClass> {
        self.classes.get(name).cloned().ok_or_else(|| Error::UnknownFixture(name.to_string()))
    }

    pub fn names(&self) -> Vec<String> {
        self.classes.keys().cloned().collect()
    }

    /// Adds the classes of a JSON object `{name: {"pattern": …} | {"homog": …} | {"singleton": …}}`.
    pub fn load_json(&mut self, text: &str) -> Result<()> {
        let entries: BTreeMap<String, Entry> =
            serde_json::from_str(text).map_err(|e| Error::Io(format!("fixture file: {e}")))?;
        for (name, e) in entries {
            let class = match e {
                Entry::Pattern(p) => pattern(&name, &p),
                Entry::Homog(fs) => {
                    let sets: Vec<_> = fs.into_iter().map(|f| f.into_iter().collect()).collect();
                    homogeneous(&sets)
                }
                Entry::Singleton { prefix, cycle } => singleton(&prefix, &cycle),
            };
            self.insert(&name, class);
        }
        Ok(())
    }

    pub fn load_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        self.load_json(&text)
    }
}

impl Default for Registry {
    fn default() -> Self {
        Registry::standard()
    }
}
