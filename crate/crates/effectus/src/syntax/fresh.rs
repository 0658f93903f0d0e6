use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};

use super::Name;

static GLOBAL_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Process-wide fresh name. The `%` makes it impossible to write in source
/// text, so it can never clash with a parsed identifier.
pub fn fresh_global(base: &str) -> Name {
    let n = GLOBAL_COUNTER.fetch_add(1, Ordering::Relaxed);
    format!("{base}%{n}")
}

/// Deterministic name supply that avoids a fixed set of names and every
/// name it has already handed out. Produces `k`, `k1`, `k2`, … so that
/// printed output stays readable and reproducible.
#[derive(Clone, Debug, Default)]
pub struct NameSupply {
    used: BTreeSet<Name>,
}

impl NameSupply {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn avoiding<I: IntoIterator<Item = Name>>(names: I) -> Self {
        NameSupply { used: names.into_iter().collect() }
    }

    pub fn avoid(&mut self, name: &str) {
        self.used.insert(name.to_string());
    }

    pub fn fresh(&mut self, base: &str) -> Name {
        let base = base.trim_end_matches(|c: char| c.is_ascii_digit());
        let base = if base.is_empty() { "v" } else { base };
        if !self.used.contains(base) {
            self.used.insert(base.to_string());
            return base.to_string();
        }
        let mut i = 1u64;
        loop {
            let cand = format!("{base}{i}");
            if !self.used.contains(&cand) {
                self.used.insert(cand.clone());
                return cand;
            }
            i += 1;
        }
    }
}
