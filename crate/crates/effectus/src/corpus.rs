//! The bundled example programs, formulas and contexts.

use crate::effects::{parse_family, ObservationFamily};
use crate::syntax::parse::{parse_program_list, Program, SourceFile};
use crate::syntax::{ecps, epcf};

macro_rules! bundle {
    ($($dir:literal / $name:literal),* $(,)?) => {
        &[$((concat!($dir, "/", $name), include_str!(concat!("../../../", $dir, "/", $name)))),*]
    };
}

/// `(path, contents)` for every bundled file, paths relative to the
/// workspace root.
pub const FILES: &[(&str, &str)] = bundle![
    "corpus" / "return_star.epcf",
    "corpus" / "por_loop.epcf",
    "corpus" / "nat_gen.epcf",
    "corpus" / "store_update_lookup.epcf",
    "corpus" / "read_write.epcf",
    "corpus" / "min.epcf",
    "corpus" / "double.epcf",
    "corpus" / "addc.ecps",
    "corpus" / "g_star.ecps",
    "corpus" / "m12.ecps",
    "corpus" / "m13.ecps",
    "corpus" / "n1213.ecps",
    "corpus" / "n1213_prime.ecps",
    "corpus" / "f1.ecps",
    "corpus" / "f2.ecps",
    "corpus" / "callcc.ecps",
    "corpus" / "throw.ecps",
    "corpus" / "callcc_f1.ecps",
    "corpus" / "callcc_f2.ecps",
    "corpus" / "lassen_v1.ecps",
    "corpus" / "lassen_v2.ecps",
    "corpus" / "lassen_m.epcf",
    "corpus" / "lassen_p.epcf",
    "corpus" / "io_read_write.ecps",
    "corpus" / "io_read_case.ecps",
    "corpus" / "nondet_tree.ecps",
    "corpus" / "nondet_both.ecps",
    "corpus" / "nondet_one.ecps",
    "corpus" / "stop.ecps",
    "corpus" / "loop.ecps",
    "corpus" / "store_commute.ecps",
    "corpus" / "store_write_read.ecps",
    "corpus" / "store_read_write.ecps",
    "corpus" / "store_write_write.ecps",
    "formulas" / "prob09.fml",
    "formulas" / "prob09_zero.fml",
    "formulas" / "g_phi2.fml",
    "formulas" / "lassen.fml",
    "formulas" / "addc_sum.fml",
    "formulas" / "g_values.fml",
    "contexts" / "nondet.ctx",
    "contexts" / "prob.ctx",
    "contexts" / "store.ctx",
    "contexts" / "lassen.ctx",
    "contexts" / "lassen_thunks.ctx",
];

/// Contents of a bundled file, by path (`corpus/f1.ecps`) or bare name (`f1`).
pub fn source(name: &str) -> Option<&'static str> {
    FILES.iter().find(|(p, _)| *p == name || stem(p) == name).map(|(_, s)| *s)
}

fn stem(path: &str) -> &str {
    let file = path.rsplit('/').next().unwrap_or(path);
    file.split('.').next().unwrap_or(file)
}

/// Names of the bundled programs.
pub fn programs() -> impl Iterator<Item = &'static str> {
    FILES.iter().filter(|(p, _)| p.starts_with("corpus/")).map(|(p, _)| stem(p))
}

/// A parsed corpus file. Panics on unknown names or malformed files, which
/// are build errors here.
pub struct Entry {
    pub file: SourceFile,
    pub terms: Vec<Program>,
}

pub fn entry(name: &str) -> Entry {
    let src = source(name).unwrap_or_else(|| panic!("no corpus file `{name}`"));
    let (file, terms) = parse_program_list(src).unwrap_or_else(|e| panic!("{name}: {e}"));
    Entry { file, terms }
}

impl Entry {
    pub fn family(&self, value_range: u64) -> ObservationFamily {
        parse_family(self.file.effects.as_deref().unwrap_or("pure"), value_range).expect("corpus family")
    }

    pub fn epcf_comp(&self, i: usize) -> epcf::Comp {
        match &self.terms[i] {
            Program::Epcf(epcf::Term::Comp(c)) => c.clone(),
            _ => panic!("term {i} is not an EPCF computation"),
        }
    }

    pub fn ecps_comp(&self, i: usize) -> ecps::Comp {
        match &self.terms[i] {
            Program::Ecps(ecps::Term::Comp(c)) => c.clone(),
            _ => panic!("term {i} is not an ECPS computation"),
        }
    }

    pub fn ecps_value(&self, i: usize) -> ecps::Value {
        match &self.terms[i] {
            Program::Ecps(ecps::Term::Value(v)) => v.clone(),
            _ => panic!("term {i} is not an ECPS value"),
        }
    }
}

pub fn epcf_comp(name: &str) -> epcf::Comp {
    entry(name).epcf_comp(0)
}

pub fn ecps_comp(name: &str) -> ecps::Comp {
    entry(name).ecps_comp(0)
}

pub fn ecps_value(name: &str) -> ecps::Value {
    entry(name).ecps_value(0)
}
