//! Browser bindings. Every export takes source text and returns a plain
//! text report; errors come back as text starting with `error:`.

use wasm_bindgen::prelude::*;

use effectus::cps::{check_cps_correct, cps_value, normalize_value, CheckConfig};
use effectus::effects::{parse_family, ObservationFamily};
use effectus::logic::{parse_formula, sat_value, QuantConfig};
use effectus::semantics::{ecps_tree, epcf_tree};
use effectus::syntax::parse::{parse_program, split_header, Program, SourceFile};
use effectus::syntax::typing::{typecheck_ecps, typecheck_epcf};
use effectus::syntax::{ecps, epcf, TypeEnv};
use effectus::trees::{to_snapshot, Compat, TreeParams};

fn family(file: &SourceFile) -> Result<ObservationFamily, String> {
    parse_family(file.effects.as_deref().unwrap_or("pure"), 4)
}

fn run(r: Result<String, String>) -> String {
    r.unwrap_or_else(|e| format!("error: {e}"))
}

/// Names of the bundled programs, one per line.
#[wasm_bindgen]
pub fn examples() -> String {
    effectus::corpus::programs().collect::<Vec<_>>().join("\n")
}

/// Source of a bundled file, or the empty string.
#[wasm_bindgen]
pub fn example(name: &str) -> String {
    effectus::corpus::source(name).unwrap_or("").to_string()
}

/// Snapshot of the effect tree of a closed computation.
#[wasm_bindgen]
pub fn tree(src: &str, depth: usize, width: usize, budget: u64) -> String {
    run(tree_report(src, depth, width, budget))
}

pub fn tree_report(src: &str, depth: usize, width: usize, budget: u64) -> Result<String, String> {
    let (file, program) = parse_program(src).map_err(|e| e.to_string())?;
    let sig = family(&file)?.signature();
    let params = TreeParams { depth, width: width.max(2) };
    let tree = match &program {
        Program::Epcf(epcf::Term::Comp(m)) => {
            typecheck_epcf(&sig, &TypeEnv::new(), &epcf::Term::Comp(m.clone())).map_err(|e| e.to_string())?;
            epcf_tree(&epcf::Stack::id(), m, budget, params).map_err(|e| e.to_string())?
        }
        Program::Ecps(ecps::Term::Comp(t)) => {
            typecheck_ecps(&sig.to_ecps(), &TypeEnv::new(), &ecps::Term::Comp(t.clone())).map_err(|e| e.to_string())?;
            ecps_tree(t, budget, params).map_err(|e| e.to_string())?
        }
        _ => return Err("a tree needs a computation".into()),
    };
    Ok(to_snapshot(&tree.root))
}

/// Compares an EPCF computation's tree with the tree of its CPS image.
#[wasm_bindgen]
pub fn cps_check(src: &str, depth: usize, budget: u64) -> String {
    run(cps_report(src, depth, budget))
}

pub fn cps_report(src: &str, depth: usize, budget: u64) -> Result<String, String> {
    let (file, program) = parse_program(src).map_err(|e| e.to_string())?;
    let sig = family(&file)?.signature();
    let Program::Epcf(epcf::Term::Comp(m)) = program else {
        return Err("needs an EPCF computation".into());
    };
    let r = check_cps_correct(&sig, &m, &epcf::Stack::id(), CheckConfig::new(budget, depth, 4))
        .map_err(|e| e.to_string())?;
    let head = match &r.result {
        Compat::Equal => "equal".to_string(),
        Compat::Unresolved => "unresolved: agree as far as forced".to_string(),
        Compat::Divergent { path, left, right } => format!("divergent at {path:?}: {left} vs {right}"),
    };
    Ok(format!(
        "{head}\n\n-- source tree\n{}\n-- translated tree\n{}",
        to_snapshot(&r.epcf_tree.root),
        to_snapshot(&r.ecps_tree.root)
    ))
}

/// Checks a closed value against a formula.
#[wasm_bindgen]
pub fn check(src: &str, formula: &str) -> String {
    run(check_report(src, formula))
}

pub fn check_report(src: &str, formula: &str) -> Result<String, String> {
    let (file, program) = parse_program(src).map_err(|e| e.to_string())?;
    let family = family(&file)?;
    let sig = family.signature();
    let v = match program {
        Program::Ecps(ecps::Term::Value(v)) => v,
        Program::Epcf(epcf::Term::Value(v)) => {
            let v = normalize_value(&sig, &TypeEnv::new(), &v).map_err(|e| e.to_string())?;
            cps_value(&sig, &TypeEnv::new(), &v).map_err(|e| e.to_string())?
        }
        _ => return Err("formulas describe values".into()),
    };
    let body = split_header(formula).map_err(|e| e.to_string())?.body;
    let phi = parse_formula(&body).map_err(|e| e.to_string())?;
    let sat = sat_value(&v, &phi, &QuantConfig::new(family)).map_err(|e| e.to_string())?;
    let mut out = sat.verdict.to_string();
    if sat.pool_relative {
        out.push_str(&format!(" (over {} argument tuples)", sat.tuples));
    }
    if let Some((args, p)) = sat.witness {
        let args: Vec<_> = args.iter().map(|a| a.to_string()).collect();
        out.push_str(&format!("\nrefuted at ({}) for {p}", args.join(", ")));
    }
    Ok(out)
}
