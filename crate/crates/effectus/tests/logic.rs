use effectus::corpus;
use effectus::effects::{Observation, ObservationFamily, Verdict};
use effectus::logic::*;
use effectus::semantics::ecps_tree;
use effectus::syntax::ecps::{self, Comp, Value};
use effectus::syntax::parse::{parse_ecps_type, parse_ecps_value};
use effectus::syntax::EcpsType;
use effectus::trees::{to_snapshot, TreeParams};

fn fml(src: &str) -> Formula {
    let body = corpus::source(src).unwrap_or(src);
    parse_formula(body.trim()).unwrap_or_else(|e| panic!("{src}: {e}"))
}

fn ty(src: &str) -> EcpsType {
    parse_ecps_type(src).unwrap()
}

fn prob() -> QuantConfig {
    QuantConfig::new(ObservationFamily::Prob)
}

fn nondet() -> QuantConfig {
    QuantConfig::new(ObservationFamily::Nondet)
}

#[test]
fn well_formedness() {
    assert!(formula_wf(&fml("{3}"), &EcpsType::Nat, Fragment::F));
    assert!(formula_wf(&fml("({2}, {3} -> diamond) -> diamond"), &ty("not(nat, not(nat))"), Fragment::F));
    assert!(!formula_wf(&fml("{3}"), &EcpsType::Unit, Fragment::F));
    assert!(!formula_wf(&fml("({2}) -> diamond"), &ty("not(nat, nat)"), Fragment::F));
    let negated = fml("not({3})");
    assert!(formula_wf(&negated, &EcpsType::Nat, Fragment::F));
    assert!(!formula_wf(&negated, &EcpsType::Nat, Fragment { positive: true, ..Fragment::F }));
    let v = fml("[3, fun (x:nat) -> stop] -> diamond");
    assert_eq!(v.logic(), Logic::V);
    assert!(formula_wf(&v, &ty("not(nat, not(nat))"), Fragment::V));
    assert!(!formula_wf(&v, &ty("not(nat, not(nat))"), Fragment::F));
    assert!(!formula_wf(&fml("[*] -> diamond"), &ty("not(nat)"), Fragment::V));
}

#[test]
fn formula_text_round_trips() {
    for name in ["prob09", "prob09_zero", "g_phi2", "lassen", "addc_sum", "g_values"] {
        let f = fml(name);
        assert_eq!(parse_formula(&f.to_string()).unwrap(), f, "{name}");
    }
    assert_eq!(fml("({2})"), Formula::NatIs(2));
    assert_eq!(fml("or[{1}, not({2})]").to_string(), "or[{1}, not({2})]");
    assert!(parse_formula("{2} ->").is_err());
    assert!(parse_formula("and[{1},").is_err());
}

#[test]
fn satisfaction_examples() {
    let cfg = prob();
    let (f1, f2) = (corpus::ecps_value("f1"), corpus::ecps_value("f2"));
    let phi = fml("prob09");
    let s1 = sat_value(&f1, &phi, &cfg).unwrap();
    assert_eq!(s1.verdict, Verdict::Holds);
    let s2 = sat_value(&f2, &phi, &cfg).unwrap();
    assert_eq!(s2.verdict, Verdict::Fails);
    assert_eq!(s2.witness, Some((vec![Value::numeral(4)], Observation::prob_gt(9, 10))));
    // Nat antecedents are decided exactly: no pool is involved.
    assert!(!s1.pool_relative);
    assert_eq!(sat_value(&Value::numeral(3), &Formula::NatIs(3), &cfg).unwrap().verdict, Verdict::Holds);
    assert_eq!(sat_value(&Value::numeral(3), &Formula::NatIs(2), &cfg).unwrap().verdict, Verdict::Fails);

    let zero = fml("prob09_zero");
    assert_eq!(distinguish(&f1, &f2, &phi, &cfg).unwrap(), Distinction::Distinguished { left_holds: true });
    assert_eq!(distinguish(&f1, &f2, &zero, &cfg).unwrap(), Distinction::NotByThisFormula);
    for v in [&f1, &f2] {
        for p in [&phi, &zero] {
            assert!(!matches!(distinguish(v, v, p, &cfg).unwrap(), Distinction::Distinguished { .. }));
        }
    }
}

#[test]
fn computation_examples() {
    let cfg = nondet();
    assert_eq!(sat_comp(&Comp::Stop, &Observation::May, &cfg).unwrap(), Verdict::Holds);
    assert_eq!(sat_comp(&ecps::loop_comp(), &Observation::May, &cfg).unwrap(), Verdict::Fails);
    let g = Comp::app(corpus::ecps_value("g_star"), vec![Value::numeral(3), parse_ecps_value("fun (x:nat) -> stop").unwrap()]);
    assert_eq!(sat_comp(&g, &Observation::May, &cfg).unwrap(), Verdict::Holds);
    assert_eq!(sat_comp(&g, &Observation::Must, &cfg).unwrap(), Verdict::Holds);
    let t = ecps_tree(&g, 1000, TreeParams { depth: 2, width: 3 }).unwrap();
    assert_eq!(to_snapshot(&t.root), "(node or 0\n  (stop)\n  (stop)\n  (bot certified)\n  ..)\n");
    assert!(sat_comp(&Comp::Stop, &Observation::prob_gt(1, 2), &cfg).is_err());
}

#[test]
fn example_formulas_on_g() {
    let cfg = nondet();
    let g = corpus::ecps_value("g_star");
    let s = sat_value(&g, &fml("g_phi2"), &cfg).unwrap();
    assert_eq!(s.verdict, Verdict::Holds);
    assert!(s.pool_relative && s.tuples > 0);
    assert_eq!(sat_value(&g, &fml("g_values"), &cfg).unwrap().verdict, Verdict::Holds);
    // g(3, k) may reach k applied to 2 and 4, never 3.
    assert_eq!(sat_value(&g, &fml("({3}, {3} -> diamond) -> diamond"), &cfg).unwrap().verdict, Verdict::Fails);
    let addc = corpus::ecps_value("addc");
    let pure = QuantConfig::new(ObservationFamily::Pure);
    assert_eq!(sat_value(&addc, &fml("addc_sum"), &pure).unwrap().verdict, Verdict::Holds);
    assert_eq!(sat_value(&addc, &fml("({2}, {3}, {4} -> terminates) -> terminates"), &pure).unwrap().verdict, Verdict::Fails);
}

#[test]
fn type_mismatch_is_an_error() {
    let cfg = prob();
    let e = sat_value(&Value::numeral(3), &fml("({1}) -> prob> 1/2"), &cfg).unwrap_err();
    assert!(matches!(e, LogicError::TypeMismatch { .. }), "{e}");
    assert!(sat_value(&Value::var("free"), &Formula::NatIs(1), &cfg).is_err());
}

fn replay(v: &Value, s: &Sat, cfg: &QuantConfig) {
    let (args, p) = s.witness.clone().expect("a failing arrow formula carries a witness");
    let app = Comp::app(v.clone(), args.clone());
    assert_eq!(sat_comp(&app, &p, cfg).unwrap(), Verdict::Fails, "{app}");
    // The same tuple, stored in the formula, refutes the V formula.
    let stored = Formula::ArrowV(args, p);
    assert_eq!(sat_value(v, &stored, cfg).unwrap().verdict, Verdict::Fails);
}

/// Value/formula pairs with definite verdicts, in both directions.
fn cases() -> Vec<(Value, Formula, QuantConfig)> {
    let g = corpus::ecps_value("g_star");
    vec![
        (corpus::ecps_value("f1"), fml("prob09"), prob()),
        (corpus::ecps_value("f2"), fml("prob09"), prob()),
        (corpus::ecps_value("f2"), fml("prob09_zero"), prob()),
        (corpus::ecps_value("lassen_v1"), fml("lassen"), nondet()),
        (corpus::ecps_value("lassen_v2"), fml("lassen"), nondet()),
        (g.clone(), fml("g_phi2"), nondet()),
        (g.clone(), fml("({3}, {3} -> diamond) -> diamond"), nondet()),
        (g, fml("({0}, {0} -> box) -> box"), nondet()),
        (corpus::ecps_value("addc"), fml("addc_sum"), QuantConfig::new(ObservationFamily::Pure)),
    ]
}

#[test]
fn failures_replay_on_both_logics() {
    let mut fails = 0;
    for (v, phi, cfg) in cases() {
        let s = sat_value(&v, &phi, &cfg).unwrap();
        if s.verdict == Verdict::Fails && !matches!(phi, Formula::NatIs(_)) {
            fails += 1;
            replay(&v, &s, &cfg);
        }
    }
    assert!(fails >= 3);
}

#[test]
fn connectives_are_kleene() {
    for (v, phi, cfg) in cases() {
        let base = sat_value(&v, &phi, &cfg).unwrap().verdict;
        let not_not = Formula::Not(Box::new(Formula::Not(Box::new(phi.clone()))));
        assert_eq!(sat_value(&v, &not_not, &cfg).unwrap().verdict, base);
        assert_eq!(sat_value(&v, &Formula::Not(Box::new(phi.clone())), &cfg).unwrap().verdict, base.not());
        let both = Formula::And(vec![phi.clone(), phi.clone()]);
        assert_eq!(sat_value(&v, &both, &cfg).unwrap().verdict, base);
        let either = Formula::Or(vec![phi.clone(), Formula::Not(Box::new(phi.clone()))]);
        let e = sat_value(&v, &either, &cfg).unwrap().verdict;
        assert_eq!(e, if base.is_definite() { Verdict::Holds } else { Verdict::Unknown });
    }
    let cfg = nondet();
    let n = Value::numeral(2);
    let holds = Formula::NatIs(2);
    let fails = Formula::NatIs(5);
    let v = |f: Formula| sat_value(&n, &f, &cfg).unwrap().verdict;
    assert_eq!(v(Formula::And(vec![holds.clone(), holds.clone()])), Verdict::Holds);
    assert_eq!(v(Formula::And(vec![holds.clone(), fails.clone()])), Verdict::Fails);
    assert_eq!(v(Formula::Or(vec![fails.clone(), holds.clone()])), Verdict::Holds);
    assert_eq!(v(Formula::Or(vec![])), Verdict::Fails);
    assert_eq!(v(Formula::And(vec![])), Verdict::Holds);
}

#[test]
fn budgets_never_flip_verdicts() {
    for (v, phi, cfg) in cases() {
        let mut seen = Verdict::Unknown;
        for budget in [20, 60, 200, 600, 2000] {
            let c = QuantConfig { budget, ..cfg.clone() };
            let now = sat_value(&v, &phi, &c).unwrap().verdict;
            if seen.is_definite() {
                assert_eq!(now, seen, "{phi} at budget {budget}");
            }
            if now.is_definite() {
                seen = now;
            }
        }
        assert!(seen.is_definite(), "{phi} never resolved");
    }
}

#[test]
fn candidates_and_pools() {
    let cfg = nondet();
    assert_eq!(cfg.candidates(&EcpsType::Unit), (vec![Value::Star], true));
    let (nats, exact) = cfg.candidates(&EcpsType::Nat);
    assert_eq!(nats.len(), 6);
    assert!(!exact);
    let (conts, _) = cfg.candidates(&ty("not(nat)"));
    assert!(conts.len() >= 8);
    let extra = parse_ecps_value("fun (n:nat) -> op[or](0, x. stop)").unwrap();
    let cfg = cfg.with_pool(ty("not(nat)"), vec![extra.clone()]);
    assert!(cfg.candidates(&ty("not(nat)")).0.contains(&extra));
    let sel = select("x", 2);
    let k = Value::lam1("x", EcpsType::Nat, sel);
    let run = |n| sat_comp(&Comp::app1(k.clone(), Value::numeral(n)), &Observation::May, &cfg).unwrap();
    assert_eq!((run(1), run(2), run(3)), (Verdict::Fails, Verdict::Holds, Verdict::Fails));
    let lib = library(&[EcpsType::Nat], 3);
    assert!(lib.iter().all(|w| effectus::syntax::typing::type_of_ecps_value(&cfg.sig(), &Default::default(), w).unwrap() == ty("not(nat)")));
}
