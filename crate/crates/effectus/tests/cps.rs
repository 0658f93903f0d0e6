mod common;

use effectus::corpus;
use effectus::cps::gen::{gen_program, GenConfig};
use effectus::cps::*;
use effectus::effects::ObservationFamily;
use effectus::logic::select;
use effectus::semantics::{ecps_tree, fix_unfolding, StepOutcome};
use effectus::syntax::alpha::{alpha_eq_ecps_value, alpha_eq_epcf_comp};
use effectus::syntax::epcf::{self, Stack};
use effectus::syntax::parse::*;
use effectus::syntax::print::pretty_ecps_value;
use effectus::syntax::typing::*;
use effectus::syntax::{ecps, EcpsType, EpcfType, TypeEnv};
use effectus::trees::{relabel, to_snapshot, tree_eq, Compat, TreeParams};

fn ty(src: &str) -> EpcfType {
    parse_epcf_type(src).unwrap()
}

#[test]
fn type_translation() {
    assert_eq!(cps_type(&EpcfType::Nat), EcpsType::Nat);
    assert_eq!(cps_type(&EpcfType::Unit), EcpsType::Unit);
    assert_eq!(cps_type(&ty("(nat -> nat) -> nat")), parse_ecps_type("not(not(nat, not(nat)), not(nat))").unwrap());
    assert_eq!(cps_comp_type(&EpcfType::Nat), parse_ecps_type("not(not(nat))").unwrap());
}

#[test]
fn arity_normalization() {
    let sig = ObservationFamily::Nondet.signature();
    let env = TypeEnv::new();
    let m = parse_epcf_comp("op[or](return 0, return 1)").unwrap();
    let n = normalize_arities(&sig, &env, &m).unwrap();
    let expected = parse_epcf_comp(
        "op[or](zero; fun (x:nat) -> case x of { zero -> return 0 | succ x1 -> case x1 of { zero -> return 1 | succ x2 -> loop } })",
    )
    .unwrap();
    assert!(alpha_eq_epcf_comp(&n, &expected), "{n}");
    assert!(n.is_arity_normal());
    assert!(alpha_eq_epcf_comp(&normalize_arities(&sig, &env, &n).unwrap(), &n));
    assert_eq!(type_of_epcf_comp(&sig, &env, &n).unwrap(), EpcfType::Nat);

    let io = ObservationFamily::Io.signature();
    let read = parse_epcf_comp("op[read](fun (x:nat) -> return x)").unwrap();
    let expected = parse_epcf_comp("op[read](zero; fun (x:nat) -> return x)").unwrap();
    assert!(alpha_eq_epcf_comp(&normalize_arities(&io, &env, &read).unwrap(), &expected));
    let write = parse_epcf_comp("op[write](2; return *)").unwrap();
    let expected = parse_epcf_comp("op[write](2; fun (x:nat) -> case x of { zero -> return * | succ y -> loop(unit) })").unwrap();
    assert!(alpha_eq_epcf_comp(&normalize_arities(&io, &env, &write).unwrap(), &expected));
}

#[test]
fn clause_shapes() {
    let sig = ObservationFamily::Pure.signature();
    let env = TypeEnv::new();
    let r = cps_comp(&sig, &env, &parse_epcf_comp("return 2").unwrap()).unwrap();
    assert!(alpha_eq_ecps_value(&r, &parse_ecps_value("fun (k:not(nat)) -> k(2)").unwrap()), "{r}");
    let id = cps_stack(&sig, &env, &Stack::id(), &EpcfType::Nat).unwrap();
    assert!(alpha_eq_ecps_value(&id, &parse_ecps_value("fun (x:nat) -> stop").unwrap()), "{id}");
    let lam = cps_value(&sig, &env, &parse_epcf_value("fun (x:nat) -> return x").unwrap()).unwrap();
    let expected = parse_ecps_value("fun (x:nat, k:not(nat)) -> (fun (j:not(nat)) -> j(x))(k)").unwrap();
    assert!(alpha_eq_ecps_value(&lam, &expected), "{lam}");
    let stack = Stack::id().push("y", parse_epcf_comp("return succ(y)").unwrap());
    let s = cps_stack(&sig, &env, &stack, &EpcfType::Nat).unwrap();
    let expected = parse_ecps_value("fun (y:nat) -> (fun (k:not(nat)) -> k(succ(y)))(fun (x:nat) -> stop)").unwrap();
    assert!(alpha_eq_ecps_value(&s, &expected), "{s}");
}

/// The recursion clause for `fix (fun (f:nat->nat) -> return fun (n:nat) -> return n)`,
/// copied clause by clause with the function's own translation in place.
const FIX_BY_HAND: &str = "
fun (k:not(not(nat, not(nat)))) ->
  (mu x. fun (c:not(not(nat, not(nat)))) ->
    c(fun (x':nat, k':not(nat)) ->
      (fun (k'':not(nat)) ->
        (fun (l:not(not(nat, not(nat)))) ->
          F(fun (y:nat, l':not(nat)) ->
              (fun (p:not(nat)) -> x(fun (z:not(nat, not(nat))) -> (fun (p':not(nat)) -> z(y, p'))(p)))(l'),
            l))
        (fun (w:not(nat, not(nat))) -> (fun (l'':not(nat)) -> w(x', l''))(k'')))
      (k')))
  (k)";

const F_STAR: &str = "(fun (f:not(nat, not(nat)), kf:not(not(nat, not(nat)))) ->
  (fun (kr:not(not(nat, not(nat)))) -> kr(fun (n:nat, kn:not(nat)) -> (fun (m:not(nat)) -> m(n))(kn)))(kf))";

const FIX_SNAPSHOT: &str = "\
fun (k4:not(not(nat, not(nat)))) ->
  (mu x. fun (c:not(not(nat, not(nat)))) ->
      c(fun (x':nat, k':not(nat)) ->
          (fun (k'':not(nat)) ->
            (fun (l:not(not(nat, not(nat)))) ->
              (fun (f:not(nat, not(nat)), k3:not(not(nat, not(nat)))) ->
                (fun (k2:not(not(nat, not(nat)))) ->
                  k2(fun (n:nat, k1:not(nat)) ->
                      (fun (k:not(nat)) -> k(n))(k1)))(k3))(fun (y:nat, l':not(nat)) ->
                  (fun (p:not(nat)) ->
                    x(fun (z:not(nat, not(nat))) ->
                        (fun (p':not(nat)) -> z(y, p'))(p)))(l'),
                l))(fun (w:not(nat, not(nat))) ->
                (fun (l'':not(nat)) -> w(x', l''))(k'')))(k')))(k4)";

#[test]
fn recursion_clause() {
    let sig = ObservationFamily::Pure.signature();
    let fix = parse_epcf_comp("fix (fun (f:nat->nat) -> return fun (n:nat) -> return n)").unwrap();
    let out = cps_comp(&sig, &TypeEnv::new(), &fix).unwrap();
    let by_hand = parse_ecps_value(&FIX_BY_HAND.replace("F(", &format!("{F_STAR}("))).unwrap();
    assert!(alpha_eq_ecps_value(&out, &by_hand), "{}", pretty_ecps_value(&out));
    assert_eq!(pretty_ecps_value(&out), FIX_SNAPSHOT);
    let t = type_of_ecps_value(&sig.to_ecps(), &TypeEnv::new(), &out).unwrap();
    assert_eq!(t, cps_comp_type(&ty("nat -> nat")));
}

/// `(fix F)* k` reaches `k v`; `v` behaves as the translated unfolding.
#[test]
fn recursion_unfolds() {
    let sig = ObservationFamily::Pure.signature();
    let env = TypeEnv::new();
    let f = parse_epcf_value(
        "fun (f:nat->nat) -> return fun (n:nat) -> case n of { zero -> return zero | succ m -> let r = f m in return succ(succ(r)) }",
    )
    .unwrap();
    let fix = cps_comp(&sig, &env, &epcf::Comp::Fix(f.clone())).unwrap();
    let k = ecps::Value::var("k");
    let mut t = ecps::Comp::app1(fix, k.clone());
    let v = loop {
        match &t {
            ecps::Comp::App(head, args) if *head == k => break args[0].clone(),
            _ => {}
        }
        match effectus::semantics::ecps_step(&t).unwrap() {
            StepOutcome::Pure(next) => t = next,
            other => panic!("{other:?}"),
        }
    };
    let unfolded = cps_value(&sig, &env, &fix_unfolding(&f).unwrap()).unwrap();
    let p = TreeParams { depth: 2, width: 2 };
    for n in 0..4 {
        let kont = ecps::Value::lam1("r", EcpsType::Nat, select("r", 2 * n));
        let a = ecps_tree(&ecps::Comp::app(v.clone(), vec![ecps::Value::numeral(n), kont.clone()]), 5000, p).unwrap();
        let b = ecps_tree(&ecps::Comp::app(unfolded.clone(), vec![ecps::Value::numeral(n), kont]), 5000, p).unwrap();
        assert!(tree_eq(&a, &b).unwrap());
        assert_eq!(a.root, effectus::trees::Tree::Stop, "n = {n}");
    }
}

#[test]
fn corpus_translations_typecheck() {
    for (path, _) in corpus::FILES.iter().filter(|(p, _)| p.ends_with(".epcf")) {
        let e = corpus::entry(path);
        let sig = e.family(4).signature();
        let esig = sig.to_ecps();
        let env = TypeEnv::new();
        for i in 0..e.terms.len() {
            let m = normalize_arities(&sig, &env, &e.epcf_comp(i)).unwrap();
            let tau = type_of_epcf_comp(&sig, &env, &m).unwrap();
            let image = cps_comp(&sig, &env, &m).unwrap();
            assert_eq!(type_of_ecps_value(&esig, &cps_env(&env), &image).unwrap(), cps_comp_type(&tau), "{path}");
            let program = cps_config(&sig, &Stack::id(), &m).unwrap();
            check_ecps_comp(&esig, &TypeEnv::new(), &program).unwrap();
        }
    }
    // Open values translate in the translated environment.
    let sig = ObservationFamily::Pure.signature();
    let env = TypeEnv::from_pairs([("g".to_string(), ty("nat -> nat"))]);
    let v = parse_epcf_value("fun (x:nat) -> g x").unwrap();
    let image = cps_value(&sig, &env, &v).unwrap();
    assert_eq!(type_of_ecps_value(&sig.to_ecps(), &cps_env(&env), &image).unwrap(), cps_type(&ty("nat -> nat")));
}

#[test]
fn normalization_keeps_relabelled_trees() {
    let p = TreeParams { depth: 4, width: 3 };
    for name in ["nat_gen", "por_loop", "store_update_lookup", "read_write"] {
        let e = corpus::entry(name);
        let fam = e.family(3);
        let sig = fam.signature();
        let m = e.epcf_comp(0);
        let n = normalize_arities(&sig, &TypeEnv::new(), &m).unwrap();
        let before = effectus::semantics::epcf_tree(&Stack::id(), &m, 500, p).unwrap();
        let after = effectus::semantics::epcf_tree(&Stack::id(), &n, 500, p).unwrap();
        // Finite-arity nodes gain loop children beyond their arity; the
        // paths that can occur agree.
        assert!(paths_agree(&relabel(&before.root), &relabel(&after.root), &fam), "{name}\n{}\n{}", to_snapshot(&before.root), to_snapshot(&after.root));
    }
}

fn paths_agree(a: &effectus::trees::Tree, b: &effectus::trees::Tree, fam: &ObservationFamily) -> bool {
    use effectus::trees::{occurrable, Tree};
    match (a, b) {
        (Tree::Node { op: o1, index: i1, children: c1, .. }, Tree::Node { op: o2, index: i2, children: c2, .. }) => {
            o1 == o2
                && (i1 == i2 || (i1.is_none() && *i2 == Some(0)))
                && occurrable(fam, o1, c1.len()).into_iter().all(|i| c2.get(i).is_some_and(|y| paths_agree(&c1[i], y, fam)))
        }
        (Tree::Bot(_), Tree::Bot(_)) => true,
        _ => a == b,
    }
}

#[test]
fn differential_examples() {
    let cfg = CheckConfig::new(500, 4, 3);
    let prob = ObservationFamily::Prob.signature();
    let m = parse_epcf_comp("op[p-or](loop, return 3)").unwrap();
    let r = check_cps_correct(&prob, &m, &Stack::id(), cfg).unwrap();
    assert_eq!(r.result, Compat::Equal);
    assert_eq!(to_snapshot(&r.ecps_tree.root), "(node p-or 0\n  (bot certified)\n  (stop)\n  (bot certified)\n  ..)\n");
    let r = check_cps_correct(&ObservationFamily::Pure.signature(), &parse_epcf_comp("return *").unwrap(), &Stack::id(), cfg).unwrap();
    assert_eq!(r.result, Compat::Equal);
    assert_eq!(r.ecps_tree.root, effectus::trees::Tree::Stop);
    let cfg3 = CheckConfig::new(500, 3, 3);
    let r = check_cps_correct(&ObservationFamily::Nondet.signature(), &corpus::epcf_comp("nat_gen"), &Stack::id(), cfg3).unwrap();
    assert_eq!(r.result, Compat::Equal);
    assert_eq!(cfg.cps_budget, 8 * cfg.epcf_budget);
}

#[test]
fn nonempty_stacks() {
    let sig = ObservationFamily::Nondet.signature();
    let stack = Stack::id().push("x", parse_epcf_comp("case x of { zero -> return 5 | succ y -> op[or](return y, return x) }").unwrap());
    let r = check_cps_correct(&sig, &corpus::epcf_comp("nat_gen"), &stack, CheckConfig::new(800, 3, 3)).unwrap();
    assert!(!r.result.is_divergent(), "{:?}", r.result);
    let bad = Stack::id().push("x", parse_epcf_comp("return succ(x)").unwrap());
    let r = check_cps_correct(&sig, &parse_epcf_comp("return *").unwrap(), &bad, CheckConfig::new(80, 3, 3));
    assert!(r.is_err());
}

#[test]
fn fuzz_sample() {
    let mut rng = common::rng(99);
    for fam in common::families() {
        let sig = fam.signature();
        for _ in 0..60 {
            let (m, _) = gen_program(&mut rng, &fam, &GenConfig::default());
            assert!(m.size() <= 25);
            let r = check_cps_correct(&sig, &m, &Stack::id(), CheckConfig::new(300, 3, 3)).unwrap();
            assert!(!r.result.is_divergent(), "{m}: {:?}", r.result);
        }
    }
}
