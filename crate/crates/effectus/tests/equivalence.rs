mod common;

use common::{families, program};
use effectus::corpus;
use effectus::cps::{cps_comp, cps_config, normalize_arities};
use effectus::effects::{check_observation, consistency_witness, observation_set, ObservationFamily, Verdict};
use effectus::equivalence::*;
use effectus::logic::QuantConfig;
use effectus::semantics::{ecps_step, ecps_tree, StepOutcome};
use effectus::syntax::alpha::alpha_eq_ecps;
use effectus::syntax::epcf::Stack;
use effectus::syntax::parse::{parse_ecps_comp, parse_ecps_term};
use effectus::syntax::{ecps, EcpsType, TypeEnv};

fn cfg(family: ObservationFamily) -> QuantConfig {
    QuantConfig::new(family)
}

fn store() -> ObservationFamily {
    ObservationFamily::store(&["l0", "l1"], 4)
}

#[test]
fn probabilistic_example() {
    let c = cfg(ObservationFamily::Prob);
    let m = corpus::ecps_comp("m12");
    let r = bisim_comp(&m, &corpus::ecps_comp("n1213"), &c).unwrap();
    assert_eq!(r.verdict, Verdict::Holds);
    let r = bisim_comp(&m, &corpus::ecps_comp("n1213_prime"), &c).unwrap();
    assert_eq!(r.verdict, Verdict::Fails);
    let w = r.witness.unwrap();
    assert_eq!(w.observation, "prob> 9/10");
    assert_eq!((w.left, w.right), (Verdict::Holds, Verdict::Fails));
    assert_eq!(bisim_comp(&m, &m, &c).unwrap().verdict, Verdict::Holds);
    // m12 and m13 both stop with probability 1.
    assert_eq!(bisim_comp(&m, &corpus::ecps_comp("m13"), &c).unwrap().verdict, Verdict::Holds);
}

#[test]
fn store_equations_hold() {
    let c = cfg(store());
    for name in ["store_commute", "store_write_read", "store_read_write", "store_write_write"] {
        let e = corpus::entry(name);
        let r = bisim_comp(&e.ecps_comp(0), &e.ecps_comp(1), &c).unwrap();
        assert_eq!(r.verdict, Verdict::Holds, "{name}");
        assert!(!r.pool_relative);
        // As thunks, the equation still holds at function type.
        let thunk = |t: ecps::Comp| ecps::Value::lam1("u", EcpsType::Unit, t);
        let r = bisim_value(&thunk(e.ecps_comp(0)), &thunk(e.ecps_comp(1)), &c).unwrap();
        assert_eq!(r.verdict, Verdict::Holds, "{name}");
    }
    let a = parse_ecps_comp("op[update_l0](1, y. stop)").unwrap();
    let r = bisim_comp(&a, &ecps::Comp::Stop, &c).unwrap();
    assert_eq!(r.verdict, Verdict::Fails);
    assert!(r.witness.unwrap().observation.contains("l0"));
}

#[test]
fn nat_and_unit_values() {
    for fam in families() {
        let c = cfg(fam);
        let n = |k| ecps::Value::numeral(k);
        assert_eq!(bisim_value(&n(3), &n(3), &c).unwrap().verdict, Verdict::Holds);
        assert_eq!(bisim_value(&n(3), &n(4), &c).unwrap().verdict, Verdict::Fails);
        assert_eq!(bisim_value(&ecps::Value::Star, &ecps::Value::Star, &c).unwrap().verdict, Verdict::Holds);
        assert!(matches!(bisim_value(&n(3), &ecps::Value::Star, &c), Err(EquivError::TypeMismatch { .. })));
    }
}

#[test]
fn lassen_pair() {
    let c = cfg(ObservationFamily::Nondet);
    let r = bisim_value(&corpus::ecps_value("lassen_v1"), &corpus::ecps_value("lassen_v2"), &c).unwrap();
    assert_eq!(r.verdict, Verdict::Fails);
    let w = r.witness.unwrap();
    assert_eq!(w.argument_values.len(), 1);
    let e = corpus::entry("lassen_v1");
    // Replaying the witness tuple yields the disagreement.
    let apply = |v: ecps::Value| ecps::Comp::app(v, w.argument_values.clone());
    let p = w.observed.clone().unwrap();
    let fam = e.family(4);
    let at = |v| check_observation(&ecps_tree(&apply(v), c.budget, c.params).unwrap(), &p, &fam).unwrap();
    assert_eq!((at(corpus::ecps_value("lassen_v1")), at(corpus::ecps_value("lassen_v2"))), (w.left, w.right));
}

/// Closed computations grouped by family, with some known equal pairs.
fn triples() -> Vec<(ObservationFamily, Vec<ecps::Comp>)> {
    let p = |s: &str| parse_ecps_comp(s).unwrap();
    vec![
        (
            ObservationFamily::Nondet,
            vec![
                corpus::ecps_comp("nondet_both"),
                corpus::ecps_comp("nondet_one"),
                corpus::ecps_comp("nondet_tree"),
                ecps::Comp::Stop,
                ecps::loop_comp(),
                p("op[or](0, x. stop)"),
            ],
        ),
        (
            ObservationFamily::Prob,
            vec![
                corpus::ecps_comp("m12"),
                corpus::ecps_comp("m13"),
                corpus::ecps_comp("n1213"),
                corpus::ecps_comp("n1213_prime"),
                ecps::Comp::Stop,
            ],
        ),
        (
            store(),
            vec![
                corpus::entry("store_write_write").ecps_comp(0),
                corpus::entry("store_write_write").ecps_comp(1),
                p("op[update_l1](3, y. op[update_l1](3, z. stop))"),
                ecps::Comp::Stop,
                corpus::entry("store_read_write").ecps_comp(0),
            ],
        ),
        (
            ObservationFamily::Io,
            vec![
                corpus::ecps_comp("io_read_write"),
                corpus::ecps_comp("io_read_case"),
                p("op[write](0, u. stop)"),
                ecps::Comp::Stop,
            ],
        ),
        (ObservationFamily::Pure, vec![ecps::Comp::Stop, ecps::loop_comp(), p("(fun (x:nat) -> stop)(2)")]),
    ]
}

#[test]
fn bisimilarity_is_an_equivalence() {
    for (fam, terms) in triples() {
        let c = cfg(fam);
        let v: Vec<Vec<Verdict>> =
            terms.iter().map(|s| terms.iter().map(|t| bisim_comp(s, t, &c).unwrap().verdict).collect()).collect();
        for i in 0..terms.len() {
            assert_eq!(v[i][i], Verdict::Holds, "{}", terms[i]);
            for j in 0..terms.len() {
                assert_eq!(v[i][j], v[j][i], "{} / {}", terms[i], terms[j]);
                for k in 0..terms.len() {
                    if v[i][j] == Verdict::Holds && v[j][k] == Verdict::Holds {
                        assert_ne!(v[i][k], Verdict::Fails);
                    }
                }
            }
        }
        assert!(v.iter().flatten().any(|x| *x == Verdict::Fails));
    }
}

#[test]
fn bisimilarity_agrees_with_observations() {
    for (fam, terms) in triples() {
        let c = cfg(fam.clone());
        for s in &terms {
            for t in &terms {
                let r = bisim_comp(s, t, &c).unwrap();
                let (ts, tt) = (ecps_tree(s, c.budget, c.params).unwrap(), ecps_tree(t, c.budget, c.params).unwrap());
                match r.verdict {
                    Verdict::Holds => {
                        for p in observation_set(&fam) {
                            let (a, b) = (check_observation(&ts, &p, &fam).unwrap(), check_observation(&tt, &p, &fam).unwrap());
                            if a.is_definite() && b.is_definite() {
                                assert_eq!(a, b, "{s} / {t} on {p}");
                            }
                        }
                    }
                    Verdict::Fails => {
                        let w = r.witness.unwrap();
                        let p = w.observed.unwrap();
                        let (a, b) = (check_observation(&ts, &p, &fam).unwrap(), check_observation(&tt, &p, &fam).unwrap());
                        assert!(a.is_definite() && b.is_definite() && a != b, "{s} / {t} on {p}");
                    }
                    Verdict::Unknown => {}
                }
            }
        }
    }
}

#[test]
fn consistency_witness_is_separated_from_loop() {
    for fam in families() {
        let c = cfg(fam.clone());
        let (p, t0) = consistency_witness(&fam);
        let r = ctx_test(
            &ecps::Term::Comp(t0.clone()),
            &ecps::Term::Comp(ecps::loop_comp()),
            &TypeEnv::new(),
            &[Context::comp_hole()],
            &c,
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Fails, "{fam}");
        let t = ecps_tree(&t0, c.budget, c.params).unwrap();
        assert_eq!(check_observation(&t, &p, &fam).unwrap(), Verdict::Holds);
    }
}

#[test]
fn reduction_preserves_summaries() {
    let mut checked = 0;
    for seed in 0..40u64 {
        for fam in families() {
            let sig = fam.signature();
            let m = normalize_arities(&sig, &TypeEnv::new(), &program(seed, &fam)).unwrap();
            let mut t = cps_config(&sig, &Stack::id(), &m).unwrap();
            let c = QuantConfig { budget: 600, ..cfg(fam.clone()) };
            for _ in 0..6 {
                let StepOutcome::Pure(next) = ecps_step(&t).unwrap() else { break };
                let r = bisim_comp(&t, &next, &c).unwrap();
                assert_ne!(r.verdict, Verdict::Fails, "{t}\n{next}\n{:?}", r.witness);
                t = next;
            }
            checked += 1;
        }
    }
    assert_eq!(checked, 200);
}

fn ctxs(name: &str) -> Vec<(Context, Option<EcpsType>)> {
    parse_contexts(corpus::source(name).unwrap()).unwrap()
}

#[test]
fn context_files_parse_and_type() {
    for (name, fam) in [
        ("contexts/nondet.ctx", ObservationFamily::Nondet),
        ("contexts/prob.ctx", ObservationFamily::Prob),
        ("contexts/store.ctx", store()),
        ("contexts/lassen.ctx", ObservationFamily::Nondet),
        ("contexts/lassen_thunks.ctx", ObservationFamily::Nondet),
    ] {
        let cs = ctxs(name);
        assert!(cs.len() >= 3, "{name}");
        for (c, ty) in &cs {
            let typing = typecheck_context(&fam.signature().to_ecps(), c, &TypeEnv::new(), ty.as_ref()).unwrap();
            assert_eq!(typing.result_type, None, "{name}: {c}");
            assert!(typing.env.is_empty());
            if ty.is_none() {
                assert_eq!(&parse_context(&c.to_string()).unwrap(), c);
            }
        }
    }
}

#[test]
fn context_typing_examples() {
    let sig = ObservationFamily::Pure.signature().to_ecps();
    let env = TypeEnv::from_pairs([("k".to_string(), EcpsType::neg1(EcpsType::Nat))]);
    let id = typecheck_context(&sig, &Context::value_hole(), &env, Some(&EcpsType::Nat)).unwrap();
    assert_eq!((id.hole_type.clone(), id.result_type.clone()), (Some(EcpsType::Nat), Some(EcpsType::Nat)));
    assert_eq!(id.hole_env, env);
    let lam = parse_context("fun (x:nat) -> [-]").unwrap();
    assert_eq!(lam.hole_kind(), Kind::Comp);
    let t = typecheck_context(&sig, &lam, &TypeEnv::new(), None).unwrap();
    assert_eq!(t.result_type, Some(EcpsType::neg1(EcpsType::Nat)));
    assert_eq!(t.hole_env.get("x"), Some(&EcpsType::Nat));
    assert!(typecheck_context(&sig, &parse_context("[-](3)").unwrap(), &TypeEnv::new(), Some(&EcpsType::Nat)).is_err());
}

#[test]
fn hole_errors() {
    assert!(matches!(parse_context("stop"), Err(ContextError::HoleCount(0))));
    assert!(matches!(parse_context("op[or](0, x. case x of { zero -> [-] | succ y -> [-] })"), Err(ContextError::HoleCount(2))));
    // An operation with a hole in the parameter and a computation continuation.
    let e = Context::from_term(&parse_ecps_term("op[or](fun (u:unit) -> stop, x. stop)").unwrap());
    assert!(matches!(e, Err(ContextError::HoleCount(0))));
    let in_param = parse_contexts("op[or]([-], x. stop)").unwrap();
    assert_eq!(in_param[0].0.hole_kind(), Kind::Value);
    let bad = parse_context("op[or](0, x. [-])").unwrap();
    assert!(matches!(bad.fill(&parse_ecps_term("3").unwrap()), Err(ContextError::KindMismatch { .. })));
}

#[test]
fn no_operation_context_around_a_computation() {
    // Operation parameters are values; a λ there only has a computation hole
    // in its body, which has no context form.
    let e = parse_context("op[or](fun (u:unit) -> [-], x. stop)").unwrap_err();
    assert!(matches!(e, ContextError::Unrepresentable(_)), "{e}");
    let body = parse_context("op[or](0, x. [-])").unwrap();
    assert_eq!(body.hole_kind(), Kind::Comp);
}

#[test]
fn filling_and_composition() {
    let t = parse_ecps_term("k(x)").unwrap();
    assert_eq!(Context::comp_hole().fill(&t).unwrap(), t);
    let lam = parse_context("fun (x:nat) -> [-]").unwrap();
    let filled = lam.fill(&t).unwrap();
    assert!(alpha_eq_ecps(&filled, &parse_ecps_term("fun (y:nat) -> k(y)").unwrap()), "{filled}");

    let c = cfg(ObservationFamily::Nondet);
    let mut pool: Vec<Context> = ctxs("contexts/nondet.ctx").into_iter().map(|(c, _)| c).collect();
    pool.extend(stock_contexts(&TypeEnv::new(), None, &c));
    let wrap = parse_context("op[or](0, x. case x of { zero -> [-] | succ y -> stop })").unwrap();
    let closer = parse_context("(fun (u:unit) -> [-])(*)").unwrap();
    pool.extend([wrap.compose(&closer).unwrap(), closer.compose(&wrap).unwrap()]);
    let fillers = [parse_ecps_term("stop").unwrap(), parse_ecps_term("loop").unwrap(), parse_ecps_term("op[or](1, z. stop)").unwrap()];
    let mut pairs = 0;
    for outer in &pool {
        for inner in &pool {
            let Ok(both) = outer.compose(inner) else { continue };
            for u in &fillers {
                let a = both.fill(u).unwrap();
                let b = outer.fill(&inner.fill(u).unwrap()).unwrap();
                assert!(alpha_eq_ecps(&a, &b), "{outer} . {inner}");
                pairs += 1;
            }
        }
    }
    assert!(pairs > 50);
    assert!(matches!(Context::value_hole().compose(&wrap), Err(ContextError::KindMismatch { .. })));
}

#[test]
fn context_testing() {
    let c = cfg(ObservationFamily::Nondet);
    let stop = ecps::Term::Comp(ecps::Comp::Stop);
    let lp = ecps::Term::Comp(ecps::loop_comp());
    let r = ctx_test(&stop, &lp, &TypeEnv::new(), &[Context::comp_hole()], &c).unwrap();
    assert_eq!(r.verdict, Verdict::Fails);
    assert!(r.witness.unwrap().context.is_some());
    let all: Vec<Context> = ctxs("contexts/nondet.ctx").into_iter().map(|(c, _)| c).collect();
    let r = ctx_test(&stop, &stop, &TypeEnv::new(), &all, &c).unwrap();
    assert_eq!(r.verdict, Verdict::Holds);
    assert!(r.pool_relative);
    assert_eq!(r.exercised, all.len());

    // Open terms are closed by the stock λ-closers.
    let env = TypeEnv::from_pairs([("n".to_string(), EcpsType::Nat)]);
    let open = |s: &str| ecps::Term::Comp(parse_ecps_comp(s).unwrap());
    let stock = stock_contexts(&env, None, &c);
    let r = ctx_test(&open("case n of { zero -> stop | succ m -> stop }"), &open("stop"), &env, &stock, &c).unwrap();
    assert_eq!(r.verdict, Verdict::Holds);
    let r = ctx_test(&open("case n of { zero -> stop | succ m -> loop }"), &open("stop"), &env, &stock, &c).unwrap();
    assert_eq!(r.verdict, Verdict::Fails);
}

#[test]
fn generator_contexts() {
    let c = cfg(ObservationFamily::Nondet);
    let (a, b) = (corpus::ecps_value("lassen_v1"), corpus::ecps_value("lassen_v2"));
    let cs: Vec<Context> = ctxs("contexts/lassen.ctx").into_iter().map(|(c, _)| c).collect();
    let (a, b) = (ecps::Term::Value(a), ecps::Term::Value(b));
    // Only the context asking for 4 tells the bounded generator apart.
    let r = ctx_test(&a, &b, &TypeEnv::new(), &cs[..2], &c).unwrap();
    assert_ne!(r.verdict, Verdict::Fails);
    let r = ctx_test(&a, &b, &TypeEnv::new(), &cs, &c).unwrap();
    assert_eq!(r.verdict, Verdict::Fails);
    assert_eq!(r.witness.unwrap().context, Some(cs[2].to_string()));
}

#[test]
fn thunk_pair_agrees_in_context() {
    let c = QuantConfig { params: effectus::trees::TreeParams { depth: 7, width: 2 }, ..cfg(ObservationFamily::Nondet) };
    let sig = ObservationFamily::Nondet.signature();
    let image = |name: &str| {
        let m = normalize_arities(&sig, &TypeEnv::new(), &corpus::epcf_comp(name)).unwrap();
        ecps::Term::Value(cps_comp(&sig, &TypeEnv::new(), &m).unwrap())
    };
    let (m, p) = (image("lassen_m"), image("lassen_p"));
    let cs: Vec<Context> = ctxs("contexts/lassen_thunks.ctx").into_iter().map(|(c, _)| c).collect();
    let r = ctx_test(&m, &p, &TypeEnv::new(), &cs, &c).unwrap();
    assert_ne!(r.verdict, Verdict::Fails);
    assert_eq!(r.exercised, cs.len());
    let fam = ObservationFamily::Nondet;
    for ctx in &cs {
        for t in [&m, &p] {
            let ecps::Term::Comp(filled) = ctx.fill(t).unwrap() else { panic!() };
            let tree = ecps_tree(&filled, c.budget, c.params).unwrap();
            assert_eq!(check_observation(&tree, &effectus::effects::Observation::May, &fam).unwrap(), Verdict::Holds, "{ctx}");
        }
    }
}
