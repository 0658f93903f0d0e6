mod common;

use common::{coarsen, families, rng, TreeGen, WIDTH};
use effectus::effects::*;
use effectus::semantics::ecps_tree;
use effectus::syntax::parse::parse_ecps_comp;
use effectus::trees::{BotKind, Tree, TreeApprox, TreeParams};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;

fn approx(root: Tree) -> TreeApprox {
    TreeApprox::new(TreeParams { depth: 4, width: WIDTH }, root)
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn family_for(seed: u64) -> ObservationFamily {
    let fs = families();
    fs[(seed % fs.len() as u64) as usize].clone()
}

fn observations(family: &ObservationFamily) -> Vec<Observation> {
    let mut out = observation_set(family);
    if matches!(family, ObservationFamily::Prob) {
        out.extend([ratio(1, 3), ratio(3, 8), ratio(5, 8), ratio(7, 16)].into_iter().map(Observation::ProbGt));
    }
    out.push(Observation::AllTrees);
    out
}

// Exhaustive decision procedures over finite trees without budget-⊥,
// written path by path rather than by the library's recursion.

fn terminal(t: &Tree) -> bool {
    matches!(t, Tree::Stop | Tree::Val(_))
}

/// Every maximal path through children 0 and 1, with its length.
fn binary_paths<'a>(t: &'a Tree, len: u32, out: &mut Vec<(&'a Tree, u32)>) {
    match t {
        Tree::Node { children, .. } => {
            for c in &children[..2] {
                binary_paths(c, len + 1, out);
            }
        }
        leaf => out.push((leaf, len)),
    }
}

fn oracle_prob(t: &Tree) -> BigRational {
    let mut paths = Vec::new();
    binary_paths(t, 0, &mut paths);
    paths
        .into_iter()
        .filter(|(l, _)| terminal(l))
        .map(|(_, n)| BigRational::new(BigInt::one(), BigInt::from(2).pow(n)))
        .fold(BigRational::zero(), |a, b| a + b)
}

fn oracle_run_store(t: &Tree, s: &State) -> Option<State> {
    let mut s = s.clone();
    let mut t = t;
    while let Tree::Node { op, index, children, .. } = t {
        let loc = op.split_once('_').unwrap().1.to_string();
        t = if op.starts_with("lookup") {
            &children[s[&loc] as usize]
        } else {
            s.insert(loc, index.unwrap());
            &children[0]
        };
    }
    terminal(t).then_some(s)
}

fn oracle_trace(t: &Tree, w: &[IoEvent]) -> bool {
    let mut t = t;
    for e in w {
        let Tree::Node { op, index, children, .. } = t else { return false };
        t = match (op.as_str(), e) {
            ("read", IoEvent::In(n)) => &children[*n as usize],
            ("write", IoEvent::Out(n)) if *index == Some(*n) => &children[0],
            _ => return false,
        };
    }
    true
}

fn oracle(t: &Tree, p: &Observation) -> bool {
    let mut paths = Vec::new();
    binary_paths(t, 0, &mut paths);
    match p {
        Observation::AllTrees => true,
        Observation::Terminate => terminal(t),
        Observation::May => paths.iter().any(|(l, _)| terminal(l)),
        Observation::Must => paths.iter().all(|(l, _)| terminal(l)),
        Observation::ProbGt(q) => oracle_prob(t) > *q,
        Observation::StoreStep(s, r) => oracle_run_store(t, s).as_ref() == Some(r),
        Observation::Trace(w) => oracle_trace(t, w),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn verdicts_agree_with_brute_force(seed in any::<u64>()) {
        let mut r = rng(seed);
        let fam = family_for(seed);
        let complete = TreeGen::new(fam.clone()).certified_only().tree(&mut r);
        let partial = coarsen(&complete, &mut r, &[BotKind::Budget]);
        for p in observations(&fam) {
            let full = check_tree(&complete, &p, &fam).unwrap();
            prop_assert_eq!(full, Verdict::from_bool(oracle(&complete, &p)), "{} on {:?}", p, complete);
            // Refining a partial tree may resolve Unknown but never flips a verdict.
            let v = check_tree(&partial, &p, &fam).unwrap();
            prop_assert!(v == Verdict::Unknown || v == full, "{} {:?} vs {:?}", p, v, full);
        }
    }

    #[test]
    fn upward_closure(seed in any::<u64>()) {
        let mut r = rng(seed);
        let fam = family_for(seed);
        let upper = TreeGen::new(fam.clone()).certified_only().tree(&mut r);
        let lower = coarsen(&upper, &mut r, &[BotKind::Certified]);
        for p in observations(&fam) {
            if check_tree(&lower, &p, &fam).unwrap() == Verdict::Holds {
                prop_assert_eq!(check_tree(&upper, &p, &fam).unwrap(), Verdict::Holds, "{}", p);
            }
        }
    }

    #[test]
    fn prob_lower_bounds(seed in any::<u64>()) {
        let mut r = rng(seed);
        let gen = TreeGen { max_depth: 5, ..TreeGen::new(ObservationFamily::Prob) };
        let full = gen.tree(&mut r);
        let lower = coarsen(&full, &mut r, &[BotKind::Budget, BotKind::Certified]);
        let (pf, exact) = prob_lower(&approx(full.clone())).unwrap();
        let (pl, _) = prob_lower(&approx(lower)).unwrap();
        prop_assert!(pl <= pf);
        prop_assert!(pf <= BigRational::one());
        if exact {
            prop_assert_eq!(pf, oracle_prob(&full));
        }
    }
}

fn replace_children(t: &Tree, kids: Vec<Tree>) -> Tree {
    let Tree::Node { op, index, truncated, .. } = t else { unreachable!() };
    Tree::Node { op: op.clone(), index: *index, children: kids, truncated: *truncated }
}

#[test]
fn decomposability() {
    let mut r = rng(5);
    for fam in families().into_iter().filter(|f| !matches!(f, ObservationFamily::Pure)) {
        let gen = TreeGen::new(fam.clone());
        let (mut samples, mut replaced) = (0, 0);
        while samples < 200 {
            let t = gen.tree(&mut r);
            if !matches!(t, Tree::Node { .. }) {
                continue;
            }
            let obs = observations(&fam);
            let p = &obs[r.gen_range(0..obs.len())];
            if check_tree(&t, p, &fam).unwrap() != Verdict::Holds {
                continue;
            }
            samples += 1;
            let witness = decompose_tree(p, &t, &fam).unwrap();
            let Tree::Node { children, .. } = &t else { unreachable!() };
            assert_eq!(witness.len(), children.len());
            for (c, q) in children.iter().zip(&witness) {
                assert_eq!(check_tree(c, q, &fam).unwrap(), Verdict::Holds, "{p}: child not in {q}");
            }
            for _ in 0..5 {
                let kids: Vec<Tree> =
                    children.iter().map(|c| if r.gen_bool(0.5) { c.clone() } else { gen.tree(&mut r) }).collect();
                if kids.iter().zip(&witness).all(|(c, q)| check_tree(c, q, &fam).unwrap() == Verdict::Holds) {
                    replaced += 1;
                    let rebuilt = replace_children(&t, kids);
                    assert_eq!(check_tree(&rebuilt, p, &fam).unwrap(), Verdict::Holds, "{p}: {rebuilt:?}");
                }
            }
        }
        assert!(replaced >= 200, "{fam}: only {replaced} replacements exercised");
    }
}

#[test]
fn decomposition_needs_a_satisfying_node() {
    let fam = ObservationFamily::Nondet;
    let t = approx(Tree::node("or", None, vec![Tree::certified(), Tree::certified()], true));
    assert!(decompose_witness(&Observation::May, &t, &fam).is_err());
    assert!(decompose_witness(&Observation::May, &approx(Tree::Stop), &fam).is_err());
}

#[test]
fn consistency_witnesses_hold() {
    for fam in families() {
        let (p, t) = consistency_witness(&fam);
        assert!(p != Observation::AllTrees);
        let tree = ecps_tree(&t, 100, TreeParams::default()).unwrap();
        assert_eq!(check_observation(&tree, &p, &fam).unwrap(), Verdict::Holds, "{fam}");
    }
}

#[test]
fn observation_text_round_trips() {
    for fam in families().into_iter().chain([ObservationFamily::store(&["l0", "l1"], 2)]) {
        for p in observations(&fam) {
            assert_eq!(parse_observation(&p.to_string()).unwrap(), p);
        }
    }
    let s = parse_observation("store {l0:1,l1:0} ~> {l0:2,l1:0}").unwrap();
    assert!(s.fits(&ObservationFamily::store(&["l0", "l1"], 3)));
    assert!(!s.fits(&ObservationFamily::store(&["l0"], 3)));
    assert_eq!(parse_observation("trace ?3 !3").unwrap(), Observation::Trace(vec![IoEvent::In(3), IoEvent::Out(3)]));
    assert_eq!(parse_observation("prob> 9/10").unwrap(), Observation::prob_gt(9, 10));
    assert!(parse_observation("prob> 3/2").is_err() || !parse_observation("prob> 3/2").unwrap().fits(&ObservationFamily::Prob));
}

#[test]
fn families_reject_foreign_observations() {
    let t = approx(Tree::Stop);
    assert!(check_observation(&t, &Observation::May, &ObservationFamily::Prob).is_err());
    let node = approx(Tree::node("or", None, vec![Tree::Stop, Tree::Stop], true));
    assert!(check_observation(&node, &Observation::prob_gt(1, 2), &ObservationFamily::Prob).is_err());
}

#[test]
fn kleene_connectives() {
    use Verdict::*;
    let all = [Holds, Fails, Unknown];
    for a in all {
        assert_eq!(a.not().not(), a);
        assert_eq!(a.and(Fails), Fails);
        assert_eq!(a.or(Holds), Holds);
        for b in all {
            assert_eq!(a.and(b), b.and(a));
            assert_eq!(a.or(b).not(), a.not().and(b.not()));
        }
    }
    assert_eq!(Unknown.and(Holds), Unknown);
    assert_eq!(Unknown.or(Fails), Unknown);
}

#[test]
fn probability_of_running_examples() {
    let p = TreeParams { depth: 6, width: 2 };
    let half_loop = parse_ecps_comp("op[p-or](0, x. case x of { zero -> loop | succ y -> stop })").unwrap();
    let t = ecps_tree(&half_loop, 200, p).unwrap();
    assert_eq!(prob_lower(&t).unwrap(), (ratio(1, 2), true));
    let fam = ObservationFamily::Prob;
    assert_eq!(check_observation(&t, &Observation::prob_gt(49, 100), &fam).unwrap(), Verdict::Holds);
    assert_eq!(check_observation(&t, &Observation::prob_gt(1, 2), &fam).unwrap(), Verdict::Fails);
    // Without certified divergence the answer stays open.
    let count = parse_ecps_comp("op[p-or](0, x. case x of { zero -> (mu f. fun (n:nat) -> f(succ(n)))(0) | succ y -> stop })")
        .unwrap();
    let t = ecps_tree(&count, 200, p).unwrap();
    assert_eq!(prob_lower(&t).unwrap(), (ratio(1, 2), false));
    assert_eq!(check_observation(&t, &Observation::prob_gt(1, 2), &fam).unwrap(), Verdict::Unknown);
}

#[test]
fn store_execution() {
    let fam = ObservationFamily::store(&["l0", "l1"], 3);
    let t = parse_ecps_comp("op[update_l0](2, u. op[lookup_l0](0, x. op[update_l1](x, v. stop)))").unwrap();
    let tree = ecps_tree(&t, 200, TreeParams { depth: 4, width: 3 }).unwrap();
    let s = fam.zero_state();
    let mut r = s.clone();
    r.insert("l0".into(), 2);
    r.insert("l1".into(), 2);
    assert_eq!(exec_store(&tree, &s, &fam).unwrap(), Exec::Terminated(r.clone()));
    assert_eq!(check_observation(&tree, &Observation::StoreStep(s.clone(), r), &fam).unwrap(), Verdict::Holds);
    assert_eq!(fam.states().len(), 9);
    // Width below the stored value cannot be followed.
    let narrow = ecps_tree(&t, 200, TreeParams { depth: 4, width: 2 }).unwrap();
    assert!(matches!(exec_store(&narrow, &s, &fam), Err(EffectError::WidthInsufficient { .. })));
}
