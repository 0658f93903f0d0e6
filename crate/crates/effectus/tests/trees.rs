mod common;

use common::{coarsen, erase_bots, families, rng, TreeGen};
use effectus::effects::ObservationFamily;
use effectus::semantics::{ecps_tree, epcf_tree};
use effectus::syntax::epcf::Stack;
use effectus::syntax::parse::{parse_ecps_comp, parse_epcf_comp};
use effectus::trees::*;
use proptest::prelude::*;
use rand::Rng;

fn approx(root: Tree) -> TreeApprox {
    TreeApprox::new(TreeParams { depth: 4, width: common::WIDTH }, root)
}

fn family_for(seed: u64) -> ObservationFamily {
    let fs = families();
    fs[(seed % fs.len() as u64) as usize].clone()
}

const BOTS: &[BotKind] = &[BotKind::Budget, BotKind::Certified];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn order_laws(seed in any::<u64>()) {
        let mut r = rng(seed);
        let gen = TreeGen::new(family_for(seed));
        let t3 = gen.tree(&mut r);
        let t2 = coarsen(&t3, &mut r, BOTS);
        let t1 = coarsen(&t2, &mut r, BOTS);
        let other = gen.tree(&mut r);
        let (a1, a2, a3, ao) = (approx(t1), approx(t2), approx(t3), approx(other));

        prop_assert!(tree_leq(&a3, &a3).unwrap());
        prop_assert!(tree_leq(&a1, &a2).unwrap() && tree_leq(&a2, &a3).unwrap());
        prop_assert!(tree_leq(&a1, &a3).unwrap());
        for (x, y) in [(&a1, &a3), (&a3, &ao), (&a2, &ao)] {
            if tree_leq(x, y).unwrap() && tree_leq(y, x).unwrap() {
                prop_assert_eq!(erase_bots(&x.root), erase_bots(&y.root));
            }
        }
    }

    #[test]
    fn relabel_is_idempotent_and_monotone(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = approx(TreeGen::new(family_for(seed)).tree(&mut r));
        let lower = approx(coarsen(&t.root, &mut r, BOTS));
        let once = relabel_values(&t);
        prop_assert_eq!(relabel_values(&once), once.clone());
        prop_assert!(tree_leq(&relabel_values(&lower), &once).unwrap());
    }

    #[test]
    fn compatibility(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = approx(TreeGen::new(family_for(seed)).tree(&mut r));
        let c = tree_compatible(&t, &t).unwrap();
        prop_assert!(c != Compat::Unresolved || common::has_budget_bot(&t.root));
        prop_assert!(!c.is_divergent());
        // Budget-⊥ replacements never conflict with the tree they came from.
        let lower = approx(coarsen(&t.root, &mut r, &[BotKind::Budget]));
        prop_assert!(!tree_compatible(&lower, &t).unwrap().is_divergent());
    }

    #[test]
    fn snapshot_round_trip(seed in any::<u64>()) {
        let t = TreeGen::new(family_for(seed)).tree(&mut rng(seed));
        prop_assert_eq!(parse_snapshot(&to_snapshot(&t)).unwrap(), t);
    }
}

#[test]
fn nat_generator_tree() {
    let m = parse_epcf_comp(
        "let w = fix (fun (f:unit->nat) -> return fun (u:unit) -> op[or](return 0, let u' = f * in return succ(u'))) in w *",
    )
    .unwrap();
    let t = epcf_tree(&Stack::id(), &m, 500, TreeParams { depth: 3, width: 8 }).unwrap();
    let expected = "\
(node or _
  (val 0)
  (node or _
    (val 1)
    (node or _
      (val 2)
      (bot budget))))
";
    assert_eq!(to_snapshot(&t.root), expected);
}

#[test]
fn loop_is_certified_and_budget_is_not() {
    let p = TreeParams::default();
    let loop_tree = ecps_tree(&parse_ecps_comp("loop").unwrap(), 100, p).unwrap();
    assert_eq!(loop_tree.root, Tree::certified());
    // A counter that never revisits a configuration only runs out of budget.
    let count = parse_ecps_comp("(mu f. fun (n:nat) -> f(succ(n)))(0)").unwrap();
    assert_eq!(ecps_tree(&count, 100, p).unwrap().root, Tree::budget());
}

#[test]
fn refinement_never_diverges() {
    let mut r = rng(11);
    for fam in families() {
        for _ in 0..40 {
            let seed: u64 = r.gen();
            let m = common::program(seed, &fam);
            let p = TreeParams { depth: 3, width: common::WIDTH };
            let small = epcf_tree(&Stack::id(), &m, 20, p).unwrap();
            let big = epcf_tree(&Stack::id(), &m, 200, p).unwrap();
            let c = tree_compatible(&small, &big).unwrap();
            assert!(!c.is_divergent(), "{m}: {c:?}");
            assert!(tree_leq(&small, &big).unwrap(), "{m}");
        }
    }
}

#[test]
fn params_must_match() {
    let a = TreeApprox::new(TreeParams { depth: 1, width: 2 }, Tree::Stop);
    let b = TreeApprox::new(TreeParams { depth: 2, width: 2 }, Tree::Stop);
    assert!(matches!(tree_leq(&a, &b), Err(TreeError::ParamMismatch { .. })));
}

#[test]
fn snapshot_errors_have_positions() {
    let e = parse_snapshot("(node or _\n  (stop)\n  (val").unwrap_err();
    assert!(matches!(e, TreeError::Snapshot { line: 3, .. }), "{e}");
}
