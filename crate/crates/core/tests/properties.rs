use gted_core::gted::resolve_scopes;
use gted_core::standardize::standardize;
use gted_core::ted::BRUTEFORCE_LIMIT;
use gted_core::{
    fixture_trees, gted_distance, parse_theorem, rename_bound_variable, ted_bruteforce,
    ted_distance, ted_edit_script, AlphaMode, CostModel, OperatorTree, OptNode, TransformationSet,
    FIXTURES,
};
use proptest::prelude::*;

fn node() -> impl Strategy<Value = OptNode> {
    let leaf = prop::sample::select(vec!["a", "b", "c"]).prop_map(OptNode::leaf);
    leaf.prop_recursive(3, 8, 3, |inner| {
        (
            prop::sample::select(vec!["a", "b", "c"]),
            prop::collection::vec(inner, 1..=3),
        )
            .prop_map(|(label, kids)| OptNode::new(label, kids))
    })
}

fn small_tree() -> impl Strategy<Value = OperatorTree> {
    node()
        .prop_map(OperatorTree::new)
        .prop_filter("small enough for brute force", |t| {
            t.size() <= BRUTEFORCE_LIMIT
        })
}

fn costs() -> impl Strategy<Value = CostModel> {
    (0.5f64..3.0, 0.5f64..3.0, 0.0f64..4.0).prop_map(|(insert, delete, relabel)| CostModel {
        insert,
        delete,
        relabel,
    })
}

proptest! {
    #[test]
    fn weighted_ted_matches_bruteforce(a in small_tree(), b in small_tree(), cost in costs()) {
        let fast = ted_distance(&a, &b, &cost);
        let brute = ted_bruteforce(&a, &b, &cost).unwrap();
        prop_assert!((fast - brute).abs() < 1e-9, "{} vs {}: {} != {}", a, b, fast, brute);
    }

    #[test]
    fn edit_script_cost_is_distance(a in small_tree(), b in small_tree(), cost in costs()) {
        let total: f64 = ted_edit_script(&a, &b, &cost).iter().map(|op| op.cost).sum();
        prop_assert!((total - ted_distance(&a, &b, &cost)).abs() < 1e-9);
    }

    #[test]
    fn quotient_then_replace_restores(t in node().prop_map(OperatorTree::new), pick in any::<prop::sample::Index>()) {
        let id = gted_core::NodeId(pick.index(t.size()));
        let sub = t.subtree(id).unwrap().to_tree();
        let q = t.quotient(id).unwrap();
        prop_assert_eq!(q.size(), t.size() - sub.size() + 1);
        let restored = q.replace_subtree(id, sub.into_root()).unwrap();
        prop_assert_eq!(restored, t);
    }
}

/// Every set route is still available after adding a transformation, so
/// the distance can only drop.
#[test]
fn adding_alpha_never_increases_distance() {
    let trees = fixture_trees();
    let unit = CostModel::unit();
    let dumb = TransformationSet::dumb_only(unit);
    for mode in [AlphaMode::RenameOnly, AlphaMode::Scoped] {
        let both = TransformationSet::with_alpha(mode, true, unit);
        let alpha_only = TransformationSet::with_alpha(mode, false, unit);
        for (_, a) in &trees {
            for (_, b) in &trees {
                let d_both = gted_distance(a, b, &both);
                assert!(d_both <= gted_distance(a, b, &dumb));
                assert!(d_both <= gted_distance(a, b, &alpha_only));
            }
        }
    }
}

#[test]
fn rename_only_agrees_with_scoped_without_shadowing() {
    // With distinct binder names, uniform renaming and scope-aware renaming
    // accept the same pairs.
    for (id, tree) in fixture_trees() {
        let sites = resolve_scopes(&tree).sites;
        let names: Vec<&str> = sites
            .iter()
            .map(|s| tree.node(*s).unwrap().label.as_str())
            .collect();
        let mut distinct = names.clone();
        distinct.sort();
        distinct.dedup();
        if sites.is_empty() || distinct.len() != names.len() {
            continue;
        }
        let renamed = rename_bound_variable(&tree, sites[0], "fresh").unwrap();
        for mode in [AlphaMode::RenameOnly, AlphaMode::Scoped] {
            let set = TransformationSet::with_alpha(mode, false, CostModel::unit());
            assert_eq!(gted_distance(&tree, &renamed, &set), 0.0, "{id} in {mode}");
        }
    }
}

#[test]
fn standardization_is_idempotent_on_fixtures() {
    for f in FIXTURES {
        let once = standardize(parse_theorem(f.source).unwrap(), &Default::default());
        let twice = standardize(once.to_theorem(), &Default::default());
        assert_eq!(once, twice, "{}", f.id);
    }
}
