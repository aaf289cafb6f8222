use modelwalk::coverage::compute_coverage;
use modelwalk::demo;
use modelwalk::emit::{check_collisions, normalize, parse_offline_json, to_offline_json};
use modelwalk::generate::{
    compose_test_with, is_valid_walk, quick_random_walk, walk_edge_coverage, StopCondition,
};
use modelwalk::model::{parse_graphml, write_graphml, Edge, Feature, Model, Node, NodeId, NodeKind};
use modelwalk::sutsim::{replay_log, Event, SutSession, Trigger, TransitionId};
use proptest::prelude::*;
use std::collections::BTreeSet;

fn demo_actions() -> Vec<String> {
    let spec = demo::sut_spec();
    let mut actions: BTreeSet<String> = spec
        .transitions
        .iter()
        .filter_map(|t| match &t.trigger {
            Trigger::Action(a) => Some(a.clone()),
            Trigger::Event(_) => None,
        })
        .collect();
    actions.extend(["start", "stop"].map(String::from));
    actions.into_iter().collect()
}

#[derive(Debug, Clone)]
enum Step {
    Act(usize),
    Inject(usize),
}

fn step() -> impl Strategy<Value = Step> {
    prop_oneof![
        3 => (0..64usize).prop_map(Step::Act),
        1 => (0..Event::ALL.len()).prop_map(Step::Inject),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn every_logged_transition_had_its_guards_satisfied(steps in prop::collection::vec(step(), 1..80)) {
        let spec = demo::sut_spec();
        let actions = demo_actions();
        let mut app = SutSession::installed(spec.clone());
        app.apply_action("start").unwrap();
        for s in steps {
            let before = app.environment();
            let state = app.state().clone();
            let logged = app.transition_log().len();
            let trigger = match s {
                Step::Act(i) => {
                    let a = &actions[i % actions.len()];
                    let _ = app.apply_action(a);
                    Trigger::Action(a.clone())
                }
                Step::Inject(i) => {
                    let e = Event::ALL[i];
                    let _ = app.inject(e);
                    Trigger::Event(e)
                }
            };
            let log = app.transition_log();
            prop_assert!(log.len() <= logged + 1);
            if log.len() == logged + 1 {
                let entry = log.last().unwrap();
                let t = spec.transition(&entry.transition).unwrap();
                let mut env = before;
                if let Trigger::Event(e) = trigger {
                    env.apply(e);
                }
                prop_assert!(env.holds(&t.guards), "{} fired with {:?}", t.id, env);
                prop_assert_eq!(&t.trigger, &trigger);
                prop_assert_eq!(&t.from, &state);
                prop_assert_eq!(&t.to, app.state());
                prop_assert_eq!(entry.seq as usize, logged + 1);
            }
        }
        let replayed = replay_log(&spec, app.transition_log()).unwrap();
        match app.transition_log().last() {
            Some(last) => prop_assert_eq!(&replayed, &last.to),
            None => prop_assert_eq!(&replayed, &spec.initial),
        }
    }

    #[test]
    fn coverage_is_monotone_in_the_observed_set(mask in prop::collection::vec(0..3u8, 51)) {
        let spec = demo::sut_spec();
        let ids: Vec<TransitionId> = spec.transitions.iter().map(|t| t.id.clone()).collect();
        let small: BTreeSet<TransitionId> = ids.iter().zip(&mask).filter(|(_, m)| **m == 2).map(|(t, _)| t.clone()).collect();
        let large: BTreeSet<TransitionId> = ids.iter().zip(&mask).filter(|(_, m)| **m >= 1).map(|(t, _)| t.clone()).collect();
        let a = compute_coverage(&spec, &small);
        let b = compute_coverage(&spec, &large);
        prop_assert!(a.covered.is_subset(&b.covered));
        prop_assert!(a.overall_pct <= b.overall_pct);
        prop_assert!(a.user_model_pct <= b.user_model_pct);
        prop_assert!(a.reasons.total >= b.reasons.total);
        prop_assert_eq!(a.covered.len() + a.not_covered.len(), a.total_transitions);
    }

    #[test]
    fn walks_meet_their_stop_condition(seed in any::<u64>(), feature in 0..6usize, pct in 1..=100u32) {
        let model = demo::model();
        let f = &model.features[feature];
        let sub = model.feature_subgraph(&f.id).unwrap();
        let fraction = f64::from(pct) / 100.0;
        let walk = quick_random_walk(&sub, &sub.entry_node, seed, &StopCondition::edge_coverage(fraction).unwrap()).unwrap();
        prop_assert!(is_valid_walk(&model, &walk.steps));
        prop_assert_eq!(walk.first_node(), &sub.entry_node);
        prop_assert!(walk_edge_coverage(&walk, &sub).unwrap() >= fraction - 1e-12);
        prop_assert!(!walk.truncated);
        let again = quick_random_walk(&sub, &sub.entry_node, seed, &StopCondition::edge_coverage(fraction).unwrap()).unwrap();
        prop_assert_eq!(walk, again);
    }

    #[test]
    fn composed_tests_survive_the_offline_format(seed in any::<u64>(), feature in 0..6usize, max in 1..12usize) {
        let model = demo::model();
        let stop = StopCondition::FirstOf(vec![StopCondition::full_coverage(), StopCondition::max_steps(max).unwrap()]);
        let test = compose_test_with(&model, &model.features[feature].id, seed, &stop).unwrap();
        let flat = test.flatten();
        let steps: Vec<_> = flat.iter().map(|f| f.step.clone()).collect();
        prop_assert!(is_valid_walk(&model, &steps));
        let parsed = parse_offline_json(&to_offline_json(&test)).unwrap();
        prop_assert_eq!(parsed.len(), flat.len());
        for (p, f) in parsed.iter().zip(&flat) {
            prop_assert_eq!(&p.current_element_name, &f.step.element_name);
            prop_assert_eq!(p.meta.as_ref().unwrap().stage, f.stage);
        }
    }

    #[test]
    fn normalization_is_injective_unless_reported(names in prop::collection::btree_set("[a-zA-Z_ .-]{1,6}", 1..12)) {
        let normalized: BTreeSet<String> = names.iter().map(|n| normalize(n)).collect();
        match check_collisions(names.iter().map(String::as_str)) {
            Ok(()) => prop_assert_eq!(normalized.len(), names.len()),
            Err(_) => prop_assert!(normalized.len() < names.len()),
        }
    }

    #[test]
    fn graphml_writer_round_trips(model in arb_model()) {
        let text = write_graphml(&model);
        prop_assert_eq!(parse_graphml(&text).unwrap(), model);
    }
}

fn arb_model() -> impl Strategy<Value = Model> {
    (2..10usize)
        .prop_flat_map(|n| {
            (
                prop::collection::vec("[a-zA-Z0-9_&<>\"]([a-zA-Z0-9_&<>\" ]{0,8}[a-zA-Z0-9_&<>\"])?", n),
                prop::collection::vec(any::<bool>(), n),
                prop::collection::vec((0..n, 0..n, "[a-zA-Z0-9_&']([a-zA-Z0-9_&' ]{0,8}[a-zA-Z0-9_&'])?"), 1..20),
                prop::collection::vec((0..n, 0..n, "[a-zA-Z]([a-zA-Z ]{0,6}[a-zA-Z])?"), 0..3),
                0..n,
                0..n,
            )
        })
        .prop_flat_map(|(names, kinds, edges, features, start, home)| {
            let m = edges.len();
            let members = prop::collection::vec(prop::collection::btree_set(0..m, 0..=m), features.len());
            (Just((names, kinds, edges, features, start, home)), members)
        })
        .prop_map(|((names, kinds, edges, features, start, home), members)| {
            let node_id = |i: usize| NodeId::new(format!("n{i}"));
            let nodes = names
                .into_iter()
                .zip(kinds)
                .enumerate()
                .map(|(i, (name, device))| Node {
                    id: node_id(i),
                    name,
                    kind: if device { NodeKind::DeviceState } else { NodeKind::ScreenState },
                })
                .collect();
            let edge_list: Vec<Edge> = edges
                .into_iter()
                .enumerate()
                .map(|(i, (s, t, name))| Edge {
                    id: format!("e{i:02}").as_str().into(),
                    name,
                    source: node_id(s),
                    target: node_id(t),
                })
                .collect();
            let features = features
                .into_iter()
                .zip(members)
                .enumerate()
                .map(|(i, ((entry, fin, name), member))| Feature {
                    id: format!("f{i}").as_str().into(),
                    name,
                    member_edges: member.into_iter().map(|j| edge_list[j].id.clone()).collect(),
                    entry_node: node_id(entry),
                    final_node: node_id(fin),
                })
                .collect();
            Model {
                nodes,
                edges: edge_list,
                start_node: node_id(start),
                home_node: node_id(home),
                features,
            }
        })
}
