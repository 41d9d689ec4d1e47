use proptest::prelude::*;

use super::*;
use crate::ontology::canonical_ontology;
use crate::sim::run;

const GOLDEN_SCENARIO: &str = "\
world W1 spaces=physical,cyber
agent H1 kind=human class=individual matter=organic visibility=visible hardware=body software=mind time=0 space=lab logic=0.5 uncertainty=0.5 quality=general composition=organic autonomy=true
agent A1 kind=agi class=swarm matter=inorganic visibility=invisible hardware=gpu software=llm time=0 space=lab logic=0.9 uncertainty=0.2 quality=general composition=artificial autonomy=true
policy P1 world=W1 predicate=no_exfiltration args=A1
event 1 type=existence agent=A1
event 2 type=policy policy=P1
event 3 type=attack initiator=A1 intent=preemptive target=P1
event 4 type=defend initiator=H1 intent=responsive target=P1
";

fn errors(text: &str) -> Vec<ParseError> {
    parse(text).expect_err("document should be rejected").0
}

fn canon(text: &str) -> String {
    serialize(&parse(text).unwrap())
}

#[test]
fn minimal_world() {
    let doc = parse("world W1 spaces=cyber,physical").unwrap();
    assert_eq!(doc.kind(), DocKind::Scenario);
    assert_eq!(doc.records().len(), 1);
    assert_eq!(doc.records()[0].get("spaces"), Some("cyber,physical"));
    assert_eq!(
        serialize(&doc),
        "version 1 kind=scenario\nworld W1 spaces=cyber,physical\n"
    );
}

#[test]
fn missing_required_key_is_named() {
    let text = "world W1 spaces=cyber\nagent H1 class=individual visibility=visible hardware=- software=- logic=0.5 uncertainty=0.5 autonomy=true";
    let errs = errors(text);
    assert_eq!(errs.len(), 1);
    assert_eq!(errs[0].line(), 2);
    assert!(
        errs[0].to_string().contains("missing required key `kind`"),
        "{}",
        errs[0]
    );
}

#[test]
fn golden_scenario_trace() {
    let scenario = Scenario::from_document(&parse(GOLDEN_SCENARIO).unwrap()).unwrap();
    let trace = run(scenario.world.clone(), &scenario.events);
    let doc = trace_to_document(&scenario.world, &trace).unwrap();
    let text = serialize(&doc);
    let states: Vec<&str> = text.lines().filter(|l| l.starts_with("state ")).collect();
    assert_eq!(
        states,
        [
            "state 1 phase=dormant k=0 equilibrium=false pending=- violated=-",
            "state 2 phase=established k=0 equilibrium=true pending=- violated=-",
            "state 3 phase=disturbed k=1 equilibrium=false pending=3 violated=P1",
            "state 4 phase=defended k=1 equilibrium=true pending=- violated=-",
        ]
    );
    assert!(!text.contains("\nhalt "));
    assert_eq!(canon(&text), text);
}

#[test]
fn rejected_event_recorded_with_halt() {
    let text = GOLDEN_SCENARIO.replace("intent=responsive", "intent=preemptive");
    let scenario = Scenario::from_document(&parse(&text).unwrap()).unwrap();
    let trace = run(scenario.world.clone(), &scenario.events);
    let out = serialize(&trace_to_document(&scenario.world, &trace).unwrap());
    assert!(out.contains("event 4 type=defend initiator=H1 intent=preemptive target=P1\n"));
    assert!(out.ends_with("state 3 phase=disturbed k=1 equilibrium=false pending=3 violated=P1\nhalt 4 reason=preemptive_defense\n"));
}

#[test]
fn scenario_round_trips_through_types() {
    let doc = parse(GOLDEN_SCENARIO).unwrap();
    let scenario = Scenario::from_document(&doc).unwrap();
    assert_eq!(scenario.to_document().unwrap(), doc);
}

#[test]
fn canonical_ontology_round_trip() {
    let g = canonical_ontology();
    let doc = concept_graph_to_document(&g).unwrap();
    let text = serialize(&doc);
    assert!(text.starts_with("version 1 kind=concepts\nconcept O1 descriptor=human parent=-\n"));
    assert_eq!(parse(&text).unwrap(), doc);
    assert_eq!(concept_graph_from_document(&doc).unwrap(), g);
}

#[test]
fn permutations_serialize_identically() {
    let lines: Vec<&str> = GOLDEN_SCENARIO.lines().collect();
    let mut reversed = lines.clone();
    reversed.reverse();
    let mut rotated = lines.clone();
    rotated.rotate_left(3);
    let expected = canon(GOLDEN_SCENARIO);
    assert_eq!(canon(&reversed.join("\n")), expected);
    assert_eq!(canon(&rotated.join("\n")), expected);
}

#[test]
fn agents_emitted_sorted_by_id() {
    let agent = |id: &str| {
        format!("agent {id} kind=human class=individual visibility=visible hardware=- software=- logic=0.5 uncertainty=0.5 autonomy=true")
    };
    let ids = ["zed", "H10", "H2"];
    let text = format!("world W spaces=cyber\n{}", ids.map(agent).join("\n"));
    let out = canon(&text);
    let got: Vec<&str> = out
        .lines()
        .filter_map(|l| l.strip_prefix("agent ")?.split(' ').next())
        .collect();
    let mut oracle = ids.to_vec();
    oracle.sort();
    assert_eq!(got, oracle);
}

#[test]
fn values_are_canonicalised() {
    let out = canon("world W spaces=social,cyber,social\nagent a kind=agi class=swarm visibility=visible hardware=- software=- logic=0.50 uncertainty=1e-1 autonomy=0.250\npolicy p world=W predicate=x args=-\nevent 007 type=policy policy=p");
    assert!(out.contains("world W spaces=cyber,social\n"));
    assert!(out.contains("logic=0.5 uncertainty=0.1 autonomy=0.25\n"));
    assert!(out.contains("event 7 type=policy"));
}

#[test]
fn errors_are_reported_per_line() {
    let text = "world W spaces=cyber\nagent a kind=robot class=swarm visibility=visible hardware=- software=- logic=x uncertainty=0 autonomy=true\npolicy p world=W predicate=x args=- colour=red\nevent 1 type=existence agent=ghost\nevent 1 type=policy policy=p\nbogus 3";
    let errs = errors(text);
    let lines: Vec<usize> = errs.iter().map(ParseError::line).collect();
    // Line 5 also dangles: policy p was rejected on line 3.
    assert_eq!(lines, [2, 2, 3, 4, 5, 5, 6]);
    assert!(
        matches!(&errs[3], ParseError::DanglingReference { key, target, .. } if key == "agent" && target == "ghost")
    );
    assert!(matches!(&errs[4], ParseError::DuplicateId { first: 4, .. }));
    assert!(
        matches!(&errs[0], ParseError::Syntax { column: 14, .. }),
        "{}",
        errs[0]
    );
}

#[test]
fn syntax_rules() {
    for bad in [
        "world W  spaces=cyber",
        "world W spaces=cyber\r",
        "world W spaces=cyber spaces=social",
        "world W spaces=nowhere",
        "world W",
        "world W spaces=cyber\nworld V spaces=cyber",
        "world W spaces=cyber\nversion 1 kind=scenario",
        "version 2 kind=scenario\nworld W spaces=cyber",
        "version 1\nworld W spaces=cyber",
        "version 1 kind=poem",
        "version 1 kind=concepts\nworld W spaces=cyber",
        "world W spaces=cyber\nevent 0 type=policy policy=p",
        "world W spaces=cyber\npolicy p world=W predicate=x args=-\nevent 1 type=attack target=p agent=q",
        "version 1 kind=concepts\nconcept X1 descriptor=x parent=-",
        "version 1 kind=concepts\nconcept O01 descriptor=x parent=-",
        "version 1 kind=candidate\nterm b frequency=1 documents=1 parent=-\nterm a frequency=1 documents=1 parent=-\nrelation b~a weight=1",
        "world W spaces=cyber\nagent a kind=agi class=swarm visibility=visible hardware=- software=- logic=inf uncertainty=0 autonomy=true",
        "world W spaces=cyber\nagent a kind=agi class=swarm visibility=visible hardware=- software=- logic=0 uncertainty=0 autonomy=true time=3",
    ] {
        assert!(parse(bad).is_err(), "accepted {bad:?}");
    }
}

#[test]
fn comments_and_blank_lines_ignored() {
    assert_eq!(
        canon("# scenario\n\nworld W spaces=cyber\n"),
        canon("world W spaces=cyber")
    );
}

const TOKENS: &[&str] = &[
    "world",
    "agent",
    "policy",
    "event",
    "state",
    "concept",
    "version",
    "W",
    "a",
    "1",
    "0",
    "-",
    "spaces=cyber",
    "kind=agi",
    "type=existence",
    "agent=a",
    "policy=p",
    "x=y",
    "=",
    "kind=",
];

proptest! {
    #[test]
    fn grammar_is_closed(lines in proptest::collection::vec(proptest::collection::vec(proptest::sample::select(TOKENS), 1..5), 1..6)) {
        let text = lines.iter().map(|l| l.join(" ")).collect::<Vec<_>>().join("\n");
        if let Ok(doc) = parse(&text) {
            let records = lines.iter().filter(|l| l[0] != "version").count();
            prop_assert_eq!(doc.records().len(), records);
        }
    }

    #[test]
    fn canonicalisation_is_idempotent(
        agents in proptest::collection::btree_set("[a-z][a-z0-9]{0,4}", 1..5),
        logic in 0.0f64..1.0,
        n_events in 0usize..6,
        shuffle in any::<u64>(),
    ) {
        let mut lines = vec!["world W spaces=mental,cyber".to_string(), "policy p world=W predicate=guard args=-".to_string()];
        for a in &agents {
            lines.push(format!("agent {a} kind=agi class=swarm visibility=visible hardware=- software=- logic={logic} uncertainty={logic} autonomy=true"));
        }
        let first = agents.iter().next().unwrap();
        for seq in 1..=n_events {
            lines.push(if seq % 2 == 0 {
                format!("event {seq} type=policy policy=p")
            } else {
                format!("event {seq} type=existence agent={first}")
            });
        }
        let n = lines.len();
        lines.rotate_left((shuffle as usize) % n);
        let text = lines.join("\n");
        let once = canon(&text);
        prop_assert_eq!(&canon(&once), &once);
        prop_assert_eq!(parse(&once).unwrap(), parse(&text).unwrap());
    }
}
