mod common;

use common::{isomorphic, random_constraint, random_graph, rng};
use proptest::prelude::*;
use text2proc::export::to_ltl_formula;
use text2proc::ir::validate_graph;
use text2proc::notation::{parse_bpmn_notation, parse_ltl_output, parse_rpa_output, serialize_bpmn_notation};

fn non_blank(text: &str) -> usize {
    text.lines().filter(|l| !l.trim().is_empty()).count()
}

proptest! {
    #[test]
    fn bpmn_round_trip(seed in any::<u64>()) {
        let g = random_graph(&mut rng(seed));
        prop_assert!(validate_graph(&g).is_empty());
        let text = serialize_bpmn_notation(&g).unwrap();
        let back = parse_bpmn_notation(&text).unwrap();
        prop_assert!(back.rejected_lines.is_empty(), "{:?}", back.rejected_lines);
        prop_assert!(isomorphic(&g, &back.value), "{text}");
        let again = parse_bpmn_notation(&serialize_bpmn_notation(&back.value).unwrap()).unwrap().value;
        prop_assert!(isomorphic(&back.value, &again));
    }

    #[test]
    fn ltl_round_trip(seed in any::<u64>()) {
        let c = random_constraint(&mut rng(seed));
        let m = parse_ltl_output(&to_ltl_formula(&c), "s").unwrap().value;
        prop_assert_eq!(m.constraints().collect::<Vec<_>>(), vec![&c]);
    }

    #[test]
    fn bpmn_lines_are_accounted_once(text in "([a-z ]{0,8}(->|: |\\(|\\)|\\[|\\]|,|XOR|AND|\n)){0,12}") {
        if let Ok(r) = parse_bpmn_notation(&text) {
            prop_assert_eq!(r.accounted_lines(), non_blank(&text));
            let warned = r.warned_lines();
            prop_assert!(r.parsed_lines.iter().all(|l| !warned.contains(l)));
            prop_assert!(r.rejected_lines.iter().all(|l| !warned.contains(&l.line) && !r.parsed_lines.contains(&l.line)));
        }
    }

    #[test]
    fn ltl_lines_are_accounted_once(text in "([a-zA-Z ]{0,6}(->|U|NOT\\(|F\\(|G\\(|\\)| AND |START|END|\\[s1\\]|\n)){0,12}") {
        if let Ok(r) = parse_ltl_output(&text, "s") {
            prop_assert_eq!(r.accounted_lines(), non_blank(&text));
        } else {
            prop_assert_eq!(non_blank(&text), 0);
        }
    }

    #[test]
    fn rpa_lines_are_accounted_once(text in "([a-z ]{0,8}(\\||\t| - |:|,|Manual|User task|Automated|---|\n)){0,12}") {
        if let Ok(r) = parse_rpa_output(&text) {
            prop_assert_eq!(r.accounted_lines(), non_blank(&text));
        } else {
            prop_assert_eq!(non_blank(&text), 0);
        }
    }

    #[test]
    fn parsers_never_panic(text in "\\PC{0,200}") {
        let _ = parse_bpmn_notation(&text);
        let _ = parse_ltl_output(&text, "s");
        let _ = parse_rpa_output(&text);
    }
}
