use std::path::Path;

use serde_json::Value;
use srgen_core::mutation::generate_mutants;
use srgen_core::subject::{parse_subject, GoalIndex};

#[test]
fn goal_and_mutant_counts_match_the_manifest() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let m: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    let subjects = m["subjects"].as_array().unwrap();
    assert!(subjects.len() >= 5);
    for s in subjects {
        let file = s["file"].as_str().unwrap();
        let u = parse_subject(&std::fs::read_to_string(dir.join(file)).unwrap()).unwrap();
        assert_eq!(u.name, s["unit"].as_str().unwrap());
        let goals = GoalIndex::new(&u).len();
        assert_eq!(goals as u64, s["goals"].as_u64().unwrap(), "{file} goals");
        assert!(goals <= 25);
        assert_eq!(generate_mutants(&u).len() as u64, s["mutants"].as_u64().unwrap(), "{file} mutants");
    }
}
