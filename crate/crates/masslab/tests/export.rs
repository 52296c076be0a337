use masslab::checks::{resolve, SUITES};
use masslab::export::{dot, frontier_doc, table};
use masslab::fixtures::classes;
use masslab::trees::members_upto;

#[test]
fn frontier_docs_validate_on_fixtures() {
    for p in classes() {
        for d in 0..=6 {
            let doc = frontier_doc(&p, d).unwrap();
            assert!(doc.validated, "{} {d}", p.label());
            assert_eq!(doc.count, doc.members.len());
            assert_eq!(doc.expr, p.label());
        }
    }
}

#[test]
fn dot_has_one_edge_per_non_root_node() {
    for p in classes() {
        let text = dot(&p, 4).unwrap();
        let nodes = members_upto(&p, 4, 1 << 16).unwrap().len();
        assert_eq!(text.matches(" -> ").count(), nodes.saturating_sub(1), "{}", p.label());
        assert!(text.ends_with("}\n"));
    }
}

#[test]
fn table_lists_members_then_leaves() {
    let b = classes()[1].clone();
    let t = table(&frontier_doc(&b, 3).unwrap());
    let lines: Vec<&str> = t.lines().collect();
    assert_eq!(lines[0], "fixtureB  depth 3  members 2  leaves 2");
    assert_eq!(&lines[1..], ["member  0.0.0", "member  0.0.1", "leaf    1", "leaf    0.1"]);
}

#[test]
fn suites_resolve_by_name_number_and_all() {
    assert_eq!(resolve("all").unwrap().len(), SUITES.len());
    assert_eq!(resolve("dnr-square").unwrap(), vec![5]);
    assert_eq!(resolve("3").unwrap(), vec![3]);
    assert!(resolve("10").is_err());
}
