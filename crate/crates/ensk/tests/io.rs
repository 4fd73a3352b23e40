use ensk::io::{parse_pool, parse_weights, write_pool};
use ensk::AppError;

fn input_error(r: Result<impl std::fmt::Debug, AppError>) -> String {
    match r {
        Err(AppError::Input(msg)) => msg,
        other => panic!("expected an input error, got {other:?}"),
    }
}

#[test]
fn reads_pool_with_costs() {
    let csv = "id,accuracy,cost\na,0.8,2\nb, 0.7 ,1.5\n";
    let pf = parse_pool(csv.as_bytes(), "pool.csv").unwrap();
    assert!(pf.has_cost);
    assert_eq!(pf.pool.len(), 2);
    assert_eq!(pf.pool.members()[1].id, "b");
    assert_eq!(pf.pool.costs(), vec![2.0, 1.5]);
}

#[test]
fn missing_cost_column_means_unit_costs() {
    let pf = parse_pool("id,accuracy\nx,0.6\ny,0.9\n".as_bytes(), "p").unwrap();
    assert!(!pf.has_cost);
    assert_eq!(pf.pool.costs(), vec![1.0, 1.0]);
}

#[test]
fn column_order_does_not_matter() {
    let pf = parse_pool("cost,id,accuracy\n3,z,0.75\n".as_bytes(), "p").unwrap();
    assert_eq!(pf.pool.members()[0].cost, 3.0);
    assert_eq!(pf.pool.members()[0].accuracy, 0.75);
}

#[test]
fn malformed_rows_name_the_line() {
    let msg = input_error(parse_pool("id,accuracy,cost\na,0.8,1\nb,abc,1\n".as_bytes(), "p.csv"));
    assert!(msg.contains("p.csv") && msg.contains("row 3"), "{msg}");
    let msg = input_error(parse_pool("id,accuracy,cost\na,0.8,\n".as_bytes(), "p.csv"));
    assert!(msg.contains("row 2"), "{msg}");
    let msg = input_error(parse_pool("id,cost\na,1\n".as_bytes(), "p.csv"));
    assert!(msg.contains("accuracy"), "{msg}");
    input_error(parse_pool("id,accuracy,cost\n".as_bytes(), "p.csv"));
}

#[test]
fn invalid_members_are_rejected() {
    let msg = input_error(parse_pool("id,accuracy,cost\na,1.2,1\n".as_bytes(), "p"));
    assert!(msg.contains('a'), "{msg}");
    input_error(parse_pool("id,accuracy,cost\na,0.5,0\n".as_bytes(), "p"));
    input_error(parse_pool("id,accuracy,cost\na,0.5,-1\n".as_bytes(), "p"));
    let msg = input_error(parse_pool("id,accuracy,cost\na,0.5,1\na,0.6,1\n".as_bytes(), "p"));
    assert!(msg.contains("duplicate"), "{msg}");
}

#[test]
fn pool_roundtrip() {
    let csv = "id,accuracy,cost\nm1,0.8123456789012345,2.5\nm2,0.1,7\n";
    let pf = parse_pool(csv.as_bytes(), "p").unwrap();
    let mut buf = Vec::new();
    write_pool(&pf.pool, &mut buf).unwrap();
    let back = parse_pool(buf.as_slice(), "p").unwrap();
    assert_eq!(back.pool, pf.pool);
}

#[test]
fn weights_file() {
    let w = parse_weights("k,p\n0,0\n1,0.11\n2,0.7\n".as_bytes(), "w").unwrap();
    assert_eq!(w, vec![0.0, 0.11, 0.7]);
    let msg = input_error(parse_weights("k,p\n0,0\n2,0.7\n".as_bytes(), "w"));
    assert!(msg.contains("expected k = 1"), "{msg}");
    input_error(parse_weights("k,p\n0,0.5\n".as_bytes(), "w"));
    input_error(parse_weights("k,p\n0,x\n1,1\n".as_bytes(), "w"));
}
