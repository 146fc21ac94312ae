//! End-to-end checks of the product scheme on larger random instances.

use wmls_core::mls::{check_scheme_on_instance, Scheme};
use wmls_product::generate::random_product;
use wmls_product::{build_structure, ProductScheme, ProductWitness};

#[test]
fn three_tree_times_twenty_row_path() {
    let inst = random_product(50, 3, 20, 0.5, 0.6, 2024);
    assert!((400..=600).contains(&inst.n()), "n = {}", inst.n());
    let scheme = ProductScheme::new(3);
    let (labelling, report) = check_scheme_on_instance(&scheme, &inst).unwrap();
    assert!(report.pass, "{:?}", report.first_failure);
    let budget = scheme.budget(inst.n());
    println!(
        "n={} vertex_slack={:.2} clique_slack={:.2} max_kappa={} budget={:?}",
        inst.n(),
        report.budget.vertex_slack,
        report.budget.clique_slack,
        report.budget.max_kappa,
        budget
    );
    assert!(report.budget.within(&budget, 0.0));
    assert_eq!(labelling.vertex.len(), inst.n());
}

#[test]
fn local_identifiers_are_short() {
    // κ is a position among at most 2(k+1) members.
    let inst = random_product(30, 2, 6, 0.9, 0.5, 7);
    let (labelling, _) = check_scheme_on_instance(&ProductScheme::new(2), &inst).unwrap();
    let longest = labelling.local.iter().flatten().map(|k| k.len()).max().unwrap();
    assert!(longest <= 3, "κ of {longest} bits for at most 6 members");
}

#[test]
fn witness_json_survives_a_round_trip_through_labelling() {
    let inst = random_product(20, 2, 4, 0.7, 0.5, 99);
    let json = serde_json::to_string(&inst.witness.to_json()).unwrap();
    let back = ProductWitness::from_json(serde_json::from_str(&json).unwrap()).unwrap();
    let mut copy = inst.clone();
    copy.witness = back;
    let scheme = ProductScheme::new(2);
    assert_eq!(scheme.label(&inst).unwrap(), scheme.label(&copy).unwrap());
}

#[test]
fn rows_keep_most_tree_boundaries() {
    // Consecutive rows of a product with every point present share their
    // B-tree structure, so transitions are short.
    let inst = random_product(200, 2, 8, 1.0, 0.3, 5);
    let st = build_structure(&inst).unwrap();
    let mut total = 0usize;
    let mut count = 0usize;
    for (p, point) in st.rows.points.iter().enumerate() {
        if point.vertex.is_some() && point.row < st.rows.h {
            let up = st.rows.point(point.hv, point.row + 1).unwrap();
            let s = wmls_product::Splice::between(&st.sigma_plus[p], &st.sigma_plus[up]);
            total += s.delete + s.insert.len();
            count += 1;
        }
    }
    let mean = total as f64 / count as f64;
    println!("mean transition edits: {mean:.3}");
    assert!(mean <= 2.0);
}
