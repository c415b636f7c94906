use jetcartan::curvtors::{curvature_oracle, curvature_table_with, torsion_oracle, torsion_table};
use jetcartan::identities::{
    apply_arbiter, bianchi_residuals_with, deflection_identity_residuals_with, general_bianchi_residuals, liouville,
    ricci_residuals_with, verify, ResidualTensor, SamplingPlan, Verdict,
};
use jetcartan::random::{random_cartan, random_vector_fields, rng};
use jetcartan::Point;

fn suite(seed: u64, n: usize) -> Vec<ResidualTensor> {
    let mut r = rng(seed);
    let conn = random_cartan(n, &mut r);
    let x = random_vector_fields(n, &mut r);
    let tors = torsion_table(&conn).unwrap();
    let curv = curvature_table_with(&conn, &tors).unwrap();
    let mut res = ricci_residuals_with(&conn, &tors, &curv, &x).unwrap();
    res.extend(deflection_identity_residuals_with(&conn, &tors, &curv).unwrap());
    res.extend(bianchi_residuals_with(&conn, &tors, &curv).unwrap());
    res.extend(general_bianchi_residuals(&conn));
    res
}

#[test]
fn every_identity_holds_on_random_connections() {
    for seed in [3, 17] {
        let res = suite(seed, 2);
        assert_eq!(res.len(), 15 + 5 + 19 + 2);
        let mut rep = verify(&res, &SamplingPlan::new(seed, 25)).unwrap();
        apply_arbiter(&mut rep);
        for r in &rep.identities {
            assert_eq!(r.verdict, Verdict::Pass, "{} abs {:e}", r.name, r.max_abs);
        }
        assert!(rep.arbiter.unwrap().general_pass);
    }
}

/// Both sides must be of order one somewhere, or a passing check says
/// nothing. The time-upper vertical commutator is identically zero on both
/// sides for h-normal connections.
#[test]
fn identities_are_not_vacuous() {
    let res = suite(5, 2);
    let p = Point::new(0.3, vec![0.2, -0.6], vec![0.7, -0.4]);
    for r in res.iter().filter(|r| r.name != "Ricci-hR-5") {
        let m = r.lhs.iter().map(|e| e.eval::<f64>(&p).unwrap().abs()).fold(0.0, f64::max);
        assert!(m > 1e-3, "{} has a vanishing left side", r.name);
    }
}

#[test]
fn perturbed_identity_is_caught() {
    let mut res = suite(9, 2);
    let b7 = res.iter_mut().find(|r| r.name == "Bianchi-07").unwrap();
    b7.rhs = b7.rhs.iter().map(|e| e * jetcartan::Expr::ratio(11, 10)).collect();
    let mut rep = verify(&res, &SamplingPlan::new(9, 20)).unwrap();
    apply_arbiter(&mut rep);
    assert_eq!(rep.get("Bianchi-07").unwrap().verdict, Verdict::Suspect);
    assert_eq!(rep.suspects(), vec!["Bianchi-07"]);
}

#[test]
fn oracle_matches_closed_form_in_three_dimensions() {
    let conn = random_cartan(3, &mut rng(2));
    let tors = torsion_table(&conn).unwrap();
    let curv = curvature_table_with(&conn, &tors).unwrap();
    let (to, co) = (torsion_oracle(&conn), curvature_oracle(&conn));
    let mut res = Vec::new();
    for ((name, a), (_, b)) in tors.entries().into_iter().zip(to.entries()) {
        res.push(ResidualTensor::from_dtensors(name, a.clone(), b.clone()));
    }
    for ((name, a), (_, b)) in curv.entries().into_iter().zip(co.entries()) {
        res.push(ResidualTensor::from_dtensors(name, a.clone(), b.clone()));
    }
    let rep = verify(&res, &SamplingPlan::new(2, 20)).unwrap();
    assert!(rep.all_pass());
    // Cartan type kills T_ij and S exactly
    assert!(tors.t_ij.simplify().is_zero() && tors.s_ij.simplify().is_zero());
}

#[test]
fn liouville_vertical_block_gives_deflection_identities() {
    let n = 2;
    let conn = random_cartan(n, &mut rng(4));
    let tors = torsion_table(&conn).unwrap();
    let curv = curvature_table_with(&conn, &tors).unwrap();
    let mut x = random_vector_fields(n, &mut rng(40));
    x[2] = liouville(n);
    let ricci = ricci_residuals_with(&conn, &tors, &curv, &x).unwrap();
    let defl = deflection_identity_residuals_with(&conn, &tors, &curv).unwrap();
    let p = Point::new(-0.2, vec![0.5, 0.1], vec![0.3, 0.9]);
    for (a, b) in ricci[10..].iter().zip(&defl) {
        for (l1, l2) in a.lhs.iter().zip(&b.lhs) {
            let (u, v) = (l1.eval::<f64>(&p).unwrap(), l2.eval::<f64>(&p).unwrap());
            assert!((u - v).abs() < 1e-12, "{} vs {}", a.name, b.name);
        }
    }
}
