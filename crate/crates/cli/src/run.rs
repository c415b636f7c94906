//! Task orchestration.

use std::fmt::Write as _;

use jetcartan::curvtors::{
    curvature_oracle, curvature_table_with, torsion_oracle, torsion_table, CurvatureTable, TorsionTable,
};
use jetcartan::dconnect::{check_h_normal, h_normal_relations, DTensor};
use jetcartan::geometry::spatial_riemann;
use jetcartan::identities::{
    apply_arbiter, bianchi_residuals_with, deflection_identity_residuals_with, general_bianchi_residuals,
    identity_names, ricci_residuals_many, verify, ResidualTensor, VerificationReport,
};
use jetcartan::random::{random_vector_fields, rng};
use jetcartan::Expr;

use crate::config::{ScenarioConfig, Task};
use crate::error::CliError;
use crate::report::{CheckRecord, Relation, Report, TableRecord};
use crate::scenario::{build, Model};

/// Offset of the vector-field stream from the plan seed.
const FIELD_STREAM: u64 = 0x9e37_79b9;

fn signature(d: &DTensor) -> String {
    let s: Vec<&str> = d.signature().iter().map(|s| s.short()).collect();
    format!("[{}]", s.join(","))
}

fn table_record(name: &str, d: &DTensor) -> TableRecord {
    let nonzero = d.components().iter().filter(|e| !e.simplify().is_zero()).count();
    TableRecord {
        name: name.to_string(),
        signature: signature(d),
        components: d.components().len(),
        nonzero,
        symbolic_zero: nonzero == 0,
    }
}

fn table_entries<'a>(tors: &'a TorsionTable, curv: &'a CurvatureTable) -> Vec<(&'static str, &'a DTensor)> {
    tors.entries().into_iter().chain(curv.entries()).collect()
}

/// Expected Berwald tables: `R⁽ᵏ⁾ᵢⱼ = 𝔯ᵏₘᵢⱼy₁ᵐ`, `Rˡᵢⱼₖ = 𝔯ˡᵢⱼₖ`, all else 0.
fn berwald_expectations(model: &Model, tors: &TorsionTable, curv: &CurvatureTable) -> Vec<ResidualTensor> {
    let phi = model.phi.as_ref().expect("berwald scenarios carry a spatial metric");
    let n = phi.dim();
    let riem = spatial_riemann(phi);
    table_entries(tors, curv)
        .into_iter()
        .map(|(name, d)| {
            let expect = DTensor::from_fn(d.signature().to_vec(), n, |ix| match name {
                "R_ij" => Expr::sum((0..n).map(|m| riem.get(ix[0], m, ix[1], ix[2]) * Expr::y(m)).collect()),
                "R_ijk" => riem.r.get(ix).clone(),
                _ => Expr::zero(),
            });
            ResidualTensor::from_dtensors(name, d.clone(), expect)
        })
        .collect()
}

/// Runs the configured tasks in dependency order and collects the report.
pub fn run_scenario(c: &ScenarioConfig) -> Result<Report, CliError> {
    if c.tasks.contains(&Task::Ricci) && c.fields == 0 {
        return Err(CliError::Scenario("the ricci task needs at least one vector field".into()));
    }
    let model = build(c)?;
    let conn = &model.conn;
    let plan = &model.plan;
    let n = c.dim;

    let mut relations = Vec::new();
    let mut groups: Vec<(String, Option<bool>)> = Vec::new();
    let mut residuals: Vec<ResidualTensor> = Vec::new();
    let mut hnormal: Option<VerificationReport> = None;
    if c.tasks.contains(&Task::HNormal) {
        hnormal = Some(check_h_normal(conn, &model.h, plan)?);
        relations =
            h_normal_relations(conn).into_iter().map(|(name, holds)| Relation { name: name.into(), holds }).collect();
    }

    let needs_tables = c.tasks.iter().any(|&t| t != Task::HNormal);
    let mut tables = Vec::new();
    if needs_tables {
        let tors = torsion_table(conn)?;
        let curv = curvature_table_with(conn, &tors)?;
        tables = table_entries(&tors, &curv).into_iter().map(|(name, d)| table_record(name, d)).collect();
        let mut push = |group: &str, rs: Vec<ResidualTensor>, symbolic: bool| {
            for r in rs {
                groups.push((group.to_string(), symbolic.then(|| r.vanishes_symbolically())));
                residuals.push(r);
            }
        };
        for &task in &c.tasks {
            match task {
                Task::HNormal => {}
                Task::Oracle => {
                    let (to, co) = (torsion_oracle(conn), curvature_oracle(conn));
                    let oracle: Vec<_> = to.entries().into_iter().chain(co.entries()).collect();
                    let rs = table_entries(&tors, &curv)
                        .into_iter()
                        .zip(oracle)
                        .map(|((name, a), (_, b))| ResidualTensor::from_dtensors(name, a.clone(), b.clone()))
                        .collect();
                    push("oracle", rs, false);
                }
                Task::Expectations => push("expectations", berwald_expectations(&model, &tors, &curv), true),
                Task::Ricci => {
                    let mut r = rng(c.seed.wrapping_add(FIELD_STREAM));
                    let fields: Vec<_> = (0..c.fields).map(|_| random_vector_fields(n, &mut r)).collect();
                    push("ricci", ricci_residuals_many(conn, &tors, &curv, &fields)?, false);
                }
                Task::Deflection => push("deflection", deflection_identity_residuals_with(conn, &tors, &curv)?, false),
                Task::Bianchi => push("bianchi", bianchi_residuals_with(conn, &tors, &curv)?, false),
                Task::General => push("general", general_bianchi_residuals(conn), false),
            }
        }
    }

    let mut verified = if residuals.is_empty() {
        VerificationReport {
            seed: plan.seed,
            count: plan.count,
            abs_tol: plan.abs_tol,
            rel_tol: plan.rel_tol,
            identities: Vec::new(),
            arbiter: None,
        }
    } else {
        verify(&residuals, plan)?
    };
    apply_arbiter(&mut verified);

    let mut checks: Vec<CheckRecord> = Vec::new();
    if let Some(h) = hnormal {
        checks.extend(h.identities.into_iter().map(|result| CheckRecord {
            group: "h-normal".into(),
            result,
            symbolic: None,
        }));
    }
    checks.extend(verified.identities.into_iter().zip(groups).map(|(result, (group, symbolic))| CheckRecord {
        group,
        result,
        symbolic,
    }));
    let summary = Report::summarize(&checks, &relations);
    Ok(Report {
        scenario: c.name.clone(),
        dim: n,
        connection: c.connection.kind().to_string(),
        seed: c.seed,
        points: c.points,
        abs_tol: c.abs_tol,
        rel_tol: c.rel_tol,
        domain: c.domain.clone(),
        tasks: c.tasks.clone(),
        relations,
        tables,
        checks,
        arbiter: verified.arbiter,
        summary,
    })
}

/// Torsion and curvature tables as text; with `symbolic`, every nonzero
/// component after simplification.
pub fn tables_text(c: &ScenarioConfig, symbolic: bool) -> Result<String, CliError> {
    let model = build(c)?;
    let tors = torsion_table(&model.conn)?.simplify();
    let curv = curvature_table_with(&model.conn, &tors)?.simplify();
    let mut s = String::new();
    let _ = writeln!(s, "scenario {} (n = {}, {} connection)", c.name, c.dim, c.connection.kind());
    for (name, d) in table_entries(&tors, &curv) {
        let nonzero: Vec<_> = d.indices().filter(|ix| !d.get(ix).is_zero()).collect();
        let _ = writeln!(
            s,
            "{name:<10} {:<14} {} of {} components nonzero",
            signature(d),
            nonzero.len(),
            d.components().len()
        );
        if symbolic {
            for ix in nonzero {
                let one_based: Vec<String> = ix.iter().map(|k| (k + 1).to_string()).collect();
                let _ = writeln!(s, "  {name}[{}] = {}", one_based.join(","), d.get(&ix));
            }
        }
    }
    Ok(s)
}

/// Every identity name, grouped by family.
pub fn list_identities() -> String {
    let names = identity_names();
    let mut s = String::new();
    for (title, prefix) in [
        ("Ricci identities", "Ricci-"),
        ("Deflection identities", "Defl-"),
        ("Bianchi identities", "Bianchi-"),
        ("General Bianchi families", "GenBianchi-"),
    ] {
        let members: Vec<&String> = names.iter().filter(|n| n.starts_with(prefix)).collect();
        let _ = writeln!(s, "{title} ({})", members.len());
        for m in members {
            let _ = writeln!(s, "  {m}");
        }
    }
    s
}
