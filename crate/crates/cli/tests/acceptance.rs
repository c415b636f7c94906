//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use jetcartan::dconnect::{berwald, DTensor};
use jetcartan::geometry::{
    canonical_nlc, spatial_riemann, FrameIndex, NonlinearConnection, SpatialMetric, TemporalMetric,
};
use jetcartan::identities::{deflections_closed_form, deflections_via_liouville, Verdict};
use jetcartan::random::{expression, rng};
use jetcartan::{parse_expr, Coord, Expr, Point};
use jetcartan_cli::{builtin, parse_config, run_scenario, Overrides, Report, ScenarioConfig, Task};
use rand::Rng;

const SEEDS: std::ops::RangeInclusive<u64> = 1..=10;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn scenario(name: &str, dim: Option<usize>, seed: Option<u64>, points: usize, tol: f64) -> ScenarioConfig {
    builtin(name, &Overrides { dim, seed, points: Some(points), tol: Some(tol) }).expect("built-in scenario")
}

fn run(c: &ScenarioConfig) -> Result<Report, String> {
    run_scenario(c).map_err(|e| format!("{}: {e}", c.name))
}

fn within(t: Instant, limit: Duration, what: &str) -> Result<Duration, String> {
    let e = t.elapsed();
    ensure(e < limit, || format!("{what} took {e:.2?} (limit {limit:?})"))?;
    Ok(e)
}

/// Flat Berwald: every table vanishes symbolically and every residual is 0.
fn c1() -> Outcome {
    let t = Instant::now();
    let mut checks = 0;
    for n in [2, 3] {
        let r = run(&scenario("flat", Some(n), Some(11), 100, 1e-12))?;
        ensure(r.tables.len() == 13 && r.tables.iter().all(|t| t.symbolic_zero), || format!("n={n}: nonzero table"))?;
        for g in ["ricci", "deflection", "bianchi", "expectations"] {
            ensure(r.group(g).count() > 0, || format!("n={n}: no {g} checks"))?;
        }
        ensure(
            r.group("ricci").count() == 15 && r.group("deflection").count() == 5 && r.group("bianchi").count() == 19,
            || format!("n={n}: wrong identity counts"),
        )?;
        for c in &r.checks {
            ensure(c.result.max_abs == 0.0, || format!("n={n}: {} residual {:e}", c.result.name, c.result.max_abs))?;
        }
        checks += r.checks.len();
    }
    let e = within(t, Duration::from_secs(10), "flat scenarios")?;
    Ok(format!("{checks} checks exactly zero, tables symbolically zero, {e:.2?}"))
}

/// Sphere Berwald tables against the classical curvature.
fn c2() -> Outcome {
    let t = Instant::now();
    let mut c = scenario("sphere2d", None, Some(5), 100, 1e-9);
    c.tasks = vec![Task::Expectations];
    let r = run(&c)?;
    ensure(r.group("expectations").count() == 13, || "missing table checks".into())?;
    let mut worst: f64 = 0.0;
    for rec in r.group("expectations") {
        ensure(rec.result.max_rel <= 1e-9, || format!("{} max_rel {:e}", rec.result.name, rec.result.max_rel))?;
        worst = worst.max(rec.result.max_rel);
    }
    let nonzero: Vec<&str> = r.tables.iter().filter(|t| !t.symbolic_zero).map(|t| t.name.as_str()).collect();
    ensure(nonzero == ["R_ij", "R_ijk"], || format!("unexpected nonzero tables {nonzero:?}"))?;
    let e = within(t, Duration::from_secs(30), "sphere scenario")?;
    Ok(format!("only R_ij and R_ijk nonzero, max rel {worst:.1e}, {e:.2?}"))
}

/// Closed-form tables against the frame oracle.
fn c3() -> Outcome {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for seed in SEEDS {
        let mut c = scenario("random-cartan", None, Some(seed), 50, 1e-8);
        c.tasks = vec![Task::Oracle];
        let r = run(&c)?;
        ensure(r.group("oracle").count() == 13, || format!("seed {seed}: missing oracle checks"))?;
        for rec in r.group("oracle") {
            ensure(rec.result.max_rel <= 1e-8, || {
                format!("seed {seed}: {} max_rel {:e}", rec.result.name, rec.result.max_rel)
            })?;
            worst = worst.max(rec.result.max_rel);
        }
    }
    let e = within(t, Duration::from_secs(120), "oracle comparison")?;
    Ok(format!("10 connections, 13 tables each, max rel {worst:.1e}, {e:.2?}"))
}

/// Identity suites on random connections.
fn c4() -> Outcome {
    let t = Instant::now();
    let (mut suspects, mut both_fail) = (Vec::new(), 0);
    for seed in SEEDS {
        let mut c = scenario("random-cartan", None, Some(seed), 50, 1e-8);
        c.tasks = vec![Task::Ricci, Task::Deflection, Task::Bianchi, Task::General];
        c.fields = 5;
        let r = run(&c)?;
        let counts = [("ricci", 15), ("deflection", 5), ("bianchi", 19), ("general", 2)];
        for (g, k) in counts {
            ensure(r.group(g).count() == k, || format!("seed {seed}: expected {k} {g} checks"))?;
        }
        for rec in r.group("ricci") {
            ensure(rec.result.worst_index.as_ref().is_none_or(|ix| ix.len() >= 2), || "ricci not stacked".into())?;
            ensure(rec.result.components % 5 == 0, || format!("{} is not stacked over 5 fields", rec.result.name))?;
        }
        for g in ["ricci", "deflection", "general"] {
            for rec in r.group(g) {
                ensure(rec.result.verdict == Verdict::Pass, || {
                    format!("seed {seed}: {} {:?} (abs {:e})", rec.result.name, rec.result.verdict, rec.result.max_abs)
                })?;
            }
        }
        let general_pass = r.group("general").all(|g| g.result.verdict == Verdict::Pass);
        for rec in r.group("bianchi") {
            match rec.result.verdict {
                Verdict::Pass => {}
                Verdict::Suspect if general_pass => suspects.push(format!("{}@{seed}", rec.result.name)),
                _ => both_fail += 1,
            }
        }
    }
    ensure(both_fail == 0, || format!("{both_fail} printed identities failed alongside the general ones"))?;
    let e = within(t, Duration::from_secs(300), "identity suites")?;
    Ok(format!("10 connections, 41 checks each, suspects {suspects:?}, {e:.2?}"))
}

/// `∇J = 0` and the six relations for every connection built here.
fn c5() -> Outcome {
    let mut configs = vec![
        scenario("flat", Some(2), None, 40, 1e-10),
        scenario("flat", Some(3), None, 40, 1e-10),
        scenario("sphere2d", None, None, 40, 1e-10),
        scenario("exp-time", None, None, 40, 1e-10),
    ];
    configs.extend(SEEDS.map(|s| scenario("random-cartan", None, Some(s), 40, 1e-10)));
    let custom = "name = custom\nconnection = custom\nh11 = exp(t)\nphi.1.1 = 1 + x2^2\n\
                  G.1.2 = t*x1\nL.1.1.2 = x2*y1\nL.1.2.1 = x2*y1\nC.2.1.1 = y2\ntol = 1e-10\npoints = 40";
    configs.push(parse_config(custom).map_err(|e| e.to_string())?);
    let mut worst: f64 = 0.0;
    for mut c in configs {
        c.tasks = vec![Task::HNormal];
        let r = run(&c)?;
        ensure(r.relations.len() == 6 && r.relations.iter().all(|x| x.holds), || {
            format!("{}: relation fails", c.name)
        })?;
        ensure(r.group("h-normal").filter(|x| x.result.name.starts_with("hnormal-J-")).count() == 3, || {
            format!("{}: missing directions", c.name)
        })?;
        for rec in r.group("h-normal") {
            ensure(rec.result.max_abs < 1e-10, || {
                format!("{}: {} = {:e}", c.name, rec.result.name, rec.result.max_abs)
            })?;
            worst = worst.max(rec.result.max_abs);
        }
    }
    Ok(format!("15 connections, max |nabla J| {worst:.1e}, relations exact"))
}

fn probe(r: &mut impl Rng, n: usize) -> Point<f64> {
    let mut u = || r.gen_range(-1.0..1.0);
    Point::new(u(), (0..n).map(|_| u()).collect(), (0..n).map(|_| u()).collect())
}

/// Closed-form deflections against the Liouville route; Berwald values.
fn c6() -> Outcome {
    let (mut exact, mut numeric) = (0, 0);
    let mut pts = rng(606);
    let mut conns: Vec<_> = SEEDS.map(|s| jetcartan::random::random_cartan(2, &mut rng(s))).collect();
    let berwalds: Vec<_> = ["flat", "sphere2d", "exp-time"]
        .iter()
        .map(|s| jetcartan_cli::build(&scenario(s, None, None, 10, 1e-8)).map(|m| m.conn))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    conns.extend(berwalds.iter().cloned());
    for conn in &conns {
        let closed = deflections_closed_form(conn).map_err(|e| e.to_string())?;
        let via = deflections_via_liouville(conn);
        let points: Vec<_> = (0..20).map(|_| probe(&mut pts, conn.dim())).collect();
        for ((name, a), (_, b)) in closed.entries().iter().zip(via.entries()) {
            for (x, y) in a.components().iter().zip(b.components()) {
                if (x - y).simplify().is_zero() {
                    exact += 1;
                    continue;
                }
                for p in &points {
                    let (u, v) = (x.eval::<f64>(p).unwrap(), y.eval::<f64>(p).unwrap());
                    ensure((u - v).abs() <= 1e-10, || format!("{name}: {u} vs {v}"))?;
                }
                numeric += 1;
            }
        }
    }
    for conn in &berwalds {
        let d = deflections_closed_form(conn).map_err(|e| e.to_string())?;
        ensure(d.d_bar.simplify().is_zero() && d.d.simplify().is_zero(), || "Berwald D-bar or D nonzero".into())?;
        let dv = d.d_v.simplify();
        for ix in dv.indices() {
            let want = if ix[0] == ix[1] { Expr::one() } else { Expr::zero() };
            ensure(*dv.get(&ix) == want, || format!("Berwald d{ix:?} = {}", dv.get(&ix)))?;
        }
    }
    Ok(format!("{exact} components equal symbolically, {numeric} numerically; Berwald D-bar = D = 0, d = delta"))
}

/// Richardson-extrapolated central difference.
fn richardson(f: &Expr, c: Coord, p: &Point<f64>, h: f64) -> Option<f64> {
    let at = |dx: f64| {
        let mut q = p.clone();
        *q.get_mut(c) += dx;
        f.eval::<f64>(&q).ok()
    };
    let central = |h: f64| Some((at(h)? - at(-h)?) / (2.0 * h));
    Some((4.0 * central(h / 2.0)? - central(h)?) / 3.0)
}

fn sphere() -> (TemporalMetric, SpatialMetric) {
    let h = TemporalMetric::new(parse_expr("1 + t^2", 2).unwrap()).unwrap();
    let phi = SpatialMetric::diagonal(vec![Expr::one(), parse_expr("sin(x1)^2", 2).unwrap()]).unwrap();
    (h, phi)
}

/// Differentiation, frame duality and the horizontal bracket.
fn c7() -> Outcome {
    let n = 2;
    let mut r = rng(707);
    let mut worst: f64 = 0.0;
    for k in 0..1000 {
        let e = expression(&mut r, n, 4);
        let c = Coord::all(n)[r.gen_range(0..1 + 2 * n)];
        let p = probe(&mut r, n);
        let exact = e.diff(c).eval::<f64>(&p).map_err(|err| format!("pair {k}: {err}"))?;
        let fd = richardson(&e, c, &p, 1e-3).ok_or_else(|| format!("pair {k}: stencil left the domain"))?;
        let rel = (exact - fd).abs() / (1.0 + exact.abs().max(fd.abs()));
        ensure(rel <= 1e-6, || format!("d/d{c} of {e}: {exact} vs {fd}"))?;
        worst = worst.max(rel);
    }

    let (h, phi) = sphere();
    let canon = canonical_nlc(&h, &phi);
    let mut gen = rng(77);
    let vars = Coord::all(n);
    let mut poly = || jetcartan::random::polynomial(&mut gen, &vars);
    let random_nlc = NonlinearConnection::new(
        (0..n).map(|_| poly()).collect(),
        (0..n).map(|_| (0..n).map(|_| poly()).collect()).collect(),
    )
    .unwrap();
    for nlc in [&canon, &random_nlc] {
        for a in FrameIndex::all(n) {
            for b in FrameIndex::all(n) {
                let v = NonlinearConnection::pair(&nlc.coframe(a), &nlc.frame_field(b));
                let want = if a == b { Expr::one() } else { Expr::zero() };
                ensure(v == want, || format!("<{a:?}, {b:?}> = {v}"))?;
            }
        }
    }

    let riem = spatial_riemann(&phi);
    let rr = berwald(&h, &phi);
    let tors = jetcartan::curvtors::torsion_table(&rr).map_err(|e| e.to_string())?;
    for i in 0..n {
        for j in 0..n {
            let br = canon.frame_bracket(FrameIndex::Space(i), FrameIndex::Space(j));
            for (slot, comp) in br.iter().enumerate() {
                let want = match FrameIndex::from_flat(slot, n) {
                    FrameIndex::Fiber(k) => Expr::sum((0..n).map(|m| riem.get(k, m, i, j) * Expr::y(m)).collect()),
                    _ => Expr::zero(),
                };
                ensure((comp - &want).simplify().is_zero(), || format!("[d{i}, d{j}] slot {slot}: {comp} vs {want}"))?;
                if let FrameIndex::Fiber(k) = FrameIndex::from_flat(slot, n) {
                    let t: &DTensor = &tors.r_ij;
                    ensure((comp - t.get(&[k, i, j])).simplify().is_zero(), || "bracket differs from R_ij".into())?;
                }
            }
        }
    }
    Ok(format!("1000 derivative pairs (worst rel {worst:.1e}), duality exact, sphere bracket symbolic"))
}

/// Two CLI runs with the same seed give identical bytes.
fn c8() -> Outcome {
    let dir = std::env::temp_dir().join(format!("jetcartan-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for k in 0..2 {
        let path = dir.join(format!("run{k}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_jetcartan"))
            .args(["check", "--scenario", "random-cartan", "--seed", "42", "--json"])
            .arg(&path)
            .output()
            .map_err(|e| e.to_string())?
            .status;
        ensure(status.success(), || format!("run {k} exited with {status}"))?;
        outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    let _ = std::fs::remove_dir_all(&dir);
    ensure(!outputs[0].is_empty() && outputs[0] == outputs[1], || "reports differ".into())?;
    Ok(format!("two reports of {} bytes are identical", outputs[0].len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("flat scenario", c1),
        ("sphere scenario", c2),
        ("oracle equivalence", c3),
        ("identity suites", c4),
        ("h-normal theorem", c5),
        ("deflection consistency", c6),
        ("infrastructure", c7),
        ("determinism", c8),
    ];
    let mut out = std::io::stdout();
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        let _ = writeln!(out, "criterion {} [{tag}] {name}: {detail}", k + 1);
    }
    if failed > 0 {
        let _ = writeln!(out, "{failed} criteria failed");
        std::process::exit(1);
    }
}
