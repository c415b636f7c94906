//! Built-in scenarios and the step from a config to concrete geometry.

use jetcartan::dconnect::{berwald, make_h_normal_cartan, DTensor, GammaConnection, HNormalData, IndexSlot};
use jetcartan::geometry::{canonical_nlc, NonlinearConnection, SpatialMetric, TemporalMetric};
use jetcartan::identities::SamplingPlan;
use jetcartan::random::{random_cartan, rng};
use jetcartan::{parse_expr, Expr};

use crate::config::{parse_config, ConnectionSpec, NlcSpec, ScenarioConfig, Src};
use crate::error::CliError;
use IndexSlot::*;

pub const SCENARIOS: [&str; 4] = ["flat", "sphere2d", "exp-time", "random-cartan"];

const FLAT: &str = "\
name = flat
h11 = 1
connection = berwald
";

const SPHERE: &str = "\
name = sphere2d
h11 = 1 + t^2
phi.2.2 = sin(x1)^2
connection = berwald
domain.x1 = 0.3, 2.8
";

const EXP_TIME: &str = "\
name = exp-time
h11 = exp(2*t)
phi.2.2 = exp(2*x1)
connection = berwald
";

const RANDOM: &str = "\
name = random-cartan
connection = random
";

/// Overrides from the command line.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub dim: Option<usize>,
    pub seed: Option<u64>,
    pub points: Option<usize>,
    pub tol: Option<f64>,
}

/// A named scenario with overrides applied. `--seed` also reseeds a random
/// connection.
pub fn builtin(name: &str, o: &Overrides) -> Result<ScenarioConfig, CliError> {
    let text = match name {
        "flat" => FLAT,
        "sphere2d" => SPHERE,
        "exp-time" => EXP_TIME,
        "random-cartan" => RANDOM,
        _ => return Err(CliError::Scenario(format!("unknown scenario `{name}` (known: {})", SCENARIOS.join(", ")))),
    };
    let mut c = parse_config(text)?;
    if let Some(n) = o.dim {
        if !(1..=4).contains(&n) {
            return Err(CliError::Scenario("--dim must be between 1 and 4".into()));
        }
        if name == "sphere2d" && n != 2 {
            return Err(CliError::Scenario("sphere2d is two-dimensional".into()));
        }
        c.dim = n;
    }
    apply(&mut c, o);
    Ok(c)
}

/// Applies the sampling overrides (not `dim`) to any config.
pub fn apply(c: &mut ScenarioConfig, o: &Overrides) {
    if let Some(s) = o.seed {
        c.seed = s;
        if let ConnectionSpec::Random { seed } = &mut c.connection {
            *seed = s;
        }
    }
    if let Some(p) = o.points {
        c.points = p;
    }
    if let Some(t) = o.tol {
        c.abs_tol = t;
        c.rel_tol = t;
    }
}

/// Concrete inputs for the tasks.
#[derive(Clone, Debug)]
pub struct Model {
    pub h: TemporalMetric,
    /// Absent for random connections, which carry no spatial metric.
    pub phi: Option<SpatialMetric>,
    pub conn: GammaConnection,
    pub plan: SamplingPlan,
}

fn expr(src: &Src, n: usize) -> Result<Expr, CliError> {
    parse_expr(&src.text, n).map_err(|e| CliError::config(src.line, format!("`{}`: {e}", src.text)))
}

fn spatial_metric(c: &ScenarioConfig) -> Result<SpatialMetric, CliError> {
    let n = c.dim;
    let mut rows = vec![vec![Expr::zero(); n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            *e = match c.phi.get(&(i, j)).or_else(|| c.phi.get(&(j, i))) {
                Some(src) => expr(src, n)?,
                None if i == j => Expr::one(),
                None => Expr::zero(),
            };
        }
    }
    Ok(SpatialMetric::new(rows)?)
}

fn components(
    map: &std::collections::BTreeMap<Vec<usize>, Src>,
    sig: Vec<IndexSlot>,
    n: usize,
    to_ix: impl Fn(&[usize]) -> Vec<usize>,
) -> Result<DTensor, CliError> {
    let mut d = DTensor::zeros(sig, n);
    for (k, src) in map {
        d.set(&to_ix(k), expr(src, n)?);
    }
    Ok(d)
}

/// Parses every expression and builds the connection and sampling plan.
pub fn build(c: &ScenarioConfig) -> Result<Model, CliError> {
    let n = c.dim;
    let base_plan = SamplingPlan::new(c.seed, c.points).with_domain(c.domain.clone()).with_tol(c.abs_tol, c.rel_tol);
    base_plan.validate(n)?;
    if let ConnectionSpec::Random { seed } = c.connection {
        let conn = random_cartan(n, &mut rng(seed));
        let h = conn.h_normal().expect("random connections are h-normal").h.clone();
        let plan = base_plan.with_guards(Some(h.clone()), None);
        return Ok(Model { h, phi: None, conn, plan });
    }
    let h = TemporalMetric::new(expr(&c.h11, n)?)?;
    let phi = spatial_metric(c)?;
    let conn = match &c.connection {
        ConnectionSpec::Berwald => berwald(&h, &phi),
        ConnectionSpec::Custom { g, l, c: cc, nlc } => {
            let g = components(g, vec![SpaceUpper, SpaceLower, TimeLower], n, |k| vec![k[0], k[1], 0])?;
            let l = components(l, vec![SpaceUpper, SpaceLower, SpaceLower], n, <[usize]>::to_vec)?;
            let cc = components(cc, vec![SpaceUpper, SpaceLower, FiberLower], n, <[usize]>::to_vec)?;
            let nlc = match nlc {
                NlcSpec::Canonical => canonical_nlc(&h, &phi),
                NlcSpec::Explicit { m, n: nn } => {
                    let get = |s: Option<&Src>| s.map_or(Ok(Expr::zero()), |s| expr(s, n));
                    let m = (0..n).map(|j| get(m.get(&j))).collect::<Result<Vec<_>, _>>()?;
                    let nn = (0..n)
                        .map(|j| (0..n).map(|i| get(nn.get(&(j, i)))).collect::<Result<Vec<_>, _>>())
                        .collect::<Result<Vec<_>, _>>()?;
                    NonlinearConnection::new(m, nn)?
                }
            };
            make_h_normal_cartan(HNormalData::new(h.clone(), g, l, cc)?, nlc)?
        }
        ConnectionSpec::Random { .. } => unreachable!(),
    };
    let plan = base_plan.with_guards(Some(h.clone()), Some(phi.clone()));
    Ok(Model { h, phi: Some(phi), conn, plan })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_build() {
        for name in SCENARIOS {
            let c = builtin(name, &Overrides::default()).unwrap();
            let m = build(&c).unwrap();
            assert_eq!(m.conn.dim(), 2);
        }
        assert!(builtin("torus", &Overrides::default()).is_err());
        assert!(builtin("sphere2d", &Overrides { dim: Some(3), ..Default::default() }).is_err());
    }

    #[test]
    fn seed_override_reseeds_random_connection() {
        let c = builtin("random-cartan", &Overrides { seed: Some(42), ..Default::default() }).unwrap();
        assert_eq!(c.seed, 42);
        assert_eq!(c.connection, ConnectionSpec::Random { seed: 42 });
    }

    #[test]
    fn asymmetric_l_reports_triple() {
        let c = parse_config("connection = custom\nL.1.1.2 = x1").unwrap();
        let err = build(&c).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("(1, 1, 2)"), "{err}");
    }

    #[test]
    fn bad_expression_names_line() {
        let c = parse_config("dim = 2\nh11 = 1 + x1").unwrap();
        let err = build(&c).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let c = parse_config("dim = 2\n\nh11 = 1 + (t").unwrap();
        assert!(build(&c).unwrap_err().to_string().contains("line 3"));
    }
}
