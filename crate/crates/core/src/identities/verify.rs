use std::hash::Hasher;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::FxHasher;
use serde::{Deserialize, Serialize};

use crate::geometry::{SpatialMetric, TemporalMetric};
use crate::symexpr::{Point, Tape};

use super::{IdentityError, ResidualTensor, GENERAL_BIANCHI_NAMES};

pub const DEFAULT_TOL: f64 = 1e-8;

/// Sampling box for `(t, x, y)`. A single `x` interval applies to every
/// spatial coordinate; otherwise there must be one per coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub t: (f64, f64),
    pub x: Vec<(f64, f64)>,
    pub y: (f64, f64),
}

impl Default for Domain {
    fn default() -> Self {
        Domain { t: (-1.0, 1.0), x: vec![(-1.0, 1.0)], y: (-1.0, 1.0) }
    }
}

impl Domain {
    fn x_range(&self, i: usize) -> (f64, f64) {
        if self.x.len() == 1 {
            self.x[0]
        } else {
            self.x[i]
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SamplingPlan {
    pub seed: u64,
    pub count: usize,
    pub domain: Domain,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Draws per point before giving up on the guards or on evaluation.
    pub max_retries: usize,
    /// Points where `h₁₁` is near 0 are rejected.
    #[serde(skip)]
    pub temporal_guard: Option<TemporalMetric>,
    /// Points where `φ` is near-degenerate are rejected.
    #[serde(skip)]
    pub spatial_guard: Option<SpatialMetric>,
}

impl SamplingPlan {
    pub fn new(seed: u64, count: usize) -> SamplingPlan {
        SamplingPlan {
            seed,
            count,
            domain: Domain::default(),
            abs_tol: DEFAULT_TOL,
            rel_tol: DEFAULT_TOL,
            max_retries: 100,
            temporal_guard: None,
            spatial_guard: None,
        }
    }

    pub fn with_domain(mut self, domain: Domain) -> SamplingPlan {
        self.domain = domain;
        self
    }

    pub fn with_tol(mut self, abs_tol: f64, rel_tol: f64) -> SamplingPlan {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_guards(mut self, h: Option<TemporalMetric>, phi: Option<SpatialMetric>) -> SamplingPlan {
        self.temporal_guard = h;
        self.spatial_guard = phi;
        self
    }

    pub fn validate(&self, n: usize) -> Result<(), IdentityError> {
        let bad = |m: &str| Err(IdentityError::InvalidPlan(m.to_string()));
        if self.count == 0 {
            return bad("count must be at least 1");
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.max_retries == 0 {
            return bad("max_retries must be at least 1");
        }
        if self.domain.x.len() != 1 && self.domain.x.len() != n {
            return bad("x ranges must be one interval or one per coordinate");
        }
        let d = &self.domain;
        let ranges = std::iter::once(d.t).chain(d.x.iter().copied()).chain(std::iter::once(d.y));
        for (lo, hi) in ranges {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return bad("domain intervals must be finite with lo <= hi");
            }
        }
        Ok(())
    }

    fn draw(&self, rng: &mut impl Rng, n: usize) -> Point<f64> {
        let mut u = |(lo, hi): (f64, f64)| if lo == hi { lo } else { rng.gen_range(lo..hi) };
        let t = u(self.domain.t);
        let x = (0..n).map(|i| u(self.domain.x_range(i))).collect();
        let y = (0..n).map(|_| u(self.domain.y)).collect();
        Point::new(t, x, y)
    }

    fn admits(&self, p: &Point<f64>) -> bool {
        self.temporal_guard.as_ref().is_none_or(|h| h.admits(p.t))
            && self.spatial_guard.as_ref().is_none_or(|phi| phi.admits(&p.x))
    }

    fn draw_admissible(&self, rng: &mut impl Rng, n: usize, what: &str) -> Result<Point<f64>, IdentityError> {
        for _ in 0..self.max_retries {
            let p = self.draw(rng, n);
            if self.admits(&p) {
                return Ok(p);
            }
        }
        Err(IdentityError::Domain { name: what.to_string(), tries: self.max_retries })
    }

    /// The plan's base points, drawn in order from the seeded stream.
    pub fn points(&self, n: usize) -> Result<Vec<Point<f64>>, IdentityError> {
        self.validate(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.count).map(|_| self.draw_admissible(&mut rng, n, "sampling plan")).collect()
    }

    /// Replacement stream for point `k` of residual `name`.
    fn resample_rng(&self, name: &str, k: usize) -> ChaCha8Rng {
        let mut h = FxHasher::default();
        h.write(name.as_bytes());
        h.write_u64(self.seed);
        h.write_usize(k);
        ChaCha8Rng::seed_from_u64(h.finish())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// A printed identity failed while the general identities passed.
    Suspect,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub components: usize,
    pub points: usize,
    pub max_abs: f64,
    pub max_rel: f64,
    /// Point and component index of the largest scale-relative residual.
    pub worst_point: Option<Point<f64>>,
    pub worst_index: Option<Vec<usize>>,
    /// Points replaced after an evaluation error.
    pub resampled: usize,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArbiterSummary {
    pub general_pass: bool,
    pub suspects: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub count: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub identities: Vec<IdentityReport>,
    pub arbiter: Option<ArbiterSummary>,
}

impl VerificationReport {
    pub fn get(&self, name: &str) -> Option<&IdentityReport> {
        self.identities.iter().find(|r| r.name == name)
    }

    pub fn all_pass(&self) -> bool {
        self.identities.iter().all(|r| r.verdict == Verdict::Pass)
    }

    pub fn has_failure(&self) -> bool {
        self.identities.iter().any(|r| r.verdict == Verdict::Fail)
    }

    pub fn suspects(&self) -> Vec<&str> {
        self.identities.iter().filter(|r| r.verdict == Verdict::Suspect).map(|r| r.name.as_str()).collect()
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.identities.extend(other.identities);
    }
}

/// A point, its per-component `(abs, rel)` residuals, and whether it was resampled.
type Sample = (Point<f64>, Vec<(f64, f64)>, bool);

struct Worst {
    abs: f64,
    rel: f64,
    at: Option<(usize, usize)>,
}

fn evaluate_at(tape: &Tape, m: usize, p: &Point<f64>) -> Option<Vec<(f64, f64)>> {
    let v = tape.eval(p).ok()?;
    Some(
        (0..m)
            .map(|c| {
                let (l, r) = (v[c], v[m + c]);
                let abs = (l - r).abs();
                if abs.is_nan() {
                    (f64::INFINITY, f64::INFINITY)
                } else {
                    (abs, abs / (1.0 + l.abs() + r.abs()))
                }
            })
            .collect(),
    )
}

fn verify_one(r: &ResidualTensor, base: &[Point<f64>], plan: &SamplingPlan) -> Result<IdentityReport, IdentityError> {
    let m = r.len();
    let roots: Vec<_> = r.lhs.iter().chain(&r.rhs).cloned().collect();
    let tape = Tape::new(&roots);
    let n = r.dim;
    let per_point: Vec<Result<Sample, IdentityError>> = base
        .par_iter()
        .enumerate()
        .map(|(k, p)| {
            if let Some(v) = evaluate_at(&tape, m, p) {
                return Ok((p.clone(), v, false));
            }
            let mut rng = plan.resample_rng(&r.name, k);
            for _ in 0..plan.max_retries {
                let q = plan.draw_admissible(&mut rng, n, &r.name)?;
                if let Some(v) = evaluate_at(&tape, m, &q) {
                    return Ok((q, v, true));
                }
            }
            Err(IdentityError::Domain { name: r.name.clone(), tries: plan.max_retries })
        })
        .collect();
    let mut worst = Worst { abs: 0.0, rel: 0.0, at: None };
    let mut points = Vec::with_capacity(base.len());
    let mut resampled = 0;
    for (k, res) in per_point.into_iter().enumerate() {
        let (p, vals, replaced) = res?;
        resampled += replaced as usize;
        for (c, &(abs, rel)) in vals.iter().enumerate() {
            worst.abs = worst.abs.max(abs);
            if rel > worst.rel || (worst.at.is_none() && abs > 0.0) {
                worst.rel = worst.rel.max(rel);
                worst.at = Some((k, c));
            }
        }
        points.push(p);
    }
    let pass = worst.abs <= plan.abs_tol || worst.rel <= plan.rel_tol;
    Ok(IdentityReport {
        name: r.name.clone(),
        components: m,
        points: base.len(),
        max_abs: worst.abs,
        max_rel: worst.rel,
        worst_point: worst.at.map(|(k, _)| points[k].clone()),
        worst_index: worst.at.map(|(_, c)| r.index_of(c)),
        resampled,
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
    })
}

/// Evaluates every residual at the plan's points.
///
/// A residual passes when its largest absolute residual is within
/// `abs_tol` or its largest scale-relative residual
/// `|L − R| / (1 + |L| + |R|)` is within `rel_tol`. Points where a residual
/// fails to evaluate are replaced from a stream keyed by the residual name,
/// so reports are deterministic for a fixed seed.
pub fn verify(residuals: &[ResidualTensor], plan: &SamplingPlan) -> Result<VerificationReport, IdentityError> {
    let n = residuals.first().map_or(1, |r| r.dim);
    let base = plan.points(n)?;
    let identities = residuals.par_iter().map(|r| verify_one(r, &base, plan)).collect::<Result<Vec<_>, _>>()?;
    Ok(VerificationReport {
        seed: plan.seed,
        count: plan.count,
        abs_tol: plan.abs_tol,
        rel_tol: plan.rel_tol,
        identities,
        arbiter: None,
    })
}

/// Marks failing printed Bianchi identities as suspect when both general
/// identities pass. Does nothing when the general identities are absent.
pub fn apply_arbiter(report: &mut VerificationReport) {
    let general: Vec<Verdict> = GENERAL_BIANCHI_NAMES.iter().filter_map(|g| report.get(g).map(|r| r.verdict)).collect();
    if general.len() != GENERAL_BIANCHI_NAMES.len() {
        return;
    }
    let general_pass = general.iter().all(|&v| v == Verdict::Pass);
    let mut suspects = Vec::new();
    for r in report.identities.iter_mut().filter(|r| r.name.starts_with("Bianchi-")) {
        if general_pass && r.verdict == Verdict::Fail {
            r.verdict = Verdict::Suspect;
        }
        if r.verdict == Verdict::Suspect {
            suspects.push(r.name.clone());
        }
    }
    report.arbiter = Some(ArbiterSummary { general_pass, suspects });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dconnect::{DTensor, IndexSlot};
    use crate::symexpr::{parse_expr, Expr};

    fn residual(name: &str, lhs: &str, rhs: &str) -> ResidualTensor {
        let sig = vec![IndexSlot::SpaceLower];
        let l = DTensor::from_fn(sig.clone(), 2, |_| parse_expr(lhs, 2).unwrap());
        let r = DTensor::from_fn(sig, 2, |_| parse_expr(rhs, 2).unwrap());
        ResidualTensor::from_dtensors(name, l, r)
    }

    #[test]
    fn zero_residuals_pass() {
        let plan = SamplingPlan::new(1, 20);
        let rep = verify(&[residual("z", "x1*y2", "y2*x1")], &plan).unwrap();
        let r = &rep.identities[0];
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.max_abs, 0.0);
        assert!(r.worst_point.is_none());
    }

    #[test]
    fn unit_residual_fails_with_point() {
        let plan = SamplingPlan::new(1, 20);
        let rep = verify(&[residual("one", "t + 1", "t")], &plan).unwrap();
        let r = &rep.identities[0];
        assert_eq!(r.verdict, Verdict::Fail);
        assert!((r.max_abs - 1.0).abs() < 1e-12);
        assert!(r.worst_point.is_some());
        assert_eq!(r.worst_index.as_deref(), Some(&[0][..]));
    }

    #[test]
    fn deterministic_report() {
        let plan = SamplingPlan::new(42, 30);
        let res = [residual("a", "sin(x1)*y1", "y1*x1"), residual("b", "log(t)", "0")];
        let a = serde_json::to_string(&verify(&res, &plan).unwrap()).unwrap();
        let b = serde_json::to_string(&verify(&res, &plan).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn evaluation_errors_are_resampled() {
        let plan = SamplingPlan::new(3, 40);
        let rep = verify(&[residual("log", "log(t)", "log(t)")], &plan).unwrap();
        let r = &rep.identities[0];
        assert!(r.resampled > 0);
        assert_eq!(r.verdict, Verdict::Pass);
        let strict = SamplingPlan::new(3, 5).with_domain(Domain { t: (-1.0, -0.5), ..Domain::default() });
        assert!(matches!(verify(&[residual("log", "log(t)", "0")], &strict), Err(IdentityError::Domain { .. })));
    }

    #[test]
    fn guards_reject_points() {
        let phi = SpatialMetric::diagonal(vec![Expr::one(), Expr::x(0).sin().square()]).unwrap();
        let plan = SamplingPlan::new(5, 200).with_guards(None, Some(phi.clone()));
        for p in plan.points(2).unwrap() {
            assert!(phi.admits(&p.x));
        }
    }

    #[test]
    fn invalid_plans() {
        assert!(SamplingPlan::new(0, 0).validate(2).is_err());
        assert!(SamplingPlan::new(0, 1).with_tol(0.0, 1e-8).validate(2).is_err());
    }

    #[test]
    fn arbiter_marks_suspects() {
        let plan = SamplingPlan::new(1, 5);
        let res =
            [residual("Bianchi-03", "1", "0"), residual("GenBianchi-1", "0", "0"), residual("GenBianchi-2", "0", "0")];
        let mut rep = verify(&res, &plan).unwrap();
        apply_arbiter(&mut rep);
        assert_eq!(rep.identities[0].verdict, Verdict::Suspect);
        assert_eq!(rep.suspects(), vec!["Bianchi-03"]);
        let res =
            [residual("Bianchi-03", "1", "0"), residual("GenBianchi-1", "1", "0"), residual("GenBianchi-2", "0", "0")];
        let mut rep = verify(&res, &plan).unwrap();
        apply_arbiter(&mut rep);
        assert_eq!(rep.identities[0].verdict, Verdict::Fail);
        assert!(!rep.arbiter.unwrap().general_pass);
    }
}
