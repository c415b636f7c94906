use crate::dconnect::{DTensor, IndexSlot};
use crate::symexpr::{Coord, Expr, Point};

use super::GeometryError;

/// Below this, a sample point counts as degenerate for a metric.
pub const DEGENERACY_GUARD: f64 = 1e-6;

/// Largest spatial dimension the adjugate inverse supports.
pub const MAX_METRIC_DIM: usize = 4;

/// Riemannian metric `h₁₁(t)` on the time axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemporalMetric {
    h11: Expr,
}

impl TemporalMetric {
    pub fn new(h11: Expr) -> Result<TemporalMetric, GeometryError> {
        if !h11.depends_only_on(&[Coord::Time]) {
            return Err(GeometryError::TemporalMetricNotInT(h11.to_string()));
        }
        Ok(TemporalMetric { h11 })
    }

    pub fn flat() -> TemporalMetric {
        TemporalMetric { h11: Expr::one() }
    }

    pub fn h11(&self) -> &Expr {
        &self.h11
    }

    /// Whether `t` is a usable sample: `h₁₁(t)` finite and above the guard.
    pub fn admits(&self, t: f64) -> bool {
        let p = Point::new(t, Vec::new(), Vec::new());
        matches!(self.h11.eval(&p), Ok(v) if v.is_finite() && v > DEGENERACY_GUARD)
    }
}

/// Riemannian metric `φᵢⱼ(x)` on the spatial manifold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpatialMetric {
    phi: Vec<Vec<Expr>>,
}

impl SpatialMetric {
    pub fn new(phi: Vec<Vec<Expr>>) -> Result<SpatialMetric, GeometryError> {
        let n = phi.len();
        if n == 0 {
            return Err(GeometryError::EmptyMetric);
        }
        if n > MAX_METRIC_DIM {
            return Err(GeometryError::DimensionTooLarge(n));
        }
        if phi.iter().any(|row| row.len() != n) {
            return Err(GeometryError::ShapeMismatch(format!("metric must be {n}x{n}")));
        }
        let spatial: Vec<Coord> = (0..n).map(Coord::Space).collect();
        for i in 0..n {
            for j in 0..n {
                if !phi[i][j].depends_only_on(&spatial) {
                    return Err(GeometryError::SpatialMetricNotInX { i, j });
                }
                if j > i && phi[i][j].simplify() != phi[j][i].simplify() {
                    return Err(GeometryError::NotSymmetric { i, j });
                }
            }
        }
        Ok(SpatialMetric { phi })
    }

    /// Completes a metric from its lower triangle (`lower[i]` has `i + 1` entries).
    pub fn from_lower(lower: Vec<Vec<Expr>>) -> Result<SpatialMetric, GeometryError> {
        let n = lower.len();
        for (i, row) in lower.iter().enumerate() {
            if row.len() != i + 1 {
                return Err(GeometryError::ShapeMismatch(format!(
                    "row {} of the lower triangle needs {} entries",
                    i + 1,
                    i + 1
                )));
            }
        }
        let phi = (0..n).map(|i| (0..n).map(|j| lower[i.max(j)][i.min(j)].clone()).collect()).collect();
        SpatialMetric::new(phi)
    }

    pub fn identity(n: usize) -> SpatialMetric {
        let phi = (0..n).map(|i| (0..n).map(|j| if i == j { Expr::one() } else { Expr::zero() }).collect()).collect();
        SpatialMetric { phi }
    }

    pub fn diagonal(d: Vec<Expr>) -> Result<SpatialMetric, GeometryError> {
        let n = d.len();
        let phi = (0..n).map(|i| (0..n).map(|j| if i == j { d[i].clone() } else { Expr::zero() }).collect()).collect();
        SpatialMetric::new(phi)
    }

    pub fn dim(&self) -> usize {
        self.phi.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        &self.phi[i][j]
    }

    pub fn rows(&self) -> &[Vec<Expr>] {
        &self.phi
    }

    /// Whether `x` is a usable sample: all leading minors positive and
    /// `|det φ|` above the guard.
    pub fn admits(&self, x: &[f64]) -> bool {
        let n = self.dim();
        let p = Point::new(0.0, x.to_vec(), vec![0.0; n]);
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                match self.phi[i][j].eval(&p) {
                    Ok(v) if v.is_finite() => m[i][j] = v,
                    _ => return false,
                }
            }
        }
        let minors = leading_minors(&m);
        minors.iter().all(|&d| d > 0.0) && minors[n - 1].abs() >= DEGENERACY_GUARD
    }
}

/// Leading principal minors via Gaussian elimination without pivoting; a
/// non-positive pivot means the matrix is not positive-definite, and the
/// remaining minors are reported as zero.
fn leading_minors(m: &[Vec<f64>]) -> Vec<f64> {
    let n = m.len();
    let mut a = m.to_vec();
    let mut out = vec![0.0; n];
    let mut det = 1.0;
    for k in 0..n {
        let piv = a[k][k];
        if piv <= 0.0 || !piv.is_finite() {
            return out;
        }
        det *= piv;
        out[k] = det;
        for i in k + 1..n {
            let f = a[i][k] / piv;
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    out
}

/// Temporal Christoffel symbol and its first-kind counterpart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemporalChristoffel {
    /// `κ¹₁₁ = (h¹¹/2)·dh₁₁/dt`
    pub kappa: Expr,
    /// `κ₁₁₁ = κ¹₁₁·h₁₁`
    pub first_kind: Expr,
}

pub fn temporal_christoffel(h: &TemporalMetric) -> TemporalChristoffel {
    let dh = h.h11.diff(Coord::Time);
    let kappa = Expr::product(vec![Expr::ratio(1, 2), h.h11.recip(), dh]);
    let first_kind = &kappa * &h.h11;
    TemporalChristoffel { kappa, first_kind }
}

/// Symbolic determinant by cofactor expansion along the first row.
fn det(m: &[Vec<Expr>]) -> Expr {
    match m.len() {
        0 => Expr::one(),
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        n => Expr::sum(
            (0..n)
                .filter(|&j| !m[0][j].is_zero())
                .map(|j| {
                    let c = &m[0][j] * det(&minor(m, 0, j));
                    if j % 2 == 0 {
                        c
                    } else {
                        -c
                    }
                })
                .collect(),
        ),
    }
}

fn minor(m: &[Vec<Expr>], row: usize, col: usize) -> Vec<Vec<Expr>> {
    m.iter()
        .enumerate()
        .filter(|&(i, _)| i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|&(j, _)| j != col).map(|(_, e)| e.clone()).collect())
        .collect()
}

/// `φⁱʲ` as adjugate over determinant.
pub fn inverse_spatial_metric(phi: &SpatialMetric) -> Vec<Vec<Expr>> {
    let m = &phi.phi;
    let n = m.len();
    let inv_det = det(m).recip();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    // adj[i][j] = (-1)^(i+j) · minor(j, i)
                    let c = det(&minor(m, j, i));
                    let c = if (i + j) % 2 == 0 { c } else { -c };
                    (c * &inv_det).simplify()
                })
                .collect()
        })
        .collect()
}

/// `γⁱⱼₖ`, signature `[SpaceUpper, SpaceLower, SpaceLower]`.
pub fn spatial_christoffel(phi: &SpatialMetric) -> DTensor {
    let n = phi.dim();
    let inv = inverse_spatial_metric(phi);
    let m = &phi.phi;
    let d = |a: &Expr, k: usize| a.diff(Coord::Space(k));
    // first-kind symbols Γ_{jk,m} = ½(∂ₖφⱼₘ + ∂ⱼφₖₘ − ∂ₘφⱼₖ)
    let mut first = vec![vec![vec![Expr::zero(); n]; n]; n];
    for j in 0..n {
        for k in j..n {
            for l in 0..n {
                let v = (Expr::ratio(1, 2) * (d(&m[j][l], k) + d(&m[k][l], j) - d(&m[j][k], l))).simplify();
                first[j][k][l] = v.clone();
                first[k][j][l] = v;
            }
        }
    }
    let mut g = DTensor::zeros(vec![IndexSlot::SpaceUpper, IndexSlot::SpaceLower, IndexSlot::SpaceLower], n);
    for i in 0..n {
        for j in 0..n {
            for k in j..n {
                let v = Expr::sum((0..n).map(|l| &inv[i][l] * &first[j][k][l]).collect()).simplify();
                g.set(&[i, k, j], v.clone());
                g.set(&[i, j, k], v);
            }
        }
    }
    g
}

/// Classical curvature `𝔯ˡᵢⱼₖ` of the spatial metric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpatialRiemann {
    /// Signature `[SpaceUpper, SpaceLower, SpaceLower, SpaceLower]`.
    pub r: DTensor,
}

impl SpatialRiemann {
    pub fn get(&self, l: usize, i: usize, j: usize, k: usize) -> &Expr {
        self.r.get(&[l, i, j, k])
    }
}

/// `𝔯ˡᵢⱼₖ = ∂ₖγˡᵢⱼ − ∂ⱼγˡᵢₖ + γʳᵢⱼγˡᵣₖ − γʳᵢₖγˡᵣⱼ`.
///
/// With this ordering the Berwald curvature satisfies `Rˡᵢⱼₖ = 𝔯ˡᵢⱼₖ`, and
/// on the unit sphere `𝔯¹₂₂₁ = sin²x¹`.
pub fn spatial_riemann(phi: &SpatialMetric) -> SpatialRiemann {
    riemann_from_christoffel(&spatial_christoffel(phi))
}

pub fn riemann_from_christoffel(gamma: &DTensor) -> SpatialRiemann {
    let n = gamma.dim();
    let g = |a: usize, b: usize, c: usize| gamma.get(&[a, b, c]);
    let mut r = DTensor::zeros(
        vec![IndexSlot::SpaceUpper, IndexSlot::SpaceLower, IndexSlot::SpaceLower, IndexSlot::SpaceLower],
        n,
    );
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in j + 1..n {
                    let mut terms = vec![g(l, i, j).diff(Coord::Space(k)), -g(l, i, k).diff(Coord::Space(j))];
                    for s in 0..n {
                        terms.push(g(s, i, j) * g(l, s, k));
                        terms.push(-(g(s, i, k) * g(l, s, j)));
                    }
                    let v = Expr::sum(terms).simplify();
                    r.set(&[l, i, k, j], (-&v).simplify());
                    r.set(&[l, i, j, k], v);
                }
            }
        }
    }
    SpatialRiemann { r }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse_expr;

    fn sphere() -> SpatialMetric {
        SpatialMetric::diagonal(vec![Expr::one(), Expr::x(0).sin().square()]).unwrap()
    }

    #[test]
    fn kappa_examples() {
        assert!(temporal_christoffel(&TemporalMetric::flat()).kappa.is_zero());
        let h = TemporalMetric::new(parse_expr("exp(2*t)", 1).unwrap()).unwrap();
        assert_eq!(temporal_christoffel(&h).kappa.simplify(), Expr::one());
        let h = TemporalMetric::new(parse_expr("t^2", 1).unwrap()).unwrap();
        let tc = temporal_christoffel(&h);
        assert_eq!(tc.kappa.simplify(), Expr::t().recip());
        assert_eq!(tc.first_kind.simplify(), Expr::t());
    }

    #[test]
    fn rejects_bad_metrics() {
        assert!(matches!(TemporalMetric::new(Expr::x(0)), Err(GeometryError::TemporalMetricNotInT(_))));
        let asym = vec![vec![Expr::one(), Expr::x(0)], vec![Expr::zero(), Expr::one()]];
        assert_eq!(SpatialMetric::new(asym), Err(GeometryError::NotSymmetric { i: 0, j: 1 }));
        let in_t = vec![vec![Expr::t()]];
        assert_eq!(SpatialMetric::new(in_t), Err(GeometryError::SpatialMetricNotInX { i: 0, j: 0 }));
        assert_eq!(SpatialMetric::new(vec![vec![Expr::one(); 5]; 5]), Err(GeometryError::DimensionTooLarge(5)));
    }

    #[test]
    fn sphere_christoffel() {
        let g = spatial_christoffel(&sphere());
        let s = Expr::x(0).sin();
        let c = Expr::x(0).cos();
        assert_eq!(*g.get(&[0, 1, 1]), (-(&s * &c)).simplify());
        assert_eq!(*g.get(&[1, 0, 1]), (&c / &s).simplify());
        assert_eq!(*g.get(&[1, 1, 0]), (&c / &s).simplify());
        assert!(g.get(&[0, 0, 0]).is_zero());
    }

    #[test]
    fn inverse_of_diagonal() {
        let inv = inverse_spatial_metric(&sphere());
        assert_eq!(inv[0][0], Expr::one());
        assert_eq!(inv[1][1], Expr::x(0).sin().powi(-2));
        assert!(inv[0][1].is_zero());
        let id = inverse_spatial_metric(&SpatialMetric::identity(3));
        for (i, row) in id.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                assert_eq!(*e, if i == j { Expr::one() } else { Expr::zero() });
            }
        }
    }

    #[test]
    fn sphere_gauss_curvature() {
        let r = spatial_riemann(&sphere());
        // sectional curvature 𝔯¹₂₂₁ / φ₂₂
        let k = (r.get(0, 1, 1, 0) / Expr::x(0).sin().square()).simplify();
        for x in [0.3, 1.0, 2.2] {
            let p = Point::new(0.0, vec![x, 0.5], vec![0.0, 0.0]);
            assert!((k.eval::<f64>(&p).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(r.get(0, 1, 0, 0).is_zero());
    }

    #[test]
    fn admits_guards() {
        assert!(!sphere().admits(&[0.0, 0.0]));
        assert!(sphere().admits(&[1.0, 0.0]));
        let h = TemporalMetric::new(parse_expr("t^2", 1).unwrap()).unwrap();
        assert!(!h.admits(0.0));
        assert!(h.admits(0.5));
        let indefinite = SpatialMetric::diagonal(vec![Expr::one(), Expr::int(-1)]).unwrap();
        assert!(!indefinite.admits(&[0.0, 0.0]));
    }
}
