use rustc_hash::FxHashMap;

use crate::dconnect::DTensor;
use crate::symexpr::{Coord, Expr};

use super::metric::{spatial_christoffel, temporal_christoffel, SpatialMetric, TemporalMetric};
use super::GeometryError;

/// Index of an adapted frame element `δ/δt`, `δ/δxⁱ`, or `∂/∂y₁ⁱ` (0-based `i`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FrameIndex {
    Time,
    Space(usize),
    Fiber(usize),
}

impl FrameIndex {
    /// All `1 + 2n` frame indices: time, then spatial, then fiber.
    pub fn all(n: usize) -> Vec<FrameIndex> {
        let mut v = vec![FrameIndex::Time];
        v.extend((0..n).map(FrameIndex::Space));
        v.extend((0..n).map(FrameIndex::Fiber));
        v
    }

    pub fn flat(self, n: usize) -> usize {
        match self {
            FrameIndex::Time => 0,
            FrameIndex::Space(i) => 1 + i,
            FrameIndex::Fiber(i) => 1 + n + i,
        }
    }

    pub fn from_flat(k: usize, n: usize) -> FrameIndex {
        match k {
            0 => FrameIndex::Time,
            k if k <= n => FrameIndex::Space(k - 1),
            k => FrameIndex::Fiber(k - 1 - n),
        }
    }

    /// The coordinate whose partial derivative this frame element starts from.
    pub fn coord(self) -> Coord {
        match self {
            FrameIndex::Time => Coord::Time,
            FrameIndex::Space(i) => Coord::Space(i),
            FrameIndex::Fiber(i) => Coord::Fiber(i),
        }
    }
}

/// A vector field in the coordinate basis `(∂t, ∂x¹..∂xⁿ, ∂y¹..∂yⁿ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    pub coeffs: Vec<Expr>,
}

impl VectorField {
    pub fn zero(n: usize) -> VectorField {
        VectorField { coeffs: vec![Expr::zero(); 1 + 2 * n] }
    }

    fn dim(&self) -> usize {
        (self.coeffs.len() - 1) / 2
    }

    /// Derivation `X(f) = Σ Xᶜ ∂f/∂c`.
    pub fn apply(&self, f: &Expr) -> Expr {
        let n = self.dim();
        Expr::sum(
            self.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| c * f.diff(FrameIndex::from_flat(k, n).coord()))
                .collect(),
        )
    }

    /// Lie bracket `[X, Y]` in coordinates.
    pub fn bracket(&self, other: &VectorField) -> VectorField {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(xc, yc)| (self.apply(yc) - other.apply(xc)).simplify())
            .collect();
        VectorField { coeffs }
    }
}

/// Jet nonlinear connection `Γ = (M⁽ʲ⁾₍₁₎₁, N⁽ʲ⁾₍₁₎ᵢ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonlinearConnection {
    /// `m[j] = M⁽ʲ⁾₍₁₎₁`
    m: Vec<Expr>,
    /// `n[j][i] = N⁽ʲ⁾₍₁₎ᵢ`
    n: Vec<Vec<Expr>>,
}

impl NonlinearConnection {
    pub fn new(m: Vec<Expr>, n: Vec<Vec<Expr>>) -> Result<NonlinearConnection, GeometryError> {
        let d = m.len();
        if d == 0 || n.len() != d || n.iter().any(|r| r.len() != d) {
            return Err(GeometryError::ShapeMismatch(format!(
                "connection needs {d} temporal and {d}x{d} spatial components"
            )));
        }
        let all = Coord::all(d);
        for e in m.iter().chain(n.iter().flatten()) {
            if !e.depends_only_on(&all) {
                return Err(GeometryError::ShapeMismatch(format!(
                    "component `{e}` uses coordinates beyond dimension {d}"
                )));
            }
        }
        Ok(NonlinearConnection { m, n })
    }

    pub fn zero(n: usize) -> NonlinearConnection {
        NonlinearConnection { m: vec![Expr::zero(); n], n: vec![vec![Expr::zero(); n]; n] }
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    /// `M⁽ʲ⁾₍₁₎₁`
    pub fn m(&self, j: usize) -> &Expr {
        &self.m[j]
    }

    /// `N⁽ʲ⁾₍₁₎ᵢ`
    pub fn n(&self, j: usize, i: usize) -> &Expr {
        &self.n[j][i]
    }

    /// `δf/δt = ∂f/∂t − M⁽ʲ⁾ ∂f/∂y₁ʲ`
    pub fn delta_t(&self, f: &Expr) -> Expr {
        let mut terms = vec![f.diff(Coord::Time)];
        for j in 0..self.dim() {
            if !self.m[j].is_zero() && f.depends_on(Coord::Fiber(j)) {
                terms.push(-(&self.m[j] * f.diff(Coord::Fiber(j))));
            }
        }
        Expr::sum(terms)
    }

    /// `δf/δxⁱ = ∂f/∂xⁱ − N⁽ʲ⁾₍₁₎ᵢ ∂f/∂y₁ʲ`
    pub fn delta_x(&self, i: usize, f: &Expr) -> Expr {
        let mut terms = vec![f.diff(Coord::Space(i))];
        for j in 0..self.dim() {
            if !self.n[j][i].is_zero() && f.depends_on(Coord::Fiber(j)) {
                terms.push(-(&self.n[j][i] * f.diff(Coord::Fiber(j))));
            }
        }
        Expr::sum(terms)
    }

    /// Applies the adapted frame element `a` to `f`.
    pub fn frame_derivative(&self, a: FrameIndex, f: &Expr) -> Expr {
        match a {
            FrameIndex::Time => self.delta_t(f),
            FrameIndex::Space(i) => self.delta_x(i, f),
            FrameIndex::Fiber(i) => f.diff(Coord::Fiber(i)),
        }
    }

    /// The adapted frame element `a` in coordinates.
    pub fn frame_field(&self, a: FrameIndex) -> VectorField {
        let n = self.dim();
        let mut v = VectorField::zero(n);
        v.coeffs[a.flat(n)] = Expr::one();
        match a {
            FrameIndex::Time => {
                for j in 0..n {
                    v.coeffs[1 + n + j] = -&self.m[j];
                }
            }
            FrameIndex::Space(i) => {
                for j in 0..n {
                    v.coeffs[1 + n + j] = -&self.n[j][i];
                }
            }
            FrameIndex::Fiber(_) => {}
        }
        v
    }

    /// Coordinate coefficients of the adapted coframe element dual to `a`:
    /// `dt`, `dxⁱ`, or `δy₁ⁱ = dy₁ⁱ + M⁽ⁱ⁾dt + N⁽ⁱ⁾ⱼdxʲ`.
    pub fn coframe(&self, a: FrameIndex) -> Vec<Expr> {
        let n = self.dim();
        let mut w = vec![Expr::zero(); 1 + 2 * n];
        w[a.flat(n)] = Expr::one();
        if let FrameIndex::Fiber(i) = a {
            w[0] = self.m[i].clone();
            w[1..=n].clone_from_slice(&self.n[i]);
        }
        w
    }

    /// `⟨ω, v⟩` for a covector in coordinate coefficients.
    pub fn pair(covector: &[Expr], v: &VectorField) -> Expr {
        Expr::sum(covector.iter().zip(&v.coeffs).filter(|(w, _)| !w.is_zero()).map(|(w, c)| w * c).collect()).simplify()
    }

    /// Components of `v` in the adapted frame, ordered as [`FrameIndex::all`].
    pub fn adapted_components(&self, v: &VectorField) -> Vec<Expr> {
        FrameIndex::all(self.dim()).into_iter().map(|a| Self::pair(&self.coframe(a), v)).collect()
    }

    /// `[X_a, X_b]` expanded in the adapted frame.
    pub fn frame_bracket(&self, a: FrameIndex, b: FrameIndex) -> Vec<Expr> {
        let br = self.frame_field(a).bracket(&self.frame_field(b));
        self.adapted_components(&br)
    }

    /// `R⁽ᵏ⁾₍₁₎ᵢⱼ = δN⁽ᵏ⁾ᵢ/δxʲ − δN⁽ᵏ⁾ⱼ/δxⁱ`, the vertical part of `[δᵢ, δⱼ]`.
    pub fn spatial_curvature(&self, k: usize, i: usize, j: usize) -> Expr {
        (self.delta_x(j, &self.n[k][i]) - self.delta_x(i, &self.n[k][j])).simplify()
    }

    pub fn simplify(&self) -> NonlinearConnection {
        NonlinearConnection {
            m: self.m.iter().map(Expr::simplify).collect(),
            n: self.n.iter().map(|r| r.iter().map(Expr::simplify).collect()).collect(),
        }
    }
}

/// Canonical connection `M̊⁽ʲ⁾ = −κ¹₁₁y₁ʲ`, `N̊⁽ʲ⁾ᵢ = γʲᵢₘy₁ᵐ`.
pub fn canonical_nlc(h: &TemporalMetric, phi: &SpatialMetric) -> NonlinearConnection {
    let kappa = temporal_christoffel(h).kappa.simplify();
    let gamma = spatial_christoffel(phi);
    canonical_from_symbols(&kappa, &gamma)
}

pub(crate) fn canonical_from_symbols(kappa: &Expr, gamma: &DTensor) -> NonlinearConnection {
    let n = gamma.dim();
    let m = (0..n).map(|j| (-(kappa * Expr::y(j))).simplify()).collect();
    let nn = (0..n)
        .map(|j| {
            (0..n).map(|i| Expr::sum((0..n).map(|m| gamma.get(&[j, i, m]) * Expr::y(m)).collect()).simplify()).collect()
        })
        .collect();
    NonlinearConnection { m, n: nn }
}

/// `M⁽ʲ⁾ = 2H⁽ʲ⁾`, `N⁽ʲ⁾₍₁₎ₖ = ∂G⁽ʲ⁾/∂y₁ᵏ`.
pub fn nlc_from_semispray(h: &[Expr], g: &[Expr]) -> Result<NonlinearConnection, GeometryError> {
    let n = h.len();
    if g.len() != n {
        return Err(GeometryError::ShapeMismatch(format!("semispray parts have lengths {} and {}", n, g.len())));
    }
    let m = h.iter().map(|e| (Expr::int(2) * e).simplify()).collect();
    let nn = g.iter().map(|gj| (0..n).map(|k| gj.diff(Coord::Fiber(k)).simplify()).collect()).collect();
    NonlinearConnection::new(m, nn)
}

/// A chart change `t̃ = t̃(t)`, `x̃ = x̃(x)` with caller-supplied inverses.
///
/// Forward maps are written in the old coordinates; inverse maps are written
/// in the new ones, reusing the variable names `t`, `x1`, ….
#[derive(Clone, Debug)]
pub struct CoordinateChange {
    pub t_new: Expr,
    pub t_old: Expr,
    pub x_new: Vec<Expr>,
    pub x_old: Vec<Expr>,
}

impl CoordinateChange {
    pub fn identity(n: usize) -> CoordinateChange {
        let xs: Vec<Expr> = (0..n).map(Expr::x).collect();
        CoordinateChange { t_new: Expr::t(), t_old: Expr::t(), x_new: xs.clone(), x_old: xs }
    }

    /// Old coordinates `(t, x, y)` expressed through the new ones.
    fn old_in_new(&self) -> FxHashMap<Coord, Expr> {
        let n = self.x_new.len();
        // dt̃/dt = 1 / (dt/dt̃), both expressed in the new time
        let dtn_dt = self.t_old.diff(Coord::Time).recip();
        let mut map = FxHashMap::default();
        map.insert(Coord::Time, self.t_old.clone());
        for i in 0..n {
            map.insert(Coord::Space(i), self.x_old[i].clone());
            // y₁ʲ = (∂xʲ/∂x̃ᵏ)(dt̃/dt) ỹ₁ᵏ
            let y = Expr::sum((0..n).map(|k| self.x_old[i].diff(Coord::Space(k)) * Expr::y(k)).collect());
            map.insert(Coord::Fiber(i), (&dtn_dt * y).simplify());
        }
        map
    }
}

/// Transforms `Γ` to the new chart by the transformation rules of its
/// local components, returning the components as functions of the new
/// coordinates.
pub fn nlc_transform(
    gamma: &NonlinearConnection,
    change: &CoordinateChange,
) -> Result<NonlinearConnection, GeometryError> {
    let n = gamma.dim();
    if change.x_new.len() != n || change.x_old.len() != n {
        return Err(GeometryError::ShapeMismatch(format!("coordinate change must have {n} spatial maps")));
    }
    let dtn = change.t_new.diff(Coord::Time).simplify();
    if dtn.is_zero() {
        return Err(GeometryError::NonInvertibleChange);
    }
    let dt_dtn = dtn.recip();
    // J[k][j] = ∂x̃ᵏ/∂xʲ in old coordinates
    let jac: Vec<Vec<Expr>> =
        (0..n).map(|k| (0..n).map(|j| change.x_new[k].diff(Coord::Space(j)).simplify()).collect()).collect();
    // K[i][l] = ∂xⁱ/∂x̃ˡ, taken from the inverse and pulled back to old coordinates
    let to_old: FxHashMap<Coord, Expr> = (0..n).map(|i| (Coord::Space(i), change.x_new[i].clone())).collect();
    let kinv: Vec<Vec<Expr>> = (0..n)
        .map(|i| (0..n).map(|l| change.x_old[i].diff(Coord::Space(l)).substitute(&to_old).simplify()).collect())
        .collect();
    // ỹ₁ᵏ as a function of old coordinates
    let ytil: Vec<Expr> =
        (0..n).map(|k| (&dt_dtn * Expr::sum((0..n).map(|j| &jac[k][j] * Expr::y(j)).collect())).simplify()).collect();
    let dt2 = dt_dtn.square();
    let mut m = Vec::with_capacity(n);
    for k in 0..n {
        let mut terms: Vec<Expr> = (0..n).map(|j| gamma.m(j) * &dt2 * &jac[k][j]).collect();
        terms.push(-(&dt_dtn * ytil[k].diff(Coord::Time)));
        m.push(Expr::sum(terms));
    }
    let mut nn = vec![Vec::with_capacity(n); n];
    for (k, row) in nn.iter_mut().enumerate() {
        for l in 0..n {
            let mut terms = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    terms.push(gamma.n(j, i) * &dt_dtn * &kinv[i][l] * &jac[k][j]);
                }
                terms.push(-(&kinv[i][l] * ytil[k].diff(Coord::Space(i))));
            }
            row.push(Expr::sum(terms));
        }
    }
    let back = change.old_in_new();
    let m = m.into_iter().map(|e| e.substitute(&back).simplify()).collect();
    let nn = nn.into_iter().map(|r| r.into_iter().map(|e| e.substitute(&back).simplify()).collect()).collect();
    Ok(NonlinearConnection { m, n: nn })
}
