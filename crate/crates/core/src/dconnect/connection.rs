use crate::geometry::{
    canonical_from_symbols, spatial_christoffel, temporal_christoffel, NonlinearConnection, SpatialMetric,
    TemporalMetric,
};
use crate::symexpr::{Expr, Point};

use super::{DConnectError, DTensor, IndexSlot, SlotKind};
use IndexSlot::*;

/// Which frame direction a connection family differentiates along.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// `δ/δt`, the `/1` derivative.
    Temporal,
    /// `δ/δxᵖ`, the `|p` derivative.
    Spatial,
    /// `∂/∂y₁ᵖ`, the `|(p)` derivative.
    Vertical,
}

impl Direction {
    pub const ALL: [Direction; 3] = [Direction::Temporal, Direction::Spatial, Direction::Vertical];

    /// The lower slot a derivative in this direction appends.
    pub fn slot(self) -> IndexSlot {
        match self {
            Direction::Temporal => TimeLower,
            Direction::Spatial => SpaceLower,
            Direction::Vertical => FiberLower,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Temporal => "hR",
            Direction::Spatial => "hM",
            Direction::Vertical => "v",
        }
    }
}

/// Extra data carried by an h-normal connection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HNormalInfo {
    pub h: TemporalMetric,
    pub kappa: Expr,
}

/// A Γ-linear connection by its nine adapted component families.
///
/// Every family is stored as a three-slot [`DTensor`] `[upper, lower, direction]`:
///
/// | family | signature | meaning |
/// |---|---|---|
/// | `g_bar` | `[TU, TL, TL]` | `Ḡ¹₁₁` |
/// | `g` | `[SU, SL, TL]` | `Gᵏᵢ₁` |
/// | `gv` | `[FU, FL, TL]` | `G⁽ᵏ⁾⁽¹⁾₍₁₎₍ᵢ₎₁` |
/// | `l_bar` | `[TU, TL, SL]` | `L̄¹₁ⱼ` |
/// | `l` | `[SU, SL, SL]` | `Lᵏᵢⱼ` |
/// | `lv` | `[FU, FL, SL]` | `L⁽ᵏ⁾⁽¹⁾₍₁₎₍ᵢ₎ⱼ` |
/// | `c_bar` | `[TU, TL, FL]` | `C̄¹⁽¹⁾₁₍ₖ₎` |
/// | `c` | `[SU, SL, FL]` | `Cᵏ⁽¹⁾ᵢ₍ⱼ₎` |
/// | `cv` | `[FU, FL, FL]` | `C⁽ᵏ⁾⁽¹⁾⁽¹⁾₍₁₎₍ᵢ₎₍ⱼ₎` |
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaConnection {
    nlc: NonlinearConnection,
    families: [DTensor; 9],
    h_normal: Option<HNormalInfo>,
    cartan: bool,
}

const SIGNATURES: [[IndexSlot; 3]; 9] = [
    [TimeUpper, TimeLower, TimeLower],
    [SpaceUpper, SpaceLower, TimeLower],
    [FiberUpper, FiberLower, TimeLower],
    [TimeUpper, TimeLower, SpaceLower],
    [SpaceUpper, SpaceLower, SpaceLower],
    [FiberUpper, FiberLower, SpaceLower],
    [TimeUpper, TimeLower, FiberLower],
    [SpaceUpper, SpaceLower, FiberLower],
    [FiberUpper, FiberLower, FiberLower],
];

const FAMILY_NAMES: [&str; 9] = ["G_bar", "G", "Gv", "L_bar", "L", "Lv", "C_bar", "C", "Cv"];

fn family_index(dir: Direction, kind: SlotKind) -> usize {
    let d = match dir {
        Direction::Temporal => 0,
        Direction::Spatial => 3,
        Direction::Vertical => 6,
    };
    let k = match kind {
        SlotKind::Time => 0,
        SlotKind::Space => 1,
        SlotKind::Fiber => 2,
    };
    d + k
}

impl GammaConnection {
    /// A general Γ-linear connection. Families are given in the order of the
    /// table on [`GammaConnection`].
    pub fn new(nlc: NonlinearConnection, families: [DTensor; 9]) -> Result<GammaConnection, DConnectError> {
        let n = nlc.dim();
        for (k, f) in families.iter().enumerate() {
            if f.signature() != SIGNATURES[k] || f.dim() != n {
                return Err(DConnectError::Signature(format!(
                    "family {} must have signature {:?} in dimension {n}",
                    FAMILY_NAMES[k], SIGNATURES[k]
                )));
            }
        }
        Ok(GammaConnection { nlc, families, h_normal: None, cartan: false })
    }

    /// The zero connection over `nlc`.
    pub fn zero(nlc: NonlinearConnection) -> GammaConnection {
        let n = nlc.dim();
        let families = SIGNATURES.map(|s| DTensor::zeros(s.to_vec(), n));
        GammaConnection { nlc, families, h_normal: None, cartan: false }
    }

    pub fn dim(&self) -> usize {
        self.nlc.dim()
    }

    pub fn nlc(&self) -> &NonlinearConnection {
        &self.nlc
    }

    pub fn families(&self) -> &[DTensor; 9] {
        &self.families
    }

    pub fn family_names() -> [&'static str; 9] {
        FAMILY_NAMES
    }

    /// The family that corrects a slot of `kind` in direction `dir`.
    pub fn family(&self, dir: Direction, kind: SlotKind) -> &DTensor {
        &self.families[family_index(dir, kind)]
    }

    pub fn family_mut(&mut self, dir: Direction, kind: SlotKind) -> &mut DTensor {
        &mut self.families[family_index(dir, kind)]
    }

    pub fn h_normal(&self) -> Option<&HNormalInfo> {
        self.h_normal.as_ref()
    }

    pub fn is_cartan(&self) -> bool {
        self.cartan
    }

    /// `Ḡ¹₁₁`
    pub fn g_bar(&self) -> &Expr {
        self.families[0].get(&[0, 0, 0])
    }

    /// `Gᵏᵢ₁`
    pub fn g(&self, k: usize, i: usize) -> &Expr {
        self.families[1].get(&[k, i, 0])
    }

    /// `G⁽ᵏ⁾⁽¹⁾₍₁₎₍ᵢ₎₁`
    pub fn gv(&self, k: usize, i: usize) -> &Expr {
        self.families[2].get(&[k, i, 0])
    }

    /// `L̄¹₁ⱼ`
    pub fn l_bar(&self, j: usize) -> &Expr {
        self.families[3].get(&[0, 0, j])
    }

    /// `Lᵏᵢⱼ`
    pub fn l(&self, k: usize, i: usize, j: usize) -> &Expr {
        self.families[4].get(&[k, i, j])
    }

    /// `L⁽ᵏ⁾⁽¹⁾₍₁₎₍ᵢ₎ⱼ`
    pub fn lv(&self, k: usize, i: usize, j: usize) -> &Expr {
        self.families[5].get(&[k, i, j])
    }

    /// `C̄¹⁽¹⁾₁₍ₖ₎`
    pub fn c_bar(&self, k: usize) -> &Expr {
        self.families[6].get(&[0, 0, k])
    }

    /// `Cᵏ⁽¹⁾ᵢ₍ⱼ₎`
    pub fn c(&self, k: usize, i: usize, j: usize) -> &Expr {
        self.families[7].get(&[k, i, j])
    }

    /// `C⁽ᵏ⁾⁽¹⁾⁽¹⁾₍₁₎₍ᵢ₎₍ⱼ₎`
    pub fn cv(&self, k: usize, i: usize, j: usize) -> &Expr {
        self.families[8].get(&[k, i, j])
    }

    /// Ensures the connection was built as h-normal.
    pub fn require_h_normal(&self) -> Result<&HNormalInfo, DConnectError> {
        self.h_normal.as_ref().ok_or(DConnectError::NotHNormal)
    }
}

/// The four effective components `(κ¹₁₁, Gᵏᵢ₁, Lᵏᵢⱼ, Cᵏᵢ₍ⱼ₎)` of an
/// h-normal connection, with `κ` taken from `h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HNormalData {
    pub h: TemporalMetric,
    pub kappa: Expr,
    /// `[SU, SL, TL]`
    pub g: DTensor,
    /// `[SU, SL, SL]`
    pub l: DTensor,
    /// `[SU, SL, FL]`
    pub c: DTensor,
}

impl HNormalData {
    pub fn new(h: TemporalMetric, g: DTensor, l: DTensor, c: DTensor) -> Result<HNormalData, DConnectError> {
        let n = l.dim();
        let checks = [(&g, SIGNATURES[1], "G"), (&l, SIGNATURES[4], "L"), (&c, SIGNATURES[7], "C")];
        for (t, sig, name) in checks {
            if t.signature() != sig || t.dim() != n {
                return Err(DConnectError::Signature(format!("{name} must have signature {sig:?} in dimension {n}")));
            }
        }
        let kappa = temporal_christoffel(&h).kappa.simplify();
        Ok(HNormalData { h, kappa, g, l, c })
    }

    pub fn dim(&self) -> usize {
        self.l.dim()
    }
}

const PROBES: usize = 20;

/// Checks `F[k][i][j] = F[k][j][i]` symbolically, falling back to numeric
/// probes when simplification does not settle it.
fn check_symmetric(f: &DTensor, family: &'static str) -> Result<(), DConnectError> {
    let n = f.dim();
    let probes = probe_points(n);
    for k in 0..n {
        for i in 0..n {
            for j in i + 1..n {
                let a = f.get(&[k, i, j]);
                let b = f.get(&[k, j, i]);
                if (a - b).simplify().is_zero() {
                    continue;
                }
                let agree = probes.iter().all(|p| match (a.eval::<f64>(p), b.eval::<f64>(p)) {
                    (Ok(x), Ok(y)) => (x - y).abs() <= 1e-12 * (1.0 + x.abs() + y.abs()),
                    (Err(_), Err(_)) => true,
                    _ => false,
                });
                if !agree {
                    return Err(DConnectError::NotCartan { family, k, i, j });
                }
            }
        }
    }
    Ok(())
}

/// Fixed, irregular probe points in `(0.1, 1.1)`; deterministic so that
/// construction never depends on a seed.
fn probe_points(n: usize) -> Vec<Point<f64>> {
    (0..PROBES)
        .map(|s| {
            let v = |k: usize| 0.1 + ((s * 7919 + k * 104_729 + 13) % 1000) as f64 / 1000.0;
            Point::new(v(0), (0..n).map(|i| v(1 + i)).collect(), (0..n).map(|i| v(1 + n + i)).collect())
        })
        .collect()
}

/// Builds the h-normal connection of Cartan type from its four effective
/// components: `Ḡ = κ`, `L̄ = 0`, `C̄ = 0`, `G⁽ᵏ⁾ᵢ = Gᵏᵢ − δᵏᵢκ`,
/// `L⁽ᵏ⁾ᵢⱼ = Lᵏᵢⱼ`, `C⁽ᵏ⁾ᵢⱼ = Cᵏᵢⱼ`.
pub fn make_h_normal_cartan(data: HNormalData, nlc: NonlinearConnection) -> Result<GammaConnection, DConnectError> {
    let n = data.dim();
    if nlc.dim() != n {
        return Err(DConnectError::Signature(format!(
            "connection data has dimension {n}, nonlinear connection {}",
            nlc.dim()
        )));
    }
    check_symmetric(&data.l, "L")?;
    check_symmetric(&data.c, "C")?;
    let kappa = data.kappa.clone();
    let g_bar = DTensor::from_vec(SIGNATURES[0].to_vec(), n, vec![kappa.clone()]);
    let gv = DTensor::from_fn(SIGNATURES[2].to_vec(), n, |ix| {
        let g = data.g.get(ix);
        if ix[0] == ix[1] {
            (g - &kappa).simplify()
        } else {
            g.clone()
        }
    });
    let relabel = |t: &DTensor, k: usize| DTensor::from_vec(SIGNATURES[k].to_vec(), n, t.components().to_vec());
    let families = [
        g_bar,
        data.g.clone(),
        gv,
        DTensor::zeros(SIGNATURES[3].to_vec(), n),
        data.l.clone(),
        relabel(&data.l, 5),
        DTensor::zeros(SIGNATURES[6].to_vec(), n),
        data.c.clone(),
        relabel(&data.c, 8),
    ];
    Ok(GammaConnection { nlc, families, h_normal: Some(HNormalInfo { h: data.h, kappa }), cartan: true })
}

/// The Berwald connection `(κ, 0, γ, 0)` over the canonical nonlinear connection.
pub fn berwald(h: &TemporalMetric, phi: &SpatialMetric) -> GammaConnection {
    let n = phi.dim();
    let kappa = temporal_christoffel(h).kappa.simplify();
    let gamma = spatial_christoffel(phi);
    let nlc = canonical_from_symbols(&kappa, &gamma);
    let data = HNormalData {
        h: h.clone(),
        kappa,
        g: DTensor::zeros(SIGNATURES[1].to_vec(), n),
        l: gamma,
        c: DTensor::zeros(SIGNATURES[7].to_vec(), n),
    };
    make_h_normal_cartan(data, nlc).expect("Christoffel symbols are symmetric")
}

/// The h-normalization d-tensor `J⁽ⁱ⁾₍₁₎₁ⱼ = h₁₁δⁱⱼ`, signature `[FU, TL, SL]`.
pub fn h_normalization(h: &TemporalMetric, n: usize) -> DTensor {
    DTensor::from_fn(vec![FiberUpper, TimeLower, SpaceLower], n, |ix| {
        if ix[0] == ix[2] {
            h.h11().clone()
        } else {
            Expr::zero()
        }
    })
}
