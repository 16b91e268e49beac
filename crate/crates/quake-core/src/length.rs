//! Anchor points, circuit loops and the total length functional.
//!
//! Two leaves spiralling into a boundary with opposite senses intersect
//! infinitely often; among the intersections there is a canonical first one
//! `p_0` such that consecutive intersection pairs bound loops isotopic to
//! the boundary. In the normalized half-plane chart (boundary lift on the
//! imaginary axis with holonomy `z ↦ e^b z`, incoming leaf on `1 + iℝ`) the
//! intersections are `p_k = 1 + i√(e^{bk} cos⁻²φ − 1)` with
//! `tanh d(p_k, ∂) = e^{−bk/2} cos φ`, `φ = arg p_0`. The implementation
//! works chart-free: the outgoing leaf's lift is selected among the
//! translates under the boundary holonomy as the marginal one that crosses
//! the incoming lift while its previous translate does not.
//!
//! A circuit of spiralling leaves picks one anchor `p^{[i]} = p_1` per
//! junction; the loop `ρ` runs along the leaves between consecutive anchors
//! and the circuit's length term is
//! `L = ω(ℓ(ρ) + 2 log Π_i cosh d(p^{[i]}, D_i))`. Truncating at level `k`
//! instead of `1` shifts the value by `(k−1)·ω·B` with `B = Σ_i ℓ(D_i)`, the
//! strongest internal consistency check of this module. The total functional
//! of a balanced tuple adds the classical weighted length of the compact
//! part to the circuit terms of its deterministic decomposition.

use crate::circuital::{weight_to_f64, Circuit, Decomposition};
use crate::lamination::{
    realize_leaf, BoundaryLift, LaminationError, LaminationTuple, Leaf, LeafId,
    MeasuredLamination, RealizedKind, SpiralSign,
};
use crate::minkowski::{HPoint, Isometry, OrientedGeodesic};
use crate::surface::{HolonomyRep, SurfaceError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LengthError {
    #[error("anchor level must be at least 1, got {0}")]
    LevelTooSmall(usize),
    #[error("leaves do not spiral into the junction boundary with opposite senses")]
    SensesNotOpposite,
    #[error("marginal translate search failed within ±{0} steps")]
    MarginalSearchFailed(i64),
    #[error("leaf lifts failed to intersect at anchor level {0}")]
    MissingIntersection(usize),
    #[error("circuit references a missing or non-spiralling leaf {0:?}")]
    BadCircuitLeaf(LeafId),
    #[error("lamination has spiralling leaves where a compact one is required")]
    NotCompact,
    #[error(transparent)]
    Lamination(#[from] LaminationError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// An anchor point of a junction: the level-`k` intersection of the incoming
/// and outgoing leaves near the boundary, evaluated in the normalized
/// half-plane chart (boundary lift on the imaginary axis, incoming leaf on
/// `1 + iℝ`) and mapped back.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpiralAnchor {
    pub boundary: usize,
    pub level: usize,
    /// The lift `p_k` in the working chain position.
    pub point: HPoint,
    /// Distance `d_k` to the boundary lift, `tanh d_k = e^{−bk/2} cos φ`.
    pub distance: f64,
    /// `φ = arg p_0` of the normalized chart, `cos φ = tanh d_0`.
    pub phi: f64,
    /// Imaginary part of `p_k` in the chart, `√(e^{bk} cos⁻²φ − 1)`.
    pub chart_im: f64,
    /// Length of the junction boundary component.
    pub boundary_length: f64,
}

impl SpiralAnchor {
    /// Residual of the closed form `tanh d_k = e^{−bk/2} cos φ`.
    pub fn distance_identity_residual(&self) -> f64 {
        (self.distance.tanh()
            - (-self.boundary_length * self.level as f64 / 2.0).exp() * self.phi.cos())
        .abs()
    }
}

/// The loop of a circuit at a truncation level: one anchor per junction, the
/// geodesic arcs between consecutive anchors along the leaves, and their
/// total length.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircuitLoop {
    pub level: usize,
    pub anchors: Vec<SpiralAnchor>,
    pub arc_lengths: Vec<f64>,
    pub rho_length: f64,
}

/// The length terms of one circuit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircuitTerm {
    pub omega: f64,
    pub rho_length: f64,
    /// `2 Σ_i log cosh d(p^{[i]}, D_i)`.
    pub correction: f64,
    /// `B = Σ_i ℓ(D_i)` over the circuit's junctions (with multiplicity).
    pub boundary_sum: f64,
    pub anchors: Vec<SpiralAnchor>,
}

impl CircuitTerm {
    /// `L = ω(ℓ(ρ) + correction)`.
    pub fn value(&self) -> f64 {
        self.omega * (self.rho_length + self.correction)
    }
}

/// The value of the total length functional with its per-part terms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LengthBreakdown {
    pub total: f64,
    /// Classical weighted length of the compact part.
    pub compact: f64,
    pub circuits: Vec<CircuitTerm>,
    /// Sum of the circuits' junction boundary lengths.
    pub boundary_sum: f64,
    pub decomposition_hash: String,
}

impl LengthBreakdown {
    /// Residual of `total = compact + Σ circuit values`.
    pub fn consistency_residual(&self) -> f64 {
        (self.total - self.compact - self.circuits.iter().map(|c| c.value()).sum::<f64>()).abs()
    }
}

/// Classical length of a compact lamination, `Σ ω ℓ(word)`.
pub fn compact_length(rep: &HolonomyRep, lam: &MeasuredLamination) -> Result<f64, LengthError> {
    let mut total = 0.0;
    for leaf in &lam.leaves {
        match leaf {
            Leaf::Closed { word, weight } => total += weight * rep.curve_length(word)?,
            Leaf::Spiral { .. } => return Err(LengthError::NotCompact),
        }
    }
    Ok(total)
}

/// A leaf as traversed by a circuit: geodesic oriented circuit-wise with the
/// circuit-start and circuit-end boundary lifts.
#[derive(Debug, Clone)]
struct OrientedSpiral {
    geodesic: OrientedGeodesic,
    start: BoundaryLift,
    end: BoundaryLift,
}

fn translate_lift(l: &BoundaryLift, g: &Isometry) -> BoundaryLift {
    BoundaryLift {
        boundary: l.boundary,
        sign: l.sign,
        holonomy: g.mul(&l.holonomy).mul(&g.inverse()),
        axis: g.apply_geodesic(l.axis),
        frame: g.mul(&l.frame),
    }
}

fn translate_spiral(s: &OrientedSpiral, g: &Isometry) -> OrientedSpiral {
    OrientedSpiral {
        geodesic: g.apply_geodesic(s.geodesic),
        start: translate_lift(&s.start, g),
        end: translate_lift(&s.end, g),
    }
}

fn oriented_spiral(
    rep: &HolonomyRep,
    id: LeafId,
    leaf: &Leaf,
    reversed: bool,
) -> Result<OrientedSpiral, LengthError> {
    if !leaf.is_spiral() {
        return Err(LengthError::BadCircuitLeaf(id));
    }
    let realized = realize_leaf(rep, id, leaf)?;
    let RealizedKind::Spiral { start, end } = realized.kind else { unreachable!() };
    if reversed {
        Ok(OrientedSpiral { geodesic: realized.geodesic.reversed(), start: end, end: start })
    } else {
        Ok(OrientedSpiral { geodesic: realized.geodesic, start, end })
    }
}

fn power(g: &Isometry, n: i64) -> Isometry {
    let step = if n >= 0 { g.half_plane } else { g.half_plane.inverse() };
    let mut out = crate::minkowski::Mat2::IDENTITY;
    for _ in 0..n.abs() {
        out = step.mul(&out).renormalize();
    }
    Isometry::from_mat2(out)
}

/// The normalizing chart of a junction: an isometry (possibly composed with
/// the mirror `z ↦ −z̄`) taking the junction boundary lift to the imaginary
/// axis with the holonomy `z ↦ e^b z` and the incoming leaf to `1 + iℝ`.
struct JunctionChart {
    /// Orientation-preserving part, mapping `(z_m, z_l) ↦ (0, ∞)` and the
    /// incoming leaf's far endpoint to `±1`.
    forward: crate::minkowski::Mat2,
    /// Whether the mirror is applied after `forward`.
    mirror: bool,
}

impl JunctionChart {
    /// Orientation-preserving Möbius with `p ↦ 0`, `q ↦ ∞` for distinct
    /// boundary coordinates (`None` is ∞).
    fn to_zero_infinity(p: Option<f64>, q: Option<f64>) -> crate::minkowski::Mat2 {
        use crate::minkowski::Mat2;
        match (p, q) {
            (Some(p), Some(q)) => {
                if q > p {
                    Mat2::new(-1.0, p, 1.0, -q)
                } else {
                    Mat2::new(1.0, -p, 1.0, -q)
                }
            }
            (Some(p), None) => Mat2::new(1.0, -p, 0.0, 1.0),
            (None, Some(q)) => Mat2::new(0.0, -1.0, 1.0, -q),
            (None, None) => Mat2::IDENTITY,
        }
    }

    fn build(z_m: Option<f64>, z_l: Option<f64>, u_l: Option<f64>) -> Option<JunctionChart> {
        use crate::minkowski::Mat2;
        let m0 = Self::to_zero_infinity(z_m, z_l);
        let x = m0.apply_boundary(u_l)?;
        if x == 0.0 || !x.is_finite() {
            return None;
        }
        let s = x.abs().sqrt();
        let scale = Mat2::new(1.0 / s, 0.0, 0.0, s);
        Some(JunctionChart { forward: scale.mul(&m0), mirror: x < 0.0 })
    }

    fn boundary_coordinate(&self, u: Option<f64>) -> Option<f64> {
        let c = self.forward.apply_boundary(u);
        match (c, self.mirror) {
            (Some(c), true) => Some(-c),
            (c, _) => c,
        }
    }

    /// Maps a chart point back to the surface picture.
    fn point_back(&self, re: f64, im: f64) -> HPoint {
        let re = if self.mirror { -re } else { re };
        let (gre, gim) = self.forward.inverse().apply_half_plane(re, im);
        HPoint::from_half_plane(gre, gim).expect("chart preserves the upper half-plane")
    }
}

/// One junction between two leaves in their canonical realizations.
/// Translates the outgoing leaf's canonical lift by the deck element
/// matching its start boundary lift with the incoming end boundary lift,
/// selects the marginal translate under the boundary holonomy (crossing the
/// incoming lift now, not one step back), and evaluates the anchors
/// `p_0 … p_level` by the closed forms of the normalized chart.
///
/// Returns the anchors (expressed in the incoming leaf's frame) and the
/// transition deck element mapping the outgoing leaf's canonical frame into
/// the incoming one: the level anchor lies on `transition · canonical(out)`.
/// Working per junction in canonical frames keeps every computation at
/// bounded coordinates regardless of the chain length.
fn junction_step(
    rep: &HolonomyRep,
    incoming: &OrientedSpiral,
    outgoing: &OrientedSpiral,
    level: usize,
) -> Result<(Vec<SpiralAnchor>, Isometry), LengthError> {
    if incoming.end.boundary != outgoing.start.boundary
        || incoming.end.sign != outgoing.start.sign.opposite()
    {
        return Err(LengthError::SensesNotOpposite);
    }
    let boundary = incoming.end.boundary;
    let b = rep.curve_length(&rep.boundary_words[boundary])?;

    // deck element matching the two boundary lifts (a product of group
    // elements, hence a group element: translated lifts stay genuine lifts)
    let carrier = incoming.end.frame.mul(&outgoing.start.frame.inverse());
    let moved_geodesic = carrier.apply_geodesic(outgoing.geodesic);

    // γ translating toward the incoming leaf's shared fixed point: its
    // attracting fixed point is the incoming endpoint
    let gamma = match incoming.end.sign {
        SpiralSign::Plus => incoming.end.holonomy,
        SpiralSign::Minus => incoming.end.holonomy.inverse(),
    };

    // chart data: boundary lift endpoints and the leaves' far endpoints
    let gamma_axis = gamma
        .axis()
        .ok_or(LengthError::Lamination(LaminationError::BadBoundaryHolonomy))?;
    let (z_m_pt, z_l_pt) = gamma_axis.endpoints(); // repelling → attracting
    let z_m = z_m_pt.boundary_coordinate();
    let z_l = z_l_pt.boundary_coordinate();
    let (in_start, _in_end) = incoming.geodesic.endpoints();
    let u_l = in_start.boundary_coordinate();
    let (_m_start, m_end) = moved_geodesic.endpoints();
    let u_m = m_end.boundary_coordinate();

    let chart =
        JunctionChart::build(z_m, z_l, u_l).ok_or(LengthError::MissingIntersection(0))?;
    let r0 = chart.boundary_coordinate(u_m).ok_or(LengthError::MissingIntersection(0))?;
    if !(r0 > 0.0) {
        return Err(LengthError::MissingIntersection(0));
    }

    // marginal translate: smallest k* with e^{b k*} r0 > 1
    let mut k_star = (-r0.ln() / b).floor() as i64 + 1;
    // guard against the exact-boundary rounding case
    while (b * (k_star as f64 - 1.0)) + r0.ln() > 0.0 {
        k_star -= 1;
    }
    while (b * k_star as f64) + r0.ln() <= 0.0 {
        k_star += 1;
    }
    if k_star.abs() > 1_000 {
        return Err(LengthError::MarginalSearchFailed(k_star));
    }

    let log_r = |k: i64| b * k as f64 + r0.ln(); // ln R_k, R_k = e^{bk} r0
    let mut anchors = Vec::with_capacity(level + 1);
    // cos φ = R_0^{−1/2}
    let phi = (-0.5 * log_r(k_star)).exp().clamp(-1.0, 1.0).acos();
    for k in 0..=level {
        let lr = log_r(k_star + k as i64);
        let r = lr.exp();
        let chart_im = (r - 1.0).max(0.0).sqrt();
        let distance = (-0.5 * lr).exp().atanh();
        let point = chart.point_back(1.0, chart_im);
        anchors.push(SpiralAnchor {
            boundary,
            level: k,
            point,
            distance,
            phi,
            chart_im,
            boundary_length: b,
        });
    }
    let transition = power(&gamma, k_star + level as i64).mul(&carrier);
    Ok((anchors, transition))
}

/// The anchors of two leaves spiralling into a common boundary with opposite
/// senses: `p_0 … p_level` (the level-`k` anchor is the last entry; `p_0` is
/// included for diagnostics). The incoming leaf's lift is its canonical
/// realization; the outgoing lift is selected among the boundary-holonomy
/// translates.
pub fn anchor_point(
    rep: &HolonomyRep,
    incoming: &Leaf,
    outgoing: &Leaf,
    level: usize,
) -> Result<Vec<SpiralAnchor>, LengthError> {
    if level < 1 {
        return Err(LengthError::LevelTooSmall(level));
    }
    let l = oriented_spiral(rep, LeafId { lamination: 0, leaf: 0 }, incoming, false)?;
    let m = oriented_spiral(rep, LeafId { lamination: 0, leaf: 1 }, outgoing, false)?;
    let (anchors, _) = junction_step(rep, &l, &m, level)?;
    Ok(anchors)
}

/// The loop `ρ_k` of a circuit. Junction `i` (between the circuit leaves
/// `i` and `i+1`, cyclically) is evaluated in leaf `i`'s canonical frame,
/// producing the anchor `q_i` on leaf `i` and the transition `T_i` that
/// places leaf `i+1`'s canonical frame into leaf `i`'s. The arc along leaf
/// `i` connects the pullback `T_{i−1}⁻¹ q_{i−1}` with `q_i`, both on the
/// canonical lift of leaf `i`; since a leaf lift maps bijectively onto the
/// leaf, this is the surface arc between the two anchors.
pub fn circuit_loop(
    rep: &HolonomyRep,
    tuple: &LaminationTuple,
    circuit: &Circuit,
    level: usize,
) -> Result<CircuitLoop, LengthError> {
    if level < 1 {
        return Err(LengthError::LevelTooSmall(level));
    }
    let leaves: Vec<OrientedSpiral> = circuit
        .edges
        .iter()
        .map(|(id, rev)| {
            let leaf = tuple
                .laminations
                .get(id.lamination)
                .and_then(|l| l.leaves.get(id.leaf))
                .ok_or(LengthError::BadCircuitLeaf(*id))?;
            oriented_spiral(rep, *id, leaf, *rev)
        })
        .collect::<Result<_, _>>()?;
    let count = leaves.len();

    let mut anchors: Vec<SpiralAnchor> = Vec::with_capacity(count);
    let mut transitions: Vec<Isometry> = Vec::with_capacity(count);
    for i in 0..count {
        let (junction, transition) =
            junction_step(rep, &leaves[i], &leaves[(i + 1) % count], level)?;
        anchors.push(junction[level].clone());
        transitions.push(transition);
    }
    // arc along leaf i: from junction i−1's anchor (pulled into leaf i's
    // frame) to junction i's anchor
    let arc_lengths: Vec<f64> = (0..count)
        .map(|i| {
            let prev = (i + count - 1) % count;
            let pulled = transitions[prev].inverse().apply_point(anchors[prev].point);
            pulled.distance(anchors[i].point)
        })
        .collect();
    let rho_length = arc_lengths.iter().sum();
    Ok(CircuitLoop { level, anchors, arc_lengths, rho_length })
}

/// The length term of a circuit at truncation level `k`:
/// `L_k = ω ℓ(ρ_k) + 2ω Σ_i log cosh d(p_k^{[i]}, D_i)`; level 1 is the
/// circuit's length `L`.
pub fn circuit_length(
    rep: &HolonomyRep,
    tuple: &LaminationTuple,
    circuit: &Circuit,
    level: usize,
) -> Result<CircuitTerm, LengthError> {
    let loop_k = circuit_loop(rep, tuple, circuit, level)?;
    let correction = 2.0 * loop_k.anchors.iter().map(|a| a.distance.cosh().ln()).sum::<f64>();
    let boundary_sum = loop_k.anchors.iter().map(|a| a.boundary_length).sum();
    Ok(CircuitTerm {
        omega: weight_to_f64(&circuit.weight),
        rho_length: loop_k.rho_length,
        correction,
        boundary_sum,
        anchors: loop_k.anchors,
    })
}

/// The total length functional of a balanced tuple over its decomposition:
/// the compact part contributes its classical weighted length, each circuit
/// its loop length plus anchor-distance correction. The value depends on the
/// decomposition, whose content hash is recorded in the output.
pub fn total_length(
    rep: &HolonomyRep,
    tuple: &LaminationTuple,
    decomposition: &Decomposition,
) -> Result<LengthBreakdown, LengthError> {
    let mut compact = 0.0;
    for lam in &decomposition.compact {
        compact += compact_length(rep, lam)?;
    }
    let mut circuits = Vec::with_capacity(decomposition.circuits.len());
    for c in &decomposition.circuits {
        circuits.push(circuit_length(rep, tuple, c, 1)?);
    }
    let total = compact + circuits.iter().map(|c| c.value()).sum::<f64>();
    let boundary_sum = circuits.iter().map(|c| c.boundary_sum).sum();
    Ok(LengthBreakdown {
        total,
        compact,
        circuits,
        boundary_sum,
        decomposition_hash: decomposition.content_hash(),
    })
}
