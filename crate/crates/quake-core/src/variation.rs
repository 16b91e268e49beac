//! First and second order variation machinery: intersection enumeration,
//! cosine sums, infinitesimal earthquake cocycles, the polygonal-chain
//! derivative, boundary frames, second-order coefficient identities, and
//! finite-difference oracles.
//!
//! Intersection enumeration translates a leaf lift over the deck group and
//! keeps the translates crossing a fundamental window of the test curve's
//! axis. Completeness rests on the collar trapping property: a closed
//! geodesic never enters the boundary collars, so all of its intersections
//! with a spiralling leaf happen on the leaf's compact non-collar core, and
//! only translates bringing that bounded core within reach of the bounded
//! window can contribute. The breadth-first search over reduced words stops
//! once every frontier translate is separated from the window by more than
//! the reach plus a safety margin; exceeding the depth cap is reported as an
//! error, never silently truncated.

use crate::lamination::{
    LaminationError, LaminationTuple, LeafId, MeasuredLamination, RealizedKind, RealizedLeaf,
};
use crate::minkowski::{
    angle_ccw_mod_pi, cross, inner, HPoint, Isometry, MinkowskiVector, OrientedGeodesic,
};
use crate::surface::{collar_width, HolonomyRep, SurfaceError};
use crate::words::{Letter, Word};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VariationError {
    #[error("translate search exceeded the word-length bound {bound} ({found} crossings found so far)")]
    SearchBoundExceeded { bound: usize, found: usize },
    #[error("test curve is not hyperbolic")]
    CurveNotHyperbolic,
    #[error("test curve is peripheral")]
    PeripheralCurve,
    #[error(
        "degenerate tangential intersection (|cos| = {0}); perturb the metric or the curve"
    )]
    DegenerateTangency(f64),
    #[error("base point lies on a leaf lift (distance {0:.2e})")]
    BasePointOnLeaf(f64),
    #[error("chain needs at least two points")]
    ChainTooShort,
    #[error("consecutive chain points coincide at index {0}")]
    CoincidentPoints(usize),
    #[error("velocity {0} is not tangent (⟨q, q̇⟩ = {1:.2e})")]
    NotTangent(usize, f64),
    #[error("normal vector is not unit spacelike (⟨n,n⟩ = {0})")]
    NotUnitNormal(f64),
    #[error("frame normalization ⟨ξ,ζ⟩ = −1 violated (got {0})")]
    BadFrameNormalization(f64),
    #[error("intersection normal is tangent to the reference geodesic")]
    DegenerateConfiguration,
    #[error("non-finite sample in finite-difference stencil")]
    NonFiniteSample,
    #[error(transparent)]
    Lamination(#[from] LaminationError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

// ---------------------------------------------------------------------------
// finite differences
// ---------------------------------------------------------------------------

/// A finite-difference value with an error estimate from step halving.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdResult {
    pub value: f64,
    pub error_estimate: f64,
}

fn stencil_first(f: &mut dyn FnMut(f64) -> f64, t0: f64, h: f64) -> f64 {
    (-f(t0 + 2.0 * h) + 8.0 * f(t0 + h) - 8.0 * f(t0 - h) + f(t0 - 2.0 * h)) / (12.0 * h)
}

fn stencil_second(f: &mut dyn FnMut(f64) -> f64, t0: f64, h: f64) -> f64 {
    (-f(t0 + 2.0 * h) + 16.0 * f(t0 + h) - 30.0 * f(t0) + 16.0 * f(t0 - h) - f(t0 - 2.0 * h))
        / (12.0 * h * h)
}

/// Fourth-order central first derivative.
pub fn fd_derivative(
    mut f: impl FnMut(f64) -> f64,
    t0: f64,
    step: f64,
) -> Result<FdResult, VariationError> {
    let full = stencil_first(&mut f, t0, step);
    let half = stencil_first(&mut f, t0, step / 2.0);
    if !full.is_finite() || !half.is_finite() {
        return Err(VariationError::NonFiniteSample);
    }
    Ok(FdResult { value: half, error_estimate: (full - half).abs() })
}

/// Fourth-order central second derivative.
pub fn fd_second(
    mut f: impl FnMut(f64) -> f64,
    t0: f64,
    step: f64,
) -> Result<FdResult, VariationError> {
    let full = stencil_second(&mut f, t0, step);
    let half = stencil_second(&mut f, t0, step / 2.0);
    if !full.is_finite() || !half.is_finite() {
        return Err(VariationError::NonFiniteSample);
    }
    Ok(FdResult { value: half, error_estimate: (full - half).abs() })
}

// ---------------------------------------------------------------------------
// translate enumeration
// ---------------------------------------------------------------------------

/// A bounded window of a complete geodesic, parametrized by arclength from
/// `anchor` in the direction of travel.
#[derive(Debug, Clone)]
pub struct Segment {
    pub geodesic: OrientedGeodesic,
    pub anchor: HPoint,
    pub lo: f64,
    pub hi: f64,
    /// Periodic windows accept crossings with parameter in `[lo, hi)` (one
    /// fundamental period); aperiodic ones accept `[lo − slack, hi + slack]`.
    pub periodic: bool,
}

impl Segment {
    pub fn midpoint(&self) -> HPoint {
        self.geodesic.point_at(self.anchor, 0.5 * (self.lo + self.hi))
    }

    pub fn half_length(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }
}

/// A crossing of a probe translate with the target window.
#[derive(Debug, Clone)]
pub struct RawCrossing {
    /// Arclength parameter on the target.
    pub target_param: f64,
    /// Arclength parameter on the translated probe.
    pub probe_param: f64,
    pub point: HPoint,
    /// The translated probe geodesic through the crossing.
    pub probe_geodesic: OrientedGeodesic,
    /// The translating deck word.
    pub word: Word,
}

#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    pub max_depth: usize,
    /// Enlargement of probe windows and reach, absorbing rounding.
    pub slack: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { max_depth: 42, slack: 0.2 }
    }
}

/// Enumerates crossings of deck translates of `probe` with the `target`
/// window, breadth-first over reduced words with a receding-and-out-of-reach
/// pruning rule. Completeness is certified by frontier exhaustion; hitting
/// the depth cap is an error.
pub fn enumerate_crossings(
    rep: &HolonomyRep,
    target: &Segment,
    probe: &Segment,
    cfg: &SearchConfig,
) -> Result<Vec<RawCrossing>, VariationError> {
    if target.is_empty() || probe.is_empty() {
        return Ok(Vec::new());
    }
    let reach = target.half_length() + probe.half_length() + cfg.slack;
    let tmid = target.midpoint();
    let pmid = probe.midpoint();

    // rough distance of a translated point, robust for far translates where
    // exact renormalization loses the hyperboloid constraint
    let rough_dist = |iso: &Isometry, p: HPoint, q: HPoint| -> f64 {
        let c = -inner(iso.hyperboloid.apply(p.vector()), q.vector());
        if c <= 1.0 {
            0.0
        } else {
            c.acosh()
        }
    };

    let steps: Vec<(Letter, Isometry)> = (0..rep.generators.len())
        .flat_map(|g| {
            [
                (Letter { generator: g, inverse: false }, rep.generators[g]),
                (Letter { generator: g, inverse: true }, rep.generators[g].inverse()),
            ]
        })
        .collect();
    let step_max = steps
        .iter()
        .map(|(_, iso)| rough_dist(iso, pmid, pmid))
        .fold(0.0f64, f64::max);
    let escape = reach + 2.0 * step_max.max(1.0);

    struct Node {
        word: Word,
        iso: Isometry,
        dist: f64,
    }
    let mut out: Vec<RawCrossing> = Vec::new();
    let mut frontier = vec![Node {
        word: Word::identity(),
        iso: Isometry::IDENTITY,
        dist: tmid.distance(pmid),
    }];

    let mut depth = 0;
    loop {
        for node in &frontier {
            if node.dist <= reach {
                collect_crossing(target, probe, node.iso, &node.word, cfg.slack, &mut out);
            }
        }
        if depth >= cfg.max_depth {
            return Err(VariationError::SearchBoundExceeded {
                bound: cfg.max_depth,
                found: out.len(),
            });
        }
        let mut next = Vec::new();
        for node in &frontier {
            let last = node.word.letters().last().copied();
            for (letter, iso) in &steps {
                if last == Some(letter.inverted()) {
                    continue; // keep words reduced
                }
                let w = node.word.concat(&Word::from_letters([*letter]));
                let g = node.iso.mul(iso);
                let d = rough_dist(&g, pmid, tmid);
                // receding and already beyond escape: no descendant can return
                if d > escape && d >= node.dist {
                    continue;
                }
                next.push(Node { word: w, iso: g, dist: d });
            }
        }
        if next.is_empty() {
            break; // frontier exhausted: enumeration certified complete
        }
        frontier = next;
        depth += 1;
    }

    // deduplicate surface points seen through stabilizer cosets
    out.sort_by(|a, b| {
        a.target_param
            .partial_cmp(&b.target_param)
            .expect("finite")
            .then(a.probe_param.partial_cmp(&b.probe_param).expect("finite"))
    });
    out.dedup_by(|a, b| (a.target_param - b.target_param).abs() < 1e-9);
    Ok(out)
}

fn collect_crossing(
    target: &Segment,
    probe: &Segment,
    iso: Isometry,
    word: &Word,
    slack: f64,
    out: &mut Vec<RawCrossing>,
) {
    let moved = iso.apply_geodesic(probe.geodesic);
    let Some((point, _)) = target.geodesic.intersect(moved) else {
        return;
    };
    let s = target.geodesic.arc_parameter(target.anchor, point);
    let accept_target = if target.periodic {
        s >= target.lo && s < target.hi
    } else {
        s >= target.lo - slack && s <= target.hi + slack
    };
    if !accept_target {
        return;
    }
    let moved_anchor = iso.apply_point(probe.anchor);
    let t = moved.arc_parameter(moved_anchor, point);
    let accept_probe = if probe.periodic {
        // closed probes: any parameter represents a surface point of the leaf
        true
    } else {
        t >= probe.lo - slack && t <= probe.hi + slack
    };
    if !accept_probe {
        return;
    }
    out.push(RawCrossing {
        target_param: s,
        probe_param: t,
        point,
        probe_geodesic: moved,
        word: word.clone(),
    });
}

// ---------------------------------------------------------------------------
// leaf tracks and intersection data
// ---------------------------------------------------------------------------

/// The bounded search window of a realized leaf: one period for a closed
/// leaf, the non-collar core for a spiralling one.
pub fn leaf_segment(rep: &HolonomyRep, leaf: &RealizedLeaf) -> Result<Segment, VariationError> {
    let g = leaf.geodesic;
    let anchor = g.reference_point();
    match &leaf.kind {
        RealizedKind::Closed { length, .. } => Ok(Segment {
            geodesic: g,
            anchor,
            lo: 0.0,
            hi: *length,
            periodic: true,
        }),
        RealizedKind::Spiral { start, end } => {
            let tangent = g.forward_tangent_at(anchor);
            // distance to a boundary lift along the leaf: ⟨x(t), n⟩ =
            // A e^t + B e^{-t}; the coefficient of the growing mode vanishes
            // at the shared ideal endpoint
            let b_start = rep.curve_length(&rep.boundary_words[start.boundary])?;
            let b_end = rep.curve_length(&rep.boundary_words[end.boundary])?;
            let eps_start = collar_width(b_start)?;
            let eps_end = collar_width(b_end)?;

            let (alpha_s, beta_s) =
                (inner(anchor.vector(), start.axis.normal()), inner(tangent, start.axis.normal()));
            // start end lives at t → −∞: e^{-t} coefficient ~ 0
            let a_s = 0.5 * (alpha_s + beta_s);
            let lo = (eps_start.sinh() / a_s.abs().max(1e-300)).ln();

            let (alpha_e, beta_e) =
                (inner(anchor.vector(), end.axis.normal()), inner(tangent, end.axis.normal()));
            // end lives at t → +∞: e^{t} coefficient ~ 0
            let b_e = 0.5 * (alpha_e - beta_e);
            let hi = (b_e.abs().max(1e-300) / eps_end.sinh()).ln();

            Ok(Segment { geodesic: g, anchor, lo, hi, periodic: false })
        }
    }
}

/// Fundamental window of a closed test curve: one translation period of its
/// axis.
pub fn curve_segment(rep: &HolonomyRep, word: &Word) -> Result<Segment, VariationError> {
    let hol = rep.evaluate(word);
    let axis = hol.axis().ok_or(VariationError::CurveNotHyperbolic)?;
    let length = hol.translation_length().expect("hyperbolic");
    Ok(Segment { geodesic: axis, anchor: axis.reference_point(), lo: 0.0, hi: length, periodic: true })
}

fn check_non_peripheral(rep: &HolonomyRep, word: &Word) -> Result<(), VariationError> {
    let peripheral = rep.boundary_words.iter().any(|b| {
        word.is_power_of(b) || word.is_power_of(&b.inverse()) || word.inverse().is_power_of(b)
    });
    if peripheral {
        Err(VariationError::PeripheralCurve)
    } else {
        Ok(())
    }
}

/// One transverse intersection of the test curve with a leaf.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntersectionDatum {
    /// Lift of the surface intersection point.
    pub point: HPoint,
    /// Cosine of the angle measured counterclockwise from the leaf to the
    /// test curve.
    pub cos_theta: f64,
    pub leaf: LeafId,
    pub weight: f64,
    /// Position along the fundamental window of the test curve.
    pub curve_param: f64,
}

/// Enumerates all transverse intersections of the closed geodesic of `word`
/// with every leaf of the lamination, one representative per surface
/// intersection, ordered along the curve.
pub fn enumerate_intersections(
    rep: &HolonomyRep,
    word: &Word,
    lamination: &MeasuredLamination,
    lamination_index: usize,
) -> Result<Vec<IntersectionDatum>, VariationError> {
    check_non_peripheral(rep, word)?;
    let target = curve_segment(rep, word)?;
    let cfg = SearchConfig::default();
    let mut data = Vec::new();
    for (k, leaf) in lamination.leaves.iter().enumerate() {
        let id = LeafId { lamination: lamination_index, leaf: k };
        let realized = crate::lamination::realize_leaf(rep, id, leaf)?;
        let probe = leaf_segment(rep, &realized)?;
        for crossing in enumerate_crossings(rep, &target, &probe, &cfg)? {
            let u = crossing.probe_geodesic.forward_tangent_at(crossing.point);
            let w = target.geodesic.forward_tangent_at(crossing.point);
            let (cos_theta, sin_theta) = angle_ccw_mod_pi(crossing.point, u, w);
            if sin_theta < 1e-9 {
                return Err(VariationError::DegenerateTangency(cos_theta.abs()));
            }
            data.push(IntersectionDatum {
                point: crossing.point,
                cos_theta,
                leaf: id,
                weight: realized.weight,
                curve_param: crossing.target_param,
            });
        }
    }
    data.sort_by(|a, b| {
        a.curve_param
            .partial_cmp(&b.curve_param)
            .expect("finite")
            .then(a.leaf.cmp(&b.leaf))
    });
    Ok(data)
}

/// The cosine sum `Σ_n Σ_x ω cos θ_{(leaf, γ)}(x)`: the first derivative of
/// the total length functional of the tuple along the left earthquake in the
/// closed curve `γ`.
pub fn kerckhoff_sum(
    rep: &HolonomyRep,
    tuple: &LaminationTuple,
    word: &Word,
) -> Result<f64, VariationError> {
    let mut sum = 0.0;
    for (n, lam) in tuple.laminations.iter().enumerate() {
        for datum in enumerate_intersections(rep, word, lam, n)? {
            sum += datum.weight * datum.cos_theta;
        }
    }
    Ok(sum)
}

// ---------------------------------------------------------------------------
// infinitesimal earthquake cocycles
// ---------------------------------------------------------------------------

/// A map from the generators to the Lie algebra (as vectors of ℝ^{2,1}),
/// extended to words by the twisted sum `e(uv) = e(u) + Ad(h(u)) e(v)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cocycle {
    pub generator_images: Vec<MinkowskiVector>,
}

impl Cocycle {
    pub fn zero(generator_count: usize) -> Cocycle {
        Cocycle { generator_images: vec![MinkowskiVector::ZERO; generator_count] }
    }

    pub fn evaluate(&self, rep: &HolonomyRep, w: &Word) -> MinkowskiVector {
        let mut acc = MinkowskiVector::ZERO;
        let mut prefix = Isometry::IDENTITY;
        for l in w.letters() {
            let (v, step) = if l.inverse {
                let inv = rep.generators[l.generator].inverse();
                (inv.apply_vector(self.generator_images[l.generator]).scale(-1.0), inv)
            } else {
                (self.generator_images[l.generator], rep.generators[l.generator])
            };
            acc = acc.add(prefix.apply_vector(v));
            prefix = prefix.mul(&step);
        }
        acc
    }

    pub fn add(&self, other: &Cocycle) -> Cocycle {
        Cocycle {
            generator_images: self
                .generator_images
                .iter()
                .zip(&other.generator_images)
                .map(|(a, b)| a.add(*b))
                .collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Cocycle {
        Cocycle { generator_images: self.generator_images.iter().map(|v| v.scale(c)).collect() }
    }

    /// Residual of the cocycle condition on a word pair,
    /// `‖e(w1 w2) − e(w1) − Ad(h(w1)) e(w2)‖_∞`.
    pub fn condition_residual(&self, rep: &HolonomyRep, w1: &Word, w2: &Word) -> f64 {
        let lhs = self.evaluate(rep, &w1.concat(w2));
        let rhs = self.evaluate(rep, w1).add(rep.evaluate(w1).apply_vector(self.evaluate(rep, w2)));
        lhs.sub(rhs).sup_norm()
    }

    /// Sup over generators of `‖e(g)‖_∞`.
    pub fn sup_norm(&self) -> f64 {
        self.generator_images.iter().map(|v| v.sup_norm()).fold(0.0, f64::max)
    }
}

/// The infinitesimal left earthquake along a lamination, as the cocycle
/// `γ ↦ Σ ω·v(r)` over the leaf lifts `r` crossing the arc from the base
/// point to its `γ`-image. Each crossed lift is oriented so that the base
/// point lies on its left; under the identification of the Lie algebra with
/// ℝ^{2,1} the generator `v(r)` is then the lift's unit normal.
pub fn infinitesimal_cocycle(
    rep: &HolonomyRep,
    lamination: &MeasuredLamination,
    lamination_index: usize,
    base: HPoint,
) -> Result<Cocycle, VariationError> {
    let cfg = SearchConfig::default();
    let realized: Vec<RealizedLeaf> = lamination
        .leaves
        .iter()
        .enumerate()
        .map(|(k, leaf)| {
            crate::lamination::realize_leaf(
                rep,
                LeafId { lamination: lamination_index, leaf: k },
                leaf,
            )
        })
        .collect::<Result<_, _>>()?;
    let mut images = Vec::with_capacity(rep.generators.len());
    for g in 0..rep.generators.len() {
        let image = rep.generators[g].apply_point(base);
        let mut acc = MinkowskiVector::ZERO;
        if base.distance(image) < 1e-12 {
            images.push(acc);
            continue;
        }
        let segment = Segment {
            geodesic: OrientedGeodesic::from_spacelike(cross(
                base.vector(),
                image.vector(),
            ))
            .map_err(|_| VariationError::DegenerateConfiguration)?,
            anchor: base,
            lo: 0.0,
            hi: base.distance(image),
            periodic: false,
        };
        for leaf in &realized {
            let probe = leaf_segment(rep, leaf)?;
            // spiralling tails inside the collars never cross the compact
            // base arc when the base point stays outside the collars; the
            // core window is the sound search region, as for closed curves
            for crossing in enumerate_crossings(rep, &segment, &probe, &cfg)? {
                // strict interior of the arc
                if crossing.target_param <= 1e-12
                    || crossing.target_param >= segment.hi - 1e-12
                {
                    return Err(VariationError::BasePointOnLeaf(
                        crossing.target_param.min(segment.hi - crossing.target_param),
                    ));
                }
                let mut n = crossing.probe_geodesic.normal();
                let side = inner(base.vector(), n);
                if side.abs() < 1e-10 {
                    return Err(VariationError::BasePointOnLeaf(side.abs()));
                }
                if side > 0.0 {
                    n = n.scale(-1.0); // orient so the base point is on the left
                }
                acc = acc.add(n.scale(leaf.weight));
            }
        }
        images.push(acc);
    }
    Ok(Cocycle { generator_images: images })
}

/// Cocycle of a whole tuple: the sum of the per-lamination cocycles with a
/// common base point.
pub fn tuple_cocycle(
    rep: &HolonomyRep,
    tuple: &LaminationTuple,
    base: HPoint,
) -> Result<Cocycle, VariationError> {
    let mut total = Cocycle::zero(rep.generators.len());
    for (n, lam) in tuple.laminations.iter().enumerate() {
        total = total.add(&infinitesimal_cocycle(rep, lam, n, base)?);
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// polygonal chain derivative
// ---------------------------------------------------------------------------

/// First variation of the length of an open polygonal geodesic chain with
/// moving vertices: per segment `[q_m, q_{m+1}]` the contribution is
/// `⟨q̇_m, w_m⁺⟩ + ⟨q̇_{m+1}, w_{m+1}⁻⟩`, where `w_m⁺` and `w_{m+1}⁻` are the
/// negatives of the inward unit tangents of the segment at its endpoints.
pub fn chain_length_derivative(
    points: &[HPoint],
    velocities: &[MinkowskiVector],
) -> Result<f64, VariationError> {
    if points.len() < 2 || points.len() != velocities.len() {
        return Err(VariationError::ChainTooShort);
    }
    for (i, (q, v)) in points.iter().zip(velocities).enumerate() {
        let t = inner(q.vector(), *v);
        if t.abs() > 1e-9 * (1.0 + v.sup_norm()) * (1.0 + q.vector().sup_norm()) {
            return Err(VariationError::NotTangent(i, t));
        }
    }
    let mut d = 0.0;
    for m in 0..points.len() - 1 {
        let (q, qn) = (points[m], points[m + 1]);
        if q.distance(qn) < 1e-12 {
            return Err(VariationError::CoincidentPoints(m));
        }
        let w_plus = q.direction_to(qn).scale(-1.0);
        let w_minus = qn.direction_to(q).scale(-1.0);
        d += inner(velocities[m], w_plus) + inner(velocities[m + 1], w_minus);
    }
    Ok(d)
}

/// Length of a polygonal chain, the finite-difference counterpart of
/// [`chain_length_derivative`].
pub fn chain_length(points: &[HPoint]) -> f64 {
    points.windows(2).map(|w| w[0].distance(w[1])).sum()
}

// ---------------------------------------------------------------------------
// boundary frame
// ---------------------------------------------------------------------------

/// The frame attached to a point and an oriented boundary geodesic: the two
/// null directions `z± = p − (sinh d) n ± p ⊠ n` toward the boundary's ideal
/// endpoints and the unit tangents
/// `w± = −((sinh²d) p + (sinh d) n ∓ p ⊠ n)/cosh²d` pointing toward them.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GeodesicFrame {
    pub point: HPoint,
    pub normal: MinkowskiVector,
    pub sinh_distance: f64,
    pub z_plus: MinkowskiVector,
    pub z_minus: MinkowskiVector,
    pub w_plus: MinkowskiVector,
    pub w_minus: MinkowskiVector,
}

pub fn boundary_frame(p: HPoint, n: MinkowskiVector) -> Result<GeodesicFrame, VariationError> {
    let nn = inner(n, n);
    if (nn - 1.0).abs() > 1e-10 {
        return Err(VariationError::NotUnitNormal(nn));
    }
    let sh = inner(p.vector(), n);
    let ch2 = 1.0 + sh * sh;
    let pxn = cross(p.vector(), n);
    let z_plus = p.vector().sub(n.scale(sh)).add(pxn);
    let z_minus = p.vector().sub(n.scale(sh)).sub(pxn);
    let w = |sign: f64| {
        p.vector()
            .scale(sh * sh)
            .add(n.scale(sh))
            .add(pxn.scale(-sign))
            .scale(-1.0 / ch2)
    };
    Ok(GeodesicFrame {
        point: p,
        normal: n,
        sinh_distance: sh,
        z_plus,
        z_minus,
        w_plus: w(1.0),
        w_minus: w(-1.0),
    })
}

impl GeodesicFrame {
    /// Residual of the tangential identity
    /// `⟨ṗ, w⁺ + w⁻⟩ + 2 (sinh d / cosh²d) ⟨ṗ, n⟩ = 0`.
    pub fn tangential_identity_residual(&self, p_dot: MinkowskiVector) -> f64 {
        let ch2 = 1.0 + self.sinh_distance * self.sinh_distance;
        inner(p_dot, self.w_plus.add(self.w_minus))
            + 2.0 * self.sinh_distance / ch2 * inner(p_dot, self.normal)
    }
}

// ---------------------------------------------------------------------------
// second order coefficients
// ---------------------------------------------------------------------------

/// Per-intersection coefficients of the intersecting normals in the frame
/// `(ξ, ζ, n)` of a reference geodesic, and the assembled derivative of the
/// cosine sum with its positivity bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SecondOrderData {
    /// `(a_k, b_k, c_k)` with `w_k = a_k ξ + b_k ζ + c_k n`, `a_k > 0 > b_k`.
    pub coefficients: Vec<(f64, f64, f64)>,
    /// `d/dt Σ cos θ_k = −Σ_k a_k b_k − 2 Σ_{i<k} a_k b_i`, the sum over k of
    /// the per-intersection derivatives `−a_k Σ_{i<k} b_i − b_k Σ_{i≥k} a_i`.
    pub derivative: f64,
    /// `½ (Σ sin²θ_k + Σ_{i<k} sin²θ_i sin²θ_k / (2 (cosh M₀ + 1)))`.
    pub lower_bound: f64,
    /// `M₀`: the maximal pairwise distance among the crossing geodesics.
    pub max_pairwise_distance: f64,
}

impl SecondOrderData {
    pub fn r(&self, i: usize, k: usize) -> f64 {
        -self.coefficients[i].0 * self.coefficients[k].1
    }
}

/// Computes the second-order data of a family of geodesics crossing the
/// reference geodesic with ideal endpoints `ξ, ζ` normalized to
/// `⟨ξ,ζ⟩ = −1`. `normals[k]` is a unit normal of the k-th crossing
/// geodesic; normals are enumerated from `ξ` toward `ζ` and re-oriented so
/// that `a_k > 0`.
pub fn second_order_terms(
    xi: MinkowskiVector,
    zeta: MinkowskiVector,
    normals: &[MinkowskiVector],
) -> Result<SecondOrderData, VariationError> {
    let pairing = inner(xi, zeta);
    if (pairing + 1.0).abs() > 1e-10 {
        return Err(VariationError::BadFrameNormalization(pairing));
    }
    let n = cross(xi, zeta); // ‖ξ⊠ζ‖ = −⟨ξ,ζ⟩ = 1
    let mut coefficients = Vec::with_capacity(normals.len());
    for w in normals {
        let ww = inner(*w, *w);
        if (ww - 1.0).abs() > 1e-10 {
            return Err(VariationError::NotUnitNormal(ww));
        }
        // ⟨w,ζ⟩ = −a, ⟨w,ξ⟩ = −b, ⟨w,n⟩ = c
        let mut a = -inner(*w, zeta);
        let mut b = -inner(*w, xi);
        let mut c = inner(*w, n);
        if a < 0.0 {
            a = -a;
            b = -b;
            c = -c;
        }
        if !(a > 0.0 && b < 0.0) {
            return Err(VariationError::DegenerateConfiguration);
        }
        coefficients.push((a, b, c));
    }
    let m = coefficients.len();
    let mut derivative = 0.0;
    for k in 0..m {
        derivative -= coefficients[k].0 * coefficients[k].1;
        for i in 0..k {
            derivative -= 2.0 * coefficients[k].0 * coefficients[i].1;
        }
    }
    // M₀ over pairwise distances, via cosh d = ⟨w_i, w_k⟩ for disjoint pairs
    let mut m0 = 0.0f64;
    for i in 0..m {
        for k in (i + 1)..m {
            let c = inner(
                MinkowskiVector::new(
                    coefficients[i].0 * xi.x0 + coefficients[i].1 * zeta.x0 + coefficients[i].2 * n.x0,
                    coefficients[i].0 * xi.x1 + coefficients[i].1 * zeta.x1 + coefficients[i].2 * n.x1,
                    coefficients[i].0 * xi.x2 + coefficients[i].1 * zeta.x2 + coefficients[i].2 * n.x2,
                ),
                MinkowskiVector::new(
                    coefficients[k].0 * xi.x0 + coefficients[k].1 * zeta.x0 + coefficients[k].2 * n.x0,
                    coefficients[k].0 * xi.x1 + coefficients[k].1 * zeta.x1 + coefficients[k].2 * n.x1,
                    coefficients[k].0 * xi.x2 + coefficients[k].1 * zeta.x2 + coefficients[k].2 * n.x2,
                ),
            );
            if c > 1.0 {
                m0 = m0.max(c.acosh());
            }
        }
    }
    let sin2 = |k: usize| {
        let c = coefficients[k].2;
        (1.0 - c * c).max(0.0)
    };
    let mut bound = 0.0;
    for k in 0..m {
        bound += sin2(k);
        for i in 0..k {
            bound += sin2(i) * sin2(k) / (2.0 * (m0.cosh() + 1.0));
        }
    }
    Ok(SecondOrderData {
        coefficients,
        derivative,
        lower_bound: 0.5 * bound,
        max_pairwise_distance: m0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lamination::{Leaf, SpiralEnd, SpiralSign};
    use crate::minkowski::{exp_generator, IdealPoint};
    use crate::surface::{SurfaceData, TeichmullerPoint};
    use rand::SeedableRng;

    fn torus(l: f64, tau: f64, b: f64) -> (SurfaceData, TeichmullerPoint) {
        let s = SurfaceData::one_holed_torus();
        let p = TeichmullerPoint::new(&s, &[l], &[tau], &[b]).unwrap();
        (s, p)
    }

    #[test]
    fn fd_oracles() {
        let c = fd_derivative(|_| 3.5, 0.0, 1e-3).unwrap();
        assert!(c.value.abs() < 1e-12);
        let d = fd_second(|t| t * t, 0.0, 1e-3).unwrap();
        assert!((d.value - 2.0).abs() < 1e-8);
        let e = fd_derivative(|t: f64| t.cosh(), 1.0, 1e-3).unwrap();
        assert!((e.value - 1.0f64.sinh()).abs() < 1e-9);
        assert!(fd_derivative(|_| f64::NAN, 0.0, 1e-3).is_err());
    }

    #[test]
    fn intersections_torus_generators() {
        let (s, p) = torus(1.4, 0.2, 1.7);
        // γ = A against the closed leaf B: geometric intersection number 1
        let lam = MeasuredLamination::new(vec![Leaf::Closed {
            word: s.parse_word("B").unwrap(),
            weight: 2.5,
        }]);
        let a = s.parse_word("A").unwrap();
        let data = enumerate_intersections(&p.holonomy, &a, &lam, 0).unwrap();
        assert_eq!(data.len(), 1, "i(A, B) = 1");
        assert!((data[0].weight - 2.5).abs() < 1e-15);
        assert!(data[0].cos_theta.abs() < 1.0);

        // a curve against itself: no transverse intersections
        let self_lam = MeasuredLamination::new(vec![Leaf::Closed {
            word: a.clone(),
            weight: 1.0,
        }]);
        let none = enumerate_intersections(&p.holonomy, &a, &self_lam, 0).unwrap();
        assert!(none.is_empty(), "a simple closed geodesic does not meet itself");

        // i(AB, A) = 1, i(AB, B) = 1
        let ab = s.parse_word("AB").unwrap();
        let data = enumerate_intersections(&p.holonomy, &ab, &self_lam, 0).unwrap();
        assert_eq!(data.len(), 1, "i(AB, A) = 1");

        // doubling the weight only rescales the weight field
        let doubled = MeasuredLamination::new(vec![Leaf::Closed {
            word: s.parse_word("B").unwrap(),
            weight: 5.0,
        }]);
        let d2 = enumerate_intersections(&p.holonomy, &a, &doubled, 0).unwrap();
        assert_eq!(d2.len(), 1);
        assert!((d2[0].cos_theta - data_cos(&p, &s)).abs() < 1e-10);

        fn data_cos(p: &TeichmullerPoint, s: &SurfaceData) -> f64 {
            let lam = MeasuredLamination::new(vec![Leaf::Closed {
                word: s.parse_word("B").unwrap(),
                weight: 1.0,
            }]);
            enumerate_intersections(&p.holonomy, &s.parse_word("A").unwrap(), &lam, 0).unwrap()[0]
                .cos_theta
        }

        // peripheral test curve rejected
        let boundary = s.parse_word("ABab").unwrap();
        assert!(matches!(
            enumerate_intersections(&p.holonomy, &boundary, &lam, 0),
            Err(VariationError::PeripheralCurve)
        ));
    }

    #[test]
    fn kerckhoff_sum_matches_twist_derivative_sign() {
        // d/dτ_A ℓ_B = Σ cos θ_{(B,A)}: the pinning test for the twist and
        // angle conventions together
        let (s, p) = torus(1.3, 0.45, 2.2);
        let b_word = s.parse_word("B").unwrap();
        let tuple = LaminationTuple::new(vec![MeasuredLamination::new(vec![Leaf::Closed {
            word: b_word.clone(),
            weight: 1.0,
        }])]);
        let a = s.parse_word("A").unwrap();
        let closed_form = kerckhoff_sum(&p.holonomy, &tuple, &a).unwrap();
        let fd = fd_derivative(
            |t| {
                let q = p.twist_flow(0, t, 1.0).unwrap();
                q.holonomy.curve_length(&b_word).unwrap()
            },
            0.0,
            1e-4,
        )
        .unwrap();
        assert!(
            (fd.value - closed_form).abs() <= 1e-6 * (1.0 + closed_form.abs()),
            "fd = {}, closed form = {}",
            fd.value,
            closed_form
        );
    }

    #[test]
    fn cocycle_of_twist_matches_axis_generator() {
        let (s, p) = torus(1.5, 0.0, 2.0);
        let lam = MeasuredLamination::new(vec![Leaf::Closed {
            word: s.parse_word("A").unwrap(),
            weight: 1.0,
        }]);
        // base point left of the A-axis (negative-real side in the half-plane)
        let base = HPoint::from_half_plane(-0.4, 1.1).unwrap();
        let c = infinitesimal_cocycle(&p.holonomy, &lam, 0, base).unwrap();
        // e(A) = 0 (the arc [z, Az] does not cross lifts of the axis)
        assert!(c.generator_images[0].sup_norm() < 1e-12);
        // e(B) = v(axis of A oriented by its translation) = its unit normal
        let axis = p.holonomy.generators[0].axis().unwrap();
        assert!(c.generator_images[1].sub(axis.normal()).sup_norm() < 1e-9);
        // matches the derivative of the twist family h_t(B) = T(t)·h(B):
        // the so(2,1) generator of the axis translation
        let m = exp_generator(axis.normal(), 1e-5);
        let moved = m.apply(p.holonomy.generators[1].apply_point(HPoint::BASE).vector());
        let direct = p.twist_flow(0, 1e-5, 1.0).unwrap();
        let moved2 = direct.holonomy.generators[1].apply_point(HPoint::BASE).vector();
        assert!(moved.sub(moved2).sup_norm() < 1e-9);
    }

    #[test]
    fn cocycle_condition_and_additivity() {
        let (s, p) = torus(1.1, 0.8, 1.5);
        let lam1 = MeasuredLamination::new(vec![Leaf::Closed {
            word: s.parse_word("A").unwrap(),
            weight: 0.75,
        }]);
        let lam2 = MeasuredLamination::new(vec![Leaf::Closed {
            word: s.parse_word("B").unwrap(),
            weight: 1.25,
        }]);
        let base = HPoint::from_half_plane(-0.31, 0.97).unwrap();
        let c1 = infinitesimal_cocycle(&p.holonomy, &lam1, 0, base).unwrap();
        let c2 = infinitesimal_cocycle(&p.holonomy, &lam2, 1, base).unwrap();
        // empty lamination → zero cocycle
        let empty =
            infinitesimal_cocycle(&p.holonomy, &MeasuredLamination::default(), 0, base).unwrap();
        assert!(empty.sup_norm() == 0.0);
        // additivity over ⊕ with a common base point
        let sum = infinitesimal_cocycle(&p.holonomy, &lam1.oplus(&lam2), 0, base).unwrap();
        let direct = c1.add(&c2);
        assert!(
            sum.generator_images
                .iter()
                .zip(&direct.generator_images)
                .all(|(x, y)| x.sub(*y).sup_norm() < 1e-12)
        );
        // linearity in the weight
        let half = infinitesimal_cocycle(
            &p.holonomy,
            &MeasuredLamination::new(vec![Leaf::Closed {
                word: s.parse_word("A").unwrap(),
                weight: 0.375,
            }]),
            0,
            base,
        )
        .unwrap();
        assert!(half.scale(2.0).generator_images[1].sub(c1.generator_images[1]).sup_norm() < 1e-12);

        // cocycle condition on random word pairs
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let alphabet = ['A', 'B'];
        let total = c1.add(&c2);
        for _ in 0..20 {
            let w1 = random_word(&mut rng, &alphabet, 3);
            let w2 = random_word(&mut rng, &alphabet, 3);
            let r = total.condition_residual(&p.holonomy, &w1, &w2);
            assert!(r < 1e-10, "cocycle condition residual {r} for {w1} {w2}");
        }
    }

    fn random_word(
        rng: &mut rand_chacha::ChaCha8Rng,
        alphabet: &[char],
        len: usize,
    ) -> Word {
        use rand::Rng;
        let mut s = String::new();
        for _ in 0..len {
            let c = alphabet[rng.gen_range(0..alphabet.len())];
            s.push(if rng.gen_bool(0.5) { c } else { c.to_ascii_lowercase() });
        }
        Word::parse(&s, alphabet).unwrap()
    }

    #[test]
    fn chain_derivative_basics() {
        let p0 = HPoint::from_half_plane(0.0, 1.0).unwrap();
        let p1 = HPoint::from_half_plane(0.7, 1.2).unwrap();
        let p2 = HPoint::from_half_plane(1.4, 0.8).unwrap();
        // all velocities zero
        let z = MinkowskiVector::ZERO;
        assert_eq!(chain_length_derivative(&[p0, p1, p2], &[z, z, z]).unwrap(), 0.0);
        // two points, second moving away along the chain: unit growth
        let dir = p0.direction_to(p1);
        let v1 = p1.direction_to(p0).scale(-1.0);
        let d = chain_length_derivative(&[p0, p1], &[z, v1]).unwrap();
        assert!((d - 1.0).abs() < 1e-12, "moving the endpoint out stretches at unit rate, got {d}");
        let _ = dir;
        // degenerate chains rejected
        assert!(chain_length_derivative(&[p0], &[z]).is_err());
        assert!(chain_length_derivative(&[p0, p0], &[z, z]).is_err());
        let bad = MinkowskiVector::E0;
        assert!(matches!(
            chain_length_derivative(&[p0, p1], &[z, bad]),
            Err(VariationError::NotTangent(1, _))
        ));
    }

    #[test]
    fn chain_derivative_matches_fd() {
        use rand::Rng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..25 {
            let m = rng.gen_range(3..=6);
            let pts: Vec<HPoint> = (0..m)
                .map(|_| {
                    HPoint::from_half_plane(rng.gen_range(-2.0..2.0), rng.gen_range(0.4..2.5))
                        .unwrap()
                })
                .collect();
            // random tangent velocities: project a random vector
            let vels: Vec<MinkowskiVector> = pts
                .iter()
                .map(|p| {
                    let raw = MinkowskiVector::new(
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                    );
                    // v + ⟨v,p⟩ p is tangent: ⟨v + ⟨v,p⟩p, p⟩ = ⟨v,p⟩ − ⟨v,p⟩
                    raw.add(p.vector().scale(inner(raw, p.vector())))
                })
                .collect();
            let closed = chain_length_derivative(&pts, &vels).unwrap();
            let fd = fd_derivative(
                |t| {
                    let moved: Vec<HPoint> = pts
                        .iter()
                        .zip(&vels)
                        .map(|(p, v)| {
                            // geodesic motion with initial velocity v
                            let speed = inner(*v, *v).sqrt();
                            if speed < 1e-15 {
                                *p
                            } else {
                                p.flow(v.scale(1.0 / speed), speed * t)
                            }
                        })
                        .collect();
                    chain_length(&moved)
                },
                0.0,
                1e-5,
            )
            .unwrap();
            assert!(
                (closed - fd.value).abs() < 1e-6,
                "chain derivative {closed} vs fd {}",
                fd.value
            );
        }
    }

    #[test]
    fn boundary_frame_identities() {
        use rand::Rng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let p =
                HPoint::from_half_plane(rng.gen_range(-2.0..2.0), rng.gen_range(0.2..3.0)).unwrap();
            let g = OrientedGeodesic::from_endpoints(
                IdealPoint::from_boundary_coordinate(rng.gen_range(-5.0..-0.1)),
                IdealPoint::from_boundary_coordinate(rng.gen_range(0.1..5.0)),
            )
            .unwrap();
            let f = boundary_frame(p, g.normal()).unwrap();
            // z± null and orthogonal to n
            assert!(inner(f.z_plus, f.z_plus).abs() < 1e-10);
            assert!(inner(f.z_minus, f.z_minus).abs() < 1e-10);
            assert!(inner(f.z_plus, f.normal).abs() < 1e-10);
            // ⟨z±, p⟩ = −cosh²d
            let ch2 = 1.0 + f.sinh_distance * f.sinh_distance;
            assert!((inner(f.z_plus, p.vector()) + ch2).abs() < 1e-10);
            // w± unit tangent
            assert!((inner(f.w_plus, f.w_plus) - 1.0).abs() < 1e-10);
            assert!(inner(f.w_plus, p.vector()).abs() < 1e-10);
            // tangential identity for a random tangent vector
            let raw = MinkowskiVector::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let pdot = raw.add(p.vector().scale(inner(raw, p.vector())));
            assert!(f.tangential_identity_residual(pdot).abs() < 1e-10);
        }
        // d = 0 degenerates gracefully: the identity is 0 = 0
        let p = HPoint::BASE;
        let g = OrientedGeodesic::from_endpoints(
            IdealPoint::from_boundary_coordinate(-1.0),
            IdealPoint::from_boundary_coordinate(1.0),
        )
        .unwrap();
        let f = boundary_frame(p, g.normal()).unwrap();
        assert!(f.sinh_distance.abs() < 1e-12);
        let tangent = f.w_plus;
        assert!(f.tangential_identity_residual(tangent).abs() < 1e-12);
        // non-unit normal rejected
        assert!(boundary_frame(p, MinkowskiVector::new(0.0, 0.0, 2.0)).is_err());
    }

    #[test]
    fn second_order_single_and_right_angles() {
        // reference geodesic: the imaginary axis; ξ at 0, ζ at ∞, scaled to
        // ⟨ξ,ζ⟩ = −1
        let (xi, zeta) = normalized_frame();
        // single perpendicular crossing: θ = π/2, derivative sin²θ/2 = 1/2
        let w = OrientedGeodesic::from_endpoints(
            IdealPoint::from_boundary_coordinate(-1.0),
            IdealPoint::from_boundary_coordinate(1.0),
        )
        .unwrap()
        .normal();
        let d = second_order_terms(xi, zeta, &[w]).unwrap();
        assert!((d.derivative - 0.5).abs() < 1e-12);
        assert!((d.coefficients[0].2).abs() < 1e-12, "c = cos θ = 0");
        assert!((-d.coefficients[0].0 * d.coefficients[0].1 - 0.5).abs() < 1e-12);

        // two perpendicular crossings at distance D: derivative = 1 + 2 r12,
        // with r12 r21 = 1/4
        let w2 = OrientedGeodesic::from_endpoints(
            IdealPoint::from_boundary_coordinate(-(3.0f64.exp())),
            IdealPoint::from_boundary_coordinate(3.0f64.exp()),
        )
        .unwrap()
        .normal();
        let d2 = second_order_terms(xi, zeta, &[w, w2]).unwrap();
        let r12 = d2.r(0, 1);
        let r21 = d2.r(1, 0);
        assert!((r12 * r21 - 0.25).abs() < 1e-10);
        assert!((d2.derivative - (1.0 + 2.0 * r21)).abs() < 1e-10);
        assert!(d2.derivative >= d2.lower_bound - 1e-12);
    }

    fn normalized_frame() -> (MinkowskiVector, MinkowskiVector) {
        let xi = IdealPoint::from_boundary_coordinate(0.0).vector();
        let zeta = IdealPoint::from_boundary_coordinate(f64::INFINITY).vector();
        let s = (-1.0 / inner(xi, zeta)).sqrt();
        (xi.scale(s), zeta.scale(s))
    }

    #[test]
    fn second_order_fd_oracle() {
        use rand::Rng;
        let (xi, zeta) = normalized_frame();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            // random disjoint geodesics crossing the axis, ordered outward,
            // normals oriented so that the ξ-coefficient is positive (the
            // orientation the closed form assumes for the earthquake sense)
            let m = rng.gen_range(1..=3);
            let mut normals = Vec::new();
            let mut lo = rng.gen_range(0.3..1.0);
            for _ in 0..m {
                let hi = lo * rng.gen_range(1.5..3.0);
                let mut w = OrientedGeodesic::from_endpoints(
                    IdealPoint::from_boundary_coordinate(-lo),
                    IdealPoint::from_boundary_coordinate(hi),
                )
                .unwrap()
                .normal();
                if -inner(w, zeta) < 0.0 {
                    w = w.scale(-1.0);
                }
                normals.push(w);
                lo = hi * rng.gen_range(1.5..2.0);
            }
            let data = second_order_terms(xi, zeta, &normals).unwrap();
            // finite differences on the exp-composed endpoint motion
            let fd = fd_derivative(
                |t| {
                    let mut total = 0.0;
                    for k in 0..normals.len() {
                        let mut xi_t = xi;
                        for w in normals.iter().take(k) {
                            xi_t = exp_generator(*w, -t).apply(xi_t);
                        }
                        let mut zeta_t = zeta;
                        for w in normals.iter().skip(k).rev() {
                            zeta_t = exp_generator(*w, t).apply(zeta_t);
                        }
                        let n_t = cross(xi_t, zeta_t).scale(-1.0 / inner(xi_t, zeta_t));
                        total += inner(normals[k], n_t);
                    }
                    total
                },
                0.0,
                1e-4,
            )
            .unwrap();
            assert!(
                (fd.value - data.derivative).abs() < 1e-5,
                "second order fd {} vs closed form {}",
                fd.value,
                data.derivative
            );
            assert!(data.derivative >= data.lower_bound - 1e-9);
        }
    }

    #[test]
    fn spiral_leaf_intersections() {
        // the spiralling leaf spun from the curve A (conjugator A) has the
        // crossing pattern of A itself: one crossing with B, one with AB,
        // none with A; all crossings are found on the non-collar core
        let (s, p) = torus(1.5, 0.3, 1.9);
        let lam = MeasuredLamination::new(vec![Leaf::Spiral {
            start: SpiralEnd { boundary: 0, sign: SpiralSign::Plus, conjugator: Word::identity() },
            end: SpiralEnd {
                boundary: 0,
                sign: SpiralSign::Plus,
                conjugator: s.parse_word("A").unwrap(),
            },
            weight: 1.0,
        }]);
        let a = s.parse_word("A").unwrap();
        let b = s.parse_word("B").unwrap();
        assert!(enumerate_intersections(&p.holonomy, &a, &lam, 0).unwrap().is_empty());
        let data = enumerate_intersections(&p.holonomy, &b, &lam, 0).unwrap();
        assert_eq!(data.len(), 1, "the spun leaf crosses B once");
        for d in &data {
            assert!(d.cos_theta.abs() < 1.0);
        }
        // determinism
        let data2 = enumerate_intersections(&p.holonomy, &b, &lam, 0).unwrap();
        assert_eq!(data.len(), data2.len());
        for (x, y) in data.iter().zip(&data2) {
            assert_eq!(x.curve_param, y.curve_param);
        }
    }
}
