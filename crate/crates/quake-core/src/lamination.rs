//! Measured laminations as finite weighted systems of closed and spiralling
//! leaves.
//!
//! A spiralling leaf is specified combinatorially by its two ends: boundary
//! index, spiralling sense, and a conjugator word selecting the homotopy
//! class rel boundary. Realization turns each end into an ideal fixed point
//! of the conjugated boundary holonomy: positive sense picks the attracting
//! fixed point of the positively-oriented boundary word, negative sense the
//! repelling one.
//!
//! The signed mass of a boundary counts spiralling ends with the sense as
//! sign; a tuple is *balanced* (sharp) when these sums vanish at every
//! boundary, which is exactly when the summed infinitesimal earthquake is
//! tangent to the fixed-boundary-length slice.

use crate::minkowski::{Isometry, OrientedGeodesic};
use crate::surface::{HolonomyRep, SurfaceData, SurfaceError};
use crate::words::Word;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LaminationError {
    #[error("leaf weight must be positive, got {0}")]
    NonPositiveWeight(f64),
    #[error("closed leaf word is trivial")]
    TrivialWord,
    #[error("closed leaf word is peripheral")]
    PeripheralWord,
    #[error("boundary index {0} out of range")]
    BoundaryIndex(usize),
    #[error(
        "mixed spiralling senses at boundary {boundary} within one lamination: \
         disjoint leaves near one boundary share a sense"
    )]
    MixedSenses { boundary: usize },
    #[error("spiral end realizes to a non-hyperbolic boundary holonomy")]
    BadBoundaryHolonomy,
    #[error("spiral leaf degenerates: its two ideal endpoints coincide")]
    DegenerateLeaf,
    #[error("spiral leaf lies on a boundary lift")]
    PeripheralLeaf,
    #[error("leaves are not mutually disjoint: {0}")]
    NotDisjoint(String),
    #[error("empty witness set")]
    EmptyWitnesses,
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// Spiralling sense relative to the fixed orientation of the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpiralSign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl SpiralSign {
    pub fn opposite(self) -> SpiralSign {
        match self {
            SpiralSign::Plus => SpiralSign::Minus,
            SpiralSign::Minus => SpiralSign::Plus,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            SpiralSign::Plus => 1.0,
            SpiralSign::Minus => -1.0,
        }
    }
}

/// One end of a spiralling leaf: which boundary it spirals into, in which
/// sense, and the conjugator word selecting the lift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpiralEnd {
    pub boundary: usize,
    pub sign: SpiralSign,
    pub conjugator: Word,
}

/// A weighted leaf: a closed geodesic or a spiralling complete geodesic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Leaf {
    Closed { word: Word, weight: f64 },
    Spiral { start: SpiralEnd, end: SpiralEnd, weight: f64 },
}

impl Leaf {
    pub fn weight(&self) -> f64 {
        match self {
            Leaf::Closed { weight, .. } | Leaf::Spiral { weight, .. } => *weight,
        }
    }

    pub fn with_weight(&self, w: f64) -> Leaf {
        let mut l = self.clone();
        match &mut l {
            Leaf::Closed { weight, .. } | Leaf::Spiral { weight, .. } => *weight = w,
        }
        l
    }

    pub fn is_spiral(&self) -> bool {
        matches!(self, Leaf::Spiral { .. })
    }
}

/// A finite-leaf measured lamination. Disjointness of the realized leaves is
/// certified numerically at realization time, not on construction.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MeasuredLamination {
    pub leaves: Vec<Leaf>,
}

impl MeasuredLamination {
    pub fn new(leaves: Vec<Leaf>) -> MeasuredLamination {
        MeasuredLamination { leaves }
    }

    pub fn is_compact(&self) -> bool {
        self.leaves.iter().all(|l| !l.is_spiral())
    }

    /// Maximal compact sublamination.
    pub fn compact_part(&self) -> MeasuredLamination {
        MeasuredLamination {
            leaves: self.leaves.iter().filter(|l| !l.is_spiral()).cloned().collect(),
        }
    }

    /// Sum of laminations: union of supports, added measures.
    pub fn oplus(&self, other: &MeasuredLamination) -> MeasuredLamination {
        let mut leaves = self.leaves.clone();
        leaves.extend(other.leaves.iter().cloned());
        MeasuredLamination { leaves }
    }

    fn validate(&self, surface: &SurfaceData) -> Result<(), LaminationError> {
        for leaf in &self.leaves {
            if !(leaf.weight() > 0.0) {
                return Err(LaminationError::NonPositiveWeight(leaf.weight()));
            }
            match leaf {
                Leaf::Closed { word, .. } => {
                    if word.is_empty() {
                        return Err(LaminationError::TrivialWord);
                    }
                    if surface.is_peripheral(word) {
                        return Err(LaminationError::PeripheralWord);
                    }
                }
                Leaf::Spiral { start, end, .. } => {
                    for e in [start, end] {
                        if e.boundary >= surface.topology.boundary_count {
                            return Err(LaminationError::BoundaryIndex(e.boundary));
                        }
                    }
                }
            }
        }
        // disjoint leaves spiralling near one boundary share a sense
        for i in 0..surface.topology.boundary_count {
            self.signed_mass_checked(i)?;
        }
        Ok(())
    }

    fn signed_mass_checked(&self, boundary: usize) -> Result<f64, LaminationError> {
        let mut sign: Option<SpiralSign> = None;
        let mut mass = 0.0;
        for leaf in &self.leaves {
            if let Leaf::Spiral { start, end, weight } = leaf {
                for e in [start, end] {
                    if e.boundary == boundary {
                        match sign {
                            None => sign = Some(e.sign),
                            Some(s) if s != e.sign => {
                                return Err(LaminationError::MixedSenses { boundary });
                            }
                            _ => {}
                        }
                        mass += e.sign.value() * weight;
                    }
                }
            }
        }
        Ok(mass)
    }
}

/// Signed mass `m(∂_i, λ)`: each spiralling end at the boundary contributes
/// its weight with the sense as sign (a leaf with both ends there
/// contributes twice). Mixed senses within one lamination are invalid input.
pub fn signed_mass(lam: &MeasuredLamination, boundary: usize) -> Result<f64, LaminationError> {
    lam.signed_mass_checked(boundary)
}

/// An ordered tuple of measured laminations.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LaminationTuple {
    pub laminations: Vec<MeasuredLamination>,
}

impl LaminationTuple {
    pub fn new(laminations: Vec<MeasuredLamination>) -> LaminationTuple {
        LaminationTuple { laminations }
    }

    pub fn validate(&self, surface: &SurfaceData) -> Result<(), LaminationError> {
        for lam in &self.laminations {
            lam.validate(surface)?;
        }
        Ok(())
    }

    /// All leaves with their (lamination, leaf) indices.
    pub fn indexed_leaves(&self) -> impl Iterator<Item = (LeafId, &Leaf)> {
        self.laminations.iter().enumerate().flat_map(|(n, lam)| {
            lam.leaves
                .iter()
                .enumerate()
                .map(move |(k, leaf)| (LeafId { lamination: n, leaf: k }, leaf))
        })
    }
}

/// Index of a leaf within a tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LeafId {
    pub lamination: usize,
    pub leaf: usize,
}

/// Whether the signed-mass sums vanish at every boundary.
pub fn is_sharp(tuple: &LaminationTuple, boundary_count: usize) -> Result<bool, LaminationError> {
    for i in 0..boundary_count {
        let mut total = 0.0;
        for lam in &tuple.laminations {
            total += signed_mass(lam, i)?;
        }
        if total.abs() > 1e-12 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A realized end of a spiralling leaf: the boundary lift whose fixed point
/// the leaf shares, with the lift's positively-oriented holonomy.
#[derive(Debug, Clone)]
pub struct BoundaryLift {
    pub boundary: usize,
    pub sign: SpiralSign,
    /// Conjugated, positively-oriented boundary holonomy stabilizing the lift.
    pub holonomy: Isometry,
    /// Axis of `holonomy`, oriented from repelling to attracting fixed point.
    pub axis: OrientedGeodesic,
    /// The deck element carrying the base boundary lift here: the image of
    /// the conjugator word, composed with any subsequent chain translations.
    /// Always a group element, so translate matching stays inside the
    /// covering group.
    pub frame: Isometry,
}

impl BoundaryLift {
    /// The ideal endpoint shared with the leaf lift: attracting for positive
    /// sense, repelling for negative.
    pub fn shared_fixed_point(&self) -> crate::minkowski::IdealPoint {
        let (rep, attr) = self.axis.endpoints();
        match self.sign {
            SpiralSign::Plus => attr,
            SpiralSign::Minus => rep,
        }
    }
}

/// A chosen lift of a leaf, oriented from its start toward its end.
#[derive(Debug, Clone)]
pub struct RealizedLeaf {
    pub id: LeafId,
    pub weight: f64,
    pub geodesic: OrientedGeodesic,
    pub kind: RealizedKind,
}

#[derive(Debug, Clone)]
pub enum RealizedKind {
    Closed {
        word: Word,
        /// Translation length of the holonomy, the leaf's period.
        length: f64,
        /// Deck transformation generating the lift's stabilizer.
        deck: Isometry,
    },
    Spiral {
        start: BoundaryLift,
        end: BoundaryLift,
    },
}

/// Realizes one end of a spiralling leaf as a boundary lift.
pub fn realize_end(rep: &HolonomyRep, end: &SpiralEnd) -> Result<BoundaryLift, LaminationError> {
    let bword = rep
        .boundary_words
        .get(end.boundary)
        .ok_or(LaminationError::BoundaryIndex(end.boundary))?;
    let conj = bword.conjugated_by(&end.conjugator);
    let hol = rep.evaluate(&conj);
    let axis = hol.axis().ok_or(LaminationError::BadBoundaryHolonomy)?;
    Ok(BoundaryLift {
        boundary: end.boundary,
        sign: end.sign,
        holonomy: hol,
        axis,
        frame: rep.evaluate(&end.conjugator),
    })
}

/// Realizes a leaf: the axis of the word's holonomy for a closed leaf, the
/// geodesic between the designated boundary fixed points for a spiral.
pub fn realize_leaf(
    rep: &HolonomyRep,
    id: LeafId,
    leaf: &Leaf,
) -> Result<RealizedLeaf, LaminationError> {
    match leaf {
        Leaf::Closed { word, weight } => {
            let hol = rep.evaluate(word);
            let axis = hol.axis().ok_or(LaminationError::BadBoundaryHolonomy)?;
            let length = hol.translation_length().expect("hyperbolic by axis existence");
            Ok(RealizedLeaf {
                id,
                weight: *weight,
                geodesic: axis,
                kind: RealizedKind::Closed { word: word.clone(), length, deck: hol },
            })
        }
        Leaf::Spiral { start, end, weight } => {
            let start_lift = realize_end(rep, start)?;
            let end_lift = realize_end(rep, end)?;
            let a = start_lift.shared_fixed_point();
            let b = end_lift.shared_fixed_point();
            let geodesic = OrientedGeodesic::from_endpoints(a, b)
                .map_err(|_| LaminationError::DegenerateLeaf)?;
            Ok(RealizedLeaf {
                id,
                weight: *weight,
                geodesic,
                kind: RealizedKind::Spiral { start: start_lift, end: end_lift },
            })
        }
    }
}

/// Realizes every leaf of a tuple.
pub fn realize_tuple(
    rep: &HolonomyRep,
    tuple: &LaminationTuple,
) -> Result<Vec<RealizedLeaf>, LaminationError> {
    tuple.indexed_leaves().map(|(id, leaf)| realize_leaf(rep, id, leaf)).collect()
}

/// Straightening of a spiralling leaf: the common-perpendicular arc between
/// its two boundary lifts. Returns the two feet and the arc length
/// `arcosh |⟨n1, n2⟩|`.
pub fn straighten_leaf(
    rep: &HolonomyRep,
    leaf: &Leaf,
) -> Result<(crate::minkowski::HPoint, crate::minkowski::HPoint, f64), LaminationError> {
    let Leaf::Spiral { start, end, .. } = leaf else {
        return Err(LaminationError::DegenerateLeaf);
    };
    let s = realize_end(rep, start)?;
    let e = realize_end(rep, end)?;
    let (_, foot_s, foot_e) =
        s.axis.common_perpendicular(e.axis).ok_or(LaminationError::PeripheralLeaf)?;
    Ok((foot_s, foot_e, s.axis.distance_to(e.axis)))
}

/// Certifies mutual disjointness of the leaves of every lamination of the
/// tuple: no transverse crossings among deck translates of the realized
/// leaves within one lamination (including a leaf against its own
/// translates). Sense consistency at the boundaries — enforced by
/// [`signed_mass`] — guarantees that all potential crossings happen on the
/// non-collar cores, which is where the search looks.
pub fn certify_disjointness(
    rep: &HolonomyRep,
    tuple: &LaminationTuple,
) -> Result<(), LaminationError> {
    let cfg = crate::variation::SearchConfig::default();
    for (n, lam) in tuple.laminations.iter().enumerate() {
        for i in 0..lam.leaves.len() {
            let target_leaf =
                realize_leaf(rep, LeafId { lamination: n, leaf: i }, &lam.leaves[i])?;
            let target = crate::variation::leaf_segment(rep, &target_leaf)
                .map_err(|e| LaminationError::NotDisjoint(e.to_string()))?;
            for j in i..lam.leaves.len() {
                let probe_leaf =
                    realize_leaf(rep, LeafId { lamination: n, leaf: j }, &lam.leaves[j])?;
                let probe = crate::variation::leaf_segment(rep, &probe_leaf)
                    .map_err(|e| LaminationError::NotDisjoint(e.to_string()))?;
                let crossings = crate::variation::enumerate_crossings(rep, &target, &probe, &cfg)
                    .map_err(|e| LaminationError::NotDisjoint(e.to_string()))?;
                if !crossings.is_empty() {
                    return Err(LaminationError::NotDisjoint(format!(
                        "leaves {i} and {j} of lamination {n} cross ({} transverse points)",
                        crossings.len()
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Whether the tuple fills the surface, decided against a finite witness
/// set of simple closed curves: true iff every witness's geodesic meets
/// some leaf transversally. Sound as a necessary condition in general; for
/// the curated witness sets of the two desk-scale topologies it is the
/// filling decision.
pub fn fills_surface(
    rep: &HolonomyRep,
    tuple: &LaminationTuple,
    witnesses: &[Word],
) -> Result<bool, LaminationError> {
    if witnesses.is_empty() {
        return Err(LaminationError::EmptyWitnesses);
    }
    for w in witnesses {
        let mut met = false;
        for (n, lam) in tuple.laminations.iter().enumerate() {
            let data = crate::variation::enumerate_intersections(rep, w, lam, n)
                .map_err(|e| LaminationError::NotDisjoint(e.to_string()))?;
            if !data.is_empty() {
                met = true;
                break;
            }
        }
        if !met {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The default witness curves of the supported topologies: the two
/// generators and their product for the one-holed torus, the three
/// boundary-pairing curves for the four-holed sphere.
pub fn default_witnesses(surface: &SurfaceData) -> Vec<Word> {
    match (surface.topology.genus, surface.topology.boundary_count) {
        (1, 1) => ["A", "B", "AB"]
            .iter()
            .map(|s| Word::parse(s, &surface.alphabet).expect("valid"))
            .collect(),
        (0, 4) => ["PQ", "QR", "PR"]
            .iter()
            .map(|s| Word::parse(s, &surface.alphabet).expect("valid"))
            .collect(),
        _ => Vec::new(),
    }
}
