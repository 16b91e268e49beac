//! Combinatorial surfaces, Fenchel-Nielsen coordinates and holonomy.
//!
//! A surface of genus `g` with `n ≥ 1` boundary components and negative Euler
//! characteristic carries hyperbolic metrics with geodesic boundary of
//! prescribed lengths. A pant decomposition with interior curves
//! `κ_1 … κ_{3g-3+n}` induces coordinates `(l_j, τ_j)` on the space of such
//! metrics with the boundary lengths held fixed, and the symplectic form in
//! these coordinates is `ϖ = 2 Σ_j dl_j ∧ dτ_j`.
//!
//! Holonomy representations are built by explicit pants gluing. Two pants
//! graphs are first-class: the one-holed torus (single pants with two cuffs
//! identified) and the four-holed sphere (two pants glued along one cuff).
//! Both have a single interior curve, so the coordinate slice is
//! two-dimensional.
//!
//! Twist convention: increasing `τ_j` is the left earthquake along `κ_j`
//! (weight one, unit time equals unit twist length). The finite-difference
//! tests of the variation module pin this sign.

use crate::minkowski::{Isometry, Mat2};
use crate::words::{Word, WordError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SurfaceError {
    #[error("Euler characteristic must be negative, got {0}")]
    NonNegativeEuler(i64),
    #[error("expected {expected} interior curves for this topology, got {got}")]
    CurveCount { expected: usize, got: usize },
    #[error("unsupported pants graph: only the one-holed torus and the four-holed sphere are constructible")]
    UnsupportedTopology,
    #[error("interior curve {got:?} does not match the canonical curve {expected:?} of this pants graph")]
    UnsupportedCurve { expected: String, got: String },
    #[error("lengths must be positive, got {0}")]
    NonPositiveLength(f64),
    #[error("coordinate arrays have wrong dimensions")]
    DimensionMismatch,
    #[error("word maps to a non-hyperbolic isometry (|trace| = {0})")]
    NotHyperbolic(f64),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Genus and boundary count with the standing hypothesis χ = 2−2g−n < 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceTopology {
    pub genus: usize,
    pub boundary_count: usize,
}

impl SurfaceTopology {
    pub fn new(genus: usize, boundary_count: usize) -> Result<Self, SurfaceError> {
        let t = SurfaceTopology { genus, boundary_count };
        if t.euler_characteristic() >= 0 || boundary_count == 0 {
            return Err(SurfaceError::NonNegativeEuler(t.euler_characteristic()));
        }
        Ok(t)
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.boundary_count as i64
    }

    pub fn interior_curve_count(&self) -> usize {
        (3 * self.genus as i64 - 3 + self.boundary_count as i64).max(0) as usize
    }
}

/// Interior curves of a pant decomposition, as words in the generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PantDecomposition {
    pub curves: Vec<Word>,
}

/// Combinatorial surface: topology, generating set, peripheral structure and
/// pant decomposition. Boundary words traverse each component in its positive
/// sense; this choice orients the boundary once and for all.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceData {
    pub topology: SurfaceTopology,
    pub alphabet: Vec<char>,
    pub boundary_words: Vec<Word>,
    pub pants: PantDecomposition,
}

impl SurfaceData {
    /// One-holed torus: free generators A, B, boundary word `ABab`,
    /// decomposition curve `A`.
    pub fn one_holed_torus() -> SurfaceData {
        let alphabet = vec!['A', 'B'];
        let boundary = Word::parse("ABab", &alphabet).expect("valid");
        let curve = Word::parse("A", &alphabet).expect("valid");
        SurfaceData {
            topology: SurfaceTopology::new(1, 1).expect("χ = -1"),
            alphabet,
            boundary_words: vec![boundary],
            pants: PantDecomposition { curves: vec![curve] },
        }
    }

    /// Four-holed sphere: free generators P, Q, R, boundary words
    /// `P, Q, R, rqp`, decomposition curve `PQ`.
    pub fn four_holed_sphere() -> SurfaceData {
        let alphabet = vec!['P', 'Q', 'R'];
        let parse = |s: &str| Word::parse(s, &['P', 'Q', 'R']).expect("valid");
        SurfaceData {
            topology: SurfaceTopology::new(0, 4).expect("χ = -2"),
            alphabet,
            boundary_words: vec![parse("P"), parse("Q"), parse("R"), parse("rqp")],
            pants: PantDecomposition { curves: vec![parse("PQ")] },
        }
    }

    pub fn parse_word(&self, s: &str) -> Result<Word, SurfaceError> {
        Ok(Word::parse(s, &self.alphabet)?)
    }

    /// Whether a word is conjugate to a power of a boundary word by the
    /// cheap cyclic test (sufficient for the curve classes used here).
    pub fn is_peripheral(&self, w: &Word) -> bool {
        if w.is_empty() {
            return false;
        }
        self.boundary_words.iter().any(|b| {
            w.is_power_of(b) || w.is_power_of(&b.inverse()) || w.inverse().is_power_of(b)
        })
    }
}

/// Images of the generators under a discrete faithful representation into
/// the isometry group, maintained in both the 2×2 and 3×3 models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolonomyRep {
    pub alphabet: Vec<char>,
    pub generators: Vec<Isometry>,
    pub boundary_words: Vec<Word>,
}

impl HolonomyRep {
    pub fn evaluate(&self, w: &Word) -> Isometry {
        let mut m = Isometry::IDENTITY;
        for l in w.letters() {
            let g = &self.generators[l.generator];
            let g = if l.inverse { g.inverse() } else { *g };
            m = m.mul(&g);
        }
        m
    }

    pub fn boundary_holonomy(&self, i: usize) -> Isometry {
        self.evaluate(&self.boundary_words[i])
    }

    /// Geodesic length of the free homotopy class of `w`,
    /// `ℓ = 2 arcosh(|tr|/2)` in the 2×2 model.
    pub fn curve_length(&self, w: &Word) -> Result<f64, SurfaceError> {
        let m = self.evaluate(w);
        m.translation_length()
            .ok_or_else(|| SurfaceError::NotHyperbolic(m.half_plane.trace().abs()))
    }
}

/// A point of the Teichmüller space with fixed boundary lengths: interior
/// curve lengths, twists, boundary lengths, and the cached holonomy.
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeichmullerPoint {
    pub surface: SurfaceData,
    pub lengths: Vec<f64>,
    pub twists: Vec<f64>,
    pub boundary_lengths: Vec<f64>,
    pub holonomy: HolonomyRep,
}

impl TeichmullerPoint {
    pub fn new(
        surface: &SurfaceData,
        lengths: &[f64],
        twists: &[f64],
        boundary_lengths: &[f64],
    ) -> Result<TeichmullerPoint, SurfaceError> {
        let holonomy = build_holonomy(surface, lengths, twists, boundary_lengths)?;
        Ok(TeichmullerPoint {
            surface: surface.clone(),
            lengths: lengths.to_vec(),
            twists: twists.to_vec(),
            boundary_lengths: boundary_lengths.to_vec(),
            holonomy,
        })
    }

    /// Left earthquake along the decomposition curve `κ_j` with weight `ω`
    /// for time `t`: the twist `τ_j` increases by `t·ω`, everything else is
    /// unchanged.
    pub fn twist_flow(&self, j: usize, t: f64, weight: f64) -> Result<TeichmullerPoint, SurfaceError> {
        if j >= self.twists.len() {
            return Err(SurfaceError::DimensionMismatch);
        }
        let mut twists = self.twists.clone();
        twists[j] += t * weight;
        TeichmullerPoint::new(&self.surface, &self.lengths, &twists, &self.boundary_lengths)
    }

    /// The point with the given coordinates on the same surface and boundary.
    pub fn with_coordinates(&self, lengths: &[f64], twists: &[f64]) -> Result<TeichmullerPoint, SurfaceError> {
        TeichmullerPoint::new(&self.surface, lengths, twists, &self.boundary_lengths)
    }

    /// Largest FN-to-holonomy consistency residual: interior curve lengths
    /// and boundary lengths recomputed from the holonomy against the inputs.
    pub fn round_trip_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for (j, kappa) in self.surface.pants.curves.iter().enumerate() {
            if let Ok(l) = self.holonomy.curve_length(kappa) {
                r = r.max((l - self.lengths[j]).abs());
            } else {
                r = f64::INFINITY;
            }
        }
        for (i, b) in self.boundary_lengths.iter().enumerate() {
            if let Ok(l) = self.holonomy.curve_length(&self.surface.boundary_words[i]) {
                r = r.max((l - b).abs());
            } else {
                r = f64::INFINITY;
            }
        }
        r
    }
}

/// Tangent vector in Fenchel-Nielsen coordinates (boundary fixed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FnTangent {
    pub d_lengths: Vec<f64>,
    pub d_twists: Vec<f64>,
}

/// The symplectic form `ϖ = 2 Σ_j dl_j ∧ dτ_j` on tangent vectors expressed
/// in the coordinates of one fixed pant decomposition.
pub fn symplectic_pair(u: &FnTangent, v: &FnTangent) -> Result<f64, SurfaceError> {
    if u.d_lengths.len() != v.d_lengths.len()
        || u.d_twists.len() != v.d_twists.len()
        || u.d_lengths.len() != u.d_twists.len()
    {
        return Err(SurfaceError::DimensionMismatch);
    }
    Ok(2.0
        * u.d_lengths
            .iter()
            .zip(&u.d_twists)
            .zip(v.d_lengths.iter().zip(&v.d_twists))
            .map(|((ul, ut), (vl, vt))| ul * vt - ut * vl)
            .sum::<f64>())
}

/// Maximal trapping width of the boundary collar: every simple complete
/// geodesic that enters the collar of this width never exits.
///
/// Derivation: normalize a boundary lift to the imaginary axis with holonomy
/// `z ↦ e^b z`. A simple non-spiralling geodesic lifts to a geodesic with
/// endpoints `0 < z < z' ≤ e^b z` (up to mirror), whose distance to the axis
/// is `artanh(2√r/(1+r))` with `r = z'/z ∈ (1, e^b]`, minimized at `r = e^b`
/// where it equals `arcsinh(1/sinh(b/2))`. Spiralling geodesics share an
/// endpoint with the axis and converge to it monotonically, so the trapping
/// property holds exactly below this width and fails above it.
pub fn collar_width(b: f64) -> Result<f64, SurfaceError> {
    if b <= 0.0 {
        return Err(SurfaceError::NonPositiveLength(b));
    }
    Ok((1.0 / (b / 2.0).sinh()).asinh())
}

/// Builds the holonomy representation from Fenchel-Nielsen data.
///
/// Cuff traces are matched exactly by construction; the gluing isometry of
/// the four-holed sphere carries the twist, while the one-holed torus twists
/// by left-multiplying the crossing generator with a translation along the
/// glued cuff.
pub fn build_holonomy(
    surface: &SurfaceData,
    lengths: &[f64],
    twists: &[f64],
    boundary_lengths: &[f64],
) -> Result<HolonomyRep, SurfaceError> {
    let expected = surface.topology.interior_curve_count();
    if surface.pants.curves.len() != expected {
        return Err(SurfaceError::CurveCount { expected, got: surface.pants.curves.len() });
    }
    if lengths.len() != expected
        || twists.len() != expected
        || boundary_lengths.len() != surface.topology.boundary_count
    {
        return Err(SurfaceError::DimensionMismatch);
    }
    for &l in lengths.iter().chain(boundary_lengths) {
        if !(l > 0.0) {
            return Err(SurfaceError::NonPositiveLength(l));
        }
    }
    match (surface.topology.genus, surface.topology.boundary_count) {
        (1, 1) => build_one_holed_torus(surface, lengths[0], twists[0], boundary_lengths[0]),
        (0, 4) => build_four_holed_sphere(surface, lengths[0], twists[0], boundary_lengths),
        _ => Err(SurfaceError::UnsupportedTopology),
    }
}

fn check_canonical_curve(surface: &SurfaceData, canonical: &str) -> Result<(), SurfaceError> {
    let expected = surface.parse_word(canonical)?;
    let got = &surface.pants.curves[0];
    if *got != expected {
        return Err(SurfaceError::UnsupportedCurve {
            expected: canonical.to_string(),
            got: got.render(&surface.alphabet),
        });
    }
    Ok(())
}

/// One-holed torus along the curve `A`:
/// `h(A) = T(l)` (translation along the imaginary axis), `h(B) = T(τ)·Y0`
/// with `Y0` the translation along the unit half-circle chosen so that
/// `tr [A,B] = −2 cosh(b/2)`.
fn build_one_holed_torus(
    surface: &SurfaceData,
    l: f64,
    tau: f64,
    b: f64,
) -> Result<HolonomyRep, SurfaceError> {
    check_canonical_curve(surface, "A")?;
    // tr [X, Y0] = 2 − 2 sinh²m (cosh l − 1) = −2 cosh(b/2)
    let m = ((1.0 + (b / 2.0).cosh()) / (l.cosh() - 1.0)).sqrt().asinh();
    let x = Mat2::translation(l);
    let y0 = Mat2::new(m.cosh(), m.sinh(), m.sinh(), m.cosh());
    let y = Mat2::translation(tau).mul(&y0);
    Ok(HolonomyRep {
        alphabet: surface.alphabet.clone(),
        generators: vec![Isometry::from_mat2(x), Isometry::from_mat2(y)],
        boundary_words: surface.boundary_words.clone(),
    })
}

/// Matrices of a pair of pants with cuff lengths `(l1, l2, l3)`:
/// `C1 C2 C3 = ±Id`, `|tr C_i| = 2 cosh(l_i/2)`, with the cuff-1 axis on the
/// imaginary axis translating upward and the pants on its right.
fn pants_matrices(l1: f64, l2: f64, l3: f64) -> (Mat2, Mat2, Mat2) {
    let (a1, a2, a3) = (l1 / 2.0, l2 / 2.0, l3 / 2.0);
    // seam between cuffs 1 and 2 (right-angled hexagon relation)
    let cosh_seam = (a3.cosh() + a1.cosh() * a2.cosh()) / (a1.sinh() * a2.sinh());
    let s = cosh_seam.acosh();
    let c1 = Mat2::translation(l1);
    let m = Mat2::new((s / 2.0).cosh(), (s / 2.0).sinh(), (s / 2.0).sinh(), (s / 2.0).cosh());
    let c2 = m.mul(&Mat2::translation(-l2)).mul(&m.inverse());
    let c3 = c1.mul(&c2).inverse();
    (c1, c2, c3)
}

/// Möbius transformation sending `(0, ∞)` to the ordered pair of ideal
/// points `(from, to)` given as half-plane boundary coordinates
/// (`None` is ∞).
fn mobius_axis_to(from: Option<f64>, to: Option<f64>) -> Mat2 {
    match (from, to) {
        (Some(r), Some(a)) => {
            let k = 1.0 / (a - r);
            Mat2::new(a * k, r, k, 1.0)
        }
        (Some(r), None) => Mat2::new(1.0, r, 0.0, 1.0),
        (None, Some(a)) => Mat2::new(-a, 1.0, -1.0, 0.0),
        (None, None) => Mat2::IDENTITY,
    }
}

/// Four-holed sphere along the curve `PQ`: pants `(b1, b2, l)` carries the
/// generators P, Q; pants `(l, b3, b4)` carries R and the fourth boundary,
/// conjugated by the gluing isometry `G(τ)` that matches the cuff holonomy
/// `PQ` and realizes the twist.
fn build_four_holed_sphere(
    surface: &SurfaceData,
    l: f64,
    tau: f64,
    b: &[f64],
) -> Result<HolonomyRep, SurfaceError> {
    check_canonical_curve(surface, "PQ")?;
    let (a1, a2, _k) = pants_matrices(b[0], b[1], l);
    let (_b1, b2, b3) = pants_matrices(l, b[2], b[3]);
    // h(PQ) = A1·A2, hyperbolic of translation length l
    let kappa = Isometry::from_mat2(a1.mul(&a2));
    let (attr, rep) = kappa.fixed_points().expect("cuff holonomy is hyperbolic");
    let g0 = mobius_axis_to(rep.boundary_coordinate(), attr.boundary_coordinate());
    let g = g0.mul(&Mat2::translation(tau));
    let conj = |w: &Mat2| g.mul(w).mul(&g.inverse());
    Ok(HolonomyRep {
        alphabet: surface.alphabet.clone(),
        generators: vec![
            Isometry::from_mat2(a1),
            Isometry::from_mat2(a2),
            Isometry::from_mat2(conj(&b2)),
        ],
        boundary_words: surface.boundary_words.clone(),
    })
    .map(|h| {
        debug_assert!({
            let x4 = conj(&b3);
            let r = h.evaluate(&surface.boundary_words[3]);
            (r.half_plane.trace().abs() - x4.trace().abs()).abs() < 1e-9
        });
        h
    })
}
