//! Decomposition of balanced lamination tuples into circuits of spiralling
//! leaves.
//!
//! The spiralling leaves of a tuple form a multigraph: one vertex per
//! boundary component, one edge per leaf, each endpoint marked `⊞` or `⊟`
//! with the spiralling sense. For a balanced tuple the weighted marks cancel
//! at every vertex, and the graph then always contains a *switching cycle* —
//! a closed edge path whose consecutive endpoint marks alternate. Peeling
//! switching cycles off with the largest weight that keeps all residual
//! weights nonnegative zeroes at least one edge per round, so the tuple
//! decomposes into finitely many circuits plus its compact part.
//!
//! Weights are exact rationals inside this module (binary floating-point
//! input converts exactly), so the conservation of leaf weights across the
//! peeling loop holds with equality, not within a tolerance.

use crate::lamination::{Leaf, LaminationTuple, LeafId, MeasuredLamination, SpiralSign};
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub type Weight = Ratio<i128>;

#[derive(Debug, Error)]
pub enum CircuitalError {
    #[error("tuple is not balanced: signed masses do not cancel at every boundary")]
    NotSharp,
    #[error("weight {0} is not representable as an exact rational")]
    WeightNotRepresentable(f64),
    #[error("invalid lamination: {0}")]
    Lamination(#[from] crate::lamination::LaminationError),
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("switching walk failed to close: {0}")]
    WalkFailed(String),
}

/// Exact conversion of a finite binary float to a rational.
pub fn weight_from_f64(w: f64) -> Result<Weight, CircuitalError> {
    if !w.is_finite() {
        return Err(CircuitalError::WeightNotRepresentable(w));
    }
    let bits = w.to_bits();
    let sign: i128 = if bits >> 63 == 1 { -1 } else { 1 };
    let exponent = ((bits >> 52) & 0x7ff) as i64;
    let mantissa = (bits & ((1u64 << 52) - 1)) as i128;
    let (mantissa, exponent) = if exponent == 0 {
        (mantissa, -1074i64)
    } else {
        (mantissa | (1 << 52), exponent - 1075)
    };
    let value = sign * mantissa;
    if exponent >= 0 {
        if exponent > 60 {
            return Err(CircuitalError::WeightNotRepresentable(w));
        }
        Ok(Ratio::from_integer(value << exponent))
    } else {
        let shift = -exponent;
        if shift > 100 {
            // subnormal or extreme scale, outside the weights this library uses
            return Err(CircuitalError::WeightNotRepresentable(w));
        }
        Ok(Ratio::new(value, 1i128 << shift))
    }
}

pub fn weight_to_f64(w: &Weight) -> f64 {
    (*w.numer() as f64) / (*w.denom() as f64)
}

/// An edge of the spiral multigraph: a spiralling leaf with its two marked
/// endpoints, ordered as (start, end).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub leaf: LeafId,
    /// (vertex = boundary index, mark = spiralling sense) of the two ends.
    pub ends: [(usize, SpiralSign); 2],
    pub weight: Weight,
}

impl GraphEdge {
    fn end(&self, which: usize) -> (usize, SpiralSign) {
        self.ends[which]
    }
}

/// The signed multigraph of spiralling leaves over the boundary vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpiralMultigraph {
    pub vertex_count: usize,
    /// Edges ordered lexicographically by leaf id.
    pub edges: Vec<GraphEdge>,
}

impl SpiralMultigraph {
    /// Weighted mark balance at a vertex: `Σ(ω over ⊞) − Σ(ω over ⊟)`.
    pub fn vertex_balance(&self, v: usize) -> Weight {
        let mut s = Weight::zero();
        for e in &self.edges {
            for &(vertex, mark) in &e.ends {
                if vertex == v {
                    match mark {
                        SpiralSign::Plus => s += e.weight,
                        SpiralSign::Minus => s -= e.weight,
                    }
                }
            }
        }
        s
    }

    pub fn is_balanced(&self) -> bool {
        (0..self.vertex_count).all(|v| self.vertex_balance(v).is_zero())
    }
}

/// Builds the multigraph of a balanced tuple: one edge per spiralling leaf,
/// marks transcribing the spiral senses. Closed leaves are excluded.
pub fn build_multigraph(
    tuple: &LaminationTuple,
    boundary_count: usize,
) -> Result<SpiralMultigraph, CircuitalError> {
    if !crate::lamination::is_sharp(tuple, boundary_count)? {
        return Err(CircuitalError::NotSharp);
    }
    let mut edges = Vec::new();
    for (id, leaf) in tuple.indexed_leaves() {
        if let Leaf::Spiral { start, end, weight } = leaf {
            edges.push(GraphEdge {
                leaf: id,
                ends: [(start.boundary, start.sign), (end.boundary, end.sign)],
                weight: weight_from_f64(*weight)?,
            });
        }
    }
    edges.sort_by_key(|e| e.leaf);
    Ok(SpiralMultigraph { vertex_count: boundary_count, edges })
}

/// One step of a circuit: an edge index and the traversal direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitStep {
    pub edge: usize,
    pub reversed: bool,
}

impl CircuitStep {
    /// (vertex, mark) the step departs from.
    fn departure(self, g: &SpiralMultigraph) -> (usize, SpiralSign) {
        g.edges[self.edge].end(if self.reversed { 1 } else { 0 })
    }

    /// (vertex, mark) the step arrives at.
    fn arrival(self, g: &SpiralMultigraph) -> (usize, SpiralSign) {
        g.edges[self.edge].end(if self.reversed { 0 } else { 1 })
    }
}

/// An unweighted switching cycle: consecutive steps share a vertex at which
/// the arrival and departure marks are opposite, cyclically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchingCycle {
    pub steps: Vec<CircuitStep>,
}

impl SwitchingCycle {
    /// Checks mark alternation at every junction including the closure.
    /// A cycle has at least two steps: consecutive circuit leaves meet
    /// transversally at the shared boundary, so a single traversal cannot
    /// close on itself.
    pub fn is_valid(&self, g: &SpiralMultigraph) -> bool {
        if self.steps.len() < 2 {
            return false;
        }
        let n = self.steps.len();
        (0..n).all(|i| {
            let prev = self.steps[i];
            let next = self.steps[(i + 1) % n];
            let (va, ma) = prev.arrival(g);
            let (vd, md) = next.departure(g);
            va == vd && ma == md.opposite()
        })
    }

    /// Junction vertices: entry `i` is the boundary where step `i` departs
    /// (equals where the previous step arrives).
    pub fn junctions(&self, g: &SpiralMultigraph) -> Vec<usize> {
        self.steps.iter().map(|s| s.departure(g).0).collect()
    }

    /// Signed mark count of the cycle at a vertex (with multiplicity).
    pub fn vertex_mark_balance(&self, g: &SpiralMultigraph, v: usize) -> i64 {
        let mut s = 0;
        for step in &self.steps {
            for (vertex, mark) in [step.departure(g), step.arrival(g)] {
                if vertex == v {
                    s += match mark {
                        SpiralSign::Plus => 1,
                        SpiralSign::Minus => -1,
                    };
                }
            }
        }
        s
    }
}

/// Finds a switching cycle by the third-visit walk.
///
/// The walk starts at the smallest `⊟`-marked edge endpoint, always departs
/// with the mark opposite to the arrival mark (choosing the smallest
/// admissible `(edge, endpoint)`), and records every vertex visit; a cycle
/// closes as soon as some earlier visit of the current vertex departed with
/// the mark opposite to the current arrival. On a balanced graph this
/// happens at latest on the third visit of a vertex.
pub fn find_switching_cycle(g: &SpiralMultigraph) -> Result<SwitchingCycle, CircuitalError> {
    if g.edges.is_empty() {
        return Err(CircuitalError::EmptyGraph);
    }
    // smallest ⊟-marked endpoint
    let start = g
        .edges
        .iter()
        .enumerate()
        .flat_map(|(i, e)| [(i, 0, e.end(0)), (i, 1, e.end(1))])
        .find(|(_, _, (_, mark))| *mark == SpiralSign::Minus)
        .ok_or_else(|| CircuitalError::WalkFailed("no ⊟ mark in a nonempty balanced graph".into()))?;
    let first = CircuitStep { edge: start.0, reversed: start.1 == 1 };

    // visits[k] = (vertex, arrival mark, index in `steps` of the arriving step)
    let mut steps: Vec<CircuitStep> = vec![first];
    let mut visits: Vec<(usize, SpiralSign, usize)> = Vec::new();
    let budget = 2 * g.edges.len() + 2 * g.vertex_count + 4;
    for _ in 0..budget {
        let last = *steps.last().expect("nonempty");
        let (v, arrival_mark) = last.arrival(g);
        // close against an earlier visit of v whose departure switched marks
        // the other way: the subpath between the two visits is a cycle when
        // the earlier departure mark is opposite to the current arrival mark
        for &(pv, _pm, pstep) in &visits {
            if pv == v && steps.len() - (pstep + 1) >= 2 {
                let earlier_departure = steps[pstep + 1].departure(g).1;
                if earlier_departure == arrival_mark.opposite() {
                    let cycle = SwitchingCycle { steps: steps[pstep + 1..].to_vec() };
                    debug_assert!(cycle.is_valid(g));
                    return Ok(cycle);
                }
            }
        }
        visits.push((v, arrival_mark, steps.len() - 1));
        // depart with the opposite mark, smallest admissible endpoint
        let need = arrival_mark.opposite();
        let next = g
            .edges
            .iter()
            .enumerate()
            .flat_map(|(i, e)| [(i, 0, e.end(0)), (i, 1, e.end(1))])
            .find(|(_, _, (vertex, mark))| *vertex == v && *mark == need)
            .ok_or_else(|| {
                CircuitalError::WalkFailed(format!("no {need:?} departure at vertex {v}"))
            })?;
        steps.push(CircuitStep { edge: next.0, reversed: next.1 == 1 });
    }
    Err(CircuitalError::WalkFailed(format!("no cycle within {budget} steps")))
}

/// The weight of a cycle: the minimum over its leaves of
/// `weight(leaf) / multiplicity(leaf in the cycle)`, so that subtracting it
/// zeroes at least one edge.
pub fn circuit_weight(cycle: &SwitchingCycle, g: &SpiralMultigraph) -> Weight {
    let mut mult = std::collections::BTreeMap::<usize, i128>::new();
    for s in &cycle.steps {
        *mult.entry(s.edge).or_insert(0) += 1;
    }
    mult.iter()
        .map(|(&e, &m)| g.edges[e].weight / Ratio::from_integer(m))
        .min()
        .expect("cycle is nonempty")
}

/// A circuit: an ordered cyclic list of spiralling leaves with traversal
/// directions and a common weight, alternating senses at shared boundaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    /// Leaves in cyclic order with traversal direction (`true` = reversed).
    pub edges: Vec<(LeafId, bool)>,
    /// Junction boundary: entry `i` is where leaf `i` starts (and the
    /// previous leaf ends) in the circuit orientation.
    pub junctions: Vec<usize>,
    pub weight: Weight,
}

impl Circuit {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn weight_f64(&self) -> f64 {
        weight_to_f64(&self.weight)
    }
}

/// Result of decomposing a balanced tuple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    /// Compact part, one lamination per input lamination.
    pub compact: Vec<MeasuredLamination>,
    pub circuits: Vec<Circuit>,
}

impl Decomposition {
    /// Stable content hash of the decomposition (circuit structure, weights
    /// and the compact part), hex-encoded.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        for c in &self.circuits {
            h.update(format!("C{}/{};", c.weight.numer(), c.weight.denom()).as_bytes());
            for ((id, rev), j) in c.edges.iter().zip(&c.junctions) {
                h.update(
                    format!("e{},{},{},{};", id.lamination, id.leaf, *rev as u8, j).as_bytes(),
                );
            }
        }
        for (n, lam) in self.compact.iter().enumerate() {
            for leaf in &lam.leaves {
                if let Leaf::Closed { word, weight } = leaf {
                    h.update(format!("k{},{},{:.17e};", n, word, weight).as_bytes());
                }
            }
        }
        let out = h.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Decomposes a balanced tuple into its compact part plus circuits, peeling
/// deterministic switching cycles until no spiralling weight remains.
pub fn decompose(
    tuple: &LaminationTuple,
    boundary_count: usize,
) -> Result<Decomposition, CircuitalError> {
    let compact = tuple.laminations.iter().map(|l| l.compact_part()).collect();
    let mut graph = build_multigraph(tuple, boundary_count)?;
    let mut circuits = Vec::new();
    let spiral_count = graph.edges.len();
    while !graph.edges.is_empty() {
        let cycle = find_switching_cycle(&graph)?;
        let weight = circuit_weight(&cycle, &graph);
        debug_assert!(weight.is_positive());
        circuits.push(Circuit {
            edges: cycle
                .steps
                .iter()
                .map(|s| (graph.edges[s.edge].leaf, s.reversed))
                .collect(),
            junctions: cycle.junctions(&graph),
            weight,
        });
        // subtract and drop zeroed edges
        let mut mult = std::collections::BTreeMap::<usize, i128>::new();
        for s in &cycle.steps {
            *mult.entry(s.edge).or_insert(0) += 1;
        }
        for (&e, &m) in &mult {
            graph.edges[e].weight -= weight * Ratio::from_integer(m);
            debug_assert!(!graph.edges[e].weight.is_negative());
        }
        graph.edges.retain(|e| !e.weight.is_zero());
        if circuits.len() > spiral_count {
            return Err(CircuitalError::WalkFailed(
                "peeling failed to terminate within the leaf-count bound".into(),
            ));
        }
    }
    Ok(Decomposition { compact, circuits })
}

/// All switching cycles up to a length bound, via exhaustive search over
/// mark-alternating step sequences. Cycles are canonicalized up to cyclic
/// rotation. Intended as an independent oracle for small graphs in tests.
pub fn exhaustive_switching_cycles(
    g: &SpiralMultigraph,
    max_len: usize,
) -> Vec<SwitchingCycle> {
    let all_steps: Vec<CircuitStep> = (0..g.edges.len())
        .flat_map(|e| [CircuitStep { edge: e, reversed: false }, CircuitStep { edge: e, reversed: true }])
        .collect();
    let mut found = std::collections::BTreeSet::<Vec<(usize, bool)>>::new();
    let mut out = Vec::new();
    let mut stack: Vec<CircuitStep> = Vec::new();

    fn canonical(steps: &[CircuitStep]) -> Vec<(usize, bool)> {
        let raw: Vec<(usize, bool)> = steps.iter().map(|s| (s.edge, s.reversed)).collect();
        (0..raw.len())
            .map(|r| {
                let mut v = raw.clone();
                v.rotate_left(r);
                v
            })
            .min()
            .expect("nonempty")
    }

    fn dfs(
        g: &SpiralMultigraph,
        all: &[CircuitStep],
        stack: &mut Vec<CircuitStep>,
        max_len: usize,
        found: &mut std::collections::BTreeSet<Vec<(usize, bool)>>,
        out: &mut Vec<SwitchingCycle>,
    ) {
        let cand = SwitchingCycle { steps: stack.clone() };
        if !stack.is_empty() && cand.is_valid(g) && found.insert(canonical(stack)) {
            out.push(cand);
        }
        if stack.len() >= max_len {
            return;
        }
        for &s in all {
            if let Some(&last) = stack.last() {
                let (va, ma) = last.arrival(g);
                let (vd, md) = s.departure(g);
                if va != vd || ma != md.opposite() {
                    continue;
                }
            }
            stack.push(s);
            dfs(g, all, stack, max_len, found, out);
            stack.pop();
        }
    }

    dfs(g, &all_steps, &mut stack, max_len, &mut found, &mut out);
    out
}
