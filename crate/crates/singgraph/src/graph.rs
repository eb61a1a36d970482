//! Weighted dual graphs of good resolutions of normal surface singularities,
//! their intersection theory, and the klt/lc classification.
//!
//! A [`DualGraph`] is a connected multigraph: vertices are exceptional prime
//! divisors carrying self-intersection, geometric genus and a count of nodes
//! (loops); edges are intersection points, with parallel edges allowed so
//! that cusp cycles of length 1 and 2 are first-class.
//!
//! From the intersection matrix the module derives, all in exact arithmetic:
//! discrepancies (the adjunction system), generic multiplicities (fundamental
//! cycle, unless overridden per vertex), thinness/log-discrepancy, dual
//! divisors, and the classification verdict.

use crate::arith::Rat;
use crate::linalg;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Default cap for the fundamental-cycle loop; overridable per call.
pub const DEFAULT_ITER_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("no vertex named {0:?}")]
    NoSuchVertex(String),
    #[error("no edge between {0:?} and {1:?}")]
    NoSuchEdge(String, String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("intersection form is not negative definite: leading principal minor {index} of -M is {minor}")]
    NotNegativeDefinite { index: usize, minor: BigInt },
    #[error("singular intersection matrix (input violates negative definiteness)")]
    SingularMatrix,
    #[error("iteration cap {0} exceeded (input is likely not negative definite)")]
    IterationCap(usize),
    #[error("cannot parse graph: {0}")]
    Parse(String),
}

/// One exceptional prime divisor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexData {
    pub id: String,
    pub self_intersection: i64,
    #[serde(default)]
    pub genus: u32,
    /// Number of nodal self-crossings; each adds 1 to the arithmetic genus
    /// and 2 to the cycle-degree of the vertex, but nothing to the stored
    /// self-intersection.
    #[serde(default)]
    pub loops: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mult_override: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<VertexData>,
    edges: Vec<(String, String)>,
}

/// Weighted dual graph of a good resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualGraph {
    vertices: Vec<VertexData>,
    /// Non-loop edges as index pairs `(i, j)` with `i < j`; multiplicity by
    /// repetition. Self-edges given at construction are folded into
    /// `VertexData::loops`.
    edges: Vec<(usize, usize)>,
    index: BTreeMap<String, usize>,
}

impl DualGraph {
    pub fn new(
        mut vertices: Vec<VertexData>,
        edge_ids: Vec<(String, String)>,
    ) -> Result<Self, GraphError> {
        if vertices.is_empty() {
            return Err(GraphError::BadParameters("graph has no vertices".into()));
        }
        let mut index = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.id.clone(), i).is_some() {
                return Err(GraphError::BadParameters(format!(
                    "duplicate vertex id {:?}",
                    v.id
                )));
            }
        }
        let mut edges = Vec::with_capacity(edge_ids.len());
        for (a, b) in edge_ids {
            let ia = *index
                .get(&a)
                .ok_or_else(|| GraphError::NoSuchVertex(a.clone()))?;
            let ib = *index
                .get(&b)
                .ok_or_else(|| GraphError::NoSuchVertex(b.clone()))?;
            if ia == ib {
                vertices[ia].loops += 1;
            } else {
                edges.push((ia.min(ib), ia.max(ib)));
            }
        }
        Ok(DualGraph {
            vertices,
            edges,
            index,
        })
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[VertexData] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &VertexData {
        &self.vertices[i]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn index_of(&self, id: &str) -> Result<usize, GraphError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| GraphError::NoSuchVertex(id.to_string()))
    }

    pub fn contains_vertex(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    /// Number of edges between two distinct vertices.
    pub fn edge_multiplicity(&self, i: usize, j: usize) -> usize {
        let key = (i.min(j), i.max(j));
        self.edges.iter().filter(|&&e| e == key).count()
    }

    /// Degree counting parallel edges, with each loop contributing 2.
    pub fn cycle_degree(&self, i: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == i || b == i)
            .count()
            + 2 * self.vertices[i].loops as usize
    }

    /// Intersection matrix `M`: diagonal from stored self-intersections,
    /// off-diagonal from edge multiplicities. Loops contribute nothing
    /// beyond the stored value.
    pub fn intersection_matrix(&self) -> Vec<Vec<BigInt>> {
        let n = self.n();
        let mut m = vec![vec![BigInt::zero(); n]; n];
        for (i, v) in self.vertices.iter().enumerate() {
            m[i][i] = BigInt::from(v.self_intersection);
        }
        for &(a, b) in &self.edges {
            m[a][b] += 1;
            m[b][a] += 1;
        }
        m
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                let other = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if !seen[other] {
                    seen[other] = true;
                    stack.push(other);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Parses the graph JSON schema. A self-edge `["v","v"]` is accepted and
    /// folded into the vertex's loop count.
    pub fn from_json(s: &str) -> Result<Self, GraphError> {
        let parsed: GraphJson =
            serde_json::from_str(s).map_err(|e| GraphError::Parse(e.to_string()))?;
        DualGraph::new(parsed.vertices, parsed.edges)
    }

    /// Canonical JSON emission: vertices and edges in stored order, loops in
    /// the `loops` field. `emit -> parse -> emit` is a fixed point.
    pub fn to_json(&self) -> String {
        let doc = GraphJson {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|&(a, b)| (self.vertices[a].id.clone(), self.vertices[b].id.clone()))
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("graph serialization cannot fail")
    }

    /// Deterministic DOT rendering; vertex lines sorted by id, optional
    /// per-vertex invariant labels.
    pub fn to_dot(&self, data: Option<&ExceptionalData>) -> String {
        let mut out = String::from("graph singgraph {\n");
        let mut ids: Vec<usize> = (0..self.n()).collect();
        ids.sort_by(|&a, &b| self.vertices[a].id.cmp(&self.vertices[b].id));
        for i in ids {
            let v = &self.vertices[i];
            let label = match data {
                Some(d) => format!(
                    "{}\\nself={} genus={}\\na={} A={}",
                    v.id,
                    v.self_intersection,
                    v.genus,
                    crate::arith::format_rat(&d.discrepancies[i]),
                    crate::arith::format_rat(&d.thinness[i]),
                ),
                None => format!("{}\\nself={} genus={}", v.id, v.self_intersection, v.genus),
            };
            out.push_str(&format!("  \"{}\" [label=\"{}\"];\n", v.id, label));
        }
        let mut lines: Vec<String> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (&self.vertices[a].id, &self.vertices[b].id);
                let (x, y) = if x <= y { (x, y) } else { (y, x) };
                format!("  \"{}\" -- \"{}\";\n", x, y)
            })
            .collect();
        for v in &self.vertices {
            for _ in 0..v.loops {
                lines.push(format!("  \"{}\" -- \"{}\";\n", v.id, v.id));
            }
        }
        lines.sort();
        out.extend(lines);
        out.push_str("}\n");
        out
    }
}

/// True iff the intersection form is negative definite (all leading
/// principal minors of `-M` positive, by exact elimination).
pub fn check_negative_definite(g: &DualGraph) -> bool {
    negative_definite_report(g).is_ok()
}

/// Like [`check_negative_definite`] but reports the first failing minor.
pub fn negative_definite_report(g: &DualGraph) -> Result<(), GraphError> {
    let m = g.intersection_matrix();
    let neg: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| row.iter().map(|x| -x.clone()).collect())
        .collect();
    linalg::positive_definite(&neg)
        .map_err(|(index, minor)| GraphError::NotNegativeDefinite { index, minor })
}

/// Arithmetic genus used in adjunction: geometric genus plus one per node.
fn arithmetic_genus(v: &VertexData) -> i64 {
    v.genus as i64 + v.loops as i64
}

/// Discrepancies `a_E = ord_E(K)`: the unique exact solution of the
/// adjunction system `sum_j a_j M_ij = 2 p_a(E_i) - 2 - M_ii`.
pub fn discrepancies(g: &DualGraph) -> Result<Vec<Rat>, GraphError> {
    let m = g.intersection_matrix();
    let rhs: Vec<BigInt> = g
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| BigInt::from(2 * arithmetic_genus(v) - 2) - &m[i][i])
        .collect();
    linalg::solve(&m, &rhs).map_err(|_| GraphError::SingularMatrix)
}

/// Coefficients of the fundamental cycle: start from `Z = sum E_i` and bump
/// any coefficient with `Z . E_i > 0` until `Z` is anti-nef.
pub fn fundamental_cycle(g: &DualGraph) -> Result<Vec<BigInt>, GraphError> {
    fundamental_cycle_with_cap(g, DEFAULT_ITER_CAP)
}

pub fn fundamental_cycle_with_cap(g: &DualGraph, cap: usize) -> Result<Vec<BigInt>, GraphError> {
    let m = g.intersection_matrix();
    let n = g.n();
    let mut z = vec![BigInt::one(); n];
    for _ in 0..cap {
        let mut bumped = false;
        for i in 0..n {
            let dot: BigInt = (0..n).map(|j| &m[i][j] * &z[j]).sum();
            if dot.is_positive() {
                z[i] += 1;
                bumped = true;
            }
        }
        if !bumped {
            return Ok(z);
        }
    }
    Err(GraphError::IterationCap(cap))
}

/// Generic multiplicities `b_E`: the per-vertex overrides when every vertex
/// carries one, the fundamental cycle otherwise.
pub fn generic_multiplicities(g: &DualGraph) -> Result<Vec<BigInt>, GraphError> {
    generic_multiplicities_with_cap(g, DEFAULT_ITER_CAP)
}

pub fn generic_multiplicities_with_cap(
    g: &DualGraph,
    cap: usize,
) -> Result<Vec<BigInt>, GraphError> {
    if g.vertices.iter().all(|v| v.mult_override.is_some()) {
        return Ok(g
            .vertices
            .iter()
            .map(|v| BigInt::from(v.mult_override.unwrap()))
            .collect());
    }
    fundamental_cycle_with_cap(g, cap)
}

/// Thinness (log-discrepancy) of the normalized vertex valuations:
/// `A_E = (1 + a_E) / b_E`.
pub fn thinness_at_vertices(g: &DualGraph) -> Result<Vec<Rat>, GraphError> {
    thinness_at_vertices_with_cap(g, DEFAULT_ITER_CAP)
}

pub fn thinness_at_vertices_with_cap(g: &DualGraph, cap: usize) -> Result<Vec<Rat>, GraphError> {
    let a = discrepancies(g)?;
    let b = generic_multiplicities_with_cap(g, cap)?;
    Ok(a.into_iter()
        .zip(b)
        .map(|(a, b)| (Rat::one() + a) / Rat::from_integer(b))
        .collect())
}

/// Per-vertex derived invariants. Dual divisors are solved on demand since
/// classification does not need them.
#[derive(Debug, Clone)]
pub struct ExceptionalData {
    pub discrepancies: Vec<Rat>,
    pub multiplicities: Vec<BigInt>,
    pub thinness: Vec<Rat>,
    pub dual_divisors: Option<Vec<Vec<Rat>>>,
}

impl ExceptionalData {
    pub fn compute(g: &DualGraph) -> Result<Self, GraphError> {
        let discrepancies = discrepancies(g)?;
        let multiplicities = generic_multiplicities(g)?;
        let thinness = discrepancies
            .iter()
            .zip(&multiplicities)
            .map(|(a, b)| (Rat::one() + a.clone()) / Rat::from_integer(b.clone()))
            .collect();
        Ok(ExceptionalData {
            discrepancies,
            multiplicities,
            thinness,
            dual_divisors: None,
        })
    }

    /// Also solve all dual divisors (one linear system per vertex).
    pub fn with_dual_divisors(mut self, g: &DualGraph) -> Result<Self, GraphError> {
        let all = (0..g.n())
            .map(|i| dual_divisor_by_index(g, i))
            .collect::<Result<Vec<_>, _>>()?;
        self.dual_divisors = Some(all);
        Ok(self)
    }

    pub fn multiplicity_rat(&self, i: usize) -> Rat {
        Rat::from_integer(self.multiplicities[i].clone())
    }
}

/// Dual divisor of a vertex: the exact solution of `M z = e_vertex`, dual to
/// the unnormalized valuation `ord_E` under the intersection pairing. Every
/// entry is strictly negative on negative-definite input.
pub fn dual_divisor(g: &DualGraph, vertex: &str) -> Result<Vec<Rat>, GraphError> {
    dual_divisor_by_index(g, g.index_of(vertex)?)
}

pub fn dual_divisor_by_index(g: &DualGraph, i: usize) -> Result<Vec<Rat>, GraphError> {
    let m = g.intersection_matrix();
    let mut rhs = vec![BigInt::zero(); g.n()];
    rhs[i] = BigInt::one();
    let z = linalg::solve(&m, &rhs).map_err(|_| GraphError::SingularMatrix)?;
    debug_assert!(
        !check_negative_definite(g) || z.iter().all(|x| x.is_negative()),
        "dual divisor of a negative-definite graph must be entrywise negative"
    );
    Ok(z)
}

/// Classification verdict for the singularity carried by a minimal good
/// resolution graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Klt,
    LcSimpleElliptic,
    LcCusp,
    LcQuotientOfLc,
    NotLc,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Klt => "KLT",
            Verdict::LcSimpleElliptic => "LC_SIMPLE_ELLIPTIC",
            Verdict::LcCusp => "LC_CUSP",
            Verdict::LcQuotientOfLc => "LC_QUOTIENT_OF_LC",
            Verdict::NotLc => "NOT_LC",
        };
        f.write_str(s)
    }
}

/// Shape of the zero set of the thinness function on the graph.
///
/// Thinness is affine on edges, so the zero set of an lc graph is a union of
/// vertices and whole edges; for minimal resolutions it is one of the listed
/// shapes. `VertexSet` is the fallback for non-minimal input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LcPlaces {
    Empty,
    WholeGraph,
    SingleVertex(String),
    Segment { from: String, to: String },
    VertexSet(Vec<String>),
}

impl fmt::Display for LcPlaces {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LcPlaces::Empty => write!(f, "(empty)"),
            LcPlaces::WholeGraph => write!(f, "whole graph"),
            LcPlaces::SingleVertex(v) => write!(f, "vertex {v}"),
            LcPlaces::Segment { from, to } => write!(f, "segment from {from} to {to}"),
            LcPlaces::VertexSet(vs) => write!(f, "vertices {}", vs.join(", ")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub verdict: Verdict,
    pub min_thinness: Rat,
    pub lc_places: LcPlaces,
}

fn is_cycle(g: &DualGraph) -> bool {
    let edge_count = g.edges.len() + g.vertices.iter().map(|v| v.loops as usize).sum::<usize>();
    edge_count == g.n() && (0..g.n()).all(|i| g.cycle_degree(i) == 2) && g.is_connected()
}

/// Classifies the singularity from its minimal good resolution graph.
///
/// Minimality is the caller's responsibility (see [`minimality_warnings`]):
/// thinness is affine on edges, so its minimum over the whole graph is
/// attained at a vertex, and the sign of that minimum decides klt/lc. The
/// zero-thinness locus is then matched against the known lc shapes: a single
/// elliptic curve, a cycle of rational curves, or the branch locus of a tree
/// (quotient of a simple elliptic or cusp singularity).
pub fn classify(g: &DualGraph) -> Result<Classification, GraphError> {
    classify_with_cap(g, DEFAULT_ITER_CAP)
}

pub fn classify_with_cap(g: &DualGraph, cap: usize) -> Result<Classification, GraphError> {
    negative_definite_report(g)?;
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let thinness = thinness_at_vertices_with_cap(g, cap)?;
    let min = thinness.iter().min().expect("nonempty graph").clone();
    if min.is_positive() {
        return Ok(Classification {
            verdict: Verdict::Klt,
            min_thinness: min,
            lc_places: LcPlaces::Empty,
        });
    }
    if min.is_negative() {
        return Ok(Classification {
            verdict: Verdict::NotLc,
            min_thinness: min,
            lc_places: LcPlaces::Empty,
        });
    }
    let zero: Vec<usize> = (0..g.n()).filter(|&i| thinness[i].is_zero()).collect();
    let all_zero = zero.len() == g.n();
    let single_elliptic =
        g.n() == 1 && g.vertices[0].genus == 1 && g.vertices[0].loops == 0 && g.edges.is_empty();
    if single_elliptic {
        return Ok(Classification {
            verdict: Verdict::LcSimpleElliptic,
            min_thinness: min,
            lc_places: LcPlaces::WholeGraph,
        });
    }
    if all_zero && g.vertices.iter().all(|v| v.genus == 0) && is_cycle(g) {
        return Ok(Classification {
            verdict: Verdict::LcCusp,
            min_thinness: min,
            lc_places: LcPlaces::WholeGraph,
        });
    }
    // Remaining lc shape: finite quotient of a simple elliptic or cusp
    // singularity. On minimal input the zero set is one branched vertex or
    // the segment joining two branched vertices.
    let lc_places = if all_zero {
        LcPlaces::WholeGraph
    } else if zero.len() == 1 {
        LcPlaces::SingleVertex(g.vertices[zero[0]].id.clone())
    } else {
        describe_zero_set(g, &zero)
    };
    Ok(Classification {
        verdict: Verdict::LcQuotientOfLc,
        min_thinness: min,
        lc_places,
    })
}

fn describe_zero_set(g: &DualGraph, zero: &[usize]) -> LcPlaces {
    // Degree of each zero vertex inside the induced subgraph.
    let in_zero = |i: usize| zero.contains(&i);
    let mut degrees: BTreeMap<usize, usize> = zero.iter().map(|&z| (z, 0)).collect();
    for &(a, b) in &g.edges {
        if in_zero(a) && in_zero(b) {
            *degrees.get_mut(&a).unwrap() += 1;
            *degrees.get_mut(&b).unwrap() += 1;
        }
    }
    let ends: Vec<usize> = zero.iter().copied().filter(|v| degrees[v] == 1).collect();
    let path_like = ends.len() == 2
        && zero.iter().all(|v| degrees[v] == 1 || degrees[v] == 2)
        && g.vertices.iter().all(|v| v.loops == 0);
    if path_like {
        let mut names = [
            g.vertices[ends[0]].id.clone(),
            g.vertices[ends[1]].id.clone(),
        ];
        names.sort();
        let [from, to] = names;
        LcPlaces::Segment { from, to }
    } else {
        LcPlaces::VertexSet(zero.iter().map(|&z| g.vertices[z].id.clone()).collect())
    }
}

/// Vertices that look contractible: genus 0, no node, at most two
/// neighbours, self-intersection -1. Their presence means the input is not
/// a minimal good resolution, where the classification shapes are proved.
pub fn minimality_warnings(g: &DualGraph) -> Vec<String> {
    g.vertices
        .iter()
        .enumerate()
        .filter(|(i, v)| {
            v.self_intersection == -1 && v.genus == 0 && v.loops == 0 && g.cycle_degree(*i) <= 2
        })
        .map(|(_, v)| {
            format!(
                "vertex {:?} is a contractible (-1)-curve; input is not a minimal resolution",
                v.id
            )
        })
        .collect()
}

/// Negative continued fraction expansion `n/q = b1 - 1/(b2 - 1/(...))` with
/// all `b_i >= 2`.
pub fn hirzebruch_jung(n: u64, q: u64) -> Result<Vec<u64>, GraphError> {
    if n < 2 || q == 0 || q >= n || gcd(n, q) != 1 {
        return Err(GraphError::BadParameters(format!(
            "need n >= 2, 1 <= q < n, gcd(n, q) = 1; got ({n}, {q})"
        )));
    }
    let (mut n, mut q) = (n, q);
    let mut out = Vec::new();
    while q > 0 {
        let b = n.div_ceil(q);
        out.push(b);
        let next = b * q - n;
        n = q;
        q = next;
    }
    Ok(out)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Hirzebruch-Jung chain resolving the cyclic quotient singularity of type
/// `(n, q)`: a chain of rational curves with self-intersections `-b_i` read
/// from the negative continued fraction of `n/q`.
pub fn cyclic_quotient_graph(n: u64, q: u64) -> Result<DualGraph, GraphError> {
    let bs = hirzebruch_jung(n, q)?;
    let vertices: Vec<VertexData> = bs
        .iter()
        .enumerate()
        .map(|(i, &b)| VertexData {
            id: format!("E{}", i + 1),
            self_intersection: -(b as i64),
            genus: 0,
            loops: 0,
            mult_override: None,
        })
        .collect();
    let edges = (1..bs.len())
        .map(|i| (format!("E{i}"), format!("E{}", i + 1)))
        .collect();
    DualGraph::new(vertices, edges)
}
