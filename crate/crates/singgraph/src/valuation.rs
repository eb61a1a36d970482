//! Points of the dual graph as (quasi-)monomial valuations: the metric,
//! thinness along edges, divisor evaluation, Mumford pull-back, and dual
//! divisors of edge points.
//!
//! Orientation convention, shared by every operation here and by the blow-up
//! module: an edge point is stored with an ordered pair `(E, E')` and a
//! rational parameter `t` in `(0, 1)`, where `t = 1` is the `E` end and
//! `t = 0` the `E'` end. Reversing the pair replaces `t` by `1 - t` and
//! denotes the same point.

use crate::arith::{format_rat, Rat};
use crate::blowup::divisorialize;
use crate::graph::{dual_divisor_by_index, DualGraph, ExceptionalData, GraphError};
use crate::linalg;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValuationError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("edge parameter {0} outside the open interval (0, 1)")]
    BadParameter(String),
    #[error("points do not lie on a common edge")]
    NotSameEdge,
}

/// A point of the dual graph: a vertex, or an interior edge point with exact
/// rational parameter standing for a monomial valuation at the corresponding
/// double point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphPoint {
    Vertex(String),
    Edge { a: String, b: String, t: Rat },
}

impl GraphPoint {
    pub fn vertex(id: impl Into<String>) -> Self {
        GraphPoint::Vertex(id.into())
    }

    /// Interior point of the edge `(a, b)`; `t = 1` is the `a` end.
    pub fn edge(
        a: impl Into<String>,
        b: impl Into<String>,
        t: Rat,
    ) -> Result<Self, ValuationError> {
        if t <= Rat::zero() || t >= Rat::one() {
            return Err(ValuationError::BadParameter(format_rat(&t)));
        }
        Ok(GraphPoint::Edge {
            a: a.into(),
            b: b.into(),
            t,
        })
    }
}

/// A function on the fixed graph's divisorial valuations, stored as exact
/// vertex values; the function/divisor dictionary at one resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeilOnGraph {
    pub values: Vec<Rat>,
}

/// Vertex data of the dual divisor of an edge point, plus the peak of the
/// interior correction term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeDualDivisor {
    /// Values at the fixed graph's vertices of the function of `Z_{nu_t}`;
    /// the correction is supported in the open edge so these are the plain
    /// affine interpolation of the endpoint dual-divisor functions.
    pub vertex_values: WeilOnGraph,
    /// Peak value of the interior correction at the point itself:
    /// `t (1 - t) / (b_E b_E')`.
    pub peak: Rat,
}

fn edge_exists(g: &DualGraph, i: usize, j: usize) -> bool {
    if i == j {
        g.vertex(i).loops > 0
    } else {
        g.edge_multiplicity(i, j) > 0
    }
}

/// Resolves a point against its graph: vertex index pair plus parameter,
/// normalized to the stored orientation of the caller's pair.
fn locate(g: &DualGraph, p: &GraphPoint) -> Result<(usize, usize, Rat), ValuationError> {
    match p {
        GraphPoint::Vertex(id) => {
            let i = g.index_of(id)?;
            Ok((i, i, Rat::one()))
        }
        GraphPoint::Edge { a, b, t } => {
            let i = g.index_of(a)?;
            let j = g.index_of(b)?;
            if !edge_exists(g, i, j) {
                return Err(GraphError::NoSuchEdge(a.clone(), b.clone()).into());
            }
            Ok((i, j, t.clone()))
        }
    }
}

/// Metric distance between two points of one edge (endpoints included):
/// `|t_p - t_q| / (b_E b_E')`.
pub fn metric_distance(
    g: &DualGraph,
    data: &ExceptionalData,
    p: &GraphPoint,
    q: &GraphPoint,
) -> Result<Rat, ValuationError> {
    // Identify the common edge and express both parameters in its
    // orientation.
    let (i, j, ti, tj) = match (p, q) {
        (GraphPoint::Vertex(x), GraphPoint::Vertex(y)) => {
            let i = g.index_of(x)?;
            let j = g.index_of(y)?;
            if !edge_exists(g, i, j) {
                return Err(ValuationError::NotSameEdge);
            }
            (i, j, Rat::one(), Rat::zero())
        }
        (GraphPoint::Edge { a, b, t }, GraphPoint::Vertex(v))
        | (GraphPoint::Vertex(v), GraphPoint::Edge { a, b, t }) => {
            let i = g.index_of(a)?;
            let j = g.index_of(b)?;
            let k = g.index_of(v)?;
            if !edge_exists(g, i, j) {
                return Err(GraphError::NoSuchEdge(a.clone(), b.clone()).into());
            }
            let tv = if k == i {
                Rat::one()
            } else if k == j {
                Rat::zero()
            } else {
                return Err(ValuationError::NotSameEdge);
            };
            (i, j, t.clone(), tv)
        }
        (
            GraphPoint::Edge { a, b, t },
            GraphPoint::Edge {
                a: a2,
                b: b2,
                t: t2,
            },
        ) => {
            let i = g.index_of(a)?;
            let j = g.index_of(b)?;
            let i2 = g.index_of(a2)?;
            let j2 = g.index_of(b2)?;
            if !edge_exists(g, i, j) {
                return Err(GraphError::NoSuchEdge(a.clone(), b.clone()).into());
            }
            let t2 = if (i2, j2) == (i, j) {
                t2.clone()
            } else if (i2, j2) == (j, i) {
                Rat::one() - t2
            } else {
                return Err(ValuationError::NotSameEdge);
            };
            (i, j, t.clone(), t2)
        }
    };
    let len = (data.multiplicity_rat(i) * data.multiplicity_rat(j)).recip();
    Ok((ti - tj).abs() * len)
}

/// Thinness at any graph point: the vertex value, or the affine
/// interpolation `t A_E + (1 - t) A_E'` on an edge.
pub fn thinness_at(
    g: &DualGraph,
    data: &ExceptionalData,
    p: &GraphPoint,
) -> Result<Rat, ValuationError> {
    let (i, j, t) = locate(g, p)?;
    Ok(&t * &data.thinness[i] + (Rat::one() - &t) * &data.thinness[j])
}

/// Mumford numerical pull-back: the exceptional part `z` of the pull-back of
/// a Weil divisor whose strict transform meets `E_i` with total multiplicity
/// `strict_intersections[i]`, i.e. the exact solution of `M z = -v`. Entries
/// are strictly positive whenever `v != 0`.
pub fn mumford_pullback(
    g: &DualGraph,
    strict_intersections: &[u64],
) -> Result<Vec<Rat>, ValuationError> {
    if strict_intersections.len() != g.n() {
        return Err(
            GraphError::BadParameters("strict intersection vector length mismatch".into()).into(),
        );
    }
    let m = g.intersection_matrix();
    let rhs: Vec<BigInt> = strict_intersections
        .iter()
        .map(|&v| -BigInt::from(v))
        .collect();
    let z = linalg::solve(&m, &rhs).map_err(|_| GraphError::SingularMatrix)?;
    Ok(z)
}

/// Value of the normalized valuation at `p` on a divisor with exceptional
/// part `z_total` (strict transform assumed to miss `p`): `z_E / b_E` at a
/// vertex, the `b`-weighted affine interpolation at an edge point.
pub fn evaluate_divisor(
    g: &DualGraph,
    data: &ExceptionalData,
    z_total: &[Rat],
    p: &GraphPoint,
) -> Result<Rat, ValuationError> {
    if z_total.len() != g.n() {
        return Err(GraphError::BadParameters("divisor vector length mismatch".into()).into());
    }
    let (i, j, t) = locate(g, p)?;
    let vi = &z_total[i] / data.multiplicity_rat(i);
    let vj = &z_total[j] / data.multiplicity_rat(j);
    Ok(&t * vi + (Rat::one() - &t) * vj)
}

/// Dual divisor of the edge point at parameter `t` of `(e0, e1)`, reported
/// through its function on the fixed graph: at every vertex the value is
/// the affine combination `t g_1 + (1 - t) g_0` of the endpoint dual-divisor
/// functions (`g_1` for `e0`, matching `t = 1`), the interior correction
/// vanishing at vertices. Accepts the closed interval `[0, 1]`.
pub fn dual_divisor_at_edge_point(
    g: &DualGraph,
    data: &ExceptionalData,
    e0: &str,
    e1: &str,
    t: &Rat,
) -> Result<EdgeDualDivisor, ValuationError> {
    if t < &Rat::zero() || t > &Rat::one() {
        return Err(ValuationError::BadParameter(format_rat(t)));
    }
    let i = g.index_of(e0)?;
    let j = g.index_of(e1)?;
    if !edge_exists(g, i, j) {
        return Err(GraphError::NoSuchEdge(e0.to_string(), e1.to_string()).into());
    }
    let zi = dual_divisor_by_index(g, i)?;
    let zj = dual_divisor_by_index(g, j)?;
    let bi = data.multiplicity_rat(i);
    let bj = data.multiplicity_rat(j);
    let values = (0..g.n())
        .map(|v| {
            let g1 = &zi[v] / (&bi * data.multiplicity_rat(v));
            let g0 = &zj[v] / (&bj * data.multiplicity_rat(v));
            t * g1 + (Rat::one() - t) * g0
        })
        .collect();
    let peak = t * (Rat::one() - t) / (&bi * &bj);
    Ok(EdgeDualDivisor {
        vertex_values: WeilOnGraph { values },
        peak,
    })
}

/// Intersection number `Z_p . Z_q` of the dual divisors of the normalized
/// valuations at two graph points.
///
/// Vertex pairs read the solved dual divisor directly; a vertex against an
/// edge point evaluates the edge point's dual-divisor function at the
/// vertex. Two edge points on the same edge pair through the function of
/// the subdivision that makes one of them divisorial: the affine part
/// interpolated at `t_p` minus the interior correction, a tent function
/// that vanishes at the endpoints and peaks at `t_q`. Two edge points on
/// different edges subdivide one edge and recurse. Always symmetric, and
/// strictly negative on the diagonal.
///
/// Points on parallel edges are addressed by the endpoint pair only, so
/// the formulas treat them on one shared copy.
pub fn pair_dual_divisors(
    g: &DualGraph,
    data: &ExceptionalData,
    p: &GraphPoint,
    q: &GraphPoint,
) -> Result<Rat, ValuationError> {
    match (p, q) {
        (GraphPoint::Vertex(x), GraphPoint::Vertex(y)) => {
            let i = g.index_of(x)?;
            let j = g.index_of(y)?;
            let z = dual_divisor_by_index(g, j)?;
            Ok(&z[i] / (data.multiplicity_rat(i) * data.multiplicity_rat(j)))
        }
        (GraphPoint::Vertex(v), GraphPoint::Edge { a, b, t })
        | (GraphPoint::Edge { a, b, t }, GraphPoint::Vertex(v)) => {
            let i = g.index_of(v)?;
            let dual = dual_divisor_at_edge_point(g, data, a, b, t)?;
            // the correction vanishes at vertices, so the pairing is the
            // plain function value there
            Ok(dual.vertex_values.values[i].clone())
        }
        (
            GraphPoint::Edge {
                a: pa,
                b: pb,
                t: tp,
            },
            GraphPoint::Edge {
                a: qa,
                b: qb,
                t: tq,
            },
        ) => {
            let ia = g.index_of(pa)?;
            let ib = g.index_of(pb)?;
            let ja = g.index_of(qa)?;
            let jb = g.index_of(qb)?;
            let same = (ja, jb) == (ia, ib);
            let flipped = (ja, jb) == (ib, ia) && ia != ib;
            if same || flipped {
                // express q in p's orientation and evaluate g_q at p
                let tq = if same { tq.clone() } else { Rat::one() - tq };
                let dual = dual_divisor_at_edge_point(g, data, pa, pb, &tq)?;
                let affine = tp * &dual.vertex_values.values[ia]
                    + (Rat::one() - tp) * &dual.vertex_values.values[ib];
                // tent profile of the correction along the edge
                let ratio = if *tp <= tq {
                    tp / &tq
                } else {
                    (Rat::one() - tp) / (Rat::one() - &tq)
                };
                Ok(affine - dual.peak * ratio)
            } else {
                // make q divisorial; p's edge is untouched by that rewrite
                let (g2, f) = divisorialize(g, qa, qb, tq)?;
                let data2 = ExceptionalData::compute(&g2)?;
                pair_dual_divisors(&g2, &data2, p, &GraphPoint::Vertex(f))
            }
        }
    }
}
