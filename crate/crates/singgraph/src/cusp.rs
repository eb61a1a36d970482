//! Cusp singularities from lattices in real quadratic fields, and the
//! rotation numbers of their monomial-type endomorphisms.
//!
//! A lattice `N = Z + Z*omega` embeds in the plane through the two real
//! embeddings. The convex hull of its totally positive elements is bounded
//! by a broken line whose extremal points `n_k` satisfy
//! `n_{k-1} + n_{k+1} = c_k n_k` with integers `c_k >= 2`; one period of the
//! `c_k` under the action of the fundamental totally positive unit is the
//! cycle of self-intersections `-c_k` of the resolution of the associated
//! cusp singularity. Extremal points are found by a brute-force box search
//! with exact sign tests, then an exact convex hull; everything downstream
//! is verified against the recurrence and the transfer-matrix trace.
//!
//! A totally positive `alpha` with `alpha N` inside `N` induces a finite
//! self-map of the cusp whose action on the circle-shaped dual graph is a
//! rotation by `log(alpha/alpha') / (2 log eps)`; rationality of that number
//! is decided exactly through integrality and discrete logarithms in the
//! unit group, never through floating point.

use crate::arith::{maximal_order_generator, ArithError, QuadElem, Rat};
use crate::graph::{DualGraph, VertexData};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

/// Bound on the brute-force Pell search (values of `y` tried).
pub const DEFAULT_PELL_CAP: u64 = 1_000_000;
/// Hard cap on discrete logarithms in the unit group.
const DISCRETE_LOG_CAP: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CuspError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("unsupported module basis: {0}")]
    UnsupportedBasis(String),
    #[error("alpha is not totally positive")]
    NotTotallyPositive,
    #[error("alpha does not map the lattice into itself")]
    NotStabilizing,
    #[error("norm is not a positive integer")]
    NotIntegralNorm,
    #[error("Pell search exhausted after {0} candidates; raise the bound")]
    SearchExhausted(u64),
    #[error("degenerate cycle: every c_k equals 2")]
    DegenerateCycle,
    #[error("box search failed: {0}")]
    BoxSearch(String),
    #[error("discrete logarithm exceeded the cap of {DISCRETE_LOG_CAP}")]
    DiscreteLogCap,
}

/// The lattice `Z + Z*omega` in `Q(sqrt d)`, with `omega` irrational.
///
/// The basis is normalized so that `omega = u + v sqrt(d)` has `v > 0` and
/// `u` in `[0, 1)`. Supported bases are those making the lattice an order
/// (a ring): integer `omega` coordinates, or half-integer coordinates with
/// `d = 1 (mod 4)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadLattice {
    d: u64,
    omega: QuadElem,
}

impl QuadLattice {
    pub fn new(d: u64, omega: QuadElem) -> Result<Self, CuspError> {
        omega
            .same_field(&QuadElem::one(d))
            .map_err(CuspError::Arith)?;
        if omega.is_rational() {
            return Err(CuspError::UnsupportedBasis(
                "omega must be irrational".into(),
            ));
        }
        // normalize: v > 0, then u reduced into [0, 1)
        let mut om = if omega.b().is_negative() {
            omega.neg()
        } else {
            omega
        };
        let shift = om.a().floor();
        om = om.sub(&QuadElem::new(d, shift, Rat::zero())?);
        let two = Rat::from_integer(BigInt::from(2));
        let (u, v) = (om.a().clone(), om.b().clone());
        let integral = u.is_zero() && v.is_integer();
        let half = (&u * &two).is_integer()
            && (&v * &two).is_integer()
            && !u.is_zero()
            && (&v * &two).numer().is_odd()
            && d % 4 == 1;
        if !(integral || half) {
            return Err(CuspError::UnsupportedBasis(format!(
                "omega = {om} does not generate an order; use an algebraic integer \
                 or a half-integer basis with d = 1 (mod 4)"
            )));
        }
        Ok(QuadLattice { d, omega: om })
    }

    /// `Z[sqrt d]`.
    pub fn zd(d: u64) -> Result<Self, CuspError> {
        QuadLattice::new(d, QuadElem::sqrt_d(d)?)
    }

    /// The ring of algebraic integers of `Q(sqrt d)`.
    pub fn ring_of_integers(d: u64) -> Result<Self, CuspError> {
        QuadElem::sqrt_d(d).map_err(CuspError::Arith)?; // validates d
        QuadLattice::new(d, maximal_order_generator(d))
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn omega(&self) -> &QuadElem {
        &self.omega
    }

    pub fn contains(&self, x: &QuadElem) -> bool {
        x.is_integral_in(&self.omega)
    }

    /// `alpha * N` inside `N`.
    pub fn stabilizes(&self, alpha: &QuadElem) -> bool {
        self.contains(alpha) && self.contains(&alpha.mul(&self.omega))
    }

    /// `alpha * N = N`, i.e. both inclusions.
    pub fn invariant_under(&self, alpha: &QuadElem) -> bool {
        match alpha.inv() {
            Ok(inv) => self.stabilizes(alpha) && self.stabilizes(&inv),
            Err(_) => false,
        }
    }
}

fn is_perfect_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

/// Smallest unit greater than 1 of the order `Z + Z*omega`, by brute-force
/// Pell search on the norm form.
fn order_fundamental_unit(lat: &QuadLattice, cap: u64) -> Result<QuadElem, CuspError> {
    let d = lat.d;
    let om = &lat.omega;
    if om.a().is_zero() {
        // omega = V sqrt d: solve x^2 - (V^2 d) y^2 = +-1
        let v = om.b().to_integer();
        let dprime = &v * &v * BigInt::from(d);
        for y in 1..=cap {
            let y_big = BigInt::from(y);
            let t = &dprime * &y_big * &y_big;
            for delta in [-1i64, 1] {
                if let Some(x) = is_perfect_square(&(&t + BigInt::from(delta))) {
                    let unit =
                        QuadElem::new(d, Rat::from_integer(x), Rat::from_integer(&y_big * &v))?;
                    debug_assert!(lat.contains(&unit));
                    return Ok(unit);
                }
            }
        }
    } else {
        // omega = (1 + W sqrt d)/2, W odd, d = 1 (mod 4):
        // units (s + n W sqrt d)/2 with s^2 - n^2 W^2 d = +-4
        let w = (om.b() * Rat::from_integer(BigInt::from(2))).to_integer();
        let w2d = &w * &w * BigInt::from(d);
        for n in 1..=cap {
            let n_big = BigInt::from(n);
            let t = &w2d * &n_big * &n_big;
            for delta in [-4i64, 4] {
                if let Some(s) = is_perfect_square(&(&t + BigInt::from(delta))) {
                    let unit = QuadElem::new(
                        d,
                        Rat::new(s, BigInt::from(2)),
                        Rat::new(&n_big * &w, BigInt::from(2)),
                    )?;
                    debug_assert!(lat.contains(&unit));
                    return Ok(unit);
                }
            }
        }
    }
    Err(CuspError::SearchExhausted(cap))
}

/// The generator of the group of totally positive units stabilizing the
/// lattice: the fundamental Pell unit raised to the least power that is
/// totally positive and maps `N` onto `N`.
pub fn fundamental_totally_positive_unit(lat: &QuadLattice) -> Result<QuadElem, CuspError> {
    fundamental_totally_positive_unit_with_cap(lat, DEFAULT_PELL_CAP)
}

pub fn fundamental_totally_positive_unit_with_cap(
    lat: &QuadLattice,
    cap: u64,
) -> Result<QuadElem, CuspError> {
    let base = order_fundamental_unit(lat, cap)?;
    let mut candidate = base.clone();
    for _ in 1..=4 {
        if candidate.is_totally_positive() && lat.invariant_under(&candidate) {
            return Ok(candidate);
        }
        candidate = candidate.mul(&base);
    }
    Err(CuspError::BoxSearch(
        "no totally positive stabilizing power of the fundamental unit".into(),
    ))
}

/// Cusp cycle data read off the Klein polygon of the lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuspData {
    /// Totally positive fundamental unit, with `eps * N = N`.
    pub epsilon: QuadElem,
    /// Cycle length `l`.
    pub period: usize,
    /// The integers `c_k >= 2`; the cusp cycle has self-intersections
    /// `-c_k`.
    pub cycle_selfint: Vec<u64>,
    /// Extremal points `n_0 .. n_l` of one period of the boundary, with
    /// `n_l = eps * n_0`.
    pub extremal_points: Vec<QuadElem>,
}

/// Sign of the cross product of `(a - o, b - o)` in the plane embedding;
/// positive means a left turn.
fn cross_sign(o: &QuadElem, a: &QuadElem, b: &QuadElem) -> Ordering {
    let z = a.sub(o);
    let w = b.sub(o);
    // sigma1(z) sigma2(w) - sigma1(w) sigma2(z) = 2 * irr(z * conj(w)) * sqrt d
    let q = z.mul(&w.conj());
    q.b().cmp(&Rat::zero())
}

/// Totally positive lattice points with `sigma1 <= sigma1(b1)` and
/// `sigma2 <= sigma1(b2)`, by exact interval bounds per lattice coordinate.
fn box_points(lat: &QuadLattice, b1: &QuadElem, b2: &QuadElem) -> Result<Vec<QuadElem>, CuspError> {
    let d = lat.d;
    let om = &lat.omega;
    let spread = b1.add(b2);
    let two_v_sqrt_d = om.sub(&om.conj());
    let ymax_big = spread.div(&two_v_sqrt_d).map_err(CuspError::Arith)?.floor() + BigInt::one();
    let ymax = ymax_big
        .to_i64()
        .ok_or_else(|| CuspError::BoxSearch("coordinate range overflow".into()))?;
    if ymax > 4_000_000 {
        return Err(CuspError::BoxSearch(format!(
            "box of {ymax} rows is beyond desk scale"
        )));
    }
    let mut points = Vec::new();
    for y in -ymax..=ymax {
        let yom = om.scale(&Rat::from_integer(BigInt::from(y)));
        let yom_conj = yom.conj();
        // sigma1 in (0, b1]
        let lo1 = yom.neg().floor() + BigInt::one();
        let hi1 = b1.sub(&yom).floor();
        // sigma2 in (0, b2]
        let lo2 = yom_conj.neg().floor() + BigInt::one();
        let hi2 = b2.sub(&yom_conj).floor();
        let lo = lo1.max(lo2);
        let hi = hi1.min(hi2);
        let (Some(lo), Some(hi)) = (lo.to_i64(), hi.to_i64()) else {
            return Err(CuspError::BoxSearch("coordinate range overflow".into()));
        };
        for x in lo..=hi {
            let p = QuadElem::new(d, Rat::from_integer(BigInt::from(x)), Rat::zero())?.add(&yom);
            debug_assert!(p.is_totally_positive());
            points.push(p);
        }
    }
    Ok(points)
}

/// Vertices of the lower convex hull (the boundary facing the origin) of a
/// set of embedded lattice points; collinear interior points are dropped.
fn lower_hull(mut points: Vec<QuadElem>) -> Vec<QuadElem> {
    points.sort_by(|a, b| a.cmp_sigma1(b));
    let mut hull: Vec<QuadElem> = Vec::new();
    for p in points {
        while hull.len() >= 2
            && cross_sign(&hull[hull.len() - 2], &hull[hull.len() - 1], &p) != Ordering::Greater
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull
}

/// One period of the Klein polygon boundary starting at the extremal point
/// `anchor` (which must be extremal; `1` always is).
fn klein_polygon_anchored(
    lat: &QuadLattice,
    anchor: &QuadElem,
    cap: u64,
) -> Result<CuspData, CuspError> {
    let eps = fundamental_totally_positive_unit_with_cap(lat, cap)?;
    let eps_inv = eps.inv().map_err(CuspError::Arith)?;
    // sigma1 bound: one period past the strip end; sigma2 bound: one period
    // before the strip start.
    let b1 = anchor.mul(&eps).mul(&eps);
    let b2 = anchor.conj().mul(&eps);
    let hull = lower_hull(box_points(lat, &b1, &b2)?);
    let strip_end = anchor.mul(&eps);
    let extremals: Vec<QuadElem> = hull
        .into_iter()
        .filter(|p| {
            p.cmp_sigma1(anchor) != Ordering::Less && p.cmp_sigma1(&strip_end) != Ordering::Greater
        })
        .collect();
    if extremals.first() != Some(anchor) || extremals.last() != Some(&strip_end) {
        return Err(CuspError::BoxSearch(
            "anchor or its translate is not an extremal point".into(),
        ));
    }
    let l = extremals.len() - 1;
    let mut cycle = Vec::with_capacity(l);
    for k in 0..l {
        let prev = if k == 0 {
            extremals[l - 1].mul(&eps_inv)
        } else {
            extremals[k - 1].clone()
        };
        let next = &extremals[k + 1];
        let q = prev
            .add(next)
            .div(&extremals[k])
            .map_err(CuspError::Arith)?;
        if !q.is_rational() || !q.a().is_integer() {
            return Err(CuspError::BoxSearch(format!(
                "polygon recurrence produced a non-integer at step {k}: {q}"
            )));
        }
        let c = q.a().to_integer();
        if c < BigInt::from(2) {
            return Err(CuspError::BoxSearch(format!(
                "polygon recurrence produced c = {c} < 2 at step {k}"
            )));
        }
        cycle.push(
            c.to_u64()
                .ok_or_else(|| CuspError::BoxSearch(format!("cycle integer {c} overflows u64")))?,
        );
    }
    if cycle.iter().all(|&c| c == 2) {
        return Err(CuspError::DegenerateCycle);
    }
    Ok(CuspData {
        epsilon: eps,
        period: l,
        cycle_selfint: cycle,
        extremal_points: extremals,
    })
}

/// Klein polygon of the lattice: extremal points of the convex hull of the
/// totally positive elements across one fundamental domain of the unit
/// action, with the cycle integers read from the exact three-term
/// recurrence.
pub fn klein_polygon(lat: &QuadLattice) -> Result<CuspData, CuspError> {
    klein_polygon_with_cap(lat, DEFAULT_PELL_CAP)
}

pub fn klein_polygon_with_cap(lat: &QuadLattice, cap: u64) -> Result<CuspData, CuspError> {
    klein_polygon_anchored(lat, &QuadElem::one(lat.d), cap)
}

/// Same boundary walk started at the `k`-th extremal point; the cycle comes
/// back as a rotation of the one anchored at 1. Exposed for the
/// cyclic-invariance check.
pub fn klein_polygon_from(
    lat: &QuadLattice,
    data: &CuspData,
    k: usize,
) -> Result<CuspData, CuspError> {
    klein_polygon_anchored(lat, &data.extremal_points[k], DEFAULT_PELL_CAP)
}

/// Dual graph of the cusp: a cycle of `l` rational curves with
/// self-intersections `-c_k`; for `l = 1` a single nodal curve (one loop),
/// for `l = 2` two curves joined by two parallel edges.
pub fn cusp_dual_graph(data: &CuspData) -> DualGraph {
    let l = data.period;
    let vertices: Vec<VertexData> = data
        .cycle_selfint
        .iter()
        .enumerate()
        .map(|(k, &c)| VertexData {
            id: format!("C{k}"),
            self_intersection: -(c as i64),
            genus: 0,
            loops: if l == 1 { 1 } else { 0 },
            mult_override: None,
        })
        .collect();
    let mut edges = Vec::new();
    if l == 2 {
        edges.push(("C0".to_string(), "C1".to_string()));
        edges.push(("C0".to_string(), "C1".to_string()));
    } else if l >= 3 {
        for k in 0..l {
            edges.push((format!("C{k}"), format!("C{}", (k + 1) % l)));
        }
    }
    DualGraph::new(vertices, edges).expect("cusp cycle is a well-formed graph")
}

/// Outcome of the exact rationality decision for the rotation number
/// `log(alpha/alpha') / (2 log eps)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationNumber {
    pub rational: bool,
    /// Reduced numerator/denominator when rational.
    pub value: Option<(BigInt, BigInt)>,
    pub description: String,
}

/// Decides rationality of the rotation number induced by `alpha` on the
/// cusp's circle dual graph.
///
/// Let `u = alpha/alpha'` (always of norm 1). If `u` is not an algebraic
/// integer no power of it is one either, so `u` is multiplicatively
/// independent of the units and the rotation is irrational. Otherwise `u`
/// is a totally positive unit, hence an exact power of the fundamental unit
/// of the maximal order, and the rotation number is the ratio of discrete
/// logarithms.
pub fn rotation_number(lat: &QuadLattice, alpha: &QuadElem) -> Result<RotationNumber, CuspError> {
    alpha
        .same_field(&QuadElem::one(lat.d))
        .map_err(CuspError::Arith)?;
    if !alpha.is_totally_positive() {
        return Err(CuspError::NotTotallyPositive);
    }
    if !lat.stabilizes(alpha) {
        return Err(CuspError::NotStabilizing);
    }
    let u = alpha.div(&alpha.conj()).map_err(CuspError::Arith)?;
    debug_assert_eq!(u.norm(), Rat::one());
    if !u.is_algebraic_integer() {
        return Ok(RotationNumber {
            rational: false,
            value: None,
            description: format!(
                "irrational: alpha/alpha' = {u} is not an algebraic integer, so no power \
                 of it is a power of the fundamental unit"
            ),
        });
    }
    let maximal = QuadLattice::ring_of_integers(lat.d)?;
    let eps_k = order_fundamental_unit(&maximal, DEFAULT_PELL_CAP)?;
    let j = discrete_log(&u, &eps_k)?;
    let eps = fundamental_totally_positive_unit(lat)?;
    let s = discrete_log(&eps, &eps_k)?;
    debug_assert!(s > 0);
    let num = BigInt::from(j);
    let den = BigInt::from(2 * s);
    let g = num.gcd(&den);
    let (num, den) = if g.is_zero() {
        (BigInt::zero(), BigInt::one())
    } else {
        (num / &g, den / &g)
    };
    Ok(RotationNumber {
        rational: true,
        value: Some((num.clone(), den.clone())),
        description: format!("rational: {num}/{den}"),
    })
}

/// Exact discrete logarithm `u = base^k` in the unit group; `base > 1`.
fn discrete_log(u: &QuadElem, base: &QuadElem) -> Result<i64, CuspError> {
    let one = QuadElem::one(u.d());
    if u == &one {
        return Ok(0);
    }
    let (mut current, step, sign) = if u.cmp_sigma1(&one) == Ordering::Greater {
        (u.clone(), base.inv().map_err(CuspError::Arith)?, 1i64)
    } else {
        (u.clone(), base.clone(), -1i64)
    };
    for k in 1..=DISCRETE_LOG_CAP {
        current = current.mul(&step);
        if current == one {
            return Ok(sign * k as i64);
        }
    }
    Err(CuspError::DiscreteLogCap)
}

/// Topological degree of the endomorphism induced by `alpha`: its norm,
/// asserted to be a positive integer.
pub fn topological_degree(lat: &QuadLattice, alpha: &QuadElem) -> Result<BigInt, CuspError> {
    alpha
        .same_field(&QuadElem::one(lat.d))
        .map_err(CuspError::Arith)?;
    if !alpha.is_totally_positive() {
        return Err(CuspError::NotTotallyPositive);
    }
    if !lat.stabilizes(alpha) {
        return Err(CuspError::NotStabilizing);
    }
    let n = alpha.norm();
    if !n.is_integer() || !n.numer().is_positive() {
        return Err(CuspError::NotIntegralNorm);
    }
    Ok(n.to_integer())
}

/// Transfer-matrix trace of the cycle: the product of `[[c_k, -1], [1, 0]]`
/// over one period has trace `eps + eps'`.
pub fn transfer_trace(data: &CuspData) -> BigInt {
    let mut m = [
        [BigInt::one(), BigInt::zero()],
        [BigInt::zero(), BigInt::one()],
    ];
    for &c in &data.cycle_selfint {
        let t = [
            [BigInt::from(c), BigInt::from(-1)],
            [BigInt::one(), BigInt::zero()],
        ];
        let mut out = [
            [BigInt::zero(), BigInt::zero()],
            [BigInt::zero(), BigInt::zero()],
        ];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = &t[i][0] * &m[0][j] + &t[i][1] * &m[1][j];
            }
        }
        m = out;
    }
    &m[0][0] + &m[1][1]
}
