//! Closed-form Riemannian manifolds and geodesics from a submanifold `Q` to a point `x1`.
//!
//! The catalog is deliberately small: flat tori `R^n / Λ`, round spheres `S^n(ρ)` and
//! products of these. For each family the geodesics perpendicular to `Q` that end at `x1`
//! are known in closed form, as are their focal points, so enumeration below a length cap
//! is provably complete.
//!
//! Points are given in ambient coordinates: `R^n` for a torus (read modulo the lattice),
//! `R^{n+1}` for a sphere, and the concatenation of the factors for a product.

mod assumption;
mod jacobi;
mod lattice;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use assumption::{assess_assumption, check_assumption, AssumptionReport, ClauseResult, METADATA_ONLY_FAMILIES};
pub use jacobi::{jacobi_oracle, JacobiReport, DEFAULT_JACOBI_STEPS};
pub use lattice::QuotientLattice;

use crate::error::{Error, Result};

/// Relative tolerance for deciding that an endpoint sits on a focal point or on `Q`.
pub const FOCAL_TOLERANCE: f64 = 1e-9;

/// Upper bound on the number of geodesics a single enumeration may produce.
pub const ENUMERATION_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Manifold {
    /// `R^n` modulo the lattice spanned by the rows of `lattice`.
    FlatTorus { dimensions: usize, lattice: Vec<Vec<f64>> },
    /// The sphere of the given radius in `R^{dimensions + 1}`.
    RoundSphere { dimensions: usize, radius: f64 },
    Product { left: Box<Manifold>, right: Box<Manifold> },
}

impl Manifold {
    /// The standard torus `R^n / Z^n`.
    pub fn standard_torus(n: usize) -> Self {
        let lattice = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Manifold::FlatTorus { dimensions: n, lattice }
    }

    pub fn sphere(n: usize, radius: f64) -> Self {
        Manifold::RoundSphere { dimensions: n, radius }
    }

    pub fn product(left: Manifold, right: Manifold) -> Self {
        Manifold::Product { left: Box::new(left), right: Box::new(right) }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Manifold::FlatTorus { dimensions, .. } | Manifold::RoundSphere { dimensions, .. } => *dimensions,
            Manifold::Product { left, right } => left.dimension() + right.dimension(),
        }
    }

    /// Length of a coordinate vector for a point of this manifold.
    pub fn ambient_dimension(&self) -> usize {
        match self {
            Manifold::FlatTorus { dimensions, .. } => *dimensions,
            Manifold::RoundSphere { dimensions, .. } => dimensions + 1,
            Manifold::Product { left, right } => left.ambient_dimension() + right.ambient_dimension(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Manifold::FlatTorus { dimensions, lattice } => {
                let n = *dimensions;
                if n == 0 || lattice.len() != n || lattice.iter().any(|row| row.len() != n) {
                    return Err(Error::BadParameters(format!("lattice must be {n} vectors of length {n}")));
                }
                let basis = lattice_matrix(lattice);
                let det = basis.determinant();
                let scale: f64 = lattice.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
                if !det.is_finite() || det.abs() <= 1e-12 * scale.powi(n as i32) {
                    return Err(Error::BadParameters("lattice basis is singular".into()));
                }
                Ok(())
            }
            Manifold::RoundSphere { dimensions, radius } => {
                if *dimensions < 2 {
                    return Err(Error::UnsupportedFamily(format!("sphere of dimension {dimensions}")));
                }
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::BadParameters(format!("sphere radius must be positive, got {radius}")));
                }
                Ok(())
            }
            Manifold::Product { left, right } => {
                left.validate()?;
                right.validate()
            }
        }
    }
}

fn lattice_matrix(lattice: &[Vec<f64>]) -> DMatrix<f64> {
    let n = lattice.len();
    DMatrix::from_fn(n, n, |i, j| lattice[j][i])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Submanifold {
    Point { coordinates: Vec<f64> },
    /// `offset + span(directions)` in a flat torus, directions given as integer lattice
    /// coordinates.
    Subtorus { directions: Vec<Vec<i64>>, offset: Vec<f64> },
    /// Intersection of a sphere with the linear span of `span` (dimension `d + 1`, `d ≥ 1`).
    GreatSubsphere { span: Vec<Vec<f64>> },
    /// The whole factor; only meaningful inside a product.
    Whole,
    Product { left: Box<Submanifold>, right: Box<Submanifold> },
}

impl Submanifold {
    pub fn point(coordinates: Vec<f64>) -> Self {
        Submanifold::Point { coordinates }
    }

    pub fn product(left: Submanifold, right: Submanifold) -> Self {
        Submanifold::Product { left: Box::new(left), right: Box::new(right) }
    }

    /// Dimension `d` of the submanifold inside `m`.
    pub fn dimension(&self, m: &Manifold) -> Result<usize> {
        match (self, m) {
            (Submanifold::Point { .. }, _) => Ok(0),
            (Submanifold::Subtorus { directions, .. }, Manifold::FlatTorus { .. }) => Ok(directions.len()),
            (Submanifold::GreatSubsphere { span }, Manifold::RoundSphere { .. }) => Ok(span.len().saturating_sub(1)),
            (Submanifold::Whole, _) => Ok(m.dimension()),
            (Submanifold::Product { left, right }, Manifold::Product { left: ml, right: mr }) => {
                Ok(left.dimension(ml)? + right.dimension(mr)?)
            }
            _ => Err(Error::UnsupportedFamily(format!("{} in {}", self.kind_name(), family_name(m)))),
        }
    }

    fn kind_name(&self) -> &'static str {
        match self {
            Submanifold::Point { .. } => "point",
            Submanifold::Subtorus { .. } => "subtorus",
            Submanifold::GreatSubsphere { .. } => "great subsphere",
            Submanifold::Whole => "whole factor",
            Submanifold::Product { .. } => "product submanifold",
        }
    }
}

fn family_name(m: &Manifold) -> &'static str {
    match m {
        Manifold::FlatTorus { .. } => "flat torus",
        Manifold::RoundSphere { .. } => "round sphere",
        Manifold::Product { .. } => "product",
    }
}

/// Homotopy class of paths from `Q` to `x1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HomotopyClass {
    /// Integer lattice translate; canonical once reduced modulo the directions of `Q`.
    Lattice { translate: Vec<i64> },
    /// The unique class on a simply connected factor.
    Trivial,
    Product { left: Box<HomotopyClass>, right: Box<HomotopyClass> },
}

impl HomotopyClass {
    pub fn lattice(translate: Vec<i64>) -> Self {
        HomotopyClass::Lattice { translate }
    }

    pub fn product(left: HomotopyClass, right: HomotopyClass) -> Self {
        HomotopyClass::Product { left: Box::new(left), right: Box::new(right) }
    }
}

/// A focal point at normalized time `t ∈ (0, 1)` with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FocalTime {
    pub t: f64,
    pub multiplicity: usize,
}

/// One geodesic `γ: [0, 1] → N` from `Q` to `x1`, perpendicular to `Q` at time 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicDatum {
    pub length: f64,
    pub morse_index: usize,
    pub homotopy_class: HomotopyClass,
    /// `γ(0)` in ambient coordinates.
    pub start: Vec<f64>,
    /// Unit covector at `γ(0)` (identified with a tangent vector by the metric).
    pub initial_covector: Vec<f64>,
    pub focal_times: Vec<FocalTime>,
    /// Length of the projection to each flat or spherical factor, left to right.
    pub factor_lengths: Vec<f64>,
}

/// One non-product factor together with its submanifold, class and endpoint.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Leaf<'a> {
    pub manifold: &'a Manifold,
    pub sub: &'a Submanifold,
    pub class: Option<&'a HomotopyClass>,
    pub endpoint: &'a [f64],
}

pub(crate) fn flatten<'a>(
    m: &'a Manifold,
    q: &'a Submanifold,
    x1: &'a [f64],
    c: Option<&'a HomotopyClass>,
    out: &mut Vec<Leaf<'a>>,
) -> Result<()> {
    match m {
        Manifold::Product { left, right } => {
            let Submanifold::Product { left: ql, right: qr } = q else {
                return Err(Error::UnsupportedFamily(format!("{} in a product", q.kind_name())));
            };
            let (cl, cr) = match c {
                None => (None, None),
                Some(HomotopyClass::Product { left, right }) => (Some(&**left), Some(&**right)),
                Some(other) => {
                    return Err(Error::BadParameters(format!("class {other:?} does not match a product")))
                }
            };
            let split = left.ambient_dimension();
            if x1.len() < split {
                return Err(Error::BadParameters("endpoint has too few coordinates".into()));
            }
            flatten(left, ql, &x1[..split], cl, out)?;
            flatten(right, qr, &x1[split..], cr, out)
        }
        _ => {
            if x1.len() != m.ambient_dimension() {
                return Err(Error::BadParameters(format!(
                    "point has {} coordinates, expected {}",
                    x1.len(),
                    m.ambient_dimension()
                )));
            }
            out.push(Leaf { manifold: m, sub: q, class: c, endpoint: x1 });
            Ok(())
        }
    }
}

pub(crate) fn leaves<'a>(
    m: &'a Manifold,
    q: &'a Submanifold,
    x1: &'a [f64],
    c: Option<&'a HomotopyClass>,
) -> Result<Vec<Leaf<'a>>> {
    m.validate()?;
    let mut out = Vec::new();
    flatten(m, q, x1, c, &mut out)?;
    Ok(out)
}

/// Geodesic on a single factor.
#[derive(Debug, Clone)]
struct LeafGeodesic {
    length: f64,
    start: Vec<f64>,
    direction: Vec<f64>,
    class: HomotopyClass,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthonormal basis of the span of `vectors` (modified Gram-Schmidt); `None` if dependent.
fn orthonormalize(vectors: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let scale = norm(v);
        let mut w = v.clone();
        for b in &basis {
            let p = dot(&w, b);
            w.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
        }
        let len = norm(&w);
        if len.is_nan() || len <= 1e-10 * scale {
            return None;
        }
        w.iter_mut().for_each(|x| *x /= len);
        basis.push(w);
    }
    Some(basis)
}

fn project_out(v: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let p = dot(v, b);
        v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
    }
}

/// Flat torus data derived from `Q`: the quotient lattice for classes, the orthonormal
/// tangent directions of `Q` in `R^n`, and the base point of `Q`.
struct TorusSubmanifold {
    quotient: QuotientLattice,
    tangent: Vec<Vec<f64>>,
    offset: Vec<f64>,
}

fn torus_submanifold(lattice: &[Vec<f64>], n: usize, q: &Submanifold) -> Result<TorusSubmanifold> {
    let (directions, offset): (&[Vec<i64>], &Vec<f64>) = match q {
        Submanifold::Point { coordinates } => (&[], coordinates),
        Submanifold::Subtorus { directions, offset } => (directions, offset),
        other => return Err(Error::UnsupportedFamily(format!("{} in a flat torus", other.kind_name()))),
    };
    if offset.len() != n || directions.iter().any(|d| d.len() != n) {
        return Err(Error::BadParameters("subtorus data has the wrong dimension".into()));
    }
    if directions.len() >= n {
        return Err(Error::BadParameters("subtorus must have dimension below the torus".into()));
    }
    let quotient = QuotientLattice::new(directions, n)
        .ok_or_else(|| Error::BadParameters("subtorus directions are dependent".into()))?;
    let real: Vec<Vec<f64>> = directions
        .iter()
        .map(|w| (0..n).map(|j| w.iter().zip(lattice).map(|(&wi, b)| wi as f64 * b[j]).sum()).collect())
        .collect();
    let tangent = orthonormalize(&real).ok_or_else(|| Error::BadParameters("degenerate subtorus".into()))?;
    Ok(TorusSubmanifold { quotient, tangent, offset: offset.clone() })
}

/// Lattice coordinates of `x ∈ R^n`.
fn lattice_coordinates(lattice: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    let basis = lattice_matrix(lattice);
    let rhs = DVector::from_column_slice(x);
    basis.lu().solve(&rhs).map(|v| v.iter().copied().collect()).unwrap_or_else(|| vec![f64::NAN; x.len()])
}

fn torus_contains(lattice: &[Vec<f64>], sub: &TorusSubmanifold, x: &[f64]) -> bool {
    let diff: Vec<f64> = x.iter().zip(&sub.offset).map(|(a, b)| a - b).collect();
    sub.quotient.contains_real(&lattice_coordinates(lattice, &diff), FOCAL_TOLERANCE)
}

fn torus_geodesics(leaf: &Leaf, lattice: &[Vec<f64>], n: usize, cap: f64) -> Result<Vec<LeafGeodesic>> {
    let sub = torus_submanifold(lattice, n, leaf.sub)?;
    let k = match leaf.class {
        None => vec![0; n],
        Some(HomotopyClass::Lattice { translate }) if translate.len() == n => translate.clone(),
        Some(other) => return Err(Error::BadParameters(format!("class {other:?} is not a lattice translate of length {n}"))),
    };
    let canonical = sub.quotient.canonical(&k);
    let mut v: Vec<f64> = (0..n)
        .map(|j| {
            leaf.endpoint[j] - sub.offset[j]
                + canonical.iter().zip(lattice).map(|(&ki, b)| ki as f64 * b[j]).sum::<f64>()
        })
        .collect();
    project_out(&mut v, &sub.tangent);
    let length = norm(&v);
    if length > cap {
        return Ok(Vec::new());
    }
    let class = HomotopyClass::Lattice { translate: canonical };
    let start: Vec<f64> = leaf.endpoint.iter().zip(&v).map(|(x, d)| x - d).collect();
    let scale: f64 = lattice.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max);
    if length <= FOCAL_TOLERANCE * scale {
        return Ok(vec![LeafGeodesic { length: 0.0, start, direction: vec![0.0; n], class }]);
    }
    let direction = v.iter().map(|x| x / length).collect();
    Ok(vec![LeafGeodesic { length, start, direction, class }])
}

/// Orthonormal basis of the linear span defining a great subsphere, or `None` for a point.
fn sphere_span(q: &Submanifold, n: usize) -> Result<Option<Vec<Vec<f64>>>> {
    match q {
        Submanifold::Point { .. } => Ok(None),
        Submanifold::GreatSubsphere { span } => {
            if span.iter().any(|v| v.len() != n + 1) {
                return Err(Error::BadParameters("great subsphere span has the wrong dimension".into()));
            }
            if span.len() < 2 || span.len() > n {
                return Err(Error::BadParameters(format!(
                    "great subsphere span must have dimension in [2, {n}], got {}",
                    span.len()
                )));
            }
            orthonormalize(span)
                .map(Some)
                .ok_or_else(|| Error::BadParameters("great subsphere span is degenerate".into()))
        }
        other => Err(Error::UnsupportedFamily(format!("{} in a round sphere", other.kind_name()))),
    }
}

fn check_on_sphere(x: &[f64], radius: f64) -> Result<()> {
    if (norm(x) - radius).abs() > FOCAL_TOLERANCE * radius.max(1.0) * 10.0 {
        return Err(Error::BadParameters(format!("point {x:?} is not on the sphere of radius {radius}")));
    }
    Ok(())
}

fn sphere_geodesics(leaf: &Leaf, n: usize, radius: f64, cap: f64) -> Result<Vec<LeafGeodesic>> {
    match leaf.class {
        None | Some(HomotopyClass::Trivial) => {}
        Some(other) => return Err(Error::BadParameters(format!("class {other:?} on a simply connected sphere"))),
    }
    let x1 = leaf.endpoint;
    check_on_sphere(x1, radius)?;
    let theta_max = cap / radius;
    let mut out = Vec::new();
    let mut push = |theta: f64, start: &[f64], direction: Vec<f64>| {
        out.push(LeafGeodesic {
            length: radius * theta,
            start: start.to_vec(),
            direction,
            class: HomotopyClass::Trivial,
        });
    };
    let budget_check = |theta_max: f64| {
        if theta_max / std::f64::consts::PI > ENUMERATION_BUDGET as f64 {
            Err(Error::CapTooSmall { cap, detail: "sphere enumeration exceeds the geodesic budget".into() })
        } else {
            Ok(())
        }
    };
    budget_check(theta_max)?;
    let two_pi = 2.0 * std::f64::consts::PI;
    match sphere_span(leaf.sub, n)? {
        None => {
            let Submanifold::Point { coordinates: x0 } = leaf.sub else { unreachable!() };
            if x0.len() != n + 1 {
                return Err(Error::BadParameters("point has the wrong dimension".into()));
            }
            check_on_sphere(x0, radius)?;
            let cos = (dot(x0, x1) / (radius * radius)).clamp(-1.0, 1.0);
            let mut u: Vec<f64> = x1.iter().zip(x0).map(|(a, b)| a - cos * b).collect();
            let un = norm(&u);
            if un <= FOCAL_TOLERANCE * radius {
                return Err(if cos > 0.0 {
                    Error::EndpointOnSubmanifold
                } else {
                    Error::FocalPointEndpoint("antipodal endpoint".into())
                });
            }
            u.iter_mut().for_each(|x| *x /= un);
            let delta = un.atan2(cos * radius);
            let back: Vec<f64> = u.iter().map(|x| -x).collect();
            let mut j = 0.0;
            loop {
                let forward = two_pi * j + delta;
                let backward = two_pi * (j + 1.0) - delta;
                if forward > theta_max {
                    break;
                }
                push(forward, x0, u.clone());
                if backward <= theta_max {
                    push(backward, x0, back.clone());
                }
                j += 1.0;
            }
        }
        Some(basis) => {
            let mut p = vec![0.0; n + 1];
            for b in &basis {
                let c = dot(x1, b);
                p.iter_mut().zip(b).for_each(|(x, y)| *x += c * y);
            }
            let pn = norm(&p);
            let mut u: Vec<f64> = x1.iter().zip(&p).map(|(a, b)| a - b).collect();
            let un = norm(&u);
            if un <= FOCAL_TOLERANCE * radius {
                return Err(Error::EndpointOnSubmanifold);
            }
            if pn <= FOCAL_TOLERANCE * radius {
                return Err(Error::FocalPointEndpoint("endpoint is a pole of the great subsphere".into()));
            }
            u.iter_mut().for_each(|x| *x /= un);
            let q: Vec<f64> = p.iter().map(|x| x * radius / pn).collect();
            let neg_q: Vec<f64> = q.iter().map(|x| -x).collect();
            let neg_u: Vec<f64> = u.iter().map(|x| -x).collect();
            let alpha = un.atan2(pn);
            let pi = std::f64::consts::PI;
            let mut m = 0.0;
            loop {
                let even = (m as i64) % 2 == 0;
                // theta = m pi - alpha (m >= 1) and m pi + alpha.
                let minus = m * pi - alpha;
                let plus = m * pi + alpha;
                if m >= 1.0 && minus <= theta_max {
                    let (s, d) = if even { (&q, &neg_u) } else { (&neg_q, &u) };
                    push(minus, s, d.clone());
                }
                if plus > theta_max {
                    break;
                }
                let (s, d) = if even { (&q, &u) } else { (&neg_q, &neg_u) };
                push(plus, s, d.clone());
                m += 1.0;
            }
        }
    }
    Ok(out)
}

fn leaf_contains_endpoint(leaf: &Leaf) -> Result<bool> {
    match (leaf.manifold, leaf.sub) {
        (_, Submanifold::Whole) => Ok(true),
        (Manifold::FlatTorus { dimensions, lattice }, _) => {
            let sub = torus_submanifold(lattice, *dimensions, leaf.sub)?;
            Ok(torus_contains(lattice, &sub, leaf.endpoint))
        }
        (Manifold::RoundSphere { dimensions, radius }, q) => {
            let x1 = leaf.endpoint;
            match sphere_span(q, *dimensions)? {
                None => {
                    let Submanifold::Point { coordinates } = q else { unreachable!() };
                    let d: Vec<f64> = x1.iter().zip(coordinates).map(|(a, b)| a - b).collect();
                    Ok(norm(&d) <= FOCAL_TOLERANCE * radius)
                }
                Some(basis) => {
                    let mut r = x1.to_vec();
                    project_out(&mut r, &basis);
                    Ok(norm(&r) <= FOCAL_TOLERANCE * radius)
                }
            }
        }
        (Manifold::Product { .. }, _) => unreachable!("leaves are never products"),
    }
}

fn leaf_geodesics(leaf: &Leaf, cap: f64, top_level: bool) -> Result<Vec<LeafGeodesic>> {
    match (leaf.manifold, leaf.sub) {
        (_, Submanifold::Whole) => {
            if top_level {
                return Err(Error::EndpointOnSubmanifold);
            }
            let dim = leaf.manifold.ambient_dimension();
            let class = match leaf.manifold {
                Manifold::FlatTorus { dimensions, .. } => HomotopyClass::Lattice { translate: vec![0; *dimensions] },
                _ => HomotopyClass::Trivial,
            };
            Ok(vec![LeafGeodesic {
                length: 0.0,
                start: leaf.endpoint.to_vec(),
                direction: vec![0.0; dim],
                class,
            }])
        }
        (Manifold::FlatTorus { dimensions, lattice }, _) => torus_geodesics(leaf, lattice, *dimensions, cap),
        (Manifold::RoundSphere { dimensions, radius }, _) => {
            if leaf_contains_endpoint(leaf)? {
                return Err(if top_level {
                    Error::EndpointOnSubmanifold
                } else {
                    Error::FocalPointEndpoint("spherical factor endpoint lies on its submanifold".into())
                });
            }
            sphere_geodesics(leaf, *dimensions, *radius, cap)
        }
        (Manifold::Product { .. }, _) => unreachable!("leaves are never products"),
    }
}

/// Closed-form focal data on one factor for a normal geodesic of the given length.
///
/// Flat factors never carry focal points. On `S^n(ρ)` with a totally geodesic `Q` of
/// dimension `d`, Jacobi fields tangent to `Q` behave like `cos(θ)` and vanish at angles
/// `π/2 + jπ` (multiplicity `d`), while the `n - 1 - d` transverse normal fields behave
/// like `sin(θ)` and vanish at `jπ`.
pub(crate) fn leaf_focal_times(m: &Manifold, sub_dim: usize, length: f64) -> Result<Vec<FocalTime>> {
    let Manifold::RoundSphere { dimensions: n, radius } = m else {
        return Ok(Vec::new());
    };
    if length == 0.0 {
        return Ok(Vec::new());
    }
    let theta = length / radius;
    let pi = std::f64::consts::PI;
    let mut out: Vec<(f64, usize)> = Vec::new();
    let tangent = sub_dim;
    let transverse = n - 1 - sub_dim;
    let mut j = 0.0;
    loop {
        let half = pi / 2.0 + j * pi;
        let full = (j + 1.0) * pi;
        if half >= theta * (1.0 + FOCAL_TOLERANCE) {
            break;
        }
        if tangent > 0 {
            out.push((half, tangent));
        }
        if transverse > 0 && full < theta * (1.0 + FOCAL_TOLERANCE) {
            out.push((full, transverse));
        }
        j += 1.0;
    }
    if let Some(&(angle, _)) = out.iter().find(|(angle, _)| (angle - theta).abs() <= FOCAL_TOLERANCE * theta) {
        return Err(Error::FocalPointEndpoint(format!(
            "focal angle {angle} coincides with the endpoint angle {theta}"
        )));
    }
    Ok(out.into_iter().map(|(angle, multiplicity)| FocalTime { t: angle / theta, multiplicity }).collect())
}

fn merge_focal_times(mut times: Vec<FocalTime>) -> Vec<FocalTime> {
    times.sort_by(|a, b| a.t.total_cmp(&b.t));
    let mut out: Vec<FocalTime> = Vec::with_capacity(times.len());
    for ft in times {
        match out.last_mut() {
            Some(last) if (last.t - ft.t).abs() <= FOCAL_TOLERANCE => last.multiplicity += ft.multiplicity,
            _ => out.push(ft),
        }
    }
    out
}

fn leaf_sub_dimension(leaf: &Leaf) -> Result<usize> {
    leaf.sub.dimension(leaf.manifold)
}

/// Morse index of a geodesic: the focal points in `(0, 1)` counted with multiplicity.
pub fn morse_index(m: &Manifold, q: &Submanifold, g: &GeodesicDatum) -> Result<usize> {
    Ok(focal_times(m, q, g)?.iter().map(|f| f.multiplicity).sum())
}

/// Closed-form focal times of a geodesic, merged across product factors.
pub fn focal_times(m: &Manifold, q: &Submanifold, g: &GeodesicDatum) -> Result<Vec<FocalTime>> {
    let dummy = vec![0.0; m.ambient_dimension()];
    let leaves = leaves(m, q, &dummy, None)?;
    if leaves.len() != g.factor_lengths.len() {
        return Err(Error::BadParameters("geodesic does not match the manifold's factors".into()));
    }
    let mut all = Vec::new();
    for (leaf, &len) in leaves.iter().zip(&g.factor_lengths) {
        all.extend(leaf_focal_times(leaf.manifold, leaf_sub_dimension(leaf)?, len)?);
    }
    Ok(merge_focal_times(all))
}

fn rebuild_class(m: &Manifold, classes: &mut std::slice::Iter<'_, HomotopyClass>) -> HomotopyClass {
    match m {
        Manifold::Product { left, right } => {
            let l = rebuild_class(left, classes);
            let r = rebuild_class(right, classes);
            HomotopyClass::product(l, r)
        }
        _ => classes.next().cloned().expect("one class per leaf"),
    }
}

/// All geodesics from `Q` to `x1`, perpendicular to `Q`, in class `c`, with length at most
/// `length_cap`, sorted by length.
pub fn enumerate_geodesics(
    m: &Manifold,
    q: &Submanifold,
    x1: &[f64],
    c: &HomotopyClass,
    length_cap: f64,
) -> Result<Vec<GeodesicDatum>> {
    if length_cap.is_nan() || length_cap <= 0.0 {
        return Err(Error::BadParameters(format!("length cap must be positive, got {length_cap}")));
    }
    let leaves = leaves(m, q, x1, Some(c))?;
    let d = q.dimension(m)?;
    if d >= m.dimension() {
        return Err(Error::BadParameters("submanifold must have positive codimension".into()));
    }
    let top_level = leaves.len() == 1;
    let mut all_contained = true;
    for leaf in &leaves {
        if !leaf_contains_endpoint(leaf)? {
            all_contained = false;
        }
    }
    if all_contained {
        return Err(Error::EndpointOnSubmanifold);
    }

    let mut per_leaf = Vec::with_capacity(leaves.len());
    for leaf in &leaves {
        per_leaf.push(leaf_geodesics(leaf, length_cap, top_level)?);
    }
    let sub_dims: Vec<usize> = leaves.iter().map(leaf_sub_dimension).collect::<Result<_>>()?;

    // Cartesian product with pruning on the accumulated squared length.
    let cap2 = length_cap * length_cap;
    let mut combos: Vec<(f64, Vec<usize>)> = vec![(0.0, Vec::new())];
    for geos in &per_leaf {
        let mut next = Vec::new();
        for (acc, idx) in &combos {
            for (i, g) in geos.iter().enumerate() {
                let total = acc + g.length * g.length;
                if total <= cap2 * (1.0 + 1e-15) {
                    let mut idx = idx.clone();
                    idx.push(i);
                    next.push((total, idx));
                }
            }
        }
        if next.len() > ENUMERATION_BUDGET {
            return Err(Error::CapTooSmall { cap: length_cap, detail: "product enumeration exceeds the geodesic budget".into() });
        }
        combos = next;
    }

    let mut out = Vec::with_capacity(combos.len());
    for (len2, idx) in combos {
        let length = len2.sqrt();
        if length == 0.0 || length > length_cap {
            continue;
        }
        let parts: Vec<&LeafGeodesic> = idx.iter().zip(&per_leaf).map(|(&i, geos)| &geos[i]).collect();
        let mut focal = Vec::new();
        for ((leaf, part), &sd) in leaves.iter().zip(&parts).zip(&sub_dims) {
            focal.extend(leaf_focal_times(leaf.manifold, sd, part.length)?);
        }
        let focal_times = merge_focal_times(focal);
        let morse_index = focal_times.iter().map(|f| f.multiplicity).sum();
        let start = parts.iter().flat_map(|p| p.start.iter().copied()).collect();
        let initial_covector = parts
            .iter()
            .flat_map(|p| p.direction.iter().map(move |x| x * p.length / length))
            .collect();
        let classes: Vec<HomotopyClass> = parts.iter().map(|p| p.class.clone()).collect();
        let homotopy_class = rebuild_class(m, &mut classes.iter());
        out.push(GeodesicDatum {
            length,
            morse_index,
            homotopy_class,
            start,
            initial_covector,
            focal_times,
            factor_lengths: parts.iter().map(|p| p.length).collect(),
        });
    }
    out.sort_by(|a, b| a.length.total_cmp(&b.length).then_with(|| a.start.iter().zip(&b.start).fold(std::cmp::Ordering::Equal, |o, (x, y)| o.then(x.total_cmp(y)))));
    Ok(out)
}

/// `γ(1)` computed by the exponential map from the stored initial data.
pub fn geodesic_endpoint(m: &Manifold, g: &GeodesicDatum) -> Vec<f64> {
    let mut offset = 0;
    let mut out = Vec::with_capacity(g.start.len());
    let mut factor = 0;
    endpoint_rec(m, g, &mut offset, &mut factor, &mut out);
    out
}

fn endpoint_rec(m: &Manifold, g: &GeodesicDatum, offset: &mut usize, factor: &mut usize, out: &mut Vec<f64>) {
    match m {
        Manifold::Product { left, right } => {
            endpoint_rec(left, g, offset, factor, out);
            endpoint_rec(right, g, offset, factor, out);
        }
        _ => {
            let dim = m.ambient_dimension();
            let start = &g.start[*offset..*offset + dim];
            let cov = &g.initial_covector[*offset..*offset + dim];
            let len = g.factor_lengths[*factor];
            // Unit direction of this factor.
            let dir: Vec<f64> = if len > 0.0 { cov.iter().map(|x| x * g.length / len).collect() } else { vec![0.0; dim] };
            match m {
                Manifold::RoundSphere { radius, .. } => {
                    let theta = len / radius;
                    out.extend(start.iter().zip(&dir).map(|(p, u)| theta.cos() * p + radius * theta.sin() * u));
                }
                _ => out.extend(start.iter().zip(&dir).map(|(p, u)| p + len * u)),
            }
            *offset += dim;
            *factor += 1;
        }
    }
}

/// Whether `a` and `b` are the same point of `m` (tori compared modulo the lattice).
pub fn same_point(m: &Manifold, a: &[f64], b: &[f64], tol: f64) -> bool {
    match m {
        Manifold::Product { left, right } => {
            let split = left.ambient_dimension();
            same_point(left, &a[..split], &b[..split], tol) && same_point(right, &a[split..], &b[split..], tol)
        }
        Manifold::FlatTorus { lattice, .. } => {
            let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            lattice_coordinates(lattice, &diff).iter().all(|c| (c - c.round()).abs() <= tol)
        }
        Manifold::RoundSphere { .. } => a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol),
    }
}

/// Shape operator of `Q` at a unit conormal, as a `d × d` symmetric matrix in an
/// orthonormal frame of `TQ`. Every submanifold in the catalog is totally geodesic.
pub fn shape_operator(m: &Manifold, q: &Submanifold) -> Result<DMatrix<f64>> {
    let d = q.dimension(m)?;
    Ok(DMatrix::zeros(d, d))
}

#[cfg(test)]
mod tests;
