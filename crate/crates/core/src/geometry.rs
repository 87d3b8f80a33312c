//! Convex-body oracles: membership, Euclidean projection, gauge, support
//! function, chord intersection, and composite bodies via Dykstra's
//! alternating projections.
//!
//! Bodies always contain 0 in their interior. `inradius` is the radius of a
//! 0-centered ball inside K and `circumradius` bounds K inside a 0-centered
//! ball; both are exact for balls and boxes, conservative for composites,
//! and caller-declared (then spot-verified) for polytopes.

use crate::rng::{chain_rng, sphere_dir};
use crate::tol::*;
use crate::vecops::*;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub enum BodyKind {
    Ball {
        radius: f64,
    },
    AxisBox {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    /// Halfspaces aᵢ·x ≤ bᵢ. Rows are normalized to |aᵢ| = 1 at
    /// construction so residuals are geometric distances.
    Polytope {
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
    },
    Intersection {
        first: Box<ConvexBody>,
        second: Box<ConvexBody>,
    },
}

#[derive(Debug, Clone)]
pub struct ConvexBody {
    dim: usize,
    inradius: f64,
    circumradius: f64,
    kind: BodyKind,
}

/// The parameter interval {t : x + t·d ∈ K} for an interior x and unit d.
/// Invariant: t_min < 0 < t_max.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chord {
    pub t_min: f64,
    pub t_max: f64,
}

impl ConvexBody {
    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid("ball: dimension must be positive".into()));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Invalid(format!("ball: radius must be positive, got {radius}")));
        }
        Ok(ConvexBody { dim, inradius: radius, circumradius: radius, kind: BodyKind::Ball { radius } })
    }

    pub fn axis_box(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let dim = lower.len();
        if dim == 0 || upper.len() != dim {
            return Err(Error::Invalid("box: lower/upper must be non-empty and equal length".into()));
        }
        for i in 0..dim {
            if !lower[i].is_finite() || !upper[i].is_finite() || !(lower[i] < 0.0 && 0.0 < upper[i]) {
                return Err(Error::Invalid(format!(
                    "box: need lower < 0 < upper per coordinate, got [{}, {}] at {}",
                    lower[i], upper[i], i
                )));
            }
        }
        let inradius = lower.iter().zip(&upper).map(|(l, u)| (-l).min(*u)).fold(f64::INFINITY, f64::min);
        let circumradius = lower
            .iter()
            .zip(&upper)
            .map(|(l, u)| l.abs().max(u.abs()).powi(2))
            .sum::<f64>()
            .sqrt();
        Ok(ConvexBody { dim, inradius, circumradius, kind: BodyKind::AxisBox { lower, upper } })
    }

    /// `circumradius` must be declared by the caller: bounding a polytope
    /// needs an LP, which this crate deliberately avoids. The declared value
    /// is spot-verified by `verify_radii`.
    pub fn polytope(a: Vec<Vec<f64>>, b: Vec<f64>, circumradius: f64) -> Result<Self> {
        let m = a.len();
        if m == 0 || b.len() != m {
            return Err(Error::Invalid("polytope: need matching non-empty rows and rhs".into()));
        }
        let dim = a[0].len();
        if dim == 0 {
            return Err(Error::Invalid("polytope: dimension must be positive".into()));
        }
        let mut an = Vec::with_capacity(m);
        let mut bn = Vec::with_capacity(m);
        for (row, &bi) in a.iter().zip(&b) {
            if row.len() != dim {
                return Err(Error::Invalid("polytope: ragged constraint matrix".into()));
            }
            let mut nr = norm(row);
            if !(nr > 0.0) || !nr.is_finite() || !bi.is_finite() {
                return Err(Error::Invalid("polytope: zero or non-finite constraint row".into()));
            }
            // Idempotent for already-unit rows: renormalizing would wobble
            // the coefficients by an ulp, breaking exact file round-trips.
            if (nr - 1.0).abs() <= 1e-12 {
                nr = 1.0;
            }
            let bi_n = bi / nr;
            if !(bi_n > 0.0) {
                return Err(Error::Invalid(
                    "polytope: each bᵢ/|aᵢ| must be positive so 0 is interior".into(),
                ));
            }
            an.push(row.iter().map(|x| x / nr).collect());
            bn.push(bi_n);
        }
        let inradius = bn.iter().fold(f64::INFINITY, |acc, &x| acc.min(x));
        if !(circumradius >= inradius) || !circumradius.is_finite() {
            return Err(Error::Invalid(format!(
                "polytope: declared circumradius {circumradius} below inradius {inradius}"
            )));
        }
        Ok(ConvexBody { dim, inradius, circumradius, kind: BodyKind::Polytope { a: an, b: bn } })
    }

    pub fn intersection(first: ConvexBody, second: ConvexBody) -> Result<Self> {
        if first.dim != second.dim {
            return Err(Error::Invalid(format!(
                "intersection: dimension mismatch {} vs {}",
                first.dim, second.dim
            )));
        }
        // A 0-centered ball of radius min(r1, r2) sits inside both parts;
        // K is inside both circumballs, so min(R1, R2) bounds it.
        let dim = first.dim;
        let inradius = first.inradius.min(second.inradius);
        let circumradius = first.circumradius.min(second.circumradius);
        Ok(ConvexBody {
            dim,
            inradius,
            circumradius,
            kind: BodyKind::Intersection { first: Box::new(first), second: Box::new(second) },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn inradius(&self) -> f64 {
        self.inradius
    }

    pub fn circumradius(&self) -> f64 {
        self.circumradius
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    pub fn membership(&self, x: &[f64]) -> bool {
        assert_eq!(x.len(), self.dim, "membership: dimension mismatch");
        match &self.kind {
            BodyKind::Ball { radius } => norm(x) <= radius + TOL_MEM,
            BodyKind::AxisBox { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(xi, (l, u))| *xi >= l - TOL_MEM && *xi <= u + TOL_MEM),
            BodyKind::Polytope { a, b } => {
                a.iter().zip(b).all(|(row, bi)| dot(row, x) <= bi + TOL_MEM)
            }
            BodyKind::Intersection { first, second } => first.membership(x) && second.membership(x),
        }
    }

    /// Euclidean projection onto K: closed form for balls and boxes,
    /// Dykstra's algorithm otherwise (plain alternating projection would
    /// land in K but not at the nearest point).
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        assert_eq!(x.len(), self.dim, "project: dimension mismatch");
        match &self.kind {
            BodyKind::Ball { radius } => {
                let nx = norm(x);
                if nx <= *radius {
                    Ok(x.to_vec())
                } else {
                    Ok(scale(x, radius / nx))
                }
            }
            BodyKind::AxisBox { lower, upper } => Ok(x
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(xi, (l, u))| xi.clamp(*l, *u))
                .collect()),
            BodyKind::Polytope { a, b } => {
                if self.membership(x) {
                    return Ok(x.to_vec());
                }
                dykstra(x, a.len(), |i, v| {
                    let excess = dot(&a[i], v) - b[i];
                    if excess <= 0.0 {
                        Ok(v.to_vec())
                    } else {
                        Ok(add_scaled(v, -excess, &a[i]))
                    }
                })
            }
            BodyKind::Intersection { first, second } => {
                if self.membership(x) {
                    return Ok(x.to_vec());
                }
                let parts = [first.as_ref(), second.as_ref()];
                dykstra(x, 2, |i, v| parts[i].project(v))
            }
        }
    }

    /// Gauge ‖x‖_K = inf{t ≥ 0 : x ∈ tK}. Closed form except for
    /// intersections, which bisect on membership (the max-of-part-gauges
    /// identity serves as the independent test oracle).
    pub fn gauge(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim, "gauge: dimension mismatch");
        match &self.kind {
            BodyKind::Ball { radius } => norm(x) / radius,
            BodyKind::AxisBox { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(xi, (l, u))| if *xi > 0.0 { xi / u } else if *xi < 0.0 { xi / l } else { 0.0 })
                .fold(0.0, f64::max),
            BodyKind::Polytope { a, b } => a
                .iter()
                .zip(b)
                .map(|(row, bi)| (dot(row, x) / bi).max(0.0))
                .fold(0.0, f64::max),
            BodyKind::Intersection { .. } => {
                let nx = norm(x);
                if nx == 0.0 {
                    return 0.0;
                }
                // x/t ∈ K for t = |x|/r; x/t ∉ K for t < |x|/R.
                let mut hi = nx / self.inradius;
                let mut lo = nx / self.circumradius;
                if lo <= 0.0 {
                    lo = 0.0;
                }
                if self.membership(&scale(x, 1.0 / hi.max(1e-300))) {
                    for _ in 0..200 {
                        if hi - lo <= 1e-13 * hi.max(1.0) {
                            break;
                        }
                        let mid = 0.5 * (lo + hi);
                        if mid <= 0.0 {
                            break;
                        }
                        if self.membership(&scale(x, 1.0 / mid)) {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    /// Support function h_K(y) = sup{⟨x,y⟩ : x ∈ K}. Closed form for balls
    /// and boxes; polytopes and intersections run projected-gradient ascent
    /// over a shrinking step schedule (feasible iterates, so the result
    /// never overshoots the true value).
    pub fn support(&self, y: &[f64]) -> Result<f64> {
        assert_eq!(y.len(), self.dim, "support: dimension mismatch");
        match &self.kind {
            BodyKind::Ball { radius } => Ok(radius * norm(y)),
            BodyKind::AxisBox { lower, upper } => Ok(y
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(yi, (l, u))| if *yi >= 0.0 { yi * u } else { yi * l })
                .sum()),
            BodyKind::Polytope { .. } | BodyKind::Intersection { .. } => {
                let ny = norm(y);
                if ny == 0.0 {
                    return Ok(0.0);
                }
                let mut x = vec![0.0; self.dim];
                let mut best = 0.0f64;
                let mut step = self.circumradius / ny;
                for _ in 0..SUPP_SCALES {
                    for _ in 0..SUPP_ITERS_PER_SCALE {
                        x = self.project(&add_scaled(&x, step, y))?;
                        let v = dot(&x, y);
                        if v > best {
                            best = v;
                        }
                    }
                    step *= 0.25;
                }
                Ok(best)
            }
        }
    }

    /// Chord {t : x + t·d ∈ K} for interior x and unit d. Computed by exact
    /// interval arithmetic for every kind (intersections intersect their
    /// parts' intervals), so `TOL_CHORD` only guards the interior check.
    pub fn chord(&self, x: &[f64], d: &[f64]) -> Result<Chord> {
        assert_eq!(x.len(), self.dim, "chord: dimension mismatch");
        debug_assert!((norm(d) - 1.0).abs() < 1e-9, "chord: direction must be unit");
        let c = self.chord_interval(x, d)?;
        if c.t_min > -TOL_CHORD || c.t_max < TOL_CHORD {
            return Err(Error::Numeric(format!(
                "chord: point is not interior (interval [{:.3e}, {:.3e}])",
                c.t_min, c.t_max
            )));
        }
        Ok(c)
    }

    fn chord_interval(&self, x: &[f64], d: &[f64]) -> Result<Chord> {
        match &self.kind {
            BodyKind::Ball { radius } => {
                let xd = dot(x, d);
                let disc = xd * xd + radius * radius - norm_sq(x);
                if disc < 0.0 {
                    return Err(Error::Numeric("chord: point outside ball".into()));
                }
                let s = disc.sqrt();
                Ok(Chord { t_min: -xd - s, t_max: -xd + s })
            }
            BodyKind::AxisBox { lower, upper } => {
                let mut t_min = f64::NEG_INFINITY;
                let mut t_max = f64::INFINITY;
                for i in 0..self.dim {
                    if d[i] != 0.0 {
                        let a = (lower[i] - x[i]) / d[i];
                        let b = (upper[i] - x[i]) / d[i];
                        t_min = t_min.max(a.min(b));
                        t_max = t_max.min(a.max(b));
                    } else if x[i] < lower[i] - TOL_MEM || x[i] > upper[i] + TOL_MEM {
                        return Err(Error::Numeric("chord: point outside box".into()));
                    }
                }
                Ok(Chord { t_min, t_max })
            }
            BodyKind::Polytope { a, b } => {
                let mut t_min = f64::NEG_INFINITY;
                let mut t_max = f64::INFINITY;
                for (row, bi) in a.iter().zip(b) {
                    let slack = bi - dot(row, x);
                    let slope = dot(row, d);
                    if slope.abs() < 1e-15 {
                        if slack < -TOL_MEM {
                            return Err(Error::Numeric("chord: point outside polytope".into()));
                        }
                    } else if slope > 0.0 {
                        t_max = t_max.min(slack / slope);
                    } else {
                        t_min = t_min.max(slack / slope);
                    }
                }
                Ok(Chord { t_min, t_max })
            }
            BodyKind::Intersection { first, second } => {
                let c1 = first.chord_interval(x, d)?;
                let c2 = second.chord_interval(x, d)?;
                Ok(Chord { t_min: c1.t_min.max(c2.t_min), t_max: c1.t_max.min(c2.t_max) })
            }
        }
    }

    /// Signed distance to the boundary for x ∈ K (negative outside).
    /// Exact for ball/box; polytopes use constraint residuals, which are
    /// true distances since their rows are unit-norm.
    pub fn distance_to_boundary(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim, "distance_to_boundary: dimension mismatch");
        match &self.kind {
            BodyKind::Ball { radius } => radius - norm(x),
            BodyKind::AxisBox { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(xi, (l, u))| (xi - l).min(u - xi))
                .fold(f64::INFINITY, f64::min),
            BodyKind::Polytope { a, b } => a
                .iter()
                .zip(b)
                .map(|(row, bi)| bi - dot(row, x))
                .fold(f64::INFINITY, f64::min),
            BodyKind::Intersection { first, second } => {
                first.distance_to_boundary(x).min(second.distance_to_boundary(x))
            }
        }
    }

    /// Axis-aligned bounding box (used by rejection sampling and grid
    /// histograms). Tight for ball/box, circumball-based for polytopes,
    /// intersection of part boxes for composites.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.kind {
            BodyKind::Ball { radius } => (vec![-radius; self.dim], vec![*radius; self.dim]),
            BodyKind::AxisBox { lower, upper } => (lower.clone(), upper.clone()),
            BodyKind::Polytope { .. } => {
                (vec![-self.circumradius; self.dim], vec![self.circumradius; self.dim])
            }
            BodyKind::Intersection { first, second } => {
                let (l1, u1) = first.bounding_box();
                let (l2, u2) = second.bounding_box();
                (
                    l1.iter().zip(&l2).map(|(a, b)| a.max(*b)).collect(),
                    u1.iter().zip(&u2).map(|(a, b)| a.min(*b)).collect(),
                )
            }
        }
    }

    /// Spot-check the declared radii: membership on random points of norm
    /// inradius·(1−1e-9), and gauge(x) ≥ |x|/circumradius on random x.
    pub fn verify_radii(&self, seed: u64) -> Result<()> {
        let mut rng = chain_rng(seed);
        for _ in 0..32 {
            let d = sphere_dir(&mut rng, self.dim);
            let p = scale(&d, self.inradius * (1.0 - 1e-9));
            if !self.membership(&p) {
                return Err(Error::Invalid(format!(
                    "declared inradius {} too large: boundary point escapes K",
                    self.inradius
                )));
            }
            let x = scale(&d, self.circumradius * 2.0);
            let g = self.gauge(&x);
            if g < norm(&x) / self.circumradius * (1.0 - 1e-6) {
                return Err(Error::Invalid(format!(
                    "declared circumradius {} too small: gauge({:?}) = {}",
                    self.circumradius, x, g
                )));
            }
        }
        Ok(())
    }
}

/// Dykstra's alternating projection onto an intersection of `m` convex sets.
/// Correction vectors distinguish this from plain alternation, which finds a
/// feasible point but not the nearest one. The iterate alone is not a valid
/// convergence witness — it can rest at a feasible point for many passes
/// while the corrections still drift toward the optimum — so a pass only
/// counts as converged when the iterate *and* every correction vector have
/// stopped moving, and the iterate's residual to each set is below
/// `TOL_PROJ_ITER`.
fn dykstra<P>(x0: &[f64], m: usize, mut project_onto: P) -> Result<Vec<f64>>
where
    P: FnMut(usize, &[f64]) -> Result<Vec<f64>>,
{
    let n = x0.len();
    let mut z = x0.to_vec();
    let mut corrections = vec![vec![0.0; n]; m];
    let mut residual = f64::INFINITY;
    for _pass in 0..MAX_PROJ_ITERS {
        let z_prev = z.clone();
        let mut corr_delta = 0.0f64;
        for i in 0..m {
            let v: Vec<f64> = z.iter().zip(&corrections[i]).map(|(a, b)| a + b).collect();
            let p = project_onto(i, &v)?;
            let mut d2 = 0.0;
            for j in 0..n {
                let next = v[j] - p[j];
                let step = next - corrections[i][j];
                d2 += step * step;
                corrections[i][j] = next;
            }
            corr_delta = corr_delta.max(d2.sqrt());
            z = p;
        }
        if dist(&z, &z_prev).max(corr_delta) <= 0.1 * TOL_PROJ_ITER {
            residual = 0.0;
            for i in 0..m {
                residual = residual.max(dist(&z, &project_onto(i, &z)?));
            }
            if residual <= TOL_PROJ_ITER {
                return Ok(z);
            }
        }
    }
    Err(Error::ProjectionDiverged { iters: MAX_PROJ_ITERS, residual })
}
