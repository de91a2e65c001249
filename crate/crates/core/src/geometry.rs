//! Two-dimensional rate regions as intersections of half-planes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Side of the clipping box, in bits.
pub const BOX: f64 = 64.0;
pub const CONSTRUCTION_TOL: f64 = 1e-12;
pub const PREDICATE_TOL: f64 = 1e-9;
pub const WITNESS_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("region is empty")]
    Infeasible,
    #[error("region is unbounded")]
    Unbounded,
    #[error("half-plane has zero normal")]
    ZeroNormal,
}

pub type Result<T> = std::result::Result<T, GeomError>;

/// a1·R1 + a2·R2 ≤ b.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub a1: f64,
    pub a2: f64,
    pub b: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl HalfPlane {
    pub fn new(a1: f64, a2: f64, b: f64) -> Self {
        Self { a1, a2, b, name: None }
    }

    pub fn named(a1: f64, a2: f64, b: f64, name: impl Into<String>) -> Self {
        Self { a1, a2, b, name: Some(name.into()) }
    }

    fn norm(&self) -> f64 {
        self.a1.hypot(self.a2)
    }

    /// Signed distance of `p` beyond the boundary; positive means violated.
    pub fn excess(&self, p: RatePoint) -> f64 {
        (self.a1 * p.r1 + self.a2 * p.r2 - self.b) / self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub r1: f64,
    pub r2: f64,
}

impl RatePoint {
    pub fn new(r1: f64, r2: f64) -> Self {
        Self { r1, r2 }
    }

    fn sub(self, o: RatePoint) -> RatePoint {
        RatePoint::new(self.r1 - o.r1, self.r2 - o.r2)
    }

    fn dist(self, o: RatePoint) -> f64 {
        (self.r1 - o.r1).hypot(self.r2 - o.r2)
    }

    pub fn swapped(self) -> RatePoint {
        RatePoint::new(self.r2, self.r1)
    }
}

fn cross(a: RatePoint, b: RatePoint) -> f64 {
    a.r1 * b.r2 - a.r2 * b.r1
}

/// Intersection of half-planes with the nonnegative quadrant.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RateRegion {
    pub halfplanes: Vec<HalfPlane>,
}

impl RateRegion {
    pub fn new(halfplanes: Vec<HalfPlane>) -> Self {
        Self { halfplanes }
    }

    /// Region whose boundary is the given counter-clockwise polygon.
    pub fn from_vertices(vs: &[RatePoint]) -> Self {
        let mut hp = Vec::new();
        let n = vs.len();
        if n < 3 {
            // segment or point: bound by the box of the points
            let (mx1, mx2) = vs.iter().fold((0.0f64, 0.0f64), |a, p| (a.0.max(p.r1), a.1.max(p.r2)));
            hp.push(HalfPlane::new(1.0, 0.0, mx1));
            hp.push(HalfPlane::new(0.0, 1.0, mx2));
            if n == 2 {
                let d = vs[1].sub(vs[0]);
                if d.r1.abs() > 0.0 && d.r2.abs() > 0.0 {
                    let (a1, a2) = (-d.r2, d.r1);
                    let s = if a1 * 0.0 + a2 * 0.0 <= a1 * vs[0].r1 + a2 * vs[0].r2 { 1.0 } else { -1.0 };
                    hp.push(HalfPlane::new(s * a1, s * a2, s * (a1 * vs[0].r1 + a2 * vs[0].r2)));
                }
            }
            return Self::new(hp);
        }
        for i in 0..n {
            let p = vs[i];
            let q = vs[(i + 1) % n];
            let d = q.sub(p);
            let (a1, a2) = (d.r2, -d.r1);
            if a1.hypot(a2) == 0.0 {
                continue;
            }
            hp.push(HalfPlane::new(a1, a2, a1 * p.r1 + a2 * p.r2));
        }
        Self::new(hp)
    }

    /// Down-closed convex hull of a point cloud in the quadrant.
    pub fn hull_of(points: &[RatePoint]) -> Result<Self> {
        if points.is_empty() {
            return Err(GeomError::Infeasible);
        }
        let mut cloud = vec![RatePoint::new(0.0, 0.0)];
        for p in points {
            let p = RatePoint::new(p.r1.max(0.0), p.r2.max(0.0));
            cloud.push(p);
            cloud.push(RatePoint::new(p.r1, 0.0));
            cloud.push(RatePoint::new(0.0, p.r2));
        }
        Ok(Self::from_vertices(&convex_hull(cloud)))
    }

    pub fn vertices(&self) -> Result<Vec<RatePoint>> {
        vertices(self)
    }

    pub fn contains_point(&self, p: RatePoint, tol: f64) -> bool {
        contains_point(self, p, tol)
    }

    /// Largest r with (r, r) in the region.
    pub fn symmetric_rate(&self) -> Result<f64> {
        let vs = self.vertices()?;
        let mut best = 0.0f64;
        let n = vs.len();
        for i in 0..n {
            best = best.max(vs[i].r1.min(vs[i].r2));
            let (p, q) = (vs[i], vs[(i + 1) % n]);
            let (d1, d2) = (q.r1 - p.r1, q.r2 - p.r2);
            let den = d1 - d2;
            if den.abs() > 1e-15 {
                let t = (p.r2 - p.r1) / den;
                if (0.0..=1.0).contains(&t) {
                    best = best.max(p.r1 + t * d1);
                }
            }
        }
        Ok(best)
    }

    /// Largest R1 + R2 over the region.
    pub fn max_sum_rate(&self) -> Result<f64> {
        Ok(self.vertices()?.iter().map(|p| p.r1 + p.r2).fold(0.0, f64::max))
    }

    /// The region with R1 and R2 exchanged.
    pub fn swapped(&self) -> Self {
        Self::new(
            self.halfplanes
                .iter()
                .map(|h| HalfPlane { a1: h.a2, a2: h.a1, b: h.b, name: h.name.clone() })
                .collect(),
        )
    }
}

fn clip(poly: &[RatePoint], h: &HalfPlane) -> Vec<RatePoint> {
    let norm = h.norm();
    let val = |p: RatePoint| (h.a1 * p.r1 + h.a2 * p.r2 - h.b) / norm;
    let mut out = Vec::with_capacity(poly.len() + 1);
    let n = poly.len();
    for i in 0..n {
        let cur = poly[i];
        let next = poly[(i + 1) % n];
        let (vc, vn) = (val(cur), val(next));
        let cin = vc <= CONSTRUCTION_TOL;
        let nin = vn <= CONSTRUCTION_TOL;
        if cin {
            out.push(cur);
        }
        if cin != nin {
            let t = vc / (vc - vn);
            if t.is_finite() {
                let t = t.clamp(0.0, 1.0);
                out.push(RatePoint::new(
                    cur.r1 + t * (next.r1 - cur.r1),
                    cur.r2 + t * (next.r2 - cur.r2),
                ));
            }
        }
    }
    out
}

fn cleanup(mut poly: Vec<RatePoint>) -> Vec<RatePoint> {
    // consecutive duplicates, including wrap-around
    let mut out: Vec<RatePoint> = Vec::with_capacity(poly.len());
    for p in poly.drain(..) {
        if out.last().is_none_or(|q| q.dist(p) > PREDICATE_TOL) {
            out.push(p);
        }
    }
    while out.len() > 1 && out[0].dist(out[out.len() - 1]) <= PREDICATE_TOL {
        out.pop();
    }
    // collinear interior points
    let mut changed = out.len() > 2;
    while changed && out.len() > 2 {
        changed = false;
        let n = out.len();
        for i in 0..n {
            let prev = out[(i + n - 1) % n];
            let p = out[i];
            let next = out[(i + 1) % n];
            let e1 = p.sub(prev);
            let e2 = next.sub(p);
            let scale = e1.r1.hypot(e1.r2) * e2.r1.hypot(e2.r2);
            if cross(e1, e2).abs() <= 1e-10 * scale || scale == 0.0 {
                out.remove(i);
                changed = true;
                break;
            }
        }
    }
    if out.len() == 2 && out[0].dist(out[1]) <= PREDICATE_TOL {
        out.pop();
    }
    // start at the lexicographically smallest (r1, r2)
    if let Some(k) = (0..out.len()).min_by(|&i, &j| {
        (out[i].r1, out[i].r2).partial_cmp(&(out[j].r1, out[j].r2)).unwrap()
    }) {
        out.rotate_left(k);
    }
    out
}

/// Counter-clockwise vertices of a bounded, nonempty region.
pub fn vertices(region: &RateRegion) -> Result<Vec<RatePoint>> {
    let mut poly = vec![
        RatePoint::new(0.0, 0.0),
        RatePoint::new(BOX, 0.0),
        RatePoint::new(BOX, BOX),
        RatePoint::new(0.0, BOX),
    ];
    for h in &region.halfplanes {
        if h.norm() == 0.0 {
            if h.b < -CONSTRUCTION_TOL {
                return Err(GeomError::Infeasible);
            }
            continue;
        }
        poly = clip(&poly, h);
        if poly.is_empty() {
            return Err(GeomError::Infeasible);
        }
    }
    let poly = cleanup(poly);
    if poly.is_empty() {
        return Err(GeomError::Infeasible);
    }
    if poly.iter().any(|p| p.r1 >= BOX - PREDICATE_TOL || p.r2 >= BOX - PREDICATE_TOL) {
        return Err(GeomError::Unbounded);
    }
    Ok(poly)
}

pub fn contains_point(region: &RateRegion, p: RatePoint, tol: f64) -> bool {
    p.r1 >= -tol
        && p.r2 >= -tol
        && region.halfplanes.iter().all(|h| h.a1 * p.r1 + h.a2 * p.r2 <= h.b + tol)
}

pub fn contains_region(outer: &RateRegion, inner: &RateRegion, tol: f64) -> Result<bool> {
    vertices(outer)?;
    Ok(vertices(inner)?.into_iter().all(|p| contains_point(outer, p, tol)))
}

/// Largest signed distance of `p` beyond any constraint (negative inside).
pub fn violation(region: &RateRegion, p: RatePoint) -> f64 {
    region
        .halfplanes
        .iter()
        .filter(|h| h.norm() > 0.0)
        .map(|h| h.excess(p))
        .fold((-p.r1).max(-p.r2), f64::max)
}

/// A vertex of `a` lying at least [`WITNESS_TOL`] outside `b`, if any.
pub fn strict_improvement(a: &RateRegion, b: &RateRegion) -> Result<Option<RatePoint>> {
    vertices(b)?;
    let mut best: Option<(f64, RatePoint)> = None;
    for p in vertices(a)? {
        let v = violation(b, p);
        if best.is_none_or(|(bv, _)| v > bv) {
            best = Some((v, p));
        }
    }
    Ok(best.filter(|(v, _)| *v >= WITNESS_TOL).map(|(_, p)| p))
}

/// Maximum R2 of a convex polygon along the vertical line R1 = r1.
pub fn max_r2_at(poly: &[RatePoint], r1: f64) -> Option<f64> {
    let mut best: Option<f64> = None;
    let n = poly.len();
    let mut take = |y: f64| best = Some(best.map_or(y, |b: f64| b.max(y)));
    for i in 0..n {
        let p = poly[i];
        if (p.r1 - r1).abs() <= PREDICATE_TOL {
            take(p.r2);
        }
        if n > 1 {
            let q = poly[(i + 1) % n];
            let (lo, hi) = if p.r1 < q.r1 { (p, q) } else { (q, p) };
            if lo.r1 < r1 && r1 < hi.r1 {
                let t = (r1 - lo.r1) / (hi.r1 - lo.r1);
                take(lo.r2 + t * (hi.r2 - lo.r2));
            }
        }
    }
    best
}

/// Upper-right Pareto frontier of a union of regions on an `n`-point R1 grid.
pub fn frontier_union(regions: &[RateRegion], n: usize) -> Result<Vec<RatePoint>> {
    let mut polys = Vec::new();
    for r in regions {
        match vertices(r) {
            Ok(v) => polys.push(v),
            Err(GeomError::Infeasible) => {}
            Err(e) => return Err(e),
        }
    }
    frontier_of_polygons(&polys, n)
}

pub fn frontier_of_polygons(polys: &[Vec<RatePoint>], n: usize) -> Result<Vec<RatePoint>> {
    if polys.is_empty() {
        return Err(GeomError::Infeasible);
    }
    let r1max = polys.iter().flatten().map(|p| p.r1).fold(0.0, f64::max);
    let n = n.max(2);
    let mut out: Vec<RatePoint> = (0..n)
        .map(|k| {
            let r1 = r1max * k as f64 / (n - 1) as f64;
            let r2 = polys
                .iter()
                .filter_map(|p| max_r2_at(p, r1))
                .fold(f64::NEG_INFINITY, f64::max);
            RatePoint::new(r1, r2)
        })
        .collect();
    let mut run = f64::NEG_INFINITY;
    for p in out.iter_mut().rev() {
        run = run.max(p.r2);
        p.r2 = run.max(0.0);
    }
    Ok(out)
}

/// Convex hull, counter-clockwise, collinear points dropped.
pub fn convex_hull(mut pts: Vec<RatePoint>) -> Vec<RatePoint> {
    pts.sort_by(|a, b| (a.r1, a.r2).partial_cmp(&(b.r1, b.r2)).unwrap());
    pts.dedup_by(|a, b| a.dist(*b) <= CONSTRUCTION_TOL);
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<RatePoint> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2
            && cross(lower[lower.len() - 1].sub(lower[lower.len() - 2]), p.sub(lower[lower.len() - 1]))
                <= 0.0
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<RatePoint> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2
            && cross(upper[upper.len() - 1].sub(upper[upper.len() - 2]), p.sub(upper[upper.len() - 1]))
                <= 0.0
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn dist_to_segment(p: RatePoint, a: RatePoint, b: RatePoint) -> f64 {
    let d = b.sub(a);
    let len2 = d.r1 * d.r1 + d.r2 * d.r2;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p.r1 - a.r1) * d.r1 + (p.r2 - a.r2) * d.r2) / len2;
    let t = t.clamp(0.0, 1.0);
    p.dist(RatePoint::new(a.r1 + t * d.r1, a.r2 + t * d.r2))
}

/// Distance from a point to a convex counter-clockwise polygon (0 inside).
pub fn dist_to_polygon(p: RatePoint, poly: &[RatePoint]) -> f64 {
    let n = poly.len();
    match n {
        0 => f64::INFINITY,
        1 => p.dist(poly[0]),
        2 => dist_to_segment(p, poly[0], poly[1]),
        _ => {
            let inside = (0..n).all(|i| cross(poly[(i + 1) % n].sub(poly[i]), p.sub(poly[i])) >= 0.0);
            if inside {
                0.0
            } else {
                (0..n)
                    .map(|i| dist_to_segment(p, poly[i], poly[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

/// Hausdorff distance between two convex polygons given by their vertices.
pub fn hausdorff(a: &[RatePoint], b: &[RatePoint]) -> f64 {
    let ab = a.iter().map(|&p| dist_to_polygon(p, b)).fold(0.0, f64::max);
    let ba = b.iter().map(|&p| dist_to_polygon(p, a)).fold(0.0, f64::max);
    ab.max(ba)
}

pub fn region_distance(a: &RateRegion, b: &RateRegion) -> Result<f64> {
    Ok(hausdorff(&vertices(a)?, &vertices(b)?))
}

/// Format with 12 significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { x.to_string() };
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&mag) {
        return format!("{:.11e}", x);
    }
    let decimals = (11 - mag).max(0) as usize;
    format!("{:.*}", decimals, x)
}

/// CSV with header `r1,r2`.
pub fn to_csv(points: &[RatePoint]) -> String {
    let mut s = String::from("r1,r2\n");
    for p in points {
        s.push_str(&fmt_sig(p.r1));
        s.push(',');
        s.push_str(&fmt_sig(p.r2));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> RateRegion {
        RateRegion::new(vec![HalfPlane::new(1.0, 0.0, 1.0), HalfPlane::new(0.0, 1.0, 1.0)])
    }

    fn close(a: &[RatePoint], b: &[(f64, f64)]) -> bool {
        a.len() == b.len()
            && a.iter().zip(b).all(|(p, q)| (p.r1 - q.0).abs() < 1e-12 && (p.r2 - q.1).abs() < 1e-12)
    }

    #[test]
    fn unit_square() {
        let v = square().vertices().unwrap();
        assert!(close(&v, &[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]));
    }

    #[test]
    fn pentagon() {
        let mut r = square();
        r.halfplanes.push(HalfPlane::new(1.0, 1.0, 1.5));
        let v = r.vertices().unwrap();
        assert!(close(&v, &[(0.0, 0.0), (1.0, 0.0), (1.0, 0.5), (0.5, 1.0), (0.0, 1.0)]));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let r = RateRegion::new(vec![HalfPlane::new(1.0, 0.0, -0.5)]);
        assert_eq!(r.vertices(), Err(GeomError::Infeasible));
        let r = RateRegion::new(vec![HalfPlane::new(1.0, 0.0, 1.0)]);
        assert_eq!(r.vertices(), Err(GeomError::Unbounded));
    }

    #[test]
    fn degenerate_segment() {
        let r = RateRegion::new(vec![HalfPlane::new(1.0, 0.0, 1.0), HalfPlane::new(0.0, 1.0, 0.0)]);
        let v = r.vertices().unwrap();
        assert!(close(&v, &[(0.0, 0.0), (1.0, 0.0)]));
    }

    #[test]
    fn containment_and_witness() {
        let sq = square();
        assert!(sq.contains_point(RatePoint::new(0.5, 0.5), PREDICATE_TOL));
        assert!(!sq.contains_point(RatePoint::new(1.0 + 1e-6, 0.0), PREDICATE_TOL));
        assert!(contains_region(&sq, &sq, PREDICATE_TOL).unwrap());
        assert_eq!(strict_improvement(&sq, &sq).unwrap(), None);
        let half = RateRegion::new(vec![
            HalfPlane::new(1.0, 0.0, 1.0),
            HalfPlane::new(0.0, 1.0, 1.0),
            HalfPlane::new(1.0, 1.0, 1.0),
        ]);
        assert_eq!(strict_improvement(&sq, &half).unwrap(), Some(RatePoint::new(1.0, 1.0)));
    }

    #[test]
    fn frontier_of_nested_regions() {
        let small = RateRegion::new(vec![HalfPlane::new(1.0, 0.0, 0.5), HalfPlane::new(0.0, 1.0, 0.5)]);
        let f = frontier_union(&[small, square()], 5).unwrap();
        assert_eq!(f.len(), 5);
        assert!(f.iter().all(|p| (p.r2 - 1.0).abs() < 1e-12));
        assert!((f[4].r1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn frontier_all_infeasible() {
        let r = RateRegion::new(vec![HalfPlane::new(1.0, 0.0, -0.5)]);
        assert_eq!(frontier_union(&[r], 5), Err(GeomError::Infeasible));
    }

    #[test]
    fn symmetric_and_sum_rate() {
        let mut r = square();
        r.halfplanes.push(HalfPlane::new(1.0, 1.0, 1.5));
        assert!((r.symmetric_rate().unwrap() - 0.75).abs() < 1e-12);
        assert!((r.max_sum_rate().unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn hausdorff_ignores_collinear_extras() {
        let a = vec![RatePoint::new(0.0, 0.0), RatePoint::new(1.0, 0.0), RatePoint::new(0.0, 1.0)];
        let b = vec![
            RatePoint::new(0.0, 0.0),
            RatePoint::new(1.0, 0.0),
            RatePoint::new(0.5, 0.5),
            RatePoint::new(0.0, 1.0),
        ];
        assert!(hausdorff(&a, &b) < 1e-15);
        let c = vec![RatePoint::new(0.0, 0.0), RatePoint::new(2.0, 0.0), RatePoint::new(0.0, 1.0)];
        assert!((hausdorff(&a, &c) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_format() {
        let s = to_csv(&[RatePoint::new(0.5310044064107188, 0.0)]);
        assert_eq!(s, "r1,r2\n0.531004406411,0\n");
        assert_eq!(fmt_sig(1.729716410), "1.72971641000");
    }
}
