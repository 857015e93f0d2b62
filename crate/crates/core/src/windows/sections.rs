//! Environment sections of the windows. A vertex's star (and, for the
//! five-fold stars, the stars of its neighbours) depends only on which
//! neighbouring lattice points are accepted, so the sections are cells of the
//! arrangement cut out by the neighbours' translated windows.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::{clip_halfplane, dedup_ring, trapezoid, unit_pentagon, windows, AcceptanceDomain, GoldenPolygon, Location, SubDomainMap};
use crate::error::{Error, Result};
use crate::golden::{perp_of, GoldenNumber, GoldenVector, PerpVector};
use crate::labels::{Environment, Family};
use crate::tiling::{star_label, Edges};

type Ring = Vec<GoldenVector>;

struct Arrangement {
    wins: Vec<Option<GoldenPolygon>>,
    level: u8,
    first: Vec<[i64; 5]>,
}

fn level_of(n: &[i64; 5]) -> u8 {
    n.iter().sum::<i64>().rem_euclid(5) as u8
}

impl Arrangement {
    fn accepted(&self, x: &PerpVector, level: u8) -> Result<bool> {
        match &self.wins[level as usize] {
            None => Ok(false),
            Some(w) => match w.locate(x) {
                Location::Inside => Ok(true),
                Location::Outside => Ok(false),
                Location::Boundary => Err(Error::OnBoundary(format!("{x:?} on a section line"))),
            },
        }
    }

    /// Corner angles (units of 36°) of the star at `x`.
    fn star(&self, x: &PerpVector, level: u8) -> Result<Vec<u8>> {
        let mut dirs = Vec::new();
        for (d, e) in self.first.iter().enumerate() {
            if self.accepted(&(*x + perp_of(e)), (level + level_of(e)) % 5)? {
                dirs.push(d as u8);
            }
        }
        let n = dirs.len();
        Ok((0..n).map(|i| (dirs[(i + 1) % n] + 10 - dirs[i]) % 10).map(|g| if g == 0 { 10 } else { g }).collect())
    }

    fn label(&self, x: &PerpVector) -> Result<Environment> {
        let seq = self.star(x, self.level)?;
        if let Some(e) = star_label(&seq) {
            return Ok(e);
        }
        if seq != [2; 5] {
            return Err(Error::Unclassifiable(format!("section point {x:?} has star {seq:?}")));
        }
        let mut around = Vec::new();
        for e in &self.first {
            let q = (self.level + level_of(e)) % 5;
            let y = *x + perp_of(e);
            if self.accepted(&y, q)? {
                around.push(star_label(&self.star(&y, q)?));
            }
        }
        if around.iter().all(|l| *l == Some(Environment::D)) {
            Ok(Environment::S1)
        } else if around.iter().all(|l| *l == Some(Environment::J)) {
            Ok(Environment::S2)
        } else {
            Err(Error::Unclassifiable(format!("five-fold section point {x:?} with neighbours {around:?}")))
        }
    }

    /// Edge lines of the windows of the points `x + perp(δ)`.
    fn lines(&self, deltas: &[[i64; 5]]) -> Vec<(GoldenVector, GoldenVector)> {
        let mut out = Vec::new();
        for d in deltas {
            let Some(w) = &self.wins[((self.level + level_of(d)) % 5) as usize] else { continue };
            let shift = -perp_of(d);
            let v = w.vertices();
            for i in 0..v.len() {
                out.push((v[i] + shift, v[(i + 1) % v.len()] + shift));
            }
        }
        out
    }
}

fn split(pieces: Vec<Ring>, lines: &[(GoldenVector, GoldenVector)]) -> Vec<Ring> {
    let mut pieces = pieces;
    for (a, b) in lines {
        let d = *b - *a;
        let side = |p: &GoldenVector| d.cross(&(*p - *a));
        let mut next = Vec::with_capacity(pieces.len());
        for p in pieces {
            let s: Vec<i8> = p.iter().map(|v| side(v).sign()).collect();
            if !(s.contains(&1) && s.contains(&-1)) {
                next.push(p);
                continue;
            }
            for half in [clip_halfplane(&p, side), clip_halfplane(&p, |v| -side(v))] {
                let mut h = half;
                dedup_ring(&mut h);
                if h.len() >= 3 {
                    next.push(h);
                }
            }
        }
        pieces = next;
    }
    pieces
}

fn centroid(p: &[GoldenVector]) -> GoldenVector {
    let s = p.iter().fold(GoldenVector::zero(), |a, b| a + *b);
    s.scale(GoldenNumber::from_fracs(1, p.len() as i64, 0, 1))
}

fn area(p: &[GoldenVector]) -> GoldenNumber {
    let n = p.len();
    (0..n).map(|i| p[i].cross(&p[(i + 1) % n])).fold(GoldenNumber::zero(), |a, b| a + b) / 2
}

/// Exact physical abscissa, for ordering.
fn abscissa(v: &GoldenVector) -> GoldenNumber {
    v.x + v.y * GoldenNumber::from_fracs(-1, 2, 1, 2)
}

fn cmp_points(a: &GoldenVector, b: &GoldenVector) -> Ordering {
    match (abscissa(a) - abscissa(b)).sign() {
        0 => (a.y - b.y).sign().cmp(&0),
        s => s.cmp(&0),
    }
}

/// Counter-clockwise convex hull, exact.
fn hull(points: &[GoldenVector]) -> Ring {
    let mut p: Ring = points.to_vec();
    p.sort_by(cmp_points);
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let turn = |o: &GoldenVector, a: &GoldenVector, b: &GoldenVector| (*a - *o).cross(&(*b - *o)).sign();
    let mut lower: Ring = Vec::new();
    for v in &p {
        while lower.len() >= 2 && turn(&lower[lower.len() - 2], &lower[lower.len() - 1], v) <= 0 {
            lower.pop();
        }
        lower.push(*v);
    }
    let mut upper: Ring = Vec::new();
    for v in p.iter().rev() {
        while upper.len() >= 2 && turn(&upper[upper.len() - 2], &upper[upper.len() - 1], v) <= 0 {
            upper.pop();
        }
        upper.push(*v);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Merges each edge-connected group of same-label cells into its convex hull
/// when the group is convex; other groups stay as cells.
/// Pairs up cells whose union is convex, one merge per cell. Cells with the
/// fewest partners are matched first.
fn pairwise(cells: Vec<(Environment, Ring)>) -> Vec<(Environment, Ring)> {
    let joined = |a: &Ring, b: &Ring| -> Option<Ring> {
        if a.iter().filter(|v| b.contains(v)).count() < 2 {
            return None;
        }
        let pts: Ring = a.iter().chain(b.iter()).copied().collect();
        let h = hull(&pts);
        (area(&h) == area(a) + area(b)).then_some(h)
    };
    let n = cells.len();
    let partners: Vec<Vec<usize>> =
        (0..n).map(|i| (0..n).filter(|&j| j != i && joined(&cells[i].1, &cells[j].1).is_some()).collect()).collect();
    let mut used = vec![false; n];
    let mut out = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| partners[i].len());
    for i in order {
        if used[i] {
            continue;
        }
        used[i] = true;
        let free = partners[i].iter().copied().filter(|&j| !used[j]);
        match free.min_by_key(|&j| partners[j].len()) {
            Some(j) => {
                used[j] = true;
                out.push((cells[i].0, joined(&cells[i].1, &cells[j].1).unwrap()));
            }
            None => out.push(cells[i].clone()),
        }
    }
    out
}

fn merge(cells: Vec<(Environment, Ring)>) -> Vec<(Environment, Ring)> {
    let n = cells.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if cells[i].0 != cells[j].0 {
                continue;
            }
            let shared = cells[i].1.iter().filter(|v| cells[j].1.contains(v)).count();
            if shared >= 2 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut out = Vec::new();
    for (_, members) in groups {
        let label = cells[members[0]].0;
        let pts: Ring = members.iter().flat_map(|&i| cells[i].1.iter().copied()).collect();
        let h = hull(&pts);
        let total = members.iter().map(|&i| area(&cells[i].1)).fold(GoldenNumber::zero(), |a, b| a + b);
        if area(&h) == total {
            out.push((label, h));
        } else {
            out.extend(pairwise(members.into_iter().map(|i| cells[i].clone()).collect()));
        }
    }
    out
}

/// Convex pieces of a window (the windmill splits into its pentagon and
/// trapezoids).
fn convex_pieces(family: Family, level: u8, w: &GoldenPolygon) -> Vec<Ring> {
    if family == Family::P4 && (level == 1 || level == 4) {
        let k = GoldenNumber::from_ints(if level == 1 { 1 } else { -1 }, 0);
        let mut out = vec![unit_pentagon().scale(k).vertices().to_vec()];
        out.extend((0..5).map(|m| trapezoid(m).scale(k).vertices().to_vec()));
        out
    } else {
        vec![w.vertices().to_vec()]
    }
}

/// Exact dissection of the window at `level` into environment sections.
pub fn environment_map(family: Family, level: u8) -> Result<SubDomainMap<Environment>> {
    let wins = windows(family);
    let shape = wins[level as usize]
        .clone()
        .ok_or_else(|| Error::InvalidArgument(format!("the {family:?} window at level {level} is empty")))?;
    let e = Edges::new(0);
    let first: Vec<[i64; 5]> = (0..10).map(|d| e.vector(d)).collect();
    let mut second: Vec<[i64; 5]> = Vec::new();
    for a in &first {
        for b in &first {
            let s: [i64; 5] = std::array::from_fn(|i| a[i] + b[i]);
            if s.iter().any(|c| *c != 0) && !second.contains(&s) {
                second.push(s);
            }
        }
    }
    let arr = Arrangement { wins, level, first };
    let cells = split(convex_pieces(family, level, &shape), &arr.lines(&arr.first));
    let mut labelled = Vec::new();
    let mut five_fold = Vec::new();
    for c in cells {
        let seq = arr.star(&centroid(&c), level)?;
        if seq == [2; 5] {
            five_fold.push(c);
        } else {
            labelled.push((arr.label(&centroid(&c))?, c));
        }
    }
    // the five-fold stars need the stars of their neighbours
    for c in split(five_fold, &arr.lines(&second)) {
        labelled.push((arr.label(&centroid(&c))?, c));
    }
    let regions = merge(labelled)
        .into_iter()
        .map(|(l, r)| GoldenPolygon::new(r).map(|p| (l, p)))
        .collect::<Result<Vec<_>>>()?;
    let map = SubDomainMap { parent: AcceptanceDomain { family, level, shape: Some(shape) }, regions };
    if !map.is_partition() {
        return Err(Error::Consistency(format!("{family:?} level {level} sections do not partition the window")));
    }
    Ok(map)
}

/// Reconstructs the trapezoid standing on the pentagon edge `[f₀, f₁]` from
/// the perpendicular images of the level-1 vertices of a P4 patch built by
/// the local P1 derivation (which does not use `W₁`): support lines in the
/// twenty directions at multiples of 18° bound the folded point cloud, and
/// the corners where the long edges meet are snapped to the golden ring.
pub fn derive_trapezoid(radius: f64) -> Result<GoldenPolygon> {
    let t = crate::tiling::generate_p4_local(radius, 0, super::default_offset(), [0.0, 0.0])?;
    let pent = unit_pentagon();
    let mut pts: Vec<[f64; 2]> = Vec::new();
    for v in &t.vertices {
        if v.level() != 1 {
            continue;
        }
        let x = super::unit_frame_perp(v, 0, &t.offset);
        if pent.locate(&x) != Location::Outside {
            continue;
        }
        let p = x.to_f64();
        let ang = p[1].atan2(p[0]).rem_euclid(std::f64::consts::TAU);
        let m = (ang / (std::f64::consts::TAU / 5.0)).floor();
        let (s, c) = (-m * std::f64::consts::TAU / 5.0).sin_cos();
        pts.push([c * p[0] - s * p[1], s * p[0] + c * p[1]]);
    }
    if pts.len() < 100 {
        return Err(Error::InvalidArgument(format!("only {} level-1 points outside the pentagon", pts.len())));
    }
    // support half-planes n·x ≤ h
    let normals: Vec<[f64; 2]> = (0..20).map(|k| (k as f64 * std::f64::consts::PI / 10.0).sin_cos()).map(|(s, c)| [c, s]).collect();
    let support: Vec<f64> = normals.iter().map(|n| pts.iter().map(|p| n[0] * p[0] + n[1] * p[1]).fold(f64::MIN, f64::max)).collect();
    let mut poly: Vec<[f64; 2]> = vec![[-10.0, -10.0], [10.0, -10.0], [10.0, 10.0], [-10.0, 10.0]];
    let mut edge_of: Vec<usize> = vec![usize::MAX; 4];
    for (k, n) in normals.iter().enumerate() {
        let f = |p: &[f64; 2]| support[k] - (n[0] * p[0] + n[1] * p[1]);
        let mut next = Vec::new();
        let mut tags = Vec::new();
        for i in 0..poly.len() {
            let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
            let (fp, fq) = (f(&p), f(&q));
            if fp >= 0.0 {
                next.push(p);
                tags.push(edge_of[i]);
            }
            if (fp >= 0.0) != (fq >= 0.0) {
                let t = fp / (fp - fq);
                next.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
                tags.push(if fp >= 0.0 { k } else { edge_of[i] });
            }
        }
        poly = next;
        edge_of = tags;
    }
    // keep the long edges and intersect consecutive ones
    let n = poly.len();
    let len = |i: usize| {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        (q[0] - p[0]).hypot(q[1] - p[1])
    };
    let perimeter: f64 = (0..n).map(len).sum();
    let long: Vec<usize> = (0..n).filter(|&i| len(i) > 0.05 * perimeter).map(|i| edge_of[i]).collect();
    let mut corners = Vec::new();
    for i in 0..long.len() {
        let (a, b) = (long[i], long[(i + 1) % long.len()]);
        let (na, nb) = (normals[a], normals[b]);
        let det = na[0] * nb[1] - na[1] * nb[0];
        let p = [(support[a] * nb[1] - support[b] * na[1]) / det, (na[0] * support[b] - nb[0] * support[a]) / det];
        let s = GoldenVector::skew_coords(p);
        let snap = |x: f64| {
            let r = GoldenNumber::snap(x, 2, 3);
            if r.error < 0.02 && r.error < r.margin / 2.0 {
                Ok(r.value)
            } else {
                Err(Error::Consistency(format!("trapezoid corner coordinate {x} does not snap to the golden ring")))
            }
        };
        corners.push(GoldenVector::new(snap(s[0])?, snap(s[1])?));
    }
    GoldenPolygon::new(corners)
}
