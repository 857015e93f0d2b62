//! Acceptance domains ("windows") in perpendicular space and their colour
//! dissections, with exact membership predicates.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::golden::{
    denominator, neg_tau_pow_perp, perp_unit_int, unit_level, GoldenInt, GoldenNumber, GoldenVector, IndexVector,
    PerpVector,
};
use crate::labels::{ColorRegion, Family};

mod sections;
pub use sections::{derive_trapezoid, environment_map};

/// Outcome of a membership test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Location {
    Inside,
    Outside,
    Boundary,
}

/// Simple counter-clockwise polygon with exact vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GoldenPolygon {
    vertices: Vec<GoldenVector>,
}

impl GoldenPolygon {
    /// Validates simplicity and counter-clockwise orientation.
    pub fn new(vertices: Vec<GoldenVector>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidPolygon(format!("{} vertices", vertices.len())));
        }
        let poly = GoldenPolygon { vertices };
        if poly.area().sign() <= 0 {
            return Err(Error::InvalidPolygon("not counter-clockwise".into()));
        }
        poly.check_simple()?;
        Ok(poly)
    }

    /// Regular polygon with vertices `r·unit10(start + step·i)`.
    pub fn regular(n: usize, r: GoldenNumber, start: i64, step: i64) -> Self {
        let vertices = (0..n as i64).map(|i| GoldenVector::unit10(start + step * i).scale(r)).collect();
        GoldenPolygon::new(vertices).expect("regular polygons are valid")
    }

    pub fn vertices(&self) -> &[GoldenVector] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn edge(&self, i: usize) -> (GoldenVector, GoldenVector) {
        let n = self.vertices.len();
        (self.vertices[i], self.vertices[(i + 1) % n])
    }

    /// Exact area in units of sin 36°.
    pub fn area(&self) -> GoldenNumber {
        let n = self.vertices.len();
        let mut s = GoldenNumber::zero();
        for i in 0..n {
            s += self.vertices[i].cross(&self.vertices[(i + 1) % n]);
        }
        s / 2
    }

    pub fn area_f64(&self) -> f64 {
        self.area().to_f64() * crate::golden::SIN36
    }

    pub fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let (a, b) = self.edge(i);
            let c = self.vertices[(i + 2) % n];
            (b - a).cross(&(c - b)).sign() >= 0
        })
    }

    /// Indices of reflex (concave) corners.
    pub fn reflex_corners(&self) -> Vec<usize> {
        let n = self.vertices.len();
        (0..n)
            .filter(|&i| {
                let p = self.vertices[(i + n - 1) % n];
                let v = self.vertices[i];
                let q = self.vertices[(i + 1) % n];
                (v - p).cross(&(q - v)).sign() < 0
            })
            .collect()
    }

    fn check_simple(&self) -> Result<()> {
        let n = self.vertices.len();
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let (a, b) = self.edge(i);
                let (c, d) = self.edge(j);
                if adjacent {
                    // adjacent edges may only share their common endpoint
                    let (p, q, r) = if j == i + 1 { (a, b, d) } else { (c, d, b) };
                    if (q - p).cross(&(r - q)).is_zero() && (q - p).dot(&(r - q)).sign() < 0 {
                        return Err(Error::InvalidPolygon(format!("edges {i} and {j} fold back")));
                    }
                } else if segments_touch(a, b, c, d) {
                    return Err(Error::InvalidPolygon(format!("edges {i} and {j} intersect")));
                }
            }
        }
        Ok(())
    }

    pub fn scale(&self, k: GoldenNumber) -> GoldenPolygon {
        assert!(!k.is_zero());
        // a negative factor is a half-turn, which keeps the orientation
        GoldenPolygon { vertices: self.vertices.iter().map(|v| v.scale(k)).collect() }
    }

    pub fn translate(&self, t: GoldenVector) -> GoldenPolygon {
        GoldenPolygon { vertices: self.vertices.iter().map(|v| *v + t).collect() }
    }

    /// Rotation by `36°·d`.
    pub fn rotate(&self, d: i64) -> GoldenPolygon {
        GoldenPolygon { vertices: self.vertices.iter().map(|v| rotate_vec(v, d)).collect() }
    }

    /// Mirror image in the `f₀` axis (order reversed to stay counter-clockwise).
    pub fn mirror(&self) -> GoldenPolygon {
        let mut vertices: Vec<_> = self.vertices.iter().map(mirror_vec).collect();
        vertices.reverse();
        GoldenPolygon { vertices }
    }

    /// Equality as point sets: same cyclic vertex sequence up to rotation of
    /// the starting index.
    pub fn same_shape(&self, other: &GoldenPolygon) -> bool {
        let n = self.vertices.len();
        if n != other.vertices.len() {
            return false;
        }
        (0..n).any(|s| (0..n).all(|i| self.vertices[(i + s) % n] == other.vertices[i]))
    }

    /// Exact membership of `pt`.
    pub fn locate(&self, pt: &PerpVector) -> Location {
        let n = self.vertices.len();
        let f0 = GoldenVector::unit(0);
        locate_generic(
            n,
            self.is_convex(),
            |i| {
                let (a, b) = self.edge(i);
                (b - a).cross(&(*pt - a)).sign()
            },
            |i| f0.cross(&(self.vertices[i] - *pt)).sign(),
            |i| {
                let (a, b) = self.edge(i);
                let d = b - a;
                (*pt - a).dot(&d).sign() >= 0 && (b - *pt).dot(&d).sign() >= 0
            },
        )
    }

    /// Intersection with a convex polygon (`self` must be convex).
    pub fn clip_convex(&self, clip: &GoldenPolygon) -> Option<GoldenPolygon> {
        let mut pts = self.vertices.clone();
        let m = clip.vertices.len();
        for i in 0..m {
            let (a, b) = clip.edge(i);
            let d = b - a;
            pts = clip_halfplane(&pts, |p| d.cross(&(*p - a)));
            if pts.is_empty() {
                return None;
            }
        }
        dedup_ring(&mut pts);
        if pts.len() < 3 {
            return None;
        }
        let poly = GoldenPolygon { vertices: pts };
        if poly.area().sign() > 0 {
            Some(poly)
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> Vec<[f64; 2]> {
        self.vertices.iter().map(|v| v.to_f64()).collect()
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(&self.vertices).expect("serializable")
    }
}

fn rotate_vec(v: &GoldenVector, d: i64) -> GoldenVector {
    GoldenVector::unit10(d).scale(v.x) + GoldenVector::unit10(d + 2).scale(v.y)
}

fn mirror_vec(v: &GoldenVector) -> GoldenVector {
    GoldenVector::unit(0).scale(v.x) + GoldenVector::unit(4).scale(v.y)
}

/// Sutherland–Hodgman step keeping `f(p) ≥ 0`.
pub(crate) fn clip_halfplane(pts: &[GoldenVector], f: impl Fn(&GoldenVector) -> GoldenNumber) -> Vec<GoldenVector> {
    let n = pts.len();
    let mut out = Vec::with_capacity(n + 2);
    for i in 0..n {
        let p = pts[i];
        let q = pts[(i + 1) % n];
        let (fp, fq) = (f(&p), f(&q));
        if fp.sign() >= 0 {
            out.push(p);
        }
        if (fp.sign() > 0 && fq.sign() < 0) || (fp.sign() < 0 && fq.sign() > 0) {
            let t = fp / (fp - fq);
            out.push(p + (q - p).scale(t));
        }
    }
    out
}

fn dedup_ring(pts: &mut Vec<GoldenVector>) {
    pts.dedup();
    while pts.len() > 1 && pts.first() == pts.last() {
        pts.pop();
    }
    // drop collinear middle points
    let mut i = 0;
    while pts.len() >= 3 && i < pts.len() {
        let n = pts.len();
        let (a, b, c) = (pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]);
        if (b - a).cross(&(c - b)).is_zero() {
            pts.remove(i);
        } else {
            i += 1;
        }
    }
}

/// Closed segments `ab` and `cd` share at least one point.
fn segments_touch(a: GoldenVector, b: GoldenVector, c: GoldenVector, d: GoldenVector) -> bool {
    let o1 = (b - a).cross(&(c - a)).sign();
    let o2 = (b - a).cross(&(d - a)).sign();
    let o3 = (d - c).cross(&(a - c)).sign();
    let o4 = (d - c).cross(&(b - c)).sign();
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    let on = |p: GoldenVector, q: GoldenVector, r: GoldenVector| {
        (q - p).cross(&(r - p)).is_zero() && (r - p).dot(&(q - p)).sign() >= 0 && (r - q).dot(&(p - q)).sign() >= 0
    };
    on(a, b, c) || on(a, b, d) || on(c, d, a) || on(c, d, b)
}

/// Shared point-in-polygon logic: explicit boundary detection, then sign tests
/// (convex) or an exact crossing count along `+f₀` (general).
fn locate_generic(
    n: usize,
    convex: bool,
    orient: impl Fn(usize) -> i8,
    height: impl Fn(usize) -> i8,
    within: impl Fn(usize) -> bool,
) -> Location {
    if convex {
        let mut touching = false;
        for i in 0..n {
            match orient(i) {
                s if s < 0 => return Location::Outside,
                0 => touching = true,
                _ => {}
            }
        }
        return if touching { Location::Boundary } else { Location::Inside };
    }
    let mut o = Vec::with_capacity(n);
    for i in 0..n {
        let s = orient(i);
        if s == 0 && within(i) {
            return Location::Boundary;
        }
        o.push(s);
    }
    let h: Vec<bool> = (0..n).map(|i| height(i) > 0).collect();
    let mut inside = false;
    for i in 0..n {
        let (up, next) = (h[i], h[(i + 1) % n]);
        if up != next {
            let upward = next;
            if (upward && o[i] > 0) || (!upward && o[i] < 0) {
                inside = !inside;
            }
        }
    }
    if inside {
        Location::Inside
    } else {
        Location::Outside
    }
}

/// One window of a family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AcceptanceDomain {
    pub family: Family,
    pub level: u8,
    pub shape: Option<GoldenPolygon>,
}

impl AcceptanceDomain {
    pub fn area(&self) -> GoldenNumber {
        self.shape.as_ref().map_or(GoldenNumber::zero(), |p| p.area())
    }
}

fn g(a: i64, b: i64) -> GoldenNumber {
    GoldenNumber::from_ints(a, b)
}

/// Unit pentagon with vertices at the perpendicular star vectors.
pub fn unit_pentagon() -> GoldenPolygon {
    GoldenPolygon::regular(5, g(1, 0), 0, 2)
}

/// Regular decagon of circumradius `2·sin 36°` with vertices at
/// 18° + 36°·k, written exactly as `unit10(k+2) − unit10(k+4)`.
pub fn decagon() -> GoldenPolygon {
    let v = (0..10).map(|k| GoldenVector::unit10(k + 2) - GoldenVector::unit10(k + 4)).collect();
    GoldenPolygon::new(v).expect("decagon")
}

/// Outer corners of the trapezoid standing on the pentagon edge `[fₘ, fₘ₊₁]`:
/// `(2fₘ + fₘ₊₁)/τ` and `(fₘ + 2fₘ₊₁)/τ`.
///
/// Recovered from generated patches (see [`derive_trapezoid`]); the windmill
/// window is the unit pentagon with these five trapezoids attached.
pub fn trapezoid(m: i64) -> GoldenPolygon {
    let inv = g(-1, 1);
    let (a, b) = (GoldenVector::unit(m), GoldenVector::unit(m + 1));
    let p = (a * 2 + b).scale(inv);
    let q = (a + b * 2).scale(inv);
    GoldenPolygon::new(vec![a, p, q, b]).expect("trapezoid")
}

/// The windmill window: pentagon plus five trapezoids, 15 vertices with
/// reflex corners at the pentagon vertices.
pub fn windmill() -> GoldenPolygon {
    let mut v = Vec::with_capacity(15);
    for m in 0..5 {
        let t = trapezoid(m);
        v.extend_from_slice(&t.vertices()[..3]);
    }
    GoldenPolygon::new(v).expect("windmill")
}

/// P3 windows `V₀ … V₄`, indexed by level.
pub fn build_p3_windows() -> Vec<AcceptanceDomain> {
    let v1 = unit_pentagon();
    let shapes = [None, Some(v1.clone()), Some(v1.scale(g(0, -1))), Some(v1.scale(g(0, 1))), Some(v1.scale(g(-1, 0)))];
    shapes
        .into_iter()
        .enumerate()
        .map(|(p, shape)| AcceptanceDomain { family: Family::P3, level: p as u8, shape })
        .collect()
}

/// P4 windows `W₀ … W₄`, indexed by level. Fails if the windmill violates
/// any of its defining constraints.
pub fn build_p4_windows() -> Result<Vec<AcceptanceDomain>> {
    let w2 = unit_pentagon().scale(g(-1, 1));
    let w1 = windmill();
    validate_windmill(&w1)?;
    let shapes = [Some(decagon()), Some(w1.clone()), Some(w2.clone()), Some(w2.scale(g(-1, 0))), Some(w1.scale(g(-1, 0)))];
    let out: Vec<_> = shapes
        .into_iter()
        .enumerate()
        .map(|(p, shape)| AcceptanceDomain { family: Family::P4, level: p as u8, shape })
        .collect();
    let total: GoldenNumber = out.iter().map(|d| d.area()).fold(GoldenNumber::zero(), |a, b| a + b);
    if total != total_window_area() {
        return Err(Error::Consistency(format!("P4 window area {total} differs from {}", total_window_area())));
    }
    Ok(out)
}

/// `5·sin 72°·(1 + τ²)` in units of sin 36°, i.e. `5 + 15τ`.
pub fn total_window_area() -> GoldenNumber {
    g(5, 15)
}

fn validate_windmill(w1: &GoldenPolygon) -> Result<()> {
    let reflex: Vec<GoldenVector> = w1.reflex_corners().into_iter().map(|i| w1.vertices()[i]).collect();
    let want: Vec<GoldenVector> = (0..5).map(GoldenVector::unit).collect();
    if reflex.len() != 5 || !want.iter().all(|v| reflex.contains(v)) {
        return Err(Error::Consistency("windmill reflex corners are not the perpendicular star".into()));
    }
    if !w1.rotate(2).same_shape(w1) {
        return Err(Error::Consistency("windmill lacks five-fold symmetry".into()));
    }
    // W₁ and W₄ make up whatever the decagon and the two small pentagons leave
    let rest = total_window_area() - decagon().area() - unit_pentagon().scale(g(-1, 1)).area() * 2;
    if w1.area() * 2 != rest {
        return Err(Error::Consistency(format!("windmill area {} should be {}", w1.area(), rest / 2)));
    }
    Ok(())
}

/// All windows of a family, indexed by level.
pub fn windows(family: Family) -> Vec<Option<GoldenPolygon>> {
    let doms = match family {
        Family::P3 => build_p3_windows(),
        Family::P4 => build_p4_windows().expect("built-in windows are consistent"),
    };
    doms.into_iter().map(|d| d.shape).collect()
}

/// Exact classification of `pt − offset` against `dom`.
pub fn point_in_domain(pt: &PerpVector, dom: &AcceptanceDomain, offset: &PerpVector) -> Location {
    match &dom.shape {
        None => Location::Outside,
        Some(p) => p.locate(&(*pt - *offset)),
    }
}

/// A labelled dissection of one window.
#[derive(Clone, Debug)]
pub struct SubDomainMap<L> {
    pub parent: AcceptanceDomain,
    pub regions: Vec<(L, GoldenPolygon)>,
}

impl<L: Copy> SubDomainMap<L> {
    /// Sum of region areas equals the parent area exactly.
    pub fn is_partition(&self) -> bool {
        let s = self.regions.iter().map(|(_, p)| p.area()).fold(GoldenNumber::zero(), |a, b| a + b);
        s == self.parent.area()
    }
}

/// Label of the region containing `pt − offset`. Points outside every region
/// and boundary hits are errors.
pub fn subdomain_lookup<L: Copy + std::fmt::Debug>(
    pt: &PerpVector,
    map: &SubDomainMap<L>,
    offset: &PerpVector,
) -> Result<L> {
    let x = *pt - *offset;
    for (label, poly) in &map.regions {
        match poly.locate(&x) {
            Location::Inside => return Ok(*label),
            Location::Boundary => return Err(Error::OnBoundary(format!("{x:?} on the edge of {label:?}"))),
            Location::Outside => {}
        }
    }
    Err(Error::OnBoundary(format!("{x:?} outside every region of level {}", map.parent.level)))
}

/// Blue pentagon `B₁ = −V₂/τ`.
pub fn b1() -> GoldenPolygon {
    build_p3_windows()[2].shape.as_ref().unwrap().scale(g(1, -1))
}

/// Colour dissection of the P4 window at `level`; level 0 has none.
pub fn color_map(level: u8) -> Option<SubDomainMap<ColorRegion>> {
    let doms = build_p4_windows().expect("built-in windows");
    let parent = doms[level as usize].clone();
    let regions = match level {
        1 => {
            let mut r = vec![(ColorRegion::B1, b1())];
            r.extend((0..5).map(|m| (ColorRegion::Y1, trapezoid(m))));
            r
        }
        4 => {
            let mut r = vec![(ColorRegion::B4, b1().scale(g(-1, 0)))];
            r.extend((0..5).map(|m| (ColorRegion::Y4, trapezoid(m).scale(g(-1, 0)))));
            r
        }
        2 => vec![(ColorRegion::O2, parent.shape.clone().unwrap())],
        3 => vec![(ColorRegion::O3, parent.shape.clone().unwrap())],
        _ => return None,
    };
    Some(SubDomainMap { parent, regions })
}

/// Inner pentagons `P₁ = V₄/τ²` and `P₄ = V₁/τ²` (level 1 and 4).
pub fn small_pentagon(level: u8) -> GoldenPolygon {
    let p3 = build_p3_windows();
    match level {
        1 => p3[4].shape.as_ref().unwrap().scale(GoldenNumber::tau_pow(-2)),
        4 => p3[1].shape.as_ref().unwrap().scale(GoldenNumber::tau_pow(-2)),
        _ => panic!("inner pentagons exist at levels 1 and 4 only"),
    }
}

/// Windows of the τ-scaled P3 tiling, expressed at the P4 lattice levels:
/// `(B₁, W₂, W₃, B₄)` with nothing at level 0.
pub fn p3_tau_windows() -> Vec<Option<GoldenPolygon>> {
    let w = windows(Family::P4);
    vec![None, Some(b1()), w[2].clone(), w[3].clone(), Some(b1().scale(g(-1, 0)))]
}

/// Windows of the τ²-scaled P3 tiling at the P4 lattice levels:
/// `(P₁, W₂, W₃, P₄)`.
pub fn p3_tau2_windows() -> Vec<Option<GoldenPolygon>> {
    let w = windows(Family::P4);
    vec![None, Some(small_pentagon(1)), w[2].clone(), w[3].clone(), Some(small_pentagon(4))]
}

/// JSON description of a family's windows and (for P4) colour regions.
pub fn windows_json(family: Family) -> Value {
    let doms = match family {
        Family::P3 => build_p3_windows(),
        Family::P4 => build_p4_windows().expect("built-in windows"),
    };
    let levels: Vec<Value> = doms
        .iter()
        .map(|d| {
            let mut v = json!({
                "level": d.level,
                "area_sin36": d.area(),
                "vertices": d.shape.as_ref().map(|p| p.to_json()),
            });
            if family == Family::P4 {
                if let Some(map) = color_map(d.level) {
                    let regions: Vec<Value> = map
                        .regions
                        .iter()
                        .map(|(l, p)| json!({"label": format!("{l:?}"), "vertices": p.to_json()}))
                        .collect();
                    v["color_regions"] = Value::Array(regions);
                }
            }
            v
        })
        .collect();
    json!({
        "family": family,
        "basis": "coordinates (x, y) over f0 = (1, 0), f1 = (cos 72°, sin 72°); each number is [a, b] for a + b·tau",
        "levels": levels,
    })
}

/// Precompiled affine form `Σ nⱼ cⱼ + k` over Z[τ], scaled by a positive
/// integer so that all coefficients are integral.
#[derive(Clone, Copy, Debug)]
struct Affine {
    c: [GoldenInt; 5],
    k: GoldenInt,
}

impl Affine {
    /// `value(x) = lin(x) + k` where `lin(x) = dot-like functional` given by its
    /// values on the perpendicular star vectors.
    fn new(on_units: [GoldenNumber; 5], k: GoldenNumber) -> Affine {
        let mut den = denominator(&k);
        for c in &on_units {
            den = num_integer::lcm(den, denominator(c));
        }
        Affine { c: on_units.map(|c| GoldenInt::from_scaled(c, den)), k: GoldenInt::from_scaled(k, den) }
    }

    #[inline]
    fn sign(&self, n: &[i32; 5]) -> i8 {
        let mut a = self.k.a;
        let mut b = self.k.b;
        for j in 0..5 {
            let m = n[j] as i64;
            a += m * self.c[j].a;
            b += m * self.c[j].b;
        }
        GoldenInt::new(a, b).sign()
    }
}

#[derive(Clone, Debug)]
struct CompiledEdge {
    orient: Affine,
    height: Affine,
    lo: Affine,
    hi: Affine,
}

/// A window polygon (already scaled and offset) compiled to integer
/// functionals of the lattice coordinates.
#[derive(Clone, Debug)]
pub struct CompiledPolygon {
    convex: bool,
    edges: Vec<CompiledEdge>,
}

impl CompiledPolygon {
    /// Membership test for `perp(n) ∈ poly`.
    pub fn new(poly: &GoldenPolygon) -> CompiledPolygon {
        let units: [GoldenVector; 5] = std::array::from_fn(|j| {
            let (x, y) = perp_unit_int(j);
            GoldenVector::new(GoldenNumber::from_ints(x.a, x.b), GoldenNumber::from_ints(y.a, y.b))
        });
        let f0 = GoldenVector::unit(0);
        let n = poly.len();
        let vs = poly.vertices();
        let edges = (0..n)
            .map(|i| {
                let (a, b) = (vs[i], vs[(i + 1) % n]);
                let d = b - a;
                CompiledEdge {
                    orient: Affine::new(units.map(|u| d.cross(&u)), -d.cross(&a)),
                    height: Affine::new(units.map(|u| -f0.cross(&u)), f0.cross(&a)),
                    lo: Affine::new(units.map(|u| u.dot(&d)), -a.dot(&d)),
                    hi: Affine::new(units.map(|u| -u.dot(&d)), b.dot(&d)),
                }
            })
            .collect();
        CompiledPolygon { convex: poly.is_convex(), edges }
    }

    #[inline]
    pub fn locate(&self, n: &IndexVector) -> Location {
        let v = &n.0;
        locate_generic(
            self.edges.len(),
            self.convex,
            |i| self.edges[i].orient.sign(v),
            |i| self.edges[i].height.sign(v),
            |i| self.edges[i].lo.sign(v) >= 0 && self.edges[i].hi.sign(v) >= 0,
        )
    }
}

/// The five level windows of one tiling, scaled and shifted into the lattice
/// frame and compiled for fast exact tests.
#[derive(Clone, Debug)]
pub struct CompiledWindows {
    levels: Vec<Option<CompiledPolygon>>,
}

impl CompiledWindows {
    /// Windows given per lattice level, already in the lattice frame; a point
    /// `n` is accepted iff `perp(n) − offset ∈ windows[level(n)]`.
    pub fn from_lattice(windows: &[Option<GoldenPolygon>], offset: &PerpVector) -> CompiledWindows {
        let levels = windows.iter().map(|w| w.as_ref().map(|p| CompiledPolygon::new(&p.translate(*offset)))).collect();
        CompiledWindows { levels }
    }

    /// Windows of the edge-length-`τˢ` member: the unit-frame window of level
    /// `q` becomes `(−1/τ)ˢ·W_q` at lattice level `(−2)ˢ q`.
    pub fn scaled(unit_windows: &[Option<GoldenPolygon>], scale_exp: u32, offset: &PerpVector) -> CompiledWindows {
        CompiledWindows::from_lattice(&lattice_windows(unit_windows, scale_exp), offset)
    }

    #[inline]
    pub fn locate(&self, n: &IndexVector) -> Location {
        match &self.levels[n.level() as usize] {
            None => Location::Outside,
            Some(p) => p.locate(n),
        }
    }

    /// `Ok(true)` if accepted, a singular-offset error on boundary hits.
    #[inline]
    pub fn accepts(&self, n: &IndexVector) -> Result<bool> {
        match self.locate(n) {
            Location::Inside => Ok(true),
            Location::Outside => Ok(false),
            Location::Boundary => Err(Error::SingularOffset { point: *n, level: n.level() }),
        }
    }
}

/// Rescales unit-frame windows to the lattice frame of scale `τˢ`.
pub fn lattice_windows(unit_windows: &[Option<GoldenPolygon>], scale_exp: u32) -> Vec<Option<GoldenPolygon>> {
    let k = neg_tau_pow_perp(scale_exp);
    (0..5u8)
        .map(|p| unit_windows[unit_level(p, scale_exp) as usize].as_ref().map(|w| w.scale(k)))
        .collect()
}

/// Unit-frame perpendicular coordinate of a lattice point of a scale-`s`
/// tiling: `(−τ)ˢ·(perp(n) − offset)`.
pub fn unit_frame_perp(n: &IndexVector, scale_exp: u32, offset: &PerpVector) -> PerpVector {
    (n.perp() - *offset).scale(GoldenNumber::neg_tau_pow(scale_exp as i32))
}

/// The default generic offset `(1/7)·f₀ + (1/11)·f₁`.
pub fn default_offset() -> PerpVector {
    GoldenVector::new(GoldenNumber::from_fracs(1, 7, 0, 1), GoldenNumber::from_fracs(1, 11, 0, 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden::{canonicalize, SIN36, TAU};
    use proptest::prelude::*;

    #[test]
    fn p3_examples() {
        let w = build_p3_windows();
        assert!(w[0].shape.is_none());
        for j in 0..5 {
            assert!(w[1].shape.as_ref().unwrap().vertices().contains(&GoldenVector::unit(2 * j)));
        }
        assert_eq!(w[2].area(), w[1].area() * GoldenNumber::tau_pow(2));
        let total = w.iter().fold(GoldenNumber::zero(), |a, d| a + d.area());
        assert_eq!(total, total_window_area());
        let want = 5.0 * (72f64).to_radians().sin() * (1.0 + TAU * TAU);
        assert!((total.to_f64() * SIN36 - want).abs() < 1e-9);
        assert!((want - 17.204).abs() < 1e-3);
    }

    #[test]
    fn p4_examples() {
        let w = build_p4_windows().unwrap();
        let r0 = w[0].shape.as_ref().unwrap().vertices()[0].norm2().to_f64().sqrt();
        assert!((r0 - 2.0 * (36f64).to_radians().sin()).abs() < 1e-12);
        assert!((r0 - 1.17557).abs() < 1e-5);
        let r2 = w[2].shape.as_ref().unwrap().vertices()[0].norm2().to_f64().sqrt();
        assert!((r2 - 0.61803).abs() < 1e-5);
        let p3 = build_p3_windows();
        let a4 = w.iter().fold(GoldenNumber::zero(), |a, d| a + d.area());
        let a3 = p3.iter().fold(GoldenNumber::zero(), |a, d| a + d.area());
        assert_eq!(a4, a3);
        assert_eq!(w[1].shape.as_ref().unwrap().len(), 15);
        assert!(!w[1].shape.as_ref().unwrap().is_convex());
    }

    #[test]
    fn membership_examples() {
        let w = build_p4_windows().unwrap();
        let z = GoldenVector::zero();
        assert_eq!(point_in_domain(&z, &w[0], &z), Location::Inside);
        for j in 0..5 {
            let e = GoldenVector::unit(2 * j);
            assert_eq!(point_in_domain(&e, &w[2], &z), Location::Outside);
            assert_eq!(point_in_domain(&e, &w[1], &z), Location::Boundary);
        }
        // just outside a reflex corner, along the outward radius: outside
        let e = GoldenVector::unit(0).scale(GoldenNumber::from_fracs(101, 100, 0, 1));
        assert_eq!(point_in_domain(&e, &w[1], &z), Location::Outside);
        let e = GoldenVector::unit(0).scale(GoldenNumber::from_fracs(99, 100, 0, 1));
        assert_eq!(point_in_domain(&e, &w[1], &z), Location::Inside);
    }

    #[test]
    fn trapezoid_geometry() {
        let t = trapezoid(0);
        assert!(t.is_convex());
        // outer edge at distance 3/2 from the centre
        let bis = (GoldenVector::unit(0) + GoldenVector::unit(1)).to_f64();
        let l = (bis[0] * bis[0] + bis[1] * bis[1]).sqrt();
        let p = t.vertices()[1].to_f64();
        assert!(((p[0] * bis[0] + p[1] * bis[1]) / l - 1.5).abs() < 1e-12);
        assert!(t.mirror().rotate(2).same_shape(&t));
        let y1: GoldenNumber = (0..5).map(|m| trapezoid(m).area()).fold(GoldenNumber::zero(), |a, b| a + b);
        assert_eq!(y1 + b1().area(), windmill().area());
    }

    #[test]
    fn color_identities() {
        let p3 = build_p3_windows();
        let p4 = build_p4_windows().unwrap();
        let v = |p: usize| p3[p].shape.clone().unwrap();
        let w = |p: usize| p4[p].shape.clone().unwrap();
        let inv = GoldenNumber::tau_pow(-1);
        assert!(b1().same_shape(&unit_pentagon()));
        assert!(v(2).scale(-inv).same_shape(&b1()));
        assert!(v(3).scale(-inv).same_shape(&b1().scale(g(-1, 0))));
        assert!(small_pentagon(1).same_shape(&v(4).scale(GoldenNumber::tau_pow(-2))));
        // −O₂/τ = P₁ ⊂ B₁, −B₁/τ = O₃, −W₀/τ ⊂ W₀
        assert!(w(2).scale(-inv).same_shape(&small_pentagon(1)));
        for p in small_pentagon(1).vertices() {
            assert_eq!(b1().locate(p), Location::Inside);
        }
        assert!(b1().scale(-inv).same_shape(&w(3)));
        for p in w(0).scale(-inv).vertices() {
            assert_eq!(w(0).locate(p), Location::Inside);
        }
        // −Y₁/τ misses O₃
        for m in 0..5 {
            assert!(trapezoid(m).scale(-inv).clip_convex(&w(3)).is_none());
        }
        // τ² frequency source: W₂ + W₃ = τ² × (V₁ ∪ V₄ sections of S₁ = V₁/τ² + V₄/τ²)
        let s1 = small_pentagon(1).area() + small_pentagon(4).area();
        assert_eq!(w(2).area() + w(3).area(), s1 * GoldenNumber::tau_pow(2));
        for l in 1..5 {
            assert!(color_map(l).unwrap().is_partition(), "level {l}");
        }
    }

    #[test]
    fn lookup_examples() {
        let z = GoldenVector::zero();
        let m2 = color_map(2).unwrap();
        assert_eq!(subdomain_lookup(&z, &m2, &z).unwrap(), ColorRegion::O2);
        let m1 = color_map(1).unwrap();
        assert_eq!(subdomain_lookup(&z, &m1, &z).unwrap(), ColorRegion::B1);
        let out = GoldenVector::unit(0) + GoldenVector::unit(1);
        assert_eq!(subdomain_lookup(&out.scale(g(-1, 1)), &m1, &z).unwrap(), ColorRegion::Y1);
        assert!(color_map(0).is_none());
        assert!(matches!(subdomain_lookup(&GoldenVector::unit(0), &m1, &z), Err(Error::OnBoundary(_))));
    }

    #[test]
    fn invalid_polygons_rejected() {
        let u = GoldenVector::unit;
        assert!(GoldenPolygon::new(vec![u(0), u(1)]).is_err());
        assert!(GoldenPolygon::new(vec![u(0), u(4), u(3), u(2), u(1)]).is_err());
        // bow tie
        let bow = vec![u(0), u(2), u(1), u(3)];
        assert!(GoldenPolygon::new(bow).is_err());
    }

    fn lattice_point() -> impl Strategy<Value = IndexVector> {
        proptest::array::uniform5(-4i64..5).prop_map(canonicalize)
    }

    proptest! {
        #[test]
        fn compiled_matches_exact(n in lattice_point(), s in 0u32..3) {
            let off = default_offset();
            for fam in [Family::P3, Family::P4] {
                let unit = windows(fam);
                let lat = lattice_windows(&unit, s);
                let cw = CompiledWindows::from_lattice(&lat, &off);
                let exact = match &lat[n.level() as usize] {
                    None => Location::Outside,
                    Some(p) => p.locate(&(n.perp() - off)),
                };
                prop_assert_eq!(cw.locate(&n), exact);
            }
        }

        #[test]
        fn rotation_invariance(n in lattice_point(), d in 0i64..10) {
            // shifting indices by one rotates perpendicular space by 144°
            let r = IndexVector(std::array::from_fn(|j| n.0[(j + 4) % 5]));
            prop_assert_eq!(r.perp(), rotate_vec(&n.perp(), 4));
            for fam in [Family::P3, Family::P4] {
                if let Some(poly) = &windows(fam)[n.level() as usize] {
                    prop_assert_eq!(poly.locate(&n.perp()), poly.locate(&r.perp()));
                    let x = n.perp() - default_offset();
                    prop_assert_eq!(poly.locate(&x), poly.rotate(d).locate(&rotate_vec(&x, d)));
                }
            }
        }
    }
}
