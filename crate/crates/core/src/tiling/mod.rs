//! Rhombus tilings as sets of lattice vertices and faces, with vertex
//! environments, colours and prototile types.

mod classify;
mod generate;

pub use classify::{
    census, classify_prototile, classify_vertex, star_label, vertex_color, Annotations, Census, Classifier,
    VertexInfo, MARGIN,
};
pub use generate::{
    generate, generate_p3, generate_p4, generate_p4_local, generate_p4_windowed, generate_with_windows, p1_graph,
    p1_to_p4, p4_to_p1, P1Graph,
};
pub(crate) use generate::quad_faces;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::golden::{canonicalize, scaled_edge, GoldenNumber, GoldenVector, IndexVector, PerpVector, TAU};
use crate::labels::Family;

/// One rhombus: corners `anchor`, `anchor + Eⱼ`, `anchor + Eⱼ + Eₖ`,
/// `anchor + Eₖ` with `j < k`, where `Eⱼ` is the lattice image of the edge
/// vector `τˢ·eⱼ` of the tiling's scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Face {
    pub anchor: IndexVector,
    pub j: u8,
    pub k: u8,
}

/// Edge vectors of a given scale, in lattice coordinates.
#[derive(Clone, Debug)]
pub struct Edges {
    pub scale_exp: u32,
    pub e: [[i64; 5]; 5],
    by_key: FxHashMap<IndexVector, u8>,
}

impl Edges {
    pub fn new(scale_exp: u32) -> Edges {
        let e: [[i64; 5]; 5] = std::array::from_fn(|j| scaled_edge(j, scale_exp));
        let mut by_key = FxHashMap::default();
        for (j, v) in e.iter().enumerate() {
            by_key.insert(canonicalize(*v), 2 * j as u8);
            by_key.insert(canonicalize(v.map(|c| -c)), ((2 * j + 5) % 10) as u8);
        }
        Edges { scale_exp, e, by_key }
    }

    /// Lattice vector of the edge pointing at `36°·d`.
    pub fn vector(&self, d: u8) -> [i64; 5] {
        let (j, sign) = dir_to_edge(d);
        self.e[j].map(|c| c * sign)
    }

    /// Direction (in units of 36°) of `b − a` if it is an edge vector.
    pub fn dir(&self, a: &IndexVector, b: &IndexVector) -> Option<u8> {
        self.by_key.get(&canonicalize(b.diff(a))).copied()
    }

    pub fn step(&self, n: &IndexVector, d: u8) -> IndexVector {
        n.offset(&self.vector(d))
    }

    /// The ten vectors `±Eⱼ`.
    pub fn steps(&self) -> Vec<[i64; 5]> {
        (0..10).map(|d| self.vector(d)).collect()
    }

    pub fn length(&self) -> f64 {
        TAU.powi(self.scale_exp as i32)
    }
}

/// `d` in units of 36° ↦ (edge index, sign).
pub fn dir_to_edge(d: u8) -> (usize, i64) {
    let d = d % 10;
    if d.is_multiple_of(2) {
        (d as usize / 2, 1)
    } else {
        (((d + 5) % 10) as usize / 2, -1)
    }
}

impl Face {
    pub fn new(anchor: IndexVector, j: u8, k: u8) -> Face {
        assert!(j < k && k < 5, "face directions must satisfy j < k < 5");
        Face { anchor, j, k }
    }

    /// The face at corner `p` spanned by the edges pointing at `36°·a` and `36°·b`.
    pub fn at_corner(p: &IndexVector, a: u8, b: u8, edges: &Edges) -> Face {
        let (ja, sa) = dir_to_edge(a);
        let (jb, sb) = dir_to_edge(b);
        assert_ne!(ja, jb, "parallel edges do not span a face");
        let mut anchor = *p;
        if sa < 0 {
            anchor = anchor.offset(&edges.vector(a));
        }
        if sb < 0 {
            anchor = anchor.offset(&edges.vector(b));
        }
        Face::new(anchor, ja.min(jb) as u8, ja.max(jb) as u8)
    }

    pub fn is_thick(&self) -> bool {
        matches!(self.k - self.j, 1 | 4)
    }

    /// Corners in counter-clockwise order, starting at the anchor.
    pub fn corners(&self, edges: &Edges) -> [IndexVector; 4] {
        let a = self.anchor;
        let ej = edges.e[self.j as usize];
        let ek = edges.e[self.k as usize];
        let b = a.offset(&ej);
        let d = a.offset(&ek);
        let c = b.offset(&ek);
        if matches!(self.k - self.j, 1 | 2) {
            [a, b, c, d]
        } else {
            [a, d, c, b]
        }
    }

    pub fn center(&self, edges: &Edges) -> [f64; 2] {
        let a = self.anchor.phys();
        let t = edges.length();
        let b = crate::golden::Basis::get();
        let (j, k) = (self.j as usize, self.k as usize);
        [a[0] + 0.5 * t * (b.phys[j][0] + b.phys[k][0]), a[1] + 0.5 * t * (b.phys[j][1] + b.phys[k][1])]
    }

    /// Exact physical centre.
    pub fn center_exact(&self, edges: &Edges) -> GoldenVector {
        let a = self.anchor.phys_exact();
        let t = GoldenNumber::tau_pow(edges.scale_exp as i32) / 2;
        a + (GoldenVector::unit(self.j as i64) + GoldenVector::unit(self.k as i64)).scale(t)
    }

    /// Area `τ²ˢ·sin(angle)`.
    pub fn area(&self, edges: &Edges) -> f64 {
        let s = if self.is_thick() { (72f64).to_radians().sin() } else { (36f64).to_radians().sin() };
        s * edges.length().powi(2)
    }

    /// The face with the given four corners in cyclic order, if they form one.
    pub fn from_corners(c: &[IndexVector; 4], edges: &Edges) -> Option<Face> {
        for i in 0..4 {
            let a = edges.dir(&c[i], &c[(i + 1) % 4])?;
            let b = edges.dir(&c[i], &c[(i + 3) % 4])?;
            if a % 2 == 0 && b % 2 == 0 && a != b {
                let (j, k) = (a / 2, b / 2);
                return Some(Face::new(c[i], j.min(k), j.max(k)));
            }
        }
        None
    }

    /// Whether the corner at position `i` of [`Face::corners`] is acute.
    pub fn corner_is_acute(&self, i: usize) -> bool {
        // anchor and opposite corner carry the angle between Eⱼ and Eₖ
        i.is_multiple_of(2) == self.is_thick()
    }
}

/// A finite patch: the vertices and faces of one tiling inside a disc.
#[derive(Clone, Debug, PartialEq)]
pub struct Tiling {
    pub family: Family,
    pub scale_exp: u32,
    /// Offset of the windows in the lattice frame.
    pub offset: PerpVector,
    pub center: [f64; 2],
    /// The patch is complete (no missing faces) inside this radius.
    pub radius: f64,
    /// Sorted, unique.
    pub vertices: Vec<IndexVector>,
    /// Sorted, unique.
    pub faces: Vec<Face>,
}

impl Tiling {
    /// Builds a tiling from faces; vertices are their corners.
    pub fn from_faces(
        family: Family,
        scale_exp: u32,
        offset: PerpVector,
        center: [f64; 2],
        radius: f64,
        mut faces: Vec<Face>,
    ) -> Tiling {
        faces.sort_unstable();
        faces.dedup();
        let edges = Edges::new(scale_exp);
        let mut vertices: Vec<IndexVector> = faces.iter().flat_map(|f| f.corners(&edges)).collect();
        vertices.sort_unstable();
        vertices.dedup();
        Tiling { family, scale_exp, offset, center, radius, vertices, faces }
    }

    pub fn empty(family: Family, scale_exp: u32, offset: PerpVector) -> Tiling {
        Tiling { family, scale_exp, offset, center: [0.0, 0.0], radius: 0.0, vertices: vec![], faces: vec![] }
    }

    pub fn edges(&self) -> Edges {
        Edges::new(self.scale_exp)
    }

    pub fn edge_length(&self) -> f64 {
        TAU.powi(self.scale_exp as i32)
    }

    pub fn dist(&self, p: [f64; 2]) -> f64 {
        ((p[0] - self.center[0]).powi(2) + (p[1] - self.center[1]).powi(2)).sqrt()
    }

    /// Inside the disc shrunk by `margin` edge lengths.
    pub fn is_interior(&self, v: &IndexVector, margin: f64) -> bool {
        self.dist(v.phys()) <= self.radius - margin * self.edge_length()
    }

    pub fn face_is_interior(&self, f: &Face, margin: f64) -> bool {
        let e = self.edges();
        f.corners(&e).iter().all(|v| self.is_interior(v, margin))
    }

    /// Vertices within `radius − margin·τˢ` of the centre, sorted.
    pub fn interior_vertices(&self, margin: f64) -> Vec<IndexVector> {
        self.vertices.iter().copied().filter(|v| self.is_interior(v, margin)).collect()
    }

    /// Edges inside the disc shrunk by `margin` that do not have a face on
    /// both sides.
    pub fn open_edges(&self, margin: f64) -> Vec<(IndexVector, IndexVector)> {
        let e = self.edges();
        let mut count: FxHashMap<(IndexVector, IndexVector), u32> = FxHashMap::default();
        for f in &self.faces {
            let c = f.corners(&e);
            for i in 0..4 {
                let (a, b) = (c[i], c[(i + 1) % 4]);
                *count.entry(if a < b { (a, b) } else { (b, a) }).or_default() += 1;
            }
        }
        let mut out: Vec<_> = count
            .into_iter()
            .filter(|((a, b), n)| *n != 2 && self.is_interior(a, margin) && self.is_interior(b, margin))
            .map(|(k, _)| k)
            .collect();
        out.sort_unstable();
        out
    }

    pub fn thick_count(&self) -> usize {
        self.faces.iter().filter(|f| f.is_thick()).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn face_shapes_and_orientation() {
        let e = Edges::new(0);
        for j in 0..5u8 {
            for k in j + 1..5 {
                let f = Face::new(IndexVector::origin(), j, k);
                assert_eq!(f.is_thick(), matches!(k - j, 1 | 4));
                let c = f.corners(&e).map(|v| v.phys());
                let mut a = 0.0;
                for i in 0..4 {
                    a += c[i][0] * c[(i + 1) % 4][1] - c[(i + 1) % 4][0] * c[i][1];
                }
                assert!((a / 2.0 - f.area(&e)).abs() < 1e-12);
                let ctr = f.center(&e);
                let ex = f.center_exact(&e).to_f64();
                assert!((ctr[0] - ex[0]).abs() < 1e-12 && (ctr[1] - ex[1]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn directions_round_trip() {
        for s in 0..3 {
            let e = Edges::new(s);
            for d in 0..10u8 {
                let a = IndexVector([1, 0, 2, 0, 0]);
                let b = e.step(&a, d);
                assert_eq!(e.dir(&a, &b), Some(d));
                let p = (b.phys()[0] - a.phys()[0], b.phys()[1] - a.phys()[1]);
                let ang = (p.1.atan2(p.0).to_degrees() + 360.0) % 360.0;
                assert!((ang - 36.0 * d as f64).abs() < 1e-9 || (ang + 360.0 - 36.0 * d as f64).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn from_corners_inverts_corners() {
        for s in 0..3 {
            let e = Edges::new(s);
            for j in 0..5u8 {
                for k in j + 1..5 {
                    let f = Face::new(IndexVector([0, 1, 0, -1, 2]), j, k);
                    let mut c = f.corners(&e);
                    assert_eq!(Face::from_corners(&c, &e), Some(f));
                    c.rotate_left(1);
                    c.reverse();
                    assert_eq!(Face::from_corners(&c, &e), Some(f));
                }
            }
        }
    }

    #[test]
    fn at_corner_reconstructs_face() {
        let e = Edges::new(0);
        let f = Face::new(IndexVector([0, 1, 0, 0, 0]), 1, 2);
        let c = f.corners(&e);
        for i in 0..4 {
            let (p, n, q) = (c[i], c[(i + 1) % 4], c[(i + 3) % 4]);
            let g = Face::at_corner(&p, e.dir(&p, &n).unwrap(), e.dir(&p, &q).unwrap(), &e);
            assert_eq!(g, f);
        }
    }
}
