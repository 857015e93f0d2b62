//! Vertex stars, environments, colours and prototile types.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rustc_hash::FxHashMap;
use serde::Serialize;

use super::{Edges, Face, Tiling};
use crate::error::{Error, Result};
use crate::golden::{unit_level, GoldenNumber, IndexVector};
use crate::labels::{Environment, Family, PrototileType, VertexColor};
use crate::windows::{b1, unit_frame_perp, Location};

/// Classification keeps this many edge lengths away from the patch boundary,
/// so that second shells are complete.
pub const MARGIN: f64 = 2.0;

/// Star kinds before the S₁/S₂ split.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Star {
    Env(Environment),
    S,
}

/// Corner angle sequences (units of 36°) of every allowed star, before
/// canonicalisation.
const STARS: [(&[u8], Star); 9] = [
    (&[3, 3, 4], Star::Env(Environment::D)),
    (&[2, 4, 4], Star::Env(Environment::Q)),
    (&[2, 2, 2, 4], Star::Env(Environment::K)),
    (&[1, 2, 1, 3, 3], Star::Env(Environment::J)),
    (&[2, 2, 2, 2, 2], Star::S),
    (&[1, 1, 2, 2, 2, 2], Star::Env(Environment::T)),
    (&[1, 1, 2, 1, 1, 2, 2], Star::Env(Environment::V)),
    (&[1, 2, 1, 2, 1, 3], Star::Env(Environment::U)),
    (&[1, 1, 2, 1, 2, 1, 2], Star::Env(Environment::W)),
];

/// Minimum over rotations and reflections.
fn canonical(seq: &[u8]) -> Vec<u8> {
    let n = seq.len();
    let rev: Vec<u8> = seq.iter().rev().copied().collect();
    let mut best: Option<Vec<u8>> = None;
    for s in [seq, &rev[..]] {
        for r in 0..n {
            let c: Vec<u8> = s[r..].iter().chain(&s[..r]).copied().collect();
            if best.as_ref().is_none_or(|b| c < *b) {
                best = Some(c);
            }
        }
    }
    best.unwrap_or_default()
}

fn star_table() -> &'static FxHashMap<Vec<u8>, Star> {
    static T: OnceLock<FxHashMap<Vec<u8>, Star>> = OnceLock::new();
    T.get_or_init(|| STARS.iter().map(|(s, k)| (canonical(s), *k)).collect())
}

/// Environment of a canonical or raw corner sequence; `S` stars return `None`
/// because they need the second shell.
pub fn star_label(seq: &[u8]) -> Option<Environment> {
    match star_table().get(&canonical(seq)) {
        Some(Star::Env(e)) => Some(*e),
        _ => None,
    }
}

fn is_s_star(seq: &[u8]) -> bool {
    matches!(star_table().get(&canonical(seq)), Some(Star::S))
}

/// Classification result for one vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VertexInfo {
    pub environment: Environment,
    /// P4 only.
    pub color: Option<VertexColor>,
    pub coordination: usize,
}

#[derive(Clone, Copy, Debug)]
struct Corner {
    start: u8,
    span: u8,
    face: u32,
}

/// Adjacency and colour data for classifying the vertices and faces of one
/// tiling.
pub struct Classifier<'a> {
    t: &'a Tiling,
    edges: Edges,
    vid: FxHashMap<IndexVector, u32>,
    corners: Vec<Vec<Corner>>,
    colors: Vec<Option<VertexColor>>,
}

impl<'a> Classifier<'a> {
    pub fn new(t: &'a Tiling) -> Result<Classifier<'a>> {
        let edges = t.edges();
        let vid: FxHashMap<IndexVector, u32> = t.vertices.iter().enumerate().map(|(i, v)| (*v, i as u32)).collect();
        let mut corners = vec![Vec::new(); t.vertices.len()];
        for (fi, f) in t.faces.iter().enumerate() {
            let c = f.corners(&edges);
            for i in 0..4 {
                let p = c[i];
                let next = edges.dir(&p, &c[(i + 1) % 4]).expect("face edges");
                let prev = edges.dir(&p, &c[(i + 3) % 4]).expect("face edges");
                let span = (prev + 10 - next) % 10;
                corners[vid[&p] as usize].push(Corner { start: next, span, face: fi as u32 });
            }
        }
        for c in corners.iter_mut() {
            c.sort_by_key(|x| x.start);
        }
        let colors = match t.family {
            Family::P4 => t.vertices.iter().map(|v| vertex_color(t, v).map(Some)).collect::<Result<_>>()?,
            Family::P3 => vec![None; t.vertices.len()],
        };
        Ok(Classifier { t, edges, vid, corners, colors })
    }

    pub fn tiling(&self) -> &Tiling {
        self.t
    }

    fn id(&self, v: &IndexVector) -> Result<usize> {
        self.vid.get(v).map(|i| *i as usize).ok_or_else(|| Error::Unclassifiable(format!("{v:?} is not a vertex")))
    }

    /// Corner angles around `v` in counter-clockwise order, or `None` if the
    /// star is not closed.
    pub fn star(&self, v: &IndexVector) -> Option<Vec<u8>> {
        let cs = &self.corners[*self.vid.get(v)? as usize];
        let total: u32 = cs.iter().map(|c| c.span as u32).sum();
        if total != 10 {
            return None;
        }
        for w in 0..cs.len() {
            let (a, b) = (cs[w], cs[(w + 1) % cs.len()]);
            if (a.start + a.span) % 10 != b.start {
                return None;
            }
        }
        Some(cs.iter().map(|c| c.span).collect())
    }

    /// Lattice neighbours of `v` along the edges of its star.
    pub fn neighbours(&self, v: &IndexVector) -> Vec<IndexVector> {
        match self.vid.get(v) {
            None => vec![],
            Some(&i) => self.corners[i as usize].iter().map(|c| self.edges.step(v, c.start)).collect(),
        }
    }

    pub fn color(&self, v: &IndexVector) -> Option<VertexColor> {
        self.vid.get(v).and_then(|i| self.colors[*i as usize])
    }

    fn interior(&self, v: &IndexVector) -> bool {
        self.t.is_interior(v, MARGIN)
    }

    pub fn environment(&self, v: &IndexVector) -> Result<Environment> {
        let seq = self.star(v).ok_or(Error::StarIncomplete(*v))?;
        if let Some(e) = star_label(&seq) {
            return Ok(e);
        }
        if !is_s_star(&seq) {
            return Err(Error::Unclassifiable(format!("vertex {v:?} has unknown star {seq:?}")));
        }
        // second shell: the five neighbours are all D (S₁) or all J (S₂)
        let mut labels = Vec::with_capacity(5);
        for n in self.neighbours(v) {
            let s = self.star(&n).ok_or(Error::StarIncomplete(n))?;
            labels.push(star_label(&s));
        }
        if labels.iter().all(|l| *l == Some(Environment::D)) {
            Ok(Environment::S1)
        } else if labels.iter().all(|l| *l == Some(Environment::J)) {
            Ok(Environment::S2)
        } else {
            Err(Error::Unclassifiable(format!("S vertex {v:?} with mixed neighbours {labels:?}")))
        }
    }

    pub fn vertex(&self, v: &IndexVector) -> Result<VertexInfo> {
        if !self.interior(v) {
            return Err(Error::StarIncomplete(*v));
        }
        let i = self.id(v)?;
        Ok(VertexInfo { environment: self.environment(v)?, color: self.colors[i], coordination: self.corners[i].len() })
    }

    /// Thick and thin faces incident to `v`, as face indices.
    fn faces_at(&self, v: &IndexVector) -> Vec<u32> {
        self.vid.get(v).map(|i| self.corners[*i as usize].iter().map(|c| c.face).collect()).unwrap_or_default()
    }

    fn thick_type(&self, f: &Face) -> Result<PrototileType> {
        let c = f.corners(&self.edges);
        let col = |i: usize| self.color(&c[i]).ok_or_else(|| Error::Unclassifiable(format!("{f:?} lacks colours")));
        let (acute, obtuse) = ([col(0)?, col(2)?], [col(1)?, col(3)?]);
        use VertexColor::*;
        if acute == [Blue, Blue] {
            return Ok(PrototileType::C);
        }
        let mut o = obtuse;
        o.sort();
        match o {
            [Yellow, Yellow] if acute.contains(&Orange) => Ok(PrototileType::A),
            [Blue, Yellow] if acute.contains(&Orange) => Ok(PrototileType::B),
            _ => Err(Error::Unclassifiable(format!("thick face {f:?} with acute {acute:?} and obtuse {obtuse:?}"))),
        }
    }

    pub fn prototile(&self, f: &Face) -> Result<PrototileType> {
        if self.t.family != Family::P4 {
            return Err(Error::Unclassifiable("prototile types are defined for P4 only".into()));
        }
        if !self.t.face_is_interior(f, MARGIN) {
            return Err(Error::Unclassifiable(format!("face {f:?} is on the patch boundary")));
        }
        if f.is_thick() {
            return self.thick_type(f);
        }
        let c = f.corners(&self.edges);
        // obtuse corners of a thin face are at the anchor and opposite corner
        let (p, q) = (c[0], c[2]);
        let (cp, cq) = (self.color(&p), self.color(&q));
        let yellow = match (cp, cq) {
            (Some(VertexColor::Yellow), Some(VertexColor::Blue)) => p,
            (Some(VertexColor::Blue), Some(VertexColor::Yellow)) => q,
            _ => return Err(Error::Unclassifiable(format!("thin face {f:?} with obtuse colours {cp:?}, {cq:?}"))),
        };
        if self.star(&yellow).is_none() {
            return Err(Error::StarIncomplete(yellow));
        }
        let mut types = Vec::new();
        for fi in self.faces_at(&yellow) {
            let g = self.t.faces[fi as usize];
            if g.is_thick() {
                types.push(self.thick_type(&g)?);
            }
        }
        types.sort();
        use PrototileType::*;
        match types[..] {
            [A, A] => Ok(D),
            [A, B] => Ok(E),
            [B, B] => Ok(F),
            _ => Err(Error::Unclassifiable(format!("thin face {f:?} next to thick faces {types:?}"))),
        }
    }

    /// Labels for every interior vertex and face.
    pub fn annotate(&self) -> Result<Annotations> {
        let mut environments = BTreeMap::new();
        let mut colors = BTreeMap::new();
        for v in &self.t.vertices {
            if let Some(c) = self.color(v) {
                colors.insert(*v, c);
            }
            if self.interior(v) {
                environments.insert(*v, self.environment(v)?);
            }
        }
        let mut prototiles = BTreeMap::new();
        if self.t.family == Family::P4 {
            for f in &self.t.faces {
                if self.t.face_is_interior(f, MARGIN) {
                    prototiles.insert(*f, self.prototile(f)?);
                }
            }
        }
        Ok(Annotations { environments, colors, prototiles })
    }
}

/// Per-element labels; only interior elements carry environments and types.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Annotations {
    pub environments: BTreeMap<IndexVector, Environment>,
    pub colors: BTreeMap<IndexVector, VertexColor>,
    pub prototiles: BTreeMap<Face, PrototileType>,
}

/// Colour of a P4 vertex from its level and the blue pentagons.
pub fn vertex_color(t: &Tiling, v: &IndexVector) -> Result<VertexColor> {
    let q = unit_level(v.level(), t.scale_exp);
    let w = unit_frame_perp(v, t.scale_exp, &t.offset);
    let side = |poly: crate::windows::GoldenPolygon| match poly.locate(&w) {
        Location::Inside => Ok(VertexColor::Blue),
        Location::Outside => Ok(VertexColor::Yellow),
        Location::Boundary => Err(Error::SingularOffset { point: *v, level: v.level() }),
    };
    match q {
        0 => Ok(VertexColor::Uncolored),
        2 | 3 => Ok(VertexColor::Orange),
        1 => side(b1()),
        _ => side(b1().scale(GoldenNumber::from_ints(-1, 0))),
    }
}

pub fn classify_vertex(t: &Tiling, v: &IndexVector) -> Result<VertexInfo> {
    Classifier::new(t)?.vertex(v)
}

pub fn classify_prototile(t: &Tiling, f: &Face) -> Result<PrototileType> {
    Classifier::new(t)?.prototile(f)
}

/// Interior frequency table.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Census {
    pub vertices: usize,
    pub faces: usize,
    pub thick: usize,
    pub thin: usize,
    pub environments: BTreeMap<Environment, usize>,
    pub colors: BTreeMap<VertexColor, usize>,
    pub prototiles: BTreeMap<PrototileType, usize>,
}

impl Census {
    pub fn env(&self, e: Environment) -> usize {
        self.environments.get(&e).copied().unwrap_or(0)
    }

    pub fn proto(&self, p: PrototileType) -> usize {
        self.prototiles.get(&p).copied().unwrap_or(0)
    }

    pub fn color(&self, c: VertexColor) -> usize {
        self.colors.get(&c).copied().unwrap_or(0)
    }
}

/// Counts over the interior (boundary layer of [`MARGIN`] edges excluded).
pub fn census(t: &Tiling) -> Result<Census> {
    let c = Classifier::new(t)?;
    let a = c.annotate()?;
    let mut out = Census::default();
    for v in &t.vertices {
        if !t.is_interior(v, MARGIN) {
            continue;
        }
        out.vertices += 1;
        *out.environments.entry(a.environments[v]).or_default() += 1;
        if let Some(col) = a.colors.get(v) {
            *out.colors.entry(*col).or_default() += 1;
        }
    }
    for f in &t.faces {
        if !t.face_is_interior(f, MARGIN) {
            continue;
        }
        out.faces += 1;
        if f.is_thick() {
            out.thick += 1;
        } else {
            out.thin += 1;
        }
        if let Some(p) = a.prototiles.get(f) {
            *out.prototiles.entry(*p).or_default() += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_forms() {
        assert_eq!(canonical(&[4, 3, 3]), vec![3, 3, 4]);
        assert_eq!(canonical(&[3, 1, 2, 1, 3]), vec![1, 2, 1, 3, 3]);
        assert_eq!(star_label(&[2, 1, 1, 2, 2, 1, 1]), Some(Environment::V));
        assert_eq!(star_label(&[2, 2, 2, 2, 2]), None);
        assert!(is_s_star(&[2, 2, 2, 2, 2]));
        // all table entries are distinct after canonicalisation
        assert_eq!(star_table().len(), STARS.len());
    }
}
