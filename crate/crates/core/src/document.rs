//! JSON interchange format for patches and their derived layers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::grids::{AmmannGrid, DualGrid};
use crate::tiling::{Annotations, Face, Tiling};
use crate::{Environment, Error, Family, GoldenNumber, GoldenVector, IndexVector, PerpVector, PrototileType, Result, VertexColor};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, String>,
    #[serde(default)]
    pub seed: Option<u64>,
    pub tool_version: String,
}

impl Provenance {
    pub fn new(generator: &str) -> Provenance {
        Provenance {
            generator: generator.to_string(),
            parameters: BTreeMap::new(),
            seed: None,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Provenance {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }
}

/// Per-vertex and per-face labels, aligned with `vertices` and `faces`;
/// `None` where an element is too close to the boundary to classify.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AnnotationLayer {
    pub environment: Vec<Option<Environment>>,
    pub color: Vec<Option<VertexColor>>,
    pub prototype: Vec<Option<PrototileType>>,
}

/// A line `{x : x·u = offset}` with `u` the unit vector at 72°·family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridLine {
    pub family: u8,
    pub offset: GoldenNumber,
    /// Active stretches as end point pairs; empty for Ammann lines.
    #[serde(default)]
    pub active: Vec<[GoldenVector; 2]>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GridLayer {
    pub dual: Vec<GridLine>,
    pub ammann: Vec<GridLine>,
    pub folded: Vec<Vec<GoldenVector>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TilingDocument {
    pub schema_version: u32,
    pub family: Family,
    pub scale_exp: u32,
    pub offset: PerpVector,
    pub center: [f64; 2],
    pub radius: f64,
    pub vertices: Vec<IndexVector>,
    /// `[anchor vertex index, j, k]`.
    pub faces: Vec<[u32; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotations: Option<AnnotationLayer>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridLayer>,
    pub provenance: Provenance,
}

#[derive(Deserialize)]
struct Header {
    schema_version: Option<u32>,
}

impl TilingDocument {
    pub fn from_tiling(t: &Tiling, provenance: Provenance) -> TilingDocument {
        let faces = t
            .faces
            .iter()
            .map(|f| {
                let i = t.vertices.binary_search(&f.anchor).expect("face anchors are tiling vertices");
                [i as u32, f.j as u32, f.k as u32]
            })
            .collect();
        TilingDocument {
            schema_version: SCHEMA_VERSION,
            family: t.family,
            scale_exp: t.scale_exp,
            offset: t.offset,
            center: t.center,
            radius: t.radius,
            vertices: t.vertices.clone(),
            faces,
            annotations: None,
            grid: None,
            provenance,
        }
    }

    pub fn face(&self, f: &[u32; 3]) -> Face {
        Face::new(self.vertices[f[0] as usize], f[1] as u8, f[2] as u8)
    }

    /// The patch, after checking the document's internal invariants.
    pub fn to_tiling(&self) -> Result<Tiling> {
        self.validate()?;
        Ok(self.tiling_unchecked())
    }

    fn tiling_unchecked(&self) -> Tiling {
        Tiling {
            family: self.family,
            scale_exp: self.scale_exp,
            offset: self.offset,
            center: self.center,
            radius: self.radius,
            vertices: self.vertices.clone(),
            faces: self.faces.iter().map(|f| self.face(f)).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Document(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("unsupported schema_version {}", self.schema_version));
        }
        if !(self.radius >= 0.0) || !self.center.iter().all(|c| c.is_finite()) {
            return bad("radius and center must be finite".into());
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if crate::canonicalize(v.raw()) != *v {
                return bad(format!("vertex {i} {v:?} is not canonical"));
            }
            if i > 0 && self.vertices[i - 1] >= *v {
                return bad(format!("vertices not strictly sorted at {i}"));
            }
        }
        for (i, f) in self.faces.iter().enumerate() {
            if f[0] as usize >= self.vertices.len() || f[1] >= f[2] || f[2] >= 5 {
                return bad(format!("face {i} {f:?} is malformed"));
            }
        }
        let t = self.tiling_unchecked();
        let rebuilt = Tiling::from_faces(t.family, t.scale_exp, t.offset, t.center, t.radius, t.faces.clone());
        if rebuilt.faces != t.faces {
            return bad("faces not strictly sorted".into());
        }
        if rebuilt.vertices != t.vertices {
            return bad("vertices are not exactly the face corners".into());
        }
        if let Some(a) = &self.annotations {
            if a.environment.len() != self.vertices.len()
                || a.color.len() != self.vertices.len()
                || a.prototype.len() != self.faces.len()
            {
                return bad("annotation layer does not match the element counts".into());
            }
        }
        if let Some(g) = &self.grid {
            if g.dual.iter().chain(&g.ammann).any(|l| l.family >= 5) {
                return bad("grid line family out of range".into());
            }
        }
        Ok(())
    }

    pub fn set_annotations(&mut self, a: &Annotations) {
        let faces: Vec<Face> = self.faces.iter().map(|f| self.face(f)).collect();
        self.annotations = Some(AnnotationLayer {
            environment: self.vertices.iter().map(|v| a.environments.get(v).copied()).collect(),
            color: self.vertices.iter().map(|v| a.colors.get(v).copied()).collect(),
            prototype: faces.iter().map(|f| a.prototiles.get(f).copied()).collect(),
        });
    }

    pub fn annotations(&self) -> Option<Annotations> {
        let l = self.annotations.as_ref()?;
        let mut a = Annotations::default();
        for (i, v) in self.vertices.iter().enumerate() {
            if let Some(e) = l.environment[i] {
                a.environments.insert(*v, e);
            }
            if let Some(c) = l.color[i] {
                a.colors.insert(*v, c);
            }
        }
        for (i, f) in self.faces.iter().enumerate() {
            if let Some(p) = l.prototype[i] {
                a.prototiles.insert(self.face(f), p);
            }
        }
        Some(a)
    }

    pub fn set_grid(&mut self, dual: &DualGrid, ammann: Option<&AmmannGrid>) {
        let mut layer = GridLayer::default();
        for (j, fam) in dual.families.iter().enumerate() {
            for (i, c) in fam.offsets.iter().enumerate() {
                let active = dual.active[j].iter().filter(|s| s.line == i).map(|s| [s.from, s.to]).collect();
                layer.dual.push(GridLine { family: fam.direction, offset: *c, active });
            }
        }
        if let Some(a) = ammann {
            for fam in &a.families {
                for c in &fam.offsets {
                    layer.ammann.push(GridLine { family: fam.direction, offset: *c, active: vec![] });
                }
            }
        }
        layer.folded = dual.folded.clone();
        self.grid = Some(layer);
    }

    /// Canonical bytes: sorted keys, rationals as `"num/den"`, no whitespace.
    pub fn encode(&self) -> Vec<u8> {
        let v = serde_json::to_value(self).expect("documents serialize");
        let mut out = serde_json::to_vec(&v).expect("values serialize");
        out.push(b'\n');
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<TilingDocument> {
        let at = |e: serde_json::Error| Error::Document(format!("line {} column {}: {e}", e.line(), e.column()));
        let h: Header = serde_json::from_slice(bytes).map_err(at)?;
        match h.schema_version {
            Some(SCHEMA_VERSION) => {}
            Some(v) => return Err(Error::Document(format!("unsupported schema_version {v}, expected {SCHEMA_VERSION}"))),
            None => return Err(Error::Document("missing schema_version".into())),
        }
        let d: TilingDocument = serde_json::from_slice(bytes).map_err(at)?;
        d.validate()?;
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling::{generate, Classifier};
    use crate::windows::default_offset;

    fn doc(r: f64) -> TilingDocument {
        let t = generate(Family::P4, r, 0, default_offset(), [0.0, 0.0]).unwrap();
        TilingDocument::from_tiling(&t, Provenance::new("test").with("radius", r))
    }

    #[test]
    fn empty_tiling_round_trips() {
        let t = Tiling::empty(Family::P3, 0, default_offset());
        let d = TilingDocument::from_tiling(&t, Provenance::new("empty"));
        let back = TilingDocument::decode(&d.encode()).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.to_tiling().unwrap().vertices.len(), 0);
    }

    #[test]
    fn annotated_patch_round_trips_exactly() {
        let mut d = doc(12.0);
        let t = d.to_tiling().unwrap();
        let a = Classifier::new(&t).unwrap().annotate().unwrap();
        d.set_annotations(&a);
        let bytes = d.encode();
        let back = TilingDocument::decode(&bytes).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.encode(), bytes);
        assert_eq!(back.annotations().unwrap(), a);
        let t2 = back.to_tiling().unwrap();
        assert_eq!((t2.vertices, t2.faces, t2.radius, t2.offset), (t.vertices, t.faces, t.radius, t.offset));
    }

    #[test]
    fn keys_are_sorted_and_rationals_are_strings() {
        let s = String::from_utf8(doc(4.0).encode()).unwrap();
        let keys: Vec<usize> = ["\"center\"", "\"faces\"", "\"family\"", "\"offset\"", "\"provenance\"", "\"schema_version\""]
            .iter()
            .map(|k| s.find(k).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert!(s.contains("\"offset\":{\"x\":[\""));
    }

    #[test]
    fn unknown_versions_are_rejected() {
        let s = String::from_utf8(doc(4.0).encode()).unwrap().replace("\"schema_version\":1", "\"schema_version\":7");
        let e = TilingDocument::decode(s.as_bytes()).unwrap_err();
        assert!(e.to_string().contains("schema_version 7"), "{e}");
    }

    #[test]
    fn parse_errors_carry_a_location() {
        let e = TilingDocument::decode(b"{\"schema_version\":1,\n \"family\": }").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
    }

    #[test]
    fn broken_invariants_are_rejected() {
        let mut d = doc(6.0);
        d.vertices.swap(0, 1);
        assert!(d.validate().is_err());
        let mut d = doc(6.0);
        d.faces.pop();
        assert!(d.validate().is_err(), "orphan corners");
        let mut d = doc(6.0);
        d.faces[0][2] = 9;
        assert!(d.validate().is_err());
    }
}
