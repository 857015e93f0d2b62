//! Substitution tables keyed by face type and corner decorations, derived by
//! comparing a coarse patch with its finer companion, and applied in both
//! directions (deflation and grouping).

use std::collections::BTreeMap;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::golden::{apply_scaling, canonicalize, GoldenNumber, IndexVector};
use crate::tiling::{Edges, Face, Tiling};

/// One of the 20 lattice symmetries `nⱼ ↦ ±n_σ(j)` with `σ(j) = ±j + shift`,
/// acting on the plane as the dihedral group of the decagon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym {
    pub negate: bool,
    pub mirror: bool,
    pub shift: u8,
}

impl Sym {
    pub fn all() -> impl Iterator<Item = Sym> {
        (0..20u8).map(|c| Sym { negate: c & 1 == 1, mirror: c & 2 == 2, shift: c / 4 })
    }

    pub fn apply(&self, n: &[i64; 5]) -> [i64; 5] {
        let mut out = [0i64; 5];
        for (j, v) in n.iter().enumerate() {
            let s = if self.mirror { (5 - j) % 5 } else { j };
            out[(s + self.shift as usize) % 5] = if self.negate { -v } else { *v };
        }
        out
    }

    pub fn inverse(&self) -> Sym {
        let probe = [1, 2, 4, 8, 16];
        Sym::all().find(|g| g.apply(&self.apply(&probe)) == probe).expect("group closed under inverses")
    }
}

/// A fine face of a rule, in the frame of the standard coarse face.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Child {
    pub anchor: [i32; 5],
    pub j: u8,
    pub k: u8,
    pub key: u8,
    /// Overlap area with the coarse face over the child's area.
    pub share: f64,
    /// `share` as an exact golden number.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub share_exact: Option<String>,
}

impl Child {
    fn face(&self) -> Face {
        Face::new(IndexVector(self.anchor), self.j, self.k)
    }

    fn order_key(&self) -> (Face, u8) {
        (self.face(), self.key)
    }
}

/// Replacement of one decorated coarse face.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub key: u8,
    pub thick: bool,
    /// Decorations at the corners of the standard face, in the order of
    /// [`Face::corners`].
    pub corners: [u8; 4],
    pub instances: usize,
    pub children: Vec<Child>,
}

/// A family of rules. The standard coarse face is `Face(0, 0, 1)` (thick) or
/// `Face(0, 0, 2)` (thin) at scale `fine_scale + step`; child anchors are
/// lattice points at scale `fine_scale` relative to its anchor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubstitutionTable {
    pub name: String,
    pub fine_scale: u32,
    /// Coarse edge length over fine edge length, as a power of τ.
    pub step: u32,
    pub key_names: Vec<String>,
    pub decoration_names: Vec<String>,
    pub rules: Vec<Rule>,
}

fn standard_face(thick: bool) -> Face {
    Face::new(IndexVector::origin(), 0, if thick { 1 } else { 2 })
}

fn sub(a: &[i64; 5], b: &[i64; 5]) -> [i64; 5] {
    std::array::from_fn(|i| a[i] - b[i])
}

fn add(a: &[i64; 5], b: &[i64; 5]) -> [i64; 5] {
    std::array::from_fn(|i| a[i] + b[i])
}

fn scale_up(v: &[i64; 5], times: u32) -> [i64; 5] {
    let mut v = *v;
    for _ in 0..times {
        v = apply_scaling(&v);
    }
    v
}

/// Placement of a coarse face relative to the standard face:
/// `y = g(x − anchor) − shift` maps the face onto the standard one.
#[derive(Clone, Copy, Debug)]
struct Frame {
    g: Sym,
    anchor: [i64; 5],
    shift: [i64; 5],
    /// Standard position of each corner of [`Face::corners`].
    pos: [usize; 4],
}

impl Frame {
    fn forward(&self, x: &IndexVector) -> IndexVector {
        canonicalize(sub(&self.g.apply(&sub(&x.raw(), &self.anchor)), &self.shift))
    }

    /// Inverse map of a standard-frame point given at `extra` scalings below
    /// the target scale.
    fn backward(&self, y: &IndexVector, extra: u32) -> IndexVector {
        let y = scale_up(&y.raw(), extra);
        canonicalize(add(&self.g.inverse().apply(&add(&y, &self.shift)), &self.anchor))
    }
}

/// The (up to four) frames that carry `f` onto the standard face.
fn frames(f: &Face, edges: &Edges) -> Vec<Frame> {
    let c = f.corners(edges);
    let a = f.anchor.raw();
    let std = standard_face(f.is_thick());
    let mut out = Vec::new();
    for g in Sym::all() {
        let rel: [IndexVector; 4] = std::array::from_fn(|i| canonicalize(g.apply(&sub(&c[i].raw(), &a))));
        let Some(h) = Face::from_corners(&rel, edges) else { continue };
        if (h.j, h.k) != (std.j, std.k) {
            continue;
        }
        let shift = h.anchor.raw();
        let sc = Face::new(IndexVector::origin(), h.j, h.k).corners(edges);
        let mut pos = [0usize; 4];
        for i in 0..4 {
            let y = canonicalize(sub(&rel[i].raw(), &shift));
            pos[i] = sc.iter().position(|s| *s == y).expect("corner of the standard face");
        }
        out.push(Frame { g, anchor: a, shift, pos });
    }
    out
}

fn polygon_area(p: &[[f64; 2]]) -> f64 {
    let n = p.len();
    (0..n).map(|i| p[i][0] * p[(i + 1) % n][1] - p[(i + 1) % n][0] * p[i][1]).sum::<f64>() / 2.0
}

/// Area of the intersection of two counter-clockwise convex polygons.
pub(crate) fn overlap_area(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    let mut poly = a.to_vec();
    for i in 0..b.len() {
        if poly.is_empty() {
            break;
        }
        let (p, q) = (b[i], b[(i + 1) % b.len()]);
        let side = |x: &[f64; 2]| (q[0] - p[0]) * (x[1] - p[1]) - (q[1] - p[1]) * (x[0] - p[0]);
        let mut out = Vec::with_capacity(poly.len() + 1);
        for m in 0..poly.len() {
            let (u, v) = (poly[m], poly[(m + 1) % poly.len()]);
            let (su, sv) = (side(&u), side(&v));
            if su >= 0.0 {
                out.push(u);
            }
            if (su >= 0.0) != (sv >= 0.0) {
                let t = su / (su - sv);
                out.push([u[0] + t * (v[0] - u[0]), u[1] + t * (v[1] - u[1])]);
            }
        }
        poly = out;
    }
    if poly.len() < 3 {
        0.0
    } else {
        polygon_area(&poly).max(0.0)
    }
}

/// Picks a non-overlapping subset of candidate coarse faces that covers the
/// fine tiling: a candidate is accepted once it is the only live one over
/// some fine face, and its overlapping rivals are dropped.
fn resolve(cands: Vec<(Face, u8)>, fine: &Tiling, ce: &Edges, required: f64) -> Result<Vec<(Face, u8)>> {
    let fe = fine.edges();
    let poly: Vec<[[f64; 2]; 4]> = cands.iter().map(|(f, _)| f.corners(ce).map(|v| v.phys())).collect();
    let cell = 2.0 * ce.length();
    let cell_of = |p: [f64; 2]| ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64);
    let mut grid: FxHashMap<(i64, i64), Vec<usize>> = FxHashMap::default();
    for (i, (f, _)) in cands.iter().enumerate() {
        grid.entry(cell_of(f.center(ce))).or_default().push(i);
    }
    let near = |p: [f64; 2]| {
        let (x, y) = cell_of(p);
        (x - 1..=x + 1).flat_map(move |a| (y - 1..=y + 1).map(move |b| (a, b)))
    };
    // generic interior point of every fine face and the candidates over it
    let mut points: Vec<([f64; 2], Vec<usize>)> = Vec::new();
    for f in &fine.faces {
        let c = f.corners(&fe).map(|v| v.phys());
        let w = [0.4, 0.3, 0.2, 0.1];
        let p = [0, 1].map(|k| (0..4).map(|i| w[i] * c[i][k]).sum::<f64>());
        let over: Vec<usize> = near(p)
            .flat_map(|k| grid.get(&k).into_iter().flatten().copied())
            .filter(|&i| strictly_inside(&poly[i], p))
            .collect();
        points.push((p, over));
    }
    let rivals = |i: usize| -> Vec<usize> {
        near(cands[i].0.center(ce))
            .flat_map(|k| grid.get(&k).into_iter().flatten().copied())
            .filter(|&j| j != i && overlap_area(&poly[i], &poly[j]) > 1e-9)
            .collect()
    };
    let mut state = vec![0u8; cands.len()]; // 0 live, 1 accepted, 2 dropped
    loop {
        let mut progress = false;
        for (_, over) in &points {
            if over.iter().any(|&i| state[i] == 1) {
                continue;
            }
            let live: Vec<usize> = over.iter().copied().filter(|&i| state[i] == 0).collect();
            if let [i] = live[..] {
                state[i] = 1;
                for j in rivals(i) {
                    if state[j] == 1 {
                        return Err(Error::Consistency(format!(
                            "grouping accepted overlapping faces {:?} and {:?}",
                            cands[i].0, cands[j].0
                        )));
                    }
                    state[j] = 2;
                }
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }
    for (p, over) in &points {
        if fine.dist(*p) < required && !over.iter().any(|&i| state[i] == 1) {
            let live = over.iter().filter(|&&i| state[i] == 0).count();
            return Err(Error::Consistency(format!(
                "grouping left the fine face at ({:.3}, {:.3}) with {live} undecided candidates",
                p[0], p[1]
            )));
        }
    }
    Ok(cands.into_iter().zip(state).filter(|(_, s)| *s == 1).map(|(c, _)| c).collect())
}

fn strictly_inside(q: &[[f64; 2]; 4], p: [f64; 2]) -> bool {
    let cross = |i: usize| {
        let (a, b) = (q[i], q[(i + 1) % 4]);
        (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
    };
    let c: [f64; 4] = std::array::from_fn(cross);
    c.iter().all(|x| *x > 1e-9) || c.iter().all(|x| *x < -1e-9)
}

fn phys_corners(f: &Face, e: &Edges) -> Vec<[f64; 2]> {
    f.corners(e).iter().map(|v| v.phys()).collect()
}

/// `x` as an exact golden number with small coefficients, when it is one.
pub(crate) fn golden_share(x: f64) -> Option<String> {
    let s = GoldenNumber::snap(x, 4, 8);
    (s.error < 1e-8).then(|| s.value.to_string())
}

/// Fine faces overlapping coarse faces, found through a uniform grid.
pub(crate) struct Overlaps<'a> {
    fine: &'a Tiling,
    fe: Edges,
    cell: f64,
    grid: FxHashMap<(i64, i64), Vec<u32>>,
}

impl<'a> Overlaps<'a> {
    pub(crate) fn new(fine: &'a Tiling, coarse_edge: f64) -> Overlaps<'a> {
        let fe = fine.edges();
        let cell = 2.0 * coarse_edge;
        let mut grid: FxHashMap<(i64, i64), Vec<u32>> = FxHashMap::default();
        for (i, f) in fine.faces.iter().enumerate() {
            let c = f.center(&fe);
            grid.entry(((c[0] / cell).floor() as i64, (c[1] / cell).floor() as i64)).or_default().push(i as u32);
        }
        Overlaps { fine, fe, cell, grid }
    }

    /// `(fine face index, overlap area / fine area)` for every fine face that
    /// meets `coarse` in a set of positive area.
    pub(crate) fn of(&self, coarse: &Face, ce: &Edges) -> Vec<(usize, f64)> {
        let poly = phys_corners(coarse, ce);
        let c = coarse.center(ce);
        let (cx, cy) = ((c[0] / self.cell).floor() as i64, (c[1] / self.cell).floor() as i64);
        let mut out = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                for &i in self.grid.get(&(cx + dx, cy + dy)).map(|v| &v[..]).unwrap_or(&[]) {
                    let f = &self.fine.faces[i as usize];
                    let a = overlap_area(&phys_corners(f, &self.fe), &poly);
                    let share = a / f.area(&self.fe);
                    if share > 1e-9 {
                        out.push((i as usize, share));
                    }
                }
            }
        }
        out
    }
}

type RuleKey = (u8, bool, [u8; 4]);

/// Derives the rules of every coarse face that has a key, decorated corners and
/// fully keyed children.
pub fn derive_table(
    name: &str,
    coarse: &Tiling,
    coarse_keys: &BTreeMap<Face, (u8, [u8; 4])>,
    fine: &Tiling,
    fine_keys: &BTreeMap<Face, u8>,
    names: (Vec<String>, Vec<String>),
) -> Result<SubstitutionTable> {
    if coarse.scale_exp <= fine.scale_exp {
        return Err(Error::InvalidArgument("coarse patch must have the larger scale".into()));
    }
    let step = coarse.scale_exp - fine.scale_exp;
    let (ce, fe) = (coarse.edges(), fine.edges());
    let overlaps = Overlaps::new(fine, ce.length());
    let mut rules: BTreeMap<RuleKey, Rule> = BTreeMap::new();
    'faces: for (f, &(key, decs)) in coarse_keys {
        let hits = overlaps.of(f, &ce);
        let mut fine_children = Vec::with_capacity(hits.len());
        for (i, share) in hits {
            let g = fine.faces[i];
            match fine_keys.get(&g) {
                Some(k) => fine_children.push((g, *k, share)),
                None => continue 'faces,
            }
        }
        let mut candidates: Vec<([u8; 4], Vec<Child>)> = Vec::new();
        for fr in frames(f, &ce) {
            let mut d = [0u8; 4];
            for i in 0..4 {
                d[fr.pos[i]] = decs[i];
            }
            let mut children: Vec<Child> = fine_children
                .iter()
                .map(|(g, k, share)| {
                    let c = g.corners(&fe).map(|x| fr.forward(&x));
                    let h = Face::from_corners(&c, &fe).expect("image of a face");
                    let share = (share * 1e12).round() / 1e12;
                    Child { anchor: h.anchor.0, j: h.j, k: h.k, key: *k, share, share_exact: golden_share(share) }
                })
                .collect();
            children.sort_by_key(|c| c.order_key());
            candidates.push((d, children));
        }
        let best = candidates.iter().map(|c| c.0).min().expect("every face has a frame");
        let mut chosen: Option<&Vec<Child>> = None;
        for (d, ch) in candidates.iter().filter(|c| c.0 == best) {
            match chosen {
                None => chosen = Some(ch),
                Some(prev) if same_children(prev, ch) => {}
                Some(_) => {
                    return Err(Error::Consistency(format!(
                        "{name}: patch of {f:?} (key {key}, corners {d:?}) is not fixed by its symmetries"
                    )))
                }
            }
        }
        let children = chosen.expect("non-empty").clone();
        let rk = (key, f.is_thick(), best);
        match rules.get_mut(&rk) {
            None => {
                rules.insert(rk, Rule { key, thick: f.is_thick(), corners: best, instances: 1, children });
            }
            Some(r) if same_children(&r.children, &children) => r.instances += 1,
            Some(r) => {
                return Err(Error::Consistency(format!(
                    "{name}: two patches for key {key} with corners {best:?}: {} vs {} children at {f:?}",
                    r.children.len(),
                    children.len()
                )))
            }
        }
    }
    Ok(SubstitutionTable {
        name: name.to_string(),
        fine_scale: fine.scale_exp,
        step,
        key_names: names.0,
        decoration_names: names.1,
        rules: rules.into_values().collect(),
    })
}

fn same_children(a: &[Child], b: &[Child]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| x.order_key() == y.order_key() && (x.share - y.share).abs() < 1e-9)
}

impl SubstitutionTable {
    /// Same rules and children as `other`, ignoring instance counts.
    pub fn same_rules(&self, other: &SubstitutionTable) -> bool {
        let theirs = other.lookup();
        self.rules.len() == other.rules.len()
            && self.rules.iter().all(|r| {
                theirs.get(&(r.key, r.thick, r.corners)).is_some_and(|o| same_children(&r.children, &o.children))
            })
    }

    fn lookup(&self) -> FxHashMap<RuleKey, &Rule> {
        self.rules.iter().map(|r| ((r.key, r.thick, r.corners), r)).collect()
    }

    /// Fine faces replacing the given coarse faces (with their keys and corner
    /// decorations), with the child keys.
    pub fn apply(&self, coarse: &Tiling, keys: &BTreeMap<Face, (u8, [u8; 4])>) -> Result<Vec<(Face, u8)>> {
        if coarse.scale_exp < self.fine_scale + self.step {
            return Err(Error::InvalidArgument(format!(
                "{} needs coarse scale ≥ {}, got {}",
                self.name,
                self.fine_scale + self.step,
                coarse.scale_exp
            )));
        }
        let extra = coarse.scale_exp - self.step - self.fine_scale;
        let ce = coarse.edges();
        let base = Edges::new(self.fine_scale);
        let fe = Edges::new(coarse.scale_exp - self.step);
        let table = self.lookup();
        let mut out: FxHashMap<Face, u8> = FxHashMap::default();
        for (f, &(key, decs)) in keys {
            let mut best: Option<([u8; 4], Frame)> = None;
            for fr in frames(f, &ce) {
                let mut d = [0u8; 4];
                for i in 0..4 {
                    d[fr.pos[i]] = decs[i];
                }
                if best.as_ref().is_none_or(|(b, _)| d < *b) {
                    best = Some((d, fr));
                }
            }
            let (d, fr) = best.expect("every face has a frame");
            let rule = table.get(&(key, f.is_thick(), d)).ok_or_else(|| {
                Error::Unclassifiable(format!("{}: no rule for key {key} with corners {d:?}", self.name))
            })?;
            for ch in &rule.children {
                let c = ch.face().corners(&base).map(|y| fr.backward(&y, extra));
                let h = Face::from_corners(&c, &fe).ok_or_else(|| Error::Consistency("child is not a face".into()))?;
                if let Some(prev) = out.insert(h, ch.key) {
                    if prev != ch.key {
                        return Err(Error::Consistency(format!("{}: {h:?} given keys {prev} and {}", self.name, ch.key)));
                    }
                }
            }
        }
        let mut v: Vec<(Face, u8)> = out.into_iter().collect();
        v.sort_unstable();
        Ok(v)
    }

    /// Coarse faces whose complete patch appears in `fine`: the inverse of
    /// [`SubstitutionTable::apply`]. `transition` maps a coarse corner
    /// decoration to the vertex decoration that corner carries in the fine
    /// tiling, or `None` if it is not a fine vertex.
    pub fn group(
        &self,
        fine: &Tiling,
        decor: &FxHashMap<IndexVector, u8>,
        fine_keys: &FxHashMap<Face, u8>,
        transition: impl Fn(u8) -> Option<u8>,
        complete: f64,
    ) -> Result<Vec<(Face, u8)>> {
        if fine.scale_exp < self.fine_scale {
            return Err(Error::InvalidArgument(format!("{} needs fine scale ≥ {}", self.name, self.fine_scale)));
        }
        let extra = fine.scale_exp - self.fine_scale;
        let ce = Edges::new(fine.scale_exp + self.step);
        let base = Edges::new(self.fine_scale);
        let fe = fine.edges();
        let cell = fe.length();
        let cell_of = |p: [f64; 2]| ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64);
        let mut grid: FxHashMap<(i64, i64), Vec<IndexVector>> = FxHashMap::default();
        for v in &fine.vertices {
            grid.entry(cell_of(v.phys())).or_default().push(*v);
        }
        let inside_of = |c: &[IndexVector; 4]| {
            let q = c.map(|v| v.phys());
            let (mut lo, mut hi) = (cell_of(q[0]), cell_of(q[0]));
            for p in &q[1..] {
                let k = cell_of(*p);
                lo = (lo.0.min(k.0), lo.1.min(k.1));
                hi = (hi.0.max(k.0), hi.1.max(k.1));
            }
            let mut vs: Vec<IndexVector> = Vec::new();
            for x in lo.0..=hi.0 {
                for y in lo.1..=hi.1 {
                    vs.extend(grid.get(&(x, y)).into_iter().flatten().filter(|v| strictly_inside(&q, v.phys())).copied());
                }
            }
            vs.sort_unstable();
            vs
        };
        let top = Edges::new(self.fine_scale + self.step);
        let mut out: FxHashMap<Face, u8> = FxHashMap::default();
        for rule in &self.rules {
            let std = standard_face(rule.thick).corners(&ce);
            let sq = standard_face(rule.thick).corners(&top).map(|v| v.phys());
            let mut interior: Vec<IndexVector> = rule
                .children
                .iter()
                .flat_map(|ch| ch.face().corners(&base))
                .filter(|y| strictly_inside(&sq, y.phys()))
                .collect();
            interior.sort_unstable();
            interior.dedup();
            let Some(i0) = (0..4).find(|&i| transition(rule.corners[i]).is_some()) else { continue };
            let want = transition(rule.corners[i0]);
            for g in Sym::all() {
                let gi = g.inverse();
                let rel: [[i64; 5]; 4] = std::array::from_fn(|i| gi.apply(&std[i].raw()));
                for v in &fine.vertices {
                    if decor.get(v).copied() != want {
                        continue;
                    }
                    let anchor = sub(&v.raw(), &rel[i0]);
                    let corners: [IndexVector; 4] = std::array::from_fn(|i| canonicalize(add(&rel[i], &anchor)));
                    if corners.iter().any(|c| fine.dist(c.phys()) > complete) {
                        continue;
                    }
                    let ok = (0..4).all(|i| match transition(rule.corners[i]) {
                        Some(d) => decor.get(&corners[i]) == Some(&d),
                        None => !decor.contains_key(&corners[i]) && !fine.vertices.binary_search(&corners[i]).is_ok(),
                    });
                    if !ok {
                        continue;
                    }
                    let fr = Frame { g, anchor, shift: [0; 5], pos: [0, 1, 2, 3] };
                    let all = rule.children.iter().all(|ch| {
                        let c = ch.face().corners(&base).map(|y| fr.backward(&y, extra));
                        Face::from_corners(&c, &fe).is_some_and(|h| fine_keys.get(&h) == Some(&ch.key))
                    });
                    let all = all && {
                        let mut want: Vec<IndexVector> = interior.iter().map(|y| fr.backward(y, extra)).collect();
                        want.sort_unstable();
                        inside_of(&corners) == want
                    };
                    if all {
                        // rules differing only in child keys match the same face
                        let h = Face::from_corners(&corners, &ce).expect("placed standard face");
                        out.entry(h).or_insert(rule.key);
                    }
                }
            }
        }
        let mut cands: Vec<(Face, u8)> = out.into_iter().collect();
        cands.sort_unstable();
        resolve(cands, fine, &ce, complete - 4.0 * ce.length())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<SubstitutionTable> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden::phys_f64;

    #[test]
    fn symmetries_are_isometries_and_a_group() {
        let n = [3, -1, 2, 0, 5];
        let p = phys_f64(&n);
        let mut images = rustc_hash::FxHashSet::default();
        for g in Sym::all() {
            let q = phys_f64(&g.apply(&n));
            assert!((p[0].hypot(p[1]) - q[0].hypot(q[1])).abs() < 1e-9);
            assert_eq!(g.inverse().apply(&g.apply(&n)), n);
            assert_eq!(apply_scaling(&g.apply(&n)), g.apply(&apply_scaling(&n)));
            images.insert(g.apply(&[1, 0, 0, 0, 0]));
        }
        assert_eq!(images.len(), 10);
    }

    #[test]
    fn rhombus_has_four_frames() {
        let e = Edges::new(1);
        for (j, k) in [(0, 1), (1, 3), (2, 4), (0, 4)] {
            let f = Face::new(IndexVector([1, 0, -2, 0, 1]), j, k);
            let fr = frames(&f, &e);
            assert_eq!(fr.len(), 4);
            for x in fr {
                let c = f.corners(&e);
                let mut p: Vec<usize> = x.pos.to_vec();
                p.sort();
                assert_eq!(p, vec![0, 1, 2, 3]);
                assert_eq!(x.backward(&x.forward(&c[1]), 0), c[1]);
            }
        }
    }

    #[test]
    fn overlap_of_squares() {
        let a = [[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]];
        let b = [[1.0, 1.0], [3.0, 1.0], [3.0, 3.0], [1.0, 3.0]];
        assert!((overlap_area(&a, &b) - 1.0).abs() < 1e-12);
        assert_eq!(golden_share(0.5).as_deref(), Some("1/2"));
        assert_eq!(golden_share(0.3819660112501051).as_deref(), Some("2 - 1τ"));
        assert_eq!(golden_share(0.3), None);
    }
}
