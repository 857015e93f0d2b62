//! Hyper-scaling, substitution (deflation and inflation), the inflation
//! matrix and the locally derived P1 and P3 tilings of a P4 patch.

mod substitution;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

pub use substitution::{Child, Rule, SubstitutionTable, Sym};
use substitution::{golden_share, Overlaps};

pub use crate::tiling::{p1_to_p4, p4_to_p1};

use crate::error::{Error, Result};
use crate::golden::{apply_scaling, canonicalize, unit_level, GoldenNumber, IndexVector, PerpVector, TAU};
use crate::labels::{Environment, Family, PrototileType, VertexColor};
use crate::tiling::{generate, generate_with_windows, vertex_color, Classifier, Edges, Face, Tiling, MARGIN};
use crate::windows::{lattice_windows, p3_tau2_windows, p3_tau_windows};

/// The hyper-scaling matrix `S` with `S_ij = −1` iff `j ≡ i ± 2 (mod 5)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalingMap {
    pub matrix: [[i64; 5]; 5],
}

impl Default for ScalingMap {
    fn default() -> Self {
        let matrix = std::array::from_fn(|i| std::array::from_fn(|j| if (j + 5 - i) % 5 == 2 || (i + 5 - j) % 5 == 2 { -1 } else { 0 }));
        ScalingMap { matrix }
    }
}

impl ScalingMap {
    /// `n ↦ canonicalize(n·S)`.
    pub fn apply(&self, n: &IndexVector) -> IndexVector {
        let r = n.raw();
        canonicalize(std::array::from_fn(|j| (0..5).map(|i| r[i] * self.matrix[i][j]).sum()))
    }

    /// Largest deviation of `Σⱼ S_ij eⱼ` from `τ·eᵢ`.
    pub fn residual(&self) -> f64 {
        let b = crate::golden::Basis::get();
        let mut worst: f64 = 0.0;
        for i in 0..5 {
            let mut p = [0.0; 2];
            for j in 0..5 {
                p[0] += self.matrix[i][j] as f64 * b.phys[j][0];
                p[1] += self.matrix[i][j] as f64 * b.phys[j][1];
            }
            worst = worst.max((p[0] - TAU * b.phys[i][0]).abs()).max((p[1] - TAU * b.phys[i][1]).abs());
        }
        worst
    }
}

/// `τ̃`: scales the physical image by `τ` and the perpendicular one by `−1/τ`.
pub fn hyper_scale(v: &IndexVector) -> IndexVector {
    canonicalize(apply_scaling(&v.raw()))
}

/// Window offset that makes `τ̃` map a patch with offset `γ` onto a patch
/// of the next scale: `−γ/τ`.
pub fn hyper_scale_offset(offset: &PerpVector) -> PerpVector {
    offset.scale(GoldenNumber::from_ints(1, -1))
}

/// The image of a tiling under `τ̃`: the same tiling one scale up, with the
/// offset rewritten.
pub fn rebase(t: &Tiling) -> Tiling {
    let faces = t.faces.iter().map(|f| Face::new(hyper_scale(&f.anchor), f.j, f.k)).collect();
    Tiling::from_faces(
        t.family,
        t.scale_exp + 1,
        hyper_scale_offset(&t.offset),
        [t.center[0] * TAU, t.center[1] * TAU],
        t.radius * TAU,
        faces,
    )
}

fn color_code(c: VertexColor) -> u8 {
    VertexColor::ALL.iter().position(|x| *x == c).expect("listed") as u8
}

fn color_of(code: u8) -> VertexColor {
    VertexColor::ALL[code as usize]
}

/// Colour of a coarse vertex after deflation, `None` if it disappears.
pub fn deflated_color(c: VertexColor) -> Option<VertexColor> {
    match c {
        VertexColor::Uncolored => Some(VertexColor::Uncolored),
        VertexColor::Orange => Some(VertexColor::Blue),
        VertexColor::Blue => Some(VertexColor::Orange),
        VertexColor::Yellow => None,
    }
}

/// Colour codes of every vertex, and the prototile type and corner
/// decorations of every interior face. A corner decoration combines the
/// corner colour with the unordered pair of prototile types across the two
/// edges at that corner, which tells mirror images of a face apart.
fn p4_decorations(t: &Tiling) -> Result<(FxHashMap<IndexVector, u8>, BTreeMap<Face, (u8, [u8; 4])>)> {
    let cl = Classifier::new(t)?;
    let e = t.edges();
    let decor: FxHashMap<IndexVector, u8> =
        t.vertices.iter().filter_map(|v| cl.color(v).map(|c| (*v, color_code(c)))).collect();
    let mut by_edge: FxHashMap<(IndexVector, IndexVector), Vec<u32>> = FxHashMap::default();
    for (i, f) in t.faces.iter().enumerate() {
        let c = f.corners(&e);
        for m in 0..4 {
            let (a, b) = (c[m], c[(m + 1) % 4]);
            by_edge.entry(if a < b { (a, b) } else { (b, a) }).or_default().push(i as u32);
        }
    }
    let mut types: FxHashMap<u32, u8> = FxHashMap::default();
    for (i, f) in t.faces.iter().enumerate() {
        if t.face_is_interior(f, MARGIN) {
            types.insert(i as u32, cl.prototile(f)?.index() as u8);
        }
    }
    let mut keys = BTreeMap::new();
    'faces: for (i, f) in t.faces.iter().enumerate() {
        let Some(&key) = types.get(&(i as u32)) else { continue };
        let c = f.corners(&e);
        let mut across = [0u8; 4];
        for m in 0..4 {
            let (a, b) = (c[m], c[(m + 1) % 4]);
            let other = by_edge[&if a < b { (a, b) } else { (b, a) }].iter().copied().find(|&o| o != i as u32);
            match other.and_then(|o| types.get(&o)) {
                Some(&p) => across[m] = p,
                None => continue 'faces,
            }
        }
        let d: [u8; 4] = std::array::from_fn(|m| {
            let (x, y) = (across[m], across[(m + 3) % 4]);
            decor[&c[m]] + 4 * (1 + 6 * x.min(y) + x.max(y))
        });
        keys.insert(*f, (key, d));
    }
    Ok((decor, keys))
}

fn p3_decorations(t: &Tiling) -> BTreeMap<Face, (u8, [u8; 4])> {
    let e = t.edges();
    t.faces
        .iter()
        .map(|f| (*f, (if f.is_thick() { 0 } else { 1 }, f.corners(&e).map(|v| unit_level(v.level(), t.scale_exp)))))
        .collect()
}

fn keep_within<V>(keys: &mut BTreeMap<Face, V>, t: &Tiling, r: f64) {
    let e = t.edges();
    keys.retain(|f, _| f.corners(&e).iter().all(|v| t.dist(v.phys()) <= r));
}

/// Derives the P4 deflation table from a scale-1 window patch and its unit
/// companion with the same offset.
pub fn derive_p4_table(radius: f64, offset: PerpVector, center: [f64; 2]) -> Result<SubstitutionTable> {
    let coarse = generate(Family::P4, radius, 1, offset, center)?;
    let fine = generate(Family::P4, radius + 4.0, 0, offset, center)?;
    let (_, mut keys) = p4_decorations(&coarse)?;
    keep_within(&mut keys, &coarse, radius - 2.0 * TAU);
    let fine_keys = p4_decorations(&fine)?.1.into_iter().map(|(f, (k, _))| (f, k)).collect();
    let names = (
        PrototileType::ALL.iter().map(|p| p.letter().to_string()).collect(),
        VertexColor::ALL.iter().map(|c| c.name().to_string()).collect(),
    );
    substitution::derive_table("p4", &coarse, &keys, &fine, &fine_keys, names)
}

/// Derives the P3 substitution from the τ²- and τ-scaled P3 companions of a
/// unit P4 window frame.
pub fn derive_p3_table(radius: f64, offset: PerpVector, center: [f64; 2]) -> Result<SubstitutionTable> {
    let coarse = p3_tau2_direct(radius, 0, offset, center)?;
    let fine = p3_tau_direct(radius + 4.0, 0, offset, center)?;
    let mut keys = p3_decorations(&coarse);
    keep_within(&mut keys, &coarse, radius - 2.0 * TAU * TAU);
    let fine_keys = p3_decorations(&fine).into_iter().map(|(f, (k, _))| (f, k)).collect();
    let names = (vec!["thick".into(), "thin".into()], (0..5).map(|q| format!("level {q}")).collect());
    substitution::derive_table("p3", &coarse, &keys, &fine, &fine_keys, names)
}

/// The shipped P4 deflation table.
pub fn p4_table() -> &'static SubstitutionTable {
    static T: OnceLock<SubstitutionTable> = OnceLock::new();
    T.get_or_init(|| SubstitutionTable::from_json(include_str!("../../data/p4_deflation.json")).expect("shipped table"))
}

/// The shipped P3 substitution table.
pub fn p3_table() -> &'static SubstitutionTable {
    static T: OnceLock<SubstitutionTable> = OnceLock::new();
    T.get_or_init(|| SubstitutionTable::from_json(include_str!("../../data/p3_deflation.json")).expect("shipped table"))
}

/// Result of a deflation.
#[derive(Clone, Debug)]
pub struct Deflation {
    pub tiling: Tiling,
    /// Coarse faces left out because they touch the boundary layer.
    pub skipped: usize,
}

/// Replaces every classified face of a P4 patch of scale `s ≥ 1` by its unit
/// patch one scale down. Scale-0 patches must be rebased first.
pub fn deflate_p4(t: &Tiling) -> Result<Deflation> {
    if t.family != Family::P4 {
        return Err(Error::InvalidArgument("deflate_p4 needs a P4 tiling".into()));
    }
    if t.scale_exp == 0 {
        return Err(Error::InvalidArgument("scale-0 patches have no lattice deflation; rebase first".into()));
    }
    let (_, keys) = p4_decorations(t)?;
    let children = p4_table().apply(t, &keys)?;
    let faces = children.into_iter().map(|(f, _)| f).collect();
    let radius = t.radius - (MARGIN + 2.0) * t.edge_length();
    Ok(Deflation {
        tiling: Tiling::from_faces(Family::P4, t.scale_exp - 1, t.offset, t.center, radius, faces),
        skipped: t.faces.len() - keys.len(),
    })
}

/// Groups the faces of a P4 patch into the prototiles of the next scale.
pub fn inflate_p4(t: &Tiling) -> Result<Tiling> {
    if t.family != Family::P4 {
        return Err(Error::InvalidArgument("inflate_p4 needs a P4 tiling".into()));
    }
    let decor: FxHashMap<IndexVector, u8> =
        t.vertices.iter().map(|v| vertex_color(t, v).map(|c| (*v, color_code(c)))).collect::<Result<_>>()?;
    let fine_keys: FxHashMap<Face, u8> = p4_decorations(t)?.1.into_iter().map(|(f, (k, _))| (f, k)).collect();
    let grouped = p4_table().group(t, &decor, &fine_keys, |c| deflated_color(color_of(c % 4)).map(color_code), t.radius)?;
    let faces: Vec<Face> = grouped.into_iter().map(|(f, _)| f).collect();
    let coarse_edge = t.edge_length() * TAU;
    let out = Tiling::from_faces(Family::P4, t.scale_exp + 1, t.offset, t.center, t.radius - 5.0 * coarse_edge, faces);
    let open = out.open_edges(0.0);
    if !open.is_empty() {
        return Err(Error::Consistency(format!("inflation left {} unmatched edges, first {:?}", open.len(), open[0])));
    }
    Ok(out)
}

/// Exceptions to the colour-transition rules between a coarse patch and the
/// unit patch one scale down with the same offset.
#[derive(Clone, Debug, Default, Serialize)]
pub struct TransitionReport {
    pub checked: usize,
    /// `(coarse colour, fine colour or "absent") → count`.
    pub counts: BTreeMap<String, usize>,
    pub exceptions: usize,
}

pub fn color_transitions(coarse: &Tiling, fine: &Tiling) -> Result<TransitionReport> {
    let mut rep = TransitionReport::default();
    for v in &coarse.vertices {
        if !coarse.is_interior(v, MARGIN) || !fine.is_interior(v, MARGIN) {
            continue;
        }
        let c = vertex_color(coarse, v)?;
        let f = if fine.vertices.binary_search(v).is_ok() { Some(vertex_color(fine, v)?) } else { None };
        rep.checked += 1;
        *rep.counts.entry(format!("{} -> {}", c.name(), f.map_or("absent", |x| x.name()))).or_default() += 1;
        if f != deflated_color(c) {
            rep.exceptions += 1;
        }
    }
    Ok(rep)
}

/// Per-prototile production counts. `m[u][t]` is the number of type-`u` unit
/// faces in a τ-scaled face of type `t`, so that frequencies form the right
/// eigenvector.
#[derive(Clone, Debug, Serialize)]
pub struct InflationMatrix {
    pub m: [[f64; 6]; 6],
    /// Entries as exact golden numbers where they are ones.
    pub exact: Vec<Vec<Option<String>>>,
    /// Coarse faces averaged per type.
    pub samples: [usize; 6],
    pub eigenvalue: f64,
    /// Normalised so that the last component is 1.
    pub eigenvector: [f64; 6],
}

/// The frequencies `(τ³, 2τ², τ, τ², 2τ, 1)`.
pub fn expected_frequencies() -> [f64; 6] {
    [TAU.powi(3), 2.0 * TAU * TAU, TAU, TAU * TAU, 2.0 * TAU, 1.0]
}

impl InflationMatrix {
    /// Largest relative deviation of the eigenvector from the expected one.
    pub fn eigenvector_error(&self) -> f64 {
        let e = expected_frequencies();
        (0..6).map(|i| (self.eigenvector[i] / e[i] - 1.0).abs()).fold(0.0, f64::max)
    }

    /// `Σᵤ m[u][t]·area(u) − τ²·area(t)` per coarse type, in units of the
    /// unit thick area.
    pub fn area_defects(&self) -> [f64; 6] {
        let thin = 36f64.to_radians().sin() / 72f64.to_radians().sin();
        let area = |u: usize| if u < 3 { 1.0 } else { thin };
        std::array::from_fn(|t| (0..6).map(|u| self.m[u][t] * area(u)).sum::<f64>() - TAU * TAU * area(t))
    }
}

/// Counts, for each classified coarse face, the overlap fractions of the
/// classified unit faces under it.
pub fn derive_inflation_matrix(patch: &Tiling, deflated: &Tiling) -> Result<InflationMatrix> {
    if patch.scale_exp != deflated.scale_exp + 1 {
        return Err(Error::InvalidArgument("deflated patch must be one scale below".into()));
    }
    let (_, keys) = p4_decorations(patch)?;
    let (_, fine_keys) = p4_decorations(deflated)?;
    let fine_keys: FxHashMap<Face, u8> = fine_keys.into_iter().map(|(f, (k, _))| (f, k)).collect();
    let ce = patch.edges();
    let ov = Overlaps::new(deflated, ce.length());
    let mut sums = [[0.0; 6]; 6];
    let mut samples = [0usize; 6];
    'faces: for (f, &(t, _)) in &keys {
        let hits = ov.of(f, &ce);
        let mut add = [0.0; 6];
        for (i, share) in hits {
            match fine_keys.get(&deflated.faces[i]) {
                Some(&u) => add[u as usize] += share,
                None => continue 'faces,
            }
        }
        samples[t as usize] += 1;
        for u in 0..6 {
            sums[u][t as usize] += add[u];
        }
    }
    if samples.contains(&0) {
        return Err(Error::Consistency(format!("some prototile never appears fully inside the patch: {samples:?}")));
    }
    let m: [[f64; 6]; 6] = std::array::from_fn(|u| std::array::from_fn(|t| sums[u][t] / samples[t] as f64));
    let exact = m.iter().map(|row| row.iter().map(|x| golden_share(*x)).collect()).collect();
    let (eigenvalue, eigenvector) = leading_eigen(&m);
    Ok(InflationMatrix { m, exact, samples, eigenvalue, eigenvector })
}

/// Power iteration for a non-negative primitive matrix.
fn leading_eigen(m: &[[f64; 6]; 6]) -> (f64, [f64; 6]) {
    let mut v = [1.0; 6];
    let mut lambda = 0.0;
    for _ in 0..2000 {
        let w: [f64; 6] = std::array::from_fn(|i| (0..6).map(|j| m[i][j] * v[j]).sum());
        let norm: f64 = w.iter().sum();
        lambda = norm / v.iter().sum::<f64>();
        v = w.map(|x| x / norm);
    }
    (lambda, v.map(|x| x / v[5]))
}

/// Direct cut-and-project P3 patch at scale `s + 1` with the windows
/// `(B₁, W₂, W₃, B₄)` of the scale-`s` P4 frame.
pub fn p3_tau_direct(radius: f64, scale_exp: u32, offset: PerpVector, center: [f64; 2]) -> Result<Tiling> {
    generate_with_windows(Family::P3, &lattice_windows(&p3_tau_windows(), scale_exp), radius, scale_exp + 1, offset, center)
}

/// Direct cut-and-project P3 patch at scale `s + 2` with the windows
/// `(P₁, W₂, W₃, P₄)` of the scale-`s` P4 frame.
pub fn p3_tau2_direct(radius: f64, scale_exp: u32, offset: PerpVector, center: [f64; 2]) -> Result<Tiling> {
    generate_with_windows(Family::P3, &lattice_windows(&p3_tau2_windows(), scale_exp), radius, scale_exp + 2, offset, center)
}

fn faces_on(vertices: &FxHashSet<IndexVector>, edges: &Edges) -> Vec<Face> {
    crate::tiling::quad_faces(vertices, edges)
}

/// The τ-scaled P3 tiling spanned by the blue and orange vertices of `t`.
pub fn p4_to_p3_tau(t: &Tiling) -> Result<Tiling> {
    if t.family != Family::P4 {
        return Err(Error::InvalidArgument("p4_to_p3_tau needs a P4 tiling".into()));
    }
    let mut keep = FxHashSet::default();
    for v in &t.vertices {
        if matches!(vertex_color(t, v)?, VertexColor::Blue | VertexColor::Orange) {
            keep.insert(*v);
        }
    }
    let edges = Edges::new(t.scale_exp + 1);
    let radius = t.radius - edges.length();
    let out = Tiling::from_faces(Family::P3, t.scale_exp + 1, t.offset, t.center, radius, faces_on(&keep, &edges));
    let open = out.open_edges(0.0);
    if !open.is_empty() {
        return Err(Error::Consistency(format!("τ-scaled P3 has holes; first open edge {:?}", open[0])));
    }
    Ok(out)
}

/// Counter-clockwise faces of a planar graph given by its directed
/// adjacency, with at most `max_len` corners.
fn trace_faces(adj: &FxHashMap<IndexVector, Vec<IndexVector>>, edges: &Edges, max_len: usize) -> Vec<Vec<IndexVector>> {
    let mut starts: Vec<(IndexVector, IndexVector)> =
        adj.iter().flat_map(|(a, bs)| bs.iter().map(move |b| (*a, *b))).collect();
    starts.sort_unstable();
    let mut used = FxHashSet::default();
    let mut out = Vec::new();
    for (s, t) in starts {
        if used.contains(&(s, t)) {
            continue;
        }
        let mut cyc = vec![s];
        let mut cur = (s, t);
        let mut closed = false;
        for _ in 0..=max_len {
            used.insert(cur);
            let (a, b) = cur;
            if b == s {
                closed = true;
                break;
            }
            cyc.push(b);
            let back = edges.dir(&b, &a).expect("graph edges are lattice edges");
            let next = adj.get(&b).into_iter().flatten().max_by_key(|c| {
                let d = edges.dir(&b, c).expect("graph edges are lattice edges");
                (d + 10 - back) % 10
            });
            match next {
                Some(c) => cur = (b, *c),
                None => break,
            }
        }
        if closed && cyc.len() <= max_len && ring_area(&cyc) > 0.0 {
            out.push(cyc);
        }
    }
    out
}

fn ring_area(c: &[IndexVector]) -> f64 {
    let p: Vec<[f64; 2]> = c.iter().map(|v| v.phys()).collect();
    let n = p.len();
    (0..n).map(|i| p[i][0] * p[(i + 1) % n][1] - p[(i + 1) % n][0] * p[i][1]).sum::<f64>() / 2.0
}

/// Corners of a counter-clockwise ring with an interior angle above 180°.
fn reflex_corners(ring: &[IndexVector], edges: &Edges) -> Vec<IndexVector> {
    let n = ring.len();
    (0..n)
        .filter(|&i| {
            let (a, p, b) = (ring[(i + n - 1) % n], ring[i], ring[(i + 1) % n]);
            match (edges.dir(&p, &b), edges.dir(&p, &a)) {
                (Some(db), Some(da)) => (da + 10 - db) % 10 > 5,
                _ => false,
            }
        })
        .map(|i| ring[i])
        .collect()
}

fn inside_ring(ring: &[[f64; 2]], p: [f64; 2]) -> bool {
    let n = ring.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        if (a[1] > p[1]) != (b[1] > p[1]) && p[0] < a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]) {
            inside = !inside;
        }
    }
    inside
}

/// Shapes of the polygons traced on the S₁ vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Motif {
    Hexagon,
    Boat,
    Star,
}

/// The τ²-scaled P3 tiling: S₁ vertices joined by edges of length `τˢ⁺²`,
/// plus one vertex inside every hexagon, boat and star.
pub fn p4_to_p3_tau2(t: &Tiling) -> Result<Tiling> {
    Ok(p4_to_p3_tau2_motifs(t)?.0)
}

/// [`p4_to_p3_tau2`] together with the number of traced motifs of each shape.
pub fn p4_to_p3_tau2_motifs(t: &Tiling) -> Result<(Tiling, BTreeMap<Motif, usize>)> {
    if t.family != Family::P4 {
        return Err(Error::InvalidArgument("p4_to_p3_tau2 needs a P4 tiling".into()));
    }
    let cl = Classifier::new(t)?;
    let mut env: FxHashMap<IndexVector, Environment> = FxHashMap::default();
    for v in &t.vertices {
        if t.is_interior(v, MARGIN) {
            env.insert(*v, cl.environment(v)?);
        }
    }
    let big = Edges::new(t.scale_exp + 2);
    let s1: FxHashSet<IndexVector> = env.iter().filter(|(_, e)| **e == Environment::S1).map(|(v, _)| *v).collect();
    let mut adj: FxHashMap<IndexVector, Vec<IndexVector>> = FxHashMap::default();
    for v in &s1 {
        for d in 0..10 {
            let w = big.step(v, d);
            if s1.contains(&w) {
                adj.entry(*v).or_default().push(w);
            }
        }
    }
    // cells of the grid of interior vertices, for the inside tests
    let cell = big.length();
    let key = |p: [f64; 2]| ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64);
    let mut grid: FxHashMap<(i64, i64), Vec<IndexVector>> = FxHashMap::default();
    for (v, e) in &env {
        if matches!(e, Environment::K | Environment::S2 | Environment::Q) {
            grid.entry(key(v.phys())).or_default().push(*v);
        }
    }
    let mut chosen: FxHashSet<IndexVector> = s1.clone();
    let mut motifs = BTreeMap::new();
    let mut concave: FxHashSet<IndexVector> = FxHashSet::default();
    let mut hexagons: Vec<(Vec<IndexVector>, Vec<IndexVector>)> = Vec::new();
    for ring in trace_faces(&adj, &big, 10) {
        let pts: Vec<[f64; 2]> = ring.iter().map(|v| v.phys()).collect();
        let (lo, hi) = pts.iter().fold(((i64::MAX, i64::MAX), (i64::MIN, i64::MIN)), |(lo, hi), p| {
            let k = key(*p);
            ((lo.0.min(k.0), lo.1.min(k.1)), (hi.0.max(k.0), hi.1.max(k.1)))
        });
        let mut inner: Vec<(IndexVector, Environment)> = Vec::new();
        for x in lo.0..=hi.0 {
            for y in lo.1..=hi.1 {
                for v in grid.get(&(x, y)).into_iter().flatten() {
                    if inside_ring(&pts, v.phys()) {
                        inner.push((*v, env[v]));
                    }
                }
            }
        }
        inner.sort_unstable();
        let of = |e: Environment| inner.iter().filter(|(_, x)| *x == e).map(|(v, _)| *v).collect::<Vec<_>>();
        let (ks, s2s, qs) = (of(Environment::K), of(Environment::S2), of(Environment::Q));
        let (motif, pick) = match (ks.len(), s2s.len(), qs.len()) {
            (0, 0, 2) => (Motif::Hexagon, None),
            (1, 0, _) => (Motif::Boat, Some(ks[0])),
            (0, 1, _) => (Motif::Star, Some(s2s[0])),
            (k, s, q) => {
                return Err(Error::Consistency(format!(
                    "unexpected motif at {:?}: {} corners with {k} K, {s} S₂ and {q} Q vertices inside",
                    ring[0],
                    ring.len()
                )))
            }
        };
        *motifs.entry(motif).or_default() += 1;
        match pick {
            Some(p) => {
                chosen.insert(p);
                concave.extend(reflex_corners(&ring, &big));
            }
            None => hexagons.push((ring, qs)),
        }
    }
    // the hexagon vertex whose thin rhombi cap the concave corners of the
    // neighbouring boats and stars
    for (ring, qs) in hexagons {
        let corners: FxHashSet<IndexVector> = ring.iter().copied().collect();
        let score = |q: &IndexVector| {
            let mut vs = corners.clone();
            vs.insert(*q);
            faces_on(&vs, &big)
                .into_iter()
                .filter(|f| !f.is_thick())
                .filter_map(|f| {
                    let c = f.corners(&big);
                    let i = c.iter().position(|x| x == q)?;
                    Some(concave.contains(&c[(i + 2) % 4]) as usize)
                })
                .sum::<usize>()
        };
        let (s0, s1) = (score(&qs[0]), score(&qs[1]));
        if s0 == s1 {
            // neighbours of hexagons near the rim may be missing
            let p = ring[0].phys();
            let d = (p[0] - t.center[0]).hypot(p[1] - t.center[1]);
            if d < t.radius - MARGIN * t.edge_length() - 4.0 * big.length() {
                return Err(Error::Consistency(format!(
                    "hexagon at {:?}: both interior vertices cap {s0} concave corners",
                    ring[0]
                )));
            }
            continue;
        }
        chosen.insert(if s0 > s1 { qs[0] } else { qs[1] });
    }
    let radius = t.radius - MARGIN * t.edge_length() - 2.0 * big.length();
    let out = Tiling::from_faces(Family::P3, t.scale_exp + 2, t.offset, t.center, radius, faces_on(&chosen, &big));
    Ok((out, motifs))
}

/// Standard substitution of a τ²-scaled P3 patch (from [`p4_to_p3_tau2`]) into
/// its τ-scaled companion.
pub fn deflate_p3(t: &Tiling) -> Result<Tiling> {
    if t.family != Family::P3 {
        return Err(Error::InvalidArgument("deflate_p3 needs a P3 tiling".into()));
    }
    let mut keys = p3_decorations(t);
    keep_within(&mut keys, t, t.radius);
    let faces = p3_table().apply(t, &keys)?.into_iter().map(|(f, _)| f).collect();
    Ok(Tiling::from_faces(Family::P3, t.scale_exp - 1, t.offset, t.center, t.radius - t.edge_length(), faces))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_matrix() {
        let s = ScalingMap::default();
        assert!(s.residual() < 1e-12);
        for i in 0..5 {
            assert_eq!(s.matrix[i].iter().sum::<i64>(), -2);
            assert_eq!(s.matrix[i][(i + 2) % 5], -1);
        }
        assert_eq!(hyper_scale(&IndexVector::origin()), IndexVector::origin());
        let v = hyper_scale(&IndexVector([1, 0, 0, 0, 0]));
        assert_eq!(v, IndexVector([1, 1, 0, 0, 1]));
        assert_eq!(v.level(), 3);
        assert_eq!(s.apply(&IndexVector([1, 0, 0, 0, 0])), v);
    }

    #[test]
    fn hyper_scale_geometry() {
        for raw in [[1, 0, 2, 0, 0], [3, -1, 0, 2, 1], [0, 0, 0, 1, -4]] {
            let n = canonicalize(raw);
            let m = hyper_scale(&n);
            let (p, q) = (n.phys(), m.phys());
            assert!((q[0] - TAU * p[0]).abs() < 1e-9 && (q[1] - TAU * p[1]).abs() < 1e-9);
            assert_eq!(m.perp(), n.perp().scale(GoldenNumber::from_ints(1, -1)));
            assert_eq!(m.level() as i64, (-2 * n.level() as i64).rem_euclid(5));
        }
    }

    #[test]
    fn synthetic_eigen() {
        let (l, v) = leading_eigen(&[[1.0; 6]; 6]);
        assert!((l - 6.0).abs() < 1e-12);
        assert!(v.iter().all(|x| (x - 1.0).abs() < 1e-12));
        // a 6-cycle with one chord: eigenvector of a companion-like matrix
        let mut m = [[0.0; 6]; 6];
        for i in 0..6 {
            m[i][(i + 1) % 6] = 1.0;
        }
        m[0][0] = 1.0;
        let (l, v) = leading_eigen(&m);
        let w: Vec<f64> = (0..6).map(|i| (0..6).map(|j| m[i][j] * v[j]).sum()).collect();
        assert!(l > 1.0 && (0..6).all(|i| (w[i] - l * v[i]).abs() < 1e-9));
    }
}
