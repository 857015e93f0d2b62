//! Cut-and-project generation and the local P1 → P4 derivation.

use std::sync::OnceLock;

use rustc_hash::{FxHashMap, FxHashSet};

use super::{Edges, Face, Tiling};
use crate::error::{Error, Result};
use crate::golden::{apply_scaling, canonicalize, phys_f64, Basis, IndexVector, PerpVector};
use crate::labels::Family;
use crate::windows::{lattice_windows, windows, CompiledWindows, GoldenPolygon};

/// Extra reach of the vertex search beyond the requested radius, in edge
/// lengths, so that every face meeting the disc is complete.
const REACH: f64 = 3.0;

/// An accepted lattice point close to `center`, found by rounding the lift of
/// `center` and scanning a small box around it.
fn find_start(accept: &CompiledWindows, center: [f64; 2], offset: &PerpVector, level0: bool) -> Result<IndexVector> {
    let b = Basis::get();
    let g = offset.to_f64();
    let mut best: Option<(f64, IndexVector)> = None;
    for t in 0..5 {
        let base: [i64; 5] = std::array::from_fn(|j| {
            let x = center[0] * b.phys[j][0] + center[1] * b.phys[j][1] + g[0] * b.perp[j][0] + g[1] * b.perp[j][1];
            (0.4 * x + t as f64 / 5.0).round() as i64
        });
        for code in 0..7i64.pow(5) {
            let mut raw = base;
            let mut c = code;
            for r in raw.iter_mut() {
                *r += c % 7 - 3;
                c /= 7;
            }
            let n = canonicalize(raw);
            if level0 && n.level() != 0 {
                continue;
            }
            if accept.accepts(&n)? {
                let p = n.phys();
                let d = (p[0] - center[0]).hypot(p[1] - center[1]);
                if best.as_ref().is_none_or(|(bd, bn)| d < *bd || (d == *bd && n < *bn)) {
                    best = Some((d, n));
                }
            }
        }
    }
    best.map(|(_, n)| n).ok_or_else(|| Error::Consistency("no accepted lattice point near the patch centre".into()))
}

/// Every accepted point reachable from a start point through `steps` while
/// staying within `reach` of `center`.
fn flood(
    accept: &CompiledWindows,
    steps: &[[i64; 5]],
    center: [f64; 2],
    reach: f64,
    offset: &PerpVector,
    level0: bool,
) -> Result<FxHashSet<IndexVector>> {
    let start = find_start(accept, center, offset, level0)?;
    let mut seen = FxHashSet::default();
    seen.insert(start);
    let mut stack = vec![start];
    let r2 = reach * reach;
    while let Some(n) = stack.pop() {
        for d in steps {
            let m = n.offset(d);
            if seen.contains(&m) {
                continue;
            }
            let p = m.phys();
            if (p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2) > r2 {
                continue;
            }
            if accept.accepts(&m)? {
                seen.insert(m);
                stack.push(m);
            }
        }
    }
    Ok(seen)
}

/// All rhombi whose four corners are vertices.
pub(crate) fn quad_faces(vertices: &FxHashSet<IndexVector>, edges: &Edges) -> Vec<Face> {
    let mut faces = Vec::new();
    for n in vertices {
        for j in 0..5u8 {
            let a = n.offset(&edges.e[j as usize]);
            if !vertices.contains(&a) {
                continue;
            }
            for k in j + 1..5 {
                let ek = &edges.e[k as usize];
                if vertices.contains(&n.offset(ek)) && vertices.contains(&a.offset(ek)) {
                    faces.push(Face::new(*n, j, k));
                }
            }
        }
    }
    faces
}

/// Cut-and-project patch with explicit windows given per lattice level (already
/// in the lattice frame) and edges of scale `τˢ`.
pub fn generate_with_windows(
    family: Family,
    lattice: &[Option<GoldenPolygon>],
    radius: f64,
    scale_exp: u32,
    offset: PerpVector,
    center: [f64; 2],
) -> Result<Tiling> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    let accept = CompiledWindows::from_lattice(lattice, &offset);
    let edges = Edges::new(scale_exp);
    let reach = radius + REACH * edges.length();
    let verts = flood(&accept, &edges.steps(), center, reach, &offset, false)?;
    let faces = quad_faces(&verts, &edges);
    Ok(Tiling::from_faces(family, scale_exp, offset, center, radius, faces))
}

/// Cut-and-project patch of a family at edge length `τˢ`.
pub fn generate(family: Family, radius: f64, scale_exp: u32, offset: PerpVector, center: [f64; 2]) -> Result<Tiling> {
    let lat = lattice_windows(&windows(family), scale_exp);
    generate_with_windows(family, &lat, radius, scale_exp, offset, center)
}

/// P3 patch of radius `radius` around the origin.
pub fn generate_p3(radius: f64, scale_exp: u32, offset: PerpVector) -> Result<Tiling> {
    generate(Family::P3, radius, scale_exp, offset, [0.0, 0.0])
}

/// P4 patch via window acceptance with the windmill windows.
pub fn generate_p4_windowed(radius: f64, scale_exp: u32, offset: PerpVector, center: [f64; 2]) -> Result<Tiling> {
    generate(Family::P4, radius, scale_exp, offset, center)
}

/// The P1 pentagon tiling as a graph on the level-0 vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct P1Graph {
    pub scale_exp: u32,
    pub offset: PerpVector,
    pub center: [f64; 2],
    pub radius: f64,
    /// Sorted.
    pub nodes: Vec<IndexVector>,
    /// `(n, j)`: an edge from `n` to `n + Eⱼ − Eⱼ₊₂`. Sorted.
    pub edges: Vec<(IndexVector, u8)>,
}

/// Unit-scale diagonal `eⱼ − eⱼ₊₂`.
fn diag_unit(j: usize) -> [i64; 5] {
    let mut v = [0i64; 5];
    v[j] += 1;
    v[(j + 2) % 5] -= 1;
    v
}

fn scale_vec(v: &[i64; 5], s: u32) -> [i64; 5] {
    let mut v = *v;
    for _ in 0..s {
        v = apply_scaling(&v);
    }
    v
}

/// For each diagonal direction `j`, the configurations `(δ, j₂)` in which the
/// segment from `δ` along diagonal `j₂` properly crosses the segment from 0
/// along diagonal `j`.
fn crossing_table() -> &'static [Vec<([i64; 5], u8)>; 5] {
    static TABLE: OnceLock<[Vec<([i64; 5], u8)>; 5]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut deltas = Vec::new();
        for code in 0..7i64.pow(5) {
            let mut c = code;
            let d: [i64; 5] = std::array::from_fn(|_| {
                let v = c % 7 - 3;
                c /= 7;
                v
            });
            if d.iter().sum::<i64>() == 0 {
                deltas.push(d);
            }
        }
        std::array::from_fn(|j| {
            let a = phys_f64(&diag_unit(j));
            let mut out = Vec::new();
            for d in &deltas {
                let p = phys_f64(d);
                for j2 in 0..5 {
                    let q = phys_f64(&diag_unit(j2));
                    let r = [p[0] + q[0], p[1] + q[1]];
                    if proper_cross([0.0, 0.0], a, p, r) {
                        out.push((*d, j2 as u8));
                    }
                }
            }
            out
        })
    })
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn proper_cross(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    const EPS: f64 = 1e-9;
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    ((o1 > EPS && o2 < -EPS) || (o1 < -EPS && o2 > EPS)) && ((o3 > EPS && o4 < -EPS) || (o3 < -EPS && o4 > EPS))
}

/// P1 graph from the decagon window: level-0 points, joined along the five
/// diagonal directions unless the candidate is crossed by another candidate.
pub fn p1_graph(radius: f64, scale_exp: u32, offset: PerpVector, center: [f64; 2]) -> Result<P1Graph> {
    let unit = windows(Family::P4);
    let mut lat = lattice_windows(&unit, scale_exp);
    for w in lat.iter_mut().skip(1) {
        *w = None;
    }
    let accept = CompiledWindows::from_lattice(&lat, &offset);
    let edges = Edges::new(scale_exp);
    let diag: [[i64; 5]; 5] = std::array::from_fn(|j| scale_vec(&diag_unit(j), scale_exp));
    let mut steps: Vec<[i64; 5]> = diag.to_vec();
    steps.extend(diag.iter().map(|d| d.map(|c| -c)));
    // candidates are judged against partners up to two diagonals away
    let reach = radius + (REACH + 4.0) * edges.length();
    let nodes = flood(&accept, &steps, center, reach, &offset, true)?;
    let judged = radius + REACH * edges.length();

    let mut cand: FxHashSet<(IndexVector, u8)> = FxHashSet::default();
    for n in &nodes {
        let p = n.phys();
        if (p[0] - center[0]).hypot(p[1] - center[1]) > judged + 2.0 * edges.length() {
            continue;
        }
        for (j, d) in diag.iter().enumerate() {
            if nodes.contains(&n.offset(d)) {
                cand.insert((*n, j as u8));
            }
        }
    }
    let table = crossing_table();
    let scaled: [Vec<([i64; 5], u8)>; 5] =
        std::array::from_fn(|j| table[j].iter().map(|(d, j2)| (scale_vec(d, scale_exp), *j2)).collect());
    let inside = |v: &IndexVector| {
        let p = v.phys();
        (p[0] - center[0]).hypot(p[1] - center[1]) <= judged
    };
    let mut kept: Vec<(IndexVector, u8)> = cand
        .iter()
        .filter(|(n, j)| inside(n) && inside(&n.offset(&diag[*j as usize])))
        .filter(|(n, j)| !scaled[*j as usize].iter().any(|(d, j2)| cand.contains(&(n.offset(d), *j2))))
        .copied()
        .collect();
    kept.sort_unstable();
    let mut nodes: Vec<IndexVector> = nodes.into_iter().collect();
    nodes.sort_unstable();
    Ok(P1Graph { scale_exp, offset, center, radius, nodes, edges: kept })
}

/// One thin rhombus on every P1 edge (acute corners at the edge ends), then
/// the remaining holes filled with thick rhombi.
pub fn p1_to_p4(g: &P1Graph) -> Result<Tiling> {
    let edges = Edges::new(g.scale_exp);
    let mut thin = Vec::with_capacity(g.edges.len());
    for (n, j) in &g.edges {
        let j = *j as usize;
        let k = (j + 2) % 5;
        let anchor = n.offset(&edges.e[k].map(|c| -c));
        thin.push(Face::new(anchor, j.min(k) as u8, j.max(k) as u8));
    }
    let holes = trace_holes(&thin, &edges)?;
    let fringe = g.radius + (REACH - 1.0) * edges.length();
    let within = |v: &IndexVector| {
        let p = v.phys();
        (p[0] - g.center[0]).hypot(p[1] - g.center[1]) <= fringe
    };
    let mut faces = thin;
    for h in holes {
        // holes reaching past the reliable region may be open or spurious
        if h.iter().all(within) {
            faces.extend(fill_hole(h, &edges)?);
        }
    }
    let edges_ref = &edges;
    faces.retain(|f| f.corners(edges_ref).iter().all(within));
    Ok(Tiling::from_faces(Family::P4, g.scale_exp, g.offset, g.center, g.radius, faces))
}

/// Boundary cycles of the holes left between thin rhombi, counter-clockwise.
fn trace_holes(thin: &[Face], edges: &Edges) -> Result<Vec<Vec<IndexVector>>> {
    let mut directed: FxHashSet<(IndexVector, IndexVector)> = FxHashSet::default();
    for f in thin {
        let c = f.corners(edges);
        for i in 0..4 {
            directed.insert((c[i], c[(i + 1) % 4]));
        }
    }
    // hole boundary edges run against the unmatched thin edges
    let mut out_edges: FxHashMap<IndexVector, Vec<IndexVector>> = FxHashMap::default();
    for (a, b) in &directed {
        if !directed.contains(&(*b, *a)) {
            out_edges.entry(*b).or_default().push(*a);
        }
    }
    let mut starts: Vec<(IndexVector, IndexVector)> =
        out_edges.iter().flat_map(|(s, ts)| ts.iter().map(move |t| (*s, *t))).collect();
    starts.sort_unstable();
    let mut used: FxHashSet<(IndexVector, IndexVector)> = FxHashSet::default();
    let mut cycles = Vec::new();
    for (s, t) in starts {
        if used.contains(&(s, t)) {
            continue;
        }
        let mut cyc = vec![s];
        let mut cur = (s, t);
        let mut closed = false;
        for _ in 0..40 {
            used.insert(cur);
            let (a, b) = cur;
            if b == s {
                closed = true;
                break;
            }
            cyc.push(b);
            let back = edges.dir(&b, &a).expect("hole edges are lattice edges");
            let next = out_edges
                .get(&b)
                .into_iter()
                .flatten()
                .filter(|c| !used.contains(&(b, **c)))
                .max_by_key(|c| {
                    let d = edges.dir(&b, c).expect("hole edges are lattice edges");
                    match (d + 10 - back) % 10 {
                        0 => 10,
                        x => x,
                    }
                });
            match next {
                Some(c) => cur = (b, *c),
                None => break,
            }
        }
        if closed && cyc.len() <= 10 && ring_area(&cyc) > 0.0 {
            cycles.push(cyc);
        }
    }
    Ok(cycles)
}

fn ring_area(c: &[IndexVector]) -> f64 {
    let p: Vec<[f64; 2]> = c.iter().map(|v| v.phys()).collect();
    let n = p.len();
    (0..n).map(|i| p[i][0] * p[(i + 1) % n][1] - p[(i + 1) % n][0] * p[i][1]).sum::<f64>() / 2.0
}

/// Fills a counter-clockwise hole with thick rhombi: at any corner of 72° or
/// 108° the rhombus on its two edges is forced; cut it off and repeat.
fn fill_hole(mut c: Vec<IndexVector>, edges: &Edges) -> Result<Vec<Face>> {
    let mut out = Vec::new();
    while !c.is_empty() {
        let n = c.len();
        let mut placed = false;
        for i in 0..n {
            let p = c[i];
            let a = c[(i + n - 1) % n];
            let b = c[(i + 1) % n];
            let (da, db) = match (edges.dir(&p, &a), edges.dir(&p, &b)) {
                (Some(x), Some(y)) => (x, y),
                _ => return Err(Error::Consistency(format!("hole boundary at {p:?} is not made of edges"))),
            };
            let interior = (da + 10 - db) % 10;
            if interior == 2 || interior == 3 {
                let face = Face::at_corner(&p, db, da, edges);
                let q = a.offset(&b.diff(&p));
                out.push(face);
                c[i] = q;
                cancel_spikes(&mut c);
                placed = true;
                break;
            }
        }
        if !placed {
            let ring: Vec<String> = c.iter().map(|v| format!("{v:?}")).collect();
            return Err(Error::Consistency(format!("hole cannot be filled with thick rhombi: {}", ring.join(" "))));
        }
    }
    Ok(out)
}

/// Removes back-and-forth spikes `… x, y, x …` from a ring.
fn cancel_spikes(c: &mut Vec<IndexVector>) {
    loop {
        let m = c.len();
        if m <= 2 {
            c.clear();
            return;
        }
        let hit = (0..m).find(|&t| c[(t + m - 1) % m] == c[(t + 1) % m]);
        match hit {
            Some(t) => {
                let u = (t + 1) % m;
                let (hi, lo) = if t > u { (t, u) } else { (u, t) };
                c.remove(hi);
                c.remove(lo);
            }
            None => return,
        }
    }
}

/// P4 patch by local derivation from the P1 tiling, cross-checked vertex by
/// vertex against window acceptance on the interior.
pub fn generate_p4(radius: f64, scale_exp: u32, offset: PerpVector) -> Result<Tiling> {
    let t = generate_p4_local(radius, scale_exp, offset, [0.0, 0.0])?;
    let w = generate_p4_windowed(radius, scale_exp, offset, [0.0, 0.0])?;
    let a = t.interior_vertices(crate::tiling::classify::MARGIN);
    let b = w.interior_vertices(crate::tiling::classify::MARGIN);
    if a != b {
        let sa: FxHashSet<_> = a.iter().collect();
        let sb: FxHashSet<_> = b.iter().collect();
        let only_local = sa.difference(&sb).count();
        let only_window = sb.difference(&sa).count();
        return Err(Error::Consistency(format!(
            "local derivation and window acceptance disagree: {only_local} vertices only local, {only_window} only windowed"
        )));
    }
    Ok(t)
}

/// P4 patch by local derivation only.
pub fn generate_p4_local(radius: f64, scale_exp: u32, offset: PerpVector, center: [f64; 2]) -> Result<Tiling> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    let g = p1_graph(radius, scale_exp, offset, center)?;
    p1_to_p4(&g)
}

/// Level-0 vertices and the long diagonals of the thin rhombi.
pub fn p4_to_p1(t: &Tiling) -> P1Graph {
    let edges = t.edges();
    let nodes: Vec<IndexVector> = t.vertices.iter().copied().filter(|v| v.level() == 0).collect();
    let diag: Vec<IndexVector> = (0..5).map(|j| canonicalize(scale_vec(&diag_unit(j), t.scale_exp))).collect();
    let mut out = Vec::new();
    for f in t.faces.iter().filter(|f| !f.is_thick()) {
        let c = f.corners(&edges);
        // acute corners are the odd positions of a thin face
        let (p, q) = (c[1], c[3]);
        let (p, q) = if p < q { (p, q) } else { (q, p) };
        for (from, to) in [(p, q), (q, p)] {
            if let Some(j) = diag.iter().position(|d| canonicalize(to.diff(&from)) == *d) {
                out.push((from, j as u8));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    P1Graph { scale_exp: t.scale_exp, offset: t.offset, center: t.center, radius: t.radius, nodes, edges: out }
}
