//! The dual grid of a P4 patch: five families of lines through the centres of
//! thin rhombi, their ℓ₃-pairs and active segments, and the Ammann bar grid
//! the lines sit on.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::golden::{GoldenNumber, GoldenVector, IndexVector};
use crate::labels::Family;
use crate::tiling::{Edges, Face, Tiling, MARGIN};

/// Longest dual-line gap of a unit-edge P4 tiling, `(1 + 3τ)/2 = τ²·√5/2`.
///
/// Read off generated patches (the three gaps are `√5/2·τ²`, `√5/2·τ` and
/// `√5/2`); the regression test in this module keeps it honest.
pub fn ell1() -> GoldenNumber {
    GoldenNumber::from_fracs(1, 2, 3, 2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Gap {
    L1,
    L2,
    L3,
}

impl Gap {
    /// Length at scale `τˢ`.
    pub fn value(self, scale_exp: u32) -> GoldenNumber {
        let k = match self {
            Gap::L1 => 0,
            Gap::L2 => -1,
            Gap::L3 => -2,
        };
        ell1() * GoldenNumber::tau_pow(scale_exp as i32 + k)
    }

    fn label(g: GoldenNumber, scale_exp: u32, allowed: &[Gap]) -> Option<Gap> {
        allowed.iter().copied().find(|x| x.value(scale_exp) == g)
    }
}

/// Parallel lines `{x : x·eⱼ = c}`, sorted by offset `c`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LineFamily {
    pub direction: u8,
    pub offsets: Vec<GoldenNumber>,
    /// `gaps[i]` lies between `offsets[i]` and `offsets[i + 1]`.
    pub gaps: Vec<Gap>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LineRole {
    Isolated,
    PairLow,
    PairHigh,
}

impl LineFamily {
    pub fn normal(&self) -> GoldenVector {
        GoldenVector::unit(self.direction as i64)
    }

    pub fn role(&self, i: usize) -> LineRole {
        if i < self.gaps.len() && self.gaps[i] == Gap::L3 {
            LineRole::PairLow
        } else if i > 0 && self.gaps[i - 1] == Gap::L3 {
            LineRole::PairHigh
        } else {
            LineRole::Isolated
        }
    }

    /// Index of the lower line of every ℓ₃-pair.
    pub fn pairs(&self) -> Vec<usize> {
        (0..self.gaps.len()).filter(|&i| self.gaps[i] == Gap::L3).collect()
    }

    pub fn index_of(&self, c: &GoldenNumber) -> Option<usize> {
        self.offsets.binary_search(c).ok()
    }

    fn to_json(&self) -> Value {
        json!({ "direction": self.direction, "offsets": self.offsets, "gaps": self.gaps })
    }
}

/// Part of a dual line that carries rhombi, oriented by increasing
/// [`along`] coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Segment {
    pub line: usize,
    pub from: GoldenVector,
    pub to: GoldenVector,
}

/// A type-c rhombus where the ℓ₃-pair of family `family` changes lines:
/// active up to `exit`, then from `entry` on the other line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Switch {
    pub face: Face,
    pub family: u8,
    pub exit: GoldenVector,
    pub entry: GoldenVector,
}

#[derive(Clone, Debug)]
pub struct DualGrid {
    pub scale_exp: u32,
    /// Lines are only kept where they cross the patch well inside.
    pub center: [f64; 2],
    pub reach: f64,
    pub families: Vec<LineFamily>,
    /// Per family, the lower line index of each ℓ₃-pair.
    pub pairs: Vec<Vec<usize>>,
    /// Per family, active segments of every line (isolated lines included).
    pub active: Vec<Vec<Segment>>,
    pub switches: Vec<Switch>,
    /// Chains of pair segments joined where they change family.
    pub folded: Vec<Vec<GoldenVector>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AmmannGrid {
    pub scale_exp: u32,
    pub families: Vec<LineFamily>,
}

/// Coordinate along the lines of family `j` (in units of sin 36°).
pub fn along(j: u8, x: &GoldenVector) -> GoldenNumber {
    GoldenVector::unit(j as i64).cross(x)
}

/// The point with `x·a = ca` and `x·b = cb`.
fn meet(a: &GoldenVector, ca: GoldenNumber, b: &GoldenVector, cb: GoldenNumber) -> Option<GoldenVector> {
    let (f0, f1) = (GoldenVector::unit(0), GoldenVector::unit(1));
    let (a0, a1, b0, b1) = (f0.dot(a), f1.dot(a), f0.dot(b), f1.dot(b));
    let det = a0 * b1 - a1 * b0;
    if det.is_zero() {
        return None;
    }
    Some(GoldenVector::new((ca * b1 - a1 * cb) / det, (a0 * cb - ca * b0) / det))
}

/// Where the line `x·n = c` crosses a convex polygon, ordered along family `j`.
fn chord(poly: &[GoldenVector], j: u8, n: &GoldenVector, c: GoldenNumber) -> Option<(GoldenVector, GoldenVector)> {
    let mut pts: Vec<GoldenVector> = Vec::new();
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        let (dp, dq) = (p.dot(n) - c, q.dot(n) - c);
        if dp.is_zero() {
            pts.push(p);
        } else if dp.sign() * dq.sign() < 0 {
            let s = dp / (dp - dq);
            pts.push(p + (q - p).scale(s));
        }
    }
    pts.sort_by_key(|x| along(j, x));
    pts.dedup();
    match pts.as_slice() {
        [a, .., b] if a != b => Some((*a, *b)),
        _ => None,
    }
}

fn corners_exact(f: &Face, e: &Edges) -> Vec<GoldenVector> {
    f.corners(e).iter().map(|c| c.phys_exact()).collect()
}

fn near(t: &Tiling, p: [f64; 2], r: f64) -> bool {
    (p[0] - t.center[0]).hypot(p[1] - t.center[1]) < r
}

fn reach(t: &Tiling) -> f64 {
    t.radius - MARGIN * t.edge_length()
}

/// One family of dual lines: a line normal to each of the two edge classes
/// of every thin rhombus, through its centre. A pair line whose own thin
/// rhombi all lie outside the patch is recovered from the type-c rhombi
/// halfway between it and its partner.
fn family_lines(t: &Tiling, j: u8, r: f64) -> Result<LineFamily> {
    let e = t.edges();
    let n = GoldenVector::unit(j as i64);
    let nf = n.to_f64();
    let mid = t.center[0] * nf[0] + t.center[1] * nf[1];
    let l3 = Gap::L3.value(t.scale_exp);
    let mut offsets: BTreeSet<GoldenNumber> = BTreeSet::new();
    for worm in worms(t, j, r) {
        let offs: Vec<GoldenNumber> = worm.iter().map(|f| f.center_exact(&e).dot(&n)).collect();
        let thin: BTreeSet<GoldenNumber> =
            worm.iter().zip(&offs).filter(|(f, _)| !f.is_thick()).map(|(_, c)| *c).collect();
        for (f, c) in worm.iter().zip(&offs) {
            for l in thin.iter().filter(|_| f.is_thick()) {
                if *c - *l == l3 / 2 || *l - *c == l3 / 2 {
                    offsets.insert(*c + (*c - *l));
                }
            }
        }
        offsets.extend(thin);
    }
    offsets.retain(|c| (c.to_f64() - mid).abs() < r / 2.0);
    let offsets: Vec<GoldenNumber> = offsets.into_iter().collect();
    let mut gaps = Vec::with_capacity(offsets.len().saturating_sub(1));
    for w in offsets.windows(2) {
        let g = w[1] - w[0];
        let label = Gap::label(g, t.scale_exp, &[Gap::L1, Gap::L2, Gap::L3])
            .ok_or_else(|| Error::Consistency(format!("family {j}: gap {g} is none of l1, l2, l3")))?;
        if label == Gap::L3 && gaps.last() == Some(&Gap::L3) {
            return Err(Error::Consistency(format!("family {j}: two l3 gaps in a row near {}", w[0])));
        }
        gaps.push(label);
    }
    Ok(LineFamily { direction: j, offsets, gaps })
}

/// The five families of lines through thin-rhombus centres, with gaps
/// labelled `ℓ₁`, `ℓ₂`, `ℓ₃`. Active segments are filled in by
/// [`active_segments`].
pub fn p4_dual_lines(t: &Tiling) -> Result<DualGrid> {
    if t.family != Family::P4 {
        return Err(Error::InvalidArgument("the dual grid is defined for P4 tilings".into()));
    }
    let r = reach(t);
    let families = (0..5u8).into_par_iter().map(|j| family_lines(t, j, r)).collect::<Result<Vec<_>>>()?;
    let pairs = families.iter().map(|f| f.pairs()).collect();
    Ok(DualGrid {
        scale_exp: t.scale_exp,
        center: t.center,
        reach: r,
        families,
        pairs,
        active: vec![Vec::new(); 5],
        switches: Vec::new(),
        folded: Vec::new(),
    })
}

/// Rhombi with an edge of class `j` near the centre, grouped into chains
/// linked through those edges and ordered along the family.
pub fn worms(t: &Tiling, j: u8, r: f64) -> Vec<Vec<Face>> {
    let e = t.edges();
    let members: Vec<Face> =
        t.faces.iter().copied().filter(|f| (f.j == j || f.k == j) && near(t, f.center(&e), r)).collect();
    let mut by_edge: FxHashMap<IndexVector, Vec<usize>> = FxHashMap::default();
    for (i, f) in members.iter().enumerate() {
        let other = if f.j == j { f.k } else { f.j };
        by_edge.entry(f.anchor).or_default().push(i);
        by_edge.entry(f.anchor.offset(&e.e[other as usize])).or_default().push(i);
    }
    let mut parent: Vec<usize> = (0..members.len()).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for v in by_edge.values() {
        if let [a, b] = v[..] {
            let (a, b) = (find(&mut parent, a), find(&mut parent, b));
            parent[a] = b;
        }
    }
    let mut groups: BTreeMap<usize, Vec<Face>> = BTreeMap::new();
    for (i, f) in members.iter().enumerate() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(*f);
    }
    groups
        .into_values()
        .map(|mut w| {
            w.sort_by_cached_key(|f| along(j, &f.center_exact(&e)));
            w
        })
        .collect()
}

struct FamilyActive {
    segments: Vec<Segment>,
    switches: Vec<Switch>,
}

fn merge_pieces(pieces: Vec<(usize, GoldenVector, GoldenVector)>) -> Vec<Segment> {
    let mut out: Vec<Segment> = Vec::new();
    for (line, from, to) in pieces {
        match out.last_mut() {
            Some(s) if s.line == line && s.to == from => s.to = to,
            _ => out.push(Segment { line, from, to }),
        }
    }
    out
}

fn family_active(t: &Tiling, d: &DualGrid, j: u8) -> Result<FamilyActive> {
    let e = t.edges();
    let fam = &d.families[j as usize];
    let n = fam.normal();
    let l3 = Gap::L3.value(d.scale_exp);
    let half = l3 / 2;
    let mut segments = Vec::new();
    let mut switches = Vec::new();
    for worm in worms(t, j, d.reach) {
        let offs: Vec<GoldenNumber> = worm.iter().map(|f| f.center_exact(&e).dot(&n)).collect();
        let thin: BTreeSet<GoldenNumber> =
            worm.iter().zip(&offs).filter(|(f, _)| !f.is_thick()).map(|(_, c)| *c).collect();
        let Some(idx) = thin.iter().map(|c| fam.index_of(c)).collect::<Option<BTreeSet<usize>>>() else {
            continue;
        };
        let Some(&first) = idx.iter().next() else { continue };
        let lines: Vec<usize> = match fam.role(first) {
            LineRole::Isolated => vec![first],
            LineRole::PairLow => vec![first, first + 1],
            LineRole::PairHigh => vec![first - 1, first],
        };
        if !idx.iter().all(|i| lines.contains(i)) {
            return Err(Error::Consistency(format!("family {j}: one rhombus array carries lines {idx:?}")));
        }
        if lines.len() == 1 {
            let c = fam.offsets[first];
            let mut pieces = Vec::new();
            for f in &worm {
                let (a, b) = chord(&corners_exact(f, &e), j, &n, c)
                    .ok_or_else(|| Error::Consistency(format!("family {j}: line {c} misses {f:?} of its array")))?;
                pieces.push((first, a, b));
            }
            segments.extend(merge_pieces(pieces));
            continue;
        }
        let (lo, hi) = (fam.offsets[lines[0]], fam.offsets[lines[1]]);
        let mid = (lo + hi) / 2;
        let mut side: Option<usize> = None;
        let mut pieces = Vec::new();
        for (f, c) in worm.iter().zip(&offs) {
            let poly = corners_exact(f, &e);
            let line_chord = |s: usize| {
                let off = fam.offsets[lines[s]];
                chord(&poly, j, &n, off)
                    .ok_or_else(|| Error::Consistency(format!("family {j}: line {off} misses {f:?} of its array")))
            };
            if *c != mid {
                let s = usize::from((*c - lo).abs() > (*c - hi).abs());
                if side.is_some_and(|x| x != s) {
                    return Err(Error::Consistency(format!("family {j}: active line changes inside {f:?}")));
                }
                side = Some(s);
                let (a, b) = line_chord(s)?;
                pieces.push((lines[s], a, b));
                continue;
            }
            let Some(s) = side else { continue };
            // the four lines of the two pairs bound a small rhombus; its
            // obtuse corners are where the active line changes
            let k = if f.j == j { f.k } else { f.j };
            let m = GoldenVector::unit(k as i64);
            let mk = f.center_exact(&e).dot(&m);
            let corner = |sj: i64, sk: i64| meet(&n, mid + half * sj, &m, mk + half * sk).expect("lines are not parallel");
            let (pp, mm, pm, mp) = (corner(1, 1), corner(-1, -1), corner(1, -1), corner(-1, 1));
            let (on_lo, on_hi) =
                if (pp - mm).norm2() < (pm - mp).norm2() { (mm, pp) } else { (mp, pm) };
            let (exit, entry) = if s == 0 { (on_lo, on_hi) } else { (on_hi, on_lo) };
            let (a, _) = line_chord(s)?;
            let (_, b) = line_chord(1 - s)?;
            let t = |x: &GoldenVector| along(j, x);
            if !(t(&a) <= t(&exit) && t(&exit) <= t(&entry) && t(&entry) <= t(&b)) {
                return Err(Error::Consistency(format!(
                    "family {j}: active segments of a pair overlap in {f:?}"
                )));
            }
            let kf = &d.families[k as usize];
            let inside = |x: GoldenNumber| kf.offsets.first().is_some_and(|a| *a <= x) && kf.offsets.last().is_some_and(|b| x <= *b);
            if inside(mk - half) && inside(mk + half) {
                let lo_k = kf.index_of(&(mk - half));
                if lo_k.is_none_or(|i| kf.role(i) != LineRole::PairLow) {
                    return Err(Error::Consistency(format!("{f:?} sits on a pair of family {j} only")));
                }
            }
            pieces.push((lines[s], a, exit));
            pieces.push((lines[1 - s], entry, b));
            switches.push(Switch { face: *f, family: j, exit, entry });
            side = Some(1 - s);
        }
        let segs = merge_pieces(pieces);
        let mut last: Option<GoldenNumber> = None;
        for s in &segs {
            if last.is_some_and(|l| along(j, &s.from) < l) {
                return Err(Error::Consistency(format!("family {j}: both lines of a pair active at one place")));
            }
            last = Some(along(j, &s.to));
        }
        segments.extend(segs);
    }
    Ok(FamilyActive { segments, switches })
}

/// Joins pair segments of different families that share an end point.
fn fold(d: &DualGrid) -> Vec<Vec<GoldenVector>> {
    let mut segs: Vec<(GoldenVector, GoldenVector)> = Vec::new();
    for (j, fam) in d.families.iter().enumerate() {
        for s in &d.active[j] {
            if fam.role(s.line) != LineRole::Isolated {
                segs.push((s.from, s.to));
            }
        }
    }
    let mut at: FxHashMap<GoldenVector, Vec<usize>> = FxHashMap::default();
    for (i, (a, b)) in segs.iter().enumerate() {
        at.entry(*a).or_default().push(i);
        at.entry(*b).or_default().push(i);
    }
    let other_end = |i: usize, p: &GoldenVector| if segs[i].0 == *p { segs[i].1 } else { segs[i].0 };
    let next = |i: usize, p: &GoldenVector| at[p].iter().copied().find(|&x| x != i);
    let mut used = vec![false; segs.len()];
    let mut out = Vec::new();
    for start in 0..segs.len() {
        if used[start] {
            continue;
        }
        // walk back to one end of the chain, then forward
        let (mut i, mut p) = (start, segs[start].0);
        while let Some(x) = next(i, &p) {
            if x == start {
                break;
            }
            p = other_end(x, &p);
            i = x;
        }
        let mut chain = vec![p];
        loop {
            used[i] = true;
            p = other_end(i, &p);
            chain.push(p);
            match next(i, &p) {
                Some(x) if !used[x] => i = x,
                _ => break,
            }
        }
        out.push(chain);
    }
    out
}

/// Active segments of every line, the line changes inside type-c rhombi,
/// and the folded chains they form.
pub fn active_segments(t: &Tiling, d: &DualGrid) -> Result<DualGrid> {
    let parts = (0..5u8).into_par_iter().map(|j| family_active(t, d, j)).collect::<Result<Vec<_>>>()?;
    let mut out = d.clone();
    out.active = Vec::with_capacity(5);
    out.switches = Vec::new();
    for p in parts {
        out.active.push(p.segments);
        out.switches.extend(p.switches);
    }
    out.folded = fold(&out);
    Ok(out)
}

impl DualGrid {
    /// Whether `p` lies on an active segment of line `line` of family `j`.
    pub fn is_active(&self, j: u8, line: usize, p: &GoldenVector) -> bool {
        let fam = &self.families[j as usize];
        if p.dot(&fam.normal()) != fam.offsets[line] {
            return false;
        }
        let t = along(j, p);
        self.active[j as usize].iter().any(|s| s.line == line && along(j, &s.from) <= t && t <= along(j, &s.to))
    }

    pub fn to_json(&self) -> Value {
        let families: Vec<Value> = self
            .families
            .iter()
            .enumerate()
            .map(|(j, f)| {
                let mut v = f.to_json();
                v["pairs"] = json!(self.pairs[j]);
                v["active"] = json!(self.active.get(j).cloned().unwrap_or_default());
                v
            })
            .collect();
        json!({
            "unit": GoldenNumber::tau_pow(self.scale_exp as i32),
            "families": families,
            "folded": self.folded,
        })
    }
}

/// Places an Ammann line `ℓ₁/2` either side of every isolated dual line and
/// `ℓ₂/2` either side of every ℓ₃-pair midpoint, and checks that the two
/// rules agree wherever they meet.
pub fn reconstruct_ammann(d: &DualGrid) -> Result<AmmannGrid> {
    let s = d.scale_exp;
    let (l1, l2) = (Gap::L1.value(s), Gap::L2.value(s));
    let mut families = Vec::with_capacity(5);
    for fam in &d.families {
        let n = fam.offsets.len();
        let mut units: Vec<(GoldenNumber, GoldenNumber)> = Vec::new();
        let mut i = 0;
        while i < n {
            match fam.role(i) {
                LineRole::PairLow => {
                    let m = (fam.offsets[i] + fam.offsets[i + 1]) / 2;
                    units.push((m - l2 / 2, m + l2 / 2));
                    i += 2;
                    continue;
                }
                LineRole::PairHigh => unreachable!("pairs are consumed from their lower line"),
                LineRole::Isolated => {
                    // an end line next to an isolated line at distance ℓ₂ is
                    // half of a pair cut off by the patch
                    let lone_end = |nb: Option<usize>, g: Option<Gap>| {
                        g == Some(Gap::L2) && nb.is_some_and(|x| fam.role(x) == LineRole::Isolated)
                    };
                    let cut = (i == 0 && lone_end(Some(1).filter(|_| n > 1), fam.gaps.first().copied()))
                        || (i == n - 1 && lone_end(i.checked_sub(1), fam.gaps.last().copied()));
                    if !cut {
                        let x = fam.offsets[i];
                        units.push((x - l1 / 2, x + l1 / 2));
                    }
                }
            }
            i += 1;
        }
        let mut offsets = Vec::with_capacity(units.len() + 1);
        for (k, (a, b)) in units.iter().enumerate() {
            if k == 0 {
                offsets.push(*a);
            } else if offsets.last() != Some(a) {
                return Err(Error::Consistency(format!(
                    "family {}: Ammann line at {} from one side and {a} from the other",
                    fam.direction,
                    offsets.last().unwrap()
                )));
            }
            offsets.push(*b);
        }
        let mut gaps = Vec::new();
        for w in offsets.windows(2) {
            let g = w[1] - w[0];
            gaps.push(Gap::label(g, s, &[Gap::L1, Gap::L2]).ok_or_else(|| {
                Error::Consistency(format!("family {}: Ammann gap {g} is neither l1 nor l2", fam.direction))
            })?);
        }
        if !is_fibonacci_word(&gaps) {
            return Err(Error::Consistency(format!("family {}: Ammann gaps are not a Fibonacci word", fam.direction)));
        }
        families.push(LineFamily { direction: fam.direction, offsets, gaps });
    }
    Ok(AmmannGrid { scale_exp: s, families })
}

/// No two short gaps and no three long gaps in a row.
pub fn is_fibonacci_word(gaps: &[Gap]) -> bool {
    !gaps.windows(2).any(|w| w == [Gap::L2, Gap::L2]) && !gaps.windows(3).any(|w| w == [Gap::L1, Gap::L1, Gap::L1])
}

impl AmmannGrid {
    /// Whether every family has lines on both sides of the points.
    pub fn covers(&self, pts: &[GoldenVector]) -> bool {
        self.families.iter().all(|f| {
            let n = f.normal();
            let (Some(a), Some(b)) = (f.offsets.first(), f.offsets.last()) else { return false };
            pts.iter().all(|p| {
                let c = p.dot(&n);
                *a < c && c < *b
            })
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "unit": GoldenNumber::tau_pow(self.scale_exp as i32),
            "families": self.families.iter().map(|f| f.to_json()).collect::<Vec<_>>(),
        })
    }
}

/// Where bar segments meet the boundary of a rhombus: per segment, its two
/// end points as (edge, fraction along the edge), edges numbered from a
/// corner of the rhombus.
pub type BarPattern = Vec<[(u8, GoldenNumber); 2]>;

/// Bar segments inside a convex rhombus, normalised over its four symmetries
/// so that congruent decorations compare equal.
pub fn bar_pattern(corners: &[GoldenVector; 4], grid: &AmmannGrid) -> BarPattern {
    let mut chords = Vec::new();
    for fam in &grid.families {
        let n = fam.normal();
        let proj: Vec<GoldenNumber> = corners.iter().map(|c| c.dot(&n)).collect();
        let (lo, hi) = (*proj.iter().min().unwrap(), *proj.iter().max().unwrap());
        let start = fam.offsets.partition_point(|c| *c <= lo);
        for c in fam.offsets[start..].iter().take_while(|c| **c < hi) {
            if let Some(ch) = chord(corners, fam.direction, &n, *c) {
                chords.push(ch);
            }
        }
    }
    let mut best: Option<BarPattern> = None;
    for (first, step) in [(0usize, 1usize), (2, 1), (0, 3), (2, 3)] {
        let order: Vec<GoldenVector> = (0..4).map(|i| corners[(first + step * i) % 4]).collect();
        let locate = |p: &GoldenVector| -> (u8, GoldenNumber) {
            for i in 0..4 {
                let (a, b) = (order[i], order[(i + 1) % 4]);
                let (ab, ap) = (b - a, *p - a);
                if ab.cross(&ap).is_zero() {
                    let s = ap.dot(&ab) / ab.norm2();
                    if s.sign() >= 0 && s < GoldenNumber::one() {
                        return (i as u8, s);
                    }
                }
            }
            unreachable!("chord ends lie on the boundary")
        };
        let mut pat: BarPattern = chords
            .iter()
            .map(|(a, b)| {
                let mut ends = [locate(a), locate(b)];
                ends.sort();
                ends
            })
            .collect();
        pat.sort();
        if best.as_ref().is_none_or(|b| pat < *b) {
            best = Some(pat);
        }
    }
    best.unwrap_or_default()
}

/// The bar pattern of every face near the centre, grouped by `label`; a
/// label whose faces disagree is an error.
pub fn decorations<L: Ord + Copy + std::fmt::Debug>(
    t: &Tiling,
    grid: &AmmannGrid,
    r: f64,
    label: impl Fn(&Face) -> Result<L>,
) -> Result<BTreeMap<L, (BarPattern, usize)>> {
    let e = t.edges();
    let mut out: BTreeMap<L, (BarPattern, usize)> = BTreeMap::new();
    for f in t.faces.iter().filter(|f| near(t, f.center(&e), r)) {
        let c = f.corners(&e).map(|c| c.phys_exact());
        if !grid.covers(&c) {
            continue;
        }
        let pat = bar_pattern(&c, grid);
        let l = label(f)?;
        match out.get_mut(&l) {
            Some((p, n)) if *p == pat => *n += 1,
            Some(_) => return Err(Error::Consistency(format!("{l:?} rhombi carry different bar patterns ({f:?})"))),
            None => {
                out.insert(l, (pat, 1));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling::generate;
    use crate::windows::default_offset;

    fn grid(r: f64) -> (Tiling, DualGrid) {
        let t = generate(Family::P4, r, 0, default_offset(), [0.0, 0.0]).unwrap();
        let d = p4_dual_lines(&t).unwrap();
        (t, d)
    }

    #[test]
    fn ell_values() {
        let (l1, l2, l3) = (Gap::L1.value(0), Gap::L2.value(0), Gap::L3.value(0));
        assert_eq!(l1 / l2, GoldenNumber::tau());
        assert_eq!(l2 / l3, GoldenNumber::tau());
        assert_eq!(l1 - l2, l3);
        assert!((l3.to_f64() - 5f64.sqrt() / 2.0).abs() < 1e-12);
        assert_eq!(Gap::L2.value(1), l1);
    }

    #[test]
    fn longest_gap_is_ell1() {
        let (_, d) = grid(40.0);
        for f in &d.families {
            let gaps: BTreeSet<GoldenNumber> = f.offsets.windows(2).map(|w| w[1] - w[0]).collect();
            assert_eq!(gaps.len(), 3);
            assert_eq!(*gaps.iter().last().unwrap(), ell1());
        }
    }

    #[test]
    fn meet_solves_both_equations() {
        let (a, b) = (GoldenVector::unit(0), GoldenVector::unit(2));
        let (ca, cb) = (GoldenNumber::from_fracs(1, 3, 1, 2), GoldenNumber::from_ints(-2, 1));
        let x = meet(&a, ca, &b, cb).unwrap();
        assert_eq!((x.dot(&a), x.dot(&b)), (ca, cb));
        assert!(meet(&a, ca, &a, cb).is_none());
    }

    #[test]
    fn chord_of_unit_square_like_rhombus() {
        let c = [GoldenVector::zero(), GoldenVector::unit(0), GoldenVector::unit(0) + GoldenVector::unit(1), GoldenVector::unit(1)];
        let (a, b) = chord(&c, 0, &GoldenVector::unit(0), GoldenNumber::from_fracs(1, 2, 0, 1)).unwrap();
        assert!(along(0, &a) < along(0, &b));
        let d = (b - a).to_f64();
        assert!((d[0].hypot(d[1]) - (72f64).to_radians().sin()).abs() < 1e-9);
        assert!(chord(&c, 0, &GoldenVector::unit(0), GoldenNumber::from_ints(3, 0)).is_none());
    }

    #[test]
    fn fibonacci_words() {
        use Gap::*;
        assert!(is_fibonacci_word(&[L1, L2, L1, L1, L2, L1, L2, L1]));
        assert!(!is_fibonacci_word(&[L1, L2, L2]));
        assert!(!is_fibonacci_word(&[L1, L1, L1]));
    }
}
