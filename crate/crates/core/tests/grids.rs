use std::collections::{BTreeMap, BTreeSet, HashSet};

use quasitile::grids::*;
use quasitile::tiling::*;
use quasitile::transforms::p4_to_p3_tau;
use quasitile::windows::default_offset;
use quasitile::{Face, Family, GoldenNumber, GoldenVector, PrototileType};

const R: f64 = 40.0;

fn setup(r: f64, scale: u32) -> (Tiling, DualGrid) {
    let t = generate(Family::P4, r, scale, default_offset(), [0.0, 0.0]).unwrap();
    let d = p4_dual_lines(&t).unwrap();
    let d = active_segments(&t, &d).unwrap();
    (t, d)
}

/// Faces far enough inside that all their lines were kept.
fn deep(t: &Tiling, d: &DualGrid) -> Vec<Face> {
    let e = t.edges();
    t.faces.iter().copied().filter(|f| t.dist(f.center(&e)) < d.reach / 2.0 - 3.0 * t.edge_length()).collect()
}

fn inside_closed(c: &[GoldenVector; 4], p: &GoldenVector) -> bool {
    (0..4).all(|i| (c[(i + 1) % 4] - c[i]).cross(&(*p - c[i])).sign() >= 0)
}

fn meet_lines(a: &LineFamily, i: usize, b: &LineFamily, k: usize) -> GoldenVector {
    let (na, nb) = (a.normal(), b.normal());
    let (f0, f1) = (GoldenVector::unit(0), GoldenVector::unit(1));
    let (a0, a1, b0, b1) = (f0.dot(&na), f1.dot(&na), f0.dot(&nb), f1.dot(&nb));
    let (ca, cb) = (a.offsets[i], b.offsets[k]);
    let det = a0 * b1 - a1 * b0;
    GoldenVector::new((ca * b1 - a1 * cb) / det, (a0 * cb - ca * b0) / det)
}

#[test]
fn lines_form_ternary_quasilattices() {
    let (_, d) = setup(R, 0);
    let (l1, l2, l3) = (Gap::L1.value(0), Gap::L2.value(0), Gap::L3.value(0));
    for f in &d.families {
        assert!(f.offsets.len() > 15);
        let gaps: BTreeSet<GoldenNumber> = f.offsets.windows(2).map(|w| w[1] - w[0]).collect();
        assert_eq!(gaps, [l3, l2, l1].into_iter().collect());
        assert_eq!(l1 / l2, l2 / l3);
        assert_eq!(l1 / l2, GoldenNumber::tau());
        assert_eq!(l3, l1 - l2);
    }
}

#[test]
fn scaled_patches_scale_the_gaps() {
    let (_, d) = setup(45.0, 1);
    for f in &d.families {
        let gaps: BTreeSet<GoldenNumber> = f.offsets.windows(2).map(|w| w[1] - w[0]).collect();
        assert_eq!(*gaps.iter().last().unwrap(), ell1() * GoldenNumber::tau());
    }
    assert!(reconstruct_ammann(&d).is_ok());
}

#[test]
fn each_thin_rhombus_feeds_two_families() {
    let (t, d) = setup(R, 0);
    let e = t.edges();
    let mut n = 0;
    for f in deep(&t, &d).iter().filter(|f| !f.is_thick()) {
        let c = f.center_exact(&e);
        let on: Vec<u8> = d
            .families
            .iter()
            .filter(|fam| fam.index_of(&c.dot(&fam.normal())).is_some())
            .map(|fam| fam.direction)
            .collect();
        assert_eq!(on, vec![f.j, f.k]);
        n += 1;
    }
    assert!(n > 300);
}

#[test]
fn each_line_crosses_every_rhombus_of_its_array() {
    let (t, d) = setup(R, 0);
    let e = t.edges();
    let keep: BTreeSet<Face> = deep(&t, &d).into_iter().collect();
    for j in 0..5u8 {
        let fam = &d.families[j as usize];
        let n = fam.normal();
        for w in worms(&t, j, d.reach) {
            let thin: BTreeSet<GoldenNumber> =
                w.iter().filter(|f| !f.is_thick()).map(|f| f.center_exact(&e).dot(&n)).collect();
            for f in w.iter().filter(|f| keep.contains(f)) {
                let proj: Vec<GoldenNumber> = f.corners(&e).iter().map(|c| c.phys_exact().dot(&n)).collect();
                let (lo, hi) = (*proj.iter().min().unwrap(), *proj.iter().max().unwrap());
                assert!(thin.iter().any(|c| lo < *c && *c < hi), "{f:?}");
            }
        }
    }
}

#[test]
fn type_c_rhombi_sit_exactly_at_pair_crossings() {
    let (t, d) = setup(R, 0);
    let cl = Classifier::new(&t).unwrap();
    let region: BTreeSet<Face> = deep(&t, &d).into_iter().collect();
    let mut families: BTreeMap<Face, BTreeSet<u8>> = BTreeMap::new();
    for s in &d.switches {
        families.entry(s.face).or_default().insert(s.family);
    }
    let c_faces: BTreeSet<Face> =
        region.iter().copied().filter(|f| cl.prototile(f).unwrap() == PrototileType::C).collect();
    let switched: BTreeSet<Face> = families.keys().copied().filter(|f| region.contains(f)).collect();
    assert!(c_faces.len() > 50);
    assert_eq!(switched, c_faces);
    for f in &c_faces {
        assert!(f.is_thick());
        assert_eq!(families[f], [f.j, f.k].into_iter().collect());
    }
}

#[test]
fn active_side_alternates_at_every_crossing() {
    let (t, d) = setup(R, 0);
    let e = t.edges();
    let l3 = Gap::L3.value(0);
    let jumps: HashSet<(u8, GoldenVector, GoldenVector)> =
        d.switches.iter().map(|s| (s.family, s.exit, s.entry)).collect();
    for s in &d.switches {
        let n = GoldenVector::unit(s.family as i64);
        assert_eq!((s.exit.dot(&n) - s.entry.dot(&n)).abs(), l3);
        assert!(along(s.family, &s.exit) < along(s.family, &s.entry));
        let c = s.face.corners(&e).map(|c| c.phys_exact());
        assert!(inside_closed(&c, &s.exit) && inside_closed(&c, &s.entry));
    }
    let mut checked = 0;
    for j in 0..5u8 {
        for &lo in &d.pairs[j as usize] {
            let mut segs: Vec<&Segment> =
                d.active[j as usize].iter().filter(|s| s.line == lo || s.line == lo + 1).collect();
            segs.sort_by_key(|s| along(j, &s.from));
            for w in segs.windows(2) {
                // never both lines at once; the hand-over is always a switch
                assert_ne!(w[0].line, w[1].line, "family {j} pair {lo}");
                assert!(along(j, &w[0].to) <= along(j, &w[1].from));
                assert!(jumps.contains(&(j, w[0].to, w[1].from)), "family {j} pair {lo}");
                checked += 1;
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn active_crossings_dualize_the_tiling() {
    let (t, d) = setup(R, 0);
    let e = t.edges();
    let cl = Classifier::new(&t).unwrap();
    let mut hits: BTreeMap<Face, usize> = BTreeMap::new();
    for j in 0..5u8 {
        for k in j + 1..5u8 {
            let (fj, fk) = (&d.families[j as usize], &d.families[k as usize]);
            let faces: Vec<_> = t.faces.iter().filter(|f| f.j == j && f.k == k).collect();
            let on = |f: u8, s: &Segment, p: &GoldenVector| {
                let x = along(f, p);
                along(f, &s.from) <= x && x <= along(f, &s.to)
            };
            for sj in &d.active[j as usize] {
                let (a, b) = (sj.from.to_f64(), sj.to.to_f64());
                for sk in &d.active[k as usize] {
                    let (c, dd) = (sk.from.to_f64(), sk.to.to_f64());
                    let overlap = |i: usize| {
                        a[i].min(b[i]) <= c[i].max(dd[i]) + 1e-9 && c[i].min(dd[i]) <= a[i].max(b[i]) + 1e-9
                    };
                    if !(overlap(0) && overlap(1)) {
                        continue;
                    }
                    let p = meet_lines(fj, sj.line, fk, sk.line);
                    if !(on(j, sj, &p) && on(k, sk, &p)) {
                        continue;
                    }
                    let pf = p.to_f64();
                    let host: Vec<_> = faces
                        .iter()
                        .filter(|f| {
                            let c = f.center(&e);
                            (c[0] - pf[0]).hypot(c[1] - pf[1]) < 1.0
                                && inside_closed(&f.corners(&e).map(|c| c.phys_exact()), &p)
                        })
                        .collect();
                    assert_eq!(host.len(), 1, "{p:?}");
                    *hits.entry(**host[0]).or_default() += 1;
                }
            }
        }
    }
    // one crossing per rhombus, two (the switch corners) per type-c rhombus
    for f in deep(&t, &d) {
        let want = if cl.prototile(&f).unwrap() == PrototileType::C { 2 } else { 1 };
        assert_eq!(hits.get(&f).copied().unwrap_or(0), want, "{f:?}");
    }
}

#[test]
fn folded_lines_turn_at_switches() {
    let (_, d) = setup(R, 0);
    let corners: HashSet<GoldenVector> = d.switches.iter().flat_map(|s| [s.exit, s.entry]).collect();
    let mut turns = 0;
    for chain in &d.folded {
        assert!(chain.len() >= 2);
        for p in &chain[1..chain.len() - 1] {
            assert!(corners.contains(p));
            turns += 1;
        }
    }
    assert!(turns > 100);
}

#[test]
fn ammann_grid_brackets_the_dual_lines() {
    let (_, d) = setup(R, 0);
    let a = reconstruct_ammann(&d).unwrap();
    let (l1, l2) = (Gap::L1.value(0), Gap::L2.value(0));
    let mut checked = 0;
    for (fam, am) in d.families.iter().zip(&a.families) {
        let gaps: BTreeSet<GoldenNumber> = am.offsets.windows(2).map(|w| w[1] - w[0]).collect();
        assert_eq!(gaps, [l2, l1].into_iter().collect());
        assert!(is_fibonacci_word(&am.gaps));
        for (i, x) in fam.offsets.iter().enumerate() {
            let k = am.offsets.partition_point(|c| c < x);
            if k == 0 || k == am.offsets.len() {
                continue;
            }
            let (lo, hi) = (am.offsets[k - 1], am.offsets[k]);
            match fam.role(i) {
                LineRole::Isolated => {
                    assert_eq!(hi - lo, l1);
                    assert_eq!((lo + hi) / 2, *x);
                }
                LineRole::PairLow => {
                    assert_eq!(hi - lo, l2);
                    assert_eq!((lo + hi) / 2, (*x + fam.offsets[i + 1]) / 2);
                }
                LineRole::PairHigh => {
                    assert_eq!(hi - lo, l2);
                    assert_eq!((lo + hi) / 2, (*x + fam.offsets[i - 1]) / 2);
                }
            }
            checked += 1;
        }
    }
    assert!(checked > 80);
}

#[test]
fn bar_patterns_are_unique_per_prototile() {
    let (t, d) = setup(50.0, 0);
    let a = reconstruct_ammann(&d).unwrap();
    let cl = Classifier::new(&t).unwrap();
    let m = decorations(&t, &a, d.reach, |f| cl.prototile(f)).unwrap();
    assert_eq!(m.len(), 6);
    let patterns: BTreeSet<_> = m.values().map(|(p, _)| p.clone()).collect();
    assert_eq!(patterns.len(), 6);
    assert!(m.values().all(|(_, n)| *n > 50));

    // the same lines are the Ammann bars of the tau-scaled P3 tiling
    let p3 = p4_to_p3_tau(&t).unwrap();
    let m3 = decorations(&p3, &a, d.reach, |f| Ok(f.is_thick())).unwrap();
    assert_eq!(m3.len(), 2);
    assert_ne!(m3[&true].0, m3[&false].0);
}

#[test]
fn grid_json_lists_five_families() {
    let (_, d) = setup(25.0, 0);
    let v = d.to_json();
    assert_eq!(v["families"].as_array().unwrap().len(), 5);
    assert_eq!(v["families"][0]["gaps"][0].as_str().map(|s| s.starts_with('l')), Some(true));
    let a = reconstruct_ammann(&d).unwrap().to_json();
    assert_eq!(a["families"].as_array().unwrap().len(), 5);
}

#[test]
fn p3_patches_are_rejected() {
    let t = generate(Family::P3, 10.0, 0, default_offset(), [0.0, 0.0]).unwrap();
    assert!(p4_dual_lines(&t).is_err());
}
