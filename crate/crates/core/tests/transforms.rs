use quasitile::golden::TAU;
use quasitile::tiling::*;
use quasitile::transforms::*;
use quasitile::windows::default_offset;
use quasitile::{Environment, GoldenNumber, Family, PrototileType, VertexColor};
use std::collections::BTreeSet;

const ORIGIN: [f64; 2] = [0.0, 0.0];

fn unit(r: f64) -> Tiling {
    generate(Family::P4, r, 0, default_offset(), ORIGIN).unwrap()
}

fn inside(t: &Tiling, r: f64) -> BTreeSet<quasitile::IndexVector> {
    t.vertices.iter().copied().filter(|v| t.dist(v.phys()) < r).collect()
}

#[test]
fn deflation_matches_direct_generation() {
    let coarse = generate(Family::P4, 35.0, 1, default_offset(), ORIGIN).unwrap();
    let d = deflate_p4(&coarse).unwrap();
    let direct = generate(Family::P4, d.tiling.radius, 0, default_offset(), ORIGIN).unwrap();
    assert_eq!(d.tiling.interior_vertices(MARGIN), direct.interior_vertices(MARGIN));
    let r = d.tiling.radius - MARGIN;
    let fine: Vec<_> = d.tiling.faces.iter().filter(|f| d.tiling.dist(f.center(&d.tiling.edges())) < r).collect();
    let want: Vec<_> = direct.faces.iter().filter(|f| direct.dist(f.center(&direct.edges())) < r).collect();
    assert_eq!(fine, want);
}

#[test]
fn inflation_inverts_deflation() {
    let fine = unit(40.0);
    let coarse = inflate_p4(&fine).unwrap();
    let direct = generate(Family::P4, coarse.radius, 1, default_offset(), ORIGIN).unwrap();
    assert_eq!(coarse.interior_vertices(MARGIN), direct.interior_vertices(MARGIN));
    let back = deflate_p4(&coarse).unwrap().tiling;
    let r = back.radius - MARGIN;
    assert_eq!(inside(&back, r), inside(&fine, r));
}

#[test]
fn yellow_vertices_fall_inside_fine_type_a_faces() {
    let coarse = generate(Family::P4, 30.0, 1, default_offset(), ORIGIN).unwrap();
    let fine = deflate_p4(&coarse).unwrap().tiling;
    let cl = Classifier::new(&fine).unwrap();
    let e = fine.edges();
    let mut seen = 0;
    for v in &coarse.vertices {
        if fine.dist(v.phys()) > fine.radius - 2.0 * MARGIN || vertex_color(&coarse, v).unwrap() != VertexColor::Yellow {
            continue;
        }
        let p = v.phys();
        let host: Vec<_> = fine
            .faces
            .iter()
            .filter(|f| {
                let c = f.center(&e);
                (c[0] - p[0]).hypot(c[1] - p[1]) < 1.0 && strictly_inside(&f.corners(&e).map(|x| x.phys()), p)
            })
            .collect();
        assert_eq!(host.len(), 1, "{v:?}");
        assert_eq!(cl.prototile(host[0]).unwrap(), PrototileType::A);
        seen += 1;
    }
    assert!(seen > 100);
}

fn strictly_inside(q: &[[f64; 2]; 4], p: [f64; 2]) -> bool {
    let c: Vec<f64> = (0..4)
        .map(|i| {
            let (a, b) = (q[i], q[(i + 1) % 4]);
            (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
        })
        .collect();
    c.iter().all(|x| *x > 1e-9) || c.iter().all(|x| *x < -1e-9)
}

#[test]
fn colour_rules_hold_without_exceptions() {
    let coarse = generate(Family::P4, 30.0, 1, default_offset(), ORIGIN).unwrap();
    let fine = unit(30.0);
    let rep = color_transitions(&coarse, &fine).unwrap();
    assert!(rep.checked > 500);
    assert_eq!(rep.exceptions, 0, "{:?}", rep.counts);
}

#[test]
fn inflation_matrix_eigenstructure() {
    let coarse = generate(Family::P4, 30.0, 1, default_offset(), ORIGIN).unwrap();
    let d = deflate_p4(&coarse).unwrap();
    let m = derive_inflation_matrix(&coarse, &d.tiling).unwrap();
    assert!(m.m.iter().flatten().all(|x| *x >= 0.0));
    assert!((m.eigenvalue - TAU * TAU).abs() < 1e-9);
    assert!(m.eigenvector_error() < 1e-6);
    assert!(m.area_defects().iter().all(|x| x.abs() < 1e-9));
    assert!(m.exact.iter().flatten().all(|x| x.is_some()));
}

#[test]
fn hyper_scaling_conjugates_generation() {
    let t = unit(20.0);
    let img = rebase(&t);
    let direct = generate(Family::P4, img.radius, 1, img.offset, img.center).unwrap();
    let r = img.radius - MARGIN * img.edge_length();
    assert_eq!(inside(&img, r), inside(&direct, r));
    for v in t.vertices.iter().take(50) {
        let (p, q) = (v.phys(), hyper_scale(v).phys());
        assert!((q[0].hypot(q[1]) - TAU * p[0].hypot(p[1])).abs() < 1e-9);
        assert_eq!(hyper_scale(v).level(), (5 - (2 * v.level()) % 5) % 5);
    }
}

#[test]
fn tau_scaled_p3_keeps_blue_and_orange_vertices() {
    let t = unit(35.0);
    let p = p4_to_p3_tau(&t).unwrap();
    let direct = p3_tau_direct(p.radius, 0, default_offset(), ORIGIN).unwrap();
    assert_eq!(p.interior_vertices(MARGIN), direct.interior_vertices(MARGIN));
    let kept: BTreeSet<_> = p.vertices.iter().copied().collect();
    let cl = Classifier::new(&t).unwrap();
    let e = t.edges();
    let mut dropped_d = 0;
    for v in &t.vertices {
        if !t.is_interior(v, MARGIN + 2.0) {
            continue;
        }
        let c = vertex_color(&t, v).unwrap();
        assert_eq!(kept.contains(v), matches!(c, VertexColor::Blue | VertexColor::Orange), "{v:?} {c:?}");
        if cl.environment(v).unwrap() != Environment::D {
            continue;
        }
        let nb: BTreeSet<_> = cl.neighbours(v).into_iter().collect();
        let chained = (0..10).any(|d| {
            let w = e.step(v, d);
            let x = e.step(&w, d);
            nb.contains(&w)
                && cl.neighbours(&w).contains(&x)
                && t.is_interior(&x, 0.0)
                && cl.environment(&x).is_ok_and(|k| k == Environment::D)
        });
        assert_eq!(kept.contains(v), !chained, "{v:?}");
        dropped_d += chained as usize;
    }
    assert!(dropped_d > 0);
}

#[test]
fn tau2_scaled_p3_from_polygons() {
    let t = unit(45.0);
    let (p, motifs) = p4_to_p3_tau2_motifs(&t).unwrap();
    assert_eq!(motifs.len(), 3);
    let direct = p3_tau2_direct(p.radius, 0, default_offset(), ORIGIN).unwrap();
    assert_eq!(p.interior_vertices(MARGIN), direct.interior_vertices(MARGIN));
    let c = census(&p).unwrap();
    for e in [Environment::U, Environment::W] {
        assert_eq!(c.env(e), 0);
    }
    // every hexagon vertex has a K or S2 vertex at distance tau^3
    let cl = Classifier::new(&t).unwrap();
    let tau3 = TAU.powi(3);
    let marks: Vec<_> = t
        .vertices
        .iter()
        .filter(|v| t.is_interior(v, MARGIN) && matches!(cl.environment(v), Ok(Environment::K | Environment::S2)))
        .map(|v| v.phys())
        .collect();
    for v in p.interior_vertices(MARGIN + 5.0) {
        if cl.environment(&v).unwrap() != Environment::Q {
            continue;
        }
        let q = v.phys();
        assert!(marks.iter().any(|m| ((m[0] - q[0]).hypot(m[1] - q[1]) - tau3).abs() < 1e-9), "{v:?}");
    }
}

#[test]
fn p3_deflation_of_tau2_gives_tau() {
    let t = unit(45.0);
    let big = p4_to_p3_tau2(&t).unwrap();
    let small = deflate_p3(&big).unwrap();
    let tau = p4_to_p3_tau(&t).unwrap();
    let r = small.radius.min(tau.radius) - 2.0 * small.edge_length();
    assert_eq!(inside(&small, r), inside(&tau, r));
}

#[test]
fn p1_graph_of_unit_patch() {
    let t = unit(30.0);
    let g = p4_to_p1(&t);
    let e = t.edges();
    for (n, j) in &g.edges {
        let a = n.phys();
        let (d, f) = (e.e[*j as usize], e.e[(*j as usize + 2) % 5]);
        let b = quasitile::canonicalize(std::array::from_fn(|i| n.raw()[i] + d[i] - f[i])).phys();
        assert!(((a[0] - b[0]).hypot(a[1] - b[1]) - 2.0 * (std::f64::consts::PI / 10.0).cos()).abs() < 1e-9);
    }
    let uncolored: Vec<_> =
        t.vertices.iter().copied().filter(|v| vertex_color(&t, v).unwrap() == VertexColor::Uncolored).collect();
    assert_eq!(g.nodes, uncolored);
    let back = p1_to_p4(&g).unwrap();
    assert_eq!(back.interior_vertices(MARGIN + 3.0), t.interior_vertices(MARGIN + 3.0));
}

#[test]
fn shipped_tables_match_a_fresh_derivation() {
    let off = quasitile::PerpVector::new(GoldenNumber::from_fracs(2, 9, 0, 1), GoldenNumber::from_fracs(-1, 13, 0, 1));
    let p4 = derive_p4_table(40.0, off, [3.0, -2.0]).unwrap();
    assert!(p4.same_rules(p4_table()), "{}", p4.to_json());
    let p3 = derive_p3_table(40.0, off, [3.0, -2.0]).unwrap();
    assert!(p3.same_rules(p3_table()), "{}", p3.to_json());
}
