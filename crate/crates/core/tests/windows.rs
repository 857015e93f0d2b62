use quasitile::tiling::*;
use quasitile::windows::*;
use quasitile::golden::unit_level;
use quasitile::{Family, GoldenVector};

fn agrees(family: Family, scale: u32, r: f64) {
    let t = generate(family, r, scale, default_offset(), [0.0, 0.0]).unwrap();
    let cl = Classifier::new(&t).unwrap();
    let maps: Vec<_> = (0..5u8).map(|l| environment_map(family, l).ok()).collect();
    let z = GoldenVector::zero();
    let mut n = 0;
    for v in t.interior_vertices(MARGIN) {
        let q = unit_level(v.level(), scale);
        let map = maps[q as usize].as_ref().unwrap();
        let got = subdomain_lookup(&unit_frame_perp(&v, scale, &t.offset), map, &z).unwrap();
        assert_eq!(got, cl.environment(&v).unwrap(), "{v:?}");
        n += 1;
    }
    assert!(n > 300);
}

#[test]
fn p4_sections_predict_environments() {
    agrees(Family::P4, 0, 30.0);
    agrees(Family::P4, 1, 40.0);
}

#[test]
fn p3_sections_predict_environments() {
    agrees(Family::P3, 0, 30.0);
    agrees(Family::P3, 1, 40.0);
}
