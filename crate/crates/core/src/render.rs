//! SVG output for documents and order-metric curves.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::analysis::HyperReport;
use crate::document::{GridLine, TilingDocument};
use crate::tiling::p4_to_p1;
use crate::{Error, Family, GoldenVector, PrototileType, Result, VertexColor};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Overlays {
    pub faces: bool,
    pub vertices: bool,
    pub p1: bool,
    pub dual: bool,
    pub active: bool,
    pub ammann: bool,
    pub folded: bool,
    pub flowers: bool,
}

impl Default for Overlays {
    fn default() -> Self {
        Overlays { faces: true, vertices: false, p1: false, dual: false, active: false, ammann: false, folded: false, flowers: false }
    }
}

impl Overlays {
    pub const NAMES: [&'static str; 8] = ["faces", "vertices", "p1", "dual", "active", "ammann", "folded", "flowers"];

    /// Exactly the named layers.
    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Overlays> {
        let mut o = Overlays { faces: false, ..Overlays::default() };
        for n in names {
            let flag = match n.as_ref().trim() {
                "faces" => &mut o.faces,
                "vertices" => &mut o.vertices,
                "p1" => &mut o.p1,
                "dual" => &mut o.dual,
                "active" => &mut o.active,
                "ammann" => &mut o.ammann,
                "folded" => &mut o.folded,
                "flowers" => &mut o.flowers,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown layer `{other}`, expected one of {}",
                        Self::NAMES.join(", ")
                    )))
                }
            };
            *flag = true;
        }
        Ok(o)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderStyle {
    pub thick_fill: String,
    pub thin_fill: String,
    /// Fill of type-c faces under the flower overlay.
    pub flower_fill: String,
    /// Uncoloured, orange, blue, yellow.
    pub palette: [String; 4],
    pub stroke: String,
    pub stroke_width: f64,
    pub line_width: f64,
    pub vertex_radius: f64,
    /// Pixels per edge length.
    pub scale: f64,
    /// `[x, y, width, height]` in tiling units; the whole patch when absent.
    pub viewport: Option<[f64; 4]>,
    pub overlays: Overlays,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            thick_fill: "#f2d7a6".into(),
            thin_fill: "#9cc0e0".into(),
            flower_fill: "#d9534f".into(),
            palette: ["#ffffff".into(), "#f08a24".into(), "#2a6fdb".into(), "#f2c913".into()],
            stroke: "#333333".into(),
            stroke_width: 0.04,
            line_width: 0.06,
            vertex_radius: 0.12,
            scale: 20.0,
            viewport: None,
            overlays: Overlays::default(),
        }
    }
}

impl RenderStyle {
    pub fn from_json(bytes: &[u8]) -> Result<RenderStyle> {
        serde_json::from_slice(bytes).map_err(|e| Error::Document(format!("style, line {} column {}: {e}", e.line(), e.column())))
    }

    fn color(&self, c: VertexColor) -> &str {
        let i = match c {
            VertexColor::Uncolored => 0,
            VertexColor::Orange => 1,
            VertexColor::Blue => 2,
            VertexColor::Yellow => 3,
        };
        &self.palette[i]
    }
}

fn num(x: f64) -> String {
    let s = format!("{:.4}", x);
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

fn pt(p: [f64; 2]) -> String {
    format!("{} {}", num(p[0]), num(-p[1]))
}

/// Chord of the line `{x : x·u = c}` through the disc, if any.
fn clip(line: &GridLine, center: [f64; 2], r: f64) -> Option<[[f64; 2]; 2]> {
    let u = GoldenVector::unit(line.family as i64).to_f64();
    let s = line.offset.to_f64() - (center[0] * u[0] + center[1] * u[1]);
    if s.abs() >= r {
        return None;
    }
    let foot = [center[0] + s * u[0], center[1] + s * u[1]];
    let h = (r * r - s * s).sqrt();
    Some([[foot[0] - h * u[1], foot[1] + h * u[0]], [foot[0] + h * u[1], foot[1] - h * u[0]]])
}

fn missing(layer: &str, step: &str) -> Error {
    Error::MissingLayer { layer: layer.into(), step: step.into() }
}

/// Layered SVG of a document; identical inputs give identical bytes.
pub fn render_svg(doc: &TilingDocument, style: &RenderStyle) -> Result<String> {
    let o = &style.overlays;
    let ann = doc.annotations.as_ref();
    if (o.vertices || o.flowers) && ann.is_none() {
        return Err(missing("annotations", "classify"));
    }
    if (o.dual || o.active || o.ammann || o.folded) && doc.grid.is_none() {
        return Err(missing("grid", "grid"));
    }
    if o.p1 && doc.family != Family::P4 {
        return Err(Error::InvalidArgument("the P1 overlay is derived from P4 patches only".into()));
    }
    let t = doc.to_tiling()?;
    let e = t.edges();
    let [x, y, w, h] = style.viewport.unwrap_or_else(|| {
        let r = doc.radius.max(1.0);
        [doc.center[0] - r, doc.center[1] - r, 2.0 * r, 2.0 * r]
    });
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        num(w * style.scale),
        num(h * style.scale),
        num(x),
        num(-(y + h)),
        num(w),
        num(h)
    );
    if o.faces || o.flowers {
        let _ = writeln!(s, r#"<g id="faces" stroke="{}" stroke-width="{}" stroke-linejoin="round">"#, style.stroke, num(style.stroke_width));
        for (i, f) in t.faces.iter().enumerate() {
            let flower = o.flowers && ann.and_then(|a| a.prototype[i]) == Some(PrototileType::C);
            let fill = if flower {
                &style.flower_fill
            } else if f.is_thick() {
                &style.thick_fill
            } else {
                &style.thin_fill
            };
            let c = f.corners(&e).map(|v| v.phys());
            let class = if f.is_thick() { "thick" } else { "thin" };
            let _ = writeln!(
                s,
                r#"<path class="{class}" fill="{fill}" d="M{}L{}L{}L{}Z"/>"#,
                pt(c[0]),
                pt(c[1]),
                pt(c[2]),
                pt(c[3])
            );
        }
        s.push_str("</g>\n");
    }
    if o.p1 {
        let g = p4_to_p1(&t);
        let _ = writeln!(s, r#"<g id="p1" stroke="{}" stroke-width="{}" fill="none">"#, style.palette[1], num(style.line_width));
        for (n, j) in &g.edges {
            let (d, f) = (e.e[*j as usize], e.e[(*j as usize + 2) % 5]);
            let m = crate::canonicalize(std::array::from_fn(|i| n.raw()[i] + d[i] - f[i]));
            let _ = writeln!(s, r#"<path d="M{}L{}"/>"#, pt(n.phys()), pt(m.phys()));
        }
        s.push_str("</g>\n");
    }
    if let Some(grid) = &doc.grid {
        let r = doc.radius;
        if o.ammann {
            let _ = writeln!(s, r##"<g id="ammann" stroke="#2e8b57" stroke-width="{}" fill="none">"##, num(style.line_width));
            for l in &grid.ammann {
                if let Some([a, b]) = clip(l, doc.center, r) {
                    let _ = writeln!(s, r#"<path d="M{}L{}"/>"#, pt(a), pt(b));
                }
            }
            s.push_str("</g>\n");
        }
        if o.dual {
            let _ = writeln!(
                s,
                r#"<g id="dual" stroke="black" stroke-width="{}" stroke-dasharray="{} {}" fill="none">"#,
                num(style.line_width),
                num(4.0 * style.line_width),
                num(3.0 * style.line_width)
            );
            for l in &grid.dual {
                if let Some([a, b]) = clip(l, doc.center, r) {
                    let _ = writeln!(s, r#"<path class="inactive" d="M{}L{}"/>"#, pt(a), pt(b));
                }
            }
            s.push_str("</g>\n");
        }
        if o.active || o.dual {
            let _ = writeln!(s, r#"<g id="active" stroke="black" stroke-width="{}" fill="none">"#, num(1.5 * style.line_width));
            for l in &grid.dual {
                for [a, b] in &l.active {
                    let _ = writeln!(s, r#"<path class="active" d="M{}L{}"/>"#, pt(a.to_f64()), pt(b.to_f64()));
                }
            }
            s.push_str("</g>\n");
        }
        if o.folded {
            let _ = writeln!(s, r##"<g id="folded" stroke="#b22222" stroke-width="{}" fill="none">"##, num(2.0 * style.line_width));
            for chain in &grid.folded {
                let d: Vec<String> = chain.iter().map(|p| pt(p.to_f64())).collect();
                if d.len() > 1 {
                    let _ = writeln!(s, r#"<path d="M{}"/>"#, d.join("L"));
                }
            }
            s.push_str("</g>\n");
        }
    }
    if o.vertices {
        let a = ann.expect("checked above");
        let _ = writeln!(s, r#"<g id="vertices" stroke="{}" stroke-width="{}">"#, style.stroke, num(style.stroke_width / 2.0));
        for (i, v) in doc.vertices.iter().enumerate() {
            if let Some(c) = a.color[i] {
                let p = v.phys();
                let _ = writeln!(
                    s,
                    r#"<circle class="{}" cx="{}" cy="{}" r="{}" fill="{}"/>"#,
                    c.name(),
                    num(p[0]),
                    num(-p[1]),
                    num(style.vertex_radius),
                    style.color(c)
                );
            }
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Λ(R) and its running average Γ(R) in two stacked panels.
pub fn plot_order_metric(r: &HyperReport) -> String {
    let (w, h, pad) = (640.0, 240.0, 40.0);
    let rmax = r.curve.radii.last().copied().unwrap_or(1.0);
    let ymax = r.curve.lambda.iter().copied().fold(r.fit.b, f64::max) * 1.1;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="12">"#, w, 2.0 * h);
    let panels: [(&str, Vec<[f64; 2]>); 2] = [
        ("Λ(R)", r.curve.radii.iter().zip(&r.curve.lambda).map(|(a, b)| [*a, *b]).collect()),
        ("Γ(R)", r.fit.gamma.clone()),
    ];
    for (k, (label, pts)) in panels.iter().enumerate() {
        let top = k as f64 * h;
        let sx = |x: f64| pad + x / rmax * (w - 2.0 * pad);
        let sy = |y: f64| top + h - pad - y / ymax * (h - 2.0 * pad);
        let _ = writeln!(
            s,
            r#"<g id="panel{k}"><path d="M{} {}L{} {}L{} {}" stroke="black" fill="none"/>"#,
            num(sx(0.0)),
            num(sy(ymax)),
            num(sx(0.0)),
            num(sy(0.0)),
            num(sx(rmax)),
            num(sy(0.0))
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}">{label}</text>"#, num(sx(0.0) + 6.0), num(top + pad - 8.0));
        let _ = writeln!(s, r#"<text x="{}" y="{}">R = {}</text>"#, num(sx(rmax) - 40.0), num(sy(0.0) + 16.0), num(rmax));
        let _ = writeln!(
            s,
            r##"<path d="M{} {}L{} {}" stroke="#999999" stroke-dasharray="4 3"/><text x="{}" y="{}">B = {}</text>"##,
            num(sx(r.fit.fit_range.0)),
            num(sy(r.fit.b)),
            num(sx(rmax)),
            num(sy(r.fit.b)),
            num(sx(rmax) - 80.0),
            num(sy(r.fit.b) - 4.0),
            num(r.fit.b)
        );
        let d: Vec<String> = pts.iter().map(|p| format!("{} {}", num(sx(p[0])), num(sy(p[1])))).collect();
        if !d.is_empty() {
            let _ = writeln!(s, r##"<path d="M{}" stroke="#2a6fdb" fill="none"/>"##, d.join("L"));
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::Provenance;
    use crate::tiling::{generate, Classifier, Tiling};
    use crate::windows::default_offset;

    fn doc() -> TilingDocument {
        let t = generate(Family::P4, 8.0, 0, default_offset(), [0.0, 0.0]).unwrap();
        TilingDocument::from_tiling(&t, Provenance::new("test"))
    }

    #[test]
    fn empty_document_is_an_empty_canvas() {
        let d = TilingDocument::from_tiling(&Tiling::empty(Family::P3, 0, default_offset()), Provenance::new("t"));
        let s = render_svg(&d, &RenderStyle::default()).unwrap();
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert!(!s.contains("<path"));
    }

    #[test]
    fn p1_overlay_draws_both_graphs() {
        let mut st = RenderStyle::default();
        st.overlays = Overlays::from_names(&["faces", "p1"]).unwrap();
        let s = render_svg(&doc(), &st).unwrap();
        assert!(s.contains(r#"class="thick""#) && s.contains(r#"class="thin""#));
        let p1 = &s[s.find(r#"<g id="p1""#).unwrap()..];
        assert!(p1.contains("<path d="));
    }

    #[test]
    fn overlays_need_their_layers() {
        let mut st = RenderStyle::default();
        st.overlays = Overlays::from_names(&["dual"]).unwrap();
        let e = render_svg(&doc(), &st).unwrap_err();
        assert!(matches!(&e, Error::MissingLayer { step, .. } if step == "grid"), "{e}");
        st.overlays = Overlays::from_names(&["vertices"]).unwrap();
        let e = render_svg(&doc(), &st).unwrap_err();
        assert!(e.to_string().contains("classify"));
    }

    #[test]
    fn output_is_deterministic_and_coloured() {
        let mut d = doc();
        let t = d.to_tiling().unwrap();
        d.set_annotations(&Classifier::new(&t).unwrap().annotate().unwrap());
        let mut st = RenderStyle::default();
        st.overlays = Overlays::from_names(&["faces", "vertices", "flowers"]).unwrap();
        let a = render_svg(&d, &st).unwrap();
        assert_eq!(a, render_svg(&d, &st).unwrap());
        for c in ["orange", "blue", "yellow"] {
            assert!(a.contains(&format!(r#"class="{c}""#)), "{c}");
        }
        assert!(a.contains(&st.flower_fill));
    }

    #[test]
    fn unknown_layers_are_rejected() {
        assert!(Overlays::from_names(&["faces", "bogus"]).is_err());
    }
}
