//! Number variance, the order metric B and structural densities of vertex sets.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::tiling::{Classifier, MARGIN};
use crate::{Environment, Error, Family, PrototileType, Result, Tiling};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Disc {
    pub center: [f64; 2],
    pub radius: f64,
}

impl Disc {
    pub fn new(center: [f64; 2], radius: f64) -> Disc {
        Disc { center, radius }
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }
}

/// Uniform cell grid over a point set, cells stored contiguously.
pub struct PointIndex {
    origin: [f64; 2],
    cell: f64,
    nx: usize,
    ny: usize,
    start: Vec<u32>,
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PointIndex {
    pub fn new(points: &[[f64; 2]], cell: f64) -> PointIndex {
        let (mut lo, mut hi) = ([0.0f64; 2], [0.0f64; 2]);
        if let Some(p) = points.first() {
            lo = *p;
            hi = *p;
        }
        for p in points {
            for i in 0..2 {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        let nx = ((hi[0] - lo[0]) / cell) as usize + 1;
        let ny = ((hi[1] - lo[1]) / cell) as usize + 1;
        let key = |p: &[f64; 2]| {
            let ix = (((p[0] - lo[0]) / cell) as usize).min(nx - 1);
            let iy = (((p[1] - lo[1]) / cell) as usize).min(ny - 1);
            iy * nx + ix
        };
        let mut start = vec![0u32; nx * ny + 1];
        for p in points {
            start[key(p) + 1] += 1;
        }
        for i in 0..nx * ny {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let (mut xs, mut ys) = (vec![0.0; points.len()], vec![0.0; points.len()]);
        for p in points {
            let k = key(p);
            let at = fill[k] as usize;
            xs[at] = p[0];
            ys[at] = p[1];
            fill[k] += 1;
        }
        PointIndex { origin: lo, cell, nx, ny, start, xs, ys }
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Points strictly closer than `r` to `c`.
    pub fn count_within(&self, c: [f64; 2], r: f64) -> usize {
        let b = Buckets::new(&[r]);
        let mut h = [0u32; 2];
        self.histogram(c, &b, &mut h);
        h[0] as usize
    }

    /// Adds each point to the first bucket whose radius exceeds its distance;
    /// `hist` has one overflow slot past the radii.
    fn histogram(&self, c: [f64; 2], b: &Buckets, hist: &mut [u32]) {
        if self.is_empty() {
            return;
        }
        let rmax = b.rmax;
        let rmax2 = rmax * rmax;
        let span = |v: f64, o: f64, n: usize| {
            let lo = ((v - rmax - o) / self.cell).floor().max(0.0) as usize;
            let hi = ((v + rmax - o) / self.cell).floor();
            if hi < 0.0 {
                return (1, 0);
            }
            (lo, (hi as usize).min(n - 1))
        };
        let (x0, x1) = span(c[0], self.origin[0], self.nx);
        let (y0, y1) = span(c[1], self.origin[1], self.ny);
        for iy in y0..=y1 {
            let (ya, yb) = (self.origin[1] + iy as f64 * self.cell, self.origin[1] + (iy + 1) as f64 * self.cell);
            let (dy_min, dy_max) = gap(c[1], ya, yb);
            for ix in x0..=x1 {
                let k = iy * self.nx + ix;
                let (s, e) = (self.start[k] as usize, self.start[k + 1] as usize);
                if s == e {
                    continue;
                }
                let (xa, xb) = (self.origin[0] + ix as f64 * self.cell, self.origin[0] + (ix + 1) as f64 * self.cell);
                let (dx_min, dx_max) = gap(c[0], xa, xb);
                let min2 = dx_min * dx_min + dy_min * dy_min;
                if min2 >= rmax2 {
                    continue;
                }
                let lo = b.bucket(min2);
                if lo == b.bucket(dx_max * dx_max + dy_max * dy_max) {
                    // lo < n since min2 < rmax2
                    hist[lo] += (e - s) as u32;
                    continue;
                }
                for (x, y) in self.xs[s..e].iter().zip(&self.ys[s..e]) {
                    let (dx, dy) = (x - c[0], y - c[1]);
                    let d2 = dx * dx + dy * dy;
                    hist[b.bucket(d2)] += 1;
                }
            }
        }
    }
}

fn gap(v: f64, a: f64, b: f64) -> (f64, f64) {
    let near = if v < a {
        a - v
    } else if v > b {
        v - b
    } else {
        0.0
    };
    (near, (v - a).abs().max((v - b).abs()))
}

/// Maps a squared distance to the index of the first radius exceeding it
/// (the number of radii when none does).
struct Buckets {
    r2: Vec<f64>,
    rmax: f64,
    inv: f64,
    table: Vec<u32>,
}

const MAX_TABLE: usize = 1 << 24;

impl Buckets {
    fn new(radii: &[f64]) -> Buckets {
        let mut r2: Vec<f64> = radii.iter().map(|r| r * r).collect();
        let rmax = *radii.last().unwrap();
        // slots of half the smallest gap: two adjacent slots hold at most one
        // squared radius
        let mut gap = r2[0];
        for w in r2.windows(2) {
            gap = gap.min(w[1] - w[0]);
        }
        let step = gap / 2.0;
        let m = (r2[r2.len() - 1] / step) as usize + 3;
        let table = if m <= MAX_TABLE {
            (0..m).map(|i| r2.partition_point(|x| *x <= i as f64 * step) as u32).collect()
        } else {
            Vec::new()
        };
        r2.push(f64::INFINITY);
        Buckets { r2, rmax, inv: 1.0 / step, table }
    }

    #[inline]
    fn bucket(&self, d2: f64) -> usize {
        if self.table.is_empty() {
            return self.r2.partition_point(|x| *x <= d2);
        }
        let i = ((d2 * self.inv) as usize).saturating_sub(1).min(self.table.len() - 1);
        let k = self.table[i] as usize;
        k + (self.r2[k] <= d2) as usize
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarianceCurve {
    pub radii: Vec<f64>,
    pub variance: Vec<f64>,
    pub lambda: Vec<f64>,
    pub mean: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub sampling_disc_radius: f64,
}

/// Window centre `i` of a run: its own ChaCha8 stream keyed by the sample index.
pub fn sample_center(disc: &Disc, seed: u64, i: u64) -> [f64; 2] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    let r = disc.radius * rng.random::<f64>().sqrt();
    let a = 2.0 * PI * rng.random::<f64>();
    [disc.center[0] + r * a.cos(), disc.center[1] + r * a.sin()]
}

/// Sample variance (n − 1 divisor) of the number of points within `R` of
/// `n_samples` uniform centres in `disc`. `support` is the region where the
/// point set is known to be complete.
pub fn number_variance(
    points: &[[f64; 2]],
    support: Disc,
    radii: &[f64],
    n_samples: usize,
    disc: Disc,
    seed: u64,
) -> Result<VarianceCurve> {
    if radii.is_empty() || radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("radii must be positive and strictly increasing".into()));
    }
    if n_samples < 2 {
        return Err(Error::InvalidArgument("at least two window centres are needed".into()));
    }
    let rmax = *radii.last().unwrap();
    let off = (disc.center[0] - support.center[0]).hypot(disc.center[1] - support.center[1]);
    if off + disc.radius + rmax > support.radius {
        return Err(Error::WindowOverflow { window: rmax, disc: disc.radius, patch: support.radius });
    }
    let index = PointIndex::new(points, 8.0);
    let buckets = Buckets::new(radii);
    let n = radii.len();
    let zero = || (vec![0u64; n], vec![0u128; n]);
    let (s1, s2) = (0..n_samples as u64)
        .into_par_iter()
        .fold(
            || (zero(), vec![0u32; n + 1]),
            |((mut s1, mut s2), mut hist), i| {
                hist.iter_mut().for_each(|h| *h = 0);
                index.histogram(sample_center(&disc, seed, i), &buckets, &mut hist);
                let mut acc = 0u64;
                for k in 0..n {
                    acc += hist[k] as u64;
                    s1[k] += acc;
                    s2[k] += (acc as u128) * (acc as u128);
                }
                ((s1, s2), hist)
            },
        )
        .map(|(s, _)| s)
        .reduce(zero, |(mut a1, mut a2), (b1, b2)| {
            for k in 0..n {
                a1[k] += b1[k];
                a2[k] += b2[k];
            }
            (a1, a2)
        });
    let m = n_samples as i128;
    let variance: Vec<f64> = (0..n)
        .map(|k| {
            let num = m * s2[k] as i128 - (s1[k] as i128) * (s1[k] as i128);
            num as f64 / (m * (m - 1)) as f64
        })
        .collect();
    Ok(VarianceCurve {
        lambda: variance.iter().zip(radii).map(|(v, r)| v / r).collect(),
        mean: s1.iter().map(|s| *s as f64 / n_samples as f64).collect(),
        radii: radii.to_vec(),
        variance,
        samples: n_samples,
        seed,
        sampling_disc_radius: disc.radius,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderMetricFit {
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub fit_range: (f64, f64),
    pub points: usize,
    pub residuals: Vec<f64>,
    pub rms: f64,
    pub r0: f64,
    /// Running average Γ(R) = (R − R₀)⁻¹ ∫ Λ dR' from R₀, as (R, Γ) pairs.
    pub gamma: Vec<[f64; 2]>,
}

pub const MIN_FIT_POINTS: usize = 50;

/// Least squares Λ(R) ≈ B + C/R over `r_min ≤ R ≤ r_max`.
pub fn fit_order_metric(curve: &VarianceCurve, r_min: f64, r_max: f64) -> Result<OrderMetricFit> {
    let sel: Vec<usize> = (0..curve.radii.len()).filter(|&i| curve.radii[i] >= r_min && curve.radii[i] <= r_max).collect();
    if sel.len() < MIN_FIT_POINTS {
        return Err(Error::IllConditioned(format!(
            "{} radii in [{r_min}, {r_max}], need {MIN_FIT_POINTS}",
            sel.len()
        )));
    }
    let k = sel.len() as f64;
    let xm = sel.iter().map(|&i| 1.0 / curve.radii[i]).sum::<f64>() / k;
    let ym = sel.iter().map(|&i| curve.lambda[i]).sum::<f64>() / k;
    let (mut sxx, mut sxy, mut x2) = (0.0, 0.0, 0.0);
    for &i in &sel {
        let x = 1.0 / curve.radii[i];
        sxx += (x - xm) * (x - xm);
        sxy += (x - xm) * (curve.lambda[i] - ym);
        x2 += x * x;
    }
    if !(sxx > 1e-12 * x2) {
        return Err(Error::IllConditioned("radii too close together to separate B from C".into()));
    }
    let c = sxy / sxx;
    let b = ym - c * xm;
    let residuals: Vec<f64> = sel.iter().map(|&i| curve.lambda[i] - b - c / curve.radii[i]).collect();
    let rms = (residuals.iter().map(|r| r * r).sum::<f64>() / k).sqrt();
    Ok(OrderMetricFit {
        b,
        c,
        fit_range: (r_min, r_max),
        points: sel.len(),
        residuals,
        rms,
        r0: r_min,
        gamma: running_average(curve, r_min),
    })
}

fn running_average(curve: &VarianceCurve, r0: f64) -> Vec<[f64; 2]> {
    let first = curve.radii.partition_point(|r| *r < r0);
    let mut out = Vec::new();
    let mut integral = 0.0;
    for i in first..curve.radii.len() {
        let r = curve.radii[i];
        if i == first {
            out.push([r, curve.lambda[i]]);
            continue;
        }
        integral += 0.5 * (curve.lambda[i] + curve.lambda[i - 1]) * (r - curve.radii[i - 1]);
        out.push([r, integral / (r - curve.radii[first])]);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PatternMetrics {
    pub rho: f64,
    pub phi: f64,
    pub normalized_b: Option<f64>,
    pub decagon_coverage: Option<f64>,
    pub s1_density: Option<f64>,
    pub s1_ratio: Option<f64>,
}

impl PatternMetrics {
    pub fn from_density(rho: f64, fit: Option<&OrderMetricFit>) -> PatternMetrics {
        let phi = PI * rho / 4.0;
        PatternMetrics {
            rho,
            phi,
            normalized_b: fit.map(|f| f.b / phi.sqrt()),
            decagon_coverage: None,
            s1_density: None,
            s1_ratio: None,
        }
    }

    /// Fills `s1_ratio` as this pattern's S₁ density over `other`'s.
    pub fn relative_to(mut self, other: &PatternMetrics) -> PatternMetrics {
        if let (Some(a), Some(b)) = (self.s1_density, other.s1_density) {
            self.s1_ratio = Some(a / b);
        }
        self
    }
}

/// Vertex positions and the disc over which they are complete.
pub fn tiling_points(t: &Tiling) -> (Vec<[f64; 2]>, Disc) {
    let support = Disc::new(t.center, t.radius - MARGIN * t.edge_length());
    let pts = t.vertices.iter().map(|v| v.phys()).collect();
    (pts, support)
}

/// Vertex density inside the interior disc.
pub fn vertex_density(t: &Tiling) -> f64 {
    let r = t.radius - MARGIN * t.edge_length();
    let n = t.vertices.iter().filter(|v| t.is_interior(v, MARGIN)).count();
    n as f64 / (PI * r * r)
}

/// Densities and coverage over the interior of `t`; the decagon coverage is
/// one minus the areal share of type-c faces and exists for P4 only.
pub fn pattern_metrics(t: &Tiling, fit: Option<&OrderMetricFit>) -> Result<PatternMetrics> {
    let mut m = PatternMetrics::from_density(vertex_density(t), fit);
    if t.vertices.is_empty() {
        return Ok(m);
    }
    let cl = Classifier::new(t)?;
    let r = t.radius - MARGIN * t.edge_length();
    let mut s1 = 0usize;
    for v in t.vertices.iter().filter(|v| t.is_interior(v, MARGIN)) {
        s1 += (cl.environment(v)? == Environment::S1) as usize;
    }
    m.s1_density = Some(s1 as f64 / (PI * r * r));
    if t.family == Family::P4 {
        let e = t.edges();
        let (mut total, mut c) = (0.0, 0.0);
        for f in t.faces.iter().filter(|f| t.face_is_interior(f, MARGIN)) {
            let a = f.area(&e);
            total += a;
            if cl.prototile(f)? == PrototileType::C {
                c += a;
            }
        }
        if total > 0.0 {
            m.decagon_coverage = Some(1.0 - c / total);
        }
    }
    Ok(m)
}

/// σ²/(ρπR²) at two radii, the second over the first.
pub fn variance_ratio(curve: &VarianceCurve, rho: f64, r_lo: f64, r_hi: f64) -> Option<f64> {
    let at = |r: f64| curve.radii.iter().position(|x| (x - r).abs() < 1e-9);
    let (i, j) = (at(r_lo)?, at(r_hi)?);
    let norm = |k: usize| curve.variance[k] / (rho * PI * curve.radii[k] * curve.radii[k]);
    Some(norm(j) / norm(i))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HyperPreset {
    pub name: &'static str,
    pub patch_radius: f64,
    pub disc_radius: f64,
    pub radii: Vec<f64>,
    pub samples: usize,
    pub fit_range: (f64, f64),
    pub tolerance: f64,
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

impl HyperPreset {
    pub fn paper() -> HyperPreset {
        let mut radii = grid(1.0, 9.0, 1.0);
        radii.extend(grid(10.0, 240.0, 1.0));
        HyperPreset {
            name: "paper",
            patch_radius: 500.0,
            disc_radius: 250.0,
            radii,
            samples: 62_500,
            fit_range: (10.0, 240.0),
            tolerance: 0.01,
        }
    }

    pub fn desk() -> HyperPreset {
        let mut radii = grid(1.0, 9.0, 1.0);
        radii.extend(grid(10.0, 90.0, 0.5));
        HyperPreset {
            name: "desk",
            patch_radius: 200.0,
            disc_radius: 100.0,
            radii,
            samples: 62_500,
            fit_range: (10.0, 90.0),
            tolerance: 0.02,
        }
    }

    pub fn by_name(name: &str) -> Result<HyperPreset> {
        match name {
            "paper" => Ok(Self::paper()),
            "desk" => Ok(Self::desk()),
            _ => Err(Error::InvalidArgument(format!("unknown preset `{name}`, expected paper or desk"))),
        }
    }
}

/// Normalised order metrics reported for the two tilings.
pub fn paper_normalized_b(family: Family) -> f64 {
    match family {
        Family::P3 => 0.5914,
        Family::P4 => 0.5903,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HyperReport {
    pub family: Family,
    pub preset: String,
    pub curve: VarianceCurve,
    pub fit: OrderMetricFit,
    pub metrics: PatternMetrics,
}

/// Variance curve, fit and normalisation for the vertices of `t`, sampling
/// around the patch centre.
pub fn analyze(t: &Tiling, preset: &HyperPreset, seed: u64) -> Result<HyperReport> {
    let (pts, support) = tiling_points(t);
    let disc = Disc::new(t.center, preset.disc_radius);
    let curve = number_variance(&pts, support, &preset.radii, preset.samples, disc, seed)?;
    let fit = fit_order_metric(&curve, preset.fit_range.0, preset.fit_range.1)?;
    let metrics = PatternMetrics::from_density(vertex_density(t), Some(&fit));
    Ok(HyperReport { family: t.family, preset: preset.name.to_string(), curve, fit, metrics })
}

impl HyperReport {
    pub fn to_json(&self) -> Value {
        let mut gamma = vec![Value::Null; self.curve.radii.len()];
        let first = self.curve.radii.len() - self.fit.gamma.len();
        for (i, g) in self.fit.gamma.iter().enumerate() {
            gamma[first + i] = json!(g[1]);
        }
        json!({
            "family": self.family.to_string(),
            "preset": self.preset,
            "seed": self.curve.seed,
            "samples": self.curve.samples,
            "sampling_disc_radius": self.curve.sampling_disc_radius,
            "fit_range": [self.fit.fit_range.0, self.fit.fit_range.1],
            "radii": self.curve.radii,
            "sigma2": self.curve.variance,
            "lambda": self.curve.lambda,
            "gamma": gamma,
            "B": self.fit.b,
            "C": self.fit.c,
            "fit_rms": self.fit.rms,
            "rho": self.metrics.rho,
            "phi": self.metrics.phi,
            "normalized_B": self.metrics.normalized_b,
        })
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(["radius", "sigma2", "lambda", "mean", "gamma"]).map_err(io)?;
        let first = self.curve.radii.len() - self.fit.gamma.len();
        for i in 0..self.curve.radii.len() {
            let g = if i >= first { self.fit.gamma[i - first][1].to_string() } else { String::new() };
            w.write_record([
                self.curve.radii[i].to_string(),
                self.curve.variance[i].to_string(),
                self.curve.lambda[i].to_string(),
                self.curve.mean[i].to_string(),
                g,
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Control point processes with known number variance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Control {
    /// Poisson-many uniform points at this density.
    Poisson { density: f64 },
    /// Exactly this many uniform points.
    Binomial { points: usize },
}

impl Control {
    pub fn sample(&self, region: Disc, seed: u64) -> Vec<[f64; 2]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = match *self {
            Control::Poisson { density } => Poisson::new(density * region.area()).unwrap().sample(&mut rng) as usize,
            Control::Binomial { points } => points,
        };
        (0..n)
            .map(|_| {
                let r = region.radius * rng.random::<f64>().sqrt();
                let a = 2.0 * PI * rng.random::<f64>();
                [region.center[0] + r * a.cos(), region.center[1] + r * a.sin()]
            })
            .collect()
    }

    /// σ²/(ρπR²) for a window of radius `r` inside `region`.
    pub fn expected_ratio(&self, region: Disc, r: f64) -> f64 {
        match self {
            Control::Poisson { .. } => 1.0,
            Control::Binomial { .. } => 1.0 - PI * r * r / region.area(),
        }
    }

    fn density(&self, region: Disc) -> f64 {
        match *self {
            Control::Poisson { density } => density,
            Control::Binomial { points } => points as f64 / region.area(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationPoint {
    pub radius: f64,
    pub ratio: f64,
    pub standard_error: f64,
    pub expected: f64,
}

impl CalibrationPoint {
    pub fn deviation(&self) -> f64 {
        (self.ratio - self.expected) / self.standard_error
    }
}

/// Mean σ²/(ρπR²) over independent realisations of a control process, with
/// the standard error of that mean.
pub fn calibrate(
    control: Control,
    region: Disc,
    disc: Disc,
    radii: &[f64],
    samples: usize,
    realizations: usize,
    seed: u64,
) -> Result<Vec<CalibrationPoint>> {
    let rho = control.density(region);
    let mut runs = Vec::with_capacity(realizations);
    for k in 0..realizations as u64 {
        let pts = control.sample(region, seed.wrapping_mul(0x9e37_79b9).wrapping_add(k));
        let c = number_variance(&pts, region, radii, samples, disc, seed ^ (k << 32))?;
        runs.push(c.variance.iter().zip(radii).map(|(v, r)| v / (rho * PI * r * r)).collect::<Vec<f64>>());
    }
    let m = realizations as f64;
    Ok(radii
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let mean = runs.iter().map(|x| x[i]).sum::<f64>() / m;
            let var = runs.iter().map(|x| (x[i] - mean).powi(2)).sum::<f64>() / (m - 1.0);
            CalibrationPoint { radius: r, ratio: mean, standard_error: (var / m).sqrt(), expected: control.expected_ratio(region, r) }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(radii: Vec<f64>, lambda: impl Fn(f64) -> f64) -> VarianceCurve {
        VarianceCurve {
            variance: radii.iter().map(|r| lambda(*r) * r).collect(),
            lambda: radii.iter().map(|r| lambda(*r)).collect(),
            mean: vec![0.0; radii.len()],
            radii,
            samples: 2,
            seed: 0,
            sampling_disc_radius: 1.0,
        }
    }

    #[test]
    fn exact_linear_model_is_recovered() {
        let c = curve(grid(10.0, 240.0, 1.0), |r| 0.5 + 3.0 / r);
        let f = fit_order_metric(&c, 10.0, 240.0).unwrap();
        assert!((f.b - 0.5).abs() < 1e-12 && (f.c - 3.0).abs() < 1e-12, "{} {}", f.b, f.c);
        assert_eq!(f.points, 231);
        assert!(f.rms < 1e-12);
    }

    #[test]
    fn too_few_radii_is_ill_conditioned() {
        let c = curve(grid(10.0, 40.0, 1.0), |r| 0.5 + 3.0 / r);
        assert!(matches!(fit_order_metric(&c, 10.0, 240.0), Err(Error::IllConditioned(_))));
    }

    #[test]
    fn running_average_of_a_constant() {
        let c = curve(grid(1.0, 100.0, 0.5), |_| 0.7);
        let f = fit_order_metric(&c, 10.0, 100.0).unwrap();
        assert_eq!(f.gamma[0][0], 10.0);
        assert!(f.gamma.iter().all(|g| (g[1] - 0.7).abs() < 1e-12));
        assert!(f.c.abs() < 1e-9);
    }

    #[test]
    fn buckets_are_exact() {
        let radii = [1.0, 2.0, 2.5, 7.0];
        let b = Buckets::new(&radii);
        for (d, k) in [(0.0, 0), (0.99, 0), (1.0, 1), (2.2, 2), (2.5, 3), (6.9, 3)] {
            assert_eq!(b.bucket(d * d), k, "{d}");
        }
    }

    #[test]
    fn index_counts_match_brute_force() {
        let pts = Control::Binomial { points: 3000 }.sample(Disc::new([0.0, 0.0], 30.0), 4);
        let idx = PointIndex::new(&pts, 2.0);
        for (c, r) in [([0.0, 0.0], 10.0), ([5.5, -3.0], 4.2), ([20.0, 20.0], 15.0), ([-100.0, 0.0], 5.0)] {
            let brute = pts.iter().filter(|p| (p[0] - c[0]).hypot(p[1] - c[1]) < r).count();
            assert_eq!(idx.count_within(c, r), brute);
        }
    }

    #[test]
    fn empty_set_has_zero_variance() {
        let c = number_variance(&[], Disc::new([0.0; 2], 10.0), &[1.0, 2.0], 50, Disc::new([0.0; 2], 5.0), 1).unwrap();
        assert!(c.variance.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn window_overflow_is_rejected() {
        let e = number_variance(&[[0.0, 0.0]], Disc::new([0.0; 2], 10.0), &[3.0, 6.0], 10, Disc::new([0.0; 2], 5.0), 1);
        assert!(matches!(e, Err(Error::WindowOverflow { .. })));
    }

    #[test]
    fn centres_are_inside_the_disc_and_reproducible() {
        let d = Disc::new([3.0, -1.0], 7.0);
        for i in 0..200 {
            let p = sample_center(&d, 9, i);
            assert!((p[0] - 3.0).hypot(p[1] + 1.0) <= 7.0);
            assert_eq!(p, sample_center(&d, 9, i));
        }
        assert_ne!(sample_center(&d, 9, 0), sample_center(&d, 10, 0));
    }

    #[test]
    fn variance_is_independent_of_worker_count() {
        let region = Disc::new([0.0; 2], 60.0);
        let pts = Control::Poisson { density: 1.0 }.sample(region, 2);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
                number_variance(&pts, region, &grid(1.0, 20.0, 1.0), 500, Disc::new([0.0; 2], 30.0), 5).unwrap()
            })
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn presets_fit_inside_their_patches() {
        for p in [HyperPreset::paper(), HyperPreset::desk()] {
            assert!(p.disc_radius + p.radii.last().unwrap() <= p.patch_radius - MARGIN);
            let n = p.radii.iter().filter(|r| **r >= p.fit_range.0 && **r <= p.fit_range.1).count();
            assert!(n >= MIN_FIT_POINTS);
        }
        assert_eq!(HyperPreset::paper().radii.iter().filter(|r| **r >= 10.0).count(), 231);
    }
}
