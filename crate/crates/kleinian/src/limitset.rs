//! Limit-set sampling by orbit enumeration of fixed points, deterministic
//! rasterization to 8-bit PGM (with optional PNG export), and the paired
//! shuffle figure.
//!
//! Enumeration tracks float matrices normalized per node; image points of
//! seeds within a relative cancellation threshold of a pole, or beyond the
//! magnitude cap, are recorded on the infinity flag instead of as finite
//! samples.

use num_complex::Complex64;
use serde::Serialize;
use std::collections::HashSet;

use crate::combine::conjugate_block;
use crate::error::{Error, Result};
use crate::marked::MarkedGroup;
use crate::moebius::{ExtComplex, MoebiusMap};
use crate::scalar::Scalar;
use crate::shuffle::ShufflePlan;

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub group: String,
    pub depth: usize,
    pub prune: f64,
    pub budget: u64,
    pub seed: u64,
}

/// A deterministic sample of limit points.
#[derive(Debug, Clone)]
pub struct PointCloud {
    pub points: Vec<(f64, f64)>,
    pub reached_infinity: bool,
    /// Set when the group looks elementary (fewer than two distinct finite
    /// seed points); the sample is then degenerate.
    pub degenerate: bool,
    pub provenance: Provenance,
}

impl PointCloud {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# group {} depth {} prune {} budget {} seed {}\n",
            self.provenance.group,
            self.provenance.depth,
            self.provenance.prune,
            self.provenance.budget,
            self.provenance.seed
        ));
        for (re, im) in &self.points {
            out.push_str(&format!("{re:?},{im:?}\n"));
        }
        if self.reached_infinity {
            out.push_str("inf,inf\n");
        }
        out
    }
}

// Raw float 2x2 helpers (projective; determinants are not maintained).
type M4 = [Complex64; 4];

fn mat_of(m: &MoebiusMap) -> M4 {
    m.entries_c64()
}

fn mat_mul(x: &M4, y: &M4) -> M4 {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

fn mat_normalize(m: &M4) -> M4 {
    let s = m.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    if s == 0.0 || !s.is_finite() {
        return *m;
    }
    [m[0] / s, m[1] / s, m[2] / s, m[3] / s]
}

/// Is the map a translation by an (approximate) real integer, i.e. in J up
/// to float noise? Scale-free test on the normalized matrix.
fn is_xi_power(m: &M4, tol: f64) -> bool {
    let s = m.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    if s == 0.0 {
        return false;
    }
    let (a, b, c, d) = (m[0] / s, m[1] / s, m[2] / s, m[3] / s);
    if c.norm() > tol || (a - d).norm() > tol {
        return false;
    }
    if a.norm() < tol {
        return false;
    }
    let t = b / a;
    t.im.abs() <= tol && (t.re - t.re.round()).abs() <= tol
}

struct Enumerator {
    signed: Vec<M4>,
    n: usize,
    depth: usize,
    prune: f64,
    budget: u64,
    grid: f64,
    r_max: f64,
    seeds: Vec<Complex64>,
    visited: u64,
    seen_cells: HashSet<(i64, i64)>,
    points: Vec<(f64, f64)>,
    reached_infinity: bool,
    // Reference disk for the shrink prune (center, radius).
    ref_disk: (Complex64, f64),
}

impl Enumerator {
    fn emit(&mut self, m: &M4) {
        for &p in &self.seeds {
            let den = m[2] * p + m[3];
            let den_scale = m[2].norm() * p.norm() + m[3].norm();
            if den.norm() <= 1e-6 * den_scale {
                self.reached_infinity = true;
                continue;
            }
            let w = (m[0] * p + m[1]) / den;
            if !w.re.is_finite() || !w.im.is_finite() || w.norm() > self.r_max {
                self.reached_infinity = true;
                continue;
            }
            let key = (
                (w.re / self.grid).floor() as i64,
                (w.im / self.grid).floor() as i64,
            );
            if self.seen_cells.insert(key) {
                self.points.push((w.re, w.im));
            }
        }
    }

    /// Image of the reference disk; returns the diameter when it is a
    /// bounded disk, infinity otherwise.
    fn image_diameter(&self, m: &M4) -> f64 {
        // Hermitian form of {|z - c| <= r}: A = -1, B = c, C = r^2 - |c|^2,
        // transformed by the adjugate (projective inverse).
        let (c0, r0) = self.ref_disk;
        let inv = [m[3], -m[1], -m[2], m[0]];
        let (al, be, ga, de) = (inv[0], inv[1], inv[2], inv[3]);
        let a = -1.0f64;
        let b = c0;
        let cc = r0 * r0 - c0.norm_sqr();
        let a2 = a * al.norm_sqr() + 2.0 * (b * al.conj() * ga).re + cc * ga.norm_sqr();
        let b2 = al.conj() * (a * be + b * de) + ga.conj() * (b.conj() * be + cc * de);
        let c2 = a * be.norm_sqr() + 2.0 * (b * be.conj() * de).re + cc * de.norm_sqr();
        if a2 >= -1e-300 {
            return f64::INFINITY; // half-plane or complement
        }
        let r_sq = (b2.norm_sqr() - a2 * c2) / (a2 * a2);
        if r_sq <= 0.0 {
            return f64::INFINITY;
        }
        2.0 * r_sq.sqrt()
    }

    fn dfs(&mut self, m: &M4, last: usize, len: usize) {
        self.visited += 1;
        self.emit(m);
        if len >= self.depth || self.visited >= self.budget {
            return;
        }
        if self.prune > 0.0 && self.image_diameter(m) < self.prune {
            return;
        }
        for l in 0..2 * self.n {
            let linv = if l < self.n { l + self.n } else { l - self.n };
            if linv == last {
                continue;
            }
            let next = mat_normalize(&mat_mul(m, &self.signed[l]));
            // Subtrees of elements of J repeat earlier J-cosets shifted.
            if len + 1 < self.depth && is_xi_power(&next, 1e-9) {
                self.emit(&next);
                self.visited += 1;
                continue;
            }
            self.dfs(&next, l, len + 1);
            if self.visited >= self.budget {
                return;
            }
        }
    }
}

/// Enumerate orbit images of the fixed points of the generators and their
/// pairwise products under reduced words of length <= depth. Points are
/// deduplicated on a grid of resolution prune/2; descent stops when the
/// image of a reference disk has diameter below `prune`, at the depth cap,
/// or at the node budget.
pub fn enumerate_limit_points(
    id: &str,
    gens: &[MoebiusMap],
    depth: usize,
    prune: f64,
    budget: u64,
) -> Result<PointCloud> {
    if gens.is_empty() {
        return Err(Error::Precondition("no generators".into()));
    }
    let mut seeds: Vec<Complex64> = Vec::new();
    let mut reached_infinity = false;
    let push_fixed = |m: &MoebiusMap, seeds: &mut Vec<Complex64>, inf: &mut bool| {
        if m.is_identity() {
            return;
        }
        if let Ok(fps) = m.fixed_points() {
            for fp in fps {
                match fp {
                    ExtComplex::Infinity => *inf = true,
                    ExtComplex::Finite(s) => {
                        let z = s.to_c64();
                        if z.re.is_finite() && z.im.is_finite() {
                            seeds.push(z);
                        }
                    }
                }
            }
        }
    };
    for g in gens {
        push_fixed(g, &mut seeds, &mut reached_infinity);
    }
    // Both orders, so the seed set is invariant under inverting generators
    // (fixed points of g h and of h^-1 g^-1 agree pairwise).
    for i in 0..gens.len() {
        for j in 0..gens.len() {
            if i != j {
                push_fixed(&gens[i].compose(&gens[j]), &mut seeds, &mut reached_infinity);
            }
        }
    }
    seeds.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    seeds.dedup_by(|a, b| (a.re - b.re).abs() < 1e-12 && (a.im - b.im).abs() < 1e-12);

    let mut distinct = 0;
    {
        let mut last: Option<Complex64> = None;
        for &s in &seeds {
            if last.map_or(true, |p| (p - s).norm() > 1e-9) {
                distinct += 1;
            }
            last = Some(s);
        }
    }
    let degenerate = distinct < 2;

    let scale = seeds
        .iter()
        .map(|z| z.norm())
        .fold(1.0f64, f64::max);
    let center = if seeds.is_empty() {
        Complex64::new(0.0, 0.0)
    } else {
        seeds.iter().sum::<Complex64>() / seeds.len() as f64
    };
    let radius = seeds
        .iter()
        .map(|z| (z - center).norm())
        .fold(1.0f64, f64::max)
        * 1.5;

    let mut e = Enumerator {
        signed: gens
            .iter()
            .map(mat_of)
            .chain(gens.iter().map(|g| mat_of(&g.inverse())))
            .collect(),
        n: gens.len(),
        depth,
        prune,
        budget: budget.max(1),
        grid: (prune / 2.0).max(1e-12),
        r_max: (1e8f64).max(1e4 * scale),
        seeds,
        visited: 0,
        seen_cells: HashSet::new(),
        points: Vec::new(),
        reached_infinity,
        ref_disk: (center, radius),
    };
    let identity = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
    ];
    // Root: emit the seeds themselves, then expand (the root is in J but its
    // children are fresh).
    e.emit(&identity);
    let signed = e.signed.clone();
    for (l, m) in signed.iter().enumerate() {
        if e.visited >= e.budget {
            break;
        }
        e.dfs(&mat_normalize(m), l, 1);
    }
    Ok(PointCloud {
        points: e.points,
        reached_infinity: e.reached_infinity,
        degenerate,
        provenance: Provenance {
            group: id.into(),
            depth,
            prune,
            budget,
            seed: 0,
        },
    })
}

/// Grayscale raster with byte-exact PGM serialization.
#[derive(Debug, Clone)]
pub struct RasterImage {
    pub width: usize,
    pub height: usize,
    /// (re_min, im_min, re_max, im_max)
    pub viewport: (f64, f64, f64, f64),
    pub pixels: Vec<u8>,
}

/// Bin points to pixels with log-scaled intensity. Guide lines (horizontal
/// heights) are drawn at a fixed low intensity underneath the points.
pub fn rasterize(
    cloud: &PointCloud,
    viewport: (f64, f64, f64, f64),
    width: usize,
    height: usize,
    guide_heights: &[f64],
) -> Result<RasterImage> {
    let (re0, im0, re1, im1) = viewport;
    if !(re1 > re0 && im1 > im0) || width == 0 || height == 0 {
        return Err(Error::Precondition("degenerate viewport".into()));
    }
    let mut counts = vec![0u32; width * height];
    for &(re, im) in &cloud.points {
        if !(re >= re0 && re < re1 && im >= im0 && im < im1) {
            continue;
        }
        let px = (((re - re0) / (re1 - re0)) * width as f64) as usize;
        let py = (((im1 - im) / (im1 - im0)) * height as f64) as usize;
        let px = px.min(width - 1);
        let py = py.min(height - 1);
        counts[py * width + px] += 1;
    }
    let max = counts.iter().copied().max().unwrap_or(0);
    let mut pixels = vec![0u8; width * height];
    if max > 0 {
        let denom = (1.0 + max as f64).ln();
        for (p, &c) in pixels.iter_mut().zip(&counts) {
            if c > 0 {
                *p = (255.0 * (1.0 + c as f64).ln() / denom).round() as u8;
            }
        }
    }
    for &h in guide_heights {
        if h <= im0 || h >= im1 {
            continue;
        }
        let py = (((im1 - h) / (im1 - im0)) * height as f64) as usize;
        let py = py.min(height - 1);
        for x in 0..width {
            let p = &mut pixels[py * width + x];
            *p = (*p).max(64);
        }
    }
    Ok(RasterImage {
        width,
        height,
        viewport,
        pixels,
    })
}

impl RasterImage {
    /// Binary PGM (P5) with deterministic provenance comments.
    pub fn to_pgm(&self, comments: &[String]) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"P5\n");
        for c in comments {
            out.extend_from_slice(format!("# {c}\n").as_bytes());
        }
        out.extend_from_slice(
            format!(
                "# viewport {:?} {:?} {:?} {:?}\n",
                self.viewport.0, self.viewport.1, self.viewport.2, self.viewport.3
            )
            .as_bytes(),
        );
        out.extend_from_slice(format!("{} {}\n255\n", self.width, self.height).as_bytes());
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn write_png(&self, path: &std::path::Path) -> Result<()> {
        let img = image::GrayImage::from_raw(
            self.width as u32,
            self.height as u32,
            self.pixels.clone(),
        )
        .ok_or_else(|| Error::Precondition("raster buffer mismatch".into()))?;
        img.save(path)
            .map_err(|e| Error::Precondition(format!("png write failed: {e}")))?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RenderParams {
    pub depth: usize,
    pub prune: f64,
    pub budget: u64,
    pub width: usize,
    pub height: usize,
    /// Explicit viewport; None picks two horizontal periods around the
    /// stack of strips.
    pub viewport: Option<(f64, f64, f64, f64)>,
}

impl Default for RenderParams {
    fn default() -> Self {
        RenderParams {
            depth: 6,
            prune: 1e-4,
            budget: 2_000_000,
            width: 480,
            height: 640,
            viewport: None,
        }
    }
}

/// Conjugated generator list of blocks placed at given heights (render-only
/// path; no combination certificates involved).
fn placed_gens(blocks: &[MarkedGroup], heights: &[Scalar]) -> Result<Vec<MoebiusMap>> {
    let mut out = Vec::new();
    for (b, h) in blocks.iter().zip(heights) {
        let placed = conjugate_block(b, h)?;
        out.extend(placed.gens);
    }
    Ok(out)
}

/// Side-by-side renders of the stacked group (plan heights) and the
/// shuffled companion (heights 4C l), with strip guide lines at the
/// certified bounds a_j +- C.
pub fn render_shuffle_figure(
    plan: &ShufflePlan,
    rep_idx: usize,
    blocks: &[MarkedGroup],
    params: &RenderParams,
) -> Result<(RasterImage, RasterImage)> {
    use num_traits::ToPrimitive;
    let tau = plan
        .reps
        .get(rep_idx)
        .ok_or_else(|| Error::Precondition(format!("no rep {rep_idx}")))?;

    let stacked_heights: Vec<Scalar> = plan
        .heights
        .iter()
        .map(|a| {
            Scalar::exact_big(
                num_rational::BigRational::from_integer(a.clone()),
                num_rational::BigRational::from_integer(0.into()),
            )
        })
        .collect();
    let stacked_f: Vec<f64> = plan
        .heights
        .iter()
        .map(|a| a.to_f64().unwrap_or(f64::NAN))
        .collect();
    let shuffled_blocks: Vec<MarkedGroup> = (0..plan.k)
        .map(|l0| blocks[tau.apply(l0)].clone())
        .collect();
    let shuffled_heights: Vec<Scalar> = (0..plan.k)
        .map(|l0| Scalar::exact_int((4 * plan.c * (l0 as u64 + 1)) as i64, 0))
        .collect();
    let shuffled_f: Vec<f64> = (0..plan.k)
        .map(|l0| (4 * plan.c * (l0 as u64 + 1)) as f64)
        .collect();

    let c = plan.c as f64;
    let render_one = |id: String,
                      blocks: &[MarkedGroup],
                      heights: &[Scalar],
                      heights_f: &[f64]|
     -> Result<RasterImage> {
        let gens = placed_gens(blocks, heights)?;
        let cloud = enumerate_limit_points(&id, &gens, params.depth, params.prune, params.budget)?;
        let lo = heights_f.first().unwrap() - 2.0 * c;
        let hi = heights_f.last().unwrap() + 2.0 * c;
        let viewport = params.viewport.unwrap_or((-0.5, lo, 1.5, hi));
        let guides: Vec<f64> = heights_f
            .iter()
            .flat_map(|&a| [a - c, a + c])
            .collect();
        rasterize(&cloud, viewport, params.width, params.height, &guides)
    };

    let left = render_one(
        format!("Gamma_{}", plan.k),
        blocks,
        &stacked_heights,
        &stacked_f,
    )?;
    let right = render_one(
        format!("Gamma_{}^{}", plan.k, tau.to_cycles()),
        &shuffled_blocks,
        &shuffled_heights,
        &shuffled_f,
    )?;
    Ok((left, right))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::punctured_torus_group;
    use crate::scalar::Mode;

    #[test]
    fn cyclic_group_gives_degenerate_cloud() {
        let xi = MoebiusMap::xi_one(Mode::Exact);
        let cloud = enumerate_limit_points("J", &[xi], 4, 1e-4, 10_000).unwrap();
        assert!(cloud.degenerate);
        assert!(cloud.reached_infinity);
        assert!(cloud.points.is_empty());
    }

    #[test]
    fn torus_cloud_lies_on_real_line() {
        let g = punctured_torus_group().unwrap();
        let cloud = enumerate_limit_points("torus", &g.gens, 6, 1e-4, 200_000).unwrap();
        assert!(!cloud.degenerate);
        assert!(cloud.points.len() > 100);
        for &(_, im) in &cloud.points {
            assert!(im.abs() <= 1e-9, "off-line point at im = {im}");
        }
    }

    #[test]
    fn cloud_is_monotone_in_depth() {
        let g = punctured_torus_group().unwrap();
        let shallow = enumerate_limit_points("t", &g.gens, 3, 1e-4, u64::MAX).unwrap();
        let deep = enumerate_limit_points("t", &g.gens, 4, 1e-4, u64::MAX).unwrap();
        let grid = 1e-4 / 2.0;
        let cells: std::collections::HashSet<(i64, i64)> = deep
            .points
            .iter()
            .map(|&(re, im)| ((re / grid).floor() as i64, (im / grid).floor() as i64))
            .collect();
        for &(re, im) in &shallow.points {
            let key = ((re / grid).floor() as i64, (im / grid).floor() as i64);
            assert!(cells.contains(&key));
        }
    }

    #[test]
    fn cloud_invariant_under_generator_inversion() {
        let g = punctured_torus_group().unwrap();
        let inv_gens: Vec<MoebiusMap> = g.gens.iter().map(|m| m.inverse()).collect();
        let a = enumerate_limit_points("t", &g.gens, 4, 1e-4, u64::MAX).unwrap();
        let b = enumerate_limit_points("t", &inv_gens, 4, 1e-4, u64::MAX).unwrap();
        let to_cells = |c: &PointCloud| -> std::collections::HashSet<(i64, i64)> {
            c.points
                .iter()
                .map(|&(re, im)| ((re / 5e-5).floor() as i64, (im / 5e-5).floor() as i64))
                .collect()
        };
        assert_eq!(to_cells(&a), to_cells(&b));
    }

    #[test]
    fn vertical_translation_equivariance() {
        let g = punctured_torus_group().unwrap();
        let shifted = g
            .conjugated_vertical(&Scalar::exact_int(3, 0), "up")
            .unwrap();
        let a = enumerate_limit_points("t", &g.gens, 4, 1e-3, u64::MAX).unwrap();
        let b = enumerate_limit_points("u", &shifted.gens, 4, 1e-3, u64::MAX).unwrap();
        let cells = |c: &PointCloud, dy: f64| -> std::collections::HashSet<(i64, i64)> {
            c.points
                .iter()
                .map(|&(re, im)| {
                    (
                        (re / 1e-3).round() as i64,
                        ((im + dy) / 1e-3).round() as i64,
                    )
                })
                .collect()
        };
        let ca = cells(&a, 3.0);
        let cb = cells(&b, 0.0);
        let common = ca.intersection(&cb).count();
        // Allow grid-boundary jitter but demand near-total agreement.
        assert!(common * 10 >= ca.len() * 9, "{common} of {}", ca.len());
    }

    #[test]
    fn rasterize_blank_and_clip() {
        let empty = PointCloud {
            points: vec![],
            reached_infinity: false,
            degenerate: true,
            provenance: Provenance {
                group: "e".into(),
                depth: 0,
                prune: 1e-4,
                budget: 0,
                seed: 0,
            },
        };
        let img = rasterize(&empty, (0.0, 0.0, 1.0, 1.0), 8, 8, &[]).unwrap();
        assert!(img.pixels.iter().all(|&p| p == 0));

        let outside = PointCloud {
            points: vec![(5.0, 5.0)],
            ..empty.clone()
        };
        let img2 = rasterize(&outside, (0.0, 0.0, 1.0, 1.0), 8, 8, &[]).unwrap();
        assert_eq!(img.pixels, img2.pixels);
        assert!(rasterize(&empty, (1.0, 0.0, 0.0, 1.0), 8, 8, &[]).is_err());
    }

    #[test]
    fn pgm_bytes_deterministic() {
        let g = punctured_torus_group().unwrap();
        let mk = || {
            let cloud =
                enumerate_limit_points("t", &g.gens, 5, 1e-4, 100_000).unwrap();
            rasterize(&cloud, (-0.5, -1.0, 1.5, 1.0), 64, 64, &[0.0])
                .unwrap()
                .to_pgm(&["determinism-check".into()])
        };
        assert_eq!(mk(), mk());
    }
}
