//! Multi-scale zero-mean normalized cross-correlation.
//!
//! The correlation numerator is computed with one FFT of the image per call
//! and one per template/scale; window statistics come from integral images.

use std::path::Path;
use std::sync::Arc;

use image::imageops::{self, FilterType};
use image::GrayImage;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::Error;
use crate::extract::Warning;
use crate::geometry::{iou, BBox};
use crate::model::IconClass;

/// Default acceptance score.
pub const NCC_THRESHOLD: f64 = 0.8;
/// Default scan scales.
pub const SCALES: [f64; 4] = [0.75, 1.0, 1.25, 1.5];
/// Overlapping reports at or above this IoU collapse to the best one.
const COLLAPSE_IOU: f64 = 0.3;

const BUNDLED: [(IconClass, &[u8]); 2] = [
    (IconClass::AdChoicesTriangle, include_bytes!("../../assets/templates/ad_choices_triangle.png")),
    (IconClass::AdClose, include_bytes!("../../assets/templates/ad_close.png")),
];

/// A grayscale icon patch to search for.
#[derive(Debug, Clone)]
pub struct Template {
    pub name: IconClass,
    pub patch: GrayImage,
}

impl Template {
    /// The patch resampled the way the matcher resamples it.
    pub fn at_scale(&self, scale: f64) -> GrayImage {
        scaled(&self.patch, scale)
    }

    /// Size in pixels at scale 1.
    pub fn nominal_size(&self) -> (u32, u32) {
        self.patch.dimensions()
    }

    /// The templates shipped with the crate.
    pub fn bundled() -> Vec<Template> {
        BUNDLED
            .iter()
            .map(|(name, bytes)| Template {
                name: *name,
                patch: image::load_from_memory(bytes).expect("bundled template decodes").to_luma8(),
            })
            .collect()
    }

    /// Bundled templates, with any `<class>.png` in `dir` replacing the
    /// bundled patch of the same class.
    pub fn load_dir(dir: &Path) -> Result<Vec<Template>, Error> {
        if !dir.is_dir() {
            return Err(Error::MissingInput(dir.to_path_buf()));
        }
        let mut out = Self::bundled();
        for t in &mut out {
            let path = dir.join(format!("{}.png", t.name));
            if path.exists() {
                t.patch = image::open(&path).map_err(|source| Error::Image { path, source })?.to_luma8();
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemplateMatch {
    pub bbox: BBox,
    pub icon: IconClass,
    pub score: f64,
    pub scale: f64,
}

/// Summed-area tables of pixel values and their squares, (w+1)x(h+1).
struct Integral {
    w: usize,
    sum: Vec<f64>,
    sq: Vec<f64>,
}

impl Integral {
    fn new(img: &GrayImage) -> Self {
        let (w, h) = (img.width() as usize, img.height() as usize);
        let stride = w + 1;
        let mut sum = vec![0.0; stride * (h + 1)];
        let mut sq = vec![0.0; stride * (h + 1)];
        for y in 0..h {
            let (mut rs, mut rq) = (0.0, 0.0);
            for x in 0..w {
                let v = f64::from(img.as_raw()[y * w + x]);
                rs += v;
                rq += v * v;
                sum[(y + 1) * stride + x + 1] = sum[y * stride + x + 1] + rs;
                sq[(y + 1) * stride + x + 1] = sq[y * stride + x + 1] + rq;
            }
        }
        Integral { w, sum, sq }
    }

    fn window(&self, x: usize, y: usize, tw: usize, th: usize) -> (f64, f64) {
        let s = self.w + 1;
        let at = |t: &[f64], xx: usize, yy: usize| t[yy * s + xx];
        let f = |t: &[f64]| at(t, x + tw, y + th) - at(t, x, y + th) - at(t, x + tw, y) + at(t, x, y);
        (f(&self.sum), f(&self.sq))
    }
}

/// Row-major 2-D FFT in place.
fn fft2(data: &mut [Complex64], w: usize, h: usize, row: &Arc<dyn Fft<f64>>, col: &Arc<dyn Fft<f64>>) {
    for r in data.chunks_exact_mut(w) {
        row.process(r);
    }
    let mut column = vec![Complex64::default(); h];
    for x in 0..w {
        for y in 0..h {
            column[y] = data[y * w + x];
        }
        col.process(&mut column);
        for y in 0..h {
            data[y * w + x] = column[y];
        }
    }
}

/// Precomputed image transforms reused across templates and scales.
struct Correlator {
    w: usize,
    h: usize,
    spectrum: Vec<Complex64>,
    integral: Integral,
    fwd: (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>),
    inv: (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>),
}

impl Correlator {
    fn new(img: &GrayImage) -> Self {
        let (w, h) = (img.width() as usize, img.height() as usize);
        let mut planner = FftPlanner::new();
        let fwd = (planner.plan_fft_forward(w), planner.plan_fft_forward(h));
        let inv = (planner.plan_fft_inverse(w), planner.plan_fft_inverse(h));
        let mut spectrum: Vec<Complex64> = img.as_raw().iter().map(|&v| Complex64::new(f64::from(v), 0.0)).collect();
        fft2(&mut spectrum, w, h, &fwd.0, &fwd.1);
        Correlator { w, h, spectrum, integral: Integral::new(img), fwd, inv }
    }

    /// NCC scores for every valid placement, row-major with width
    /// `w - tw + 1`. Zero-variance windows score 0.
    fn scores(&self, patch: &GrayImage) -> Vec<f64> {
        let (tw, th) = (patch.width() as usize, patch.height() as usize);
        let n = (tw * th) as f64;
        let mean = patch.as_raw().iter().map(|&v| f64::from(v)).sum::<f64>() / n;
        let mut t = vec![Complex64::default(); self.w * self.h];
        let mut t_energy = 0.0;
        for y in 0..th {
            for x in 0..tw {
                let v = f64::from(patch.as_raw()[y * tw + x]) - mean;
                t[y * self.w + x] = Complex64::new(v, 0.0);
                t_energy += v * v;
            }
        }
        let (ow, oh) = (self.w - tw + 1, self.h - th + 1);
        if t_energy < 1e-9 {
            return vec![0.0; ow * oh];
        }
        fft2(&mut t, self.w, self.h, &self.fwd.0, &self.fwd.1);
        for (a, b) in t.iter_mut().zip(&self.spectrum) {
            *a = b * a.conj();
        }
        fft2(&mut t, self.w, self.h, &self.inv.0, &self.inv.1);
        let norm = (self.w * self.h) as f64;

        let mut out = Vec::with_capacity(ow * oh);
        for y in 0..oh {
            for x in 0..ow {
                let (s, sq) = self.integral.window(x, y, tw, th);
                let var = sq - s * s / n;
                // integer pixels: any non-constant window has var >= 1 - 1/n
                if var < 0.25 {
                    out.push(0.0);
                    continue;
                }
                let num = t[y * self.w + x].re / norm;
                out.push((num / (var * t_energy).sqrt()).clamp(-1.0, 1.0));
            }
        }
        out
    }
}

/// Zero-mean NCC of `patch` at every placement inside `image`, row-major
/// with width `image.width() - patch.width() + 1`. Empty when the patch
/// does not fit.
pub fn ncc_map(image: &GrayImage, patch: &GrayImage) -> Vec<f64> {
    if patch.width() > image.width() || patch.height() > image.height() || patch.width() == 0 || patch.height() == 0 {
        return Vec::new();
    }
    Correlator::new(image).scores(patch)
}

fn scaled(patch: &GrayImage, scale: f64) -> GrayImage {
    if scale == 1.0 {
        return patch.clone();
    }
    let w = ((f64::from(patch.width()) * scale).round() as u32).max(1);
    let h = ((f64::from(patch.height()) * scale).round() as u32).max(1);
    imageops::resize(patch, w, h, FilterType::Triangle)
}

/// Finds every template at every scale.
///
/// Reports 3x3 local maxima scoring at least `ncc_threshold`; reports that
/// overlap at IoU >= 0.3 collapse to the best score (ties: smaller box,
/// then box order). Output is sorted by reading order.
pub fn match_templates(
    image: &GrayImage,
    templates: &[Template],
    scales: &[f64],
    ncc_threshold: f64,
) -> (Vec<TemplateMatch>, Vec<Warning>) {
    let mut warnings = Vec::new();
    let mut found = Vec::new();
    if image.width() == 0 || image.height() == 0 {
        return (found, warnings);
    }
    let corr = Correlator::new(image);
    let (iw, ih) = image.dimensions();
    for t in templates {
        for &scale in scales {
            let patch = scaled(&t.patch, scale);
            let (tw, th) = patch.dimensions();
            if tw > iw || th > ih {
                warnings.push(Warning {
                    stage: "template",
                    message: format!("{} at scale {scale} ({tw}x{th}) exceeds the {iw}x{ih} image; scale skipped", t.name),
                });
                continue;
            }
            let scores = corr.scores(&patch);
            let (ow, oh) = ((iw - tw + 1) as usize, (ih - th + 1) as usize);
            for y in 0..oh {
                for x in 0..ow {
                    let s = scores[y * ow + x];
                    if s < ncc_threshold || !is_local_max(&scores, ow, oh, x, y) {
                        continue;
                    }
                    found.push(TemplateMatch {
                        bbox: BBox::from_xywh(x as u32, y as u32, tw, th),
                        icon: t.name,
                        score: s,
                        scale,
                    });
                }
            }
        }
    }
    found.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.bbox.area().cmp(&b.bbox.area()))
            .then(a.bbox.cmp(&b.bbox))
    });
    let mut kept: Vec<TemplateMatch> = Vec::new();
    for m in found {
        if kept.iter().all(|k| iou(&k.bbox, &m.bbox) < COLLAPSE_IOU) {
            kept.push(m);
        }
    }
    kept.sort_by_key(|m| m.bbox.reading_key());
    (kept, warnings)
}

fn is_local_max(scores: &[f64], w: usize, h: usize, x: usize, y: usize) -> bool {
    let s = scores[y * w + x];
    for ny in y.saturating_sub(1)..=(y + 1).min(h - 1) {
        for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
            if scores[ny * w + nx] > s {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::Luma;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Direct evaluation of the zero-mean NCC definition.
    fn naive_ncc(img: &GrayImage, patch: &GrayImage, x: u32, y: u32) -> f64 {
        let (tw, th) = patch.dimensions();
        let n = f64::from(tw * th);
        let px = |i: &GrayImage, a: u32, b: u32| f64::from(i.get_pixel(a, b)[0]);
        let mut mi = 0.0;
        let mut mt = 0.0;
        for v in 0..th {
            for u in 0..tw {
                mi += px(img, x + u, y + v);
                mt += px(patch, u, v);
            }
        }
        mi /= n;
        mt /= n;
        let (mut num, mut di, mut dt) = (0.0, 0.0, 0.0);
        for v in 0..th {
            for u in 0..tw {
                let a = px(img, x + u, y + v) - mi;
                let b = px(patch, u, v) - mt;
                num += a * b;
                di += a * a;
                dt += b * b;
            }
        }
        if di < 1e-9 || dt < 1e-9 {
            0.0
        } else {
            num / (di * dt).sqrt()
        }
    }

    fn noise(w: u32, h: u32, seed: u64) -> GrayImage {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GrayImage::from_fn(w, h, |_, _| Luma([rng.random()]))
    }

    #[test]
    fn fft_scores_agree_with_direct_definition() {
        let img = noise(37, 29, 1);
        let patch = noise(7, 5, 2);
        let map = ncc_map(&img, &patch);
        let ow = 37 - 7 + 1;
        for y in 0..(29 - 5 + 1) {
            for x in 0..ow {
                let want = naive_ncc(&img, &patch, x as u32, y as u32);
                assert!((map[y * ow + x] - want).abs() < 1e-9, "({x},{y})");
            }
        }
    }

    #[test]
    fn exact_paste_is_found_with_unit_score() {
        let t = Template::bundled().remove(0);
        let mut img = GrayImage::from_pixel(120, 100, Luma([200]));
        imageops::replace(&mut img, &t.patch, 40, 40);
        let (m, _) = match_templates(&img, &[t.clone()], &SCALES, NCC_THRESHOLD);
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].bbox, BBox::from_xywh(40, 40, 16, 16));
        assert!(m[0].score >= 0.999);
        assert_eq!(m[0].scale, 1.0);
    }

    #[test]
    fn uniform_image_has_no_detections() {
        let img = GrayImage::from_pixel(64, 64, Luma([128]));
        let (m, w) = match_templates(&img, &Template::bundled(), &SCALES, NCC_THRESHOLD);
        assert!(m.is_empty());
        assert!(w.is_empty());
        assert!(ncc_map(&img, &Template::bundled()[0].patch).iter().all(|&s| s == 0.0));
    }

    #[test]
    fn oversized_scale_is_skipped_with_warning() {
        let img = noise(19, 19, 3);
        let (_, w) = match_templates(&img, &Template::bundled()[..1], &SCALES, NCC_THRESHOLD);
        assert_eq!(w.len(), 2);
        assert!(w[0].message.contains("scale 1.25"));
    }

    #[test]
    fn scores_stay_in_range() {
        let img = noise(50, 40, 4);
        for t in Template::bundled() {
            assert!(ncc_map(&img, &t.patch).iter().all(|s| (-1.0..=1.0).contains(s)));
        }
    }

    #[test]
    fn load_dir_overrides_bundled_patch() {
        let dir = tempfile::tempdir().unwrap();
        let custom = noise(10, 12, 5);
        custom.save(dir.path().join("ad_close.png")).unwrap();
        let ts = Template::load_dir(dir.path()).unwrap();
        let close = ts.iter().find(|t| t.name == IconClass::AdClose).unwrap();
        assert_eq!(close.patch, custom);
        assert!(Template::load_dir(&dir.path().join("nope")).is_err());
    }

    #[test]
    fn random_noise_scores_are_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let img = GrayImage::from_fn(64, 64, |_, _| Luma([rng.random_range(0..=255u8)]));
        let (m, _) = match_templates(&img, &Template::bundled(), &SCALES, NCC_THRESHOLD);
        assert!(m.is_empty());
    }
}
