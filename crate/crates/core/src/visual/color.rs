//! Dominant background and contrasting foreground color of a crop.

use std::collections::HashMap;

use image::{GenericImageView, Pixel, Rgb as Px};

use crate::error::VisualError;
use crate::geometry::BBox;
use crate::model::{Rgb, Screen};

/// Bits dropped per channel when bucketing: 32 levels.
const QUANT_SHIFT: u8 = 3;
/// Minimum share of pixels for a bucket to be a foreground candidate.
const FOREGROUND_FLOOR: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColorPair {
    pub background: Rgb,
    pub foreground: Rgb,
}

/// Euclidean distance in RGB space.
pub fn contrast(a: Rgb, b: Rgb) -> f64 {
    a.0.iter()
        .zip(b.0.iter())
        .map(|(&x, &y)| {
            let d = f64::from(x) - f64::from(y);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

#[derive(Default)]
struct Bucket {
    count: u64,
    sum: [u64; 3],
}

impl Bucket {
    fn mean(&self) -> Rgb {
        let c = |i: usize| ((self.sum[i] as f64 / self.count as f64).round()) as u8;
        Rgb([c(0), c(1), c(2)])
    }
}

/// Background = most populated quantized bucket; foreground = the bucket
/// with at least 2% of the pixels farthest from it. Buckets are represented
/// by their mean color. Count ties go to the lower bucket key.
pub fn extract_colors<I>(crop: &I) -> Result<ColorPair, VisualError>
where
    I: GenericImageView<Pixel = Px<u8>>,
{
    let (w, h) = crop.dimensions();
    if w == 0 || h == 0 {
        return Err(VisualError::EmptyCrop);
    }
    let mut hist: HashMap<[u8; 3], Bucket> = HashMap::new();
    for (_, _, px) in crop.pixels() {
        let c = px.channels();
        let b = hist.entry([c[0] >> QUANT_SHIFT, c[1] >> QUANT_SHIFT, c[2] >> QUANT_SHIFT]).or_default();
        b.count += 1;
        for i in 0..3 {
            b.sum[i] += u64::from(c[i]);
        }
    }
    let mut buckets: Vec<([u8; 3], Bucket)> = hist.into_iter().collect();
    buckets.sort_by(|a, b| b.1.count.cmp(&a.1.count).then(a.0.cmp(&b.0)));
    let background = buckets[0].1.mean();
    let total = u64::from(w) * u64::from(h);
    let foreground = buckets[1..]
        .iter()
        .filter(|(_, b)| b.count as f64 >= FOREGROUND_FLOOR * total as f64)
        .map(|(key, b)| (b.mean(), *key))
        .max_by(|a, b| contrast(a.0, background).total_cmp(&contrast(b.0, background)).then(b.1.cmp(&a.1)))
        .map(|(c, _)| c)
        .unwrap_or(background);
    Ok(ColorPair { background, foreground })
}

/// Fills `bg_color`/`fg_color` of every element and the screen background.
/// No-op for screens without a raster.
pub fn annotate_colors(screen: &mut Screen) {
    let Some(img) = screen.image.as_ref() else {
        return;
    };
    let (w, h) = img.dimensions();
    if let Ok(p) = extract_colors(img) {
        screen.background = Some(p.background);
    }
    let mut pairs = Vec::with_capacity(screen.elements.len());
    for e in &screen.elements {
        let b: BBox = e.bbox.clip(w, h);
        pairs.push(if b.is_valid() { extract_colors(&*img.view(b.x1, b.y1, b.width(), b.height())).ok() } else { None });
    }
    for (e, p) in screen.elements.iter_mut().zip(pairs) {
        if let Some(p) = p {
            e.bg_color = Some(p.background);
            e.fg_color = Some(p.foreground);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::RgbImage;
    use proptest::prelude::*;

    const WHITE: [u8; 3] = [255, 255, 255];
    const BLACK: [u8; 3] = [0, 0, 0];

    /// 10x10 crop painted row-major from (count, color) runs.
    fn striped(runs: &[(u32, [u8; 3])]) -> RgbImage {
        let mut img = RgbImage::new(10, 10);
        let mut i = 0;
        for &(n, c) in runs {
            for _ in 0..n {
                img.put_pixel(i % 10, i / 10, Px(c));
                i += 1;
            }
        }
        assert_eq!(i, 100);
        img
    }

    #[test]
    fn contrast_values() {
        assert_eq!(contrast(Rgb(BLACK), Rgb(BLACK)), 0.0);
        assert!((contrast(Rgb(BLACK), Rgb(WHITE)) - 3f64.sqrt() * 255.0).abs() < 1e-9);
        assert!((contrast(Rgb(BLACK), Rgb(WHITE)) - 441.67).abs() < 0.01);
        assert!((contrast(Rgb([255, 0, 0]), Rgb([0, 255, 0])) - 360.62).abs() < 0.01);
    }

    #[test]
    fn uniform_crop_has_equal_pair() {
        let p = extract_colors(&striped(&[(100, [20, 40, 200])])).unwrap();
        assert_eq!(p.background, Rgb([20, 40, 200]));
        assert_eq!(p.foreground, p.background);
    }

    #[test]
    fn majority_white_minority_black() {
        let p = extract_colors(&striped(&[(70, WHITE), (30, BLACK)])).unwrap();
        assert_eq!(p.background, Rgb(WHITE));
        assert_eq!(p.foreground, Rgb(BLACK));
    }

    #[test]
    fn farthest_bucket_wins_foreground() {
        let gray = [211, 211, 211];
        let red = [255, 0, 0];
        // red is farther from white than light gray
        assert!(contrast(Rgb(WHITE), Rgb(red)) > contrast(Rgb(WHITE), Rgb(gray)));
        let p = extract_colors(&striped(&[(60, WHITE), (25, red), (15, gray)])).unwrap();
        assert_eq!(p.background, Rgb(WHITE));
        assert_eq!(p.foreground, Rgb(red));
    }

    #[test]
    fn rare_pixels_are_not_foreground() {
        let p = extract_colors(&striped(&[(99, WHITE), (1, BLACK)])).unwrap();
        assert_eq!(p.foreground, Rgb(WHITE));
    }

    #[test]
    fn empty_crop_is_an_error() {
        assert_eq!(extract_colors(&RgbImage::new(0, 4)), Err(VisualError::EmptyCrop));
    }

    #[test]
    fn bucket_mean_represents_antialiased_shades() {
        let p = extract_colors(&striped(&[(50, [250, 250, 250]), (30, [254, 254, 254]), (20, BLACK)])).unwrap();
        assert_eq!(p.background, Rgb([252, 252, 252]));
    }

    proptest! {
        #[test]
        fn background_is_unique_mode(
            colors in prop::collection::vec(prop::array::uniform3(0u8..32), 2..5),
            counts in prop::collection::vec(1u32..30, 5),
        ) {
            // distinct bucket keys, one color per bucket
            let mut keys: Vec<[u8; 3]> = colors.clone();
            keys.sort();
            keys.dedup();
            prop_assume!(keys.len() >= 2);
            let mut runs: Vec<(u32, [u8; 3])> = keys.iter().zip(&counts).map(|(k, n)| (*n, [k[0] << 3, k[1] << 3, k[2] << 3])).collect();
            let used: u32 = runs.iter().map(|r| r.0).sum();
            prop_assume!(used < 100);
            runs[0].0 += 100 - used;
            let max = runs.iter().map(|r| r.0).max().unwrap();
            prop_assume!(runs.iter().filter(|r| r.0 == max).count() == 1);
            let mode = runs.iter().find(|r| r.0 == max).unwrap().1;
            let p = extract_colors(&striped(&runs)).unwrap();
            prop_assert_eq!(p.background, Rgb(mode));
        }

        #[test]
        fn contrast_is_symmetric(a in prop::array::uniform3(any::<u8>()), b in prop::array::uniform3(any::<u8>())) {
            prop_assert_eq!(contrast(Rgb(a), Rgb(b)), contrast(Rgb(b), Rgb(a)));
            prop_assert_eq!(contrast(Rgb(a), Rgb(b)) == 0.0, a == b);
        }
    }
}
