//! Reproducible synthetic scenes for end-to-end checks and ablations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::oracle::{GranularityRule, MockScene};
use crate::raster::{self, BinaryMask, LabelMap, Rect, ScalarField};
use crate::refine::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteSpec {
    pub scenes: usize,
    pub width: usize,
    pub height: usize,
    /// Including the background class 0.
    pub class_count: u32,
    pub seed: u64,
    pub noise: u32,
    pub granularity: GranularityRule,
}

impl Default for SuiteSpec {
    fn default() -> Self {
        SuiteSpec {
            scenes: 20,
            width: 96,
            height: 96,
            class_count: 4,
            seed: 0,
            noise: 0,
            granularity: GranularityRule::Nested,
        }
    }
}

/// Pixels left between any two shapes.
const GAP: usize = 4;
const MIN_SIDE: usize = 24;
const MAX_SIDE: usize = 44;

fn shape_mask(w: usize, h: usize, rect: Rect, ellipse: bool) -> BinaryMask {
    if !ellipse {
        return BinaryMask::from_rect(w, h, rect);
    }
    let (cx, cy) = ((rect.x0 + rect.x1) as f64 / 2.0, (rect.y0 + rect.y1) as f64 / 2.0);
    let (rx, ry) = (rect.width() as f64 / 2.0, rect.height() as f64 / 2.0);
    BinaryMask::from_fn(w, h, |x, y| {
        let dx = (x as f64 + 0.5 - cx) / rx;
        let dy = (y as f64 + 0.5 - cy) / ry;
        dx * dx + dy * dy <= 1.0
    })
}

fn separated(a: Rect, b: Rect) -> bool {
    a.x1 + GAP <= b.x0 || b.x1 + GAP <= a.x0 || a.y1 + GAP <= b.y0 || b.y1 + GAP <= a.y0
}

/// Scene `index` of the suite: two to four rectangles or ellipses of
/// classes `1..class_count` on a class-0 background, never touching.
pub fn generate_scene(spec: &SuiteSpec, index: usize) -> MockScene {
    let (w, h) = (spec.width, spec.height);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, &[index as u64]));
    let want = rng.gen_range(2..=4);
    let max_side = MAX_SIDE.min(w.saturating_sub(2)).min(h.saturating_sub(2));
    let min_side = MIN_SIDE.min(max_side);
    let mut boxes: Vec<Rect> = Vec::new();
    let mut attempts = 0;
    while boxes.len() < want && attempts < 2000 {
        attempts += 1;
        let sw = rng.gen_range(min_side..=max_side);
        let sh = rng.gen_range(min_side..=max_side);
        let x0 = rng.gen_range(1..=w - sw - 1);
        let y0 = rng.gen_range(1..=h - sh - 1);
        let r = Rect::new(x0, y0, x0 + sw, y0 + sh);
        if boxes.iter().all(|&b| separated(r, b)) {
            boxes.push(r);
        }
    }
    let mut scene = MockScene::new(format!("scene-{index:02}"), w, h, spec.class_count);
    scene.background_class = Some(0);
    scene.noise = spec.noise;
    scene.granularity = spec.granularity;
    scene.seed = derive_seed(spec.seed, &[index as u64, 1]);
    let classes = spec.class_count.max(2) as u16;
    for r in boxes {
        let class_id = rng.gen_range(1..classes);
        let ellipse = rng.gen_bool(0.5);
        scene = scene.with_shape(class_id, shape_mask(w, h, r, ellipse));
    }
    scene
}

pub fn generate_suite(spec: &SuiteSpec) -> Vec<MockScene> {
    (0..spec.scenes).map(|i| generate_scene(spec, i)).collect()
}

/// Ground truth with every class region eroded by `radius`; the removed
/// band is left unlabeled.
pub fn eroded_labels(gt: &LabelMap, radius: usize) -> LabelMap {
    let mut out = LabelMap::new(gt.width(), gt.height(), gt.class_count()).expect("valid dims");
    for c in gt.classes_present() {
        for i in raster::erode(&gt.class_mask(c), radius).foreground_indices() {
            out.set_index(i, c);
        }
    }
    out
}

/// A confidence map peaking at the top-left corner and falling off linearly.
pub fn corner_confidence(width: usize, height: usize) -> ScalarField {
    let diag = ((width * width + height * height) as f64).sqrt();
    ScalarField::from_fn(width, height, |x, y| 1.0 - ((x * x + y * y) as f64).sqrt() / diag).expect("values in [0, 1]")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_is_deterministic_and_valid() {
        let spec = SuiteSpec::default();
        let a = generate_suite(&spec);
        assert_eq!(a, generate_suite(&spec));
        assert_eq!(a.len(), 20);
        for s in &a {
            s.validate().unwrap();
            assert!((2..=4).contains(&s.shapes.len()), "{}", s.image_ref);
            for shape in &s.shapes {
                assert!((1..4).contains(&shape.class_id));
            }
        }
    }

    #[test]
    fn eroded_labels_shrink_each_class() {
        let scene = generate_scene(&SuiteSpec::default(), 3);
        let gt = scene.gt_labels();
        let coarse = eroded_labels(&gt, 2);
        for c in gt.classes_present() {
            let (a, b) = (coarse.class_mask(c), gt.class_mask(c));
            assert!(a.is_subset_of(&b));
            assert!(a.area() < b.area());
        }
    }

    #[test]
    fn corner_confidence_peaks_at_origin() {
        let f = corner_confidence(10, 8);
        assert_eq!(f.get(0, 0), 1.0);
        assert!(f.get(9, 7) < f.get(5, 4));
    }
}
