use std::collections::HashMap;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine as _;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{rle_decode, rle_encode, MaskOracle, OracleError, OracleRequest, OracleResponse};
use crate::raster::{self, bounding_box, BinaryMask, LabelMap, RasterError, IGNORE};
use crate::sampling::Point;
use crate::selection::CandidateMaskSet;

/// Scores attached to the whole / part / subpart candidates. The part scores
/// highest, so score-only selection tends to return a partial object.
pub const NESTED_SCORES: [f64; 3] = [0.6, 0.9, 0.7];

/// How the mock derives its three candidates from the prompted shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GranularityRule {
    /// Shape, its half on the prompt side, and the quarter nearest the
    /// prompt centroid.
    #[default]
    Nested,
    /// Shape as candidate 0 (score 1); candidates 1 and 2 empty.
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MockShape {
    pub class_id: u16,
    pub mask: BinaryMask,
}

/// Ground truth the mock oracle answers from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SceneFile", into = "SceneFile")]
pub struct MockScene {
    pub image_ref: String,
    pub width: usize,
    pub height: usize,
    pub class_count: u32,
    /// Class painted on pixels outside every shape in [`gt_labels`](Self::gt_labels).
    pub background_class: Option<u16>,
    pub shapes: Vec<MockShape>,
    pub granularity: GranularityRule,
    /// Boundary perturbation radius in pixels.
    pub noise: u32,
    pub seed: u64,
    pub allow_overlap: bool,
}

#[derive(Serialize, Deserialize)]
struct ShapeFile {
    class_id: u16,
    rle: String,
}

#[derive(Serialize, Deserialize)]
struct SceneFile {
    image_ref: String,
    width: usize,
    height: usize,
    class_count: u32,
    #[serde(default)]
    background_class: Option<u16>,
    shapes: Vec<ShapeFile>,
    #[serde(default)]
    granularity: GranularityRule,
    #[serde(default)]
    noise: u32,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    allow_overlap: bool,
}

impl TryFrom<SceneFile> for MockScene {
    type Error = String;

    fn try_from(file: SceneFile) -> Result<Self, Self::Error> {
        let shapes = file
            .shapes
            .into_iter()
            .map(|s| {
                let bytes = B64.decode(&s.rle).map_err(|e| e.to_string())?;
                let mask = rle_decode(&bytes, file.width, file.height).map_err(|e| e.to_string())?;
                Ok(MockShape {
                    class_id: s.class_id,
                    mask,
                })
            })
            .collect::<Result<Vec<_>, String>>()?;
        let scene = MockScene {
            image_ref: file.image_ref,
            width: file.width,
            height: file.height,
            class_count: file.class_count,
            background_class: file.background_class,
            shapes,
            granularity: file.granularity,
            noise: file.noise,
            seed: file.seed,
            allow_overlap: file.allow_overlap,
        };
        scene.validate().map_err(|e| e.to_string())?;
        Ok(scene)
    }
}

impl From<MockScene> for SceneFile {
    fn from(scene: MockScene) -> Self {
        SceneFile {
            shapes: scene
                .shapes
                .iter()
                .map(|s| ShapeFile {
                    class_id: s.class_id,
                    rle: B64.encode(rle_encode(&s.mask)),
                })
                .collect(),
            image_ref: scene.image_ref,
            width: scene.width,
            height: scene.height,
            class_count: scene.class_count,
            background_class: scene.background_class,
            granularity: scene.granularity,
            noise: scene.noise,
            seed: scene.seed,
            allow_overlap: scene.allow_overlap,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SceneError {
    #[error("shape {0} has class {1}, scene has {2} classes")]
    ClassOutOfRange(usize, u16, u32),
    #[error("shapes {0} and {1} of class {2} overlap")]
    Overlap(usize, usize, u16),
    #[error("shape {0} is empty")]
    EmptyShape(usize),
    #[error(transparent)]
    Raster(#[from] RasterError),
}

impl MockScene {
    pub fn new(image_ref: impl Into<String>, width: usize, height: usize, class_count: u32) -> Self {
        MockScene {
            image_ref: image_ref.into(),
            width,
            height,
            class_count,
            background_class: None,
            shapes: Vec::new(),
            granularity: GranularityRule::Nested,
            noise: 0,
            seed: 0,
            allow_overlap: false,
        }
    }

    pub fn with_shape(mut self, class_id: u16, mask: BinaryMask) -> Self {
        self.shapes.push(MockShape { class_id, mask });
        self
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        let probe = BinaryMask::new(self.width.max(1), self.height.max(1));
        for (i, s) in self.shapes.iter().enumerate() {
            probe.ensure_same_dims(&s.mask)?;
            if s.class_id as u32 >= self.class_count {
                return Err(SceneError::ClassOutOfRange(i, s.class_id, self.class_count));
            }
            if s.mask.is_empty() {
                return Err(SceneError::EmptyShape(i));
            }
        }
        if let Some(b) = self.background_class {
            if b as u32 >= self.class_count {
                return Err(SceneError::ClassOutOfRange(usize::MAX, b, self.class_count));
            }
        }
        if !self.allow_overlap {
            for (i, a) in self.shapes.iter().enumerate() {
                for (j, b) in self.shapes.iter().enumerate().skip(i + 1) {
                    if a.class_id == b.class_id && raster::mask_overlap(&a.mask, &b.mask)?.intersection > 0 {
                        return Err(SceneError::Overlap(i, j, a.class_id));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Dense ground truth: shapes painted in order over the background class
    /// (or ignore when there is none).
    pub fn gt_labels(&self) -> LabelMap {
        let fill = self.background_class.unwrap_or(IGNORE);
        let mut labels = vec![fill; self.width * self.height];
        for s in &self.shapes {
            for i in s.mask.foreground_indices() {
                labels[i] = s.class_id;
            }
        }
        LabelMap::from_raw(self.width, self.height, self.class_count, labels).expect("validated scene")
    }

    /// Index of the shape holding the most prompts. Prompts outside every
    /// shape vote for background, which wins only with strictly more votes.
    fn prompted_shape(&self, points: &[Point]) -> Option<usize> {
        let mut votes = vec![0usize; self.shapes.len()];
        let mut background = 0usize;
        for p in points {
            let (x, y) = (p.x as usize, p.y as usize);
            let mut hit = false;
            if x < self.width && y < self.height {
                for (i, s) in self.shapes.iter().enumerate() {
                    if s.mask.get(x, y) {
                        votes[i] += 1;
                        hit = true;
                    }
                }
            }
            if !hit {
                background += 1;
            }
        }
        let (best, &count) = votes.iter().enumerate().rev().max_by_key(|(_, &v)| v)?;
        (count > 0 && count >= background).then_some(best)
    }

    fn shape_seed(&self, shape_idx: usize) -> u64 {
        // FNV-1a over the shape index, folded with the scene seed
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in (shape_idx as u64).to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h ^ self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
    }

    /// Flip pixels within `noise` of the boundary, with flip probability
    /// falling from 1/2 at the boundary to 0 just beyond `noise`.
    fn perturb(&self, mask: &BinaryMask, seed: u64) -> BinaryMask {
        if self.noise == 0 {
            return mask.clone();
        }
        let noise = self.noise as f64;
        let inside = raster::squared_distance_to_background(mask);
        let outside = raster::squared_distance_to_foreground(mask);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = mask.clone();
        for i in 0..mask.len() {
            let d = if mask.get_index(i) { inside[i] } else { outside[i] }.sqrt();
            let flip_p = if d <= noise {
                0.5 * (noise + 1.0 - d) / noise
            } else {
                0.0
            };
            // draw for every pixel so the stream does not depend on the mask
            let u: f64 = rng.gen();
            if u < flip_p.min(0.5) {
                out.set_index(i, !mask.get_index(i));
            }
        }
        out
    }

    pub fn answer(&self, points: &[Point]) -> CandidateMaskSet {
        let Some(shape_idx) = self.prompted_shape(points) else {
            return CandidateMaskSet::empty(self.width, self.height);
        };
        let shape = &self.shapes[shape_idx].mask;
        let whole = self.perturb(shape, self.shape_seed(shape_idx));
        match self.granularity {
            GranularityRule::Exact => {
                let empty = BinaryMask::new(self.width, self.height);
                CandidateMaskSet::new(vec![whole, empty.clone(), empty], vec![1.0, 0.0, 0.0]).expect("three masks")
            }
            GranularityRule::Nested => {
                let inside: Vec<&Point> = points
                    .iter()
                    .filter(|p| {
                        (p.x as usize) < self.width
                            && (p.y as usize) < self.height
                            && shape.get(p.x as usize, p.y as usize)
                    })
                    .collect();
                let n = inside.len() as f64;
                let cx = inside.iter().map(|p| p.x as f64).sum::<f64>() / n;
                let cy = inside.iter().map(|p| p.y as f64).sum::<f64>() / n;
                let bbox = bounding_box(shape).expect("validated non-empty shape");

                // prompt-side half of one axis, as a pixel range
                let side = |lo: usize, hi: usize, c: f64| -> (usize, usize) {
                    if hi - lo < 2 {
                        return (lo, hi);
                    }
                    let mid = lo + (hi - lo) / 2;
                    if c < mid as f64 - 0.5 {
                        (lo, mid)
                    } else {
                        (mid, hi)
                    }
                };
                let (hx, hy) = (side(bbox.x0, bbox.x1, cx), side(bbox.y0, bbox.y1, cy));
                // the half cuts across the longer side of the box
                let half = if bbox.width() >= bbox.height() {
                    (hx, (bbox.y0, bbox.y1))
                } else {
                    ((bbox.x0, bbox.x1), hy)
                };
                let quarter = (hx, hy);
                let clip = |((x0, x1), (y0, y1)): ((usize, usize), (usize, usize))| {
                    let mut m = whole.clone();
                    for y in 0..self.height {
                        for x in 0..self.width {
                            if !(x >= x0 && x < x1 && y >= y0 && y < y1) {
                                m.set(x, y, false);
                            }
                        }
                    }
                    m
                };
                let part = clip(half);
                let subpart = clip(quarter);
                CandidateMaskSet::new(vec![whole.clone(), part, subpart], NESTED_SCORES.to_vec()).expect("three masks")
            }
        }
    }
}

/// Deterministic oracle over one or more mock scenes keyed by `image_ref`.
#[derive(Debug, Clone, Default)]
pub struct MockOracle {
    scenes: HashMap<String, MockScene>,
}

impl MockOracle {
    pub fn new(scenes: impl IntoIterator<Item = MockScene>) -> Self {
        MockOracle {
            scenes: scenes.into_iter().map(|s| (s.image_ref.clone(), s)).collect(),
        }
    }

    pub fn scene(&self, image_ref: &str) -> Option<&MockScene> {
        self.scenes.get(image_ref)
    }
}

impl MaskOracle for MockOracle {
    fn query(&self, request: &OracleRequest) -> Result<OracleResponse, OracleError> {
        let scene = self
            .scenes
            .get(&request.image_ref)
            .ok_or_else(|| OracleError::UnknownImage(request.image_ref.clone()))?;
        if request.points.is_empty() {
            return Err(OracleError::EmptyRequest(request.request_id.clone()));
        }
        Ok(OracleResponse {
            request_id: request.request_id.clone(),
            candidates: scene.answer(&request.points),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::Rect;

    fn request(points: &[(u32, u32)]) -> OracleRequest {
        OracleRequest {
            request_id: "r0".into(),
            image_ref: "img".into(),
            points: points.iter().map(|&(x, y)| Point { x, y }).collect(),
        }
    }

    fn lone_rect() -> MockScene {
        MockScene::new("img", 40, 30, 2).with_shape(1, BinaryMask::from_rect(40, 30, Rect::new(4, 6, 24, 16)))
    }

    #[test]
    fn nested_candidates_on_rectangle() {
        let oracle = MockOracle::new([lone_rect()]);
        // prompt in the top-left area of a 20x10 box
        let resp = oracle.query(&request(&[(6, 8)])).unwrap();
        let c = resp.candidates.candidates();
        assert_eq!(c[0], BinaryMask::from_rect(40, 30, Rect::new(4, 6, 24, 16)));
        assert_eq!(c[1], BinaryMask::from_rect(40, 30, Rect::new(4, 6, 14, 16)));
        assert_eq!(c[2], BinaryMask::from_rect(40, 30, Rect::new(4, 6, 14, 11)));
        assert_eq!(resp.candidates.scores(), NESTED_SCORES);

        let resp = oracle.query(&request(&[(22, 15)])).unwrap();
        let c = resp.candidates.candidates();
        assert_eq!(c[1], BinaryMask::from_rect(40, 30, Rect::new(14, 6, 24, 16)));
        assert_eq!(c[2], BinaryMask::from_rect(40, 30, Rect::new(14, 11, 24, 16)));
    }

    #[test]
    fn background_prompt_gives_empty_set() {
        let oracle = MockOracle::new([lone_rect()]);
        let resp = oracle.query(&request(&[(30, 25)])).unwrap();
        assert!(resp.candidates.candidates().iter().all(BinaryMask::is_empty));
        assert_eq!(resp.candidates.scores(), [0.0; 3]);
    }

    #[test]
    fn unknown_image_and_empty_request() {
        let oracle = MockOracle::new([lone_rect()]);
        let mut r = request(&[(6, 8)]);
        r.image_ref = "other".into();
        assert!(matches!(oracle.query(&r), Err(OracleError::UnknownImage(_))));
        assert!(matches!(oracle.query(&request(&[])), Err(OracleError::EmptyRequest(_))));
    }

    #[test]
    fn exact_rule() {
        let mut scene = lone_rect();
        scene.granularity = GranularityRule::Exact;
        let resp = MockOracle::new([scene.clone()]).query(&request(&[(6, 8)])).unwrap();
        let c = resp.candidates.candidates();
        assert_eq!(c[0], scene.shapes[0].mask);
        assert!(c[1].is_empty() && c[2].is_empty());
    }

    #[test]
    fn noisy_answers_are_deterministic_and_close() {
        let mut scene =
            MockScene::new("img", 50, 50, 2).with_shape(1, BinaryMask::from_rect(50, 50, Rect::new(10, 10, 40, 40)));
        scene.noise = 2;
        scene.seed = 7;
        let oracle = MockOracle::new([scene.clone()]);
        let a = oracle.query(&request(&[(20, 20), (30, 31)])).unwrap();
        let b = oracle.query(&request(&[(20, 20), (30, 31)])).unwrap();
        assert_eq!(a, b);
        let iou = raster::mask_overlap(&a.candidates.candidates()[0], &scene.shapes[0].mask)
            .unwrap()
            .iou();
        assert!(iou > 0.7 && iou < 1.0, "iou {iou}");
    }

    #[test]
    fn scene_json_round_trip() {
        let mut scene = lone_rect().with_shape(0, BinaryMask::from_rect(40, 30, Rect::new(30, 0, 40, 5)));
        scene.noise = 1;
        scene.background_class = Some(0);
        let back = MockScene::from_json(&scene.to_json()).unwrap();
        assert_eq!(back, scene);
        let gt = scene.gt_labels();
        assert_eq!(gt.get(5, 7), 1);
        assert_eq!(gt.get(0, 29), 0);
    }

    #[test]
    fn overlapping_same_class_rejected() {
        let r = BinaryMask::from_rect(10, 10, Rect::new(0, 0, 5, 5));
        let scene = MockScene::new("x", 10, 10, 2).with_shape(1, r.clone()).with_shape(1, r);
        assert!(matches!(scene.validate(), Err(SceneError::Overlap(0, 1, 1))));
    }
}
