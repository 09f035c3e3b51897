//! The refinement pipeline for one image.
//!
//! Each labeled class is split into connected instances, every instance is
//! prompted with `k` sampled points, and the oracle's candidate chosen by the
//! selection rule is written over unlabeled pixels. Planning (sampling and
//! request construction) is separate from applying responses so requests can
//! be shipped to an external oracle and answered later.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, RefinementConfig};
use crate::oracle::{MaskOracle, OracleError, OracleRequest, OracleResponse};
use crate::raster::{self, BinaryMask, LabelMap, RasterError, ScalarField, IGNORE};
use crate::sampling::{self, PointPrompt, SamplingError};
use crate::selection::{self, Selection, SelectionError};

#[derive(Debug, Error)]
pub enum RefineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("image `{image_ref}`: {source}")]
    Oracle {
        image_ref: String,
        #[source]
        source: OracleError,
    },
    #[error("class {class}, instance {instance}: {source}")]
    Sampling {
        class: u16,
        instance: usize,
        #[source]
        source: SamplingError,
    },
    #[error("class {class}, instance {instance}: {source}")]
    Selection {
        class: u16,
        instance: usize,
        #[source]
        source: SelectionError,
    },
    #[error("expected {expected} responses, got {found}")]
    ResponseCount { expected: usize, found: usize },
    #[error("response `{found}` does not match request `{expected}`")]
    ResponseOrder { expected: String, found: String },
    #[error(transparent)]
    Raster(#[from] RasterError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeakKind {
    Point,
    Scribble,
    Coarse,
}

impl std::str::FromStr for WeakKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "point" => Ok(WeakKind::Point),
            "scribble" => Ok(WeakKind::Scribble),
            "coarse" => Ok(WeakKind::Coarse),
            _ => Err(format!("unknown weak label kind `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakAnnotation {
    pub kind: WeakKind,
    pub labels: LabelMap,
}

/// Teacher predictions with per-pixel confidence.
#[derive(Debug, Clone, Copy)]
pub struct PseudoInput<'a> {
    pub labels: &'a LabelMap,
    pub confidence: &'a ScalarField,
}

/// One line of the per-instance audit trail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub image_ref: String,
    pub class_id: u16,
    pub instance: usize,
    pub request_id: String,
    pub prompts: Vec<[u32; 2]>,
    pub chosen: usize,
    pub r: f64,
    pub p: f64,
    /// Pixels of the chosen candidate that were unlabeled in the input.
    pub added: usize,
}

/// Seed for one stochastic stage, mixed from the run seed and stage indices.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    // splitmix64 finalizer applied after each part
    let mut z = base;
    for &p in parts {
        z = z.wrapping_add(p).wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

pub fn request_id(image_ref: &str, class_id: u16, instance: usize) -> String {
    format!("{image_ref}:{class_id}:{instance}")
}

pub fn bootstrap_request_id(image_ref: &str, class_id: u16, group: usize) -> String {
    format!("{image_ref}:bootstrap:{class_id}:{group}")
}

/// `true` on iterations where masks should be regenerated.
pub fn should_resample(iteration: u64, m: u32) -> bool {
    assert!(m >= 1, "resample period must be at least 1");
    iteration.is_multiple_of(m as u64)
}

/// Union of `coarse` with pixels confidently predicted as `class_id`.
pub fn extend_with_pseudo(
    coarse: &BinaryMask,
    pseudo_labels: &LabelMap,
    confidence: &ScalarField,
    class_id: u16,
    theta2: f64,
) -> Result<BinaryMask, RasterError> {
    pseudo_labels.ensure_dims(coarse.dims())?;
    if confidence.dims() != coarse.dims() {
        return Err(RasterError::DimensionMismatch {
            expected: coarse.dims(),
            found: confidence.dims(),
        });
    }
    let mut out = coarse.clone();
    for i in 0..out.len() {
        if pseudo_labels.get_index(i) == class_id && confidence.get_index(i) >= theta2 {
            out.set_index(i, true);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannedInstance {
    pub class_id: u16,
    pub instance: usize,
    pub mask: BinaryMask,
    pub prompts: Vec<PointPrompt>,
    pub request: OracleRequest,
    pub selection_seed: u64,
}

/// Everything needed to turn oracle responses into refined labels.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinePlan {
    pub image_ref: String,
    pub input: LabelMap,
    pub instances: Vec<PlannedInstance>,
}

impl RefinePlan {
    pub fn requests(&self) -> Vec<OracleRequest> {
        self.instances.iter().map(|i| i.request.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineOutput {
    /// Input labels with oracle-derived labels filled into unlabeled pixels.
    pub labels: LabelMap,
    /// Oracle-derived labels alone, before the weak labels are laid on top.
    pub sam: LabelMap,
    pub audit: Vec<AuditRecord>,
}

/// Instance separation and prompt sampling for every labeled class.
pub fn plan_refinement(
    labels: &LabelMap,
    image_ref: &str,
    cfg: &RefinementConfig,
    pseudo: Option<PseudoInput<'_>>,
) -> Result<RefinePlan, RefineError> {
    cfg.validate()?;
    if let Some(ps) = pseudo {
        labels.ensure_dims(ps.labels.dims())?;
        labels.ensure_dims(ps.confidence.dims())?;
    }
    let labeled = labels.labeled_mask();
    let mut instances = Vec::new();
    for class_id in labels.classes_present() {
        let mut region = labels.class_mask(class_id);
        if let Some(ps) = pseudo {
            region = extend_with_pseudo(&region, ps.labels, ps.confidence, class_id, cfg.theta2)?;
            // never grow over another class's weak label
            let mut other = labeled.clone();
            other.subtract(&labels.class_mask(class_id))?;
            region.subtract(&other)?;
        }
        for (instance, mask) in raster::connected_components(&region, cfg.connectivity)
            .into_iter()
            .enumerate()
        {
            let seed = derive_seed(cfg.seed, &[class_id as u64, instance as u64]);
            let spec = cfg.sampler_spec(seed);
            let prompts =
                sampling::sample_prompts(&mask, class_id, &spec, pseudo.map(|p| p.confidence)).map_err(|source| {
                    RefineError::Sampling {
                        class: class_id,
                        instance,
                        source,
                    }
                })?;
            let request = OracleRequest::from_prompts(request_id(image_ref, class_id, instance), image_ref, &prompts);
            instances.push(PlannedInstance {
                class_id,
                instance,
                mask,
                prompts,
                request,
                selection_seed: derive_seed(seed, &[1]),
            });
        }
    }
    Ok(RefinePlan {
        image_ref: image_ref.to_owned(),
        input: labels.clone(),
        instances,
    })
}

/// Select one candidate per planned instance and write the refined labels.
///
/// Only pixels unlabeled in the input are written. When candidates of two
/// classes claim the same pixel, the higher compatibility wins and ties keep
/// the lower class id.
pub fn apply_responses(
    plan: &RefinePlan,
    responses: &[OracleResponse],
    cfg: &RefinementConfig,
) -> Result<RefineOutput, RefineError> {
    if responses.len() != plan.instances.len() {
        return Err(RefineError::ResponseCount {
            expected: plan.instances.len(),
            found: responses.len(),
        });
    }
    let input = &plan.input;
    let (w, h) = input.dims();
    let sel_cfg = cfg.selection_config();
    let mut sam = LabelMap::new(w, h, input.class_count())?;
    let mut sam_p = vec![f64::NEG_INFINITY; w * h];
    let mut audit = Vec::with_capacity(responses.len());

    for (planned, resp) in plan.instances.iter().zip(responses) {
        if resp.request_id != planned.request.request_id {
            return Err(RefineError::ResponseOrder {
                expected: planned.request.request_id.clone(),
                found: resp.request_id.clone(),
            });
        }
        let ctx = |source| RefineError::Selection {
            class: planned.class_id,
            instance: planned.instance,
            source,
        };
        let Selection { index, r, p } =
            selection::select_mask(&resp.candidates, &planned.mask, &sel_cfg, planned.selection_seed).map_err(ctx)?;
        let chosen = &resp.candidates.candidates()[index];
        let mut added = 0;
        for i in chosen.foreground_indices() {
            if input.get_index(i) != IGNORE {
                continue;
            }
            added += 1;
            let current = sam.get_index(i);
            if current == IGNORE || p > sam_p[i] || (p == sam_p[i] && planned.class_id < current) {
                sam.set_index(i, planned.class_id);
                sam_p[i] = p;
            }
        }
        audit.push(AuditRecord {
            image_ref: plan.image_ref.clone(),
            class_id: planned.class_id,
            instance: planned.instance,
            request_id: planned.request.request_id.clone(),
            prompts: planned.prompts.iter().map(|q| [q.x, q.y]).collect(),
            chosen: index,
            r,
            p,
            added,
        });
    }

    let mut labels = input.clone();
    for i in 0..labels.len() {
        if labels.get_index(i) == IGNORE {
            labels.set_index(i, sam.get_index(i));
        }
    }
    Ok(RefineOutput { labels, sam, audit })
}

/// One refinement pass over `labels` against `oracle`.
pub fn refine_labels(
    labels: &LabelMap,
    image_ref: &str,
    oracle: &dyn MaskOracle,
    cfg: &RefinementConfig,
    pseudo: Option<PseudoInput<'_>>,
) -> Result<RefineOutput, RefineError> {
    let plan = plan_refinement(labels, image_ref, cfg, pseudo)?;
    let responses = query(oracle, image_ref, &plan.requests(), labels.dims())?;
    apply_responses(&plan, &responses, cfg)
}

fn query(
    oracle: &dyn MaskOracle,
    image_ref: &str,
    requests: &[OracleRequest],
    dims: (usize, usize),
) -> Result<Vec<OracleResponse>, RefineError> {
    if requests.is_empty() {
        return Ok(Vec::new());
    }
    let oracle_err = |source| RefineError::Oracle {
        image_ref: image_ref.to_owned(),
        source,
    };
    let responses = oracle.query_batch(requests).map_err(oracle_err)?;
    for r in &responses {
        if r.candidates.dims() != dims {
            return Err(RefineError::Raster(RasterError::DimensionMismatch {
                expected: dims,
                found: r.candidates.dims(),
            }));
        }
    }
    Ok(responses)
}

/// Grow sparse point or scribble labels into initial coarse regions.
///
/// Each connected group of annotated pixels is prompted with at most `k`
/// of its pixels and the smallest non-empty candidate is kept. Coarse input
/// is returned unchanged. Weak labels are never overwritten; between groups
/// the first writer (lowest class, then lowest group) keeps a pixel.
pub fn bootstrap_coarse(
    weak: &WeakAnnotation,
    image_ref: &str,
    oracle: &dyn MaskOracle,
    cfg: &RefinementConfig,
) -> Result<(LabelMap, Vec<AuditRecord>), RefineError> {
    cfg.validate()?;
    if weak.kind == WeakKind::Coarse {
        return Ok((weak.labels.clone(), Vec::new()));
    }
    let input = &weak.labels;
    let mut groups = Vec::new();
    for class_id in input.classes_present() {
        let mask = input.class_mask(class_id);
        for (instance, group) in raster::connected_components(&mask, cfg.connectivity)
            .into_iter()
            .enumerate()
        {
            let seed = derive_seed(cfg.seed, &[class_id as u64, instance as u64]);
            let prompts =
                sampling::sample_prompts(&group, class_id, &cfg.sampler_spec(seed), None).map_err(|source| {
                    RefineError::Sampling {
                        class: class_id,
                        instance,
                        source,
                    }
                })?;
            let request =
                OracleRequest::from_prompts(bootstrap_request_id(image_ref, class_id, instance), image_ref, &prompts);
            groups.push((class_id, instance, group, prompts, request));
        }
    }
    let requests: Vec<OracleRequest> = groups.iter().map(|g| g.4.clone()).collect();
    let responses = query(oracle, image_ref, &requests, input.dims())?;

    let mut out = input.clone();
    let mut audit = Vec::with_capacity(groups.len());
    for ((class_id, instance, group, prompts, request), resp) in groups.into_iter().zip(responses) {
        let smallest = resp
            .candidates
            .candidates()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_empty())
            .min_by_key(|(i, c)| (c.area(), *i))
            .map(|(i, _)| i);
        let scored =
            selection::score_candidates(&resp.candidates, &group).map_err(|source| RefineError::Selection {
                class: class_id,
                instance,
                source,
            })?;
        let mut added = 0;
        if let Some(idx) = smallest {
            for i in resp.candidates.candidates()[idx].foreground_indices() {
                if out.get_index(i) == IGNORE {
                    out.set_index(i, class_id);
                    added += 1;
                }
            }
        }
        let chosen = smallest.unwrap_or(0);
        audit.push(AuditRecord {
            image_ref: image_ref.to_owned(),
            class_id,
            instance,
            request_id: request.request_id,
            prompts: prompts.iter().map(|q| [q.x, q.y]).collect(),
            chosen,
            r: scored[chosen].0,
            p: scored[chosen].1,
            added,
        });
    }
    Ok((out, audit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{GranularityRule, MockOracle, MockScene};
    use crate::raster::Rect;

    fn scene() -> MockScene {
        let mut s = MockScene::new("img", 40, 30, 3)
            .with_shape(1, BinaryMask::from_rect(40, 30, Rect::new(2, 2, 18, 14)))
            .with_shape(1, BinaryMask::from_rect(40, 30, Rect::new(22, 4, 36, 12)))
            .with_shape(2, BinaryMask::from_rect(40, 30, Rect::new(6, 18, 30, 28)));
        s.background_class = Some(0);
        s
    }

    fn coarse_from(gt: &LabelMap, radius: usize) -> LabelMap {
        let mut out = LabelMap::new(gt.width(), gt.height(), gt.class_count()).unwrap();
        for c in gt.classes_present() {
            let eroded = raster::erode(&gt.class_mask(c), radius);
            for i in eroded.foreground_indices() {
                out.set_index(i, c);
            }
        }
        out
    }

    fn cfg_conn() -> raster::Connectivity {
        RefinementConfig::default().connectivity
    }

    fn class_iou(a: &LabelMap, b: &LabelMap, c: u16) -> f64 {
        raster::mask_overlap(&a.class_mask(c), &b.class_mask(c)).unwrap().iou()
    }

    #[test]
    fn resample_schedule() {
        assert!(should_resample(0, 4));
        assert!(!should_resample(3, 4));
        assert!(should_resample(8, 4));
        assert!(should_resample(5, 1));
    }

    #[test]
    fn extend_examples() {
        let (w, h) = (10, 10);
        let left = BinaryMask::from_rect(w, h, Rect::new(2, 2, 5, 8));
        let square = BinaryMask::from_rect(w, h, Rect::new(2, 2, 8, 8));
        let empty = LabelMap::new(w, h, 3).unwrap();
        let ones = ScalarField::from_fn(w, h, |_, _| 1.0).unwrap();
        assert_eq!(extend_with_pseudo(&left, &empty, &ones, 1, 0.98).unwrap(), left);

        let everywhere = LabelMap::from_raw(w, h, 3, vec![1; w * h]).unwrap();
        assert_eq!(
            extend_with_pseudo(&left, &everywhere, &ones, 1, 0.98).unwrap(),
            BinaryMask::from_fn(w, h, |_, _| true)
        );

        let mut pl = LabelMap::new(w, h, 3).unwrap();
        for i in square.foreground_indices() {
            pl.set_index(i, 1);
        }
        let conf = ScalarField::from_fn(w, h, |_, _| 0.99).unwrap();
        assert_eq!(extend_with_pseudo(&left, &pl, &conf, 1, 0.98).unwrap(), square);
        assert!(extend_with_pseudo(&left, &pl, &ScalarField::zeros(3, 3), 1, 0.98).is_err());
    }

    #[test]
    fn empty_labels_are_a_no_op() {
        let labels = LabelMap::new(12, 8, 3).unwrap();
        let oracle = MockOracle::new([]);
        let out = refine_labels(&labels, "none", &oracle, &RefinementConfig::default(), None).unwrap();
        assert_eq!(out.labels, labels);
        assert!(out.audit.is_empty());
    }

    #[test]
    fn refinement_improves_every_class() {
        let scene = scene();
        let gt = scene.gt_labels();
        let coarse = coarse_from(&gt, 2);
        let oracle = MockOracle::new([scene]);
        let out = refine_labels(&coarse, "img", &oracle, &RefinementConfig::default(), None).unwrap();
        for c in [1, 2] {
            assert!(class_iou(&out.labels, &gt, c) > class_iou(&coarse, &gt, c), "class {c}");
        }
        let expected: usize = coarse
            .classes_present()
            .into_iter()
            .map(|c| raster::connected_components(&coarse.class_mask(c), cfg_conn()).len())
            .sum();
        assert_eq!(out.audit.len(), expected);
        for i in coarse.labeled_mask().foreground_indices() {
            assert_eq!(out.labels.get_index(i), coarse.get_index(i));
        }
    }

    #[test]
    fn exact_oracle_recovers_prompted_shapes() {
        let mut scene = scene();
        scene.granularity = GranularityRule::Exact;
        let gt = scene.gt_labels();
        let coarse = coarse_from(&gt, 3);
        let shapes = scene.shapes.clone();
        let oracle = MockOracle::new([scene]);
        let out = refine_labels(&coarse, "img", &oracle, &RefinementConfig::default(), None).unwrap();
        for s in &shapes {
            for i in s.mask.foreground_indices() {
                assert_eq!(out.labels.get_index(i), s.class_id);
            }
        }
    }

    #[test]
    fn plan_is_deterministic_and_ids_unique() {
        let gt = scene().gt_labels();
        let coarse = coarse_from(&gt, 2);
        let cfg = RefinementConfig {
            seed: 9,
            ..Default::default()
        };
        let a = plan_refinement(&coarse, "img", &cfg, None).unwrap();
        let b = plan_refinement(&coarse, "img", &cfg, None).unwrap();
        assert_eq!(a, b);
        let mut ids: Vec<_> = a.requests().into_iter().map(|r| r.request_id).collect();
        ids.dedup();
        assert_eq!(ids.len(), a.instances.len());
        for inst in &a.instances {
            for q in &inst.prompts {
                assert!(inst.mask.get(q.x as usize, q.y as usize));
            }
        }
    }

    #[test]
    fn sam_conflicts_go_to_higher_compatibility() {
        // two classes' candidates overlap; class 2 fits its weak region better
        let w = 20;
        let mut labels = LabelMap::new(w, 10, 3).unwrap();
        labels.set(2, 5, 1);
        labels.set(12, 5, 2);
        // the class-2 shape is listed first so it wins the mock's vote at (12, 5)
        let mut scene = MockScene::new("img", w, 10, 3)
            .with_shape(2, BinaryMask::from_rect(w, 10, Rect::new(11, 0, 14, 10)))
            .with_shape(1, BinaryMask::from_rect(w, 10, Rect::new(0, 0, 15, 10)));
        scene.allow_overlap = true;
        scene.granularity = GranularityRule::Exact;
        let oracle = MockOracle::new([scene]);
        let cfg = RefinementConfig {
            k: 1,
            ..Default::default()
        };
        let out = refine_labels(&labels, "img", &oracle, &cfg, None).unwrap();
        // both p values are 1/|S|; the narrower class-2 shape has the larger p
        assert_eq!(out.labels.get(12, 0), 2);
        assert_eq!(out.labels.get(3, 0), 1);
    }

    #[test]
    fn top_confidence_needs_pseudo() {
        let gt = scene().gt_labels();
        let cfg = RefinementConfig {
            sampler: sampling::SamplerStrategy::TopConfidence,
            ..Default::default()
        };
        let err = plan_refinement(&coarse_from(&gt, 2), "img", &cfg, None).unwrap_err();
        assert!(matches!(
            err,
            RefineError::Sampling {
                source: SamplingError::MissingConfidence,
                ..
            }
        ));
    }

    #[test]
    fn pseudo_extension_merges_instances() {
        let w = 20;
        let mut labels = LabelMap::new(w, 6, 2).unwrap();
        labels.set(2, 2, 1);
        labels.set(10, 2, 1);
        let mut pl = LabelMap::new(w, 6, 2).unwrap();
        for x in 2..=10 {
            pl.set(x, 2, 1);
        }
        let conf = ScalarField::from_fn(w, 6, |_, _| 0.99).unwrap();
        let cfg = RefinementConfig::default();
        let plan = plan_refinement(&labels, "img", &cfg, None).unwrap();
        assert_eq!(plan.instances.len(), 2);
        let pseudo = PseudoInput {
            labels: &pl,
            confidence: &conf,
        };
        let plan = plan_refinement(&labels, "img", &cfg, Some(pseudo)).unwrap();
        assert_eq!(plan.instances.len(), 1);
        assert_eq!(plan.instances[0].mask.area(), 9);
    }

    #[test]
    fn bootstrap_point_takes_smallest_candidate() {
        let scene =
            MockScene::new("img", 40, 30, 2).with_shape(1, BinaryMask::from_rect(40, 30, Rect::new(4, 6, 24, 16)));
        let mut labels = LabelMap::new(40, 30, 2).unwrap();
        labels.set(6, 8, 1);
        let oracle = MockOracle::new([scene]);
        let weak = WeakAnnotation {
            kind: WeakKind::Point,
            labels,
        };
        let (out, audit) = bootstrap_coarse(&weak, "img", &oracle, &RefinementConfig::default()).unwrap();
        assert_eq!(
            out.class_mask(1),
            BinaryMask::from_rect(40, 30, Rect::new(4, 6, 14, 11))
        );
        assert_eq!(audit[0].chosen, 2);
    }

    #[test]
    fn bootstrap_two_classes_stay_disjoint() {
        let scene = MockScene::new("img", 40, 30, 3)
            .with_shape(1, BinaryMask::from_rect(40, 30, Rect::new(2, 2, 14, 12)))
            .with_shape(2, BinaryMask::from_rect(40, 30, Rect::new(20, 10, 36, 26)));
        let gt = scene.gt_labels();
        let mut labels = LabelMap::new(40, 30, 3).unwrap();
        labels.set(5, 5, 1);
        labels.set(30, 20, 2);
        let oracle = MockOracle::new([scene]);
        let weak = WeakAnnotation {
            kind: WeakKind::Point,
            labels,
        };
        let (out, _) = bootstrap_coarse(&weak, "img", &oracle, &RefinementConfig::default()).unwrap();
        let (a, b) = (out.class_mask(1), out.class_mask(2));
        assert!(!a.is_empty() && !b.is_empty());
        assert_eq!(raster::mask_overlap(&a, &b).unwrap().intersection, 0);
        assert!(a.is_subset_of(&gt.class_mask(1)));
        assert!(b.is_subset_of(&gt.class_mask(2)));
    }

    #[test]
    fn bootstrap_coarse_is_identity() {
        let gt = scene().gt_labels();
        let weak = WeakAnnotation {
            kind: WeakKind::Coarse,
            labels: gt.clone(),
        };
        let (out, audit) = bootstrap_coarse(&weak, "img", &MockOracle::new([]), &RefinementConfig::default()).unwrap();
        assert_eq!(out, gt);
        assert!(audit.is_empty());
    }

    #[test]
    fn unknown_image_carries_context() {
        let gt = scene().gt_labels();
        let err = refine_labels(
            &coarse_from(&gt, 2),
            "other",
            &MockOracle::new([scene()]),
            &RefinementConfig::default(),
            None,
        )
        .unwrap_err();
        assert!(err.to_string().contains("other"), "{err}");
        assert!(matches!(
            err,
            RefineError::Oracle {
                source: OracleError::UnknownImage(_),
                ..
            }
        ));
    }
}
