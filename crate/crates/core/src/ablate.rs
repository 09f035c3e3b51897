//! Parameter sweeps over a mock scene suite, scored by precision and recall
//! of the labels refinement adds.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::config::RefinementConfig;
use crate::metrics::{self, f1_score, MetricsError};
use crate::oracle::{MockOracle, MockScene};
use crate::raster::LabelMap;
use crate::refine::{self, derive_seed, PseudoInput, RefineError};
use crate::sampling::SamplerStrategy;
use crate::selection::SelectionStrategy;
use crate::suite::{corner_confidence, eroded_labels};

#[derive(Debug, Error)]
pub enum AblationError {
    #[error("scene `{scene}`: {source}")]
    Refine {
        scene: String,
        #[source]
        source: RefineError,
    },
    #[error("scene `{scene}`: {source}")]
    Metrics {
        scene: String,
        #[source]
        source: MetricsError,
    },
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sweep {
    Sampler,
    Selection,
    Points,
    Tau,
}

impl Sweep {
    pub const ALL: [Sweep; 4] = [Sweep::Sampler, Sweep::Selection, Sweep::Points, Sweep::Tau];

    pub fn name(self) -> &'static str {
        match self {
            Sweep::Sampler => "sampler",
            Sweep::Selection => "selection",
            Sweep::Points => "points",
            Sweep::Tau => "tau",
        }
    }
}

impl std::str::FromStr for Sweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Sweep::ALL
            .into_iter()
            .find(|w| w.name() == s)
            .ok_or_else(|| format!("unknown sweep `{s}`"))
    }
}

#[derive(Debug, Clone)]
pub struct AblationSpec {
    pub base: RefinementConfig,
    /// Erosion radius used to derive coarse labels from ground truth.
    pub erosion: usize,
    /// Repetitions with different seeds, pooled.
    pub trials: usize,
    /// Worker threads; 0 uses the rayon default.
    pub jobs: usize,
}

impl Default for AblationSpec {
    fn default() -> Self {
        AblationSpec {
            base: RefinementConfig::default(),
            erosion: 2,
            trials: 3,
            jobs: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Score {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Mean over scenes and trials of the refined mIoU.
    pub miou: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationRow {
    pub sweep: Sweep,
    pub setting: String,
    #[serde(flatten)]
    pub score: Score,
}

struct SceneResult {
    predicted: u64,
    correct: u64,
    pixels: u64,
    miou: f64,
}

fn run_scene(
    oracle: &MockOracle,
    scene: &MockScene,
    cfg: &RefinementConfig,
    erosion: usize,
) -> Result<SceneResult, AblationError> {
    let gt = scene.gt_labels();
    let coarse = eroded_labels(&gt, erosion);
    let conf;
    let empty;
    let pseudo = if cfg.sampler == SamplerStrategy::TopConfidence {
        conf = corner_confidence(scene.width, scene.height);
        empty = LabelMap::new(scene.width, scene.height, scene.class_count).expect("valid scene");
        Some(PseudoInput {
            labels: &empty,
            confidence: &conf,
        })
    } else {
        None
    };
    let out = refine::refine_labels(&coarse, &scene.image_ref, oracle, cfg, pseudo).map_err(|source| {
        AblationError::Refine {
            scene: scene.image_ref.clone(),
            source,
        }
    })?;
    let region = coarse.labeled_mask().invert();
    let report = metrics::evaluate(&out.labels, &gt, Some(&region), &[]).map_err(|source| AblationError::Metrics {
        scene: scene.image_ref.clone(),
        source,
    })?;
    Ok(SceneResult {
        predicted: report.region_predicted,
        correct: report.region_correct,
        pixels: report.region_pixels,
        miou: report.miou,
    })
}

/// Pooled score of one configuration over every scene and trial.
pub fn score_config(
    scenes: &[MockScene],
    cfg: &RefinementConfig,
    erosion: usize,
    trials: usize,
) -> Result<Score, AblationError> {
    let oracle = MockOracle::new(scenes.iter().cloned());
    let work: Vec<(usize, usize)> = (0..trials.max(1))
        .flat_map(|t| (0..scenes.len()).map(move |s| (t, s)))
        .collect();
    let results = work
        .par_iter()
        .map(|&(t, s)| {
            let cfg = RefinementConfig {
                seed: derive_seed(cfg.seed, &[t as u64, s as u64]),
                ..*cfg
            };
            run_scene(&oracle, &scenes[s], &cfg, erosion)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let (mut predicted, mut correct, mut pixels, mut miou) = (0u64, 0u64, 0u64, 0.0);
    for r in &results {
        predicted += r.predicted;
        correct += r.correct;
        pixels += r.pixels;
        miou += r.miou;
    }
    let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let (precision, recall) = (ratio(correct, predicted), ratio(correct, pixels));
    Ok(Score {
        precision,
        recall,
        f1: f1_score(precision, recall),
        miou: if results.is_empty() {
            0.0
        } else {
            miou / results.len() as f64
        },
    })
}

pub const TAU1_GRID: [f64; 4] = [0.1, 0.3, 0.5, 0.7];
pub const TAU2_GRID: [f64; 3] = [0.5, 0.7, 0.9];

/// Settings explored by one sweep, each a label and a config.
pub fn sweep_settings(sweep: Sweep, base: &RefinementConfig) -> Vec<(String, RefinementConfig)> {
    match sweep {
        Sweep::Sampler => SamplerStrategy::ALL
            .into_iter()
            .map(|s| (s.name().to_owned(), RefinementConfig { sampler: s, ..*base }))
            .collect(),
        Sweep::Selection => SelectionStrategy::ALL
            .into_iter()
            .map(|s| (s.name().to_owned(), RefinementConfig { selection: s, ..*base }))
            .collect(),
        Sweep::Points => (1..=10)
            .map(|k| (format!("k={k}"), RefinementConfig { k, ..*base }))
            .collect(),
        Sweep::Tau => TAU1_GRID
            .into_iter()
            .flat_map(|t1| TAU2_GRID.into_iter().map(move |t2| (t1, t2)))
            .map(|(tau1, tau2)| (format!("tau=({tau1},{tau2})"), RefinementConfig { tau1, tau2, ..*base }))
            .collect(),
    }
}

pub fn run_sweep(scenes: &[MockScene], sweep: Sweep, spec: &AblationSpec) -> Result<Vec<AblationRow>, AblationError> {
    let run = || {
        sweep_settings(sweep, &spec.base)
            .into_iter()
            .map(|(setting, cfg)| {
                Ok(AblationRow {
                    sweep,
                    setting,
                    score: score_config(scenes, &cfg, spec.erosion, spec.trials)?,
                })
            })
            .collect()
    };
    if spec.jobs == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(spec.jobs)
            .build()?
            .install(run)
    }
}

pub fn rows_to_csv(rows: &[AblationRow]) -> Result<String, AblationError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["sweep", "setting", "precision", "recall", "f1", "miou"])?;
    for r in rows {
        w.write_record([
            r.sweep.name().to_owned(),
            r.setting.clone(),
            format!("{:.6}", r.score.precision),
            format!("{:.6}", r.score.recall),
            format!("{:.6}", r.score.f1),
            format!("{:.6}", r.score.miou),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suite::{generate_suite, SuiteSpec};

    #[test]
    fn sweep_sizes() {
        let base = RefinementConfig::default();
        assert_eq!(sweep_settings(Sweep::Sampler, &base).len(), 5);
        assert_eq!(sweep_settings(Sweep::Selection, &base).len(), 3);
        assert_eq!(sweep_settings(Sweep::Points, &base).len(), 10);
        assert_eq!(sweep_settings(Sweep::Tau, &base).len(), 12);
    }

    #[test]
    fn scores_are_deterministic_across_thread_counts() {
        let scenes = generate_suite(&SuiteSpec {
            scenes: 3,
            ..Default::default()
        });
        let spec = AblationSpec {
            trials: 2,
            jobs: 1,
            ..Default::default()
        };
        let a = run_sweep(&scenes, Sweep::Selection, &spec).unwrap();
        let b = run_sweep(&scenes, Sweep::Selection, &AblationSpec { jobs: 3, ..spec }).unwrap();
        assert_eq!(a, b);
        for r in &a {
            assert!((0.0..=1.0).contains(&r.score.precision));
            assert!((0.0..=1.0).contains(&r.score.recall));
        }
        assert!(rows_to_csv(&a).unwrap().starts_with("sweep,setting,precision"));
    }
}
