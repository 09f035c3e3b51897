//! Picking one of the oracle's three candidate masks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::raster::{mask_overlap, BinaryMask, RasterError};

#[derive(Debug, Error)]
pub enum SelectionError {
    #[error("weak mask is empty")]
    EmptyWeakMask,
    #[error("candidate mask is empty")]
    EmptyCandidate,
    #[error("candidate set must hold exactly 3 masks, got {0}")]
    CandidateCount(usize),
    #[error("candidate score {0} is outside [0, 1]")]
    InvalidScore(f64),
    #[error(transparent)]
    Raster(#[from] RasterError),
}

/// Whole / part / subpart masks for one prompt set, in oracle order.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateMaskSet {
    candidates: [BinaryMask; 3],
    scores: [f64; 3],
}

impl CandidateMaskSet {
    pub fn new(candidates: Vec<BinaryMask>, scores: Vec<f64>) -> Result<Self, SelectionError> {
        if candidates.len() != 3 {
            return Err(SelectionError::CandidateCount(candidates.len()));
        }
        if scores.len() != 3 {
            return Err(SelectionError::CandidateCount(scores.len()));
        }
        for c in &candidates[1..] {
            candidates[0].ensure_same_dims(c)?;
        }
        if let Some(&s) = scores.iter().find(|s| !(s.is_finite() && (0.0..=1.0).contains(*s))) {
            return Err(SelectionError::InvalidScore(s));
        }
        let candidates: [BinaryMask; 3] = candidates.try_into().expect("length checked");
        let scores: [f64; 3] = scores.try_into().expect("length checked");
        Ok(CandidateMaskSet { candidates, scores })
    }

    /// Three empty masks scored 0.
    pub fn empty(width: usize, height: usize) -> Self {
        let m = BinaryMask::new(width, height);
        CandidateMaskSet {
            candidates: [m.clone(), m.clone(), m],
            scores: [0.0; 3],
        }
    }

    pub fn candidates(&self) -> &[BinaryMask; 3] {
        &self.candidates
    }

    pub fn scores(&self) -> [f64; 3] {
        self.scores
    }

    pub fn dims(&self) -> (usize, usize) {
        self.candidates[0].dims()
    }

    pub fn into_parts(self) -> ([BinaryMask; 3], [f64; 3]) {
        (self.candidates, self.scores)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionStrategy {
    #[default]
    WeakAware,
    BestScore,
    Random,
}

impl SelectionStrategy {
    pub const ALL: [SelectionStrategy; 3] = [
        SelectionStrategy::WeakAware,
        SelectionStrategy::BestScore,
        SelectionStrategy::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SelectionStrategy::WeakAware => "weak-aware",
            SelectionStrategy::BestScore => "best-score",
            SelectionStrategy::Random => "random",
        }
    }
}

impl std::str::FromStr for SelectionStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SelectionStrategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown selection strategy `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    /// Minimum coverage of the weak mask.
    pub tau1: f64,
    /// Minimum fraction of the candidate inside the weak mask.
    pub tau2: f64,
    pub strategy: SelectionStrategy,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            tau1: 0.3,
            tau2: 0.7,
            strategy: SelectionStrategy::WeakAware,
        }
    }
}

/// `|S ∩ W| / |W|`
pub fn coverage_score(candidate: &BinaryMask, weak: &BinaryMask) -> Result<f64, SelectionError> {
    let o = mask_overlap(candidate, weak)?;
    if o.b_area == 0 {
        return Err(SelectionError::EmptyWeakMask);
    }
    Ok(o.intersection as f64 / o.b_area as f64)
}

/// `|S ∩ W| / |S|`
pub fn compatibility_score(candidate: &BinaryMask, weak: &BinaryMask) -> Result<f64, SelectionError> {
    let o = mask_overlap(candidate, weak)?;
    if o.a_area == 0 {
        return Err(SelectionError::EmptyCandidate);
    }
    Ok(o.intersection as f64 / o.a_area as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub index: usize,
    /// Coverage of the chosen candidate.
    pub r: f64,
    /// Compatibility of the chosen candidate.
    pub p: f64,
}

/// Coverage and compatibility for all three candidates. Empty candidates
/// score `(0, 0)`.
pub fn score_candidates(set: &CandidateMaskSet, weak: &BinaryMask) -> Result<[(f64, f64); 3], SelectionError> {
    let mut out = [(0.0, 0.0); 3];
    for (slot, c) in out.iter_mut().zip(set.candidates()) {
        let o = mask_overlap(c, weak)?;
        if o.b_area == 0 {
            return Err(SelectionError::EmptyWeakMask);
        }
        if o.a_area > 0 {
            *slot = (
                o.intersection as f64 / o.b_area as f64,
                o.intersection as f64 / o.a_area as f64,
            );
        }
    }
    Ok(out)
}

/// First index holding the maximum of `values` over `allowed` positions.
fn argmax(values: [f64; 3], allowed: [bool; 3]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for i in 0..3 {
        if allowed[i] && best.is_none_or(|b| values[i] > values[b]) {
            best = Some(i);
        }
    }
    best
}

pub fn select_mask(
    set: &CandidateMaskSet,
    weak: &BinaryMask,
    cfg: &SelectionConfig,
    seed: u64,
) -> Result<Selection, SelectionError> {
    let scored = score_candidates(set, weak)?;
    let p = scored.map(|s| s.1);
    let index = match cfg.strategy {
        SelectionStrategy::WeakAware => {
            let nonempty = set.candidates().each_ref().map(|c| !c.is_empty());
            let feasible = [0, 1, 2].map(|i| nonempty[i] && scored[i].0 >= cfg.tau1 && scored[i].1 >= cfg.tau2);
            argmax(p, feasible).or_else(|| argmax(p, nonempty)).unwrap_or(0)
        }
        SelectionStrategy::BestScore => argmax(set.scores(), [true; 3]).expect("three candidates"),
        SelectionStrategy::Random => ChaCha8Rng::seed_from_u64(seed).gen_range(0..3),
    };
    Ok(Selection {
        index,
        r: scored[index].0,
        p: scored[index].1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::Rect;

    fn rect(x0: usize, y0: usize, x1: usize, y1: usize) -> BinaryMask {
        BinaryMask::from_rect(20, 20, Rect::new(x0, y0, x1, y1))
    }

    #[test]
    fn coverage_examples() {
        let weak = rect(2, 2, 6, 6);
        assert_eq!(coverage_score(&rect(0, 0, 10, 10), &weak).unwrap(), 1.0);
        assert_eq!(coverage_score(&rect(10, 10, 12, 12), &weak).unwrap(), 0.0);
        // |W| = 100, |S ∩ W| = 60
        let weak = rect(0, 0, 10, 10);
        assert_eq!(coverage_score(&rect(0, 0, 6, 10), &weak).unwrap(), 0.6);
        assert!(matches!(
            coverage_score(&weak, &BinaryMask::new(20, 20)),
            Err(SelectionError::EmptyWeakMask)
        ));
    }

    #[test]
    fn compatibility_examples() {
        let weak = rect(0, 0, 10, 10);
        assert_eq!(compatibility_score(&rect(2, 2, 5, 5), &weak).unwrap(), 1.0);
        // |S| = 80, |S ∩ W| = 60
        let s = rect(4, 0, 12, 10);
        assert_eq!(compatibility_score(&s, &weak).unwrap(), 0.75);
        let whole = rect(0, 0, 20, 20);
        assert_eq!(compatibility_score(&whole, &rect(0, 0, 10, 20)).unwrap(), 0.5);
        assert!(matches!(
            compatibility_score(&BinaryMask::new(20, 20), &weak),
            Err(SelectionError::EmptyCandidate)
        ));
        assert!(matches!(
            compatibility_score(&BinaryMask::new(5, 5), &weak),
            Err(SelectionError::Raster(_))
        ));
    }

    #[test]
    fn identical_candidates_pick_first() {
        let weak = rect(3, 3, 9, 9);
        let set = CandidateMaskSet::new(vec![weak.clone(); 3], vec![0.2, 0.9, 0.5]).unwrap();
        let s = select_mask(&set, &weak, &SelectionConfig::default(), 0).unwrap();
        assert_eq!(
            s,
            Selection {
                index: 0,
                r: 1.0,
                p: 1.0
            }
        );
    }

    #[test]
    fn all_empty_picks_index_zero() {
        let weak = rect(3, 3, 9, 9);
        let set = CandidateMaskSet::empty(20, 20);
        let s = select_mask(&set, &weak, &SelectionConfig::default(), 0).unwrap();
        assert_eq!((s.index, s.p), (0, 0.0));
    }

    #[test]
    fn empty_candidate_loses_fallback_tie() {
        let weak = rect(3, 3, 9, 9);
        let disjoint = rect(12, 12, 15, 15);
        let set = CandidateMaskSet::new(
            vec![BinaryMask::new(20, 20), disjoint, BinaryMask::new(20, 20)],
            vec![0.5; 3],
        )
        .unwrap();
        let s = select_mask(&set, &weak, &SelectionConfig::default(), 0).unwrap();
        assert_eq!((s.index, s.r, s.p), (1, 0.0, 0.0));
    }

    #[test]
    fn best_score_and_random() {
        let weak = rect(0, 0, 10, 10);
        let set = CandidateMaskSet::new(
            vec![rect(0, 0, 10, 10), rect(0, 0, 5, 10), rect(0, 0, 5, 5)],
            vec![0.6, 0.9, 0.7],
        )
        .unwrap();
        let cfg = SelectionConfig {
            strategy: SelectionStrategy::BestScore,
            ..Default::default()
        };
        assert_eq!(select_mask(&set, &weak, &cfg, 0).unwrap().index, 1);
        let cfg = SelectionConfig {
            strategy: SelectionStrategy::Random,
            ..Default::default()
        };
        let picks: Vec<usize> = (0..50)
            .map(|seed| select_mask(&set, &weak, &cfg, seed).unwrap().index)
            .collect();
        assert!(picks.iter().all(|&i| i < 3));
        assert!((0..3).all(|i| picks.contains(&i)));
        let again: Vec<usize> = (0..50)
            .map(|seed| select_mask(&set, &weak, &cfg, seed).unwrap().index)
            .collect();
        assert_eq!(picks, again);
    }

    #[test]
    fn candidate_set_validation() {
        let m = rect(0, 0, 2, 2);
        assert!(matches!(
            CandidateMaskSet::new(vec![m.clone(), m.clone()], vec![0.1, 0.2]),
            Err(SelectionError::CandidateCount(2))
        ));
        assert!(matches!(
            CandidateMaskSet::new(vec![m.clone(), m.clone(), m.clone()], vec![0.1, 0.2, 1.2]),
            Err(SelectionError::InvalidScore(_))
        ));
        assert!(CandidateMaskSet::new(vec![m.clone(), m.clone(), BinaryMask::new(3, 3)], vec![0.0; 3]).is_err());
    }
}
