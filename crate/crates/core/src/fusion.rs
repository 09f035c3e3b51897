//! Per-pixel supervision from weak, oracle-derived and pseudo labels.
//!
//! Precedence is fixed: a weak label beats an oracle label, which beats a
//! pseudo-label. Each pixel records which source supplied it.

use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::raster::{self, LabelMap, RasterError, ScalarField, IGNORE};

#[derive(Debug, Error)]
pub enum FusionError {
    #[error("theta1 must be in (0, 1], got {0}")]
    InvalidThreshold(f64),
    #[error("pixel {index}: source tag {tag:?} disagrees with label {label}")]
    Inconsistent { index: usize, tag: SourceTag, label: u16 },
    #[error("source raster holds unknown tag {0}")]
    UnknownTag(u16),
    #[error(transparent)]
    Raster(#[from] RasterError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
#[repr(u16)]
pub enum SourceTag {
    Weak = 0,
    Sam = 1,
    Pseudo = 2,
    Ignore = 3,
}

impl SourceTag {
    pub const ALL: [SourceTag; 4] = [SourceTag::Weak, SourceTag::Sam, SourceTag::Pseudo, SourceTag::Ignore];

    pub fn from_u16(v: u16) -> Option<Self> {
        Self::ALL.get(v as usize).copied()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct TagCounts {
    pub weak: usize,
    pub sam: usize,
    pub pseudo: usize,
    pub ignore: usize,
}

impl TagCounts {
    pub fn total(&self) -> usize {
        self.weak + self.sam + self.pseudo + self.ignore
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupervisionMap {
    labels: LabelMap,
    source: Vec<SourceTag>,
}

impl SupervisionMap {
    /// Build from parts, checking that `IGNORE` tags line up with ignore labels.
    pub fn from_parts(labels: LabelMap, source: Vec<SourceTag>) -> Result<Self, FusionError> {
        if source.len() != labels.len() {
            return Err(RasterError::BufferSize {
                expected: labels.len(),
                found: source.len(),
            }
            .into());
        }
        let map = SupervisionMap { labels, source };
        map.check()?;
        Ok(map)
    }

    /// Scan for pixels whose tag and label disagree.
    pub fn check(&self) -> Result<(), FusionError> {
        for (index, (&tag, &label)) in self.source.iter().zip(self.labels.labels()).enumerate() {
            if (tag == SourceTag::Ignore) != (label == IGNORE) {
                return Err(FusionError::Inconsistent { index, tag, label });
            }
        }
        Ok(())
    }

    pub fn labels(&self) -> &LabelMap {
        &self.labels
    }

    pub fn source(&self) -> &[SourceTag] {
        &self.source
    }

    pub fn tag(&self, x: usize, y: usize) -> SourceTag {
        self.source[y * self.labels.width() + x]
    }

    pub fn tag_counts(&self) -> TagCounts {
        let mut c = TagCounts::default();
        for t in &self.source {
            match t {
                SourceTag::Weak => c.weak += 1,
                SourceTag::Sam => c.sam += 1,
                SourceTag::Pseudo => c.pseudo += 1,
                SourceTag::Ignore => c.ignore += 1,
            }
        }
        c
    }

    /// Labels on pixels carrying `tag`, ignore elsewhere.
    pub fn labels_with_tag(&self, tag: SourceTag) -> LabelMap {
        let mut out = self.labels.clone();
        for (i, &t) in self.source.iter().enumerate() {
            if t != tag {
                out.set_index(i, IGNORE);
            }
        }
        out
    }

    /// Source tags as a 4-class label raster.
    pub fn source_map(&self) -> LabelMap {
        let (w, h) = self.labels.dims();
        LabelMap::from_raw(w, h, 4, self.source.iter().map(|&t| t as u16).collect()).expect("tags are below 4")
    }

    pub fn from_maps(labels: LabelMap, source: &LabelMap) -> Result<Self, FusionError> {
        labels.ensure_dims(source.dims())?;
        let tags = source
            .labels()
            .iter()
            .map(|&v| SourceTag::from_u16(v).ok_or(FusionError::UnknownTag(v)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_parts(labels, tags)
    }

    pub fn write(&self, labels_path: impl AsRef<Path>, source_path: impl AsRef<Path>) -> Result<(), FusionError> {
        raster::io::write_label_map(labels_path, &self.labels)?;
        raster::io::write_label_map(source_path, &self.source_map())?;
        Ok(())
    }

    pub fn read(labels_path: impl AsRef<Path>, source_path: impl AsRef<Path>) -> Result<Self, FusionError> {
        let labels = raster::io::read_label_map(labels_path)?;
        let source = raster::io::read_label_map(source_path)?;
        Self::from_maps(labels, &source)
    }
}

/// Keep predictions whose confidence reaches `theta1`.
pub fn filter_pseudo(pred: &LabelMap, confidence: &ScalarField, theta1: f64) -> Result<LabelMap, FusionError> {
    if !(theta1 > 0.0 && theta1 <= 1.0) {
        return Err(FusionError::InvalidThreshold(theta1));
    }
    pred.ensure_dims(confidence.dims())?;
    let mut out = pred.clone();
    for (i, &c) in confidence.values().iter().enumerate() {
        if c < theta1 {
            out.set_index(i, IGNORE);
        }
    }
    Ok(out)
}

/// First non-ignore label of (weak, sam, pseudo) per pixel.
pub fn compose_supervision(weak: &LabelMap, sam: &LabelMap, pseudo: &LabelMap) -> Result<SupervisionMap, FusionError> {
    weak.ensure_dims(sam.dims())?;
    weak.ensure_dims(pseudo.dims())?;
    let class_count = weak.class_count().max(sam.class_count()).max(pseudo.class_count());
    let n = weak.len();
    let mut labels = Vec::with_capacity(n);
    let mut source = Vec::with_capacity(n);
    for i in 0..n {
        let (label, tag) = [
            (weak.get_index(i), SourceTag::Weak),
            (sam.get_index(i), SourceTag::Sam),
            (pseudo.get_index(i), SourceTag::Pseudo),
        ]
        .into_iter()
        .find(|&(l, _)| l != IGNORE)
        .unwrap_or((IGNORE, SourceTag::Ignore));
        labels.push(label);
        source.push(tag);
    }
    let (w, h) = weak.dims();
    Ok(SupervisionMap {
        labels: LabelMap::from_raw(w, h, class_count, labels)?,
        source,
    })
}
