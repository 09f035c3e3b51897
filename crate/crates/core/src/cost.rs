//! Annotation cost model and cost-vs-performance tables.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CostError {
    #[error("unknown annotation kind `{0}`")]
    UnknownKind(String),
    #[error("per-image minutes for {0:?} must be positive")]
    NonPositive(AnnotationKind),
    #[error("cost table needs at least one entry")]
    NoEntries,
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnnotationKind {
    Fine,
    Coarse,
    Scribble,
    Point,
}

impl AnnotationKind {
    pub const ALL: [AnnotationKind; 4] = [
        AnnotationKind::Fine,
        AnnotationKind::Coarse,
        AnnotationKind::Scribble,
        AnnotationKind::Point,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AnnotationKind::Fine => "fine",
            AnnotationKind::Coarse => "coarse",
            AnnotationKind::Scribble => "scribble",
            AnnotationKind::Point => "point",
        }
    }
}

impl std::str::FromStr for AnnotationKind {
    type Err = CostError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        AnnotationKind::ALL
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| CostError::UnknownKind(s.to_owned()))
    }
}

/// Minutes of annotator time per image for each label kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub per_image_minutes: BTreeMap<AnnotationKind, f64>,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            per_image_minutes: BTreeMap::from([
                (AnnotationKind::Fine, 90.0),
                (AnnotationKind::Coarse, 7.0),
                (AnnotationKind::Scribble, 2.2),
                (AnnotationKind::Point, 0.75),
            ]),
        }
    }
}

impl CostModel {
    pub fn validate(&self) -> Result<(), CostError> {
        for (&k, &m) in &self.per_image_minutes {
            if !(m > 0.0 && m.is_finite()) {
                return Err(CostError::NonPositive(k));
            }
        }
        Ok(())
    }

    pub fn minutes(&self, kind: AnnotationKind) -> Result<f64, CostError> {
        self.per_image_minutes
            .get(&kind)
            .copied()
            .ok_or_else(|| CostError::UnknownKind(kind.name().to_owned()))
    }

    /// Unrounded hours to label `n_images` images.
    pub fn annotation_hours(&self, kind: AnnotationKind, n_images: u64) -> Result<f64, CostError> {
        Ok(n_images as f64 * self.minutes(kind)? / 60.0)
    }
}

/// Hours under the default model.
pub fn annotation_hours(kind: AnnotationKind, n_images: u64) -> Result<f64, CostError> {
    CostModel::default().annotation_hours(kind, n_images)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostEntry {
    pub kind: AnnotationKind,
    pub n_images: u64,
    pub miou: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostRow {
    pub kind: AnnotationKind,
    pub n_images: u64,
    pub hours: f64,
    pub miou: f64,
    /// Hours as a percentage of the reference row.
    pub hours_pct: f64,
    /// mIoU as a percentage of the reference row.
    pub miou_pct: f64,
}

/// Rows sorted by hours, with ratios against the reference row: the
/// costliest fine-label entry, or the costliest entry when there is none.
pub fn cost_performance_table(model: &CostModel, entries: &[CostEntry]) -> Result<Vec<CostRow>, CostError> {
    if entries.is_empty() {
        return Err(CostError::NoEntries);
    }
    model.validate()?;
    let mut rows = entries
        .iter()
        .map(|e| {
            Ok(CostRow {
                kind: e.kind,
                n_images: e.n_images,
                hours: model.annotation_hours(e.kind, e.n_images)?,
                miou: e.miou,
                hours_pct: 0.0,
                miou_pct: 0.0,
            })
        })
        .collect::<Result<Vec<_>, CostError>>()?;
    rows.sort_by(|a, b| a.hours.total_cmp(&b.hours));

    let pick = |only_fine: bool| {
        rows.iter()
            .filter(|r| !only_fine || r.kind == AnnotationKind::Fine)
            .max_by(|a, b| a.hours.total_cmp(&b.hours))
            .copied()
    };
    let reference = pick(true).or_else(|| pick(false)).expect("non-empty");
    let pct = |v: f64, base: f64| if base > 0.0 { 100.0 * v / base } else { 0.0 };
    for r in &mut rows {
        r.hours_pct = pct(r.hours, reference.hours);
        r.miou_pct = pct(r.miou, reference.miou);
    }
    Ok(rows)
}

pub fn table_to_csv(rows: &[CostRow]) -> Result<String, CostError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["kind", "n_images", "hours", "miou", "hours_pct", "miou_pct"])?;
    for r in rows {
        w.write_record([
            r.kind.name().to_owned(),
            r.n_images.to_string(),
            format!("{:.1}", r.hours),
            format!("{:.1}", r.miou),
            format!("{:.1}", r.hours_pct),
            format!("{:.1}", r.miou_pct),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
