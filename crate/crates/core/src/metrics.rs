//! Segmentation metrics: per-class IoU, mIoU, precision/recall on a region,
//! and the weak-over-fine ratio.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::raster::{BinaryMask, LabelMap, RasterError, IGNORE};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error("ground truth has no labeled pixels")]
    NoValidPixels,
    #[error("fine-supervision baseline must be positive, got {0}")]
    ZeroFineBaseline(f64),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ClassCounts {
    /// `None` when the class appears in neither map.
    pub fn iou(&self) -> Option<f64> {
        let denom = self.tp + self.fp + self.fn_;
        (denom > 0).then(|| self.tp as f64 / denom as f64)
    }

    /// Pixels of this class in the ground truth.
    pub fn support(&self) -> u64 {
        self.tp + self.fn_
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub counts: Vec<ClassCounts>,
    pub per_class_iou: Vec<Option<f64>>,
    /// Mean IoU over classes present in the ground truth and not excluded.
    pub miou: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Ground-truth pixels scored for precision and recall.
    pub region_pixels: u64,
    /// Predicted pixels among them.
    pub region_predicted: u64,
    /// Correctly predicted pixels among them.
    pub region_correct: u64,
    pub excluded: Vec<u16>,
}

pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

/// Compare `pred` against `gt`.
///
/// Pixels ignored in `gt` are skipped. An ignored prediction on a labeled
/// pixel counts as a miss for the true class. Precision and recall are
/// pooled over all classes and, when `region` is given, restricted to its
/// pixels: precision over predicted pixels there, recall over labeled
/// ground-truth pixels there. Classes in `exclude` are left out of the mean.
pub fn evaluate(
    pred: &LabelMap,
    gt: &LabelMap,
    region: Option<&BinaryMask>,
    exclude: &[u16],
) -> Result<EvalReport, MetricsError> {
    gt.ensure_dims(pred.dims())?;
    if let Some(r) = region {
        gt.ensure_dims(r.dims())?;
    }
    let n_classes = gt.class_count().max(pred.class_count()) as usize;
    let mut counts = vec![ClassCounts { tp: 0, fp: 0, fn_: 0 }; n_classes];
    let (mut valid, mut r_valid, mut r_labeled, mut r_correct) = (0u64, 0u64, 0u64, 0u64);

    for i in 0..gt.len() {
        let g = gt.get_index(i);
        if g == IGNORE {
            continue;
        }
        valid += 1;
        let q = pred.get_index(i);
        if q == g {
            counts[g as usize].tp += 1;
        } else {
            counts[g as usize].fn_ += 1;
            if q != IGNORE {
                counts[q as usize].fp += 1;
            }
        }
        if region.is_none_or(|r| r.get_index(i)) {
            r_valid += 1;
            if q != IGNORE {
                r_labeled += 1;
                if q == g {
                    r_correct += 1;
                }
            }
        }
    }
    if valid == 0 {
        return Err(MetricsError::NoValidPixels);
    }

    let per_class_iou: Vec<Option<f64>> = counts.iter().map(ClassCounts::iou).collect();
    let scored: Vec<f64> = counts
        .iter()
        .enumerate()
        .filter(|(c, k)| k.support() > 0 && !exclude.contains(&(*c as u16)))
        .map(|(_, k)| k.iou().unwrap_or(0.0))
        .collect();
    let miou = if scored.is_empty() {
        0.0
    } else {
        scored.iter().sum::<f64>() / scored.len() as f64
    };
    let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let precision = ratio(r_correct, r_labeled);
    let recall = ratio(r_correct, r_valid);
    let mut excluded = exclude.to_vec();
    excluded.sort_unstable();
    excluded.dedup();
    Ok(EvalReport {
        counts,
        per_class_iou,
        miou,
        precision,
        recall,
        f1: f1_score(precision, recall),
        region_pixels: r_valid,
        region_predicted: r_labeled,
        region_correct: r_correct,
        excluded,
    })
}

/// `100 * weak / fine`
pub fn wvf(weak_miou: f64, fine_miou: f64) -> Result<f64, MetricsError> {
    if fine_miou.is_nan() || fine_miou <= 0.0 {
        return Err(MetricsError::ZeroFineBaseline(fine_miou));
    }
    Ok(100.0 * weak_miou / fine_miou)
}

impl EvalReport {
    /// `key: value` lines.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "miou: {:.6}", self.miou);
        let _ = writeln!(s, "precision: {:.6}", self.precision);
        let _ = writeln!(s, "recall: {:.6}", self.recall);
        let _ = writeln!(s, "f1: {:.6}", self.f1);
        let _ = writeln!(s, "region_pixels: {}", self.region_pixels);
        let present = self.counts.iter().filter(|k| k.support() > 0).count();
        let _ = writeln!(s, "classes_in_gt: {present}");
        if !self.excluded.is_empty() {
            let ids: Vec<String> = self.excluded.iter().map(u16::to_string).collect();
            let _ = writeln!(s, "excluded: {}", ids.join(","));
        }
        s
    }

    /// One row per class: `class,tp,fp,fn,iou` with an empty IoU for absent classes.
    pub fn to_csv(&self) -> Result<String, MetricsError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["class", "tp", "fp", "fn", "iou"])?;
        for (c, (k, iou)) in self.counts.iter().zip(&self.per_class_iou).enumerate() {
            w.write_record([
                c.to_string(),
                k.tp.to_string(),
                k.fp.to_string(),
                k.fn_.to_string(),
                iou.map(|v| format!("{v:.6}")).unwrap_or_default(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lm(w: usize, h: usize, classes: u32, v: Vec<u16>) -> LabelMap {
        LabelMap::from_raw(w, h, classes, v).unwrap()
    }

    #[test]
    fn identical_maps() {
        let gt = lm(3, 2, 3, vec![0, 1, 2, 2, 1, IGNORE]);
        let r = evaluate(&gt, &gt, None, &[]).unwrap();
        assert_eq!(r.miou, 1.0);
        assert_eq!((r.precision, r.recall, r.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn all_zero_prediction() {
        let gt = lm(4, 1, 2, vec![0, 0, 1, 1]);
        let pred = lm(4, 1, 2, vec![0; 4]);
        let r = evaluate(&pred, &gt, None, &[]).unwrap();
        assert_eq!(r.per_class_iou, vec![Some(0.5), Some(0.0)]);
        assert_eq!(r.miou, 0.25);
    }

    #[test]
    fn hand_counted_confusion() {
        // 6x6, classes 0/1/2 in two-column stripes, one pixel of each class mislabeled
        let gt: Vec<u16> = (0..36).map(|i| ((i % 6) / 2) as u16).collect();
        let mut pred = gt.clone();
        pred[0] = 1; // class 0 -> 1
        pred[2] = 2; // class 1 -> 2
        pred[4] = 0; // class 2 -> 0
        let r = evaluate(&lm(6, 6, 3, pred), &lm(6, 6, 3, gt), None, &[]).unwrap();
        for k in &r.counts {
            assert_eq!((k.tp, k.fp, k.fn_), (11, 1, 1));
        }
        assert!((r.miou - 11.0 / 13.0).abs() < 1e-12);
        assert!((r.precision - 33.0 / 36.0).abs() < 1e-12);
    }

    #[test]
    fn ignore_handling_and_region() {
        let gt = lm(4, 1, 2, vec![1, 1, 1, IGNORE]);
        let pred = lm(4, 1, 2, vec![1, IGNORE, 0, 1]);
        let r = evaluate(&pred, &gt, None, &[]).unwrap();
        assert_eq!(r.counts[1], ClassCounts { tp: 1, fp: 0, fn_: 2 });
        assert_eq!(r.counts[0], ClassCounts { tp: 0, fp: 1, fn_: 0 });
        // class 0 never in gt: excluded from the mean
        assert!((r.miou - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!((r.precision, r.recall), (0.5, 1.0 / 3.0));

        let region = BinaryMask::from_bits(4, 1, vec![false, true, true, true]).unwrap();
        let r = evaluate(&pred, &gt, Some(&region), &[]).unwrap();
        assert_eq!(r.region_pixels, 2);
        assert_eq!((r.precision, r.recall, r.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn exclusion_list() {
        let gt = lm(4, 1, 2, vec![0, 0, 1, 1]);
        let pred = lm(4, 1, 2, vec![0; 4]);
        let r = evaluate(&pred, &gt, None, &[1]).unwrap();
        assert_eq!(r.miou, 0.5);
    }

    #[test]
    fn errors() {
        let gt = lm(2, 1, 2, vec![IGNORE; 2]);
        assert!(matches!(
            evaluate(&gt, &gt, None, &[]),
            Err(MetricsError::NoValidPixels)
        ));
        let other = lm(1, 2, 2, vec![0; 2]);
        assert!(matches!(evaluate(&other, &gt, None, &[]), Err(MetricsError::Raster(_))));
        assert!(matches!(wvf(1.0, 0.0), Err(MetricsError::ZeroFineBaseline(_))));
    }

    #[test]
    fn wvf_examples() {
        assert_eq!(wvf(50.0, 100.0).unwrap(), 50.0);
        assert_eq!(wvf(61.3, 61.3).unwrap(), 100.0);
    }

    #[test]
    fn report_formats() {
        let gt = lm(4, 1, 3, vec![0, 0, 1, 1]);
        let r = evaluate(&gt, &gt, None, &[]).unwrap();
        assert!(r.to_kv().starts_with("miou: 1.000000\n"));
        let csv = r.to_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "class,tp,fp,fn,iou");
        assert_eq!(lines[1], "0,2,0,0,1.000000");
        assert_eq!(lines[3], "2,0,0,0,");
    }
}
