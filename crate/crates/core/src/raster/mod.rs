//! Raster types and morphological primitives.
//!
//! Everything here is row-major with `(x, y)` addressing, `x` along the width.
//! Pixels outside the raster are treated as background by every operator.

mod components;
mod distance;
pub mod io;
mod morphology;
mod skeleton;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use components::{connected_components, label_components, ComponentLabels};
pub use distance::{distance_field, squared_distance_to_background, squared_distance_to_foreground};
pub use morphology::erode;
pub use skeleton::skeletonize;

/// Reserved class id marking unlabeled pixels.
pub const IGNORE: u16 = 0xFFFF;

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("mask has no foreground pixels")]
    EmptyMask,
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("invalid raster dimensions {0}x{1}")]
    InvalidDimensions(usize, usize),
    #[error("buffer holds {found} values, raster needs {expected}")]
    BufferSize { expected: usize, found: usize },
    #[error("pixel {index} has class {value}, class_count is {class_count}")]
    InvalidLabel { index: usize, value: u16, class_count: u32 },
    #[error("field value {value} at pixel {index} is outside [0, 1]")]
    InvalidFieldValue { index: usize, value: f64 },
    #[error("class_count {0} does not fit a 16-bit raster")]
    ClassCount(u32),
    #[error("bad file magic {0:?}")]
    BadMagic([u8; 4]),
    #[error("truncated raster payload")]
    Truncated,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = RasterError> = std::result::Result<T, E>;

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 || width.checked_mul(height).is_none() {
        return Err(RasterError::InvalidDimensions(width, height));
    }
    Ok(())
}

/// Pixel adjacency used when grouping foreground pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

impl Connectivity {
    pub fn offsets(self) -> &'static [(isize, isize)] {
        const FOUR: [(isize, isize); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];
        const EIGHT: [(isize, isize); 8] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];
        match self {
            Connectivity::Four => &FOUR,
            Connectivity::Eight => &EIGHT,
        }
    }
}

impl std::str::FromStr for Connectivity {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "4" | "four" => Ok(Connectivity::Four),
            "8" | "eight" => Ok(Connectivity::Eight),
            other => Err(format!("unknown connectivity `{other}` (expected 4 or 8)")),
        }
    }
}

/// Axis-aligned pixel rectangle, `x0,y0` inclusive and `x1,y1` exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl Rect {
    pub fn new(x0: usize, y0: usize, x1: usize, y1: usize) -> Self {
        debug_assert!(x1 > x0 && y1 > y0, "degenerate rect");
        Rect { x0, y0, x1, y1 }
    }

    pub fn width(&self) -> usize {
        self.x1 - self.x0
    }

    pub fn height(&self) -> usize {
        self.y1 - self.y0
    }

    pub fn area(&self) -> usize {
        self.width() * self.height()
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1
    }
}

/// A single-class or single-instance region.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl std::fmt::Debug for BinaryMask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BinaryMask {}x{} area={}", self.width, self.height, self.area())?;
        if self.width <= 64 && self.height <= 64 {
            for row in self.bits.chunks(self.width) {
                let line: String = row.iter().map(|&b| if b { '#' } else { '.' }).collect();
                writeln!(f, "{line}")?;
            }
        }
        Ok(())
    }
}

impl BinaryMask {
    /// All-background mask.
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "mask dimensions must be positive");
        BinaryMask {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        check_dims(width, height)?;
        if bits.len() != width * height {
            return Err(RasterError::BufferSize {
                expected: width * height,
                found: bits.len(),
            });
        }
        Ok(BinaryMask { width, height, bits })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut mask = BinaryMask::new(width, height);
        for y in 0..height {
            for x in 0..width {
                mask.bits[y * width + x] = f(x, y);
            }
        }
        mask
    }

    /// Mask with the pixels of `rect` set.
    pub fn from_rect(width: usize, height: usize, rect: Rect) -> Self {
        BinaryMask::from_fn(width, height, |x, y| rect.contains(x, y))
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    /// Like [`get`](Self::get) but out-of-raster coordinates read as background.
    #[inline]
    pub fn get_signed(&self, x: isize, y: isize) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.bits[y as usize * self.width + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    #[inline]
    pub fn get_index(&self, index: usize) -> bool {
        self.bits[index]
    }

    #[inline]
    pub fn set_index(&mut self, index: usize, value: bool) {
        self.bits[index] = value;
    }

    pub fn area(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Foreground pixel indices in row-major order.
    pub fn foreground_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter_map(|(i, &b)| b.then_some(i))
    }

    /// Foreground pixels as `(x, y)` in row-major order.
    pub fn foreground(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.foreground_indices().map(move |i| (i % w, i / w))
    }

    pub fn ensure_same_dims(&self, other: &BinaryMask) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(RasterError::DimensionMismatch {
                expected: self.dims(),
                found: other.dims(),
            });
        }
        Ok(())
    }

    pub fn union_with(&mut self, other: &BinaryMask) -> Result<()> {
        self.ensure_same_dims(other)?;
        self.bits.iter_mut().zip(&other.bits).for_each(|(a, &b)| *a |= b);
        Ok(())
    }

    pub fn intersect_with(&mut self, other: &BinaryMask) -> Result<()> {
        self.ensure_same_dims(other)?;
        self.bits.iter_mut().zip(&other.bits).for_each(|(a, &b)| *a &= b);
        Ok(())
    }

    pub fn subtract(&mut self, other: &BinaryMask) -> Result<()> {
        self.ensure_same_dims(other)?;
        self.bits.iter_mut().zip(&other.bits).for_each(|(a, &b)| *a &= !b);
        Ok(())
    }

    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.dims() == other.dims() && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    /// Restrict the mask to `rect` (pixels outside are cleared).
    pub fn clipped(&self, rect: Rect) -> BinaryMask {
        let mut out = self.clone();
        for y in 0..self.height {
            for x in 0..self.width {
                if !rect.contains(x, y) {
                    out.bits[y * self.width + x] = false;
                }
            }
        }
        out
    }

    pub fn invert(&self) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }
}

/// Tightest box around the foreground.
pub fn bounding_box(mask: &BinaryMask) -> Result<Rect> {
    let mut it = mask.foreground();
    let (fx, fy) = it.next().ok_or(RasterError::EmptyMask)?;
    let (mut x0, mut y0, mut x1, mut y1) = (fx, fy, fx, fy);
    for (x, y) in it {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    Ok(Rect::new(x0, y0, x1 + 1, y1 + 1))
}

/// Pixel counts shared by coverage, compatibility and IoU.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Overlap {
    pub intersection: usize,
    pub a_area: usize,
    pub b_area: usize,
}

impl Overlap {
    pub fn union(&self) -> usize {
        self.a_area + self.b_area - self.intersection
    }

    /// Intersection over union; two empty masks give 0.
    pub fn iou(&self) -> f64 {
        match self.union() {
            0 => 0.0,
            u => self.intersection as f64 / u as f64,
        }
    }
}

pub fn mask_overlap(a: &BinaryMask, b: &BinaryMask) -> Result<Overlap> {
    a.ensure_same_dims(b)?;
    let mut overlap = Overlap {
        intersection: 0,
        a_area: 0,
        b_area: 0,
    };
    for (&pa, &pb) in a.bits.iter().zip(&b.bits) {
        overlap.a_area += pa as usize;
        overlap.b_area += pb as usize;
        overlap.intersection += (pa && pb) as usize;
    }
    Ok(overlap)
}

/// Dense per-pixel class raster. [`IGNORE`] marks unlabeled pixels.
#[derive(Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    class_count: u32,
    labels: Vec<u16>,
}

impl std::fmt::Debug for LabelMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "LabelMap {}x{} classes={}",
            self.width, self.height, self.class_count
        )
    }
}

impl LabelMap {
    /// All-ignore label map.
    pub fn new(width: usize, height: usize, class_count: u32) -> Result<Self> {
        check_dims(width, height)?;
        if class_count >= IGNORE as u32 {
            return Err(RasterError::ClassCount(class_count));
        }
        Ok(LabelMap {
            width,
            height,
            class_count,
            labels: vec![IGNORE; width * height],
        })
    }

    pub fn from_raw(width: usize, height: usize, class_count: u32, labels: Vec<u16>) -> Result<Self> {
        let mut map = LabelMap::new(width, height, class_count)?;
        if labels.len() != width * height {
            return Err(RasterError::BufferSize {
                expected: width * height,
                found: labels.len(),
            });
        }
        if let Some((index, &value)) = labels
            .iter()
            .enumerate()
            .find(|(_, &v)| v != IGNORE && v as u32 >= class_count)
        {
            return Err(RasterError::InvalidLabel {
                index,
                value,
                class_count,
            });
        }
        map.labels = labels;
        Ok(map)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn class_count(&self) -> u32 {
        self.class_count
    }

    pub fn ignore_value(&self) -> u16 {
        IGNORE
    }

    pub fn labels(&self) -> &[u16] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.labels[y * self.width + x]
    }

    #[inline]
    pub fn get_index(&self, index: usize) -> u16 {
        self.labels[index]
    }

    /// Panics if `class` is neither a valid class nor [`IGNORE`].
    #[inline]
    pub fn set(&mut self, x: usize, y: usize, class: u16) {
        let i = y * self.width + x;
        self.set_index(i, class);
    }

    #[inline]
    pub fn set_index(&mut self, index: usize, class: u16) {
        assert!(
            class == IGNORE || (class as u32) < self.class_count,
            "class {class} out of range"
        );
        self.labels[index] = class;
    }

    pub fn ensure_dims(&self, dims: (usize, usize)) -> Result<()> {
        if self.dims() != dims {
            return Err(RasterError::DimensionMismatch {
                expected: self.dims(),
                found: dims,
            });
        }
        Ok(())
    }

    /// `M^(c)`: pixels carrying `class`.
    pub fn class_mask(&self, class: u16) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            bits: self.labels.iter().map(|&v| v == class).collect(),
        }
    }

    /// Pixels carrying any non-ignore label.
    pub fn labeled_mask(&self) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            bits: self.labels.iter().map(|&v| v != IGNORE).collect(),
        }
    }

    /// Classes with at least one pixel, ascending.
    pub fn classes_present(&self) -> Vec<u16> {
        let mut seen = vec![false; self.class_count as usize];
        for &v in &self.labels {
            if v != IGNORE {
                seen[v as usize] = true;
            }
        }
        seen.iter()
            .enumerate()
            .filter_map(|(c, &s)| s.then_some(c as u16))
            .collect()
    }

    pub fn labeled_count(&self) -> usize {
        self.labels.iter().filter(|&&v| v != IGNORE).count()
    }
}

/// Real-valued raster with every value in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "field dimensions must be positive");
        ScalarField {
            width,
            height,
            values: vec![0.0; width * height],
        }
    }

    pub fn from_values(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        check_dims(width, height)?;
        if values.len() != width * height {
            return Err(RasterError::BufferSize {
                expected: width * height,
                found: values.len(),
            });
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && (0.0..=1.0).contains(*v)))
        {
            return Err(RasterError::InvalidFieldValue { index, value });
        }
        Ok(ScalarField { width, height, values })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        ScalarField::from_values(width, height, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    #[inline]
    pub fn get_index(&self, index: usize) -> f64 {
        self.values[index]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounding_box_cases() {
        let mut m = BinaryMask::new(10, 10);
        m.set(3, 7, true);
        assert_eq!(bounding_box(&m).unwrap(), Rect::new(3, 7, 4, 8));

        let mut m = BinaryMask::new(10, 10);
        m.set(0, 0, true);
        m.set(9, 4, true);
        let b = bounding_box(&m).unwrap();
        assert_eq!(b, Rect::new(0, 0, 10, 5));
        assert_eq!((b.width(), b.height()), (10, 5));

        let full = BinaryMask::from_fn(7, 4, |_, _| true);
        assert_eq!(bounding_box(&full).unwrap(), Rect::new(0, 0, 7, 4));

        assert!(matches!(
            bounding_box(&BinaryMask::new(3, 3)),
            Err(RasterError::EmptyMask)
        ));
    }

    #[test]
    fn overlap_cases() {
        let a = BinaryMask::from_rect(20, 20, Rect::new(0, 0, 4, 3));
        assert_eq!(
            mask_overlap(&a, &a).unwrap(),
            Overlap {
                intersection: 12,
                a_area: 12,
                b_area: 12
            }
        );

        let b = BinaryMask::from_rect(20, 20, Rect::new(10, 10, 12, 12));
        let o = mask_overlap(&a, &b).unwrap();
        assert_eq!((o.intersection, o.a_area, o.b_area), (0, 12, 4));

        let sq = BinaryMask::from_rect(20, 20, Rect::new(0, 0, 10, 10));
        let shifted = BinaryMask::from_rect(20, 20, Rect::new(5, 0, 15, 10));
        let o = mask_overlap(&sq, &shifted).unwrap();
        assert_eq!((o.intersection, o.a_area, o.b_area), (50, 100, 100));

        let other = BinaryMask::new(5, 5);
        assert!(matches!(
            mask_overlap(&sq, &other),
            Err(RasterError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn label_map_validation() {
        assert!(LabelMap::from_raw(2, 2, 3, vec![0, 1, 2, IGNORE]).is_ok());
        assert!(matches!(
            LabelMap::from_raw(2, 2, 3, vec![0, 1, 3, IGNORE]),
            Err(RasterError::InvalidLabel { index: 2, .. })
        ));
        assert!(LabelMap::new(0, 4, 3).is_err());
    }

    #[test]
    fn field_validation() {
        assert!(ScalarField::from_values(1, 2, vec![0.0, 1.0]).is_ok());
        assert!(ScalarField::from_values(1, 2, vec![0.0, 1.5]).is_err());
        assert!(ScalarField::from_values(1, 2, vec![f64::NAN, 0.5]).is_err());
    }

    #[test]
    fn classes_present_ascending() {
        let m = LabelMap::from_raw(3, 1, 5, vec![4, IGNORE, 1]).unwrap();
        assert_eq!(m.classes_present(), vec![1, 4]);
    }
}
