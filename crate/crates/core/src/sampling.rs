//! Point-prompt selection inside one instance mask.
//!
//! The default strategy splits the instance's bounding box into a grid sized
//! so that it holds roughly `k` cells, picks `k` foreground-bearing cells at
//! random and draws one pixel per cell with probability proportional to the
//! normalized distance field, which peaks along the skeleton. The other
//! strategies are the usual baselines.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::raster::{self, BinaryMask, RasterError, Rect, ScalarField};

#[derive(Debug, Error)]
pub enum SamplingError {
    #[error("instance mask is empty")]
    EmptyMask,
    #[error("strategy top-confidence needs a confidence field")]
    MissingConfidence,
    #[error("point count k must be at least 1")]
    ZeroPoints,
    #[error(transparent)]
    Raster(#[from] RasterError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: u32,
    pub y: u32,
}

/// A foreground point prompt tagged with the class of the instance it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PointPrompt {
    pub x: u32,
    pub y: u32,
    pub class_id: u16,
}

impl PointPrompt {
    pub fn point(&self) -> Point {
        Point { x: self.x, y: self.y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerStrategy {
    #[default]
    SkeletonGrid,
    Random,
    Center,
    Boundary,
    TopConfidence,
}

impl SamplerStrategy {
    pub const ALL: [SamplerStrategy; 5] = [
        SamplerStrategy::SkeletonGrid,
        SamplerStrategy::Random,
        SamplerStrategy::Center,
        SamplerStrategy::Boundary,
        SamplerStrategy::TopConfidence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SamplerStrategy::SkeletonGrid => "skeleton-grid",
            SamplerStrategy::Random => "random",
            SamplerStrategy::Center => "center",
            SamplerStrategy::Boundary => "boundary",
            SamplerStrategy::TopConfidence => "top-confidence",
        }
    }
}

impl std::str::FromStr for SamplerStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SamplerStrategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown sampler `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub strategy: SamplerStrategy,
    pub k: usize,
    pub seed: u64,
}

impl Default for SamplerSpec {
    fn default() -> Self {
        SamplerSpec {
            strategy: SamplerStrategy::SkeletonGrid,
            k: 5,
            seed: 0,
        }
    }
}

/// Smallest `n >= 1` with `n^2 * other >= side * k`, i.e. `ceil(side / sqrt(S / k))`
/// for `S = side * other`, evaluated in integers.
fn cells_along(side: usize, other: usize, k: usize) -> usize {
    let target = side as u128 * k as u128;
    let other = other as u128;
    let mut n = ((target as f64 / other as f64).sqrt() as u128).max(1);
    while n > 1 && (n - 1) * (n - 1) * other >= target {
        n -= 1;
    }
    while n * n * other < target {
        n += 1;
    }
    n as usize
}

/// Grid shape `(columns, rows)` for a box and point count. Each axis is
/// capped at its pixel length so no cell is empty when `k` exceeds the area.
pub fn grid_shape(rect: Rect, k: usize) -> (usize, usize) {
    let k = k.max(1);
    let (s1, s2) = (rect.width(), rect.height());
    (cells_along(s1, s2, k).min(s1), cells_along(s2, s1, k).min(s2))
}

/// Split `rect` into the sampling grid. Cells are listed row by row and tile
/// the box exactly.
pub fn grid_partition(rect: Rect, k: usize) -> Vec<Rect> {
    let (cols, rows) = grid_shape(rect, k);
    let xs: Vec<usize> = (0..=cols).map(|i| rect.x0 + i * rect.width() / cols).collect();
    let ys: Vec<usize> = (0..=rows).map(|j| rect.y0 + j * rect.height() / rows).collect();
    let mut cells = Vec::with_capacity(cols * rows);
    for j in 0..rows {
        for i in 0..cols {
            cells.push(Rect::new(xs[i], ys[j], xs[i + 1], ys[j + 1]));
        }
    }
    cells
}

/// Draw prompt points from `instance`.
///
/// Returns `min(k, area)` distinct foreground pixels. `confidence` is only
/// read by [`SamplerStrategy::TopConfidence`], which requires it.
pub fn sample_prompts(
    instance: &BinaryMask,
    class_id: u16,
    spec: &SamplerSpec,
    confidence: Option<&ScalarField>,
) -> Result<Vec<PointPrompt>, SamplingError> {
    if spec.k == 0 {
        return Err(SamplingError::ZeroPoints);
    }
    if instance.is_empty() {
        return Err(SamplingError::EmptyMask);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let indices = match spec.strategy {
        SamplerStrategy::SkeletonGrid => skeleton_grid(instance, spec.k, &mut rng)?,
        SamplerStrategy::Random => {
            let fg: Vec<usize> = instance.foreground_indices().collect();
            let n = spec.k.min(fg.len());
            index::sample(&mut rng, fg.len(), n)
                .into_iter()
                .map(|i| fg[i])
                .collect()
        }
        SamplerStrategy::Center => {
            let field = raster::distance_field(instance)?;
            ranked(instance, spec.k, |i| -field.get_index(i))
        }
        SamplerStrategy::Boundary => {
            let field = raster::distance_field(instance)?;
            ranked(instance, spec.k, |i| field.get_index(i))
        }
        SamplerStrategy::TopConfidence => {
            let conf = confidence.ok_or(SamplingError::MissingConfidence)?;
            if conf.dims() != instance.dims() {
                return Err(RasterError::DimensionMismatch {
                    expected: instance.dims(),
                    found: conf.dims(),
                }
                .into());
            }
            ranked(instance, spec.k, |i| -conf.get_index(i))
        }
    };
    let w = instance.width();
    Ok(indices
        .into_iter()
        .map(|i| PointPrompt {
            x: (i % w) as u32,
            y: (i / w) as u32,
            class_id,
        })
        .collect())
}

/// First `k` foreground pixels by ascending `key`, ties in row-major order.
fn ranked(instance: &BinaryMask, k: usize, key: impl Fn(usize) -> f64) -> Vec<usize> {
    let mut fg: Vec<(f64, usize)> = instance.foreground_indices().map(|i| (key(i), i)).collect();
    fg.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    fg.into_iter().take(k).map(|(_, i)| i).collect()
}

struct Cell {
    pixels: Vec<(usize, f64)>,
    remaining: usize,
}

fn skeleton_grid(instance: &BinaryMask, k: usize, rng: &mut ChaCha8Rng) -> Result<Vec<usize>, SamplingError> {
    let field = raster::distance_field(instance)?;
    let bbox = raster::bounding_box(instance)?;
    let w = instance.width();

    let mut cells: Vec<Cell> = grid_partition(bbox, k)
        .into_iter()
        .filter_map(|cell| {
            let mut pixels = Vec::new();
            for y in cell.y0..cell.y1 {
                for x in cell.x0..cell.x1 {
                    if instance.get(x, y) {
                        pixels.push((y * w + x, field.get(x, y)));
                    }
                }
            }
            (!pixels.is_empty()).then_some(Cell {
                remaining: pixels.len(),
                pixels,
            })
        })
        .collect();

    let target = k.min(instance.area());
    let mut picked = Vec::with_capacity(target);

    // one draw per distinct cell first
    let first_round: Vec<usize> = if cells.len() >= target {
        index::sample(rng, cells.len(), target).into_vec()
    } else {
        (0..cells.len()).collect()
    };
    for ci in first_round {
        picked.push(draw_from_cell(&mut cells[ci], rng));
    }

    // fewer bearing cells than k: keep drawing from cells with pixels left
    while picked.len() < target {
        let open: Vec<usize> = (0..cells.len()).filter(|&c| cells[c].remaining > 0).collect();
        let ci = open[rng.gen_range(0..open.len())];
        picked.push(draw_from_cell(&mut cells[ci], rng));
    }
    Ok(picked)
}

/// Weighted draw without replacement; drawn pixels get weight 0.
fn draw_from_cell(cell: &mut Cell, rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = cell.pixels.iter().map(|p| p.1).sum();
    let mut u = rng.gen::<f64>() * total;
    let mut chosen = None;
    for (slot, &(idx, weight)) in cell.pixels.iter().enumerate() {
        if weight <= 0.0 {
            continue;
        }
        chosen = Some((slot, idx));
        if u < weight {
            break;
        }
        u -= weight;
    }
    // rounding can walk past the end; the last positive pixel absorbs it
    let (slot, idx) = chosen.expect("cell with remaining pixels");
    cell.pixels[slot].1 = 0.0;
    cell.remaining -= 1;
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(strategy: SamplerStrategy, k: usize, seed: u64) -> SamplerSpec {
        SamplerSpec { strategy, k, seed }
    }

    fn disk(size: usize, radius: f64) -> BinaryMask {
        let c = (size / 2) as f64;
        BinaryMask::from_fn(size, size, |x, y| {
            let (dx, dy) = (x as f64 - c, y as f64 - c);
            dx * dx + dy * dy <= radius * radius
        })
    }

    #[test]
    fn grid_examples() {
        assert_eq!(grid_shape(Rect::new(0, 0, 10, 10), 5), (3, 3));
        assert_eq!(grid_partition(Rect::new(0, 0, 10, 10), 5).len(), 9);
        assert_eq!(grid_partition(Rect::new(0, 0, 1, 1), 5).len(), 1);
        assert_eq!(grid_shape(Rect::new(0, 0, 16, 4), 4), (4, 1));
    }

    #[test]
    fn grid_exact_at_rational_boundary() {
        // 7 / sqrt(49 / 9) = 3 exactly
        assert_eq!(grid_shape(Rect::new(0, 0, 7, 7), 9), (3, 3));
    }

    #[test]
    fn grid_tiles_offset_box() {
        let r = Rect::new(3, 5, 20, 9);
        let cells = grid_partition(r, 6);
        assert_eq!(cells.iter().map(Rect::area).sum::<usize>(), r.area());
        for y in r.y0..r.y1 {
            for x in r.x0..r.x1 {
                assert_eq!(cells.iter().filter(|c| c.contains(x, y)).count(), 1);
            }
        }
    }

    #[test]
    fn single_pixel_any_strategy() {
        let mut m = BinaryMask::new(6, 6);
        m.set(2, 4, true);
        let conf = ScalarField::zeros(6, 6);
        for strategy in SamplerStrategy::ALL {
            let pts = sample_prompts(&m, 3, &spec(strategy, 5, 9), Some(&conf)).unwrap();
            assert_eq!(
                pts,
                vec![PointPrompt {
                    x: 2,
                    y: 4,
                    class_id: 3
                }]
            );
        }
    }

    #[test]
    fn center_on_disk_is_center() {
        let m = disk(21, 7.0);
        let pts = sample_prompts(&m, 0, &spec(SamplerStrategy::Center, 1, 0), None).unwrap();
        assert_eq!((pts[0].x, pts[0].y), (10, 10));
    }

    #[test]
    fn boundary_points_are_on_the_rim() {
        let m = disk(21, 7.0);
        let pts = sample_prompts(&m, 0, &spec(SamplerStrategy::Boundary, 4, 0), None).unwrap();
        for p in pts {
            let (x, y) = (p.x as isize, p.y as isize);
            let touches_bg = [(0, -1), (0, 1), (-1, 0), (1, 0)]
                .iter()
                .any(|&(dx, dy)| !m.get_signed(x + dx, y + dy));
            assert!(touches_bg);
        }
    }

    #[test]
    fn errors() {
        let m = disk(11, 3.0);
        assert!(matches!(
            sample_prompts(&m, 0, &spec(SamplerStrategy::TopConfidence, 2, 0), None),
            Err(SamplingError::MissingConfidence)
        ));
        assert!(matches!(
            sample_prompts(&BinaryMask::new(4, 4), 0, &spec(SamplerStrategy::Random, 2, 0), None),
            Err(SamplingError::EmptyMask)
        ));
        assert!(matches!(
            sample_prompts(&m, 0, &spec(SamplerStrategy::Random, 0, 0), None),
            Err(SamplingError::ZeroPoints)
        ));
    }

    #[test]
    fn small_instance_fills_to_area() {
        // 3-pixel L inside a 2x2 box: grid for k=5 is 2x2 with three bearing cells
        let m = BinaryMask::from_fn(5, 5, |x, y| (x == 1 && (1..3).contains(&y)) || (x == 2 && y == 2));
        for seed in 0..20 {
            let pts = sample_prompts(&m, 0, &spec(SamplerStrategy::SkeletonGrid, 5, seed), None).unwrap();
            assert_eq!(pts.len(), 3);
        }
    }

    #[test]
    fn skeleton_grid_prefers_deep_pixels() {
        // Monte-Carlo over seeds: weighting by the field pulls the mean depth
        // above uniform sampling.
        let m = BinaryMask::from_rect(24, 24, Rect::new(2, 2, 22, 22));
        let field = raster::distance_field(&m).unwrap();
        let mean = |strategy| {
            let mut sum = 0.0;
            let mut n = 0usize;
            for seed in 0..2000 {
                for p in sample_prompts(&m, 0, &spec(strategy, 5, seed), None).unwrap() {
                    sum += field.get(p.x as usize, p.y as usize);
                    n += 1;
                }
            }
            sum / n as f64
        };
        let grid = mean(SamplerStrategy::SkeletonGrid);
        let random = mean(SamplerStrategy::Random);
        assert!(grid > random, "grid {grid} random {random}");
    }
}
