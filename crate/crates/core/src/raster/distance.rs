//! Exact Euclidean distance transform (Felzenszwalb & Huttenlocher lower
//! envelope of parabolas, one pass per axis).

use super::{BinaryMask, RasterError, Result, ScalarField};

const INF: f64 = 1e20;

/// 1-D squared distance transform of `f` into `d`.
fn edt_1d(f: &[f64], d: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        let mut s;
        loop {
            let p = v[k];
            s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] && k > 0 {
                k -= 1;
            } else {
                break;
            }
        }
        // k == 0 with s <= z[0] cannot happen since z[0] = -inf
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, out) in d.iter_mut().enumerate().take(n) {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let dq = q as f64 - p as f64;
        *out = dq * dq + f[p];
    }
}

fn edt_2d(grid: &mut [f64], w: usize, h: usize) {
    let n = w.max(h);
    let mut f = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0; n + 1];

    for x in 0..w {
        for y in 0..h {
            f[y] = grid[y * w + x];
        }
        edt_1d(&f[..h], &mut d[..h], &mut v, &mut z);
        for y in 0..h {
            grid[y * w + x] = d[y];
        }
    }
    for y in 0..h {
        let row = &mut grid[y * w..(y + 1) * w];
        f[..w].copy_from_slice(row);
        edt_1d(&f[..w], &mut d[..w], &mut v, &mut z);
        row.copy_from_slice(&d[..w]);
    }
}

/// Squared Euclidean distance from every pixel to the nearest background
/// pixel, with everything outside the raster counted as background.
/// Background pixels get 0.
pub fn squared_distance_to_background(mask: &BinaryMask) -> Vec<f64> {
    let (w, h) = mask.dims();
    // one-pixel background frame models the raster border
    let (pw, ph) = (w + 2, h + 2);
    let mut grid = vec![0.0f64; pw * ph];
    for (x, y) in mask.foreground() {
        grid[(y + 1) * pw + x + 1] = INF;
    }
    edt_2d(&mut grid, pw, ph);

    let mut out = vec![0.0; w * h];
    for y in 0..h {
        out[y * w..(y + 1) * w].copy_from_slice(&grid[(y + 1) * pw + 1..(y + 1) * pw + 1 + w]);
    }
    out
}

/// Squared Euclidean distance from every pixel to the nearest foreground
/// pixel inside the raster. Foreground pixels get 0; an empty mask gives
/// `f64::INFINITY` everywhere.
pub fn squared_distance_to_foreground(mask: &BinaryMask) -> Vec<f64> {
    if mask.is_empty() {
        return vec![f64::INFINITY; mask.len()];
    }
    let (w, h) = mask.dims();
    let mut grid: Vec<f64> = mask.bits().iter().map(|&b| if b { 0.0 } else { INF }).collect();
    edt_2d(&mut grid, w, h);
    grid
}

/// Euclidean distance to the nearest background pixel, divided by its
/// maximum so the deepest pixel reads 1.0. Background reads 0.
pub fn distance_field(mask: &BinaryMask) -> Result<ScalarField> {
    if mask.is_empty() {
        return Err(RasterError::EmptyMask);
    }
    let mut values: Vec<f64> = squared_distance_to_background(mask)
        .into_iter()
        .map(f64::sqrt)
        .collect();
    let max = values.iter().copied().fold(0.0, f64::max);
    values.iter_mut().for_each(|v| *v /= max);
    ScalarField::from_values(mask.width(), mask.height(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::Rect;

    /// Exhaustive minimum over every background pixel, including a frame
    /// one pixel outside the raster.
    fn brute_force(mask: &BinaryMask) -> Vec<f64> {
        let (w, h) = mask.dims();
        let mut bg = Vec::new();
        for y in -1..=h as isize {
            for x in -1..=w as isize {
                if !mask.get_signed(x, y) {
                    bg.push((x, y));
                }
            }
        }
        let mut out = vec![0.0; w * h];
        for (x, y) in mask.foreground() {
            out[y * w + x] = bg
                .iter()
                .map(|&(bx, by)| {
                    let (dx, dy) = (bx - x as isize, by - y as isize);
                    (dx * dx + dy * dy) as f64
                })
                .fold(f64::INFINITY, f64::min);
        }
        out
    }

    #[test]
    fn single_pixel() {
        let mut m = BinaryMask::new(9, 9);
        m.set(4, 4, true);
        let f = distance_field(&m).unwrap();
        assert_eq!(f.get(4, 4), 1.0);
        assert_eq!(f.values().iter().filter(|&&v| v != 0.0).count(), 1);
    }

    #[test]
    fn square_center_and_corners() {
        let m = BinaryMask::from_rect(9, 9, Rect::new(2, 2, 7, 7));
        let f = distance_field(&m).unwrap();
        assert_eq!(f.get(4, 4), 1.0);
        let min_pos = f
            .values()
            .iter()
            .copied()
            .filter(|&v| v > 0.0)
            .fold(f64::INFINITY, f64::min);
        for &(x, y) in &[(2, 2), (6, 2), (2, 6), (6, 6)] {
            assert_eq!(f.get(x, y), min_pos);
        }
        // squared depth of centre is 9, corners 1
        assert!((min_pos - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn disk_max_at_center() {
        let m = BinaryMask::from_fn(21, 21, |x, y| {
            let (dx, dy) = (x as f64 - 10.0, y as f64 - 10.0);
            dx * dx + dy * dy <= 64.0
        });
        let f = distance_field(&m).unwrap();
        assert_eq!(f.get(10, 10), 1.0);
    }

    #[test]
    fn empty_mask_rejected() {
        assert!(matches!(
            distance_field(&BinaryMask::new(4, 4)),
            Err(RasterError::EmptyMask)
        ));
    }

    #[test]
    fn distance_to_foreground_ignores_border() {
        let mut m = BinaryMask::new(5, 1);
        m.set(0, 0, true);
        let d = squared_distance_to_foreground(&m);
        assert_eq!(d, vec![0.0, 1.0, 4.0, 9.0, 16.0]);
    }

    #[test]
    fn matches_brute_force_on_patterns() {
        let patterns = [
            BinaryMask::from_fn(13, 7, |x, y| (x * 7 + y * 3) % 5 != 0),
            BinaryMask::from_fn(16, 16, |_, _| true),
            BinaryMask::from_fn(11, 9, |x, y| x > y / 2 && x < 9),
        ];
        for m in &patterns {
            assert_eq!(squared_distance_to_background(m), brute_force(m));
        }
    }
}
