//! Topology-preserving thinning.
//!
//! Directional sub-iterations (north, south, east, west border points) delete
//! simple points one at a time, re-checking each candidate just before
//! deletion. Foreground uses 8-adjacency, background 4-adjacency. Pixels with
//! at most one foreground neighbour are end points and are kept.

use std::sync::OnceLock;

use super::{BinaryMask, RasterError, Result};

/// Ring of the eight neighbours, clockwise from north.
const RING: [(isize, isize); 8] = [(0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1)];

fn ring_components(members: u8, eight: bool) -> Vec<u8> {
    let mut comps = Vec::new();
    let mut seen = 0u8;
    for start in 0..8 {
        if members & (1 << start) == 0 || seen & (1 << start) != 0 {
            continue;
        }
        let mut comp = 1u8 << start;
        let mut stack = vec![start];
        seen |= 1 << start;
        while let Some(i) = stack.pop() {
            for (j, rj) in RING.iter().enumerate() {
                if members & (1 << j) == 0 || seen & (1 << j) != 0 {
                    continue;
                }
                let (dx, dy) = ((RING[i].0 - rj.0).abs(), (RING[i].1 - rj.1).abs());
                let adjacent = if eight { dx <= 1 && dy <= 1 } else { dx + dy == 1 };
                if adjacent {
                    seen |= 1 << j;
                    comp |= 1 << j;
                    stack.push(j);
                }
            }
        }
        comps.push(comp);
    }
    comps
}

fn is_simple_config(config: u8) -> bool {
    const EDGE_NEIGHBOURS: u8 = 0b0101_0101;
    let fg = ring_components(config, true).len();
    let bg = ring_components(!config, false)
        .into_iter()
        .filter(|c| c & EDGE_NEIGHBOURS != 0)
        .count();
    fg == 1 && bg == 1
}

fn simple_table() -> &'static [bool; 256] {
    static TABLE: OnceLock<[bool; 256]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [false; 256];
        for (config, slot) in t.iter_mut().enumerate() {
            *slot = is_simple_config(config as u8);
        }
        t
    })
}

fn neighbourhood(mask: &BinaryMask, x: usize, y: usize) -> u8 {
    RING.iter().enumerate().fold(0u8, |acc, (i, &(dx, dy))| {
        if mask.get_signed(x as isize + dx, y as isize + dy) {
            acc | (1 << i)
        } else {
            acc
        }
    })
}

fn deletable(mask: &BinaryMask, x: usize, y: usize, table: &[bool; 256]) -> bool {
    let n = neighbourhood(mask, x, y);
    n.count_ones() > 1 && table[n as usize]
}

/// Thin `mask` to a one-pixel-wide skeleton with the same 8-connected
/// components.
pub fn skeletonize(mask: &BinaryMask) -> Result<BinaryMask> {
    if mask.is_empty() {
        return Err(RasterError::EmptyMask);
    }
    let table = simple_table();
    let mut out = mask.clone();
    // N, S, E, W border directions (index into RING)
    const DIRECTIONS: [usize; 4] = [0, 4, 2, 6];
    let mut candidates = Vec::new();
    loop {
        let mut changed = false;
        for &dir in &DIRECTIONS {
            let (dx, dy) = RING[dir];
            candidates.clear();
            candidates.extend(
                out.foreground().filter(|&(x, y)| {
                    !out.get_signed(x as isize + dx, y as isize + dy) && deletable(&out, x, y, table)
                }),
            );
            for &(x, y) in &candidates {
                if deletable(&out, x, y, table) {
                    out.set(x, y, false);
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{connected_components, Connectivity, Rect};

    #[test]
    fn table_spot_checks() {
        // isolated pixel, interior pixel, line middle, line end
        assert!(!is_simple_config(0));
        assert!(!is_simple_config(0xFF));
        assert!(!is_simple_config(0b0100_0100)); // E and W
        assert!(is_simple_config(0b0000_0100)); // only E
                                                // N, NE, E present: corner of a block, removable
        assert!(is_simple_config(0b0000_0111));
        // N and S with nothing else: bridge
        assert!(!is_simple_config(0b0001_0001));
    }

    #[test]
    fn bar_is_its_own_skeleton() {
        let bar = BinaryMask::from_rect(20, 1, Rect::new(0, 0, 20, 1));
        assert_eq!(skeletonize(&bar).unwrap(), bar);
        let bar = BinaryMask::from_rect(30, 5, Rect::new(5, 2, 25, 3));
        assert_eq!(skeletonize(&bar).unwrap(), bar);
    }

    #[test]
    fn single_pixel_kept() {
        let mut m = BinaryMask::new(5, 5);
        m.set(2, 3, true);
        assert_eq!(skeletonize(&m).unwrap(), m);
    }

    #[test]
    fn filled_square() {
        let m = BinaryMask::from_rect(20, 20, Rect::new(0, 0, 20, 20));
        let s = skeletonize(&m).unwrap();
        assert!(s.is_subset_of(&m));
        assert_eq!(connected_components(&s, Connectivity::Eight).len(), 1);
        assert!(s.area() * 5 < m.area(), "area {}", s.area());
        assert!([(9, 9), (10, 9), (9, 10), (10, 10)].iter().any(|&(x, y)| s.get(x, y)));
        assert_eq!(skeletonize(&s).unwrap(), s);
    }

    #[test]
    fn ring_keeps_its_hole() {
        let m = BinaryMask::from_fn(20, 20, |x, y| {
            let outer = (2..18).contains(&x) && (2..18).contains(&y);
            let inner = (7..13).contains(&x) && (7..13).contains(&y);
            outer && !inner
        });
        let s = skeletonize(&m).unwrap();
        assert_eq!(connected_components(&s, Connectivity::Eight).len(), 1);
        // background inside the loop is still enclosed
        let bg = connected_components(&s.invert(), Connectivity::Four);
        assert_eq!(bg.len(), 2);
    }

    #[test]
    fn empty_rejected() {
        assert!(matches!(
            skeletonize(&BinaryMask::new(3, 3)),
            Err(RasterError::EmptyMask)
        ));
    }
}
