use super::{BinaryMask, Connectivity};

/// Component id per pixel (0 = background, ids start at 1 in row-major order
/// of each component's first pixel).
#[derive(Debug, Clone)]
pub struct ComponentLabels {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<u32>,
    pub count: usize,
}

impl ComponentLabels {
    /// Mask of component `id` (1-based).
    pub fn mask(&self, id: u32) -> BinaryMask {
        let bits = self.labels.iter().map(|&l| l == id).collect();
        BinaryMask::from_bits(self.width, self.height, bits).expect("dims from a valid mask")
    }

    pub fn masks(&self) -> Vec<BinaryMask> {
        let mut out: Vec<Vec<bool>> = vec![vec![false; self.labels.len()]; self.count];
        for (i, &l) in self.labels.iter().enumerate() {
            if l > 0 {
                out[l as usize - 1][i] = true;
            }
        }
        out.into_iter()
            .map(|bits| BinaryMask::from_bits(self.width, self.height, bits).expect("valid dims"))
            .collect()
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

fn union(parent: &mut [u32], a: u32, b: u32) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        // keep the smaller provisional label as root
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi as usize] = lo;
    }
}

/// Two-pass union-find labelling.
pub fn label_components(mask: &BinaryMask, connectivity: Connectivity) -> ComponentLabels {
    let (w, h) = mask.dims();
    let mut labels = vec![0u32; w * h];
    // provisional label 0 is unused so that 0 can mean background
    let mut parent: Vec<u32> = vec![0];

    // already-visited neighbours in raster order
    let back: &[(isize, isize)] = match connectivity {
        Connectivity::Four => &[(-1, 0), (0, -1)],
        Connectivity::Eight => &[(-1, 0), (-1, -1), (0, -1), (1, -1)],
    };

    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) {
                continue;
            }
            let mut current = 0u32;
            for &(dx, dy) in back {
                let (nx, ny) = (x as isize + dx, y as isize + dy);
                if !mask.get_signed(nx, ny) {
                    continue;
                }
                let l = labels[ny as usize * w + nx as usize];
                if current == 0 {
                    current = l;
                } else if l != current {
                    union(&mut parent, current, l);
                }
            }
            if current == 0 {
                current = parent.len() as u32;
                parent.push(current);
            }
            labels[y * w + x] = current;
        }
    }

    // Provisional labels are issued in scan order and roots are always the
    // minimum provisional label, so numbering roots by first appearance gives
    // row-major ordering of first pixels.
    let mut remap = vec![0u32; parent.len()];
    let mut count = 0u32;
    for l in labels.iter_mut() {
        if *l == 0 {
            continue;
        }
        let root = find(&mut parent, *l) as usize;
        if remap[root] == 0 {
            count += 1;
            remap[root] = count;
        }
        *l = remap[root];
    }

    ComponentLabels {
        width: w,
        height: h,
        labels,
        count: count as usize,
    }
}

/// Decompose a mask into disjoint connected instances, ordered by the
/// row-major position of each instance's first pixel.
pub fn connected_components(mask: &BinaryMask, connectivity: Connectivity) -> Vec<BinaryMask> {
    label_components(mask, connectivity).masks()
}
