use super::{squared_distance_to_background, BinaryMask};

/// Erosion by a Euclidean disk of `radius` pixels: keeps foreground pixels
/// farther than `radius` from any background pixel (the raster border counts
/// as background).
pub fn erode(mask: &BinaryMask, radius: usize) -> BinaryMask {
    if radius == 0 {
        return mask.clone();
    }
    let r2 = (radius * radius) as f64;
    let d2 = squared_distance_to_background(mask);
    let bits = d2.into_iter().map(|v| v > r2).collect();
    BinaryMask::from_bits(mask.width(), mask.height(), bits).expect("same dims")
}
