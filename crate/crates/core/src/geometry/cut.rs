//! Decomposition of a cut triangle along the zero line of a linear level set.

use alloc::vec::Vec;

use crate::{Error, Point, Result};

/// Which side of the zero level set to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `{phi_h <= 0}`
    Inside,
    /// `{phi_h > 0}`
    Outside,
}

impl Side {
    fn contains(self, value: f64) -> bool {
        match self {
            Side::Inside => value <= 0.0,
            Side::Outside => value > 0.0,
        }
    }
}

fn lerp(a: Point, b: Point, t: f64) -> Point {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

/// Zero crossing on the edge `a -> b` of the linear interpolant.
fn crossing(a: Point, b: Point, va: f64, vb: f64) -> Point {
    lerp(a, b, va / (va - vb))
}

/// Sub-triangles covering `K ∩ {phi_h <= 0}` for a cut element.
pub fn decompose_cut_element(vertices: [Point; 3], values: [f64; 3]) -> Result<Vec<[Point; 3]>> {
    decompose_side(vertices, values, Side::Inside)
}

/// Sub-triangles covering the requested side of a cut element. Orientation of
/// the input triangle is preserved.
pub fn decompose_side(vertices: [Point; 3], values: [f64; 3], side: Side) -> Result<Vec<[Point; 3]>> {
    let kept: Vec<usize> = (0..3).filter(|&i| side.contains(values[i])).collect();
    match kept.len() {
        1 => {
            let i = kept[0];
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let p_ij = crossing(vertices[i], vertices[j], values[i], values[j]);
            let p_ik = crossing(vertices[i], vertices[k], values[i], values[k]);
            Ok(alloc::vec![[vertices[i], p_ij, p_ik]])
        }
        2 => {
            let k = (0..3).find(|i| !kept.contains(i)).unwrap();
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            let p_jk = crossing(vertices[j], vertices[k], values[j], values[k]);
            let p_ki = crossing(vertices[k], vertices[i], values[k], values[i]);
            Ok(alloc::vec![
                [vertices[i], vertices[j], p_jk],
                [vertices[i], p_jk, p_ki]
            ])
        }
        _ => Err(Error::NotCut),
    }
}

/// The segment of the zero line inside a cut element.
pub fn interface_segment(vertices: [Point; 3], values: [f64; 3]) -> Option<[Point; 2]> {
    let mut ends = [[0.0; 2]; 2];
    let mut n = 0;
    for i in 0..3 {
        let j = (i + 1) % 3;
        if (values[i] <= 0.0) != (values[j] <= 0.0) {
            if n < 2 {
                ends[n] = crossing(vertices[i], vertices[j], values[i], values[j]);
            }
            n += 1;
        }
    }
    (n == 2).then_some(ends)
}
