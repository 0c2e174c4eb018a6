//! Symmetric quadrature rules on triangles, in barycentric coordinates.
//!
//! Weights are normalised to sum to one; multiply by the triangle area.

use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct TriangleRule {
    pub degree: usize,
    pub points: &'static [[f64; 3]],
    pub weights: &'static [f64],
}

const THIRD: f64 = 1.0 / 3.0;

static CENTROID_POINTS: [[f64; 3]; 1] = [[THIRD, THIRD, THIRD]];
static CENTROID_WEIGHTS: [f64; 1] = [1.0];

const D2A: f64 = 2.0 / 3.0;
const D2B: f64 = 1.0 / 6.0;
static DEG2_POINTS: [[f64; 3]; 3] = [[D2A, D2B, D2B], [D2B, D2A, D2B], [D2B, D2B, D2A]];
static DEG2_WEIGHTS: [f64; 3] = [THIRD, THIRD, THIRD];

// Dunavant, degree 4, 6 points.
const D4A: f64 = 0.445_948_490_915_965;
const D4B: f64 = 1.0 - 2.0 * D4A;
const D4C: f64 = 0.091_576_213_509_771;
const D4D: f64 = 1.0 - 2.0 * D4C;
const D4W1: f64 = 0.223_381_589_678_011;
const D4W2: f64 = 0.109_951_743_655_322;
static DEG4_POINTS: [[f64; 3]; 6] = [
    [D4B, D4A, D4A],
    [D4A, D4B, D4A],
    [D4A, D4A, D4B],
    [D4D, D4C, D4C],
    [D4C, D4D, D4C],
    [D4C, D4C, D4D],
];
static DEG4_WEIGHTS: [f64; 6] = [D4W1, D4W1, D4W1, D4W2, D4W2, D4W2];

// Dunavant, degree 6, 12 points.
const D6A: f64 = 0.249_286_745_170_910;
const D6B: f64 = 1.0 - 2.0 * D6A;
const D6C: f64 = 0.063_089_014_491_502;
const D6D: f64 = 1.0 - 2.0 * D6C;
const D6E: f64 = 0.053_145_049_844_817;
const D6F: f64 = 0.310_352_451_033_784;
const D6G: f64 = 1.0 - D6E - D6F;
const D6W1: f64 = 0.116_786_275_726_379;
const D6W2: f64 = 0.050_844_906_370_207;
const D6W3: f64 = 0.082_851_075_618_374;
static DEG6_POINTS: [[f64; 3]; 12] = [
    [D6B, D6A, D6A],
    [D6A, D6B, D6A],
    [D6A, D6A, D6B],
    [D6D, D6C, D6C],
    [D6C, D6D, D6C],
    [D6C, D6C, D6D],
    [D6E, D6F, D6G],
    [D6F, D6E, D6G],
    [D6G, D6E, D6F],
    [D6E, D6G, D6F],
    [D6F, D6G, D6E],
    [D6G, D6F, D6E],
];
static DEG6_WEIGHTS: [f64; 12] = [
    D6W1, D6W1, D6W1, D6W2, D6W2, D6W2, D6W3, D6W3, D6W3, D6W3, D6W3, D6W3,
];

pub const SUPPORTED_DEGREES: [usize; 4] = [1, 2, 4, 6];

/// Rule exact for polynomials of total degree `degree`.
pub fn triangle_rule(degree: usize) -> Result<TriangleRule> {
    let (points, weights): (&'static [[f64; 3]], &'static [f64]) = match degree {
        1 => (&CENTROID_POINTS, &CENTROID_WEIGHTS),
        2 => (&DEG2_POINTS, &DEG2_WEIGHTS),
        4 => (&DEG4_POINTS, &DEG4_WEIGHTS),
        6 => (&DEG6_POINTS, &DEG6_WEIGHTS),
        other => return Err(Error::UnsupportedDegree(other)),
    };
    Ok(TriangleRule {
        degree,
        points,
        weights,
    })
}
