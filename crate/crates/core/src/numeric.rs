//! Small numerical kernels shared by the geometry and rolling code.

use std::ops::{Add, Mul, Sub};

use crate::{Mat3, Vec3};

/// Skew-symmetric matrix `[w]x` with `[w]x * x = w x x`.
pub fn skew(w: &Vec3) -> Mat3 {
    Mat3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

/// Axial vector of a skew matrix, `(Q32, Q13, Q21)`.
pub fn vee(q: &Mat3) -> Vec3 {
    Vec3::new(q[(2, 1)], q[(0, 2)], q[(1, 0)])
}

/// Frobenius norm of the symmetric part `Q + Q^T`.
pub fn asymmetry(q: &Mat3) -> f64 {
    (q + q.transpose()).norm()
}

/// Nearest rotation by modified Gram-Schmidt on the columns, with the third
/// column flipped if the result is left-handed.
pub fn orthonormalize(m: &Mat3) -> Mat3 {
    let c0 = m.column(0).normalize();
    let mut c1: Vec3 = m.column(1).into();
    c1 -= c0 * c0.dot(&c1);
    let c1 = c1.normalize();
    let mut c2: Vec3 = m.column(2).into();
    c2 -= c0 * c0.dot(&c2);
    c2 -= c1 * c1.dot(&c2);
    let mut c2 = c2.normalize();
    if c0.cross(&c1).dot(&c2) < 0.0 {
        c2 = -c2;
    }
    Mat3::from_columns(&[c0, c1, c2])
}

/// Largest absolute entry of `M^T M - I`.
pub fn orthogonality_error(m: &Mat3) -> f64 {
    (m.transpose() * m - Mat3::identity()).abs().max()
}

/// Quintic Hermite interpolation on one cell.
///
/// Values, first and second derivatives are given at both ends of a cell of
/// width `h`; `s` is the normalized position in `[0, 1]`. Returns the
/// interpolant and its first two derivatives with respect to the original
/// variable.
pub fn quintic_hermite(s: f64, h: f64, left: [f64; 3], right: [f64; 3]) -> [f64; 3] {
    let (s2, s3) = (s * s, s * s * s);
    let (s4, s5) = (s3 * s, s3 * s2);
    let b = [
        1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5,
        s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5,
        0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5),
        0.5 * (s3 - 2.0 * s4 + s5),
        -4.0 * s3 + 7.0 * s4 - 3.0 * s5,
        10.0 * s3 - 15.0 * s4 + 6.0 * s5,
    ];
    let d = [
        -30.0 * s2 + 60.0 * s3 - 30.0 * s4,
        1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4,
        0.5 * (2.0 * s - 9.0 * s2 + 12.0 * s3 - 5.0 * s4),
        0.5 * (3.0 * s2 - 8.0 * s3 + 5.0 * s4),
        -12.0 * s2 + 28.0 * s3 - 15.0 * s4,
        30.0 * s2 - 60.0 * s3 + 30.0 * s4,
    ];
    let dd = [
        -60.0 * s + 180.0 * s2 - 120.0 * s3,
        -36.0 * s + 96.0 * s2 - 60.0 * s3,
        0.5 * (2.0 - 18.0 * s + 36.0 * s2 - 20.0 * s3),
        0.5 * (6.0 * s - 24.0 * s2 + 20.0 * s3),
        -24.0 * s + 84.0 * s2 - 60.0 * s3,
        60.0 * s - 180.0 * s2 + 120.0 * s3,
    ];
    let coeff = [
        left[0],
        h * left[1],
        h * h * left[2],
        h * h * right[2],
        h * right[1],
        right[0],
    ];
    let combine = |basis: &[f64; 6]| basis.iter().zip(coeff.iter()).map(|(a, c)| a * c).sum::<f64>();
    [combine(&b), combine(&d) / h, combine(&dd) / (h * h)]
}

/// Fifth-order-accurate first derivative of uniformly sampled data at index
/// `i`, using central stencils in the interior and one-sided five-point
/// stencils near the ends. Needs at least five samples.
pub fn sampled_derivative<T>(samples: &[T], h: f64, i: usize) -> T
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let n = samples.len();
    assert!(n >= 5, "five-point stencil needs at least five samples");
    let f = |k: usize| samples[k];
    let scale = 1.0 / (12.0 * h);
    if i >= 2 && i + 2 < n {
        (f(i - 2) - f(i - 1) * 8.0 + f(i + 1) * 8.0 - f(i + 2)) * scale
    } else if i == 0 {
        (f(4) * (-3.0) + f(3) * 16.0 - f(2) * 36.0 + f(1) * 48.0 - f(0) * 25.0) * scale
    } else if i == 1 {
        (f(0) * (-3.0) - f(1) * 10.0 + f(2) * 18.0 - f(3) * 6.0 + f(4)) * scale
    } else if i == n - 1 {
        (f(n - 1) * 25.0 - f(n - 2) * 48.0 + f(n - 3) * 36.0 - f(n - 4) * 16.0 + f(n - 5) * 3.0)
            * scale
    } else {
        // i == n - 2
        (f(n - 1) * 3.0 + f(n - 2) * 10.0 - f(n - 3) * 18.0 + f(n - 4) * 6.0 - f(n - 5)) * scale
    }
}

const GL10: [(f64, f64); 5] = [
    (0.148_874_338_981_631_22, 0.295_524_224_714_753),
    (0.433_395_394_129_247_2, 0.269_266_719_309_996_5),
    (0.679_409_568_299_024_4, 0.219_086_362_515_982),
    (0.865_063_366_688_984_5, 0.149_451_349_150_580_36),
    (0.973_906_528_517_171_7, 0.066_671_344_308_688_07),
];

/// Ten-point Gauss-Legendre rule on `[a, b]`; exact for polynomials of
/// degree 19.
pub fn gauss_legendre<E>(f: impl Fn(f64) -> Result<f64, E>, a: f64, b: f64) -> Result<f64, E> {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut sum = 0.0;
    for (x, w) in GL10 {
        sum += w * (f(mid - half * x)? + f(mid + half * x)?);
    }
    Ok(sum * half)
}

/// One classical fourth-order Runge-Kutta step for `y' = f(t, y)`.
pub fn rk4_step<Y, F, E>(f: &F, t: f64, y: &Y, h: f64) -> Result<Y, E>
where
    Y: Clone + Add<Output = Y> + Mul<f64, Output = Y>,
    F: Fn(f64, &Y) -> Result<Y, E>,
{
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * h, &(y.clone() + k1.clone() * (0.5 * h)))?;
    let k3 = f(t + 0.5 * h, &(y.clone() + k2.clone() * (0.5 * h)))?;
    let k4 = f(t + h, &(y.clone() + k3.clone() * h))?;
    Ok(y.clone() + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}
