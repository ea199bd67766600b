//! Dense matrix exponential by scaling and squaring with diagonal Padé
//! approximants (degrees 3, 5, 7, 9 and 13), using the 1-norm thresholds of
//! Higham, "The scaling and squaring method for the matrix exponential
//! revisited", SIAM J. Matrix Anal. Appl. 26 (2005).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

type CMatrix = DMatrix<Complex64>;

const THETA_3: f64 = 1.495_585_217_958_292e-2;
const THETA_5: f64 = 2.539_398_330_063_23e-1;
const THETA_7: f64 = 9.504_178_996_162_932e-1;
const THETA_9: f64 = 2.097_847_961_257_068e0;
const THETA_13: f64 = 5.371_920_351_148_152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17_297_280.0,
    8_648_640.0,
    1_995_840.0,
    277_200.0,
    25_200.0,
    1_512.0,
    56.0,
    1.0,
];
const B9: [f64; 10] = [
    17_643_225_600.0,
    8_821_612_800.0,
    2_075_673_600.0,
    302_702_400.0,
    30_270_240.0,
    2_162_160.0,
    110_880.0,
    3_960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Maximum absolute column sum.
pub fn norm1(a: &CMatrix) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn scale(a: &CMatrix, s: f64) -> CMatrix {
    a * Complex64::new(s, 0.0)
}

fn add_identity(m: &mut CMatrix, s: f64) {
    for i in 0..m.nrows() {
        m[(i, i)] += Complex64::new(s, 0.0);
    }
}

/// Returns (U, V) for degree m ∈ {3, 5, 7, 9} from the powers A², A⁴, …
fn pade_low(a: &CMatrix, coeffs: &[f64]) -> (CMatrix, CMatrix) {
    let n = a.nrows();
    let a2 = a * a;
    let mut powers = vec![a2.clone()];
    while powers.len() < coeffs.len() / 2 - 1 {
        let next = powers.last().unwrap() * &a2;
        powers.push(next);
    }
    let mut u_inner = CMatrix::zeros(n, n);
    let mut v = CMatrix::zeros(n, n);
    add_identity(&mut u_inner, coeffs[1]);
    add_identity(&mut v, coeffs[0]);
    for (k, p) in powers.iter().enumerate() {
        u_inner += scale(p, coeffs[2 * k + 3]);
        v += scale(p, coeffs[2 * k + 2]);
    }
    (a * u_inner, v)
}

fn pade_13(a: &CMatrix) -> (CMatrix, CMatrix) {
    let b = &B13;
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let mut u_hi = scale(&a6, b[13]) + scale(&a4, b[11]) + scale(&a2, b[9]);
    u_hi = &a6 * u_hi;
    let mut u_inner = u_hi + scale(&a6, b[7]) + scale(&a4, b[5]) + scale(&a2, b[3]);
    add_identity(&mut u_inner, b[1]);
    let u = a * u_inner;

    let mut v_hi = scale(&a6, b[12]) + scale(&a4, b[10]) + scale(&a2, b[8]);
    v_hi = &a6 * v_hi;
    let mut v = v_hi + scale(&a6, b[6]) + scale(&a4, b[4]) + scale(&a2, b[2]);
    add_identity(&mut v, b[0]);
    (u, v)
}

fn solve_pade(u: CMatrix, v: CMatrix) -> Result<CMatrix> {
    let p = &v + &u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .ok_or_else(|| Error::NumericalFailure("singular Padé denominator".into()))
}

/// `exp(a)` for a square complex matrix.
pub fn expm(a: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::NumericalFailure(format!(
            "expm of a non-square {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NumericalFailure("non-finite generator entry".into()));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let norm = norm1(a);
    let low: [(f64, &[f64]); 4] = [(THETA_3, &B3), (THETA_5, &B5), (THETA_7, &B7), (THETA_9, &B9)];
    for (theta, coeffs) in low {
        if norm <= theta {
            let (u, v) = pade_low(a, coeffs);
            return solve_pade(u, v);
        }
    }
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = scale(a, 0.5f64.powi(squarings));
    let (u, v) = pade_13(&scaled);
    let mut x = solve_pade(u, v)?;
    for _ in 0..squarings {
        x = &x * &x;
    }
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NumericalFailure("matrix exponential overflowed".into()));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Plain Taylor series; only accurate for small norms.
    fn taylor(a: &CMatrix, terms: usize) -> CMatrix {
        let n = a.nrows();
        let mut sum = CMatrix::identity(n, n);
        let mut term = CMatrix::identity(n, n);
        for k in 1..terms {
            term = &term * a * c(1.0 / k as f64, 0.0);
            sum += &term;
        }
        sum
    }

    #[test]
    fn diagonal_matrix() {
        let a = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(0.5, 0.0),
            c(-3.0, 1.0),
            c(0.0, 20.0),
        ]));
        let e = expm(&a).unwrap();
        for i in 0..3 {
            let want = a[(i, i)].exp();
            assert!((e[(i, i)] - want).norm() < 1e-13 * want.norm().max(1.0));
        }
    }

    #[test]
    fn rotation_generator() {
        // exp(-i θ σx) = cos θ I − i sin θ σx
        for theta in [1e-3, 0.1, 1.0, 7.5, 60.0] {
            let a = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -theta), c(0.0, -theta), c(0.0, 0.0)]);
            let e = expm(&a).unwrap();
            let want = CMatrix::from_row_slice(
                2,
                2,
                &[
                    c(theta.cos(), 0.0),
                    c(0.0, -theta.sin()),
                    c(0.0, -theta.sin()),
                    c(theta.cos(), 0.0),
                ],
            );
            assert!(max_diff(&e, &want) < 1e-12, "theta = {theta}");
        }
    }

    #[test]
    fn matches_taylor_for_each_pade_degree() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for target_norm in [0.01, 0.2, 0.9, 2.0, 4.0] {
            let mut a = CMatrix::from_fn(5, 5, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let n = norm1(&a);
            a *= c(target_norm / n, 0.0);
            let diff = max_diff(&expm(&a).unwrap(), &taylor(&a, 60));
            assert!(diff < 1e-13, "norm {target_norm}: {diff}");
        }
    }

    #[test]
    fn agrees_with_nalgebra_on_large_norms() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for size in [3, 6, 10] {
            let a = CMatrix::from_fn(size, size, |_, _| {
                c(rng.random_range(-3.0..1.0), rng.random_range(-5.0..5.0))
            });
            let ours = expm(&a).unwrap();
            let reference = a.clone().exp();
            let scale = reference.iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(max_diff(&ours, &reference) < 1e-10 * scale.max(1.0));
        }
    }

    #[test]
    fn zero_and_non_finite() {
        let z = CMatrix::zeros(4, 4);
        assert_eq!(expm(&z).unwrap(), CMatrix::identity(4, 4));
        let mut bad = CMatrix::zeros(2, 2);
        bad[(0, 1)] = c(f64::NAN, 0.0);
        assert!(matches!(expm(&bad), Err(Error::NumericalFailure(_))));
    }
}
