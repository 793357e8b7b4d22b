//! Dense matrix exponential by scaling and squaring with Padé approximants
//! (Higham, "The scaling and squaring method for the matrix exponential
//! revisited", SIAM J. Matrix Anal. Appl. 26, 2005).

use crate::error::{Error, Result};
use crate::qops::{c, CMatrix};

const THETA: [(usize, f64); 5] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068),
    (13, 5.371_920_351_148_152),
];

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

pub(crate) fn norm1(a: &CMatrix) -> f64 {
    a.column_iter().map(|col| col.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// `exp(a)` for a square complex matrix.
pub fn expm(a: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    if n == 0 {
        return Ok(a.clone());
    }
    let norm = norm1(a);
    if !norm.is_finite() {
        return Err(Error::Numerical("matrix exponential of a non-finite matrix".into()));
    }
    let id = CMatrix::identity(n, n);

    for &(m, theta) in &THETA[..4] {
        if norm <= theta {
            let (u, v) = pade_low(a, &id, m);
            return solve(&u, &v);
        }
    }

    let theta13 = THETA[4].1;
    let s = if norm > theta13 { (norm / theta13).log2().ceil() as i32 } else { 0 };
    let scaled = a * c(0.5f64.powi(s));
    let (u, v) = pade13(&scaled, &id);
    let mut r = solve(&u, &v)?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

fn pade_low(a: &CMatrix, id: &CMatrix, m: usize) -> (CMatrix, CMatrix) {
    let b: &[f64] = match m {
        3 => &B3,
        5 => &B5,
        7 => &B7,
        9 => &B9,
        _ => unreachable!("unsupported Padé degree {m}"),
    };
    let a2 = a * a;
    // even powers A^0, A^2, A^4, ...
    let mut powers = vec![id.clone(), a2.clone()];
    while powers.len() < (m + 1) / 2 {
        let next = powers.last().unwrap() * &a2;
        powers.push(next);
    }
    let mut u_inner = CMatrix::zeros(a.nrows(), a.ncols());
    let mut v = CMatrix::zeros(a.nrows(), a.ncols());
    for (k, p) in powers.iter().enumerate() {
        u_inner += p * c(b[2 * k + 1]);
        v += p * c(b[2 * k]);
    }
    (a * u_inner, v)
}

fn pade13(a: &CMatrix, id: &CMatrix) -> (CMatrix, CMatrix) {
    let b = &B13;
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_hi = &a6 * (&a6 * c(b[13]) + &a4 * c(b[11]) + &a2 * c(b[9]));
    let u_inner = u_hi + &a6 * c(b[7]) + &a4 * c(b[5]) + &a2 * c(b[3]) + id * c(b[1]);
    let v_hi = &a6 * (&a6 * c(b[12]) + &a4 * c(b[10]) + &a2 * c(b[8]));
    let v = v_hi + &a6 * c(b[6]) + &a4 * c(b[4]) + &a2 * c(b[2]) + id * c(b[0]);
    (a * u_inner, v)
}

/// `(V − U)⁻¹ (V + U)`
fn solve(u: &CMatrix, v: &CMatrix) -> Result<CMatrix> {
    let denom = v - u;
    denom
        .lu()
        .solve(&(v + u))
        .ok_or_else(|| Error::Numerical("singular Padé denominator in matrix exponential".into()))
}
