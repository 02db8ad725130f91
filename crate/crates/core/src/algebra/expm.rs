//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants of degree 3, 5, 7, 9 or 13 (Higham, SIAM J. Matrix Anal.
//! Appl. 26(4), 2005). The degree is picked from the 1-norm so that the
//! backward error stays at unit roundoff.

use nalgebra::DMatrix;

use super::{one_norm_of, ComplexMatrix, C64};
use crate::error::{Error, Result};

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539398330063230e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120., 60., 12., 1.];
const B5: [f64; 6] = [30240., 15120., 3360., 420., 30., 1.];
const B7: [f64; 8] = [17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.];
const B9: [f64; 10] = [
    17643225600.,
    8821612800.,
    2075673600.,
    302702400.,
    30270240.,
    2162160.,
    110880.,
    3960.,
    90.,
    1.,
];
const B13: [f64; 14] = [
    64764752532480000.,
    32382376266240000.,
    7771770303897600.,
    1187353796428800.,
    129060195264000.,
    10559470521600.,
    670442572800.,
    33522128640.,
    1323241920.,
    40840800.,
    960960.,
    16380.,
    182.,
    1.,
];

type M = DMatrix<C64>;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `exp(a)`.
pub fn matrix_exp(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_finite() {
        for col in 0..a.dim() {
            for row in 0..a.dim() {
                let z = a.get(row, col);
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row, col });
                }
            }
        }
    }
    let m = a.as_inner();
    let n = m.nrows();
    if n == 1 {
        return ComplexMatrix::new(M::from_element(1, 1, m[(0, 0)].exp()));
    }

    let norm = one_norm_of(m);
    let ident = M::identity(n, n);
    let result = if norm <= THETA_3 {
        pade_low(m, &ident, &B3)
    } else if norm <= THETA_5 {
        pade_low(m, &ident, &B5)
    } else if norm <= THETA_7 {
        pade_low(m, &ident, &B7)
    } else if norm <= THETA_9 {
        pade_low(m, &ident, &B9)
    } else {
        let s = if norm > THETA_13 {
            (norm / THETA_13).log2().ceil().max(0.0) as i32
        } else {
            0
        };
        let scaled = m * re(0.5f64.powi(s));
        let mut r = pade_13(&scaled, &ident);
        for _ in 0..s {
            r = &r * &r;
        }
        r
    };
    ComplexMatrix::new(result)
}

/// Odd/even split `U = A * sum b_{2k+1} A^{2k}`, `V = sum b_{2k} A^{2k}` for
/// degrees up to 9, then `(V - U)^{-1} (V + U)`.
fn pade_low(a: &M, ident: &M, b: &[f64]) -> M {
    let a2 = a * a;
    let mut power = ident.clone();
    let mut u_inner = ident * re(b[1]);
    let mut v = ident * re(b[0]);
    let degree = b.len() - 1;
    for k in 1..=degree / 2 {
        power = &power * &a2;
        u_inner += &power * re(b[2 * k + 1]);
        v += &power * re(b[2 * k]);
    }
    let u = a * u_inner;
    solve(&(&v - &u), &(&v + &u))
}

fn pade_13(a: &M, ident: &M) -> M {
    let b = &B13;
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_high = &a6 * (&a6 * re(b[13]) + &a4 * re(b[11]) + &a2 * re(b[9]));
    let u = a * (u_high + &a6 * re(b[7]) + &a4 * re(b[5]) + &a2 * re(b[3]) + ident * re(b[1]));
    let v_high = &a6 * (&a6 * re(b[12]) + &a4 * re(b[10]) + &a2 * re(b[8]));
    let v = v_high + &a6 * re(b[6]) + &a4 * re(b[4]) + &a2 * re(b[2]) + ident * re(b[0]);
    solve(&(&v - &u), &(&v + &u))
}

fn solve(lhs: &M, rhs: &M) -> M {
    // The Padé denominator is nonsingular for 1-norms within the theta bounds.
    lhs.clone()
        .lu()
        .solve(rhs)
        .expect("Padé denominator is nonsingular")
}
