//! The rank-two algebra `A = Z·1 ⊕ Z·x` with its structure maps at a `±1`
//! specialization of `(X, Y, Z)`, and the multiplication operators `T`.
//!
//! Tensor powers use the lexicographic basis with `1 < x` and factor `0`
//! most significant: basis index `Σ bit_f · 2^(k-1-f)` where `bit_f = 1`
//! means `x` in factor `f`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingParams {
    pub x: i8,
    pub y: i8,
    pub z: i8,
}

impl RingParams {
    pub const EVEN: RingParams = RingParams { x: 1, y: 1, z: 1 };
    pub const ODD: RingParams = RingParams { x: 1, y: -1, z: 1 };

    pub fn new(x: i8, y: i8, z: i8) -> Option<Self> {
        [x, y, z].iter().all(|v| v.abs() == 1).then_some(RingParams { x, y, z })
    }

    /// All eight specializations, even first.
    pub fn all() -> Vec<RingParams> {
        let mut out = Vec::with_capacity(8);
        for x in [1, -1] {
            for y in [1, -1] {
                for z in [1, -1] {
                    out.push(RingParams { x, y, z });
                }
            }
        }
        out
    }

    /// Coefficient picked up when two adjacent factors `a`, `b` trade
    /// places (`false` = `1`, `true` = `x`).
    pub fn swap_coefficient(self, a: bool, b: bool) -> i64 {
        match (a, b) {
            (false, false) => self.x as i64,
            (true, true) => self.y as i64,
            _ => self.z as i64,
        }
    }
}

impl Default for RingParams {
    fn default() -> Self {
        Self::EVEN
    }
}

impl fmt::Display for RingParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.z)
    }
}

/// `m: A⊗A → A`, columns `11, 1x, x1, xx`, rows `1, x`.
pub fn mul(p: RingParams) -> Matrix {
    Matrix::from_rows(&[&[1, 0, 0, 0], &[0, 1, (p.x * p.z) as i64, 0]])
}

/// `Δ: A → A⊗A`.
pub fn comul(p: RingParams) -> Matrix {
    Matrix::from_rows(&[&[0, 0], &[(p.y * p.z) as i64, 0], &[1, 0], &[0, 1]])
}

/// `(η, ε)`: unit `Z → A` and counit `A → Z`.
pub fn unit_counit(_p: RingParams) -> (Matrix, Matrix) {
    (Matrix::from_rows(&[&[1], &[0]]), Matrix::from_rows(&[&[0, 1]]))
}

/// `P: A⊗A → A⊗A`.
pub fn perm(p: RingParams) -> Matrix {
    Matrix::from_fn(4, 4, |r, c| {
        let (a, b) = (c >> 1 & 1 == 1, c & 1 == 1);
        let swapped = ((c & 1) << 1) | (c >> 1);
        if r == swapped {
            p.swap_coefficient(a, b)
        } else {
            0
        }
    })
}

/// Mask of factor `f` inside a basis index of `A^{⊗k}`.
#[inline]
pub fn factor_mask(k: usize, f: usize) -> usize {
    1 << (k - 1 - f)
}

#[inline]
pub fn factor_is_x(index: usize, k: usize, f: usize) -> bool {
    index & factor_mask(k, f) != 0
}

/// Quantum degree of a basis tensor with `deg 1 = +1`, `deg x = -1`.
pub fn standard_degree(index: usize, k: usize) -> i32 {
    k as i32 - 2 * index.count_ones() as i32
}

/// Reorders tensor factors: output factor `j` is input factor `order[j]`.
/// Returns the output index and the coefficient, which is the product of
/// swap coefficients over every pair of factors whose order is reversed.
pub fn permute_basis(index: usize, order: &[usize], p: RingParams) -> (usize, i64) {
    let k = order.len();
    let mut pos = vec![0; k];
    for (j, &f) in order.iter().enumerate() {
        pos[f] = j;
    }
    let mut coef = 1;
    for a in 0..k {
        for b in a + 1..k {
            if pos[a] > pos[b] {
                coef *= p.swap_coefficient(factor_is_x(index, k, a), factor_is_x(index, k, b));
            }
        }
    }
    let out = order
        .iter()
        .enumerate()
        .filter(|&(_, &f)| factor_is_x(index, k, f))
        .fold(0, |acc, (j, _)| acc | factor_mask(k, j));
    (out, coef)
}

/// The factor-permutation operator on `A^{⊗k}`.
pub fn permutation_operator(order: &[usize], p: RingParams) -> Matrix {
    let dim = 1 << order.len();
    let mut m = Matrix::zeros(dim, dim);
    for c in 0..dim {
        let (r, v) = permute_basis(c, order, p);
        m[(r, c)] = v;
    }
    m
}

fn check_factor(k: usize, f: usize) -> Result<()> {
    if f >= k {
        return Err(Error::IndexOutOfRange { index: f, k });
    }
    Ok(())
}

/// `T^{s,t}` on `A^{⊗k}`: multiplication by `x_s + x_t` (0-based factors).
pub fn t_merge(k: usize, s: usize, t: usize) -> Result<Matrix> {
    check_factor(k, s)?;
    check_factor(k, t)?;
    if s == t {
        return Err(Error::EqualIndices(s));
    }
    let mut poly = vec![0; 1 << k];
    poly[factor_mask(k, s)] = 1;
    poly[factor_mask(k, t)] = 1;
    Ok(multiplication_operator(&poly, k))
}

/// `T^s` on `A^{⊗k}`: multiplication by `2 x_s`.
pub fn t_split(k: usize, s: usize) -> Result<Matrix> {
    check_factor(k, s)?;
    let mut poly = vec![0; 1 << k];
    poly[factor_mask(k, s)] = 2;
    Ok(multiplication_operator(&poly, k))
}

/// Elements of `A^{⊗k}` viewed as polynomials in `x_0..x_{k-1}` with
/// `x_f² = 0`; the coefficient of basis index `m` is that of the monomial
/// whose factors are the set bits of `m`.
pub fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    assert_eq!(a.len(), b.len(), "dimension mismatch");
    let mut out = vec![0; a.len()];
    for (i, &u) in a.iter().enumerate() {
        if u == 0 {
            continue;
        }
        for (j, &v) in b.iter().enumerate() {
            if v != 0 && i & j == 0 {
                out[i | j] += u * v;
            }
        }
    }
    out
}

/// Multiplies by `x_s + x_t`, or by `2 x_s` when `s == t`.
pub fn poly_mul_arrow(a: &[i64], k: usize, s: usize, t: usize) -> Vec<i64> {
    let mut out = vec![0; a.len()];
    let (ms, mt) = (factor_mask(k, s), factor_mask(k, t));
    for (i, &u) in a.iter().enumerate() {
        if u == 0 {
            continue;
        }
        if i & ms == 0 {
            out[i | ms] += u;
        }
        if i & mt == 0 {
            out[i | mt] += u;
        }
    }
    out
}

/// Matrix of multiplication by `poly` on `A^{⊗k}`.
pub fn multiplication_operator(poly: &[i64], k: usize) -> Matrix {
    let dim = 1 << k;
    assert_eq!(poly.len(), dim, "dimension mismatch");
    let mut m = Matrix::zeros(dim, dim);
    for c in 0..dim {
        for (i, &u) in poly.iter().enumerate() {
            if u != 0 && i & c == 0 {
                m[(i | c, c)] += u;
            }
        }
    }
    m
}
