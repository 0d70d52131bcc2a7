//! Integer homology through Smith normal form.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::BigradedComplex;
use crate::error::Result;
use crate::linalg::{BigMatrix, SparseMatrix};
use crate::GradingConvention;

/// `U · M · V = D` with `U`, `V` unimodular and `D` diagonal with
/// `d₁ | d₂ | …`, all `dᵢ ≥ 0`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub d: BigMatrix,
    pub u: BigMatrix,
    pub v: BigMatrix,
}

impl Snf {
    /// Nonzero diagonal entries.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.d.diagonal().into_iter().filter(|x| !x.is_zero()).collect()
    }
}

pub fn smith_normal_form(m: &BigMatrix) -> Snf {
    let mut d = m.clone();
    let mut u = BigMatrix::identity(m.rows());
    let mut v = BigMatrix::identity(m.cols());
    diagonalize(&mut d, Some((&mut u, &mut v)));
    Snf { d, u, v }
}

/// Invariant factors without the transforms.
pub fn invariant_factors_dense(m: &BigMatrix) -> Vec<BigInt> {
    let mut d = m.clone();
    diagonalize(&mut d, None);
    d.diagonal().into_iter().filter(|x| !x.is_zero()).collect()
}

fn diagonalize(d: &mut BigMatrix, mut uv: Option<(&mut BigMatrix, &mut BigMatrix)>) {
    let (rows, cols) = (d.rows(), d.cols());
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for r in t..rows {
            for c in t..cols {
                if !d[(r, c)].is_zero() && best.is_none_or(|(br, bc)| d[(r, c)].abs() < d[(br, bc)].abs()) {
                    best = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = best else { break };
        d.swap_rows(t, pr);
        d.swap_cols(t, pc);
        if let Some((u, v)) = uv.as_mut() {
            u.swap_rows(t, pr);
            v.swap_cols(t, pc);
        }
        loop {
            // the smallest entry of row t and column t becomes the pivot
            let mut pick = (t, t);
            for r in t + 1..rows {
                if !d[(r, t)].is_zero() && d[(r, t)].abs() < d[pick].abs() {
                    pick = (r, t);
                }
            }
            for c in t + 1..cols {
                if !d[(t, c)].is_zero() && d[(t, c)].abs() < d[pick].abs() {
                    pick = (t, c);
                }
            }
            if pick.0 != t {
                d.swap_rows(t, pick.0);
                if let Some((u, _)) = uv.as_mut() {
                    u.swap_rows(t, pick.0);
                }
            }
            if pick.1 != t {
                d.swap_cols(t, pick.1);
                if let Some((_, v)) = uv.as_mut() {
                    v.swap_cols(t, pick.1);
                }
            }
            let mut clear = true;
            for r in t + 1..rows {
                if d[(r, t)].is_zero() {
                    continue;
                }
                let q = -d[(r, t)].div_floor(&d[(t, t)]);
                d.add_row(r, t, &q);
                if let Some((u, _)) = uv.as_mut() {
                    u.add_row(r, t, &q);
                }
                clear &= d[(r, t)].is_zero();
            }
            for c in t + 1..cols {
                if d[(t, c)].is_zero() {
                    continue;
                }
                let q = -d[(t, c)].div_floor(&d[(t, t)]);
                d.add_col(c, t, &q);
                if let Some((_, v)) = uv.as_mut() {
                    v.add_col(c, t, &q);
                }
                clear &= d[(t, c)].is_zero();
            }
            if !clear {
                continue;
            }
            // the pivot must divide the whole trailing block
            let bad = (t + 1..rows).find(|&r| (t + 1..cols).any(|c| !d[(r, c)].is_multiple_of(&d[(t, t)])));
            match bad {
                Some(r) => {
                    let one = BigInt::one();
                    d.add_row(t, r, &one);
                    if let Some((u, _)) = uv.as_mut() {
                        u.add_row(t, r, &one);
                    }
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            if let Some((u, _)) = uv.as_mut() {
                u.negate_row(t);
            }
        }
        t += 1;
    }
}

/// Invariant factors of a sparse integer matrix: unit pivots are eliminated
/// sparsely, the remainder goes through dense Smith normal form.
pub fn invariant_factors(m: &SparseMatrix) -> Vec<BigInt> {
    match unit_elimination(m) {
        Some((units, rest)) => {
            let mut out = vec![BigInt::one(); units];
            out.extend(invariant_factors_dense(&rest));
            out
        }
        None => invariant_factors_dense(&BigMatrix::from(m)),
    }
}

/// Removes pivots equal to `±1`; returns their number and the remaining
/// block, or `None` if an entry would overflow `i64`.
fn unit_elimination(m: &SparseMatrix) -> Option<(usize, BigMatrix)> {
    let mut rows: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); m.rows()];
    let mut cols: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.cols()];
    for (c, col) in m.columns().iter().enumerate() {
        for &(r, v) in col {
            rows[r].insert(c, v);
            cols[c].insert(r);
        }
    }
    let mut units = 0;
    loop {
        let mut pivot: Option<(usize, usize, usize)> = None;
        for (r, row) in rows.iter().enumerate() {
            for (&c, &v) in row {
                if v.abs() == 1 {
                    let cost = (row.len() - 1) * (cols[c].len() - 1);
                    if pivot.is_none_or(|p| cost < p.2) {
                        pivot = Some((r, c, cost));
                    }
                }
            }
        }
        let Some((pr, pc, _)) = pivot else { break };
        let prow = std::mem::take(&mut rows[pr]);
        let pv = prow[&pc];
        for &c in prow.keys() {
            cols[c].remove(&pr);
        }
        let targets: Vec<usize> = cols[pc].iter().copied().collect();
        for r in targets {
            let factor = rows[r][&pc] * pv;
            for (&c, &v) in &prow {
                let entry = rows[r].entry(c).or_insert(0);
                *entry = entry.checked_sub(factor.checked_mul(v)?)?;
                if *entry == 0 {
                    rows[r].remove(&c);
                    cols[c].remove(&r);
                } else {
                    cols[c].insert(r);
                }
            }
        }
        debug_assert!(cols[pc].is_empty());
        units += 1;
    }
    let live_rows: Vec<usize> = (0..rows.len()).filter(|&r| !rows[r].is_empty()).collect();
    let live_cols: Vec<usize> = (0..cols.len()).filter(|&c| !cols[c].is_empty()).collect();
    let mut rest = BigMatrix::zeros(live_rows.len(), live_cols.len());
    let col_pos: BTreeMap<usize, usize> = live_cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    for (i, &r) in live_rows.iter().enumerate() {
        for (&c, &v) in &rows[r] {
            rest[(i, col_pos[&c])] = BigInt::from(v);
        }
    }
    Some((units, rest))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub h: i32,
    pub q: i32,
    pub betti: usize,
    /// Invariant factors greater than one.
    pub torsion: Vec<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyTable {
    /// Nonzero groups sorted by `(h, q)`.
    pub groups: Vec<HomologyGroup>,
}

impl HomologyTable {
    pub fn from_groups(mut groups: Vec<HomologyGroup>) -> Self {
        groups.retain(|g| g.betti > 0 || !g.torsion.is_empty());
        groups.sort_by_key(|g| (g.h, g.q));
        HomologyTable { groups }
    }

    pub fn get(&self, h: i32, q: i32) -> Option<&HomologyGroup> {
        self.groups.iter().find(|g| g.h == h && g.q == q)
    }

    pub fn betti(&self, h: i32, q: i32) -> usize {
        self.get(h, q).map_or(0, |g| g.betti)
    }

    pub fn total_rank(&self) -> usize {
        self.groups.iter().map(|g| g.betti).sum()
    }

    pub fn has_torsion(&self) -> bool {
        self.groups.iter().any(|g| !g.torsion.is_empty())
    }

    pub fn shifted(&self, dh: i32, dq: i32) -> Self {
        HomologyTable::from_groups(
            self.groups.iter().map(|g| HomologyGroup { h: g.h + dh, q: g.q + dq, ..g.clone() }).collect(),
        )
    }

    /// Re-expresses a standard-convention table in `convention`.
    pub fn in_convention(&self, convention: GradingConvention) -> Self {
        HomologyTable::from_groups(
            self.groups.iter().map(|g| HomologyGroup { q: convention.apply(g.q), ..g.clone() }).collect(),
        )
    }
}

/// Blocks of `∂_h` between the quantum-degree pieces of `C_h` and
/// `C_{h+1}`: `(q, source positions, target positions)`.
fn graded_blocks(c: &BigradedComplex, h: i32) -> Vec<(i32, Vec<usize>, Vec<usize>)> {
    let mut src: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (i, g) in c.generators(h).iter().enumerate() {
        src.entry(g.q).or_default().push(i);
    }
    let mut dst: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (i, g) in c.generators(h + 1).iter().enumerate() {
        dst.entry(g.q).or_default().push(i);
    }
    src.into_iter()
        .map(|(q, s)| {
            let t = dst.remove(&q).unwrap_or_default();
            (q, s, t)
        })
        .collect()
}

/// Homology of a complex whose boundaries preserve `q`; fails if
/// `∂² ≠ 0` or a boundary mixes quantum degrees.
pub fn homology(c: &BigradedComplex) -> Result<HomologyTable> {
    c.check_d_squared()?;
    c.check_grading()?;
    // invariant factors of every graded block of every boundary
    let jobs: Vec<(i32, i32, SparseMatrix)> = c
        .h_range()
        .flat_map(|h| {
            let b = c.boundary(h);
            graded_blocks(c, h)
                .into_iter()
                .filter(|(_, _, t)| !t.is_empty())
                .filter_map(move |(q, s, t)| b.map(|b| (h, q, b.submatrix(&t, &s))))
        })
        .collect();
    let factors: BTreeMap<(i32, i32), Vec<BigInt>> =
        jobs.into_par_iter().map(|(h, q, m)| ((h, q), invariant_factors(&m))).collect();
    let rank = |h: i32, q: i32| factors.get(&(h, q)).map_or(0, Vec::len);
    let mut groups = Vec::new();
    for ((h, q), dim) in c.ranks() {
        let betti = dim - rank(h, q) - rank(h - 1, q);
        let torsion = factors
            .get(&(h - 1, q))
            .map(|f| {
                f.iter()
                    .filter(|x| !x.is_one())
                    .map(|x| x.to_u64().expect("torsion coefficient exceeds u64"))
                    .collect()
            })
            .unwrap_or_default();
        groups.push(HomologyGroup { h, q, betti, torsion });
    }
    Ok(HomologyTable::from_groups(groups))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Generator;
    use crate::linalg::Matrix;
    use proptest::prelude::*;

    fn big(rows: &[&[i64]]) -> BigMatrix {
        BigMatrix::from(&Matrix::from_rows(rows))
    }

    fn check(m: &BigMatrix) -> Snf {
        let snf = smith_normal_form(m);
        assert_eq!(&(&snf.u * m) * &snf.v, snf.d);
        assert!(snf.d.is_diagonal());
        assert_eq!(snf.u.determinant().abs(), BigInt::one());
        assert_eq!(snf.v.determinant().abs(), BigInt::one());
        let diag = snf.d.diagonal();
        for w in diag.windows(2) {
            assert!(!w[0].is_negative());
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
        snf
    }

    #[test]
    fn snf_examples() {
        assert_eq!(check(&big(&[&[0]])).d, big(&[&[0]]));
        assert_eq!(check(&big(&[&[2, 4], &[6, 8]])).d, big(&[&[2, 0], &[0, 4]]));
        let d = check(&big(&[&[2, 0], &[0, 3]])).d;
        assert_eq!(d.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
        check(&BigMatrix::zeros(0, 3));
        check(&BigMatrix::zeros(3, 0));
    }

    #[test]
    fn sparse_path_agrees_with_dense() {
        let m = Matrix::from_rows(&[&[1, 2, 0, 4], &[2, 4, 0, 8], &[0, 3, 6, 9], &[5, 0, 0, 10]]);
        let sparse = invariant_factors(&SparseMatrix::from_dense(&m));
        let dense = smith_normal_form(&BigMatrix::from(&m)).invariant_factors();
        assert_eq!(sparse, dense);
    }

    #[test]
    fn single_generator_complex() {
        let c = BigradedComplex::new(0, vec![vec![Generator { q: 1, state: 0, index: 0 }]], vec![]).unwrap();
        let t = homology(&c).unwrap();
        assert_eq!(t.groups, vec![HomologyGroup { h: 0, q: 1, betti: 1, torsion: vec![] }]);
    }

    #[test]
    fn multiplication_by_two_gives_torsion() {
        let g = |h: usize| vec![Generator { q: 0, state: h as u32, index: 0 }];
        let d = SparseMatrix::from_dense(&Matrix::from_rows(&[&[2]]));
        let c = BigradedComplex::new(0, vec![g(0), g(1)], vec![d]).unwrap();
        let t = homology(&c).unwrap();
        assert_eq!(t.groups, vec![HomologyGroup { h: 1, q: 0, betti: 0, torsion: vec![2] }]);
    }

    #[test]
    fn rejects_non_complex() {
        let g = |h: u32| vec![Generator { q: 0, state: h, index: 0 }];
        let one = || SparseMatrix::from_dense(&Matrix::from_rows(&[&[1]]));
        let c = BigradedComplex::new(0, vec![g(0), g(1), g(2)], vec![one(), one()]).unwrap();
        assert!(matches!(homology(&c), Err(crate::error::Error::NotAComplex { h: 0 })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn snf_remultiplies(rows in 1usize..7, cols in 1usize..8, seed in proptest::collection::vec(-9i64..10, 56)) {
            let m = Matrix::from_fn(rows, cols, |r, c| seed[r * 8 + c]);
            let snf = check(&BigMatrix::from(&m));
            let sparse = invariant_factors(&SparseMatrix::from_dense(&m));
            prop_assert_eq!(sparse, snf.invariant_factors());
        }
    }
}
