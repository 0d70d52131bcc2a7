//! Bigraded chain complexes and the unreduced Khovanov complex.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::algebra::{permute_basis, standard_degree, RingParams};
use crate::cube::{cube_faces, ArrowConvention, Cube, CubeEdge, Resolution};
use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, SparseMatrix};

/// A generator in homological degree `h`; `state` and `index` locate it in
/// the cube (basis index of `A^{⊗k}` or lattice basis position).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub q: i32,
    pub state: u32,
    pub index: usize,
}

/// Free chain groups `C_h` with boundaries `∂_h: C_h → C_{h+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigradedComplex {
    h_min: i32,
    groups: Vec<Vec<Generator>>,
    boundaries: Vec<SparseMatrix>,
}

impl BigradedComplex {
    /// `boundaries[t]` maps `groups[t]` to `groups[t + 1]`.
    pub fn new(h_min: i32, groups: Vec<Vec<Generator>>, boundaries: Vec<SparseMatrix>) -> Result<Self> {
        if boundaries.len() + 1 != groups.len().max(1) {
            return Err(Error::DimensionMismatch { expected: groups.len().saturating_sub(1), found: boundaries.len() });
        }
        for (t, b) in boundaries.iter().enumerate() {
            if b.cols() != groups[t].len() {
                return Err(Error::DimensionMismatch { expected: groups[t].len(), found: b.cols() });
            }
            if b.rows() != groups[t + 1].len() {
                return Err(Error::DimensionMismatch { expected: groups[t + 1].len(), found: b.rows() });
            }
        }
        Ok(BigradedComplex { h_min, groups, boundaries })
    }

    /// Homological degrees that may carry generators.
    pub fn h_range(&self) -> std::ops::Range<i32> {
        self.h_min..self.h_min + self.groups.len() as i32
    }

    pub fn generators(&self, h: i32) -> &[Generator] {
        self.slot(h).map_or(&[], |t| &self.groups[t])
    }

    /// `∂_h`, or `None` when either end is outside the complex.
    pub fn boundary(&self, h: i32) -> Option<&SparseMatrix> {
        self.slot(h).and_then(|t| self.boundaries.get(t))
    }

    pub fn rank(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    fn slot(&self, h: i32) -> Option<usize> {
        let t = h - self.h_min;
        (t >= 0 && (t as usize) < self.groups.len()).then_some(t as usize)
    }

    /// Generator counts per `(h, q)`.
    pub fn ranks(&self) -> BTreeMap<(i32, i32), usize> {
        let mut out = BTreeMap::new();
        for h in self.h_range() {
            for g in self.generators(h) {
                *out.entry((h, g.q)).or_default() += 1;
            }
        }
        out
    }

    pub fn shift(&mut self, dh: i32, dq: i32) {
        self.h_min += dh;
        for g in self.groups.iter_mut().flatten() {
            g.q += dq;
        }
    }

    /// Checks `∂_{h+1} ∘ ∂_h = 0` for every `h`.
    pub fn check_d_squared(&self) -> Result<()> {
        for t in 1..self.boundaries.len() {
            if !self.boundaries[t].compose(&self.boundaries[t - 1]).is_zero() {
                return Err(Error::NotAComplex { h: self.h_min + t as i32 - 1 });
            }
        }
        Ok(())
    }

    /// Checks that every boundary entry joins generators of equal `q`.
    pub fn check_grading(&self) -> Result<()> {
        for (t, b) in self.boundaries.iter().enumerate() {
            for (c, col) in b.columns().iter().enumerate() {
                let q = self.groups[t][c].q;
                if col.iter().any(|&(r, _)| self.groups[t + 1][r].q != q) {
                    return Err(Error::GradingViolation { h: self.h_min + t as i32 });
                }
            }
        }
        Ok(())
    }
}

/// The `A^{⊗k(I)} → A^{⊗k(J)}` map along crossing `i`. The two active
/// factors are moved to the front with the twisted swap, multiplied or
/// comultiplied there, and the result is reordered into `J`'s circle order.
pub fn edge_map(ri: &Resolution, rj: &Resolution, i: usize, p: RingParams) -> Result<SparseMatrix> {
    if ri.state >> i & 1 == 1 || rj.state != ri.state | 1 << i {
        return Err(Error::NotAnEdge { from: ri.state, to: rj.state, crossing: i });
    }
    let (ki, kj) = (ri.k(), rj.k());
    let arrow = ri.arrows[i];
    let xz = (p.x * p.z) as i64;
    let yz = (p.y * p.z) as i64;
    let mut columns = Vec::with_capacity(1 << ki);
    if !arrow.is_loop() {
        debug_assert_eq!(kj + 1, ki);
        let (s, t) = (arrow.source, arrow.target);
        let rest: Vec<usize> = (0..ki).filter(|&c| c != s && c != t).collect();
        let front: Vec<usize> = [s, t].into_iter().chain(rest.iter().copied()).collect();
        let placed: Vec<usize> = std::iter::once(ri.image_of_circle(s, rj))
            .chain(rest.iter().map(|&c| ri.image_of_circle(c, rj)))
            .collect();
        let back = inverse_order(&placed);
        let low = (1usize << (ki - 2)) - 1;
        for b in 0..1usize << ki {
            let (b1, c1) = permute_basis(b, &front, p);
            let (a, bb) = (b1 >> (ki - 1) & 1, b1 >> (ki - 2) & 1);
            let (m, cm) = match (a, bb) {
                (0, 0) => (0, 1),
                (0, 1) => (1, 1),
                (1, 0) => (1, xz),
                _ => {
                    columns.push(Vec::new());
                    continue;
                }
            };
            let mid = m << (kj - 1) | (b1 & low);
            let (b2, c2) = permute_basis(mid, &back, p);
            columns.push(vec![(b2, c1 * cm * c2)]);
        }
    } else {
        debug_assert_eq!(ki + 1, kj);
        let c = arrow.source;
        let out = rj.arrows[i];
        let rest: Vec<usize> = (0..ki).filter(|&x| x != c).collect();
        let front: Vec<usize> = std::iter::once(c).chain(rest.iter().copied()).collect();
        let placed: Vec<usize> = [out.source, out.target]
            .into_iter()
            .chain(rest.iter().map(|&x| ri.image_of_circle(x, rj)))
            .collect();
        let back = inverse_order(&placed);
        let low = (1usize << (ki - 1)) - 1;
        let (hi, lo) = (1usize << (kj - 1), 1usize << (kj - 2));
        for b in 0..1usize << ki {
            let (b1, c1) = permute_basis(b, &front, p);
            let tail = b1 & low;
            let terms: Vec<(usize, i64)> = if b1 >> (ki - 1) & 1 == 0 {
                vec![(hi | tail, 1), (lo | tail, yz)]
            } else {
                vec![(hi | lo | tail, 1)]
            };
            columns.push(
                terms
                    .into_iter()
                    .map(|(mid, cd)| {
                        let (b2, c2) = permute_basis(mid, &back, p);
                        (b2, c1 * cd * c2)
                    })
                    .collect(),
            );
        }
    }
    Ok(SparseMatrix::from_columns(1 << kj, columns))
}

/// Dense form of [`edge_map`].
pub fn edge_map_dense(ri: &Resolution, rj: &Resolution, i: usize, p: RingParams) -> Result<Matrix> {
    edge_map(ri, rj, i, p).map(|m| m.to_dense())
}

/// `placed[f]` is the target position of factor `f`; returns the order
/// argument of `permute_basis`.
fn inverse_order(placed: &[usize]) -> Vec<usize> {
    let mut order = vec![0; placed.len()];
    for (f, &j) in placed.iter().enumerate() {
        order[j] = f;
    }
    order
}

/// Signs on cube edges, stored in the `(from, crossing)` edge order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignAssignment {
    n: usize,
    index: Vec<usize>,
    signs: Vec<i8>,
}

impl SignAssignment {
    pub fn sign(&self, from: u32, crossing: usize) -> i8 {
        self.signs[self.index[(from as usize) * self.n + crossing]]
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }
}

fn edge_index(n: usize, edges: &[CubeEdge]) -> Vec<usize> {
    let mut index = vec![usize::MAX; (1usize << n) * n.max(1)];
    for (e, edge) in edges.iter().enumerate() {
        index[edge.from as usize * n + edge.crossing] = e;
    }
    index
}

/// How the two paths around a face compare: `Some(λ)` when the first
/// composite is `λ` times the second, `None` when both vanish.
pub fn face_relation(first: &SparseMatrix, second: &SparseMatrix) -> Option<Option<i8>> {
    match (first.is_zero(), second.is_zero()) {
        (true, true) => Some(None),
        (true, false) | (false, true) => None,
        _ if first == second => Some(Some(1)),
        _ if *first == second.scale(-1) => Some(Some(-1)),
        _ => None,
    }
}

/// Finds signs making every face anticommute. The system is linear over
/// `F_2`; the solution returned sets every free variable to zero, with the
/// edges `(I, i)` where `I` has no ones below `i` taken as the free ones.
/// At the even specialization this reproduces the Khovanov sign.
pub fn solve_signs(n: usize, edges: &[CubeEdge], maps: &[SparseMatrix]) -> Result<SignAssignment> {
    let index = edge_index(n, edges);
    let at = |s: u32, i: usize| index[s as usize * n + i];
    let faces = cube_faces(n);
    let rows: Vec<Option<(u32, usize, usize, bool)>> = faces
        .par_iter()
        .map(|&(s, i, j)| {
            let (a, b) = (s | 1 << i, s | 1 << j);
            let first = maps[at(a, j)].compose(&maps[at(s, i)]);
            let second = maps[at(b, i)].compose(&maps[at(s, j)]);
            match face_relation(&first, &second) {
                None => Err(Error::FaceNotProportional { state: s, i, j }),
                Some(None) => Ok(None),
                Some(Some(lambda)) => Ok(Some((s, i, j, lambda == 1))),
            }
        })
        .collect::<Result<_>>()?;

    // column order: non-tree edges first, then the spanning tree
    let is_tree = |e: &CubeEdge| e.from & ((1u32 << e.crossing) - 1) == 0;
    let mut column_of = vec![0; edges.len()];
    let mut var_of_column = Vec::with_capacity(edges.len());
    for tree in [false, true] {
        for (e, edge) in edges.iter().enumerate() {
            if is_tree(edge) == tree {
                column_of[e] = var_of_column.len();
                var_of_column.push(e);
            }
        }
    }
    let width = edges.len() + 1;
    let words = width.div_ceil(64);
    let mut matrix: Vec<Vec<u64>> = rows
        .into_iter()
        .flatten()
        .map(|(s, i, j, rhs)| {
            let mut row = vec![0u64; words];
            for e in [at(s, i), at(s | 1 << i, j), at(s, j), at(s | 1 << j, i)] {
                let c = column_of[e];
                row[c / 64] ^= 1 << (c % 64);
            }
            if rhs {
                row[edges.len() / 64] ^= 1 << (edges.len() % 64);
            }
            row
        })
        .collect();

    let bit = |row: &[u64], c: usize| row[c / 64] >> (c % 64) & 1 == 1;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..edges.len() {
        let Some(p) = (r..matrix.len()).find(|&k| bit(&matrix[k], c)) else {
            continue;
        };
        matrix.swap(r, p);
        let pivot = matrix[r].clone();
        for (k, row) in matrix.iter_mut().enumerate() {
            if k != r && bit(row, c) {
                for (w, v) in row.iter_mut().zip(&pivot) {
                    *w ^= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if matrix[r..].iter().any(|row| bit(row, edges.len())) {
        return Err(Error::Unsolvable);
    }
    let mut signs = vec![1i8; edges.len()];
    for (row, &c) in matrix.iter().zip(&pivots) {
        if bit(row, edges.len()) {
            signs[var_of_column[c]] = -1;
        }
    }
    Ok(SignAssignment { n, index, signs })
}

/// Generators of the states of weight `w`, in state order, and the offset of
/// each state's block.
pub(crate) fn layer_offsets<'a>(
    states: impl Iterator<Item = (u32, usize)> + 'a,
) -> (BTreeMap<u32, usize>, usize) {
    let mut offsets = BTreeMap::new();
    let mut total = 0;
    for (s, dim) in states {
        offsets.insert(s, total);
        total += dim;
    }
    (offsets, total)
}

/// Assembles a cube-shaped complex from per-state generator degrees and
/// signed edge maps.
pub(crate) fn assemble(
    cube: &Cube,
    degrees: &[Vec<i32>],
    edges: &[CubeEdge],
    maps: &[SparseMatrix],
    signs: &SignAssignment,
) -> Result<BigradedComplex> {
    let n = cube.n;
    let mut by_weight: Vec<Vec<u32>> = vec![Vec::new(); n + 1];
    for s in 0..1u32 << n {
        by_weight[s.count_ones() as usize].push(s);
    }
    let layout: Vec<(BTreeMap<u32, usize>, usize)> = by_weight
        .iter()
        .map(|states| layer_offsets(states.iter().map(|&s| (s, degrees[s as usize].len()))))
        .collect();
    let groups: Vec<Vec<Generator>> = by_weight
        .iter()
        .map(|states| {
            states
                .iter()
                .flat_map(|&s| {
                    degrees[s as usize].iter().enumerate().map(move |(index, &q)| Generator { q, state: s, index })
                })
                .collect()
        })
        .collect();
    let index = edge_index(n, edges);
    let boundaries: Vec<SparseMatrix> = (0..n)
        .into_par_iter()
        .map(|w| {
            let (offsets, _) = &layout[w];
            let (targets, rows) = &layout[w + 1];
            let mut columns = Vec::with_capacity(groups[w].len());
            for &s in &by_weight[w] {
                let base = offsets[&s];
                for b in 0..degrees[s as usize].len() {
                    debug_assert_eq!(columns.len(), base + b);
                    let mut col = Vec::new();
                    for i in (0..n).filter(|&i| s >> i & 1 == 0) {
                        let e = index[s as usize * n + i];
                        let sign = signs.signs[e] as i64;
                        let shift = targets[&(s | 1 << i)];
                        col.extend(maps[e].column(b).iter().map(|&(r, v)| (shift + r, sign * v)));
                    }
                    columns.push(col);
                }
            }
            SparseMatrix::from_columns(*rows, columns)
        })
        .collect();
    let h_min = -(cube.n_minus as i32);
    BigradedComplex::new(h_min, groups, boundaries)
}

/// Unreduced Khovanov complex at the specialization `p`, in the standard
/// grading: `h = |I| - n₋`, `q = (#1 - #x) + |I| + n₊ - 2n₋`.
pub fn build_unreduced(d: &Diagram, p: RingParams) -> Result<BigradedComplex> {
    build_unreduced_with(d, p, ArrowConvention::Normal)
}

pub fn build_unreduced_with(d: &Diagram, p: RingParams, convention: ArrowConvention) -> Result<BigradedComplex> {
    let cube = Cube::new(d, convention)?;
    let edges = cube.edges();
    let maps: Vec<SparseMatrix> = edges
        .par_iter()
        .map(|e| edge_map(cube.resolution(e.from), cube.resolution(e.to), e.crossing, p))
        .collect::<Result<_>>()?;
    let signs = solve_signs(cube.n, &edges, &maps)?;
    let shift = cube.n_plus as i32 - 2 * cube.n_minus as i32;
    let degrees: Vec<Vec<i32>> = cube
        .resolutions
        .iter()
        .map(|r| {
            let k = r.k();
            (0..1usize << k).map(|b| standard_degree(b, k) + r.weight() as i32 + shift).collect()
        })
        .collect();
    assemble(&cube, &degrees, &edges, &maps, &signs)
}

/// Edge kinds and maps for a cube at `p`, in edge order.
pub fn edge_maps(cube: &Cube, p: RingParams) -> Result<(Vec<CubeEdge>, Vec<SparseMatrix>)> {
    let edges = cube.edges();
    let maps = edges
        .par_iter()
        .map(|e| edge_map(cube.resolution(e.from), cube.resolution(e.to), e.crossing, p))
        .collect::<Result<_>>()?;
    Ok((edges, maps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{comul, mul, perm};
    use crate::cube::{khovanov_sign, resolve};
    use crate::diagram::parse_pd;

    const TREFOIL: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";
    const FIG8: &str = "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]";
    const HOPF: &str = "X[1,3,2,4] X[3,1,4,2]";

    fn presets() -> [RingParams; 4] {
        [
            RingParams::EVEN,
            RingParams::ODD,
            RingParams::new(-1, 1, 1).unwrap(),
            RingParams::new(-1, -1, -1).unwrap(),
        ]
    }

    #[test]
    fn two_circle_merge_is_mul() {
        // Hopf state 00: two circles, arrow of crossing 0 goes 0 -> 1
        let d = parse_pd(HOPF).unwrap();
        let (r0, r1) = (resolve(&d, 0, ArrowConvention::Normal), resolve(&d, 1, ArrowConvention::Normal));
        assert_eq!(r0.k(), 2);
        assert_eq!(r1.k(), 1);
        let a = r0.arrows[0];
        let m = edge_map_dense(&r0, &r1, 0, RingParams::EVEN).unwrap();
        assert_eq!(m, mul(RingParams::EVEN));
        let odd = edge_map_dense(&r0, &r1, 0, RingParams::ODD).unwrap();
        if (a.source, a.target) == (0, 1) {
            assert_eq!(odd, mul(RingParams::ODD));
        } else {
            assert_eq!(odd, &mul(RingParams::ODD) * &perm(RingParams::ODD));
        }
    }

    #[test]
    fn one_circle_split_is_comul() {
        let d = parse_pd(HOPF).unwrap();
        let (r1, r3) = (resolve(&d, 1, ArrowConvention::Normal), resolve(&d, 3, ArrowConvention::Normal));
        assert_eq!((r1.k(), r3.k()), (1, 2));
        let m = edge_map_dense(&r1, &r3, 1, RingParams::EVEN).unwrap();
        assert_eq!(m, comul(RingParams::EVEN));
    }

    #[test]
    fn reversed_merge_picks_up_swap_coefficients() {
        let d = parse_pd(HOPF).unwrap();
        let conv = ArrowConvention::Flipped;
        let (r0, r1) = (resolve(&d, 0, conv), resolve(&d, 1, conv));
        let a = r0.arrows[0];
        let m = edge_map_dense(&r0, &r1, 0, RingParams::ODD).unwrap();
        let expected = if (a.source, a.target) == (1, 0) {
            &mul(RingParams::ODD) * &perm(RingParams::ODD)
        } else {
            mul(RingParams::ODD)
        };
        assert_eq!(m, expected);
    }

    #[test]
    fn not_an_edge() {
        let d = parse_pd(HOPF).unwrap();
        let (r0, r3) = (resolve(&d, 0, ArrowConvention::Normal), resolve(&d, 3, ArrowConvention::Normal));
        assert_eq!(
            edge_map(&r0, &r3, 0, RingParams::EVEN).unwrap_err(),
            Error::NotAnEdge { from: 0, to: 3, crossing: 0 }
        );
    }

    #[test]
    fn even_signs_are_khovanov_signs() {
        for pd in [TREFOIL, FIG8, HOPF, "X[1,5,2,4] X[3,9,4,8] X[5,1,6,10] X[7,3,8,2] X[9,7,10,6]"] {
            let d = parse_pd(pd).unwrap();
            let cube = Cube::new(&d, ArrowConvention::Normal).unwrap();
            let (edges, maps) = edge_maps(&cube, RingParams::EVEN).unwrap();
            let signs = solve_signs(cube.n, &edges, &maps).unwrap();
            for e in &edges {
                assert_eq!(signs.sign(e.from, e.crossing), khovanov_sign(e.from, e.crossing).unwrap());
                assert_eq!(e.sign, khovanov_sign(e.from, e.crossing).unwrap());
            }
        }
    }

    #[test]
    fn single_crossing_has_no_faces() {
        let d = parse_pd("X[1,1,2,2]").unwrap();
        let cube = Cube::new(&d, ArrowConvention::Normal).unwrap();
        let (edges, maps) = edge_maps(&cube, RingParams::ODD).unwrap();
        let signs = solve_signs(1, &edges, &maps).unwrap();
        assert_eq!(signs.signs(), &[1]);
    }

    #[test]
    fn odd_hopf_faces_anticommute() {
        let d = parse_pd(HOPF).unwrap();
        let cube = Cube::new(&d, ArrowConvention::Normal).unwrap();
        let (edges, maps) = edge_maps(&cube, RingParams::ODD).unwrap();
        let signs = solve_signs(2, &edges, &maps).unwrap();
        let m = |s: u32, i: usize| {
            let e = edges.iter().position(|e| e.from == s && e.crossing == i).unwrap();
            maps[e].scale(signs.sign(s, i) as i64).to_dense()
        };
        let total = &(&m(1, 1) * &m(0, 0)) + &(&m(2, 0) * &m(0, 1));
        assert!(total.is_zero());
    }

    #[test]
    fn unknot_complex() {
        let c = build_unreduced(&Diagram::unknot(), RingParams::EVEN).unwrap();
        assert_eq!(c.h_range(), 0..1);
        let qs: Vec<i32> = c.generators(0).iter().map(|g| g.q).collect();
        assert_eq!(qs, vec![1, -1]);
    }

    #[test]
    fn trefoil_chain_ranks() {
        // Σ 2^k(I) per weight with k = (3,2,2,1,2,1,1,2) over states 0..8
        let d = parse_pd(TREFOIL).unwrap();
        let c = build_unreduced(&d, RingParams::EVEN).unwrap();
        assert_eq!(c.h_range(), -3..1);
        let ranks: Vec<usize> = c.h_range().map(|h| c.generators(h).len()).collect();
        assert_eq!(ranks, vec![8, 12, 6, 4]);
    }

    #[test]
    fn d_squared_and_grading_at_presets() {
        for pd in [TREFOIL, FIG8, HOPF, "X[1,1,2,2]", "X[1,2,2,1]"] {
            let d = parse_pd(pd).unwrap();
            for p in presets() {
                for conv in [ArrowConvention::Normal, ArrowConvention::Flipped] {
                    let c = build_unreduced_with(&d, p, conv).unwrap();
                    c.check_d_squared().unwrap_or_else(|e| panic!("{pd} {p}: {e}"));
                    c.check_grading().unwrap();
                }
            }
        }
    }

    #[test]
    fn all_eight_specializations_are_face_consistent() {
        let d = parse_pd("X[1,5,2,4] X[3,9,4,8] X[5,1,6,10] X[7,3,8,2] X[9,7,10,6]").unwrap();
        for p in RingParams::all() {
            let c = build_unreduced(&d, p).unwrap_or_else(|e| panic!("{p}: {e}"));
            c.check_d_squared().unwrap();
        }
    }
}
