//! The arrow complex: at each state `I`, the lattice `O_I` spanned by the
//! operators `ev_I(w)` for arrow monomials `w`, with the differential induced
//! on monomials. Because every generator acts on `A^{⊗k}` as multiplication
//! by a polynomial in the `x_f`, an operator is determined by its value on
//! `1^{⊗k}`, and lattices are stored in those coordinates.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::algebra::{multiplication_operator, poly_mul_arrow, t_merge, t_split, RingParams};
use crate::complex::{assemble, edge_map, solve_signs, BigradedComplex};
use crate::cube::{ArrowConvention, Cube, EdgeKind, Resolution};
use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::lattice::{Expression, Lattice};
use crate::linalg::{Matrix, SparseMatrix};

/// Largest circle count for admissible-subgraph enumeration.
pub const MAX_GRAPH_CIRCLES: usize = 8;
/// Largest arrow count for admissible-subgraph enumeration.
pub const MAX_GRAPH_ARROWS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    /// The arrow of a crossing.
    Arrow(usize),
    /// A circle, acting by `T^m`.
    Vertex(usize),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Arrow(i) => write!(f, "a{i}"),
            Symbol::Vertex(m) => write!(f, "s{m}"),
        }
    }
}

/// Word in arrows and circles, leftmost symbol applied last.
pub type ArrowMonomial = Vec<Symbol>;

fn symbol_factors(r: &Resolution, s: Symbol) -> Result<(usize, usize)> {
    match s {
        Symbol::Arrow(i) => r.arrows.get(i).map(|a| (a.source, a.target)).ok_or_else(|| Error::UnknownSymbol(s.to_string())),
        Symbol::Vertex(m) if m < r.k() => Ok((m, m)),
        Symbol::Vertex(_) => Err(Error::UnknownSymbol(s.to_string())),
    }
}

/// `ev_I(w)` as a matrix on `A^{⊗k(I)}`.
pub fn ev(r: &Resolution, w: &[Symbol]) -> Result<Matrix> {
    let k = r.k();
    let mut out = Matrix::identity(1 << k);
    for &s in w {
        let (a, b) = symbol_factors(r, s)?;
        let t = if a == b { t_split(k, a)? } else { t_merge(k, a, b)? };
        out = &out * &t;
    }
    Ok(out)
}

/// `ev_I(w)(1^{⊗k})`.
pub fn ev_vector(r: &Resolution, w: &[Symbol]) -> Result<Vec<i64>> {
    let k = r.k();
    let mut v = vec![0; 1 << k];
    v[0] = 1;
    for &s in w.iter().rev() {
        let (a, b) = symbol_factors(r, s)?;
        v = poly_mul_arrow(&v, k, a, b);
    }
    Ok(v)
}

/// An operator applied to `1^{⊗k}`.
pub fn e1(op: &Matrix, k: usize) -> Result<Vec<i64>> {
    let dim = 1usize << k;
    if op.rows() != dim || op.cols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: op.rows().max(op.cols()) });
    }
    Ok(op.column(0))
}

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn small(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter()
        .map(|x| x.to_i64().ok_or(Error::TooLarge { what: "matrix entry", value: usize::MAX, limit: i64::MAX as usize }))
        .collect()
}

/// `O_I`, graded by `x`-degree; each homogeneous piece is in Hermite form.
#[derive(Clone, Debug)]
pub struct OperatorLattice {
    pub state: u32,
    pub k: usize,
    words: Vec<ArrowMonomial>,
    pieces: BTreeMap<u32, Lattice>,
}

impl OperatorLattice {
    pub fn rank(&self) -> usize {
        self.pieces.values().map(Lattice::rank).sum()
    }

    /// Monomials recorded while closing the span; basis expressions refer
    /// to them by position.
    pub fn words(&self) -> &[ArrowMonomial] {
        &self.words
    }

    /// `(x-degree, e1 vector, expression)` for each basis element, by degree.
    pub fn basis(&self) -> impl Iterator<Item = (u32, &Vec<BigInt>, &Expression)> {
        self.pieces.iter().flat_map(|(&d, l)| l.rows().iter().map(move |r| (d, &r.vector, &r.expression)))
    }

    pub fn basis_vectors(&self) -> Vec<Vec<BigInt>> {
        self.basis().map(|(_, v, _)| v.clone()).collect()
    }

    pub fn basis_matrices(&self) -> Result<Vec<Matrix>> {
        self.basis().map(|(_, v, _)| Ok(multiplication_operator(&small(v)?, self.k))).collect()
    }

    /// Coordinates of a vector in the basis, if it lies in the lattice.
    pub fn express(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut out = Vec::with_capacity(self.rank());
        let mut covered = vec![false; v.len()];
        for (&d, l) in &self.pieces {
            let part: Vec<BigInt> = v
                .iter()
                .enumerate()
                .map(|(i, x)| if i.count_ones() == d { covered[i] = true; x.clone() } else { BigInt::zero() })
                .collect();
            out.extend(l.express(&part)?);
        }
        v.iter().zip(&covered).all(|(x, &c)| c || x.is_zero()).then_some(out)
    }

    /// The whole lattice as one Hermite-form lattice.
    pub fn to_lattice(&self) -> Lattice {
        let mut l = Lattice::new(1 << self.k);
        for (i, v) in self.basis_vectors().iter().enumerate() {
            l.insert(v, Expression::from([(i, BigInt::one())]));
        }
        l
    }
}

/// Closes `{1}` under left multiplication by the arrows of `r`.
pub fn operator_lattice(r: &Resolution) -> OperatorLattice {
    let k = r.k();
    let mut start = vec![0; 1 << k];
    start[0] = 1;
    let mut pieces = BTreeMap::new();
    let mut base = Lattice::new(1 << k);
    base.insert(&big(&start), Expression::from([(0, BigInt::one())]));
    pieces.insert(0u32, base);
    let mut words: Vec<ArrowMonomial> = vec![Vec::new()];
    let mut queue = VecDeque::from([(0usize, 0u32, start)]);
    while let Some((id, d, v)) = queue.pop_front() {
        for (i, a) in r.arrows.iter().enumerate() {
            let next = poly_mul_arrow(&v, k, a.source, a.target);
            if next.iter().all(|&x| x == 0) {
                continue;
            }
            let new_id = words.len();
            let piece = pieces.entry(d + 1).or_insert_with(|| Lattice::new(1 << k));
            if piece.insert(&big(&next), Expression::from([(new_id, BigInt::one())])) {
                let mut w = Vec::with_capacity(words[id].len() + 1);
                w.push(Symbol::Arrow(i));
                w.extend_from_slice(&words[id]);
                words.push(w);
                queue.push_back((new_id, d + 1, next));
            }
        }
    }
    pieces.retain(|_, l| l.rank() > 0);
    OperatorLattice { state: r.state, k, words, pieces }
}

/// `∂^I_J` on a monomial: unchanged along a merge, `a_i` prepended along a
/// split. The result is read in `J`.
pub fn arrow_differential(ri: &Resolution, rj: &Resolution, i: usize, w: &[Symbol]) -> Result<ArrowMonomial> {
    if ri.state >> i & 1 == 1 || rj.state != ri.state | 1 << i {
        return Err(Error::NotAnEdge { from: ri.state, to: rj.state, crossing: i });
    }
    let arrow = ri.arrows[i];
    let mut out = Vec::with_capacity(w.len() + 1);
    if arrow.is_loop() {
        out.push(Symbol::Arrow(i));
    }
    for &s in w {
        out.push(match s {
            Symbol::Vertex(m) => Symbol::Vertex(ri.image_of_circle(m, rj)),
            arrow => arrow,
        });
    }
    Ok(out)
}

/// Matrix of the induced map `O_I → O_J` in the two Hermite bases.
pub fn induced_map(ri: &Resolution, li: &OperatorLattice, rj: &Resolution, lj: &OperatorLattice, i: usize) -> Result<SparseMatrix> {
    let mut cache: HashMap<usize, Vec<i64>> = HashMap::new();
    let mut columns = Vec::with_capacity(li.rank());
    for (_, _, expr) in li.basis() {
        let mut image = vec![BigInt::zero(); 1 << rj.k()];
        for (&id, c) in expr {
            let v = match cache.get(&id) {
                Some(v) => v,
                None => {
                    let w = arrow_differential(ri, rj, i, &li.words[id])?;
                    cache.entry(id).or_insert(ev_vector(rj, &w)?)
                }
            };
            for (x, &y) in image.iter_mut().zip(v) {
                if y != 0 {
                    *x += c * y;
                }
            }
        }
        let coords = lj.express(&image).ok_or(Error::BasisExpressionFailure { state: ri.state, crossing: i })?;
        let coords = small(&coords)?;
        columns.push(coords.into_iter().enumerate().filter(|&(_, c)| c != 0).collect());
    }
    Ok(SparseMatrix::from_columns(lj.rank(), columns))
}

/// Lattices of every state of a cube, in state order.
pub fn operator_lattices(cube: &Cube) -> Vec<OperatorLattice> {
    cube.resolutions.par_iter().map(operator_lattice).collect()
}

/// The arrow complex, `q` shifted down by one against the unreduced
/// grading.
pub fn build_reduced(d: &Diagram) -> Result<BigradedComplex> {
    build_reduced_with(d, ArrowConvention::Normal)
}

pub fn build_reduced_with(d: &Diagram, convention: ArrowConvention) -> Result<BigradedComplex> {
    let cube = Cube::new(d, convention)?;
    let lattices = operator_lattices(&cube);
    let edges = cube.edges();
    let maps: Vec<SparseMatrix> = edges
        .par_iter()
        .map(|e| {
            let (from, to) = (e.from as usize, e.to as usize);
            induced_map(&cube.resolutions[from], &lattices[from], &cube.resolutions[to], &lattices[to], e.crossing)
        })
        .collect::<Result<_>>()?;
    let signs = solve_signs(cube.n, &edges, &maps)?;
    let shift = cube.n_plus as i32 - 2 * cube.n_minus as i32 - 1;
    let degrees: Vec<Vec<i32>> = lattices
        .iter()
        .zip(&cube.resolutions)
        .map(|(l, r)| l.basis().map(|(deg, _, _)| l.k as i32 - 2 * deg as i32 + r.weight() as i32 + shift).collect())
        .collect();
    assemble(&cube, &degrees, &edges, &maps, &signs)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareViolation {
    pub from: u32,
    pub crossing: usize,
    pub kind: EdgeKind,
    pub basis_index: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SquareReport {
    pub edges: usize,
    pub elements: usize,
    pub violations: Vec<SquareViolation>,
}

impl SquareReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compares `e1 ∘ ∂` on `O_I` with the even Khovanov edge map after `e1`,
/// for every basis element of every edge.
pub fn check_commuting_square(d: &Diagram) -> Result<SquareReport> {
    check_commuting_square_with(d, ArrowConvention::Normal)
}

pub fn check_commuting_square_with(d: &Diagram, convention: ArrowConvention) -> Result<SquareReport> {
    let cube = Cube::new(d, convention)?;
    let lattices = operator_lattices(&cube);
    let edges = cube.edges();
    let per_edge: Vec<(usize, Vec<SquareViolation>)> = edges
        .par_iter()
        .map(|e| {
            let (from, to) = (e.from as usize, e.to as usize);
            let (ri, rj) = (&cube.resolutions[from], &cube.resolutions[to]);
            let (li, lj) = (&lattices[from], &lattices[to]);
            let induced = induced_map(ri, li, rj, lj, e.crossing)?;
            let khovanov = edge_map(ri, rj, e.crossing, RingParams::EVEN)?.to_dense();
            let target = lj.basis_vectors();
            let mut bad = Vec::new();
            for (b, v) in li.basis_vectors().iter().enumerate() {
                let mut left = vec![BigInt::zero(); 1 << rj.k()];
                for &(row, c) in induced.column(b) {
                    for (x, y) in left.iter_mut().zip(&target[row]) {
                        *x += y * c;
                    }
                }
                let right = big(&khovanov.apply(&small(v)?));
                if left != right {
                    bad.push(SquareViolation { from: e.from, crossing: e.crossing, kind: e.kind, basis_index: b });
                }
            }
            Ok((li.rank(), bad))
        })
        .collect::<Result<_>>()?;
    let mut report = SquareReport { edges: edges.len(), ..Default::default() };
    for (n, bad) in per_edge {
        report.elements += n;
        report.violations.extend(bad);
    }
    Ok(report)
}

/// Arrows (by crossing) and distinguished circles of a subgraph of the arrow
/// multigraph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct AdmissibleSubgraph {
    pub edges: Vec<usize>,
    pub distinguished: Vec<usize>,
}

/// `(circle mask, first Betti number)` of each component spanned by `edges`.
fn components(r: &Resolution, edges: u32) -> Vec<(u32, usize)> {
    let k = r.k();
    let mut parent: Vec<usize> = (0..k).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut touched = 0u32;
    for (i, a) in r.arrows.iter().enumerate() {
        if edges >> i & 1 == 1 {
            touched |= 1 << a.source | 1 << a.target;
            let (x, y) = (root(&mut parent, a.source), root(&mut parent, a.target));
            parent[x] = y;
        }
    }
    let mut comps: BTreeMap<usize, (u32, usize, usize)> = BTreeMap::new();
    for c in (0..k).filter(|&c| touched >> c & 1 == 1) {
        let e = comps.entry(root(&mut parent, c)).or_default();
        e.0 |= 1 << c;
        e.1 += 1;
    }
    for (i, a) in r.arrows.iter().enumerate() {
        if edges >> i & 1 == 1 {
            comps.get_mut(&root(&mut parent, a.source)).unwrap().2 += 1;
        }
    }
    comps.into_values().map(|(mask, v, e)| (mask, e + 1 - v)).collect()
}

/// Every subgraph whose components are a lone distinguished circle, a tree
/// with at most one distinguished circle, or a unicyclic graph with none.
/// Undistinguished circles outside the chosen arrows are left out.
pub fn enumerate_admissible(r: &Resolution) -> Result<Vec<AdmissibleSubgraph>> {
    let (k, n) = (r.k(), r.arrows.len());
    if k > MAX_GRAPH_CIRCLES {
        return Err(Error::TooLarge { what: "circles", value: k, limit: MAX_GRAPH_CIRCLES });
    }
    if n > MAX_GRAPH_ARROWS {
        return Err(Error::TooLarge { what: "arrows", value: n, limit: MAX_GRAPH_ARROWS });
    }
    let mut out = Vec::new();
    for edges in 0..1u32 << n {
        let comps = components(r, edges);
        if comps.iter().any(|&(_, b)| b > 1) {
            continue;
        }
        for marked in 0..1u32 << k {
            let ok = comps.iter().all(|&(mask, b)| (marked & mask).count_ones() as usize <= 1 - b);
            if ok {
                out.push(AdmissibleSubgraph {
                    edges: (0..n).filter(|&i| edges >> i & 1 == 1).collect(),
                    distinguished: (0..k).filter(|&c| marked >> c & 1 == 1).collect(),
                });
            }
        }
    }
    Ok(out)
}

fn subgraph_word(g: &AdmissibleSubgraph) -> ArrowMonomial {
    g.edges.iter().map(|&i| Symbol::Arrow(i)).chain(g.distinguished.iter().map(|&m| Symbol::Vertex(m))).collect()
}

/// `ψ(g)`: the product of `T^{s,t}` over its arrows and `T^m` over its
/// distinguished circles.
pub fn psi(g: &AdmissibleSubgraph, r: &Resolution) -> Result<Matrix> {
    ev(r, &subgraph_word(g))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphSpanReport {
    pub state: u32,
    pub k: usize,
    pub admissible: usize,
    pub lattice_rank: usize,
    pub span_rank: usize,
    /// Rank of the kernel of `ψ` on the free group of admissible subgraphs.
    pub kernel_rank: usize,
    pub lattice_in_span: bool,
    pub span_in_lattice: bool,
    pub equal: bool,
}

/// Compares the span of `ψ` over admissible subgraphs with `O_I`.
pub fn check_graph_span(r: &Resolution) -> Result<GraphSpanReport> {
    let graphs = enumerate_admissible(r)?;
    let images: HashSet<Vec<i64>> = graphs.iter().map(|g| ev_vector(r, &subgraph_word(g))).collect::<Result<_>>()?;
    let mut images: Vec<Vec<i64>> = images.into_iter().collect();
    images.sort();
    let mut span = Lattice::new(1 << r.k());
    for (i, v) in images.iter().enumerate() {
        span.insert(&big(v), Expression::from([(i, BigInt::one())]));
    }
    let lattice = operator_lattice(r).to_lattice();
    let equal = span.hermite_form() == lattice.hermite_form();
    Ok(GraphSpanReport {
        state: r.state,
        k: r.k(),
        admissible: graphs.len(),
        lattice_rank: lattice.rank(),
        span_rank: span.rank(),
        kernel_rank: graphs.len() - span.rank(),
        lattice_in_span: span.contains_lattice(&lattice),
        span_in_lattice: lattice.contains_lattice(&span),
        equal,
    })
}

/// A closed walk `v_0 → v_1 → … → v_0` of `len` edges on `k` circles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    pub k: usize,
    pub vertices: Vec<usize>,
}

impl Cycle {
    fn edge(&self, j: usize) -> Result<Matrix> {
        let m = self.vertices.len();
        let (a, b) = (self.vertices[j], self.vertices[(j + 1) % m]);
        if a == b { t_split(self.k, a) } else { t_merge(self.k, a, b) }
    }

    fn alternating_sums(&self) -> Result<(Matrix, Matrix)> {
        let dim = 1 << self.k;
        let (mut odd, mut even) = (Matrix::zeros(dim, dim), Matrix::zeros(dim, dim));
        for j in 0..self.vertices.len() {
            let t = self.edge(j)?;
            if j % 2 == 0 {
                odd = &odd + &t;
            } else {
                even = &even + &t;
            }
        }
        Ok((odd, even))
    }
}

/// For a cycle of edges `l_1 … l_m`, sums of `ψ` over odd- and
/// even-indexed edges agree when `m` is even, and differ by `T^v` at the
/// vertex joining `l_m` to `l_1` when `m` is odd.
pub fn check_cycle_relation(c: &Cycle) -> Result<bool> {
    let (odd, even) = c.alternating_sums()?;
    if c.vertices.len().is_multiple_of(2) {
        Ok(odd == even)
    } else {
        Ok(odd == &even + &t_split(c.k, c.vertices[0])?)
    }
}

/// Deterministic family of cycles of lengths 1 to 6 on up to 7 circles.
pub fn sample_cycles() -> Vec<Cycle> {
    let mut out = Vec::new();
    for len in 1..=6usize {
        for extra in 0..2 {
            let k = len.max(2) + extra;
            for rot in 0..2 {
                let vertices: Vec<usize> = (0..len).map(|j| (j * 3 + rot + extra) % k).collect();
                let mut distinct = vertices.clone();
                distinct.sort();
                distinct.dedup();
                if distinct.len() == len {
                    out.push(Cycle { k, vertices });
                }
            }
        }
    }
    out
}
