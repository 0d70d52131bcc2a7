//! The cube of resolutions.
//!
//! State `I` is a bit mask with bit `i` giving the smoothing of crossing `i`.
//! The 0-smoothing of `X[a,b,c,d]` joins `a-b` and `c-d`, the 1-smoothing
//! joins `a-d` and `b-c`. Every crossing leaves an arrow between the two
//! smoothing arcs, pointing from the arc that carries the outgoing under-arc
//! `c` to the arc that carries the incoming under-arc `a`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::diagram::{Arc, Diagram};
use crate::error::{Error, Result};

/// Global arrow orientation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ArrowConvention {
    #[default]
    Normal,
    /// Every arrow reversed.
    Flipped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub crossing: usize,
    pub source: usize,
    pub target: usize,
}

impl Arrow {
    pub fn is_loop(&self) -> bool {
        self.source == self.target
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolution {
    pub state: u32,
    /// Arc labels of each circle, circles sorted by their smallest label.
    pub circles: Vec<Vec<Arc>>,
    pub arrows: Vec<Arrow>,
    circle_of: BTreeMap<Arc, usize>,
}

impl Resolution {
    pub fn k(&self) -> usize {
        self.circles.len()
    }

    pub fn circle_of(&self, arc: Arc) -> usize {
        self.circle_of[&arc]
    }

    /// `|I|`.
    pub fn weight(&self) -> u32 {
        self.state.count_ones()
    }

    /// Circle of `other` that contains circle `c` of `self` when the two
    /// states differ at one crossing (circles not involved map bijectively).
    pub fn image_of_circle(&self, c: usize, other: &Resolution) -> usize {
        match self.circles[c].first() {
            Some(&a) => other.circle_of(a),
            None => 0,
        }
    }
}

/// Resolves every crossing according to `state`.
pub fn resolve(d: &Diagram, state: u32, convention: ArrowConvention) -> Resolution {
    let arcs: Vec<Arc> = d.arcs().collect();
    if arcs.is_empty() {
        return Resolution { state, circles: vec![Vec::new()], arrows: Vec::new(), circle_of: BTreeMap::new() };
    }
    let index: BTreeMap<Arc, usize> = arcs.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let mut parent: Vec<usize> = (0..arcs.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut union = |a: Arc, b: Arc| {
        let (ra, rb) = (find(&mut parent, index[&a]), find(&mut parent, index[&b]));
        parent[ra.max(rb)] = ra.min(rb);
    };
    for (i, x) in d.crossings().iter().enumerate() {
        if state >> i & 1 == 0 {
            union(x[0], x[1]);
            union(x[2], x[3]);
        } else {
            union(x[0], x[3]);
            union(x[1], x[2]);
        }
    }
    // arcs are sorted, so roots appear in order of their smallest label
    let mut root_circle = BTreeMap::new();
    let mut circles: Vec<Vec<Arc>> = Vec::new();
    let mut circle_of = BTreeMap::new();
    for (i, &a) in arcs.iter().enumerate() {
        let r = find(&mut parent, i);
        let c = *root_circle.entry(r).or_insert_with(|| {
            circles.push(Vec::new());
            circles.len() - 1
        });
        circles[c].push(a);
        circle_of.insert(a, c);
    }
    let arrows = d
        .crossings()
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let from = if state >> i & 1 == 0 { x[2] } else { x[1] };
            let (source, target) = (circle_of[&from], circle_of[&x[0]]);
            match convention {
                ArrowConvention::Normal => Arrow { crossing: i, source, target },
                ArrowConvention::Flipped => Arrow { crossing: i, source: target, target: source },
            }
        })
        .collect();
    Resolution { state, circles, arrows, circle_of }
}

/// `(-1)^{#{k < i : I_k = 1}}`.
pub fn khovanov_sign(state: u32, i: usize) -> Result<i8> {
    if state >> i & 1 == 1 {
        return Err(Error::CoordinateAlreadyOne { state, coordinate: i });
    }
    let below = state & ((1u32 << i) - 1);
    Ok(if below.count_ones().is_multiple_of(2) { 1 } else { -1 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Merge,
    Split,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CubeEdge {
    pub from: u32,
    pub to: u32,
    pub crossing: usize,
    pub sign: i8,
    pub kind: EdgeKind,
}

/// Largest crossing number for which the whole cube is built.
pub const MAX_CUBE_CROSSINGS: usize = 16;

/// All resolutions of a diagram, indexed by state.
#[derive(Clone, Debug)]
pub struct Cube {
    pub n: usize,
    pub n_plus: usize,
    pub n_minus: usize,
    pub convention: ArrowConvention,
    pub resolutions: Vec<Resolution>,
}

impl Cube {
    pub fn new(d: &Diagram, convention: ArrowConvention) -> Result<Self> {
        let n = d.crossing_count();
        if n > MAX_CUBE_CROSSINGS {
            return Err(Error::TooLarge { what: "crossings", value: n, limit: MAX_CUBE_CROSSINGS });
        }
        let resolutions = (0..1u32 << n).into_par_iter().map(|s| resolve(d, s, convention)).collect();
        let (n_plus, n_minus) = d.crossing_signs();
        Ok(Cube { n, n_plus, n_minus, convention, resolutions })
    }

    pub fn resolution(&self, state: u32) -> &Resolution {
        &self.resolutions[state as usize]
    }

    /// Edges sorted by `(from, crossing)`.
    pub fn edges(&self) -> Vec<CubeEdge> {
        let mut out = Vec::with_capacity(self.n << self.n.saturating_sub(1));
        for r in &self.resolutions {
            for i in 0..self.n {
                if r.state >> i & 1 == 1 {
                    continue;
                }
                let a = r.arrows[i];
                out.push(CubeEdge {
                    from: r.state,
                    to: r.state | 1 << i,
                    crossing: i,
                    sign: khovanov_sign(r.state, i).unwrap(),
                    kind: if a.is_loop() { EdgeKind::Split } else { EdgeKind::Merge },
                });
            }
        }
        out
    }

    pub fn faces(&self) -> Vec<(u32, usize, usize)> {
        cube_faces(self.n)
    }
}

pub fn cube_edges(d: &Diagram) -> Result<Vec<CubeEdge>> {
    Ok(Cube::new(d, ArrowConvention::Normal)?.edges())
}

/// 2-faces `(I, i, j)` with `i < j` and `I_i = I_j = 0`.
pub fn cube_faces(n: usize) -> Vec<(u32, usize, usize)> {
    let mut out = Vec::new();
    for s in 0..1u32 << n {
        for i in 0..n {
            for j in i + 1..n {
                if s >> i & 1 == 0 && s >> j & 1 == 0 {
                    out.push((s, i, j));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;

    const TREFOIL: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";

    #[test]
    fn trefoil_circle_counts() {
        let d = parse_pd(TREFOIL).unwrap();
        let cube = Cube::new(&d, ArrowConvention::Normal).unwrap();
        let ks: Vec<usize> = cube.resolutions.iter().map(Resolution::k).collect();
        assert_eq!(ks, vec![3, 2, 2, 1, 2, 1, 1, 2]);
        let fig8 = parse_pd("X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]").unwrap();
        let cube = Cube::new(&fig8, ArrowConvention::Normal).unwrap();
        let ks: Vec<usize> = cube.resolutions.iter().map(Resolution::k).collect();
        assert_eq!(ks, vec![3, 2, 2, 1, 2, 1, 1, 2, 2, 1, 1, 2, 3, 2, 2, 3]);
    }

    #[test]
    fn unknot_resolution() {
        let r = resolve(&Diagram::unknot(), 0, ArrowConvention::Normal);
        assert_eq!(r.k(), 1);
        assert!(r.arrows.is_empty());
    }

    #[test]
    fn sign_examples() {
        assert_eq!(khovanov_sign(0b000, 0).unwrap(), 1);
        assert_eq!(khovanov_sign(0b101, 1).unwrap(), -1);
        assert_eq!(khovanov_sign(0b011, 2).unwrap(), 1);
        assert_eq!(
            khovanov_sign(0b001, 0).unwrap_err(),
            Error::CoordinateAlreadyOne { state: 1, coordinate: 0 }
        );
    }

    #[test]
    fn edge_and_face_counts() {
        assert!(cube_edges(&Diagram::unknot()).unwrap().is_empty());
        let hopf = parse_pd("X[1,3,2,4] X[3,1,4,2]").unwrap();
        assert_eq!(cube_edges(&hopf).unwrap().len(), 4);
        assert_eq!(cube_faces(2).len(), 1);
        assert_eq!(cube_faces(3).len(), 6);
        assert_eq!(cube_faces(1).len(), 0);
    }

    #[test]
    fn edges_change_circle_count_by_one() {
        let d = parse_pd("X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]").unwrap();
        let cube = Cube::new(&d, ArrowConvention::Normal).unwrap();
        let edges = cube.edges();
        assert_eq!(edges.len(), 4 * 8);
        for e in edges {
            let (ki, kj) = (cube.resolution(e.from).k() as i64, cube.resolution(e.to).k() as i64);
            match e.kind {
                EdgeKind::Merge => assert_eq!(kj, ki - 1),
                EdgeKind::Split => assert_eq!(kj, ki + 1),
            }
        }
    }

    #[test]
    fn faces_anticommute_in_sign() {
        for (s, i, j) in cube_faces(4) {
            let a = khovanov_sign(s, i).unwrap() * khovanov_sign(s | 1 << i, j).unwrap();
            let b = khovanov_sign(s, j).unwrap() * khovanov_sign(s | 1 << j, i).unwrap();
            assert_eq!(a * b, -1);
        }
    }

    #[test]
    fn flipped_arrows_swap_endpoints() {
        let d = parse_pd(TREFOIL).unwrap();
        for s in 0..8 {
            let a = resolve(&d, s, ArrowConvention::Normal);
            let b = resolve(&d, s, ArrowConvention::Flipped);
            assert_eq!(a.circles, b.circles);
            for (x, y) in a.arrows.iter().zip(&b.arrows) {
                assert_eq!((x.source, x.target), (y.target, y.source));
            }
        }
    }
}
