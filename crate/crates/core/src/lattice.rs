//! Integer lattices in Hermite normal form, built incrementally, with each
//! basis vector remembering how it combines the inserted generators.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Linear combination of generator ids.
pub type Expression = BTreeMap<usize, BigInt>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub pivot: usize,
    pub vector: Vec<BigInt>,
    pub expression: Expression,
}

/// Row-style Hermite basis: pivots strictly increase, pivot entries are
/// positive and every entry above a pivot lies in `[0, pivot)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    dim: usize,
    rows: Vec<Row>,
}

fn combine(a: &BigInt, x: &[BigInt], ea: &Expression, b: &BigInt, y: &[BigInt], eb: &Expression) -> (Vec<BigInt>, Expression) {
    let v = x.iter().zip(y).map(|(p, q)| a * p + b * q).collect();
    let mut e = Expression::new();
    for (&k, c) in ea {
        *e.entry(k).or_insert_with(BigInt::zero) += a * c;
    }
    for (&k, c) in eb {
        *e.entry(k).or_insert_with(BigInt::zero) += b * c;
    }
    e.retain(|_, c| !c.is_zero());
    (v, e)
}

impl Lattice {
    pub fn new(dim: usize) -> Self {
        Lattice { dim, rows: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    /// Adds `v` (labelled by `expression`); returns whether the lattice grew.
    pub fn insert(&mut self, v: &[BigInt], expression: Expression) -> bool {
        assert_eq!(v.len(), self.dim, "dimension mismatch");
        let mut v = v.to_vec();
        let mut e = expression;
        let mut grew = false;
        let one = BigInt::one();
        let mut i = 0;
        while i < self.rows.len() {
            let p = self.rows[i].pivot;
            if let Some(first) = v.iter().position(|x| !x.is_zero()) {
                if first < p {
                    break;
                }
            } else {
                break;
            }
            if v[p].is_zero() {
                i += 1;
                continue;
            }
            let row = &self.rows[i];
            let r = &row.vector[p];
            if v[p].is_multiple_of(r) {
                let k = -(&v[p] / r);
                let (nv, ne) = combine(&one, &v, &e, &k, &row.vector, &row.expression);
                v = nv;
                e = ne;
            } else {
                // unimodular 2x2 step: the row takes the gcd, v loses its entry
                let g = r.extended_gcd(&v[p]);
                let (rv, re) = combine(&g.x, &row.vector, &row.expression, &g.y, &v, &e);
                let (a, b) = (-(&v[p] / &g.gcd), r / &g.gcd);
                let (nv, ne) = combine(&a, &row.vector, &row.expression, &b, &v, &e);
                self.rows[i] = Row { pivot: p, vector: rv, expression: re };
                v = nv;
                e = ne;
                grew = true;
            }
            i += 1;
        }
        if let Some(pivot) = v.iter().position(|x| !x.is_zero()) {
            let at = self.rows.partition_point(|r| r.pivot < pivot);
            self.rows.insert(at, Row { pivot, vector: v, expression: e });
            grew = true;
        }
        if grew {
            self.normalize();
        }
        grew
    }

    fn normalize(&mut self) {
        for i in 0..self.rows.len() {
            let p = self.rows[i].pivot;
            if self.rows[i].vector[p].is_negative() {
                let row = &mut self.rows[i];
                for x in row.vector.iter_mut() {
                    *x = -&*x;
                }
                for c in row.expression.values_mut() {
                    *c = -&*c;
                }
            }
            let (above, rest) = self.rows.split_at_mut(i);
            let row = &rest[0];
            let piv = &row.vector[p];
            for other in above.iter_mut() {
                let k = other.vector[p].div_floor(piv);
                if k.is_zero() {
                    continue;
                }
                let k = -k;
                let (nv, ne) = combine(&BigInt::one(), &other.vector, &other.expression, &k, &row.vector, &row.expression);
                other.vector = nv;
                other.expression = ne;
            }
        }
    }

    /// Coefficients of `v` in the basis, or `None` if `v` is not in the
    /// lattice.
    pub fn express(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(v.len(), self.dim, "dimension mismatch");
        let mut v = v.to_vec();
        let mut coefs = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let p = row.pivot;
            if v[..p].iter().any(|x| !x.is_zero()) {
                return None;
            }
            let (c, rem) = v[p].div_rem(&row.vector[p]);
            if !rem.is_zero() {
                return None;
            }
            if !c.is_zero() {
                for (x, y) in v.iter_mut().zip(&row.vector) {
                    *x -= &c * y;
                }
            }
            coefs.push(c);
        }
        v.iter().all(Zero::is_zero).then_some(coefs)
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.express(v).is_some()
    }

    /// Whether every basis vector of `other` lies in `self`.
    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.rows.iter().all(|r| self.contains(&r.vector))
    }

    /// Basis vectors only, for comparing Hermite forms.
    pub fn hermite_form(&self) -> Vec<Vec<BigInt>> {
        self.rows.iter().map(|r| r.vector.clone()).collect()
    }
}

pub fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn expr(id: usize) -> Expression {
        Expression::from([(id, BigInt::one())])
    }

    fn evaluate(e: &Expression, gens: &[Vec<i64>], dim: usize) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); dim];
        for (&g, c) in e {
            for (o, &x) in out.iter_mut().zip(&gens[g]) {
                *o += c * x;
            }
        }
        out
    }

    #[test]
    fn gcd_merges_rows() {
        let mut l = Lattice::new(2);
        assert!(l.insert(&to_big(&[4, 1]), expr(0)));
        assert!(l.insert(&to_big(&[6, 0]), expr(1)));
        assert_eq!(l.rank(), 2);
        let h = l.hermite_form();
        assert_eq!(h[0][0], BigInt::from(2));
        assert!(!l.insert(&to_big(&[2, 3]), expr(2)) || l.contains(&to_big(&[2, 3])));
        assert!(l.contains(&to_big(&[0, 3])));
    }

    #[test]
    fn redundant_insert_is_noop() {
        let mut l = Lattice::new(3);
        l.insert(&to_big(&[1, 2, 3]), expr(0));
        l.insert(&to_big(&[0, 1, 1]), expr(1));
        let before = l.clone();
        assert!(!l.insert(&to_big(&[2, 5, 7]), expr(2)));
        assert_eq!(l, before);
        assert!(!l.contains(&to_big(&[0, 0, 1])));
    }

    proptest! {
        #[test]
        fn hermite_form_is_canonical_and_tracked(gens in proptest::collection::vec(proptest::collection::vec(-6i64..7, 4), 1..6)) {
            let mut a = Lattice::new(4);
            for (i, g) in gens.iter().enumerate() {
                a.insert(&to_big(g), expr(i));
            }
            let mut b = Lattice::new(4);
            for (i, g) in gens.iter().enumerate().rev() {
                b.insert(&to_big(g), expr(i));
            }
            prop_assert_eq!(a.hermite_form(), b.hermite_form());
            for row in a.rows() {
                prop_assert_eq!(&evaluate(&row.expression, &gens, 4), &row.vector);
                prop_assert!(row.vector[row.pivot].is_positive());
            }
            for g in &gens {
                prop_assert!(a.contains(&to_big(g)));
            }
            for (i, r) in a.rows().iter().enumerate() {
                for other in &a.rows()[..i] {
                    let x = &other.vector[r.pivot];
                    prop_assert!(!x.is_negative() && x < &r.vector[r.pivot]);
                }
            }
        }
    }
}
