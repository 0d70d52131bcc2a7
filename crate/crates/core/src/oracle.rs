//! Jones polynomial by direct state summation, and graded Euler
//! characteristics. Nothing here touches the chain-complex code.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rayon::prelude::*;

use crate::complex::BigradedComplex;
use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::homology::HomologyTable;

/// Largest crossing number accepted by the bracket.
pub const MAX_BRACKET_CROSSINGS: usize = 14;

/// Integer Laurent polynomial in `q`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<i32, i64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(coef: i64, exp: i32) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, coef);
        p
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// `q + q⁻¹`.
    pub fn quantum_two() -> Self {
        Self::from_terms([(-1, 1), (1, 1)])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i32, i64)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exp: i32, coef: i64) {
        let c = self.terms.entry(exp).or_insert(0);
        *c += coef;
        if *c == 0 {
            self.terms.remove(&exp);
        }
    }

    pub fn coefficient(&self, exp: i32) -> i64 {
        self.terms.get(&exp).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, i64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Multiplies by `q^s`.
    pub fn shift(&self, s: i32) -> Self {
        Self { terms: self.terms.iter().map(|(&e, &c)| (e + s, c)).collect() }
    }

    /// Substitutes `q ↦ q⁻¹`.
    pub fn invert(&self) -> Self {
        Self { terms: self.terms.iter().map(|(&e, &c)| (-e, c)).collect() }
    }

    /// Exact division, if `other` divides `self`.
    pub fn div_exact(&self, other: &LaurentPoly) -> Option<LaurentPoly> {
        let (&low, _) = other.terms.iter().next()?;
        let (&high, &lead) = other.terms.iter().next_back()?;
        let floor = self.terms.keys().next().copied().unwrap_or(0);
        let mut rem = self.clone();
        let mut quot = LaurentPoly::zero();
        while let Some((&e, &c)) = rem.terms.iter().next_back() {
            if e - high + low < floor || c % lead != 0 {
                return None;
            }
            let t = LaurentPoly::monomial(c / lead, e - high);
            rem = &rem - &(&t * other);
            quot = &quot + &t;
        }
        Some(quot)
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, c);
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(&e, &c)| (e, -c)).collect() }
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (a, x) in self.terms() {
            for (b, y) in rhs.terms() {
                out.add_term(a + b, x * y);
            }
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    /// `q^-1 + q`, exponents ascending.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms().enumerate() {
            let mag = c.unsigned_abs();
            match (i, c < 0) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            match (e, mag) {
                (0, m) => write!(f, "{m}")?,
                (1, 1) => f.write_str("q")?,
                (1, m) => write!(f, "{m}q")?,
                (e, 1) => write!(f, "q^{e}")?,
                (e, m) => write!(f, "{m}q^{e}")?,
            }
        }
        Ok(())
    }
}

/// Number of loops after smoothing every crossing by `state`, by a
/// union-find of its own over the crossing slots.
fn loop_count(d: &Diagram, state: u32) -> u32 {
    let crossings = d.crossings();
    if crossings.is_empty() {
        return 1;
    }
    let n = crossings.len();
    let mut parent: Vec<usize> = (0..4 * n).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let join = |a: usize, b: usize, p: &mut Vec<usize>| {
        let (ra, rb) = (root(p, a), root(p, b));
        p[ra] = rb;
    };
    let mut first_slot: BTreeMap<u32, usize> = BTreeMap::new();
    for (c, x) in crossings.iter().enumerate() {
        for (k, &label) in x.iter().enumerate() {
            let slot = 4 * c + k;
            if let Some(&other) = first_slot.get(&label) {
                join(slot, other, &mut parent);
            } else {
                first_slot.insert(label, slot);
            }
        }
        let pairs = if state >> c & 1 == 0 { [(0, 1), (2, 3)] } else { [(0, 3), (1, 2)] };
        for (a, b) in pairs {
            join(4 * c + a, 4 * c + b, &mut parent);
        }
    }
    (0..4 * n).filter(|&s| root(&mut parent, s) == s).count() as u32
}

/// `Σ_I (-q)^{|I|} (q + q⁻¹)^{k(I)}`.
pub fn kauffman_bracket(d: &Diagram) -> Result<LaurentPoly> {
    let n = d.crossing_count();
    if n > MAX_BRACKET_CROSSINGS {
        return Err(Error::TooLarge { what: "crossings", value: n, limit: MAX_BRACKET_CROSSINGS });
    }
    // counts[w][k] = number of states of weight w with k loops
    let counts: BTreeMap<(u32, u32), i64> = (0..1u32 << n)
        .into_par_iter()
        .map(|s| (s.count_ones(), loop_count(d, s)))
        .fold(BTreeMap::new, |mut acc, key| {
            *acc.entry(key).or_insert(0) += 1;
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    let two = LaurentPoly::quantum_two();
    let mut total = LaurentPoly::zero();
    for ((w, k), count) in counts {
        let sign = if w % 2 == 0 { count } else { -count };
        total = &total + &LaurentPoly::monomial(sign, w as i32).mul(&two.pow(k));
    }
    Ok(total)
}

/// Unreduced Jones polynomial, `(-1)^{n₋} q^{n₊ - 2n₋} ⟨D⟩`; the unknot
/// gives `q⁻¹ + q`.
pub fn jones(d: &Diagram) -> Result<LaurentPoly> {
    let (np, nm) = d.crossing_signs();
    let bracket = kauffman_bracket(d)?;
    let normalized = bracket.shift(np as i32 - 2 * nm as i32);
    Ok(if nm % 2 == 0 { normalized } else { -&normalized })
}

/// `Σ (-1)^h rank · q^q` over the homology table (torsion ignored).
pub fn euler_characteristic(t: &HomologyTable) -> LaurentPoly {
    LaurentPoly::from_terms(
        t.groups.iter().map(|g| (g.q, if g.h.rem_euclid(2) == 0 { g.betti as i64 } else { -(g.betti as i64) })),
    )
}

/// `Σ (-1)^h q^q` over the generators of a complex.
pub fn complex_euler_characteristic(c: &BigradedComplex) -> LaurentPoly {
    LaurentPoly::from_terms(
        c.ranks().into_iter().map(|((h, q), r)| (q, if h.rem_euclid(2) == 0 { r as i64 } else { -(r as i64) })),
    )
}
