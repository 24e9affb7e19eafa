//! Gap polynomials: `P[u <-> v] - P[u <-> v']` as a polynomial in a shared
//! edge probability `p`, or in one variable `x_e` per base edge (shared by
//! the two copies `e` and `e'`).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::dsu::Dsu;
use crate::error::{Error, Result};
use crate::exact::{EnumOptions, SubsetEnumerator};
use crate::graph::{build_bunkbed_graph, BunkbedInstance};
use crate::rational::{fmt_rational, rat, Rational};

/// Largest base graph for the per-edge expansion (`3^m` coefficients).
pub const MAX_PER_EDGE_EDGES: usize = 10;

/// `sum coefficients[i] * p^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnivariateGapPolynomial {
    pub coefficients: Vec<Rational>,
}

impl UnivariateGapPolynomial {
    fn trimmed(mut coefficients: Vec<Rational>) -> Self {
        while coefficients.last().is_some_and(Zero::is_zero) {
            coefficients.pop();
        }
        UnivariateGapPolynomial { coefficients }
    }

    pub fn eval(&self, p: &Rational) -> Rational {
        self.coefficients
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * p + c)
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }
}

impl Serialize for UnivariateGapPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let text: Vec<String> = self.coefficients.iter().map(fmt_rational).collect();
        text.serialize(s)
    }
}

fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 0..n {
        let next = &row[k] * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(next);
    }
    row
}

/// Expands `sum_k d_k p^k (1 - p)^(M - k)` into monomials, where `d_k` is
/// the number of level-edge subsets of size `k` joining `u` to `v` minus
/// those joining `u` to `v'`.
pub fn gap_polynomial_univariate(b: &BunkbedInstance) -> Result<UnivariateGapPolynomial> {
    gap_polynomial_univariate_with(b, EnumOptions::default())
}

pub fn gap_polynomial_univariate_with(b: &BunkbedInstance, options: EnumOptions) -> Result<UnivariateGapPolynomial> {
    // the placeholder weight only marks level edges as one random class
    let placeholder = b.base.with_uniform_probability(&rat(1, 2));
    let b = BunkbedInstance { base: placeholder, ..b.clone() };
    let g = build_bunkbed_graph(&b);
    let n = b.base.vertex_count();
    let en = SubsetEnumerator::new(&g, options)?;
    let (u0, v0, v1) = (en.vertex(b.pole_u), en.vertex(b.pole_v), en.vertex(b.pole_v + n));
    let counts = en.run_counts_by_size(2, |dsu, hits| {
        let root = dsu.find(u0);
        if dsu.find(v0) == root {
            hits.hit(0);
        }
        if dsu.find(v1) == root {
            hits.hit(1);
        }
    })?;
    let m = en.random_edge_count();
    let mut coefficients = vec![BigInt::zero(); m + 1];
    for k in 0..=m {
        let d = BigInt::from(counts[0][k]) - BigInt::from(counts[1][k]);
        if d.is_zero() {
            continue;
        }
        // p^k (1 - p)^(m - k) = sum_j C(m - k, j) (-1)^j p^(k + j)
        for (j, c) in binomial_row(m - k).into_iter().enumerate() {
            let term = &d * c;
            if j % 2 == 0 {
                coefficients[k + j] += term;
            } else {
                coefficients[k + j] -= term;
            }
        }
    }
    Ok(UnivariateGapPolynomial::trimmed(coefficients.into_iter().map(Rational::from_integer).collect()))
}

/// Coefficients indexed by exponent vectors in `{0, 1, 2}^m`, stored
/// densely with edge `e` as base-3 digit `e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerEdgeGapPolynomial {
    edges: usize,
    coefficients: Vec<Rational>,
}

impl PerEdgeGapPolynomial {
    pub fn edge_count(&self) -> usize {
        self.edges
    }

    fn exponents(&self, index: usize) -> Vec<u8> {
        let mut rest = index;
        (0..self.edges)
            .map(|_| {
                let d = (rest % 3) as u8;
                rest /= 3;
                d
            })
            .collect()
    }

    /// Nonzero coefficients keyed by exponent vector.
    pub fn terms(&self) -> BTreeMap<Vec<u8>, Rational> {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.exponents(i), c.clone()))
            .collect()
    }

    pub fn negative_terms(&self) -> BTreeMap<Vec<u8>, Rational> {
        self.terms().into_iter().filter(|(_, c)| c.is_negative()).collect()
    }

    pub fn eval(&self, x: &[Rational]) -> Result<Rational> {
        if x.len() != self.edges {
            return Err(Error::invalid(format!("need {} values, got {}", self.edges, x.len())));
        }
        let mut total = Rational::zero();
        for (i, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut term = c.clone();
            for (e, d) in self.exponents(i).into_iter().enumerate() {
                term *= x[e].pow(d as i32);
            }
            total += term;
        }
        Ok(total)
    }

    /// Substitutes `x_e = p` for every edge.
    pub fn to_univariate(&self) -> UnivariateGapPolynomial {
        let mut coefficients = vec![Rational::zero(); 2 * self.edges + 1];
        for (i, c) in self.coefficients.iter().enumerate() {
            let degree: usize = self.exponents(i).iter().map(|&d| d as usize).sum();
            coefficients[degree] += c;
        }
        UnivariateGapPolynomial::trimmed(coefficients)
    }
}

impl Serialize for PerEdgeGapPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = self.terms();
        let mut map = s.serialize_map(Some(terms.len()))?;
        for (exps, c) in &terms {
            let key: String = exps.iter().map(|d| char::from(b'0' + d)).collect();
            map.serialize_entry(&key, &fmt_rational(c))?;
        }
        map.end()
    }
}

/// Full expansion in per-edge variables. Each base edge is in one of three
/// states (neither copy open, one copy open, both open) with weights
/// `(1 - x)^2`, `x (1 - x)` and `x^2`.
pub fn gap_polynomial_per_edge(b: &BunkbedInstance) -> Result<PerEdgeGapPolynomial> {
    let m = b.base.edge_count();
    if m > MAX_PER_EDGE_EDGES {
        return Err(Error::CapExceeded { needed: 2 * m, cap: 2 * MAX_PER_EDGE_EDGES });
    }
    let n = b.base.vertex_count();
    let size = 3usize.pow(m as u32);
    let mut diff = vec![0i64; size];
    let mut dsu = Dsu::new(2 * n);
    let pow3: Vec<usize> = (0..m).map(|e| 3usize.pow(e as u32)).collect();
    for mask in 0u64..1 << (2 * m) {
        dsu.reset();
        for &w in &b.transversal {
            dsu.union(w, w + n);
        }
        let mut index = 0;
        for (e, edge) in b.base.edges().iter().enumerate() {
            let low = mask >> e & 1;
            let high = mask >> (m + e) & 1;
            if low == 1 {
                dsu.union(edge.u, edge.v);
            }
            if high == 1 {
                dsu.union(edge.u + n, edge.v + n);
            }
            index += (low + high) as usize * pow3[e];
        }
        let root = dsu.find(b.pole_u);
        diff[index] += (dsu.find(b.pole_v) == root) as i64 - (dsu.find(b.pole_v + n) == root) as i64;
    }
    // state s -> coefficients of x^0, x^1, x^2
    const BASIS: [[i64; 3]; 3] = [[1, -2, 1], [0, 1, -1], [0, 0, 1]];
    let mut coeffs: Vec<i64> = diff;
    for &stride in &pow3 {
        let mut next = vec![0i64; size];
        for (i, &c) in coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let state = (i / stride) % 3;
            let base = i - state * stride;
            for (j, &w) in BASIS[state].iter().enumerate() {
                next[base + j * stride] += c * w;
            }
        }
        coeffs = next;
    }
    Ok(PerEdgeGapPolynomial {
        edges: m,
        coefficients: coeffs.into_iter().map(|c| Rational::from_integer(BigInt::from(c))).collect(),
    })
}
