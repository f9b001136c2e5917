//! Homogeneous polynomial vector fields on C³.
//!
//! Coefficients are kept as exact Gaussian rationals whenever the input is
//! rational, so that identities such as "the divergence vanishes" are checked
//! as polynomial identities and not up to a tolerance. A coefficient read from
//! a floating-point source stays approximate, and any arithmetic that touches
//! it is approximate as well.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex3::{Complex3, Mat3, C64};

#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    #[error("field degree must be at least 1")]
    ZeroDegree,
    #[error("exponent {exp:?} in component {component} does not sum to degree {degree}")]
    NotHomogeneous {
        component: usize,
        exp: [u32; 3],
        degree: u32,
    },
    #[error("non-finite coefficient in component {0}")]
    NonFinite(usize),
    #[error("invalid coefficient literal {0:?}")]
    BadLiteral(String),
    #[error("malformed field JSON: {0}")]
    Json(String),
}

/// A polynomial coefficient: an exact Gaussian rational or a double-precision complex.
#[derive(Clone, Debug, PartialEq)]
pub enum Coeff {
    Exact { re: BigRational, im: BigRational },
    Approx(C64),
}

impl Coeff {
    pub fn int(n: i64) -> Self {
        Coeff::Exact {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Coeff::Exact {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn gaussian(re: BigRational, im: BigRational) -> Self {
        Coeff::Exact { re, im }
    }

    pub fn zero() -> Self {
        Coeff::int(0)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Exact { re, im } => re.is_zero() && im.is_zero(),
            Coeff::Approx(c) => c.re == 0.0 && c.im == 0.0,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coeff::Exact { .. })
    }

    pub fn to_c64(&self) -> C64 {
        match self {
            Coeff::Exact { re, im } => C64::new(ratio_to_f64(re), ratio_to_f64(im)),
            Coeff::Approx(c) => *c,
        }
    }

    pub fn add(&self, o: &Coeff) -> Coeff {
        match (self, o) {
            (Coeff::Exact { re: a, im: b }, Coeff::Exact { re: c, im: d }) => Coeff::Exact {
                re: a + c,
                im: b + d,
            },
            _ => Coeff::Approx(self.to_c64() + o.to_c64()),
        }
    }

    pub fn neg(&self) -> Coeff {
        match self {
            Coeff::Exact { re, im } => Coeff::Exact {
                re: -re,
                im: -im,
            },
            Coeff::Approx(c) => Coeff::Approx(-c),
        }
    }

    pub fn sub(&self, o: &Coeff) -> Coeff {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Coeff) -> Coeff {
        match (self, o) {
            (Coeff::Exact { re: a, im: b }, Coeff::Exact { re: c, im: d }) => Coeff::Exact {
                re: a * c - b * d,
                im: a * d + b * c,
            },
            _ => Coeff::Approx(self.to_c64() * o.to_c64()),
        }
    }

    fn scale_int(&self, k: u32) -> Coeff {
        self.mul(&Coeff::int(i64::from(k)))
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Exact { re, im } if im.is_zero() => write!(f, "{re}"),
            Coeff::Exact { re, im } => write!(f, "({re} + {im}i)"),
            Coeff::Approx(c) => write!(f, "({} + {}i)", c.re, c.im),
        }
    }
}

/// One monomial `coef · x^i y^j z^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub exp: [u32; 3],
    pub coef: Coeff,
}

/// A homogeneous polynomial in (x, y, z) stored sparsely.
///
/// Terms are kept sorted by exponent with like terms merged and exact zeros
/// removed, so two polynomials are equal iff their term lists are equal.
#[derive(Clone, Debug)]
pub struct Polynomial {
    degree: u32,
    terms: Vec<Term>,
    compiled: Vec<([usize; 3], C64)>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.terms == other.terms
    }
}

impl Polynomial {
    /// Canonicalises `terms`. Exponents must sum to `degree`.
    fn from_terms(degree: u32, terms: impl IntoIterator<Item = Term>) -> Self {
        let mut merged: BTreeMap<[u32; 3], Coeff> = BTreeMap::new();
        for t in terms {
            debug_assert_eq!(t.exp.iter().sum::<u32>(), degree);
            merged
                .entry(t.exp)
                .and_modify(|c| *c = c.add(&t.coef))
                .or_insert(t.coef);
        }
        let terms: Vec<Term> = merged
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(exp, coef)| Term { exp, coef })
            .collect();
        let compiled = terms
            .iter()
            .map(|t| {
                (
                    [t.exp[0] as usize, t.exp[1] as usize, t.exp[2] as usize],
                    t.coef.to_c64(),
                )
            })
            .collect();
        Polynomial {
            degree,
            terms,
            compiled,
        }
    }

    pub fn zero(degree: u32) -> Self {
        Polynomial::from_terms(degree, [])
    }

    /// The single monomial `coef · x^i y^j z^k`.
    pub fn monomial(exp: [u32; 3], coef: Coeff) -> Self {
        Polynomial::from_terms(exp.iter().sum(), [Term { exp, coef }])
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.terms.iter().all(|t| t.coef.is_exact())
    }

    /// Coefficient of the monomial with exponent `exp` (zero if absent).
    pub fn coefficient(&self, exp: [u32; 3]) -> Coeff {
        self.terms
            .iter()
            .find(|t| t.exp == exp)
            .map(|t| t.coef.clone())
            .unwrap_or_else(Coeff::zero)
    }

    pub fn eval(&self, p: &Complex3) -> C64 {
        let powers = Powers::new(p, self.degree as usize);
        self.eval_with(&powers)
    }

    fn eval_with(&self, pw: &Powers) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (e, c) in &self.compiled {
            acc += c * pw.get(0, e[0]) * pw.get(1, e[1]) * pw.get(2, e[2]);
        }
        acc
    }

    /// Partial derivative with respect to coordinate `var` (0 = x, 1 = y, 2 = z).
    pub fn partial(&self, var: usize) -> Polynomial {
        let degree = self.degree.saturating_sub(1);
        let terms = self.terms.iter().filter(|t| t.exp[var] > 0).map(|t| {
            let mut exp = t.exp;
            exp[var] -= 1;
            Term {
                exp,
                coef: t.coef.scale_int(t.exp[var]),
            }
        });
        Polynomial::from_terms(degree, terms)
    }

    pub fn add(&self, o: &Polynomial) -> Polynomial {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        assert_eq!(self.degree, o.degree, "adding polynomials of different degrees");
        Polynomial::from_terms(self.degree, self.terms.iter().chain(&o.terms).cloned())
    }

    pub fn scale(&self, c: &Coeff) -> Polynomial {
        Polynomial::from_terms(
            self.degree,
            self.terms.iter().map(|t| Term {
                exp: t.exp,
                coef: t.coef.mul(c),
            }),
        )
    }

    /// Multiplies by the coordinate `var`, raising the degree by one.
    pub fn times_var(&self, var: usize) -> Polynomial {
        Polynomial::from_terms(
            self.degree + 1,
            self.terms.iter().map(|t| {
                let mut exp = t.exp;
                exp[var] += 1;
                Term {
                    exp,
                    coef: t.coef.clone(),
                }
            }),
        )
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, t) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", t.coef)?;
            for (v, e) in ["x", "y", "z"].iter().zip(t.exp) {
                match e {
                    0 => {}
                    1 => write!(f, "·{v}")?,
                    _ => write!(f, "·{v}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

/// Power tables `p_k^e` for `e ≤ max`.
struct Powers {
    table: [[C64; 10]; 3],
    heap: Option<Vec<[C64; 3]>>,
}

impl Powers {
    fn new(p: &Complex3, max: usize) -> Self {
        let one = C64::new(1.0, 0.0);
        if max < 10 {
            let mut table = [[one; 10]; 3];
            for k in 0..3 {
                for e in 1..=max {
                    table[k][e] = table[k][e - 1] * p.0[k];
                }
            }
            Powers { table, heap: None }
        } else {
            let mut v = vec![[one; 3]; max + 1];
            for e in 1..=max {
                for k in 0..3 {
                    v[e][k] = v[e - 1][k] * p.0[k];
                }
            }
            Powers {
                table: [[one; 10]; 3],
                heap: Some(v),
            }
        }
    }

    #[inline]
    fn get(&self, k: usize, e: usize) -> C64 {
        match &self.heap {
            None => self.table[k][e],
            Some(v) => v[e][k],
        }
    }
}

/// A degree-d homogeneous polynomial vector field `V = Σ V_k ∂/∂k` on C³.
#[derive(Clone, Debug)]
pub struct HomogeneousField {
    degree: u32,
    components: [Polynomial; 3],
    jacobian: [[Polynomial; 3]; 3],
}

impl PartialEq for HomogeneousField {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.components == other.components
    }
}

impl HomogeneousField {
    /// Builds a field from raw term lists, one per component.
    pub fn new(degree: u32, components: [Vec<Term>; 3]) -> Result<Self, FieldError> {
        if degree == 0 {
            return Err(FieldError::ZeroDegree);
        }
        for (k, terms) in components.iter().enumerate() {
            for t in terms {
                if t.exp.iter().sum::<u32>() != degree {
                    return Err(FieldError::NotHomogeneous {
                        component: k,
                        exp: t.exp,
                        degree,
                    });
                }
                if let Coeff::Approx(c) = &t.coef {
                    if !(c.re.is_finite() && c.im.is_finite()) {
                        return Err(FieldError::NonFinite(k));
                    }
                }
            }
        }
        let [a, b, c] = components;
        Ok(Self::from_polys(
            degree,
            [
                Polynomial::from_terms(degree, a),
                Polynomial::from_terms(degree, b),
                Polynomial::from_terms(degree, c),
            ],
        ))
    }

    fn from_polys(degree: u32, components: [Polynomial; 3]) -> Self {
        let jacobian = std::array::from_fn(|k| std::array::from_fn(|l| components[k].partial(l)));
        HomogeneousField {
            degree,
            components,
            jacobian,
        }
    }

    /// The radial field `R = x∂x + y∂y + z∂z`.
    pub fn radial() -> Self {
        let comp = |k: usize| {
            let mut exp = [0; 3];
            exp[k] = 1;
            Polynomial::monomial(exp, Coeff::int(1))
        };
        Self::from_polys(1, [comp(0), comp(1), comp(2)])
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn components(&self) -> &[Polynomial; 3] {
        &self.components
    }

    pub fn is_exact(&self) -> bool {
        self.components.iter().all(Polynomial::is_exact)
    }

    pub fn eval(&self, p: &Complex3) -> Complex3 {
        let pw = Powers::new(p, self.degree as usize);
        Complex3([
            self.components[0].eval_with(&pw),
            self.components[1].eval_with(&pw),
            self.components[2].eval_with(&pw),
        ])
    }

    /// Jacobian matrix `∂V_k/∂l` at `p`, row-major.
    pub fn jacobian(&self, p: &Complex3) -> Mat3 {
        let pw = Powers::new(p, self.degree as usize);
        let mut m = [[C64::new(0.0, 0.0); 3]; 3];
        for k in 0..3 {
            for l in 0..3 {
                m[k][l] = self.jacobian[k][l].eval_with(&pw);
            }
        }
        m
    }

    /// Value and Jacobian at `p` sharing one power table.
    pub fn eval_with_jacobian(&self, p: &Complex3) -> (Complex3, Mat3) {
        let pw = Powers::new(p, self.degree as usize);
        let v = Complex3(std::array::from_fn(|k| self.components[k].eval_with(&pw)));
        let mut m = [[C64::new(0.0, 0.0); 3]; 3];
        for k in 0..3 {
            for l in 0..3 {
                m[k][l] = self.jacobian[k][l].eval_with(&pw);
            }
        }
        (v, m)
    }

    /// `DV(V)` at `p`: the Jacobian of the field at `p` applied to `V(p)`.
    pub fn jacobian_apply(&self, p: &Complex3) -> Complex3 {
        let (v, m) = self.eval_with_jacobian(p);
        crate::complex3::mat_vec(&m, &v)
    }

    /// Symbolic divergence `Σ ∂V_k/∂k`, a homogeneous polynomial of degree d−1.
    pub fn divergence(&self) -> Polynomial {
        (0..3).fold(Polynomial::zero(self.degree - 1), |acc, k| {
            acc.add(&self.jacobian[k][k])
        })
    }

    /// Returns `V − div(V)/(d+2) · R`, the unique divergence-free representative
    /// of the same foliation.
    pub fn make_divergence_free(&self) -> HomogeneousField {
        let div = self.divergence();
        if div.is_zero() {
            return self.clone();
        }
        let d = i64::from(self.degree);
        let factor = Coeff::ratio(-1, d + 2);
        let correction = div.scale(&factor);
        let components =
            std::array::from_fn(|k| self.components[k].add(&correction.times_var(k)));
        Self::from_polys(self.degree, components)
    }

    /// Replaces every coefficient by its floating-point value plus `delta(k, exp)`.
    pub fn perturbed(&self, mut delta: impl FnMut(usize, [u32; 3]) -> C64) -> HomogeneousField {
        let d = self.degree;
        let comps = std::array::from_fn(|k| {
            let mut terms: Vec<Term> = Vec::new();
            for exp in exponents(d) {
                let c = self.components[k].coefficient(exp).to_c64() + delta(k, exp);
                if c != C64::new(0.0, 0.0) {
                    terms.push(Term {
                        exp,
                        coef: Coeff::Approx(c),
                    });
                }
            }
            Polynomial::from_terms(d, terms)
        });
        Self::from_polys(d, comps)
    }

    pub fn to_json(&self) -> FieldJson {
        FieldJson {
            degree: self.degree,
            components: self
                .components
                .iter()
                .map(|p| {
                    p.terms
                        .iter()
                        .map(|t| {
                            let (re, im) = match &t.coef {
                                Coeff::Exact { re, im } => (rational_json(re), rational_json(im)),
                                Coeff::Approx(c) => (
                                    serde_json::Value::from(c.re),
                                    serde_json::Value::from(c.im),
                                ),
                            };
                            TermJson { exp: t.exp, re, im }
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_json(json: &FieldJson) -> Result<Self, FieldError> {
        if json.components.len() != 3 {
            return Err(FieldError::Json(format!(
                "expected 3 components, found {}",
                json.components.len()
            )));
        }
        let mut comps: [Vec<Term>; 3] = Default::default();
        for (k, terms) in json.components.iter().enumerate() {
            for t in terms {
                let coef = match (parse_exact(&t.re)?, parse_exact(&t.im)?) {
                    (Some(re), Some(im)) => Coeff::Exact { re, im },
                    _ => Coeff::Approx(C64::new(json_f64(&t.re)?, json_f64(&t.im)?)),
                };
                comps[k].push(Term { exp: t.exp, coef });
            }
        }
        HomogeneousField::new(json.degree, comps)
    }
}

impl fmt::Display for HomogeneousField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}) ∂x + ({}) ∂y + ({}) ∂z",
            self.components[0], self.components[1], self.components[2]
        )
    }
}

/// All exponent triples of total degree `d`, in lexicographic order.
pub fn exponents(d: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for i in 0..=d {
        for j in 0..=d - i {
            out.push([i, j, d - i - j]);
        }
    }
    out
}

/// The Jouanolou field `y^d ∂/∂x + z^d ∂/∂y + x^d ∂/∂z`.
pub fn jouanolou_field(d: u32) -> Result<HomogeneousField, FieldError> {
    if d == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let mono = |var: usize| {
        let mut exp = [0; 3];
        exp[var] = d;
        vec![Term {
            exp,
            coef: Coeff::int(1),
        }]
    };
    HomogeneousField::new(d, [mono(1), mono(2), mono(0)])
}

/// Degree, Euler characteristic and genus of a compact transverse section
/// with nonzero Euler characteristic for a degree-d foliation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionInvariants {
    pub d_z: i64,
    pub chi: i64,
    pub genus: u64,
}

pub fn section_invariants(d: u32) -> SectionInvariants {
    let d = i64::from(d);
    let d_z = 1 - d;
    let chi = (d + 2) * d_z;
    SectionInvariants {
        d_z,
        chi,
        genus: (d * (d + 1) / 2) as u64,
    }
}

/// JSON form: `{"degree": d, "components": [[{"exp":[i,j,k],"re":..,"im":..},..],..]}`.
///
/// Exact coefficients are written as JSON integers, or as `"p/q"` strings when
/// not integral; floating-point numbers are read back as approximate.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FieldJson {
    pub degree: u32,
    pub components: Vec<Vec<TermJson>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub exp: [u32; 3],
    pub re: serde_json::Value,
    pub im: serde_json::Value,
}

fn rational_json(r: &BigRational) -> serde_json::Value {
    if r.is_integer() {
        if let Some(i) = r.to_integer().to_i64() {
            return serde_json::Value::from(i);
        }
    }
    serde_json::Value::from(format!("{}/{}", r.numer(), r.denom()))
}

fn parse_exact(v: &serde_json::Value) -> Result<Option<BigRational>, FieldError> {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Some(BigRational::from_integer(BigInt::from(i))))
            } else {
                Ok(None)
            }
        }
        serde_json::Value::String(s) => {
            let parse = |t: &str| t.trim().parse::<BigInt>().ok();
            let r = match s.split_once('/') {
                Some((n, d)) => match (parse(n), parse(d)) {
                    (Some(n), Some(d)) if !d.is_zero() => BigRational::new(n, d),
                    _ => return Err(FieldError::BadLiteral(s.clone())),
                },
                None => match parse(s) {
                    Some(n) => BigRational::from_integer(n),
                    None => return Err(FieldError::BadLiteral(s.clone())),
                },
            };
            Ok(Some(r))
        }
        other => Err(FieldError::BadLiteral(other.to_string())),
    }
}

fn json_f64(v: &serde_json::Value) -> Result<f64, FieldError> {
    match v {
        serde_json::Value::Number(n) => n
            .as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| FieldError::BadLiteral(n.to_string())),
        serde_json::Value::String(_) => Ok(ratio_to_f64(&parse_exact(v)?.unwrap_or_default())),
        other => Err(FieldError::BadLiteral(other.to_string())),
    }
}

impl Default for Coeff {
    fn default() -> Self {
        Coeff::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn jouanolou_components() {
        let f = jouanolou_field(2).unwrap();
        assert_eq!(f.components()[0], Polynomial::monomial([0, 2, 0], Coeff::int(1)));
        assert_eq!(f.components()[1], Polynomial::monomial([0, 0, 2], Coeff::int(1)));
        assert_eq!(f.components()[2], Polynomial::monomial([2, 0, 0], Coeff::int(1)));
        assert_eq!(f.eval(&Complex3::real(1.0, 1.0, 1.0)), Complex3::real(1.0, 1.0, 1.0));
        assert_eq!(f.eval(&Complex3::real(0.0, 1.0, 2.0)), Complex3::real(1.0, 4.0, 0.0));
        assert_eq!(jouanolou_field(0).unwrap_err(), FieldError::ZeroDegree);
    }

    #[test]
    fn divergence_examples() {
        for d in 1..=6 {
            assert!(jouanolou_field(d).unwrap().divergence().is_zero());
        }
        let cube = HomogeneousField::new(
            3,
            [
                vec![Term { exp: [3, 0, 0], coef: Coeff::int(1) }],
                vec![],
                vec![],
            ],
        )
        .unwrap();
        assert_eq!(cube.divergence(), Polynomial::monomial([2, 0, 0], Coeff::int(3)));

        // (x², xy, xz) → 2x + x + x
        let f = HomogeneousField::new(
            2,
            [
                vec![Term { exp: [2, 0, 0], coef: Coeff::int(1) }],
                vec![Term { exp: [1, 1, 0], coef: Coeff::int(1) }],
                vec![Term { exp: [1, 0, 1], coef: Coeff::int(1) }],
            ],
        )
        .unwrap();
        assert_eq!(f.divergence(), Polynomial::monomial([1, 0, 0], Coeff::int(4)));
    }

    #[test]
    fn divergence_free_normalisation() {
        let j = jouanolou_field(2).unwrap();
        assert_eq!(j.make_divergence_free(), j);

        let cube = HomogeneousField::new(
            3,
            [
                vec![Term { exp: [3, 0, 0], coef: Coeff::int(1) }],
                vec![],
                vec![],
            ],
        )
        .unwrap();
        let g = cube.make_divergence_free();
        assert_eq!(g.components()[0], Polynomial::monomial([3, 0, 0], Coeff::ratio(2, 5)));
        assert_eq!(g.components()[1], Polynomial::monomial([2, 1, 0], Coeff::ratio(-3, 5)));
        assert_eq!(g.components()[2], Polynomial::monomial([2, 0, 1], Coeff::ratio(-3, 5)));
        assert!(g.divergence().is_zero());
        assert!(g.is_exact());
    }

    #[test]
    fn jacobian_apply_examples() {
        let j = jouanolou_field(2).unwrap();
        assert_eq!(j.jacobian_apply(&Complex3::real(1.0, 0.0, 0.0)), Complex3::ZERO);
        assert_eq!(
            j.jacobian_apply(&Complex3::real(1.0, 1.0, 1.0)),
            Complex3::real(2.0, 2.0, 2.0)
        );
        let r = HomogeneousField::radial();
        let p = Complex3::new(c(0.3, -1.0), c(2.0, 0.5), c(-0.7, 0.1));
        assert_eq!(r.jacobian_apply(&p), p);
    }

    #[test]
    fn section_invariant_values() {
        assert_eq!(section_invariants(2), SectionInvariants { d_z: -1, chi: -4, genus: 3 });
        assert_eq!(section_invariants(1), SectionInvariants { d_z: 0, chi: 0, genus: 1 });
        assert_eq!(section_invariants(5), SectionInvariants { d_z: -4, chi: -28, genus: 15 });
        for d in 1..20 {
            let s = section_invariants(d);
            let d = i64::from(d);
            assert_eq!(s.chi, (d + 2) * s.d_z);
            // d_Z² = (1 − d) d_Z
            assert_eq!(s.d_z * s.d_z, (1 - d) * s.d_z);
        }
    }

    #[test]
    fn non_homogeneous_rejected() {
        let err = HomogeneousField::new(
            2,
            [vec![Term { exp: [1, 0, 0], coef: Coeff::int(1) }], vec![], vec![]],
        )
        .unwrap_err();
        assert!(matches!(err, FieldError::NotHomogeneous { component: 0, .. }));
    }

    #[test]
    fn json_roundtrip_keeps_exactness() {
        let cube = HomogeneousField::new(
            3,
            [
                vec![Term { exp: [3, 0, 0], coef: Coeff::int(1) }],
                vec![Term { exp: [0, 2, 1], coef: Coeff::Approx(c(0.25, -1.5)) }],
                vec![],
            ],
        )
        .unwrap()
        .make_divergence_free();
        let text = serde_json::to_string(&cube.to_json()).unwrap();
        let back = HomogeneousField::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, cube);
        assert!(text.contains("\"2/5\""));
        let p = Complex3::real(1.0, 2.0, 3.0);
        assert_eq!(back.eval(&p), cube.eval(&p));
    }

    fn arb_c64() -> impl Strategy<Value = C64> {
        (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| c(a, b))
    }

    fn arb_point() -> impl Strategy<Value = Complex3> {
        (arb_c64(), arb_c64(), arb_c64()).prop_map(|(x, y, z)| Complex3::new(x, y, z))
    }

    /// Fields of degree 1..=4 with small integer coefficients.
    fn arb_field() -> impl Strategy<Value = HomogeneousField> {
        (1u32..=4).prop_flat_map(|d| {
            let n = exponents(d).len();
            proptest::collection::vec((-3i64..=3, -3i64..=3), 3 * n).prop_map(move |cs| {
                let exps = exponents(d);
                let comps = std::array::from_fn(|k| {
                    exps.iter()
                        .enumerate()
                        .map(|(i, &exp)| {
                            let (re, im) = cs[k * n + i];
                            Term {
                                exp,
                                coef: Coeff::gaussian(BigRational::from_integer(re.into()), BigRational::from_integer(im.into())),
                            }
                        })
                        .collect()
                });
                HomogeneousField::new(d, comps).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn homogeneity(f in arb_field(), p in arb_point(), l in arb_c64()) {
            let lhs = f.eval(&p.scale(l));
            let rhs = f.eval(&p).scale(l.powu(f.degree()));
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        }

        #[test]
        fn jacobian_apply_is_a_directional_derivative(f in arb_field(), p in arb_point()) {
            let v = f.eval(&p);
            let h = 1e-5;
            let fd = (f.eval(&(p + v.scale_real(h))) - f.eval(&(p - v.scale_real(h)))).scale_real(0.5 / h);
            let got = f.jacobian_apply(&p);
            prop_assert!((got - fd).norm() <= 1e-6 * (1.0 + got.norm()));
        }

        #[test]
        fn divergence_free_is_idempotent(f in arb_field(), p in arb_point()) {
            let g = f.make_divergence_free();
            prop_assert!(g.divergence().is_zero());
            prop_assert_eq!(g.make_divergence_free(), g.clone());
            // Same foliation: the difference is radial.
            let diff = f.eval(&p) - g.eval(&p);
            let along = crate::complex3::hermitian_dot(&diff, &p) / p.norm_sqr();
            prop_assert!((diff - p.scale(along)).norm() <= 1e-10 * (1.0 + diff.norm()));
        }
    }
}
