//! Graded commutative algebras `R = R0 + R1 + R2` with `m^3 = 0`, stored by
//! the structure constants of the multiplication `R1 x R1 -> R2`.
//!
//! The same storage describes the degree-two truncation of a
//! positive-dimensional ring `S` ([`DegreeTwoRingData`]); all constructions in
//! this crate only read multiplication up to degree two.

use std::collections::BTreeMap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exactla::{FMatrix, PrimeField, Subspace};

/// Samples drawn by [`find_minimal_reduction`] before giving up.
pub const REDUCTION_SAMPLE_BUDGET: usize = 64;

/// Homogeneous element of degree 0, 1 or 2, in coordinates of that piece.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Element {
    degree: u8,
    coords: Vec<u32>,
}

impl Element {
    pub fn new(degree: u8, coords: Vec<u32>) -> Result<Self> {
        if degree > 2 {
            return Err(Error::Input(format!("degree {degree} element in a ring with m^3 = 0")));
        }
        if degree == 0 && coords.len() != 1 {
            return Err(Error::Dimension("degree-0 element needs one coordinate".into()));
        }
        Ok(Element { degree, coords })
    }

    pub fn scalar(c: u32) -> Self {
        Element { degree: 0, coords: vec![c] }
    }

    pub fn zero(degree: u8, len: usize) -> Self {
        Element { degree, coords: vec![0; len] }
    }

    /// Degree-one element from coordinates in the `R1` basis.
    pub fn linear(coords: Vec<u32>) -> Self {
        Element { degree: 1, coords }
    }

    pub fn quadratic(coords: Vec<u32>) -> Self {
        Element { degree: 2, coords }
    }

    #[inline]
    pub fn degree(&self) -> u8 {
        self.degree
    }
    #[inline]
    pub fn coords(&self) -> &[u32] {
        &self.coords
    }
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Element, field: PrimeField) -> Result<Element> {
        if self.degree != other.degree || self.coords.len() != other.coords.len() {
            return Err(Error::Dimension("adding elements of different degrees".into()));
        }
        let coords = self.coords.iter().zip(&other.coords).map(|(&a, &b)| field.add(a, b)).collect();
        Ok(Element { degree: self.degree, coords })
    }

    pub fn scale(&self, c: u32, field: PrimeField) -> Element {
        Element { degree: self.degree, coords: self.coords.iter().map(|&a| field.mul(a, c)).collect() }
    }

    pub fn neg(&self, field: PrimeField) -> Element {
        Element { degree: self.degree, coords: self.coords.iter().map(|&a| field.neg(a)).collect() }
    }

    /// Representative normalized so that the first nonzero coordinate is 1.
    pub fn projective_normal(&self, field: PrimeField) -> Element {
        match self.coords.iter().find(|&&c| c != 0) {
            None => self.clone(),
            Some(&lead) => self.scale(field.inv(lead), field),
        }
    }
}

/// Finite-dimensional graded commutative algebra with `m^3 = 0`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "AlgebraJson", into = "AlgebraJson")]
pub struct GradedAlgebra {
    field: PrimeField,
    dim1: usize,
    dim2: usize,
    /// `mult11[(i * dim1 + j) * dim2 + k]` is the `k`-th coordinate of `v_i v_j`.
    mult11: Vec<u32>,
}

impl fmt::Debug for GradedAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GradedAlgebra(p={}, hilbert=(1, {}, {}))", self.field.p(), self.dim1, self.dim2)
    }
}

#[derive(Serialize, Deserialize)]
struct AlgebraJson {
    schema: u32,
    p: u32,
    dim1: usize,
    dim2: usize,
    mult11: Vec<Vec<Vec<i64>>>,
}

impl TryFrom<AlgebraJson> for GradedAlgebra {
    type Error = Error;

    fn try_from(j: AlgebraJson) -> Result<Self> {
        if j.schema != 1 {
            return Err(Error::Schema(format!("unsupported ring schema {}", j.schema)));
        }
        let field = PrimeField::new(j.p)?;
        GradedAlgebra::from_tensor(field, j.dim1, j.dim2, &j.mult11)
    }
}

impl From<GradedAlgebra> for AlgebraJson {
    fn from(a: GradedAlgebra) -> Self {
        AlgebraJson { schema: 1, p: a.field.p(), dim1: a.dim1, dim2: a.dim2, mult11: a.tensor() }
    }
}

impl GradedAlgebra {
    /// Validating constructor from a `dim1 x dim1 x dim2` tensor.
    pub fn from_tensor(field: PrimeField, dim1: usize, dim2: usize, mult11: &[Vec<Vec<i64>>]) -> Result<Self> {
        if mult11.len() != dim1 || mult11.iter().any(|row| row.len() != dim1) {
            return Err(Error::Schema(format!("mult11 must be {dim1}x{dim1}x{dim2}")));
        }
        let mut flat = Vec::with_capacity(dim1 * dim1 * dim2);
        for row in mult11 {
            for prod in row {
                if prod.len() != dim2 {
                    return Err(Error::Schema(format!("mult11 must be {dim1}x{dim1}x{dim2}")));
                }
                flat.extend(prod.iter().map(|&c| field.reduce(c)));
            }
        }
        Self::from_flat(field, dim1, dim2, flat)
    }

    pub(crate) fn from_flat(field: PrimeField, dim1: usize, dim2: usize, mult11: Vec<u32>) -> Result<Self> {
        let alg = GradedAlgebra { field, dim1, dim2, mult11 };
        for i in 0..dim1 {
            for j in i + 1..dim1 {
                if alg.product(i, j) != alg.product(j, i) {
                    return Err(Error::Schema(format!("mult11 not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(alg)
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }
    #[inline]
    pub fn dim1(&self) -> usize {
        self.dim1
    }
    #[inline]
    pub fn dim2(&self) -> usize {
        self.dim2
    }
    /// Total dimension `1 + dim1 + dim2`.
    pub fn dim(&self) -> usize {
        1 + self.dim1 + self.dim2
    }

    /// Dimension of the degree-`d` piece.
    pub fn piece_dim(&self, d: i32) -> usize {
        match d {
            0 => 1,
            1 => self.dim1,
            2 => self.dim2,
            _ => 0,
        }
    }

    /// Coordinates of `v_i * v_j` in `R2`.
    #[inline]
    pub fn product(&self, i: usize, j: usize) -> &[u32] {
        let k = (i * self.dim1 + j) * self.dim2;
        &self.mult11[k..k + self.dim2]
    }

    pub fn tensor(&self) -> Vec<Vec<Vec<i64>>> {
        (0..self.dim1)
            .map(|i| (0..self.dim1).map(|j| self.product(i, j).iter().map(|&c| c as i64).collect()).collect())
            .collect()
    }

    /// Matrix of `v -> x v` from `R1` to `R2` for a degree-one `x`.
    pub fn mul_by_linear(&self, x: &[u32]) -> FMatrix {
        let f = self.field;
        let mut m = FMatrix::zeros(f, self.dim2, self.dim1);
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for j in 0..self.dim1 {
                for (k, &c) in self.product(i, j).iter().enumerate() {
                    m.add_at(k, j, f.mul(xi, c));
                }
            }
        }
        m
    }

    /// Product of two homogeneous elements.
    pub fn mul(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check_element(a)?;
        self.check_element(b)?;
        let f = self.field;
        Ok(match (a.degree, b.degree) {
            (0, _) => b.scale(a.coords[0], f),
            (_, 0) => a.scale(b.coords[0], f),
            (1, 1) => Element::quadratic(self.mul_by_linear(&a.coords).mul_vec(&b.coords)),
            (da, db) => Element::zero(da + db, 0),
        })
    }

    pub fn check_element(&self, e: &Element) -> Result<()> {
        if e.coords.len() != self.piece_dim(e.degree as i32) && !(e.degree > 2) {
            return Err(Error::Dimension(format!(
                "degree-{} element with {} coordinates, piece has dim {}",
                e.degree,
                e.coords.len(),
                self.piece_dim(e.degree as i32)
            )));
        }
        Ok(())
    }

    /// `(1, dim1, dim2)`.
    pub fn hilbert_coeffs(&self) -> [usize; 3] {
        [1, self.dim1, self.dim2]
    }

    /// Hilbert series of the form `(1+t)(1+rt)` with `r >= 2`.
    pub fn is_good_shape(&self) -> bool {
        self.dim2 >= 2 && self.dim1 == self.dim2 + 1
    }

    /// `r = dim R2` when the ring has the good shape.
    pub fn good_r(&self) -> Option<usize> {
        self.is_good_shape().then_some(self.dim2)
    }

    /// Whether `R2` is spanned by products of degree-one elements.
    pub fn is_standard(&self) -> bool {
        let prods: Vec<Vec<u32>> = (0..self.dim1)
            .flat_map(|i| (i..self.dim1).map(move |j| (i, j)))
            .map(|(i, j)| self.product(i, j).to_vec())
            .collect();
        Subspace::from_vectors(self.field, self.dim2, &prods).dim() == self.dim2
    }

    /// `(0 : m)` as a subspace of `R1 + R2` (coordinates: `R1` first).
    pub fn socle(&self) -> Subspace {
        let f = self.field;
        let n = self.dim1 + self.dim2;
        // a1 in R1 with a1 * v_j = 0 for all j
        let mut stacked = FMatrix::zeros(f, self.dim1 * self.dim2, self.dim1);
        for j in 0..self.dim1 {
            for i in 0..self.dim1 {
                for (k, &c) in self.product(i, j).iter().enumerate() {
                    stacked.set(j * self.dim2 + k, i, c);
                }
            }
        }
        let ker = crate::exactla::kernel_basis(&stacked);
        let mut vecs: Vec<Vec<u32>> = ker
            .vectors()
            .into_iter()
            .map(|v| {
                let mut w = v;
                w.resize(n, 0);
                w
            })
            .collect();
        for k in 0..self.dim2 {
            let mut w = vec![0; n];
            w[self.dim1 + k] = 1;
            vecs.push(w);
        }
        Subspace::from_vectors(f, n, &vecs)
    }

    /// `R2` viewed inside `R1 + R2`.
    pub fn top_piece(&self) -> Subspace {
        let n = self.dim1 + self.dim2;
        let vecs: Vec<Vec<u32>> = (0..self.dim2)
            .map(|k| {
                let mut w = vec![0; n];
                w[self.dim1 + k] = 1;
                w
            })
            .collect();
        Subspace::from_vectors(self.field, n, &vecs)
    }

    /// Whether multiplication by the degree-one `x` maps `R1` onto `R2`.
    pub fn is_minimal_reduction(&self, x: &[u32]) -> bool {
        x.len() == self.dim1 && self.mul_by_linear(x).rank() == self.dim2
    }

    /// Stable content hash (hex SHA-256 of the canonical JSON).
    pub fn content_hash(&self) -> String {
        let json = serde_json::to_vec(&AlgebraJson::from(self.clone())).expect("ring serializes");
        let digest = Sha256::digest(&json);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Degree-two truncation of a positive-dimensional graded ring `S`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DegreeTwoRingData(GradedAlgebra);

impl DegreeTwoRingData {
    pub fn new(truncation: GradedAlgebra) -> Self {
        DegreeTwoRingData(truncation)
    }
    pub fn as_algebra(&self) -> &GradedAlgebra {
        &self.0
    }
    pub fn field(&self) -> PrimeField {
        self.0.field
    }
    pub fn dim_s1(&self) -> usize {
        self.0.dim1
    }
    pub fn dim_s2(&self) -> usize {
        self.0.dim2
    }
    pub fn mul(&self, a: &Element, b: &Element) -> Result<Element> {
        self.0.mul(a, b)
    }
}

/// A homogeneous quadratic form, as coefficients on the monomials
/// `X_i X_j` with `i <= j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    num_vars: usize,
    coeffs: BTreeMap<(usize, usize), i64>,
}

impl QuadraticForm {
    /// From `(coefficient, variables)` terms; every term must have exactly two
    /// variable factors.
    pub fn from_terms(num_vars: usize, terms: &[(i64, Vec<usize>)]) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (c, vars) in terms {
            if vars.len() != 2 {
                return Err(Error::Input(format!("term of degree {} in a quadratic form", vars.len())));
            }
            let (i, j) = (vars[0].min(vars[1]), vars[0].max(vars[1]));
            if j >= num_vars {
                return Err(Error::Input(format!("variable index {j} out of range")));
            }
            *coeffs.entry((i, j)).or_insert(0) += c;
        }
        Ok(QuadraticForm { num_vars, coeffs })
    }

    /// Parses strings like `"xy - zw"`, `"x^2"`, `"2*x*w - 3 z^2"` over
    /// single-letter variable names.
    pub fn parse(s: &str, vars: &[char]) -> Result<Self> {
        let mut terms = Vec::new();
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(Error::Input("empty quadric".into()));
        }
        let mut chunks = Vec::new();
        let mut cur = String::new();
        for ch in cleaned.chars() {
            if (ch == '+' || ch == '-') && !cur.is_empty() {
                chunks.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        chunks.push(cur);
        for chunk in chunks {
            let (sign, body) = match chunk.strip_prefix('-') {
                Some(rest) => (-1, rest),
                None => (1, chunk.strip_prefix('+').unwrap_or(&chunk)),
            };
            let digits: String = body.chars().take_while(|c| c.is_ascii_digit()).collect();
            let coef: i64 = if digits.is_empty() {
                1
            } else {
                digits.parse().map_err(|_| Error::Input(format!("bad coefficient in {chunk}")))?
            };
            let mut rest = body[digits.len()..].chars().peekable();
            let mut factors = Vec::new();
            while let Some(ch) = rest.next() {
                if ch == '*' {
                    continue;
                }
                let idx = vars
                    .iter()
                    .position(|&v| v == ch)
                    .ok_or_else(|| Error::Input(format!("unknown variable '{ch}' in {s}")))?;
                let mut power = 1;
                if rest.peek() == Some(&'^') {
                    rest.next();
                    let e: String = std::iter::from_fn(|| rest.next_if(|c| c.is_ascii_digit())).collect();
                    power = e.parse().map_err(|_| Error::Input(format!("bad exponent in {chunk}")))?;
                }
                factors.extend(std::iter::repeat_n(idx, power));
            }
            terms.push((sign * coef, factors));
        }
        Self::from_terms(vars.len(), &terms)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Coordinates in the lexicographic monomial basis of `Sym^2`.
    pub fn to_sym2(&self, field: PrimeField) -> Vec<u32> {
        let mut v = vec![0u32; sym2_dim(self.num_vars)];
        for (&(i, j), &c) in &self.coeffs {
            let k = sym2_index(self.num_vars, i, j);
            v[k] = field.add(v[k], field.reduce(c));
        }
        v
    }
}

pub(crate) fn sym2_dim(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Index of `X_i X_j` (`i <= j`) in lexicographic order.
pub(crate) fn sym2_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = (i.min(j), i.max(j));
    // monomials with first index below i, then the offset within row i
    i * n - i * i.saturating_sub(1) / 2 + (j - i)
}

/// `R = k[X_0..X_{n-1}] / (I + m^3)` for an ideal generated by quadrics.
/// `R2` keeps the monomials that are not leading terms of the echelonized
/// quadrics, in lexicographic order.
pub fn build_quadratic_quotient(
    field: PrimeField,
    num_vars: usize,
    quadrics: &[QuadraticForm],
) -> Result<GradedAlgebra> {
    if quadrics.iter().any(|q| q.num_vars != num_vars) {
        return Err(Error::Input("quadric over a different number of variables".into()));
    }
    let n2 = sym2_dim(num_vars);
    let rels: Vec<Vec<u32>> = quadrics.iter().map(|q| q.to_sym2(field)).collect();
    let span = Subspace::from_vectors(field, n2, &rels);
    let basis = crate::exactla::PivotBasis::span(field, n2, &span.vectors());
    let mut is_lead = vec![false; n2];
    for &c in basis.pivots() {
        is_lead[c] = true;
    }
    let kept: Vec<usize> = (0..n2).filter(|&c| !is_lead[c]).collect();
    let dim2 = kept.len();
    let mut flat = vec![0u32; num_vars * num_vars * dim2];
    for i in 0..num_vars {
        for j in 0..num_vars {
            let mut mono = vec![0u32; n2];
            mono[sym2_index(num_vars, i, j)] = 1;
            let reduced = reduce_by(&basis, &mono, field);
            let dst = (i * num_vars + j) * dim2;
            for (k, &c) in kept.iter().enumerate() {
                flat[dst + k] = reduced[c];
            }
        }
    }
    GradedAlgebra::from_flat(field, num_vars, dim2, flat)
}

/// `v` minus its projection along the pivots of `basis`.
fn reduce_by(basis: &crate::exactla::PivotBasis, v: &[u32], field: PrimeField) -> Vec<u32> {
    let c = basis.coords_unchecked(v);
    let mut out = v.to_vec();
    let neg: Vec<u32> = c.iter().map(|&x| field.neg(x)).collect();
    basis.combine_into(&neg, &mut out);
    out
}

/// Degree-two data of `k[X_0..X_r] / I_2` of the `2 x (r+1)` circulant
/// matrix with rows `(X_0, .., X_r)` and `(X_1, .., X_r, X_0)`.
pub fn build_circulant_ring(field: PrimeField, r: usize) -> Result<DegreeTwoRingData> {
    if r < 2 {
        return Err(Error::Input(format!("circulant ring needs r >= 2, got {r}")));
    }
    let n = r + 1;
    let mut minors = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            // X_i X_{j+1} - X_j X_{i+1}
            minors.push(QuadraticForm::from_terms(n, &[(1, vec![i, (j + 1) % n]), (-1, vec![j, (i + 1) % n])])?);
        }
    }
    let alg = build_quadratic_quotient(field, n, &minors)?;
    if alg.dim1 != n || alg.dim2 != n {
        return Err(Error::Construction(format!(
            "circulant ring r={r} has degree-two dims ({}, {}), expected ({n}, {n})",
            alg.dim1, alg.dim2
        )));
    }
    Ok(DegreeTwoRingData(alg))
}

/// `R = S / fS` truncated: `R1 = S1`, `R2 = S2 / k f`.
pub fn quotient_by_quadric(s: &DegreeTwoRingData, f: &Element) -> Result<GradedAlgebra> {
    let alg = &s.0;
    if f.degree() != 2 {
        return Err(Error::Input("quotient element must have degree 2".into()));
    }
    alg.check_element(f)?;
    if f.is_zero() {
        return Err(Error::Input("cannot quotient by the zero quadric".into()));
    }
    let field = alg.field;
    let basis = crate::exactla::PivotBasis::span(field, alg.dim2, &[f.coords().to_vec()]);
    let lead = basis.pivots()[0];
    let kept: Vec<usize> = (0..alg.dim2).filter(|&c| c != lead).collect();
    let dim2 = kept.len();
    let mut flat = vec![0u32; alg.dim1 * alg.dim1 * dim2];
    for i in 0..alg.dim1 {
        for j in 0..alg.dim1 {
            let reduced = reduce_by(&basis, alg.product(i, j), field);
            let dst = (i * alg.dim1 + j) * dim2;
            for (k, &c) in kept.iter().enumerate() {
                flat[dst + k] = reduced[c];
            }
        }
    }
    GradedAlgebra::from_flat(field, alg.dim1, dim2, flat)
}

/// Image of a degree-two element of `S` in `R = S / fS` (same pivot
/// convention as [`quotient_by_quadric`]).
pub fn reduce_mod_quadric(s: &DegreeTwoRingData, f: &Element, g: &Element) -> Result<Element> {
    let alg = &s.0;
    let field = alg.field;
    if g.degree() != 2 {
        return Ok(g.clone());
    }
    let basis = crate::exactla::PivotBasis::span(field, alg.dim2, &[f.coords().to_vec()]);
    let lead = basis.pivots()[0];
    let reduced = reduce_by(&basis, g.coords(), field);
    Ok(Element::quadratic((0..alg.dim2).filter(|&c| c != lead).map(|c| reduced[c]).collect()))
}

/// Seeded search for a degree-one `x` with `x S1 = S2`.
pub fn find_minimal_reduction(s: &DegreeTwoRingData, seed: u64) -> Result<Element> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_minimal_reduction(s.as_algebra(), &mut rng, |_| true)
}

/// The `y` with `x y = f`, when multiplication by `x` maps `S1` onto `S2`
/// bijectively.
pub fn cofactor(s: &DegreeTwoRingData, x: &[u32], f: &Element) -> Result<Vec<u32>> {
    let alg = &s.0;
    alg.check_element(f)?;
    if f.degree() != 2 || x.len() != alg.dim1 {
        return Err(Error::Input("cofactor needs x in S1 and f in S2".into()));
    }
    let m = alg.mul_by_linear(x);
    if alg.dim1 != alg.dim2 || m.rank() != alg.dim2 {
        return Err(Error::Input("multiplication by x is not bijective S1 -> S2".into()));
    }
    crate::exactla::solve(&m, f.coords())?.ok_or_else(|| Error::Construction("bijective map missed f".into()))
}

/// Whether the quadric `f` is a nonzerodivisor on `S`. For `S` of minimal
/// multiplicity this is read off from degree two: `f = x y` with `x` a
/// minimal reduction, and `f` is regular iff `y` is a minimal reduction too.
pub fn is_regular_quadric(s: &DegreeTwoRingData, f: &Element) -> Result<bool> {
    if f.is_zero() {
        return Ok(false);
    }
    let x = find_minimal_reduction(s, 0)?;
    let y = cofactor(s, x.coords(), f)?;
    Ok(s.0.is_minimal_reduction(&y))
}

/// Seeded random quadric, kept only once [`is_regular_quadric`] accepts it.
pub fn random_regular_quadric(s: &DegreeTwoRingData, seed: u64) -> Result<Element> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = s.0.field;
    for _ in 0..REDUCTION_SAMPLE_BUDGET {
        let f = Element::quadratic((0..s.0.dim2).map(|_| field.random(&mut rng)).collect());
        if is_regular_quadric(s, &f)? {
            return Ok(f);
        }
    }
    Err(Error::SearchExhausted { samples: REDUCTION_SAMPLE_BUDGET, what: "regular quadric".into() })
}

/// `S`, a regular quadric `f` and `R = S / fS`, kept together so that
/// elements can be chosen in `S` and used in `R`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "HypersurfaceJson", into = "HypersurfaceJson")]
pub struct Hypersurface {
    pub s: DegreeTwoRingData,
    pub f: Element,
    pub ring: GradedAlgebra,
}

#[derive(Serialize, Deserialize)]
struct HypersurfaceJson {
    s: DegreeTwoRingData,
    f: Element,
    ring: String,
}

impl TryFrom<HypersurfaceJson> for Hypersurface {
    type Error = Error;

    fn try_from(j: HypersurfaceJson) -> Result<Self> {
        let h = Hypersurface::new(j.s, j.f)?;
        if h.ring.content_hash() != j.ring {
            return Err(Error::Schema("stored ring hash does not match S / fS".into()));
        }
        Ok(h)
    }
}

impl From<Hypersurface> for HypersurfaceJson {
    fn from(h: Hypersurface) -> Self {
        HypersurfaceJson { ring: h.ring.content_hash(), s: h.s, f: h.f }
    }
}

impl Hypersurface {
    /// Requires `f` regular on `S` and `R` of shape `(1, r+1, r)`.
    pub fn new(s: DegreeTwoRingData, f: Element) -> Result<Self> {
        if !is_regular_quadric(&s, &f)? {
            return Err(Error::Input("quadric is a zero divisor on S".into()));
        }
        let ring = quotient_by_quadric(&s, &f)?;
        if !ring.is_good_shape() {
            return Err(Error::Construction(format!("quotient has Hilbert coefficients {:?}", ring.hilbert_coeffs())));
        }
        Ok(Hypersurface { s, f, ring })
    }

    /// Circulant `S` for `r` modulo a seeded random regular quadric.
    pub fn circulant(field: PrimeField, r: usize, seed: u64) -> Result<Self> {
        let s = build_circulant_ring(field, r)?;
        let f = random_regular_quadric(&s, seed)?;
        Self::new(s, f)
    }

    pub fn r(&self) -> usize {
        self.ring.dim2()
    }

    /// Degree-one `x` with `x S1 = S2`, accepted by `extra`.
    pub fn sample_reduction<F>(&self, rng: &mut ChaCha8Rng, extra: F) -> Result<Vec<u32>>
    where
        F: FnMut(&[u32]) -> bool,
    {
        Ok(sample_minimal_reduction(self.s.as_algebra(), rng, extra)?.coords().to_vec())
    }

    pub fn is_reduction_of_s(&self, x: &[u32]) -> bool {
        self.s.as_algebra().is_minimal_reduction(x)
    }
}

/// `k[x,y,z,w] / (x^2, xy-zw, xy-w^2, xz-yw, xw-y^2, xw-yz, xw-z^2)`,
/// with `R1` ordered `x, y, z, w`.
pub fn veliche_ring(field: PrimeField) -> Result<GradedAlgebra> {
    let vars = ['x', 'y', 'z', 'w'];
    let qs = ["x^2", "xy-zw", "xy-w^2", "xz-yw", "xw-y^2", "xw-yz", "xw-z^2"]
        .iter()
        .map(|s| QuadraticForm::parse(s, &vars))
        .collect::<Result<Vec<_>>>()?;
    build_quadratic_quotient(field, 4, &qs)
}

/// Samples degree-one elements until one is a minimal reduction accepted by
/// `extra`; each candidate is verified by a rank computation.
pub fn sample_minimal_reduction<F>(alg: &GradedAlgebra, rng: &mut ChaCha8Rng, mut extra: F) -> Result<Element>
where
    F: FnMut(&[u32]) -> bool,
{
    let field = alg.field;
    for _ in 0..REDUCTION_SAMPLE_BUDGET {
        let x: Vec<u32> = (0..alg.dim1).map(|_| field.random(rng)).collect();
        if x.iter().all(|&c| c == 0) {
            continue;
        }
        if alg.is_minimal_reduction(&x) && extra(&x) {
            return Ok(Element::linear(x));
        }
    }
    Err(Error::SearchExhausted { samples: REDUCTION_SAMPLE_BUDGET, what: "degree-one element with x*R1 = R2".into() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fld() -> PrimeField {
        PrimeField::new(101).unwrap()
    }

    #[test]
    fn sym2_indexing_is_lexicographic() {
        let n = 4;
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                assert_eq!(sym2_index(n, i, j), k);
                assert_eq!(sym2_index(n, j, i), k);
                k += 1;
            }
        }
        assert_eq!(k, sym2_dim(n));
    }

    #[test]
    fn square_zero_ring() {
        let vars = ['x', 'y'];
        let qs: Vec<_> = ["x^2", "xy", "y^2"].iter().map(|s| QuadraticForm::parse(s, &vars).unwrap()).collect();
        let r = build_quadratic_quotient(fld(), 2, &qs).unwrap();
        assert_eq!(r.hilbert_coeffs(), [1, 2, 0]);
        assert!(!r.is_good_shape());
        assert_eq!(r.socle().dim(), 2);
    }

    #[test]
    fn univariate_truncation() {
        let r = build_quadratic_quotient(fld(), 1, &[]).unwrap();
        assert_eq!(r.hilbert_coeffs(), [1, 1, 1]);
        assert_eq!(r.product(0, 0), &[1]);
    }

    #[test]
    fn veliche_ring_dims() {
        // 7 quadrics in the 10-dim Sym^2 of 4 variables: rank check by elimination
        let vars = ['x', 'y', 'z', 'w'];
        let qs: Vec<Vec<u32>> = ["x^2", "xy-zw", "xy-w^2", "xz-yw", "xw-y^2", "xw-yz", "xw-z^2"]
            .iter()
            .map(|s| QuadraticForm::parse(s, &vars).unwrap().to_sym2(fld()))
            .collect();
        assert_eq!(Subspace::from_vectors(fld(), 10, &qs).dim(), 7);
        let r = veliche_ring(fld()).unwrap();
        assert_eq!(r.hilbert_coeffs(), [1, 4, 3]);
        assert!(r.is_good_shape());
        assert_eq!(r.socle(), r.top_piece());
    }

    #[test]
    fn rejects_non_quadratic_input() {
        let vars = ['x', 'y'];
        assert!(matches!(QuadraticForm::parse("x^3", &vars), Err(Error::Input(_))));
        assert!(matches!(QuadraticForm::parse("x", &vars), Err(Error::Input(_))));
        assert!(matches!(QuadraticForm::parse("xq", &vars), Err(Error::Input(_))));
        assert!(QuadraticForm::from_terms(2, &[(1, vec![0, 1, 1])]).is_err());
    }

    #[test]
    fn circulant_dims() {
        for r in 2..=4 {
            let s = build_circulant_ring(fld(), r).unwrap();
            assert_eq!((s.dim_s1(), s.dim_s2()), (r + 1, r + 1));
        }
        assert!(matches!(build_circulant_ring(fld(), 1), Err(Error::Input(_))));
    }

    #[test]
    fn circulant_minors_independent() {
        for r in 2..=5 {
            let n = r + 1;
            let mut minors = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    let q =
                        QuadraticForm::from_terms(n, &[(1, vec![i, (j + 1) % n]), (-1, vec![j, (i + 1) % n])]).unwrap();
                    minors.push(q.to_sym2(fld()));
                }
            }
            assert_eq!(Subspace::from_vectors(fld(), sym2_dim(n), &minors).dim(), n * (n - 1) / 2);
        }
    }

    #[test]
    fn quotient_shapes_and_socle() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for r in 2..=3 {
            let s = build_circulant_ring(fld(), r).unwrap();
            let f = Element::quadratic((0..r + 1).map(|_| fld().random(&mut rng)).collect());
            let q = quotient_by_quadric(&s, &f).unwrap();
            assert_eq!(q.hilbert_coeffs(), [1, r + 1, r]);
            assert!(q.is_good_shape());
            // oracle: kernel of stacked multiplication matrices is zero in degree one
            assert_eq!(q.socle(), q.top_piece());
            assert_eq!(q.socle().dim(), r);
        }
        let s = build_circulant_ring(fld(), 2).unwrap();
        assert!(quotient_by_quadric(&s, &Element::quadratic(vec![0, 0, 0])).is_err());
    }

    #[test]
    fn minimal_reduction_search() {
        let s = build_circulant_ring(fld(), 2).unwrap();
        let x = find_minimal_reduction(&s, 1).unwrap();
        let m = s.as_algebra().mul_by_linear(x.coords());
        assert_eq!(m.rank(), 3);
        assert_eq!(crate::exactla::image_basis(&m), Subspace::full(fld(), 3));
        // deterministic given the seed
        assert_eq!(find_minimal_reduction(&s, 1).unwrap(), x);

        let dead = GradedAlgebra::from_flat(fld(), 2, 1, vec![0; 4]).unwrap();
        let dead = DegreeTwoRingData::new(dead);
        assert!(matches!(find_minimal_reduction(&dead, 0), Err(Error::SearchExhausted { .. })));
    }

    #[test]
    fn symmetry_validated_on_load() {
        let s = build_circulant_ring(fld(), 3).unwrap();
        let json = serde_json::to_string(s.as_algebra()).unwrap();
        let back: GradedAlgebra = serde_json::from_str(&json).unwrap();
        assert_eq!(&back, s.as_algebra());
        let mut tampered: serde_json::Value = serde_json::from_str(&json).unwrap();
        tampered["mult11"][0][1][0] = serde_json::json!(5);
        tampered["mult11"][1][0][0] = serde_json::json!(6);
        assert!(serde_json::from_value::<GradedAlgebra>(tampered).is_err());
    }

    #[test]
    fn multiplication_is_graded() {
        let s = build_circulant_ring(fld(), 2).unwrap();
        let a = s.as_algebra();
        let x = Element::linear(vec![1, 2, 3]);
        let y = Element::linear(vec![0, 1, 5]);
        let xy = a.mul(&x, &y).unwrap();
        assert_eq!(xy.degree(), 2);
        assert_eq!(xy, a.mul(&y, &x).unwrap());
        assert!(a.mul(&xy, &x).unwrap().is_zero());
        assert_eq!(a.mul(&Element::scalar(2), &x).unwrap(), x.scale(2, fld()));
    }
}
