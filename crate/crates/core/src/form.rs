//! Integer multilinear forms.
//!
//! A multilinear `(n, d)`-form is a sum of monomials `f_I * x_I` where every
//! index set `I` holds exactly `d` distinct variables out of `x1..xn`. Forms are
//! stored sparsely in canonical order (lexicographic on the index sequence)
//! with nonzero arbitrary-precision coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("variable x{var} appears more than once in a monomial")]
    RepeatedVariable { var: usize },
    #[error("form has no monomials")]
    Empty,
    #[error("variable index {index} outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("monomials have mixed degrees {first} and {second}")]
    MixedDegree { first: usize, second: usize },
    #[error("assignment has {got} values, form has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("form reduces to a constant after normalization")]
    Degenerate,
    #[error("invalid JSON form: {0}")]
    Json(String),
}

/// Strictly increasing 1-based variable indices of one monomial.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    /// Sorts `indices` and rejects repeats and zero.
    pub fn new(mut indices: Vec<usize>) -> Result<Self, FormError> {
        indices.sort_unstable();
        if let Some(&0) = indices.first() {
            return Err(FormError::Syntax {
                pos: 0,
                msg: "variable indices are 1-based".into(),
            });
        }
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(FormError::RepeatedVariable { var: w[0] });
        }
        Ok(IndexSet(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, var: usize) -> bool {
        self.0.binary_search(&var).is_ok()
    }

    pub fn max_index(&self) -> usize {
        self.0.last().copied().unwrap_or(0)
    }

    /// Copy of this set with `var` removed.
    pub fn without(&self, var: usize) -> IndexSet {
        IndexSet(self.0.iter().copied().filter(|&i| i != var).collect())
    }

    /// Product of the assigned values of the member variables.
    pub fn monomial_value(&self, a: &[BigInt]) -> BigInt {
        self.0.iter().map(|&i| &a[i - 1]).product()
    }
}

/// Sparse integer multilinear form in `n` variables of degree `d`.
impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.0.iter().map(|i| format!("x{i}")).collect();
        f.write_str(&names.join("*"))
    }
}

/// Monomials with their coefficients.
pub type Terms = Vec<(IndexSet, BigInt)>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultilinearForm {
    n: usize,
    d: usize,
    monomials: BTreeMap<IndexSet, BigInt>,
}

/// Gcd summary of the coefficients of a form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoprimalityProfile {
    #[serde(with = "crate::decimal")]
    pub overall_gcd: BigInt,
    pub pairwise_coprime: bool,
    pub has_coprime_pair: bool,
}

impl MultilinearForm {
    /// Builds a canonical form: duplicate index sets are merged by addition and
    /// zero coefficients dropped.
    pub fn new<I>(n: usize, terms: I) -> Result<Self, FormError>
    where
        I: IntoIterator<Item = (Vec<usize>, BigInt)>,
    {
        let mut monomials: BTreeMap<IndexSet, BigInt> = BTreeMap::new();
        let mut degree: Option<usize> = None;
        for (vars, coef) in terms {
            let set = IndexSet::new(vars)?;
            if set.is_empty() {
                return Err(FormError::Syntax {
                    pos: 0,
                    msg: "monomial without variables".into(),
                });
            }
            if set.max_index() > n {
                return Err(FormError::IndexOutOfRange {
                    index: set.max_index(),
                    n,
                });
            }
            match degree {
                None => degree = Some(set.len()),
                Some(d) if d != set.len() => {
                    return Err(FormError::MixedDegree {
                        first: d,
                        second: set.len(),
                    })
                }
                _ => {}
            }
            *monomials.entry(set).or_insert_with(BigInt::zero) += coef;
        }
        monomials.retain(|_, c| !c.is_zero());
        let d = match monomials.keys().next() {
            Some(set) => set.len(),
            None => return Err(FormError::Empty),
        };
        Ok(MultilinearForm { n, d, monomials })
    }

    /// Like [`MultilinearForm::new`], taking `n` as the largest index used.
    pub fn from_terms<I>(terms: I) -> Result<Self, FormError>
    where
        I: IntoIterator<Item = (Vec<usize>, BigInt)>,
    {
        let terms: Vec<_> = terms.into_iter().collect();
        let n = terms.iter().flat_map(|(v, _)| v.iter().copied()).max().unwrap_or(0);
        Self::new(n, terms)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    /// Number of stored (nonzero) monomials.
    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> impl ExactSizeIterator<Item = (&IndexSet, &BigInt)> {
        self.monomials.iter()
    }

    pub fn coefficient(&self, vars: &[usize]) -> Option<&BigInt> {
        let set = IndexSet::new(vars.to_vec()).ok()?;
        self.monomials.get(&set)
    }

    /// Same monomials over a larger variable count.
    pub fn with_arity(&self, n: usize) -> Result<Self, FormError> {
        let max = self.max_index();
        if n < max {
            return Err(FormError::IndexOutOfRange { index: max, n });
        }
        Ok(MultilinearForm {
            n,
            d: self.d,
            monomials: self.monomials.clone(),
        })
    }

    pub fn max_index(&self) -> usize {
        self.monomials.keys().map(IndexSet::max_index).max().unwrap_or(0)
    }

    /// Exact value at `a`.
    pub fn evaluate(&self, a: &[BigInt]) -> Result<BigInt, FormError> {
        if a.len() != self.n {
            return Err(FormError::DimensionMismatch {
                expected: self.n,
                got: a.len(),
            });
        }
        Ok(self.monomials.iter().map(|(set, c)| c * set.monomial_value(a)).sum())
    }

    /// Largest absolute coefficient, `|F|`.
    pub fn sup_norm(&self) -> BigInt {
        self.monomials
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn coprimality_profile(&self) -> CoprimalityProfile {
        let coefs: Vec<&BigInt> = self.monomials.values().collect();
        let overall_gcd = coefs.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        let mut pairwise = true;
        let mut any_pair = false;
        for (i, a) in coefs.iter().enumerate() {
            for b in &coefs[i + 1..] {
                if a.gcd(b).is_one() {
                    any_pair = true;
                } else {
                    pairwise = false;
                }
            }
        }
        CoprimalityProfile {
            overall_gcd,
            pairwise_coprime: pairwise,
            has_coprime_pair: any_pair,
        }
    }

    /// First pair of stored coefficients (canonical order) sharing a factor.
    pub fn first_non_coprime_pair(&self) -> Option<(IndexSet, IndexSet)> {
        let entries: Vec<_> = self.monomials.iter().collect();
        for (i, (si, ci)) in entries.iter().enumerate() {
            for (sj, cj) in &entries[i + 1..] {
                if !ci.gcd(cj).is_one() {
                    return Some(((*si).clone(), (*sj).clone()));
                }
            }
        }
        None
    }

    /// How many monomials contain each variable; index 0 is `x1`.
    pub fn occurrence_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n];
        for set in self.monomials.keys() {
            for &i in set.indices() {
                counts[i - 1] += 1;
            }
        }
        counts
    }

    /// Splits off the monomials containing `var`: returns the cofactor of
    /// `var` (those monomials with `var` removed) and the remainder. Either part
    /// may be empty, hence the raw term lists.
    pub fn split_on(&self, var: usize) -> (Terms, Terms) {
        let mut with = Vec::new();
        let mut without = Vec::new();
        for (set, c) in &self.monomials {
            if set.contains(var) {
                with.push((set.without(var), c.clone()));
            } else {
                without.push((set.clone(), c.clone()));
            }
        }
        (with, without)
    }

    /// Removes variables that occur in no monomial or in every monomial, and
    /// relabels the survivors to `1..n'`.
    pub fn normalize(&self) -> Result<Normalized, FormError> {
        let counts = self.occurrence_counts();
        let total = self.monomials.len();
        let mut kept = Vec::new();
        let mut absent = Vec::new();
        let mut universal = Vec::new();
        for (i, &c) in counts.iter().enumerate() {
            let var = i + 1;
            if c == 0 {
                absent.push(var);
            } else if c == total {
                universal.push(var);
            } else {
                kept.push(var);
            }
        }
        if kept.is_empty() {
            return Err(FormError::Degenerate);
        }
        let mut relabel = vec![0usize; self.n + 1];
        for (j, &var) in kept.iter().enumerate() {
            relabel[var] = j + 1;
        }
        let terms = self.monomials.iter().map(|(set, c)| {
            let vars = set
                .indices()
                .iter()
                .filter(|&&v| relabel[v] != 0)
                .map(|&v| relabel[v])
                .collect::<Vec<_>>();
            (vars, c.clone())
        });
        let reduced = MultilinearForm::new(kept.len(), terms)?;
        Ok(Normalized {
            reduced,
            original_n: self.n,
            kept,
            absent,
            universal,
        })
    }

    /// Canonical text rendering, parseable by [`MultilinearForm::from_str`].
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, (set, c)) in self.monomials.iter().enumerate() {
            let negative = c.is_negative();
            if k == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mag = c.abs();
            if !mag.is_one() {
                out.push_str(&mag.to_string());
                out.push('*');
            }
            let vars: Vec<String> = set.indices().iter().map(|i| format!("x{i}")).collect();
            out.push_str(&vars.join("*"));
        }
        out
    }

    pub fn to_json(&self) -> FormJson {
        FormJson {
            n: self.n,
            monomials: self
                .monomials
                .iter()
                .map(|(set, c)| MonomialJson {
                    vars: set.indices().to_vec(),
                    coef: c.to_string(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &FormJson) -> Result<Self, FormError> {
        let terms = json
            .monomials
            .iter()
            .map(|m| {
                let coef = m
                    .coef
                    .trim()
                    .parse::<BigInt>()
                    .map_err(|e| FormError::Json(format!("coefficient {:?}: {e}", m.coef)))?;
                Ok((m.vars.clone(), coef))
            })
            .collect::<Result<Vec<_>, FormError>>()?;
        Self::new(json.n, terms)
    }

    /// Parses either the text grammar or, when the input starts with `{`, the
    /// JSON encoding.
    pub fn parse_any(text: &str) -> Result<Self, FormError> {
        if text.trim_start().starts_with('{') {
            let json: FormJson = serde_json::from_str(text).map_err(|e| FormError::Json(e.to_string()))?;
            Self::from_json(&json)
        } else {
            text.parse()
        }
    }
}

impl fmt::Display for MultilinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl FromStr for MultilinearForm {
    type Err = FormError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let terms = Parser::new(s).parse_terms()?;
        Self::from_terms(terms)
    }
}

/// JSON encoding of a form; coefficients are decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormJson {
    pub n: usize,
    pub monomials: Vec<MonomialJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialJson {
    pub vars: Vec<usize>,
    pub coef: String,
}

/// Output of [`MultilinearForm::normalize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    pub reduced: MultilinearForm,
    pub original_n: usize,
    /// Original index of each reduced variable (`kept[j]` is reduced `x{j+1}`).
    pub kept: Vec<usize>,
    /// Variables occurring in no monomial; set to 1 on reconstruction.
    pub absent: Vec<usize>,
    /// Variables occurring in every monomial; fixed to 1.
    pub universal: Vec<usize>,
}

impl Normalized {
    /// Lifts an assignment of the reduced form back to the original variables.
    pub fn reconstruct(&self, reduced: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::one(); self.original_n];
        for (j, &var) in self.kept.iter().enumerate() {
            out[var - 1] = reduced[j].clone();
        }
        out
    }
}

/// Sum over `k = 0..=d` of `d!/k!`, the exponent of the general search bound.
pub fn nu(d: usize) -> BigInt {
    // Horner form of the same sum: nu_d = 1 + d * nu_{d-1}, nu_0 = 1.
    (1..=d).fold(BigInt::one(), |acc, k| BigInt::one() + acc * k)
}

/// Product of integer linear forms `L_1 * ... * L_m` over a common variable set.
///
/// Such products are not multilinear in general, so they get their own type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductForm {
    n: usize,
    factors: Vec<MultilinearForm>,
}

impl ProductForm {
    /// Every factor must be linear; `n` must cover every variable used.
    pub fn new(n: usize, factors: Vec<MultilinearForm>) -> Result<Self, FormError> {
        if factors.is_empty() {
            return Err(FormError::Empty);
        }
        let factors = factors
            .into_iter()
            .map(|f| {
                if f.degree() != 1 {
                    return Err(FormError::MixedDegree {
                        first: 1,
                        second: f.degree(),
                    });
                }
                f.with_arity(n)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ProductForm { n, factors })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn factors(&self) -> &[MultilinearForm] {
        &self.factors
    }

    /// Coefficient vectors of the factors as matrix rows.
    pub fn coefficient_rows(&self) -> Vec<Vec<BigInt>> {
        self.factors
            .iter()
            .map(|f| {
                let mut row = vec![BigInt::zero(); self.n];
                for (set, c) in f.monomials() {
                    row[set.indices()[0] - 1] = c.clone();
                }
                row
            })
            .collect()
    }

    pub fn evaluate(&self, a: &[BigInt]) -> Result<BigInt, FormError> {
        self.factors.iter().map(|f| f.evaluate(a)).product()
    }
}

impl fmt::Display for ProductForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|l| format!("({l})")).collect();
        f.write_str(&parts.join("*"))
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
        }
    }

    fn err(&self, msg: impl Into<String>) -> FormError {
        FormError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn digits(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn parse_terms(&mut self) -> Result<Vec<(Vec<usize>, BigInt)>, FormError> {
        let mut terms = Vec::new();
        let mut negative = false;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            negative = true;
        }
        loop {
            let (vars, mut coef) = self.parse_term()?;
            if negative {
                coef = -coef;
            }
            terms.push((vars, coef));
            match self.peek() {
                None => break,
                Some(b'+') => negative = false,
                Some(b'-') => negative = true,
                Some(c) => return Err(self.err(format!("unexpected {:?}", c as char))),
            }
            self.pos += 1;
        }
        Ok(terms)
    }

    fn parse_term(&mut self) -> Result<(Vec<usize>, BigInt), FormError> {
        let mut coef = BigInt::one();
        if let Some(num) = self.digits() {
            coef = num.parse().map_err(|_| self.err("bad integer"))?;
            if self.peek() != Some(b'*') {
                return Err(self.err("expected '*' after coefficient"));
            }
            self.pos += 1;
        }
        let mut vars = vec![self.parse_var()?];
        while self.peek() == Some(b'*') {
            self.pos += 1;
            vars.push(self.parse_var()?);
        }
        Ok((vars, coef))
    }

    fn parse_var(&mut self) -> Result<usize, FormError> {
        if self.peek() != Some(b'x') {
            return Err(self.err("expected variable 'x<k>'"));
        }
        self.pos += 1;
        // no whitespace between 'x' and its index
        if !self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            return Err(self.err("expected variable index"));
        }
        let num = self.digits().unwrap();
        match num.parse::<usize>() {
            Ok(0) | Err(_) => Err(self.err("variable index must be a positive integer")),
            Ok(k) => Ok(k),
        }
    }
}
