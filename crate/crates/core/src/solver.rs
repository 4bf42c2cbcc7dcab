//! Constructive solvers for `F(a) = b`.
//!
//! Each solver returns a [`SolveReport`] whose solution has already been
//! checked by evaluation. Where a norm bound is known for the construction,
//! the report carries it together with the comparison against the solution.
//!
//! | method | applies to | bound |
//! |---|---|---|
//! | `linear` | degree 1 | none |
//! | `prop4` | degree 2, pairwise coprime | `\|b\| + \|F\|^3` |
//! | `thm1a` | coprime, pairwise coprime | `\|b\| (2\|F\|)^nu_d` |
//! | `thm1b` | `n = d + 1`, some coprime pair | `\|b\| (2\|F\|)^nu_d` |
//! | `prop2` | `6x1x2 + 2p x1x3 + 3p x2x3` | none |
//! | `search` | anything, via exhaustive search | the radius searched |

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::form::{nu, FormError, IndexSet, MultilinearForm};
use crate::intlinalg::ext_gcd;
use crate::oracle::{box_search, OracleError, SearchConfig, UnknownReason};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("coefficients are not coprime (gcd {gcd})")]
    NotCoprime { gcd: BigInt },
    #[error("coefficients of {first} and {second} are not coprime")]
    NotPairwiseCoprime { first: IndexSet, second: IndexSet },
    #[error("no pair of coefficients is coprime")]
    NoCoprimePair,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{b} is not represented: gcd {gcd} of the coefficients does not divide it")]
    Unrepresentable { b: BigInt, gcd: BigInt },
    #[error("no solution found within radius {radius} ({reason:?})")]
    Unknown { radius: BigInt, reason: UnknownReason },
    #[error("verification failed: evaluation gave {got}, expected {expected}")]
    Verification { expected: BigInt, got: BigInt },
    #[error(transparent)]
    Form(#[from] FormError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Linear,
    Quadratic,
    PairwiseCoprime,
    CoprimePair,
    Factored,
    Product,
    Search,
}

impl Method {
    /// Dispatch order used by [`solve_auto`].
    pub const PRIORITY: [Method; 5] = [
        Method::Linear,
        Method::Quadratic,
        Method::PairwiseCoprime,
        Method::CoprimePair,
        Method::Factored,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Method::Linear => "linear",
            Method::Quadratic => "prop4",
            Method::PairwiseCoprime => "thm1a",
            Method::CoprimePair => "thm1b",
            Method::Factored => "prop2",
            Method::Product => "product",
            Method::Search => "search",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Method::Linear,
            Method::Quadratic,
            Method::PairwiseCoprime,
            Method::CoprimePair,
            Method::Factored,
            Method::Product,
            Method::Search,
        ]
        .into_iter()
        .find(|m| m.tag() == s)
        .ok_or_else(|| format!("unknown method {s:?}"))
    }
}

impl Serialize for Method {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.tag())
    }
}

/// Largest absolute coordinate.
pub fn sup_norm(a: &[BigInt]) -> BigInt {
    a.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero)
}

/// A verified solution of `F(a) = b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolveReport {
    #[serde(with = "crate::decimal::vec")]
    solution: Vec<BigInt>,
    method: Method,
    #[serde(with = "crate::decimal::option")]
    bound_value: Option<BigInt>,
    within_bound: Option<bool>,
    #[serde(with = "crate::decimal")]
    b: BigInt,
    #[serde(with = "crate::decimal")]
    evaluation: BigInt,
}

impl SolveReport {
    /// Wraps `solution` after checking that it evaluates to `b`.
    pub(crate) fn checked(
        evaluation: BigInt,
        b: &BigInt,
        solution: Vec<BigInt>,
        method: Method,
        bound_value: Option<BigInt>,
    ) -> Result<Self, SolveError> {
        if &evaluation != b {
            return Err(SolveError::Verification {
                expected: b.clone(),
                got: evaluation,
            });
        }
        let within_bound = bound_value.as_ref().map(|bound| &sup_norm(&solution) <= bound);
        Ok(SolveReport {
            solution,
            method,
            bound_value,
            within_bound,
            b: b.clone(),
            evaluation,
        })
    }

    fn verified(
        f: &MultilinearForm,
        b: &BigInt,
        solution: Vec<BigInt>,
        method: Method,
        bound_value: Option<BigInt>,
    ) -> Result<Self, SolveError> {
        let evaluation = f.evaluate(&solution)?;
        Self::checked(evaluation, b, solution, method, bound_value)
    }

    pub fn solution(&self) -> &[BigInt] {
        &self.solution
    }

    pub fn into_solution(self) -> Vec<BigInt> {
        self.solution
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn bound_value(&self) -> Option<&BigInt> {
        self.bound_value.as_ref()
    }

    pub fn within_bound(&self) -> Option<bool> {
        self.within_bound
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn evaluation(&self) -> &BigInt {
        &self.evaluation
    }

    pub fn sup_norm(&self) -> BigInt {
        sup_norm(&self.solution)
    }
}

/// Bounds wider than this many bits are not materialized.
const MAX_BOUND_BITS: u64 = 1 << 24;

/// `|b| (2|F|)^nu_d`, or `None` when the number would be unreasonably large.
pub fn general_bound(f: &MultilinearForm, b: &BigInt) -> Option<BigInt> {
    let exp = nu(f.degree()).to_u64()?;
    let base = f.sup_norm() * BigInt::from(2u8);
    if exp.checked_mul(base.bits())? > MAX_BOUND_BITS {
        return None;
    }
    Some(b.abs() * num_traits::pow(base, exp as usize))
}

/// `|b| + |F|^3`.
pub fn quadratic_bound(f: &MultilinearForm, b: &BigInt) -> BigInt {
    b.abs() + num_traits::pow(f.sup_norm(), 3)
}

fn zeros(n: usize) -> Vec<BigInt> {
    vec![BigInt::zero(); n]
}

fn owned(terms: Vec<(IndexSet, BigInt)>) -> impl Iterator<Item = (Vec<usize>, BigInt)> {
    terms.into_iter().map(|(s, c)| (s.indices().to_vec(), c))
}

fn require_pairwise(f: &MultilinearForm) -> Result<(), SolveError> {
    let profile = f.coprimality_profile();
    if !profile.overall_gcd.is_one() {
        return Err(SolveError::NotCoprime {
            gcd: profile.overall_gcd,
        });
    }
    if let Some((first, second)) = f.first_non_coprime_pair() {
        return Err(SolveError::NotPairwiseCoprime { first, second });
    }
    Ok(())
}

/// Variable in the most monomials, lowest index on ties, with its count.
fn busiest_variable(f: &MultilinearForm) -> (usize, usize) {
    let counts = f.occurrence_counts();
    let (idx, &count) = counts
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.cmp(b).then(j.cmp(i)))
        .expect("forms have at least one variable");
    (idx + 1, count)
}

/// `f x_I = b` with `f = ±1`: `x_j = f b` for the first `j` in `I`, rest 1.
fn single_monomial(f: &MultilinearForm, b: &BigInt) -> Vec<BigInt> {
    let (set, c) = f.monomials().next().expect("nonempty form");
    debug_assert!(c.abs().is_one());
    let mut a = vec![BigInt::one(); f.n()];
    a[set.indices()[0] - 1] = c * b;
    a
}

/// `f1 x_I1 + f2 x_I2 = b` with `gcd(f1, f2) = 1`: one private variable of
/// each monomial takes the scaled Bezout coefficient, everything else is 1.
fn two_monomials(f: &MultilinearForm, b: &BigInt) -> Vec<BigInt> {
    let mut it = f.monomials();
    let (s1, f1) = it.next().expect("two monomials");
    let (s2, f2) = it.next().expect("two monomials");
    let k = *s1.indices().iter().find(|&&i| !s2.contains(i)).expect("distinct sets");
    let m = *s2.indices().iter().find(|&&i| !s1.contains(i)).expect("distinct sets");
    let (g, u, v) = ext_gcd(f1, f2).expect("nonzero coefficients");
    debug_assert!(g.is_one());
    let mut a = vec![BigInt::one(); f.n()];
    a[k - 1] = b * u;
    a[m - 1] = b * v;
    a
}

fn pairwise_rec(f: &MultilinearForm, b: &BigInt) -> Vec<BigInt> {
    match f.len() {
        1 => return single_monomial(f, b),
        2 => return two_monomials(f, b),
        _ => {}
    }
    let norm = f.normalize().expect("two distinct monomials keep a variable");
    let g = &norm.reduced;
    let (pivot, count) = busiest_variable(g);
    let (with, without) = g.split_on(pivot);
    let a = if count == g.len() - 1 {
        // g = x_p * G + f_I x_I: solve G = 1, then fix x_p
        let cofactor = MultilinearForm::new(g.n(), owned(with)).expect("cofactor of a pivot");
        let mut a = pairwise_rec(&cofactor, &BigInt::one());
        let (set, c) = &without[0];
        a[pivot - 1] = b - c * set.monomial_value(&a);
        a
    } else {
        // x_p is missing from at least two monomials: set it to zero
        let rest = MultilinearForm::new(g.n(), owned(without)).expect("at least two monomials");
        let mut a = pairwise_rec(&rest, b);
        a[pivot - 1] = BigInt::zero();
        a
    };
    norm.reconstruct(&a)
}

/// Solves `F(a) = b` for coprime forms with pairwise coprime coefficients.
///
/// The solution satisfies `|a| <= |b| (2|F|)^nu_d`.
pub fn solve_thm1a(f: &MultilinearForm, b: &BigInt) -> Result<SolveReport, SolveError> {
    require_pairwise(f)?;
    let a = if b.is_zero() { zeros(f.n()) } else { pairwise_rec(f, b) };
    SolveReport::verified(f, b, a, Method::PairwiseCoprime, general_bound(f, b))
}

fn coprime_pair_rec(f: &MultilinearForm, b: &BigInt) -> Vec<BigInt> {
    let n = f.n();
    let terms: Vec<(&IndexSet, &BigInt)> = f.monomials().collect();
    let (i, j) = (0..terms.len())
        .flat_map(|i| (i + 1..terms.len()).map(move |j| (i, j)))
        .find(|&(i, j)| terms[i].1.gcd(terms[j].1).is_one())
        .expect("coprime pair is preserved by the recursion");
    if f.degree() == 1 {
        let (_, u, v) = ext_gcd(terms[i].1, terms[j].1).expect("nonzero coefficients");
        let mut a = zeros(n);
        a[terms[i].0.indices()[0] - 1] = b * u;
        a[terms[j].0.indices()[0] - 1] = b * v;
        return a;
    }
    let missing = |s: &IndexSet| (1..=n).find(|&v| !s.contains(v)).expect("n = d + 1");
    let excluded = [missing(terms[i].0), missing(terms[j].0)];
    let pivot = (1..=n).find(|v| !excluded.contains(v)).expect("n >= 3 when d >= 2");
    let (with, without) = f.split_on(pivot);
    let relabel = |v: usize| if v < pivot { v } else { v - 1 };
    let cofactor = MultilinearForm::new(
        n - 1,
        with.into_iter()
            .map(|(s, c)| (s.indices().iter().map(|&v| relabel(v)).collect(), c)),
    )
    .expect("cofactor of a pivot");
    let sub = coprime_pair_rec(&cofactor, &BigInt::one());
    let mut a = zeros(n);
    for v in (1..=n).filter(|&v| v != pivot) {
        a[v - 1] = sub[relabel(v) - 1].clone();
    }
    let rest = without
        .first()
        .map(|(s, c)| c * s.monomial_value(&a))
        .unwrap_or_else(BigInt::zero);
    a[pivot - 1] = b - rest;
    a
}

/// Solves `F(a) = b` for `n = d + 1` forms with at least one coprime pair of
/// coefficients. Same bound as [`solve_thm1a`].
pub fn solve_thm1b(f: &MultilinearForm, b: &BigInt) -> Result<SolveReport, SolveError> {
    if f.n() != f.degree() + 1 {
        return Err(SolveError::Precondition(format!(
            "needs n = d + 1, got n = {}, d = {}",
            f.n(),
            f.degree()
        )));
    }
    if !f.coprimality_profile().has_coprime_pair {
        return Err(SolveError::NoCoprimePair);
    }
    let a = if b.is_zero() {
        zeros(f.n())
    } else {
        coprime_pair_rec(f, b)
    };
    SolveReport::verified(f, b, a, Method::CoprimePair, general_bound(f, b))
}

/// Solves a linear equation by folding extended gcds over the coefficients.
pub fn solve_linear(f: &MultilinearForm, b: &BigInt) -> Result<SolveReport, SolveError> {
    if f.degree() != 1 {
        return Err(SolveError::Precondition(format!(
            "linear solver needs degree 1, got {}",
            f.degree()
        )));
    }
    let mut vars = Vec::new();
    let mut mult: Vec<BigInt> = Vec::new();
    let mut g = BigInt::zero();
    for (set, c) in f.monomials() {
        vars.push(set.indices()[0]);
        if mult.is_empty() {
            g = c.abs();
            mult.push(c.signum());
        } else {
            let (h, u, v) = ext_gcd(&g, c).expect("g > 0");
            for x in &mut mult {
                *x *= &u;
            }
            mult.push(v);
            g = h;
        }
    }
    if !b.is_multiple_of(&g) {
        return Err(SolveError::Unrepresentable { b: b.clone(), gcd: g });
    }
    let scale = b / &g;
    let mut a = zeros(f.n());
    for (var, m) in vars.into_iter().zip(mult) {
        a[var - 1] = m * &scale;
    }
    SolveReport::verified(f, b, a, Method::Linear, None)
}

/// `f1 x + f2 y = b` with `gcd(f1, f2) = 1` and `|x| <= |f2| / 2`.
fn small_bezout(f1: &BigInt, f2: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
    let (_, u, _) = ext_gcd(f1, f2).expect("nonzero coefficients");
    let m = f2.abs();
    let mut x = (b * u).mod_floor(&m);
    if &x * 2 > m {
        x -= &m;
    }
    let y = (b - f1 * &x) / f2;
    (x, y)
}

fn quadratic_rec(f: &MultilinearForm, b: &BigInt) -> Vec<BigInt> {
    let n = f.n();
    let l = f.len();
    if l == 1 {
        return single_monomial(f, b);
    }
    let mut a = zeros(n);
    let counts = f.occurrence_counts();
    let terms: Vec<(&IndexSet, &BigInt)> = f.monomials().collect();

    if let Some(s) = counts.iter().position(|&c| c == l) {
        // F = x_s * L with L linear
        let var = s + 1;
        a[s] = BigInt::one();
        let other = |set: &IndexSet| set.without(var).indices()[0];
        let (x, y) = small_bezout(terms[0].1, terms[1].1, b);
        a[other(terms[0].0) - 1] = x;
        a[other(terms[1].0) - 1] = y;
        return a;
    }
    if l == 2 {
        // disjoint pair f1 x_i x_j + f2 x_k x_l
        let (s1, s2) = (terms[0].0.indices(), terms[1].0.indices());
        a[s1[1] - 1] = BigInt::one();
        a[s2[1] - 1] = BigInt::one();
        let (x, y) = small_bezout(terms[0].1, terms[1].1, b);
        a[s1[0] - 1] = x;
        a[s2[0] - 1] = y;
        return a;
    }

    let (pivot, count) = busiest_variable(f);
    let (with, without) = f.split_on(pivot);
    if count == l - 1 {
        // F = x_p * G + f_I x_I with G linear: G(a') = 1 from two coefficients
        let v1 = with[0].0.indices()[0];
        let v2 = with[1].0.indices()[0];
        let (_, u, v) = ext_gcd(&with[0].1, &with[1].1).expect("nonzero coefficients");
        a[v1 - 1] = u;
        a[v2 - 1] = v;
        let (set, c) = &without[0];
        a[pivot - 1] = b - c * set.monomial_value(&a);
        a
    } else {
        let rest = MultilinearForm::new(n, owned(without)).expect("at least two monomials");
        let mut a = quadratic_rec(&rest, b);
        a[pivot - 1] = BigInt::zero();
        a
    }
}

/// Solves `F(a) = b` for pairwise coprime quadratic forms with
/// `|a| <= |b| + |F|^3`.
pub fn solve_prop4(f: &MultilinearForm, b: &BigInt) -> Result<SolveReport, SolveError> {
    if f.degree() != 2 {
        return Err(SolveError::Precondition(format!(
            "quadratic solver needs degree 2, got {}",
            f.degree()
        )));
    }
    require_pairwise(f)?;
    let a = if b.is_zero() { zeros(f.n()) } else { quadratic_rec(f, b) };
    SolveReport::verified(f, b, a, Method::Quadratic, Some(quadratic_bound(f, b)))
}

fn check_factored_parameter(p: &BigInt) -> Result<(), SolveError> {
    if p < &BigInt::from(5) || !p.gcd(&BigInt::from(6)).is_one() {
        return Err(SolveError::Precondition(format!(
            "parameter p must be at least 5 and prime to 6, got {p}"
        )));
    }
    Ok(())
}

/// `6 x1 x2 + 2p x1 x3 + 3p x2 x3`.
pub fn factored_form(p: &BigInt) -> Result<MultilinearForm, SolveError> {
    check_factored_parameter(p)?;
    Ok(MultilinearForm::new(
        3,
        [(vec![1, 2], BigInt::from(6)), (vec![1, 3], p * 2), (vec![2, 3], p * 3)],
    )?)
}

/// The `p` for which `f` is [`factored_form`]`(p)`, if any.
pub fn factored_parameter(f: &MultilinearForm) -> Option<BigInt> {
    if f.n() != 3 || f.len() != 3 || f.coefficient(&[1, 2]) != Some(&BigInt::from(6)) {
        return None;
    }
    let (q, r) = f.coefficient(&[1, 3])?.div_rem(&BigInt::from(2));
    if !r.is_zero() || f.coefficient(&[2, 3]) != Some(&(&q * 3)) {
        return None;
    }
    check_factored_parameter(&q).ok().map(|_| q)
}

/// Positive divisors of `|n|` in increasing order, then their negatives.
fn signed_divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if n.is_multiple_of(&d) {
            let q = &n / &d;
            if q != d {
                large.push(q);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    let negatives: Vec<BigInt> = small.iter().map(|x| -x).collect();
    small.extend(negatives);
    small
}

/// For `b + p^2 != 0`: write `b + p^2 = 2^alpha m` with `m` odd and pick the
/// sign of `z = ±1` so that `3y + pz = 2^alpha` and `2x + pz = m` are solvable.
fn factored_main(p: &BigInt, b: &BigInt) -> Vec<BigInt> {
    let n = b + p * p;
    let alpha = n.trailing_zeros().expect("b + p^2 != 0");
    let m = &n >> alpha;
    let pow2 = BigInt::one() << alpha;
    let p_is_one_mod_3 = p.mod_floor(&BigInt::from(3)).is_one();
    let z = if p_is_one_mod_3 == alpha.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    let pz = p * &z;
    let (y, ry) = (pow2 - &pz).div_rem(&BigInt::from(3));
    let (x, rx) = (m - &pz).div_rem(&BigInt::from(2));
    debug_assert!(ry.is_zero() && rx.is_zero());
    vec![x, y, z]
}

/// `b = -p^2`: try `z = ±2, ±3, ...` up to `p^2` and factor
/// `b + p^2 z^2 = u v` with `u ≡ pz (mod 2)`, `v ≡ pz (mod 3)`.
fn factored_fallback(f: &MultilinearForm, p: &BigInt, b: &BigInt) -> Option<Vec<BigInt>> {
    let p2 = p * p;
    let (two, three) = (BigInt::from(2), BigInt::from(3));
    let mut k = BigInt::from(2);
    while k <= p2 {
        for z in [k.clone(), -&k] {
            let pz = p * &z;
            let n = b + &p2 * &z * &z;
            if n.is_zero() {
                continue;
            }
            for u in signed_divisors(&n) {
                let v = &n / &u;
                if (&u - &pz).is_multiple_of(&two) && (&v - &pz).is_multiple_of(&three) {
                    return Some(vec![(u - &pz) / &two, (v - &pz) / &three, z]);
                }
            }
        }
        k += 1;
    }
    box_search(f, b, &p2, &SearchConfig::default()).ok().flatten()
}

/// Solves `6xy + 2p xz + 3p yz = b` for `p >= 5` prime to 6.
pub fn solve_prop2(p: &BigInt, b: &BigInt) -> Result<SolveReport, SolveError> {
    let f = factored_form(p)?;
    let a = if b.is_zero() {
        zeros(3)
    } else if b + p * p == BigInt::zero() {
        factored_fallback(&f, p, b).ok_or_else(|| SolveError::Unknown {
            radius: p * p,
            reason: UnknownReason::NotFound,
        })?
    } else {
        factored_main(p, b)
    };
    SolveReport::verified(&f, b, a, Method::Factored, None)
}

/// Every constructive method whose preconditions `f` meets, in dispatch order.
pub fn classify(f: &MultilinearForm) -> Vec<Method> {
    let profile = f.coprimality_profile();
    let coprime = profile.overall_gcd.is_one();
    let pairwise = coprime && profile.pairwise_coprime;
    Method::PRIORITY
        .into_iter()
        .filter(|m| match m {
            Method::Linear => f.degree() == 1,
            Method::Quadratic => f.degree() == 2 && pairwise,
            Method::PairwiseCoprime => pairwise,
            Method::CoprimePair => f.n() == f.degree() + 1 && profile.has_coprime_pair,
            Method::Factored => factored_parameter(f).is_some(),
            Method::Product | Method::Search => false,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AutoOptions {
    /// Search radius for the fallback; defaults to [`general_bound`].
    pub radius: Option<BigInt>,
    pub search: SearchConfig,
}

/// Largest radius whose full box of prefixes fits in the budget.
fn budget_radius(n: usize, budget: u64) -> Option<BigInt> {
    if n <= 1 {
        return None;
    }
    let side = BigInt::from(budget).nth_root((n - 1) as u32);
    Some(if side.is_zero() { BigInt::zero() } else { (side - 1) / 2 })
}

fn search_fallback(f: &MultilinearForm, b: &BigInt, opts: &AutoOptions) -> Result<SolveReport, SolveError> {
    let gcd = f.coprimality_profile().overall_gcd;
    if !b.is_multiple_of(&gcd) {
        return Err(SolveError::Unrepresentable { b: b.clone(), gcd });
    }
    let requested = opts
        .radius
        .clone()
        .or_else(|| general_bound(f, b))
        .unwrap_or_else(|| b.abs());
    let radius = match budget_radius(f.n(), opts.search.budget) {
        Some(cap) if cap < requested => {
            log::info!("search radius {requested} capped to {cap} by the budget");
            cap
        }
        _ => requested,
    };
    match box_search(f, b, &radius, &opts.search) {
        Ok(Some(a)) => SolveReport::verified(f, b, a, Method::Search, Some(radius)),
        Ok(None) => Err(SolveError::Unknown {
            radius,
            reason: UnknownReason::NotFound,
        }),
        Err(OracleError::BudgetExceeded { .. }) | Err(OracleError::InvalidModulus(_)) => Err(SolveError::Unknown {
            radius,
            reason: UnknownReason::Budget,
        }),
    }
}

/// Runs one specific method. Preconditions are always checked.
pub fn solve_with(
    f: &MultilinearForm,
    b: &BigInt,
    method: Method,
    opts: &AutoOptions,
) -> Result<SolveReport, SolveError> {
    match method {
        Method::Linear => solve_linear(f, b),
        Method::Quadratic => solve_prop4(f, b),
        Method::PairwiseCoprime => solve_thm1a(f, b),
        Method::CoprimePair => solve_thm1b(f, b),
        Method::Factored => {
            let p = factored_parameter(f)
                .ok_or_else(|| SolveError::Precondition("form is not 6x1x2 + 2p x1x3 + 3p x2x3".into()))?;
            solve_prop2(&p, b)
        }
        Method::Search => search_fallback(f, b, opts),
        Method::Product => Err(SolveError::Precondition(
            "products of linear forms are solved through detforms".into(),
        )),
    }
}

/// First applicable constructive method, else bounded exhaustive search.
pub fn solve_auto(f: &MultilinearForm, b: &BigInt, opts: &AutoOptions) -> Result<SolveReport, SolveError> {
    let method = classify(f).first().copied().unwrap_or(Method::Search);
    solve_with(f, b, method, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlinalg::gcd_all;
    use proptest::prelude::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| big(x)).collect()
    }

    fn form(s: &str) -> MultilinearForm {
        s.parse().unwrap()
    }

    #[test]
    fn pairwise_coprime_examples() {
        let r = solve_thm1a(&form("x1*x2"), &big(7)).unwrap();
        assert_eq!(r.solution(), ints(&[7, 1]));
        assert_eq!(r.bound_value(), Some(&big(7 * 32)));
        assert_eq!(r.within_bound(), Some(true));

        let r = solve_thm1a(&form("2*x1*x2 + 3*x3*x4"), &big(5)).unwrap();
        assert_eq!(r.solution(), ints(&[-5, 1, 5, 1]));

        let r = solve_thm1a(&form("2*x1*x2 + 3*x1*x3 + 5*x2*x3"), &big(4)).unwrap();
        assert_eq!(r.solution(), ints(&[9, -1, 1]));
        assert_eq!(r.method().tag(), "thm1a");

        let r = solve_thm1a(&form("x1*x2 - x1*x3"), &big(0)).unwrap();
        assert_eq!(r.solution(), ints(&[0, 0, 0]));
    }

    #[test]
    fn pairwise_coprime_rejects_bad_input() {
        assert_eq!(
            solve_thm1a(&form("2*x1*x2 + 4*x3*x4"), &big(1)),
            Err(SolveError::NotCoprime { gcd: big(2) })
        );
        match solve_thm1a(&form("6*x1*x2 + 10*x1*x3 + 15*x2*x3"), &big(1)) {
            Err(SolveError::NotPairwiseCoprime { first, second }) => {
                assert_eq!(first.indices(), &[1, 2]);
                assert_eq!(second.indices(), &[1, 3]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn coprime_pair_examples() {
        let f = form("5*x1*x2 + 3*x1*x3 + 2*x2*x3");
        let r = solve_thm1b(&f, &big(1)).unwrap();
        assert_eq!(f.evaluate(&ints(&[13, 2, -3])).unwrap(), big(1));
        assert_eq!(f.evaluate(r.solution()).unwrap(), big(1));
        assert_eq!(r.within_bound(), Some(true));

        assert_eq!(
            solve_thm1b(&form("3*x1 + 5*x2"), &big(1)).unwrap().solution(),
            ints(&[2, -1])
        );
        assert_eq!(solve_thm1b(&f, &big(0)).unwrap().solution(), ints(&[0, 0, 0]));
        assert!(matches!(
            solve_thm1b(&form("x1*x2 + x3*x4"), &big(1)),
            Err(SolveError::Precondition(_))
        ));
        assert_eq!(
            solve_thm1b(&form("6*x1*x2 + 10*x1*x3 + 15*x2*x3"), &big(1)),
            Err(SolveError::NoCoprimePair)
        );
    }

    #[test]
    fn coprime_pair_handles_missing_monomials() {
        // only two of the four degree-3 monomials in four variables
        let f = form("4*x1*x2*x3 + 9*x2*x3*x4");
        for b in [-7, 1, 12] {
            let r = solve_thm1b(&f, &big(b)).unwrap();
            assert_eq!(r.within_bound(), Some(true));
        }
        let g = form("6*x1*x2*x3 + 10*x1*x2*x4 + 15*x1*x3*x4 + 7*x2*x3*x4");
        let r = solve_thm1b(&g, &big(-3)).unwrap();
        assert_eq!(g.evaluate(r.solution()).unwrap(), big(-3));
    }

    #[test]
    fn linear_examples() {
        assert_eq!(
            solve_linear(&form("3*x1 + 5*x2"), &big(1)).unwrap().solution(),
            ints(&[2, -1])
        );
        let f = form("6*x1 + 10*x2 + 15*x3");
        assert_eq!(f.evaluate(&ints(&[1, 1, -1])).unwrap(), big(1));
        let r = solve_linear(&f, &big(1)).unwrap();
        assert_eq!(r.bound_value(), None);
        assert_eq!(
            solve_linear(&form("4*x1 + 6*x2"), &big(3)),
            Err(SolveError::Unrepresentable { b: big(3), gcd: big(2) })
        );
        assert_eq!(
            solve_linear(&form("4*x1 + 6*x2"), &big(4)).unwrap().evaluation(),
            &big(4)
        );
        assert_eq!(solve_linear(&form("-x1"), &big(4)).unwrap().solution(), ints(&[-4]));
    }

    #[test]
    fn quadratic_examples() {
        let r = solve_prop4(&form("2*x1*x2 + 3*x1*x3 + 5*x2*x3"), &big(4)).unwrap();
        assert_eq!(r.solution(), ints(&[9, -1, 1]));
        assert_eq!(r.bound_value(), Some(&big(129)));

        let r = solve_prop4(&form("x1*x2 + x3*x4"), &big(9)).unwrap();
        assert_eq!(r.bound_value(), Some(&big(10)));
        assert_eq!(r.within_bound(), Some(true));

        let r = solve_prop4(&form("3*x1*x2 + 7*x1*x3"), &big(-11)).unwrap();
        assert_eq!(r.within_bound(), Some(true));
        assert_eq!(solve_prop4(&form("x1*x2"), &big(0)).unwrap().solution(), ints(&[0, 0]));
        assert!(matches!(
            solve_prop4(&form("x1*x2*x3"), &big(1)),
            Err(SolveError::Precondition(_))
        ));
    }

    #[test]
    fn factored_examples() {
        assert_eq!(solve_prop2(&big(5), &big(1)).unwrap().solution(), ints(&[4, -1, 1]));
        assert_eq!(solve_prop2(&big(5), &big(-25)).unwrap().solution(), ints(&[-5, 5, 5]));
        assert_eq!(solve_prop2(&big(7), &big(0)).unwrap().solution(), ints(&[0, 0, 0]));
        for p in [6, 3, 1, 9] {
            assert!(matches!(
                solve_prop2(&big(p), &big(1)),
                Err(SolveError::Precondition(_))
            ));
        }
        for p in [7, 11, 13] {
            let r = solve_prop2(&big(p), &big(-p * p)).unwrap();
            assert_eq!(r.evaluation(), &big(-p * p));
        }
    }

    #[test]
    fn factored_branch_uses_unit_z() {
        for p in [5i64, 7, 11, 13, 25, 35, 49] {
            for b in -100..=100 {
                if b == -p * p || b == 0 {
                    continue;
                }
                let r = solve_prop2(&big(p), &big(b)).unwrap();
                let a = r.solution();
                assert!(a[2].abs().is_one());
                let lhs = (&a[0] * 2 + &a[2] * p) * (&a[1] * 3 + &a[2] * p);
                assert_eq!(lhs, big(b + p * p));
            }
        }
    }

    #[test]
    fn classify_examples() {
        use Method::*;
        assert_eq!(classify(&form("6*x1*x2 + 10*x1*x3 + 15*x2*x3")), vec![Factored]);
        assert_eq!(factored_parameter(&form("6*x1*x2 + 10*x1*x3 + 15*x2*x3")), Some(big(5)));
        assert_eq!(classify(&form("2*x1*x2 + 3*x3*x4")), vec![Quadratic, PairwiseCoprime]);
        assert_eq!(
            classify(&form("5*x1*x2 + 3*x1*x3 + 2*x2*x3")),
            vec![Quadratic, PairwiseCoprime, CoprimePair]
        );
        assert_eq!(classify(&form("x1*x2")), vec![Quadratic, PairwiseCoprime]);
        assert_eq!(classify(&form("6*x1*x2 + 6*x1*x3 + 9*x2*x3")), vec![]);
        assert_eq!(factored_parameter(&form("6*x1*x2 + 18*x1*x3 + 27*x2*x3")), None);
    }

    #[test]
    fn auto_examples() {
        let opts = AutoOptions::default();
        let r = solve_auto(&form("6*x1*x2 + 10*x1*x3 + 15*x2*x3"), &big(1), &opts).unwrap();
        assert_eq!(r.method(), Method::Factored);
        assert_eq!(r.solution(), ints(&[4, -1, 1]));
        assert_eq!(
            solve_auto(&form("x1*x2"), &big(0), &opts).unwrap().solution(),
            ints(&[0, 0])
        );
        assert_eq!(
            solve_auto(&form("4*x1 + 6*x2"), &big(3), &opts),
            Err(SolveError::Unrepresentable { b: big(3), gcd: big(2) })
        );

        let hard = form("6*x1*x2 + 6*x1*x3 + 9*x2*x3");
        assert_eq!(
            solve_auto(&hard, &big(1), &opts),
            Err(SolveError::Unrepresentable { b: big(1), gcd: big(3) })
        );
        let r = solve_auto(&hard, &big(21), &opts).unwrap();
        assert_eq!(r.method(), Method::Search);
        assert_eq!(r.within_bound(), Some(true));

        let no_pair = form("6*x1*x2*x3 + 10*x1*x2*x4 + 15*x1*x3*x4");
        let r = solve_auto(
            &no_pair,
            &big(1),
            &AutoOptions {
                radius: Some(big(3)),
                ..opts.clone()
            },
        )
        .unwrap();
        assert_eq!(no_pair.evaluate(r.solution()).unwrap(), big(1));

        let tiny = AutoOptions {
            radius: Some(big(0)),
            ..opts
        };
        assert_eq!(
            solve_auto(&no_pair, &big(1), &tiny),
            Err(SolveError::Unknown {
                radius: big(0),
                reason: UnknownReason::NotFound
            })
        );
    }

    #[test]
    fn forced_methods_check_preconditions() {
        let opts = AutoOptions::default();
        let f = form("2*x1*x2 + 3*x3*x4");
        let r = solve_with(&f, &big(5), "thm1a".parse().unwrap(), &opts).unwrap();
        assert_eq!(r.solution(), ints(&[-5, 1, 5, 1]));
        assert!(solve_with(&f, &big(5), Method::Factored, &opts).is_err());
        assert!(solve_with(&f, &big(5), Method::Linear, &opts).is_err());
        assert!("thm9".parse::<Method>().is_err());
    }

    #[test]
    fn budget_caps_radius() {
        assert_eq!(budget_radius(3, 100), Some(big(4)));
        assert_eq!(budget_radius(2, 0), Some(big(0)));
        assert_eq!(budget_radius(1, 5), None);
    }

    fn coefficient() -> impl Strategy<Value = i64> {
        (1i64..=9, any::<bool>()).prop_map(|(c, neg)| if neg { -c } else { c })
    }

    /// Random pairwise coprime form: up to `max_terms` distinct `d`-subsets
    /// of `1..=n` with coefficients drawn so each new one is coprime to all
    /// previous ones.
    fn pairwise_form(n: usize, d: usize, max_terms: usize) -> impl Strategy<Value = MultilinearForm> {
        let subsets = proptest::sample::subsequence((1..=n).collect::<Vec<_>>(), d);
        (
            proptest::collection::vec(subsets, 1..=max_terms),
            proptest::collection::vec(coefficient(), max_terms),
        )
            .prop_map(move |(sets, coefs)| {
                let mut terms: Vec<(Vec<usize>, BigInt)> = Vec::new();
                for (set, c) in sets.into_iter().zip(coefs) {
                    if terms.iter().any(|(s, _)| *s == set) {
                        continue;
                    }
                    let c = big(c);
                    if terms.iter().all(|(_, x)| x.gcd(&c).is_one()) {
                        terms.push((set, c));
                    }
                }
                // a unit coefficient makes the whole form coprime
                if !gcd_all(terms.iter().map(|(_, c)| c)).is_one() {
                    terms[0].1 = terms[0].1.signum();
                }
                MultilinearForm::new(n, terms).unwrap()
            })
    }

    fn nonzero_b() -> impl Strategy<Value = BigInt> {
        (-50i64..=50).prop_filter("nonzero", |b| *b != 0).prop_map(big)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn pairwise_coprime_sound_and_bounded(
            f in (1usize..=6).prop_flat_map(|n| (1..=n).prop_flat_map(move |d| pairwise_form(n, d, 6))),
            b in nonzero_b(),
        ) {
            let r = solve_thm1a(&f, &b).unwrap();
            prop_assert_eq!(f.evaluate(r.solution()).unwrap(), b.clone());
            prop_assert_eq!(r.within_bound(), Some(true));
        }

        #[test]
        fn quadratic_sound_and_bounded(f in (2usize..=6).prop_flat_map(|n| pairwise_form(n, 2, 8)), b in -50i64..=50) {
            let b = big(b);
            let r = solve_prop4(&f, &b).unwrap();
            prop_assert_eq!(f.evaluate(r.solution()).unwrap(), b);
            prop_assert_eq!(r.within_bound(), Some(true));
        }

        #[test]
        fn coprime_pair_sound_and_bounded(
            d in 1usize..=5,
            coefs in proptest::collection::vec(-9i64..=9, 6),
            b in -50i64..=50,
        ) {
            let n = d + 1;
            let terms = (1..=n).map(|k| ((1..=n).filter(|&v| v != k).collect::<Vec<_>>(), big(coefs[k - 1])));
            let f = MultilinearForm::new(n, terms);
            prop_assume!(f.is_ok());
            let f = f.unwrap();
            prop_assume!(f.n() == n && f.coprimality_profile().has_coprime_pair);
            let b = big(b);
            let r = solve_thm1b(&f, &b).unwrap();
            prop_assert_eq!(f.evaluate(r.solution()).unwrap(), b);
            prop_assert_eq!(r.within_bound(), Some(true));
        }

        #[test]
        fn linear_sound(coefs in proptest::collection::vec(-30i64..=30, 1..=5), b in -100i64..=100) {
            let f = MultilinearForm::new(coefs.len(), coefs.iter().enumerate().map(|(i, &c)| (vec![i + 1], big(c))));
            prop_assume!(f.is_ok());
            let f = f.unwrap();
            let b = big(b);
            match solve_linear(&f, &b) {
                Ok(r) => prop_assert_eq!(f.evaluate(r.solution()).unwrap(), b),
                Err(SolveError::Unrepresentable { gcd, .. }) => {
                    prop_assert!(!b.is_multiple_of(&gcd));
                    prop_assert_eq!(gcd, f.coprimality_profile().overall_gcd);
                }
                Err(e) => prop_assert!(false, "unexpected {e}"),
            }
        }

        #[test]
        fn factored_sound(p in (5i64..200).prop_filter("prime to 6", |p| p % 2 != 0 && p % 3 != 0), b in -1000i64..=1000) {
            let r = solve_prop2(&big(p), &big(b)).unwrap();
            prop_assert_eq!(r.evaluation(), &big(b));
        }

        #[test]
        fn base_cases_are_sharp(c in prop_oneof![Just(1i64), Just(-1i64)], f2 in coefficient(), b in nonzero_b()) {
            let single = MultilinearForm::new(3, [(vec![1, 3], big(c))]).unwrap();
            let r = solve_thm1a(&single, &b).unwrap();
            prop_assert_eq!(r.sup_norm(), b.abs().max(BigInt::one()));

            let f1 = big(2 * f2.signum() + 1);
            prop_assume!(f1.gcd(&big(f2)).is_one());
            let two = MultilinearForm::new(4, [(vec![1, 2], f1), (vec![3, 4], big(f2))]).unwrap();
            let r = solve_thm1a(&two, &b).unwrap();
            prop_assert!(r.sup_norm() <= b.abs() * two.sup_norm());
        }
    }
}
