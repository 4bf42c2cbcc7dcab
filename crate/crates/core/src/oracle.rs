//! Exhaustive search and modular obstruction certificates.
//!
//! These routines do not rely on any of the constructive solvers and serve as
//! an independent check on them. All searches are deterministic: the box
//! `[-R, R]^n` is walked as an odometer with the leftmost coordinate most
//! significant, and the lexicographically smallest hit is returned no matter
//! how the work is split across threads.
//!
//! Budgets are explicit. Running out of budget is reported as
//! [`OracleError::BudgetExceeded`], never as "no solution".

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exec::Execution;
use crate::form::{MultilinearForm, ProductForm};
use crate::intlinalg::IntMatrix;

/// Default cap on evaluations per search.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("search needs {needed} evaluations, budget is {budget}")]
    BudgetExceeded { needed: String, budget: u64 },
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Maximum number of evaluations (box search) or residue vectors
    /// (modular enumeration).
    pub budget: u64,
    pub execution: Execution,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: DEFAULT_BUDGET,
            execution: Execution::default(),
        }
    }
}

impl SearchConfig {
    pub fn with_budget(budget: u64) -> Self {
        SearchConfig {
            budget,
            ..Default::default()
        }
    }

    pub fn sequential(self) -> Self {
        SearchConfig {
            execution: Execution::Sequential,
            ..self
        }
    }
}

/// Polynomial whose values the oracle can search and reduce modulo `M`.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    Form(&'a MultilinearForm),
    Product(&'a ProductForm),
}

impl<'a> From<&'a MultilinearForm> for Target<'a> {
    fn from(f: &'a MultilinearForm) -> Self {
        Target::Form(f)
    }
}

impl<'a> From<&'a ProductForm> for Target<'a> {
    fn from(p: &'a ProductForm) -> Self {
        Target::Product(p)
    }
}

impl Target<'_> {
    pub fn arity(&self) -> usize {
        match self {
            Target::Form(f) => f.n(),
            Target::Product(p) => p.n(),
        }
    }

    pub fn evaluate(&self, a: &[BigInt]) -> BigInt {
        match self {
            Target::Form(f) => f.evaluate(a),
            Target::Product(p) => p.evaluate(a),
        }
        .expect("assignment sized to arity")
    }

    fn reduce_mod(&self, m: u64) -> ModPoly {
        let red = |c: &BigInt| c.mod_floor(&BigInt::from(m)).to_u64().unwrap();
        match self {
            Target::Form(f) => ModPoly::Sum(
                f.monomials()
                    .map(|(set, c)| (set.indices().iter().map(|i| i - 1).collect(), red(c)))
                    .collect(),
            ),
            Target::Product(p) => ModPoly::Product(
                p.coefficient_rows()
                    .iter()
                    .map(|row| row.iter().map(red).collect())
                    .collect(),
            ),
        }
    }
}

/// Integer types the box search can run in. `i128` is used when the value
/// range provably fits; `BigInt` otherwise. Both give identical results.
trait SearchInt: Clone + Send + Sync + Integer + Signed + FromPrimitive {
    fn from_big(x: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
}

impl SearchInt for i128 {
    fn from_big(x: &BigInt) -> Option<Self> {
        x.to_i128()
    }

    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl SearchInt for BigInt {
    fn from_big(x: &BigInt) -> Option<Self> {
        Some(x.clone())
    }

    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

const FAST_PATH_LIMIT_BITS: u64 = 120;

fn fits_fast_path(magnitude: &BigInt) -> bool {
    magnitude.bits() < FAST_PATH_LIMIT_BITS
}

fn budget_error(needed: &BigInt, budget: u64) -> OracleError {
    OracleError::BudgetExceeded {
        needed: needed.to_string(),
        budget,
    }
}

/// Walks `[-R, R]^coords` in lexicographic order, returning the first `check`
/// hit among the first `budget` points.
///
/// Work is split on the leading coordinate; each slice knows its ordinal
/// offset, so the budget cut-off is the same in sequential and parallel runs.
fn odometer_search<T, C>(coords: usize, radius: &T, cfg: &SearchConfig, check: C) -> Result<Option<Vec<T>>, OracleError>
where
    T: SearchInt,
    C: Fn(&[T]) -> Option<Vec<T>> + Sync + Send,
{
    let side: BigInt = radius.to_big() * BigInt::from(2u8) + BigInt::one();
    let total: BigInt = num_traits::pow(side.clone(), coords);
    let budget = BigInt::from(cfg.budget);
    if coords == 0 {
        if cfg.budget == 0 {
            return Err(budget_error(&total, cfg.budget));
        }
        return Ok(check(&[]));
    }
    let slice: BigInt = num_traits::pow(side.clone(), coords - 1);
    let slices_in_budget = budget.div_ceil(&slice);
    let n_slices = side.clone().min(slices_in_budget).to_u64().expect("bounded by budget");
    let neg_radius = -radius.clone();

    let hit = cfg.execution.find_map_first(0..n_slices, |c| {
        let start: BigInt = &slice * BigInt::from(c);
        let limit = (&budget - start)
            .min(slice.clone())
            .to_u64()
            .expect("bounded by budget");
        let mut point = vec![neg_radius.clone(); coords];
        point[0] = neg_radius.clone() + T::from_u64(c).expect("slice index fits");
        for _ in 0..limit {
            if let Some(sol) = check(&point) {
                return Some(sol);
            }
            for pos in (1..coords).rev() {
                if point[pos] < *radius {
                    point[pos] = point[pos].clone() + T::one();
                    break;
                }
                point[pos] = neg_radius.clone();
            }
        }
        None
    });
    match hit {
        Some(sol) => Ok(Some(sol)),
        None if total <= budget => Ok(None),
        None => Err(budget_error(&total, cfg.budget)),
    }
}

fn monomial<T: SearchInt>(coef: &T, idx: &[usize], point: &[T]) -> T {
    idx.iter().fold(coef.clone(), |acc, &i| acc * point[i].clone())
}

fn form_search<T: SearchInt>(
    f: &MultilinearForm,
    b: &BigInt,
    radius: &BigInt,
    cfg: &SearchConfig,
) -> Result<Option<Vec<BigInt>>, OracleError> {
    // F = x_n * A(x') + B(x'): for each prefix x' the last coordinate is
    // determined, so only (2R+1)^(n-1) prefixes are visited.
    let n = f.n();
    let last = n;
    let mut with_last: Vec<(Vec<usize>, T)> = Vec::new();
    let mut without_last: Vec<(Vec<usize>, T)> = Vec::new();
    for (set, c) in f.monomials() {
        let c = T::from_big(c).expect("checked by caller");
        let idx: Vec<usize> = set.indices().iter().filter(|&&i| i != last).map(|i| i - 1).collect();
        if set.contains(last) {
            with_last.push((idx, c));
        } else {
            without_last.push((idx, c));
        }
    }
    let b = T::from_big(b).expect("checked by caller");
    let r = T::from_big(radius).expect("checked by caller");
    let found = odometer_search(n - 1, &r, cfg, |prefix: &[T]| {
        let a = with_last
            .iter()
            .fold(T::zero(), |acc, (idx, c)| acc + monomial(c, idx, prefix));
        let rest = without_last
            .iter()
            .fold(T::zero(), |acc, (idx, c)| acc + monomial(c, idx, prefix));
        let x_last = if a.is_zero() {
            if rest != b {
                return None;
            }
            -r.clone()
        } else {
            let (q, rem) = (b.clone() - rest).div_rem(&a);
            if !rem.is_zero() || q.abs() > r {
                return None;
            }
            q
        };
        let mut sol = prefix.to_vec();
        sol.push(x_last);
        Some(sol)
    })?;
    Ok(found.map(|v| v.iter().map(T::to_big).collect()))
}

/// Lexicographically smallest `a` with `|a| <= radius` and `F(a) = b`.
pub fn box_search(
    f: &MultilinearForm,
    b: &BigInt,
    radius: &BigInt,
    cfg: &SearchConfig,
) -> Result<Option<Vec<BigInt>>, OracleError> {
    assert!(!radius.is_negative(), "radius must be nonnegative");
    let worst = BigInt::from(f.len()) * f.sup_norm() * num_traits::pow(radius.clone(), f.degree()) + b.abs() + radius;
    if fits_fast_path(&worst) {
        form_search::<i128>(f, b, radius, cfg)
    } else {
        form_search::<BigInt>(f, b, radius, cfg)
    }
}

fn product_search<T: SearchInt>(
    p: &ProductForm,
    b: &BigInt,
    radius: &BigInt,
    cfg: &SearchConfig,
) -> Result<Option<Vec<BigInt>>, OracleError> {
    let rows: Vec<Vec<T>> = p
        .coefficient_rows()
        .iter()
        .map(|row| row.iter().map(|c| T::from_big(c).expect("checked by caller")).collect())
        .collect();
    let b = T::from_big(b).expect("checked by caller");
    let r = T::from_big(radius).expect("checked by caller");
    let found = odometer_search(p.n(), &r, cfg, |point: &[T]| {
        let value = rows.iter().fold(T::one(), |acc, row| {
            let l = row
                .iter()
                .zip(point)
                .fold(T::zero(), |s, (c, x)| s + c.clone() * x.clone());
            acc * l
        });
        (value == b).then(|| point.to_vec())
    })?;
    Ok(found.map(|v| v.iter().map(T::to_big).collect()))
}

/// Lexicographically smallest `a` with `|a| <= radius` and `prod L_i(a) = b`.
pub fn product_box_search(
    p: &ProductForm,
    b: &BigInt,
    radius: &BigInt,
    cfg: &SearchConfig,
) -> Result<Option<Vec<BigInt>>, OracleError> {
    assert!(!radius.is_negative(), "radius must be nonnegative");
    let max_coef = p
        .coefficient_rows()
        .iter()
        .flatten()
        .map(|c| c.abs())
        .max()
        .unwrap_or_else(BigInt::zero);
    let factor = BigInt::from(p.n()) * max_coef * radius + 1;
    let worst = num_traits::pow(factor, p.factors().len()) + b.abs() + radius;
    if fits_fast_path(&worst) {
        product_search::<i128>(p, b, radius, cfg)
    } else {
        product_search::<BigInt>(p, b, radius, cfg)
    }
}

fn system_search<T: SearchInt>(
    a: &IntMatrix,
    c: &[BigInt],
    radius: &BigInt,
    cfg: &SearchConfig,
) -> Result<Option<Vec<BigInt>>, OracleError> {
    let rows: Vec<Vec<T>> = a
        .to_rows()
        .iter()
        .map(|row| row.iter().map(|x| T::from_big(x).expect("checked by caller")).collect())
        .collect();
    let c: Vec<T> = c.iter().map(|x| T::from_big(x).expect("checked by caller")).collect();
    let r = T::from_big(radius).expect("checked by caller");
    let found = odometer_search(a.cols(), &r, cfg, |point: &[T]| {
        rows.iter()
            .zip(&c)
            .all(|(row, target)| {
                row.iter()
                    .zip(point)
                    .fold(T::zero(), |s, (x, y)| s + x.clone() * y.clone())
                    == *target
            })
            .then(|| point.to_vec())
    })?;
    Ok(found.map(|v| v.iter().map(T::to_big).collect()))
}

/// Lexicographically smallest `x` with `|x| <= radius` and `A x = c`.
pub fn system_box_search(
    a: &IntMatrix,
    c: &[BigInt],
    radius: &BigInt,
    cfg: &SearchConfig,
) -> Result<Option<Vec<BigInt>>, OracleError> {
    assert!(!radius.is_negative(), "radius must be nonnegative");
    assert_eq!(c.len(), a.rows(), "right-hand side length");
    let worst = BigInt::from(a.cols()) * a.max_abs_entry() * radius
        + c.iter().map(|x| x.abs()).max().unwrap_or_default()
        + radius;
    if fits_fast_path(&worst) {
        system_search::<i128>(a, c, radius, cfg)
    } else {
        system_search::<BigInt>(a, c, radius, cfg)
    }
}

/// Solution of least sup-norm within `radius`; among those, the
/// lexicographically smallest.
pub fn minimal_representation(
    f: &MultilinearForm,
    b: &BigInt,
    radius: u64,
    cfg: &SearchConfig,
) -> Result<Option<Vec<BigInt>>, OracleError> {
    // every solution of norm r lies in the radius-r box, and nothing smaller
    // exists once radius r-1 came up empty
    for r in 0..=radius {
        if let Some(a) = box_search(f, b, &BigInt::from(r), cfg)? {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

enum ModPoly {
    /// Sum of coefficient * product of (0-based) variables.
    Sum(Vec<(Vec<usize>, u64)>),
    /// Product of linear forms given by coefficient rows.
    Product(Vec<Vec<u64>>),
}

impl ModPoly {
    fn eval(&self, a: &[u64], m: u64) -> u64 {
        let m = m as u128;
        match self {
            ModPoly::Sum(terms) => terms.iter().fold(0u128, |acc, (idx, c)| {
                let t = idx.iter().fold(*c as u128, |t, &i| t * a[i] as u128 % m);
                (acc + t) % m
            }) as u64,
            ModPoly::Product(rows) => rows.iter().fold(1u128 % m, |acc, row| {
                let l = row
                    .iter()
                    .zip(a)
                    .fold(0u128, |s, (&c, &x)| (s + c as u128 * x as u128) % m);
                acc * l % m
            }) as u64,
        }
    }
}

/// Certificate that `F(a) = b` has no integer solution: no residue vector
/// modulo `modulus` reaches `target_residue`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ObstructionCertificate {
    pub modulus: u64,
    pub target_residue: u64,
}

impl ObstructionCertificate {
    /// Re-enumerates all residue vectors; true iff none hits the target.
    pub fn verify<'a>(&self, target: impl Into<Target<'a>>) -> bool {
        let target = target.into();
        let cfg = SearchConfig {
            budget: u64::MAX,
            execution: Execution::Sequential,
        };
        matches!(residue_hit(&target, self.modulus, self.target_residue, &cfg), Ok(false))
    }
}

fn residue_hit(target: &Target<'_>, m: u64, residue: u64, cfg: &SearchConfig) -> Result<bool, OracleError> {
    let n = target.arity();
    let total = (m as u128).checked_pow(n as u32);
    match total {
        Some(t) if t <= cfg.budget as u128 => {}
        _ => return Err(budget_error(&num_traits::pow(BigInt::from(m), n), cfg.budget)),
    }
    let poly = target.reduce_mod(m);
    let slice = m.pow(n as u32 - 1);
    let hit = cfg.execution.find_map_first(0..m, |lead| {
        let mut a = vec![0u64; n];
        a[0] = lead;
        for _ in 0..slice {
            if poly.eval(&a, m) == residue {
                return Some(());
            }
            for pos in (1..n).rev() {
                a[pos] += 1;
                if a[pos] < m {
                    break;
                }
                a[pos] = 0;
            }
        }
        None
    });
    Ok(hit.is_some())
}

/// Certificate at modulus `m` if `F(a) ≡ b (mod m)` has no solution.
pub fn modular_obstruction<'a>(
    target: impl Into<Target<'a>>,
    b: &BigInt,
    m: u64,
    cfg: &SearchConfig,
) -> Result<Option<ObstructionCertificate>, OracleError> {
    if m < 2 {
        return Err(OracleError::InvalidModulus(m));
    }
    let target = target.into();
    let residue = b.mod_floor(&BigInt::from(m)).to_u64().unwrap();
    if residue_hit(&target, m, residue, cfg)? {
        Ok(None)
    } else {
        Ok(Some(ObstructionCertificate {
            modulus: m,
            target_residue: residue,
        }))
    }
}

/// Smallest modulus in `2..=m_max` giving a certificate.
pub fn find_obstruction<'a>(
    target: impl Into<Target<'a>>,
    b: &BigInt,
    m_max: u64,
    cfg: &SearchConfig,
) -> Result<Option<ObstructionCertificate>, OracleError> {
    if m_max < 2 {
        return Err(OracleError::InvalidModulus(m_max));
    }
    let target = target.into();
    for m in 2..=m_max {
        if let Some(cert) = modular_obstruction(target, b, m, cfg)? {
            return Ok(Some(cert));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnknownReason {
    /// The whole box was searched without a hit.
    NotFound,
    /// The search budget ran out first.
    Budget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ProbeOutcome {
    Solved {
        #[serde(with = "crate::decimal::vec")]
        solution: Vec<BigInt>,
    },
    Obstructed {
        certificate: ObstructionCertificate,
    },
    Unknown {
        reason: UnknownReason,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeEntry {
    #[serde(with = "crate::decimal")]
    pub b: BigInt,
    #[serde(flatten)]
    pub outcome: ProbeOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeConfig {
    pub radius: BigInt,
    pub m_max: u64,
    pub search: SearchConfig,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub entries: Vec<ProbeEntry>,
    #[serde(with = "crate::decimal")]
    pub radius: BigInt,
    pub modulus_ceiling: u64,
}

/// Classifies one target value: obstruction first, then bounded search.
pub fn probe_one(f: &MultilinearForm, b: &BigInt, cfg: &ProbeConfig) -> ProbeEntry {
    let outcome = 'outcome: {
        if cfg.m_max >= 2 {
            match find_obstruction(f, b, cfg.m_max, &cfg.search) {
                Ok(Some(certificate)) => break 'outcome ProbeOutcome::Obstructed { certificate },
                Ok(None) => {}
                Err(e) => log::debug!("obstruction search for b={b} stopped: {e}"),
            }
        }
        match box_search(f, b, &cfg.radius, &cfg.search) {
            Ok(Some(solution)) => ProbeOutcome::Solved { solution },
            Ok(None) => ProbeOutcome::Unknown {
                reason: UnknownReason::NotFound,
            },
            Err(_) => ProbeOutcome::Unknown {
                reason: UnknownReason::Budget,
            },
        }
    };
    ProbeEntry { b: b.clone(), outcome }
}

/// Probes every `b` in `b_min..=b_max`.
pub fn probe(f: &MultilinearForm, b_min: &BigInt, b_max: &BigInt, cfg: &ProbeConfig) -> ProbeReport {
    if !f.coprimality_profile().overall_gcd.is_one() {
        log::warn!("probing a form whose coefficients are not coprime: {f}");
    }
    let mut entries = Vec::new();
    let mut b = b_min.clone();
    while &b <= b_max {
        entries.push(probe_one(f, &b, cfg));
        b += 1;
    }
    ProbeReport {
        entries,
        radius: cfg.radius.clone(),
        modulus_ceiling: cfg.m_max,
    }
}
