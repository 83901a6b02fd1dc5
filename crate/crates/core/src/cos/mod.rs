//! Compact open subgroups, exact indices, the metric `d(U, V)`, scales and
//! tidiness checks.

use std::fmt::Debug;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::isometry::Isometry;
use crate::profile::TruncationProfile;

/// A compact open subgroup: the pointwise stabilizer of a finite vertex
/// tuple, or a closed-form subgroup of an algebraic instance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CosHandle {
    Stabilizer(Vec<Vertex>),
    Algebraic(Algebraic),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algebraic {
    /// `U_first x U_second`, where `U_N` is the set of sequences vanishing at
    /// every coordinate `>= N`.
    SupportProduct { first: i64, second: i64 },
}

impl CosHandle {
    /// Sorted, duplicate-free tuple stabilizer.
    pub fn stabilizer(mut vs: Vec<Vertex>) -> Result<CosHandle> {
        if vs.is_empty() {
            return Err(Error::InvariantViolation(
                "stabilizer tuple is empty".into(),
            ));
        }
        vs.sort();
        vs.dedup();
        Ok(CosHandle::Stabilizer(vs))
    }

    pub fn product(first: i64, second: i64) -> CosHandle {
        CosHandle::Algebraic(Algebraic::SupportProduct { first, second })
    }

    pub fn tuple(&self) -> Option<&[Vertex]> {
        match self {
            CosHandle::Stabilizer(vs) => Some(vs),
            CosHandle::Algebraic(_) => None,
        }
    }
}

/// Whether a closedness question could be settled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Decided(bool),
    NotDecidable,
}

/// A group acting on compact open subgroups by conjugation, with an exact index oracle.
pub trait GroupInstance: Send + Sync {
    type Element: Clone + Debug + PartialEq + Send + Sync;

    fn name(&self) -> String;
    fn identity(&self) -> Self::Element;
    /// `a * b`.
    fn compose(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn inverse(&self, a: &Self::Element) -> Self::Element;

    fn power(&self, a: &Self::Element, n: i64) -> Self::Element {
        let base = if n < 0 { self.inverse(a) } else { a.clone() };
        let mut acc = self.identity();
        let mut sq = base;
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.compose(&acc, &sq);
            }
            sq = self.compose(&sq, &sq);
            k >>= 1;
        }
        acc
    }

    fn validate_handle(&self, u: &CosHandle) -> Result<()>;
    /// `a U a^-1`.
    fn act(&self, a: &Self::Element, u: &CosHandle) -> Result<CosHandle>;
    /// `[U : U ∩ V]`.
    fn index(&self, u: &CosHandle, v: &CosHandle) -> Result<BigUint>;
    /// The handle of `U ∩ V`, when the family is closed under intersection.
    fn intersect(&self, u: &CosHandle, v: &CosHandle) -> Result<CosHandle>;
    /// Whether `V <= U`.
    fn is_subgroup(&self, v: &CosHandle, u: &CosHandle) -> Result<bool>;

    fn graph(&self) -> Option<&dyn Graph> {
        None
    }
    fn isometry<'a>(&'a self, _a: &Self::Element) -> Option<Box<dyn Isometry + 'a>> {
        None
    }

    /// Exact scale if the instance knows it in closed form.
    fn closed_form_scale(&self, _a: &Self::Element) -> Option<BigUint> {
        None
    }
    /// Default base of rays generated by `a`.
    fn base_handle(&self, a: &Self::Element, profile: &TruncationProfile) -> Result<CosHandle>;
    /// Fixed subgroup for the limit-formula cross-check.
    fn limit_handle(&self, a: &Self::Element, profile: &TruncationProfile) -> Result<CosHandle> {
        self.base_handle(a, profile)
    }
    /// Candidate family of the tidy search at the given radius.
    fn candidate_family(
        &self,
        a: &Self::Element,
        radius: usize,
        profile: &TruncationProfile,
    ) -> Result<Vec<CosHandle>>;
    /// `C` with `[a^n U : a^n U ∩ b^k V] <= C * s(a)^n / s(b)^k`-type truncation error for the default bases.
    fn index_constant(
        &self,
        a: &Self::Element,
        b: &Self::Element,
        profile: &TruncationProfile,
    ) -> Result<BigUint>;
    /// Closedness of `U--`.
    fn tidy_below(&self, _a: &Self::Element, _u: &CosHandle) -> Decision {
        Decision::NotDecidable
    }

    fn format_element(&self, a: &Self::Element) -> String;
    fn format_handle(&self, u: &CosHandle) -> String;
}

/// `ln` of a big integer, accurate to double precision.
pub fn ln_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64 bits");
    top.ln() + (shift as f64) * std::f64::consts::LN_2
}

/// `[U : U ∩ V]`.
pub fn index<I: GroupInstance>(inst: &I, u: &CosHandle, v: &CosHandle) -> Result<BigUint> {
    inst.validate_handle(u)?;
    inst.validate_handle(v)?;
    inst.index(u, v)
}

/// `d(U, V) = log([U : U ∩ V][V : U ∩ V])`, carried with both indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CosDistance {
    pub forward: BigUint,
    pub backward: BigUint,
    pub product: BigUint,
    pub log: f64,
}

impl CosDistance {
    fn new(forward: BigUint, backward: BigUint) -> Self {
        let product = &forward * &backward;
        let log = ln_big(&product);
        CosDistance {
            forward,
            backward,
            product,
            log,
        }
    }
}

pub fn cos_distance<I: GroupInstance>(
    inst: &I,
    u: &CosHandle,
    v: &CosHandle,
) -> Result<CosDistance> {
    Ok(CosDistance::new(index(inst, u, v)?, index(inst, v, u)?))
}

/// `([aU : aU ∩ U], [U : aU ∩ U])` and `d(aU, U)`.
pub fn displacement<I: GroupInstance>(
    inst: &I,
    a: &I::Element,
    u: &CosHandle,
) -> Result<CosDistance> {
    let au = inst.act(a, u)?;
    cos_distance(inst, &au, u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScaleMethod {
    ClosedForm,
    LimitFormula,
    TidySearch,
}

impl ScaleMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            ScaleMethod::ClosedForm => "ClosedForm",
            ScaleMethod::LimitFormula => "LimitFormula",
            ScaleMethod::TidySearch => "TidySearch",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaleEstimate {
    /// Exact for ClosedForm and TidySearch; the rounded N-th iterate for LimitFormula.
    pub exact: Option<BigUint>,
    pub approx: f64,
    pub method: ScaleMethod,
    pub window: usize,
    /// LimitFormula: iterates at `N-2, N-1, N`. TidySearch: best index per radius.
    pub iterates: Vec<f64>,
    /// TidySearch: a handle attaining the minimum.
    pub witness: Option<CosHandle>,
    /// TidySearch answers are minima over the declared family only.
    pub family_relative: bool,
}

impl ScaleEstimate {
    pub fn log(&self) -> f64 {
        match &self.exact {
            Some(v) => ln_big(v),
            None => self.approx.ln(),
        }
    }
}

/// Closed form if available, else the tidy search.
pub fn scale_estimate<I: GroupInstance>(
    inst: &I,
    a: &I::Element,
    profile: &TruncationProfile,
) -> Result<ScaleEstimate> {
    if let Some(v) = inst.closed_form_scale(a) {
        return Ok(ScaleEstimate {
            approx: v.to_f64().unwrap_or(f64::INFINITY),
            exact: Some(v),
            method: ScaleMethod::ClosedForm,
            window: profile.power_bound,
            iterates: Vec::new(),
            witness: None,
            family_relative: false,
        });
    }
    tidy_search(inst, a, profile)
}

pub fn scale_with_method<I: GroupInstance>(
    inst: &I,
    a: &I::Element,
    method: ScaleMethod,
    profile: &TruncationProfile,
) -> Result<ScaleEstimate> {
    match method {
        ScaleMethod::ClosedForm => {
            let v = inst
                .closed_form_scale(a)
                .ok_or_else(|| Error::Unsupported("no closed-form scale".into()))?;
            Ok(ScaleEstimate {
                approx: v.to_f64().unwrap_or(f64::INFINITY),
                exact: Some(v),
                method,
                window: profile.power_bound,
                iterates: Vec::new(),
                witness: None,
                family_relative: false,
            })
        }
        ScaleMethod::TidySearch => tidy_search(inst, a, profile),
        ScaleMethod::LimitFormula => {
            let u = inst.limit_handle(a, profile)?;
            limit_formula(inst, a, &u, profile.power_bound)
        }
    }
}

/// Minimal one-step index over the candidate family, grown by radius until
/// two consecutive radii agree.
pub fn tidy_search<I: GroupInstance>(
    inst: &I,
    a: &I::Element,
    profile: &TruncationProfile,
) -> Result<ScaleEstimate> {
    let mut history: Vec<f64> = Vec::new();
    let mut prev: Option<BigUint> = None;
    for r in 1..=profile.horizon {
        let family = inst.candidate_family(a, r, profile)?;
        let (best, witness) = family_minimum(inst, a, &family)?;
        history.push(best.to_f64().unwrap_or(f64::INFINITY));
        if prev.as_ref() == Some(&best) {
            return Ok(ScaleEstimate {
                approx: best.to_f64().unwrap_or(f64::INFINITY),
                exact: Some(best),
                method: ScaleMethod::TidySearch,
                window: r,
                iterates: history,
                witness: Some(witness),
                family_relative: true,
            });
        }
        prev = Some(best);
    }
    Err(Error::HorizonTooSmall(format!(
        "tidy search did not stabilize by radius {}",
        profile.horizon
    )))
}

fn family_minimum<I: GroupInstance>(
    inst: &I,
    a: &I::Element,
    family: &[CosHandle],
) -> Result<(BigUint, CosHandle)> {
    if family.is_empty() {
        return Err(Error::EmptySample);
    }
    let values: Vec<BigUint> = family
        .par_iter()
        .map(|u| {
            let au = inst.act(a, u)?;
            inst.index(&au, u)
        })
        .collect::<Result<_>>()?;
    let i = (0..family.len())
        .min_by(|&i, &j| values[i].cmp(&values[j]).then(i.cmp(&j)))
        .expect("nonempty");
    Ok((values[i].clone(), family[i].clone()))
}

/// `[a^n U : a^n U ∩ U]^(1/n)` for `n = 1..=N`; reports the last three iterates.
pub fn limit_formula<I: GroupInstance>(
    inst: &I,
    a: &I::Element,
    u: &CosHandle,
    n: usize,
) -> Result<ScaleEstimate> {
    let all = limit_iterates(inst, a, u, n)?;
    let last = *all.last().ok_or(Error::EmptySample)?;
    Ok(ScaleEstimate {
        exact: None,
        approx: last,
        method: ScaleMethod::LimitFormula,
        window: n,
        iterates: all[all.len().saturating_sub(3)..].to_vec(),
        witness: Some(u.clone()),
        family_relative: false,
    })
}

pub fn limit_iterates<I: GroupInstance>(
    inst: &I,
    a: &I::Element,
    u: &CosHandle,
    n: usize,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n);
    let mut cur = u.clone();
    for k in 1..=n {
        cur = inst.act(a, &cur)?;
        let idx = inst.index(&cur, u)?;
        out.push((ln_big(&idx) / k as f64).exp());
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TidyDisplacementReport {
    pub minimal: bool,
    pub displacement: CosDistance,
    pub family_minimum: BigUint,
    /// When minimal: whether the displacement product equals `s(a) s(a^-1)`.
    pub matches_scales: Option<bool>,
}

/// Whether `U` attains the minimal displacement over `candidates`.
pub fn tidy_displacement_check<I: GroupInstance>(
    inst: &I,
    a: &I::Element,
    u: &CosHandle,
    candidates: &[CosHandle],
    profile: &TruncationProfile,
) -> Result<TidyDisplacementReport> {
    let own = displacement(inst, a, u)?;
    let products: Vec<BigUint> = candidates
        .par_iter()
        .map(|c| displacement(inst, a, c).map(|d| d.product))
        .collect::<Result<_>>()?;
    let family_minimum = products
        .into_iter()
        .chain(std::iter::once(own.product.clone()))
        .min()
        .expect("nonempty");
    let minimal = own.product == family_minimum;
    let matches_scales = if minimal {
        let s = scale_estimate(inst, a, profile)?.exact;
        let t = scale_estimate(inst, &inst.inverse(a), profile)?.exact;
        match (s, t) {
            (Some(s), Some(t)) => Some(s * t == own.product),
            _ => None,
        }
    } else {
        None
    };
    Ok(TidyDisplacementReport {
        minimal,
        displacement: own,
        family_minimum,
        matches_scales,
    })
}

/// `U+` and `U-` truncated at `depth`: the intersections of `a^k U` over
/// `0 <= k <= depth` and `-depth <= k <= 0`.
pub fn truncated_plus_minus<I: GroupInstance>(
    inst: &I,
    a: &I::Element,
    u: &CosHandle,
    depth: usize,
) -> Result<(CosHandle, CosHandle)> {
    let inv = inst.inverse(a);
    let (mut plus, mut minus) = (u.clone(), u.clone());
    let (mut fwd, mut back) = (u.clone(), u.clone());
    for _ in 0..depth {
        fwd = inst.act(a, &fwd)?;
        back = inst.act(&inv, &back)?;
        plus = inst.intersect(&plus, &fwd)?;
        minus = inst.intersect(&minus, &back)?;
    }
    Ok((plus, minus))
}

/// Maximum depth accepted by [`tidy_above_check`].
pub const MAX_TIDY_DEPTH: usize = 64;

/// `U = U+ U-` at the given depth, decided by `[U : U+] = [U- : U- ∩ U+]`.
pub fn tidy_above_check<I: GroupInstance>(
    inst: &I,
    a: &I::Element,
    u: &CosHandle,
    depth: usize,
) -> Result<bool> {
    if depth > MAX_TIDY_DEPTH {
        return Err(Error::DepthInfeasible(depth));
    }
    inst.validate_handle(u)?;
    let (plus, minus) = truncated_plus_minus(inst, a, u, depth)?;
    Ok(inst.index(u, &plus)? == inst.index(&minus, &plus)?)
}

pub fn tidy_below_check<I: GroupInstance>(inst: &I, a: &I::Element, u: &CosHandle) -> Decision {
    inst.tidy_below(a, u)
}

/// `s(a) = 1` witnessed by a candidate with `a(U) <= U`.
pub fn has_invariant_candidate<I: GroupInstance>(
    inst: &I,
    a: &I::Element,
    family: &[CosHandle],
) -> Result<bool> {
    for u in family {
        if inst.is_subgroup(&inst.act(a, u)?, u)? {
            return Ok(true);
        }
    }
    Ok(false)
}

pub(crate) fn big_pow(base: u64, exp: u64) -> BigUint {
    num_traits::pow(BigUint::from(base), exp as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_big_matches_f64_and_large_values() {
        assert!((ln_big(&BigUint::from(12345u32)) - 12345f64.ln()).abs() < 1e-12);
        let big = big_pow(2, 5000) * BigUint::from(3u32);
        let expect = 5000.0 * std::f64::consts::LN_2 + 3f64.ln();
        assert!((ln_big(&big) - expect).abs() < 1e-9);
    }

    #[test]
    fn stabilizer_handles_are_canonical() {
        let a = CosHandle::stabilizer(vec![
            Vertex::single(2),
            Vertex::single(1),
            Vertex::single(2),
        ])
        .unwrap();
        assert_eq!(
            a,
            CosHandle::Stabilizer(vec![Vertex::single(1), Vertex::single(2)])
        );
        assert!(CosHandle::stabilizer(vec![]).is_err());
    }
}
