//! `(G0 x G1) ⋊ <α>` for `G0 = G1` the sequences in a cyclic group `F`
//! vanishing at all large coordinates, with `α(f, g)_i = (f_{i+1}, g_{i-1})`.
//! Elements are stored with finite support.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cos::{big_pow, Algebraic, CosHandle, Decision, GroupInstance};
use crate::error::{Error, Result};
use crate::profile::TruncationProfile;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExampleGroup {
    order: u32,
}

/// `(g, α^shift)` with `g = (first, second)`; maps hold nonzero coordinates only.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ExampleElement {
    pub first: BTreeMap<i64, u32>,
    pub second: BTreeMap<i64, u32>,
    pub shift: i64,
}

impl ExampleElement {
    pub fn alpha_power(n: i64) -> Self {
        ExampleElement {
            shift: n,
            ..Default::default()
        }
    }

    /// Largest coordinate in either support, if any.
    pub fn support_max(&self) -> Option<i64> {
        self.first.keys().chain(self.second.keys()).max().copied()
    }
}

pub fn build_example_group(order: u32) -> Result<ExampleGroup> {
    if order < 2 {
        return Err(Error::OrderTooSmall(order));
    }
    Ok(ExampleGroup { order })
}

fn product_params(u: &CosHandle) -> Result<(i64, i64)> {
    match u {
        CosHandle::Algebraic(Algebraic::SupportProduct { first, second }) => Ok((*first, *second)),
        CosHandle::Stabilizer(_) => Err(Error::IncompatibleInstances),
    }
}

impl ExampleGroup {
    pub fn order(&self) -> u32 {
        self.order
    }

    fn add(&self, x: &mut BTreeMap<i64, u32>, y: &BTreeMap<i64, u32>) {
        for (&i, &v) in y {
            let e = x.entry(i).or_insert(0);
            *e = (*e + v) % self.order;
            if *e == 0 {
                x.remove(&i);
            }
        }
    }

    fn negate(&self, x: &BTreeMap<i64, u32>) -> BTreeMap<i64, u32> {
        x.iter()
            .map(|(&i, &v)| (i, (self.order - v) % self.order))
            .filter(|&(_, v)| v != 0)
            .collect()
    }

    /// `α^n` on the normal subgroup: first coordinates move down by `n`, second up by `n`.
    fn alpha(&self, n: i64, g: &ExampleElement) -> (BTreeMap<i64, u32>, BTreeMap<i64, u32>) {
        (
            g.first.iter().map(|(&i, &v)| (i - n, v)).collect(),
            g.second.iter().map(|(&i, &v)| (i + n, v)).collect(),
        )
    }

    /// A random element with support in `[lo, hi]` and the given shift.
    pub fn random_element(
        &self,
        rng: &mut impl Rng,
        lo: i64,
        hi: i64,
        shift: i64,
    ) -> ExampleElement {
        let mut e = ExampleElement {
            shift,
            ..Default::default()
        };
        for i in lo..=hi {
            let a = rng.random_range(0..self.order);
            let b = rng.random_range(0..self.order);
            if a != 0 {
                e.first.insert(i, a);
            }
            if b != 0 {
                e.second.insert(i, b);
            }
        }
        e
    }

    /// A reproducible sample `{(g_i, α^{±n_i})}` used by reports and tests.
    pub fn sample_elements(&self, shifts: &[i64], seed: u64) -> Vec<ExampleElement> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        shifts
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                if i == 0 {
                    ExampleElement::alpha_power(n)
                } else {
                    self.random_element(&mut rng, -3, 3, n)
                }
            })
            .collect()
    }

    pub fn product_index(&self, n: i64, m: i64, n2: i64, m2: i64) -> BigUint {
        big_pow(
            self.order as u64,
            ((n - n2).max(0) + (m - m2).max(0)) as u64,
        )
    }
}

impl GroupInstance for ExampleGroup {
    type Element = ExampleElement;

    fn name(&self) -> String {
        format!("example:{}", self.order)
    }

    fn identity(&self) -> ExampleElement {
        ExampleElement::default()
    }

    fn compose(&self, a: &ExampleElement, b: &ExampleElement) -> ExampleElement {
        let (bf, bs) = self.alpha(a.shift, b);
        let mut first = a.first.clone();
        let mut second = a.second.clone();
        self.add(&mut first, &bf);
        self.add(&mut second, &bs);
        ExampleElement {
            first,
            second,
            shift: a.shift + b.shift,
        }
    }

    fn inverse(&self, a: &ExampleElement) -> ExampleElement {
        let (f, s) = self.alpha(-a.shift, a);
        ExampleElement {
            first: self.negate(&f),
            second: self.negate(&s),
            shift: -a.shift,
        }
    }

    fn validate_handle(&self, u: &CosHandle) -> Result<()> {
        product_params(u).map(|_| ())
    }

    // The normal subgroup is abelian, so conjugating by (g, α^n) acts on these
    // subgroups through α^n alone.
    fn act(&self, a: &ExampleElement, u: &CosHandle) -> Result<CosHandle> {
        let (n, m) = product_params(u)?;
        Ok(CosHandle::product(n - a.shift, m + a.shift))
    }

    fn index(&self, u: &CosHandle, v: &CosHandle) -> Result<BigUint> {
        let (n, m) = product_params(u)?;
        let (n2, m2) = product_params(v)?;
        Ok(self.product_index(n, m, n2, m2))
    }

    fn intersect(&self, u: &CosHandle, v: &CosHandle) -> Result<CosHandle> {
        let (n, m) = product_params(u)?;
        let (n2, m2) = product_params(v)?;
        Ok(CosHandle::product(n.min(n2), m.min(m2)))
    }

    fn is_subgroup(&self, v: &CosHandle, u: &CosHandle) -> Result<bool> {
        let (n, m) = product_params(u)?;
        let (n2, m2) = product_params(v)?;
        Ok(n2 <= n && m2 <= m)
    }

    fn closed_form_scale(&self, a: &ExampleElement) -> Option<BigUint> {
        Some(big_pow(self.order as u64, a.shift.unsigned_abs()))
    }

    fn base_handle(&self, _a: &ExampleElement, _profile: &TruncationProfile) -> Result<CosHandle> {
        Ok(CosHandle::product(0, 0))
    }

    fn candidate_family(
        &self,
        _a: &ExampleElement,
        radius: usize,
        _profile: &TruncationProfile,
    ) -> Result<Vec<CosHandle>> {
        let r = radius as i64;
        Ok((-r..=r)
            .flat_map(|n| (-r..=r).map(move |m| CosHandle::product(n, m)))
            .collect())
    }

    fn index_constant(
        &self,
        a: &ExampleElement,
        b: &ExampleElement,
        _profile: &TruncationProfile,
    ) -> Result<BigUint> {
        Ok(big_pow(
            self.order as u64,
            a.shift.unsigned_abs().max(b.shift.unsigned_abs()),
        ))
    }

    // U-- is the increasing union of α^{-k}(U-), a coordinate subgroup
    // (G0 x 0, 0 x G1 or U itself), hence closed.
    fn tidy_below(&self, _a: &ExampleElement, u: &CosHandle) -> Decision {
        match u {
            CosHandle::Algebraic(Algebraic::SupportProduct { .. }) => Decision::Decided(true),
            CosHandle::Stabilizer(_) => Decision::NotDecidable,
        }
    }

    fn format_element(&self, a: &ExampleElement) -> String {
        let fmt = |m: &BTreeMap<i64, u32>| {
            m.iter()
                .map(|(i, v)| format!("{i}:{v}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        if a.first.is_empty() && a.second.is_empty() {
            format!("(id, a^{})", a.shift)
        } else {
            format!("(({}|{}), a^{})", fmt(&a.first), fmt(&a.second), a.shift)
        }
    }

    fn format_handle(&self, u: &CosHandle) -> String {
        match u {
            CosHandle::Algebraic(Algebraic::SupportProduct { first, second }) => {
                format!("U{first}xU{second}")
            }
            CosHandle::Stabilizer(_) => "unsupported handle".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cos::index;

    #[test]
    fn one_step_index_is_order() {
        let g = build_example_group(2).unwrap();
        let u0 = CosHandle::product(0, 0);
        let a = ExampleElement::alpha_power(1);
        let au = g.act(&a, &u0).unwrap();
        assert_eq!(au, CosHandle::product(-1, 1));
        assert_eq!(index(&g, &au, &u0).unwrap(), BigUint::from(2u32));
        assert!(matches!(
            build_example_group(1),
            Err(Error::OrderTooSmall(1))
        ));
    }

    #[test]
    fn conjugation_depends_only_on_shift() {
        let g = build_example_group(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u0 = CosHandle::product(0, 0);
        for n in -3..=3 {
            let e = g.random_element(&mut rng, -4, 4, n);
            assert_eq!(g.act(&e, &u0).unwrap(), CosHandle::product(-n, n));
        }
    }

    #[test]
    fn inverse_and_identity() {
        let g = build_example_group(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in -2..=2 {
            let e = g.random_element(&mut rng, -3, 3, n);
            assert_eq!(g.compose(&e, &g.inverse(&e)), g.identity());
            assert_eq!(g.compose(&g.inverse(&e), &e), g.identity());
        }
    }
}
