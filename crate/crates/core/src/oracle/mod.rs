//! Exhaustive ground-truth solvers and stability certifiers.
//!
//! Every search runs in `f64` and keeps the candidates within a relative
//! `1e-9` of the running best; the survivors are then compared exactly in
//! rational arithmetic, so ties and strict inequalities are decided without
//! rounding.

mod maxcut;
mod multiway;
mod sparsest;
mod weak;

use std::cmp::Ordering;
use std::fmt;

use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::graph::{exact, rational_zero, Rational};

pub use maxcut::{brute_max_cut, maxcut_stability_report};
pub use multiway::{brute_multiway_cut, multiway_stability_report};
pub use sparsest::{brute_sparsest_cut, SparsestCutInstance, SparsestCutResult};
pub use weak::{
    perturbation_cross_check, weak_stability_check, CrossCheck, WeakStabilityResult,
};

/// Size caps for the exhaustive searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OracleLimits {
    /// Largest `n` for which cuts are enumerated.
    pub max_cut_vertices: usize,
    /// Largest number of non-terminal vertices for multiway enumeration.
    pub multiway_free_vertices: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_cut_vertices: 24,
            multiway_free_vertices: 12,
        }
    }
}

impl OracleLimits {
    pub(crate) fn check_cut(&self, n: usize) -> crate::Result<()> {
        if n > self.max_cut_vertices || n > 63 {
            return Err(crate::Error::SizeCap {
                what: "n",
                value: n,
                cap: self.max_cut_vertices.min(63),
            });
        }
        Ok(())
    }
}

/// A value in `[0, +∞]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Margin {
    Finite(Rational),
    Infinite,
}

impl Margin {
    pub fn to_f64(&self) -> f64 {
        match self {
            Margin::Finite(r) => r.to_f64().unwrap_or(f64::INFINITY),
            Margin::Infinite => f64::INFINITY,
        }
    }

    /// Whether `gamma < margin`, decided exactly.
    pub fn exceeds(&self, gamma: f64) -> bool {
        match self {
            Margin::Infinite => true,
            Margin::Finite(r) => exact(gamma) < *r,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Margin::Infinite)
    }
}

impl PartialOrd for Margin {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Margin {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Margin::Infinite, Margin::Infinite) => Ordering::Equal,
            (Margin::Infinite, _) => Ordering::Greater,
            (_, Margin::Infinite) => Ordering::Less,
            (Margin::Finite(a), Margin::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Margin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Margin::Infinite => write!(f, "inf"),
            Margin::Finite(r) => write!(f, "{}", r.to_f64().unwrap_or(f64::NAN)),
        }
    }
}

/// Serialized as a JSON number, or the string `"inf"`.
impl Serialize for Margin {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Margin::Infinite => s.serialize_str("inf"),
            Margin::Finite(_) => s.serialize_f64(self.to_f64()),
        }
    }
}

/// Stability of the optimum of an instance against every competitor.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport<T> {
    pub optimum: T,
    pub optimum_value: f64,
    /// Minimum over competitors of `w(E* ∖ E') / w(E' ∖ E*)` in the
    /// cut-edge sense, with `x/0 = ∞` for `x > 0` and `0/0 = 0`.
    pub margin: Margin,
    /// A competitor attaining the margin; absent when the margin is infinite.
    pub witness: Option<T>,
    pub unique_optimum: bool,
}

impl<T> StabilityReport<T> {
    /// γ-stability is the strict condition `γ < margin`.
    pub fn is_stable(&self, gamma: f64) -> bool {
        self.margin.exceeds(gamma)
    }
}

const REL_SLACK: f64 = 1e-9;

fn float_ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        if num > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    } else {
        num / den
    }
}

/// Running minimum of `num/den` over keyed items, keeping every item that
/// could still tie the exact minimum.
pub(crate) struct RatioMin<K> {
    best: f64,
    items: Vec<(K, f64)>,
}

impl<K: Ord + Clone> RatioMin<K> {
    pub(crate) fn new() -> Self {
        Self {
            best: f64::INFINITY,
            items: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, key: impl FnOnce() -> K, num: f64, den: f64) {
        let r = float_ratio(num, den);
        if r.is_infinite() || r > self.best * (1.0 + REL_SLACK) {
            return;
        }
        self.items.push((key(), r));
        if r < self.best {
            self.best = r;
            if self.items.len() > 512 {
                self.prune();
            }
        }
    }

    fn prune(&mut self) {
        let bound = self.best * (1.0 + REL_SLACK);
        self.items.retain(|(_, r)| *r <= bound);
    }

    pub(crate) fn merge(mut self, other: Self) -> Self {
        self.best = self.best.min(other.best);
        self.items.extend(other.items);
        self.prune();
        self
    }

    /// Exact minimum and the smallest key attaining it; `Infinite` with no
    /// key when every ratio was infinite. `exact_parts` returns the exact
    /// numerator and denominator of a kept key.
    pub(crate) fn finish(
        mut self,
        exact_parts: impl Fn(&K) -> (Rational, Rational),
    ) -> (Margin, Option<K>) {
        self.prune();
        let mut best: Option<(Rational, K)> = None;
        for (k, _) in self.items {
            let (num, den) = exact_parts(&k);
            let r = if den.is_zero() { rational_zero() } else { num / den };
            let better = match &best {
                None => true,
                Some((br, bk)) => r < *br || (r == *br && k < *bk),
            };
            if better {
                best = Some((r, k));
            }
        }
        match best {
            None => (Margin::Infinite, None),
            Some((r, k)) => (Margin::Finite(r), Some(k)),
        }
    }
}

/// Running maximum (or minimum, with `minimize`) of a value over keyed items,
/// resolved exactly with the smallest key winning ties.
pub(crate) struct ValueBest<K> {
    minimize: bool,
    best: f64,
    items: Vec<(K, f64)>,
}

impl<K: Ord + Clone> ValueBest<K> {
    pub(crate) fn new(minimize: bool) -> Self {
        Self {
            minimize,
            best: if minimize {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            },
            items: Vec::new(),
        }
    }

    fn within(&self, v: f64) -> bool {
        let tol = REL_SLACK * self.best.abs();
        if self.minimize {
            v <= self.best + tol
        } else {
            v >= self.best - tol
        }
    }

    pub(crate) fn push(&mut self, key: impl FnOnce() -> K, v: f64) {
        if !self.within(v) {
            return;
        }
        self.items.push((key(), v));
        let improves = if self.minimize {
            v < self.best
        } else {
            v > self.best
        };
        if improves {
            self.best = v;
            if self.items.len() > 512 {
                self.prune();
            }
        }
    }

    fn prune(&mut self) {
        let items = std::mem::take(&mut self.items);
        self.items = items.into_iter().filter(|(_, v)| self.within(*v)).collect();
    }

    pub(crate) fn merge(mut self, other: Self) -> Self {
        let better = if self.minimize {
            other.best < self.best
        } else {
            other.best > self.best
        };
        if better {
            self.best = other.best;
        }
        self.items.extend(other.items);
        self.prune();
        self
    }

    /// The optimal key (smallest on exact ties), its exact value, and how many
    /// kept keys attain that exact value.
    pub(crate) fn finish(mut self, exact_value: impl Fn(&K) -> Rational) -> Option<(K, Rational, usize)> {
        self.prune();
        let mut best: Option<(Rational, K, usize)> = None;
        for (k, _) in self.items {
            let v = exact_value(&k);
            best = Some(match best {
                None => (v, k, 1),
                Some((bv, bk, c)) => {
                    let ord = if self.minimize { v.cmp(&bv) } else { bv.cmp(&v) };
                    match ord {
                        Ordering::Less => (v, k, 1),
                        Ordering::Equal => {
                            if k < bk {
                                (v, k, c + 1)
                            } else {
                                (bv, bk, c + 1)
                            }
                        }
                        Ordering::Greater => (bv, bk, c),
                    }
                }
            });
        }
        best.map(|(v, k, c)| (k, v, c))
    }
}

/// Splits `0..count` into chunks for parallel enumeration.
pub(crate) fn chunks(count: u64) -> Vec<(u64, u64)> {
    let pieces = (rayon::current_num_threads() as u64 * 4).max(1);
    let size = count.div_ceil(pieces).max(1 << 12);
    let mut out = Vec::new();
    let mut lo = 0;
    while lo < count {
        let hi = (lo + size).min(count);
        out.push((lo, hi));
        lo = hi;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_conventions() {
        let mut r = RatioMin::new();
        r.push(|| 1u32, 1.0, 0.0);
        let (m, w) = r.finish(|_| (exact(1.0), exact(0.0)));
        assert_eq!(m, Margin::Infinite);
        assert!(w.is_none());

        let mut r = RatioMin::new();
        r.push(|| 2u32, 3.0, 1.0);
        r.push(|| 1u32, 0.0, 0.0);
        let (m, w) = r.finish(|k| if *k == 1 { (exact(0.0), exact(0.0)) } else { (exact(3.0), exact(1.0)) });
        assert_eq!(m, Margin::Finite(exact(0.0)));
        assert_eq!(w, Some(1));
    }

    #[test]
    fn exact_tie_break_prefers_smallest_key() {
        let mut b = ValueBest::new(false);
        b.push(|| 3u32, 2.0);
        b.push(|| 1u32, 2.0);
        b.push(|| 2u32, 1.0);
        let (k, v, count) = b.finish(|k| if *k == 2 { exact(1.0) } else { exact(2.0) }).unwrap();
        assert_eq!((k, v, count), (1, exact(2.0), 2));
    }

    #[test]
    fn margin_strictness() {
        let m = Margin::Finite(exact(2.0));
        assert!(m.exceeds(1.5));
        assert!(!m.exceeds(2.0));
        assert!(Margin::Infinite.exceeds(1e300));
        assert!(Margin::Finite(exact(5.0)) > Margin::Finite(exact(4.0)));
    }
}
