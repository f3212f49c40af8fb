use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::Identity;
use crate::error::{Error, Result};
use crate::scalar::{mean, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Rank 1 is the smallest value.
    Ascending,
    /// Rank 1 is the largest value.
    Descending,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry<T> {
    pub identity: Identity,
    pub value: T,
    pub rank: T,
}

/// Ranked values, ordered by rank then label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankVector<T> {
    pub direction: Direction,
    pub entries: Vec<RankEntry<T>>,
}

impl<T: Scalar> RankVector<T> {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn rank_of(&self, label: &str) -> Option<T> {
        self.entries.iter().find(|e| e.identity.label == label).map(|e| e.rank)
    }
}

fn by_value<T: Scalar>(a: T, b: T) -> Ordering {
    a.partial_cmp(&b).expect("values checked for NaN")
}

/// Ranks `entries` with tied values sharing the average of their ranks.
pub fn rank_values<T: Scalar>(entries: &[(Identity, T)], direction: Direction) -> Result<RankVector<T>> {
    if entries.is_empty() {
        return Err(Error::Domain("nothing to rank".into()));
    }
    if let Some((id, _)) = entries.iter().find(|(_, v)| v.is_nan()) {
        return Err(Error::Domain(format!("NaN value for '{}'", id.label)));
    }
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|&i, &j| {
        let v = by_value(entries[i].1, entries[j].1);
        let v = if direction == Direction::Descending { v.reverse() } else { v };
        v.then_with(|| entries[i].0.label.cmp(&entries[j].0.label))
    });

    let mut out = Vec::with_capacity(entries.len());
    let mut start = 0;
    while start < order.len() {
        let value = entries[order[start]].1;
        let mut end = start + 1;
        while end < order.len() && entries[order[end]].1 == value {
            end += 1;
        }
        // positions start+1 ..= end share their mean
        let rank = T::from_count(start + 1 + end) / T::lit(2.0);
        for &i in &order[start..end] {
            out.push(RankEntry {
                identity: entries[i].0.clone(),
                value: entries[i].1,
                rank,
            });
        }
        start = end;
    }
    Ok(RankVector { direction, entries: out })
}

/// Pearson correlation of two rank vectors matched by identity (Spearman's rho).
pub fn rank_correlation<T: Scalar>(a: &RankVector<T>, b: &RankVector<T>) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::Domain(format!(
            "rank vectors cover different stocks ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let b_ranks: BTreeMap<&Identity, T> = b.entries.iter().map(|e| (&e.identity, e.rank)).collect();
    let mut xs = Vec::with_capacity(a.len());
    let mut ys = Vec::with_capacity(a.len());
    for e in &a.entries {
        let r = b_ranks
            .get(&e.identity)
            .ok_or_else(|| Error::Domain(format!("'{}' missing from second ranking", e.identity.label)))?;
        xs.push(e.rank);
        ys.push(*r);
    }
    let (mx, my) = (mean(&xs), mean(&ys));
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    let mut syy = T::zero();
    for (&x, &y) in xs.iter().zip(&ys) {
        sxy = sxy + (x - mx) * (y - my);
        sxx = sxx + (x - mx) * (x - mx);
        syy = syy + (y - my) * (y - my);
    }
    if sxx == T::zero() || syy == T::zero() {
        return Err(Error::DegenerateInput("all ranks tied".into()));
    }
    if xs == ys {
        return Ok(T::one());
    }
    let r = sxy / (sxx.sqrt() * syy.sqrt());
    Ok(r.max(-T::one()).min(T::one()))
}

/// The `k` highest and `k` lowest entries of a ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremeSlice<T> {
    /// Highest values first.
    pub top: Vec<RankEntry<T>>,
    /// Lowest values first.
    pub bottom: Vec<RankEntry<T>>,
}

/// Top and bottom `round(fraction * N)` entries (half-up, at least one).
/// Ties are broken by label.
pub fn extreme_slice<T: Scalar>(r: &RankVector<T>, fraction: f64) -> Result<ExtremeSlice<T>> {
    if r.is_empty() {
        return Err(Error::Domain("empty ranking".into()));
    }
    if !(fraction > 0.0 && fraction <= 0.5) {
        return Err(Error::Domain(format!("fraction {fraction} outside (0, 0.5]")));
    }
    let n = r.len();
    let k = ((fraction * n as f64 + 0.5).floor() as usize).clamp(1, n);
    let mut desc: Vec<&RankEntry<T>> = r.entries.iter().collect();
    desc.sort_by(|a, b| by_value(b.value, a.value).then_with(|| a.identity.label.cmp(&b.identity.label)));
    let mut asc: Vec<&RankEntry<T>> = r.entries.iter().collect();
    asc.sort_by(|a, b| by_value(a.value, b.value).then_with(|| a.identity.label.cmp(&b.identity.label)));
    Ok(ExtremeSlice {
        top: desc.into_iter().take(k).cloned().collect(),
        bottom: asc.into_iter().take(k).cloned().collect(),
    })
}
