//! Subsets of the transmitter index set `{1..K}` and families of them.
//!
//! A [`SubsetMask`] stores element `i` (1-based, as printed) in bit `i - 1`.
//! All conversions between the two conventions live in this module.
//!
//! The central construction is the *compact form* of a family: given an
//! ordered list of `t` subsets, its `i`-th compact member holds every
//! element that appears in at least `i` of the original subsets. The
//! compact form is a nested chain with the same presence vector as the
//! original family.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported ground-set size.
pub const MAX_K: usize = 16;

fn check_k(k: usize) -> Result<()> {
    if k == 0 || k > MAX_K {
        Err(Error::GroundSize(k))
    } else {
        Ok(())
    }
}

/// A subset of `{1..k}` stored as a bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetMask {
    bits: u32,
    k: u8,
}

impl SubsetMask {
    pub fn new(bits: u32, k: usize) -> Result<Self> {
        check_k(k)?;
        if bits >> k != 0 {
            return Err(Error::MaskOutOfRange { bits, k });
        }
        Ok(Self { bits, k: k as u8 })
    }

    pub fn empty(k: usize) -> Result<Self> {
        Self::new(0, k)
    }

    pub fn full(k: usize) -> Result<Self> {
        check_k(k)?;
        Ok(Self {
            bits: low_bits(k),
            k: k as u8,
        })
    }

    /// Builds a mask from 1-based element labels. Repeated labels are allowed.
    pub fn from_elements(elements: &[usize], k: usize) -> Result<Self> {
        check_k(k)?;
        let mut bits = 0u32;
        for &e in elements {
            if e == 0 || e > k {
                return Err(Error::ElementOutOfRange { element: e, k });
            }
            bits |= 1 << (e - 1);
        }
        Ok(Self { bits, k: k as u8 })
    }

    /// Parses `"1,2,3"` style element lists; `""`, `"{}"` and `"∅"` give the empty set.
    pub fn parse(text: &str, k: usize) -> Result<Self> {
        let trimmed = text
            .trim()
            .trim_start_matches('{')
            .trim_end_matches('}')
            .trim();
        if trimmed.is_empty() || trimmed == "∅" {
            return Self::empty(k);
        }
        let elements = trimmed
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad element {s:?} in {text:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_elements(&elements, k)
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn k(self) -> usize {
        self.k as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Membership test for a 1-based element label.
    #[inline]
    pub fn contains(self, element: usize) -> bool {
        element >= 1 && element <= self.k() && self.bits & (1 << (element - 1)) != 0
    }

    /// Membership test for a 0-based position.
    #[inline]
    pub fn contains_index(self, index: usize) -> bool {
        index < self.k() && self.bits & (1 << index) != 0
    }

    /// Sorted 1-based element labels.
    pub fn elements(self) -> Vec<usize> {
        (0..self.k())
            .filter(|&i| self.contains_index(i))
            .map(|i| i + 1)
            .collect()
    }

    pub fn union(self, other: Self) -> Self {
        debug_assert_eq!(self.k, other.k);
        Self {
            bits: self.bits | other.bits,
            k: self.k,
        }
    }

    pub fn intersection(self, other: Self) -> Self {
        debug_assert_eq!(self.k, other.k);
        Self {
            bits: self.bits & other.bits,
            k: self.k,
        }
    }

    pub fn complement(self) -> Self {
        Self {
            bits: !self.bits & low_bits(self.k()),
            k: self.k,
        }
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.bits & !other.bits == 0
    }

    /// The `1 x K` 0/1 indicator vector.
    pub fn indicator_vector(self) -> Vec<u8> {
        (0..self.k())
            .map(|i| self.contains_index(i) as u8)
            .collect()
    }

    /// Every nonempty subset of `{1..k}` in ascending mask order.
    pub fn all_nonempty(k: usize) -> Result<impl Iterator<Item = SubsetMask>> {
        check_k(k)?;
        let kk = k as u8;
        Ok((1..=low_bits(k)).map(move |bits| SubsetMask { bits, k: kk }))
    }

    /// Every subset of `{1..k}`, including the empty one.
    pub fn all(k: usize) -> Result<impl Iterator<Item = SubsetMask>> {
        check_k(k)?;
        let kk = k as u8;
        Ok((0..=low_bits(k)).map(move |bits| SubsetMask { bits, k: kk }))
    }
}

#[inline]
fn low_bits(k: usize) -> u32 {
    if k >= 32 {
        u32::MAX
    } else {
        (1u32 << k) - 1
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("∅");
        }
        let parts: Vec<String> = self.elements().iter().map(|e| e.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Per-element appearance counts of a family, indexed by 0-based position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PresenceVector {
    counts: Vec<u32>,
}

impl PresenceVector {
    pub fn new(counts: Vec<u32>) -> Result<Self> {
        check_k(counts.len())?;
        Ok(Self { counts })
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn k(&self) -> usize {
        self.counts.len()
    }

    pub fn t_max(&self) -> u32 {
        t_max(self)
    }

    pub fn is_zero(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    /// `{ e : counts[e] >= level }` for `level >= 1`.
    pub fn threshold(&self, level: u32) -> SubsetMask {
        let bits = self
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c >= level)
            .fold(0u32, |acc, (i, _)| acc | (1 << i));
        SubsetMask {
            bits,
            k: self.k() as u8,
        }
    }

    /// The nonempty part of the compact form: thresholds at levels `1..=t_max`.
    pub fn chain(&self) -> Vec<SubsetMask> {
        (1..=self.t_max())
            .map(|level| self.threshold(level))
            .collect()
    }
}

impl fmt::Display for PresenceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.counts.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// An ordered list of subsets of a common ground set. Duplicates and empty
/// members are kept.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SetFamily {
    k: usize,
    members: Vec<SubsetMask>,
}

impl SetFamily {
    pub fn new(k: usize, members: Vec<SubsetMask>) -> Result<Self> {
        check_k(k)?;
        if let Some(m) = members.iter().find(|m| m.k() != k) {
            return Err(Error::GroundMismatch {
                expected: k,
                got: m.k(),
            });
        }
        Ok(Self { k, members })
    }

    /// Convenience constructor from 1-based element lists.
    pub fn from_lists(k: usize, lists: &[&[usize]]) -> Result<Self> {
        let members = lists
            .iter()
            .map(|l| SubsetMask::from_elements(l, k))
            .collect::<Result<Vec<_>>>()?;
        Self::new(k, members)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn members(&self) -> &[SubsetMask] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The family with its empty members removed, order otherwise kept.
    pub fn without_empty(&self) -> SetFamily {
        SetFamily {
            k: self.k,
            members: self
                .members
                .iter()
                .copied()
                .filter(|m| !m.is_empty())
                .collect(),
        }
    }

    pub fn presence_vector(&self) -> PresenceVector {
        presence_vector(self)
    }

    pub fn compact_form(&self) -> Result<SetFamily> {
        compact_form_direct(self)
    }
}

impl fmt::Display for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.members.iter().map(|m| m.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

pub fn indicator_vector(set: SubsetMask) -> Vec<u8> {
    set.indicator_vector()
}

pub fn presence_vector(family: &SetFamily) -> PresenceVector {
    let mut counts = vec![0u32; family.k];
    for m in &family.members {
        for (i, c) in counts.iter_mut().enumerate() {
            if m.contains_index(i) {
                *c += 1;
            }
        }
    }
    PresenceVector { counts }
}

pub fn t_max(presence: &PresenceVector) -> u32 {
    presence.counts.iter().copied().max().unwrap_or(0)
}

/// Compact form by thresholds: member `i` holds the elements present at
/// least `i` times. Output has the same length `t` as the input.
pub fn compact_form_direct(family: &SetFamily) -> Result<SetFamily> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let presence = presence_vector(family);
    let members = (1..=family.len() as u32)
        .map(|i| presence.threshold(i))
        .collect();
    Ok(SetFamily {
        k: family.k,
        members,
    })
}

/// Compact form built one member at a time from the compact form of the
/// prefix of length `t - 1`.
pub fn compact_form_recursive(family: &SetFamily) -> Result<SetFamily> {
    let (first, rest) = family.members.split_first().ok_or(Error::EmptyFamily)?;
    let mut chain = vec![*first];
    for &next in rest {
        let prev = &chain;
        let t = prev.len() + 1;
        let mut grown = Vec::with_capacity(t);
        grown.push(prev[0].union(next));
        for i in 1..t - 1 {
            grown.push(prev[i].union(prev[i - 1].intersection(next)));
        }
        grown.push(prev[t - 2].intersection(next));
        chain = grown;
    }
    Ok(SetFamily {
        k: family.k,
        members: chain,
    })
}
