//! Completion procedures over a kernel lattice.
//!
//! [`complete`] is the plain pair completion: starting from a symmetric
//! lattice generating set, sums `f + g` of sign-incompatible pairs are reduced
//! by conformal subtraction and every nonzero remainder joins the working set.
//! At closure every lattice vector has a conformal decomposition into
//! working-set elements, so its `⊑`-minimal elements are the Graver basis.
//!
//! [`project_and_lift`] computes the same set one coordinate at a time and
//! supports per-coordinate bounds, returning only the Graver elements with
//! `|g_i| <= bound_i`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::entry::Entry;

/// Sign pattern of the first `active` coordinates of a vector as two bitsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Signs {
    pos: Vec<u64>,
    neg: Vec<u64>,
}

impl Signs {
    fn of<T: Entry>(v: &[T], active: usize) -> Self {
        let words = active.div_ceil(64).max(1);
        let mut pos = vec![0u64; words];
        let mut neg = vec![0u64; words];
        for (i, e) in v[..active].iter().enumerate() {
            if e.is_pos() {
                pos[i / 64] |= 1 << (i % 64);
            } else if e.is_neg() {
                neg[i / 64] |= 1 << (i % 64);
            }
        }
        Signs { pos, neg }
    }

    /// Necessary condition for `self ⊑ other`.
    #[inline]
    fn within(&self, other: &Signs) -> bool {
        self.pos.iter().zip(&other.pos).all(|(a, b)| a & !b == 0)
            && self.neg.iter().zip(&other.neg).all(|(a, b)| a & !b == 0)
    }

    /// Bitset of coordinates where the two vectors have opposite signs.
    #[inline]
    fn conflicts<'a>(&'a self, other: &'a Signs) -> impl Iterator<Item = u64> + 'a {
        self.pos
            .iter()
            .zip(&other.neg)
            .zip(self.neg.iter().zip(&other.pos))
            .map(|((a, b), (c, d))| (a & b) | (c & d))
    }
}

#[derive(Debug, Clone)]
struct Elem<T> {
    v: Vec<T>,
    signs: Signs,
    norm: T,
}

impl<T: Entry> Elem<T> {
    fn new(v: Vec<T>, active: usize) -> Option<Self> {
        let norm = l1(&v[..active])?;
        let signs = Signs::of(&v, active);
        Some(Elem { v, signs, norm })
    }

    /// `self ⊑ other` on the first `active` coordinates.
    #[inline]
    fn conformal_to(&self, other: &Elem<T>, active: usize) -> bool {
        self.norm <= other.norm
            && self.signs.within(&other.signs)
            && self.v[..active]
                .iter()
                .zip(&other.v[..active])
                .all(|(a, b)| {
                    if a.is_pos() {
                        b >= a
                    } else if a.is_neg() {
                        b <= a
                    } else {
                        true
                    }
                })
    }
}

fn l1<T: Entry>(v: &[T]) -> Option<T> {
    let mut acc = T::zero();
    for e in v {
        acc = acc.add(&e.abs()?)?;
    }
    Some(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Stop {
    /// Fixed-width arithmetic overflowed.
    Overflow,
    /// The working set grew past the configured limit.
    Limit,
}

/// Which candidate sums a completion run has to examine.
#[derive(Debug, Clone, Copy)]
enum Pairs {
    /// Every pair with a sign conflict somewhere in the active prefix.
    Incompatible,
    /// Pairs whose only sign conflict is the newly lifted coordinate.
    Lift { coord: usize },
}

impl Pairs {
    fn wanted(self, f: &Signs, g: &Signs) -> bool {
        match self {
            Pairs::Incompatible => f.conflicts(g).any(|w| w != 0),
            Pairs::Lift { coord } => {
                let (word, bit) = (coord / 64, 1u64 << (coord % 64));
                f.conflicts(g)
                    .enumerate()
                    .all(|(i, w)| if i == word { w == bit } else { w == 0 })
            }
        }
    }
}

struct Run<'a, T> {
    active: usize,
    pairs: Pairs,
    /// Upper bounds on `|v_i|` enforced on candidate sums (coordinates with
    /// `None` are free).
    bounds: &'a [Option<T>],
    limit: Option<usize>,
    basis: Vec<Elem<T>>,
    queue: BinaryHeap<Reverse<(T, usize, usize)>>,
}

impl<T: Entry> Run<'_, T> {
    fn sum(&self, i: usize, j: usize) -> Option<Vec<T>> {
        self.basis[i]
            .v
            .iter()
            .zip(&self.basis[j].v)
            .map(|(x, y)| x.add(y))
            .collect()
    }

    fn within_bounds(&self, v: &[T]) -> Result<bool, Stop> {
        for (e, b) in v.iter().zip(self.bounds) {
            if let Some(b) = b {
                if &e.abs().ok_or(Stop::Overflow)? > b {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn enqueue_pairs(&mut self, new: usize) -> Result<(), Stop> {
        for k in 0..new {
            if !self.pairs.wanted(&self.basis[k].signs, &self.basis[new].signs) {
                continue;
            }
            let s = self.sum(k, new).ok_or(Stop::Overflow)?;
            let norm = l1(&s[..self.active]).ok_or(Stop::Overflow)?;
            if norm.is_zero() || !self.within_bounds(&s)? {
                continue;
            }
            self.queue.push(Reverse((norm, k, new)));
        }
        Ok(())
    }

    /// Reduces `s` by subtracting basis elements conformal to it. One pass
    /// suffices: an element not conformal to `s` is not conformal to any
    /// remainder either, since remainders are conformal to `s`.
    fn normal_form(&self, mut s: Elem<T>) -> Result<Elem<T>, Stop> {
        for g in &self.basis {
            if s.norm.is_zero() {
                break;
            }
            if !g.conformal_to(&s, self.active) {
                continue;
            }
            let lambda = max_multiple(&g.v[..self.active], &s.v[..self.active]);
            let mut next = Vec::with_capacity(s.v.len());
            for (a, b) in s.v.iter().zip(&g.v) {
                let step = b.mul(&lambda).ok_or(Stop::Overflow)?;
                next.push(a.sub(&step).ok_or(Stop::Overflow)?);
            }
            s = Elem::new(next, self.active).ok_or(Stop::Overflow)?;
        }
        Ok(s)
    }

    fn add(&mut self, e: Elem<T>) -> Result<(), Stop> {
        self.basis.push(e);
        if let Some(limit) = self.limit {
            if self.basis.len() > limit {
                return Err(Stop::Limit);
            }
        }
        self.enqueue_pairs(self.basis.len() - 1)
    }

    /// Reduces `candidate` and keeps it if something nonzero remains.
    fn offer(&mut self, candidate: Elem<T>) -> Result<(), Stop> {
        let r = self.normal_form(candidate)?;
        if r.norm.is_zero() {
            return Ok(());
        }
        self.add(r)
    }

    fn close(&mut self) -> Result<(), Stop> {
        while let Some(Reverse((_, i, j))) = self.queue.pop() {
            let s = self.sum(i, j).ok_or(Stop::Overflow)?;
            let candidate = Elem::new(s, self.active).ok_or(Stop::Overflow)?;
            self.offer(candidate)?;
        }
        Ok(())
    }

    fn minimal(self) -> Vec<Vec<T>> {
        minimal_elements(self.basis, self.active)
    }
}

/// Largest `λ >= 1` with `λ g ⊑ s`, given `g ⊑ s`.
fn max_multiple<T: Entry>(g: &[T], s: &[T]) -> T {
    let mut best: Option<T> = None;
    for (a, b) in g.iter().zip(s) {
        if a.is_zero() {
            continue;
        }
        // same sign and |b| >= |a|, so truncating division gives |b| / |a|
        let q = b.div(a);
        best = Some(match best {
            Some(cur) if cur <= q => cur,
            _ => q,
        });
    }
    best.unwrap_or_else(T::zero)
}

fn negated<T: Entry>(a: &[T]) -> Option<Vec<T>> {
    a.iter().map(Entry::neg).collect()
}

/// Pair completion on all coordinates from `generators` (negations are added
/// here). Returns the `⊑`-minimal elements of the converged working set.
pub(crate) fn complete<T: Entry>(
    generators: &[Vec<T>],
    limit: Option<usize>,
) -> Result<Vec<Vec<T>>, Stop> {
    let cols = generators.first().map_or(0, Vec::len);
    let free = vec![None; cols];
    complete_prefix(generators, cols, &free, limit)
}

/// Pair completion comparing only the first `active` coordinates.
fn complete_prefix<T: Entry>(
    generators: &[Vec<T>],
    active: usize,
    bounds: &[Option<T>],
    limit: Option<usize>,
) -> Result<Vec<Vec<T>>, Stop> {
    let mut seeds = Vec::new();
    for g in generators {
        if g[..active].iter().all(Entry::is_zero) {
            continue;
        }
        seeds.push(Elem::new(g.clone(), active).ok_or(Stop::Overflow)?);
        let neg = negated(g).ok_or(Stop::Overflow)?;
        seeds.push(Elem::new(neg, active).ok_or(Stop::Overflow)?);
    }
    seeds.sort_by(|a, b| a.norm.cmp(&b.norm));

    let mut run = Run {
        active,
        pairs: Pairs::Incompatible,
        bounds,
        limit,
        basis: Vec::new(),
        queue: BinaryHeap::new(),
    };
    for s in seeds {
        run.offer(s)?;
        run.close()?;
    }
    Ok(run.minimal())
}

/// Graver elements of the lattice generated by `generators`, optionally
/// truncated to `|g_i| <= bounds[i]`.
///
/// The coordinates are first permuted so that the lattice projects
/// injectively onto a leading block of `rank` coordinates; `generators` must
/// already be in that order with the projection onto `0..rank` injective.
/// The Graver basis of that projection is found by pair completion, then one
/// coordinate at a time is lifted. A lift only needs sums of pairs that agree
/// in sign on the coordinates already processed and disagree on the new one,
/// and any sum violating a bound on processed coordinates can be dropped: a
/// bounded lattice vector decomposes conformally into elements that are all
/// bounded on those coordinates.
pub(crate) fn project_and_lift<T: Entry>(
    generators: &[Vec<T>],
    rank: usize,
    bounds: &[Option<T>],
    limit: Option<usize>,
) -> Result<Vec<Vec<T>>, Stop> {
    let cols = bounds.len();
    if rank == 0 {
        return Ok(Vec::new());
    }
    let unbounded = vec![None; cols];
    let mut current = complete_prefix(generators, rank, &unbounded, limit)?;
    current.retain(|v| fits(&v[..rank], &bounds[..rank]));

    for coord in rank..cols {
        let active = coord + 1;
        let mut sum_bounds: Vec<Option<T>> = bounds.to_vec();
        for b in sum_bounds.iter_mut().skip(coord) {
            *b = None;
        }
        let mut run = Run {
            active,
            pairs: Pairs::Lift { coord },
            bounds: &sum_bounds,
            limit,
            basis: Vec::new(),
            queue: BinaryHeap::new(),
        };
        // the lifted set is already pairwise incomparable
        let mut seeds: Vec<Elem<T>> = current
            .into_iter()
            .map(|v| Elem::new(v, active).ok_or(Stop::Overflow))
            .collect::<Result<_, _>>()?;
        seeds.sort_by(|a, b| a.norm.cmp(&b.norm));
        for s in seeds {
            run.add(s)?;
        }
        run.close()?;
        current = run.minimal();
        current.retain(|v| fits(&v[coord..active], &bounds[coord..active]));
    }
    Ok(current)
}

fn fits<T: Entry>(v: &[T], bounds: &[Option<T>]) -> bool {
    v.iter().zip(bounds).all(|(e, b)| match (b, e.abs()) {
        (None, _) => true,
        (Some(b), Some(a)) => &a <= b,
        (Some(_), None) => false,
    })
}

/// Drops every element that has a different element conformal to it on the
/// first `active` coordinates.
fn minimal_elements<T: Entry>(mut set: Vec<Elem<T>>, active: usize) -> Vec<Vec<T>> {
    set.sort_by(|a, b| a.norm.cmp(&b.norm).then_with(|| a.v.cmp(&b.v)));
    set.dedup_by(|a, b| a.v[..active] == b.v[..active]);
    let mut kept: Vec<Elem<T>> = Vec::with_capacity(set.len());
    for e in set {
        // u ⊑ v with equal norms forces u == v, so only kept elements can
        // be conformal to e
        if kept.iter().any(|k| k.conformal_to(&e, active)) {
            continue;
        }
        kept.push(e);
    }
    kept.into_iter().map(|e| e.v).collect()
}
