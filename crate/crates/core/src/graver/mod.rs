//! Graver bases: the `⊑`-minimal nonzero vectors of a kernel lattice.

mod completion;
mod entry;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::lattice::{kernel_lattice_basis, ColumnEchelon};
use crate::linalg::{conformal_entry, IntMatrix, IntVec};

use completion::{complete, project_and_lift, Stop};
use entry::Entry;

/// A Graver basis, stored in lexicographic order.
///
/// Elements are nonzero kernel vectors of the generating matrix, the set is
/// closed under negation, and no element is conformal to a different one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GraverBasis {
    elements: Vec<IntVec>,
    matrix_cols: usize,
}

impl GraverBasis {
    /// Sorts and deduplicates; the caller vouches for the Graver invariants.
    pub(crate) fn from_raw(matrix_cols: usize, mut elements: Vec<IntVec>) -> Self {
        elements.sort();
        elements.dedup();
        GraverBasis {
            elements,
            matrix_cols,
        }
    }

    /// Builds a basis from explicit elements, checking kernel membership,
    /// nonzeroness, negation closure and pairwise incomparability against `m`.
    pub fn from_elements(m: &IntMatrix, elements: Vec<IntVec>) -> Result<Self> {
        for e in &elements {
            if e.len() != m.cols() {
                return Err(Error::LengthMismatch {
                    expected: m.cols(),
                    actual: e.len(),
                });
            }
            if e.is_zero() || !m.annihilates(e)? {
                return Err(Error::NotInKernel);
            }
        }
        let basis = Self::from_raw(m.cols(), elements);
        if basis.elements.iter().any(|e| !basis.contains(&-e)) {
            return Err(Error::Invalid("element set is not closed under negation".into()));
        }
        for (i, u) in basis.elements.iter().enumerate() {
            for (j, v) in basis.elements.iter().enumerate() {
                if i != j && is_conformal(u, v) {
                    return Err(Error::Invalid(format!("{u} is conformal to {v}")));
                }
            }
        }
        Ok(basis)
    }

    pub fn empty(matrix_cols: usize) -> Self {
        GraverBasis {
            elements: Vec::new(),
            matrix_cols,
        }
    }

    pub fn elements(&self) -> &[IntVec] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<IntVec> {
        self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn matrix_cols(&self) -> usize {
        self.matrix_cols
    }

    pub fn iter(&self) -> std::slice::Iter<'_, IntVec> {
        self.elements.iter()
    }

    pub fn contains(&self, v: &IntVec) -> bool {
        self.elements.binary_search(v).is_ok()
    }

    /// Largest absolute entry over all elements (0 for the empty basis).
    pub fn max_abs_entry(&self) -> BigInt {
        self.elements
            .iter()
            .map(IntVec::max_abs)
            .max()
            .unwrap_or_default()
    }
}

impl<'a> IntoIterator for &'a GraverBasis {
    type Item = &'a IntVec;
    type IntoIter = std::slice::Iter<'a, IntVec>;
    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

/// `u ⊑ v` for vectors already known to have equal length.
pub(crate) fn is_conformal(u: &IntVec, v: &IntVec) -> bool {
    u.iter().zip(v.iter()).all(|(a, b)| conformal_entry(a, b))
}

/// Computes the Graver basis of `m`.
pub fn graver_basis(m: &IntMatrix) -> GraverBasis {
    let generators = kernel_lattice_basis(m);
    graver_from_generators(m.cols(), &generators, None).expect("no limit was set")
}

/// Like [`graver_basis`], but gives up once the working set of the
/// completion exceeds `limit` vectors.
pub fn graver_basis_bounded(m: &IntMatrix, limit: usize) -> Option<GraverBasis> {
    let generators = kernel_lattice_basis(m);
    graver_from_generators(m.cols(), &generators, Some(limit))
}

/// Completion from any generating set of the lattice. Extra generators that
/// are already Graver elements shorten the run.
pub(crate) fn graver_from_generators(
    cols: usize,
    generators: &[IntVec],
    limit: Option<usize>,
) -> Option<GraverBasis> {
    if let Some(small) = to_fixed::<i64>(generators) {
        match complete(&small, limit) {
            Ok(out) => return Some(from_fixed(cols, out)),
            Err(Stop::Limit) => return None,
            Err(Stop::Overflow) => {}
        }
    }
    let big = to_fixed::<BigInt>(generators).expect("BigInt conversion is total");
    match complete(&big, limit) {
        Ok(out) => Some(from_fixed(cols, out)),
        Err(Stop::Limit) => None,
        Err(Stop::Overflow) => unreachable!("BigInt arithmetic does not overflow"),
    }
}

/// The Graver elements `g` of `m` with `|g_i| <= bounds[i]` for every
/// coordinate carrying a bound.
///
/// For a box `0 <= x <= u` the elements with `|g| <= u` already contain every
/// conformal step between two points of the box, so the truncated set is a
/// test set for any problem over that box. With all bounds `None` the result
/// is the full Graver basis, computed by project-and-lift instead of the
/// plain completion used by [`graver_basis`].
pub fn truncated_graver_basis(m: &IntMatrix, bounds: &[Option<BigInt>]) -> Result<GraverBasis> {
    if bounds.len() != m.cols() {
        return Err(Error::LengthMismatch {
            expected: m.cols(),
            actual: bounds.len(),
        });
    }
    if let Some(i) = bounds
        .iter()
        .position(|b| b.as_ref().is_some_and(Signed::is_negative))
    {
        return Err(Error::Negative(i));
    }
    let cols = m.cols();
    let kernel = kernel_lattice_basis(m);
    if kernel.is_empty() {
        return Ok(GraverBasis::empty(cols));
    }
    // coordinates on which the kernel projects injectively come first, the
    // remaining ones are lifted tightest bound first
    let ech = ColumnEchelon::new(&IntMatrix::from_columns(cols, &kernel)?);
    let lead = ech.pivot_rows();
    let mut rest: Vec<usize> = (0..cols).filter(|i| !lead.contains(i)).collect();
    rest.sort_by(|&a, &b| match (&bounds[a], &bounds[b]) {
        (Some(x), Some(y)) => x.cmp(y),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    let order: Vec<usize> = lead.iter().copied().chain(rest).collect();
    let permute = |v: &IntVec| -> IntVec { order.iter().map(|&i| v[i].clone()).collect() };
    let generators: Vec<IntVec> = ech.echelon_columns().iter().map(permute).collect();
    let bounds: Vec<Option<BigInt>> = order.iter().map(|&i| bounds[i].clone()).collect();
    let rank = lead.len();

    let lifted = match lift_fixed::<i64>(&generators, rank, &bounds) {
        Some(out) => out,
        None => lift_fixed::<BigInt>(&generators, rank, &bounds)
            .expect("BigInt arithmetic does not overflow"),
    };
    let elements = lifted
        .into_iter()
        .map(|v| {
            let mut out = vec![BigInt::default(); cols];
            for (pos, &i) in order.iter().enumerate() {
                out[i] = v[pos].clone();
            }
            IntVec::new(out)
        })
        .collect();
    Ok(GraverBasis::from_raw(cols, elements))
}

fn lift_fixed<T: Entry>(
    generators: &[IntVec],
    rank: usize,
    bounds: &[Option<BigInt>],
) -> Option<Vec<IntVec>> {
    let gens = to_fixed::<T>(generators)?;
    // a bound too large for T cannot bind any representable entry
    let bounds: Vec<Option<T>> = bounds
        .iter()
        .map(|b| b.as_ref().and_then(T::from_big))
        .collect();
    match project_and_lift(&gens, rank, &bounds, None) {
        Ok(out) => Some(
            out.into_iter()
                .map(|v| v.iter().map(Entry::to_big).collect())
                .collect(),
        ),
        Err(Stop::Overflow) => None,
        Err(Stop::Limit) => unreachable!("no limit was set"),
    }
}

fn to_fixed<T: Entry>(vs: &[IntVec]) -> Option<Vec<Vec<T>>> {
    vs.iter()
        .map(|v| v.iter().map(T::from_big).collect::<Option<Vec<T>>>())
        .collect()
}

fn from_fixed<T: Entry>(cols: usize, vs: Vec<Vec<T>>) -> GraverBasis {
    let elements = vs
        .into_iter()
        .map(|v| v.iter().map(Entry::to_big).collect())
        .collect();
    GraverBasis::from_raw(cols, elements)
}

fn check_cols(v: &IntVec, g: &GraverBasis) -> Result<()> {
    if v.len() != g.matrix_cols {
        return Err(Error::LengthMismatch {
            expected: g.matrix_cols,
            actual: v.len(),
        });
    }
    Ok(())
}

/// Greedy conformal reduction: subtract the lexicographically first element
/// conformal to the current remainder until none is left.
fn reduce(v: &IntVec, g: &GraverBasis, mut on_step: impl FnMut(&IntVec)) -> IntVec {
    let mut rest = v.clone();
    'outer: loop {
        if rest.is_zero() {
            return rest;
        }
        for e in &g.elements {
            if is_conformal(e, &rest) {
                on_step(e);
                rest = &rest - e;
                continue 'outer;
            }
        }
        return rest;
    }
}

/// Irreducible remainder of `v` under conformal subtraction of elements of `g`.
pub fn conformal_normal_form(v: &IntVec, g: &GraverBasis) -> Result<IntVec> {
    check_cols(v, g)?;
    Ok(reduce(v, g, |_| {}))
}

/// Writes a kernel vector as a sum of Graver elements each conformal to it.
///
/// Fails with [`Error::NotInKernel`] when the reduction leaves a nonzero
/// remainder, which for a Graver basis happens exactly when `v` is not in
/// the kernel lattice.
pub fn conformal_decompose(v: &IntVec, g: &GraverBasis) -> Result<Vec<IntVec>> {
    check_cols(v, g)?;
    let mut parts = Vec::new();
    let rest = reduce(v, g, |e| parts.push(e.clone()));
    if rest.is_zero() {
        Ok(parts)
    } else {
        Err(Error::NotInKernel)
    }
}
