use std::fmt;

use super::{Field, Matrix};
use crate::error::{Error, Result};

/// A linear subspace of `GF(p)^n`, stored as the nonzero rows of a reduced
/// row echelon basis. Two subspaces are equal iff their bases are equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    basis: Matrix,
}

/// Reduces `v` in place against rows of an rref basis whose pivots are
/// `pivots`.
fn reduce_against(field: Field, basis: &Matrix, pivots: &[usize], v: &mut [u32]) {
    for (i, &c) in pivots.iter().enumerate() {
        let factor = v[c];
        if factor == 0 {
            continue;
        }
        let neg = field.neg(factor);
        for (slot, &b) in v.iter_mut().zip(basis.row(i)) {
            if b != 0 {
                *slot = field.add(*slot, field.mul(neg, b));
            }
        }
    }
}

fn leading_pivots(basis: &Matrix) -> Vec<usize> {
    basis
        .row_iter()
        .map(|row| {
            row.iter()
                .position(|&x| x != 0)
                .expect("basis rows are nonzero")
        })
        .collect()
}

fn check_ambient(op: &'static str, left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { op, left, right });
    }
    Ok(())
}

impl Subspace {
    pub fn zero(field: Field, ambient: usize) -> Self {
        Subspace {
            basis: Matrix::zeros(field, 0, ambient),
        }
    }

    pub fn full(field: Field, ambient: usize) -> Self {
        Subspace {
            basis: Matrix::identity(field, ambient),
        }
    }

    /// Span of the rows of `vectors`.
    pub fn span(vectors: &Matrix) -> Self {
        let r = vectors.rref();
        let basis = r.reduced.select_rows(0..r.rank);
        Subspace { basis }
    }

    pub fn field(&self) -> Field {
        self.basis.field()
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim()
    }

    /// Canonical basis, one vector per row.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn pivots(&self) -> Vec<usize> {
        leading_pivots(&self.basis)
    }

    pub fn contains(&self, v: &[u32]) -> Result<bool> {
        check_ambient("membership", self.ambient_dim(), v.len())?;
        let mut w = v.to_vec();
        reduce_against(self.field(), &self.basis, &self.pivots(), &mut w);
        Ok(w.iter().all(|&x| x == 0))
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        check_ambient("inclusion", self.ambient_dim(), other.ambient_dim())?;
        if self.dim() > other.dim() {
            return Ok(false);
        }
        let pivots = other.pivots();
        let f = self.field();
        Ok(self.basis.row_iter().all(|row| {
            let mut w = row.to_vec();
            reduce_against(f, &other.basis, &pivots, &mut w);
            w.iter().all(|&x| x == 0)
        }))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        check_ambient("subspace sum", self.ambient_dim(), other.ambient_dim())?;
        if other.is_zero() || self.is_full() {
            return Ok(self.clone());
        }
        if self.is_zero() || other.is_full() {
            return Ok(other.clone());
        }
        Ok(Subspace::span(&self.basis.vstack(&other.basis)?))
    }

    /// Vectors orthogonal to every vector of `self` under the standard dot
    /// product; `x ∈ self` iff `annihilator · x = 0`.
    pub fn annihilator(&self) -> Subspace {
        kernel_basis(&self.basis)
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        check_ambient(
            "subspace intersection",
            self.ambient_dim(),
            other.ambient_dim(),
        )?;
        if self.is_full() || other.is_zero() {
            return Ok(other.clone());
        }
        if other.is_full() || self.is_zero() {
            return Ok(self.clone());
        }
        // Stack both constraint systems and solve.
        let constraints = self
            .annihilator()
            .basis
            .vstack(&other.annihilator().basis)?;
        Ok(kernel_basis(&constraints))
    }

    /// A complement of `self` inside `enclosing`, obtained by scanning the
    /// canonical basis of `enclosing` in order and keeping every vector that
    /// is independent of what has been kept so far.
    pub fn complement_in(&self, enclosing: &Subspace) -> Result<Subspace> {
        if !self.is_subspace_of(enclosing)? {
            return Err(Error::NotContained);
        }
        let f = self.field();
        let n = self.ambient_dim();
        let mut echelon = Echelon::new(f);
        for row in self.basis.row_iter() {
            echelon.insert(row.to_vec());
        }
        let mut chosen = Matrix::zeros(f, 0, n);
        for row in enclosing.basis.row_iter() {
            if echelon.dim() == enclosing.dim() {
                break;
            }
            if echelon.insert(row.to_vec()) {
                chosen = chosen.vstack(&Matrix::from_vec(f, 1, n, row.to_vec())?)?;
            }
        }
        Ok(Subspace::span(&chosen))
    }

    /// The subspace spanned by the first `k` canonical basis vectors.
    pub fn truncate(&self, k: usize) -> Subspace {
        Subspace {
            basis: self.basis.select_rows(0..k.min(self.dim())),
        }
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Subspace(dim {} in {}: {:?})",
            self.dim(),
            self.ambient_dim(),
            self.basis.to_rows()
        )
    }
}

/// Incrementally maintained echelon basis; used for greedy extension.
pub(crate) struct Echelon {
    field: Field,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub(crate) fn new(field: Field) -> Self {
        Echelon {
            field,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub(crate) fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Inserts `v`; returns whether it was independent of the current rows.
    pub(crate) fn insert(&mut self, mut v: Vec<u32>) -> bool {
        let f = self.field;
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let factor = v[c];
            if factor == 0 {
                continue;
            }
            let neg = f.neg(factor);
            for (slot, &b) in v.iter_mut().zip(row) {
                if b != 0 {
                    *slot = f.add(*slot, f.mul(neg, b));
                }
            }
        }
        let Some(c) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv_nonzero(v[c]);
        v.iter_mut().for_each(|x| *x = f.mul(*x, inv));
        self.rows.push(v);
        self.pivots.push(c);
        true
    }
}

/// Null space `{x : m·x = 0}` as a subspace of `GF(p)^cols`.
pub fn kernel_basis(m: &Matrix) -> Subspace {
    let f = m.field();
    let n = m.cols();
    let r = m.rref();
    if r.rank == 0 {
        return Subspace::full(f, n);
    }
    let mut is_pivot = vec![false; n];
    for &c in &r.pivots {
        is_pivot[c] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    let mut basis = Matrix::zeros(f, free.len(), n);
    for (k, &fc) in free.iter().enumerate() {
        basis.set(k, fc, 1);
        for (i, &pc) in r.pivots.iter().enumerate() {
            basis.set(k, pc, f.neg(r.reduced.get(i, fc)));
        }
    }
    Subspace::span(&basis)
}

/// Column space of `m` as a subspace of `GF(p)^rows`.
pub fn image_basis(m: &Matrix) -> Subspace {
    Subspace::span(&m.transpose())
}

/// `m(u)`, the image of `u` under `m`.
pub fn apply_to_subspace(m: &Matrix, u: &Subspace) -> Result<Subspace> {
    check_ambient("apply_to_subspace", m.cols(), u.ambient_dim())?;
    if u.is_zero() {
        return Ok(Subspace::zero(m.field(), m.rows()));
    }
    Ok(Subspace::span(&(u.basis() * &m.transpose())))
}

/// `m⁻¹(u) = {x : m·x ∈ u}`.
pub fn preimage(m: &Matrix, u: &Subspace) -> Result<Subspace> {
    check_ambient("preimage", m.rows(), u.ambient_dim())?;
    if u.is_full() {
        return Ok(Subspace::full(m.field(), m.cols()));
    }
    Ok(kernel_basis(&(u.annihilator().basis() * m)))
}
