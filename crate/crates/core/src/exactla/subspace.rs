use super::matrix::Matrix;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// A linear subspace of `k^n`, stored as the nonzero rows of its reduced row echelon basis.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace<F: Scalar> {
    ambient: usize,
    basis: Matrix<F>,
    pivots: Vec<usize>,
}

impl<F: Scalar> Subspace<F> {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::zeros(0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::identity(ambient),
            pivots: (0..ambient).collect(),
        }
    }

    /// Span of the rows of `rows`.
    pub fn from_row_span(rows: &Matrix<F>) -> Self {
        let (r, pivots) = rows.rref();
        let keep: Vec<usize> = (0..pivots.len()).collect();
        Subspace {
            ambient: rows.cols(),
            basis: r.select_rows(&keep),
            pivots,
        }
    }

    /// Span of the columns of `cols`.
    pub fn from_column_span(cols: &Matrix<F>) -> Self {
        Self::from_row_span(&cols.transpose())
    }

    pub fn from_vectors(vectors: &[Vec<F>], ambient: usize) -> Result<Self> {
        Ok(Self::from_row_span(&Matrix::from_rows(
            vectors.to_vec(),
            ambient,
        )?))
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient - self.dim()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Echelon basis, one vector per row.
    pub fn basis_rows(&self) -> &Matrix<F> {
        &self.basis
    }

    /// Echelon basis as an `ambient x dim` matrix.
    pub fn basis_columns(&self) -> Matrix<F> {
        self.basis.transpose()
    }

    /// Coordinates of `v` in the echelon basis, or `None` if `v` is not in the subspace.
    pub fn coordinates(&self, v: &[F]) -> Option<Vec<F>> {
        assert_eq!(v.len(), self.ambient, "vector lies in the ambient space");
        let c: Vec<F> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let back = self.basis.transpose().apply(&c);
        (back == v).then_some(c)
    }

    /// Coordinates of every column of `m`; `None` if some column is outside.
    pub fn coordinate_matrix(&self, m: &Matrix<F>) -> Option<Matrix<F>> {
        let cols: Option<Vec<Vec<F>>> = (0..m.cols())
            .map(|j| self.coordinates(&m.column(j)))
            .collect();
        Matrix::from_columns(&cols?, self.dim()).ok()
    }

    pub fn contains(&self, v: &[F]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.ambient == other.ambient && (0..self.dim()).all(|i| other.contains(self.basis.row(i)))
    }

    fn check_ambient(&self, other: &Self) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch(format!(
                "subspaces of k^{} and k^{}",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }

    /// Sum of subspaces.
    pub fn join(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        Ok(Self::from_row_span(&self.basis.vstack(&other.basis)?))
    }

    /// Intersection, computed as the annihilator of the sum of annihilators.
    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        let a = self.annihilator();
        let b = other.annihilator();
        Ok(a.join(&b)?.annihilator())
    }

    /// `{x : <x, u> = 0 for all u}` for the standard bilinear form.
    pub fn annihilator(&self) -> Self {
        kernel(&self.basis)
    }

    pub fn image_under(&self, map: &Matrix<F>) -> Result<Self> {
        if map.cols() != self.ambient {
            return Err(Error::DimensionMismatch(format!(
                "map with {} columns applied to subspace of k^{}",
                map.cols(),
                self.ambient
            )));
        }
        Ok(Self::from_column_span(&map.mul(&self.basis_columns())))
    }

    /// `{x : map x in self}`.
    pub fn preimage_under(&self, map: &Matrix<F>) -> Result<Self> {
        if map.rows() != self.ambient {
            return Err(Error::DimensionMismatch(format!(
                "map with {} rows pulled back along subspace of k^{}",
                map.rows(),
                self.ambient
            )));
        }
        let ann = self.annihilator();
        Ok(kernel(&ann.basis.mul(map)))
    }
}

/// Null space of `a` as a subspace of its source.
pub fn kernel<F: Scalar>(a: &Matrix<F>) -> Subspace<F> {
    let n = a.cols();
    let (r, piv) = a.rref();
    let free: Vec<usize> = (0..n).filter(|c| !piv.contains(c)).collect();
    let mut vectors = Vec::with_capacity(free.len());
    for &f in &free {
        let mut v = vec![F::zero(); n];
        v[f] = F::one();
        for (i, &p) in piv.iter().enumerate() {
            v[p] = r.get(i, f).neg();
        }
        vectors.push(v);
    }
    Subspace::from_row_span(&Matrix::from_rows(vectors, n).expect("kernel vectors have length n"))
}

/// Column space of `a` as a subspace of its target.
pub fn image<F: Scalar>(a: &Matrix<F>) -> Subspace<F> {
    Subspace::from_column_span(a)
}

/// A splitting of `V -> V/U` for `U ⊆ V`: an `ambient x q` matrix whose columns complement `U` in `V`.
///
/// The columns are the echelon basis vectors of `V` sitting at coordinate positions that are not
/// pivots of `U` written in `V`-coordinates; for `V = k^n` these are standard basis vectors at the
/// non-pivot columns of `U`, in increasing order.
pub fn complement_section<F: Scalar>(u: &Subspace<F>, v: &Subspace<F>) -> Result<Matrix<F>> {
    let chosen = complement_positions(u, v)?;
    Ok(v.basis_rows().select_rows(&chosen).transpose())
}

fn complement_positions<F: Scalar>(u: &Subspace<F>, v: &Subspace<F>) -> Result<Vec<usize>> {
    if !u.is_subspace_of(v) {
        return Err(Error::NotSubspace(format!(
            "{}-dimensional subspace is not contained in the {}-dimensional one",
            u.dim(),
            v.dim()
        )));
    }
    let coords = v
        .coordinate_matrix(&u.basis_columns())
        .expect("U lies in V");
    let in_v = Subspace::from_column_span(&coords);
    Ok((0..v.dim())
        .filter(|c| !in_v.pivots().contains(c))
        .collect())
}

/// The projection `V -> V/U` matching [`complement_section`]: a `q x ambient` matrix `P` with
/// `P * section = I` and `P * u = 0` for `u ∈ U`. Its values off `V` are unspecified.
pub fn quotient_projection<F: Scalar>(u: &Subspace<F>, v: &Subspace<F>) -> Result<Matrix<F>> {
    let section = complement_section(u, v)?;
    let q = section.cols();
    // basis of V ordered as [U basis | section columns]
    let b = u.basis_columns().hstack(&section)?;
    // rows J of b form an invertible block; P = [0 | I] * (b_J)^{-1} supported on J
    let (_, rows_j) = b.transpose().rref();
    let bj = b.select_rows(&rows_j);
    let inv = bj.inverse()?;
    let k = u.dim();
    let mut sel = Matrix::zeros(q, k + q);
    for i in 0..q {
        sel.set(i, k + i, F::one());
    }
    let pj = sel.mul(&inv);
    let mut p = Matrix::zeros(q, u.ambient());
    for (c, &j) in rows_j.iter().enumerate() {
        for i in 0..q {
            p.set(i, j, pj.get(i, c).clone());
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::Q;

    fn sp(vs: &[Vec<i64>], n: usize) -> Subspace<Q> {
        Subspace::from_row_span(&Matrix::from_i64_rows(vs, n).unwrap())
    }

    #[test]
    fn section_of_a_coordinate_line() {
        let u = sp(&[vec![1, 0]], 2);
        let s = complement_section(&u, &Subspace::full(2)).unwrap();
        assert_eq!(s, Matrix::from_i64_rows(&[vec![0], vec![1]], 1).unwrap());
    }

    #[test]
    fn section_uses_non_pivot_columns() {
        let u = sp(&[vec![1, 1]], 2);
        let s = complement_section(&u, &Subspace::full(2)).unwrap();
        assert_eq!(s, Matrix::from_i64_rows(&[vec![0], vec![1]], 1).unwrap());
        let p = quotient_projection(&u, &Subspace::full(2)).unwrap();
        assert!(p.mul(&s).is_identity());
        assert!(p
            .apply(&[Q::from_i64(1), Q::from_i64(1)])
            .iter()
            .all(|x| x.is_zero()));
    }

    #[test]
    fn meet_and_join() {
        let a = sp(&[vec![1, 0, 0], vec![0, 1, 0]], 3);
        let b = sp(&[vec![0, 1, 0], vec![0, 0, 1]], 3);
        assert_eq!(a.meet(&b).unwrap(), sp(&[vec![0, 1, 0]], 3));
        assert_eq!(a.join(&b).unwrap(), Subspace::full(3));
        assert!(a.meet(&sp(&[vec![1]], 1)).is_err());
    }

    #[test]
    fn section_rejects_non_subspace() {
        let u = sp(&[vec![1, 0]], 2);
        let v = sp(&[vec![0, 1]], 2);
        assert!(matches!(
            complement_section(&u, &v),
            Err(Error::NotSubspace(_))
        ));
    }

    #[test]
    fn preimage_and_image() {
        let a = Matrix::<Q>::from_i64_rows(&[vec![1, 1]], 2).unwrap();
        let z = Subspace::zero(1);
        assert_eq!(z.preimage_under(&a).unwrap(), kernel(&a));
        assert_eq!(
            Subspace::full(2).image_under(&a).unwrap(),
            Subspace::full(1)
        );
    }
}
