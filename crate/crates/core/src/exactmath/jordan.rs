//! Jordan block sizes for a single eigenvalue, from nullity profiles.

use super::field::{Fe, FiniteField};
use super::matrix::Matrix;
use super::MathError;

/// Nullities of `(M - cI)^i` for `i = 0, 1, ...` up to the point where they
/// stabilise.
pub fn nullity_profile(f: &FiniteField, m: &Matrix, c: Fe) -> Result<Vec<usize>, MathError> {
    if !m.is_square() {
        return Err(MathError::Shape("matrix is not square".into()));
    }
    let n = m.sub_scalar(f, c)?;
    let mut profile = vec![0];
    let mut power = Matrix::identity(m.rows());
    loop {
        power = power.mul(f, &n)?;
        let k = power.nullity(f);
        if k == *profile.last().unwrap() {
            return Ok(profile);
        }
        profile.push(k);
    }
}

/// Jordan block sizes of `M` at eigenvalue `c`, ascending. Empty if `c` is
/// not an eigenvalue.
pub fn unipotent_block_sizes(f: &FiniteField, m: &Matrix, c: Fe) -> Result<Vec<usize>, MathError> {
    let profile = nullity_profile(f, m, c)?;
    // at_least[i] = number of blocks of size >= i + 1
    let at_least: Vec<usize> = profile.windows(2).map(|w| w[1] - w[0]).collect();
    let mut sizes = Vec::new();
    for (i, &cnt) in at_least.iter().enumerate() {
        let next = at_least.get(i + 1).copied().unwrap_or(0);
        sizes.extend(std::iter::repeat(i + 1).take(cnt - next));
    }
    Ok(sizes)
}

/// Basis of `ker (M - cI)^dim`.
pub fn generalized_eigenspace(f: &FiniteField, m: &Matrix, c: Fe) -> Result<Vec<Vec<Fe>>, MathError> {
    let n = m.sub_scalar(f, c)?;
    Ok(n.pow(f, m.rows() as u64)?.nullspace(f))
}

/// Matrix of `M` on the invariant subspace spanned by `basis`.
pub fn restrict(f: &FiniteField, m: &Matrix, basis: &[Vec<Fe>]) -> Result<Matrix, MathError> {
    let b = Matrix::from_columns(m.rows(), basis)?;
    let mut cols = Vec::with_capacity(basis.len());
    for v in basis {
        let image = m.mul_vec(f, v)?;
        cols.push(b.solve(f, &image).map_err(|_| MathError::NotInvariant)?);
    }
    Matrix::from_columns(basis.len(), &cols)
}

/// Block-diagonal matrix of Jordan blocks `(eigenvalue, size)`, with ones on
/// the subdiagonal so that `M e_i = c e_i + e_{i+1}` inside a block.
pub fn jordan_matrix(blocks: &[(Fe, usize)]) -> Matrix {
    let dim = blocks.iter().map(|b| b.1).sum();
    let mut m = Matrix::zeros(dim, dim);
    let mut off = 0;
    for &(c, size) in blocks {
        for i in 0..size {
            m.set(off + i, off + i, c);
            if i + 1 < size {
                m.set(off + i + 1, off + i, Fe::ONE);
            }
        }
        off += size;
    }
    m
}
