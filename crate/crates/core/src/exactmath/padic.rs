use super::MathError;

/// Base-`p` digits of `k`, least significant first, padded to `ell` digits.
pub fn p_adic_digits(k: u64, p: u64, ell: u32) -> Result<Vec<u64>, MathError> {
    let bound = p.checked_pow(ell).ok_or(MathError::Overflow)?;
    if k >= bound {
        return Err(MathError::OutOfRange {
            what: "p-adic digit input",
            value: k as i64,
            bound: bound as i64,
        });
    }
    let mut rest = k;
    let digits = (0..ell)
        .map(|_| {
            let d = rest % p;
            rest /= p;
            d
        })
        .collect();
    Ok(digits)
}

/// Inverse of [`p_adic_digits`].
pub fn from_p_adic_digits(digits: &[u64], p: u64) -> u64 {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}
