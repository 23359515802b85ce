use std::fmt;

use super::{CellError, CellSpec};

/// Sequence of 0-based clique indices, outermost sub-cell choice first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CellAddress {
    digits: Vec<usize>,
}

impl CellAddress {
    pub fn new(digits: Vec<usize>, mu: usize) -> Result<Self, CellError> {
        if let Some(&digit) = digits.iter().find(|&&d| d >= mu) {
            return Err(CellError::DigitOutOfRange { digit, mu });
        }
        Ok(Self { digits })
    }

    /// The address of the origin cell at depth `len`: `origin_clique` repeated.
    pub fn origin(spec: &CellSpec, len: usize) -> Self {
        Self { digits: vec![spec.origin_clique(); len] }
    }

    pub fn digits(&self) -> &[usize] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// All addresses of length `len` over `mu` digits, in lexicographic order.
    pub fn all(mu: usize, len: usize) -> impl Iterator<Item = CellAddress> {
        let total = mu.checked_pow(len as u32).expect("address space too large");
        (0..total).map(move |mut k| {
            let mut digits = vec![0; len];
            for d in digits.iter_mut().rev() {
                *d = k % mu;
                k /= mu;
            }
            CellAddress { digits }
        })
    }
}

impl fmt::Display for CellAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.digits.is_empty() {
            return f.write_str("-");
        }
        let parts: Vec<String> = self.digits.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("."))
    }
}

/// One step of the contraction on cells: the cell addressed by `addr` at level
/// `len` is re-read one level down, where the whole level sits at position
/// `origin_clique`. Equivalently `[origin_clique] ++ addr[..len-1]`.
pub fn phi_s_step(addr: &CellAddress, spec: &CellSpec) -> Result<CellAddress, CellError> {
    if addr.is_empty() {
        return Err(CellError::EmptyAddress);
    }
    let mut digits = Vec::with_capacity(addr.len());
    digits.push(spec.origin_clique());
    digits.extend_from_slice(&addr.digits[..addr.len() - 1]);
    CellAddress::new(digits, spec.mu())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellmodel::bundled;

    #[test]
    fn step_drops_innermost_digit() {
        // origin_clique 1 in the 1-based reading corresponds to 0 here
        let spec = bundled::vicsek();
        let a = CellAddress::new(vec![2, 0, 1], 5).unwrap();
        assert_eq!(phi_s_step(&a, &spec).unwrap().digits(), &[0, 2, 0]);
        let fixed = CellAddress::origin(&spec, 3);
        assert_eq!(phi_s_step(&fixed, &spec).unwrap(), fixed);
        assert_eq!(phi_s_step(&CellAddress::default(), &spec), Err(CellError::EmptyAddress));
    }

    #[test]
    fn iteration_reaches_origin_cell() {
        for spec in bundled::all() {
            for len in 1..=4 {
                let target = CellAddress::origin(&spec, len);
                for a in CellAddress::all(spec.mu(), len) {
                    let mut cur = a.clone();
                    for _ in 0..len {
                        cur = phi_s_step(&cur, &spec).unwrap();
                    }
                    assert_eq!(cur, target, "from {a}");
                }
            }
        }
    }

    #[test]
    fn digits_are_range_checked() {
        assert!(matches!(CellAddress::new(vec![3], 3), Err(CellError::DigitOutOfRange { digit: 3, mu: 3 })));
    }
}
