use crate::error::{Error, Result};

/// Ordered list of mode truncation dimensions.
///
/// Flat indices are row-major with mode 0 varying slowest, so for
/// `dims = [3, 3]` the occupation `[2, 0]` sits at index 6.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpaceLayout {
    dims: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl SpaceLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Layout("layout needs at least one mode".into()));
        }
        if let Some(i) = dims.iter().position(|&d| d == 0) {
            return Err(Error::Layout(format!("mode {i} has dimension 0")));
        }
        let mut strides = vec![1usize; dims.len()];
        for i in (0..dims.len() - 1).rev() {
            strides[i] = strides[i + 1]
                .checked_mul(dims[i + 1])
                .ok_or_else(|| Error::Layout("total dimension overflows usize".into()))?;
        }
        let total = strides[0]
            .checked_mul(dims[0])
            .ok_or_else(|| Error::Layout("total dimension overflows usize".into()))?;
        Ok(SpaceLayout { dims, strides, total })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_modes(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self, mode: usize) -> usize {
        self.dims[mode]
    }

    pub fn stride(&self, mode: usize) -> usize {
        self.strides[mode]
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.dims.len() {
            return Err(Error::Layout(format!(
                "mode index {mode} out of range for {} modes",
                self.dims.len()
            )));
        }
        Ok(())
    }

    pub fn flatten(&self, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != self.dims.len() {
            return Err(Error::Layout(format!(
                "expected {} occupations, got {}",
                self.dims.len(),
                occupations.len()
            )));
        }
        let mut idx = 0;
        for (mode, (&occ, &dim)) in occupations.iter().zip(&self.dims).enumerate() {
            if occ >= dim {
                return Err(Error::OutOfRange {
                    mode,
                    occupation: occ,
                    dim,
                });
            }
            idx += occ * self.strides[mode];
        }
        Ok(idx)
    }

    /// Inverse of [`flatten`](Self::flatten). Panics if `index >= total`.
    pub fn unflatten(&self, index: usize) -> Vec<usize> {
        assert!(index < self.total, "index {index} out of range");
        self.dims
            .iter()
            .zip(&self.strides)
            .map(|(&d, &s)| (index / s) % d)
            .collect()
    }

    /// Occupation of a single mode at a flat index.
    #[inline]
    pub fn occupation(&self, index: usize, mode: usize) -> usize {
        (index / self.strides[mode]) % self.dims[mode]
    }

    /// Layout of `self ⊗ other`.
    pub fn tensor(&self, other: &SpaceLayout) -> SpaceLayout {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        SpaceLayout::new(dims).expect("tensor of valid layouts is valid")
    }
}
