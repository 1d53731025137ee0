use crate::error::{Error, Result};

/// Row-major stack of equal-length descriptors.
#[derive(Clone, Debug, PartialEq)]
pub struct DescriptorMatrix {
    dim: usize,
    data: Vec<f32>,
}

impl DescriptorMatrix {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "descriptor dimension must be positive");
        DescriptorMatrix {
            dim,
            data: Vec::new(),
        }
    }

    pub fn from_rows<R: AsRef<[f32]>>(
        dim: usize,
        rows: impl IntoIterator<Item = R>,
    ) -> Result<Self> {
        let mut m = DescriptorMatrix::new(dim);
        for row in rows {
            m.push(row.as_ref())?;
        }
        Ok(m)
    }

    pub fn push(&mut self, row: &[f32]) -> Result<()> {
        if row.len() != self.dim {
            return Err(Error::argument(format!(
                "descriptor has {} values, matrix dimension is {}",
                row.len(),
                self.dim
            )));
        }
        self.data.extend_from_slice(row);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f32]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    /// Elementwise maximum over all rows, or `None` when empty.
    pub fn column_max(&self) -> Option<Vec<f32>> {
        let mut rows = self.rows();
        let mut acc = rows.next()?.to_vec();
        for row in rows {
            max_into(&mut acc, row);
        }
        Some(acc)
    }
}

#[inline]
pub(crate) fn max_into(acc: &mut [f32], row: &[f32]) {
    for (a, &v) in acc.iter_mut().zip(row) {
        if v > *a {
            *a = v;
        }
    }
}
