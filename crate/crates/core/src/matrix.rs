//! Dense square matrix storage shared by projections, probability matrices
//! and backbones.

/// Row-major dense `n x n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Copy + Default> SquareMatrix<T> {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            data: vec![T::default(); n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_vec(n: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), n * n, "data length must be n*n");
        Self { n, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    /// Set both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set_sym(&mut self, i: usize, j: usize, v: T) {
        self.set(i, j, v);
        self.set(j, i, v);
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    /// Iterate over the strict upper triangle (`i < j`) in row-major order.
    pub fn upper_triangle(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j, self.get(i, j))))
    }
}

impl<T: Copy + PartialEq> SquareMatrix<T> {
    pub fn is_symmetric(&self) -> bool {
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.data[i * self.n + j] != self.data[j * self.n + i] {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_set_and_iter() {
        let mut m = SquareMatrix::<u32>::new(3);
        m.set_sym(0, 2, 7);
        assert_eq!(m.get(2, 0), 7);
        assert!(m.is_symmetric());
        let cells: Vec<_> = m.upper_triangle().collect();
        assert_eq!(cells, vec![(0, 1, 0), (0, 2, 7), (1, 2, 0)]);
    }
}
