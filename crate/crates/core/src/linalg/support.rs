use crate::linalg::{LinalgError, Vector};
use crate::scalar::Real;

/// Strictly increasing set of column indices into a matrix with `ambient`
/// columns. Indices are zero-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Support {
    indices: Vec<usize>,
    ambient: usize,
}

impl Support {
    /// Sorts the indices; rejects duplicates and out-of-range entries.
    pub fn new(mut indices: Vec<usize>, ambient: usize) -> Result<Self, LinalgError> {
        indices.sort_unstable();
        if let Some(&bad) = indices.iter().find(|&&i| i >= ambient) {
            return Err(LinalgError::IndexOutOfBounds { index: bad, len: ambient });
        }
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(LinalgError::DuplicateIndex);
        }
        Ok(Self { indices, ambient })
    }

    pub fn full(ambient: usize) -> Self {
        Self { indices: (0..ambient).collect(), ambient }
    }

    pub fn empty(ambient: usize) -> Self {
        Self { indices: Vec::new(), ambient }
    }

    /// Indices whose entries exceed `threshold`.
    pub fn above<T: Real>(x: &Vector<T>, threshold: T) -> Self {
        Self {
            indices: x.iter().enumerate().filter(|(_, &v)| v > threshold).map(|(i, _)| i).collect(),
            ambient: x.len(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    /// Adds `i`, keeping the order. Panics if out of range.
    pub fn insert(&mut self, i: usize) {
        assert!(i < self.ambient, "support index out of range");
        if let Err(pos) = self.indices.binary_search(&i) {
            self.indices.insert(pos, i);
        }
    }

    pub fn remove(&mut self, i: usize) {
        if let Ok(pos) = self.indices.binary_search(&i) {
            self.indices.remove(pos);
        }
    }

    /// Scatters `values` (one per support index) into a vector of length
    /// `ambient`, zero elsewhere.
    pub fn expand<T: Real>(&self, values: &[T]) -> Vector<T> {
        assert_eq!(values.len(), self.len());
        let mut out = Vector::zeros(self.ambient);
        for (&i, &v) in self.indices.iter().zip(values) {
            out.as_mut_slice()[i] = v;
        }
        out
    }

    /// All supports of the given cardinality, in lexicographic order.
    pub fn combinations(ambient: usize, size: usize) -> Combinations {
        Combinations { ambient, current: (0..size).collect(), done: size > ambient }
    }
}

/// Lexicographic enumeration of `size`-subsets of `0..ambient`.
#[derive(Debug)]
pub struct Combinations {
    ambient: usize,
    current: Vec<usize>,
    done: bool,
}

impl Iterator for Combinations {
    type Item = Support;

    fn next(&mut self) -> Option<Support> {
        if self.done {
            return None;
        }
        let out = Support { indices: self.current.clone(), ambient: self.ambient };
        let k = self.current.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.current[i] < self.ambient - k + i {
                self.current[i] += 1;
                for j in i + 1..k {
                    self.current[j] = self.current[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}
