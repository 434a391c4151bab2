use std::ops::Index;

use crate::linalg::LinalgError;
use crate::scalar::Real;

/// Dense vector with finite entries.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Vector<T> {
    data: Vec<T>,
}

impl<T: Real> Vector<T> {
    /// Builds a vector, rejecting NaN and infinite entries.
    pub fn new(data: Vec<T>) -> Result<Self, LinalgError> {
        if let Some(index) = data.iter().position(|x| !x.is_finite()) {
            return Err(LinalgError::NonFinite { index });
        }
        Ok(Self { data })
    }

    pub fn from_f64(values: &[f64]) -> Result<Self, LinalgError> {
        Self::new(values.iter().map(|&v| T::lit(v)).collect())
    }

    /// Internal constructor for results of arithmetic on finite inputs.
    pub(crate) fn from_vec(data: Vec<T>) -> Self {
        Self { data }
    }

    pub fn zeros(len: usize) -> Self {
        Self { data: vec![T::zero(); len] }
    }

    /// The `i`-th standard basis vector of length `len`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.data[i] = T::one();
        v
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.data.iter()
    }

    pub fn into_inner(self) -> Vec<T> {
        self.data
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.data.iter().map(|x| x.to_f64_lossy()).collect()
    }

    pub fn dot(&self, other: &Self) -> T {
        dot(&self.data, &other.data)
    }

    pub fn norm(&self) -> T {
        norm(&self.data)
    }

    pub fn norm_squared(&self) -> T {
        dot(&self.data, &self.data)
    }

    /// Largest absolute entry; zero for the empty vector.
    pub fn norm_inf(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn min_entry(&self) -> Option<T> {
        self.data.iter().copied().reduce(T::min)
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "vector length mismatch");
        Self::from_vec(self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "vector length mismatch");
        Self::from_vec(self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect())
    }

    pub fn scale(&self, alpha: T) -> Self {
        Self::from_vec(self.data.iter().map(|&a| alpha * a).collect())
    }

    pub fn neg(&self) -> Self {
        Self::from_vec(self.data.iter().map(|&a| -a).collect())
    }

    /// `self + alpha * other`
    pub fn axpy(&self, alpha: T, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "vector length mismatch");
        Self::from_vec(self.data.iter().zip(&other.data).map(|(&a, &b)| a + alpha * b).collect())
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }
}

impl<T> Index<usize> for Vector<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.data[i]
    }
}

impl<'a, T> IntoIterator for &'a Vector<T> {
    type Item = &'a T;
    type IntoIter = std::slice::Iter<'a, T>;

    fn into_iter(self) -> Self::IntoIter {
        self.data.iter()
    }
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub(crate) fn norm<T: Real>(a: &[T]) -> T {
    // Rescale so squares of large or tiny entries do not over/underflow.
    let scale = a.iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
    if scale.is_zero() {
        return T::zero();
    }
    let sum = a.iter().fold(T::zero(), |acc, &x| {
        let r = x / scale;
        acc + r * r
    });
    scale * sum.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_entries() {
        assert_eq!(
            Vector::<f64>::new(vec![1.0, f64::NAN]),
            Err(LinalgError::NonFinite { index: 1 })
        );
        assert!(Vector::<f64>::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn norm_is_scale_safe() {
        let v = Vector::<f64>::new(vec![3e200, 4e200]).unwrap();
        assert!((v.norm() / 5e200 - 1.0).abs() < 1e-15);
        let w = Vector::<f64>::new(vec![3.0, 4.0]).unwrap();
        assert_eq!(w.norm(), 5.0);
        assert_eq!(Vector::<f64>::zeros(3).norm(), 0.0);
    }

    #[test]
    fn arithmetic() {
        let a = Vector::<f64>::from_f64(&[1.0, 2.0]).unwrap();
        let b = Vector::<f64>::from_f64(&[3.0, -1.0]).unwrap();
        assert_eq!(a.dot(&b), 1.0);
        assert_eq!(a.sub(&b).as_slice(), &[-2.0, 3.0]);
        assert_eq!(a.axpy(2.0, &b).as_slice(), &[7.0, 0.0]);
        assert_eq!(b.norm_inf(), 3.0);
        assert_eq!(b.min_entry(), Some(-1.0));
    }
}
