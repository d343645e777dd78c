//! Serialization helpers. Matrices are written as `{rows, cols, data}` with
//! `data` in row-major order; vectors as plain arrays.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::matrix_ops::{Matrix, SpdMatrix, Vector};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MatrixRecord<T: Real> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Real> From<&Matrix<T>> for MatrixRecord<T> {
    fn from(m: &Matrix<T>) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            data.extend(m.row(i).iter().copied());
        }
        Self { rows: m.nrows(), cols: m.ncols(), data }
    }
}

impl<T: Real> MatrixRecord<T> {
    pub fn to_matrix(&self) -> Result<Matrix<T>, String> {
        if self.rows * self.cols != self.data.len() {
            return Err(format!(
                "matrix record declares {}x{} but holds {} entries",
                self.rows,
                self.cols,
                self.data.len()
            ));
        }
        Ok(Matrix::from_row_slice(self.rows, self.cols, &self.data))
    }
}

pub mod matrix_serde {
    use super::*;

    pub fn serialize<T: Real, S: Serializer>(m: &Matrix<T>, s: S) -> Result<S::Ok, S::Error> {
        MatrixRecord::from(m).serialize(s)
    }

    pub fn deserialize<'de, T: Real, D: Deserializer<'de>>(d: D) -> Result<Matrix<T>, D::Error> {
        MatrixRecord::<T>::deserialize(d)?
            .to_matrix()
            .map_err(serde::de::Error::custom)
    }
}

pub mod spd_serde {
    use super::*;

    pub fn serialize<T: Real, S: Serializer>(m: &SpdMatrix<T>, s: S) -> Result<S::Ok, S::Error> {
        MatrixRecord::from(m.as_matrix()).serialize(s)
    }

    pub fn deserialize<'de, T: Real, D: Deserializer<'de>>(d: D) -> Result<SpdMatrix<T>, D::Error> {
        let m = MatrixRecord::<T>::deserialize(d)?
            .to_matrix()
            .map_err(serde::de::Error::custom)?;
        SpdMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

pub mod vector_serde {
    use super::*;

    pub fn serialize<T: Real, S: Serializer>(v: &Vector<T>, s: S) -> Result<S::Ok, S::Error> {
        v.as_slice().serialize(s)
    }

    pub fn deserialize<'de, T: Real, D: Deserializer<'de>>(d: D) -> Result<Vector<T>, D::Error> {
        let data = Vec::<T>::deserialize(d)?;
        Ok(Vector::from_vec(data))
    }
}

pub mod option_matrix_serde {
    use super::*;

    pub fn serialize<T: Real, S: Serializer>(m: &Option<Matrix<T>>, s: S) -> Result<S::Ok, S::Error> {
        m.as_ref().map(MatrixRecord::from).serialize(s)
    }

    pub fn deserialize<'de, T: Real, D: Deserializer<'de>>(
        d: D,
    ) -> Result<Option<Matrix<T>>, D::Error> {
        match Option::<MatrixRecord<T>>::deserialize(d)? {
            None => Ok(None),
            Some(r) => r.to_matrix().map(Some).map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Holder {
        #[serde(with = "matrix_serde")]
        m: Matrix<f64>,
        #[serde(with = "vector_serde")]
        v: Vector<f64>,
    }

    #[test]
    fn row_major_round_trip() {
        let h = Holder {
            m: Matrix::from_row_slice(2, 3, &[1., 2., 3., 4., 5., 6.]),
            v: Vector::from_column_slice(&[7., 8.]),
        };
        let s = serde_json::to_string(&h).unwrap();
        assert!(s.contains("\"data\":[1.0,2.0,3.0,4.0,5.0,6.0]"), "{s}");
        let back: Holder = serde_json::from_str(&s).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn rejects_inconsistent_dims() {
        let s = r#"{"m":{"rows":2,"cols":2,"data":[1.0]},"v":[]}"#;
        assert!(serde_json::from_str::<Holder>(s).is_err());
    }
}
