use std::io::{Read, Write};

use rand_distr::{Distribution, StandardNormal};

use super::RngStream;
use crate::error::{Error, Result};
use crate::field::Field;

pub const DUMP_MAGIC: &[u8; 4] = b"NERF";
pub const DUMP_VERSION: u32 = 1;

/// Dense row-major matrix over ℝ or ℂ. Complex entries are stored as
/// interleaved `(re, im)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    field: Field,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, field: Field, data: Vec<f64>) -> Result<Self> {
        let expected = rows * cols * field.real_dim();
        if data.len() != expected {
            return Err(Error::Domain(format!(
                "{rows}x{cols} {field:?} matrix needs {expected} reals, got {}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|x| !x.is_finite()) {
            return Err(Error::Domain(format!("non-finite matrix entry {bad}")));
        }
        Ok(Self {
            rows,
            cols,
            field,
            data,
        })
    }

    pub fn zeros(rows: usize, cols: usize, field: Field) -> Self {
        Self {
            rows,
            cols,
            field,
            data: vec![0.0; rows * cols * field.real_dim()],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n, Field::Real);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Raw storage, row-major, `(re, im)` pairs for complex.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Entry `(i, j)` as `(re, im)`; `im` is zero for real matrices.
    pub fn get(&self, i: usize, j: usize) -> (f64, f64) {
        match self.field {
            Field::Real => (self.data[i * self.cols + j], 0.0),
            Field::Complex => {
                let k = 2 * (i * self.cols + j);
                (self.data[k], self.data[k + 1])
            }
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            data: self.data.iter().map(|x| x * factor).collect(),
            ..self.clone()
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// The columns `indices`, in that order.
    pub fn select_columns(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&index) = indices.iter().find(|&&j| j >= self.cols) {
            return Err(Error::IndexOutOfRange {
                index,
                cols: self.cols,
            });
        }
        let w = self.field.real_dim();
        let mut data = Vec::with_capacity(self.rows * indices.len() * w);
        for i in 0..self.rows {
            let row = &self.data[i * self.cols * w..(i + 1) * self.cols * w];
            for &j in indices {
                data.extend_from_slice(&row[j * w..(j + 1) * w]);
            }
        }
        Ok(Self {
            rows: self.rows,
            cols: indices.len(),
            field: self.field,
            data,
        })
    }

    /// Little-endian dump: `"NERF"`, version u32, rows u64, cols u64,
    /// field u8 (0 real, 1 complex), then the row-major f64 payload.
    pub fn write_dump<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(DUMP_MAGIC)?;
        w.write_all(&DUMP_VERSION.to_le_bytes())?;
        w.write_all(&(self.rows as u64).to_le_bytes())?;
        w.write_all(&(self.cols as u64).to_le_bytes())?;
        w.write_all(&[match self.field {
            Field::Real => 0u8,
            Field::Complex => 1u8,
        }])?;
        for x in &self.data {
            w.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_dump<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != DUMP_MAGIC {
            return Err(Error::Format(format!("bad magic {magic:?}")));
        }
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b4)?;
        let version = u32::from_le_bytes(b4);
        if version != DUMP_VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let rows = u64::from_le_bytes(b8) as usize;
        r.read_exact(&mut b8)?;
        let cols = u64::from_le_bytes(b8) as usize;
        let mut tag = [0u8; 1];
        r.read_exact(&mut tag)?;
        let field = match tag[0] {
            0 => Field::Real,
            1 => Field::Complex,
            t => return Err(Error::Format(format!("unknown field tag {t}"))),
        };
        let len = rows
            .checked_mul(cols)
            .and_then(|x| x.checked_mul(field.real_dim()))
            .ok_or_else(|| Error::Format("dimensions overflow".into()))?;
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            r.read_exact(&mut b8)?;
            data.push(f64::from_le_bytes(b8));
        }
        Self::new(rows, cols, field, data)
    }
}

/// `rows × cols` matrix of i.i.d. standard normals; complex entries are
/// `X + iY` with `X`, `Y` i.i.d. standard normal.
pub fn gaussian_matrix(rng: &RngStream, rows: usize, cols: usize, field: Field) -> DenseMatrix {
    let mut r = rng.rng();
    let data = (0..rows * cols * field.real_dim())
        .map(|_| StandardNormal.sample(&mut r))
        .collect();
    DenseMatrix {
        rows,
        cols,
        field,
        data,
    }
}
