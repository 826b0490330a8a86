//! Binary model files.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic    8 bytes  "MORBENCH"
//! version  u32      1
//! kind     u32      1 = svm, 2 = mlp, 3 = bilstm
//! ndims    u32
//! dims     ndims x u64
//! count    u64      number of f64 values that follow
//! values   count x f64, row-major
//! ```
//!
//! Shapes per kind:
//! - svm: `[n_features]`; values `weights, bias, lambda`
//! - mlp: `[n_features, hidden]`; values `input_weights, hidden_bias, output_weights, output_bias`
//! - bilstm: `[vocab_rows, dim, hidden, trainable]`; values `embedding, layer1 fwd (W, U, b),
//!   layer1 bwd, layer2 fwd, layer2 bwd, dense_weights, dense_bias`

use std::fs;
use std::path::Path;

use super::bilstm::{BiLstmLayer, BiLstmModel};
use super::lstm::LstmParams;
use super::mlp::MlpModel;
use super::svm::SvmModel;
use crate::embeddings::EmbeddingTable;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub const MAGIC: &[u8; 8] = b"MORBENCH";
pub const VERSION: u32 = 1;

const KIND_SVM: u32 = 1;
const KIND_MLP: u32 = 2;
const KIND_BILSTM: u32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum SavedModel {
    Svm(SvmModel),
    Mlp(MlpModel),
    BiLstm(BiLstmModel),
}

fn encode(kind: u32, dims: &[u64], values: &[f64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(32 + dims.len() * 8 + values.len() * 8);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&kind.to_le_bytes());
    out.extend_from_slice(&(dims.len() as u32).to_le_bytes());
    for d in dims {
        out.extend_from_slice(&d.to_le_bytes());
    }
    out.extend_from_slice(&(values.len() as u64).to_le_bytes());
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(Error::Format("unexpected end of model file".into()));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

/// Consumes a flat value list in order.
struct Values {
    data: Vec<f64>,
    pos: usize,
}

impl Values {
    fn take(&mut self, n: usize) -> Result<Vec<f64>> {
        if self.pos + n > self.data.len() {
            return Err(Error::Format("value count does not match shapes".into()));
        }
        let v = self.data[self.pos..self.pos + n].to_vec();
        self.pos += n;
        Ok(v)
    }

    fn one(&mut self) -> Result<f64> {
        Ok(self.take(1)?[0])
    }

    fn matrix(&mut self, rows: usize, cols: usize) -> Result<Matrix> {
        Ok(Matrix::from_vec(rows, cols, self.take(rows * cols)?))
    }

    fn lstm(&mut self, input: usize, hidden: usize) -> Result<LstmParams> {
        Ok(LstmParams {
            w: self.matrix(4 * hidden, input)?,
            u: self.matrix(4 * hidden, hidden)?,
            b: self.take(4 * hidden)?,
        })
    }

    fn finish(self) -> Result<()> {
        if self.pos != self.data.len() {
            return Err(Error::Format("trailing values in model file".into()));
        }
        Ok(())
    }
}

impl SavedModel {
    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            SavedModel::Svm(m) => {
                let mut values = m.weights.clone();
                values.push(m.bias);
                values.push(m.lambda);
                encode(KIND_SVM, &[m.weights.len() as u64], &values)
            }
            SavedModel::Mlp(m) => {
                let mut values = Vec::new();
                for t in m.tensors() {
                    values.extend_from_slice(t);
                }
                encode(KIND_MLP, &[m.n_features() as u64, m.hidden() as u64], &values)
            }
            SavedModel::BiLstm(m) => {
                let mut values = m.embedding.rows.data.clone();
                for p in [&m.layer1.forward, &m.layer1.backward, &m.layer2.forward, &m.layer2.backward] {
                    for t in p.tensors() {
                        values.extend_from_slice(t);
                    }
                }
                values.extend_from_slice(&m.dense_weights);
                values.push(m.dense_bias);
                let dims = [
                    m.embedding.rows.rows as u64,
                    m.embedding.dim as u64,
                    m.hidden_size() as u64,
                    m.trainable_embeddings as u64,
                ];
                encode(KIND_BILSTM, &dims, &values)
            }
        }
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(8)? != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let kind = r.u32()?;
        let ndims = r.u32()? as usize;
        let dims = (0..ndims).map(|_| r.u64().map(|d| d as usize)).collect::<Result<Vec<_>>>()?;
        let count = r.u64()? as usize;
        if bytes.len().saturating_sub(r.pos) != count * 8 {
            return Err(Error::Format("value count does not match file length".into()));
        }
        let data = (0..count).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
        let mut v = Values { data, pos: 0 };
        let model = match (kind, dims.as_slice()) {
            (KIND_SVM, &[n]) => SavedModel::Svm(SvmModel {
                weights: v.take(n)?,
                bias: v.one()?,
                lambda: v.one()?,
            }),
            (KIND_MLP, &[n, h]) => SavedModel::Mlp(MlpModel {
                input_weights: v.matrix(n, h)?,
                hidden_bias: v.take(h)?,
                output_weights: v.take(h)?,
                output_bias: v.one()?,
            }),
            (KIND_BILSTM, &[rows, dim, h, trainable]) => {
                if rows == 0 {
                    return Err(Error::Format("embedding table without padding row".into()));
                }
                let embedding = EmbeddingTable {
                    dim,
                    rows: v.matrix(rows, dim)?,
                };
                let layer1 = BiLstmLayer {
                    forward: v.lstm(dim, h)?,
                    backward: v.lstm(dim, h)?,
                };
                let layer2 = BiLstmLayer {
                    forward: v.lstm(2 * h, h)?,
                    backward: v.lstm(2 * h, h)?,
                };
                SavedModel::BiLstm(BiLstmModel {
                    embedding,
                    trainable_embeddings: trainable != 0,
                    layer1,
                    layer2,
                    dense_weights: v.take(2 * h)?,
                    dense_bias: v.one()?,
                })
            }
            _ => return Err(Error::Format(format!("unknown model kind {kind} with {ndims} dims"))),
        };
        v.finish()?;
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}
