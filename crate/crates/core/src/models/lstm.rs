//! LSTM cell and single-direction sequence runs with backpropagation
//! through time.
//!
//! Gate pre-activations are stacked in the order input, forget, output,
//! candidate:
//!
//! ```text
//! i = σ(W_i x + U_i h + b_i)    f = σ(W_f x + U_f h + b_f)
//! o = σ(W_o x + U_o h + b_o)    g = tanh(W_g x + U_g h + b_g)
//! c_t = f ⊙ c_prev + i ⊙ g      h_t = o ⊙ tanh(c_t)
//! ```

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{sigmoid, Matrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmParams {
    /// `4h x input`
    pub w: Matrix,
    /// `4h x h`
    pub u: Matrix,
    /// `4h`
    pub b: Vec<f64>,
}

impl LstmParams {
    pub fn zeros(input: usize, hidden: usize) -> Self {
        LstmParams {
            w: Matrix::zeros(4 * hidden, input),
            u: Matrix::zeros(4 * hidden, hidden),
            b: vec![0.0; 4 * hidden],
        }
    }

    /// Glorot-uniform weights, zero biases except a forget-gate bias of 1.
    pub fn init<R: Rng>(input: usize, hidden: usize, rng: &mut R) -> Self {
        let w = Matrix::glorot(4 * hidden, input, rng);
        let u = Matrix::glorot(4 * hidden, hidden, rng);
        let mut b = vec![0.0; 4 * hidden];
        b[hidden..2 * hidden].fill(1.0);
        LstmParams { w, u, b }
    }

    pub fn input_size(&self) -> usize {
        self.w.cols
    }

    pub fn hidden_size(&self) -> usize {
        self.u.cols
    }

    pub fn tensors(&self) -> [&[f64]; 3] {
        [&self.w.data, &self.u.data, &self.b]
    }

    pub fn tensors_mut(&mut self) -> [&mut [f64]; 3] {
        [&mut self.w.data, &mut self.u.data, &mut self.b]
    }
}

/// Everything the backward pass needs from one timestep.
#[derive(Debug, Clone)]
pub struct CellCache {
    pub x: Vec<f64>,
    pub h_prev: Vec<f64>,
    pub c_prev: Vec<f64>,
    /// Activated gates `[i, f, o, g]`, each of width `h`.
    pub gates: Vec<f64>,
    pub c: Vec<f64>,
    pub tanh_c: Vec<f64>,
    pub h: Vec<f64>,
}

pub fn cell_forward(p: &LstmParams, x: &[f64], h_prev: &[f64], c_prev: &[f64]) -> CellCache {
    let h = p.hidden_size();
    let mut gates = p.b.clone();
    p.w.matvec_acc(x, &mut gates);
    p.u.matvec_acc(h_prev, &mut gates);
    for v in &mut gates[..3 * h] {
        *v = sigmoid(*v);
    }
    for v in &mut gates[3 * h..] {
        *v = v.tanh();
    }
    let mut c = vec![0.0; h];
    let mut tanh_c = vec![0.0; h];
    let mut hv = vec![0.0; h];
    for j in 0..h {
        let (i, f, o, g) = (gates[j], gates[h + j], gates[2 * h + j], gates[3 * h + j]);
        c[j] = f * c_prev[j] + i * g;
        tanh_c[j] = c[j].tanh();
        hv[j] = o * tanh_c[j];
    }
    CellCache {
        x: x.to_vec(),
        h_prev: h_prev.to_vec(),
        c_prev: c_prev.to_vec(),
        gates,
        c,
        tanh_c,
        h: hv,
    }
}

/// One LSTM step with shape checks. Returns `(h_t, c_t)`.
pub fn lstm_cell(
    x: &[f64],
    h_prev: &[f64],
    c_prev: &[f64],
    params: &LstmParams,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let h = params.hidden_size();
    if x.len() != params.input_size() || h_prev.len() != h || c_prev.len() != h {
        return Err(Error::Shape(format!(
            "lstm cell expects x[{}], h[{h}], c[{h}]; got x[{}], h[{}], c[{}]",
            params.input_size(),
            x.len(),
            h_prev.len(),
            c_prev.len()
        )));
    }
    let cache = cell_forward(params, x, h_prev, c_prev);
    Ok((cache.h, cache.c))
}

/// Backward through one step. Accumulates parameter gradients into `grads`
/// and input gradients into `dx`; returns `(dh_prev, dc_prev)`.
pub fn cell_backward(
    p: &LstmParams,
    cache: &CellCache,
    dh: &[f64],
    dc: &[f64],
    grads: &mut LstmParams,
    dx: &mut [f64],
) -> (Vec<f64>, Vec<f64>) {
    let h = p.hidden_size();
    let g = &cache.gates;
    let mut da = vec![0.0; 4 * h];
    let mut dc_prev = vec![0.0; h];
    for j in 0..h {
        let (i, f, o, gg) = (g[j], g[h + j], g[2 * h + j], g[3 * h + j]);
        let tc = cache.tanh_c[j];
        let d_o = dh[j] * tc;
        let dct = dc[j] + dh[j] * o * (1.0 - tc * tc);
        let d_i = dct * gg;
        let d_g = dct * i;
        let d_f = dct * cache.c_prev[j];
        dc_prev[j] = dct * f;
        da[j] = d_i * i * (1.0 - i);
        da[h + j] = d_f * f * (1.0 - f);
        da[2 * h + j] = d_o * o * (1.0 - o);
        da[3 * h + j] = d_g * (1.0 - gg * gg);
    }
    grads.w.add_outer(&da, &cache.x);
    grads.u.add_outer(&da, &cache.h_prev);
    for (gb, d) in grads.b.iter_mut().zip(&da) {
        *gb += d;
    }
    p.w.matvec_t_acc(&da, dx);
    let mut dh_prev = vec![0.0; h];
    p.u.matvec_t_acc(&da, &mut dh_prev);
    (dh_prev, dc_prev)
}

/// Runs one direction over a sequence from zero state. Caches are indexed by
/// sequence position, so `caches[t].h` is the state emitted at position `t`
/// whichever way the sequence was traversed.
pub fn run_direction(p: &LstmParams, xs: &[Vec<f64>], reverse: bool) -> Vec<CellCache> {
    let h = p.hidden_size();
    let n = xs.len();
    let mut caches: Vec<Option<CellCache>> = vec![None; n];
    let mut h_prev = vec![0.0; h];
    let mut c_prev = vec![0.0; h];
    for step in 0..n {
        let t = if reverse { n - 1 - step } else { step };
        let cache = cell_forward(p, &xs[t], &h_prev, &c_prev);
        h_prev.clone_from(&cache.h);
        c_prev.clone_from(&cache.c);
        caches[t] = Some(cache);
    }
    caches.into_iter().map(|c| c.expect("every position visited")).collect()
}

/// Backpropagation through time for one direction. `dh_out[t]` is the loss
/// gradient with respect to the state emitted at position `t`. Input
/// gradients are added into `dx[t]`.
pub fn backprop_direction(
    p: &LstmParams,
    caches: &[CellCache],
    dh_out: &[Vec<f64>],
    reverse: bool,
    grads: &mut LstmParams,
    dx: &mut [Vec<f64>],
) {
    let h = p.hidden_size();
    let n = caches.len();
    let mut dh_next = vec![0.0; h];
    let mut dc_next = vec![0.0; h];
    for step in (0..n).rev() {
        let t = if reverse { n - 1 - step } else { step };
        let dh: Vec<f64> = dh_out[t].iter().zip(&dh_next).map(|(a, b)| a + b).collect();
        let (dhp, dcp) = cell_backward(p, &caches[t], &dh, &dc_next, grads, &mut dx[t]);
        dh_next = dhp;
        dc_next = dcp;
    }
}
