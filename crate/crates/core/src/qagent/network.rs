//! Forward and backward passes of the embedding + LSTM + 2-layer Q head.
//!
//! The state vector is the mean of the LSTM outputs over all timesteps.
//! Gradients flow back through the head, the mean pooling, the unrolled
//! LSTM and into the embedding rows of the tokens that were read.

use super::params::QParams;
use super::QError;

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `out[r] = b[r] + sum_k w[r, k] * x[k]`
fn affine(w: &[f64], b: &[f64], x: &[f64], out: &mut [f64]) {
    let cols = x.len();
    for (r, o) in out.iter_mut().enumerate() {
        let row = &w[r * cols..(r + 1) * cols];
        *o = b[r] + row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
    }
}

/// `dw += dy ⊗ x`, `db += dy`, `dx += wᵀ dy`
fn affine_backward(
    w: &[f64],
    x: &[f64],
    dy: &[f64],
    dw: &mut [f64],
    db: &mut [f64],
    dx: Option<&mut [f64]>,
) {
    let cols = x.len();
    for (r, &g) in dy.iter().enumerate() {
        if g == 0.0 {
            continue;
        }
        db[r] += g;
        let row = &mut dw[r * cols..(r + 1) * cols];
        for (d, xv) in row.iter_mut().zip(x) {
            *d += g * xv;
        }
    }
    if let Some(dx) = dx {
        for (r, &g) in dy.iter().enumerate() {
            if g == 0.0 {
                continue;
            }
            let row = &w[r * cols..(r + 1) * cols];
            for (d, wv) in dx.iter_mut().zip(row) {
                *d += g * wv;
            }
        }
    }
}

/// Activations kept from the forward pass.
pub struct Forward {
    ids: Vec<u32>,
    /// `[x_t; h_{t-1}]` per step
    inputs: Vec<Vec<f64>>,
    /// activated gates `[i, f, g, o]` per step, each of length 4H
    gates: Vec<Vec<f64>>,
    /// cell states c_0 .. c_T (c_0 = 0)
    cells: Vec<Vec<f64>>,
    pub state: Vec<f64>,
    pre_hidden: Vec<f64>,
    hidden: Vec<f64>,
    pub q: Vec<f64>,
}

fn check_ids(params: &QParams, ids: &[u32]) -> Result<(), QError> {
    if ids.is_empty() {
        return Err(QError::Usage("empty id sequence".into()));
    }
    if let Some(&bad) = ids.iter().find(|&&i| i as usize >= params.dims.vocab_size) {
        return Err(QError::Usage(format!(
            "token id {bad} out of range for vocabulary of {}",
            params.dims.vocab_size
        )));
    }
    Ok(())
}

fn run_lstm(params: &QParams, ids: &[u32]) -> Forward {
    let d = params.dims;
    let (e, h) = (d.embed_dim, d.hidden_dim);
    let t_len = ids.len();
    let mut inputs = Vec::with_capacity(t_len);
    let mut gates = Vec::with_capacity(t_len);
    let mut cells = Vec::with_capacity(t_len + 1);
    cells.push(vec![0.0; h]);
    let mut h_prev = vec![0.0; h];
    let mut state = vec![0.0; h];
    let mut z = vec![0.0; 4 * h];

    for &id in ids {
        let mut inp = Vec::with_capacity(e + h);
        let row = id as usize * e;
        inp.extend_from_slice(&params.embedding[row..row + e]);
        inp.extend_from_slice(&h_prev);
        affine(&params.lstm_w, &params.lstm_b, &inp, &mut z);
        for k in 0..h {
            z[k] = sigmoid(z[k]);
            z[h + k] = sigmoid(z[h + k]);
            z[2 * h + k] = z[2 * h + k].tanh();
            z[3 * h + k] = sigmoid(z[3 * h + k]);
        }
        let c_prev = cells.last().expect("c_0 present");
        let mut c = vec![0.0; h];
        for k in 0..h {
            c[k] = z[h + k] * c_prev[k] + z[k] * z[2 * h + k];
            h_prev[k] = z[3 * h + k] * c[k].tanh();
            state[k] += h_prev[k];
        }
        inputs.push(inp);
        gates.push(z.clone());
        cells.push(c);
    }
    let inv = 1.0 / t_len as f64;
    state.iter_mut().for_each(|s| *s *= inv);

    Forward {
        ids: ids.to_vec(),
        inputs,
        gates,
        cells,
        state,
        pre_hidden: Vec::new(),
        hidden: Vec::new(),
        q: Vec::new(),
    }
}

fn run_head(params: &QParams, state: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let d = params.dims;
    let mut pre = vec![0.0; d.mlp_dim];
    affine(&params.head_w1, &params.head_b1, state, &mut pre);
    let hidden: Vec<f64> = pre.iter().map(|&v| v.max(0.0)).collect();
    let mut q = vec![0.0; d.action_count];
    affine(&params.head_w2, &params.head_b2, &hidden, &mut q);
    (pre, hidden, q)
}

/// Mean-pooled LSTM encoding of a token id sequence.
pub fn encode_state(params: &QParams, ids: &[u32]) -> Result<Vec<f64>, QError> {
    check_ids(params, ids)?;
    Ok(run_lstm(params, ids).state)
}

/// Per-action scores for an encoded state.
pub fn q_values(params: &QParams, state: &[f64]) -> Result<Vec<f64>, QError> {
    if state.len() != params.dims.hidden_dim {
        return Err(QError::Usage(format!(
            "state has length {}, expected {}",
            state.len(),
            params.dims.hidden_dim
        )));
    }
    Ok(run_head(params, state).2)
}

/// Full forward pass keeping activations for [`backward`].
pub fn forward(params: &QParams, ids: &[u32]) -> Result<Forward, QError> {
    check_ids(params, ids)?;
    let mut fwd = run_lstm(params, ids);
    let (pre, hidden, q) = run_head(params, &fwd.state);
    fwd.pre_hidden = pre;
    fwd.hidden = hidden;
    fwd.q = q;
    Ok(fwd)
}

/// Accumulates into `grads` the gradient of a loss whose derivative with
/// respect to the Q vector is `dq`.
pub fn backward(params: &QParams, fwd: &Forward, dq: &[f64], grads: &mut QParams) {
    let d = params.dims;
    let (e, h) = (d.embed_dim, d.hidden_dim);

    let mut d_hidden = vec![0.0; d.mlp_dim];
    affine_backward(
        &params.head_w2,
        &fwd.hidden,
        dq,
        &mut grads.head_w2,
        &mut grads.head_b2,
        Some(&mut d_hidden),
    );
    for (g, &pre) in d_hidden.iter_mut().zip(&fwd.pre_hidden) {
        if pre <= 0.0 {
            *g = 0.0;
        }
    }
    let mut d_state = vec![0.0; h];
    affine_backward(
        &params.head_w1,
        &fwd.state,
        &d_hidden,
        &mut grads.head_w1,
        &mut grads.head_b1,
        Some(&mut d_state),
    );

    let t_len = fwd.ids.len();
    let pooled: Vec<f64> = d_state.iter().map(|g| g / t_len as f64).collect();
    let mut dh_next = vec![0.0; h];
    let mut dc_next = vec![0.0; h];
    let mut dz = vec![0.0; 4 * h];
    let mut d_inp = vec![0.0; e + h];

    for t in (0..t_len).rev() {
        let g = &fwd.gates[t];
        let c = &fwd.cells[t + 1];
        let c_prev = &fwd.cells[t];
        for k in 0..h {
            let (ig, fg, cg, og) = (g[k], g[h + k], g[2 * h + k], g[3 * h + k]);
            let tc = c[k].tanh();
            let dh = pooled[k] + dh_next[k];
            let dc = dc_next[k] + dh * og * (1.0 - tc * tc);
            dz[k] = dc * cg * ig * (1.0 - ig);
            dz[h + k] = dc * c_prev[k] * fg * (1.0 - fg);
            dz[2 * h + k] = dc * ig * (1.0 - cg * cg);
            dz[3 * h + k] = dh * tc * og * (1.0 - og);
            dc_next[k] = dc * fg;
        }
        d_inp.iter_mut().for_each(|v| *v = 0.0);
        affine_backward(
            &params.lstm_w,
            &fwd.inputs[t],
            &dz,
            &mut grads.lstm_w,
            &mut grads.lstm_b,
            Some(&mut d_inp),
        );
        let row = fwd.ids[t] as usize * e;
        for (dst, src) in grads.embedding[row..row + e].iter_mut().zip(&d_inp[..e]) {
            *dst += src;
        }
        dh_next.copy_from_slice(&d_inp[e..]);
    }
}

#[cfg(test)]
mod tests {
    use super::super::params::QDims;
    use super::*;
    use rand::SeedableRng;

    fn dims() -> QDims {
        QDims {
            vocab_size: 10,
            embed_dim: 4,
            hidden_dim: 6,
            mlp_dim: 5,
            action_count: 3,
        }
    }

    #[test]
    fn zero_params_give_zero_outputs() {
        let p = QParams::zeros(dims());
        let s = encode_state(&p, &[1, 2, 3]).unwrap();
        assert!(s.iter().all(|&v| v == 0.0));
        assert!(q_values(&p, &s).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_step_mean_is_the_output() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let p = QParams::random(dims(), 0.5, &mut rng);
        let fwd = run_lstm(&p, &[4]);
        let g = &fwd.gates[0];
        let h = 6;
        for k in 0..h {
            let expect = g[3 * h + k] * fwd.cells[1][k].tanh();
            assert!((fwd.state[k] - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn shapes_and_errors() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let p = QParams::random(dims(), 0.1, &mut rng);
        for len in [1, 5, 40] {
            let ids: Vec<u32> = (0..len).map(|i| (i % 10) as u32).collect();
            assert_eq!(encode_state(&p, &ids).unwrap().len(), 6);
        }
        assert!(matches!(encode_state(&p, &[10]), Err(QError::Usage(_))));
        assert!(matches!(encode_state(&p, &[]), Err(QError::Usage(_))));
        assert!(matches!(q_values(&p, &[0.0; 5]), Err(QError::Usage(_))));
        assert_eq!(q_values(&p, &[0.0; 6]).unwrap().len(), 3);
    }

    #[test]
    fn bias_shift_preserves_argmax() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut p = QParams::random(dims(), 0.3, &mut rng);
        let s = encode_state(&p, &[1, 5, 7]).unwrap();
        let q0 = q_values(&p, &s).unwrap();
        p.head_b2.iter_mut().for_each(|b| *b += 2.5);
        let q1 = q_values(&p, &s).unwrap();
        for (a, b) in q0.iter().zip(&q1) {
            assert!((b - a - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn order_matters() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let p = QParams::random(dims(), 0.5, &mut rng);
        let a = encode_state(&p, &[2, 3, 4]).unwrap();
        let b = encode_state(&p, &[4, 3, 2]).unwrap();
        assert!(a.iter().zip(&b).any(|(x, y)| (x - y).abs() > 1e-9));
    }
}
