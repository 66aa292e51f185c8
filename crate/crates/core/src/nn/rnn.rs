//! GRU and LSTM sequence encoders with backpropagation through time.
//!
//! One direction processes the input either left-to-right or right-to-left;
//! the bidirectional wrappers used by the architectures concatenate both
//! outputs per time step. Initial hidden (and cell) state is zero unless a
//! caller injects one.
//!
//! GRU step:
//!   z = sigm(x W_z + h U_z + b_z)
//!   r = sigm(x W_r + h U_r + b_r)
//!   h~ = tanh(x W_h + (r . h) U_h + b_h)
//!   h_t = z . h_prev + (1 - z) . h~
//!
//! LSTM step:
//!   i, f, o = sigm(x W + h U + b); g = tanh(x W_g + h U_g + b_g)
//!   c_t = f . c_prev + i . g; h_t = o . tanh(c_t)

use crate::scalar::Scalar;

use super::params::ParameterStore;
use super::tensor::{dot, outer_add, Tensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RnnKind {
    Gru,
    Lstm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
    Bi,
}

pub const GRU_GATES: [&str; 3] = ["z", "r", "h"];
pub const LSTM_GATES: [&str; 4] = ["i", "f", "o", "g"];

/// `(suffix, shape)` pairs for one direction of a recurrent layer with
/// input width `d` and `u` units. Suffixes are joined under the layer
/// prefix by the architecture builder.
pub fn dir_param_shapes(kind: RnnKind, d: usize, u: usize) -> Vec<(String, Vec<usize>)> {
    let gates: &[&str] = match kind {
        RnnKind::Gru => &GRU_GATES,
        RnnKind::Lstm => &LSTM_GATES,
    };
    let mut shapes = Vec::new();
    for gate in gates {
        shapes.push((format!("w_{gate}"), vec![d, u]));
        shapes.push((format!("u_{gate}"), vec![u, u]));
        shapes.push((format!("b_{gate}"), vec![u]));
    }
    shapes
}

fn sigmoid<S: Scalar>(x: S) -> S {
    S::one() / (S::one() + (-x).exp())
}

/// `out[k] = b[k] + sum_i x[i] W[i,k] + sum_j h[j] U[j,k]`
fn gate_preact<S: Scalar>(x: &[S], w: &[S], h: &[S], u_mat: &[S], b: &[S], out: &mut [S]) {
    let u = out.len();
    out.copy_from_slice(b);
    for (i, &xv) in x.iter().enumerate() {
        let row = &w[i * u..(i + 1) * u];
        for (o, &wv) in out.iter_mut().zip(row) {
            *o += xv * wv;
        }
    }
    for (j, &hv) in h.iter().enumerate() {
        let row = &u_mat[j * u..(j + 1) * u];
        for (o, &uv) in out.iter_mut().zip(row) {
            *o += hv * uv;
        }
    }
}

/// Borrowed views of one direction's parameters, pulled from a store by
/// prefix (e.g. `text.gru1.fw.`).
pub struct GruDirParams<'a, S: Scalar> {
    pub w: [&'a Tensor<S>; 3],
    pub u: [&'a Tensor<S>; 3],
    pub b: [&'a Tensor<S>; 3],
}

impl<'a, S: Scalar> GruDirParams<'a, S> {
    pub fn gather(store: &'a ParameterStore<S>, prefix: &str) -> Self {
        let pick = |kind: &str, gate: &str| store.get(&format!("{prefix}{kind}_{gate}"));
        GruDirParams {
            w: [pick("w", "z"), pick("w", "r"), pick("w", "h")],
            u: [pick("u", "z"), pick("u", "r"), pick("u", "h")],
            b: [pick("b", "z"), pick("b", "r"), pick("b", "h")],
        }
    }

    pub fn units(&self) -> usize {
        self.b[0].len()
    }
}

#[derive(Debug, Clone)]
pub struct GruDirCache<S: Scalar> {
    reverse: bool,
    h0: Vec<S>,
    /// Per processing step: gate activations and hidden states, `[T, u]`.
    z: Tensor<S>,
    r: Tensor<S>,
    ht: Tensor<S>,
    h: Tensor<S>,
}

/// Owned gradients for one GRU direction, same indexing as the params.
pub struct GruDirGrads<S: Scalar> {
    pub w: [Tensor<S>; 3],
    pub u: [Tensor<S>; 3],
    pub b: [Tensor<S>; 3],
}

impl<S: Scalar> GruDirGrads<S> {
    pub fn accumulate_into(&self, store: &mut ParameterStore<S>, prefix: &str, scale: S) {
        for (idx, gate) in GRU_GATES.iter().enumerate() {
            store.add_grad_scaled(&format!("{prefix}w_{gate}"), &self.w[idx], scale);
            store.add_grad_scaled(&format!("{prefix}u_{gate}"), &self.u[idx], scale);
            store.add_grad_scaled(&format!("{prefix}b_{gate}"), &self.b[idx], scale);
        }
    }
}

/// Run one GRU direction over `x: [T, d]`, producing hidden states aligned
/// to the original time axis (`reverse` processes t = T-1..0).
pub fn gru_dir_forward<S: Scalar>(
    x: &Tensor<S>,
    p: &GruDirParams<S>,
    reverse: bool,
    h0: Option<&[S]>,
) -> (Tensor<S>, GruDirCache<S>) {
    let t_len = x.shape()[0];
    let u = p.units();
    let h0 = h0.map_or_else(|| vec![S::zero(); u], <[S]>::to_vec);

    let mut z = Tensor::zeros(&[t_len, u]);
    let mut r = Tensor::zeros(&[t_len, u]);
    let mut ht = Tensor::zeros(&[t_len, u]);
    let mut h = Tensor::zeros(&[t_len, u]);

    let mut h_prev = h0.clone();
    let mut rh = vec![S::zero(); u];
    for s in 0..t_len {
        let t = if reverse { t_len - 1 - s } else { s };
        let xt = x.row(t);
        {
            let zs = z.row_mut(s);
            gate_preact(xt, p.w[0].data(), &h_prev, p.u[0].data(), p.b[0].data(), zs);
            zs.iter_mut().for_each(|v| *v = sigmoid(*v));
        }
        {
            let rs = r.row_mut(s);
            gate_preact(xt, p.w[1].data(), &h_prev, p.u[1].data(), p.b[1].data(), rs);
            rs.iter_mut().for_each(|v| *v = sigmoid(*v));
        }
        for k in 0..u {
            rh[k] = r.row(s)[k] * h_prev[k];
        }
        {
            let hts = ht.row_mut(s);
            gate_preact(xt, p.w[2].data(), &rh, p.u[2].data(), p.b[2].data(), hts);
            hts.iter_mut().for_each(|v| *v = v.tanh());
        }
        for k in 0..u {
            let zv = z.row(s)[k];
            h.row_mut(s)[k] = zv * h_prev[k] + (S::one() - zv) * ht.row(s)[k];
        }
        h_prev.copy_from_slice(h.row(s));
    }

    // Align outputs to the time axis.
    let mut out = Tensor::zeros(&[t_len, u]);
    for s in 0..t_len {
        let t = if reverse { t_len - 1 - s } else { s };
        out.row_mut(t).copy_from_slice(h.row(s));
    }
    let cache = GruDirCache {
        reverse,
        h0,
        z,
        r,
        ht,
        h,
    };
    (out, cache)
}

/// Backpropagate through time. `dh` holds the upstream gradient for every
/// aligned hidden state `[T, u]`; returns `dX: [T, d]` and the parameter
/// gradients.
pub fn gru_dir_backward<S: Scalar>(
    dh: &Tensor<S>,
    x: &Tensor<S>,
    p: &GruDirParams<S>,
    cache: &GruDirCache<S>,
) -> (Tensor<S>, GruDirGrads<S>) {
    let t_len = x.shape()[0];
    let d = x.shape()[1];
    let u = p.units();
    let mut grads = GruDirGrads {
        w: [
            Tensor::zeros(&[d, u]),
            Tensor::zeros(&[d, u]),
            Tensor::zeros(&[d, u]),
        ],
        u: [
            Tensor::zeros(&[u, u]),
            Tensor::zeros(&[u, u]),
            Tensor::zeros(&[u, u]),
        ],
        b: [Tensor::zeros(&[u]), Tensor::zeros(&[u]), Tensor::zeros(&[u])],
    };
    let mut dx = Tensor::zeros(&[t_len, d]);

    let mut carry = vec![S::zero(); u];
    let mut g = vec![S::zero(); u];
    let mut da_z = vec![S::zero(); u];
    let mut da_r = vec![S::zero(); u];
    let mut da_h = vec![S::zero(); u];
    let mut d_rh = vec![S::zero(); u];
    let mut rh = vec![S::zero(); u];
    let one = S::one();

    for s in (0..t_len).rev() {
        let t = if cache.reverse { t_len - 1 - s } else { s };
        let h_prev: &[S] = if s == 0 { &cache.h0 } else { cache.h.row(s - 1) };
        let (z, r, ht) = (cache.z.row(s), cache.r.row(s), cache.ht.row(s));

        for k in 0..u {
            g[k] = dh.row(t)[k] + carry[k];
            let dz = g[k] * (h_prev[k] - ht[k]);
            da_z[k] = dz * z[k] * (one - z[k]);
            let dht = g[k] * (one - z[k]);
            da_h[k] = dht * (one - ht[k] * ht[k]);
            rh[k] = r[k] * h_prev[k];
        }
        // d(r . h_prev) through the candidate gate.
        for (j, drh) in d_rh.iter_mut().enumerate() {
            *drh = dot(&p.u[2].data()[j * u..(j + 1) * u], &da_h);
        }
        for k in 0..u {
            let dr = d_rh[k] * h_prev[k];
            da_r[k] = dr * r[k] * (one - r[k]);
        }

        let xt = x.row(t);
        outer_add(grads.w[0].data_mut(), xt, &da_z);
        outer_add(grads.w[1].data_mut(), xt, &da_r);
        outer_add(grads.w[2].data_mut(), xt, &da_h);
        outer_add(grads.u[0].data_mut(), h_prev, &da_z);
        outer_add(grads.u[1].data_mut(), h_prev, &da_r);
        outer_add(grads.u[2].data_mut(), &rh, &da_h);
        for k in 0..u {
            grads.b[0].data_mut()[k] += da_z[k];
            grads.b[1].data_mut()[k] += da_r[k];
            grads.b[2].data_mut()[k] += da_h[k];
        }

        let dxt = dx.row_mut(t);
        for (i, dxv) in dxt.iter_mut().enumerate() {
            *dxv = dot(&p.w[0].data()[i * u..(i + 1) * u], &da_z)
                + dot(&p.w[1].data()[i * u..(i + 1) * u], &da_r)
                + dot(&p.w[2].data()[i * u..(i + 1) * u], &da_h);
        }

        for (j, c) in carry.iter_mut().enumerate() {
            *c = g[j] * z[j]
                + d_rh[j] * r[j]
                + dot(&p.u[0].data()[j * u..(j + 1) * u], &da_z)
                + dot(&p.u[1].data()[j * u..(j + 1) * u], &da_r);
        }
    }

    (dx, grads)
}

pub struct LstmDirParams<'a, S: Scalar> {
    pub w: [&'a Tensor<S>; 4],
    pub u: [&'a Tensor<S>; 4],
    pub b: [&'a Tensor<S>; 4],
}

impl<'a, S: Scalar> LstmDirParams<'a, S> {
    pub fn gather(store: &'a ParameterStore<S>, prefix: &str) -> Self {
        let pick = |kind: &str, gate: &str| store.get(&format!("{prefix}{kind}_{gate}"));
        LstmDirParams {
            w: [
                pick("w", "i"),
                pick("w", "f"),
                pick("w", "o"),
                pick("w", "g"),
            ],
            u: [
                pick("u", "i"),
                pick("u", "f"),
                pick("u", "o"),
                pick("u", "g"),
            ],
            b: [
                pick("b", "i"),
                pick("b", "f"),
                pick("b", "o"),
                pick("b", "g"),
            ],
        }
    }

    pub fn units(&self) -> usize {
        self.b[0].len()
    }
}

#[derive(Debug, Clone)]
pub struct LstmDirCache<S: Scalar> {
    reverse: bool,
    h0: Vec<S>,
    c0: Vec<S>,
    i: Tensor<S>,
    f: Tensor<S>,
    o: Tensor<S>,
    g: Tensor<S>,
    c: Tensor<S>,
    tc: Tensor<S>,
    h: Tensor<S>,
}

pub struct LstmDirGrads<S: Scalar> {
    pub w: [Tensor<S>; 4],
    pub u: [Tensor<S>; 4],
    pub b: [Tensor<S>; 4],
}

impl<S: Scalar> LstmDirGrads<S> {
    pub fn accumulate_into(&self, store: &mut ParameterStore<S>, prefix: &str, scale: S) {
        for (idx, gate) in LSTM_GATES.iter().enumerate() {
            store.add_grad_scaled(&format!("{prefix}w_{gate}"), &self.w[idx], scale);
            store.add_grad_scaled(&format!("{prefix}u_{gate}"), &self.u[idx], scale);
            store.add_grad_scaled(&format!("{prefix}b_{gate}"), &self.b[idx], scale);
        }
    }
}

pub fn lstm_dir_forward<S: Scalar>(
    x: &Tensor<S>,
    p: &LstmDirParams<S>,
    reverse: bool,
    state0: Option<(&[S], &[S])>,
) -> (Tensor<S>, LstmDirCache<S>) {
    let t_len = x.shape()[0];
    let u = p.units();
    let (h0, c0) = state0.map_or_else(
        || (vec![S::zero(); u], vec![S::zero(); u]),
        |(h, c)| (h.to_vec(), c.to_vec()),
    );

    let mut gates = [
        Tensor::zeros(&[t_len, u]),
        Tensor::zeros(&[t_len, u]),
        Tensor::zeros(&[t_len, u]),
        Tensor::zeros(&[t_len, u]),
    ];
    let mut c = Tensor::zeros(&[t_len, u]);
    let mut tc = Tensor::zeros(&[t_len, u]);
    let mut h = Tensor::zeros(&[t_len, u]);

    let mut h_prev = h0.clone();
    let mut c_prev = c0.clone();
    for s in 0..t_len {
        let t = if reverse { t_len - 1 - s } else { s };
        let xt = x.row(t);
        for gi in 0..4 {
            let row = gates[gi].row_mut(s);
            gate_preact(
                xt,
                p.w[gi].data(),
                &h_prev,
                p.u[gi].data(),
                p.b[gi].data(),
                row,
            );
            if gi == 3 {
                row.iter_mut().for_each(|v| *v = v.tanh());
            } else {
                row.iter_mut().for_each(|v| *v = sigmoid(*v));
            }
        }
        for k in 0..u {
            let (iv, fv, ov, gv) = (
                gates[0].row(s)[k],
                gates[1].row(s)[k],
                gates[2].row(s)[k],
                gates[3].row(s)[k],
            );
            let cv = fv * c_prev[k] + iv * gv;
            c.row_mut(s)[k] = cv;
            let t_cv = cv.tanh();
            tc.row_mut(s)[k] = t_cv;
            h.row_mut(s)[k] = ov * t_cv;
        }
        h_prev.copy_from_slice(h.row(s));
        c_prev.copy_from_slice(c.row(s));
    }

    let mut out = Tensor::zeros(&[t_len, u]);
    for s in 0..t_len {
        let t = if reverse { t_len - 1 - s } else { s };
        out.row_mut(t).copy_from_slice(h.row(s));
    }
    let [i, f, o, g] = gates;
    let cache = LstmDirCache {
        reverse,
        h0,
        c0,
        i,
        f,
        o,
        g,
        c,
        tc,
        h,
    };
    (out, cache)
}

pub fn lstm_dir_backward<S: Scalar>(
    dh: &Tensor<S>,
    x: &Tensor<S>,
    p: &LstmDirParams<S>,
    cache: &LstmDirCache<S>,
) -> (Tensor<S>, LstmDirGrads<S>) {
    let t_len = x.shape()[0];
    let d = x.shape()[1];
    let u = p.units();
    let mut grads = LstmDirGrads {
        w: [
            Tensor::zeros(&[d, u]),
            Tensor::zeros(&[d, u]),
            Tensor::zeros(&[d, u]),
            Tensor::zeros(&[d, u]),
        ],
        u: [
            Tensor::zeros(&[u, u]),
            Tensor::zeros(&[u, u]),
            Tensor::zeros(&[u, u]),
            Tensor::zeros(&[u, u]),
        ],
        b: [
            Tensor::zeros(&[u]),
            Tensor::zeros(&[u]),
            Tensor::zeros(&[u]),
            Tensor::zeros(&[u]),
        ],
    };
    let mut dx = Tensor::zeros(&[t_len, d]);

    let mut carry_h = vec![S::zero(); u];
    let mut carry_c = vec![S::zero(); u];
    let mut da = [
        vec![S::zero(); u],
        vec![S::zero(); u],
        vec![S::zero(); u],
        vec![S::zero(); u],
    ];
    let one = S::one();

    for s in (0..t_len).rev() {
        let t = if cache.reverse { t_len - 1 - s } else { s };
        let h_prev: &[S] = if s == 0 { &cache.h0 } else { cache.h.row(s - 1) };
        let c_prev: &[S] = if s == 0 { &cache.c0 } else { cache.c.row(s - 1) };
        let (i, f, o, g, tc) = (
            cache.i.row(s),
            cache.f.row(s),
            cache.o.row(s),
            cache.g.row(s),
            cache.tc.row(s),
        );

        for k in 0..u {
            let gh = dh.row(t)[k] + carry_h[k];
            let do_ = gh * tc[k];
            da[2][k] = do_ * o[k] * (one - o[k]);
            let dc = carry_c[k] + gh * o[k] * (one - tc[k] * tc[k]);
            let df = dc * c_prev[k];
            da[1][k] = df * f[k] * (one - f[k]);
            let di = dc * g[k];
            da[0][k] = di * i[k] * (one - i[k]);
            let dg = dc * i[k];
            da[3][k] = dg * (one - g[k] * g[k]);
            carry_c[k] = dc * f[k];
        }

        let xt = x.row(t);
        for gi in 0..4 {
            outer_add(grads.w[gi].data_mut(), xt, &da[gi]);
            outer_add(grads.u[gi].data_mut(), h_prev, &da[gi]);
            for k in 0..u {
                grads.b[gi].data_mut()[k] += da[gi][k];
            }
        }

        let dxt = dx.row_mut(t);
        for (idx, dxv) in dxt.iter_mut().enumerate() {
            let mut acc = S::zero();
            for gi in 0..4 {
                acc += dot(&p.w[gi].data()[idx * u..(idx + 1) * u], &da[gi]);
            }
            *dxv = acc;
        }
        for (j, ch) in carry_h.iter_mut().enumerate() {
            let mut acc = S::zero();
            for gi in 0..4 {
                acc += dot(&p.u[gi].data()[j * u..(j + 1) * u], &da[gi]);
            }
            *ch = acc;
        }
    }

    (dx, grads)
}

/// Concatenate per-step outputs of a forward and a reverse pass: `[T, 2u]`.
pub fn concat_bi<S: Scalar>(fw: &Tensor<S>, bw: &Tensor<S>) -> Tensor<S> {
    debug_assert_eq!(fw.shape(), bw.shape());
    let (t_len, u) = (fw.shape()[0], fw.shape()[1]);
    let mut out = Tensor::zeros(&[t_len, 2 * u]);
    for t in 0..t_len {
        out.row_mut(t)[..u].copy_from_slice(fw.row(t));
        out.row_mut(t)[u..].copy_from_slice(bw.row(t));
    }
    out
}

/// Split an upstream `[T, 2u]` gradient back into the two directions.
pub fn split_bi<S: Scalar>(dh: &Tensor<S>) -> (Tensor<S>, Tensor<S>) {
    let (t_len, two_u) = (dh.shape()[0], dh.shape()[1]);
    let u = two_u / 2;
    let mut fw = Tensor::zeros(&[t_len, u]);
    let mut bw = Tensor::zeros(&[t_len, u]);
    for t in 0..t_len {
        fw.row_mut(t).copy_from_slice(&dh.row(t)[..u]);
        bw.row_mut(t).copy_from_slice(&dh.row(t)[u..]);
    }
    (fw, bw)
}
