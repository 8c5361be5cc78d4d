//! Reverse-mode tape whose recorded scalars are [`Dual`] numbers.
//!
//! Each node holds a dual value `(v, v')` with `v' = ∂v/∂x1`. Both channels
//! are functions of the parameters, so the reverse sweep carries a pair of
//! adjoints `(∂L/∂v, ∂L/∂v')`. For a local dual partial `p = ∂c/∂a` the
//! Jacobian of `(c, c')` with respect to `(a, a')` is `[[p, 0], [p', p]]`,
//! which gives the update
//!
//! ```text
//! ā  += c̄·p + c̄'·p'
//! ā' += c̄'·p
//! ```
//!
//! When nothing on the tape reads a `dx1` channel (no [`Graph::tangent`]
//! node), the second adjoint stays zero and the sweep reduces to ordinary
//! backpropagation on the value channel.

use super::dual::{silu_prime_with, silu_second, Dual};
use super::graph::{check_len, dual_dot, Graph};
use crate::error::{Error, Result};

/// Handle to a node on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone)]
enum Op {
    Leaf,
    Param(u32),
    Unary { a: u32, p: Dual },
    Binary { a: u32, b: u32, pa: Dual, pb: Dual },
    Dot { start: u32, len: u32 },
    Norm { start: u32, len: u32 },
    Tangent { a: u32 },
}

#[derive(Debug, Clone)]
struct Node {
    value: Dual,
    op: Op,
}

#[derive(Debug, Default, Clone)]
pub struct Tape {
    nodes: Vec<Node>,
    dot_pairs: Vec<(u32, u32)>,
    norm_args: Vec<u32>,
    n_params: usize,
    scratch: (Vec<Dual>, Vec<Dual>),
}

/// Parameter gradients indexed by parameter id.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients(pub Vec<f64>);

impl Gradients {
    pub fn get(&self, id: usize) -> f64 {
        self.0.get(id).copied().unwrap_or(0.0)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(nodes: usize) -> Self {
        Tape {
            nodes: Vec::with_capacity(nodes),
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Dual, op: Op) -> Var {
        let id = u32::try_from(self.nodes.len()).expect("tape exceeds u32 nodes");
        self.nodes.push(Node { value, op });
        Var(id)
    }

    /// `dual_dot` over node values, gathered into reusable buffers.
    fn values_dot(&mut self, a: &[Var], b: &[Var]) -> Dual {
        let (mut xa, mut xb) = std::mem::take(&mut self.scratch);
        xa.clear();
        xb.clear();
        xa.extend(a.iter().map(|&v| self.val(v)));
        xb.extend(b.iter().map(|&v| self.val(v)));
        let d = dual_dot(&xa, &xb);
        self.scratch = (xa, xb);
        d
    }

    fn val(&self, v: Var) -> Dual {
        self.nodes[v.index()].value
    }

    fn unary(&mut self, a: Var, value: Dual, p: Dual) -> Var {
        self.push(value, Op::Unary { a: a.0, p })
    }

    fn binary(&mut self, a: Var, b: Var, value: Dual, pa: Dual, pb: Dual) -> Var {
        self.push(value, Op::Binary { a: a.0, b: b.0, pa, pb })
    }

    /// Gradient of the value channel of `output` with respect to every
    /// parameter registered on this tape.
    pub fn backward(&self, output: Var) -> Result<Gradients> {
        let out = output.index();
        if out >= self.nodes.len() {
            return Err(Error::Internal(format!(
                "output node {out} is not on this tape ({} nodes)",
                self.nodes.len()
            )));
        }
        let mut adj = vec![[0.0f64; 2]; out + 1];
        adj[out] = [1.0, 0.0];
        let mut grads = vec![0.0; self.n_params];

        for i in (0..=out).rev() {
            let [c0, c1] = adj[i];
            if c0 == 0.0 && c1 == 0.0 {
                continue;
            }
            let parent = |p: u32| -> Result<usize> {
                let p = p as usize;
                if p >= i {
                    return Err(Error::Internal(format!(
                        "tape is not topologically ordered: node {i} reads node {p}"
                    )));
                }
                Ok(p)
            };
            match &self.nodes[i].op {
                Op::Leaf => {}
                Op::Param(id) => grads[*id as usize] += c0,
                Op::Unary { a, p } => {
                    let a = parent(*a)?;
                    accumulate(&mut adj[a], c0, c1, *p);
                }
                Op::Binary { a, b, pa, pb } => {
                    let a = parent(*a)?;
                    let b = parent(*b)?;
                    accumulate(&mut adj[a], c0, c1, *pa);
                    accumulate(&mut adj[b], c0, c1, *pb);
                }
                Op::Dot { start, len } => {
                    let pairs = &self.dot_pairs[*start as usize..(*start + *len) as usize];
                    for &(a, b) in pairs {
                        let a = parent(a)?;
                        let b = parent(b)?;
                        let va = self.nodes[a].value;
                        let vb = self.nodes[b].value;
                        accumulate(&mut adj[a], c0, c1, vb);
                        accumulate(&mut adj[b], c0, c1, va);
                    }
                }
                Op::Norm { start, len } => {
                    let c = self.nodes[i].value;
                    let args = &self.norm_args[*start as usize..(*start + *len) as usize];
                    for &a in args {
                        let a = parent(a)?;
                        let p = self.nodes[a].value / c;
                        accumulate(&mut adj[a], c0, c1, p);
                    }
                }
                Op::Tangent { a } => {
                    let a = parent(*a)?;
                    adj[a][1] += c0;
                }
            }
        }
        Ok(Gradients(grads))
    }
}

#[inline]
fn accumulate(slot: &mut [f64; 2], c0: f64, c1: f64, p: Dual) {
    slot[0] += c0 * p.value + c1 * p.dx1;
    slot[1] += c1 * p.value;
}

impl Graph for Tape {
    type Value = Var;

    fn constant(&mut self, v: Dual) -> Var {
        self.push(v, Op::Leaf)
    }

    fn param(&mut self, id: usize, value: f64) -> Var {
        self.n_params = self.n_params.max(id + 1);
        let id = u32::try_from(id).expect("parameter id exceeds u32");
        self.push(Dual::constant(value), Op::Param(id))
    }

    fn get(&self, v: Var) -> Dual {
        self.val(v)
    }

    fn add(&mut self, a: Var, b: Var) -> Var {
        let v = self.val(a) + self.val(b);
        self.binary(a, b, v, Dual::ONE, Dual::ONE)
    }

    fn sub(&mut self, a: Var, b: Var) -> Var {
        let v = self.val(a) - self.val(b);
        self.binary(a, b, v, Dual::ONE, Dual::constant(-1.0))
    }

    fn mul(&mut self, a: Var, b: Var) -> Var {
        let (va, vb) = (self.val(a), self.val(b));
        self.binary(a, b, va * vb, vb, va)
    }

    fn div(&mut self, a: Var, b: Var) -> Result<Var> {
        let (va, vb) = (self.val(a), self.val(b));
        let q = va.checked_div(vb)?;
        // ∂(a/b)/∂a = 1/b, ∂(a/b)/∂b = -(a/b)/b
        let inv = Dual::ONE / vb;
        let pb = -(q / vb);
        Ok(self.binary(a, b, q, inv, pb))
    }

    fn neg(&mut self, a: Var) -> Var {
        let v = -self.val(a);
        self.unary(a, v, Dual::constant(-1.0))
    }

    fn silu(&mut self, a: Var) -> Var {
        let va = self.val(a);
        let s = super::dual::logistic(va.value);
        let d1 = silu_prime_with(va.value, s);
        let value = Dual::new(va.value * s, d1 * va.dx1);
        let p = Dual::new(d1, silu_second(va.value) * va.dx1);
        self.unary(a, value, p)
    }

    fn logistic(&mut self, a: Var) -> Var {
        let va = self.val(a);
        let value = va.logistic();
        let s = value.value;
        // σ' = σ(1-σ), σ'' = σ(1-σ)(1-2σ)
        let p = Dual::new(s * (1.0 - s), s * (1.0 - s) * (1.0 - 2.0 * s) * va.dx1);
        self.unary(a, value, p)
    }

    fn sqrt(&mut self, a: Var) -> Result<Var> {
        let va = self.val(a);
        let r = va.sqrt()?;
        if r.value == 0.0 {
            return Err(Error::Domain("sqrt is not differentiable at zero".into()));
        }
        let p = Dual::ONE / (r * 2.0);
        Ok(self.unary(a, r, p))
    }

    fn dot(&mut self, a: &[Var], b: &[Var]) -> Result<Var> {
        check_len(a.len(), b.len())?;
        let value = self.values_dot(a, b);
        let start = self.dot_pairs.len() as u32;
        self.dot_pairs.extend(a.iter().zip(b).map(|(x, y)| (x.0, y.0)));
        Ok(self.push(value, Op::Dot { start, len: a.len() as u32 }))
    }

    fn norm(&mut self, a: &[Var]) -> Result<Var> {
        let sq = self.values_dot(a, a);
        if sq.value == 0.0 {
            return Err(Error::Domain("L2 norm of a zero vector".into()));
        }
        let value = sq.sqrt()?;
        let start = self.norm_args.len() as u32;
        self.norm_args.extend(a.iter().map(|v| v.0));
        Ok(self.push(value, Op::Norm { start, len: a.len() as u32 }))
    }

    fn tangent(&mut self, a: Var) -> Var {
        let v = Dual::constant(self.val(a).dx1);
        self.push(v, Op::Tangent { a: a.0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn quadratic_gradient() {
        let mut t = Tape::new();
        let th = t.param(0, 3.0);
        let loss = t.mul(th, th);
        assert_eq!(t.backward(loss).unwrap().get(0), 6.0);
    }

    #[test]
    fn margules_toy_ln_gamma_gradient() {
        // gE/RT = θ x1 (1 - x1)  =>  ln γ1 = θ (1 - x1)^2, ∂/∂θ = (1 - x1)^2
        let (theta, x1) = (2.0, 0.3);
        let mut t = Tape::new();
        let th = t.param(0, theta);
        let x = t.constant(Dual::seed(x1));
        let x2 = t.constant(Dual::complement(1.0 - x1));
        let p = t.mul(x, x2);
        let g = t.mul(th, p);
        let gp = t.tangent(g);
        let k = t.constant(Dual::constant(1.0 - x1));
        let corr = t.mul(k, gp);
        let ln1 = t.add(g, corr);
        assert_relative_eq!(t.get(ln1).value, theta * 0.49, epsilon = 1e-14);
        let grads = t.backward(ln1).unwrap();
        assert_relative_eq!(grads.get(0), 0.49, epsilon = 1e-14);
    }

    #[test]
    fn constant_has_zero_gradient() {
        let mut t = Tape::new();
        let _a = t.param(0, 1.5);
        let _b = t.param(1, -0.5);
        let c = t.constant(Dual::constant(4.0));
        let out = t.mul(c, c);
        let g = t.backward(out).unwrap();
        assert_eq!(g.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn foreign_output_is_rejected() {
        let t = Tape::new();
        assert!(matches!(t.backward(Var(3)), Err(Error::Internal(_))));
    }

    #[test]
    fn out_of_order_parent_is_detected() {
        let mut t = Tape::new();
        let a = t.param(0, 1.0);
        let b = t.add(a, a);
        // Corrupt the tape so node 0 reads node 1.
        t.nodes[0].op = Op::Unary { a: b.0, p: Dual::ONE };
        assert!(matches!(t.backward(b), Err(Error::Internal(_))));
    }

    #[test]
    fn shared_parameter_accumulates() {
        let mut t = Tape::new();
        let a = t.param(0, 2.0);
        let a_again = t.param(0, 2.0);
        let out = t.mul(a, a_again);
        assert_eq!(t.backward(out).unwrap().get(0), 4.0);
    }

    #[test]
    fn dot_norm_and_div_gradients() {
        // f(w) = (w·x) / ||w||, with x = (1, 2), w = (3, 4)
        let mut t = Tape::new();
        let w = [t.param(0, 3.0), t.param(1, 4.0)];
        let x = [t.constant(Dual::constant(1.0)), t.constant(Dual::constant(2.0))];
        let d = t.dot(&w, &x).unwrap();
        let n = t.norm(&w).unwrap();
        let f = t.div(d, n).unwrap();
        assert_relative_eq!(t.get(f).value, 11.0 / 5.0, epsilon = 1e-15);
        let g = t.backward(f).unwrap();
        // ∂f/∂w = x/|w| - (w·x) w/|w|^3
        assert_relative_eq!(g.get(0), 1.0 / 5.0 - 11.0 * 3.0 / 125.0, epsilon = 1e-15);
        assert_relative_eq!(g.get(1), 2.0 / 5.0 - 11.0 * 4.0 / 125.0, epsilon = 1e-15);
    }

    #[test]
    fn dot_length_mismatch() {
        let mut t = Tape::new();
        let a = t.param(0, 1.0);
        assert!(matches!(t.dot(&[a, a], &[a]), Err(Error::Shape(_))));
    }

    #[test]
    fn tape_and_eager_agree_bitwise() {
        use crate::autodiff::Eager;
        fn f<G: Graph>(g: &mut G) -> Dual {
            let x = g.constant(Dual::seed(0.37));
            let w = g.param(0, -1.3);
            let a = g.mul(w, x);
            let s = g.silu(a);
            let l = g.logistic(s);
            let q = g.div(l, x).unwrap();
            let r = g.sqrt(q).unwrap();
            let n = g.norm(&[r, s, a]).unwrap();
            g.get(n)
        }
        let mut t = Tape::new();
        assert_eq!(f(&mut t), f(&mut Eager));
    }
}
