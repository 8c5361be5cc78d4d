//! The forward pass, written once over [`Graph`] so the same code serves
//! inference (eager duals) and training (tape).

use super::config::Variant;
use super::params::{DenseLayout, Layout};
use crate::autodiff::{Dual, Graph};
use crate::error::{Error, Result};

/// Registers every parameter on the graph, indexed by its flat position.
pub fn bind<G: Graph>(g: &mut G, values: &[f64]) -> Vec<G::Value> {
    values.iter().enumerate().map(|(i, &v)| g.param(i, v)).collect()
}

/// Dense layers with SiLU between them and a linear output.
pub fn mlp<G: Graph>(g: &mut G, bound: &[G::Value], layers: &[DenseLayout], input: &[G::Value]) -> Result<Vec<G::Value>> {
    let mut x = input.to_vec();
    for (k, layer) in layers.iter().enumerate() {
        if x.len() != layer.cols {
            return Err(Error::Shape(format!(
                "layer {} expects {} inputs, got {}",
                layer.name,
                layer.cols,
                x.len()
            )));
        }
        let w = &bound[layer.weights()];
        let b = &bound[layer.bias()];
        let last = k + 1 == layers.len();
        let mut out = Vec::with_capacity(layer.rows);
        for r in 0..layer.rows {
            let d = g.weighted_dot(&w[r * layer.cols..(r + 1) * layer.cols], &x)?;
            let z = g.add(d, b[r]);
            out.push(if last { z } else { g.silu(z) });
        }
        x = out;
    }
    Ok(x)
}

/// `f_θ` applied to an already standardized descriptor.
pub fn embed<G: Graph>(g: &mut G, bound: &[G::Value], layout: &Layout, standardized: &[f64]) -> Result<Vec<G::Value>> {
    let x: Vec<G::Value> = standardized.iter().map(|&v| g.constant(Dual::constant(v))).collect();
    mlp(g, bound, &layout.theta, &x)
}

/// `1 - a·b / sqrt((a·a)(b·b))`.
///
/// Written with one square root of the product of squared norms so that
/// identical embeddings give exactly zero.
pub fn cosine_distance<G: Graph>(g: &mut G, a: &[G::Value], b: &[G::Value]) -> Result<G::Value> {
    let ab = g.dot(a, b)?;
    let aa = g.dot(a, a)?;
    let bb = g.dot(b, b)?;
    if g.get(aa).value == 0.0 || g.get(bb).value == 0.0 {
        return Err(Error::DegenerateEmbedding);
    }
    let prod = g.mul(aa, bb);
    let den = g.sqrt(prod)?;
    let cos = g.div(ab, den)?;
    let one = g.constant(Dual::ONE);
    Ok(g.sub(one, cos))
}

/// Graph outputs for one mixture point.
#[derive(Debug, Clone, Copy)]
pub struct Outputs<V> {
    pub ln_gamma1: V,
    pub ln_gamma2: V,
    pub ge_over_rt: V,
}

/// Composition of one query: `x1` and the separately stored `x2 = 1 - x1`,
/// so that a component swap exchanges the two without re-rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Composition {
    pub x1: f64,
    pub x2: f64,
}

impl Composition {
    pub fn new(x1: f64) -> Self {
        Composition { x1, x2: 1.0 - x1 }
    }

    pub fn swapped(self) -> Self {
        Composition { x1: self.x2, x2: self.x1 }
    }
}

/// Everything after `f_θ`: state-variable concatenation, `f_α` per
/// component, aggregation, `f_φ` and the variant's output head.
pub fn mixture<G: Graph>(
    g: &mut G,
    bound: &[G::Value],
    layout: &Layout,
    variant: Variant,
    emb1: &[G::Value],
    emb2: &[G::Value],
    t_star: f64,
    comp: Composition,
) -> Result<Outputs<G::Value>> {
    let t = g.constant(Dual::constant(t_star));
    let xa = g.constant(Dual::seed(comp.x1));
    let xb = g.constant(Dual::complement(comp.x2));

    let mut c1 = emb1.to_vec();
    c1.extend([t, xa]);
    let mut c2 = emb2.to_vec();
    c2.extend([t, xb]);
    let a1 = mlp(g, bound, &layout.alpha, &c1)?;
    let a2 = mlp(g, bound, &layout.alpha, &c2)?;

    let x1c = g.constant(Dual::constant(comp.x1));
    let x2c = g.constant(Dual::constant(comp.x2));

    match variant {
        Variant::Hanna => {
            let mix: Vec<G::Value> = a1.iter().zip(&a2).map(|(&p, &q)| g.add(p, q)).collect();
            let g_nn = mlp(g, bound, &layout.phi, &mix)?[0];
            let dist = cosine_distance(g, emb1, emb2)?;
            let pref = g.mul(xa, xb);
            let scaled = g.mul(g_nn, pref);
            let ge = g.mul(scaled, dist);

            // ln γ1 = g + x2 g',  ln γ2 = g - x1 g'
            let slope = g.tangent(ge);
            let up = g.mul(x2c, slope);
            let down = g.mul(x1c, slope);
            let ln_gamma1 = g.add(ge, up);
            let ln_gamma2 = g.sub(ge, down);
            Ok(Outputs {
                ln_gamma1,
                ln_gamma2,
                ge_over_rt: ge,
            })
        }
        Variant::Ablation1 | Variant::Ablation2 => {
            let (in1, in2) = if variant == Variant::Ablation1 {
                ([a1.as_slice(), &a2].concat(), [a2.as_slice(), &a1].concat())
            } else {
                (a1, a2)
            };
            let ln_gamma1 = mlp(g, bound, &layout.phi, &in1)?[0];
            let ln_gamma2 = mlp(g, bound, &layout.phi, &in2)?[0];
            let p = g.mul(x1c, ln_gamma1);
            let q = g.mul(x2c, ln_gamma2);
            let ge = g.add(p, q);
            Ok(Outputs {
                ln_gamma1,
                ln_gamma2,
                ge_over_rt: ge,
            })
        }
    }
}
