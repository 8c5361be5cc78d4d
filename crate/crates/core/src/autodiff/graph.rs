use super::dual::Dual;
use crate::error::{Error, Result};

/// The primitive operations a differentiable computation is built from.
///
/// Model code is written once against this trait and runs either eagerly on
/// plain [`Dual`] values ([`Eager`]) or recorded onto a [`super::Tape`] for
/// parameter gradients.
pub trait Graph {
    type Value: Copy;

    fn constant(&mut self, v: Dual) -> Self::Value;

    /// A trainable parameter. Its composition derivative is zero.
    fn param(&mut self, id: usize, value: f64) -> Self::Value;

    fn get(&self, v: Self::Value) -> Dual;

    fn add(&mut self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn sub(&mut self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn mul(&mut self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn div(&mut self, a: Self::Value, b: Self::Value) -> Result<Self::Value>;
    fn neg(&mut self, a: Self::Value) -> Self::Value;
    fn silu(&mut self, a: Self::Value) -> Self::Value;
    fn logistic(&mut self, a: Self::Value) -> Self::Value;
    fn sqrt(&mut self, a: Self::Value) -> Result<Self::Value>;
    fn dot(&mut self, a: &[Self::Value], b: &[Self::Value]) -> Result<Self::Value>;
    fn norm(&mut self, a: &[Self::Value]) -> Result<Self::Value>;

    /// Promotes the composition derivative of `a` to a value of its own.
    ///
    /// The result's own `dx1` is not tracked (reported as zero); it is meant
    /// for quantities such as `ln γ` that feed a loss but are not
    /// differentiated in `x1` again.
    fn tangent(&mut self, a: Self::Value) -> Self::Value;

    /// `w·x` where every entry of `w` is a parameter (zero `dx1`).
    fn weighted_dot(&mut self, w: &[Self::Value], x: &[Self::Value]) -> Result<Self::Value> {
        self.dot(w, x)
    }

    fn scale(&mut self, a: Self::Value, k: f64) -> Self::Value {
        let c = self.constant(Dual::constant(k));
        self.mul(a, c)
    }
}

/// Four interleaved partial sums combined as `(s0 + s1) + (s2 + s3)`. The
/// order is fixed, so equal inputs always give bit-equal results.
pub(crate) fn dual_dot(a: &[Dual], b: &[Dual]) -> Dual {
    let mut acc = [Dual::ZERO; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        for k in 0..4 {
            acc[k] = acc[k] + x[k] * y[k];
        }
    }
    for (k, (&x, &y)) in ca.remainder().iter().zip(cb.remainder()).enumerate() {
        acc[k] = acc[k] + x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3])
}

pub(crate) fn check_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Shape(format!("dot of vectors with lengths {a} and {b}")));
    }
    Ok(())
}

/// Evaluates directly on dual numbers without recording anything.
#[derive(Debug, Default, Clone, Copy)]
pub struct Eager;

impl Graph for Eager {
    type Value = Dual;

    fn constant(&mut self, v: Dual) -> Dual {
        v
    }

    fn param(&mut self, _id: usize, value: f64) -> Dual {
        Dual::constant(value)
    }

    fn get(&self, v: Dual) -> Dual {
        v
    }

    fn add(&mut self, a: Dual, b: Dual) -> Dual {
        a + b
    }

    fn sub(&mut self, a: Dual, b: Dual) -> Dual {
        a - b
    }

    fn mul(&mut self, a: Dual, b: Dual) -> Dual {
        a * b
    }

    fn div(&mut self, a: Dual, b: Dual) -> Result<Dual> {
        a.checked_div(b)
    }

    fn neg(&mut self, a: Dual) -> Dual {
        -a
    }

    fn silu(&mut self, a: Dual) -> Dual {
        a.silu()
    }

    fn logistic(&mut self, a: Dual) -> Dual {
        a.logistic()
    }

    fn sqrt(&mut self, a: Dual) -> Result<Dual> {
        a.sqrt()
    }

    fn dot(&mut self, a: &[Dual], b: &[Dual]) -> Result<Dual> {
        check_len(a.len(), b.len())?;
        Ok(dual_dot(a, b))
    }

    /// Skips the `w.dx1·x.value` products, which are zero for parameters.
    fn weighted_dot(&mut self, w: &[Dual], x: &[Dual]) -> Result<Dual> {
        check_len(w.len(), x.len())?;
        let mut v = [0.0; 4];
        let mut d = [0.0; 4];
        let mut cw = w.chunks_exact(4);
        let mut cx = x.chunks_exact(4);
        for (a, b) in (&mut cw).zip(&mut cx) {
            for k in 0..4 {
                v[k] += a[k].value * b[k].value;
                d[k] += a[k].value * b[k].dx1;
            }
        }
        for (k, (a, b)) in cw.remainder().iter().zip(cx.remainder()).enumerate() {
            v[k] += a.value * b.value;
            d[k] += a.value * b.dx1;
        }
        Ok(Dual::new((v[0] + v[1]) + (v[2] + v[3]), (d[0] + d[1]) + (d[2] + d[3])))
    }

    fn norm(&mut self, a: &[Dual]) -> Result<Dual> {
        let sq = dual_dot(a, a);
        if sq.value == 0.0 {
            return Err(Error::Domain("L2 norm of a zero vector".into()));
        }
        sq.sqrt()
    }

    fn tangent(&mut self, a: Dual) -> Dual {
        Dual::constant(a.dx1)
    }
}
