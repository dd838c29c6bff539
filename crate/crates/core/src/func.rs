//! Functions as evaluation callbacks plus the metadata quadrature needs:
//! how fast they decay and where they have kinks or jumps.

use std::fmt;
use std::sync::Arc;

/// `e^{−DECAY_EXPONENT}` is treated as negligible when turning a decay rate
/// into a truncation radius.
pub const DECAY_EXPONENT: f64 = 40.0;

/// How a function behaves at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// Zero, or negligible, for `|x| > radius`.
    Support(f64),
    /// `|f(x)| ≲ e^{−rate·x²}`.
    Gaussian(f64),
    /// `|f(x)| ≲ e^{−rate·|x|}`.
    Exponential(f64),
}

impl Decay {
    /// Radius beyond which the function can be dropped.
    pub fn radius(&self) -> f64 {
        match *self {
            Decay::Support(r) => r,
            Decay::Gaussian(a) => (DECAY_EXPONENT / a).sqrt(),
            Decay::Exponential(a) => DECAY_EXPONENT / a,
        }
    }

    /// Decay of a product: the faster of the two.
    pub fn product(self, other: Decay) -> Decay {
        match (self, other) {
            (Decay::Gaussian(a), Decay::Gaussian(b)) => Decay::Gaussian(a + b),
            (Decay::Exponential(a), Decay::Exponential(b)) => Decay::Exponential(a + b),
            (a, b) => Decay::Support(a.radius().min(b.radius())),
        }
    }
}

type Eval1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type EvalNd = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A real function of one variable.
#[derive(Clone)]
pub struct Func {
    eval: Eval1,
    decay: Decay,
    breakpoints: Vec<f64>,
}

impl fmt::Debug for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Func")
            .field("decay", &self.decay)
            .field("breakpoints", &self.breakpoints)
            .finish_non_exhaustive()
    }
}

impl Func {
    pub fn new(eval: impl Fn(f64) -> f64 + Send + Sync + 'static, decay: Decay) -> Self {
        Func {
            eval: Arc::new(eval),
            decay,
            breakpoints: Vec::new(),
        }
    }

    /// Points where the function (or its derivative) is discontinuous.
    pub fn with_breakpoints(mut self, mut points: Vec<f64>) -> Self {
        points.retain(|p| p.is_finite());
        self.breakpoints.extend(points);
        self.breakpoints.sort_by(f64::total_cmp);
        self.breakpoints.dedup();
        self
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn decay(&self) -> Decay {
        self.decay
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn scaled(&self, s: f64) -> Func {
        let g = self.eval.clone();
        Func {
            eval: Arc::new(move |x| s * g(x)),
            decay: self.decay,
            breakpoints: self.breakpoints.clone(),
        }
    }

    pub fn product(&self, other: &Func) -> Func {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        let mut bps = self.breakpoints.clone();
        bps.extend_from_slice(&other.breakpoints);
        Func {
            eval: Arc::new(move |x| f(x) * g(x)),
            decay: self.decay.product(other.decay),
            breakpoints: Vec::new(),
        }
        .with_breakpoints(bps)
    }

    /// `x ↦ f(−x)`.
    pub fn reflected(&self) -> Func {
        let f = self.eval.clone();
        Func {
            eval: Arc::new(move |x| f(-x)),
            decay: self.decay,
            breakpoints: Vec::new(),
        }
        .with_breakpoints(self.breakpoints.iter().map(|b| -b).collect())
    }

    /// Extend a function on `(0, ∞)` to ℝ as `f(|x|)`.
    pub fn even_extension(&self) -> Func {
        self.symmetric_extension(false)
    }

    /// Extend a function on `(0, ∞)` to ℝ as `sgn(x) f(|x|)`.
    pub fn odd_extension(&self) -> Func {
        self.symmetric_extension(true)
    }

    fn symmetric_extension(&self, odd: bool) -> Func {
        let f = self.eval.clone();
        let mut bps: Vec<f64> = self.breakpoints.iter().flat_map(|&b| [b, -b]).collect();
        bps.push(0.0);
        Func {
            eval: Arc::new(move |x| {
                let v = f(x.abs());
                if odd && x < 0.0 {
                    -v
                } else {
                    v
                }
            }),
            decay: self.decay,
            breakpoints: Vec::new(),
        }
        .with_breakpoints(bps)
    }
}

/// A real function on ℝ^d (or a subset of it), optionally known to be a
/// tensor product of one-dimensional factors.
#[derive(Clone)]
pub struct FuncNd {
    dim: usize,
    eval: EvalNd,
    decay: Decay,
    breakpoints: Vec<f64>,
    factors: Option<Vec<Func>>,
}

impl fmt::Debug for FuncNd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FuncNd")
            .field("dim", &self.dim)
            .field("decay", &self.decay)
            .field("separable", &self.factors.is_some())
            .finish_non_exhaustive()
    }
}

impl FuncNd {
    /// A general (non-separable) function. `breakpoints` apply to every coordinate.
    pub fn new(
        dim: usize,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        decay: Decay,
        breakpoints: Vec<f64>,
    ) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        FuncNd {
            dim,
            eval: Arc::new(eval),
            decay,
            breakpoints,
            factors: None,
        }
    }

    /// `x ↦ Π_i f_i(x_i)`.
    pub fn separable(factors: Vec<Func>) -> Self {
        assert!(!factors.is_empty(), "need at least one factor");
        let dim = factors.len();
        let decay = factors
            .iter()
            .map(Func::decay)
            .reduce(|a, b| Decay::Support(a.radius().max(b.radius())))
            .unwrap();
        let mut bps: Vec<f64> = factors.iter().flat_map(|f| f.breakpoints().to_vec()).collect();
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        let fs = factors.clone();
        FuncNd {
            dim,
            eval: Arc::new(move |x: &[f64]| fs.iter().zip(x).map(|(f, &xi)| f.eval(xi)).product()),
            decay,
            breakpoints: bps,
            factors: Some(factors),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    pub fn decay(&self) -> Decay {
        self.decay
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn factors(&self) -> Option<&[Func]> {
        self.factors.as_deref()
    }

    pub fn scaled(&self, s: f64) -> FuncNd {
        match &self.factors {
            Some(fs) => {
                let mut fs = fs.clone();
                fs[0] = fs[0].scaled(s);
                FuncNd::separable(fs)
            }
            None => {
                let g = self.eval.clone();
                FuncNd {
                    dim: self.dim,
                    eval: Arc::new(move |x| s * g(x)),
                    decay: self.decay,
                    breakpoints: self.breakpoints.clone(),
                    factors: None,
                }
            }
        }
    }
}

impl From<Func> for FuncNd {
    fn from(f: Func) -> Self {
        FuncNd::separable(vec![f])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decay_radius() {
        assert_eq!(Decay::Support(3.0).radius(), 3.0);
        assert!((Decay::Gaussian(1.0).radius() - 40f64.sqrt()).abs() < 1e-15);
        assert_eq!(Decay::Exponential(2.0).radius(), 20.0);
    }

    #[test]
    fn extensions_and_separable_eval() {
        let f = Func::new(|x| x * (-x * x).exp(), Decay::Gaussian(1.0)).with_breakpoints(vec![1.0]);
        let e = f.even_extension();
        let o = f.odd_extension();
        assert_eq!(e.eval(-0.5), f.eval(0.5));
        assert_eq!(o.eval(-0.5), -f.eval(0.5));
        assert_eq!(e.breakpoints(), &[-1.0, 0.0, 1.0]);
        let g = FuncNd::separable(vec![f.clone(), f.scaled(2.0)]);
        assert_eq!(g.eval(&[0.3, 0.7]), f.eval(0.3) * 2.0 * f.eval(0.7));
        assert_eq!(g.scaled(-1.0).eval(&[0.3, 0.7]), -g.eval(&[0.3, 0.7]));
    }
}
