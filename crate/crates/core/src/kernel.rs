//! Compactly supported convolution kernels of bounded variation.

use crate::spectral::smooth_step;
use std::fmt;
use std::sync::Arc;

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

// One-sided limits are probed this far from a jump.
const JUMP_PROBE: f64 = 1e-12;
// Subintervals per smooth piece when measuring variation and mass.
const PIECE_RESOLUTION: usize = 1 << 16;

/// A real kernel on the line, vanishing outside `[-R, R]`, smooth except at
/// finitely many listed jump points.
#[derive(Clone)]
pub struct Kernel {
    name: String,
    support_radius: f64,
    jumps: Vec<f64>,
    eval: Evaluator,
    mean_zero: bool,
    tv_norm: f64,
    sup_norm: f64,
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel")
            .field("name", &self.name)
            .field("support_radius", &self.support_radius)
            .field("jumps", &self.jumps)
            .field("mean_zero", &self.mean_zero)
            .field("tv_norm", &self.tv_norm)
            .field("sup_norm", &self.sup_norm)
            .finish()
    }
}

impl Kernel {
    /// Build a kernel from its pointwise rule. Mass, total variation and sup
    /// norm are measured from the rule; `mean_zero` is set when the mass is
    /// below `1e-10`.
    pub fn new(
        name: impl Into<String>,
        support_radius: f64,
        jumps: Vec<f64>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let mut k = Kernel {
            name: name.into(),
            support_radius,
            jumps,
            eval: Arc::new(move |x: f64| if x.abs() > support_radius { 0.0 } else { eval(x) }),
            mean_zero: false,
            tv_norm: 0.0,
            sup_norm: 0.0,
        };
        k.jumps.sort_by(f64::total_cmp);
        k.jumps.dedup();
        k.tv_norm = kernel_tv(&k);
        k.sup_norm = k.measure_sup();
        k.mean_zero = k.mass().abs() < 1e-10;
        k
    }

    /// The truncated signum kernel: `sign(x)/2` on `0 < |x| <= 1`.
    pub fn diamond() -> Self {
        Kernel::new("diamond", 1.0, vec![-1.0, 0.0, 1.0], |x| {
            if x == 0.0 {
                0.0
            } else {
                0.5 * x.signum()
            }
        })
    }

    /// Normalized box `1_[-1,1] / 2`; not mean-zero.
    pub fn boxcar() -> Self {
        Kernel::new("box", 1.0, vec![-1.0, 1.0], |_| 0.5)
    }

    /// Smooth bump `s(1 - x^2)` on `(-1, 1)`.
    pub fn bump() -> Self {
        Kernel::new("bump", 1.0, vec![], |x| smooth_step(1.0 - x * x))
    }

    /// Smooth odd kernel `x s(1 - x^2)`; mean-zero, no jumps.
    pub fn odd_bump() -> Self {
        Kernel::new("odd-bump", 1.0, vec![], |x| x * smooth_step(1.0 - x * x))
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "diamond" => Some(Self::diamond()),
            "box" => Some(Self::boxcar()),
            "bump" => Some(Self::bump()),
            "odd-bump" => Some(Self::odd_bump()),
            _ => None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }

    pub fn is_mean_zero(&self) -> bool {
        self.mean_zero
    }

    pub fn tv_norm(&self) -> f64 {
        self.tv_norm
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    /// Value used when sampling: the mean of the one-sided limits at a jump
    /// point (`|t - jump| <= tol`), the pointwise rule elsewhere.
    pub fn sample(&self, t: f64, tol: f64) -> f64 {
        match self.jumps.iter().find(|&&p| (t - p).abs() <= tol) {
            Some(&p) => 0.5 * (self.eval(p - JUMP_PROBE) + self.eval(p + JUMP_PROBE)),
            None => self.eval(t),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        let r = self.support_radius;
        let mut pts = vec![-r];
        pts.extend(self.jumps.iter().copied().filter(|p| p.abs() < r));
        pts.push(r);
        pts
    }

    // Mass by the trapezoid rule on each smooth piece.
    fn mass(&self) -> f64 {
        let pts = self.breakpoints();
        let mut total = 0.0;
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let n = PIECE_RESOLUTION;
            let h = (b - a) / n as f64;
            let mut s = 0.5 * (self.eval(a + JUMP_PROBE) + self.eval(b - JUMP_PROBE));
            for i in 1..n {
                s += self.eval(a + i as f64 * h);
            }
            total += s * h;
        }
        total
    }

    fn measure_sup(&self) -> f64 {
        let pts = self.breakpoints();
        let mut best: f64 = 0.0;
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let n = PIECE_RESOLUTION;
            let h = (b - a) / n as f64;
            best = best
                .max(self.eval(a + JUMP_PROBE).abs())
                .max(self.eval(b - JUMP_PROBE).abs());
            for i in 1..n {
                best = best.max(self.eval(a + i as f64 * h).abs());
            }
        }
        best
    }
}

/// Total variation: jump magnitudes (including at the support boundary)
/// plus the variation of each smooth piece on a fine partition.
pub fn kernel_tv(k: &Kernel) -> f64 {
    let pts = k.breakpoints();
    let limit = |x: f64, side: f64| {
        let y = x + side * JUMP_PROBE;
        if y.abs() > k.support_radius {
            0.0
        } else {
            k.eval(y)
        }
    };
    let jumps: f64 = pts
        .iter()
        .map(|&p| (limit(p, 1.0) - limit(p, -1.0)).abs())
        .sum();
    let mut smooth = 0.0;
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let n = PIECE_RESOLUTION;
        let h = (b - a) / n as f64;
        let mut prev = k.eval(a + JUMP_PROBE);
        for i in 1..n {
            let cur = k.eval(a + i as f64 * h);
            smooth += (cur - prev).abs();
            prev = cur;
        }
        smooth += (k.eval(b - JUMP_PROBE) - prev).abs();
    }
    jumps + smooth
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diamond_values_and_metadata() {
        let k = Kernel::diamond();
        assert_eq!(k.eval(0.5), 0.5);
        assert_eq!(k.eval(-0.3), -0.5);
        assert_eq!(k.eval(1.5), 0.0);
        assert_eq!(k.eval(1.0), 0.5);
        assert!(k.is_mean_zero());
        assert!((k.tv_norm() - 2.0).abs() < 1e-8);
        assert!((k.sup_norm() - 0.5).abs() < 1e-12);
        assert_eq!(k.support_radius(), 1.0);
        assert_eq!(k.sample(1.0, 1e-12), 0.25);
        assert_eq!(k.sample(0.0, 1e-12), 0.0);
    }

    #[test]
    fn box_total_variation() {
        let k = Kernel::boxcar();
        assert!((kernel_tv(&k) - 1.0).abs() < 1e-8);
        assert!(!k.is_mean_zero());
    }

    #[test]
    fn bump_total_variation_matches_quadrature() {
        // Oracle: integrate |K'| with composite Simpson on 2^20 panels, using
        // the closed-form derivative of s(1 - x^2).
        let deriv = |x: f64| {
            let u = 1.0 - x * x;
            if u <= 0.0 {
                0.0
            } else {
                (-1.0 / u).exp() * (-2.0 * x) / (u * u)
            }
        };
        let n = 1usize << 20;
        let h = 2.0 / n as f64;
        let mut s = deriv(-1.0).abs() + deriv(1.0).abs();
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * deriv(-1.0 + i as f64 * h).abs();
        }
        let oracle = s * h / 3.0;
        let k = Kernel::bump();
        assert!((kernel_tv(&k) - oracle).abs() < 1e-8);
        // Unimodal: variation is twice the peak.
        assert!((oracle - 2.0 * (-1.0f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn odd_bump_is_mean_zero() {
        let k = Kernel::odd_bump();
        assert!(k.is_mean_zero());
        assert!(k.jumps().is_empty());
        assert!(k.tv_norm() > 0.0);
    }
}
