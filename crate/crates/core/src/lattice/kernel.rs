use crate::error::{invalid, Result};

/// Single-particle distance used inside the pair interaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Norm {
    /// `max_k |a_k - b_k|`
    #[default]
    Max,
    Euclidean,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelShape {
    /// Constant `u0` inside the range.
    HardSphere,
    /// `u0 * exp(-r/λ) / (1 + r/λ)`, a Yukawa profile regularized at the origin.
    Yukawa { screening_length: f64 },
    /// Step table of `(outer radius, value)` pairs with ascending radii; the
    /// value of the first step whose radius is `>= r` applies, scaled by `u0`.
    Table(Vec<(f64, f64)>),
}

/// Pair function `U(r)` with amplitude `u0` and an exact cutoff at `r0`.
///
/// A kernel with zero amplitude or zero range is the null interaction.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionKernel {
    pub shape: KernelShape,
    pub amplitude: f64,
    pub range: f64,
    pub norm: Norm,
}

impl InteractionKernel {
    pub fn none() -> Self {
        Self::hard_sphere(0.0, 0.0)
    }

    pub fn hard_sphere(amplitude: f64, range: f64) -> Self {
        Self {
            shape: KernelShape::HardSphere,
            amplitude,
            range,
            norm: Norm::Max,
        }
    }

    pub fn yukawa(amplitude: f64, range: f64, screening_length: f64) -> Self {
        Self {
            shape: KernelShape::Yukawa { screening_length },
            amplitude,
            range,
            norm: Norm::Max,
        }
    }

    pub fn table(amplitude: f64, range: f64, steps: Vec<(f64, f64)>) -> Self {
        Self {
            shape: KernelShape::Table(steps),
            amplitude,
            range,
            norm: Norm::Max,
        }
    }

    pub fn with_norm(mut self, norm: Norm) -> Self {
        self.norm = norm;
        self
    }

    pub fn is_null(&self) -> bool {
        self.amplitude == 0.0 || self.range == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(invalid("u0", "amplitude must be finite and non-negative"));
        }
        if !(self.range.is_finite() && self.range >= 0.0) {
            return Err(invalid("r0", "range must be finite and non-negative"));
        }
        match &self.shape {
            KernelShape::HardSphere => {}
            KernelShape::Yukawa { screening_length } => {
                if !(screening_length.is_finite() && *screening_length > 0.0) {
                    return Err(invalid("screening_length", "must be finite and positive"));
                }
            }
            KernelShape::Table(steps) => {
                if steps.is_empty() {
                    return Err(invalid("table", "needs at least one step"));
                }
                for w in steps.windows(2) {
                    if w[1].0 <= w[0].0 {
                        return Err(invalid("table", "radii must be strictly ascending"));
                    }
                }
                if steps
                    .iter()
                    .any(|&(r, v)| !(r.is_finite() && r >= 0.0 && v.is_finite() && v >= 0.0))
                {
                    return Err(invalid("table", "radii and values must be finite and non-negative"));
                }
            }
        }
        Ok(())
    }

    /// `U(r)`; zero for `r > r0`.
    pub fn value(&self, r: f64) -> f64 {
        if self.is_null() || r > self.range {
            return 0.0;
        }
        match &self.shape {
            KernelShape::HardSphere => self.amplitude,
            KernelShape::Yukawa { screening_length } => {
                let x = r / screening_length;
                self.amplitude * (-x).exp() / (1.0 + x)
            }
            KernelShape::Table(steps) => steps
                .iter()
                .find(|&&(radius, _)| r <= radius)
                .map_or(0.0, |&(_, v)| self.amplitude * v),
        }
    }

    /// Distance between two integer lattice points at spacing `h`.
    pub fn distance(&self, a: &[usize], b: &[usize], h: f64) -> f64 {
        match self.norm {
            Norm::Max => a.iter().zip(b).map(|(x, y)| x.abs_diff(*y)).max().unwrap_or(0) as f64 * h,
            Norm::Euclidean => {
                let s: usize = a.iter().zip(b).map(|(x, y)| x.abs_diff(*y).pow(2)).sum();
                (s as f64).sqrt() * h
            }
        }
    }
}

impl Default for InteractionKernel {
    fn default() -> Self {
        Self::none()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hard_sphere_cutoff_is_exact() {
        let k = InteractionKernel::hard_sphere(1.0, 2.0);
        assert_eq!(k.value(0.0), 1.0);
        assert_eq!(k.value(2.0), 1.0);
        assert_eq!(k.value(2.0 + 1e-12), 0.0);
    }

    #[test]
    fn null_kernels() {
        assert!(InteractionKernel::none().is_null());
        assert_eq!(InteractionKernel::hard_sphere(1.0, 0.0).value(0.0), 0.0);
        assert_eq!(InteractionKernel::hard_sphere(0.0, 3.0).value(1.0), 0.0);
    }

    #[test]
    fn yukawa_is_bounded_and_decreasing() {
        let k = InteractionKernel::yukawa(2.0, 5.0, 1.0);
        assert_eq!(k.value(0.0), 2.0);
        assert!(k.value(1.0) < k.value(0.5));
        assert_eq!(k.value(5.5), 0.0);
        assert!(k.validate().is_ok());
        assert!(InteractionKernel::yukawa(1.0, 1.0, 0.0).validate().is_err());
    }

    #[test]
    fn table_steps() {
        let k = InteractionKernel::table(2.0, 3.0, vec![(1.0, 3.0), (2.5, 1.0)]);
        assert!(k.validate().is_ok());
        assert_eq!(k.value(0.5), 6.0);
        assert_eq!(k.value(2.0), 2.0);
        assert_eq!(k.value(2.8), 0.0);
        let bad = InteractionKernel::table(1.0, 1.0, vec![(1.0, 1.0), (0.5, 1.0)]);
        assert!(bad.validate().is_err());
    }

    #[test]
    fn distances() {
        let k = InteractionKernel::hard_sphere(1.0, 1.0);
        assert_eq!(k.distance(&[0, 3], &[4, 0], 0.5), 2.0);
        let e = k.with_norm(Norm::Euclidean);
        assert_eq!(e.distance(&[0, 3], &[4, 0], 0.5), 2.5);
    }

    #[test]
    fn negative_amplitude_rejected() {
        assert!(InteractionKernel::hard_sphere(-1.0, 1.0).validate().is_err());
    }
}
