use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::geometry::{Kernel, MAX_DIM};
use crate::grid::GridSpec;

/// How a periodic convolution is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvolutionMethod {
    /// Fast transform when the cells per axis are a power of two, direct sum otherwise.
    Auto,
    Fft,
    Direct,
}

struct FftPlan {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl FftPlan {
    fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        FftPlan {
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
        }
    }

    /// Unnormalised multi-dimensional transform, one axis at a time.
    fn transform(&self, grid: &GridSpec, data: &mut [Complex<f64>], inverse: bool) {
        let fft = if inverse { &self.inverse } else { &self.forward };
        let m = grid.cells_per_axis();
        let n = data.len();
        let mut line = vec![Complex::new(0.0, 0.0); m];
        let mut stride = 1;
        for _ in 0..grid.dim() {
            if stride == 1 {
                for chunk in data.chunks_exact_mut(m) {
                    fft.process(chunk);
                }
            } else {
                let block = stride * m;
                for start in (0..n).step_by(block) {
                    for offset in 0..stride {
                        let base = start + offset;
                        for (k, v) in line.iter_mut().enumerate() {
                            *v = data[base + k * stride];
                        }
                        fft.process(&mut line);
                        for (k, v) in line.iter().enumerate() {
                            data[base + k * stride] = *v;
                        }
                    }
                }
            }
            stride *= m;
        }
    }
}

/// Circular convolution with a cell-sampled kernel on a fixed grid:
/// `(k ∗ f)_i = Σ_j k(x_i − x_j)·f_j·h^dim` with minimum-image offsets.
pub struct PeriodicConvolver {
    grid: GridSpec,
    /// Non-zero kernel samples `(flat offset, weight)`.
    stencil: Vec<(usize, f64)>,
    spectrum: Option<(FftPlan, Vec<Complex<f64>>)>,
}

impl std::fmt::Debug for PeriodicConvolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PeriodicConvolver")
            .field("grid", &self.grid)
            .field("stencil_len", &self.stencil.len())
            .field("fft", &self.spectrum.is_some())
            .finish()
    }
}

impl PeriodicConvolver {
    pub fn new(k: &Kernel, grid: &GridSpec, method: ConvolutionMethod) -> Result<Self> {
        grid.domain().check_kernel(k)?;
        let m = grid.cells_per_axis();
        let use_fft = match method {
            ConvolutionMethod::Auto => m.is_power_of_two(),
            ConvolutionMethod::Fft => true,
            ConvolutionMethod::Direct => false,
        };
        let h = grid.cell_width();
        let vol = grid.cell_volume();
        let sampled: Vec<f64> = (0..grid.len())
            .map(|idx| {
                let cell = grid.unravel(idx);
                let mut r2 = 0.0;
                for &c in cell.iter().take(grid.dim()) {
                    let o = if c <= m / 2 { c as f64 } else { c as f64 - m as f64 };
                    r2 += (o * h) * (o * h);
                }
                k.eval_sq(r2) * vol
            })
            .collect();
        let stencil = sampled
            .iter()
            .enumerate()
            .filter(|(_, &w)| w != 0.0)
            .map(|(i, &w)| (i, w))
            .collect();
        let spectrum = use_fft.then(|| {
            let plan = FftPlan::new(m);
            let mut data: Vec<Complex<f64>> = sampled.iter().map(|&v| Complex::new(v, 0.0)).collect();
            plan.transform(grid, &mut data, false);
            (plan, data)
        });
        Ok(PeriodicConvolver {
            grid: *grid,
            stencil,
            spectrum,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// `Σ_u k(u)·h^dim`, the grid-quadrature mass of the kernel.
    pub fn grid_mass(&self) -> f64 {
        self.stencil.iter().map(|(_, w)| w).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.stencil.is_empty()
    }

    pub fn apply(&self, field: &[f64]) -> Vec<f64> {
        assert_eq!(field.len(), self.grid.len(), "field does not match the grid");
        if self.is_zero() {
            return vec![0.0; field.len()];
        }
        match &self.spectrum {
            Some((plan, hat)) => {
                let mut data: Vec<Complex<f64>> = field.iter().map(|&v| Complex::new(v, 0.0)).collect();
                plan.transform(&self.grid, &mut data, false);
                for (d, k) in data.iter_mut().zip(hat) {
                    *d *= k;
                }
                plan.transform(&self.grid, &mut data, true);
                let norm = 1.0 / field.len() as f64;
                data.iter().map(|c| c.re * norm).collect()
            }
            None => self.apply_direct(field),
        }
    }

    fn apply_direct(&self, field: &[f64]) -> Vec<f64> {
        let g = &self.grid;
        let m = g.cells_per_axis();
        let offsets: Vec<([usize; MAX_DIM], f64)> =
            self.stencil.iter().map(|&(o, w)| (g.unravel(o), w)).collect();
        (0..field.len())
            .map(|i| {
                let ci = g.unravel(i);
                offsets
                    .iter()
                    .map(|(o, w)| {
                        let mut cj = [0; MAX_DIM];
                        for k in 0..g.dim() {
                            cj[k] = (ci[k] + m - o[k]) % m;
                        }
                        w * field[g.ravel(&cj)]
                    })
                    .sum()
            })
            .collect()
    }
}

/// `(k ∗ f)` on the grid, choosing the evaluation path automatically.
pub fn convolve_periodic(field: &[f64], k: &Kernel, grid: &GridSpec) -> Result<Vec<f64>> {
    if field.len() != grid.len() {
        return Err(Error::usage(format!(
            "field has {} cells, grid has {}",
            field.len(),
            grid.len()
        )));
    }
    Ok(PeriodicConvolver::new(k, grid, ConvolutionMethod::Auto)?.apply(field))
}
