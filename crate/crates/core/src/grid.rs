use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Point, TorusDomain, MAX_DIM};

/// Regular `M^dim` cell grid on a torus. Cell indices are row-major with
/// axis 0 varying fastest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    dom: TorusDomain,
    cells_per_axis: usize,
}

impl GridSpec {
    pub fn new(dom: TorusDomain, cells_per_axis: usize) -> Result<Self> {
        if cells_per_axis == 0 {
            return Err(Error::usage("grid needs at least one cell per axis"));
        }
        if cells_per_axis.checked_pow(dom.dim() as u32).is_none_or(|n| n > 1 << 26) {
            return Err(Error::usage(format!(
                "grid of {cells_per_axis}^{} cells is too large",
                dom.dim()
            )));
        }
        Ok(GridSpec { dom, cells_per_axis })
    }

    pub fn domain(&self) -> &TorusDomain {
        &self.dom
    }

    pub fn cells_per_axis(&self) -> usize {
        self.cells_per_axis
    }

    pub fn dim(&self) -> usize {
        self.dom.dim()
    }

    pub fn len(&self) -> usize {
        self.cells_per_axis.pow(self.dom.dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_width(&self) -> f64 {
        self.dom.side_length() / self.cells_per_axis as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_width().powi(self.dom.dim() as i32)
    }

    /// Per-axis cell coordinates of a flat index.
    pub fn unravel(&self, mut idx: usize) -> [usize; MAX_DIM] {
        let mut out = [0; MAX_DIM];
        for slot in out.iter_mut().take(self.dim()) {
            *slot = idx % self.cells_per_axis;
            idx /= self.cells_per_axis;
        }
        out
    }

    pub fn ravel(&self, cell: &[usize; MAX_DIM]) -> usize {
        (0..self.dim())
            .rev()
            .fold(0, |acc, k| acc * self.cells_per_axis + cell[k])
    }

    pub fn cell_of(&self, p: &Point) -> usize {
        let h = self.cell_width();
        let mut cell = [0; MAX_DIM];
        for (k, c) in p.coords().iter().enumerate() {
            cell[k] = ((c / h) as usize).min(self.cells_per_axis - 1);
        }
        self.ravel(&cell)
    }

    pub fn cell_center(&self, idx: usize) -> [f64; MAX_DIM] {
        let h = self.cell_width();
        let cell = self.unravel(idx);
        let mut out = [0.0; MAX_DIM];
        for k in 0..self.dim() {
            out[k] = (cell[k] as f64 + 0.5) * h;
        }
        out
    }

    /// Coarsens a field on this grid onto `coarse`, whose cells must be unions
    /// of cells of this grid. Values are averaged.
    pub fn coarsen(&self, field: &[f64], coarse: &GridSpec) -> Result<Vec<f64>> {
        if coarse.dim() != self.dim()
            || coarse.cells_per_axis > self.cells_per_axis
            || !self.cells_per_axis.is_multiple_of(coarse.cells_per_axis)
        {
            return Err(Error::usage(format!(
                "cannot coarsen a {}-cell grid onto {} cells per axis",
                self.cells_per_axis, coarse.cells_per_axis
            )));
        }
        let ratio = self.cells_per_axis / coarse.cells_per_axis;
        let mut out = vec![0.0; coarse.len()];
        for (i, v) in field.iter().enumerate() {
            let mut cell = self.unravel(i);
            for c in cell.iter_mut().take(self.dim()) {
                *c /= ratio;
            }
            out[coarse.ravel(&cell)] += v;
        }
        let per = ratio.pow(self.dim() as u32) as f64;
        out.iter_mut().for_each(|v| *v /= per);
        Ok(out)
    }
}
