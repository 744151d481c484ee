use crate::geometry::{Point, TorusDomain, MAX_DIM};

/// Cells in total are capped so the index stays small on huge tori.
const MAX_CELLS: usize = 1 << 21;

/// Cell list for one species. Cell side is at least the interaction range,
/// so every neighbour within range lies in the 3^dim surrounding cells.
/// With fewer than four cells per axis the index degrades to a full scan.
#[derive(Clone, Debug)]
pub(crate) struct CellIndex {
    dim: usize,
    per_axis: usize,
    width: f64,
    cells: Vec<Vec<u32>>,
    /// `(cell, slot)` of each particle.
    loc: Vec<(u32, u32)>,
}

impl CellIndex {
    pub fn new(dom: &TorusDomain, range: f64) -> Self {
        let dim = dom.dim();
        let l = dom.side_length();
        let axis_cap = (MAX_CELLS as f64).powf(1.0 / dim as f64).floor() as usize;
        let per_axis = if range > 0.0 {
            ((l / range).floor() as usize).min(axis_cap)
        } else {
            axis_cap.min(64)
        };
        if per_axis < 4 {
            return CellIndex {
                dim,
                per_axis: 0,
                width: l,
                cells: Vec::new(),
                loc: Vec::new(),
            };
        }
        CellIndex {
            dim,
            per_axis,
            width: l / per_axis as f64,
            cells: vec![Vec::new(); per_axis.pow(dim as u32)],
            loc: Vec::new(),
        }
    }

    pub fn is_brute_force(&self) -> bool {
        self.per_axis == 0
    }

    fn axis_cell(&self, c: f64) -> usize {
        ((c / self.width) as usize).min(self.per_axis - 1)
    }

    fn cell_of(&self, p: &Point) -> usize {
        p.coords()
            .iter()
            .rev()
            .fold(0, |acc, &c| acc * self.per_axis + self.axis_cell(c))
    }

    /// Registers the next particle index.
    pub fn push(&mut self, p: &Point) {
        if self.is_brute_force() {
            self.loc.push((0, 0));
            return;
        }
        let cell = self.cell_of(p);
        let idx = self.loc.len() as u32;
        self.loc.push((cell as u32, self.cells[cell].len() as u32));
        self.cells[cell].push(idx);
    }

    /// Drops particle `i`; the last particle is relabelled `i`.
    pub fn swap_remove(&mut self, i: usize) {
        let last = self.loc.len() - 1;
        if !self.is_brute_force() {
            let (cell, slot) = self.loc[i];
            let bucket = &mut self.cells[cell as usize];
            bucket.swap_remove(slot as usize);
            if let Some(&moved) = bucket.get(slot as usize) {
                self.loc[moved as usize].1 = slot;
            }
            if i != last {
                let (lc, ls) = self.loc[last];
                self.cells[lc as usize][ls as usize] = i as u32;
            }
        }
        self.loc.swap_remove(i);
    }

    /// Calls `f` with every particle index that may lie within range of `x`.
    pub fn for_candidates<F: FnMut(usize)>(&self, x: &Point, mut f: F) {
        if self.is_brute_force() {
            (0..self.loc.len()).for_each(f);
            return;
        }
        let n = self.per_axis as isize;
        let mut base = [0isize; MAX_DIM];
        for (k, &c) in x.coords().iter().enumerate() {
            base[k] = self.axis_cell(c) as isize;
        }
        let span = 3usize.pow(self.dim as u32);
        for code in 0..span {
            let mut shift = [0isize; MAX_DIM];
            let mut rest = code;
            for s in shift.iter_mut().take(self.dim) {
                *s = (rest % 3) as isize - 1;
                rest /= 3;
            }
            let flat = (0..self.dim).rev().fold(0, |acc, k| {
                acc * self.per_axis + (base[k] + shift[k]).rem_euclid(n) as usize
            });
            for &i in &self.cells[flat] {
                f(i as usize);
            }
        }
    }

    /// Candidates in the cell of `x` only; enough to detect coincident points.
    pub fn for_same_cell<F: FnMut(usize)>(&self, x: &Point, f: F) {
        if self.is_brute_force() {
            (0..self.loc.len()).for_each(f);
            return;
        }
        self.cells[self.cell_of(x)].iter().map(|&i| i as usize).for_each(f);
    }

    /// Checks that every particle sits in its own cell at its recorded slot.
    #[cfg(test)]
    pub fn consistent_with(&self, pts: &[Point]) -> bool {
        if pts.len() != self.loc.len() {
            return false;
        }
        if self.is_brute_force() {
            return true;
        }
        let stored: usize = self.cells.iter().map(Vec::len).sum();
        stored == pts.len()
            && pts.iter().enumerate().all(|(i, p)| {
                let (c, s) = self.loc[i];
                c as usize == self.cell_of(p) && self.cells[c as usize][s as usize] == i as u32
            })
    }
}
