//! Nested uniform quadrilateral meshes of the unit square and coarse element
//! patches.
//!
//! Cells are numbered row-major, `index = iy * n + ix`, with `ix` counting
//! along x. Vertical edges come first (`iy * (n + 1) + ix` for the edge at
//! `x = ix * h`), followed by horizontal edges (`n * (n + 1) + iy * n + ix`
//! for the edge at `y = iy * h`).

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub ix: usize,
    pub iy: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Edge parallel to the y axis, normal along x.
    Vertical,
    /// Edge parallel to the x axis, normal along y.
    Horizontal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Adjacency {
    /// Interior edge; the normal points from `minus` to `plus`.
    Interior { minus: usize, plus: usize },
    /// Boundary edge with its single element; the normal points out of the domain.
    Boundary { element: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub orientation: Orientation,
    /// Lower-left end point.
    pub start: [f64; 2],
    pub length: f64,
    pub normal: [f64; 2],
    pub adjacency: Adjacency,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        matches!(self.adjacency, Adjacency::Boundary { .. })
    }

    /// Point on the edge at parameter `t` in `[0, 1]`.
    pub fn point(&self, t: f64) -> [f64; 2] {
        match self.orientation {
            Orientation::Vertical => [self.start[0], self.start[1] + t * self.length],
            Orientation::Horizontal => [self.start[0] + t * self.length, self.start[1]],
        }
    }
}

/// One uniform `n x n` level of square cells covering `[0, 1]^2`.
#[derive(Debug, Clone)]
pub struct MeshLevel {
    n: usize,
    cell_size: f64,
    cells: Vec<Cell>,
    edges: Vec<Edge>,
}

impl MeshLevel {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Mesh("cells per axis must be positive".into()));
        }
        let h = 1.0 / n as f64;
        let cells = (0..n * n).map(|e| Cell { ix: e % n, iy: e / n }).collect();

        let mut edges = Vec::with_capacity(2 * n * (n + 1));
        for iy in 0..n {
            for ix in 0..=n {
                let (normal, adjacency) = if ix == 0 {
                    ([-1.0, 0.0], Adjacency::Boundary { element: iy * n })
                } else if ix == n {
                    (
                        [1.0, 0.0],
                        Adjacency::Boundary {
                            element: iy * n + n - 1,
                        },
                    )
                } else {
                    let minus = iy * n + ix - 1;
                    (
                        [1.0, 0.0],
                        Adjacency::Interior {
                            minus,
                            plus: minus + 1,
                        },
                    )
                };
                edges.push(Edge {
                    orientation: Orientation::Vertical,
                    start: [ix as f64 * h, iy as f64 * h],
                    length: h,
                    normal,
                    adjacency,
                });
            }
        }
        for iy in 0..=n {
            for ix in 0..n {
                let (normal, adjacency) = if iy == 0 {
                    ([0.0, -1.0], Adjacency::Boundary { element: ix })
                } else if iy == n {
                    (
                        [0.0, 1.0],
                        Adjacency::Boundary {
                            element: (n - 1) * n + ix,
                        },
                    )
                } else {
                    let minus = (iy - 1) * n + ix;
                    (
                        [0.0, 1.0],
                        Adjacency::Interior {
                            minus,
                            plus: minus + n,
                        },
                    )
                };
                edges.push(Edge {
                    orientation: Orientation::Horizontal,
                    start: [ix as f64 * h, iy as f64 * h],
                    length: h,
                    normal,
                    adjacency,
                });
            }
        }

        Ok(Self {
            n,
            cell_size: h,
            cells,
            edges,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, index: usize) -> Cell {
        self.cells[index]
    }

    pub fn cell_index(&self, ix: usize, iy: usize) -> usize {
        iy * self.n + ix
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Lower-left corner of a cell.
    pub fn origin(&self, index: usize) -> [f64; 2] {
        let c = self.cells[index];
        [c.ix as f64 * self.cell_size, c.iy as f64 * self.cell_size]
    }

    pub fn centroid(&self, index: usize) -> [f64; 2] {
        let [x, y] = self.origin(index);
        [x + 0.5 * self.cell_size, y + 0.5 * self.cell_size]
    }
}

/// A coarse level and a uniform refinement of it.
#[derive(Debug, Clone)]
pub struct MeshHierarchy {
    coarse: MeshLevel,
    fine: MeshLevel,
    ratio: usize,
    parent: Vec<usize>,
}

impl MeshHierarchy {
    pub fn new(coarse_n: usize, fine_n: usize) -> Result<Self> {
        if !coarse_n.is_power_of_two() || !fine_n.is_power_of_two() {
            return Err(Error::Mesh(format!(
                "cells per axis must be powers of two (got {coarse_n}, {fine_n})"
            )));
        }
        if fine_n < coarse_n || !fine_n.is_multiple_of(coarse_n) {
            return Err(Error::Mesh(format!(
                "fine resolution {fine_n} is not a multiple of coarse resolution {coarse_n}"
            )));
        }
        let coarse = MeshLevel::new(coarse_n)?;
        let fine = MeshLevel::new(fine_n)?;
        let ratio = fine_n / coarse_n;
        let parent = fine
            .cells()
            .iter()
            .map(|c| coarse.cell_index(c.ix / ratio, c.iy / ratio))
            .collect();
        Ok(Self {
            coarse,
            fine,
            ratio,
            parent,
        })
    }

    pub fn coarse(&self) -> &MeshLevel {
        &self.coarse
    }

    pub fn fine(&self) -> &MeshLevel {
        &self.fine
    }

    /// Fine cells per coarse cell along one axis.
    pub fn ratio(&self) -> usize {
        self.ratio
    }

    pub fn parent(&self, fine_cell: usize) -> usize {
        self.parent[fine_cell]
    }

    /// Fine cells inside a coarse cell, in increasing index order.
    pub fn children(&self, coarse_cell: usize) -> Vec<usize> {
        let c = self.coarse.cell(coarse_cell);
        let r = self.ratio;
        let mut out = Vec::with_capacity(r * r);
        for fy in c.iy * r..(c.iy + 1) * r {
            for fx in c.ix * r..(c.ix + 1) * r {
                out.push(self.fine.cell_index(fx, fy));
            }
        }
        out
    }
}

/// Coarse elements within `layers` vertex-neighbor layers of a center element,
/// together with the fine cells and fine DG dofs they cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Patch {
    pub center: usize,
    pub layers: usize,
    pub coarse_members: Vec<usize>,
    pub fine_members: Vec<usize>,
    pub fine_dofs: Vec<usize>,
}

impl Patch {
    /// Whether the patch covers every coarse element.
    pub fn covers(&self, hier: &MeshHierarchy) -> bool {
        self.coarse_members.len() == hier.coarse().num_cells()
    }
}

pub fn build_patch(hier: &MeshHierarchy, center: usize, layers: usize) -> Patch {
    let coarse = hier.coarse();
    let n = coarse.n();
    let mut inside = vec![false; n * n];
    inside[center] = true;

    for _ in 0..layers {
        let prev = inside.clone();
        for (idx, &member) in prev.iter().enumerate() {
            if !member {
                continue;
            }
            let c = coarse.cell(idx);
            for iy in c.iy.saturating_sub(1)..=(c.iy + 1).min(n - 1) {
                for ix in c.ix.saturating_sub(1)..=(c.ix + 1).min(n - 1) {
                    inside[coarse.cell_index(ix, iy)] = true;
                }
            }
        }
    }

    let coarse_members: Vec<usize> = (0..n * n).filter(|&i| inside[i]).collect();
    let mut fine_members: Vec<usize> = coarse_members.iter().flat_map(|&t| hier.children(t)).collect();
    fine_members.sort_unstable();
    let fine_dofs = fine_members
        .iter()
        .flat_map(|&e| (0..4).map(move |k| 4 * e + k))
        .collect();

    Patch {
        center,
        layers,
        coarse_members,
        fine_members,
        fine_dofs,
    }
}

/// `ceil(growth * log_base(1 / H))`, clamped to the number of layers at which
/// every patch of the coarse mesh already covers the whole domain.
pub fn patch_layers_for(coarse_h: f64, growth: f64, log_base: f64) -> usize {
    assert!(
        coarse_h > 0.0 && coarse_h < 1.0,
        "coarse mesh size must lie in (0, 1)"
    );
    assert!(log_base > 1.0, "logarithm base must exceed 1");
    let raw = growth * (1.0 / coarse_h).ln() / log_base.ln();
    let nearest = raw.round();
    let layers = if (raw - nearest).abs() <= 1e-9 * nearest.abs().max(1.0) {
        nearest
    } else {
        raw.ceil()
    };
    let full = (1.0 / coarse_h).round() as usize - 1;
    (layers.max(0.0) as usize).min(full)
}
