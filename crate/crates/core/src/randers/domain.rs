use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Region of the bounding box whose grid nodes take part in the graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mask {
    /// Every node of the bounding box.
    Full,
    /// Axis-aligned sub-rectangle.
    Rect {
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
    },
    /// `r_in <= |p - center| <= r_out`.
    Annulus { center: [f64; 2], r_in: f64, r_out: f64 },
}

const MASK_EPS: f64 = 1e-12;

impl Mask {
    pub fn contains(&self, p: [f64; 2]) -> bool {
        match *self {
            Mask::Full => true,
            Mask::Rect {
                x_min,
                x_max,
                y_min,
                y_max,
            } => {
                p[0] >= x_min - MASK_EPS
                    && p[0] <= x_max + MASK_EPS
                    && p[1] >= y_min - MASK_EPS
                    && p[1] <= y_max + MASK_EPS
            }
            Mask::Annulus { center, r_in, r_out } => {
                let r = (p[0] - center[0]).hypot(p[1] - center[1]);
                r >= r_in - MASK_EPS && r <= r_out + MASK_EPS
            }
        }
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl BoundingBox {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        BoundingBox {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    pub fn unit_square() -> Self {
        BoundingBox::new(0.0, 1.0, 0.0, 1.0)
    }

    fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.x_min - MASK_EPS
            && p[0] <= self.x_max + MASK_EPS
            && p[1] >= self.y_min - MASK_EPS
            && p[1] <= self.y_max + MASK_EPS
    }
}

const INACTIVE: usize = usize::MAX;

/// Uniform `nx x ny` lattice over a bounding box, restricted to a mask.
///
/// Active nodes are numbered row by row (`j` outer, `i` inner).
#[derive(Debug, Clone)]
pub struct GridDomain {
    bbox: BoundingBox,
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
    mask: Mask,
    grid_to_node: Vec<usize>,
    node_to_cell: Vec<(usize, usize)>,
}

impl GridDomain {
    pub fn new(bbox: BoundingBox, nx: usize, ny: usize, mask: Mask) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::Domain(format!("resolution {nx}x{ny} must be at least 2x2")));
        }
        if !(bbox.x_max > bbox.x_min && bbox.y_max > bbox.y_min) {
            return Err(Error::Domain(format!("degenerate bounding box {bbox:?}")));
        }
        let hx = (bbox.x_max - bbox.x_min) / (nx - 1) as f64;
        let hy = (bbox.y_max - bbox.y_min) / (ny - 1) as f64;
        let mut grid_to_node = vec![INACTIVE; nx * ny];
        let mut node_to_cell = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                let p = [bbox.x_min + i as f64 * hx, bbox.y_min + j as f64 * hy];
                if mask.contains(p) {
                    grid_to_node[j * nx + i] = node_to_cell.len();
                    node_to_cell.push((i, j));
                }
            }
        }
        if node_to_cell.is_empty() {
            return Err(Error::Domain("mask selects no grid node".into()));
        }
        Ok(GridDomain {
            bbox,
            nx,
            ny,
            hx,
            hy,
            mask,
            grid_to_node,
            node_to_cell,
        })
    }

    /// Square `n x n` grid on the unit square.
    pub fn unit_square(n: usize) -> Result<Self> {
        GridDomain::new(BoundingBox::unit_square(), n, n, Mask::Full)
    }

    /// `r_in <= r <= r_out` around the origin on an `n x n` grid over `[-r_out, r_out]^2`.
    pub fn annulus(r_in: f64, r_out: f64, n: usize) -> Result<Self> {
        if !(r_in >= 0.0 && r_out > r_in) {
            return Err(Error::Domain(format!("invalid annulus radii {r_in}, {r_out}")));
        }
        GridDomain::new(
            BoundingBox::new(-r_out, r_out, -r_out, r_out),
            n,
            n,
            Mask::Annulus {
                center: [0.0, 0.0],
                r_in,
                r_out,
            },
        )
    }

    pub fn bbox(&self) -> BoundingBox {
        self.bbox
    }

    pub fn resolution(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn spacing(&self) -> (f64, f64) {
        (self.hx, self.hy)
    }

    /// The smaller of the two grid spacings.
    pub fn h(&self) -> f64 {
        self.hx.min(self.hy)
    }

    pub fn mask(&self) -> &Mask {
        &self.mask
    }

    pub fn active_count(&self) -> usize {
        self.node_to_cell.len()
    }

    pub fn cell(&self, node: usize) -> (usize, usize) {
        self.node_to_cell[node]
    }

    pub fn node_at(&self, i: isize, j: isize) -> Option<usize> {
        if i < 0 || j < 0 || i as usize >= self.nx || j as usize >= self.ny {
            return None;
        }
        match self.grid_to_node[j as usize * self.nx + i as usize] {
            INACTIVE => None,
            n => Some(n),
        }
    }

    pub fn coords(&self, node: usize) -> [f64; 2] {
        let (i, j) = self.node_to_cell[node];
        self.cell_coords(i, j)
    }

    fn cell_coords(&self, i: usize, j: usize) -> [f64; 2] {
        [
            self.bbox.x_min + i as f64 * self.hx,
            self.bbox.y_min + j as f64 * self.hy,
        ]
    }

    /// Inside the bounding box and the mask.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        self.bbox.contains(p) && self.mask.contains(p)
    }

    /// Active node closest to `p`, if `p` lies in the masked domain.
    pub fn nearest_node(&self, p: [f64; 2]) -> Option<usize> {
        if !self.contains(p) {
            return None;
        }
        let fi = ((p[0] - self.bbox.x_min) / self.hx).round() as isize;
        let fj = ((p[1] - self.bbox.y_min) / self.hy).round() as isize;
        if let Some(n) = self.node_at(fi, fj) {
            return Some(n);
        }
        // Rounded cell is masked out; search the neighbourhood.
        let mut best: Option<(f64, usize)> = None;
        for dj in -2..=2 {
            for di in -2..=2 {
                if let Some(n) = self.node_at(fi + di, fj + dj) {
                    let c = self.coords(n);
                    let d = (c[0] - p[0]).hypot(c[1] - p[1]);
                    if best.is_none_or(|(bd, _)| d < bd) {
                        best = Some((d, n));
                    }
                }
            }
        }
        best.map(|(_, n)| n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_layout() {
        let d = GridDomain::unit_square(11).unwrap();
        assert_eq!(d.active_count(), 121);
        assert!((d.h() - 0.1).abs() < 1e-15);
        let n = d.node_at(3, 4).unwrap();
        assert_eq!(n, 4 * 11 + 3);
        let c = d.coords(n);
        assert!((c[0] - 0.3).abs() < 1e-15 && (c[1] - 0.4).abs() < 1e-15);
        assert_eq!(d.nearest_node([0.31, 0.38]), Some(n));
        assert_eq!(d.nearest_node([1.5, 0.0]), None);
    }

    #[test]
    fn annulus_mask() {
        let d = GridDomain::annulus(1.5, 3.0, 61).unwrap();
        assert!(d.nearest_node([0.0, 0.0]).is_none());
        for n in 0..d.active_count() {
            let c = d.coords(n);
            let r = c[0].hypot(c[1]);
            assert!((1.5 - 1e-9..=3.0 + 1e-9).contains(&r));
        }
        let near_rim = d.nearest_node([1.52, 0.0]).unwrap();
        assert!(d.coords(near_rim)[0] >= 1.5);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(GridDomain::new(BoundingBox::unit_square(), 1, 5, Mask::Full).is_err());
        assert!(GridDomain::annulus(2.0, 1.0, 11).is_err());
        let empty = Mask::Rect {
            x_min: 5.0,
            x_max: 6.0,
            y_min: 5.0,
            y_max: 6.0,
        };
        assert!(GridDomain::new(BoundingBox::unit_square(), 5, 5, empty).is_err());
    }
}
