use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DomainKind {
    Torus,
    ProductXS,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeKind {
    Interior,
    Boundary,
    Exterior,
}

/// The Riemann-surface factor `S`: a flat rectangle, or an annulus modelled
/// as a rectangle whose second axis is periodic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SFactor {
    pub cells: [usize; 2],
    pub lengths: [f64; 2],
    pub origin: [f64; 2],
    pub periodic: [bool; 2],
}

impl SFactor {
    pub fn rectangle(cells: [usize; 2], lengths: [f64; 2]) -> Self {
        Self { cells, lengths, origin: [0.0, 0.0], periodic: [false, false] }
    }

    pub fn unit_square(cells: usize) -> Self {
        Self::rectangle([cells, cells], [1.0, 1.0])
    }

    /// Radial axis `[r_in, r_out]` (bounded) × angular axis of length `2π`
    /// (periodic), flat metric.
    pub fn annulus(radial_cells: usize, r_in: f64, r_out: f64, angular_cells: usize) -> Self {
        Self {
            cells: [radial_cells, angular_cells],
            lengths: [r_out - r_in, std::f64::consts::TAU],
            origin: [r_in, 0.0],
            periodic: [false, true],
        }
    }
}

/// Regular grid on `R^{2n}` with real axes `x¹, y¹, …, xⁿ, yⁿ` (axes `2j`,
/// `2j+1`). Nodes are stored row-major with axis 0 slowest.
///
/// A periodic axis with `N` cells has `N` nodes; a bounded axis with `N`
/// cells has `N + 1` nodes including both ends. Spacing is `L/N` either way.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDomain {
    kind: DomainKind,
    n: usize,
    counts: Vec<usize>,
    spacing: Vec<f64>,
    origin: Vec<f64>,
    periodic: Vec<bool>,
    strides: Vec<usize>,
    mask: Vec<NodeKind>,
}

fn check_axis(cells: usize, length: f64) -> Result<()> {
    if cells == 0 {
        return Err(Error::Domain("every axis needs at least one cell".into()));
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::Domain(format!("axis length must be positive, got {length}")));
    }
    Ok(())
}

impl GridDomain {
    fn build(
        kind: DomainKind,
        n: usize,
        cells: &[usize],
        lengths: &[f64],
        origin: &[f64],
        periodic: &[bool],
    ) -> Result<Self> {
        let dim = 2 * n;
        if n == 0 || cells.len() != dim || lengths.len() != dim {
            return Err(Error::Domain(format!("need {dim} axis sizes and lengths for n = {n}")));
        }
        for (&c, &l) in cells.iter().zip(lengths) {
            check_axis(c, l)?;
        }
        let counts: Vec<usize> = cells.iter().zip(periodic).map(|(&c, &p)| if p { c } else { c + 1 }).collect();
        let spacing: Vec<f64> = cells.iter().zip(lengths).map(|(&c, &l)| l / c as f64).collect();
        let mut strides = vec![1; dim];
        for a in (0..dim - 1).rev() {
            strides[a] = strides[a + 1] * counts[a + 1];
        }
        let total = strides[0] * counts[0];
        let mut d = Self {
            kind,
            n,
            counts,
            spacing,
            origin: origin.to_vec(),
            periodic: periodic.to_vec(),
            strides,
            mask: Vec::new(),
        };
        d.mask = (0..total)
            .map(|idx| {
                let on_edge = (0..dim).any(|a| {
                    let i = d.axis_index(idx, a);
                    !d.periodic[a] && (i == 0 || i + 1 == d.counts[a])
                });
                if on_edge {
                    NodeKind::Boundary
                } else {
                    NodeKind::Interior
                }
            })
            .collect();
        Ok(d)
    }

    /// Flat torus `C^n / Λ` with `cells[a]` nodes and period `lengths[a]` on
    /// each real axis.
    pub fn torus(n: usize, cells: &[usize], lengths: &[f64]) -> Result<Self> {
        Self::build(DomainKind::Torus, n, cells, lengths, &vec![0.0; 2 * n], &vec![true; 2 * n])
    }

    /// Torus with the same size on every axis and period `2π`.
    pub fn cubic_torus(n: usize, cells: usize) -> Result<Self> {
        Self::torus(n, &vec![cells; 2 * n], &vec![std::f64::consts::TAU; 2 * n])
    }

    /// `X × S` with `X` a flat torus of complex dimension `n − 1` (may be
    /// empty for `n = 1`).
    pub fn product(n: usize, x_cells: &[usize], x_lengths: &[f64], s: &SFactor) -> Result<Self> {
        if n == 0 || x_cells.len() != 2 * (n - 1) || x_lengths.len() != 2 * (n - 1) {
            return Err(Error::Domain(format!("X factor needs {} axes for n = {n}", 2 * n.saturating_sub(1))));
        }
        if s.periodic[0] && s.periodic[1] {
            return Err(Error::Domain("S factor needs at least one bounded axis".into()));
        }
        let mut cells = x_cells.to_vec();
        cells.extend_from_slice(&s.cells);
        let mut lengths = x_lengths.to_vec();
        lengths.extend_from_slice(&s.lengths);
        let mut origin = vec![0.0; 2 * (n - 1)];
        origin.extend_from_slice(&s.origin);
        let mut periodic = vec![true; 2 * (n - 1)];
        periodic.extend_from_slice(&s.periodic);
        Self::build(DomainKind::ProductXS, n, &cells, &lengths, &origin, &periodic)
    }

    /// `X × S` with every `X` axis of length `2π` and `x_cells` nodes.
    pub fn product_uniform(n: usize, x_cells: usize, s: &SFactor) -> Result<Self> {
        let m = 2 * n.saturating_sub(1);
        Self::product(n, &vec![x_cells; m], &vec![std::f64::consts::TAU; m], s)
    }

    /// Same geometry with a replacement node mask.
    pub fn with_mask(&self, mask: Vec<NodeKind>) -> Result<Self> {
        if mask.len() != self.len() {
            return Err(Error::Domain(format!("mask has {} entries, grid has {}", mask.len(), self.len())));
        }
        if self.kind == DomainKind::Torus && mask.iter().any(|m| *m != NodeKind::Interior) {
            return Err(Error::Domain("a torus has no boundary or exterior nodes".into()));
        }
        Ok(Self { mask, ..self.clone() })
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    /// Complex dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Real dimension `2n`.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn periodic(&self) -> &[bool] {
        &self.periodic
    }

    pub fn is_fully_periodic(&self) -> bool {
        self.periodic.iter().all(|&p| p)
    }

    pub fn mask(&self) -> &[NodeKind] {
        &self.mask
    }

    #[inline]
    pub fn node_kind(&self, idx: usize) -> NodeKind {
        self.mask[idx]
    }

    pub fn has_boundary(&self) -> bool {
        self.mask.contains(&NodeKind::Boundary)
    }

    pub fn nodes_of(&self, kind: NodeKind) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.mask[i] == kind).collect()
    }

    /// First real axis of the `S` factor.
    pub fn s_axis(&self) -> usize {
        2 * (self.n - 1)
    }

    #[inline]
    pub fn axis_index(&self, idx: usize, axis: usize) -> usize {
        (idx / self.strides[axis]) % self.counts[axis]
    }

    pub fn multi_index(&self, idx: usize) -> Vec<usize> {
        (0..self.dim()).map(|a| self.axis_index(idx, a)).collect()
    }

    pub fn index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn coords(&self, idx: usize) -> Vec<f64> {
        (0..self.dim()).map(|a| self.origin[a] + self.axis_index(idx, a) as f64 * self.spacing[a]).collect()
    }

    /// Node `step` positions along `axis`, wrapping on periodic axes.
    #[inline]
    pub fn neighbor(&self, idx: usize, axis: usize, step: isize) -> Option<usize> {
        let i = self.axis_index(idx, axis) as isize;
        let m = self.counts[axis] as isize;
        let j = i + step;
        let j = if self.periodic[axis] {
            j.rem_euclid(m)
        } else if j < 0 || j >= m {
            return None;
        } else {
            j
        };
        Some((idx as isize + (j - i) * self.strides[axis] as isize) as usize)
    }

    /// Whether two grids share geometry (mask ignored).
    pub fn same_geometry(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.n == other.n
            && self.counts == other.counts
            && self.spacing == other.spacing
            && self.origin == other.origin
            && self.periodic == other.periodic
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_layout() {
        let d = GridDomain::torus(1, &[4, 3], &[1.0, 3.0]).unwrap();
        assert_eq!(d.len(), 12);
        assert!(!d.has_boundary());
        assert_eq!(d.spacing(), &[0.25, 1.0]);
        assert_eq!(d.multi_index(7), vec![2, 1]);
        assert_eq!(d.index(&[2, 1]), 7);
        assert_eq!(d.neighbor(7, 0, 2), Some(1));
        assert_eq!(d.neighbor(0, 1, -1), Some(2));
    }

    #[test]
    fn product_mask() {
        let d = GridDomain::product_uniform(2, 4, &SFactor::unit_square(4)).unwrap();
        assert_eq!(d.counts(), &[4, 4, 5, 5]);
        assert_eq!(d.len(), 400);
        assert_eq!(d.nodes_of(NodeKind::Interior).len(), 16 * 9);
        assert_eq!(d.neighbor(d.index(&[0, 0, 0, 2]), 2, -1), None);
        assert_eq!(d.coords(d.index(&[1, 0, 4, 2])), vec![std::f64::consts::FRAC_PI_2, 0.0, 1.0, 0.5]);
    }

    #[test]
    fn annulus_has_one_periodic_s_axis() {
        let d = GridDomain::product(1, &[], &[], &SFactor::annulus(4, 1.0, 2.0, 8)).unwrap();
        assert_eq!(d.counts(), &[5, 8]);
        assert_eq!(d.nodes_of(NodeKind::Boundary).len(), 16);
        let bad = SFactor { periodic: [true, true], ..SFactor::unit_square(3) };
        assert!(GridDomain::product(1, &[], &[], &bad).is_err());
    }

    #[test]
    fn mask_replacement() {
        let d = GridDomain::product(1, &[], &[], &SFactor::unit_square(2)).unwrap();
        let mut m = d.mask().to_vec();
        m[0] = NodeKind::Exterior;
        assert_eq!(d.with_mask(m).unwrap().node_kind(0), NodeKind::Exterior);
        let t = GridDomain::cubic_torus(1, 3).unwrap();
        assert!(t.with_mask(vec![NodeKind::Boundary; 9]).is_err());
    }
}
