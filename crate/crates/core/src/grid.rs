//! Uniform Cartesian mesh, cell-average fields and interface operators.
//!
//! Cells are indexed `(i, j)` with `0 <= i < nx`, `0 <= j < ny` and stored
//! row-major (`j` is the row). Interface fields along `x` have `(nx + 1) * ny`
//! entries: entry `(i, j)` sits on the face `x_{i-1/2}` between cells `i - 1`
//! and `i`, so `i = 0` and `i = nx` are the two boundary faces. Along `y` the
//! layout is `nx * (ny + 1)` with the same convention in `j`.

use crate::error::{Result, TecnoError};
use crate::quadrature::GAUSS2;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Boundary {
    Periodic,
    /// Zero-order extrapolation: ghost cells copy the nearest interior cell.
    Outflow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub const BOTH: [Axis; 2] = [Axis::X, Axis::Y];
}

/// Uniform rectangular mesh.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid2D<T> {
    nx: usize,
    ny: usize,
    dx: T,
    dy: T,
    x0: T,
    y0: T,
    boundary: Boundary,
}

impl<T: Scalar> Grid2D<T> {
    /// Minimum number of cells per direction for the ENO2 stencil.
    pub const MIN_CELLS: usize = 3;

    pub fn new(nx: usize, ny: usize, dx: T, dy: T, x0: T, y0: T, boundary: Boundary) -> Result<Self> {
        if nx < Self::MIN_CELLS || ny < Self::MIN_CELLS {
            return Err(TecnoError::InvalidGrid(format!(
                "need at least {} cells per direction, got {nx}x{ny}",
                Self::MIN_CELLS
            )));
        }
        if !(dx > T::zero() && dy > T::zero()) || !dx.is_finite() || !dy.is_finite() {
            return Err(TecnoError::InvalidGrid(format!("cell widths must be positive, got dx={dx}, dy={dy}")));
        }
        if !x0.is_finite() || !y0.is_finite() {
            return Err(TecnoError::InvalidGrid("non-finite origin".into()));
        }
        Ok(Self { nx, ny, dx, dy, x0, y0, boundary })
    }

    /// Mesh of `nx * ny` cells covering `[x_min, x_max] x [y_min, y_max]`.
    pub fn over_domain(nx: usize, ny: usize, x_range: (T, T), y_range: (T, T), boundary: Boundary) -> Result<Self> {
        let (x_min, x_max) = x_range;
        let (y_min, y_max) = y_range;
        if nx == 0 || ny == 0 {
            return Err(TecnoError::InvalidGrid("zero cells".into()));
        }
        let dx = (x_max - x_min) / T::from_usize_lossy(nx);
        let dy = (y_max - y_min) / T::from_usize_lossy(ny);
        Self::new(nx, ny, dx, dy, x_min, y_min, boundary)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn dx(&self) -> T {
        self.dx
    }
    pub fn dy(&self) -> T {
        self.dy
    }
    pub fn origin(&self) -> (T, T) {
        (self.x0, self.y0)
    }
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }
    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }
    pub fn cell_area(&self) -> T {
        self.dx * self.dy
    }

    /// Number of cells along `axis`.
    pub fn len(&self, axis: Axis) -> usize {
        match axis {
            Axis::X => self.nx,
            Axis::Y => self.ny,
        }
    }

    pub fn spacing(&self, axis: Axis) -> T {
        match axis {
            Axis::X => self.dx,
            Axis::Y => self.dy,
        }
    }

    /// Length of a face normal to `axis` (`dy` for x-faces, `dx` for y-faces).
    pub fn face_length(&self, axis: Axis) -> T {
        match axis {
            Axis::X => self.dy,
            Axis::Y => self.dx,
        }
    }

    pub fn x_center(&self, i: usize) -> T {
        self.x0 + (T::from_usize_lossy(i) + T::half()) * self.dx
    }
    pub fn y_center(&self, j: usize) -> T {
        self.y0 + (T::from_usize_lossy(j) + T::half()) * self.dy
    }
    /// `x_{i+1/2}`, the right face of cell `i`.
    pub fn x_face(&self, i: usize) -> T {
        self.x0 + T::from_usize_lossy(i + 1) * self.dx
    }
    /// `y_{j+1/2}`, the top face of cell `j`.
    pub fn y_face(&self, j: usize) -> T {
        self.y0 + T::from_usize_lossy(j + 1) * self.dy
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        j * self.nx + i
    }

    /// Interior index that a possibly out-of-range 1D index resolves to.
    #[inline]
    pub fn resolve(&self, k: isize, n: usize) -> usize {
        match self.boundary {
            Boundary::Periodic => k.rem_euclid(n as isize) as usize,
            Boundary::Outflow => k.clamp(0, n as isize - 1) as usize,
        }
    }

    /// Shape `(columns, rows)` of an interface field normal to `axis`.
    pub fn interface_shape(&self, axis: Axis) -> (usize, usize) {
        match axis {
            Axis::X => (self.nx + 1, self.ny),
            Axis::Y => (self.nx, self.ny + 1),
        }
    }

    /// Interfaces that contribute to global sums: periodic domains count the
    /// wrap-around face once, outflow domains count both boundary faces.
    pub fn counted_interfaces(&self, axis: Axis) -> usize {
        let n = self.len(axis);
        match self.boundary {
            Boundary::Periodic => n,
            Boundary::Outflow => n + 1,
        }
    }
}

/// Cell averages on a grid at one time instant.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction<T> {
    grid: Grid2D<T>,
    values: Vec<T>,
    time: T,
}

impl<T: Scalar> GridFunction<T> {
    pub fn from_values(grid: Grid2D<T>, values: Vec<T>, time: T) -> Result<Self> {
        if values.len() != grid.cell_count() {
            return Err(TecnoError::InvalidGrid(format!(
                "expected {} cell values, got {}",
                grid.cell_count(),
                values.len()
            )));
        }
        ensure_finite(&values, "grid function")?;
        Ok(Self { grid, values, time })
    }

    pub fn constant(grid: Grid2D<T>, value: T) -> Result<Self> {
        Self::from_values(grid, vec![value; grid.cell_count()], T::zero())
    }

    pub fn from_fn(grid: Grid2D<T>, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.cell_count());
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                values.push(f(i, j));
            }
        }
        Self::from_values(grid, values, T::zero())
    }

    pub fn grid(&self) -> &Grid2D<T> {
        &self.grid
    }
    pub fn values(&self) -> &[T] {
        &self.values
    }
    pub fn time(&self) -> T {
        self.time
    }
    pub fn with_time(mut self, time: T) -> Self {
        self.time = time;
        self
    }
    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[self.grid.index(i, j)]
    }

    /// Value at a possibly ghost index, resolved by the boundary policy.
    #[inline]
    pub fn get_ghosted(&self, i: isize, j: isize) -> T {
        let gi = self.grid.resolve(i, self.grid.nx());
        let gj = self.grid.resolve(j, self.grid.ny());
        self.values[gj * self.grid.nx() + gi]
    }

    /// `sum u_ij dx dy`.
    pub fn total_mass(&self) -> T {
        crate::scalar::pairwise_sum(&self.values) * self.grid.cell_area()
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

/// Values living on the faces normal to one axis.
#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceField<T> {
    axis: Axis,
    cols: usize,
    rows: usize,
    values: Vec<T>,
}

impl<T: Scalar> InterfaceField<T> {
    pub fn zeros(grid: &Grid2D<T>, axis: Axis) -> Self {
        let (cols, rows) = grid.interface_shape(axis);
        Self { axis, cols, rows, values: vec![T::zero(); cols * rows] }
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }
    /// `(columns, rows)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.cols, self.rows)
    }
    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[j * self.cols + i]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.values[j * self.cols + i] = v;
    }

    /// Visits every interface counted once in global sums (see
    /// [`Grid2D::counted_interfaces`]), passing `(i, j, value)`.
    pub fn counted<'a>(&'a self, grid: &Grid2D<T>) -> impl Iterator<Item = (usize, usize, T)> + 'a {
        let (ci, cj) = match (self.axis, grid.boundary()) {
            (Axis::X, Boundary::Periodic) => (self.cols - 1, self.rows),
            (Axis::Y, Boundary::Periodic) => (self.cols, self.rows - 1),
            (_, Boundary::Outflow) => (self.cols, self.rows),
        };
        (0..cj).flat_map(move |j| (0..ci).map(move |i| (i, j, self.get(i, j))))
    }

    pub(crate) fn ensure_finite(&self, what: &'static str) -> Result<()> {
        ensure_finite(&self.values, what)
    }
}

/// Cell values extended by `g` ghost layers on every side.
#[derive(Clone, Debug, PartialEq)]
pub struct PaddedField<T> {
    ghosts: usize,
    cols: usize,
    rows: usize,
    values: Vec<T>,
}

impl<T: Scalar> PaddedField<T> {
    pub fn ghosts(&self) -> usize {
        self.ghosts
    }
    /// `(nx + 2g, ny + 2g)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.cols, self.rows)
    }
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Value at interior-relative indices, `-g <= i < nx + g`.
    #[inline]
    pub fn get(&self, i: isize, j: isize) -> T {
        let g = self.ghosts as isize;
        self.values[((j + g) as usize) * self.cols + (i + g) as usize]
    }

    /// Padded line through interior row/column `index` along `axis`.
    pub fn line(&self, axis: Axis, index: usize) -> Vec<T> {
        let g = self.ghosts;
        match axis {
            Axis::X => {
                let start = (index + g) * self.cols;
                self.values[start..start + self.cols].to_vec()
            }
            Axis::Y => (0..self.rows).map(|r| self.values[r * self.cols + index + g]).collect(),
        }
    }

    /// Drops the ghost layers.
    pub fn interior(&self) -> Vec<T> {
        let g = self.ghosts;
        let (nx, ny) = (self.cols - 2 * g, self.rows - 2 * g);
        let mut out = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            let start = (j + g) * self.cols + g;
            out.extend_from_slice(&self.values[start..start + nx]);
        }
        out
    }
}

pub(crate) fn ensure_finite<T: Scalar>(values: &[T], what: &'static str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(TecnoError::NonFinite(what))
    }
}

/// Pads `w` with `n_ghost` layers filled according to the grid's boundary
/// policy.
pub fn apply_boundary<T: Scalar>(w: &GridFunction<T>, n_ghost: usize) -> Result<PaddedField<T>> {
    let grid = w.grid();
    let limit = grid.nx().min(grid.ny());
    if !(1..=2).contains(&n_ghost) || n_ghost > limit {
        return Err(TecnoError::GhostWidth { requested: n_ghost, limit: limit.min(2) });
    }
    let g = n_ghost as isize;
    let cols = grid.nx() + 2 * n_ghost;
    let rows = grid.ny() + 2 * n_ghost;
    let mut values = Vec::with_capacity(cols * rows);
    for jp in 0..rows as isize {
        for ip in 0..cols as isize {
            values.push(w.get_ghosted(ip - g, jp - g));
        }
    }
    Ok(PaddedField { ghosts: n_ghost, cols, rows, values })
}

fn interface_map<T: Scalar>(w: &GridFunction<T>, axis: Axis, op: impl Fn(T, T) -> T) -> Result<InterfaceField<T>> {
    ensure_finite(w.values(), "interface operator input")?;
    let grid = *w.grid();
    let mut out = InterfaceField::zeros(&grid, axis);
    let (cols, rows) = out.shape();
    for j in 0..rows {
        for i in 0..cols {
            let (l, r) = match axis {
                Axis::X => (w.get_ghosted(i as isize - 1, j as isize), w.get_ghosted(i as isize, j as isize)),
                Axis::Y => (w.get_ghosted(i as isize, j as isize - 1), w.get_ghosted(i as isize, j as isize)),
            };
            out.set(i, j, op(l, r));
        }
    }
    out.ensure_finite("interface operator")?;
    Ok(out)
}

/// `[[w]] = w_right - w_left` on every face normal to `axis`, boundary faces
/// included.
pub fn interface_jump<T: Scalar>(w: &GridFunction<T>, axis: Axis) -> Result<InterfaceField<T>> {
    interface_map(w, axis, |l, r| r - l)
}

/// `{w} = (w_left + w_right) / 2` on every face normal to `axis`.
pub fn interface_average<T: Scalar>(w: &GridFunction<T>, axis: Axis) -> Result<InterfaceField<T>> {
    interface_map(w, axis, |l, r| (l + r) * T::half())
}

/// Cell average of a pointwise function by the tensor 2x2 Gauss-Legendre rule.
pub fn cell_average<T: Scalar>(grid: &Grid2D<T>, i: usize, j: usize, f: &impl Fn(T, T) -> T) -> T {
    let (xc, yc) = (grid.x_center(i), grid.y_center(j));
    let (hx, hy) = (grid.dx() * T::half(), grid.dy() * T::half());
    let mut acc = T::zero();
    for &gx in GAUSS2.iter() {
        for &gy in GAUSS2.iter() {
            acc += f(xc + hx * T::lit(gx), yc + hy * T::lit(gy));
        }
    }
    acc * T::lit(0.25)
}

/// Cell averages of `u0` (2x2 Gauss-Legendre per cell, exact for bicubics).
pub fn project_initial_data<T: Scalar>(grid: &Grid2D<T>, u0: impl Fn(T, T) -> T) -> Result<GridFunction<T>> {
    let values = (0..grid.ny())
        .flat_map(|j| (0..grid.nx()).map(move |i| (i, j)))
        .map(|(i, j)| cell_average(grid, i, j, &u0))
        .collect::<Vec<_>>();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(TecnoError::NonFinite("initial data"));
    }
    GridFunction::from_values(*grid, values, T::zero())
}
